//! Signal-generator based informativity analysis for discrete- and
//! continuous-time LTI SISO systems.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: tolerance-aware rank, kernel and subspace utilities.
//! * [`lti`]: state-space plants, simulation and structural matrices.
//! * [`siggen`]: autonomous input generators, persistency of excitation and
//!   realization of a generator from a raw signal.
//! * [`informativity`]: input-output Hankel matrices and rank-based
//!   informativity verdicts.
//! * [`interconnection`]: the Sylvester-equation view of a generator driving a
//!   plant, exceptional initial-condition sets and the case classifier.
//! * [`continuous`]: jet-based counterpart for continuous-time systems.
//! * [`experiments`]: seeded Monte Carlo drivers producing JSON reports.
//! * [`io`]: CSV and JSON file formats.

pub mod continuous;
pub mod error;
pub mod experiments;
pub mod informativity;
pub mod interconnection;
pub mod io;
pub mod lti;
pub mod numerics;
pub mod siggen;

pub use error::{Error, Result};
pub use informativity::{CaseLabel, InformativityVerdict};
pub use interconnection::{InterconnectionAnalysis, TheoremOneVerdict};
pub use lti::{LtiSystem, TimeDomain, Trajectory};
pub use numerics::{Matrix, RankReport, Vector};
pub use siggen::SignalGenerator;
