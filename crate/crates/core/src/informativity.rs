//! Input-output Hankel matrices and rank-based informativity verdicts.
//!
//! Data `(u, y)` of length `T` is informative for depth `L` when its `L`-windows
//! span every `L`-window the plant can produce, which happens exactly when
//! `rank(H_L,T(u, y)) = L + rank(O_L(C, A))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lti::{behavior_dimension, LtiSystem, Trajectory};
use crate::numerics::{self, Matrix, RankReport};
use crate::siggen::max_pe_order;

/// Three-way split on excitation level against depth `L` and order `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CaseLabel {
    /// Excitation below `L`: never informative.
    A,
    /// Between `L` and `L + n - 1`: informative except on an exceptional set.
    B,
    /// At least `L + n`: informative for every initial state.
    C,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IoHankel {
    /// `2L x (T - L + 1)`: input windows over output windows.
    pub matrix: Matrix,
    pub depth_l: usize,
    pub data_len_t: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InformativityVerdict {
    pub informative: bool,
    pub rank_achieved: usize,
    pub rank_required: usize,
    /// `None` when the governing case is unknown (continuous-time jets).
    pub case_label: Option<CaseLabel>,
    /// Smallest retained singular value when informative, otherwise the
    /// required singular value minus the tolerance (nonpositive when the
    /// matrix is rank deficient).
    pub margin: f64,
    pub tolerance_used: f64,
}

impl InformativityVerdict {
    pub(crate) fn from_rank(
        report: &RankReport,
        rank_required: usize,
        case_label: Option<CaseLabel>,
    ) -> Self {
        let informative = report.rank == rank_required;
        let margin = if informative {
            report.smallest_retained().unwrap_or(0.0)
        } else {
            report.sigma(rank_required) - report.tolerance_used
        };
        Self {
            informative,
            rank_achieved: report.rank,
            rank_required,
            case_label,
            margin,
            tolerance_used: report.tolerance_used,
        }
    }
}

pub fn io_hankel(traj: &Trajectory, l: usize) -> Result<IoHankel> {
    let t = traj.len();
    if l == 0 || l > t {
        return Err(Error::Precondition(format!(
            "depth L = {l} must lie in 1..={t}"
        )));
    }
    let (u, y) = (&traj.u, &traj.y);
    let matrix = Matrix::from_fn(2 * l, t - l + 1, |i, j| {
        if i < l {
            u[i + j]
        } else {
            y[i - l + j]
        }
    });
    Ok(IoHankel {
        matrix,
        depth_l: l,
        data_len_t: t,
    })
}

/// Compares the Hankel rank with `dim(B_L)` of the given plant. The case label
/// comes from [`willems_classify`] applied to the PE order of the input.
pub fn is_informative(
    traj: &Trajectory,
    l: usize,
    plant: &LtiSystem,
) -> Result<InformativityVerdict> {
    let h = io_hankel(traj, l)?;
    let report = numerics::numerical_rank(&h.matrix, None);
    let case = willems_classify(max_pe_order(&traj.u), l, plant.order());
    Ok(InformativityVerdict::from_rank(
        &report,
        behavior_dimension(plant, l),
        Some(case),
    ))
}

/// Same test when only the plant order is known. Assumes the generic
/// observability index, i.e. `rank(O_L) = min(L, n)`.
pub fn is_informative_blind(
    traj: &Trajectory,
    l: usize,
    assumed_n: usize,
) -> Result<InformativityVerdict> {
    let h = io_hankel(traj, l)?;
    let report = numerics::numerical_rank(&h.matrix, None);
    let case = willems_classify(max_pe_order(&traj.u), l, assumed_n);
    Ok(InformativityVerdict::from_rank(
        &report,
        l + l.min(assumed_n),
        Some(case),
    ))
}

pub fn willems_classify(pe_order: usize, l: usize, n: usize) -> CaseLabel {
    if pe_order < l {
        CaseLabel::A
    } else if pe_order < l + n {
        CaseLabel::B
    } else {
        CaseLabel::C
    }
}
