use thiserror::Error;

/// Which standing assumption on a generator/plant pair failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// `(L_g, S_g)` observable.
    GeneratorObservable,
    /// `(S_g, w0)` controllable.
    GeneratorExcited,
    /// `sigma(A)` and `sigma(S_g)` disjoint.
    DisjointSpectra,
    /// `(A, B)` controllable.
    PlantControllable,
}

impl std::fmt::Display for Assumption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Assumption::GeneratorObservable => "generator observability (L_g, S_g)",
            Assumption::GeneratorExcited => "generator excitation (S_g, w0)",
            Assumption::DisjointSpectra => "disjoint plant/generator spectra",
            Assumption::PlantControllable => "plant controllability (A, B)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("assumption violated: {0}")]
    Assumption(Assumption),

    #[error("signal not generator-representable at order {order}: {reason}")]
    NotRepresentable { order: usize, reason: String },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("rejection cap of {0} draws exceeded")]
    RejectionCap(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures caused by the numbers themselves (rank conditions,
    /// spectra, singular solves) rather than malformed input or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Assumption(_)
                | Error::NotRepresentable { .. }
                | Error::Singular(_)
                | Error::RejectionCap(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
