use thiserror::Error;

use crate::center::CenterResult;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Row indices carried by variants are 0-based; the `Display` impl labels them
/// from 1.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("input contains a non-finite value")]
    NonFinite,
    #[error("row {} is the zero vector", .0 + 1)]
    ZeroRow(usize),
    #[error("the first n rows are numerically singular (condition estimate {condition:e})")]
    SingularHead { condition: f64 },
    #[error("the simplex is unbounded{}", unbounded_detail(.offending_index, .witness_direction))]
    Unbounded {
        offending_index: Option<usize>,
        witness_direction: Option<Vec<f64>>,
    },
    #[error("invariant constant {0:e} is not positive; the interior is empty or a single point")]
    NonpositiveConstant(f64),
    #[error("invariant constant {0:e} is not positive; the constructed simplex has an empty interior")]
    EmptyInterior(f64),
    #[error("the head rows sum to (nearly) the zero vector (norm {0:e})")]
    DegenerateSum(f64),
    #[error("point is not strictly interior (smallest residual {min_residual:e})")]
    NotInterior { min_residual: f64 },
    #[error("start point is not strictly interior (smallest residual {min_residual:e})")]
    StartNotInterior { min_residual: f64 },
    #[error("direction is not a unit vector (norm {norm})")]
    NotUnit { norm: f64 },
    #[error("beta is the zero vector")]
    ZeroBeta,
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("line is parallel to the last facet")]
    ParallelToLastFacet,
    #[error("line has no harmonic point inside the simplex")]
    NoIntersection,
    #[error("Newton solver hit the iteration cap (relation residual {:e})", .0.eq24_residual)]
    MaxIterations(Box<CenterResult>),
    #[error("Newton line search stalled (relation residual {:e})", .0.eq24_residual)]
    LineSearchFailed(Box<CenterResult>),
    #[error("closed-form and Newton centers disagree by {discrepancy:e}")]
    CrossCheckFailed {
        closed_form: Box<CenterResult>,
        newton: Box<CenterResult>,
        discrepancy: f64,
    },
    #[error("the system of all rows except row {} is singular", .0 + 1)]
    DegenerateFacetSystem(usize),
    #[error("no acceptable simplex after {0} attempts")]
    GenerationFailed(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

fn unbounded_detail(index: &Option<usize>, witness: &Option<Vec<f64>>) -> String {
    let mut out = String::new();
    if let Some(k) = index {
        out.push_str(&format!(": gamma_{} is not positive", k + 1));
    }
    if let Some(v) = witness {
        out.push_str(&format!("; recession direction {v:?}"));
    }
    out
}

impl Error {
    /// Stable machine-readable name, used as the CLI `"error"` field.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NonFinite => "NonFinite",
            Error::ZeroRow(_) => "ZeroRow",
            Error::SingularHead { .. } => "SingularHead",
            Error::Unbounded { .. } => "Unbounded",
            Error::NonpositiveConstant(_) => "NonpositiveConstant",
            Error::EmptyInterior(_) => "EmptyInterior",
            Error::DegenerateSum(_) => "DegenerateSum",
            Error::NotInterior { .. } => "NotInterior",
            Error::StartNotInterior { .. } => "StartNotInterior",
            Error::NotUnit { .. } => "NotUnit",
            Error::ZeroBeta => "ZeroBeta",
            Error::AxisOutOfRange { .. } => "AxisOutOfRange",
            Error::ParallelToLastFacet => "ParallelToLastFacet",
            Error::NoIntersection => "NoIntersection",
            Error::MaxIterations(_) => "MaxIterations",
            Error::LineSearchFailed(_) => "LineSearchFailed",
            Error::CrossCheckFailed { .. } => "CrossCheckFailed",
            Error::DegenerateFacetSystem(_) => "DegenerateFacetSystem",
            Error::GenerationFailed(_) => "GenerationFailed",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }

    /// Process exit code: 2 for malformed input, 1 for everything the
    /// mathematics rejects.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ShapeMismatch(_)
            | Error::NonFinite
            | Error::ZeroRow(_)
            | Error::AxisOutOfRange { .. }
            | Error::InvalidConfig(_) => 2,
            _ => 1,
        }
    }
}
