//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong while validating parameters or running
/// quadrature-backed computations.
#[derive(Debug, Clone, Error)]
pub enum HardyError {
    /// A theorem hypothesis does not hold for the supplied parameters.
    /// `axis` is the offending factor (0-based) when the relation is
    /// per-axis, `relation` names the violated inequality or identity and
    /// `residual` quantifies by how much it fails.
    #[error("hypothesis violation{}: {relation} (residual {residual:.3e})",
            axis.map(|i| format!(" on axis {i}")).unwrap_or_default())]
    HypothesisViolation {
        axis: Option<usize>,
        relation: String,
        residual: f64,
    },

    /// An argument is outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature did not converge: the tail decays too slowly or an
    /// endpoint singularity is too strong for the integral to exist.
    #[error("quadrature did not converge in {context} ({levels} levels, last error estimate {err_est:.3e})")]
    NonConvergence {
        context: String,
        levels: u32,
        err_est: f64,
    },

    /// Grid node arrays and value matrices are inconsistent.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A norm ratio was requested for a function with vanishing norm.
    #[error("zero norm: the test function vanishes almost everywhere")]
    ZeroNorm,
}

impl HardyError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        HardyError::Domain(msg.into())
    }

    pub(crate) fn violation(axis: Option<usize>, relation: impl Into<String>, residual: f64) -> Self {
        HardyError::HypothesisViolation {
            axis,
            relation: relation.into(),
            residual,
        }
    }

    /// Attach an axis index to errors raised inside per-axis loops.
    pub(crate) fn on_axis(self, idx: usize) -> Self {
        match self {
            HardyError::HypothesisViolation {
                axis: None,
                relation,
                residual,
            } => HardyError::HypothesisViolation {
                axis: Some(idx),
                relation,
                residual,
            },
            HardyError::NonConvergence {
                context,
                levels,
                err_est,
            } => HardyError::NonConvergence {
                context: format!("axis {idx}: {context}"),
                levels,
                err_est,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, HardyError>;
