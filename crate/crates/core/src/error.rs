//! Error type shared by all core modules.

use thiserror::Error;

/// Errors surfaced by model construction, linear algebra, and integration.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Operand shapes do not line up for the requested operation.
    #[error("dimension mismatch in {context}")]
    DimensionMismatch { context: String },

    /// An allocation would exceed the configured memory budget.
    #[error(
        "memory budget exceeded: {what} requires {required_bytes} bytes \
         but the budget is {budget_bytes} bytes{hint}"
    )]
    OutOfMemoryBudget {
        what: String,
        required_bytes: u128,
        budget_bytes: u64,
        hint: String,
    },

    /// A numerical procedure failed (singular solve, non-finite input, ...).
    #[error("numerical failure in {context}")]
    NumericalFailure { context: String },

    /// A model or configuration value violates its contract.
    #[error("invalid model: {reason}")]
    InvalidModel { reason: String },

    /// An integrator or sampler was configured inconsistently.
    #[error("invalid spec: {reason}")]
    InvalidSpec { reason: String },

    /// A state norm collapsed below representable scale.
    #[error("degenerate state: norm {norm:.3e} is below the representable floor")]
    DegenerateState { norm: f64 },

    /// The per-step jump probability broke the first-order unraveling bound.
    #[error(
        "trajectory step too large: total jump probability {total_jump_probability:.3} \
         exceeds {limit}; reduce dt"
    )]
    StepSizeTooLarge {
        total_jump_probability: f64,
        limit: f64,
    },

    /// Integration failed at a specific step.
    #[error("integration step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<CoreError>,
    },
}

impl CoreError {
    pub fn dimension_mismatch(context: impl Into<String>) -> Self {
        CoreError::DimensionMismatch {
            context: context.into(),
        }
    }

    pub fn numerical(context: impl Into<String>) -> Self {
        CoreError::NumericalFailure {
            context: context.into(),
        }
    }

    pub fn invalid_model(reason: impl Into<String>) -> Self {
        CoreError::InvalidModel {
            reason: reason.into(),
        }
    }

    pub fn invalid_spec(reason: impl Into<String>) -> Self {
        CoreError::InvalidSpec {
            reason: reason.into(),
        }
    }

    pub fn at_step(self, step: usize) -> Self {
        CoreError::StepFailed {
            step,
            source: Box::new(self),
        }
    }

    /// The innermost error, unwrapping any step wrappers.
    pub fn root(&self) -> &CoreError {
        match self {
            CoreError::StepFailed { source, .. } => source.root(),
            other => other,
        }
    }
}
