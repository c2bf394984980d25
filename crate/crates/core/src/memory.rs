//! Memory budget for superoperator-scale allocations.
//!
//! Dense superoperators grow as 16·d⁴ bytes; builders consult a budget and
//! refuse (rather than abort) when an allocation would not fit.

use crate::error::CoreError;

/// Byte budget for large dense allocations. Defaults to 4 GiB.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryBudget {
    bytes: u64,
}

impl MemoryBudget {
    pub const DEFAULT_BYTES: u64 = 4 * 1024 * 1024 * 1024;

    pub fn from_bytes(bytes: u64) -> Self {
        MemoryBudget { bytes }
    }

    pub fn bytes(self) -> u64 {
        self.bytes
    }

    /// Refuses iff `required_bytes` strictly exceeds the budget.
    pub fn check(self, what: &str, required_bytes: u128, hint: &str) -> Result<(), CoreError> {
        if required_bytes > u128::from(self.bytes) {
            Err(CoreError::OutOfMemoryBudget {
                what: what.to_string(),
                required_bytes,
                budget_bytes: self.bytes,
                hint: if hint.is_empty() {
                    String::new()
                } else {
                    format!("; {hint}")
                },
            })
        } else {
            Ok(())
        }
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget {
            bytes: Self::DEFAULT_BYTES,
        }
    }
}

/// Bytes needed to store one dense complex d×d matrix.
pub fn matrix_bytes(dim: usize) -> u128 {
    16u128 * (dim as u128) * (dim as u128)
}

/// Bytes needed to store one dense complex d²×d² superoperator: 16·d⁴.
pub fn superoperator_bytes(dim: usize) -> u128 {
    let d = dim as u128;
    16u128 * d * d * d * d
}
