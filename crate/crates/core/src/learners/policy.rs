use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ActionIndex, ContextPoint};

/// A deterministic map from contexts to arms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Policy {
    /// Always the same arm.
    Constant { arm: usize },
    /// `below` on `[0, cut)`, `above` on `[cut, 1]`.
    Threshold { cut: f64, below: usize, above: usize },
    /// Piecewise constant on the `2^depth` dyadic cells of `[0, 1]`; the
    /// point 1 belongs to the last cell.
    Cells { depth: u32, arms: Vec<usize> },
}

impl Policy {
    pub fn act(&self, x: &ContextPoint) -> ActionIndex {
        ActionIndex(match self {
            Policy::Constant { arm } => *arm,
            Policy::Threshold { cut, below, above } => {
                if x.coord < *cut {
                    *below
                } else {
                    *above
                }
            }
            Policy::Cells { depth, arms } => arms[cell_index(x.coord, *depth)],
        })
    }

    /// Largest arm the policy can emit.
    pub fn max_arm(&self) -> usize {
        match self {
            Policy::Constant { arm } => *arm,
            Policy::Threshold { below, above, .. } => (*below).max(*above),
            Policy::Cells { arms, .. } => arms.iter().copied().max().unwrap_or(0),
        }
    }

    pub fn validate(&self, arms: usize) -> Result<()> {
        if let Policy::Cells { depth, arms: table } = self {
            if *depth > 30 || table.len() != 1usize << depth {
                return Err(Error::InvalidParameter(format!(
                    "cell policy of depth {depth} needs {} entries, has {}",
                    1u64 << (*depth).min(63),
                    table.len()
                )));
            }
        }
        if let Policy::Threshold { cut, .. } = self {
            if !cut.is_finite() {
                return Err(Error::NonFinite(format!("threshold {cut}")));
            }
        }
        if self.max_arm() >= arms {
            return Err(Error::ArmOutOfRange {
                arm: self.max_arm(),
                arms,
            });
        }
        Ok(())
    }
}

/// Dyadic cell of `x` at `depth`, with 1 folded into the last cell.
pub(crate) fn cell_index(x: f64, depth: u32) -> usize {
    let n = 1usize << depth;
    ((x * n as f64) as usize).min(n - 1)
}
