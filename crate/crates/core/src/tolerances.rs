//! Default thresholds shared by the acceptance suite and the command line.

use crate::compatibility::Equation;

/// Sup-norm threshold for differential residuals at the default resolution.
pub const DIFFERENTIAL: f64 = 1e-4;
/// Threshold for residuals that involve no finite differences.
pub const ALGEBRAIC: f64 = 1e-10;
/// Smallest acceptable observed convergence order.
pub const MIN_ORDER: f64 = 1.9;
/// `|d_zbar Q|` threshold on canonical patches.
pub const HOLOMORPHIC: f64 = 1e-6;
/// `|Delta ln q - 4K|` threshold on the synthetic patch.
pub const LN_Q: f64 = 1e-4;

pub fn default_for(eq: Equation) -> f64 {
    if eq.is_algebraic() {
        ALGEBRAIC
    } else {
        DIFFERENTIAL
    }
}
