//! Bandit and expert-advice primitives.
//!
//! * [`Exp3Ix`] — adversarial K-armed bandit with implicit exploration and
//!   anytime rates `η_u = 2γ_u = sqrt(ln K / (K u))`;
//! * [`Hedge`] — exponential weights over (possibly importance-weighted)
//!   reward estimates at a fixed rate;
//! * [`ExpInf`] — restarted EXP3.IX over growing prefixes of an expert list,
//!   period `k` lasting `k^3` steps.

mod certificate;
mod exp3ix;
mod expinf;
mod hedge;

pub use certificate::{
    best_arm_regret, exp3ix_highprob_bound, exp3ix_highprob_check, hedge_regret_bound,
};
pub use exp3ix::Exp3Ix;
pub use expinf::{expinf_period_start, ExpInf};
pub use hedge::Hedge;

/// Normalised exponential weights `∝ exp(scale·x)`, computed with a max
/// shift so that the largest weight is exactly 1 before normalisation.
pub(crate) fn softmax(values: &[f64], scale: f64) -> Vec<f64> {
    let max = values
        .iter()
        .map(|v| v * scale)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut w: Vec<f64> = values.iter().map(|v| (v * scale - max).exp()).collect();
    let z: f64 = w.iter().sum();
    for x in &mut w {
        *x /= z;
    }
    w
}
