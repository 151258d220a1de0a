use crate::error::{Error, Result};
use crate::sum::CompensatedSum;
use crate::types::ActionIndex;

/// High-probability regret bound of EXP3.IX over `t` rounds with `k` arms at
/// confidence `1 - δ`: `4 sqrt(K T ln K) + (2 sqrt(K T / ln K) + 1) ln(2/δ)`.
pub fn exp3ix_highprob_bound(k: usize, t: u64, delta: f64) -> f64 {
    let (k, t) = (k as f64, t as f64);
    let lnk = k.ln();
    4.0 * (k * t * lnk).sqrt() + (2.0 * (k * t / lnk).sqrt() + 1.0) * (2.0 / delta).ln()
}

/// Regret bound of Hedge with `n` experts, `t` rounds and rate `eta`:
/// `ln N / η + T η / 8`.
pub fn hedge_regret_bound(n: usize, t: u64, eta: f64) -> f64 {
    (n as f64).ln() / eta + t as f64 * eta / 8.0
}

/// Realized regret against the best fixed arm in hindsight.
///
/// `vectors` holds the full reward vector of each round, `arms` entries per
/// round.
pub fn best_arm_regret(vectors: &[f64], arms: usize, actions: &[ActionIndex]) -> Result<f64> {
    if arms == 0 || vectors.len() != arms * actions.len() {
        return Err(Error::InvalidParameter(format!(
            "{} reward entries for {} rounds of {arms} arms",
            vectors.len(),
            actions.len()
        )));
    }
    let mut per_arm = vec![CompensatedSum::default(); arms];
    let mut got = CompensatedSum::default();
    for (row, a) in vectors.chunks_exact(arms).zip(actions) {
        if a.0 >= arms {
            return Err(Error::ArmOutOfRange { arm: a.0, arms });
        }
        for (acc, r) in per_arm.iter_mut().zip(row) {
            acc.add(*r);
        }
        got.add(row[a.0]);
    }
    let best = per_arm
        .iter()
        .map(CompensatedSum::value)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best - got.value())
}

/// Whether the realized best-arm regret of a run is within the EXP3.IX
/// high-probability bound.
pub fn exp3ix_highprob_check(
    vectors: &[f64],
    arms: usize,
    actions: &[ActionIndex],
    delta: f64,
) -> Result<bool> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("confidence δ = {delta}")));
    }
    let regret = best_arm_regret(vectors, arms, actions)?;
    Ok(regret <= exp3ix_highprob_bound(arms, actions.len() as u64, delta))
}
