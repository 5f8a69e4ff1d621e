//! Purity margins and the choice of `(ω, N, T, p, q)`.

use super::{binomial_pmf, check_probability, SignalPlusNoiseModel};
use crate::error::{Error, Result};
use crate::metrics::{precision_from_purity, ScoreParams};

/// Search bound on `p + q`.
pub const PAIR_SUM_CAP: u32 = 64;

/// Guards `floor` against representation error just below an integer.
const FLOOR_SLACK: f64 = 1e-9;

/// `ω_i = (1 + p_N) p_N^i / 2` and `δ_i = (1 - p_N) p_N^i / 2` for `i` preselected bits.
pub fn spn_margin(i: u32, p_n: f64) -> (f64, f64) {
    let base = p_n.powi(i as i32) / 2.0;
    ((1.0 + p_n) * base, (1.0 - p_n) * base)
}

/// Purity of a bit of purity rank `l`: `1 - (1 - p_f)^(l - 1)`.
pub fn sparse_omega(l: usize, p_f: f64) -> Result<f64> {
    check_probability("p_f", p_f)?;
    if l == 0 {
        return Err(Error::InvalidParameter("purity rank starts at 1".into()));
    }
    Ok(1.0 - (1.0 - p_f).powi(l as i32 - 1))
}

/// `Σ_{k = K - l - 1}^{K} C(K, k) p_f^k (1 - p_f)^(K - k)`, the lower index clamped at 0.
pub fn sparse_omega_minus(l: usize, k_factors: usize, p_f: f64) -> Result<f64> {
    check_probability("p_f", p_f)?;
    if l == 0 || l > k_factors {
        return Err(Error::InvalidParameter(format!("rank {l} outside 1..={k_factors}")));
    }
    let start = k_factors.saturating_sub(l + 1);
    Ok((start..=k_factors).map(|k| binomial_pmf(k_factors, k, p_f)).sum::<f64>().min(1.0))
}

fn gaps(omega: f64, delta: f64, factor_rate: f64) -> Result<(f64, f64)> {
    if !(factor_rate > 0.0 && factor_rate < 1.0) {
        return Err(Error::InvalidParameter(format!("factor rate {factor_rate} outside (0, 1)")));
    }
    if !(0.0 <= delta && delta <= omega) {
        return Err(Error::InvalidParameter(format!("need 0 <= delta <= omega, got ({delta}, {omega})")));
    }
    Ok((precision_from_purity(omega, factor_rate)?, precision_from_purity(omega - delta, factor_rate)?))
}

fn pair_fits(phi: f64, phi_prime: f64, p: u32, q: u32) -> bool {
    let s = (p + q) as f64;
    phi * s - p as f64 <= 0.0 && phi_prime * s - p as f64 > 0.0
}

/// `N = floor(-T (φ (p + q) - p))`.
fn initial_weight(phi: f64, p: u32, q: u32, t: u32) -> u64 {
    let drift = phi * (p + q) as f64 - p as f64;
    (-(t as f64) * drift + FLOOR_SLACK).floor().max(0.0) as u64
}

/// Pairs ordered by `p + q`, then by `p`.
fn pairs() -> impl Iterator<Item = (u32, u32)> {
    (2..=PAIR_SUM_CAP).flat_map(|s| (1..s).map(move |p| (p, s - p)))
}

/// Smallest `(p, q)` with `φ (p + q) - p <= 0 < φ' (p + q) - p`, where `φ`
/// and `φ'` are the precisions at purity `ω` and `ω - δ`, and the matching `N`.
pub fn select_tuple(omega: f64, delta: f64, factor_rate: f64, t: u32) -> Result<ScoreParams> {
    let (phi, phi_prime) = gaps(omega, delta, factor_rate)?;
    let (p, q) =
        pairs().find(|&(p, q)| pair_fits(phi, phi_prime, p, q)).ok_or(Error::InfeasibleTuple { cap: PAIR_SUM_CAP })?;
    let sp = ScoreParams { omega_target: omega, n: initial_weight(phi, p, q, t), t, p, q };
    sp.validate()?;
    Ok(sp)
}

/// Whether `(sp.p, sp.q)` satisfies both drift inequalities.
pub fn validate_tuple(sp: &ScoreParams, omega: f64, delta: f64, factor_rate: f64) -> Result<bool> {
    let (phi, phi_prime) = gaps(omega, delta, factor_rate)?;
    Ok(sp.p >= 1 && sp.q >= 1 && pair_fits(phi, phi_prime, sp.p, sp.q))
}

/// Smallest `(p, q)` with `φ (p + q) - p < 0` and the matching `N`.
pub fn select_pair_below(omega: f64, factor_rate: f64, t: u32) -> Result<ScoreParams> {
    let (phi, _) = gaps(omega, 0.0, factor_rate)?;
    let (p, q) = pairs()
        .find(|&(p, q)| phi * (p + q) as f64 - (p as f64) < 0.0)
        .ok_or(Error::InfeasibleTuple { cap: PAIR_SUM_CAP })?;
    let sp = ScoreParams { omega_target: omega, n: initial_weight(phi, p, q, t), t, p, q };
    sp.validate()?;
    Ok(sp)
}

/// `N` for a caller-chosen pair, clamped below at 1.
pub fn weight_for_pair(omega: f64, factor_rate: f64, p: u32, q: u32, t: u32) -> Result<u64> {
    let phi = precision_from_purity(omega, factor_rate)?;
    Ok(initial_weight(phi, p, q, t).max(1))
}

/// `E[|S|] = k + (n - k) p_N p_s`.
pub fn expected_sample_size(model: &SignalPlusNoiseModel, p_s: f64) -> Result<f64> {
    check_probability("p_s", p_s)?;
    Ok(model.k() as f64 + (model.n() - model.k()) as f64 * model.p_n() * p_s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margins() {
        let (w, d) = spn_margin(0, 0.3);
        assert!((w - 0.65).abs() < 1e-12 && (d - 0.35).abs() < 1e-12);
        assert!((w - d - 0.3).abs() < 1e-12);
        let (w5, _) = spn_margin(5, 0.6);
        assert!((w5 - 0.062208).abs() < 1e-9);
    }

    #[test]
    fn sparse_purities() {
        assert_eq!(sparse_omega(1, 0.3).unwrap(), 0.0);
        assert!((sparse_omega(2, 0.3).unwrap() - 0.3).abs() < 1e-12);
        assert!((sparse_omega(10, 0.3).unwrap() - (1.0 - 0.7f64.powi(9))).abs() < 1e-12);
        assert!(sparse_omega(0, 0.3).is_err());
        assert!(sparse_omega_minus(11, 10, 0.3).is_err());
        assert!((sparse_omega_minus(10, 10, 0.3).unwrap() - 1.0).abs() < 1e-12);
        let tail = sparse_omega_minus(8, 10, 0.3).unwrap();
        let expected: f64 = (1..=10).map(|k| binomial_pmf(10, k, 0.3)).sum();
        assert!((tail - expected).abs() < 1e-12);
    }

    #[test]
    fn selected_pairs() {
        for (p_n, pair) in [(0.3, (1, 1)), (0.5, (2, 3)), (0.7, (3, 5)), (0.9, (5, 11))] {
            let (w, d) = spn_margin(0, p_n);
            let sp = select_tuple(w, d, 0.3, 500).unwrap();
            assert_eq!((sp.p, sp.q), pair, "p_N = {p_n}");
            assert!(validate_tuple(&sp, w, d, 0.3).unwrap());
        }
    }

    #[test]
    fn joint_tuple() {
        let (w, d) = spn_margin(5, 0.6);
        let sp = select_tuple(w, d, 0.3, 500).unwrap();
        assert_eq!((sp.p, sp.q, sp.n), (7, 1, 7));
    }

    #[test]
    fn below_pair_is_strict() {
        let sp = select_pair_below(sparse_omega(10, 0.3).unwrap(), 0.3, 1000).unwrap();
        assert_eq!((sp.p, sp.q, sp.n), (1, 1, 382));
        // φ = 0.5 exactly at ω = 1, p_f = 0.5: (1, 1) has zero drift and is rejected.
        let sp = select_pair_below(1.0, 0.5, 10).unwrap();
        assert_eq!((sp.p, sp.q), (2, 1));
    }

    #[test]
    fn invalid_inputs() {
        assert!(select_tuple(0.5, 0.6, 0.3, 10).is_err());
        assert!(select_tuple(0.5, 0.1, 1.0, 10).is_err());
        assert_eq!(weight_for_pair(0.1, 0.3, 1, 1, 10).unwrap(), 1);
    }

    #[test]
    fn sample_size_formula() {
        let mut rng = rand::rngs::mock::StepRng::new(0, 1);
        let m = SignalPlusNoiseModel::new(1000, 50, 0.3, 0.3, &mut rng).unwrap();
        assert!((expected_sample_size(&m, 1.0).unwrap() - 335.0).abs() < 1e-9);
        assert_eq!(expected_sample_size(&m, 0.0).unwrap(), 50.0);
    }
}
