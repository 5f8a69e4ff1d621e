//! Randomised self-checks of the core library against independent oracles.

use firing_graph::f2core::{verify_decomposition, verify_partition, BitVector, CharPoly, DecompositionCase};
use firing_graph::metrics::{
    coefficients_exact, estimate_rates, precision_from_purity, score_stats, simulate_score, ScoreParams,
};
use firing_graph::models::{
    select_pair_below, select_tuple, sparse_omega, spn_margin, validate_tuple, SignalPlusNoiseModel,
};
use firing_graph::rng::stream_rng;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const WIDTH: usize = 8;
const IDENTITY_CASES: usize = 200;
const POLY_CASES: usize = 10_000;

pub struct Check {
    pub name: &'static str,
    pub failure: Option<String>,
}

fn check(name: &'static str, result: Result<(), String>) -> Check {
    Check { name, failure: result.err() }
}

fn random_set(rng: &mut ChaCha8Rng, width: usize) -> Vec<usize> {
    (0..width).filter(|_| rng.gen_bool(0.5)).collect()
}

fn partitions(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..IDENTITY_CASES {
        let set = random_set(rng, WIDTH);
        if set.is_empty() {
            continue;
        }
        let (j, k): (Vec<usize>, Vec<usize>) = set.iter().partition(|_| rng.gen_bool(0.5));
        match verify_partition(&set, &j, &k, WIDTH) {
            Ok(true) => {}
            Ok(false) => return Err(format!("case {case}: I={set:?} J={j:?} K={k:?}")),
            Err(e) => return Err(format!("case {case}: {e}")),
        }
    }
    Ok(())
}

fn decompositions(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..IDENTITY_CASES {
        let role: Vec<u8> = (0..WIDTH).map(|_| rng.gen_range(0..3)).collect();
        let outer: Vec<usize> = (0..WIDTH).filter(|&b| role[b] == 1).collect();
        let inner: Vec<usize> = (0..WIDTH).filter(|&b| role[b] == 2).collect();
        let k: Vec<usize> = inner.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if outer.is_empty() || k.is_empty() {
            continue;
        }
        let dc = DecompositionCase {
            outer_level: rng.gen_range(1..=outer.len()),
            inner_level: rng.gen_range(1..=k.len()),
            outer,
            inner,
            k,
        };
        match verify_decomposition(&dc, WIDTH) {
            Ok(true) => {}
            Ok(false) => return Err(format!("case {case}: {dc:?}")),
            Err(e) => return Err(format!("case {case}: {e}")),
        }
    }
    Ok(())
}

/// Threshold polynomial against a direct count of active bits.
fn polynomials(rng: &mut ChaCha8Rng) -> Result<(), String> {
    for case in 0..POLY_CASES {
        let set = random_set(rng, WIDTH);
        let level = rng.gen_range(0..=set.len());
        let x = BitVector::from_state(WIDTH, rng.gen_range(0..1u64 << WIDTH));
        let p = CharPoly::new(&set, level, WIDTH).map_err(|e| e.to_string())?;
        let active = set.iter().filter(|&&b| x.get(b)).count();
        if p.eval(&x).map_err(|e| e.to_string())? != (active >= level) {
            return Err(format!("case {case}: I={set:?} l={level} x={x}"));
        }
    }
    Ok(())
}

/// Exact recall and precision coefficients against Monte-Carlo rates, within 4 sigma.
fn coefficients(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let draws = 20_000;
    for p_n in [0.3, 0.6] {
        let model = SignalPlusNoiseModel::new(30, 6, 0.3, p_n, rng).map_err(|e| e.to_string())?;
        let mut bits: Vec<usize> = (0..30).collect();
        bits.shuffle(rng);
        for size in 1..=3 {
            let set = &bits[..size];
            let level = rng.gen_range(1..=size);
            let exact = coefficients_exact(set, level, &model, 0).map_err(|e| e.to_string())?;
            let (mu, nu) = estimate_rates(set, level, &model, 0, draws, rng);
            let (mu, nu) = (mu.ok_or("factor never active")?, nu.ok_or("factor never inactive")?);
            for (name, got, want, n) in
                [("mu", mu, exact.mu, draws as f64 * 0.3), ("nu", nu, exact.nu, draws as f64 * 0.7)]
            {
                let tol = 4.0 * (want * (1.0 - want) / n).sqrt() + 1e-3;
                if (got - want).abs() > tol {
                    return Err(format!("{name} of {set:?} at level {level}: {got} vs {want}"));
                }
            }
        }
    }
    Ok(())
}

/// Final score mean against its closed form, within 4 standard errors.
fn score_moments() -> Result<(), String> {
    let sp = ScoreParams { omega_target: 0.0, n: 50, t: 200, p: 2, q: 3 };
    let runs = 2000;
    for phi in [0.4, 0.5, 0.6] {
        let stats = score_stats(&sp, phi).map_err(|e| e.to_string())?;
        let finals: Vec<f64> = (0..runs)
            .map(|s| simulate_score(&sp, phi, s).map(|v| *v.last().unwrap() as f64))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let mean = finals.iter().sum::<f64>() / runs as f64;
        let se = (stats.var_per_step * sp.t as f64 / runs as f64).sqrt();
        if (mean - stats.mean).abs() > 4.0 * se {
            return Err(format!("phi={phi}: mean {mean} vs {}", stats.mean));
        }
    }
    Ok(())
}

/// Pairs for a single target bit at several noise rates, and the joint tuple.
fn tuples() -> Result<(), String> {
    let e = |e: firing_graph::Error| e.to_string();
    for (p_n, pair) in [(0.3, (1, 1)), (0.5, (2, 3)), (0.7, (3, 5)), (0.9, (5, 11))] {
        let (w, d) = spn_margin(0, p_n);
        let sp = select_tuple(w, d, 0.3, 500).map_err(e)?;
        if (sp.p, sp.q) != pair || !validate_tuple(&sp, w, d, 0.3).map_err(e)? {
            return Err(format!("p_N={p_n}: got ({}, {})", sp.p, sp.q));
        }
    }
    let (w, d) = spn_margin(5, 0.6);
    let sp = select_tuple(w, d, 0.3, 500).map_err(e)?;
    if (sp.p, sp.q, sp.n) != (7, 1, 7) {
        return Err(format!("joint tuple ({}, {}, {})", sp.p, sp.q, sp.n));
    }
    let omega = sparse_omega(10, 0.3).map_err(e)?;
    let sp = select_pair_below(omega, 0.3, 1000).map_err(e)?;
    let phi = precision_from_purity(omega, 0.3).map_err(e)?;
    if phi * (sp.p + sp.q) as f64 - sp.p as f64 >= 0.0 {
        return Err(format!("pair ({}, {}) does not drain purity {omega}", sp.p, sp.q));
    }
    Ok(())
}

pub fn run_all(seed: u64) -> Vec<Check> {
    let mut rng = stream_rng(seed, 0);
    vec![
        check("partition identity", partitions(&mut rng)),
        check("two-layer decomposition identity", decompositions(&mut rng)),
        check("threshold polynomial evaluation", polynomials(&mut rng)),
        check("exact vs sampled coefficients", coefficients(&mut rng)),
        check("score process moments", score_moments()),
        check("score tuple selection", tuples()),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn all_checks_pass() {
        for c in super::run_all(7) {
            assert!(c.failure.is_none(), "{}: {:?}", c.name, c.failure);
        }
    }
}
