//! The five simulation experiments.

use std::fmt::Write as _;

use firing_graph::metrics::{coefficients_exact, estimate_rates, precision_from_purity, score_stats, ScoreParams};
use firing_graph::models::{
    select_pair_below, select_tuple, sparse_omega, spn_margin, weight_for_pair, GridModel, SignalPlusNoiseModel,
    SparseGridModel,
};
use firing_graph::pipeline::{
    evaluate_estimator, extract_estimator, run_round, run_round_observed, surviving_bits, Round, RoundConfig,
    StopReason,
};
use firing_graph::rng::{repetition_seed, stream_rng, EVAL_STREAM, MODEL_STREAM};
use rand::seq::index::sample as pick;
use rand::RngCore;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::output::{config_header, fmt_f, write_file, BitLabel, Survivors, Trace};
use crate::stats::{mean, spearman, std_dev};
use crate::{CliError, RunReport};

/// Runs `job(rep, rep_seed)` for every repetition in parallel, results in repetition order.
fn per_rep<T, F>(cfg: &ExperimentConfig, job: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T, CliError> + Sync,
{
    (0..cfg.reps).into_par_iter().map(|r| job(r, repetition_seed(cfg.seed, r as u64))).collect()
}

/// `(p, q)` and `N` for target purity `omega`: derived from the margin when
/// the pair is automatic, otherwise `N` follows the given pair.
fn score_for(cfg: &ExperimentConfig, omega: f64, delta: Option<f64>) -> Result<ScoreParams, CliError> {
    Ok(match (cfg.pq, delta) {
        (None, Some(d)) => select_tuple(omega, d, cfg.p_f, cfg.t)?,
        (None, None) => select_pair_below(omega, cfg.p_f, cfg.t)?,
        (Some((p, q)), _) => {
            ScoreParams { omega_target: omega, n: weight_for_pair(omega, cfg.p_f, p, q, cfg.t)?, t: cfg.t, p, q }
        }
    })
}

fn round_config(cfg: &ExperimentConfig, preselected: Vec<usize>, score: ScoreParams) -> RoundConfig {
    RoundConfig { factor: 0, p_s: cfg.p_s, preselected, score, t_max: cfg.t_max, batch_size: cfg.batch_size }
}

fn trace_name(base: &str, rep: usize, reps: usize) -> String {
    if reps == 1 {
        format!("{base}.csv")
    } else {
        format!("{base}_rep{rep}.csv")
    }
}

fn stop_name(s: StopReason) -> &'static str {
    match s {
        StopReason::Disconnected => "disconnected",
        StopReason::BudgetExhausted => "budget-exhausted",
        StopReason::MaxTicks => "max-ticks",
    }
}

struct SpnLabel<'a>(&'a SignalPlusNoiseModel);

impl BitLabel for SpnLabel<'_> {
    fn is_target(&self, bit: usize) -> bool {
        self.0.is_target(bit)
    }
}

struct SparseLabel<'a>(&'a SparseGridModel);

impl BitLabel for SparseLabel<'_> {
    fn is_target(&self, bit: usize) -> bool {
        self.0.is_linked(0, bit)
    }

    fn rank(&self, bit: usize) -> Option<usize> {
        Some(self.0.purity_rank(bit))
    }
}

/// One drained round with its trace body (if traces are on) and survivor counts.
struct Traced {
    round: Round,
    csv: Option<String>,
    survivors: Survivors,
}

fn traced_round(
    cfg: &ExperimentConfig,
    model: &dyn GridModel,
    label: &dyn BitLabel,
    rc: &RoundConfig,
    rng: &mut dyn RngCore,
    seed: u64,
    with_rank: bool,
) -> Result<Traced, CliError> {
    let mut trace = Trace::new(cfg.trace_every, with_rank, label);
    let round = run_round_observed(model, rc, rng, seed, &mut |t, g| trace.observe(t, g))?;
    let survivors = Survivors::count(&round.sample.sampled, &surviving_bits(&round.outcome.graph), label);
    let csv = trace.enabled().then(|| trace.finish(round.outcome.ticks, &round.outcome.graph, &survivors));
    Ok(Traced { round, csv, survivors })
}

fn outcome_line(rep: usize, t: &Traced) -> String {
    format!("rep={rep} ticks={} stop={} {}", t.round.outcome.ticks, stop_name(t.round.outcome.stop), t.survivors.line())
}

fn finish(cfg: &ExperimentConfig, mut report: RunReport, summary: String) -> Result<RunReport, CliError> {
    report.summary = format!("{}{summary}", config_header(cfg));
    report.files.push(write_file(&cfg.out, "summary.txt", &report.summary)?);
    Ok(report)
}

pub fn spn_single(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let (omega, delta) = spn_margin(0, cfg.p_n);
    let score = score_for(cfg, omega, Some(delta))?;
    let single = SignalPlusNoiseModel::with_targets(1, vec![0], cfg.p_f, cfg.p_n)?;
    let phi = precision_from_purity(coefficients_exact(&[0], 1, &single, 0)?.omega, cfg.p_f)?;
    let stats = score_stats(&score, phi)?;
    let echo = format!(
        "omega_target={}\ndelta={}\np={}\nq={}\nn_weight={}\ntarget_precision={}\ntheoretical_mean={}\ntheoretical_sd={}\n",
        fmt_f(omega),
        fmt_f(delta),
        score.p,
        score.q,
        score.n,
        fmt_f(phi),
        fmt_f(stats.mean),
        fmt_f((stats.var_per_step * score.t as f64).sqrt()),
    );
    let rc = round_config(cfg, vec![], score);
    let runs = per_rep(cfg, |_, seed| {
        let mut rng = stream_rng(seed, MODEL_STREAM);
        let model = SignalPlusNoiseModel::new(cfg.n, cfg.k, cfg.p_f, cfg.p_n, &mut rng)?;
        traced_round(cfg, &model, &SpnLabel(&model), &rc, &mut rng, seed, false)
    })?;
    let mut report = RunReport::default();
    let mut summary = echo.clone();
    for (r, t) in runs.iter().enumerate() {
        summary.push_str(&outcome_line(r, t));
        summary.push('\n');
        if let Some(csv) = &t.csv {
            let body = format!("{}{}{csv}", config_header(cfg), comment(&echo));
            report.files.push(write_file(&cfg.out, &trace_name("trace", r, cfg.reps), &body)?);
        }
    }
    finish(cfg, report, summary)
}

fn comment(lines: &str) -> String {
    lines.lines().map(|l| format!("# {l}\n")).collect()
}

pub fn spn_estimator(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let (omega, delta) = spn_margin(0, cfg.p_n);
    let score = score_for(cfg, omega, Some(delta))?;
    let rc = round_config(cfg, vec![], score);
    struct Row {
        sampled: usize,
        survivors: Survivors,
        precision: Option<f64>,
        recall: Option<f64>,
        fail: bool,
    }
    let rows = per_rep(cfg, |_, seed| {
        let mut rng = stream_rng(seed, MODEL_STREAM);
        let model = SignalPlusNoiseModel::new(cfg.n, cfg.k, cfg.p_f, cfg.p_n, &mut rng)?;
        let round = run_round(&model, &rc, &mut rng, seed)?;
        let surviving = surviving_bits(&round.outcome.graph);
        let survivors = Survivors::count(&round.sample.sampled, &surviving, &SpnLabel(&model));
        let sampled = round.sample.sampled.len();
        match extract_estimator(&round.outcome.graph) {
            Err(firing_graph::Error::NoSurvivors) => {
                Ok(Row { sampled, survivors, precision: None, recall: None, fail: true })
            }
            Err(e) => Err(e.into()),
            Ok(est) => {
                let eval = evaluate_estimator(&est, &model, 0, cfg.eval_steps, &mut stream_rng(seed, EVAL_STREAM))?;
                Ok(Row { sampled, survivors, precision: eval.precision(), recall: eval.recall(), fail: false })
            }
        }
    })?;

    let opt = |v: Option<f64>| v.map(fmt_f).unwrap_or_default();
    let mut csv = config_header(cfg);
    csv.push_str("rep,sampled,survivors,surviving_targets,precision,recall,fail\n");
    for (r, row) in rows.iter().enumerate() {
        let s = &row.survivors;
        let _ = writeln!(
            csv,
            "{r},{},{},{},{},{},{}",
            row.sampled,
            s.surviving_targets + s.surviving_noise,
            s.surviving_targets,
            opt(row.precision),
            opt(row.recall),
            row.fail as u8
        );
    }
    let precisions: Vec<f64> = rows.iter().filter_map(|r| r.precision).collect();
    let recalls: Vec<f64> = rows.iter().filter_map(|r| r.recall).collect();
    let fails = rows.iter().filter(|r| r.fail).count();
    let silent = rows.iter().filter(|r| !r.fail && r.precision.is_none()).count();
    let summary = format!(
        "p={}\nq={}\nn_weight={}\nprecision_mean={}\nprecision_std={}\nrecall_mean={}\nrecall_std={}\nfails={fails}\nsilent={silent}\n",
        score.p,
        score.q,
        score.n,
        opt(mean(&precisions)),
        opt(std_dev(&precisions)),
        opt(mean(&recalls)),
        opt(std_dev(&recalls)),
    );
    let mut report = RunReport::default();
    report.files.push(write_file(&cfg.out, "estimator.csv", &csv)?);
    finish(cfg, report, summary)
}

pub fn spn_joint(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let (omega, delta) = spn_margin(cfg.i_pre as u32, cfg.p_n);
    let score = score_for(cfg, omega, Some(delta))?;
    let echo = format!(
        "i_pre={}\nomega_i={}\ndelta_i={}\np={}\nq={}\nn_weight={}\n",
        cfg.i_pre,
        fmt_f(omega),
        fmt_f(delta),
        score.p,
        score.q,
        score.n
    );
    let runs = per_rep(cfg, |_, seed| {
        let mut rng = stream_rng(seed, MODEL_STREAM);
        let model = SignalPlusNoiseModel::new(cfg.n, cfg.k, cfg.p_f, cfg.p_n, &mut rng)?;
        let mut pre: Vec<usize> = pick(&mut rng, cfg.k, cfg.i_pre).iter().map(|j| model.target_bits()[j]).collect();
        pre.sort_unstable();
        let rc = round_config(cfg, pre, score);
        traced_round(cfg, &model, &SpnLabel(&model), &rc, &mut rng, seed, false)
    })?;
    let mut report = RunReport::default();
    let mut summary = echo.clone();
    for (r, t) in runs.iter().enumerate() {
        summary.push_str(&outcome_line(r, t));
        summary.push('\n');
        if let Some(csv) = &t.csv {
            let body = format!("{}{}{csv}", config_header(cfg), comment(&echo));
            report.files.push(write_file(&cfg.out, &trace_name("trace", r, cfg.reps), &body)?);
        }
    }
    finish(cfg, report, summary)
}

/// Final weight of every sampled bit linked to factor 0, with its purity rank.
/// Removed edges count as weight 0.
fn rank_weights(model: &SparseGridModel, round: &Round) -> Vec<(usize, u64)> {
    let g = &round.outcome.graph;
    round
        .sample
        .sampled
        .iter()
        .filter(|&&b| model.is_linked(0, b))
        .map(|&b| {
            let a = g.input_vertex_of_bit(b).expect("sampled bit is an input");
            let w = g.input_links().row(a).map(|(_, l)| l.weight).sum();
            (model.purity_rank(b), w)
        })
        .collect()
}

/// Per-rank mean weights and their Spearman correlation with rank.
fn rank_summary(pairs: &[(usize, u64)], k: usize) -> String {
    let mut out = String::new();
    let (mut ranks, mut means) = (Vec::new(), Vec::new());
    for r in 1..=k {
        let ws: Vec<f64> = pairs.iter().filter(|p| p.0 == r).map(|p| p.1 as f64).collect();
        if let Some(m) = mean(&ws) {
            let _ = writeln!(out, "rank={r} edges={} mean_weight={}", ws.len(), fmt_f(m));
            ranks.push(r as f64);
            means.push(m);
        }
    }
    let rho = spearman(&ranks, &means).map(fmt_f).unwrap_or_else(|| "nan".into());
    let _ = writeln!(out, "spearman_rank_weight={rho}");
    out
}

pub fn sparse_single(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let omega = sparse_omega(cfg.k, cfg.p_f)?;
    let score = score_for(cfg, omega, None)?;
    let echo = format!("omega_target={}\np={}\nq={}\nn_weight={}\n", fmt_f(omega), score.p, score.q, score.n);
    let rc = round_config(cfg, vec![], score);
    let runs = per_rep(cfg, |_, seed| {
        let mut rng = stream_rng(seed, MODEL_STREAM);
        let model = SparseGridModel::new(cfg.n, cfg.k, cfg.p_f, cfg.p_g, &mut rng)?;
        let t = traced_round(cfg, &model, &SparseLabel(&model), &rc, &mut rng, seed, true)?;
        let weights = rank_weights(&model, &t.round);
        Ok((t, weights))
    })?;
    let mut report = RunReport::default();
    let mut summary = echo.clone();
    let mut pooled = Vec::new();
    for (r, (t, weights)) in runs.iter().enumerate() {
        summary.push_str(&outcome_line(r, t));
        summary.push('\n');
        pooled.extend_from_slice(weights);
        if let Some(csv) = &t.csv {
            let body = format!("{}{}{csv}", config_header(cfg), comment(&echo));
            report.files.push(write_file(&cfg.out, &trace_name("trace", r, cfg.reps), &body)?);
        }
    }
    summary.push_str(&rank_summary(&pooled, cfg.k));
    finish(cfg, report, summary)
}

fn delta_tag(d: f64) -> String {
    d.to_string().replace('.', "p")
}

pub fn sparse_delta(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    struct DeltaRun {
        omega: f64,
        score: ScoreParams,
        traced: Traced,
    }
    let runs = per_rep(cfg, |_, seed| {
        let mut rng = stream_rng(seed, MODEL_STREAM);
        let model = SparseGridModel::new(cfg.n, cfg.k, cfg.p_f, cfg.p_g, &mut rng)?;
        let candidates: Vec<usize> =
            model.linked_bits(0).into_iter().filter(|&b| model.purity_rank(b) == cfg.pre_rank).collect();
        if candidates.len() < cfg.i_pre {
            return Err(CliError::Infeasible(format!(
                "only {} bits of purity rank {} are linked to the target factor",
                candidates.len(),
                cfg.pre_rank
            )));
        }
        let mut pre: Vec<usize> = pick(&mut rng, candidates.len(), cfg.i_pre).iter().map(|j| candidates[j]).collect();
        pre.sort_unstable();
        let (mu, nu) = estimate_rates(&pre, pre.len(), &model, 0, cfg.omega_draws, &mut rng);
        let omega_hat = match (mu, nu) {
            (Some(mu), Some(nu)) if mu > 0.0 => nu / mu,
            _ => {
                return Err(CliError::Infeasible("preselected bits never fired jointly while estimating purity".into()))
            }
        };
        // Every margin drains the same sample against the same grid stream.
        let after_estimate = rng;
        let deltas = cfg
            .delta_list
            .iter()
            .map(|&d| {
                let omega = (omega_hat - d).max(0.0);
                let score = score_for(cfg, omega, None)?;
                let rc = round_config(cfg, pre.clone(), score);
                let mut rng = after_estimate.clone();
                let traced = traced_round(cfg, &model, &SparseLabel(&model), &rc, &mut rng, seed, true)?;
                Ok(DeltaRun { omega, score, traced })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok((omega_hat, deltas))
    })?;

    let mut report = RunReport::default();
    let mut summary = String::new();
    for (r, (omega_hat, deltas)) in runs.iter().enumerate() {
        let _ = writeln!(summary, "rep={r} omega_hat={}", fmt_f(*omega_hat));
        for (&d, run) in cfg.delta_list.iter().zip(deltas) {
            let echo = format!(
                "omega_hat={}\ndelta={}\nomega_target={}\np={}\nq={}\nn_weight={}\n",
                fmt_f(*omega_hat),
                d,
                fmt_f(run.omega),
                run.score.p,
                run.score.q,
                run.score.n
            );
            let _ = writeln!(
                summary,
                "delta={d} omega_target={} p={} q={} n_weight={} {}",
                fmt_f(run.omega),
                run.score.p,
                run.score.q,
                run.score.n,
                outcome_line(r, &run.traced)
            );
            if let Some(csv) = &run.traced.csv {
                let body = format!("{}{}{csv}", config_header(cfg), comment(&echo));
                let name = trace_name(&format!("trace_delta_{}", delta_tag(d)), r, cfg.reps);
                report.files.push(write_file(&cfg.out, &name, &body)?);
            }
        }
    }
    finish(cfg, report, summary)
}

pub fn check_props(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let results = crate::props::run_all(cfg.seed);
    let mut summary = String::new();
    let mut failures = 0;
    for r in &results {
        match &r.failure {
            None => {
                let _ = writeln!(summary, "PASS {}", r.name);
            }
            Some(why) => {
                failures += 1;
                let _ = writeln!(summary, "FAIL {}: {why}", r.name);
            }
        }
    }
    let _ = writeln!(summary, "checks={} failures={failures}", results.len());
    let report = RunReport { failures, ..RunReport::default() };
    finish(cfg, report, summary)
}
