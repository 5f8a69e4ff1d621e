//! Experiment configuration: defaults, `key=value` files and flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    SpnSingle,
    SpnEstimator,
    SpnJoint,
    SparseSingle,
    SparseDelta,
    CheckProps,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::SpnSingle,
        Experiment::SpnEstimator,
        Experiment::SpnJoint,
        Experiment::SparseSingle,
        Experiment::SparseDelta,
        Experiment::CheckProps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::SpnSingle => "spn-single",
            Experiment::SpnEstimator => "spn-estimator",
            Experiment::SpnJoint => "spn-joint",
            Experiment::SparseSingle => "sparse-single",
            Experiment::SparseDelta => "sparse-delta",
            Experiment::CheckProps => "check-props",
        }
    }

    fn is_sparse(self) -> bool {
        matches!(self, Experiment::SparseSingle | Experiment::SparseDelta)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| format!("unknown experiment `{s}`"))
    }
}

/// Optional settings, as given by a config file or by flags.
#[derive(Args, Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    #[arg(long, value_enum)]
    pub experiment: Option<Experiment>,
    /// Grid size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Target bit count (signal plus noise) or factor count (sparse grid).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub p_f: Option<f64>,
    #[arg(long)]
    pub p_n: Option<f64>,
    #[arg(long)]
    pub p_g: Option<f64>,
    /// Admission probability while sampling.
    #[arg(long)]
    pub p_s: Option<f64>,
    /// Number of preselected bits for joint graphs.
    #[arg(long)]
    pub i_pre: Option<usize>,
    /// Purity rank of the preselected bits (sparse-delta).
    #[arg(long)]
    pub pre_rank: Option<usize>,
    /// Feedback budget per edge.
    #[arg(long)]
    pub t: Option<u32>,
    #[arg(long)]
    pub t_max: Option<u64>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub q: Option<u32>,
    /// Derive (p, q) and N from the target purity even if p and q are given.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub auto_pq: Option<bool>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Trace sampling period in ticks; 0 disables traces.
    #[arg(long)]
    pub trace_every: Option<u64>,
    /// Comma-separated purity margins (sparse-delta).
    #[arg(long, value_delimiter = ',')]
    pub delta_list: Option<Vec<f64>>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Instants per estimator evaluation.
    #[arg(long)]
    pub eval_steps: Option<usize>,
    /// Labeled draws used to estimate the preselected purity (sparse-delta).
    #[arg(long)]
    pub omega_draws: Option<usize>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.trim().parse().map_err(|_| CliError::Usage(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    value.split(',').map(|v| parse(key, v)).collect()
}

impl Overrides {
    /// Sets one field from its key (dashes or underscores) and textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let key = key.trim().replace('_', "-");
        let k = key.as_str();
        match k {
            "experiment" => {
                self.experiment = Some(value.trim().parse().map_err(CliError::Usage)?);
            }
            "n" => self.n = Some(parse(k, value)?),
            "k" => self.k = Some(parse(k, value)?),
            "p-f" => self.p_f = Some(parse(k, value)?),
            "p-n" => self.p_n = Some(parse(k, value)?),
            "p-g" => self.p_g = Some(parse(k, value)?),
            "p-s" => self.p_s = Some(parse(k, value)?),
            "i-pre" => self.i_pre = Some(parse(k, value)?),
            "pre-rank" => self.pre_rank = Some(parse(k, value)?),
            "t" => self.t = Some(parse(k, value)?),
            "t-max" => self.t_max = Some(parse(k, value)?),
            "p" => self.p = Some(parse(k, value)?),
            "q" => self.q = Some(parse(k, value)?),
            "auto-pq" => self.auto_pq = Some(parse(k, value)?),
            "reps" => self.reps = Some(parse(k, value)?),
            "seed" => self.seed = Some(parse(k, value)?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "trace-every" => self.trace_every = Some(parse(k, value)?),
            "delta-list" => self.delta_list = Some(parse_list(k, value)?),
            "batch-size" => self.batch_size = Some(parse(k, value)?),
            "eval-steps" => self.eval_steps = Some(parse(k, value)?),
            "omega-draws" => self.omega_draws = Some(parse(k, value)?),
            _ => return Err(CliError::Usage(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Parses flat `key=value` lines; blank lines and `#` comments are skipped.
    pub fn from_kv(text: &str) -> Result<Self, CliError> {
        let mut o = Overrides::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
            o.set(key, value)?;
        }
        Ok(o)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_kv(&text)
    }

    /// Fields set in `over` replace those of `self`.
    pub fn merge(self, over: Overrides) -> Overrides {
        Overrides {
            experiment: over.experiment.or(self.experiment),
            n: over.n.or(self.n),
            k: over.k.or(self.k),
            p_f: over.p_f.or(self.p_f),
            p_n: over.p_n.or(self.p_n),
            p_g: over.p_g.or(self.p_g),
            p_s: over.p_s.or(self.p_s),
            i_pre: over.i_pre.or(self.i_pre),
            pre_rank: over.pre_rank.or(self.pre_rank),
            t: over.t.or(self.t),
            t_max: over.t_max.or(self.t_max),
            p: over.p.or(self.p),
            q: over.q.or(self.q),
            auto_pq: over.auto_pq.or(self.auto_pq),
            reps: over.reps.or(self.reps),
            seed: over.seed.or(self.seed),
            out: over.out.or(self.out),
            trace_every: over.trace_every.or(self.trace_every),
            delta_list: over.delta_list.or(self.delta_list),
            batch_size: over.batch_size.or(self.batch_size),
            eval_steps: over.eval_steps.or(self.eval_steps),
            omega_draws: over.omega_draws.or(self.omega_draws),
        }
    }
}

/// A fully resolved configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub n: usize,
    pub k: usize,
    pub p_f: f64,
    pub p_n: f64,
    pub p_g: f64,
    pub p_s: f64,
    pub i_pre: usize,
    pub pre_rank: usize,
    pub t: u32,
    pub t_max: u64,
    /// `None` when the pair is derived from the target purity.
    pub pq: Option<(u32, u32)>,
    pub reps: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub trace_every: u64,
    pub delta_list: Vec<f64>,
    pub batch_size: usize,
    pub eval_steps: usize,
    pub omega_draws: usize,
}

struct Defaults {
    n: usize,
    k: usize,
    p_n: f64,
    p_s: f64,
    i_pre: usize,
    t: u32,
    pq: Option<(u32, u32)>,
    reps: usize,
}

fn defaults(e: Experiment) -> Defaults {
    let d = Defaults { n: 1000, k: 50, p_n: 0.3, p_s: 1.0, i_pre: 0, t: 500, pq: None, reps: 1 };
    match e {
        Experiment::SpnSingle | Experiment::CheckProps => d,
        Experiment::SpnEstimator => Defaults { p_s: 0.5, t: 200, reps: 20, ..d },
        Experiment::SpnJoint => Defaults { p_n: 0.6, i_pre: 5, ..d },
        Experiment::SparseSingle => Defaults { k: 10, t: 1000, pq: Some((1, 1)), ..d },
        Experiment::SparseDelta => Defaults { k: 10, i_pre: 5, ..d },
    }
}

fn check_open_unit(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("{name} must lie in (0, 1), got {v}")))
    }
}

impl ExperimentConfig {
    pub fn resolve(o: Overrides) -> Result<Self, CliError> {
        let experiment = o.experiment.ok_or_else(|| CliError::Usage("missing --experiment".into()))?;
        let d = defaults(experiment);
        let t = o.t.unwrap_or(d.t);
        let pq = match (o.auto_pq.unwrap_or(false), o.p, o.q) {
            (true, _, _) => None,
            (false, Some(p), Some(q)) => Some((p, q)),
            (false, None, None) => d.pq,
            _ => return Err(CliError::Usage("give both --p and --q, or --auto-pq".into())),
        };
        let cfg = ExperimentConfig {
            experiment,
            n: o.n.unwrap_or(d.n),
            k: o.k.unwrap_or(d.k),
            p_f: o.p_f.unwrap_or(0.3),
            p_n: o.p_n.unwrap_or(d.p_n),
            p_g: o.p_g.unwrap_or(0.3),
            p_s: o.p_s.unwrap_or(d.p_s),
            i_pre: o.i_pre.unwrap_or(d.i_pre),
            pre_rank: o.pre_rank.unwrap_or(4),
            t,
            t_max: o.t_max.unwrap_or(100 * t as u64),
            pq,
            reps: o.reps.unwrap_or(d.reps),
            seed: o.seed.unwrap_or(42),
            out: o.out.unwrap_or_else(|| PathBuf::from("out")),
            trace_every: o.trace_every.unwrap_or(10),
            delta_list: o.delta_list.unwrap_or_else(|| vec![0.0, 0.01, 0.05, 0.1]),
            batch_size: o.batch_size.unwrap_or(64),
            eval_steps: o.eval_steps.unwrap_or(firing_graph::pipeline::DEFAULT_EVAL_STEPS),
            omega_draws: o.omega_draws.unwrap_or(1000),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        check_open_unit("p_f", self.p_f)?;
        if self.experiment.is_sparse() {
            check_open_unit("p_g", self.p_g)?;
        } else {
            check_open_unit("p_N", self.p_n)?;
        }
        if !(self.p_s > 0.0 && self.p_s <= 1.0) {
            return Err(CliError::Usage(format!("p_s must lie in (0, 1], got {}", self.p_s)));
        }
        let usage = |msg: String| Err(CliError::Usage(msg));
        if self.reps == 0 {
            return usage("reps must be at least 1".into());
        }
        if self.n == 0 || self.k == 0 {
            return usage("n and k must be positive".into());
        }
        if !self.experiment.is_sparse() && self.k > self.n {
            return usage(format!("k = {} exceeds n = {}", self.k, self.n));
        }
        if self.experiment.is_sparse() && self.k > 20 {
            return usage(format!("factor count {} exceeds 20", self.k));
        }
        if self.t == 0 || self.t_max < self.t as u64 {
            return usage("need T >= 1 and T_max >= T".into());
        }
        if matches!(self.pq, Some((0, _)) | Some((_, 0))) {
            return usage("p and q must be positive".into());
        }
        if self.batch_size == 0 || self.eval_steps == 0 || self.omega_draws == 0 {
            return usage("batch_size, eval_steps and omega_draws must be positive".into());
        }
        match self.experiment {
            Experiment::SpnJoint if self.i_pre == 0 || self.i_pre >= self.k => {
                usage(format!("i_pre must lie in 1..{}, got {}", self.k, self.i_pre))
            }
            Experiment::SparseDelta if self.i_pre == 0 => usage("i_pre must be positive".into()),
            Experiment::SparseDelta if self.pre_rank == 0 || self.pre_rank > self.k => {
                usage(format!("pre_rank must lie in 1..={}", self.k))
            }
            Experiment::SparseDelta
                if self.delta_list.is_empty() || self.delta_list.iter().any(|d| d.is_nan() || *d < 0.0) =>
            {
                usage("delta_list needs non-negative values".into())
            }
            _ => Ok(()),
        }
    }

    /// Every setting as `key=value` pairs, in a fixed order. The output parses
    /// back with [`Overrides::from_kv`].
    pub fn to_kv(&self) -> Vec<(&'static str, String)> {
        let mut kv = vec![
            ("experiment", self.experiment.to_string()),
            ("n", self.n.to_string()),
            ("k", self.k.to_string()),
            ("p-f", self.p_f.to_string()),
            ("p-n", self.p_n.to_string()),
            ("p-g", self.p_g.to_string()),
            ("p-s", self.p_s.to_string()),
            ("i-pre", self.i_pre.to_string()),
            ("pre-rank", self.pre_rank.to_string()),
            ("t", self.t.to_string()),
            ("t-max", self.t_max.to_string()),
        ];
        match self.pq {
            Some((p, q)) => {
                kv.push(("p", p.to_string()));
                kv.push(("q", q.to_string()));
                kv.push(("auto-pq", "false".into()));
            }
            None => kv.push(("auto-pq", "true".into())),
        }
        let deltas: Vec<String> = self.delta_list.iter().map(f64::to_string).collect();
        kv.extend([
            ("reps", self.reps.to_string()),
            ("seed", self.seed.to_string()),
            ("out", self.out.display().to_string()),
            ("trace-every", self.trace_every.to_string()),
            ("delta-list", deltas.join(",")),
            ("batch-size", self.batch_size.to_string()),
            ("eval-steps", self.eval_steps.to_string()),
            ("omega-draws", self.omega_draws.to_string()),
        ]);
        kv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = Overrides::from_kv("# comment\nexperiment = spn-single\nn=300\np_n=0.5\n").unwrap();
        let flags = Overrides { n: Some(120), ..Default::default() };
        let cfg = ExperimentConfig::resolve(file.merge(flags)).unwrap();
        assert_eq!((cfg.n, cfg.p_n, cfg.t), (120, 0.5, 500));
    }

    #[test]
    fn experiment_defaults() {
        let o = Overrides { experiment: Some(Experiment::SpnEstimator), ..Default::default() };
        let cfg = ExperimentConfig::resolve(o).unwrap();
        assert_eq!((cfg.p_s, cfg.t, cfg.reps, cfg.pq), (0.5, 200, 20, None));
        let o = Overrides { experiment: Some(Experiment::SparseDelta), ..Default::default() };
        let cfg = ExperimentConfig::resolve(o).unwrap();
        assert_eq!((cfg.k, cfg.i_pre, cfg.pq), (10, 5, None));
        assert_eq!(cfg.delta_list, vec![0.0, 0.01, 0.05, 0.1]);
    }

    #[test]
    fn kv_round_trip() {
        let o = Overrides::from_kv("experiment=sparse-delta\ndelta-list=0,0.2\nseed=7\np=2\nq=3").unwrap();
        let cfg = ExperimentConfig::resolve(o).unwrap();
        let text: String = cfg.to_kv().iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        assert_eq!(ExperimentConfig::resolve(Overrides::from_kv(&text).unwrap()).unwrap(), cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(Overrides::from_kv("bogus=1"), Err(CliError::Usage(_))));
        assert!(matches!(Overrides::from_kv("n=abc"), Err(CliError::Usage(_))));
        let bad = Overrides::from_kv("experiment=spn-single\np-n=1.5").unwrap();
        assert!(ExperimentConfig::resolve(bad).is_err());
        let half = Overrides::from_kv("experiment=spn-single\np=2").unwrap();
        assert!(ExperimentConfig::resolve(half).is_err());
        assert!(ExperimentConfig::resolve(Overrides::default()).is_err());
    }
}
