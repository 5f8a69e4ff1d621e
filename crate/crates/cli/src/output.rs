//! CSV traces, summaries and their configuration headers.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use firing_graph::graph::FiringGraph;

use crate::config::ExperimentConfig;
use crate::CliError;

/// `# key=value` lines carrying the full configuration.
pub fn config_header(cfg: &ExperimentConfig) -> String {
    let mut out = format!("# fgraph {}\n", cfg.experiment);
    for (k, v) in cfg.to_kv() {
        let _ = writeln!(out, "# {k}={v}");
    }
    out
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    let io = |path: &Path, source| CliError::Io { path: path.to_path_buf(), source };
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| io(&path, e))?;
    Ok(path)
}

/// Labels a grid bit in a trace: whether it is linked to the target factor,
/// and optionally its purity rank.
pub trait BitLabel: Sync {
    fn is_target(&self, bit: usize) -> bool;
    fn rank(&self, _bit: usize) -> Option<usize> {
        None
    }
}

/// Weights of updatable input edges, one row per edge per recorded tick.
pub struct Trace<'a> {
    every: u64,
    with_rank: bool,
    label: &'a dyn BitLabel,
    body: String,
    last: Option<u64>,
}

impl<'a> Trace<'a> {
    pub fn new(every: u64, with_rank: bool, label: &'a dyn BitLabel) -> Self {
        let mut body = String::from("tick,edge_src,edge_dst,weight,is_target");
        if with_rank {
            body.push_str(",purity_rank");
        }
        body.push('\n');
        Self { every, with_rank, label, body, last: None }
    }

    pub fn enabled(&self) -> bool {
        self.every > 0
    }

    /// Records `g` when `tick` falls on the trace period.
    pub fn observe(&mut self, tick: u64, g: &FiringGraph) {
        if self.enabled() && tick.is_multiple_of(self.every) {
            self.record(tick, g);
        }
    }

    fn record(&mut self, tick: u64, g: &FiringGraph) {
        for (a, c, link) in g.input_links().iter() {
            if !g.input_mask(a) {
                continue;
            }
            let bit = g.input_bits()[a];
            let _ = write!(self.body, "{tick},{bit},{c},{},{}", link.weight, self.label.is_target(bit) as u8);
            if self.with_rank {
                let _ = write!(self.body, ",{}", self.label.rank(bit).unwrap_or(0));
            }
            self.body.push('\n');
        }
        self.last = Some(tick);
    }

    /// Records the final state unless it was just recorded, appends the
    /// survivor line and returns the CSV body.
    pub fn finish(mut self, ticks: u64, g: &FiringGraph, survivors: &Survivors) -> String {
        if ticks > 0 && self.last != Some(ticks - 1) {
            self.record(ticks - 1, g);
        }
        let _ = writeln!(self.body, "# {}", survivors.line());
        self.body
    }
}

/// Survivor counts of a drained graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Survivors {
    pub sampled_targets: usize,
    pub sampled_noise: usize,
    pub surviving_targets: usize,
    pub surviving_noise: usize,
}

impl Survivors {
    pub fn count(sampled: &[usize], surviving: &[usize], label: &dyn BitLabel) -> Self {
        let mut s = Survivors::default();
        for &b in sampled {
            if label.is_target(b) {
                s.sampled_targets += 1;
            } else {
                s.sampled_noise += 1;
            }
        }
        for &b in surviving {
            if label.is_target(b) {
                s.surviving_targets += 1;
            } else {
                s.surviving_noise += 1;
            }
        }
        s
    }

    pub fn line(&self) -> String {
        format!(
            "survivors targets={}/{} noise={}/{}",
            self.surviving_targets, self.sampled_targets, self.surviving_noise, self.sampled_noise
        )
    }
}

/// Fixed-precision float for summaries.
pub fn fmt_f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "nan".into()
    }
}
