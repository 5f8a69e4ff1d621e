//! Line-oriented text snapshots.
//!
//! ```text
//! counts <n_i> <n_c> <n_o>
//! grid_width <n>
//! input_bits <bit>...
//! levels <level>...
//! mask_i <0|1 string>
//! mask_c <0|1 string>
//! d_max <d>
//! edges <m>
//! <src> <dst> <weight>      (m lines, global ids, src then dst ascending)
//! ```
//!
//! Update budgets are not part of a snapshot; a parsed graph has all budgets at zero.

use std::fmt::Write as _;

use super::{EdgeKind, FiringGraph};
use crate::error::{Error, Result};

impl FiringGraph {
    /// Every live edge as `(src, dst, weight)` over global vertex ids, sorted.
    pub fn edge_triples(&self) -> Vec<(usize, usize, u64)> {
        let (n_i, n_c) = (self.n_inputs(), self.n_cores());
        let mut edges: Vec<(usize, usize, u64)> = self
            .input_links()
            .iter()
            .map(|(a, c, l)| (a, n_i + c, l.weight))
            .chain(self.core_links().iter().map(|(s, d, l)| (n_i + s, n_i + d, l.weight)))
            .chain(self.output_links().iter().map(|(c, o, l)| (n_i + c, n_i + n_c + o, l.weight)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn to_snapshot(&self) -> String {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let bits = |m: &[bool]| m.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        let mut out = String::new();
        let edges = self.edge_triples();
        // Writing to a String cannot fail.
        let _ = writeln!(out, "counts {} {} {}", self.n_inputs(), self.n_cores(), self.n_outputs());
        let _ = writeln!(out, "grid_width {}", self.grid_width());
        let _ = writeln!(out, "input_bits {}", join(self.input_bits()).trim_end());
        let _ = writeln!(out, "levels {}", join(self.levels()));
        let _ = writeln!(out, "mask_i {}", bits(&self.mask_i));
        let _ = writeln!(out, "mask_c {}", bits(&self.mask_c));
        let _ = writeln!(out, "d_max {}", self.d_max());
        let _ = writeln!(out, "edges {}", edges.len());
        for (s, d, w) in edges {
            let _ = writeln!(out, "{s} {d} {w}");
        }
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let mut header = |key: &str| -> Result<(usize, Vec<String>)> {
            let (n, line) =
                lines.next().ok_or_else(|| Error::Snapshot { line: 0, msg: format!("missing `{key}` line") })?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(key) {
                return Err(Error::Snapshot { line: n + 1, msg: format!("expected `{key}`") });
            }
            Ok((n + 1, parts.map(str::to_owned).collect()))
        };
        let nums = |line: usize, parts: &[String]| -> Result<Vec<usize>> {
            parts
                .iter()
                .map(|p| p.parse().map_err(|_| Error::Snapshot { line, msg: format!("bad integer {p:?}") }))
                .collect()
        };
        let mask = |line: usize, parts: &[String], len: usize| -> Result<Vec<bool>> {
            let s = parts.first().map(String::as_str).unwrap_or("");
            if s.len() != len || !s.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::Snapshot { line, msg: format!("expected a 0/1 string of length {len}") });
            }
            Ok(s.chars().map(|c| c == '1').collect())
        };
        let wrap = |line: usize| move |e: Error| Error::Snapshot { line, msg: e.to_string() };

        let (ln, p) = header("counts")?;
        let counts = nums(ln, &p)?;
        let [n_i, n_c, n_o] = counts[..] else {
            return Err(Error::Snapshot { line: ln, msg: "expected three counts".into() });
        };
        let (ln, p) = header("grid_width")?;
        let grid_width = *nums(ln, &p)?.first().ok_or(Error::Snapshot { line: ln, msg: "missing width".into() })?;
        let (ln_bits, p) = header("input_bits")?;
        let input_bits = nums(ln_bits, &p)?;
        let (ln_lv, p) = header("levels")?;
        let levels = nums(ln_lv, &p)?;
        if input_bits.len() != n_i || levels.len() != n_c {
            return Err(Error::Snapshot { line: ln_lv, msg: "list lengths disagree with counts".into() });
        }
        let mut g = FiringGraph::new(grid_width, input_bits, levels, n_o).map_err(wrap(ln_lv))?;
        let (ln, p) = header("mask_i")?;
        g.mask_i = mask(ln, &p, n_i)?;
        let (ln, p) = header("mask_c")?;
        g.mask_c = mask(ln, &p, n_c)?;
        let (ln, p) = header("d_max")?;
        let d_max = *nums(ln, &p)?.first().ok_or(Error::Snapshot { line: ln, msg: "missing d_max".into() })?;
        let (ln, p) = header("edges")?;
        let m = *nums(ln, &p)?.first().ok_or(Error::Snapshot { line: ln, msg: "missing edge count".into() })?;

        let mut seen = 0;
        for (n, line) in lines {
            let vals = nums(n + 1, &line.split_whitespace().map(str::to_owned).collect::<Vec<_>>())?;
            let [src, dst, w] = vals[..] else {
                return Err(Error::Snapshot { line: n + 1, msg: "expected `src dst weight`".into() });
            };
            let kind = match (src, dst) {
                (s, d) if s < n_i && d >= n_i && d < n_i + n_c => (EdgeKind::InputToCore, s, d - n_i),
                (s, d) if s >= n_i && s < n_i + n_c && d >= n_i && d < n_i + n_c => {
                    (EdgeKind::CoreToCore, s - n_i, d - n_i)
                }
                (s, d) if s >= n_i && s < n_i + n_c && d >= n_i + n_c && d < n_i + n_c + n_o => {
                    (EdgeKind::CoreToOutput, s - n_i, d - n_i - n_c)
                }
                _ => {
                    return Err(Error::Snapshot { line: n + 1, msg: format!("invalid edge {src} -> {dst}") });
                }
            };
            if w == 0 {
                return Err(Error::Snapshot { line: n + 1, msg: "edge weight must be positive".into() });
            }
            g.set_edge(kind.0, kind.1, kind.2, w as u64);
            seen += 1;
        }
        if seen != m {
            return Err(Error::Snapshot { line: ln, msg: format!("declared {m} edges, found {seen}") });
        }
        g.set_d_max_unchecked(d_max);
        Ok(g)
    }
}
