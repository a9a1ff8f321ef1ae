//! Counter-based complexity measurements.
//!
//! For each `(n, s)` pair: insert `n` random `s`-bit keys, search every key
//! plus `n` random probes, then open an environment, insert a batch of
//! fresh keys and close it again. Every traversal is checked against the
//! linear-time bounds; wall time is reported only on request and never
//! gated, so the default output is identical across machines and reruns.

use std::fmt::{self, Write as _};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitstr::BitString;
use crate::lexikon::SearchStats;
use crate::scoped::ScopedDictionary;

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub n_list: Vec<usize>,
    pub s_list: Vec<usize>,
    pub seed: u64,
    /// Keys inserted inside the measured environment, capped at `n`.
    pub env_inserts: usize,
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { n_list: vec![1_000, 10_000], s_list: vec![8, 64, 512], seed: 1, env_inserts: 1_000, timing: false }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub s: usize,
    pub searches: usize,
    pub max_outer: usize,
    pub mean_outer: f64,
    pub max_links: usize,
    pub mean_links: f64,
    pub env_inserts: usize,
    pub max_copies: usize,
    pub mean_copies: f64,
    pub open_allocations: u64,
    pub open_copies: u64,
    pub close_steps: u64,
    pub violations: usize,
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// First few violation messages, for diagnosis.
    pub notes: Vec<String>,
}

impl BenchReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().map(|r| r.violations).sum()
    }
}

#[derive(Default)]
struct Acc {
    count: usize,
    max_outer: usize,
    sum_outer: usize,
    max_links: usize,
    sum_links: usize,
}

impl Acc {
    fn add(&mut self, st: &SearchStats) {
        self.count += 1;
        self.max_outer = self.max_outer.max(st.outer_iters);
        self.sum_outer += st.outer_iters;
        self.max_links = self.max_links.max(st.link_steps);
        self.sum_links += st.link_steps;
    }
}

fn mean(sum: usize, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        sum as f64 / count as f64
    }
}

fn random_key(rng: &mut ChaCha8Rng, s: usize) -> BitString {
    BitString::from_bits((0..s).map(|_| rng.gen::<bool>()))
}

const MAX_NOTES: usize = 10;

pub fn bench_one(n: usize, s: usize, seed: u64, env_inserts: usize, notes: &mut Vec<String>) -> BenchRow {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 20) ^ s as u64);
    let mut d: ScopedDictionary<u64> = ScopedDictionary::new().expect("base frame");
    let mut row = BenchRow { n, s, ..BenchRow::default() };
    let mut violate = |row: &mut BenchRow, msg: String| {
        row.violations += 1;
        if notes.len() < MAX_NOTES {
            notes.push(format!("n={n} s={s}: {msg}"));
        }
    };

    let keys: Vec<BitString> = (0..n).map(|_| random_key(&mut rng, s)).collect();
    for (i, k) in keys.iter().enumerate() {
        let rep = d.insert(k, i as u64).expect("unbounded arena");
        if let Err(e) = rep.stats.check_bounds(s) {
            violate(&mut row, format!("insert: {e}"));
        }
    }

    let mut acc = Acc::default();
    let probes: Vec<BitString> = (0..n).map(|_| random_key(&mut rng, s)).collect();
    for k in keys.iter().chain(&probes) {
        let out = d.search(k);
        if let Err(e) = out.stats.check_bounds(s) {
            violate(&mut row, format!("search: {e}"));
        }
        acc.add(&out.stats);
    }
    row.searches = acc.count;
    row.max_outer = acc.max_outer;
    row.mean_outer = mean(acc.sum_outer, acc.count);
    row.max_links = acc.max_links;
    row.mean_links = mean(acc.sum_links, acc.count);

    d.open_environment().expect("unbounded arena");
    row.open_allocations = d.last_cost().allocations;
    row.open_copies = d.last_cost().node_copies;
    let batch = env_inserts.min(n.max(1));
    let mut sum_copies = 0;
    for i in 0..batch {
        // Half overwrite existing keys, half add new ones.
        let k = if i % 2 == 0 && !keys.is_empty() { keys[rng.gen_range(0..n)].clone() } else { random_key(&mut rng, s) };
        let rep = d.insert(&k, u64::MAX).expect("unbounded arena");
        if let Err(e) = rep.stats.check_bounds(s) {
            violate(&mut row, format!("environment insert: {e}"));
        }
        let visited = rep.stats.nodes_visited;
        if rep.copies > visited || visited > rep.stats.link_steps + rep.stats.outer_iters {
            violate(&mut row, format!("copies {} / visited {visited} for {}", rep.copies, rep.stats));
        }
        row.max_copies = row.max_copies.max(rep.copies);
        sum_copies += rep.copies;
    }
    row.env_inserts = batch;
    row.mean_copies = mean(sum_copies, batch);
    d.close_environment().expect("environment was opened");
    row.close_steps = d.last_cost().steps;

    if row.max_outer > 2 * (s + 1) {
        let msg = format!("max outer iterations {} > 2(s+1)", row.max_outer);
        violate(&mut row, msg);
    }
    row.wall_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    row
}

pub fn run(config: &BenchConfig) -> BenchReport {
    let mut report = BenchReport::default();
    for &s in &config.s_list {
        for &n in &config.n_list {
            let mut row = bench_one(n, s, config.seed, config.env_inserts, &mut report.notes);
            if !config.timing {
                row.wall_ms = None;
            }
            report.rows.push(row);
        }
    }
    report
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let timing = self.rows.iter().any(|r| r.wall_ms.is_some());
        let mut s = String::new();
        let _ = write!(
            s,
            "{:>8} {:>5} {:>8} {:>9} {:>10} {:>9} {:>10} {:>10} {:>11} {:>10} {:>11} {:>10}",
            "n",
            "s",
            "searches",
            "max_outer",
            "mean_outer",
            "max_links",
            "mean_links",
            "max_copies",
            "mean_copies",
            "open_alloc",
            "close_steps",
            "violations"
        );
        if timing {
            let _ = write!(s, " {:>10}", "wall_ms");
        }
        s.push('\n');
        for r in &self.rows {
            let _ = write!(
                s,
                "{:>8} {:>5} {:>8} {:>9} {:>10.2} {:>9} {:>10.2} {:>10} {:>11.2} {:>10} {:>11} {:>10}",
                r.n,
                r.s,
                r.searches,
                r.max_outer,
                r.mean_outer,
                r.max_links,
                r.mean_links,
                r.max_copies,
                r.mean_copies,
                r.open_allocations,
                r.close_steps,
                r.violations
            );
            if let Some(ms) = r.wall_ms {
                let _ = write!(s, " {ms:>10.1}");
            }
            s.push('\n');
        }
        for note in &self.notes {
            let _ = writeln!(s, "violation: {note}");
        }
        let _ = writeln!(s, "total violations: {}", self.violations());
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bench_has_no_violations() {
        let cfg = BenchConfig { n_list: vec![10, 200], s_list: vec![8, 64], env_inserts: 50, ..BenchConfig::default() };
        let report = run(&cfg);
        assert_eq!(report.rows.len(), 4);
        assert_eq!(report.violations(), 0, "{report}");
        for r in &report.rows {
            assert_eq!(r.open_allocations, 2);
            assert!(r.max_outer <= 2 * (r.s + 1));
        }
    }

    #[test]
    fn output_is_deterministic() {
        let cfg = BenchConfig { n_list: vec![100], s_list: vec![16], env_inserts: 20, ..BenchConfig::default() };
        assert_eq!(run(&cfg).to_string(), run(&cfg).to_string());
    }
}
