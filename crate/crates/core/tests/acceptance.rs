//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N ...: PASS|FAIL` line; run with `--nocapture` to see them.
//!
//! Criteria 2, 3, 4, 6 and 7 are judged over the same ten fuzz runs, which
//! are executed once (in parallel) and shared.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use lifo_dict::fuzz::{self, CheckKind, FuzzConfig, FuzzReport};
use lifo_dict::{encode_key, BitString, Dictionary, ScopedDictionary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FUZZ_RUNS: u64 = 10;
const FUZZ_OPS: usize = 100_000;

struct FuzzBatch {
    reports: Vec<FuzzReport>,
    elapsed: Duration,
}

impl FuzzBatch {
    fn count(&self, kinds: &[CheckKind]) -> u64 {
        self.reports.iter().flat_map(|r| kinds.iter().map(|&k| r.count(k))).sum()
    }

    fn first(&self, kinds: &[CheckKind]) -> Option<String> {
        self.reports.iter().find_map(|r| {
            kinds.iter().find_map(|k| {
                r.violations.get(k).map(|v| {
                    format!("seed {} step {} `{}`: {}", r.config.seed, v.first.step, v.first.op, v.first.message)
                })
            })
        })
    }

    fn sum(&self, f: impl Fn(&FuzzReport) -> u64) -> u64 {
        self.reports.iter().map(f).sum()
    }
}

fn fuzz_batch() -> &'static FuzzBatch {
    static BATCH: OnceLock<FuzzBatch> = OnceLock::new();
    BATCH.get_or_init(|| {
        let started = Instant::now();
        let reports = std::thread::scope(|scope| {
            let handles: Vec<_> = (1..=FUZZ_RUNS)
                .map(|seed| {
                    scope.spawn(move || {
                        fuzz::run(&FuzzConfig {
                            seed,
                            ops: FUZZ_OPS,
                            max_depth: 32,
                            key_bits: 0..=512,
                            minimize: false,
                            ..FuzzConfig::default()
                        })
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("fuzz thread")).collect()
        });
        FuzzBatch { reports, elapsed: started.elapsed() }
    })
}

fn verdict(n: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {n} {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n} {name} failed: {detail}");
}

#[test]
fn criterion_1_worked_example() {
    let members = [("ALFRED", 1940u32), ("ALBERT", 1955), ("PETRA", 1960), ("PETER", 1965)];
    let started = Instant::now();
    let mut d = Dictionary::new();
    for (name, year) in members {
        d.insert(&encode_key(name.as_bytes()), year).unwrap();
    }
    let found: Vec<_> = members.iter().map(|(name, _)| d.lookup(&encode_key(name.as_bytes()))).collect();
    let fifth = d.lookup(&encode_key(b"PAUL"));
    let elapsed = started.elapsed();

    let exact = found == members.iter().map(|&(_, y)| Some(y)).collect::<Vec<_>>() && fifth.is_none();
    let fast = elapsed < Duration::from_millis(1);
    verdict(1, "worked example", exact && fast, format!("lookups {found:?}, PAUL {fifth:?}, {elapsed:?}"));
}

#[test]
fn criterion_2_oracle_equivalence() {
    let b = fuzz_batch();
    let kinds = [CheckKind::Panic, CheckKind::Oracle, CheckKind::Structure];
    let divergences = b.count(&kinds);
    let ops = b.sum(|r| r.tally.inserts + r.tally.searches + r.tally.removes + r.tally.opens + r.tally.closes);
    let max_depth = b.reports.iter().map(|r| r.tally.max_depth).max().unwrap_or(0);
    let max_bits = b.reports.iter().map(|r| r.tally.max_key_bits).max().unwrap_or(0);
    let full_runs = b.reports.len() as u64 == FUZZ_RUNS && ops == FUZZ_RUNS * FUZZ_OPS as u64;
    let within_time = b.elapsed < Duration::from_secs(60);
    let mut detail = format!(
        "{divergences} divergences over {} runs, {ops} ops, max depth {max_depth}, max key {max_bits} bits, {:.1?}",
        b.reports.len(),
        b.elapsed
    );
    if let Some(first) = b.first(&kinds) {
        detail += &format!("; first: {first}");
    }
    verdict(2, "oracle equivalence", divergences == 0 && full_runs && max_depth <= 32 && within_time, detail);
}

#[test]
fn criterion_3_search_bound() {
    let b = fuzz_batch();
    let outer = b.count(&[CheckKind::OuterIters]);
    let distance = b.count(&[CheckKind::DistanceBudget]);
    let chain = b.count(&[CheckKind::ChainSteps]);
    let zeros = b.count(&[CheckKind::ZeroRun]);
    let tight = b.count(&[CheckKind::OuterItersTight]);
    let searches = b.sum(|r| r.tally.searches);
    let excess = b.reports.iter().map(|r| r.tally.max_outer_excess).max().unwrap_or(0);
    let mut detail = format!(
        "{searches} searches; outer_iters > 2(s+1): {outer} (max excess {excess}), sum(d) > s: {distance}, \
         link_steps > s+r: {chain}, 3 zero run: {zeros}; outer_iters > 2s+3: {tight}"
    );
    if let Some(first) = b.first(&[CheckKind::OuterIters]) {
        detail += &format!("; first: {first}");
    }
    verdict(3, "search bound", outer + distance + chain + zeros == 0, detail);
}

#[test]
fn criterion_4_lifo_exactness() {
    let b = fuzz_batch();
    let kinds = [CheckKind::LifoRestore, CheckKind::FrameWrites];
    let violations = b.count(&kinds);
    let pairs = b.sum(|r| r.tally.lifo_checks);
    let lookups = b.sum(|r| r.tally.lifo_lookups);
    let mut detail = format!("{violations} violations over {pairs} open/close pairs, {lookups} post-close lookups");
    if let Some(first) = b.first(&kinds) {
        detail += &format!("; first: {first}");
    }
    verdict(4, "LiFo exactness", violations == 0 && pairs > 0, detail);
}

fn random_key(rng: &mut ChaCha8Rng) -> BitString {
    let len = rng.gen_range(1..=96);
    BitString::from_bits((0..len).map(|_| rng.gen::<bool>()))
}

#[test]
fn criterion_5_constant_time_environments() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut close_steps = Vec::new();
    let mut open_ok = true;
    let mut opens = Vec::new();
    for n in [10usize, 1_000, 100_000] {
        let mut d = ScopedDictionary::new().unwrap();
        for i in 0..n {
            d.insert(&random_key(&mut rng), i as u64).unwrap();
        }
        for nested in 0..3 {
            d.open_environment().unwrap();
            let open = d.last_cost();
            open_ok &= open.allocations == 1 + open.node_copies && open.node_copies <= 1;
            opens.push((open.allocations, open.node_copies));
            for i in 0..100 * (nested + 1) {
                d.insert(&random_key(&mut rng), i as u64).unwrap();
            }
        }
        for _ in 0..3 {
            d.close_environment().unwrap();
            close_steps.push((n, d.last_cost().steps));
        }
    }
    let b = fuzz_batch();
    let fuzz_bad = b.count(&[CheckKind::OpenCost, CheckKind::CloseSteps]);
    let fuzz_steps: Vec<_> = b.reports.iter().filter_map(|r| r.tally.close_steps).collect();
    let constant = close_steps.iter().map(|&(_, s)| s).chain(fuzz_steps.iter().copied()).all(|s| s == close_steps[0].1);
    let detail = format!(
        "close steps by n {close_steps:?}, fuzz close steps {fuzz_steps:?}; open (allocations, copies) {opens:?}; \
         fuzz open/close violations {fuzz_bad}"
    );
    verdict(5, "constant-time environments", constant && open_ok && fuzz_bad == 0, detail);
}

#[test]
fn criterion_6_insert_cost() {
    let b = fuzz_batch();
    let violations = b.count(&[CheckKind::InsertCost]);
    let inserts = b.sum(|r| r.tally.inserts + r.tally.removes);
    let max_copies = b.reports.iter().map(|r| r.tally.max_copies).max().unwrap_or(0);
    let mut detail = format!("{violations} violations over {inserts} inserts and removes, max copies {max_copies}");
    if let Some(first) = b.first(&[CheckKind::InsertCost]) {
        detail += &format!("; first: {first}");
    }
    verdict(6, "insert cost", violations == 0 && inserts > 0, detail);
}

#[test]
fn criterion_7_search_purity() {
    let b = fuzz_batch();
    let violations = b.count(&[CheckKind::Purity]);
    let checks = b.sum(|r| r.tally.purity_checks);
    let full = b.sum(|r| r.tally.purity_full_checks);
    let mut detail = format!("{violations} violations over {checks} searches ({full} with full arena checksum)");
    if let Some(first) = b.first(&[CheckKind::Purity]) {
        detail += &format!("; first: {first}");
    }
    verdict(7, "search purity", violations == 0 && checks > 0, detail);
}
