//! Randomized differential testing of [`ScopedDictionary`] against
//! [`OracleDict`].
//!
//! A seeded generator produces an operation sequence; the harness applies
//! each operation to both sides in lockstep and checks, after every step:
//!
//! * lookups agree with the oracle (every search, plus every key touched in
//!   an environment and a random sample when it closes, plus a full
//!   two-way comparison every `check_every` operations);
//! * search and insert step counts stay within the linear-time bounds;
//! * no operation writes below the current frame;
//! * closing an environment restores the arena below the open mark byte
//!   for byte, with a constant number of steps;
//! * opening costs one frame allocation and at most one node copy;
//! * searches neither allocate nor write.
//!
//! Failed checks are counted per [`CheckKind`] and the run continues. The
//! prefix up to the first failure of the most severe kind is then shrunk by
//! deleting chunks while that kind keeps failing, and printed as a script.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;
use std::panic::{self, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitstr::BitString;
use crate::error::Error;
use crate::lexikon::{max_outer_iters, BoundViolation};
use crate::oracle::OracleDict;
use crate::scoped::{Fault, ScopedDictionary};

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub seed: u64,
    pub ops: usize,
    pub max_depth: usize,
    pub key_bits: RangeInclusive<usize>,
    /// Interval between full two-way comparisons and structure checks.
    pub check_every: usize,
    /// Interval between whole-arena checksums around a search.
    pub purity_every: usize,
    pub fault: Option<Fault>,
    pub minimize: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            seed: 1,
            ops: 100_000,
            max_depth: 32,
            key_bits: 0..=512,
            check_every: 5_000,
            purity_every: 64,
            fault: None,
            minimize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    Insert(BitString, u64),
    Search(BitString),
    Remove(BitString),
    Open,
    Close,
}

impl fmt::Display for Op {
    /// Script syntax, so a printed trace can be replayed with `lifo-dict run`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let key = |k: &BitString| if k.is_empty() { "b:".to_string() } else { format!("b:{k}") };
        match self {
            Op::Insert(k, v) => write!(f, "insert {} {v}", key(k)),
            Op::Search(k) => write!(f, "search {}", key(k)),
            Op::Remove(k) => write!(f, "remove {}", key(k)),
            Op::Open => f.write_str("open"),
            Op::Close => f.write_str("close"),
        }
    }
}

const POOL_CAP: usize = 4096;

struct KeyGen {
    rng: ChaCha8Rng,
    pool: Vec<BitString>,
    min: usize,
    max: usize,
}

impl KeyGen {
    fn random_bits(&mut self, len: usize) -> BitString {
        BitString::from_bits((0..len).map(|_| self.rng.gen::<bool>()))
    }

    fn fresh(&mut self) -> BitString {
        let len = self.rng.gen_range(self.min..=self.max);
        self.random_bits(len)
    }

    fn remember(&mut self, k: &BitString) {
        if self.pool.len() < POOL_CAP {
            self.pool.push(k.clone());
        } else {
            let i = self.rng.gen_range(0..POOL_CAP);
            self.pool[i] = k.clone();
        }
    }

    fn pooled(&mut self) -> Option<BitString> {
        (!self.pool.is_empty()).then(|| self.pool[self.rng.gen_range(0..self.pool.len())].clone())
    }

    fn key(&mut self) -> BitString {
        match self.rng.gen_range(0..100) {
            0..=44 => self.pooled().unwrap_or_else(|| self.fresh()),
            45..=59 => match self.pooled() {
                Some(k) => {
                    let cut = self.rng.gen_range(self.min.min(k.len())..=k.len());
                    k.prefix(cut)
                }
                None => self.fresh(),
            },
            _ => self.fresh(),
        }
    }

    /// Keys `u`, `u·0·v`, `u·1·w` for some pooled or fresh `u`.
    fn prefix_triple(&mut self) -> Option<[BitString; 3]> {
        if self.max == 0 {
            return None;
        }
        let base = self.pooled().unwrap_or_else(|| self.fresh());
        let u_len = self.rng.gen_range(0..=base.len().min(self.max - 1));
        let u = base.prefix(u_len);
        let room = self.max - u_len - 1;
        let extend = |g: &mut KeyGen, bit: bool| {
            let floor = g.min.saturating_sub(u_len + 1).min(room);
            let n = g.rng.gen_range(floor..=room.min(floor + 64));
            let mut k = u.clone();
            k.push(bit);
            k.extend_from_bits(g.random_bits(n).as_bits());
            k
        };
        let a = extend(self, false);
        let b = extend(self, true);
        (u.len() >= self.min).then_some([u, a, b])
    }
}

/// The operation sequence for `config`; identical for identical configs.
pub fn generate(config: &FuzzConfig) -> Vec<Op> {
    let mut g = KeyGen {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        pool: Vec::new(),
        min: *config.key_bits.start(),
        max: *config.key_bits.end(),
    };
    let mut ops = Vec::with_capacity(config.ops);
    let mut pending = VecDeque::new();
    let mut depth = 1usize;
    let mut next_value = 0u64;
    while ops.len() < config.ops {
        if let Some(op) = pending.pop_front() {
            ops.push(op);
            continue;
        }
        let op = match g.rng.gen_range(0..100) {
            0..=24 => {
                let k = g.key();
                g.remember(&k);
                Op::Insert(k, next_value)
            }
            25..=29 => match g.prefix_triple() {
                Some(keys) => {
                    for k in &keys {
                        g.remember(k);
                    }
                    let [u, a, b] = keys;
                    pending.push_back(Op::Insert(a, next_value + 1));
                    pending.push_back(Op::Insert(b, next_value + 2));
                    next_value += 2;
                    Op::Insert(u, next_value - 2)
                }
                None => Op::Search(g.key()),
            },
            30..=64 => Op::Search(g.key()),
            65..=69 => Op::Remove(g.key()),
            70..=84 if depth < config.max_depth => Op::Open,
            _ => Op::Close,
        };
        next_value += 1;
        match op {
            Op::Open => depth += 1,
            Op::Close => depth = depth.saturating_sub(1).max(1),
            _ => {}
        }
        ops.push(op);
    }
    ops
}

/// What a violated check was about. Declared from most to least severe;
/// the most severe violated kind is the one a report minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckKind {
    /// An operation panicked; the run stops there.
    Panic,
    /// A lookup, close result or entry set disagreed with the oracle.
    Oracle,
    /// The trie failed its structural self-check.
    Structure,
    /// Closing did not restore the arena below the open mark.
    LifoRestore,
    /// An operation wrote below the current frame.
    FrameWrites,
    /// A search allocated or wrote.
    Purity,
    /// Opening cost more than one frame and one node copy.
    OpenCost,
    /// Closes took differing numbers of steps.
    CloseSteps,
    /// An insert copied more nodes than it visited, or left its step budget.
    InsertCost,
    /// A search's distance sum exceeded the key length.
    DistanceBudget,
    /// A search's chain steps exceeded `s + r`.
    ChainSteps,
    /// A search produced more than two consecutive zero distances.
    ZeroRun,
    /// A search compared more than `2s + 3` nodes.
    OuterItersTight,
    /// A search compared more than `2(s + 1)` nodes.
    OuterIters,
}

impl CheckKind {
    pub const ALL: [CheckKind; 14] = [
        CheckKind::Panic,
        CheckKind::Oracle,
        CheckKind::Structure,
        CheckKind::LifoRestore,
        CheckKind::FrameWrites,
        CheckKind::Purity,
        CheckKind::OpenCost,
        CheckKind::CloseSteps,
        CheckKind::InsertCost,
        CheckKind::DistanceBudget,
        CheckKind::ChainSteps,
        CheckKind::ZeroRun,
        CheckKind::OuterItersTight,
        CheckKind::OuterIters,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Panic => "panic",
            CheckKind::Oracle => "oracle",
            CheckKind::Structure => "structure",
            CheckKind::LifoRestore => "lifo_restore",
            CheckKind::FrameWrites => "frame_writes",
            CheckKind::Purity => "purity",
            CheckKind::OpenCost => "open_cost",
            CheckKind::CloseSteps => "close_steps",
            CheckKind::InsertCost => "insert_cost",
            CheckKind::DistanceBudget => "distance_budget",
            CheckKind::ChainSteps => "chain_steps",
            CheckKind::ZeroRun => "zero_run",
            CheckKind::OuterItersTight => "outer_iters_2s+3",
            CheckKind::OuterIters => "outer_iters_2(s+1)",
        }
    }

    fn of_bound(v: &BoundViolation) -> CheckKind {
        match v {
            BoundViolation::OuterIters { .. } => CheckKind::OuterIters,
            BoundViolation::DistanceBudget { .. } => CheckKind::DistanceBudget,
            BoundViolation::ChainSteps { .. } => CheckKind::ChainSteps,
            BoundViolation::ZeroRun { .. } => CheckKind::ZeroRun,
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    /// Index of the failing operation.
    pub step: usize,
    pub op: Op,
    pub kind: CheckKind,
    pub message: String,
}

/// How often one kind of check failed, and its first failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub count: u64,
    pub first: Failure,
}

/// Counters gathered over a run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub inserts: u64,
    pub searches: u64,
    pub removes: u64,
    pub opens: u64,
    pub closes: u64,
    pub underflows: u64,
    pub bound_checks: u64,
    pub frame_write_checks: u64,
    pub purity_checks: u64,
    pub purity_full_checks: u64,
    pub lifo_checks: u64,
    pub lifo_lookups: u64,
    pub full_checks: u64,
    pub max_depth: usize,
    pub max_key_bits: usize,
    pub max_outer_iters: usize,
    /// Largest `r - 2(s + 1)` over all searches; zero if none exceeded it.
    pub max_outer_excess: usize,
    /// Searches with `outer_iters > 2s`.
    pub outer_over_2s: u64,
    pub max_zero_run: usize,
    pub max_copies: usize,
    pub close_steps: Option<u64>,
}

struct OpenRecord {
    mark: usize,
    checksum: u64,
    touched: Vec<BitString>,
}

struct Harness {
    sut: ScopedDictionary<u64>,
    oracle: OracleDict<u64>,
    frames: Vec<OpenRecord>,
    rng: ChaCha8Rng,
    pool: Vec<BitString>,
    tally: Tally,
    violations: BTreeMap<CheckKind, Violation>,
    check_every: usize,
    purity_every: usize,
    /// Stop as soon as this kind is violated.
    stop_on: Option<CheckKind>,
    step: usize,
    op: Option<Op>,
}

impl Harness {
    fn new(config: &FuzzConfig, strict: bool, stop_on: Option<CheckKind>) -> Self {
        let mut sut = ScopedDictionary::new().expect("base frame");
        sut.inject_fault(config.fault);
        Harness {
            sut,
            oracle: OracleDict::new(),
            frames: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_cafe),
            pool: Vec::new(),
            tally: Tally::default(),
            violations: BTreeMap::new(),
            check_every: if strict { 1 } else { config.check_every.max(1) },
            purity_every: if strict { 1 } else { config.purity_every.max(1) },
            stop_on,
            step: 0,
            op: None,
        }
    }

    fn flag(&mut self, kind: CheckKind, message: String) {
        let first = Failure { step: self.step, op: self.op.clone().expect("inside a step"), kind, message };
        self.violations.entry(kind).and_modify(|v| v.count += 1).or_insert(Violation { count: 1, first });
    }

    fn ensure(&mut self, kind: CheckKind, cond: bool, msg: impl FnOnce() -> String) -> bool {
        if !cond {
            self.flag(kind, msg());
        }
        cond
    }

    fn top_offset(&self) -> usize {
        self.sut.top().offset().unwrap()
    }

    fn check_lookup(&mut self, kind: CheckKind, k: &BitString) {
        let got = self.sut.lookup(k);
        let want = self.oracle.lookup(k);
        self.ensure(kind, got == want, || format!("lookup {k}: trie {got:?}, oracle {want:?}"));
    }

    fn check_frame_writes(&mut self) {
        self.tally.frame_write_checks += 1;
        let top = self.top_offset();
        if let Some(w) = self.sut.arena().lowest_write().filter(|&w| w < top) {
            self.flag(CheckKind::FrameWrites, format!("write at offset {w} below current frame at {top}"));
        }
    }

    fn bind(&mut self, k: &BitString, v: Option<u64>) {
        self.sut.arena_mut().reset_write_watermark();
        let rep = match v {
            Some(v) => self.sut.insert(k, v),
            None => self.sut.remove(k),
        };
        let rep = match rep {
            Ok(rep) => rep,
            Err(e) => return self.flag(CheckKind::Oracle, format!("insert failed: {e}")),
        };
        match v {
            Some(v) => self.oracle.insert(k.clone(), v),
            None => self.oracle.remove(k),
        }
        self.check_frame_writes();
        self.tally.bound_checks += 1;
        let s = k.len();
        let st = &rep.stats;
        let mut problems: Vec<String> = st
            .bound_violations(s)
            .into_iter()
            .filter(|b| !matches!(b, BoundViolation::OuterIters { .. }))
            .map(|b| b.to_string())
            .collect();
        if st.outer_iters > max_outer_iters(s) {
            problems.push(format!("outer iterations {} exceed 2s+3 for s = {s}", st.outer_iters));
        }
        let visited = st.nodes_visited;
        if rep.copies > visited || visited > st.link_steps + st.outer_iters {
            problems.push(format!("copied {} of {visited} visited nodes ({st})", rep.copies));
        }
        if let Some(p) = problems.into_iter().next() {
            self.flag(CheckKind::InsertCost, format!("insert {k}: {p}"));
        }
        self.tally.max_copies = self.tally.max_copies.max(rep.copies);
        if let Some(f) = self.frames.last_mut() {
            f.touched.push(k.clone());
        }
        self.pool.push(k.clone());
        self.check_lookup(CheckKind::Oracle, k);
    }

    fn search(&mut self, k: &BitString) {
        let arena = self.sut.arena();
        let (freeloc, stats) = (arena.freeloc(), arena.stats());
        let full = self.tally.searches.is_multiple_of(self.purity_every as u64);
        let sum = full.then(|| arena.checksum_below(freeloc));
        let out = self.sut.search(k);
        let got = self.sut.lookup(k);
        let arena = self.sut.arena();
        let untouched = arena.freeloc() == freeloc && arena.stats() == stats;
        let same_bytes = sum.is_none_or(|sum| arena.checksum_below(freeloc) == sum);
        self.tally.purity_checks += 1;
        self.tally.purity_full_checks += u64::from(full);
        self.ensure(CheckKind::Purity, untouched, || format!("search of {k} mutated the arena"));
        self.ensure(CheckKind::Purity, same_bytes, || format!("search of {k} changed arena bytes"));
        let want = self.oracle.lookup(k);
        self.ensure(CheckKind::Oracle, got == want, || format!("search {k}: trie {got:?}, oracle {want:?}"));

        self.tally.bound_checks += 1;
        let s = k.len();
        for b in out.stats.bound_violations(s) {
            self.flag(CheckKind::of_bound(&b), format!("search {k}: {b} ({})", out.stats));
        }
        let r = out.stats.outer_iters;
        self.ensure(CheckKind::OuterItersTight, r <= max_outer_iters(s), || {
            format!("search {k}: outer iterations {r} exceed 2s+3 for s = {s}")
        });
        let t = &mut self.tally;
        t.max_outer_iters = t.max_outer_iters.max(r);
        t.max_outer_excess = t.max_outer_excess.max(r.saturating_sub(2 * (s + 1)));
        t.outer_over_2s += u64::from(r > 2 * s);
        t.max_zero_run = t.max_zero_run.max(out.stats.max_zero_run());
    }

    fn open(&mut self) {
        let mark = self.sut.arena().mark();
        let checksum = self.sut.arena().checksum_below(mark);
        self.sut.arena_mut().reset_write_watermark();
        if let Err(e) = self.sut.open_environment() {
            return self.flag(CheckKind::Oracle, format!("open failed: {e}"));
        }
        self.oracle.open();
        let cost = self.sut.last_cost();
        self.ensure(CheckKind::OpenCost, cost.node_copies <= 1 && cost.allocations == 1 + cost.node_copies, || {
            format!("open cost {cost:?}: expected one frame plus at most one node")
        });
        self.check_frame_writes();
        self.frames.push(OpenRecord { mark, checksum, touched: Vec::new() });
        self.tally.max_depth = self.tally.max_depth.max(self.sut.depth());
    }

    fn close(&mut self) {
        let got = self.sut.close_environment();
        let want = self.oracle.close();
        if !self.ensure(CheckKind::Oracle, got == want, || format!("close: trie {got:?}, oracle {want:?}")) {
            return;
        }
        if got == Err(Error::Underflow) {
            self.tally.underflows += 1;
            return;
        }
        let steps = self.sut.last_cost().steps;
        let expected = *self.tally.close_steps.get_or_insert(steps);
        self.ensure(CheckKind::CloseSteps, steps == expected, || {
            format!("close took {steps} steps, earlier closes took {expected}")
        });
        let rec = self.frames.pop().expect("oracle and harness depth agree");
        self.tally.lifo_checks += 1;
        let freeloc = self.sut.arena().freeloc();
        self.ensure(CheckKind::LifoRestore, freeloc == rec.mark, || {
            format!("close left freeloc {freeloc} not {}", rec.mark)
        });
        let restored = self.sut.arena().checksum_below(rec.mark) == rec.checksum;
        self.ensure(CheckKind::LifoRestore, restored, || {
            format!("arena bytes below {} changed inside the environment", rec.mark)
        });
        for k in &rec.touched {
            self.tally.lifo_lookups += 1;
            self.check_lookup(CheckKind::LifoRestore, k);
        }
        for _ in 0..8.min(self.pool.len()) {
            let k = self.pool[self.rng.gen_range(0..self.pool.len())].clone();
            self.tally.lifo_lookups += 1;
            self.check_lookup(CheckKind::LifoRestore, &k);
        }
    }

    fn full_check(&mut self) {
        self.tally.full_checks += 1;
        if let Err(e) = self.sut.check_structure() {
            self.flag(CheckKind::Structure, format!("structure: {e}"));
        }
        let mut got = self.sut.entries();
        got.sort();
        let want: Vec<_> = self.oracle.bindings().iter().map(|(k, v)| (k.clone(), *v)).collect();
        if got != want {
            let missing = want.iter().find(|e| !got.contains(e));
            let extra = got.iter().find(|e| !want.contains(e));
            self.flag(CheckKind::Oracle, format!("entry sets differ: missing {missing:?}, unexpected {extra:?}"));
        }
    }

    fn apply(&mut self, op: &Op) {
        match op {
            Op::Insert(k, v) => {
                self.tally.inserts += 1;
                self.bind(k, Some(*v))
            }
            Op::Remove(k) => {
                self.tally.removes += 1;
                self.bind(k, None)
            }
            Op::Search(k) => {
                self.tally.searches += 1;
                self.search(k)
            }
            Op::Open => {
                self.tally.opens += 1;
                self.open()
            }
            Op::Close => {
                self.tally.closes += 1;
                self.close()
            }
        }
        if let Op::Insert(k, _) | Op::Search(k) | Op::Remove(k) = op {
            self.tally.max_key_bits = self.tally.max_key_bits.max(k.len());
        }
    }

    fn stopped(&self) -> bool {
        self.stop_on.is_some_and(|k| self.violations.contains_key(&k))
    }

    fn run(&mut self, ops: &[Op]) {
        for (i, op) in ops.iter().enumerate() {
            self.step = i;
            self.op = Some(op.clone());
            if let Err(payload) = panic::catch_unwind(AssertUnwindSafe(|| self.apply(op))) {
                let msg = payload
                    .downcast_ref::<String>()
                    .map(String::as_str)
                    .or_else(|| payload.downcast_ref::<&str>().copied())
                    .unwrap_or("non-string payload");
                self.flag(CheckKind::Panic, format!("panicked: {msg}"));
                return;
            }
            if (i + 1) % self.check_every == 0 || i + 1 == ops.len() {
                self.full_check();
            }
            if self.stopped() {
                return;
            }
        }
    }
}

/// Applies `ops` to a fresh trie and oracle with all checks enabled.
pub fn replay(ops: &[Op], config: &FuzzConfig) -> (Tally, BTreeMap<CheckKind, Violation>) {
    let mut h = Harness::new(config, false, None);
    h.run(ops);
    (h.tally, h.violations)
}

const SHRINK_BUDGET: usize = 4_000;
const STRICT_LIMIT: usize = 2_000;

/// Deletes chunks of `ops` while a violation of `kind` persists.
pub fn minimize(ops: &[Op], kind: CheckKind, config: &FuzzConfig) -> Vec<Op> {
    let fails = |cand: &[Op]| -> Option<usize> {
        let mut h = Harness::new(config, cand.len() <= STRICT_LIMIT, Some(kind));
        h.run(cand);
        h.violations.get(&kind).map(|v| v.first.step)
    };
    let Some(step) = fails(ops) else {
        return ops.to_vec();
    };
    let mut cur = ops[..=step].to_vec();
    let mut parts = 2usize;
    let mut budget = SHRINK_BUDGET;
    while cur.len() >= 2 && budget > 0 {
        let chunk = cur.len().div_ceil(parts);
        let mut reduced = false;
        for start in (0..cur.len()).step_by(chunk) {
            budget = budget.saturating_sub(1);
            let mut cand = cur[..start].to_vec();
            cand.extend_from_slice(&cur[(start + chunk).min(cur.len())..]);
            if let Some(step) = fails(&cand) {
                cand.truncate(step + 1);
                cur = cand;
                parts = (parts - 1).max(2);
                reduced = true;
                break;
            }
            if budget == 0 {
                break;
            }
        }
        if !reduced {
            if parts >= cur.len() {
                break;
            }
            parts = (parts * 2).min(cur.len());
        }
    }
    cur
}

#[derive(Debug, Clone)]
pub struct FuzzReport {
    pub config: FuzzConfig,
    pub tally: Tally,
    pub violations: BTreeMap<CheckKind, Violation>,
    /// Shrunk trace for the most severe violated kind.
    pub minimized: Option<(CheckKind, Vec<Op>)>,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Total number of failed checks.
    pub fn violation_count(&self) -> u64 {
        self.violations.values().map(|v| v.count).sum()
    }

    pub fn count(&self, kind: CheckKind) -> u64 {
        self.violations.get(&kind).map_or(0, |v| v.count)
    }

    /// The most severe violation, if any.
    pub fn failure(&self) -> Option<&Failure> {
        self.violations.values().next().map(|v| &v.first)
    }
}

pub fn run(config: &FuzzConfig) -> FuzzReport {
    let ops = generate(config);
    let (tally, violations) = replay(&ops, config);
    let minimized = match violations.iter().next() {
        Some((&kind, v)) if config.minimize => {
            // Shrinking a crash replays it many times; keep stderr quiet.
            let hook = (kind == CheckKind::Panic).then(|| {
                let prev = panic::take_hook();
                panic::set_hook(Box::new(|_| {}));
                prev
            });
            let min = minimize(&ops[..=v.first.step], kind, config);
            if let Some(prev) = hook {
                panic::set_hook(prev);
            }
            Some((kind, min))
        }
        _ => None,
    };
    FuzzReport { config: config.clone(), tally, violations, minimized }
}

impl fmt::Display for FuzzReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config;
        let t = &self.tally;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "fuzz seed={} ops={} max_depth={} key_bits={}..={}",
            c.seed,
            c.ops,
            c.max_depth,
            c.key_bits.start(),
            c.key_bits.end()
        );
        let _ = writeln!(
            s,
            "ops:      insert={} search={} remove={} open={} close={} underflow={}",
            t.inserts, t.searches, t.removes, t.opens, t.closes, t.underflows
        );
        let _ = writeln!(
            s,
            "checks:   bounds={} frame_writes={} purity={} (full {}) lifo={} (lookups {}) full={}",
            t.bound_checks,
            t.frame_write_checks,
            t.purity_checks,
            t.purity_full_checks,
            t.lifo_checks,
            t.lifo_lookups,
            t.full_checks
        );
        let close_steps = t.close_steps.map_or("-".to_string(), |n| n.to_string());
        let _ = writeln!(
            s,
            "measured: max_depth={} max_key_bits={} max_outer_iters={} outer>2s={} outer-2(s+1)<={} \
             max_zero_run={} max_copies={} close_steps={}",
            t.max_depth,
            t.max_key_bits,
            t.max_outer_iters,
            t.outer_over_2s,
            t.max_outer_excess,
            t.max_zero_run,
            t.max_copies,
            close_steps
        );
        if self.passed() {
            let _ = writeln!(s, "PASS, 0 violations");
            return f.write_str(&s);
        }
        let _ = writeln!(s, "FAIL, {} violations", self.violation_count());
        for (kind, v) in &self.violations {
            let _ = writeln!(
                s,
                "  {kind}: {} (first at step {}, `{}`: {})",
                v.count, v.first.step, v.first.op, v.first.message
            );
        }
        let _ = writeln!(s, "reproduce with --seed {}", c.seed);
        if let Some((kind, min)) = &self.minimized {
            let _ = writeln!(s, "minimized {kind} trace ({} ops):", min.len());
            for op in min {
                let _ = writeln!(s, "  {op}");
            }
        }
        f.write_str(&s)
    }
}
