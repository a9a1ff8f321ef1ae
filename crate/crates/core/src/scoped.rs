//! Dictionary with nested environments.
//!
//! The arena holds a stack of frames linked downward by `pop`. Opening an
//! environment pushes a frame and copies the root node above it; closing one
//! makes the previous frame current again and truncates the arena to where
//! that frame left off. Insert copies any node older than the current frame
//! before writing to it, so nothing below the frame is ever modified and the
//! truncation restores the previous state exactly.
//!
//! Frame layout (little-endian `u64` fields):
//!
//! ```text
//!  0  gate     root node of this frame's trie
//!  8  freeloc  arena top as of the last operation in this frame
//! 16  pop      previous frame, nil for the base frame
//! ```

use std::marker::PhantomData;

use crate::arena::{Arena, Handle};
use crate::bitstr::{divergence, BitString, Divergence};
use crate::error::{Error, Result};
use crate::lexikon::{self, InsertReport, SearchOutcome, SearchStats, StructureError, TrieShape};
use crate::node::{self, read_entry, rkey_bits, BRANCH, LINK};
use crate::value::Value;

const GATE: usize = 0;
const FREELOC: usize = 8;
const POP: usize = 16;
pub const FRAME_SIZE: usize = 24;

/// A decoded frame record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    pub gate: Handle,
    pub freeloc: usize,
    pub pop: Handle,
}

/// Resource use of the most recent mutating operation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCost {
    /// Primitive steps (field reads, assignments, truncations) in
    /// `close_environment`; zero for other operations.
    pub steps: u64,
    pub allocations: u64,
    pub node_copies: u64,
    pub writes: u64,
}

/// Deliberate defects for checking that the differential harness notices
/// broken splices. Never set outside tests.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Decide branch-vs-link splicing by comparing `insertpos.branch` with
    /// `findpos`, which misplaces entries after a childless chain tail.
    BranchPointerTest,
    /// Write through to nodes of older frames instead of copying them.
    SkipCopyOnWrite,
}

#[derive(Debug, Clone)]
pub struct ScopedDictionary<V> {
    arena: Arena,
    top: Handle,
    last_cost: OpCost,
    fault: Option<Fault>,
    _value: PhantomData<V>,
}

impl<V: Value> ScopedDictionary<V> {
    /// A dictionary with just the base frame.
    pub fn new() -> Result<Self> {
        Self::with_arena(Arena::new())
    }

    /// Builds the base frame in `arena`, which should be empty.
    pub fn with_arena(mut arena: Arena) -> Result<Self> {
        let top = arena.create_as(FRAME_SIZE, "frame")?;
        let mut sd = ScopedDictionary { arena, top, last_cost: OpCost::default(), fault: None, _value: PhantomData };
        sd.write_frame(top, Frame { gate: Handle::NIL, freeloc: 0, pop: Handle::NIL });
        sd.sync_freeloc();
        Ok(sd)
    }

    #[doc(hidden)]
    pub fn inject_fault(&mut self, fault: Option<Fault>) {
        self.fault = fault;
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    /// Mutable arena access, for enabling traces or resetting the write
    /// watermark.
    pub fn arena_mut(&mut self) -> &mut Arena {
        &mut self.arena
    }

    /// Handle of the current frame.
    pub fn top(&self) -> Handle {
        self.top
    }

    pub fn frame(&self, h: Handle) -> Frame {
        Frame {
            gate: node::handle_at(&self.arena, h, GATE),
            freeloc: self.arena.read_u64(h, FREELOC) as usize,
            pop: node::handle_at(&self.arena, h, POP),
        }
    }

    pub fn current_frame(&self) -> Frame {
        self.frame(self.top)
    }

    pub fn last_cost(&self) -> OpCost {
        self.last_cost
    }

    /// Number of frames on the stack, the base frame included.
    pub fn depth(&self) -> usize {
        let mut n = 0;
        let mut f = self.top;
        while !f.is_nil() {
            n += 1;
            f = node::handle_at(&self.arena, f, POP);
        }
        n
    }

    fn write_frame(&mut self, h: Handle, frame: Frame) {
        let mut buf = [0u8; FRAME_SIZE];
        buf[GATE..GATE + 8].copy_from_slice(&frame.gate.to_raw().to_le_bytes());
        buf[FREELOC..FREELOC + 8].copy_from_slice(&(frame.freeloc as u64).to_le_bytes());
        buf[POP..POP + 8].copy_from_slice(&frame.pop.to_raw().to_le_bytes());
        self.arena.write(h, 0, &buf);
    }

    fn sync_freeloc(&mut self) {
        let top = self.arena.freeloc() as u64;
        if self.arena.read_u64(self.top, FREELOC) != top {
            self.arena.write_u64(self.top, FREELOC, top);
        }
    }

    fn set_gate(&mut self, gate: Handle) {
        node::set_handle(&mut self.arena, self.top, GATE, gate);
    }

    /// Pushes a new environment. Costs one frame allocation plus one node
    /// copy, whatever the number of entries.
    pub fn open_environment(&mut self) -> Result<()> {
        let before = self.arena.stats();
        let old = self.top;
        let mark = self.arena.mark();
        let old_gate = node::handle_at(&self.arena, old, GATE);
        let frame = self.arena.create_as(FRAME_SIZE, "frame")?;
        let gate = if old_gate.is_nil() {
            Handle::NIL
        } else {
            match node::copy_node::<V>(&mut self.arena, old_gate) {
                Ok(h) => h,
                Err(e) => {
                    self.arena.truncate(mark);
                    return Err(e);
                }
            }
        };
        let freeloc = self.arena.freeloc();
        self.write_frame(frame, Frame { gate, freeloc, pop: old });
        self.top = frame;
        let after = self.arena.stats();
        self.last_cost = OpCost {
            steps: 0,
            allocations: after.allocations - before.allocations,
            node_copies: u64::from(!gate.is_nil()),
            writes: after.writes - before.writes,
        };
        Ok(())
    }

    /// Pops the current environment, restoring the dictionary to its state
    /// at the matching [`ScopedDictionary::open_environment`]. Constant time.
    pub fn close_environment(&mut self) -> Result<()> {
        let mut steps = 0;
        let pop = node::handle_at(&self.arena, self.top, POP);
        steps += 1;
        if pop.is_nil() {
            return Err(Error::Underflow);
        }
        let restored_freeloc = self.arena.read_u64(pop, FREELOC) as usize;
        steps += 1;
        self.top = pop;
        steps += 1;
        self.arena.truncate(restored_freeloc);
        steps += 1;
        self.last_cost = OpCost { steps, ..OpCost::default() };
        Ok(())
    }

    /// Read-only search from the current frame's root. Never allocates.
    pub fn search<'x>(&self, x: &'x BitString) -> SearchOutcome<'x> {
        let gate = node::handle_at(&self.arena, self.top, GATE);
        lexikon::search_trie(&self.arena, gate, x.as_bits())
    }

    pub fn lookup(&self, x: &BitString) -> Option<V> {
        let out = self.search(x);
        if out.found {
            read_entry(&self.arena, out.findpos)
        } else {
            None
        }
    }

    pub fn insert(&mut self, x: &BitString, v: V) -> Result<InsertReport> {
        self.bind(x, Some(v))
    }

    /// Hides `x` by binding it to a tombstone. Closing the environment the
    /// removal happened in brings the old binding back.
    pub fn remove(&mut self, x: &BitString) -> Result<InsertReport> {
        self.bind(x, None)
    }

    fn bind(&mut self, x: &BitString, entry: Option<V>) -> Result<InsertReport> {
        let before = self.arena.stats();
        let result = self.bind_cow(x, entry);
        self.sync_freeloc();
        let after = self.arena.stats();
        let copies = result.as_ref().map_or(0, |r| r.copies as u64);
        self.last_cost = OpCost {
            steps: 0,
            allocations: after.allocations - before.allocations,
            node_copies: copies,
            writes: after.writes - before.writes,
        };
        result
    }

    /// Makes `next` frame-local, redirecting `field` of the (already local)
    /// `holder` to the copy.
    fn localize(&mut self, holder: Handle, field: usize, next: Handle, copies: &mut usize) -> Result<Handle> {
        if next >= self.top || self.fault == Some(Fault::SkipCopyOnWrite) {
            return Ok(next);
        }
        let copy = node::copy_node::<V>(&mut self.arena, next)?;
        node::set_handle(&mut self.arena, holder, field, copy);
        *copies += 1;
        Ok(copy)
    }

    /// Insert with path copying. Walks exactly the nodes a search for `x`
    /// would, copying each older node it must pass through or write to. The
    /// node a failed chain walk stops at is read but never copied, since the
    /// new entry only links to it.
    fn bind_cow(&mut self, x: &BitString, entry: Option<V>) -> Result<InsertReport> {
        let mut stats = SearchStats::default();
        let mut copies = 0;
        let mut x = x.as_bits();

        let mut findpos = node::handle_at(&self.arena, self.top, GATE);
        if findpos.is_nil() {
            let new = node::alloc_node(&mut self.arena, 0, Handle::NIL, x, entry)?;
            self.set_gate(new);
            return Ok(InsertReport { stats, created: true, copies });
        }
        // Only reachable when the frame's gate predates it; open already
        // copies the gate, so in practice this never fires.
        findpos = self.localize(self.top, GATE, findpos, &mut copies)?;
        stats.nodes_visited = 1;

        loop {
            stats.outer_iters += 1;
            let d = match divergence(x, rkey_bits(&self.arena, findpos)) {
                Divergence::Equal => {
                    node::write_entry(&mut self.arena, findpos, entry);
                    return Ok(InsertReport { stats, created: false, copies });
                }
                Divergence::Prefix(d) | Divergence::Mismatch(d) => d,
            };
            stats.d_seq.push(d);

            let parent = findpos;
            let mut insertpos = parent;
            let mut field = BRANCH;
            let mut next = node::handle_at(&self.arena, parent, BRANCH);
            stats.link_steps += 1;
            while !next.is_nil() {
                stats.nodes_visited += 1;
                let nd = node::dist(&self.arena, next);
                if d < nd {
                    break;
                }
                next = self.localize(insertpos, field, next, &mut copies)?;
                if d == nd {
                    break;
                }
                insertpos = next;
                field = LINK;
                next = node::handle_at(&self.arena, next, LINK);
                stats.link_steps += 1;
            }

            if next.is_nil() || d != node::dist(&self.arena, next) {
                let rest = x.suffix(d);
                let new = node::alloc_node(&mut self.arena, d, next, rest, entry)?;
                if self.fault == Some(Fault::BranchPointerTest) {
                    field = if node::handle_at(&self.arena, insertpos, BRANCH) == next { BRANCH } else { LINK };
                }
                node::set_handle(&mut self.arena, insertpos, field, new);
                return Ok(InsertReport { stats, created: true, copies });
            }
            x = x.suffix(d);
            findpos = next;
        }
    }

    /// Live entries visible from the current frame.
    pub fn entries(&self) -> Vec<(BitString, V)> {
        lexikon::entries(&self.arena, self.current_frame().gate)
    }

    /// Validates the current frame's trie plus the frame stack itself:
    /// frames strictly descending along `pop`, each frame's recorded top at
    /// or above its own record.
    pub fn check_structure(&self) -> Result<TrieShape, StructureError> {
        let mut f = self.top;
        while !f.is_nil() {
            let frame = self.frame(f);
            assert!(frame.pop < f, "frame {f:?} pops upward to {:?}", frame.pop);
            assert!(frame.freeloc >= f.offset().unwrap(), "frame {f:?} top below its record");
            f = frame.pop;
        }
        assert_eq!(self.current_frame().freeloc, self.arena.freeloc(), "top frame freeloc out of sync");
        lexikon::check_trie(&self.arena, self.current_frame().gate)
    }

    pub fn dump(&self) -> String {
        self.dump_with(|v| format!("{v:?}"))
    }

    pub fn dump_with(&self, fmt_val: impl Fn(&V) -> String) -> String {
        lexikon::dump_trie(&self.arena, self.current_frame().gate, fmt_val)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexikon::Dictionary;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn sd() -> ScopedDictionary<u64> {
        ScopedDictionary::new().unwrap()
    }

    #[test]
    fn new_has_base_frame() {
        let mut d = sd();
        assert_eq!(d.depth(), 1);
        assert_eq!(d.lookup(&b("0")), None);
        assert_eq!(d.close_environment(), Err(Error::Underflow));
        assert_eq!(d.depth(), 1);
        d.insert(&b("01"), 5).unwrap();
        assert_eq!(d.lookup(&b("01")), Some(5));
    }

    #[test]
    fn depth_counts_frames() {
        let mut d = sd();
        d.open_environment().unwrap();
        assert_eq!(d.depth(), 2);
        d.open_environment().unwrap();
        d.close_environment().unwrap();
        assert_eq!(d.depth(), 2);
    }

    #[test]
    fn open_on_empty_keeps_nil_gate() {
        let mut d = sd();
        d.open_environment().unwrap();
        assert!(d.current_frame().gate.is_nil());
        assert_eq!(d.last_cost().allocations, 1);
        assert_eq!(d.last_cost().node_copies, 0);
        d.insert(&b("1"), 1).unwrap();
        d.close_environment().unwrap();
        assert_eq!(d.lookup(&b("1")), None);
    }

    #[test]
    fn open_sees_old_entries() {
        let mut d = sd();
        d.insert(&b("0110"), 9).unwrap();
        d.open_environment().unwrap();
        assert_eq!(d.lookup(&b("0110")), Some(9));
        assert_eq!(d.last_cost().allocations, 2);
        assert_eq!(d.last_cost().node_copies, 1);
    }

    #[test]
    fn close_undoes_inserts_and_shadowing() {
        let mut d = sd();
        d.insert(&b("0"), 1).unwrap();
        d.open_environment().unwrap();
        d.insert(&b("11"), 2).unwrap();
        d.insert(&b("0"), 10).unwrap();
        assert_eq!(d.lookup(&b("0")), Some(10));
        d.close_environment().unwrap();
        assert_eq!(d.lookup(&b("11")), None);
        assert_eq!(d.lookup(&b("0")), Some(1));
    }

    #[test]
    fn close_restores_arena_bytes() {
        let mut d = sd();
        for (i, k) in ["0", "00", "1", "0101", "111"].iter().enumerate() {
            d.insert(&b(k), i as u64).unwrap();
        }
        let mark = d.arena().mark();
        let sum = d.arena().checksum_below(mark);
        d.open_environment().unwrap();
        for k in ["00", "1", "10", "0100", "0101", ""] {
            d.insert(&b(k), 99).unwrap();
        }
        d.remove(&b("111")).unwrap();
        d.close_environment().unwrap();
        assert_eq!(d.arena().freeloc(), mark);
        assert_eq!(d.arena().checksum_below(mark), sum);
    }

    // {"0","00","1"}; open; insert "00": the gate was copied by open, the
    // walk passes the dist-0 sibling and descends into the dist-1 node, so
    // exactly those two are copied; nothing below the frame is written.
    #[test]
    fn overwrite_copies_only_the_path() {
        let mut d = sd();
        d.insert(&b("0"), 1).unwrap();
        d.insert(&b("00"), 2).unwrap();
        d.insert(&b("1"), 3).unwrap();
        d.open_environment().unwrap();
        let top = d.top().offset().unwrap();
        d.arena_mut().reset_write_watermark();
        let rep = d.insert(&b("00"), 20).unwrap();
        assert_eq!(rep.copies, 2);
        assert!(rep.copies <= rep.stats.nodes_visited);
        assert!(rep.stats.nodes_visited <= rep.stats.link_steps + rep.stats.outer_iters);
        assert!(d.arena().lowest_write().unwrap() >= top);
        assert_eq!(d.lookup(&b("00")), Some(20));
        assert_eq!(d.lookup(&b("1")), Some(3));
        d.close_environment().unwrap();
        assert_eq!(d.lookup(&b("00")), Some(2));
    }

    #[test]
    fn base_frame_insert_matches_core() {
        let keys = ["0", "00", "1", "0110", "", "01", "111000", "1110001"];
        let mut core = Dictionary::new();
        let mut scoped = sd();
        for (i, k) in keys.iter().enumerate() {
            let a = core.insert(&b(k), i as u64).unwrap();
            let s = scoped.insert(&b(k), i as u64).unwrap();
            assert_eq!(a.stats, s.stats, "{k}");
            assert_eq!(s.copies, 0);
        }
        assert_eq!(core.dump(), scoped.dump());
    }

    #[test]
    fn search_after_open_matches_before() {
        let mut d = sd();
        for (i, k) in ["0", "00", "1", "0110", "01"].iter().enumerate() {
            d.insert(&b(k), i as u64).unwrap();
        }
        let probes = ["0", "00", "1", "0110", "01", "10", "0111"];
        let before: Vec<_> = probes.iter().map(|k| (d.lookup(&b(k)), d.search(&b(k)).stats)).collect();
        d.open_environment().unwrap();
        let after: Vec<_> = probes.iter().map(|k| (d.lookup(&b(k)), d.search(&b(k)).stats)).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn deep_nesting_sees_through() {
        let mut d = sd();
        d.insert(&b("101"), 1).unwrap();
        for _ in 0..4 {
            d.open_environment().unwrap();
        }
        assert_eq!(d.depth(), 5);
        assert_eq!(d.lookup(&b("101")), Some(1));
    }

    #[test]
    fn remove_is_a_tombstone() {
        let mut d = sd();
        d.insert(&b("10"), 1).unwrap();
        d.remove(&b("10")).unwrap();
        assert_eq!(d.lookup(&b("10")), None);
        d.remove(&b("0")).unwrap();
        assert_eq!(d.lookup(&b("0")), None);
        d.insert(&b("10"), 2).unwrap();
        d.open_environment().unwrap();
        d.remove(&b("10")).unwrap();
        assert_eq!(d.lookup(&b("10")), None);
        d.close_environment().unwrap();
        assert_eq!(d.lookup(&b("10")), Some(2));
    }

    #[test]
    fn close_cost_is_constant() {
        let mut d = sd();
        d.open_environment().unwrap();
        d.close_environment().unwrap();
        let small = d.last_cost();
        for i in 0..500u64 {
            d.insert(&BitString::from_bits((0..16).map(|j| (i >> j) & 1 == 1)), i).unwrap();
        }
        d.open_environment().unwrap();
        for i in 0..500u64 {
            d.insert(&BitString::from_bits((0..20).map(|j| ((i * 7) >> j) & 1 == 1)), i).unwrap();
        }
        d.close_environment().unwrap();
        assert_eq!(d.last_cost(), small);
        assert_eq!(small.steps, 4);
    }

    #[test]
    fn exhausted_open_leaves_state() {
        let mut d: ScopedDictionary<u64> = ScopedDictionary::with_arena(Arena::with_limit(100)).unwrap();
        d.insert(&b("1"), 1).unwrap();
        let freeloc = d.arena().freeloc();
        assert!(d.open_environment().is_err());
        assert_eq!(d.arena().freeloc(), freeloc);
        assert_eq!(d.depth(), 1);
        assert_eq!(d.lookup(&b("1")), Some(1));
    }

    #[test]
    fn branch_pointer_test_fault_loses_keys() {
        let mut d = sd();
        d.inject_fault(Some(Fault::BranchPointerTest));
        d.insert(&b("000000"), 1).unwrap();
        d.insert(&b("001"), 2).unwrap();
        d.insert(&b("000001"), 3).unwrap();
        assert_eq!(d.lookup(&b("000001")), None);
    }
}
