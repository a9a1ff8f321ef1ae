//! The plain bit-trie dictionary: search and insert without environments.
//!
//! Every entry but the first hangs off exactly one branching point. A node
//! stores only the part of its key after that point (`rkey`), the index of
//! the point inside its parent's `rkey` (`dist`), its first child (`branch`)
//! and its next sibling on the same parent (`link`). Siblings are kept in
//! strictly increasing `dist` order, which is what bounds the chain walk.
//!
//! Both search and insert run in time linear in the key length, independent
//! of the number of entries. [`SearchStats`] records the quantities that
//! bound argument is phrased in, so callers can check it on real runs.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::marker::PhantomData;
use std::rc::Rc;

use thiserror::Error;

use crate::arena::{Arena, Handle};
use crate::bitstr::{divergence, BitString, Bits, Divergence};
use crate::error::Result;
use crate::node::{self, read_entry, rkey_bits, Node, BRANCH, LINK};
use crate::value::Value;

/// Step counts collected by one search or insert traversal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Number of nodes whose key suffix was compared against the query.
    pub outer_iters: usize,
    /// Chain moves: the step onto `branch` plus every step along `link`,
    /// counted once per non-final comparison.
    pub link_steps: usize,
    /// Divergence index of each comparison that did not end in equality.
    pub d_seq: Vec<usize>,
    /// Distinct nodes read during the traversal.
    pub nodes_visited: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundViolation {
    #[error("outer iterations {r} exceed 2(s+1) for s = {s}")]
    OuterIters { r: usize, s: usize },
    #[error("distance sum {sum} exceeds key length {s}")]
    DistanceBudget { sum: usize, s: usize },
    #[error("chain steps {steps} exceed s + r = {s} + {r}")]
    ChainSteps { steps: usize, s: usize, r: usize },
    #[error("{run} consecutive zero distances")]
    ZeroRun { run: usize },
}

impl SearchStats {
    pub fn d_sum(&self) -> usize {
        self.d_seq.iter().sum()
    }

    /// Longest run of consecutive zeros in `d_seq`.
    pub fn max_zero_run(&self) -> usize {
        let mut best = 0;
        let mut run = 0;
        for &d in &self.d_seq {
            run = if d == 0 { run + 1 } else { 0 };
            best = best.max(run);
        }
        best
    }

    /// Checks the linear-time bounds for a query of `s` bits; the first
    /// violated one is returned.
    pub fn check_bounds(&self, s: usize) -> Result<(), BoundViolation> {
        match self.bound_violations(s).into_iter().next() {
            Some(v) => Err(v),
            None => Ok(()),
        }
    }

    /// Every violated bound for a query of `s` bits, in declaration order.
    pub fn bound_violations(&self, s: usize) -> Vec<BoundViolation> {
        let mut out = Vec::new();
        let r = self.outer_iters;
        if r > 2 * (s + 1) {
            out.push(BoundViolation::OuterIters { r, s });
        }
        let sum = self.d_sum();
        if sum > s {
            out.push(BoundViolation::DistanceBudget { sum, s });
        }
        if self.link_steps > s + r {
            out.push(BoundViolation::ChainSteps { steps: self.link_steps, s, r });
        }
        let run = self.max_zero_run();
        if run > 2 {
            out.push(BoundViolation::ZeroRun { run });
        }
        out
    }
}

/// Largest number of comparisons a traversal for an `s`-bit key can make.
///
/// The distance sequence opens with at most two zeros and every later
/// nonzero distance is followed by at most one zero, so it has at most
/// `2s + 2` entries; a successful search adds the final equal comparison.
/// This is one more than `2(s + 1)`, which [`SearchStats::check_bounds`]
/// enforces; keys `1`, `0111`, `ε` inserted in that order make a search for
/// `ε` compare three nodes.
pub const fn max_outer_iters(s: usize) -> usize {
    2 * s + 3
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "outer_iters={} link_steps={} nodes_visited={} d_seq={:?}",
            self.outer_iters, self.link_steps, self.nodes_visited, self.d_seq
        )
    }
}

/// Which field a new node is hooked into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpliceSlot {
    /// The dictionary's root.
    Gate,
    /// `branch` of the given node: the new node becomes its first child.
    Branch(Handle),
    /// `link` of the given node: the new node becomes its next sibling.
    Link(Handle),
}

/// Result of a search, carrying what an insert needs to splice in a new
/// node when the key is absent.
#[derive(Debug, Clone)]
pub struct SearchOutcome<'x> {
    pub found: bool,
    /// The matching node when found; otherwise the chain node the new entry
    /// must precede (nil at the end of a chain).
    pub findpos: Handle,
    /// The node whose field would point at a new entry. Nil iff the
    /// dictionary is empty (for not-found outcomes).
    pub insertpos: Handle,
    /// Divergence index of the last comparison; 0 for an empty dictionary.
    pub d: usize,
    /// The part of the query still unmatched at the last compared node.
    pub remainder: Bits<'x>,
    pub slot: SpliceSlot,
    pub stats: SearchStats,
}

/// What an insert did.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InsertReport {
    pub stats: SearchStats,
    /// A node was added (as opposed to overwriting an existing entry).
    pub created: bool,
    /// Nodes copied out of older environments.
    pub copies: usize,
}

/// Read-only trie search starting at `gate`.
pub(crate) fn search_trie<'x>(arena: &Arena, gate: Handle, x: Bits<'x>) -> SearchOutcome<'x> {
    let mut stats = SearchStats::default();
    let mut x = x;
    let mut findpos = gate;
    if findpos.is_nil() {
        return SearchOutcome {
            found: false,
            findpos,
            insertpos: Handle::NIL,
            d: 0,
            remainder: x,
            slot: SpliceSlot::Gate,
            stats,
        };
    }
    stats.nodes_visited = 1;
    let mut insertpos = Handle::NIL;
    let mut slot = SpliceSlot::Gate;
    loop {
        stats.outer_iters += 1;
        let d = match divergence(x, rkey_bits(arena, findpos)) {
            Divergence::Equal => {
                return SearchOutcome { found: true, findpos, insertpos, d: 0, remainder: x, slot, stats };
            }
            Divergence::Prefix(d) | Divergence::Mismatch(d) => d,
        };
        stats.d_seq.push(d);

        let parent = findpos;
        insertpos = parent;
        slot = SpliceSlot::Branch(parent);
        findpos = node::handle_at(arena, parent, BRANCH);
        stats.link_steps += 1;
        while !findpos.is_nil() {
            stats.nodes_visited += 1;
            if d <= node::dist(arena, findpos) {
                break;
            }
            insertpos = findpos;
            slot = SpliceSlot::Link(findpos);
            findpos = node::handle_at(arena, findpos, LINK);
            stats.link_steps += 1;
        }
        if findpos.is_nil() || d != node::dist(arena, findpos) {
            return SearchOutcome { found: false, findpos, insertpos, d, remainder: x, slot, stats };
        }
        x = x.suffix(d);
    }
}

pub(crate) fn splice(arena: &mut Arena, gate: &mut Handle, slot: SpliceSlot, new: Handle) {
    match slot {
        SpliceSlot::Gate => *gate = new,
        SpliceSlot::Branch(p) => node::set_handle(arena, p, BRANCH, new),
        SpliceSlot::Link(p) => node::set_handle(arena, p, LINK, new),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("link chain under {parent:?} not strictly increasing: dist {prev} then {next}")]
    ChainOrder { parent: Handle, prev: usize, next: usize },
    #[error("node {node:?} has dist {dist} beyond its parent's key suffix of {len} bits")]
    DistOutOfRange { node: Handle, dist: usize, len: usize },
    #[error("key {key} of node {node:?} does not search back to it")]
    Unreachable { key: BitString, node: Handle },
    #[error("node {0:?} reachable twice")]
    Shared(Handle),
}

/// Shape summary returned by a successful structure check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrieShape {
    pub nodes: usize,
    pub max_chain: usize,
    pub max_depth: usize,
}

/// Visits every node with its reconstructed full key, in preorder (a node,
/// then its children, then its later siblings).
pub(crate) fn walk(arena: &Arena, gate: Handle, mut f: impl FnMut(Handle, &BitString, usize)) {
    // A node's key is its parent's key cut at (parent rkey start + dist),
    // followed by its own rkey. Entries: (node, parent key, parent rkey
    // start, depth).
    let mut stack: Vec<(Handle, Rc<BitString>, usize, usize)> = vec![];
    if !gate.is_nil() {
        stack.push((gate, Rc::new(BitString::new()), 0, 0));
    }
    while let Some((h, parent_key, parent_base, depth)) = stack.pop() {
        let rkey = rkey_bits(arena, h);
        let cut = (parent_base + node::dist(arena, h)).min(parent_key.len());
        let mut key = parent_key.prefix(cut);
        key.extend_from_bits(rkey);
        f(h, &key, depth);
        let link = node::handle_at(arena, h, LINK);
        if !link.is_nil() {
            stack.push((link, parent_key, parent_base, depth));
        }
        let branch = node::handle_at(arena, h, BRANCH);
        if !branch.is_nil() {
            stack.push((branch, Rc::new(key), cut, depth + 1));
        }
    }
}

pub(crate) fn entries<V: Value>(arena: &Arena, gate: Handle) -> Vec<(BitString, V)> {
    let mut out = Vec::new();
    walk(arena, gate, |h, key, _| {
        if let Some(v) = read_entry::<V>(arena, h) {
            out.push((key.clone(), v));
        }
    });
    out
}

/// Full structural validation: chain order, dist ranges, no sharing, and
/// every stored key searching back to its own node.
pub(crate) fn check_trie(arena: &Arena, gate: Handle) -> Result<TrieShape, StructureError> {
    let mut shape = TrieShape::default();
    let mut seen = HashSet::new();
    let mut err = None;
    walk(arena, gate, |h, _, depth| {
        if err.is_some() {
            return;
        }
        shape.nodes += 1;
        shape.max_depth = shape.max_depth.max(depth);
        if !seen.insert(h) {
            err = Some(StructureError::Shared(h));
            return;
        }
        let len = rkey_bits(arena, h).len();
        let mut prev: Option<usize> = None;
        let mut chain = 0;
        let mut c = node::handle_at(arena, h, BRANCH);
        while !c.is_nil() {
            let dist = node::dist(arena, c);
            if dist > len {
                err = Some(StructureError::DistOutOfRange { node: c, dist, len });
                return;
            }
            if let Some(p) = prev.filter(|&p| p >= dist) {
                err = Some(StructureError::ChainOrder { parent: h, prev: p, next: dist });
                return;
            }
            prev = Some(dist);
            chain += 1;
            c = node::handle_at(arena, c, LINK);
        }
        shape.max_chain = shape.max_chain.max(chain);
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut keys = Vec::new();
    walk(arena, gate, |h, key, _| keys.push((h, key.clone())));
    for (h, key) in keys {
        let out = search_trie(arena, gate, key.as_bits());
        if !out.found || out.findpos != h {
            return Err(StructureError::Unreachable { key, node: h });
        }
    }
    Ok(shape)
}

/// Indented listing, one line per node: `dist: rkey -> value`.
pub(crate) fn dump_trie<V: Value>(arena: &Arena, gate: Handle, fmt_val: impl Fn(&V) -> String) -> String {
    if gate.is_nil() {
        return "(empty)\n".to_string();
    }
    let mut out = String::new();
    let mut stack = vec![(gate, 0usize)];
    while let Some((h, indent)) = stack.pop() {
        let n: Node<V> = node::read_node(arena, h);
        let val = n.val.as_ref().map_or_else(|| "(removed)".to_string(), &fmt_val);
        let _ = writeln!(out, "{:pad$}{}: {} -> {}", "", n.dist, rkey_bits(arena, h), val, pad = 2 * indent);
        if !n.link.is_nil() {
            stack.push((n.link, indent));
        }
        if !n.branch.is_nil() {
            stack.push((n.branch, indent + 1));
        }
    }
    out
}

/// Bit-trie dictionary without environments.
#[derive(Debug, Clone)]
pub struct Dictionary<V> {
    arena: Arena,
    gate: Handle,
    _value: PhantomData<V>,
}

impl<V: Value> Default for Dictionary<V> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V: Value> Dictionary<V> {
    pub fn new() -> Self {
        Self::with_arena(Arena::new())
    }

    /// Uses `arena` as the backing store; it should be empty.
    pub fn with_arena(arena: Arena) -> Self {
        Dictionary { arena, gate: Handle::NIL, _value: PhantomData }
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn gate(&self) -> Handle {
        self.gate
    }

    pub fn is_empty(&self) -> bool {
        self.gate.is_nil()
    }

    pub fn search<'x>(&self, x: &'x BitString) -> SearchOutcome<'x> {
        search_trie(&self.arena, self.gate, x.as_bits())
    }

    pub fn lookup(&self, x: &BitString) -> Option<V> {
        let out = self.search(x);
        if out.found {
            read_entry(&self.arena, out.findpos)
        } else {
            None
        }
    }

    /// Binds `x` to `v`, overwriting in place if `x` is already present.
    /// On arena exhaustion the dictionary is unchanged.
    pub fn insert(&mut self, x: &BitString, v: V) -> Result<InsertReport> {
        let out = search_trie(&self.arena, self.gate, x.as_bits());
        if out.found {
            node::write_entry(&mut self.arena, out.findpos, Some(v));
            return Ok(InsertReport { stats: out.stats, created: false, copies: 0 });
        }
        let rest = out.remainder.suffix(out.d);
        let new = node::alloc_node(&mut self.arena, out.d, out.findpos, rest, Some(v))?;
        splice(&mut self.arena, &mut self.gate, out.slot, new);
        Ok(InsertReport { stats: out.stats, created: true, copies: 0 })
    }

    /// All live entries in preorder.
    pub fn entries(&self) -> Vec<(BitString, V)> {
        entries(&self.arena, self.gate)
    }

    pub fn check_structure(&self) -> Result<TrieShape, StructureError> {
        check_trie(&self.arena, self.gate)
    }

    pub fn dump(&self) -> String {
        self.dump_with(|v| format!("{v:?}"))
    }

    pub fn dump_with(&self, fmt_val: impl Fn(&V) -> String) -> String {
        dump_trie(&self.arena, self.gate, fmt_val)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstr::encode_key;
    use crate::error::Error;

    fn b(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn three_keys() -> Dictionary<u64> {
        let mut d = Dictionary::new();
        d.insert(&b("0"), 1).unwrap();
        d.insert(&b("00"), 2).unwrap();
        d.insert(&b("1"), 3).unwrap();
        d
    }

    #[test]
    fn empty_search() {
        let d: Dictionary<u64> = Dictionary::new();
        let k = b("0101");
        let out = d.search(&k);
        assert!(!out.found);
        assert!(out.findpos.is_nil() && out.insertpos.is_nil());
        assert_eq!(out.d, 0);
        assert_eq!(out.slot, SpliceSlot::Gate);
        assert_eq!(d.lookup(&k), None);
        assert_eq!(d.dump(), "(empty)\n");
    }

    #[test]
    fn single_entry() {
        let mut d = Dictionary::new();
        d.insert(&b("0"), 7u64).unwrap();
        let k = b("0");
        let out = d.search(&k);
        assert!(out.found);
        assert_eq!(out.stats.outer_iters, 1);
        assert_eq!(d.lookup(&k), Some(7));
        assert_eq!(d.dump(), "0: 0 -> 7\n");
    }

    #[test]
    fn first_insert_becomes_gate() {
        let mut d = Dictionary::new();
        let k = encode_key(b"A");
        d.insert(&k, 1u64).unwrap();
        let gate: Node<u64> = node::read_node(d.arena(), d.gate());
        assert_eq!(gate.dist, 0);
        assert_eq!(node::stored_bits(d.arena(), gate.rkey).to_bit_string(), k);
    }

    #[test]
    fn duplicate_insert_overwrites_without_allocating() {
        let mut d = Dictionary::new();
        let k = b("0110");
        d.insert(&k, 1u64).unwrap();
        let before = d.arena().freeloc();
        let rep = d.insert(&k, 2).unwrap();
        assert!(!rep.created);
        assert_eq!(d.arena().freeloc(), before);
        assert_eq!(d.lookup(&k), Some(2));
        assert_eq!(d.entries().len(), 1);
    }

    // Hand trace of inserting "0", "00", "1":
    //   "0"  -> gate, rkey "0", dist 0
    //   "00" -> Prefix(1) against "0"; gate.branch empty -> node(dist 1, rkey "0")
    //   "1"  -> Mismatch(0) against "0"; chain stops at dist 1 > 0 -> new node
    //           (dist 0, rkey "1") becomes gate.branch, linking to the dist-1 node.
    #[test]
    fn three_key_layout() {
        let d = three_keys();
        let gate: Node<u64> = node::read_node(d.arena(), d.gate());
        let first: Node<u64> = node::read_node(d.arena(), gate.branch);
        let second: Node<u64> = node::read_node(d.arena(), first.link);
        assert_eq!((first.dist, first.val), (0, Some(3)));
        assert_eq!(node::stored_bits(d.arena(), first.rkey).to_bit_string(), b("1"));
        assert_eq!((second.dist, second.val), (1, Some(2)));
        assert_eq!(node::stored_bits(d.arena(), second.rkey).to_bit_string(), b("0"));
        assert!(second.link.is_nil());
        assert_eq!(d.dump(), "0: 0 -> 1\n  0: 1 -> 3\n  1: 0 -> 2\n");
    }

    #[test]
    fn three_key_search_stats() {
        let d = three_keys();
        let k = b("00");
        let out = d.search(&k);
        assert!(out.found);
        assert_eq!(out.stats.d_seq, vec![1]);
        assert_eq!(out.stats.outer_iters, 2);
        // onto gate.branch (dist 0), then one link past it to dist 1
        assert_eq!(out.stats.link_steps, 2);
        let k = b("1");
        let out = d.search(&k);
        assert!(out.found);
        assert_eq!(out.stats.d_seq, vec![0]);
        assert_eq!(out.stats.link_steps, 1);
    }

    #[test]
    fn absent_keys() {
        let mut d = Dictionary::new();
        d.insert(&b("001101100"), 1u64).unwrap();
        for k in ["110010101", "0", "0011011000", ""] {
            assert_eq!(d.lookup(&b(k)), None, "{k}");
        }
    }

    #[test]
    fn members_example() {
        let mut d = Dictionary::new();
        let rows = [("ALFRED", 1940u64), ("ALBERT", 1955), ("PETRA", 1960), ("PETER", 1965)];
        for (name, year) in rows {
            d.insert(&encode_key(name.as_bytes()), year).unwrap();
        }
        for (name, year) in rows {
            assert_eq!(d.lookup(&encode_key(name.as_bytes())), Some(year));
        }
        assert_eq!(d.lookup(&encode_key(b"PAUL")), None);
        d.check_structure().unwrap();
    }

    #[test]
    fn prefix_keys_and_empty_key() {
        let mut d = Dictionary::new();
        let keys = ["0101", "", "01", "010", "0100", "01011", "1", "0"];
        for (i, k) in keys.iter().enumerate() {
            d.insert(&b(k), i as u64).unwrap();
        }
        for (i, k) in keys.iter().enumerate() {
            assert_eq!(d.lookup(&b(k)), Some(i as u64), "{k}");
        }
        d.check_structure().unwrap();
        assert_eq!(d.entries().len(), keys.len());
    }

    // A chain whose last node has no children: the splice has to go onto that
    // node's link, not its branch, even though both fields are nil.
    #[test]
    fn splice_at_childless_chain_tail() {
        let mut d = Dictionary::new();
        d.insert(&b("000000"), 1u64).unwrap();
        d.insert(&b("001"), 2).unwrap(); // dist 2 under gate
        d.insert(&b("000001"), 3).unwrap(); // dist 5 after it in the chain
        let out_slot = d.search(&b("000001")).slot;
        assert!(matches!(out_slot, SpliceSlot::Link(_)));
        for (k, v) in [("000000", 1), ("001", 2), ("000001", 3)] {
            assert_eq!(d.lookup(&b(k)), Some(v));
        }
    }

    #[test]
    fn search_is_pure() {
        let d = three_keys();
        let before = (d.arena().freeloc(), d.arena().checksum_below(d.arena().freeloc()), d.arena().stats());
        for k in ["0", "00", "1", "01", "", "111"] {
            let _ = d.search(&b(k));
        }
        let after = (d.arena().freeloc(), d.arena().checksum_below(d.arena().freeloc()), d.arena().stats());
        assert_eq!(before, after);
    }

    #[test]
    fn exhaustion_leaves_dictionary_unchanged() {
        let mut d = Dictionary::with_arena(Arena::with_limit(120));
        d.insert(&b("0"), 1u64).unwrap();
        let freeloc = d.arena().freeloc();
        let dump = d.dump();
        let err = d.insert(&b("1111111111"), 2).unwrap_err();
        assert!(matches!(err, Error::Exhausted { .. }));
        assert_eq!(d.arena().freeloc(), freeloc);
        assert_eq!(d.dump(), dump);
    }

    #[test]
    fn bound_checks() {
        let s = SearchStats { outer_iters: 3, link_steps: 2, d_seq: vec![0, 0, 1], nodes_visited: 3 };
        assert_eq!(s.max_zero_run(), 2);
        assert!(s.check_bounds(2).is_ok());
        let bad = SearchStats { d_seq: vec![0, 0, 0], ..s.clone() };
        assert_eq!(bad.check_bounds(8), Err(BoundViolation::ZeroRun { run: 3 }));
        assert!(matches!(s.check_bounds(0), Err(BoundViolation::OuterIters { .. })));
        assert_eq!(bad.bound_violations(0).len(), 2);
    }

    #[test]
    fn empty_key_under_dist_zero_chain() {
        let mut d = Dictionary::new();
        for (k, v) in [("1", 1u64), ("0111", 2), ("", 3)] {
            d.insert(&b(k), v).unwrap();
        }
        let empty = b("");
        let out = d.search(&empty);
        assert!(out.found);
        assert_eq!(out.stats.d_seq, vec![0, 0]);
        assert_eq!(out.stats.outer_iters, max_outer_iters(0));
        assert!(matches!(out.stats.check_bounds(0), Err(BoundViolation::OuterIters { r: 3, s: 0 })));
    }
}
