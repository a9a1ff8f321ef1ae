//! A bump allocator over one contiguous, growable byte store.
//!
//! `freeloc` is the top of a stack: [`Arena::create`] hands out the region at
//! the current top and raises it, [`Arena::truncate`] lowers it again. There
//! is no per-object free. Handles are byte offsets rather than addresses, so
//! growing the store never invalidates them and handle order is creation
//! order.

use std::collections::hash_map::DefaultHasher;
use std::fmt::{self, Write as _};
use std::hash::Hasher;
use std::ops::Range;

use crate::error::{Error, Result};

/// Every allocation starts on a multiple of this many bytes.
pub const ALIGN: usize = std::mem::align_of::<u64>();

/// Reference to an allocation: its starting offset, or nil.
///
/// Encoded as `offset + 1` with 0 reserved for nil, so the derived order puts
/// nil below every real handle and orders real handles by offset.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Handle(u64);

impl Handle {
    pub const NIL: Handle = Handle(0);

    pub fn from_offset(offset: usize) -> Self {
        Handle(offset as u64 + 1)
    }

    pub fn offset(self) -> Option<usize> {
        self.0.checked_sub(1).map(|o| o as usize)
    }

    pub fn is_nil(self) -> bool {
        self.0 == 0
    }

    /// Raw encoding used when a handle is stored inside the arena.
    pub fn to_raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(raw: u64) -> Self {
        Handle(raw)
    }

    fn expect_offset(self) -> usize {
        self.offset().expect("dereferenced a nil handle")
    }
}

impl fmt::Debug for Handle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.offset() {
            None => f.write_str("nil"),
            Some(o) => write!(f, "@{o}"),
        }
    }
}

/// Cumulative operation counts since the arena was created.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ArenaStats {
    pub allocations: u64,
    pub writes: u64,
    pub truncations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub offset: usize,
    pub size: usize,
    pub kind: &'static str,
}

#[derive(Clone)]
pub struct Arena {
    store: Vec<u8>,
    limit: usize,
    stats: ArenaStats,
    lowest_write: Option<usize>,
    trace: Option<Vec<TraceEntry>>,
}

impl Default for Arena {
    fn default() -> Self {
        Arena::new()
    }
}

impl Arena {
    pub fn new() -> Self {
        Arena::with_limit(usize::MAX)
    }

    /// An arena that refuses to grow past `limit` bytes.
    pub fn with_limit(limit: usize) -> Self {
        Arena { store: Vec::new(), limit, stats: ArenaStats::default(), lowest_write: None, trace: None }
    }

    /// Current top of the allocation stack.
    pub fn freeloc(&self) -> usize {
        self.store.len()
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn stats(&self) -> ArenaStats {
        self.stats
    }

    /// Same as [`Arena::freeloc`]; named for the save/restore pairing with
    /// [`Arena::truncate`].
    pub fn mark(&self) -> usize {
        self.freeloc()
    }

    /// Reserves `size` bytes at the (aligned) top. The region reads as zero
    /// until written.
    pub fn create(&mut self, size: usize) -> Result<Handle> {
        self.create_as(size, "raw")
    }

    /// [`Arena::create`] with a kind label for the allocation trace.
    pub fn create_as(&mut self, size: usize, kind: &'static str) -> Result<Handle> {
        let freeloc = self.freeloc();
        let start = freeloc.next_multiple_of(ALIGN);
        let end = start.checked_add(size).filter(|&e| e <= self.limit);
        let Some(end) = end else {
            return Err(Error::Exhausted { requested: size, freeloc, limit: self.limit });
        };
        self.store.resize(end, 0);
        self.stats.allocations += 1;
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEntry { offset: start, size, kind });
        }
        Ok(Handle::from_offset(start))
    }

    /// Allocates a region and fills it with `bytes`.
    pub fn copy_in(&mut self, bytes: &[u8]) -> Result<Handle> {
        self.copy_in_as(bytes, "raw")
    }

    pub fn copy_in_as(&mut self, bytes: &[u8], kind: &'static str) -> Result<Handle> {
        let h = self.create_as(bytes.len(), kind)?;
        self.write(h, 0, bytes);
        Ok(h)
    }

    /// Copies `len` bytes of an existing allocation to a fresh one on top.
    pub fn copy_within(&mut self, src: Handle, len: usize, kind: &'static str) -> Result<Handle> {
        let from = src.expect_offset();
        let h = self.create_as(len, kind)?;
        let to = h.expect_offset();
        self.store.copy_within(from..from + len, to);
        self.note_write(to, len);
        Ok(h)
    }

    /// Pops everything at or above `mark`. Bytes below it are untouched.
    ///
    /// Panics if `mark` lies above the current top.
    pub fn truncate(&mut self, mark: usize) {
        assert!(mark <= self.freeloc(), "truncate to {mark} above freeloc {}", self.freeloc());
        self.store.truncate(mark);
        self.stats.truncations += 1;
        if let Some(trace) = &mut self.trace {
            trace.retain(|e| e.offset < mark);
        }
    }

    pub fn bytes(&self, h: Handle, len: usize) -> &[u8] {
        let o = h.expect_offset();
        &self.store[o..o + len]
    }

    /// Everything from `h` to the top of the arena.
    pub fn tail(&self, h: Handle) -> &[u8] {
        &self.store[h.expect_offset()..]
    }

    pub fn read_u64(&self, h: Handle, field: usize) -> u64 {
        let o = h.expect_offset() + field;
        u64::from_le_bytes(self.store[o..o + 8].try_into().unwrap())
    }

    pub fn read_u8(&self, h: Handle, field: usize) -> u8 {
        self.store[h.expect_offset() + field]
    }

    pub fn write_u64(&mut self, h: Handle, field: usize, v: u64) {
        self.write(h, field, &v.to_le_bytes());
    }

    pub fn write(&mut self, h: Handle, field: usize, bytes: &[u8]) {
        let o = h.expect_offset() + field;
        self.store[o..o + bytes.len()].copy_from_slice(bytes);
        self.note_write(o, bytes.len());
    }

    fn note_write(&mut self, offset: usize, len: usize) {
        if len == 0 {
            return;
        }
        self.stats.writes += 1;
        self.lowest_write = Some(self.lowest_write.map_or(offset, |w| w.min(offset)));
    }

    /// Lowest offset written since the last [`Arena::reset_write_watermark`].
    pub fn lowest_write(&self) -> Option<usize> {
        self.lowest_write
    }

    pub fn reset_write_watermark(&mut self) {
        self.lowest_write = None;
    }

    /// Hash of the bytes in `range`, for before/after stability checks.
    pub fn checksum(&self, range: Range<usize>) -> u64 {
        let mut h = DefaultHasher::new();
        h.write(&self.store[range]);
        h.finish()
    }

    /// Hash of every byte below `mark`.
    pub fn checksum_below(&self, mark: usize) -> u64 {
        self.checksum(0..mark)
    }

    /// Starts recording `offset: size: kind` for each allocation.
    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn trace(&self) -> &[TraceEntry] {
        self.trace.as_deref().unwrap_or(&[])
    }

    pub fn dump_trace(&self) -> String {
        let mut out = String::new();
        for e in self.trace() {
            let _ = writeln!(out, "{}: {}: {}", e.offset, e.size, e.kind);
        }
        out
    }
}

impl fmt::Debug for Arena {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Arena")
            .field("freeloc", &self.freeloc())
            .field("limit", &self.limit)
            .field("stats", &self.stats)
            .finish()
    }
}
