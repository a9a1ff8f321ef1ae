//! Byte layouts of trie nodes and stored key suffixes inside the arena.
//!
//! Node (little-endian, offsets in bytes):
//!
//! ```text
//!  0  rkey    u64  handle of the stored key suffix
//!  8  dist    u64  branch distance into the parent's rkey
//! 16  branch  u64  first node branching off this node's rkey
//! 24  link    u64  next sibling on the parent's rkey (larger dist)
//! 32  flags   u8   bit 0: tombstone
//! 33  value   V::SIZE bytes
//! ```
//!
//! Stored key suffix: `u64` bit length followed by the packed MSB-first bits.

use crate::arena::{Arena, Handle};
use crate::bitstr::{BitString, Bits};
use crate::error::Result;
use crate::value::Value;

pub(crate) const RKEY: usize = 0;
pub(crate) const DIST: usize = 8;
pub(crate) const BRANCH: usize = 16;
pub(crate) const LINK: usize = 24;
pub(crate) const FLAGS: usize = 32;
pub(crate) const VALUE: usize = 33;

const TOMBSTONE: u8 = 1;

pub fn node_size<V: Value>() -> usize {
    VALUE + V::SIZE
}

/// A decoded node. `val` is `None` for a tombstoned entry.
#[derive(Debug, Clone, PartialEq)]
pub struct Node<V> {
    pub rkey: Handle,
    pub dist: usize,
    pub branch: Handle,
    pub link: Handle,
    pub val: Option<V>,
}

pub fn read_node<V: Value>(arena: &Arena, h: Handle) -> Node<V> {
    Node {
        rkey: handle_at(arena, h, RKEY),
        dist: dist(arena, h),
        branch: handle_at(arena, h, BRANCH),
        link: handle_at(arena, h, LINK),
        val: read_entry(arena, h),
    }
}

pub(crate) fn handle_at(arena: &Arena, h: Handle, field: usize) -> Handle {
    Handle::from_raw(arena.read_u64(h, field))
}

pub(crate) fn set_handle(arena: &mut Arena, h: Handle, field: usize, to: Handle) {
    arena.write_u64(h, field, to.to_raw());
}

pub(crate) fn dist(arena: &Arena, h: Handle) -> usize {
    arena.read_u64(h, DIST) as usize
}

pub(crate) fn read_entry<V: Value>(arena: &Arena, h: Handle) -> Option<V> {
    if arena.read_u8(h, FLAGS) & TOMBSTONE != 0 {
        return None;
    }
    Some(V::decode(arena.bytes(h, node_size::<V>()).get(VALUE..).unwrap()))
}

pub(crate) fn write_entry<V: Value>(arena: &mut Arena, h: Handle, entry: Option<V>) {
    let mut buf = vec![0u8; 1 + V::SIZE];
    match entry {
        Some(v) => v.encode(&mut buf[1..]),
        None => buf[0] = TOMBSTONE,
    }
    arena.write(h, FLAGS, &buf);
}

/// The key suffix stored for node `h`.
pub(crate) fn rkey_bits(arena: &Arena, h: Handle) -> Bits<'_> {
    stored_bits(arena, handle_at(arena, h, RKEY))
}

pub fn stored_bits(arena: &Arena, h: Handle) -> Bits<'_> {
    let len = arena.read_u64(h, 0) as usize;
    Bits::new(arena.bytes(h, 8 + len.div_ceil(8)).get(8..).unwrap(), 0, len)
}

pub(crate) fn store_bits(arena: &mut Arena, bits: Bits<'_>) -> Result<Handle> {
    let owned: BitString = bits.to_bit_string();
    let mut buf = Vec::with_capacity(8 + owned.packed().len());
    buf.extend_from_slice(&(owned.len() as u64).to_le_bytes());
    buf.extend_from_slice(owned.packed());
    arena.copy_in_as(&buf, "bits")
}

/// Allocates a leaf node with key suffix `rkey`. On failure the arena is
/// left exactly as it was.
pub(crate) fn alloc_node<V: Value>(
    arena: &mut Arena,
    dist: usize,
    link: Handle,
    rkey: Bits<'_>,
    entry: Option<V>,
) -> Result<Handle> {
    let mark = arena.mark();
    let rkey = store_bits(arena, rkey)?;
    let node = match arena.create_as(node_size::<V>(), "node") {
        Ok(h) => h,
        Err(e) => {
            arena.truncate(mark);
            return Err(e);
        }
    };
    let mut head = [0u8; 32];
    head[RKEY..RKEY + 8].copy_from_slice(&rkey.to_raw().to_le_bytes());
    head[DIST..DIST + 8].copy_from_slice(&(dist as u64).to_le_bytes());
    head[BRANCH..BRANCH + 8].copy_from_slice(&Handle::NIL.to_raw().to_le_bytes());
    head[LINK..LINK + 8].copy_from_slice(&link.to_raw().to_le_bytes());
    arena.write(node, 0, &head);
    write_entry(arena, node, entry);
    Ok(node)
}

/// Copies node `h` to the top of the arena. The copy shares `rkey`.
pub(crate) fn copy_node<V: Value>(arena: &mut Arena, h: Handle) -> Result<Handle> {
    arena.copy_within(h, node_size::<V>(), "node")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_round_trip() {
        let mut a = Arena::new();
        let key: BitString = "10110".parse().unwrap();
        let h = alloc_node(&mut a, 3, Handle::NIL, key.as_bits(), Some(1940u64)).unwrap();
        let n: Node<u64> = read_node(&a, h);
        assert_eq!(n.dist, 3);
        assert!(n.branch.is_nil() && n.link.is_nil());
        assert_eq!(n.val, Some(1940));
        assert_eq!(rkey_bits(&a, h).to_bit_string(), key);
        write_entry::<u64>(&mut a, h, None);
        assert_eq!(read_entry::<u64>(&a, h), None);
    }

    #[test]
    fn copy_shares_rkey() {
        let mut a = Arena::new();
        let key: BitString = "1".parse().unwrap();
        let h = alloc_node(&mut a, 0, Handle::NIL, key.as_bits(), Some(7u32)).unwrap();
        let c = copy_node::<u32>(&mut a, h).unwrap();
        assert!(c > h);
        assert_eq!(read_node::<u32>(&a, c), read_node::<u32>(&a, h));
    }

    #[test]
    fn failed_alloc_rolls_back() {
        let mut a = Arena::with_limit(20);
        let key: BitString = "1".parse().unwrap();
        assert!(alloc_node(&mut a, 0, Handle::NIL, key.as_bits(), Some(1u64)).is_err());
        assert_eq!(a.freeloc(), 0);
    }
}
