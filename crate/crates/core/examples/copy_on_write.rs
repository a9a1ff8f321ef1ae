//! What an environment costs: opening copies at most the entry node,
//! inserting copies only the path into older frames, closing is a constant
//! number of steps and restores the arena byte for byte.
//!
//! ```sh
//! cargo run --example copy_on_write
//! ```

use lifo_dict::{BitString, ScopedDictionary};

fn bits(s: &str) -> BitString {
    s.parse().expect("bit literal")
}

fn main() -> lifo_dict::Result<()> {
    let mut d = ScopedDictionary::new()?;
    for (k, v) in [("0", 1u64), ("00", 2), ("1", 3)] {
        d.insert(&bits(k), v)?;
    }
    let mark = d.arena().mark();
    let before = d.arena().checksum_below(mark);
    println!("base trie, arena at {mark} bytes:\n{}", d.dump());

    d.open_environment()?;
    println!("open:  {:?}", d.last_cost());

    d.arena_mut().reset_write_watermark();
    let rep = d.insert(&bits("00"), 4)?;
    println!(
        "insert 00 -> 4: visited {} nodes, copied {}, lowest write at {:?} (frame starts at {:?})",
        rep.stats.nodes_visited,
        rep.copies,
        d.arena().lowest_write(),
        d.top().offset()
    );
    println!("inner trie:\n{}", d.dump());

    d.close_environment()?;
    println!("close: {:?}", d.last_cost());
    println!(
        "arena back at {} bytes, checksum {}",
        d.arena().freeloc(),
        if d.arena().checksum_below(mark) == before { "unchanged" } else { "CHANGED" }
    );
    println!("00 -> {:?}", d.lookup(&bits("00")));
    Ok(())
}
