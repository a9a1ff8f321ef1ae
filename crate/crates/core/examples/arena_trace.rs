//! The bump arena on its own: allocation, handle ordering, traced
//! allocations and LIFO truncation.
//!
//! ```sh
//! cargo run --example arena_trace
//! ```

use lifo_dict::{Arena, BitString, ScopedDictionary};

fn main() -> lifo_dict::Result<()> {
    let mut arena = Arena::new();
    let a = arena.create_as(16, "pair")?;
    let b = arena.create_as(8, "word")?;
    let mark = arena.mark();
    let c = arena.create_as(0, "empty")?;
    println!("handles {a:?} < {b:?} < {c:?}: {}", a < b && b < c);
    arena.write_u64(b, 0, 42);
    println!("word at {b:?} holds {}", arena.read_u64(b, 0));
    arena.truncate(mark);
    println!("after truncate(mark): freeloc {}", arena.freeloc());

    let mut traced = Arena::new();
    traced.enable_trace();
    let mut d = ScopedDictionary::with_arena(traced)?;
    d.insert(&"0".parse::<BitString>().expect("bit literal"), 7u32)?;
    d.open_environment()?;
    d.insert(&"01".parse::<BitString>().expect("bit literal"), 8)?;
    println!("\nallocation trace (offset: size: kind):\n{}", d.arena().dump_trace());

    let mut small = ScopedDictionary::<u32>::with_arena(Arena::with_limit(64))?;
    match small.insert(&"0101".parse().expect("bit literal"), 1) {
        Err(e) => println!("bounded arena: {e}"),
        Ok(_) => println!("bounded arena had room"),
    }
    Ok(())
}
