//! A membership register keyed by name: insert four members, look them up,
//! and print the trie.
//!
//! ```sh
//! cargo run --example members
//! ```

use lifo_dict::{encode_key, Dictionary};

fn main() -> lifo_dict::Result<()> {
    let members = [("ALFRED", 1940u32), ("ALBERT", 1955), ("PETRA", 1960), ("PETER", 1965)];
    let mut register = Dictionary::new();
    for (name, year) in members {
        register.insert(&encode_key(name.as_bytes()), year)?;
    }

    for name in ["ALFRED", "ALBERT", "PETRA", "PETER", "PAUL"] {
        match register.lookup(&encode_key(name.as_bytes())) {
            Some(year) => println!("{name:<7} born {year}"),
            None => println!("{name:<7} not a member"),
        }
    }

    let peter = encode_key(b"PETER");
    let out = register.search(&peter);
    println!("\nsearch PETER ({} bits): {}", peter.len(), out.stats);
    println!("\ntrie (dist: key suffix -> value):\n{}", register.dump());
    Ok(())
}
