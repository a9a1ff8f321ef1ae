//! Raw bit-string keys where one key is a prefix of another, including the
//! empty key, and the dump that shows where each one hangs.
//!
//! ```sh
//! cargo run --example prefix_keys
//! ```

use lifo_dict::{BitString, Dictionary};

fn main() -> lifo_dict::Result<()> {
    let mut d = Dictionary::new();
    for (i, k) in ["0", "00", "1", "", "0110", "011"].iter().enumerate() {
        let key: BitString = k.parse().expect("bit literal");
        let rep = d.insert(&key, i as u64)?;
        println!("insert {:>6} -> {i}   {}", key.to_string(), rep.stats);
    }
    println!("\n{}", d.dump());

    for k in ["", "0", "01", "011", "0111"] {
        let key: BitString = k.parse().expect("bit literal");
        let out = d.search(&key);
        let found = d.lookup(&key).map_or("absent".to_string(), |v| format!("found {v}"));
        println!("search {:>6}: {found:<9} {}", key.to_string(), out.stats);
    }
    Ok(())
}
