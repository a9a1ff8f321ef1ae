//! Randomized lockstep testing against the reference model, once on the
//! real implementation and once with a deliberately broken splice.
//!
//! ```sh
//! cargo run --release --example differential_fuzz -- [seed] [ops]
//! ```

use lifo_dict::fuzz::{self, FuzzConfig};
use lifo_dict::scoped::Fault;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let ops = args.next().and_then(|s| s.parse().ok()).unwrap_or(20_000);

    let config = FuzzConfig { seed, ops, ..FuzzConfig::default() };
    println!("{}", fuzz::run(&config));

    let broken = FuzzConfig { fault: Some(Fault::BranchPointerTest), ..config };
    println!("with the splice fault injected:\n{}", fuzz::run(&broken));
}
