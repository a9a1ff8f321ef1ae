//! Step counters for random fixed-length keys: they grow with the key
//! length and stay flat as the dictionary grows.
//!
//! ```sh
//! cargo run --release --example complexity_bench
//! ```

use lifo_dict::bench::{self, BenchConfig};

fn main() {
    let by_size = BenchConfig { n_list: vec![1_000, 10_000, 100_000], s_list: vec![128], ..BenchConfig::default() };
    println!("{}", bench::run(&by_size));

    let by_length = BenchConfig { n_list: vec![10_000], s_list: vec![8, 16, 64, 256, 512], ..BenchConfig::default() };
    println!("{}", bench::run(&by_length));
}
