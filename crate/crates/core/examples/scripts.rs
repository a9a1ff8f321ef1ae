//! Driving the dictionary through the text command language, the same one
//! `lifo-dict run` reads from a file.
//!
//! ```sh
//! cargo run --example scripts
//! ```

use lifo_dict::script::run_script;

const SCRIPT: &str = "\
# names are byte-encoded, b: gives raw bits
insert ALFRED 1940
insert PETER 1965
open
insert PETER 2001
search PETER
stats
close
search PETER
insert b:0 zero
insert b: empty
dump
close
search ALFRED
";

fn main() {
    let run = run_script(SCRIPT);
    print!("{}", run.output);
    if let Some(e) = run.error {
        println!("stopped: {e}");
    }
}
