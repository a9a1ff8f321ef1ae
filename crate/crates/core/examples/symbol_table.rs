//! A block-structured symbol table: each nested block opens an environment,
//! shadows outer names, and closing it brings the outer bindings back.
//!
//! ```sh
//! cargo run --example symbol_table
//! ```

use lifo_dict::{encode_key, ScopedDictionary};

fn show(scope: &ScopedDictionary<i64>, names: &[&str]) {
    let vals: Vec<String> = names
        .iter()
        .map(|n| match scope.lookup(&encode_key(n.as_bytes())) {
            Some(v) => format!("{n}={v}"),
            None => format!("{n}=-"),
        })
        .collect();
    println!("{}depth {}: {}", "  ".repeat(scope.depth() - 1), scope.depth(), vals.join(" "));
}

fn main() -> lifo_dict::Result<()> {
    let names = ["x", "y", "z"];
    let key = |n: &str| encode_key(n.as_bytes());
    let mut scope = ScopedDictionary::new()?;

    scope.insert(&key("x"), 1)?;
    scope.insert(&key("y"), 2)?;
    show(&scope, &names);

    scope.open_environment()?;
    scope.insert(&key("x"), 10)?;
    scope.insert(&key("z"), 30)?;
    show(&scope, &names);

    scope.open_environment()?;
    scope.remove(&key("y"))?;
    scope.insert(&key("z"), 300)?;
    show(&scope, &names);

    scope.close_environment()?;
    show(&scope, &names);
    scope.close_environment()?;
    show(&scope, &names);

    match scope.close_environment() {
        Err(e) => println!("closing the outermost block: {e}"),
        Ok(()) => unreachable!("the base frame cannot be closed"),
    }
    Ok(())
}
