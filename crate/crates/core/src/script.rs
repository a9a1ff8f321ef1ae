//! A line-oriented command language for driving a [`ScopedDictionary`].
//!
//! ```text
//! # comment
//! insert ALFRED 1940      keys are byte-encoded UTF-8 tokens ...
//! insert b:0110 x         ... or raw bit literals after `b:` (`b:` alone is ε)
//! search ALFRED           prints `FOUND <value>` or `ABSENT`
//! remove ALFRED
//! open
//! close
//! dump                    prints the trie listing
//! stats                   prints the counters of the last search/insert/remove
//! ```
//!
//! Values are arbitrary tokens; they are interned to integer ids so the
//! dictionary stores a fixed-size payload.

use std::collections::HashMap;

use thiserror::Error;

use crate::bitstr::{encode_key, BitString};
use crate::error::Error;
use crate::lexikon::SearchStats;
use crate::scoped::ScopedDictionary;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Insert(BitString, String),
    Search(BitString),
    Remove(BitString),
    Open,
    Close,
    Dump,
    Stats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("environment underflow at line {line}")]
    Underflow { line: usize },
    #[error("{source} at line {line}")]
    Dictionary { line: usize, source: Error },
}

fn parse_key(tok: &str) -> Result<BitString, String> {
    match tok.strip_prefix("b:") {
        Some(bits) => bits.parse().map_err(|e| format!("{e}")),
        None => Ok(encode_key(tok.as_bytes())),
    }
}

/// Parses a whole script; `(line number, command)` pairs, 1-based.
pub fn parse(text: &str) -> Result<Vec<(usize, Command)>, ScriptError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let err = |msg: String| ScriptError::Parse { line, msg };
        let arity = |n: usize| {
            if toks.len() == n + 1 {
                Ok(())
            } else {
                Err(err(format!("`{}` takes {n} argument(s), got {}", toks[0], toks.len() - 1)))
            }
        };
        let cmd = match toks[0] {
            "insert" => {
                arity(2)?;
                Command::Insert(parse_key(toks[1]).map_err(err)?, toks[2].to_string())
            }
            "search" => {
                arity(1)?;
                Command::Search(parse_key(toks[1]).map_err(err)?)
            }
            "remove" => {
                arity(1)?;
                Command::Remove(parse_key(toks[1]).map_err(err)?)
            }
            "open" => arity(0).map(|_| Command::Open)?,
            "close" => arity(0).map(|_| Command::Close)?,
            "dump" => arity(0).map(|_| Command::Dump)?,
            "stats" => arity(0).map(|_| Command::Stats)?,
            other => return Err(err(format!("unknown command `{other}`"))),
        };
        out.push((line, cmd));
    }
    Ok(out)
}

/// Executes commands against one dictionary, collecting printed output.
pub struct Runner {
    dict: ScopedDictionary<u64>,
    tokens: Vec<String>,
    ids: HashMap<String, u64>,
    last_stats: Option<SearchStats>,
    output: String,
}

impl Default for Runner {
    fn default() -> Self {
        Self::new()
    }
}

impl Runner {
    pub fn new() -> Self {
        Runner {
            dict: ScopedDictionary::new().expect("base frame"),
            tokens: Vec::new(),
            ids: HashMap::new(),
            last_stats: None,
            output: String::new(),
        }
    }

    pub fn dictionary(&self) -> &ScopedDictionary<u64> {
        &self.dict
    }

    pub fn output(&self) -> &str {
        &self.output
    }

    pub fn dump(&self) -> String {
        self.dict.dump_with(|id| self.tokens[*id as usize].clone())
    }

    fn intern(&mut self, tok: &str) -> u64 {
        if let Some(&id) = self.ids.get(tok) {
            return id;
        }
        let id = self.tokens.len() as u64;
        self.tokens.push(tok.to_string());
        self.ids.insert(tok.to_string(), id);
        id
    }

    pub fn execute(&mut self, line: usize, cmd: &Command) -> Result<(), ScriptError> {
        let dict_err = |source| ScriptError::Dictionary { line, source };
        match cmd {
            Command::Insert(k, tok) => {
                let id = self.intern(tok);
                let rep = self.dict.insert(k, id).map_err(dict_err)?;
                self.last_stats = Some(rep.stats);
            }
            Command::Remove(k) => {
                let rep = self.dict.remove(k).map_err(dict_err)?;
                self.last_stats = Some(rep.stats);
            }
            Command::Search(k) => {
                let out = self.dict.search(k);
                match self.dict.lookup(k) {
                    Some(id) => {
                        self.output.push_str("FOUND ");
                        self.output.push_str(&self.tokens[id as usize]);
                        self.output.push('\n');
                    }
                    None => self.output.push_str("ABSENT\n"),
                }
                self.last_stats = Some(out.stats);
            }
            Command::Open => self.dict.open_environment().map_err(dict_err)?,
            Command::Close => self.dict.close_environment().map_err(|e| match e {
                Error::Underflow => ScriptError::Underflow { line },
                other => dict_err(other),
            })?,
            Command::Dump => {
                let dump = self.dump();
                self.output.push_str(&dump);
            }
            Command::Stats => {
                let text = self.last_stats.as_ref().map_or("no stats yet".to_string(), |s| s.to_string());
                self.output.push_str(&text);
                self.output.push('\n');
            }
        }
        Ok(())
    }
}

/// Outcome of a script: everything printed, and the error that stopped it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptRun {
    pub output: String,
    pub dump: String,
    pub error: Option<ScriptError>,
}

/// Parses and runs `text` on a fresh dictionary. A parse error runs nothing.
pub fn run_script(text: &str) -> ScriptRun {
    let commands = match parse(text) {
        Ok(c) => c,
        Err(e) => return ScriptRun { output: String::new(), dump: "(empty)\n".into(), error: Some(e) },
    };
    let mut runner = Runner::new();
    let error = commands.iter().find_map(|(line, cmd)| runner.execute(*line, cmd).err());
    ScriptRun { dump: runner.dump(), output: runner.output, error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn members() {
        let run = run_script(
            "insert ALFRED 1940\ninsert ALBERT 1955\ninsert PETRA 1960\ninsert PETER 1965\nsearch PETER\nsearch PAUL\n",
        );
        assert_eq!(run.error, None);
        assert_eq!(run.output, "FOUND 1965\nABSENT\n");
    }

    #[test]
    fn underflow_reports_line() {
        let run = run_script("open\nclose\nclose\nsearch x\n");
        assert_eq!(run.error, Some(ScriptError::Underflow { line: 3 }));
        assert_eq!(run.error.unwrap().to_string(), "environment underflow at line 3");
        assert_eq!(run.output, "");
    }

    #[test]
    fn raw_bit_dump() {
        let run = run_script("insert b:0 1\ninsert b:00 2\ninsert b:1 3\ndump\n");
        assert_eq!(run.output, "0: 0 -> 1\n  0: 1 -> 3\n  1: 0 -> 2\n");
    }

    #[test]
    fn parse_errors() {
        let e = parse("insert a 1\nfrobnicate\n").unwrap_err();
        assert_eq!(e, ScriptError::Parse { line: 2, msg: "unknown command `frobnicate`".into() });
        assert!(matches!(parse("search\n"), Err(ScriptError::Parse { line: 1, .. })));
        assert!(matches!(parse("search b:012\n"), Err(ScriptError::Parse { line: 1, .. })));
        let run = run_script("search a\nopen extra\n");
        assert_eq!(run.output, "");
        assert!(run.error.unwrap().to_string().starts_with("parse error at line 2"));
    }

    #[test]
    fn comments_stats_and_empty_key() {
        let run = run_script("# header\ninsert b: e  # empty key\nsearch b:\nstats\n\nremove b:\nsearch b:\n");
        assert_eq!(run.error, None);
        assert_eq!(run.output, "FOUND e\nouter_iters=1 link_steps=0 nodes_visited=1 d_seq=[]\nABSENT\n");
    }

    #[test]
    fn scoped_shadowing() {
        let run = run_script("insert x 1\nopen\ninsert x 2\nsearch x\nclose\nsearch x\n");
        assert_eq!(run.output, "FOUND 2\nFOUND 1\n");
    }
}
