//! # lifo-dict
//!
//! A dictionary keyed by bit strings whose search and insert cost is linear
//! in the key length and independent of the number of entries, with nested
//! environments that open and close in constant time.
//!
//! Everything lives in one bump-allocated [`Arena`]. Opening an environment
//! pushes a frame on top of it; inserts copy the nodes they touch into the
//! current frame instead of modifying older ones; closing the environment
//! pops the frame and truncates the arena, which restores the previous state
//! byte for byte.
//!
//! ```rust
//! use lifo_dict::{encode_key, ScopedDictionary};
//!
//! let mut d: ScopedDictionary<u32> = ScopedDictionary::new().unwrap();
//! d.insert(&encode_key(b"x"), 1).unwrap();
//!
//! d.open_environment().unwrap();
//! d.insert(&encode_key(b"x"), 2).unwrap();
//! d.insert(&encode_key(b"y"), 3).unwrap();
//! assert_eq!(d.lookup(&encode_key(b"x")), Some(2));
//!
//! d.close_environment().unwrap();
//! assert_eq!(d.lookup(&encode_key(b"x")), Some(1));
//! assert_eq!(d.lookup(&encode_key(b"y")), None);
//! ```
//!
//! Besides the data structures the crate ships the tooling used to check
//! them: a brute-force [`oracle`], a randomized differential [`fuzz`] driver,
//! a counter-based [`bench`](mod@bench) and a small [`script`] language, all reachable
//! from the `lifo-dict` binary.

pub mod arena;
pub mod bench;
pub mod bitstr;
mod error;
pub mod fuzz;
pub mod lexikon;
pub mod node;
pub mod oracle;
pub mod scoped;
pub mod script;
pub mod value;

pub use arena::{Arena, Handle};
pub use bitstr::{decode_key, divergence, encode_key, BitString, Bits, Divergence};
pub use error::{Error, Result};
pub use lexikon::{BoundViolation, Dictionary, InsertReport, SearchOutcome, SearchStats, SpliceSlot};
pub use oracle::OracleDict;
pub use scoped::{Frame, OpCost, ScopedDictionary};
pub use value::Value;
