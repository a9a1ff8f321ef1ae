use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arena exhausted: {requested} bytes requested at offset {freeloc}, limit {limit}")]
    Exhausted { requested: usize, freeloc: usize, limit: usize },
    #[error("environment underflow: the base frame cannot be closed")]
    Underflow,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
