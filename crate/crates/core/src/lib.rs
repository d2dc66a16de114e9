pub mod arena;
pub mod cli;
pub mod error;
pub mod f4;
pub mod field;
pub mod io;
pub mod linalg;
pub mod order;
pub mod proof;
pub mod trie;

pub use error::{Error, Result};
