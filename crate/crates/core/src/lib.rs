pub mod constructions;
pub mod error;
pub mod formats;
pub mod linalg;
pub mod search;
pub mod subspace;
pub mod varieties;

pub use error::{Error, Result};
pub use linalg::C64;
