pub mod besov;
pub mod cli;
pub mod degree;
pub mod error;
pub mod gallery;
pub mod io;
pub mod measure;
pub mod operator;
pub mod poly;
pub mod quad;
pub mod symbol;

pub use error::{Error, Result};
