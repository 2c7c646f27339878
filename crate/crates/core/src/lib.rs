pub mod definable;
pub mod elimination;
pub mod error;
pub mod fixtures;
pub mod cli;
pub mod groupoid;
pub mod report;
pub mod semantics;
pub mod syntax;
pub mod theorygen;
pub mod topology;

pub use error::{Error, Result};
