pub mod automata;
pub mod cli;
pub mod conditions;
pub mod error;
pub mod game;
pub mod lang;
pub mod model;
pub mod supervisor;

pub use error::{Error, Result};
