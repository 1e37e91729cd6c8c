pub mod acquisition;
pub mod cli;
pub mod config;
pub mod design_space;
pub mod driver;
pub mod error;
pub mod evaluation;
pub mod gp;
pub mod linalg;
pub mod numfmt;
pub mod portfolio;
pub mod problems;
pub mod seed;
pub mod selection;

pub use error::{Error, Result};
