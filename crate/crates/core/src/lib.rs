pub mod battery;
pub mod compression;
pub mod context;
pub mod error;
pub mod extended;
pub mod instances;
pub mod invariants;
pub mod linalg;
pub mod oracle;
pub mod parallelism;
pub mod problem;
pub mod shell;

mod ascent;

pub use error::{Error, Result};
pub use extended::ExtReal;
