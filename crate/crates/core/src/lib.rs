pub mod cohomology;
pub mod cyclotomic;
pub mod error;
pub mod fixedpoint;
pub mod invariants;
pub mod lattice;
pub mod matrix;
pub mod padic;
pub mod pipeline;
pub mod poly;
pub mod rootdata;
pub mod series;

pub use error::{Error, Result};
