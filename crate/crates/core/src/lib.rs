//! Finite-dimensional calculus for linear relations between Krein spaces:
//! adjoints, Shmul'yan transforms, boundary pairs and triples, Weyl families,
//! the main transform, both boundary-pair transformation schemes, and a
//! seeded property-check harness.

pub mod boundary;
pub mod error;
mod exec;
pub mod harness;
pub mod krein;
pub mod nevanlinna;
pub mod numkernel;
pub mod relcalc;
pub mod transforms;

pub use error::{Error, Result};
