//! Quantum-enhanced feature space classifiers, simulated.

pub mod ansatz;
pub mod datagen;
pub mod error;
pub mod featuremap;
pub mod kernelsvm;
pub mod linalg;
pub mod mitigation;
pub mod rng;
pub mod sim;
pub mod varclass;

pub use error::{Error, Result};
