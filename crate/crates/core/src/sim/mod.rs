//! Dense statevector and density-matrix simulation.

mod circuit;
mod density;
mod gate;
mod noise;
mod observable;
mod sampling;
mod state;

pub use circuit::Circuit;
pub use density::DensityMatrix;
pub use gate::{Gate, Support};
pub use noise::NoiseModel;
pub use observable::{BornRule, Observable};
pub use sampling::{sample_shots, Counts, Probabilities};
pub use state::StateVector;

/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 20;
