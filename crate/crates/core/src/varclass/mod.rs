//! Variational quantum classifier.

mod model;
mod pauli;
mod risk;
mod spsa;
mod train;

pub use model::{ModelFile, NoiseSettings, NoisyProbability, ProbMode, VariationalModel};
pub use pauli::{pauli_expansion_check, PauliExpansion, MAX_PAULI_QUBITS};
pub use risk::{
    binomial_misclass_exact, decide, empirical_risk, misclass_probability, multi_label_cost,
    risk_from_states, sigmoid,
};
pub use spsa::{spsa_minimize, SpsaConfig, SpsaResult};
pub use train::{
    classify, initial_theta, refine_bias, train, Classification, TrainConfig, TrainMode,
    TrainReport, DEFAULT_CLASSIFY_SHOTS, DEFAULT_COST_SHOTS, DEFAULT_MEASURE_SHOTS,
};
