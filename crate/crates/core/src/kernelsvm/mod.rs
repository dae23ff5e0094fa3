//! Quantum kernel estimation and the kernel SVM.

mod estimators;
mod matrix;
mod model;
mod psd;
mod smo;

pub use estimators::{
    kernel_classical_single_layer, kernel_exact, kernel_noisy, kernel_sampled, kernel_swap_test,
    overlap_circuit, swap_test_circuit, swap_test_expectation, KernelEstimator, KernelSettings,
};
pub use matrix::{estimation_count, kernel_matrix, KernelMatrix};
pub use model::{
    compute_bias, hyperplane_overlap, success_rate, svm_classify, svm_classify_batch, train_svm,
    BiasEstimate, Decision, SvmModel, SvmTraining,
};
pub use psd::{psd_project, PsdProjection};
pub use smo::{dual_objective, solve_dual, DualSolution, SmoOptions, DEFAULT_C};
