//! Train/evaluate building blocks shared by the subcommands and `repro`.

use qfs_core::ansatz::AnsatzSpec;
use qfs_core::datagen::Dataset;
use qfs_core::kernelsvm::{
    kernel_matrix, success_rate, svm_classify_batch, train_svm, KernelMatrix, KernelSettings,
    SmoOptions, SvmModel, SvmTraining,
};
use qfs_core::mitigation::StretchPair;
use qfs_core::rng::stream_id;
use qfs_core::sim::NoiseModel;
use qfs_core::varclass::{
    classify, initial_theta, train, NoiseSettings, ProbMode, SpsaConfig, TrainConfig, TrainMode,
    TrainReport, VariationalModel, DEFAULT_COST_SHOTS, DEFAULT_MEASURE_SHOTS,
};
use qfs_core::Result;

/// Depolarizing levels used by `--noisy` unless overridden.
pub const DEFAULT_P1: f64 = 0.001;
pub const DEFAULT_P2: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct VarSettings {
    pub depth: usize,
    pub iterations: usize,
    /// Drives `θ₀` and the SPSA perturbations.
    pub seed: u64,
    pub mode: TrainMode,
    pub cost_shots: u64,
    pub measure_shots: u64,
    pub noise: Option<NoiseSettings>,
}

impl VarSettings {
    pub fn exact(depth: usize, iterations: usize, seed: u64) -> Self {
        Self {
            depth,
            iterations,
            seed,
            mode: TrainMode::Exact,
            cost_shots: DEFAULT_COST_SHOTS,
            measure_shots: DEFAULT_MEASURE_SHOTS,
            noise: None,
        }
    }
}

pub fn noise_settings(p1: f64, p2: f64, mitigate: bool) -> Result<NoiseSettings> {
    Ok(NoiseSettings {
        model: NoiseModel::new(p1, p2)?,
        mitigate,
        pair: StretchPair::default(),
    })
}

/// Seed of one (dataset, depth) training run.
pub fn cell_seed(dataset_seed: u64, depth: usize) -> u64 {
    stream_id(dataset_seed, depth as u64)
}

/// Parity classifier with `θ₀` uniform on `(−π, π]`, trained by SPSA.
pub fn train_variational(ds: &Dataset, s: &VarSettings) -> Result<(VariationalModel, TrainReport)> {
    let ansatz = AnsatzSpec::with_default_edges(ds.n_qubits, s.depth);
    let theta0 = initial_theta(ansatz.parameter_count(), s.seed, 0);
    let model0 = VariationalModel::with_parity(ds.feature_map.clone(), ansatz, theta0)?;
    let cfg = TrainConfig {
        spsa: SpsaConfig {
            iterations: s.iterations,
            seed: s.seed,
            ..SpsaConfig::default()
        },
        mode: s.mode,
        cost_shots: s.cost_shots,
        measure_shots: s.measure_shots,
        noise: s.noise,
    };
    train(&model0, &ds.points, &ds.labels, &cfg)
}

/// Success rate on each of `draws` fresh test sets. `shots = None` uses
/// Born probabilities.
pub fn variational_test_success(
    model: &VariationalModel,
    ds: &Dataset,
    draws: u64,
    per_label: usize,
    shots: Option<u64>,
    seed: u64,
) -> Result<Vec<f64>> {
    (0..draws)
        .map(|k| {
            let t = ds.test_draw(k, per_label)?;
            let mode = match shots {
                Some(shots) => ProbMode::Shots {
                    shots,
                    seed,
                    stream: k,
                },
                None => ProbMode::Exact,
            };
            Ok(classify(model, &t.points, Some(&t.labels), mode)?
                .success
                .unwrap_or(0.0))
        })
        .collect()
}

pub fn fit_svm(
    ds: &Dataset,
    settings: &KernelSettings,
    c: f64,
) -> Result<(KernelMatrix, SvmTraining)> {
    let k = kernel_matrix(&ds.feature_map, &ds.points, settings)?;
    let fit = train_svm(
        &ds.feature_map,
        &ds.points,
        &ds.labels,
        &k.entries,
        c,
        &SmoOptions::default(),
    )?;
    Ok((k, fit))
}

/// Exact-kernel success rate on each of `draws` fresh test sets.
pub fn svm_test_success(
    model: &SvmModel,
    ds: &Dataset,
    draws: u64,
    per_label: usize,
) -> Result<Vec<f64>> {
    (0..draws)
        .map(|k| {
            let t = ds.test_draw(k, per_label)?;
            let d = svm_classify_batch(model, &t.points, &KernelSettings::exact())?;
            Ok(success_rate(&d, &t.labels).unwrap_or(0.0))
        })
        .collect()
}

pub fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.iter().sum::<f64>() / v.len() as f64
}
