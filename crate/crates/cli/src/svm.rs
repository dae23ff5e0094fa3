use std::path::PathBuf;

use clap::Args;
use qfs_core::kernelsvm::{
    kernel_matrix, psd_project, svm_classify_batch, train_svm as fit, KernelEstimator,
    KernelMatrix, KernelSettings, SmoOptions, SvmModel, DEFAULT_C,
};
use qfs_core::mitigation::StretchPair;
use serde_json::json;

use crate::config::Resolver;
use crate::data::read_dataset;
use crate::output::{read_json, Output};
use crate::{CliError, Context};

/// Default shots per kernel entry.
pub const DEFAULT_KERNEL_SHOTS: u64 = 50_000;

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    /// `exact`, `shots`, `swap` or `classical`.
    #[arg(long)]
    pub estimator: Option<String>,
    /// Shots per kernel entry.
    #[arg(long, alias = "R")]
    pub shots: Option<u64>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub est: EstimatorArgs,
    /// Also write the nearest PSD matrix of the estimate.
    #[arg(long)]
    pub psd: bool,
    /// File name prefix for the CSV outputs.
    #[arg(long)]
    pub prefix: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainSvmArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub est: EstimatorArgs,
    /// Box bound C.
    #[arg(long)]
    pub c: Option<f64>,
    /// Project the estimated kernel onto the PSD cone before solving.
    #[arg(long)]
    pub psd: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalSvmArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Classify test draw k instead of the stored points.
    #[arg(long)]
    pub test_draw: Option<u64>,
    #[command(flatten)]
    pub est: EstimatorArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn estimator(name: &str) -> Result<KernelEstimator, CliError> {
    Ok(match name {
        "exact" => KernelEstimator::Exact,
        "shots" => KernelEstimator::Shots,
        "swap" => KernelEstimator::SwapTest,
        "classical" => KernelEstimator::Classical,
        other => {
            return Err(CliError::Usage(format!(
                "unknown estimator `{other}` (exact | shots | swap | classical)"
            )))
        }
    })
}

fn settings(
    a: &EstimatorArgs,
    default_estimator: &str,
    ctx: &Context,
    r: &mut Resolver,
) -> Result<KernelSettings, CliError> {
    let est = estimator(&r.value(
        "estimator",
        a.estimator.clone(),
        default_estimator.to_string(),
    )?)?;
    let default_shots = if ctx.quick {
        5000
    } else {
        DEFAULT_KERNEL_SHOTS
    };
    let shots = r.value("shots", a.shots, default_shots)?;
    if est != KernelEstimator::Exact && shots == 0 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    let noise = ctx.noise()?;
    if noise.is_some() && matches!(est, KernelEstimator::SwapTest | KernelEstimator::Classical) {
        return Err(CliError::Usage(
            "--noisy applies to the exact and shots estimators only".into(),
        ));
    }
    Ok(KernelSettings {
        estimator: est,
        shots: if est == KernelEstimator::Exact {
            0
        } else {
            shots
        },
        seed: ctx.seed,
        noise: noise.map(|n| n.model),
        mitigate: ctx.mitigate.then(StretchPair::default),
    })
}

pub fn kernel(a: &KernelArgs, ctx: &Context, mut r: Resolver) -> Result<(), CliError> {
    let data = r.required_path("data", a.data.clone())?;
    let s = settings(&a.est, "shots", ctx, &mut r)?;
    let psd = r.switch("psd", a.psd)?;
    let prefix = r.value("prefix", a.prefix.clone(), "kernel".to_string())?;
    let ds = read_dataset(&data)?;
    let o = Output::new(ctx.out_dir.clone(), r.resolved())?;

    let exact = kernel_matrix(&ds.feature_map, &ds.points, &KernelSettings::exact())?;
    let est = kernel_matrix(&ds.feature_map, &ds.points, &s)?;
    let (dev, row) = est.max_deviation(&exact)?;
    let summary = vec![
        format!("max_deviation: {dev}"),
        format!("max_deviation_row: {row}"),
        format!("min_eigenvalue: {}", est.min_eigenvalue()?),
    ];
    let p_exact = o.write_csv(
        &PathBuf::from(format!("{prefix}_exact.csv")),
        &exact.to_csv(&[]),
    )?;
    let name = format!("{prefix}_{}.csv", s.estimator.name());
    let p_est = o.write_csv(&PathBuf::from(name), &est.to_csv(&summary))?;
    println!("wrote {} and {}", p_exact.display(), p_est.display());
    println!(
        "{} estimator, {} entries estimated: max |K_est - K_exact| = {dev:.5} in row {row}",
        s.estimator.name(),
        qfs_core::kernelsvm::estimation_count(ds.len())
    );
    if psd {
        let p = psd_project(&est.entries, est.size)?;
        let projected = KernelMatrix::from_entries(est.size, symmetrize(p.matrix, est.size), s)?;
        let note = vec![format!("negative_weight: {}", p.negative_weight)];
        let path = o.write_csv(
            &PathBuf::from(format!("{prefix}_psd.csv")),
            &projected.to_csv(&note),
        )?;
        println!(
            "negative eigenvalue weight {:.5}; wrote {}",
            p.negative_weight,
            path.display()
        );
    }
    Ok(())
}

/// Removes round-off asymmetry from a reconstructed matrix.
fn symmetrize(mut m: Vec<f64>, n: usize) -> Vec<f64> {
    for i in 0..n {
        for j in i + 1..n {
            let v = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}

pub fn train_svm(a: &TrainSvmArgs, ctx: &Context, mut r: Resolver) -> Result<(), CliError> {
    let data = r.required_path("data", a.data.clone())?;
    let s = settings(&a.est, "exact", ctx, &mut r)?;
    let c = r.value("c", a.c, DEFAULT_C)?;
    let psd = r.switch("psd", a.psd)?;
    let out = r.value("out", a.out.clone(), PathBuf::from("model_svm.json"))?;
    if !(c.is_finite() && c > 0.0) {
        return Err(CliError::Usage(format!("--c must be positive, got {c}")));
    }
    let ds = read_dataset(&data)?;
    let o = Output::new(ctx.out_dir.clone(), r.resolved())?;

    let mut k = kernel_matrix(&ds.feature_map, &ds.points, &s)?;
    let mut negative_weight = None;
    if psd {
        let p = psd_project(&k.entries, k.size)?;
        negative_weight = Some(p.negative_weight);
        k = KernelMatrix::from_entries(k.size, symmetrize(p.matrix, k.size), s)?;
    }
    let trained = fit(
        &ds.feature_map,
        &ds.points,
        &ds.labels,
        &k.entries,
        c,
        &SmoOptions::default(),
    )?;
    let t = ds.len();
    let margin_violations = (0..t)
        .filter(|&i| {
            let f: f64 = (0..t)
                .map(|j| ds.labels[j] as f64 * trained.dual.alpha[j] * k.get(j, i))
                .sum::<f64>()
                + trained.model.bias;
            (ds.labels[i] as f64) * f < 1.0 - 1e-6
        })
        .count();
    let body = json!({
        "model": trained.model,
        "dual": {
            "objective": trained.dual.objective,
            "iterations": trained.dual.iterations,
            "kkt_residual": trained.dual.kkt_residual,
            "converged": trained.dual.converged,
            "non_psd": trained.dual.non_psd,
        },
        "bias_estimate": trained.bias,
        "psd_negative_weight": negative_weight,
        "margin_violations": margin_violations,
    });
    let path = o.write_json(&out, body)?;
    print!("{}", trained.model.support_table());
    println!(
        "{} support vectors, L_D = {:.6}, {margin_violations} training points inside the unit margin",
        trained.model.len(),
        trained.dual.objective
    );
    println!("wrote {}", path.display());
    if !trained.dual.converged {
        return Err(CliError::Compute(anyhow::anyhow!(
            "SMO stopped at the iteration cap (KKT residual {:e})",
            trained.dual.kkt_residual
        )));
    }
    Ok(())
}

pub fn load_svm_model(path: &std::path::Path) -> Result<SvmModel, CliError> {
    let mut v = read_json(path)?;
    let model = v
        .get_mut("model")
        .map(serde_json::Value::take)
        .ok_or_else(|| CliError::Compute(anyhow::anyhow!("{}: no `model` key", path.display())))?;
    serde_json::from_value(model)
        .map_err(|e| CliError::Compute(anyhow::anyhow!("{}: {e}", path.display())))
}

pub fn eval_svm(a: &EvalSvmArgs, ctx: &Context, mut r: Resolver) -> Result<(), CliError> {
    let model_path = r.required_path("model", a.model.clone())?;
    let data = r.required_path("data", a.data.clone())?;
    let test_draw = r.optional("test_draw", a.test_draw)?;
    let s = settings(&a.est, "exact", ctx, &mut r)?;
    let out = r.value("out", a.out.clone(), PathBuf::from("eval_svm.csv"))?;
    let model = load_svm_model(&model_path)?;
    let ds = read_dataset(&data)?;
    let set = match test_draw {
        Some(k) => ds.test_draw(k, ds.per_label)?,
        None => ds,
    };
    let o = Output::new(ctx.out_dir.clone(), r.resolved())?;

    let decisions = svm_classify_batch(&model, &set.points, &s)?;
    let mut csv = String::from("index,label,predicted,decision_value,margin,zero\n");
    let mut wrong = vec![];
    for (i, (d, &y)) in decisions.iter().zip(&set.labels).enumerate() {
        let margin = y as f64 * d.value;
        csv.push_str(&format!(
            "{i},{y},{},{},{margin},{}\n",
            d.label, d.value, d.zero
        ));
        if d.label != y {
            wrong.push((i, margin));
        }
    }
    let path = o.write_csv(&out, &csv)?;
    let success = 1.0 - wrong.len() as f64 / set.len().max(1) as f64;
    println!(
        "{} points, {} estimator: success {success:.4}",
        set.len(),
        s.estimator.name()
    );
    for (i, m) in &wrong {
        println!("misclassified point {i}: y * decision value = {m:.3}");
    }
    println!("wrote {}", path.display());
    Ok(())
}
