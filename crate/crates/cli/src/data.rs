use std::path::PathBuf;

use clap::Args;
use qfs_core::datagen::{generate_dataset, load_dataset, Dataset};
use qfs_core::featuremap::FeatureMapSpec;
use serde_json::Value;

use crate::config::Resolver;
use crate::output::{io_err, Output};
use crate::{CliError, Context};

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Label gap Δ in [0, 1).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub per_label: Option<usize>,
    #[arg(long)]
    pub n_qubits: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn gen_data(a: &GenDataArgs, ctx: &Context, mut r: Resolver) -> Result<(), CliError> {
    let delta = r.value("delta", a.delta, 0.3)?;
    let per_label = r.value("per_label", a.per_label, 20usize)?;
    let n = r.value("n_qubits", a.n_qubits, 2usize)?;
    let out = r.required_path("out", a.out.clone())?;
    if !(0.0..1.0).contains(&delta) {
        return Err(CliError::Usage(format!(
            "--delta must lie in [0, 1), got {delta}"
        )));
    }
    if per_label == 0 {
        return Err(CliError::Usage("--per-label must be at least 1".into()));
    }
    if n == 0 || n > 10 {
        return Err(CliError::Usage(format!(
            "--n-qubits must lie in 1..=10, got {n}"
        )));
    }
    let ds = generate_dataset(ctx.seed, per_label, delta, &FeatureMapSpec::zz_default(n))?;
    let o = Output::new(ctx.out_dir.clone(), r.resolved())?;
    let path = o.path(&out);
    write_dataset(&ds, &path, &o.config)?;
    println!(
        "wrote {} ({} points: {} labelled +1, {} labelled -1; min margin {:.4}; {} attempts)",
        path.display(),
        ds.len(),
        ds.count_label(1),
        ds.count_label(-1),
        ds.min_margin()?,
        ds.provenance.attempts
    );
    Ok(())
}

/// Dataset JSON with the tool version and config added at the top level.
pub fn write_dataset(ds: &Dataset, path: &std::path::Path, config: &Value) -> Result<(), CliError> {
    let mut v: Value =
        serde_json::from_str(&ds.to_json()?).map_err(|e| CliError::Compute(e.into()))?;
    let obj = v.as_object_mut().expect("dataset serializes as an object");
    obj.insert("tool".into(), Value::from(crate::output::tool()));
    obj.insert("config".into(), config.clone());
    let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Compute(e.into()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn read_dataset(path: &std::path::Path) -> Result<Dataset, CliError> {
    load_dataset(path).map_err(|e| CliError::Compute(anyhow::anyhow!("{}: {e}", path.display())))
}
