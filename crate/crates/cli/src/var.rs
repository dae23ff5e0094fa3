use std::path::PathBuf;

use clap::Args;
use qfs_core::varclass::{
    classify, misclass_probability, refine_bias, ModelFile, ProbMode, TrainMode, VariationalModel,
    DEFAULT_CLASSIFY_SHOTS, DEFAULT_COST_SHOTS, DEFAULT_MEASURE_SHOTS,
};
use serde_json::json;

use crate::config::{parse_list, Resolver};
use crate::data::read_dataset;
use crate::output::{read_json, Output};
use crate::pipeline::{cell_seed, mean, train_variational, variational_test_success, VarSettings};
use crate::{CliError, Context};

#[derive(Debug, Args)]
pub struct TrainVarArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Entangler layers l.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Comma-separated depth sweep, e.g. `0,1,2,3,4`; overrides --depth.
    #[arg(long)]
    pub depths: Option<String>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// `exact` or `shots`.
    #[arg(long)]
    pub mode: Option<String>,
    /// R inside the sigmoid cost.
    #[arg(long)]
    pub cost_shots: Option<u64>,
    /// Shots per point and evaluation in shot mode.
    #[arg(long)]
    pub measure_shots: Option<u64>,
    /// Grid-search the bias after training.
    #[arg(long)]
    pub refine_bias: bool,
    /// Test draws per depth in a sweep.
    #[arg(long)]
    pub test_draws: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalVarArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Classify test draw k instead of the stored points.
    #[arg(long)]
    pub test_draw: Option<u64>,
    /// `exact` or `shots`.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn train_mode(s: &str) -> Result<TrainMode, CliError> {
    match s {
        "exact" => Ok(TrainMode::Exact),
        "shots" => Ok(TrainMode::Shots),
        other => Err(CliError::Usage(format!(
            "unknown mode `{other}` (exact | shots)"
        ))),
    }
}

pub fn train_var(a: &TrainVarArgs, ctx: &Context, mut r: Resolver) -> Result<(), CliError> {
    let data = r.required_path("data", a.data.clone())?;
    let depth = r.value("depth", a.depth, 2usize)?;
    let depths = match r.optional("depths", a.depths.clone())? {
        Some(list) => Some(parse_list(&list)?),
        None => None,
    };
    let iterations = r.value("iterations", a.iterations, if ctx.quick { 40 } else { 250 })?;
    let mode = train_mode(&r.value("mode", a.mode.clone(), "exact".to_string())?)?;
    let cost_shots = r.value("cost_shots", a.cost_shots, DEFAULT_COST_SHOTS)?;
    let measure_shots = r.value("measure_shots", a.measure_shots, DEFAULT_MEASURE_SHOTS)?;
    let refine = r.switch("refine_bias", a.refine_bias)?;
    let test_draws = r.value("test_draws", a.test_draws, if ctx.quick { 2 } else { 20 })?;
    let classify_shots = r.value("classify_shots", None, DEFAULT_CLASSIFY_SHOTS)?;
    let out = r.value("out", a.out.clone(), PathBuf::from("model_var.json"))?;
    let trace = r.value("trace", a.trace.clone(), PathBuf::from("risk_trace.csv"))?;
    if cost_shots == 0 || measure_shots == 0 {
        return Err(CliError::Usage("shot counts must be at least 1".into()));
    }
    let noise = ctx.noise()?;
    let ds = read_dataset(&data)?;
    let o = Output::new(ctx.out_dir.clone(), r.resolved())?;

    let settings = |depth: usize| VarSettings {
        depth,
        iterations,
        seed: cell_seed(ctx.seed, depth),
        mode,
        cost_shots,
        measure_shots,
        noise,
    };
    let run_one = |depth: usize, model_path: &PathBuf, trace_path: &PathBuf| {
        let s = settings(depth);
        let (mut model, report) = match train_variational(&ds, &s) {
            Ok(v) => v,
            Err(e) => {
                // keep an (empty) trace so the failure is visible on disk
                o.write_csv(trace_path, &format!("iteration,risk\n# aborted: {e}\n"))?;
                return Err(CliError::from(e));
            }
        };
        if refine {
            model = refine_bias(&model, &ds.points, &ds.labels, 200)?;
        }
        o.write_csv(trace_path, &report.to_csv())?;
        let training = json!({
            "dataset": data.display().to_string(),
            "depth": depth,
            "seed": s.seed,
            "theta0_distribution": "uniform(-pi, pi]",
            "report": report,
        });
        o.write_json(
            model_path,
            serde_json::to_value(model.to_file(Some(training))).expect("plain data"),
        )?;
        Ok::<_, CliError>((model, report))
    };

    match depths {
        None => {
            let (model, report) = run_one(depth, &out, &trace)?;
            let train_success =
                classify(&model, &ds.points, Some(&ds.labels), ProbMode::Exact)?.success;
            println!(
                "depth {depth}: final risk {:.4} after {} iterations ({} objective evaluations); exact training success {:.4}",
                report.final_risk,
                report.risk_trace.len() - 1,
                report.evaluations,
                train_success.unwrap_or(f64::NAN)
            );
            println!(
                "wrote {} and {}",
                o.path(&out).display(),
                o.path(&trace).display()
            );
        }
        Some(depths) => {
            let mut csv = String::from("depth,final_risk,train_success,mean_test_success,min_test_success,max_test_success\n");
            for &d in &depths {
                let model_path = PathBuf::from(format!("model_var_l{d}.json"));
                let trace_path = PathBuf::from(format!("risk_trace_l{d}.csv"));
                let (model, report) = run_one(d, &model_path, &trace_path)?;
                let train_success =
                    classify(&model, &ds.points, Some(&ds.labels), ProbMode::Exact)?
                        .success
                        .unwrap_or(f64::NAN);
                let tests = variational_test_success(
                    &model,
                    &ds,
                    test_draws,
                    ds.per_label,
                    Some(classify_shots),
                    ctx.seed,
                )?;
                let lo = tests.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = tests.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                csv.push_str(&format!(
                    "{d},{},{train_success},{},{lo},{hi}\n",
                    report.final_risk,
                    mean(&tests)
                ));
                println!(
                    "depth {d}: final risk {:.4}, train success {train_success:.4}, mean test success {:.4}",
                    report.final_risk,
                    mean(&tests)
                );
            }
            let path = o.write_csv(&PathBuf::from("depth_success.csv"), &csv)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

pub fn load_var_model(path: &std::path::Path) -> Result<VariationalModel, CliError> {
    let v = read_json(path)?;
    let file: ModelFile = serde_json::from_value(v)
        .map_err(|e| CliError::Compute(anyhow::anyhow!("{}: {e}", path.display())))?;
    Ok(VariationalModel::from_file(&file)?)
}

pub fn eval_var(a: &EvalVarArgs, ctx: &Context, mut r: Resolver) -> Result<(), CliError> {
    let model_path = r.required_path("model", a.model.clone())?;
    let data = r.required_path("data", a.data.clone())?;
    let test_draw = r.optional("test_draw", a.test_draw)?;
    let mode_name = r.value("mode", a.mode.clone(), "shots".to_string())?;
    let shots = r.value("shots", a.shots, DEFAULT_CLASSIFY_SHOTS)?;
    let out = r.value("out", a.out.clone(), PathBuf::from("eval_var.csv"))?;
    let cost_shots = r.value("cost_shots", None, DEFAULT_COST_SHOTS)?;
    let mode = match train_mode(&mode_name)? {
        TrainMode::Exact => ProbMode::Exact,
        TrainMode::Shots if shots == 0 => {
            return Err(CliError::Usage("--shots must be at least 1".into()))
        }
        TrainMode::Shots => ProbMode::Shots {
            shots,
            seed: ctx.seed,
            stream: 0,
        },
    };
    let noise = ctx.noise()?;
    let model = load_var_model(&model_path)?;
    let ds = read_dataset(&data)?;
    let set = match test_draw {
        Some(k) => ds.test_draw(k, ds.per_label)?,
        None => ds.clone(),
    };
    let o = Output::new(ctx.out_dir.clone(), r.resolved())?;

    let result = classify(&model, &set.points, Some(&set.labels), mode)?;
    let mut header: Vec<String> = (0..model.feature.data_dim())
        .map(|i| format!("x{i}"))
        .collect();
    header.extend(["label", "predicted", "p_plus", "p_true", "sigmoid_cost"].map(String::from));
    if noise.is_some() {
        header.push("p_plus_noisy".into());
        if ctx.mitigate {
            header.push("p_plus_mitigated".into());
        }
    }
    let mut csv = header.join(",") + "\n";
    for (i, x) in set.points.iter().enumerate() {
        let y = set.labels[i];
        let p = result.p_plus[i];
        let p_true = if y > 0 { p } else { 1.0 - p };
        let mut row: Vec<String> = x.iter().map(|c| c.to_string()).collect();
        row.push(y.to_string());
        row.push(result.labels[i].to_string());
        row.push(p.to_string());
        row.push(p_true.to_string());
        row.push(misclass_probability(p_true, cost_shots, model.bias, y).to_string());
        if let Some(n) = &noise {
            let np = model.noisy_p_plus(x, n)?;
            row.push(np.raw.to_string());
            if let Some(m) = np.mitigated {
                row.push(m.to_string());
            }
        }
        csv.push_str(&(row.join(",") + "\n"));
    }
    let path = o.write_csv(&out, &csv)?;
    let success = result.success.unwrap_or(f64::NAN);
    println!(
        "{} points, mode {mode_name}{}: success {success:.4}",
        set.len(),
        if matches!(mode, ProbMode::Shots { .. }) {
            format!(" ({shots} shots)")
        } else {
            String::new()
        }
    );
    println!("wrote {}", path.display());
    Ok(())
}
