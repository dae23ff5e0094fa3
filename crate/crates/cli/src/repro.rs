use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use qfs_core::datagen::{generate_dataset, Dataset};
use qfs_core::featuremap::FeatureMapSpec;
use qfs_core::kernelsvm::{hyperplane_overlap, KernelEstimator, KernelSettings, DEFAULT_C};
use qfs_core::varclass::{
    classify, ProbMode, DEFAULT_CLASSIFY_SHOTS, DEFAULT_COST_SHOTS, DEFAULT_MEASURE_SHOTS,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{parse_list, Resolver};
use crate::output::Output;
use crate::pipeline::{
    cell_seed, fit_svm, mean, svm_test_success, train_variational, variational_test_success,
    VarSettings,
};
use crate::{CliError, Context};

#[derive(Debug, Args)]
pub struct ReproArgs {
    /// Number of generated datasets (seeds seed, seed+1, ...).
    #[arg(long)]
    pub datasets: Option<usize>,
    #[arg(long)]
    pub depths: Option<String>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Test draws classified per trained model.
    #[arg(long)]
    pub test_draws: Option<u64>,
    /// Shots per entry of the sampled kernel used for the hyperplane overlap.
    #[arg(long)]
    pub kernel_shots: Option<u64>,
    #[arg(long)]
    pub classify_shots: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
struct VarCell {
    dataset_seed: u64,
    depth: usize,
    final_risk: Option<f64>,
    raw_risk: Option<f64>,
    mitigated_risk: Option<f64>,
    train_success: Option<f64>,
    test_success: Option<f64>,
    error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
struct SvmCell {
    dataset_seed: u64,
    support_vectors: Option<usize>,
    test_success: Option<f64>,
    sampled_test_success: Option<f64>,
    hyperplane_overlap: Option<f64>,
    error: Option<String>,
}

struct Budget {
    iterations: usize,
    test_draws: u64,
    kernel_shots: u64,
    classify_shots: u64,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn one_line(e: &dyn std::fmt::Display) -> String {
    e.to_string().replace([',', '\n'], ";")
}

pub fn repro(a: &ReproArgs, ctx: &Context, mut r: Resolver) -> Result<(), CliError> {
    let started = Instant::now();
    let n_sets = r.value("datasets", a.datasets, 3usize)?;
    let depths = parse_list(&r.value("depths", a.depths.clone(), "0,1,2,3,4".to_string())?)?;
    let b = Budget {
        iterations: r.value("iterations", a.iterations, if ctx.quick { 40 } else { 250 })?,
        test_draws: r.value("test_draws", a.test_draws, if ctx.quick { 2 } else { 20 })?,
        kernel_shots: r.value(
            "kernel_shots",
            a.kernel_shots,
            if ctx.quick { 5000 } else { 50_000 },
        )?,
        classify_shots: r.value(
            "classify_shots",
            a.classify_shots,
            if ctx.quick {
                2000
            } else {
                DEFAULT_CLASSIFY_SHOTS
            },
        )?,
    };
    let delta = r.value("delta", None, 0.3)?;
    let per_label = r.value("per_label", None, 20usize)?;
    if n_sets == 0 || b.kernel_shots == 0 || b.classify_shots == 0 {
        return Err(CliError::Usage(
            "datasets and shot counts must be at least 1".into(),
        ));
    }
    let noise = ctx.noise()?;
    let o = Output::new(ctx.out_dir.clone(), r.resolved())?;
    let spec = FeatureMapSpec::zz_default(2);

    let mut var_cells = vec![];
    let mut svm_cells = vec![];
    let mut traces = String::from(if ctx.mitigate {
        "dataset_seed,depth,iteration,risk,mitigated_risk\n"
    } else {
        "dataset_seed,depth,iteration,risk\n"
    });
    for k in 0..n_sets {
        let seed = ctx.seed + k as u64;
        let ds = match generate_dataset(seed, per_label, delta, &spec) {
            Ok(ds) => ds,
            Err(e) => {
                let msg = format!("dataset generation failed: {}", one_line(&e));
                for &depth in &depths {
                    var_cells.push(VarCell {
                        dataset_seed: seed,
                        depth,
                        final_risk: None,
                        raw_risk: None,
                        mitigated_risk: None,
                        train_success: None,
                        test_success: None,
                        error: Some(msg.clone()),
                    });
                }
                svm_cells.push(SvmCell {
                    dataset_seed: seed,
                    support_vectors: None,
                    test_success: None,
                    sampled_test_success: None,
                    hyperplane_overlap: None,
                    error: Some(msg),
                });
                continue;
            }
        };
        for &depth in &depths {
            let s = VarSettings {
                noise,
                cost_shots: DEFAULT_COST_SHOTS,
                measure_shots: DEFAULT_MEASURE_SHOTS,
                ..VarSettings::exact(depth, b.iterations, cell_seed(seed, depth))
            };
            let cell = var_cell(&ds, &s, &b, ctx.seed, &mut traces);
            eprintln!(
                "dataset {seed} depth {depth}: {}",
                match (&cell.error, cell.test_success) {
                    (Some(e), _) => format!("failed ({e})"),
                    (None, t) => format!("test success {:.4}", t.unwrap_or(f64::NAN)),
                }
            );
            var_cells.push(cell);
        }
        svm_cells.push(svm_cell(&ds, &b, ctx.seed));
    }

    let mut var_csv = String::from(
        "dataset_seed,depth,final_risk,raw_risk,mitigated_risk,train_success,test_success,error\n",
    );
    for c in &var_cells {
        var_csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            c.dataset_seed,
            c.depth,
            fmt_opt(c.final_risk),
            fmt_opt(c.raw_risk),
            fmt_opt(c.mitigated_risk),
            fmt_opt(c.train_success),
            fmt_opt(c.test_success),
            c.error.clone().unwrap_or_default()
        ));
    }
    let mut depth_csv =
        String::from("depth,mean_test_success,min_test_success,max_test_success,cells\n");
    let mut depth_rows = vec![];
    println!("depth  mean test success  (min, max)");
    for &depth in &depths {
        let v: Vec<f64> = var_cells
            .iter()
            .filter(|c| c.depth == depth)
            .filter_map(|c| c.test_success)
            .collect();
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        depth_csv.push_str(&format!("{depth},{},{lo},{hi},{}\n", mean(&v), v.len()));
        println!("{depth:>5}  {:>17.4}  ({lo:.4}, {hi:.4})", mean(&v));
        depth_rows.push(json!({"depth": depth, "mean_test_success": mean(&v), "cells": v.len()}));
    }
    let mut svm_csv = String::from(
        "dataset_seed,support_vectors,test_success,sampled_test_success,hyperplane_overlap,error\n",
    );
    for c in &svm_cells {
        svm_csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.dataset_seed,
            c.support_vectors.map(|n| n.to_string()).unwrap_or_default(),
            fmt_opt(c.test_success),
            fmt_opt(c.sampled_test_success),
            fmt_opt(c.hyperplane_overlap),
            c.error.clone().unwrap_or_default()
        ));
        println!(
            "kernel SVM, dataset {}: test success {}, hyperplane overlap (exact vs {} shots) {}",
            c.dataset_seed,
            c.test_success
                .map(|v| format!("{v:.4}"))
                .unwrap_or("-".into()),
            b.kernel_shots,
            c.hyperplane_overlap
                .map(|v| format!("{v:.4}"))
                .unwrap_or("-".into())
        );
    }
    o.write_csv(&PathBuf::from("repro_variational.csv"), &var_csv)?;
    o.write_csv(&PathBuf::from("repro_depths.csv"), &depth_csv)?;
    o.write_csv(&PathBuf::from("repro_svm.csv"), &svm_csv)?;
    o.write_csv(&PathBuf::from("repro_traces.csv"), &traces)?;
    let report = o.write_json(
        &PathBuf::from("repro_report.json"),
        json!({
            "variational": var_cells,
            "depths": depth_rows,
            "kernel_svm": svm_cells,
        }),
    )?;
    println!("wrote {} and the repro_*.csv tables", report.display());
    let budget = if ctx.quick { 300.0 } else { 3600.0 };
    println!(
        "elapsed {:.1} s (budget {budget:.0} s)",
        started.elapsed().as_secs_f64()
    );

    let failed = var_cells.iter().filter(|c| c.error.is_some()).count()
        + svm_cells.iter().filter(|c| c.error.is_some()).count();
    if failed > 0 {
        return Err(CliError::Partial(format!("{failed} cell(s) failed")));
    }
    Ok(())
}

fn var_cell(ds: &Dataset, s: &VarSettings, b: &Budget, seed: u64, traces: &mut String) -> VarCell {
    let mut cell = VarCell {
        dataset_seed: ds.seed,
        depth: s.depth,
        final_risk: None,
        raw_risk: None,
        mitigated_risk: None,
        train_success: None,
        test_success: None,
        error: None,
    };
    let run = || -> qfs_core::Result<_> {
        let (model, report) = train_variational(ds, s)?;
        let train = classify(&model, &ds.points, Some(&ds.labels), ProbMode::Exact)?.success;
        let tests = variational_test_success(
            &model,
            ds,
            b.test_draws,
            ds.per_label,
            Some(b.classify_shots),
            seed,
        )?;
        Ok((report, train, mean(&tests)))
    };
    match run() {
        Ok((report, train, test)) => {
            for (i, risk) in report.risk_trace.iter().enumerate() {
                traces.push_str(&format!("{},{},{i},{risk}", ds.seed, s.depth));
                if let Some(m) = &report.mitigated_trace {
                    traces.push_str(&format!(",{}", m[i]));
                }
                traces.push('\n');
            }
            cell.final_risk = Some(report.final_risk);
            if s.noise.is_some() {
                cell.raw_risk = report.risk_trace.last().copied();
                cell.mitigated_risk = report
                    .mitigated_trace
                    .as_ref()
                    .and_then(|m| m.last().copied());
            }
            cell.train_success = train;
            cell.test_success = Some(test);
        }
        Err(e) => cell.error = Some(one_line(&e)),
    }
    cell
}

fn svm_cell(ds: &Dataset, b: &Budget, seed: u64) -> SvmCell {
    let run = || -> qfs_core::Result<_> {
        let (_, exact) = fit_svm(ds, &KernelSettings::exact(), DEFAULT_C)?;
        let tests = svm_test_success(&exact.model, ds, b.test_draws, ds.per_label)?;
        let sampled_settings =
            KernelSettings::sampled(KernelEstimator::Shots, b.kernel_shots, seed);
        let (_, sampled) = fit_svm(ds, &sampled_settings, DEFAULT_C)?;
        let sampled_tests = svm_test_success(&sampled.model, ds, b.test_draws, ds.per_label)?;
        let overlap = hyperplane_overlap(&exact.model, &sampled.model)?;
        Ok((
            exact.model.len(),
            mean(&tests),
            mean(&sampled_tests),
            overlap,
        ))
    };
    match run() {
        Ok((n, t, st, ov)) => SvmCell {
            dataset_seed: ds.seed,
            support_vectors: Some(n),
            test_success: Some(t),
            sampled_test_success: Some(st),
            hyperplane_overlap: Some(ov),
            error: None,
        },
        Err(e) => SvmCell {
            dataset_seed: ds.seed,
            support_vectors: None,
            test_success: None,
            sampled_test_success: None,
            hyperplane_overlap: None,
            error: Some(one_line(&e)),
        },
    }
}
