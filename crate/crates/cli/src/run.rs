//! Mode dispatch and report emission.

use std::path::Path;

use log::info;
use quasiopt::levy::{LevyExperiment, LevyOutcome};
use quasiopt::model::{draw_instance, Profiles};
use quasiopt::rng::derive_master;
use quasiopt::selection::{bin_efficiencies, select_all, EfficiencyHistogram, Method, SelectionReport};
use quasiopt::theory::{assumption_constants, theory_report};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::output::{replications_csv, write_histograms, OutputDir};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    artifact: &'static str,
    version: &'static str,
    mode: &'static str,
    master_seed: u64,
    replications: usize,
    config_sha256: String,
    outputs: Vec<String>,
    run_config: &'a RunConfig,
}

pub fn config_hash(cfg: &RunConfig) -> String {
    let digest = Sha256::digest(cfg.canonical_json().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Serialize)]
struct MethodSummary {
    median_efficiency: Option<f64>,
    mean_efficiency: Option<f64>,
    huge_fraction: f64,
}

fn summarize(values: &[f64], hist: &EfficiencyHistogram) -> MethodSummary {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    MethodSummary {
        median_efficiency: (k > 0).then(|| {
            if k % 2 == 1 {
                v[k / 2]
            } else {
                0.5 * (v[k / 2 - 1] + v[k / 2])
            }
        }),
        mean_efficiency: (k > 0).then(|| v.iter().sum::<f64>() / k as f64),
        huge_fraction: hist.huge_fraction(),
    }
}

fn method_tables(reports: &[&SelectionReport]) -> Result<(Vec<(Method, EfficiencyHistogram)>, Value), CliError> {
    let mut hists = Vec::new();
    let mut summary = serde_json::Map::new();
    for m in Method::ALL {
        let values: Vec<f64> = reports.iter().map(|r| r.efficiency.get(m)).collect();
        let h = bin_efficiencies(&values)?;
        summary.insert(m.name().into(), serde_json::to_value(summarize(&values, &h)).unwrap());
        hists.push((m, h));
    }
    Ok((hists, Value::Object(summary)))
}

/// Runs `cfg`, writing every output and the manifest under `out`.
/// Returns the names of the files written.
pub fn execute(cfg: &RunConfig, out: &Path) -> Result<Vec<String>, CliError> {
    cfg.validate()?;
    let mut dir = OutputDir::create(out)?;
    info!(
        "mode {} seed {} replications {}",
        cfg.mode.name(),
        cfg.master_seed,
        cfg.replications
    );
    match cfg.mode {
        Mode::SequenceSim => sequence_sim(cfg, &mut dir)?,
        Mode::TheoryReport => theory(cfg, &mut dir)?,
        Mode::CheckAssumptions => check_assumptions(cfg, &mut dir)?,
        Mode::LevyExperiment => levy(cfg, &mut dir)?,
    }
    let mut outputs = dir.written().to_vec();
    outputs.dedup();
    let manifest = Manifest {
        artifact: "quasiopt",
        version: VERSION,
        mode: cfg.mode.name(),
        master_seed: cfg.master_seed,
        replications: cfg.replications,
        config_sha256: config_hash(cfg),
        outputs,
        run_config: cfg,
    };
    dir.write_json("manifest.json", &manifest)?;
    Ok(dir.written().to_vec())
}

fn problem(cfg: &RunConfig) -> Result<(quasiopt::SpectralProblem, quasiopt::Subsampling), CliError> {
    let doc = cfg
        .problem
        .as_ref()
        .ok_or_else(|| CliError::Config("missing \"problem\"".into()))?;
    Ok(doc.build()?)
}

fn sequence_sim(cfg: &RunConfig, dir: &mut OutputDir) -> Result<(), CliError> {
    let (p, sub) = problem(cfg)?;
    let profiles = Profiles::compute(&p, &sub)?;
    let rules = cfg.rules();
    let master = derive_master(cfg.master_seed, "sequence/replication");
    let results: Vec<Result<SelectionReport, quasiopt::Error>> = (0..cfg.replications as u64)
        .into_par_iter()
        .map(|i| select_all(&draw_instance(&p, master, i), &sub, &profiles, &rules))
        .collect();
    info!("{} replications done", results.len());

    let reports: Vec<&SelectionReport> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
    let failures: Vec<Value> = results
        .iter()
        .enumerate()
        .filter_map(|(i, r)| {
            r.as_ref()
                .err()
                .map(|e| json!({"replication": i, "error": e.to_string()}))
        })
        .collect();
    dir.write(
        "replications.csv",
        &replications_csv(results.iter().enumerate().map(|(i, r)| (i, r.as_ref().ok())))?,
    )?;
    let (hists, methods) = method_tables(&reports)?;
    write_histograms(dir, &hists)?;
    dir.write_json("reports.json", &reports)?;
    dir.write_json(
        "summary.json",
        &json!({
            "mode": cfg.mode.name(),
            "replications": cfg.replications,
            "failures": failures.len(),
            "failed": failures,
            "n_sharp": quasiopt::selection::balance_index(&profiles.s[..sub.n()], &profiles.b[..sub.n()]).ok(),
            "methods": methods,
        }),
    )
}

fn theory(cfg: &RunConfig, dir: &mut OutputDir) -> Result<(), CliError> {
    let (p, sub) = problem(cfg)?;
    dir.write_json("theory.json", &theory_report(&p, &sub)?)
}

fn check_assumptions(cfg: &RunConfig, dir: &mut OutputDir) -> Result<(), CliError> {
    let (p, sub) = problem(cfg)?;
    let profiles = Profiles::compute(&p, &sub)?;
    let n = sub.n();
    let chi = sub.weights(&profiles);
    let c = assumption_constants(&profiles.s[..n], &profiles.b[..n], &chi)?;
    let report = json!({
        "c_s": c.c_s,
        "C_s": c.cap_c_s,
        "c_b": c.c_b,
        "C_b": c.cap_c_b,
        "c_chi": c.c_chi,
        "C_chi": c.cap_c_chi,
        "growth_decay_valid": c.growth_decay_valid,
        "weight_valid": c.weight_valid,
        "valid": c.valid(),
        "tail_resolved": p.tail_is_resolved(&profiles),
    });
    println!("{report}");
    dir.write_json("assumptions.json", &report)
}

fn levy(cfg: &RunConfig, dir: &mut OutputDir) -> Result<(), CliError> {
    let mut exp_cfg = cfg.experiment();
    if let Some(r) = cfg.rules {
        exp_cfg.kappa = r.kappa;
        exp_cfg.lepski_denominator = r.lepski_denominator;
    }
    let exp = LevyExperiment::new(exp_cfg)?;
    let outcome: LevyOutcome = exp.run(cfg.replications, cfg.master_seed)?;
    info!(
        "{} replications done, {} failed",
        outcome.replications.len(),
        outcome.failures()
    );
    dir.write(
        "replications.csv",
        &replications_csv(outcome.replications.iter().map(|r| (r.index, r.report.as_ref())))?,
    )?;
    let reports: Vec<&SelectionReport> = outcome.reports().collect();
    let (hists, methods) = method_tables(&reports)?;
    write_histograms(dir, &hists)?;

    let c = exp.config();
    let retained = c.retained();
    let admissible = c.admissible();
    let mut profile = String::from("n,cutoff,s_hat,retained,admissible\n");
    for (i, (&s, u)) in outcome.variance_profile.values.iter().zip(c.cutoffs()).enumerate() {
        let n = i + 1;
        profile.push_str(&format!(
            "{n},{u},{s},{},{}\n",
            u8::from(retained.contains(&n)),
            u8::from(admissible.contains(&n))
        ));
    }
    dir.write("variance_profile.csv", profile.as_bytes())?;
    dir.write_json("reports.json", &outcome.replications)?;
    let failed: Vec<Value> = outcome
        .replications
        .iter()
        .filter_map(|r| r.failure.as_ref().map(|e| json!({"replication": r.index, "error": e})))
        .collect();
    dir.write_json(
        "summary.json",
        &json!({
            "mode": cfg.mode.name(),
            "replications": cfg.replications,
            "failures": outcome.failures(),
            "failure_rate": outcome.failure_rate(),
            "failed": failed,
            "variance_profile": {
                "monotone_violations": outcome.variance_profile.monotone_violations,
                "sets_used": outcome.variance_profile.sets_used,
                "sets_failed": outcome.variance_profile.sets_failed,
            },
            "methods": methods,
        }),
    )
}
