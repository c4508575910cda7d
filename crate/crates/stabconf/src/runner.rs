//! Parallel experiment driver.
//!
//! Work is split into per-trial units whose randomness depends only on
//! `(base_seed, trial, role)`, and results are stored by trial index, so
//! outputs are byte-identical for any worker count.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use stabconf_core::sim::{
    ConcentrationConfig, ConcentrationTable, CoverageConfig, RateConfig, RateExperiment, Target, TrialReport,
};
use stabconf_core::Result as CoreResult;

use crate::config::{ExperimentConfig, SeedSource};
use crate::error::{CliError, CliResult};
use crate::format::{csv_num, human};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub base_seed: u64,
    pub seed_source: SeedSource,
    pub version: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Report {
    Coverage(TrialReport),
    Concentration(ConcentrationTable),
    Rate(RateExperiment),
}

/// Everything a run writes: JSON report, CSV table and a short summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: Report,
    pub provenance: Provenance,
    pub json: String,
    pub csv: String,
    pub summary: String,
}

fn pool(workers: usize) -> CliResult<rayon::ThreadPool> {
    if workers == 0 {
        return Err(CliError::config("workers", "must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::internal(e.to_string()))
}

fn par_indexed<T: Send>(count: usize, f: impl Fn(usize) -> CoreResult<T> + Sync + Send) -> CoreResult<Vec<T>> {
    (0..count).into_par_iter().map(f).collect()
}

pub fn coverage(cfg: &CoverageConfig) -> CoreResult<TrialReport> {
    cfg.validate()?;
    let pe = par_indexed(cfg.trials, |t| cfg.run_trial(t).map(|e| e.pe))?;
    TrialReport::assemble(cfg, pe)
}

pub fn concentration(cfg: &ConcentrationConfig) -> CoreResult<ConcentrationTable> {
    cfg.validate()?;
    let (expected, se) = if cfg.target == Target::Dkw {
        (cfg.reference_scores(), 0.0)
    } else {
        let aux = par_indexed(cfg.aux_trials(), |i| cfg.aux_coefficients(i))?;
        cfg.expected_coefficients(&aux)
    };
    let dev = par_indexed(cfg.trials, |t| cfg.trial_deviation(t, &expected))?;
    cfg.assemble(dev, se)
}

pub fn rate(cfg: &RateConfig) -> CoreResult<RateExperiment> {
    cfg.validate()?;
    let reports = cfg
        .n_list
        .iter()
        .map(|&n| coverage(&cfg.coverage_config(n)))
        .collect::<CoreResult<Vec<_>>>()?;
    cfg.assemble(&reports)
}

/// Runs `config` on `workers` threads. `seed` replaces the configured base
/// seed when given.
pub fn run(config: &ExperimentConfig, seed: Option<u64>, workers: usize) -> CliResult<RunOutput> {
    let config_hash = config.hash();
    let mut cfg = config.clone();
    let seed_source = match seed {
        Some(s) => {
            cfg.set_base_seed(s);
            SeedSource::Env
        }
        None => SeedSource::Config,
    };
    let provenance = Provenance {
        config_hash,
        base_seed: cfg.base_seed(),
        seed_source,
        version: env!("CARGO_PKG_VERSION"),
    };
    let report = pool(workers)?.install(|| -> CoreResult<Report> {
        Ok(match &cfg {
            ExperimentConfig::Coverage(c) => Report::Coverage(coverage(c)?),
            ExperimentConfig::Concentration(c) => Report::Concentration(concentration(c)?),
            ExperimentConfig::Rate(c) => Report::Rate(rate(c)?),
        })
    })?;
    let json = serde_json::to_string_pretty(&json!({
        "kind": cfg.kind(),
        "provenance": provenance,
        "report": report,
    }))
    .map_err(|e| CliError::internal(e.to_string()))?
        + "\n";
    let mut csv = format!(
        "# config_hash={} base_seed={} seed_source={}\n",
        provenance.config_hash,
        provenance.base_seed,
        match seed_source {
            SeedSource::Config => "config",
            SeedSource::Env => "env",
        }
    );
    csv.push_str(&table_csv(&report));
    let summary = summarize(&report);
    Ok(RunOutput {
        report,
        provenance,
        json,
        csv,
        summary,
    })
}

fn row(cells: &[String]) -> String {
    cells.join(",") + "\n"
}

pub fn table_csv(report: &Report) -> String {
    let mut out = String::new();
    match report {
        Report::Coverage(r) => {
            out.push_str("trial,pe\n");
            for (t, pe) in r.pe_values.iter().enumerate() {
                out.push_str(&row(&[t.to_string(), csv_num(*pe)]));
            }
        }
        Report::Concentration(t) => {
            out.push_str("eps,empirical,se,theoretical,vacuous\n");
            for r in &t.rows {
                out.push_str(&row(&[
                    csv_num(r.eps),
                    csv_num(r.empirical),
                    csv_num(r.se),
                    csv_num(r.theoretical.value),
                    r.theoretical.vacuous.to_string(),
                ]));
            }
        }
        Report::Rate(e) => {
            out.push_str(RateExperiment::CSV_HEADER);
            out.push('\n');
            for r in &e.rows {
                out.push_str(&row(&[
                    r.theory.n.to_string(),
                    csv_num(r.theory.ours_jplus),
                    csv_num(r.theory.ours_fc),
                    csv_num(r.theory.lb_slack),
                    csv_num(r.theory.lb_q),
                    csv_num(r.mean_pe),
                    csv_num(r.q95_pe),
                    csv_num(r.std_pe),
                    csv_num(r.spread),
                ]));
            }
        }
    }
    out
}

pub fn summarize(report: &Report) -> String {
    match report {
        Report::Coverage(r) => {
            let mut s = format!(
                "{} n={} alpha={} trials={}: mean miscoverage {} (se {}), std {}\n",
                r.method,
                r.n,
                human(r.alpha),
                r.trials,
                human(r.mean_pe),
                human(r.mean_se),
                human(r.std_pe)
            );
            for e in &r.exceedance {
                s += &format!("  P(pe > {}) = {} (se {})\n", human(e.threshold), human(e.fraction), human(e.se));
            }
            if let Some(b) = &r.bound {
                s += &format!(
                    "  {}: threshold {}, failure probability {}{}\n",
                    b.name,
                    human(b.threshold),
                    human(b.failure_prob),
                    if b.vacuous { " (vacuous)" } else { "" }
                );
            }
            s
        }
        Report::Concentration(t) => {
            let mut s = format!("{:?} n={} trials={}\n", t.target, t.n, t.trials).to_lowercase();
            for r in &t.rows {
                s += &format!(
                    "  eps {}: empirical {} (se {}) vs tail {}{}\n",
                    human(r.eps),
                    human(r.empirical),
                    human(r.se),
                    human(r.theoretical.value),
                    if r.theoretical.vacuous { " (vacuous)" } else { "" }
                );
            }
            s
        }
        Report::Rate(e) => {
            let mut s = String::from("n, jackknife+ slack, full slack, (m,n) slack, q95 of pe\n");
            for r in &e.rows {
                s += &format!(
                    "  {}: {} {} {} {}\n",
                    r.theory.n,
                    human(r.theory.ours_jplus),
                    human(r.theory.ours_fc),
                    human(r.theory.lb_slack),
                    human(r.q95_pe)
                );
            }
            if let Some(slope) = e.spread_slope {
                s += &format!("  log-log slope of pe spread: {}\n", human(slope));
            }
            s
        }
    }
}
