//! run-arena: tournament Monte Carlo with a chosen focal strategy.

use super::sig;
use crate::config::{ArenaEnv, FocalKind, RunConfig};
use crate::ingest;
use crate::manifest::{emit, Manifest};
use anyhow::{bail, Context};
use ranklab_core::arena::{run_bootstrap, run_stylized, ArenaConfig, ArenaReport, FocalStrategy};
use ranklab_core::dp_policy::RankPolicy;
use std::path::PathBuf;

pub fn run(config: &RunConfig) -> anyhow::Result<PathBuf> {
    let mut manifest = Manifest::new("run-arena", config.seed, config.desk_scale);
    let strategy = focal_strategy(config)?;

    let default_reps = match (config.env, config.desk_scale) {
        (ArenaEnv::Stylized, false) => 100_000,
        (ArenaEnv::Stylized, true) => 2_000,
        (ArenaEnv::Bootstrap, false) => 10_000,
        (ArenaEnv::Bootstrap, true) => 1_000,
    };
    let arena_config =
        ArenaConfig::new(config.k, config.reps.unwrap_or(default_reps), config.seed)?;

    let report = match config.env {
        ArenaEnv::Stylized => {
            let model = config.market_model()?;
            let theta = config.baseline_theta()?;
            run_stylized(&arena_config, &model, &theta, &strategy)?
        }
        ArenaEnv::Bootstrap => {
            let data = ingest::load_prices(config)?;
            let subs = ingest::load_submissions(config, &data)?;
            run_bootstrap(&arena_config, &data.returns, &subs, &strategy)?
        }
    };

    let artifacts = write_report(config, &report, "arena")?;
    manifest.record_written("run-arena", artifacts);
    manifest.finalize(&config.out)
}

/// Builds the focal strategy from the flags (loading a policy when needed).
pub fn focal_strategy(config: &RunConfig) -> anyhow::Result<FocalStrategy> {
    Ok(match config.focal {
        FocalKind::Baseline => FocalStrategy::Baseline,
        FocalKind::Tangency => FocalStrategy::Tangency { lambda: config.lambda },
        FocalKind::Bootstrapped => FocalStrategy::Bootstrapped,
        FocalKind::RankOpt => {
            let Some(path) = &config.policy else {
                bail!("--focal rank-opt needs --policy (from solve-policy)");
            };
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            FocalStrategy::RankOpt(RankPolicy::from_csv_str(config.q, &text)?)
        }
    })
}

/// Emits the report table and rank histogram; returns the artifact names.
pub fn write_report(
    config: &RunConfig,
    report: &ArenaReport,
    prefix: &str,
) -> anyhow::Result<Vec<String>> {
    let mut out = String::from("metric,value\n");
    out.push_str(&format!("n_reps,{}\n", report.n_reps));
    out.push_str(&format!("mean_ir,{}\n", sig(report.mean_ir)));
    out.push_str(&format!("mean_beta_plus,{}\n", sig(report.mean_beta_plus)));
    for &(q, p) in &report.prob_rank_leq {
        out.push_str(&format!("p_rank_leq_{q},{}\n", sig(p)));
    }
    for (qi, p) in report.quarterly_top3.iter().enumerate() {
        out.push_str(&format!("p_quarter{}_top3,{}\n", qi + 1, sig(*p)));
    }
    let report_csv = emit(&config.out, &format!("{prefix}_report.csv"), &out)?;

    let mut histogram = String::from("rank,count\n");
    for (r, c) in report.rank_histogram.iter().enumerate() {
        histogram.push_str(&format!("{},{}\n", r + 1, c));
    }
    let hist_csv = emit(&config.out, &format!("{prefix}_rank_histogram.csv"), &histogram)?;
    Ok(vec![report_csv, hist_csv])
}
