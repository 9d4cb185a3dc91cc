//! test-sharpe: the joint equality test on ingested data, or the simulated
//! level study of its rejection rates.

use super::sig;
use crate::config::RunConfig;
use crate::ingest;
use crate::manifest::{emit, Manifest};
use anyhow::bail;
use ranklab_core::sharpe_test::{level_study, test_sharpe_equality, LevelStudy};
use std::path::PathBuf;

pub fn run(config: &RunConfig) -> anyhow::Result<PathBuf> {
    let mut manifest = Manifest::new("test-sharpe", config.seed, config.desk_scale);

    if config.level_study {
        let artifacts = run_level_study(config)?;
        manifest.record_written("level-study", artifacts);
        return manifest.finalize(&config.out);
    }

    if config.prices.is_none() || config.submissions.is_none() {
        bail!("test-sharpe needs --prices and --submissions (or --level-study)");
    }
    let data = ingest::load_prices(config)?;
    let subs = ingest::load_submissions(config, &data)?;
    let n_boot = config.boot.unwrap_or(1000);
    let report = test_sharpe_equality(
        &subs,
        &data.returns,
        None,
        n_boot,
        &config.alpha.0,
        config.seed,
    )?;

    let mut out = String::from("metric,value\n");
    out.push_str(&format!("t2,{}\n", sig(report.t2)));
    out.push_str(&format!("dof,{}\n", report.dof));
    out.push_str(&format!("p_asymptotic,{}\n", sig(report.p_asymptotic)));
    if let Some(p) = report.p_bootstrap {
        out.push_str(&format!("p_bootstrap,{}\n", sig(p)));
    }
    out.push_str(&format!("n_bootstrap,{}\n", report.n_bootstrap));
    out.push_str(&format!("bootstrap_redraws,{}\n", report.bootstrap_redraws));
    out.push_str(&format!(
        "merged_teams,{}\n",
        report.merged_teams.iter().map(|(_, dup)| dup.len()).sum::<usize>()
    ));
    let report_csv = emit(&config.out, "test_report.csv", &out)?;

    let mut rej = String::from("alpha,reject_asymptotic,reject_bootstrap\n");
    for (i, &(alpha, asy)) in report.alpha_rejections_asymptotic.iter().enumerate() {
        let boot = report
            .alpha_rejections_bootstrap
            .get(i)
            .map(|(_, b)| b.to_string())
            .unwrap_or_else(|| "".into());
        rej.push_str(&format!("{},{},{}\n", sig(alpha), asy, boot));
    }
    let rej_csv = emit(&config.out, "test_rejections.csv", &rej)?;

    // The headline p-value row.
    let p = report.p_bootstrap.unwrap_or(report.p_asymptotic);
    let pvalue_csv = emit(
        &config.out,
        "pvalue_table.csv",
        &format!("test,p_value\njoint Sharpe equality (wild bootstrap),{}\n", sig(p)),
    )?;

    manifest.record_written("test-sharpe", vec![report_csv, rej_csv, pvalue_csv]);
    manifest.finalize(&config.out)
}

fn run_level_study(config: &RunConfig) -> anyhow::Result<Vec<String>> {
    let model = config.market_model()?;
    let theta = config.baseline_theta()?;
    let (n_reps, n_boot) = if config.desk_scale {
        (config.reps.unwrap_or(200), config.boot.unwrap_or(100))
    } else {
        (config.reps.unwrap_or(1000), config.boot.unwrap_or(1000))
    };
    let k_values = [5usize, 50, 163];
    let study = level_study(
        &model,
        &theta,
        &k_values,
        n_reps,
        Some(n_boot),
        &config.alpha.0,
        config.intervals,
        config.seed,
    )?;

    let asy = emit(&config.out, "level_asymptotic.csv", &rates_table(&study, false))?;
    let boot = emit(&config.out, "level_bootstrap.csv", &rates_table(&study, true))?;
    Ok(vec![asy, boot])
}

fn rates_table(study: &LevelStudy, bootstrap: bool) -> String {
    let mut out = String::from("alpha");
    for k in &study.k_values {
        out.push_str(&format!(",k{k}"));
    }
    out.push('\n');
    let rates = if bootstrap {
        study.bootstrap_rates.as_ref().expect("bootstrap rates requested")
    } else {
        &study.asymptotic_rates
    };
    for (ai, &alpha) in study.alphas.iter().enumerate() {
        out.push_str(&sig(alpha));
        for ki in 0..study.k_values.len() {
            out.push_str(&format!(",{}", sig(rates[ki][ai])));
        }
        out.push('\n');
    }
    out
}
