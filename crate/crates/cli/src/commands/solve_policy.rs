//! solve-policy: simulate the transition kernel and run backward induction.

use super::sig;
use crate::config::RunConfig;
use crate::manifest::{emit, Manifest};
use ranklab_core::dp_policy::{build_kernel, default_delta_grid, solve};
use ranklab_core::stats;
use std::path::PathBuf;

pub fn run(config: &RunConfig) -> anyhow::Result<PathBuf> {
    let mut manifest = Manifest::new("solve-policy", config.seed, config.desk_scale);
    let model = config.market_model()?;
    let theta = config.baseline_theta()?;
    let n_paths = if config.desk_scale { config.paths.min(2000) } else { config.paths };

    let kernel = build_kernel(&model, &theta, config.q, config.k, 12, n_paths, config.seed)?;
    let policy = solve(&kernel, &default_delta_grid())?;

    let policy_csv = emit(
        &config.out,
        &format!("policy_q{}.csv", config.q),
        &policy.to_csv_string(),
    )?;

    // Kernel diagnostics: per (stage, action) increment mean and sd.
    let mut diag = String::from("m,beta_plus,mean_increment,sd_increment\n");
    for m in 0..kernel.n_stages() {
        for (bi, &beta) in kernel.betas().iter().enumerate() {
            let cell = kernel.cell(m, bi);
            diag.push_str(&format!(
                "{},{},{},{}\n",
                m + 1,
                sig(beta),
                sig(stats::mean(cell)),
                sig(stats::sample_variance(cell).sqrt())
            ));
        }
    }
    let diag_csv = emit(&config.out, &format!("kernel_q{}_summary.csv", config.q), &diag)?;

    manifest.record_written("solve-policy", vec![policy_csv, diag_csv]);
    manifest.finalize(&config.out)
}
