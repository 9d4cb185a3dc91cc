//! calibrate-theta: baseline position counts by the method of simulated
//! moments, from a leaderboard CSV or from raw submissions (scored first).

use super::sig;
use crate::config::RunConfig;
use crate::ingest;
use crate::manifest::{emit, Manifest};
use anyhow::{bail, Context};
use ranklab_core::msm::{estimate_theta, MomentTarget};
use ranklab_core::scoring::ScoreBoard;
use std::path::PathBuf;

pub fn run(config: &RunConfig) -> anyhow::Result<PathBuf> {
    let mut manifest = Manifest::new("calibrate-theta", config.seed, config.desk_scale);
    let data = ingest::load_prices(config)?;
    let mut artifacts = Vec::new();

    // Per-interval IR cross-sections, either given or computed.
    let sections: Vec<Vec<f64>> = if let Some(path) = &config.leaderboard {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        ranklab_core::io::parse_leaderboard_csv(&text)?
    } else if config.submissions.is_some() {
        let subs = ingest::load_submissions(config, &data)?;
        // The moment match runs on the teams present from the start.
        let full = subs.full_period_teams();
        if full.len() < 4 {
            bail!("need at least 4 full-period teams for the moment match");
        }
        let board = ScoreBoard::new(&subs, &data.returns)?;
        artifacts.push(emit(&config.out, "leaderboard.csv", &board.to_leaderboard_csv())?);
        (0..data.returns.calendar().n_intervals())
            .map(|m| {
                let ir = board.interval_ir(m);
                full.iter().map(|&k| ir[k]).collect()
            })
            .collect()
    } else {
        bail!("calibrate-theta needs --leaderboard or --submissions");
    };
    if sections.len() != data.returns.calendar().n_intervals() {
        bail!(
            "leaderboard covers {} intervals but prices give {}",
            sections.len(),
            data.returns.calendar().n_intervals()
        );
    }
    let n_teams = sections[0].len();

    let target = MomentTarget::from_leaderboard(&sections)?;
    let estimate = estimate_theta(&target, &data.returns, n_teams, config.n_sim, config.seed)?;

    let theta_csv = format!(
        "n_plus,n_zero,n_minus,objective\n{},{},{},{}\n",
        estimate.theta.n_plus(),
        estimate.theta.n_zero(),
        estimate.theta.n_minus(),
        sig(estimate.objective)
    );
    artifacts.push(emit(&config.out, "theta_estimate.csv", &theta_csv)?);

    let mut surface = String::from("n_plus,n_zero,n_minus,objective\n");
    for (theta, obj) in &estimate.surface {
        surface.push_str(&format!(
            "{},{},{},{}\n",
            theta.n_plus(),
            theta.n_zero(),
            theta.n_minus(),
            if obj.is_finite() { sig(*obj) } else { "NaN".into() }
        ));
    }
    artifacts.push(emit(&config.out, "msm_surface.csv", &surface)?);

    manifest.record_written("calibrate-theta", artifacts);
    manifest.finalize(&config.out)
}
