//! empirics: descriptive exposure diagnostics of submitted portfolios.

use super::sig;
use crate::config::RunConfig;
use crate::ingest;
use crate::manifest::{emit, Manifest};
use ranklab_core::empirics::{median_split_table, rank_change_profile, team_exposures};
use ranklab_core::scoring::ScoreBoard;
use std::path::PathBuf;

pub fn run(config: &RunConfig) -> anyhow::Result<PathBuf> {
    let mut manifest = Manifest::new("empirics", config.seed, config.desk_scale);
    let data = ingest::load_prices(config)?;
    let subs = ingest::load_submissions(config, &data)?;
    let board = ScoreBoard::new(&subs, &data.returns)?;
    let exposures = team_exposures(&subs, &data.returns)?;
    let mut artifacts = Vec::new();

    // Average long/short shares per submission interval.
    let mut by_interval = String::from("m,mean_beta_plus,mean_beta_minus,n_teams\n");
    for m in 0..subs.n_intervals() {
        let betas: Vec<f64> =
            exposures.beta_plus[m].iter().copied().filter(|x| x.is_finite()).collect();
        if betas.is_empty() {
            continue;
        }
        let mean = ranklab_core::stats::mean(&betas);
        by_interval.push_str(&format!(
            "{},{},{},{}\n",
            m + 1,
            sig(mean),
            sig(1.0 - mean),
            betas.len()
        ));
    }
    artifacts.push(emit(&config.out, "exposure_by_interval.csv", &by_interval)?);

    // Per-period rank against mean long share and skew exposure.
    let cal = *board.calendar();
    let mut periods: Vec<(String, usize, usize)> = (0..cal.n_quarters())
        .map(|q| (format!("q{}", q + 1), 3 * q, 3 * q + 2))
        .collect();
    periods.push(("global".into(), 0, cal.n_intervals() - 1));
    let mut rank_vs = String::from("period,team_id,rank,beta_bar,gamma_bar\n");
    for (name, m1, m2) in &periods {
        let days = cal.days_through(*m1, *m2);
        let ranks = board.ranks_window(days.start, days.end - 1);
        for (k, team) in subs.team_ids().iter().enumerate() {
            let beta_bar = exposures.mean_beta_plus(k, *m1, *m2);
            let gammas: Vec<f64> = (*m1..=*m2)
                .map(|m| exposures.gamma[m][k])
                .filter(|x| x.is_finite())
                .collect();
            if !beta_bar.is_finite() || gammas.is_empty() {
                continue;
            }
            let gamma_bar = ranklab_core::stats::mean(&gammas);
            rank_vs.push_str(&format!(
                "{},{},{},{},{}\n",
                name,
                team,
                ranks[k],
                sig(beta_bar),
                sig(gamma_bar)
            ));
        }
    }
    artifacts.push(emit(&config.out, "rank_vs_exposure.csv", &rank_vs)?);

    // Absolute rank changes binned by long share.
    let profile = rank_change_profile(&board, &exposures);
    let mut prof = String::from("m,bin_low,count,mean_abs_rank_change,se\n");
    for row in &profile {
        prof.push_str(&format!(
            "{},{},{},{},{}\n",
            row.interval,
            sig(row.bin_low),
            row.count,
            sig(row.mean_abs_change),
            sig(row.se)
        ));
    }
    artifacts.push(emit(&config.out, "rank_change_profile.csv", &prof)?);

    // Below/above-median long-share comparison.
    let split = median_split_table(&exposures, &board, &data.returns, &[5, 10])?;
    let mut table = String::from(
        "period,benchmark_ir,median_beta,p_below_q5,p_above_q5,p_below_q10,p_above_q10\n",
    );
    for row in &split {
        table.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.period,
            sig(row.benchmark_ir),
            sig(row.median_beta),
            sig(row.below[0]),
            sig(row.above[0]),
            sig(row.below[1]),
            sig(row.above[1])
        ));
    }
    artifacts.push(emit(&config.out, "median_split.csv", &table)?);

    manifest.record_written("empirics", artifacts);
    manifest.finalize(&config.out)
}
