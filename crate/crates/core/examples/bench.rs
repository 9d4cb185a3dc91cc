//! Scratch timings for the heavy Monte Carlo paths.

use ranklab_core::{market, msm, portfolio, scoring, sharpe_test};
use std::time::Instant;

fn recovery_pilot(k_teams: usize, n_sim: usize, seed: u64) {
    let model = market::MarketModel::competition_default(0.0).unwrap();
    let truth = portfolio::BaselineTheta::new(50, 20, 30).unwrap();
    let panel = market::sample_returns(&model, 240, seed).unwrap();
    let mut rng = ranklab_core::rng::rng_from(seed ^ 0xabcdef);
    let ret = sharpe_test::simulate_baseline_ret(&panel, &truth, k_teams, &mut rng);
    let board: Vec<Vec<f64>> = (0..12)
        .map(|m| {
            let days = panel.calendar().days(m);
            (0..k_teams)
                .map(|k| {
                    let series: Vec<f64> = days.clone().map(|t| ret[(t, k)].ln_1p()).collect();
                    scoring::ir(&series).unwrap()
                })
                .collect()
        })
        .collect();
    let target = msm::MomentTarget::from_leaderboard(&board).unwrap();
    let t0 = Instant::now();
    let est = msm::estimate_theta(&target, &panel, k_teams, n_sim, seed.wrapping_add(1)).unwrap();
    println!(
        "K={k_teams} n_sim={n_sim} seed={seed}: theta = ({}, {}, {}) in {:?} (obj {:.4})",
        est.theta.n_plus(),
        est.theta.n_zero(),
        est.theta.n_minus(),
        t0.elapsed(),
        est.objective
    );
}

fn main() {
    for seed in [11u64, 12, 13] {
        recovery_pilot(40, 1000, seed);
    }
    for seed in [11u64, 12] {
        recovery_pilot(80, 1000, seed);
    }
    recovery_pilot(163, 1000, 11);
}
