//! Diagnose the moment-matching objective: per-interval components at the
//! true theta vs a spurious argmin candidate.

use ranklab_core::{market, msm, portfolio, rng, scoring, sharpe_test};

fn main() {
    let k_teams = 80;
    let seed = 11u64;
    let model = market::MarketModel::competition_default(0.0).unwrap();
    let truth = portfolio::BaselineTheta::new(50, 20, 30).unwrap();
    let panel = market::sample_returns(&model, 240, seed).unwrap();
    let mut obs_rng = rng::rng_from(seed ^ 0xabcdef);
    let ret = sharpe_test::simulate_baseline_ret(&panel, &truth, k_teams, &mut obs_rng);
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
    let est_seed = seed.wrapping_add(1);

    for (label, theta) in [
        ("truth (50,20,30)", portfolio::BaselineTheta::new(50, 20, 30).unwrap()),
        ("argmin (17,75,8)", portfolio::BaselineTheta::new(17, 75, 8).unwrap()),
    ] {
        println!("== {label}");
        let (mut c1_sum, mut c2_sum) = (0.0, 0.0);
        for m in 0..12 {
            let d = msm::simulate_moment_dist(&theta, &panel, m, k_teams, 1000, est_seed).unwrap();
            let c1 = ((target.g1[m] - d.mu_g1).powi(2) - d.var_g1) / d.var_g1.sqrt();
            let c2 = ((target.g2[m] - d.mu_g2).powi(2) - d.var_g2) / d.var_g2.sqrt();
            c1_sum += c1;
            c2_sum += c2;
            println!(
                "  m{:<2} obs_g1 {:+.3} mu_g1 {:+.3} sd_g1 {:.3} c1 {:+.3} | obs_g2 {:.3} mu_g2 {:.3} sd_g2 {:.3} c2 {:+.3}",
                m + 1,
                target.g1[m],
                d.mu_g1,
                d.var_g1.sqrt(),
                c1,
                target.g2[m],
                d.mu_g2,
                d.var_g2.sqrt(),
                c2
            );
        }
        let (c1_bar, c2_bar) = (c1_sum / 12.0, c2_sum / 12.0);
        println!("  avg c1 {c1_bar:+.4} avg c2 {c2_bar:+.4} objective {:.5}", c1_bar * c1_bar + c2_bar * c2_bar);
    }
}
