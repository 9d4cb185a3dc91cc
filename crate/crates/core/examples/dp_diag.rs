//! Isolate the effect of the policy's gap observation convention:
//! (A) observe exact competition scores, rank by exact scores (production);
//! (B) observe additive scores, rank by exact scores;
//! (C) observe additive scores, rank by additive scores.

use ranklab_core::dp_policy::{build_kernel, default_delta_grid, solve, RankPolicy};
use ranklab_core::market::{sample_returns_with_rng, MarketModel};
use ranklab_core::portfolio::{fill_baseline, fill_rank_opt, BaselineTheta};
use ranklab_core::scoring::ir_from_sums;
use ranklab_core::{calendar::IntervalCalendar, rng};
use rayon::prelude::*;

const K: usize = 163;

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    ExactObsExactScore,
    AdditiveObsExactScore,
    AdditiveObsAdditiveScore,
}

fn qth_largest(values: &[f64], q: usize) -> f64 {
    let mut v = values.to_vec();
    v.select_nth_unstable_by(q - 1, |a, b| b.total_cmp(a));
    v[q - 1]
}

fn replay(policy: &RankPolicy, q: usize, n_reps: usize, seed: u64, mode: Mode) -> f64 {
    let model = MarketModel::competition_default(0.0).unwrap();
    let theta = BaselineTheta::new(38, 29, 33).unwrap();
    let calendar = IntervalCalendar::new(12, 20).unwrap();
    let n_opp = K - 1;

    let wins: usize = (0..n_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rng::stream_rng(seed, rng::DOMAIN_ARENA, rep as u64);
            let panel = sample_returns_with_rng(&model, calendar, &mut rng).unwrap();
            let returns = panel.returns();
            let mut w = vec![0.0; 100];

            // Opponent state: exact sums + additive cumulative.
            let mut opp_sum = vec![0.0f64; n_opp];
            let mut opp_sumsq = vec![0.0f64; n_opp];
            let mut opp_add = vec![0.0f64; n_opp];
            let mut own_sum = 0.0;
            let mut own_sumsq = 0.0;
            let mut own_add = 0.0;

            for m in 0..12 {
                let days = calendar.days(m);
                let delta = if m == 0 {
                    0.0
                } else {
                    match mode {
                        Mode::ExactObsExactScore => {
                            let own = ir_from_sums(20 * m, own_sum, own_sumsq)
                                .unwrap_or(f64::NEG_INFINITY);
                            let opp: Vec<f64> = (0..n_opp)
                                .map(|k| {
                                    ir_from_sums(20 * m, opp_sum[k], opp_sumsq[k])
                                        .unwrap_or(f64::NEG_INFINITY)
                                })
                                .collect();
                            own - qth_largest(&opp, q)
                        }
                        _ => own_add - qth_largest(&opp_add, q),
                    }
                };
                let beta = policy.act(m + 1, delta);
                fill_rank_opt(&mut w, beta, &mut rng).unwrap();
                let (mut s, mut ss) = (0.0, 0.0);
                for t in days.clone() {
                    let col = returns.column(t);
                    let mut acc = 0.0;
                    for (i, &wi) in w.iter().enumerate() {
                        acc += wi * col[i];
                    }
                    let lr = acc.ln_1p();
                    s += lr;
                    ss += lr * lr;
                    own_sum += lr;
                    own_sumsq += lr * lr;
                }
                own_add += ir_from_sums(20, s, ss).unwrap_or(0.0);

                for k in 0..n_opp {
                    fill_baseline(&mut w, &theta, &mut rng);
                    let (mut s, mut ss) = (0.0, 0.0);
                    for t in days.clone() {
                        let col = returns.column(t);
                        let mut acc = 0.0;
                        for (i, &wi) in w.iter().enumerate() {
                            if wi != 0.0 {
                                acc += wi * col[i];
                            }
                        }
                        let lr = acc.ln_1p();
                        s += lr;
                        ss += lr * lr;
                        opp_sum[k] += lr;
                        opp_sumsq[k] += lr * lr;
                    }
                    opp_add[k] += ir_from_sums(20, s, ss).unwrap_or(0.0);
                }
            }

            let (own_final, opp_final): (f64, Vec<f64>) = match mode {
                Mode::AdditiveObsAdditiveScore => (own_add, opp_add.clone()),
                _ => (
                    ir_from_sums(240, own_sum, own_sumsq).unwrap_or(f64::NEG_INFINITY),
                    (0..n_opp)
                        .map(|k| {
                            ir_from_sums(240, opp_sum[k], opp_sumsq[k])
                                .unwrap_or(f64::NEG_INFINITY)
                        })
                        .collect(),
                ),
            };
            let rank = 1 + opp_final.iter().filter(|&&x| x >= own_final).count();
            usize::from(rank <= q)
        })
        .sum();
    wins as f64 / n_reps as f64
}

fn main() {
    let model = MarketModel::competition_default(0.0).unwrap();
    let theta = BaselineTheta::new(38, 29, 33).unwrap();
    for q in [1usize, 20] {
        let kernel = build_kernel(&model, &theta, q, K, 12, 10_000, 20_240_331 ^ q as u64).unwrap();
        let policy = solve(&kernel, &default_delta_grid()).unwrap();
        println!("q = {q}: V_1(0) = {:.4}", policy.value_at(1, 0.0));
        for (label, mode) in [
            ("A exact-obs exact-score   ", Mode::ExactObsExactScore),
            ("B additive-obs exact-score", Mode::AdditiveObsExactScore),
            ("C additive-obs add-score  ", Mode::AdditiveObsAdditiveScore),
        ] {
            let p = replay(&policy, q, 10_000, 777 ^ q as u64, mode);
            println!("  {label}: P(rank <= {q}) = {p:.4}");
        }
    }
}
