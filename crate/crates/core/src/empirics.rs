//! Descriptive diagnostics of submitted portfolios: long-position shares,
//! skewness exposure, rank-change association, and the below/above-median
//! long-share comparison of top-rank probabilities.

use crate::error::{Error, Result};
use crate::io::SubmissionPanel;
use crate::market::ReturnPanel;
use crate::portfolio::WeightVector;
use crate::scoring::ScoreBoard;
use crate::stats;

/// Share of gross exposure held long: sum max(w, 0) / sum |w|.
pub fn beta_plus(w: &WeightVector) -> Result<f64> {
    let gross = w.gross();
    if gross <= 0.0 {
        return Err(Error::Degenerate("long share undefined at zero gross exposure".into()));
    }
    Ok(w.as_slice().iter().map(|x| x.max(0.0)).sum::<f64>() / gross)
}

/// Skewness exposure gamma = sum_i (w_i / sum|w|) * skew_i.
pub fn skew_exposure(w: &WeightVector, asset_skews: &[f64]) -> Result<f64> {
    if asset_skews.len() != w.len() {
        return Err(Error::Parameter(format!(
            "skew vector has length {} but weights have {}",
            asset_skews.len(),
            w.len()
        )));
    }
    let gross = w.gross();
    if gross <= 0.0 {
        return Err(Error::Degenerate("skew exposure undefined at zero gross exposure".into()));
    }
    Ok(w.as_slice().iter().zip(asset_skews).map(|(x, g)| x * g).sum::<f64>() / gross)
}

/// Per-(interval, team) exposures of a submission panel.
#[derive(Debug, Clone)]
pub struct TeamExposure {
    /// beta_plus[m][k]; NaN before a team's first active interval.
    pub beta_plus: Vec<Vec<f64>>,
    /// gamma[m][k]; NaN before a team's first active interval.
    pub gamma: Vec<Vec<f64>>,
    pub team_ids: Vec<String>,
}

impl TeamExposure {
    /// Mean long share of team `k` over intervals `m1..=m2`, skipping
    /// inactive intervals. NaN when the team was never active in the range.
    pub fn mean_beta_plus(&self, k: usize, m1: usize, m2: usize) -> f64 {
        let vals: Vec<f64> =
            (m1..=m2).map(|m| self.beta_plus[m][k]).filter(|x| x.is_finite()).collect();
        if vals.is_empty() {
            f64::NAN
        } else {
            stats::mean(&vals)
        }
    }
}

/// Computes long shares and skewness exposures for every (interval, team).
/// Asset skews are sample skewnesses of daily returns over the whole panel.
pub fn team_exposures(subs: &SubmissionPanel, panel: &ReturnPanel) -> Result<TeamExposure> {
    if subs.n_assets() != panel.n_assets() {
        return Err(Error::Parameter("submission and return panels disagree on assets".into()));
    }
    let skews: Vec<f64> = (0..panel.n_assets())
        .map(|a| {
            let xs: Vec<f64> = panel.returns().row(a).iter().copied().collect();
            stats::sample_skewness(&xs)
        })
        .collect::<Result<_>>()?;

    let m_count = subs.n_intervals();
    let k_count = subs.n_teams();
    let mut bp = vec![vec![f64::NAN; k_count]; m_count];
    let mut gm = vec![vec![f64::NAN; k_count]; m_count];
    for m in 0..m_count {
        for k in 0..k_count {
            if m < subs.first_active()[k] {
                continue;
            }
            let w = subs.team_weights(m, k);
            bp[m][k] = beta_plus(&w)?;
            gm[m][k] = skew_exposure(&w, &skews)?;
        }
    }
    Ok(TeamExposure { beta_plus: bp, gamma: gm, team_ids: subs.team_ids().to_vec() })
}

/// One bin of the |rank change| vs long-share profile.
#[derive(Debug, Clone, PartialEq)]
pub struct RankChangeBin {
    pub interval: usize,
    pub bin_low: f64,
    pub count: usize,
    pub mean_abs_change: f64,
    pub se: f64,
}

/// Absolute cumulative-rank changes |rank_{1:m-1} - rank_{1:m}| binned by the
/// team's long share in interval m (bin width 0.1). Transparent binned means
/// with standard errors stand in for smoothing curves.
pub fn rank_change_profile(board: &ScoreBoard, exposures: &TeamExposure) -> Vec<RankChangeBin> {
    let m_count = board.calendar().n_intervals();
    let mut out = Vec::new();
    for m in 1..m_count {
        let prev = crate::scoring::rank(&board.cumulative_ir(m - 1));
        let curr = crate::scoring::rank(&board.cumulative_ir(m));
        let mut bins: Vec<Vec<f64>> = vec![Vec::new(); 10];
        for k in 0..board.n_teams() {
            let beta = exposures.beta_plus[m][k];
            if !beta.is_finite() {
                continue;
            }
            let b = ((beta * 10.0).floor() as usize).min(9);
            let change = (prev[k] as f64 - curr[k] as f64).abs();
            bins[b].push(change);
        }
        for (b, xs) in bins.iter().enumerate() {
            if xs.is_empty() {
                continue;
            }
            let mean = stats::mean(xs);
            let se = if xs.len() > 1 {
                (stats::sample_variance(xs) / xs.len() as f64).sqrt()
            } else {
                0.0
            };
            out.push(RankChangeBin {
                interval: m + 1,
                bin_low: b as f64 / 10.0,
                count: xs.len(),
                mean_abs_change: mean,
                se,
            });
        }
    }
    out
}

/// One row of the below/above-median long-share table.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianSplitRow {
    pub period: String,
    /// IR of the equal-weighted long benchmark over the period.
    pub benchmark_ir: f64,
    /// Median of per-team mean long shares.
    pub median_beta: f64,
    /// P(rank <= q) within the below-median group, per requested q.
    pub below: Vec<f64>,
    /// P(rank <= q) within the above-median group, per requested q.
    pub above: Vec<f64>,
}

/// Builds the per-quarter and global comparison of top-rank probabilities
/// for teams below vs at-or-above the median mean long share. "Below" is a
/// strict inequality; ties at the median go to the above group.
pub fn median_split_table(
    exposures: &TeamExposure,
    board: &ScoreBoard,
    panel: &ReturnPanel,
    q_list: &[usize],
) -> Result<Vec<MedianSplitRow>> {
    let cal = *board.calendar();
    let mut periods: Vec<(String, usize, usize)> = Vec::new();
    for q in 0..cal.n_quarters() {
        periods.push((format!("q{}", q + 1), 3 * q, 3 * q + 2));
    }
    periods.push(("global".into(), 0, cal.n_intervals() - 1));

    let benchmark = equal_weight_long_series(panel);
    let mut rows = Vec::new();
    for (name, m1, m2) in periods {
        let days = cal.days_through(m1, m2);
        let ranks = board.ranks_window(days.start, days.end - 1);
        let betas: Vec<f64> =
            (0..board.n_teams()).map(|k| exposures.mean_beta_plus(k, m1, m2)).collect();
        let finite: Vec<f64> = betas.iter().copied().filter(|x| x.is_finite()).collect();
        if finite.is_empty() {
            return Err(Error::Degenerate(format!("no active teams in period {name}")));
        }
        let median = stats::quantile(&finite, 0.5);

        let below_idx: Vec<usize> = (0..board.n_teams())
            .filter(|&k| betas[k].is_finite() && betas[k] < median)
            .collect();
        let above_idx: Vec<usize> = (0..board.n_teams())
            .filter(|&k| betas[k].is_finite() && betas[k] >= median)
            .collect();

        let prob = |idx: &[usize], q: usize| -> f64 {
            if idx.is_empty() {
                return f64::NAN;
            }
            idx.iter().filter(|&&k| ranks[k] <= q).count() as f64 / idx.len() as f64
        };
        let below: Vec<f64> = q_list.iter().map(|&q| prob(&below_idx, q)).collect();
        let above: Vec<f64> = q_list.iter().map(|&q| prob(&above_idx, q)).collect();

        let bench_ir = crate::scoring::ir(&benchmark[days.clone()])
            .unwrap_or(f64::NEG_INFINITY);
        rows.push(MedianSplitRow { period: name, benchmark_ir: bench_ir, median_beta: median, below, above });
    }
    Ok(rows)
}

/// Daily log returns of the equal-weighted long portfolio (the benchmark
/// column of the median-split table).
fn equal_weight_long_series(panel: &ReturnPanel) -> Vec<f64> {
    let i = panel.n_assets() as f64;
    (0..panel.n_days())
        .map(|t| (panel.returns().column(t).sum() / i).ln_1p())
        .collect()
}
