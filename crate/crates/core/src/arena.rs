//! Full-tournament Monte Carlo in two environments:
//!
//! - stylized: fresh market draws with a field of baseline opponents;
//! - bootstrap: observed interval returns resampled with replacement, with
//!   opponents drawing real submitted weight vectors for the corresponding
//!   source interval.
//!
//! The focal team plays one of the strategy families. Policy-driven focal
//! teams observe the gap to the q-th ranked competitor from exact
//! cumulative competition scores at each submission boundary. Reported
//! statistics: mean full-horizon IR, mean long share, rank-threshold
//! probabilities, the full rank histogram, and quarterly top-3 rates.

use crate::calendar::IntervalCalendar;
use crate::dp_policy::RankPolicy;
use crate::error::{Error, Result};
use crate::io::SubmissionPanel;
use crate::market::{sample_returns_with_rng, MarketModel, ReturnPanel};
use crate::portfolio::{fill_baseline, fill_rank_opt, BaselineTheta, TangencyEngine};
use crate::rng;
use crate::scoring::ir_from_sums;
use crate::stats;
use rand::Rng;
use rayon::prelude::*;

/// Focal-team behavior.
#[derive(Debug, Clone)]
pub enum FocalStrategy {
    /// Same random ternary portfolio as the opponents.
    Baseline,
    /// Mean-variance tangency weights; `lambda > 0` grants the focal team
    /// the realized predictable return sums (and simulates the market with
    /// that predictability share).
    Tangency { lambda: f64 },
    /// Rank-optimization policy, acting on the observed gap.
    RankOpt(RankPolicy),
    /// Drawn from the real submission pool like the opponents
    /// (bootstrap environment only).
    Bootstrapped,
}

/// Replication setup shared by both environments.
#[derive(Debug, Clone)]
pub struct ArenaConfig {
    pub k_teams: usize,
    pub n_reps: usize,
    pub seed: u64,
    /// Rank thresholds q' for the reported P(rank <= q') map.
    pub rank_thresholds: Vec<usize>,
}

impl ArenaConfig {
    pub fn new(k_teams: usize, n_reps: usize, seed: u64) -> Result<Self> {
        if k_teams < 2 {
            return Err(Error::Parameter("arena needs at least 2 teams".into()));
        }
        if n_reps == 0 {
            return Err(Error::Parameter("arena needs at least one replication".into()));
        }
        Ok(Self { k_teams, n_reps, seed, rank_thresholds: vec![1, 5, 10, 20] })
    }

    pub fn with_thresholds(mut self, thresholds: Vec<usize>) -> Self {
        self.rank_thresholds = thresholds;
        self
    }
}

/// Aggregated focal-team outcomes.
#[derive(Debug, Clone)]
pub struct ArenaReport {
    pub n_reps: usize,
    /// Mean full-horizon competition IR of the focal team.
    pub mean_ir: f64,
    /// Mean long share of the focal team across submissions.
    pub mean_beta_plus: f64,
    /// (q', P(global rank <= q')), non-decreasing in q'.
    pub prob_rank_leq: Vec<(usize, f64)>,
    /// Counts of final global ranks 1..=K; sums to n_reps.
    pub rank_histogram: Vec<u64>,
    /// P(quarterly rank <= 3) per quarter, when the calendar has quarters.
    pub quarterly_top3: Vec<f64>,
}

/// Per-team running score state: exact competition IR needs only the count
/// and the first two power sums of daily log returns.
#[derive(Debug, Clone, Copy, Default)]
struct ScoreSums {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl ScoreSums {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    /// Exact competition IR; worst score when degenerate.
    fn ir(&self) -> f64 {
        ir_from_sums(self.n, self.sum, self.sum_sq).unwrap_or(f64::NEG_INFINITY)
    }
}

/// One replication's focal outcome.
struct RepOutcome {
    rank: usize,
    ir: f64,
    mean_beta: f64,
    quarter_top3: Vec<bool>,
}

/// Runs the stylized tournament: K-1 baseline opponents, fresh market and
/// weights per replication, exact competition scoring.
pub fn run_stylized(
    config: &ArenaConfig,
    model: &MarketModel,
    theta: &BaselineTheta,
    strategy: &FocalStrategy,
) -> Result<ArenaReport> {
    if theta.n_assets() != model.n_assets() {
        return Err(Error::Parameter("theta and model disagree on the asset universe".into()));
    }
    // The market carries the strategy's predictability share.
    let effective_model = match strategy {
        FocalStrategy::Tangency { lambda } => model.with_lambda(*lambda)?,
        FocalStrategy::Bootstrapped => {
            return Err(Error::Config(
                "the bootstrapped focal strategy is only defined in the bootstrap arena".into(),
            ))
        }
        _ => *model,
    };
    let calendar = IntervalCalendar::competition_year(effective_model.days_per_interval())?;
    let tangency = match strategy {
        FocalStrategy::Tangency { .. } => Some(TangencyEngine::new(&effective_model, 1.0)?),
        _ => None,
    };

    let n_opp = config.k_teams - 1;
    let n_assets = effective_model.n_assets();

    let outcomes: Vec<Result<RepOutcome>> = (0..config.n_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rng::stream_rng(config.seed, rng::DOMAIN_ARENA, rep as u64);
            let panel = sample_returns_with_rng(&effective_model, calendar, &mut rng)?;
            run_one_stylized_rep(
                &panel, theta, strategy, tangency.as_ref(), n_opp, n_assets, &mut rng,
            )
        })
        .collect();

    aggregate(config, outcomes)
}

fn run_one_stylized_rep(
    panel: &ReturnPanel,
    theta: &BaselineTheta,
    strategy: &FocalStrategy,
    tangency: Option<&TangencyEngine>,
    n_opp: usize,
    n_assets: usize,
    rng: &mut impl Rng,
) -> Result<RepOutcome> {
    let calendar = *panel.calendar();
    let returns = panel.returns();
    let n_quarters = calendar.n_quarters();

    let mut opp_global = vec![ScoreSums::default(); n_opp];
    let mut opp_quarter = vec![vec![ScoreSums::default(); n_opp]; n_quarters];
    let mut own_global = ScoreSums::default();
    let mut own_quarter = vec![ScoreSums::default(); n_quarters];
    let mut w = vec![0.0f64; n_assets];
    let mut w_opp = vec![0.0f64; n_assets];
    let mut beta_sum = 0.0;

    for m in 0..calendar.n_intervals() {
        let days = calendar.days(m);
        let quarter = if n_quarters > 0 { Some(m / 3) } else { None };

        // Focal weights first: policy strategies observe the gap before the
        // interval's returns realize.
        let beta_used = match strategy {
            FocalStrategy::Baseline => {
                fill_baseline(&mut w, theta, rng);
                beta_of(&w)
            }
            FocalStrategy::Tangency { .. } => {
                let engine = tangency.expect("engine built for tangency runs");
                let weights = engine.weights(&panel.predictable_interval_sum(m))?;
                w.copy_from_slice(weights.as_slice());
                beta_of(&w)
            }
            FocalStrategy::RankOpt(policy) => {
                let delta = if m == 0 {
                    0.0
                } else {
                    gap_to_qth(own_global.ir(), &opp_global, policy.q())
                };
                let beta = policy.act(m + 1, delta);
                fill_rank_opt(&mut w, beta, rng)?;
                beta_of(&w)
            }
            FocalStrategy::Bootstrapped => unreachable!("rejected in run_stylized"),
        };
        beta_sum += beta_used;

        // Opponents: fresh baseline draws, scored over the interval.
        for (k, opp) in opp_global.iter_mut().enumerate() {
            fill_baseline(&mut w_opp, theta, rng);
            for t in days.clone() {
                let lr = dot_column(returns, &w_opp, t).ln_1p();
                opp.push(lr);
                if let Some(q) = quarter {
                    opp_quarter[q][k].push(lr);
                }
            }
        }

        for t in days.clone() {
            let lr = dot_column(returns, &w, t).ln_1p();
            own_global.push(lr);
            if let Some(q) = quarter {
                own_quarter[q].push(lr);
            }
        }
    }

    let own_ir = own_global.ir();
    let rank = competition_rank(own_ir, opp_global.iter().map(|s| s.ir()));
    let quarter_top3 = (0..n_quarters)
        .map(|q| {
            let own = own_quarter[q].ir();
            competition_rank(own, opp_quarter[q].iter().map(|s| s.ir())) <= 3
        })
        .collect();
    Ok(RepOutcome {
        rank,
        ir: own_ir,
        mean_beta: beta_sum / calendar.n_intervals() as f64,
        quarter_top3,
    })
}

/// Runs the bootstrap tournament: interval indices resampled jointly for
/// returns and submissions, opponents drawing real weight vectors for the
/// source interval. Focal strategies: `RankOpt` or `Bootstrapped`.
pub fn run_bootstrap(
    config: &ArenaConfig,
    panel: &ReturnPanel,
    subs: &SubmissionPanel,
    strategy: &FocalStrategy,
) -> Result<ArenaReport> {
    if subs.n_assets() != panel.n_assets() {
        return Err(Error::Parameter("submissions and returns disagree on assets".into()));
    }
    if subs.n_intervals() != panel.calendar().n_intervals() {
        return Err(Error::Ingest {
            row: 0,
            msg: format!(
                "submissions cover {} intervals but prices give {}",
                subs.n_intervals(),
                panel.calendar().n_intervals()
            ),
        });
    }
    match strategy {
        FocalStrategy::RankOpt(_) | FocalStrategy::Bootstrapped => {}
        _ => {
            return Err(Error::Config(
                "bootstrap arena supports the rank-optimization and bootstrapped focal strategies"
                    .into(),
            ))
        }
    }
    // Pool of teams with a (carried) submission, per source interval.
    let pools: Vec<Vec<usize>> = (0..subs.n_intervals())
        .map(|m| {
            (0..subs.n_teams()).filter(|&k| subs.first_active()[k] <= m).collect::<Vec<usize>>()
        })
        .collect();
    if pools.iter().any(|p| p.is_empty()) {
        return Err(Error::Ingest { row: 0, msg: "an interval has no submitted weights".into() });
    }

    let n_opp = config.k_teams - 1;
    let n_assets = panel.n_assets();
    let calendar = *panel.calendar();
    let n_intervals = calendar.n_intervals();
    let n_quarters = calendar.n_quarters();

    let outcomes: Vec<Result<RepOutcome>> = (0..config.n_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = rng::stream_rng(config.seed, rng::DOMAIN_ARENA, rep as u64);
            let returns = panel.returns();

            // Joint interval resample, shared by returns and submissions.
            let sources: Vec<usize> =
                (0..n_intervals).map(|_| rng.gen_range(0..n_intervals)).collect();

            let mut opp_global = vec![ScoreSums::default(); n_opp];
            let mut opp_quarter = vec![vec![ScoreSums::default(); n_opp]; n_quarters];
            let mut own_global = ScoreSums::default();
            let mut own_quarter = vec![ScoreSums::default(); n_quarters];
            let mut w = vec![0.0f64; n_assets];
            let mut beta_sum = 0.0;

            for (slot, &src) in sources.iter().enumerate() {
                let days = calendar.days(src);
                let quarter = if n_quarters > 0 { Some(slot / 3) } else { None };
                let weights_src = subs.interval_weights(src);
                let pool = &pools[src];

                let beta_used = match strategy {
                    FocalStrategy::RankOpt(policy) => {
                        let delta = if slot == 0 {
                            0.0
                        } else {
                            gap_to_qth(own_global.ir(), &opp_global, policy.q())
                        };
                        let beta = policy.act(slot + 1, delta);
                        fill_rank_opt(&mut w, beta, &mut rng)?;
                        beta_of(&w)
                    }
                    FocalStrategy::Bootstrapped => {
                        let pick = pool[rng.gen_range(0..pool.len())];
                        for (i, slot_w) in w.iter_mut().enumerate() {
                            *slot_w = weights_src[(i, pick)];
                        }
                        beta_of(&w)
                    }
                    _ => unreachable!("validated above"),
                };
                beta_sum += beta_used;

                for (k, opp) in opp_global.iter_mut().enumerate() {
                    let pick = pool[rng.gen_range(0..pool.len())];
                    for t in days.clone() {
                        let col = returns.column(t);
                        let mut acc = 0.0;
                        for i in 0..n_assets {
                            let wi = weights_src[(i, pick)];
                            if wi != 0.0 {
                                acc += wi * col[i];
                            }
                        }
                        let lr = acc.ln_1p();
                        opp.push(lr);
                        if let Some(q) = quarter {
                            opp_quarter[q][k].push(lr);
                        }
                    }
                }

                for t in days.clone() {
                    let lr = dot_column(returns, &w, t).ln_1p();
                    own_global.push(lr);
                    if let Some(q) = quarter {
                        own_quarter[q].push(lr);
                    }
                }
            }

            let own_ir = own_global.ir();
            let rank = competition_rank(own_ir, opp_global.iter().map(|s| s.ir()));
            let quarter_top3 = (0..n_quarters)
                .map(|q| {
                    let own = own_quarter[q].ir();
                    competition_rank(own, opp_quarter[q].iter().map(|s| s.ir())) <= 3
                })
                .collect();
            Ok(RepOutcome {
                rank,
                ir: own_ir,
                mean_beta: beta_sum / n_intervals as f64,
                quarter_top3,
            })
        })
        .collect();

    aggregate(config, outcomes)
}

fn aggregate(config: &ArenaConfig, outcomes: Vec<Result<RepOutcome>>) -> Result<ArenaReport> {
    let mut histogram = vec![0u64; config.k_teams];
    let mut ir_sum = 0.0;
    let mut beta_sum = 0.0;
    let mut quarter_counts: Vec<u64> = Vec::new();
    for outcome in outcomes {
        let o = outcome?;
        histogram[o.rank - 1] += 1;
        ir_sum += o.ir;
        beta_sum += o.mean_beta;
        if quarter_counts.is_empty() {
            quarter_counts = vec![0; o.quarter_top3.len()];
        }
        for (q, hit) in o.quarter_top3.iter().enumerate() {
            if *hit {
                quarter_counts[q] += 1;
            }
        }
    }
    let n = config.n_reps as f64;
    let mut cumulative = 0u64;
    let mut by_rank = vec![0.0; config.k_teams];
    for (r, slot) in by_rank.iter_mut().enumerate() {
        cumulative += histogram[r];
        *slot = cumulative as f64 / n;
    }
    let prob_rank_leq = config
        .rank_thresholds
        .iter()
        .filter(|&&q| q >= 1 && q <= config.k_teams)
        .map(|&q| (q, by_rank[q - 1]))
        .collect();
    Ok(ArenaReport {
        n_reps: config.n_reps,
        mean_ir: ir_sum / n,
        mean_beta_plus: beta_sum / n,
        prob_rank_leq,
        rank_histogram: histogram,
        quarterly_top3: quarter_counts.iter().map(|&c| c as f64 / n).collect(),
    })
}

#[inline]
fn dot_column(returns: &nalgebra::DMatrix<f64>, w: &[f64], t: usize) -> f64 {
    let col = returns.column(t);
    let mut acc = 0.0;
    for (i, &wi) in w.iter().enumerate() {
        if wi != 0.0 {
            acc += wi * col[i];
        }
    }
    acc
}

fn beta_of(w: &[f64]) -> f64 {
    let mut gross = 0.0;
    let mut long = 0.0;
    for &x in w {
        gross += x.abs();
        long += x.max(0.0);
    }
    if gross > 0.0 {
        long / gross
    } else {
        f64::NAN
    }
}

/// Competition rank of the focal value among opponents (Eq.-5 convention:
/// 1 + number of opponents scoring at least as high).
fn competition_rank(own: f64, opponents: impl Iterator<Item = f64>) -> usize {
    1 + opponents.filter(|&x| x >= own).count()
}

/// Gap to the q-th highest opponent score.
fn gap_to_qth(own: f64, opponents: &[ScoreSums], q: usize) -> f64 {
    debug_assert!(q >= 1 && q <= opponents.len());
    let mut scores: Vec<f64> = opponents.iter().map(|s| s.ir()).collect();
    let idx = q - 1;
    scores.select_nth_unstable_by(idx, |a, b| b.total_cmp(a));
    own - scores[idx]
}

// ---------------------------------------------------------------------------
// Leaderboard statistics (simulated baseline fields on a fixed panel)
// ---------------------------------------------------------------------------

/// Per-interval and total IRs of one simulated board.
#[derive(Debug, Clone)]
pub struct BoardIr {
    /// per_interval[m][team]
    pub per_interval: Vec<Vec<f64>>,
    pub total: Vec<f64>,
}

impl BoardIr {
    /// Builds the board IRs from a score matrix of daily log returns.
    pub fn from_log_returns(log_ret: &nalgebra::DMatrix<f64>, calendar: &IntervalCalendar) -> Self {
        let k = log_ret.ncols();
        let mut per_interval = Vec::with_capacity(calendar.n_intervals());
        for m in 0..calendar.n_intervals() {
            let days = calendar.days(m);
            let row: Vec<f64> = (0..k)
                .map(|team| {
                    let series: Vec<f64> = days.clone().map(|t| log_ret[(t, team)]).collect();
                    crate::scoring::ir(&series).unwrap_or(f64::NEG_INFINITY)
                })
                .collect();
            per_interval.push(row);
        }
        let total: Vec<f64> = (0..k)
            .map(|team| {
                let series: Vec<f64> =
                    (0..log_ret.nrows()).map(|t| log_ret[(t, team)]).collect();
                crate::scoring::ir(&series).unwrap_or(f64::NEG_INFINITY)
            })
            .collect();
        Self { per_interval, total }
    }
}

/// Simulates `n_sims` baseline fields of `k` teams against a fixed panel.
pub fn simulate_a2_boards(
    panel: &ReturnPanel,
    theta: &BaselineTheta,
    k: usize,
    n_sims: usize,
    seed: u64,
) -> Result<Vec<BoardIr>> {
    if theta.n_assets() != panel.n_assets() {
        return Err(Error::Parameter("theta and panel disagree on the asset universe".into()));
    }
    Ok((0..n_sims)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng::stream_rng(seed, rng::DOMAIN_ARENA, (1 << 62) | s as u64);
            let ret = crate::sharpe_test::simulate_baseline_ret(panel, theta, k, &mut rng);
            let log_ret = ret.map(|x| x.ln_1p());
            BoardIr::from_log_returns(&log_ret, panel.calendar())
        })
        .collect())
}

/// One row of the leaderboard-statistics table: a window's cross-team
/// [mean, sd, q01, q99], observed (optional) and simulated (mean and sd
/// across simulations).
#[derive(Debug, Clone)]
pub struct LeaderboardStatRow {
    pub window: String,
    pub observed: Option<[f64; 4]>,
    pub sim_mean: [f64; 4],
    pub sim_sd: [f64; 4],
}

/// Cross-team summary [mean, sd, q01, q99] of one IR cross-section.
fn cross_section_summary(xs: &[f64]) -> [f64; 4] {
    let mean = stats::mean(xs);
    let sd = if xs.len() > 1 { stats::sample_variance(xs).sqrt() } else { 0.0 };
    [mean, sd, stats::quantile(xs, 0.01), stats::quantile(xs, 0.99)]
}

/// Tabulates per-interval and total IR statistics across simulated boards,
/// with across-simulation standard deviations, next to the observed board
/// when supplied.
pub fn leaderboard_stats(
    boards: &[BoardIr],
    observed: Option<&BoardIr>,
) -> Result<Vec<LeaderboardStatRow>> {
    let first = boards.first().ok_or_else(|| {
        Error::Parameter("leaderboard statistics need at least one simulated board".into())
    })?;
    let m_count = first.per_interval.len();
    let mut rows = Vec::with_capacity(m_count + 1);

    let collect_window = |window: String,
                          extract: &dyn Fn(&BoardIr) -> &[f64],
                          obs: Option<&BoardIr>| {
        let summaries: Vec<[f64; 4]> =
            boards.iter().map(|b| cross_section_summary(extract(b))).collect();
        let mut sim_mean = [0.0; 4];
        let mut sim_sd = [0.0; 4];
        for j in 0..4 {
            let vals: Vec<f64> = summaries.iter().map(|s| s[j]).collect();
            sim_mean[j] = stats::mean(&vals);
            sim_sd[j] =
                if vals.len() > 1 { stats::sample_variance(&vals).sqrt() } else { 0.0 };
        }
        LeaderboardStatRow {
            window,
            observed: obs.map(|b| cross_section_summary(extract(b))),
            sim_mean,
            sim_sd,
        }
    };

    for m in 0..m_count {
        rows.push(collect_window(
            format!("m{}", m + 1),
            &move |b: &BoardIr| &b.per_interval[m],
            observed,
        ));
    }
    rows.push(collect_window("global".into(), &|b: &BoardIr| &b.total, observed));
    Ok(rows)
}

// ---------------------------------------------------------------------------
// Position-effects grid
// ---------------------------------------------------------------------------

/// Summary of single-interval IRs for one (n_zero, short-share) cell, in
/// isolation and relative to a benchmark team drawn at the reference counts.
#[derive(Debug, Clone)]
pub struct PositionEffectCell {
    pub n_zero: usize,
    pub short_share: f64,
    pub mean_ir: f64,
    pub sd_ir: f64,
    pub q95_ir: f64,
    pub mean_diff: f64,
    pub sd_diff: f64,
    pub q95_diff: f64,
}

/// Sweeps position counts over a (zero count, short share) grid and reports
/// the distribution of single-interval IRs and of their difference to a
/// benchmark baseline team, under shared market draws per simulation.
pub fn position_effects(
    model: &MarketModel,
    benchmark: &BaselineTheta,
    n_zeros: &[usize],
    short_shares: &[f64],
    n_sims: usize,
    seed: u64,
) -> Result<Vec<PositionEffectCell>> {
    if n_sims < 2 {
        return Err(Error::Parameter("position effects need at least 2 simulations".into()));
    }
    let n_assets = model.n_assets();
    let calendar = IntervalCalendar::new(1, model.days_per_interval())?;

    // Valid cells: at least one nonzero position.
    let cells: Vec<(usize, f64, BaselineTheta)> = n_zeros
        .iter()
        .flat_map(|&nz| short_shares.iter().map(move |&s| (nz, s)))
        .filter_map(|(nz, s)| {
            if nz >= n_assets {
                return None;
            }
            let n_nonzero = n_assets - nz;
            let n_minus = (s * n_nonzero as f64).round() as usize;
            let theta = BaselineTheta::new(n_nonzero - n_minus, nz, n_minus).ok()?;
            Some((nz, s, theta))
        })
        .collect();

    // draws[cell][sim], diffs[cell][sim]
    let per_sim: Vec<Result<Vec<(f64, f64)>>> = (0..n_sims)
        .into_par_iter()
        .map(|s| {
            let mut rng = rng::stream_rng(seed, rng::DOMAIN_ARENA, (1 << 61) | s as u64);
            let panel = sample_returns_with_rng(model, calendar, &mut rng)?;
            let returns = panel.returns();
            let days = calendar.days(0);
            let mut w = vec![0.0; n_assets];

            fill_baseline(&mut w, benchmark, &mut rng);
            let bench_ir = interval_ir(returns, &w, days.clone())?;

            let mut out = Vec::with_capacity(cells.len());
            for (_, _, theta) in &cells {
                fill_baseline(&mut w, theta, &mut rng);
                let ir = interval_ir(returns, &w, days.clone())?;
                out.push((ir, ir - bench_ir));
            }
            Ok(out)
        })
        .collect();

    let mut irs = vec![Vec::with_capacity(n_sims); cells.len()];
    let mut diffs = vec![Vec::with_capacity(n_sims); cells.len()];
    for sim in per_sim {
        for (ci, (ir, diff)) in sim?.into_iter().enumerate() {
            irs[ci].push(ir);
            diffs[ci].push(diff);
        }
    }

    Ok(cells
        .iter()
        .enumerate()
        .map(|(ci, &(nz, s, _))| PositionEffectCell {
            n_zero: nz,
            short_share: s,
            mean_ir: stats::mean(&irs[ci]),
            sd_ir: stats::sample_variance(&irs[ci]).sqrt(),
            q95_ir: stats::quantile(&irs[ci], 0.95),
            mean_diff: stats::mean(&diffs[ci]),
            sd_diff: stats::sample_variance(&diffs[ci]).sqrt(),
            q95_diff: stats::quantile(&diffs[ci], 0.95),
        })
        .collect())
}

fn interval_ir(
    returns: &nalgebra::DMatrix<f64>,
    w: &[f64],
    days: std::ops::Range<usize>,
) -> Result<f64> {
    let n = days.len();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for t in days {
        let lr = dot_column(returns, w, t).ln_1p();
        sum += lr;
        sum_sq += lr * lr;
    }
    ir_from_sums(n, sum, sum_sq)
        .ok_or_else(|| Error::Score("degenerate interval variance in position sweep".into()))
}
