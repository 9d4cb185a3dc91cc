//! Method-of-simulated-moments calibration of the baseline portfolio counts.
//!
//! For each submission interval the observed cross-team mean and kurtosis of
//! interval IRs are matched against their simulated distribution under
//! candidate counts theta = (n+, n0, n-). The per-interval moment component
//! is
//!
//! ```text
//! ((g_obs - mu_hat(theta))^2 - var_hat(theta)) / sd_hat(theta),
//! ```
//!
//! which has mean zero at the true theta; components are averaged over
//! intervals and combined with identity weighting. The estimator is an
//! exhaustive search over {(n+, n0, n-) : sum = I, n0 != I}.
//!
//! Common random numbers: the random assignment for (interval, sim, team) is
//! a shared permutation of the asset universe, and every candidate reads its
//! long/short sets as prefix slices of that permutation. The objective is
//! therefore a deterministic function of theta given the seed, which makes
//! the argmin well-defined despite simulation noise, and lets one scan
//! evaluate all candidates from shared prefix sums.

use crate::error::{Error, Result};
use crate::market::ReturnPanel;
use crate::portfolio::BaselineTheta;
use crate::rng;
use crate::stats;
use rand::seq::SliceRandom;
use rayon::prelude::*;

/// Observed per-interval moments of the leaderboard IR cross-section.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTarget {
    /// Cross-team mean of interval IRs, per interval.
    pub g1: Vec<f64>,
    /// Cross-team kurtosis of interval IRs, per interval.
    pub g2: Vec<f64>,
}

impl MomentTarget {
    pub fn new(g1: Vec<f64>, g2: Vec<f64>) -> Result<Self> {
        if g1.is_empty() || g1.len() != g2.len() {
            return Err(Error::Parameter("moment target needs matching per-interval vectors".into()));
        }
        if g2.iter().any(|&k| !(k >= 1.0 - 1e-9)) {
            return Err(Error::Parameter("kurtosis below its mathematical lower bound 1".into()));
        }
        Ok(Self { g1, g2 })
    }

    /// Target from per-interval IR cross-sections.
    pub fn from_leaderboard(ir_by_interval: &[Vec<f64>]) -> Result<Self> {
        let mut g1 = Vec::with_capacity(ir_by_interval.len());
        let mut g2 = Vec::with_capacity(ir_by_interval.len());
        for xs in ir_by_interval {
            let (m, k) = moment_stats(xs)?;
            g1.push(m);
            g2.push(k);
        }
        Self::new(g1, g2)
    }

    pub fn n_intervals(&self) -> usize {
        self.g1.len()
    }
}

/// Mean and kurtosis of a cross-section, population (divisor K) moments:
/// kurtosis = m4 / m2^2.
pub fn moment_stats(xs: &[f64]) -> Result<(f64, f64)> {
    let k = xs.len();
    if k < 4 {
        return Err(Error::Estimation(format!("kurtosis needs K >= 4 observations, got {k}")));
    }
    let mean = stats::mean(xs);
    let (mut m2, mut m4) = (0.0, 0.0);
    for x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= k as f64;
    m4 /= k as f64;
    if m2 <= 0.0 {
        return Err(Error::Score("kurtosis undefined for zero-variance cross-section".into()));
    }
    Ok((mean, m4 / (m2 * m2)))
}

/// Simulated distribution of the two moment statistics for one candidate
/// and one interval.
#[derive(Debug, Clone, Copy)]
pub struct MomentDist {
    pub mu_g1: f64,
    pub var_g1: f64,
    /// NaN when the simulated cross-section is degenerate (kurtosis undefined).
    pub mu_g2: f64,
    pub var_g2: f64,
}

/// Candidate counts, encoded as (n_plus, n_nonzero = n+ + n-).
type Candidate = (usize, usize);

fn candidate_theta(cand: Candidate, n_assets: usize) -> BaselineTheta {
    let (n_plus, n_nonzero) = cand;
    BaselineTheta::new(n_plus, n_assets - n_nonzero, n_nonzero - n_plus)
        .expect("candidate enumeration only yields valid counts")
}

/// All (n+, n0, n-) with n+ + n0 + n- = I and n0 != I.
fn enumerate_candidates(n_assets: usize) -> Vec<Candidate> {
    let mut out = Vec::new();
    for n_nonzero in 1..=n_assets {
        for n_plus in 0..=n_nonzero {
            out.push((n_plus, n_nonzero));
        }
    }
    out
}

/// Evaluates the simulated moment distributions of many candidates under
/// common random numbers, one scan per interval. Entry [c][mi] corresponds
/// to candidate c and `intervals[mi]`.
fn eval_moment_dists(
    cands: &[Candidate],
    panel: &ReturnPanel,
    intervals: &[usize],
    n_teams: usize,
    n_sim: usize,
    seed: u64,
) -> Result<Vec<Vec<MomentDist>>> {
    if n_sim < 2 {
        return Err(Error::Parameter("simulated moments need n_sim >= 2".into()));
    }
    if n_teams < 4 {
        return Err(Error::Parameter("simulated moments need at least 4 teams".into()));
    }
    let n_assets = panel.n_assets();
    let n_sim_u = n_sim as u64;
    let n_teams_u = n_teams as u64;

    let mut result = vec![Vec::with_capacity(intervals.len()); cands.len()];
    for &m in intervals {
        let days = panel.calendar().days(m);
        let d = days.len();

        // Per-sim (g1, g2) for every candidate, in sim order.
        let per_sim: Vec<Vec<(f64, f64)>> = (0..n_sim)
            .into_par_iter()
            .map(|s| {
                // Raw power sums of team IRs per candidate.
                let mut acc = vec![[0.0f64; 4]; cands.len()];
                let mut perm: Vec<usize> = (0..n_assets).collect();
                let mut prefix = vec![0.0f64; (n_assets + 1) * d];
                for k in 0..n_teams {
                    let stream = (m as u64 * n_sim_u + s as u64) * n_teams_u + k as u64;
                    let mut rng = rng::stream_rng(seed, rng::DOMAIN_MSM, stream);
                    for (i, p) in perm.iter_mut().enumerate() {
                        *p = i;
                    }
                    perm.shuffle(&mut rng);

                    // prefix[j][t] = sum of returns of the first j permuted
                    // assets on day t.
                    for t in 0..d {
                        prefix[t] = 0.0;
                    }
                    for j in 0..n_assets {
                        let row = panel.returns().row(perm[j]);
                        let (prev, curr) = prefix.split_at_mut((j + 1) * d);
                        let prev = &prev[j * d..];
                        for t in 0..d {
                            curr[t] = prev[t] + row[days.start + t];
                        }
                    }

                    for (ci, &(n_plus, n_nonzero)) in cands.iter().enumerate() {
                        let inv = 1.0 / n_nonzero as f64;
                        let pa = &prefix[n_plus * d..n_plus * d + d];
                        let pb = &prefix[n_nonzero * d..n_nonzero * d + d];
                        let mut sum = 0.0;
                        let mut sum_sq = 0.0;
                        for t in 0..d {
                            let ret = (2.0 * pa[t] - pb[t]) * inv;
                            let lr = ret.ln_1p();
                            sum += lr;
                            sum_sq += lr * lr;
                        }
                        let ir = match crate::scoring::ir_from_sums(d, sum, sum_sq) {
                            Some(ir) => ir,
                            None => f64::NAN,
                        };
                        let a = &mut acc[ci];
                        let ir2 = ir * ir;
                        a[0] += ir;
                        a[1] += ir2;
                        a[2] += ir2 * ir;
                        a[3] += ir2 * ir2;
                    }
                }
                acc.iter().map(|a| cross_section_moments(a, n_teams)).collect()
            })
            .collect();

        // Deterministic reduction in sim order.
        for (ci, out) in result.iter_mut().enumerate() {
            let mut g1 = stats::StreamingMoments::default();
            let mut g2 = stats::StreamingMoments::default();
            for sims in &per_sim {
                let (a, b) = sims[ci];
                g1.push(a);
                g2.push(b);
            }
            out.push(MomentDist {
                mu_g1: g1.mean(),
                var_g1: g1.population_variance(),
                mu_g2: g2.mean(),
                var_g2: g2.population_variance(),
            });
        }
    }
    Ok(result)
}

/// (mean, kurtosis) of a team cross-section from raw power sums; kurtosis is
/// NaN for degenerate cross-sections.
fn cross_section_moments(sums: &[f64; 4], n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mu = sums[0] / nf;
    let m2 = sums[1] / nf - mu * mu;
    let m3 = sums[2] / nf - 3.0 * mu * sums[1] / nf + 2.0 * mu * mu * mu;
    let m4 = sums[3] / nf - 4.0 * mu * sums[2] / nf + 6.0 * mu * mu * sums[1] / nf
        - 3.0 * mu * mu * mu * mu;
    let _ = m3;
    if m2 > 0.0 {
        (mu, m4 / (m2 * m2))
    } else {
        (mu, f64::NAN)
    }
}

/// Simulated mean/variance of (g1, g2) for one candidate against the fixed
/// observed returns of interval `m`.
pub fn simulate_moment_dist(
    theta: &BaselineTheta,
    panel: &ReturnPanel,
    interval: usize,
    n_teams: usize,
    n_sim: usize,
    seed: u64,
) -> Result<MomentDist> {
    check_theta(theta, panel)?;
    let cand = (theta.n_plus(), theta.n_plus() + theta.n_minus());
    let dists = eval_moment_dists(&[cand], panel, &[interval], n_teams, n_sim, seed)?;
    Ok(dists[0][0])
}

/// Objective for one candidate: squared norm of the interval-averaged
/// standardized two-component moment function.
pub fn msm_objective(
    target: &MomentTarget,
    theta: &BaselineTheta,
    panel: &ReturnPanel,
    n_teams: usize,
    n_sim: usize,
    seed: u64,
) -> Result<f64> {
    check_theta(theta, panel)?;
    let cand = (theta.n_plus(), theta.n_plus() + theta.n_minus());
    let intervals: Vec<usize> = (0..target.n_intervals()).collect();
    if intervals.len() != panel.calendar().n_intervals() {
        return Err(Error::Parameter("target and panel disagree on interval count".into()));
    }
    let dists = eval_moment_dists(&[cand], panel, &intervals, n_teams, n_sim, seed)?;
    objective_from_dists(target, &dists[0])
}

fn objective_from_dists(target: &MomentTarget, dists: &[MomentDist]) -> Result<f64> {
    let m_count = target.n_intervals();
    let mut comp1 = 0.0;
    let mut comp2 = 0.0;
    for (m, d) in dists.iter().enumerate() {
        if !(d.var_g1 > 0.0) || !(d.var_g2 > 0.0) || !d.mu_g2.is_finite() {
            return Err(Error::Score(
                "zero simulated variance in a moment component; standardization undefined".into(),
            ));
        }
        let d1 = target.g1[m] - d.mu_g1;
        let d2 = target.g2[m] - d.mu_g2;
        comp1 += (d1 * d1 - d.var_g1) / d.var_g1.sqrt();
        comp2 += (d2 * d2 - d.var_g2) / d.var_g2.sqrt();
    }
    comp1 /= m_count as f64;
    comp2 /= m_count as f64;
    Ok(comp1 * comp1 + comp2 * comp2)
}

fn check_theta(theta: &BaselineTheta, panel: &ReturnPanel) -> Result<()> {
    if theta.n_assets() != panel.n_assets() {
        return Err(Error::Parameter(format!(
            "theta covers {} assets but the panel has {}",
            theta.n_assets(),
            panel.n_assets()
        )));
    }
    Ok(())
}

/// Estimate and diagnostics of the exhaustive search.
#[derive(Debug, Clone)]
pub struct ThetaEstimate {
    pub theta: BaselineTheta,
    pub objective: f64,
    /// Full objective surface: (theta, objective or NaN when undefined).
    pub surface: Vec<(BaselineTheta, f64)>,
}

/// Exhaustive search over the candidate simplex under common random numbers.
/// Ties (and undefined objectives) resolve toward lexicographically smallest
/// (n+, n0, n-).
pub fn estimate_theta(
    target: &MomentTarget,
    panel: &ReturnPanel,
    n_teams: usize,
    n_sim: usize,
    seed: u64,
) -> Result<ThetaEstimate> {
    if target.n_intervals() != panel.calendar().n_intervals() {
        return Err(Error::Parameter("target and panel disagree on interval count".into()));
    }
    let n_assets = panel.n_assets();
    let cands = enumerate_candidates(n_assets);
    let intervals: Vec<usize> = (0..target.n_intervals()).collect();
    let dists = eval_moment_dists(&cands, panel, &intervals, n_teams, n_sim, seed)?;

    let mut surface: Vec<(BaselineTheta, f64)> = Vec::with_capacity(cands.len());
    for (ci, &cand) in cands.iter().enumerate() {
        let theta = candidate_theta(cand, n_assets);
        let obj = objective_from_dists(target, &dists[ci]).unwrap_or(f64::NAN);
        surface.push((theta, obj));
    }

    let lex = |t: &BaselineTheta| (t.n_plus(), t.n_zero(), t.n_minus());
    let best = surface
        .iter()
        .filter(|(_, obj)| obj.is_finite())
        .min_by(|(ta, oa), (tb, ob)| oa.total_cmp(ob).then_with(|| lex(ta).cmp(&lex(tb))))
        .ok_or_else(|| Error::Score("no candidate produced a finite objective".into()))?;

    Ok(ThetaEstimate { theta: best.0, objective: best.1, surface })
}
