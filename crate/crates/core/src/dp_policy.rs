//! Rank-optimization dynamic program.
//!
//! State: the gap Delta_m between the focal team's cumulative additive IR
//! and the q-th highest cumulative additive IR among the K-1 baseline
//! opponents. Action: the long share beta+ on a 0.1 grid, realized as
//! two-level weights. The transition kernel is simulated: each path draws a
//! full competition (shared market returns for the focal team and the
//! field), and the stage-m increment is
//!
//! ```text
//! inc_m(beta) = own IR_{T_m}(beta) - (Mq_m - Mq_{m-1}),
//! ```
//!
//! where Mq_m is the q-th highest opponent cumulative score after interval
//! m. Backward induction maximizes the probability of ending with
//! Delta_12 >= 0, with linear interpolation of the next-stage value between
//! grid points and clamping outside the grid.

use crate::calendar::IntervalCalendar;
use crate::error::{Error, Result};
use crate::market::{sample_returns_with_rng, MarketModel};
use crate::portfolio::{fill_baseline, fill_rank_opt, BaselineTheta};
use crate::rng;
use crate::scoring::ir_from_sums;
use rayon::prelude::*;

/// The action grid: beta+ in {0.0, 0.1, ..., 1.0}.
pub fn default_beta_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// The state grid: Delta in [-40, +40] in steps of 0.5, covering roughly
/// +-4 cross-sectional standard deviations of cumulative additive IR.
pub fn default_delta_grid() -> Vec<f64> {
    (0..=160).map(|i| -40.0 + 0.5 * i as f64).collect()
}

/// Empirical Delta-increment samples per (stage, action).
#[derive(Debug, Clone)]
pub struct TransitionKernel {
    q: usize,
    betas: Vec<f64>,
    /// increments[m][beta_index] -> n_paths draws.
    increments: Vec<Vec<Vec<f64>>>,
}

impl TransitionKernel {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n_stages(&self) -> usize {
        self.increments.len()
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn cell(&self, m: usize, beta_index: usize) -> &[f64] {
        &self.increments[m][beta_index]
    }

    /// Kernel from externally supplied increment samples (stage-major,
    /// then action). Every cell must be non-empty.
    pub fn from_samples(q: usize, betas: Vec<f64>, increments: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if increments.is_empty() || betas.is_empty() {
            return Err(Error::Config("kernel needs at least one stage and one action".into()));
        }
        for stage in &increments {
            if stage.len() != betas.len() {
                return Err(Error::Config("kernel stage is missing action cells".into()));
            }
            for cell in stage {
                if cell.is_empty() {
                    return Err(Error::Config("empty kernel cell".into()));
                }
                if cell.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Config("non-finite kernel increment".into()));
                }
            }
        }
        Ok(Self { q, betas, increments })
    }
}

/// Simulates the transition kernel under the stylized market with a field of
/// `k_teams - 1` baseline opponents. One market path serves every stage and
/// action: the own stage-m score and the field's stage-m move share the same
/// interval returns, preserving their correlation.
pub fn build_kernel(
    model: &MarketModel,
    theta: &BaselineTheta,
    q: usize,
    k_teams: usize,
    n_stages: usize,
    n_paths: usize,
    seed: u64,
) -> Result<TransitionKernel> {
    if n_paths == 0 {
        return Err(Error::Parameter("kernel needs at least one path".into()));
    }
    if k_teams < 2 {
        return Err(Error::Parameter("kernel needs at least one opponent".into()));
    }
    if q >= k_teams {
        return Err(Error::Parameter(format!(
            "target rank {q} requires more than {k_teams} teams"
        )));
    }
    if theta.n_assets() != model.n_assets() {
        return Err(Error::Parameter("theta and model disagree on the asset universe".into()));
    }
    let betas = default_beta_grid();
    let calendar = IntervalCalendar::new(n_stages, model.days_per_interval())?;
    let n_opp = k_teams - 1;
    let n_assets = model.n_assets();
    let d = calendar.days_per_interval();

    // per_path[p][m][b]
    let per_path: Vec<Result<Vec<Vec<f64>>>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let mut rng = rng::stream_rng(seed, rng::DOMAIN_KERNEL, p as u64);
            let panel = sample_returns_with_rng(model, calendar, &mut rng)?;
            let returns = panel.returns();

            // Opponent cumulative additive IR after each interval.
            let mut cum = vec![0.0f64; n_opp];
            let mut qth_prev = 0.0; // everyone starts at zero
            let mut w = vec![0.0f64; n_assets];
            let mut incs = vec![vec![0.0f64; betas.len()]; n_stages];

            for m in 0..n_stages {
                let days = calendar.days(m);
                for opp_cum in cum.iter_mut() {
                    fill_baseline(&mut w, theta, &mut rng);
                    let (sum, sum_sq) = interval_log_sums(returns, &w, days.clone());
                    let ir = ir_from_sums(d, sum, sum_sq).ok_or_else(|| {
                        Error::Score("degenerate opponent interval variance in kernel".into())
                    })?;
                    *opp_cum += ir;
                }
                let qth_now = qth_largest(&cum, q);
                let dq = qth_now - qth_prev;
                qth_prev = qth_now;

                for (bi, &beta) in betas.iter().enumerate() {
                    fill_rank_opt(&mut w, beta, &mut rng)?;
                    let (sum, sum_sq) = interval_log_sums(returns, &w, days.clone());
                    let own = ir_from_sums(d, sum, sum_sq).ok_or_else(|| {
                        Error::Score("degenerate own interval variance in kernel".into())
                    })?;
                    incs[m][bi] = own - dq;
                }
            }
            Ok(incs)
        })
        .collect();

    let mut increments =
        vec![vec![Vec::with_capacity(n_paths); betas.len()]; n_stages];
    for path in per_path {
        let path = path?;
        for (m, stage) in path.into_iter().enumerate() {
            for (bi, inc) in stage.into_iter().enumerate() {
                increments[m][bi].push(inc);
            }
        }
    }
    TransitionKernel::from_samples(q, betas, increments)
}

/// Sum and sum of squares of interval log returns for a weight vector.
fn interval_log_sums(
    returns: &nalgebra::DMatrix<f64>,
    w: &[f64],
    days: std::ops::Range<usize>,
) -> (f64, f64) {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for t in days {
        let col = returns.column(t);
        let mut acc = 0.0;
        for (i, &wi) in w.iter().enumerate() {
            if wi != 0.0 {
                acc += wi * col[i];
            }
        }
        let lr = acc.ln_1p();
        sum += lr;
        sum_sq += lr * lr;
    }
    (sum, sum_sq)
}

/// q-th largest value (q = 1 is the maximum).
fn qth_largest(values: &[f64], q: usize) -> f64 {
    debug_assert!(q >= 1 && q <= values.len());
    let mut v = values.to_vec();
    let idx = q - 1;
    v.select_nth_unstable_by(idx, |a, b| b.total_cmp(a));
    v[idx]
}

/// Solved policy: the action table beta+(Delta, m) and value table V_m(Delta).
#[derive(Debug, Clone, PartialEq)]
pub struct RankPolicy {
    q: usize,
    delta_grid: Vec<f64>,
    /// beta[m][grid index], m 0-based.
    beta: Vec<Vec<f64>>,
    /// value[m][grid index] = probability of finishing at rank <= q.
    value: Vec<Vec<f64>>,
}

impl RankPolicy {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn n_stages(&self) -> usize {
        self.beta.len()
    }

    pub fn delta_grid(&self) -> &[f64] {
        &self.delta_grid
    }

    pub fn beta_table(&self) -> &[Vec<f64>] {
        &self.beta
    }

    pub fn value_table(&self) -> &[Vec<f64>] {
        &self.value
    }

    /// Action lookup for submission `m` (1-based) at gap `delta`: nearest
    /// grid point, with `delta` clamped to the grid range.
    pub fn act(&self, m: usize, delta: f64) -> f64 {
        assert!(m >= 1 && m <= self.beta.len(), "stage {m} outside the policy horizon");
        self.beta[m - 1][self.nearest_grid_index(delta)]
    }

    /// Value lookup (same convention as [`RankPolicy::act`]).
    pub fn value_at(&self, m: usize, delta: f64) -> f64 {
        assert!(m >= 1 && m <= self.value.len(), "stage {m} outside the policy horizon");
        self.value[m - 1][self.nearest_grid_index(delta)]
    }

    fn nearest_grid_index(&self, delta: f64) -> usize {
        let grid = &self.delta_grid;
        if delta <= grid[0] {
            return 0;
        }
        if delta >= grid[grid.len() - 1] {
            return grid.len() - 1;
        }
        let hi = grid.partition_point(|&g| g < delta);
        let lo = hi - 1;
        if (delta - grid[lo]) <= (grid[hi] - delta) {
            lo
        } else {
            hi
        }
    }

    /// Rows `m,delta,beta_plus,value` (full precision; reloadable).
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("m,delta,beta_plus,value\n");
        for m in 0..self.n_stages() {
            for (g, &delta) in self.delta_grid.iter().enumerate() {
                out.push_str(&format!("{},{},{},{}\n", m + 1, delta, self.beta[m][g], self.value[m][g]));
            }
        }
        out
    }

    pub fn from_csv_str(q: usize, text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("m,delta,beta_plus,value") => {}
            other => {
                return Err(Error::ingest(1, format!("bad policy header: {other:?}")));
            }
        }
        let mut grid: Vec<f64> = Vec::new();
        let mut beta: Vec<Vec<f64>> = Vec::new();
        let mut value: Vec<Vec<f64>> = Vec::new();
        for (idx, line) in lines.enumerate() {
            let row = idx + 2;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::ingest(row, "expected 4 fields"));
            }
            let m: usize = fields[0].parse().map_err(|e| Error::ingest(row, format!("{e}")))?;
            let d: f64 = fields[1].parse().map_err(|e| Error::ingest(row, format!("{e}")))?;
            let b: f64 = fields[2].parse().map_err(|e| Error::ingest(row, format!("{e}")))?;
            let v: f64 = fields[3].parse().map_err(|e| Error::ingest(row, format!("{e}")))?;
            if m == 0 {
                return Err(Error::ingest(row, "stage index is 1-based"));
            }
            while beta.len() < m {
                beta.push(Vec::new());
                value.push(Vec::new());
            }
            if m == 1 {
                grid.push(d);
            }
            beta[m - 1].push(b);
            value[m - 1].push(v);
        }
        if grid.is_empty() || beta.is_empty() {
            return Err(Error::ingest(0, "empty policy file"));
        }
        for (b, v) in beta.iter().zip(&value) {
            if b.len() != grid.len() || v.len() != grid.len() {
                return Err(Error::ingest(0, "ragged policy table"));
            }
        }
        Ok(Self { q, delta_grid: grid, beta, value })
    }
}

/// Backward induction over the kernel. The terminal stage maximizes the
/// empirical success probability P(Delta + inc >= 0); interior stages
/// maximize the expected interpolated next-stage value. Ties within one
/// Monte Carlo standard error of the best resolve toward higher beta+.
pub fn solve(kernel: &TransitionKernel, delta_grid: &[f64]) -> Result<RankPolicy> {
    if delta_grid.len() < 2 || delta_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("delta grid must be sorted and have >= 2 points".into()));
    }
    let n_stages = kernel.n_stages();
    let n_grid = delta_grid.len();
    let betas = kernel.betas();

    let mut beta_table = vec![vec![0.0; n_grid]; n_stages];
    let mut value_table = vec![vec![0.0; n_grid]; n_stages];

    for m in (0..n_stages).rev() {
        let next_value = if m + 1 < n_stages { Some(&value_table[m + 1]) } else { None };
        let stage: Vec<(f64, f64)> = delta_grid
            .par_iter()
            .map(|&delta| {
                // (value, se) per action.
                let evals: Vec<(f64, f64)> = (0..betas.len())
                    .map(|bi| {
                        let cell = kernel.cell(m, bi);
                        let n = cell.len() as f64;
                        match next_value {
                            None => {
                                let wins =
                                    cell.iter().filter(|&&inc| delta + inc >= 0.0).count() as f64;
                                let p = wins / n;
                                (p, (p * (1.0 - p) / n).sqrt())
                            }
                            Some(vnext) => {
                                let mut sum = 0.0;
                                let mut sum_sq = 0.0;
                                for &inc in cell {
                                    let v = interp_clamped(delta_grid, vnext, delta + inc);
                                    sum += v;
                                    sum_sq += v * v;
                                }
                                let mean = sum / n;
                                let var = (sum_sq / n - mean * mean).max(0.0);
                                (mean, (var / n).sqrt())
                            }
                        }
                    })
                    .collect();
                let (best_value, best_se) = evals
                    .iter()
                    .copied()
                    .max_by(|a, b| a.0.total_cmp(&b.0))
                    .expect("non-empty action grid");
                // Highest beta within one Monte Carlo se of the best; betas
                // ascend, so the last qualifying index wins.
                let mut chosen = betas[0];
                for (bi, &beta) in betas.iter().enumerate() {
                    if evals[bi].0 >= best_value - best_se {
                        chosen = beta;
                    }
                }
                (best_value, chosen)
            })
            .collect();
        for (g, (v, b)) in stage.into_iter().enumerate() {
            value_table[m][g] = v;
            beta_table[m][g] = b;
        }
    }

    Ok(RankPolicy { q: kernel.q(), delta_grid: delta_grid.to_vec(), beta: beta_table, value: value_table })
}

/// Piecewise-linear interpolation with boundary clamping.
fn interp_clamped(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if x <= grid[0] {
        return values[0];
    }
    if x >= grid[n - 1] {
        return values[n - 1];
    }
    let hi = grid.partition_point(|&g| g <= x);
    let lo = hi - 1;
    let t = (x - grid[lo]) / (grid[hi] - grid[lo]);
    values[lo] + t * (values[hi] - values[lo])
}
