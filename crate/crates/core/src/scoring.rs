//! Competition scoring: daily team log returns, the information ratio
//!
//! ```text
//! IR = sum(ret_t) / sd(ret_t),   sd with divisor (n - 1), mean with divisor n,
//! ```
//!
//! the worst-count ranking rank_k = card{k' : IR_k' >= IR_k}, and the
//! per-interval-standardized additive IR variant whose cumulative score is
//! the plain sum of per-interval IRs.

use crate::calendar::IntervalCalendar;
use crate::error::{Error, Result};
use crate::io::SubmissionPanel;
use crate::market::ReturnPanel;
use nalgebra::DMatrix;

/// Information ratio of a daily log-return series, exactly as the
/// competition computes it. Errors on windows shorter than 2 days or with
/// zero sample variance.
pub fn ir(series: &[f64]) -> Result<f64> {
    let n = series.len();
    if n < 2 {
        return Err(Error::Score(format!("IR needs at least 2 days, got {n}")));
    }
    let sum: f64 = series.iter().sum();
    let mean = sum / n as f64;
    let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    if var <= 0.0 {
        return Err(Error::Score("IR undefined for zero-variance series".into()));
    }
    Ok(sum / var.sqrt())
}

/// IR from running sums, for incremental scoring. Returns `None` when the
/// window is too short or the variance degenerate.
pub fn ir_from_sums(n: usize, sum: f64, sum_sq: f64) -> Option<f64> {
    if n < 2 {
        return None;
    }
    let var = (sum_sq - sum * sum / n as f64) / (n - 1) as f64;
    if var <= 0.0 {
        return None;
    }
    Some(sum / var.sqrt())
}

/// Worst-count competition rank: rank_k = card{k' : v_k' >= v_k}. Ties share
/// the larger rank. `NEG_INFINITY` entries (degenerate scores) rank last.
pub fn rank(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    values
        .iter()
        .map(|&v| {
            // count of entries >= v as n - count of entries < v
            let below = sorted.partition_point(|&x| x < v);
            n - below
        })
        .collect()
}

/// Per-interval IRs standardized by each interval's own standard deviation;
/// summing entries gives the cumulative additive score.
pub fn ir_additive(series: &[f64], calendar: &IntervalCalendar) -> Result<Vec<f64>> {
    if series.len() != calendar.n_days() {
        return Err(Error::Score(format!(
            "series has {} days but calendar expects {}",
            series.len(),
            calendar.n_days()
        )));
    }
    (0..calendar.n_intervals()).map(|m| ir(&series[calendar.days(m)])).collect()
}

/// Daily plain team returns RET_{t,k} = sum_i w_{i,m,k} r_{i,t} as a T x K
/// matrix. Weights for the interval containing each day come from the
/// submission panel (carry-forward already applied); teams are zero before
/// their first active interval.
pub fn plain_returns(subs: &SubmissionPanel, panel: &ReturnPanel) -> Result<DMatrix<f64>> {
    if subs.n_assets() != panel.n_assets() {
        return Err(Error::Parameter(format!(
            "submissions cover {} assets but the panel has {}",
            subs.n_assets(),
            panel.n_assets()
        )));
    }
    if subs.n_intervals() != panel.calendar().n_intervals() {
        return Err(Error::Parameter(format!(
            "submissions cover {} intervals but the panel has {}",
            subs.n_intervals(),
            panel.calendar().n_intervals()
        )));
    }
    let t_days = panel.n_days();
    let k = subs.n_teams();
    let mut ret = DMatrix::zeros(t_days, k);
    for m in 0..subs.n_intervals() {
        let days = panel.calendar().days(m);
        // (d x I) * (I x K) block for the interval.
        let r_block = panel.returns().columns(days.start, days.len());
        let block = r_block.transpose() * subs.interval_weights(m);
        ret.view_mut((days.start, 0), (days.len(), k)).copy_from(&block);
    }
    Ok(ret)
}

/// Daily log returns ret = ln(1 + RET). A return RET <= -1 is a hard error
/// (team bankruptcy), never clipped.
pub fn daily_returns(subs: &SubmissionPanel, panel: &ReturnPanel) -> Result<DMatrix<f64>> {
    let mut ret = plain_returns(subs, panel)?;
    for k in 0..ret.ncols() {
        for t in 0..ret.nrows() {
            let x = ret[(t, k)];
            if x <= -1.0 {
                return Err(Error::Bankruptcy { team: k, day: t, ret: x });
            }
            ret[(t, k)] = x.ln_1p();
        }
    }
    Ok(ret)
}

/// Scored competition: daily log returns per team with window IRs and ranks.
/// Degenerate windows (no active days, zero variance) score as negative
/// infinity, i.e. the worst rank.
#[derive(Debug, Clone)]
pub struct ScoreBoard {
    team_ids: Vec<String>,
    calendar: IntervalCalendar,
    /// T x K daily log returns (zero before a team's first active day).
    log_returns: DMatrix<f64>,
    /// First scored day per team.
    active_from_day: Vec<usize>,
}

impl ScoreBoard {
    pub fn new(subs: &SubmissionPanel, panel: &ReturnPanel) -> Result<Self> {
        let log_returns = daily_returns(subs, panel)?;
        let dpi = panel.calendar().days_per_interval();
        let active_from_day = subs.first_active().iter().map(|&m| m * dpi).collect();
        Ok(Self {
            team_ids: subs.team_ids().to_vec(),
            calendar: *panel.calendar(),
            log_returns,
            active_from_day,
        })
    }

    pub fn team_ids(&self) -> &[String] {
        &self.team_ids
    }

    pub fn calendar(&self) -> &IntervalCalendar {
        &self.calendar
    }

    pub fn n_teams(&self) -> usize {
        self.team_ids.len()
    }

    pub fn log_returns(&self) -> &DMatrix<f64> {
        &self.log_returns
    }

    /// IR of every team over days `t1..=t2`, with each team's window clipped
    /// to start no earlier than its first active day.
    pub fn ir_window(&self, t1: usize, t2: usize) -> Vec<f64> {
        (0..self.n_teams())
            .map(|k| {
                let start = t1.max(self.active_from_day[k]);
                if t2 < start {
                    return f64::NEG_INFINITY;
                }
                let series: Vec<f64> = (start..=t2).map(|t| self.log_returns[(t, k)]).collect();
                ir(&series).unwrap_or(f64::NEG_INFINITY)
            })
            .collect()
    }

    pub fn ranks_window(&self, t1: usize, t2: usize) -> Vec<usize> {
        rank(&self.ir_window(t1, t2))
    }

    pub fn interval_ir(&self, m: usize) -> Vec<f64> {
        let days = self.calendar.days(m);
        self.ir_window(days.start, days.end - 1)
    }

    pub fn global_ir(&self) -> Vec<f64> {
        self.ir_window(0, self.calendar.n_days() - 1)
    }

    pub fn quarter_ir(&self, q: usize) -> Vec<f64> {
        let days = self.calendar.quarter_days(q);
        self.ir_window(days.start, days.end - 1)
    }

    /// Cumulative IR over intervals 0..=m.
    pub fn cumulative_ir(&self, m: usize) -> Vec<f64> {
        self.ir_window(0, self.calendar.days(m).end - 1)
    }

    /// Leaderboard rows `team_id,window,ir,rank` for every interval, every
    /// quarter, and the global window (full-precision floats, the exchange
    /// format consumed by the moment-matching calibration).
    pub fn to_leaderboard_csv(&self) -> String {
        let mut out = String::from("team_id,window,ir,rank\n");
        let mut emit = |window: &str, values: &[f64]| {
            let ranks = rank(values);
            for (k, team) in self.team_ids.iter().enumerate() {
                out.push_str(&format!("{},{},{},{}\n", team, window, values[k], ranks[k]));
            }
        };
        for m in 0..self.calendar.n_intervals() {
            emit(&format!("m{}", m + 1), &self.interval_ir(m));
        }
        for q in 0..self.calendar.n_quarters() {
            emit(&format!("q{}", q + 1), &self.quarter_ir(q));
        }
        emit("global", &self.global_ir());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn ir_matches_hand_computed_oracle() {
        // Eq. 4 applied literally to [0.01, -0.01, 0.02]:
        // sum = 0.02, mean = 0.02/3, sd over divisor 2.
        let series = [0.01, -0.01, 0.02];
        let sum = 0.02;
        let mean: f64 = sum / 3.0;
        let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 2.0;
        let expect = sum / var.sqrt();
        assert_relative_eq!(ir(&series).unwrap(), expect, epsilon = 1e-15);
        // And the running-sums path agrees.
        let sum_sq: f64 = series.iter().map(|x| x * x).sum();
        assert_relative_eq!(ir_from_sums(3, sum, sum_sq).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn ir_rejects_constant_series() {
        assert!(matches!(ir(&[0.01, 0.01, 0.01]), Err(Error::Score(_))));
        assert!(ir(&[0.01]).is_err());
        assert!(ir_from_sums(3, 0.03, 0.0003).is_none());
    }

    #[test]
    fn ir_negation_antisymmetry() {
        let series = [0.013, -0.002, 0.007, -0.011, 0.004];
        let neg: Vec<f64> = series.iter().map(|x| -x).collect();
        assert_relative_eq!(ir(&series).unwrap(), -ir(&neg).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn ir_scale_invariance() {
        let series = [0.013, -0.002, 0.007, -0.011, 0.004];
        let scaled: Vec<f64> = series.iter().map(|x| 3.7 * x).collect();
        assert_relative_eq!(ir(&series).unwrap(), ir(&scaled).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn rank_matches_definition() {
        assert_eq!(rank(&[3.0, 1.0, 2.0]), vec![1, 3, 2]);
        assert_eq!(rank(&[2.0, 2.0, 1.0]), vec![2, 2, 3]);
        assert_eq!(rank(&[f64::NEG_INFINITY, 1.0]), vec![2, 1]);
    }

    #[test]
    fn rank_agrees_with_counting_oracle_on_random_input() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from(8);
        let values: Vec<f64> = (0..163).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let got = rank(&values);
        for (k, &v) in values.iter().enumerate() {
            let expect = values.iter().filter(|&&x| x >= v).count();
            assert_eq!(got[k], expect);
        }
        let maxi = values.iter().cloned().fold(f64::MIN, f64::max);
        let mini = values.iter().cloned().fold(f64::MAX, f64::min);
        assert_eq!(got[values.iter().position(|&x| x == maxi).unwrap()], 1);
        assert_eq!(got[values.iter().position(|&x| x == mini).unwrap()], 163);
    }

    #[test]
    fn additive_ir_sums_per_interval_values() {
        let cal = IntervalCalendar::new(3, 4).unwrap();
        let series: Vec<f64> = (0..12).map(|t| ((t * 7 + 3) % 5) as f64 * 0.01 - 0.02).collect();
        let per = ir_additive(&series, &cal).unwrap();
        assert_eq!(per.len(), 3);
        for (m, v) in per.iter().enumerate() {
            assert_relative_eq!(*v, ir(&series[cal.days(m)]).unwrap(), epsilon = 1e-15);
        }
        // Single interval reduces to plain IR.
        let cal1 = IntervalCalendar::new(1, 12).unwrap();
        let one = ir_additive(&series, &cal1).unwrap();
        assert_relative_eq!(one[0], ir(&series).unwrap(), epsilon = 1e-15);
    }

    fn tiny_board() -> (SubmissionPanel, ReturnPanel) {
        // 2 assets, 2 intervals x 2 days, 2 teams.
        let assets: Vec<String> = vec!["a".into(), "b".into()];
        let w1 = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, -0.5]);
        let w2 = DMatrix::from_row_slice(2, 2, &[0.25, -0.5, -0.25, 0.5]);
        let subs = SubmissionPanel::from_matrices(
            vec!["t1".into(), "t2".into()],
            assets,
            vec![w1, w2],
        )
        .unwrap();
        let returns = DMatrix::from_row_slice(
            2,
            4,
            &[0.01, -0.02, 0.03, 0.01, 0.02, 0.01, -0.01, 0.02],
        );
        let cal = IntervalCalendar::new(2, 2).unwrap();
        let panel = ReturnPanel::new(returns, cal).unwrap();
        (subs, panel)
    }

    #[test]
    fn plain_returns_match_hand_dot_products() {
        let (subs, panel) = tiny_board();
        let ret = plain_returns(&subs, &panel).unwrap();
        // day 0, team 0: 0.5 * 0.01 + 0.5 * 0.02 = 0.015
        assert_relative_eq!(ret[(0, 0)], 0.015, epsilon = 1e-15);
        // day 0, team 1: 0.5 * 0.01 - 0.5 * 0.02 = -0.005
        assert_relative_eq!(ret[(0, 1)], -0.005, epsilon = 1e-15);
        // day 2 uses interval-2 weights: team 0: 0.25 * 0.03 - 0.25 * -0.01 = 0.01
        assert_relative_eq!(ret[(2, 0)], 0.01, epsilon = 1e-15);
        // log transform
        let logret = daily_returns(&subs, &panel).unwrap();
        assert_relative_eq!(logret[(0, 0)], 0.015f64.ln_1p(), epsilon = 1e-15);
    }

    #[test]
    fn single_asset_half_weight_case() {
        // w = 0.5 on one asset returning -0.02 -> RET = -0.01, ret = ln(0.99).
        let subs = SubmissionPanel::from_matrices(
            vec!["t".into()],
            vec!["a".into()],
            vec![DMatrix::from_row_slice(1, 1, &[0.5])],
        )
        .unwrap();
        let cal = IntervalCalendar::new(1, 2).unwrap();
        let panel =
            ReturnPanel::new(DMatrix::from_row_slice(1, 2, &[-0.02, 0.01]), cal).unwrap();
        let ret = daily_returns(&subs, &panel).unwrap();
        assert_relative_eq!(ret[(0, 0)], 0.99f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn bankruptcy_is_a_hard_error() {
        let subs = SubmissionPanel::from_matrices(
            vec!["t".into()],
            vec!["a".into()],
            vec![DMatrix::from_row_slice(1, 1, &[1.0])],
        )
        .unwrap();
        let cal = IntervalCalendar::new(1, 2).unwrap();
        // Corrupted input: asset return of -1.5 drives RET below -1.
        let panel =
            ReturnPanel::new(DMatrix::from_row_slice(1, 2, &[-1.5, 0.01]), cal).unwrap();
        assert!(matches!(
            daily_returns(&subs, &panel),
            Err(Error::Bankruptcy { team: 0, day: 0, .. })
        ));
    }

    #[test]
    fn zero_weight_day_scores_zero_return() {
        let subs = SubmissionPanel::from_matrices(
            vec!["t".into()],
            vec!["a".into()],
            vec![DMatrix::from_row_slice(1, 1, &[0.0])],
        )
        .unwrap();
        let cal = IntervalCalendar::new(1, 2).unwrap();
        let panel = ReturnPanel::new(DMatrix::from_row_slice(1, 2, &[0.05, 0.01]), cal).unwrap();
        let ret = daily_returns(&subs, &panel).unwrap();
        assert_eq!(ret[(0, 0)], 0.0);
        assert_eq!(ret[(1, 0)], 0.0);
    }

    #[test]
    fn scoreboard_windows_and_csv() {
        let (subs, panel) = tiny_board();
        let board = ScoreBoard::new(&subs, &panel).unwrap();
        let global = board.global_ir();
        assert_eq!(global.len(), 2);
        let ranks = board.ranks_window(0, 3);
        assert_eq!(ranks.iter().filter(|&&r| r == 1).count(), 1);
        let csv = board.to_leaderboard_csv();
        assert!(csv.starts_with("team_id,window,ir,rank\n"));
        assert!(csv.contains("global"));
        assert!(csv.contains("m1"));
    }

    #[test]
    fn rank_invariant_under_increasing_transform() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from(5);
        let values: Vec<f64> = (0..50).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let mapped: Vec<f64> = values.iter().map(|x| x.exp() + 3.0 * x).collect();
        assert_eq!(rank(&values), rank(&mapped));
    }
}
