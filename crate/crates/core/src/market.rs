//! Return-generating process: homogeneous assets with jointly normal daily
//! returns under a compound-symmetry covariance,
//!
//! ```text
//! r_t ~ IID N(mu 1, Sigma),   Sigma = (sigma_rr - sigma_rr') I + sigma_rr' J,
//! ```
//!
//! optionally decomposed into independent unpredictable and predictable parts
//! carrying shares (1 - lambda) and lambda of both mean and covariance.
//! Also houses the compound-symmetry covariance estimator (diagonal and
//! off-diagonal averages of the unbiased sample covariance) and the
//! annual-to-daily mean conversion.

use crate::calendar::IntervalCalendar;
use crate::error::{Error, Result};
use crate::rng;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

/// Parameters of the stylized market.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketModel {
    mu_r: f64,
    sigma_rr: f64,
    sigma_rr_prime: f64,
    lambda: f64,
    n_assets: usize,
    days_per_interval: usize,
}

impl MarketModel {
    /// Validates positive-definiteness of the implied covariance and the
    /// predictability share. For the nonnegative off-diagonal range used
    /// here, `0 <= sigma_rr' < sigma_rr` guarantees PD for any I >= 2.
    pub fn new(
        mu_r: f64,
        sigma_rr: f64,
        sigma_rr_prime: f64,
        lambda: f64,
        n_assets: usize,
        days_per_interval: usize,
    ) -> Result<Self> {
        if !mu_r.is_finite() || mu_r <= -1.0 {
            return Err(Error::Parameter(format!("mu_r must be finite and > -1, got {mu_r}")));
        }
        if !(sigma_rr > 0.0) {
            return Err(Error::Parameter(format!("sigma_rr must be > 0, got {sigma_rr}")));
        }
        if !(sigma_rr_prime >= 0.0) || sigma_rr_prime >= sigma_rr {
            return Err(Error::Parameter(format!(
                "sigma_rr_prime must lie in [0, sigma_rr), got {sigma_rr_prime} vs {sigma_rr}"
            )));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Parameter(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        if n_assets == 0 {
            return Err(Error::Parameter("n_assets must be positive".into()));
        }
        if days_per_interval == 0 {
            return Err(Error::Parameter("days_per_interval must be positive".into()));
        }
        Ok(Self { mu_r, sigma_rr, sigma_rr_prime, lambda, n_assets, days_per_interval })
    }

    /// The competition operating point: daily mean from 9.75% yearly returns
    /// compounded over 252 trading days, covariance estimated over the
    /// competition window, 100 assets, 20-day intervals.
    pub fn competition_default(lambda: f64) -> Result<Self> {
        let mu = daily_mean_from_annual(0.0975, 252)?;
        Self::new(mu, 0.00038, 0.00013, lambda, 100, 20)
    }

    pub fn mu_r(&self) -> f64 {
        self.mu_r
    }

    pub fn sigma_rr(&self) -> f64 {
        self.sigma_rr
    }

    pub fn sigma_rr_prime(&self) -> f64 {
        self.sigma_rr_prime
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn n_assets(&self) -> usize {
        self.n_assets
    }

    pub fn days_per_interval(&self) -> usize {
        self.days_per_interval
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(
            self.mu_r,
            self.sigma_rr,
            self.sigma_rr_prime,
            lambda,
            self.n_assets,
            self.days_per_interval,
        )
    }

    /// Mean vector mu 1.
    pub fn mean_vector(&self) -> DVector<f64> {
        DVector::from_element(self.n_assets, self.mu_r)
    }

    /// Dense covariance matrix Sigma.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mut sigma = DMatrix::from_element(self.n_assets, self.n_assets, self.sigma_rr_prime);
        for i in 0..self.n_assets {
            sigma[(i, i)] = self.sigma_rr;
        }
        sigma
    }
}

/// Daily simple returns for I assets over T days, with the interval calendar
/// and, when generated under a predictable market, the (unpredictable,
/// predictable) split satisfying r = r_u + r_p elementwise.
#[derive(Debug, Clone)]
pub struct ReturnPanel {
    returns: DMatrix<f64>,
    calendar: IntervalCalendar,
    split: Option<ReturnSplit>,
}

#[derive(Debug, Clone)]
pub struct ReturnSplit {
    pub unpredictable: DMatrix<f64>,
    pub predictable: DMatrix<f64>,
}

impl ReturnPanel {
    /// Wraps a raw I x T return matrix; columns are days.
    pub fn new(returns: DMatrix<f64>, calendar: IntervalCalendar) -> Result<Self> {
        if returns.ncols() != calendar.n_days() {
            return Err(Error::Parameter(format!(
                "panel has {} days but calendar expects {}",
                returns.ncols(),
                calendar.n_days()
            )));
        }
        if returns.nrows() == 0 {
            return Err(Error::Parameter("panel must contain at least one asset".into()));
        }
        Ok(Self { returns, calendar, split: None })
    }

    pub fn returns(&self) -> &DMatrix<f64> {
        &self.returns
    }

    pub fn calendar(&self) -> &IntervalCalendar {
        &self.calendar
    }

    pub fn n_assets(&self) -> usize {
        self.returns.nrows()
    }

    pub fn n_days(&self) -> usize {
        self.returns.ncols()
    }

    pub fn split(&self) -> Option<&ReturnSplit> {
        self.split.as_ref()
    }

    /// Sum of the predictable component over interval `m`, the signal known
    /// to an insider at submission time. All zeros when there is no split.
    pub fn predictable_interval_sum(&self, m: usize) -> DVector<f64> {
        let mut out = DVector::zeros(self.n_assets());
        if let Some(split) = &self.split {
            for t in self.calendar.days(m) {
                out += split.predictable.column(t);
            }
        }
        out
    }
}

/// Draws an IID-across-days panel from the model. Under `lambda > 0` the
/// panel carries the (r_u, r_p) split with exact elementwise additivity.
/// Identical seeds produce bit-identical panels.
pub fn sample_returns(model: &MarketModel, n_days: usize, seed: u64) -> Result<ReturnPanel> {
    if n_days == 0 {
        return Err(Error::Parameter("n_days must be >= 1".into()));
    }
    if n_days % model.days_per_interval() != 0 {
        return Err(Error::Parameter(format!(
            "n_days = {n_days} is not a whole number of {}-day intervals",
            model.days_per_interval()
        )));
    }
    let calendar = IntervalCalendar::new(n_days / model.days_per_interval(), model.days_per_interval())?;
    let mut rng = rng::stream_rng(seed, rng::DOMAIN_MARKET, 0);
    sample_returns_with_rng(model, calendar, &mut rng)
}

/// Sampler core, reusable with an externally managed RNG stream.
pub fn sample_returns_with_rng(
    model: &MarketModel,
    calendar: IntervalCalendar,
    rng: &mut impl Rng,
) -> Result<ReturnPanel> {
    let n_days = calendar.n_days();
    let i = model.n_assets();
    let lambda = model.lambda();

    if lambda == 0.0 {
        let mut returns = DMatrix::zeros(i, n_days);
        for t in 0..n_days {
            sample_cs_column(model, 1.0, rng, &mut returns.column_mut(t));
        }
        let mut panel = ReturnPanel::new(returns, calendar)?;
        panel.split = None;
        Ok(panel)
    } else {
        let mut unpredictable = DMatrix::zeros(i, n_days);
        let mut predictable = DMatrix::zeros(i, n_days);
        for t in 0..n_days {
            sample_cs_column(model, 1.0 - lambda, rng, &mut unpredictable.column_mut(t));
            sample_cs_column(model, lambda, rng, &mut predictable.column_mut(t));
        }
        let returns = &unpredictable + &predictable;
        let mut panel = ReturnPanel::new(returns, calendar)?;
        panel.split = Some(ReturnSplit { unpredictable, predictable });
        Ok(panel)
    }
}

/// One day of N(share * mu 1, share * Sigma) via the one-factor form of the
/// compound-symmetry covariance: r_i = m + a z_i + b c with a^2 = share *
/// (sigma_rr - sigma_rr'), b^2 = share * sigma_rr', z_i and c independent
/// standard normals. Exact for sigma_rr' >= 0 and far cheaper than a dense
/// Cholesky multiply.
fn sample_cs_column(
    model: &MarketModel,
    share: f64,
    rng: &mut impl Rng,
    col: &mut nalgebra::DVectorViewMut<f64>,
) {
    let mean = share * model.mu_r();
    let idio = (share * (model.sigma_rr() - model.sigma_rr_prime())).sqrt();
    let common = (share * model.sigma_rr_prime()).sqrt();
    let c: f64 = rng.sample(StandardNormal);
    let shared = mean + common * c;
    for x in col.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *x = shared + idio * z;
    }
}

/// Compound-symmetry MLE of the covariance: average of the diagonal and
/// off-diagonal entries of the unbiased sample covariance matrix.
pub fn fit_covariance_cs(panel: &ReturnPanel) -> Result<(f64, f64)> {
    let i = panel.n_assets();
    let t = panel.n_days();
    if i < 2 {
        return Err(Error::Estimation(
            "compound-symmetry fit needs >= 2 assets (off-diagonal mean undefined)".into(),
        ));
    }
    if t < 2 {
        return Err(Error::Estimation("compound-symmetry fit needs >= 2 days".into()));
    }

    // Row-centered data: X_c X_c^T / (T - 1) is the unbiased covariance.
    let mut centered = panel.returns().clone();
    for a in 0..i {
        let mut row = centered.row_mut(a);
        let m = row.iter().sum::<f64>() / t as f64;
        row.iter_mut().for_each(|x| *x -= m);
    }
    let s = &centered * centered.transpose() / (t - 1) as f64;

    let diag_mean = (0..i).map(|a| s[(a, a)]).sum::<f64>() / i as f64;
    let off_sum: f64 = (0..i)
        .flat_map(|a| (0..i).filter(move |&b| b != a).map(move |b| (a, b)))
        .map(|(a, b)| s[(a, b)])
        .sum();
    let off_mean = off_sum / (i * (i - 1)) as f64;
    Ok((diag_mean, off_mean))
}

/// Per-day mean that compounds to `annual_return` over `trading_days`:
/// mu = (1 + annual)^(1 / trading_days) - 1.
pub fn daily_mean_from_annual(annual_return: f64, trading_days: u32) -> Result<f64> {
    if trading_days == 0 {
        return Err(Error::Parameter("trading_days must be positive".into()));
    }
    if annual_return <= -1.0 {
        return Err(Error::Parameter(format!(
            "annual return must exceed -1, got {annual_return}"
        )));
    }
    Ok((1.0 + annual_return).powf(1.0 / trading_days as f64) - 1.0)
}
