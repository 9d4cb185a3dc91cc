//! Portfolio generators: the random ternary baseline, the tangency portfolio
//! under predictability, and the two-level rank-optimization weights, plus
//! the competition gross-exposure constraint 0.25 <= sum|w| <= 1.

use crate::error::{Error, Result};
use crate::market::MarketModel;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;

/// Tolerance for the gross-exposure bounds; generators hit the bounds
/// exactly up to float summation error.
const GROSS_EPS: f64 = 1e-9;

/// Signed portfolio weights over the asset universe.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(DVector<f64>);

impl WeightVector {
    pub fn new(weights: DVector<f64>) -> Self {
        Self(weights)
    }

    pub fn from_slice(weights: &[f64]) -> Self {
        Self(DVector::from_row_slice(weights))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    /// Gross exposure sum|w_i|.
    pub fn gross(&self) -> f64 {
        self.0.iter().map(|w| w.abs()).sum()
    }

    /// Net exposure sum w_i.
    pub fn net(&self) -> f64 {
        self.0.iter().sum()
    }
}

/// Competition weight constraint: 0.25 <= sum|w| <= 1.
pub fn validate_weights(w: &WeightVector) -> bool {
    let gross = w.gross();
    gross >= 0.25 - GROSS_EPS && gross <= 1.0 + GROSS_EPS
}

/// Position counts of the random baseline portfolio: fixed numbers of long,
/// zero, and short positions over the I assets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaselineTheta {
    n_plus: usize,
    n_zero: usize,
    n_minus: usize,
}

impl BaselineTheta {
    pub fn new(n_plus: usize, n_zero: usize, n_minus: usize) -> Result<Self> {
        if n_plus + n_minus == 0 {
            return Err(Error::Parameter(
                "baseline portfolio needs at least one nonzero position".into(),
            ));
        }
        Ok(Self { n_plus, n_zero, n_minus })
    }

    pub fn n_plus(&self) -> usize {
        self.n_plus
    }

    pub fn n_zero(&self) -> usize {
        self.n_zero
    }

    pub fn n_minus(&self) -> usize {
        self.n_minus
    }

    pub fn n_assets(&self) -> usize {
        self.n_plus + self.n_zero + self.n_minus
    }

    /// Magnitude of each nonzero position, 1 / (n+ + n-); gross is exactly 1.
    pub fn magnitude(&self) -> f64 {
        1.0 / (self.n_plus + self.n_minus) as f64
    }
}

/// Fills `buf` (length I) with a fresh baseline draw: a uniformly random
/// assignment without replacement of n+ assets to +1/(n+ + n-), n- to the
/// negative counterpart, and the rest to zero.
pub fn fill_baseline(buf: &mut [f64], theta: &BaselineTheta, rng: &mut impl Rng) {
    assert_eq!(buf.len(), theta.n_assets(), "buffer must match the asset universe");
    let w = theta.magnitude();
    for (i, slot) in buf.iter_mut().enumerate() {
        *slot = if i < theta.n_plus {
            w
        } else if i < theta.n_plus + theta.n_minus {
            -w
        } else {
            0.0
        };
    }
    buf.shuffle(rng);
}

/// Baseline portfolio draw. Always satisfies the weight constraint.
pub fn sample_baseline(theta: &BaselineTheta, rng: &mut impl Rng) -> WeightVector {
    let mut buf = vec![0.0; theta.n_assets()];
    fill_baseline(&mut buf, theta, rng);
    WeightVector(DVector::from_vec(buf))
}

/// Solves the SPD system `sigma x = b` by Cholesky.
pub fn solve_spd(sigma: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let chol = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numeric("covariance matrix is not positive definite".into()))?;
    Ok(chol.solve(b))
}

/// Rescales raw weights so that sum|w| = gross_cap. The information-ratio
/// objective is invariant to positive scaling, so the cap is the binding
/// feasible choice.
fn rescale_to_gross(raw: DVector<f64>, gross_cap: f64) -> Result<WeightVector> {
    let gross: f64 = raw.iter().map(|w| w.abs()).sum();
    if gross == 0.0 || !gross.is_finite() {
        return Err(Error::Degenerate("tangency weights collapse to the zero vector".into()));
    }
    Ok(WeightVector(raw * (gross_cap / gross)))
}

/// Tangency portfolio under predictability share lambda:
/// raw = Sigma^-1 ((1 - lambda) mu + sum of predictable returns over the
/// interval), rescaled to the gross cap. With lambda = 0 and compound
/// symmetry this is exactly the equal-weighted long portfolio.
pub fn tangency_weights(
    model: &MarketModel,
    predictable_sum: &DVector<f64>,
    gross_cap: f64,
) -> Result<WeightVector> {
    if predictable_sum.len() != model.n_assets() {
        return Err(Error::Parameter(format!(
            "predictable sum has length {} but the model has {} assets",
            predictable_sum.len(),
            model.n_assets()
        )));
    }
    if !(gross_cap > 0.0) {
        return Err(Error::Parameter("gross cap must be positive".into()));
    }
    let target = model.mean_vector() * (1.0 - model.lambda()) + predictable_sum;
    let raw = solve_spd(&model.covariance(), &target)?;
    rescale_to_gross(raw, gross_cap)
}

/// Tangency solver with the Cholesky factor computed once; used by the arena
/// where the same model is solved against thousands of predictable sums.
pub struct TangencyEngine {
    chol: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    scaled_mean: DVector<f64>,
    gross_cap: f64,
}

impl TangencyEngine {
    pub fn new(model: &MarketModel, gross_cap: f64) -> Result<Self> {
        if !(gross_cap > 0.0) {
            return Err(Error::Parameter("gross cap must be positive".into()));
        }
        let chol = model
            .covariance()
            .cholesky()
            .ok_or_else(|| Error::Numeric("covariance matrix is not positive definite".into()))?;
        Ok(Self { chol, scaled_mean: model.mean_vector() * (1.0 - model.lambda()), gross_cap })
    }

    pub fn weights(&self, predictable_sum: &DVector<f64>) -> Result<WeightVector> {
        let raw = self.chol.solve(&(&self.scaled_mean + predictable_sum));
        rescale_to_gross(raw, self.gross_cap)
    }
}

/// Fills `buf` with rank-optimization weights: round(beta_plus * I) assets at
/// +1/I and the rest at -1/I, assigned uniformly at random. Gross is exactly
/// 1 (the paper's +-0.01 at I = 100).
pub fn fill_rank_opt(buf: &mut [f64], beta_plus: f64, rng: &mut impl Rng) -> Result<()> {
    if !(0.0..=1.0).contains(&beta_plus) {
        return Err(Error::Parameter(format!("beta_plus must lie in [0, 1], got {beta_plus}")));
    }
    let n_assets = buf.len();
    if n_assets == 0 {
        return Err(Error::Parameter("rank-optimization weights need assets".into()));
    }
    let n_long = (beta_plus * n_assets as f64).round() as usize;
    let magnitude = 1.0 / n_assets as f64;
    for (i, slot) in buf.iter_mut().enumerate() {
        *slot = if i < n_long { magnitude } else { -magnitude };
    }
    buf.shuffle(rng);
    Ok(())
}

/// Rank-optimization portfolio draw (two-level weights at long share beta+).
pub fn rank_opt_weights(
    beta_plus: f64,
    n_assets: usize,
    rng: &mut impl Rng,
) -> Result<WeightVector> {
    let mut buf = vec![0.0; n_assets];
    fill_rank_opt(&mut buf, beta_plus, rng)?;
    Ok(WeightVector(DVector::from_vec(buf)))
}
