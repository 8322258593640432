//! Online Probit classifier with independently Gaussian-distributed
//! weights, trained per batch by stochastic gradient ascent on the
//! marginal log-likelihood.
//!
//! Marginalizing the weights out of the Probit link gives the closed form
//! `P(y=+1 | x) = Phi(mu.x / sqrt(1 + x' diag(sigma^2) x))`, which is
//! differentiable in both the means and the standard deviations. The
//! standard deviations (not the variances) are the optimized quantity;
//! flooring their magnitude keeps every variance strictly positive
//! without constrained optimization.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dist::GaussianParamDist;
use crate::math;

/// Magnitude floor applied to each standard deviation after a gradient step.
pub const SIGMA_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbitError {
    /// Feature count disagrees with the model dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A feature value is NaN or infinite.
    NonFiniteFeature { row: usize, col: usize },
    /// A label is not exactly -1 or +1.
    InvalidLabel { row: usize },
    /// Batch holds no observations.
    EmptyBatch,
    /// Rows of unequal length, or row/label count mismatch.
    RaggedInput,
    /// Hyperparameter out of range.
    InvalidConfig(&'static str),
}

impl fmt::Display for ProbitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbitError::DimensionMismatch { expected, got } => {
                write!(f, "feature dimension mismatch: expected {expected}, got {got}")
            }
            ProbitError::NonFiniteFeature { row, col } => {
                write!(f, "non-finite feature at row {row}, column {col}")
            }
            ProbitError::InvalidLabel { row } => {
                write!(f, "label at row {row} is not -1 or +1")
            }
            ProbitError::EmptyBatch => write!(f, "batch holds no observations"),
            ProbitError::RaggedInput => write!(f, "rows of unequal length"),
            ProbitError::InvalidConfig(what) => write!(f, "invalid hyperparameter: {what}"),
        }
    }
}

impl core::error::Error for ProbitError {}

/// Dense row-major feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ProbitError> {
        if rows.is_empty() {
            return Err(ProbitError::EmptyBatch);
        }
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(ProbitError::RaggedInput);
            }
            for (c, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ProbitError::NonFiniteFeature { row: r, col: c });
                }
                data.push(v);
            }
        }
        Ok(Self {
            data,
            rows: rows.len(),
            cols,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

/// One training batch: a feature matrix and labels in {-1, +1}.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledBatch {
    x: FeatureMatrix,
    y: Vec<f64>,
}

impl LabeledBatch {
    pub fn new(x: FeatureMatrix, y: Vec<f64>) -> Result<Self, ProbitError> {
        if y.len() != x.n_rows() {
            return Err(ProbitError::RaggedInput);
        }
        for (r, &label) in y.iter().enumerate() {
            if label != 1.0 && label != -1.0 {
                return Err(ProbitError::InvalidLabel { row: r });
            }
        }
        Ok(Self { x, y })
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.x
    }

    pub fn labels(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// Training hyperparameters: passes per batch and the two learning rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbitConfig {
    pub epochs: usize,
    pub lr_mu: f64,
    pub lr_sigma: f64,
}

impl Default for ProbitConfig {
    fn default() -> Self {
        Self {
            epochs: 10,
            lr_mu: 0.01,
            lr_sigma: 0.01,
        }
    }
}

impl ProbitConfig {
    pub fn validate(&self) -> Result<(), ProbitError> {
        if self.epochs == 0 {
            return Err(ProbitError::InvalidConfig("epochs must be >= 1"));
        }
        if !(self.lr_mu > 0.0 && self.lr_mu.is_finite()) {
            return Err(ProbitError::InvalidConfig("lr_mu must be positive"));
        }
        if !(self.lr_sigma > 0.0 && self.lr_sigma.is_finite()) {
            return Err(ProbitError::InvalidConfig("lr_sigma must be positive"));
        }
        Ok(())
    }
}

/// Outcome of a batch update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitOutcome {
    Applied,
    /// A non-finite gradient appeared; the whole batch update was rolled
    /// back and the previous parameters kept.
    SkippedNonFinite,
}

/// Online Probit learner. Single-writer: updates must be serialized
/// externally; snapshots are immutable and freely shareable.
#[derive(Debug, Clone)]
pub struct ProbitModel {
    mu: Vec<f64>,
    sigma: Vec<f64>,
    config: ProbitConfig,
    skipped_updates: usize,
}

impl ProbitModel {
    /// Fresh model with zero means and unit standard deviations.
    pub fn new(k: usize, config: ProbitConfig) -> Result<Self, ProbitError> {
        config.validate()?;
        if k == 0 {
            return Err(ProbitError::InvalidConfig("dimension must be >= 1"));
        }
        Ok(Self {
            mu: vec![0.0; k],
            sigma: vec![1.0; k],
            config,
            skipped_updates: 0,
        })
    }

    /// Model with explicit parameters, for resuming or testing.
    pub fn from_parts(
        mu: Vec<f64>,
        sigma: Vec<f64>,
        config: ProbitConfig,
    ) -> Result<Self, ProbitError> {
        config.validate()?;
        if mu.is_empty() || mu.len() != sigma.len() {
            return Err(ProbitError::RaggedInput);
        }
        for (i, &s) in sigma.iter().enumerate() {
            if !(s > 0.0 && s.is_finite()) {
                return Err(ProbitError::NonFiniteFeature { row: 0, col: i });
            }
        }
        Ok(Self {
            mu,
            sigma,
            config,
            skipped_updates: 0,
        })
    }

    pub fn k(&self) -> usize {
        self.mu.len()
    }

    pub fn config(&self) -> &ProbitConfig {
        &self.config
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Batch updates rolled back because of non-finite gradients.
    pub fn skipped_updates(&self) -> usize {
        self.skipped_updates
    }

    /// Immutable copy of the current parameter distribution.
    pub fn snapshot(&self) -> GaussianParamDist {
        let sigma2 = self.sigma.iter().map(|s| s * s).collect();
        GaussianParamDist::new(self.mu.clone(), sigma2)
            .expect("model parameters are valid by construction")
    }

    fn check_dim(&self, cols: usize) -> Result<(), ProbitError> {
        if cols != self.k() {
            return Err(ProbitError::DimensionMismatch {
                expected: self.k(),
                got: cols,
            });
        }
        Ok(())
    }

    /// `P(y=+1 | x)` per row, clamped into the open unit interval.
    pub fn predict_proba(&self, x: &FeatureMatrix) -> Result<Vec<f64>, ProbitError> {
        self.check_dim(x.n_cols())?;
        let mut out = Vec::with_capacity(x.n_rows());
        for r in 0..x.n_rows() {
            let row = x.row(r);
            let (a, v) = self.projection(row);
            let p = math::normal_cdf(a / math::sqrt(v));
            out.push(p.clamp(1e-15, 1.0 - 1e-15));
        }
        Ok(out)
    }

    /// Hard labels in {-1, +1} at the 0.5 threshold.
    pub fn predict(&self, x: &FeatureMatrix) -> Result<Vec<f64>, ProbitError> {
        Ok(self
            .predict_proba(x)?
            .into_iter()
            .map(|p| if p >= 0.5 { 1.0 } else { -1.0 })
            .collect())
    }

    /// mu.x and 1 + x' diag(sigma^2) x for one row.
    fn projection(&self, row: &[f64]) -> (f64, f64) {
        let mut a = 0.0;
        let mut v = 1.0;
        for i in 0..self.k() {
            a += self.mu[i] * row[i];
            v += self.sigma[i] * self.sigma[i] * row[i] * row[i];
        }
        (a, v)
    }

    /// Batch-mean marginal log-likelihood.
    pub fn log_likelihood(&self, batch: &LabeledBatch) -> Result<f64, ProbitError> {
        self.check_dim(batch.features().n_cols())?;
        let mut total = 0.0;
        for r in 0..batch.len() {
            let row = batch.features().row(r);
            let (a, v) = self.projection(row);
            let z = batch.labels()[r] * a / math::sqrt(v);
            total += math::log_normal_cdf(z);
        }
        Ok(total / batch.len() as f64)
    }

    /// Analytic gradients of the batch-mean log-likelihood with respect to
    /// the means and the standard deviations.
    pub fn log_likelihood_gradients(
        &self,
        batch: &LabeledBatch,
    ) -> Result<(Vec<f64>, Vec<f64>), ProbitError> {
        self.check_dim(batch.features().n_cols())?;
        let k = self.k();
        let mut grad_mu = vec![0.0; k];
        let mut grad_sigma = vec![0.0; k];
        for r in 0..batch.len() {
            let row = batch.features().row(r);
            let y = batch.labels()[r];
            let (a, v) = self.projection(row);
            let s = math::sqrt(v);
            let z = y * a / s;
            let lam = math::inv_mills(z);
            let v32 = v * s;
            for i in 0..k {
                let xi = row[i];
                grad_mu[i] += lam * y * xi / s;
                grad_sigma[i] -= lam * y * a * self.sigma[i] * xi * xi / v32;
            }
        }
        let inv_b = 1.0 / batch.len() as f64;
        for i in 0..k {
            grad_mu[i] *= inv_b;
            grad_sigma[i] *= inv_b;
        }
        Ok((grad_mu, grad_sigma))
    }

    /// Run `epochs` gradient-ascent passes over the batch. A non-finite
    /// gradient anywhere rolls the whole batch update back.
    pub fn partial_fit(&mut self, batch: &LabeledBatch) -> Result<FitOutcome, ProbitError> {
        self.check_dim(batch.features().n_cols())?;
        let saved_mu = self.mu.clone();
        let saved_sigma = self.sigma.clone();
        for _ in 0..self.config.epochs {
            let (grad_mu, grad_sigma) = self.log_likelihood_gradients(batch)?;
            let finite = grad_mu.iter().chain(grad_sigma.iter()).all(|g| g.is_finite());
            if !finite {
                self.mu = saved_mu;
                self.sigma = saved_sigma;
                self.skipped_updates += 1;
                return Ok(FitOutcome::SkippedNonFinite);
            }
            for i in 0..self.k() {
                self.mu[i] += self.config.lr_mu * grad_mu[i];
                self.sigma[i] =
                    math::abs(self.sigma[i] + self.config.lr_sigma * grad_sigma[i]).max(SIGMA_FLOOR);
            }
        }
        Ok(FitOutcome::Applied)
    }
}
