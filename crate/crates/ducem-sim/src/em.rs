//! Textbook expectation-maximization for bivariate Gaussian mixtures.
//!
//! Kept free of any drone-specific modification so that the standard
//! algorithm's monotone-likelihood guarantee stays independently testable;
//! the clustering loop in [`crate::ducem`] layers its deviations on top.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::UserField;
use crate::geo::Vec2;

/// Eigenvalue floor applied to covariances after every M-step (m²).
/// Coincident samples would otherwise produce singular covariances.
pub const COVARIANCE_FLOOR: f64 = 1e-6;

/// Minimum eigenvalue for a covariance to count as positive-definite.
pub const MIN_EIGENVALUE: f64 = 1e-12;

/// Effective sample count below which a component counts as empty.
pub const EMPTY_COMPONENT_TOL: f64 = 1e-12;

const LN_2PI: f64 = 1.8378770664093453; // ln(2π)

#[derive(Debug, Error, PartialEq)]
pub enum EmError {
    #[error("covariance is not positive-definite (xx={xx}, xy={xy}, yy={yy})")]
    NonSpdCovariance { xx: f64, xy: f64, yy: f64 },
    #[error("invalid mixture parameters: {0}")]
    InvalidParams(String),
    #[error("all component densities underflowed for sample {sample}")]
    Underflow { sample: usize },
    #[error("component {component} has effective sample count {weight:.3e}, below tolerance")]
    EmptyComponent { component: usize, weight: f64 },
}

/// Symmetric 2×2 covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cov2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Cov2 {
    pub fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Cov2 { xx, xy, yy }
    }

    /// σ² · I.
    pub fn isotropic(variance: f64) -> Self {
        Cov2::new(variance, 0.0, variance)
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Eigenvalues in ascending order; closed form for the symmetric 2×2 case.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.yy);
        let disc = (0.25 * (self.xx - self.yy).powi(2) + self.xy * self.xy).sqrt();
        (mean - disc, mean + disc)
    }

    pub fn is_spd(&self) -> bool {
        self.eigenvalues().0 > MIN_EIGENVALUE
    }

    /// Quadratic form dᵀ Σ⁻¹ d without explicitly inverting.
    pub fn inv_quadratic_form(&self, d: Vec2) -> f64 {
        (self.yy * d.x * d.x - 2.0 * self.xy * d.x * d.y + self.xx * d.y * d.y) / self.det()
    }

    /// Raise the smaller eigenvalue to at least `min_eig` by shifting the
    /// diagonal, which keeps the eigenvectors exactly.
    pub fn floored(&self, min_eig: f64) -> Cov2 {
        let (lo, _) = self.eigenvalues();
        if lo >= min_eig {
            return *self;
        }
        let shift = min_eig - lo;
        Cov2::new(self.xx + shift, self.xy, self.yy + shift)
    }
}

/// One mixture component: weight P(j), mean μ_j, covariance Σ_j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmmComponent {
    pub weight: f64,
    pub mean: Vec2,
    pub cov: Cov2,
}

/// Full mixture parameter set θ = {P, μ, Σ}.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmParams {
    pub components: Vec<GmmComponent>,
}

impl GmmParams {
    pub fn new(components: Vec<GmmComponent>) -> Result<Self, EmError> {
        let p = GmmParams { components };
        p.validate()?;
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn validate(&self) -> Result<(), EmError> {
        if self.components.is_empty() {
            return Err(EmError::InvalidParams("mixture has no components".into()));
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(EmError::InvalidParams(format!(
                "mixing proportions sum to {total}, expected 1"
            )));
        }
        for c in &self.components {
            if !(c.weight >= 0.0 && c.weight.is_finite()) {
                return Err(EmError::InvalidParams(format!(
                    "mixing proportion {} out of range",
                    c.weight
                )));
            }
            if !c.cov.is_spd() {
                return Err(EmError::NonSpdCovariance {
                    xx: c.cov.xx,
                    xy: c.cov.xy,
                    yy: c.cov.yy,
                });
            }
        }
        Ok(())
    }
}

/// Posterior assignment probabilities p(j|t): M components × n samples, each
/// column summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Responsibilities {
    num_components: usize,
    num_samples: usize,
    values: Vec<f64>, // component-major: values[j * n + t]
}

impl Responsibilities {
    /// Build from hard labels: p(label(t)|t) = 1. Mostly useful in tests and
    /// for the k-means equivalence checks.
    pub fn one_hot(num_components: usize, labels: &[usize]) -> Self {
        let n = labels.len();
        let mut values = vec![0.0; num_components * n];
        for (t, &j) in labels.iter().enumerate() {
            assert!(j < num_components);
            values[j * n + t] = 1.0;
        }
        Responsibilities {
            num_components,
            num_samples: n,
            values,
        }
    }

    pub fn num_components(&self) -> usize {
        self.num_components
    }

    pub fn num_samples(&self) -> usize {
        self.num_samples
    }

    pub fn get(&self, j: usize, t: usize) -> f64 {
        self.values[j * self.num_samples + t]
    }

    /// Effective sample count n̂(j) = Σ_t p(j|t).
    pub fn component_weight(&self, j: usize) -> f64 {
        let n = self.num_samples;
        self.values[j * n..(j + 1) * n].iter().sum()
    }

    /// Index of the most responsible component for sample `t`; ties go to the
    /// lowest component index.
    pub fn argmax_component(&self, t: usize) -> usize {
        let mut best = 0;
        let mut best_val = self.get(0, t);
        for j in 1..self.num_components {
            let v = self.get(j, t);
            if v > best_val {
                best = j;
                best_val = v;
            }
        }
        best
    }
}

/// Bivariate normal density N(x; mean, cov).
pub fn gaussian_density(x: Vec2, mean: Vec2, cov: &Cov2) -> Result<f64, EmError> {
    log_gaussian_density(x, mean, cov).map(f64::exp)
}

/// ln N(x; mean, cov); preferred internally since well-separated clusters
/// underflow the raw density.
pub fn log_gaussian_density(x: Vec2, mean: Vec2, cov: &Cov2) -> Result<f64, EmError> {
    if !cov.is_spd() {
        return Err(EmError::NonSpdCovariance {
            xx: cov.xx,
            xy: cov.xy,
            yy: cov.yy,
        });
    }
    let q = cov.inv_quadratic_form(x - mean);
    Ok(-LN_2PI - 0.5 * cov.det().ln() - 0.5 * q)
}

/// E-step: posterior responsibilities, computed in log space with a
/// per-sample max subtraction so distant components do not underflow.
pub fn e_step(data: &UserField, params: &GmmParams) -> Result<Responsibilities, EmError> {
    params.validate()?;
    let m = params.len();
    let n = data.len();
    let mut values = vec![0.0; m * n];
    let mut log_terms = vec![0.0; m];
    for t in 0..n {
        let x = data.position(t);
        let mut max_term = f64::NEG_INFINITY;
        for (j, c) in params.components.iter().enumerate() {
            let term = c.weight.ln() + log_gaussian_density(x, c.mean, &c.cov)?;
            log_terms[j] = term;
            if term > max_term {
                max_term = term;
            }
        }
        if max_term == f64::NEG_INFINITY {
            return Err(EmError::Underflow { sample: t });
        }
        let mut denom = 0.0;
        for term in log_terms.iter() {
            denom += (term - max_term).exp();
        }
        for (j, term) in log_terms.iter().enumerate() {
            values[j * n + t] = (term - max_term).exp() / denom;
        }
    }
    Ok(Responsibilities {
        num_components: m,
        num_samples: n,
        values,
    })
}

/// M-step: reestimate weights, means, and covariances from responsibilities.
///
/// The covariance update uses the freshly computed mean and the
/// per-component normalizer 1/n̂(j); eigenvalues are floored afterwards.
pub fn m_step(data: &UserField, resp: &Responsibilities) -> Result<GmmParams, EmError> {
    let m = resp.num_components();
    let n = resp.num_samples();
    assert_eq!(n, data.len(), "responsibilities do not match the sample set");
    let mut components = Vec::with_capacity(m);
    for j in 0..m {
        let nj = resp.component_weight(j);
        if nj < EMPTY_COMPONENT_TOL {
            return Err(EmError::EmptyComponent {
                component: j,
                weight: nj,
            });
        }
        let mut mean = Vec2::ZERO;
        for t in 0..n {
            mean = mean + data.position(t) * resp.get(j, t);
        }
        mean = mean * (1.0 / nj);

        let (mut xx, mut xy, mut yy) = (0.0, 0.0, 0.0);
        for t in 0..n {
            let d = data.position(t) - mean;
            let p = resp.get(j, t);
            xx += p * d.x * d.x;
            xy += p * d.x * d.y;
            yy += p * d.y * d.y;
        }
        let cov = Cov2::new(xx / nj, xy / nj, yy / nj).floored(COVARIANCE_FLOOR);
        components.push(GmmComponent {
            weight: nj / n as f64,
            mean,
            cov,
        });
    }
    Ok(GmmParams { components })
}

/// Total log-likelihood Σ_t ln Σ_j P(j) N(x_t; μ_j, Σ_j).
///
/// Full underflow for some sample yields a −∞ sentinel rather than an error.
pub fn log_likelihood(data: &UserField, params: &GmmParams) -> Result<f64, EmError> {
    params.validate()?;
    let mut total = 0.0;
    let mut log_terms = vec![0.0; params.len()];
    for t in 0..data.len() {
        let x = data.position(t);
        let mut max_term = f64::NEG_INFINITY;
        for (j, c) in params.components.iter().enumerate() {
            let term = c.weight.ln() + log_gaussian_density(x, c.mean, &c.cov)?;
            log_terms[j] = term;
            max_term = max_term.max(term);
        }
        if max_term == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let sum: f64 = log_terms.iter().map(|t| (t - max_term).exp()).sum();
        total += max_term + sum.ln();
    }
    Ok(total)
}
