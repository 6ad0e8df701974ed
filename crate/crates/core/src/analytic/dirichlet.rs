//! First and second moments of the Dirichlet distribution.

use crate::error::{Error, Result};

/// Closed-form moments of `Dir(a_1, ..., a_m)`: with `a_0 = sum a_i`,
/// `E[X_i] = a_i / a_0`, `V[X_i] = a_i (a_0 - a_i) / (a_0^2 (a_0 + 1))`,
/// and `Cov[X_i, X_j] = -a_i a_j / (a_0^2 (a_0 + 1))` for `i != j`.
#[derive(Debug, Clone)]
pub struct DirichletMoments {
    params: Vec<f64>,
    total: f64,
}

impl DirichletMoments {
    pub fn new(params: &[f64]) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::EmptyInput);
        }
        if params.iter().any(|&a| a <= 0.0 || !a.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dirichlet parameter",
                requirement: "positive and finite",
                value: format!("{params:?}"),
            });
        }
        Ok(DirichletMoments {
            params: params.to_vec(),
            total: params.iter().sum(),
        })
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn mean(&self, i: usize) -> f64 {
        self.params[i] / self.total
    }

    pub fn variance(&self, i: usize) -> f64 {
        let a0 = self.total;
        self.params[i] * (a0 - self.params[i]) / (a0 * a0 * (a0 + 1.0))
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.variance(i);
        }
        let a0 = self.total;
        -self.params[i] * self.params[j] / (a0 * a0 * (a0 + 1.0))
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.mean(i)).collect()
    }

    pub fn variances(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.variance(i)).collect()
    }

    /// Variance of the linear statistic `sum coeff_i X_i`.
    pub fn linear_variance(&self, coeffs: &[f64]) -> f64 {
        assert_eq!(coeffs.len(), self.len());
        let mut acc = 0.0;
        for (i, &ci) in coeffs.iter().enumerate() {
            for (j, &cj) in coeffs.iter().enumerate() {
                acc += ci * cj * self.covariance(i, j);
            }
        }
        acc
    }
}
