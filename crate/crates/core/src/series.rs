//! Truncated Poincaré expansions P(ζ) ~ Σ p_k ζ^{−k}.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSeries {
    /// p_0, p_1, …, p_{n_max}
    pub coeffs: Vec<C64>,
    /// True when every coefficient past the stored ones is known to vanish.
    pub terminating: bool,
}

impl AsymptoticSeries {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("empty coefficient list".into()));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(Self {
            coeffs,
            terminating: false,
        })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    /// Hankel coefficients of the Bessel P_ν.
    pub fn bessel(nu: f64, n_max: usize) -> Self {
        let coeffs = crate::specfun::hankel_coeffs(nu, n_max);
        let terminating = coeffs.iter().skip(1).any(|&c| c == 0.0);
        Self {
            coeffs: coeffs.into_iter().map(|c| C64::new(c, 0.0)).collect(),
            terminating,
        }
    }

    /// Highest stored index.
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn get(&self, k: usize) -> Result<C64> {
        match self.coeffs.get(k) {
            Some(&c) => Ok(c),
            None if self.terminating => Ok(C64::new(0.0, 0.0)),
            None => Err(Error::InsufficientCoefficients {
                needed: k + 1,
                available: self.coeffs.len(),
            }),
        }
    }

    /// Σ_{k<n} p_k ζ^{−k}.
    pub fn partial_sum(&self, zeta: C64, n: usize) -> Result<C64> {
        if n > self.coeffs.len() && !self.terminating {
            return Err(Error::InsufficientCoefficients {
                needed: n,
                available: self.coeffs.len(),
            });
        }
        let inv = zeta.inv();
        let mut acc = C64::new(0.0, 0.0);
        for k in (0..n.min(self.coeffs.len())).rev() {
            acc = acc * inv + self.coeffs[k];
        }
        Ok(acc)
    }

    /// d/dζ of [`Self::partial_sum`].
    pub fn partial_sum_derivative(&self, zeta: C64, n: usize) -> Result<C64> {
        if n > self.coeffs.len() && !self.terminating {
            return Err(Error::InsufficientCoefficients {
                needed: n,
                available: self.coeffs.len(),
            });
        }
        let inv = zeta.inv();
        let mut acc = C64::new(0.0, 0.0);
        for k in (1..n.min(self.coeffs.len())).rev() {
            acc = acc * inv - self.coeffs[k] * k as f64;
        }
        Ok(acc * inv * inv)
    }
}
