//! Points on the logarithmic Riemann surface over the punctured plane.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point `rho * e^{i theta}` with the argument kept unreduced, so that
/// `theta` and `theta + 2π` denote different sheets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SheetPoint {
    pub rho: f64,
    pub theta: f64,
}

impl SheetPoint {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sheet point needs rho > 0 and finite theta, got ({rho}, {theta})"
            )));
        }
        Ok(Self { rho, theta })
    }

    /// Principal-sheet point for a nonzero complex number.
    pub fn from_complex(z: C64) -> Result<Self> {
        Self::new(z.norm(), z.arg())
    }

    pub fn real(rho: f64) -> Self {
        Self { rho, theta: 0.0 }
    }

    /// Projection to the complex plane (forgets the sheet).
    pub fn to_complex(self) -> C64 {
        C64::from_polar(self.rho, self.theta)
    }

    pub fn rotate(self, angle: f64) -> Self {
        Self {
            rho: self.rho,
            theta: self.theta + angle,
        }
    }

    /// `self * e^{i k π}`.
    pub fn turn(self, half_turns: i64) -> Self {
        self.rotate(half_turns as f64 * PI)
    }

    pub fn scale(self, factor: f64) -> Self {
        Self {
            rho: self.rho * factor,
            theta: self.theta,
        }
    }

    /// Logarithm on this sheet: `ln rho + i theta`.
    pub fn ln(self) -> C64 {
        C64::new(self.rho.ln(), self.theta)
    }

    /// `z^p` evaluated on this sheet.
    pub fn powc(self, p: C64) -> C64 {
        (p * self.ln()).exp()
    }

    pub fn powf(self, p: f64) -> C64 {
        C64::from_polar(self.rho.powf(p), self.theta * p)
    }

    pub fn on_fundamental_sheet(self) -> bool {
        self.theta.abs() <= PI * (1.0 + 4.0 * f64::EPSILON)
    }
}
