//! Gauss hypergeometric function ₂F₁(a, b; c; z).
//!
//! Direct series inside the unit disc, the logarithmic Goursat form around
//! z = 1 when c = a + b, and the standard connection formulas (plus ODE
//! transport where those are unusable) elsewhere in the cut plane.

use super::gamma::{digamma, gamma, is_nonpositive_integer, rgamma};
use crate::error::{Error, Result};
use crate::ode::{self, OdeConfig};
use crate::sheet::SheetPoint;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 200_000;
const INNER: f64 = 0.8;
const OUTER: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypergeometricParams {
    pub a_h: C64,
    pub b_h: C64,
    pub c_h: C64,
}

impl HypergeometricParams {
    pub fn new(a_h: C64, b_h: C64, c_h: C64) -> Result<Self> {
        if is_nonpositive_integer(c_h) {
            return Err(Error::InvalidParameter(format!(
                "2F1 lower parameter c = {c_h} is a non-positive integer"
            )));
        }
        Ok(Self { a_h, b_h, c_h })
    }

    pub fn real(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(C64::new(a, 0.0), C64::new(b, 0.0), C64::new(c, 0.0))
    }

    /// True when c = a + b, the logarithmic case at z = 1.
    pub fn is_goursat(&self) -> bool {
        (self.c_h - self.a_h - self.b_h).norm() <= 1e-13 * (1.0 + self.c_h.norm())
    }

    fn polynomial_degree(&self) -> Option<usize> {
        [self.a_h, self.b_h]
            .iter()
            .filter(|x| is_nonpositive_integer(**x))
            .map(|x| (-x.re) as usize)
            .min()
    }
}

/// Series value and derivative; `max_terms` bounds the work.
fn series_with_derivative(p: &HypergeometricParams, z: C64, max_terms: usize) -> Result<(C64, C64)> {
    let (a, b, c) = (p.a_h, p.b_h, p.c_h);
    let degree = p.polynomial_degree();
    let mut coeff = C64::new(1.0, 0.0);
    let mut zpow = C64::new(1.0, 0.0);
    let mut sum = coeff;
    let mut dsum = C64::new(0.0, 0.0);
    for k in 0..max_terms {
        let kf = k as f64;
        coeff *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0));
        let dterm = coeff * zpow * (kf + 1.0);
        dsum += dterm;
        zpow *= z;
        let term = coeff * zpow;
        sum += term;
        if degree.is_some_and(|d| k + 1 >= d) {
            return Ok((sum, dsum));
        }
        if k > 2 && term.norm() <= EPS * sum.norm() && dterm.norm() <= EPS * dsum.norm() {
            return Ok((sum, dsum));
        }
    }
    Err(Error::NoConvergence {
        func: "hyp2f1",
        iterations: max_terms,
    })
}

/// Direct power series; requires |z| < 1 unless the series terminates.
pub fn hyp2f1(p: &HypergeometricParams, z: C64) -> Result<C64> {
    if p.polynomial_degree().is_none() && z.norm() >= 1.0 {
        return Err(Error::Domain {
            func: "hyp2f1",
            msg: format!("series diverges for |z| = {} >= 1", z.norm()),
        });
    }
    derivative_free_series(p, z)
}

fn derivative_free_series(p: &HypergeometricParams, z: C64) -> Result<C64> {
    let (a, b, c) = (p.a_h, p.b_h, p.c_h);
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    let degree = p.polynomial_degree();
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if let Some(d) = degree {
            if k + 1 >= d {
                return Ok(sum);
            }
        }
        if term.norm() <= EPS * sum.norm() && k > 2 {
            return Ok(sum);
        }
    }
    Err(Error::NoConvergence {
        func: "hyp2f1",
        iterations: MAX_TERMS,
    })
}

/// d(n) = 2ψ(n+1) − ψ(a+n) − ψ(b+n) for n = 0..len.
pub fn goursat_d(a: C64, b: C64, len: usize) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(len);
    let mut psi1 = digamma(C64::new(1.0, 0.0))?;
    let mut psia = digamma(a)?;
    let mut psib = digamma(b)?;
    for n in 0..len {
        out.push(psi1 * 2.0 - psia - psib);
        let nf = n as f64;
        psi1 += 1.0 / (nf + 1.0);
        psia += (a + nf).inv();
        psib += (b + nf).inv();
    }
    Ok(out)
}

/// Goursat's logarithmic form of ₂F₁(a, b; a+b; 1−u) with `u` on any sheet of
/// the logarithm; requires |u| < 1.
pub fn hyp2f1_goursat_log_sheet(a: C64, b: C64, u: SheetPoint) -> Result<C64> {
    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        return Err(Error::Pole {
            func: "hyp2f1_goursat_log",
            arg: format!("a = {a}, b = {b}"),
        });
    }
    if u.rho >= 1.0 {
        return Err(Error::Domain {
            func: "hyp2f1_goursat_log",
            msg: format!("needs |1 − z| < 1, got {}", u.rho),
        });
    }
    let uc = u.to_complex();
    let log_u = u.ln();
    let mut coeff = C64::new(1.0, 0.0); // (a)_n (b)_n / (n!)^2
    let mut upow = C64::new(1.0, 0.0);
    let mut psi1 = digamma(C64::new(1.0, 0.0))?;
    let mut psia = digamma(a)?;
    let mut psib = digamma(b)?;
    let mut sum = C64::new(0.0, 0.0);
    for n in 0..MAX_TERMS {
        let d = psi1 * 2.0 - psia - psib;
        let term = coeff * upow * (d - log_u);
        sum += term;
        if n > 2 && term.norm() <= EPS * sum.norm() && (coeff * upow).norm() <= EPS * sum.norm() {
            let pref = gamma(a + b)? * rgamma(a) * rgamma(b);
            return Ok(pref * sum);
        }
        let nf = n as f64;
        coeff *= (a + nf) * (b + nf) / ((nf + 1.0) * (nf + 1.0));
        upow *= uc;
        psi1 += 1.0 / (nf + 1.0);
        psia += (a + nf).inv();
        psib += (b + nf).inv();
    }
    Err(Error::NoConvergence {
        func: "hyp2f1_goursat_log",
        iterations: MAX_TERMS,
    })
}

/// ₂F₁(a, b; a+b; z) for |1−z| < 1 and |arg(1−z)| < π.
pub fn hyp2f1_goursat_log(a: C64, b: C64, z: C64) -> Result<C64> {
    let u = 1.0 - z;
    if u.im == 0.0 && u.re <= 0.0 {
        return Err(Error::Domain {
            func: "hyp2f1_goursat_log",
            msg: format!("arg(1 − z) = ±π at z = {z}"),
        });
    }
    hyp2f1_goursat_log_sheet(a, b, SheetPoint::from_complex(u)?)
}

/// ₂F₁ anywhere in the plane cut along [1, ∞), with the point given as
/// `u = 1 − z` and |arg u| ≤ π; `arg u = ±π` selects a bank of the cut.
pub fn hyp2f1_continued(p: &HypergeometricParams, u: SheetPoint) -> Result<C64> {
    if !u.on_fundamental_sheet() {
        return Err(Error::Domain {
            func: "hyp2f1_continued",
            msg: format!("arg(1 − z) = {} outside [−π, π]", u.theta),
        });
    }
    let z = 1.0 - u.to_complex();
    let on_cut = (u.theta.abs() - PI).abs() < 1e-15;
    if p.polynomial_degree().is_some() {
        return derivative_free_series(p, z);
    }
    if z.norm() < INNER && !on_cut {
        return derivative_free_series(p, z);
    }
    if u.rho < INNER {
        if p.is_goursat() {
            return hyp2f1_goursat_log_sheet(p.a_h, p.b_h, u);
        }
        if let Some(v) = euler_near_one(p, u)? {
            return Ok(v);
        }
    }
    if z.norm() > OUTER || on_cut {
        if let Some(v) = inverse_z(p, u)? {
            return Ok(v);
        }
    }
    if !on_cut {
        // Pfaff: ₂F₁(a,b;c;z) = (1−z)^{−a} ₂F₁(a, c−b; c; z/(z−1)).
        let w = z / (z - 1.0);
        if w.norm() < INNER {
            let q = HypergeometricParams::new(p.a_h, p.c_h - p.b_h, p.c_h)?;
            return Ok(u.powc(-p.a_h) * derivative_free_series(&q, w)?);
        }
        return transport(p, z);
    }
    Err(Error::Domain {
        func: "hyp2f1_continued",
        msg: format!("no usable representation at z = {z}"),
    })
}

/// Principal-branch value for z off the cut [1, ∞).
pub fn hyp2f1_cut_plane(p: &HypergeometricParams, z: C64) -> Result<C64> {
    let u = 1.0 - z;
    if u.im == 0.0 && u.re <= 0.0 {
        return Err(Error::Domain {
            func: "hyp2f1",
            msg: format!("z = {z} lies on the cut [1, ∞)"),
        });
    }
    hyp2f1_continued(p, SheetPoint::from_complex(u)?)
}

fn near_integer(x: C64) -> bool {
    x.im.abs() < 1e-12 && (x.re - x.re.round()).abs() < 1e-12
}

// Euler's connection around z = 1 for non-integer c − a − b.
fn euler_near_one(p: &HypergeometricParams, u: SheetPoint) -> Result<Option<C64>> {
    let (a, b, c) = (p.a_h, p.b_h, p.c_h);
    let s = c - a - b;
    if near_integer(s) {
        return Ok(None);
    }
    let uc = u.to_complex();
    let gc = gamma(c)?;
    let f1 = derivative_free_series(&HypergeometricParams::new(a, b, 1.0 - s)?, uc)?;
    let f2 = derivative_free_series(&HypergeometricParams::new(c - a, c - b, s + 1.0)?, uc)?;
    let t1 = gc * gamma(s)? * rgamma(c - a) * rgamma(c - b) * f1;
    let t2 = u.powc(s) * gc * gamma(-s)? * rgamma(a) * rgamma(b) * f2;
    Ok(Some(t1 + t2))
}

// Connection to z = ∞ for non-integer a − b; (−z)^{−a} uses arg(−z) with the
// sign of arg u on the cut.
fn inverse_z(p: &HypergeometricParams, u: SheetPoint) -> Result<Option<C64>> {
    let (a, b, c) = (p.a_h, p.b_h, p.c_h);
    if near_integer(a - b) {
        return Ok(None);
    }
    let z = 1.0 - u.to_complex();
    let mz = -z;
    let arg_mz = if (u.theta.abs() - PI).abs() < 1e-15 {
        PI * u.theta.signum()
    } else {
        mz.arg()
    };
    let mz_pt = SheetPoint::new(mz.norm(), arg_mz)?;
    let zi = z.inv();
    let gc = gamma(c)?;
    let fa = derivative_free_series(&HypergeometricParams::new(a, a - c + 1.0, a - b + 1.0)?, zi)?;
    let fb = derivative_free_series(&HypergeometricParams::new(b, b - c + 1.0, b - a + 1.0)?, zi)?;
    let ta = gc * gamma(b - a)? * rgamma(b) * rgamma(c - a) * mz_pt.powc(-a) * fa;
    let tb = gc * gamma(a - b)? * rgamma(a) * rgamma(c - b) * mz_pt.powc(-b) * fb;
    Ok(Some(ta + tb))
}

// Integrates the hypergeometric equation radially from 0.7·z/|z| to z.
fn transport(p: &HypergeometricParams, z: C64) -> Result<C64> {
    let (a, b, c) = (p.a_h, p.b_h, p.c_h);
    let z0 = z * (0.7 / z.norm());
    let (w0, dw0) = series_with_derivative(p, z0, MAX_TERMS)?;
    let dz = z - z0;
    let cfg = OdeConfig::with_tolerances(1e-13, 1e-15)?;
    let rhs = |s: f64, y: &[C64; 2]| {
        let x = z0 + dz * s;
        let d2 = -((c - (a + b + 1.0) * x) * y[1] - a * b * y[0]) / (x * (1.0 - x));
        [y[1] * dz, d2 * dz]
    };
    let (y, _) = ode::solve(rhs, 0.0, 1.0, [w0, dw0], &cfg)?;
    Ok(y[0])
}
