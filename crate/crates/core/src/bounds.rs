//! Remainder bounds for the asymptotic series of P, with and without the
//! exponentially small terms beyond the Stokes rays.

use crate::error::{Error, Result};
use crate::monodromy::{continue_to_sheet, exp_small_term, BaseEvaluator, StokesSide};
use crate::series::AsymptoticSeries;
use crate::sheet::SheetPoint;
use crate::specfun::ln_gamma;
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Sampling grid for the estimate of M_P(r).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupGrid {
    pub radial: usize,
    pub angular: usize,
    pub r_cap: f64,
}

impl Default for SupGrid {
    fn default() -> Self {
        SupGrid {
            radial: 24,
            angular: 64,
            r_cap: 50.0,
        }
    }
}

impl SupGrid {
    pub fn refined(self) -> Self {
        SupGrid {
            radial: 2 * self.radial,
            angular: 2 * self.angular,
            r_cap: self.r_cap,
        }
    }
}

/// Sampled sup of |P| on |arg ζ| ≤ π, r ≤ |ζ| ≤ r_cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMP {
    pub r: f64,
    pub value: f64,
    /// Same estimate on the doubled grid.
    pub refined: f64,
}

impl EmpiricalMP {
    /// Relative change between the grid and its refinement.
    pub fn stability(&self) -> f64 {
        (self.refined - self.value).abs() / self.refined.max(f64::MIN_POSITIVE)
    }

    /// Estimate with headroom, using the larger of the two grids.
    pub fn scaled(&self, factor: f64) -> Self {
        let v = factor * self.value.max(self.refined);
        EmpiricalMP {
            r: self.r,
            value: v,
            refined: v,
        }
    }
}

fn sup_on_grid<E: BaseEvaluator + ?Sized>(base: &E, r: f64, grid: SupGrid) -> Result<f64> {
    let nr = grid.radial.max(2);
    let na = grid.angular.max(2);
    let ratio = (grid.r_cap / r).ln();
    let pts: Vec<SheetPoint> = (0..nr)
        .flat_map(|i| {
            let rho = r * (ratio * i as f64 / (nr - 1) as f64).exp();
            (0..=na).map(move |j| SheetPoint {
                rho,
                theta: -PI + 2.0 * PI * j as f64 / na as f64,
            })
        })
        .collect();
    let vals: Vec<f64> = pts
        .par_iter()
        .map(|&z| base.eval(z).map(|v| v.norm()))
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

pub fn empirical_mp<E: BaseEvaluator + ?Sized>(base: &E, r: f64, grid: SupGrid) -> Result<EmpiricalMP> {
    if !(r > 0.0) || !(grid.r_cap > r) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < r < r_cap, got r = {r}, r_cap = {}",
            grid.r_cap
        )));
    }
    Ok(EmpiricalMP {
        r,
        value: sup_on_grid(base, r, grid)?,
        refined: sup_on_grid(base, r, grid.refined())?,
    })
}

/// P(ζ) − Σ_{k<n} p_k ζ^{−k}, on any sheet.
pub fn remainder<E: BaseEvaluator + ?Sized>(
    base: &E,
    p: &AsymptoticSeries,
    n: usize,
    zeta: SheetPoint,
) -> Result<C64> {
    let pz = continue_to_sheet(base, zeta)?;
    if n == 0 {
        return Ok(pz);
    }
    Ok(pz - p.partial_sum(zeta.to_complex(), n)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundRegion {
    /// |arg ζ| ≤ π/2
    Central,
    /// |arg ζ| ≤ π
    Principal,
    /// π < |arg ζ| < 3π/2, |Re ζ| in the denominator
    BeyondStokes,
    /// π ≤ |arg ζ| ≤ 3π/2 after removing E±
    Corrected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderSample {
    pub n: usize,
    pub zeta: SheetPoint,
    pub region: BoundRegion,
    pub remainder: C64,
    pub corrected: Option<C64>,
    pub bound: f64,
    /// |checked remainder| / bound; the multiple of M_P the check needed.
    pub needed_multiplier: f64,
    pub passes: bool,
}

fn ln_factor(n: usize, a: f64, x: f64) -> Result<f64> {
    Ok(ln_gamma(C64::new(n as f64 + 1.0, 0.0))?.re - n as f64 * (a * x).ln())
}

/// M n! √(n+3) / (a|ζ|)^n
fn shape_bound(mp: f64, n: usize, a: f64, x: f64) -> Result<f64> {
    Ok(mp * ((n + 3) as f64).sqrt() * ln_factor(n, a, x)?.exp())
}

fn sample(n: usize, zeta: SheetPoint, region: BoundRegion, remainder: C64, corrected: Option<C64>, bound: f64) -> RemainderSample {
    let checked = corrected.unwrap_or(remainder).norm();
    RemainderSample {
        n,
        zeta,
        region,
        remainder,
        corrected,
        bound,
        needed_multiplier: checked / bound,
        passes: checked <= bound,
    }
}

fn check_radius(zeta: SheetPoint, mp: &EmpiricalMP) -> Result<()> {
    if zeta.rho < mp.r {
        return Err(Error::Domain {
            func: "theorem1_check",
            msg: format!("|ζ| = {} below r = {}", zeta.rho, mp.r),
        });
    }
    Ok(())
}

/// The regional bound at ζ: n!/(a|ζ|)^n for |arg ζ| ≤ π/2, with an extra
/// √(n+3) up to |arg ζ| = π, and 2√(n+3) n!/(a|Re ζ|)^n up to 3π/2.
pub fn theorem1_check<E: BaseEvaluator + ?Sized>(
    base: &E,
    p: &AsymptoticSeries,
    n: usize,
    zeta: SheetPoint,
    mp: &EmpiricalMP,
) -> Result<RemainderSample> {
    check_radius(zeta, mp)?;
    let a = base.params().a;
    let th = zeta.theta.abs();
    let rem = remainder(base, p, n, zeta)?;
    let (region, bound) = if th <= 0.5 * PI {
        (BoundRegion::Central, mp.value * ln_factor(n, a, zeta.rho)?.exp())
    } else if th <= PI {
        (BoundRegion::Principal, shape_bound(mp.value, n, a, zeta.rho)?)
    } else if th < 1.5 * PI {
        let re = zeta.to_complex().re.abs();
        (BoundRegion::BeyondStokes, 2.0 * shape_bound(mp.value, n, a, re)?)
    } else {
        return Err(Error::Sector {
            theta: zeta.theta,
            region: "|arg ζ| < 3π/2",
        });
    };
    Ok(sample(n, zeta, region, rem, None, bound))
}

/// Beyond a Stokes ray: subtract E± and compare with the bound that holds
/// up to |arg ζ| = π.
pub fn corrected_remainder_check<E: BaseEvaluator + ?Sized>(
    base: &E,
    p: &AsymptoticSeries,
    n: usize,
    zeta: SheetPoint,
    mp: &EmpiricalMP,
) -> Result<RemainderSample> {
    check_radius(zeta, mp)?;
    let side = if (PI..=1.5 * PI).contains(&zeta.theta) {
        StokesSide::Plus
    } else if (-1.5 * PI..=-PI).contains(&zeta.theta) {
        StokesSide::Minus
    } else {
        return Err(Error::Sector {
            theta: zeta.theta,
            region: "π ≤ |arg ζ| ≤ 3π/2",
        });
    };
    let a = base.params().a;
    let rem = remainder(base, p, n, zeta)?;
    let small = if base.params().t.norm() == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        exp_small_term(side, base, zeta)?
    };
    let bound = shape_bound(mp.value, n, a, zeta.rho)?;
    Ok(sample(n, zeta, BoundRegion::Corrected, rem, Some(rem - small), bound))
}

/// |p_n| ≤ M_P n!/a^n; returns |p_n| a^n / n! for each n.
pub fn coefficient_ratios(p: &AsymptoticSeries, a: f64, n_max: usize) -> Result<Vec<f64>> {
    (0..=n_max)
        .map(|n| Ok(p.get(n)?.norm() * (-ln_factor(n, a, 1.0)?).exp()))
        .collect()
}
