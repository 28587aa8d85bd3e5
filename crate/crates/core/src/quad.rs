//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands of a
//! real variable.
//!
//! The 7/15-point pair is the QUADPACK `qk15` rule; intervals are bisected
//! globally (largest error first) until the total error estimate meets the
//! requested tolerance.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-11,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) || max_subdivisions == 0 {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must be positive (rel {rel_tol}, abs {abs_tol}, max {max_subdivisions})"
            )));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    pub(crate) fn target(&self, value: C64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    /// Kronrod estimate of ∫|f|; bounds the attainable accuracy when the
    /// integral cancels.
    pub magnitude: f64,
    pub evaluations: usize,
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<(C64, f64, f64)>
where
    F: FnMut(f64) -> Result<C64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        kronrod += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).norm();
    // QUADPACK-style sharpening of the raw difference; the roundoff floor
    // keeps the estimate honest for tiny panels.
    let err = if err > 0.0 {
        let scaled = (200.0 * err / (value.norm() + f64::MIN_POSITIVE)).min(1.0);
        (err * scaled.powf(1.5)).max(err.min(1.0) * 1e-3)
    } else {
        0.0
    };
    let magnitude = resabs * half.abs();
    let floor = 50.0 * f64::EPSILON * magnitude;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    Ok((value, err.max(floor), magnitude))
}

/// Integrates `f` over `[a, b]` with initial breakpoints `splits` (strictly
/// inside the interval, any order).
pub fn integrate_with_breaks<F>(
    mut f: F,
    a: f64,
    b: f64,
    splits: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<C64>,
{
    if a == b {
        return Ok(QuadResult {
            value: C64::new(0.0, 0.0),
            error: 0.0,
            magnitude: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut edges = vec![lo];
    let mut inner: Vec<f64> = splits
        .iter()
        .copied()
        .filter(|&s| s > lo && s < hi)
        .collect();
    inner.sort_by(f64::total_cmp);
    edges.extend(inner);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    let mut total = C64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let mut evals = 0;
    for w in edges.windows(2) {
        let (v, e, m) = gk15(&mut f, w[0], w[1])?;
        evals += 15;
        total += v;
        total_err += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
            magnitude: m,
        });
    }
    let mut converged = total_err <= cfg.target(total);
    while !converged && heap.len() < cfg.max_subdivisions {
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1, m1) = gk15(&mut f, worst.a, mid)?;
        let (v2, e2, m2) = gk15(&mut f, mid, worst.b)?;
        evals += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            magnitude: m1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            magnitude: m2,
        });
        converged = total_err <= cfg.target(total);
    }
    // Re-sum from the panels to shed accumulated update roundoff.
    let mut value = C64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut magnitude = 0.0;
    for p in heap.iter() {
        value += p.value;
        error += p.error;
        magnitude += p.magnitude;
    }
    Ok(QuadResult {
        value: value * sign,
        error,
        magnitude,
        evaluations: evals,
        converged: converged || error <= cfg.target(value),
    })
}

pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<C64>,
{
    integrate_with_breaks(f, a, b, &[], cfg)
}

/// Integral over `[a, ∞)` of an integrand decaying at least like
/// `exp(-decay * x)`; the range is truncated where that envelope drops
/// below the absolute tolerance.
pub fn integrate_semi_infinite<F>(
    f: F,
    a: f64,
    decay: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<C64>,
{
    if !(decay > 0.0) {
        return Err(Error::Quadrature(format!(
            "semi-infinite integral needs positive decay rate, got {decay}"
        )));
    }
    let span = ((1.0 / cfg.abs_tol).ln() + 5.0) / decay;
    let end = a + span;
    // Geometric pre-split so the adaptive pass starts near the decay scale.
    let mut splits = Vec::new();
    let mut w = 1.0 / decay;
    while a + w < end {
        splits.push(a + w);
        w *= 2.0;
    }
    integrate_with_breaks(f, a, end, &splits, cfg)
}

/// Trapezoidal rule on `[0, 2π)` for periodic integrands; spectrally accurate
/// for analytic integrands.
pub fn periodic_trapezoid<F>(mut f: F, n: usize) -> Result<C64>
where
    F: FnMut(f64) -> Result<C64>,
{
    let h = std::f64::consts::TAU / n as f64;
    let mut s = C64::new(0.0, 0.0);
    for k in 0..n {
        s += f(k as f64 * h)?;
    }
    Ok(s * h)
}
