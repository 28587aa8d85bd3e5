//! Coefficients of the expansion at the branch point
//!
//!   F(t) = −(T/2πi) F(−(t+a)) log(t+a) + Σ A_n (t+a)^n,
//!
//! with A_n = α_n(I) + α_n(J) + α_n(F₀) computed from P.

use crate::duality::DualEvaluator;
use crate::error::{Error, Result};
use crate::monodromy::{continue_to_sheet, BaseEvaluator, MonodromyParams};
use crate::quad::{integrate_with_breaks, QuadratureConfig};
use crate::series::AsymptoticSeries;
use crate::sheet::SheetPoint;
use crate::specfun::{digamma, goursat_d, ln_gamma, pochhammer};
use crate::C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Cauchy radius for Taylor coefficients of F, as a fraction of a.
const CAUCHY_FRACTION: f64 = 0.95;
const CAUCHY_POINTS: usize = 1024;
/// Below this fraction of a the remainder of F's Taylor series is summed
/// from its tail instead of by subtraction.
const TAIL_SWITCH: f64 = 0.7;
/// Extra Taylor terms needed past n so that TAIL_SWITCH^k < 1e−17.
pub const TAIL_TERMS: usize = 110;

fn two_pi_i() -> C64 {
    C64::new(0.0, 2.0 * PI)
}

fn sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check(q: crate::quad::QuadResult, cfg: &QuadratureConfig, what: &str) -> Result<C64> {
    if q.converged || q.error <= 10.0 * cfg.rel_tol * q.magnitude {
        Ok(q.value)
    } else {
        Err(Error::Quadrature(format!("{what}: error {:.3e}", q.error)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientBreakdown {
    pub n: usize,
    pub r: f64,
    pub alpha_i: C64,
    pub alpha_j: C64,
    pub alpha_f0: C64,
    /// Estimated error of the tail treatment in α_n(I).
    pub tail_estimate: f64,
}

impl CoefficientBreakdown {
    pub fn total(&self) -> C64 {
        self.alpha_i + self.alpha_j + self.alpha_f0
    }
}

/// (T/2πi)(−1)^n [p_n/n! (ψ(n+1) − log r) − Σ_{k<n} r^{n−k} p_k / (n!(n−k))].
pub fn alpha_j(n: usize, t_mult: C64, p: &AsymptoticSeries, r: f64) -> Result<C64> {
    let pn = p.get(n)?;
    let ln_nf = ln_gamma(C64::new(n as f64 + 1.0, 0.0))?.re;
    let psi = digamma(C64::new(n as f64 + 1.0, 0.0))?;
    let mut acc = pn * (-ln_nf).exp() * (psi - r.ln());
    for k in 0..n {
        let scale = ((n - k) as f64 * r.ln() - ln_nf).exp() / (n - k) as f64;
        acc -= p.get(k)? * scale;
    }
    Ok(t_mult / two_pi_i() * acc * sign(n))
}

/// (1/2πi)(1/n!) ∮_{|ζ|=r} ζ^n e^{−aζ} P(ζ) dζ/ζ over −π < arg ζ < π.
pub fn alpha_f0<E: BaseEvaluator + ?Sized>(
    n: usize,
    base: &E,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    let a = base.params().a;
    let q = integrate_with_breaks(
        |phi| {
            let z = C64::from_polar(r, phi);
            let p = continue_to_sheet(base, SheetPoint { rho: r, theta: phi })?;
            Ok(C64::from_polar(1.0, n as f64 * phi) * (-a * z).exp() * p)
        },
        -PI,
        PI,
        &[-0.5 * PI, 0.0, 0.5 * PI],
        cfg,
    )?;
    let v = check(q, cfg, "alpha_F0 arc")?;
    let scale = (n as f64 * r.ln() - ln_gamma(C64::new(n as f64 + 1.0, 0.0))?.re).exp();
    Ok(v * scale / (2.0 * PI))
}

/// Picks the split ζ_s beyond which (P − Σ_{k≤n} p_k ζ^{−k}) is replaced by
/// the series tail; returns (ζ_s, last tail index, estimated error).
fn tail_split(n: usize, p: &AsymptoticSeries, r: f64, a: f64) -> (f64, usize, f64) {
    let len = p.coeffs.len();
    let mut best = (f64::INFINITY, n + 1, f64::INFINITY);
    let lo = (2.0 * r).max(4.0 / a);
    let mut zs = lo;
    while zs <= 400.0 / a {
        // cancellation in P − partial sum, magnified by ζ^{n−1} over a span ζ_s
        let partial: f64 = p.coeffs.iter().take(n + 1).enumerate()
            .map(|(k, c)| c.norm() * zs.powi(-(k as i32)))
            .sum();
        let cancel = 4.0 * f64::EPSILON * partial.max(1.0) * zs.powi(n as i32);
        let mut trunc = f64::INFINITY;
        let mut m_best = n + 1;
        for m in (n + 1)..len {
            let term = p.coeffs[m].norm() * zs.powi(n as i32 - m as i32) / (m - n) as f64;
            if term < trunc {
                trunc = term;
                m_best = m;
            }
        }
        if p.terminating && len <= n + 1 {
            trunc = 0.0;
            m_best = len.max(n + 1);
        }
        let est = cancel + trunc;
        if est < best.2 {
            best = (zs, m_best, est);
        }
        zs *= 1.25;
    }
    best
}

/// α_n(I) = (−1)^n (T/2πi)(1/n!) ∫_r^∞ (P − Σ_{k≤n} p_k ζ^{−k}) ζ^{n−1} dζ,
/// the range beyond ζ_s summed termwise from the series. Returns the value and
/// an error estimate.
pub fn alpha_i_direct<E: BaseEvaluator + ?Sized>(
    n: usize,
    base: &E,
    p: &AsymptoticSeries,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<(C64, f64)> {
    let params = base.params();
    if p.coeffs.len() < n + 1 && !p.terminating {
        return Err(Error::InsufficientCoefficients {
            needed: n + 1,
            available: p.coeffs.len(),
        });
    }
    if params.t.norm() == 0.0 {
        return Ok((C64::new(0.0, 0.0), 0.0));
    }
    let a = params.a;
    let (zs, m, est) = tail_split(n, p, r, a);
    let ln_nf = ln_gamma(C64::new(n as f64 + 1.0, 0.0))?.re;
    // integrate the scaled quantity (a^n/n!)·integrand
    let scale = (n as f64 * a.ln() - ln_nf).exp();
    let mut splits = Vec::new();
    let mut x = r * 2.0;
    while x < zs {
        splits.push(x);
        x *= 2.0;
    }
    let q = integrate_with_breaks(
        |zeta| {
            let pz = base.eval(SheetPoint::real(zeta))?;
            let partial = p.partial_sum(C64::new(zeta, 0.0), n + 1)?;
            Ok((pz - partial) * (zeta.powi(n as i32 - 1) * scale))
        },
        r,
        zs,
        &splits,
        cfg,
    )?;
    let mut body = check(q, cfg, "alpha_I body")?;
    if zs > r {
        for k in (n + 1)..m {
            body += p.get(k)? * (zs.powi(n as i32 - k as i32) / (k - n) as f64 * scale);
        }
    }
    let pref = params.t / two_pi_i() * sign(n);
    Ok((pref * body * a.powi(-(n as i32)), est * (-ln_nf).exp() * params.t.norm() / (2.0 * PI)))
}

/// The full breakdown of A_n from P and its asymptotic series.
pub fn an_coefficient<E: BaseEvaluator + ?Sized>(
    n: usize,
    base: &E,
    p: &AsymptoticSeries,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<CoefficientBreakdown> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    let t_mult = base.params().t;
    let (alpha_i, tail_estimate) = alpha_i_direct(n, base, p, r, cfg)?;
    let alpha_j = if t_mult.norm() == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        alpha_j(n, t_mult, p, r)?
    };
    Ok(CoefficientBreakdown {
        n,
        r,
        alpha_i,
        alpha_j,
        alpha_f0: alpha_f0(n, base, r, cfg)?,
        tail_estimate,
    })
}

// Least-squares fit of P(ζ) − p₀ ≈ Σ_{k=1}^{m} q_k ζ^{−k} on [lo, hi].
fn fit_series(samples: &[(f64, C64)], p0: C64, m: usize, lo: f64) -> Result<Vec<C64>> {
    // columns x^k with x = lo/ζ ∈ (0, 1]
    let mut ata = vec![vec![0.0f64; m]; m];
    let mut atb = vec![C64::new(0.0, 0.0); m];
    for &(z, v) in samples {
        let x = lo / z;
        let row: Vec<f64> = (1..=m).map(|k| x.powi(k as i32)).collect();
        for i in 0..m {
            atb[i] += (v - p0) * row[i];
            for j in 0..m {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| ata[i][col].abs().total_cmp(&ata[j][col].abs()))
            .expect("non-empty");
        if ata[piv][col].abs() < 1e-300 {
            return Err(Error::InvalidParameter("singular tail fit".into()));
        }
        ata.swap(col, piv);
        atb.swap(col, piv);
        for i in (col + 1)..m {
            let f = ata[i][col] / ata[col][col];
            for j in col..m {
                ata[i][j] -= f * ata[col][j];
            }
            let d = atb[col] * f;
            atb[i] -= d;
        }
    }
    let mut q = vec![C64::new(0.0, 0.0); m];
    for i in (0..m).rev() {
        let mut s = atb[i];
        for j in (i + 1)..m {
            s -= q[j] * ata[i][j];
        }
        q[i] = s / ata[i][i];
    }
    // back to coefficients of ζ^{−k}
    Ok(q.iter()
        .enumerate()
        .map(|(k, c)| c * lo.powi(k as i32 + 1))
        .collect())
}

/// A₀ from P and p₀ alone; the slowly decaying tail of (P − p₀)/ζ is
/// handled by fitting the first inverse powers of P at large ζ.
pub fn a0_coefficient<E: BaseEvaluator + ?Sized>(
    base: &E,
    p0: C64,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    let a = base.params().a;
    let lo = 80.0 / a;
    let hi = 4.0 * lo;
    let m = 6;
    let pts = 16;
    let mut samples = Vec::with_capacity(pts);
    for j in 0..pts {
        let x = 0.5 * (1.0 - (PI * (j as f64 + 0.5) / pts as f64).cos());
        let z = lo + (hi - lo) * x;
        samples.push((z, base.eval(SheetPoint::real(z))?));
    }
    let mut coeffs = vec![p0];
    coeffs.extend(fit_series(&samples, p0, m, lo)?);
    let series = AsymptoticSeries::new(coeffs)?;
    Ok(an_coefficient(0, base, &series, r, cfg)?.total())
}

/// Taylor coefficients c_k = F^{(k)}(0)/k! from a Cauchy integral on
/// |t| = 0.95a.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualTaylor {
    pub coeffs: Vec<C64>,
    pub radius: f64,
}

pub fn dual_taylor<F: DualEvaluator + ?Sized>(f: &F, k_max: usize) -> Result<DualTaylor> {
    let a = f.params().a;
    let rho = CAUCHY_FRACTION * a;
    let n = CAUCHY_POINTS.max((2 * k_max).next_power_of_two());
    let vals: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / n as f64;
            let theta = if phi > PI { phi - 2.0 * PI } else { phi };
            f.eval(SheetPoint { rho, theta })
        })
        .collect::<Result<_>>()?;
    let coeffs = (0..=k_max)
        .map(|k| {
            let mut s = C64::new(0.0, 0.0);
            for (j, v) in vals.iter().enumerate() {
                let phi = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                s += v * C64::from_polar(1.0, -phi);
            }
            s / n as f64 * rho.powi(-(k as i32))
        })
        .collect();
    Ok(DualTaylor { coeffs, radius: rho })
}

/// e^{−x} Σ_{j≤n} x^j/j!, the regularized upper incomplete gamma Q(n+1, x).
fn q_upper(n: usize, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=n {
        term *= x / j as f64;
        sum += term;
    }
    // e^{−x}·sum without overflow for large x
    (sum.ln() - x).exp()
}

/// α_n(I) from F: exchanging the order of integration turns the ζ-integral
/// into
///   (−1)^n (T/2πi) ∫₀^∞ R_n(s) Q(n+1, rs) s^{−n−1} ds,
/// R_n the Taylor remainder of F at 0.
pub fn alpha_i_dual<F: DualEvaluator + ?Sized>(
    n: usize,
    f: &F,
    taylor: &DualTaylor,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    let params = f.params();
    if params.t.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let a = params.a;
    let c = &taylor.coeffs;
    if c.len() < n + TAIL_TERMS + 1 {
        return Err(Error::InsufficientCoefficients {
            needed: n + TAIL_TERMS + 1,
            available: c.len(),
        });
    }
    let s1 = TAIL_SWITCH * a;
    // work with s = a·σ so all pieces are O(1) after scaling by a^{n}
    let scale = a.powi(n as i32 + 1);
    let near = integrate_with_breaks(
        |s| {
            let mut acc = C64::new(0.0, 0.0);
            let x = s / a;
            for k in ((n + 1)..=(n + TAIL_TERMS)).rev() {
                acc = acc * x + c[k] * a.powi(k as i32);
            }
            Ok(acc * q_upper(n, r * s) / a.powi(n as i32 + 1) * scale)
        },
        0.0,
        s1,
        &[],
        cfg,
    )?;
    let near = check(near, cfg, "alpha_I near piece")?;
    // upper limit where Q(n+1, rs) is negligible
    let mut x_max = (n as f64 + 10.0).max(20.0);
    while q_upper(n, x_max) > 1e-20 {
        x_max *= 1.2;
    }
    let s_max = (x_max / r).max(2.0 * s1);
    let mut splits = vec![a, 1.5 * a];
    let mut x = 2.0 * a;
    while x < s_max {
        splits.push(x);
        x *= 2.0;
    }
    let far = integrate_with_breaks(
        |s| {
            let fs = f.eval(SheetPoint::real(s))?;
            let x = s / a;
            let mut poly = C64::new(0.0, 0.0);
            for k in (0..=n).rev() {
                poly = poly * x + c[k] * a.powi(k as i32);
            }
            // (F − Σ c_k s^k)/s^{n+1}, scaled by a^{n+1}
            let rem = (fs - poly) * x.powi(-(n as i32 + 1));
            Ok(rem * q_upper(n, r * s))
        },
        s1,
        s_max,
        &splits,
        cfg,
    )?;
    let far = check(far, cfg, "alpha_I far piece")?;
    Ok(params.t / two_pi_i() * sign(n) * (near + far) / scale)
}

/// A_n with α_n(I) from the dual side.
pub fn an_coefficient_dual<E, F>(
    n: usize,
    base: &E,
    f: &F,
    taylor: &DualTaylor,
    p: &AsymptoticSeries,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<CoefficientBreakdown>
where
    E: BaseEvaluator + ?Sized,
    F: DualEvaluator + ?Sized,
{
    let t_mult = base.params().t;
    let alpha_j = if t_mult.norm() == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        alpha_j(n, t_mult, p, r)?
    };
    Ok(CoefficientBreakdown {
        n,
        r,
        alpha_i: alpha_i_dual(n, f, taylor, r, cfg)?,
        alpha_j,
        alpha_f0: alpha_f0(n, base, r, cfg)?,
        tail_estimate: 0.0,
    })
}

/// The data of the expansion at t = −a; `analytic_factor` supplies
/// F(−(t+a)).
#[derive(Debug, Clone)]
pub struct LogExpansion<F> {
    pub params: MonodromyParams,
    pub breakdown: Vec<CoefficientBreakdown>,
    pub coeffs: Vec<C64>,
    pub analytic_factor: F,
    pub radius: f64,
}

/// Builds A_0..A_{n_max}. Small n use the ζ-side formula; from n = 6 on
/// α_n(I) comes from the dual side, where no cancellation occurs.
pub fn log_expansion<E, F>(
    base: &E,
    f: F,
    p: &AsymptoticSeries,
    n_max: usize,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<LogExpansion<F>>
where
    E: BaseEvaluator + ?Sized,
    F: DualEvaluator,
{
    let params = base.params();
    let direct_max = 5.min(n_max);
    let taylor = if n_max > direct_max {
        Some(dual_taylor(&f, n_max + TAIL_TERMS)?)
    } else {
        None
    };
    let breakdown: Vec<CoefficientBreakdown> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            if n <= direct_max {
                an_coefficient(n, base, p, r, cfg)
            } else {
                let tay = taylor.as_ref().expect("computed above");
                an_coefficient_dual(n, base, &f, tay, p, r, cfg)
            }
        })
        .collect::<Result<_>>()?;
    let coeffs = breakdown.iter().map(|b| b.total()).collect();
    Ok(LogExpansion {
        params,
        breakdown,
        coeffs,
        analytic_factor: f,
        radius: params.a,
    })
}

impl<F: DualEvaluator> LogExpansion<F> {
    /// |A_N| |w|^N / (1 − |w|/a), a bound for the omitted part of the series.
    pub fn tail_bound(&self, w: f64) -> f64 {
        let n = self.coeffs.len() - 1;
        let q = w / self.radius;
        self.coeffs[n].norm() * w.powi(n as i32) * q / (1.0 - q)
    }
}

/// The expansion at w = t + a on any sheet around −a, |w| < a.
pub fn eval_log_expansion_at<F: DualEvaluator>(exp: &LogExpansion<F>, w: SheetPoint) -> Result<C64> {
    if w.rho >= exp.radius {
        return Err(Error::Domain {
            func: "eval_log_expansion",
            msg: format!("|t + a| = {} not below a = {}", w.rho, exp.radius),
        });
    }
    let wc = w.to_complex();
    let mut series = C64::new(0.0, 0.0);
    for a_k in exp.coeffs.iter().rev() {
        series = series * wc + a_k;
    }
    if exp.params.t.norm() == 0.0 {
        return Ok(series);
    }
    let reflected = exp
        .analytic_factor
        .eval(SheetPoint::from_complex(-wc)?)?;
    Ok(series - exp.params.t / two_pi_i() * reflected * w.ln())
}

/// Principal branch, |t + a| < a and |arg(t + a)| < π.
pub fn eval_log_expansion<F: DualEvaluator>(exp: &LogExpansion<F>, t: C64) -> Result<C64> {
    let w = t + exp.radius;
    if w.im == 0.0 && w.re <= 0.0 {
        return Err(Error::Domain {
            func: "eval_log_expansion",
            msg: format!("arg(t + a) = ±π at t = {t}"),
        });
    }
    eval_log_expansion_at(exp, SheetPoint::from_complex(w)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    /// |A_n| a^n / √(n+3)
    pub normalized: f64,
    /// |A_{n+1}| / |A_n|, absent for the last row
    pub ratio: Option<f64>,
    pub alpha_i: f64,
    pub alpha_j: f64,
    pub alpha_f0: f64,
    pub i_dominates: bool,
}

pub fn an_growth_report<F>(exp: &LogExpansion<F>) -> Result<Vec<GrowthRow>> {
    if exp.breakdown.len() < 20 {
        return Err(Error::InsufficientCoefficients {
            needed: 20,
            available: exp.breakdown.len(),
        });
    }
    let a = exp.radius;
    Ok(exp
        .breakdown
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let an = b.total().norm();
            let next = exp.breakdown.get(i + 1).map(|x| x.total().norm() / an);
            GrowthRow {
                n: b.n,
                normalized: an * a.powi(b.n as i32) / ((b.n + 3) as f64).sqrt(),
                ratio: next,
                alpha_i: b.alpha_i.norm(),
                alpha_j: b.alpha_j.norm(),
                alpha_f0: b.alpha_f0.norm(),
                i_dominates: b.alpha_i.norm() >= b.alpha_j.norm().max(b.alpha_f0.norm()),
            }
        })
        .collect())
}

/// Classical values for the Bessel dual F_ν (a = 2):
///   A_k = (cos νπ/π) (½−ν)_k (½+ν)_k / ((k!)² 2^k) (d(k) + log 2).
pub fn bessel_classical_coeffs(nu: f64, n_max: usize) -> Result<Vec<C64>> {
    let (a, b) = (C64::new(0.5 - nu, 0.0), C64::new(0.5 + nu, 0.0));
    let d = goursat_d(a, b, n_max + 1)?;
    let pref = (nu * PI).cos() / PI;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut fact2 = 1.0;
    for k in 0..=n_max {
        if k > 0 {
            fact2 *= (k * k) as f64 * 2.0;
        }
        out.push(pochhammer(a, k) * pochhammer(b, k) / fact2 * (d[k] + 2f64.ln()) * pref);
    }
    Ok(out)
}
