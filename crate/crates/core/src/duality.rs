//! Laplace and Borel transforms between the ζ-plane functions P and the
//! dual functions F(t) with a logarithmic branch point at t = −a.
//!
//!   P(ζ) = ζ ∫₀^∞ e^{−ζt} F(t) dt,
//!   F(t) = (1/2πi) ∫_γ e^{tζ} P(ζ) dζ/ζ.

use crate::error::{Error, Result};
use crate::monodromy::{continue_to_sheet, BaseEvaluator, BesselP, MonodromyParams};
use crate::quad::{integrate_with_breaks, periodic_trapezoid, QuadResult, QuadratureConfig};
use crate::series::AsymptoticSeries;
use crate::sheet::SheetPoint;
use crate::specfun::{bessel_f_shifted, hyp2f1_goursat_log_sheet};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Rays longer than this are refused.
pub const MAX_RAY_LENGTH: f64 = 1e6;

const ANGLE_EPS: f64 = 8.0 * f64::EPSILON;

/// γ_θ(r): the ray at −θ, the circle |ζ| = r from −θ to θ, the ray at θ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub r: f64,
    pub theta: f64,
    /// Ray cut-off; `None` derives it from the decay rate and tolerance.
    pub r_trunc: Option<f64>,
}

impl ContourSpec {
    pub fn new(r: f64, theta: f64, r_trunc: Option<f64>) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("contour radius must be positive, got {r}")));
        }
        if !(theta > 0.5 * PI && theta <= 1.5 * PI) {
            return Err(Error::InvalidParameter(format!(
                "contour angle {theta} outside (π/2, 3π/2]"
            )));
        }
        if let Some(rt) = r_trunc {
            if !(rt > r) {
                return Err(Error::InvalidParameter(format!(
                    "truncation radius {rt} must exceed r = {r}"
                )));
            }
        }
        Ok(Self { r, theta, r_trunc })
    }

    pub fn standard(r: f64) -> Result<Self> {
        Self::new(r, PI, None)
    }

    /// The opening angle giving the fastest decay on both rays at `t`.
    pub fn for_point(r: f64, t: SheetPoint, a: f64) -> Result<Self> {
        let psi = t.theta;
        let mut best = (PI, contour_decay(t, PI, a));
        let alt = (1.5 * PI - psi.abs()).clamp(0.5 * PI + 1e-3, 1.5 * PI);
        let d = contour_decay(t, alt, a);
        if d > best.1 {
            best = (alt, d);
        }
        Self::new(r, best.0, None)
    }
}

/// Exponential growth rate of P along the ray arg ζ = φ.
fn growth_rate(a: f64, phi: f64) -> f64 {
    let p = phi.abs();
    if p <= PI * (1.0 + ANGLE_EPS) {
        0.0
    } else if p <= 2.0 * PI {
        a * phi.cos().max(0.0)
    } else {
        a
    }
}

/// Decay rate of e^{tζ}P(ζ) along the ray arg ζ = φ.
fn ray_decay(t: SheetPoint, phi: f64, a: f64) -> f64 {
    -t.rho * (t.theta + phi).cos() - growth_rate(a, phi)
}

fn contour_decay(t: SheetPoint, theta: f64, a: f64) -> f64 {
    let psi = t.theta;
    ray_decay(t, theta - psi, a).min(ray_decay(t, -theta - psi, a))
}

/// ∫_r^{R} g(ρ) dρ with g decaying like e^{−decay·ρ}.
fn ray_integral<G>(g: G, r: f64, decay: f64, r_trunc: Option<f64>, cfg: &QuadratureConfig) -> Result<C64>
where
    G: FnMut(f64) -> Result<C64>,
{
    if !(decay > 0.0) {
        return Err(Error::Quadrature(format!(
            "integrand does not decay along the ray (rate {decay:.3e})"
        )));
    }
    let end = match r_trunc {
        Some(rt) => rt,
        None => r + ((1.0 / cfg.abs_tol).ln() + 5.0) / decay,
    };
    if end - r > MAX_RAY_LENGTH {
        return Err(Error::Quadrature(format!(
            "ray truncation {end:.3e} exceeds the budget {MAX_RAY_LENGTH:.0e}"
        )));
    }
    let mut splits = Vec::new();
    let mut w = 1.0 / decay;
    while r + w < end {
        splits.push(r + w);
        w *= 2.0;
    }
    let q = integrate_with_breaks(g, r, end, &splits, cfg)?;
    if !accepted(&q, cfg) {
        return Err(Error::Quadrature(format!(
            "ray integral not converged (error {:.3e})",
            q.error
        )));
    }
    Ok(q.value)
}

/// Converged, or limited only by cancellation against ∫|g|.
fn accepted(q: &QuadResult, cfg: &QuadratureConfig) -> bool {
    q.converged || q.error <= 10.0 * cfg.rel_tol * q.magnitude
}

fn arc_integral<G>(g: G, from: f64, to: f64, cfg: &QuadratureConfig) -> Result<C64>
where
    G: FnMut(f64) -> Result<C64>,
{
    let span = to - from;
    let pieces = (span.abs() / (0.5 * PI)).ceil().max(1.0) as usize;
    let splits: Vec<f64> = (1..pieces)
        .map(|i| from + span * i as f64 / pieces as f64)
        .collect();
    let q = integrate_with_breaks(g, from, to, &splits, cfg)?;
    if !accepted(&q, cfg) {
        return Err(Error::Quadrature(format!(
            "arc integral not converged (error {:.3e})",
            q.error
        )));
    }
    Ok(q.value)
}

fn p_at<E: BaseEvaluator + ?Sized>(base: &E, rho: f64, phi: f64) -> Result<C64> {
    continue_to_sheet(base, SheetPoint { rho, theta: phi })
}

/// Functions F(t) on the plane cut along (−∞, −a].
pub trait DualEvaluator: Send + Sync {
    fn params(&self) -> MonodromyParams;

    /// The branch analytic off the cut, for |arg t| ≤ π; arg t = ±π with
    /// |t| > a selects the upper or lower bank.
    fn eval(&self, t: SheetPoint) -> Result<C64>;

    /// F at t = w − a with w anywhere on the logarithmic surface around
    /// t = −a, continuing the branch above. `None` when unsupported.
    fn eval_around_minus_a(&self, _w: SheetPoint) -> Option<Result<C64>> {
        None
    }

    /// The branch point, −a; the cut runs from there to −∞.
    fn branch_anchor(&self) -> f64 {
        -self.params().a
    }

    /// Whether F may carry the log(t + a) singularity (T ≠ 0).
    fn log_singular(&self) -> bool {
        self.params().t.norm() != 0.0
    }
}

impl<E: DualEvaluator + ?Sized> DualEvaluator for &E {
    fn params(&self) -> MonodromyParams {
        (**self).params()
    }
    fn eval(&self, t: SheetPoint) -> Result<C64> {
        (**self).eval(t)
    }
    fn eval_around_minus_a(&self, w: SheetPoint) -> Option<Result<C64>> {
        (**self).eval_around_minus_a(w)
    }
}

/// w = t + a, keeping the bank of the cut.
pub fn shift_to_branch_point(t: SheetPoint, a: f64) -> Result<SheetPoint> {
    if !t.on_fundamental_sheet() {
        return Err(Error::Sector {
            theta: t.theta,
            region: "|arg t| ≤ π",
        });
    }
    if (t.theta.abs() - PI).abs() <= 4.0 * PI * f64::EPSILON {
        return if t.rho > a {
            Ok(SheetPoint {
                rho: t.rho - a,
                theta: t.theta.signum() * PI,
            })
        } else if t.rho < a {
            Ok(SheetPoint::real(a - t.rho))
        } else {
            Err(Error::ZeroArgument { func: "dual F at t = −a" })
        };
    }
    SheetPoint::from_complex(t.to_complex() + a)
}

/// F ≡ c, T = 0.
#[derive(Debug, Clone, Copy)]
pub struct ConstantDual {
    pub a: f64,
    pub value: C64,
}

impl DualEvaluator for ConstantDual {
    fn params(&self) -> MonodromyParams {
        MonodromyParams {
            a: self.a,
            t: C64::new(0.0, 0.0),
        }
    }
    fn eval(&self, _t: SheetPoint) -> Result<C64> {
        Ok(self.value)
    }
    fn eval_around_minus_a(&self, _w: SheetPoint) -> Option<Result<C64>> {
        Some(Ok(self.value))
    }
}

/// F_ν(t) = ₂F₁(½−ν, ½+ν; 1; −t/2).
#[derive(Debug, Clone, Copy)]
pub struct BesselDual {
    pub nu: f64,
    pub cfg: QuadratureConfig,
}

impl BesselDual {
    pub fn new(nu: f64) -> Self {
        Self {
            nu,
            cfg: QuadratureConfig::default(),
        }
    }
}

impl DualEvaluator for BesselDual {
    fn params(&self) -> MonodromyParams {
        MonodromyParams::bessel(self.nu)
    }
    fn eval(&self, t: SheetPoint) -> Result<C64> {
        bessel_f_shifted(self.nu, shift_to_branch_point(t, 2.0)?)
    }
    fn eval_around_minus_a(&self, w: SheetPoint) -> Option<Result<C64>> {
        if w.on_fundamental_sheet() {
            return Some(bessel_f_shifted(self.nu, w));
        }
        if w.rho < 1.6 {
            let (a, b) = (C64::new(0.5 - self.nu, 0.0), C64::new(0.5 + self.nu, 0.0));
            return Some(hyp2f1_goursat_log_sheet(a, b, w.scale(0.5)));
        }
        Some(borel_around_minus_a(&BesselP { nu: self.nu }, w, 1.0, &self.cfg))
    }
}

/// F given by a closure on the cut plane.
pub struct FnDual<G> {
    pub params: MonodromyParams,
    pub f: G,
}

impl<G> DualEvaluator for FnDual<G>
where
    G: Fn(SheetPoint) -> Result<C64> + Send + Sync,
{
    fn params(&self) -> MonodromyParams {
        self.params
    }
    fn eval(&self, t: SheetPoint) -> Result<C64> {
        (self.f)(t)
    }
}

/// ζ ∫₀^∞ e^{−ζt} F(t) dt along the ray arg t = −arg ζ.
pub fn laplace<F: DualEvaluator + ?Sized>(f: &F, zeta: SheetPoint, cfg: &QuadratureConfig) -> Result<C64> {
    if !zeta.on_fundamental_sheet() {
        return Err(Error::Sector {
            theta: zeta.theta,
            region: "|arg ζ| ≤ π",
        });
    }
    let a = f.params().a;
    let dir = -zeta.theta.clamp(-PI, PI);
    let decay = zeta.rho;
    let end = ((1.0 / cfg.abs_tol).ln() + 5.0) / decay;
    if end > MAX_RAY_LENGTH {
        return Err(Error::Quadrature(format!(
            "ray truncation {end:.3e} exceeds the budget {MAX_RAY_LENGTH:.0e}"
        )));
    }
    let mut splits = Vec::new();
    let mut w = 1.0 / decay;
    while w < end {
        splits.push(w);
        w *= 2.0;
    }
    if dir.abs() > 0.5 * PI {
        // Grade panels toward the closest approach to t = −a.
        let s0 = a * (-dir.cos());
        for k in 1..=12 {
            let h = s0 * 0.5f64.powi(k);
            splits.push(s0 - h);
            splits.push(s0 + h);
        }
        splits.push(s0);
    }
    let q = integrate_with_breaks(
        |s| {
            if s == 0.0 {
                return Ok(f.eval(SheetPoint::real(0.0))? * decay);
            }
            let t = SheetPoint { rho: s, theta: dir };
            Ok(f.eval(t)? * (decay * (-decay * s).exp()))
        },
        0.0,
        end,
        &splits,
        cfg,
    )?;
    if !q.converged {
        return Err(Error::NoConvergence {
            func: "laplace",
            iterations: cfg.max_subdivisions,
        });
    }
    Ok(q.value)
}

/// P = 𝓛{F} as an evaluator.
pub struct LaplaceEvaluator<F> {
    pub dual: F,
    pub cfg: QuadratureConfig,
}

impl<F: DualEvaluator> BaseEvaluator for LaplaceEvaluator<F> {
    fn params(&self) -> MonodromyParams {
        self.dual.params()
    }
    fn eval(&self, zeta: SheetPoint) -> Result<C64> {
        laplace(&self.dual, zeta, &self.cfg)
    }
}

/// The three pieces of the Borel integral; value = plus − minus + arc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BorelPieces {
    pub value: C64,
    pub plus: C64,
    pub minus: C64,
    pub arc: C64,
}

/// F(t) from the contour γ_θ(r) rotated by −arg t.
pub fn borel_pieces<E: BaseEvaluator + ?Sized>(
    base: &E,
    t: SheetPoint,
    contour: &ContourSpec,
    cfg: &QuadratureConfig,
) -> Result<BorelPieces> {
    let a = base.params().a;
    if t.rho <= 0.0 {
        return Err(Error::ZeroArgument { func: "borel" });
    }
    let tc = t.to_complex();
    let psi = t.theta;
    let r = contour.r;
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let ray = |phi: f64| -> Result<C64> {
        let decay = ray_decay(t, phi, a);
        if !(decay > 0.0) {
            return Err(Error::Quadrature(format!(
                "ray at arg ζ = {phi:.4} does not decay for t = {tc} (rate {decay:.3e})"
            )));
        }
        let e = C64::from_polar(1.0, phi);
        let v = ray_integral(
            |rho| Ok((tc * e * rho).exp() * p_at(base, rho, phi)? / rho),
            r,
            decay,
            contour.r_trunc,
            cfg,
        )?;
        Ok(v / two_pi_i)
    };
    let plus = ray(contour.theta - psi)?;
    let minus = ray(-contour.theta - psi)?;
    let arc = arc_integral(
        |phi| {
            let z = C64::from_polar(r, phi);
            Ok((tc * z).exp() * p_at(base, r, phi)?)
        },
        -contour.theta - psi,
        contour.theta - psi,
        cfg,
    )? / (2.0 * PI);
    Ok(BorelPieces {
        value: plus - minus + arc,
        plus,
        minus,
        arc,
    })
}

pub fn borel<E: BaseEvaluator + ?Sized>(
    base: &E,
    t: SheetPoint,
    contour: &ContourSpec,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    Ok(borel_pieces(base, t, contour, cfg)?.value)
}

/// F₀(t, r) = (1/2πi) ∮_{|ζ|=r, −π<arg ζ<π} e^{tζ} P(ζ) dζ/ζ, an entire
/// function of exponential type r.
pub fn borel_entire_piece<E: BaseEvaluator + ?Sized>(
    base: &E,
    t: C64,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    Ok(arc_integral(
        |phi| {
            let z = C64::from_polar(r, phi);
            Ok((t * z).exp() * p_at(base, r, phi)?)
        },
        -PI,
        PI,
        cfg,
    )? / (2.0 * PI))
}

/// F at t = w − a from
///   F = F₀(t, r) + (T/2πi) ∫_r^∞ e^{−wζ} P(ζ) dζ/ζ,
/// with the ray turned to arg ζ = −arg w so that w may wind around −a.
pub fn borel_around_minus_a<E: BaseEvaluator + ?Sized>(
    base: &E,
    w: SheetPoint,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    if w.rho <= 0.0 {
        return Err(Error::ZeroArgument { func: "borel at t = −a" });
    }
    let params = base.params();
    let a = params.a;
    let wc = w.to_complex();
    let t = wc - a;
    let f0 = borel_entire_piece(base, t, r, cfg)?;
    if params.t.norm() == 0.0 {
        return Ok(f0);
    }
    let phi = -w.theta;
    let decay = w.rho - growth_rate(a, phi);
    let arc = if phi == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        arc_integral(
            |chi| {
                let z = C64::from_polar(r, chi);
                Ok((-wc * z).exp() * p_at(base, r, chi)? * C64::new(0.0, 1.0))
            },
            0.0,
            phi,
            cfg,
        )?
    };
    let e = C64::from_polar(1.0, phi);
    let ray = ray_integral(
        |rho| Ok((-wc * e * rho).exp() * p_at(base, rho, phi)? / rho),
        r,
        decay,
        None,
        cfg,
    )?;
    Ok(f0 + params.t / C64::new(0.0, 2.0 * PI) * (arc + ray))
}

/// The branch analytic off (−∞, −a], in the half-plane Re(t + a) > 0.
pub fn borel_branch_near_minus_a<E: BaseEvaluator + ?Sized>(
    base: &E,
    t: C64,
    r: f64,
    cfg: &QuadratureConfig,
) -> Result<C64> {
    let a = base.params().a;
    let w = t + a;
    if !(w.re > 0.0) {
        return Err(Error::Domain {
            func: "borel_branch_near_minus_a",
            msg: format!("needs Re(t + a) > 0, got {}", w.re),
        });
    }
    borel_around_minus_a(base, SheetPoint::from_complex(w)?, r, cfg)
}

/// F = 𝓛⁻¹P as an evaluator; each point uses whichever representation
/// decays faster.
pub struct BorelDual<E> {
    pub base: E,
    pub r: f64,
    pub cfg: QuadratureConfig,
}

impl<E: BaseEvaluator> BorelDual<E> {
    pub fn new(base: E) -> Self {
        Self {
            base,
            r: 1.0,
            cfg: QuadratureConfig::default(),
        }
    }
}

impl<E: BaseEvaluator> DualEvaluator for BorelDual<E> {
    fn params(&self) -> MonodromyParams {
        self.base.params()
    }
    fn eval(&self, t: SheetPoint) -> Result<C64> {
        let a = self.base.params().a;
        let w = shift_to_branch_point(t, a)?;
        let contour = ContourSpec::for_point(self.r, t, a)?;
        if contour_decay(t, contour.theta, a) > w.rho {
            borel(&self.base, t, &contour, &self.cfg)
        } else {
            borel_around_minus_a(&self.base, w, self.r, &self.cfg)
        }
    }
    fn eval_around_minus_a(&self, w: SheetPoint) -> Option<Result<C64>> {
        Some(borel_around_minus_a(&self.base, w, self.r, &self.cfg))
    }
}

/// p_k = F^{(k)}(0) by the trapezoidal rule on |t| = a/2.
pub fn taylor_coeffs_f<F: DualEvaluator + ?Sized>(f: &F, n_max: usize) -> Result<AsymptoticSeries> {
    taylor_coeffs_f_radius(f, n_max, 0.5 * f.params().a)
}

pub fn taylor_coeffs_f_radius<F: DualEvaluator + ?Sized>(
    f: &F,
    n_max: usize,
    radius: f64,
) -> Result<AsymptoticSeries> {
    let a = f.params().a;
    if !(radius > 0.0 && radius < a) {
        return Err(Error::InvalidParameter(format!(
            "Cauchy radius {radius} must lie in (0, a = {a})"
        )));
    }
    let n = (2 * n_max + 64).next_power_of_two();
    let mut vals = Vec::with_capacity(n);
    for j in 0..n {
        let phi = 2.0 * PI * j as f64 / n as f64;
        let theta = if phi > PI { phi - 2.0 * PI } else { phi };
        vals.push(f.eval(SheetPoint { rho: radius, theta })?);
    }
    let mut coeffs = Vec::with_capacity(n_max + 1);
    let mut fact = 1.0;
    for k in 0..=n_max {
        if k > 0 {
            fact *= k as f64;
        }
        let mut j = 0usize;
        let s = periodic_trapezoid(
            |phi| {
                let v = vals[j] * C64::from_polar(radius.powi(-(k as i32)), -(k as f64) * phi);
                j += 1;
                Ok(v)
            },
            n,
        )?;
        coeffs.push(s * (fact / (2.0 * PI)));
    }
    AsymptoticSeries::new(coeffs)
}

/// |F((t+a)e^{−2πi} − a) − F(t) − T F((t+a)e^{−iπ})| for real t > −a; the
/// reflected value is taken on the lower bank, the side from which the
/// clockwise loop around −a returns.
pub fn hmr_residual<F: DualEvaluator + ?Sized>(f: &F, t: f64) -> Result<f64> {
    let params = f.params();
    let a = params.a;
    let w = t + a;
    if !(w > 0.0) {
        return Err(Error::Domain {
            func: "hmr_residual",
            msg: format!("needs t > −a, got {t}"),
        });
    }
    let looped = f
        .eval_around_minus_a(SheetPoint { rho: w, theta: -2.0 * PI })
        .unwrap_or(Err(Error::Domain {
            func: "hmr_residual",
            msg: "evaluator cannot continue around t = −a".into(),
        }))?;
    let here = f.eval(SheetPoint::from_complex(C64::new(t, 0.0))?)?;
    let reflected = f.eval(SheetPoint { rho: w, theta: -PI })?;
    Ok((looped - here - params.t * reflected).norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogGrowthReport {
    /// Least-squares c in F(−a + s) ≈ c log s + d.
    pub fitted_slope: C64,
    /// −T F(0) / 2πi.
    pub predicted_slope: C64,
    pub deviation: f64,
    pub passes: bool,
}

/// Fits the log(t + a) slope of F approaching −a along t + a = s > 0 and
/// compares it with −T F(0)/2πi; `threshold` bounds the accepted deviation.
pub fn log_growth_check<F: DualEvaluator + ?Sized>(
    f: &F,
    s_values: &[f64],
    threshold: f64,
) -> Result<LogGrowthReport> {
    if s_values.len() < 2 {
        return Err(Error::InvalidParameter("need at least two sample points".into()));
    }
    let params = f.params();
    let a = params.a;
    let mut xs = Vec::with_capacity(s_values.len());
    let mut ys = Vec::with_capacity(s_values.len());
    for &s in s_values {
        if !(s > 0.0 && s < a) {
            return Err(Error::InvalidParameter(format!("sample s = {s} outside (0, a)")));
        }
        xs.push(s.ln());
        let t = SheetPoint::from_complex(C64::new(s - a, 0.0))?;
        ys.push(f.eval(t)?);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<C64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: C64 = xs.iter().zip(&ys).map(|(x, y)| (y - my) * (x - mx)).sum();
    let fitted = sxy / sxx;
    let f0 = f.eval(SheetPoint::real(0.0))?;
    let predicted = -params.t * f0 / C64::new(0.0, 2.0 * PI);
    let deviation = (fitted - predicted).norm();
    Ok(LogGrowthReport {
        fitted_slope: fitted,
        predicted_slope: predicted,
        deviation,
        passes: deviation <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_f, bessel_p};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn laplace_of_constant_and_identity() {
        let one = ConstantDual {
            a: 2.0,
            value: c(1.0, 0.0),
        };
        let lin = FnDual {
            params: MonodromyParams::new(2.0, c(0.0, 0.0)).unwrap(),
            f: |t: SheetPoint| Ok(t.to_complex()),
        };
        for (r, th) in [(0.5, 0.0), (2.0, 1.2), (5.0, -0.4)] {
            let z = SheetPoint::new(r, th).unwrap();
            assert!((laplace(&one, z, &cfg()).unwrap() - 1.0).norm() < 1e-10);
            let v = laplace(&lin, z, &cfg()).unwrap();
            assert!((v - z.to_complex().inv()).norm() < 1e-10);
        }
    }

    #[test]
    fn laplace_of_bessel_dual() {
        let nu = 0.3;
        let f = BesselDual::new(nu);
        for x in [1.0, 2.0, 4.0, 7.0, 10.0] {
            let z = SheetPoint::real(x);
            let v = laplace(&f, z, &cfg()).unwrap();
            let o = bessel_p(nu, z).unwrap();
            assert!((v - o).norm() < 1e-6 * o.norm(), "x {x}: {v} vs {o}");
        }
    }

    #[test]
    fn laplace_on_the_banks() {
        let nu = 0.3;
        let f = BesselDual::new(nu);
        for th in [PI, -PI, 2.5] {
            let z = SheetPoint::new(3.0, th).unwrap();
            let v = laplace(&f, z, &cfg()).unwrap();
            let o = bessel_p(nu, z).unwrap();
            assert!((v - o).norm() < 1e-6 * o.norm(), "th {th}: {v} vs {o}");
        }
    }

    #[test]
    fn borel_of_constant() {
        let p = crate::monodromy::ConstantP {
            a: 2.0,
            value: c(1.0, 0.0),
        };
        let contour = ContourSpec::standard(1.0).unwrap();
        for t in [0.3, 1.0, 4.0] {
            let pieces = borel_pieces(&p, SheetPoint::real(t), &contour, &cfg()).unwrap();
            assert!((pieces.value - 1.0).norm() < 1e-10);
            assert!((pieces.plus - pieces.minus).norm() < 1e-12);
        }
    }

    #[test]
    fn borel_of_bessel() {
        let nu = 0.3;
        let p = BesselP { nu };
        let contour = ContourSpec::standard(1.0).unwrap();
        for t in [0.2, 0.7, 1.5] {
            let v = borel(&p, SheetPoint::real(t), &contour, &cfg()).unwrap();
            let o = bessel_f(nu, c(t, 0.0)).unwrap();
            assert!((v - o).norm() < 1e-5 * o.norm(), "t {t}: {v} vs {o}");
        }
    }

    #[test]
    fn borel_radius_independence() {
        let p = BesselP { nu: 0.3 };
        let t = SheetPoint::real(1.0);
        let v1 = borel(&p, t, &ContourSpec::standard(0.5).unwrap(), &cfg()).unwrap();
        let v2 = borel(&p, t, &ContourSpec::standard(2.0).unwrap(), &cfg()).unwrap();
        assert!((v1 - v2).norm() < 1e-8);
    }

    #[test]
    fn borel_off_axis_and_auto_angle() {
        let nu = 0.3;
        let p = BesselP { nu };
        for (rho, psi) in [(0.8, 2.6), (3.0, 1.0), (1.2, -2.9), (3.5, PI)] {
            let t = SheetPoint::new(rho, psi).unwrap();
            let contour = ContourSpec::for_point(1.0, t, 2.0).unwrap();
            let v = borel(&p, t, &contour, &cfg()).unwrap();
            let o = BesselDual::new(nu).eval(t).unwrap();
            assert!((v - o).norm() < 1e-7 * o.norm(), "t {rho}∠{psi}: {v} vs {o}");
        }
    }

    #[test]
    fn second_representation_agrees() {
        let nu = 0.3;
        let p = BesselP { nu };
        let a = borel(&p, SheetPoint::real(0.5), &ContourSpec::standard(1.0).unwrap(), &cfg()).unwrap();
        let b = borel_branch_near_minus_a(&p, c(0.5, 0.0), 1.0, &cfg()).unwrap();
        assert!((a - b).norm() < 1e-7);
        assert!(matches!(
            borel_branch_near_minus_a(&p, c(-2.5, 0.0), 1.0, &cfg()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn log_singularity_at_branch_point() {
        let p = BesselP { nu: 0.3 };
        let t_mult = p.params().t;
        let mut prev = None;
        for s in [0.1, 0.01, 0.001] {
            let f = borel_branch_near_minus_a(&p, c(s - 2.0, 0.0), 1.0, &cfg()).unwrap();
            let reg = f + t_mult / C64::new(0.0, 2.0 * PI) * s.ln();
            if let Some(q) = prev {
                let d: C64 = reg - q;
                assert!(d.norm() < 0.2, "s {s}: {reg} vs {q}");
            }
            prev = Some(reg);
        }
    }

    #[test]
    fn no_multiplier_means_no_singularity() {
        let p = BesselP { nu: 0.5 };
        let f = |s: f64| borel_branch_near_minus_a(&p, c(s - 2.0, 0.0), 1.0, &cfg()).unwrap();
        let f_mid = borel_entire_piece(&p, c(-2.0, 0.0), 1.0, &cfg()).unwrap();
        // With T = 0 only the entire piece remains, so F is smooth across −a.
        let across = borel_entire_piece(&p, c(-2.0 - 1e-3, 0.0), 1.0, &cfg()).unwrap();
        assert!((f(1e-3) - f_mid).norm() < 1e-2);
        assert!((f(1e-3) - across).norm() < 1e-2);
        assert!((f(1e-3) - borel_entire_piece(&p, c(-2.0 + 1e-3, 0.0), 1.0, &cfg()).unwrap()).norm() < 1e-12);
    }

    #[test]
    fn taylor_coefficients() {
        let nu = 0.3;
        let s = taylor_coeffs_f(&BesselDual::new(nu), 6).unwrap();
        let h = AsymptoticSeries::bessel(nu, 6);
        for k in 0..=6 {
            assert!((s.coeffs[k] - h.coeffs[k]).norm() < 1e-12 * h.coeffs[k].norm().max(1.0), "k {k}");
        }
        let one = ConstantDual {
            a: 2.0,
            value: c(1.0, 0.0),
        };
        let s = taylor_coeffs_f(&one, 5).unwrap();
        assert!((s.coeffs[0] - 1.0).norm() < 1e-15);
        assert!(s.coeffs[1..].iter().all(|p| p.norm() < 1e-12));
        assert!(taylor_coeffs_f_radius(&one, 3, 2.5).is_err());
    }

    #[test]
    fn hmr_for_bessel() {
        let f = BesselDual::new(0.3);
        assert!(hmr_residual(&f, -1.0).unwrap() < 1e-6);
        let f = BesselDual::new(0.25);
        assert!(hmr_residual(&f, 0.5).unwrap() < 1e-6);
        let one = ConstantDual {
            a: 2.0,
            value: c(1.0, 0.0),
        };
        assert_eq!(hmr_residual(&one, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn log_slope_fit() {
        let f = BesselDual::new(0.3);
        let rep = log_growth_check(&f, &[1e-3, 1e-4, 1e-5, 1e-6], 1e-2).unwrap();
        assert!(rep.passes, "{rep:?}");
    }
}
