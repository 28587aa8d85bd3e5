//! The perturbed Bessel equation
//!
//!   u'' = (a²/4 + A(ζ)/ζ²) u,   A(ζ) = Σ a_j ζ^{−2j},
//!
//! its recessive solution u = e^{−aζ/2} P(ζ), and numerical extraction of
//! the Stokes multiplier T.

use crate::error::{Error, Result};
use crate::monodromy::{BaseEvaluator, MonodromyParams};
use crate::ode::{solve, OdeConfig};
use crate::series::AsymptoticSeries;
use crate::sheet::SheetPoint;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Arcs are integrated in pieces subtending at most this angle.
pub const MAX_ARC_STEP: f64 = 5.0 * PI / 180.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PBDECoefficients {
    pub a: f64,
    pub a_coeffs: Vec<C64>,
}

impl PBDECoefficients {
    pub fn new(a: f64, a_coeffs: Vec<C64>) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
        }
        if a_coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite A coefficient".into()));
        }
        Ok(Self { a, a_coeffs })
    }

    /// a = 2, A ≡ ν² − ¼.
    pub fn bessel(nu: f64) -> Self {
        Self {
            a: 2.0,
            a_coeffs: vec![C64::new(nu * nu - 0.25, 0.0)],
        }
    }

    pub fn is_real(&self) -> bool {
        self.a_coeffs.iter().all(|c| c.im == 0.0)
    }

    pub fn big_a(&self, zeta: C64) -> C64 {
        let w = (zeta * zeta).inv();
        self.a_coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * w + c)
    }

    /// a²/4 + A(ζ)/ζ².
    pub fn potential(&self, zeta: C64) -> C64 {
        self.big_a(zeta) / (zeta * zeta) + 0.25 * self.a * self.a
    }
}

/// p_0 = 1, a k p_k = −(k−1) k p_{k−1} + Σ_{2j+i=k−1} a_j p_i.
pub fn asymptotic_coeffs(coeffs: &PBDECoefficients, n_max: usize) -> AsymptoticSeries {
    let mut p = vec![C64::new(1.0, 0.0)];
    for k in 1..=n_max {
        let kf = k as f64;
        let mut rhs = -p[k - 1] * ((kf - 1.0) * kf);
        for (j, &aj) in coeffs.a_coeffs.iter().enumerate() {
            if 2 * j > k - 1 {
                break;
            }
            rhs += aj * p[k - 1 - 2 * j];
        }
        p.push(rhs / (coeffs.a * kf));
    }
    let zero_tail = coeffs.a_coeffs.iter().all(|c| c.norm() == 0.0);
    AsymptoticSeries {
        coeffs: p,
        terminating: zero_tail,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ODESolutionState {
    pub zeta: SheetPoint,
    pub u: C64,
    pub du: C64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PathSegment {
    /// Along the current ray to modulus `to_rho`.
    Radial { to_rho: f64 },
    /// Along the current circle to argument `to_theta`.
    Arc { to_theta: f64 },
    /// Straight segment in the plane; the argument is tracked continuously.
    Line { to: C64 },
}

// (P, P') with P = e^{aζ/2} u
fn to_p_vars(a: f64, s: &ODESolutionState) -> [C64; 2] {
    let e = (0.5 * a * s.zeta.to_complex()).exp();
    [e * s.u, e * (s.du + 0.5 * a * s.u)]
}

fn from_p_vars(a: f64, zeta: SheetPoint, y: [C64; 2]) -> ODESolutionState {
    let e = (-0.5 * a * zeta.to_complex()).exp();
    ODESolutionState {
        zeta,
        u: e * y[0],
        du: e * (y[1] - 0.5 * a * y[0]),
    }
}

fn rhs(coeffs: &PBDECoefficients, zeta: C64, dzeta: C64, y: &[C64; 2]) -> [C64; 2] {
    let g = coeffs.big_a(zeta) / (zeta * zeta);
    [dzeta * y[1], dzeta * (coeffs.a * y[1] + g * y[0])]
}

fn transport_p(
    coeffs: &PBDECoefficients,
    mut zeta: SheetPoint,
    mut y: [C64; 2],
    path: &[PathSegment],
    cfg: &OdeConfig,
) -> Result<(SheetPoint, [C64; 2])> {
    for seg in path {
        match *seg {
            PathSegment::Radial { to_rho } => {
                if !(to_rho > 0.0) {
                    return Err(Error::PathThroughOrigin);
                }
                let dir = C64::from_polar(1.0, zeta.theta);
                let (out, _) = solve(
                    |s, y| rhs(coeffs, dir * s, dir, y),
                    zeta.rho,
                    to_rho,
                    y,
                    cfg,
                )?;
                y = out;
                zeta = SheetPoint {
                    rho: to_rho,
                    theta: zeta.theta,
                };
            }
            PathSegment::Arc { to_theta } => {
                let rho = zeta.rho;
                let span = to_theta - zeta.theta;
                let pieces = (span.abs() / MAX_ARC_STEP).ceil().max(1.0) as usize;
                let mut phi0 = zeta.theta;
                for i in 1..=pieces {
                    let phi1 = zeta.theta + span * i as f64 / pieces as f64;
                    let (out, _) = solve(
                        |phi, y| {
                            let z = C64::from_polar(rho, phi);
                            rhs(coeffs, z, C64::new(0.0, 1.0) * z, y)
                        },
                        phi0,
                        phi1,
                        y,
                        cfg,
                    )?;
                    y = out;
                    phi0 = phi1;
                }
                zeta = SheetPoint {
                    rho,
                    theta: to_theta,
                };
            }
            PathSegment::Line { to } => {
                let z0 = zeta.to_complex();
                let d = to - z0;
                // closest approach to the origin
                let s_min = if d.norm_sqr() > 0.0 {
                    (-(z0.conj() * d).re / d.norm_sqr()).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                let closest = (z0 + d * s_min).norm();
                if closest <= 1e-12 * (z0.norm() + to.norm()) {
                    return Err(Error::PathThroughOrigin);
                }
                let (out, _) = solve(|s, y| rhs(coeffs, z0 + d * s, d, y), 0.0, 1.0, y, cfg)?;
                y = out;
                let dtheta = (to / z0).arg();
                zeta = SheetPoint {
                    rho: to.norm(),
                    theta: zeta.theta + dtheta,
                };
            }
        }
    }
    Ok((zeta, y))
}

/// Transports (u, u') along `path`. Internally the scaled pair
/// (e^{aζ/2}u, (e^{aζ/2}u)') is integrated so that relative tolerances act
/// on O(1) quantities.
pub fn integrate_path(
    coeffs: &PBDECoefficients,
    start: ODESolutionState,
    path: &[PathSegment],
    cfg: &OdeConfig,
) -> Result<ODESolutionState> {
    let y0 = to_p_vars(coeffs.a, &start);
    let (zeta, y) = transport_p(coeffs, start.zeta, y0, path, cfg)?;
    Ok(from_p_vars(coeffs.a, zeta, y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PbdeConfig {
    /// Seeding point on the positive axis; `None` means 40/a.
    pub zeta0: Option<f64>,
    pub n_init: usize,
    pub seed_tol: f64,
    pub r_min: f64,
    pub ode: OdeConfig,
}

impl Default for PbdeConfig {
    fn default() -> Self {
        Self {
            zeta0: None,
            n_init: 8,
            seed_tol: 1e-10,
            r_min: 1e-2,
            ode: OdeConfig::default(),
        }
    }
}

/// P on |arg ζ| ≤ π, from the recessive solution seeded by its asymptotic
/// series on the positive axis and carried by a radial leg and an arc.
#[derive(Debug, Clone)]
pub struct RecessiveP {
    coeffs: PBDECoefficients,
    series: AsymptoticSeries,
    zeta0: f64,
    n_init: usize,
    r_min: f64,
    ode: OdeConfig,
    seed_error: f64,
    t_hint: C64,
}

impl RecessiveP {
    pub fn coeffs(&self) -> &PBDECoefficients {
        &self.coeffs
    }

    pub fn seed_error(&self) -> f64 {
        self.seed_error
    }

    pub fn zeta0(&self) -> f64 {
        self.zeta0
    }

    /// Attaches a value of T for [`BaseEvaluator::params`]; the evaluator
    /// itself never uses it.
    pub fn with_t(mut self, t: C64) -> Self {
        self.t_hint = t;
        self
    }

    fn seed(&self, s0: f64) -> Result<[C64; 2]> {
        let z = C64::new(s0, 0.0);
        let p = self.series.partial_sum(z, self.n_init + 1)?;
        let dp = self.series.partial_sum_derivative(z, self.n_init + 1)?;
        Ok([p, dp])
    }

    /// (P, P') at ζ.
    pub fn eval_with_derivative(&self, zeta: SheetPoint) -> Result<(C64, C64)> {
        if !zeta.on_fundamental_sheet() {
            return Err(Error::Sector {
                theta: zeta.theta,
                region: "|arg ζ| ≤ π",
            });
        }
        if zeta.rho < self.r_min {
            return Err(Error::Domain {
                func: "recessive_P",
                msg: format!("|ζ| = {} below r_min = {}", zeta.rho, self.r_min),
            });
        }
        let s0 = self.zeta0.max(zeta.rho);
        let y0 = self.seed(s0)?;
        let mut path = Vec::with_capacity(2);
        if zeta.rho != s0 {
            path.push(PathSegment::Radial { to_rho: zeta.rho });
        }
        if zeta.theta != 0.0 {
            path.push(PathSegment::Arc {
                to_theta: zeta.theta,
            });
        }
        let (_, y) = transport_p(&self.coeffs, SheetPoint::real(s0), y0, &path, &self.ode)?;
        Ok((y[0], y[1]))
    }

    pub fn state_at(&self, zeta: SheetPoint) -> Result<ODESolutionState> {
        let (p, dp) = self.eval_with_derivative(zeta)?;
        Ok(from_p_vars(self.coeffs.a, zeta, [p, dp]))
    }
}

pub fn recessive_p_evaluator(coeffs: &PBDECoefficients, cfg: &PbdeConfig) -> Result<RecessiveP> {
    let zeta0 = cfg.zeta0.unwrap_or(40.0 / coeffs.a);
    if !(zeta0 > 0.0) {
        return Err(Error::InvalidParameter(format!("zeta0 must be positive, got {zeta0}")));
    }
    if cfg.n_init == 0 {
        return Err(Error::InvalidParameter("n_init must be at least 1".into()));
    }
    let series = asymptotic_coeffs(coeffs, cfg.n_init + 1);
    let next = series.coeffs[cfg.n_init + 1].norm();
    let seed_error = next * zeta0.powi(-(cfg.n_init as i32 + 1));
    if seed_error > cfg.seed_tol {
        return Err(Error::Seeding {
            estimate: seed_error,
            tolerance: cfg.seed_tol,
        });
    }
    Ok(RecessiveP {
        coeffs: coeffs.clone(),
        series,
        zeta0,
        n_init: cfg.n_init,
        r_min: cfg.r_min,
        ode: cfg.ode,
        seed_error,
        t_hint: C64::new(f64::NAN, f64::NAN),
    })
}

impl BaseEvaluator for RecessiveP {
    fn params(&self) -> MonodromyParams {
        MonodromyParams {
            a: self.coeffs.a,
            t: self.t_hint,
        }
    }
    fn eval(&self, zeta: SheetPoint) -> Result<C64> {
        Ok(self.eval_with_derivative(zeta)?.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TEstimate {
    pub mean: C64,
    /// Largest pairwise distance between the per-sample estimates.
    pub dispersion: f64,
    pub samples: Vec<(f64, C64)>,
}

/// T̂(ζ) = (P(ζe^{iπ}) − P(ζe^{−iπ})) e^{aζ} / P(ζ) at each positive ζ.
pub fn estimate_t_from<E: BaseEvaluator + ?Sized>(
    base: &E,
    a: f64,
    sample_zetas: &[f64],
) -> Result<TEstimate> {
    if sample_zetas.is_empty() {
        return Err(Error::InvalidParameter("no sample points".into()));
    }
    let mut samples = Vec::with_capacity(sample_zetas.len());
    for &x in sample_zetas {
        if !(x > 0.0) || a * x > crate::monodromy::MAX_EXPONENT {
            return Err(Error::InvalidParameter(format!(
                "sample ζ = {x} outside (0, {}]",
                crate::monodromy::MAX_EXPONENT / a
            )));
        }
        let z = SheetPoint::real(x);
        let p = base.eval(z)?;
        if p.norm() < 1e-12 {
            return Err(Error::SmallDenominator(p.norm()));
        }
        let up = base.eval(z.turn(1))?;
        let dn = base.eval(z.turn(-1))?;
        samples.push((x, (up - dn) * (a * x).exp() / p));
    }
    let mean = samples.iter().map(|s| s.1).sum::<C64>() / samples.len() as f64;
    let mut dispersion: f64 = 0.0;
    for (i, si) in samples.iter().enumerate() {
        for sj in &samples[i + 1..] {
            dispersion = dispersion.max((si.1 - sj.1).norm());
        }
    }
    Ok(TEstimate {
        mean,
        dispersion,
        samples,
    })
}

pub fn estimate_t(
    coeffs: &PBDECoefficients,
    sample_zetas: &[f64],
    cfg: &PbdeConfig,
) -> Result<TEstimate> {
    let p = recessive_p_evaluator(coeffs, cfg)?;
    estimate_t_from(&p, coeffs.a, sample_zetas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_p;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn recurrence_first_terms() {
        let co = PBDECoefficients::new(1.7, vec![c(0.3, 0.2), c(-0.5, 0.1)]).unwrap();
        let s = asymptotic_coeffs(&co, 4);
        assert_eq!(s.coeffs[0], c(1.0, 0.0));
        assert!((s.coeffs[1] - co.a_coeffs[0] / co.a).norm() < 1e-15);
    }

    #[test]
    fn recurrence_matches_hankel() {
        let nu = 0.3;
        let s = asymptotic_coeffs(&PBDECoefficients::bessel(nu), 12);
        let h = AsymptoticSeries::bessel(nu, 12);
        assert!((s.coeffs[1].re - (4.0 * nu * nu - 1.0) / 8.0).abs() < 1e-15);
        for k in 0..=12 {
            assert!((s.coeffs[k] - h.coeffs[k]).norm() < 1e-13 * h.coeffs[k].norm().max(1.0));
        }
    }

    #[test]
    fn formal_substitution_residual() {
        // Laurent coefficients in ζ^{−1} of P'' − aP' − A(ζ)ζ^{−2}P, built term
        // by term from the truncated series; orders 1..=n+1 must vanish.
        let co = PBDECoefficients::new(1.3, vec![c(0.4, -0.2), c(0.7, 0.0), c(-0.1, 0.3)]).unwrap();
        let n = 10;
        let p = asymptotic_coeffs(&co, n).coeffs;
        let mut res = vec![c(0.0, 0.0); n + 4];
        for (k, &pk) in p.iter().enumerate() {
            // P'' contributes k(k+1)p_k at order k+2, −aP' contributes a k p_k at k+1
            if k + 2 < res.len() {
                res[k + 2] += pk * (k * (k + 1)) as f64;
            }
            if k + 1 < res.len() {
                res[k + 1] += pk * (co.a * k as f64);
            }
            for (j, &aj) in co.a_coeffs.iter().enumerate() {
                if k + 2 * j + 2 < res.len() {
                    res[k + 2 * j + 2] -= aj * pk;
                }
            }
        }
        for (m, r) in res.iter().enumerate().take(n + 2) {
            assert!(r.norm() < 1e-12 * (1.0 + p[m.min(n)].norm()), "order {m}: {r}");
        }
    }

    #[test]
    fn unperturbed_series_vanishes() {
        let co = PBDECoefficients::new(2.0, vec![]).unwrap();
        let s = asymptotic_coeffs(&co, 6);
        assert!(s.coeffs[1..].iter().all(|&p| p == c(0.0, 0.0)));
        let co = PBDECoefficients::new(2.0, vec![c(0.0, 0.0)]).unwrap();
        assert!(asymptotic_coeffs(&co, 6).terminating);
    }

    #[test]
    fn empty_path_is_identity() {
        let co = PBDECoefficients::bessel(0.3);
        let st = ODESolutionState {
            zeta: SheetPoint::new(2.0, 0.5).unwrap(),
            u: c(0.3, 0.1),
            du: c(-0.2, 0.4),
        };
        let out = integrate_path(&co, st, &[], &OdeConfig::default()).unwrap();
        assert!((out.u - st.u).norm() < 1e-15 && (out.du - st.du).norm() < 1e-15);
    }

    #[test]
    fn exponential_transport() {
        let a = 1.5;
        let co = PBDECoefficients::new(a, vec![]).unwrap();
        let z0 = SheetPoint::real(3.0);
        let e = |z: C64| (-0.5 * a * z).exp();
        let st = ODESolutionState {
            zeta: z0,
            u: e(z0.to_complex()),
            du: -0.5 * a * e(z0.to_complex()),
        };
        let path = [
            PathSegment::Radial { to_rho: 1.0 },
            PathSegment::Arc { to_theta: 2.5 },
            PathSegment::Line { to: c(-2.0, -0.5) },
        ];
        let out = integrate_path(&co, st, &path, &OdeConfig::default()).unwrap();
        let exact = e(out.zeta.to_complex());
        assert!((out.u - exact).norm() < 1e-10 * exact.norm());
        assert!(out.zeta.theta > PI);
    }

    #[test]
    fn origin_is_rejected() {
        let co = PBDECoefficients::bessel(0.3);
        let st = ODESolutionState {
            zeta: SheetPoint::real(1.0),
            u: c(1.0, 0.0),
            du: c(0.0, 0.0),
        };
        let r = integrate_path(&co, st, &[PathSegment::Line { to: c(-1.0, 0.0) }], &OdeConfig::default());
        assert!(matches!(r, Err(Error::PathThroughOrigin)));
    }

    #[test]
    fn bessel_transport_matches_closed_form() {
        let nu = 0.3;
        let co = PBDECoefficients::bessel(nu);
        let p = recessive_p_evaluator(&co, &PbdeConfig::default()).unwrap();
        let start = p.state_at(SheetPoint::real(6.0)).unwrap();
        let end = integrate_path(
            &co,
            start,
            &[
                PathSegment::Radial { to_rho: 2.0 },
                PathSegment::Arc { to_theta: -2.0 },
            ],
            &OdeConfig::default(),
        )
        .unwrap();
        let z = end.zeta;
        let ratio = end.u / (-z.to_complex()).exp();
        let oracle = bessel_p(nu, z).unwrap();
        assert!((ratio - oracle).norm() < 1e-8 * oracle.norm());
    }

    #[test]
    fn evaluator_matches_bessel() {
        let nu = 0.3;
        let p = recessive_p_evaluator(&PBDECoefficients::bessel(nu), &PbdeConfig::default()).unwrap();
        for &r in &[1.0, 2.5, 5.0, 10.0] {
            for &th in &[-PI, -2.0, -0.7, 0.0, 1.1, 2.6, PI] {
                let z = SheetPoint::new(r, th).unwrap();
                let v = p.eval(z).unwrap();
                let o = bessel_p(nu, z).unwrap();
                assert!((v - o).norm() < 1e-8 * o.norm(), "r {r} th {th}: {v} vs {o}");
            }
        }
    }

    #[test]
    fn trivial_potential_gives_one() {
        let co = PBDECoefficients::new(2.0, vec![]).unwrap();
        let p = recessive_p_evaluator(&co, &PbdeConfig::default()).unwrap();
        for &th in &[-PI, 0.0, 1.0, PI] {
            let v = p.eval(SheetPoint::new(3.0, th).unwrap()).unwrap();
            assert!((v - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let co = PBDECoefficients::new(2.0, vec![c(-0.16, 0.0), c(0.1, 0.0)]).unwrap();
        let p = recessive_p_evaluator(&co, &PbdeConfig::default()).unwrap();
        for &th in &[0.4, 1.9, PI] {
            let z = SheetPoint::new(2.0, th).unwrap();
            let zb = SheetPoint::new(2.0, -th).unwrap();
            assert!((p.eval(zb).unwrap() - p.eval(z).unwrap().conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn seeding_tolerance_is_enforced() {
        let cfg = PbdeConfig {
            n_init: 2,
            ..PbdeConfig::default()
        };
        assert!(matches!(
            recessive_p_evaluator(&PBDECoefficients::bessel(0.3), &cfg),
            Err(Error::Seeding { .. })
        ));
    }

    #[test]
    fn wronskian_is_conserved() {
        let co = PBDECoefficients::new(2.0, vec![c(-0.16, 0.0), c(0.1, 0.05)]).unwrap();
        let z0 = SheetPoint::new(1.5, 0.2).unwrap();
        let s1 = ODESolutionState {
            zeta: z0,
            u: c(1.0, 0.0),
            du: c(0.0, 0.0),
        };
        let s2 = ODESolutionState {
            zeta: z0,
            u: c(0.0, 0.0),
            du: c(1.0, 0.0),
        };
        let path = [
            PathSegment::Arc { to_theta: 2.9 },
            PathSegment::Radial { to_rho: 0.8 },
            PathSegment::Arc { to_theta: -1.0 },
        ];
        let cfg = OdeConfig::default();
        let e1 = integrate_path(&co, s1, &path, &cfg).unwrap();
        let e2 = integrate_path(&co, s2, &path, &cfg).unwrap();
        let w = e1.u * e2.du - e2.u * e1.du;
        let scale = (e1.u.norm() + e1.du.norm()) * (e2.u.norm() + e2.du.norm());
        assert!((w - 1.0).norm() < 1e-10 * scale.max(1.0), "W = {w}");
    }

    #[test]
    fn t_for_bessel_third() {
        let est = estimate_t(
            &PBDECoefficients::bessel(1.0 / 3.0),
            &[1.5, 2.0, 3.0, 4.0],
            &PbdeConfig::default(),
        )
        .unwrap();
        assert!((est.mean - c(0.0, 1.0)).norm() < 1e-7, "{:?}", est);
        assert!(est.dispersion < 1e-7, "{:?}", est);
    }

    #[test]
    fn t_for_half_order_vanishes() {
        let est = estimate_t(
            &PBDECoefficients::bessel(0.5),
            &[1.5, 2.0, 3.0],
            &PbdeConfig::default(),
        )
        .unwrap();
        assert!(est.mean.norm() < 1e-8);
    }

    #[test]
    fn t_from_closed_form_evaluator() {
        let nu = 0.2;
        let b = crate::monodromy::BesselP { nu };
        let est = estimate_t_from(&b, 2.0, &[1.0, 2.0, 3.0]).unwrap();
        assert!((est.mean - b.params().t).norm() < 1e-9);
    }
}
