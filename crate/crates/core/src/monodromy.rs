//! Continuation of solutions of the Stokes relation
//!
//!   P(ζe^{iπ}) = P(ζe^{−iπ}) + T e^{−aζ} P(ζ)
//!
//! to arbitrary sheets, the exponentially small Stokes terms, and the
//! two-function continuation engine for the intertwined (Whittaker-type)
//! system.

use crate::error::{Error, Result};
use crate::sheet::SheetPoint;
use crate::specfun::{bessel_p, bessel_p_any_sheet};
use crate::C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Largest exponent accepted before a plain operation reports overflow.
pub const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonodromyParams {
    pub a: f64,
    #[serde(rename = "T")]
    pub t: C64,
}

impl MonodromyParams {
    pub fn new(a: f64, t: C64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
        }
        if !t.re.is_finite() || !t.im.is_finite() {
            return Err(Error::InvalidParameter(format!("T must be finite, got {t}")));
        }
        Ok(Self { a, t })
    }

    /// a = 2, T = 2i cos νπ.
    pub fn bessel(nu: f64) -> Self {
        Self {
            a: 2.0,
            t: C64::new(0.0, 2.0 * (nu * PI).cos()),
        }
    }
}

/// Values of P on the fundamental sheet |arg ζ| ≤ π.
pub trait BaseEvaluator: Send + Sync {
    fn params(&self) -> MonodromyParams;

    fn eval(&self, zeta: SheetPoint) -> Result<C64>;

    /// Independent evaluation off the fundamental sheet, if the evaluator
    /// knows one (closed forms); `None` otherwise.
    fn eval_extended(&self, _zeta: SheetPoint) -> Option<Result<C64>> {
        None
    }
}

impl<E: BaseEvaluator + ?Sized> BaseEvaluator for &E {
    fn params(&self) -> MonodromyParams {
        (**self).params()
    }
    fn eval(&self, zeta: SheetPoint) -> Result<C64> {
        (**self).eval(zeta)
    }
    fn eval_extended(&self, zeta: SheetPoint) -> Option<Result<C64>> {
        (**self).eval_extended(zeta)
    }
}

/// P ≡ c with T = 0.
#[derive(Debug, Clone, Copy)]
pub struct ConstantP {
    pub a: f64,
    pub value: C64,
}

impl BaseEvaluator for ConstantP {
    fn params(&self) -> MonodromyParams {
        MonodromyParams {
            a: self.a,
            t: C64::new(0.0, 0.0),
        }
    }
    fn eval(&self, _zeta: SheetPoint) -> Result<C64> {
        Ok(self.value)
    }
    fn eval_extended(&self, _zeta: SheetPoint) -> Option<Result<C64>> {
        Some(Ok(self.value))
    }
}

/// The Bessel member P_ν(ζ) = e^ζ √(2ζ/π) K_ν(ζ).
#[derive(Debug, Clone, Copy)]
pub struct BesselP {
    pub nu: f64,
}

impl BaseEvaluator for BesselP {
    fn params(&self) -> MonodromyParams {
        MonodromyParams::bessel(self.nu)
    }
    fn eval(&self, zeta: SheetPoint) -> Result<C64> {
        bessel_p(self.nu, zeta)
    }
    fn eval_extended(&self, zeta: SheetPoint) -> Option<Result<C64>> {
        Some(bessel_p_any_sheet(self.nu, zeta))
    }
}

/// Coefficients (S_k, T_k) for k = −K..K.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct STSequence {
    pub k_max: i64,
    pub s: Vec<C64>,
    pub t: Vec<C64>,
}

impl STSequence {
    pub fn get(&self, k: i64) -> Option<(C64, C64)> {
        if k.abs() > self.k_max {
            return None;
        }
        let i = (k + self.k_max) as usize;
        Some((self.s[i], self.t[i]))
    }
}

/// (S_k, T_k) for |k| ≤ 2·k_max. Positive k from the forward recurrences,
/// negative k by inverting the same one-step relations.
pub fn st_sequence(params: &MonodromyParams, k_max: usize) -> Result<STSequence> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let kk = 2 * k_max as i64;
    let len = (2 * kk + 1) as usize;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let tt = params.t;
    let mut s = vec![zero; len];
    let mut t = vec![zero; len];
    let idx = |k: i64| (k + kk) as usize;
    s[idx(0)] = one;
    s[idx(-1)] = one;
    for k in 1..=kk {
        let (sp, tp) = (s[idx(k - 1)], t[idx(k - 1)]);
        if k % 2 == 1 {
            // S_{2m+1} = S_{2m}, T_{2m+1} = T_{2m} + S_{2m} T
            s[idx(k)] = sp;
            t[idx(k)] = tp + sp * tt;
        } else {
            // S_{2m+2} = S_{2m+1} + T_{2m+1} T, T_{2m+2} = T_{2m+1}
            s[idx(k)] = sp + tp * tt;
            t[idx(k)] = tp;
        }
    }
    for k in (-kk..=-2).rev() {
        let (sn, tn) = (s[idx(k + 1)], t[idx(k + 1)]);
        if (k + 1).rem_euclid(2) == 1 {
            // k+1 odd: S_{k+1} = S_k, T_{k+1} = T_k + S_k T
            s[idx(k)] = sn;
            t[idx(k)] = tn - sn * tt;
        } else {
            // k+1 even: S_{k+1} = S_k + T_k T, T_{k+1} = T_k
            t[idx(k)] = tn;
            s[idx(k)] = sn - tn * tt;
        }
    }
    Ok(STSequence { k_max: kk, s, t })
}

/// A value `mantissa · e^{log_scale}` for results beyond f64 range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    pub mantissa: C64,
    pub log_scale: f64,
}

impl ScaledValue {
    pub fn to_complex(self) -> Result<C64> {
        let v = self.mantissa * self.log_scale.exp();
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Overflow {
                func: "ScaledValue",
                exponent: self.log_scale,
            })
        }
    }
}

/// Writes θ = φ + kπ with φ ∈ [0, π).
fn split_sheet(zeta: SheetPoint) -> (SheetPoint, i64) {
    let k = (zeta.theta / PI).floor();
    let mut phi = zeta.theta - k * PI;
    let mut k = k as i64;
    if phi >= PI {
        phi -= PI;
        k += 1;
    }
    if phi < 0.0 {
        phi = 0.0;
    }
    (
        SheetPoint {
            rho: zeta.rho,
            theta: phi,
        },
        k,
    )
}

struct SheetTerms {
    s: C64,
    t: C64,
    x: C64,
    y: C64,
    exponent: C64,
    odd: bool,
}

fn sheet_terms<E: BaseEvaluator + ?Sized>(base: &E, zeta: SheetPoint) -> Result<SheetTerms> {
    let params = base.params();
    let (z0, k) = split_sheet(zeta);
    let seq = st_sequence(&params, (k.unsigned_abs() as usize).div_ceil(2).max(1))?;
    let (s, t) = seq.get(k).expect("sequence covers k");
    let x = base.eval(z0.turn(-1))?;
    let y = base.eval(z0)?;
    let odd = k.rem_euclid(2) == 1;
    // Odd k: S X + T e^{−aζ₀} Y.  Even k: S Y + T e^{aζ₀} X.
    let az = z0.to_complex() * params.a;
    Ok(SheetTerms {
        s,
        t,
        x,
        y,
        exponent: if odd { -az } else { az },
        odd,
    })
}

/// P at any sheet point, assembled from two fundamental-sheet values.
pub fn continue_to_sheet<E: BaseEvaluator + ?Sized>(base: &E, zeta: SheetPoint) -> Result<C64> {
    if zeta.on_fundamental_sheet() {
        return base.eval(zeta);
    }
    let st = sheet_terms(base, zeta)?;
    if st.exponent.re.abs() > MAX_EXPONENT && st.t.norm() > 0.0 {
        return Err(Error::Overflow {
            func: "continue_to_sheet",
            exponent: st.exponent.re,
        });
    }
    let e = st.exponent.exp();
    Ok(if st.odd {
        st.s * st.x + st.t * e * st.y
    } else {
        st.s * st.y + st.t * e * st.x
    })
}

/// Like [`continue_to_sheet`] but never overflows: the exponential factor is
/// carried in log form.
pub fn continue_to_sheet_scaled<E: BaseEvaluator + ?Sized>(
    base: &E,
    zeta: SheetPoint,
) -> Result<ScaledValue> {
    if zeta.on_fundamental_sheet() {
        return Ok(ScaledValue {
            mantissa: base.eval(zeta)?,
            log_scale: 0.0,
        });
    }
    let st = sheet_terms(base, zeta)?;
    let (plain, carried) = if st.odd {
        (st.s * st.x, st.t * st.y)
    } else {
        (st.s * st.y, st.t * st.x)
    };
    let l = st.exponent.re.max(0.0);
    let phase = C64::from_polar(1.0, st.exponent.im);
    let mantissa = plain * (-l).exp() + carried * phase * (st.exponent.re - l).exp();
    Ok(ScaledValue {
        mantissa,
        log_scale: l,
    })
}

/// |P(ζe^{iπ}) − P(ζe^{−iπ}) − T e^{−aζ} P(ζ)|, with the rotated values taken
/// from the evaluator's own continuation when they leave the fundamental
/// sheet.
pub fn monodromy_residual<E: BaseEvaluator + ?Sized>(base: &E, zeta: SheetPoint) -> Result<f64> {
    let params = base.params();
    let eval = |p: SheetPoint| -> Result<C64> {
        if p.on_fundamental_sheet() {
            base.eval(p)
        } else {
            base.eval_extended(p).unwrap_or(Err(Error::Sector {
                theta: p.theta,
                region: "fundamental sheet (evaluator has no extension)",
            }))
        }
    };
    let up = eval(zeta.turn(1))?;
    let dn = eval(zeta.turn(-1))?;
    let p = eval(zeta)?;
    let e = (-params.a * zeta.to_complex()).exp();
    Ok((up - dn - params.t * e * p).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StokesSide {
    Plus,
    Minus,
}

/// E⁺(ζ) = T e^{aζ} P(ζe^{−πi}) for π ≤ arg ζ < 3π/2, and
/// E⁻(ζ) = −T e^{aζ} P(ζe^{πi}) for −3π/2 < arg ζ ≤ −π.
pub fn exp_small_term<E: BaseEvaluator + ?Sized>(
    side: StokesSide,
    base: &E,
    zeta: SheetPoint,
) -> Result<C64> {
    let params = base.params();
    let th = zeta.theta;
    let (inside, shifted, sign, region) = match side {
        StokesSide::Plus => (
            (PI..1.5 * PI).contains(&th),
            zeta.turn(-1),
            1.0,
            "[π, 3π/2)",
        ),
        StokesSide::Minus => (
            th > -1.5 * PI && th <= -PI,
            zeta.turn(1),
            -1.0,
            "(−3π/2, −π]",
        ),
    };
    if !inside {
        return Err(Error::Sector { theta: th, region });
    }
    if params.t.norm() == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let az = params.a * zeta.to_complex();
    if az.re > MAX_EXPONENT {
        return Err(Error::Overflow {
            func: "exp_small_term",
            exponent: az.re,
        });
    }
    Ok(params.t * sign * az.exp() * base.eval(shifted)?)
}

/// (A, C) = (e^{−2πi b/a}, e^{2πi b/a}).
pub fn whittaker_connection_constants(b: C64, a: f64) -> Result<(C64, C64)> {
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
    }
    let phase = C64::new(0.0, 2.0 * PI) * b / a;
    let c = phase.exp();
    Ok((c.inv(), c))
}

/// Parameters of the intertwined pair
///   P₁(ζe^{2πi}) = P₁(ζ) + T₁ e^{aζ} ζ^β P₂(ζe^{2πi}),
///   P₂(ζe^{2πi}) = P₂(ζ) + T₂ e^{−aζ} ζ^{−β} P₁(ζ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WhittakerSystem {
    pub a: f64,
    pub t1: C64,
    pub t2: C64,
    pub beta: C64,
}

/// Moves the value pair (P₁, P₂) at ζ to ζe^{2mπi}. ζ^β is anchored at the
/// argument of `zeta` and picks up e^{±2πiβ} per turn.
pub fn whittaker_transport(
    sys: &WhittakerSystem,
    values: (C64, C64),
    zeta: SheetPoint,
    m: i64,
) -> Result<(C64, C64)> {
    let az = sys.a * zeta.to_complex();
    let zb = zeta.powc(sys.beta);
    let lead = (az + sys.beta * zeta.ln()).re.abs();
    if lead > MAX_EXPONENT {
        return Err(Error::Overflow {
            func: "whittaker_continue",
            exponent: lead,
        });
    }
    let e_plus = az.exp();
    let e_minus = (-az).exp();
    let turn = (C64::new(0.0, 2.0 * PI) * sys.beta).exp();
    let (mut p1, mut p2) = values;
    if m >= 0 {
        let mut zbj = zb; // ζ_j^β on sheet j
        for _ in 0..m {
            p2 += sys.t2 * e_minus * zbj.inv() * p1;
            p1 += sys.t1 * e_plus * zbj * p2;
            zbj *= turn;
        }
    } else {
        let mut zbj = zb;
        for _ in 0..(-m) {
            zbj /= turn; // now ζ_j^β with j one turn below
            p1 -= sys.t1 * e_plus * zbj * p2;
            p2 -= sys.t2 * e_minus * zbj.inv() * p1;
        }
    }
    Ok((p1, p2))
}

/// Values of (P₁, P₂) at ζe^{2mπi}; ζ must lie in both base sectors,
/// arg ζ ∈ (−π/2, 3π/2).
pub fn whittaker_continue<E1, E2>(
    p1: &E1,
    p2: &E2,
    sys: &WhittakerSystem,
    m: i64,
    zeta: SheetPoint,
) -> Result<(C64, C64)>
where
    E1: BaseEvaluator + ?Sized,
    E2: BaseEvaluator + ?Sized,
{
    if !(zeta.theta > -0.5 * PI && zeta.theta < 1.5 * PI) {
        return Err(Error::Sector {
            theta: zeta.theta,
            region: "(−π/2, 3π/2)",
        });
    }
    let values = (p1.eval(zeta)?, p2.eval(zeta)?);
    if m == 0 {
        return Ok(values);
    }
    whittaker_transport(sys, values, zeta, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Powers of the one-step matrix [[0, 1], [1, T]] acting on
    /// (w_{k−1}, w_k) with the exponential factors set to one.
    fn matrix_power(t: C64, k: i64) -> [[C64; 2]; 2] {
        let one = c(1.0, 0.0);
        let zero = c(0.0, 0.0);
        let step = if k >= 0 {
            [[zero, one], [one, t]]
        } else {
            [[-t, one], [one, zero]]
        };
        let mut m = [[one, zero], [zero, one]];
        for _ in 0..k.abs() {
            let mut n = [[zero; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    n[i][j] = step[i][0] * m[0][j] + step[i][1] * m[1][j];
                }
            }
            m = n;
        }
        m
    }

    #[test]
    fn first_coefficients() {
        let t = c(0.3, -0.7);
        let seq = st_sequence(&MonodromyParams::new(2.0, t).unwrap(), 2).unwrap();
        assert_eq!(seq.get(0).unwrap(), (c(1.0, 0.0), c(0.0, 0.0)));
        assert_eq!(seq.get(-1).unwrap(), (c(1.0, 0.0), c(0.0, 0.0)));
        assert_eq!(seq.get(1).unwrap(), (c(1.0, 0.0), t));
        assert_eq!(seq.get(2).unwrap(), (t * t + 1.0, t));
        let (s3, t3) = seq.get(3).unwrap();
        assert!((s3 - (t * t + 1.0)).norm() < 1e-15);
        assert!((t3 - t * (t * t + 2.0)).norm() < 1e-15);
        assert_eq!(seq.get(-2).unwrap(), (c(1.0, 0.0), -t));
        assert_eq!(seq.get(-3).unwrap(), (t * t + 1.0, -t));
    }

    #[test]
    fn matches_matrix_composition() {
        for t in [c(0.0, 1.0), c(1.2, -0.5), c(-2.0, 0.0), c(0.0, 2.0)] {
            let seq = st_sequence(&MonodromyParams::new(1.0, t).unwrap(), 20).unwrap();
            for k in -40..=40i64 {
                let m = matrix_power(t, k);
                // Row 1 holds w_k in terms of (w_{−1}, w_0) = (X, Y).
                let (x_coeff, y_coeff) = (m[1][0], m[1][1]);
                let (s, tk) = seq.get(k).unwrap();
                let (es, et) = if k.rem_euclid(2) == 1 {
                    (x_coeff, y_coeff)
                } else {
                    (y_coeff, x_coeff)
                };
                let scale = 1.0 + es.norm().max(et.norm());
                assert!((s - es).norm() <= 1e-12 * scale, "k {k} T {t}");
                assert!((tk - et).norm() <= 1e-12 * scale, "k {k} T {t}");
            }
        }
    }

    #[test]
    fn bessel_closed_form() {
        // With T = 2i cos νπ the eigenvalues of the step matrix are
        // i e^{∓iνπ}, so T_{2m+1} = −i^{2m+3} sin((2m+2)νπ)/sin νπ.
        let nu = 0.3;
        let p = MonodromyParams::bessel(nu);
        let seq = st_sequence(&p, 10).unwrap();
        let i = c(0.0, 1.0);
        for m in 0..10 {
            let k = 2 * m + 2;
            let expected = -i.powi(k + 1) * ((k as f64) * nu * PI).sin() / (nu * PI).sin();
            let (_, t_odd) = seq.get(2 * m as i64 + 1).unwrap();
            assert!((t_odd - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn fundamental_sheet_is_identity() {
        let b = BesselP { nu: 0.3 };
        for th in [-PI, -1.0, 0.0, 2.0, PI] {
            let z = SheetPoint::new(2.5, th).unwrap();
            assert_eq!(continue_to_sheet(&b, z).unwrap(), b.eval(z).unwrap());
        }
    }

    #[test]
    fn second_sheet_formula() {
        let b = BesselP { nu: 0.3 };
        let p = b.params();
        let z = SheetPoint::new(2.0, 0.4).unwrap();
        let direct = continue_to_sheet(&b, z.rotate(2.0 * PI)).unwrap();
        let formula = (p.t * p.t + 1.0) * b.eval(z).unwrap()
            + p.t * (p.a * z.to_complex()).exp() * b.eval(z.turn(-1)).unwrap();
        assert!((direct - formula).norm() < 1e-13 * formula.norm());
    }

    #[test]
    fn agrees_with_classical_continuation() {
        let b = BesselP { nu: 0.3 };
        for th in [-7.0, -4.0, 3.5, 5.0, 6.5, 9.0] {
            for r in [1.5, 3.0] {
                let z = SheetPoint::new(r, th).unwrap();
                let v = continue_to_sheet(&b, z).unwrap();
                let o = bessel_p_any_sheet(0.3, z).unwrap();
                assert!((v - o).norm() < 1e-9 * o.norm().max(1.0), "th {th} r {r}");
            }
        }
    }

    #[test]
    fn zero_multiplier_is_periodic() {
        let b = BesselP { nu: 0.5 };
        let z = SheetPoint::new(3.0, PI);
        let v1 = continue_to_sheet(&b, z.unwrap()).unwrap();
        let v5 = continue_to_sheet(&b, SheetPoint::new(3.0, 5.0 * PI).unwrap()).unwrap();
        assert!((v1 - v5).norm() < 1e-14);
    }

    #[test]
    fn scaled_variant_matches_and_survives_overflow() {
        let b = BesselP { nu: 0.3 };
        let z = SheetPoint::new(4.0, 2.0 * PI + 0.3).unwrap();
        let plain = continue_to_sheet(&b, z).unwrap();
        let scaled = continue_to_sheet_scaled(&b, z).unwrap().to_complex().unwrap();
        assert!((plain - scaled).norm() < 1e-13 * plain.norm());
        let far = SheetPoint::new(400.0, 2.0 * PI + 0.1).unwrap();
        assert!(matches!(
            continue_to_sheet(&b, far),
            Err(Error::Overflow { .. })
        ));
        let s = continue_to_sheet_scaled(&b, far).unwrap();
        assert!(s.log_scale > MAX_EXPONENT && s.mantissa.norm().is_finite());
    }

    #[test]
    fn residual_bessel_third() {
        let b = BesselP { nu: 1.0 / 3.0 };
        assert!((b.params().t - c(0.0, 1.0)).norm() < 1e-15);
        assert!(monodromy_residual(&b, SheetPoint::real(2.0)).unwrap() < 1e-8);
        let b = BesselP { nu: 0.25 };
        let z = SheetPoint::new(3.0, PI / 6.0).unwrap();
        assert!(monodromy_residual(&b, z).unwrap() < 1e-8);
    }

    #[test]
    fn residual_constant_is_zero() {
        let p = ConstantP {
            a: 1.0,
            value: c(1.0, 0.0),
        };
        assert_eq!(monodromy_residual(&p, SheetPoint::real(2.0)).unwrap(), 0.0);
    }

    #[test]
    fn small_terms() {
        let p = ConstantP {
            a: 2.0,
            value: c(1.0, 0.0),
        };
        let z = SheetPoint::new(4.0, 1.2 * PI).unwrap();
        assert_eq!(exp_small_term(StokesSide::Plus, &p, z).unwrap(), c(0.0, 0.0));
        let b = BesselP { nu: 0.3 };
        let mags: Vec<f64> = [3.0, 5.0, 8.0]
            .iter()
            .map(|&r| {
                exp_small_term(StokesSide::Plus, &b, SheetPoint::new(r, 1.2 * PI).unwrap())
                    .unwrap()
                    .norm()
            })
            .collect();
        assert!(mags[0] > mags[1] && mags[1] > mags[2]);
        assert!(matches!(
            exp_small_term(StokesSide::Plus, &b, SheetPoint::new(3.0, 0.5).unwrap()),
            Err(Error::Sector { .. })
        ));
        let zm = SheetPoint::new(4.0, -1.2 * PI).unwrap();
        let em = exp_small_term(StokesSide::Minus, &b, zm).unwrap();
        let ep = exp_small_term(StokesSide::Plus, &b, SheetPoint::new(4.0, 1.2 * PI).unwrap())
            .unwrap();
        assert!((em - ep.conj()).norm() < 1e-14);
    }

    #[test]
    fn stokes_identity_on_remainders() {
        // P(ζ) − E⁺(ζ) = P(ζe^{−2πi}) for π ≤ arg ζ < 3π/2.
        let b = BesselP { nu: 0.3 };
        let z = SheetPoint::new(5.0, 1.2 * PI).unwrap();
        let lhs = continue_to_sheet(&b, z).unwrap() - exp_small_term(StokesSide::Plus, &b, z).unwrap();
        let rhs = b.eval(z.rotate(-2.0 * PI)).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn connection_constants() {
        let a = 2.0;
        let (x, y) = whittaker_connection_constants(c(0.0, 0.0), a).unwrap();
        assert_eq!((x, y), (c(1.0, 0.0), c(1.0, 0.0)));
        let (x, y) = whittaker_connection_constants(c(a / 2.0, 0.0), a).unwrap();
        assert!((x + 1.0).norm() < 1e-15 && (y + 1.0).norm() < 1e-15);
        let (x, y) = whittaker_connection_constants(c(a / 4.0, 0.0), a).unwrap();
        assert!((x - c(0.0, -1.0)).norm() < 1e-15 && (y - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn whittaker_degenerate_cases() {
        let sys = WhittakerSystem {
            a: 1.0,
            t1: c(0.0, 0.0),
            t2: c(0.0, 0.0),
            beta: c(0.3, 0.1),
        };
        let z = SheetPoint::new(2.0, 0.7).unwrap();
        let v = (c(1.1, 0.2), c(-0.4, 0.9));
        for m in -3..=3 {
            assert_eq!(whittaker_transport(&sys, v, z, m).unwrap(), v);
        }
        let p1 = BesselP { nu: 0.3 };
        let p2 = BesselP { nu: 0.2 };
        let sys = WhittakerSystem {
            t1: c(0.5, 0.0),
            ..sys
        };
        assert_eq!(
            whittaker_continue(&p1, &p2, &sys, 0, z).unwrap(),
            (p1.eval(z).unwrap(), p2.eval(z).unwrap())
        );
    }

    struct Partner {
        nu: f64,
    }

    impl BaseEvaluator for Partner {
        fn params(&self) -> MonodromyParams {
            MonodromyParams::bessel(self.nu)
        }
        // e^{2aζ} P(ζe^{iπ}), so that T e^{−aζ} times it is T e^{aζ} P(ζe^{iπ}).
        fn eval(&self, zeta: SheetPoint) -> Result<C64> {
            let a = self.params().a;
            let v = continue_to_sheet(&BesselP { nu: self.nu }, zeta.turn(1))?;
            Ok((2.0 * a * zeta.to_complex()).exp() * v)
        }
    }

    #[test]
    fn whittaker_reduces_to_single_function() {
        let nu = 0.3;
        let b = BesselP { nu };
        let p = b.params();
        let sys = WhittakerSystem {
            a: p.a,
            t1: c(0.0, 0.0),
            t2: p.t,
            beta: c(0.0, 0.0),
        };
        for (r, th) in [(2.0, 0.3), (3.5, -0.2), (1.5, 1.0)] {
            let z = SheetPoint::new(r, th).unwrap();
            let (_, p2) = whittaker_continue(&Partner { nu }, &b, &sys, 1, z).unwrap();
            let seq = st_sequence(&p, 1).unwrap();
            let (s2, t2) = seq.get(2).unwrap();
            let even = s2 * b.eval(z).unwrap()
                + t2 * (p.a * z.to_complex()).exp() * continue_to_sheet(&b, z.turn(-1)).unwrap();
            assert!((p2 - even).norm() < 1e-12 * even.norm(), "r {r} th {th}");
        }
    }

    proptest! {
        #[test]
        fn connection_product(br in -3.0f64..3.0, bi in -0.5f64..0.5, a in 0.2f64..5.0) {
            let (x, y) = whittaker_connection_constants(c(br, bi), a).unwrap();
            prop_assert!((x * y - 1.0).norm() <= 8.0 * f64::EPSILON * (1.0 + x.norm() * y.norm()));
        }

        #[test]
        fn whittaker_round_trip(
            t1r in -2.0f64..2.0, t1i in -2.0f64..2.0,
            t2r in -2.0f64..2.0, t2i in -2.0f64..2.0,
            br in -1.0f64..1.0, bi in -0.3f64..0.3,
            r in 0.5f64..5.0, th in -1.4f64..4.6, m in 1i64..4,
        ) {
            let sys = WhittakerSystem { a: 1.3, t1: c(t1r, t1i), t2: c(t2r, t2i), beta: c(br, bi) };
            let z = SheetPoint::new(r, th).unwrap();
            let v = (c(0.8, -0.1), c(1.2, 0.4));
            let fwd = whittaker_transport(&sys, v, z, m).unwrap();
            let back = whittaker_transport(&sys, fwd, z.rotate(2.0 * PI * m as f64), -m).unwrap();
            let scale = 1.0 + fwd.0.norm() + fwd.1.norm();
            prop_assert!((back.0 - v.0).norm() < 1e-10 * scale);
            prop_assert!((back.1 - v.1).norm() < 1e-10 * scale);
        }

        #[test]
        fn path_independence(r in 1.0f64..8.0, th in -3.0f64..3.0, nu in 0.1f64..0.45) {
            // +2π then −2π through the continuation formulas.
            let b = BesselP { nu };
            let z = SheetPoint::new(r, th).unwrap();
            let up = z.rotate(2.0 * PI);
            let v_up = continue_to_sheet(&b, up).unwrap();
            let o_up = bessel_p_any_sheet(nu, up).unwrap();
            prop_assert!((v_up - o_up).norm() < 1e-9 * o_up.norm().max(1.0));
            let back = continue_to_sheet(&b, up.rotate(-2.0 * PI)).unwrap();
            prop_assert!((back - b.eval(z).unwrap()).norm() < 1e-10);
        }
    }
}
