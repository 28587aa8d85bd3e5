//! Modified Bessel functions of non-integer order and the scaled pair
//!
//!   P_ν(ζ) = e^ζ √(2ζ/π) K_ν(ζ),   F_ν(t) = ₂F₁(½−ν, ½+ν; 1; −t/2).
//!
//! `bessel_ik` is the plain ascending series. `bessel_p` uses the series for
//! small |ζ|, Steed's continued fraction (CF2) in |arg ζ| ≤ π/2 and the
//! half-turn connection formula near the negative axis.

use super::gamma::rgamma;
use super::hyp2f1::{hyp2f1_continued, hyp2f1_cut_plane, HypergeometricParams};
use crate::error::{Error, Result};
use crate::sheet::SheetPoint;
use crate::C64;
use std::f64::consts::{FRAC_PI_2, PI};

const EPS: f64 = 1e-16;
const CF_TOL: f64 = 4e-16;
const MAX_ITER: usize = 100_000;
const SERIES_RADIUS: f64 = 2.0;
const CF2_SECTOR: f64 = FRAC_PI_2;
const MAX_SERIES_ABS: f64 = 700.0;

fn check_order(func: &'static str, nu: f64) -> Result<()> {
    if !nu.is_finite() {
        return Err(Error::InvalidParameter(format!("{func}: order {nu}")));
    }
    if (nu - nu.round()).abs() < 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "{func}: integer order {nu} is not supported"
        )));
    }
    Ok(())
}

// I_ν(z) by the ascending series, with (z/2)^ν taken on the sheet of z.
fn i_series(nu: f64, z: SheetPoint) -> Result<C64> {
    if z.rho > MAX_SERIES_ABS {
        return Err(Error::Overflow {
            func: "bessel_IK",
            exponent: z.rho,
        });
    }
    let zc = z.to_complex();
    let q = zc * zc * 0.25;
    let nuc = C64::new(nu, 0.0);
    // term_k = (z²/4)^k / (k! Γ(ν+k+1)), built from 1/Γ(ν+1) upward.
    let mut term = rgamma(nuc + 1.0);
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= q / (k as f64 * (nu + k as f64));
        sum += term;
        if term.norm() <= EPS * sum.norm() && k as f64 > z.rho {
            break;
        }
        if term.norm() == 0.0 && sum.norm() == 0.0 && k > 5 {
            break;
        }
        if k > MAX_ITER {
            return Err(Error::NoConvergence {
                func: "bessel_IK",
                iterations: MAX_ITER,
            });
        }
    }
    Ok(z.scale(0.5).powf(nu) * sum)
}

fn ik_sheet(nu: f64, z: SheetPoint) -> Result<(C64, C64)> {
    let ip = i_series(nu, z)?;
    let im = i_series(-nu, z)?;
    let k = (im - ip) * (FRAC_PI_2 / (nu * PI).sin());
    Ok((ip, k))
}

/// `(I_ν(z), K_ν(z))` from the ascending series, principal branch.
///
/// K is formed as a difference of two I-series and loses about
/// `2 Re z / ln 10` digits for large `Re z`.
pub fn bessel_ik(nu: f64, z: C64) -> Result<(C64, C64)> {
    check_order("bessel_IK", nu)?;
    if z.norm() == 0.0 {
        return Err(Error::ZeroArgument { func: "bessel_IK" });
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut { func: "bessel_IK" });
    }
    ik_sheet(nu, SheetPoint::from_complex(z)?)
}

/// `(P_μ(z), P_{μ+1}(z))` for |μ| ≤ ½ by Steed's CF2.
fn cf2_pair(mu: f64, z: C64) -> Result<(C64, C64)> {
    let a1 = 0.25 - mu * mu;
    let mut b = (z + 1.0) * 2.0;
    let mut d = b.inv();
    let mut delh = d;
    let mut h = d;
    let mut q1 = C64::new(0.0, 0.0);
    let mut q2 = C64::new(1.0, 0.0);
    let mut q = C64::new(a1, 0.0);
    let mut c = C64::new(a1, 0.0);
    let mut a = -a1;
    let mut s = q * delh + 1.0;
    let mut converged = a1 == 0.0;
    for i in 1..MAX_ITER {
        if converged {
            break;
        }
        let fi = i as f64;
        a -= 2.0 * fi;
        c = c * (-a / (fi + 1.0));
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = (b + a * d).inv();
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < CF_TOL * s.norm() {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            func: "bessel_P",
            iterations: MAX_ITER,
        });
    }
    let h = h * a1;
    let p_mu = s.inv();
    let p_mu1 = p_mu * (z + mu + 0.5 - h) / z;
    Ok((p_mu, p_mu1))
}

/// `(P_ν(z), P_{ν+1}(z))` for |ν| ≥ 0 via CF2 at the reduced order and
/// upward recurrence, principal branch, Re z ≥ 0.
fn p_pair(nu: f64, z: C64) -> Result<(C64, C64)> {
    let nu = nu.abs();
    let n = (nu + 0.5).floor();
    let mu = nu - n;
    let (mut p0, mut p1) = cf2_pair(mu, z)?;
    // K_{m+1} = K_{m−1} + (2m/z) K_m, same scaling for every order.
    for j in 1..=(n as usize) {
        let m = mu + j as f64;
        let p2 = p0 + p1 * (2.0 * m) / z;
        p0 = p1;
        p1 = p2;
    }
    Ok((p0, p1))
}

// I_{ν+1}/I_ν by the continued fraction 1/(2(ν+1)/z + 1/(2(ν+2)/z + …)).
fn cf1_ratio(nu: f64, z: C64) -> Result<C64> {
    // Small enough to act as zero, large enough that 1/tiny² is finite.
    let tiny = 1e-150;
    let zi = z.inv();
    let mut f = C64::new(tiny, 0.0);
    let mut c = f;
    let mut d = C64::new(0.0, 0.0);
    for k in 1..MAX_ITER {
        let b = zi * (2.0 * (nu + k as f64));
        d = b + d;
        if d.norm() < tiny {
            d = C64::new(tiny, 0.0);
        }
        c = b + c.inv();
        if c.norm() < tiny {
            c = C64::new(tiny, 0.0);
        }
        d = d.inv();
        let del = c * d;
        f *= del;
        if (del - 1.0).norm() < CF_TOL {
            return Ok(f);
        }
    }
    Err(Error::NoConvergence {
        func: "bessel_I",
        iterations: MAX_ITER,
    })
}

/// Ĩ_ν(z) = √(2πz) e^{−z} I_ν(z) for |arg z| ≤ π/2 (principal branch).
pub fn scaled_i(nu: f64, z: C64) -> Result<C64> {
    check_order("bessel_I", nu)?;
    if z.norm() < SERIES_RADIUS {
        let ip = i_series(nu, SheetPoint::from_complex(z)?)?;
        return Ok((z * 2.0 * PI).sqrt() * (-z).exp() * ip);
    }
    // Wronskian I K' − I' K = −1/z with CF1 for I'/I and CF2 for K.
    let g = cf1_ratio(nu, z)?;
    let (p, p1) = if nu >= 0.0 {
        p_pair(nu, z)?
    } else {
        // K_{ν+1} for negative ν from K_{−ν−1} = K_{ν+1}.
        let (pm, _) = p_pair(-nu, z)?;
        let (pm1, _) = p_pair(-nu - 1.0, z)?;
        (pm, pm1)
    };
    Ok(C64::new(2.0, 0.0) / (g * p + p1))
}

fn p_principal(nu: f64, zeta: SheetPoint) -> Result<C64> {
    if zeta.rho < SERIES_RADIUS {
        let (_, k) = ik_sheet(nu, zeta)?;
        let zc = zeta.to_complex();
        return Ok(zc.exp() * zeta.scale(2.0 / PI).powf(0.5) * k);
    }
    if zeta.theta.abs() <= CF2_SECTOR {
        return Ok(p_pair(nu, zeta.to_complex())?.0);
    }
    // ζ = z e^{±iπ}:  P(ζ) = ±i e^{∓iνπ} e^{−2z} P(z) + Ĩ(z).
    let sgn = zeta.theta.signum();
    let z = zeta.rotate(-sgn * PI).to_complex();
    let pz = p_pair(nu, z)?.0;
    let phase = C64::new(0.0, sgn) * C64::from_polar(1.0, -sgn * nu * PI);
    Ok(phase * (-2.0 * z).exp() * pz + scaled_i(nu, z)?)
}

/// P_ν(ζ) on the fundamental sheet |arg ζ| ≤ π, normalized so P → 1.
pub fn bessel_p(nu: f64, zeta: SheetPoint) -> Result<C64> {
    check_order("bessel_P", nu)?;
    if !zeta.on_fundamental_sheet() {
        return Err(Error::Sector {
            theta: zeta.theta,
            region: "|arg ζ| ≤ π",
        });
    }
    p_principal(nu, zeta)
}

/// P_ν on any sheet from the classical continuation
/// K_ν(z e^{mπi}) = e^{−mνπi} K_ν(z) − iπ sin(mνπ) csc(νπ) I_ν(z).
pub fn bessel_p_any_sheet(nu: f64, zeta: SheetPoint) -> Result<C64> {
    check_order("bessel_P", nu)?;
    let m = (zeta.theta / PI).round();
    if m == 0.0 {
        return p_principal(nu, zeta);
    }
    let z_pt = zeta.rotate(-m * PI);
    let z = z_pt.to_complex();
    let mi = m as i64;
    let pz = p_principal(nu, z_pt)?;
    let iz = scaled_i(nu, z)?;
    let sm = (m * nu * PI).sin() / (nu * PI).sin();
    let i_pow = C64::new(0.0, 1.0).powi(mi.rem_euclid(4) as i32);
    let rot = C64::from_polar(1.0, -m * nu * PI);
    let i = C64::new(0.0, 1.0);
    let inner = if mi % 2 == 0 {
        let e = 2.0 * z.re;
        if e > 700.0 {
            return Err(Error::Overflow {
                func: "bessel_P",
                exponent: e,
            });
        }
        rot * pz - i * sm * (2.0 * z).exp() * iz
    } else {
        rot * (-2.0 * z).exp() * pz - i * sm * iz
    };
    Ok(i_pow * inner)
}

/// Hankel coefficients p_k = (½−ν)_k (½+ν)_k (−½)^k / k! of P_ν ~ Σ p_k ζ^{−k}.
pub fn hankel_coeffs(nu: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut p = 1.0;
    out.push(p);
    for k in 0..n {
        let kf = k as f64;
        p *= (0.5 - nu + kf) * (0.5 + nu + kf) * (-0.5) / (kf + 1.0);
        out.push(p);
    }
    out
}

pub fn bessel_f_params(nu: f64) -> HypergeometricParams {
    HypergeometricParams::real(0.5 - nu, 0.5 + nu, 1.0).expect("c = 1 is admissible")
}

/// F_ν(t) on the plane cut along (−∞, −2].
pub fn bessel_f(nu: f64, t: C64) -> Result<C64> {
    if t.im == 0.0 && t.re <= -2.0 {
        return Err(Error::Domain {
            func: "bessel_F",
            msg: format!("t = {} lies on the cut (−∞, −2]", t.re),
        });
    }
    hyp2f1_cut_plane(&bessel_f_params(nu), -t * 0.5)
}

/// F_ν at t = w − 2 with w on the fundamental sheet around t = −2;
/// `arg w = ±π` are the two banks of the cut.
pub fn bessel_f_shifted(nu: f64, w: SheetPoint) -> Result<C64> {
    hyp2f1_continued(&bessel_f_params(nu), w.scale(0.5))
}
