//! Exponential integrals E_n(z), n >= 1.

use super::gamma::digamma;
use super::EULER_GAMMA;
use crate::error::{Error, Result};
use crate::C64;

const MAX_ITER: usize = 50_000;
const EPS: f64 = 1e-16;
const SWITCH_RADIUS: f64 = 1.0;
const CF_SECTOR: f64 = 0.75 * std::f64::consts::PI;

fn check_arg(func: &'static str, z: C64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::ZeroArgument { func });
    }
    if z.im == 0.0 && z.re < 0.0 {
        return Err(Error::BranchCut { func });
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain {
            func,
            msg: format!("non-finite argument {z}"),
        });
    }
    Ok(())
}

/// Splits the ascending series as `E_n(z) = c·(−ln z) + r(z)`, returning
/// `(c, r)` with `c = (−z)^{n−1}/(n−1)!`.
pub fn expint_en_parts(n: u32, z: C64) -> Result<(C64, C64)> {
    if n == 0 {
        return Err(Error::InvalidParameter("E_n needs n >= 1".into()));
    }
    check_arg("expint_En", z)?;
    let n1 = (n - 1) as usize;
    let psi_n = if n == 1 {
        C64::new(-EULER_GAMMA, 0.0)
    } else {
        digamma(C64::new(n as f64, 0.0))?
    };
    let mut log_coeff = C64::new(1.0, 0.0);
    let mut term = C64::new(1.0, 0.0); // (−z)^k / k!
    let mut regular = C64::new(0.0, 0.0);
    let mut k = 0usize;
    loop {
        if k == n1 {
            log_coeff = term;
            regular += term * psi_n;
        } else {
            let add = -term / (k as f64 - n1 as f64);
            regular += add;
            if k > n1 && add.norm() <= EPS * regular.norm() {
                break;
            }
        }
        k += 1;
        if k > MAX_ITER {
            return Err(Error::NoConvergence {
                func: "expint_En",
                iterations: MAX_ITER,
            });
        }
        term *= -z / k as f64;
    }
    Ok((log_coeff, regular))
}

fn en_series(n: u32, z: C64) -> Result<C64> {
    let (c, r) = expint_en_parts(n, z)?;
    Ok(r - c * z.ln())
}

// Modified Lentz evaluation of the continued fraction
// E_n(z) = e^{−z} / (z + n − 1·n/(z + n + 2 − 2(n+1)/(z + n + 4 − …))).
fn en_cf(n: u32, z: C64) -> Result<C64> {
    let tiny = 1e-150;
    let nf = n as f64;
    let mut b = z + nf;
    let mut c = C64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (nf - 1.0 + i as f64);
        b += 2.0;
        d = an * d + b;
        if d.norm() < tiny {
            d = C64::new(tiny, 0.0);
        }
        c = b + an / c;
        if c.norm() < tiny {
            c = C64::new(tiny, 0.0);
        }
        d = d.inv();
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 4.0 * EPS {
            return Ok(h * (-z).exp());
        }
    }
    Err(Error::NoConvergence {
        func: "expint_En",
        iterations: MAX_ITER,
    })
}

/// E_n(z) on the principal branch, `|arg z| < π`.
pub fn expint_en(n: u32, z: C64) -> Result<C64> {
    if n == 0 {
        return Err(Error::InvalidParameter("E_n needs n >= 1".into()));
    }
    check_arg("expint_En", z)?;
    // The continued fraction is slow near the negative axis, where the
    // ascending series loses only about e^{|z|(1−|cos arg z|)} in accuracy.
    if z.norm() <= SWITCH_RADIUS || z.arg().abs() > CF_SECTOR {
        en_series(n, z)
    } else {
        en_cf(n, z)
    }
}

pub fn expint_e1(z: C64) -> Result<C64> {
    expint_en(1, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_semi_infinite, QuadratureConfig};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn e1_at_one_matches_quadrature() {
        let cfg = QuadratureConfig::new(1e-14, 1e-18, 4000).unwrap();
        let q = integrate_semi_infinite(|t| Ok(C64::new((-t).exp() / t, 0.0)), 1.0, 1.0, &cfg)
            .unwrap();
        let e1 = expint_e1(C64::new(1.0, 0.0)).unwrap();
        assert!((e1.re - q.value.re).abs() < 1e-13);
        assert!((e1.re - 0.219_383_934_395_520_27).abs() < 1e-15);
    }

    #[test]
    fn e1_small_argument_limit() {
        for r in [1e-6, 3e-6, 1e-5] {
            let z = C64::new(r, 0.0);
            let v = expint_e1(z).unwrap() + z.ln();
            assert!((v.re + EULER_GAMMA).abs() < 1e-5);
        }
    }

    #[test]
    fn e1_schwarz_reflection() {
        let z = C64::new(1.0, 1.0);
        let a = expint_e1(z).unwrap();
        let b = expint_e1(z.conj()).unwrap();
        assert!((a.conj() - b).norm() < 1e-15);
    }

    #[test]
    fn e1_branch_cut_and_zero() {
        assert!(matches!(
            expint_e1(C64::new(-1.0, 0.0)),
            Err(Error::BranchCut { .. })
        ));
        assert!(matches!(
            expint_e1(C64::new(0.0, 0.0)),
            Err(Error::ZeroArgument { .. })
        ));
    }

    #[test]
    fn e2_integration_by_parts() {
        let z = C64::new(0.7, 0.0);
        let lhs = expint_en(2, z).unwrap();
        let rhs = (-z).exp() - z * expint_e1(z).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn e3_log_coefficient() {
        let z = C64::new(0.4, 0.3);
        let (c, _) = expint_en_parts(3, z).unwrap();
        assert!((c - z * z / 2.0).norm() < 1e-15);
    }

    #[test]
    fn branches_agree_on_overlap_annulus() {
        for k in 0..12 {
            let th = -0.75 * PI + 1.5 * PI * k as f64 / 11.0;
            for r in [0.9, 1.0, 1.3] {
                let z = C64::from_polar(r, th);
                for n in 1..5 {
                    let s = en_series(n, z).unwrap();
                    let c = en_cf(n, z).unwrap();
                    assert!((s - c).norm() < 1e-13 * s.norm(), "n {n} z {z}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn en_recurrence(n in 1u32..=8, r in 0.1f64..20.0, th in -0.95f64..0.95) {
            let z = C64::from_polar(r, th * PI);
            let en = expint_en(n, z).unwrap();
            let en1 = expint_en(n + 1, z).unwrap();
            let res = en1 * n as f64 - (-z).exp() + z * en;
            let scale = (-z).exp().norm() + (z * en).norm();
            prop_assert!(res.norm() < 1e-10 * scale.max(1e-300), "res {}", res);
        }
    }
}
