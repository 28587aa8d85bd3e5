use pbessel::duality::{
    borel, borel_entire_piece, hmr_residual, laplace, BesselDual, BorelDual, ContourSpec,
    DualEvaluator, FnDual, LaplaceEvaluator,
};
use pbessel::monodromy::{BaseEvaluator, BesselP, MonodromyParams};
use pbessel::quad::QuadratureConfig;
use pbessel::{SheetPoint, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

#[test]
fn s_to_h_to_s_round_trip() {
    for nu in [0.25, 1.0 / 3.0, 0.4] {
        let f = BorelDual::new(BesselP { nu });
        for x in [2.0, 5.0, 8.0] {
            let z = SheetPoint::real(x);
            let v = laplace(&f, z, &cfg()).unwrap();
            let o = BesselP { nu }.eval(z).unwrap();
            assert!((v - o).norm() < 1e-5 * o.norm(), "nu {nu} x {x}: {v} vs {o}");
        }
    }
}

#[test]
fn h_to_s_to_h_round_trip() {
    let inner = QuadratureConfig::new(1e-10, 1e-13, 2000).unwrap();
    let p = LaplaceEvaluator {
        dual: BesselDual::new(0.3),
        cfg: inner,
    };
    let outer = QuadratureConfig::new(1e-8, 1e-11, 2000).unwrap();
    let contour = ContourSpec::standard(1.0).unwrap();
    for t in [0.3, 0.7, 1.2] {
        let v = borel(&p, SheetPoint::real(t), &contour, &outer).unwrap();
        let o = BesselDual::new(0.3).eval(SheetPoint::real(t)).unwrap();
        assert!((v - o).norm() < 1e-5 * o.norm(), "t {t}: {v} vs {o}");
    }
}

#[test]
fn contour_invariance() {
    let p = BesselP { nu: 0.3 };
    let t = SheetPoint::real(0.8);
    let base = borel(&p, t, &ContourSpec::standard(1.0).unwrap(), &cfg()).unwrap();
    for (r, th) in [(0.5, 0.75 * PI), (2.0, 1.25 * PI), (1.5, 1.4 * PI)] {
        let v = borel(&p, t, &ContourSpec::new(r, th, None).unwrap(), &cfg()).unwrap();
        assert!((v - base).norm() < 1e-8, "r {r} th {th}");
    }
}

#[test]
fn entire_piece_has_exponential_type_r() {
    let p = BesselP { nu: 0.3 };
    let r = 1.0;
    let m_p = (0..=64)
        .map(|k| {
            let th = -PI + 2.0 * PI * k as f64 / 64.0;
            p.eval(SheetPoint::new(r, th).unwrap()).unwrap().norm()
        })
        .fold(0.0, f64::max);
    for (rho, psi) in [(1.0, 0.0), (5.0, 2.0), (12.0, -1.0), (20.0, PI)] {
        let t = C64::from_polar(rho, psi);
        let f0 = borel_entire_piece(&p, t, r, &cfg()).unwrap();
        assert!(f0.norm() <= 1.05 * m_p * (r * rho).exp(), "t {t}");
    }
}

#[test]
fn hmr_through_borel_continuation() {
    // The looped value comes from the rotated Borel integral of P.
    let f = BorelDual::new(BesselP { nu: 0.3 });
    assert!(hmr_residual(&f, 1.0).unwrap() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn laplace_is_linear(al in -2.0f64..2.0, be in -2.0f64..2.0, x in 1.0f64..6.0) {
        let f = BesselDual::new(0.3);
        let g = FnDual {
            params: MonodromyParams::new(2.0, C64::new(0.0, 0.0)).unwrap(),
            f: |t: SheetPoint| Ok((-t.to_complex()).exp()),
        };
        let h = FnDual {
            params: f.params(),
            f: |t: SheetPoint| Ok(f.eval(t)? * al + g.eval(t)? * be),
        };
        let z = SheetPoint::real(x);
        let lhs = laplace(&h, z, &cfg()).unwrap();
        let rhs = laplace(&f, z, &cfg()).unwrap() * al + laplace(&g, z, &cfg()).unwrap() * be;
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
        // e^{−t} transforms to ζ/(ζ+1)
        let eg = laplace(&g, z, &cfg()).unwrap();
        prop_assert!((eg - x / (x + 1.0)).norm() < 1e-10);
    }
}
