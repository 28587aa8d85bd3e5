use pbessel::bounds::{
    coefficient_ratios, corrected_remainder_check, empirical_mp, remainder, theorem1_check, SupGrid,
};
use pbessel::monodromy::BesselP;
use pbessel::{AsymptoticSeries, SheetPoint};
use std::f64::consts::PI;

#[test]
fn regional_bounds_hold_for_bessel() {
    let nu = 0.3;
    let p = BesselP { nu };
    let s = AsymptoticSeries::bessel(nu, 14);
    let mp = empirical_mp(&p, 1.0, SupGrid::default()).unwrap().scaled(1.5);
    for n in 0..=10 {
        for rho in [1.5, 3.0, 6.0, 12.0] {
            for theta in [0.0, 0.3 * PI, -0.45 * PI, 0.75 * PI, -PI, 1.1 * PI, -1.3 * PI, 1.45 * PI] {
                let z = SheetPoint { rho, theta };
                let c = theorem1_check(&p, &s, n, z, &mp).unwrap();
                assert!(c.passes, "n {n} at {z:?}: needed {}", c.needed_multiplier);
            }
        }
    }
    let ratios = coefficient_ratios(&s, 2.0, 12).unwrap();
    assert!(ratios.iter().all(|&q| q <= mp.value));
}

#[test]
fn deterioration_grows_past_the_stokes_ray() {
    let nu = 0.3;
    let p = BesselP { nu };
    let s = AsymptoticSeries::bessel(nu, 10);
    let thetas = [PI, 1.1 * PI, 1.2 * PI, 1.3 * PI, 1.4 * PI];
    for n in [4usize, 6, 8] {
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        let scaled = |theta: f64| {
            let z = SheetPoint { rho: 4.0, theta };
            remainder(&p, &s, n, z).unwrap().norm() * 8f64.powi(n as i32) / fact
        };
        for w in thetas.windows(2) {
            assert!(scaled(w[1]) >= scaled(w[0]), "n {n}: {} -> {}", w[0], w[1]);
            assert!(scaled(-w[1]) >= scaled(-w[0]), "n {n}: {} -> {}", -w[0], -w[1]);
        }
    }
}

#[test]
fn removing_small_terms_restores_accuracy() {
    let nu = 0.3;
    let p = BesselP { nu };
    let s = AsymptoticSeries::bessel(nu, 10);
    let mp = empirical_mp(&p, 1.0, SupGrid::default()).unwrap();
    for theta in [1.3 * PI, -1.3 * PI, 1.45 * PI] {
        let z = SheetPoint { rho: 8.0, theta };
        let c = corrected_remainder_check(&p, &s, 6, z, &mp).unwrap();
        assert!(c.passes, "{c:?}");
        let back = z.rotate(if theta > 0.0 { -2.0 * PI } else { 2.0 * PI });
        let direct = remainder(&p, &s, 6, back).unwrap();
        assert!((c.corrected.unwrap() - direct).norm() < 1e-10);
    }
}
