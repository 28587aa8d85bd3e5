//! Dormand–Prince 8(5,3) integrator for complex systems of a real path
//! parameter, with Hairer's combined 5th/3rd order error estimate and PI
//! step-size control.

use crate::error::{Error, Result};
use crate::C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_steps: 200_000,
        }
    }
}

impl OdeConfig {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "ODE tolerances must be positive (rel {rel_tol}, abs {abs_tol})"
            )));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C: [f64; 12] = [
    0.0,
    5.260_015_195_876_773E-2,
    7.890_022_793_815_16E-2,
    1.183_503_419_072_274E-1,
    2.816_496_580_927_726E-1,
    3.333_333_333_333_333E-1,
    0.25,
    3.076_923_076_923_077E-1,
    6.512_820_512_820_513E-1,
    0.6,
    8.571_428_571_428_571E-1,
    1.0,
];

// Sparse lower-triangular tableau: (stage, [(column, coefficient)]).
const A: [&[(usize, f64)]; 12] = [
    &[],
    &[(0, 5.260_015_195_876_773E-2)],
    &[(0, 1.972_505_698_453_79E-2), (1, 5.917_517_095_361_37E-2)],
    &[(0, 2.958_758_547_680_685E-2), (2, 8.876_275_643_042_054E-2)],
    &[
        (0, 2.413_651_341_592_667E-1),
        (2, -8.845_494_793_282_861E-1),
        (3, 9.248_340_032_617_92E-1),
    ],
    &[
        (0, 3.703_703_703_703_703_5E-2),
        (3, 1.708_286_087_294_738_6E-1),
        (4, 1.254_676_875_668_224_2E-1),
    ],
    &[
        (0, 3.7109375E-2),
        (3, 1.702_522_110_195_440_5E-1),
        (4, 6.021_653_898_045_596E-2),
        (5, -1.7578125E-2),
    ],
    &[
        (0, 3.709_200_011_850_479E-2),
        (3, 1.703_839_257_122_399_8E-1),
        (4, 1.072_620_304_463_732_8E-1),
        (5, -1.531_943_774_862_440_2E-2),
        (6, 8.273_789_163_814_023E-3),
    ],
    &[
        (0, 6.241_109_587_160_757E-1),
        (3, -3.360_892_629_446_941_4),
        (4, -8.682_193_468_417_26E-1),
        (5, 2.759_209_969_944_671E1),
        (6, 2.015_406_755_047_789_4E1),
        (7, -4.348_988_418_106_996E1),
    ],
    &[
        (0, 4.776_625_364_382_643_4E-1),
        (3, -2.488_114_619_971_667_7),
        (4, -5.902_908_268_368_43E-1),
        (5, 2.123_005_144_818_119_3E1),
        (6, 1.527_923_363_288_242_3E1),
        (7, -3.328_821_096_898_486E1),
        (8, -2.033_120_170_850_862_7E-2),
    ],
    &[
        (0, -9.371_424_300_859_873E-1),
        (3, 5.186_372_428_844_064),
        (4, 1.091_437_348_996_729_5),
        (5, -8.149_787_010_746_927),
        (6, -1.852_006_565_999_696E1),
        (7, 2.273_948_709_935_050_5E1),
        (8, 2.493_605_552_679_652_3),
        (9, -3.046_764_471_898_219_6),
    ],
    &[
        (0, 2.273_310_147_516_538),
        (3, -1.053_449_546_673_725E1),
        (4, -2.000_872_058_224_862_5),
        (5, -1.795_893_186_311_88E1),
        (6, 2.794_888_452_941_996E1),
        (7, -2.858_998_277_135_023_5),
        (8, -8.872_856_933_530_63),
        (9, 1.236_056_717_579_430_3E1),
        (10, 6.433_927_460_157_636E-1),
    ],
];

const B: [f64; 12] = [
    5.429_373_411_656_876_5E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450_312_892_752_409,
    1.891_517_899_314_500_3,
    -5.801_203_960_010_585,
    3.111_643_669_578_199E-1,
    -1.521_609_496_625_161E-1,
    2.013_654_008_040_303_4E-1,
    4.471_061_572_777_259E-2,
];

const ER: [f64; 12] = [
    1.312_004_499_419_488E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.225_156_446_376_204_4,
    -4.957_589_496_572_502E-1,
    1.664_377_182_454_986_4,
    -3.503_288_487_499_736_6E-1,
    3.341_791_187_130_175E-1,
    8.192_320_648_511_571E-2,
    -2.235_530_786_388_629_4E-2,
];

const BHH1: f64 = 2.440_944_881_889_764E-1;
const BHH2: f64 = 7.338_466_882_816_118E-1;
const BHH3: f64 = 2.205_882_352_941_176_6E-2;

const SAFE: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 1.0 / 8.0 - BETA * 0.2;
const FAC_MIN: f64 = 1.0 / 3.0;
const FAC_MAX: f64 = 6.0;

/// Integrates `y' = f(s, y)` from `s0` to `s1` (either direction).
pub fn solve<const N: usize, F>(
    mut f: F,
    s0: f64,
    s1: f64,
    y0: [C64; N],
    cfg: &OdeConfig,
) -> Result<([C64; N], OdeStats)>
where
    F: FnMut(f64, &[C64; N]) -> [C64; N],
{
    let mut stats = OdeStats {
        accepted: 0,
        rejected: 0,
        evaluations: 0,
    };
    let span = s1 - s0;
    if span == 0.0 {
        return Ok((y0, stats));
    }
    let dir = span.signum();
    let zero = C64::new(0.0, 0.0);
    let mut s = s0;
    let mut y = y0;
    let mut k = [[zero; N]; 12];
    k[0] = f(s, &y);
    stats.evaluations += 1;
    let mut h = initial_step(&mut f, s, &y, &k[0], dir, span.abs(), cfg);
    stats.evaluations += 1;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= cfg.max_steps {
            return Err(Error::Ode(format!(
                "step budget of {} exhausted at s = {s}",
                cfg.max_steps
            )));
        }
        let remaining = s1 - s;
        if remaining * dir <= 0.0 {
            break;
        }
        let last = (h.abs() * 1.01) >= remaining.abs();
        if last {
            h = remaining;
        }
        if h.abs() <= 1e-14 * s.abs().max(span.abs()) {
            return Err(Error::Ode(format!("step size underflow at s = {s}")));
        }

        for stage in 1..12 {
            let mut yi = y;
            for &(j, a) in A[stage] {
                let ah = a * h;
                for (v, kj) in yi.iter_mut().zip(k[j].iter()) {
                    *v += kj * ah;
                }
            }
            k[stage] = f(s + C[stage] * h, &yi);
        }
        stats.evaluations += 11;

        let mut y_new = y;
        let mut err_sq = 0.0;
        let mut err2_sq = 0.0;
        for i in 0..N {
            let mut incr = zero;
            let mut e = zero;
            for st in 0..12 {
                incr += k[st][i] * B[st];
                e += k[st][i] * ER[st];
            }
            y_new[i] = y[i] + incr * h;
            let e2 = incr - k[0][i] * BHH1 - k[8][i] * BHH2 - k[11][i] * BHH3;
            let sk_re = cfg.abs_tol + cfg.rel_tol * y[i].re.abs().max(y_new[i].re.abs());
            let sk_im = cfg.abs_tol + cfg.rel_tol * y[i].im.abs().max(y_new[i].im.abs());
            err_sq += (e.re / sk_re).powi(2) + (e.im / sk_im).powi(2);
            err2_sq += (e2.re / sk_re).powi(2) + (e2.im / sk_im).powi(2);
        }
        let mut deno = err_sq + 0.01 * err2_sq;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let err = h.abs() * err_sq * (1.0 / (2.0 * N as f64 * deno)).sqrt();
        if !err.is_finite() {
            h *= 0.25;
            stats.rejected += 1;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(EXPO1);
        let fac = (fac11 / fac_old.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        if err <= 1.0 {
            fac_old = err.max(1e-4);
            stats.accepted += 1;
            s = if last { s1 } else { s + h };
            y = y_new;
            k[0] = f(s, &y);
            stats.evaluations += 1;
            if last {
                break;
            }
            let mut h_new = h / fac;
            if last_rejected && h_new.abs() > h.abs() {
                h_new = h;
            }
            h = h_new;
            last_rejected = false;
        } else {
            h /= (fac11 / SAFE).min(1.0 / FAC_MIN);
            stats.rejected += 1;
            last_rejected = true;
        }
    }
    Ok((y, stats))
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    s: f64,
    y: &[C64; N],
    f0: &[C64; N],
    dir: f64,
    span: f64,
    cfg: &OdeConfig,
) -> f64
where
    F: FnMut(f64, &[C64; N]) -> [C64; N],
{
    let mut dnf = 0.0;
    let mut dny = 0.0;
    for i in 0..N {
        let sk = cfg.abs_tol + cfg.rel_tol * y[i].norm();
        dnf += (f0[i].norm() / sk).powi(2);
        dny += (y[i].norm() / sk).powi(2);
    }
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(span);
    let mut y1 = *y;
    for i in 0..N {
        y1[i] += f0[i] * (h * dir);
    }
    let f1 = f(s + h * dir, &y1);
    let mut der2 = 0.0;
    for i in 0..N {
        let sk = cfg.abs_tol + cfg.rel_tol * y[i].norm();
        der2 += ((f1[i] - f0[i]).norm() / sk).powi(2);
    }
    let der2 = der2.sqrt() / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(1.0 / 8.0)
    };
    (100.0 * h).min(h1).min(span) * dir
}
