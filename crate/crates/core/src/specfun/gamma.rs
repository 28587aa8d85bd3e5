//! Gamma and digamma for complex arguments.
//!
//! Reflection for `Re z < 1/2`, upward recurrence to `Re z >= SHIFT`, then the
//! Stirling series.

use crate::error::{Error, Result};
use crate::C64;
use std::f64::consts::PI;

const SHIFT: f64 = 16.0;

// B_{2k} for k = 1..10.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const HALF_LN_TAU: f64 = 0.918_938_533_204_672_7;

pub(crate) fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn pole(func: &'static str, z: C64) -> Error {
    Error::Pole {
        func,
        arg: format!("{z}"),
    }
}

// ln Γ(z) for Re z >= SHIFT.
fn stirling(z: C64) -> C64 {
    let mut series = C64::new(0.0, 0.0);
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut p = zinv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k + 1) as f64;
        series += p * (b / (n * (n - 1.0)));
        p *= zinv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_TAU + series
}

/// Shifts `z` (with `Re z >= 1/2`) up to the Stirling region; returns the
/// shifted argument and the list of factors passed over.
fn shift_up(z: C64) -> (C64, Vec<C64>) {
    let mut w = z;
    let mut factors = Vec::new();
    while w.re < SHIFT {
        factors.push(w);
        w += 1.0;
    }
    (w, factors)
}

/// Γ(z).
pub fn gamma(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(pole("gamma", z));
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return Ok(C64::new(PI, 0.0) / (s * gamma(1.0 - z)?));
    }
    let (w, factors) = shift_up(z);
    let mut prod = C64::new(1.0, 0.0);
    for f in &factors {
        prod *= f;
    }
    Ok(stirling(w).exp() / prod)
}

/// 1/Γ(z), entire; zero at the poles of Γ.
pub fn rgamma(z: C64) -> C64 {
    if is_nonpositive_integer(z) {
        return C64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        let s = (z * PI).sin();
        return s * gamma(1.0 - z).expect("1 - z is not a pole") / PI;
    }
    gamma(z).expect("not a pole").inv()
}

/// ln Γ(z) for `Re z > 0`, continuous in `z` (not the principal log of Γ).
pub fn ln_gamma(z: C64) -> Result<C64> {
    if z.re <= 0.0 {
        return Err(Error::Domain {
            func: "ln_gamma",
            msg: format!("needs Re z > 0, got {z}"),
        });
    }
    let (w, factors) = shift_up(z);
    let mut s = stirling(w);
    for f in &factors {
        s -= f.ln();
    }
    Ok(s)
}

/// Digamma ψ(z) = Γ'(z)/Γ(z).
pub fn digamma(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(pole("digamma", z));
    }
    if z.re < 0.5 {
        let cot = (z * PI).cos() / (z * PI).sin();
        return Ok(digamma(1.0 - z)? - cot * PI);
    }
    let (w, factors) = shift_up(z);
    let mut acc = C64::new(0.0, 0.0);
    for f in &factors {
        acc -= f.inv();
    }
    let winv = w.inv();
    let winv2 = winv * winv;
    let mut p = winv2;
    let mut series = C64::new(0.0, 0.0);
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k + 1) as f64;
        series += p * (b / n);
        p *= winv2;
    }
    Ok(acc + w.ln() - winv * 0.5 - series)
}

pub fn digamma_real(x: f64) -> Result<f64> {
    digamma(C64::new(x, 0.0)).map(|v| v.re)
}

/// Pochhammer symbol (a)_k by direct product.
pub fn pochhammer(a: C64, k: usize) -> C64 {
    let mut p = C64::new(1.0, 0.0);
    for j in 0..k {
        p *= a + j as f64;
    }
    p
}
