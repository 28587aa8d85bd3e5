//! Classical special functions: Γ, ψ, E_n, ₂F₁ and modified Bessel functions.

pub mod bessel;
pub mod expint;
pub mod gamma;
pub mod hyp2f1;

pub use bessel::{bessel_f, bessel_f_shifted, bessel_ik, bessel_p, bessel_p_any_sheet, hankel_coeffs};
pub use expint::{expint_e1, expint_en, expint_en_parts};
pub use gamma::{digamma, gamma, ln_gamma, pochhammer, rgamma};
pub use hyp2f1::{
    goursat_d, hyp2f1, hyp2f1_continued, hyp2f1_cut_plane, hyp2f1_goursat_log,
    hyp2f1_goursat_log_sheet, HypergeometricParams,
};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
