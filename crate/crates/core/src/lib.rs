//! Monodromic-relation toolkit for perturbed Bessel equations.

pub mod bounds;
pub mod cli;
pub mod duality;
pub mod error;
pub mod goursat;
pub mod monodromy;
pub mod ode;
pub mod pbde_ode;
pub mod quad;
pub mod series;
pub mod sheet;
pub mod specfun;

pub use error::{Error, Result};
pub use series::AsymptoticSeries;
pub use sheet::SheetPoint;

pub type C64 = num_complex::Complex64;
