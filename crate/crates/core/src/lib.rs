//! Radial solutions of `−Δu + A|x|^{−α}u = u^{p−1}` in `R^N`.
//!
//! The crate covers modified Bessel kernels, the change of variables to the
//! Bessel form, the Green's-operator fixed point and its Picard iteration,
//! shooting, origin asymptotics, the Pohozaev-type obstruction and the
//! existence map of the `(α, p)` plane.

pub mod asymptotics;
pub mod bessel;
pub mod checks;
pub mod cli;
pub mod error;
pub mod exact;
pub mod fit;
pub mod gamma;
pub mod green;
pub mod ode;
pub mod pohozaev;
pub mod profile;
pub mod quadrature;
pub mod region;
pub mod scaling;
pub mod shooting;

pub use error::{Error, Result};
pub use profile::{PhiProfile, VProfile};
pub use scaling::Parameters;
