//! Scattering resonances of the Dirichlet Laplacian on truncated
//! Riemannian cones.
//!
//! Separation of variables reduces the resonance problem on `C_a(Y)` to
//! locating zeros of `H¹_ν(λa)` for the orders `ν_j² = μ_j² + ((n-2)/2)²`
//! attached to the link eigenvalues `μ_j²`. Each zero of `H²_ν` in the
//! closed first quadrant yields one resonance on each of the two sheets
//! adjacent to the physical half-plane.
//!
//! Module map:
//!
//! * [`specfun`]: Bessel, Hankel and Airy evaluation, plus independent
//!   series and asymptotic forms used for cross-validation.
//! * [`eyemap`]: the conformal map `ρ`/`ζ`, the eye-shaped domain and the
//!   counting constant `A_n`.
//! * [`hankel_zeros`]: Watson count, Airy-based seeds, Newton refinement
//!   and argument-principle validation of the zeros of `H²_ν`.
//! * [`link_spectrum`]: link spectra (analytic spheres or files) and their
//!   Weyl counting functions.
//! * [`resolvent_kernel`]: the separated resolvent kernel and its ODE check.
//! * [`resonance_counter`]: resonance assembly, counting and Weyl fits.

pub mod error;
pub mod eyemap;
pub mod hankel_zeros;
pub mod link_spectrum;
pub mod quadrature;
pub mod resolvent_kernel;
pub mod resonance_counter;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
