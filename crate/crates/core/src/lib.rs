//! Critical Lyapunov potentials for the Kuramoto-Sivashinsky equation.
//!
//! The crate builds a background profile `phi` whose derivative is a deep,
//! narrow well of critical scaling, certifies that the quadratic form
//!
//! ```text
//! <u, K u> = ∫ u_xx² - u_x² + phi_x u²
//! ```
//!
//! is coercive on odd periodic functions, turns the certificate into an
//! absorbing-ball radius that grows like `L^{3/2}`, and checks the resulting
//! Lyapunov inequality along pseudospectral simulations of the (destabilized)
//! KS equation `u_t = -u_xxxx - u_xx + gamma u + u u_x`.
//!
//! Module map:
//!
//! - [`exponents`]: scaling exponents, weak/critical/strong classification and
//!   the test-function arguments that rule out non-critical scalings.
//! - [`potential`]: step potential, smoothing, scaling onto `[-L, L)`, the
//!   sampled [`potential::PotentialProfile`] and a Burgers-Sivashinsky
//!   optimal-potential minimizer.
//! - [`coercivity`]: Galerkin certification on the odd sine basis, plus the
//!   Hardy-type and reduced-form checks.
//! - [`attractor`]: absorbing-ball radii and the Lyapunov monitor.
//! - [`solver`]: ETDRK4 pseudospectral integrator.
//! - [`study`]: L-sweeps, power-law fits, the thin-domain calculator and
//!   result persistence.

pub mod attractor;
pub mod coercivity;
pub mod error;
pub mod exponents;
pub mod linalg;
pub mod potential;
pub mod quadrature;
pub mod solver;
pub mod spectral;
pub mod study;

pub use error::{Error, Result};
