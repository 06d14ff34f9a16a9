//! Construction of the critical background profile.
//!
//! Pipeline: [`PiecewiseParams`] → [`build_piecewise`] / [`check_admissible`]
//! → [`smooth`] (a `C^∞` well `q~ = Q~/y²`) → [`scale_to_domain`]
//! (`q(x) = L^{c2} q~(x L^{c1})` on `[-L, L)`) → [`assemble_profile`]
//! (`phi_x = q - <q>`, `phi`, `phi_xx`) → [`norms`].

mod burgers;
mod piecewise;
mod profile;
mod smoothing;

pub use burgers::{bs_optimal_potential, BsConfig, BsFunctional, BsSolution};
pub use piecewise::{build_piecewise, check_admissible, MinorsReport, PiecewiseParams, StepPotential};
pub use profile::{
    assemble_profile, build_default_profile, grid_size, norms, scale_to_domain, scale_to_domain_on,
    Construction, PotentialProfile, ProfileConfig, ProfileMetadata, ProfileNorms, ScaledWell,
    MEAN_CEILING,
};
pub use smoothing::{mollifier, smooth, SmoothedPotential, SmoothingParams};

/// A compactly supported, even well shape `q~(y)`.
pub trait CompactShape {
    fn value(&self, y: f64) -> f64;

    /// `q~` vanishes for `|y|` beyond this.
    fn half_width(&self) -> f64;

    /// Positive abscissae where the shape changes character; quadrature splits there.
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.half_width()]
    }

    /// An interval on `y > 0` where the shape is negative, if any.
    fn negative_region(&self) -> Option<(f64, f64)> {
        None
    }
}

/// `q~ ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroShape;

impl CompactShape for ZeroShape {
    fn value(&self, _y: f64) -> f64 {
        0.0
    }

    fn half_width(&self) -> f64 {
        0.0
    }

    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}
