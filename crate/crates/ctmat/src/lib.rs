//! Off-shell two-body Coulomb transition matrix at negative energy.
//!
//! The T-matrix element `⟨k|t(E)|k'⟩` of the pure Coulomb potential, off the
//! energy shell and below threshold, collapses under the Fock stereographic
//! projection to a prefactor times a one-variable bracket `B(γ, ω)`, where
//! `γ` is the dimensionless Coulomb parameter and `ω` the great-circle angle
//! between the images of `k` and `k'` on the unit 4-sphere.
//!
//! The crate evaluates the bracket through four independent routes on the
//! repulsive branch (sine series, single `ρ`-integral, separated-singularity
//! form, elementary closed forms at `γ = 1, 2, 3`) and through two routes for
//! the generalized, ground-state-subtracted T-matrix on the attractive branch
//! at `γ = -1`. Cross-representation agreement is the correctness mechanism:
//! every route is an independent oracle for the others.
//!
//! Modules:
//! * [`kinematics`] — Fock variables, bound-state contexts, Born term;
//! * [`quadrature`] — adaptive Gauss–Kronrod engine with seeded panels;
//! * [`special`] — Legendre polynomials, Clausen integral, the auxiliary
//!   integrals `x_γ, y_γ, c(γ)` and the constants `ρ_n`;
//! * [`representations`] — the bracket routes and full matrix elements;
//! * [`partial_waves`] — projection onto Legendre partial waves.

pub mod error;
pub mod kinematics;
pub mod partial_waves;
pub mod quadrature;
pub mod representations;
pub mod special;

pub use error::{Error, Result};
pub use kinematics::{
    born_term, fock_angle, fock_eta, fock_xi, make_context, omega_bounds, prefactor,
    BoundStateContext, FockCoordinates, MomentumPair, PhysicalSystem,
};
pub use partial_waves::{project_partial_wave, resum_partial_waves, PartialWaveRequest};
pub use quadrature::{integrate_adaptive, integrate_adaptive_seeded, QuadratureSpec};
pub use representations::{
    bracket_closed, bracket_generalized_closed, bracket_generalized_integral, bracket_integral,
    bracket_separated, bracket_series, evaluate, ground_state_subtraction, RepresentationKind,
    TMatrixValue,
};
pub use special::{
    c_gamma, clausen_cl2, legendre_p, rho_n, x_closed, x_gamma, y_closed, y_gamma,
    SpecialValueTable,
};
