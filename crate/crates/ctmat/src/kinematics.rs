//! Kinematics of the two-body Coulomb problem at negative energy, in
//! `ħ = 1` units throughout.
//!
//! The stereographic projection of momentum space onto the unit 4-sphere
//! maps a momentum pair `(k, k')` at wave number `κ` to a single great-circle
//! angle `ω`:
//!
//! ```text
//! sin²(ω/2) = κ² |k - k'|² / [(k² + κ²)(k'² + κ²)]
//! η  = 2 κ² k k'      / [(k² + κ²)(k'² + κ²)]
//! ξ  = κ² (k² + k'²)  / [(k² + κ²)(k'² + κ²)]
//! ```
//!
//! The T-matrix element factorizes into `2π q₁q₂ η/(k k')` times a
//! dimensionless bracket that depends on kinematics only through `ω`.
//! Both `ξ - η` and `1 - ξ - η` are perfect squares
//! (`κ²(k-k')²` and `(kk'-κ²)²` over the same denominator), which pins
//! `ω` to the band `[ω₀, ω_π]` swept by `cos θ ∈ [+1, -1]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Reduced mass and charge product defining the two-body problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalSystem {
    mu: f64,
    q1q2: f64,
}

impl PhysicalSystem {
    /// `mu > 0`; `q1q2 != 0`, its sign selects the repulsive (`> 0`) or
    /// attractive (`< 0`) branch.
    pub fn new(mu: f64, q1q2: f64) -> Result<Self> {
        if mu <= 0.0 || !mu.is_finite() {
            return Err(Error::Domain(format!("reduced mass must be positive, got {mu}")));
        }
        if q1q2 == 0.0 || !q1q2.is_finite() {
            return Err(Error::Domain(format!(
                "charge product must be nonzero, got {q1q2}"
            )));
        }
        Ok(Self { mu, q1q2 })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn q1q2(&self) -> f64 {
        self.q1q2
    }
}

/// The fixed negative energy at which all representations are evaluated,
/// together with the matching Coulomb parameter and wave number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundStateContext {
    /// Level index; `None` for contexts built directly from `(gamma, kappa)`.
    pub n: Option<u32>,
    /// Dimensionless Coulomb parameter; `sign(q1q2) * n` for level contexts.
    pub gamma: f64,
    /// Bound-state wave number `κ_n = μ |q1q2| / n` (inverse length).
    pub kappa: f64,
    /// `E = -κ²/(2μ) = -μ (q1q2)² / (2n²)`.
    pub energy: f64,
}

impl BoundStateContext {
    /// Context for the `n`-th Coulomb level of `system`.
    pub fn make_context(system: &PhysicalSystem, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("level index n must be >= 1".into()));
        }
        let nf = n as f64;
        let kappa = system.mu * system.q1q2.abs() / nf;
        let gamma = system.q1q2.signum() * nf;
        let energy = -kappa * kappa / (2.0 * system.mu);
        Ok(Self {
            n: Some(n),
            gamma,
            kappa,
            energy,
        })
    }

    /// Dimensionless working context: `μ = 1` by convention, so
    /// `q1q2 = γκ` and `E = -κ²/2`. `gamma` need not be an integer.
    pub fn from_dimensionless(gamma: f64, kappa: f64) -> Result<Self> {
        if kappa <= 0.0 || !kappa.is_finite() {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        if !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be finite, got {gamma}")));
        }
        Ok(Self {
            n: None,
            gamma,
            kappa,
            energy: -0.5 * kappa * kappa,
        })
    }

    /// Charge product recovered from `(γ, κ, E)`: `q1q2 = γκ/μ = -2Eγ/κ`.
    pub fn charge_product(&self) -> f64 {
        -2.0 * self.energy * self.gamma / self.kappa
    }
}

/// Convenience wrapper for [`BoundStateContext::make_context`].
pub fn make_context(system: &PhysicalSystem, n: u32) -> Result<BoundStateContext> {
    BoundStateContext::make_context(system, n)
}

/// Momentum magnitudes of the relative motion and the cosine of the angle
/// between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumPair {
    k: f64,
    kprime: f64,
    cos_theta: f64,
}

impl MomentumPair {
    pub fn new(k: f64, kprime: f64, cos_theta: f64) -> Result<Self> {
        if k <= 0.0 || !k.is_finite() || kprime <= 0.0 || !kprime.is_finite() {
            return Err(Error::Domain(format!(
                "momentum magnitudes must be positive, got k = {k}, k' = {kprime}"
            )));
        }
        if !(-1.0..=1.0).contains(&cos_theta) {
            return Err(Error::Domain(format!(
                "cos(theta) must lie in [-1, 1], got {cos_theta}"
            )));
        }
        Ok(Self {
            k,
            kprime,
            cos_theta,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn kprime(&self) -> f64 {
        self.kprime
    }

    pub fn cos_theta(&self) -> f64 {
        self.cos_theta
    }

    /// Squared momentum transfer `|k - k'|² = k² + k'² - 2 k k' cos θ`,
    /// clamped at 0 against roundoff (it is a square). Grouped so that the
    /// result is bit-identical under `k ↔ k'`.
    pub fn transfer_sq(&self) -> f64 {
        let kk = self.k * self.kprime;
        (self.k * self.k + self.kprime * self.kprime - 2.0 * kk * self.cos_theta).max(0.0)
    }

    /// The same pair with `k` and `k'` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            k: self.kprime,
            kprime: self.k,
            cos_theta: self.cos_theta,
        }
    }
}

fn denominator(k: f64, kprime: f64, kappa: f64) -> f64 {
    (k * k + kappa * kappa) * (kprime * kprime + kappa * kappa)
}

/// Fock angle `ω ∈ [0, π]` of a momentum pair. `ω = π` is attained at
/// `k = k' = κ`, `cos θ = -1`; downstream formulas take limits there.
pub fn fock_angle(pair: &MomentumPair, kappa: f64) -> f64 {
    assert!(kappa > 0.0, "fock_angle: kappa must be positive");
    let s2 = (kappa * kappa * pair.transfer_sq() / denominator(pair.k, pair.kprime, kappa))
        .clamp(0.0, 1.0);
    // arcsin of the half-angle sine: well conditioned near the forward
    // direction, where the T-matrix is most singular
    2.0 * s2.sqrt().asin()
}

/// `η = 2κ²kk' / [(k²+κ²)(k'²+κ²)] ∈ (0, 1/2]`, with equality iff
/// `k = k' = κ`.
pub fn fock_eta(pair: &MomentumPair, kappa: f64) -> f64 {
    assert!(kappa > 0.0, "fock_eta: kappa must be positive");
    (2.0 * kappa * kappa * (pair.k * pair.kprime) / denominator(pair.k, pair.kprime, kappa))
        .min(0.5)
}

/// `ξ = κ²(k²+k'²) / [(k²+κ²)(k'²+κ²)]`.
pub fn fock_xi(pair: &MomentumPair, kappa: f64) -> f64 {
    assert!(kappa > 0.0, "fock_xi: kappa must be positive");
    kappa * kappa * (pair.k * pair.k + pair.kprime * pair.kprime)
        / denominator(pair.k, pair.kprime, kappa)
}

/// Range `[ω₀, ω_π]` of the Fock angle as `cos θ` sweeps `[+1, -1]` at fixed
/// magnitudes. Uses the perfect-square forms `ξ∓η = κ²(k∓k')²/D`, which stay
/// exact when `k ≈ k'`.
pub fn omega_bounds(pair: &MomentumPair, kappa: f64) -> (f64, f64) {
    omega_bounds_from_magnitudes(pair.k, pair.kprime, kappa)
}

pub(crate) fn omega_bounds_from_magnitudes(k: f64, kprime: f64, kappa: f64) -> (f64, f64) {
    assert!(kappa > 0.0, "omega_bounds: kappa must be positive");
    let sqrt_d = denominator(k, kprime, kappa).sqrt();
    let s_low = (kappa * (k - kprime).abs() / sqrt_d).clamp(0.0, 1.0);
    let s_high = (kappa * (k + kprime) / sqrt_d).clamp(0.0, 1.0);
    (2.0 * s_low.asin(), 2.0 * s_high.asin())
}

/// Fock coordinates of a momentum pair: the single-angle image of the full
/// 3D kinematics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockCoordinates {
    pub omega: f64,
    pub eta: f64,
    pub xi: f64,
}

impl FockCoordinates {
    pub fn from_pair(pair: &MomentumPair, kappa: f64) -> Self {
        Self {
            omega: fock_angle(pair, kappa),
            eta: fock_eta(pair, kappa),
            xi: fock_xi(pair, kappa),
        }
    }
}

/// Born term `4π q1q2 / |k - k'|²`, the bare Coulomb matrix element.
pub fn born_term(pair: &MomentumPair, q1q2: f64) -> Result<f64> {
    let msq = pair.transfer_sq();
    if msq <= 0.0 {
        return Err(Error::ForwardSingularity);
    }
    Ok(4.0 * PI * q1q2 / msq)
}

/// Leading factor `2π q1q2 η / (k k')` multiplying the dimensionless
/// bracket. Satisfies `prefactor / sin²(ω/2) = born_term` identically.
pub fn prefactor(pair: &MomentumPair, kappa: f64, q1q2: f64) -> f64 {
    2.0 * PI * q1q2 * fock_eta(pair, kappa) / (pair.k * pair.kprime)
}
