//! Legendre polynomials, the Clausen integral and the auxiliary
//! trigonometric integrals feeding the separated-singularity T-matrix:
//!
//! ```text
//! x_g(w) = ∫_0^w  sin(g φ) cot(φ/2) dφ
//! y_g(w) = ∫_w^π  sin(g φ) ln sin(φ/2) dφ
//! c(g)   = [1 - x_g(π)/π] / 2
//! ```
//!
//! For integer `g` these have elementary closed forms (implemented for
//! `g = 1, 2, 3`) and the special values `x_n(π) = π`, `x_{-n}(π) = -π`,
//! `c(n) = 0`, `c(-n) = 1`. At positive integer `g` the combination
//! `2π g c(g) cot(gπ)` is an indeterminate `0·∞` whose limit is the
//! constant `ρ_n` evaluated here from its finite-sum form.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, QuadratureSpec};

/// Legendre polynomial `P_l(x)` by upward three-term recurrence.
///
/// `x` may overshoot `[-1, 1]` by at most 1e-12 (endpoint roundoff from
/// upstream trigonometry); it is clamped. Larger overshoot is a bug in the
/// caller and panics.
pub fn legendre_p(l: u32, x: f64) -> f64 {
    assert!(
        x.abs() <= 1.0 + 1e-12,
        "legendre_p: x = {x} outside [-1 - 1e-12, 1 + 1e-12]"
    );
    let x = x.clamp(-1.0, 1.0);
    if l == 0 {
        return 1.0;
    }
    if l == 1 {
        return x;
    }
    let mut p_prev = 1.0;
    let mut p_curr = x;
    for k in 1..l {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p_curr - kf * p_prev) / (kf + 1.0);
        p_prev = p_curr;
        p_curr = p_next;
    }
    p_curr
}

/// Clausen integral `Cl2(θ) = -∫_0^θ ln(2 sin(t/2)) dt = Σ_{n≥1} sin(nθ)/n²`
/// for `θ ∈ [0, π]`. Returns `(value, error_estimate)`.
pub fn clausen_cl2(theta: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!(
            "clausen_cl2 requires 0 <= theta <= pi, got {theta}"
        )));
    }
    if theta == 0.0 {
        return Ok((0.0, 0.0));
    }
    integrate_adaptive(|t| -(2.0 * (0.5 * t).sin()).ln(), 0.0, theta, spec)
}

fn check_omega_range(omega: f64) -> Result<()> {
    if !(0.0..=PI).contains(&omega) {
        return Err(Error::Domain(format!(
            "omega = {omega} outside [0, pi]"
        )));
    }
    Ok(())
}

/// `x_g(w)` by adaptive quadrature. The integrand has a removable point at
/// `φ = 0` where it is continued by its limit `2g`, so the whole integrand
/// is smooth and the rule converges at full order.
pub fn x_gamma(gamma: f64, omega: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    check_omega_range(omega)?;
    if omega == 0.0 {
        return Ok((0.0, 0.0));
    }
    integrate_adaptive(
        |phi| {
            if phi == 0.0 {
                2.0 * gamma
            } else {
                let half = 0.5 * phi;
                (gamma * phi).sin() * half.cos() / half.sin()
            }
        },
        0.0,
        omega,
        spec,
    )
}

/// `y_g(w)` by adaptive quadrature. The `ln sin(φ/2)` endpoint singularity at
/// `φ → 0` (reached only as `w → 0`) is integrable and handled by the open
/// panel rule.
pub fn y_gamma(gamma: f64, omega: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    check_omega_range(omega)?;
    if omega == PI {
        return Ok((0.0, 0.0));
    }
    integrate_adaptive(
        |phi| (gamma * phi).sin() * (0.5 * phi).sin().ln(),
        omega,
        PI,
        spec,
    )
}

/// `c(g) = [1 - x_g(π)/π] / 2`.
pub fn c_gamma(gamma: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let (x_pi, err) = x_gamma(gamma, PI, spec)?;
    Ok((0.5 * (1.0 - x_pi / PI), 0.5 * err / PI))
}

/// Closed form of `x_n(w)` for `n = 1, 2, 3`.
///
/// From `sin(nφ) cot(φ/2) = 1 + 2 Σ_{m=1}^{n-1} cos(mφ) + cos(nφ)`:
/// `x_n(w) = w + 2 Σ_{m=1}^{n-1} sin(mw)/m + sin(nw)/n`.
pub fn x_closed(n: u32, omega: f64) -> Result<f64> {
    check_omega_range(omega)?;
    match n {
        1 => Ok(omega + omega.sin()),
        2 => Ok(omega + 2.0 * omega.sin() + 0.5 * (2.0 * omega).sin()),
        3 => Ok(omega + 2.0 * omega.sin() + (2.0 * omega).sin() + (3.0 * omega).sin() / 3.0),
        _ => Err(Error::Unsupported(format!(
            "x_closed is implemented for n in {{1, 2, 3}}, got {n}; use x_gamma"
        ))),
    }
}

/// Closed form of `y_n(w)` for `n = 1, 2, 3`, obtained by integrating in the
/// variable `u = sin²(φ/2)` (so `sin φ dφ = 2 du`, `ln sin(φ/2) = ln(u)/2`).
pub fn y_closed(n: u32, omega: f64) -> Result<f64> {
    check_omega_range(omega)?;
    let sh = (0.5 * omega).sin();
    let u = sh * sh;
    // every ln factor below is multiplied by a power of u, so the u -> 0
    // limit is 0; substitute ln(u) = 0 there to avoid 0 * (-inf)
    let lg = if u > 0.0 { u.ln() } else { 0.0 };
    let v = 1.0 - u; // cos²(w/2)
    match n {
        1 => Ok(-v - u * lg),
        // log coefficient is sin²(w)/2 = 2u(1-u)
        2 => Ok(-v * v - 2.0 * u * v * lg),
        3 => Ok(
            -(16.0 / 3.0 * u * u * u - 8.0 * u * u + 3.0 * u) * lg + 16.0 / 9.0 * u * u * u
                - 4.0 * u * u
                + 3.0 * u
                - 7.0 / 9.0,
        ),
        _ => Err(Error::Unsupported(format!(
            "y_closed is implemented for n in {{1, 2, 3}}, got {n}; use y_gamma"
        ))),
    }
}

/// l'Hôpital constant `ρ_n = (-1)^n - 2n ln 2 - 2n Σ_{m=1}^{n} (-1)^m / m`,
/// the `g → n` limit of `2π g c(g) / tan(gπ)` at positive integer `n`.
pub fn rho_n(n: u32) -> f64 {
    assert!(n >= 1, "rho_n requires n >= 1");
    let nf = n as f64;
    let mut alt = 0.0;
    for m in 1..=n {
        let mf = m as f64;
        alt += if m.is_multiple_of(2) { 1.0 / mf } else { -1.0 / mf };
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign - 2.0 * nf * LN_2 - 2.0 * nf * alt
}

/// Exact special values attached to an integer Coulomb level `n >= 1`.
#[derive(Debug, Clone, Copy)]
pub struct SpecialValueTable {
    pub level: u32,
    /// `x_n(π)` for the repulsive branch (`g = +n`).
    pub x_pi_repulsive: f64,
    /// `x_{-n}(π)` for the attractive branch (`g = -n`).
    pub x_pi_attractive: f64,
    /// `c(+n)`.
    pub c_repulsive: f64,
    /// `c(-n)`.
    pub c_attractive: f64,
    /// `ρ_n`.
    pub rho: f64,
}

impl SpecialValueTable {
    pub fn new(level: u32) -> Self {
        assert!(level >= 1, "SpecialValueTable requires level >= 1");
        Self {
            level,
            x_pi_repulsive: PI,
            x_pi_attractive: -PI,
            c_repulsive: 0.0,
            c_attractive: 1.0,
            rho: rho_n(level),
        }
    }
}
