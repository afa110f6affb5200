//! The dimensionless T-matrix bracket in every representation, and the
//! assembly of full matrix elements.
//!
//! At negative energy the off-shell Coulomb T-matrix element factorizes as
//! `⟨k|t|k'⟩ = [2π q₁q₂ η/(kk')] · B(γ, ω)`, and the bracket `B` admits four
//! algebraically independent evaluations on the repulsive branch:
//!
//! * **series**: `B = 1/sin²(ω/2) - (4γ/sin ω) Σ_{n≥1} sin(nω)/(n+γ)`,
//!   here accelerated so the numerically summed tail decays as `n⁻³`;
//! * **integral**: `B = 1/sin²(ω/2) - 4γ ∫₀¹ ρ^γ/(ρ² - 2cos ω·ρ + 1) dρ`;
//! * **separated**: Born and bound-state singularities isolated explicitly
//!   through the auxiliary integrals `x_γ, y_γ, c(γ)`;
//! * **closed**: elementary forms at `γ = 1, 2, 3`.
//!
//! On the attractive branch the full T-matrix has a pole at integer `γ = -n`;
//! the *generalized* T-matrix removes the ground-state (`n = 1`) pole term
//! and stays finite at `γ = -1`, with an integral and a closed form.
//!
//! Mutual agreement of all admissible routes at every kinematic point is the
//! library's core correctness mechanism.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kinematics::{prefactor, BoundStateContext, FockCoordinates, MomentumPair};
use crate::quadrature::{integrate_adaptive_seeded, QuadratureSpec};
use crate::special::{c_gamma, clausen_cl2, rho_n, x_gamma, y_gamma};

/// The five evaluation routes (plus the generalized closed form).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RepresentationKind {
    Series,
    Integral,
    Separated,
    Closed,
    GeneralizedIntegral,
    GeneralizedClosed,
}

impl RepresentationKind {
    pub const ALL: [RepresentationKind; 6] = [
        RepresentationKind::Series,
        RepresentationKind::Integral,
        RepresentationKind::Separated,
        RepresentationKind::Closed,
        RepresentationKind::GeneralizedIntegral,
        RepresentationKind::GeneralizedClosed,
    ];

    /// Whether this route is defined at the given Coulomb parameter.
    ///
    /// Series: everywhere except the bound-state poles `γ = -n`.
    /// Integral: `γ > -1`. Separated: `γ > 0` or non-integer (the `cot γπ`
    /// term is finite), plus the free point `γ = 0`. Closed: `γ ∈ {1,2,3}`.
    /// Generalized routes: `γ = -1` only (the ground-state subtraction).
    pub fn valid_for(&self, gamma: f64) -> bool {
        match self {
            RepresentationKind::Series => negative_integer(gamma).is_none(),
            RepresentationKind::Integral => gamma > -1.0,
            RepresentationKind::Separated => gamma >= 0.0 || !near_integer(gamma),
            RepresentationKind::Closed => {
                matches!(positive_integer(gamma), Some(1..=3))
            }
            RepresentationKind::GeneralizedIntegral | RepresentationKind::GeneralizedClosed => {
                (gamma + 1.0).abs() < INTEGER_EPS
            }
        }
    }

    /// All routes defined at `gamma`.
    pub fn admissible_for(gamma: f64) -> Vec<RepresentationKind> {
        Self::ALL
            .iter()
            .copied()
            .filter(|k| k.valid_for(gamma))
            .collect()
    }
}

impl fmt::Display for RepresentationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RepresentationKind::Series => "series",
            RepresentationKind::Integral => "integral",
            RepresentationKind::Separated => "separated",
            RepresentationKind::Closed => "closed",
            RepresentationKind::GeneralizedIntegral => "generalized-integral",
            RepresentationKind::GeneralizedClosed => "generalized-closed",
        };
        f.write_str(name)
    }
}

impl FromStr for RepresentationKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "series" => Ok(RepresentationKind::Series),
            "integral" => Ok(RepresentationKind::Integral),
            "separated" => Ok(RepresentationKind::Separated),
            "closed" => Ok(RepresentationKind::Closed),
            "generalized-integral" => Ok(RepresentationKind::GeneralizedIntegral),
            "generalized-closed" => Ok(RepresentationKind::GeneralizedClosed),
            other => Err(format!(
                "unknown representation `{other}` (expected one of: series, integral, \
                 separated, closed, generalized-integral, generalized-closed)"
            )),
        }
    }
}

/// A fully assembled T-matrix element: `value = prefactor * bracket`.
#[derive(Debug, Clone, Copy)]
pub struct TMatrixValue {
    /// Dimensionless bracket `B(γ, ω)`.
    pub bracket: f64,
    /// `2π q₁q₂ η / (k k')`, exact.
    pub prefactor: f64,
    /// `prefactor * bracket`.
    pub value: f64,
    pub representation: RepresentationKind,
    /// Estimated absolute error on the bracket; 0 for closed forms.
    pub error_estimate: f64,
}

const INTEGER_EPS: f64 = 1e-9;

fn near_integer(gamma: f64) -> bool {
    (gamma - gamma.round()).abs() < INTEGER_EPS
}

/// `Some(n)` when `gamma` is within 1e-9 of the positive integer `n`.
fn positive_integer(gamma: f64) -> Option<u32> {
    if gamma > 0.5 && near_integer(gamma) {
        Some(gamma.round() as u32)
    } else {
        None
    }
}

/// `Some(-n)` when `gamma` is within 1e-9 of a negative integer: a
/// bound-state pole of the full T-matrix.
fn negative_integer(gamma: f64) -> Option<i32> {
    if gamma < -0.5 && near_integer(gamma) {
        Some(gamma.round() as i32)
    } else {
        None
    }
}

fn check_omega_open(omega: f64) -> Result<f64> {
    if !omega.is_finite() || !(0.0..=PI).contains(&omega) {
        return Err(Error::Domain(format!("omega = {omega} outside [0, pi]")));
    }
    let sh = (0.5 * omega).sin();
    let s2 = sh * sh;
    if s2 < 1e-300 {
        return Err(Error::Domain(format!(
            "omega = {omega} is at the forward singularity; the T-matrix diverges as 1/sin^2(omega/2)"
        )));
    }
    Ok(s2)
}

fn born_bracket(s2: f64) -> f64 {
    1.0 / s2
}

/// Series route, `B = 1/sin²(ω/2) - (4γ/sin ω) S(γ, ω)` with the slowly
/// convergent sine sum peeled twice:
///
/// ```text
/// S = Σ sin(nω)/(n+γ)
///   = (π-ω)/2 - γ Cl2(ω) + γ² Σ sin(nω) / (n²(n+γ))
/// ```
///
/// using `Σ sin(nω)/n = (π-ω)/2` and `Σ sin(nω)/n² = Cl2(ω)`. The remaining
/// tail decays as `n⁻³` and its truncation error is bounded through the
/// Dirichlet-kernel bound `|Σ_{n>N} a_n sin(nω)| ≤ 2 a_{N+1}/sin(ω/2)`.
///
/// At `ω = π` every `sin(nω)` vanishes together with `sin ω`; the limit is
/// the alternating series `B = 1 - 2γ + 4γ² Σ (-1)^{n+1}/(n+γ)`, peeled the
/// same way with `Σ(-1)^{n+1}/n = ln 2` and `Σ(-1)^{n+1}/n² = π²/12`.
pub fn bracket_series(gamma: f64, omega: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let s2 = check_omega_open(omega)?;
    if gamma == 0.0 {
        return Ok((born_bracket(s2), f64::EPSILON / s2));
    }
    if negative_integer(gamma).is_some() {
        return Err(Error::BoundStatePole { gamma });
    }
    let rel = rel_tol.max(1e-14);
    if omega == PI {
        return bracket_series_at_pi(gamma, rel);
    }

    let sh = (0.5 * omega).sin();
    let g2 = gamma * gamma;
    // the Clausen value enters multiplied by ~4γ²/sin ω, so it is resolved
    // two decades tighter; the floors keep the request above the error
    // estimator's roundoff plateau (~50·eps·res_abs per panel chain)
    let cl_spec = QuadratureSpec {
        rel_tol: (0.01 * rel).max(1e-13),
        abs_tol: 5e-14,
        max_subdivisions: 2000,
    };
    let (cl2, cl2_err) = clausen_cl2(omega, &cl_spec)?;

    let peeled = 0.5 * (PI - omega) - gamma * cl2;
    let factor = 4.0 * gamma / omega.sin();
    let born = born_bracket(s2);

    let mut partial = 0.0f64;
    let mut n = 1u64;
    let tail = loop {
        let nf = n as f64;
        partial += (nf * omega).sin() / (nf * nf * (nf + gamma));
        let m = nf + 1.0;
        let denom = m * m * (m + gamma);
        let tail = if denom > 0.0 {
            2.0 / (denom * sh)
        } else {
            f64::INFINITY
        };
        let b_run = born - factor * (peeled + g2 * partial);
        if n >= 16 && factor.abs() * g2 * tail <= rel * b_run.abs().max(1e-300) {
            break tail;
        }
        n += 1;
        if n > 50_000_000 {
            let value = born - factor * (peeled + g2 * partial);
            return Err(Error::Accuracy {
                message: format!("sine series did not converge at gamma = {gamma}, omega = {omega}"),
                value,
                error_estimate: factor.abs() * g2 * tail,
            });
        }
    };

    let s_val = peeled + g2 * partial;
    let bracket = born - factor * s_val;
    let err = (factor.abs() * (g2 * tail + gamma.abs() * cl2_err))
        .max(f64::EPSILON * bracket.abs());
    Ok((bracket, err))
}

fn bracket_series_at_pi(gamma: f64, rel: f64) -> Result<(f64, f64)> {
    let g2 = gamma * gamma;
    let peeled = LN_2 - gamma * PI * PI / 12.0;
    // |terms| of Σ (-1)^{n+1}/(n²(n+γ)) decrease once n + γ is past 1, so the
    // alternating bound (first omitted term) applies from there on
    let monotone_from = (1.0 - gamma).max(16.0) as u64;
    let mut partial = 0.0f64;
    let mut sign = 1.0f64;
    let mut n = 1u64;
    let tail = loop {
        let nf = n as f64;
        partial += sign / (nf * nf * (nf + gamma));
        sign = -sign;
        let m = nf + 1.0;
        let tail = 1.0 / (m * m * (m + gamma).abs());
        let b_run = 1.0 - 2.0 * gamma + 4.0 * g2 * (peeled + g2 * partial);
        if n >= monotone_from && 4.0 * g2 * g2 * tail <= rel * b_run.abs().max(1e-300) {
            break tail;
        }
        n += 1;
        if n > 50_000_000 {
            return Err(Error::Accuracy {
                message: format!("alternating series did not converge at gamma = {gamma}, omega = pi"),
                value: 1.0 - 2.0 * gamma + 4.0 * g2 * (peeled + g2 * partial),
                error_estimate: 4.0 * g2 * g2 * tail,
            });
        }
    };
    let bracket = 1.0 - 2.0 * gamma + 4.0 * g2 * (peeled + g2 * partial);
    let err = (4.0 * g2 * g2 * tail).max(f64::EPSILON * bracket.abs());
    Ok((bracket, err))
}

/// Integral route, `B = 1/sin²(ω/2) - 4γ ∫₀¹ ρ^γ/(ρ² - 2cos ω·ρ + 1) dρ`,
/// for `γ > -1` (the `ρ^γ` endpoint is integrable). The denominator is a
/// near-double pole of width `sin ω` at `ρ = cos ω` when `ω → 0`, so panel
/// boundaries are seeded at `ρ = cos ω` and `ρ = 1 - sin ω`.
pub fn bracket_integral(gamma: f64, omega: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let s2 = check_omega_open(omega)?;
    if gamma <= -1.0 {
        return Err(Error::Domain(format!(
            "integral representation requires gamma > -1 (rho^gamma integrable at 0), got {gamma}"
        )));
    }
    if gamma == 0.0 {
        return Ok((born_bracket(s2), f64::EPSILON / s2));
    }
    let (sin_w, cos_w) = omega.sin_cos();
    // complete the square: rho^2 - 2 cos w rho + 1 = (rho - cos w)^2 + sin^2 w,
    // which keeps the denominator accurate near the peak
    let f = move |rho: f64| {
        let d = rho - cos_w;
        rho.powf(gamma) / (d * d + sin_w * sin_w)
    };
    let (integral, q_err) =
        integrate_adaptive_seeded(f, 0.0, 1.0, &[cos_w, 1.0 - sin_w], spec)?;
    let bracket = born_bracket(s2) - 4.0 * gamma * integral;
    Ok((bracket, 4.0 * gamma.abs() * q_err))
}

/// Separated-singularity route: the Born (`1/sin²(ω/2)`) and bound-state
/// (`cot γπ`) singularities appear explicitly,
///
/// ```text
/// B = 1/sin²(ω/2) - (2/sin ω) [ πγ cos γω + γ sin 2γω ln sin(ω/2)
///       - T₃ - γ cos γω · x_γ(ω) - 2γ² sin γω · y_γ(ω) ]
/// ```
///
/// with `T₃ = 2πγ c(γ) cot(γπ) sin γω` in general and its l'Hôpital limit
/// `T₃ = ρ_n sin nω` when `γ` is a positive integer (within 1e-9).
/// At `ω = π` the whole bracketed factor vanishes together with `sin ω`; the
/// limit is `B = 1 + 2 [γ² sin(γπ)(x_γ(π) - π) - γ cos(γπ) t₃]` with `t₃`
/// the coefficient of `sin γω` in `T₃`.
pub fn bracket_separated(gamma: f64, omega: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let s2 = check_omega_open(omega)?;
    if gamma == 0.0 {
        return Ok((born_bracket(s2), f64::EPSILON / s2));
    }
    if negative_integer(gamma).is_some() {
        return Err(Error::BoundStatePole { gamma });
    }

    // coefficient of sin(gamma*omega) in T3, and its error estimate
    let (t3_coef, t3_err) = if let Some(n) = positive_integer(gamma) {
        (rho_n(n), 0.0)
    } else {
        let (c, c_err) = c_gamma(gamma, spec)?;
        let cot = 1.0 / (gamma * PI).tan();
        (
            2.0 * PI * gamma * c * cot,
            2.0 * PI * gamma.abs() * c_err * cot.abs(),
        )
    };

    let (sin_gw, cos_gw) = (gamma * omega).sin_cos();

    if omega == PI {
        let (x_pi, x_err) = x_gamma(gamma, PI, spec)?;
        let g_prime = gamma * gamma * sin_gw * (x_pi - PI) - gamma * cos_gw * t3_coef;
        let err = 2.0 * (gamma * gamma * sin_gw.abs() * x_err + gamma.abs() * t3_err);
        let bracket = 1.0 + 2.0 * g_prime;
        return Ok((bracket, err.max(f64::EPSILON * bracket.abs())));
    }

    let (x_val, x_err) = x_gamma(gamma, omega, spec)?;
    let (y_val, y_err) = y_gamma(gamma, omega, spec)?;
    let g2 = gamma * gamma;
    let inner = PI * gamma * cos_gw + gamma * (2.0 * gamma * omega).sin() * (0.5 * omega).sin().ln()
        - t3_coef * sin_gw
        - gamma * cos_gw * x_val
        - 2.0 * g2 * sin_gw * y_val;
    let bracket = born_bracket(s2) - 2.0 / omega.sin() * inner;
    let err = 2.0 / omega.sin()
        * (gamma.abs() * cos_gw.abs() * x_err
            + 2.0 * g2 * sin_gw.abs() * y_err
            + sin_gw.abs() * t3_err);
    Ok((bracket, err.max(f64::EPSILON * bracket.abs())))
}

/// Elementary closed forms at `γ = n ∈ {1, 2, 3}`.
///
/// At `ω = π` the factors `(π-ω) cos(mω)/sin ω` are evaluated by their
/// limit `cos(mπ)`, giving `3 - 4 ln 2`, `16 ln 2 - 11` and `25 - 36 ln 2`.
pub fn bracket_closed(n: u32, omega: f64) -> Result<f64> {
    if !(1..=3).contains(&n) {
        return Err(Error::Unsupported(format!(
            "closed form exists for gamma in {{1, 2, 3}}, got {n}"
        )));
    }
    let s2 = check_omega_open(omega)?;
    if omega == PI {
        return Ok(match n {
            1 => 3.0 - 4.0 * LN_2,
            2 => 16.0 * LN_2 - 11.0,
            _ => 25.0 - 36.0 * LN_2,
        });
    }
    let lg = s2.ln();
    let (sin_w, cos_w) = omega.sin_cos();
    let pi_m = PI - omega;
    let b = born_bracket(s2);
    Ok(match n {
        1 => b - 2.0 * pi_m * cos_w / sin_w - 2.0 * lg - 4.0 * LN_2,
        2 => {
            b - 4.0 * pi_m * (2.0 * omega).cos() / sin_w
                - 8.0 * cos_w * lg
                - 16.0 * LN_2 * cos_w
                - 8.0
        }
        _ => {
            b - 6.0 * pi_m * (3.0 * omega).cos() / sin_w
                - 6.0 * (2.0 * (2.0 * omega).cos() + 1.0) * lg
                - 24.0 * LN_2 * (2.0 * omega).cos()
                - 24.0 * cos_w
                - 12.0 * LN_2
                - 6.0
        }
    })
}

/// Generalized (ground-state-subtracted) T-matrix bracket as a single
/// integral, `B̃ = 1/sin²(ω/2) + 4γ ∫₀¹ ρ^{γ+1}(ρ - 2cos ω)/(ρ² - 2cos ω·ρ + 1) dρ`,
/// defined for `γ > -2` and physically meaningful at `γ = -1`.
///
/// Subtractions past the ground state (`γ = -n`, `n ≥ 2`) would have to
/// remove further bound-state terms and are rejected.
pub fn bracket_generalized_integral(
    gamma: f64,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let s2 = check_omega_open(omega)?;
    if gamma <= -2.0 {
        return Err(Error::Domain(format!(
            "generalized integral requires gamma > -2 (only the ground-state term is subtracted), got {gamma}"
        )));
    }
    if gamma == 0.0 {
        return Ok((born_bracket(s2), f64::EPSILON / s2));
    }
    let (sin_w, cos_w) = omega.sin_cos();
    let f = move |rho: f64| {
        let d = rho - cos_w;
        rho.powf(gamma + 1.0) * (rho - 2.0 * cos_w) / (d * d + sin_w * sin_w)
    };
    let (integral, q_err) =
        integrate_adaptive_seeded(f, 0.0, 1.0, &[cos_w, 1.0 - sin_w], spec)?;
    let bracket = born_bracket(s2) + 4.0 * gamma * integral;
    Ok((bracket, 4.0 * gamma.abs() * q_err))
}

/// Closed form of the generalized bracket at the ground-state energy
/// (`γ = -1`): `B̃ = 1/sin²(ω/2) + 2(π-ω) cot ω - 4 ln|2 sin(ω/2)|`,
/// with `(π-ω) cot ω → -1` at `ω = π`.
pub fn bracket_generalized_closed(omega: f64) -> Result<f64> {
    let s2 = check_omega_open(omega)?;
    if omega == PI {
        return Ok(-1.0 - 4.0 * LN_2);
    }
    Ok(born_bracket(s2) + 2.0 * (PI - omega) * omega.cos() / omega.sin()
        - 4.0 * (2.0 * (0.5 * omega).sin()).ln())
}

/// The rational weight `1/(1+γ)` of the removed ground-state term: the
/// series route drops its `n = 1` term, which shifts the bracket by exactly
/// `4γ/(1+γ)`. Exposed to test that derivation chain.
pub fn ground_state_subtraction(gamma: f64) -> f64 {
    1.0 / (1.0 + gamma)
}

/// Dispatch a bracket evaluation to the requested route. The caller is
/// responsible for the admissibility gate ([`RepresentationKind::valid_for`]).
pub(crate) fn bracket_dispatch(
    kind: RepresentationKind,
    gamma: f64,
    omega: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    match kind {
        RepresentationKind::Series => bracket_series(gamma, omega, spec.rel_tol),
        RepresentationKind::Integral => bracket_integral(gamma, omega, spec),
        RepresentationKind::Separated => bracket_separated(gamma, omega, spec),
        RepresentationKind::Closed => {
            Ok((bracket_closed(gamma.round() as u32, omega)?, 0.0))
        }
        RepresentationKind::GeneralizedIntegral => {
            bracket_generalized_integral(gamma, omega, spec)
        }
        RepresentationKind::GeneralizedClosed => Ok((bracket_generalized_closed(omega)?, 0.0)),
    }
}

/// Evaluate the full matrix element of `ctx` at `pair` through `kind`.
pub fn evaluate(
    pair: &MomentumPair,
    ctx: &BoundStateContext,
    kind: RepresentationKind,
    spec: &QuadratureSpec,
) -> Result<TMatrixValue> {
    let gamma = ctx.gamma;
    if !kind.valid_for(gamma) {
        let admissible = RepresentationKind::admissible_for(gamma)
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::InvalidRepresentation {
            kind,
            gamma,
            admissible: if admissible.is_empty() {
                "none".into()
            } else {
                admissible
            },
        });
    }
    let fock = FockCoordinates::from_pair(pair, ctx.kappa);
    let (bracket, error_estimate) = bracket_dispatch(kind, gamma, fock.omega, spec)?;
    let pref = prefactor(pair, ctx.kappa, ctx.charge_product());
    Ok(TMatrixValue {
        bracket,
        prefactor: pref,
        value: pref * bracket,
        representation: kind,
        error_estimate,
    })
}
