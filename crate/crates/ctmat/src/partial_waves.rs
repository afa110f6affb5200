//! Partial-wave projection of the 3D matrix element through the Fock angle.
//!
//! With `cos θ` traded for `ω` via `sin²(ω/2) = ξ - η cos θ`, the standard
//! projection `t_l = ½ ∫ P_l(cos θ) t(cos θ) d cos θ` becomes
//!
//! ```text
//! t_l(k, k') = 1/(4η) ∫_{ω₀}^{ω_π} dω sin ω · P_l((ξ - sin²(ω/2))/η) · t(ω)
//! ```
//!
//! The inverse expansion is `t(cos θ) = Σ_l (2l+1) P_l(cos θ) t_l` with no
//! further constant; that convention is pinned by requiring the projected and
//! resummed Born term to reproduce the 3D Born term (see
//! `resum_partial_waves` and its tests).

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::kinematics::{omega_bounds_from_magnitudes, BoundStateContext};
use crate::quadrature::{integrate_adaptive_seeded, QuadratureSpec};
use crate::representations::{bracket_dispatch, RepresentationKind};
use crate::special::legendre_p;

/// Upward-recurrence stability budget for `P_l`.
pub const MAX_PARTIAL_WAVE: u32 = 64;

/// One projection job: `l`, momentum magnitudes (the angle is integrated
/// out), the energy context, the bracket route and the quadrature control.
#[derive(Debug, Clone, Copy)]
pub struct PartialWaveRequest {
    pub l: u32,
    pub k: f64,
    pub kprime: f64,
    pub ctx: BoundStateContext,
    pub kind: RepresentationKind,
    pub spec: QuadratureSpec,
}

struct Geometry {
    eta: f64,
    xi: f64,
    omega_0: f64,
    omega_pi: f64,
    prefactor: f64,
}

fn geometry(req: &PartialWaveRequest) -> Result<Geometry> {
    if req.k <= 0.0 || !req.k.is_finite() || req.kprime <= 0.0 || !req.kprime.is_finite() {
        return Err(Error::Domain(format!(
            "momentum magnitudes must be positive, got k = {}, k' = {}",
            req.k, req.kprime
        )));
    }
    let kappa = req.ctx.kappa;
    let d = (req.k * req.k + kappa * kappa) * (req.kprime * req.kprime + kappa * kappa);
    let eta = (2.0 * kappa * kappa * (req.k * req.kprime) / d).min(0.5);
    let xi = kappa * kappa * (req.k * req.k + req.kprime * req.kprime) / d;
    let (omega_0, omega_pi) = omega_bounds_from_magnitudes(req.k, req.kprime, kappa);
    let prefactor = 2.0 * std::f64::consts::PI * req.ctx.charge_product() * eta
        / (req.k * req.kprime);
    Ok(Geometry {
        eta,
        xi,
        omega_0,
        omega_pi,
        prefactor,
    })
}

/// Approximate zeros of `P_l` (Chebyshev-angle estimate), mapped to the `ω`
/// values where the projected integrand changes sign; used as subdivision
/// seeds for the oscillatory integrand at larger `l`.
fn legendre_zero_seeds(l: u32, eta: f64, xi: f64) -> Vec<f64> {
    let mut seeds = Vec::with_capacity(l as usize);
    for i in 1..=l {
        let angle = std::f64::consts::PI * (4.0 * i as f64 - 1.0) / (4.0 * l as f64 + 2.0);
        let x = angle.cos();
        let sin2_half = xi - eta * x;
        if sin2_half > 0.0 && sin2_half < 1.0 {
            seeds.push(2.0 * sin2_half.sqrt().asin());
        }
    }
    seeds
}

/// Project the matrix element onto the `l`-th partial wave. Returns
/// `(t_l, error_estimate)`.
///
/// At `k = k'` the lower Fock endpoint is `ω₀ = 0` and the Born part of the
/// integrand behaves as `4/ω`: the projection integral is logarithmically
/// divergent there (the on-diagonal Coulomb partial wave does not exist).
/// The projector then splits off the Born term analytically, integrates the
/// finite remainder, and attempts the Born piece with the open-endpoint
/// rule, so the returned accuracy error carries the best finite estimate
/// instead of a silently wrong number.
pub fn project_partial_wave(req: &PartialWaveRequest) -> Result<(f64, f64)> {
    if req.l > MAX_PARTIAL_WAVE {
        return Err(Error::Unsupported(format!(
            "l = {} exceeds the recurrence-stability budget l <= {MAX_PARTIAL_WAVE}",
            req.l
        )));
    }
    let gamma = req.ctx.gamma;
    if !req.kind.valid_for(gamma) {
        let admissible = RepresentationKind::admissible_for(gamma)
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::InvalidRepresentation {
            kind: req.kind,
            gamma,
            admissible,
        });
    }
    let geo = geometry(req)?;
    let scale = geo.prefactor / (4.0 * geo.eta);
    let seeds = legendre_zero_seeds(req.l, geo.eta, geo.xi);

    // Legendre argument (ξ - sin²(ω/2))/η equals cos θ; clamp the endpoint
    // roundoff before the recurrence.
    let arg = |w: f64| ((geo.xi - (0.5 * w).sin().powi(2)) / geo.eta).clamp(-1.0, 1.0);

    let inner_failure: RefCell<Option<Error>> = RefCell::new(None);
    let full = |w: f64| -> f64 {
        match bracket_dispatch(req.kind, gamma, w, &req.spec) {
            Ok((b, _)) => w.sin() * legendre_p(req.l, arg(w)) * b,
            Err(e) => {
                inner_failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };

    if geo.omega_0 > 0.0 {
        let (integral, q_err) =
            integrate_adaptive_seeded(full, geo.omega_0, geo.omega_pi, &seeds, &req.spec)?;
        if let Some(e) = inner_failure.into_inner() {
            return Err(e);
        }
        return Ok((scale * integral, scale.abs() * q_err));
    }

    // k = k': subtract the Born term, whose projection integral diverges
    let remainder = |w: f64| -> f64 {
        let s2 = (0.5 * w).sin().powi(2);
        match bracket_dispatch(req.kind, gamma, w, &req.spec) {
            Ok((b, _)) => w.sin() * legendre_p(req.l, arg(w)) * (b - 1.0 / s2),
            Err(e) => {
                inner_failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let (rem_val, rem_err) =
        integrate_adaptive_seeded(remainder, geo.omega_0, geo.omega_pi, &seeds, &req.spec)?;
    if let Some(e) = inner_failure.into_inner() {
        return Err(e);
    }
    let born = |w: f64| w.sin() * legendre_p(req.l, arg(w)) / (0.5 * w).sin().powi(2);
    match integrate_adaptive_seeded(born, geo.omega_0, geo.omega_pi, &seeds, &req.spec) {
        Ok((born_val, born_err)) => Ok((
            scale * (rem_val + born_val),
            scale.abs() * (rem_err + born_err),
        )),
        Err(Error::Accuracy {
            value,
            error_estimate,
            ..
        }) => Err(Error::Accuracy {
            message: format!(
                "partial wave l = {} at k = k' = {}: the Born part of the projection \
                 integral is only conditionally convergent (log-divergent at omega = 0); \
                 the on-shell-diagonal Coulomb partial wave does not exist",
                req.l, req.k
            ),
            value: scale * (rem_val + value),
            error_estimate: scale.abs() * (rem_err + error_estimate),
        }),
        Err(other) => Err(other),
    }
}

/// Resum a truncated partial-wave expansion at fixed `cos θ`:
/// `Σ_l (2l+1) P_l(cos θ) t_l`, the inverse of the projection above.
pub fn resum_partial_waves(t_ls: &[f64], cos_theta: f64) -> f64 {
    t_ls.iter()
        .enumerate()
        .map(|(l, t)| (2 * l + 1) as f64 * legendre_p(l as u32, cos_theta) * t)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::{born_term, MomentumPair};

    fn request(l: u32, k: f64, kprime: f64, gamma: f64, kind: RepresentationKind) -> PartialWaveRequest {
        PartialWaveRequest {
            l,
            k,
            kprime,
            ctx: BoundStateContext::from_dimensionless(gamma, 1.0).unwrap(),
            kind,
            spec: QuadratureSpec::default(),
        }
    }

    #[test]
    fn endpoint_legendre_argument_maps_to_unit_interval() {
        let (k, kp, kappa) = (1.9f64, 0.55f64, 1.0f64);
        let d = (k * k + kappa * kappa) * (kp * kp + kappa * kappa);
        let eta = 2.0 * kappa * kappa * k * kp / d;
        let xi = kappa * kappa * (k * k + kp * kp) / d;
        let (w0, wpi) = omega_bounds_from_magnitudes(k, kp, kappa);
        let arg0 = (xi - (0.5 * w0).sin().powi(2)) / eta;
        let argpi = (xi - (0.5 * wpi).sin().powi(2)) / eta;
        assert!((arg0 - 1.0).abs() < 1e-12);
        assert!((argpi + 1.0).abs() < 1e-12);
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen reference values
    fn frozen_values_gamma_1_closed() {
        // mpmath, k=2, k'=1, kappa=1, q1q2=1 (gamma=1 dimensionless context):
        // t_0 = 1.2896862560177327808, t_1 = 0.58730988450421854712,
        // t_2 = 0.2699286816081561697
        let expect = [1.2896862560177328, 0.5873098845042185, 0.26992868160815617];
        for (l, e) in expect.iter().enumerate() {
            let (v, err) =
                project_partial_wave(&request(l as u32, 2.0, 1.0, 1.0, RepresentationKind::Closed))
                    .unwrap();
            assert!((v - e).abs() < 1e-8, "l = {l}: v = {v}, expected {e}, err = {err}");
        }
    }

    #[test]
    fn representation_independence_l0() {
        let a = project_partial_wave(&request(0, 2.0, 1.0, 1.0, RepresentationKind::Closed))
            .unwrap()
            .0;
        let b = project_partial_wave(&request(0, 2.0, 1.0, 1.0, RepresentationKind::Series))
            .unwrap()
            .0;
        assert!((a - b).abs() / a.abs() < 1e-7, "a = {a}, b = {b}");
    }

    #[test]
    fn symmetric_under_momentum_swap() {
        let a = project_partial_wave(&request(2, 2.0, 0.7, 1.0, RepresentationKind::Closed))
            .unwrap();
        let b = project_partial_wave(&request(2, 0.7, 2.0, 1.0, RepresentationKind::Closed))
            .unwrap();
        assert!((a.0 - b.0).abs() <= (a.1 + b.1).max(1e-10));
    }

    #[test]
    fn born_resummation_recovers_3d_value() {
        // project the pure Born bracket 1/sin²(ω/2) with a unit charge
        // product and resum at cos θ = 0; this pins the inverse-expansion
        // constant in `resum_partial_waves` against the 3D Born term
        let (k, kp, kappa, q) = (2.0f64, 1.0f64, 1.0f64, 1.0f64);
        let d = (k * k + kappa * kappa) * (kp * kp + kappa * kappa);
        let eta = 2.0 * kappa * kappa * k * kp / d;
        let xi = kappa * kappa * (k * k + kp * kp) / d;
        let (w0, wpi) = omega_bounds_from_magnitudes(k, kp, kappa);
        let pref = 2.0 * std::f64::consts::PI * q * eta / (k * kp);
        let spec = QuadratureSpec::default();
        let mut t_ls = Vec::new();
        for l in 0..=40u32 {
            let f = |w: f64| {
                let x = ((xi - (0.5 * w).sin().powi(2)) / eta).clamp(-1.0, 1.0);
                w.sin() * legendre_p(l, x) / (0.5 * w).sin().powi(2)
            };
            let (integral, _) =
                crate::quadrature::integrate_adaptive(f, w0, wpi, &spec).unwrap();
            t_ls.push(pref * integral / (4.0 * eta));
        }
        let resummed = resum_partial_waves(&t_ls, 0.0);
        let pair = MomentumPair::new(k, kp, 0.0).unwrap();
        let three_d = born_term(&pair, q).unwrap();
        assert!(
            (resummed - three_d).abs() < 1e-5,
            "resummed = {resummed}, 3d = {three_d}"
        );
    }

    #[test]
    fn full_element_resummation_matches_3d() {
        // same convention check on the full gamma = 1 matrix element
        let ctx = BoundStateContext::from_dimensionless(1.0, 1.0).unwrap();
        let mut t_ls = Vec::new();
        for l in 0..=40u32 {
            let (v, _) =
                project_partial_wave(&request(l, 2.0, 1.0, 1.0, RepresentationKind::Closed))
                    .unwrap();
            t_ls.push(v);
        }
        let pair = MomentumPair::new(2.0, 1.0, 0.0).unwrap();
        let three_d = crate::representations::evaluate(
            &pair,
            &ctx,
            RepresentationKind::Closed,
            &QuadratureSpec::default(),
        )
        .unwrap()
        .value;
        let resummed = resum_partial_waves(&t_ls, 0.0);
        assert!(
            (resummed - three_d).abs() < 1e-5,
            "resummed = {resummed}, 3d = {three_d}"
        );
        // truncation error falls as l_max grows (geometric in this geometry)
        let errs: Vec<f64> = [5usize, 10, 20, 40]
            .iter()
            .map(|&lmax| (resum_partial_waves(&t_ls[..=lmax], 0.0) - three_d).abs())
            .collect();
        assert!(
            errs[0] > errs[1] && errs[1] > errs[2] && errs[2] > errs[3],
            "truncation errors not decreasing: {errs:?}"
        );
    }

    #[test]
    fn diagonal_momenta_report_conditional_convergence() {
        let err = project_partial_wave(&request(0, 1.0, 1.0, 1.0, RepresentationKind::Closed))
            .unwrap_err();
        match err {
            Error::Accuracy { message, value, .. } => {
                assert!(message.contains("conditionally convergent"));
                assert!(value.is_finite());
            }
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn l_budget_enforced() {
        let err =
            project_partial_wave(&request(65, 2.0, 1.0, 1.0, RepresentationKind::Closed))
                .unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn generalized_context_projects() {
        let (v, _) = project_partial_wave(&request(
            1,
            2.0,
            1.0,
            -1.0,
            RepresentationKind::GeneralizedClosed,
        ))
        .unwrap();
        assert!(v.is_finite());
    }
}
