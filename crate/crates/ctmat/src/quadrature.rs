//! Adaptive quadrature on finite intervals.
//!
//! A 10-point Gauss / 21-point Kronrod pair is applied per panel; the
//! difference between the two rules drives greatest-error-first bisection.
//! All nodes are interior, so integrable endpoint singularities
//! (`ln x`, `x^a` with `a > -1`) need no special casing — panels adjacent
//! to the singular endpoint simply keep shrinking until the tolerance is met.
//!
//! Known interior features (poles just off the contour, kinks) can be given
//! as seed points; they become initial panel boundaries so refinement finds
//! them without a global search.

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for adaptive integration.
///
/// The engine stops when `sum of panel errors <= max(abs_tol, rel_tol * |value|)`
/// and reports the panel-error sum as its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    /// Validated constructor. `rel_tol` below 1e-14 is rejected: double
    /// precision cannot deliver it.
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if rel_tol < 1e-14 || rel_tol.is_nan() {
            return Err(Error::Domain(format!(
                "rel_tol = {rel_tol} is below the 1e-14 double-precision floor"
            )));
        }
        if abs_tol < 0.0 || abs_tol.is_nan() {
            return Err(Error::Domain(format!("abs_tol = {abs_tol} must be >= 0")));
        }
        if max_subdivisions == 0 {
            return Err(Error::Domain("max_subdivisions must be positive".into()));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

// 21-point Kronrod abscissae (positive half), Gauss-10 weights and
// Kronrod-21 weights, from the QUADPACK QK21 rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// GSL-style conservative rescaling of the raw `|K21 - G10|` difference.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk21_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let abs_half = half.abs();

    let f_center = f(center);
    let mut fv1 = [0.0f64; 10];
    let mut fv2 = [0.0f64; 10];

    // Gauss-10 has no center node (even count), Kronrod-21 does.
    let mut res_gauss = 0.0;
    let mut res_kronrod = f_center * WGK[10];
    let mut res_abs = res_kronrod.abs();

    for (j, wg) in WG.iter().enumerate() {
        let jtw = 2 * j + 1;
        let abscissa = half * XGK[jtw];
        let fval1 = f(center - abscissa);
        let fval2 = f(center + abscissa);
        fv1[jtw] = fval1;
        fv2[jtw] = fval2;
        let fsum = fval1 + fval2;
        res_gauss += wg * fsum;
        res_kronrod += WGK[jtw] * fsum;
        res_abs += WGK[jtw] * (fval1.abs() + fval2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let abscissa = half * XGK[jtwm1];
        let fval1 = f(center - abscissa);
        let fval2 = f(center + abscissa);
        fv1[jtwm1] = fval1;
        fv2[jtwm1] = fval2;
        res_kronrod += WGK[jtwm1] * (fval1 + fval2);
        res_abs += WGK[jtwm1] * (fval1.abs() + fval2.abs());
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    Panel {
        a,
        b,
        value: res_kronrod * half,
        error: rescale_error(err, res_abs * abs_half, res_asc * abs_half),
    }
}

/// Integrate `f` over `[a, b]` to the requested tolerance.
///
/// Returns `(value, error_estimate)`. On subdivision-budget exhaustion the
/// returned [`Error::Accuracy`] carries the best estimate reached.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    integrate_adaptive_seeded(f, a, b, &[], spec)
}

/// Same as [`integrate_adaptive`] but with initial panel boundaries at the
/// given interior seed points (points outside `(a, b)` are ignored).
pub fn integrate_adaptive_seeded<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    seeds: &[f64],
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if a > b || a.is_nan() || b.is_nan() {
        return Err(Error::Domain(format!(
            "integration bounds must satisfy a <= b, got a = {a}, b = {b}"
        )));
    }
    if a == b {
        return Ok((0.0, 0.0));
    }

    let mut cuts: Vec<f64> = seeds
        .iter()
        .copied()
        .filter(|s| s.is_finite() && *s > a && *s < b)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    cuts.insert(0, a);
    cuts.push(b);

    let mut panels: Vec<Panel> = cuts
        .windows(2)
        .map(|w| gk21_panel(&f, w[0], w[1]))
        .collect();

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() || !error.is_finite() {
            // integrand overflowed or returned NaN: refinement cannot recover
            let finite_part = panels
                .iter()
                .filter(|p| p.value.is_finite())
                .map(|p| p.value)
                .sum();
            return Err(Error::Accuracy {
                message: "non-finite integrand values encountered; the integral is \
                          divergent or the integrand is singular beyond integrability"
                    .into(),
                value: finite_part,
                error_estimate: f64::INFINITY,
            });
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok((value, error));
        }
        if panels.len() >= spec.max_subdivisions {
            return Err(Error::Accuracy {
                message: format!(
                    "quadrature did not converge within {} subdivisions",
                    spec.max_subdivisions
                ),
                value,
                error_estimate: error,
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error))
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        if !(mid > pa && mid < pb) {
            // interval already at machine width; refining further is pointless
            return Err(Error::Accuracy {
                message: "quadrature panel collapsed to machine width".into(),
                value,
                error_estimate: error,
            });
        }
        panels[worst] = gk21_panel(&f, pa, mid);
        panels.push(gk21_panel(&f, mid, pb));
    }
}
