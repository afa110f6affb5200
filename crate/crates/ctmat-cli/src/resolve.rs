//! Merging of command-line flags, config-file entries and defaults into
//! fully resolved run configurations. Flags override the file; the file
//! overrides defaults.

use ctmat::{BoundStateContext, PhysicalSystem, QuadratureSpec, RepresentationKind};

use crate::config::FileConfig;
use crate::output::{echo_f64, echo_str, ConfigEcho};
use crate::{CliError, ContextArgs, GridArgs, TolArgs};

pub fn resolve_context(
    args: &ContextArgs,
    file: &FileConfig,
    echo: &mut ConfigEcho,
) -> Result<BoundStateContext, CliError> {
    let mu = args.mu_or(file)?;
    let q1q2 = args.q1q2_or(file)?;
    let n = args.n_or(file)?;
    let gamma = args.gamma_or(file)?;
    let kappa = args.kappa_or(file)?;

    let dimensionless = gamma.is_some() || kappa.is_some();
    let physical = mu.is_some() || q1q2.is_some() || n.is_some();
    if dimensionless && physical {
        return Err(CliError::Usage(
            "the (--gamma, --kappa) and (--mu, --q1q2, --n) input modes are mutually exclusive"
                .into(),
        ));
    }
    let ctx = if dimensionless {
        let (Some(gamma), Some(kappa)) = (gamma, kappa) else {
            return Err(CliError::Usage(
                "dimensionless mode needs both --gamma and --kappa".into(),
            ));
        };
        let ctx = BoundStateContext::from_dimensionless(gamma, kappa)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        echo_f64(echo, "gamma", gamma);
        echo_f64(echo, "kappa", kappa);
        ctx
    } else {
        let (Some(mu), Some(q1q2), Some(n)) = (mu, q1q2, n) else {
            return Err(CliError::Usage(
                "specify either (--mu, --q1q2, --n) or (--gamma, --kappa)".into(),
            ));
        };
        let system = PhysicalSystem::new(mu, q1q2).map_err(|e| CliError::Usage(e.to_string()))?;
        let ctx = ctmat::make_context(&system, n).map_err(|e| CliError::Usage(e.to_string()))?;
        echo_f64(echo, "mu", mu);
        echo_f64(echo, "q1q2", q1q2);
        echo_str(echo, "n", n);
        ctx
    };
    Ok(ctx)
}

impl ContextArgs {
    fn mu_or(&self, file: &FileConfig) -> Result<Option<f64>, CliError> {
        Ok(match self.mu {
            Some(v) => Some(v),
            None => file.get("mu")?,
        })
    }
    fn q1q2_or(&self, file: &FileConfig) -> Result<Option<f64>, CliError> {
        Ok(match self.q1q2 {
            Some(v) => Some(v),
            None => file.get("q1q2")?,
        })
    }
    fn n_or(&self, file: &FileConfig) -> Result<Option<u32>, CliError> {
        Ok(match self.n {
            Some(v) => Some(v),
            None => file.get("n")?,
        })
    }
    fn gamma_or(&self, file: &FileConfig) -> Result<Option<f64>, CliError> {
        Ok(match self.gamma {
            Some(v) => Some(v),
            None => file.get("gamma")?,
        })
    }
    fn kappa_or(&self, file: &FileConfig) -> Result<Option<f64>, CliError> {
        Ok(match self.kappa {
            Some(v) => Some(v),
            None => file.get("kappa")?,
        })
    }
}

pub fn resolve_tols(
    args: &TolArgs,
    file: &FileConfig,
    echo: &mut ConfigEcho,
) -> Result<QuadratureSpec, CliError> {
    let default = QuadratureSpec::default();
    let rel_tol = match args.rel_tol {
        Some(v) => v,
        None => file.get("rel-tol")?.unwrap_or(default.rel_tol),
    };
    let abs_tol = match args.abs_tol {
        Some(v) => v,
        None => file.get("abs-tol")?.unwrap_or(default.abs_tol),
    };
    let max_subdivisions = match args.max_subdivisions {
        Some(v) => v,
        None => file
            .get("max-subdivisions")?
            .unwrap_or(default.max_subdivisions),
    };
    let spec = QuadratureSpec::new(rel_tol, abs_tol, max_subdivisions)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    echo_f64(echo, "rel-tol", spec.rel_tol);
    echo_f64(echo, "abs-tol", spec.abs_tol);
    echo_str(echo, "max-subdivisions", spec.max_subdivisions);
    Ok(spec)
}

pub enum GridScale {
    Linear,
    Log,
}

impl GridScale {
    fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "lin" | "linear" => Ok(GridScale::Linear),
            "log" => Ok(GridScale::Log),
            other => Err(CliError::Usage(format!(
                "unknown grid scale `{other}` (expected lin or log)"
            ))),
        }
    }
}

pub fn grid_points(min: f64, max: f64, count: usize, scale: &GridScale) -> Result<Vec<f64>, CliError> {
    if count == 0 {
        return Err(CliError::Usage("grid counts must be >= 1".into()));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    if min >= max || min.is_nan() || max.is_nan() {
        return Err(CliError::Usage(format!(
            "grid needs min < max, got [{min}, {max}]"
        )));
    }
    match scale {
        GridScale::Linear => Ok((0..count)
            .map(|i| min + (max - min) * i as f64 / (count - 1) as f64)
            .collect()),
        GridScale::Log => {
            if min <= 0.0 || min.is_nan() {
                return Err(CliError::Usage(format!(
                    "log grid needs min > 0, got {min}"
                )));
            }
            let (ln_min, ln_max) = (min.ln(), max.ln());
            Ok((0..count)
                .map(|i| (ln_min + (ln_max - ln_min) * i as f64 / (count - 1) as f64).exp())
                .collect())
        }
    }
}

pub struct ResolvedGrid {
    pub k: Vec<f64>,
    pub kprime: Vec<f64>,
    pub cos_theta: Vec<f64>,
}

/// Momentum-grid defaults: two decades around the bound-state scale `κ`,
/// five points each side, and a cosine list that stays off the forward
/// singularity.
pub fn resolve_grid(
    args: &GridArgs,
    file: &FileConfig,
    kappa: f64,
    echo: &mut ConfigEcho,
) -> Result<ResolvedGrid, CliError> {
    let k_min = first(args.k_min, file.get("k-min")?).unwrap_or(0.25 * kappa);
    let k_max = first(args.k_max, file.get("k-max")?).unwrap_or(4.0 * kappa);
    let k_count = first(args.k_count, file.get("k-count")?).unwrap_or(5);
    let k_scale = GridScale::parse(
        &first(args.k_scale.clone(), file.get::<String>("k-scale")?).unwrap_or("log".into()),
    )?;
    let kp_min = first(args.kp_min, file.get("kp-min")?).unwrap_or(0.25 * kappa);
    let kp_max = first(args.kp_max, file.get("kp-max")?).unwrap_or(4.0 * kappa);
    let kp_count = first(args.kp_count, file.get("kp-count")?).unwrap_or(5);
    let kp_scale = GridScale::parse(
        &first(args.kp_scale.clone(), file.get::<String>("kp-scale")?).unwrap_or("log".into()),
    )?;
    let cos_theta = first(args.cos.clone(), file.get_list("cos")?)
        .unwrap_or_else(|| vec![-1.0, -0.5, 0.0, 0.5, 0.9]);
    if cos_theta.is_empty() {
        return Err(CliError::Usage("cos list must not be empty".into()));
    }
    for c in &cos_theta {
        if !(-1.0..=1.0).contains(c) {
            return Err(CliError::Usage(format!("cos = {c} outside [-1, 1]")));
        }
    }

    let k = grid_points(k_min, k_max, k_count, &k_scale)?;
    let kprime = grid_points(kp_min, kp_max, kp_count, &kp_scale)?;
    for v in k.iter().chain(kprime.iter()) {
        if *v <= 0.0 || v.is_nan() {
            return Err(CliError::Usage(format!(
                "momentum grid values must be positive, got {v}"
            )));
        }
    }

    echo_f64(echo, "k-min", k_min);
    echo_f64(echo, "k-max", k_max);
    echo_str(echo, "k-count", k_count);
    echo_str(
        echo,
        "k-scale",
        match k_scale {
            GridScale::Linear => "lin",
            GridScale::Log => "log",
        },
    );
    echo_f64(echo, "kp-min", kp_min);
    echo_f64(echo, "kp-max", kp_max);
    echo_str(echo, "kp-count", kp_count);
    echo_str(
        echo,
        "kp-scale",
        match kp_scale {
            GridScale::Linear => "lin",
            GridScale::Log => "log",
        },
    );
    crate::output::echo_f64_list(echo, "cos", &cos_theta);

    Ok(ResolvedGrid {
        k,
        kprime,
        cos_theta,
    })
}

fn first<T>(cli: Option<T>, file: Option<T>) -> Option<T> {
    cli.or(file)
}

pub fn parse_rep(name: &str) -> Result<RepresentationKind, CliError> {
    name.parse::<RepresentationKind>().map_err(CliError::Usage)
}

/// Representation list: explicit names, or every route admissible for
/// `gamma`. Every requested route is checked against the context before any
/// evaluation begins.
pub fn resolve_reps(
    requested: Option<Vec<String>>,
    file: &FileConfig,
    gamma: f64,
    echo: &mut ConfigEcho,
) -> Result<Vec<RepresentationKind>, CliError> {
    let names = match requested {
        Some(v) => Some(v),
        None => file.get_list::<String>("reps")?,
    };
    let reps = match names {
        Some(names) => {
            let reps = names
                .iter()
                .map(|n| parse_rep(n))
                .collect::<Result<Vec<_>, _>>()?;
            for rep in &reps {
                if !rep.valid_for(gamma) {
                    let admissible = RepresentationKind::admissible_for(gamma)
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ");
                    return Err(CliError::Usage(format!(
                        "representation `{rep}` is not valid for gamma = {gamma}; admissible: {admissible}"
                    )));
                }
            }
            reps
        }
        None => RepresentationKind::admissible_for(gamma),
    };
    if reps.is_empty() {
        return Err(CliError::Usage(format!(
            "no representation is admissible for gamma = {gamma}"
        )));
    }
    echo_str(
        echo,
        "reps",
        reps.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    Ok(reps)
}

pub enum OutputFormat {
    Csv,
    Json,
}

pub fn resolve_format(
    requested: Option<String>,
    file: &FileConfig,
    echo: &mut ConfigEcho,
) -> Result<OutputFormat, CliError> {
    let name = first(requested, file.get::<String>("format")?).unwrap_or_else(|| "csv".into());
    let format = match name.as_str() {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => {
            return Err(CliError::Usage(format!(
                "unknown format `{other}` (expected csv or json)"
            )))
        }
    };
    echo_str(echo, "format", name);
    Ok(format)
}
