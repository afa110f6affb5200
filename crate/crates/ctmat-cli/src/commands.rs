//! The four subcommands.

use std::collections::BTreeMap;

use ctmat::{
    evaluate, fock_eta, fock_xi, project_partial_wave, BoundStateContext, FockCoordinates,
    MomentumPair, PartialWaveRequest, QuadratureSpec, RepresentationKind,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::FileConfig;
use crate::output::{self, csv_document, echo_str, emit, g17, json_document, ConfigEcho};
use crate::resolve::{
    parse_rep, resolve_context, resolve_format, resolve_grid, resolve_reps, resolve_tols,
    OutputFormat,
};
use crate::{CliError, EvalArgs, PartialWaveArgs, ScanArgs, ValidateArgs};

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let mut echo = ConfigEcho::new();
    let ctx = resolve_context(&args.context, &file, &mut echo)?;
    let spec = resolve_tols(&args.tols, &file, &mut echo)?;

    let k = require_f64(args.k, &file, "k")?;
    let kp = require_f64(args.kp, &file, "kp")?;
    let cos = require_f64(args.cos, &file, "cos")?;
    let rep_name = match args.rep {
        Some(r) => r,
        None => file.get::<String>("rep")?.unwrap_or_else(|| "series".into()),
    };
    let rep = parse_rep(&rep_name)?;

    let pair = MomentumPair::new(k, kp, cos).map_err(|e| CliError::Usage(e.to_string()))?;
    let fock = FockCoordinates::from_pair(&pair, ctx.kappa);
    let t = evaluate(&pair, &ctx, rep, &spec)?;

    println!("representation = {}", t.representation);
    println!("value          = {}", g17(t.value));
    println!("bracket        = {}", g17(t.bracket));
    println!("prefactor      = {}", g17(t.prefactor));
    println!("omega          = {}", g17(fock.omega));
    println!("eta            = {}", g17(fock.eta));
    println!("xi             = {}", g17(fock.xi));
    println!("error_estimate = {}", g17(t.error_estimate));
    Ok(())
}

fn require_f64(cli: Option<f64>, file: &FileConfig, key: &str) -> Result<f64, CliError> {
    match cli {
        Some(v) => Ok(v),
        None => file
            .get::<f64>(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required value --{key}"))),
    }
}

#[derive(Serialize, Clone)]
struct ScanRow {
    k: f64,
    kprime: f64,
    cos_theta: f64,
    omega: f64,
    eta: f64,
    xi: f64,
    representation: String,
    bracket: f64,
    prefactor: f64,
    value: f64,
    error_estimate: f64,
}

const SCAN_HEADER: &str =
    "k,kprime,cos_theta,omega,eta,xi,representation,bracket,prefactor,value,error_estimate";

fn scan_row_csv(r: &ScanRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        g17(r.k),
        g17(r.kprime),
        g17(r.cos_theta),
        g17(r.omega),
        g17(r.eta),
        g17(r.xi),
        r.representation,
        g17(r.bracket),
        g17(r.prefactor),
        g17(r.value),
        g17(r.error_estimate),
    )
}

/// Grid jobs in deterministic order: k outer, k' middle, cos inner,
/// representation innermost.
fn scan_jobs(
    grid: &crate::resolve::ResolvedGrid,
    reps: &[RepresentationKind],
) -> Vec<(f64, f64, f64, RepresentationKind)> {
    let mut jobs = Vec::with_capacity(grid.k.len() * grid.kprime.len() * grid.cos_theta.len() * reps.len());
    for &k in &grid.k {
        for &kp in &grid.kprime {
            for &cos in &grid.cos_theta {
                for &rep in reps {
                    jobs.push((k, kp, cos, rep));
                }
            }
        }
    }
    jobs
}

fn evaluate_row(
    k: f64,
    kp: f64,
    cos: f64,
    rep: RepresentationKind,
    ctx: &BoundStateContext,
    spec: &QuadratureSpec,
) -> Result<ScanRow, String> {
    let pair = MomentumPair::new(k, kp, cos).map_err(|e| e.to_string())?;
    let t = evaluate(&pair, ctx, rep, spec).map_err(|e| e.to_string())?;
    Ok(ScanRow {
        k,
        kprime: kp,
        cos_theta: cos,
        omega: ctmat::fock_angle(&pair, ctx.kappa),
        eta: fock_eta(&pair, ctx.kappa),
        xi: fock_xi(&pair, ctx.kappa),
        representation: rep.to_string(),
        bracket: t.bracket,
        prefactor: t.prefactor,
        value: t.value,
        error_estimate: t.error_estimate,
    })
}

pub fn scan(args: ScanArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let mut echo = ConfigEcho::new();
    let ctx = resolve_context(&args.context, &file, &mut echo)?;
    let spec = resolve_tols(&args.tols, &file, &mut echo)?;
    let grid = resolve_grid(&args.grid, &file, ctx.kappa, &mut echo)?;
    let reps = resolve_reps(args.reps, &file, ctx.gamma, &mut echo)?;
    let format = resolve_format(args.format, &file, &mut echo)?;

    let jobs = scan_jobs(&grid, &reps);
    // work pool over grid points; results gathered by index so the output
    // order never depends on scheduling
    let results: Vec<Result<ScanRow, String>> = jobs
        .par_iter()
        .map(|&(k, kp, cos, rep)| evaluate_row(k, kp, cos, rep, &ctx, &spec))
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    for (job, result) in jobs.iter().zip(results) {
        match result {
            Ok(row) => rows.push(row),
            Err(msg) => {
                return Err(CliError::Eval(format!(
                    "at k = {}, k' = {}, cos = {}, representation {}: {msg}",
                    job.0, job.1, job.2, job.3
                )))
            }
        }
    }

    #[derive(Serialize)]
    struct Summary {
        rows: usize,
        max_error_estimate: f64,
    }
    let summary = Summary {
        rows: rows.len(),
        max_error_estimate: rows.iter().map(|r| r.error_estimate).fold(0.0, f64::max),
    };

    let content = match format {
        OutputFormat::Csv => {
            let lines: Vec<String> = rows.iter().map(scan_row_csv).collect();
            csv_document("ctmat scan", &echo, SCAN_HEADER, &lines)
        }
        OutputFormat::Json => json_document(&echo, &rows, &summary)?,
    };
    emit(args.output.as_deref(), &content)
}

#[derive(Serialize)]
struct ValidatedPoint {
    k: f64,
    kprime: f64,
    cos_theta: f64,
    values: BTreeMap<String, f64>,
    max_rel_deviation: f64,
    worst_pair: String,
}

#[derive(Serialize)]
struct ValidationFailure {
    k: f64,
    kprime: f64,
    cos_theta: f64,
    representation: String,
    error: String,
}

#[derive(Serialize)]
struct ValidationSummary {
    points: usize,
    representations: Vec<String>,
    max_rel_deviation: f64,
    threshold: f64,
    evaluation_failures: usize,
    pass: bool,
}

pub fn validate(args: ValidateArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let mut echo = ConfigEcho::new();
    let ctx = resolve_context(&args.context, &file, &mut echo)?;
    let spec = resolve_tols(&args.tols, &file, &mut echo)?;
    let grid = resolve_grid(&args.grid, &file, ctx.kappa, &mut echo)?;
    let reps = resolve_reps(args.reps, &file, ctx.gamma, &mut echo)?;
    if reps.len() < 2 {
        return Err(CliError::Usage(format!(
            "validation needs at least two representations, context gamma = {} admits only: {}",
            ctx.gamma,
            reps.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let threshold = match args.threshold {
        Some(t) => t,
        None => file.get("threshold")?.unwrap_or(1e-8),
    };
    if threshold <= 0.0 || threshold.is_nan() {
        return Err(CliError::Usage(format!(
            "threshold must be positive, got {threshold}"
        )));
    }
    output::echo_f64(&mut echo, "threshold", threshold);

    let mut points_in = Vec::new();
    for &k in &grid.k {
        for &kp in &grid.kprime {
            for &cos in &grid.cos_theta {
                points_in.push((k, kp, cos));
            }
        }
    }
    type PointResult = Vec<(RepresentationKind, Result<ScanRow, String>)>;
    let evaluated: Vec<PointResult> = points_in
        .par_iter()
        .map(|&(k, kp, cos)| {
            reps.iter()
                .map(|&rep| (rep, evaluate_row(k, kp, cos, rep, &ctx, &spec)))
                .collect()
        })
        .collect();

    let mut points = Vec::new();
    let mut failures = Vec::new();
    let mut max_dev = 0.0f64;
    let mut worst_point: Option<(f64, f64, f64, String)> = None;
    for (&(k, kp, cos), results) in points_in.iter().zip(evaluated) {
        let mut values = BTreeMap::new();
        for (rep, result) in results {
            match result {
                Ok(row) => {
                    values.insert(rep.to_string(), row.value);
                }
                Err(error) => failures.push(ValidationFailure {
                    k,
                    kprime: kp,
                    cos_theta: cos,
                    representation: rep.to_string(),
                    error,
                }),
            }
        }
        let mut point_dev = 0.0f64;
        let mut worst_pair = String::new();
        let entries: Vec<(&String, &f64)> = values.iter().collect();
        for (i, (name_a, a)) in entries.iter().enumerate() {
            for (name_b, b) in entries.iter().skip(i + 1) {
                let dev = (*a - *b).abs() / a.abs().max(b.abs()).max(1e-300);
                if dev > point_dev {
                    point_dev = dev;
                    worst_pair = format!("{name_a}/{name_b}");
                }
            }
        }
        if point_dev > max_dev {
            max_dev = point_dev;
            worst_point = Some((k, kp, cos, worst_pair.clone()));
        }
        points.push(ValidatedPoint {
            k,
            kprime: kp,
            cos_theta: cos,
            values,
            max_rel_deviation: point_dev,
            worst_pair,
        });
    }

    let pass = failures.is_empty() && max_dev <= threshold;
    let summary = ValidationSummary {
        points: points.len(),
        representations: reps.iter().map(ToString::to_string).collect(),
        max_rel_deviation: max_dev,
        threshold,
        evaluation_failures: failures.len(),
        pass,
    };

    if let Some(path) = args.output.as_deref() {
        #[derive(Serialize)]
        struct Report<'a> {
            config: &'a ConfigEcho,
            points: &'a [ValidatedPoint],
            failures: &'a [ValidationFailure],
            summary: &'a ValidationSummary,
        }
        let mut text = serde_json::to_string_pretty(&Report {
            config: &echo,
            points: &points,
            failures: &failures,
            summary: &summary,
        })
        .map_err(|e| CliError::Io(format!("JSON encoding failed: {e}")))?;
        text.push('\n');
        emit(Some(path), &text)?;
    }

    println!(
        "validate: gamma = {}, {} grid points, representations: {}",
        ctx.gamma,
        points.len(),
        summary.representations.join(", ")
    );
    println!(
        "max pairwise relative deviation = {} (threshold {})",
        g17(max_dev),
        g17(threshold)
    );
    if let Some((k, kp, cos, pair)) = &worst_point {
        println!(
            "worst point: k = {}, k' = {}, cos_theta = {}, pair = {pair}",
            g17(*k),
            g17(*kp),
            g17(*cos)
        );
    }
    for f in failures.iter().take(5) {
        println!(
            "failure: k = {}, k' = {}, cos_theta = {}, {}: {}",
            g17(f.k),
            g17(f.kprime),
            g17(f.cos_theta),
            f.representation,
            f.error
        );
    }

    if !failures.is_empty() {
        println!("FAIL ({} evaluation failures)", failures.len());
        return Err(CliError::Eval(format!(
            "{} of {} evaluations failed",
            failures.len(),
            points.len() * reps.len()
        )));
    }
    if !pass {
        println!("FAIL");
        return Err(CliError::ValidationFailed(format!(
            "max relative deviation {} exceeds threshold {}",
            g17(max_dev),
            g17(threshold)
        )));
    }
    println!("PASS");
    Ok(())
}

#[derive(Serialize, Clone, Copy)]
struct PartialWaveRow {
    l: u32,
    k: f64,
    kprime: f64,
    t_l: f64,
    error_estimate: f64,
}

const PARTIAL_WAVE_HEADER: &str = "l,k,kprime,t_l,error_estimate";

pub fn partial_wave(args: PartialWaveArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let mut echo = ConfigEcho::new();
    let ctx = resolve_context(&args.context, &file, &mut echo)?;
    let spec = resolve_tols(&args.tols, &file, &mut echo)?;

    let k_list = match args.k {
        Some(v) => v,
        None => file
            .get_list("k")?
            .ok_or_else(|| CliError::Usage("missing required --k list".into()))?,
    };
    let kp_list = match args.kp {
        Some(v) => v,
        None => file
            .get_list("kp")?
            .ok_or_else(|| CliError::Usage("missing required --kp list".into()))?,
    };
    let l_min = match args.l_min {
        Some(v) => v,
        None => file.get("l-min")?.unwrap_or(0),
    };
    let l_max = match args.l_max {
        Some(v) => v,
        None => file.get("l-max")?.unwrap_or(4),
    };
    if l_min > l_max {
        return Err(CliError::Usage(format!(
            "l range is empty: l-min = {l_min}, l-max = {l_max}"
        )));
    }
    let rep_name = match args.rep {
        Some(r) => r,
        None => file
            .get::<String>("rep")?
            .unwrap_or_else(|| default_rep_for(ctx.gamma)),
    };
    let rep = parse_rep(&rep_name)?;
    let format = resolve_format(args.format, &file, &mut echo)?;

    output::echo_f64_list(&mut echo, "k", &k_list);
    output::echo_f64_list(&mut echo, "kp", &kp_list);
    echo_str(&mut echo, "l-min", l_min);
    echo_str(&mut echo, "l-max", l_max);
    echo_str(&mut echo, "rep", rep);

    let mut jobs = Vec::new();
    for &k in &k_list {
        for &kp in &kp_list {
            for l in l_min..=l_max {
                jobs.push((l, k, kp));
            }
        }
    }
    let results: Vec<Result<PartialWaveRow, String>> = jobs
        .par_iter()
        .map(|&(l, k, kp)| {
            let req = PartialWaveRequest {
                l,
                k,
                kprime: kp,
                ctx,
                kind: rep,
                spec,
            };
            project_partial_wave(&req)
                .map(|(t_l, error_estimate)| PartialWaveRow {
                    l,
                    k,
                    kprime: kp,
                    t_l,
                    error_estimate,
                })
                .map_err(|e| e.to_string())
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    for (job, result) in jobs.iter().zip(results) {
        match result {
            Ok(row) => rows.push(row),
            Err(msg) => {
                return Err(CliError::Eval(format!(
                    "at l = {}, k = {}, k' = {}: {msg}",
                    job.0, job.1, job.2
                )))
            }
        }
    }

    #[derive(Serialize)]
    struct Summary {
        rows: usize,
        max_error_estimate: f64,
    }
    let summary = Summary {
        rows: rows.len(),
        max_error_estimate: rows.iter().map(|r| r.error_estimate).fold(0.0, f64::max),
    };
    let content = match format {
        OutputFormat::Csv => {
            let lines: Vec<String> = rows
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{}",
                        r.l,
                        g17(r.k),
                        g17(r.kprime),
                        g17(r.t_l),
                        g17(r.error_estimate)
                    )
                })
                .collect();
            csv_document("ctmat partial-wave", &echo, PARTIAL_WAVE_HEADER, &lines)
        }
        OutputFormat::Json => json_document(&echo, &rows, &summary)?,
    };
    emit(args.output.as_deref(), &content)
}

fn default_rep_for(gamma: f64) -> String {
    if (gamma + 1.0).abs() < 1e-9 {
        "generalized-closed".into()
    } else {
        "series".into()
    }
}
