//! Command-line surface: deterministic, scriptable JSON in and out.
//!
//! Exit codes: 0 on success, 2 on unsupported input (boundary/region kinds
//! the toolkit refuses to guess about), 1 on any other error.

use crate::algebra::{parse_polynomial, rat_from_str, rat_to_string, Exponent, Ideal, IdealJson};
use crate::asympt::{laplace_coeffs, zeta_monomial_box};
use crate::models::{
    classify_332, egg132_table, em_fit, mixture_332_model, region_from_json, score_bic, score_rlct,
    ClassifyConfig, ContingencyTable, DiscreteModel, EGG132_LOG_MARGINAL_EXACT,
};
use crate::nondegen::{is_function_nondegenerate_with, is_sos_nondegenerate_with, NondegenConfig};
use crate::numeric::{fit_lambda_theta, laplace_value, FitConvention, QuadConfig, Region};
use crate::polyhedra::newton_polyhedron;
use crate::rlct::{rlct_newton_bound_with, rlct_region_orthant_chain};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;

#[derive(Parser)]
#[command(
    name = "rlctkit",
    about = "Real log canonical thresholds of polynomial ideals",
    version
)]
pub struct CliArgs {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every randomized component.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct IdealArg {
    /// Ideal as JSON `{"vars": [...], "gens": ["...", ...]}` or `@file`.
    #[arg(long)]
    ideal: String,
}

#[derive(Subcommand)]
enum Command {
    /// Newton polyhedron of an ideal: minimal generators and facets.
    Newton(IdealArg),
    /// RLCT Newton bound of an ideal with a monomial amplitude.
    Rlct {
        #[command(flatten)]
        ideal: IdealArg,
        /// Amplitude exponent, comma separated (defaults to zeros).
        #[arg(long)]
        tau: Option<String>,
        /// Chain region: ordered variable names, e.g. `x,y` for 0<=x<=y.
        #[arg(long)]
        chain: Option<String>,
    },
    /// sos-nondegeneracy of an ideal (or function nondegeneracy with --poly).
    Nondegen {
        /// Ideal JSON or `@file`.
        #[arg(long, conflicts_with = "poly")]
        ideal: Option<String>,
        /// Single polynomial `{"vars": [...], "poly": "..."}` or `@file`;
        /// checks Varchenko function nondegeneracy instead.
        #[arg(long)]
        poly: Option<String>,
        /// Multi-start budget for the witness search.
        #[arg(long, default_value_t = 200)]
        starts: usize,
        /// Pair-reduction budget for the saturation tier.
        #[arg(long, default_value_t = 20_000)]
        saturation_budget: usize,
    },
    /// Principal parts and Laplace coefficients of a monomial box zeta.
    Asympt {
        /// Monomial exponent kappa, comma separated.
        #[arg(long)]
        kappa: String,
        /// Amplitude exponent tau (defaults to zeros).
        #[arg(long)]
        tau: Option<String>,
        /// Box radius as an exact rational (default 1).
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Sample Z(N) by quadrature/QMC and fit (lambda, theta).
    LaplaceFit {
        #[command(flatten)]
        ideal: IdealArg,
        /// Region JSON (default: unit box).
        #[arg(long)]
        region: Option<String>,
        /// Number of N values, log-spaced.
        #[arg(long, default_value_t = 12)]
        n_grid: usize,
        #[arg(long, default_value_t = 1e2)]
        n_min: f64,
        #[arg(long, default_value_t = 1e6)]
        n_max: f64,
        /// Slope convention for the fitted lambda.
        #[arg(long, value_enum, default_value_t = Convention::Ideal)]
        convention: Convention,
        /// Optional CSV output path for the (N, Z, stderr) samples.
        #[arg(long)]
        csv: Option<String>,
        /// Gauss-Legendre nodes per panel and axis.
        #[arg(long, default_value_t = 12)]
        quad_order: usize,
        /// Panel budget for adaptive refinement.
        #[arg(long, default_value_t = 30_000)]
        max_panels: usize,
        /// Relative error target for the quadrature.
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
    },
    /// Fit the two-class mixture to a 3x3 table by EM.
    ModelEm {
        /// Table CSV (9 counts) or `@file`; defaults to the built-in
        /// 132-patient table.
        #[arg(long)]
        table: Option<String>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
    },
    /// Classify a 3x3 distribution by stratum and learning coefficient.
    ModelClassify {
        /// Row-major 9 probabilities, JSON array or `@file`.
        #[arg(long)]
        q: String,
        /// Zero-pattern tolerance.
        #[arg(long, default_value_t = 1e-9)]
        zero_tol: f64,
    },
    /// Full pipeline on a table: EM fit, stratum, BIC and RLCT scores.
    ModelScore {
        #[arg(long)]
        table: Option<String>,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Model dimension for the BIC term.
        #[arg(long, default_value_t = 9)]
        dim: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Function,
    Ideal,
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match CliArgs::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&args) {
        Ok(value) => {
            emit(&value, args.format);
            0
        }
        Err(Error::UnsupportedBoundary(msg)) | Err(Error::UnsupportedRegion(msg)) => {
            eprintln!("unsupported: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn emit(value: &serde_json::Value, format: Format) {
    let text = match format {
        Format::Json => {
            let mut t = serde_json::to_string_pretty(value).expect("serializable");
            t.push('\n');
            t
        }
        Format::Text => {
            let mut out = String::new();
            render_text(value, "", &mut out);
            out
        }
    };
    // tolerate a closed pipe (e.g. `rlctkit ... | head`)
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn render_text(v: &serde_json::Value, prefix: &str, out: &mut String) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                render_text(val, &key, out);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, val) in items.iter().enumerate() {
                render_text(val, &format!("{prefix}[{i}]"), out);
            }
        }
        other => {
            out.push_str(prefix);
            out.push_str(" = ");
            out.push_str(&other.to_string());
            out.push('\n');
        }
    }
}

fn read_inline_or_file(s: &str) -> Result<String> {
    if let Some(path) = s.strip_prefix('@') {
        return std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")));
    }
    // bare filenames are accepted when they cannot be inline JSON
    let looks_inline = s.trim_start().starts_with(['{', '[']) || s.contains(',');
    if !looks_inline && std::path::Path::new(s).is_file() {
        return std::fs::read_to_string(s)
            .map_err(|e| Error::InvalidInput(format!("cannot read {s}: {e}")));
    }
    Ok(s.to_string())
}

fn parse_ideal_arg(s: &str) -> Result<(Ideal, Vec<String>)> {
    let text = read_inline_or_file(s)?;
    let jd: IdealJson = serde_json::from_str(&text)?;
    jd.to_ideal()
}

fn parse_exponent(s: Option<&str>, dim: usize) -> Result<Exponent> {
    match s {
        None => Ok(Exponent::zero(dim)),
        Some(text) => {
            let entries: Vec<u32> = text
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::InvalidInput(format!("bad exponent `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if entries.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: entries.len(),
                });
            }
            Ok(Exponent::new(entries))
        }
    }
}

fn thread_cap() -> usize {
    std::env::var("RLCTKIT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn parse_table_arg(table: &Option<String>) -> Result<ContingencyTable> {
    match table {
        None => Ok(egg132_table()),
        Some(s) => ContingencyTable::from_csv(&read_inline_or_file(s)?),
    }
}

fn dispatch(args: &CliArgs) -> Result<serde_json::Value> {
    match &args.command {
        Command::Newton(iarg) => {
            let (ideal, _) = parse_ideal_arg(&iarg.ideal)?;
            let p = newton_polyhedron(&ideal)?;
            Ok(p.to_json())
        }
        Command::Rlct { ideal, tau, chain } => {
            let (ideal, vars) = parse_ideal_arg(&ideal.ideal)?;
            let tau = parse_exponent(tau.as_deref(), ideal.dim())?;
            let pair = match chain {
                None => {
                    let cfg = NondegenConfig {
                        seed: args.seed,
                        ..NondegenConfig::default()
                    };
                    rlct_newton_bound_with(&ideal, &tau, &cfg)?
                }
                Some(chain_text) => {
                    if ideal.generators().len() != 1 || !ideal.is_monomial() {
                        return Err(Error::UnsupportedRegion(
                            "chain regions support single-monomial ideals".into(),
                        ));
                    }
                    let order: Vec<usize> = chain_text
                        .split(',')
                        .map(|name| {
                            vars.iter()
                                .position(|v| v == name.trim())
                                .ok_or_else(|| Error::UnknownVariable(name.trim().to_string()))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let (kappa, _) = ideal.generators()[0].terms().next().expect("monomial");
                    rlct_region_orthant_chain(kappa, &order)?
                }
            };
            if pair.is_infinite() {
                eprintln!(
                    "warning: the ideal does not vanish at the origin; the threshold is infinite"
                );
            }
            let mut out = pair.to_json();
            // inexact pairs are upper bounds; make the relation explicit
            out["relation"] = serde_json::json!(if pair.exact { "=" } else { "<=" });
            Ok(out)
        }
        Command::Nondegen {
            ideal,
            poly,
            starts,
            saturation_budget,
        } => {
            let cfg = NondegenConfig {
                starts: *starts,
                seed: args.seed,
                saturation_budget: Some(*saturation_budget),
                ..NondegenConfig::default()
            };
            let verdict = match (ideal, poly) {
                (Some(i), None) => {
                    let (ideal, _) = parse_ideal_arg(i)?;
                    is_sos_nondegenerate_with(&ideal, &cfg)?
                }
                (None, Some(p)) => {
                    let text = read_inline_or_file(p)?;
                    let v: serde_json::Value = serde_json::from_str(&text)?;
                    let vars: Vec<String> = serde_json::from_value(v["vars"].clone())?;
                    let f = parse_polynomial(
                        v["poly"]
                            .as_str()
                            .ok_or_else(|| Error::InvalidInput("missing poly".into()))?,
                        &vars,
                    )?;
                    is_function_nondegenerate_with(&f, &cfg)?
                }
                _ => {
                    return Err(Error::InvalidInput(
                        "pass exactly one of --ideal / --poly".into(),
                    ))
                }
            };
            Ok(verdict.to_json())
        }
        Command::Asympt {
            kappa,
            tau,
            epsilon,
        } => {
            let kappa_entries: Vec<u32> = kappa
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::InvalidInput(format!("bad kappa `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            let dim = kappa_entries.len();
            let kappa = Exponent::new(kappa_entries);
            let tau = parse_exponent(tau.as_deref(), dim)?;
            let eps = match epsilon {
                None => crate::algebra::rat_int(1),
                Some(e) => rat_from_str(e)?,
            };
            let pp = zeta_monomial_box(&kappa, &tau, &eps)?;
            let series = laplace_coeffs(&pp)?;
            let (alpha, order) = pp.smallest_pole().expect("kappa nonzero has poles");
            Ok(serde_json::json!({
                "poles": pp.to_json()["poles"],
                "laplace": series.to_json(),
                "smallest_pole": {"lambda": rat_to_string(alpha), "theta": order},
            }))
        }
        Command::LaplaceFit {
            ideal,
            region,
            n_grid,
            n_min,
            n_max,
            convention,
            csv,
            quad_order,
            max_panels,
            rel_tol,
        } => {
            let (ideal, _) = parse_ideal_arg(&ideal.ideal)?;
            let region = match region {
                None => Region::Box {
                    upper: vec![1.0; ideal.dim()],
                },
                Some(r) => region_from_json(&serde_json::from_str(&read_inline_or_file(r)?)?)?,
            };
            if *n_grid < 8 {
                return Err(Error::InvalidInput("need at least 8 grid points".into()));
            }
            let cfg = QuadConfig {
                seed: args.seed,
                order: *quad_order,
                max_panels: *max_panels,
                rel_tol: *rel_tol,
                ..QuadConfig::default()
            };
            let mut samples = Vec::with_capacity(*n_grid);
            for i in 0..*n_grid {
                let t = i as f64 / (*n_grid as f64 - 1.0);
                let n = n_min * (n_max / n_min).powf(t);
                let est = laplace_value(ideal.generators(), &region, n, &cfg)?;
                samples.push((n, est.value, est.stderr, est.budget_exhausted));
            }
            if let Some(path) = csv {
                let mut file = std::fs::File::create(path)
                    .map_err(|e| Error::InvalidInput(format!("cannot write {path}: {e}")))?;
                writeln!(file, "N,Z,stderr").ok();
                for (n, z, se, _) in &samples {
                    writeln!(file, "{n},{z},{se}").ok();
                }
            }
            let fit_samples: Vec<(f64, f64)> =
                samples.iter().map(|(n, z, _, _)| (*n, *z)).collect();
            let conv = match convention {
                Convention::Function => FitConvention::FunctionExponent,
                Convention::Ideal => FitConvention::IdealExponent,
            };
            let fit = fit_lambda_theta(&fit_samples, conv)?;
            Ok(serde_json::json!({
                "samples": samples.iter().map(|(n, z, se, flagged)| serde_json::json!({"n": n, "z": z, "stderr": se, "budget_exhausted": flagged})).collect::<Vec<_>>(),
                "fit": {
                    "lambda_hat": fit.lambda_hat,
                    "theta_hat": fit.theta_hat,
                    "residual": fit.residual,
                    "convention": match conv { FitConvention::FunctionExponent => "function-exponent -z", FitConvention::IdealExponent => "ideal-exponent -z/2" },
                },
            }))
        }
        Command::ModelEm { table, restarts } => {
            let table = parse_table_arg(table)?;
            let fit = em_fit(&table, *restarts, args.seed, thread_cap())?;
            Ok(serde_json::json!({
                "parameters": fit.parameters,
                "loglik": fit.loglik,
                "q": fit.q,
                "restarts_used": fit.restarts_used,
                "t_identifiable": fit.t_identifiable,
            }))
        }
        Command::ModelClassify { q, zero_tol } => {
            let text = read_inline_or_file(q)?;
            let flat: Vec<f64> = serde_json::from_str(&text)?;
            if flat.len() != 9 {
                return Err(Error::InvalidInput(
                    "q must have 9 entries (row-major 3x3)".into(),
                ));
            }
            let mut m = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] = flat[3 * i + j];
                }
            }
            let cfg = ClassifyConfig {
                zero_tol: *zero_tol,
                ..ClassifyConfig::default()
            };
            let (stratum, pair) = classify_332(&m, &cfg)?;
            Ok(serde_json::json!({
                "stratum": stratum.as_str(),
                "lambda": pair.to_json()["lambda"],
                "theta": pair.to_json()["theta"],
            }))
        }
        Command::ModelScore {
            table,
            restarts,
            dim,
        } => {
            let table = parse_table_arg(table)?;
            let fit = em_fit(&table, *restarts, args.seed, thread_cap())?;
            let mut qm = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    qm[i][j] = fit.q[3 * i + j];
                }
            }
            let (stratum, pair) = classify_332(&qm, &ClassifyConfig::default())?;
            let bic = score_bic(&table, &fit.q, *dim)?;
            let rl = score_rlct(&table, &fit.q, &pair)?;
            let mut report = serde_json::json!({
                "loglik": fit.loglik,
                "bic": bic,
                "rlct": rl,
                "pair": pair.to_json(),
                "stratum": stratum.as_str(),
                "t_identifiable": fit.t_identifiable,
            });
            if table.counts() == egg132_table().counts() {
                report["reference_exact"] = serde_json::json!(EGG132_LOG_MARGINAL_EXACT);
                report["rlct_closer_than_bic"] = serde_json::json!(
                    (rl - EGG132_LOG_MARGINAL_EXACT).abs()
                        < (bic - EGG132_LOG_MARGINAL_EXACT).abs()
                );
            }
            Ok(report)
        }
    }
}

/// The built-in mixture model, exposed so scripts can dump its JSON form.
pub fn builtin_model() -> DiscreteModel {
    mixture_332_model()
}
