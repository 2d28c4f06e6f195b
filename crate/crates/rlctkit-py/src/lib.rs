//! Python bindings: the main types and operations of `rlctkit`.
//!
//! Structured results cross the boundary as JSON strings so the Python
//! side can `json.loads` them without a bespoke type layer.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rlctkit::algebra::{rat_from_str, Exponent, IdealJson};
use rlctkit::models::{
    classify_332, em_fit, mixture_332_model, score_bic, score_rlct, ClassifyConfig,
    ContingencyTable, EGG132_LOG_MARGINAL_EXACT,
};
use rlctkit::nondegen::is_sos_nondegenerate;
use rlctkit::numeric::{fit_lambda_theta, laplace_value, FitConvention, QuadConfig};
use rlctkit::polyhedra::newton_polyhedron;
use rlctkit::rlct;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_ideal(ideal_json: &str) -> PyResult<(rlctkit::algebra::Ideal, Vec<String>)> {
    let jd: IdealJson = serde_json::from_str(ideal_json).map_err(err)?;
    jd.to_ideal().map_err(err)
}

/// Canonical form of a polynomial over the given variables.
#[pyfunction]
fn parse_polynomial(text: &str, vars: Vec<String>) -> PyResult<String> {
    let p = rlctkit::algebra::parse_polynomial(text, &vars).map_err(err)?;
    Ok(p.to_text(&vars))
}

/// Newton polyhedron of an ideal as JSON (generators and facets).
#[pyfunction]
fn newton(ideal_json: &str) -> PyResult<String> {
    let (ideal, _) = parse_ideal(ideal_json)?;
    let p = newton_polyhedron(&ideal).map_err(err)?;
    Ok(p.to_json().to_string())
}

/// RLCT Newton bound of an ideal with monomial amplitude `tau`; returns
/// `{"lambda": "a/b" | "inf", "theta": n | null, "exact": bool}` as JSON.
#[pyfunction]
#[pyo3(signature = (ideal_json, tau=None))]
fn rlct_newton_bound(ideal_json: &str, tau: Option<Vec<u32>>) -> PyResult<String> {
    let (ideal, _) = parse_ideal(ideal_json)?;
    let tau = Exponent::new(tau.unwrap_or_else(|| vec![0; ideal.dim()]));
    let pair = rlct::rlct_newton_bound(&ideal, &tau).map_err(err)?;
    Ok(pair.to_json().to_string())
}

/// Exact RLCT of a monomial: `("a/b", theta)`.
#[pyfunction]
fn rlct_monomial(kappa: Vec<u32>, tau: Vec<u32>) -> PyResult<(String, Option<usize>)> {
    if kappa.len() != tau.len() {
        return Err(PyValueError::new_err(
            "kappa and tau must have equal length",
        ));
    }
    let pair = rlct::rlct_monomial(&Exponent::new(kappa), &Exponent::new(tau));
    let lambda = pair
        .lambda()
        .map(rlctkit::algebra::rat_to_string)
        .unwrap_or_else(|| "inf".into());
    Ok((lambda, pair.theta()))
}

/// RLCT of a monomial over a chain region `0 <= w_{c1} <= w_{c2} <= ...`.
#[pyfunction]
fn rlct_chain(kappa: Vec<u32>, chain: Vec<usize>) -> PyResult<(String, Option<usize>)> {
    let pair = rlct::rlct_region_orthant_chain(&Exponent::new(kappa), &chain).map_err(err)?;
    let lambda = pair
        .lambda()
        .map(rlctkit::algebra::rat_to_string)
        .unwrap_or_else(|| "inf".into());
    Ok((lambda, pair.theta()))
}

/// sos-nondegeneracy verdict of an ideal as JSON.
#[pyfunction]
fn nondegenerate(ideal_json: &str) -> PyResult<String> {
    let (ideal, _) = parse_ideal(ideal_json)?;
    let verdict = is_sos_nondegenerate(&ideal).map_err(err)?;
    Ok(verdict.to_json().to_string())
}

/// Principal parts and Laplace coefficients of the monomial box zeta.
#[pyfunction]
#[pyo3(signature = (kappa, tau=None, epsilon=None))]
fn asympt(kappa: Vec<u32>, tau: Option<Vec<u32>>, epsilon: Option<String>) -> PyResult<String> {
    let dim = kappa.len();
    let kappa = Exponent::new(kappa);
    let tau = Exponent::new(tau.unwrap_or_else(|| vec![0; dim]));
    let eps = match epsilon {
        None => rlctkit::algebra::rat_int(1),
        Some(e) => rat_from_str(&e).map_err(err)?,
    };
    let pp = rlctkit::asympt::zeta_monomial_box(&kappa, &tau, &eps).map_err(err)?;
    let series = rlctkit::asympt::laplace_coeffs(&pp).map_err(err)?;
    Ok(serde_json::json!({
        "poles": pp.to_json()["poles"],
        "laplace": series.to_json(),
    })
    .to_string())
}

/// Stratum and learning coefficient of a 3x3 distribution (row-major).
#[pyfunction]
fn classify_3x3(q: Vec<f64>) -> PyResult<(String, String, usize)> {
    if q.len() != 9 {
        return Err(PyValueError::new_err("q must have 9 entries"));
    }
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = q[3 * i + j];
        }
    }
    let (stratum, pair) = classify_332(&m, &ClassifyConfig::default()).map_err(err)?;
    Ok((
        stratum.as_str().to_string(),
        rlctkit::algebra::rat_to_string(pair.lambda().unwrap()),
        pair.theta().unwrap(),
    ))
}

/// EM fit of the two-class mixture on a 3x3 table of counts.
#[pyfunction]
#[pyo3(signature = (counts, restarts=32, seed=0))]
fn mixture_em(counts: Vec<u64>, restarts: usize, seed: u64) -> PyResult<String> {
    let table = ContingencyTable::new(counts).map_err(err)?;
    let fit = em_fit(&table, restarts, seed, 1).map_err(err)?;
    Ok(serde_json::json!({
        "parameters": fit.parameters,
        "loglik": fit.loglik,
        "q": fit.q,
        "t_identifiable": fit.t_identifiable,
    })
    .to_string())
}

/// Full pipeline on a 3x3 table: EM, stratum, BIC and RLCT scores.
#[pyfunction]
#[pyo3(signature = (counts, restarts=32, seed=0))]
fn mixture_score(counts: Vec<u64>, restarts: usize, seed: u64) -> PyResult<String> {
    let table = ContingencyTable::new(counts).map_err(err)?;
    let fit = em_fit(&table, restarts, seed, 1).map_err(err)?;
    let mut qm = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            qm[i][j] = fit.q[3 * i + j];
        }
    }
    let (stratum, pair) = classify_332(&qm, &ClassifyConfig::default()).map_err(err)?;
    let bic = score_bic(&table, &fit.q, 9).map_err(err)?;
    let rl = score_rlct(&table, &fit.q, &pair).map_err(err)?;
    Ok(serde_json::json!({
        "loglik": fit.loglik,
        "bic": bic,
        "rlct": rl,
        "stratum": stratum.as_str(),
        "lambda": rlctkit::algebra::rat_to_string(pair.lambda().unwrap()),
        "theta": pair.theta(),
    })
    .to_string())
}

/// Reference exact log marginal likelihood of the built-in table.
#[pyfunction]
fn egg132_reference() -> f64 {
    EGG132_LOG_MARGINAL_EXACT
}

/// The built-in mixture model as JSON.
#[pyfunction]
fn builtin_model() -> String {
    mixture_332_model().to_json().to_string()
}

/// Sample Z(N) for an ideal over the unit box and fit (lambda, theta).
#[pyfunction]
#[pyo3(signature = (ideal_json, n_min=1e2, n_max=1e6, n_grid=12, convention="ideal", seed=0))]
fn laplace_fit(
    ideal_json: &str,
    n_min: f64,
    n_max: f64,
    n_grid: usize,
    convention: &str,
    seed: u64,
) -> PyResult<String> {
    let (ideal, _) = parse_ideal(ideal_json)?;
    let region = rlctkit::numeric::Region::Box {
        upper: vec![1.0; ideal.dim()],
    };
    let cfg = QuadConfig {
        seed,
        ..QuadConfig::default()
    };
    let mut samples = Vec::with_capacity(n_grid);
    for i in 0..n_grid {
        let t = i as f64 / (n_grid as f64 - 1.0);
        let n = n_min * (n_max / n_min).powf(t);
        let est = laplace_value(ideal.generators(), &region, n, &cfg).map_err(err)?;
        samples.push((n, est.value));
    }
    let conv = match convention {
        "function" => FitConvention::FunctionExponent,
        _ => FitConvention::IdealExponent,
    };
    let fit = fit_lambda_theta(&samples, conv).map_err(err)?;
    Ok(serde_json::json!({
        "lambda_hat": fit.lambda_hat,
        "theta_hat": fit.theta_hat,
        "residual": fit.residual,
    })
    .to_string())
}

#[pymodule]
fn rlctkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(parse_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(newton, m)?)?;
    m.add_function(wrap_pyfunction!(rlct_newton_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rlct_monomial, m)?)?;
    m.add_function(wrap_pyfunction!(rlct_chain, m)?)?;
    m.add_function(wrap_pyfunction!(nondegenerate, m)?)?;
    m.add_function(wrap_pyfunction!(asympt, m)?)?;
    m.add_function(wrap_pyfunction!(classify_3x3, m)?)?;
    m.add_function(wrap_pyfunction!(mixture_em, m)?)?;
    m.add_function(wrap_pyfunction!(mixture_score, m)?)?;
    m.add_function(wrap_pyfunction!(egg132_reference, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_model, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_fit, m)?)?;
    Ok(())
}
