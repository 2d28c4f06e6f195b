//! Face polynomials, face ideals, and the sos-nondegeneracy decision.
//!
//! Nondegeneracy asks, for every compact face of the Newton polyhedron,
//! whether the face ideal has a real zero with all coordinates nonzero.
//! The decision runs in three tiers: monomial face ideals pass outright;
//! a unit coordinate-saturation certifies complex (hence real) torus
//! emptiness; otherwise a seeded multi-start damped least-squares search
//! hunts for a witness. A face that survives all three tiers leaves the
//! verdict inconclusive rather than guessed.

use crate::algebra::{
    is_unit_ideal, saturate_by_coordinates_budgeted, Exponent, Ideal, Polynomial,
};
use crate::polyhedra::{newton_polyhedron, newton_polyhedron_of_exponents, Face};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Outcome of the decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NondegenStatus {
    Nondegenerate,
    Degenerate,
    Inconclusive,
}

/// Verdict with the witness data that certifies a `Degenerate` status.
#[derive(Debug, Clone)]
pub struct NondegeneracyVerdict {
    pub status: NondegenStatus,
    /// Point with all coordinates nonzero at which every face-ideal
    /// generator vanishes within tolerance.
    pub witness: Option<Vec<f64>>,
    pub failing_face: Option<Face>,
    pub checked_faces: usize,
}

/// Budgets and tolerances for the witness search; defaults are deterministic.
#[derive(Debug, Clone)]
pub struct NondegenConfig {
    pub starts: usize,
    pub max_steps: usize,
    pub seed: u64,
    /// Residual tolerance: `|f(w)| <= residual_tol * (1 + |w|^deg f)`.
    pub residual_tol: f64,
    /// Coordinates below this magnitude do not count as torus points.
    pub coord_floor: f64,
    /// A witness must also exhibit genuine cancellation: the residual must
    /// be this small relative to the largest term magnitude, or scaling
    /// limits toward the origin would fake zeros of positive polynomials.
    pub cancellation_tol: f64,
    /// Pair-reduction budget for the saturation tier; exhaustion falls
    /// through to the numeric tier.
    pub saturation_budget: Option<usize>,
}

impl Default for NondegenConfig {
    fn default() -> Self {
        NondegenConfig {
            starts: 200,
            max_steps: 100,
            seed: 0,
            residual_tol: 1e-9,
            coord_floor: 1e-6,
            cancellation_tol: 1e-7,
            saturation_budget: Some(20_000),
        }
    }
}

/// Terms of `f` lying on the face: `<normal, alpha> == offset`.
///
/// The face must come from a Newton polyhedron containing the support of
/// `f`; terms off the supporting hyperplane are dropped exactly.
pub fn face_polynomial(f: &Polynomial, face: &Face) -> Polynomial {
    let mut out = Polynomial::zero(f.dim());
    for (e, c) in f.terms() {
        let value: BigInt = face
            .supporting_normal
            .iter()
            .zip(e.entries())
            .map(|(n, &a)| n * BigInt::from(a))
            .sum();
        if value == face.offset {
            out = out.add(&Polynomial::monomial(e.clone(), c.clone()));
        }
    }
    out
}

/// Face ideal generated by the face polynomials of the generators; `None`
/// when every face polynomial vanishes (the zero ideal).
pub fn face_ideal(ideal: &Ideal, face: &Face) -> Option<Ideal> {
    let gens: Vec<Polynomial> = ideal
        .generators()
        .iter()
        .map(|g| face_polynomial(g, face))
        .filter(|g| !g.is_zero())
        .collect();
    if gens.is_empty() {
        None
    } else {
        Some(Ideal::new(ideal.dim(), gens).expect("nonzero face polynomials"))
    }
}

/// sos-nondegeneracy of an ideal with the default configuration.
pub fn is_sos_nondegenerate(ideal: &Ideal) -> Result<NondegeneracyVerdict> {
    is_sos_nondegenerate_with(ideal, &NondegenConfig::default())
}

/// sos-nondegeneracy: every compact face of `P(I)` must have a face ideal
/// without real torus zeros.
pub fn is_sos_nondegenerate_with(
    ideal: &Ideal,
    cfg: &NondegenConfig,
) -> Result<NondegeneracyVerdict> {
    if ideal.has_constant_term() {
        return Err(Error::InvalidInput(
            "generators must have no constant term".into(),
        ));
    }
    let p = newton_polyhedron(ideal)?;
    let faces = p.compact_faces();
    let mut inconclusive = false;
    for (idx, face) in faces.iter().enumerate() {
        let Some(fi) = face_ideal(ideal, face) else {
            continue; // zero face ideal has no torus zeros
        };
        match check_face_system(fi.generators(), cfg, idx)? {
            FaceCheck::Passes => {}
            FaceCheck::Witness(w) => {
                return Ok(NondegeneracyVerdict {
                    status: NondegenStatus::Degenerate,
                    witness: Some(w),
                    failing_face: Some(face.clone()),
                    checked_faces: faces.len(),
                });
            }
            FaceCheck::Unknown => inconclusive = true,
        }
    }
    Ok(NondegeneracyVerdict {
        status: if inconclusive {
            NondegenStatus::Inconclusive
        } else {
            NondegenStatus::Nondegenerate
        },
        witness: None,
        failing_face: None,
        checked_faces: faces.len(),
    })
}

/// Varchenko-style function nondegeneracy: for each compact face of
/// `P(f)`, the face polynomial must be non-singular on the real torus, so
/// the checked system is the face polynomial together with its gradient.
pub fn is_function_nondegenerate(f: &Polynomial) -> Result<NondegeneracyVerdict> {
    is_function_nondegenerate_with(f, &NondegenConfig::default())
}

pub fn is_function_nondegenerate_with(
    f: &Polynomial,
    cfg: &NondegenConfig,
) -> Result<NondegeneracyVerdict> {
    if !f.constant_term().is_zero() {
        return Err(Error::InvalidInput("f(0) must vanish".into()));
    }
    let d = f.dim();
    let support: Vec<Exponent> = f.terms().map(|(e, _)| e.clone()).collect();
    let p = newton_polyhedron_of_exponents(d, &support)?;
    let faces = p.compact_faces();
    let mut inconclusive = false;
    for (idx, face) in faces.iter().enumerate() {
        let fg = face_polynomial(f, face);
        if fg.is_zero() {
            continue;
        }
        let mut system = vec![fg.clone()];
        for j in 0..d {
            let dj = fg.partial_derivative(j);
            if !dj.is_zero() {
                system.push(dj);
            }
        }
        match check_face_system(&system, cfg, idx)? {
            FaceCheck::Passes => {}
            FaceCheck::Witness(w) => {
                return Ok(NondegeneracyVerdict {
                    status: NondegenStatus::Degenerate,
                    witness: Some(w),
                    failing_face: Some(face.clone()),
                    checked_faces: faces.len(),
                });
            }
            FaceCheck::Unknown => inconclusive = true,
        }
    }
    Ok(NondegeneracyVerdict {
        status: if inconclusive {
            NondegenStatus::Inconclusive
        } else {
            NondegenStatus::Nondegenerate
        },
        witness: None,
        failing_face: None,
        checked_faces: faces.len(),
    })
}

enum FaceCheck {
    Passes,
    Witness(Vec<f64>),
    Unknown,
}

fn check_face_system(
    system: &[Polynomial],
    cfg: &NondegenConfig,
    face_idx: usize,
) -> Result<FaceCheck> {
    // tier 1: monomials never vanish on the torus
    if system.iter().all(|g| g.is_monomial()) {
        return Ok(FaceCheck::Passes);
    }
    // tier 2: complex emptiness via coordinate saturation (sufficient)
    let dim = system[0].dim();
    let ideal = Ideal::new(dim, system.to_vec())?;
    match saturate_by_coordinates_budgeted(&ideal, cfg.saturation_budget) {
        Ok(sat) => {
            if is_unit_ideal(&sat) {
                return Ok(FaceCheck::Passes);
            }
        }
        Err(Error::BudgetExhausted(_)) => {}
        Err(e) => return Err(e),
    }
    // tier 3: seeded multi-start search for a real torus zero
    match search_torus_zero(system, cfg, face_idx) {
        Some(w) => Ok(FaceCheck::Witness(w)),
        None => Ok(FaceCheck::Unknown),
    }
}

/// True when every generator satisfies the witness residual criterion and
/// all coordinates clear the floor.
pub fn witness_is_valid(system: &[Polynomial], point: &[f64], cfg: &NondegenConfig) -> bool {
    if point
        .iter()
        .any(|x| x.abs() <= cfg.coord_floor || !x.is_finite())
    {
        return false;
    }
    let norm = point.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    system.iter().all(|g| {
        let value = g.eval_f64(point).abs();
        let scale = 1.0 + norm.powi(g.total_degree() as i32);
        if value > cfg.residual_tol * scale {
            return false;
        }
        // genuine cancellation between terms, not a scaling limit toward
        // the origin (positive polynomials admit no such cancellation)
        let max_term = g
            .terms()
            .map(|(e, c)| {
                let mut t = crate::algebra::rat_to_f64(c).abs();
                for (j, &k) in e.entries().iter().enumerate() {
                    t *= point[j].abs().powi(k as i32);
                }
                t
            })
            .fold(0.0f64, f64::max);
        value <= cfg.cancellation_tol * max_term
    })
}

/// Deterministic multi-start damped least-squares search for a torus zero
/// of the system; the per-face seed keeps results independent of
/// scheduling.
fn search_torus_zero(
    system: &[Polynomial],
    cfg: &NondegenConfig,
    face_idx: usize,
) -> Option<Vec<f64>> {
    let d = system[0].dim();
    let seed = cfg.seed ^ (face_idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cfg.starts {
        let start: Vec<f64> = (0..d)
            .map(|_| {
                let mag = 10f64.powf(rng.random_range(-2.0..2.0));
                if rng.random::<bool>() {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        if let Some(w) = polish_torus_zero(system, &start, cfg) {
            return Some(w);
        }
    }
    None
}

/// Damped Gauss-Newton (Levenberg) refinement from a given start; returns
/// a validated witness or nothing.
pub fn polish_torus_zero(
    system: &[Polynomial],
    start: &[f64],
    cfg: &NondegenConfig,
) -> Option<Vec<f64>> {
    let d = start.len();
    let r = system.len();
    let derivs: Vec<Vec<Polynomial>> = system
        .iter()
        .map(|g| (0..d).map(|j| g.partial_derivative(j)).collect())
        .collect();
    let mut x = start.to_vec();
    let mut mu = 1e-3f64;
    let sq = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>();
    let mut res: Vec<f64> = system.iter().map(|g| g.eval_f64(&x)).collect();
    let mut f = sq(&res);
    for _ in 0..cfg.max_steps {
        if witness_is_valid(system, &x, cfg) {
            return Some(x);
        }
        // J^T J + mu I, J^T r
        let jac: Vec<Vec<f64>> = derivs
            .iter()
            .map(|row| row.iter().map(|p| p.eval_f64(&x)).collect())
            .collect();
        let mut jtj = vec![vec![0.0; d]; d];
        let mut jtr = vec![0.0; d];
        for k in 0..r {
            for i in 0..d {
                jtr[i] += jac[k][i] * res[k];
                for j in 0..d {
                    jtj[i][j] += jac[k][i] * jac[k][j];
                }
            }
        }
        let mut accepted = false;
        for _ in 0..8 {
            let mut m = jtj.clone();
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += mu;
            }
            let Some(step) = solve_dense(&m, &jtr) else {
                mu *= 4.0;
                continue;
            };
            let cand: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a - s).collect();
            let cres: Vec<f64> = system.iter().map(|g| g.eval_f64(&cand)).collect();
            let cf = sq(&cres);
            if cf.is_finite() && cf < f {
                x = cand;
                res = cres;
                f = cf;
                mu = (mu / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            mu *= 4.0;
        }
        if !accepted {
            break;
        }
    }
    if witness_is_valid(system, &x, cfg) {
        Some(x)
    } else {
        None
    }
}

fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (pivot, pv) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if pv < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..n {
            s -= m[i][j] * x[j];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

impl NondegeneracyVerdict {
    /// JSON form per the external interface.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "status": match self.status {
                NondegenStatus::Nondegenerate => "nondegenerate",
                NondegenStatus::Degenerate => "degenerate",
                NondegenStatus::Inconclusive => "inconclusive",
            },
            "witness": self.witness,
            "face": self.failing_face.as_ref().map(|f| serde_json::json!({
                "normal": f.supporting_normal.iter().map(|n| n.to_string()).collect::<Vec<_>>(),
                "generators": f.active_generators.iter().map(|g| g.entries().to_vec()).collect::<Vec<_>>(),
                "dim": f.dim,
            })),
            "checked_faces": self.checked_faces,
        })
    }
}
