//! The RLCT pair calculus.
//!
//! Pairs `(lambda, theta)` are ordered so that `(l1, t1) > (l2, t2)` when
//! `l1 > l2`, or `l1 == l2` and `t1 < t2`; infinity is the maximum. All
//! pairs here use the ideal-zeta normalization (exponent `-z/2`); the
//! statistics layer halves lambda exactly once, in
//! [`ideal_to_learning_coefficient`].

use crate::algebra::{rat_to_string, Exponent, Ideal, Polynomial, Rat};
use crate::nondegen::{self, NondegenConfig, NondegenStatus};
use crate::polyhedra::{self, int_rank};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// `(lambda, theta)` with an exactness certificate.
///
/// `exact == false` means the value is only the Newton upper bound: the true
/// threshold is `<=` this pair in the pair order.
#[derive(Clone, PartialEq, Eq)]
pub struct RlctPair {
    lambda: Option<Rat>, // None encodes +infinity
    theta: Option<usize>,
    pub exact: bool,
}

impl RlctPair {
    pub fn finite(lambda: Rat, theta: usize, exact: bool) -> Self {
        assert!(lambda.is_positive(), "lambda must be positive");
        assert!(theta >= 1, "theta must be a positive integer");
        RlctPair {
            lambda: Some(lambda),
            theta: Some(theta),
            exact,
        }
    }

    pub fn infinite(exact: bool) -> Self {
        RlctPair {
            lambda: None,
            theta: None,
            exact,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.lambda.is_none()
    }

    pub fn lambda(&self) -> Option<&Rat> {
        self.lambda.as_ref()
    }

    pub fn theta(&self) -> Option<usize> {
        self.theta
    }

    /// Total order of the pairs: larger lambda wins; on equal lambda the
    /// smaller theta is the larger pair.
    pub fn cmp_pair(&self, other: &RlctPair) -> Ordering {
        match (&self.lambda, &other.lambda) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Equal => other.theta.cmp(&self.theta),
                ord => ord,
            },
        }
    }

    /// JSON form `{"lambda": "a/b" | "inf", "theta": n | null, "exact": bool}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": match &self.lambda {
                Some(l) => rat_to_string(l),
                None => "inf".to_string(),
            },
            "theta": self.theta,
            "exact": self.exact,
        })
    }
}

impl fmt::Debug for RlctPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.lambda, self.theta) {
            (Some(l), Some(t)) => write!(
                f,
                "({}, {}){}",
                rat_to_string(l),
                t,
                if self.exact { "" } else { " <=" }
            ),
            _ => write!(f, "(inf, -)"),
        }
    }
}

/// Minimum of a nonempty list under the pair order. The exact flag is the
/// conjunction over all pairs attaining the minimum.
pub fn pair_min(pairs: &[RlctPair]) -> RlctPair {
    assert!(!pairs.is_empty());
    let mut min = pairs[0].clone();
    for p in &pairs[1..] {
        match p.cmp_pair(&min) {
            Ordering::Less => min = p.clone(),
            Ordering::Equal => min.exact = min.exact && p.exact,
            Ordering::Greater => {}
        }
    }
    min
}

/// RLCT of the monomial `w^kappa` with amplitude `w^tau` over the positive
/// orthant: `lambda = min_j (tau_j+1)/kappa_j`, `theta = #min`.
pub fn rlct_monomial(kappa: &Exponent, tau: &Exponent) -> RlctPair {
    assert_eq!(kappa.dim(), tau.dim());
    let mut best: Option<Rat> = None;
    let mut count = 0usize;
    for j in 0..kappa.dim() {
        let k = kappa.get(j);
        if k == 0 {
            continue;
        }
        let ratio = Rat::new(BigInt::from(tau.get(j) + 1), BigInt::from(k));
        match &best {
            None => {
                best = Some(ratio);
                count = 1;
            }
            Some(b) => match ratio.cmp(b) {
                Ordering::Less => {
                    best = Some(ratio);
                    count = 1;
                }
                Ordering::Equal => count += 1,
                Ordering::Greater => {}
            },
        }
    }
    match best {
        Some(lambda) => RlctPair::finite(lambda, count, true),
        None => RlctPair::infinite(true),
    }
}

/// Newton-polyhedron bound `(1/l_tau, theta_tau)` for the RLCT of an ideal
/// at the origin with monomial amplitude `w^tau`.
///
/// The exact flag is set when the ideal is monomial or certified
/// sos-nondegenerate; otherwise the pair is an upper bound.
pub fn rlct_newton_bound(ideal: &Ideal, tau: &Exponent) -> Result<RlctPair> {
    rlct_newton_bound_with(ideal, tau, &NondegenConfig::default())
}

/// [`rlct_newton_bound`] with an explicit nondegeneracy search configuration.
pub fn rlct_newton_bound_with(
    ideal: &Ideal,
    tau: &Exponent,
    cfg: &NondegenConfig,
) -> Result<RlctPair> {
    if ideal.has_constant_term() {
        // unit ideal near the origin: the zeta function has no poles
        return Ok(RlctPair::infinite(true));
    }
    let p = polyhedra::newton_polyhedron(ideal)?;
    let (dist, _face) = p.tau_distance(tau);
    if dist.l.is_zero() {
        return Ok(RlctPair::infinite(true));
    }
    let lambda = dist.l.recip();
    let theta = dist.theta.expect("theta defined for positive distance");
    let exact = if ideal.is_monomial() {
        true
    } else {
        matches!(
            nondegen::is_sos_nondegenerate_with(ideal, cfg)?.status,
            NondegenStatus::Nondegenerate
        )
    };
    Ok(RlctPair::finite(lambda, theta, exact))
}

/// RLCT of a sum of ideals in disjoint variable blocks:
/// `(lx + ly, tx + ty - 1)`. An infinite side (zero ideal) contributes
/// nothing and the other side is returned unchanged.
pub fn rlct_sum_disjoint(px: &RlctPair, py: &RlctPair) -> RlctPair {
    match (&px.lambda, &py.lambda) {
        (None, _) => py.clone(),
        (_, None) => px.clone(),
        (Some(lx), Some(ly)) => RlctPair::finite(
            lx + ly,
            px.theta.unwrap() + py.theta.unwrap() - 1,
            px.exact && py.exact,
        ),
    }
}

/// RLCT of a product of ideals in disjoint variable blocks: the minimum by
/// lambda, with thetas added on a tie.
pub fn rlct_prod_disjoint(px: &RlctPair, py: &RlctPair) -> RlctPair {
    match (&px.lambda, &py.lambda) {
        (None, _) => py.clone(),
        (_, None) => px.clone(),
        (Some(lx), Some(ly)) => match lx.cmp(ly) {
            Ordering::Less => RlctPair {
                exact: px.exact && py.exact,
                ..px.clone()
            },
            Ordering::Greater => RlctPair {
                exact: px.exact && py.exact,
                ..py.clone()
            },
            Ordering::Equal => RlctPair::finite(
                lx.clone(),
                px.theta.unwrap() + py.theta.unwrap(),
                px.exact && py.exact,
            ),
        },
    }
}

/// The factor of two between ideal-zeta RLCTs and learning coefficients
/// lives here and nowhere else: `lambda` is halved, `theta` is unchanged.
pub fn ideal_to_learning_coefficient(pair: &RlctPair) -> RlctPair {
    match &pair.lambda {
        None => pair.clone(),
        Some(l) => RlctPair::finite(
            l / Rat::from_integer(BigInt::from(2)),
            pair.theta.unwrap(),
            pair.exact,
        ),
    }
}

/// A monomial change of variables `w = mu^v`; rows of `v` are the chart
/// generators.
#[derive(Clone, Debug)]
pub struct MonomialMap {
    rows: Vec<Vec<u32>>,
}

impl MonomialMap {
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput(
                "monomial map matrix must be square".into(),
            ));
        }
        let m = MonomialMap { rows };
        if m.det().is_zero() {
            return Err(Error::InvalidInput(
                "monomial map matrix must be nonsingular".into(),
            ));
        }
        Ok(m)
    }

    pub fn identity(d: usize) -> Self {
        MonomialMap {
            rows: (0..d)
                .map(|i| (0..d).map(|j| u32::from(i == j)).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn det(&self) -> BigInt {
        let d = self.rows.len();
        let mut m: Vec<Vec<Rat>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&x| Rat::from_integer(BigInt::from(x)))
                    .collect()
            })
            .collect();
        let mut det = Rat::one();
        for col in 0..d {
            let Some(pivot) = (col..d).find(|&r| !m[r][col].is_zero()) else {
                return BigInt::zero();
            };
            if pivot != col {
                m.swap(pivot, col);
                det = -det;
            }
            det *= &m[col][col];
            let pv = m[col][col].clone();
            for r in (col + 1)..d {
                if m[r][col].is_zero() {
                    continue;
                }
                let f = &m[r][col] / &pv;
                for c in col..d {
                    let delta = &f * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
        debug_assert!(det.denom().is_one());
        det.numer().clone()
    }

    /// Image `v . alpha` of an exponent vector.
    pub fn apply(&self, alpha: &Exponent) -> Exponent {
        let entries = self
            .rows
            .iter()
            .map(|row| row.iter().zip(alpha.entries()).map(|(&v, &a)| v * a).sum())
            .collect();
        Exponent::new(entries)
    }
}

/// Pull an ideal and amplitude back under `w = mu^v`.
///
/// Exponents map by `alpha -> v . alpha`; the new amplitude exponent is
/// `tau'_i = <v_i, tau> + (sum_j v_ij) - 1` (the Jacobian monomial times the
/// amplitude monomial). Generators are returned without factoring out
/// common monomials; see [`normalize_monomial_factor`].
pub fn pullback_monomial_map(
    ideal: &Ideal,
    map: &MonomialMap,
    tau: &Exponent,
) -> Result<(Ideal, Exponent)> {
    let d = ideal.dim();
    if map.dim() != d || tau.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: map.dim(),
        });
    }
    let mut gens = Vec::with_capacity(ideal.generators().len());
    for g in ideal.generators() {
        let mut image = Polynomial::zero(d);
        for (e, c) in g.terms() {
            image = image.add(&Polynomial::monomial(map.apply(e), c.clone()));
        }
        gens.push(image);
    }
    let tau_entries: Vec<u32> = map
        .rows
        .iter()
        .map(|row| {
            let pull: u32 = row.iter().zip(tau.entries()).map(|(&v, &t)| v * t).sum();
            let row_sum: u32 = row.iter().sum();
            debug_assert!(
                row_sum >= 1,
                "nonsingular nonnegative matrix has no zero row"
            );
            pull + row_sum - 1
        })
        .collect();
    Ok((Ideal::new(d, gens)?, Exponent::new(tau_entries)))
}

/// Split `I = mu^sigma . J`: the largest monomial dividing every generator,
/// and the cofactor ideal.
pub fn normalize_monomial_factor(ideal: &Ideal) -> (Exponent, Ideal) {
    let d = ideal.dim();
    let mut sigma: Option<Exponent> = None;
    for g in ideal.generators() {
        let mut content: Option<Exponent> = None;
        for (e, _) in g.terms() {
            content = Some(match content {
                None => e.clone(),
                Some(c) => c.gcd(e),
            });
        }
        let content = content.expect("nonzero generator");
        sigma = Some(match sigma {
            None => content,
            Some(s) => s.gcd(&content),
        });
    }
    let sigma = sigma.expect("nonempty ideal");
    if sigma.is_zero() {
        return (sigma, ideal.clone());
    }
    let gens: Vec<Polynomial> = ideal
        .generators()
        .iter()
        .map(|g| {
            let mut out = Polynomial::zero(d);
            for (e, c) in g.terms() {
                out = out.add(&Polynomial::monomial(
                    e.checked_sub(&sigma).expect("sigma divides"),
                    c.clone(),
                ));
            }
            out
        })
        .collect();
    (sigma, Ideal::new(d, gens).expect("cofactors nonzero"))
}

/// RLCT of a monomial `w^kappa` over a chain region
/// `0 <= w_{c_1} <= w_{c_2} <= ... <= eps` (coordinates not listed range
/// over `[0, eps]`), computed by the triangular substitution that maps the
/// chain onto a box.
pub fn rlct_region_orthant_chain(kappa: &Exponent, chain: &[usize]) -> Result<RlctPair> {
    let d = kappa.dim();
    let mut seen = vec![false; d];
    for &c in chain {
        if c >= d {
            return Err(Error::InvalidInput(format!("chain index {c} out of range")));
        }
        if seen[c] {
            return Err(Error::InvalidInput("repeated coordinate in chain".into()));
        }
        seen[c] = true;
    }
    // v rows: chained slot pi(i) maps to t_i with t_i appearing in w_{pi(k)} iff i >= k
    let mut rows = vec![vec![0u32; d]; d];
    for j in 0..d {
        if !seen[j] {
            rows[j][j] = 1;
        }
    }
    for (i, &slot_i) in chain.iter().enumerate() {
        for (k, &slot_k) in chain.iter().enumerate() {
            if i >= k {
                rows[slot_i][slot_k] = 1;
            }
        }
    }
    let map = MonomialMap::new(rows)?;
    let kappa_new = map.apply(kappa);
    // amplitude 1 upstairs; tau' is the Jacobian exponent
    let tau_new = {
        let entries: Vec<u32> = map
            .rows
            .iter()
            .map(|row| row.iter().sum::<u32>() - 1)
            .collect();
        Exponent::new(entries)
    };
    Ok(rlct_monomial(&kappa_new, &tau_new))
}

/// `(d/2, 1)` when the origin is a nondegenerate local extremum: zero
/// gradient and definite Hessian. Returns `None` when the Hessian case does
/// not apply (indefinite or rank-deficient).
pub fn rlct_hessian_case(f: &Polynomial) -> Result<Option<RlctPair>> {
    let d = f.dim();
    if !f.constant_term().is_zero() {
        return Err(Error::InvalidInput("f(0) must vanish".into()));
    }
    for j in 0..d {
        if !f.coeff(&Exponent::unit(d, j)).is_zero() {
            return Err(Error::InvalidInput("gradient at 0 must vanish".into()));
        }
    }
    // Hessian from quadratic coefficients
    let mut h = vec![vec![Rat::zero(); d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut e = vec![0u32; d];
            e[i] += 1;
            e[j] += 1;
            let c = f.coeff(&Exponent::new(e));
            h[i][j] = if i == j {
                c * Rat::from_integer(BigInt::from(2))
            } else {
                c
            };
        }
    }
    let minors = leading_minors(&h);
    let pos_def = minors.iter().all(|m| m.is_positive());
    let neg_def = minors.iter().enumerate().all(|(k, m)| {
        if k % 2 == 0 {
            m.is_negative()
        } else {
            m.is_positive()
        }
    });
    if pos_def || neg_def {
        Ok(Some(RlctPair::finite(
            Rat::new(BigInt::from(d), BigInt::from(2)),
            1,
            true,
        )))
    } else {
        Ok(None)
    }
}

fn leading_minors(h: &[Vec<Rat>]) -> Vec<Rat> {
    let d = h.len();
    (1..=d)
        .map(|k| {
            let mut m: Vec<Vec<Rat>> = (0..k).map(|i| h[i][..k].to_vec()).collect();
            let mut det = Rat::one();
            for col in 0..k {
                let Some(pivot) = (col..k).find(|&r| !m[r][col].is_zero()) else {
                    return Rat::zero();
                };
                if pivot != col {
                    m.swap(pivot, col);
                    det = -det;
                }
                det *= &m[col][col];
                let pv = m[col][col].clone();
                for r in (col + 1)..k {
                    if m[r][col].is_zero() {
                        continue;
                    }
                    let f = &m[r][col] / &pv;
                    for c in col..k {
                        let delta = &f * &m[col][c];
                        m[r][c] -= delta;
                    }
                }
            }
            det
        })
        .collect()
}

/// Upper bound `((r + d)/2, 1)` from the rank `r` of the generator Jacobian
/// at the origin. Never exact by itself.
pub fn jacobian_rank_bound(ideal: &Ideal) -> Result<RlctPair> {
    let d = ideal.dim();
    if ideal.has_constant_term() {
        return Err(Error::InvalidInput("generators must vanish at 0".into()));
    }
    let rows: Vec<Vec<BigInt>> = ideal
        .generators()
        .iter()
        .map(|g| {
            let scale = denominator_lcm(g, d);
            (0..d)
                .map(|j| {
                    let c = g.coeff(&Exponent::unit(d, j));
                    c.numer() * &scale / c.denom()
                })
                .collect()
        })
        .collect();
    let r = int_rank(&rows);
    Ok(RlctPair::finite(
        Rat::new(BigInt::from(r + d), BigInt::from(2)),
        1,
        false,
    ))
}

fn denominator_lcm(g: &Polynomial, d: usize) -> BigInt {
    use num_integer::Integer;
    let mut l = BigInt::one();
    for j in 0..d {
        let c = g.coeff(&Exponent::unit(d, j));
        l = l.lcm(c.denom());
    }
    l
}
