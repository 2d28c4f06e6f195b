//! Laurent principal parts of monomial zeta functions and the transform
//! into Laplace-integral asymptotics.
//!
//! For the box `[0, eps]^d` and integrand `w^kappa` with amplitude
//! `w^tau`, the zeta function factors as
//! `prod_j eps^{tau_j+1-kappa_j z} / (tau_j+1-kappa_j z)`; its principal
//! parts are exact rationals when `eps = 1` and acquire `log eps` terms
//! otherwise. The coefficients of the `N^{-alpha} (log N)^{i-1}` expansion
//! come from the principal parts through derivatives of the Gamma function.

use crate::algebra::{rat_to_f64, rat_to_string, Exponent, Rat};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Principal parts of a zeta function: for each pole `alpha > 0` the
/// coefficients `d_{alpha,j}` of `(z - alpha)^{-j}`, `j = 1..`.
///
/// `exact` carries the same data in exact rational form when available
/// (box radius `eps = 1`).
#[derive(Debug, Clone)]
pub struct LaurentPrincipalPart {
    pub poles: BTreeMap<Rat, Vec<f64>>,
    pub exact: Option<BTreeMap<Rat, Vec<Rat>>>,
}

impl LaurentPrincipalPart {
    /// Smallest pole and its order (the index of the top nonzero
    /// coefficient).
    pub fn smallest_pole(&self) -> Option<(&Rat, usize)> {
        self.poles.iter().next().map(|(a, d)| {
            let order = d
                .iter()
                .rposition(|c| *c != 0.0)
                .map(|i| i + 1)
                .unwrap_or(0);
            (a, order)
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "poles": self
                .poles
                .iter()
                .map(|(a, d)| (rat_to_string(a), d.clone()))
                .collect::<BTreeMap<String, Vec<f64>>>(),
        })
    }
}

/// Coefficients of `Z(N) ~ sum c_{alpha,i} N^{-alpha} (log N)^{i-1}`.
#[derive(Debug, Clone, Default)]
pub struct AsymptoticSeries {
    pub terms: BTreeMap<(Rat, usize), f64>,
}

impl AsymptoticSeries {
    pub fn coeff(&self, alpha: &Rat, i: usize) -> f64 {
        self.terms.get(&(alpha.clone(), i)).copied().unwrap_or(0.0)
    }

    /// JSON form: a list of `{"alpha": "a/b", "i": n, "c": float}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|((a, i), c)| serde_json::json!({"alpha": rat_to_string(a), "i": i, "c": c}))
                .collect(),
        )
    }
}

/// Coefficients of the state density `v(t) ~ sum b_{alpha,i} t^alpha (log t)^{i-1}`.
#[derive(Debug, Clone, Default)]
pub struct StateDensityCoefficients {
    pub terms: BTreeMap<(Rat, usize), f64>,
}

impl StateDensityCoefficients {
    pub fn coeff(&self, alpha: &Rat, i: usize) -> f64 {
        self.terms.get(&(alpha.clone(), i)).copied().unwrap_or(0.0)
    }
}

/// Exact principal parts of
/// `zeta(z) = prod_j eps^{tau_j+1-kappa_j z} / (tau_j+1-kappa_j z)`.
pub fn zeta_monomial_box(
    kappa: &Exponent,
    tau: &Exponent,
    eps: &Rat,
) -> Result<LaurentPrincipalPart> {
    if kappa.dim() != tau.dim() {
        return Err(Error::DimensionMismatch {
            expected: kappa.dim(),
            got: tau.dim(),
        });
    }
    if kappa.is_zero() {
        return Err(Error::InvalidInput("kappa must be nonzero".into()));
    }
    if !eps.is_positive() {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let d = kappa.dim();
    // group coordinates by pole location alpha_j = (tau_j + 1) / kappa_j
    let mut groups: BTreeMap<Rat, Vec<usize>> = BTreeMap::new();
    for j in 0..d {
        if kappa.get(j) > 0 {
            let alpha = Rat::new(BigInt::from(tau.get(j) + 1), BigInt::from(kappa.get(j)));
            groups.entry(alpha).or_default().push(j);
        }
    }
    let eps_is_one = eps.is_one();
    let ln_eps = rat_to_f64(eps).ln();
    let total_tau1: u32 = (0..d).map(|j| tau.get(j) + 1).sum();
    let total_kappa: u32 = (0..d).map(|j| kappa.get(j)).sum();

    let mut poles_exact: BTreeMap<Rat, Vec<Rat>> = BTreeMap::new();
    let mut poles_f64: BTreeMap<Rat, Vec<f64>> = BTreeMap::new();

    for (alpha, idxs) in &groups {
        let m = idxs.len();
        // zeta = (z-alpha)^{-m} * prefactor * R(z) * E(z) with
        // prefactor = (-1)^m / prod_{j in group} kappa_j
        let mut pref = Rat::one();
        for &j in idxs {
            pref /= Rat::from_integer(BigInt::from(kappa.get(j)));
        }
        if m % 2 == 1 {
            pref = -pref;
        }
        // Taylor series of R at alpha, exact
        let mut series: Vec<Rat> = vec![Rat::one()];
        series.resize(m, Rat::zero());
        for j in 0..d {
            let k = kappa.get(j);
            if k == 0 {
                // constant factor 1 / (tau_j + 1)
                let c = Rat::new(BigInt::one(), BigInt::from(tau.get(j) + 1));
                for s in series.iter_mut() {
                    *s *= &c;
                }
                continue;
            }
            let aj = Rat::new(BigInt::from(tau.get(j) + 1), BigInt::from(k));
            if aj == *alpha {
                continue;
            }
            // 1/(kappa_j (a_j - z)) = (1/kappa_j) sum_t (z-alpha)^t / (a_j-alpha)^{t+1}
            let gap = &aj - alpha;
            let mut factor: Vec<Rat> = Vec::with_capacity(m);
            let mut denom = gap.clone();
            for _ in 0..m {
                factor.push(denom.recip() / Rat::from_integer(BigInt::from(k)));
                denom *= &gap;
            }
            series = convolve_rat(&series, &factor, m);
        }
        // d_{alpha,j} = pref * R_{m-j} (exact when eps = 1)
        if eps_is_one {
            let mut dvec = vec![Rat::zero(); m];
            for (j_idx, slot) in dvec.iter_mut().enumerate() {
                let j = j_idx + 1;
                *slot = &pref * &series[m - j];
            }
            poles_f64.insert(alpha.clone(), dvec.iter().map(rat_to_f64).collect());
            poles_exact.insert(alpha.clone(), dvec);
        } else {
            // E(z) = eps^{A - B z} = eps^{A - B alpha} e^{-B ln(eps) (z-alpha)}
            let scale =
                rat_to_f64(eps).powf(total_tau1 as f64 - total_kappa as f64 * rat_to_f64(alpha));
            let rate = -(total_kappa as f64) * ln_eps;
            let mut efactor: Vec<f64> = Vec::with_capacity(m);
            let mut acc = 1.0;
            for t in 0..m {
                if t > 0 {
                    acc *= rate / t as f64;
                }
                efactor.push(acc);
            }
            let rf64: Vec<f64> = series.iter().map(rat_to_f64).collect();
            let combined = convolve_f64(&rf64, &efactor, m);
            let mut dvec = vec![0.0; m];
            for (j_idx, slot) in dvec.iter_mut().enumerate() {
                let j = j_idx + 1;
                *slot = rat_to_f64(&pref) * scale * combined[m - j];
            }
            poles_f64.insert(alpha.clone(), dvec);
        }
    }
    Ok(LaurentPrincipalPart {
        poles: poles_f64,
        exact: eps_is_one.then_some(poles_exact),
    })
}

fn convolve_rat(a: &[Rat], b: &[Rat], len: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); len];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

fn convolve_f64(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

// Bernoulli numbers B_2, B_4, ..., B_20
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// `ln Gamma(x)` for `x > 0`: argument shift above 8, then Stirling with
/// Bernoulli corrections.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0f64;
    let mut y = x;
    while y < 8.0 {
        shift += y.ln();
        y += 1.0;
    }
    let mut s = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * std::f64::consts::PI).ln();
    let y2 = y * y;
    let mut ypow = y;
    for (n, b) in BERNOULLI.iter().enumerate() {
        let k = (n + 1) as f64;
        s += b / (2.0 * k * (2.0 * k - 1.0) * ypow);
        ypow *= y2;
    }
    s - shift
}

/// Digamma `psi(x)` for `x > 0`.
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut y = x;
    let mut acc = 0.0f64;
    while y < 9.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let mut s = y.ln() - 0.5 / y;
    let y2 = y * y;
    let mut ypow = y2;
    for (n, b) in BERNOULLI.iter().enumerate() {
        let k = (n + 1) as f64;
        s -= b / (2.0 * k * ypow);
        ypow *= y2;
    }
    s + acc
}

/// Polygamma `psi^{(n)}(x)` for `n >= 1`, `x > 0`.
pub fn polygamma(n: usize, x: f64) -> f64 {
    assert!(n >= 1 && x > 0.0);
    let threshold = 9.0 + n as f64;
    let sign = if n % 2 == 0 { -1.0 } else { 1.0 }; // (-1)^{n+1}
    let nf = factorial(n);
    let mut y = x;
    let mut acc = 0.0f64;
    while y < threshold {
        // psi^(n)(y) = psi^(n)(y+1) + (-1)^n n! / y^{n+1}
        acc += sign * nf / y.powi(n as i32 + 1);
        y += 1.0;
    }
    // asymptotic: (-1)^{n+1} [ (n-1)!/y^n + n!/(2 y^{n+1})
    //   + sum_k B_{2k} (2k+n-1)!/((2k)! y^{2k+n}) ]
    let mut s = factorial(n - 1) / y.powi(n as i32) + nf / (2.0 * y.powi(n as i32 + 1));
    for (idx, b) in BERNOULLI.iter().enumerate() {
        let k = idx + 1;
        let num = factorial(2 * k + n - 1);
        let den = factorial(2 * k);
        s += b * num / den / y.powi((2 * k + n) as i32);
    }
    sign * s + acc
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `[Gamma(alpha), Gamma'(alpha), ..., Gamma^{(m)}(alpha)]` via the
/// exponential-of-log-Gamma derivative recurrence.
pub fn gamma_derivatives(alpha: f64, m: usize) -> Result<Vec<f64>> {
    if alpha <= 0.0 {
        return Err(Error::InvalidInput(
            "gamma derivatives need alpha > 0".into(),
        ));
    }
    let gamma0 = ln_gamma(alpha).exp();
    let mut out = vec![gamma0];
    if m == 0 {
        return Ok(out);
    }
    // g^{(j)} = d^j/dx^j ln Gamma: digamma and polygammas
    let mut g: Vec<f64> = vec![digamma(alpha)];
    for j in 2..=m {
        g.push(polygamma(j - 1, alpha));
    }
    for k in 0..m {
        // Gamma^{(k+1)} = sum_{i=0}^{k} C(k,i) g^{(i+1)} Gamma^{(k-i)}
        let mut s = 0.0;
        for i in 0..=k {
            s += binom_f64(k, i) * g[i] * out[k - i];
        }
        out.push(s);
    }
    Ok(out)
}

fn binom_f64(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Transform Laurent principal parts into the Laplace expansion:
/// `c_{alpha,i} = ((-1)^i/(i-1)!) sum_{j>=i} Gamma^{(j-i)}(alpha)/(j-i)! d_{alpha,j}`.
pub fn laplace_coeffs(pp: &LaurentPrincipalPart) -> Result<AsymptoticSeries> {
    let mut out = AsymptoticSeries::default();
    for (alpha, dvec) in &pp.poles {
        let top = dvec
            .iter()
            .rposition(|c| *c != 0.0)
            .map(|i| i + 1)
            .unwrap_or(0);
        if top == 0 {
            continue;
        }
        let a = rat_to_f64(alpha);
        if a <= 0.0 {
            return Err(Error::InvalidInput("poles must be positive".into()));
        }
        let gammas = gamma_derivatives(a, top - 1)?;
        for i in 1..=top {
            let mut s = 0.0;
            for j in i..=top {
                s += gammas[j - i] / factorial(j - i) * dvec[j - 1];
            }
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign / factorial(i - 1) * s;
            out.terms.insert((alpha.clone(), i), c);
        }
    }
    Ok(out)
}

/// State density coefficients from the principal parts:
/// `d_{alpha,j} = -(j-1)! b_{alpha-1,j}`.
pub fn state_density_coeffs(pp: &LaurentPrincipalPart) -> StateDensityCoefficients {
    let mut out = StateDensityCoefficients::default();
    for (alpha, dvec) in &pp.poles {
        for (j_idx, dj) in dvec.iter().enumerate() {
            let j = j_idx + 1;
            if *dj == 0.0 {
                continue;
            }
            let b = -dj / factorial(j - 1);
            out.terms.insert((alpha - Rat::one(), j), b);
        }
    }
    out
}

/// Inverse of [`state_density_coeffs`].
pub fn principal_part_from_state_density(sd: &StateDensityCoefficients) -> LaurentPrincipalPart {
    let mut poles: BTreeMap<Rat, Vec<f64>> = BTreeMap::new();
    for ((alpha_minus_1, j), b) in &sd.terms {
        let alpha = alpha_minus_1 + Rat::one();
        let entry = poles.entry(alpha).or_default();
        if entry.len() < *j {
            entry.resize(*j, 0.0);
        }
        entry[*j - 1] = -factorial(*j - 1) * b;
    }
    LaurentPrincipalPart { poles, exact: None }
}

/// Evaluate the series at `N > 1`, keeping the `truncation` smallest poles.
pub fn evaluate_series(series: &AsymptoticSeries, n: f64, truncation: usize) -> Result<f64> {
    if n <= 1.0 {
        return Err(Error::InvalidInput("series evaluation needs N > 1".into()));
    }
    let mut alphas: Vec<&Rat> = series.terms.keys().map(|(a, _)| a).collect();
    alphas.sort();
    alphas.dedup();
    let kept: Vec<&Rat> = alphas.into_iter().take(truncation).collect();
    let ln_n = n.ln();
    let mut total = 0.0;
    for ((alpha, i), c) in &series.terms {
        if !kept.contains(&alpha) {
            continue;
        }
        total += c * n.powf(-rat_to_f64(alpha)) * ln_n.powi(*i as i32 - 1);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};

    const EULER_GAMMA: f64 = 0.5772156649015328606;

    fn e(entries: &[u32]) -> Exponent {
        Exponent::new(entries.to_vec())
    }

    #[test]
    fn single_factor_zeta() {
        // kappa=(1), tau=(0), eps=1: zeta = 1/(1-z), pole at 1 with d_{1,1} = -1
        let pp = zeta_monomial_box(&e(&[1]), &e(&[0]), &rat_int(1)).unwrap();
        let exact = pp.exact.as_ref().unwrap();
        assert_eq!(exact[&rat_int(1)], vec![rat_int(-1)]);
        let (alpha, order) = pp.smallest_pole().unwrap();
        assert_eq!((alpha, order), (&rat_int(1), 1));
    }

    #[test]
    fn squared_factor_zeta() {
        // kappa=(1,1), tau=0: zeta = (1-z)^{-2}, d_{1,2} = 1, d_{1,1} = 0
        let pp = zeta_monomial_box(&e(&[1, 1]), &e(&[0, 0]), &rat_int(1)).unwrap();
        let exact = pp.exact.as_ref().unwrap();
        assert_eq!(exact[&rat_int(1)], vec![rat_int(0), rat_int(1)]);
    }

    #[test]
    fn two_pole_zeta_matches_residue_oracle() {
        // kappa=(1,2), tau=0: zeta = 1/((1-z)(1-2z)); residues -1 at 1/2, +1 at 1
        let pp = zeta_monomial_box(&e(&[1, 2]), &e(&[0, 0]), &rat_int(1)).unwrap();
        let exact = pp.exact.as_ref().unwrap();
        assert_eq!(exact[&rat(1, 2)], vec![rat_int(-1)]);
        assert_eq!(exact[&rat_int(1)], vec![rat_int(1)]);
        let (alpha, order) = pp.smallest_pole().unwrap();
        assert_eq!((alpha, order), (&rat(1, 2), 1));
    }

    #[test]
    fn eps_scaling_keeps_poles() {
        let one = zeta_monomial_box(&e(&[1, 2]), &e(&[0, 0]), &rat_int(1)).unwrap();
        let half = zeta_monomial_box(&e(&[1, 2]), &e(&[0, 0]), &rat(1, 2)).unwrap();
        let keys1: Vec<_> = one.poles.keys().collect();
        let keys2: Vec<_> = half.poles.keys().collect();
        assert_eq!(keys1, keys2);
        assert!(half.exact.is_none());
        // eps = 1/2 on the kappa=(1) factor: zeta = (1/2)^{1-z}/(1-z);
        // residue at 1 is -(1/2)^{1-1} = -1
        let pp = zeta_monomial_box(&e(&[1]), &e(&[0]), &rat(1, 2)).unwrap();
        assert!((pp.poles[&rat_int(1)][0] - (-1.0)).abs() < 1e-14);
    }

    #[test]
    fn eps_double_pole_picks_up_log_terms() {
        // kappa=(1,1), eps=1/2: zeta = eps^{2-2z} (z-1)^{-2}, so
        // d_{1,2} = 1 and d_{1,1} = -2 log(eps) = 2 log 2
        let pp = zeta_monomial_box(&e(&[1, 1]), &e(&[0, 0]), &rat(1, 2)).unwrap();
        let d = &pp.poles[&rat_int(1)];
        assert!((d[1] - 1.0).abs() < 1e-14);
        assert!(
            (d[0] - 2.0 * std::f64::consts::LN_2).abs() < 1e-14,
            "d11 = {}",
            d[0]
        );
    }

    #[test]
    fn gamma_stack_accuracy() {
        assert!((ln_gamma(1.0)).abs() < 1e-14);
        assert!((ln_gamma(0.5).exp() - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((digamma(1.0) + EULER_GAMMA).abs() < 1e-13);
        // psi'(1) = pi^2/6, psi''(1) = -2 zeta(3)
        assert!((polygamma(1, 1.0) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12);
        assert!((polygamma(2, 1.0) + 2.0 * 1.2020569031595942854).abs() < 1e-11);
        // Gamma(1/2) = sqrt(pi) via derivatives list
        let g = gamma_derivatives(0.5, 0).unwrap();
        assert!((g[0] - 1.7724538509055160).abs() < 1e-13);
        let g = gamma_derivatives(1.0, 1).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-14);
        assert!((g[1] + EULER_GAMMA).abs() < 1e-12);
    }

    #[test]
    fn gamma_recurrence_property() {
        // Gamma(x+1) = x Gamma(x) differentiated m times:
        // Gamma^{(m)}(x+1) = x Gamma^{(m)}(x) + m Gamma^{(m-1)}(x)
        for &x in &[0.3, 1.0, 2.5, 7.0] {
            let lo = gamma_derivatives(x, 4).unwrap();
            let hi = gamma_derivatives(x + 1.0, 4).unwrap();
            for m in 1..=4usize {
                let rhs = x * lo[m] + m as f64 * lo[m - 1];
                assert!(
                    (hi[m] - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()),
                    "x={x} m={m}: {} vs {rhs}",
                    hi[m]
                );
            }
        }
    }

    #[test]
    fn laplace_transform_fixtures() {
        // d_{1,1} = -1 -> c_{1,1} = 1
        let mut poles = BTreeMap::new();
        poles.insert(rat_int(1), vec![-1.0]);
        let s = laplace_coeffs(&LaurentPrincipalPart { poles, exact: None }).unwrap();
        assert!((s.coeff(&rat_int(1), 1) - 1.0).abs() < 1e-12);

        // d_{1,2} = 1: c_{1,2} = 1, c_{1,1} = euler gamma
        let mut poles = BTreeMap::new();
        poles.insert(rat_int(1), vec![0.0, 1.0]);
        let s = laplace_coeffs(&LaurentPrincipalPart { poles, exact: None }).unwrap();
        assert!((s.coeff(&rat_int(1), 2) - 1.0).abs() < 1e-12);
        assert!((s.coeff(&rat_int(1), 1) - EULER_GAMMA).abs() < 1e-10);

        // empty principal part -> empty series
        let s = laplace_coeffs(&LaurentPrincipalPart {
            poles: BTreeMap::new(),
            exact: None,
        })
        .unwrap();
        assert!(s.terms.is_empty());
    }

    #[test]
    fn state_density_roundtrip() {
        let mut poles = BTreeMap::new();
        poles.insert(rat_int(1), vec![-1.0, 2.0]);
        poles.insert(rat(2, 3), vec![-1.0 / 3.0]);
        let pp = LaurentPrincipalPart { poles, exact: None };
        let sd = state_density_coeffs(&pp);
        assert!((sd.coeff(&rat_int(0), 1) - 1.0).abs() < 1e-15);
        assert!((sd.coeff(&rat_int(0), 2) + 2.0).abs() < 1e-15);
        assert!((sd.coeff(&rat(-1, 3), 1) - 1.0 / 3.0).abs() < 1e-15);
        let back = principal_part_from_state_density(&sd);
        for (alpha, dvec) in &pp.poles {
            for (j, dj) in dvec.iter().enumerate() {
                assert!((back.poles[alpha][j] - dj).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn series_evaluation() {
        let mut s = AsymptoticSeries::default();
        s.terms.insert((rat_int(1), 1), 1.0);
        assert!((evaluate_series(&s, 100.0, 1).unwrap() - 0.01).abs() < 1e-15);
        let mut s = AsymptoticSeries::default();
        s.terms.insert((rat_int(1), 2), 1.0);
        s.terms.insert((rat_int(1), 1), EULER_GAMMA);
        let n = std::f64::consts::E;
        let expect = (1.0 + EULER_GAMMA) / n;
        assert!((evaluate_series(&s, n, 1).unwrap() - expect).abs() < 1e-14);
        let mut s = AsymptoticSeries::default();
        s.terms.insert((rat(1, 2), 1), 2.0);
        assert!((evaluate_series(&s, 1e4, 1).unwrap() - 0.02).abs() < 1e-15);
        assert!(evaluate_series(&s, 1.0, 1).is_err());
    }

    #[test]
    fn smallest_pole_matches_monomial_rlct() {
        use crate::rlct::rlct_monomial;
        // exhaustive over small kappa, tau in d <= 2 here; d <= 3 runs in the
        // acceptance suite
        for d in 1..=2usize {
            let mut grids = vec![vec![]];
            for _ in 0..d {
                grids = grids
                    .into_iter()
                    .flat_map(|k: Vec<u32>| {
                        (0..=3u32).map(move |v| {
                            let mut k2 = k.clone();
                            k2.push(v);
                            k2
                        })
                    })
                    .collect();
            }
            for kappa in &grids {
                if kappa.iter().all(|&k| k == 0) {
                    continue;
                }
                for tau in &grids {
                    let ke = Exponent::new(kappa.clone());
                    let te = Exponent::new(tau.clone());
                    let pp = zeta_monomial_box(&ke, &te, &rat_int(1)).unwrap();
                    let (alpha, order) = pp.smallest_pole().unwrap();
                    let pair = rlct_monomial(&ke, &te);
                    assert_eq!(pair.lambda().unwrap(), alpha);
                    assert_eq!(pair.theta().unwrap(), order);
                }
            }
        }
    }
}
