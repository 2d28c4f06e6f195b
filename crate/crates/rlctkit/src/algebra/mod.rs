//! Exact multivariate polynomial arithmetic over the rationals.
//!
//! Everything in this module is exact: coefficients are arbitrary-precision
//! rationals, and no operation rounds. Polynomials are sparse maps from
//! exponent vectors to nonzero coefficients, kept in a canonical order so
//! that equality and serialization are deterministic.

mod grobner;
mod parse;

pub use grobner::{
    buchberger, buchberger_budgeted, ideal_contains, is_unit_ideal, normal_form,
    saturate_by_coordinates, saturate_by_coordinates_budgeted,
};
pub use parse::parse_polynomial;

use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exact rational scalar used for all symbolic coefficients.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational `n / d`.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact ingestion of a plain decimal literal such as `0.5129202328` or `-3.25`.
///
/// The result has denominator `10^k` where `k` is the number of printed
/// fractional digits, so printed estimates become exact fixtures.
pub fn rat_from_decimal(s: &str) -> Result<Rat> {
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1i64, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::InvalidInput(format!("bad decimal literal `{s}`")));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::InvalidInput(format!("bad decimal literal `{s}`")));
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = digits
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad decimal literal `{s}`")))?;
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(BigRational::new(num * BigInt::from(sign), den))
}

/// Parse `"a/b"` or `"a"` into a rational.
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad rational `{s}`")))?;
        let den: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad rational `{s}`")))?;
        if den.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in `{s}`")));
        }
        Ok(BigRational::new(num, den))
    } else if s.contains('.') {
        rat_from_decimal(s)
    } else {
        let num: BigInt = s
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad rational `{s}`")))?;
        Ok(BigRational::from_integer(num))
    }
}

/// Render a rational as `"a/b"` (or `"a"` when integral).
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest `f64` to an exact rational.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back to a quotient of leading digits for extreme magnitudes
        let n = r.numer().to_f64().unwrap_or(f64::MAX);
        let d = r.denom().to_f64().unwrap_or(f64::MAX);
        n / d
    })
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= BigUint::from(n - i);
        den *= BigUint::from(i + 1);
    }
    BigInt::from(num / den)
}

/// An exponent vector of fixed ambient dimension.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Self {
        Exponent(entries)
    }

    pub fn zero(dim: usize) -> Self {
        Exponent(vec![0; dim])
    }

    /// The exponent of the single variable `j`.
    pub fn unit(dim: usize, j: usize) -> Self {
        let mut e = vec![0; dim];
        e[j] = 1;
        Exponent(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.dim(), other.dim());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self >= other`, i.e. the monomial of `other` divides ours.
    pub fn dominates(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Componentwise difference; `None` unless `self` dominates `other`.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        if self.dominates(other) {
            Some(Exponent(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    /// Componentwise maximum (lcm of the monomials).
    pub fn lcm(&self, other: &Exponent) -> Exponent {
        Exponent(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// Componentwise minimum (gcd of the monomials).
    pub fn gcd(&self, other: &Exponent) -> Exponent {
        Exponent(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Monomial order used by the Gröbner engine.
///
/// `perm[i]` is the variable holding priority `i`; the default is the
/// identity, i.e. the user's variable order.
#[derive(Clone, Debug)]
pub struct MonomialOrder {
    kind: OrderKind,
    perm: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum OrderKind {
    GrevLex,
    Lex,
    /// Block order eliminating the first `k` permuted variables.
    Elim(usize),
}

impl MonomialOrder {
    pub fn grevlex(dim: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::GrevLex,
            perm: (0..dim).collect(),
        }
    }

    pub fn lex(dim: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            perm: (0..dim).collect(),
        }
    }

    pub fn grevlex_permuted(perm: Vec<usize>) -> Self {
        MonomialOrder {
            kind: OrderKind::GrevLex,
            perm,
        }
    }

    pub fn lex_permuted(perm: Vec<usize>) -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            perm,
        }
    }

    /// Elimination order: the first `block` variables of `perm` are
    /// eliminated (any monomial involving them beats any monomial that
    /// does not).
    pub fn elimination(block: usize, perm: Vec<usize>) -> Self {
        MonomialOrder {
            kind: OrderKind::Elim(block),
            perm,
        }
    }

    pub fn cmp(&self, a: &Exponent, b: &Exponent) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match self.kind {
            OrderKind::GrevLex => self.cmp_grevlex(a, b, &self.perm),
            OrderKind::Lex => {
                for &v in &self.perm {
                    match a.get(v).cmp(&b.get(v)) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
            OrderKind::Elim(k) => {
                let da: u32 = self.perm[..k].iter().map(|&v| a.get(v)).sum();
                let db: u32 = self.perm[..k].iter().map(|&v| b.get(v)).sum();
                match da.cmp(&db) {
                    Ordering::Equal => self.cmp_grevlex(a, b, &self.perm),
                    ord => ord,
                }
            }
        }
    }

    fn cmp_grevlex(&self, a: &Exponent, b: &Exponent, perm: &[usize]) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match a.total_degree().cmp(&b.total_degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for &v in perm.iter().rev() {
            match a.get(v).cmp(&b.get(v)) {
                Ordering::Equal => continue,
                // reverse lex: smaller entry in the last differing slot wins
                ord => return ord.reverse(),
            }
        }
        Ordering::Equal
    }
}

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Invariant: no zero coefficients are stored and all exponents share the
/// ambient dimension.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Exponent, Rat>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        let mut p = Polynomial::zero(dim);
        if !c.is_zero() {
            p.terms.insert(Exponent::zero(dim), c);
        }
        p
    }

    pub fn one(dim: usize) -> Self {
        Polynomial::constant(dim, Rat::one())
    }

    pub fn variable(dim: usize, j: usize) -> Self {
        Polynomial::monomial(Exponent::unit(dim, j), Rat::one())
    }

    pub fn monomial(exp: Exponent, c: Rat) -> Self {
        let mut p = Polynomial::zero(exp.dim());
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the polynomial has at most one term.
    pub fn is_monomial(&self) -> bool {
        self.terms.len() <= 1
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> Rat {
        self.terms.get(e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Exponent::zero(self.dim))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.total_degree())
            .max()
            .unwrap_or(0)
    }

    fn insert_term(&mut self, e: Exponent, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = Polynomial::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.insert_term(ea.add(eb), ca * cb);
            }
        }
        out
    }

    /// Multiply by the single term `c * x^e`.
    pub fn mul_term(&self, e: &Exponent, c: &Rat) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.dim);
        }
        Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(t, k)| (t.add(e), k * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut out = Polynomial::one(self.dim);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                out = out.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.dim);
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (j, &k) in e.entries().iter().enumerate() {
                for _ in 0..k {
                    term *= &point[j];
                }
            }
            acc += term;
        }
        acc
    }

    /// Floating-point evaluation.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.dim);
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut term = rat_to_f64(c);
            for (j, &k) in e.entries().iter().enumerate() {
                term *= point[j].powi(k as i32);
            }
            acc += term;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `j`.
    pub fn partial_derivative(&self, j: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.dim);
        for (e, c) in &self.terms {
            let k = e.get(j);
            if k == 0 {
                continue;
            }
            let mut entries = e.entries().to_vec();
            entries[j] -= 1;
            out.insert_term(
                Exponent::new(entries),
                c * Rat::from_integer(BigInt::from(k)),
            );
        }
        out
    }

    /// `f(omega + center)`, expanded exactly.
    pub fn translate(&self, center: &[Rat]) -> Result<Polynomial> {
        if center.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: center.len(),
            });
        }
        let mut current = self.clone();
        for (j, c) in center.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut next = Polynomial::zero(self.dim);
            for (e, coef) in &current.terms {
                let k = e.get(j);
                let mut base = e.entries().to_vec();
                for i in 0..=k {
                    // (w_j + c)^k contributes C(k,i) c^{k-i} w_j^i
                    base[j] = i;
                    let mut pow_c = Rat::one();
                    for _ in 0..(k - i) {
                        pow_c *= c;
                    }
                    let coef_i = coef * Rat::from_integer(binomial(k, i)) * pow_c;
                    next.insert_term(Exponent::new(base.clone()), coef_i);
                }
            }
            current = next;
        }
        Ok(current)
    }

    /// Substitute each variable by a polynomial in a possibly different ring.
    pub fn substitute(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.dim);
        let out_dim = images.first().map(|p| p.dim()).unwrap_or(0);
        let mut out = Polynomial::zero(out_dim);
        for (e, c) in &self.terms {
            let mut term = Polynomial::constant(out_dim, c.clone());
            for (j, &k) in e.entries().iter().enumerate() {
                if k > 0 {
                    term = term.mul(&images[j].pow(k));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Leading term under `order`.
    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Exponent, &Rat)> {
        self.terms.iter().max_by(|(a, _), (b, _)| order.cmp(a, b))
    }

    /// Divide every coefficient by the leading coefficient.
    pub fn monic(&self, order: &MonomialOrder) -> Polynomial {
        match self.leading_term(order) {
            None => self.clone(),
            Some((_, lc)) => {
                let inv = lc.recip();
                self.scale(&inv)
            }
        }
    }

    /// Render using the given variable names; inverse of [`parse_polynomial`].
    pub fn to_text(&self, vars: &[String]) -> String {
        assert_eq!(vars.len(), self.dim);
        if self.terms.is_empty() {
            return "0".to_string();
        }
        // print in descending grevlex order for readability
        let order = MonomialOrder::grevlex(self.dim);
        let mut keys: Vec<&Exponent> = self.terms.keys().collect();
        keys.sort_by(|a, b| order.cmp(b, a));
        let mut out = String::new();
        for (idx, e) in keys.iter().enumerate() {
            let c = &self.terms[*e];
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !abs.is_one() || e.is_zero() {
                factors.push(rat_to_string(&abs));
            }
            for (j, &k) in e.entries().iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(vars[j].clone()),
                    _ => factors.push(format!("{}^{}", vars[j], k)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars: Vec<String> = (0..self.dim).map(|j| format!("w{j}")).collect();
        write!(f, "{}", self.to_text(&vars))
    }
}

/// A finitely generated ideal, kept as an explicit generator list.
///
/// Generator order is preserved; no result of the toolkit may depend on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ideal {
    dim: usize,
    gens: Vec<Polynomial>,
}

impl Ideal {
    /// Build an ideal from generators, dropping zero polynomials.
    pub fn new(dim: usize, gens: Vec<Polynomial>) -> Result<Self> {
        let gens: Vec<Polynomial> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        if gens.is_empty() {
            return Err(Error::EmptyIdeal);
        }
        for g in &gens {
            if g.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.dim(),
                });
            }
        }
        Ok(Ideal { dim, gens })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    /// True when every generator is a single term.
    pub fn is_monomial(&self) -> bool {
        self.gens.iter().all(|g| g.is_monomial())
    }

    /// True when some generator has a nonzero constant term.
    pub fn has_constant_term(&self) -> bool {
        self.gens.iter().any(|g| !g.constant_term().is_zero())
    }

    /// All exponents appearing in any generator.
    pub fn support(&self) -> Vec<Exponent> {
        let mut out: Vec<Exponent> = Vec::new();
        for g in &self.gens {
            for (e, _) in g.terms() {
                out.push(e.clone());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    /// `f(omega + center)` applied to every generator.
    pub fn translate(&self, center: &[Rat]) -> Result<Ideal> {
        let gens = self
            .gens
            .iter()
            .map(|g| g.translate(center))
            .collect::<Result<Vec<_>>>()?;
        Ideal::new(self.dim, gens)
    }
}

/// JSON form of an ideal: `{"vars": [...], "gens": ["...", ...]}`.
#[derive(serde::Serialize, serde::Deserialize)]
pub struct IdealJson {
    pub vars: Vec<String>,
    pub gens: Vec<String>,
}

impl IdealJson {
    pub fn to_ideal(&self) -> Result<(Ideal, Vec<String>)> {
        let gens = self
            .gens
            .iter()
            .map(|g| parse_polynomial(g, &self.vars))
            .collect::<Result<Vec<_>>>()?;
        Ok((Ideal::new(self.vars.len(), gens)?, self.vars.clone()))
    }

    pub fn from_ideal(ideal: &Ideal, vars: &[String]) -> Self {
        IdealJson {
            vars: vars.to_vec(),
            gens: ideal.gens.iter().map(|g| g.to_text(vars)).collect(),
        }
    }
}
