//! Newton polyhedra of ideals: minimal monomial generators, exact facet
//! descriptions, compact-face enumeration, and the tau-distance with its
//! multiplicity.
//!
//! The polyhedron of an ideal is `conv(support) + R^d_{>=0}`, computed from
//! the exponents appearing in the generators; this matches the monomial
//! ideal `mon(I)`, so the result is invariant under change of generators.

mod facets;
pub mod simplex;

pub use facets::{hull_facets, int_rank, min_support, Facet};

use crate::algebra::{Exponent, Ideal, Rat};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

/// A face of a Newton polyhedron, recorded by its witness supporting data.
#[derive(Debug, Clone)]
pub struct Face {
    /// Witness supporting normal; strictly positive entries iff the face is
    /// compact (it is the sum of the active facet normals).
    pub supporting_normal: Vec<BigInt>,
    /// Value of the support function at the face: `<normal, x>` for `x` on it.
    pub offset: BigInt,
    /// Point generators lying on the face.
    pub active_generators: Vec<Exponent>,
    /// Coordinate recession directions contained in the face.
    pub tight_rays: Vec<usize>,
    pub dim: usize,
    pub compact: bool,
}

/// Distance data for the ray `t * (tau + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauDistance {
    pub l: Rat,
    /// Codimension of the face at the intersection; undefined when `l = 0`.
    pub theta: Option<usize>,
}

/// Newton polyhedron `conv(point_generators) + orthant` with exact facets.
#[derive(Debug, Clone)]
pub struct NewtonPolyhedron {
    dim: usize,
    point_generators: Vec<Exponent>,
    facets: Vec<Facet>,
}

/// Antichain of componentwise-minimal exponents (Dickson's lemma picks
/// finitely many; these generate the same monomial ideal).
pub fn minimal_monomial_generators(exponents: &[Exponent]) -> Vec<Exponent> {
    let mut sorted: Vec<Exponent> = exponents.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut keep: Vec<Exponent> = Vec::new();
    for e in &sorted {
        if !sorted.iter().any(|f| f != e && e.dominates(f)) {
            keep.push(e.clone());
        }
    }
    keep
}

/// Newton polyhedron of an ideal from the exponents of its generators.
pub fn newton_polyhedron(ideal: &Ideal) -> Result<NewtonPolyhedron> {
    let support = ideal.support();
    if support.is_empty() {
        return Err(Error::ZeroIdeal);
    }
    let gens = minimal_monomial_generators(&support);
    let facets = hull_facets(&gens, ideal.dim());
    Ok(NewtonPolyhedron {
        dim: ideal.dim(),
        point_generators: gens,
        facets,
    })
}

/// Polyhedron of an explicit exponent set (used for single polynomials).
pub fn newton_polyhedron_of_exponents(
    dim: usize,
    exponents: &[Exponent],
) -> Result<NewtonPolyhedron> {
    if exponents.is_empty() {
        return Err(Error::ZeroIdeal);
    }
    let gens = minimal_monomial_generators(exponents);
    let facets = hull_facets(&gens, dim);
    Ok(NewtonPolyhedron {
        dim,
        point_generators: gens,
        facets,
    })
}

impl NewtonPolyhedron {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point_generators(&self) -> &[Exponent] {
        &self.point_generators
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Does the point (given as rationals) satisfy every facet inequality?
    pub fn contains(&self, point: &[Rat]) -> bool {
        self.facets.iter().all(|f| {
            let lhs: Rat = f
                .normal
                .iter()
                .zip(point)
                .map(|(n, x)| Rat::from_integer(n.clone()) * x)
                .sum();
            lhs >= Rat::from_integer(f.offset.clone())
        })
    }

    /// Face determined by a set of facet indices (`None` when empty).
    fn face_from_active(&self, active: &[usize]) -> Option<Face> {
        let tight_gens: Vec<Exponent> = self
            .point_generators
            .iter()
            .filter(|g| {
                active.iter().all(|&i| {
                    let f = &self.facets[i];
                    min_point_value(&f.normal, g) == f.offset
                })
            })
            .cloned()
            .collect();
        if tight_gens.is_empty() {
            return None;
        }
        let tight_rays: Vec<usize> = (0..self.dim)
            .filter(|&j| active.iter().all(|&i| self.facets[i].normal[j].is_zero()))
            .collect();
        // closure: every facet tight on the whole face
        let closure: Vec<usize> = (0..self.facets.len())
            .filter(|&k| {
                let f = &self.facets[k];
                tight_gens
                    .iter()
                    .all(|g| min_point_value(&f.normal, g) == f.offset)
                    && tight_rays.iter().all(|&j| f.normal[j].is_zero())
            })
            .collect();
        if closure.is_empty() {
            return None; // the improper face (whole polyhedron)
        }
        let mut normal = vec![BigInt::zero(); self.dim];
        let mut offset = BigInt::zero();
        for &i in &closure {
            for (t, n) in normal.iter_mut().zip(&self.facets[i].normal) {
                *t += n;
            }
            offset += &self.facets[i].offset;
        }
        // dimension: directions between tight generators plus tight rays
        let base = &tight_gens[0];
        let mut dirs: Vec<Vec<BigInt>> = tight_gens
            .iter()
            .skip(1)
            .map(|g| {
                g.entries()
                    .iter()
                    .zip(base.entries())
                    .map(|(&a, &b)| BigInt::from(a) - BigInt::from(b))
                    .collect()
            })
            .collect();
        for &j in &tight_rays {
            let mut e = vec![BigInt::zero(); self.dim];
            e[j] = BigInt::from(1);
            dirs.push(e);
        }
        let dim = int_rank(&dirs);
        let compact = tight_rays.is_empty();
        Some(Face {
            supporting_normal: normal,
            offset,
            active_generators: tight_gens,
            tight_rays,
            dim,
            compact,
        })
    }

    /// Smallest `t >= 0` with `t(tau+1)` in the polyhedron, together with
    /// the face met there. `theta` is the codimension of that face (the rank
    /// of the active facet normals); it is undefined when `l = 0`.
    pub fn tau_distance(&self, tau: &Exponent) -> (TauDistance, Face) {
        assert_eq!(tau.dim(), self.dim);
        let w: Vec<BigInt> = tau.entries().iter().map(|&t| BigInt::from(t + 1)).collect();
        let mut l = Rat::zero();
        for f in &self.facets {
            if f.offset.is_positive() {
                let denom: BigInt = f.normal.iter().zip(&w).map(|(n, x)| n * x).sum();
                let cand = Rat::new(f.offset.clone(), denom);
                if cand > l {
                    l = cand;
                }
            }
        }
        if l.is_zero() {
            // origin belongs to the polyhedron; report its face with theta undefined
            let active: Vec<usize> = (0..self.facets.len())
                .filter(|&i| self.facets[i].offset.is_zero())
                .collect();
            let face = self
                .face_from_active(&active)
                .expect("origin face is nonempty");
            return (TauDistance { l, theta: None }, face);
        }
        // active facets at x* = l (tau+1): offset / <normal, w> == l
        let active: Vec<usize> = (0..self.facets.len())
            .filter(|&i| {
                let f = &self.facets[i];
                if !f.offset.is_positive() {
                    return false;
                }
                let denom: BigInt = f.normal.iter().zip(&w).map(|(n, x)| n * x).sum();
                Rat::new(f.offset.clone(), denom) == l
            })
            .collect();
        let normals: Vec<Vec<BigInt>> = active
            .iter()
            .map(|&i| self.facets[i].normal.clone())
            .collect();
        let theta = int_rank(&normals);
        let face = self
            .face_from_active(&active)
            .expect("intersection face is nonempty");
        (
            TauDistance {
                l,
                theta: Some(theta),
            },
            face,
        )
    }

    /// All compact faces, discovered by closing facet intersections.
    pub fn compact_faces(&self) -> Vec<Face> {
        let nf = self.facets.len();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue: Vec<Vec<usize>> = Vec::new();
        let mut out: Vec<Face> = Vec::new();
        // seed with single facets
        for i in 0..nf {
            if let Some(face) = self.face_from_active(&[i]) {
                let key = self.closure_key(&face);
                if seen.insert(key.clone()) {
                    queue.push(key.clone());
                    if face.compact {
                        out.push(face);
                    }
                }
            }
        }
        while let Some(active) = queue.pop() {
            for i in 0..nf {
                if active.contains(&i) {
                    continue;
                }
                let mut next = active.clone();
                next.push(i);
                if let Some(face) = self.face_from_active(&next) {
                    let key = self.closure_key(&face);
                    if seen.insert(key.clone()) {
                        queue.push(key.clone());
                        if face.compact {
                            out.push(face);
                        }
                    }
                }
            }
        }
        out.sort_by_key(|f| (f.dim, f.active_generators.clone()));
        out
    }

    fn closure_key(&self, face: &Face) -> Vec<usize> {
        (0..self.facets.len())
            .filter(|&k| {
                let f = &self.facets[k];
                face.active_generators
                    .iter()
                    .all(|g| min_point_value(&f.normal, g) == f.offset)
                    && face.tight_rays.iter().all(|&j| f.normal[j].is_zero())
            })
            .collect()
    }

    /// JSON form: `{"generators": [[..]], "facets": [{"normal": [..], "offset": "c"}]}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "generators": self.point_generators.iter().map(|g| g.entries().to_vec()).collect::<Vec<_>>(),
            "facets": self.facets.iter().map(|f| serde_json::json!({
                "normal": f.normal.iter().map(|n| n.to_string().parse::<i64>().map(serde_json::Value::from).unwrap_or_else(|_| serde_json::Value::from(n.to_string()))).collect::<Vec<_>>(),
                "offset": f.offset.to_string(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn min_point_value(normal: &[BigInt], g: &Exponent) -> BigInt {
    normal
        .iter()
        .zip(g.entries())
        .map(|(n, &e)| n * BigInt::from(e))
        .sum()
}

/// Membership of a rational point in `conv(gens) + orthant`, decided by an
/// exact feasibility LP (independent of the facet description).
pub fn contains_by_lp(gens: &[Exponent], dim: usize, point: &[Rat]) -> bool {
    use simplex::{solve_standard, LpResult};
    // sum_g lambda_g g + s = point, sum lambda = 1, lambda, s >= 0
    let n = gens.len() + dim;
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(dim + 1);
    for j in 0..dim {
        let mut row = Vec::with_capacity(n);
        for g in gens {
            row.push(Rat::from_integer(BigInt::from(g.get(j))));
        }
        for k in 0..dim {
            row.push(if k == j {
                Rat::from_integer(BigInt::from(1))
            } else {
                Rat::zero()
            });
        }
        a.push(row);
    }
    let mut row = vec![Rat::from_integer(BigInt::from(1)); gens.len()];
    row.extend(std::iter::repeat_n(Rat::zero(), dim));
    a.push(row);
    let mut b: Vec<Rat> = point.to_vec();
    b.push(Rat::from_integer(BigInt::from(1)));
    let c = vec![Rat::zero(); n];
    matches!(solve_standard(&a, &b, &c), LpResult::Optimal { .. })
}

/// Tau-distance through the membership LP: `min t` with
/// `t(tau+1) - sum lambda_g g - s = 0`, `sum lambda = 1`. Independent of the
/// facet description; used to cross-check `tau_distance`.
pub fn tau_distance_by_lp(gens: &[Exponent], dim: usize, tau: &Exponent) -> Rat {
    use simplex::{solve_standard, LpResult};
    let n = 1 + gens.len() + dim;
    let mut a: Vec<Vec<Rat>> = Vec::with_capacity(dim + 1);
    for j in 0..dim {
        let mut row = Vec::with_capacity(n);
        row.push(Rat::from_integer(BigInt::from(tau.get(j) + 1)));
        for g in gens {
            row.push(-Rat::from_integer(BigInt::from(g.get(j))));
        }
        for k in 0..dim {
            row.push(if k == j {
                -Rat::from_integer(BigInt::from(1))
            } else {
                Rat::zero()
            });
        }
        a.push(row);
    }
    let mut row = vec![Rat::zero()];
    row.extend(std::iter::repeat_n(
        Rat::from_integer(BigInt::from(1)),
        gens.len(),
    ));
    row.extend(std::iter::repeat_n(Rat::zero(), dim));
    a.push(row);
    let mut b = vec![Rat::zero(); dim];
    b.push(Rat::from_integer(BigInt::from(1)));
    let mut c = vec![Rat::zero(); n];
    c[0] = Rat::from_integer(BigInt::from(1));
    match solve_standard(&a, &b, &c) {
        LpResult::Optimal { value, .. } => value,
        other => panic!("tau LP must be feasible and bounded, got {other:?}"),
    }
}
