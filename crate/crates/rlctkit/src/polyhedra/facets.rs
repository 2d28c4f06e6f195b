//! Facet enumeration for `conv(points) + R^d_{>=0}` in exact arithmetic.
//!
//! The polyhedron is homogenized to a pointed full-dimensional cone in
//! dimension d+1 (points at height 1, coordinate rays at height 0) and the
//! double description method builds its H-representation incrementally.
//! Facet normals automatically come out nonnegative because the coordinate
//! rays belong to the cone.

use crate::algebra::Exponent;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// One facet `<normal, x> >= offset` with a primitive nonnegative integer normal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<BigInt>,
    pub offset: BigInt,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn reduce_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        g = g.gcd(x);
    }
    if g > BigInt::from(1) {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

struct DdFacet {
    normal: Vec<BigInt>, // length d+1, primitive
    tight: u128,         // bitmask over processed generators
}

/// Facets of `conv(points) + orthant`. Points must be nonempty; duplicates
/// are tolerated. Supports up to 128 generators including the d rays.
pub fn hull_facets(points: &[Exponent], dim: usize) -> Vec<Facet> {
    assert!(!points.is_empty());
    let d = dim;
    let hd = d + 1;

    // generators of the homogenized cone: rays first, then lifted points
    let mut gens: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..d {
        let mut v = vec![BigInt::zero(); hd];
        v[j] = BigInt::from(1);
        gens.push(v);
    }
    let mut lifted: Vec<Vec<BigInt>> = points
        .iter()
        .map(|p| {
            let mut v: Vec<BigInt> = p.entries().iter().map(|&e| BigInt::from(e)).collect();
            v.push(BigInt::from(1));
            v
        })
        .collect();
    lifted.sort();
    lifted.dedup();
    gens.extend(lifted);
    assert!(
        gens.len() <= 128,
        "too many generators for the facet enumerator"
    );

    // initial simplicial cone: the d rays plus the first point g0
    let g0 = gens[d].clone();
    let mut facets: Vec<DdFacet> = Vec::new();
    for j in 0..d {
        // <h, e_i> = delta_ij, <h, (g0,1)> = 0
        let mut h = vec![BigInt::zero(); hd];
        h[j] = BigInt::from(1);
        h[d] = -g0[j].clone();
        facets.push(DdFacet {
            normal: h,
            tight: 0,
        });
    }
    facets.push(DdFacet {
        normal: {
            let mut h = vec![BigInt::zero(); hd];
            h[d] = BigInt::from(1);
            h
        },
        tight: 0,
    });

    let mark_tight = |facets: &mut Vec<DdFacet>, gens: &[Vec<BigInt>], upto: usize| {
        for f in facets.iter_mut() {
            f.tight = 0;
            for (i, g) in gens.iter().take(upto).enumerate() {
                if dot(&f.normal, g).is_zero() {
                    f.tight |= 1u128 << i;
                }
            }
        }
    };
    mark_tight(&mut facets, &gens, d + 1);

    for next in (d + 1)..gens.len() {
        let v = &gens[next];
        let vals: Vec<BigInt> = facets.iter().map(|f| dot(&f.normal, v)).collect();
        if vals.iter().all(|s| !s.is_negative()) {
            for (f, s) in facets.iter_mut().zip(&vals) {
                if s.is_zero() {
                    f.tight |= 1u128 << next;
                }
            }
            continue;
        }
        let mut new_facets: Vec<DdFacet> = Vec::new();
        for (i, si) in vals.iter().enumerate() {
            if !si.is_negative() {
                continue;
            }
            for (j, sj) in vals.iter().enumerate() {
                if !sj.is_positive() {
                    continue;
                }
                // adjacency: no third facet is tight on everything common to i and j
                let common = facets[i].tight & facets[j].tight;
                let adjacent = !facets
                    .iter()
                    .enumerate()
                    .any(|(k, f)| k != i && k != j && f.tight & common == common);
                if !adjacent {
                    continue;
                }
                // combination vanishing on v, nonnegative on all processed generators
                let mut h: Vec<BigInt> = (0..hd)
                    .map(|t| sj * &facets[i].normal[t] - si * &facets[j].normal[t])
                    .collect();
                reduce_primitive(&mut h);
                if !new_facets.iter().any(|f| f.normal == h) {
                    // tight mask is recomputed exactly after the insertion
                    new_facets.push(DdFacet {
                        normal: h,
                        tight: common | (1u128 << next),
                    });
                }
            }
        }
        let mut kept: Vec<DdFacet> = Vec::new();
        for (f, s) in facets.into_iter().zip(vals.iter()) {
            if s.is_positive() {
                kept.push(f);
            } else if s.is_zero() {
                let mut f = f;
                f.tight |= 1u128 << next;
                kept.push(f);
            }
        }
        kept.extend(new_facets);
        facets = kept;
        // recompute tight sets exactly (combination masks are conservative)
        mark_tight(&mut facets, &gens, next + 1);
    }

    let mut out: Vec<Facet> = Vec::new();
    for f in facets {
        if f.normal[..d].iter().all(|x| x.is_zero()) {
            continue; // facet at infinity
        }
        debug_assert!(f.normal[..d].iter().all(|x| !x.is_negative()));
        // primitivity of the homogeneous vector implies primitivity of the
        // normal here: the offset is an integer combination of the entries
        let normal = f.normal[..d].to_vec();
        let offset = -f.normal[d].clone();
        debug_assert_eq!(offset, min_support(&normal, points));
        out.push(Facet { normal, offset });
    }
    out.sort_by(|a, b| (&a.normal, &a.offset).cmp(&(&b.normal, &b.offset)));
    out.dedup();
    out
}

/// `min_g <normal, g>` over the point generators.
pub fn min_support(normal: &[BigInt], points: &[Exponent]) -> BigInt {
    points
        .iter()
        .map(|p| {
            normal
                .iter()
                .zip(p.entries())
                .map(|(n, &e)| n * BigInt::from(e))
                .sum::<BigInt>()
        })
        .min()
        .expect("nonempty points")
}

/// Rank over the rationals of a list of integer vectors.
pub fn int_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.to_vec();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    let mut col = 0;
    while rank < m.len() && col < ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            col += 1;
            continue;
        };
        m.swap(rank, pivot);
        let (pivot_row, rest) = {
            let (head, tail) = m.split_at_mut(rank + 1);
            (&head[rank], tail)
        };
        let p = pivot_row[col].clone();
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for c in col..ncols {
                row[c] = &row[c] * &p - &f * &pivot_row[c];
            }
        }
        rank += 1;
        col += 1;
    }
    rank
}
