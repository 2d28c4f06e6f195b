//! A small Buchberger engine over the rationals.
//!
//! Scope is deliberately modest: desk-scale inputs, sugar pair selection,
//! coefficient normalization, the coprime and chain criteria, and reduced
//! bases that are unique for the order. Saturation by the product of all
//! coordinates runs through the usual extra-variable elimination trick.

use super::{Exponent, Ideal, MonomialOrder, Polynomial, Rat};
use crate::{Error, Result};
use num_traits::One;
use std::collections::BTreeSet;

/// Remainder of `f` on division by `basis` under `order`.
pub fn normal_form(f: &Polynomial, basis: &[Polynomial], order: &MonomialOrder) -> Polynomial {
    let mut rem = Polynomial::zero(f.dim());
    let mut work = f.clone();
    let leads: Vec<(Exponent, Rat)> = basis
        .iter()
        .map(|g| {
            let (e, c) = g.leading_term(order).expect("nonzero basis element");
            (e.clone(), c.clone())
        })
        .collect();
    while let Some((le, lc)) = work
        .leading_term(order)
        .map(|(e, c)| (e.clone(), c.clone()))
    {
        let mut reduced = false;
        for (i, (ge, gc)) in leads.iter().enumerate() {
            if let Some(quot) = le.checked_sub(ge) {
                let scale = &lc / gc;
                work = work.sub(&basis[i].mul_term(&quot, &scale));
                reduced = true;
                break;
            }
        }
        if !reduced {
            // move the leading term into the remainder
            rem = rem.add(&Polynomial::monomial(le.clone(), lc.clone()));
            work = work.sub(&Polynomial::monomial(le, lc));
        }
    }
    rem
}

fn s_polynomial(f: &Polynomial, g: &Polynomial, order: &MonomialOrder) -> Polynomial {
    let (ef, cf) = f.leading_term(order).expect("nonzero");
    let (eg, cg) = g.leading_term(order).expect("nonzero");
    let l = ef.lcm(eg);
    let mf = l.checked_sub(ef).unwrap();
    let mg = l.checked_sub(eg).unwrap();
    let a = f.mul_term(&mf, &cf.recip());
    let b = g.mul_term(&mg, &cg.recip());
    a.sub(&b)
}

/// Buchberger with an optional budget on pair reductions.
///
/// Returns the reduced Gröbner basis, which is unique for the order.
pub fn buchberger_budgeted(
    ideal: &Ideal,
    order: &MonomialOrder,
    max_reductions: Option<usize>,
) -> Result<Ideal> {
    let dim = ideal.dim();
    let mut basis: Vec<Polynomial> = Vec::new();
    let mut sugar: Vec<u32> = Vec::new();
    for g in ideal.generators() {
        if !g.is_zero() {
            sugar.push(g.total_degree());
            basis.push(g.monic(order));
        }
    }
    if basis.is_empty() {
        return Err(Error::EmptyIdeal);
    }

    // pair queue keyed by (sugar, lcm) for the sugar selection strategy
    let mut pairs: BTreeSet<(u32, Exponent, usize, usize)> = BTreeSet::new();
    let enqueue = |pairs: &mut BTreeSet<(u32, Exponent, usize, usize)>,
                   basis: &[Polynomial],
                   sugar: &[u32],
                   i: usize,
                   j: usize| {
        let (ei, _) = basis[i].leading_term(order).unwrap();
        let (ej, _) = basis[j].leading_term(order).unwrap();
        let l = ei.lcm(ej);
        let s = (sugar[i] + (l.total_degree() - ei.total_degree()))
            .max(sugar[j] + (l.total_degree() - ej.total_degree()));
        pairs.insert((s, l, i, j));
    };
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            enqueue(&mut pairs, &basis, &sugar, i, j);
        }
    }

    let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut reductions = 0usize;
    while let Some(entry) = pairs.iter().next().cloned() {
        pairs.remove(&entry);
        let (pair_sugar, lcm, i, j) = entry;
        done.insert((i, j));

        let (ei, _) = basis[i].leading_term(order).unwrap();
        let (ej, _) = basis[j].leading_term(order).unwrap();
        // coprime criterion
        if ei.add(ej) == lcm {
            continue;
        }
        // chain criterion: some k with lt(k) | lcm and both pairs already handled
        let mut skip = false;
        for k in 0..basis.len() {
            if k == i || k == j {
                continue;
            }
            let (ek, _) = basis[k].leading_term(order).unwrap();
            if lcm.checked_sub(ek).is_some() {
                let a = (i.min(k), i.max(k));
                let b = (j.min(k), j.max(k));
                if done.contains(&a) && done.contains(&b) {
                    skip = true;
                    break;
                }
            }
        }
        if skip {
            continue;
        }

        if let Some(limit) = max_reductions {
            if reductions >= limit {
                return Err(Error::BudgetExhausted(format!(
                    "buchberger: {limit} pair reductions"
                )));
            }
        }
        reductions += 1;

        let s = s_polynomial(&basis[i], &basis[j], order);
        let r = normal_form(&s, &basis, order);
        if r.is_zero() {
            continue;
        }
        let new_idx = basis.len();
        sugar.push(pair_sugar.max(r.total_degree()));
        basis.push(r.monic(order));
        for k in 0..new_idx {
            enqueue(&mut pairs, &basis, &sugar, k, new_idx);
        }
    }

    // inter-reduce to the unique reduced basis
    let mut keep: Vec<Polynomial> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let (eg, _) = g.leading_term(order).unwrap();
        let redundant = basis.iter().enumerate().any(|(k, h)| {
            if k == i {
                return false;
            }
            let (eh, _) = h.leading_term(order).unwrap();
            eg.checked_sub(eh).is_some() && (eh != eg || k < i)
        });
        if !redundant {
            keep.push(g.clone());
        }
    }
    let mut reduced: Vec<Polynomial> = Vec::new();
    for i in 0..keep.len() {
        let others: Vec<Polynomial> = keep
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, h)| h.clone())
            .collect();
        let r = normal_form(&keep[i], &others, order);
        if !r.is_zero() {
            reduced.push(r.monic(order));
        }
    }
    reduced.sort_by(|a, b| {
        let (ea, _) = a.leading_term(order).unwrap();
        let (eb, _) = b.leading_term(order).unwrap();
        order.cmp(ea, eb)
    });
    Ideal::new(dim, reduced)
}

/// Reduced Gröbner basis of `ideal` under `order`.
pub fn buchberger(ideal: &Ideal, order: &MonomialOrder) -> Result<Ideal> {
    buchberger_budgeted(ideal, order, None)
}

/// True if the reduced Gröbner basis is `{1}`.
pub fn is_unit_ideal(ideal: &Ideal) -> bool {
    let order = MonomialOrder::grevlex(ideal.dim());
    match buchberger(ideal, &order) {
        Ok(gb) => gb.generators().len() == 1 && gb.generators()[0] == Polynomial::one(ideal.dim()),
        Err(_) => false,
    }
}

/// Membership test: does the Gröbner basis of `ideal` reduce `f` to zero?
pub fn ideal_contains(ideal: &Ideal, f: &Polynomial, order: &MonomialOrder) -> Result<bool> {
    let gb = buchberger(ideal, order)?;
    Ok(normal_form(f, gb.generators(), order).is_zero())
}

/// Saturation `(I : (w_1 ... w_d)^infty)` by the extra-variable trick:
/// adjoin `u`, add `u * w_1 ... w_d - 1`, and eliminate `u`.
pub fn saturate_by_coordinates(ideal: &Ideal) -> Result<Ideal> {
    saturate_by_coordinates_budgeted(ideal, None)
}

/// Budgeted saturation used by the nondegeneracy pipeline; the budget bounds
/// Buchberger pair reductions in the elimination step.
pub fn saturate_by_coordinates_budgeted(
    ideal: &Ideal,
    max_reductions: Option<usize>,
) -> Result<Ideal> {
    let d = ideal.dim();
    let ext = d + 1; // u sits at index d
    let mut gens: Vec<Polynomial> = Vec::new();
    for g in ideal.generators() {
        let mut lifted = Polynomial::zero(ext);
        for (e, c) in g.terms() {
            let mut entries = e.entries().to_vec();
            entries.push(0);
            lifted = lifted.add(&Polynomial::monomial(Exponent::new(entries), c.clone()));
        }
        gens.push(lifted);
    }
    // u * w_1 ... w_d - 1
    let all_ones = Exponent::new(vec![1; ext]);
    gens.push(Polynomial::monomial(all_ones, Rat::one()).sub(&Polynomial::one(ext)));

    let mut perm = vec![d];
    perm.extend(0..d);
    let order = MonomialOrder::elimination(1, perm);
    let gb = buchberger_budgeted(&Ideal::new(ext, gens)?, &order, max_reductions)?;

    let mut eliminated: Vec<Polynomial> = Vec::new();
    for g in gb.generators() {
        if g.terms().all(|(e, _)| e.get(d) == 0) {
            let mut proj = Polynomial::zero(d);
            for (e, c) in g.terms() {
                let entries = e.entries()[..d].to_vec();
                proj = proj.add(&Polynomial::monomial(Exponent::new(entries), c.clone()));
            }
            eliminated.push(proj);
        }
    }
    Ideal::new(d, eliminated)
}
