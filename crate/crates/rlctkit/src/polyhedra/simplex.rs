//! Exact rational simplex solver for small standard-form programs.
//!
//! Two-phase method with Bland's rule, so it terminates on every input.
//! Used for polytope membership queries and as an independent route to the
//! tau-distance in tests.

use crate::algebra::Rat;
use num_traits::{One, Signed, Zero};

/// Outcome of a standard-form LP `min c.x  s.t.  A x = b, x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal { x: Vec<Rat>, value: Rat },
    Infeasible,
    Unbounded,
}

struct Tableau {
    a: Vec<Vec<Rat>>,
    b: Vec<Rat>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.a[row][col].clone();
        debug_assert!(!piv.is_zero());
        for v in self.a[row].iter_mut() {
            *v /= &piv;
        }
        self.b[row] /= &piv;
        for r in 0..self.a.len() {
            if r == row || self.a[r][col].is_zero() {
                continue;
            }
            let factor = self.a[r][col].clone();
            for c in 0..self.a[r].len() {
                let delta = &factor * &self.a[row][c];
                self.a[r][c] -= delta;
            }
            let delta = &factor * &self.b[row];
            self.b[r] -= delta;
        }
        self.basis[row] = col;
    }

    /// Minimize `cost . x` from the current basic feasible point (Bland's rule).
    /// Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rat], active_cols: usize) -> bool {
        loop {
            // reduced costs: c_j - c_B . B^{-1} A_j, computed from the tableau
            let cb: Vec<Rat> = self.basis.iter().map(|&j| cost[j].clone()).collect();
            let mut entering = None;
            for j in 0..active_cols {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut red = cost[j].clone();
                for (r, cbr) in cb.iter().enumerate() {
                    if !cbr.is_zero() {
                        red -= cbr * &self.a[r][j];
                    }
                }
                if red.is_negative() {
                    entering = Some(j);
                    break; // Bland: first improving index
                }
            }
            let Some(col) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..self.a.len() {
                if self.a[r][col].is_positive() {
                    let ratio = &self.b[r] / &self.a[r][col];
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// Solve `min c.x  s.t.  A x = b, x >= 0` exactly.
pub fn solve_standard(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> LpResult {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));

    // phase 1 tableau with one artificial per row; flip rows to make b >= 0
    let mut t = Tableau {
        a: Vec::with_capacity(m),
        b: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
    };
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row: Vec<Rat> = a[i]
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        row.extend((0..m).map(|k| if k == i { Rat::one() } else { Rat::zero() }));
        t.a.push(row);
        t.b.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.basis.push(n + i);
    }
    let mut phase1_cost = vec![Rat::zero(); n + m];
    for j in n..n + m {
        phase1_cost[j] = Rat::one();
    }
    let bounded = t.optimize(&phase1_cost, n + m);
    debug_assert!(bounded, "phase 1 is always bounded");
    let p1_value: Rat = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= n)
        .map(|(r, _)| t.b[r].clone())
        .sum();
    if !p1_value.is_zero() {
        return LpResult::Infeasible;
    }
    // drive surviving artificials out of the basis
    let mut drop_rows: Vec<usize> = Vec::new();
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| !t.a[r][j].is_zero()) {
                t.pivot(r, col);
            } else {
                drop_rows.push(r); // redundant constraint
            }
        }
    }
    for &r in drop_rows.iter().rev() {
        t.a.remove(r);
        t.b.remove(r);
        t.basis.remove(r);
    }
    for row in t.a.iter_mut() {
        row.truncate(n);
    }

    if !t.optimize(c, n) {
        return LpResult::Unbounded;
    }
    let mut x = vec![Rat::zero(); n];
    for (r, &j) in t.basis.iter().enumerate() {
        x[j] = t.b[r].clone();
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpResult::Optimal { x, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat_int};

    #[test]
    fn small_lp() {
        // min -x1 - x2 s.t. x1 + x2 + s = 1 -> value -1
        let a = vec![vec![rat_int(1), rat_int(1), rat_int(1)]];
        let b = vec![rat_int(1)];
        let c = vec![rat_int(-1), rat_int(-1), rat_int(0)];
        match solve_standard(&a, &b, &c) {
            LpResult::Optimal { value, .. } => assert_eq!(value, rat_int(-1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_lp() {
        // x1 = -1, x1 >= 0
        let a = vec![vec![rat_int(1)]];
        let b = vec![rat_int(-1)];
        let c = vec![rat_int(0)];
        assert_eq!(solve_standard(&a, &b, &c), LpResult::Infeasible);
    }

    #[test]
    fn unbounded_lp() {
        // min -x1 s.t. x1 - x2 = 0
        let a = vec![vec![rat_int(1), rat_int(-1)]];
        let b = vec![rat_int(0)];
        let c = vec![rat_int(-1), rat_int(0)];
        assert_eq!(solve_standard(&a, &b, &c), LpResult::Unbounded);
    }

    #[test]
    fn fractional_optimum() {
        // min x s.t. 2x + s = 1, minimize -x: x = 1/2
        let a = vec![vec![rat_int(2), rat_int(1)]];
        let b = vec![rat_int(1)];
        let c = vec![rat_int(-1), rat_int(0)];
        match solve_standard(&a, &b, &c) {
            LpResult::Optimal { x, value } => {
                assert_eq!(x[0], rat(1, 2));
                assert_eq!(value, rat(-1, 2));
            }
            other => panic!("{other:?}"),
        }
    }
}
