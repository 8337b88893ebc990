//! Small dense linear programming by the two-phase simplex method.
//!
//! Problems are stated in equality standard form: maximize `c·x` subject
//! to `A x = b`, `x ≥ 0`. Callers introduce their own slack and surplus
//! variables. Pivoting uses Bland's rule throughout, which makes every
//! solve deterministic and cycle-free; the problems in this crate have at
//! most a few hundred variables, where the simplicity of a dense tableau
//! beats any sparse machinery.

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Lp {
    /// Number of structural variables.
    pub n: usize,
    /// Row-major constraint matrix, `rows × n`.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    /// Objective coefficients (maximized).
    pub c: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible,
    Unbounded,
}

const EPS: f64 = 1e-9;
const PIVOT_EPS: f64 = 1e-11;

struct Tableau {
    /// `rows × (cols + 1)`; last column is the rhs.
    t: Vec<Vec<f64>>,
    /// Objective row (reduced costs), length `cols + 1`.
    obj: Vec<f64>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.t[row][col];
        for x in self.t[row].iter_mut() {
            *x /= piv;
        }
        let prow = self.t[row].clone();
        for (r, trow) in self.t.iter_mut().enumerate() {
            if r != row {
                let f = trow[col];
                if f != 0.0 {
                    for (x, p) in trow.iter_mut().zip(&prow) {
                        *x -= f * p;
                    }
                }
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (x, p) in self.obj.iter_mut().zip(&prow) {
                *x -= f * p;
            }
        }
        self.basis[row] = col;
    }

    /// Runs the simplex loop with Bland's rule on the active columns
    /// `0..active`. Returns false on unboundedness.
    fn optimize(&mut self, active: usize) -> bool {
        loop {
            // Entering: smallest index with positive reduced cost.
            let Some(col) = (0..active).find(|&j| self.obj[j] > EPS) else {
                return true;
            };
            // Leaving: minimum ratio, ties broken by smallest basis index.
            let mut best: Option<(usize, f64)> = None;
            for r in 0..self.t.len() {
                let a = self.t[r][col];
                if a > PIVOT_EPS {
                    let ratio = self.t[r][self.cols] / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - PIVOT_EPS
                                || (ratio < bratio + PIVOT_EPS
                                    && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return false,
            }
        }
    }
}

/// Solves the program. Errors only on malformed input (dimension
/// mismatches, non-finite data); infeasibility and unboundedness are
/// ordinary outcomes.
pub fn solve(lp: &Lp) -> Result<LpOutcome> {
    let m = lp.a.len();
    let n = lp.n;
    if lp.b.len() != m || lp.c.len() != n || lp.a.iter().any(|r| r.len() != n) {
        return Err(Error::Lp("dimension mismatch".into()));
    }
    if lp
        .a
        .iter()
        .flatten()
        .chain(&lp.b)
        .chain(&lp.c)
        .any(|x| !x.is_finite())
    {
        return Err(Error::Lp("non-finite coefficient".into()));
    }

    let cols = n + m; // structural + artificial
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(m);
    for (i, row) in lp.a.iter().enumerate() {
        let mut r = vec![0.0; cols + 1];
        let flip = lp.b[i] < 0.0;
        for (j, &v) in row.iter().enumerate() {
            r[j] = if flip { -v } else { v };
        }
        r[n + i] = 1.0;
        r[cols] = lp.b[i].abs();
        t.push(r);
    }
    let basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: maximize -(sum of artificials).
    let mut obj = vec![0.0; cols + 1];
    for j in 0..n {
        obj[j] = t.iter().map(|r| r[j]).sum();
    }
    obj[cols] = t.iter().map(|r| r[cols]).sum();

    let mut tab = Tableau {
        t,
        obj,
        basis,
        cols,
    };
    if !tab.optimize(n) {
        return Err(Error::Lp("phase-1 unbounded".into()));
    }
    if tab.obj[cols] > 1e-7 {
        return Ok(LpOutcome::Infeasible);
    }
    // Remove leftover artificials from the basis when possible.
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(col) = (0..n).find(|&j| tab.t[r][j].abs() > 1e-8) {
                tab.pivot(r, col);
            }
            // Otherwise the row is redundant; artificial stays basic at 0,
            // which is harmless since its column never re-enters.
        }
    }

    // Phase 2: the real objective, expressed over the current basis.
    let mut obj = vec![0.0; cols + 1];
    obj[..n].copy_from_slice(&lp.c);
    for r in 0..m {
        let bvar = tab.basis[r];
        if bvar < n {
            let f = obj[bvar];
            if f != 0.0 {
                let row = tab.t[r].clone();
                for (x, p) in obj.iter_mut().zip(&row) {
                    *x -= f * p;
                }
            }
        }
    }
    // The rhs cell accumulated -(objective value).
    tab.obj = obj;
    if !tab.optimize(n) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            x[tab.basis[r]] = tab.t[r][cols].max(0.0);
        }
    }
    let value = lp.c.iter().zip(&x).map(|(c, x)| c * x).sum();
    Ok(LpOutcome::Optimal { value, x })
}

/// Convenience: maximize `c·x` with `A x = b`, `0 ≤ x ≤ u` (upper bounds
/// handled by explicit slack rows).
pub fn solve_bounded(
    a: &[Vec<f64>],
    b: &[f64],
    c: &[f64],
    upper: &[f64],
) -> Result<LpOutcome> {
    let n = c.len();
    let m = a.len();
    let total = n + n; // x plus one slack per bound
    let mut rows = Vec::with_capacity(m + n);
    let mut rhs = Vec::with_capacity(m + n);
    for (row, &bi) in a.iter().zip(b) {
        let mut r = vec![0.0; total];
        r[..n].copy_from_slice(row);
        rows.push(r);
        rhs.push(bi);
    }
    for (j, &u) in upper.iter().enumerate() {
        let mut r = vec![0.0; total];
        r[j] = 1.0;
        r[n + j] = 1.0;
        rows.push(r);
        rhs.push(u);
    }
    let mut cc = vec![0.0; total];
    cc[..n].copy_from_slice(c);
    let out = solve(&Lp {
        n: total,
        a: rows,
        b: rhs,
        c: cc,
    })?;
    Ok(match out {
        LpOutcome::Optimal { value, x } => LpOutcome::Optimal {
            value,
            x: x[..n].to_vec(),
        },
        other => other,
    })
}
