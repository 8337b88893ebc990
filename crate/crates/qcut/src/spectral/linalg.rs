//! Dense LU factorization with partial pivoting, shared by the secular
//! determinant sign scans and the finite-element solves. Matrices here
//! are small (a few hundred rows), so a dense factorization is both
//! simplest and fastest.

/// Row-major LU factorization `P A = L U`.
pub(crate) struct Lu {
    lu: Vec<Vec<f64>>,
    piv: Vec<usize>,
    /// Sign of the row permutation; `0` marks a singular factorization.
    perm_sign: i32,
    /// Largest absolute entry of the input, for the singularity scale.
    scale: f64,
}

const SINGULAR_REL: f64 = 1e-13;

pub(crate) fn factor(mut a: Vec<Vec<f64>>) -> Lu {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |m, &x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let mut piv = Vec::with_capacity(n);
    let mut perm_sign = 1i32;
    for col in 0..n {
        let (best, mag) = (col..n)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if mag <= SINGULAR_REL * scale {
            perm_sign = 0;
        }
        if best != col {
            a.swap(best, col);
            perm_sign = -perm_sign;
        }
        piv.push(best);
        let p = a[col][col];
        if p != 0.0 {
            for r in col + 1..n {
                let f = a[r][col] / p;
                a[r][col] = f;
                if f != 0.0 {
                    let (top, bottom) = a.split_at_mut(r);
                    let prow = &top[col];
                    for (x, y) in bottom[0][col + 1..].iter_mut().zip(&prow[col + 1..]) {
                        *x -= f * y;
                    }
                }
            }
        }
    }
    Lu {
        lu: a,
        piv,
        perm_sign,
        scale,
    }
}

impl Lu {
    pub(crate) fn is_singular(&self) -> bool {
        self.perm_sign == 0
    }

    /// Sign of the determinant: `-1`, `0`, or `1`.
    pub(crate) fn det_sign(&self) -> i32 {
        if self.perm_sign == 0 {
            return 0;
        }
        let mut s = self.perm_sign;
        for (i, row) in self.lu.iter().enumerate() {
            let d = row[i];
            if d.abs() <= SINGULAR_REL * self.scale {
                return 0;
            }
            if d < 0.0 {
                s = -s;
            }
        }
        s
    }

    /// Solves `A x = b`. Singular pivots are relaxed to the singularity
    /// threshold, which is exactly what inverse iteration on a nearly
    /// singular matrix wants: the null direction dominates the solution.
    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut x = b.to_vec();
        for i in 0..n {
            x.swap(i, self.piv[i]);
            for j in 0..i {
                let f = self.lu[i][j];
                if f != 0.0 {
                    x[i] -= f * x[j];
                }
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i][j] * x[j];
            }
            let mut d = self.lu[i][i];
            if d.abs() <= SINGULAR_REL * self.scale {
                d = if d < 0.0 { -1.0 } else { 1.0 } * SINGULAR_REL * self.scale;
            }
            x[i] /= d;
        }
        x
    }
}
