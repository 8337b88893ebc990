//! Secular-determinant eigenvalue solver.
//!
//! On every segment the eigenfunction is a combination of the
//! fundamental solutions `c(t) = cos(√λ t)` and `s(t) = sin(√λ t)/√λ`
//! of `-f'' = λ f`. Both are entire functions of `λ`, so the system
//! matrix is well defined at `λ = 0` and below, which is exactly where
//! the small-coupling studies operate. Vertex blocks contribute
//! continuity rows plus one flux row `Σ ∂f_inward = β f` (or value
//! pins for Dirichlet descendants, marked by `β = +∞`). The smallest
//! eigenvalue is the first sign change of `det`, bisected to tolerance.

use crate::graph::End;
use crate::subgraph::Subgraph;
use crate::{Error, Result};

use super::linalg;

/// Entire basis values `(c, s)` at offset `t`, with a Taylor branch
/// around `λ t² = 0` where the closed forms lose precision.
pub(crate) fn basis(lambda: f64, t: f64) -> (f64, f64) {
    let z = lambda * t * t;
    if z.abs() < 1e-6 {
        let c = 1.0 - z / 2.0 + z * z / 24.0 - z * z * z / 720.0;
        let s = t * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0);
        (c, s)
    } else if lambda > 0.0 {
        let w = lambda.sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    } else {
        let w = (-lambda).sqrt();
        ((w * t).cosh(), (w * t).sinh() / w)
    }
}

/// Assembles the `2S × 2S` secular matrix at `λ`. Unknowns per segment:
/// `f(x) = A c(x) + B s(x)` with `f(0) = A`, `f'(0) = B`,
/// `f(ℓ) = A c(ℓ) + B s(ℓ)`, `f'(ℓ) = -λ A s(ℓ) + B c(ℓ)`.
fn matrix(domain: &Subgraph, beta: &[f64], lambda: f64) -> Vec<Vec<f64>> {
    let n = 2 * domain.segments().len();
    let mut m = Vec::with_capacity(n);
    // (value row, inward-derivative row) coefficient pairs per (seg, end).
    let coef = |seg: usize, end: End| -> ([f64; 2], [f64; 2]) {
        match end {
            End::Lo => ([1.0, 0.0], [0.0, 1.0]),
            End::Hi => {
                let l = domain.segments()[seg].length();
                let (c, s) = basis(lambda, l);
                ([c, s], [lambda * s, -c])
            }
        }
    };
    for (d, desc) in domain.descendants().iter().enumerate() {
        let ends = &desc.ends;
        if beta[d].is_infinite() {
            for &(seg, end) in ends {
                let (val, _) = coef(seg, end);
                let mut row = vec![0.0; n];
                row[2 * seg] = val[0];
                row[2 * seg + 1] = val[1];
                m.push(row);
            }
            continue;
        }
        let (first_val, _) = coef(ends[0].0, ends[0].1);
        for &(seg, end) in &ends[1..] {
            let (val, _) = coef(seg, end);
            let mut row = vec![0.0; n];
            row[2 * ends[0].0] += first_val[0];
            row[2 * ends[0].0 + 1] += first_val[1];
            row[2 * seg] -= val[0];
            row[2 * seg + 1] -= val[1];
            m.push(row);
        }
        let mut row = vec![0.0; n];
        for &(seg, end) in ends {
            let (_, der) = coef(seg, end);
            row[2 * seg] += der[0];
            row[2 * seg + 1] += der[1];
        }
        row[2 * ends[0].0] -= beta[d] * first_val[0];
        row[2 * ends[0].0 + 1] -= beta[d] * first_val[1];
        m.push(row);
    }
    m
}

fn det_sign(domain: &Subgraph, beta: &[f64], lambda: f64) -> i32 {
    linalg::factor(matrix(domain, beta, lambda)).det_sign()
}

/// Finds the smallest root of the secular determinant by a fixed-step
/// scan and bisection. The step `(π / 2L)²` is below the spacing of the
/// low graph eigenvalues, so the first sign change brackets the first
/// root.
pub(crate) fn lambda1(domain: &Subgraph, beta: &[f64], tol: f64) -> Result<(f64, f64)> {
    let total = domain.total_length();
    let step = (std::f64::consts::PI / (2.0 * total)).powi(2);
    let min_len = domain
        .segments()
        .iter()
        .map(|s| s.length())
        .fold(f64::INFINITY, f64::min);
    let nseg = domain.segments().len() as f64;
    let cap = ((nseg + 2.0) * std::f64::consts::PI / min_len).powi(2);
    let mut lo = 0.0f64;
    let mut s_lo = det_sign(domain, beta, lo);
    if s_lo == 0 {
        return Ok((0.0, 0.0));
    }
    let mut hi = 0.0;
    loop {
        hi += step;
        if hi > cap {
            return Err(Error::NoConvergence(format!(
                "no determinant sign change below λ = {cap:.3e}; best bracket starts at {lo:.6e}"
            )));
        }
        let s_hi = det_sign(domain, beta, hi);
        if s_hi == 0 {
            return Ok((hi, tol));
        }
        if s_hi != s_lo {
            break;
        }
        lo = hi;
        s_lo = s_hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let s_mid = det_sign(domain, beta, mid);
        if s_mid == 0 {
            return Ok((mid, tol));
        }
        if s_mid == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), 0.5 * (hi - lo)))
}

/// Extracts the eigenfunction at the found root by inverse iteration on
/// the (nearly singular) secular matrix, then samples it at nine evenly
/// spaced offsets per segment, reported in parent-edge coordinates and
/// scaled so the largest sample is `+1`.
pub(crate) fn eigenfunction(
    domain: &Subgraph,
    beta: &[f64],
    lambda: f64,
) -> Vec<(usize, f64, f64)> {
    let n = 2 * domain.segments().len();
    let lu = linalg::factor(matrix(domain, beta, lambda));
    let mut x = vec![1.0; n];
    for _ in 0..4 {
        let y = lu.solve(&x);
        let norm = y.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if norm == 0.0 || !norm.is_finite() {
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
    }
    let mut samples = Vec::with_capacity(9 * domain.segments().len());
    for (s, seg) in domain.segments().iter().enumerate() {
        let (a, b) = (x[2 * s], x[2 * s + 1]);
        for j in 0..=8 {
            let t = seg.length() * j as f64 / 8.0;
            let (c, sv) = basis(lambda, t);
            samples.push((seg.edge, seg.lo + t, a * c + b * sv));
        }
    }
    let peak = samples
        .iter()
        .map(|&(_, _, v)| v)
        .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if peak != 0.0 {
        for s in samples.iter_mut() {
            s.2 /= peak;
        }
    }
    samples
}
