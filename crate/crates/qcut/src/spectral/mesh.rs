//! Piecewise-linear finite-element eigenvalue solver.
//!
//! Each segment is split into a uniform mesh; hat functions give the
//! stiffness and mass matrices of the variational form, with `β |f(v)|²`
//! terms landing on descendant diagonal entries and Dirichlet
//! descendants (marked `β = +∞`) eliminated. The smallest generalized
//! eigenvalue is computed by shift-and-invert iteration and improved by
//! Richardson extrapolation over two mesh levels, whose difference also
//! yields the error estimate.

use crate::subgraph::Subgraph;
use crate::{Error, Result};

use super::linalg;

/// Intervals per unit length at the coarse level.
pub(crate) const RESOLUTION: f64 = 64.0;

struct Assembled {
    k: Vec<Vec<f64>>,
    m: Vec<Vec<f64>>,
    /// DOF of each descendant; `None` when pinned.
    desc_dof: Vec<Option<usize>>,
    /// Per segment, the DOFs of its interior nodes.
    inner_dofs: Vec<Vec<usize>>,
    /// Per segment, its element count.
    elements: Vec<usize>,
}

fn assemble(domain: &Subgraph, beta: &[f64], resolution: f64) -> Assembled {
    let mut desc_dof = Vec::with_capacity(domain.descendants().len());
    let mut next = 0usize;
    for b in beta {
        if b.is_infinite() {
            desc_dof.push(None);
        } else {
            desc_dof.push(Some(next));
            next += 1;
        }
    }
    let mut inner_dofs = Vec::with_capacity(domain.segments().len());
    let mut elements = Vec::with_capacity(domain.segments().len());
    for seg in domain.segments() {
        let m = ((seg.length() * resolution).ceil() as usize).max(2);
        elements.push(m);
        let dofs: Vec<usize> = (0..m - 1)
            .map(|_| {
                let d = next;
                next += 1;
                d
            })
            .collect();
        inner_dofs.push(dofs);
    }
    let n = next;
    let mut k = vec![vec![0.0; n]; n];
    let mut m = vec![vec![0.0; n]; n];
    for (s, seg) in domain.segments().iter().enumerate() {
        let me = elements[s];
        let h = seg.length() / me as f64;
        let node = |j: usize| -> Option<usize> {
            if j == 0 {
                desc_dof[domain.owner(s, crate::graph::End::Lo)]
            } else if j == me {
                desc_dof[domain.owner(s, crate::graph::End::Hi)]
            } else {
                Some(inner_dofs[s][j - 1])
            }
        };
        for el in 0..me {
            let pair = [node(el), node(el + 1)];
            let kl = [[1.0 / h, -1.0 / h], [-1.0 / h, 1.0 / h]];
            let ml = [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]];
            for (i, &di) in pair.iter().enumerate() {
                let Some(di) = di else { continue };
                for (j, &dj) in pair.iter().enumerate() {
                    let Some(dj) = dj else { continue };
                    k[di][dj] += kl[i][j];
                    m[di][dj] += ml[i][j];
                }
            }
        }
    }
    for (d, &b) in beta.iter().enumerate() {
        if let Some(dof) = desc_dof[d] {
            if b != 0.0 {
                k[dof][dof] += b;
            }
        }
    }
    Assembled {
        k,
        m,
        desc_dof,
        inner_dofs,
        elements,
    }
}

fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(a, x)| a * x).sum())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(a, b)| a * b).sum()
}

/// Smallest generalized eigenpair of `K x = λ M x` via shift-and-invert
/// iteration with shift `-1` (the shifted matrix is positive definite
/// for `β ≥ 0`).
fn smallest_pair(k: &[Vec<f64>], m: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let n = k.len();
    if n == 0 {
        return Err(Error::InvalidSubgraph(
            "no degrees of freedom left after pinning".into(),
        ));
    }
    let a: Vec<Vec<f64>> = k
        .iter()
        .zip(m)
        .map(|(kr, mr)| kr.iter().zip(mr).map(|(k, m)| k + m).collect())
        .collect();
    let lu = linalg::factor(a);
    if lu.is_singular() {
        return Err(Error::NoConvergence("shifted stiffness singular".into()));
    }
    let mut x = vec![1.0; n];
    let mut lambda = f64::INFINITY;
    for _ in 0..200 {
        let y = lu.solve(&mat_vec(m, &x));
        let norm = dot(&y, &mat_vec(m, &y)).sqrt();
        if !(norm > 0.0) {
            return Err(Error::NoConvergence("inverse iteration collapsed".into()));
        }
        x = y.iter().map(|v| v / norm).collect();
        let new = dot(&x, &mat_vec(k, &x)) / dot(&x, &mat_vec(m, &x));
        if (new - lambda).abs() <= 1e-13 * new.abs().max(1.0) {
            lambda = new;
            break;
        }
        lambda = new;
    }
    Ok((lambda, x))
}

/// One mesh level: eigenvalue plus the P1 eigenfunction evaluated at
/// nine evenly spaced offsets per segment (parent-edge coordinates).
fn level(
    domain: &Subgraph,
    beta: &[f64],
    resolution: f64,
) -> Result<(f64, Vec<(usize, f64, f64)>)> {
    let asm = assemble(domain, beta, resolution);
    let (lambda, x) = smallest_pair(&asm.k, &asm.m)?;
    let sign = if x.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let value_at = |s: usize, j: usize| -> f64 {
        let me = asm.elements[s];
        let v = if j == 0 {
            asm.desc_dof[domain.owner(s, crate::graph::End::Lo)]
        } else if j == me {
            asm.desc_dof[domain.owner(s, crate::graph::End::Hi)]
        } else {
            Some(asm.inner_dofs[s][j - 1])
        };
        v.map_or(0.0, |d| sign * x[d])
    };
    let mut samples = Vec::with_capacity(9 * domain.segments().len());
    for (s, seg) in domain.segments().iter().enumerate() {
        let me = asm.elements[s];
        let h = seg.length() / me as f64;
        for j in 0..=8 {
            let t = seg.length() * j as f64 / 8.0;
            // P1 interpolation between the surrounding mesh nodes.
            let el = ((t / h).floor() as usize).min(me - 1);
            let frac = (t - el as f64 * h) / h;
            let v = value_at(s, el) * (1.0 - frac) + value_at(s, el + 1) * frac;
            samples.push((seg.edge, seg.lo + t, v));
        }
    }
    Ok((lambda, samples))
}

/// Two-level solve with Richardson extrapolation: the P1 eigenvalue
/// error is `O(h²)`, so `(4 λ_{h/2} − λ_h)/3` cancels the leading term
/// and `|λ_{h/2} − λ_h|/3` estimates the remaining error.
pub(crate) fn lambda1(
    domain: &Subgraph,
    beta: &[f64],
) -> Result<(f64, f64, Vec<(usize, f64, f64)>)> {
    let (coarse, _) = level(domain, beta, RESOLUTION)?;
    let (fine, samples) = level(domain, beta, 2.0 * RESOLUTION)?;
    let lambda = (4.0 * fine - coarse) / 3.0;
    let estimate = (fine - coarse).abs() / 3.0;
    let peak = samples
        .iter()
        .map(|&(_, _, v)| v)
        .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    let mut samples = samples;
    if peak != 0.0 {
        for s in samples.iter_mut() {
            s.2 /= peak;
        }
    }
    Ok((lambda, estimate, samples))
}
