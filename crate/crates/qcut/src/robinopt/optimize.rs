//! Per-class minimization of the worst part eigenvalue.
//!
//! The free variables are the interior cut positions on every multi-tile
//! edge. Candidates are projected onto the feasible box (clamped to the
//! edge, sorted), realized through the class, and scored by the largest
//! part eigenvalue. Realizations that lose a part or disconnect one score
//! `+∞`, which keeps the search inside the class.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cheeger::{self, ShareProgram};
use crate::class::ConfigClass;
use crate::subgraph::BoundaryMode;
use crate::Result;

use super::{part_lambda, ClassMinimum, Coupling, OptimizerOptions};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
/// Largest coupling at which the Cheeger allocation seeds the search.
const WARM_START_ALPHA: f64 = 0.1;
/// Golden-section iterations per coordinate visit.
const GOLDEN_ITERS: usize = 32;
/// Initial simplex offset as a fraction of the edge length.
const SIMPLEX_SCALE: f64 = 0.08;

/// Layout of the free cut positions: one block of `tiles − 1` ascending
/// offsets per edge carrying more than one tile.
struct VarMap {
    /// `(edge, tile count, edge length)` for each multi-tile edge.
    edges: Vec<(usize, usize, f64)>,
}

impl VarMap {
    fn from_class(class: &ConfigClass) -> VarMap {
        let graph = class.parent();
        let edges = class
            .labels()
            .iter()
            .enumerate()
            .filter(|(_, seq)| seq.len() >= 2)
            .map(|(e, seq)| (e, seq.len(), graph.edge(e).length))
            .collect();
        VarMap { edges }
    }

    fn dim(&self) -> usize {
        self.edges.iter().map(|&(_, m, _)| m - 1).sum()
    }

    fn project(&self, x: &mut [f64]) {
        let mut ix = 0;
        for &(_, m, len) in &self.edges {
            let cuts = &mut x[ix..ix + m - 1];
            for c in cuts.iter_mut() {
                *c = c.clamp(0.0, len);
            }
            cuts.sort_by(f64::total_cmp);
            ix += m - 1;
        }
    }

    /// Expands cut positions into a realize-ready length row per edge.
    fn lengths(&self, class: &ConfigClass, x: &[f64]) -> Vec<Vec<f64>> {
        let graph = class.parent();
        let mut rows: Vec<Vec<f64>> = class
            .labels()
            .iter()
            .enumerate()
            .map(|(e, seq)| {
                if seq.len() == 1 {
                    vec![graph.edge(e).length]
                } else {
                    Vec::new()
                }
            })
            .collect();
        let mut ix = 0;
        for &(e, m, len) in &self.edges {
            let cuts = &x[ix..ix + m - 1];
            let mut row = Vec::with_capacity(m);
            let mut prev = 0.0;
            for &c in cuts {
                row.push(c - prev);
                prev = c;
            }
            row.push(len - prev);
            rows[e] = row;
            ix += m - 1;
        }
        rows
    }

    /// Inverse of [`VarMap::lengths`]: prefix sums of the length rows.
    fn positions(&self, lengths: &[Vec<f64>]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim());
        for &(e, m, _) in &self.edges {
            let mut acc = 0.0;
            for i in 0..m - 1 {
                acc += lengths[e][i];
                x.push(acc);
            }
        }
        x
    }

    /// Per-variable scale for the initial simplex.
    fn scales(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for &(_, m, len) in &self.edges {
            for _ in 0..m - 1 {
                out.push(SIMPLEX_SCALE * len);
            }
        }
        out
    }

    /// Sliding bounds of variable `j` given its in-edge neighbours.
    fn bounds_of(&self, x: &[f64], j: usize) -> (f64, f64) {
        let mut ix = 0;
        for &(_, m, len) in &self.edges {
            let n = m - 1;
            if j < ix + n {
                let lo = if j == ix { 0.0 } else { x[j - 1] };
                let hi = if j == ix + n - 1 { len } else { x[j + 1] };
                return (lo, hi);
            }
            ix += n;
        }
        unreachable!("variable index out of range");
    }
}

/// Shared state of one per-class search.
struct Search<'a> {
    class: &'a ConfigClass,
    vm: VarMap,
    coupling: Coupling,
    opts: &'a OptimizerOptions,
    evals: std::cell::Cell<usize>,
}

impl Search<'_> {
    /// The worst part eigenvalue at `x`, `+∞` for candidates that leave
    /// the class (lost part, disconnection, solver failure).
    fn score(&self, x: &[f64]) -> f64 {
        self.evals.set(self.evals.get() + 1);
        let mut xp = x.to_vec();
        self.vm.project(&mut xp);
        let lengths = self.vm.lengths(self.class, &xp);
        let Ok(partition) = self.class.realize(&lengths) else {
            return f64::INFINITY;
        };
        if partition.k() < self.class.k() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for part in partition.parts() {
            match part_lambda(part, self.coupling, self.opts.method, self.opts.eig_tol) {
                Ok(l) => worst = worst.max(l),
                Err(_) => return f64::INFINITY,
            }
        }
        worst
    }

    /// Score plus the full eigenvalue vector, for diagnostics.
    fn lambdas(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut xp = x.to_vec();
        self.vm.project(&mut xp);
        let lengths = self.vm.lengths(self.class, &xp);
        let partition = self.class.realize(&lengths).ok()?;
        if partition.k() < self.class.k() {
            return None;
        }
        partition
            .parts()
            .iter()
            .map(|part| part_lambda(part, self.coupling, self.opts.method, self.opts.eig_tol).ok())
            .collect()
    }
}

/// One golden-section pass over variable `j`; mutates `x` in place when
/// an improvement is found and returns the (possibly unchanged) value.
fn golden_step(s: &Search, x: &mut [f64], j: usize, best: f64) -> f64 {
    let (lo, hi) = s.vm.bounds_of(x, j);
    if hi - lo <= 1e-14 {
        return best;
    }
    let keep = x[j];
    let (mut a, mut b) = (lo, hi);
    let mut p = b - INV_PHI * (b - a);
    let mut q = a + INV_PHI * (b - a);
    x[j] = p;
    let mut fp = s.score(x);
    x[j] = q;
    let mut fq = s.score(x);
    for _ in 0..GOLDEN_ITERS {
        if fp <= fq {
            b = q;
            q = p;
            fq = fp;
            p = b - INV_PHI * (b - a);
            x[j] = p;
            fp = s.score(x);
        } else {
            a = p;
            p = q;
            fp = fq;
            q = a + INV_PHI * (b - a);
            x[j] = q;
            fq = s.score(x);
        }
    }
    let (pos, val) = if fp <= fq { (p, fp) } else { (q, fq) };
    if val < best {
        x[j] = pos;
        val
    } else {
        x[j] = keep;
        best
    }
}

/// Cyclic equalization: each pass transfers length across every cut in
/// turn, exploiting that a part's eigenvalue falls as it gains length.
fn sweep(s: &Search, x: &mut [f64], mut best: f64) -> f64 {
    for _ in 0..s.opts.sweeps {
        let before = best;
        for j in 0..s.vm.dim() {
            best = golden_step(s, x, j, best);
        }
        if before.is_finite() && before - best <= s.opts.rel_tol * before.abs() {
            break;
        }
    }
    best
}

/// Downhill simplex polish with the box handled by projection inside the
/// objective. Returns the best point, its value, and whether the simplex
/// met the relative tolerance before the iteration cap.
fn nelder_mead(
    s: &Search,
    x0: &[f64],
    f0: f64,
    scales: &[f64],
) -> (Vec<f64>, f64, bool) {
    let n = x0.len();
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((f0, x0.to_vec()));
    for j in 0..n {
        let mut xj = x0.to_vec();
        let (lo, hi) = s.vm.bounds_of(&xj, j);
        let h = if xj[j] + scales[j] <= hi { scales[j] } else { -scales[j].min(xj[j] - lo) };
        xj[j] += h;
        simplex.push((s.score(&xj), xj));
    }
    let mut converged = false;
    for _ in 0..s.opts.max_iters {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let fb = simplex[0].0;
        let fw = simplex[n].0;
        if fw.is_finite() && fw - fb <= s.opts.rel_tol * fb.abs().max(1e-300) {
            converged = true;
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|d| simplex[..n].iter().map(|(_, v)| v[d]).sum::<f64>() / n as f64)
            .collect();
        let reflect: Vec<f64> = (0..n)
            .map(|d| centroid[d] + (centroid[d] - simplex[n].1[d]))
            .collect();
        let fr = s.score(&reflect);
        if fr < fb {
            let expand: Vec<f64> = (0..n)
                .map(|d| centroid[d] + 2.0 * (centroid[d] - simplex[n].1[d]))
                .collect();
            let fe = s.score(&expand);
            simplex[n] = if fe < fr { (fe, expand) } else { (fr, reflect) };
        } else if fr < simplex[n - 1].0 {
            simplex[n] = (fr, reflect);
        } else {
            let inside = fr >= simplex[n].0;
            let towards = if inside { &simplex[n].1 } else { &reflect };
            let contract: Vec<f64> = (0..n)
                .map(|d| centroid[d] + 0.5 * (towards[d] - centroid[d]))
                .collect();
            let fc = s.score(&contract);
            if fc < simplex[n].0.min(fr) {
                simplex[n] = (fc, contract);
            } else {
                let anchor = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = (0..n)
                        .map(|d| anchor[d] + 0.5 * (entry.1[d] - anchor[d]))
                        .collect();
                    *entry = (s.score(&shrunk), shrunk);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (fb, xb) = simplex.swap_remove(0);
    (xb, fb, converged)
}

/// Deterministic per-class stream for multistart draws.
fn class_rng(class: &ConfigClass, seed: u64, restart: u64) -> ChaCha8Rng {
    let hash = class
        .id()
        .to_hex()
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x1000_0000_01b3)
        });
    ChaCha8Rng::seed_from_u64(seed ^ hash ^ restart.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Minimizes the worst part eigenvalue over the realizations of a class.
///
/// The first start is the balanced length allocation (for small Robin
/// couplings, the Cheeger-optimal one); later starts draw random cut
/// positions. Each start runs the equalization sweep and a simplex
/// polish. Classes that cannot keep every part at positive length are
/// infeasible and score `+∞`.
pub(crate) fn optimize_class(
    class: &ConfigClass,
    coupling: Coupling,
    opts: &OptimizerOptions,
) -> Result<ClassMinimum> {
    let k = class.k();
    let mut balanced = ShareProgram::from_class(class, BoundaryMode::EffectiveDegree);
    balanced.c = vec![1.0; k];
    let Some((m_star, _)) = cheeger::stage_one(&balanced)? else {
        return Ok(ClassMinimum::infeasible());
    };
    let mut warm = match cheeger::stage_two(&balanced, m_star * (1.0 - 1e-9))? {
        Some((t, g)) => cheeger::allocation_to_lengths(class, &balanced, &t, &g),
        None => return Ok(ClassMinimum::infeasible()),
    };
    if let Coupling::Robin(alpha) = coupling {
        if alpha <= WARM_START_ALPHA {
            let opt = cheeger::class_optimum(class, BoundaryMode::EffectiveDegree)?;
            if opt.value.is_finite() && !opt.lengths.is_empty() {
                warm = opt.lengths;
            }
        }
    }

    let search = Search {
        class,
        vm: VarMap::from_class(class),
        coupling,
        opts,
        evals: std::cell::Cell::new(0),
    };

    let (mut best_x, mut best_f, mut best_stalled);
    let warm_x = search.vm.positions(&warm);
    if search.vm.dim() == 0 {
        best_f = search.score(&warm_x);
        best_x = warm_x;
        best_stalled = false;
    } else {
        best_x = warm_x.clone();
        best_f = f64::INFINITY;
        best_stalled = false;
        let scales = search.vm.scales();
        let runs = opts.restarts.max(1);
        for r in 0..runs {
            let mut x = if r == 0 {
                warm_x.clone()
            } else {
                let mut rng = class_rng(class, opts.seed, r as u64);
                let mut x = Vec::with_capacity(search.vm.dim());
                for &(_, m, len) in &search.vm.edges {
                    let mut cuts: Vec<f64> =
                        (0..m - 1).map(|_| rng.gen_range(0.0..len)).collect();
                    cuts.sort_by(f64::total_cmp);
                    x.extend(cuts);
                }
                x
            };
            search.vm.project(&mut x);
            let f = search.score(&x);
            let f = sweep(&search, &mut x, f);
            let (x, f, converged) = nelder_mead(&search, &x, f, &scales);
            if f < best_f {
                best_f = f;
                best_x = x;
                best_stalled = !converged;
            }
        }
    }

    if !best_f.is_finite() {
        return Ok(ClassMinimum {
            iterations: search.evals.get(),
            restarts: opts.restarts.max(1),
            ..ClassMinimum::infeasible()
        });
    }
    search.vm.project(&mut best_x);
    let lambdas = search.lambdas(&best_x).unwrap_or_default();
    let spread = match (
        lambdas.iter().copied().reduce(f64::max),
        lambdas.iter().copied().reduce(f64::min),
    ) {
        (Some(hi), Some(lo)) => hi - lo,
        _ => 0.0,
    };
    Ok(ClassMinimum {
        value: best_f,
        lengths: search.vm.lengths(class, &best_x),
        iterations: search.evals.get(),
        restarts: if search.vm.dim() == 0 { 1 } else { opts.restarts.max(1) },
        spread,
        stalled: best_stalled,
    })
}
