//! k-Cheeger constants and optimal cuts.
//!
//! Within a configuration class the boundary size of every part is
//! constant, so minimizing the largest boundary-to-length ratio is a
//! linear program over the segment lengths: maximize the smallest scaled
//! part length. [`cheeger_constant`] enumerates the dominant classes,
//! solves one LP per class, and realizes the best one. The single-set
//! isoperimetric problem [`h1`] and the max-of-h1 partition variant
//! [`cheeger_variant`] reuse the same machinery with `k = 1` on re-rooted
//! subgraphs.

use std::sync::Arc;

use crate::class::{ClassId, ConfigClass, Partition, GAP};
use crate::enumerate::{dominant_classes, EnumerationCaps};
use crate::graph::MetricGraph;
use crate::lp::{self, Lp, LpOutcome};
use crate::par::{self, Exec};
use crate::subgraph::{BoundaryMode, Subgraph};
use crate::{Error, Result};

/// Relative slack applied to the stage-two length floor so that the
/// realized partition stays within LP tolerance of the class optimum.
const STAGE_TWO_SLACK: f64 = 1e-9;

/// Boundary-to-length ratio of one part; `+∞` for a zero-length part.
fn part_ratio(part: &Subgraph, mode: BoundaryMode) -> f64 {
    let len = part.total_length();
    if len <= 0.0 {
        return f64::INFINITY;
    }
    part.boundary_size(mode) as f64 / len
}

/// Cheeger energy of a partition: the largest boundary-to-length ratio
/// among its parts.
pub fn cheeger_energy(partition: &Partition, mode: BoundaryMode) -> f64 {
    partition
        .parts()
        .iter()
        .map(|p| part_ratio(p, mode))
        .fold(0.0, f64::max)
}

/// p-norm Cheeger energy: the l^p norm of the ratio vector. Requires
/// `p ≥ 1`; recovers [`cheeger_energy`] as `p → ∞`.
pub fn cheeger_energy_p(partition: &Partition, p: f64, mode: BoundaryMode) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p-norm exponent must be at least 1, got {p}"
        )));
    }
    let mut sum = 0.0;
    for part in partition.parts() {
        let r = part_ratio(part, mode);
        if r.is_infinite() {
            return Ok(f64::INFINITY);
        }
        sum += r.powf(p);
    }
    Ok(sum.powf(1.0 / p))
}

/// One edge of a share program: total length, the parts carrying at
/// least one segment on it, and whether part of it may be left uncovered.
pub(crate) struct ShareEdge {
    pub(crate) len: f64,
    pub(crate) parts: Vec<usize>,
    pub(crate) gap: bool,
}

/// The length-allocation polytope of a class: per-edge totals are split
/// among the incident parts (plus an uncovered remainder where the class
/// has gaps), and each part's total length is compared against its
/// class-constant boundary size.
pub(crate) struct ShareProgram {
    pub(crate) c: Vec<f64>,
    pub(crate) edges: Vec<ShareEdge>,
}

impl ShareProgram {
    pub(crate) fn from_class(class: &ConfigClass, mode: BoundaryMode) -> ShareProgram {
        let graph = class.parent();
        let c = match mode {
            BoundaryMode::EffectiveDegree => class.boundary_effdeg(),
            BoundaryMode::Count => class.boundary_count(),
        };
        let mut edges = Vec::new();
        for (e, seq) in class.labels().iter().enumerate() {
            let mut parts: Vec<usize> = seq
                .iter()
                .filter(|&&l| l != GAP)
                .map(|&l| l as usize - 1)
                .collect();
            parts.sort_unstable();
            parts.dedup();
            if parts.is_empty() {
                continue;
            }
            edges.push(ShareEdge {
                len: graph.edge(e).length,
                parts,
                gap: seq.contains(&GAP),
            });
        }
        ShareProgram {
            c: c.into_iter().map(|x| x as f64).collect(),
            edges,
        }
    }

    fn n_alloc(&self) -> usize {
        self.edges.iter().map(|e| e.parts.len()).sum()
    }

    fn n_gap(&self) -> usize {
        self.edges.iter().filter(|e| e.gap).count()
    }
}

/// Maximizes the smallest `L_i / c_i` over the allocation polytope.
/// Returns `None` when no positive value is attainable (the class
/// optimum is `+∞`), otherwise `(s*, part lengths at the optimum)`.
pub(crate) fn stage_one(prog: &ShareProgram) -> Result<Option<(f64, Vec<f64>)>> {
    let k = prog.c.len();
    let nt = prog.n_alloc();
    let ng = prog.n_gap();
    let s_ix = nt + ng;
    let n = nt + ng + 1 + k;
    let mut a = Vec::with_capacity(prog.edges.len() + k);
    let mut b = Vec::with_capacity(prog.edges.len() + k);
    let mut t_ix = 0usize;
    let mut g_ix = nt;
    let mut part_cols: Vec<Vec<usize>> = vec![Vec::new(); k];
    for e in &prog.edges {
        let mut row = vec![0.0; n];
        for &i in &e.parts {
            row[t_ix] = 1.0;
            part_cols[i].push(t_ix);
            t_ix += 1;
        }
        if e.gap {
            row[g_ix] = 1.0;
            g_ix += 1;
        }
        a.push(row);
        b.push(e.len);
    }
    for i in 0..k {
        let mut row = vec![0.0; n];
        for &col in &part_cols[i] {
            row[col] = 1.0;
        }
        row[s_ix] = -prog.c[i];
        row[nt + ng + 1 + i] = -1.0;
        a.push(row);
        b.push(0.0);
    }
    let mut obj = vec![0.0; n];
    obj[s_ix] = 1.0;
    match lp::solve(&Lp { n, a, b, c: obj })? {
        LpOutcome::Optimal { value, x } => {
            if value <= 1e-12 {
                return Ok(None);
            }
            let lens = part_cols
                .iter()
                .map(|cols| cols.iter().map(|&c| x[c]).sum())
                .collect();
            Ok(Some((value, lens)))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Lp(
            "share program unbounded; boundary sizes vanish".into(),
        )),
    }
}

/// On the face `L_i ≥ c_i · s_target`, maximizes the smallest per-edge
/// allocation of any incident part, pushing the realization away from
/// degenerate corners where a segment collapses. Returns the allocation
/// vector `(t per (edge, part), gap per gap edge)`.
pub(crate) fn stage_two(
    prog: &ShareProgram,
    s_target: f64,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let k = prog.c.len();
    let nt = prog.n_alloc();
    let ng = prog.n_gap();
    let d_ix = nt + ng;
    // Layout: t (nt), gaps (ng), δ, slack per allocation (nt), slack per part (k).
    let n = nt + ng + 1 + nt + k;
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut t_ix = 0usize;
    let mut g_ix = nt;
    let mut part_cols: Vec<Vec<usize>> = vec![Vec::new(); k];
    for e in &prog.edges {
        let mut row = vec![0.0; n];
        for &i in &e.parts {
            row[t_ix] = 1.0;
            part_cols[i].push(t_ix);
            t_ix += 1;
        }
        if e.gap {
            row[g_ix] = 1.0;
            g_ix += 1;
        }
        a.push(row);
        b.push(e.len);
    }
    for t in 0..nt {
        let mut row = vec![0.0; n];
        row[t] = 1.0;
        row[d_ix] = -1.0;
        row[nt + ng + 1 + t] = -1.0;
        a.push(row);
        b.push(0.0);
    }
    for i in 0..k {
        let mut row = vec![0.0; n];
        for &col in &part_cols[i] {
            row[col] = 1.0;
        }
        row[nt + ng + 1 + nt + i] = -1.0;
        a.push(row);
        b.push(prog.c[i] * s_target);
    }
    let mut obj = vec![0.0; n];
    obj[d_ix] = 1.0;
    match lp::solve(&Lp { n, a, b, c: obj })? {
        LpOutcome::Optimal { x, .. } => {
            Ok(Some((x[..nt].to_vec(), x[nt..nt + ng].to_vec())))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Lp("interior selection unbounded".into())),
    }
}

/// The exact optimum of the Cheeger energy over one configuration class.
#[derive(Clone, Debug)]
pub struct ClassOptimum {
    /// Smallest attainable energy; `+∞` when some part is forced to
    /// length zero.
    pub value: f64,
    /// Part lengths at the optimum (stage-one solution).
    pub part_lengths: Vec<f64>,
    /// Optimal segment lengths, row per edge, entry per class segment;
    /// feeds [`ConfigClass::realize`]. Empty when `value` is infinite.
    pub lengths: Vec<Vec<f64>>,
}

/// Solves the class LP: the minimum over realizations of the largest
/// boundary-to-length ratio equals `1/s*` where `s*` maximizes the
/// smallest scaled part length.
pub fn class_optimum(class: &ConfigClass, mode: BoundaryMode) -> Result<ClassOptimum> {
    let prog = ShareProgram::from_class(class, mode);
    if prog.c.iter().all(|&c| c == 0.0) {
        // Boundaryless class: every realization has energy zero; spread
        // each edge evenly over its segments.
        let lengths = even_lengths(class);
        let part_lengths = part_lengths_of(class, &lengths);
        return Ok(ClassOptimum {
            value: 0.0,
            part_lengths,
            lengths,
        });
    }
    let Some((s, part_lengths)) = stage_one(&prog)? else {
        return Ok(ClassOptimum {
            value: f64::INFINITY,
            part_lengths: vec![0.0; prog.c.len()],
            lengths: Vec::new(),
        });
    };
    let lengths = match stage_two(&prog, s * (1.0 - STAGE_TWO_SLACK))? {
        Some((t, g)) => allocation_to_lengths(class, &prog, &t, &g),
        None => Vec::new(),
    };
    Ok(ClassOptimum {
        value: 1.0 / s,
        part_lengths,
        lengths,
    })
}

/// Spreads every edge evenly over its class segments.
fn even_lengths(class: &ConfigClass) -> Vec<Vec<f64>> {
    let graph = class.parent();
    class
        .labels()
        .iter()
        .enumerate()
        .map(|(e, seq)| {
            let share = graph.edge(e).length / seq.len() as f64;
            vec![share; seq.len()]
        })
        .collect()
}

fn part_lengths_of(class: &ConfigClass, lengths: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; class.k()];
    for (seq, row) in class.labels().iter().zip(lengths) {
        for (&l, &len) in seq.iter().zip(row) {
            if l != GAP {
                out[l as usize - 1] += len;
            }
        }
    }
    out
}

/// Expands per-(edge, part) totals into per-segment lengths: each part's
/// total on an edge is split evenly over its segments there, keeping
/// every segment positive whenever the total is.
pub(crate) fn allocation_to_lengths(
    class: &ConfigClass,
    prog: &ShareProgram,
    t: &[f64],
    g: &[f64],
) -> Vec<Vec<f64>> {
    let graph = class.parent();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(class.labels().len());
    let mut t_ix = 0usize;
    let mut g_ix = 0usize;
    let mut prog_ix = 0usize;
    for (e, seq) in class.labels().iter().enumerate() {
        let covered = seq.iter().any(|&l| l != GAP);
        if !covered {
            // Whole-gap edge: not part of the program.
            let share = graph.edge(e).length / seq.len() as f64;
            rows.push(vec![share; seq.len()]);
            continue;
        }
        let edge = &prog.edges[prog_ix];
        prog_ix += 1;
        let mut per_label = vec![0.0; class.k() + 1];
        for &i in &edge.parts {
            per_label[i + 1] = t[t_ix];
            t_ix += 1;
        }
        if edge.gap {
            per_label[GAP as usize] = g[g_ix];
            g_ix += 1;
        }
        let mut counts = vec![0usize; class.k() + 1];
        for &l in seq {
            counts[l as usize] += 1;
        }
        rows.push(
            seq.iter()
                .map(|&l| per_label[l as usize] / counts[l as usize] as f64)
                .collect(),
        );
    }
    rows
}

/// Result of a k-Cheeger minimization.
#[derive(Clone, Debug)]
pub struct CheegerResult {
    /// The k-Cheeger constant (units 1/length).
    pub value: f64,
    /// A partition attaining the value within LP tolerance.
    pub argmin: Partition,
    /// Canonical class id and class optimum, ascending by optimum.
    pub per_class: Vec<(ClassId, f64)>,
    pub mode: BoundaryMode,
    /// Exponent when the caller evaluates p-norm energies; recorded only.
    pub p: Option<f64>,
    pub warnings: Vec<String>,
    /// True when some edge hit the per-edge cut cap during enumeration,
    /// i.e. a larger cap could conceivably improve the optimum.
    pub cap_saturated: bool,
}

/// Computes the k-Cheeger constant and an optimal cut.
///
/// Enumerates the dominant configuration classes, solves the length
/// allocation LP of each, and realizes the best class. Ties are broken
/// by canonical class id. `k = 1` is the isoperimetric case and returns
/// zero for graphs without ambient boundary.
pub fn cheeger_constant(
    graph: &Arc<MetricGraph>,
    k: usize,
    mode: BoundaryMode,
    caps: &EnumerationCaps,
    exhaustive: bool,
    exec: Exec,
) -> Result<CheegerResult> {
    let (mut classes, stats) =
        dominant_classes(graph, k, caps.max_cuts_per_edge, exhaustive, exec)?;
    let mut warnings = Vec::new();
    if let Some(limit) = caps.max_classes {
        if classes.len() > limit {
            classes.truncate(limit);
            warnings.push(format!(
                "class table truncated to {limit} entries; the optimum may lie outside"
            ));
        }
    }
    if classes.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no {k}-partition configuration exists within the caps"
        )));
    }
    if stats.cap_saturated {
        warnings.push(format!(
            "per-edge cut cap {} was reached; rerun with a larger cap to confirm the optimum",
            caps.max_cuts_per_edge
        ));
    }
    let optima = par::map_ordered(exec, &classes, |class| class_optimum(class, mode));
    let mut table: Vec<(usize, f64)> = Vec::with_capacity(classes.len());
    for (i, opt) in optima.into_iter().enumerate() {
        table.push((i, opt?.value));
    }
    table.sort_by(|(i, a), (j, b)| {
        a.total_cmp(b).then_with(|| classes[*i].id().cmp(classes[*j].id()))
    });
    let mut argmin = None;
    let mut value = f64::INFINITY;
    for &(i, v) in &table {
        if !v.is_finite() {
            break;
        }
        let opt = class_optimum(&classes[i], mode)?;
        if opt.lengths.is_empty() {
            continue;
        }
        match classes[i].realize(&opt.lengths) {
            Ok(p) => {
                let energy = cheeger_energy(&p, mode);
                if (energy - v).abs() > 1e-7 * v.max(1.0) {
                    warnings.push(format!(
                        "realized energy {energy} deviates from class optimum {v}"
                    ));
                }
                argmin = Some(p);
                value = v;
                break;
            }
            Err(_) => warnings.push(format!(
                "class {} attains its optimum only in a degenerate limit; skipped",
                &classes[i].id().to_hex()[..16.min(classes[i].id().to_hex().len())]
            )),
        }
    }
    let Some(argmin) = argmin else {
        return Err(Error::NoConvergence(
            "no enumerated class realizes its optimum".into(),
        ));
    };
    let per_class = table
        .into_iter()
        .map(|(i, v)| (classes[i].id().clone(), v))
        .collect();
    Ok(CheegerResult {
        value,
        argmin,
        per_class,
        mode,
        p: None,
        warnings,
        cap_saturated: stats.cap_saturated,
    })
}

/// Result of the single-set isoperimetric minimization.
#[derive(Clone, Debug)]
pub struct H1Result {
    pub value: f64,
    /// The minimizing subset, in the coordinates of the input's parent.
    pub argmin: Subgraph,
    /// True when the minimizer is the whole input set.
    pub calibrable: bool,
    pub warnings: Vec<String>,
}

/// Minimizes `|∂E| / |E|` over closed connected subsets `E` of `Ω`, with
/// boundary sizes measured by effective degree against the full parent
/// graph. The minimum is attained on unions of whole edges of `Ω`
/// re-rooted as a graph, so this reduces to the `k = 1` Cheeger scan.
pub fn h1(omega: &Subgraph, caps: &EnumerationCaps, exec: Exec) -> Result<H1Result> {
    let proj = omega.to_projection();
    let res = cheeger_constant(
        proj.graph(),
        1,
        BoundaryMode::EffectiveDegree,
        caps,
        false,
        exec,
    )?;
    let inner = &res.argmin.parts()[0];
    let argmin = proj.lift(inner)?;
    let calibrable =
        (argmin.total_length() - omega.total_length()).abs() <= 1e-12 * omega.total_length();
    Ok(H1Result {
        value: res.value,
        argmin,
        calibrable,
        warnings: res.warnings,
    })
}

/// The max-of-h1 partition variant: evaluates `max_i h1(Ω_i)` at the
/// k-Cheeger argmin. The inner minimizations run over all connected
/// subsets of each part, so agreement with [`cheeger_constant`] is a
/// nontrivial consistency check, not an identity.
pub fn cheeger_variant(
    graph: &Arc<MetricGraph>,
    k: usize,
    caps: &EnumerationCaps,
    exec: Exec,
) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter(
            "the partition variant needs at least two parts".into(),
        ));
    }
    let res = cheeger_constant(graph, k, BoundaryMode::EffectiveDegree, caps, false, exec)?;
    let mut worst = 0.0f64;
    for part in res.argmin.parts() {
        let h = h1(part, caps, exec)?;
        worst = worst.max(h.value);
    }
    Ok(worst)
}
