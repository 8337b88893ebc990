//! Spectral minimal partitions under Robin and Dirichlet part couplings.
//!
//! The energy of a partition is the largest first eigenvalue among its
//! parts, each part carrying Robin mass on its boundary points (strength
//! `α` per effective degree) or a Dirichlet pin. Minimization runs in two
//! layers: a per-class search over cut positions (warm-started from the
//! length-allocation LP, equalized coordinate-wise, polished by a
//! downhill simplex) and a batched scan over configuration classes with
//! rigorous interval lower bounds pruning classes that cannot beat the
//! incumbent.

mod optimize;

use std::f64::consts::PI;
use std::sync::Arc;

use crate::cheeger::{self, ShareProgram};
use crate::class::{partition_distance, ClassId, ConfigClass, Partition};
use crate::enumerate::{dominant_classes, EnumerationCaps};
use crate::graph::MetricGraph;
use crate::par::{self, Exec};
use crate::spectral::{self, Method, RobinProblem};
use crate::subgraph::{BoundaryMode, Subgraph};
use crate::{Error, Result};

/// Classes per pruning round; the incumbent refreshes between rounds.
const BATCH: usize = 32;

/// Boundary coupling of the part eigenvalue problems.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Coupling {
    /// Robin strength `α` per unit of effective boundary degree.
    Robin(f64),
    /// Dirichlet pins on every part boundary point.
    Dirichlet,
}

/// Knobs of the per-class search.
#[derive(Clone, Debug)]
pub struct OptimizerOptions {
    /// Independent starts per class; the first is the LP warm start.
    pub restarts: usize,
    /// Simplex iteration cap per start.
    pub max_iters: usize,
    /// Relative convergence tolerance on the objective.
    pub rel_tol: f64,
    /// Seed for the multistart draws.
    pub seed: u64,
    /// Eigenvalue solver used inside the objective.
    pub method: Method,
    /// Eigenvalue solver tolerance.
    pub eig_tol: f64,
    /// Equalization passes before the simplex polish.
    pub sweeps: usize,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            restarts: 4,
            max_iters: 500,
            rel_tol: 1e-8,
            seed: 0,
            method: Method::Secular,
            eig_tol: spectral::DEFAULT_TOL,
            sweeps: 2,
        }
    }
}

/// Outcome of minimizing one class.
#[derive(Clone, Debug)]
pub struct ClassMinimum {
    /// Smallest worst-part eigenvalue found; `+∞` when the class cannot
    /// keep every part at positive length.
    pub value: f64,
    /// Segment lengths at the minimum, row per edge; feeds
    /// [`ConfigClass::realize`]. Empty when infeasible.
    pub lengths: Vec<Vec<f64>>,
    /// Objective evaluations spent.
    pub iterations: usize,
    /// Starts performed.
    pub restarts: usize,
    /// Largest minus smallest part eigenvalue at the minimum; a large
    /// spread means the equalization stalled short of balance.
    pub spread: f64,
    /// True when the best start hit the iteration cap before meeting the
    /// relative tolerance.
    pub stalled: bool,
}

impl ClassMinimum {
    fn infeasible() -> ClassMinimum {
        ClassMinimum {
            value: f64::INFINITY,
            lengths: Vec::new(),
            iterations: 0,
            restarts: 0,
            spread: 0.0,
            stalled: false,
        }
    }
}

/// First eigenvalue of one part under the given coupling.
pub(crate) fn part_lambda(
    part: &Subgraph,
    coupling: Coupling,
    method: Method,
    tol: f64,
) -> Result<f64> {
    match coupling {
        Coupling::Robin(alpha) => {
            let problem = RobinProblem::from_alpha(part.clone(), alpha)?;
            Ok(spectral::robin_lambda1(&problem, method, tol)?.lambda1)
        }
        Coupling::Dirichlet => Ok(spectral::dirichlet_lambda1(part, method, tol)?.lambda1),
    }
}

fn partition_lambdas(
    partition: &Partition,
    coupling: Coupling,
    method: Method,
    tol: f64,
) -> Result<Vec<f64>> {
    partition
        .parts()
        .iter()
        .map(|part| part_lambda(part, coupling, method, tol))
        .collect()
}

/// Largest part eigenvalue of a partition under Robin coupling `alpha`.
pub fn robin_energy(
    partition: &Partition,
    alpha: f64,
    method: Method,
    tol: f64,
) -> Result<f64> {
    let lambdas = partition_lambdas(partition, Coupling::Robin(alpha), method, tol)?;
    Ok(lambdas.into_iter().fold(0.0, f64::max))
}

/// `p`-norm of the part eigenvalues under Robin coupling `alpha`; the
/// max energy is the `p → ∞` limit.
pub fn robin_energy_p(
    partition: &Partition,
    alpha: f64,
    p: f64,
    method: Method,
    tol: f64,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p-norm exponent must be at least 1, got {p}"
        )));
    }
    let lambdas = partition_lambdas(partition, Coupling::Robin(alpha), method, tol)?;
    Ok(lambdas.into_iter().map(|l| l.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Largest part eigenvalue with Dirichlet pins on part boundaries.
pub fn dirichlet_energy(partition: &Partition, method: Method, tol: f64) -> Result<f64> {
    let lambdas = partition_lambdas(partition, Coupling::Dirichlet, method, tol)?;
    Ok(lambdas.into_iter().fold(0.0, f64::max))
}

/// Minimizes the worst part eigenvalue over one class's realizations.
pub fn minimize_class(
    class: &ConfigClass,
    coupling: Coupling,
    opts: &OptimizerOptions,
) -> Result<ClassMinimum> {
    if let Coupling::Robin(alpha) = coupling {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Robin coupling must be finite and nonnegative, got {alpha}"
            )));
        }
    }
    optimize::optimize_class(class, coupling, opts)
}

/// Search accounting for one partition minimization.
#[derive(Clone, Debug, Default)]
pub struct OptimizerDiagnostics {
    /// Classes fully optimized.
    pub evaluated: usize,
    /// Classes skipped because their lower bound beat the incumbent.
    pub pruned: usize,
    /// Classes that cannot keep every part at positive length.
    pub infeasible: usize,
    /// Objective evaluations summed over evaluated classes.
    pub iterations: usize,
    /// Evaluated classes whose best start hit the iteration cap.
    pub stalled: usize,
    /// Eigenvalue spread across parts at the returned argmin.
    pub spread: f64,
}

/// An optimal spectral partition and the search record behind it.
#[derive(Clone, Debug)]
pub struct SpectralPartitionResult {
    /// Robin strength, or `None` for Dirichlet pins.
    pub alpha: Option<f64>,
    /// The minimal energy.
    pub value: f64,
    /// A partition attaining it within optimizer tolerance.
    pub argmin: Partition,
    /// Canonical id and class minimum for every class that was optimized
    /// (infeasible ones carry `+∞`), ascending by value; pruned classes
    /// are only counted in the diagnostics.
    pub per_class: Vec<(ClassId, f64)>,
    pub diagnostics: OptimizerDiagnostics,
    pub warnings: Vec<String>,
    /// True when some edge hit the per-edge cut cap during enumeration.
    pub cap_saturated: bool,
}

/// Valid lower bound on the worst part eigenvalue of any realization
/// whose smallest part is at most `m`.
fn coupling_lower_bound(coupling: Coupling, m: f64) -> f64 {
    match coupling {
        Coupling::Robin(alpha) => alpha * PI * PI / (m * (PI * PI + 4.0 * alpha * m)),
        Coupling::Dirichlet => (PI / (2.0 * m)).powi(2),
    }
}

/// Zeroes segment lengths below `1e-9` of their edge, handing the mass
/// to the row's largest entry so near-vertex cuts land exactly on the
/// vertex before the final realization.
fn snap_lengths(graph: &MetricGraph, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    rows.iter()
        .enumerate()
        .map(|(e, row)| {
            let tol = 1e-9 * graph.edge(e).length;
            let mut out = row.clone();
            let mut freed = 0.0;
            for x in out.iter_mut() {
                if *x < tol {
                    freed += *x;
                    *x = 0.0;
                }
            }
            if freed > 0.0 {
                if let Some(largest) = out
                    .iter_mut()
                    .max_by(|a, b| a.total_cmp(b))
                {
                    *largest += freed;
                }
            }
            out
        })
        .collect()
}

fn minimal_partition(
    graph: &Arc<MetricGraph>,
    k: usize,
    coupling: Coupling,
    caps: &EnumerationCaps,
    exhaustive: bool,
    opts: &OptimizerOptions,
    exec: Exec,
) -> Result<SpectralPartitionResult> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "spectral minimal partitions need at least two parts, got k = {k}"
        )));
    }
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

    // Pre-pass: per class, the Cheeger LP value (ordering) and the best
    // attainable smallest part length m* (lower bounds).
    let preps = par::map_ordered(exec, &classes, |class| -> Result<(f64, f64)> {
        let prog = ShareProgram::from_class(class, BoundaryMode::EffectiveDegree);
        let lp = match cheeger::stage_one(&prog)? {
            Some((s, _)) => 1.0 / s,
            None => f64::INFINITY,
        };
        let mut balanced = prog;
        balanced.c = vec![1.0; k];
        let m_star = match cheeger::stage_one(&balanced)? {
            Some((s, _)) => s,
            None => 0.0,
        };
        Ok((lp, m_star))
    });
    let mut order: Vec<(usize, f64, f64)> = Vec::with_capacity(classes.len());
    let mut infeasible: Vec<usize> = Vec::new();
    for (i, prep) in preps.into_iter().enumerate() {
        let (lp, m_star) = prep?;
        if m_star <= 1e-12 || !lp.is_finite() {
            infeasible.push(i);
        } else {
            order.push((i, lp, m_star));
        }
    }
    match coupling {
        Coupling::Robin(_) => order.sort_by(|(i, lp_a, _), (j, lp_b, _)| {
            lp_a.total_cmp(lp_b).then_with(|| classes[*i].id().cmp(classes[*j].id()))
        }),
        Coupling::Dirichlet => order.sort_by(|(i, _, ma), (j, _, mb)| {
            mb.total_cmp(ma).then_with(|| classes[*i].id().cmp(classes[*j].id()))
        }),
    }

    let mut incumbent = f64::INFINITY;
    let mut incumbent_ix = usize::MAX;
    let mut results: Vec<(usize, ClassMinimum)> = Vec::new();
    let mut pruned = 0usize;
    for chunk in order.chunks(BATCH) {
        let todo: Vec<usize> = chunk
            .iter()
            .filter(|&&(_, _, m_star)| coupling_lower_bound(coupling, m_star) < incumbent)
            .map(|&(i, _, _)| i)
            .collect();
        pruned += chunk.len() - todo.len();
        let outs = par::map_ordered(exec, &todo, |&i| {
            optimize::optimize_class(&classes[i], coupling, opts)
        });
        for (&i, out) in todo.iter().zip(outs) {
            let cm = out?;
            let better = cm.value < incumbent
                || (cm.value == incumbent
                    && incumbent_ix != usize::MAX
                    && classes[i].id() < classes[incumbent_ix].id());
            if better {
                incumbent = cm.value;
                incumbent_ix = i;
            }
            results.push((i, cm));
        }
    }

    let stalled = results.iter().filter(|(_, cm)| cm.stalled).count();
    let iterations = results.iter().map(|(_, cm)| cm.iterations).sum();
    results.sort_by(|(i, a), (j, b)| {
        a.value
            .total_cmp(&b.value)
            .then_with(|| classes[*i].id().cmp(classes[*j].id()))
    });

    // Realize the winner; degenerate snaps fall through to the runner-up.
    let mut argmin = None;
    let mut value = f64::INFINITY;
    let mut spread = 0.0;
    for (i, cm) in &results {
        if !cm.value.is_finite() {
            break;
        }
        let lengths = snap_lengths(graph, &cm.lengths);
        let candidate = match classes[*i].realize(&lengths) {
            Ok(p) if p.k() == k => p,
            _ => {
                warnings.push(format!(
                    "class {} optimum degenerates when snapped; skipped",
                    &classes[*i].id().to_hex()[..16.min(classes[*i].id().to_hex().len())]
                ));
                continue;
            }
        };
        let Ok(lambdas) =
            partition_lambdas(&candidate, coupling, opts.method, opts.eig_tol)
        else {
            warnings.push("eigenvalue solve failed at the snapped optimum; skipped".into());
            continue;
        };
        value = lambdas.iter().copied().fold(0.0, f64::max);
        spread = value - lambdas.iter().copied().fold(f64::INFINITY, f64::min);
        if (value - cm.value).abs() > 1e-6 * cm.value.max(1e-300) {
            warnings.push(format!(
                "snapped energy {value} deviates from optimizer value {}",
                cm.value
            ));
        }
        if cm.stalled {
            warnings.push(format!(
                "optimizer hit the iteration cap in the winning class; eigenvalue spread {spread:.3e}"
            ));
        }
        argmin = Some(candidate);
        break;
    }
    let Some(argmin) = argmin else {
        return Err(Error::NoConvergence(
            "no enumerated class produced a realizable spectral optimum".into(),
        ));
    };

    let mut per_class: Vec<(ClassId, f64)> = results
        .iter()
        .map(|(i, cm)| (classes[*i].id().clone(), cm.value))
        .collect();
    per_class.extend(
        infeasible
            .iter()
            .map(|&i| (classes[i].id().clone(), f64::INFINITY)),
    );
    Ok(SpectralPartitionResult {
        alpha: match coupling {
            Coupling::Robin(a) => Some(a),
            Coupling::Dirichlet => None,
        },
        value,
        argmin,
        per_class,
        diagnostics: OptimizerDiagnostics {
            evaluated: results.len(),
            pruned,
            infeasible: infeasible.len(),
            iterations,
            stalled,
            spread,
        },
        warnings,
        cap_saturated: stats.cap_saturated,
    })
}

/// Minimizes the worst part Robin eigenvalue over all k-partitions.
pub fn robin_minimal_partition(
    graph: &Arc<MetricGraph>,
    k: usize,
    alpha: f64,
    caps: &EnumerationCaps,
    exhaustive: bool,
    opts: &OptimizerOptions,
    exec: Exec,
) -> Result<SpectralPartitionResult> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Robin partition strength must be positive and finite, got {alpha}"
        )));
    }
    minimal_partition(graph, k, Coupling::Robin(alpha), caps, exhaustive, opts, exec)
}

/// Minimizes the worst part Dirichlet eigenvalue over all k-partitions.
pub fn dirichlet_minimal_partition(
    graph: &Arc<MetricGraph>,
    k: usize,
    caps: &EnumerationCaps,
    exhaustive: bool,
    opts: &OptimizerOptions,
    exec: Exec,
) -> Result<SpectralPartitionResult> {
    minimal_partition(graph, k, Coupling::Dirichlet, caps, exhaustive, opts, exec)
}

/// The a-priori slope bound `2k Σ_v deg(v) / ℓ_max` on `α ↦ Λ^α`.
pub fn lipschitz_constant(graph: &MetricGraph, k: usize) -> f64 {
    let deg_sum: usize = (0..graph.n_vertices()).map(|v| graph.deg(v)).sum();
    let l_max = graph
        .edges()
        .iter()
        .map(|e| e.length)
        .fold(0.0f64, f64::max);
    2.0 * k as f64 * deg_sum as f64 / l_max
}

/// Grid check of the coupling dependence of the optimal energy.
#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    pub alphas: Vec<f64>,
    /// Optimal energy per grid strength.
    pub values: Vec<f64>,
    /// The a-priori slope bound.
    pub lipschitz_bound: f64,
    /// Largest observed difference quotient.
    pub max_ratio: f64,
    pub strictly_increasing: bool,
    pub lipschitz_ok: bool,
    pub violations: Vec<String>,
}

/// Computes the optimal energy along an ascending strength grid and
/// checks strict monotonicity plus the slope bound on adjacent points.
pub fn alpha_monotonicity_check(
    graph: &Arc<MetricGraph>,
    k: usize,
    grid: &[f64],
    caps: &EnumerationCaps,
    opts: &OptimizerOptions,
    exec: Exec,
) -> Result<MonotonicityReport> {
    if grid.len() < 2 {
        return Err(Error::InvalidParameter(
            "monotonicity grid needs at least two strengths".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|&a| !(a > 0.0) || !a.is_finite())
    {
        return Err(Error::InvalidParameter(
            "monotonicity grid must be positive, finite and strictly ascending".into(),
        ));
    }
    let mut values = Vec::with_capacity(grid.len());
    for &alpha in grid {
        values.push(robin_minimal_partition(graph, k, alpha, caps, false, opts, exec)?.value);
    }
    let bound = lipschitz_constant(graph, k);
    let mut violations = Vec::new();
    let mut max_ratio = 0.0f64;
    let mut strictly_increasing = true;
    for i in 1..grid.len() {
        let dv = values[i] - values[i - 1];
        let da = grid[i] - grid[i - 1];
        if dv <= 0.0 {
            strictly_increasing = false;
            violations.push(format!(
                "energy {} at α = {} does not exceed {} at α = {}",
                values[i],
                grid[i],
                values[i - 1],
                grid[i - 1]
            ));
        }
        let ratio = dv.abs() / da;
        max_ratio = max_ratio.max(ratio);
        if ratio > bound {
            violations.push(format!(
                "difference quotient {ratio} on [{}, {}] exceeds the bound {bound}",
                grid[i - 1],
                grid[i]
            ));
        }
    }
    Ok(MonotonicityReport {
        alphas: grid.to_vec(),
        values,
        lipschitz_bound: bound,
        max_ratio,
        strictly_increasing,
        lipschitz_ok: max_ratio <= bound,
        violations,
    })
}

/// Which coupling limit a study tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `α → 0`: energies scale like `α` times the Cheeger constant.
    ToZero,
    /// `α → ∞`: energies approach the Dirichlet optimum.
    ToInfinity,
}

/// One grid point of a limit study.
#[derive(Clone, Debug)]
pub struct LimitRow {
    pub alpha: f64,
    /// Optimal Robin energy at this strength.
    pub value: f64,
    /// `value / alpha`, the quantity converging in the small-α limit.
    pub ratio: f64,
    /// Canonical class of the argmin at this strength.
    pub class_id: ClassId,
    /// Cut displacement from the reference argmin; `+∞` across classes.
    pub distance: f64,
}

/// A limit study: per-strength optima against the limiting reference.
#[derive(Clone, Debug)]
pub struct LimitStudy {
    pub direction: Direction,
    pub rows: Vec<LimitRow>,
    /// Class of the reference argmin (Cheeger cut or Dirichlet optimum).
    pub reference_class: ClassId,
    /// The limiting value: the Cheeger constant, or the Dirichlet optimum.
    pub reference_value: f64,
    pub warnings: Vec<String>,
}

/// Tracks the optimal Robin partition along a strength grid toward one
/// of the two limits, reporting per-row argmin classes and distances to
/// the limiting reference partition.
pub fn limit_study(
    graph: &Arc<MetricGraph>,
    k: usize,
    direction: Direction,
    grid: &[f64],
    caps: &EnumerationCaps,
    opts: &OptimizerOptions,
    exec: Exec,
) -> Result<LimitStudy> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("limit grid is empty".into()));
    }
    if grid.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidParameter(
            "limit grid must be positive and finite".into(),
        ));
    }
    let ordered = match direction {
        Direction::ToZero => grid.windows(2).all(|w| w[0] > w[1]),
        Direction::ToInfinity => grid.windows(2).all(|w| w[0] < w[1]),
    };
    if !ordered {
        return Err(Error::InvalidParameter(
            "limit grid must move strictly toward the studied limit".into(),
        ));
    }
    let mut warnings = Vec::new();
    let (reference, reference_value) = match direction {
        Direction::ToZero => {
            let c = cheeger::cheeger_constant(
                graph,
                k,
                BoundaryMode::EffectiveDegree,
                caps,
                false,
                exec,
            )?;
            warnings.extend(c.warnings);
            (c.argmin, c.value)
        }
        Direction::ToInfinity => {
            let d = dirichlet_minimal_partition(graph, k, caps, false, opts, exec)?;
            warnings.extend(d.warnings);
            (d.argmin, d.value)
        }
    };
    let mut rows = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let r = robin_minimal_partition(graph, k, alpha, caps, false, opts, exec)?;
        warnings.extend(r.warnings);
        rows.push(LimitRow {
            alpha,
            value: r.value,
            ratio: r.value / alpha,
            class_id: r.argmin.class().id().clone(),
            distance: partition_distance(&r.argmin, &reference),
        });
    }
    warnings.sort();
    warnings.dedup();
    Ok(LimitStudy {
        direction,
        rows,
        reference_class: reference.class().id().clone(),
        reference_value,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::class::{interval_two_part_class, VertexGluing};
    use crate::corpus;
    use crate::graph::End;

    /// Smallest root of `k·tan(k/2) = 1`, squared: the two-sided Robin
    /// eigenvalue of the unit interval at strength one, equal to the
    /// one-sided eigenvalue of the half interval.
    const INTERVAL_ALPHA_1: f64 = 1.7070529755509225;
    /// Smallest root of `k·tan(k/4) = 1`, squared: worst part eigenvalue
    /// of the equalized (¼, ½, ¼) three-split of the unit interval.
    const INTERVAL_K3_ALPHA_1: f64 = 3.687850694358955;

    fn arc(g: MetricGraph) -> Arc<MetricGraph> {
        Arc::new(g)
    }

    fn assert_rel(actual: f64, expected: f64, tol: f64) {
        let rel = (actual - expected).abs() / expected.abs().max(1e-300);
        assert!(
            rel <= tol,
            "got {actual}, expected {expected} (rel err {rel:.3e} > {tol:.1e})"
        );
    }

    fn midpoint_partition(g: &Arc<MetricGraph>) -> Partition {
        interval_two_part_class(g, [1, 2])
            .realize(&[vec![0.5, 0.5]])
            .unwrap()
    }

    /// `[1, 2, 3]` tiling of a single-edge interval.
    fn interval_three_part_class(g: &Arc<MetricGraph>) -> ConfigClass {
        ConfigClass::new(
            g.clone(),
            3,
            vec![vec![1, 2, 3]],
            vec![
                VertexGluing {
                    vertex: 0,
                    part: 1,
                    blocks: vec![vec![(0, End::Lo)]],
                },
                VertexGluing {
                    vertex: 1,
                    part: 3,
                    blocks: vec![vec![(0, End::Hi)]],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn midpoint_robin_energy_matches_interval_oracle() {
        let g = arc(corpus::interval(1.0));
        let p = midpoint_partition(&g);
        let e = robin_energy(&p, 1.0, Method::Secular, 1e-12).unwrap();
        assert_rel(e, INTERVAL_ALPHA_1, 1e-8);
    }

    #[test]
    fn zero_alpha_energy_vanishes() {
        let g = arc(corpus::interval(1.0));
        let p = midpoint_partition(&g);
        assert_eq!(robin_energy(&p, 0.0, Method::Secular, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn p_norm_energies() {
        let g = arc(corpus::interval(1.0));
        let p = midpoint_partition(&g);
        // Two identical parts: the 1-norm doubles the common eigenvalue,
        // large p approaches the max.
        let e1 = robin_energy_p(&p, 1.0, 1.0, Method::Secular, 1e-12).unwrap();
        assert_rel(e1, 2.0 * INTERVAL_ALPHA_1, 1e-8);
        let e64 = robin_energy_p(&p, 1.0, 64.0, Method::Secular, 1e-12).unwrap();
        let emax = robin_energy(&p, 1.0, Method::Secular, 1e-12).unwrap();
        assert!((e64 - emax).abs() / emax < 0.05);
        assert!(robin_energy_p(&p, 1.0, 0.5, Method::Secular, 1e-12).is_err());
    }

    #[test]
    fn dirichlet_energy_interval_values() {
        let g = arc(corpus::interval(1.0));
        // Only the cut carries a pin; the covered endpoints stay natural,
        // so each half is a Dirichlet-Neumann interval of length ½.
        let p = midpoint_partition(&g);
        assert_rel(
            dirichlet_energy(&p, Method::Secular, 1e-12).unwrap(),
            PI * PI,
            1e-8,
        );
        let p37 = interval_two_part_class(&g, [1, 2])
            .realize(&[vec![0.3, 0.7]])
            .unwrap();
        assert_rel(
            dirichlet_energy(&p37, Method::Secular, 1e-12).unwrap(),
            (PI / 0.6).powi(2),
            1e-8,
        );
        // Equal thirds: the middle part is pinned at both cuts.
        let thirds = interval_three_part_class(&g)
            .realize(&[vec![1.0 / 3.0; 3]])
            .unwrap();
        assert_rel(
            dirichlet_energy(&thirds, Method::Secular, 1e-12).unwrap(),
            9.0 * PI * PI,
            1e-8,
        );
    }

    #[test]
    fn minimize_interval_two_parts() {
        let g = arc(corpus::interval(1.0));
        let class = interval_two_part_class(&g, [1, 2]);
        let opts = OptimizerOptions::default();
        let dir = minimize_class(&class, Coupling::Dirichlet, &opts).unwrap();
        assert_rel(dir.value, PI * PI, 1e-6);
        assert!((dir.lengths[0][0] - 0.5).abs() < 1e-3);
        assert!(dir.spread <= 1e-5 * dir.value);
        let rob = minimize_class(&class, Coupling::Robin(1.0), &opts).unwrap();
        assert_rel(rob.value, INTERVAL_ALPHA_1, 1e-6);
        assert!((rob.lengths[0][0] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn minimize_interval_three_parts_equalizes() {
        let g = arc(corpus::interval(1.0));
        let class = interval_three_part_class(&g);
        let cm = minimize_class(&class, Coupling::Robin(1.0), &OptimizerOptions::default())
            .unwrap();
        // The middle part sees both cuts, the outer parts one each, so
        // balance puts the cuts at ¼ and ¾, not at the thirds.
        assert_rel(cm.value, INTERVAL_K3_ALPHA_1, 1e-5);
        assert!((cm.lengths[0][0] - 0.25).abs() < 2e-3, "{:?}", cm.lengths);
        assert!((cm.lengths[0][1] - 0.5).abs() < 4e-3, "{:?}", cm.lengths);
    }

    #[test]
    fn interval_minimal_partition_two_parts() {
        let g = arc(corpus::interval(1.0));
        let caps = EnumerationCaps::default();
        let opts = OptimizerOptions::default();
        let r =
            robin_minimal_partition(&g, 2, 1.0, &caps, false, &opts, Exec::Seq).unwrap();
        assert_rel(r.value, INTERVAL_ALPHA_1, 1e-6);
        let expected = midpoint_partition(&g);
        assert_eq!(r.argmin.class().id(), expected.class().id());
        assert!(partition_distance(&r.argmin, &expected) < 1e-3);
        assert!(r.diagnostics.evaluated >= 1);
        assert_eq!(r.alpha, Some(1.0));
    }

    #[test]
    fn dirichlet_partition_interval_and_path() {
        let caps = EnumerationCaps::default();
        let opts = OptimizerOptions::default();
        let g = arc(corpus::interval(1.0));
        let r = dirichlet_minimal_partition(&g, 2, &caps, false, &opts, Exec::Seq).unwrap();
        assert_rel(r.value, PI * PI, 1e-6);
        assert!((r.argmin.cut_positions()[0][0] - 0.5).abs() < 1e-3);
        assert_eq!(r.alpha, None);
        // Two unit edges: the optimal pin sits on the middle vertex and
        // both parts are whole edges.
        let path = arc(corpus::path_graph(&[1.0, 1.0]));
        let r = dirichlet_minimal_partition(&path, 2, &caps, false, &opts, Exec::Seq).unwrap();
        assert_rel(r.value, PI * PI / 4.0, 1e-6);
        assert!(r.argmin.cut_positions().iter().all(|cuts| cuts.is_empty()));
    }

    #[test]
    fn pendant_pumpkin_small_alpha_approaches_cheeger_geometry() {
        let alpha = 1e-3;
        let g = arc(corpus::pumpkin_with_legs());
        let caps = EnumerationCaps::default();
        let opts = OptimizerOptions::default();
        let r =
            robin_minimal_partition(&g, 3, alpha, &caps, false, &opts, Exec::Par).unwrap();
        assert!(
            (r.value / alpha - 1.0).abs() <= 0.02,
            "ratio {}",
            r.value / alpha
        );
        // The argmin is NOT in the Cheeger (pendants vs pumpkin) class:
        // ceding a length-O(α) sliver of each pendant to the pumpkin part
        // trades a first-order ratio of one against larger second-order
        // corrections and wins by about α²/12. The cuts still converge to
        // the joint vertex, so the partitions approach the Cheeger cut
        // geometrically even though the class label never matches.
        let split = crate::class::pumpkin_split_class(&g);
        let split_energy =
            minimize_class(&split, Coupling::Robin(alpha), &opts).unwrap().value;
        assert_ne!(r.argmin.class().id(), split.id());
        assert!(r.value < split_energy);
        let excess = (split_energy - r.value) / r.value;
        assert!(
            (0.5..2.0).contains(&(excess / (alpha / 12.0))),
            "excess {excess:.3e} vs predicted {:.3e}",
            alpha / 12.0
        );
        for (e, cuts) in r.argmin.cut_positions().iter().enumerate() {
            for &x in cuts {
                let gap = (g.edge(e).length - x).min(x);
                assert!(gap < 5e-4, "cut on edge {e} at {x} is not near a vertex");
            }
        }
        let cheeger = cheeger::cheeger_constant(
            &g,
            3,
            BoundaryMode::EffectiveDegree,
            &caps,
            false,
            Exec::Par,
        )
        .unwrap();
        assert_eq!(cheeger.argmin.class().id(), split.id());
    }

    #[test]
    fn monotone_in_alpha_on_the_interval() {
        let g = arc(corpus::interval(1.0));
        let report = alpha_monotonicity_check(
            &g,
            2,
            &[0.5, 1.0, 2.0, 4.0],
            &EnumerationCaps::default(),
            &OptimizerOptions::default(),
            Exec::Seq,
        )
        .unwrap();
        assert_eq!(report.lipschitz_bound, 8.0);
        assert!(report.strictly_increasing, "{:?}", report.violations);
        assert!(report.lipschitz_ok, "{:?}", report.violations);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn limit_study_interval_to_infinity() {
        let g = arc(corpus::interval(1.0));
        let study = limit_study(
            &g,
            2,
            Direction::ToInfinity,
            &[1.0, 1e2, 1e4],
            &EnumerationCaps::default(),
            &OptimizerOptions::default(),
            Exec::Seq,
        )
        .unwrap();
        assert_rel(study.reference_value, PI * PI, 1e-6);
        let values: Vec<f64> = study.rows.iter().map(|r| r.value).collect();
        assert!(values.windows(2).all(|w| w[0] < w[1]));
        let last = study.rows.last().unwrap();
        assert!((last.value - PI * PI).abs() / (PI * PI) < 0.01);
        assert_eq!(last.class_id, study.reference_class);
        assert!(last.distance < 1e-2);
    }

    #[test]
    fn limit_study_path_to_zero() {
        let path = arc(corpus::path_graph(&[1.0, 1.0]));
        let study = limit_study(
            &path,
            2,
            Direction::ToZero,
            &[1e-1, 1e-2],
            &EnumerationCaps::default(),
            &OptimizerOptions::default(),
            Exec::Seq,
        )
        .unwrap();
        // Cheeger reference: cut at the middle vertex, constant 1.
        assert_rel(study.reference_value, 1.0, 1e-9);
        let last = study.rows.last().unwrap();
        assert!((last.ratio - 1.0).abs() <= 0.01, "ratio {}", last.ratio);
        assert_eq!(last.class_id, study.reference_class);
        assert!(last.distance < 1e-6);
        // No part shrinks below ℓ_max / (2k) along the tail.
        let r = robin_minimal_partition(
            &path,
            2,
            1e-2,
            &EnumerationCaps::default(),
            false,
            &OptimizerOptions::default(),
            Exec::Seq,
        )
        .unwrap();
        for part in r.argmin.parts() {
            assert!(part.total_length() >= 0.25 - 1e-9);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = arc(corpus::interval(1.0));
        let caps = EnumerationCaps::default();
        let opts = OptimizerOptions::default();
        assert!(robin_minimal_partition(&g, 1, 1.0, &caps, false, &opts, Exec::Seq).is_err());
        assert!(robin_minimal_partition(&g, 2, 0.0, &caps, false, &opts, Exec::Seq).is_err());
        assert!(robin_minimal_partition(&g, 2, -1.0, &caps, false, &opts, Exec::Seq).is_err());
        assert!(limit_study(
            &g,
            2,
            Direction::ToInfinity,
            &[10.0, 1.0],
            &caps,
            &opts,
            Exec::Seq
        )
        .is_err());
        assert!(alpha_monotonicity_check(&g, 2, &[1.0], &caps, &opts, Exec::Seq).is_err());
    }
}
