//! First-eigenvalue solvers for subgraph Laplacians with δ-couplings of
//! strength `β(v) = α · EffDeg(v)` at boundary descendants (Robin) or
//! pinned boundary values (Dirichlet), plus the coupling-dependence
//! toolkit used by the property suites: the closed-form lower bound, the
//! interval comparison, coupling profiles, and the edge-shortening and
//! gluing limits.
//!
//! Two independent solvers back every computation: a secular-determinant
//! root finder built from per-segment fundamental solutions (exact up to
//! bisection tolerance) and a piecewise-linear finite-element
//! discretization with Richardson extrapolation. They cross-validate
//! each other in the test suites.

mod linalg;
mod mesh;
mod secular;

use std::sync::Arc;

use crate::graph::{EdgeIx, MetricGraph, VertexIx};
use crate::subgraph::{Site, Subgraph};
use crate::{Error, Result};

/// Default bisection tolerance for the secular solver.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Analytic secular determinant, scanned and bisected.
    Secular,
    /// P1 finite elements with two-level Richardson extrapolation.
    Mesh,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Secular => write!(f, "secular"),
            Method::Mesh => write!(f, "mesh"),
        }
    }
}

/// A ground-state problem: a domain plus one δ-strength per descendant.
#[derive(Clone, Debug)]
pub struct RobinProblem {
    domain: Subgraph,
    beta: Vec<f64>,
    alpha: Option<f64>,
}

impl RobinProblem {
    /// Standard coupling: `β = α · EffDeg` at boundary descendants, zero
    /// (Neumann–Kirchhoff) elsewhere.
    pub fn from_alpha(domain: Subgraph, alpha: f64) -> Result<RobinProblem> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling constant must be finite and nonnegative, got {alpha}"
            )));
        }
        let beta = (0..domain.descendants().len())
            .map(|d| {
                if domain.is_boundary(d) {
                    alpha * domain.eff_deg(d) as f64
                } else {
                    0.0
                }
            })
            .collect();
        Ok(RobinProblem {
            domain,
            beta,
            alpha: Some(alpha),
        })
    }

    /// General per-descendant strengths; all must be finite and `≥ 0`.
    pub fn with_strengths(domain: Subgraph, beta: Vec<f64>) -> Result<RobinProblem> {
        if beta.len() != domain.descendants().len() {
            return Err(Error::InvalidParameter(format!(
                "{} strengths for {} descendants",
                beta.len(),
                domain.descendants().len()
            )));
        }
        if beta.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::InvalidParameter(
                "strengths must be finite and nonnegative".into(),
            ));
        }
        Ok(RobinProblem {
            domain,
            beta,
            alpha: None,
        })
    }

    pub fn domain(&self) -> &Subgraph {
        &self.domain
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// The coupling constant when the problem was built from one.
    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }
}

/// Output of a ground-state solve.
#[derive(Clone, Debug)]
pub struct SpectralResult {
    pub lambda1: f64,
    pub method: Method,
    /// Bisection half-width (secular) or extrapolation estimate (mesh).
    pub error_estimate: f64,
    /// Ground state sampled at nine offsets per segment, as
    /// `(parent edge, offset on that edge, value)`, peak-normalized to
    /// `+1`.
    pub eigenfunction: Vec<(EdgeIx, f64, f64)>,
}

/// Shared solver entry. Dirichlet descendants are marked `β = +∞`.
fn solve(domain: &Subgraph, beta: &[f64], method: Method, tol: f64) -> Result<SpectralResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if domain.total_length() < 1e-12 {
        return Err(Error::InvalidSubgraph(
            "domain length below 1e-12".into(),
        ));
    }
    if beta.iter().all(|b| b.abs() <= 1e-14) {
        // Pure Neumann–Kirchhoff: the ground state is constant at zero.
        let eigenfunction = domain
            .segments()
            .iter()
            .enumerate()
            .flat_map(|(_, seg)| {
                (0..=8).map(move |j| {
                    (seg.edge, seg.lo + seg.length() * j as f64 / 8.0, 1.0)
                })
            })
            .collect();
        return Ok(SpectralResult {
            lambda1: 0.0,
            method,
            error_estimate: 0.0,
            eigenfunction,
        });
    }
    match method {
        Method::Secular => {
            let (lambda1, error_estimate) = secular::lambda1(domain, beta, tol)?;
            let eigenfunction = secular::eigenfunction(domain, beta, lambda1);
            Ok(SpectralResult {
                lambda1,
                method,
                error_estimate,
                eigenfunction,
            })
        }
        Method::Mesh => {
            let (lambda1, error_estimate, eigenfunction) = mesh::lambda1(domain, beta)?;
            Ok(SpectralResult {
                lambda1,
                method,
                error_estimate,
                eigenfunction,
            })
        }
    }
}

/// First Robin eigenvalue of the problem's domain.
pub fn robin_lambda1(p: &RobinProblem, method: Method, tol: f64) -> Result<SpectralResult> {
    solve(&p.domain, &p.beta, method, tol)
}

/// First Dirichlet eigenvalue: boundary descendants pinned to zero,
/// Neumann–Kirchhoff conditions everywhere else.
pub fn dirichlet_lambda1(omega: &Subgraph, method: Method, tol: f64) -> Result<SpectralResult> {
    let beta: Vec<f64> = (0..omega.descendants().len())
        .map(|d| {
            if omega.is_boundary(d) {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .collect();
    solve(omega, &beta, method, tol)
}

/// Closed-form lower bound `2απ² / (2|Ω|(π² + 4α|Ω|))` for the first
/// Robin eigenvalue of a domain with nonempty boundary.
pub fn robin_lower_bound(omega: &Subgraph, alpha: f64) -> f64 {
    let l = omega.total_length();
    let pi2 = std::f64::consts::PI.powi(2);
    2.0 * alpha * pi2 / (2.0 * l * (pi2 + 4.0 * alpha * l))
}

/// Interval comparison: returns the first eigenvalue of `Ω` with every
/// boundary strength forced to `α` (effective degrees replaced by one)
/// and the first eigenvalue of an interval of the same total length
/// with strength `α` at one end and Neumann at the other. The first
/// dominates the second.
pub fn nicaise_comparison(omega: &Subgraph, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "coupling constant must be finite and nonnegative, got {alpha}"
        )));
    }
    let beta: Vec<f64> = (0..omega.descendants().len())
        .map(|d| if omega.is_boundary(d) { alpha } else { 0.0 })
        .collect();
    if beta.iter().all(|b| *b == 0.0) {
        return Err(Error::InvalidSubgraph(
            "comparison needs a domain with boundary".into(),
        ));
    }
    let lhs = solve(omega, &beta, Method::Secular, DEFAULT_TOL)?.lambda1;
    let interval = Arc::new(MetricGraph::new(
        vec!["a".into(), "b".into()],
        vec![("e".into(), 0, 1, omega.total_length())],
    )?);
    let whole = Subgraph::whole(interval);
    let strengths = vertex_strengths(&whole, &[(0, alpha)]);
    let rhs = solve(&whole, &strengths, Method::Secular, DEFAULT_TOL)?.lambda1;
    Ok((lhs, rhs))
}

/// Evaluates `α ↦ λ₁^α` over an ascending grid of couplings.
pub fn alpha_profile(
    omega: &Subgraph,
    grid: &[f64],
    method: Method,
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid.first().is_some_and(|a| *a < 0.0) {
        return Err(Error::InvalidParameter(
            "coupling grid must be ascending and nonnegative".into(),
        ));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &alpha in grid {
        let p = RobinProblem::from_alpha(omega.clone(), alpha)?;
        rows.push((alpha, robin_lambda1(&p, method, tol)?.lambda1));
    }
    Ok(rows)
}

/// A family of graphs differing only in the length of one distinguished
/// non-loop edge, with fixed per-vertex background strengths.
#[derive(Clone, Debug)]
pub struct GlueFamily {
    /// Reference topology; the distinguished edge's stored length is
    /// ignored (each evaluation sets its own).
    pub graph: Arc<MetricGraph>,
    pub edge: EdgeIx,
    /// Background δ-strength per vertex, excluding the two endpoint
    /// strengths supplied per call.
    pub base_beta: Vec<f64>,
}

/// Evaluates `λ₁` along `t_grid` for the family: strength `beta` at the
/// distinguished edge's low endpoint and `gamma` at its high endpoint.
/// Entries with `t = 0` contract the edge and place `beta + gamma` on
/// the merged vertex. Shrinking the edge never lowers the eigenvalue
/// and the `t = 0` value is the supremum.
pub fn glue_limit_check(
    family: &GlueFamily,
    beta: f64,
    gamma: f64,
    t_grid: &[f64],
    method: Method,
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    let g = &family.graph;
    if family.edge >= g.n_edges() {
        return Err(Error::InvalidParameter(format!(
            "no edge {}",
            family.edge
        )));
    }
    if g.edge(family.edge).is_loop() {
        return Err(Error::Unsupported(
            "the distinguished edge must not be a loop".into(),
        ));
    }
    if family.base_beta.len() != g.n_vertices() {
        return Err(Error::InvalidParameter(
            "one background strength per vertex required".into(),
        ));
    }
    let lo = g.edge(family.edge).lo;
    let hi = g.edge(family.edge).hi;
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "edge lengths must be finite and nonnegative, got {t}"
            )));
        }
        let lambda = if t == 0.0 {
            let (contracted, vmap, _) = g.contract_edge(family.edge)?;
            let mut per_vertex = vec![0.0; contracted.n_vertices()];
            for (v, &b) in family.base_beta.iter().enumerate() {
                per_vertex[vmap[v]] += b;
            }
            per_vertex[vmap[lo]] += beta + gamma;
            let whole = Subgraph::whole(Arc::new(contracted));
            let strengths = per_vertex_to_descendants(&whole, &per_vertex);
            solve(&whole, &strengths, method, tol)?.lambda1
        } else {
            let resized = Arc::new(g.with_edge_length(family.edge, t)?);
            let mut per_vertex = family.base_beta.clone();
            per_vertex[lo] += beta;
            per_vertex[hi] += gamma;
            let whole = Subgraph::whole(resized);
            let strengths = per_vertex_to_descendants(&whole, &per_vertex);
            solve(&whole, &strengths, method, tol)?.lambda1
        };
        rows.push((t, lambda));
    }
    Ok(rows)
}

/// Maps sparse `(vertex, strength)` pairs onto the descendants of a
/// whole-graph subgraph.
fn vertex_strengths(whole: &Subgraph, entries: &[(VertexIx, f64)]) -> Vec<f64> {
    let mut out = vec![0.0; whole.descendants().len()];
    for (d, desc) in whole.descendants().iter().enumerate() {
        if let Site::Vertex(v) = desc.site {
            for &(tv, b) in entries {
                if tv == v {
                    out[d] += b;
                }
            }
        }
    }
    out
}

fn per_vertex_to_descendants(whole: &Subgraph, per_vertex: &[f64]) -> Vec<f64> {
    whole
        .descendants()
        .iter()
        .map(|desc| match desc.site {
            Site::Vertex(v) => per_vertex[v],
            Site::EdgePoint(..) => 0.0,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::MetricGraph;

    // Smallest positive roots k of k·tan(k/2) = α, squared: the first
    // eigenvalue of a unit interval with strength α at both ends.
    const INTERVAL_ALPHA_01: f64 = 0.19671068928337113;
    const INTERVAL_ALPHA_1: f64 = 1.7070529755509225;
    const INTERVAL_ALPHA_10: f64 = 6.904678181117094;

    const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

    fn interval_with_ends(alpha: f64) -> RobinProblem {
        let g = Arc::new(corpus::interval(1.0));
        let whole = Subgraph::whole(g);
        let beta = vec![alpha, alpha];
        RobinProblem::with_strengths(whole, beta).unwrap()
    }

    fn pumpkin_part() -> Subgraph {
        // The four half-length parallel edges of the pumpkin-with-legs
        // graph; |∂Ω| = 2 by effective degree, |Ω| = 2.
        let g = Arc::new(corpus::pumpkin_with_legs());
        Subgraph::induced(g, &[2, 3, 4, 5]).unwrap()
    }

    #[test]
    fn interval_roots_match_the_transcendental_oracle() {
        for (alpha, want) in [
            (0.1, INTERVAL_ALPHA_01),
            (1.0, INTERVAL_ALPHA_1),
            (10.0, INTERVAL_ALPHA_10),
        ] {
            let p = interval_with_ends(alpha);
            let r = robin_lambda1(&p, Method::Secular, DEFAULT_TOL).unwrap();
            assert!(
                (r.lambda1 - want).abs() <= 1e-8 * want,
                "α={alpha}: {} vs {want}",
                r.lambda1
            );
        }
    }

    #[test]
    fn half_interval_with_one_robin_end_matches_by_reflection() {
        let g = Arc::new(corpus::interval(0.5));
        let whole = Subgraph::whole(g);
        let p = RobinProblem::with_strengths(whole, vec![1.0, 0.0]).unwrap();
        let r = robin_lambda1(&p, Method::Secular, DEFAULT_TOL).unwrap();
        assert!(
            (r.lambda1 - INTERVAL_ALPHA_1).abs() <= 1e-8,
            "{} vs {INTERVAL_ALPHA_1}",
            r.lambda1
        );
    }

    #[test]
    fn zero_coupling_gives_the_constant_ground_state() {
        let g = Arc::new(corpus::pumpkin_with_legs());
        let p = RobinProblem::from_alpha(Subgraph::whole(g), 0.0).unwrap();
        let r = robin_lambda1(&p, Method::Secular, DEFAULT_TOL).unwrap();
        assert_eq!(r.lambda1, 0.0);
        assert_eq!(r.error_estimate, 0.0);
        assert!(r.eigenfunction.iter().all(|&(_, _, v)| v == 1.0));
    }

    #[test]
    fn dirichlet_intervals_hit_the_sine_eigenvalue() {
        // A segment strictly inside a longer edge has both ends in its
        // boundary, so both get pinned.
        for l in [0.5, 1.0, 2.0] {
            let g = Arc::new(corpus::interval(l + 2.0));
            let omega = Subgraph::segment(g, 0, 1.0, 1.0 + l).unwrap();
            let want = (std::f64::consts::PI / l).powi(2);
            let r = dirichlet_lambda1(&omega, Method::Secular, DEFAULT_TOL).unwrap();
            assert!(
                (r.lambda1 - want).abs() <= 1e-8 * want,
                "l={l}: {} vs {want}",
                r.lambda1
            );
        }
    }

    #[test]
    fn dirichlet_three_star_reduces_to_a_quarter_wave() {
        let star = MetricGraph::new(
            vec!["c".into(), "t0".into(), "t1".into(), "t2".into()],
            vec![
                ("l0".into(), 0, 1, 1.0),
                ("l1".into(), 0, 2, 1.0),
                ("l2".into(), 0, 3, 1.0),
            ],
        )
        .unwrap()
        .with_ambient_extra(vec![0, 1, 1, 1])
        .unwrap();
        let omega = Subgraph::whole(Arc::new(star));
        let r = dirichlet_lambda1(&omega, Method::Secular, DEFAULT_TOL).unwrap();
        let want = PI2 / 4.0;
        assert!(
            (r.lambda1 - want).abs() <= 1e-8 * want,
            "{} vs {want}",
            r.lambda1
        );
    }

    #[test]
    fn huge_coupling_approaches_dirichlet_from_below() {
        let p = interval_with_ends(1e6);
        let robin = robin_lambda1(&p, Method::Secular, DEFAULT_TOL).unwrap();
        assert!(robin.lambda1 <= PI2);
        assert!(PI2 - robin.lambda1 < 1e-3 * PI2, "gap {}", PI2 - robin.lambda1);
    }

    #[test]
    fn mesh_and_secular_agree_within_their_estimates() {
        let cases: Vec<RobinProblem> = vec![
            interval_with_ends(1.0),
            interval_with_ends(10.0),
            RobinProblem::from_alpha(pumpkin_part(), 2.0).unwrap(),
        ];
        for p in cases {
            let sec = robin_lambda1(&p, Method::Secular, DEFAULT_TOL).unwrap();
            let mesh = robin_lambda1(&p, Method::Mesh, DEFAULT_TOL).unwrap();
            let budget = sec.error_estimate + mesh.error_estimate;
            assert!(
                (sec.lambda1 - mesh.lambda1).abs() <= budget.max(1e-10),
                "{} vs {} (budget {budget})",
                sec.lambda1,
                mesh.lambda1
            );
        }
    }

    #[test]
    fn mesh_interval_accuracy_is_within_one_in_ten_thousand() {
        let p = interval_with_ends(1.0);
        let r = robin_lambda1(&p, Method::Mesh, DEFAULT_TOL).unwrap();
        assert!(
            (r.lambda1 - INTERVAL_ALPHA_1).abs() <= 1e-4 * INTERVAL_ALPHA_1,
            "{} vs {INTERVAL_ALPHA_1}",
            r.lambda1
        );
    }

    #[test]
    fn lower_bound_evaluates_and_scales_correctly() {
        let g = Arc::new(corpus::interval(3.0));
        let omega = Subgraph::segment(g, 0, 1.0, 2.0).unwrap();
        let want = 2.0 * PI2 / (2.0 * (PI2 + 4.0));
        assert!((robin_lower_bound(&omega, 1.0) - want).abs() < 1e-12);
        // As α → 0 the bound behaves like α/|Ω|.
        let tiny = robin_lower_bound(&omega, 1e-9) / 1e-9;
        assert!((tiny - 1.0).abs() < 1e-6, "slope {tiny}");
        // And it really is a lower bound.
        let p = RobinProblem::from_alpha(omega.clone(), 0.7).unwrap();
        let r = robin_lambda1(&p, Method::Secular, DEFAULT_TOL).unwrap();
        assert!(robin_lower_bound(&omega, 0.7) <= r.lambda1 + 1e-9);
    }

    #[test]
    fn interval_comparison_is_tight_for_intervals() {
        let g = Arc::new(corpus::interval(2.0));
        let omega = Subgraph::segment(g, 0, 0.0, 1.0).unwrap();
        // One end at the edge tip (interior, pendant), the other a cut.
        let (lhs, rhs) = nicaise_comparison(&omega, 1.0).unwrap();
        assert!((lhs - rhs).abs() < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn interval_comparison_bounds_branchier_domains() {
        let (lhs, rhs) = nicaise_comparison(&pumpkin_part(), 1.0).unwrap();
        assert!(lhs >= rhs - 1e-9, "{lhs} < {rhs}");
        let star = MetricGraph::new(
            vec!["c".into(), "t0".into(), "t1".into(), "t2".into()],
            vec![
                ("l0".into(), 0, 1, 1.0),
                ("l1".into(), 0, 2, 1.0),
                ("l2".into(), 0, 3, 1.0),
            ],
        )
        .unwrap()
        .with_ambient_extra(vec![0, 1, 0, 0])
        .unwrap();
        let omega = Subgraph::whole(Arc::new(star));
        let (lhs, rhs) = nicaise_comparison(&omega, 2.0).unwrap();
        assert!(lhs >= rhs - 1e-9, "{lhs} < {rhs}");
    }

    #[test]
    fn profile_is_increasing_concave_with_the_right_slope() {
        let omega = pumpkin_part();
        let ratio = omega.boundary_size(crate::subgraph::BoundaryMode::EffectiveDegree) as f64
            / omega.total_length();
        let grid = [0.0, 1e-3, 2e-3, 0.5, 1.0, 2.0, 4.0];
        let rows = alpha_profile(&omega, &grid, Method::Secular, DEFAULT_TOL).unwrap();
        assert_eq!(rows[0].1, 0.0);
        for w in rows.windows(2) {
            assert!(w[1].1 > w[0].1, "not increasing at α={}", w[1].0);
        }
        // Concavity via divided differences on the (nonuniform) grid.
        for w in rows.windows(3) {
            let d1 = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            let d2 = (w[2].1 - w[1].1) / (w[2].0 - w[1].0);
            assert!(d2 <= d1 + 1e-9, "not concave at α={}", w[1].0);
        }
        let slope = rows[1].1 / rows[1].0;
        assert!(
            (slope - ratio).abs() < 1e-2 * ratio,
            "small-coupling slope {slope} vs {ratio}"
        );
    }

    #[test]
    fn shrinking_a_pendant_edge_raises_the_eigenvalue_to_the_glued_limit() {
        // Path: far tip (strength α) — unit edge — junction — tail of
        // length t with strength α at its tip. As t → 0 the strength
        // arrives at the junction: the limit is the unit interval with α
        // at both ends.
        let g = Arc::new(corpus::path_graph(&[1.0, 0.25]));
        let family = GlueFamily {
            graph: g,
            edge: 1,
            base_beta: vec![1.0, 0.0, 0.0],
        };
        let rows = glue_limit_check(
            &family,
            0.0,
            1.0,
            &[0.25, 0.1, 0.01, 0.001, 0.0],
            Method::Secular,
            DEFAULT_TOL,
        )
        .unwrap();
        for w in rows.windows(2) {
            assert!(
                w[1].1 >= w[0].1 - 1e-9,
                "shrinking lowered λ: {} -> {}",
                w[0].1,
                w[1].1
            );
        }
        let last = rows.last().unwrap();
        assert_eq!(last.0, 0.0);
        assert!(
            (last.1 - INTERVAL_ALPHA_1).abs() <= 1e-8,
            "glued limit {} vs {INTERVAL_ALPHA_1}",
            last.1
        );
    }

    #[test]
    fn glue_family_with_no_strengths_stays_at_zero() {
        let g = Arc::new(corpus::path_graph(&[1.0, 0.5]));
        let family = GlueFamily {
            graph: g,
            edge: 1,
            base_beta: vec![0.0, 0.0, 0.0],
        };
        let rows =
            glue_limit_check(&family, 0.0, 0.0, &[0.5, 0.1, 0.0], Method::Secular, DEFAULT_TOL)
                .unwrap();
        assert!(rows.iter().all(|&(_, l)| l == 0.0));
    }

    #[test]
    fn ground_state_samples_are_strictly_positive() {
        let p = RobinProblem::from_alpha(pumpkin_part(), 1.0).unwrap();
        for method in [Method::Secular, Method::Mesh] {
            let r = robin_lambda1(&p, method, DEFAULT_TOL).unwrap();
            assert!(
                r.eigenfunction.iter().all(|&(_, _, v)| v > 0.0),
                "{method} produced a nonpositive sample"
            );
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let g = Arc::new(corpus::interval(1.0));
        let whole = Subgraph::whole(g.clone());
        assert!(RobinProblem::from_alpha(whole.clone(), -1.0).is_err());
        assert!(RobinProblem::with_strengths(whole.clone(), vec![1.0]).is_err());
        assert!(
            RobinProblem::with_strengths(whole.clone(), vec![1.0, f64::INFINITY]).is_err()
        );
        let p = RobinProblem::from_alpha(whole, 1.0).unwrap();
        assert!(robin_lambda1(&p, Method::Secular, 0.0).is_err());
        assert!(alpha_profile(
            &Subgraph::whole(g),
            &[1.0, 0.5],
            Method::Secular,
            DEFAULT_TOL
        )
        .is_err());
    }
}
