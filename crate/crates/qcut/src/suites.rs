//! Self-check property suites behind the `check` subcommand.
//!
//! Each suite runs a batch of numerical checks against closed forms or
//! structural oracles and collects failures as strings instead of
//! panicking, so a front end can print one line per suite and keep going.
//! The whole battery is sized to finish within a minute.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::class::{ConfigClass, VertexGluing};
use crate::corpus;
use crate::graph::{End, MetricGraph};
use crate::spectral::{self, GlueFamily, Method, RobinProblem};
use crate::subgraph::{BoundaryMode, Subgraph};

/// Eigenvalue tolerance for the suite solves; check slack is wider.
const EIG_TOL: f64 = 1e-12;
/// Slack added on top of exact inequalities to absorb solver error.
const SLACK: f64 = 1e-8;
/// Margin demanded from strict inequalities.
const STRICT: f64 = 1e-10;

const GRID: [f64; 8] = [0.0, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    /// Number of individual assertions evaluated.
    pub checks: usize,
    pub failures: Vec<String>,
    pub millis: u128,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Recorder {
    checks: usize,
    failures: Vec<String>,
}

impl Recorder {
    fn new() -> Self {
        Recorder {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn fail(&mut self, msg: String) {
        self.checks += 1;
        self.failures.push(msg);
    }

    fn finish(self, name: &'static str, start: Instant) -> SuiteReport {
        SuiteReport {
            name,
            checks: self.checks,
            failures: self.failures,
            millis: start.elapsed().as_millis(),
        }
    }
}

/// Five fixed domains with nonempty boundary, one per corpus family.
fn profile_domains() -> Vec<(&'static str, Subgraph)> {
    let interval = Arc::new(corpus::interval(1.0));
    let path = Arc::new(corpus::path_graph(&[1.0, 1.0]));
    let cycle = Arc::new(corpus::cycle_graph(&[1.0, 1.0, 1.0]));
    let star = Arc::new(corpus::star_graph(&[1.0, 1.0, 1.0]));
    let host = Arc::new(corpus::pumpkin_with_legs());
    vec![
        (
            "interval-half",
            Subgraph::segment(interval, 0, 0.0, 0.5).unwrap(),
        ),
        ("path-first-edge", Subgraph::induced(path, &[0]).unwrap()),
        ("cycle-arc", Subgraph::induced(cycle, &[0, 1]).unwrap()),
        ("star-two-legs", Subgraph::induced(star, &[0, 1]).unwrap()),
        ("pumpkin", Subgraph::induced(host, &[2, 3, 4, 5]).unwrap()),
    ]
}

/// Strict monotonicity and concavity of `α ↦ λ₁^α` on the corpus domains.
pub fn alpha_monotonicity() -> SuiteReport {
    let start = Instant::now();
    let mut rec = Recorder::new();
    for (name, omega) in profile_domains() {
        let profile = match spectral::alpha_profile(&omega, &GRID, Method::Secular, EIG_TOL) {
            Ok(p) => p,
            Err(e) => {
                rec.fail(format!("{name}: profile failed: {e}"));
                continue;
            }
        };
        rec.check(profile[0].1.abs() <= 1e-9, || {
            format!("{name}: λ(0) = {} is not zero", profile[0].1)
        });
        for w in profile.windows(2) {
            let ((a1, l1), (a2, l2)) = (w[0], w[1]);
            rec.check(l2 - l1 > STRICT, || {
                format!("{name}: λ({a2}) − λ({a1}) = {} not strictly positive", l2 - l1)
            });
        }
        for w in profile.windows(3) {
            let ((a1, l1), (a2, l2), (a3, l3)) = (w[0], w[1], w[2]);
            let s12 = (l2 - l1) / (a2 - a1);
            let s23 = (l3 - l2) / (a3 - a2);
            rec.check(s23 <= s12 + SLACK * (1.0 + s12.abs()), || {
                format!("{name}: slope rises from {s12} to {s23} across α = {a2}")
            });
        }
    }
    rec.finish("alpha-monotonicity", start)
}

/// Divided differences of the profile never exceed `|∂Ω|/|Ω|`.
pub fn derivative_bound() -> SuiteReport {
    let start = Instant::now();
    let mut rec = Recorder::new();
    for (name, omega) in profile_domains() {
        let ratio =
            omega.boundary_size(BoundaryMode::EffectiveDegree) as f64 / omega.total_length();
        let profile = match spectral::alpha_profile(&omega, &GRID, Method::Secular, EIG_TOL) {
            Ok(p) => p,
            Err(e) => {
                rec.fail(format!("{name}: profile failed: {e}"));
                continue;
            }
        };
        for w in profile.windows(2) {
            let ((a1, l1), (a2, l2)) = (w[0], w[1]);
            let slope = (l2 - l1) / (a2 - a1);
            rec.check(slope <= ratio + SLACK * (1.0 + ratio), || {
                format!("{name}: slope {slope} over [{a1}, {a2}] exceeds |∂Ω|/|Ω| = {ratio}")
            });
        }
    }
    rec.finish("derivative-bound", start)
}

/// Deterministic pool of subgraphs with nonempty boundary, drawn from the
/// corpus plus two random multigraphs, paired with a coupling constant.
fn sampled_domains(count: usize) -> Vec<(Subgraph, f64)> {
    let hosts: Vec<Arc<MetricGraph>> = vec![
        Arc::new(corpus::interval(1.0)),
        Arc::new(corpus::path_graph(&[1.0, 0.5, 2.0])),
        Arc::new(corpus::cycle_graph(&[1.0, 1.0, 0.5])),
        Arc::new(corpus::star_graph(&[1.0, 0.5, 0.75])),
        Arc::new(corpus::pumpkin_with_legs()),
        Arc::new(corpus::random_graph(11, 4, 3)),
        Arc::new(corpus::random_graph(12, 5, 2)),
    ];
    let alphas = [0.3, 1.0, 3.0];
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let host = &hosts[out.len() % hosts.len()];
        let m = host.n_edges();
        let target = rng.gen_range(1..=m);
        let mut chosen = BTreeSet::new();
        chosen.insert(rng.gen_range(0..m));
        while chosen.len() < target {
            let mut vset = BTreeSet::new();
            for &e in &chosen {
                vset.insert(host.edge(e).lo);
                vset.insert(host.edge(e).hi);
            }
            let candidates: Vec<usize> = (0..m)
                .filter(|e| {
                    !chosen.contains(e)
                        && (vset.contains(&host.edge(*e).lo) || vset.contains(&host.edge(*e).hi))
                })
                .collect();
            if candidates.is_empty() {
                break;
            }
            chosen.insert(candidates[rng.gen_range(0..candidates.len())]);
        }
        let edges: Vec<usize> = chosen.into_iter().collect();
        let sub = Subgraph::induced(Arc::clone(host), &edges).unwrap();
        let sub = if sub.boundary().is_empty() {
            let e = rng.gen_range(0..m);
            let len = host.edge(e).length;
            Subgraph::segment(Arc::clone(host), e, 0.0, 0.6 * len).unwrap()
        } else {
            sub
        };
        let alpha = alphas[out.len() % alphas.len()];
        out.push((sub, alpha));
    }
    out
}

/// Closed-form lower bound and the interval comparison on sampled
/// subgraphs.
pub fn eigenvalue_bounds() -> SuiteReport {
    let start = Instant::now();
    let mut rec = Recorder::new();
    for (i, (omega, alpha)) in sampled_domains(20).into_iter().enumerate() {
        let lam = RobinProblem::from_alpha(omega.clone(), alpha)
            .and_then(|p| spectral::robin_lambda1(&p, Method::Secular, 1e-10))
            .map(|r| r.lambda1);
        let lam = match lam {
            Ok(l) => l,
            Err(e) => {
                rec.fail(format!("sample {i}: solve failed: {e}"));
                continue;
            }
        };
        let bound = spectral::robin_lower_bound(&omega, alpha);
        rec.check(bound <= lam + SLACK * (1.0 + lam.abs()), || {
            format!("sample {i}: lower bound {bound} exceeds λ₁ = {lam} at α = {alpha}")
        });
        match spectral::nicaise_comparison(&omega, alpha) {
            Ok((lhs, rhs)) => rec.check(lhs >= rhs - SLACK * (1.0 + rhs.abs()), || {
                format!("sample {i}: interval comparison {lhs} < {rhs} at α = {alpha}")
            }),
            Err(e) => rec.fail(format!("sample {i}: comparison failed: {e}")),
        }
    }
    rec.finish("eigenvalue-bounds", start)
}

/// Edge shortening never lowers the eigenvalue, and the glue limit is
/// approached monotonically from below, on three parametrized families.
pub fn glue_continuity() -> SuiteReport {
    let start = Instant::now();
    let mut rec = Recorder::new();
    let t_grid = [0.5, 0.3, 0.15, 0.05, 0.0];

    // Family 1: background strengths at the pendant tips, one pumpkin
    // strand shrinks with no strength of its own.
    let host = Arc::new(corpus::pumpkin_with_legs());
    let fam1 = GlueFamily {
        graph: Arc::clone(&host),
        edge: 5,
        base_beta: vec![1.0, 1.0, 0.0, 0.0],
    };
    // Family 2: a path with Robin ends whose second edge shrinks; the
    // limit is the unit interval with the same end strengths, solved
    // independently on its own graph.
    let path = Arc::new(corpus::path_graph(&[1.0, 1.0]));
    let fam2 = GlueFamily {
        graph: Arc::clone(&path),
        edge: 1,
        base_beta: vec![1.0, 0.0, 1.0],
    };
    // Family 3: no strengths anywhere; the eigenvalue is identically zero.
    let cycle = Arc::new(corpus::cycle_graph(&[1.0, 1.0, 1.0]));
    let fam3 = GlueFamily {
        graph: Arc::clone(&cycle),
        edge: 0,
        base_beta: vec![0.0, 0.0, 0.0],
    };

    for (name, fam, beta, gamma) in [
        ("pendant-strengths", &fam1, 0.0, 0.0),
        ("robin-path", &fam2, 0.0, 0.0),
        ("all-neumann", &fam3, 0.0, 0.0),
    ] {
        let rows =
            match spectral::glue_limit_check(fam, beta, gamma, &t_grid, Method::Secular, EIG_TOL) {
                Ok(rows) => rows,
                Err(e) => {
                    rec.fail(format!("{name}: family evaluation failed: {e}"));
                    continue;
                }
            };
        for w in rows.windows(2) {
            let ((t1, l1), (t2, l2)) = (w[0], w[1]);
            rec.check(l2 >= l1 - SLACK * (1.0 + l1.abs()), || {
                format!("{name}: λ dropped from {l1} to {l2} as t fell {t1} → {t2}")
            });
        }
        let last = rows.last().unwrap().1;
        match name {
            "robin-path" => {
                let interval = Arc::new(corpus::interval(1.0));
                let whole = Subgraph::whole(interval);
                let direct = RobinProblem::with_strengths(whole, vec![1.0, 1.0])
                    .and_then(|p| spectral::robin_lambda1(&p, Method::Secular, EIG_TOL))
                    .map(|r| r.lambda1);
                match direct {
                    Ok(d) => rec.check((last - d).abs() <= 1e-8 * (1.0 + d.abs()), || {
                        format!("robin-path: glued value {last} differs from direct {d}")
                    }),
                    Err(e) => rec.fail(format!("robin-path: direct solve failed: {e}")),
                }
            }
            "all-neumann" => {
                for &(t, l) in &rows {
                    rec.check(l.abs() <= 1e-9, || {
                        format!("all-neumann: λ({t}) = {l} is not zero")
                    });
                }
            }
            _ => {
                rec.check(last >= rows[0].1, || {
                    format!("{name}: limit {last} below the start {}", rows[0].1)
                });
            }
        }
    }

    // Shortening a single edge of a fixed domain, other lengths fixed.
    let shorten: [(&str, fn(f64) -> MetricGraph, &[usize], usize); 2] = [
        (
            "pumpkin-strand",
            |l| {
                corpus::pumpkin_with_legs()
                    .with_edge_length(2, l)
                    .unwrap()
            },
            &[2, 3, 4, 5],
            2,
        ),
        (
            "star-leg",
            |l| corpus::star_graph(&[1.0, 1.0, 1.0]).with_edge_length(0, l).unwrap(),
            &[0, 1],
            0,
        ),
    ];
    for (name, build, edges, _) in shorten {
        let mut prev: Option<f64> = None;
        for len in [0.5, 0.4, 0.3, 0.2, 0.1] {
            let parent = Arc::new(build(len));
            let omega = Subgraph::induced(parent, edges).unwrap();
            let lam = RobinProblem::from_alpha(omega, 1.0)
                .and_then(|p| spectral::robin_lambda1(&p, Method::Secular, EIG_TOL))
                .map(|r| r.lambda1);
            let lam = match lam {
                Ok(l) => l,
                Err(e) => {
                    rec.fail(format!("{name}: solve failed at length {len}: {e}"));
                    continue;
                }
            };
            if let Some(p) = prev {
                rec.check(lam >= p - SLACK * (1.0 + p.abs()), || {
                    format!("{name}: λ dropped from {p} to {lam} when the edge shrank to {len}")
                });
            }
            prev = Some(lam);
        }
    }
    rec.finish("glue-continuity", start)
}

/// The combinatorial perimeter equals the per-vertex LP oracle on every
/// sampled subgraph.
pub fn perimeter_oracle() -> SuiteReport {
    let start = Instant::now();
    let mut rec = Recorder::new();
    let mut pool: Vec<(String, Subgraph)> = profile_domains()
        .into_iter()
        .map(|(n, s)| (n.to_string(), s))
        .collect();
    for (i, (s, _)) in sampled_domains(20).into_iter().enumerate() {
        pool.push((format!("sample-{i}"), s));
    }
    for (name, omega) in pool {
        match (omega.perimeter(), omega.perimeter_oracle()) {
            (Ok(p), Ok(o)) => {
                rec.check((o - p as f64).abs() <= 1e-9, || {
                    format!("{name}: perimeter {p} but oracle {o}")
                });
            }
            (a, b) => rec.fail(format!("{name}: perimeter {a:?}, oracle {b:?}")),
        }
    }
    rec.finish("perimeter-oracle", start)
}

/// Boundary size drops from 5 to 1 when the slivered middle part of the
/// pendant-pumpkin graph degenerates onto the joint vertex; the limit
/// never exceeds any member of the sequence part by part.
pub fn lower_semicontinuity() -> SuiteReport {
    let start = Instant::now();
    let mut rec = Recorder::new();
    let g = Arc::new(corpus::pumpkin_with_legs());
    let labels = vec![
        vec![1],
        vec![2],
        vec![2, 3],
        vec![2, 3],
        vec![2, 3],
        vec![2, 3],
    ];
    let gluings = vec![
        VertexGluing {
            vertex: 0,
            part: 1,
            blocks: vec![vec![(0, End::Lo)]],
        },
        VertexGluing {
            vertex: 1,
            part: 2,
            blocks: vec![vec![(1, End::Lo)]],
        },
        VertexGluing {
            vertex: 2,
            part: 1,
            blocks: vec![vec![(0, End::Hi)]],
        },
        VertexGluing {
            vertex: 2,
            part: 2,
            blocks: vec![vec![
                (1, End::Hi),
                (2, End::Lo),
                (3, End::Lo),
                (4, End::Lo),
                (5, End::Lo),
            ]],
        },
        VertexGluing {
            vertex: 3,
            part: 3,
            blocks: vec![vec![(2, End::Hi), (3, End::Hi), (4, End::Hi), (5, End::Hi)]],
        },
    ];
    let class = match ConfigClass::new(Arc::clone(&g), 3, labels, gluings) {
        Ok(c) => c,
        Err(e) => {
            rec.fail(format!("class construction failed: {e}"));
            return rec.finish("lower-semicontinuity", start);
        }
    };
    let realize_at = |x: f64| {
        class.realize(&[
            vec![1.0],
            vec![1.0],
            vec![x, 0.5 - x],
            vec![x, 0.5 - x],
            vec![x, 0.5 - x],
            vec![x, 0.5 - x],
        ])
    };
    let boundary_of = |p: &crate::class::Partition, label: u8| {
        p.source_labels()
            .iter()
            .position(|&l| l == label)
            .map(|i| p.parts()[i].boundary_size(BoundaryMode::EffectiveDegree))
    };
    let mut sequence = Vec::new();
    for x in [0.1, 0.05, 0.025] {
        match realize_at(x) {
            Ok(p) => {
                let b = boundary_of(&p, 2);
                rec.check(b == Some(5), || {
                    format!("sliver {x}: middle part boundary {b:?}, expected 5")
                });
                sequence.push(p);
            }
            Err(e) => rec.fail(format!("sliver {x}: realization failed: {e}")),
        }
    }
    match realize_at(0.0) {
        Ok(limit) => {
            let b = boundary_of(&limit, 2);
            rec.check(b == Some(1), || {
                format!("limit: middle part boundary {b:?}, expected 1")
            });
            for p in &sequence {
                for label in [1u8, 2, 3] {
                    let (lb, sb) = (boundary_of(&limit, label), boundary_of(p, label));
                    rec.check(lb <= sb, || {
                        format!("label {label}: limit boundary {lb:?} exceeds sequence {sb:?}")
                    });
                }
            }
        }
        Err(e) => rec.fail(format!("limit realization failed: {e}")),
    }
    rec.finish("lower-semicontinuity", start)
}

/// Runs every suite in a fixed order.
pub fn run_all() -> Vec<SuiteReport> {
    vec![
        alpha_monotonicity(),
        derivative_bound(),
        eigenvalue_bounds(),
        glue_continuity(),
        perimeter_oracle(),
        lower_semicontinuity(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    #[test]
    fn all_suites_pass_within_budget() {
        let start = Instant::now();
        let reports = run_all();
        assert_eq!(reports.len(), 6);
        for r in &reports {
            assert!(r.passed(), "{} failed: {:#?}", r.name, r.failures);
            assert!(r.checks > 0, "{} ran no checks", r.name);
        }
        assert!(
            start.elapsed() < Duration::from_secs(60),
            "suites took {:?}",
            start.elapsed()
        );
    }

    #[test]
    fn sampled_pool_is_deterministic_and_boundary_nonempty() {
        let a = sampled_domains(20);
        let b = sampled_domains(20);
        assert_eq!(a.len(), 20);
        for ((s1, a1), (s2, a2)) in a.iter().zip(&b) {
            assert_eq!(a1, a2);
            assert!(!s1.boundary().is_empty());
            assert_eq!(s1.segments().len(), s2.segments().len());
            assert!((s1.total_length() - s2.total_length()).abs() < 1e-15);
        }
    }
}
