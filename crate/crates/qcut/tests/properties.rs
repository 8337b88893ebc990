//! Randomized structural properties of the enumeration, LP, and solver
//! layers.

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcut::cheeger::{self, class_optimum};
use qcut::class::{ConfigClass, VertexGluing};
use qcut::corpus;
use qcut::enumerate::{dominant_classes, enumerate_configuration_classes, EnumerationCaps};
use qcut::graph::{End, MetricGraph};
use qcut::par::Exec;
use qcut::robinopt;
use qcut::spectral::{self, Method, RobinProblem};
use qcut::subgraph::{BoundaryMode, Subgraph};

/// Connected induced subgraph grown from a random edge; falls back to a
/// proper segment of one edge when the grown set has empty boundary.
fn random_domain(g: &Arc<MetricGraph>, seed: u64) -> Subgraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = g.n_edges();
    let target = rng.gen_range(1..=m);
    let mut chosen = vec![rng.gen_range(0..m)];
    while chosen.len() < target {
        let mut vset: Vec<usize> = chosen
            .iter()
            .flat_map(|&e| [g.edge(e).lo, g.edge(e).hi])
            .collect();
        vset.sort_unstable();
        vset.dedup();
        let candidates: Vec<usize> = (0..m)
            .filter(|e| {
                !chosen.contains(e)
                    && (vset.binary_search(&g.edge(*e).lo).is_ok()
                        || vset.binary_search(&g.edge(*e).hi).is_ok())
            })
            .collect();
        if candidates.is_empty() {
            break;
        }
        chosen.push(candidates[rng.gen_range(0..candidates.len())]);
    }
    chosen.sort_unstable();
    let sub = Subgraph::induced(Arc::clone(g), &chosen).unwrap();
    if sub.boundary().is_empty() {
        let e = rng.gen_range(0..m);
        let len = g.edge(e).length;
        Subgraph::segment(Arc::clone(g), e, 0.0, 0.5 * len).unwrap()
    } else {
        sub
    }
}

/// Random segment lengths for a class: each edge split by normalized
/// uniform draws, last entry fixed so the row sums exactly.
fn random_lengths(class: &ConfigClass, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = class.parent();
    class
        .labels()
        .iter()
        .enumerate()
        .map(|(e, seq)| {
            let len = g.edge(e).length;
            if seq.len() == 1 {
                return vec![len];
            }
            let draws: Vec<f64> = (0..seq.len()).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = draws.iter().sum();
            let mut row: Vec<f64> = draws.iter().map(|d| d / total * len).collect();
            let head: f64 = row[..row.len() - 1].iter().sum();
            *row.last_mut().unwrap() = len - head;
            row
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn boundary_measures_are_consistent(seed in 0u64..5000, n in 2usize..5, extra in 1usize..4) {
        let g = Arc::new(corpus::random_graph(seed, n, extra));
        let omega = random_domain(&g, seed ^ 0x5eed);
        for d in omega.boundary() {
            let eff = omega.eff_deg(d);
            prop_assert!(eff >= 1);
            prop_assert!(eff <= omega.deg_gamma(d) / 2);
        }
        prop_assert!(
            omega.boundary_size(BoundaryMode::Count)
                <= omega.boundary_size(BoundaryMode::EffectiveDegree)
        );
        let p = omega.perimeter().unwrap();
        let o = omega.perimeter_oracle().unwrap();
        prop_assert!((o - p as f64).abs() <= 1e-9, "perimeter {p} vs oracle {o}");
    }

    #[test]
    fn no_realization_beats_the_reported_constant(seed in 0u64..5000, extra in 1usize..3) {
        let g = Arc::new(corpus::random_graph(seed, 3, extra));
        let caps = EnumerationCaps::default();
        let res = cheeger::cheeger_constant(
            &g, 2, BoundaryMode::EffectiveDegree, &caps, false, Exec::Seq,
        ).unwrap();
        let (classes, _) = dominant_classes(&g, 2, caps.max_cuts_per_edge, false, Exec::Seq).unwrap();
        let class = &classes[(seed as usize) % classes.len()];
        if let Ok(p) = class.realize(&random_lengths(class, seed ^ 0xbeef)) {
            if p.k() == 2 {
                let energy = cheeger::cheeger_energy(&p, BoundaryMode::EffectiveDegree);
                prop_assert!(
                    energy >= res.value - 1e-9,
                    "realized energy {energy} beats the constant {}",
                    res.value
                );
            }
        }
    }

    #[test]
    fn cheeger_data_is_scaling_covariant(seed in 0u64..5000, c in prop::sample::select(vec![0.5f64, 2.0, 3.25])) {
        let g = Arc::new(corpus::random_graph(seed, 3, 2));
        let scaled = Arc::new(g.scaled(c).unwrap());
        let caps = EnumerationCaps::default();
        let a = cheeger::cheeger_constant(&g, 2, BoundaryMode::EffectiveDegree, &caps, false, Exec::Seq).unwrap();
        let b = cheeger::cheeger_constant(&scaled, 2, BoundaryMode::EffectiveDegree, &caps, false, Exec::Seq).unwrap();
        prop_assert!(
            (b.value - a.value / c).abs() <= 1e-9 * (1.0 + a.value),
            "h(cΓ) = {} but h(Γ)/c = {}", b.value, a.value / c
        );
        prop_assert_eq!(a.argmin.class().id().to_hex(), b.argmin.class().id().to_hex());
    }

    #[test]
    fn count_mode_never_exceeds_effective_degree_mode(seed in 0u64..5000) {
        let g = Arc::new(corpus::random_graph(seed, 3, 2));
        let caps = EnumerationCaps::default();
        let eff = cheeger::cheeger_constant(&g, 2, BoundaryMode::EffectiveDegree, &caps, false, Exec::Seq).unwrap();
        let cnt = cheeger::cheeger_constant(&g, 2, BoundaryMode::Count, &caps, false, Exec::Seq).unwrap();
        prop_assert!(cnt.value <= eff.value + 1e-9);
    }

    #[test]
    fn solvers_cross_validate(seed in 0u64..5000, alpha in 0.25f64..4.0) {
        let g = Arc::new(corpus::random_graph(seed, 3, 2));
        let omega = random_domain(&g, seed ^ 0xcafe);
        let problem = RobinProblem::from_alpha(omega, alpha).unwrap();
        let sec = spectral::robin_lambda1(&problem, Method::Secular, 1e-10).unwrap();
        let mesh = spectral::robin_lambda1(&problem, Method::Mesh, 1e-10).unwrap();
        let budget = 10.0 * (sec.error_estimate + mesh.error_estimate) + 1e-8 * (1.0 + sec.lambda1);
        prop_assert!(
            (sec.lambda1 - mesh.lambda1).abs() <= budget,
            "secular {} vs mesh {} budget {budget}", sec.lambda1, mesh.lambda1
        );
        for &(_, _, v) in &sec.eigenfunction {
            prop_assert!(v > 0.0, "ground state sample {v} not positive");
        }
    }

    #[test]
    fn dominant_scan_matches_full_enumeration(seed in 0u64..5000) {
        let g = Arc::new(corpus::random_graph(seed, 3, 1));
        let caps = EnumerationCaps::default();
        let all = enumerate_configuration_classes(&g, 2, &caps, false).unwrap();
        prop_assert!(!all.truncated);
        let full_min = all
            .classes
            .iter()
            .map(|c| class_optimum(c, BoundaryMode::EffectiveDegree).unwrap().value)
            .fold(f64::INFINITY, f64::min);
        let (dom, _) = dominant_classes(&g, 2, caps.max_cuts_per_edge, false, Exec::Seq).unwrap();
        let dom_min = dom
            .iter()
            .map(|c| class_optimum(c, BoundaryMode::EffectiveDegree).unwrap().value)
            .fold(f64::INFINITY, f64::min);
        prop_assert!(
            (full_min - dom_min).abs() <= 1e-12 * (1.0 + full_min.abs()),
            "full enumeration {full_min} vs dominant scan {dom_min}"
        );
        let via_driver = cheeger::cheeger_constant(
            &g, 2, BoundaryMode::EffectiveDegree, &caps, false, Exec::Seq,
        ).unwrap();
        prop_assert!(via_driver.warnings.iter().all(|w| w.contains("cut cap"))
            || (via_driver.value - dom_min).abs() <= 1e-9);
    }

    #[test]
    fn results_are_identical_across_execution_modes(seed in 0u64..5000) {
        let g = Arc::new(corpus::random_graph(seed, 4, 2));
        let caps = EnumerationCaps::default();
        let s = cheeger::cheeger_constant(&g, 3, BoundaryMode::EffectiveDegree, &caps, false, Exec::Seq).unwrap();
        let p = cheeger::cheeger_constant(&g, 3, BoundaryMode::EffectiveDegree, &caps, false, Exec::Par).unwrap();
        prop_assert_eq!(s.value.to_bits(), p.value.to_bits());
        prop_assert_eq!(s.argmin.class().id().to_hex(), p.argmin.class().id().to_hex());
        prop_assert_eq!(s.per_class.len(), p.per_class.len());
        for (x, y) in s.per_class.iter().zip(&p.per_class) {
            prop_assert_eq!(&x.0, &y.0);
            prop_assert_eq!(x.1.to_bits(), y.1.to_bits());
        }
    }

    #[test]
    fn degenerating_slivers_only_lower_boundary_sizes(t in 1e-4f64..0.4) {
        let g = Arc::new(corpus::pumpkin_with_legs());
        let class = sliver_class(&g);
        let at = |x: f64| {
            class.realize(&[
                vec![1.0],
                vec![1.0],
                vec![x, 0.5 - x],
                vec![x, 0.5 - x],
                vec![x, 0.5 - x],
                vec![x, 0.5 - x],
            ]).unwrap()
        };
        let seq = at(0.5 * t);
        let limit = at(0.0);
        for label in [1u8, 2, 3] {
            let b = |p: &qcut::class::Partition| {
                p.source_labels()
                    .iter()
                    .position(|&l| l == label)
                    .map(|i| p.parts()[i].boundary_size(BoundaryMode::EffectiveDegree))
            };
            prop_assert!(b(&limit) <= b(&seq), "label {label}: {:?} > {:?}", b(&limit), b(&seq));
        }
    }

    #[test]
    fn energy_grids_stay_monotone_and_lipschitz(seed in 0u64..1000) {
        let g = Arc::new(corpus::random_graph(seed, 3, 1));
        let caps = EnumerationCaps::default();
        let opts = robinopt::OptimizerOptions {
            restarts: 1,
            ..robinopt::OptimizerOptions::default()
        };
        let grid = [0.5, 1.0, 2.0];
        let rep = robinopt::alpha_monotonicity_check(&g, 2, &grid, &caps, &opts, Exec::Seq).unwrap();
        prop_assert!(rep.strictly_increasing, "violations: {:?}", rep.violations);
        prop_assert!(rep.lipschitz_ok, "ratio {} exceeds {}", rep.max_ratio, rep.lipschitz_bound);
    }
}

/// Three-part class on the pendant-pumpkin graph whose middle part keeps
/// a sliver of every pumpkin strand.
fn sliver_class(g: &Arc<MetricGraph>) -> ConfigClass {
    ConfigClass::new(
        Arc::clone(g),
        3,
        vec![
            vec![1],
            vec![2],
            vec![2, 3],
            vec![2, 3],
            vec![2, 3],
            vec![2, 3],
        ],
        vec![
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
        ],
    )
    .unwrap()
}
