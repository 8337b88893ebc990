//! Built-in example graphs used by the self-check suites, tests and
//! benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::MetricGraph;

/// Single edge of length `l` between two vertices.
pub fn interval(l: f64) -> MetricGraph {
    MetricGraph::new(
        vec!["a".into(), "b".into()],
        vec![("e".into(), 0, 1, l)],
    )
    .unwrap()
}

/// Path of consecutive edges with the given lengths.
pub fn path_graph(lengths: &[f64]) -> MetricGraph {
    assert!(!lengths.is_empty());
    let names = (0..=lengths.len()).map(|i| format!("v{i}")).collect();
    let edges = lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| (format!("e{i}"), i, i + 1, l))
        .collect();
    MetricGraph::new(names, edges).unwrap()
}

/// Cycle on `lengths.len()` vertices.
pub fn cycle_graph(lengths: &[f64]) -> MetricGraph {
    let n = lengths.len();
    assert!(n >= 1);
    let names = (0..n.max(1)).map(|i| format!("v{i}")).collect();
    let edges = lengths
        .iter()
        .enumerate()
        .map(|(i, &l)| (format!("e{i}"), i, (i + 1) % n, l))
        .collect();
    MetricGraph::new(names, edges).unwrap()
}

/// Star with one centre vertex and a pendant edge per entry of `legs`.
pub fn star_graph(legs: &[f64]) -> MetricGraph {
    assert!(!legs.is_empty());
    let mut names = vec!["c".into()];
    names.extend((0..legs.len()).map(|i| format!("t{i}")));
    let edges = legs
        .iter()
        .enumerate()
        .map(|(i, &l)| (format!("e{i}"), 0, i + 1, l))
        .collect();
    MetricGraph::new(names, edges).unwrap()
}

/// Loop of length `loop_len` at a vertex with a pendant edge of length
/// `stem_len` hanging off it.
pub fn lollipop(loop_len: f64, stem_len: f64) -> MetricGraph {
    MetricGraph::new(
        vec!["c".into(), "t".into()],
        vec![
            ("loop".into(), 0, 0, loop_len),
            ("stem".into(), 0, 1, stem_len),
        ],
    )
    .unwrap()
}

/// Two pendant edges of length 1 joined at a common vertex `v` to a
/// 4-pumpkin with edges of length ½ between `v` and `w`.
pub fn pumpkin_with_legs() -> MetricGraph {
    MetricGraph::new(
        vec!["a".into(), "b".into(), "v".into(), "w".into()],
        vec![
            ("e1".into(), 0, 2, 1.0),
            ("e2".into(), 1, 2, 1.0),
            ("p1".into(), 2, 3, 0.5),
            ("p2".into(), 2, 3, 0.5),
            ("p3".into(), 2, 3, 0.5),
            ("p4".into(), 2, 3, 0.5),
        ],
    )
    .unwrap()
}

/// A 5-pumpkin and a 4-pumpkin glued at a middle vertex, all unit edges.
pub fn pumpkin_chain() -> MetricGraph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((format!("a{i}"), 0, 1, 1.0));
    }
    for i in 0..4 {
        edges.push((format!("b{i}"), 1, 2, 1.0));
    }
    MetricGraph::new(vec!["u".into(), "v".into(), "w".into()], edges).unwrap()
}

/// Small random connected multigraph with reproducible layout. Starts
/// from a random spanning tree on `n_vertices` and adds `extra_edges`
/// uniformly random edges (loops and parallels allowed). Lengths are
/// drawn from `[0.5, 2.0)` and rounded to multiples of 1/8 so that
/// equal lengths (and thus parallel bundles) occur with positive
/// probability.
pub fn random_graph(seed: u64, n_vertices: usize, extra_edges: usize) -> MetricGraph {
    assert!(n_vertices >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = |rng: &mut ChaCha8Rng| {
        let raw: f64 = rng.gen_range(0.5..2.0);
        (raw * 8.0).round().max(1.0) / 8.0
    };
    let names = (0..n_vertices).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for v in 1..n_vertices {
        let u = rng.gen_range(0..v);
        let l = len(&mut rng);
        edges.push((format!("e{}", edges.len()), u, v, l));
    }
    let need = if n_vertices == 1 {
        extra_edges.max(1)
    } else {
        extra_edges
    };
    for _ in 0..need {
        let u = rng.gen_range(0..n_vertices);
        let v = rng.gen_range(0..n_vertices);
        let l = len(&mut rng);
        edges.push((format!("e{}", edges.len()), u, v, l));
    }
    MetricGraph::new(names, edges).unwrap()
}
