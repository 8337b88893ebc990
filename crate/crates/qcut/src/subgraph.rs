//! Closed connected subgraphs of a metric graph, with explicit gluing
//! topology at cut vertices.
//!
//! A subgraph is a union of closed segments of parent edges together with
//! a list of *descendants*: groups of segment ends glued together at a
//! parent site. Two subgraphs occupying the same subset of the parent can
//! differ as metric spaces when a vertex is cut through, which is why the
//! gluing is explicit rather than inherited from the parent. A descendant
//! whose ends exhaust all parent directions at its site is interior;
//! every other descendant is a boundary point.

use std::collections::HashMap;
use std::sync::Arc;

use crate::graph::{EdgeIx, End, MetricGraph, UnionFind, VertexIx};
use crate::lp;
use crate::{Error, Result};

/// Closed sub-interval `[lo, hi]` of a parent edge, `0 ≤ lo < hi ≤ ℓ_e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub edge: EdgeIx,
    pub lo: f64,
    pub hi: f64,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Offset of the given end within the parent edge.
    pub fn position(&self, end: End) -> f64 {
        match end {
            End::Lo => self.lo,
            End::Hi => self.hi,
        }
    }
}

pub type SegIx = usize;
pub type DescIx = usize;

/// Location of a descendant in the parent graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Site {
    Vertex(VertexIx),
    /// Interior point of an edge at the given offset.
    EdgePoint(EdgeIx, f64),
}

impl Site {
    /// Hashable identity; interior offsets compare bitwise.
    pub(crate) fn key(&self) -> (u8, usize, u64) {
        match *self {
            Site::Vertex(v) => (0, v, 0),
            Site::EdgePoint(e, x) => (1, e, x.to_bits()),
        }
    }
}

/// A group of segment ends glued together at one site.
#[derive(Clone, Debug)]
pub struct Descendant {
    pub site: Site,
    pub ends: Vec<(SegIx, End)>,
}

/// How the size of a subgraph boundary is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Sum over boundary descendants of `min(deg_Ω, deg_Γ − deg_Ω)`.
    EffectiveDegree,
    /// Number of distinct parent boundary points.
    Count,
}

#[derive(Clone, Debug)]
pub struct Subgraph {
    parent: Arc<MetricGraph>,
    segments: Vec<Segment>,
    descendants: Vec<Descendant>,
    /// Index: descendant owning each (segment, end).
    end_owner: Vec<[DescIx; 2]>,
}

impl Subgraph {
    pub fn new(
        parent: Arc<MetricGraph>,
        segments: Vec<Segment>,
        descendants: Vec<Descendant>,
    ) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidSubgraph("no segments".into()));
        }
        for s in &segments {
            if s.edge >= parent.n_edges() {
                return Err(Error::InvalidSubgraph(format!("no edge {}", s.edge)));
            }
            let len = parent.edge(s.edge).length;
            if !(s.lo >= 0.0 && s.lo < s.hi && s.hi <= len) {
                return Err(Error::InvalidSubgraph(format!(
                    "segment [{}, {}] invalid on edge of length {len}",
                    s.lo, s.hi
                )));
            }
        }
        // Disjoint interiors per edge.
        {
            let mut by_edge: HashMap<EdgeIx, Vec<(f64, f64)>> = HashMap::new();
            for s in &segments {
                by_edge.entry(s.edge).or_default().push((s.lo, s.hi));
            }
            for ivs in by_edge.values_mut() {
                ivs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for w in ivs.windows(2) {
                    if w[0].1 > w[1].0 {
                        return Err(Error::InvalidSubgraph(format!(
                            "segments [{}, {}] and [{}, {}] overlap",
                            w[0].0, w[0].1, w[1].0, w[1].1
                        )));
                    }
                }
            }
        }
        // Every end in exactly one descendant, at a consistent site.
        let mut end_owner = vec![[usize::MAX; 2]; segments.len()];
        for (d, desc) in descendants.iter().enumerate() {
            if desc.ends.is_empty() {
                return Err(Error::InvalidSubgraph(format!("descendant {d} has no ends")));
            }
            for &(s, end) in &desc.ends {
                if s >= segments.len() {
                    return Err(Error::InvalidSubgraph(format!("no segment {s}")));
                }
                let slot = &mut end_owner[s][end.bit() as usize];
                if *slot != usize::MAX {
                    return Err(Error::InvalidSubgraph(format!(
                        "segment {s} end assigned to two descendants"
                    )));
                }
                *slot = d;
                let seg = &segments[s];
                let pos = seg.position(end);
                let edge = parent.edge(seg.edge);
                match desc.site {
                    Site::Vertex(v) => {
                        let at_lo = pos == 0.0 && edge.lo == v;
                        let at_hi = pos == edge.length && edge.hi == v;
                        if !(at_lo || at_hi) {
                            return Err(Error::InvalidSubgraph(format!(
                                "segment {s} end is not at vertex {v}"
                            )));
                        }
                    }
                    Site::EdgePoint(e, x) => {
                        if seg.edge != e || pos != x || x <= 0.0 || x >= edge.length {
                            return Err(Error::InvalidSubgraph(format!(
                                "segment {s} end is not at interior point {x} of edge {e}"
                            )));
                        }
                    }
                }
            }
        }
        if end_owner.iter().flatten().any(|&d| d == usize::MAX) {
            return Err(Error::InvalidSubgraph(
                "some segment end belongs to no descendant".into(),
            ));
        }
        // Connectivity through the declared gluing.
        let mut uf = UnionFind::new(descendants.len());
        for owners in &end_owner {
            uf.union(owners[0], owners[1]);
        }
        if !uf.all_connected(0..descendants.len()) {
            return Err(Error::InvalidSubgraph("subgraph is not connected".into()));
        }
        Ok(Subgraph {
            parent,
            segments,
            descendants,
            end_owner,
        })
    }

    /// The whole graph as a subgraph of itself.
    pub fn whole(parent: Arc<MetricGraph>) -> Subgraph {
        let edges: Vec<EdgeIx> = (0..parent.n_edges()).collect();
        Subgraph::induced(parent, &edges).expect("whole graph is a valid subgraph")
    }

    /// The union of whole parent edges, glued maximally: one descendant
    /// per touched vertex containing all covered ends there.
    pub fn induced(parent: Arc<MetricGraph>, edges: &[EdgeIx]) -> Result<Subgraph> {
        let mut seen = vec![false; parent.n_edges()];
        let mut segments = Vec::new();
        let mut seg_of_edge = vec![usize::MAX; parent.n_edges()];
        for &e in edges {
            if e >= parent.n_edges() {
                return Err(Error::InvalidSubgraph(format!("no edge {e}")));
            }
            if seen[e] {
                continue;
            }
            seen[e] = true;
            seg_of_edge[e] = segments.len();
            segments.push(Segment {
                edge: e,
                lo: 0.0,
                hi: parent.edge(e).length,
            });
        }
        let mut descendants = Vec::new();
        for v in 0..parent.n_vertices() {
            let ends: Vec<(SegIx, End)> = parent
                .incidence(v)
                .iter()
                .filter(|(e, _)| seen[*e])
                .map(|&(e, end)| (seg_of_edge[e], end))
                .collect();
            if !ends.is_empty() {
                descendants.push(Descendant {
                    site: Site::Vertex(v),
                    ends,
                });
            }
        }
        Subgraph::new(parent, segments, descendants)
    }

    /// A single segment `[a, b]` of one edge, with singleton descendants
    /// at both ends.
    pub fn segment(parent: Arc<MetricGraph>, edge: EdgeIx, a: f64, b: f64) -> Result<Subgraph> {
        if edge >= parent.n_edges() {
            return Err(Error::InvalidSubgraph(format!("no edge {edge}")));
        }
        let len = parent.edge(edge).length;
        let site_at = |pos: f64, end_vertex: VertexIx| -> Site {
            if pos == 0.0 || pos == len {
                Site::Vertex(end_vertex)
            } else {
                Site::EdgePoint(edge, pos)
            }
        };
        let e = parent.edge(edge);
        let descendants = vec![
            Descendant {
                site: site_at(a, e.lo),
                ends: vec![(0, End::Lo)],
            },
            Descendant {
                site: site_at(b, e.hi),
                ends: vec![(0, End::Hi)],
            },
        ];
        Subgraph::new(parent, vec![Segment { edge, lo: a, hi: b }], descendants)
    }

    pub fn parent(&self) -> &Arc<MetricGraph> {
        &self.parent
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn descendants(&self) -> &[Descendant] {
        &self.descendants
    }

    /// The descendant owning the given segment end.
    pub fn owner(&self, s: SegIx, end: End) -> DescIx {
        self.end_owner[s][end.bit() as usize]
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn deg_omega(&self, d: DescIx) -> usize {
        self.descendants[d].ends.len()
    }

    /// Parent degree at the descendant's site (2 for interior edge
    /// points; ambient extra directions included at vertices).
    pub fn deg_gamma(&self, d: DescIx) -> usize {
        match self.descendants[d].site {
            Site::Vertex(v) => self.parent.deg(v),
            Site::EdgePoint(..) => 2,
        }
    }

    pub fn is_boundary(&self, d: DescIx) -> bool {
        self.deg_omega(d) < self.deg_gamma(d)
    }

    /// `min(deg_Ω, deg_Γ − deg_Ω)`; zero exactly for interior descendants.
    pub fn eff_deg(&self, d: DescIx) -> usize {
        self.deg_omega(d).min(self.deg_gamma(d) - self.deg_omega(d))
    }

    pub fn boundary(&self) -> Vec<DescIx> {
        (0..self.descendants.len())
            .filter(|&d| self.is_boundary(d))
            .collect()
    }

    pub fn boundary_size(&self, mode: BoundaryMode) -> usize {
        match mode {
            BoundaryMode::EffectiveDegree => {
                self.boundary().into_iter().map(|d| self.eff_deg(d)).sum()
            }
            BoundaryMode::Count => {
                let mut sites: Vec<_> = self
                    .boundary()
                    .into_iter()
                    .map(|d| self.descendants[d].site.key())
                    .collect();
                sites.sort();
                sites.dedup();
                sites.len()
            }
        }
    }

    fn require_unique_boundary_descendants(&self) -> Result<()> {
        let mut per_site: HashMap<(u8, usize, u64), usize> = HashMap::new();
        for desc in &self.descendants {
            *per_site.entry(desc.site.key()).or_insert(0) += 1;
        }
        for d in self.boundary() {
            if per_site[&self.descendants[d].site.key()] > 1 {
                return Err(Error::InvalidSubgraph(
                    "boundary site with more than one descendant".into(),
                ));
            }
        }
        Ok(())
    }

    /// Boundary size by effective degrees, for subgraphs with maximal
    /// connectivity (at most one descendant per boundary site).
    pub fn perimeter(&self) -> Result<usize> {
        self.require_unique_boundary_descendants()?;
        Ok(self.boundary_size(BoundaryMode::EffectiveDegree))
    }

    /// Evaluates the perimeter through its variational characterisation:
    /// at each boundary point, maximize the sum of a test function over
    /// the covered directions subject to a zero total sum over all parent
    /// directions and `|f| ≤ 1`; solved as an LP per boundary point.
    pub fn perimeter_oracle(&self) -> Result<f64> {
        self.require_unique_boundary_descendants()?;
        let mut total = 0.0;
        for d in self.boundary() {
            let d_omega = self.deg_omega(d);
            let d_gamma = self.deg_gamma(d);
            // Shift f = g - 1 so the box [-1,1] becomes [0,2]: maximize
            // sum of g over covered directions minus deg_Ω, subject to
            // sum of g over all directions = deg_Γ.
            let n = d_gamma;
            let a = vec![vec![1.0; n]];
            let b = vec![d_gamma as f64];
            let mut c = vec![0.0; n];
            for cj in c.iter_mut().take(d_omega) {
                *cj = 1.0;
            }
            let upper = vec![2.0; n];
            match lp::solve_bounded(&a, &b, &c, &upper)? {
                lp::LpOutcome::Optimal { value, .. } => {
                    total += value - d_omega as f64;
                }
                other => {
                    return Err(Error::Lp(format!(
                        "perimeter subproblem not solvable: {other:?}"
                    )))
                }
            }
        }
        Ok(total)
    }

    /// Re-roots the subgraph as a standalone metric graph: one vertex per
    /// descendant, one edge per segment, with the uncovered parent
    /// directions recorded as ambient extra degrees.
    pub fn to_projection(&self) -> Projection {
        let names = (0..self.descendants.len())
            .map(|d| format!("d{d}"))
            .collect();
        let edges = self
            .segments
            .iter()
            .enumerate()
            .map(|(s, seg)| {
                (
                    format!("s{s}"),
                    self.owner(s, End::Lo),
                    self.owner(s, End::Hi),
                    seg.length(),
                )
            })
            .collect();
        let extra: Vec<usize> = (0..self.descendants.len())
            .map(|d| self.deg_gamma(d) - self.deg_omega(d))
            .collect();
        let graph = MetricGraph::new(names, edges)
            .and_then(|g| g.with_ambient_extra(extra))
            .expect("valid subgraph projects to a valid graph");
        Projection {
            source: self.clone(),
            graph: Arc::new(graph),
        }
    }
}

/// A subgraph re-rooted as a graph in its own right, with enough data to
/// map subgraphs of the projection back into the original parent.
#[derive(Clone, Debug)]
pub struct Projection {
    source: Subgraph,
    graph: Arc<MetricGraph>,
}

impl Projection {
    pub fn graph(&self) -> &Arc<MetricGraph> {
        &self.graph
    }

    /// Maps a subgraph of the projection back to a subgraph of the
    /// original parent graph.
    pub fn lift(&self, e: &Subgraph) -> Result<Subgraph> {
        let src = &self.source;
        let mut segments = Vec::with_capacity(e.segments().len());
        for seg in e.segments() {
            let base = src.segments[seg.edge];
            let blen = base.length();
            // Anchor endpoint offsets exactly at the base segment ends.
            let lo = if seg.lo == 0.0 { base.lo } else { base.lo + seg.lo };
            let hi = if seg.hi == blen { base.hi } else { base.lo + seg.hi };
            segments.push(Segment {
                edge: base.edge,
                lo,
                hi,
            });
        }
        let site_back = |site: Site, seg_hint: (SegIx, End)| -> Site {
            match site {
                Site::Vertex(d) => src.descendants[d].site,
                Site::EdgePoint(j, x) => {
                    let base = src.segments[j];
                    let pos = base.lo + x;
                    let _ = seg_hint;
                    Site::EdgePoint(base.edge, pos)
                }
            }
        };
        let descendants = e
            .descendants()
            .iter()
            .map(|desc| Descendant {
                site: site_back(desc.site, desc.ends[0]),
                ends: desc.ends.clone(),
            })
            .collect();
        Subgraph::new(src.parent.clone(), segments, descendants)
    }
}
