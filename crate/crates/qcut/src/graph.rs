//! Compact metric graphs: finite connected multigraphs with edge lengths.
//!
//! Loops and parallel edges are allowed. Each edge is identified with the
//! interval `[0, length]`; the `0` end ([`End::Lo`]) is attached to the
//! edge's first endpoint and the `length` end ([`End::Hi`]) to its second.
//! A loop attaches both ends to the same vertex, and contributes `2` to the
//! degree of that vertex.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type VertexIx = usize;
pub type EdgeIx = usize;

/// One of the two ends of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum End {
    /// The end at offset `0`.
    Lo,
    /// The end at offset `length`.
    Hi,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::Lo => End::Hi,
            End::Hi => End::Lo,
        }
    }

    /// Byte used in canonical encodings: `Lo = 0`, `Hi = 1`.
    pub fn bit(self) -> u8 {
        match self {
            End::Lo => 0,
            End::Hi => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub name: String,
    pub lo: VertexIx,
    pub hi: VertexIx,
    pub length: f64,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.lo == self.hi
    }

    pub fn vertex_at(&self, end: End) -> VertexIx {
        match end {
            End::Lo => self.lo,
            End::Hi => self.hi,
        }
    }
}

/// A compact, connected metric graph.
#[derive(Clone, Debug)]
pub struct MetricGraph {
    vertex_names: Vec<String>,
    edges: Vec<Edge>,
    /// Extra incident directions per vertex that exist in some ambient
    /// graph but are not materialised here. They count towards vertex
    /// degrees (and therefore towards boundary sizes of subgraphs) but
    /// carry no length. Zero for ordinary graphs; used when a subgraph is
    /// re-rooted as a graph in its own right while remembering how it sat
    /// inside its parent.
    ambient_extra: Vec<usize>,
    /// Per vertex, the incident edge ends (loops appear twice).
    incidence: Vec<Vec<(EdgeIx, End)>>,
}

impl MetricGraph {
    /// Builds and validates a metric graph.
    ///
    /// Requirements: at least one edge, all lengths strictly positive and
    /// finite, endpoint indices in range, and the graph connected.
    pub fn new(
        vertex_names: Vec<String>,
        edges: Vec<(String, VertexIx, VertexIx, f64)>,
    ) -> Result<Self> {
        let n = vertex_names.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        {
            let mut names = vertex_names.clone();
            names.sort();
            names.dedup();
            if names.len() != n {
                return Err(Error::InvalidGraph("duplicate vertex names".into()));
            }
        }
        if edges.is_empty() {
            return Err(Error::InvalidGraph("no edges".into()));
        }
        {
            let mut names: Vec<&str> = edges.iter().map(|(s, ..)| s.as_str()).collect();
            names.sort();
            names.dedup();
            if names.len() != edges.len() {
                return Err(Error::InvalidGraph("duplicate edge names".into()));
            }
        }
        let mut built = Vec::with_capacity(edges.len());
        for (name, u, v, len) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {name:?} references vertex {} but there are only {n} vertices",
                    u.max(v)
                )));
            }
            if !(len.is_finite() && len > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge {name:?} has non-positive or non-finite length {len}"
                )));
            }
            built.push(Edge {
                name,
                lo: u,
                hi: v,
                length: len,
            });
        }
        let mut incidence = vec![Vec::new(); n];
        for (e, edge) in built.iter().enumerate() {
            incidence[edge.lo].push((e, End::Lo));
            incidence[edge.hi].push((e, End::Hi));
        }
        let mut uf = UnionFind::new(n);
        for edge in &built {
            uf.union(edge.lo, edge.hi);
        }
        let root = uf.find(0);
        if (0..n).any(|v| uf.find(v) != root) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(MetricGraph {
            vertex_names,
            edges: built,
            ambient_extra: vec![0; n],
            incidence,
        })
    }

    /// Declares extra ambient directions at each vertex (see
    /// [`MetricGraph::ambient_extra`]).
    pub fn with_ambient_extra(mut self, extra: Vec<usize>) -> Result<Self> {
        if extra.len() != self.n_vertices() {
            return Err(Error::InvalidGraph(
                "ambient degree list length mismatch".into(),
            ));
        }
        self.ambient_extra = extra;
        Ok(self)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertex_names.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeIx) -> &Edge {
        &self.edges[e]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_name(&self, v: VertexIx) -> &str {
        &self.vertex_names[v]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    /// Edge ends incident to `v`; a loop at `v` contributes both its ends.
    pub fn incidence(&self, v: VertexIx) -> &[(EdgeIx, End)] {
        &self.incidence[v]
    }

    /// Degree of `v` in this graph, including ambient extra directions.
    pub fn deg(&self, v: VertexIx) -> usize {
        self.incidence[v].len() + self.ambient_extra[v]
    }

    /// Number of materialised edge ends at `v` (ambient extras excluded).
    pub fn local_deg(&self, v: VertexIx) -> usize {
        self.incidence[v].len()
    }

    pub fn ambient_extra(&self, v: VertexIx) -> usize {
        self.ambient_extra[v]
    }

    pub fn has_ambient_extra(&self) -> bool {
        self.ambient_extra.iter().any(|&x| x > 0)
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn end_vertex(&self, e: EdgeIx, end: End) -> VertexIx {
        self.edges[e].vertex_at(end)
    }

    /// Groups edges into interchangeability bundles: maximal sets of edges
    /// sharing both endpoints and the exact same length (loops bundle with
    /// loops at the same vertex). Singleton bundles are included. Bundles
    /// and their members are sorted by edge index.
    pub fn bundles(&self) -> Vec<Vec<EdgeIx>> {
        // Grouping is by ordered endpoints: swapping two parallel edges
        // is a symmetry only when their orientations agree, since labels
        // are read from the `lo` side.
        let mut keyed: Vec<((usize, usize, u64), EdgeIx)> = self
            .edges
            .iter()
            .enumerate()
            .map(|(e, edge)| ((edge.lo, edge.hi, edge.length.to_bits()), e))
            .collect();
        keyed.sort();
        let mut out: Vec<Vec<EdgeIx>> = Vec::new();
        let mut last_key = None;
        for (key, e) in keyed {
            if last_key == Some(key) {
                out.last_mut().unwrap().push(e);
            } else {
                out.push(vec![e]);
                last_key = Some(key);
            }
        }
        for b in &mut out {
            b.sort();
        }
        out.sort();
        out
    }

    /// Contracts edge `e` to a point, merging its endpoints. Returns the
    /// contracted graph together with the vertex relabelling and the edge
    /// relabelling (`None` for the contracted edge itself). Contracting a
    /// loop simply deletes it. Fails if `e` is the only edge.
    pub fn contract_edge(&self, e: EdgeIx) -> Result<(MetricGraph, Vec<VertexIx>, Vec<Option<EdgeIx>>)> {
        if e >= self.n_edges() {
            return Err(Error::InvalidGraph(format!("no edge {e}")));
        }
        if self.n_edges() == 1 {
            return Err(Error::InvalidGraph(
                "cannot contract the only edge of a graph".into(),
            ));
        }
        let dead = &self.edges[e];
        let (keep, drop_v) = if dead.is_loop() {
            (dead.lo, usize::MAX)
        } else {
            (dead.lo.min(dead.hi), dead.lo.max(dead.hi))
        };
        let mut vmap = Vec::with_capacity(self.n_vertices());
        let mut names = Vec::new();
        for v in 0..self.n_vertices() {
            if v == drop_v {
                vmap.push(usize::MAX); // fixed up below
                continue;
            }
            vmap.push(names.len());
            if v == keep && drop_v != usize::MAX {
                names.push(format!(
                    "{}+{}",
                    self.vertex_names[dead.lo], self.vertex_names[dead.hi]
                ));
            } else {
                names.push(self.vertex_names[v].clone());
            }
        }
        if drop_v != usize::MAX {
            vmap[drop_v] = vmap[keep];
        }
        let mut emap = vec![None; self.n_edges()];
        let mut edges = Vec::new();
        for (i, edge) in self.edges.iter().enumerate() {
            if i == e {
                continue;
            }
            emap[i] = Some(edges.len());
            edges.push((
                edge.name.clone(),
                vmap[edge.lo],
                vmap[edge.hi],
                edge.length,
            ));
        }
        let graph = MetricGraph::new(names, edges)?;
        Ok((graph, vmap, emap))
    }

    /// Returns a copy with edge `e` set to length `len`, everything else
    /// unchanged (ambient extras included).
    pub fn with_edge_length(&self, e: EdgeIx, len: f64) -> Result<MetricGraph> {
        if e >= self.n_edges() {
            return Err(Error::InvalidGraph(format!("no edge {e}")));
        }
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, ed)| {
                let l = if i == e { len } else { ed.length };
                (ed.name.clone(), ed.lo, ed.hi, l)
            })
            .collect();
        MetricGraph::new(self.vertex_names.clone(), edges)
            .and_then(|g| g.with_ambient_extra(self.ambient_extra.clone()))
    }

    /// Returns a copy with every edge length multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<MetricGraph> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor {c}")));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| (e.name.clone(), e.lo, e.hi, e.length * c))
            .collect();
        let g = MetricGraph::new(self.vertex_names.clone(), edges)?;
        g.with_ambient_extra(self.ambient_extra.clone())
    }
}

/// Plain union-find over `0..n`, used for the various connectivity checks.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    /// Returns every element to its own singleton set.
    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    /// True if all of `items` share one root (vacuously true when empty).
    pub fn all_connected<I: IntoIterator<Item = usize>>(&mut self, items: I) -> bool {
        let mut root = None;
        for x in items {
            let r = self.find(x);
            match root {
                None => root = Some(r),
                Some(r0) if r0 != r => return false,
                _ => {}
            }
        }
        true
    }
}
