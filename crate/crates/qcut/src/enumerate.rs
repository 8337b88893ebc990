//! Enumeration of configuration classes.
//!
//! Two generators share the sequence machinery:
//!
//! * [`enumerate_configuration_classes`] is the reference enumerator. It
//!   emits every class up to canonical identity: all per-edge label
//!   sequences within the cut cap (gaps allowed unless exhaustive,
//!   adjacent same-part segments form explicit self-cuts) and all vertex
//!   gluing choices, i.e. every set partition of each part's edge ends
//!   at each vertex. Intended for small graphs and cross-checks.
//!
//! * [`scan_dominant`] streams the reduced family the optimizers search:
//!   edges are whole gaps or fully tiled, adjacent segments belong to
//!   different parts, and every vertex gluing is maximal (one block).
//!   For the objectives in this crate the optimum over all classes is
//!   attained on this family; the cross-check tests compare against the
//!   reference enumerator on small graphs.
//!
//! Both quotient generation by permutations of interchangeable parallel
//! edges (label choices on a bundle are produced as multisets), matching
//! the canonical identity. Enumeration order is deterministic; the scan
//! may fan out over worker threads with an ordered merge.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::class::{canonical_id_coarse, ClassId, ConfigClass, VertexGluing, GAP};
use crate::graph::{EdgeIx, End, MetricGraph, UnionFind, VertexIx};
use crate::par::{self, Exec};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct EnumerationCaps {
    /// Maximum number of cuts on any single edge.
    pub max_cuts_per_edge: usize,
    /// Hard ceiling on the number of classes the reference enumerator
    /// materializes; exceeding it truncates with a warning.
    pub max_classes: Option<usize>,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        EnumerationCaps {
            max_cuts_per_edge: 2,
            max_classes: None,
        }
    }
}

#[derive(Debug)]
pub struct Enumeration {
    /// Classes in canonical-identity order, duplicate-free.
    pub classes: Vec<ConfigClass>,
    pub warnings: Vec<String>,
    pub truncated: bool,
}

/// Aggregate statistics of a dominant scan.
#[derive(Clone, Copy, Debug, Default)]
pub struct ScanStats {
    /// Label assignments visited (before validity filtering).
    pub total_leaves: u64,
    /// Valid configurations passed to the visitor.
    pub valid_leaves: u64,
    /// Some valid configuration uses the full cut cap on some edge, so
    /// raising the cap could enlarge the search space.
    pub cap_saturated: bool,
}

impl ScanStats {
    fn absorb(&mut self, other: &ScanStats) {
        self.total_leaves += other.total_leaves;
        self.valid_leaves += other.valid_leaves;
        self.cap_saturated |= other.cap_saturated;
    }
}

/// All label sequences for one edge in the reference enumeration:
/// length ≤ cap + 1 over parts and gaps, no two adjacent gaps.
fn full_sequences(k: usize, cap: usize, exhaustive: bool) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur: Vec<u8> = Vec::new();
    fn go(k: u8, max_len: usize, exhaustive: bool, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max_len {
            return;
        }
        let lo = if exhaustive || cur.last() == Some(&GAP) {
            1
        } else {
            0
        };
        for l in lo..=k {
            cur.push(l);
            go(k, max_len, exhaustive, cur, out);
            cur.pop();
        }
    }
    go(
        k as u8,
        cap + 1,
        exhaustive,
        &mut cur,
        &mut out,
    );
    out.sort_by(|a, b| (a.len(), &a[..]).cmp(&(b.len(), &b[..])));
    out
}

/// Label sequences for one edge in the dominant family: a whole-edge gap
/// (non-exhaustive only) or a tiling by parts with distinct neighbours.
fn dominant_sequences(k: usize, cap: usize, exhaustive: bool) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if !exhaustive {
        out.push(vec![GAP]);
    }
    let mut cur: Vec<u8> = Vec::new();
    fn go(k: u8, max_len: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        if cur.len() == max_len {
            return;
        }
        for l in 1..=k {
            if cur.last() == Some(&l) {
                continue;
            }
            cur.push(l);
            go(k, max_len, cur, out);
            cur.pop();
        }
    }
    go(k as u8, cap + 1, &mut cur, &mut out);
    out.sort_by(|a, b| (a.len(), &a[..]).cmp(&(b.len(), &b[..])));
    out
}

/// For each edge: the previous member of its parallel bundle, if any.
/// Generation keeps choice indices non-decreasing along each bundle.
fn bundle_predecessors(graph: &MetricGraph) -> Vec<Option<EdgeIx>> {
    let mut prev = vec![None; graph.n_edges()];
    for bundle in graph.bundles() {
        for w in bundle.windows(2) {
            prev[w[1]] = Some(w[0]);
        }
    }
    prev
}

/// Maximal (single-block) vertex gluing derived from labels.
pub fn coarse_gluings(graph: &MetricGraph, labels: &[&[u8]]) -> Vec<VertexGluing> {
    let mut map: BTreeMap<(VertexIx, u8), Vec<(EdgeIx, End)>> = BTreeMap::new();
    for v in 0..graph.n_vertices() {
        for &(e, end) in graph.incidence(v) {
            let seq = labels[e];
            let l = match end {
                End::Lo => seq[0],
                End::Hi => *seq.last().unwrap(),
            };
            if l != GAP {
                map.entry((v, l)).or_default().push((e, end));
            }
        }
    }
    map.into_iter()
        .map(|((vertex, part), mut slots)| {
            slots.sort();
            VertexGluing {
                vertex,
                part,
                blocks: vec![slots],
            }
        })
        .collect()
}

/// Builds the [`ConfigClass`] of a valid dominant leaf.
pub fn dominant_class(
    graph: &Arc<MetricGraph>,
    k: usize,
    labels: &[&[u8]],
) -> ConfigClass {
    let owned: Vec<Vec<u8>> = labels.iter().map(|s| s.to_vec()).collect();
    let gluings = coarse_gluings(graph, labels);
    let id = canonical_id_coarse(graph, k, &owned, &gluings);
    ConfigClass::from_enumerated(graph.clone(), k, owned, gluings, id)
}

struct DominantDfs<'a> {
    graph: &'a MetricGraph,
    k: usize,
    cands: &'a [Vec<u8>],
    prev: &'a [Option<EdgeIx>],
    cap: usize,
    choice: Vec<usize>,
    labels: Vec<&'a [u8]>,
    uf: UnionFind,
    touched: Vec<VertexIx>,
    stats: ScanStats,
}

impl<'a> DominantDfs<'a> {
    /// Presence and connectivity of every part. In the dominant family a
    /// segment strictly inside an edge touches no vertex, so a part
    /// containing one must consist of exactly that segment. Otherwise
    /// the part's outer segments attach to vertices (joined there by the
    /// maximal gluing) and only whole-edge segments bridge two vertices;
    /// the part is connected iff all its vertices share one component.
    fn valid(&mut self) -> bool {
        for p in 1..=self.k as u8 {
            self.uf.reset();
            self.touched.clear();
            let mut segs = 0usize;
            let mut interior = 0usize;
            for e in 0..self.graph.n_edges() {
                let seq = self.labels[e];
                let last = seq.len() - 1;
                let edge = self.graph.edge(e);
                for (i, &l) in seq.iter().enumerate() {
                    if l != p {
                        continue;
                    }
                    segs += 1;
                    if last == 0 {
                        self.uf.union(edge.lo, edge.hi);
                        self.touched.push(edge.lo);
                    } else if i == 0 {
                        self.touched.push(edge.lo);
                    } else if i == last {
                        self.touched.push(edge.hi);
                    } else {
                        interior += 1;
                    }
                }
            }
            if segs == 0 {
                return false;
            }
            if interior > 0 {
                if segs != 1 {
                    return false;
                }
                continue;
            }
            let root = self.uf.find(self.touched[0]);
            for i in 1..self.touched.len() {
                let v = self.touched[i];
                if self.uf.find(v) != root {
                    return false;
                }
            }
        }
        true
    }

    fn run<T>(&mut self, e: EdgeIx, state: &mut T, visit: &(impl Fn(&mut T, &MetricGraph, usize, &[&[u8]]) + Sync)) {
        let e_count = self.graph.n_edges();
        if e == e_count {
            self.stats.total_leaves += 1;
            if self.valid() {
                self.stats.valid_leaves += 1;
                if self.labels.iter().any(|s| s.len() == self.cap + 1) {
                    self.stats.cap_saturated = true;
                }
                visit(state, self.graph, self.k, &self.labels);
            }
            return;
        }
        let start = self.prev[e].map_or(0, |pe| self.choice[pe]);
        for ci in start..self.cands.len() {
            self.choice[e] = ci;
            self.labels[e] = &self.cands[ci];
            self.run(e + 1, state, visit);
        }
    }
}

/// Streams every valid dominant configuration to `visit`, fanning out
/// over the first edge's choices. Returns per-chunk visitor states in
/// deterministic chunk order plus aggregate statistics.
pub fn scan_dominant<T, I, V>(
    graph: &Arc<MetricGraph>,
    k: usize,
    cap: usize,
    exhaustive: bool,
    exec: Exec,
    init: I,
    visit: V,
) -> Result<(Vec<T>, ScanStats)>
where
    T: Send,
    I: Fn() -> T + Sync,
    V: Fn(&mut T, &MetricGraph, usize, &[&[u8]]) + Sync,
{
    if k == 0 || k > 8 {
        return Err(Error::InvalidParameter(format!(
            "part count {k} out of supported range 1..=8"
        )));
    }
    if cap + 1 > 250 {
        return Err(Error::InvalidParameter("cut cap too large".into()));
    }
    let cands = dominant_sequences(k, cap, exhaustive);
    let prev = bundle_predecessors(graph);
    let results = par::map_range(exec, cands.len(), |first| {
        let mut dfs = DominantDfs {
            graph,
            k,
            cands: &cands,
            prev: &prev,
            cap,
            choice: vec![0; graph.n_edges()],
            labels: vec![&cands[0][..]; graph.n_edges()],
            uf: UnionFind::new(graph.n_vertices()),
            touched: Vec::new(),
            stats: ScanStats::default(),
        };
        let mut state = init();
        dfs.choice[0] = first;
        dfs.labels[0] = &cands[first];
        dfs.run(1, &mut state, &visit);
        (state, dfs.stats)
    });
    let mut stats = ScanStats::default();
    let mut states = Vec::with_capacity(results.len());
    for (state, s) in results {
        stats.absorb(&s);
        states.push(state);
    }
    Ok((states, stats))
}

/// Scans the dominant family and materializes it, deduplicated by
/// canonical identity and sorted in canonical order.
pub fn dominant_classes(
    graph: &Arc<MetricGraph>,
    k: usize,
    cap: usize,
    exhaustive: bool,
    exec: Exec,
) -> Result<(Vec<ConfigClass>, ScanStats)> {
    let (maps, stats) = scan_dominant(
        graph,
        k,
        cap,
        exhaustive,
        exec,
        BTreeMap::new,
        |acc: &mut BTreeMap<ClassId, ConfigClass>, _g, k, labels| {
            let class = dominant_class(graph, k, labels);
            acc.entry(class.id().clone()).or_insert(class);
        },
    )?;
    let mut merged: BTreeMap<ClassId, ConfigClass> = BTreeMap::new();
    for m in maps {
        merged.extend(m);
    }
    Ok((merged.into_values().collect(), stats))
}

/// All set partitions of `0..n` as block-index assignments.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn go(i: usize, maxb: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == rgs.len() {
            out.push(rgs.clone());
            return;
        }
        for b in 0..=maxb + 1 {
            rgs[i] = b;
            go(i + 1, maxb.max(b), rgs, out);
        }
    }
    if n == 0 {
        out.push(Vec::new());
    } else {
        rgs[0] = 0;
        go(1, 0, &mut rgs, &mut out);
    }
    out
}

/// Reference enumerator: every configuration class within the caps, up
/// to canonical identity, in canonical order.
pub fn enumerate_configuration_classes(
    graph: &Arc<MetricGraph>,
    k: usize,
    caps: &EnumerationCaps,
    exhaustive: bool,
) -> Result<Enumeration> {
    if k == 0 || k > 8 {
        return Err(Error::InvalidParameter(format!(
            "part count {k} out of supported range 1..=8"
        )));
    }
    let cands = full_sequences(k, caps.max_cuts_per_edge, exhaustive);
    let prev = bundle_predecessors(graph);
    let mut found: BTreeMap<ClassId, ConfigClass> = BTreeMap::new();
    let mut truncated = false;

    struct Dfs<'a> {
        graph: &'a Arc<MetricGraph>,
        k: usize,
        cands: &'a [Vec<u8>],
        prev: &'a [Option<EdgeIx>],
        choice: Vec<usize>,
        max_classes: usize,
    }
    impl<'a> Dfs<'a> {
        /// Returns false when the class budget is exhausted.
        fn edges(
            &mut self,
            e: EdgeIx,
            found: &mut BTreeMap<ClassId, ConfigClass>,
        ) -> bool {
            if e == self.graph.n_edges() {
                return self.leaf(found);
            }
            let start = self.prev[e].map_or(0, |pe| self.choice[pe]);
            for ci in start..self.cands.len() {
                self.choice[e] = ci;
                if !self.edges(e + 1, found) {
                    return false;
                }
            }
            true
        }

        fn leaf(&mut self, found: &mut BTreeMap<ClassId, ConfigClass>) -> bool {
            let labels: Vec<Vec<u8>> = self
                .choice
                .iter()
                .map(|&ci| self.cands[ci].clone())
                .collect();
            let mut present = vec![false; self.k + 1];
            for seq in &labels {
                for &l in seq {
                    present[l as usize] = true;
                }
            }
            if (1..=self.k).any(|p| !present[p]) {
                return true;
            }
            // Slot sets per (vertex, part), then the product of set
            // partitions over them.
            let mut slot_sets: Vec<(VertexIx, u8, Vec<(EdgeIx, End)>)> = Vec::new();
            let mut map: BTreeMap<(VertexIx, u8), Vec<(EdgeIx, End)>> = BTreeMap::new();
            for v in 0..self.graph.n_vertices() {
                for &(e, end) in self.graph.incidence(v) {
                    let seq = &labels[e];
                    let l = match end {
                        End::Lo => seq[0],
                        End::Hi => *seq.last().unwrap(),
                    };
                    if l != GAP {
                        map.entry((v, l)).or_default().push((e, end));
                    }
                }
            }
            for ((v, p), slots) in map {
                slot_sets.push((v, p, slots));
            }
            let partitions_per_set: Vec<Vec<Vec<usize>>> = slot_sets
                .iter()
                .map(|(_, _, slots)| set_partitions(slots.len()))
                .collect();
            let mut pick = vec![0usize; slot_sets.len()];
            loop {
                let mut gluings: Vec<VertexGluing> = Vec::with_capacity(slot_sets.len());
                for (si, (v, p, slots)) in slot_sets.iter().enumerate() {
                    let rgs = &partitions_per_set[si][pick[si]];
                    let nblocks = rgs.iter().max().map_or(0, |m| m + 1);
                    let mut blocks: Vec<Vec<(EdgeIx, End)>> = vec![Vec::new(); nblocks];
                    for (slot_i, &b) in rgs.iter().enumerate() {
                        blocks[b].push(slots[slot_i]);
                    }
                    gluings.push(VertexGluing {
                        vertex: *v,
                        part: *p,
                        blocks,
                    });
                }
                if let Ok(class) =
                    ConfigClass::new(self.graph.clone(), self.k, labels.clone(), gluings)
                {
                    if !found.contains_key(class.id()) {
                        if found.len() >= self.max_classes {
                            return false;
                        }
                        found.insert(class.id().clone(), class);
                    }
                }
                // Next pick in the mixed-radix product.
                let mut i = 0;
                loop {
                    if i == pick.len() {
                        return true;
                    }
                    pick[i] += 1;
                    if pick[i] < partitions_per_set[i].len() {
                        break;
                    }
                    pick[i] = 0;
                    i += 1;
                }
            }
        }
    }

    let mut dfs = Dfs {
        graph,
        k,
        cands: &cands,
        prev: &prev,
        choice: vec![0; graph.n_edges()],
        max_classes: caps.max_classes.unwrap_or(usize::MAX),
    };
    if !cands.is_empty() && !dfs.edges(0, &mut found) {
        truncated = true;
    }
    let mut warnings = Vec::new();
    if truncated {
        warnings.push(format!(
            "class enumeration truncated at {} classes; results may be incomplete",
            found.len()
        ));
    }
    Ok(Enumeration {
        classes: found.into_values().collect(),
        warnings,
        truncated,
    })
}
