//! Configuration classes: the combinatorial type of a partition.
//!
//! A class records, per parent edge, the ordered sequence of segment
//! labels (`0` for an unassigned gap, `1..=k` for parts) and, per parent
//! vertex and part, how that part's incident edge ends are glued into
//! descendant blocks. Cut positions are left symbolic: every assignment
//! of nonnegative segment lengths summing to the edge lengths realizes
//! the class as a concrete [`Partition`].
//!
//! Classes are identified up to part relabelling, reversal of loop
//! edges, and permutation of interchangeable parallel edges (equal
//! endpoints, orientation and length); the identity is a lexicographically
//! minimal byte encoding over those transformations. Reversal of an
//! ordinary edge is not a symmetry: it would exchange material between
//! two distinct vertices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::graph::{EdgeIx, End, MetricGraph, UnionFind, VertexIx};
use crate::subgraph::{Descendant, Segment, Site, Subgraph};
use crate::{Error, Result};

/// Label of unassigned (gap) segments.
pub const GAP: u8 = 0;

/// Canonical class identity. Ordered, hashable, stable across runs.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassId(Vec<u8>);

impl ClassId {
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.0.len() * 2);
        for b in &self.0 {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClassId({})", self.to_hex())
    }
}

/// Gluing of one part's edge ends at one vertex into descendant blocks.
#[derive(Clone, Debug)]
pub struct VertexGluing {
    pub vertex: VertexIx,
    pub part: u8,
    pub blocks: Vec<Vec<(EdgeIx, End)>>,
}

#[derive(Clone, Debug)]
pub struct ConfigClass {
    parent: Arc<MetricGraph>,
    k: usize,
    labels: Vec<Vec<u8>>,
    gluings: Vec<VertexGluing>,
    id: ClassId,
}

/// One symmetry candidate used during canonicalization.
#[derive(Clone, Debug)]
struct Transform {
    /// `sigma[old_label] = new_label`, with `sigma[0] = 0`.
    sigma: Vec<u8>,
    /// Reversed edges (loops only).
    flips: Vec<bool>,
    /// `edge_map[new_index] = old_index`.
    edge_map: Vec<EdgeIx>,
}

const MAX_TRANSFORMS: usize = 200_000;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut out);
    out.sort();
    out
}

fn factorial(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}

/// Label of the outer segment at an edge end.
fn slot_label(labels: &[Vec<u8>], e: EdgeIx, end: End) -> u8 {
    let seq = &labels[e];
    match end {
        End::Lo => seq[0],
        End::Hi => *seq.last().unwrap(),
    }
}

impl ConfigClass {
    /// Validates and canonicalizes a class given explicitly.
    pub fn new(
        parent: Arc<MetricGraph>,
        k: usize,
        labels: Vec<Vec<u8>>,
        gluings: Vec<VertexGluing>,
    ) -> Result<ConfigClass> {
        if k == 0 || k > 8 {
            return Err(Error::InvalidClass(format!("unsupported part count {k}")));
        }
        if labels.len() != parent.n_edges() {
            return Err(Error::InvalidClass("label row per edge required".into()));
        }
        let mut present = vec![false; k + 1];
        for (e, seq) in labels.iter().enumerate() {
            if seq.is_empty() {
                return Err(Error::InvalidClass(format!("edge {e} has no segments")));
            }
            if seq.len() > 250 {
                return Err(Error::InvalidClass(format!(
                    "edge {e} has too many segments"
                )));
            }
            for w in seq.windows(2) {
                if w[0] == GAP && w[1] == GAP {
                    return Err(Error::InvalidClass(format!(
                        "edge {e} has adjacent gap segments"
                    )));
                }
            }
            for &l in seq {
                if l as usize > k {
                    return Err(Error::InvalidClass(format!(
                        "label {l} exceeds part count {k}"
                    )));
                }
                present[l as usize] = true;
            }
        }
        if let Some(p) = (1..=k).find(|&p| !present[p]) {
            return Err(Error::InvalidClass(format!("part {p} has no segments")));
        }

        // Expected slot sets per (vertex, part).
        let mut expected: BTreeMap<(VertexIx, u8), Vec<(EdgeIx, End)>> = BTreeMap::new();
        for v in 0..parent.n_vertices() {
            for &(e, end) in parent.incidence(v) {
                let l = slot_label(&labels, e, end);
                if l != GAP {
                    expected.entry((v, l)).or_default().push((e, end));
                }
            }
        }
        let mut seen: BTreeMap<(VertexIx, u8), Vec<(EdgeIx, End)>> = BTreeMap::new();
        for g in &gluings {
            if g.part == GAP || g.part as usize > k {
                return Err(Error::InvalidClass("gluing for invalid part".into()));
            }
            if g.blocks.iter().any(|b| b.is_empty()) {
                return Err(Error::InvalidClass("empty gluing block".into()));
            }
            let entry = seen.entry((g.vertex, g.part)).or_default();
            if !entry.is_empty() {
                return Err(Error::InvalidClass(format!(
                    "duplicate gluing entry for vertex {}, part {}",
                    g.vertex, g.part
                )));
            }
            for b in &g.blocks {
                entry.extend(b.iter().copied());
            }
        }
        for (key, slots) in &mut seen {
            slots.sort();
            let before = slots.len();
            slots.dedup();
            if slots.len() != before {
                return Err(Error::InvalidClass(format!(
                    "slot glued twice at vertex {}, part {}",
                    key.0, key.1
                )));
            }
        }
        for (key, exp) in &mut expected {
            exp.sort();
            match seen.get(key) {
                Some(s) if s == exp => {}
                _ => {
                    return Err(Error::InvalidClass(format!(
                        "gluing at vertex {} does not cover part {}'s ends",
                        key.0, key.1
                    )))
                }
            }
        }
        if seen.len() != expected.len() {
            return Err(Error::InvalidClass(
                "gluing entry for a part with no ends at that vertex".into(),
            ));
        }

        // Per-part connectivity through blocks. Interior cut ends are
        // leaves and cannot join segments; only blocks can.
        for p in 1..=k as u8 {
            let mut seg_ids: HashMap<(EdgeIx, usize), usize> = HashMap::new();
            for (e, seq) in labels.iter().enumerate() {
                for (i, &l) in seq.iter().enumerate() {
                    if l == p {
                        let n = seg_ids.len();
                        seg_ids.insert((e, i), n);
                    }
                }
            }
            let mut uf = UnionFind::new(seg_ids.len());
            for g in gluings.iter().filter(|g| g.part == p) {
                for b in &g.blocks {
                    let members: Vec<usize> = b
                        .iter()
                        .map(|&(e, end)| {
                            let i = match end {
                                End::Lo => 0,
                                End::Hi => labels[e].len() - 1,
                            };
                            seg_ids[&(e, i)]
                        })
                        .collect();
                    for w in members.windows(2) {
                        uf.union(w[0], w[1]);
                    }
                }
            }
            if !uf.all_connected(0..seg_ids.len()) {
                return Err(Error::InvalidClass(format!("part {p} is not connected")));
            }
        }

        let id = canonical_id(&parent, k, &labels, &gluings).0;
        Ok(ConfigClass {
            parent,
            k,
            labels,
            gluings,
            id,
        })
    }

    /// Fast constructor for enumerator output: the caller guarantees
    /// validity, coarse gluing (a single block per vertex and part), and
    /// supplies the precomputed canonical id.
    pub(crate) fn from_enumerated(
        parent: Arc<MetricGraph>,
        k: usize,
        labels: Vec<Vec<u8>>,
        gluings: Vec<VertexGluing>,
        id: ClassId,
    ) -> ConfigClass {
        ConfigClass {
            parent,
            k,
            labels,
            gluings,
            id,
        }
    }

    pub fn parent(&self) -> &Arc<MetricGraph> {
        &self.parent
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[Vec<u8>] {
        &self.labels
    }

    /// True when every vertex meets each part in a single block, the
    /// shape produced by the enumeration scan and required by the fast
    /// canonical-id path.
    #[cfg(test)]
    fn is_coarse(&self) -> bool {
        self.gluings.iter().all(|g| g.blocks.len() == 1)
    }

    pub fn gluings(&self) -> &[VertexGluing] {
        &self.gluings
    }

    pub fn id(&self) -> &ClassId {
        &self.id
    }

    pub fn is_exhaustive(&self) -> bool {
        self.labels.iter().flatten().all(|&l| l != GAP)
    }

    pub fn max_cuts_per_edge(&self) -> usize {
        self.labels.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    /// Part × edge incidence: `true` if the part has a segment there.
    pub fn incidence(&self) -> Vec<Vec<bool>> {
        let mut inc = vec![vec![false; self.parent.n_edges()]; self.k];
        for (e, seq) in self.labels.iter().enumerate() {
            for &l in seq {
                if l != GAP {
                    inc[l as usize - 1][e] = true;
                }
            }
        }
        inc
    }

    /// Class-constant boundary size of each part, by effective degree.
    pub fn boundary_effdeg(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.k];
        for seq in &self.labels {
            for w in seq.windows(2) {
                for &l in w {
                    if l != GAP {
                        out[l as usize - 1] += 1;
                    }
                }
            }
        }
        for g in &self.gluings {
            let deg = self.parent.deg(g.vertex);
            for b in &g.blocks {
                if b.len() < deg {
                    out[g.part as usize - 1] += b.len().min(deg - b.len());
                }
            }
        }
        out
    }

    /// Class-constant boundary size of each part, by counting distinct
    /// parent boundary points.
    pub fn boundary_count(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.k];
        for seq in &self.labels {
            for w in seq.windows(2) {
                if w[0] == w[1] {
                    if w[0] != GAP {
                        out[w[0] as usize - 1] += 1;
                    }
                } else {
                    for &l in w {
                        if l != GAP {
                            out[l as usize - 1] += 1;
                        }
                    }
                }
            }
        }
        for g in &self.gluings {
            let deg = self.parent.deg(g.vertex);
            if g.blocks.iter().any(|b| b.len() < deg) {
                out[g.part as usize - 1] += 1;
            }
        }
        out
    }

    /// Realizes the class with the given per-edge segment lengths.
    ///
    /// Zero-length segments (tolerance `1e-12 · ℓ_e`) are dropped: parts
    /// may lose material or vanish, segment ends arriving at a vertex
    /// become separate singleton descendants, and two ends of the same
    /// part meeting at an interior point of an edge heal into one longer
    /// segment. The resulting partition's class is recomputed.
    pub fn realize(&self, lengths: &[Vec<f64>]) -> Result<Partition> {
        let graph = &self.parent;
        if lengths.len() != graph.n_edges() {
            return Err(Error::InvalidRealization(
                "length row per edge required".into(),
            ));
        }
        // Per edge: merged surviving tiles (label, lo, hi, first, last).
        struct Tile {
            label: u8,
            lo: f64,
            hi: f64,
            first: usize,
            last: usize,
        }
        let mut tiling: Vec<Vec<Tile>> = Vec::with_capacity(graph.n_edges());
        for (e, seq) in self.labels.iter().enumerate() {
            let len = graph.edge(e).length;
            let row = &lengths[e];
            if row.len() != seq.len() {
                return Err(Error::InvalidRealization(format!(
                    "edge {e}: expected {} segment lengths, got {}",
                    seq.len(),
                    row.len()
                )));
            }
            let tol = 1e-12 * len;
            if row.iter().any(|&x| !x.is_finite() || x < -tol) {
                return Err(Error::InvalidRealization(format!(
                    "edge {e}: negative or non-finite segment length"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - len).abs() > tol.max(1e-12 * sum.abs()) {
                return Err(Error::InvalidRealization(format!(
                    "edge {e}: segment lengths sum to {sum}, edge length is {len}"
                )));
            }
            // Cumulative positions, snapped and clamped.
            let mut pos = vec![0.0];
            for &x in row {
                let p: f64 = pos.last().unwrap() + x.max(0.0);
                pos.push(p.min(len));
            }
            *pos.last_mut().unwrap() = len;
            for j in 1..pos.len() {
                if pos[j] - pos[j - 1] <= tol {
                    pos[j] = pos[j - 1];
                }
            }
            // Snapping can leave the final position short of the edge
            // length only by rounding; restore it.
            *pos.last_mut().unwrap() = len;

            let mut tiles: Vec<Tile> = Vec::new();
            for (i, &l) in seq.iter().enumerate() {
                if pos[i + 1] <= pos[i] {
                    continue; // vanished
                }
                let tile = Tile {
                    label: l,
                    lo: pos[i],
                    hi: pos[i + 1],
                    first: i,
                    last: i,
                };
                // Heal same-label touching tiles unless the adjacency was
                // declared by the class itself (an explicit self-cut).
                // Gap tiles brought together by a vanished separator
                // always merge.
                if let Some(prev) = tiles.last_mut() {
                    if prev.label == l
                        && prev.hi == tile.lo
                        && (l == GAP || prev.last + 1 != tile.first)
                    {
                        prev.hi = tile.hi;
                        prev.last = tile.last;
                        continue;
                    }
                }
                tiles.push(tile);
            }
            tiling.push(tiles);
        }

        // Surviving parts, in original label order.
        let mut survived = vec![false; self.k + 1];
        for tiles in &tiling {
            for t in tiles {
                if t.label != GAP {
                    survived[t.label as usize] = true;
                }
            }
        }
        let source_labels: Vec<u8> = (1..=self.k as u8).filter(|&p| survived[p as usize]).collect();
        let relabel: HashMap<u8, u8> = source_labels
            .iter()
            .enumerate()
            .map(|(i, &p)| (p, i as u8 + 1))
            .collect();
        let k_new = source_labels.len();

        // Per-part segment collection. Tile identity: (edge, index).
        let mut part_segments: Vec<Vec<(EdgeIx, usize)>> = vec![Vec::new(); k_new];
        let mut seg_index: HashMap<(EdgeIx, usize), usize> = HashMap::new();
        for (e, tiles) in tiling.iter().enumerate() {
            for (ti, t) in tiles.iter().enumerate() {
                if t.label != GAP {
                    let p = relabel[&t.label] as usize - 1;
                    seg_index.insert((e, ti), part_segments[p].len());
                    part_segments[p].push((e, ti));
                }
            }
        }

        // Descendants per part: filtered class blocks plus singletons.
        let mut part_desc: Vec<Vec<Descendant>> = vec![Vec::new(); k_new];
        let mut new_gluings: Vec<VertexGluing> = Vec::new();
        // Which tile owns each original outer slot, if it survived.
        let slot_tile = |e: EdgeIx, end: End| -> Option<usize> {
            let tiles = &tiling[e];
            match end {
                End::Lo => tiles.first().and_then(|t| (t.first == 0).then_some(0)),
                End::Hi => tiles
                    .last()
                    .and_then(|t| (t.last == self.labels[e].len() - 1).then(|| tiles.len() - 1)),
            }
        };
        for g in &self.gluings {
            if !survived[g.part as usize] {
                continue;
            }
            let p = relabel[&g.part] as usize - 1;
            let mut kept_blocks: Vec<Vec<(EdgeIx, End)>> = Vec::new();
            for b in &g.blocks {
                let kept: Vec<(EdgeIx, End)> = b
                    .iter()
                    .filter(|&&(e, end)| slot_tile(e, end).is_some())
                    .copied()
                    .collect();
                if !kept.is_empty() {
                    part_desc[p].push(Descendant {
                        site: Site::Vertex(g.vertex),
                        ends: kept
                            .iter()
                            .map(|&(e, end)| {
                                let ti = slot_tile(e, end).unwrap();
                                (seg_index[&(e, ti)], end)
                            })
                            .collect(),
                    });
                    kept_blocks.push(kept);
                }
            }
            if !kept_blocks.is_empty() {
                new_gluings.push(VertexGluing {
                    vertex: g.vertex,
                    part: relabel[&g.part],
                    blocks: kept_blocks,
                });
            }
        }
        // Singletons for tile ends not covered by surviving class slots.
        for (e, tiles) in tiling.iter().enumerate() {
            let len = graph.edge(e).length;
            let edge = graph.edge(e);
            for (ti, t) in tiles.iter().enumerate() {
                if t.label == GAP {
                    continue;
                }
                let p = relabel[&t.label] as usize - 1;
                let s = seg_index[&(e, ti)];
                for (end, posn) in [(End::Lo, t.lo), (End::Hi, t.hi)] {
                    let is_class_slot = match end {
                        End::Lo => t.first == 0,
                        End::Hi => t.last == self.labels[e].len() - 1,
                    };
                    if is_class_slot {
                        continue; // handled through the class gluing
                    }
                    let site = if posn == 0.0 {
                        Site::Vertex(edge.lo)
                    } else if posn == len {
                        Site::Vertex(edge.hi)
                    } else {
                        Site::EdgePoint(e, posn)
                    };
                    part_desc[p].push(Descendant {
                        site,
                        ends: vec![(s, end)],
                    });
                    if let Site::Vertex(v) = site {
                        new_gluings.push(VertexGluing {
                            vertex: v,
                            part: relabel[&t.label],
                            blocks: vec![vec![(e, end)]],
                        });
                    }
                }
            }
        }

        let mut parts = Vec::with_capacity(k_new);
        let mut cut_positions: Vec<Vec<f64>> = vec![Vec::new(); graph.n_edges()];
        for (e, tiles) in tiling.iter().enumerate() {
            let len = graph.edge(e).length;
            let mut bounds = Vec::new();
            for t in tiles {
                bounds.push(t.lo);
                bounds.push(t.hi);
            }
            bounds.retain(|&x| x > 0.0 && x < len);
            bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
            bounds.dedup();
            cut_positions[e] = bounds;
        }
        for p in 0..k_new {
            let segments: Vec<Segment> = part_segments[p]
                .iter()
                .map(|&(e, ti)| {
                    let t = &tiling[e][ti];
                    Segment {
                        edge: e,
                        lo: t.lo,
                        hi: t.hi,
                    }
                })
                .collect();
            parts.push(Subgraph::new(
                graph.clone(),
                segments,
                std::mem::take(&mut part_desc[p]),
            )?);
        }

        // Recompute the class of the merged structure.
        let mut new_labels: Vec<Vec<u8>> = Vec::with_capacity(graph.n_edges());
        let mut realized_lengths: Vec<Vec<f64>> = Vec::with_capacity(graph.n_edges());
        for (e, tiles) in tiling.iter().enumerate() {
            let len = graph.edge(e).length;
            let mut seq = Vec::new();
            let mut lens = Vec::new();
            let mut cursor = 0.0;
            for t in tiles {
                if t.lo > cursor {
                    seq.push(GAP);
                    lens.push(t.lo - cursor);
                }
                seq.push(if t.label == GAP {
                    GAP
                } else {
                    relabel[&t.label]
                });
                lens.push(t.hi - t.lo);
                cursor = t.hi;
            }
            if cursor < len || seq.is_empty() {
                seq.push(GAP);
                lens.push(len - cursor);
            }
            new_labels.push(seq);
            realized_lengths.push(lens);
        }
        // Merge gluing entries sharing (vertex, part).
        let mut merged: BTreeMap<(VertexIx, u8), Vec<Vec<(EdgeIx, End)>>> = BTreeMap::new();
        for g in new_gluings {
            merged
                .entry((g.vertex, g.part))
                .or_default()
                .extend(g.blocks);
        }
        let gluings = merged
            .into_iter()
            .map(|((vertex, part), blocks)| VertexGluing {
                vertex,
                part,
                blocks,
            })
            .collect();
        let class = ConfigClass::new(graph.clone(), k_new, new_labels, gluings)?;
        Ok(Partition {
            parts,
            class,
            source_labels,
            cut_positions,
        })
    }
}

/// All transforms available for a graph, subject to the size guard.
fn symmetry_transforms(graph: &MetricGraph, k: usize) -> Vec<Transform> {
    let e = graph.n_edges();
    let loops: Vec<EdgeIx> = (0..e).filter(|&i| graph.edge(i).is_loop()).collect();
    let bundles: Vec<Vec<EdgeIx>> = graph
        .bundles()
        .into_iter()
        .filter(|b| b.len() > 1)
        .collect();

    let sigma_count = factorial(k);
    let mut use_flips = true;
    let mut use_bundles = true;
    let mut total = sigma_count;
    if loops.len() < 20 {
        total = total.saturating_mul(1 << loops.len());
    } else {
        use_flips = false;
    }
    let bundle_perms: usize = bundles.iter().map(|b| factorial(b.len())).product();
    if total.saturating_mul(bundle_perms) > MAX_TRANSFORMS {
        use_bundles = false;
    } else {
        total = total.saturating_mul(bundle_perms);
    }
    if total > MAX_TRANSFORMS {
        use_flips = false;
    }

    let sigmas = permutations(k);
    let flip_sets: Vec<Vec<bool>> = if use_flips && !loops.is_empty() {
        (0..(1usize << loops.len()))
            .map(|mask| {
                let mut f = vec![false; e];
                for (i, &le) in loops.iter().enumerate() {
                    f[le] = mask & (1 << i) != 0;
                }
                f
            })
            .collect()
    } else {
        vec![vec![false; e]]
    };
    let bundle_maps: Vec<Vec<EdgeIx>> = if use_bundles && !bundles.is_empty() {
        let mut maps = vec![(0..e).collect::<Vec<_>>()];
        for b in &bundles {
            let perms = permutations(b.len());
            let mut next = Vec::with_capacity(maps.len() * perms.len());
            for m in &maps {
                for p in &perms {
                    let mut m2 = m.clone();
                    for (pos, &src) in p.iter().enumerate() {
                        m2[b[pos]] = b[src];
                    }
                    next.push(m2);
                }
            }
            maps = next;
        }
        maps
    } else {
        vec![(0..e).collect()]
    };

    let mut out = Vec::new();
    for s in &sigmas {
        let mut sigma = vec![0u8; k + 1];
        for (old, &new) in s.iter().enumerate() {
            sigma[old + 1] = new as u8 + 1;
        }
        for f in &flip_sets {
            for m in &bundle_maps {
                out.push(Transform {
                    sigma: sigma.clone(),
                    flips: f.clone(),
                    edge_map: m.clone(),
                });
            }
        }
    }
    out
}

fn encode(
    graph: &MetricGraph,
    labels: &[Vec<u8>],
    gluings: &[VertexGluing],
    t: &Transform,
) -> Vec<u8> {
    let e_count = graph.n_edges();
    let mut inv = vec![0usize; e_count];
    for (new, &old) in t.edge_map.iter().enumerate() {
        inv[old] = new;
    }
    let mut out = Vec::with_capacity(e_count * 4 + gluings.len() * 8);
    for e_new in 0..e_count {
        let e_old = t.edge_map[e_new];
        let seq = &labels[e_old];
        out.push(seq.len() as u8);
        if t.flips[e_old] {
            out.extend(seq.iter().rev().map(|&l| t.sigma[l as usize]));
        } else {
            out.extend(seq.iter().map(|&l| t.sigma[l as usize]));
        }
    }
    out.push(0xFF);
    let mut entries: Vec<(u32, u8, Vec<Vec<u16>>)> = gluings
        .iter()
        .map(|g| {
            let mut blocks: Vec<Vec<u16>> = g
                .blocks
                .iter()
                .map(|b| {
                    let mut ids: Vec<u16> = b
                        .iter()
                        .map(|&(e_old, end)| {
                            let end2 = if t.flips[e_old] { end.opposite() } else { end };
                            (2 * inv[e_old] + end2.bit() as usize) as u16
                        })
                        .collect();
                    ids.sort();
                    ids
                })
                .collect();
            blocks.sort();
            (g.vertex as u32, t.sigma[g.part as usize], blocks)
        })
        .collect();
    entries.sort();
    for (v, p, blocks) in entries {
        out.extend(v.to_be_bytes());
        out.push(p);
        out.push(blocks.len() as u8);
        for b in blocks {
            out.push(b.len() as u8);
            for s in b {
                out.extend(s.to_be_bytes());
            }
        }
    }
    out
}

/// Canonical id plus the transforms that achieve it.
fn canonical_id(
    graph: &MetricGraph,
    k: usize,
    labels: &[Vec<u8>],
    gluings: &[VertexGluing],
) -> (ClassId, Vec<Transform>) {
    let transforms = symmetry_transforms(graph, k);
    let mut best: Option<Vec<u8>> = None;
    let mut argmins: Vec<Transform> = Vec::new();
    for t in transforms {
        let enc = encode(graph, labels, gluings, &t);
        match &best {
            None => {
                best = Some(enc);
                argmins = vec![t];
            }
            Some(b) => {
                if enc < *b {
                    best = Some(enc);
                    argmins = vec![t];
                } else if enc == *b {
                    argmins.push(t);
                }
            }
        }
    }
    (ClassId(best.unwrap()), argmins)
}

/// Canonical id for coarse classes (single block per vertex and part),
/// computed without iterating bundle permutations: for each relabelling
/// and loop-flip choice, sorting each bundle's transformed label
/// sequences already minimizes the full encoding, and any tie between
/// equal sequences leaves the encoding bytes unchanged.
pub(crate) fn canonical_id_coarse(
    graph: &MetricGraph,
    k: usize,
    labels: &[Vec<u8>],
    gluings: &[VertexGluing],
) -> ClassId {
    let e_count = graph.n_edges();
    let loops: Vec<EdgeIx> = (0..e_count)
        .filter(|&i| graph.edge(i).is_loop())
        .collect();
    let bundles: Vec<Vec<EdgeIx>> = graph
        .bundles()
        .into_iter()
        .filter(|b| b.len() > 1)
        .collect();
    let sigmas = permutations(k);
    let flip_masks: usize = if loops.len() < 16 {
        1 << loops.len()
    } else {
        1
    };
    let mut best: Option<Vec<u8>> = None;
    let mut seq_buf: Vec<Vec<u8>> = vec![Vec::new(); e_count];
    for s in &sigmas {
        let mut sigma = vec![0u8; k + 1];
        for (old, &new) in s.iter().enumerate() {
            sigma[old + 1] = new as u8 + 1;
        }
        for mask in 0..flip_masks {
            let mut flips = vec![false; e_count];
            for (i, &le) in loops.iter().enumerate() {
                flips[le] = mask & (1 << i) != 0;
            }
            // Length-prefixed transformed sequences: with the length
            // byte in front, plain lexicographic sorting of bundle
            // members minimizes the concatenated encoding.
            for e in 0..e_count {
                let seq = &labels[e];
                let buf = &mut seq_buf[e];
                buf.clear();
                buf.push(seq.len() as u8);
                if flips[e] {
                    buf.extend(seq.iter().rev().map(|&l| sigma[l as usize]));
                } else {
                    buf.extend(seq.iter().map(|&l| sigma[l as usize]));
                }
            }
            let mut edge_map: Vec<EdgeIx> = (0..e_count).collect();
            for b in &bundles {
                let mut members = b.clone();
                members.sort_by(|&x, &y| seq_buf[x].cmp(&seq_buf[y]));
                for (pos, &src) in b.iter().zip(&members) {
                    edge_map[*pos] = src;
                }
            }
            let t = Transform {
                sigma,
                flips,
                edge_map,
            };
            let enc = encode(graph, labels, gluings, &t);
            if best.as_ref().map_or(true, |b| enc < *b) {
                best = Some(enc);
            }
            sigma = t.sigma;
        }
    }
    ClassId(best.unwrap())
}

/// A realized partition: concrete subgraphs plus the (recomputed)
/// configuration class they belong to. Part `i` carries label `i + 1` in
/// the class.
#[derive(Clone, Debug)]
pub struct Partition {
    parts: Vec<Subgraph>,
    class: ConfigClass,
    /// For partitions produced by [`ConfigClass::realize`]: the label
    /// each surviving part had in the source class.
    source_labels: Vec<u8>,
    /// Interior cut offsets per parent edge, sorted ascending.
    cut_positions: Vec<Vec<f64>>,
}

impl Partition {
    pub fn parts(&self) -> &[Subgraph] {
        &self.parts
    }

    pub fn k(&self) -> usize {
        self.parts.len()
    }

    pub fn class(&self) -> &ConfigClass {
        &self.class
    }

    pub fn source_labels(&self) -> &[u8] {
        &self.source_labels
    }

    pub fn cut_positions(&self) -> &[Vec<f64>] {
        &self.cut_positions
    }
}

/// Maximum cut-coordinate displacement between two partitions in the
/// same configuration class, minimized over the class's symmetries;
/// `+∞` for partitions of different classes.
pub fn partition_distance(a: &Partition, b: &Partition) -> f64 {
    if a.class.id() != b.class.id() {
        return f64::INFINITY;
    }
    let graph = a.class.parent();
    let (_, transforms_a) = canonical_id(graph, a.class.k(), &a.class.labels, &a.class.gluings);
    let (_, transforms_b) = canonical_id(graph, b.class.k(), &b.class.labels, &b.class.gluings);
    let canon = |p: &Partition, t: &Transform| -> Vec<Vec<f64>> {
        (0..graph.n_edges())
            .map(|e_new| {
                let e_old = t.edge_map[e_new];
                let len = graph.edge(e_old).length;
                let mut cuts = p.cut_positions[e_old].clone();
                if t.flips[e_old] {
                    cuts = cuts.iter().rev().map(|&x| len - x).collect();
                }
                cuts
            })
            .collect()
    };
    let b_ref = canon(b, &transforms_b[0]);
    let mut best = f64::INFINITY;
    for t in &transforms_a {
        let a_t = canon(a, t);
        let mut worst: f64 = 0.0;
        for (ra, rb) in a_t.iter().zip(&b_ref) {
            if ra.len() != rb.len() {
                worst = f64::INFINITY;
                break;
            }
            for (x, y) in ra.iter().zip(rb) {
                worst = worst.max((x - y).abs());
            }
        }
        best = best.min(worst);
    }
    best
}

/// The optimal three-part layout of the two-pendant pumpkin graph:
/// each pendant a part, the pumpkin a third part glued through the
/// joint vertex.
#[cfg(test)]
pub(crate) fn pumpkin_split_class(g: &Arc<MetricGraph>) -> ConfigClass {
    ConfigClass::new(
        g.clone(),
        3,
        vec![vec![1], vec![2], vec![3], vec![3], vec![3], vec![3]],
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
                blocks: vec![vec![(1, End::Hi)]],
            },
            VertexGluing {
                vertex: 2,
                part: 3,
                blocks: vec![vec![(2, End::Lo), (3, End::Lo), (4, End::Lo), (5, End::Lo)]],
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

/// Same layout but with the pumpkin part cut through four ways at the
/// joint vertex.
#[cfg(test)]
pub(crate) fn pumpkin_cut_through_class(g: &Arc<MetricGraph>) -> ConfigClass {
    ConfigClass::new(
        g.clone(),
        3,
        vec![vec![1], vec![2], vec![3], vec![3], vec![3], vec![3]],
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
                blocks: vec![vec![(1, End::Hi)]],
            },
            VertexGluing {
                vertex: 2,
                part: 3,
                blocks: vec![
                    vec![(2, End::Lo)],
                    vec![(3, End::Lo)],
                    vec![(4, End::Lo)],
                    vec![(5, End::Lo)],
                ],
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

/// Two parts separated by a single cut on a lone edge.
#[cfg(test)]
pub(crate) fn interval_two_part_class(g: &Arc<MetricGraph>, order: [u8; 2]) -> ConfigClass {
    ConfigClass::new(
        g.clone(),
        2,
        vec![vec![order[0], order[1]]],
        vec![
            VertexGluing {
                vertex: 0,
                part: order[0],
                blocks: vec![vec![(0, End::Lo)]],
            },
            VertexGluing {
                vertex: 1,
                part: order[1],
                blocks: vec![vec![(0, End::Hi)]],
            },
        ],
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::subgraph::BoundaryMode;

    fn arc(g: MetricGraph) -> Arc<MetricGraph> {
        Arc::new(g)
    }

    #[test]
    fn relabelling_does_not_change_identity() {
        let g = arc(corpus::interval(1.0));
        let a = interval_two_part_class(&g, [1, 2]);
        let b = interval_two_part_class(&g, [2, 1]);
        assert_eq!(a.id(), b.id());
    }

    #[test]
    fn gluing_topology_distinguishes_classes() {
        let g = arc(corpus::pumpkin_with_legs());
        let glued = pumpkin_split_class(&g);
        let cut = pumpkin_cut_through_class(&g);
        assert_ne!(glued.id(), cut.id());
        assert_eq!(glued.boundary_effdeg(), vec![1, 1, 2]);
        assert_eq!(cut.boundary_effdeg(), vec![1, 1, 4]);
        assert_eq!(glued.boundary_count(), vec![1, 1, 1]);
        assert_eq!(cut.boundary_count(), vec![1, 1, 1]);
    }

    #[test]
    fn parallel_edge_permutations_are_symmetries() {
        let g = arc(corpus::pumpkin_with_legs());
        // Part 3 on three pumpkin edges and a gap on the fourth, in two
        // different placements: same class.
        let mk = |gap_edge: EdgeIx| {
            let labels: Vec<Vec<u8>> = (0..6)
                .map(|e| {
                    if e == 0 {
                        vec![1]
                    } else if e == 1 {
                        vec![2]
                    } else if e == gap_edge {
                        vec![GAP]
                    } else {
                        vec![3]
                    }
                })
                .collect();
            let pump: Vec<EdgeIx> = (2..6).filter(|&e| e != gap_edge).collect();
            ConfigClass::new(
                g.clone(),
                3,
                labels,
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
                        blocks: vec![vec![(1, End::Hi)]],
                    },
                    VertexGluing {
                        vertex: 2,
                        part: 3,
                        blocks: vec![pump.iter().map(|&e| (e, End::Lo)).collect()],
                    },
                    VertexGluing {
                        vertex: 3,
                        part: 3,
                        blocks: vec![pump.iter().map(|&e| (e, End::Hi)).collect()],
                    },
                ],
            )
            .unwrap()
        };
        assert_eq!(mk(2).id(), mk(5).id());
    }

    #[test]
    fn rejects_invalid_classes() {
        let g = arc(corpus::interval(1.0));
        // Missing part.
        assert!(ConfigClass::new(g.clone(), 2, vec![vec![1, 1]], vec![]).is_err());
        // Adjacent gaps.
        assert!(ConfigClass::new(g.clone(), 1, vec![vec![GAP, GAP, 1]], vec![]).is_err());
        // Ends not glued.
        assert!(ConfigClass::new(g.clone(), 1, vec![vec![1]], vec![]).is_err());
        // Disconnected part: two islands of part 1 on a path.
        let p = arc(corpus::path_graph(&[1.0, 1.0]));
        let bad = ConfigClass::new(
            p.clone(),
            2,
            vec![vec![1, 2], vec![2, 1]],
            vec![
                VertexGluing {
                    vertex: 0,
                    part: 1,
                    blocks: vec![vec![(0, End::Lo)]],
                },
                VertexGluing {
                    vertex: 1,
                    part: 2,
                    blocks: vec![vec![(0, End::Hi), (1, End::Lo)]],
                },
                VertexGluing {
                    vertex: 2,
                    part: 1,
                    blocks: vec![vec![(1, End::Hi)]],
                },
            ],
        );
        assert!(bad.is_err());
    }

    #[test]
    fn realize_at_interior_positions_keeps_the_class() {
        let g = arc(corpus::interval(1.0));
        let c = interval_two_part_class(&g, [1, 2]);
        let p = c.realize(&[vec![0.3, 0.7]]).unwrap();
        assert_eq!(p.class().id(), c.id());
        assert_eq!(p.k(), 2);
        assert!((p.parts()[0].total_length() - 0.3).abs() < 1e-15);
        assert!((p.parts()[1].total_length() - 0.7).abs() < 1e-15);
        assert_eq!(p.cut_positions()[0], vec![0.3]);
    }

    #[test]
    fn realize_rejects_bad_lengths() {
        let g = arc(corpus::interval(1.0));
        let c = interval_two_part_class(&g, [1, 2]);
        assert!(c.realize(&[vec![0.3, 0.8]]).is_err());
        assert!(c.realize(&[vec![0.3]]).is_err());
        assert!(c.realize(&[vec![-0.1, 1.1]]).is_err());
    }

    #[test]
    fn zero_segment_drops_a_part() {
        let g = arc(corpus::interval(1.0));
        let c = interval_two_part_class(&g, [1, 2]);
        let p = c.realize(&[vec![1.0, 0.0]]).unwrap();
        assert_eq!(p.k(), 1);
        assert_eq!(p.source_labels(), &[1]);
        assert_eq!(p.parts()[0].boundary_size(BoundaryMode::EffectiveDegree), 0);
        assert!(p.cut_positions()[0].is_empty());
    }

    #[test]
    fn interior_same_part_collision_heals() {
        // [1, 2, 1] on one edge: when the middle part vanishes at an
        // interior point the two outer segments fuse back together.
        let g = arc(corpus::interval(1.0));
        let c = ConfigClass::new(
            g.clone(),
            2,
            vec![vec![1, 2, 1]],
            vec![
                VertexGluing {
                    vertex: 0,
                    part: 1,
                    blocks: vec![vec![(0, End::Lo)]],
                },
                VertexGluing {
                    vertex: 1,
                    part: 1,
                    blocks: vec![vec![(0, End::Hi)]],
                },
            ],
        );
        // Part 1 in two pieces joined through nothing: not connected.
        assert!(c.is_err());
        // On a cycle the same labels are connected through the vertex.
        let cy = arc(corpus::cycle_graph(&[1.0, 1.0]));
        let c = ConfigClass::new(
            cy.clone(),
            2,
            vec![vec![1, 2, 1], vec![1]],
            vec![
                VertexGluing {
                    vertex: 0,
                    part: 1,
                    blocks: vec![vec![(0, End::Lo), (1, End::Hi)]],
                },
                VertexGluing {
                    vertex: 1,
                    part: 1,
                    blocks: vec![vec![(0, End::Hi), (1, End::Lo)]],
                },
            ],
        )
        .unwrap();
        let p = c.realize(&[vec![0.4, 0.0, 0.6], vec![1.0]]).unwrap();
        assert_eq!(p.k(), 1);
        // Healed: single segment over the whole first edge, no cuts.
        assert!(p.cut_positions()[0].is_empty());
        assert_eq!(p.parts()[0].segments().len(), 2);
        assert_eq!(p.class().max_cuts_per_edge(), 0);
    }

    #[test]
    fn vanishing_stubs_reproduce_the_cut_through_limit() {
        // Pendant part with stubs into all four pumpkin edges; letting
        // the stubs shrink to zero must yield the cut-through class, and
        // the pendant part's boundary size drops from 5 to 1.
        let g = arc(corpus::pumpkin_with_legs());
        let stubby = ConfigClass::new(
            g.clone(),
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
        .unwrap();
        // With positive stubs: pendant part boundary is 5.
        let eps = 0.05;
        let stub_lengths = vec![
            vec![1.0],
            vec![1.0],
            vec![eps, 0.5 - eps],
            vec![eps, 0.5 - eps],
            vec![eps, 0.5 - eps],
            vec![eps, 0.5 - eps],
        ];
        let pn = stubby.realize(&stub_lengths).unwrap();
        assert_eq!(pn.class().id(), stubby.id());
        let part2 = &pn.parts()[1];
        assert_eq!(part2.boundary_size(BoundaryMode::EffectiveDegree), 5);

        // Stubs collapsed: the limit is the cut-through class, and the
        // pendant part's boundary drops to 1.
        let zero_lengths = vec![
            vec![1.0],
            vec![1.0],
            vec![0.0, 0.5],
            vec![0.0, 0.5],
            vec![0.0, 0.5],
            vec![0.0, 0.5],
        ];
        let p0 = stubby.realize(&zero_lengths).unwrap();
        assert_eq!(p0.k(), 3);
        assert_eq!(
            p0.class().id(),
            pumpkin_cut_through_class(&g).id(),
            "limit class should cut the pumpkin through at the joint vertex"
        );
        assert_eq!(p0.parts()[1].boundary_size(BoundaryMode::EffectiveDegree), 1);
        assert_eq!(p0.parts()[2].boundary_size(BoundaryMode::EffectiveDegree), 4);
    }

    #[test]
    fn boundary_vectors_match_realized_subgraphs() {
        let g = arc(corpus::pumpkin_with_legs());
        for class in [pumpkin_split_class(&g), pumpkin_cut_through_class(&g)] {
            let lengths: Vec<Vec<f64>> = (0..6)
                .map(|e| vec![g.edge(e).length; 1])
                .collect();
            let p = class.realize(&lengths).unwrap();
            let eff = class.boundary_effdeg();
            let cnt = class.boundary_count();
            for (i, part) in p.parts().iter().enumerate() {
                assert_eq!(part.boundary_size(BoundaryMode::EffectiveDegree), eff[i]);
                assert_eq!(part.boundary_size(BoundaryMode::Count), cnt[i]);
            }
        }
    }

    #[test]
    fn distance_on_an_ordinary_edge_has_no_mirror() {
        let g = arc(corpus::interval(1.0));
        let c = interval_two_part_class(&g, [1, 2]);
        let p1 = c.realize(&[vec![0.4, 0.6]]).unwrap();
        let p2 = c.realize(&[vec![0.5, 0.5]]).unwrap();
        let p3 = c.realize(&[vec![0.6, 0.4]]).unwrap();
        assert!((partition_distance(&p1, &p2) - 0.1).abs() < 1e-12);
        // Reversing an ordinary edge swaps its endpoints and is not a
        // symmetry, so these are genuinely 0.2 apart.
        assert!((partition_distance(&p1, &p3) - 0.2).abs() < 1e-12);
        // Different classes are infinitely far apart.
        let whole = ConfigClass::new(
            g.clone(),
            1,
            vec![vec![1]],
            vec![
                VertexGluing {
                    vertex: 0,
                    part: 1,
                    blocks: vec![vec![(0, End::Lo)]],
                },
                VertexGluing {
                    vertex: 1,
                    part: 1,
                    blocks: vec![vec![(0, End::Hi)]],
                },
            ],
        )
        .unwrap();
        let pw = whole.realize(&[vec![1.0]]).unwrap();
        assert!(partition_distance(&p1, &pw).is_infinite());
    }

    #[test]
    fn distance_on_a_loop_uses_the_reversal_symmetry() {
        let g = arc(corpus::cycle_graph(&[1.0]));
        let c = ConfigClass::new(
            g.clone(),
            2,
            vec![vec![1, 2]],
            vec![
                VertexGluing {
                    vertex: 0,
                    part: 1,
                    blocks: vec![vec![(0, End::Lo)]],
                },
                VertexGluing {
                    vertex: 0,
                    part: 2,
                    blocks: vec![vec![(0, End::Hi)]],
                },
            ],
        )
        .unwrap();
        let p1 = c.realize(&[vec![0.4, 0.6]]).unwrap();
        let p2 = c.realize(&[vec![0.6, 0.4]]).unwrap();
        // Reversing the loop maps the cut at 0.4 onto the cut at 0.6.
        assert!(partition_distance(&p1, &p2).abs() < 1e-12);
    }

    #[test]
    fn coarse_fast_id_matches_general_search() {
        let g = arc(corpus::pumpkin_with_legs());
        for class in [pumpkin_split_class(&g), pumpkin_cut_through_class(&g)] {
            if class.is_coarse() {
                let fast = canonical_id_coarse(&g, class.k(), &class.labels, &class.gluings);
                assert_eq!(&fast, class.id());
            }
        }
        // A coarse class with cuts on bundle edges.
        let c = ConfigClass::new(
            g.clone(),
            3,
            vec![
                vec![1],
                vec![2],
                vec![2, 3],
                vec![3],
                vec![3],
                vec![1, 3],
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
                    blocks: vec![vec![(0, End::Hi), (5, End::Lo)]],
                },
                VertexGluing {
                    vertex: 2,
                    part: 2,
                    blocks: vec![vec![(1, End::Hi), (2, End::Lo)]],
                },
                VertexGluing {
                    vertex: 2,
                    part: 3,
                    blocks: vec![vec![(3, End::Lo), (4, End::Lo)]],
                },
                VertexGluing {
                    vertex: 3,
                    part: 3,
                    blocks: vec![vec![(2, End::Hi), (3, End::Hi), (4, End::Hi), (5, End::Hi)]],
                },
            ],
        )
        .unwrap();
        let fast = canonical_id_coarse(&g, c.k(), &c.labels, &c.gluings);
        assert_eq!(&fast, c.id());
    }
}
