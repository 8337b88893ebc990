//! Graph and subgraph file formats plus artifact serialization.
//!
//! Graphs are JSON documents with a vertex id list and an edge list
//! `{id, u, v, length}`. Subgraph specs spell out every segment interval
//! and every descendant block explicitly, because the same point set can
//! carry different gluings at a cut vertex. Serializers produce JSON
//! values for whole results and CSV text with floats at 17 significant
//! digits; CSV column order is fixed by the writers here.

use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::cheeger::{CheegerResult, H1Result};
use crate::class::{ClassId, Partition};
use crate::graph::{End, MetricGraph, UnionFind};
use crate::robinopt::{LimitStudy, SpectralPartitionResult};
use crate::subgraph::{BoundaryMode, Descendant, Segment, Site, Subgraph};
use crate::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    id: String,
    u: String,
    v: String,
    length: f64,
}

/// Parses a graph document, reporting malformed fields with the position
/// information of the JSON parser and semantic faults with the offending
/// id and field. A disconnected graph is rejected with its components
/// listed by vertex id.
pub fn parse_graph_str(text: &str) -> Result<MetricGraph> {
    let file: GraphFile = serde_json::from_str(text)?;
    let n = file.vertices.len();
    if n == 0 {
        return Err(Error::Format("vertex list is empty".into()));
    }
    if file.edges.is_empty() {
        return Err(Error::Format("edge list is empty".into()));
    }
    {
        let mut seen = file.vertices.clone();
        seen.sort();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Format(format!("duplicate vertex id {:?}", w[0])));
        }
        let mut ids: Vec<&str> = file.edges.iter().map(|e| e.id.as_str()).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Format(format!(
                "edge {:?}: field \"id\" duplicates another edge",
                w[0]
            )));
        }
    }
    let index_of = |id: &str| file.vertices.iter().position(|v| v == id);
    let mut edges = Vec::with_capacity(file.edges.len());
    for rec in &file.edges {
        let resolve = |field: &str, id: &str| {
            index_of(id).ok_or_else(|| {
                Error::Format(format!(
                    "edge {:?}: field {field:?} references unknown vertex {id:?}",
                    rec.id
                ))
            })
        };
        let u = resolve("u", &rec.u)?;
        let v = resolve("v", &rec.v)?;
        if !(rec.length.is_finite() && rec.length > 0.0) {
            return Err(Error::Format(format!(
                "edge {:?}: field \"length\" must be positive and finite, got {}",
                rec.id, rec.length
            )));
        }
        edges.push((rec.id.clone(), u, v, rec.length));
    }
    {
        let mut uf = UnionFind::new(n);
        for &(_, u, v, _) in &edges {
            uf.union(u, v);
        }
        let mut components: Vec<Vec<&str>> = Vec::new();
        let mut root_of: Vec<Option<usize>> = vec![None; n];
        for v in 0..n {
            let r = uf.find(v);
            let slot = *root_of[r].get_or_insert_with(|| {
                components.push(Vec::new());
                components.len() - 1
            });
            components[slot].push(&file.vertices[v]);
        }
        if components.len() > 1 {
            let listed: Vec<String> = components
                .iter()
                .map(|c| format!("{{{}}}", c.join(", ")))
                .collect();
            return Err(Error::Format(format!(
                "graph is not connected: components {}",
                listed.join(" ")
            )));
        }
    }
    MetricGraph::new(file.vertices, edges)
}

/// Reads and parses a graph file; errors carry the path.
pub fn parse_graph_file(path: &Path) -> Result<MetricGraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    parse_graph_str(&text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SubgraphFile {
    segments: Vec<SegmentRecord>,
    descendants: Vec<DescendantRecord>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRecord {
    edge: String,
    lo: f64,
    hi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DescendantRecord {
    /// Vertex site, by vertex id.
    #[serde(default)]
    at: Option<String>,
    /// Interior site, by edge id and offset.
    #[serde(default)]
    on: Option<EdgePointRecord>,
    ends: Vec<(usize, EndTag)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgePointRecord {
    edge: String,
    offset: f64,
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum EndTag {
    Lo,
    Hi,
}

impl From<EndTag> for End {
    fn from(t: EndTag) -> End {
        match t {
            EndTag::Lo => End::Lo,
            EndTag::Hi => End::Hi,
        }
    }
}

fn edge_index(g: &MetricGraph, id: &str) -> Result<usize> {
    g.edges()
        .iter()
        .position(|e| e.name == id)
        .ok_or_else(|| Error::Format(format!("unknown edge id {id:?}")))
}

/// Parses a subgraph spec against its parent graph. Gluing is never
/// implicit: every descendant block must be listed, and the structural
/// validation (ownership of every segment end, connectivity) is done by
/// the subgraph constructor.
pub fn parse_subgraph_str(parent: &Arc<MetricGraph>, text: &str) -> Result<Subgraph> {
    let file: SubgraphFile = serde_json::from_str(text)?;
    let mut segments = Vec::with_capacity(file.segments.len());
    for rec in &file.segments {
        segments.push(Segment {
            edge: edge_index(parent, &rec.edge)?,
            lo: rec.lo,
            hi: rec.hi,
        });
    }
    let mut descendants = Vec::with_capacity(file.descendants.len());
    for (i, rec) in file.descendants.iter().enumerate() {
        let site = match (&rec.at, &rec.on) {
            (Some(v), None) => {
                let ix = parent
                    .vertex_names()
                    .iter()
                    .position(|name| name == v)
                    .ok_or_else(|| {
                        Error::Format(format!(
                            "descendant {i}: field \"at\" references unknown vertex {v:?}"
                        ))
                    })?;
                Site::Vertex(ix)
            }
            (None, Some(p)) => Site::EdgePoint(edge_index(parent, &p.edge)?, p.offset),
            _ => {
                return Err(Error::Format(format!(
                    "descendant {i}: exactly one of \"at\" and \"on\" is required"
                )))
            }
        };
        let ends = rec
            .ends
            .iter()
            .map(|&(s, t)| {
                if s >= segments.len() {
                    Err(Error::Format(format!(
                        "descendant {i}: field \"ends\" references segment {s} but there are {}",
                        segments.len()
                    )))
                } else {
                    Ok((s, End::from(t)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        descendants.push(Descendant { site, ends });
    }
    Subgraph::new(Arc::clone(parent), segments, descendants)
}

/// Reads and parses a subgraph spec file; errors carry the path.
pub fn parse_subgraph_file(parent: &Arc<MetricGraph>, path: &Path) -> Result<Subgraph> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    parse_subgraph_str(parent, &text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// 17 significant digits, round-trip exact for `f64`; infinities print as
/// `inf`, which the CSV readers downstream accept.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number, with non-finite values downgraded to strings since JSON
/// has no literal for them.
fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

fn end_tag(end: End) -> &'static str {
    match end {
        End::Lo => "lo",
        End::Hi => "hi",
    }
}

fn site_value(g: &MetricGraph, site: Site) -> Value {
    match site {
        Site::Vertex(v) => json!({ "at": g.vertex_name(v) }),
        Site::EdgePoint(e, x) => json!({ "on": { "edge": g.edge(e).name, "offset": x } }),
    }
}

/// Serializes a subgraph with explicit segment intervals and descendant
/// blocks, mirroring the spec-file format plus derived boundary data.
pub fn subgraph_value(o: &Subgraph) -> Value {
    let g = o.parent();
    let segments: Vec<Value> = o
        .segments()
        .iter()
        .map(|s| json!({ "edge": g.edge(s.edge).name, "lo": s.lo, "hi": s.hi }))
        .collect();
    let descendants: Vec<Value> = o
        .descendants()
        .iter()
        .enumerate()
        .map(|(d, desc)| {
            let ends: Vec<Value> = desc
                .ends
                .iter()
                .map(|&(s, end)| json!([s, end_tag(end)]))
                .collect();
            let mut v = site_value(g, desc.site);
            let obj = v.as_object_mut().unwrap();
            obj.insert("ends".into(), json!(ends));
            obj.insert("boundary".into(), json!(o.is_boundary(d)));
            if o.is_boundary(d) {
                obj.insert("eff_deg".into(), json!(o.eff_deg(d)));
            }
            v
        })
        .collect();
    json!({
        "total_length": num(o.total_length()),
        "segments": segments,
        "descendants": descendants,
    })
}

pub fn partition_value(p: &Partition) -> Value {
    let g = p.class().parent();
    let cuts: Vec<Value> = p
        .cut_positions()
        .iter()
        .enumerate()
        .map(|(e, xs)| {
            json!({
                "edge": g.edge(e).name,
                "positions": xs.iter().map(|&x| num(x)).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "k": p.k(),
        "class_id": p.class().id().to_hex(),
        "exhaustive": p.class().is_exhaustive(),
        "cuts": cuts,
        "parts": p.parts().iter().map(subgraph_value).collect::<Vec<_>>(),
    })
}

fn mode_tag(mode: BoundaryMode) -> &'static str {
    match mode {
        BoundaryMode::EffectiveDegree => "effdeg",
        BoundaryMode::Count => "count",
    }
}

fn per_class_value(rows: &[(ClassId, f64)]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|(id, v)| json!({ "class_id": id.to_hex(), "value": num(*v) }))
        .collect();
    json!(rows)
}

pub fn cheeger_value(r: &CheegerResult) -> Value {
    json!({
        "value": num(r.value),
        "mode": mode_tag(r.mode),
        "p": r.p,
        "argmin": partition_value(&r.argmin),
        "per_class": per_class_value(&r.per_class),
        "cap_saturated": r.cap_saturated,
        "warnings": r.warnings,
    })
}

pub fn h1_value(r: &H1Result) -> Value {
    json!({
        "value": num(r.value),
        "calibrable": r.calibrable,
        "argmin": subgraph_value(&r.argmin),
        "warnings": r.warnings,
    })
}

pub fn partition_result_value(r: &SpectralPartitionResult) -> Value {
    json!({
        "alpha": r.alpha,
        "value": num(r.value),
        "argmin": partition_value(&r.argmin),
        "per_class": per_class_value(&r.per_class),
        "diagnostics": {
            "evaluated": r.diagnostics.evaluated,
            "pruned": r.diagnostics.pruned,
            "infeasible": r.diagnostics.infeasible,
            "iterations": r.diagnostics.iterations,
            "stalled": r.diagnostics.stalled,
            "spread": num(r.diagnostics.spread),
        },
        "cap_saturated": r.cap_saturated,
        "warnings": r.warnings,
    })
}

pub fn limit_study_value(s: &LimitStudy) -> Value {
    let rows: Vec<Value> = s
        .rows
        .iter()
        .map(|row| {
            json!({
                "alpha": num(row.alpha),
                "Lambda": num(row.value),
                "Lambda_over_alpha": num(row.ratio),
                "class_id": row.class_id.to_hex(),
                "partition_distance": num(row.distance),
            })
        })
        .collect();
    json!({
        "direction": format!("{:?}", s.direction).to_lowercase(),
        "reference_value": num(s.reference_value),
        "reference_class": s.reference_class.to_hex(),
        "rows": rows,
        "warnings": s.warnings,
    })
}

/// Column order: `class_id,value`.
pub fn per_class_csv(rows: &[(ClassId, f64)]) -> String {
    let mut out = String::from("class_id,value\n");
    for (id, v) in rows {
        out.push_str(&format!("{},{}\n", id.to_hex(), fmt_float(*v)));
    }
    out
}

/// Column order: `alpha,Lambda,Lambda_over_alpha,class_id,partition_distance`.
pub fn study_csv(s: &LimitStudy) -> String {
    let mut out = String::from("alpha,Lambda,Lambda_over_alpha,class_id,partition_distance\n");
    for row in &s.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(row.alpha),
            fmt_float(row.value),
            fmt_float(row.ratio),
            row.class_id.to_hex(),
            fmt_float(row.distance)
        ));
    }
    out
}

/// Column order: `edge,offset,value`.
pub fn eigenfunction_csv(samples: &[(usize, f64, f64)]) -> String {
    let mut out = String::from("edge,offset,value\n");
    for &(e, x, v) in samples {
        out.push_str(&format!("{e},{},{}\n", fmt_float(x), fmt_float(v)));
    }
    out
}
