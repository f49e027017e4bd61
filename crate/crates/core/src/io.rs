//! File formats: opinion objects, graph documents, assessment streams, trace
//! lines, plot CSV and the assessor input records.
//!
//! Opinions are JSON objects with keys `b, d, u, a`, or with evidence keys
//! `r, s, W, a` (`W` may be omitted and then defaults to the configured prior
//! weight). Streams and traces are line-delimited JSON.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::engine::{AssessmentRecord, InferenceTrace, NodeProvenance};
use crate::graph::{AssessmentGraph, DependencyTable, EdgeKind, GraphError, NodeKind, OVERALL};
use crate::opinion::{BinomialOpinion, Evidence, OpinionError, DEFAULT_PRIOR_WEIGHT};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl IoError {
    fn from_json(err: serde_json::Error, line_offset: usize) -> Self {
        IoError::Syntax {
            line: err.line() + line_offset,
            column: err.column(),
            message: err.to_string(),
        }
    }
}

// -- opinions -----------------------------------------------------------------

/// Raw opinion object as written in files.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpinionRepr {
    pub b: Option<f64>,
    pub d: Option<f64>,
    pub u: Option<f64>,
    pub a: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    #[serde(rename = "W")]
    pub w: Option<f64>,
}

impl OpinionRepr {
    pub fn resolve(&self, default_prior_weight: f64) -> Result<BinomialOpinion, String> {
        let belief_keys = self.b.is_some() || self.d.is_some() || self.u.is_some();
        let evidence_keys = self.r.is_some() || self.s.is_some() || self.w.is_some();
        let a = self.a.ok_or("opinion lacks base rate `a`")?;
        let check = |r: Result<BinomialOpinion, OpinionError>| r.map_err(|e| e.to_string());
        match (belief_keys, evidence_keys) {
            (true, false) => match (self.b, self.d, self.u) {
                (Some(b), Some(d), Some(u)) => check(BinomialOpinion::new(b, d, u, a)),
                _ => Err("opinion needs all of `b`, `d`, `u`".into()),
            },
            (false, true) => match (self.r, self.s) {
                (Some(r), Some(s)) => {
                    let ev =
                        Evidence::new(r, s, self.w.unwrap_or(default_prior_weight), a).map_err(|e| e.to_string())?;
                    Ok(BinomialOpinion::from_evidence(&ev))
                }
                _ => Err("evidence opinion needs both `r` and `s`".into()),
            },
            (true, true) => Err("opinion mixes belief keys (b, d, u) with evidence keys (r, s, W)".into()),
            (false, false) => Err("opinion needs keys b, d, u, a or r, s, W, a".into()),
        }
    }
}

impl Serialize for BinomialOpinion {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out {
            b: f64,
            d: f64,
            u: f64,
            a: f64,
        }
        Out {
            b: self.b(),
            d: self.d(),
            u: self.u(),
            a: self.a(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BinomialOpinion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        OpinionRepr::deserialize(deserializer)?
            .resolve(DEFAULT_PRIOR_WEIGHT)
            .map_err(D::Error::custom)
    }
}

// -- graph documents ----------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDecl {
    pub name: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDecl {
    pub parents: Vec<String>,
    pub rows: Vec<BinomialOpinion>,
}

/// Graph definition file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub nodes: Vec<NodeDecl>,
    #[serde(default)]
    pub dependencies: Vec<(String, String)>,
    #[serde(default)]
    pub functional_trust: Vec<(String, String)>,
    #[serde(default)]
    pub referral_trust: BTreeMap<String, BinomialOpinion>,
    #[serde(default)]
    pub conditional_tables: BTreeMap<String, TableDecl>,
    #[serde(default)]
    pub defaults: BTreeMap<String, BinomialOpinion>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] IoError),
    #[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<crate::graph::Violation>),
}

impl GraphDocument {
    pub fn from_json(text: &str) -> Result<Self, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::from_json(e, 0))
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph documents always serialize");
        s.push('\n');
        s
    }

    /// Assembles the declared content without checks; see
    /// [`AssessmentGraph::validate`].
    pub fn build(&self) -> AssessmentGraph {
        let mut g = AssessmentGraph::new();
        for n in &self.nodes {
            g.push_node_unchecked(&n.name, n.kind);
        }
        for (from, to) in &self.dependencies {
            g.push_edge_unchecked(EdgeKind::Dependency, from, to);
        }
        for (from, to) in &self.functional_trust {
            if from == OVERALL && self.defaults.contains_key(to) {
                continue;
            }
            g.push_edge_unchecked(EdgeKind::FunctionalTrust, from, to);
        }
        for (am, trust) in &self.referral_trust {
            g.set_referral_unchecked(am, *trust);
        }
        for (node, table) in &self.conditional_tables {
            g.set_table_unchecked(node, DependencyTable::new(table.parents.clone(), table.rows.clone()));
        }
        for (node, opinion) in &self.defaults {
            g.set_default_unchecked(node, *opinion);
        }
        g
    }

    pub fn from_graph(g: &AssessmentGraph) -> Self {
        let pairs = |kind| {
            g.edges()
                .iter()
                .filter(|e| e.kind == kind)
                .map(|e| (e.from.clone(), e.to.clone()))
                .collect()
        };
        Self {
            nodes: g
                .nodes()
                .iter()
                .map(|n| NodeDecl {
                    name: n.name.clone(),
                    kind: n.kind,
                })
                .collect(),
            dependencies: pairs(EdgeKind::Dependency),
            functional_trust: pairs(EdgeKind::FunctionalTrust),
            referral_trust: g.referral_trusts().clone(),
            conditional_tables: g
                .tables()
                .iter()
                .map(|(n, t)| {
                    (
                        n.clone(),
                        TableDecl {
                            parents: t.parents.clone(),
                            rows: t.rows.clone(),
                        },
                    )
                })
                .collect(),
            defaults: g.expert_defaults().clone(),
        }
    }
}

/// Parses, assembles and finalizes a graph document.
pub fn load_graph(text: &str) -> Result<AssessmentGraph, LoadError> {
    let mut g = GraphDocument::from_json(text)?.build();
    match g.finalize() {
        Ok(()) => Ok(g),
        Err(GraphError::Invalid(v)) => Err(LoadError::Invalid(v)),
        Err(other) => unreachable!("fresh graph cannot fail with {other}"),
    }
}

// -- assessment streams -------------------------------------------------------

#[derive(Serialize)]
struct RecordOut<'a> {
    t: f64,
    source: &'a str,
    target: &'a str,
    b: f64,
    d: f64,
    u: f64,
    a: f64,
}

pub fn record_to_json(r: &AssessmentRecord) -> String {
    let o = &r.opinion;
    serde_json::to_string(&RecordOut {
        t: r.t,
        source: &r.source,
        target: &r.target,
        b: o.b(),
        d: o.d(),
        u: o.u(),
        a: o.a(),
    })
    .expect("records always serialize")
}

#[derive(Deserialize)]
struct RecordIn {
    t: f64,
    source: String,
    target: String,
    #[serde(flatten)]
    opinion: BTreeMap<String, serde_json::Value>,
}

/// Parses one stream line `{t, source, target, <opinion keys>}`.
pub fn parse_record(line: &str, line_no: usize, prior_weight: f64) -> Result<AssessmentRecord, IoError> {
    let raw: RecordIn = serde_json::from_str(line).map_err(|e| IoError::from_json(e, line_no - 1))?;
    let opinion_obj = serde_json::Value::Object(raw.opinion.into_iter().collect());
    let repr: OpinionRepr = serde_json::from_value(opinion_obj).map_err(|e| IoError::Record {
        line: line_no,
        message: e.to_string(),
    })?;
    let opinion = repr
        .resolve(prior_weight)
        .map_err(|message| IoError::Record { line: line_no, message })?;
    Ok(AssessmentRecord {
        t: raw.t,
        source: raw.source,
        target: raw.target,
        opinion,
    })
}

/// Reads a JSONL stream, skipping blank lines. Returns each record with its
/// 1-based line number.
pub fn read_records<R: BufRead>(reader: R, prior_weight: f64) -> Result<Vec<(usize, AssessmentRecord)>, IoError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 1, parse_record(&line, i + 1, prior_weight)?));
    }
    Ok(out)
}

pub fn write_records<W: Write>(mut w: W, records: &[AssessmentRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(w, "{}", record_to_json(r))?;
    }
    Ok(())
}

// -- traces -------------------------------------------------------------------

#[derive(Serialize)]
struct AssessorOut<'a> {
    source: &'a str,
    statement: &'a BinomialOpinion,
    trust: &'a BinomialOpinion,
    discounted: &'a BinomialOpinion,
}

#[derive(Serialize)]
struct ProvenanceOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    dependency: Option<&'a BinomialOpinion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    referral: Option<&'a BinomialOpinion>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    assessors: Vec<AssessorOut<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expert: Option<&'a BinomialOpinion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fallback: Option<&'a BinomialOpinion>,
}

impl<'a> From<&'a NodeProvenance> for ProvenanceOut<'a> {
    fn from(p: &'a NodeProvenance) -> Self {
        Self {
            dependency: p.dependency.as_ref(),
            referral: p.referral.as_ref(),
            assessors: p
                .assessors
                .iter()
                .map(|a| AssessorOut {
                    source: &a.source,
                    statement: &a.statement,
                    trust: &a.trust,
                    discounted: &a.discounted,
                })
                .collect(),
            expert: p.expert.as_ref(),
            fallback: p.fallback.as_ref(),
        }
    }
}

#[derive(Serialize)]
struct TraceOut<'a> {
    t: f64,
    nodes: &'a BTreeMap<String, BinomialOpinion>,
    overall: &'a BinomialOpinion,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<BTreeMap<&'a str, ProvenanceOut<'a>>>,
}

/// One trace line: `{t, nodes, overall[, provenance]}` with sorted node keys.
pub fn trace_to_json(trace: &InferenceTrace, with_provenance: bool) -> String {
    let provenance = with_provenance.then(|| {
        trace
            .provenance
            .iter()
            .map(|(n, p)| (n.as_str(), ProvenanceOut::from(p)))
            .collect()
    });
    serde_json::to_string(&TraceOut {
        t: trace.t,
        nodes: &trace.resolved,
        overall: trace.overall(),
        provenance,
    })
    .expect("traces always serialize")
}

pub fn write_traces<W: Write>(mut w: W, traces: &[InferenceTrace], with_provenance: bool) -> std::io::Result<()> {
    for t in traces {
        writeln!(w, "{}", trace_to_json(t, with_provenance))?;
    }
    Ok(())
}

/// Plot data: one row per `(timestamp, node)` with columns `t, node, b, d, u, P`.
pub fn write_plot_csv<W: Write>(w: W, traces: &[InferenceTrace]) -> Result<(), IoError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["t", "node", "b", "d", "u", "P"])?;
    for trace in traces {
        for (node, o) in &trace.resolved {
            out.serialize((trace.t, node, o.b(), o.d(), o.u(), o.projected_probability()))?;
        }
    }
    out.flush()?;
    Ok(())
}

// -- assessor input records -------------------------------------------------

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerRecord {
    pub t: f64,
    pub n: usize,
    #[serde(default)]
    pub nonfunctional_indices: Vec<usize>,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvidenceRecord {
    pub t: f64,
    pub r: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowRecord {
    pub t: f64,
    pub step: BinomialOpinion,
    pub reference: BinomialOpinion,
}

/// Reads line-delimited JSON values of type `T`, skipping blank lines.
pub fn read_jsonl<T: for<'de> Deserialize<'de>, R: BufRead>(reader: R) -> Result<Vec<(usize, T)>, IoError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| IoError::from_json(e, i))?;
        out.push((i + 1, value));
    }
    Ok(out)
}
