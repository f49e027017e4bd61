//! Overall-assessment inference over a finalized assessment graph.
//!
//! For every node `x` the engine combines, with cumulative fusion:
//! the opinion deduced from `x`'s dependency parents (joint multiplication
//! followed by deduction through `x`'s conditional table), and the
//! trust-discounted statements of every assessment module assessing `x`.
//! `A`'s expert opinion about `x`, when declared, joins the assessor terms
//! undiscounted. Nodes without any term fall back to the configured default.
//! An assessment module's own opinion (its effective referral trust) is
//! computed the same way, with `A`'s configured referral trust as one term.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::graph::{AssessmentGraph, NodeKind, OVERALL, SINK};
use crate::operators::{cumulative_fuse, deduce, multiply_joint, trust_discount, OperatorError};
use crate::opinion::{BinomialOpinion, DEFAULT_BASE_RATE, DEFAULT_PRIOR_WEIGHT};

/// Default staleness timeout, in stream time units.
pub const DEFAULT_STALENESS_TIMEOUT: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("graph is not finalized")]
    NotFinalized,
    #[error("no assessment edge `{from}` -> `{to}` in the graph")]
    UnknownEdge { from: String, to: String },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("record {index}: time {t} precedes previous time {previous}")]
    Unsorted { index: usize, t: f64, previous: f64 },
    #[error("record {index}: time is not finite")]
    NonFiniteTime { index: usize },
    #[error("record {index}: {source}")]
    Record { index: usize, source: Box<EngineError> },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceConfig {
    /// Opinion used for a node with no available term and for an expired
    /// assessment.
    pub missing_default: BinomialOpinion,
    pub per_node_defaults: BTreeMap<String, BinomialOpinion>,
    pub staleness_timeout: f64,
    pub prior_weight: f64,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self {
            missing_default: BinomialOpinion::vacuous(DEFAULT_BASE_RATE),
            per_node_defaults: BTreeMap::new(),
            staleness_timeout: DEFAULT_STALENESS_TIMEOUT,
            prior_weight: DEFAULT_PRIOR_WEIGHT,
        }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.staleness_timeout.is_nan() || self.staleness_timeout <= 0.0 {
            return Err(EngineError::InvalidConfig("staleness timeout must be positive"));
        }
        if !(self.prior_weight > 0.0 && self.prior_weight.is_finite()) {
            return Err(EngineError::InvalidConfig("prior weight must be positive"));
        }
        Ok(())
    }

    pub fn default_for(&self, node: &str) -> BinomialOpinion {
        self.per_node_defaults
            .get(node)
            .copied()
            .unwrap_or(self.missing_default)
    }
}

/// Live assessment opinions at one instant, keyed by `(source, target)`.
///
/// Keys are functional-trust edges of assessment modules, plus `A`-sourced
/// keys that override `A`'s configured referral trust in an assessment
/// module or `A`'s declared expert opinion about a node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssessmentSnapshot {
    pub t: f64,
    pub opinions: BTreeMap<(String, String), BinomialOpinion>,
}

impl AssessmentSnapshot {
    pub fn new(t: f64) -> Self {
        Self {
            t,
            opinions: BTreeMap::new(),
        }
    }

    pub fn with(mut self, source: &str, target: &str, opinion: BinomialOpinion) -> Self {
        self.insert(source, target, opinion);
        self
    }

    pub fn insert(&mut self, source: &str, target: &str, opinion: BinomialOpinion) {
        self.opinions.insert((source.to_string(), target.to_string()), opinion);
    }

    pub fn get(&self, source: &str, target: &str) -> Option<&BinomialOpinion> {
        // BTreeMap<(String, String), _> cannot be probed with borrowed pairs
        self.opinions
            .range((source.to_string(), target.to_string())..)
            .next()
            .filter(|((s, t), _)| s == source && t == target)
            .map(|(_, o)| o)
    }
}

/// Checks that `source -> target` is an edge a snapshot may carry.
pub fn check_assessment_edge(graph: &AssessmentGraph, source: &str, target: &str) -> Result<(), EngineError> {
    let unknown = || EngineError::UnknownEdge {
        from: source.to_string(),
        to: target.to_string(),
    };
    if source == OVERALL {
        return match graph.kind(target) {
            Some(NodeKind::Assessment) => Ok(()),
            Some(_) if graph.expert_default(target).is_some() => Ok(()),
            _ => Err(unknown()),
        };
    }
    if graph.kind(source) == Some(NodeKind::Assessment) && graph.assessors(target).contains(&source) {
        Ok(())
    } else {
        Err(unknown())
    }
}

/// One discounted assessor term of a node.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessorTerm {
    pub source: String,
    pub statement: BinomialOpinion,
    pub trust: BinomialOpinion,
    pub discounted: BinomialOpinion,
}

/// How a node's opinion was assembled.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NodeProvenance {
    /// Opinion deduced from the dependency parents.
    pub dependency: Option<BinomialOpinion>,
    /// `A`'s referral trust (assessment modules only).
    pub referral: Option<BinomialOpinion>,
    pub assessors: Vec<AssessorTerm>,
    /// `A`'s expert opinion, fused undiscounted.
    pub expert: Option<BinomialOpinion>,
    /// Set when no term was available and the configured default was used.
    pub fallback: Option<BinomialOpinion>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceTrace {
    pub t: f64,
    pub resolved: BTreeMap<String, BinomialOpinion>,
    pub provenance: BTreeMap<String, NodeProvenance>,
}

impl InferenceTrace {
    /// `A`'s opinion about the sink: the overall assessment.
    pub fn overall(&self) -> &BinomialOpinion {
        &self.resolved[SINK]
    }
}

/// Per-evaluation cache of resolved nodes.
#[derive(Debug, Default)]
pub struct Memo {
    enabled: bool,
    values: HashMap<String, (BinomialOpinion, NodeProvenance)>,
}

impl Memo {
    pub fn new() -> Self {
        Self {
            enabled: true,
            values: HashMap::new(),
        }
    }

    /// A memo that never stores anything; every lookup recomputes.
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            values: HashMap::new(),
        }
    }
}

struct Ctx<'a> {
    graph: &'a AssessmentGraph,
    snapshot: &'a AssessmentSnapshot,
    config: &'a InferenceConfig,
}

/// Resolves `A`'s opinion about node `x`.
pub fn resolve_node(
    graph: &AssessmentGraph,
    snapshot: &AssessmentSnapshot,
    config: &InferenceConfig,
    x: &str,
    memo: &mut Memo,
) -> Result<BinomialOpinion, EngineError> {
    if !graph.is_finalized() {
        return Err(EngineError::NotFinalized);
    }
    let ctx = Ctx {
        graph,
        snapshot,
        config,
    };
    Ok(resolve(&ctx, x, memo)?.0)
}

fn resolve(ctx: &Ctx<'_>, x: &str, memo: &mut Memo) -> Result<(BinomialOpinion, NodeProvenance), EngineError> {
    if let Some(hit) = memo.values.get(x) {
        return Ok(hit.clone());
    }
    let kind = ctx
        .graph
        .kind(x)
        .ok_or_else(|| EngineError::UnknownNode(x.to_string()))?;
    let result = if kind == NodeKind::OverallAssessment {
        // A fully trusts its own statements
        let full = BinomialOpinion::full_belief(DEFAULT_BASE_RATE);
        (
            full,
            NodeProvenance {
                referral: Some(full),
                ..Default::default()
            },
        )
    } else {
        combine(ctx, x, kind, memo)?
    };
    if memo.enabled {
        memo.values.insert(x.to_string(), result.clone());
    }
    Ok(result)
}

fn combine(
    ctx: &Ctx<'_>,
    x: &str,
    kind: NodeKind,
    memo: &mut Memo,
) -> Result<(BinomialOpinion, NodeProvenance), EngineError> {
    let mut prov = NodeProvenance::default();

    if let Some(table) = ctx.graph.table(x).filter(|t| !t.parents.is_empty()) {
        let parents = table
            .parents
            .iter()
            .map(|p| resolve(ctx, p, memo).map(|r| r.0))
            .collect::<Result<Vec<_>, _>>()?;
        let joint = multiply_joint(&parents)?;
        let conditionals = table
            .to_conditional_table()
            .ok_or(OperatorError::InvalidTableSize(table.rows.len()))?;
        prov.dependency = Some(deduce(&joint, &conditionals)?);
    }

    if kind == NodeKind::Assessment {
        prov.referral = ctx
            .snapshot
            .get(OVERALL, x)
            .or_else(|| ctx.graph.referral_trust(x))
            .copied();
    }

    for source in ctx.graph.assessors(x) {
        let Some(statement) = ctx.snapshot.get(source, x).copied() else {
            continue;
        };
        let trust = resolve(ctx, source, memo)?.0;
        let discounted = trust_discount(&trust, &statement);
        prov.assessors.push(AssessorTerm {
            source: source.to_string(),
            statement,
            trust,
            discounted,
        });
    }

    if matches!(kind, NodeKind::Functional | NodeKind::DataExchange) {
        prov.expert = ctx
            .snapshot
            .get(OVERALL, x)
            .or_else(|| ctx.graph.expert_default(x))
            .copied();
    }

    // dependency ⊕ (referral ⊕ assessor_1 ⊕ ... ⊕ expert)
    let trust_terms = prov
        .referral
        .iter()
        .chain(prov.assessors.iter().map(|t| &t.discounted))
        .chain(prov.expert.iter());
    let assessed = trust_terms.fold(None, |acc: Option<BinomialOpinion>, term| {
        Some(match acc {
            None => *term,
            Some(acc) => cumulative_fuse(&acc, term),
        })
    });
    let opinion = match (prov.dependency, assessed) {
        (Some(dep), Some(rest)) => cumulative_fuse(&dep, &rest),
        (Some(dep), None) => dep,
        (None, Some(rest)) => rest,
        (None, None) => {
            let fallback = ctx.config.default_for(x);
            prov.fallback = Some(fallback);
            fallback
        }
    };
    Ok((opinion, prov))
}

/// Resolves every node of the graph for one snapshot.
pub fn evaluate_snapshot(
    graph: &AssessmentGraph,
    snapshot: &AssessmentSnapshot,
    config: &InferenceConfig,
) -> Result<InferenceTrace, EngineError> {
    if !graph.is_finalized() {
        return Err(EngineError::NotFinalized);
    }
    for (source, target) in snapshot.opinions.keys() {
        check_assessment_edge(graph, source, target)?;
    }
    let order = graph.topological_order().map_err(|_| EngineError::NotFinalized)?;
    let ctx = Ctx {
        graph,
        snapshot,
        config,
    };
    let mut memo = Memo::new();
    let mut resolved = BTreeMap::new();
    let mut provenance = BTreeMap::new();
    for node in order {
        let (opinion, prov) = resolve(&ctx, &node, &mut memo)?;
        resolved.insert(node.clone(), opinion);
        provenance.insert(node, prov);
    }
    Ok(InferenceTrace {
        t: snapshot.t,
        resolved,
        provenance,
    })
}

/// One assessment opinion observed at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessmentRecord {
    pub t: f64,
    pub source: String,
    pub target: String,
    pub opinion: BinomialOpinion,
}

impl AssessmentRecord {
    pub fn new(t: f64, source: &str, target: &str, opinion: BinomialOpinion) -> Self {
        Self {
            t,
            source: source.to_string(),
            target: target.to_string(),
            opinion,
        }
    }
}

/// Builds last-value-hold snapshots from a time-ordered record stream.
///
/// An assessment older than the staleness timeout is replaced by the
/// missing-assessment default; an expired `A`-sourced override is dropped so
/// the graph's configured opinion applies again.
pub fn build_snapshots(
    graph: &AssessmentGraph,
    records: &[AssessmentRecord],
    config: &InferenceConfig,
) -> Result<Vec<AssessmentSnapshot>, EngineError> {
    config.validate()?;
    let mut previous = f64::NEG_INFINITY;
    for (index, r) in records.iter().enumerate() {
        if !r.t.is_finite() {
            return Err(EngineError::NonFiniteTime { index });
        }
        if r.t < previous {
            return Err(EngineError::Unsorted {
                index,
                t: r.t,
                previous,
            });
        }
        previous = r.t;
        check_assessment_edge(graph, &r.source, &r.target).map_err(|e| EngineError::Record {
            index,
            source: Box::new(e),
        })?;
    }

    let mut held: BTreeMap<(String, String), (f64, BinomialOpinion)> = BTreeMap::new();
    let mut snapshots = Vec::new();
    let mut i = 0;
    while i < records.len() {
        let t = records[i].t;
        while i < records.len() && records[i].t == t {
            let r = &records[i];
            held.insert((r.source.clone(), r.target.clone()), (r.t, r.opinion));
            i += 1;
        }
        let mut snapshot = AssessmentSnapshot::new(t);
        for ((source, target), (seen, opinion)) in &held {
            if t - seen <= config.staleness_timeout {
                snapshot.insert(source, target, *opinion);
            } else if source != OVERALL {
                snapshot.insert(source, target, config.default_for(target));
            }
        }
        snapshots.push(snapshot);
    }
    Ok(snapshots)
}

/// Evaluates one trace per distinct timestamp of the stream.
pub fn evaluate_stream(
    graph: &AssessmentGraph,
    records: &[AssessmentRecord],
    config: &InferenceConfig,
) -> Result<Vec<InferenceTrace>, EngineError> {
    if !graph.is_finalized() {
        return Err(EngineError::NotFinalized);
    }
    build_snapshots(graph, records, config)?
        .iter()
        .map(|s| evaluate_snapshot(graph, s, config))
        .collect()
}
