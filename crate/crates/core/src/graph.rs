//! The assessment graph: functional components, assessment modules (AMs), the
//! artificial overall-assessment node `A` and the sink `Z`, connected by
//! dependency, functional-trust and referral-trust edges.
//!
//! Builder methods reject invalid edits up front. Graphs assembled from a
//! document (see [`crate::io::GraphDocument`]) may hold arbitrary content;
//! [`AssessmentGraph::validate`] reports every violation found.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::ConditionalTable;
use crate::opinion::{BinomialOpinion, DEFAULT_BASE_RATE};

/// Name of the artificial overall-assessment node.
pub const OVERALL: &str = "A";
/// Name of the artificial sink node.
pub const SINK: &str = "Z";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Functional,
    Assessment,
    OverallAssessment,
    Sink,
    DataExchange,
}

impl NodeKind {
    /// Nodes that carry system data (members of the dependency graph proper).
    pub fn carries_data(self) -> bool {
        matches!(self, NodeKind::Functional | NodeKind::DataExchange | NodeKind::Sink)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Dependency,
    FunctionalTrust,
    ReferralTrust,
}

impl fmt::Display for EdgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeKind::Dependency => "dependency",
            EdgeKind::FunctionalTrust => "functional-trust",
            EdgeKind::ReferralTrust => "referral-trust",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub kind: EdgeKind,
    pub from: String,
    pub to: String,
}

/// Conditional opinions of a node given its dependency parents, with rows in
/// canonical state order over `parents`.
#[derive(Debug, Clone, PartialEq)]
pub struct DependencyTable {
    pub parents: Vec<String>,
    pub rows: Vec<BinomialOpinion>,
}

impl DependencyTable {
    pub fn new(parents: Vec<String>, rows: Vec<BinomialOpinion>) -> Self {
        Self { parents, rows }
    }

    /// AND-shaped table: `on` when every parent is functional, `off` otherwise.
    pub fn and_shaped(parents: &[&str], on: BinomialOpinion, off: BinomialOpinion) -> Self {
        let table = ConditionalTable::and_shaped(parents.len(), on, off);
        Self {
            parents: parents.iter().map(|p| p.to_string()).collect(),
            rows: table.conditionals().to_vec(),
        }
    }

    pub fn to_conditional_table(&self) -> Option<ConditionalTable> {
        ConditionalTable::new(self.rows.clone()).ok()
    }
}

/// An invariant violation reported by [`AssessmentGraph::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyName,
    DuplicateNode {
        name: String,
    },
    ReservedName {
        name: String,
        kind: NodeKind,
    },
    UnknownNode {
        name: String,
        referenced_by: String,
    },
    DependencyCycle {
        cycle: Vec<String>,
    },
    EvaluationCycle {
        cycle: Vec<String>,
    },
    ForbiddenDependency {
        from: String,
        to: String,
    },
    SelfAssessmentDependency {
        assessor: String,
        target: String,
    },
    TrustTaxonomy {
        kind: EdgeKind,
        from: String,
        to: String,
    },
    DuplicateEdge {
        kind: EdgeKind,
        from: String,
        to: String,
    },
    MissingConditionalTable {
        node: String,
    },
    TableParents {
        node: String,
        expected: Vec<String>,
        found: Vec<String>,
    },
    TableSize {
        node: String,
        expected: usize,
        found: usize,
    },
    MissingNode {
        name: String,
    },
    MissingSinkPath {
        node: String,
    },
    MissingReferralTrust {
        node: String,
    },
    MisplacedDefault {
        node: String,
    },
}

impl Violation {
    /// Stable machine-readable name.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::EmptyName => "empty-name",
            Violation::DuplicateNode { .. } => "duplicate-node",
            Violation::ReservedName { .. } => "reserved-name",
            Violation::UnknownNode { .. } => "unknown-node",
            Violation::DependencyCycle { .. } => "dependency-cycle",
            Violation::EvaluationCycle { .. } => "evaluation-cycle",
            Violation::ForbiddenDependency { .. } => "forbidden-dependency",
            Violation::SelfAssessmentDependency { .. } => "self-assessment-dependency",
            Violation::TrustTaxonomy { .. } => "trust-taxonomy",
            Violation::DuplicateEdge { .. } => "duplicate-edge",
            Violation::MissingConditionalTable { .. } => "missing-conditional-table",
            Violation::TableParents { .. } => "table-parents",
            Violation::TableSize { .. } => "table-size",
            Violation::MissingNode { .. } => "missing-node",
            Violation::MissingSinkPath { .. } => "missing-sink-path",
            Violation::MissingReferralTrust { .. } => "missing-referral-trust",
            Violation::MisplacedDefault { .. } => "misplaced-default",
        }
    }

    /// Node the violation is reported against; drives report ordering.
    pub fn anchor(&self) -> &str {
        match self {
            Violation::EmptyName => "",
            Violation::DuplicateNode { name }
            | Violation::ReservedName { name, .. }
            | Violation::UnknownNode { name, .. }
            | Violation::MissingNode { name } => name,
            Violation::DependencyCycle { cycle } | Violation::EvaluationCycle { cycle } => {
                cycle.first().map(String::as_str).unwrap_or("")
            }
            Violation::ForbiddenDependency { from, .. }
            | Violation::TrustTaxonomy { from, .. }
            | Violation::DuplicateEdge { from, .. } => from,
            Violation::SelfAssessmentDependency { assessor, .. } => assessor,
            Violation::MissingConditionalTable { node }
            | Violation::TableParents { node, .. }
            | Violation::TableSize { node, .. }
            | Violation::MissingSinkPath { node }
            | Violation::MissingReferralTrust { node }
            | Violation::MisplacedDefault { node } => node,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.code())?;
        match self {
            Violation::EmptyName => write!(f, "node with empty name"),
            Violation::DuplicateNode { name } => write!(f, "node `{name}` declared more than once"),
            Violation::ReservedName { name, kind } => {
                write!(
                    f,
                    "node `{name}` has kind {kind:?}; `A` and `Z` are reserved for the overall assessment and the sink"
                )
            }
            Violation::UnknownNode { name, referenced_by } => {
                write!(f, "unknown node `{name}` referenced by {referenced_by}")
            }
            Violation::DependencyCycle { cycle } => {
                write!(f, "dependency cycle {} -> {}", cycle.join(" -> "), cycle[0])
            }
            Violation::EvaluationCycle { cycle } => {
                write!(f, "dependency/assessment cycle {} -> {}", cycle.join(" -> "), cycle[0])
            }
            Violation::ForbiddenDependency { from, to } => {
                write!(f, "dependency `{from}` -> `{to}` not allowed for these node kinds")
            }
            Violation::SelfAssessmentDependency { assessor, target } => {
                write!(
                    f,
                    "assessment module `{assessor}` depends on the node `{target}` it assesses"
                )
            }
            Violation::TrustTaxonomy { kind, from, to } => {
                write!(f, "{kind} edge `{from}` -> `{to}` connects the wrong node kinds")
            }
            Violation::DuplicateEdge { kind, from, to } => {
                write!(f, "{kind} edge `{from}` -> `{to}` declared more than once")
            }
            Violation::MissingConditionalTable { node } => {
                write!(f, "node `{node}` has dependencies but no conditional table")
            }
            Violation::TableParents { node, expected, found } => write!(
                f,
                "conditional table of `{node}` lists parents [{}], dependencies are [{}]",
                found.join(", "),
                expected.join(", ")
            ),
            Violation::TableSize { node, expected, found } => {
                write!(f, "conditional table of `{node}` has {found} rows, needs {expected}")
            }
            Violation::MissingNode { name } => write!(f, "finalized graph lacks node `{name}`"),
            Violation::MissingSinkPath { node } => {
                write!(f, "functional node `{node}` has no dependency path to `{SINK}`")
            }
            Violation::MissingReferralTrust { node } => {
                write!(f, "assessment module `{node}` has no referral trust")
            }
            Violation::MisplacedDefault { node } => {
                write!(
                    f,
                    "expert opinion on `{node}` must target a functional or data-exchange node"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph is finalized")]
    Finalized,
    #[error("node name must not be empty")]
    EmptyName,
    #[error("node name `{0}` is reserved")]
    ReservedName(String),
    #[error("node `{0}` already exists")]
    DuplicateNode(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("edge would close the cycle {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("dependency `{from}` -> `{to}` not allowed for these node kinds")]
    ForbiddenDependency { from: String, to: String },
    #[error("assessment module `{assessor}` must not depend on the node `{target}` it assesses")]
    SelfAssessmentDependency { assessor: String, target: String },
    #[error("{kind} edge `{from}` -> `{to}` connects the wrong node kinds")]
    Taxonomy { kind: EdgeKind, from: String, to: String },
    #[error("{kind} edge `{from}` -> `{to}` already exists")]
    DuplicateEdge { kind: EdgeKind, from: String, to: String },
    #[error("node `{0}` has no outgoing dependencies")]
    NoChildren(String),
    #[error("node `{0}` is not a functional node")]
    NotFunctional(String),
    #[error("conditional table of `{node}` has {found} rows, needs {expected}")]
    TableSize {
        node: String,
        expected: usize,
        found: usize,
    },
    #[error("graph has {} violation(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
}

/// The two-part assessment graph.
#[derive(Debug, Clone, PartialEq)]
pub struct AssessmentGraph {
    nodes: Vec<Node>,
    index: BTreeMap<String, NodeKind>,
    edges: Vec<Edge>,
    tables: BTreeMap<String, DependencyTable>,
    referral_trust: BTreeMap<String, BinomialOpinion>,
    defaults: BTreeMap<String, BinomialOpinion>,
    finalized: bool,
}

impl Default for AssessmentGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl AssessmentGraph {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            index: BTreeMap::new(),
            edges: Vec::new(),
            tables: BTreeMap::new(),
            referral_trust: BTreeMap::new(),
            defaults: BTreeMap::new(),
            finalized: false,
        }
    }

    // -- raw assembly (no checks; used by document loading) ------------------

    pub(crate) fn push_node_unchecked(&mut self, name: &str, kind: NodeKind) {
        self.index.entry(name.to_string()).or_insert(kind);
        self.nodes.push(Node {
            name: name.to_string(),
            kind,
        });
    }

    pub(crate) fn push_edge_unchecked(&mut self, kind: EdgeKind, from: &str, to: &str) {
        self.edges.push(Edge {
            kind,
            from: from.to_string(),
            to: to.to_string(),
        });
    }

    pub(crate) fn set_table_unchecked(&mut self, node: &str, table: DependencyTable) {
        self.tables.insert(node.to_string(), table);
    }

    pub(crate) fn set_referral_unchecked(&mut self, node: &str, trust: BinomialOpinion) {
        self.referral_trust.insert(node.to_string(), trust);
    }

    pub(crate) fn set_default_unchecked(&mut self, node: &str, opinion: BinomialOpinion) {
        self.defaults.insert(node.to_string(), opinion);
    }

    // -- queries -------------------------------------------------------------

    pub fn is_finalized(&self) -> bool {
        self.finalized
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn kind(&self, name: &str) -> Option<NodeKind> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    fn edges_of(&self, kind: EdgeKind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.kind == kind)
    }

    pub fn has_edge(&self, kind: EdgeKind, from: &str, to: &str) -> bool {
        match kind {
            EdgeKind::ReferralTrust => from == OVERALL && self.referral_trust.contains_key(to),
            EdgeKind::FunctionalTrust if from == OVERALL => self.defaults.contains_key(to),
            _ => self.edges_of(kind).any(|e| e.from == from && e.to == to),
        }
    }

    /// Direct dependency parents, sorted by name.
    pub fn parents(&self, name: &str) -> Vec<&str> {
        let set: BTreeSet<&str> = self
            .edges_of(EdgeKind::Dependency)
            .filter(|e| e.to == name)
            .map(|e| e.from.as_str())
            .collect();
        set.into_iter().collect()
    }

    /// Direct dependency children, sorted by name.
    pub fn children(&self, name: &str) -> Vec<&str> {
        let set: BTreeSet<&str> = self
            .edges_of(EdgeKind::Dependency)
            .filter(|e| e.from == name)
            .map(|e| e.to.as_str())
            .collect();
        set.into_iter().collect()
    }

    /// Assessment modules holding functional trust in `name`, sorted.
    pub fn assessors(&self, name: &str) -> Vec<&str> {
        let set: BTreeSet<&str> = self
            .edges_of(EdgeKind::FunctionalTrust)
            .filter(|e| e.to == name)
            .map(|e| e.from.as_str())
            .collect();
        set.into_iter().collect()
    }

    pub fn table(&self, name: &str) -> Option<&DependencyTable> {
        self.tables.get(name)
    }

    pub fn tables(&self) -> &BTreeMap<String, DependencyTable> {
        &self.tables
    }

    pub fn referral_trust(&self, name: &str) -> Option<&BinomialOpinion> {
        self.referral_trust.get(name)
    }

    pub fn referral_trusts(&self) -> &BTreeMap<String, BinomialOpinion> {
        &self.referral_trust
    }

    /// `A`'s expert functional opinion about `name`, if declared.
    pub fn expert_default(&self, name: &str) -> Option<&BinomialOpinion> {
        self.defaults.get(name)
    }

    pub fn expert_defaults(&self) -> &BTreeMap<String, BinomialOpinion> {
        &self.defaults
    }

    // -- builder -------------------------------------------------------------

    fn ensure_open(&self) -> Result<(), GraphError> {
        if self.finalized {
            Err(GraphError::Finalized)
        } else {
            Ok(())
        }
    }

    fn require(&self, name: &str) -> Result<NodeKind, GraphError> {
        self.kind(name).ok_or_else(|| GraphError::UnknownNode(name.to_string()))
    }

    pub fn add_node(&mut self, name: &str, kind: NodeKind) -> Result<(), GraphError> {
        self.ensure_open()?;
        if name.is_empty() {
            return Err(GraphError::EmptyName);
        }
        if name == OVERALL || name == SINK || matches!(kind, NodeKind::OverallAssessment | NodeKind::Sink) {
            return Err(GraphError::ReservedName(name.to_string()));
        }
        if self.contains(name) {
            return Err(GraphError::DuplicateNode(name.to_string()));
        }
        self.push_node_unchecked(name, kind);
        Ok(())
    }

    pub fn add_dependency(&mut self, from: &str, to: &str) -> Result<(), GraphError> {
        self.ensure_open()?;
        let from_kind = self.require(from)?;
        let to_kind = self.require(to)?;
        if !dependency_allowed(from_kind, to_kind) {
            return Err(GraphError::ForbiddenDependency {
                from: from.into(),
                to: to.into(),
            });
        }
        if self.has_edge(EdgeKind::FunctionalTrust, to, from) {
            return Err(GraphError::SelfAssessmentDependency {
                assessor: to.into(),
                target: from.into(),
            });
        }
        if self.has_edge(EdgeKind::Dependency, from, to) {
            return Err(GraphError::DuplicateEdge {
                kind: EdgeKind::Dependency,
                from: from.into(),
                to: to.into(),
            });
        }
        self.check_acyclic(from, to)?;
        self.push_edge_unchecked(EdgeKind::Dependency, from, to);
        Ok(())
    }

    /// Records that assessment module `from` assesses `to`.
    pub fn add_functional_trust(&mut self, from: &str, to: &str) -> Result<(), GraphError> {
        self.ensure_open()?;
        let from_kind = self.require(from)?;
        let to_kind = self.require(to)?;
        if from_kind != NodeKind::Assessment || !trust_target_allowed(to_kind) || from == to {
            return Err(GraphError::Taxonomy {
                kind: EdgeKind::FunctionalTrust,
                from: from.into(),
                to: to.into(),
            });
        }
        if self.has_edge(EdgeKind::FunctionalTrust, from, to) {
            return Err(GraphError::DuplicateEdge {
                kind: EdgeKind::FunctionalTrust,
                from: from.into(),
                to: to.into(),
            });
        }
        if self.has_edge(EdgeKind::Dependency, to, from) {
            return Err(GraphError::SelfAssessmentDependency {
                assessor: from.into(),
                target: to.into(),
            });
        }
        self.check_acyclic(from, to)?;
        self.push_edge_unchecked(EdgeKind::FunctionalTrust, from, to);
        Ok(())
    }

    /// Sets `A`'s referral trust in assessment module `to`.
    pub fn add_referral_trust(&mut self, to: &str, trust: BinomialOpinion) -> Result<(), GraphError> {
        self.ensure_open()?;
        if self.require(to)? != NodeKind::Assessment {
            return Err(GraphError::Taxonomy {
                kind: EdgeKind::ReferralTrust,
                from: OVERALL.into(),
                to: to.into(),
            });
        }
        self.referral_trust.insert(to.to_string(), trust);
        Ok(())
    }

    /// Declares `A`'s expert functional opinion about `node`.
    pub fn set_expert_default(&mut self, node: &str, opinion: BinomialOpinion) -> Result<(), GraphError> {
        self.ensure_open()?;
        if !matches!(self.require(node)?, NodeKind::Functional | NodeKind::DataExchange) {
            return Err(GraphError::Taxonomy {
                kind: EdgeKind::FunctionalTrust,
                from: OVERALL.into(),
                to: node.into(),
            });
        }
        self.defaults.insert(node.to_string(), opinion);
        Ok(())
    }

    /// Sets the conditional table of `node`. Parents must already be wired;
    /// their set is re-checked on [`AssessmentGraph::finalize`].
    pub fn set_conditional_table(&mut self, node: &str, table: DependencyTable) -> Result<(), GraphError> {
        self.ensure_open()?;
        if node != SINK {
            self.require(node)?;
        }
        let expected = 1usize << table.parents.len();
        if table.rows.len() != expected {
            return Err(GraphError::TableSize {
                node: node.into(),
                expected,
                found: table.rows.len(),
            });
        }
        self.tables.insert(node.to_string(), table);
        Ok(())
    }

    /// Splices a data-exchange node between `sender` and all of its children.
    ///
    /// The new node passes its sender's opinion through; the children's
    /// conditional tables are rewired to reference it in the sender's place.
    pub fn insert_data_node(&mut self, sender: &str, data_name: &str) -> Result<(), GraphError> {
        self.ensure_open()?;
        if self.require(sender)? != NodeKind::Functional {
            return Err(GraphError::NotFunctional(sender.to_string()));
        }
        let children: Vec<String> = self.children(sender).into_iter().map(String::from).collect();
        if children.is_empty() {
            return Err(GraphError::NoChildren(sender.to_string()));
        }
        self.add_node(data_name, NodeKind::DataExchange)?;
        self.edges
            .retain(|e| !(e.kind == EdgeKind::Dependency && e.from == sender && children.contains(&e.to)));
        self.push_edge_unchecked(EdgeKind::Dependency, sender, data_name);
        for child in &children {
            self.push_edge_unchecked(EdgeKind::Dependency, data_name, child);
            if let Some(table) = self.tables.get_mut(child) {
                for p in table.parents.iter_mut().filter(|p| *p == sender) {
                    *p = data_name.to_string();
                }
            }
        }
        let pass = ConditionalTable::pass_through(DEFAULT_BASE_RATE);
        self.tables.insert(
            data_name.to_string(),
            DependencyTable::new(vec![sender.to_string()], pass.conditionals().to_vec()),
        );
        Ok(())
    }

    /// Inserts `A` and `Z`, wires every functional sink into `Z`, gives every
    /// assessment module without referral trust full trust, and validates.
    pub fn finalize(&mut self) -> Result<(), GraphError> {
        self.ensure_open()?;
        if !self.contains(OVERALL) {
            self.push_node_unchecked(OVERALL, NodeKind::OverallAssessment);
        }
        if !self.contains(SINK) {
            self.push_node_unchecked(SINK, NodeKind::Sink);
        }
        let sinks: Vec<String> = self
            .index
            .iter()
            .filter(|(_, k)| **k == NodeKind::Functional)
            .map(|(n, _)| n)
            .filter(|n| {
                !self
                    .edges_of(EdgeKind::Dependency)
                    .any(|e| &e.from == *n && self.kind(&e.to).is_some_and(NodeKind::carries_data))
            })
            .cloned()
            .collect();
        for s in sinks {
            if self.kind(SINK) == Some(NodeKind::Sink) && !self.has_edge(EdgeKind::Dependency, &s, SINK) {
                self.push_edge_unchecked(EdgeKind::Dependency, &s, SINK);
            }
        }
        let unconfigured: Vec<String> = self
            .index
            .iter()
            .filter(|(n, k)| **k == NodeKind::Assessment && !self.referral_trust.contains_key(*n))
            .map(|(n, _)| n.clone())
            .collect();
        for am in unconfigured {
            self.referral_trust
                .insert(am, BinomialOpinion::full_belief(DEFAULT_BASE_RATE));
        }
        self.nodes.sort();
        self.edges.sort();
        let violations = self.validate();
        if violations.is_empty() {
            self.finalized = true;
            Ok(())
        } else {
            Err(GraphError::Invalid(violations))
        }
    }

    // -- validation ----------------------------------------------------------

    /// Reports every invariant violation, ordered by node name.
    ///
    /// Completion rules (sink wiring, referral trust, presence of `A` and `Z`)
    /// apply once `Z` exists or the graph is finalized.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        let mut seen = BTreeSet::new();
        for node in &self.nodes {
            if node.name.is_empty() {
                out.push(Violation::EmptyName);
                continue;
            }
            if !seen.insert(node.name.as_str()) {
                out.push(Violation::DuplicateNode {
                    name: node.name.clone(),
                });
            }
            let reserved_ok = match node.name.as_str() {
                OVERALL => node.kind == NodeKind::OverallAssessment,
                SINK => node.kind == NodeKind::Sink,
                _ => !matches!(node.kind, NodeKind::OverallAssessment | NodeKind::Sink),
            };
            if !reserved_ok {
                out.push(Violation::ReservedName {
                    name: node.name.clone(),
                    kind: node.kind,
                });
            }
        }

        // edges with known endpoints, deduplicated
        let mut known: BTreeSet<(EdgeKind, &str, &str)> = BTreeSet::new();
        for e in &self.edges {
            let mut ok = true;
            for end in [&e.from, &e.to] {
                if !self.contains(end) {
                    ok = false;
                    out.push(Violation::UnknownNode {
                        name: end.clone(),
                        referenced_by: format!("{} edge `{}` -> `{}`", e.kind, e.from, e.to),
                    });
                }
            }
            if !ok {
                continue;
            }
            if !known.insert((e.kind, &e.from, &e.to)) {
                out.push(Violation::DuplicateEdge {
                    kind: e.kind,
                    from: e.from.clone(),
                    to: e.to.clone(),
                });
            }
        }

        let mut eval_edges: BTreeSet<(&str, &str)> = BTreeSet::new();
        let mut dep_edges: BTreeSet<(&str, &str)> = BTreeSet::new();
        for &(kind, from, to) in &known {
            let (fk, tk) = (self.index[from], self.index[to]);
            match kind {
                EdgeKind::Dependency => {
                    if self.has_edge(EdgeKind::FunctionalTrust, to, from) && tk == NodeKind::Assessment {
                        out.push(Violation::SelfAssessmentDependency {
                            assessor: to.into(),
                            target: from.into(),
                        });
                        continue;
                    }
                    if !dependency_allowed(fk, tk) {
                        out.push(Violation::ForbiddenDependency {
                            from: from.into(),
                            to: to.into(),
                        });
                    }
                    dep_edges.insert((from, to));
                    eval_edges.insert((from, to));
                }
                EdgeKind::FunctionalTrust => {
                    if fk != NodeKind::Assessment || !trust_target_allowed(tk) || from == to {
                        out.push(Violation::TrustTaxonomy {
                            kind,
                            from: from.into(),
                            to: to.into(),
                        });
                        continue;
                    }
                    eval_edges.insert((from, to));
                }
                EdgeKind::ReferralTrust => {
                    if fk != NodeKind::OverallAssessment || tk != NodeKind::Assessment {
                        out.push(Violation::TrustTaxonomy {
                            kind,
                            from: from.into(),
                            to: to.into(),
                        });
                    }
                }
            }
        }
        for am in self.referral_trust.keys() {
            match self.kind(am) {
                None => out.push(Violation::UnknownNode {
                    name: am.clone(),
                    referenced_by: format!("referral trust of `{OVERALL}`"),
                }),
                Some(NodeKind::Assessment) => {}
                Some(_) => out.push(Violation::TrustTaxonomy {
                    kind: EdgeKind::ReferralTrust,
                    from: OVERALL.into(),
                    to: am.clone(),
                }),
            }
        }
        for node in self.defaults.keys() {
            match self.kind(node) {
                None => out.push(Violation::UnknownNode {
                    name: node.clone(),
                    referenced_by: format!("expert opinion of `{OVERALL}`"),
                }),
                Some(NodeKind::Functional | NodeKind::DataExchange) => {}
                Some(_) => out.push(Violation::MisplacedDefault { node: node.clone() }),
            }
        }

        let dep_cycles = find_cycles(&self.index, &dep_edges);
        let no_dep_cycles = dep_cycles.is_empty();
        out.extend(dep_cycles.into_iter().map(|cycle| Violation::DependencyCycle { cycle }));
        if no_dep_cycles {
            out.extend(
                find_cycles(&self.index, &eval_edges)
                    .into_iter()
                    .map(|cycle| Violation::EvaluationCycle { cycle }),
            );
        }

        // conditional tables
        for name in self.index.keys() {
            let parents: Vec<String> = dep_edges
                .iter()
                .filter(|(_, t)| t == name)
                .map(|(f, _)| f.to_string())
                .collect();
            match self.tables.get(name) {
                None if !parents.is_empty() => {
                    out.push(Violation::MissingConditionalTable { node: name.clone() });
                }
                None => {}
                Some(table) => {
                    let listed: BTreeSet<&String> = table.parents.iter().collect();
                    let wired: BTreeSet<&String> = parents.iter().collect();
                    if listed != wired || listed.len() != table.parents.len() {
                        out.push(Violation::TableParents {
                            node: name.clone(),
                            expected: parents.clone(),
                            found: table.parents.clone(),
                        });
                    } else if table.rows.len() != 1usize << parents.len() {
                        out.push(Violation::TableSize {
                            node: name.clone(),
                            expected: 1usize << parents.len(),
                            found: table.rows.len(),
                        });
                    }
                }
            }
        }
        for name in self.tables.keys().filter(|n| !self.contains(n)) {
            out.push(Violation::UnknownNode {
                name: name.clone(),
                referenced_by: "conditional tables".into(),
            });
        }

        if self.finalized || self.contains(SINK) {
            for required in [OVERALL, SINK] {
                if !self.contains(required) {
                    out.push(Violation::MissingNode { name: required.into() });
                }
            }
            if self.kind(SINK) == Some(NodeKind::Sink) {
                let reaching = ancestors(SINK, &dep_edges);
                for (name, kind) in &self.index {
                    if *kind == NodeKind::Functional && !reaching.contains(name.as_str()) {
                        out.push(Violation::MissingSinkPath { node: name.clone() });
                    }
                }
            }
            for (name, kind) in &self.index {
                if *kind == NodeKind::Assessment && !self.referral_trust.contains_key(name) {
                    out.push(Violation::MissingReferralTrust { node: name.clone() });
                }
            }
        }

        out.sort_by(|x, y| (x.anchor(), x.code(), x.to_string()).cmp(&(y.anchor(), y.code(), y.to_string())));
        out
    }

    /// Evaluation order: every node after its dependency parents and after
    /// the assessment modules that assess it; ties broken by name.
    pub fn topological_order(&self) -> Result<Vec<String>, GraphError> {
        let mut indegree: BTreeMap<&str, usize> = self.index.keys().map(|n| (n.as_str(), 0)).collect();
        let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if e.kind == EdgeKind::ReferralTrust || !self.contains(&e.from) || !self.contains(&e.to) {
                continue;
            }
            if !seen.insert((e.from.as_str(), e.to.as_str())) {
                continue;
            }
            succ.entry(&e.from).or_default().push(&e.to);
            *indegree.get_mut(e.to.as_str()).unwrap() += 1;
        }
        let mut ready: BTreeSet<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
        let mut order = Vec::with_capacity(indegree.len());
        while let Some(n) = ready.pop_first() {
            order.push(n.to_string());
            for &m in succ.get(n).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indegree.get_mut(m).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.insert(m);
                }
            }
        }
        if order.len() != indegree.len() {
            let remaining: BTreeSet<&str> = indegree
                .keys()
                .copied()
                .filter(|n| !order.iter().any(|o| o == n))
                .collect();
            return Err(GraphError::Cycle(remaining.into_iter().map(String::from).collect()));
        }
        Ok(order)
    }

    /// Fails if `from -> to` would close a cycle over dependency and
    /// functional-trust edges.
    fn check_acyclic(&self, from: &str, to: &str) -> Result<(), GraphError> {
        if from == to {
            return Err(GraphError::Cycle(vec![from.to_string(), to.to_string()]));
        }
        let mut prev: BTreeMap<&str, &str> = BTreeMap::new();
        let mut queue = VecDeque::from([to]);
        let mut seen = BTreeSet::from([to]);
        while let Some(n) = queue.pop_front() {
            if n == from {
                let mut path = vec![from.to_string()];
                let mut cur = from;
                while cur != to {
                    cur = prev[cur];
                    path.push(cur.to_string());
                }
                path.reverse();
                path.insert(0, from.to_string());
                return Err(GraphError::Cycle(path));
            }
            for e in self
                .edges
                .iter()
                .filter(|e| e.kind != EdgeKind::ReferralTrust && e.from == n)
            {
                if seen.insert(&e.to) {
                    prev.insert(&e.to, n);
                    queue.push_back(&e.to);
                }
            }
        }
        Ok(())
    }
}

fn dependency_allowed(from: NodeKind, to: NodeKind) -> bool {
    match (from, to) {
        (NodeKind::Sink | NodeKind::OverallAssessment, _) => false,
        (_, NodeKind::OverallAssessment) => false,
        (NodeKind::Assessment, NodeKind::Assessment) => true,
        (NodeKind::Assessment, _) => false,
        _ => true,
    }
}

fn trust_target_allowed(to: NodeKind) -> bool {
    matches!(to, NodeKind::Functional | NodeKind::DataExchange | NodeKind::Assessment)
}

/// Every node with a directed path into `target` (excluding `target`).
fn ancestors<'a>(target: &'a str, edges: &BTreeSet<(&'a str, &'a str)>) -> BTreeSet<&'a str> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([target]);
    while let Some(n) = queue.pop_front() {
        for &(f, t) in edges {
            if t == n && seen.insert(f) {
                queue.push_back(f);
            }
        }
    }
    seen
}

/// One cycle per strongly connected component that contains a cycle,
/// each rotated to start at its smallest node name.
fn find_cycles<'a>(nodes: &'a BTreeMap<String, NodeKind>, edges: &BTreeSet<(&'a str, &'a str)>) -> Vec<Vec<String>> {
    let succ = |n: &'a str| edges.iter().filter(move |(f, _)| *f == n).map(|(_, t)| *t);
    let mut cycles = Vec::new();
    let mut covered: BTreeSet<&str> = BTreeSet::new();
    for start in nodes.keys().map(String::as_str) {
        if covered.contains(start) {
            continue;
        }
        // shortest path start -> ... -> start, BFS in name order
        let mut prev: BTreeMap<&str, &str> = BTreeMap::new();
        let mut queue: VecDeque<&str> = VecDeque::from([start]);
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut closing = None;
        'bfs: while let Some(n) = queue.pop_front() {
            for m in succ(n) {
                if m == start {
                    closing = Some(n);
                    break 'bfs;
                }
                if seen.insert(m) {
                    prev.insert(m, n);
                    queue.push_back(m);
                }
            }
        }
        let Some(mut cur) = closing else { continue };
        let mut cycle = vec![cur];
        while cur != start {
            cur = prev[cur];
            cycle.push(cur);
        }
        cycle.reverse();
        // skip nodes strongly connected to this one so each component reports once
        let reach_back = ancestors(start, edges);
        let mut forward = BTreeSet::new();
        let mut q = VecDeque::from([start]);
        while let Some(n) = q.pop_front() {
            for m in succ(n) {
                if forward.insert(m) {
                    q.push_back(m);
                }
            }
        }
        covered.extend(forward.intersection(&reach_back).copied());
        covered.insert(start);
        cycles.push(cycle.into_iter().map(String::from).collect());
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(b: f64, d: f64, u: f64) -> BinomialOpinion {
        BinomialOpinion::new(b, d, u, 0.5).unwrap()
    }

    fn and_table(parents: &[&str]) -> DependencyTable {
        DependencyTable::and_shaped(parents, op(0.95, 0.0, 0.05), op(0.0, 0.95, 0.05))
    }

    /// Grid map u, localization w, lanelet map x, planner y with AMs
    /// alpha (w), beta and delta (x), gamma (y).
    fn example() -> AssessmentGraph {
        let mut g = AssessmentGraph::new();
        for n in ["u", "w", "x", "y"] {
            g.add_node(n, NodeKind::Functional).unwrap();
        }
        for n in ["alpha", "beta", "delta", "gamma"] {
            g.add_node(n, NodeKind::Assessment).unwrap();
        }
        for (f, t) in [
            ("u", "y"),
            ("w", "x"),
            ("w", "y"),
            ("x", "y"),
            ("u", "beta"),
            ("w", "beta"),
            ("w", "delta"),
        ] {
            g.add_dependency(f, t).unwrap();
        }
        for (f, t) in [("alpha", "w"), ("beta", "x"), ("delta", "x"), ("gamma", "y")] {
            g.add_functional_trust(f, t).unwrap();
        }
        g.add_referral_trust("gamma", op(0.8, 0.1, 0.1)).unwrap();
        g.set_conditional_table("x", and_table(&["w"])).unwrap();
        g.set_conditional_table("y", and_table(&["u", "w", "x"])).unwrap();
        g.set_conditional_table("beta", and_table(&["u", "w"])).unwrap();
        g.set_conditional_table("delta", and_table(&["w"])).unwrap();
        g.set_conditional_table(SINK, and_table(&["y"])).unwrap();
        g
    }

    #[test]
    fn add_node_rules() {
        let mut g = AssessmentGraph::new();
        g.add_node("Planner", NodeKind::Functional).unwrap();
        assert_eq!(g.node_count(), 1);
        assert_eq!(
            g.add_node("Planner", NodeKind::Functional),
            Err(GraphError::DuplicateNode("Planner".into()))
        );
        assert_eq!(
            g.add_node("Z", NodeKind::Functional),
            Err(GraphError::ReservedName("Z".into()))
        );
        assert_eq!(
            g.add_node("A", NodeKind::Assessment),
            Err(GraphError::ReservedName("A".into()))
        );
        assert_eq!(g.add_node("", NodeKind::Functional), Err(GraphError::EmptyName));
    }

    #[test]
    fn add_dependency_rules() {
        let mut g = AssessmentGraph::new();
        g.add_node("Localization", NodeKind::Functional).unwrap();
        g.add_node("Planner", NodeKind::Functional).unwrap();
        g.add_node("gamma", NodeKind::Assessment).unwrap();
        g.add_dependency("Localization", "Planner").unwrap();
        assert_eq!(g.children("Localization"), vec!["Planner"]);
        assert_eq!(g.parents("Planner"), vec!["Localization"]);
        assert!(matches!(
            g.add_dependency("Planner", "Planner"),
            Err(GraphError::Cycle(_))
        ));
        assert!(matches!(
            g.add_dependency("Planner", "Localization"),
            Err(GraphError::Cycle(_))
        ));
        assert!(matches!(
            g.add_dependency("gamma", "Planner"),
            Err(GraphError::ForbiddenDependency { .. })
        ));
        assert!(matches!(
            g.add_dependency("nope", "Planner"),
            Err(GraphError::UnknownNode(_))
        ));
        assert!(matches!(
            g.add_dependency("Localization", "Planner"),
            Err(GraphError::DuplicateEdge { .. })
        ));
    }

    #[test]
    fn am_must_not_depend_on_assessed_node() {
        let mut g = AssessmentGraph::new();
        g.add_node("x", NodeKind::Functional).unwrap();
        g.add_node("a1", NodeKind::Assessment).unwrap();
        g.add_node("a2", NodeKind::Assessment).unwrap();
        g.add_functional_trust("a1", "x").unwrap();
        assert!(matches!(
            g.add_dependency("x", "a1"),
            Err(GraphError::SelfAssessmentDependency { .. })
        ));
        g.add_dependency("x", "a2").unwrap();
        assert!(matches!(
            g.add_functional_trust("a2", "x"),
            Err(GraphError::SelfAssessmentDependency { .. })
        ));
    }

    #[test]
    fn trust_edges() {
        let mut g = example();
        assert_eq!(g.assessors("y"), vec!["gamma"]);
        assert_eq!(g.assessors("x"), vec!["beta", "delta"]);
        assert!(g.has_edge(EdgeKind::ReferralTrust, OVERALL, "gamma"));
        assert!(matches!(
            g.add_functional_trust("beta", "x"),
            Err(GraphError::DuplicateEdge { .. })
        ));
        assert!(matches!(
            g.add_functional_trust("u", "x"),
            Err(GraphError::Taxonomy { .. })
        ));
        assert!(matches!(
            g.add_referral_trust("u", op(1.0, 0.0, 0.0)),
            Err(GraphError::Taxonomy { .. })
        ));
        // an AM may assess another AM, unless that closes a loop through w
        assert!(matches!(
            g.add_functional_trust("delta", "alpha"),
            Err(GraphError::Cycle(_))
        ));
        g.add_functional_trust("gamma", "beta").unwrap();
    }

    #[test]
    fn insert_data_node_splices_children() {
        let mut g = example();
        let before = g.edges().len();
        g.add_node("v", NodeKind::Functional).unwrap();
        g.add_node("c1", NodeKind::Functional).unwrap();
        g.add_node("c2", NodeKind::Functional).unwrap();
        g.add_dependency("v", "c1").unwrap();
        g.add_dependency("v", "c2").unwrap();
        let nodes = g.node_count();
        g.insert_data_node("v", "v_out").unwrap();
        assert_eq!(g.node_count(), nodes + 1);
        assert_eq!(g.edges().len(), before + 3);
        assert_eq!(g.children("v"), vec!["v_out"]);
        assert_eq!(g.children("v_out"), vec!["c1", "c2"]);
        assert_eq!(g.kind("v_out"), Some(NodeKind::DataExchange));

        g.add_node("lone", NodeKind::Functional).unwrap();
        assert_eq!(
            g.insert_data_node("lone", "d"),
            Err(GraphError::NoChildren("lone".into()))
        );
        assert!(matches!(
            g.insert_data_node("ghost", "d"),
            Err(GraphError::UnknownNode(_))
        ));
    }

    #[test]
    fn insert_data_node_rewires_tables() {
        let mut g = example();
        g.insert_data_node("w", "pose").unwrap();
        assert_eq!(g.children("w"), vec!["pose"]);
        assert_eq!(g.table("y").unwrap().parents, vec!["u", "pose", "x"]);
        assert_eq!(g.table("pose").unwrap().parents, vec!["w"]);
        g.finalize().unwrap();
    }

    #[test]
    fn finalize_example() {
        let mut g = example();
        g.finalize().unwrap();
        assert!(g.is_finalized());
        assert_eq!(g.parents(SINK), vec!["y"]);
        assert_eq!(g.kind(OVERALL), Some(NodeKind::OverallAssessment));
        // unconfigured AMs receive full trust
        assert_eq!(g.referral_trust("alpha"), Some(&BinomialOpinion::full_belief(0.5)));
        assert_eq!(g.referral_trust("gamma"), Some(&op(0.8, 0.1, 0.1)));
        assert!(g.validate().is_empty());
        assert_eq!(g.add_node("late", NodeKind::Functional), Err(GraphError::Finalized));
        assert_eq!(g.finalize(), Err(GraphError::Finalized));
    }

    #[test]
    fn finalize_single_node() {
        let mut g = AssessmentGraph::new();
        g.add_node("n", NodeKind::Functional).unwrap();
        g.set_conditional_table(
            SINK,
            DependencyTable::new(vec!["n".into()], vec![op(1.0, 0.0, 0.0), op(0.0, 1.0, 0.0)]),
        )
        .unwrap();
        g.finalize().unwrap();
        assert_eq!(g.parents(SINK), vec!["n"]);
    }

    #[test]
    fn finalize_two_sinks_needs_four_rows() {
        let mut g = AssessmentGraph::new();
        g.add_node("p", NodeKind::Functional).unwrap();
        g.add_node("q", NodeKind::Functional).unwrap();
        g.set_conditional_table(SINK, and_table(&["p"])).unwrap();
        let err = g.finalize().unwrap_err();
        let GraphError::Invalid(v) = err else { panic!() };
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].code(), "table-parents");

        let mut g = AssessmentGraph::new();
        g.add_node("p", NodeKind::Functional).unwrap();
        g.add_node("q", NodeKind::Functional).unwrap();
        g.set_conditional_table(SINK, and_table(&["p", "q"])).unwrap();
        g.finalize().unwrap();
        assert_eq!(g.parents(SINK), vec!["p", "q"]);
    }

    #[test]
    fn table_size_checked_eagerly() {
        let mut g = example();
        let t = DependencyTable::new(vec!["u".into(), "w".into()], vec![op(1.0, 0.0, 0.0); 2]);
        assert_eq!(
            g.set_conditional_table("beta", t),
            Err(GraphError::TableSize {
                node: "beta".into(),
                expected: 4,
                found: 2
            })
        );
    }

    #[test]
    fn validate_reports_raw_violations() {
        let mut g = example();
        g.push_edge_unchecked(EdgeKind::Dependency, "y", "w");
        g.tables.get_mut("beta").unwrap().rows.truncate(2);
        let v = g.validate();
        let codes: Vec<_> = v.iter().map(Violation::code).collect();
        assert!(codes.contains(&"dependency-cycle"), "{codes:?}");
        assert!(codes.contains(&"table-size"), "{codes:?}");
        // sorted by anchor
        let anchors: Vec<_> = v.iter().map(|x| x.anchor().to_string()).collect();
        let mut sorted = anchors.clone();
        sorted.sort();
        assert_eq!(anchors, sorted);
        let cycle = v.iter().find_map(|x| match x {
            Violation::DependencyCycle { cycle } => Some(cycle.clone()),
            _ => None,
        });
        assert_eq!(cycle.unwrap(), vec!["w", "y"]);
    }

    #[test]
    fn topological_order_examples() {
        let mut g = AssessmentGraph::new();
        for n in ["c", "b", "a"] {
            g.add_node(n, NodeKind::Functional).unwrap();
        }
        g.add_dependency("a", "b").unwrap();
        g.add_dependency("b", "c").unwrap();
        assert_eq!(g.topological_order().unwrap(), vec!["a", "b", "c"]);

        let mut g = example();
        g.finalize().unwrap();
        let order = g.topological_order().unwrap();
        assert_eq!(order.last().unwrap(), SINK);
        let pos = |n: &str| order.iter().position(|o| o == n).unwrap();
        assert!(pos("u") < pos("beta"));
        assert!(pos("w") < pos("beta") && pos("w") < pos("delta"));
        assert!(pos("beta") < pos("x") && pos("gamma") < pos("y"));
    }

    #[test]
    fn every_functional_node_reaches_sink() {
        let mut g = example();
        g.finalize().unwrap();
        let deps: BTreeSet<(&str, &str)> = g
            .edges()
            .iter()
            .filter(|e| e.kind == EdgeKind::Dependency)
            .map(|e| (e.from.as_str(), e.to.as_str()))
            .collect();
        let anc = ancestors(SINK, &deps);
        for n in g.nodes().iter().filter(|n| n.kind == NodeKind::Functional) {
            assert!(anc.contains(n.name.as_str()), "{}", n.name);
        }
    }
}
