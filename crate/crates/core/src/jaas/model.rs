use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Corpus a document was converted from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceCorpus {
    Argmicro,
    Persessays,
}

impl SourceCorpus {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceCorpus::Argmicro => "argmicro",
            SourceCorpus::Persessays => "persessays",
        }
    }
}

impl fmt::Display for SourceCorpus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Node role in a JAAS graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Mcl,
    Pro,
    Opp,
    Neut,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::Pro, Role::Opp, Role::Mcl, Role::Neut];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Mcl => "mcl",
            Role::Pro => "pro",
            Role::Opp => "opp",
            Role::Neut => "neut",
        }
    }

    /// Regular (pro/opp) nodes are the classification targets.
    pub fn is_argumentative(self) -> bool {
        matches!(self, Role::Pro | Role::Opp)
    }

    pub fn polarity(self) -> Option<Polarity> {
        match self {
            Role::Pro => Some(Polarity::Pro),
            Role::Opp => Some(Polarity::Opp),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mcl" => Ok(Role::Mcl),
            "pro" => Ok(Role::Pro),
            "opp" => Ok(Role::Opp),
            "neut" => Ok(Role::Neut),
            other => Err(format!("unknown role `{other}`")),
        }
    }
}

/// Stance of an argumentative node relative to the major claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Pro,
    Opp,
}

impl Polarity {
    pub const BOTH: [Polarity; 2] = [Polarity::Pro, Polarity::Opp];

    pub fn is_opp(self) -> bool {
        self == Polarity::Opp
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Pro => "pro",
            Polarity::Opp => "opp",
        }
    }

    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Pro => Polarity::Opp,
            Polarity::Opp => Polarity::Pro,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pro" => Ok(Polarity::Pro),
            "opp" => Ok(Polarity::Opp),
            other => Err(format!("unknown polarity `{other}`")),
        }
    }
}

impl From<Polarity> for Role {
    fn from(p: Polarity) -> Role {
        match p {
            Polarity::Pro => Role::Pro,
            Polarity::Opp => Role::Opp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeType {
    Sup,
    Add,
    Exa,
    Reb,
    Und,
}

impl EdgeType {
    pub const ALL: [EdgeType; 5] = [
        EdgeType::Sup,
        EdgeType::Reb,
        EdgeType::Und,
        EdgeType::Add,
        EdgeType::Exa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeType::Sup => "sup",
            EdgeType::Add => "add",
            EdgeType::Exa => "exa",
            EdgeType::Reb => "reb",
            EdgeType::Und => "und",
        }
    }

    /// Whether following this edge from source to target flips polarity.
    pub fn flips(self) -> bool {
        matches!(self, EdgeType::Reb | EdgeType::Und)
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EdgeType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sup" => Ok(EdgeType::Sup),
            "add" => Ok(EdgeType::Add),
            "exa" => Ok(EdgeType::Exa),
            "reb" => Ok(EdgeType::Reb),
            "und" => Ok(EdgeType::Und),
            other => Err(format!("unknown edge type `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JaasNode {
    pub adu_id: String,
    pub role: Role,
    pub text: String,
    /// Character (not byte) offsets into the source text.
    pub char_span: Option<(usize, usize)>,
    pub order_index: usize,
}

/// What an edge points at. Only undercuts may target another edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EdgeTarget {
    Node(String),
    Edge(String),
}

impl EdgeTarget {
    pub fn id(&self) -> &str {
        match self {
            EdgeTarget::Node(id) | EdgeTarget::Edge(id) => id,
        }
    }

    pub fn as_node(&self) -> Option<&str> {
        match self {
            EdgeTarget::Node(id) => Some(id),
            EdgeTarget::Edge(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum TargetKind {
    Node,
    Edge,
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    edge_id: String,
    source: String,
    target: String,
    target_kind: TargetKind,
    edge_type: EdgeType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "RawEdge", into = "RawEdge")]
pub struct JaasEdge {
    pub edge_id: String,
    pub source: String,
    pub target: EdgeTarget,
    pub edge_type: EdgeType,
}

impl JaasEdge {
    pub fn to_node(
        edge_id: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
        edge_type: EdgeType,
    ) -> Self {
        JaasEdge {
            edge_id: edge_id.into(),
            source: source.into(),
            target: EdgeTarget::Node(target.into()),
            edge_type,
        }
    }

    pub fn to_edge(
        edge_id: impl Into<String>,
        source: impl Into<String>,
        target: impl Into<String>,
        edge_type: EdgeType,
    ) -> Self {
        JaasEdge {
            edge_id: edge_id.into(),
            source: source.into(),
            target: EdgeTarget::Edge(target.into()),
            edge_type,
        }
    }
}

impl From<RawEdge> for JaasEdge {
    fn from(raw: RawEdge) -> Self {
        let target = match raw.target_kind {
            TargetKind::Node => EdgeTarget::Node(raw.target),
            TargetKind::Edge => EdgeTarget::Edge(raw.target),
        };
        JaasEdge {
            edge_id: raw.edge_id,
            source: raw.source,
            target,
            edge_type: raw.edge_type,
        }
    }
}

impl From<JaasEdge> for RawEdge {
    fn from(edge: JaasEdge) -> Self {
        let (target, target_kind) = match edge.target {
            EdgeTarget::Node(id) => (id, TargetKind::Node),
            EdgeTarget::Edge(id) => (id, TargetKind::Edge),
        };
        RawEdge {
            edge_id: edge.edge_id,
            source: edge.source,
            target,
            target_kind,
            edge_type: edge.edge_type,
        }
    }
}

/// One text as an argumentation graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JaasDocument {
    pub doc_id: String,
    pub source_corpus: SourceCorpus,
    pub topic_text: String,
    pub nodes: Vec<JaasNode>,
    pub edges: Vec<JaasEdge>,
}

impl JaasDocument {
    pub fn node(&self, adu_id: &str) -> Option<&JaasNode> {
        self.nodes.iter().find(|n| n.adu_id == adu_id)
    }

    pub fn edge(&self, edge_id: &str) -> Option<&JaasEdge> {
        self.edges.iter().find(|e| e.edge_id == edge_id)
    }

    pub fn mcl_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.role == Role::Mcl).count()
    }

    pub fn is_dual_mcl(&self) -> bool {
        self.mcl_count() == 2
    }

    /// Nodes sorted by reading order.
    pub fn nodes_in_order(&self) -> Vec<&JaasNode> {
        let mut nodes: Vec<&JaasNode> = self.nodes.iter().collect();
        nodes.sort_by_key(|n| n.order_index);
        nodes
    }
}

/// The on-disk container: one JSON file per corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JaasCorpus {
    pub corpus: String,
    pub documents: Vec<JaasDocument>,
}

impl JaasCorpus {
    pub fn new(corpus: impl Into<String>) -> Self {
        JaasCorpus {
            corpus: corpus.into(),
            documents: Vec::new(),
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, serde_json::Error> {
        serde_json::from_slice(bytes)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("JAAS corpus is always serializable");
        out.push('\n');
        out
    }
}
