use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use super::model::{EdgeTarget, EdgeType, JaasDocument, Role};

/// Graph rule broken by a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    DuplicateNodeId,
    DuplicateEdgeId,
    DuplicateOrderIndex,
    MclCount,
    EmptyText,
    DanglingSource,
    DanglingTarget,
    UndMustTargetEdge,
    EdgeTargetNotAllowed,
    SelfLoop,
    Cycle,
    MclStanceConflict,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::DuplicateNodeId => "duplicate-node-id",
            Rule::DuplicateEdgeId => "duplicate-edge-id",
            Rule::DuplicateOrderIndex => "duplicate-order-index",
            Rule::MclCount => "mcl-count",
            Rule::EmptyText => "empty-text",
            Rule::DanglingSource => "dangling-source",
            Rule::DanglingTarget => "dangling-target",
            Rule::UndMustTargetEdge => "und-must-target-edge",
            Rule::EdgeTargetNotAllowed => "edge-target-not-allowed",
            Rule::SelfLoop => "self-loop",
            Rule::Cycle => "cycle",
            Rule::MclStanceConflict => "mcl-stance-conflict",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    /// Offending node or edge id.
    pub subject: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.rule, self.subject, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub doc_id: String,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

/// Check every structural invariant of a JAAS graph. Violations are data.
pub fn validate_graph(doc: &JaasDocument) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |rule: Rule, subject: &str, detail: String| {
        out.push(Violation {
            rule,
            subject: subject.to_string(),
            detail,
        })
    };

    let mut node_ids = HashSet::new();
    let mut order_seen: HashMap<usize, &str> = HashMap::new();
    for node in &doc.nodes {
        if !node_ids.insert(node.adu_id.as_str()) {
            push(Rule::DuplicateNodeId, &node.adu_id, "node id occurs more than once".into());
        }
        if let Some(prev) = order_seen.insert(node.order_index, &node.adu_id) {
            push(
                Rule::DuplicateOrderIndex,
                &node.adu_id,
                format!("order_index {} already used by {prev}", node.order_index),
            );
        }
        if node.role != Role::Neut && node.text.trim().is_empty() {
            push(Rule::EmptyText, &node.adu_id, format!("{} node has no text", node.role));
        }
    }

    let mcl = doc.mcl_count();
    if mcl == 0 || mcl > 2 {
        push(Rule::MclCount, &doc.doc_id, format!("{mcl} major claims, expected 1 or 2"));
    }

    let mut edge_ids = HashSet::new();
    for edge in &doc.edges {
        if !edge_ids.insert(edge.edge_id.as_str()) {
            push(Rule::DuplicateEdgeId, &edge.edge_id, "edge id occurs more than once".into());
        }
    }

    for edge in &doc.edges {
        if !node_ids.contains(edge.source.as_str()) {
            push(
                Rule::DanglingSource,
                &edge.edge_id,
                format!("source `{}` is not a node", edge.source),
            );
        }
        match (&edge.target, edge.edge_type) {
            (EdgeTarget::Node(t), EdgeType::Und) => {
                push(
                    Rule::UndMustTargetEdge,
                    &edge.edge_id,
                    format!("undercut targets node `{t}`"),
                );
                if !node_ids.contains(t.as_str()) {
                    push(Rule::DanglingTarget, &edge.edge_id, format!("target node `{t}` missing"));
                }
            }
            (EdgeTarget::Node(t), _) => {
                if !node_ids.contains(t.as_str()) {
                    push(Rule::DanglingTarget, &edge.edge_id, format!("target node `{t}` missing"));
                } else if *t == edge.source {
                    push(Rule::SelfLoop, &edge.edge_id, format!("`{t}` points at itself"));
                }
            }
            (EdgeTarget::Edge(t), EdgeType::Und) => {
                if !edge_ids.contains(t.as_str()) {
                    push(Rule::DanglingTarget, &edge.edge_id, format!("target edge `{t}` missing"));
                } else if *t == edge.edge_id {
                    push(Rule::SelfLoop, &edge.edge_id, "undercut targets itself".into());
                }
            }
            (EdgeTarget::Edge(t), ty) => {
                push(
                    Rule::EdgeTargetNotAllowed,
                    &edge.edge_id,
                    format!("{ty} edge targets edge `{t}`"),
                );
            }
        }
    }

    for id in cyclic_nodes(doc) {
        push(Rule::Cycle, &id, "node lies on a cycle of node-to-node edges".into());
    }

    let roles: HashMap<&str, Role> = doc.nodes.iter().map(|n| (n.adu_id.as_str(), n.role)).collect();
    for edge in &doc.edges {
        if edge.edge_type != EdgeType::Reb {
            continue;
        }
        if let EdgeTarget::Node(t) = &edge.target {
            if roles.get(edge.source.as_str()) == Some(&Role::Mcl)
                && roles.get(t.as_str()) == Some(&Role::Mcl)
            {
                push(
                    Rule::MclStanceConflict,
                    &edge.edge_id,
                    "one major claim rebuts the other".into(),
                );
            }
        }
    }

    ValidationReport {
        doc_id: doc.doc_id.clone(),
        violations: out,
    }
}

/// Nodes left over after Kahn's algorithm on the node->node subgraph.
fn cyclic_nodes(doc: &JaasDocument) -> Vec<String> {
    let mut indegree: BTreeMap<&str, usize> = doc.nodes.iter().map(|n| (n.adu_id.as_str(), 0)).collect();
    let mut succ: HashMap<&str, Vec<&str>> = HashMap::new();
    for edge in &doc.edges {
        let Some(t) = edge.target.as_node() else { continue };
        if t == edge.source || !indegree.contains_key(t) || !indegree.contains_key(edge.source.as_str()) {
            continue;
        }
        succ.entry(edge.source.as_str()).or_default().push(t);
        *indegree.get_mut(t).unwrap() += 1;
    }
    let mut queue: Vec<&str> = indegree.iter().filter(|(_, d)| **d == 0).map(|(n, _)| *n).collect();
    while let Some(n) = queue.pop() {
        for &m in succ.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indegree.get_mut(m).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push(m);
            }
        }
        indegree.remove(n);
    }
    indegree.keys().map(|k| k.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jaas::model::{JaasEdge, JaasNode, SourceCorpus};

    fn node(id: &str, role: Role, order: usize) -> JaasNode {
        JaasNode {
            adu_id: id.into(),
            role,
            text: format!("text of {id}"),
            char_span: None,
            order_index: order,
        }
    }

    fn doc(nodes: Vec<JaasNode>, edges: Vec<JaasEdge>) -> JaasDocument {
        JaasDocument {
            doc_id: "d1".into(),
            source_corpus: SourceCorpus::Argmicro,
            topic_text: String::new(),
            nodes,
            edges,
        }
    }

    #[test]
    fn single_major_claim_is_valid() {
        let d = doc(vec![node("a1", Role::Mcl, 0)], vec![]);
        assert!(validate_graph(&d).is_valid());
    }

    #[test]
    fn undercut_on_node_is_flagged() {
        let d = doc(
            vec![node("a1", Role::Mcl, 0), node("a2", Role::Pro, 1)],
            vec![JaasEdge::to_node("c1", "a2", "a1", EdgeType::Und)],
        );
        let report = validate_graph(&d);
        assert!(report.has(Rule::UndMustTargetEdge));
        assert_eq!(report.violations[0].rule.name(), "und-must-target-edge");
    }

    #[test]
    fn support_on_edge_is_flagged() {
        let d = doc(
            vec![node("a1", Role::Mcl, 0), node("a2", Role::Pro, 1), node("a3", Role::Pro, 2)],
            vec![
                JaasEdge::to_node("c1", "a2", "a1", EdgeType::Sup),
                JaasEdge::to_edge("c2", "a3", "c1", EdgeType::Sup),
            ],
        );
        assert!(validate_graph(&d).has(Rule::EdgeTargetNotAllowed));
    }

    #[test]
    fn cycles_and_self_loops() {
        let d = doc(
            vec![node("a1", Role::Mcl, 0), node("a2", Role::Pro, 1), node("a3", Role::Pro, 2)],
            vec![
                JaasEdge::to_node("c1", "a2", "a3", EdgeType::Sup),
                JaasEdge::to_node("c2", "a3", "a2", EdgeType::Sup),
                JaasEdge::to_node("c3", "a1", "a1", EdgeType::Sup),
            ],
        );
        let report = validate_graph(&d);
        assert!(report.has(Rule::Cycle));
        assert!(report.has(Rule::SelfLoop));
        let cyc: Vec<_> = report.violations.iter().filter(|v| v.rule == Rule::Cycle).map(|v| v.subject.as_str()).collect();
        assert_eq!(cyc, vec!["a2", "a3"]);
    }

    #[test]
    fn ids_order_and_mcl_count() {
        let d = doc(
            vec![node("a1", Role::Pro, 0), node("a1", Role::Pro, 0)],
            vec![
                JaasEdge::to_node("c1", "a1", "zz", EdgeType::Sup),
                JaasEdge::to_node("c1", "qq", "a1", EdgeType::Sup),
            ],
        );
        let report = validate_graph(&d);
        for rule in [
            Rule::DuplicateNodeId,
            Rule::DuplicateOrderIndex,
            Rule::MclCount,
            Rule::DuplicateEdgeId,
            Rule::DanglingTarget,
            Rule::DanglingSource,
        ] {
            assert!(report.has(rule), "missing {rule}");
        }
    }

    #[test]
    fn dual_mcl_allowed_three_not() {
        let two = doc(vec![node("a1", Role::Mcl, 0), node("a2", Role::Mcl, 1)], vec![]);
        assert!(validate_graph(&two).is_valid());
        assert!(two.is_dual_mcl());
        let three = doc(
            vec![node("a1", Role::Mcl, 0), node("a2", Role::Mcl, 1), node("a3", Role::Mcl, 2)],
            vec![],
        );
        assert!(validate_graph(&three).has(Rule::MclCount));
    }

    #[test]
    fn major_claims_with_opposite_stance() {
        let d = doc(
            vec![node("a1", Role::Mcl, 0), node("a2", Role::Mcl, 1)],
            vec![JaasEdge::to_node("c1", "a2", "a1", EdgeType::Reb)],
        );
        assert!(validate_graph(&d).has(Rule::MclStanceConflict));
    }

    #[test]
    fn empty_text_only_for_non_neutral() {
        let mut n = node("a2", Role::Neut, 1);
        n.text.clear();
        let d = doc(vec![node("a1", Role::Mcl, 0), n], vec![]);
        assert!(validate_graph(&d).is_valid());
        let mut p = node("a2", Role::Pro, 1);
        p.text = "  ".into();
        let d = doc(vec![node("a1", Role::Mcl, 0), p], vec![]);
        assert!(validate_graph(&d).has(Rule::EmptyText));
    }
}
