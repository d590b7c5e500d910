//! Pro/opp role assignment by attack parity along paths to the major claim.
//!
//! Support-like edges (`sup`, `add`, `exa`) keep the polarity of their target,
//! `reb` flips it. An undercut source gets the polarity opposite to the source
//! of the edge it attacks. Major claims anchor the search as `pro`; callers can
//! pin further nodes (e.g. essay claims with an explicit stance attribute).
//! When several paths disagree the shortest one wins and the disagreement is
//! logged.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::model::{EdgeTarget, EdgeType, JaasDocument, Polarity, Role};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityConflict {
    pub adu_id: String,
    pub kept: Polarity,
    pub rejected: Polarity,
    pub via_edge: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleChange {
    pub adu_id: String,
    pub before: Role,
    pub after: Role,
}

#[derive(Debug, Clone)]
pub struct Propagation {
    pub document: JaasDocument,
    /// Argumentative nodes with no path to a major claim; reassigned `neut`.
    pub unreachable: Vec<String>,
    pub conflicts: Vec<PolarityConflict>,
    pub changed: Vec<RoleChange>,
}

pub fn propagate_polarity(doc: &JaasDocument) -> Propagation {
    propagate_polarity_with(doc, &BTreeMap::new())
}

/// Propagation with explicitly stanced nodes that keep their polarity.
pub fn propagate_polarity_with(doc: &JaasDocument, anchors: &BTreeMap<String, Polarity>) -> Propagation {
    let roles: HashMap<&str, Role> = doc.nodes.iter().map(|n| (n.adu_id.as_str(), n.role)).collect();
    let assignable = |id: &str| matches!(roles.get(id), Some(Role::Pro) | Some(Role::Opp));

    let mut incoming: HashMap<&str, Vec<usize>> = HashMap::new();
    let mut outgoing: HashMap<&str, Vec<usize>> = HashMap::new();
    let mut undercuts: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, edge) in doc.edges.iter().enumerate() {
        outgoing.entry(edge.source.as_str()).or_default().push(i);
        match (&edge.target, edge.edge_type) {
            (EdgeTarget::Edge(t), EdgeType::Und) => undercuts.entry(t.as_str()).or_default().push(i),
            (EdgeTarget::Node(t), ty) if ty != EdgeType::Und => incoming.entry(t.as_str()).or_default().push(i),
            _ => {}
        }
    }

    let mut polarity: HashMap<&str, Polarity> = HashMap::new();
    let mut queue = VecDeque::new();
    for node in &doc.nodes {
        if node.role == Role::Mcl {
            polarity.insert(&node.adu_id, Polarity::Pro);
            queue.push_back(node.adu_id.as_str());
        }
    }
    for node in &doc.nodes {
        if let Some(&p) = anchors.get(&node.adu_id) {
            if assignable(&node.adu_id) {
                polarity.insert(&node.adu_id, p);
                queue.push_back(node.adu_id.as_str());
            }
        }
    }

    let mut conflicts = Vec::new();
    while let Some(current) = queue.pop_front() {
        let here = polarity[current];
        let mut candidates: Vec<(usize, Polarity)> = Vec::new();
        for &i in incoming.get(current).map(Vec::as_slice).unwrap_or(&[]) {
            let edge = &doc.edges[i];
            let p = if edge.edge_type.flips() { here.flip() } else { here };
            candidates.push((i, p));
        }
        for &o in outgoing.get(current).map(Vec::as_slice).unwrap_or(&[]) {
            let attacked = doc.edges[o].edge_id.as_str();
            for &u in undercuts.get(attacked).map(Vec::as_slice).unwrap_or(&[]) {
                candidates.push((u, here.flip()));
            }
        }
        candidates.sort_by_key(|(i, _)| *i);
        for (i, p) in candidates {
            let edge = &doc.edges[i];
            let src = edge.source.as_str();
            if !assignable(src) {
                continue;
            }
            match polarity.get(src) {
                None => {
                    polarity.insert(src, p);
                    queue.push_back(src);
                }
                Some(&kept) if kept != p => conflicts.push(PolarityConflict {
                    adu_id: src.to_string(),
                    kept,
                    rejected: p,
                    via_edge: edge.edge_id.clone(),
                }),
                Some(_) => {}
            }
        }
    }

    let mut document = doc.clone();
    let mut unreachable = Vec::new();
    let mut changed = Vec::new();
    for node in &mut document.nodes {
        if !node.role.is_argumentative() {
            continue;
        }
        let after = match polarity.get(node.adu_id.as_str()) {
            Some(&p) => Role::from(p),
            None => {
                unreachable.push(node.adu_id.clone());
                Role::Neut
            }
        };
        if after != node.role {
            changed.push(RoleChange {
                adu_id: node.adu_id.clone(),
                before: node.role,
                after,
            });
            node.role = after;
        }
    }
    for c in &conflicts {
        log::debug!(
            "{}: polarity conflict on {} via {} (kept {:?})",
            doc.doc_id,
            c.adu_id,
            c.via_edge,
            c.kept
        );
    }

    Propagation {
        document,
        unreachable,
        conflicts,
        changed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jaas::model::{JaasEdge, JaasNode, SourceCorpus};
    use crate::jaas::validate::validate_graph;

    fn node(id: &str, role: Role, order: usize) -> JaasNode {
        JaasNode {
            adu_id: id.into(),
            role,
            text: id.into(),
            char_span: None,
            order_index: order,
        }
    }

    fn doc(nodes: Vec<JaasNode>, edges: Vec<JaasEdge>) -> JaasDocument {
        JaasDocument {
            doc_id: "d".into(),
            source_corpus: SourceCorpus::Persessays,
            topic_text: String::new(),
            nodes,
            edges,
        }
    }

    fn role_of(p: &Propagation, id: &str) -> Role {
        p.document.node(id).unwrap().role
    }

    #[test]
    fn support_of_major_claim_is_pro() {
        let d = doc(
            vec![node("m", Role::Mcl, 0), node("c", Role::Opp, 1)],
            vec![JaasEdge::to_node("e1", "c", "m", EdgeType::Sup)],
        );
        let p = propagate_polarity(&d);
        assert_eq!(role_of(&p, "c"), Role::Pro);
        assert_eq!(p.changed.len(), 1);
    }

    #[test]
    fn rebuttal_of_pro_claim_is_opp() {
        let d = doc(
            vec![node("m", Role::Mcl, 0), node("c", Role::Pro, 1), node("p", Role::Pro, 2)],
            vec![
                JaasEdge::to_node("e1", "c", "m", EdgeType::Sup),
                JaasEdge::to_node("e2", "p", "c", EdgeType::Reb),
            ],
        );
        assert_eq!(role_of(&propagate_polarity(&d), "p"), Role::Opp);
    }

    #[test]
    fn support_chain_then_rebuttal() {
        let d = doc(
            vec![
                node("m", Role::Mcl, 0),
                node("c", Role::Pro, 1),
                node("p1", Role::Pro, 2),
                node("p2", Role::Pro, 3),
            ],
            vec![
                JaasEdge::to_node("e1", "c", "m", EdgeType::Sup),
                JaasEdge::to_node("e2", "p1", "c", EdgeType::Reb),
                JaasEdge::to_node("e3", "p2", "p1", EdgeType::Sup),
            ],
        );
        let p = propagate_polarity(&d);
        assert_eq!(role_of(&p, "p1"), Role::Opp);
        assert_eq!(role_of(&p, "p2"), Role::Opp);
    }

    #[test]
    fn undercut_flips_relative_to_attacked_source() {
        // o rebuts m; u undercuts that rebuttal and so sides with m.
        let d = doc(
            vec![node("m", Role::Mcl, 0), node("o", Role::Pro, 1), node("u", Role::Opp, 2)],
            vec![
                JaasEdge::to_node("e1", "o", "m", EdgeType::Reb),
                JaasEdge::to_edge("e2", "u", "e1", EdgeType::Und),
            ],
        );
        let p = propagate_polarity(&d);
        assert_eq!(role_of(&p, "o"), Role::Opp);
        assert_eq!(role_of(&p, "u"), Role::Pro);
    }

    #[test]
    fn unreachable_nodes_become_neutral() {
        let d = doc(vec![node("m", Role::Mcl, 0), node("x", Role::Pro, 1)], vec![]);
        let p = propagate_polarity(&d);
        assert_eq!(p.unreachable, vec!["x".to_string()]);
        assert_eq!(role_of(&p, "x"), Role::Neut);
    }

    #[test]
    fn anchors_keep_their_stance() {
        let d = doc(
            vec![node("m", Role::Mcl, 0), node("c", Role::Pro, 1), node("p", Role::Pro, 2)],
            vec![JaasEdge::to_node("e1", "p", "c", EdgeType::Sup)],
        );
        let anchors = BTreeMap::from([("c".to_string(), Polarity::Opp)]);
        let p = propagate_polarity_with(&d, &anchors);
        assert_eq!(role_of(&p, "c"), Role::Opp);
        assert_eq!(role_of(&p, "p"), Role::Opp);
    }

    #[test]
    fn conflicting_paths_are_logged() {
        let d = doc(
            vec![
                node("m", Role::Mcl, 0),
                node("a", Role::Pro, 1),
                node("b", Role::Pro, 2),
                node("x", Role::Pro, 3),
            ],
            vec![
                JaasEdge::to_node("e1", "a", "m", EdgeType::Sup),
                JaasEdge::to_node("e2", "b", "m", EdgeType::Reb),
                JaasEdge::to_node("e3", "x", "a", EdgeType::Sup),
                JaasEdge::to_node("e4", "x", "b", EdgeType::Sup),
            ],
        );
        let p = propagate_polarity(&d);
        assert_eq!(role_of(&p, "x"), Role::Pro);
        assert_eq!(p.conflicts.len(), 1);
        assert_eq!(p.conflicts[0].via_edge, "e4");
        assert!(validate_graph(&p.document).is_valid());
    }

    #[test]
    fn dual_major_claims_both_anchor() {
        let d = doc(
            vec![
                node("m1", Role::Mcl, 0),
                node("m2", Role::Mcl, 1),
                node("c", Role::Pro, 2),
                node("p", Role::Pro, 3),
            ],
            vec![
                JaasEdge::to_node("e1", "c", "m2", EdgeType::Reb),
                JaasEdge::to_node("e2", "p", "m1", EdgeType::Exa),
            ],
        );
        let p = propagate_polarity(&d);
        assert_eq!(role_of(&p, "c"), Role::Opp);
        assert_eq!(role_of(&p, "p"), Role::Pro);
    }
}
