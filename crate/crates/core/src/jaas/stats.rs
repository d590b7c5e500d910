use std::collections::BTreeMap;

use serde::Serialize;

use super::model::{EdgeType, JaasDocument, Role};
use super::polarity::propagate_polarity;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoleCount {
    pub count: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub texts: usize,
    pub adus_by_role: BTreeMap<Role, RoleCount>,
    pub adus_total: usize,
    pub edges_by_type: BTreeMap<EdgeType, usize>,
    pub dual_mcl_texts: usize,
}

impl CorpusStats {
    pub fn role(&self, role: Role) -> RoleCount {
        self.adus_by_role[&role]
    }

    pub fn edges(&self, ty: EdgeType) -> usize {
        self.edges_by_type[&ty]
    }
}

pub fn corpus_stats<'a, I>(docs: I) -> CorpusStats
where
    I: IntoIterator<Item = &'a JaasDocument>,
{
    let mut texts = 0;
    let mut dual = 0;
    let mut roles: BTreeMap<Role, usize> = Role::ALL.iter().map(|r| (*r, 0)).collect();
    let mut edges: BTreeMap<EdgeType, usize> = EdgeType::ALL.iter().map(|t| (*t, 0)).collect();
    for doc in docs {
        texts += 1;
        if doc.is_dual_mcl() {
            dual += 1;
        }
        for n in &doc.nodes {
            *roles.get_mut(&n.role).unwrap() += 1;
        }
        for e in &doc.edges {
            *edges.get_mut(&e.edge_type).unwrap() += 1;
        }
    }
    let total: usize = roles.values().sum();
    let adus_by_role = roles
        .into_iter()
        .map(|(r, count)| {
            let percent = if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 };
            (r, RoleCount { count, percent })
        })
        .collect();
    CorpusStats {
        texts,
        adus_by_role,
        adus_total: total,
        edges_by_type: edges,
        dual_mcl_texts: dual,
    }
}

/// How stored roles differ from what parity propagation would assign.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PropagationDelta {
    pub changed: usize,
    pub transitions: BTreeMap<String, usize>,
    pub unreachable: usize,
    pub conflicts: usize,
}

pub fn propagation_delta<'a, I>(docs: I) -> PropagationDelta
where
    I: IntoIterator<Item = &'a JaasDocument>,
{
    let mut delta = PropagationDelta::default();
    for doc in docs {
        let p = propagate_polarity(doc);
        delta.unreachable += p.unreachable.len();
        delta.conflicts += p.conflicts.len();
        for c in p.changed {
            delta.changed += 1;
            *delta.transitions.entry(format!("{}->{}", c.before, c.after)).or_default() += 1;
        }
    }
    delta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jaas::model::{JaasEdge, JaasNode, SourceCorpus};

    fn doc(id: &str, roles: &[Role], edges: Vec<JaasEdge>) -> JaasDocument {
        JaasDocument {
            doc_id: id.into(),
            source_corpus: SourceCorpus::Argmicro,
            topic_text: String::new(),
            nodes: roles
                .iter()
                .enumerate()
                .map(|(i, r)| JaasNode {
                    adu_id: format!("a{i}"),
                    role: *r,
                    text: "t".into(),
                    char_span: None,
                    order_index: i,
                })
                .collect(),
            edges,
        }
    }

    #[test]
    fn empty_corpus_is_all_zero() {
        let s = corpus_stats(std::iter::empty());
        assert_eq!(s.texts, 0);
        assert_eq!(s.adus_total, 0);
        assert!(s.adus_by_role.values().all(|c| c.count == 0 && c.percent == 0.0));
        assert!(s.edges_by_type.values().all(|c| *c == 0));
    }

    #[test]
    fn counts_and_percents() {
        let docs = vec![
            doc("d1", &[Role::Mcl, Role::Pro, Role::Opp], vec![JaasEdge::to_node("c1", "a1", "a0", EdgeType::Sup)]),
            doc("d2", &[Role::Mcl, Role::Mcl, Role::Neut, Role::Pro, Role::Pro], vec![]),
        ];
        let s = corpus_stats(&docs);
        assert_eq!(s.texts, 2);
        assert_eq!(s.adus_total, 8);
        assert_eq!(s.role(Role::Pro).count, 3);
        assert_eq!(s.role(Role::Mcl).count, 3);
        assert_eq!(s.edges(EdgeType::Sup), 1);
        assert_eq!(s.dual_mcl_texts, 1);
        let sum: f64 = s.adus_by_role.values().map(|c| c.percent).sum();
        assert!((sum - 100.0).abs() < 1e-9);

        let mut rev = docs.clone();
        rev.reverse();
        assert_eq!(corpus_stats(&rev), s);
    }

    #[test]
    fn delta_reports_relabelled_nodes() {
        let d = doc("d1", &[Role::Mcl, Role::Pro], vec![JaasEdge::to_node("c1", "a1", "a0", EdgeType::Reb)]);
        let delta = propagation_delta([&d]);
        assert_eq!(delta.changed, 1);
        assert_eq!(delta.transitions["pro->opp"], 1);
    }
}
