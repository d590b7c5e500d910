use std::collections::{HashMap, HashSet};

use super::{ConversionError, ParseError, Relation, RelationLabel, Segment, SourceGraph, Unit, UnitKind};
use crate::jaas::{EdgeType, JaasDocument, JaasEdge, JaasNode, Role, SourceCorpus};

/// Parse one `<arggraph>` document.
pub fn parse_argmicro(xml: &[u8]) -> Result<SourceGraph, ParseError> {
    let text = std::str::from_utf8(xml).map_err(|e| ParseError::new(0, "document", format!("not UTF-8: {e}")))?;
    let doc = roxmltree::Document::parse(text).map_err(|e| ParseError::new(e.pos().row as usize, "document", e.to_string()))?;
    let line = |n: roxmltree::Node| doc.text_pos_at(n.range().start).row as usize;

    let root = doc.root_element();
    if root.tag_name().name() != "arggraph" {
        return Err(ParseError::new(line(root), root.tag_name().name(), "expected <arggraph> root"));
    }
    let doc_id = root
        .attribute("id")
        .ok_or_else(|| ParseError::new(line(root), "arggraph", "missing `id`"))?
        .to_string();
    let topic = root.attribute("topic_id").unwrap_or_default().to_string();

    let mut graph = SourceGraph {
        doc_id,
        topic,
        text: String::new(),
        segments: Vec::new(),
        units: Vec::new(),
        relations: Vec::new(),
    };
    let mut edge_lines = Vec::new();
    for el in root.children().filter(|n| n.is_element()) {
        let name = el.tag_name().name();
        let attr = |key: &str| {
            el.attribute(key)
                .map(str::to_string)
                .ok_or_else(|| ParseError::new(line(el), name, format!("missing `{key}`")))
        };
        match name {
            "edu" => graph.segments.push(Segment {
                seg_id: attr("id")?,
                text: el.text().unwrap_or_default().trim().to_string(),
                span: None,
            }),
            "adu" => {
                let kind = match attr("type")?.as_str() {
                    "pro" => UnitKind::Proponent,
                    "opp" => UnitKind::Opponent,
                    "neut" | "neutral" => UnitKind::Neutral,
                    other => return Err(ParseError::new(line(el), name, format!("unknown ADU type `{other}`"))),
                };
                graph.units.push(Unit {
                    unit_id: attr("id")?,
                    kind,
                    stance: None,
                });
            }
            "edge" => {
                let ty = attr("type")?;
                let label = match ty.parse::<RelationLabel>() {
                    Ok(l) if !matches!(l, RelationLabel::Supports | RelationLabel::Attacks) => l,
                    _ => return Err(ParseError::new(line(el), name, format!("unknown edge type `{ty}`"))),
                };
                edge_lines.push(line(el));
                graph.relations.push(Relation {
                    rel_id: attr("id")?,
                    source: attr("src")?,
                    target: attr("trg")?,
                    label,
                });
            }
            _ => {}
        }
    }

    let segs: HashSet<&str> = graph.segments.iter().map(|s| s.seg_id.as_str()).collect();
    let units: HashSet<&str> = graph.units.iter().map(|u| u.unit_id.as_str()).collect();
    let rels: HashSet<&str> = graph.relations.iter().map(|r| r.rel_id.as_str()).collect();
    for (r, &ln) in graph.relations.iter().zip(&edge_lines) {
        let ok = if r.label == RelationLabel::Seg {
            segs.contains(r.source.as_str()) && units.contains(r.target.as_str())
        } else {
            units.contains(r.source.as_str()) && (units.contains(r.target.as_str()) || rels.contains(r.target.as_str()))
        };
        if !ok {
            return Err(ParseError::new(
                ln,
                "edge",
                format!("`{}` has a dangling endpoint ({} -> {})", r.rel_id, r.source, r.target),
            ));
        }
    }
    Ok(graph)
}

/// Convert a parsed ArgMicro graph. Edge types carry over; `add` edges that
/// attach to another support edge are redirected to that edge's target node.
/// The proponent ADU(s) without outgoing edges become the major claim.
pub fn to_jaas_argmicro(src: &SourceGraph) -> Result<JaasDocument, ConversionError> {
    let err = |m: String| ConversionError::new(&src.doc_id, m);
    let seg_pos: HashMap<&str, usize> = src.segments.iter().enumerate().map(|(i, s)| (s.seg_id.as_str(), i)).collect();
    let arg_rels: Vec<&Relation> = src.relations.iter().filter(|r| r.label != RelationLabel::Seg).collect();
    let by_id: HashMap<&str, &Relation> = arg_rels.iter().map(|r| (r.rel_id.as_str(), *r)).collect();
    let is_unit = |id: &str| src.units.iter().any(|u| u.unit_id == id);

    let mut first_seg: HashMap<&str, usize> = HashMap::new();
    for r in src.relations.iter().filter(|r| r.label == RelationLabel::Seg) {
        if let Some(&p) = seg_pos.get(r.source.as_str()) {
            let e = first_seg.entry(r.target.as_str()).or_insert(p);
            *e = (*e).min(p);
        }
    }

    let has_outgoing: HashSet<&str> = arg_rels.iter().map(|r| r.source.as_str()).collect();
    let roots: Vec<&str> = src
        .units
        .iter()
        .filter(|u| u.kind == UnitKind::Proponent && !has_outgoing.contains(u.unit_id.as_str()))
        .map(|u| u.unit_id.as_str())
        .collect();
    if roots.is_empty() {
        return Err(err("no root claim: every proponent ADU has an outgoing edge".into()));
    }

    let mut ordered: Vec<&Unit> = src.units.iter().collect();
    for u in &ordered {
        if !first_seg.contains_key(u.unit_id.as_str()) {
            return Err(err(format!("ADU `{}` has no segment", u.unit_id)));
        }
    }
    ordered.sort_by_key(|u| (first_seg[u.unit_id.as_str()], u.unit_id.clone()));
    let nodes = ordered
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let role = match u.kind {
                UnitKind::Proponent if roots.contains(&u.unit_id.as_str()) => Role::Mcl,
                UnitKind::Proponent => Role::Pro,
                UnitKind::Opponent => Role::Opp,
                UnitKind::Neutral => Role::Neut,
                other => return Err(err(format!("ADU `{}` has non-ArgMicro kind {other:?}", u.unit_id))),
            };
            Ok(JaasNode {
                adu_id: u.unit_id.clone(),
                role,
                text: src.unit_text(&u.unit_id),
                char_span: None,
                order_index: i,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut edges = Vec::with_capacity(arg_rels.len());
    for r in &arg_rels {
        let ty = match r.label {
            RelationLabel::Sup => EdgeType::Sup,
            RelationLabel::Exa => EdgeType::Exa,
            RelationLabel::Add => EdgeType::Add,
            RelationLabel::Reb => EdgeType::Reb,
            RelationLabel::Und => EdgeType::Und,
            other => return Err(err(format!("relation `{}` has non-ArgMicro label {other}", r.rel_id))),
        };
        let edge = if is_unit(&r.target) {
            if ty == EdgeType::Und {
                return Err(err(format!("undercut `{}` targets a node", r.rel_id)));
            }
            JaasEdge::to_node(&r.rel_id, &r.source, &r.target, ty)
        } else if ty == EdgeType::Und {
            JaasEdge::to_edge(&r.rel_id, &r.source, &r.target, ty)
        } else if ty == EdgeType::Add {
            let mut target = r.target.as_str();
            let mut hops = 0;
            while !is_unit(target) {
                let next = by_id.get(target).ok_or_else(|| err(format!("`{}` targets unknown `{target}`", r.rel_id)))?;
                target = next.target.as_str();
                hops += 1;
                if hops > arg_rels.len() {
                    return Err(err(format!("`{}` targets a cycle of edges", r.rel_id)));
                }
            }
            JaasEdge::to_node(&r.rel_id, &r.source, target, ty)
        } else {
            return Err(err(format!("{ty} edge `{}` targets an edge", r.rel_id)));
        };
        edges.push(edge);
    }

    Ok(JaasDocument {
        doc_id: src.doc_id.clone(),
        source_corpus: SourceCorpus::Argmicro,
        topic_text: src.topic.clone(),
        nodes,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jaas::{validate_graph, EdgeTarget};

    pub(crate) const FIXTURE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<arggraph id="micro_t001" topic_id="waste_separation" stance="pro">
  <edu id="e1"><![CDATA[Раздельный сбор мусора нужно ввести повсеместно.]]></edu>
  <edu id="e2"><![CDATA[Конечно, это стоит денег,]]></edu>
  <edu id="e3"><![CDATA[но расходы окупаются за несколько лет.]]></edu>
  <edu id="e4"><![CDATA[Кроме того, свалки переполнены,]]></edu>
  <edu id="e5"><![CDATA[а новых мест для них нет.]]></edu>
  <adu id="a1" type="pro"/>
  <adu id="a2" type="opp"/>
  <adu id="a3" type="pro"/>
  <adu id="a4" type="pro"/>
  <adu id="a5" type="pro"/>
  <edge id="c1" src="e1" trg="a1" type="seg"/>
  <edge id="c2" src="e2" trg="a2" type="seg"/>
  <edge id="c3" src="e3" trg="a3" type="seg"/>
  <edge id="c4" src="e4" trg="a4" type="seg"/>
  <edge id="c5" src="e5" trg="a5" type="seg"/>
  <edge id="c6" src="a2" trg="a1" type="reb"/>
  <edge id="c7" src="a3" trg="c6" type="und"/>
  <edge id="c8" src="a4" trg="a1" type="sup"/>
  <edge id="c9" src="a5" trg="c8" type="add"/>
</arggraph>
"#;

    #[test]
    fn parses_fixture() {
        let g = parse_argmicro(FIXTURE.as_bytes()).unwrap();
        assert_eq!(g.doc_id, "micro_t001");
        assert_eq!((g.segments.len(), g.units.len(), g.relations.len()), (5, 5, 9));
        assert_eq!(g.census()[&RelationLabel::Seg], 5);
    }

    #[test]
    fn converts_fixture() {
        let doc = to_jaas_argmicro(&parse_argmicro(FIXTURE.as_bytes()).unwrap()).unwrap();
        assert!(validate_graph(&doc).is_valid(), "{:?}", validate_graph(&doc));
        let roles: Vec<Role> = doc.nodes.iter().map(|n| n.role).collect();
        assert_eq!(roles, [Role::Mcl, Role::Opp, Role::Pro, Role::Pro, Role::Pro]);
        assert_eq!(doc.edges.len(), 4);
        let c9 = doc.edge("c9").unwrap();
        assert_eq!((c9.edge_type, &c9.target), (EdgeType::Add, &EdgeTarget::Node("a1".into())));
        assert_eq!(doc.edge("c7").unwrap().target, EdgeTarget::Edge("c6".into()));
        assert_eq!(doc.node("a2").unwrap().text, "Конечно, это стоит денег,");
    }

    #[test]
    fn multi_segment_adu_text_is_joined_in_order() {
        let xml = r#"<arggraph id="d"><edu id="e1">Один</edu><edu id="e2">два.</edu>
            <adu id="a1" type="pro"/><edge id="c2" src="e2" trg="a1" type="seg"/><edge id="c1" src="e1" trg="a1" type="seg"/></arggraph>"#;
        let doc = to_jaas_argmicro(&parse_argmicro(xml.as_bytes()).unwrap()).unwrap();
        assert_eq!(doc.nodes[0].text, "Один два.");
        assert_eq!(doc.nodes[0].role, Role::Mcl);
        assert!(doc.edges.is_empty());
    }

    #[test]
    fn malformed_inputs() {
        let truncated = &FIXTURE[..FIXTURE.len() / 2];
        assert!(parse_argmicro(truncated.as_bytes()).is_err());

        let bad_type = FIXTURE.replace(r#"type="und""#, r#"type="zap""#);
        let e = parse_argmicro(bad_type.as_bytes()).unwrap_err();
        assert_eq!(e.element, "edge");
        assert_eq!(e.line, 19);
        assert!(e.message.contains("zap"));

        let dangling = FIXTURE.replace(r#"trg="c8""#, r#"trg="c99""#);
        assert!(parse_argmicro(dangling.as_bytes()).unwrap_err().message.contains("dangling"));
    }

    #[test]
    fn no_root_claim() {
        let xml = r#"<arggraph id="d"><edu id="e1">x</edu><edu id="e2">y</edu><adu id="a1" type="pro"/><adu id="a2" type="pro"/>
            <edge id="s1" src="e1" trg="a1" type="seg"/><edge id="s2" src="e2" trg="a2" type="seg"/>
            <edge id="c1" src="a1" trg="a2" type="sup"/><edge id="c2" src="a2" trg="a1" type="sup"/></arggraph>"#;
        assert!(to_jaas_argmicro(&parse_argmicro(xml.as_bytes()).unwrap()).is_err());
    }
}
