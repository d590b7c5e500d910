use std::collections::{BTreeMap, HashMap, HashSet};

use super::templates::TemplateLexicon;
use super::{ConversionError, ParseError, Relation, RelationLabel, Segment, SourceGraph, Stance, Unit, UnitKind};
use crate::jaas::{propagate_polarity_with, EdgeType, JaasDocument, JaasEdge, JaasNode, Polarity, Role, SourceCorpus};

/// Parse a brat standoff pair. The first line of the essay text is its
/// title/prompt; body sentences that overlap no entity become neutral units.
pub fn parse_persessays(doc_id: &str, text: &[u8], ann: &[u8]) -> Result<SourceGraph, ParseError> {
    let text = std::str::from_utf8(text).map_err(|e| ParseError::new(0, "txt", format!("not UTF-8: {e}")))?;
    let ann = std::str::from_utf8(ann).map_err(|e| ParseError::new(0, "ann", format!("not UTF-8: {e}")))?;
    let chars: Vec<char> = text.chars().collect();
    let slice = |s: usize, e: usize| chars[s..e].iter().collect::<String>();

    let mut entities: Vec<(Unit, (usize, usize))> = Vec::new();
    let mut stances: Vec<(usize, String, Stance)> = Vec::new();
    let mut relations: Vec<(usize, Relation)> = Vec::new();

    for (i, raw) in ann.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split('\t');
        let id = cols.next().unwrap_or_default().to_string();
        let body = cols.next().ok_or_else(|| ParseError::new(ln, &id, "missing annotation body"))?;
        let fields: Vec<&str> = body.split_whitespace().collect();
        match id.chars().next() {
            Some('T') => {
                let kind = match fields.first().copied() {
                    Some("MajorClaim") => UnitKind::MajorClaim,
                    Some("Claim") => UnitKind::Claim,
                    Some("Premise") => UnitKind::Premise,
                    other => {
                        return Err(ParseError::new(ln, &id, format!("unknown entity type `{}`", other.unwrap_or(""))))
                    }
                };
                let span = parse_span(&body[fields[0].len()..])
                    .ok_or_else(|| ParseError::new(ln, &id, format!("bad span in `{body}`")))?;
                if span.0 >= span.1 || span.1 > chars.len() {
                    return Err(ParseError::new(ln, &id, format!("span {}..{} outside text", span.0, span.1)));
                }
                entities.push((
                    Unit {
                        unit_id: id,
                        kind,
                        stance: None,
                    },
                    span,
                ));
            }
            Some('A') => {
                let (target, value) = match fields.as_slice() {
                    ["Stance", target, value] => (*target, *value),
                    _ => return Err(ParseError::new(ln, &id, format!("unsupported attribute `{body}`"))),
                };
                let stance = match value {
                    "For" => Stance::For,
                    "Against" => Stance::Against,
                    other => return Err(ParseError::new(ln, &id, format!("unknown stance `{other}`"))),
                };
                stances.push((ln, target.to_string(), stance));
            }
            Some('R') => {
                let label = match fields.first().copied() {
                    Some("supports") => RelationLabel::Supports,
                    Some("attacks") => RelationLabel::Attacks,
                    other => {
                        return Err(ParseError::new(ln, &id, format!("unknown relation `{}`", other.unwrap_or(""))))
                    }
                };
                let arg = |name: &str| {
                    fields
                        .iter()
                        .find_map(|f| f.strip_prefix(name).and_then(|r| r.strip_prefix(':')))
                        .map(str::to_string)
                        .ok_or_else(|| ParseError::new(ln, &id, format!("missing {name}")))
                };
                relations.push((
                    ln,
                    Relation {
                        rel_id: id.clone(),
                        source: arg("Arg1")?,
                        target: arg("Arg2")?,
                        label,
                    },
                ));
            }
            _ => return Err(ParseError::new(ln, &id, "unknown annotation kind")),
        }
    }

    let known: HashSet<String> = entities.iter().map(|(u, _)| u.unit_id.clone()).collect();
    for (ln, target, stance) in stances {
        let (unit, _) = entities
            .iter_mut()
            .find(|(u, _)| u.unit_id == target)
            .ok_or_else(|| ParseError::new(ln, "A", format!("stance on unknown entity `{target}`")))?;
        unit.stance = Some(stance);
    }
    for (ln, r) in &relations {
        for end in [&r.source, &r.target] {
            if !known.contains(end) {
                return Err(ParseError::new(*ln, &r.rel_id, format!("relation endpoint `{end}` does not exist")));
            }
        }
    }

    let body_start = chars.iter().position(|&c| c == '\n').map_or(chars.len(), |p| p + 1);
    let topic = slice(0, body_start).trim().to_string();
    let taken: Vec<(usize, usize)> = entities.iter().map(|(_, s)| *s).collect();
    let mut units = entities;
    for (k, (s, e)) in sentences(&chars, body_start)
        .into_iter()
        .filter(|&(s, e)| !taken.iter().any(|&(ts, te)| ts < e && s < te))
        .enumerate()
    {
        units.push((
            Unit {
                unit_id: format!("N{}", k + 1),
                kind: UnitKind::Neutral,
                stance: None,
            },
            (s, e),
        ));
    }
    units.sort_by_key(|(u, span)| (span.0, span.1, u.unit_id.clone()));

    let mut graph = SourceGraph {
        doc_id: doc_id.to_string(),
        topic,
        text: text.to_string(),
        segments: Vec::new(),
        units: Vec::new(),
        relations: Vec::new(),
    };
    for (unit, (s, e)) in units {
        let seg_id = format!("seg_{}", unit.unit_id);
        graph.segments.push(Segment {
            seg_id: seg_id.clone(),
            text: slice(s, e).trim().to_string(),
            span: Some((s, e)),
        });
        graph.relations.push(Relation {
            rel_id: seg_id.clone(),
            source: seg_id,
            target: unit.unit_id.clone(),
            label: RelationLabel::Seg,
        });
        graph.units.push(unit);
    }
    graph.relations.extend(relations.into_iter().map(|(_, r)| r));
    Ok(graph)
}

/// `start end` or discontinuous `s1 e1;s2 e2` → covering span.
fn parse_span(s: &str) -> Option<(usize, usize)> {
    let mut lo = usize::MAX;
    let mut hi = 0;
    for part in s.trim().split(';') {
        let mut it = part.split_whitespace();
        let a: usize = it.next()?.parse().ok()?;
        let b: usize = it.next()?.parse().ok()?;
        if it.next().is_some() {
            return None;
        }
        lo = lo.min(a);
        hi = hi.max(b);
    }
    (lo != usize::MAX).then_some((lo, hi))
}

/// Trimmed sentence spans from `from` on; breaks after `.!?…` runs and at newlines.
fn sentences(chars: &[char], from: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut push = |s: usize, e: usize| {
        let mut s = s;
        let mut e = e;
        while s < e && chars[s].is_whitespace() {
            s += 1;
        }
        while e > s && chars[e - 1].is_whitespace() {
            e -= 1;
        }
        if chars[s..e].iter().any(|c| c.is_alphanumeric()) {
            out.push((s, e));
        }
    };
    let mut start = from;
    let mut i = from;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            push(start, i);
            start = i + 1;
        } else if matches!(c, '.' | '!' | '?' | '…') {
            while i + 1 < chars.len() && matches!(chars[i + 1], '.' | '!' | '?' | '…' | '"' | '»' | ')') {
                i += 1;
            }
            push(start, i + 1);
            start = i + 1;
        }
        i += 1;
    }
    push(start, chars.len());
    out
}

/// Text between the enclosing sentence start (or the previous unit) and
/// `start`; essay spans usually leave out the opening connective.
fn lead_in(chars: &[char], spans: &[(usize, usize)], start: usize) -> String {
    let mut from = start.min(chars.len());
    while from > 0 && !matches!(chars[from - 1], '.' | '!' | '?' | '…' | '\n') {
        from -= 1;
    }
    let prev_end = spans.iter().map(|s| s.1).filter(|&e| e <= start).max().unwrap_or(0);
    chars[from.max(prev_end)..start.min(chars.len())].iter().collect()
}

#[derive(Debug, Clone)]
pub struct PersEssaysConversion {
    pub document: JaasDocument,
    /// `sup` edges whose source (with its sentence lead-in) contains an
    /// exemplification template.
    pub flagged_exa: Vec<String>,
    /// Argumentative units the propagation could not reach (now `neut`).
    pub unreachable: Vec<String>,
}

/// Convert a parsed essay. Claims are linked to every major claim according
/// to their stance (`sup` for For, `reb` for Against) unless the annotation
/// already relates them; premise roles follow from polarity propagation.
pub fn to_jaas_persessays(src: &SourceGraph, templates: &TemplateLexicon) -> Result<PersEssaysConversion, ConversionError> {
    let err = |m: String| ConversionError::new(&src.doc_id, m);
    let kinds: HashMap<&str, UnitKind> = src.units.iter().map(|u| (u.unit_id.as_str(), u.kind)).collect();

    let nodes: Vec<JaasNode> = src
        .units
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let role = match (u.kind, u.stance) {
                (UnitKind::MajorClaim, _) => Role::Mcl,
                (UnitKind::Claim, Some(Stance::Against)) => Role::Opp,
                (UnitKind::Claim | UnitKind::Premise, _) => Role::Pro,
                (UnitKind::Neutral, _) => Role::Neut,
                (other, _) => return Err(err(format!("unit `{}` has non-essay kind {other:?}", u.unit_id))),
            };
            let span = src.segments.iter().find(|s| s.seg_id == format!("seg_{}", u.unit_id)).and_then(|s| s.span);
            Ok(JaasNode {
                adu_id: u.unit_id.clone(),
                role,
                text: src.unit_text(&u.unit_id),
                char_span: span,
                order_index: i,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut edges = Vec::new();
    let mut linked: HashSet<(&str, &str)> = HashSet::new();
    for r in src.relations.iter().filter(|r| r.label != RelationLabel::Seg) {
        for end in [&r.source, &r.target] {
            match kinds.get(end.as_str()) {
                None => return Err(err(format!("relation `{}` endpoint `{end}` is not a unit", r.rel_id))),
                Some(UnitKind::Neutral) => {
                    return Err(err(format!("relation `{}` endpoint `{end}` is neutral", r.rel_id)))
                }
                _ => {}
            }
        }
        let ty = match r.label {
            RelationLabel::Supports => EdgeType::Sup,
            RelationLabel::Attacks => EdgeType::Reb,
            other => return Err(err(format!("relation `{}` has non-essay label {other}", r.rel_id))),
        };
        linked.insert((r.source.as_str(), r.target.as_str()));
        edges.push(JaasEdge::to_node(&r.rel_id, &r.source, &r.target, ty));
    }

    let majors: Vec<&Unit> = src.units.iter().filter(|u| u.kind == UnitKind::MajorClaim).collect();
    let mut anchors = BTreeMap::new();
    for claim in src.units.iter().filter(|u| u.kind == UnitKind::Claim) {
        let Some(stance) = claim.stance else { continue };
        let polarity = match stance {
            Stance::For => Polarity::Pro,
            Stance::Against => Polarity::Opp,
        };
        anchors.insert(claim.unit_id.clone(), polarity);
        for mcl in &majors {
            if linked.contains(&(claim.unit_id.as_str(), mcl.unit_id.as_str())) {
                continue;
            }
            let ty = match stance {
                Stance::For => EdgeType::Sup,
                Stance::Against => EdgeType::Reb,
            };
            edges.push(JaasEdge::to_node(
                format!("{}_{}", claim.unit_id, mcl.unit_id),
                &claim.unit_id,
                &mcl.unit_id,
                ty,
            ));
        }
    }

    let draft = JaasDocument {
        doc_id: src.doc_id.clone(),
        source_corpus: SourceCorpus::Persessays,
        topic_text: src.topic.clone(),
        nodes,
        edges,
    };
    let propagated = propagate_polarity_with(&draft, &anchors);
    let doc = &propagated.document;
    let spans: Vec<(usize, usize)> = doc.nodes.iter().filter_map(|n| n.char_span).collect();
    let chars: Vec<char> = src.text.chars().collect();
    let flagged_exa = doc
        .edges
        .iter()
        .filter(|e| e.edge_type == EdgeType::Sup)
        .filter(|e| {
            let node = doc.node(&e.source).expect("validated endpoint");
            let lead = node.char_span.map(|s| lead_in(&chars, &spans, s.0)).unwrap_or_default();
            templates.matches(&format!("{lead} {}", node.text))
        })
        .map(|e| e.edge_id.clone())
        .collect();
    Ok(PersEssaysConversion {
        document: propagated.document,
        flagged_exa,
        unreachable: propagated.unreachable,
    })
}
