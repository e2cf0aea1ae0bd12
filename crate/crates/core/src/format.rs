//! The line-oriented net format and the JSON documents for processes,
//! certificates and reports.
//!
//! ```text
//! # comments run to the end of the line
//! net NAME
//! place ID [tokens N]
//! trans ID [in ID[:W] ...] [out ID[:W] ...]
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::conflict::{ConflictReport, Verdict, WitnessKind};
use crate::diamond::LargestProcessWitness;
use crate::error::{Error, Result};
use crate::iso::Isomorphism;
use crate::net::{Marking, NamedArcs, Net, NetBuilder, Step, TransId};
use crate::process::{CondId, Event, EventId, Process};
use crate::seqequiv::AdjacencyCertificate;
use crate::swapping::SwapCertificate;

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Whitespace-separated tokens of a line with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(b, t)| (line[..b].chars().count() + 1, t))
        .collect()
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| !c.is_whitespace() && c != ':' && c != '#')
}

fn parse_count(line: usize, col: usize, s: &str, what: &str) -> Result<u64> {
    if s.is_empty() || !s.chars().all(|c| c.is_ascii_digit()) {
        return Err(parse_err(
            line,
            col,
            format!("expected a non-negative {what}, found `{s}`"),
        ));
    }
    s.parse()
        .map_err(|_| parse_err(line, col, format!("{what} `{s}` is too large")))
}

/// Parses the text format. Syntax errors carry a location; violations of
/// the net well-formedness clauses come back as [`Error::InvalidNet`].
pub fn parse_net(text: &str) -> Result<Net> {
    let mut name: Option<String> = None;
    let mut builder_places: Vec<(String, u64)> = Vec::new();
    let mut builder_trans: Vec<(String, NamedArcs, NamedArcs)> = Vec::new();
    let mut declared: HashMap<String, (usize, bool)> = HashMap::new();
    let mut arc_refs: Vec<(usize, usize, String)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        let Some(&(col, kw)) = toks.first() else { continue };
        match kw {
            "net" => {
                if name.is_some() {
                    return Err(parse_err(ln, col, "duplicate `net` header"));
                }
                if !builder_places.is_empty() || !builder_trans.is_empty() {
                    return Err(parse_err(ln, col, "`net` header must come first"));
                }
                let rest: Vec<&str> = toks[1..].iter().map(|(_, t)| *t).collect();
                if rest.is_empty() {
                    return Err(parse_err(ln, col + 3, "expected a net name"));
                }
                name = Some(rest.join(" "));
            }
            "place" => {
                let Some(&(c, id)) = toks.get(1) else {
                    return Err(parse_err(ln, col + 5, "expected a place identifier"));
                };
                if !is_ident(id) {
                    return Err(parse_err(ln, c, format!("invalid identifier `{id}`")));
                }
                let tokens_n = match toks.get(2) {
                    None => 0,
                    Some(&(c2, "tokens")) => {
                        let Some(&(c3, n)) = toks.get(3) else {
                            return Err(parse_err(ln, c2 + 6, "expected a token count"));
                        };
                        if let Some(&(c4, extra)) = toks.get(4) {
                            return Err(parse_err(ln, c4, format!("unexpected `{extra}`")));
                        }
                        parse_count(ln, c3, n, "token count")?
                    }
                    Some(&(c2, other)) => return Err(parse_err(ln, c2, format!("expected `tokens`, found `{other}`"))),
                };
                if declared.insert(id.to_string(), (ln, true)).is_some() {
                    return Err(parse_err(ln, c, format!("duplicate declaration of `{id}`")));
                }
                builder_places.push((id.to_string(), tokens_n));
            }
            "trans" => {
                let Some(&(c, id)) = toks.get(1) else {
                    return Err(parse_err(ln, col + 5, "expected a transition identifier"));
                };
                if !is_ident(id) {
                    return Err(parse_err(ln, c, format!("invalid identifier `{id}`")));
                }
                let mut ins = Vec::new();
                let mut outs = Vec::new();
                // 0: before any section, 1: in, 2: out
                let mut section = 0;
                for &(ac, tok) in &toks[2..] {
                    match tok {
                        "in" if section == 0 => section = 1,
                        "out" if section < 2 => section = 2,
                        "in" | "out" => return Err(parse_err(ln, ac, format!("unexpected `{tok}`"))),
                        _ if section == 0 => {
                            return Err(parse_err(ln, ac, format!("expected `in` or `out`, found `{tok}`")))
                        }
                        arc => {
                            let (place, w) = match arc.split_once(':') {
                                Some((p, w)) => (p, parse_count(ln, ac + p.chars().count() + 1, w, "weight")?),
                                None => (arc, 1),
                            };
                            if !is_ident(place) {
                                return Err(parse_err(ln, ac, format!("invalid identifier `{place}`")));
                            }
                            if w == 0 {
                                return Err(parse_err(ln, ac, "arc weights must be positive"));
                            }
                            arc_refs.push((ln, ac, place.to_string()));
                            if section == 1 {
                                ins.push((place.to_string(), w));
                            } else {
                                outs.push((place.to_string(), w));
                            }
                        }
                    }
                }
                if let Some((_, true)) = declared.get(id) {
                    // a place of the same name is a well-formedness violation, reported by validation
                } else if declared.insert(id.to_string(), (ln, false)).is_some() {
                    return Err(parse_err(ln, c, format!("duplicate declaration of `{id}`")));
                }
                if builder_trans.iter().any(|(n, _, _)| n == id) {
                    return Err(parse_err(ln, c, format!("duplicate declaration of `{id}`")));
                }
                builder_trans.push((id.to_string(), ins, outs));
            }
            other => return Err(parse_err(ln, col, format!("unknown keyword `{other}`"))),
        }
    }
    for (ln, col, place) in arc_refs {
        if !builder_places.iter().any(|(p, _)| *p == place) {
            return Err(parse_err(ln, col, format!("unknown place `{place}`")));
        }
    }
    let mut b = NetBuilder::new(name.unwrap_or_else(|| "net".to_string()));
    for (p, k) in builder_places {
        b = b.place(p, k);
    }
    for (t, ins, outs) in builder_trans {
        b = b.transition_owned(t, ins, outs);
    }
    b.build()
}

/// Renders `net` in the text format; [`parse_net`] reads it back unchanged.
pub fn print_net(net: &Net) -> String {
    let mut out = String::new();
    writeln!(out, "net {}", net.name()).unwrap();
    for s in net.place_ids() {
        let k = net.initial_marking().count(&s);
        if k == 0 {
            writeln!(out, "place {}", net.place_name(s)).unwrap();
        } else {
            writeln!(out, "place {} tokens {k}", net.place_name(s)).unwrap();
        }
    }
    let arcs = |m: &Marking| -> String { m.iter().map(|(s, k)| format!(" {}:{k}", net.place_name(*s))).collect() };
    for t in net.transition_ids() {
        writeln!(
            out,
            "trans {} in{} out{}",
            net.transition_name(t),
            arcs(net.pre(t)),
            arcs(net.post(t))
        )
        .unwrap();
    }
    out
}

pub fn marking_doc(net: &Net, m: &Marking) -> BTreeMap<String, u64> {
    m.iter().map(|(s, k)| (net.place_name(*s).to_string(), k)).collect()
}

pub fn step_doc(net: &Net, g: &Step) -> BTreeMap<String, u64> {
    g.iter()
        .map(|(t, k)| (net.transition_name(*t).to_string(), k))
        .collect()
}

pub fn word_doc(net: &Net, w: &[TransId]) -> Vec<String> {
    w.iter().map(|t| net.transition_name(*t).to_string()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceDoc {
    pub id: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub id: String,
    pub label: String,
    pub pre: Vec<String>,
    pub post: Vec<String>,
}

/// A process as exchanged on disk: occurrence places and transitions with
/// their labels, the arcs as pre- and post-lists, and the initial cut.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProcessDoc {
    pub places: Vec<PlaceDoc>,
    pub transitions: Vec<TransitionDoc>,
    /// Defaults to the places without a producer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<String>>,
}

impl ProcessDoc {
    pub fn from_process(net: &Net, p: &Process) -> Self {
        let ids = |set: &BTreeSet<CondId>| set.iter().map(ToString::to_string).collect();
        ProcessDoc {
            places: p
                .conditions()
                .iter()
                .map(|(c, s)| PlaceDoc {
                    id: c.to_string(),
                    label: net.place_name(*s).to_string(),
                })
                .collect(),
            transitions: p
                .events()
                .iter()
                .map(|(e, ev)| TransitionDoc {
                    id: e.to_string(),
                    label: net.transition_name(ev.label).to_string(),
                    pre: ids(&ev.pre),
                    post: ids(&ev.post),
                })
                .collect(),
            initial: Some(ids(p.initial())),
        }
    }

    /// Resolves labels against `net`. Identifiers of the form `s<n>` and
    /// `e<n>` are kept; otherwise nodes are numbered in document order.
    /// Processhood itself is not checked here.
    pub fn to_process(&self, net: &Net) -> Result<Process> {
        let keep = |prefix: char, ids: Vec<&str>| -> Option<Vec<u32>> {
            let nums: Option<Vec<u32>> = ids
                .iter()
                .map(|s| s.strip_prefix(prefix).and_then(|n| n.parse().ok()))
                .collect();
            let nums = nums?;
            let distinct: BTreeSet<u32> = nums.iter().copied().collect();
            (distinct.len() == nums.len()).then_some(nums)
        };
        let cond_nums = keep('s', self.places.iter().map(|p| p.id.as_str()).collect())
            .unwrap_or_else(|| (0..self.places.len() as u32).collect());
        let event_nums = keep('e', self.transitions.iter().map(|t| t.id.as_str()).collect())
            .unwrap_or_else(|| (0..self.transitions.len() as u32).collect());

        let mut cond_ids: HashMap<&str, CondId> = HashMap::new();
        let mut conditions = BTreeMap::new();
        for (doc, n) in self.places.iter().zip(cond_nums) {
            if cond_ids.insert(doc.id.as_str(), CondId(n)).is_some() {
                return Err(Error::DuplicateDeclaration(doc.id.clone()));
            }
            let s = net
                .place_id(&doc.label)
                .ok_or_else(|| Error::UnknownNode(doc.label.clone()))?;
            conditions.insert(CondId(n), s);
        }
        let resolve = |ids: &[String]| -> Result<BTreeSet<CondId>> {
            ids.iter()
                .map(|i| {
                    cond_ids
                        .get(i.as_str())
                        .copied()
                        .ok_or_else(|| Error::UnknownNode(i.clone()))
                })
                .collect()
        };
        let mut events = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (doc, n) in self.transitions.iter().zip(event_nums) {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateDeclaration(doc.id.clone()));
            }
            let label = net
                .transition_id(&doc.label)
                .ok_or_else(|| Error::UnknownNode(doc.label.clone()))?;
            events.insert(
                EventId(n),
                Event {
                    label,
                    pre: resolve(&doc.pre)?,
                    post: resolve(&doc.post)?,
                },
            );
        }
        let initial = match &self.initial {
            Some(ids) => resolve(ids)?,
            None => {
                let produced: BTreeSet<CondId> = events.values().flat_map(|e: &Event| e.post.iter().copied()).collect();
                conditions.keys().copied().filter(|c| !produced.contains(c)).collect()
            }
        };
        Ok(Process::from_parts(conditions, events, initial))
    }
}

pub fn process_to_json(net: &Net, p: &Process) -> String {
    serde_json::to_string_pretty(&ProcessDoc::from_process(net, p)).expect("serializable")
}

pub fn process_from_json(net: &Net, text: &str) -> Result<Process> {
    let doc: ProcessDoc = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.column(), e.to_string()))?;
    doc.to_process(net)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranspositionDoc {
    pub position: usize,
    pub first: String,
    pub second: String,
    pub marking: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyDoc {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub steps: Vec<TranspositionDoc>,
}

impl AdjacencyDoc {
    pub fn new(net: &Net, c: &AdjacencyCertificate) -> Self {
        AdjacencyDoc {
            source: word_doc(net, &c.source),
            target: word_doc(net, &c.target()),
            steps: c
                .steps
                .iter()
                .map(|s| TranspositionDoc {
                    position: s.position,
                    first: net.transition_name(s.first).to_string(),
                    second: net.transition_name(s.second).to_string(),
                    marking: marking_doc(net, &s.marking),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapMoveDoc {
    pub p: String,
    pub q: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwapCertificateDoc {
    pub start: ProcessDoc,
    pub moves: Vec<SwapMoveDoc>,
    pub end: ProcessDoc,
    /// Maps the nodes of the last swapped process onto `end`.
    pub witness: BTreeMap<String, String>,
}

impl SwapCertificateDoc {
    pub fn new(net: &Net, c: &SwapCertificate) -> Self {
        SwapCertificateDoc {
            start: ProcessDoc::from_process(net, &c.start),
            moves: c
                .moves
                .iter()
                .map(|m| SwapMoveDoc {
                    p: m.p.to_string(),
                    q: m.q.to_string(),
                })
                .collect(),
            end: ProcessDoc::from_process(net, &c.end),
            witness: iso_doc(&c.witness),
        }
    }
}

fn iso_doc(w: &Isomorphism) -> BTreeMap<String, String> {
    w.conditions
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .chain(w.events.iter().map(|(a, b)| (a.to_string(), b.to_string())))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub kind: WitnessKind,
    pub word: Vec<String>,
    pub marking: BTreeMap<String, u64>,
    pub step: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictReportDoc {
    pub verdict: Verdict,
    pub capped: bool,
    pub witnesses: Vec<WitnessDoc>,
}

impl ConflictReportDoc {
    pub fn new(net: &Net, r: &ConflictReport) -> Self {
        ConflictReportDoc {
            verdict: r.verdict,
            capped: r.capped,
            witnesses: r
                .witnesses
                .iter()
                .map(|w| WitnessDoc {
                    kind: w.kind,
                    word: word_doc(net, &w.word),
                    marking: marking_doc(net, &w.marking),
                    step: step_doc(net, &w.step),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverEntryDoc {
    pub sigma: Vec<String>,
    pub sigma_prime: Vec<String>,
    pub rho_i: Vec<String>,
    pub certificate: AdjacencyDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargestDoc {
    pub rho: Vec<String>,
    pub truncated: bool,
    pub conflict_check: Verdict,
    pub entries: Vec<CoverEntryDoc>,
}

impl LargestDoc {
    pub fn new(net: &Net, w: &LargestProcessWitness) -> Self {
        LargestDoc {
            rho: word_doc(net, &w.rho),
            truncated: w.truncated,
            conflict_check: w.conflict_check,
            entries: w
                .entries
                .iter()
                .map(|e| CoverEntryDoc {
                    sigma: word_doc(net, &e.sigma),
                    sigma_prime: word_doc(net, &e.sigma_prime),
                    rho_i: word_doc(net, &e.rho_i),
                    certificate: AdjacencyDoc::new(net, &e.certificate),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const FIG1: &str = "\
# two tokens on p1, three consumers
net fig1
place p1 tokens 2
place p2 tokens 1
place p3 tokens 1
place p4 tokens 1
place p5 tokens 1
place p6
trans a in p1 p2 out p6
trans b in p1:1 p3:1 out p6:1
trans c in p1 p4 out p6
trans d in p5 p6 out p1
";

    #[test]
    fn parses_fig1() {
        let net = parse_net(FIG1).unwrap();
        assert_eq!(net.place_count(), 6);
        assert_eq!(net.transition_count(), 4);
        assert_eq!(net, fixtures::fig1());
    }

    #[test]
    fn round_trips() {
        for net in [fixtures::fig1(), fixtures::fig2(), fixtures::triv(), fixtures::w2()] {
            assert_eq!(parse_net(&print_net(&net)).unwrap(), net);
        }
    }

    #[test]
    fn reports_errors() {
        match parse_net("place q\ntrans t out q:1") {
            Err(Error::InvalidNet(v)) => assert!(v[0].to_string().contains("empty preset")),
            other => panic!("{other:?}"),
        }
        match parse_net("place p tokens -1") {
            Err(Error::Parse {
                line: 1, column: 16, ..
            }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_net("place p\nplace p"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_net("trans t in q"),
            Err(Error::Parse {
                line: 1,
                column: 12,
                ..
            })
        ));
        assert!(matches!(parse_net("frob"), Err(Error::Parse { .. })));
        assert!(matches!(parse_net("place p\ntrans t in p:0"), Err(Error::Parse { .. })));
    }

    #[test]
    fn process_json_round_trip() {
        let net = fixtures::fig1();
        let p1 = fixtures::p1(&net);
        let text = process_to_json(&net, &p1);
        assert_eq!(process_from_json(&net, &text).unwrap(), p1);
        let doc: ProcessDoc = serde_json::from_str(&text).unwrap();
        let renamed = ProcessDoc {
            places: doc
                .places
                .iter()
                .map(|p| PlaceDoc {
                    id: format!("x{}", p.id),
                    label: p.label.clone(),
                })
                .collect(),
            transitions: doc
                .transitions
                .iter()
                .map(|t| TransitionDoc {
                    id: t.id.clone(),
                    label: t.label.clone(),
                    pre: t.pre.iter().map(|c| format!("x{c}")).collect(),
                    post: t.post.iter().map(|c| format!("x{c}")).collect(),
                })
                .collect(),
            initial: None,
        };
        let back = renamed.to_process(&net).unwrap();
        assert!(crate::iso::is_isomorphic(&back, &p1));
    }
}
