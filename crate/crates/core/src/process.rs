//! Goltz-Reisig processes: occurrence nets labelled into a net.
//!
//! Occurrence places are called *conditions* and occurrence transitions
//! *events*. Arcs have unit weight and are stored as the pre- and post-sets
//! of each event. Node identifiers are opaque; the semantic equality on
//! processes is isomorphism (see [`crate::iso`]).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iso;
use crate::multiset::Multiset;
use crate::net::{Marking, Net, PlaceId, TransId};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CondId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EventId(pub u32);

impl fmt::Display for CondId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ProcNode {
    Cond(CondId),
    Event(EventId),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub label: TransId,
    pub pre: BTreeSet<CondId>,
    pub post: BTreeSet<CondId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Process {
    conditions: BTreeMap<CondId, PlaceId>,
    events: BTreeMap<EventId, Event>,
    initial: BTreeSet<CondId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProcessViolation {
    /// An arc mentions a condition that is not declared.
    DanglingArc(EventId, CondId),
    /// A label points outside the net.
    UnknownLabel(ProcNode),
    PlacePresetTooLarge(CondId),
    PlacePostsetTooLarge(CondId),
    /// The initial cut is not exactly the set of conditions without producer.
    InitialCutMismatch(CondId),
    Cyclic,
    InitialMarkingMismatch,
    PresetMismatch(EventId),
    PostsetMismatch(EventId),
}

impl fmt::Display for ProcessViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ProcessViolation::*;
        match self {
            DanglingArc(e, c) => write!(f, "arc between {e} and undeclared place {c}"),
            UnknownLabel(ProcNode::Cond(c)) => write!(f, "place {c} has a label outside the net"),
            UnknownLabel(ProcNode::Event(e)) => write!(f, "transition {e} has a label outside the net"),
            PlacePresetTooLarge(c) => write!(f, "place preset > 1 at {c}"),
            PlacePostsetTooLarge(c) => write!(f, "place postset > 1 at {c}"),
            InitialCutMismatch(c) => write!(f, "initial cut mismatch at {c}"),
            Cyclic => write!(f, "flow relation is cyclic"),
            InitialMarkingMismatch => write!(f, "π(initial cut) differs from the initial marking"),
            PresetMismatch(e) => write!(f, "π not preset-preserving at {e}"),
            PostsetMismatch(e) => write!(f, "π not postset-preserving at {e}"),
        }
    }
}

/// Producers and consumers of every condition.
#[derive(Clone, Debug, Default)]
pub struct Links {
    pub producers: BTreeMap<CondId, Vec<EventId>>,
    pub consumers: BTreeMap<CondId, Vec<EventId>>,
}

impl Links {
    pub fn producer(&self, c: CondId) -> Option<EventId> {
        self.producers.get(&c).and_then(|v| v.first().copied())
    }

    pub fn consumer(&self, c: CondId) -> Option<EventId> {
        self.consumers.get(&c).and_then(|v| v.first().copied())
    }
}

/// Transitive closure of the flow relation.
#[derive(Clone, Debug)]
pub struct Causality {
    index: HashMap<ProcNode, usize>,
    reach: Vec<Vec<bool>>,
}

impl Causality {
    /// `(a, b) ∈ F⁺`.
    pub fn precedes(&self, a: ProcNode, b: ProcNode) -> bool {
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&i), Some(&j)) => self.reach[i][j],
            _ => false,
        }
    }

    pub fn comparable(&self, a: ProcNode, b: ProcNode) -> bool {
        self.precedes(a, b) || self.precedes(b, a)
    }

    pub fn is_acyclic(&self) -> bool {
        (0..self.reach.len()).all(|i| !self.reach[i][i])
    }
}

impl Process {
    /// The process with no events: one condition per initial token, numbered
    /// in place order.
    pub fn empty(net: &Net) -> Self {
        let mut p = Process::default();
        let mut next = 0;
        for (s, k) in net.initial_marking().iter() {
            for _ in 0..k {
                p.conditions.insert(CondId(next), *s);
                p.initial.insert(CondId(next));
                next += 1;
            }
        }
        p
    }

    /// Assembles a process without checking any processhood clause.
    pub fn from_parts(
        conditions: BTreeMap<CondId, PlaceId>,
        events: BTreeMap<EventId, Event>,
        initial: BTreeSet<CondId>,
    ) -> Self {
        Process {
            conditions,
            events,
            initial,
        }
    }

    pub fn conditions(&self) -> &BTreeMap<CondId, PlaceId> {
        &self.conditions
    }

    pub fn events(&self) -> &BTreeMap<EventId, Event> {
        &self.events
    }

    pub fn initial(&self) -> &BTreeSet<CondId> {
        &self.initial
    }

    pub fn event(&self, e: EventId) -> &Event {
        &self.events[&e]
    }

    pub fn cond_label(&self, c: CondId) -> Option<PlaceId> {
        self.conditions.get(&c).copied()
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn condition_count(&self) -> usize {
        self.conditions.len()
    }

    pub fn next_cond_id(&self) -> CondId {
        CondId(self.conditions.keys().next_back().map_or(0, |c| c.0 + 1))
    }

    pub fn next_event_id(&self) -> EventId {
        EventId(self.events.keys().next_back().map_or(0, |e| e.0 + 1))
    }

    /// Appends an event consuming `pre` and producing fresh conditions with
    /// the given labels.
    pub fn add_event(
        &mut self,
        label: TransId,
        pre: BTreeSet<CondId>,
        post_labels: impl IntoIterator<Item = PlaceId>,
    ) -> EventId {
        let id = self.next_event_id();
        let mut post = BTreeSet::new();
        for (next, s) in (self.next_cond_id().0..).zip(post_labels) {
            self.conditions.insert(CondId(next), s);
            post.insert(CondId(next));
        }
        self.events.insert(id, Event { label, pre, post });
        id
    }

    /// Same as [`Process::add_event`] with the postset taken from `net`.
    pub fn extend_with(&self, net: &Net, label: TransId, pre: BTreeSet<CondId>) -> Process {
        let mut out = self.clone();
        let post: Vec<PlaceId> = net
            .post(label)
            .iter()
            .flat_map(|(s, k)| std::iter::repeat_n(*s, k as usize))
            .collect();
        out.add_event(label, pre, post);
        out
    }

    pub(crate) fn events_mut(&mut self) -> &mut BTreeMap<EventId, Event> {
        &mut self.events
    }

    pub fn links(&self) -> Links {
        let mut links = Links::default();
        for (&e, ev) in &self.events {
            for &c in &ev.pre {
                links.consumers.entry(c).or_default().push(e);
            }
            for &c in &ev.post {
                links.producers.entry(c).or_default().push(e);
            }
        }
        links
    }

    pub fn causality(&self) -> Causality {
        let nodes: Vec<ProcNode> = self
            .conditions
            .keys()
            .map(|&c| ProcNode::Cond(c))
            .chain(self.events.keys().map(|&e| ProcNode::Event(e)))
            .collect();
        let index: HashMap<ProcNode, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut succ = vec![Vec::new(); nodes.len()];
        for (&e, ev) in &self.events {
            let ei = index[&ProcNode::Event(e)];
            for c in &ev.pre {
                if let Some(&ci) = index.get(&ProcNode::Cond(*c)) {
                    succ[ci].push(ei);
                }
            }
            for c in &ev.post {
                if let Some(&ci) = index.get(&ProcNode::Cond(*c)) {
                    succ[ei].push(ci);
                }
            }
        }
        let n = nodes.len();
        let mut reach = vec![vec![false; n]; n];
        for (start, row) in reach.iter_mut().enumerate() {
            let mut stack: Vec<usize> = succ[start].clone();
            while let Some(x) = stack.pop() {
                if !row[x] {
                    row[x] = true;
                    stack.extend(succ[x].iter().copied());
                }
            }
        }
        Causality { index, reach }
    }

    /// Checks every processhood clause against `net`.
    pub fn validate(&self, net: &Net) -> Vec<ProcessViolation> {
        use ProcessViolation::*;
        let mut out = Vec::new();
        for (&e, ev) in &self.events {
            for &c in ev.pre.iter().chain(&ev.post) {
                if !self.conditions.contains_key(&c) {
                    out.push(DanglingArc(e, c));
                }
            }
            if ev.label.index() >= net.transition_count() {
                out.push(UnknownLabel(ProcNode::Event(e)));
            }
        }
        for (&c, s) in &self.conditions {
            if s.index() >= net.place_count() {
                out.push(UnknownLabel(ProcNode::Cond(c)));
            }
        }
        for &c in &self.initial {
            if !self.conditions.contains_key(&c) {
                out.push(InitialCutMismatch(c));
            }
        }
        if !out.is_empty() {
            return out;
        }

        let links = self.links();
        for &c in self.conditions.keys() {
            let produced = links.producers.get(&c).map_or(0, Vec::len);
            let consumed = links.consumers.get(&c).map_or(0, Vec::len);
            if produced > 1 {
                out.push(PlacePresetTooLarge(c));
            }
            if consumed > 1 {
                out.push(PlacePostsetTooLarge(c));
            }
            if (produced == 0) != self.initial.contains(&c) {
                out.push(InitialCutMismatch(c));
            }
        }
        if !self.causality().is_acyclic() {
            out.push(Cyclic);
        }
        if self.initial_marking() != *net.initial_marking() {
            out.push(InitialMarkingMismatch);
        }
        for (&e, ev) in &self.events {
            if self.label_image(&ev.pre) != *net.pre(ev.label) {
                out.push(PresetMismatch(e));
            }
            if self.label_image(&ev.post) != *net.post(ev.label) {
                out.push(PostsetMismatch(e));
            }
        }
        out
    }

    /// [`Process::validate`] as a `Result`.
    pub fn check(&self, net: &Net) -> Result<()> {
        let v = self.validate(net);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidProcess(v))
        }
    }

    /// `π(C)` for a set of conditions.
    pub fn label_image<'a>(&self, conds: impl IntoIterator<Item = &'a CondId>) -> Marking {
        conds
            .into_iter()
            .filter_map(|c| self.conditions.get(c).copied())
            .collect()
    }

    pub fn initial_marking(&self) -> Marking {
        self.label_image(&self.initial)
    }

    /// `P°`: conditions without a consumer.
    pub fn end(&self) -> BTreeSet<CondId> {
        let consumed: BTreeSet<CondId> = self.events.values().flat_map(|e| e.pre.iter().copied()).collect();
        self.conditions
            .keys()
            .copied()
            .filter(|c| !consumed.contains(c))
            .collect()
    }

    /// `π(P°)`, the marking reached by any linearization.
    pub fn end_marking(&self) -> Marking {
        self.label_image(&self.end())
    }

    pub fn event_labels(&self) -> Multiset<TransId> {
        self.events.values().map(|e| e.label).collect()
    }

    pub fn condition_labels(&self) -> Multiset<PlaceId> {
        self.conditions.values().copied().collect()
    }

    /// `self ≤ other` in the literal sense: same identifiers, same labels,
    /// same initial cut, and the flow of `self` is that of `other`
    /// restricted to the nodes of `self`.
    pub fn is_prefix_of(&self, other: &Process) -> bool {
        if self.initial != other.initial {
            return false;
        }
        let conds_ok = self.conditions.iter().all(|(c, s)| other.conditions.get(c) == Some(s));
        if !conds_ok {
            return false;
        }
        self.events.iter().all(|(e, ev)| match other.events.get(e) {
            Some(big) => {
                let restrict = |set: &BTreeSet<CondId>| -> BTreeSet<CondId> {
                    set.iter()
                        .copied()
                        .filter(|c| self.conditions.contains_key(c))
                        .collect()
                };
                big.label == ev.label && restrict(&big.pre) == ev.pre && restrict(&big.post) == ev.post
            }
            None => false,
        })
    }

    /// Whether `events` is closed under causal predecessors.
    pub fn is_causally_closed(&self, events: &BTreeSet<EventId>) -> bool {
        let links = self.links();
        events.iter().all(|e| {
            self.events.get(e).is_some_and(|ev| {
                ev.pre
                    .iter()
                    .all(|c| links.producer(*c).is_none_or(|p| events.contains(&p)))
            })
        })
    }

    /// The unique prefix whose event set is `events`.
    pub fn prefix_from_events(&self, events: &BTreeSet<EventId>) -> Result<Process> {
        if !self.is_causally_closed(events) {
            return Err(Error::NotCausallyClosed);
        }
        let mut conds: BTreeSet<CondId> = self.initial.clone();
        let mut kept = BTreeMap::new();
        for e in events {
            let ev = &self.events[e];
            conds.extend(ev.post.iter().copied());
            kept.insert(*e, ev.clone());
        }
        Ok(Process {
            conditions: conds.iter().map(|c| (*c, self.conditions[c])).collect(),
            events: kept,
            initial: self.initial.clone(),
        })
    }

    /// No net transition is enabled at the end marking.
    pub fn is_maximal(&self, net: &Net) -> bool {
        let m = self.end_marking();
        net.transition_ids().all(|t| !net.is_enabled(&m, t))
    }

    /// Renames identifiers; the result is isomorphic to `self`.
    pub fn rename(&self, cond: impl Fn(CondId) -> CondId, event: impl Fn(EventId) -> EventId) -> Process {
        Process {
            conditions: self.conditions.iter().map(|(c, s)| (cond(*c), *s)).collect(),
            events: self
                .events
                .iter()
                .map(|(e, ev)| {
                    (
                        event(*e),
                        Event {
                            label: ev.label,
                            pre: ev.pre.iter().map(|c| cond(*c)).collect(),
                            post: ev.post.iter().map(|c| cond(*c)).collect(),
                        },
                    )
                })
                .collect(),
            initial: self.initial.iter().map(|c| cond(*c)).collect(),
        }
    }

    /// Events in a causal order, smallest identifier first among the ready ones.
    pub fn topological_events(&self) -> Vec<EventId> {
        let links = self.links();
        let mut done = BTreeSet::new();
        let mut order = Vec::with_capacity(self.events.len());
        while order.len() < self.events.len() {
            let next = self.events.iter().find(|(e, ev)| {
                !done.contains(*e)
                    && ev
                        .pre
                        .iter()
                        .all(|c| links.producer(*c).is_none_or(|p| done.contains(&p)))
            });
            match next {
                Some((e, _)) => {
                    done.insert(*e);
                    order.push(*e);
                }
                None => break, // cyclic; validate reports it
            }
        }
        order
    }

    /// All ways to extend by one event: every enabled transition and every
    /// choice of end conditions carrying its preset.
    pub fn one_event_extensions(&self, net: &Net) -> Vec<Process> {
        let end = self.end();
        let mut by_label: BTreeMap<PlaceId, Vec<CondId>> = BTreeMap::new();
        for c in &end {
            by_label.entry(self.conditions[c]).or_default().push(*c);
        }
        let mut out = Vec::new();
        for t in net.transition_ids() {
            let mut choices: Vec<Vec<CondId>> = vec![Vec::new()];
            for (s, k) in net.pre(t).iter() {
                let avail = by_label.get(s).map(Vec::as_slice).unwrap_or(&[]);
                let subsets = k_subsets(avail, k as usize);
                choices = choices
                    .iter()
                    .flat_map(|base| {
                        subsets.iter().map(move |sub| {
                            let mut v = base.clone();
                            v.extend(sub.iter().copied());
                            v
                        })
                    })
                    .collect();
                if choices.is_empty() {
                    break;
                }
            }
            for pre in choices {
                out.push(self.extend_with(net, t, pre.into_iter().collect()));
            }
        }
        out
    }
}

fn k_subsets<T: Copy>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in k_subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Every finite process with at most `max_events` events, one representative
/// per isomorphism class, ordered by event count.
pub fn enumerate_processes(net: &Net, max_events: usize) -> Vec<Process> {
    let mut all = iso::IsoSet::new();
    let mut layer = vec![Process::empty(net)];
    all.insert(layer[0].clone());
    for _ in 0..max_events {
        let mut next = Vec::new();
        for p in &layer {
            for q in p.one_event_extensions(net) {
                if all.insert(q.clone()) {
                    next.push(q);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    all.into_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ev(net: &Net, p: &Process, name: &str) -> EventId {
        let t = net.transition_id(name).unwrap();
        *p.events().iter().find(|(_, e)| e.label == t).unwrap().0
    }

    #[test]
    fn fig1_processes_are_valid() {
        let net = fixtures::fig1();
        assert!(fixtures::p1(&net).validate(&net).is_empty());
        assert!(fixtures::p2(&net).validate(&net).is_empty());
        assert!(Process::empty(&net).validate(&net).is_empty());
    }

    #[test]
    fn double_consumption_is_rejected() {
        let net = fixtures::fig1();
        let mut p = fixtures::p1(&net);
        let b = ev(&net, &p, "b");
        let c = ev(&net, &p, "c");
        let stolen = *p
            .event(c)
            .pre
            .iter()
            .find(|x| p.cond_label(**x) == net.place_id("p1"))
            .unwrap();
        let b_p1 = *p
            .event(b)
            .pre
            .iter()
            .find(|x| p.cond_label(**x) == net.place_id("p1"))
            .unwrap();
        let events = p.events_mut();
        let bev = events.get_mut(&b).unwrap();
        bev.pre.remove(&b_p1);
        bev.pre.insert(stolen);
        let v = p.validate(&net);
        assert!(v.contains(&ProcessViolation::PlacePostsetTooLarge(stolen)));
        assert!(v.iter().any(|x| x.to_string().contains("place postset > 1")));
    }

    #[test]
    fn wrong_preset_label_is_rejected() {
        let net = fixtures::fig1();
        let mut p = fixtures::p1(&net);
        let a = ev(&net, &p, "a");
        let p3 = net.place_id("p3").unwrap();
        // relabel one of a's input conditions to p3
        let c = *p.event(a).pre.iter().next().unwrap();
        let mut conds = p.conditions().clone();
        conds.insert(c, p3);
        p = Process::from_parts(conds, p.events().clone(), p.initial().clone());
        let v = p.validate(&net);
        assert!(v.contains(&ProcessViolation::PresetMismatch(a)));
        assert!(v.iter().any(|x| x.to_string().contains("π not preset-preserving")));
    }

    #[test]
    fn cycles_and_initial_cut_are_checked() {
        let net = fixtures::fig2();
        // s0 -a-> s2 and s2 feeds a back: cycle, and s0 loses initial status
        let a = net.transition_id("a").unwrap();
        let s = net.place_id("s").unwrap();
        let p = net.place_id("p").unwrap();
        let conds = BTreeMap::from([(CondId(0), s), (CondId(1), p)]);
        let events = BTreeMap::from([(
            EventId(0),
            Event {
                label: a,
                pre: BTreeSet::from([CondId(0)]),
                post: BTreeSet::from([CondId(0)]),
            },
        )]);
        let proc_ = Process::from_parts(conds, events, BTreeSet::from([CondId(0), CondId(1)]));
        let v = proc_.validate(&net);
        assert!(v.contains(&ProcessViolation::Cyclic));
        assert!(v.contains(&ProcessViolation::InitialCutMismatch(CondId(0))));
    }

    #[test]
    fn ends() {
        let net = fixtures::fig1();
        let empty = Process::empty(&net);
        assert_eq!(empty.end().len(), 6);
        assert_eq!(empty.end_marking(), *net.initial_marking());

        let p1 = fixtures::p1(&net);
        let end = p1.end();
        assert_eq!(end.len(), 2);
        let p6 = net.place_id("p6").unwrap();
        assert!(end.iter().all(|c| p1.cond_label(*c) == Some(p6)));
        let abdc = net.parse_word("abdc").unwrap();
        assert_eq!(p1.end_marking(), net.marking_after(&abdc).unwrap());
        assert_eq!(net.render_marking(&p1.end_marking()), "{p6:2}");
    }

    #[test]
    fn prefixes() {
        let net = fixtures::fig1();
        let p1 = fixtures::p1(&net);
        let empty = Process::empty(&net);
        assert!(empty.is_prefix_of(&p1));
        assert!(p1.is_prefix_of(&p1));
        assert!(!p1.is_prefix_of(&empty));

        let ab: BTreeSet<EventId> = [ev(&net, &p1, "a"), ev(&net, &p1, "b")].into();
        let q = p1.prefix_from_events(&ab).unwrap();
        assert!(q.validate(&net).is_empty());
        assert!(q.is_prefix_of(&p1));
        assert_eq!(q.event_labels(), net.parse_word("ab").unwrap().into_iter().collect());

        let c_only: BTreeSet<EventId> = [ev(&net, &p1, "c")].into();
        assert!(matches!(p1.prefix_from_events(&c_only), Err(Error::NotCausallyClosed)));

        let all: BTreeSet<EventId> = p1.events().keys().copied().collect();
        assert_eq!(p1.prefix_from_events(&all).unwrap(), p1);
        assert_eq!(p1.prefix_from_events(&BTreeSet::new()).unwrap(), empty);
    }

    #[test]
    fn prefix_is_causally_downward_closed() {
        let net = fixtures::fig1();
        let p1 = fixtures::p1(&net);
        let caus = p1.causality();
        for set in [vec!["a"], vec!["b"], vec!["a", "d"], vec!["a", "b", "d"]] {
            let ids: BTreeSet<EventId> = set.iter().map(|n| ev(&net, &p1, n)).collect();
            let q = p1.prefix_from_events(&ids).unwrap();
            let q_nodes: Vec<ProcNode> = q
                .conditions()
                .keys()
                .map(|c| ProcNode::Cond(*c))
                .chain(q.events().keys().map(|e| ProcNode::Event(*e)))
                .collect();
            let p_nodes: Vec<ProcNode> = p1
                .conditions()
                .keys()
                .map(|c| ProcNode::Cond(*c))
                .chain(p1.events().keys().map(|e| ProcNode::Event(*e)))
                .collect();
            for y in &q_nodes {
                for x in &p_nodes {
                    if caus.precedes(*x, *y) {
                        assert!(q_nodes.contains(x));
                    }
                }
            }
        }
    }

    #[test]
    fn maximality() {
        let net = fixtures::fig1();
        assert!(fixtures::p1(&net).is_maximal(&net));
        assert!(!Process::empty(&net).is_maximal(&net));
        let triv = fixtures::triv();
        let t = triv.transition_id("t").unwrap();
        let single = Process::empty(&triv).extend_with(&triv, t, [CondId(0)].into());
        assert!(single.validate(&triv).is_empty());
        assert!(single.is_maximal(&triv));
    }

    #[test]
    fn weighted_arcs_consume_distinct_conditions() {
        let net = fixtures::w2();
        let procs = enumerate_processes(&net, 3);
        // empty, one t (both tokens consumed)
        assert_eq!(procs.len(), 2);
        let one = &procs[1];
        assert_eq!(one.event_count(), 1);
        assert_eq!(one.events().values().next().unwrap().pre.len(), 2);
        assert!(one.validate(&net).is_empty());
    }

    #[test]
    fn enumeration_counts_token_choices() {
        let net = fixtures::fig1();
        let procs = enumerate_processes(&net, 6);
        for p in &procs {
            assert!(p.validate(&net).is_empty());
        }
        // a process per iso class; P1 and P2 are both maximal and distinct
        let maximal: Vec<&Process> = procs.iter().filter(|p| p.is_maximal(&net)).collect();
        assert!(maximal.iter().any(|p| iso::is_isomorphic(p, &fixtures::p1(&net))));
        assert!(maximal.iter().any(|p| iso::is_isomorphic(p, &fixtures::p2(&net))));
    }
}
