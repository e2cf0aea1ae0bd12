//! Place/transition nets and the token game.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multiset::{write_entries, Multiset};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlaceId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransId(pub u32);

impl PlaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TransId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A global state: a multiset of places.
pub type Marking = Multiset<PlaceId>;
/// A finite, non-empty multiset of transitions fired together.
pub type Step = Multiset<TransId>;
/// A finite word over the transitions of a net.
pub type Word = Vec<TransId>;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Node {
    Place(PlaceId),
    Transition(TransId),
}

/// A violated well-formedness clause of a net.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NetViolation {
    /// A transition without preplaces.
    EmptyPreset(String),
    /// A name used for both a place and a transition.
    NotDisjoint(String),
}

impl fmt::Display for NetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NetViolation::EmptyPreset(t) => write!(f, "empty preset: transition `{t}`"),
            NetViolation::NotDisjoint(x) => write!(f, "not disjoint: `{x}` is both a place and a transition"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    name: String,
    pre: Multiset<PlaceId>,
    post: Multiset<PlaceId>,
}

impl Transition {
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn pre(&self) -> &Multiset<PlaceId> {
        &self.pre
    }
    pub fn post(&self) -> &Multiset<PlaceId> {
        &self.post
    }
}

/// A place/transition net with arc weights and an initial marking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Net {
    name: String,
    places: Vec<String>,
    transitions: Vec<Transition>,
    initial: Marking,
    /// Transitions sorted by name; drives every enumeration order.
    by_name: Vec<TransId>,
}

/// The first position of a word at which the token game gets stuck.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NotFirable {
    pub index: usize,
}

impl From<NotFirable> for Error {
    fn from(e: NotFirable) -> Self {
        Error::NotFiringSequence { index: e.index }
    }
}

/// Limits for the breadth-first exploration of reachable markings.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Budget {
    pub max_markings: usize,
    pub max_depth: usize,
}

impl Budget {
    pub fn new(max_markings: usize, max_depth: usize) -> Self {
        Budget {
            max_markings,
            max_depth,
        }
    }

    /// Generous enough for every fixture and for small random nets.
    pub fn ample() -> Self {
        Budget::new(100_000, 10_000)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::ample()
    }
}

/// A reachable marking together with a shortest firing sequence leading to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reached {
    pub marking: Marking,
    pub word: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachability {
    /// In breadth-first discovery order, starting with the initial marking.
    pub markings: Vec<Reached>,
    /// Set when the budget cut the search short.
    pub exhausted: bool,
}

impl Net {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn place_ids(&self) -> impl Iterator<Item = PlaceId> {
        (0..self.places.len() as u32).map(PlaceId)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransId> {
        (0..self.transitions.len() as u32).map(TransId)
    }

    /// Transitions in lexicographic order of their names.
    pub fn transitions_by_name(&self) -> &[TransId] {
        &self.by_name
    }

    pub fn place_name(&self, s: PlaceId) -> &str {
        &self.places[s.index()]
    }

    pub fn transition_name(&self, t: TransId) -> &str {
        &self.transitions[t.index()].name
    }

    pub fn transition(&self, t: TransId) -> &Transition {
        &self.transitions[t.index()]
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p == name).map(|i| PlaceId(i as u32))
    }

    pub fn transition_id(&self, name: &str) -> Option<TransId> {
        self.transitions
            .iter()
            .position(|t| t.name == name)
            .map(|i| TransId(i as u32))
    }

    /// Resolves a node name; places take precedence on a (malformed) clash.
    pub fn node(&self, name: &str) -> Result<Node> {
        self.place_id(name)
            .map(Node::Place)
            .or_else(|| self.transition_id(name).map(Node::Transition))
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    /// `•t` for a transition.
    pub fn pre(&self, t: TransId) -> &Multiset<PlaceId> {
        &self.transitions[t.index()].pre
    }

    /// `t•` for a transition.
    pub fn post(&self, t: TransId) -> &Multiset<PlaceId> {
        &self.transitions[t.index()].post
    }

    /// `•s` for a place: the transitions producing into it, weighted.
    pub fn place_pre(&self, s: PlaceId) -> Multiset<TransId> {
        Multiset::from_counts(self.transition_ids().map(|t| (t, self.post(t).count(&s))))
    }

    /// `s•` for a place: the transitions consuming from it, weighted.
    pub fn place_post(&self, s: PlaceId) -> Multiset<TransId> {
        Multiset::from_counts(self.transition_ids().map(|t| (t, self.pre(t).count(&s))))
    }

    /// `•G = Σ G(t)·•t`.
    pub fn step_pre(&self, g: &Step) -> Marking {
        g.iter()
            .fold(Multiset::new(), |acc, (t, k)| acc.sum(&self.pre(*t).scale(k)))
    }

    /// `G• = Σ G(t)·t•`.
    pub fn step_post(&self, g: &Step) -> Marking {
        g.iter()
            .fold(Multiset::new(), |acc, (t, k)| acc.sum(&self.post(*t).scale(k)))
    }

    /// `•X` for a finite multiset of places: transitions, weighted.
    pub fn places_pre(&self, x: &Marking) -> Multiset<TransId> {
        x.iter()
            .fold(Multiset::new(), |acc, (s, k)| acc.sum(&self.place_pre(*s).scale(k)))
    }

    /// `X•` for a finite multiset of places.
    pub fn places_post(&self, x: &Marking) -> Multiset<TransId> {
        x.iter()
            .fold(Multiset::new(), |acc, (s, k)| acc.sum(&self.place_post(*s).scale(k)))
    }

    /// Reports every violated well-formedness clause.
    pub fn validate(&self) -> Vec<NetViolation> {
        let mut out = Vec::new();
        let places: BTreeSet<&str> = self.places.iter().map(String::as_str).collect();
        for t in &self.transitions {
            if places.contains(t.name.as_str()) {
                out.push(NetViolation::NotDisjoint(t.name.clone()));
            }
        }
        for t in &self.transitions {
            if t.pre.is_empty() {
                out.push(NetViolation::EmptyPreset(t.name.clone()));
            }
        }
        out
    }

    pub fn is_enabled(&self, m: &Marking, t: TransId) -> bool {
        self.pre(t).is_subset(m)
    }

    /// `M[G⟩`: `•G ⊆ M`.
    pub fn is_step_enabled(&self, m: &Marking, g: &Step) -> bool {
        !g.is_empty() && self.step_pre(g).is_subset(m)
    }

    /// Fires a step: `(M − •G) + G•`.
    pub fn fire_step(&self, m: &Marking, g: &Step) -> Result<Marking> {
        if g.is_empty() {
            return Err(Error::EmptyStep);
        }
        let pre = self.step_pre(g);
        if !pre.is_subset(m) {
            return Err(Error::NotEnabled);
        }
        m.difference(&pre).try_sum(&self.step_post(g))
    }

    pub fn fire(&self, m: &Marking, t: TransId) -> Option<Marking> {
        let tr = &self.transitions[t.index()];
        if !tr.pre.is_subset(m) {
            return None;
        }
        Some(m.difference(&tr.pre).sum(&tr.post))
    }

    /// Fires a word one singleton step at a time.
    pub fn fire_word(&self, m: &Marking, word: &[TransId]) -> std::result::Result<Marking, NotFirable> {
        let mut cur = m.clone();
        for (index, &t) in word.iter().enumerate() {
            cur = self.fire(&cur, t).ok_or(NotFirable { index })?;
        }
        Ok(cur)
    }

    /// The marking reached from the initial marking by `word`.
    pub fn marking_after(&self, word: &[TransId]) -> Result<Marking> {
        Ok(self.fire_word(&self.initial, word)?)
    }

    pub fn is_firing_sequence(&self, word: &[TransId]) -> bool {
        self.fire_word(&self.initial, word).is_ok()
    }

    /// Enabled transitions in name order.
    pub fn enabled(&self, m: &Marking) -> Vec<TransId> {
        self.by_name
            .iter()
            .copied()
            .filter(|&t| self.is_enabled(m, t))
            .collect()
    }

    /// All firing sequences of length at most `max_len`, shortest first and
    /// lexicographic (by transition name) within each length.
    pub fn enumerate_firing_sequences(&self, max_len: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        let mut frontier = vec![(Vec::new(), self.initial.clone())];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (w, m) in &frontier {
                for t in self.enabled(m) {
                    let mut w2 = w.clone();
                    w2.push(t);
                    let m2 = self.fire(m, t).expect("enabled");
                    next.push((w2, m2));
                }
            }
            out.extend(next.iter().map(|(w, _)| w.clone()));
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        out
    }

    /// True when some firing sequence is longer than `len`.
    pub fn has_firing_sequence_longer_than(&self, len: usize) -> bool {
        // Depth-first; stops at the first witness.
        fn go(net: &Net, m: &Marking, depth: usize, len: usize) -> bool {
            if depth > len {
                return true;
            }
            net.enabled(m)
                .into_iter()
                .any(|t| go(net, &net.fire(m, t).expect("enabled"), depth + 1, len))
        }
        go(self, &self.initial, 0, len)
    }

    /// Breadth-first exploration of the reachable markings.
    pub fn reachable_markings(&self, budget: Budget) -> Reachability {
        let mut seen: HashMap<Marking, ()> = HashMap::new();
        let mut markings = Vec::new();
        let mut queue = VecDeque::new();
        let mut exhausted = false;
        seen.insert(self.initial.clone(), ());
        markings.push(Reached {
            marking: self.initial.clone(),
            word: Vec::new(),
        });
        queue.push_back(0usize);
        while let Some(i) = queue.pop_front() {
            let (m, w) = (markings[i].marking.clone(), markings[i].word.clone());
            for t in self.enabled(&m) {
                let m2 = self.fire(&m, t).expect("enabled");
                if seen.contains_key(&m2) {
                    continue;
                }
                if w.len() + 1 > budget.max_depth || markings.len() >= budget.max_markings {
                    exhausted = true;
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(t);
                seen.insert(m2.clone(), ());
                markings.push(Reached { marking: m2, word: w2 });
                queue.push_back(markings.len() - 1);
            }
        }
        Reachability { markings, exhausted }
    }

    pub fn render_marking(&self, m: &Marking) -> String {
        let mut items: Vec<(&str, u64)> = m.iter().map(|(s, k)| (self.place_name(*s), k)).collect();
        items.sort();
        let mut out = String::new();
        write_entries(&mut out, items.into_iter()).expect("string write");
        out
    }

    pub fn render_step(&self, g: &Step) -> String {
        let mut items: Vec<(&str, u64)> = g.iter().map(|(t, k)| (self.transition_name(*t), k)).collect();
        items.sort();
        let mut out = String::new();
        write_entries(&mut out, items.into_iter()).expect("string write");
        out
    }

    /// Concatenates names when all transition names are single characters,
    /// otherwise separates them with commas. The empty word renders as `ε`.
    pub fn render_word(&self, word: &[TransId]) -> String {
        if word.is_empty() {
            return "ε".to_string();
        }
        let short = self.transitions.iter().all(|t| t.name.chars().count() == 1);
        let names = word.iter().map(|&t| self.transition_name(t));
        if short {
            names.collect()
        } else {
            names.collect::<Vec<_>>().join(",")
        }
    }

    /// Parses a word: comma or whitespace separated names, or a run of
    /// single-character names. `ε`, `-` and the empty string denote the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "-" {
            return Ok(Vec::new());
        }
        let lookup = |name: &str| {
            self.transition_id(name)
                .ok_or_else(|| Error::UnknownNode(name.to_string()))
        };
        if text.contains(|c: char| c == ',' || c.is_whitespace()) {
            return text
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(lookup)
                .collect();
        }
        if let Some(t) = self.transition_id(text) {
            return Ok(vec![t]);
        }
        text.chars().map(|c| lookup(c.encode_utf8(&mut [0; 4]))).collect()
    }

    pub fn word_multiset(word: &[TransId]) -> Multiset<TransId> {
        word.iter().copied().collect()
    }
}

/// Place names with arc weights, as given to [`NetBuilder`].
pub type NamedArcs = Vec<(String, u64)>;

/// Declares a net by name; place references are resolved on build.
#[derive(Clone, Debug, Default)]
pub struct NetBuilder {
    name: String,
    places: Vec<(String, u64)>,
    transitions: Vec<(String, NamedArcs, NamedArcs)>,
}

impl NetBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn place(mut self, name: impl Into<String>, tokens: u64) -> Self {
        self.places.push((name.into(), tokens));
        self
    }

    pub fn transition(mut self, name: impl Into<String>, inputs: &[(&str, u64)], outputs: &[(&str, u64)]) -> Self {
        let own = |xs: &[(&str, u64)]| xs.iter().map(|(s, k)| (s.to_string(), *k)).collect();
        self.transitions.push((name.into(), own(inputs), own(outputs)));
        self
    }

    pub fn transition_owned(mut self, name: String, inputs: NamedArcs, outputs: NamedArcs) -> Self {
        self.transitions.push((name, inputs, outputs));
        self
    }

    /// Resolves names and validates the result.
    pub fn build(self) -> Result<Net> {
        let net = self.build_unchecked()?;
        let violations = net.validate();
        if violations.is_empty() {
            Ok(net)
        } else {
            Err(Error::InvalidNet(violations))
        }
    }

    /// Resolves names without checking the well-formedness clauses.
    pub fn build_unchecked(self) -> Result<Net> {
        let mut place_index = HashMap::new();
        let mut places = Vec::new();
        let mut initial = Multiset::new();
        for (i, (name, tokens)) in self.places.into_iter().enumerate() {
            if place_index.insert(name.clone(), PlaceId(i as u32)).is_some() {
                return Err(Error::DuplicateDeclaration(name));
            }
            initial.try_insert(PlaceId(i as u32), tokens)?;
            places.push(name);
        }
        let resolve = |arcs: Vec<(String, u64)>| -> Result<Multiset<PlaceId>> {
            let mut m = Multiset::new();
            for (name, k) in arcs {
                let id = place_index.get(&name).ok_or(Error::UnknownNode(name))?;
                m.try_insert(*id, k)?;
            }
            Ok(m)
        };
        let mut seen = BTreeSet::new();
        let mut transitions = Vec::new();
        for (name, ins, outs) in self.transitions {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateDeclaration(name));
            }
            transitions.push(Transition {
                pre: resolve(ins)?,
                post: resolve(outs)?,
                name,
            });
        }
        let mut by_name: Vec<TransId> = (0..transitions.len() as u32).map(TransId).collect();
        by_name.sort_by(|a, b| transitions[a.index()].name.cmp(&transitions[b.index()].name));
        Ok(Net {
            name: self.name,
            places,
            transitions,
            initial,
            by_name,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(net: &Net, s: &str) -> Word {
        net.parse_word(s).unwrap()
    }

    fn m(net: &Net, pairs: &[(&str, u64)]) -> Marking {
        Multiset::from_counts(pairs.iter().map(|(s, k)| (net.place_id(s).unwrap(), *k)))
    }

    fn step(net: &Net, names: &str) -> Step {
        w(net, names).into_iter().collect()
    }

    #[test]
    fn fig1_validates() {
        assert!(fixtures::fig1().validate().is_empty());
    }

    #[test]
    fn empty_preset_and_name_clash_are_reported() {
        let net = NetBuilder::new("bad")
            .place("s", 1)
            .transition("t", &[], &[("s", 1)])
            .build_unchecked()
            .unwrap();
        assert_eq!(net.validate(), vec![NetViolation::EmptyPreset("t".into())]);

        let net = NetBuilder::new("clash")
            .place("x", 1)
            .transition("x", &[("x", 1)], &[])
            .build_unchecked()
            .unwrap();
        assert_eq!(net.validate(), vec![NetViolation::NotDisjoint("x".into())]);
        assert!(matches!(
            NetBuilder::new("clash")
                .place("x", 1)
                .transition("x", &[("x", 1)], &[])
                .build(),
            Err(Error::InvalidNet(_))
        ));
    }

    #[test]
    fn presets_and_postsets() {
        let net = fixtures::fig1();
        let a = net.transition_id("a").unwrap();
        let d = net.transition_id("d").unwrap();
        assert_eq!(net.pre(a), &m(&net, &[("p1", 1), ("p2", 1)]));
        assert_eq!(
            net.step_pre(&step(&net, "ab")),
            m(&net, &[("p1", 2), ("p2", 1), ("p3", 1)])
        );
        assert_eq!(net.post(d), &m(&net, &[("p1", 1)]));
        let p6 = net.place_id("p6").unwrap();
        assert_eq!(net.place_pre(p6), step(&net, "abc"));
        assert_eq!(net.place_post(p6), step(&net, "d"));
        assert!(matches!(net.node("zz"), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn steps() {
        let net = fixtures::fig1();
        let m0 = net.initial_marking().clone();
        assert!(!net.is_step_enabled(&m0, &step(&net, "abc")));
        assert!(net.is_step_enabled(&m0, &step(&net, "ab")));
        assert!(matches!(net.fire_step(&m0, &step(&net, "abc")), Err(Error::NotEnabled)));
        assert!(matches!(net.fire_step(&m0, &Multiset::new()), Err(Error::EmptyStep)));

        let fig2 = fixtures::fig2();
        let m0 = fig2.initial_marking().clone();
        assert_eq!(fig2.fire_step(&m0, &step(&fig2, "ab")).unwrap(), m0);
    }

    #[test]
    fn fire_words() {
        let net = fixtures::fig1();
        let m0 = net.initial_marking();
        assert_eq!(net.fire_word(m0, &[]).unwrap(), *m0);
        assert_eq!(net.fire_word(m0, &w(&net, "abdc")).unwrap(), m(&net, &[("p6", 2)]));
        assert_eq!(net.fire_word(m0, &w(&net, "aa")), Err(NotFirable { index: 1 }));
    }

    #[test]
    fn enumeration() {
        let triv = fixtures::triv();
        let words: Vec<String> = triv
            .enumerate_firing_sequences(5)
            .iter()
            .map(|x| triv.render_word(x))
            .collect();
        assert_eq!(words, ["ε", "t"]);

        let fig1 = fixtures::fig1();
        let words: Vec<String> = fig1
            .enumerate_firing_sequences(1)
            .iter()
            .map(|x| fig1.render_word(x))
            .collect();
        assert_eq!(words, ["ε", "a", "b", "c"]);

        let fig2 = fixtures::fig2();
        let words: Vec<String> = fig2
            .enumerate_firing_sequences(2)
            .iter()
            .map(|x| fig2.render_word(x))
            .collect();
        assert_eq!(words, ["ε", "a", "b", "aa", "ab", "ba", "bb"]);
    }

    #[test]
    fn enumeration_is_prefix_closed() {
        let net = fixtures::fig1();
        let all: BTreeSet<Word> = net.enumerate_firing_sequences(6).into_iter().collect();
        // Every firing of FIG1 loses a token, so FS is finite: 37 words, the longest of length 4.
        assert_eq!(all.len(), 37);
        assert!(!net.has_firing_sequence_longer_than(4));
        assert!(net.has_firing_sequence_longer_than(3));
        for x in &all {
            for k in 0..x.len() {
                assert!(all.contains(&x[..k]));
            }
        }
    }

    #[test]
    fn reachability() {
        let triv = fixtures::triv();
        let r = triv.reachable_markings(Budget::ample());
        assert!(!r.exhausted);
        let ms: Vec<String> = r.markings.iter().map(|x| triv.render_marking(&x.marking)).collect();
        assert_eq!(ms, ["{s:1}", "{}"]);

        let fig2 = fixtures::fig2();
        let r = fig2.reachable_markings(Budget::ample());
        assert_eq!(r.markings.len(), 1);
        assert_eq!(fig2.render_marking(&r.markings[0].marking), "{p:1, s:1}");

        let fig1 = fixtures::fig1();
        let r = fig1.reachable_markings(Budget::ample());
        assert!(!r.exhausted);
        assert_eq!(r.markings.len(), 14);
        assert!(r.markings.iter().any(|x| x.marking == m(&fig1, &[("p6", 2)])));
        for x in &r.markings {
            assert_eq!(fig1.marking_after(&x.word).unwrap(), x.marking);
        }

        let r = fig1.reachable_markings(Budget::new(3, 100));
        assert!(r.exhausted);
        assert_eq!(r.markings.len(), 3);
    }

    #[test]
    fn isolated_places_count_but_never_block() {
        let net = NetBuilder::new("iso")
            .place("s", 1)
            .place("lonely", 3)
            .transition("t", &[("s", 1)], &[])
            .build()
            .unwrap();
        assert!(net.validate().is_empty());
        let t = net.transition_id("t").unwrap();
        let after = net.marking_after(&[t]).unwrap();
        assert_eq!(net.render_marking(&after), "{lonely:3}");
        assert!(net.enabled(&after).is_empty());
    }

    #[test]
    fn parse_and_render_words() {
        let net = fixtures::fig1();
        assert_eq!(net.render_word(&w(&net, "a b, d")), "abd");
        assert_eq!(w(&net, "ε"), Vec::<TransId>::new());
        assert!(net.parse_word("ax").is_err());
    }

    #[test]
    fn concurrent_step_implies_both_interleavings() {
        let net = fixtures::fig1();
        let m0 = net.initial_marking();
        let ab = step(&net, "ab");
        let via_step = net.fire_step(m0, &ab).unwrap();
        assert_eq!(net.fire_word(m0, &w(&net, "ab")).unwrap(), via_step);
        assert_eq!(net.fire_word(m0, &w(&net, "ba")).unwrap(), via_step);
    }
}
