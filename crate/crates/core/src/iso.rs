//! Isomorphism of processes.
//!
//! Colour refinement gives an isomorphism-invariant fingerprint and prunes
//! the candidate lists; a backtracking search then builds the witness.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::process::{CondId, EventId, Process};

/// A bijection between the nodes of two processes that preserves labels,
/// arcs and the initial cut.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isomorphism {
    pub conditions: BTreeMap<CondId, CondId>,
    pub events: BTreeMap<EventId, EventId>,
}

impl Isomorphism {
    /// Checks the witness against the two processes.
    pub fn verify(&self, p: &Process, q: &Process) -> bool {
        if self.conditions.len() != p.condition_count()
            || self.events.len() != p.event_count()
            || p.condition_count() != q.condition_count()
            || p.event_count() != q.event_count()
        {
            return false;
        }
        let injective = |vals: Vec<u32>| {
            let mut v = vals;
            v.sort_unstable();
            v.windows(2).all(|w| w[0] != w[1])
        };
        if !injective(self.conditions.values().map(|c| c.0).collect())
            || !injective(self.events.values().map(|e| e.0).collect())
        {
            return false;
        }
        let conds_ok = p.conditions().iter().all(|(c, s)| {
            self.conditions
                .get(c)
                .is_some_and(|d| q.cond_label(*d) == Some(*s) && (p.initial().contains(c) == q.initial().contains(d)))
        });
        conds_ok
            && p.events().iter().all(|(e, ev)| {
                let Some(f) = self.events.get(e) else { return false };
                let Some(qev) = q.events().get(f) else { return false };
                let map = |set: &std::collections::BTreeSet<CondId>| -> Option<std::collections::BTreeSet<CondId>> {
                    set.iter().map(|c| self.conditions.get(c).copied()).collect()
                };
                qev.label == ev.label
                    && map(&ev.pre).as_ref() == Some(&qev.pre)
                    && map(&ev.post).as_ref() == Some(&qev.post)
            })
    }
}

struct Graph {
    /// Conditions first, then events.
    nodes: Vec<NodeRef>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    colors: Vec<u64>,
    rounds: usize,
}

#[derive(Clone, Copy)]
enum NodeRef {
    Cond(CondId),
    Event(EventId),
}

fn hash_of<T: Hash>(x: &T) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

impl Graph {
    fn new(p: &Process) -> Self {
        let mut nodes = Vec::new();
        let mut index = HashMap::new();
        let mut colors = Vec::new();
        for (&c, s) in p.conditions() {
            index.insert((0u8, c.0), nodes.len());
            nodes.push(NodeRef::Cond(c));
            colors.push(hash_of(&(0u8, s.0, p.initial().contains(&c))));
        }
        for (&e, ev) in p.events() {
            index.insert((1u8, e.0), nodes.len());
            nodes.push(NodeRef::Event(e));
            colors.push(hash_of(&(1u8, ev.label.0)));
        }
        let n = nodes.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (&e, ev) in p.events() {
            let ei = index[&(1, e.0)];
            for c in &ev.pre {
                if let Some(&ci) = index.get(&(0, c.0)) {
                    out[ci].push(ei);
                    inc[ei].push(ci);
                }
            }
            for c in &ev.post {
                if let Some(&ci) = index.get(&(0, c.0)) {
                    out[ei].push(ci);
                    inc[ci].push(ei);
                }
            }
        }
        let mut g = Graph {
            nodes,
            out,
            inc,
            colors,
            rounds: 0,
        };
        g.refine();
        g
    }

    fn class_count(colors: &[u64]) -> usize {
        let mut v = colors.to_vec();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    fn refine(&mut self) {
        let mut classes = Self::class_count(&self.colors);
        loop {
            let next: Vec<u64> = (0..self.nodes.len())
                .map(|i| {
                    let mut o: Vec<u64> = self.out[i].iter().map(|&j| self.colors[j]).collect();
                    let mut n: Vec<u64> = self.inc[i].iter().map(|&j| self.colors[j]).collect();
                    o.sort_unstable();
                    n.sort_unstable();
                    hash_of(&(self.colors[i], o, n))
                })
                .collect();
            let c = Self::class_count(&next);
            self.colors = next;
            self.rounds += 1;
            if c == classes {
                break;
            }
            classes = c;
        }
    }

    fn fingerprint(&self) -> u64 {
        let mut v = self.colors.clone();
        v.sort_unstable();
        hash_of(&(self.rounds, v))
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.out[a].contains(&b)
    }
}

/// Isomorphism-invariant hash of a process.
pub fn fingerprint(p: &Process) -> u64 {
    Graph::new(p).fingerprint()
}

pub fn is_isomorphic(p: &Process, q: &Process) -> bool {
    find_isomorphism(p, q).is_some()
}

pub fn find_isomorphism(p: &Process, q: &Process) -> Option<Isomorphism> {
    if p.condition_count() != q.condition_count() || p.event_count() != q.event_count() {
        return None;
    }
    let gp = Graph::new(p);
    let gq = Graph::new(q);
    if gp.fingerprint() != gq.fingerprint() {
        return None;
    }
    let n = gp.nodes.len();
    // Rarest colours first so the search branches late.
    let mut freq: HashMap<u64, usize> = HashMap::new();
    for c in &gp.colors {
        *freq.entry(*c).or_default() += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (freq[&gp.colors[i]], i));
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if !search(&gp, &gq, &order, 0, &mut map, &mut used) {
        return None;
    }
    let mut iso = Isomorphism {
        conditions: BTreeMap::new(),
        events: BTreeMap::new(),
    };
    for (i, &j) in map.iter().enumerate() {
        match (gp.nodes[i], gq.nodes[j]) {
            (NodeRef::Cond(a), NodeRef::Cond(b)) => {
                iso.conditions.insert(a, b);
            }
            (NodeRef::Event(a), NodeRef::Event(b)) => {
                iso.events.insert(a, b);
            }
            _ => return None,
        }
    }
    Some(iso)
}

fn search(gp: &Graph, gq: &Graph, order: &[usize], depth: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    if depth == order.len() {
        return true;
    }
    let x = order[depth];
    for y in 0..gq.nodes.len() {
        if used[y] || gq.colors[y] != gp.colors[x] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&z| {
            let w = map[z];
            gp.has_edge(x, z) == gq.has_edge(y, w) && gp.has_edge(z, x) == gq.has_edge(w, y)
        });
        if !consistent {
            continue;
        }
        map[x] = y;
        used[y] = true;
        if search(gp, gq, order, depth + 1, map, used) {
            return true;
        }
        used[y] = false;
        map[x] = usize::MAX;
    }
    false
}

/// A set of processes modulo isomorphism, bucketed by fingerprint.
#[derive(Default)]
pub struct IsoSet {
    buckets: HashMap<u64, Vec<usize>>,
    items: Vec<Process>,
}

impl IsoSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of an isomorphic member, if any.
    pub fn find(&self, p: &Process) -> Option<usize> {
        let key = fingerprint(p);
        self.buckets
            .get(&key)?
            .iter()
            .copied()
            .find(|&i| is_isomorphic(&self.items[i], p))
    }

    /// Inserts `p` unless an isomorphic process is present; returns whether it was new.
    pub fn insert(&mut self, p: Process) -> bool {
        self.insert_indexed(p).1
    }

    /// Like [`IsoSet::insert`], also returning the index of the class representative.
    pub fn insert_indexed(&mut self, p: Process) -> (usize, bool) {
        let key = fingerprint(&p);
        let bucket = self.buckets.entry(key).or_default();
        if let Some(&i) = bucket.iter().find(|&&i| is_isomorphic(&self.items[i], &p)) {
            return (i, false);
        }
        bucket.push(self.items.len());
        self.items.push(p);
        (self.items.len() - 1, true)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, i: usize) -> &Process {
        &self.items[i]
    }

    pub fn into_vec(self) -> Vec<Process> {
        self.items
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::process::Process;

    #[test]
    fn renaming_preserves_isomorphism() {
        let net = fixtures::fig1();
        let p1 = fixtures::p1(&net);
        let renamed = p1.rename(|c| CondId(100 - c.0), |e| EventId(e.0 + 7));
        let iso = find_isomorphism(&p1, &renamed).expect("renaming is an isomorphism");
        assert!(iso.verify(&p1, &renamed));
        assert_eq!(fingerprint(&p1), fingerprint(&renamed));
    }

    #[test]
    fn fig1_processes_are_not_isomorphic() {
        let net = fixtures::fig1();
        assert!(!is_isomorphic(&fixtures::p1(&net), &fixtures::p2(&net)));
    }

    #[test]
    fn independently_built_single_event_processes() {
        let net = fixtures::triv();
        let t = net.transition_id("t").unwrap();
        let a = Process::empty(&net).extend_with(&net, t, [CondId(0)].into());
        let b = Process::empty(&net).extend_with(&net, t, [CondId(0)].into());
        assert!(is_isomorphic(&a, &b));
    }

    #[test]
    fn isomorphism_is_an_equivalence_on_enumerated_processes() {
        let net = fixtures::fig1();
        let procs = crate::process::enumerate_processes(&net, 3);
        for (i, p) in procs.iter().enumerate() {
            assert!(is_isomorphic(p, p));
            for (j, q) in procs.iter().enumerate() {
                // representatives are pairwise non-isomorphic
                assert_eq!(is_isomorphic(p, q), i == j);
            }
        }
    }

    #[test]
    fn validity_is_isomorphism_invariant() {
        let net = fixtures::fig1();
        for p in crate::process::enumerate_processes(&net, 4) {
            let r = p.rename(|c| CondId(c.0 * 3 + 1), |e| EventId(e.0 * 5 + 2));
            assert_eq!(p.validate(&net).is_empty(), r.validate(&net).is_empty());
            assert!(is_isomorphic(&p, &r));
        }
    }
}
