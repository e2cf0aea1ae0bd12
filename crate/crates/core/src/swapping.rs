//! The swap transformation on processes and the equivalences it generates.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::compat::canonical_linearization;
use crate::error::{Error, Result};
use crate::iso::{self, IsoSet, Isomorphism};
use crate::net::Net;
use crate::process::{CondId, EventId, ProcNode, Process};
use crate::seqequiv::{self, ClassCache};

/// Exchange of the consumers of two conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SwapMove {
    pub p: CondId,
    pub q: CondId,
}

impl SwapMove {
    pub fn new(p: CondId, q: CondId) -> Self {
        SwapMove { p, q }
    }
}

/// Exchanges the outgoing arcs of the two conditions of `mv`.
pub fn swap(proc_: &Process, mv: SwapMove) -> Result<Process> {
    let lp = proc_.cond_label(mv.p).ok_or(Error::UnknownCondition(mv.p))?;
    let lq = proc_.cond_label(mv.q).ok_or(Error::UnknownCondition(mv.q))?;
    if lp != lq {
        return Err(Error::LabelsDiffer);
    }
    if mv.p == mv.q {
        return Ok(proc_.clone());
    }
    if proc_.causality().comparable(ProcNode::Cond(mv.p), ProcNode::Cond(mv.q)) {
        return Err(Error::CausallyRelated);
    }
    Ok(swap_unchecked(proc_, mv))
}

fn swap_unchecked(proc_: &Process, mv: SwapMove) -> Process {
    let links = proc_.links();
    let (ep, eq) = (links.consumer(mv.p), links.consumer(mv.q));
    let mut out = proc_.clone();
    let events = out.events_mut();
    let mut retarget = |e: Option<EventId>, from: CondId, to: CondId| {
        if let Some(e) = e {
            let ev = events.get_mut(&e).expect("consumer exists");
            ev.pre.remove(&from);
            ev.pre.insert(to);
        }
    };
    retarget(ep, mv.p, mv.q);
    retarget(eq, mv.q, mv.p);
    out
}

/// Moves whose swap changes the process, in identifier order.
pub fn effective_moves(proc_: &Process) -> Vec<SwapMove> {
    let links = proc_.links();
    let caus = proc_.causality();
    let conds: Vec<CondId> = proc_.conditions().keys().copied().collect();
    let mut out = Vec::new();
    for (i, &p) in conds.iter().enumerate() {
        for &q in &conds[i + 1..] {
            if proc_.cond_label(p) != proc_.cond_label(q) {
                continue;
            }
            let (ep, eq) = (links.consumer(p), links.consumer(q));
            if ep == eq {
                continue;
            }
            if !caus.comparable(ProcNode::Cond(p), ProcNode::Cond(q)) {
                out.push(SwapMove { p, q });
            }
        }
    }
    out
}

/// A single swap relating `p` to `q`, with the isomorphism onto `q`. The
/// identity move counts as long as `p` has a condition.
pub fn one_step_equiv(p: &Process, q: &Process) -> Option<(SwapMove, Isomorphism)> {
    if p.event_count() != q.event_count() || p.condition_count() != q.condition_count() {
        return None;
    }
    if let Some(&c) = p.conditions().keys().next() {
        if let Some(w) = iso::find_isomorphism(p, q) {
            return Some((SwapMove::new(c, c), w));
        }
    }
    effective_moves(p).into_iter().find_map(|mv| {
        let s = swap_unchecked(p, mv);
        iso::find_isomorphism(&s, q).map(|w| (mv, w))
    })
}

/// Replayable evidence that `start` and `end` are related by swaps: applying
/// `moves` to `start` in order yields a process that `witness` maps onto `end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapCertificate {
    pub start: Process,
    pub moves: Vec<SwapMove>,
    pub end: Process,
    pub witness: Isomorphism,
}

impl SwapCertificate {
    pub fn replay(&self) -> Result<()> {
        let mut cur = self.start.clone();
        for (i, mv) in self.moves.iter().enumerate() {
            cur = swap(&cur, *mv).map_err(|e| Error::InvalidCertificate(format!("move {i}: {e}")))?;
        }
        if self.witness.verify(&cur, &self.end) {
            Ok(())
        } else {
            Err(Error::InvalidCertificate("final isomorphism does not hold".into()))
        }
    }
}

/// Breadth-first search over swaps modulo isomorphism. Returns a shortest
/// certificate when `p` and `q` are related.
pub fn swap_star_equiv(p: &Process, q: &Process) -> Option<SwapCertificate> {
    if p.event_labels() != q.event_labels() || p.condition_labels() != q.condition_labels() {
        return None;
    }
    let mut seen = IsoSet::new();
    // literal descendants of `p`, with their parent and move
    let mut states: Vec<(Process, Option<(usize, SwapMove)>)> = Vec::new();
    seen.insert(p.clone());
    states.push((p.clone(), None));
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if let Some(witness) = iso::find_isomorphism(&states[i].0, q) {
            let mut moves = Vec::new();
            let mut cur = i;
            while let Some((parent, mv)) = states[cur].1 {
                moves.push(mv);
                cur = parent;
            }
            moves.reverse();
            return Some(SwapCertificate {
                start: p.clone(),
                moves,
                end: q.clone(),
                witness,
            });
        }
        let base = states[i].0.clone();
        for mv in effective_moves(&base) {
            let next = swap_unchecked(&base, mv);
            if seen.insert(next.clone()) {
                states.push((next, Some((i, mv))));
                queue.push_back(states.len() - 1);
            }
        }
    }
    None
}

/// One representative per isomorphism class reachable from `p` by swaps.
pub fn swap_class(p: &Process) -> Vec<Process> {
    let mut seen = IsoSet::new();
    seen.insert(p.clone());
    let mut queue = VecDeque::from([p.clone()]);
    while let Some(cur) = queue.pop_front() {
        for mv in effective_moves(&cur) {
            let next = swap_unchecked(&cur, mv);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_vec()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BdStrategy {
    /// Compare linearizations with the sequence preorder.
    #[default]
    Linearize,
    /// Search extensions of `p` and prefixes of `q` directly.
    Direct,
}

/// The preorder on finite processes: some extension of `p` is swap
/// equivalent to some prefix of `q`.
pub fn bd_le(net: &Net, p: &Process, q: &Process) -> Result<bool> {
    bd_le_with(net, p, q, BdStrategy::Linearize)
}

pub fn bd_le_with(net: &Net, p: &Process, q: &Process, strategy: BdStrategy) -> Result<bool> {
    p.check(net)?;
    q.check(net)?;
    match strategy {
        BdStrategy::Linearize => bd_le_linearized(net, p, q, &mut ClassCache::new()),
        BdStrategy::Direct => Ok(bd_le_direct(net, p, q)),
    }
}

/// [`bd_le`] sharing a class cache across calls; inputs are not re-validated.
pub fn bd_le_linearized(net: &Net, p: &Process, q: &Process, cache: &mut ClassCache) -> Result<bool> {
    let sigma = canonical_linearization(p);
    let rho = canonical_linearization(q);
    seqequiv::fs_le_cached(net, &sigma, &rho, cache)
}

fn bd_le_direct(net: &Net, p: &Process, q: &Process) -> bool {
    let need = p.event_labels();
    let q_events: Vec<EventId> = q.events().keys().copied().collect();
    let mut prefixes = IsoSet::new();
    for mask in 0u64..(1u64 << q_events.len()) {
        let set: BTreeSet<EventId> = q_events
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| *e)
            .collect();
        if !q.is_causally_closed(&set) {
            continue;
        }
        let qp = q.prefix_from_events(&set).expect("closed");
        if need.is_subset(&qp.event_labels()) {
            prefixes.insert(qp);
        }
    }
    let mut prefixes = prefixes.into_vec();
    prefixes.sort_by_key(Process::event_count);
    for qp in prefixes {
        let target = qp.event_labels();
        for pp in extensions_with_labels(net, p, &target) {
            if swap_star_equiv(&pp, &qp).is_some() {
                return true;
            }
        }
    }
    false
}

/// Extensions of `p` whose event labels are exactly `target`, up to isomorphism.
fn extensions_with_labels(
    net: &Net,
    p: &Process,
    target: &crate::multiset::Multiset<crate::net::TransId>,
) -> Vec<Process> {
    let extra = target.len() - p.event_labels().len();
    let mut layer = vec![p.clone()];
    for _ in 0..extra {
        let mut next = IsoSet::new();
        for cur in &layer {
            for ext in cur.one_event_extensions(net) {
                if ext.event_labels().is_subset(target) {
                    next.insert(ext);
                }
            }
        }
        layer = next.into_vec();
    }
    layer
}

pub fn bd_equiv(net: &Net, p: &Process, q: &Process) -> Result<bool> {
    Ok(bd_le(net, p, q)? && bd_le(net, q, p)?)
}

/// Partition of `universe` into classes of the kernel of [`bd_le`], as
/// lists of indices in first-occurrence order.
pub fn bd_classes(net: &Net, universe: &[Process]) -> Result<Vec<Vec<usize>>> {
    for p in universe {
        p.check(net)?;
    }
    let mut cache = ClassCache::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'items: for (i, p) in universe.iter().enumerate() {
        for class in classes.iter_mut() {
            let r = &universe[class[0]];
            if bd_le_linearized(net, p, r, &mut cache)? && bd_le_linearized(net, r, p, &mut cache)? {
                class.push(i);
                continue 'items;
            }
        }
        classes.push(vec![i]);
    }
    Ok(classes)
}
