//! Compatibility of processes with firing sequences, and the constructions
//! that move between the two.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Net, PlaceId, TransId, Word};
use crate::process::{CondId, EventId, Links, Process};

/// Positions of the events of a process in a word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosWitness {
    pub pos: BTreeMap<EventId, usize>,
}

impl PosWitness {
    /// Checks labels, bijectivity and that causality implies word order.
    pub fn verify(&self, p: &Process, sigma: &[TransId]) -> bool {
        if self.pos.len() != p.event_count() || sigma.len() != p.event_count() {
            return false;
        }
        let mut hit = vec![false; sigma.len()];
        for (e, &i) in &self.pos {
            let Some(ev) = p.events().get(e) else { return false };
            if i >= sigma.len() || hit[i] || sigma[i] != ev.label {
                return false;
            }
            hit[i] = true;
        }
        let links = p.links();
        p.events().iter().all(|(e, ev)| {
            ev.pre
                .iter()
                .filter_map(|c| links.producer(*c))
                .all(|d| self.pos[&d] < self.pos[e])
        })
    }
}

fn direct_predecessors(p: &Process, links: &Links) -> BTreeMap<EventId, Vec<EventId>> {
    p.events()
        .iter()
        .map(|(e, ev)| (*e, ev.pre.iter().filter_map(|c| links.producer(*c)).collect()))
        .collect()
}

/// A position assignment making `sigma` compatible with `p`, if one exists.
pub fn compatible(p: &Process, sigma: &[TransId]) -> Option<PosWitness> {
    if sigma.len() != p.event_count() || p.event_labels() != Net::word_multiset(sigma) {
        return None;
    }
    let preds = direct_predecessors(p, &p.links());
    let mut used: BTreeSet<EventId> = BTreeSet::new();
    let mut order: Vec<EventId> = Vec::new();

    fn go(
        p: &Process,
        sigma: &[TransId],
        preds: &BTreeMap<EventId, Vec<EventId>>,
        used: &mut BTreeSet<EventId>,
        order: &mut Vec<EventId>,
    ) -> bool {
        let i = order.len();
        if i == sigma.len() {
            return true;
        }
        let ready: Vec<EventId> = p
            .events()
            .iter()
            .filter(|(e, ev)| ev.label == sigma[i] && !used.contains(*e) && preds[*e].iter().all(|d| used.contains(d)))
            .map(|(e, _)| *e)
            .collect();
        for e in ready {
            used.insert(e);
            order.push(e);
            if go(p, sigma, preds, used, order) {
                return true;
            }
            order.pop();
            used.remove(&e);
        }
        false
    }

    if !go(p, sigma, &preds, &mut used, &mut order) {
        return None;
    }
    Some(PosWitness {
        pos: order.into_iter().enumerate().map(|(i, e)| (e, i)).collect(),
    })
}

/// All words compatible with `p`, sorted. Each is asserted to be a firing
/// sequence of `net`.
pub fn linearizations(net: &Net, p: &Process) -> BTreeSet<Word> {
    let preds = direct_predecessors(p, &p.links());
    let mut out = BTreeSet::new();
    let mut done = BTreeSet::new();
    let mut word = Vec::new();

    fn go(
        p: &Process,
        preds: &BTreeMap<EventId, Vec<EventId>>,
        done: &mut BTreeSet<EventId>,
        word: &mut Word,
        out: &mut BTreeSet<Word>,
    ) {
        if done.len() == p.event_count() {
            out.insert(word.clone());
            return;
        }
        let ready: Vec<EventId> = preds
            .iter()
            .filter(|(e, ds)| !done.contains(*e) && ds.iter().all(|d| done.contains(d)))
            .map(|(e, _)| *e)
            .collect();
        for e in ready {
            done.insert(e);
            word.push(p.event(e).label);
            go(p, preds, done, word, out);
            word.pop();
            done.remove(&e);
        }
    }

    go(p, &preds, &mut done, &mut word, &mut out);
    for w in &out {
        assert!(
            net.is_firing_sequence(w),
            "linear extension {} of a process is not a firing sequence",
            net.render_word(w)
        );
    }
    out
}

/// The linearization taking the smallest ready event identifier first.
pub fn canonical_linearization(p: &Process) -> Word {
    p.topological_events().into_iter().map(|e| p.event(e).label).collect()
}

/// End conditions grouped by label, oldest (smallest identifier) first.
fn end_queues(p: &Process) -> BTreeMap<PlaceId, Vec<CondId>> {
    let mut q: BTreeMap<PlaceId, Vec<CondId>> = BTreeMap::new();
    for c in p.end() {
        q.entry(p.cond_label(c).expect("declared")).or_default().push(c);
    }
    q
}

/// Appends one event per letter of `word`, consuming the oldest end
/// conditions carrying each preplace. `offset` only shifts error indices.
fn grow_fifo(net: &Net, p: &mut Process, word: &[TransId], offset: usize) -> Result<()> {
    let mut queues = end_queues(p);
    for (i, &t) in word.iter().enumerate() {
        let mut pre = BTreeSet::new();
        for (s, k) in net.pre(t).iter() {
            let q = queues.entry(*s).or_default();
            if (q.len() as u64) < k {
                return Err(Error::NotFiringSequence { index: offset + i });
            }
            pre.extend(q.drain(..k as usize));
        }
        let e = p.add_event(
            t,
            pre,
            net.post(t)
                .iter()
                .flat_map(|(s, k)| std::iter::repeat_n(*s, k as usize)),
        );
        for &c in &p.event(e).post.clone() {
            queues.entry(p.cond_label(c).expect("declared")).or_default().push(c);
        }
    }
    Ok(())
}

/// The process of a firing sequence, with first-in first-out token choice.
pub fn process_of(net: &Net, sigma: &[TransId]) -> Result<Process> {
    let mut p = Process::empty(net);
    grow_fifo(net, &mut p, sigma, 0)?;
    Ok(p)
}

/// Extends `p_small` along the letters of `sigma_big` beyond `sigma_small`.
pub fn extend_process_along(
    net: &Net,
    p_small: &Process,
    sigma_small: &[TransId],
    sigma_big: &[TransId],
) -> Result<Process> {
    if !sigma_big.starts_with(sigma_small) {
        return Err(Error::Precondition("sigma_small is not a prefix of sigma_big".into()));
    }
    net.fire_word(net.initial_marking(), sigma_big)?;
    if compatible(p_small, sigma_small).is_none() {
        return Err(Error::Incompatible);
    }
    let mut p = p_small.clone();
    grow_fifo(net, &mut p, &sigma_big[sigma_small.len()..], sigma_small.len())?;
    Ok(p)
}

/// The prefix of `p` made of the events placed at the first
/// `sigma_prefix.len()` positions of `sigma`.
pub fn process_prefix_for(p: &Process, sigma: &[TransId], sigma_prefix: &[TransId]) -> Result<Process> {
    if !sigma.starts_with(sigma_prefix) {
        return Err(Error::Precondition("sigma_prefix is not a prefix of sigma".into()));
    }
    let w = compatible(p, sigma).ok_or(Error::Incompatible)?;
    let events: BTreeSet<EventId> = w
        .pos
        .iter()
        .filter(|(_, &i)| i < sigma_prefix.len())
        .map(|(e, _)| *e)
        .collect();
    p.prefix_from_events(&events)
}

/// A linearization of `p_big` extending `sigma_small`, which must be a
/// linearization of its prefix `p_small`.
pub fn linearize_extension(p_small: &Process, p_big: &Process, sigma_small: &[TransId]) -> Result<Word> {
    if !p_small.is_prefix_of(p_big) {
        return Err(Error::Precondition("p_small is not a prefix of p_big".into()));
    }
    if compatible(p_small, sigma_small).is_none() {
        return Err(Error::Incompatible);
    }
    let mut out = sigma_small.to_vec();
    out.extend(
        p_big
            .topological_events()
            .into_iter()
            .filter(|e| !p_small.events().contains_key(e))
            .map(|e| p_big.event(e).label),
    );
    Ok(out)
}

/// Given a prefix `p_small` of `p_big` and a linearization `sigma` of
/// `p_big`, returns `(sigma_small, sigma1, sigma2)` with `sigma_small` a
/// linearization of `p_small` and `sigma_small ≤ sigma1 ≡ sigma2 ≤ sigma`.
pub fn match_prefix_down(p_small: &Process, p_big: &Process, sigma: &[TransId]) -> Result<(Word, Word, Word)> {
    if !p_small.is_prefix_of(p_big) {
        return Err(Error::Precondition("p_small is not a prefix of p_big".into()));
    }
    let w = compatible(p_big, sigma).ok_or(Error::Incompatible)?;
    let reach = p_small.events().keys().map(|e| w.pos[e] + 1).max().unwrap_or(0);
    let sigma2 = sigma[..reach].to_vec();
    let middle = process_prefix_for(p_big, sigma, &sigma2)?;
    let sigma_small = canonical_linearization(p_small);
    let sigma1 = linearize_extension(p_small, &middle, &sigma_small)?;
    Ok((sigma_small, sigma1, sigma2))
}
