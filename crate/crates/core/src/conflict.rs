//! Semantic conflicts and the structural conflict class.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::net::{Budget, Marking, Net, Step, TransId, Word};

/// `g` is in conflict at `m`: the step is not enabled although each of its
/// single-transition restrictions, multiplicity included, is.
pub fn is_conflict(net: &Net, m: &Marking, g: &Step) -> bool {
    !g.is_empty() && !net.is_step_enabled(m, g) && g.support().all(|t| net.is_step_enabled(m, &g.restrict(|u| u == t)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    /// No violation found, but the exploration was cut short.
    BoundedHolds,
    Fails,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    /// `step` is in semantic conflict at `marking`.
    Conflict,
    /// `step` is enabled at `marking` and its transitions share a preplace.
    SharedPreset,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictWitness {
    pub kind: WitnessKind,
    pub marking: Marking,
    pub step: Step,
    /// A firing sequence reaching `marking`.
    pub word: Word,
}

impl ConflictWitness {
    pub fn replay(&self, net: &Net) -> bool {
        if net.marking_after(&self.word).ok().as_ref() != Some(&self.marking) {
            return false;
        }
        match self.kind {
            WitnessKind::Conflict => is_conflict(net, &self.marking, &self.step),
            WitnessKind::SharedPreset => {
                net.is_step_enabled(&self.marking, &self.step) && shares_preplace(net, &self.step)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictReport {
    pub verdict: Verdict,
    pub witnesses: Vec<ConflictWitness>,
    /// Set when some multiplicity was cut by the configured cap.
    #[serde(default)]
    pub capped: bool,
}

impl ConflictReport {
    fn new(witnesses: Vec<ConflictWitness>, truncated: bool, capped: bool) -> Self {
        let verdict = if !witnesses.is_empty() {
            Verdict::Fails
        } else if truncated || capped {
            Verdict::BoundedHolds
        } else {
            Verdict::Holds
        };
        ConflictReport {
            verdict,
            witnesses,
            capped,
        }
    }

    pub fn holds(&self) -> bool {
        self.verdict != Verdict::Fails
    }

    pub fn replay(&self, net: &Net) -> bool {
        self.witnesses.iter().all(|w| w.replay(net))
    }

    /// [`Error::NotBinaryConflictFree`] carrying the first witness, if any.
    pub fn into_error(self) -> Option<Error> {
        self.witnesses
            .into_iter()
            .next()
            .map(|w| Error::NotBinaryConflictFree(Box::new(w)))
    }
}

fn shares_preplace(net: &Net, g: &Step) -> bool {
    let ts: Vec<TransId> = g
        .iter()
        .flat_map(|(t, k)| std::iter::repeat_n(*t, k as usize))
        .collect();
    ts.iter().enumerate().any(|(i, t)| {
        ts[i + 1..]
            .iter()
            .any(|u| net.pre(*t).support().any(|s| net.pre(*u).contains(s)))
    })
}

/// Pairs `{t, u}` over transitions enabled at `m`, `t = u` included.
fn pairs(net: &Net, m: &Marking) -> Vec<Step> {
    let mut en = net.enabled(m);
    en.sort();
    let mut out = Vec::new();
    for (i, &t) in en.iter().enumerate() {
        for &u in &en[i..] {
            out.push([t, u].into_iter().collect());
        }
    }
    out
}

/// Checks every reachable marking for a size-two conflict.
pub fn binary_conflict_free(net: &Net, budget: Budget) -> ConflictReport {
    let reach = net.reachable_markings(budget);
    let mut witnesses = Vec::new();
    for r in &reach.markings {
        for g in pairs(net, &r.marking) {
            if is_conflict(net, &r.marking, &g) {
                witnesses.push(ConflictWitness {
                    kind: WitnessKind::Conflict,
                    marking: r.marking.clone(),
                    step: g,
                    word: r.word.clone(),
                });
            }
        }
    }
    ConflictReport::new(witnesses, reach.exhausted, false)
}

/// Checks every reachable marking for a conflict of any size. Multiplicities
/// beyond `max{k : k·•t ⊆ M}` cannot occur in a conflict, so the search is
/// exact unless `mult_cap` is smaller than that bound.
pub fn conflict_free(net: &Net, budget: Budget, mult_cap: u64) -> ConflictReport {
    let reach = net.reachable_markings(budget);
    let mut witnesses = Vec::new();
    let mut capped = false;
    for r in &reach.markings {
        let mut bounds: Vec<(TransId, u64)> = Vec::new();
        for t in net.enabled(&r.marking) {
            let k = net.pre(t).max_multiple_within(&r.marking).unwrap_or(mult_cap);
            if k > mult_cap {
                capped = true;
            }
            bounds.push((t, k.min(mult_cap)));
        }
        let mut counts = vec![0u64; bounds.len()];
        // odometer over all count vectors
        'outer: loop {
            let mut i = 0;
            loop {
                if i == counts.len() {
                    break 'outer;
                }
                if counts[i] < bounds[i].1 {
                    counts[i] += 1;
                    break;
                }
                counts[i] = 0;
                i += 1;
            }
            let g: Step = Step::from_counts(bounds.iter().zip(&counts).map(|((t, _), k)| (*t, *k)));
            if is_conflict(net, &r.marking, &g) {
                witnesses.push(ConflictWitness {
                    kind: WitnessKind::Conflict,
                    marking: r.marking.clone(),
                    step: g,
                    word: r.word.clone(),
                });
            }
        }
    }
    ConflictReport::new(witnesses, reach.exhausted, capped)
}

/// Whether transitions that can fire together as a step never share a preplace.
pub fn is_structural_conflict_net(net: &Net, budget: Budget) -> ConflictReport {
    let reach = net.reachable_markings(budget);
    let mut witnesses = Vec::new();
    for r in &reach.markings {
        for g in pairs(net, &r.marking) {
            if net.is_step_enabled(&r.marking, &g) && shares_preplace(net, &g) {
                witnesses.push(ConflictWitness {
                    kind: WitnessKind::SharedPreset,
                    marking: r.marking.clone(),
                    step: g,
                    word: r.word.clone(),
                });
            }
        }
    }
    ConflictReport::new(witnesses, reach.exhausted, false)
}
