//! Reference nets and processes, and a seeded generator of small random nets.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::net::{Net, NetBuilder};
use crate::process::{CondId, Event, EventId, Process};

/// Three transitions compete for the two tokens on `p1`; `d` returns one.
pub fn fig1() -> Net {
    NetBuilder::new("fig1")
        .place("p1", 2)
        .place("p2", 1)
        .place("p3", 1)
        .place("p4", 1)
        .place("p5", 1)
        .place("p6", 0)
        .transition("a", &[("p1", 1), ("p2", 1)], &[("p6", 1)])
        .transition("b", &[("p1", 1), ("p3", 1)], &[("p6", 1)])
        .transition("c", &[("p1", 1), ("p4", 1)], &[("p6", 1)])
        .transition("d", &[("p5", 1), ("p6", 1)], &[("p1", 1)])
        .build()
        .expect("fig1 is well formed")
}

/// Two independent self-loops.
pub fn fig2() -> Net {
    NetBuilder::new("fig2")
        .place("s", 1)
        .place("p", 1)
        .transition("a", &[("s", 1)], &[("s", 1)])
        .transition("b", &[("p", 1)], &[("p", 1)])
        .build()
        .expect("fig2 is well formed")
}

/// One transition that fires once.
pub fn triv() -> Net {
    NetBuilder::new("triv")
        .place("s", 1)
        .transition("t", &[("s", 1)], &[])
        .build()
        .expect("triv is well formed")
}

/// A weight-2 arc: `t` consumes both tokens of `s`.
pub fn w2() -> Net {
    NetBuilder::new("w2")
        .place("s", 2)
        .transition("t", &[("s", 2)], &[])
        .build()
        .expect("w2 is well formed")
}

struct Drawn<'a> {
    net: &'a Net,
    conds: BTreeMap<CondId, crate::net::PlaceId>,
    events: BTreeMap<EventId, Event>,
}

impl<'a> Drawn<'a> {
    fn new(net: &'a Net) -> Self {
        Drawn {
            net,
            conds: BTreeMap::new(),
            events: BTreeMap::new(),
        }
    }

    fn cond(&mut self, id: u32, place: &str) -> CondId {
        self.conds.insert(CondId(id), self.net.place_id(place).expect("place"));
        CondId(id)
    }

    fn event(&mut self, id: u32, trans: &str, pre: &[CondId], post: &[CondId]) {
        self.events.insert(
            EventId(id),
            Event {
                label: self.net.transition_id(trans).expect("transition"),
                pre: pre.iter().copied().collect(),
                post: post.iter().copied().collect(),
            },
        );
    }

    fn finish(self, initial: &[CondId]) -> Process {
        Process::from_parts(
            self.conds,
            self.events,
            initial.iter().copied().collect::<BTreeSet<_>>(),
        )
    }
}

/// The left process drawn for [`fig1`]: `b` takes the second initial `p1`
/// token, `c` the token returned by `d`.
///
/// Initial conditions are numbered as in [`Process::empty`], so prefixes of
/// this process and of [`p2`] compare by identity.
pub fn p1(net: &Net) -> Process {
    let mut d = Drawn::new(net);
    let one = d.cond(0, "p1");
    let one_q = d.cond(1, "p1");
    let two = d.cond(2, "p2");
    let three = d.cond(3, "p3");
    let four = d.cond(4, "p4");
    let five = d.cond(5, "p5");
    let six_a = d.cond(6, "p6");
    let six_b = d.cond(7, "p6");
    let one_p = d.cond(8, "p1");
    let six_c = d.cond(9, "p6");
    d.event(0, "a", &[two, one], &[six_a]);
    d.event(1, "b", &[three, one_q], &[six_b]);
    d.event(2, "d", &[six_a, five], &[one_p]);
    d.event(3, "c", &[one_p, four], &[six_c]);
    d.finish(&[one, one_q, two, three, four, five])
}

/// The right process drawn for [`fig1`]: the roles of the two `p1` tokens
/// consumed by `b` and `c` are exchanged.
pub fn p2(net: &Net) -> Process {
    let mut d = Drawn::new(net);
    let one = d.cond(0, "p1");
    let one_q = d.cond(1, "p1");
    let two = d.cond(2, "p2");
    let three = d.cond(3, "p3");
    let four = d.cond(4, "p4");
    let five = d.cond(5, "p5");
    let six_a = d.cond(6, "p6");
    let six_b = d.cond(7, "p6");
    let one_p = d.cond(8, "p1");
    let six_c = d.cond(9, "p6");
    d.event(0, "a", &[two, one], &[six_a]);
    d.event(1, "d", &[six_a, five], &[one_p]);
    d.event(2, "c", &[one_q, four], &[six_b]);
    d.event(3, "b", &[three, one_p], &[six_c]);
    d.finish(&[one, one_q, two, three, four, five])
}

/// Shape limits for [`random_net`].
#[derive(Clone, Copy, Debug)]
pub struct RandomNetParams {
    pub max_places: usize,
    pub max_transitions: usize,
    pub max_weight: u64,
    pub max_tokens: u64,
}

impl Default for RandomNetParams {
    fn default() -> Self {
        RandomNetParams {
            max_places: 4,
            max_transitions: 4,
            max_weight: 2,
            max_tokens: 2,
        }
    }
}

/// A well-formed random net, deterministic in `seed`. Places are named
/// `p0..`, transitions `t0..`.
pub fn random_net(seed: u64, params: RandomNetParams) -> Net {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_places = rng.gen_range(1..=params.max_places);
    let n_trans = rng.gen_range(1..=params.max_transitions);
    let places: Vec<String> = (0..n_places).map(|i| format!("p{i}")).collect();
    let mut b = NetBuilder::new(format!("random-{seed}"));
    for p in &places {
        b = b.place(p.clone(), rng.gen_range(0..=params.max_tokens));
    }
    let pick = |rng: &mut ChaCha8Rng, min: usize| -> Vec<(String, u64)> {
        let k = rng.gen_range(min..=2.min(n_places));
        let mut chosen = places.clone();
        chosen.shuffle(rng);
        chosen
            .into_iter()
            .take(k)
            .map(|p| (p, rng.gen_range(1..=params.max_weight)))
            .collect()
    };
    for t in 0..n_trans {
        let ins = pick(&mut rng, 1);
        let outs = pick(&mut rng, 0);
        b = b.transition_owned(format!("t{t}"), ins, outs);
    }
    b.build().expect("generated nets are well formed")
}

/// The four named nets followed by `random` generated ones (seeds `0..random`).
pub fn corpus(random: u64) -> Vec<Net> {
    let mut out = vec![fig1(), fig2(), triv(), w2()];
    out.extend((0..random).map(|s| random_net(s, RandomNetParams::default())));
    out
}

/// The largest `L ≤ max_len` for which there are at most `max_words`
/// firing sequences of length at most `L`.
pub fn word_bound(net: &Net, max_len: usize, max_words: usize) -> usize {
    (0..=max_len)
        .rev()
        .find(|&l| net.enumerate_firing_sequences(l).len() <= max_words)
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_nets_are_deterministic_and_valid() {
        for seed in 0..50 {
            let a = random_net(seed, RandomNetParams::default());
            let b = random_net(seed, RandomNetParams::default());
            assert_eq!(a, b);
            assert!(a.validate().is_empty());
            assert!(a.place_count() <= 4 && a.transition_count() <= 4);
        }
    }
}
