use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::sample::Index;

use procnet_core::compat::{canonical_linearization, compatible, linearizations, process_of};
use procnet_core::conflict::{binary_conflict_free, conflict_free, is_conflict, is_structural_conflict_net, Verdict};
use procnet_core::diamond::{largest_fs_process, DiamondEngine};
use procnet_core::fixtures::{random_net, word_bound, RandomNetParams};
use procnet_core::format::{parse_net, print_net, process_from_json, process_to_json};
use procnet_core::iso::is_isomorphic;
use procnet_core::process::{enumerate_processes, EventId, ProcNode};
use procnet_core::seqequiv::{adjacent, equivalence_class, fs_le, seq_star_equiv};
use procnet_core::swapping::{bd_le, bd_le_with, effective_moves, one_step_equiv, swap, swap_star_equiv, BdStrategy};
use procnet_core::{Budget, CondId, Multiset, Net, Process, Step, Word};

fn net(seed: u64) -> Net {
    random_net(seed, RandomNetParams::default())
}

fn words(net: &Net) -> Vec<Word> {
    net.enumerate_firing_sequences(word_bound(net, 4, 40))
}

fn pick<'a, T>(xs: &'a [T], i: &Index) -> &'a T {
    &xs[i.index(xs.len())]
}

fn small_processes(net: &Net) -> Vec<Process> {
    enumerate_processes(net, word_bound(net, 3, 20))
}

fn multiset() -> impl Strategy<Value = Multiset<u8>> {
    prop::collection::vec((0u8..4, 0u64..4), 0..5).prop_map(Multiset::from_counts)
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn multiset_sum_laws(a in multiset(), b in multiset()) {
        prop_assert_eq!(a.sum(&b).difference(&b), a.clone());
        prop_assert_eq!(a.sum(&b).len(), a.len() + b.len());
        let f = |x: &u8| x / 2;
        prop_assert_eq!(a.image(f).len(), a.len());
        prop_assert_eq!(a.sum(&b).image(f), a.image(f).sum(&b.image(f)));
    }

    #[test]
    fn concurrent_pairs_fire_in_either_order(seed in 0u64..5000, i in any::<Index>()) {
        let net = net(seed);
        let ws = words(&net);
        let m = net.marking_after(pick(&ws, &i)).unwrap();
        let en = net.enabled(&m);
        for &t in &en {
            for &u in &en {
                let g: Step = [t, u].into_iter().collect();
                if net.is_step_enabled(&m, &g) {
                    let via_step = net.fire_step(&m, &g).unwrap();
                    prop_assert_eq!(net.fire_word(&m, &[t, u]).ok(), Some(via_step.clone()));
                    prop_assert_eq!(net.fire_word(&m, &[u, t]).ok(), Some(via_step.clone()));
                    let flow = m.difference(&net.step_pre(&g)).sum(&net.step_post(&g));
                    prop_assert_eq!(via_step, flow);
                    prop_assert!(!is_conflict(&net, &m, &g));
                }
            }
        }
    }

    #[test]
    fn firing_sequences_are_prefix_closed(seed in 0u64..5000) {
        let net = net(seed);
        let ws = words(&net);
        let set: BTreeSet<&Word> = ws.iter().collect();
        for w in &ws {
            for k in 0..w.len() {
                prop_assert!(set.contains(&w[..k].to_vec()));
            }
        }
    }

    #[test]
    fn end_marking_matches_every_linearization(seed in 0u64..5000) {
        let net = net(seed);
        for p in small_processes(&net) {
            prop_assert!(p.validate(&net).is_empty());
            for s in linearizations(&net, &p) {
                prop_assert_eq!(p.end_marking(), net.marking_after(&s).unwrap());
            }
        }
    }

    #[test]
    fn prefixes_are_causally_closed(seed in 0u64..5000, i in any::<Index>()) {
        let net = net(seed);
        let procs = small_processes(&net);
        let p = pick(&procs, &i);
        let all: BTreeSet<EventId> = p.events().keys().copied().collect();
        prop_assert_eq!(&p.prefix_from_events(&all).unwrap(), p);
        prop_assert!(is_isomorphic(&p.prefix_from_events(&BTreeSet::new()).unwrap(), &Process::empty(&net)));
        let order = p.topological_events();
        let causality = p.causality();
        for k in 0..=order.len() {
            let set: BTreeSet<EventId> = order[..k].iter().copied().collect();
            let q = p.prefix_from_events(&set).unwrap();
            prop_assert!(q.is_prefix_of(p));
            for e in q.events().keys() {
                for x in p.events().keys() {
                    if causality.precedes(ProcNode::Event(*x), ProcNode::Event(*e)) {
                        prop_assert!(q.events().contains_key(x));
                    }
                }
            }
        }
    }

    #[test]
    fn isomorphism_survives_renaming(seed in 0u64..5000, i in any::<Index>()) {
        let net = net(seed);
        let procs = small_processes(&net);
        let p = pick(&procs, &i);
        let q = p.rename(|c| CondId(1000 - c.0), |e| EventId(e.0 + 7));
        prop_assert!(q.validate(&net).is_empty());
        prop_assert!(is_isomorphic(p, &q) && is_isomorphic(&q, p));
        prop_assert_eq!(compatible(&q, &canonical_linearization(p)).is_some(), true);
    }

    #[test]
    fn swaps_are_valid_involutions(seed in 0u64..5000, i in any::<Index>()) {
        let net = net(seed);
        let procs = small_processes(&net);
        let p = pick(&procs, &i);
        for m in effective_moves(p) {
            let q = swap(p, m).unwrap();
            prop_assert!(q.validate(&net).is_empty());
            prop_assert_eq!(q.event_labels(), p.event_labels());
            prop_assert!(is_isomorphic(&swap(&q, m).unwrap(), p));
            prop_assert!(one_step_equiv(p, &q).is_some());
            prop_assert!(one_step_equiv(&q, p).is_some());
        }
    }

    #[test]
    fn swap_chains_keep_labels(seed in 0u64..5000, i in any::<Index>(), j in any::<Index>()) {
        let net = net(seed);
        let procs = small_processes(&net);
        let (p, q) = (pick(&procs, &i), pick(&procs, &j));
        if let Some(cert) = swap_star_equiv(p, q) {
            prop_assert!(cert.replay().is_ok());
            prop_assert_eq!(p.event_labels(), q.event_labels());
        }
    }

    #[test]
    fn prefixes_are_below(seed in 0u64..5000, i in any::<Index>()) {
        let net = net(seed);
        let procs = small_processes(&net);
        let p = pick(&procs, &i);
        let order = p.topological_events();
        for k in 0..=order.len() {
            let q = p.prefix_from_events(&order[..k].iter().copied().collect()).unwrap();
            prop_assert!(bd_le(&net, &q, p).unwrap());
        }
        prop_assert!(bd_le(&net, p, p).unwrap());
    }

    #[test]
    fn preorder_strategies_agree(seed in 0u64..5000, i in any::<Index>(), j in any::<Index>()) {
        let net = net(seed);
        let procs = small_processes(&net);
        let (p, q) = (pick(&procs, &i), pick(&procs, &j));
        prop_assert_eq!(
            bd_le_with(&net, p, q, BdStrategy::Linearize).unwrap(),
            bd_le_with(&net, p, q, BdStrategy::Direct).unwrap()
        );
    }

    #[test]
    fn adjacency_classes_are_congruences(seed in 0u64..5000, i in any::<Index>()) {
        let net = net(seed);
        let ws = words(&net);
        let s = pick(&ws, &i);
        let class = equivalence_class(&net, s).unwrap();
        let extensions: Vec<&Word> = ws.iter().filter(|w| w.starts_with(s)).collect();
        for r in &class {
            prop_assert_eq!(Net::word_multiset(r), Net::word_multiset(s));
            prop_assert_eq!(adjacent(&net, s, r), adjacent(&net, r, s));
            let cert = seq_star_equiv(&net, s, r).unwrap().unwrap();
            prop_assert_eq!(cert.replay(&net).unwrap(), r.clone());
            for big in &extensions {
                let mut moved = r.clone();
                moved.extend_from_slice(&big[s.len()..]);
                prop_assert!(seq_star_equiv(&net, big, &moved).unwrap().is_some());
            }
        }
    }

    #[test]
    fn process_of_round_trips(seed in 0u64..5000, i in any::<Index>()) {
        let net = net(seed);
        let procs = small_processes(&net);
        let p = pick(&procs, &i);
        for s in linearizations(&net, p) {
            let q = process_of(&net, &s).unwrap();
            prop_assert!(swap_star_equiv(&q, p).is_some());
        }
        let doc = process_from_json(&net, &process_to_json(&net, p)).unwrap();
        prop_assert!(is_isomorphic(&doc, p));
    }

    #[test]
    fn conflict_witnesses_replay(seed in 0u64..5000) {
        let net = net(seed);
        let budget = Budget::new(2000, 50);
        let reports = [
            binary_conflict_free(&net, budget),
            conflict_free(&net, budget, 3),
            is_structural_conflict_net(&net, budget),
        ];
        for r in &reports {
            prop_assert!(r.replay(&net));
            prop_assert_eq!(r.verdict == Verdict::Fails, !r.witnesses.is_empty());
        }
    }

    #[test]
    fn diamonds_close(seed in 0u64..5000, i in any::<Index>(), j in any::<Index>()) {
        let net = net(seed);
        let Ok(engine) = DiamondEngine::new(&net, Budget::ample()) else {
            return Ok(());
        };
        let ws = words(&net);
        let (s, s2) = (pick(&ws, &i), pick(&ws, &j));
        let d = engine.close_diamond(s, s2).unwrap();
        let left: Word = s.iter().chain(&d.mu).copied().collect();
        let right: Word = s2.iter().chain(&d.mu_prime).copied().collect();
        prop_assert!(net.is_firing_sequence(&left) && net.is_firing_sequence(&right));
        prop_assert_eq!(&d.certificate.source, &left);
        prop_assert_eq!(d.certificate.replay(&net).unwrap(), right.clone());
        prop_assert!(seq_star_equiv(&net, &left, &right).unwrap().is_some());
    }

    #[test]
    fn largest_run_chain_is_monotone(seed in 0u64..5000) {
        let net = net(seed);
        let Ok(w) = largest_fs_process(&net, 3, Budget::ample()) else {
            return Ok(());
        };
        prop_assert!(w.verify(&net).is_ok());
        for pair in w.entries.windows(2) {
            prop_assert!(pair[1].rho_i.starts_with(&pair[0].rho_i));
        }
        for e in &w.entries {
            prop_assert!(fs_le(&net, &e.sigma, &w.rho).unwrap());
        }
    }

    #[test]
    fn nets_print_and_parse_back(seed in 0u64..5000) {
        let net = net(seed);
        let text = print_net(&net);
        let back = parse_net(&text).unwrap();
        prop_assert_eq!(print_net(&back), text);
        prop_assert_eq!(back, net);
    }
}
