//! The `verify` subcommand: cross-checks the sequence and process semantics
//! of one net on everything small enough to enumerate.

use serde_json::json;

use procnet_core::compat::{canonical_linearization, linearizations, process_of};
use procnet_core::conflict::{binary_conflict_free, conflict_free, is_structural_conflict_net, Verdict};
use procnet_core::diamond::largest_fs_process;
use procnet_core::fixtures::{random_net, word_bound, RandomNetParams};
use procnet_core::process::enumerate_processes;
use procnet_core::seqequiv::{fs_equiv, fs_le_cached, ClassCache};
use procnet_core::swapping::{bd_le_with, swap_star_equiv, BdStrategy};
use procnet_core::{Budget, Net};

use crate::Outcome;

const MAX_WORDS: usize = 80;
const MAX_PROCESSES: usize = 60;

struct Check {
    name: &'static str,
    /// `None` when the check did not apply to this net.
    passed: Option<bool>,
    cases: usize,
}

fn check(name: &'static str, cases: usize, failures: usize) -> Check {
    Check {
        name,
        passed: Some(failures == 0),
        cases,
    }
}

fn skipped(name: &'static str) -> Check {
    Check {
        name,
        passed: None,
        cases: 0,
    }
}

fn checks(net: &Net, max_len: usize, budget: Budget, mult_cap: u64) -> (Vec<Check>, bool) {
    let len = word_bound(net, max_len, MAX_WORDS);
    let words = net.enumerate_firing_sequences(len);
    let mut procs = enumerate_processes(net, len.min(4));
    procs.truncate(MAX_PROCESSES);
    let mut cache = ClassCache::new();
    let mut out = Vec::new();

    let mut fails = 0;
    let mut cases = 0;
    for w in &words {
        cases += 1;
        let p = process_of(net, w).expect("firing sequence");
        fails += usize::from(!linearizations(net, &p).contains(w));
    }
    out.push(check("process of a run linearizes back to it", cases, fails));

    let (mut fails, mut cases) = (0, 0);
    for p in &procs {
        let sp = canonical_linearization(p);
        for q in procs.iter().filter(|q| q.event_labels() == p.event_labels()) {
            cases += 1;
            let seq = cache.class_id(net, &sp) == cache.class_id(net, &canonical_linearization(q));
            fails += usize::from(seq != swap_star_equiv(p, q).is_some());
        }
    }
    out.push(check("transposition and swap equivalence agree", cases, fails));

    let n = words.len();
    let mut le = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            le[i][j] = fs_le_cached(net, &words[i], &words[j], &mut cache).expect("firing sequences");
        }
    }
    let (mut fails, mut cases) = (0, 0);
    for i in 0..n {
        cases += 1;
        fails += usize::from(!le[i][i]);
        for j in 0..n {
            cases += 1;
            let kernel = le[i][j] && le[j][i];
            fails += usize::from(kernel != fs_equiv(net, &words[i], &words[j]).expect("firing sequences"));
            if le[i][j] {
                fails += (0..n).filter(|&k| le[j][k] && !le[i][k]).count();
            }
        }
    }
    out.push(check("sequence order is a preorder", cases, fails));

    let (mut fails, mut cases) = (0, 0);
    for p in &procs {
        for q in &procs {
            cases += 1;
            let direct = bd_le_with(net, p, q, BdStrategy::Direct).expect("valid processes");
            let via = fs_le_cached(
                net,
                &canonical_linearization(p),
                &canonical_linearization(q),
                &mut cache,
            )
            .expect("firing sequences");
            fails += usize::from(direct != via);
        }
    }
    out.push(check("process order matches sequence order", cases, fails));

    let binary = binary_conflict_free(net, budget);
    let mut bounded = binary.verdict == Verdict::BoundedHolds;
    let structural = is_structural_conflict_net(net, budget);
    if structural.verdict == Verdict::Fails {
        out.push(skipped("conflict-free iff binary-conflict-free"));
    } else {
        let full = conflict_free(net, budget, mult_cap);
        bounded |= full.verdict == Verdict::BoundedHolds;
        out.push(check(
            "conflict-free iff binary-conflict-free",
            1,
            usize::from(full.holds() != binary.holds()),
        ));
    }

    if binary.verdict == Verdict::Fails {
        out.push(skipped("largest run covers every run"));
    } else {
        let w = largest_fs_process(net, len, budget).expect("binary-conflict-free");
        let mut fails = usize::from(w.verify(net).is_err());
        for s in w.covered() {
            fails += usize::from(!fs_le_cached(net, s, &w.rho, &mut cache).expect("firing sequences"));
        }
        out.push(check("largest run covers every run", w.entries.len(), fails));
    }
    (out, bounded)
}

fn outcome(results: &[Check], bounded: bool) -> Outcome {
    if results.iter().any(|c| c.passed == Some(false)) {
        Outcome::Fails
    } else if bounded {
        Outcome::Bounded
    } else {
        Outcome::Holds
    }
}

fn print(net: &Net, results: &[Check], json: bool) {
    if json {
        let rows: Vec<_> = results
            .iter()
            .map(|c| json!({ "check": c.name, "passed": c.passed, "cases": c.cases }))
            .collect();
        println!("{}", json!({ "net": net.name(), "checks": rows }));
        return;
    }
    for c in results {
        let status = match c.passed {
            Some(true) => "ok",
            Some(false) => "FAILED",
            None => "skipped",
        };
        println!("{}: {}: {status} ({} cases)", net.name(), c.name, c.cases);
    }
}

pub fn run_one(net: &Net, max_len: usize, budget: Budget, mult_cap: u64, json: bool) -> Outcome {
    let (results, bounded) = checks(net, max_len, budget, mult_cap);
    print(net, &results, json);
    outcome(&results, bounded)
}

/// Worst outcome over `count` generated nets starting at seed `base`.
pub fn run_random(base: u64, count: u64, max_len: usize, budget: Budget, mult_cap: u64, json: bool) -> Outcome {
    let mut worst = Outcome::Holds;
    for seed in base..base.saturating_add(count) {
        let net = random_net(seed, RandomNetParams::default());
        match run_one(&net, max_len, budget, mult_cap, json) {
            Outcome::Fails => worst = Outcome::Fails,
            Outcome::Bounded if worst == Outcome::Holds => worst = Outcome::Bounded,
            _ => {}
        }
    }
    worst
}
