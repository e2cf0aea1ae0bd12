//! Scalable nets for the benchmarks.

use procnet_core::{Net, NetBuilder};

/// `n` independent self-loops. Conflict-free, unbounded runs, and every pair
/// of transitions commutes, so equivalence classes grow combinatorially.
pub fn independent_loops(n: usize) -> Net {
    let mut b = NetBuilder::new(format!("loops-{n}"));
    for i in 0..n {
        let s = format!("s{i}");
        b = b
            .place(s.clone(), 1)
            .transition_owned(format!("t{i}"), vec![(s.clone(), 1)], vec![(s, 1)]);
    }
    b.build().expect("well formed")
}

/// `k` tokens racing through a pipeline of `n` stages. Processes differ in
/// which token each stage picks up, which stresses isomorphism checks.
pub fn pipeline(n: usize, k: u64) -> Net {
    let mut b = NetBuilder::new(format!("pipeline-{n}-{k}"));
    for i in 0..=n {
        b = b.place(format!("q{i}"), if i == 0 { k } else { 0 });
    }
    for i in 0..n {
        b = b.transition_owned(
            format!("t{i}"),
            vec![(format!("q{i}"), 1)],
            vec![(format!("q{}", i + 1), 1)],
        );
    }
    b.build().expect("well formed")
}
