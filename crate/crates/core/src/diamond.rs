//! Diamond closing for nets without binary conflicts, and the bounded
//! construction of a largest run.
//!
//! [`DiamondEngine`] checks binary-conflict-freeness once up front, and every
//! elementary exchange re-checks that the pair it commutes is enabled as a
//! step. A certificate produced here is therefore sound even when the up-front
//! check was cut short by its budget.

use serde::{Deserialize, Serialize};

use crate::compat::process_of;
use crate::conflict::{binary_conflict_free, ConflictReport, ConflictWitness, Verdict, WitnessKind};
use crate::error::{Error, Result};
use crate::net::{Budget, Net, Step, TransId, Word};
use crate::process::{enumerate_processes, Process};
use crate::seqequiv::{AdjacencyCertificate, ClassCache, Transposition};
use crate::swapping::bd_le_linearized;

/// `sigma·mu` and `sigma'·mu_prime` are firing sequences related by `certificate`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiamondResult {
    pub mu: Word,
    pub mu_prime: Word,
    /// From `sigma·mu` to `sigma'·mu_prime`.
    pub certificate: AdjacencyCertificate,
}

pub struct DiamondEngine<'a> {
    net: &'a Net,
    upfront: ConflictReport,
}

fn concat(parts: &[&[TransId]]) -> Word {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

impl<'a> DiamondEngine<'a> {
    /// Fails with the first binary conflict found within `budget`.
    pub fn new(net: &'a Net, budget: Budget) -> Result<Self> {
        let upfront = binary_conflict_free(net, budget);
        if upfront.verdict == Verdict::Fails {
            return Err(upfront.into_error().expect("failing report has a witness"));
        }
        Ok(DiamondEngine { net, upfront })
    }

    pub fn net(&self) -> &Net {
        self.net
    }

    /// Whether the up-front check explored every reachable marking.
    pub fn upfront_verdict(&self) -> Verdict {
        self.upfront.verdict
    }

    fn require(&self, w: &[TransId], what: &str) -> Result<()> {
        if self.net.is_firing_sequence(w) {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{what} is not a firing sequence")))
        }
    }

    /// Certifies `σtu ≡ σut` given that `σt` and `σu` fire and `t ≠ u`.
    pub fn swap_pair(&self, sigma: &[TransId], t: TransId, u: TransId) -> Result<AdjacencyCertificate> {
        if t == u {
            return Err(Error::Precondition("the two transitions must differ".into()));
        }
        self.require(&concat(&[sigma, &[t]]), "σt")?;
        self.require(&concat(&[sigma, &[u]]), "σu")?;
        let m = self.net.marking_after(sigma)?;
        let step: Step = [t, u].into_iter().collect();
        if !self.net.is_step_enabled(&m, &step) {
            return Err(Error::NotBinaryConflictFree(Box::new(ConflictWitness {
                kind: WitnessKind::Conflict,
                marking: m,
                step,
                word: sigma.to_vec(),
            })));
        }
        Ok(AdjacencyCertificate {
            source: concat(&[sigma, &[t, u]]),
            steps: vec![Transposition {
                position: sigma.len(),
                first: t,
                second: u,
                marking: m,
            }],
        })
    }

    /// Certifies `σtρ ≡ σρt` given that `σt` and `σρ` fire and `t ∉ ρ`.
    pub fn commute_out(&self, sigma: &[TransId], t: TransId, rho: &[TransId]) -> Result<AdjacencyCertificate> {
        if rho.contains(&t) {
            return Err(Error::Precondition("t occurs in rho".into()));
        }
        self.require(&concat(&[sigma, &[t]]), "σt")?;
        self.require(&concat(&[sigma, rho]), "σρ")?;
        self.commute_out_rec(sigma, t, rho)
    }

    fn commute_out_rec(&self, sigma: &[TransId], t: TransId, rho: &[TransId]) -> Result<AdjacencyCertificate> {
        let Some((&u, rest)) = rho.split_first() else {
            return Ok(AdjacencyCertificate::identity(concat(&[sigma, &[t]])));
        };
        let head = self.swap_pair(sigma, t, u)?.extended(rest);
        let tail = self.commute_out_rec(&concat(&[sigma, &[u]]), t, rest)?;
        head.then(&tail)
    }

    /// Certifies `σtρ₁ρ₂ ≡ σρ₁tρ₂` given that `σt` and `σρ₁tρ₂` fire and `t ∉ ρ₁`.
    pub fn commute_in(
        &self,
        sigma: &[TransId],
        t: TransId,
        rho1: &[TransId],
        rho2: &[TransId],
    ) -> Result<AdjacencyCertificate> {
        if rho1.contains(&t) {
            return Err(Error::Precondition("t occurs in rho1".into()));
        }
        self.require(&concat(&[sigma, &[t]]), "σt")?;
        self.require(&concat(&[sigma, rho1, &[t], rho2]), "σρ₁tρ₂")?;
        Ok(self.commute_out_rec(sigma, t, rho1)?.extended(rho2))
    }

    /// Finds `mu`, `mu'` with `σμ ≡ σ'μ'`, by induction on the length of `σ`.
    pub fn close_diamond(&self, sigma: &[TransId], sigma_prime: &[TransId]) -> Result<DiamondResult> {
        self.require(sigma, "σ")?;
        self.require(sigma_prime, "σ'")?;
        self.close_rec(sigma, sigma_prime)
    }

    fn close_rec(&self, sigma: &[TransId], sigma_prime: &[TransId]) -> Result<DiamondResult> {
        let Some((&t, init)) = sigma.split_last() else {
            return Ok(DiamondResult {
                mu: sigma_prime.to_vec(),
                mu_prime: Vec::new(),
                certificate: AdjacencyCertificate::identity(sigma_prime.to_vec()),
            });
        };
        let inner = self.close_rec(init, sigma_prime)?;
        let mu = &inner.mu;
        if let Some(i) = mu.iter().position(|&x| x == t) {
            let (mu1, mu2) = (&mu[..i], &mu[i + 1..]);
            let head = self.commute_out_rec(init, t, mu1)?.extended(mu2);
            Ok(DiamondResult {
                mu: concat(&[mu1, mu2]),
                mu_prime: inner.mu_prime.clone(),
                certificate: head.then(&inner.certificate)?,
            })
        } else {
            let head = self.commute_out_rec(init, t, mu)?;
            Ok(DiamondResult {
                mu: mu.clone(),
                mu_prime: concat(&[&inner.mu_prime, &[t]]),
                certificate: head.then(&inner.certificate.extended(&[t]))?,
            })
        }
    }
}

/// `sigma ≤ sigma_prime`, `certificate` leads from `sigma_prime` to `rho_i`,
/// and `rho_i` is a prefix of the final run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverEntry {
    pub sigma: Word,
    pub sigma_prime: Word,
    pub rho_i: Word,
    pub certificate: AdjacencyCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LargestProcessWitness {
    pub rho: Word,
    /// One entry per enumerated firing sequence, in enumeration order.
    pub entries: Vec<CoverEntry>,
    /// Some firing sequence is longer than the enumeration bound.
    pub truncated: bool,
    /// Verdict of the up-front binary-conflict check.
    pub conflict_check: Verdict,
}

impl LargestProcessWitness {
    pub fn covered(&self) -> impl Iterator<Item = &Word> + '_ {
        self.entries.iter().map(|e| &e.sigma)
    }

    /// Replays every certificate and checks the chain `ρ₁ ≤ ρ₂ ≤ … ≤ ρ`.
    pub fn verify(&self, net: &Net) -> Result<()> {
        let bad = |i: usize, msg: &str| Err(Error::InvalidCertificate(format!("entry {i}: {msg}")));
        let mut prev: &[TransId] = &[];
        for (i, e) in self.entries.iter().enumerate() {
            if !e.sigma_prime.starts_with(&e.sigma) {
                return bad(i, "sigma is not a prefix of sigma'");
            }
            if e.certificate.source != e.sigma_prime || e.certificate.replay(net)? != e.rho_i {
                return bad(i, "certificate does not lead from sigma' to rho_i");
            }
            if !e.rho_i.starts_with(prev) || !self.rho.starts_with(&e.rho_i) {
                return bad(i, "rho chain is not monotone");
            }
            prev = &e.rho_i;
        }
        Ok(())
    }
}

/// Runs the chain construction over all firing sequences of length at most
/// `enum_bound`, in shortlex order.
pub fn largest_fs_process(net: &Net, enum_bound: usize, budget: Budget) -> Result<LargestProcessWitness> {
    let engine = DiamondEngine::new(net, budget)?;
    let seqs = net.enumerate_firing_sequences(enum_bound);
    let mut rho: Word = Vec::new();
    let mut entries = Vec::with_capacity(seqs.len());
    for sigma in seqs {
        let d = engine.close_diamond(&rho, &sigma)?;
        rho.extend_from_slice(&d.mu);
        entries.push(CoverEntry {
            sigma_prime: concat(&[&sigma, &d.mu_prime]),
            sigma,
            rho_i: rho.clone(),
            certificate: d.certificate.reversed(),
        });
    }
    Ok(LargestProcessWitness {
        rho,
        entries,
        truncated: net.has_firing_sequence_longer_than(enum_bound),
        conflict_check: engine.upfront_verdict(),
    })
}

#[derive(Clone, Debug)]
pub struct LargestBdWitness {
    pub process: Process,
    pub sequences: LargestProcessWitness,
    /// Number of processes verified to lie below `process`.
    pub checked: usize,
}

/// The process of the constructed run, checked to dominate every process
/// with at most `enum_bound` events.
pub fn largest_bd_witness(net: &Net, enum_bound: usize, budget: Budget) -> Result<LargestBdWitness> {
    let sequences = largest_fs_process(net, enum_bound, budget)?;
    let process = process_of(net, &sequences.rho)?;
    let mut cache = ClassCache::new();
    let universe = enumerate_processes(net, enum_bound);
    for q in &universe {
        if !bd_le_linearized(net, q, &process, &mut cache)? {
            return Err(Error::InvalidCertificate(
                "an enumerated process is not below the constructed one".into(),
            ));
        }
    }
    Ok(LargestBdWitness {
        process,
        sequences,
        checked: universe.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::seqequiv::{fs_le, seq_star_equiv};

    fn w(net: &Net, s: &str) -> Word {
        net.parse_word(s).unwrap()
    }

    fn t(net: &Net, s: &str) -> TransId {
        net.transition_id(s).unwrap()
    }

    #[test]
    fn swap_pair_examples() {
        let net = fixtures::fig2();
        let e = DiamondEngine::new(&net, Budget::ample()).unwrap();
        let c = e.swap_pair(&[], t(&net, "a"), t(&net, "b")).unwrap();
        assert_eq!(c.replay(&net).unwrap(), w(&net, "ba"));
        let c = e.swap_pair(&w(&net, "a"), t(&net, "a"), t(&net, "b")).unwrap();
        assert_eq!(c.source, w(&net, "aab"));
        assert_eq!(c.replay(&net).unwrap(), w(&net, "aba"));
        let f1 = fixtures::fig1();
        assert!(matches!(
            DiamondEngine::new(&f1, Budget::ample()),
            Err(Error::NotBinaryConflictFree(_))
        ));
    }

    #[test]
    fn commute_examples() {
        let net = fixtures::fig2();
        let e = DiamondEngine::new(&net, Budget::ample()).unwrap();
        let (a, b) = (t(&net, "a"), t(&net, "b"));
        let c = e.commute_out(&[], a, &[b, b]).unwrap();
        assert_eq!(c.steps.len(), 2);
        assert_eq!(c.replay(&net).unwrap(), w(&net, "bba"));
        let c = e.commute_out(&w(&net, "ab"), a, &[]).unwrap();
        assert!(c.steps.is_empty());
        let c = e.commute_out(&[b], a, &[b]).unwrap();
        assert_eq!(
            (c.source.clone(), c.replay(&net).unwrap()),
            (w(&net, "bab"), w(&net, "bba"))
        );
        let c = e.commute_in(&[], a, &[b], &[b]).unwrap();
        assert_eq!(
            (c.source.clone(), c.replay(&net).unwrap()),
            (w(&net, "abb"), w(&net, "bab"))
        );
        let c = e.commute_in(&[], a, &[], &[b]).unwrap();
        assert!(c.steps.is_empty());
        let c = e.commute_in(&[], a, &[b, b], &[]).unwrap();
        assert_eq!(c.replay(&net).unwrap(), w(&net, "bba"));
        assert!(e.commute_out(&[], a, &[a]).is_err());
    }

    #[test]
    fn close_diamond_examples() {
        let net = fixtures::fig2();
        let e = DiamondEngine::new(&net, Budget::ample()).unwrap();
        let d = e.close_diamond(&[], &w(&net, "ab")).unwrap();
        assert_eq!((d.mu, d.mu_prime), (w(&net, "ab"), vec![]));
        let d = e.close_diamond(&w(&net, "a"), &w(&net, "b")).unwrap();
        assert_eq!((d.mu.clone(), d.mu_prime.clone()), (w(&net, "b"), w(&net, "a")));
        assert_eq!(d.certificate.replay(&net).unwrap(), w(&net, "ba"));
        let d = e.close_diamond(&w(&net, "ab"), &w(&net, "ba")).unwrap();
        assert_eq!((d.mu.clone(), d.mu_prime.clone()), (vec![], vec![]));
        assert_eq!(d.certificate.replay(&net).unwrap(), w(&net, "ba"));
    }

    #[test]
    fn close_diamond_is_total_on_fig2() {
        let net = fixtures::fig2();
        let e = DiamondEngine::new(&net, Budget::ample()).unwrap();
        let seqs = net.enumerate_firing_sequences(3);
        for s in &seqs {
            for s2 in &seqs {
                let d = e.close_diamond(s, s2).unwrap();
                let left = concat(&[s, &d.mu]);
                let right = concat(&[s2, &d.mu_prime]);
                assert_eq!(d.certificate.source, left);
                assert_eq!(d.certificate.replay(&net).unwrap(), right);
                assert!(seq_star_equiv(&net, &left, &right).unwrap().is_some());
            }
        }
    }

    #[test]
    fn largest_examples() {
        let triv = fixtures::triv();
        let r = largest_fs_process(&triv, 5, Budget::ample()).unwrap();
        assert_eq!(r.rho, w(&triv, "t"));
        assert_eq!(r.covered().count(), 2);
        assert!(!r.truncated);
        r.verify(&triv).unwrap();

        let net = fixtures::fig2();
        let r = largest_fs_process(&net, 2, Budget::ample()).unwrap();
        assert_eq!(r.entries.len(), 7);
        assert!(r.truncated);
        r.verify(&net).unwrap();
        for s in r.covered() {
            assert!(fs_le(&net, s, &r.rho).unwrap());
        }

        let f1 = fixtures::fig1();
        match largest_fs_process(&f1, 4, Budget::ample()) {
            Err(Error::NotBinaryConflictFree(wit)) => {
                assert_eq!(f1.render_word(&wit.word), "a");
                assert_eq!(f1.render_step(&wit.step), "{b:1, c:1}");
            }
            other => panic!("expected a conflict, got {other:?}"),
        }
    }

    #[test]
    fn largest_bd_examples() {
        let triv = fixtures::triv();
        let b = largest_bd_witness(&triv, 5, Budget::ample()).unwrap();
        assert_eq!(b.process.event_count(), 1);
        let net = fixtures::fig2();
        let b = largest_bd_witness(&net, 2, Budget::ample()).unwrap();
        assert!(b.checked > 1);
        assert!(largest_bd_witness(&fixtures::fig1(), 3, Budget::ample()).is_err());
    }
}
