//! Adjacency of firing sequences and the relations built from it.
//!
//! Two firing sequences are adjacent when they differ by exchanging two
//! neighbouring transitions that are enabled together as a step at that
//! point. The preorder on finite sequences is decided by searching the
//! adjacency classes of prefixes.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Marking, Net, Step, TransId, Word};

/// Exchange of `word[position]` and `word[position + 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transposition {
    pub position: usize,
    /// The transition at `position` before the exchange.
    pub first: TransId,
    pub second: TransId,
    /// The marking before `position`, at which `{first, second}` is enabled.
    pub marking: Marking,
}

/// A chain of transpositions from `source` to another member of its class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyCertificate {
    pub source: Word,
    pub steps: Vec<Transposition>,
}

impl AdjacencyCertificate {
    pub fn identity(source: Word) -> Self {
        AdjacencyCertificate {
            source,
            steps: Vec::new(),
        }
    }

    /// The word obtained by applying every step, without any checking.
    pub fn target(&self) -> Word {
        let mut w = self.source.clone();
        for s in &self.steps {
            if s.position + 1 < w.len() {
                w.swap(s.position, s.position + 1);
            }
        }
        w
    }

    /// Re-checks every step against the token game and returns the target.
    pub fn replay(&self, net: &Net) -> Result<Word> {
        let bad = |msg: String| Err(Error::InvalidCertificate(msg));
        if !net.is_firing_sequence(&self.source) {
            return bad("source is not a firing sequence".into());
        }
        let mut w = self.source.clone();
        for (i, s) in self.steps.iter().enumerate() {
            if s.position + 1 >= w.len() {
                return bad(format!("step {i}: position {} out of range", s.position));
            }
            if w[s.position] != s.first || w[s.position + 1] != s.second {
                return bad(format!("step {i}: transitions do not match the word"));
            }
            let m = net.marking_after(&w[..s.position])?;
            if m != s.marking {
                return bad(format!("step {i}: recorded marking differs"));
            }
            let step: Step = [s.first, s.second].into_iter().collect();
            if !net.is_step_enabled(&m, &step) {
                return bad(format!("step {i}: the pair is not enabled as a step"));
            }
            w.swap(s.position, s.position + 1);
        }
        Ok(w)
    }

    /// The same chain read backwards, from the target to the source.
    pub fn reversed(&self) -> Self {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| Transposition {
                position: s.position,
                first: s.second,
                second: s.first,
                marking: s.marking.clone(),
            })
            .collect();
        AdjacencyCertificate {
            source: self.target(),
            steps,
        }
    }

    /// The chain with `suffix` appended to every word along it.
    pub fn extended(&self, suffix: &[TransId]) -> Self {
        let mut source = self.source.clone();
        source.extend_from_slice(suffix);
        AdjacencyCertificate {
            source,
            steps: self.steps.clone(),
        }
    }

    /// The chain with `prefix` prepended, markings recomputed.
    pub fn shifted(&self, net: &Net, prefix: &[TransId]) -> Result<Self> {
        let mut source = prefix.to_vec();
        source.extend_from_slice(&self.source);
        let mut steps = Vec::with_capacity(self.steps.len());
        let mut w = source.clone();
        for s in &self.steps {
            let position = s.position + prefix.len();
            steps.push(Transposition {
                position,
                first: s.first,
                second: s.second,
                marking: net.marking_after(&w[..position])?,
            });
            w.swap(position, position + 1);
        }
        Ok(AdjacencyCertificate { source, steps })
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn then(mut self, other: &AdjacencyCertificate) -> Result<Self> {
        if self.target() != other.source {
            return Err(Error::InvalidCertificate("chains do not meet".into()));
        }
        self.steps.extend(other.steps.iter().cloned());
        Ok(self)
    }

    /// Largest position touched by the chain plus one, or 0 for the empty chain.
    pub fn extent(&self) -> usize {
        self.steps.iter().map(|s| s.position + 2).max().unwrap_or(0)
    }
}

fn require_firing(net: &Net, w: &[TransId]) -> Result<()> {
    net.fire_word(net.initial_marking(), w)?;
    Ok(())
}

/// Markings along a firing sequence: `out[i]` is reached after `w[..i]`.
fn markings_along(net: &Net, w: &[TransId]) -> Vec<Marking> {
    let mut out = Vec::with_capacity(w.len() + 1);
    let mut m = net.initial_marking().clone();
    out.push(m.clone());
    for &t in w {
        m = net.fire(&m, t).expect("firing sequence");
        out.push(m.clone());
    }
    out
}

/// Every word adjacent to the firing sequence `w`, with the move leading there.
fn neighbours(net: &Net, w: &[TransId]) -> Vec<(Word, Transposition)> {
    let ms = markings_along(net, w);
    let mut out = Vec::new();
    for i in 0..w.len().saturating_sub(1) {
        let (t, u) = (w[i], w[i + 1]);
        if t == u {
            continue;
        }
        let step: Step = [t, u].into_iter().collect();
        if net.is_step_enabled(&ms[i], &step) {
            let mut v = w.to_vec();
            v.swap(i, i + 1);
            out.push((
                v,
                Transposition {
                    position: i,
                    first: t,
                    second: u,
                    marking: ms[i].clone(),
                },
            ));
        }
    }
    out
}

/// Whether `sigma` and `rho` are adjacent. Words that are not firing
/// sequences are never adjacent to anything.
pub fn adjacent(net: &Net, sigma: &[TransId], rho: &[TransId]) -> bool {
    if sigma.len() != rho.len() || !net.is_firing_sequence(sigma) || !net.is_firing_sequence(rho) {
        return false;
    }
    let diff: Vec<usize> = (0..sigma.len()).filter(|&i| sigma[i] != rho[i]).collect();
    if diff.len() != 2 || diff[1] != diff[0] + 1 {
        return false;
    }
    let i = diff[0];
    if sigma[i] != rho[i + 1] || sigma[i + 1] != rho[i] {
        return false;
    }
    let m = net.marking_after(&sigma[..i]).expect("firing sequence");
    net.is_step_enabled(&m, &[sigma[i], sigma[i + 1]].into_iter().collect())
}

/// Decides whether the firing sequences `sigma` and `rho` are related by a
/// chain of adjacencies, returning a shortest chain.
pub fn seq_star_equiv(net: &Net, sigma: &[TransId], rho: &[TransId]) -> Result<Option<AdjacencyCertificate>> {
    require_firing(net, sigma)?;
    require_firing(net, rho)?;
    if Net::word_multiset(sigma) != Net::word_multiset(rho) {
        return Ok(None);
    }
    let mut parent: HashMap<Word, Option<(Word, Transposition)>> = HashMap::new();
    parent.insert(sigma.to_vec(), None);
    let mut queue = VecDeque::from([sigma.to_vec()]);
    while let Some(w) = queue.pop_front() {
        if w == rho {
            let mut steps = Vec::new();
            let mut cur = w;
            while let Some(Some((prev, step))) = parent.get(&cur) {
                steps.push(step.clone());
                cur = prev.clone();
            }
            steps.reverse();
            return Ok(Some(AdjacencyCertificate {
                source: sigma.to_vec(),
                steps,
            }));
        }
        for (v, step) in neighbours(net, &w) {
            if !parent.contains_key(&v) {
                parent.insert(v.clone(), Some((w.clone(), step)));
                queue.push_back(v);
            }
        }
    }
    Ok(None)
}

/// The class of a firing sequence under the closure of adjacency.
pub fn equivalence_class(net: &Net, sigma: &[TransId]) -> Result<BTreeSet<Word>> {
    require_firing(net, sigma)?;
    Ok(class_of(net, sigma))
}

fn class_of(net: &Net, sigma: &[TransId]) -> BTreeSet<Word> {
    let mut seen = BTreeSet::from([sigma.to_vec()]);
    let mut queue = VecDeque::from([sigma.to_vec()]);
    while let Some(w) = queue.pop_front() {
        for (v, _) in neighbours(net, &w) {
            if seen.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    seen
}

/// Memoized adjacency classes for repeated queries against one net.
#[derive(Default)]
pub struct ClassCache {
    classes: Vec<BTreeSet<Word>>,
    index: HashMap<Word, usize>,
}

impl ClassCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Class id of a firing sequence; equal ids mean equivalent words.
    pub fn class_id(&mut self, net: &Net, w: &[TransId]) -> usize {
        if let Some(&i) = self.index.get(w) {
            return i;
        }
        let class = class_of(net, w);
        let id = self.classes.len();
        for v in &class {
            self.index.insert(v.clone(), id);
        }
        self.classes.push(class);
        id
    }

    pub fn class(&mut self, net: &Net, w: &[TransId]) -> &BTreeSet<Word> {
        let id = self.class_id(net, w);
        &self.classes[id]
    }
}

/// Evidence for `sigma ⊑ rho`: `sigma ≤ sigma_prime`, the certificate leads
/// from `sigma_prime` to `rho[..rho_prefix_len]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsLeWitness {
    pub sigma_prime: Word,
    pub rho_prefix_len: usize,
    pub certificate: AdjacencyCertificate,
}

/// The preorder on finite firing sequences: some extension of `sigma` is
/// equivalent to some prefix of `rho`.
pub fn fs_le(net: &Net, sigma: &[TransId], rho: &[TransId]) -> Result<bool> {
    fs_le_cached(net, sigma, rho, &mut ClassCache::new())
}

pub fn fs_le_cached(net: &Net, sigma: &[TransId], rho: &[TransId], cache: &mut ClassCache) -> Result<bool> {
    Ok(fs_le_prefix(net, sigma, rho, cache)?.is_some())
}

/// Shortest prefix length of `rho` whose class holds an extension of `sigma`,
/// together with that extension.
fn fs_le_prefix(
    net: &Net,
    sigma: &[TransId],
    rho: &[TransId],
    cache: &mut ClassCache,
) -> Result<Option<(usize, Word)>> {
    require_firing(net, sigma)?;
    require_firing(net, rho)?;
    let need = Net::word_multiset(sigma);
    for k in sigma.len()..=rho.len() {
        if !need.is_subset(&Net::word_multiset(&rho[..k])) {
            continue;
        }
        if let Some(w) = cache.class(net, &rho[..k]).iter().find(|w| w.starts_with(sigma)) {
            return Ok(Some((k, w.clone())));
        }
    }
    Ok(None)
}

pub fn fs_le_witness(net: &Net, sigma: &[TransId], rho: &[TransId]) -> Result<Option<FsLeWitness>> {
    let Some((k, sigma_prime)) = fs_le_prefix(net, sigma, rho, &mut ClassCache::new())? else {
        return Ok(None);
    };
    let certificate = seq_star_equiv(net, &sigma_prime, &rho[..k])?.expect("same class");
    Ok(Some(FsLeWitness {
        sigma_prime,
        rho_prefix_len: k,
        certificate,
    }))
}

impl FsLeWitness {
    /// Checks the witness for `sigma ⊑ rho`.
    pub fn verify(&self, net: &Net, sigma: &[TransId], rho: &[TransId]) -> Result<()> {
        if !self.sigma_prime.starts_with(sigma) || self.certificate.source != self.sigma_prime {
            return Err(Error::InvalidCertificate("extension does not start with sigma".into()));
        }
        if self.rho_prefix_len > rho.len() || self.certificate.replay(net)? != rho[..self.rho_prefix_len] {
            return Err(Error::InvalidCertificate(
                "chain does not end in a prefix of rho".into(),
            ));
        }
        Ok(())
    }
}

pub fn fs_equiv(net: &Net, sigma: &[TransId], rho: &[TransId]) -> Result<bool> {
    let mut cache = ClassCache::new();
    Ok(fs_le_cached(net, sigma, rho, &mut cache)? && fs_le_cached(net, rho, sigma, &mut cache)?)
}

/// Equal words, or words of equal length at least `n` sharing their first `n` letters.
pub fn prefix_agree<T: PartialEq>(sigma: &[T], rho: &[T], n: usize) -> bool {
    sigma == rho || (sigma.len() == rho.len() && sigma.len() >= n && sigma[..n] == rho[..n])
}

/// Given `sigma1 ≡ sigma2 ≤ sigma3`, returns `sigma'` with
/// `sigma1 ≤ sigma' ≡ sigma3` and a chain from `sigma3` to `sigma'`.
pub fn reorder_after_prefix(
    net: &Net,
    sigma1: &[TransId],
    sigma2: &[TransId],
    sigma3: &[TransId],
) -> Result<(Word, AdjacencyCertificate)> {
    if !sigma3.starts_with(sigma2) {
        return Err(Error::Precondition("sigma2 is not a prefix of sigma3".into()));
    }
    require_firing(net, sigma3)?;
    let cert = seq_star_equiv(net, sigma2, sigma1)?
        .ok_or_else(|| Error::Precondition("sigma1 and sigma2 are not equivalent".into()))?;
    let suffix = &sigma3[sigma2.len()..];
    let out = cert.extended(suffix);
    Ok((out.target(), out))
}

/// Given `prefix ≤ rho_dagger ≡ rho`, returns `(sigma', rho')` with
/// `prefix ≤ sigma' ≡ rho' ≤ rho`, where `rho'` is the shortest prefix of
/// `rho` covering `prefix` and every position the chain touches.
pub fn localize_swaps(
    net: &Net,
    prefix: &[TransId],
    rho_dagger: &[TransId],
    rho: &[TransId],
) -> Result<(Word, Word, AdjacencyCertificate)> {
    if !rho_dagger.starts_with(prefix) {
        return Err(Error::Precondition("prefix is not a prefix of rho_dagger".into()));
    }
    let cert = seq_star_equiv(net, rho_dagger, rho)?
        .ok_or_else(|| Error::Precondition("rho_dagger and rho are not equivalent".into()))?;
    let len = prefix.len().max(cert.extent());
    let local = AdjacencyCertificate {
        source: rho_dagger[..len].to_vec(),
        steps: cert.steps,
    };
    Ok((rho_dagger[..len].to_vec(), rho[..len].to_vec(), local))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn w(net: &Net, s: &str) -> Word {
        net.parse_word(s).unwrap()
    }

    #[test]
    fn adjacency_examples() {
        let f2 = fixtures::fig2();
        assert!(adjacent(&f2, &w(&f2, "ab"), &w(&f2, "ba")));
        let f1 = fixtures::fig1();
        assert!(adjacent(&f1, &w(&f1, "abd"), &w(&f1, "adb")));
        assert!(!adjacent(&f1, &w(&f1, "abdc"), &w(&f1, "abcd")));
        assert!(!adjacent(&f1, &w(&f1, "ab"), &w(&f1, "ab")));
    }

    #[test]
    fn star_equivalence_examples() {
        let f1 = fixtures::fig1();
        let cert = seq_star_equiv(&f1, &w(&f1, "abdc"), &w(&f1, "badc")).unwrap().unwrap();
        assert_eq!(cert.steps.len(), 1);
        assert_eq!(cert.steps[0].position, 0);
        assert_eq!(cert.replay(&f1).unwrap(), w(&f1, "badc"));
        let same = seq_star_equiv(&f1, &w(&f1, "abdc"), &w(&f1, "abdc")).unwrap().unwrap();
        assert!(same.steps.is_empty());
        let f2 = fixtures::fig2();
        assert!(seq_star_equiv(&f2, &w(&f2, "ab"), &w(&f2, "bb")).unwrap().is_none());
        assert!(matches!(
            seq_star_equiv(&f1, &w(&f1, "abcd"), &w(&f1, "abdc")),
            Err(Error::NotFiringSequence { index: 2 })
        ));
    }

    #[test]
    fn preorder_examples() {
        let f1 = fixtures::fig1();
        assert!(fs_le(&f1, &[], &w(&f1, "adcb")).unwrap());
        assert!(fs_le(&f1, &w(&f1, "ab"), &w(&f1, "abdc")).unwrap());
        assert!(fs_le(&f1, &w(&f1, "b"), &w(&f1, "adcb")).unwrap());
        let wit = fs_le_witness(&f1, &w(&f1, "b"), &w(&f1, "adcb")).unwrap().unwrap();
        wit.verify(&f1, &w(&f1, "b"), &w(&f1, "adcb")).unwrap();
        assert!(fs_equiv(&f1, &w(&f1, "abdc"), &w(&f1, "badc")).unwrap());
        let f2 = fixtures::fig2();
        assert!(!fs_equiv(&f2, &w(&f2, "a"), &w(&f2, "ab")).unwrap());
        assert!(fs_le(&f2, &w(&f2, "a"), &w(&f2, "ab")).unwrap());
        assert!(!fs_le(&f2, &w(&f2, "ab"), &w(&f2, "a")).unwrap());
    }

    #[test]
    fn prefix_agreement() {
        assert!(prefix_agree(b"abc", b"abd", 2));
        assert!(prefix_agree(b"abc", b"abc", 99));
        assert!(!prefix_agree(b"ab", b"abc", 1));
    }

    #[test]
    fn reordering_examples() {
        let f1 = fixtures::fig1();
        let (out, cert) = reorder_after_prefix(&f1, &w(&f1, "ba"), &w(&f1, "ab"), &w(&f1, "abdc")).unwrap();
        assert_eq!(out, w(&f1, "badc"));
        assert_eq!(cert.replay(&f1).unwrap(), out);
        let (out, _) = reorder_after_prefix(&f1, &w(&f1, "ab"), &w(&f1, "ab"), &w(&f1, "abdc")).unwrap();
        assert_eq!(out, w(&f1, "abdc"));
        let f2 = fixtures::fig2();
        let (out, _) = reorder_after_prefix(&f2, &w(&f2, "ba"), &w(&f2, "ab"), &w(&f2, "abb")).unwrap();
        assert_eq!(out, w(&f2, "bab"));
    }

    #[test]
    fn localization_examples() {
        let f1 = fixtures::fig1();
        let (s, r, c) = localize_swaps(&f1, &w(&f1, "b"), &w(&f1, "badc"), &w(&f1, "adcb")).unwrap();
        assert_eq!((s.clone(), r.clone()), (w(&f1, "badc"), w(&f1, "adcb")));
        assert_eq!(c.replay(&f1).unwrap(), r);
        let rho = w(&f1, "abdc");
        assert_eq!(localize_swaps(&f1, &[], &rho, &rho).unwrap().0, Vec::<TransId>::new());
        let f2 = fixtures::fig2();
        let (s, r, _) = localize_swaps(&f2, &w(&f2, "a"), &w(&f2, "ab"), &w(&f2, "ab")).unwrap();
        assert_eq!((s, r), (w(&f2, "a"), w(&f2, "a")));
    }

    #[test]
    fn certificate_algebra() {
        let f2 = fixtures::fig2();
        let c = seq_star_equiv(&f2, &w(&f2, "abb"), &w(&f2, "bba")).unwrap().unwrap();
        let r = c.reversed();
        assert_eq!(r.source, w(&f2, "bba"));
        assert_eq!(r.replay(&f2).unwrap(), w(&f2, "abb"));
        let e = c.extended(&w(&f2, "a"));
        assert_eq!(e.replay(&f2).unwrap(), w(&f2, "bbaa"));
        let s = c.shifted(&f2, &w(&f2, "b")).unwrap();
        assert_eq!(s.replay(&f2).unwrap(), w(&f2, "bbba"));
        let both = c.clone().then(&r).unwrap();
        assert_eq!(both.replay(&f2).unwrap(), w(&f2, "abb"));
        assert!(c.clone().then(&c).is_err());
    }
}
