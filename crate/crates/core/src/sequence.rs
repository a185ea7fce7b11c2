//! Sequences over a finite abelian group, stored as multiplicity maps.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{GroupError, SequenceError};
use crate::group::{GroupElement, GroupSpec};
use crate::packed::{iter_bits, test_bit, PackedGroup};

/// A finite multiset of group elements; `v_g(S)` is [`multiplicity`](Self::multiplicity).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GSequence {
    group: GroupSpec,
    mult: BTreeMap<GroupElement, u64>,
}

impl GSequence {
    pub fn empty(group: GroupSpec) -> Self {
        GSequence { group, mult: BTreeMap::new() }
    }

    /// Builds a sequence from a list with repetitions.
    pub fn from_elements<I>(group: GroupSpec, elements: I) -> Result<Self, GroupError>
    where
        I: IntoIterator<Item = GroupElement>,
    {
        let mut s = GSequence::empty(group);
        for e in elements {
            s.push(e, 1)?;
        }
        Ok(s)
    }

    /// Builds from `(element, multiplicity)` pairs; zero multiplicities are dropped.
    pub fn from_powers<I>(group: GroupSpec, powers: I) -> Result<Self, GroupError>
    where
        I: IntoIterator<Item = (GroupElement, u64)>,
    {
        let mut s = GSequence::empty(group);
        for (e, k) in powers {
            s.push(e, k)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, e: GroupElement, k: u64) -> Result<(), GroupError> {
        self.group.validate(&e)?;
        if k > 0 {
            *self.mult.entry(e).or_insert(0) += k;
        }
        Ok(())
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn multiplicity(&self, g: &GroupElement) -> u64 {
        self.mult.get(g).copied().unwrap_or(0)
    }

    /// `|S|`.
    pub fn len(&self) -> u64 {
        self.mult.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mult.is_empty()
    }

    /// Distinct elements with their multiplicities, in the global order.
    pub fn powers(&self) -> impl Iterator<Item = (&GroupElement, u64)> {
        self.mult.iter().map(|(e, &k)| (e, k))
    }

    /// Elements with repetition, non-decreasing.
    pub fn to_vec(&self) -> Vec<GroupElement> {
        self.mult
            .iter()
            .flat_map(|(e, &k)| std::iter::repeat(e.clone()).take(k as usize))
            .collect()
    }

    pub fn is_subsequence_of(&self, other: &GSequence) -> bool {
        self.group == other.group && self.mult.iter().all(|(e, &k)| other.multiplicity(e) >= k)
    }

    /// Multiset union `S·T`.
    pub fn join(&self, other: &GSequence) -> Result<GSequence, SequenceError> {
        if self.group != other.group {
            return Err(SequenceError::Malformed("sequences over different groups".into()));
        }
        let mut out = self.clone();
        for (e, k) in other.powers() {
            *out.mult.entry(e.clone()).or_insert(0) += k;
        }
        Ok(out)
    }

    /// Stable identifier of this multiset, used to tie witnesses to a parent.
    pub fn fingerprint(&self) -> u64 {
        // FNV-1a over the canonical encoding
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |x: u64| {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        };
        for &n in self.group.orders() {
            feed(n);
        }
        feed(u64::MAX);
        for (e, k) in &self.mult {
            for &r in e.residues() {
                feed(r);
            }
            feed(*k);
        }
        h
    }
}

/// `σ(S)`, the sum of all terms.
pub fn sigma(s: &GSequence) -> GroupElement {
    let g = s.group();
    let mut acc = vec![0u64; g.len()];
    for (e, k) in s.powers() {
        for (i, (&r, &n)) in e.residues().iter().zip(g.orders()).enumerate() {
            acc[i] = ((acc[i] as u128 + r as u128 * k as u128) % n as u128) as u64;
        }
    }
    GroupElement::from_residues(acc)
}

/// `Σ(S)`: sums of all nonempty subsequences.
///
/// Reachable-set dynamic program: terms are inserted one at a time and the
/// set of sums grows as `R ← R ∪ (R + g) ∪ {g}`.
pub fn sumset(s: &GSequence) -> BTreeSet<GroupElement> {
    let Some(p) = PackedGroup::new(s.group()) else {
        return sumset_sparse(s);
    };
    // `with_zero` tracks Σ(S) ∪ {0}; `hit_zero` records whether 0 is a genuine sum
    let mut with_zero = p.zero_set();
    let mut hit_zero = false;
    let mut shifted = p.empty_set();
    for (e, k) in s.powers() {
        let gi = p.encode(e);
        for _ in 0..k {
            if test_bit(&with_zero, p.neg(gi)) {
                hit_zero = true;
            }
            p.translate_into(&with_zero, gi, &mut shifted);
            for (a, b) in with_zero.iter_mut().zip(&shifted) {
                *a |= *b;
            }
        }
    }
    let mut out: BTreeSet<GroupElement> =
        iter_bits(&with_zero).filter(|&i| i != 0).map(|i| p.decode(i)).collect();
    if hit_zero {
        out.insert(s.group().zero());
    }
    out
}

fn sumset_sparse(s: &GSequence) -> BTreeSet<GroupElement> {
    let g = s.group();
    let mut reach: BTreeSet<GroupElement> = BTreeSet::new();
    for e in s.to_vec() {
        let shifted: Vec<GroupElement> =
            reach.iter().map(|x| g.add(x, &e).expect("validated")).collect();
        reach.extend(shifted);
        reach.insert(e);
    }
    reach
}

/// A certified nonempty subsequence `T | S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    parent: u64,
    mult: BTreeMap<GroupElement, u64>,
}

impl Witness {
    /// Validates eagerly: nonempty and `v_g(T) ≤ v_g(S)` for every `g`.
    pub fn new(parent: &GSequence, mult: BTreeMap<GroupElement, u64>) -> Result<Self, SequenceError> {
        let mult: BTreeMap<_, _> = mult.into_iter().filter(|(_, k)| *k > 0).collect();
        if mult.is_empty() {
            return Err(SequenceError::InvalidWitness("empty witness".into()));
        }
        for (e, &k) in &mult {
            parent.group().validate(e)?;
            let have = parent.multiplicity(e);
            if k > have {
                return Err(SequenceError::InvalidWitness(format!(
                    "{e} used {k} times but parent has {have}"
                )));
            }
        }
        Ok(Witness { parent: parent.fingerprint(), mult })
    }

    pub fn from_elements<I>(parent: &GSequence, elements: I) -> Result<Self, SequenceError>
    where
        I: IntoIterator<Item = GroupElement>,
    {
        let mut mult = BTreeMap::new();
        for e in elements {
            *mult.entry(e).or_insert(0) += 1;
        }
        Witness::new(parent, mult)
    }

    pub fn parent(&self) -> u64 {
        self.parent
    }

    pub fn certifies(&self, s: &GSequence) -> bool {
        self.parent == s.fingerprint()
    }

    pub fn len(&self) -> u64 {
        self.mult.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mult.is_empty()
    }

    pub fn powers(&self) -> impl Iterator<Item = (&GroupElement, u64)> {
        self.mult.iter().map(|(e, &k)| (e, k))
    }

    pub fn multiplicity(&self, g: &GroupElement) -> u64 {
        self.mult.get(g).copied().unwrap_or(0)
    }

    /// The witness as a standalone sequence over the parent's group.
    pub fn to_sequence(&self, group: &GroupSpec) -> Result<GSequence, GroupError> {
        GSequence::from_powers(group.clone(), self.mult.iter().map(|(e, &k)| (e.clone(), k)))
    }

    /// Nonempty, a subsequence of `s`, and `σ = 0`.
    pub fn is_zero_sum_of(&self, s: &GSequence) -> bool {
        match self.to_sequence(s.group()) {
            Ok(t) => !t.is_empty() && t.is_subsequence_of(s) && sigma(&t).is_zero(),
            Err(_) => false,
        }
    }
}

/// `S·T^{-1}`.
pub fn remove(s: &GSequence, t: &Witness) -> Result<GSequence, SequenceError> {
    let mut out = s.clone();
    for (e, k) in t.powers() {
        let have = out.multiplicity(e);
        if k > have {
            return Err(SequenceError::InvalidWitness(format!(
                "cannot remove {k} copies of {e} from {have}"
            )));
        }
        if k == have {
            out.mult.remove(e);
        } else {
            out.mult.insert(e.clone(), have - k);
        }
    }
    Ok(out)
}

/// `r` mutually disjoint subsequences of one parent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointFamily {
    members: Vec<Witness>,
}

impl DisjointFamily {
    /// Checks that the members' total multiplicities fit inside `parent`.
    pub fn new(parent: &GSequence, members: Vec<Witness>) -> Result<Self, SequenceError> {
        let fp = parent.fingerprint();
        let mut used: BTreeMap<&GroupElement, u64> = BTreeMap::new();
        for w in &members {
            if w.parent != fp {
                return Err(SequenceError::InvalidWitness("member certifies another sequence".into()));
            }
            for (e, k) in w.powers() {
                *used.entry(e).or_insert(0) += k;
            }
        }
        for (e, k) in used {
            if k > parent.multiplicity(e) {
                return Err(SequenceError::InvalidWitness(format!("members overlap on {e}")));
            }
        }
        Ok(DisjointFamily { members })
    }

    pub fn members(&self) -> &[Witness] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Every member is a zero-sum subsequence of `s`, and they are disjoint.
    pub fn is_zero_sum_family_of(&self, s: &GSequence) -> bool {
        DisjointFamily::new(s, self.members.clone()).is_ok()
            && self.members.iter().all(|w| w.is_zero_sum_of(s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(v: &[u64]) -> GroupSpec {
        GroupSpec::new(v.to_vec()).unwrap()
    }
    fn el(v: &[u64]) -> GroupElement {
        GroupElement::from_residues(v.to_vec())
    }
    fn seq(orders: &[u64], items: &[(&[u64], u64)]) -> GSequence {
        GSequence::from_powers(g(orders), items.iter().map(|(e, k)| (el(e), *k))).unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&seq(&[3, 3], &[(&[1, 0], 2), (&[2, 0], 1)])), el(&[1, 0]));
        assert_eq!(sigma(&GSequence::empty(g(&[3, 3]))), el(&[0, 0]));
        assert_eq!(sigma(&seq(&[2, 4], &[(&[1, 1], 1), (&[1, 3], 1)])), el(&[0, 0]));
    }

    #[test]
    fn sumset_examples() {
        let s = sumset(&seq(&[4], &[(&[1], 2)]));
        assert_eq!(s, [el(&[1]), el(&[2])].into_iter().collect());
        let s = sumset(&seq(&[2, 2], &[(&[1, 0], 1), (&[0, 1], 1)]));
        assert_eq!(s, [el(&[1, 0]), el(&[0, 1]), el(&[1, 1])].into_iter().collect());
        let s = sumset(&seq(&[5], &[(&[1], 1), (&[2], 1), (&[4], 1)]));
        assert_eq!(s, (0..5).map(|i| el(&[i])).collect());
    }

    #[test]
    fn remove_examples() {
        let s = seq(&[5], &[(&[1], 3)]);
        let t = Witness::new(&s, [(el(&[1]), 1)].into_iter().collect()).unwrap();
        assert_eq!(remove(&s, &t).unwrap(), seq(&[5], &[(&[1], 2)]));

        let s = seq(&[5], &[(&[1], 2), (&[2], 1)]);
        let t = Witness::new(&s, [(el(&[1]), 2), (el(&[2]), 1)].into_iter().collect()).unwrap();
        assert!(remove(&s, &t).unwrap().is_empty());

        let s = seq(&[5], &[(&[1], 1)]);
        assert!(matches!(
            Witness::new(&s, [(el(&[1]), 2)].into_iter().collect()),
            Err(SequenceError::InvalidWitness(_))
        ));
        // a witness certified against a larger parent cannot be removed from a smaller one
        let big = seq(&[5], &[(&[1], 2)]);
        let t = Witness::new(&big, [(el(&[1]), 2)].into_iter().collect()).unwrap();
        assert!(remove(&s, &t).is_err());
    }

    #[test]
    fn empty_witness_rejected() {
        let s = seq(&[5], &[(&[1], 1)]);
        assert!(Witness::new(&s, BTreeMap::new()).is_err());
    }

    #[test]
    fn family_disjointness_audit() {
        let s = seq(&[2, 2], &[(&[1, 0], 2), (&[0, 1], 2), (&[1, 1], 2)]);
        let w = |e: &[u64]| Witness::new(&s, [(el(e), 2)].into_iter().collect()).unwrap();
        let fam = DisjointFamily::new(&s, vec![w(&[1, 0]), w(&[0, 1]), w(&[1, 1])]).unwrap();
        assert!(fam.is_zero_sum_family_of(&s));
        assert!(DisjointFamily::new(&s, vec![w(&[1, 0]), w(&[1, 0])]).is_err());
    }

    fn brute_sumset(s: &GSequence) -> BTreeSet<GroupElement> {
        let items = s.to_vec();
        let gr = s.group();
        let mut out = BTreeSet::new();
        for mask in 1u32..(1 << items.len()) {
            let mut acc = gr.zero();
            for (i, e) in items.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc = gr.add(&acc, e).unwrap();
                }
            }
            out.insert(acc);
        }
        out
    }

    fn small_group() -> impl Strategy<Value = GroupSpec> {
        prop::sample::select(vec![
            vec![2], vec![5], vec![12], vec![36], vec![2, 2], vec![2, 4], vec![3, 3],
            vec![2, 6], vec![3, 6], vec![2, 2, 2], vec![2, 2, 4], vec![6, 6], vec![2, 3, 6],
        ])
        .prop_map(|o| GroupSpec::new(o).unwrap())
    }

    fn seq_in(max_len: usize) -> impl Strategy<Value = GSequence> {
        small_group().prop_flat_map(move |gr| {
            let n = gr.cardinality();
            prop::collection::vec(0..n, 0..=max_len).prop_map(move |idx| {
                let elems: Vec<_> = gr.elements().collect();
                GSequence::from_elements(gr.clone(), idx.into_iter().map(|i| elems[i as usize].clone()))
                    .unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn sumset_dp_matches_brute_force(s in seq_in(12)) {
            prop_assert_eq!(sumset(&s), brute_sumset(&s));
            prop_assert_eq!(sumset_sparse(&s), brute_sumset(&s));
        }

        #[test]
        fn remove_then_join_restores(s in seq_in(10), pick in prop::collection::vec(any::<bool>(), 10)) {
            let items = s.to_vec();
            let chosen: Vec<_> = items.iter().zip(&pick).filter(|(_, &p)| p).map(|(e, _)| e.clone()).collect();
            if let Ok(t) = Witness::from_elements(&s, chosen) {
                let rest = remove(&s, &t).unwrap();
                prop_assert_eq!(rest.len(), s.len() - t.len());
                let back = rest.join(&t.to_sequence(s.group()).unwrap()).unwrap();
                prop_assert_eq!(back, s);
            }
        }
    }
}
