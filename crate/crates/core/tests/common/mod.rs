//! Strategies and independent oracles shared by the property suite and the
//! acceptance run.

#![allow(dead_code)]

use std::collections::BTreeSet;

use davenport_core::group::{canonicalize, d_star};
use davenport_core::search::{
    find_disjoint_zero_sums, find_zero_sum, profile, Invariant, SearchBudget,
};
use davenport_core::{sumset, GSequence, GroupElement, GroupSpec};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// Groups of order at most 16, written in arbitrary (not only canonical) form.
pub fn small_group() -> impl Strategy<Value = GroupSpec> {
    prop::sample::select(vec![
        vec![2],
        vec![3],
        vec![5],
        vec![6],
        vec![7],
        vec![8],
        vec![2, 2],
        vec![2, 4],
        vec![4, 2],
        vec![3, 3],
        vec![2, 6],
        vec![6, 2],
        vec![2, 3],
        vec![4, 4],
        vec![2, 2, 2],
        vec![2, 2, 4],
        vec![2, 2, 2, 2],
        vec![3, 5],
    ])
    .prop_map(|o| GroupSpec::new(o).unwrap())
}

pub fn sequence_over(g: GroupSpec, max_len: usize) -> impl Strategy<Value = GSequence> {
    let orders = g.orders().to_vec();
    let element = orders.iter().map(|&n| 0..n).collect::<Vec<_>>();
    prop::collection::vec(element, 0..=max_len).prop_map(move |items| {
        GSequence::from_elements(g.clone(), items.into_iter().map(GroupElement::from_residues)).unwrap()
    })
}

pub fn small_sequence(max_len: usize) -> impl Strategy<Value = GSequence> {
    small_group().prop_flat_map(move |g| sequence_over(g, max_len))
}

fn add_into(acc: &mut [u64], e: &[u64], orders: &[u64]) {
    for ((a, &x), &n) in acc.iter_mut().zip(e).zip(orders) {
        *a = (*a + x) % n;
    }
}

/// `Σ(S)` by enumerating every nonempty index subset.
pub fn brute_sumset(s: &GSequence) -> BTreeSet<GroupElement> {
    let items = s.to_vec();
    let orders = s.group().orders().to_vec();
    assert!(items.len() <= 16, "brute force limited to 16 terms");
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << items.len()) {
        let mut acc = vec![0u64; orders.len()];
        for (i, e) in items.iter().enumerate() {
            if mask >> i & 1 == 1 {
                add_into(&mut acc, e.residues(), &orders);
            }
        }
        out.insert(GroupElement::from_residues(acc));
    }
    out
}

/// Multiset inclusion and zero sum, checked by hand.
pub fn is_zero_sum_subsequence(t: &[GroupElement], s: &GSequence) -> bool {
    let mut pool = s.to_vec();
    for e in t {
        match pool.iter().position(|x| x == e) {
            Some(i) => {
                pool.swap_remove(i);
            }
            None => return false,
        }
    }
    let orders = s.group().orders();
    let mut acc = vec![0u64; orders.len()];
    for e in t {
        add_into(&mut acc, e.residues(), orders);
    }
    !t.is_empty() && acc.iter().all(|&a| a == 0)
}

fn expand(w: &davenport_core::Witness) -> Vec<GroupElement> {
    w.powers().flat_map(|(e, k)| std::iter::repeat_n(e.clone(), k as usize)).collect()
}

/// Witnesses returned by the finders are genuine, and absence agrees with
/// the brute-force sumset.
pub fn check_witnesses(s: &GSequence) -> Result<(), TestCaseError> {
    let zero = s.group().zero();
    match find_zero_sum(s) {
        Some(w) => {
            prop_assert!(w.certifies(s));
            prop_assert!(is_zero_sum_subsequence(&expand(&w), s));
        }
        None => prop_assert!(!brute_sumset(s).contains(&zero)),
    }
    if let Some(family) = find_disjoint_zero_sums(s, 2) {
        prop_assert_eq!(family.len(), 2);
        let joined: Vec<GroupElement> = family.members().iter().flat_map(expand).collect();
        prop_assert!(is_zero_sum_subsequence(&joined, s));
        for m in family.members() {
            prop_assert!(is_zero_sum_subsequence(&expand(m), s));
        }
    }
    Ok(())
}

pub fn check_sumset(s: &GSequence) -> Result<(), TestCaseError> {
    prop_assert_eq!(sumset(s), brute_sumset(s));
    Ok(())
}

/// `D_r ≤ D_{r+1}` and `η_r ≤ η_{r+1}` for `r < r_max`.
pub fn check_monotone(g: &GroupSpec, r_max: u64) -> Result<(), TestCaseError> {
    let budget = SearchBudget::deterministic();
    for inv in [Invariant::Davenport, Invariant::Eta] {
        let values: Vec<u64> = profile(g, inv, r_max, &budget)
            .map_err(|e| TestCaseError::fail(e.to_string()))?
            .iter()
            .map(|c| c.value)
            .collect();
        for w in values.windows(2) {
            prop_assert!(w[0] <= w[1], "{:?} of {} not monotone: {:?}", inv, g, values);
        }
    }
    Ok(())
}

/// `D*(G) ≤ D(G) ≤ η(G)`, with `D*` recomputed from the invariant factors.
pub fn check_sandwich(g: &GroupSpec) -> Result<(), TestCaseError> {
    let budget = SearchBudget::deterministic();
    let c = canonicalize(g);
    let star = 1 + c.orders().iter().map(|n| n - 1).sum::<u64>();
    prop_assert_eq!(star, d_star(g));
    let d = profile(g, Invariant::Davenport, 1, &budget).map_err(|e| TestCaseError::fail(e.to_string()))?[0].value;
    let eta = profile(g, Invariant::Eta, 1, &budget).map_err(|e| TestCaseError::fail(e.to_string()))?[0].value;
    prop_assert!(star <= d && d <= eta, "{}: D* = {}, D = {}, eta = {}", g, star, d, eta);
    Ok(())
}
