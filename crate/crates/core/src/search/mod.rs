//! Exact values of `D`, `D_r`, `η` and `η_r` by exhaustive search, plus the
//! zero-sum witness finders they rely on.

pub(crate) mod arith;
mod engine;
mod symmetry;
mod zero_sum;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::SearchError;
use crate::group::{exponent, GroupSpec};
use crate::packed::{test_bit, PackedGroup};
use crate::sequence::GSequence;

use engine::{Engine, Limits};
pub use zero_sum::{
    find_disjoint_short_zero_sums, find_disjoint_zero_sums, find_short_zero_sum, find_zero_sum,
    has_zero_sum, zero_sum_positions,
};
pub(crate) use zero_sum::DisjointSolver;

/// Largest group order searched for `D` unless the guard is lifted.
pub const GUARD_ORDER_D: u64 = 256;
/// Largest group order searched for `D_r`, `η`, `η_r` unless lifted.
pub const GUARD_ORDER_R: u64 = 81;
/// Largest `r` searched unless the guard is lifted.
pub const GUARD_R: u64 = 4;

/// Resource limits for a search.
#[derive(Clone, Debug)]
pub struct SearchBudget {
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
    /// Sequential search with reproducible node counts.
    pub deterministic: bool,
    /// Refuse groups beyond the default size guard. An explicit node or time
    /// limit also lifts the guard.
    pub enforce_size_guard: bool,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: None, max_time: None, deterministic: false, enforce_size_guard: true }
    }
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        SearchBudget::default()
    }

    pub fn deterministic() -> Self {
        SearchBudget { deterministic: true, ..SearchBudget::default() }
    }

    pub fn with_nodes(mut self, n: u64) -> Self {
        self.max_nodes = Some(n);
        self
    }

    pub fn with_time(mut self, t: Duration) -> Self {
        self.max_time = Some(t);
        self
    }

    pub fn without_guard(mut self) -> Self {
        self.enforce_size_guard = false;
        self
    }
}

/// Which zero-sums count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Invariant {
    /// Any nonempty zero-sum: `D`, `D_r`.
    #[serde(rename = "D")]
    Davenport,
    /// Zero-sums of length at most `exp(G)`: `η`, `η_r`.
    #[serde(rename = "eta")]
    Eta,
}

impl Invariant {
    /// Display name for the given `r`.
    pub fn label(self, r: u64) -> &'static str {
        match (self, r) {
            (Invariant::Davenport, 1) => "D",
            (Invariant::Davenport, _) => "D_r",
            (Invariant::Eta, 1) => "eta",
            (Invariant::Eta, _) => "eta_r",
        }
    }
}

impl std::str::FromStr for Invariant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "d" | "d_r" | "davenport" | "davenport_r" | "davenport-r" => Ok(Invariant::Davenport),
            "eta" | "eta_r" | "eta-r" => Ok(Invariant::Eta),
            other => Err(format!("unknown invariant `{other}`")),
        }
    }
}

/// An exactly computed invariant with its lower-bound certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComputeResult {
    pub value: u64,
    /// A deficient sequence of length `value − 1`.
    pub certificate: GSequence,
    pub nodes: u64,
}

/// `D(G)`.
pub fn davenport_exact(g: &GroupSpec, budget: &SearchBudget) -> Result<ComputeResult, SearchError> {
    compute(g, Invariant::Davenport, 1, budget)
}

/// `D_r(G)`.
pub fn davenport_r_exact(g: &GroupSpec, r: u64, budget: &SearchBudget) -> Result<ComputeResult, SearchError> {
    compute(g, Invariant::Davenport, r, budget)
}

/// `η(G)`.
pub fn eta_exact(g: &GroupSpec, budget: &SearchBudget) -> Result<ComputeResult, SearchError> {
    compute(g, Invariant::Eta, 1, budget)
}

/// `η_r(G)`.
pub fn eta_r_exact(g: &GroupSpec, r: u64, budget: &SearchBudget) -> Result<ComputeResult, SearchError> {
    compute(g, Invariant::Eta, r, budget)
}

/// Single invariant value; computes the lower levels it depends on.
pub fn compute(g: &GroupSpec, inv: Invariant, r: u64, budget: &SearchBudget) -> Result<ComputeResult, SearchError> {
    let mut all = profile(g, inv, r, budget)?;
    Ok(all.pop().expect("r ≥ 1"))
}

/// Values for `1, 2, …, r_max` disjoint zero-sums. The budget is shared
/// across levels.
pub fn profile(
    g: &GroupSpec,
    inv: Invariant,
    r_max: u64,
    budget: &SearchBudget,
) -> Result<Vec<ComputeResult>, SearchError> {
    profile_from(g, inv, r_max, budget, &[])
}

/// Like [`profile`], reusing already known values for the first levels.
pub fn profile_from(
    g: &GroupSpec,
    inv: Invariant,
    r_max: u64,
    budget: &SearchBudget,
    known: &[ComputeResult],
) -> Result<Vec<ComputeResult>, SearchError> {
    if r_max == 0 {
        return Err(SearchError::ZeroR);
    }
    check_guard(g, inv, r_max, budget)?;
    let pg = PackedGroup::new(g).ok_or(SearchError::SizeGuard { order: g.cardinality(), r: r_max })?;
    let start = Instant::now();
    let deadline = budget.max_time.map(|t| start + t);
    let mut out: Vec<ComputeResult> = known.iter().take(r_max as usize).cloned().collect();
    let mut spent: u64 = 0;
    for r in (out.len() as u64 + 1)..=r_max {
        let prior: Vec<u64> = out.iter().map(|c| c.value).collect();
        let limits = Limits {
            max_nodes: budget.max_nodes.map(|m| m.saturating_sub(spent)),
            deadline,
            parallel: !budget.deterministic,
            symmetric: true,
        };
        let seed = seed_sequence(&pg, inv, r as u32, &prior);
        let engine = Engine::new(&pg, inv == Invariant::Eta, r as u32, &prior, limits);
        let outcome = engine.run(seed);
        spent += outcome.nodes;
        let certificate = to_gsequence(&pg, &outcome.best);
        if !outcome.complete {
            return Err(SearchError::BudgetExceeded {
                lower_bound: outcome.best.len() as u64 + 1,
                nodes: spent,
                certificate: Box::new(certificate),
            });
        }
        out.push(ComputeResult { value: outcome.best.len() as u64 + 1, certificate, nodes: outcome.nodes });
    }
    Ok(out)
}

fn check_guard(g: &GroupSpec, inv: Invariant, r: u64, budget: &SearchBudget) -> Result<(), SearchError> {
    if !budget.enforce_size_guard || budget.max_nodes.is_some() || budget.max_time.is_some() {
        return Ok(());
    }
    let n = g.cardinality();
    let within = match (inv, r) {
        (Invariant::Davenport, 1) => n <= GUARD_ORDER_D,
        _ => n <= GUARD_ORDER_R && r <= GUARD_R,
    };
    if within {
        Ok(())
    } else {
        Err(SearchError::SizeGuard { order: n, r })
    }
}

pub(crate) fn to_gsequence(pg: &PackedGroup, items: &[usize]) -> GSequence {
    GSequence::from_elements(pg.spec().clone(), items.iter().map(|&i| pg.decode(i))).expect("packed indices are valid")
}

/// Deficient starting sequence: standard basis powers `e_i^{n_i − 1}` with the
/// largest coordinate raised to `r·n − 1`, greedily extended.
fn seed_sequence(pg: &PackedGroup, inv: Invariant, r: u32, prior: &[u64]) -> Vec<usize> {
    let spec = pg.spec();
    let orders = spec.orders();
    let mut seq = Vec::new();
    if let Some(top) = (0..orders.len()).max_by_key(|&i| (orders[i], i)) {
        for (i, &n) in orders.iter().enumerate() {
            let copies = if i == top { r as u64 * n - 1 } else { n - 1 };
            let e = pg.encode(&spec.basis(i));
            seq.extend(std::iter::repeat(e).take(copies as usize));
        }
    } else {
        seq.extend(std::iter::repeat(0).take(r as usize - 1));
    }
    let cap = match inv {
        Invariant::Davenport => arith::INF - 1,
        Invariant::Eta => exponent(spec).min(arith::INF as u64 - 1) as u16,
    };
    let deficient = |s: &[usize]| -> bool {
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        let mut elems = Vec::new();
        let mut counts: Vec<u32> = Vec::new();
        for g in sorted {
            if elems.last() == Some(&g) {
                *counts.last_mut().expect("nonempty") += 1;
            } else {
                elems.push(g);
                counts.push(1);
            }
        }
        DisjointSolver::new(pg, &elems, cap).solve_top(counts, r).is_none()
    };
    debug_assert!(deficient(&seq));
    if r == 1 && inv == Invariant::Davenport {
        let mut a = pg.zero_set();
        for &g in &seq {
            pg.absorb(&mut a, g);
        }
        for g in 1..pg.order() {
            while !test_bit(&a, pg.neg(g)) {
                pg.absorb(&mut a, g);
                seq.push(g);
            }
        }
    } else {
        // extend while deficiency survives, skipping quickly once the
        // sequence is as long as the trivial bound allows
        let ceiling = prior.last().copied().unwrap_or(0) + pg.order() as u64 * pg.exponent() as u64;
        for g in 0..pg.order() {
            while (seq.len() as u64) < ceiling {
                seq.push(g);
                if !deficient(&seq) {
                    seq.pop();
                    break;
                }
            }
        }
    }
    seq.sort_unstable();
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::d_star;

    fn g(v: &[u64]) -> GroupSpec {
        GroupSpec::new(v.to_vec()).unwrap()
    }
    fn det() -> SearchBudget {
        SearchBudget::deterministic()
    }

    #[test]
    fn davenport_examples() {
        assert_eq!(davenport_exact(&g(&[6]), &det()).unwrap().value, 6);
        assert_eq!(davenport_exact(&g(&[3, 3, 3]), &det()).unwrap().value, 7);
        assert_eq!(davenport_exact(&g(&[2, 4]), &det()).unwrap().value, 5);
    }

    #[test]
    fn davenport_r_examples() {
        assert_eq!(davenport_r_exact(&g(&[5]), 3, &det()).unwrap().value, 15);
        assert_eq!(davenport_r_exact(&g(&[2, 4]), 2, &det()).unwrap().value, 9);
        assert_eq!(davenport_r_exact(&g(&[3, 6]), 2, &det()).unwrap().value, 14);
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_exact(&g(&[4]), &det()).unwrap().value, 4);
        assert_eq!(eta_exact(&g(&[2, 2]), &det()).unwrap().value, 4);
    }

    #[test]
    fn trivial_group() {
        let t = GroupSpec::trivial();
        assert_eq!(davenport_exact(&t, &det()).unwrap().value, 1);
        assert_eq!(davenport_r_exact(&t, 3, &det()).unwrap().value, 3);
        assert_eq!(eta_r_exact(&t, 2, &det()).unwrap().value, 2);
    }

    #[test]
    fn certificates_are_deficient() {
        for orders in [vec![2, 2, 2], vec![3, 3], vec![2, 6]] {
            let grp = g(&orders);
            for r in 1..=2 {
                let res = davenport_r_exact(&grp, r, &det()).unwrap();
                assert_eq!(res.certificate.len(), res.value - 1);
                assert!(find_disjoint_zero_sums(&res.certificate, r).is_none());
                let res = eta_r_exact(&grp, r, &det()).unwrap();
                assert_eq!(res.certificate.len(), res.value - 1);
                assert!(find_disjoint_short_zero_sums(&res.certificate, r).is_none());
            }
        }
    }

    #[test]
    fn budget_exhaustion_reports_lower_bound() {
        let grp = g(&[7, 49]);
        let err = davenport_exact(&grp, &det().with_nodes(10)).unwrap_err();
        match err {
            SearchError::BudgetExceeded { lower_bound, certificate, .. } => {
                assert!(lower_bound >= d_star(&grp));
                assert_eq!(certificate.len() + 1, lower_bound);
                assert!(!has_zero_sum(&certificate));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn size_guard() {
        let big = g(&[3, 3, 3, 3, 4]);
        assert!(matches!(davenport_exact(&big, &det()), Err(SearchError::SizeGuard { .. })));
        assert!(matches!(davenport_r_exact(&g(&[2]), 5, &det()), Err(SearchError::SizeGuard { .. })));
        assert_eq!(davenport_r_exact(&g(&[2]), 5, &det().without_guard()).unwrap().value, 10);
        assert!(matches!(davenport_r_exact(&g(&[2]), 0, &det()), Err(SearchError::ZeroR)));
    }
}
