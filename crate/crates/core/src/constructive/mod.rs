//! Witness-producing constructions for sequences over `H × C_q`.
//!
//! Every procedure returns positions into its input together with a
//! certified [`Witness`]; the zero sum is re-checked before returning.

mod conjecture;
mod lemmas;
mod prop14;
mod theorem2;

use serde::{Deserialize, Serialize};

use crate::error::ConstructionError;
use crate::group::{GroupElement, GroupSpec};
use crate::pairs::{check_indices, PairSequence};
use crate::search::{find_disjoint_zero_sums, zero_sum_positions};
use crate::sequence::{GSequence, Witness};

pub use conjecture::{
    block_signatures, conjecture1_check, search_space_size, Checkpoint, ConjectureOptions, ConjectureStatus,
    ConjectureVerdict,
};
pub use lemmas::{lemma13_case1, lemma13_case2, lemma15_augment, Augmented};
pub use prop14::prop14_extract;
pub use theorem2::theorem2_decide;

/// Which construction produced a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Zero-sum inside the zero-`y` tail.
    TailOnly,
    /// Zero-sum among full-run sums and the tail.
    RunSums,
    /// Leftover `y`-values contribute extra zero-sum groups, last residue class.
    LeftoverFull,
    /// Leftover `y`-values contribute extra zero-sum groups, other residues.
    LeftoverPartial,
    /// Combination of disjoint `x`-zero-sums by their `y`-sums.
    DisjointCombination,
    /// `x`-zero-sum of length divisible by `q` with constant `y`.
    ConstantY,
    /// Augmented zero-sum avoiding the appended term.
    AugmentDirect,
    /// Complement of an augmented zero-sum through the appended term.
    AugmentComplement,
    /// Exhaustive zero-sum search on the whole input.
    Exhaustive,
}

/// A certified zero-sum subsequence of a positional sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    /// Sorted 0-based positions into the input.
    pub positions: Vec<usize>,
    pub witness: Witness,
    pub route: Route,
}

impl Extraction {
    /// Validates `positions` as a nonempty zero-sum subsequence of `s`.
    pub(crate) fn certify(s: &PairSequence, mut positions: Vec<usize>, route: Route) -> Result<Self, ConstructionError> {
        positions.sort_unstable();
        check_indices(&positions, s.len()).map_err(|e| ConstructionError::Inconsistency(e.to_string()))?;
        if positions.is_empty() {
            return Err(ConstructionError::Inconsistency("empty witness".into()));
        }
        if !s.sum_at(&positions).is_zero() {
            return Err(ConstructionError::Inconsistency(format!("positions {positions:?} do not sum to zero")));
        }
        let parent = s.to_gsequence();
        let witness = Witness::from_elements(&parent, positions.iter().map(|&i| s.element(i)))?;
        Ok(Extraction { positions, witness, route })
    }

    /// Re-validates against `s` from scratch.
    pub fn is_valid_for(&self, s: &PairSequence) -> bool {
        let mut sorted = self.positions.clone();
        sorted.sort_unstable();
        sorted.dedup();
        sorted.len() == self.positions.len()
            && !sorted.is_empty()
            && sorted.iter().all(|&i| i < s.len())
            && s.sum_at(&sorted).is_zero()
            && self.witness.is_zero_sum_of(&s.to_gsequence())
    }
}

/// A term of an auxiliary sequence that stands for a group of positions.
#[derive(Clone, Debug)]
pub(crate) struct Compound {
    pub value: GroupElement,
    pub positions: Vec<usize>,
}

/// Lexicographically least zero-sum among compound terms, expanded.
pub(crate) fn expand_zero_sum(group: &GroupSpec, items: &[Compound]) -> Option<Vec<usize>> {
    let values: Vec<GroupElement> = items.iter().map(|c| c.value.clone()).collect();
    let chosen = zero_sum_positions(group, &values)?;
    Some(chosen.into_iter().flat_map(|i| items[i].positions.iter().copied()).collect())
}

/// `k` disjoint zero-sum position groups of a positional list, if they exist.
pub(crate) fn disjoint_zero_sum_positions(
    group: &GroupSpec,
    items: &[GroupElement],
    k: usize,
) -> Option<Vec<Vec<usize>>> {
    if k == 0 {
        return Some(Vec::new());
    }
    let seq = GSequence::from_elements(group.clone(), items.iter().cloned()).ok()?;
    let family = find_disjoint_zero_sums(&seq, k as u64)?;
    let mut used = vec![false; items.len()];
    let mut out = Vec::with_capacity(k);
    for member in family.members() {
        let mut pos = Vec::new();
        for (e, mult) in member.powers() {
            let mut left = mult;
            for (i, it) in items.iter().enumerate() {
                if left == 0 {
                    break;
                }
                if !used[i] && it == e {
                    used[i] = true;
                    pos.push(i);
                    left -= 1;
                }
            }
        }
        pos.sort_unstable();
        out.push(pos);
    }
    Some(out)
}

pub(crate) fn cyclic(q: u64) -> GroupSpec {
    GroupSpec::new(vec![q]).expect("q ≥ 1")
}
