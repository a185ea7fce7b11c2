//! Combining `x`-zero-sums into full zero-sums, and the one-term
//! augmentation trick.

use crate::error::ConstructionError;
use crate::group::{GroupElement, GroupSpec};
use crate::pairs::{check_indices, PairSequence};
use crate::search::zero_sum_positions;

use super::{cyclic, Extraction, Route};

fn x_sum(s: &PairSequence, idx: &[usize]) -> GroupElement {
    let h = s.h();
    idx.iter().fold(h.zero(), |acc, &i| h.add(&acc, &s.pairs()[i].0).expect("valid"))
}

fn y_sum(s: &PairSequence, idx: &[usize]) -> u64 {
    idx.iter().map(|&i| s.pairs()[i].1).sum::<u64>() % s.q()
}

/// Given `q` disjoint position sets whose `x`-parts sum to zero, returns the
/// union of those sets whose `y`-sums form the lexicographically least
/// zero-sum over `C_q`.
pub fn lemma13_case1(s: &PairSequence, family: &[Vec<usize>]) -> Result<Extraction, ConstructionError> {
    let q = s.q() as usize;
    if family.len() < q {
        return Err(ConstructionError::CertifiedInput(format!(
            "{} disjoint x-zero-sums given, {q} needed",
            family.len()
        )));
    }
    let family = &family[..q];
    let all: Vec<usize> = family.iter().flatten().copied().collect();
    check_indices(&all, s.len()).map_err(|e| ConstructionError::CertifiedInput(format!("members not disjoint: {e}")))?;
    for (k, member) in family.iter().enumerate() {
        if member.is_empty() {
            return Err(ConstructionError::CertifiedInput(format!("member {k} is empty")));
        }
        if !x_sum(s, member).is_zero() {
            return Err(ConstructionError::CertifiedInput(format!("member {k} is not an x-zero-sum")));
        }
    }
    let ys: Vec<GroupElement> =
        family.iter().map(|m| GroupElement::from_residues(vec![y_sum(s, m)])).collect();
    let chosen = zero_sum_positions(&cyclic(s.q()), &ys)
        .ok_or_else(|| ConstructionError::Inconsistency(format!("{q} elements of C_{q} without a zero-sum")))?;
    let positions = chosen.into_iter().flat_map(|k| family[k].iter().copied()).collect();
    Extraction::certify(s, positions, Route::DisjointCombination)
}

/// With all `y` equal, an `x`-zero-sum `T` with `q | |T|` is a zero-sum.
pub fn lemma13_case2(s: &PairSequence, t: &[usize]) -> Result<Extraction, ConstructionError> {
    if let Some((_, y0)) = s.pairs().first() {
        if s.pairs().iter().any(|(_, y)| y != y0) {
            return Err(ConstructionError::Precondition("y-coordinates are not all equal".into()));
        }
    }
    check_indices(t, s.len())?;
    if t.is_empty() {
        return Err(ConstructionError::Precondition("T is empty".into()));
    }
    if !x_sum(s, t).is_zero() {
        return Err(ConstructionError::Precondition("T is not an x-zero-sum".into()));
    }
    if t.len() as u64 % s.q() != 0 {
        return Err(ConstructionError::Precondition(format!("{} does not divide |T| = {}", s.q(), t.len())));
    }
    Extraction::certify(s, t.to_vec(), Route::ConstantY)
}

/// `S` with the term `(−Σx, −Σy)` appended, so the whole sequence sums to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmented {
    original: PairSequence,
    sequence: PairSequence,
}

/// Appends `(t, ℓ) = (−Σ x_i, −Σ y_i)`.
pub fn lemma15_augment(s: &PairSequence) -> Augmented {
    let all: Vec<usize> = (0..s.len()).collect();
    let h: &GroupSpec = s.h();
    let t = h.negate(&x_sum(s, &all)).expect("valid");
    let l = (s.q() - y_sum(s, &all)) % s.q();
    let mut sequence = s.clone();
    sequence.push(t, l).expect("reduced");
    Augmented { original: s.clone(), sequence }
}

impl Augmented {
    pub fn sequence(&self) -> &PairSequence {
        &self.sequence
    }

    pub fn original(&self) -> &PairSequence {
        &self.original
    }

    /// Position of the appended term.
    pub fn appended(&self) -> usize {
        self.original.len()
    }

    /// Maps a proper zero-sum of the augmented sequence (positions) to a
    /// zero-sum of the original: itself if it avoids the appended term,
    /// otherwise the complement of its remaining terms.
    pub fn pullback(&self, w: &[usize]) -> Result<Extraction, ConstructionError> {
        check_indices(w, self.sequence.len())?;
        if w.is_empty() {
            return Err(ConstructionError::Precondition("empty subsequence".into()));
        }
        if w.len() == self.sequence.len() {
            return Err(ConstructionError::Precondition("the whole augmented sequence is not proper".into()));
        }
        if !self.sequence.sum_at(w).is_zero() {
            return Err(ConstructionError::CertifiedInput("subsequence does not sum to zero".into()));
        }
        let n = self.appended();
        if !w.contains(&n) {
            return Extraction::certify(&self.original, w.to_vec(), Route::AugmentDirect);
        }
        let complement: Vec<usize> = (0..n).filter(|i| !w.contains(i)).collect();
        Extraction::certify(&self.original, complement, Route::AugmentComplement)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: &[u64]) -> GroupElement {
        GroupElement::from_residues(v.to_vec())
    }

    fn seq(h: &[u64], q: u64, items: &[(&[u64], u64)]) -> PairSequence {
        PairSequence::new(GroupSpec::new(h.to_vec()).unwrap(), q, items.iter().map(|(x, y)| (el(x), *y)).collect())
            .unwrap()
    }

    #[test]
    fn disjoint_combination_examples() {
        let s = seq(&[2], 2, &[(&[1], 1), (&[1], 0), (&[1], 1), (&[1], 0)]);
        let w = lemma13_case1(&s, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(w.positions, vec![0, 1, 2, 3]);
        assert!(w.is_valid_for(&s));

        let s = seq(&[3], 2, &[(&[1], 0), (&[2], 0), (&[1], 1), (&[2], 1)]);
        let w = lemma13_case1(&s, &[vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(w.positions, vec![0, 1]);

        let bad = lemma13_case1(&s, &[vec![0], vec![2, 3]]);
        assert!(matches!(bad, Err(ConstructionError::CertifiedInput(_))));
        let overlap = lemma13_case1(&s, &[vec![0, 1], vec![1, 0]]);
        assert!(matches!(overlap, Err(ConstructionError::CertifiedInput(_))));
    }

    #[test]
    fn constant_y_examples() {
        let s = seq(&[3], 2, &[(&[1], 1), (&[1], 1), (&[1], 1)]);
        assert!(matches!(lemma13_case2(&s, &[0, 1, 2]), Err(ConstructionError::Precondition(_))));

        let s = seq(&[2], 2, &[(&[1], 1), (&[1], 1)]);
        assert_eq!(lemma13_case2(&s, &[0, 1]).unwrap().positions, vec![0, 1]);

        let s = seq(
            &[2, 2],
            3,
            &[(&[1, 0], 2), (&[1, 0], 2), (&[1, 0], 2), (&[0, 1], 2), (&[0, 1], 2), (&[0, 1], 2)],
        );
        // three copies each of (1,0) and (0,1) sum to (1,1) in C_2^2
        assert!(matches!(lemma13_case2(&s, &[0, 1, 2, 3, 4, 5]), Err(ConstructionError::Precondition(_))));
        let s = seq(&[2, 2], 3, &[(&[1u64, 0][..], 2); 6]);
        let w = lemma13_case2(&s, &[0, 1, 2, 3, 4, 5]).unwrap();
        assert!(w.is_valid_for(&s));

        let mixed = seq(&[2], 2, &[(&[1], 1), (&[1], 0)]);
        assert!(matches!(lemma13_case2(&mixed, &[0, 1]), Err(ConstructionError::Precondition(_))));
    }

    #[test]
    fn augmentation_examples() {
        let s = seq(&[2], 2, &[(&[1], 0), (&[1], 0), (&[0], 1)]);
        let a = lemma15_augment(&s);
        assert_eq!(a.sequence().pairs()[3], (el(&[0]), 1));
        let w = a.pullback(&[0, 1]).unwrap();
        assert_eq!(w.positions, vec![0, 1]);
        assert_eq!(w.route, Route::AugmentDirect);
        // through the appended term: (0,1)+(0,1) pulls back to the complement
        let w = a.pullback(&[2, 3]).unwrap();
        assert_eq!(w.positions, vec![0, 1]);
        assert_eq!(w.route, Route::AugmentComplement);
        assert!(matches!(a.pullback(&[0, 1, 2, 3]), Err(ConstructionError::Precondition(_))));
        assert!(matches!(a.pullback(&[0, 2]), Err(ConstructionError::CertifiedInput(_))));

        let s = seq(&[2], 2, &[(&[1], 0), (&[0], 1)]);
        let a = lemma15_augment(&s);
        assert_eq!(a.sequence().pairs()[2], (el(&[1]), 1));
        let g = a.sequence().to_gsequence();
        // only the full augmented sequence sums to zero
        let proper: Vec<Vec<usize>> = (1u32..7)
            .map(|mask| (0..3).filter(|i| mask >> i & 1 == 1).collect())
            .filter(|v: &Vec<usize>| a.sequence().sum_at(v).is_zero())
            .collect();
        assert!(proper.is_empty());
        assert!(!crate::search::has_zero_sum(&s.to_gsequence()));
        assert_eq!(g.len(), 3);
    }
}
