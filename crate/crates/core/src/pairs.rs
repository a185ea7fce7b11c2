//! Positional sequences over product groups `H × C_q`.
//!
//! The constructive procedures address individual terms by position (runs
//! of consecutive terms, "the last zero-y term"), so these types keep an
//! ordered list rather than a multiplicity map.

use serde::{Deserialize, Serialize};

use crate::error::SequenceError;
use crate::group::{is_prime, GroupElement, GroupSpec};
use crate::sequence::GSequence;

/// `(x_1, y_1) … (x_k, y_k)` over `H × C_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSequence {
    h: GroupSpec,
    q: u64,
    pairs: Vec<(GroupElement, u64)>,
}

impl PairSequence {
    pub fn new(h: GroupSpec, q: u64, pairs: Vec<(GroupElement, u64)>) -> Result<Self, SequenceError> {
        if q == 0 {
            return Err(SequenceError::Malformed("q must be at least 1".into()));
        }
        for (x, y) in &pairs {
            h.validate(x)?;
            if *y >= q {
                return Err(SequenceError::Malformed(format!("y-coordinate {y} not reduced mod {q}")));
            }
        }
        Ok(PairSequence { h, q, pairs })
    }

    /// Splits full elements of `H × C_q` (last coordinate is `y`).
    pub fn from_product_elements(
        group: &GroupSpec,
        elements: &[GroupElement],
    ) -> Result<Self, SequenceError> {
        let orders = group.orders();
        let Some((&q, h)) = orders.split_last() else {
            return Err(SequenceError::Malformed("product group needs a C_q factor".into()));
        };
        let h = GroupSpec::new(h.to_vec())?;
        let mut pairs = Vec::with_capacity(elements.len());
        for e in elements {
            group.validate(e)?;
            let (y, x) = e.residues().split_last().expect("validated length");
            pairs.push((GroupElement::from_residues(x.to_vec()), *y));
        }
        PairSequence::new(h, q, pairs)
    }

    pub fn h(&self) -> &GroupSpec {
        &self.h
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn pairs(&self) -> &[(GroupElement, u64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The written product group `H × C_q`.
    pub fn group(&self) -> GroupSpec {
        let mut o = self.h.orders().to_vec();
        o.push(self.q);
        GroupSpec::new(o).expect("valid factors")
    }

    /// Term `i` as an element of `H × C_q`.
    pub fn element(&self, i: usize) -> GroupElement {
        let (x, y) = &self.pairs[i];
        let mut r = x.residues().to_vec();
        r.push(*y);
        GroupElement::from_residues(r)
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.len()).map(|i| self.element(i)).collect()
    }

    pub fn xs(&self) -> Vec<GroupElement> {
        self.pairs.iter().map(|(x, _)| x.clone()).collect()
    }

    pub fn ys(&self) -> Vec<u64> {
        self.pairs.iter().map(|(_, y)| *y).collect()
    }

    pub fn to_gsequence(&self) -> GSequence {
        GSequence::from_elements(self.group(), self.elements()).expect("validated pairs")
    }

    pub fn push(&mut self, x: GroupElement, y: u64) -> Result<(), SequenceError> {
        self.h.validate(&x)?;
        if y >= self.q {
            return Err(SequenceError::Malformed(format!("y-coordinate {y} not reduced mod {}", self.q)));
        }
        self.pairs.push((x, y));
        Ok(())
    }

    /// Sum of the full terms at `indices` in `H × C_q`.
    pub fn sum_at(&self, indices: &[usize]) -> GroupElement {
        let g = self.group();
        indices.iter().fold(g.zero(), |acc, &i| g.add(&acc, &self.element(i)).expect("valid"))
    }
}

/// Checks an index list against a sequence length: in range, no repeats.
pub fn check_indices(indices: &[usize], len: usize) -> Result<(), SequenceError> {
    let mut seen = vec![false; len];
    for &i in indices {
        if i >= len {
            return Err(SequenceError::IndexOutOfRange { index: i, len });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(SequenceError::RepeatedIndex(i));
        }
    }
    Ok(())
}

/// The extension `T^S`: the pairs of `s` at the selected (0-based) positions,
/// kept in positional order.
pub fn extension(indices: &[usize], s: &PairSequence) -> Result<PairSequence, SequenceError> {
    check_indices(indices, s.len())?;
    let mut idx = indices.to_vec();
    idx.sort_unstable();
    Ok(PairSequence {
        h: s.h.clone(),
        q: s.q,
        pairs: idx.into_iter().map(|i| s.pairs[i].clone()).collect(),
    })
}

/// `m = p(q + d − 1) − (d − 1)`, the length of the structured sequences.
pub fn structured_length(p: u64, q: u64, d: u64) -> u64 {
    p * (q + d - 1) - (d - 1)
}

/// A sequence over `C_p^d × C_q` whose `y`-values come in sorted blocks:
/// `r_1` terms with `y = 1`, then `r_2` with `y = 2`, …, then zeros.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredSequence {
    p: u64,
    q: u64,
    d: u64,
    x: Vec<GroupElement>,
    blocks: Vec<u64>,
}

impl StructuredSequence {
    pub fn new(p: u64, q: u64, d: u64, x: Vec<GroupElement>, blocks: Vec<u64>) -> Result<Self, SequenceError> {
        if !is_prime(p) {
            return Err(SequenceError::Malformed(format!("{p} is not prime")));
        }
        if q == 0 || d == 0 {
            return Err(SequenceError::Malformed("q and d must be positive".into()));
        }
        let m = structured_length(p, q, d) as usize;
        if x.len() != m {
            return Err(SequenceError::WrongLength { expected: m, found: x.len() });
        }
        if blocks.len() != (q - 1) as usize {
            return Err(SequenceError::Malformed(format!(
                "expected {} block sizes, found {}",
                q - 1,
                blocks.len()
            )));
        }
        if blocks.iter().sum::<u64>() > m as u64 {
            return Err(SequenceError::Malformed("blocks exceed the sequence length".into()));
        }
        let h = GroupSpec::power(p, d as usize)?;
        for e in &x {
            h.validate(e)?;
        }
        Ok(StructuredSequence { p, q, d, x, blocks })
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn m(&self) -> usize {
        self.x.len()
    }
    pub fn x(&self) -> &[GroupElement] {
        &self.x
    }
    /// `r_1, …, r_{q−1}`.
    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }
    /// `r = Σ r_i`, the number of terms with nonzero `y`.
    pub fn r(&self) -> u64 {
        self.blocks.iter().sum()
    }
    /// `t_i = ⌊r_i / q⌋`.
    pub fn t(&self) -> Vec<u64> {
        self.blocks.iter().map(|r| r / self.q).collect()
    }
    /// `ℓ_i = r_i − q·t_i`.
    pub fn leftovers(&self) -> Vec<u64> {
        self.blocks.iter().map(|r| r % self.q).collect()
    }

    /// 0-based start of block `i` (1-based block label, `y = i`).
    pub fn block_start(&self, i: usize) -> usize {
        self.blocks[..i - 1].iter().sum::<u64>() as usize
    }

    pub fn y(&self, pos: usize) -> u64 {
        let mut acc = 0usize;
        for (i, &r) in self.blocks.iter().enumerate() {
            acc += r as usize;
            if pos < acc {
                return i as u64 + 1;
            }
        }
        0
    }

    pub fn h(&self) -> GroupSpec {
        GroupSpec::power(self.p, self.d as usize).expect("valid")
    }

    pub fn to_pair_sequence(&self) -> PairSequence {
        let pairs = self.x.iter().enumerate().map(|(i, x)| (x.clone(), self.y(i))).collect();
        PairSequence { h: self.h(), q: self.q, pairs }
    }
}

/// Reorders `s` so its `y`-values form the blocks `1, …, q−1` followed by
/// zeros. Returns the structured sequence and `perm`, where `perm[k]` is the
/// original index of the term now at position `k`.
pub fn normalize(
    s: &PairSequence,
    p: u64,
    d: u64,
) -> Result<(StructuredSequence, Vec<usize>), SequenceError> {
    let q = s.q;
    let m = structured_length(p, q, d) as usize;
    if s.len() != m {
        return Err(SequenceError::WrongLength { expected: m, found: s.len() });
    }
    if s.h != GroupSpec::power(p, d as usize)? {
        return Err(SequenceError::Malformed(format!("x-coordinates must lie in C_{p}^{d}")));
    }
    let key = |y: u64| if y == 0 { q } else { y };
    let mut perm: Vec<usize> = (0..m).collect();
    perm.sort_by_key(|&i| key(s.pairs[i].1));
    let mut blocks = vec![0u64; (q - 1) as usize];
    for (_, y) in &s.pairs {
        if *y > 0 {
            blocks[(*y - 1) as usize] += 1;
        }
    }
    let x = perm.iter().map(|&i| s.pairs[i].0.clone()).collect();
    Ok((StructuredSequence::new(p, q, d, x, blocks)?, perm))
}
