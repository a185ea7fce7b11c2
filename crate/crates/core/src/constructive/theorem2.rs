//! Zero-sum decision for sequences of length `p(q + d − 1) − d + 1` over
//! `C_p^d × C_q`, following the split into few and many nonzero `y`-values.

use log::{info, warn};

use crate::error::ConstructionError;
use crate::group::gcd;
use crate::pairs::{normalize, PairSequence};
use crate::search::zero_sum_positions;
use crate::sequence::sumset;

use super::{lemma15_augment, prop14_extract, Extraction, Route};

/// Returns a certified zero-sum of `s`, or a counterexample error carrying
/// `s` if none exists.
pub fn theorem2_decide(s: &PairSequence, p: u64, d: u64) -> Result<Extraction, ConstructionError> {
    let q = s.q();
    if gcd(p, q) != 1 {
        return Err(ConstructionError::Precondition(format!("gcd({p}, {q}) ≠ 1")));
    }
    let (st, perm) = normalize(s, p, d).map_err(|e| ConstructionError::Precondition(e.to_string()))?;
    let m = st.m() as u64;
    let r = st.r();
    if r <= p * q {
        let w = prop14_extract(&st)?;
        let positions = w.positions.iter().map(|&k| perm[k]).collect();
        return Extraction::certify(s, positions, w.route);
    }
    let j = st.blocks().iter().enumerate().map(|(i, &ri)| (i as u64 + 1) * ri).sum::<u64>() % q;
    if r == m {
        warn!("no zero-y term to exchange (r = m); using exhaustive search");
        return exhaustive(s);
    }
    if j == 0 {
        return exhaustive(s);
    }
    // swap one zero-y term for (−Σx, q − j); the result has y-sum 0
    let dropped = perm[st.m() - 1];
    let aug = lemma15_augment(s);
    debug_assert_eq!(aug.sequence().pairs()[aug.appended()].1, q - j);
    let keep: Vec<usize> = (0..aug.sequence().len()).filter(|&i| i != dropped).collect();
    let items: Vec<_> = keep.iter().map(|&i| aug.sequence().element(i)).collect();
    let Some(found) = zero_sum_positions(&aug.sequence().group(), &items) else {
        return Err(counterexample(s));
    };
    let w: Vec<usize> = found.into_iter().map(|k| keep[k]).collect();
    info!("exchanged sequence has a zero-sum of length {}", w.len());
    aug.pullback(&w)
}

fn exhaustive(s: &PairSequence) -> Result<Extraction, ConstructionError> {
    let items = s.elements();
    match zero_sum_positions(&s.group(), &items) {
        Some(pos) => Extraction::certify(s, pos, Route::Exhaustive),
        None => Err(counterexample(s)),
    }
}

/// Confirms the absence of a zero-sum through the independent sumset before
/// reporting.
fn counterexample(s: &PairSequence) -> ConstructionError {
    let g = s.to_gsequence();
    if sumset(&g).iter().any(|e| e.is_zero()) {
        return ConstructionError::Inconsistency("zero-sum searches disagree".into());
    }
    ConstructionError::Counterexample(Box::new(g))
}
