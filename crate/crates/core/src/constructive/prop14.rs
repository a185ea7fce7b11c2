//! Zero-sum extraction for structured sequences with few nonzero `y`-values.
//!
//! Runs of `q` consecutive terms inside one `y`-block have `y`-sum `≡ 0`, so
//! their `x`-sums can stand in for them in a zero-sum search over `C_p^d`.
//! When the runs and the zero tail are too few, leftover `y`-values are
//! grouped into disjoint zero-sums over `C_q` whose `x`-sums join the pool.

use log::debug;

use crate::error::ConstructionError;
use crate::group::{gcd, GroupElement, GroupSpec};
use crate::pairs::StructuredSequence;

use super::{cyclic, disjoint_zero_sum_positions, expand_zero_sum, Compound, Extraction, Route};

fn x_sum(h: &GroupSpec, s: &StructuredSequence, pos: &[usize]) -> GroupElement {
    pos.iter().fold(h.zero(), |acc, &i| h.add(&acc, &s.x()[i]).expect("valid"))
}

/// Returns a zero-sum of `s` when `r ≤ pq`. Positions refer to `s`.
pub fn prop14_extract(s: &StructuredSequence) -> Result<Extraction, ConstructionError> {
    let (p, q, d) = (s.p(), s.q(), s.d());
    if gcd(p, q) != 1 {
        return Err(ConstructionError::Precondition(format!("gcd({p}, {q}) ≠ 1")));
    }
    let r = s.r();
    if r > p * q {
        return Err(ConstructionError::Precondition(format!("r = {r} exceeds pq = {}", p * q)));
    }
    let h = s.h();
    let m = s.m();
    let davenport_h = (p * d - d + 1) as usize;
    let tail: Vec<Compound> = (r as usize..m)
        .map(|i| Compound { value: s.x()[i].clone(), positions: vec![i] })
        .collect();
    let runs: Vec<Compound> = (1..q as usize)
        .flat_map(|i| {
            let start = s.block_start(i);
            let t_i = (s.blocks()[i - 1] / q) as usize;
            (0..t_i).map(move |j| start + j * q as usize)
        })
        .map(|a| {
            let pos: Vec<usize> = (a..a + q as usize).collect();
            Compound { value: x_sum(&h, s, &pos), positions: pos }
        })
        .collect();

    let (pool, route) = if r <= (q - 1) * p {
        (tail, Route::TailOnly)
    } else if r + q <= p * q {
        let mut pool = runs;
        pool.extend(tail);
        (pool, Route::RunSums)
    } else {
        // r = pq − (q − 1) + j with j ∈ [0, q − 1]
        let j = r + q - 1 - p * q;
        let leftover: u64 = s.leftovers().iter().sum();
        let shifted = leftover as i64 - j as i64 - 1;
        if shifted % q as i64 != 0 {
            return Err(ConstructionError::Inconsistency(format!(
                "leftover total {leftover} is not j + 1 = {} modulo {q}",
                j + 1
            )));
        }
        let alpha = shifted / q as i64;
        let groups = if j == q - 1 { alpha + 1 } else { alpha }.max(0) as usize;
        debug!("leftover case: j = {j}, alpha = {alpha}, extracting {groups} groups");
        let mut s1_pos = Vec::new();
        for i in 1..q as usize {
            let start = s.block_start(i);
            let r_i = s.blocks()[i - 1] as usize;
            let t_i = r_i / q as usize;
            s1_pos.extend(start + t_i * q as usize..start + r_i);
        }
        let s1: Vec<GroupElement> =
            s1_pos.iter().map(|&i| GroupElement::from_residues(vec![s.y(i)])).collect();
        let fam = disjoint_zero_sum_positions(&cyclic(q), &s1, groups).ok_or_else(|| {
            ConstructionError::Inconsistency(format!("{} leftover values lack {groups} disjoint zero-sums", s1.len()))
        })?;
        let mut pool = runs;
        for member in fam {
            let pos: Vec<usize> = member.into_iter().map(|k| s1_pos[k]).collect();
            pool.push(Compound { value: x_sum(&h, s, &pos), positions: pos });
        }
        pool.extend(tail);
        (pool, if j == q - 1 { Route::LeftoverFull } else { Route::LeftoverPartial })
    };
    if pool.len() < davenport_h {
        return Err(ConstructionError::Inconsistency(format!(
            "auxiliary sequence has {} terms, fewer than D(C_{p}^{d}) = {davenport_h}",
            pool.len()
        )));
    }
    let positions = expand_zero_sum(&h, &pool).ok_or_else(|| {
        ConstructionError::Inconsistency(format!("{} terms over C_{p}^{d} without a zero-sum", pool.len()))
    })?;
    Extraction::certify(&s.to_pair_sequence(), positions, route)
}
