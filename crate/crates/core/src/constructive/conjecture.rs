//! Exhaustive check that every structured sequence with many nonzero
//! `y`-values and `Σ i·r_i ≡ 0 (mod q)` has a zero-sum subsequence.
//!
//! For each block signature `(r_1, …, r_{q−1})` the `x`-values are assigned
//! position by position, non-decreasing inside each `y`-block (the order
//! within a block does not matter). The set `Σ(S) ∪ {0}` is carried along;
//! a branch dies as soon as a new term closes a zero-sum, since every
//! completion then has one too. A branch reaching full length is a
//! counterexample.
//!
//! Work is split into units (signature, value of the first term) processed
//! in a fixed order, so a checkpoint taken between units resumes to exactly
//! the same counts as an uninterrupted run.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use log::info;
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::ConstructionError;
use crate::group::{gcd, is_prime, GroupElement, GroupSpec};
use crate::packed::{popcount, test_bit, PackedGroup};
use crate::pairs::{structured_length, StructuredSequence};

/// Largest `|C_p^d × C_q|` the checker accepts.
pub const CONJECTURE_GUARD: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConjectureStatus {
    Verified,
    Counterexample,
    BudgetExceeded,
}

/// Resumable progress.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub p: u64,
    pub q: u64,
    pub d: u64,
    /// Index of the signature holding the next unit.
    pub signature_index: usize,
    /// Index of the next unit inside that signature.
    pub unit_index: usize,
    /// Partial assignments examined so far.
    pub candidates_checked: u64,
}

impl Checkpoint {
    fn start(p: u64, q: u64, d: u64) -> Self {
        Checkpoint { p, q, d, signature_index: 0, unit_index: 0, candidates_checked: 0 }
    }

    pub fn load(path: &Path) -> Result<Self, ConstructionError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConstructionError::Precondition(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| ConstructionError::Precondition(format!("bad checkpoint {}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<(), ConstructionError> {
        let text = serde_json::to_string_pretty(self).expect("serializable");
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)
            .and_then(|_| fs::rename(&tmp, path))
            .map_err(|e| ConstructionError::Precondition(format!("cannot write {}: {e}", path.display())))
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConjectureOptions {
    /// Cap on the total count, resumed progress included.
    pub max_candidates: Option<u64>,
    pub max_time: Option<Duration>,
    /// Progress file, rewritten after every unit and on exit.
    pub checkpoint_path: Option<PathBuf>,
    pub resume: Option<Checkpoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjectureVerdict {
    pub status: ConjectureStatus,
    pub counterexample: Option<StructuredSequence>,
    /// Number of block-wise multiset assignments over all signatures, in decimal.
    pub search_space_size: String,
    pub candidates_checked: u64,
    pub checkpoint: Checkpoint,
}

/// Signatures `(r_1, …, r_{q−1})` with `r ∈ [pq + 1, m]` and
/// `Σ i·r_i ≡ 0 (mod q)`, in lexicographic order.
pub fn block_signatures(p: u64, q: u64, d: u64) -> Vec<Vec<u64>> {
    let m = structured_length(p, q, d);
    let k = (q - 1) as usize;
    let mut out = Vec::new();
    let mut cur = vec![0u64; k];
    fn rec(i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>, p: u64, q: u64) {
        if i == cur.len() {
            let r: u64 = cur.iter().sum();
            let w: u64 = cur.iter().enumerate().map(|(j, &x)| (j as u64 + 1) * x).sum();
            if r > p * q && w % q == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for v in 0..=left {
            cur[i] = v;
            rec(i + 1, left - v, cur, out, p, q);
        }
        cur[i] = 0;
    }
    if k > 0 {
        rec(0, m, &mut cur, &mut out, p, q);
    }
    out
}

fn multisets(n: u64, k: u64) -> BigUint {
    // C(n + k − 1, k)
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n + i) / BigUint::from(i + 1);
    }
    acc
}

/// Assignments counted with order inside each `y`-block ignored.
pub fn search_space_size(p: u64, q: u64, d: u64) -> BigUint {
    let n = p.pow(d as u32);
    let m = structured_length(p, q, d);
    block_signatures(p, q, d)
        .iter()
        .map(|sig| {
            let r: u64 = sig.iter().sum();
            sig.iter().fold(multisets(n, m - r), |acc, &b| acc * multisets(n, b))
        })
        .sum()
}

struct Walker<'a> {
    pg: &'a PackedGroup,
    q: usize,
    nx: usize,
    /// `y`-value of each position.
    ys: Vec<usize>,
    /// Whether position `i` starts a new block.
    block_start: Vec<bool>,
    nodes: u64,
    limit: Option<u64>,
    deadline: Option<Instant>,
    stopped: bool,
    found: Option<Vec<usize>>,
}

impl Walker<'_> {
    fn elem(&self, x: usize, y: usize) -> usize {
        x * self.q + y
    }

    fn dfs(&mut self, xs: &mut Vec<usize>, a: &[u64]) {
        self.nodes += 1;
        if self.limit.is_some_and(|l| self.nodes > l)
            || (self.nodes & 1023 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d))
        {
            self.stopped = true;
        }
        if self.stopped || self.found.is_some() {
            return;
        }
        let pos = xs.len();
        let m = self.ys.len();
        if pos == m {
            self.found = Some(xs.clone());
            return;
        }
        // every further term enlarges Σ(S) ∪ {0}
        if self.pg.order() - (popcount(a) as usize) < m - pos {
            return;
        }
        let lo = if self.block_start[pos] { 0 } else { xs[pos - 1] };
        let mut child = self.pg.empty_set();
        for x in lo..self.nx {
            let g = self.elem(x, self.ys[pos]);
            if test_bit(a, self.pg.neg(g)) {
                continue;
            }
            self.pg.translate_into(a, g, &mut child);
            for (c, v) in child.iter_mut().zip(a) {
                *c |= *v;
            }
            xs.push(x);
            self.dfs(xs, &child);
            xs.pop();
            if self.stopped || self.found.is_some() {
                return;
            }
        }
    }
}

/// Runs the exhaustive check, honouring the budget and checkpoint options.
pub fn conjecture1_check(p: u64, q: u64, d: u64, opts: &ConjectureOptions) -> Result<ConjectureVerdict, ConstructionError> {
    if !is_prime(p) {
        return Err(ConstructionError::Precondition(format!("{p} is not prime")));
    }
    if q == 0 || gcd(p, q) != 1 {
        return Err(ConstructionError::Precondition(format!("gcd({p}, {q}) ≠ 1")));
    }
    if d < 3 {
        return Err(ConstructionError::Precondition(format!("d = {d} is below 3")));
    }
    let h = GroupSpec::power(p, d as usize)?;
    let mut orders = h.orders().to_vec();
    orders.push(q);
    let g = GroupSpec::new(orders)?;
    if g.cardinality() > CONJECTURE_GUARD {
        return Err(ConstructionError::Precondition(format!(
            "group of order {} exceeds the checker guard {CONJECTURE_GUARD}",
            g.cardinality()
        )));
    }
    let pg = PackedGroup::new(&g).expect("guarded size");
    let hp = PackedGroup::new(&h).expect("guarded size");
    let nx = hp.order();
    let m = structured_length(p, q, d) as usize;
    let sigs = block_signatures(p, q, d);
    let mut cp = match &opts.resume {
        Some(c) if (c.p, c.q, c.d) == (p, q, d) => c.clone(),
        Some(c) => {
            return Err(ConstructionError::Precondition(format!(
                "checkpoint is for ({}, {}, {}), not ({p}, {q}, {d})",
                c.p, c.q, c.d
            )))
        }
        None => Checkpoint::start(p, q, d),
    };
    let space = search_space_size(p, q, d).to_string();
    let deadline = opts.max_time.map(|t| Instant::now() + t);
    let save = |cp: &Checkpoint| -> Result<(), ConstructionError> {
        match &opts.checkpoint_path {
            Some(path) => cp.save(path),
            None => Ok(()),
        }
    };
    while cp.signature_index < sigs.len() {
        let sig = &sigs[cp.signature_index];
        let mut ys = Vec::with_capacity(m);
        let mut block_start = Vec::with_capacity(m);
        for (i, &b) in sig.iter().enumerate() {
            for k in 0..b {
                ys.push(i + 1);
                block_start.push(k == 0);
            }
        }
        for k in 0..m - ys.len() {
            ys.push(0);
            block_start.push(k == 0);
        }
        while cp.unit_index < nx {
            let mut w = Walker {
                pg: &pg,
                q: q as usize,
                nx,
                ys: ys.clone(),
                block_start: block_start.clone(),
                nodes: 0,
                limit: opts.max_candidates.map(|l| l.saturating_sub(cp.candidates_checked)),
                deadline,
                stopped: false,
                found: None,
            };
            let first = w.elem(cp.unit_index, ys[0]);
            let mut a = pg.zero_set();
            if !test_bit(&a, pg.neg(first)) {
                pg.absorb(&mut a, first);
                let mut xs = vec![cp.unit_index];
                w.dfs(&mut xs, &a);
            }
            if w.stopped {
                save(&cp)?;
                return Ok(ConjectureVerdict {
                    status: ConjectureStatus::BudgetExceeded,
                    counterexample: None,
                    search_space_size: space,
                    candidates_checked: cp.candidates_checked,
                    checkpoint: cp,
                });
            }
            cp.candidates_checked += w.nodes;
            if let Some(xs) = w.found {
                let x: Vec<GroupElement> = xs.iter().map(|&i| hp.decode(i)).collect();
                let s = StructuredSequence::new(p, q, d, x, sig.clone())?;
                confirm_zero_sum_free(&s)?;
                save(&cp)?;
                return Ok(ConjectureVerdict {
                    status: ConjectureStatus::Counterexample,
                    counterexample: Some(s),
                    search_space_size: space,
                    candidates_checked: cp.candidates_checked,
                    checkpoint: cp,
                });
            }
            cp.unit_index += 1;
            save(&cp)?;
        }
        info!("signature {:?} done ({} candidates so far)", sig, cp.candidates_checked);
        cp.signature_index += 1;
        cp.unit_index = 0;
    }
    save(&cp)?;
    Ok(ConjectureVerdict {
        status: ConjectureStatus::Verified,
        counterexample: None,
        search_space_size: space,
        candidates_checked: cp.candidates_checked,
        checkpoint: cp,
    })
}

/// Independent subset scan; refuses to report a counterexample that has a
/// zero-sum.
fn confirm_zero_sum_free(s: &StructuredSequence) -> Result<(), ConstructionError> {
    let ps = s.to_pair_sequence();
    let m = ps.len();
    let zero_found = if m <= 22 {
        (1u64..(1 << m)).any(|mask| {
            let idx: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
            ps.sum_at(&idx).is_zero()
        })
    } else {
        crate::sequence::sumset(&ps.to_gsequence()).iter().any(|e| e.is_zero())
    };
    if zero_found {
        return Err(ConstructionError::Inconsistency("candidate counterexample has a zero-sum".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signatures_follow_the_congruence() {
        // p = 3, q = 2, d = 3: m = 10, r_1 ∈ [7, 10] even
        assert_eq!(block_signatures(3, 2, 3), vec![vec![8], vec![10]]);
        for sig in block_signatures(2, 3, 3) {
            let r: u64 = sig.iter().sum();
            assert!((7..=8).contains(&r));
            assert_eq!((sig[0] + 2 * sig[1]) % 3, 0);
        }
    }

    #[test]
    fn space_size_counts_multisets() {
        // r_1 = 8: C(34, 8)·C(28, 2); r_1 = 10: C(36, 10)
        let expect = BigUint::from(18_156_204u64) * BigUint::from(378u64) + BigUint::from(254_186_856u64);
        assert_eq!(search_space_size(3, 2, 3), expect);
    }

    #[test]
    fn preconditions() {
        let o = ConjectureOptions::default();
        assert!(conjecture1_check(2, 4, 3, &o).is_err());
        assert!(conjecture1_check(3, 2, 2, &o).is_err());
        assert!(conjecture1_check(4, 3, 3, &o).is_err());
    }

    #[test]
    fn small_case_verifies_and_resumes() {
        let full = conjecture1_check(2, 3, 3, &ConjectureOptions::default()).unwrap();
        assert_eq!(full.status, ConjectureStatus::Verified);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let mut opts = ConjectureOptions {
            max_candidates: Some(full.candidates_checked / 3),
            checkpoint_path: Some(path.clone()),
            ..Default::default()
        };
        let mut rounds = 0;
        let last = loop {
            rounds += 1;
            let v = conjecture1_check(2, 3, 3, &opts).unwrap();
            if v.status != ConjectureStatus::BudgetExceeded {
                break v;
            }
            let cp = Checkpoint::load(&path).unwrap();
            opts.max_candidates = Some(cp.candidates_checked + full.candidates_checked / 3);
            opts.resume = Some(cp);
            assert!(rounds < 100);
        };
        assert!(rounds > 1);
        assert_eq!(last.status, ConjectureStatus::Verified);
        assert_eq!(last.candidates_checked, full.candidates_checked);
        assert_eq!(last.checkpoint, full.checkpoint);
    }
}
