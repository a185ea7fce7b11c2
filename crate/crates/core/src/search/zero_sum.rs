//! Zero-sum witnesses: single (optionally short) zero-sum subsequences and
//! families of disjoint ones.

use std::collections::{BTreeMap, HashSet};

use crate::search::arith::{with_arith, Arith, INF};
use crate::group::{GroupElement, GroupSpec};
use crate::sequence::{DisjointFamily, GSequence, Witness};

/// Lexicographically least nonempty zero-sum subsequence, if any.
///
/// Suffix reachable-sum tables are built right to left; the witness is then
/// read off greedily, always taking the smallest term that still admits a
/// completion and stopping as soon as the running sum returns to zero.
pub fn find_zero_sum(s: &GSequence) -> Option<Witness> {
    lex_least_witness(s, INF - 1)
}

/// Like [`find_zero_sum`] but only accepts witnesses of length at most `exp(G)`.
pub fn find_short_zero_sum(s: &GSequence) -> Option<Witness> {
    let cap = crate::group::exponent(s.group()).min((INF - 1) as u64) as u16;
    lex_least_witness(s, cap)
}

/// Whether `0 ∈ Σ(S)`.
pub fn has_zero_sum(s: &GSequence) -> bool {
    find_zero_sum(s).is_some()
}

fn lex_least_witness(s: &GSequence, cap: u16) -> Option<Witness> {
    let picked = with_arith!(s.group(), |a| {
        let items: Vec<_> = s.to_vec().iter().map(|e| Arith::encode(a, e)).collect();
        lex_least_positions(a, &items, cap).map(|pos| {
            pos.into_iter().map(|i| Arith::decode(a, &items[i])).collect::<Vec<_>>()
        })
    })?;
    Some(Witness::from_elements(s, picked).expect("positions come from the sequence"))
}

/// Positions of the lexicographically least nonempty zero-sum subsequence of
/// a list of terms, compared as increasing index lists.
pub fn zero_sum_positions(group: &GroupSpec, items: &[GroupElement]) -> Option<Vec<usize>> {
    with_arith!(group, |a| {
        let enc: Vec<_> = items.iter().map(|e| Arith::encode(a, e)).collect();
        lex_least_positions(a, &enc, INF - 1)
    })
}

/// Positions (into the sorted `items`) of the lexicographically least
/// zero-sum subsequence of length at most `cap`.
pub(crate) fn lex_least_positions<A: Arith>(a: &A, items: &[A::E], cap: u16) -> Option<Vec<usize>> {
    let k = items.len();
    let mut suffix = Vec::with_capacity(k + 1);
    suffix.push(a.base_table());
    for i in (0..k).rev() {
        let next = a.step(suffix.last().expect("nonempty"), &items[i], cap);
        suffix.push(next);
    }
    suffix.reverse();
    // suffix[i] covers items[i..]
    let mut out = Vec::new();
    let mut sum = a.zero();
    let mut pos = 0;
    loop {
        let mut chosen = None;
        for i in pos..k {
            let t = a.add(&sum, &items[i]);
            let used = out.len() as u16 + 1;
            if used > cap {
                break;
            }
            if a.is_zero(&t) {
                chosen = Some((i, t, true));
                break;
            }
            let rest = a.get(&suffix[i + 1], &a.neg(&t));
            if rest != INF && used as u32 + rest as u32 <= cap as u32 {
                chosen = Some((i, t, false));
                break;
            }
        }
        let (i, t, done) = chosen?;
        out.push(i);
        if done {
            return Some(out);
        }
        sum = t;
        pos = i + 1;
    }
}

/// Shortest zero-sum subsequence of `items` (positions), if any.
pub(crate) fn shortest_zero_sum<A: Arith>(a: &A, items: &[A::E], cap: u16) -> Option<Vec<usize>> {
    let k = items.len();
    let mut tables = Vec::with_capacity(k + 1);
    tables.push(a.base_table());
    let mut best: Option<(u16, usize)> = None;
    for (i, g) in items.iter().enumerate() {
        let l = a.get(&tables[i], &a.neg(g));
        if l != INF && l < cap && best.map_or(true, |(b, _)| l + 1 < b) {
            best = Some((l + 1, i));
        }
        let next = a.step(&tables[i], g, cap);
        tables.push(next);
    }
    let (_, last) = best?;
    let mut out = vec![last];
    let mut target = a.neg(&items[last]);
    let mut j = last;
    loop {
        let l = a.get(&tables[j], &target);
        if l == 0 {
            break;
        }
        // walk back to the item that first achieved this length
        while a.get(&tables[j - 1], &target) == l {
            j -= 1;
        }
        out.push(j - 1);
        target = a.sub(&target, &items[j - 1]);
        j -= 1;
    }
    out.sort_unstable();
    Some(out)
}

/// `r` pairwise disjoint nonempty zero-sum subsequences, if they exist.
pub fn find_disjoint_zero_sums(s: &GSequence, r: u64) -> Option<DisjointFamily> {
    disjoint_family(s, r, INF - 1)
}

/// `r` pairwise disjoint short zero-sum subsequences, if they exist.
pub fn find_disjoint_short_zero_sums(s: &GSequence, r: u64) -> Option<DisjointFamily> {
    let cap = crate::group::exponent(s.group()).min((INF - 1) as u64) as u16;
    disjoint_family(s, r, cap)
}

fn disjoint_family(s: &GSequence, r: u64, cap: u16) -> Option<DisjointFamily> {
    let members = with_arith!(s.group(), |a| {
        let elems: Vec<_> = s.powers().map(|(e, _)| Arith::encode(a, e)).collect();
        let counts: Vec<u32> = s.powers().map(|(_, k)| k as u32).collect();
        DisjointSolver::new(a, &elems, cap).solve_top(counts, r as u32).map(|fam| {
            fam.into_iter()
                .map(|m| m.into_iter().map(|(i, c)| (Arith::decode(a, &elems[i]), c as u64)).collect::<BTreeMap<_, _>>())
                .collect::<Vec<_>>()
        })
    })?;
    let witnesses = members
        .into_iter()
        .map(|m| Witness::new(s, m).expect("members come from the sequence"))
        .collect();
    Some(DisjointFamily::new(s, witnesses).expect("members are disjoint by construction"))
}

/// A family member as `(distinct-element index, copies)`.
pub(crate) type Member = Vec<(usize, u32)>;

/// Exact decision for "at least `r` disjoint zero-sums of length ≤ `cap`".
///
/// Branches on the least remaining element `x`: either some member contains
/// `x` (and may be taken minimal, i.e. `x·W` with `W` zero-sum free), or no
/// member does and every copy of `x` can be dropped. Failed states are
/// memoized on the multiplicity vector.
pub(crate) struct DisjointSolver<'a, A: Arith> {
    a: &'a A,
    elems: &'a [A::E],
    cap: u16,
    failed: HashSet<(Vec<u32>, u32)>,
    zero: Option<usize>,
}

impl<'a, A: Arith> DisjointSolver<'a, A> {
    /// `elems` must be distinct and sorted in the global order.
    pub(crate) fn new(a: &'a A, elems: &'a [A::E], cap: u16) -> Self {
        let zero = elems.iter().position(|e| a.is_zero(e));
        DisjointSolver { a, elems, cap, failed: HashSet::new(), zero }
    }

    pub(crate) fn solve_top(&mut self, mut counts: Vec<u32>, r: u32) -> Option<Vec<Member>> {
        self.solve(&mut counts, r)
    }

    fn solve(&mut self, counts: &mut Vec<u32>, r: u32) -> Option<Vec<Member>> {
        if r == 0 {
            return Some(Vec::new());
        }
        if let Some(z) = self.zero {
            if counts[z] > 0 {
                // singleton zeros are always part of some optimal family
                let take = counts[z].min(r);
                counts[z] -= take;
                let res = self.solve(counts, r - take);
                counts[z] += take;
                return res.map(|mut f| {
                    f.extend((0..take).map(|_| vec![(z, 1)]));
                    f
                });
            }
        }
        let total: u32 = counts.iter().sum();
        if total < 2 * r {
            return None;
        }
        let key = (counts.clone(), r);
        if self.failed.contains(&key) {
            return None;
        }
        if let Some(f) = self.greedy(counts, r) {
            return Some(f);
        }
        let x = counts.iter().position(|&c| c > 0).expect("total > 0");
        counts[x] -= 1;
        let target = self.a.neg(&self.elems[x]);
        let mut options = self.zero_sum_free_with_sum(counts, &target);
        counts[x] += 1;
        options.sort_by_key(|w| w.iter().map(|&(_, c)| c).sum::<u32>());
        for mut w in options {
            match w.iter_mut().find(|(i, _)| *i == x) {
                Some(slot) => slot.1 += 1,
                None => w.insert(0, (x, 1)),
            }
            for &(i, c) in &w {
                counts[i] -= c;
            }
            let res = self.solve(counts, r - 1);
            for &(i, c) in &w {
                counts[i] += c;
            }
            if let Some(mut f) = res {
                f.push(w);
                return Some(f);
            }
        }
        let saved = std::mem::replace(&mut counts[x], 0);
        let res = self.solve(counts, r);
        counts[x] = saved;
        if res.is_none() {
            self.failed.insert(key);
        }
        res
    }

    /// Repeatedly removes a shortest zero-sum; succeeds if `r` are found.
    fn greedy(&self, counts: &[u32], r: u32) -> Option<Vec<Member>> {
        let mut items: Vec<usize> =
            counts.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat(i).take(c as usize)).collect();
        let mut fam = Vec::new();
        while (fam.len() as u32) < r {
            let vals: Vec<A::E> = items.iter().map(|&i| self.elems[i].clone()).collect();
            let pos = shortest_zero_sum(self.a, &vals, self.cap)?;
            let mut member: BTreeMap<usize, u32> = BTreeMap::new();
            for &p in &pos {
                *member.entry(items[p]).or_insert(0) += 1;
            }
            for &p in pos.iter().rev() {
                items.remove(p);
            }
            fam.push(member.into_iter().collect());
        }
        Some(fam)
    }

    /// All zero-sum-free sub-multisets `W` of `counts` with `σ(W) = target`
    /// and `|W| ≤ cap − 1`.
    fn zero_sum_free_with_sum(&self, counts: &[u32], target: &A::E) -> Vec<Member> {
        let live: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] > 0).collect();
        let limit = self.cap.saturating_sub(1);
        // reach[j]: lengths of sums over live[j..]
        let mut reach = vec![self.a.base_table()];
        for &i in live.iter().rev() {
            let mut t = reach.last().expect("nonempty").clone();
            for _ in 0..counts[i].min(limit as u32) {
                t = self.a.step(&t, &self.elems[i], limit);
            }
            reach.push(t);
        }
        reach.reverse();
        let mut out = Vec::new();
        let mut cur: Member = Vec::new();
        let free = self.a.base_table();
        self.enumerate_w(&live, counts, &reach, 0, &self.a.zero(), 0, target, &free, &mut cur, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_w(
        &self,
        live: &[usize],
        counts: &[u32],
        reach: &[A::Table],
        j: usize,
        sum: &A::E,
        len: u16,
        target: &A::E,
        sums: &A::Table,
        cur: &mut Member,
        out: &mut Vec<Member>,
    ) {
        let limit = self.cap.saturating_sub(1);
        let need = self.a.sub(target, sum);
        if len > 0 && self.a.is_zero(&need) {
            out.push(cur.clone());
        }
        if j == live.len() {
            return;
        }
        let rest = self.a.get(&reach[j], &need);
        if rest == INF || (rest as u32 + len as u32) > limit as u32 {
            return;
        }
        // skip live[j] entirely
        self.enumerate_w(live, counts, reach, j + 1, sum, len, target, sums, cur, out);
        let i = live[j];
        let g = &self.elems[i];
        let mut s = sum.clone();
        let mut t = sums.clone();
        for c in 1..=counts[i] {
            if len + c as u16 > limit {
                break;
            }
            // W·g stays zero-sum free iff −g is not already a sum (or empty)
            if self.a.get(&t, &self.a.neg(g)) != INF {
                break;
            }
            t = self.a.step(&t, g, INF - 1);
            s = self.a.add(&s, g);
            cur.push((i, c));
            self.enumerate_w(live, counts, reach, j + 1, &s, len + c as u16, target, &t, cur, out);
            cur.pop();
        }
    }
}
