//! Branch-and-bound over non-decreasing element sequences.
//!
//! The search looks for the longest sequence lacking `r` disjoint
//! (short) zero-sum subsequences. Deficiency is closed under taking
//! subsequences, so every prefix of a deficient sequence is deficient and a
//! depth-first walk over sorted prefixes, cut by upper bounds on the final
//! length, visits every candidate.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

use crate::packed::{popcount, set_bit, test_bit, PackedGroup};
use crate::search::arith::INF;
use crate::search::symmetry::PairOrbits;
use crate::search::zero_sum::DisjointSolver;

const TICK_MASK: u64 = (1 << 12) - 1;

pub(crate) struct Limits {
    pub max_nodes: Option<u64>,
    /// Use automorphism orbits of element pairs to prune.
    pub symmetric: bool,
    pub deadline: Option<Instant>,
    pub parallel: bool,
}

pub(crate) struct Outcome {
    pub best: Vec<usize>,
    pub nodes: u64,
    pub complete: bool,
}

/// Elements still admissible under the pair-orbit constraint.
#[derive(Clone)]
struct Scope {
    allowed: Vec<u64>,
    /// Largest admissible pair rank; `u32::MAX` when unconstrained.
    top: u32,
}

/// A starting prefix; later terms are taken non-decreasing from `start`.
struct Root {
    prefix: Vec<usize>,
    start: usize,
    scope: Scope,
}

pub(crate) struct Engine<'a> {
    pg: &'a PackedGroup,
    n: usize,
    short: bool,
    r: u32,
    /// `prior[i − 1]` is the invariant for `i` disjoint zero-sums, `i < r`.
    prior: &'a [u64],
    exp: u16,
    ord: Vec<u32>,
    neg: Vec<usize>,
    /// `Σ_{h ≥ g} (ord(h) − 1)`.
    suf_slack: Vec<u64>,
    /// `max_{h ≥ g} ord(h)`.
    suf_maxord: Vec<u64>,
    limits: Limits,
    best_len: AtomicU64,
    best_seq: Mutex<Vec<usize>>,
    nodes: AtomicU64,
    stop: AtomicBool,
    sym: Option<PairOrbits>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(pg: &'a PackedGroup, short: bool, r: u32, prior: &'a [u64], limits: Limits) -> Self {
        let n = pg.order();
        let ord: Vec<u32> = (0..n).map(|g| pg.elem_order(g)).collect();
        let neg = (0..n).map(|g| pg.neg(g)).collect();
        let mut suf_slack = vec![0u64; n + 1];
        let mut suf_maxord = vec![0u64; n + 1];
        for g in (0..n).rev() {
            suf_slack[g] = suf_slack[g + 1] + (ord[g] as u64 - 1);
            suf_maxord[g] = suf_maxord[g + 1].max(ord[g] as u64);
        }
        let exp = pg.exponent().min(INF as u32 - 1) as u16;
        let symmetric = limits.symmetric;
        Engine {
            pg,
            n,
            short,
            r,
            prior,
            exp,
            ord,
            neg,
            suf_slack,
            suf_maxord,
            limits,
            best_len: AtomicU64::new(0),
            best_seq: Mutex::new(Vec::new()),
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
            sym: if symmetric { PairOrbits::new(pg) } else { None },
        }
    }

    /// Runs the search starting from a known deficient sequence.
    pub(crate) fn run(self, seed: Vec<usize>) -> Outcome {
        let mut seed = seed;
        seed.sort_unstable();
        self.best_len.store(seed.len() as u64, Ordering::SeqCst);
        *self.best_seq.lock().expect("lock") = seed;
        if self.best() == 0 {
            let singles: Vec<Root> =
                (0..self.n).map(|g| Root { prefix: vec![g], start: g, scope: self.open_scope() }).collect();
            self.run_roots(singles);
        }
        let roots = match &self.sym {
            Some(sym) => sym
                .reps()
                .iter()
                .enumerate()
                .map(|(top, &(x, y))| {
                    let top = top as u32;
                    let all = self.open_scope().allowed;
                    let allowed = sym.restrict(&sym.restrict(&all, x, top), y, top);
                    Root { prefix: vec![x, y], start: 0, scope: Scope { allowed, top } }
                })
                .rev()
                .collect(),
            None => (0..self.n).map(|g| Root { prefix: vec![g], start: g, scope: self.open_scope() }).collect(),
        };
        self.run_roots(roots);
        let complete = !self.stop.load(Ordering::SeqCst);
        let best = self.best_seq.into_inner().expect("lock");
        Outcome { best, nodes: self.nodes.into_inner(), complete }
    }

    fn run_roots(&self, roots: Vec<Root>) {
        let go = |root: &Root| {
            if !self.stopped() {
                self.start(root);
            }
        };
        if self.limits.parallel {
            roots.par_iter().for_each(go);
        } else {
            roots.iter().for_each(go);
        }
    }

    fn start(&self, root: &Root) {
        match (self.r, self.short) {
            (1, false) => {
                let mut a = self.pg.zero_set();
                for &g in &root.prefix {
                    if !self.try_push_free(&mut a, g) {
                        return;
                    }
                }
                let mut seq = root.prefix.clone();
                self.dfs_free(&mut seq, &a, root.start, &root.scope);
            }
            (1, true) => {
                let mut t = self.base_table(self.exp);
                for &g in &root.prefix {
                    if !self.short_live(&t, g) {
                        return;
                    }
                    t = self.short_table_push(&t, g);
                }
                let mut seq = root.prefix.clone();
                self.dfs_short_free(&mut seq, &t, root.start, &root.scope);
            }
            _ => {
                let mut st = MultiState::new(self, root);
                st.enter_root(self, root);
            }
        }
    }

    /// Scope without symmetry constraints.
    fn open_scope(&self) -> Scope {
        let mut allowed = self.pg.empty_set();
        for g in 0..self.n {
            set_bit(&mut allowed, g);
        }
        Scope { allowed, top: u32::MAX }
    }

    /// Scope after adding `g` to the sequence.
    fn narrow(&self, scope: &Scope, g: usize) -> Scope {
        match &self.sym {
            Some(sym) if scope.top != u32::MAX => Scope { allowed: sym.restrict(&scope.allowed, g, scope.top), top: scope.top },
            _ => scope.clone(),
        }
    }

    /// Whether a second copy of `g` stays within the scope.
    #[inline]
    fn may_repeat(&self, scope: &Scope, g: usize) -> bool {
        match &self.sym {
            Some(sym) if scope.top != u32::MAX => sym.rank(g, g) <= scope.top,
            _ => true,
        }
    }

    #[inline]
    fn stopped(&self) -> bool {
        self.stop.load(Ordering::Relaxed)
    }

    /// Counts a node; returns `true` when the search must unwind.
    #[inline]
    fn tick(&self) -> bool {
        let c = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(m) = self.limits.max_nodes {
            if c > m {
                self.stop.store(true, Ordering::Relaxed);
            }
        }
        if c & TICK_MASK == 0 {
            if let Some(d) = self.limits.deadline {
                if Instant::now() >= d {
                    self.stop.store(true, Ordering::Relaxed);
                }
            }
        }
        self.stopped()
    }

    #[inline]
    fn best(&self) -> u64 {
        self.best_len.load(Ordering::Relaxed)
    }

    fn offer(&self, seq: &[usize]) {
        let k = seq.len() as u64;
        if k <= self.best() {
            return;
        }
        let mut guard = self.best_seq.lock().expect("lock");
        if k > guard.len() as u64 {
            *guard = seq.to_vec();
            self.best_len.fetch_max(k, Ordering::SeqCst);
        }
    }

    // ---- r = 1, all zero-sums: state is Σ(S) ∪ {0} as a bitset ----

    fn try_push_free(&self, a: &mut [u64], g: usize) -> bool {
        if test_bit(a, self.neg[g]) {
            return false;
        }
        self.pg.absorb(a, g);
        true
    }

    fn dfs_free(&self, seq: &mut Vec<usize>, a: &[u64], last: usize, scope: &Scope) {
        if self.tick() {
            return;
        }
        self.offer(seq);
        let k = seq.len() as u64;
        let need = self.best() + 1 - k;
        // each new term enlarges Σ ∪ {0} by at least one element
        if (self.n as u64) - popcount(a) as u64 <= need - 1 {
            return;
        }
        let mut live = Vec::new();
        let mut room = 0u64;
        for g in last..self.n {
            if !test_bit(&scope.allowed, g) || test_bit(a, self.neg[g]) {
                continue;
            }
            live.push(g);
            if room < need {
                room += if self.may_repeat(scope, g) { self.free_capacity(a, g) } else { 1 };
            }
        }
        if room < need {
            return;
        }
        let mut child = self.pg.empty_set();
        for g in live {
            self.pg.translate_into(a, g, &mut child);
            for (c, x) in child.iter_mut().zip(a) {
                *c |= *x;
            }
            seq.push(g);
            self.dfs_free(seq, &child, g, &self.narrow(scope, g));
            seq.pop();
            if self.stopped() {
                return;
            }
        }
    }

    /// How many more copies of `g` keep the sequence zero-sum free.
    fn free_capacity(&self, a: &[u64], g: usize) -> u64 {
        let mut m = g;
        let mut c = 0;
        while !test_bit(a, self.neg[m]) {
            c += 1;
            m = self.pg.add(m, g);
        }
        c
    }

    // ---- r = 1, short zero-sums: state is a minimum-length table ----

    fn base_table(&self, _cap: u16) -> Vec<u16> {
        let mut t = vec![INF; self.n];
        t[0] = 0;
        t
    }

    /// Table update, keeping only lengths below `exp`.
    fn short_table_push(&self, t: &[u16], g: usize) -> Vec<u16> {
        let mut out = t.to_vec();
        let lim = self.exp.saturating_sub(1);
        for (x, &l) in t.iter().enumerate() {
            if l < lim {
                let y = self.pg.add(x, g);
                if l + 1 < out[y] {
                    out[y] = l + 1;
                }
            }
        }
        out
    }

    #[inline]
    fn short_live(&self, t: &[u16], g: usize) -> bool {
        g != 0 && (t[self.neg[g]] == INF || t[self.neg[g]] + 1 > self.exp)
    }

    fn short_capacity(&self, t: &[u16], g: usize) -> u64 {
        let mut m = g;
        let mut i: u32 = 1;
        loop {
            let l = t[self.neg[m]];
            if l != INF && l as u32 + i <= self.exp as u32 {
                return i as u64 - 1;
            }
            i += 1;
            m = self.pg.add(m, g);
        }
    }

    fn dfs_short_free(&self, seq: &mut Vec<usize>, t: &[u16], last: usize, scope: &Scope) {
        if self.tick() {
            return;
        }
        self.offer(seq);
        let k = seq.len() as u64;
        let need = self.best() + 1 - k;
        let mut live = Vec::new();
        let mut room = 0u64;
        for g in last..self.n {
            if !test_bit(&scope.allowed, g) || !self.short_live(t, g) {
                continue;
            }
            live.push(g);
            if room < need {
                room += if self.may_repeat(scope, g) { self.short_capacity(t, g) } else { 1 };
            }
        }
        if room < need {
            return;
        }
        for g in live {
            let child = self.short_table_push(t, g);
            seq.push(g);
            self.dfs_short_free(seq, &child, g, &self.narrow(scope, g));
            seq.pop();
            if self.stopped() {
                return;
            }
        }
    }

    // ---- r ≥ 2 ----

    fn cap(&self) -> u16 {
        if self.short {
            self.exp
        } else {
            INF - 1
        }
    }

    /// Length table update with lengths capped at `cap`.
    fn table_push(&self, t: &[u16], g: usize, cap: u16) -> Vec<u16> {
        let mut out = t.to_vec();
        for (x, &l) in t.iter().enumerate() {
            if l < cap {
                let y = self.pg.add(x, g);
                if l + 1 < out[y] {
                    out[y] = l + 1;
                }
            }
        }
        out
    }

    /// `ν(S) ≥ r`, decided exactly.
    fn has_family(&self, seq: &[usize]) -> bool {
        let mut sorted = seq.to_vec();
        sorted.sort_unstable();
        let mut elems: Vec<usize> = Vec::new();
        let mut counts: Vec<u32> = Vec::new();
        for &g in &sorted {
            if elems.last() == Some(&g) {
                *counts.last_mut().expect("nonempty") += 1;
            } else {
                elems.push(g);
                counts.push(1);
            }
        }
        DisjointSolver::new(self.pg, &elems, self.cap()).solve_top(counts, self.r).is_some()
    }

    /// Shortest sub-multiset of `items` summing to `target`, as positions.
    fn shortest_with_sum(&self, items: &[usize], target: usize) -> Vec<usize> {
        let cap = self.cap();
        let mut tables = vec![self.base_table(cap)];
        for (i, &g) in items.iter().enumerate() {
            let next = self.table_push(&tables[i], g, cap);
            tables.push(next);
        }
        let mut out = Vec::new();
        let mut j = items.len();
        let mut x = target;
        loop {
            let l = tables[j][x];
            debug_assert!(l != INF);
            if l == 0 {
                break;
            }
            while tables[j - 1][x] == l {
                j -= 1;
            }
            out.push(j - 1);
            x = self.pg.sub(x, items[j - 1]);
            j -= 1;
        }
        out
    }
}

/// Per-branch state for `r ≥ 2`.
///
/// Besides the sequence it tracks the minimum-length table of all sums (to
/// find the shortest zero-sum created by a new term) and a greedy family of
/// disjoint zero-sums with the table of the leftover terms.
struct MultiState {
    seq: Vec<usize>,
    /// Prefix terms placed before the sorted tail.
    roots: Vec<usize>,
    counts: Vec<u32>,
    /// `Σ_g ⌊v_g / ord(g)⌋`.
    full_periods: u32,
    full: Vec<u16>,
    /// Shortest zero-sum length in the prefix.
    min_zero: u16,
    rem: Vec<usize>,
    rem_table: Vec<u16>,
    fam: u32,
    fam_len: u64,
}

impl MultiState {
    fn new(e: &Engine, root: &Root) -> Self {
        MultiState {
            seq: Vec::new(),
            roots: root.prefix.clone(),
            counts: vec![0; e.n],
            full_periods: 0,
            full: e.base_table(e.cap()),
            min_zero: INF,
            rem: Vec::new(),
            rem_table: e.base_table(e.cap()),
            fam: 0,
            fam_len: 0,
        }
    }

    /// Threshold below which a zero-sum rules out beating the incumbent:
    /// removing a zero-sum `Z` leaves at most `X_{r−1} − 1` terms.
    fn min_allowed(e: &Engine, target: u64) -> u64 {
        let prev = e.prior[e.r as usize - 2];
        (target + 1).saturating_sub(prev)
    }

    /// Upper bound from the greedy family: the leftover plus any extension
    /// must avoid `r − fam` disjoint zero-sums.
    fn family_bound(e: &Engine, fam: u32, fam_len: u64) -> u64 {
        if fam == 0 {
            u64::MAX
        } else {
            fam_len + e.prior[(e.r - fam) as usize - 1] - 1
        }
    }

    /// Upper bound on the final length when every further term is `≥ g`:
    /// terms below `g` stay, each element `h ≥ g` contributes at most
    /// `ord(h) − 1` copies plus one period per missing zero-sum.
    fn multiplicity_bound(&self, e: &Engine, g: usize, last: usize) -> u64 {
        let mut k_lt = self.seq.len() as u64;
        let mut periods_lt = self.full_periods;
        let mut seen: [usize; 3] = [usize::MAX; 3];
        for (slot, h) in std::iter::once(last).chain(self.roots.iter().copied()).enumerate() {
            if h < g || self.counts[h] == 0 || seen[..slot].contains(&h) {
                continue;
            }
            seen[slot] = h;
            k_lt -= self.counts[h] as u64;
            periods_lt -= self.counts[h] / e.ord[h];
        }
        if periods_lt >= e.r {
            return 0;
        }
        k_lt + e.suf_slack[g] + (e.r - 1 - periods_lt) as u64 * e.suf_maxord[g]
    }

    fn enter_root(&mut self, e: &Engine, root: &Root) {
        for &g in &root.prefix {
            if self.push(e, g).is_none() {
                return;
            }
        }
        self.node(e, root.start, &root.scope);
    }

    /// Appends `g` unless a zero-sum or family bound rules the branch out.
    fn push(&mut self, e: &Engine, g: usize) -> Option<Undo> {
        let target = e.best() + 1;
        let cap = e.cap();
        // shortest zero-sum through the new term
        let through = self.full[e.neg[g]];
        let new_zero = if through == INF || through >= cap { INF } else { through + 1 };
        let min_zero = self.min_zero.min(new_zero);
        if (min_zero as u64) < MultiState::min_allowed(e, target) {
            return None;
        }
        let periods = self.full_periods + u32::from((self.counts[g] + 1) % e.ord[g] == 0);
        if periods >= e.r {
            return None;
        }
        // greedy family update
        let (fam, fam_len, new_rem, new_table);
        let closing = self.rem_table[e.neg[g]];
        if closing != INF && closing < cap {
            let mut pool = self.rem.clone();
            pool.push(g);
            let used = e.shortest_with_sum(&self.rem, e.neg[g]);
            let mut keep = vec![true; pool.len()];
            keep[pool.len() - 1] = false;
            for &p in &used {
                keep[p] = false;
            }
            let rest: Vec<usize> = pool.iter().zip(&keep).filter(|(_, k)| **k).map(|(x, _)| *x).collect();
            fam = self.fam + 1;
            fam_len = self.fam_len + used.len() as u64 + 1;
            let mut t = e.base_table(cap);
            for &x in &rest {
                t = e.table_push(&t, x, cap);
            }
            new_rem = rest;
            new_table = t;
        } else {
            fam = self.fam;
            fam_len = self.fam_len;
            new_table = e.table_push(&self.rem_table, g, cap);
            let mut rest = self.rem.clone();
            rest.push(g);
            new_rem = rest;
        }
        if fam >= e.r || MultiState::family_bound(e, fam, fam_len) < target {
            return None;
        }
        let full = e.table_push(&self.full, g, cap);
        let undo = Undo {
            full: std::mem::replace(&mut self.full, full),
            rem: std::mem::replace(&mut self.rem, new_rem),
            rem_table: std::mem::replace(&mut self.rem_table, new_table),
            scalars: (self.full_periods, self.min_zero, self.fam, self.fam_len),
        };
        self.full_periods = periods;
        self.min_zero = min_zero;
        self.fam = fam;
        self.fam_len = fam_len;
        self.counts[g] += 1;
        self.seq.push(g);
        Some(undo)
    }

    fn pop(&mut self, undo: Undo) {
        let g = self.seq.pop().expect("nonempty");
        self.counts[g] -= 1;
        (self.full_periods, self.min_zero, self.fam, self.fam_len) = undo.scalars;
        self.full = undo.full;
        self.rem = undo.rem;
        self.rem_table = undo.rem_table;
    }

    fn node(&mut self, e: &Engine, last: usize, scope: &Scope) {
        if e.tick() {
            return;
        }
        let k = self.seq.len() as u64;
        if k > e.best() {
            if e.has_family(&self.seq) {
                return;
            }
            e.offer(&self.seq);
        }
        let target = e.best() + 1;
        if (self.min_zero as u64) < MultiState::min_allowed(e, target)
            || MultiState::family_bound(e, self.fam, self.fam_len) < target
        {
            return;
        }
        // past every prefix element the bound only shrinks with `g`
        let monotone_from = self.roots.iter().copied().chain(std::iter::once(last)).max().unwrap_or(0);
        for g in last..e.n {
            if self.multiplicity_bound(e, g, last) < e.best() + 1 {
                if g > monotone_from {
                    break;
                }
                continue;
            }
            if !test_bit(&scope.allowed, g) {
                continue;
            }
            if let Some(undo) = self.push(e, g) {
                self.node(e, g, &e.narrow(scope, g));
                self.pop(undo);
            }
            if e.stopped() {
                return;
            }
        }
    }
}

struct Undo {
    full: Vec<u16>,
    rem: Vec<usize>,
    rem_table: Vec<u16>,
    scalars: (u32, u16, u32, u64),
}
