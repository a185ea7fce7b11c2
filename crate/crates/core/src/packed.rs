//! Dense integer encoding of group elements and bit-indexed subsets.
//!
//! Element `(a_0, …, a_{d−1})` maps to the mixed-radix index with `a_0` most
//! significant, so index order coincides with the lexicographic element
//! order. A subset of `G` is a bitset over these indices; translating a
//! subset by a group element is a per-coordinate rotation inside blocks of
//! `stride_i · n_i` bits, done with two shifts and two masks per coordinate.

use crate::group::{GroupElement, GroupSpec};

/// Largest group the packed engine accepts (indices are `u16`).
pub const MAX_PACKED_ORDER: u64 = 1 << 16;
const ADD_TABLE_LIMIT: usize = 1024;

#[derive(Clone, Copy, Debug)]
struct ShiftOp {
    keep: u32,
    wrap: u32,
    up: u32,
    down: u32,
}

#[derive(Clone, Debug)]
pub struct PackedGroup {
    spec: GroupSpec,
    n: usize,
    words: usize,
    orders: Vec<usize>,
    strides: Vec<usize>,
    neg: Vec<u16>,
    ord: Vec<u32>,
    add_table: Option<Vec<u16>>,
    masks: Vec<u64>,
    ops: Vec<ShiftOp>,
    op_range: Vec<(u32, u32)>,
}

impl PackedGroup {
    pub fn new(spec: &GroupSpec) -> Option<Self> {
        let card = spec.cardinality();
        if card > MAX_PACKED_ORDER {
            return None;
        }
        let n = card as usize;
        let d = spec.len();
        let orders: Vec<usize> = spec.orders().iter().map(|&x| x as usize).collect();
        let mut strides = vec![1usize; d];
        for i in (0..d.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * orders[i + 1];
        }
        let words = n.div_ceil(64).max(1);
        let mut g = PackedGroup {
            spec: spec.clone(),
            n,
            words,
            orders,
            strides,
            neg: Vec::new(),
            ord: Vec::new(),
            add_table: None,
            masks: Vec::new(),
            ops: Vec::new(),
            op_range: Vec::new(),
        };
        g.neg = (0..n).map(|a| g.neg_slow(a) as u16).collect();
        g.ord = (0..n).map(|a| g.order_slow(a)).collect();
        if n <= ADD_TABLE_LIMIT {
            let mut t = vec![0u16; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = g.add_slow(a, b) as u16;
                }
            }
            g.add_table = Some(t);
        }
        g.build_masks();
        Some(g)
    }

    fn build_masks(&mut self) {
        // mask offsets keyed by (coordinate, shift value)
        let d = self.orders.len();
        let mut offsets: Vec<Vec<(u32, u32)>> = Vec::with_capacity(d);
        for i in 0..d {
            let block = self.strides[i] * self.orders[i];
            let mut per_value = vec![(0u32, 0u32); self.orders[i]];
            for (v, slot) in per_value.iter_mut().enumerate().skip(1) {
                let k = self.strides[i] * v;
                let keep_off = self.masks.len() as u32;
                let mut keep = vec![0u64; self.words];
                let mut wrap = vec![0u64; self.words];
                for idx in 0..self.n {
                    if idx % block >= k {
                        keep[idx / 64] |= 1 << (idx % 64);
                    } else {
                        wrap[idx / 64] |= 1 << (idx % 64);
                    }
                }
                self.masks.extend_from_slice(&keep);
                let wrap_off = self.masks.len() as u32;
                self.masks.extend_from_slice(&wrap);
                *slot = (keep_off, wrap_off);
            }
            offsets.push(per_value);
        }
        for a in 0..self.n {
            let start = self.ops.len() as u32;
            for i in 0..d {
                let v = (a / self.strides[i]) % self.orders[i];
                if v == 0 {
                    continue;
                }
                let (keep, wrap) = offsets[i][v];
                let k = self.strides[i] * v;
                let block = self.strides[i] * self.orders[i];
                self.ops.push(ShiftOp { keep, wrap, up: k as u32, down: (block - k) as u32 });
            }
            self.op_range.push((start, self.ops.len() as u32));
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.n
    }

    /// Number of 64-bit words in a subset bitset.
    pub fn words(&self) -> usize {
        self.words
    }

    pub fn exponent(&self) -> u32 {
        self.ord.iter().copied().max().unwrap_or(1)
    }

    pub fn encode(&self, e: &GroupElement) -> usize {
        e.residues()
            .iter()
            .zip(&self.strides)
            .map(|(&r, &s)| r as usize * s)
            .sum()
    }

    pub fn decode(&self, mut idx: usize) -> GroupElement {
        let mut res = vec![0u64; self.orders.len()];
        for i in (0..self.orders.len()).rev() {
            res[i] = (idx % self.orders[i]) as u64;
            idx /= self.orders[i];
        }
        GroupElement::from_residues(res)
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        match &self.add_table {
            Some(t) => t[a * self.n + b] as usize,
            None => self.add_slow(a, b),
        }
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg[b] as usize)
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    /// Order of the element with index `a`.
    #[inline]
    pub fn elem_order(&self, a: usize) -> u32 {
        self.ord[a]
    }

    pub fn scale(&self, a: usize, k: u64) -> usize {
        let mut acc = 0;
        let mut base = a;
        let mut k = k % self.ord[a] as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    fn add_slow(&self, a: usize, b: usize) -> usize {
        let mut out = 0;
        for i in 0..self.orders.len() {
            let x = (a / self.strides[i]) % self.orders[i];
            let y = (b / self.strides[i]) % self.orders[i];
            out += ((x + y) % self.orders[i]) * self.strides[i];
        }
        out
    }

    fn neg_slow(&self, a: usize) -> usize {
        let mut out = 0;
        for i in 0..self.orders.len() {
            let x = (a / self.strides[i]) % self.orders[i];
            out += ((self.orders[i] - x) % self.orders[i]) * self.strides[i];
        }
        out
    }

    fn order_slow(&self, a: usize) -> u32 {
        let mut o = 1u64;
        for i in 0..self.orders.len() {
            let x = ((a / self.strides[i]) % self.orders[i]) as u64;
            let n = self.orders[i] as u64;
            o = crate::group::lcm(o, n / crate::group::gcd(x, n));
        }
        o as u32
    }

    /// `out = src + g` (translation of a subset), on word slices of length
    /// [`words`](Self::words).
    #[inline]
    pub fn translate_into(&self, src: &[u64], g: usize, out: &mut [u64]) {
        let (s, e) = self.op_range[g];
        out.copy_from_slice(src);
        if s == e {
            return;
        }
        let w = self.words;
        let mut tmp_up = [0u64; 64];
        let mut tmp_dn = [0u64; 64];
        if w > 64 {
            self.translate_slow(src, g, out);
            return;
        }
        for op in &self.ops[s as usize..e as usize] {
            shl(out, op.up as usize, &mut tmp_up[..w]);
            shr(out, op.down as usize, &mut tmp_dn[..w]);
            let keep = &self.masks[op.keep as usize..op.keep as usize + w];
            let wrap = &self.masks[op.wrap as usize..op.wrap as usize + w];
            for j in 0..w {
                out[j] = (tmp_up[j] & keep[j]) | (tmp_dn[j] & wrap[j]);
            }
        }
    }

    fn translate_slow(&self, src: &[u64], g: usize, out: &mut [u64]) {
        out.iter_mut().for_each(|x| *x = 0);
        for a in iter_bits(src) {
            let b = self.add(a, g);
            out[b / 64] |= 1 << (b % 64);
        }
    }

    /// `A ← A ∪ (A + g)` for a set containing 0: the reachable-sum update.
    pub fn absorb(&self, a: &mut [u64], g: usize) {
        let mut t = vec![0u64; self.words];
        self.translate_into(a, g, &mut t);
        for (x, y) in a.iter_mut().zip(&t) {
            *x |= *y;
        }
    }

    pub fn empty_set(&self) -> Vec<u64> {
        vec![0u64; self.words]
    }

    /// Bitset containing only the identity.
    pub fn zero_set(&self) -> Vec<u64> {
        let mut v = self.empty_set();
        v[0] = 1;
        v
    }
}

#[inline]
fn shl(src: &[u64], k: usize, out: &mut [u64]) {
    let w = src.len();
    let (ws, bs) = (k / 64, k % 64);
    for j in (0..w).rev() {
        let mut v = 0;
        if j >= ws {
            v = src[j - ws] << bs;
            if bs > 0 && j > ws {
                v |= src[j - ws - 1] >> (64 - bs);
            }
        }
        out[j] = v;
    }
}

#[inline]
fn shr(src: &[u64], k: usize, out: &mut [u64]) {
    let w = src.len();
    let (ws, bs) = (k / 64, k % 64);
    for j in 0..w {
        let mut v = 0;
        if j + ws < w {
            v = src[j + ws] >> bs;
            if bs > 0 && j + ws + 1 < w {
                v |= src[j + ws + 1] << (64 - bs);
            }
        }
        out[j] = v;
    }
}

#[inline]
pub fn test_bit(set: &[u64], i: usize) -> bool {
    set[i / 64] >> (i % 64) & 1 == 1
}

#[inline]
pub fn set_bit(set: &mut [u64], i: usize) {
    set[i / 64] |= 1 << (i % 64);
}

#[inline]
pub fn popcount(set: &[u64]) -> u32 {
    set.iter().map(|w| w.count_ones()).sum()
}

pub fn iter_bits(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(j, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(j * 64 + t)
        })
    })
}
