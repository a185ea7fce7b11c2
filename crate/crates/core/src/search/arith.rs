//! Element arithmetic and minimum-length sum tables, over either the packed
//! index encoding or plain residue vectors for groups too large to pack.

use std::collections::HashMap;
use std::hash::Hash;

use crate::group::{GroupElement, GroupSpec};
use crate::packed::PackedGroup;

/// Marks "no subsequence with this sum" in a length table.
pub(crate) const INF: u16 = u16::MAX;

pub(crate) trait Arith {
    type E: Clone + Ord + Hash;
    type Table: Clone;

    fn encode(&self, g: &GroupElement) -> Self::E;
    fn decode(&self, e: &Self::E) -> GroupElement;
    fn zero(&self) -> Self::E;
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;

    /// Table holding only the empty sum (length 0 at the identity).
    fn base_table(&self) -> Self::Table;
    fn get(&self, t: &Self::Table, x: &Self::E) -> u16;
    /// `t'[x] = min(t[x], t[x − g] + 1)`, dropping lengths above `cap`.
    fn step(&self, t: &Self::Table, g: &Self::E, cap: u16) -> Self::Table;

    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E {
        self.add(a, &self.neg(b))
    }
}

impl Arith for PackedGroup {
    type E = usize;
    type Table = Vec<u16>;

    fn encode(&self, g: &GroupElement) -> usize {
        PackedGroup::encode(self, g)
    }
    fn decode(&self, e: &usize) -> GroupElement {
        PackedGroup::decode(self, *e)
    }
    fn zero(&self) -> usize {
        0
    }
    fn add(&self, a: &usize, b: &usize) -> usize {
        PackedGroup::add(self, *a, *b)
    }
    fn neg(&self, a: &usize) -> usize {
        PackedGroup::neg(self, *a)
    }
    fn is_zero(&self, a: &usize) -> bool {
        *a == 0
    }
    fn base_table(&self) -> Vec<u16> {
        let mut t = vec![INF; self.order()];
        t[0] = 0;
        t
    }
    fn get(&self, t: &Vec<u16>, x: &usize) -> u16 {
        t[*x]
    }
    fn step(&self, t: &Vec<u16>, g: &usize, cap: u16) -> Vec<u16> {
        let mut out = t.clone();
        for (x, &l) in t.iter().enumerate() {
            if l < cap {
                let y = PackedGroup::add(self, x, *g);
                if l + 1 < out[y] {
                    out[y] = l + 1;
                }
            }
        }
        out
    }
}

/// Residue-vector arithmetic with hash-map tables.
pub(crate) struct Sparse {
    group: GroupSpec,
}

impl Sparse {
    pub(crate) fn new(group: &GroupSpec) -> Self {
        Sparse { group: group.clone() }
    }
}

impl Arith for Sparse {
    type E = GroupElement;
    type Table = HashMap<GroupElement, u16>;

    fn encode(&self, g: &GroupElement) -> GroupElement {
        g.clone()
    }
    fn decode(&self, e: &GroupElement) -> GroupElement {
        e.clone()
    }
    fn zero(&self) -> GroupElement {
        self.group.zero()
    }
    fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.group.add(a, b).expect("validated elements")
    }
    fn neg(&self, a: &GroupElement) -> GroupElement {
        self.group.negate(a).expect("validated element")
    }
    fn is_zero(&self, a: &GroupElement) -> bool {
        a.is_zero()
    }
    fn base_table(&self) -> Self::Table {
        HashMap::from([(self.group.zero(), 0)])
    }
    fn get(&self, t: &Self::Table, x: &GroupElement) -> u16 {
        t.get(x).copied().unwrap_or(INF)
    }
    fn step(&self, t: &Self::Table, g: &GroupElement, cap: u16) -> Self::Table {
        let mut out = t.clone();
        for (x, &l) in t {
            if l < cap {
                let y = self.add(x, g);
                let slot = out.entry(y).or_insert(INF);
                if l + 1 < *slot {
                    *slot = l + 1;
                }
            }
        }
        out
    }
}

/// Runs `$body` with `$a` bound to the best available arithmetic for `$group`.
macro_rules! with_arith {
    ($group:expr, |$a:ident| $body:expr) => {
        match $crate::packed::PackedGroup::new($group) {
            Some(ref packed) => {
                let $a = packed;
                $body
            }
            None => {
                let sparse = $crate::search::arith::Sparse::new($group);
                let $a = &sparse;
                $body
            }
        }
    };
}
pub(crate) use with_arith;
