//! Orbits of unordered element pairs under a set of group automorphisms.
//!
//! Every sequence of length at least two contains a pair whose orbit has the
//! largest rank among all pairs of the sequence. Mapping that pair to its
//! orbit representative shows that it suffices to search sequences that
//! contain a representative pair and whose pairs all have rank at most the
//! representative's.

use crate::group::gcd;
use crate::packed::{set_bit, PackedGroup};

/// Largest group order for which pair orbits are tabulated.
pub(crate) const SYMMETRY_LIMIT: usize = 256;

pub(crate) struct PairOrbits {
    n: usize,
    /// Rank of the orbit of `{x, y}`, at `x·n + y`.
    rank: Vec<u32>,
    /// Representative pair for each rank.
    reps: Vec<(usize, usize)>,
}

impl PairOrbits {
    pub(crate) fn new(pg: &PackedGroup) -> Option<Self> {
        let n = pg.order();
        if !(2..=SYMMETRY_LIMIT).contains(&n) {
            return None;
        }
        let gens = generators(pg);
        let mut uf = UnionFind::new(n * n);
        for x in 0..n {
            for y in 0..n {
                uf.union(x * n + y, y * n + x);
                for p in &gens {
                    uf.union(x * n + y, p[x] * n + p[y]);
                }
            }
        }
        let mut size = vec![0u32; n * n];
        for i in 0..n * n {
            size[uf.find(i)] += 1;
        }
        // smaller orbits rank lower; ties by representative
        let mut roots: Vec<usize> = (0..n * n).filter(|&i| uf.find(i) == i).collect();
        roots.sort_by_key(|&i| (size[i], i));
        let mut rank_of_root = vec![u32::MAX; n * n];
        for (k, &root) in roots.iter().enumerate() {
            rank_of_root[root] = k as u32;
        }
        let mut reps = vec![(usize::MAX, usize::MAX); roots.len()];
        let mut rank = vec![0u32; n * n];
        for i in 0..n * n {
            let k = rank_of_root[uf.find(i)];
            rank[i] = k;
            let (x, y) = (i / n, i % n);
            if x <= y && reps[k as usize].0 == usize::MAX {
                reps[k as usize] = (x, y);
            }
        }
        Some(PairOrbits { n, rank, reps })
    }

    pub(crate) fn reps(&self) -> &[(usize, usize)] {
        &self.reps
    }

    #[inline]
    pub(crate) fn rank(&self, x: usize, y: usize) -> u32 {
        self.rank[x * self.n + y]
    }

    /// Elements `y` with `rank(x, y) ≤ top`, intersected with `allowed`.
    pub(crate) fn restrict(&self, allowed: &[u64], x: usize, top: u32) -> Vec<u64> {
        let row = &self.rank[x * self.n..(x + 1) * self.n];
        let mut out = vec![0u64; allowed.len()];
        for (y, &k) in row.iter().enumerate() {
            if k <= top {
                set_bit(&mut out, y);
            }
        }
        for (o, a) in out.iter_mut().zip(allowed) {
            *o &= *a;
        }
        out
    }
}

/// Element permutations induced by unit scalings of one coordinate,
/// elementary transvections and swaps of equal coordinates.
fn generators(pg: &PackedGroup) -> Vec<Vec<usize>> {
    let orders = pg.spec().orders().to_vec();
    let d = orders.len();
    let n = pg.order();
    let residues: Vec<Vec<u64>> = (0..n).map(|x| pg.decode(x).residues().to_vec()).collect();
    let encode = |v: &[u64]| -> usize {
        v.iter().zip(&orders).fold(0usize, |acc, (&r, &m)| acc * m as usize + r as usize)
    };
    let mut maps: Vec<Box<dyn Fn(&mut Vec<u64>)>> = Vec::new();
    for i in 0..d {
        let m = orders[i];
        for u in 2..m {
            if gcd(u, m) == 1 {
                maps.push(Box::new(move |v: &mut Vec<u64>| v[i] = v[i] * u % m));
            }
        }
        for j in 0..d {
            if i == j {
                continue;
            }
            let (ni, nj) = (orders[i], orders[j]);
            let c = nj / gcd(ni, nj);
            if c % nj != 0 {
                maps.push(Box::new(move |v: &mut Vec<u64>| v[j] = (v[j] + c * v[i]) % nj));
            }
            if i < j && ni == nj {
                maps.push(Box::new(move |v: &mut Vec<u64>| v.swap(i, j)));
            }
        }
    }
    maps.iter()
        .map(|f| {
            residues
                .iter()
                .map(|r| {
                    let mut v = r.clone();
                    f(&mut v);
                    encode(&v)
                })
                .collect()
        })
        .collect()
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = p;
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo as u32;
        }
    }
}
