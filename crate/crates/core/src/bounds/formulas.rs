//! Closed-form values and bounds for `D_r` of structured groups.
//!
//! All arithmetic is on arbitrary-precision integers. A formula whose
//! hypotheses fail yields [`Applicability::FailsPrecondition`]; malformed
//! parameters (non-prime `p`, unsorted exponents, `r = 0`) are errors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, GroupError};
use crate::group::{canonicalize, factorize, is_prime, GroupSpec, PGroupSpec};

use super::Source;

/// Outcome of a formula whose hypotheses may not hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Applicability<T> {
    Applies(T),
    FailsPrecondition(String),
}

impl<T> Applicability<T> {
    pub fn applies(&self) -> bool {
        matches!(self, Applicability::Applies(_))
    }

    pub fn value(&self) -> Option<&T> {
        match self {
            Applicability::Applies(v) => Some(v),
            Applicability::FailsPrecondition(_) => None,
        }
    }

    pub fn into_value(self) -> Option<T> {
        match self {
            Applicability::Applies(v) => Some(v),
            Applicability::FailsPrecondition(_) => None,
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Applicability::Applies(_) => None,
            Applicability::FailsPrecondition(s) => Some(s),
        }
    }
}

/// A value together with the source that justifies it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sourced {
    pub source: Source,
    pub value: BigInt,
}

/// Lower and upper bound from one source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sandwich {
    pub source: Source,
    pub lower: BigInt,
    pub upper: BigInt,
    pub note: Option<String>,
}

fn pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

fn check_r(r: u64) -> Result<(), BoundsError> {
    if r == 0 {
        return Err(BoundsError::InvalidParameters("r must be at least 1".into()));
    }
    Ok(())
}

fn check_exponents(p: u64, exps: &[u32]) -> Result<(), BoundsError> {
    if !is_prime(p) {
        return Err(GroupError::NotPrime(p).into());
    }
    if exps.is_empty() {
        return Err(BoundsError::InvalidParameters("at least one exponent is required".into()));
    }
    if exps.windows(2).any(|w| w[0] > w[1]) {
        return Err(GroupError::ExponentsNotSorted(exps.to_vec()).into());
    }
    Ok(())
}

/// `p^{e_d} ≥ 1 + Σ_{i<d} (p^{e_i} − 1)`.
pub fn top_dominates(p: u64, exps: &[u32]) -> bool {
    let (&last, rest) = exps.split_last().expect("nonempty");
    let rhs: BigInt = BigInt::one() + rest.iter().map(|&e| pow(p, e) - 1).sum::<BigInt>();
    pow(p, last) >= rhs
}

fn dominance_failure(p: u64, exps: &[u32]) -> String {
    format!("{p}^{} < 1 + Σ ({p}^e_i − 1) over exponents {:?}", exps[exps.len() - 1], exps)
}

/// `Σ_{i<d} p^{e_i} − d + 1`.
fn lower_tail(p: u64, exps: &[u32]) -> BigInt {
    let d = exps.len();
    exps[..d - 1].iter().map(|&e| pow(p, e)).sum::<BigInt>() - BigInt::from(d) + 1
}

/// `D_r` of the `p`-group `C_{p^{e_1}} × … × C_{p^{e_d}}` when its top
/// factor dominates: `r p^{e_d} + Σ_{i<d} p^{e_i} − d + 1`.
pub fn theorem3_value(spec: &PGroupSpec, r: u64) -> Result<Applicability<BigInt>, BoundsError> {
    check_r(r)?;
    let (p, exps) = (spec.p(), spec.exponents());
    check_exponents(p, exps)?;
    if !top_dominates(p, exps) {
        return Ok(Applicability::FailsPrecondition(dominance_failure(p, exps)));
    }
    Ok(Applicability::Applies(BigInt::from(r) * pow(p, exps[exps.len() - 1]) + lower_tail(p, exps)))
}

/// `D_r` of `C_{p^{e_1}} × … × C_{p^{e_{d−1}}} × C_{m p^{e_d}}`:
/// `r m p^{e_d} + Σ_{i<d} p^{e_i} − d + 1`. Cites `thm4` for odd `p` and
/// `obs1` otherwise.
pub fn theorem4_value(p: u64, exps: &[u32], m: u64, r: u64) -> Result<Applicability<Sourced>, BoundsError> {
    check_r(r)?;
    check_exponents(p, exps)?;
    if m == 0 {
        return Err(BoundsError::InvalidParameters("m must be at least 1".into()));
    }
    if !top_dominates(p, exps) {
        return Ok(Applicability::FailsPrecondition(dominance_failure(p, exps)));
    }
    let value = BigInt::from(r) * BigInt::from(m) * pow(p, exps[exps.len() - 1]) + lower_tail(p, exps);
    let source = if p == 2 { Source::Obs1 } else { Source::Thm4 };
    Ok(Applicability::Applies(Sourced { source, value }))
}

/// Bounds for `C_{p^{e_1}} × … × C_{p^{e_{d−2}}} × C_{m p^{e_{d−1}}} × C_{n p^{e_d}}`
/// with `m | n` (`cor5.1`) or `n | m` (`cor5.2`). When both hold the first
/// case is used.
pub fn corollary5_bounds(
    p: u64,
    exps: &[u32],
    m: u64,
    n: u64,
    r: u64,
) -> Result<Applicability<Sandwich>, BoundsError> {
    check_r(r)?;
    check_exponents(p, exps)?;
    if exps.len() < 2 {
        return Err(BoundsError::InvalidParameters("at least two exponents are required".into()));
    }
    if m == 0 || n == 0 {
        return Err(BoundsError::InvalidParameters("m and n must be at least 1".into()));
    }
    if n % m != 0 && m % n != 0 {
        return Err(BoundsError::InvalidParameters(format!("neither {m} | {n} nor {n} | {m}")));
    }
    if p == 2 {
        return Ok(Applicability::FailsPrecondition("p must be odd".into()));
    }
    if !top_dominates(p, exps) {
        return Ok(Applicability::FailsPrecondition(dominance_failure(p, exps)));
    }
    let d = exps.len();
    let (r, m, n) = (BigInt::from(r), BigInt::from(m), BigInt::from(n));
    let top = pow(p, exps[d - 1]);
    let next = pow(p, exps[d - 2]);
    let tail = lower_tail(p, exps);
    let first = &r * &n * &top + (&m - 1) * &next + &tail;
    if (&n % &m).is_zero() {
        let upper = &r * &n * &top + (&m - 1) * &top + &tail;
        return Ok(Applicability::Applies(Sandwich { source: Source::Cor5Case1, lower: first, upper, note: None }));
    }
    let second = &n * &top + (&r * &m - 1) * &next + &tail;
    let upper = (&r * &m + &n - 1) * &top + &tail;
    Ok(Applicability::Applies(Sandwich {
        source: Source::Cor5Case2,
        lower: first.max(second),
        upper,
        note: Some("upper bound written as (rm + n − 1)p^{e_d} + Σ p^{e_i} − d + 1".into()),
    }))
}

/// Exponent matrix of a group over several primes: `exps[j][i]` is the
/// exponent of `primes[j]` in the `i`-th cyclic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiPrimeSpec {
    primes: Vec<u64>,
    exps: Vec<Vec<u32>>,
}

impl MultiPrimeSpec {
    pub fn new(primes: Vec<u64>, exps: Vec<Vec<u32>>) -> Result<Self, BoundsError> {
        if primes.is_empty() || primes.len() != exps.len() {
            return Err(BoundsError::InvalidParameters("one exponent column per prime is required".into()));
        }
        if let Some(&p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(GroupError::NotPrime(p).into());
        }
        let mut sorted = primes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != primes.len() {
            return Err(BoundsError::InvalidParameters("primes must be distinct".into()));
        }
        let d = exps[0].len();
        if d == 0 || exps.iter().any(|col| col.len() != d) {
            return Err(BoundsError::InvalidParameters("exponent columns must share a nonzero length".into()));
        }
        for (p, col) in primes.iter().zip(&exps) {
            if col.windows(2).any(|w| w[0] > w[1]) {
                return Err(BoundsError::InvalidParameters(format!("exponents of {p} are not non-decreasing")));
            }
            if col.iter().all(|&e| e == 0) {
                return Err(BoundsError::InvalidParameters(format!("{p} does not divide the group order")));
            }
        }
        Ok(MultiPrimeSpec { primes, exps })
    }

    /// Reads the invariant-factor form of `g`, primes ascending.
    pub fn from_group(g: &GroupSpec) -> Result<Self, BoundsError> {
        let c = canonicalize(g);
        let primes: Vec<u64> = factorize(c.cardinality()).into_iter().map(|(p, _)| p).collect();
        let exps = primes
            .iter()
            .map(|&p| c.orders().iter().map(|&n| crate::group::split_prime_power(n, p).0).collect())
            .collect();
        MultiPrimeSpec::new(primes, exps)
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Column of exponents for the `j`-th prime.
    pub fn exponents(&self, j: usize) -> &[u32] {
        &self.exps[j]
    }

    pub fn d(&self) -> usize {
        self.exps[0].len()
    }

    fn order(&self, i: usize) -> BigInt {
        self.primes.iter().zip(&self.exps).map(|(&p, col)| pow(p, col[i])).product()
    }

    /// The written group with `i`-th order `Π_j p_j^{e_i^{(j)}}`.
    pub fn to_group(&self) -> Result<GroupSpec, BoundsError> {
        let orders = (0..self.d())
            .map(|i| u64::try_from(self.order(i)).map_err(|_| BoundsError::from(GroupError::TooLarge)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupSpec::new(orders)?)
    }
}

/// Bounds on `D_r` for a group whose every primary component has a
/// dominating top factor. The upper bound depends on the prime order.
pub fn theorem6_bounds(spec: &MultiPrimeSpec, r: u64) -> Result<Applicability<Sandwich>, BoundsError> {
    check_r(r)?;
    let failing: Vec<String> = spec
        .primes
        .iter()
        .zip(&spec.exps)
        .filter(|(&p, col)| !top_dominates(p, col))
        .map(|(&p, col)| dominance_failure(p, col))
        .collect();
    if !failing.is_empty() {
        return Ok(Applicability::FailsPrecondition(failing.join("; ")));
    }
    let d = spec.d();
    let r = BigInt::from(r);
    let top = spec.order(d - 1);
    let lower = &r * &top + (0..d - 1).map(|i| spec.order(i) - 1).sum::<BigInt>();
    let phi: Vec<BigInt> = spec.primes.iter().zip(&spec.exps).map(|(&p, col)| lower_tail(p, col)).collect();
    let l = spec.primes.len();
    let mut upper = &r * &top + &phi[l - 1];
    for m in 0..l - 1 {
        let weight: BigInt = (m + 1..l).map(|j| pow(spec.primes[j], spec.exps[j][d - 1])).product();
        upper += weight * &phi[m];
    }
    Ok(Applicability::Applies(Sandwich { source: Source::Thm6, lower, upper, note: None }))
}

/// `D(C_p^{d−1} × C_{pq}) = p(q + d − 1) − d + 1` for `p | q`, `d ≥ 3`,
/// under `p^2 ≥ 1 + (d − 1)(p − 1)`.
pub fn theorem7_value(p: u64, q: u64, d: u64) -> Result<Applicability<BigInt>, BoundsError> {
    if !is_prime(p) {
        return Err(GroupError::NotPrime(p).into());
    }
    if q == 0 {
        return Err(BoundsError::InvalidParameters("q must be at least 1".into()));
    }
    if q % p != 0 {
        return Ok(Applicability::FailsPrecondition(format!("{p} does not divide {q}")));
    }
    if d < 3 {
        return Ok(Applicability::FailsPrecondition(format!("d = {d} is below 3")));
    }
    let (bp, bq, bd) = (BigInt::from(p), BigInt::from(q), BigInt::from(d));
    if &bp * &bp < BigInt::one() + (&bd - 1) * (&bp - 1) {
        return Ok(Applicability::FailsPrecondition(format!("{p}^2 < 1 + {}·{}", d - 1, p - 1)));
    }
    Ok(Applicability::Applies(&bp * (bq + &bd - 1) - bd + 1))
}

/// `(upper − lower) / lower` of [`theorem6_bounds`].
pub fn error_ratio(spec: &MultiPrimeSpec, r: u64) -> Result<Applicability<BigRational>, BoundsError> {
    Ok(match theorem6_bounds(spec, r)? {
        Applicability::Applies(s) => {
            Applicability::Applies(BigRational::new(s.upper - &s.lower, s.lower))
        }
        Applicability::FailsPrecondition(why) => Applicability::FailsPrecondition(why),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn pg(p: u64, e: &[u32]) -> PGroupSpec {
        PGroupSpec::new(p, e.to_vec()).unwrap()
    }

    #[test]
    fn p_group_values() {
        assert_eq!(theorem3_value(&pg(2, &[1, 2]), 2).unwrap(), Applicability::Applies(big(9)));
        assert_eq!(theorem3_value(&pg(3, &[1, 2]), 1).unwrap(), Applicability::Applies(big(11)));
        assert!(!theorem3_value(&pg(2, &[2, 2, 2]), 1).unwrap().applies());
        assert!(theorem3_value(&pg(2, &[1]), 0).is_err());
    }

    #[test]
    fn mixed_top_factor_values() {
        let v = theorem4_value(3, &[1, 1], 2, 1).unwrap().into_value().unwrap();
        assert_eq!((v.source, v.value), (Source::Thm4, big(8)));
        let v = theorem4_value(3, &[1, 1], 2, 2).unwrap().into_value().unwrap();
        assert_eq!(v.value, big(14));
        let v = theorem4_value(2, &[1, 2], 3, 1).unwrap().into_value().unwrap();
        assert_eq!((v.source, v.value), (Source::Obs1, big(13)));
        assert!(theorem4_value(3, &[1], 0, 1).is_err());
        assert!(theorem4_value(4, &[1], 1, 1).is_err());
    }

    #[test]
    fn two_multiplier_bounds() {
        let s = corollary5_bounds(3, &[1, 1], 2, 2, 1).unwrap().into_value().unwrap();
        assert_eq!((s.source, s.lower.clone(), s.upper.clone()), (Source::Cor5Case1, big(11), big(11)));
        let s = corollary5_bounds(3, &[1, 1], 1, 2, 2).unwrap().into_value().unwrap();
        assert_eq!((s.lower.clone(), s.upper.clone()), (big(14), big(14)));
        // both lower expressions evaluate to 25 + 5 + 5 − 1
        let s = corollary5_bounds(5, &[1, 2], 2, 1, 1).unwrap().into_value().unwrap();
        assert_eq!((s.source, s.lower.clone(), s.upper.clone()), (Source::Cor5Case2, big(34), big(54)));
        assert!(corollary5_bounds(3, &[1, 1], 2, 3, 1).is_err());
        assert!(!corollary5_bounds(2, &[1, 2], 1, 2, 1).unwrap().applies());
    }

    #[test]
    fn multi_prime_bounds() {
        let spec = MultiPrimeSpec::new(vec![2, 3], vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(spec.to_group().unwrap().orders(), &[2, 6]);
        let s = theorem6_bounds(&spec, 1).unwrap().into_value().unwrap();
        assert_eq!((s.lower, s.upper), (big(7), big(9)));

        let spec = MultiPrimeSpec::new(vec![2, 3], vec![vec![1, 1, 2], vec![0, 0, 1]]).unwrap();
        assert_eq!(MultiPrimeSpec::from_group(&"2,2,12".parse().unwrap()).unwrap(), spec);
        let s = theorem6_bounds(&spec, 1).unwrap().into_value().unwrap();
        assert_eq!((s.lower, s.upper), (big(14), big(18)));
        let s = theorem6_bounds(&spec, 2).unwrap().into_value().unwrap();
        assert_eq!((s.lower, s.upper), (big(26), big(30)));

        assert!(MultiPrimeSpec::new(vec![2, 2], vec![vec![1], vec![1]]).is_err());
        assert!(MultiPrimeSpec::new(vec![2, 3], vec![vec![1, 1], vec![0, 0]]).is_err());
        assert!(MultiPrimeSpec::new(vec![2], vec![vec![2, 1]]).is_err());
    }

    #[test]
    fn error_ratios() {
        let spec = MultiPrimeSpec::new(vec![2, 3], vec![vec![1, 1, 2], vec![0, 0, 1]]).unwrap();
        let ratio = |r| error_ratio(&spec, r).unwrap().into_value().unwrap();
        assert_eq!(ratio(1), BigRational::new(big(2), big(7)));
        assert_eq!(ratio(2), BigRational::new(big(2), big(13)));
        let single = MultiPrimeSpec::new(vec![3], vec![vec![1, 2]]).unwrap();
        assert!(error_ratio(&single, 3).unwrap().into_value().unwrap().is_zero());
    }

    #[test]
    fn elementary_with_large_top() {
        assert_eq!(theorem7_value(3, 6, 3).unwrap(), Applicability::Applies(big(22)));
        assert_eq!(theorem7_value(2, 4, 4).unwrap(), Applicability::Applies(big(11)));
        assert!(!theorem7_value(2, 4, 5).unwrap().applies());
        assert!(!theorem7_value(3, 4, 3).unwrap().applies());
        assert!(!theorem7_value(3, 3, 2).unwrap().applies());
    }
}
