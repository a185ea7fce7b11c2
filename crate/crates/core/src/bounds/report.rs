use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::BoundsError;
use crate::group::{canonicalize, d_star, exponent, factorize, gcd, is_prime, split_prime_power, GroupSpec, PGroupSpec};
use crate::search::Invariant;

use super::formulas::{
    corollary5_bounds, theorem3_value, theorem4_value, theorem6_bounds, theorem7_value, Applicability, MultiPrimeSpec,
};
use super::Source;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceStatus {
    Applies,
    FailsPrecondition,
}

/// One source's contribution to a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceEntry {
    pub tag: Source,
    pub applicability: SourceStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SourceEntry {
    fn applies(tag: Source, lower: Option<u64>, upper: Option<u64>) -> Self {
        SourceEntry { tag, applicability: SourceStatus::Applies, lower, upper, note: None }
    }

    fn fails(tag: Source, why: impl Into<String>) -> Self {
        SourceEntry {
            tag,
            applicability: SourceStatus::FailsPrecondition,
            lower: None,
            upper: None,
            note: Some(why.into()),
        }
    }

    fn with_note(mut self, note: Option<String>) -> Self {
        if note.is_some() {
            self.note = note;
        }
        self
    }
}

/// Everything known about one invariant of one group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    /// `D`, `D_r`, `eta` or `eta_r`.
    pub invariant: String,
    pub group: GroupSpec,
    pub canonical_group: GroupSpec,
    pub r: u64,
    pub lower: u64,
    pub upper: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<u64>,
    pub sources: Vec<SourceEntry>,
}

impl BoundReport {
    pub fn is_tight(&self) -> bool {
        self.lower == self.upper
    }

    pub fn source(&self, tag: Source) -> Option<&SourceEntry> {
        self.sources.iter().find(|s| s.tag == tag)
    }
}

fn to_u64(v: &BigInt) -> Result<u64, BoundsError> {
    u64::try_from(v).map_err(|_| BoundsError::InvalidParameters(format!("bound {v} does not fit in 64 bits")))
}

/// Number of elements of each order, indexed by the divisors of `exp(G)`.
fn order_census(g: &GroupSpec) -> Vec<(u64, BigInt)> {
    let e = exponent(g);
    let divisors: Vec<u64> = (1..=e).filter(|k| e % k == 0).collect();
    let mut out: Vec<(u64, BigInt)> = Vec::with_capacity(divisors.len());
    for &k in &divisors {
        let dividing: BigInt = g.orders().iter().map(|&n| BigInt::from(gcd(k, n))).product();
        let below: BigInt = out.iter().filter(|(j, _)| k % j == 0).map(|(_, c)| c.clone()).sum();
        out.push((k, dividing - below));
    }
    out
}

/// A bound valid for every group. For `D_r` it is `r |G|`; for `η_r` every
/// element of order `k` repeated `r k` times forces `r` short zero-sums.
pub fn pigeonhole_upper(g: &GroupSpec, inv: Invariant, r: u64) -> BigInt {
    match inv {
        Invariant::Davenport => BigInt::from(r) * BigInt::from(g.cardinality()),
        Invariant::Eta => {
            let r = BigInt::from(r);
            1 + order_census(g).into_iter().map(|(k, count)| count * (&r * k - 1)).sum::<BigInt>()
        }
    }
}

/// `(p, exponents, multiplier)` readings of `orders` as
/// `C_{p^{e_1}} × … × C_{p^{e_{d−1}}} × C_{m p^{e_d}}`.
fn top_multiplier_shapes(orders: &[u64]) -> Vec<(u64, Vec<u32>, u64)> {
    let Some((&last, rest)) = orders.split_last() else {
        return Vec::new();
    };
    let candidates: Vec<u64> = match rest.first() {
        Some(&first) => factorize(first).into_iter().map(|(p, _)| p).take(1).collect(),
        None => factorize(last).into_iter().map(|(p, _)| p).collect(),
    };
    candidates
        .into_iter()
        .filter_map(|p| {
            let mut exps = Vec::with_capacity(orders.len());
            for &n in rest {
                let (e, rem) = split_prime_power(n, p);
                if rem != 1 || e == 0 {
                    return None;
                }
                exps.push(e);
            }
            let (e, m) = split_prime_power(last, p);
            exps.push(e);
            exps.windows(2).all(|w| w[0] <= w[1]).then_some((p, exps, m))
        })
        .collect()
}

/// `(p, exponents, m, n)` readings of `orders` as
/// `C_{p^{e_1}} × … × C_{m p^{e_{d−1}}} × C_{n p^{e_d}}` with `m | n` or `n | m`.
fn two_multiplier_shapes(orders: &[u64]) -> Vec<(u64, Vec<u32>, u64, u64)> {
    let d = orders.len();
    if d < 2 {
        return Vec::new();
    }
    let (head, pair) = orders.split_at(d - 2);
    let candidates: Vec<u64> = match head.first() {
        Some(&first) => factorize(first).into_iter().map(|(p, _)| p).take(1).collect(),
        None => factorize(pair[0] * pair[1]).into_iter().map(|(p, _)| p).collect(),
    };
    candidates
        .into_iter()
        .filter(|&p| p != 2)
        .filter_map(|p| {
            let mut exps = Vec::with_capacity(d);
            for &n in head {
                let (e, rem) = split_prime_power(n, p);
                if rem != 1 || e == 0 {
                    return None;
                }
                exps.push(e);
            }
            let (e1, m) = split_prime_power(pair[0], p);
            let (e2, n) = split_prime_power(pair[1], p);
            exps.extend([e1, e2]);
            let sorted = exps.windows(2).all(|w| w[0] <= w[1]);
            (sorted && (n % m == 0 || m % n == 0)).then_some((p, exps, m, n))
        })
        .collect()
}

/// Written forms worth reading: the canonical one, and the input if it
/// differs and has no trivial factors.
fn forms(g: &GroupSpec, c: &GroupSpec) -> Vec<Vec<u64>> {
    let mut out = vec![c.orders().to_vec()];
    if g != c && g.orders().iter().all(|&n| n >= 2) {
        out.push(g.orders().to_vec());
    }
    out
}

struct Collected {
    lower: Option<BigInt>,
    upper: Option<BigInt>,
    note: Option<String>,
}

/// Keeps the strongest applicable reading among several.
fn best(acc: &mut Option<Collected>, lower: BigInt, upper: Option<BigInt>, note: Option<String>) {
    match acc {
        None => *acc = Some(Collected { lower: Some(lower), upper, note }),
        Some(c) => {
            if c.lower.as_ref().map_or(true, |l| lower > *l) {
                c.lower = Some(lower);
                c.note = note;
            }
            if let Some(u) = upper {
                if c.upper.as_ref().map_or(true, |x| u < *x) {
                    c.upper = Some(u);
                }
            }
        }
    }
}

fn finish(tag: Source, acc: Option<Collected>, why: &str) -> Result<SourceEntry, BoundsError> {
    Ok(match acc {
        Some(c) => SourceEntry::applies(
            tag,
            c.lower.as_ref().map(to_u64).transpose()?,
            c.upper.as_ref().map(to_u64).transpose()?,
        )
        .with_note(c.note),
        None => SourceEntry::fails(tag, why),
    })
}

fn closed_form_entries(g: &GroupSpec, c: &GroupSpec, r: u64) -> Result<Vec<SourceEntry>, BoundsError> {
    let mut entries = Vec::new();

    entries.push(match PGroupSpec::from_group(c) {
        Some(spec) => match theorem3_value(&spec, r)? {
            Applicability::Applies(v) => {
                let v = to_u64(&v)?;
                SourceEntry::applies(Source::Thm3, Some(v), Some(v))
            }
            Applicability::FailsPrecondition(why) => SourceEntry::fails(Source::Thm3, why),
        },
        None => SourceEntry::fails(Source::Thm3, "not a nontrivial p-group"),
    });

    let mut odd = None;
    let mut any = None;
    let mut why = String::from("not of the form C_{p^e_1} × … × C_{m p^e_d}");
    for form in forms(g, c) {
        for (p, exps, m) in top_multiplier_shapes(&form) {
            let value = match theorem4_value(p, &exps, m, r)? {
                Applicability::Applies(v) => v.value,
                Applicability::FailsPrecondition(w) => {
                    why = w;
                    continue;
                }
            };
            let note = Some(format!("p = {p}, exponents {exps:?}, m = {m}"));
            best(&mut any, value.clone(), Some(value.clone()), note.clone());
            if p != 2 {
                best(&mut odd, value.clone(), Some(value), note);
            }
        }
    }
    let thm4_why = if any.is_some() { "p = 2 is not odd".to_string() } else { why.clone() };
    entries.push(finish(Source::Thm4, odd, &thm4_why)?);
    entries.push(finish(Source::Obs1, any, &why)?);

    let mut case1 = None;
    let mut case2 = None;
    let mut why = String::from("not of the form C_{p^e_1} × … × C_{m p^e_{d−1}} × C_{n p^e_d} with p odd");
    for form in forms(g, c) {
        for (p, exps, m, n) in two_multiplier_shapes(&form) {
            match corollary5_bounds(p, &exps, m, n, r)? {
                Applicability::Applies(s) => {
                    let note = Some(format!("p = {p}, exponents {exps:?}, m = {m}, n = {n}"));
                    let slot = if s.source == Source::Cor5Case1 { &mut case1 } else { &mut case2 };
                    best(slot, s.lower, Some(s.upper), note);
                }
                Applicability::FailsPrecondition(w) => why = w,
            }
        }
    }
    entries.push(finish(Source::Cor5Case1, case1, &why)?);
    entries.push(finish(Source::Cor5Case2, case2, &why)?);

    entries.push(match MultiPrimeSpec::from_group(c) {
        Ok(spec) => match theorem6_bounds(&spec, r)? {
            Applicability::Applies(s) => {
                let primes = spec.primes().iter().map(u64::to_string).collect::<Vec<_>>().join(", ");
                SourceEntry::applies(Source::Thm6, Some(to_u64(&s.lower)?), Some(to_u64(&s.upper)?))
                    .with_note(Some(format!("primes in order {primes}")))
            }
            Applicability::FailsPrecondition(why) => SourceEntry::fails(Source::Thm6, why),
        },
        Err(_) => SourceEntry::fails(Source::Thm6, "trivial group"),
    });

    entries.push(elementary_top_entry(c, r)?);
    Ok(entries)
}

/// `C_p^{d−1} × C_{pq}` with `p | q`, `d ≥ 3`.
fn elementary_top_entry(c: &GroupSpec, r: u64) -> Result<SourceEntry, BoundsError> {
    let shape = "not of the form C_p^{d−1} × C_{pq} with p | q, d ≥ 3";
    if r != 1 {
        return Ok(SourceEntry::fails(Source::Thm7, "stated for r = 1 only"));
    }
    let o = c.orders();
    if o.len() < 3 || !is_prime(o[0]) || o[..o.len() - 1].iter().any(|&n| n != o[0]) {
        return Ok(SourceEntry::fails(Source::Thm7, shape));
    }
    let p = o[0];
    let last = o[o.len() - 1];
    if last % (p * p) != 0 {
        return Ok(SourceEntry::fails(Source::Thm7, shape));
    }
    Ok(match theorem7_value(p, last / p, o.len() as u64)? {
        Applicability::Applies(v) => {
            let v = to_u64(&v)?;
            SourceEntry::applies(Source::Thm7, Some(v), Some(v))
        }
        Applicability::FailsPrecondition(why) => SourceEntry::fails(Source::Thm7, why),
    })
}

/// Aggregates every source that bears on `inv` with `r` disjoint zero-sums.
/// `exact` is an exhaustively computed value, if known. Closed forms bound
/// `D_r`; for `η_r` they contribute lower bounds only.
pub fn bound_report(g: &GroupSpec, inv: Invariant, r: u64, exact: Option<u64>) -> Result<BoundReport, BoundsError> {
    if r == 0 {
        return Err(BoundsError::InvalidParameters("r must be at least 1".into()));
    }
    let c = canonicalize(g);
    let mut sources = Vec::new();
    let dstar = BigInt::from(d_star(&c)) + BigInt::from(r - 1) * BigInt::from(exponent(&c));
    sources.push(SourceEntry::applies(Source::DStar, Some(to_u64(&dstar)?), None));
    sources.push(SourceEntry::applies(Source::Pigeonhole, None, Some(to_u64(&pigeonhole_upper(&c, inv, r))?)));
    let mut closed = closed_form_entries(g, &c, r)?;
    if inv == Invariant::Eta {
        for e in closed.iter_mut().filter(|e| e.applicability == SourceStatus::Applies) {
            e.upper = None;
            e.note = Some("lower bound for D_r, hence for eta_r".into());
        }
    }
    sources.extend(closed);
    if let Some(v) = exact {
        sources.push(SourceEntry::applies(Source::Exact, Some(v), Some(v)));
    }
    let lower = sources.iter().filter_map(|s| s.lower).max().expect("dstar present");
    let upper = sources.iter().filter_map(|s| s.upper).min().expect("pigeonhole present");
    if lower > upper {
        let detail: Vec<String> =
            sources.iter().map(|s| format!("{}: {:?}..{:?}", s.tag, s.lower, s.upper)).collect();
        return Err(BoundsError::Contradiction(format!("lower {lower} > upper {upper} ({})", detail.join(", "))));
    }
    Ok(BoundReport {
        invariant: inv.label(r).to_string(),
        group: g.clone(),
        canonical_group: c,
        r,
        lower,
        upper,
        exact,
        sources,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(g: &str, inv: Invariant, r: u64, exact: Option<u64>) -> BoundReport {
        bound_report(&g.parse().unwrap(), inv, r, exact).unwrap()
    }

    fn status(rep: &BoundReport, tag: Source) -> SourceStatus {
        rep.source(tag).unwrap().applicability
    }

    #[test]
    fn order_census_counts_every_element() {
        let g: GroupSpec = "2,4".parse().unwrap();
        let census = order_census(&g);
        assert_eq!(census, vec![(1, 1.into()), (2, 3.into()), (4, 4.into())]);
        // brute force over elements
        let total: u64 = g.elements().map(|e| g.element_order(&e).unwrap()).sum();
        let formula: BigInt = census.iter().map(|(k, c)| c * k).sum();
        assert_eq!(formula, BigInt::from(total));
    }

    #[test]
    fn p_group_reports_are_tight() {
        let rep = report("2,4", Invariant::Davenport, 2, None);
        assert_eq!((rep.lower, rep.upper), (9, 9));
        assert_eq!(status(&rep, Source::Thm3), SourceStatus::Applies);
        assert_eq!(status(&rep, Source::Obs1), SourceStatus::Applies);
        assert_eq!(status(&rep, Source::Thm4), SourceStatus::FailsPrecondition);
        assert_eq!(rep.invariant, "D_r");
    }

    #[test]
    fn mixed_groups_pick_up_multiplier_sources() {
        let rep = report("3,6", Invariant::Davenport, 1, Some(8));
        assert_eq!(rep.source(Source::Thm4).unwrap().lower, Some(8));
        assert_eq!(rep.exact, Some(8));
        assert!(rep.is_tight());

        let rep = report("2,12", Invariant::Davenport, 1, None);
        assert_eq!(status(&rep, Source::Obs1), SourceStatus::Applies);
        assert_eq!(rep.lower, 13);

        // written form C_10 × C_25 reads as m = 2, n = 1 over p = 5
        let rep = report("10,25", Invariant::Davenport, 1, None);
        assert_eq!(rep.canonical_group.orders(), &[5, 50]);
        let e = rep.source(Source::Cor5Case2).unwrap();
        assert_eq!((e.lower, e.upper), (Some(34), Some(54)));
    }

    #[test]
    fn multi_prime_sandwich() {
        let rep = report("2,6", Invariant::Davenport, 1, None);
        let e = rep.source(Source::Thm6).unwrap();
        assert_eq!((e.lower, e.upper), (Some(7), Some(9)));
        let rep = report("2,2,12", Invariant::Davenport, 1, None);
        let e = rep.source(Source::Thm6).unwrap();
        assert_eq!((e.lower, e.upper), (Some(14), Some(18)));
        assert_eq!(rep.lower, 14);
    }

    #[test]
    fn elementary_top_source() {
        let rep = report("2,2,2,8", Invariant::Davenport, 1, None);
        assert_eq!(rep.source(Source::Thm7).unwrap().lower, Some(11));
        let rep = report("2,2,2,8", Invariant::Davenport, 2, None);
        assert_eq!(status(&rep, Source::Thm7), SourceStatus::FailsPrecondition);
    }

    #[test]
    fn eta_reports_use_lower_bounds_only() {
        let rep = report("3,3", Invariant::Eta, 1, Some(7));
        assert_eq!(rep.invariant, "eta");
        assert!(rep.source(Source::Thm3).unwrap().upper.is_none());
        assert_eq!((rep.lower, rep.upper), (7, 7));
    }

    #[test]
    fn contradictions_are_errors() {
        let g: GroupSpec = "2,4".parse().unwrap();
        assert!(matches!(
            bound_report(&g, Invariant::Davenport, 1, Some(6)),
            Err(BoundsError::Contradiction(_))
        ));
    }

    #[test]
    fn trivial_group() {
        let rep = report("1", Invariant::Davenport, 3, None);
        assert_eq!((rep.lower, rep.upper), (3, 3));
        let rep = report("1", Invariant::Eta, 2, None);
        assert_eq!((rep.lower, rep.upper), (2, 2));
    }
}
