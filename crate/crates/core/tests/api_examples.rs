//! Worked examples through the public API, one block per module.

use davenport_core::bounds::{
    corollary5_bounds, theorem3_value, theorem4_value, theorem6_bounds, theorem7_value, MultiPrimeSpec, Source,
};
use davenport_core::cache::{Cache, CacheEntry, CacheStatus};
use davenport_core::constructive::{
    conjecture1_check, lemma13_case1, lemma13_case2, lemma15_augment, prop14_extract, theorem2_decide,
    ConjectureOptions, ConjectureStatus,
};
use davenport_core::extremal::{construct_extremal, verify_deficiency, ExtremalRecipe, RecipeSource};
use davenport_core::group::{canonicalize, d_star, exponent, rank};
use davenport_core::io::SequenceFile;
use davenport_core::pairs::{extension, normalize, PairSequence, StructuredSequence};
use davenport_core::search::{
    davenport_exact, davenport_r_exact, eta_exact, eta_r_exact, find_disjoint_zero_sums, find_short_zero_sum,
    find_zero_sum, Invariant, SearchBudget,
};
use davenport_core::sequence::remove;
use davenport_core::{sigma, sumset, ConstructionError, GSequence, GroupElement, GroupSpec, PGroupSpec, Witness};
use num_bigint::BigInt;

fn g(s: &str) -> GroupSpec {
    s.parse().unwrap()
}

fn el(v: &[u64]) -> GroupElement {
    GroupElement::from_residues(v.to_vec())
}

fn seq(group: &str, items: &[(&[u64], u64)]) -> GSequence {
    GSequence::from_powers(g(group), items.iter().map(|(e, k)| (el(e), *k))).unwrap()
}

fn pairs(h: &str, q: u64, items: &[(&[u64], u64)]) -> PairSequence {
    PairSequence::new(g(h), q, items.iter().map(|(x, y)| (el(x), *y)).collect()).unwrap()
}

#[test]
fn groups() {
    assert_eq!(canonicalize(&g("2,3")), g("6"));
    assert_eq!(canonicalize(&g("3,3,9")), g("3,3,9"));
    assert_eq!(canonicalize(&g("6,4")), g("2,12"));
    assert_eq!(canonicalize(&g("2,2,2,3")), g("2,2,6"));
    let c33 = g("3,3");
    assert_eq!(c33.add(&el(&[1, 2]), &el(&[2, 2])).unwrap(), el(&[0, 1]));
    assert_eq!(g("6").add(&el(&[5]), &el(&[1])).unwrap(), el(&[0]));
    assert_eq!(g("2,4").negate(&el(&[1, 3])).unwrap(), el(&[1, 1]));
    assert_eq!("(1,0,2)".parse::<GroupElement>().unwrap(), el(&[1, 0, 2]));
    assert_eq!(d_star(&g("6")), 6);
    assert_eq!(d_star(&g("3,3,9")), 13);
    assert_eq!(d_star(&g("2,2,6")), 8);
    assert_eq!((exponent(&g("2,4")), rank(&g("2,4"))), (4, 2));
    assert_eq!((exponent(&g("2,3")), rank(&g("2,3"))), (6, 1));
    assert_eq!((exponent(&g("3,3,9")), rank(&g("3,3,9"))), (9, 3));
}

#[test]
fn sequences() {
    assert_eq!(sigma(&seq("3,3", &[(&[1, 0], 2), (&[2, 0], 1)])), el(&[1, 0]));
    assert_eq!(sigma(&GSequence::empty(g("3"))), el(&[0]));
    assert_eq!(sigma(&seq("2,4", &[(&[1, 1], 1), (&[1, 3], 1)])), el(&[0, 0]));
    assert_eq!(sumset(&seq("4", &[(&[1], 2)])), [el(&[1]), el(&[2])].into());
    assert_eq!(sumset(&seq("5", &[(&[1], 1), (&[2], 1), (&[4], 1)])).len(), 5);

    let s = pairs("3", 3, &[(&[1], 1), (&[2], 2), (&[0], 0)]);
    let e = extension(&[0, 2], &s).unwrap();
    assert_eq!(e.pairs(), &[(el(&[1]), 1), (el(&[0]), 0)]);

    let s = seq("3", &[(&[1], 3)]);
    let t = Witness::from_elements(&s, [el(&[1])]).unwrap();
    assert_eq!(remove(&s, &t).unwrap().len(), 2);
    assert!(Witness::from_elements(&seq("3", &[(&[1], 1)]), [el(&[1]), el(&[1])]).is_err());

    let file = SequenceFile::from_sequence(&seq("3,3", &[(&[1, 0], 2)]));
    assert_eq!(file.to_text(), "{\"group\":[3,3],\"elements\":[[1,0],[1,0]]}\n");
}

#[test]
fn structured_layout() {
    let ys = [0, 1, 0, 2, 1, 0, 0, 0];
    let s = PairSequence::new(g("2,2,2"), 3, ys.iter().map(|&y| (el(&[0, 0, 0]), y)).collect()).unwrap();
    let (st, perm) = normalize(&s, 2, 3).unwrap();
    assert_eq!(st.blocks(), &[2, 1]);
    assert_eq!(st.r(), 3);
    assert_eq!(&perm[..3], &[1, 4, 3]);
}

#[test]
fn search() {
    let budget = SearchBudget::deterministic();
    let w = find_zero_sum(&seq("2,2,2", &[(&[1, 0, 0], 2)])).unwrap();
    assert_eq!(w.len(), 2);
    assert!(find_zero_sum(&seq("5", &[(&[1], 4)])).is_none());
    assert_eq!(find_zero_sum(&seq("3,3", &[(&[1, 0], 1), (&[1, 1], 1), (&[1, 2], 1)])).unwrap().len(), 3);
    assert!(find_short_zero_sum(&seq("2,4", &[(&[0, 1], 4)])).is_some());
    assert_eq!(find_short_zero_sum(&seq("2,4", &[(&[1, 0], 2), (&[0, 1], 3)])).unwrap().len(), 2);
    assert!(find_zero_sum(&seq("6", &[(&[5], 1), (&[2], 1), (&[3], 1)])).is_none());
    assert_eq!(find_disjoint_zero_sums(&seq("2", &[(&[1], 4)]), 2).unwrap().len(), 2);
    assert!(find_disjoint_zero_sums(&seq("3", &[(&[1], 4)]), 2).is_none());
    let fam = find_disjoint_zero_sums(&seq("2,2", &[(&[1, 0], 2), (&[0, 1], 2), (&[1, 1], 2)]), 3).unwrap();
    assert_eq!(fam.len(), 3);

    for (group, d) in [("6", 6), ("3,3,3", 7), ("2,4", 5)] {
        assert_eq!(davenport_exact(&g(group), &budget).unwrap().value, d);
    }
    assert_eq!(davenport_r_exact(&g("5"), 3, &budget).unwrap().value, 15);
    assert_eq!(davenport_r_exact(&g("2,4"), 2, &budget).unwrap().value, 9);
    assert_eq!(davenport_r_exact(&g("3,6"), 2, &budget).unwrap().value, 14);
    assert_eq!(eta_exact(&g("4"), &budget).unwrap().value, 4);
    assert_eq!(eta_exact(&g("2,2"), &budget).unwrap().value, 4);
    assert_eq!(eta_r_exact(&g("2,4"), 1, &budget).unwrap(), eta_exact(&g("2,4"), &budget).unwrap());
}

#[test]
fn constructions() {
    let s = pairs("2", 2, &[(&[1], 1), (&[1], 0), (&[1], 1), (&[1], 0)]);
    let w = lemma13_case1(&s, &[vec![0, 1], vec![2, 3]]).unwrap();
    assert_eq!(w.positions, vec![0, 1, 2, 3]);
    let s = pairs("3", 2, &[(&[1], 0), (&[2], 0), (&[1], 1), (&[2], 1)]);
    assert_eq!(lemma13_case1(&s, &[vec![0, 1], vec![2, 3]]).unwrap().positions, vec![0, 1]);
    assert!(matches!(lemma13_case1(&s, &[vec![0, 2], vec![1, 3]]), Err(ConstructionError::CertifiedInput(_))));

    let s = pairs("3", 2, &[(&[1], 1), (&[1], 1), (&[1], 1)]);
    assert!(lemma13_case2(&s, &[0, 1, 2]).is_err());
    let s = pairs("2", 2, &[(&[1], 1), (&[1], 1)]);
    assert_eq!(lemma13_case2(&s, &[0, 1]).unwrap().positions, vec![0, 1]);

    let s = pairs("2", 2, &[(&[1], 0), (&[1], 0), (&[0], 1)]);
    let aug = lemma15_augment(&s);
    assert_eq!(aug.sequence().pairs()[3], (el(&[0]), 1));
    assert_eq!(aug.pullback(&[0, 1]).unwrap().positions, vec![0, 1]);
    assert!(aug.pullback(&[0, 1, 2, 3]).is_err());

    let x = vec![el(&[1, 0, 0]); 8];
    let st = StructuredSequence::new(2, 3, 3, x, vec![0, 0]).unwrap();
    let w = prop14_extract(&st).unwrap();
    assert_eq!(w.positions.len(), 2);

    let all_zero_y = PairSequence::new(g("2,2,2"), 3, vec![(el(&[1, 0, 0]), 0); 8]).unwrap();
    assert_eq!(theorem2_decide(&all_zero_y, 2, 3).unwrap().positions.len(), 2);
    let short = PairSequence::new(g("2,2,2"), 3, vec![(el(&[1, 0, 0]), 0); 7]).unwrap();
    assert!(theorem2_decide(&short, 2, 3).is_err());

    let v = conjecture1_check(3, 2, 3, &ConjectureOptions::default()).unwrap();
    assert_eq!(v.status, ConjectureStatus::Verified);
    assert!(conjecture1_check(3, 3, 3, &ConjectureOptions::default()).is_err());
}

#[test]
fn closed_forms() {
    let t3 = |p, e: &[u32], r| theorem3_value(&PGroupSpec::new(p, e.to_vec()).unwrap(), r).unwrap().into_value();
    assert_eq!(t3(2, &[1, 2], 2), Some(BigInt::from(9)));
    assert_eq!(t3(3, &[1, 2], 1), Some(BigInt::from(11)));
    assert_eq!(t3(2, &[2, 2, 2], 1), None);

    let t4 = |p, e: &[u32], m, r| theorem4_value(p, e, m, r).unwrap().into_value().unwrap();
    assert_eq!(t4(3, &[1, 1], 2, 1).value, BigInt::from(8));
    assert_eq!(t4(3, &[1, 1], 2, 2).value, BigInt::from(14));
    let obs = t4(2, &[1, 2], 3, 1);
    assert_eq!((obs.source, obs.value), (Source::Obs1, BigInt::from(13)));

    let c5 = |m, n, r, e: &[u32], p| corollary5_bounds(p, e, m, n, r).unwrap().into_value().unwrap();
    let s = c5(2, 2, 1, &[1, 1], 3);
    assert_eq!((s.lower, s.upper), (BigInt::from(11), BigInt::from(11)));
    let s = c5(1, 2, 2, &[1, 1], 3);
    assert_eq!((s.lower, s.upper), (BigInt::from(14), BigInt::from(14)));
    let s = c5(2, 1, 1, &[1, 2], 5);
    assert_eq!((s.source, s.lower, s.upper), (Source::Cor5Case2, BigInt::from(34), BigInt::from(54)));

    let c2c6 = MultiPrimeSpec::new(vec![2, 3], vec![vec![1, 1], vec![0, 1]]).unwrap();
    let s = theorem6_bounds(&c2c6, 1).unwrap().into_value().unwrap();
    assert_eq!((s.lower, s.upper), (BigInt::from(7), BigInt::from(9)));
    let c2c2c12 = MultiPrimeSpec::new(vec![2, 3], vec![vec![1, 1, 2], vec![0, 0, 1]]).unwrap();
    let s = theorem6_bounds(&c2c2c12, 2).unwrap().into_value().unwrap();
    assert_eq!((s.lower, s.upper), (BigInt::from(26), BigInt::from(30)));

    assert_eq!(theorem7_value(3, 6, 3).unwrap().into_value(), Some(BigInt::from(22)));
    assert_eq!(theorem7_value(2, 4, 4).unwrap().into_value(), Some(BigInt::from(11)));
    assert_eq!(theorem7_value(2, 4, 5).unwrap().into_value(), None);
}

#[test]
fn extremal_sequences() {
    let recipe = ExtremalRecipe::new(RecipeSource::Thm3, 2, vec![1, 2], 1, 1, 2).unwrap();
    let s = construct_extremal(&recipe).unwrap();
    assert_eq!(s, seq("2,4", &[(&[1, 0], 1), (&[0, 1], 7)]));
    assert!(verify_deficiency(&s, 2).unwrap());
    let mut longer = s.clone();
    longer.push(el(&[0, 1]), 1).unwrap();
    assert!(!verify_deficiency(&longer, 2).unwrap());
    assert!(verify_deficiency(&GSequence::empty(g("3")), 1).unwrap());

    let recipe = ExtremalRecipe::new(RecipeSource::Thm4, 3, vec![1, 1], 2, 1, 1).unwrap();
    assert_eq!(construct_extremal(&recipe).unwrap(), seq("3,6", &[(&[1, 0], 2), (&[0, 1], 5)]));
}

#[test]
fn cache_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("values.json");
    let mut cache = Cache::open(&path).unwrap();
    cache.record(CacheEntry::new(&g("9,3,3"), Invariant::Davenport, 1, 13, CacheStatus::Exact)).unwrap();
    cache.save().unwrap();
    let back = Cache::open(&path).unwrap();
    assert_eq!(back.get(&g("3,3,9"), Invariant::Davenport, 1).unwrap().value, 13);
}
