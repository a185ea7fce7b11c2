//! Standard-basis power sequences that witness lower bounds on `D_r`, and
//! their mechanical verification.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::bounds::{corollary5_bounds, theorem3_value, theorem4_value, top_dominates, Applicability};
use crate::error::{BoundsError, GroupError, SearchError};
use crate::group::{is_prime, GroupSpec, PGroupSpec};
use crate::search::find_disjoint_zero_sums;
use crate::sequence::GSequence;

/// Which construction to instantiate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RecipeSource {
    #[serde(rename = "thm3")]
    Thm3,
    #[serde(rename = "thm4")]
    Thm4,
    #[serde(rename = "cor5.1-S")]
    Cor5S,
    #[serde(rename = "cor5.2-S1")]
    Cor5S1,
    #[serde(rename = "cor5.2-S2")]
    Cor5S2,
}

impl RecipeSource {
    pub fn tag(self) -> &'static str {
        match self {
            RecipeSource::Thm3 => "thm3",
            RecipeSource::Thm4 => "thm4",
            RecipeSource::Cor5S => "cor5.1-S",
            RecipeSource::Cor5S1 => "cor5.2-S1",
            RecipeSource::Cor5S2 => "cor5.2-S2",
        }
    }
}

impl fmt::Display for RecipeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for RecipeSource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        [RecipeSource::Thm3, RecipeSource::Thm4, RecipeSource::Cor5S, RecipeSource::Cor5S1, RecipeSource::Cor5S2]
            .into_iter()
            .find(|r| r.tag().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown recipe `{s}`"))
    }
}

/// A validated construction with its parameters. `m` and `n` multiply the
/// last two cyclic orders; recipes that do not use them keep them at 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremalRecipe {
    source: RecipeSource,
    p: u64,
    exps: Vec<u32>,
    m: u64,
    n: u64,
    r: u64,
}

impl ExtremalRecipe {
    pub fn new(source: RecipeSource, p: u64, exps: Vec<u32>, m: u64, n: u64, r: u64) -> Result<Self, BoundsError> {
        if !is_prime(p) {
            return Err(GroupError::NotPrime(p).into());
        }
        if r == 0 || m == 0 || n == 0 {
            return Err(BoundsError::InvalidParameters("r, m and n must be at least 1".into()));
        }
        if exps.is_empty() || exps.contains(&0) {
            return Err(BoundsError::InvalidParameters("exponents must be positive".into()));
        }
        if exps.windows(2).any(|w| w[0] > w[1]) {
            return Err(GroupError::ExponentsNotSorted(exps).into());
        }
        if !top_dominates(p, &exps) {
            return Err(BoundsError::InvalidParameters(format!(
                "top factor {p}^{} does not dominate",
                exps[exps.len() - 1]
            )));
        }
        match source {
            RecipeSource::Thm3 | RecipeSource::Thm4 if n != 1 => {
                return Err(BoundsError::InvalidParameters(format!("{source} takes no n")));
            }
            RecipeSource::Thm3 if m != 1 => {
                return Err(BoundsError::InvalidParameters("thm3 takes no m".into()));
            }
            RecipeSource::Cor5S | RecipeSource::Cor5S1 | RecipeSource::Cor5S2 => {
                if exps.len() < 2 {
                    return Err(BoundsError::InvalidParameters("at least two exponents are required".into()));
                }
                if p == 2 {
                    return Err(BoundsError::InvalidParameters("p must be odd".into()));
                }
                let ok = if source == RecipeSource::Cor5S { n % m == 0 } else { m % n == 0 };
                if !ok {
                    return Err(BoundsError::InvalidParameters(format!("divisibility between m = {m} and n = {n} fails")));
                }
            }
            _ => {}
        }
        Ok(ExtremalRecipe { source, p, exps, m, n, r })
    }

    pub fn source(&self) -> RecipeSource {
        self.source
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    /// The group the sequence lives in, in written form.
    pub fn group(&self) -> Result<GroupSpec, BoundsError> {
        let d = self.exps.len();
        let mut orders = Vec::with_capacity(d);
        for (i, &e) in self.exps.iter().enumerate() {
            let mult = match self.source {
                RecipeSource::Thm3 => 1,
                RecipeSource::Thm4 => if i == d - 1 { self.m } else { 1 },
                _ if i == d - 2 => self.m,
                _ if i == d - 1 => self.n,
                _ => 1,
            };
            let order = self.p.checked_pow(e).and_then(|q| q.checked_mul(mult)).ok_or(GroupError::TooLarge)?;
            orders.push(order);
        }
        Ok(GroupSpec::new(orders)?)
    }

    /// Multiplicity of the `i`-th basis vector.
    fn powers(&self) -> Result<Vec<u64>, BoundsError> {
        let d = self.exps.len();
        let pe = |i: usize| self.p.checked_pow(self.exps[i]).ok_or(BoundsError::from(GroupError::TooLarge));
        let mut out = Vec::with_capacity(d);
        for i in 0..d {
            let (r, m, n) = (self.r, self.m, self.n);
            let factor = match self.source {
                RecipeSource::Thm3 if i == d - 1 => r,
                RecipeSource::Thm4 if i == d - 1 => r * m,
                RecipeSource::Thm3 | RecipeSource::Thm4 => 1,
                RecipeSource::Cor5S if i == d - 2 => m,
                RecipeSource::Cor5S1 | RecipeSource::Cor5S2 if i == d - 2 => r * m,
                RecipeSource::Cor5S | RecipeSource::Cor5S1 if i == d - 1 => r * n,
                RecipeSource::Cor5S2 if i == d - 1 => n,
                _ => 1,
            };
            out.push(pe(i)?.checked_mul(factor).ok_or(GroupError::TooLarge)? - 1);
        }
        Ok(out)
    }

    /// The lower bound the sequence is meant to witness: its length plus one
    /// when deficient.
    pub fn claimed_bound(&self) -> Result<BigInt, BoundsError> {
        let length: BigInt = self.powers()?.into_iter().map(BigInt::from).sum();
        let formula = match self.source {
            RecipeSource::Thm3 => {
                theorem3_value(&PGroupSpec::new(self.p, self.exps.clone())?, self.r)?.into_value()
            }
            RecipeSource::Thm4 => theorem4_value(self.p, &self.exps, self.m, self.r)?.into_value().map(|v| v.value),
            RecipeSource::Cor5S => match corollary5_bounds(self.p, &self.exps, self.m, self.n, self.r)? {
                Applicability::Applies(s) => Some(s.lower),
                Applicability::FailsPrecondition(_) => None,
            },
            // the longer sequence of the divisible-multiplier case has no
            // matching closed form; its length is the claim
            RecipeSource::Cor5S1 | RecipeSource::Cor5S2 => None,
        };
        let claimed = length + 1;
        if let Some(f) = formula {
            debug_assert_eq!(f, claimed);
        }
        Ok(claimed)
    }
}

/// `e_1^{k_1} … e_d^{k_d}` over the recipe's group, with exponents exactly
/// as in the construction.
pub fn construct_extremal(recipe: &ExtremalRecipe) -> Result<GSequence, BoundsError> {
    let g = recipe.group()?;
    let powers = recipe.powers()?;
    let seq = GSequence::from_powers(g.clone(), powers.into_iter().enumerate().map(|(i, k)| (g.basis(i), k)))?;
    Ok(seq)
}

/// True iff `s` has no `r` pairwise disjoint nonempty zero-sum subsequences.
pub fn verify_deficiency(s: &GSequence, r: u64) -> Result<bool, SearchError> {
    if r == 0 {
        return Err(SearchError::ZeroR);
    }
    if s.group().cardinality() > crate::search::GUARD_ORDER_D {
        return Err(SearchError::SizeGuard { order: s.group().cardinality(), r });
    }
    Ok(find_disjoint_zero_sums(s, r).is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupElement;

    fn recipe(src: RecipeSource, p: u64, e: &[u32], m: u64, n: u64, r: u64) -> ExtremalRecipe {
        ExtremalRecipe::new(src, p, e.to_vec(), m, n, r).unwrap()
    }

    fn powers(s: &GSequence) -> Vec<(Vec<u64>, u64)> {
        s.powers().map(|(e, k)| (e.residues().to_vec(), k)).collect()
    }

    #[test]
    fn p_group_construction() {
        let rc = recipe(RecipeSource::Thm3, 2, &[1, 2], 1, 1, 2);
        let s = construct_extremal(&rc).unwrap();
        assert_eq!(s.group().orders(), &[2, 4]);
        assert_eq!(powers(&s), vec![(vec![0, 1], 7), (vec![1, 0], 1)]);
        assert_eq!(rc.claimed_bound().unwrap(), BigInt::from(9));
        assert!(verify_deficiency(&s, 2).unwrap());
        let mut longer = s.clone();
        longer.push(GroupElement::from_residues(vec![0, 1]), 1).unwrap();
        assert!(!verify_deficiency(&longer, 2).unwrap());
    }

    #[test]
    fn multiplier_construction() {
        let rc = recipe(RecipeSource::Thm4, 3, &[1, 1], 2, 1, 1);
        let s = construct_extremal(&rc).unwrap();
        assert_eq!(s.group().orders(), &[3, 6]);
        assert_eq!(powers(&s), vec![(vec![0, 1], 5), (vec![1, 0], 2)]);
        assert_eq!(rc.claimed_bound().unwrap(), BigInt::from(8));
        assert!(verify_deficiency(&s, 1).unwrap());
    }

    #[test]
    fn two_multiplier_constructions() {
        let rc = recipe(RecipeSource::Cor5S2, 3, &[1, 1], 2, 1, 2);
        let s = construct_extremal(&rc).unwrap();
        assert_eq!(s.group().orders(), &[6, 3]);
        assert_eq!(powers(&s), vec![(vec![0, 1], 2), (vec![1, 0], 11)]);
        assert!(verify_deficiency(&s, 2).unwrap());

        // the r-fold version of the first block is not deficient for r ≥ 2
        let rc = recipe(RecipeSource::Cor5S1, 3, &[1, 1], 2, 1, 2);
        let s = construct_extremal(&rc).unwrap();
        assert!(!verify_deficiency(&s, 2).unwrap());
        let rc = recipe(RecipeSource::Cor5S1, 3, &[1, 1], 2, 1, 1);
        assert!(verify_deficiency(&construct_extremal(&rc).unwrap(), 1).unwrap());

        let rc = recipe(RecipeSource::Cor5S, 3, &[1, 1], 1, 2, 2);
        let s = construct_extremal(&rc).unwrap();
        assert_eq!(rc.claimed_bound().unwrap(), BigInt::from(14));
        assert!(verify_deficiency(&s, 2).unwrap());
    }

    #[test]
    fn invalid_recipes() {
        assert!(ExtremalRecipe::new(RecipeSource::Thm3, 2, vec![2, 2, 2], 1, 1, 1).is_err());
        assert!(ExtremalRecipe::new(RecipeSource::Cor5S, 3, vec![1, 1], 2, 3, 1).is_err());
        assert!(ExtremalRecipe::new(RecipeSource::Cor5S2, 2, vec![1, 2], 2, 1, 1).is_err());
        assert!(ExtremalRecipe::new(RecipeSource::Thm4, 4, vec![1], 2, 1, 1).is_err());
        assert_eq!("cor5.2-S1".parse::<RecipeSource>().unwrap(), RecipeSource::Cor5S1);
    }

    #[test]
    fn empty_sequence_is_deficient() {
        let s = GSequence::empty(GroupSpec::new(vec![3]).unwrap());
        assert!(verify_deficiency(&s, 1).unwrap());
    }
}
