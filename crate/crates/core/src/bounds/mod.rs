//! Closed-form bounds on `D_r`, their aggregation into a [`BoundReport`],
//! and numeric checks of the inequalities that link `D`, `D_r`, `η`, `η_r`.

mod chain;
mod formulas;
mod report;

use serde::{Deserialize, Serialize};

pub use chain::{known_davenport, lemma_chain_check, ChainInstance, ChainReport, ChainStatus, Inequality};
pub use formulas::{
    corollary5_bounds, error_ratio, theorem3_value, theorem4_value, theorem6_bounds, theorem7_value,
    top_dominates, Applicability, MultiPrimeSpec, Sandwich, Sourced,
};
pub use report::{bound_report, pigeonhole_upper, BoundReport, SourceEntry, SourceStatus};

/// Where a bound comes from. Serialized tags are stable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Source {
    /// `p`-groups with a dominating top factor.
    #[serde(rename = "thm3")]
    Thm3,
    /// Same shape with an extra multiplier on the top factor, `p` odd.
    #[serde(rename = "thm4")]
    Thm4,
    /// The multiplier formula without the parity restriction.
    #[serde(rename = "obs1")]
    Obs1,
    /// Two multipliers, the lower dividing the upper.
    #[serde(rename = "cor5.1")]
    Cor5Case1,
    /// Two multipliers, the upper dividing the lower.
    #[serde(rename = "cor5.2")]
    Cor5Case2,
    /// Several primes, each with a dominating top factor.
    #[serde(rename = "thm6")]
    Thm6,
    /// `C_p^{d−1} × C_{pq}` with `p | q`.
    #[serde(rename = "thm7")]
    Thm7,
    /// `D*(G) + (r − 1) exp(G)`.
    #[serde(rename = "dstar")]
    DStar,
    /// Counting multiplicities of single elements.
    #[serde(rename = "pigeonhole")]
    Pigeonhole,
    /// Exhaustive search.
    #[serde(rename = "exact")]
    Exact,
}

impl Source {
    pub fn tag(self) -> &'static str {
        match self {
            Source::Thm3 => "thm3",
            Source::Thm4 => "thm4",
            Source::Obs1 => "obs1",
            Source::Cor5Case1 => "cor5.1",
            Source::Cor5Case2 => "cor5.2",
            Source::Thm6 => "thm6",
            Source::Thm7 => "thm7",
            Source::DStar => "dstar",
            Source::Pigeonhole => "pigeonhole",
            Source::Exact => "exact",
        }
    }
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}
