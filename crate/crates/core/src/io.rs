//! The sequence file: `{"group":[…],"elements":[[…],…]}`.
//!
//! Elements are listed in order with repetitions. [`SequenceFile::to_text`]
//! is the canonical rendering; reading and re-rendering it is byte-exact.

use serde::{Deserialize, Serialize};

use crate::error::SequenceError;
use crate::group::{GroupElement, GroupSpec};
use crate::pairs::PairSequence;
use crate::sequence::GSequence;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub group: GroupSpec,
    pub elements: Vec<GroupElement>,
}

impl SequenceFile {
    pub fn new(group: GroupSpec, elements: Vec<GroupElement>) -> Result<Self, SequenceError> {
        for e in &elements {
            group.validate(e)?;
        }
        Ok(SequenceFile { group, elements })
    }

    /// Multiset contents in the global element order.
    pub fn from_sequence(s: &GSequence) -> Self {
        SequenceFile { group: s.group().clone(), elements: s.to_vec() }
    }

    pub fn from_pairs(s: &PairSequence) -> Self {
        SequenceFile { group: s.group(), elements: s.elements() }
    }

    pub fn parse(text: &str) -> Result<Self, SequenceError> {
        let raw: SequenceFile =
            serde_json::from_str(text).map_err(|e| SequenceError::Malformed(format!("sequence file: {e}")))?;
        SequenceFile::new(raw.group, raw.elements)
    }

    /// One line of compact JSON followed by a newline.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string(self).expect("plain data");
        s.push('\n');
        s
    }

    pub fn to_sequence(&self) -> Result<GSequence, SequenceError> {
        Ok(GSequence::from_elements(self.group.clone(), self.elements.iter().cloned())?)
    }

    /// Reads the last cyclic factor as `C_q` and the rest as `H`.
    pub fn to_pairs(&self) -> Result<PairSequence, SequenceError> {
        PairSequence::from_product_elements(&self.group, &self.elements)
    }
}
