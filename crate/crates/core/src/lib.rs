//! Exact computation of zero-sum invariants of finite abelian groups.

pub mod bounds;
pub mod cache;
pub mod constructive;
pub mod error;
pub mod extremal;
pub mod group;
pub mod io;
pub mod packed;
pub mod pairs;
pub mod search;
pub mod sequence;

pub use error::{BoundsError, CacheError, ConstructionError, GroupError, SearchError, SequenceError};
pub use group::{GroupElement, GroupSpec, PGroupSpec};
pub use sequence::{sigma, sumset, DisjointFamily, GSequence, Witness};
