//! Persistent store of computed invariant values, keyed on canonical groups.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CacheError;
use crate::group::{canonicalize, GroupSpec};
use crate::search::Invariant;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CacheStatus {
    Exact,
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    /// Canonical group string, e.g. `3,3,9`.
    pub group: String,
    pub invariant: Invariant,
    pub r: u64,
    pub value: u64,
    pub status: CacheStatus,
    pub tool_version: String,
}

impl CacheEntry {
    pub fn new(g: &GroupSpec, invariant: Invariant, r: u64, value: u64, status: CacheStatus) -> Self {
        CacheEntry {
            group: canonicalize(g).to_string(),
            invariant,
            r,
            value,
            status,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    pub fn key(&self) -> String {
        entry_key(&self.group, self.invariant, self.r)
    }
}

fn entry_key(group: &str, inv: Invariant, r: u64) -> String {
    let name = match inv {
        Invariant::Davenport => "D",
        Invariant::Eta => "eta",
    };
    format!("{name}/{group}/{r}")
}

/// Key for `g` after canonicalization.
pub fn cache_key(g: &GroupSpec, inv: Invariant, r: u64) -> String {
    entry_key(&canonicalize(g).to_string(), inv, r)
}

/// A JSON document mapping keys to entries. Exact entries never change;
/// lower bounds may only rise or become exact.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cache {
    path: Option<PathBuf>,
    entries: BTreeMap<String, CacheEntry>,
}

impl Cache {
    pub fn in_memory() -> Self {
        Cache::default()
    }

    /// Opens `path`, starting empty if it does not exist.
    pub fn open(path: &Path) -> Result<Self, CacheError> {
        let entries = match fs::read_to_string(path) {
            Ok(text) => {
                let entries: BTreeMap<String, CacheEntry> =
                    serde_json::from_str(&text).map_err(|e| CacheError::Parse(e.to_string()))?;
                if let Some((k, e)) = entries.iter().find(|(k, e)| **k != e.key()) {
                    return Err(CacheError::Parse(format!("key `{k}` does not match entry `{}`", e.key())));
                }
                entries
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(CacheError::Io(e.to_string())),
        };
        Ok(Cache { path: Some(path.to_path_buf()), entries })
    }

    pub fn get(&self, g: &GroupSpec, inv: Invariant, r: u64) -> Option<&CacheEntry> {
        self.entries.get(&cache_key(g, inv, r))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Records `entry`. Returns whether anything changed.
    pub fn record(&mut self, entry: CacheEntry) -> Result<bool, CacheError> {
        let key = entry.key();
        match self.entries.get(&key) {
            Some(old) if old.status == CacheStatus::Exact => {
                if entry.status == CacheStatus::Exact && entry.value != old.value {
                    return Err(CacheError::Conflict(format!(
                        "{key}: stored exact value {} differs from {}",
                        old.value, entry.value
                    )));
                }
                if entry.status == CacheStatus::LowerBound && entry.value > old.value {
                    return Err(CacheError::Conflict(format!(
                        "{key}: lower bound {} exceeds stored exact value {}",
                        entry.value, old.value
                    )));
                }
                Ok(false)
            }
            Some(old) if entry.status == CacheStatus::LowerBound && entry.value <= old.value => Ok(false),
            Some(old) if entry.status == CacheStatus::Exact && entry.value < old.value => {
                Err(CacheError::Conflict(format!(
                    "{key}: exact value {} below stored lower bound {}",
                    entry.value, old.value
                )))
            }
            _ => {
                self.entries.insert(key, entry);
                Ok(true)
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.entries).expect("plain data");
        s.push('\n');
        s
    }

    /// Writes through a temporary file and rename.
    pub fn save(&self) -> Result<(), CacheError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, self.to_text()).map_err(|e| CacheError::Io(e.to_string()))?;
        fs::rename(&tmp, path).map_err(|e| CacheError::Io(e.to_string()))
    }
}
