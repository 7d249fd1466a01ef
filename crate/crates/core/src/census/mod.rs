//! Exhaustive censuses and searches with deterministic, worker-count
//! independent reports.

mod linsearch;
mod orbit;
mod planes;

pub use linsearch::{
    apply_normalization, canonical_f1_reps, first_rejecting_vector, linset_search, normalize_spec, rejection_profile, test_order,
    Checkpoint, Normalization, RejectionProfile, SearchOptions, SearchOutcome, Strategy, SLICE_ID,
};
pub use orbit::{orbit_transitivity_check, triple_of_plane, OrbitOptions};
pub use planes::{
    classify_all_planes, conjugate_triple_planes, disjoint_plane_census, DisjointCensus, PlaneCensusOptions,
};

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::field::FieldError;
use crate::linset::LinsetError;
use crate::proj::ProjError;
use crate::spread::SpreadError;
use crate::veronese::GeomError;

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Profile(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Proj(#[from] ProjError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Linset(#[from] LinsetError),
    #[error(transparent)]
    Spread(#[from] SpreadError),
}

pub type Result<T> = std::result::Result<T, CensusError>;

/// Upper bound on witnesses kept in a report.
pub const MAX_WITNESSES: usize = 32;

/// The common report of every census. Maps are ordered, so serialization is
/// deterministic; `elapsed_ms` is only filled when timing is requested.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    /// Per-tag counts; they sum to the number of enumerated objects.
    pub counts: BTreeMap<String, u64>,
    /// Auxiliary verification results.
    pub checks: BTreeMap<String, Value>,
    pub witnesses: Vec<Value>,
    pub elapsed_ms: Option<u64>,
    pub checkpoint: Option<Value>,
}

impl CensusReport {
    pub fn new(command: &str) -> CensusReport {
        CensusReport {
            command: command.to_string(),
            params: BTreeMap::new(),
            counts: BTreeMap::new(),
            checks: BTreeMap::new(),
            witnesses: Vec::new(),
            elapsed_ms: None,
            checkpoint: None,
        }
    }

    pub fn param(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    pub fn check(&mut self, key: &str, v: impl Into<Value>) -> &mut Self {
        self.checks.insert(key.to_string(), v.into());
        self
    }

    pub fn count(&self, tag: &str) -> u64 {
        self.counts.get(tag).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Whether every boolean check is true.
    pub fn checks_pass(&self) -> bool {
        self.checks.values().all(|v| v.as_bool() != Some(false))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<CensusReport> {
        serde_json::from_str(s).map_err(|e| CensusError::InvalidParams(e.to_string()))
    }

    /// `tag,count` lines in tag order.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("tag,count\n");
        for (k, v) in &self.counts {
            s.push_str(&format!("{k},{v}\n"));
        }
        s
    }

    pub(crate) fn finish_timing(&mut self, start: Option<Instant>) {
        self.elapsed_ms = start.map(|t| t.elapsed().as_millis() as u64);
    }
}

/// Runs `f` on a dedicated rayon pool of `threads` workers (the global pool when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

pub(crate) fn timer(timing: bool) -> Option<Instant> {
    timing.then(Instant::now)
}
