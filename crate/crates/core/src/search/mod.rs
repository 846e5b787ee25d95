//! Exhaustive, symmetry-reduced search for spanning minimal blocking sets.
//!
//! A spanning set contains `m+1` independent points, so up to equivalence it
//! contains the frame `e_1, …, e_{m+1}`. The frame blocks every hyperplane
//! with a zero coordinate; the remaining `k = n-m-1` points must block the
//! residual hyperplanes, those with all coordinates nonzero. Coordinate
//! permutations and scalings fix the frame and act on the other points with
//! one orbit per weight, so the lowest-index extra point may be taken to be
//! `(0,…,0,1,…,1)` of minimal weight among the extras.

mod checkpoint;
mod engine;
mod table;
mod zero_sum;

pub use checkpoint::{Checkpoint, CHECKPOINT_VERSION};
pub use table::{build_table, CellMethod, CellStatus, TableCell, TableOptions, TableRow};
pub use zero_sum::zero_sum_canonical_vectors;

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::blocking::{canonical_key, minimality_report, span_dimension, CanonicalKey, PointSet};
use crate::covers::{bound_filter, Admissibility};
use crate::error::{Error, Result};
use crate::gflin::PrimeModulus;
use crate::projgeom::SpaceDescriptor;

/// Default node budget per search.
pub const DEFAULT_BUDGET: u64 = 10_000_000_000;
/// Largest space whose incidence structure is materialized.
pub const MAX_POINTS: u64 = 12_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    FirstWitness,
    EnumerateAll,
}

/// Pruning rules. Every rule is sound; disabling one only grows the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruningConfig {
    /// First extra point is the minimal-weight orbit representative.
    pub symmetry: bool,
    /// Best `r` remaining candidates must be able to cover what is left.
    pub coverage_bound: bool,
    /// Some extra point must lie on the all-ones hyperplane.
    pub zero_sum: bool,
    /// Every chosen point keeps a hyperplane it alone blocks.
    pub tangency: bool,
    /// Skip sizes ruled out by the cover size bound.
    pub respect_bound_filter: bool,
}

impl Default for PruningConfig {
    fn default() -> Self {
        PruningConfig { symmetry: true, coverage_bound: true, zero_sum: true, tangency: true, respect_bound_filter: true }
    }
}

impl PruningConfig {
    pub fn none() -> Self {
        PruningConfig { symmetry: false, coverage_bound: false, zero_sum: false, tangency: false, respect_bound_filter: false }
    }

    pub fn rules(&self) -> Vec<&'static str> {
        let mut r = vec!["identity_frame"];
        for (on, name) in [
            (self.symmetry, "weight_orbit_first_point"),
            (self.coverage_bound, "coverage_bound"),
            (self.zero_sum, "zero_sum"),
            (self.tangency, "monotone_tangency"),
            (self.respect_bound_filter, "bound_filter"),
        ] {
            if on {
                r.push(name);
            }
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchTask {
    pub m: usize,
    pub modulus: PrimeModulus,
    pub n: usize,
    pub mode: SearchMode,
    pub threads: usize,
    pub budget: u64,
    pub pruning: PruningConfig,
}

impl SearchTask {
    pub fn new(m: usize, modulus: PrimeModulus, n: usize) -> Self {
        SearchTask {
            m,
            modulus,
            n,
            mode: SearchMode::FirstWitness,
            threads: 1,
            budget: DEFAULT_BUDGET,
            pruning: PruningConfig::default(),
        }
    }

    pub fn with_mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_pruning(mut self, pruning: PruningConfig) -> Self {
        self.pruning = pruning;
        self
    }

    fn validate(&self) -> Result<SpaceDescriptor> {
        if self.m == 0 {
            return Err(Error::InvalidDimension("m must be at least 1".into()));
        }
        if self.n < self.m + 1 {
            return Err(Error::InvalidArgument(format!("a spanning set of PG({},{}) needs at least {} points", self.m, self.modulus, self.m + 1)));
        }
        SpaceDescriptor::new(self.m, self.modulus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    ExhaustedNone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dedup {
    CanonicalKey,
    /// Canonical keys were out of reach; witnesses are distinct as sets only.
    ExactSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub points: PointSet,
    pub canonical_key: Option<CanonicalKey>,
}

impl Serialize for Witness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let rows: Vec<&[u32]> = self.points.points().iter().map(|x| x.coords()).collect();
        let mut st = s.serialize_struct("Witness", 3)?;
        st.serialize_field("indices", &self.points.indices())?;
        st.serialize_field("points", &rows)?;
        st.serialize_field("canonical_key", &self.canonical_key)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub m: usize,
    pub p: u32,
    pub n: usize,
    pub mode: SearchMode,
    pub status: SearchStatus,
    pub witnesses: Vec<Witness>,
    pub nodes_explored: u64,
    pub branches: u64,
    pub pruning: PruningConfig,
    pub rules: Vec<&'static str>,
    pub dedup: Dedup,
    /// Set when the answer was settled without a tree search.
    pub settled_by: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SearchOutcome {
    fn settled(task: &SearchTask, status: SearchStatus, witnesses: Vec<Witness>, reason: String) -> Self {
        SearchOutcome {
            m: task.m,
            p: task.modulus.get(),
            n: task.n,
            mode: task.mode,
            status,
            witnesses,
            nodes_explored: 0,
            branches: 0,
            pruning: task.pruning,
            rules: task.pruning.rules(),
            dedup: Dedup::CanonicalKey,
            settled_by: Some(reason),
            elapsed: Duration::ZERO,
        }
    }

    pub fn keys(&self) -> Vec<Option<CanonicalKey>> {
        self.witnesses.iter().map(|w| w.canonical_key.clone()).collect()
    }
}

/// Runs the search from the root.
pub fn enumerate_spanning_minimal(task: &SearchTask) -> Result<SearchOutcome> {
    run(task, None)
}

/// Continues a search that stopped with [`Error::BudgetExceeded`].
pub fn resume_search(task: &SearchTask, checkpoint: &Checkpoint) -> Result<SearchOutcome> {
    checkpoint.check_matches(task)?;
    run(task, Some(checkpoint))
}

fn run(task: &SearchTask, resume: Option<&Checkpoint>) -> Result<SearchOutcome> {
    let start = std::time::Instant::now();
    let space = task.validate()?;
    let p = task.modulus.get() as u64;
    if task.pruning.respect_bound_filter {
        if let Admissibility::Inadmissible { reason } = bound_filter(task.n, task.modulus) {
            return Ok(SearchOutcome::settled(task, SearchStatus::ExhaustedNone, vec![], format!("bound filter: {reason}")));
        }
    }
    if task.m == 1 {
        // the only blocking set of a line is the whole line
        let (status, witnesses) = if task.n as u64 == p + 1 {
            let all: Vec<u64> = (0..=p).collect();
            (SearchStatus::Found, vec![finish_witness(&space, &all, true)?.0])
        } else {
            (SearchStatus::ExhaustedNone, vec![])
        };
        return Ok(SearchOutcome::settled(task, status, witnesses, "line: every point is a hyperplane".into()));
    }
    let k = task.n - task.m - 1;
    if task.pruning.coverage_bound && (k as u64) < p - 1 {
        // (p-1)^m residual hyperplanes, at most (p-1)^(m-1) through any point
        return Ok(SearchOutcome::settled(
            task,
            SearchStatus::ExhaustedNone,
            vec![],
            format!("capacity: {k} extra points block at most {k}/(p-1) of the residual hyperplanes"),
        ));
    }
    if space.point_count() > MAX_POINTS {
        return Err(Error::SpaceTooLarge(space.point_count()));
    }
    let mut out = engine::Engine::new(task, space).run(task, resume)?;
    out.elapsed = start.elapsed();
    Ok(out)
}

/// Verifies a raw witness and attaches its canonical key.
pub(crate) fn finish_witness(space: &SpaceDescriptor, indices: &[u64], want_key: bool) -> Result<(Witness, bool)> {
    let set = PointSet::from_indices(*space, indices)?.sorted();
    let report = minimality_report(&set);
    if !report.is_minimal || span_dimension(&set) != space.dimension() {
        return Err(Error::UnsoundWitness(format!("{indices:?}")));
    }
    let (key, exact) = if want_key {
        match canonical_key(&set.blocking_matrix()) {
            Ok(k) => (Some(k), true),
            Err(Error::OrbitTooLarge(_)) => (None, false),
            Err(e) => return Err(e),
        }
    } else {
        (None, true)
    };
    Ok((Witness { points: set, canonical_key: key }, exact))
}
