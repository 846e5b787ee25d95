//! Resumable search state.
//!
//! Layout (JSON):
//!
//! ```text
//! {
//!   "version": 1,
//!   "task": { "m": 4, "p": 5, "n": 9, "mode": "first_witness" },
//!   "pruning": { "symmetry": true, ... },
//!   "nodes_completed": 123456,
//!   "witnesses": [[0, 1, 4, ...]],
//!   "frontier": [[31, 40], [31, 41], ...]
//! }
//! ```
//!
//! `frontier` lists the unfinished branches as the global indices of their
//! first extra points, in the order they would run. `witnesses` holds the
//! full point sets found in finished branches.

use serde::{Deserialize, Serialize};

use super::{PruningConfig, SearchMode, SearchTask};
use crate::error::{Error, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskHeader {
    pub m: usize,
    pub p: u32,
    pub n: usize,
    pub mode: SearchMode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub task: TaskHeader,
    pub pruning: PruningConfig,
    pub nodes_completed: u64,
    pub witnesses: Vec<Vec<u64>>,
    pub frontier: Vec<Vec<u64>>,
}

impl Checkpoint {
    pub(super) fn new(task: &SearchTask, nodes_completed: u64, witnesses: Vec<Vec<u64>>, frontier: Vec<Vec<u64>>) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            task: TaskHeader { m: task.m, p: task.modulus.get(), n: task.n, mode: task.mode },
            pruning: task.pruning,
            nodes_completed,
            witnesses,
            frontier,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("checkpoint serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cp: Checkpoint = serde_json::from_str(s).map_err(|e| Error::Checkpoint(e.to_string()))?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {}", cp.version)));
        }
        Ok(cp)
    }

    pub(super) fn check_matches(&self, task: &SearchTask) -> Result<()> {
        let want = TaskHeader { m: task.m, p: task.modulus.get(), n: task.n, mode: task.mode };
        if self.task != want {
            return Err(Error::Checkpoint(format!("checkpoint is for {:?}, task is {:?}", self.task, want)));
        }
        if self.pruning != task.pruning {
            return Err(Error::Checkpoint("pruning configuration differs".into()));
        }
        Ok(())
    }
}
