//! For each size `n`, the pairs `(m,p)` such that PG(m,p) has a spanning
//! minimal blocking set of size `n`.

use serde::Serialize;

use super::{enumerate_spanning_minimal, PruningConfig, SearchStatus, SearchTask, DEFAULT_BUDGET};
use crate::blocking::gf2_minimal_sets;
use crate::error::{Error, Result};
use crate::gflin::PrimeModulus;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableOptions {
    pub threads: usize,
    pub budget: u64,
    pub pruning: PruningConfig,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { threads: 1, budget: DEFAULT_BUDGET, pruning: PruningConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellMethod {
    /// Settled without a tree search (size filter, capacity, line case).
    Settled,
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum CellStatus {
    Found,
    ExhaustedNone,
    BudgetExceeded { nodes_completed: u64, frontier: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableCell {
    pub m: usize,
    pub p: u32,
    #[serde(flatten)]
    pub status: CellStatus,
    pub method: CellMethod,
    pub settled_by: Option<String>,
    pub nodes_explored: u64,
    /// For `p = 2`, agreement with the closed-form classification.
    pub gf2_agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub n: usize,
    /// Sorted by `(p, m)`.
    pub pairs: Vec<(usize, u32)>,
    pub cells: Vec<TableCell>,
}

fn primes_up_to(n: usize) -> Vec<PrimeModulus> {
    (2..=n as u32).filter_map(|q| PrimeModulus::new(q).ok()).collect()
}

/// Rows `n = 3..=n_max`. Every prime `p <= n-1` and every `m` with
/// `m + 2 <= n` gets a first-witness search.
pub fn build_table(n_max: usize, opts: &TableOptions) -> Result<Vec<TableRow>> {
    if n_max < 3 {
        return Err(Error::InvalidArgument(format!("n_max = {n_max}, need at least 3")));
    }
    let mut rows = Vec::new();
    for n in 3..=n_max {
        let mut cells = Vec::new();
        for p in primes_up_to(n - 1) {
            for m in 1..=n - 2 {
                cells.push(cell(n, m, p, opts)?);
            }
        }
        cells.sort_by_key(|c| (c.p, c.m));
        let pairs = cells.iter().filter(|c| c.status == CellStatus::Found).map(|c| (c.m, c.p)).collect();
        rows.push(TableRow { n, pairs, cells });
    }
    Ok(rows)
}

fn cell(n: usize, m: usize, p: PrimeModulus, opts: &TableOptions) -> Result<TableCell> {
    let task = SearchTask::new(m, p, n).with_threads(opts.threads).with_budget(opts.budget).with_pruning(opts.pruning);
    let (status, settled_by, nodes) = match enumerate_spanning_minimal(&task) {
        Ok(o) => {
            let s = match o.status {
                SearchStatus::Found => CellStatus::Found,
                SearchStatus::ExhaustedNone => CellStatus::ExhaustedNone,
            };
            (s, o.settled_by, o.nodes_explored)
        }
        Err(Error::BudgetExceeded(cp)) => (
            CellStatus::BudgetExceeded { nodes_completed: cp.nodes_completed, frontier: cp.frontier.len() },
            None,
            cp.nodes_completed,
        ),
        Err(e) => return Err(e),
    };
    let gf2_agrees = if p.get() == 2 {
        let closed = gf2_minimal_sets(m, m)?;
        let exists = closed.exists && closed.size == Some(n);
        match status {
            CellStatus::Found => Some(exists),
            CellStatus::ExhaustedNone => Some(!exists),
            CellStatus::BudgetExceeded { .. } => None,
        }
    } else {
        None
    };
    Ok(TableCell {
        m,
        p: p.get(),
        method: if settled_by.is_some() { CellMethod::Settled } else { CellMethod::Search },
        status,
        settled_by,
        nodes_explored: nodes,
        gf2_agrees,
    })
}
