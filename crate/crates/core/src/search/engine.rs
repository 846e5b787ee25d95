//! Depth-first search over the extra points.

use std::sync::atomic::{AtomicUsize, Ordering};

use super::{finish_witness, Checkpoint, Dedup, SearchMode, SearchOutcome, SearchStatus, SearchTask, Witness};
use crate::bitset::{any_and_not, count_and_not};
use crate::error::{Error, Result};
use crate::gflin::dot_raw;
use crate::par;
use crate::projgeom::SpaceDescriptor;

/// Branches evaluated between budget checks. Fixed so the stopping point
/// does not depend on the thread count.
const BATCH: usize = 64;

/// Points of weight at least `w`, in index order.
struct CandList {
    pts: Vec<usize>,
    zero_sum: Vec<bool>,
    /// Zero-sum candidates at positions `>= i`.
    zero_suffix: Vec<u32>,
}

pub(super) struct Engine {
    space: SpaceDescriptor,
    words: usize,
    /// Hyperplanes through each point.
    inc: Vec<Vec<u64>>,
    weight: Vec<usize>,
    residual: Vec<u64>,
    frame: Vec<usize>,
    /// Indexed by minimal weight; entries 0 and 1 are unused.
    lists: Vec<CandList>,
    k: usize,
}

#[derive(Debug, Clone)]
struct Prefix {
    list: usize,
    /// Positions in the list.
    pos: Vec<usize>,
}

struct BranchResult {
    nodes: u64,
    aborted: bool,
    found: Vec<Vec<usize>>,
}

struct State<'a> {
    e: &'a Engine,
    task: &'a SearchTask,
    list: &'a CandList,
    u1: Vec<Vec<u64>>,
    u2: Vec<Vec<u64>>,
    chosen: Vec<usize>,
    zero_chosen: usize,
    nodes: u64,
    cap: u64,
    aborted: bool,
    found: Vec<Vec<usize>>,
    gains: Vec<u32>,
}

impl Engine {
    pub(super) fn new(task: &SearchTask, space: SpaceDescriptor) -> Self {
        let p = space.modulus();
        let count = space.point_count() as usize;
        let coords: Vec<Vec<u32>> = space.point_coords().collect();
        let words = count.div_ceil(64);
        let inc = par::map_ordered(&coords, task.threads, |_, x| {
            let mut row = vec![0u64; words];
            for (h, hc) in coords.iter().enumerate() {
                if dot_raw(p, hc, x) == 0 {
                    row[h / 64] |= 1 << (h % 64);
                }
            }
            row
        });
        let weight: Vec<usize> = coords.iter().map(|c| c.iter().filter(|&&v| v != 0).count()).collect();
        let mut residual = vec![0u64; words];
        for (h, &w) in weight.iter().enumerate() {
            if w == space.vector_len() {
                residual[h / 64] |= 1 << (h % 64);
            }
        }
        let frame: Vec<usize> = (0..count).filter(|&i| weight[i] == 1).collect();
        let sums_zero = |i: usize| coords[i].iter().fold(0u64, |a, &c| a + c as u64) % p.get() as u64 == 0;
        let lists = (0..=space.vector_len())
            .map(|w| {
                let pts: Vec<usize> = if w < 2 { vec![] } else { (0..count).filter(|&i| weight[i] >= w).collect() };
                let zero_sum: Vec<bool> = pts.iter().map(|&i| sums_zero(i)).collect();
                let mut zero_suffix = vec![0u32; pts.len() + 1];
                for i in (0..pts.len()).rev() {
                    zero_suffix[i] = zero_suffix[i + 1] + zero_sum[i] as u32;
                }
                CandList { pts, zero_sum, zero_suffix }
            })
            .collect();
        Engine { space, words, inc, weight, residual, frame, lists, k: task.n - task.m - 1 }
    }

    fn root_prefixes(&self, task: &SearchTask) -> Vec<Prefix> {
        if self.k == 0 {
            return vec![Prefix { list: 2, pos: vec![] }];
        }
        let firsts: Vec<Prefix> = if task.pruning.symmetry {
            // the first entry of list w is (0,…,0,1^w)
            (2..=self.space.vector_len()).map(|w| Prefix { list: w, pos: vec![0] }).collect()
        } else {
            (0..self.lists[2].pts.len()).map(|i| Prefix { list: 2, pos: vec![i] }).collect()
        };
        if self.k == 1 {
            return firsts;
        }
        let mut out = Vec::new();
        for f in firsts {
            let len = self.lists[f.list].pts.len();
            for j in f.pos[0] + 1..len {
                out.push(Prefix { list: f.list, pos: vec![f.pos[0], j] });
            }
        }
        out
    }

    fn prefix_indices(&self, pre: &Prefix) -> Vec<u64> {
        pre.pos.iter().map(|&i| self.lists[pre.list].pts[i] as u64).collect()
    }

    fn prefix_from_indices(&self, task: &SearchTask, idx: &[u64]) -> Result<Prefix> {
        let bad = || Error::Checkpoint(format!("frontier entry {idx:?} is not a branch of this search"));
        let list = match idx.first() {
            Some(&i) if task.pruning.symmetry => *self.weight.get(i as usize).ok_or_else(bad)?,
            _ => 2,
        };
        let l = self.lists.get(list).ok_or_else(bad)?;
        let pos = idx.iter().map(|&i| l.pts.binary_search(&(i as usize)).map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
        if pos.windows(2).any(|w| w[0] >= w[1]) || (task.pruning.symmetry && pos.first().is_some_and(|&p| p != 0)) {
            return Err(bad());
        }
        Ok(Prefix { list, pos })
    }

    pub(super) fn run(&self, task: &SearchTask, resume: Option<&Checkpoint>) -> Result<SearchOutcome> {
        let prefixes = match resume {
            Some(cp) => cp.frontier.iter().map(|f| self.prefix_from_indices(task, f)).collect::<Result<Vec<_>>>()?,
            None => self.root_prefixes(task),
        };
        let mut raw: Vec<Vec<u64>> = resume.map(|cp| cp.witnesses.clone()).unwrap_or_default();
        let base_nodes = resume.map_or(0, |cp| cp.nodes_completed);
        let first_only = task.mode == SearchMode::FirstWitness;
        let mut nodes = 0u64;
        let mut done = 0usize;
        let mut stopped = false;

        'outer: for batch in prefixes.chunks(BATCH) {
            let remaining = task.budget.saturating_sub(nodes);
            let best = AtomicUsize::new(usize::MAX);
            let results = par::map_ordered(batch, task.threads, |i, pre| {
                if first_only && best.load(Ordering::Relaxed) < i {
                    return None;
                }
                let r = self.branch(task, pre, remaining, first_only);
                if !r.found.is_empty() {
                    best.fetch_min(i, Ordering::Relaxed);
                }
                Some(r)
            });
            for r in results {
                let r = r.expect("branches before the first witness always run");
                if r.aborted || nodes + r.nodes > task.budget {
                    stopped = true;
                    break 'outer;
                }
                nodes += r.nodes;
                done += 1;
                for f in r.found {
                    let mut all: Vec<u64> = self.frame.iter().chain(&f).map(|&i| i as u64).collect();
                    all.sort_unstable();
                    raw.push(all);
                }
                if first_only && !raw.is_empty() {
                    break 'outer;
                }
            }
        }

        if stopped {
            let frontier = prefixes[done..].iter().map(|p| self.prefix_indices(p)).collect();
            return Err(Error::BudgetExceeded(Box::new(Checkpoint::new(task, base_nodes + nodes, raw, frontier))));
        }

        let mut witnesses: Vec<Witness> = Vec::new();
        let mut dedup = Dedup::CanonicalKey;
        let mut seen_keys = std::collections::BTreeSet::new();
        let mut seen_sets = std::collections::BTreeSet::new();
        for w in &raw {
            let (wit, exact) = finish_witness(&self.space, w, true)?;
            if !exact {
                dedup = Dedup::ExactSet;
            }
            let fresh = match &wit.canonical_key {
                Some(k) => seen_keys.insert(k.clone()),
                None => seen_sets.insert(w.clone()),
            };
            if fresh {
                witnesses.push(wit);
            }
        }
        witnesses.sort_by(|a, b| a.canonical_key.cmp(&b.canonical_key).then_with(|| a.points.indices().cmp(&b.points.indices())));
        Ok(SearchOutcome {
            m: task.m,
            p: task.modulus.get(),
            n: task.n,
            mode: task.mode,
            status: if witnesses.is_empty() { SearchStatus::ExhaustedNone } else { SearchStatus::Found },
            witnesses,
            nodes_explored: base_nodes + nodes,
            branches: prefixes.len() as u64,
            pruning: task.pruning,
            rules: task.pruning.rules(),
            dedup,
            settled_by: None,
            elapsed: Default::default(),
        })
    }

    fn branch(&self, task: &SearchTask, pre: &Prefix, cap: u64, first_only: bool) -> BranchResult {
        let list = &self.lists[pre.list];
        let depth = self.k + 1;
        let mut u1 = vec![vec![0u64; self.words]; depth];
        let mut u2 = vec![vec![0u64; self.words]; depth];
        for &e in &self.frame {
            add_point(&mut u1[0], &mut u2[0], &self.inc[e]);
        }
        let mut st = State {
            e: self,
            task,
            list,
            u1,
            u2,
            chosen: self.frame.clone(),
            zero_chosen: 0,
            nodes: 0,
            cap,
            aborted: false,
            found: Vec::new(),
            gains: Vec::new(),
        };
        for &pos in &pre.pos {
            st.nodes += 1;
            if !st.push(pos) {
                return BranchResult { nodes: st.nodes, aborted: false, found: vec![] };
            }
        }
        let start = pre.pos.last().map_or(0, |&p| p + 1);
        st.descend(start, self.k - pre.pos.len(), first_only);
        BranchResult { nodes: st.nodes, aborted: st.aborted, found: st.found }
    }
}

#[inline]
fn add_point(u1: &mut [u64], u2: &mut [u64], inc: &[u64]) {
    for ((a, b), &x) in u1.iter_mut().zip(u2.iter_mut()).zip(inc) {
        *b |= *a & x;
        *a |= x;
    }
}

impl State<'_> {
    fn level(&self) -> usize {
        self.chosen.len() - self.e.frame.len()
    }

    /// Adds the candidate at `pos`; false when tangency already fails.
    fn push(&mut self, pos: usize) -> bool {
        let x = self.list.pts[pos];
        let lvl = self.level();
        let (lo, hi) = self.u1.split_at_mut(lvl + 1);
        hi[0].copy_from_slice(&lo[lvl]);
        let (lo2, hi2) = self.u2.split_at_mut(lvl + 1);
        hi2[0].copy_from_slice(&lo2[lvl]);
        add_point(&mut hi[0], &mut hi2[0], &self.e.inc[x]);
        self.chosen.push(x);
        if self.list.zero_sum[pos] {
            self.zero_chosen += 1;
        }
        if self.task.pruning.tangency && !self.tangents_ok() {
            self.pop(pos);
            return false;
        }
        true
    }

    fn pop(&mut self, pos: usize) {
        self.chosen.pop();
        if self.list.zero_sum[pos] {
            self.zero_chosen -= 1;
        }
    }

    fn tangents_ok(&self) -> bool {
        let u2 = &self.u2[self.level()];
        self.chosen.iter().all(|&y| any_and_not(&self.e.inc[y], u2))
    }

    fn covers_all(&self) -> bool {
        !any_and_not(&self.e.residual, &self.u1[self.level()])
    }

    fn descend(&mut self, start: usize, r: usize, first_only: bool) -> bool {
        if r == 0 {
            if self.covers_all() && self.tangents_ok() {
                self.found.push(self.chosen[self.e.frame.len()..].to_vec());
                return first_only;
            }
            return false;
        }
        let lvl = self.level();
        let pr = self.task.pruning;
        let need = count_and_not(&self.e.residual, &self.u1[lvl]);
        if pr.tangency && need == 0 {
            // a further point would have no hyperplane of its own
            return false;
        }
        let need_zero = pr.zero_sum && self.zero_chosen == 0;
        if need_zero && self.list.zero_suffix[start] == 0 {
            return false;
        }
        let len = self.list.pts.len();
        if len < start + r {
            return false;
        }
        if pr.coverage_bound && r > 1 {
            let uncovered: Vec<u64> = self.e.residual.iter().zip(&self.u1[lvl]).map(|(a, b)| a & !b).collect();
            self.gains.clear();
            for &c in &self.list.pts[start..] {
                let g: u32 = self.e.inc[c].iter().zip(&uncovered).map(|(a, b)| (a & b).count_ones()).sum();
                self.gains.push(g);
            }
            let idx = self.gains.len() - r;
            self.gains.select_nth_unstable(idx);
            let top: u32 = self.gains[idx..].iter().sum();
            if top < need {
                return false;
            }
        }
        for pos in start..=len - r {
            if r == 1 {
                if need_zero && !self.list.zero_sum[pos] {
                    continue;
                }
                if pr.coverage_bound && !completes(&self.e.residual, &self.u1[lvl], &self.e.inc[self.list.pts[pos]]) {
                    continue;
                }
            }
            self.nodes += 1;
            if self.nodes > self.cap {
                self.aborted = true;
                return true;
            }
            if !self.push(pos) {
                continue;
            }
            let stop = self.descend(pos + 1, r - 1, first_only);
            self.pop(pos);
            if stop {
                return true;
            }
        }
        false
    }
}

/// `residual ⊆ u1 ∪ inc`.
#[inline]
fn completes(residual: &[u64], u1: &[u64], inc: &[u64]) -> bool {
    residual.iter().zip(u1).zip(inc).all(|((r, a), b)| r & !(a | b) == 0)
}
