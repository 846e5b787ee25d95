//! Structural checks every irredundant maximal core-free cover must pass.
//!
//! All checks run on the intersection lattice: `|∩_S M_i| = p^{d - rank(S)}`.

use serde::Serialize;

use super::{for_each_element, verify_cover, DualCover, DIRECT_SCAN_LIMIT};
use crate::blocking::Combinations;
use crate::error::{Error, Result};
use crate::gflin::dot_raw;
use crate::projgeom::SpaceDescriptor;

/// Largest cover audited; subset ranks are tabulated for every subfamily.
pub const AUDIT_MAX_MEMBERS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditCheck {
    pub id: &'static str,
    pub statement: String,
    pub passed: bool,
    /// The hypothesis never applied.
    pub vacuous: bool,
    /// Counterexample when failed, or a supporting instance for existence checks.
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LemmaAudit {
    pub n: usize,
    pub d: usize,
    pub p: u32,
    pub checks: Vec<AuditCheck>,
}

impl LemmaAudit {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, id: &str) -> Option<&AuditCheck> {
        self.checks.iter().find(|c| c.id == id)
    }
}

struct Lattice<'a> {
    c: &'a DualCover,
    n: usize,
    ranks: Vec<u8>,
}

impl Lattice<'_> {
    fn rank(&self, members: &[usize]) -> usize {
        self.ranks[members.iter().fold(0usize, |m, &i| m | 1 << i)] as usize
    }

    /// `log_p |∩_S M_i|`.
    fn log_size(&self, members: &[usize]) -> usize {
        self.c.d - self.rank(members)
    }

    fn subsets(&self, k: usize) -> Combinations {
        Combinations::new(self.n, k)
    }
}

fn check(id: &'static str, statement: String, failure: Option<String>) -> AuditCheck {
    AuditCheck { id, statement, passed: failure.is_none(), vacuous: false, witness: failure }
}

fn fmt_set(s: &[usize]) -> String {
    let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

fn fmt_vec(v: &[u32]) -> String {
    let items: Vec<String> = v.iter().map(|i| i.to_string()).collect();
    format!("({})", items.join(","))
}

pub fn lemma_audit(c: &DualCover) -> Result<LemmaAudit> {
    let report = verify_cover(c);
    if !report.is_cn_cover() {
        let mut why = Vec::new();
        if !report.covers {
            why.push("does not cover");
        }
        if !report.irredundant {
            why.push("redundant");
        }
        if !report.core_free {
            why.push("not core-free");
        }
        return Err(Error::NotACnCover(why.join(", ")));
    }
    let order = c.group_order();
    if order > DIRECT_SCAN_LIMIT {
        return Err(Error::TooLarge(order));
    }
    let n = c.len();
    if n > AUDIT_MAX_MEMBERS {
        return Err(Error::InvalidArgument(format!("{n} members exceeds the audit limit {AUDIT_MAX_MEMBERS}")));
    }
    let ranks = (0..1usize << n).map(|mask| c.rank_of((0..n).filter(|i| mask >> i & 1 == 1)) as u8).collect();
    let lat = Lattice { c, n, ranks };
    let p = c.modulus();
    let q = p.get() as usize;
    let d = c.d;
    let all: Vec<usize> = (0..n).collect();
    // core-free, so the total intersection D is trivial
    let core_log = lat.log_size(&all);
    let mut checks = Vec::new();

    // elements outside D lie in at most n - p members
    let mut bad = None;
    for_each_element(p, d, |x| {
        if bad.is_some() || x.iter().all(|&v| v == 0) {
            return;
        }
        let k = c.duals.iter().filter(|b| dot_raw(p, b.coords(), x) == 0).count();
        if q + k > n {
            bad = Some(format!("{} lies in {k} members", fmt_vec(x)));
        }
    });
    checks.push(check("element_multiplicity", format!("every non-identity element lies in at most n - p = {} members", n as i64 - q as i64), bad));

    let bad = (0..n)
        .find(|&i| {
            let rest: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            lat.log_size(&rest) != core_log
        })
        .map(|i| format!("dropping member {i} enlarges the intersection"));
    checks.push(check("drop_one_keeps_core", "dropping any one member leaves the core intersection".into(), bad));

    // if all t-wise intersections equal D then every (t-1)-wise one has index at most n-t+1 over D
    let mut applied = false;
    let mut bad = None;
    for t in 1..=n {
        if !lat.subsets(t).all(|s| lat.log_size(&s) == core_log) {
            continue;
        }
        applied = true;
        let limit = (n - t + 1) as u64;
        if let Some(s) = lat.subsets(t - 1).find(|s| (q as u64).pow((lat.log_size(s) - core_log) as u32) > limit) {
            bad = Some(format!("t = {t}: |∩{}| exceeds {limit}", fmt_set(&s)));
            break;
        }
    }
    let mut ck = check("quotient_index_bound", "if every t-wise intersection is the core, every (t-1)-wise one has index at most n - t + 1 over it".into(), bad);
    ck.vacuous = !applied;
    checks.push(ck);

    // order-p subgroups are the points of PG(d-1,p)
    let space = SpaceDescriptor::new(d - 1, p)?;
    let bad = space.point_coords().find_map(|u| {
        let k = c.duals.iter().filter(|b| dot_raw(p, b.coords(), &u) == 0).count();
        let in_core = k == n;
        (!in_core && q + k > n).then(|| format!("<{}> lies in {k} members", fmt_vec(&u)))
    });
    checks.push(check("minimal_normal_multiplicity", "an order-p subgroup in exactly k members lies in the core or has p <= n - k".into(), bad));

    let bad = (q + 1 > n).then(|| format!("p = {q} > n - 1 = {}", n - 1));
    checks.push(check("prime_below_size", "p <= n - 1".into(), bad));

    let s = n.saturating_sub(q);
    let mut ck = if (1..=n.saturating_sub(2)).contains(&s) {
        let bad = lat.subsets(s + 1).find(|t| lat.log_size(t) != 0).map(|t| format!("|∩{}| > 1", fmt_set(&t)));
        check("large_intersections_trivial", format!("with s = n - p = {s}, every {}-wise intersection is trivial", s + 1), bad)
    } else {
        check("large_intersections_trivial", format!("with s = n - p = {s}, every {}-wise intersection is trivial", s + 1), None)
    };
    ck.vacuous = !(1..=n.saturating_sub(2)).contains(&s);
    checks.push(ck);

    let mut ck = check(
        "line_case_rank_two",
        "n = p + 1 forces d = 2".into(),
        (n == q + 1 && d != 2).then(|| format!("n = p + 1 but d = {d}")),
    );
    ck.vacuous = n != q + 1;
    checks.push(ck);

    let bad = if s >= 1 { lat.subsets(s).find(|t| lat.log_size(t) > 1).map(|t| format!("|∩{}| = {}^{}", fmt_set(&t), q, lat.log_size(&t))) } else { None };
    let mut ck = check("co_p_intersections_small", format!("every {s}-wise intersection has size 1 or p"), bad);
    ck.vacuous = s == 0;
    checks.push(ck);

    let bad = lat
        .subsets(2)
        .find(|t| lat.log_size(t) != d - 2)
        .map(|t| format!("|∩{}| = {}^{}", fmt_set(&t), q, lat.log_size(&t)));
    checks.push(check("pairwise_codim_two", format!("every pairwise intersection has size p^{}", d - 2), bad));

    let found = lat.subsets(d).find(|t| lat.log_size(t) == 0);
    checks.push(AuditCheck {
        id: "some_basis_trivial",
        statement: format!("some {d}-wise intersection is trivial"),
        passed: found.is_some(),
        vacuous: false,
        witness: Some(found.map_or_else(|| "none".to_string(), |t| fmt_set(&t))),
    });

    let all_d_trivial = lat.subsets(d).all(|t| lat.log_size(&t) == 0);
    let bad = if all_d_trivial {
        lat.subsets(d - 1).find_map(|t| {
            let size = (q as u64).pow(lat.log_size(&t) as u32);
            (size < q as u64 || size > (n - d + 1) as u64).then(|| format!("|∩{}| = {size}", fmt_set(&t)))
        })
    } else {
        None
    };
    let mut ck = check("hyperplane_intersections_bounded", format!("if every {d}-wise intersection is trivial, every {}-wise one has size in [p, n - d + 1]", d - 1), bad);
    ck.vacuous = !all_d_trivial;
    checks.push(ck);

    Ok(LemmaAudit { n, d, p: p.get(), checks })
}
