//! Covers of `(C_p)^d` by maximal subgroups.
//!
//! A group element is an exponent vector `x ∈ GF(p)^d` and the maximal
//! subgroup dual to a nonzero `b` is `M_b = {x : b·x = 0}`. A set of points
//! `B` of PG(d-1,p) therefore gives the family `{M_b : b ∈ B}`, and blocking,
//! minimality and spanning of `B` become covering, irredundance and
//! core-freeness of the family.

mod audit;

pub use audit::{lemma_audit, AuditCheck, LemmaAudit};

use serde::Serialize;

use crate::blocking::{minimality_report, PointSet};
use crate::error::{Error, Result};
use crate::gflin::{dot_raw, null_space_basis, rank_of_rows, FieldMatrix, FieldVector, PrimeModulus};
use crate::projgeom::{normalize_coords, ProjectivePoint, SpaceDescriptor};

/// Largest group scanned element by element.
pub const DIRECT_SCAN_LIMIT: u64 = 6561;

/// The family `{M_{b_i}}` of maximal subgroups of `(C_p)^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCover {
    modulus: PrimeModulus,
    d: usize,
    duals: Vec<ProjectivePoint>,
}

impl DualCover {
    pub fn new(modulus: PrimeModulus, d: usize, duals: Vec<ProjectivePoint>) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(format!("group rank d = {d}, need d >= 2")));
        }
        if duals.len() < 2 {
            return Err(Error::InvalidArgument("a cover needs at least two members".into()));
        }
        if modulus.checked_power(d as u32).is_none() {
            return Err(Error::InvalidDimension(format!("(C_{modulus})^{d} overflows 64 bits")));
        }
        let mut seen = std::collections::HashSet::new();
        for b in &duals {
            if b.modulus() != modulus {
                return Err(Error::ModulusMismatch(modulus.get(), b.modulus().get()));
            }
            if b.coords().len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: b.coords().len() });
            }
            if !seen.insert(b) {
                return Err(Error::DuplicateMember(b.to_string()));
            }
        }
        Ok(DualCover { modulus, d, duals })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    /// Rank of the elementary abelian group.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn duals(&self) -> &[ProjectivePoint] {
        &self.duals
    }

    pub fn len(&self) -> usize {
        self.duals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.duals.is_empty()
    }

    /// `p^d`.
    pub fn group_order(&self) -> u64 {
        self.modulus.checked_power(self.d as u32).expect("checked at construction")
    }

    /// The duals as a point set of PG(d-1,p).
    pub fn as_point_set(&self) -> Result<PointSet> {
        PointSet::new(SpaceDescriptor::new(self.d - 1, self.modulus)?, self.duals.clone())
    }

    pub(crate) fn rank_of(&self, members: impl Iterator<Item = usize>) -> usize {
        let rows: Vec<&[u32]> = members.map(|i| self.duals[i].coords()).collect();
        rank_of_rows(self.modulus, &rows)
    }

    fn p_pow(&self, e: usize) -> u64 {
        (self.modulus.get() as u64).pow(e as u32)
    }
}

/// Exponent vectors of generators of a subgroup of `(C_p)^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubgroupDescriptor {
    pub generators: Vec<FieldVector>,
}

impl SubgroupDescriptor {
    pub fn new(generators: Vec<FieldVector>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("a subgroup needs at least one generator".into()));
        }
        Ok(SubgroupDescriptor { generators })
    }
}

pub fn cover_from_blocking(b: &PointSet) -> Result<DualCover> {
    DualCover::new(b.modulus(), b.space().dimension() + 1, b.points().to_vec())
}

/// The normalized `b` with `M_b = ⟨generators⟩`.
pub fn dual_from_generators(s: &SubgroupDescriptor) -> Result<ProjectivePoint> {
    let m = FieldMatrix::from_vectors(&s.generators)?;
    let d = m.ncols();
    let rank = m.rank();
    if rank + 1 != d {
        return Err(Error::WrongCorank { expected: d.saturating_sub(1), got: rank });
    }
    let ns = null_space_basis(&m);
    let p = m.modulus();
    Ok(ProjectivePoint::from_canonical(p, normalize_coords(p, &ns.rows()[0]).expect("kernel vector is nonzero")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanPath {
    /// Every group element was tested.
    ElementScan,
    /// Decided on the dual point set via blocking and minimality.
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub path: ScanPath,
    pub covers: bool,
    pub irredundant: bool,
    /// Every `M_b` has index `p`.
    pub maximal: bool,
    pub core_free: bool,
    pub witness_uncovered: Option<Vec<u32>>,
    /// For each member, an element lying in that member only.
    pub witness_private: Vec<Option<Vec<u32>>>,
}

impl CoverReport {
    pub fn is_cn_cover(&self) -> bool {
        self.covers && self.irredundant && self.maximal && self.core_free
    }
}

pub fn verify_cover(c: &DualCover) -> CoverReport {
    if c.group_order() <= DIRECT_SCAN_LIMIT {
        verify_by_elements(c)
    } else {
        verify_geometric(c)
    }
}

pub(crate) fn for_each_element(p: PrimeModulus, d: usize, mut f: impl FnMut(&[u32])) {
    let mut x = vec![0u32; d];
    loop {
        f(&x);
        let mut k = d;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            x[k] += 1;
            if x[k] < p.get() {
                break;
            }
            x[k] = 0;
        }
    }
}

pub(crate) fn verify_by_elements(c: &DualCover) -> CoverReport {
    let p = c.modulus;
    let n = c.len();
    let mut uncovered = None;
    let mut private: Vec<Option<Vec<u32>>> = vec![None; n];
    for_each_element(p, c.d, |x| {
        let mut count = 0;
        let mut which = 0;
        for (i, b) in c.duals.iter().enumerate() {
            if dot_raw(p, b.coords(), x) == 0 {
                count += 1;
                which = i;
                if count > 1 {
                    break;
                }
            }
        }
        match count {
            0 if uncovered.is_none() => uncovered = Some(x.to_vec()),
            1 if private[which].is_none() => private[which] = Some(x.to_vec()),
            _ => {}
        }
    });
    CoverReport {
        path: ScanPath::ElementScan,
        covers: uncovered.is_none(),
        irredundant: private.iter().all(Option::is_some),
        maximal: true,
        core_free: c.rank_of(0..n) == c.d,
        witness_uncovered: uncovered,
        witness_private: private,
    }
}

pub(crate) fn verify_geometric(c: &DualCover) -> CoverReport {
    let b = c.as_point_set().expect("duals are distinct points of PG(d-1,p)");
    let r = minimality_report(&b);
    CoverReport {
        path: ScanPath::Geometric,
        covers: r.is_blocking,
        irredundant: r.is_blocking && r.tangent_witnesses.iter().all(Option::is_some),
        maximal: true,
        core_free: c.rank_of(0..c.len()) == c.d,
        witness_uncovered: r.uncovered.map(|h| h.dual.coords().to_vec()),
        witness_private: r.tangent_witnesses.into_iter().map(|t| t.map(|h| h.dual.coords().to_vec())).collect(),
    }
}

/// `|∩_{i∈S} M_i| = p^{d - rank{b_i : i ∈ S}}`; the empty intersection is the group.
pub fn intersection_size(c: &DualCover, s: &[usize]) -> Result<u64> {
    if let Some(&bad) = s.iter().find(|&&i| i >= c.len()) {
        return Err(Error::InvalidArgument(format!("member index {bad} out of range")));
    }
    Ok(c.p_pow(c.d - c.rank_of(s.iter().copied())))
}

/// `|∪ M_i|` by scanning every element.
pub fn union_size_direct(c: &DualCover) -> Result<u64> {
    let order = c.group_order();
    if order > DIRECT_SCAN_LIMIT {
        return Err(Error::TooLarge(order));
    }
    let p = c.modulus;
    let mut count = 0u64;
    for_each_element(p, c.d, |x| {
        if c.duals.iter().any(|b| dot_raw(p, b.coords(), x) == 0) {
            count += 1;
        }
    });
    Ok(count)
}

/// Inclusion-exclusion over the actual intersection sizes of every subfamily.
pub fn union_size_by_inclusion_exclusion(c: &DualCover) -> Result<i128> {
    let n = c.len();
    if n > 20 {
        return Err(Error::InvalidArgument(format!("{n} members is too many for subset enumeration")));
    }
    let mut total = 0i128;
    for mask in 1u32..(1 << n) {
        let size = c.p_pow(c.d - c.rank_of((0..n).filter(|i| mask >> i & 1 == 1))) as i128;
        if mask.count_ones() % 2 == 1 {
            total += size;
        } else {
            total -= size;
        }
    }
    Ok(total)
}

/// Asserted size of every `k`-wise intersection, `k = 1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SizeProfile {
    pub modulus: PrimeModulus,
    pub level_sizes: Vec<u64>,
}

impl SizeProfile {
    pub fn new(modulus: PrimeModulus, level_sizes: Vec<u64>) -> Result<Self> {
        if level_sizes.is_empty() {
            return Err(Error::InvalidArgument("empty profile".into()));
        }
        if level_sizes.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument("level sizes must be non-increasing".into()));
        }
        let p = modulus.get() as u64;
        let is_power = |mut x: u64| {
            while x > 1 && x.is_multiple_of(p) {
                x /= p;
            }
            x == 1
        };
        if let Some(bad) = level_sizes.iter().find(|&&x| !is_power(x)) {
            return Err(Error::InvalidArgument(format!("{bad} is not a power of {p}")));
        }
        Ok(SizeProfile { modulus, level_sizes })
    }

    pub fn n(&self) -> usize {
        self.level_sizes.len()
    }
}

fn binomial(n: u64, k: u64) -> i128 {
    (0..k).fold(1i128, |acc, i| acc * (n - i) as i128 / (i + 1) as i128)
}

/// `Σ_{k=1..n} (-1)^{k+1} C(n,k) · level_sizes[k]`.
pub fn ie_union(n: usize, profile: &SizeProfile) -> Result<i128> {
    if profile.n() != n {
        return Err(Error::InvalidArgument(format!("profile has {} levels, expected {n}", profile.n())));
    }
    Ok(profile
        .level_sizes
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let k = i as u64 + 1;
            let term = binomial(n as u64, k) * s as i128;
            if k % 2 == 1 {
                term
            } else {
                -term
            }
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Admissibility {
    /// No maximal irredundant `n`-cover of a `p`-group exists.
    Inadmissible { reason: String },
    /// `n = p + 1`: only the `p + 1` maximal subgroups of `(C_p)^2`.
    ForcedLine,
    Admissible,
}

/// Size filter: an irredundant maximal `n`-cover of a `p`-group needs
/// `p <= n - 1`, and then either `n = p + 1` or `n >= 3(p+1)/2`.
pub fn bound_filter(n: usize, p: PrimeModulus) -> Admissibility {
    let q = p.get() as usize;
    if q + 1 > n {
        Admissibility::Inadmissible { reason: format!("p = {q} > n - 1 = {}", n.saturating_sub(1)) }
    } else if n == q + 1 {
        Admissibility::ForcedLine
    } else if 2 * n < 3 * (q + 1) {
        Admissibility::Inadmissible { reason: format!("n = {n} is neither p + 1 nor >= 3(p+1)/2 = {}", 3.0 * (q as f64 + 1.0) / 2.0) }
    } else {
        Admissibility::Admissible
    }
}
