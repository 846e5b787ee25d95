//! Normal forms `[I_{d+1}; L]` and canonical keys for point sets up to
//! equivalence (column permutations, column scalings, column additions,
//! row permutations and row scalings).

use std::fmt;

use serde::Serialize;

use super::{BlockingMatrix, PointSet};
use crate::error::{Error, Result};
use crate::gflin::{rref, rref_in_place, FieldMatrix, PrimeModulus, Rref};
use crate::projgeom::{ProjectivePoint, SpaceDescriptor};

/// Largest monomial group `(d+1)!·(p-1)^{d+1}` minimized over exhaustively.
pub const ORBIT_CAP: u128 = 10_000_000;

const MAX_K: usize = 12;

/// Transforms taking a blocking matrix to `[I_{d+1} 0; L 0]`.
///
/// Applying `row_permutation`, then `row_scaling`, then right-multiplying
/// by `column_transform` yields the identity block on top of `L`, followed
/// by `m - d` zero columns which the form drops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub d: usize,
    pub l: FieldMatrix,
    pub column_transform: FieldMatrix,
    /// Row `i` of the transformed matrix is row `row_permutation[i]` of the input.
    pub row_permutation: Vec<usize>,
    pub row_scaling: Vec<u32>,
}

impl NormalForm {
    /// Applies the recorded transforms to `a`.
    pub fn apply(&self, a: &BlockingMatrix) -> Result<FieldMatrix> {
        let m = a.matrix();
        let p = m.modulus();
        let rows = self
            .row_permutation
            .iter()
            .zip(&self.row_scaling)
            .map(|(&i, &s)| m.rows()[i].iter().map(|&c| p.mul(c, s)).collect())
            .collect();
        FieldMatrix::from_reduced(p, m.ncols(), rows).mul(&self.column_transform)
    }

    /// `[I_{d+1} 0; L 0]` at the full column width `m + 1`.
    pub fn expected(&self, cols: usize) -> FieldMatrix {
        let k = self.d + 1;
        let mut rows: Vec<Vec<u32>> = (0..k).map(|i| (0..cols).map(|j| u32::from(i == j)).collect()).collect();
        for r in self.l.rows() {
            let mut v = r.clone();
            v.resize(cols, 0);
            rows.push(v);
        }
        FieldMatrix::from_reduced(self.l.modulus(), cols, rows)
    }
}

pub fn normal_form(a: &BlockingMatrix) -> NormalForm {
    let m = a.matrix();
    let p = m.modulus();
    let cols = m.ncols();

    // greedy choice of the first independent rows
    let mut basis: Vec<usize> = Vec::new();
    let mut echelon: Vec<Vec<u32>> = Vec::new();
    for (i, r) in m.rows().iter().enumerate() {
        let mut trial = echelon.clone();
        trial.push(r.clone());
        let (rank, _) = rref_in_place(p, &mut trial, cols);
        if rank > echelon.len() {
            trial.truncate(rank);
            echelon = trial;
            basis.push(i);
        }
    }
    let k = basis.len();
    let pivots = rref(&FieldMatrix::from_reduced(p, cols, echelon)).pivot_columns;

    // complete the basis rows with unit vectors off the pivot columns
    let mut ext: Vec<Vec<u32>> = basis.iter().map(|&i| m.rows()[i].clone()).collect();
    for j in (0..cols).filter(|j| !pivots.contains(j)) {
        ext.push((0..cols).map(|c| u32::from(c == j)).collect());
    }
    let column_transform = FieldMatrix::from_reduced(p, cols, ext).inverse().expect("completed basis is invertible");

    let rest: Vec<usize> = (0..m.nrows()).filter(|i| !basis.contains(i)).collect();
    let mut row_scaling = vec![1u32; k];
    let mut l_rows = Vec::with_capacity(rest.len());
    for &i in &rest {
        let img = FieldMatrix::from_reduced(p, cols, vec![m.rows()[i].clone()])
            .mul(&column_transform)
            .expect("shapes agree");
        let c = &img.rows()[0][..k];
        let lead = *c.iter().find(|&&x| x != 0).expect("rows are nonzero");
        let s = p.inv(lead);
        row_scaling.push(s);
        l_rows.push(c.iter().map(|&x| p.mul(x, s)).collect());
    }
    let mut row_permutation = basis;
    row_permutation.extend(rest);
    NormalForm {
        d: k - 1,
        l: FieldMatrix::from_reduced(p, k, l_rows),
        column_transform,
        row_permutation,
        row_scaling,
    }
}

/// The lexicographically least `L` over every frame and monomial transform.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CanonicalForm {
    pub p: u32,
    pub m: usize,
    pub d: usize,
    pub n: usize,
    pub rows: Vec<Vec<u32>>,
}

impl CanonicalForm {
    pub fn key(&self) -> CanonicalKey {
        let mut bytes = Vec::with_capacity(12 + 2 * self.rows.len() * (self.d + 1));
        bytes.extend_from_slice(&self.p.to_be_bytes());
        for v in [self.m, self.d, self.n] {
            bytes.extend_from_slice(&(v as u16).to_be_bytes());
        }
        for r in &self.rows {
            for &c in r {
                bytes.extend_from_slice(&(c as u16).to_be_bytes());
            }
        }
        CanonicalKey(bytes)
    }

    /// `{e_1, …, e_{d+1}} ∪ L`, embedded in the first `d+1` coordinates.
    pub fn representative(&self) -> Result<PointSet> {
        let p = PrimeModulus::new(self.p)?;
        let space = SpaceDescriptor::new(self.m, p)?;
        let width = self.m + 1;
        let mut pts: Vec<ProjectivePoint> = (0..=self.d)
            .map(|i| ProjectivePoint::from_canonical(p, (0..width).map(|j| u32::from(i == j)).collect()))
            .collect();
        for r in &self.rows {
            let mut v = r.clone();
            v.resize(width, 0);
            pts.push(ProjectivePoint::from_canonical(p, v));
        }
        PointSet::new(space, pts)
    }
}

/// Opaque byte key; equal iff the point sets are equivalent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub Vec<u8>);

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn canonical_key(a: &BlockingMatrix) -> Result<CanonicalKey> {
    Ok(canonical_form(a)?.key())
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Canonical form of the set generated by `a`.
///
/// Points are first written in coordinates of the span. Then for every
/// independent `(d+1)`-subset used as the frame, the remaining points are
/// written in that frame, and the sorted list of normalized rows is
/// minimized over all column permutations and column scalings.
pub fn canonical_form(a: &BlockingMatrix) -> Result<CanonicalForm> {
    let mat = a.matrix();
    let p = mat.modulus();
    let q = p.get();
    let n = mat.nrows();
    let Rref { rank, pivot_columns, .. } = rref(mat);
    let k = rank;
    let group = factorial(k) * (q as u128 - 1).pow(k as u32);
    if group > ORBIT_CAP || k > MAX_K {
        return Err(Error::OrbitTooLarge(group));
    }
    // coordinates in the RREF basis are the entries at the pivot columns
    let coords: Vec<Vec<u32>> = mat.rows().iter().map(|r| pivot_columns.iter().map(|&c| r[c]).collect()).collect();

    let inv_table: Vec<u32> = (0..q).map(|x| if x == 0 { 0 } else { p.inv(x) }).collect();
    let mut best: Option<Vec<[u16; MAX_K]>> = None;
    let mut scratch: Vec<[u16; MAX_K]> = Vec::with_capacity(n);
    let mut permuted: Vec<[u16; MAX_K]> = Vec::with_capacity(n);

    for subset in Combinations::new(n, k) {
        let frame = FieldMatrix::from_reduced(p, k, subset.iter().map(|&i| coords[i].clone()).collect());
        let Some(inv) = frame.inverse() else { continue };
        let others: Vec<Vec<u32>> = (0..n)
            .filter(|i| !subset.contains(i))
            .map(|i| {
                FieldMatrix::from_reduced(p, k, vec![coords[i].clone()])
                    .mul(&inv)
                    .expect("shapes agree")
                    .rows()[0]
                    .clone()
            })
            .collect();

        let mut perm: Vec<usize> = (0..k).collect();
        loop {
            permuted.clear();
            permuted.extend(others.iter().map(|r| {
                let mut row = [0u16; MAX_K];
                for j in 0..k {
                    row[j] = r[perm[j]] as u16;
                }
                row
            }));
            // column 0 keeps scale 1; the rest range over GF(p)^*
            let mut scale = vec![1u32; k];
            loop {
                scratch.clear();
                for r in &permuted {
                    let mut row = [0u16; MAX_K];
                    let mut lead_inv = 0u32;
                    for j in 0..k {
                        let v = p.mul(r[j] as u32, scale[j]);
                        if lead_inv == 0 && v != 0 {
                            lead_inv = inv_table[v as usize];
                        }
                        row[j] = p.mul(v, lead_inv) as u16;
                    }
                    scratch.push(row);
                }
                scratch.sort_unstable();
                if best.as_ref().is_none_or(|b| scratch < *b) {
                    best = Some(scratch.clone());
                }
                if !advance_scale(&mut scale[1..], q) {
                    break;
                }
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
    }
    let rows = best
        .expect("a spanning subset exists")
        .into_iter()
        .map(|r| r[..k].iter().map(|&c| c as u32).collect())
        .collect();
    Ok(CanonicalForm { p: q, m: mat.ncols() - 1, d: k - 1, n, rows })
}

/// Base-(p-1) counter over `1..p`. Returns false after the last value.
fn advance_scale(s: &mut [u32], q: u32) -> bool {
    for x in s.iter_mut() {
        if *x + 1 < q {
            *x += 1;
            return true;
        }
        *x = 1;
    }
    false
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// k-subsets of `0..n` in lexicographic order.
pub(crate) struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations { n, cur: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let k = out.len();
        let mut c = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                self.cur = Some(c);
                break;
            }
        }
        Some(out)
    }
}
