//! Exact linear algebra over prime fields GF(p).
//!
//! Residues are stored as canonical representatives in `[0, p)`. Every
//! constructor reduces its input, so equality and hashing on vectors and
//! matrices are exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted modulus. Products of two residues fit in `u32`.
pub const MAX_PRIME: u32 = 1 << 16;

/// A prime modulus `p`, checked by trial division at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub fn new(p: u32) -> Result<Self> {
        if p > MAX_PRIME {
            return Err(Error::ModulusTooLarge(p));
        }
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// Reduces an arbitrary signed integer, so `-1` becomes `p - 1`.
    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.0), "inverse of zero");
        self.pow(a, self.0 - 2)
    }

    pub fn pow(self, mut base: u32, mut exp: u32) -> u32 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `p^k` as a `u64`, or `None` on overflow.
    pub fn checked_power(self, k: u32) -> Option<u64> {
        (self.0 as u64).checked_pow(k)
    }
}

impl TryFrom<u32> for PrimeModulus {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u32 {
    fn from(p: PrimeModulus) -> u32 {
        p.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A vector over GF(p) with reduced coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldVector {
    modulus: PrimeModulus,
    coords: Vec<u32>,
}

impl FieldVector {
    pub fn new(modulus: PrimeModulus, coords: Vec<u32>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        let coords = coords.into_iter().map(|c| c % modulus.get()).collect();
        Ok(FieldVector { modulus, coords })
    }

    /// Builds a vector from signed integers, reducing each mod p.
    pub fn from_signed(modulus: PrimeModulus, coords: &[i64]) -> Result<Self> {
        FieldVector::new(modulus, coords.iter().map(|&c| modulus.reduce(c)).collect())
    }

    pub(crate) fn from_reduced(modulus: PrimeModulus, coords: Vec<u32>) -> Self {
        debug_assert!(!coords.is_empty());
        debug_assert!(coords.iter().all(|&c| c < modulus.get()));
        FieldVector { modulus, coords }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Number of nonzero coordinates.
    pub fn weight(&self) -> usize {
        self.coords.iter().filter(|&&c| c != 0).count()
    }

    pub fn scale(&self, lambda: u32) -> FieldVector {
        let p = self.modulus;
        FieldVector::from_reduced(p, self.coords.iter().map(|&c| p.mul(c, lambda % p.get())).collect())
    }

    pub fn into_coords(self) -> Vec<u32> {
        self.coords
    }
}

impl fmt::Display for FieldVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `Σ u_i v_i mod p`.
pub fn dot(u: &FieldVector, v: &FieldVector) -> Result<u32> {
    if u.modulus != v.modulus {
        return Err(Error::ModulusMismatch(u.modulus.get(), v.modulus.get()));
    }
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    Ok(dot_raw(u.modulus, &u.coords, &v.coords))
}

/// Dot product on already reduced slices of equal length.
#[inline]
pub(crate) fn dot_raw(p: PrimeModulus, u: &[u32], v: &[u32]) -> u32 {
    let acc: u64 = u.iter().zip(v).map(|(&a, &b)| a as u64 * b as u64).sum();
    (acc % p.get() as u64) as u32
}

/// A dense rectangular matrix over GF(p). May have zero rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    modulus: PrimeModulus,
    cols: usize,
    rows: Vec<Vec<u32>>,
}

impl FieldMatrix {
    /// Builds a matrix from rows of residues; entries are reduced.
    pub fn new(modulus: PrimeModulus, cols: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        if cols == 0 {
            return Err(Error::EmptyVector);
        }
        let mut out = Vec::with_capacity(rows.len());
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch(cols, r.len()));
            }
            out.push(r.into_iter().map(|c| c % modulus.get()).collect());
        }
        Ok(FieldMatrix { modulus, cols, rows: out })
    }

    pub fn from_vectors(vectors: &[FieldVector]) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptyVector)?;
        let (p, cols) = (first.modulus(), first.len());
        let mut rows = Vec::with_capacity(vectors.len());
        for v in vectors {
            if v.modulus() != p {
                return Err(Error::ModulusMismatch(p.get(), v.modulus().get()));
            }
            if v.len() != cols {
                return Err(Error::LengthMismatch(cols, v.len()));
            }
            rows.push(v.coords().to_vec());
        }
        Ok(FieldMatrix { modulus: p, cols, rows })
    }

    pub(crate) fn from_reduced(modulus: PrimeModulus, cols: usize, rows: Vec<Vec<u32>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        FieldMatrix { modulus, cols, rows }
    }

    pub fn identity(modulus: PrimeModulus, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| u32::from(i == j)).collect())
            .collect();
        FieldMatrix { modulus, cols: n, rows }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> FieldVector {
        FieldVector::from_reduced(self.modulus, self.rows[i].clone())
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i][j]
    }

    pub fn transpose(&self) -> FieldMatrix {
        let rows = (0..self.cols)
            .map(|j| self.rows.iter().map(|r| r[j]).collect())
            .collect();
        FieldMatrix { modulus: self.modulus, cols: self.rows.len(), rows }
    }

    pub fn mul(&self, other: &FieldMatrix) -> Result<FieldMatrix> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus.get(), other.modulus.get()));
        }
        if self.cols != other.nrows() {
            return Err(Error::LengthMismatch(self.cols, other.nrows()));
        }
        let p = self.modulus;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                (0..other.cols)
                    .map(|j| {
                        let acc: u64 = r
                            .iter()
                            .zip(&other.rows)
                            .map(|(&a, orow)| a as u64 * orow[j] as u64)
                            .sum();
                        (acc % p.get() as u64) as u32
                    })
                    .collect()
            })
            .collect();
        Ok(FieldMatrix { modulus: p, cols: other.cols, rows })
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<FieldMatrix> {
        let n = self.rows.len();
        if n != self.cols {
            return None;
        }
        let p = self.modulus;
        let mut aug: Vec<Vec<u32>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut v = r.clone();
                v.extend((0..n).map(|j| u32::from(i == j)));
                v
            })
            .collect();
        let (rank, pivots) = rref_in_place(p, &mut aug, n);
        if rank < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let rows = aug.into_iter().map(|r| r[n..].to_vec()).collect();
        Some(FieldMatrix { modulus: p, cols: n, rows })
    }
}

/// Output of [`rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: FieldMatrix,
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
}

/// Reduced row-echelon form. Pivots are the first nonzero entry found
/// scanning columns left to right, rows top to bottom, and are scaled to 1.
pub fn rref(m: &FieldMatrix) -> Rref {
    let mut rows = m.rows.clone();
    let (rank, pivot_columns) = rref_in_place(m.modulus, &mut rows, m.cols);
    Rref {
        reduced: FieldMatrix { modulus: m.modulus, cols: m.cols, rows },
        rank,
        pivot_columns,
    }
}

/// In-place RREF restricted to the first `limit` columns for pivot choice;
/// row operations act on the whole row.
pub(crate) fn rref_in_place(p: PrimeModulus, rows: &mut [Vec<u32>], limit: usize) -> (usize, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..limit {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = p.inv(rows[r][c]);
        if inv != 1 {
            for x in rows[r].iter_mut() {
                *x = p.mul(*x, inv);
            }
        }
        let (head, tail) = rows.split_at_mut(r);
        let (pivot_row, below) = tail.split_first_mut().expect("pivot row exists");
        for other in head.iter_mut().chain(below.iter_mut()) {
            let f = other[c];
            if f != 0 {
                for (x, &y) in other.iter_mut().zip(pivot_row.iter()) {
                    *x = p.sub(*x, p.mul(f, y));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (r, pivots)
}

/// Basis of `{x : Mx = 0}` as the rows of the returned matrix.
///
/// One basis vector per free column, in increasing column order, with a 1 in
/// that column.
pub fn null_space_basis(m: &FieldMatrix) -> FieldMatrix {
    let p = m.modulus;
    let Rref { reduced, rank, pivot_columns } = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivot_columns {
        is_pivot[c] = true;
    }
    let rows = (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![0u32; m.cols];
            v[f] = 1;
            for (i, &pc) in pivot_columns.iter().enumerate().take(rank) {
                v[pc] = p.neg(reduced.rows[i][f]);
            }
            v
        })
        .collect();
    FieldMatrix { modulus: p, cols: m.cols, rows }
}

/// Rank of a list of equal-length residue slices.
pub(crate) fn rank_of_rows(p: PrimeModulus, rows: &[&[u32]]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut owned: Vec<Vec<u32>> = rows.iter().map(|r| r.to_vec()).collect();
    rref_in_place(p, &mut owned, cols).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn vec3(p: u32, c: &[i64]) -> FieldVector {
        FieldVector::from_signed(gf(p), c).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert!(PrimeModulus::new(2).is_ok());
        assert!(PrimeModulus::new(65521).is_ok());
        assert!(matches!(PrimeModulus::new(1), Err(Error::NotPrime(1))));
        assert!(matches!(PrimeModulus::new(9), Err(Error::NotPrime(9))));
        assert!(matches!(PrimeModulus::new(70001), Err(Error::ModulusTooLarge(_))));
    }

    #[test]
    fn signed_parse_reduces() {
        let v = vec3(3, &[1, -1, 1, -1]);
        assert_eq!(v.coords(), &[1, 2, 1, 2]);
        let w = vec3(5, &[-4, 0, 1]);
        assert_eq!(w.coords(), &[1, 0, 1]);
    }

    #[test]
    fn dot_examples() {
        assert_eq!(dot(&vec3(3, &[1, 1, 1]), &vec3(3, &[1, 1, 1])).unwrap(), 0);
        assert_eq!(dot(&vec3(3, &[1, 0, 0, 0]), &vec3(3, &[0, 1, 0, 0])).unwrap(), 0);
        assert_eq!(dot(&vec3(3, &[1, 2, 1, 2]), &vec3(3, &[1, 1, 1, 1])).unwrap(), 0);
    }

    #[test]
    fn dot_errors() {
        assert!(matches!(
            dot(&vec3(3, &[1, 1]), &vec3(3, &[1, 1, 1])),
            Err(Error::LengthMismatch(2, 3))
        ));
        assert!(matches!(
            dot(&vec3(3, &[1, 1]), &vec3(5, &[1, 1])),
            Err(Error::ModulusMismatch(3, 5))
        ));
    }

    #[test]
    fn rref_examples() {
        let id = FieldMatrix::identity(gf(3), 4);
        let r = rref(&id);
        assert_eq!(r.rank, 4);
        assert_eq!(r.pivot_columns, vec![0, 1, 2, 3]);

        let b7 = FieldMatrix::new(
            gf(3),
            4,
            vec![
                vec![1, 0, 0, 0],
                vec![0, 1, 0, 0],
                vec![0, 0, 1, 0],
                vec![0, 0, 0, 1],
                vec![1, 1, 0, 0],
                vec![0, 0, 1, 1],
                vec![1, 2, 1, 2],
            ],
        )
        .unwrap();
        assert_eq!(rref(&b7).rank, 4);

        let ones = FieldMatrix::new(gf(3), 6, vec![vec![1; 6]]).unwrap();
        assert_eq!(rref(&ones).rank, 1);
    }

    #[test]
    fn null_space_examples() {
        let ones = FieldMatrix::new(gf(3), 5, vec![vec![1; 5]]).unwrap();
        assert_eq!(null_space_basis(&ones).nrows(), 4);

        let id = FieldMatrix::identity(gf(3), 4);
        let ns = null_space_basis(&id);
        assert_eq!(ns.nrows(), 0);
        assert_eq!(ns.ncols(), 4);

        let e12 = FieldMatrix::new(gf(3), 4, vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap();
        let ns = null_space_basis(&e12);
        assert_eq!(ns.nrows(), 2);
        for r in ns.rows() {
            assert_eq!(&r[..2], &[0, 0]);
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = FieldMatrix::new(gf(5), 3, vec![vec![1, 2, 0], vec![0, 1, 4], vec![3, 0, 2]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), FieldMatrix::identity(gf(5), 3));
        let sing = FieldMatrix::new(gf(5), 2, vec![vec![1, 2], vec![2, 4]]).unwrap();
        assert!(sing.inverse().is_none());
    }

    fn arb_matrix() -> impl Strategy<Value = FieldMatrix> {
        (prop::sample::select(vec![2u32, 3, 5, 7]), 1usize..=9, 1usize..=9).prop_flat_map(|(p, r, c)| {
            prop::collection::vec(prop::collection::vec(0..p, c), r)
                .prop_map(move |rows| FieldMatrix::new(gf(p), c, rows).unwrap())
        })
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(m in arb_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_nullity(m in arb_matrix()) {
            let ns = null_space_basis(&m);
            prop_assert_eq!(ns.nrows() + m.rank(), m.ncols());
            // every basis vector really is in the kernel
            for v in ns.rows() {
                for r in m.rows() {
                    prop_assert_eq!(dot_raw(m.modulus(), r, v), 0);
                }
            }
        }

        #[test]
        fn rref_idempotent(m in arb_matrix()) {
            let once = rref(&m).reduced;
            let twice = rref(&once).reduced;
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn dot_symmetric_bilinear(
            p in prop::sample::select(vec![2u32, 3, 5, 7]),
            raw in prop::collection::vec((0u32..7, 0u32..7, 0u32..7), 1..8),
            a in 0u32..7,
        ) {
            let f = gf(p);
            let u = FieldVector::new(f, raw.iter().map(|t| t.0).collect()).unwrap();
            let v = FieldVector::new(f, raw.iter().map(|t| t.1).collect()).unwrap();
            let w = FieldVector::new(f, raw.iter().map(|t| t.2).collect()).unwrap();
            prop_assert_eq!(dot(&u, &v).unwrap(), dot(&v, &u).unwrap());
            let au_plus_w = FieldVector::new(
                f,
                u.coords().iter().zip(w.coords()).map(|(&x, &y)| f.add(f.mul(a % p, x), y)).collect(),
            ).unwrap();
            let lhs = dot(&au_plus_w, &v).unwrap();
            let rhs = f.add(f.mul(a % p, dot(&u, &v).unwrap()), dot(&w, &v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
