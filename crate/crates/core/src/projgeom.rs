//! Points and hyperplanes of PG(m,p).
//!
//! A point is stored as its canonical representative: the leftmost nonzero
//! coordinate is 1. Points are totally ordered lexicographically by
//! coordinates (`0 < 1 < ... < p-1`), and the rank in that order is the
//! point's global index. Hyperplanes use the same representation through
//! `x ↦ {y : x·y = 0}`, so they share the index space.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gflin::{FieldVector, PrimeModulus};

/// The projective space PG(m,p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    m: usize,
    modulus: PrimeModulus,
}

impl SpaceDescriptor {
    pub fn new(m: usize, modulus: PrimeModulus) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDimension("PG(0,p) has no hyperplanes".into()));
        }
        if modulus.checked_power(m as u32 + 1).is_none() {
            return Err(Error::InvalidDimension(format!("PG({m},{modulus}) overflows 64-bit indices")));
        }
        Ok(SpaceDescriptor { m, modulus })
    }

    pub fn dimension(&self) -> usize {
        self.m
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    /// Length of a coordinate vector, `m + 1`.
    pub fn vector_len(&self) -> usize {
        self.m + 1
    }

    /// `(p^{m+1} - 1) / (p - 1)`.
    pub fn point_count(&self) -> u64 {
        let p = self.modulus.get() as u64;
        (p.pow(self.m as u32 + 1) - 1) / (p - 1)
    }

    /// Number of points whose leading 1 sits strictly right of `lead`.
    fn offset(&self, lead: usize) -> u64 {
        let p = self.modulus.get() as u64;
        (p.pow((self.m - lead) as u32) - 1) / (p - 1)
    }

    /// Global index of canonical coordinates.
    pub fn index_of(&self, coords: &[u32]) -> u64 {
        debug_assert_eq!(coords.len(), self.m + 1);
        let lead = coords.iter().position(|&c| c != 0).expect("nonzero point");
        debug_assert_eq!(coords[lead], 1);
        let p = self.modulus.get() as u64;
        let tail = coords[lead + 1..].iter().fold(0u64, |acc, &c| acc * p + c as u64);
        self.offset(lead) + tail
    }

    /// Canonical coordinates of the point with global index `idx`.
    pub fn coords_at(&self, idx: u64) -> Vec<u32> {
        debug_assert!(idx < self.point_count());
        let p = self.modulus.get() as u64;
        let lead = (0..=self.m)
            .rev()
            .find(|&i| idx < self.offset(i) + p.pow((self.m - i) as u32))
            .expect("index in range");
        let mut tail = idx - self.offset(lead);
        let mut coords = vec![0u32; self.m + 1];
        coords[lead] = 1;
        for slot in coords[lead + 1..].iter_mut().rev() {
            *slot = (tail % p) as u32;
            tail /= p;
        }
        coords
    }

    pub fn point_at(&self, idx: u64) -> ProjectivePoint {
        ProjectivePoint(FieldVector::from_reduced(self.modulus, self.coords_at(idx)))
    }

    /// Canonical coordinates of every point, in global index order.
    pub fn point_coords(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.point_count()).map(move |i| self.coords_at(i))
    }

    pub fn contains(&self, pt: &ProjectivePoint) -> bool {
        pt.modulus() == self.modulus && pt.coords().len() == self.m + 1
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PG({},{})", self.m, self.modulus)
    }
}

/// A point of PG(m,p) in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint(FieldVector);

impl ProjectivePoint {
    pub fn vector(&self) -> &FieldVector {
        &self.0
    }

    pub fn coords(&self) -> &[u32] {
        self.0.coords()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.0.modulus()
    }

    pub fn weight(&self) -> usize {
        self.0.weight()
    }

    /// Builds a point from signed coordinates, normalizing.
    pub fn from_signed(modulus: PrimeModulus, coords: &[i64]) -> Result<Self> {
        normalize_point(&FieldVector::from_signed(modulus, coords)?)
    }

    pub(crate) fn from_canonical(modulus: PrimeModulus, coords: Vec<u32>) -> Self {
        debug_assert_eq!(coords.iter().find(|&&c| c != 0), Some(&1));
        ProjectivePoint(FieldVector::from_reduced(modulus, coords))
    }

    pub fn as_hyperplane(&self) -> Hyperplane {
        Hyperplane { dual: self.clone() }
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The hyperplane `{x : dual·x = 0}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    pub dual: ProjectivePoint,
}

impl Hyperplane {
    pub fn new(dual: ProjectivePoint) -> Self {
        Hyperplane { dual }
    }

    pub fn as_point(&self) -> ProjectivePoint {
        self.dual.clone()
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.dual)
    }
}

/// Scales `v` so its leftmost nonzero coordinate is 1.
pub fn normalize_point(v: &FieldVector) -> Result<ProjectivePoint> {
    Ok(ProjectivePoint(FieldVector::from_reduced(
        v.modulus(),
        normalize_coords(v.modulus(), v.coords()).ok_or(Error::ZeroVector)?,
    )))
}

pub(crate) fn normalize_coords(p: PrimeModulus, v: &[u32]) -> Option<Vec<u32>> {
    let lead = *v.iter().find(|&&c| c != 0)?;
    if lead == 1 {
        return Some(v.to_vec());
    }
    let inv = p.inv(lead);
    Some(v.iter().map(|&c| p.mul(c, inv)).collect())
}

/// All points of the space, sorted by global index.
pub fn enumerate_points(space: &SpaceDescriptor) -> Vec<ProjectivePoint> {
    space
        .point_coords()
        .map(|c| ProjectivePoint(FieldVector::from_reduced(space.modulus(), c)))
        .collect()
}

pub fn incident(h: &Hyperplane, pt: &ProjectivePoint) -> Result<bool> {
    Ok(crate::gflin::dot(h.dual.vector(), pt.vector())? == 0)
}
