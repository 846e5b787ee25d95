//! Blocking sets of PG(m,p): predicates, span dimension, blocking-matrix
//! properties, normal forms and canonical keys, the GF(2) classification
//! and the projective triangle.

mod gf2;
mod normal;

pub use gf2::{gf2_minimal_sets, gl_order, gaussian_binomial, Gf2Classification};
pub(crate) use normal::Combinations;
pub use normal::{canonical_form, canonical_key, normal_form, CanonicalForm, CanonicalKey, NormalForm, ORBIT_CAP};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gflin::{dot_raw, rank_of_rows, FieldMatrix, PrimeModulus};
use crate::par;
use crate::projgeom::{normalize_coords, Hyperplane, ProjectivePoint, SpaceDescriptor};

/// A nonempty, duplicate-free, ordered set of points of one space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    space: SpaceDescriptor,
    points: Vec<ProjectivePoint>,
}

impl PointSet {
    pub fn new(space: SpaceDescriptor, points: Vec<ProjectivePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let mut seen = std::collections::HashSet::with_capacity(points.len());
        for pt in &points {
            if pt.modulus() != space.modulus() {
                return Err(Error::ModulusMismatch(space.modulus().get(), pt.modulus().get()));
            }
            if pt.coords().len() != space.vector_len() {
                return Err(Error::DimensionMismatch { expected: space.vector_len(), got: pt.coords().len() });
            }
            if !seen.insert(pt) {
                return Err(Error::DuplicatePoint(pt.to_string()));
            }
        }
        Ok(PointSet { space, points })
    }

    /// Builds a point set from signed coordinate rows (any representatives).
    pub fn from_signed_rows(space: SpaceDescriptor, rows: &[Vec<i64>]) -> Result<Self> {
        let pts = rows
            .iter()
            .map(|r| ProjectivePoint::from_signed(space.modulus(), r))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(space, pts)
    }

    /// Points given by global indices of `space`.
    pub fn from_indices(space: SpaceDescriptor, indices: &[u64]) -> Result<Self> {
        PointSet::new(space, indices.iter().map(|&i| space.point_at(i)).collect())
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.space
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.space.modulus()
    }

    pub fn points(&self) -> &[ProjectivePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn indices(&self) -> Vec<u64> {
        self.points.iter().map(|x| self.space.index_of(x.coords())).collect()
    }

    /// Same points, sorted by global index.
    pub fn sorted(&self) -> PointSet {
        let mut points = self.points.clone();
        points.sort();
        PointSet { space: self.space, points }
    }

    pub fn blocking_matrix(&self) -> BlockingMatrix {
        BlockingMatrix {
            matrix: FieldMatrix::from_reduced(
                self.modulus(),
                self.space.vector_len(),
                self.points.iter().map(|x| x.coords().to_vec()).collect(),
            ),
        }
    }

    /// Image under the column transform `x ↦ x·g` (a change of coordinates).
    pub fn transform(&self, g: &FieldMatrix) -> Result<PointSet> {
        let n = self.space.vector_len();
        if g.nrows() != n || g.ncols() != n || g.inverse().is_none() {
            return Err(Error::InvalidArgument("transform must be an invertible (m+1)x(m+1) matrix".into()));
        }
        let image = self.blocking_matrix().matrix.mul(g)?;
        let pts = image
            .rows()
            .iter()
            .map(|r| ProjectivePoint::from_canonical(self.modulus(), normalize_coords(self.modulus(), r).expect("invertible")))
            .collect();
        PointSet::new(self.space, pts)
    }
}

/// A matrix whose rows generate the points of a point set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockingMatrix {
    matrix: FieldMatrix,
}

impl BlockingMatrix {
    pub fn new(matrix: FieldMatrix) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::EmptyPointSet);
        }
        if matrix.rows().iter().any(|r| r.iter().all(|&c| c == 0)) {
            return Err(Error::ZeroVector);
        }
        Ok(BlockingMatrix { matrix })
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.matrix.modulus()
    }

    /// The points generated by the rows. Fails if two rows generate the same point.
    pub fn point_set(&self) -> Result<PointSet> {
        let space = SpaceDescriptor::new(self.matrix.ncols() - 1, self.modulus())?;
        let p = self.modulus();
        let pts = self
            .matrix
            .rows()
            .iter()
            .map(|r| ProjectivePoint::from_canonical(p, normalize_coords(p, r).expect("nonzero row")))
            .collect();
        PointSet::new(space, pts)
    }
}

/// Projective dimension of the span, `rank(A) - 1`.
pub fn span_dimension(b: &PointSet) -> usize {
    let rows: Vec<&[u32]> = b.points.iter().map(|x| x.coords()).collect();
    rank_of_rows(b.modulus(), &rows) - 1
}

const SCAN_CHUNK: u64 = 2048;

/// True iff every hyperplane meets `b`. Scans hyperplanes in index order.
pub fn is_blocking(b: &PointSet) -> bool {
    is_blocking_with_threads(b, 1)
}

pub fn is_blocking_with_threads(b: &PointSet, threads: usize) -> bool {
    let space = b.space;
    let p = space.modulus();
    let chunks = par::chunk_ranges(space.point_count(), SCAN_CHUNK);
    let misses = par::map_ordered(&chunks, threads, |_, range| {
        range.clone().any(|h| {
            let hc = space.coords_at(h);
            b.points.iter().all(|x| dot_raw(p, &hc, x.coords()) != 0)
        })
    });
    !misses.into_iter().any(|m| m)
}

/// Property (a) route: `A·X` has a zero entry for every column vector `X`.
pub fn is_blocking_by_matrix(b: &PointSet) -> bool {
    matrix_properties(&b.blocking_matrix()).property_a
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixProperties {
    pub property_a: bool,
    pub property_b: bool,
}

/// Evaluates properties (a) and (b) by scanning every `X ∈ GF(p)^{m+1}`.
///
/// (a): every `A·X` has a zero entry. (b): for each row `i` some `X_i`
/// makes entry `i` of `A·X_i` the only zero.
pub fn matrix_properties(a: &BlockingMatrix) -> MatrixProperties {
    let m = &a.matrix;
    let p = m.modulus();
    let cols = m.ncols();
    let mut x = vec![0u32; cols];
    let mut property_a = true;
    let mut has_x_i = vec![false; m.nrows()];
    loop {
        let mut zeros = 0usize;
        let mut last_zero = 0usize;
        for (i, r) in m.rows().iter().enumerate() {
            if dot_raw(p, r, &x) == 0 {
                zeros += 1;
                last_zero = i;
            }
        }
        match zeros {
            0 => property_a = false,
            1 => has_x_i[last_zero] = true,
            _ => {}
        }
        // next X in base-p counting order
        let mut k = 0;
        while k < cols {
            x[k] += 1;
            if x[k] == p.get() {
                x[k] = 0;
                k += 1;
            } else {
                break;
            }
        }
        if k == cols {
            break;
        }
    }
    MatrixProperties { property_a, property_b: has_x_i.iter().all(|&b| b) }
}

/// Blocking and minimality verdict with per-point tangent witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalityReport {
    pub is_blocking: bool,
    pub is_minimal: bool,
    /// First hyperplane (index order) missing the set, when not blocking.
    pub uncovered: Option<Hyperplane>,
    /// First hyperplane meeting the set exactly in point `i`.
    pub tangent_witnesses: Vec<Option<Hyperplane>>,
    /// Points without a tangent hyperplane (each is redundant when blocking).
    pub redundant_points: Vec<ProjectivePoint>,
}

pub fn minimality_report(b: &PointSet) -> MinimalityReport {
    minimality_report_with_threads(b, 1)
}

pub fn minimality_report_with_threads(b: &PointSet, threads: usize) -> MinimalityReport {
    let space = b.space;
    let p = space.modulus();
    let n = b.len();
    let chunks = par::chunk_ranges(space.point_count(), SCAN_CHUNK);
    // per chunk: first uncovered hyperplane and first tangent hyperplane per point
    let partial = par::map_ordered(&chunks, threads, |_, range| {
        let mut uncovered = None;
        let mut tangents: Vec<Option<u64>> = vec![None; n];
        for h in range.clone() {
            let hc = space.coords_at(h);
            let mut count = 0;
            let mut which = 0;
            for (i, x) in b.points.iter().enumerate() {
                if dot_raw(p, &hc, x.coords()) == 0 {
                    count += 1;
                    which = i;
                    if count > 1 {
                        break;
                    }
                }
            }
            match count {
                0 if uncovered.is_none() => uncovered = Some(h),
                1 if tangents[which].is_none() => tangents[which] = Some(h),
                _ => {}
            }
        }
        (uncovered, tangents)
    });
    let mut uncovered = None;
    let mut tangents: Vec<Option<u64>> = vec![None; n];
    for (u, t) in partial {
        uncovered = uncovered.or(u);
        for (slot, found) in tangents.iter_mut().zip(t) {
            *slot = slot.or(found);
        }
    }
    let is_blocking = uncovered.is_none();
    let redundant_points = if is_blocking {
        b.points.iter().zip(&tangents).filter(|(_, t)| t.is_none()).map(|(x, _)| x.clone()).collect()
    } else {
        Vec::new()
    };
    let is_minimal = is_blocking && tangents.iter().all(Option::is_some);
    MinimalityReport {
        is_blocking,
        is_minimal,
        uncovered: uncovered.map(|h| space.point_at(h).as_hyperplane()),
        tangent_witnesses: tangents.into_iter().map(|t| t.map(|h| space.point_at(h).as_hyperplane())).collect(),
        redundant_points,
    }
}

/// The projective triangle `{(0,1,-s²), (1,-s²,0), (-s²,0,1) : s ∈ GF(p)}`,
/// sorted by global index. It has `3(p+1)/2` points.
pub fn projective_triangle(p: PrimeModulus) -> Result<PointSet> {
    if p.get() == 2 {
        return Err(Error::EvenCharacteristic);
    }
    let space = SpaceDescriptor::new(2, p)?;
    let mut pts = std::collections::BTreeSet::new();
    for s in 0..p.get() {
        let t = p.neg(p.mul(s, s)) as i64;
        for v in [[0, 1, t], [1, t, 0], [t, 0, 1]] {
            pts.insert(ProjectivePoint::from_signed(p, &v)?);
        }
    }
    PointSet::new(space, pts.into_iter().collect())
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn gf(p: u32) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    pub fn set(m: usize, p: u32, rows: &[&[i64]]) -> PointSet {
        let space = SpaceDescriptor::new(m, gf(p)).unwrap();
        PointSet::from_signed_rows(space, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    pub fn b7() -> PointSet {
        set(
            3,
            3,
            &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 1, 0, 0], &[0, 0, 1, 1], &[1, -1, 1, -1]],
        )
    }

    pub fn b8() -> PointSet {
        set(
            3,
            3,
            &[
                &[1, 0, 0, 0],
                &[0, 1, 0, 0],
                &[0, 0, 1, 0],
                &[0, 0, 0, 1],
                &[1, 1, 0, 0],
                &[0, 0, 1, 1],
                &[2, 0, 1, 0],
                &[1, 1, 0, 2],
            ],
        )
    }

    pub fn plane_line_3() -> PointSet {
        set(2, 3, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[1, 2, 0]])
    }
}
