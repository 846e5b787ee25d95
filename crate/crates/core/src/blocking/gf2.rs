//! Closed-form classification of minimal blocking sets of PG(m,2).
//!
//! A minimal blocking set spanning a `d`-subspace exists iff `d` is odd, and
//! then it is a frame of that subspace: `d+2` points, no `d+1` of them on a
//! common hyperplane of the subspace. Every such set is equivalent to
//! `{e_1, …, e_{d+1}, e_1+…+e_{d+1}}`.

use serde::Serialize;

use super::PointSet;
use crate::error::{Error, Result};
use crate::gflin::PrimeModulus;
use crate::projgeom::SpaceDescriptor;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Gf2Classification {
    pub m: usize,
    pub d: usize,
    pub exists: bool,
    /// `d + 2` when sets exist.
    pub size: Option<usize>,
    #[serde(skip)]
    pub representative: Option<PointSet>,
    /// Number of minimal blocking sets of PG(d,2) spanning the whole space,
    /// `|GL(d+1,2)| / (d+2)!`. Reported when `d == m`.
    pub spanning_count: Option<u128>,
    /// Number of minimal blocking sets of PG(m,2) whose span has dimension `d`.
    pub count_in_space: Option<u128>,
}

/// `|GL(n,2)| = Π_{i<n} (2^n - 2^i)`, `None` on overflow.
pub fn gl_order(n: usize, q: u128) -> Option<u128> {
    let qn = q.checked_pow(n as u32)?;
    (0..n).try_fold(1u128, |acc, i| acc.checked_mul(qn - q.pow(i as u32)))
}

/// Number of `k`-dimensional subspaces of `GF(q)^n`.
pub fn gaussian_binomial(n: usize, k: usize, q: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num = num.checked_mul(q.checked_pow((n - i) as u32)? - 1)?;
        den = den.checked_mul(q.checked_pow((i + 1) as u32)? - 1)?;
    }
    Some(num / den)
}

pub fn gf2_minimal_sets(m: usize, d: usize) -> Result<Gf2Classification> {
    if d < 1 || d > m {
        return Err(Error::InvalidArgument(format!("need 1 <= d <= m, got d = {d}, m = {m}")));
    }
    if d.is_multiple_of(2) {
        return Ok(Gf2Classification {
            m,
            d,
            exists: false,
            size: None,
            representative: None,
            spanning_count: (d == m).then_some(0),
            count_in_space: Some(0),
        });
    }
    let two = PrimeModulus::new(2)?;
    let space = SpaceDescriptor::new(m, two)?;
    let width = m + 1;
    let mut rows: Vec<Vec<i64>> = (0..=d).map(|i| (0..width).map(|j| i64::from(i == j)).collect()).collect();
    rows.push((0..width).map(|j| i64::from(j <= d)).collect());
    let representative = PointSet::from_signed_rows(space, &rows)?;

    let factorial: u128 = (1..=(d as u128 + 2)).product();
    let in_subspace = gl_order(d + 1, 2).map(|g| g / factorial);
    let count_in_space = in_subspace.and_then(|c| gaussian_binomial(m + 1, d + 1, 2)?.checked_mul(c));
    Ok(Gf2Classification {
        m,
        d,
        exists: true,
        size: Some(d + 2),
        representative: Some(representative),
        spanning_count: if d == m { in_subspace } else { None },
        count_in_space,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{canonical_key, minimality_report, span_dimension};
    use super::*;

    #[test]
    fn examples() {
        let c = gf2_minimal_sets(3, 3).unwrap();
        assert!(c.exists);
        let rep = c.representative.unwrap();
        let coords: Vec<&[u32]> = rep.points().iter().map(|x| x.coords()).collect();
        assert_eq!(coords, vec![&[1, 0, 0, 0][..], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 1, 1, 1]]);
        assert_eq!(c.spanning_count, Some(168));

        let even = gf2_minimal_sets(2, 2).unwrap();
        assert!(!even.exists);
        assert_eq!(even.spanning_count, Some(0));

        assert!(gf2_minimal_sets(2, 3).is_err());
        assert!(gf2_minimal_sets(2, 0).is_err());
    }

    #[test]
    fn representatives_are_minimal_and_span_d() {
        for m in 1..=6 {
            for d in (1..=m).step_by(2) {
                let rep = gf2_minimal_sets(m, d).unwrap().representative.unwrap();
                assert_eq!(span_dimension(&rep), d);
                assert!(minimality_report(&rep).is_minimal);
                // embedded copies of the same frame share a key within one space
                let _ = canonical_key(&rep.blocking_matrix()).unwrap();
            }
        }
    }

    #[test]
    fn counting_helpers() {
        assert_eq!(gl_order(2, 2), Some(6));
        assert_eq!(gl_order(4, 2), Some(20160));
        assert_eq!(gaussian_binomial(4, 2, 2), Some(35));
        assert_eq!(gaussian_binomial(3, 1, 2), Some(7));
        // lines of PG(3,2) each carry exactly one minimal blocking set (themselves)
        assert_eq!(gf2_minimal_sets(3, 1).unwrap().count_in_space, Some(35));
    }
}
