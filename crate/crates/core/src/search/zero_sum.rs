use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gflin::{FieldVector, PrimeModulus};

/// Nonzero vectors of length `len` with coordinate sum 0, one per class under
/// coordinate permutation and global nonzero scaling.
///
/// The representative of a class is its least sorted form. Output is sorted.
pub fn zero_sum_canonical_vectors(p: PrimeModulus, len: usize) -> Result<Vec<FieldVector>> {
    if len < 2 {
        return Err(Error::InvalidArgument("length must be at least 2".into()));
    }
    let q = p.get() as usize;
    // a class under permutation is a multiset, i.e. a count per nonzero value
    let mut reps = BTreeSet::new();
    let mut counts = vec![0usize; q];
    multisets(q, len, 1, &mut counts, &mut |c| {
        let total: usize = c.iter().sum();
        let sum: usize = c.iter().enumerate().map(|(v, &k)| v * k).sum();
        if total == 0 || !sum.is_multiple_of(q) {
            return;
        }
        let best = (1..q as u32)
            .map(|lambda| {
                let mut v: Vec<u32> = vec![0; len - total];
                for (val, &k) in c.iter().enumerate().skip(1) {
                    v.extend(std::iter::repeat_n(p.mul(val as u32, lambda), k));
                }
                v.sort_unstable();
                v
            })
            .min()
            .expect("p >= 2");
        reps.insert(best);
    });
    Ok(reps.into_iter().map(|v| FieldVector::new(p, v).expect("reduced")).collect())
}

/// Calls `f` with every assignment of counts to values `from..q` whose total is at most `left`.
fn multisets(q: usize, left: usize, from: usize, counts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if from == q {
        f(counts);
        return;
    }
    for k in 0..=left {
        counts[from] = k;
        multisets(q, left - k, from + 1, counts, f);
    }
    counts[from] = 0;
}
