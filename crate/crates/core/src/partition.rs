//! Partitions, Jordan types of nilpotent matrices, and the dominance order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Field, Matrix};

/// Weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Zero parts are dropped; the remaining parts must be weakly decreasing.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        let parts: Vec<usize> = parts.into_iter().filter(|&p| p > 0).collect();
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Invalid(format!("parts not weakly decreasing: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=cols)
            .map(|j| self.parts.iter().filter(|&&p| p >= j).count())
            .collect();
        Partition { parts }
    }
}

/// Dominance order: lambda <= mu iff all partial sums of lambda are <= those
/// of mu. Requires equal totals.
pub fn dominance_leq(lambda: &Partition, mu: &Partition) -> Result<bool> {
    if lambda.total() != mu.total() {
        return Err(Error::TotalMismatch);
    }
    let len = lambda.parts.len().max(mu.parts.len());
    let mut sl = 0usize;
    let mut sm = 0usize;
    for i in 0..len {
        sl += lambda.parts.get(i).copied().unwrap_or(0);
        sm += mu.parts.get(i).copied().unwrap_or(0);
        if sl > sm {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Jordan type of a nilpotent matrix, from the rank sequence of its powers:
/// the conjugate partition has parts rank(X^{j-1}) - rank(X^j).
pub fn jordan_type_nilpotent<T: Field>(x: &Matrix<T>) -> Result<Partition> {
    if !x.is_square() {
        return Err(Error::Dim("Jordan type of a non-square matrix".into()));
    }
    let n = x.rows;
    if !x.pow(n).is_zero_matrix() {
        return Err(Error::NotNilpotent);
    }
    let mut conj = Vec::new();
    let mut power = Matrix::identity(n);
    let mut prev_rank = n;
    while prev_rank > 0 {
        power = &power * x;
        let r = power.rank();
        conj.push(prev_rank - r);
        prev_rank = r;
    }
    Ok(Partition { parts: conj }.conjugate())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn qm(n: usize, v: &[i64]) -> Matrix<Q> {
        Matrix::new(n, n, v.iter().map(|&x| Q::from_integer(x.into())).collect()).unwrap()
    }

    fn shift(n: usize) -> Matrix<Q> {
        Matrix::from_fn(n, n, |i, j| {
            if j == i + 1 {
                Q::from_integer(1.into())
            } else {
                Q::from_integer(0.into())
            }
        })
    }

    #[test]
    fn single_block() {
        assert_eq!(jordan_type_nilpotent(&shift(5)).unwrap().parts(), &[5]);
    }

    #[test]
    fn two_blocks_of_two() {
        let x = qm(4, &[0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(jordan_type_nilpotent(&x).unwrap().parts(), &[2, 2]);
    }

    #[test]
    fn non_nilpotent_rejected() {
        let x = qm(2, &[1, 0, 0, 0]);
        assert!(matches!(jordan_type_nilpotent(&x), Err(Error::NotNilpotent)));
    }

    #[test]
    fn dominance_examples() {
        let p = |v: &[usize]| Partition::new(v.to_vec()).unwrap();
        assert!(dominance_leq(&p(&[2, 2]), &p(&[3, 1])).unwrap());
        assert!(!dominance_leq(&p(&[3, 1]), &p(&[2, 2])).unwrap());
        assert!(dominance_leq(&p(&[4, 2]), &p(&[6])).unwrap());
        assert!(dominance_leq(&p(&[]), &p(&[])).unwrap());
        assert!(matches!(dominance_leq(&p(&[2]), &p(&[3])), Err(Error::TotalMismatch)));
    }

    #[test]
    fn rank_sequence_matches_conjugate() {
        // rank(X^j) = sum_{i>j} of conjugate parts.
        let x = qm(4, &[0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0]);
        let lam = jordan_type_nilpotent(&x).unwrap();
        let conj = lam.conjugate();
        for j in 0..=4usize {
            let rank_j = x.pow(j).rank();
            let expect: usize = conj.parts().iter().skip(j).sum();
            assert_eq!(rank_j, expect);
        }
    }

    fn arb_partition(max_total: usize) -> impl Strategy<Value = Partition> {
        proptest::collection::vec(1usize..=4, 0..=4).prop_map(move |mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            let mut total = 0;
            v.retain(|&p| {
                total += p;
                total <= max_total
            });
            Partition::new(v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn prop_dominance_partial_order(a in arb_partition(12), b in arb_partition(12), c in arb_partition(12)) {
            // Reflexive.
            prop_assert!(dominance_leq(&a, &a).unwrap());
            // Antisymmetric and transitive where comparable.
            if a.total() == b.total() {
                let ab = dominance_leq(&a, &b).unwrap();
                let ba = dominance_leq(&b, &a).unwrap();
                if ab && ba {
                    prop_assert_eq!(&a, &b);
                }
                if b.total() == c.total() {
                    let bc = dominance_leq(&b, &c).unwrap();
                    if ab && bc {
                        prop_assert!(dominance_leq(&a, &c).unwrap());
                    }
                }
            }
            // Conjugation is an involution.
            prop_assert_eq!(a.conjugate().conjugate(), a);
        }
    }
}
