use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Exponent vector of a monomial `z₁^{e₁}⋯z_m^{e_m}`.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// of the earliest variable in *decreasing* order, so the ascending list in
/// two variables reads `1, x, y, x², xy, y², …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zero(m: usize) -> Self {
        Self(vec![0; m])
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Evaluate `z^α`.
    pub fn eval(&self, z: &[crate::C64]) -> crate::C64 {
        self.0.iter().zip(z).fold(crate::C64::new(1.0, 0.0), |acc, (&e, &zi)| acc * zi.powu(e))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `dₙ = C(m+n, n)`, the dimension of polynomials of degree ≤ n in m variables.
pub fn space_dimension(m: usize, n: usize) -> Result<usize> {
    if m == 0 {
        return Err(Error::InvalidParameter("number of variables must be positive".into()));
    }
    let k = m.min(n) as u128;
    let top = (m as u128).checked_add(n as u128).ok_or_else(|| Error::Overflow(format!("C({m}+{n}, {n})")))?;
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c.checked_mul(top - k + i).ok_or_else(|| Error::Overflow(format!("C({m}+{n}, {n})")))? / i;
    }
    usize::try_from(c).map_err(|_| Error::Overflow(format!("C({m}+{n}, {n})")))
}

/// All multi-indices in `m` variables of total degree ≤ `n`, in basis order.
pub fn monomials_up_to(m: usize, n: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for d in 0..=n as u32 {
        let mut cur = vec![0u32; m];
        push_compositions(d, 0, &mut cur, &mut out);
    }
    out
}

fn push_compositions(rest: u32, pos: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    let m = cur.len();
    if pos + 1 == m {
        cur[pos] = rest;
        out.push(MultiIndex(cur.clone()));
        return;
    }
    for e in (0..=rest).rev() {
        cur[pos] = e;
        push_compositions(rest - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dimensions() {
        assert_eq!(space_dimension(1, 5).unwrap(), 6);
        assert_eq!(space_dimension(2, 3).unwrap(), 10);
        assert_eq!(space_dimension(3, 0).unwrap(), 1);
    }

    #[test]
    fn dimension_overflow_is_explicit() {
        assert!(matches!(space_dimension(200, 200), Err(Error::Overflow(_))));
        assert!(matches!(space_dimension(usize::MAX, 2), Err(Error::Overflow(_))));
    }

    #[test]
    fn two_variable_order() {
        let ms = monomials_up_to(2, 2);
        let e: Vec<Vec<u32>> = ms.iter().map(|m| m.0.clone()).collect();
        assert_eq!(e, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    proptest! {
        #[test]
        fn listing_is_sorted_and_complete(m in 1usize..4, n in 0usize..7) {
            let ms = monomials_up_to(m, n);
            prop_assert_eq!(ms.len(), space_dimension(m, n).unwrap());
            for w in ms.windows(2) {
                prop_assert!(w[0] < w[1]);
            }
        }
    }
}
