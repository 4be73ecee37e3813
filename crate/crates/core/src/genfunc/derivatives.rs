//! `a_n(1)`, `a'_n(1)`, `a''_n(1)` from single-index recurrences.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::CoefficientTable;

/// Values at `z = 1` of `a_n`, `a_n'` and `a_n''`, indexed from `n = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativeSeries {
    pub a: Vec<BigUint>,
    pub d1: Vec<BigUint>,
    pub d2: Vec<BigUint>,
}

impl DerivativeSeries {
    pub fn order(&self) -> usize {
        self.a.len()
    }

    /// The same values as moment sums of a bivariate table.
    pub fn from_table(table: &CoefficientTable) -> Self {
        let rows = table.rows();
        DerivativeSeries {
            a: rows.iter().map(|r| r.total()).collect(),
            d1: rows.iter().map(|r| r.moment(1)).collect(),
            d2: rows.iter().map(|r| r.falling_moment2()).collect(),
        }
    }
}

/// Runs the recurrences
///
/// ```text
/// n a_{n+1}  = sum_j j a_j sum_{k <= n/j} a_{n+1-kj}
/// a'_{n+1}   = sum_j a'_j sum_{k <= n/j} a_{n+1-kj}
/// a''_{n+1}  = sum_j [ a'_j sum_{k <= (n-1)/j} a'_{n+1-kj}
///                    + a'_j sum_{k <= n/j} (k-1) a_{n+1-kj}
///                    + a''_j sum_{k <= n/j} k a_{n+1-kj} ]
/// ```
///
/// from `a_1 = a'_1 = 1`, `a''_1 = 0`.
pub fn derivative_coeffs(order: usize) -> DerivativeSeries {
    let order = order.max(1);
    // 1-based with a dummy slot 0
    let mut a = vec![BigUint::zero(), BigUint::one()];
    let mut d1 = vec![BigUint::zero(), BigUint::one()];
    let mut d2 = vec![BigUint::zero(), BigUint::zero()];
    for n in 1..order {
        let mut s0 = BigUint::zero();
        let mut s1 = BigUint::zero();
        let mut s2 = BigUint::zero();
        for j in 1..=n {
            let mut plain = BigUint::zero();
            let mut weighted = BigUint::zero();
            let mut shifted = BigUint::zero();
            let mut first = BigUint::zero();
            for k in 1..=n / j {
                let v = &a[n + 1 - k * j];
                plain += v;
                weighted += v * BigUint::from(k as u64);
                shifted += v * BigUint::from(k as u64 - 1);
                if k <= (n - 1) / j {
                    first += &d1[n + 1 - k * j];
                }
            }
            s0 += &a[j] * BigUint::from(j as u64) * &plain;
            s1 += &d1[j] * &plain;
            s2 += &d1[j] * (first + shifted) + &d2[j] * weighted;
        }
        let (q, r) = s0.div_rem(&BigUint::from(n as u64));
        debug_assert!(r.is_zero());
        a.push(q);
        d1.push(s1);
        d2.push(s2);
    }
    a.remove(0);
    d1.remove(0);
    d2.remove(0);
    DerivativeSeries { a, d1, d2 }
}
