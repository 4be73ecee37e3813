//! Exact leaf-count polynomials `a_n(z) = sum_k a_{n,k} z^k`.
//!
//! The recurrence
//!
//! ```text
//! n a_{n+1}(z) = sum_{j=1}^{n} j sum_{k=1}^{n/j} a_j(z^k) ã_{n+1-jk}(z)
//! ```
//!
//! is regrouped by `i = jk` into `n a_{n+1} = sum_i c_i ã_{n+1-i}` with
//! `c_i(z) = sum_{j | i} j a_j(z^{i/j})`. Each polynomial is packed into one
//! big integer with fixed-width slots (Kronecker substitution), so a row costs
//! `n` big-integer products instead of `O(n^3)` coefficient products. Slots
//! never overflow because every partial sum is bounded by the final
//! coefficient `n a_{n+1,k}`.

mod cache;
mod derivatives;
mod eval;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub use cache::{read_table, write_table, CacheError};
pub use derivatives::{derivative_coeffs, DerivativeSeries};
pub use eval::{eval_T, eval_h, eval_h_at_one, Partials, RealTable, SeriesValue};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GenfuncError {
    #[error("series truncation needs order {required}, table has {available}")]
    InsufficientOrder { required: usize, available: usize },
    #[error("evaluation point ({x}, {z}) is outside the region where the series is summable")]
    OutsideDomain { x: f64, z: f64 },
}

/// Coefficients of `a_n(z)`; `coeffs[k - 1] = a_{n,k}` for `1 <= k <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafPolynomial {
    pub n: usize,
    pub coeffs: Vec<BigUint>,
}

impl LeafPolynomial {
    /// `a_{n,k}`; zero outside `1..=n`.
    pub fn get(&self, k: usize) -> BigUint {
        if k == 0 || k > self.n {
            BigUint::zero()
        } else {
            self.coeffs[k - 1].clone()
        }
    }

    /// `a_n(1)`, the number of rooted trees on `n` vertices.
    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    /// `a_n^+(1) = sum_{k > n/2} a_{n,k}`.
    pub fn upper_half(&self) -> BigUint {
        self.tail_from(self.n / 2 + 1)
    }

    /// `sum_{k >= from} a_{n,k}`.
    pub fn tail_from(&self, from: usize) -> BigUint {
        self.coeffs.iter().skip(from.max(1) - 1).sum()
    }

    /// `sum_k k^p a_{n,k}`.
    pub fn moment(&self, p: u32) -> BigUint {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * BigUint::from(i as u64 + 1).pow(p))
            .sum()
    }

    /// `sum_k k (k - 1) a_{n,k}`.
    pub fn falling_moment2(&self) -> BigUint {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * BigUint::from((i as u64 + 1) * i as u64))
            .sum()
    }
}

/// `a_{n,k}` for `1 <= n <= order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    rows: Vec<LeafPolynomial>,
}

impl CoefficientTable {
    pub(crate) fn from_rows(rows: Vec<LeafPolynomial>) -> Self {
        debug_assert!(rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.n == i + 1 && r.coeffs.len() == r.n));
        CoefficientTable { rows }
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    /// Row `n`, `1 <= n <= order`.
    pub fn row(&self, n: usize) -> &LeafPolynomial {
        &self.rows[n - 1]
    }

    pub fn rows(&self) -> &[LeafPolynomial] {
        &self.rows
    }

    /// `a_{n,k}`; zero outside the table's support.
    pub fn get(&self, n: usize, k: usize) -> BigUint {
        if n == 0 || n > self.order() {
            BigUint::zero()
        } else {
            self.rows[n - 1].get(k)
        }
    }

    /// The first `order` rows.
    pub fn truncated(&self, order: usize) -> CoefficientTable {
        CoefficientTable {
            rows: self.rows[..order.min(self.order())].to_vec(),
        }
    }

    pub fn require(&self, order: usize) -> Result<(), GenfuncError> {
        if order > self.order() {
            Err(GenfuncError::InsufficientOrder {
                required: order,
                available: self.order(),
            })
        } else {
            Ok(())
        }
    }
}

/// Builds `a_1(z), ..., a_N(z)` exactly.
pub fn leaf_polynomials(order: usize) -> CoefficientTable {
    let order = order.max(1);
    // a_{n,k} <= T_n < 3^n, and slots hold n a_{n,k}.
    let need = bits_of(order as u64) + (order as f64 * 3f64.log2()).ceil() as usize + 2;
    let slot = need.div_ceil(32) * 32;
    let words = slot / 32;

    // dense[n] = coefficients of a_n by power of z (index 0 is z^0)
    let mut dense: Vec<Vec<BigUint>> = vec![Vec::new(), vec![BigUint::zero(), BigUint::one()]];
    // packed ã_m and c_i
    let mut tilde: Vec<BigUint> = vec![BigUint::zero(), pack(&[BigUint::one()], words)];
    let mut c_packed: Vec<BigUint> = vec![BigUint::zero()];

    for n in 1..order {
        c_packed.push(pack(&c_poly(&dense, n), words));
        let mut acc = BigUint::zero();
        for i in 1..=n {
            acc += &c_packed[i] * &tilde[n + 1 - i];
        }
        let mut row = unpack(&acc, words, n + 2);
        let divisor = BigUint::from(n as u64);
        for v in row.iter_mut() {
            let (q, r) = v.div_rem(&divisor);
            debug_assert!(r.is_zero(), "row {} not divisible", n + 1);
            *v = q;
        }
        tilde.push(pack(&row, words));
        dense.push(row);
    }

    let rows = (1..=order)
        .map(|n| {
            let mut coeffs: Vec<BigUint> = dense[n].iter().skip(1).take(n).cloned().collect();
            coeffs.resize(n, BigUint::zero());
            LeafPolynomial { n, coeffs }
        })
        .collect();
    CoefficientTable::from_rows(rows)
}

/// `c_i(z) = sum_{j | i} j a_j(z^{i/j})` as dense coefficients.
fn c_poly(dense: &[Vec<BigUint>], i: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); i + 1];
    for j in (1..=i).filter(|j| i.is_multiple_of(*j)) {
        let stretch = i / j;
        let jj = BigUint::from(j as u64);
        for (deg, coef) in dense[j].iter().enumerate() {
            if !coef.is_zero() {
                out[deg * stretch] += coef * &jj;
            }
        }
    }
    out
}

fn bits_of(v: u64) -> usize {
    (64 - v.leading_zeros()) as usize
}

fn pack(coeffs: &[BigUint], words: usize) -> BigUint {
    let mut digits = vec![0u32; coeffs.len() * words];
    for (i, c) in coeffs.iter().enumerate() {
        let d = c.to_u32_digits();
        debug_assert!(d.len() <= words);
        digits[i * words..i * words + d.len()].copy_from_slice(&d);
    }
    BigUint::new(digits)
}

fn unpack(v: &BigUint, words: usize, slots: usize) -> Vec<BigUint> {
    let d = v.to_u32_digits();
    (0..slots)
        .map(|i| {
            let lo = (i * words).min(d.len());
            let hi = ((i + 1) * words).min(d.len());
            BigUint::from_slice(&d[lo..hi])
        })
        .collect()
}

/// `T_n = a_n(1)` for `n = 1..=order`.
pub fn specialize_counts(table: &CoefficientTable) -> Vec<BigUint> {
    table.rows().iter().map(LeafPolynomial::total).collect()
}

/// `a_n^+(1)^{-1/n}` computed in floating point from the exact count.
pub fn upper_half_root(table: &CoefficientTable, n: usize) -> f64 {
    let v = table.row(n).upper_half();
    let bits = v.bits() as f64;
    let shift = (bits - 60.0).max(0.0) as u64;
    let top = (&v >> shift).to_f64().unwrap_or(f64::NAN);
    let log2 = top.log2() + shift as f64;
    (-log2 / n as f64).exp2()
}
