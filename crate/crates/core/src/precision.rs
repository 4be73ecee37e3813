//! Numeric contract shared by series evaluation and the solvers.

use crate::real::{bits_for_digits, Real};

/// Largest supported digit request; keeps tolerances inside the `f64` range.
pub const MAX_DIGITS: usize = 250;

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionContext {
    /// Requested significant digits of reported constants.
    pub digits: usize,
    /// Working precision in bits (twice the requested digits plus guard bits).
    pub bits: usize,
    /// Series truncation order, at most the table order.
    pub order: usize,
    /// Absolute tolerance for series tails and Newton steps.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl PrecisionContext {
    /// Context for `digits` significant digits with the automatic order.
    pub fn new(digits: usize) -> Self {
        let digits = digits.clamp(1, MAX_DIGITS);
        PrecisionContext {
            digits,
            bits: bits_for_digits(2 * digits) + 64,
            order: auto_order(digits),
            tolerance: 10f64.powi(-(digits as i32 + 8)),
            max_iterations: 100,
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order.max(1);
        self
    }

    pub fn real(&self, v: f64) -> Real {
        Real::from_f64(v, self.bits)
    }

    pub fn int(&self, v: i64) -> Real {
        Real::from_i64(v, self.bits)
    }

    pub fn tol(&self) -> Real {
        Real::from_f64(self.tolerance, self.bits)
    }

    /// The same request at twice the digits and twice the order.
    pub fn doubled(&self) -> Self {
        PrecisionContext::new(2 * self.digits).with_order(2 * self.order)
    }
}

/// Terms needed for a tail ratio of 0.55 to reach `10^-digits`, plus 32.
pub fn auto_order(digits: usize) -> usize {
    (digits as f64 * std::f64::consts::LN_10 / 0.55f64.ln().abs()).ceil() as usize + 32
}
