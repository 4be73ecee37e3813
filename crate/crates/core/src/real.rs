//! Arbitrary-precision reals.
//!
//! A thin owned wrapper around [`astro_float::BigFloat`] with arithmetic
//! operators. Binary operations round to the larger of the operand
//! precisions, half-to-even. Transcendental functions share a thread-local
//! constants cache.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigUint;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Working precision in bits needed to carry `digits` significant decimal digits.
pub fn bits_for_digits(digits: usize) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize
}

#[derive(Clone)]
pub struct Real(BigFloat, usize);

impl Real {
    pub fn from_u64(v: u64, prec: usize) -> Self {
        Real(BigFloat::from_u64(v, prec), prec)
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        Real(BigFloat::from_i64(v, prec), prec)
    }

    pub fn from_f64(v: f64, prec: usize) -> Self {
        Real(BigFloat::from_f64(v, prec), prec)
    }

    pub fn zero(prec: usize) -> Self {
        Self::from_u64(0, prec)
    }

    pub fn one(prec: usize) -> Self {
        Self::from_u64(1, prec)
    }

    /// Rounds a big integer to `prec` bits.
    pub fn from_biguint(v: &BigUint, prec: usize) -> Self {
        let shift = Real(BigFloat::from_f64(18446744073709551616.0, prec), prec);
        let mut acc = Real::zero(prec);
        for d in v.to_u64_digits().iter().rev() {
            acc = &(&acc * &shift) + &Real::from_u64(*d, prec);
        }
        acc
    }

    /// Parses a decimal literal such as `"0.3383"` or `"-1.5e-3"`.
    pub fn parse(s: &str, prec: usize) -> Option<Self> {
        let v = with_consts(|cc| BigFloat::parse(s, Radix::Dec, prec, RM, cc));
        (!v.is_nan()).then_some(Real(v, prec))
    }

    pub fn prec(&self) -> usize {
        self.1
    }

    pub fn with_prec(&self, prec: usize) -> Self {
        let mut v = self.0.clone();
        if !v.is_zero() {
            v.set_precision(prec, RM).expect("precision change");
        }
        Real(v, prec)
    }

    fn p2(&self, other: &Real) -> usize {
        self.prec().max(other.prec())
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs(), self.1)
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt(self.1, RM), self.1)
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        Real(with_consts(|cc| self.0.exp(p, RM, cc)), p)
    }

    pub fn ln(&self) -> Self {
        let p = self.prec();
        Real(with_consts(|cc| self.0.ln(p, RM, cc)), p)
    }

    /// `self^n`, with `0^0 = 1`.
    pub fn powi(&self, n: usize) -> Self {
        if n == 0 {
            return Real::one(self.prec());
        }
        Real(self.0.powi(n, self.1, RM), self.1)
    }

    /// `self^e` for positive `self`.
    pub fn powf(&self, e: &Real) -> Self {
        (&self.ln() * e).exp()
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        self * &Real::from_u64(k, self.prec())
    }

    pub fn div_u64(&self, k: u64) -> Self {
        self / &Real::from_u64(k, self.prec())
    }

    pub fn recip(&self) -> Self {
        Real(self.0.reciprocal(self.1, RM), self.1)
    }

    pub fn min(self, other: Real) -> Real {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Real) -> Real {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Nearest `f64` (0 on underflow).
    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        let (Some(words), Some(e)) = (self.0.mantissa_digits(), self.0.exponent()) else {
            return f64::NAN;
        };
        let top = *words.last().expect("nonzero mantissa") as f64;
        let next = if words.len() > 1 {
            words[words.len() - 2] as f64 / 18446744073709551616.0
        } else {
            0.0
        };
        let mag = (top + next) * 2f64.powi(e - 64);
        if self.0.is_negative() {
            -mag
        } else {
            mag
        }
    }

    /// `log10 |self|`, finite for any nonzero value (even beyond the `f64` range).
    pub fn log10_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (Some(words), Some(e)) = (self.0.mantissa_digits(), self.0.exponent()) else {
            return f64::NAN;
        };
        let top = *words.last().expect("nonzero mantissa") as f64;
        (top / 18446744073709551616.0).log10() + e as f64 * std::f64::consts::LOG10_2
    }

    /// Decimal digits and exponent: `self = 0.d1d2d3... * 10^exp` with `d1 != 0`.
    fn decimal_digits(&self) -> (bool, Vec<u8>, i64) {
        let text =
            with_consts(|cc| self.0.format(Radix::Dec, RM, cc)).expect("finite value formats");
        let negative = text.starts_with('-');
        let body = text.trim_start_matches(['-', '+']);
        let (mantissa, exp) = body.split_once('e').unwrap_or((body, "0"));
        let exp: i64 = exp.parse().expect("decimal exponent");
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        let mut digits: Vec<u8> = int_part
            .bytes()
            .chain(frac_part.bytes())
            .map(|b| b - b'0')
            .collect();
        // value = int_part.frac_part * 10^exp
        let mut point = int_part.len() as i64 + exp;
        while digits.first() == Some(&0) {
            digits.remove(0);
            point -= 1;
        }
        (negative, digits, point)
    }

    /// Positional decimal string with `sig` significant digits, rounded half to even.
    pub fn to_sig_digits(&self, sig: usize) -> String {
        assert!(sig >= 1);
        if self.0.is_zero() {
            return "0".to_string();
        }
        let (negative, mut digits, mut point) = self.decimal_digits();
        digits.resize(digits.len().max(sig + 1), 0);
        let keep = &digits[..sig];
        let rest = &digits[sig..];
        let round_up = match rest[0].cmp(&5) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => rest[1..].iter().any(|&d| d != 0) || keep[sig - 1] % 2 == 1,
        };
        let mut kept = keep.to_vec();
        if round_up {
            let mut i = sig;
            loop {
                if i == 0 {
                    kept.insert(0, 1);
                    kept.pop();
                    point += 1;
                    break;
                }
                i -= 1;
                if kept[i] == 9 {
                    kept[i] = 0;
                } else {
                    kept[i] += 1;
                    break;
                }
            }
        }
        let ds: String = kept.iter().map(|d| char::from(b'0' + d)).collect();
        let body = if point <= 0 {
            format!("0.{}{}", "0".repeat((-point) as usize), ds)
        } else if point as usize >= sig {
            format!("{}{}", ds, "0".repeat(point as usize - sig))
        } else {
            format!("{}.{}", &ds[..point as usize], &ds[point as usize..])
        };
        if negative {
            format!("-{body}")
        } else {
            body
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sig_digits(20))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f
            .precision()
            .unwrap_or_else(|| ((self.prec() as f64) * std::f64::consts::LOG10_2) as usize);
        f.write_str(&self.to_sig_digits(digits.max(1)))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $call:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.p2(rhs);
                Real(self.0.$call(&rhs.0, p, RM), p)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.neg(), self.1)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.clone().neg(), self.1)
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(mut iter: I) -> Real {
        let first = iter.next().unwrap_or_else(|| Real::zero(64));
        iter.fold(first, |a, b| a + b)
    }
}
