//! Floating evaluation of `T(x, z)` and `h(x, z) = sum_{k >= 2} T(x^k, z^k) / k`
//! with first and second partial derivatives.
//!
//! For a fixed `k` the `n`-th term of `T(x^k, z^k) / k` and its partials are
//!
//! ```text
//! f   = A0 X^n / k              fx  = n x^{kn-1} A0          fxx = n (kn-1) x^{kn-2} A0
//! fz  = X^n A1                  fxz = k n x^{kn-1} A1        fzz = X^n (k B2 - B1)
//! A0 = sum_m a_{n,m} z^{km}     A1 = sum_m m a_{n,m} z^{km-1}
//! B1 = sum_m m a_{n,m} z^{km-2} B2 = sum_m m^2 a_{n,m} z^{km-2}
//! ```
//!
//! with `X = x^k`. The `n`-sum is cut once a geometric tail estimate drops
//! below the share `tol / 2^k` of the tolerance; the ratio comes from the
//! envelope `r(zeta) >= alpha / max(1, zeta)` of the convergence domain.

use super::{CoefficientTable, DerivativeSeries, GenfuncError};
use crate::precision::PrecisionContext;
use crate::real::Real;

/// Lower bound for the radius of convergence of `T(x, 1)`.
const ALPHA_LOWER: f64 = 0.3383;
/// Above this the envelope ratio is too weak and the observed ratio is used.
const CERTIFIED_RATIO_LIMIT: f64 = 0.9;
const MAX_K: usize = 100_000;

/// A function value with its first and second partials in `x` and `z`.
#[derive(Debug, Clone)]
pub struct Partials {
    pub f: Real,
    pub fx: Real,
    pub fz: Real,
    pub fxx: Real,
    pub fxz: Real,
    pub fzz: Real,
}

impl Partials {
    fn zero(bits: usize) -> Self {
        let z = Real::zero(bits);
        Partials {
            f: z.clone(),
            fx: z.clone(),
            fz: z.clone(),
            fxx: z.clone(),
            fxz: z.clone(),
            fzz: z,
        }
    }

    fn add(&mut self, o: &Partials) {
        self.f = &self.f + &o.f;
        self.fx = &self.fx + &o.fx;
        self.fz = &self.fz + &o.fz;
        self.fxx = &self.fxx + &o.fxx;
        self.fxz = &self.fxz + &o.fxz;
        self.fzz = &self.fzz + &o.fzz;
    }

    /// `log10` of the largest absolute component.
    fn log10_max(&self) -> f64 {
        [&self.f, &self.fx, &self.fz, &self.fxx, &self.fxz, &self.fzz]
            .iter()
            .map(|v| v.log10_abs())
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A truncated series value.
#[derive(Debug, Clone)]
pub struct SeriesValue {
    pub value: Partials,
    /// Estimated bound on the neglected tail, over all components.
    pub tail: f64,
    /// Largest `n` summed.
    pub terms: usize,
}

/// `a_{n,m}`, `m a_{n,m}`, `m^2 a_{n,m}` rounded to a working precision.
#[derive(Debug, Clone)]
pub struct RealTable {
    bits: usize,
    rows: Vec<Vec<[Real; 3]>>,
}

impl RealTable {
    pub fn new(table: &CoefficientTable, bits: usize) -> Self {
        let rows = table
            .rows()
            .iter()
            .map(|r| {
                r.coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let a = Real::from_biguint(c, bits);
                        let m = (i + 1) as u64;
                        [a.clone(), a.mul_u64(m), a.mul_u64(m * m)]
                    })
                    .collect()
            })
            .collect();
        RealTable { bits, rows }
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn bits(&self) -> usize {
        self.bits
    }
}

/// `a_n(1)`, `a'_n(1)`, `a''_n(1) + a'_n(1)` for evaluation on `z = 1`.
struct RealSeries {
    rows: Vec<[Real; 3]>,
}

impl RealSeries {
    fn new(d: &DerivativeSeries, bits: usize) -> Self {
        let rows = (0..d.order())
            .map(|i| {
                let a1 = Real::from_biguint(&d.d1[i], bits);
                [
                    Real::from_biguint(&d.a[i], bits),
                    a1.clone(),
                    Real::from_biguint(&d.d2[i], bits) + a1,
                ]
            })
            .collect();
        RealSeries { rows }
    }
}

/// Powers of `z` for one `k`: `z^{km}`, `z^{km-1}`, `z^{km-2}` (zero when
/// `km < 2`, where the weight vanishes anyway), grown on demand.
struct ZPowers {
    z: Real,
    zk: Real,
    k: usize,
    p0: Vec<Real>,
    p1: Vec<Real>,
    p2: Vec<Real>,
}

impl ZPowers {
    fn new(z: &Real, k: usize) -> Self {
        let bits = z.prec();
        ZPowers {
            z: z.clone(),
            zk: z.powi(k),
            k,
            p0: vec![Real::one(bits)],
            p1: vec![Real::zero(bits)],
            p2: vec![Real::zero(bits)],
        }
    }

    fn ensure(&mut self, deg: usize) {
        let k = self.k;
        for m in self.p0.len()..=deg {
            let p0 = &self.p0[m - 1] * &self.zk;
            let p1 = if m == 1 {
                self.z.powi(k - 1)
            } else {
                &self.p1[m - 1] * &self.zk
            };
            let p2 = if k * m < 2 {
                Real::zero(self.z.prec())
            } else if k * (m - 1) < 2 {
                self.z.powi(k * m - 2)
            } else {
                &self.p2[m - 1] * &self.zk
            };
            self.p0.push(p0);
            self.p1.push(p1);
            self.p2.push(p2);
        }
    }
}

/// Source of the per-row sums `(A0, A1, B1, B2)`.
trait Rows {
    fn order(&self) -> usize;
    /// Highest power of `z` used by row `n`.
    fn degree(&self, n: usize) -> usize;
    fn sums(&self, n: usize, zp: &ZPowers, bits: usize) -> [Real; 4];
}

impl Rows for RealTable {
    fn order(&self) -> usize {
        self.rows.len()
    }

    fn degree(&self, n: usize) -> usize {
        n
    }

    fn sums(&self, n: usize, zp: &ZPowers, bits: usize) -> [Real; 4] {
        let mut s = [
            Real::zero(bits),
            Real::zero(bits),
            Real::zero(bits),
            Real::zero(bits),
        ];
        for (i, [w0, w1, w2]) in self.rows[n - 1].iter().enumerate() {
            if w0.is_zero() {
                continue;
            }
            let m = i + 1;
            s[0] = &s[0] + &(w0 * &zp.p0[m]);
            s[1] = &s[1] + &(w1 * &zp.p1[m]);
            s[2] = &s[2] + &(w1 * &zp.p2[m]);
            s[3] = &s[3] + &(w2 * &zp.p2[m]);
        }
        s
    }
}

impl Rows for RealSeries {
    fn order(&self) -> usize {
        self.rows.len()
    }

    fn degree(&self, _n: usize) -> usize {
        0
    }

    fn sums(&self, n: usize, _zp: &ZPowers, _bits: usize) -> [Real; 4] {
        let [a, a1, a2] = &self.rows[n - 1];
        [a.clone(), a1.clone(), a1.clone(), a2.clone()]
    }
}

fn check_point(x: &Real, z: &Real) -> Result<(), GenfuncError> {
    if x.is_negative() || z.is_negative() || !x.is_finite() || !z.is_finite() {
        return Err(GenfuncError::OutsideDomain {
            x: x.to_f64(),
            z: z.to_f64(),
        });
    }
    Ok(())
}

/// `sum_n` of the `k`-th summand with its partials; `tol_log10` is the
/// allowed tail for this `k`.
fn eval_k<R: Rows>(
    rows: &R,
    limit: usize,
    x: &Real,
    z: &Real,
    k: usize,
    tol_log10: f64,
    bits: usize,
) -> Result<SeriesValue, GenfuncError> {
    let (xf, zf) = (x.to_f64(), z.to_f64());
    let certified = xf.powi(k as i32) * zf.powi(k as i32).max(1.0) / ALPHA_LOWER;
    let mut zp = ZPowers::new(z, k);
    let xk = x.powi(k);
    let mut xn = Real::one(bits); // X^n
    let mut xn1 = x.powi(k - 1); // x^{kn-1}
    let mut xn2: Option<Real> = None; // x^{kn-2}, once kn >= 2
    let kk = k as u64;
    let mut out = Partials::zero(bits);
    let mut mags: Vec<f64> = Vec::new();
    for n in 1..=limit {
        if n > 1 {
            xn1 = &xn1 * &xk;
        }
        xn = &xn * &xk;
        let nn = n as u64;
        xn2 = match xn2 {
            Some(p) => Some(&p * &xk),
            None if k * n >= 2 => Some(x.powi(k * n - 2)),
            None => None,
        };
        zp.ensure(rows.degree(n));
        let [a0, a1, b1, b2] = rows.sums(n, &zp, bits);
        let term = Partials {
            f: (&a0 * &xn).div_u64(kk),
            fx: (&a0 * &xn1).mul_u64(nn),
            fxx: match &xn2 {
                Some(p) => (&a0 * p).mul_u64(nn * (kk * nn - 1)),
                None => Real::zero(bits),
            },
            fz: &a1 * &xn,
            fxz: (&a1 * &xn1).mul_u64(kk * nn),
            fzz: &(&b2.mul_u64(kk) - &b1) * &xn,
        };
        out.add(&term);
        let mag = term.log10_max();
        mags.push(mag);
        if mag == f64::NEG_INFINITY {
            // x = 0 or z = 0 kills every later term of this k
            if n >= 2 && mags[n - 2] == f64::NEG_INFINITY {
                return Ok(SeriesValue {
                    value: out,
                    tail: 0.0,
                    terms: n,
                });
            }
            continue;
        }
        let q = if certified < CERTIFIED_RATIO_LIMIT {
            certified
        } else if n >= 6 {
            // largest observed ratio over the last few terms
            (n - 4..n)
                .map(|i| 10f64.powf(mags[i] - mags[i - 1]))
                .fold(0.0, f64::max)
        } else {
            continue;
        };
        let q = q * (1.0 + 1.0 / n as f64).powi(2);
        if q >= 1.0 {
            if n == limit {
                return Err(GenfuncError::OutsideDomain { x: xf, z: zf });
            }
            continue;
        }
        let tail_log10 = mag + (q / (1.0 - q)).log10();
        if n >= 2 && tail_log10 < tol_log10 {
            return Ok(SeriesValue {
                value: out,
                tail: 10f64.powf(tail_log10),
                terms: n,
            });
        }
        if n == limit {
            let extra = ((tol_log10 - tail_log10) / q.log10()).ceil().max(1.0);
            let required = if extra.is_finite() {
                n + extra as usize
            } else {
                usize::MAX
            };
            return Err(GenfuncError::InsufficientOrder {
                required,
                available: limit,
            });
        }
    }
    Err(GenfuncError::InsufficientOrder {
        required: limit + 1,
        available: limit,
    })
}

fn limit_of<R: Rows>(rows: &R, ctx: &PrecisionContext) -> usize {
    rows.order().min(ctx.order)
}

/// `T(x, z)` and its partials, truncated at the context order.
#[allow(non_snake_case)]
pub fn eval_T(
    x: &Real,
    z: &Real,
    table: &RealTable,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, GenfuncError> {
    check_point(x, z)?;
    eval_k(
        table,
        limit_of(table, ctx),
        x,
        z,
        1,
        ctx.tolerance.log10(),
        table.bits,
    )
}

/// `h(x, z)` and its partials.
pub fn eval_h(
    x: &Real,
    z: &Real,
    table: &RealTable,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, GenfuncError> {
    check_point(x, z)?;
    sum_over_k(table, limit_of(table, ctx), x, z, ctx, table.bits)
}

/// `h(x, 1)` and its partials from the values `a_n(1)`, `a'_n(1)`, `a''_n(1)` only.
pub fn eval_h_at_one(
    x: &Real,
    series: &DerivativeSeries,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, GenfuncError> {
    let one = Real::one(ctx.bits);
    check_point(x, &one)?;
    let rows = RealSeries::new(&series_prefix(series, ctx.order), ctx.bits);
    sum_over_k(&rows, limit_of(&rows, ctx), x, &one, ctx, ctx.bits)
}

fn series_prefix(d: &DerivativeSeries, order: usize) -> DerivativeSeries {
    let n = order.min(d.order());
    DerivativeSeries {
        a: d.a[..n].to_vec(),
        d1: d.d1[..n].to_vec(),
        d2: d.d2[..n].to_vec(),
    }
}

fn sum_over_k<R: Rows>(
    rows: &R,
    limit: usize,
    x: &Real,
    z: &Real,
    ctx: &PrecisionContext,
    bits: usize,
) -> Result<SeriesValue, GenfuncError> {
    let tol_log10 = ctx.tolerance.log10();
    let ratio = x.to_f64() * z.to_f64().max(1.0);
    if ratio >= 1.0 {
        return Err(GenfuncError::OutsideDomain {
            x: x.to_f64(),
            z: z.to_f64(),
        });
    }
    let mut total = Partials::zero(bits);
    let mut tail = 0.0;
    let mut terms = 0;
    for k in 2..MAX_K {
        // the k-th share of the tolerance is tol / 2^k
        let share = tol_log10 - (k as f64) * std::f64::consts::LOG10_2;
        let part = eval_k(rows, limit, x, z, k, share, bits)?;
        total.add(&part.value);
        tail += part.tail;
        terms = terms.max(part.terms);
        let mag = part.value.log10_max();
        let q = ratio * (1.0 + 1.0 / k as f64).powi(2);
        if mag == f64::NEG_INFINITY || (q < 1.0 && mag + (q / (1.0 - q)).log10() < tol_log10 - 1.0)
        {
            let k_tail = if mag == f64::NEG_INFINITY {
                0.0
            } else {
                10f64.powf(mag) * q / (1.0 - q)
            };
            return Ok(SeriesValue {
                value: total,
                tail: tail + k_tail,
                terms,
            });
        }
    }
    Err(GenfuncError::OutsideDomain {
        x: x.to_f64(),
        z: z.to_f64(),
    })
}
