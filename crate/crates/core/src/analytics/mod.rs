//! Newton solvers on the boundary curve `x = r(z)` of the convergence domain
//! of `T(x, z)`.
//!
//! On the curve `y = a(z) = 1 + (z - 1) r(z)` and `exp(y + h) = 1 / r`, so
//! `r(z)` is the root of
//!
//! ```text
//! G(x, z) = ln x + 1 + (z - 1) x + h(x, z) = 0.
//! ```
//!
//! Its derivatives come from `F(x, y, z) = z - 1 + exp(y + h) - y / x` along
//! `(r(z), a(z), z)`: `r' = -F_z / F_x` and
//!
//! ```text
//! F_xx r'^2 + F_xy r' a' + 2 F_xz r' + F_yz a' + F_zz + F_x r'' = 0,  a' = (z - 1) r' + r.
//! ```
//!
//! Error estimates are heuristic: series tails and final Newton steps scaled
//! by the local sensitivity, not interval bounds.

mod critical;
mod stats;

use crate::genfunc::{
    derivative_coeffs, eval_h, eval_h_at_one, CoefficientTable, DerivativeSeries, GenfuncError,
    Partials, RealTable, SeriesValue,
};
use crate::real::Real;

pub use critical::{CriticalPoint, RateValue};
pub use stats::{Constants, LeafStatistics};

pub use crate::precision::PrecisionContext;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error(transparent)]
    Series(#[from] GenfuncError),
    #[error(
        "{what}: Newton did not converge in {iterations} iterations (last step {last_step:e})"
    )]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        last_step: f64,
    },
    #[error("degenerate point z = {z}: F_x vanishes")]
    Degenerate { z: f64 },
    #[error("{what}: routes disagree by {difference:e} (allowed {allowed:e})")]
    Inconsistent {
        what: &'static str,
        difference: f64,
        allowed: f64,
    },
    #[error("invalid argument: {0}")]
    Argument(String),
}

/// A computed constant with a heuristic absolute error estimate.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub value: Real,
    pub error: f64,
}

impl Estimate {
    fn new(value: Real, error: f64) -> Self {
        Estimate { value, error }
    }
}

/// `(z, r(z), a(z))` with optional derivatives of `r`.
#[derive(Debug, Clone)]
pub struct BoundaryPoint {
    pub z: Real,
    pub r: Real,
    pub a: Real,
    pub dr: Option<Real>,
    pub d2r: Option<Real>,
    /// Estimated error of `r`.
    pub error: f64,
    /// `|G(r, z)|` at the returned `r`.
    pub residual: f64,
}

/// Solvers sharing one coefficient table at one working precision.
pub struct Solver {
    ctx: PrecisionContext,
    table: RealTable,
    series: DerivativeSeries,
    /// Tolerance for series tails, below the reporting tolerance.
    series_ctx: PrecisionContext,
}

/// Weight of series tails and rounding in reported errors.
const SAFETY: f64 = 10.0;

impl Solver {
    pub fn new(table: &CoefficientTable, ctx: &PrecisionContext) -> Self {
        let mut series_ctx = ctx.clone();
        series_ctx.tolerance = ctx.tolerance * 1e-2;
        Solver {
            ctx: ctx.clone(),
            table: RealTable::new(table, ctx.bits),
            series: derivative_coeffs(table.order()),
            series_ctx,
        }
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    fn real(&self, v: f64) -> Real {
        self.ctx.real(v)
    }

    fn h(&self, x: &Real, z: &Real) -> Result<SeriesValue, AnalyticsError> {
        Ok(eval_h(x, z, &self.table, &self.series_ctx)?)
    }

    fn h_at_one(&self, x: &Real) -> Result<SeriesValue, AnalyticsError> {
        Ok(eval_h_at_one(x, &self.series, &self.series_ctx)?)
    }

    /// Newton on `G(x) = ln x + 1 + (z - 1) x + h(x, z)`.
    fn newton_r(
        &self,
        z: &Real,
        guess: Real,
        what: &'static str,
        h: impl Fn(&Real) -> Result<SeriesValue, AnalyticsError>,
    ) -> Result<(Real, SeriesValue, f64), AnalyticsError> {
        let one = Real::one(self.ctx.bits);
        let zm1 = z - &one;
        let stop = self.ctx.tolerance * 0.1;
        let mut x = guess;
        let mut last = f64::INFINITY;
        for _ in 0..self.ctx.max_iterations {
            let hv = h(&x)?;
            let g = &(&x.ln() + &one) + &(&(&zm1 * &x) + &hv.value.f);
            let gx = &(&x.recip() + &zm1) + &hv.value.fx;
            let step = &g / &gx;
            let next = &x - &step;
            // stay on the positive axis
            x = if next.is_negative() || next.is_zero() {
                x.div_u64(2)
            } else {
                next
            };
            let s = step.abs().to_f64();
            if s < stop {
                let hv = h(&x)?;
                let g = &(&x.ln() + &one) + &(&(&zm1 * &x) + &hv.value.f);
                let gx = (&(&x.recip() + &zm1) + &hv.value.fx).abs().to_f64();
                let err = SAFETY * (hv.tail + g.abs().to_f64()) / gx + s * s / x.to_f64();
                return Ok((x, hv, err));
            }
            last = s;
        }
        Err(AnalyticsError::NoConvergence {
            what,
            iterations: self.ctx.max_iterations,
            last_step: last,
        })
    }

    /// Otter's `alpha`, the root of `x exp(1 + h(x, 1)) = 1`, from the
    /// single-index series at `z = 1`.
    pub fn solve_alpha(&self) -> Result<Estimate, AnalyticsError> {
        let one = Real::one(self.ctx.bits);
        let (x, _, err) =
            self.newton_r(&one, self.real(1.0 / 3.0), "alpha", |x| self.h_at_one(x))?;
        Ok(Estimate::new(x, err))
    }

    /// `r(z)` from the bivariate table, starting from `alpha / max(1, z)`.
    pub fn solve_r(&self, z: &Real) -> Result<BoundaryPoint, AnalyticsError> {
        let guess = self.real(0.3383 / z.to_f64().max(1.0));
        self.solve_r_from(z, guess)
    }

    /// `r(z)` by Newton from an explicit starting point (continuation).
    pub fn solve_r_from(&self, z: &Real, guess: Real) -> Result<BoundaryPoint, AnalyticsError> {
        if z.is_negative() || z.is_zero() {
            return Err(AnalyticsError::Argument(format!(
                "z must be positive, got {}",
                z.to_f64()
            )));
        }
        let (r, hv, error) = self.newton_r(z, guess, "r(z)", |x| self.h(x, z))?;
        let one = Real::one(self.ctx.bits);
        let a = &one + &(&r * &(z - &one));
        let residual = (&(&r.ln() + &a) + &hv.value.f).abs().to_f64();
        Ok(BoundaryPoint {
            z: z.clone(),
            r,
            a,
            dr: None,
            d2r: None,
            error,
            residual,
        })
    }

    /// Fills in `r'` and `r''` at a solved point.
    pub fn r_derivatives(&self, pt: &BoundaryPoint) -> Result<BoundaryPoint, AnalyticsError> {
        let hv = self.h(&pt.r, &pt.z)?;
        let (dr, d2r) = derivatives_from(&pt.r, &pt.z, &hv.value)
            .ok_or(AnalyticsError::Degenerate { z: pt.z.to_f64() })?;
        Ok(BoundaryPoint {
            dr: Some(dr),
            d2r: Some(d2r),
            ..pt.clone()
        })
    }

    /// `r(z)` with both derivatives.
    pub fn boundary_point(&self, z: &Real) -> Result<BoundaryPoint, AnalyticsError> {
        self.r_derivatives(&self.solve_r(z)?)
    }

    /// `r'(1)`, `r''(1)` using only the single-index series at `z = 1`.
    fn derivatives_at_one(&self) -> Result<(Estimate, Real, Real), AnalyticsError> {
        let alpha = self.solve_alpha()?;
        let hv = self.h_at_one(&alpha.value)?;
        let one = Real::one(self.ctx.bits);
        let (dr, d2r) = derivatives_from(&alpha.value, &one, &hv.value)
            .ok_or(AnalyticsError::Degenerate { z: 1.0 })?;
        Ok((alpha, dr, d2r))
    }
}

/// `(r', r'')` from the partials of `h` at `(r, z)`; `None` if `F_x = 0`.
fn derivatives_from(r: &Real, z: &Real, h: &Partials) -> Option<(Real, Real)> {
    let bits = r.prec();
    let one = Real::one(bits);
    let a = &one + &(r * &(z - &one));
    let r2 = r * r;
    let fx = &(&h.fx / r) + &(&a / &r2);
    if fx.is_zero() {
        return None;
    }
    let fz = &one + &(&h.fz / r);
    let dr = -(&fz / &fx);
    let da = &(&(z - &one) * &dr) + r;
    let fxx = &(&(&h.fxx + &(&h.fx * &h.fx)) / r) - &(&a.mul_u64(2) / &(&r2 * r));
    let fxy = &(&h.fx / r) + &r2.recip();
    let fxz = &(&h.fxz + &(&h.fx * &h.fz)) / r;
    let fyz = &h.fz / r;
    let fzz = &(&h.fzz + &(&h.fz * &h.fz)) / r;
    let rest = &(&(&(&fxx * &(&dr * &dr)) + &(&fxy * &(&dr * &da))) + &(&fxz * &dr).mul_u64(2))
        + &(&(&fyz * &da) + &fzz);
    let d2r = -(&rest / &fx);
    Some((dr, d2r))
}
