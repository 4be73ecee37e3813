//! Critical points of `r(z) z^lambda` and the rate function.
//!
//! With `u = ln z` the critical point solves
//! `phi(u) = z r'(z) / r(z) + lambda = 0`. Since `ln r` is concave in `u`,
//! `phi` decreases, and `phi(0) = lambda - m`; for `lambda <= m` there is no
//! critical point above `z = 1` and the rate is `1 / alpha`.

use super::{AnalyticsError, BoundaryPoint, Estimate, Solver, SAFETY};
use crate::real::Real;

#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub lambda: f64,
    pub z: Estimate,
    pub point: BoundaryPoint,
}

#[derive(Debug, Clone)]
pub struct RateValue {
    pub lambda: f64,
    pub c: Estimate,
    /// The maximiser `z_{0,lambda} > 1`, absent when `lambda <= m`.
    pub critical: Option<CriticalPoint>,
}

struct Phi {
    value: Real,
    slope: Real,
    point: BoundaryPoint,
}

impl Solver {
    fn phi(&self, u: &Real, lambda: &Real, guess: Option<Real>) -> Result<Phi, AnalyticsError> {
        let z = u.exp();
        let pt = match guess {
            Some(g) => self.solve_r_from(&z, g)?,
            None => self.solve_r(&z)?,
        };
        let pt = self.r_derivatives(&pt)?;
        let (dr, d2r) = (
            pt.dr.clone().expect("derivatives"),
            pt.d2r.clone().expect("derivatives"),
        );
        let s = &(&z * &dr) / &pt.r;
        let value = &s + lambda;
        let slope = &(&s + &(&(&(&z * &z) * &d2r) / &pt.r)) - &(&s * &s);
        Ok(Phi {
            value,
            slope,
            point: pt,
        })
    }

    /// The root of `phi` above `z = 1`, by Newton in `u = ln z` kept inside a
    /// sign bracket.
    fn critical_point(&self, lambda: f64, z_init: f64) -> Result<CriticalPoint, AnalyticsError> {
        let lam = self.real(lambda);
        let stop = self.ctx.tolerance;
        let mut lo = self.real(0.0);
        let mut hi: Option<Real> = None;
        let mut u = self.real(z_init.ln());
        let mut guess: Option<Real> = None;
        let mut last = f64::INFINITY;
        for _ in 0..self.ctx.max_iterations {
            let p = self.phi(&u, &lam, guess.take())?;
            if p.value.is_negative() {
                hi = Some(u.clone());
            } else {
                lo = u.clone();
            }
            let step = &p.value / &p.slope;
            let mut next = &u - &step;
            let inside = next > lo && hi.as_ref().is_none_or(|h| next < *h);
            if !inside || p.slope.is_zero() || !p.slope.is_negative() {
                next = match &hi {
                    Some(h) => (&lo + h).div_u64(2),
                    None => &u + &self.real(0.5),
                };
            }
            let du = (&next - &u).abs().to_f64();
            // continue from a first-order prediction of r at the new point
            let zn = next.exp();
            let pred =
                &p.point.r + &(p.point.dr.as_ref().expect("derivatives") * &(&zn - &p.point.z));
            guess = Some(if pred.is_negative() {
                p.point.r.clone()
            } else {
                pred
            });
            u = next;
            if du < stop {
                let p = self.phi(&u, &lam, guess)?;
                let tail = self.h(&p.point.r, &p.point.z)?.tail;
                let err_u = SAFETY * (100.0 * tail + p.value.abs().to_f64())
                    / p.slope.abs().to_f64()
                    + du * du;
                let z = u.exp();
                let err_z = z.to_f64() * err_u;
                return Ok(CriticalPoint {
                    lambda,
                    z: Estimate::new(z, err_z),
                    point: p.point,
                });
            }
            last = du;
        }
        Err(AnalyticsError::NoConvergence {
            what: "critical point",
            iterations: self.ctx.max_iterations,
            last_step: last,
        })
    }

    /// `z0`, `x0 = r(z0) sqrt(z0)` and `C1 = 1 / x0`.
    pub fn find_z0(&self) -> Result<(Estimate, Estimate, Estimate), AnalyticsError> {
        let cp = self.critical_point(0.5, 1.5)?;
        let r = &cp.point.r;
        let x0 = r * &cp.z.value.sqrt();
        let rel = cp.point.error / r.to_f64() + cp.z.error * cp.z.error;
        let x0_err = x0.to_f64() * rel;
        let c1 = x0.recip();
        let c1_err = c1.to_f64() * rel;
        Ok((cp.z, Estimate::new(x0, x0_err), Estimate::new(c1, c1_err)))
    }

    /// `C(lambda) = 1 / (r(z) z^lambda)` at the critical point, or `1 / alpha`
    /// when `lambda <= m`.
    pub fn rate_function(&self, lambda: f64) -> Result<RateValue, AnalyticsError> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(AnalyticsError::Argument(format!(
                "lambda must lie in [0, 1), got {lambda}"
            )));
        }
        let one = self.real(1.0);
        let at_one = self.boundary_point(&one)?;
        let slope_at_one = at_one.dr.as_ref().expect("derivatives") / &at_one.r;
        // phi(0) = r'(1) / alpha + lambda
        if !(&slope_at_one + &self.real(lambda)).is_negative() && lambda > 0.0 {
            let z_init = if lambda <= 0.5 {
                1.5
            } else {
                1.5 + 4.0 * (lambda - 0.5)
            };
            let cp = self.critical_point(lambda, z_init)?;
            let r = &cp.point.r;
            let log_c = -(&r.ln() + &(&cp.z.value.ln() * &self.real(lambda)));
            let c = log_c.exp();
            let err = c.to_f64() * (cp.point.error / r.to_f64() + cp.z.error * cp.z.error);
            return Ok(RateValue {
                lambda,
                c: Estimate::new(c, err),
                critical: Some(cp),
            });
        }
        let c = at_one.r.recip();
        let err = c.to_f64() * at_one.error / at_one.r.to_f64();
        Ok(RateValue {
            lambda,
            c: Estimate::new(c, err),
            critical: None,
        })
    }
}
