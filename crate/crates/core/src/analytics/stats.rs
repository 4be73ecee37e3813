//! Mean and variance of the leaf fraction, and the normal-approximation rate.

use super::{AnalyticsError, Estimate, Solver, SAFETY};
use crate::real::Real;

/// `m = -r'(1) / alpha` and `sigma^2 = r'(1)^2 / alpha^2 - (r'(1) + r''(1)) / alpha`.
#[derive(Debug, Clone)]
pub struct LeafStatistics {
    pub alpha: Estimate,
    pub m: Estimate,
    pub sigma2: Estimate,
    /// `|m_1 - m_2|` and `|sigma2_1 - sigma2_2|` between the two routes.
    pub route_gap: (f64, f64),
}

/// Every reported constant.
#[derive(Debug, Clone)]
pub struct Constants {
    pub alpha: Estimate,
    pub z0: Estimate,
    pub x0: Estimate,
    pub c1: Estimate,
    pub m: Estimate,
    pub sigma2: Estimate,
    pub c2: Estimate,
}

impl Constants {
    /// `(name, estimate)` in output order.
    pub fn named(&self) -> [(&'static str, &Estimate); 7] {
        [
            ("alpha", &self.alpha),
            ("z0", &self.z0),
            ("x0", &self.x0),
            ("C1", &self.c1),
            ("m", &self.m),
            ("sigma2", &self.sigma2),
            ("C2", &self.c2),
        ]
    }
}

fn moments(alpha: &Real, dr: &Real, d2r: &Real) -> (Real, Real) {
    let m = -(dr / alpha);
    let sigma2 = &(&m * &m) - &(&(dr + d2r) / alpha);
    (m, sigma2)
}

impl Solver {
    /// `m` and `sigma^2` by two routes: the bivariate table at `z = 1`, and
    /// the single-index series `a_n(1), a'_n(1), a''_n(1)`.
    pub fn leaf_statistics(&self) -> Result<LeafStatistics, AnalyticsError> {
        let pt = self.boundary_point(&self.real(1.0))?;
        let (m1, s1) = moments(
            &pt.r,
            pt.dr.as_ref().expect("derivatives"),
            pt.d2r.as_ref().expect("derivatives"),
        );
        let (alpha, dr, d2r) = self.derivatives_at_one()?;
        let (m2, s2) = moments(&alpha.value, &dr, &d2r);
        let gap = ((&m1 - &m2).abs().to_f64(), (&s1 - &s2).abs().to_f64());
        let allowed = 10.0 * self.ctx.tolerance;
        if gap.0 > allowed {
            return Err(AnalyticsError::Inconsistent {
                what: "m",
                difference: gap.0,
                allowed,
            });
        }
        if gap.1 > allowed {
            return Err(AnalyticsError::Inconsistent {
                what: "sigma2",
                difference: gap.1,
                allowed,
            });
        }
        let tail = self.h_at_one(&alpha.value)?.tail;
        let base = SAFETY * tail / alpha.value.to_f64() + alpha.error;
        Ok(LeafStatistics {
            m: Estimate::new(m2, base + gap.0),
            sigma2: Estimate::new(s2, 10.0 * base + gap.1),
            alpha,
            route_gap: gap,
        })
    }

    /// `C2 = exp(-(1/2 - m)^2 / (2 sigma^2)) / alpha`.
    pub fn normal_approx_constant(&self, stats: &LeafStatistics) -> Estimate {
        let d = &self.real(0.5) - &stats.m.value;
        let e = &(&d * &d) / &stats.sigma2.value.mul_u64(2);
        let c2 = &(-e).exp() / &stats.alpha.value;
        let (mf, sf, df) = (stats.m.error, stats.sigma2.error, d.to_f64());
        let s = stats.sigma2.value.to_f64();
        let rel = stats.alpha.error / stats.alpha.value.to_f64()
            + (df / s).abs() * mf
            + (df * df / (2.0 * s * s)) * sf;
        let err = c2.to_f64() * rel;
        Estimate::new(c2, err)
    }

    pub fn constants(&self) -> Result<Constants, AnalyticsError> {
        let stats = self.leaf_statistics()?;
        let c2 = self.normal_approx_constant(&stats);
        let (z0, x0, c1) = self.find_z0()?;
        Ok(Constants {
            alpha: stats.alpha,
            z0,
            x0,
            c1,
            m: stats.m,
            sigma2: stats.sigma2,
            c2,
        })
    }
}
