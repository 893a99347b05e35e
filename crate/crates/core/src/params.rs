//! The coupled angle parameters of a paperfolding polygon.
//!
//! Every geometric quantity in this crate derives from the unfolding angle
//! `alpha`. The two derived quantities are the half-complement
//! `beta = 90 - alpha/2` (the rotation magnitude of the generating maps) and
//! the contraction ratio `q = 1 / (2 cos beta)` (how much each edge shrinks
//! per level). Public interfaces speak degrees; radians only appear inside
//! trigonometric calls.

use serde::Serialize;

use crate::error::{DragonError, Result};

/// Lower edge of the angle window in which the spiral hull is defined.
pub const WINDOW_ALPHA_MIN: f64 = 90.0;
/// Upper edge of the angle window in which the spiral hull is defined.
pub const WINDOW_ALPHA_MAX: f64 = 108.0;

/// Default absolute tolerance used by checks that accept one.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// The triple (alpha, beta, q). Construct through [`AngleParams::from_alpha`]
/// or [`AngleParams::from_q`] so the invariants hold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleParams {
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub q: f64,
}

impl AngleParams {
    pub fn from_alpha(alpha_deg: f64) -> Result<Self> {
        if !(alpha_deg > 0.0 && alpha_deg < 180.0) {
            return Err(DragonError::Domain {
                name: "alpha_deg",
                value: alpha_deg,
                domain: "(0, 180)",
            });
        }
        let beta_deg = 90.0 - alpha_deg / 2.0;
        let q = 1.0 / (2.0 * beta_deg.to_radians().cos());
        Ok(Self {
            alpha_deg,
            beta_deg,
            q,
        })
    }

    pub fn from_q(q: f64) -> Result<Self> {
        if !(q > 0.5 && q < 1.0) {
            return Err(DragonError::Domain {
                name: "q",
                value: q,
                domain: "(0.5, 1)",
            });
        }
        let beta_deg = (1.0 / (2.0 * q)).acos().to_degrees();
        let alpha_deg = 180.0 - 2.0 * beta_deg;
        Ok(Self {
            alpha_deg,
            beta_deg,
            q,
        })
    }

    #[inline]
    pub fn beta_rad(&self) -> f64 {
        self.beta_deg.to_radians()
    }

    #[inline]
    pub fn alpha_rad(&self) -> f64 {
        self.alpha_deg.to_radians()
    }

    /// `q^x` for real `x`.
    #[inline]
    pub fn qpow(&self, x: f64) -> f64 {
        self.q.powf(x)
    }

    /// `q^(alpha/beta)`, which shows up in most separation conditions.
    #[inline]
    pub fn q_alpha_over_beta(&self) -> f64 {
        self.qpow(self.alpha_deg / self.beta_deg)
    }

    /// `1 / (1 - q^4)`: the limit of the collinear geometric series.
    #[inline]
    pub fn series_factor(&self) -> f64 {
        1.0 / (1.0 - self.q.powi(4))
    }

    /// Whether alpha lies in the window where the hull construction is valid.
    pub fn in_hull_window(&self) -> bool {
        self.alpha_deg >= WINDOW_ALPHA_MIN - 1e-12 && self.alpha_deg <= WINDOW_ALPHA_MAX + 1e-12
    }
}

/// Convenience wrapper around [`AngleParams::from_alpha`].
pub fn params_from_alpha(alpha_deg: f64) -> Result<AngleParams> {
    AngleParams::from_alpha(alpha_deg)
}

/// Convenience wrapper around [`AngleParams::from_q`].
pub fn params_from_q(q: f64) -> Result<AngleParams> {
    AngleParams::from_q(q)
}
