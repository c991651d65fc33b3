//! Physical parameters: dissipation order, thermal conductivity, and the
//! temperature-dependent viscosity profiles.
//!
//! The viscosity satisfies mu(0) = 1, is non-decreasing and saturates at
//! 1 + epsilon, so the contrast `||mu - 1||_inf = epsilon` is a single knob.
//! For theta < 0 the profile extends by the constant 1.

use serde::{Deserialize, Serialize};

use crate::field::PhysField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuProfile {
    /// mu(theta) = 1 + eps (1 - exp(-theta)) for theta >= 0.
    ExpSaturating,
    /// mu(theta) = 1 + eps tanh(theta) for theta >= 0.
    TanhSaturating,
}

impl MuProfile {
    pub fn id(self) -> u8 {
        match self {
            MuProfile::ExpSaturating => 0,
            MuProfile::TanhSaturating => 1,
        }
    }

    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(MuProfile::ExpSaturating),
            1 => Some(MuProfile::TanhSaturating),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysParams {
    /// Dissipation order of |D|^alpha, in (0, 2].
    pub alpha: f64,
    /// Viscosity contrast ||mu - 1||_inf, in [0, 1).
    pub epsilon: f64,
    /// Thermal conductivity; the analysis fixes kappa = 1, the knob stays
    /// exposed for exploration (kappa = 0 disables dissipation).
    pub kappa: f64,
    pub mu_profile: MuProfile,
}

impl PhysParams {
    pub fn new(alpha: f64, epsilon: f64) -> Self {
        PhysParams { alpha, epsilon, kappa: 1.0, mu_profile: MuProfile::ExpSaturating }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(format!("alpha must lie in (0, 2], got {}", self.alpha));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(format!("epsilon must lie in [0, 1), got {}", self.epsilon));
        }
        if self.kappa < 0.0 {
            return Err(format!("kappa must be nonnegative, got {}", self.kappa));
        }
        Ok(())
    }

    /// Pointwise viscosity value.
    #[inline]
    pub fn mu(&self, theta: f64) -> f64 {
        let t = theta.max(0.0);
        match self.mu_profile {
            MuProfile::ExpSaturating => 1.0 + self.epsilon * (1.0 - (-t).exp()),
            MuProfile::TanhSaturating => 1.0 + self.epsilon * t.tanh(),
        }
    }
}

/// Evaluate mu(theta) on a physical field.
pub fn viscosity(theta_phys: &PhysField, params: &PhysParams) -> PhysField {
    PhysField::from_vals(
        theta_phys.grid(),
        theta_phys.vals().iter().map(|&t| params.mu(t)).collect(),
    )
}
