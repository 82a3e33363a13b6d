//! Menter SST k-ω coefficients (2003 set) and blending functions.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SstConstants {
    pub sigma_k1: f64,
    pub sigma_omega1: f64,
    pub beta1: f64,
    pub sigma_k2: f64,
    pub sigma_omega2: f64,
    pub beta2: f64,
    pub beta_star: f64,
    pub kappa: f64,
    pub a1: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Default for SstConstants {
    fn default() -> Self {
        Self {
            sigma_k1: 0.85,
            sigma_omega1: 0.5,
            beta1: 0.075,
            sigma_k2: 1.0,
            sigma_omega2: 0.856,
            beta2: 0.0828,
            beta_star: 0.09,
            kappa: 0.41,
            a1: 0.31,
            gamma1: 5.0 / 9.0,
            gamma2: 0.44,
        }
    }
}

/// Blended coefficients at one location.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blended {
    pub f1: f64,
    pub f2: f64,
    pub sigma_k: f64,
    pub sigma_omega: f64,
    pub beta: f64,
    pub gamma: f64,
    /// `2 (1 − F1) σ_ω2 / ω ∇k·∇ω`.
    pub cross_diffusion: f64,
}

impl SstConstants {
    /// `wall_distance`, `k`, `omega` and the gradients of `k` and `ω` in the wall-normal direction.
    pub fn blend(&self, nu: f64, wall_distance: f64, k: f64, omega: f64, dk: f64, domega: f64) -> Blended {
        let d = wall_distance;
        let k = k.max(0.0);
        let cross = 2.0 * self.sigma_omega2 / omega * dk * domega;
        let cd = cross.max(1e-10);
        let viscous = 500.0 * nu / (d * d * omega);
        let arg1 = (k.sqrt() / (self.beta_star * omega * d)).max(viscous).min(4.0 * self.sigma_omega2 * k / (cd * d * d));
        let f1 = arg1.powi(4).tanh();
        let arg2 = (2.0 * k.sqrt() / (self.beta_star * omega * d)).max(viscous);
        let f2 = (arg2 * arg2).tanh();
        let mix = |a: f64, b: f64| f1 * a + (1.0 - f1) * b;
        Blended {
            f1,
            f2,
            sigma_k: mix(self.sigma_k1, self.sigma_k2),
            sigma_omega: mix(self.sigma_omega1, self.sigma_omega2),
            beta: mix(self.beta1, self.beta2),
            gamma: mix(self.gamma1, self.gamma2),
            cross_diffusion: (1.0 - f1) * cross,
        }
    }

    /// `ν_t = a1 k / max(a1 ω, S F2)`.
    pub fn eddy_viscosity(&self, k: f64, omega: f64, strain: f64, f2: f64) -> f64 {
        self.a1 * k.max(0.0) / (self.a1 * omega).max(strain.abs() * f2)
    }

    /// Menter's wall value `60 ν / (β1 Δy1²)`.
    pub fn wall_omega(&self, nu: f64, first_distance: f64) -> f64 {
        60.0 * nu / (self.beta1 * first_distance * first_distance)
    }
}
