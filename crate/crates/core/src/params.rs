//! Physical parameters and the scaling map to the unit channel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forcing::ForcingSpec;

/// Physical parameters of the channel problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub alpha: f64,
    pub beta: f64,
    pub nu: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
}

impl PhysicalParams {
    pub fn new(alpha: f64, beta: f64, nu: f64, l: f64, t_final: f64) -> Result<Self> {
        let p = Self { alpha, beta, nu, l, t_final };
        p.validate()?;
        Ok(p)
    }

    /// α = β = ν = L = T = 1.
    pub fn unit() -> Self {
        Self { alpha: 1.0, beta: 1.0, nu: 1.0, l: 1.0, t_final: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [("alpha", self.alpha), ("beta", self.beta), ("nu", self.nu), ("L", self.l), ("T", self.t_final)];
        for (name, value) in fields {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite and > 0, got {value}")));
            }
        }
        Ok(())
    }
}

/// Length and viscosity scales relating physical and unit-channel variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub l: f64,
    pub nu: f64,
}

impl Scaling {
    pub fn of(params: &PhysicalParams) -> Self {
        Self { l: params.l, nu: params.nu }
    }

    /// τ = L²/ν.
    pub fn time(&self) -> f64 {
        self.l * self.l / self.nu
    }

    /// ν/L.
    pub fn velocity(&self) -> f64 {
        self.nu / self.l
    }

    /// L³/ν², multiplying f and h.
    pub fn force(&self) -> f64 {
        self.l.powi(3) / (self.nu * self.nu)
    }

    /// L⁴/ν⁴, relating squared H-norms of the forcing.
    pub fn norm_sq(&self) -> f64 {
        (self.l / self.nu).powi(4)
    }
}

/// Maps parameters and forcing to the unit channel (ν = 1, L = 1).
pub fn nondimensionalize(params: &PhysicalParams, forcing: &ForcingSpec) -> Result<(PhysicalParams, ForcingSpec, Scaling)> {
    params.validate()?;
    let s = Scaling::of(params);
    let star = PhysicalParams {
        alpha: params.alpha * params.l,
        beta: params.beta / params.l,
        nu: 1.0,
        l: 1.0,
        t_final: params.nu * params.t_final / (params.l * params.l),
    };
    Ok((star, forcing.rescaled(s.force(), 1.0 / params.l), s))
}

/// Inverse of [`nondimensionalize`].
pub fn redimensionalize(star: &PhysicalParams, forcing: &ForcingSpec, s: &Scaling) -> (PhysicalParams, ForcingSpec) {
    let params = PhysicalParams {
        alpha: star.alpha / s.l,
        beta: star.beta * s.l,
        nu: s.nu,
        l: s.l,
        t_final: star.t_final * s.l * s.l / s.nu,
    };
    (params, forcing.rescaled(1.0 / s.force(), s.l))
}
