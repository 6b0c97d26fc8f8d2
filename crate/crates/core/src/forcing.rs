//! Body and boundary forcing.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::VelocityField;
use crate::grid::Grid;
use crate::norms;
use crate::params::PhysicalParams;

/// Analytic forcing templates, written in the coordinates of the parameter set they accompany.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForcingSpec {
    Zero,
    /// f = (f1, f2), h = h everywhere.
    Constant {
        f1: f64,
        f2: f64,
        h: f64,
    },
    /// f₁ = A·exp(−(x−x₀)²/(2σ²)) for |x − x₀| < radius, else 0.
    GaussianBump {
        x0: f64,
        sigma_x: f64,
        radius: f64,
        amplitude: f64,
    },
    /// h = A·exp(1 − 1/(1 − ((x−x₀)/w)²)) for |x − x₀| < w, else 0.
    BoundaryBump {
        x0: f64,
        width: f64,
        amplitude: f64,
    },
}

/// Smooth compact bump with peak 1 at the origin and support (−1, 1).
pub(crate) fn smooth_bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

impl ForcingSpec {
    pub fn zero() -> Self {
        ForcingSpec::Zero
    }

    /// Template for g(x) = amp·f(x/xscale).
    pub fn rescaled(&self, amp: f64, xscale: f64) -> Self {
        match *self {
            ForcingSpec::Zero => ForcingSpec::Zero,
            ForcingSpec::Constant { f1, f2, h } => ForcingSpec::Constant { f1: amp * f1, f2: amp * f2, h: amp * h },
            ForcingSpec::GaussianBump { x0, sigma_x, radius, amplitude } => ForcingSpec::GaussianBump {
                x0: x0 * xscale,
                sigma_x: sigma_x * xscale,
                radius: radius * xscale,
                amplitude: amp * amplitude,
            },
            ForcingSpec::BoundaryBump { x0, width, amplitude } => {
                ForcingSpec::BoundaryBump { x0: x0 * xscale, width: width * xscale, amplitude: amp * amplitude }
            }
        }
    }

    /// Largest |x| where the template is nonzero.
    pub fn support_radius(&self) -> f64 {
        match *self {
            ForcingSpec::Zero => 0.0,
            ForcingSpec::Constant { .. } => f64::INFINITY,
            ForcingSpec::GaussianBump { x0, radius, .. } => x0.abs() + radius,
            ForcingSpec::BoundaryBump { x0, width, .. } => x0.abs() + width,
        }
    }

    fn eval(&self, x: f64) -> (f64, f64, f64) {
        match *self {
            ForcingSpec::Zero => (0.0, 0.0, 0.0),
            ForcingSpec::Constant { f1, f2, h } => (f1, f2, h),
            ForcingSpec::GaussianBump { x0, sigma_x, radius, amplitude } => {
                let d = x - x0;
                let f1 = if d.abs() < radius { amplitude * (-d * d / (2.0 * sigma_x * sigma_x)).exp() } else { 0.0 };
                (f1, 0.0, 0.0)
            }
            ForcingSpec::BoundaryBump { x0, width, amplitude } => (0.0, 0.0, amplitude * smooth_bump((x - x0) / width)),
        }
    }

    /// Samples the template at grid points whose coordinates are multiplied by `coord_scale`.
    fn sample_at_scale(&self, grid: &Grid, coord_scale: f64) -> VelocityField {
        let mut f = VelocityField::zeros(grid);
        for j in 0..grid.ny {
            for i in grid.free_cols() {
                f.u.set(j, i, self.eval(coord_scale * grid.x_face(i)).0);
            }
        }
        for j in 1..grid.ny {
            for i in 0..grid.nx {
                f.v.set(j, i, self.eval(coord_scale * grid.x_center(i)).1);
            }
        }
        for i in grid.free_cols() {
            f.g[i] = self.eval(coord_scale * grid.x_face(i)).2;
        }
        f
    }

    /// Discrete forcing on a unit-channel grid.
    pub fn sample(&self, grid: &Grid) -> Forcing {
        Forcing { field: self.sample_at_scale(grid, 1.0), time_dependent: false }
    }

    /// ‖(f,h)‖²_{H_L} by quadrature on the physical channel of width L, using the
    /// sample points of `grid` stretched by L.
    pub fn physical_h_norm_sq(&self, grid: &Grid, params: &PhysicalParams) -> f64 {
        let f = self.sample_at_scale(grid, params.l);
        let l = params.l;
        l * l * norms::l2_omega_sq(&f, grid) + params.beta * l * norms::l2_gamma_sq(&f, grid)
    }
}

/// Discrete forcing: f on the velocity faces, h on the wall nodes (stored in `field.g`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forcing {
    pub field: VelocityField,
    pub time_dependent: bool,
}

impl Forcing {
    pub fn zero(grid: &Grid) -> Self {
        Self { field: VelocityField::zeros(grid), time_dependent: false }
    }

    pub fn h(&self) -> &[f64] {
        &self.field.g
    }

    pub fn h_norm(&self, grid: &Grid, beta: f64) -> f64 {
        norms::inner_h(&self.field, &self.field, grid, beta).sqrt()
    }

    /// Rescales so that ‖(f,h)‖_H equals `target`; zero forcing stays zero.
    pub fn normalized(mut self, grid: &Grid, beta: f64, target: f64) -> Self {
        let n = self.h_norm(grid, beta);
        if n > 0.0 {
            self.field.scale(target / n);
        }
        self
    }

    pub fn check(&self, grid: &Grid) -> Result<()> {
        self.field.check(grid)
    }
}
