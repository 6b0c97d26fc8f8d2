//! Divergence-free test fields built from stream functions.
//!
//! ψ(x, y) = Σ_k A_k χ((x − c_k)/w_k) · y^{m_k} · η(y) with η(y) = y(1 − y)² and χ the smooth
//! compact bump. Then ψ = 0 on the wall, ψ = ∂yψ = 0 on the top, and u = ∂yψ, v = −∂xψ are
//! taken as exact differences of corner values, so the discrete divergence vanishes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::field::VelocityField;
use crate::forcing::smooth_bump;
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamTerm {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
    /// Extra power of y; zero gives a nonzero wall slip.
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub terms: Vec<StreamTerm>,
}

fn eta(y: f64, m: u32) -> f64 {
    y.powi(m as i32 + 1) * (1.0 - y).powi(2)
}

/// d/dy [y^{m+1}(1−y)²] at y = 0.
fn eta_prime_at_wall(m: u32) -> f64 {
    if m == 0 {
        1.0
    } else {
        0.0
    }
}

impl StreamSpec {
    pub fn single(amplitude: f64, center: f64, width: f64) -> Self {
        Self { terms: vec![StreamTerm { amplitude, center, width, power: 0 }] }
    }

    /// One to three bumps supported strictly inside (−n, n).
    pub fn random<R: Rng>(grid: &Grid, rng: &mut R) -> Self {
        let n = grid.n_trunc as f64;
        let count = rng.gen_range(1..=3);
        let terms = (0..count)
            .map(|k| {
                let wmax = (0.9 * n).min(2.0);
                let width = rng.gen_range(0.3f64.min(wmax)..=wmax);
                let reach = (n - width - 0.5 * grid.dx).max(0.0);
                let center = if reach > 0.0 { rng.gen_range(-reach..=reach) } else { 0.0 };
                let amplitude = rng.gen_range(0.2..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let power = if k == 0 { 0 } else { rng.gen_range(0..=2) };
                StreamTerm { amplitude, center, width, power }
            })
            .collect();
        Self { terms }
    }

    fn psi(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|t| t.amplitude * smooth_bump((x - t.center) / t.width) * eta(y, t.power)).sum()
    }

    fn wall_slip(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.amplitude * smooth_bump((x - t.center) / t.width) * eta_prime_at_wall(t.power)).sum()
    }
}

/// Velocity field of the stream function on `grid`.
pub fn random_stream_field(grid: &Grid, spec: &StreamSpec) -> VelocityField {
    let nux = grid.nux();
    let mut psi = vec![0.0; (grid.ny + 1) * nux];
    for j in 0..=grid.ny {
        for i in 0..nux {
            psi[j * nux + i] = spec.psi(grid.x_face(i), grid.y_line(j) - grid.y0);
        }
    }
    let at = |j: usize, i: usize| psi[j * nux + i];
    let mut f = VelocityField::zeros(grid);
    for j in 0..grid.ny {
        for i in 0..nux {
            f.u.set(j, i, (at(j + 1, i) - at(j, i)) / grid.dy);
        }
    }
    for j in 1..grid.ny {
        for i in 0..grid.nx {
            let rf = grid.right_face_of_cell(i);
            f.v.set(j, i, -(at(j, rf) - at(j, i)) / grid.dx);
        }
    }
    for i in 0..nux {
        f.g[i] = spec.wall_slip(grid.x_face(i));
    }
    f.enforce_pins(grid);
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::XMode;
    use crate::norms::divergence;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solenoidal_and_admissible() {
        for mode in [XMode::DirichletEnds, XMode::Periodic] {
            let grid = Grid::new(3, 48, 16, mode).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            for _ in 0..20 {
                let spec = StreamSpec::random(&grid, &mut rng);
                let f = random_stream_field(&grid, &spec);
                let scale = f.max_abs().max(1e-300);
                assert!(divergence(&f, &grid).max_abs() < 1e-9 * scale / grid.dx);
                for i in 0..grid.nx {
                    assert_eq!(f.v.at(0, i), 0.0);
                    assert_eq!(f.v.at(grid.ny, i), 0.0);
                }
                if mode == XMode::DirichletEnds {
                    assert_eq!(f.g[0], 0.0);
                    assert_eq!(f.g[grid.nx], 0.0);
                }
            }
        }
    }

    #[test]
    fn trace_is_wall_limit_of_u() {
        let grid = Grid::new(2, 64, 64, XMode::DirichletEnds).unwrap();
        let f = random_stream_field(&grid, &StreamSpec::single(1.0, 0.0, 1.5));
        // u at y = dy/2 differs from the wall trace by O(dy).
        for i in grid.free_cols() {
            assert!((f.u.at(0, i) - f.g[i]).abs() < 3.0 * grid.dy);
        }
    }
}
