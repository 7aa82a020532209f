//! Three-dimensional crystal equilibria in the time-averaged pseudopotential.
//!
//! Lengths are in units of the axial characteristic length ℓ, so the energy
//! is Σ [s u²/2 + β u⁴/4 + (r_y² v² + r_z² w²)/2] + Σ_{i<j} 1/|r_i − r_j|
//! with r_y = ω_y/ω_x and r_z = ω_z/ω_x.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::axial::{characteristic_length, solve_equilibrium_with, Curvature};
use crate::error::{domain, Error, Result};
use crate::numeric::{minimize, Objective};
use crate::trap::TrapParameters;

/// Per-ion force residual accepted for a 3D equilibrium (dimensionless).
pub const CRYSTAL_TOLERANCE: f64 = 1e-9;

struct CrystalEnergy {
    sign: f64,
    beta: f64,
    ry2: f64,
    rz2: f64,
}

impl CrystalEnergy {
    fn point(x: &DVector<f64>, i: usize) -> Vector3<f64> {
        Vector3::new(x[3 * i], x[3 * i + 1], x[3 * i + 2])
    }
}

impl Objective for CrystalEnergy {
    fn energy(&self, x: &DVector<f64>) -> f64 {
        let n = x.len() / 3;
        let mut e = 0.0;
        for i in 0..n {
            let r = Self::point(x, i);
            e += 0.5 * self.sign * r.x * r.x
                + 0.25 * self.beta * r.x.powi(4)
                + 0.5 * (self.ry2 * r.y * r.y + self.rz2 * r.z * r.z);
            for j in (i + 1)..n {
                e += 1.0 / (r - Self::point(x, j)).norm();
            }
        }
        e
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = x.len() / 3;
        let mut g = DVector::zeros(3 * n);
        for i in 0..n {
            let r = Self::point(x, i);
            g[3 * i] += self.sign * r.x + self.beta * r.x.powi(3);
            g[3 * i + 1] += self.ry2 * r.y;
            g[3 * i + 2] += self.rz2 * r.z;
            for j in (i + 1)..n {
                let d = r - Self::point(x, j);
                let f = d / d.norm().powi(3);
                for k in 0..3 {
                    g[3 * i + k] -= f[k];
                    g[3 * j + k] += f[k];
                }
            }
        }
        g
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = x.len() / 3;
        let mut h = DMatrix::zeros(3 * n, 3 * n);
        for i in 0..n {
            let r = Self::point(x, i);
            h[(3 * i, 3 * i)] += self.sign + 3.0 * self.beta * r.x * r.x;
            h[(3 * i + 1, 3 * i + 1)] += self.ry2;
            h[(3 * i + 2, 3 * i + 2)] += self.rz2;
            for j in (i + 1)..n {
                let d = r - Self::point(x, j);
                let dn = d.norm();
                // ∂²(1/|d|) = (3 d dᵀ − |d|² I)/|d|⁵
                let block = (d * d.transpose() * 3.0 - nalgebra::Matrix3::identity() * dn * dn) / dn.powi(5);
                for a in 0..3 {
                    for b in 0..3 {
                        let v = block[(a, b)];
                        h[(3 * i + a, 3 * i + b)] += v;
                        h[(3 * j + a, 3 * j + b)] += v;
                        h[(3 * i + a, 3 * j + b)] -= v;
                        h[(3 * j + a, 3 * i + b)] -= v;
                    }
                }
            }
        }
        h
    }
}

/// Confinement of a 3D crystal in dimensionless form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrystalTrap {
    pub curvature: Curvature,
    pub beta: f64,
    /// ω_y/ω_x.
    pub ratio_y: f64,
    /// ω_z/ω_x.
    pub ratio_z: f64,
}

impl CrystalTrap {
    pub fn harmonic(wx: f64, wy: f64, wz: f64) -> Result<Self> {
        if !(wx > 0.0 && wy > 0.0 && wz > 0.0) {
            return domain("trap frequencies must be positive");
        }
        Ok(Self {
            curvature: Curvature::Confining,
            beta: 0.0,
            ratio_y: wy / wx,
            ratio_z: wz / wx,
        })
    }
}

/// Dimensionless 3D equilibrium of N ions. Without an initial guess the
/// search starts from the linear chain with an alternating offset along the
/// weaker transverse axis, so a zig-zag is found wherever the linear chain
/// is unstable.
pub fn crystal_equilibrium(
    n: usize,
    trap: &CrystalTrap,
    initial: Option<&[Vector3<f64>]>,
) -> Result<Vec<Vector3<f64>>> {
    if n == 0 {
        return domain("crystal must contain at least one ion");
    }
    let objective = CrystalEnergy {
        sign: match trap.curvature {
            Curvature::Confining => 1.0,
            Curvature::Anticonfining => -1.0,
        },
        beta: trap.beta,
        ry2: trap.ratio_y * trap.ratio_y,
        rz2: trap.ratio_z * trap.ratio_z,
    };
    let start: Vec<Vector3<f64>> = match initial {
        Some(p) if p.len() == n => p.to_vec(),
        Some(p) => return domain(format!("initial guess has {} ions, expected {n}", p.len())),
        None => {
            let chain = solve_equilibrium_with(n, trap.beta, trap.curvature, None)?.positions;
            let spacing = if n > 1 {
                (chain[n - 1] - chain[0]) / (n - 1) as f64
            } else {
                1.0
            };
            let weak_y = trap.ratio_y <= trap.ratio_z;
            chain
                .iter()
                .enumerate()
                .map(|(i, &u)| {
                    let off = if i % 2 == 0 { 0.3 } else { -0.3 } * spacing;
                    if weak_y {
                        Vector3::new(u, off, 0.0)
                    } else {
                        Vector3::new(u, 0.0, off)
                    }
                })
                .collect()
        }
    };
    let x0 = DVector::from_iterator(3 * n, start.iter().flat_map(|r| [r.x, r.y, r.z]));
    let min = minimize(&objective, x0, CRYSTAL_TOLERANCE * 1e-2, 1000)?;
    if !(min.gradient_max < CRYSTAL_TOLERANCE) {
        return Err(Error::NonConvergence {
            solver: "crystal equilibrium",
            iterations: min.iterations,
            residual: min.gradient_max,
        });
    }
    let mut out: Vec<Vector3<f64>> = (0..n).map(|i| CrystalEnergy::point(&min.x, i)).collect();
    out.sort_by(|a, b| a.x.total_cmp(&b.x));
    Ok(out)
}

/// Metric pseudopotential equilibrium of N ions in a harmonic trap, using
/// the trap's secular frequencies [m].
pub fn trap_equilibrium(trap: &TrapParameters, n: usize) -> Result<Vec<Vector3<f64>>> {
    let [wx, wy, wz] = trap.secular_frequencies();
    let length = characteristic_length(trap.species(), wx)?;
    let dimensionless = crystal_equilibrium(n, &CrystalTrap::harmonic(wx, wy, wz)?, None)?;
    Ok(dimensionless.into_iter().map(|r| r * length).collect())
}

/// Largest transverse excursion relative to the mean spacing; zero for a
/// linear chain.
pub fn transverse_extent(positions: &[Vector3<f64>]) -> f64 {
    positions
        .iter()
        .map(|r| (r.y * r.y + r.z * r.z).sqrt())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stiff_transverse_gives_linear_chain() {
        let trap = CrystalTrap::harmonic(1.0, 20.0, 21.0).unwrap();
        let c = crystal_equilibrium(5, &trap, None).unwrap();
        assert!(transverse_extent(&c) < 1e-9);
        let chain = crate::axial::solve_equilibrium(5, 0.0).unwrap();
        for (r, u) in c.iter().zip(&chain.positions) {
            assert!((r.x - u).abs() < 1e-8);
        }
    }

    #[test]
    fn soft_transverse_gives_zigzag_in_weak_plane() {
        let trap = CrystalTrap::harmonic(1.0, 1.6, 2.4).unwrap();
        let c = crystal_equilibrium(7, &trap, None).unwrap();
        assert!(transverse_extent(&c) > 0.05);
        assert!(c.iter().all(|r| r.z.abs() < 1e-8));
        // alternating sides of the axis
        assert!(c.windows(2).all(|w| w[0].y * w[1].y <= 1e-12));
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let e = CrystalEnergy {
            sign: 1.0,
            beta: 0.3,
            ry2: 2.0,
            rz2: 3.0,
        };
        let x = DVector::from_vec(vec![-1.0, 0.2, 0.1, 0.3, -0.4, 0.05, 1.2, 0.1, -0.2]);
        let h = e.hessian(&x);
        let eps = 1e-6;
        for j in 0..9 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += eps;
            xm[j] -= eps;
            let col = (e.gradient(&xp) - e.gradient(&xm)) / (2.0 * eps);
            for i in 0..9 {
                assert!((col[i] - h[(i, j)]).abs() < 1e-6, "{i},{j}");
            }
        }
        let g = e.gradient(&x);
        for j in 0..9 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += eps;
            xm[j] -= eps;
            assert!(((e.energy(&xp) - e.energy(&xm)) / (2.0 * eps) - g[j]).abs() < 1e-7);
        }
    }
}
