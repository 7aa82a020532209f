//! Scalar root finding, golden-section search and a damped-Newton minimizer.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Brent's method on a bracketing interval. `f(lo)` and `f(hi)` must differ
/// in sign.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Bracket { lo, hi });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NonConvergence {
        solver: "brent",
        iterations: 200,
        residual: fb.abs(),
    })
}

/// Golden-section minimization of a unimodal function on [lo, hi].
/// Returns (x_min, f(x_min)).
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while (b - a).abs() > xtol {
        // ties move toward the lower end
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Objective for [`minimize`]: energy, gradient and Hessian in one place.
pub trait Objective {
    fn energy(&self, x: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// Outcome of [`minimize`].
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: DVector<f64>,
    pub gradient_max: f64,
    pub iterations: usize,
    /// False when descent stalled at roundoff before reaching `tol`.
    pub converged: bool,
}

/// Damped Newton (Levenberg-Marquardt shift on the Hessian) with energy
/// descent acceptance. Far from a minimum the shift turns the step into
/// scaled gradient descent; near it the step is a pure Newton step.
/// Converged when max |∇E| < `tol`; a stall or exhausted iteration budget is
/// returned with `converged == false` so the caller can judge the residual.
pub fn minimize<O: Objective>(
    objective: &O,
    x0: DVector<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<Minimum> {
    let n = x0.len();
    let mut x = x0;
    let mut energy = objective.energy(&x);
    let mut grad = objective.gradient(&x);
    let mut lambda = 1e-6;
    for iter in 0..max_iter {
        let gmax = grad.amax();
        let hess = objective.hessian(&x);
        let roundoff = 1e-13 * energy.abs().max(1.0);
        if gmax < tol {
            match escape_saddle(objective, &x, &hess, energy, roundoff) {
                Some((xe, ee)) => {
                    x = xe;
                    energy = ee;
                    grad = objective.gradient(&x);
                    lambda = 1e-6;
                    continue;
                }
                None => {
                    return Ok(Minimum {
                        x,
                        gradient_max: gmax,
                        iterations: iter,
                        converged: true,
                    })
                }
            }
        }
        let scale = (0..n).map(|i| hess[(i, i)].abs()).fold(1e-300, f64::max);
        let mut accepted = false;
        while lambda < 1e16 {
            let mut shifted = hess.clone();
            for i in 0..n {
                shifted[(i, i)] += lambda * scale;
            }
            let Some(chol) = shifted.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&grad));
            let trial = &x + &step;
            let trial_energy = objective.energy(&trial);
            if !trial_energy.is_finite() {
                lambda *= 10.0;
                continue;
            }
            let trial_grad = objective.gradient(&trial);
            if trial_energy < energy
                || (trial_energy - energy <= roundoff && trial_grad.amax() < gmax)
            {
                x = trial;
                energy = trial_energy;
                grad = trial_grad;
                lambda = (lambda * 0.1).max(1e-15);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if accepted {
            continue;
        }
        lambda = 1e-6;
        if let Some((xe, ee)) = escape_saddle(objective, &x, &hess, energy, roundoff) {
            x = xe;
            energy = ee;
            grad = objective.gradient(&x);
            continue;
        }
        // below energy roundoff only the gradient is informative
        if let Some(step) = hess.clone().cholesky().map(|c| c.solve(&(-&grad))) {
            let trial = &x + &step;
            let trial_grad = objective.gradient(&trial);
            if trial_grad.amax() < 0.5 * gmax {
                energy = objective.energy(&trial);
                x = trial;
                grad = trial_grad;
                continue;
            }
        }
        return Ok(Minimum {
            x,
            gradient_max: gmax,
            iterations: iter,
            converged: false,
        });
    }
    Ok(Minimum {
        gradient_max: grad.amax(),
        x,
        iterations: max_iter,
        converged: false,
    })
}

/// Steps along the most negative curvature direction when the Hessian is
/// indefinite. Returns the first trial point that lowers the energy by more
/// than roundoff.
fn escape_saddle<O: Objective>(
    objective: &O,
    x: &DVector<f64>,
    hess: &DMatrix<f64>,
    energy: f64,
    roundoff: f64,
) -> Option<(DVector<f64>, f64)> {
    let eig = hess.clone().symmetric_eigen();
    let (k, &lowest) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let scale = eig.eigenvalues.amax().max(1e-300);
    if lowest >= -1e-9 * scale {
        return None;
    }
    let dir = eig.eigenvectors.column(k).into_owned();
    let reach = 1.0 + x.amax();
    let mut t = 1e-4 * reach;
    while t <= reach {
        for sign in [1.0, -1.0] {
            let trial = x + &dir * (sign * t);
            let e = objective.energy(&trial);
            if e.is_finite() && e < energy - roundoff {
                return Some((trial, e));
            }
        }
        t *= 2.0;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent(|x| Ok(x * x * x - 2.0), 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        assert!(brent(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx) = golden_section(|x| Ok((x - 0.3).powi(2) + 1.0), -1.0, 2.0, 1e-10).unwrap();
        // a flat minimum resolves x only to ~sqrt(eps)
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    struct Rosenbrock;
    impl Objective for Rosenbrock {
        fn energy(&self, x: &DVector<f64>) -> f64 {
            (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
        }
        fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
            DVector::from_vec(vec![
                -2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0]),
                200.0 * (x[1] - x[0] * x[0]),
            ])
        }
        fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    2.0 - 400.0 * x[1] + 1200.0 * x[0] * x[0],
                    -400.0 * x[0],
                    -400.0 * x[0],
                    200.0,
                ],
            )
        }
    }

    #[test]
    fn minimizer_solves_rosenbrock() {
        let m = minimize(&Rosenbrock, DVector::from_vec(vec![-1.2, 1.0]), 1e-12, 500).unwrap();
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-10 && (m.x[1] - 1.0).abs() < 1e-10);
    }
}
