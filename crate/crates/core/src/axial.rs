//! Quartic axial potentials and 1D ion-chain equilibria.
//!
//! The axial potential is `Σ α₂ x²/2 + α₄ x⁴/4`. Positions are solved in
//! units of the characteristic length `ℓ = (e²/4πε0 |α₂|)^{1/3}`, where the
//! force balance on ion i reads
//!
//! ```text
//! 0 = s u_i + β u_i³ − Σ_{j<i} (u_i − u_j)^−2 + Σ_{j>i} (u_i − u_j)^−2
//! ```
//!
//! with `β = α₄ ℓ² / |α₂|` and `s = sign(α₂)`. `s = +1` is the usual
//! confining quadratic term. `s = −1` (a quartic well with an anticonfining
//! center) is the branch on which the spacing inhomogeneity has an interior
//! optimum in β for long chains.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::constants::coulomb_constant;
use crate::error::{domain, Error, Result};
use crate::numeric::{golden_section, minimize, Objective};
use crate::species::IonSpecies;

/// Max per-ion force residual accepted from [`solve_equilibrium`], unless
/// the pair-force roundoff floor of a dense chain is larger.
pub const EQUILIBRIUM_TOLERANCE: f64 = 1e-10;

const MAX_NEWTON_ITER: usize = 500;

/// Bracket of the β search.
pub const BETA_MIN: f64 = 1e-3;
pub const BETA_MAX: f64 = 50.0;
pub const BETA_GRID_POINTS: usize = 57;

/// Sign of the quadratic coefficient α₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Curvature {
    Confining,
    Anticonfining,
}

impl Curvature {
    fn sign(self) -> f64 {
        match self {
            Curvature::Confining => 1.0,
            Curvature::Anticonfining => -1.0,
        }
    }
}

/// Characteristic length ℓ = (e²/(4πε0 m ω_x²))^{1/3}.
pub fn characteristic_length(species: &IonSpecies, axial_frequency: f64) -> Result<f64> {
    if !(axial_frequency > 0.0) {
        return domain(format!(
            "axial frequency must be positive, got {axial_frequency}"
        ));
    }
    Ok(length_for_alpha2(species, species.mass() * axial_frequency.powi(2)))
}

fn length_for_alpha2(species: &IonSpecies, alpha2_abs: f64) -> f64 {
    (coulomb_constant(species.charge()) / alpha2_abs).cbrt()
}

/// Axial potential α₂ x²/2 + α₄ x⁴/4 for one ion species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxialPotential {
    alpha2: f64,
    alpha4: f64,
    length: f64,
    beta: f64,
}

impl AxialPotential {
    /// Purely harmonic potential with α₂ = m ω_x².
    pub fn harmonic(species: &IonSpecies, axial_frequency: f64) -> Result<Self> {
        let length = characteristic_length(species, axial_frequency)?;
        Ok(Self {
            alpha2: species.mass() * axial_frequency.powi(2),
            alpha4: 0.0,
            length,
            beta: 0.0,
        })
    }

    /// From raw coefficients [J/m², J/m⁴]. α₂ may be negative only when
    /// α₄ > 0 keeps the potential bounded.
    pub fn from_coefficients(species: &IonSpecies, alpha2: f64, alpha4: f64) -> Result<Self> {
        if !(alpha2.is_finite() && alpha2 != 0.0) {
            return domain(format!("α₂ must be finite and nonzero, got {alpha2}"));
        }
        if !(alpha4 >= 0.0 && alpha4.is_finite()) {
            return domain(format!("α₄ must be non-negative, got {alpha4}"));
        }
        if alpha2 < 0.0 && alpha4 == 0.0 {
            return domain("anticonfining α₂ requires a positive quartic term");
        }
        let length = length_for_alpha2(species, alpha2.abs());
        Ok(Self {
            alpha2,
            alpha4,
            length,
            beta: alpha4 * length * length / alpha2.abs(),
        })
    }

    /// From the dimensionless description (ℓ, β, curvature).
    pub fn from_dimensionless(
        species: &IonSpecies,
        length: f64,
        beta: f64,
        curvature: Curvature,
    ) -> Result<Self> {
        if !(length > 0.0) || !(beta >= 0.0) {
            return domain(format!("need ℓ > 0 and β ≥ 0, got ℓ = {length}, β = {beta}"));
        }
        let alpha2_abs = coulomb_constant(species.charge()) / length.powi(3);
        Self::from_coefficients(
            species,
            curvature.sign() * alpha2_abs,
            beta * alpha2_abs / (length * length),
        )
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }
    pub fn alpha4(&self) -> f64 {
        self.alpha4
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn curvature(&self) -> Curvature {
        if self.alpha2 > 0.0 {
            Curvature::Confining
        } else {
            Curvature::Anticonfining
        }
    }

    #[inline]
    pub fn force(&self, x: f64) -> f64 {
        -self.alpha2 * x - self.alpha4 * x * x * x
    }

    #[inline]
    pub fn energy(&self, x: f64) -> f64 {
        0.5 * self.alpha2 * x * x + 0.25 * self.alpha4 * x.powi(4)
    }
}

/// Equilibrium of an N-ion chain in dimensionless units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfiguration {
    /// Sorted dimensionless positions u_i.
    pub positions: Vec<f64>,
    /// Max |force residual| over ions.
    pub residual_norm: f64,
    pub beta: f64,
    pub curvature: Curvature,
}

impl ChainConfiguration {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Metric positions x_i = ℓ u_i [m].
    pub fn metric(&self, length: f64) -> Vec<f64> {
        self.positions.iter().map(|u| u * length).collect()
    }
}

/// Dimensionless chain energy and its derivatives.
pub(crate) struct ChainEnergy {
    pub sign: f64,
    pub beta: f64,
}

impl ChainEnergy {
    pub fn residuals(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let mut r: Vec<f64> = u
            .iter()
            .map(|&x| self.sign * x + self.beta * x * x * x)
            .collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = u[i] - u[j];
                let f = d.signum() / (d * d);
                r[i] -= f;
                r[j] += f;
            }
        }
        r
    }
}

impl Objective for ChainEnergy {
    fn energy(&self, u: &DVector<f64>) -> f64 {
        let mut e: f64 = u
            .iter()
            .map(|&x| 0.5 * self.sign * x * x + 0.25 * self.beta * x.powi(4))
            .sum();
        for i in 0..u.len() {
            for j in (i + 1)..u.len() {
                e += 1.0 / (u[i] - u[j]).abs();
            }
        }
        e
    }

    fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(self.residuals(u.as_slice()))
    }

    fn hessian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let n = u.len();
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            h[(i, i)] = self.sign + 3.0 * self.beta * u[i] * u[i];
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let c = 2.0 / (u[i] - u[j]).abs().powi(3);
                h[(i, i)] += c;
                h[(j, j)] += c;
                h[(i, j)] -= c;
                h[(j, i)] -= c;
            }
        }
        h
    }
}

/// Equilibrium of N ions under the confining potential (s = +1).
pub fn solve_equilibrium(n: usize, beta: f64) -> Result<ChainConfiguration> {
    solve_equilibrium_with(n, beta, Curvature::Confining, None)
}

/// Equilibrium for either curvature, optionally warm-started from `initial`
/// (dimensionless, any order).
pub fn solve_equilibrium_with(
    n: usize,
    beta: f64,
    curvature: Curvature,
    initial: Option<&[f64]>,
) -> Result<ChainConfiguration> {
    if n == 0 {
        return domain("chain must contain at least one ion");
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return domain(format!("β must be finite and non-negative, got {beta}"));
    }
    if curvature == Curvature::Anticonfining && beta == 0.0 {
        return domain("anticonfining curvature needs β > 0");
    }
    let objective = ChainEnergy {
        sign: curvature.sign(),
        beta,
    };
    let mut start = match initial {
        Some(u) if u.len() == n => {
            let mut u = u.to_vec();
            u.sort_by(f64::total_cmp);
            u
        }
        Some(u) => {
            return domain(format!("initial guess has {} ions, expected {n}", u.len()));
        }
        None => initial_guess(n, beta, curvature),
    };
    symmetrize(&mut start);
    let min = minimize(
        &objective,
        DVector::from_vec(start),
        EQUILIBRIUM_TOLERANCE * 1e-2,
        MAX_NEWTON_ITER,
    )?;
    let mut u: Vec<f64> = min.x.iter().copied().collect();
    u.sort_by(f64::total_cmp);
    // polish the mirror-symmetric representative; keep it only if it is at
    // least as balanced as the raw solution
    let mut sym = u.clone();
    symmetrize(&mut sym);
    let raw_res = max_abs(&objective.residuals(&u));
    let sym_res = max_abs(&objective.residuals(&sym));
    let (u, residual_norm) = if sym_res <= raw_res * 1.5 {
        (sym, sym_res)
    } else {
        (u, raw_res)
    };
    // the pair-force sum has an intrinsic roundoff floor ~ N ε / d_min²
    let d_min = u.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let floor = if n > 1 { 1e-13 * n as f64 / (d_min * d_min) } else { 0.0 };
    if !(residual_norm < EQUILIBRIUM_TOLERANCE.max(floor)) {
        return Err(Error::NonConvergence {
            solver: "chain equilibrium",
            iterations: min.iterations,
            residual: residual_norm,
        });
    }
    Ok(ChainConfiguration {
        positions: u,
        residual_norm,
        beta,
        curvature,
    })
}

/// Harmonic-chain heuristic: uniformly spaced ions spanning the extent of a
/// harmonic chain, shrunk for strong quartic terms; anticonfining chains start
/// spread over the two wells.
fn initial_guess(n: usize, beta: f64, curvature: Curvature) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    let nf = n as f64;
    // half-extent of a harmonic chain ~ (3N ln N / 4)^{1/3} for large N
    let harmonic = (0.75 * nf * nf.ln().max(1.0)).cbrt().max(0.63);
    let half = match curvature {
        Curvature::Confining => {
            // quartic balance β u³ ~ N/u²  ⇒  u ~ (N/β)^{1/5}
            let quartic = (nf / beta.max(1e-300)).powf(0.2);
            harmonic.min(quartic).max(0.3)
        }
        Curvature::Anticonfining => {
            let well = (1.0 / beta).sqrt();
            well + (nf / beta).powf(0.2)
        }
    };
    (0..n)
        .map(|i| -half + 2.0 * half * i as f64 / (nf - 1.0))
        .collect()
}

fn symmetrize(u: &mut [f64]) {
    let n = u.len();
    u.sort_by(f64::total_cmp);
    let copy = u.to_vec();
    for i in 0..n {
        u[i] = 0.5 * (copy[i] - copy[n - 1 - i]);
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Spacing statistics of a chain: population standard deviation and mean of
/// the N−1 consecutive spacings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacingStats {
    pub mean_spacing: f64,
    pub std_spacing: f64,
    /// σ_Δx / mean(Δx).
    pub ratio: f64,
}

pub fn spacing_stats(config: &ChainConfiguration) -> Result<SpacingStats> {
    spacing_stats_of(&config.positions)
}

/// Spacing statistics of arbitrary sorted positions.
pub fn spacing_stats_of(positions: &[f64]) -> Result<SpacingStats> {
    if positions.len() < 2 {
        return domain(format!(
            "spacing statistics need at least 2 ions, got {}",
            positions.len()
        ));
    }
    let spacings: Vec<f64> = positions.windows(2).map(|w| w[1] - w[0]).collect();
    let k = spacings.len() as f64;
    let mean = spacings.iter().sum::<f64>() / k;
    let var = spacings.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / k;
    let std = var.sqrt();
    Ok(SpacingStats {
        mean_spacing: mean,
        std_spacing: std,
        ratio: std / mean,
    })
}

/// Result of the β optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaOptimum {
    pub beta: f64,
    pub min_ratio: f64,
    pub curvature: Curvature,
}

/// Spacing ratio along a β grid for one curvature branch. The grid is walked
/// from large β down so each solve is warm-started from its neighbour.
pub fn ratio_curve(n: usize, curvature: Curvature, betas: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut order: Vec<usize> = (0..betas.len()).collect();
    order.sort_by(|&a, &b| betas[b].total_cmp(&betas[a]));
    let mut out = vec![(0.0, 0.0); betas.len()];
    let mut previous: Option<Vec<f64>> = None;
    for idx in order {
        let beta = betas[idx];
        let config = solve_equilibrium_with(n, beta, curvature, previous.as_deref())
            .or_else(|_| solve_equilibrium_with(n, beta, curvature, None))?;
        out[idx] = (beta, spacing_stats(&config)?.ratio);
        previous = Some(config.positions);
    }
    Ok(out)
}

/// Log-spaced β grid on [BETA_MIN, BETA_MAX].
pub fn beta_grid(points: usize) -> Vec<f64> {
    let (lo, hi) = (BETA_MIN.ln(), BETA_MAX.ln());
    (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// Minimizes the spacing ratio over β on one curvature branch: a log-grid
/// scan brackets the minimum, golden-section on ln β refines it. A minimum on
/// the bracket edge is returned as is.
pub fn optimize_beta_for(n: usize, curvature: Curvature) -> Result<BetaOptimum> {
    if !(2..=200).contains(&n) {
        return domain(format!("optimize_beta needs 2 ≤ N ≤ 200, got {n}"));
    }
    let grid = beta_grid(BETA_GRID_POINTS);
    let curve = ratio_curve(n, curvature, &grid)?;
    let mut best = 0;
    for (i, &(_, r)) in curve.iter().enumerate() {
        if r < curve[best].1 - 1e-14 {
            best = i;
        }
    }
    let (beta, ratio) = if best == 0 || best + 1 == curve.len() {
        curve[best]
    } else {
        let warm = solve_equilibrium_with(n, curve[best].0, curvature, None)?.positions;
        let eval = |log_beta: f64| -> Result<f64> {
            let c = solve_equilibrium_with(n, log_beta.exp(), curvature, Some(&warm))?;
            Ok(spacing_stats(&c)?.ratio)
        };
        let (lb, r) = golden_section(
            eval,
            curve[best - 1].0.ln(),
            curve[best + 1].0.ln(),
            1e-7,
        )?;
        (lb.exp(), r)
    };
    Ok(BetaOptimum {
        beta,
        min_ratio: ratio,
        curvature,
    })
}

/// Optimal β*(N) over the quartic family: both curvature branches are
/// searched and the lower spacing ratio wins. When the harmonic chain is
/// already at least as uniform (N ≤ 3), β* = 0.
pub fn optimize_beta(n: usize) -> Result<BetaOptimum> {
    if !(2..=200).contains(&n) {
        return domain(format!("optimize_beta needs 2 ≤ N ≤ 200, got {n}"));
    }
    let harmonic = spacing_stats(&solve_equilibrium(n, 0.0)?)?.ratio;
    let mut best = BetaOptimum {
        beta: 0.0,
        min_ratio: harmonic,
        curvature: Curvature::Confining,
    };
    if harmonic <= 1e-12 {
        return Ok(best);
    }
    for curvature in [Curvature::Confining, Curvature::Anticonfining] {
        let opt = optimize_beta_for(n, curvature)?;
        if opt.min_ratio < best.min_ratio - 1e-12 {
            best = opt;
        }
    }
    Ok(best)
}

/// Potential that realizes the optimal spacing for N ions with the given
/// mean spacing [m]. Since equilibrium positions scale with ℓ at fixed β,
/// ℓ = target / mean(Δu) and |α₂| = e²/(4πε0 ℓ³); α₄ = β* |α₂| / ℓ².
pub fn build_potential(
    n: usize,
    target_mean_spacing: f64,
    species: &IonSpecies,
) -> Result<(AxialPotential, BetaOptimum)> {
    if !(target_mean_spacing > 0.0 && target_mean_spacing.is_finite()) {
        return domain(format!(
            "target mean spacing must be positive, got {target_mean_spacing}"
        ));
    }
    let opt = optimize_beta(n)?;
    let config = solve_equilibrium_with(n, opt.beta, opt.curvature, None)?;
    let mean_u = spacing_stats(&config)?.mean_spacing;
    let length = target_mean_spacing / mean_u;
    let potential = AxialPotential::from_dimensionless(species, length, opt.beta, opt.curvature)?;
    Ok((potential, opt))
}

/// Equilibrium of N ions in a given metric potential.
pub fn solve_in_potential(n: usize, potential: &AxialPotential) -> Result<ChainConfiguration> {
    solve_equilibrium_with(n, potential.beta(), potential.curvature(), None)
}

/// Zig-zag expected when min(ω_y, ω_z)/ω_x < N / sqrt(ln N).
pub fn zigzag_criterion(n: usize, wx: f64, wy: f64, wz: f64) -> Result<bool> {
    if n < 3 {
        return domain(format!("zig-zag criterion needs N ≥ 3, got {n}"));
    }
    if !(wx > 0.0 && wy > 0.0 && wz > 0.0) {
        return domain("trap frequencies must be positive");
    }
    let nf = n as f64;
    Ok(wy.min(wz) / wx < nf / nf.ln().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::angular;
    use approx::assert_relative_eq;

    #[test]
    fn characteristic_length_yb_67khz() {
        let yb = IonSpecies::yb171();
        let l = characteristic_length(&yb, angular(67e3)).unwrap();
        // (e²/4πε0 m ω²)^{1/3} evaluated independently: 16.61 µm
        assert!((l - 16.61e-6).abs() < 0.01e-6, "{l}");
        let l8 = characteristic_length(&yb, 8.0 * angular(67e3)).unwrap();
        assert_relative_eq!(l8, l / 4.0, max_relative = 1e-14);
        let l35 = characteristic_length(&yb, angular(35e3)).unwrap();
        assert_relative_eq!(l35 / l, (67.0f64 / 35.0).powf(2.0 / 3.0), max_relative = 1e-14);
        assert!(characteristic_length(&yb, 0.0).is_err());
    }

    #[test]
    fn length_round_trips_through_alpha2() {
        let yb = IonSpecies::yb171();
        let p = AxialPotential::harmonic(&yb, angular(67e3)).unwrap();
        let l = length_for_alpha2(&yb, p.alpha2());
        assert_relative_eq!(l, p.length(), max_relative = 1e-12);
    }

    #[test]
    fn small_chains_analytic() {
        let c = solve_equilibrium(1, 3.0).unwrap();
        assert_eq!(c.positions, vec![0.0]);
        let c = solve_equilibrium(2, 0.0).unwrap();
        let u = 0.25f64.cbrt();
        assert_relative_eq!(c.positions[1], u, max_relative = 1e-12);
        assert_relative_eq!(c.positions[0], -u, max_relative = 1e-12);
        let c = solve_equilibrium(3, 0.0).unwrap();
        let u = 1.25f64.cbrt();
        assert_relative_eq!(c.positions[2], u, max_relative = 1e-12);
        assert!(c.positions[1].abs() < 1e-14);
    }

    #[test]
    fn rejects_empty_chain() {
        assert!(solve_equilibrium(0, 0.0).is_err());
        assert!(solve_equilibrium(3, -1.0).is_err());
    }

    #[test]
    fn spacing_stats_edge_cases() {
        let s = spacing_stats_of(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.ratio, 0.0);
        assert!(spacing_stats_of(&[1.0]).is_err());
        let c = solve_equilibrium(3, 0.0).unwrap();
        assert!(spacing_stats(&c).unwrap().ratio < 1e-12);
    }

    #[test]
    fn degenerate_optimization_ties_to_zero() {
        for n in [2, 3] {
            let opt = optimize_beta(n).unwrap();
            assert_eq!(opt.beta, 0.0);
            assert!(opt.min_ratio < 1e-12);
        }
        assert!(optimize_beta(1).is_err());
        assert!(optimize_beta(201).is_err());
    }

    #[test]
    fn zigzag_examples() {
        let wx = angular(67e3);
        assert!(zigzag_criterion(31, wx, angular(613e3), angular(632e3)).unwrap());
        assert!(!zigzag_criterion(31, 1.0, 100.0, 100.0).unwrap());
        let n = 31f64;
        let threshold = n / n.ln().sqrt();
        assert!(!zigzag_criterion(31, 1.0, threshold, threshold + 1.0).unwrap());
        assert!(zigzag_criterion(2, 1.0, 1.5, 1.5).is_err());
    }

    #[test]
    fn build_potential_two_ions_closed_form() {
        let yb = IonSpecies::yb171();
        let s = 5e-6;
        let (pot, opt) = build_potential(2, s, &yb).unwrap();
        assert_eq!(opt.beta, 0.0);
        // spacing 2 (1/4)^{1/3} ℓ = s
        let l = s / (2.0 * 0.25f64.cbrt());
        assert_relative_eq!(pot.length(), l, max_relative = 1e-6);
        let config = solve_in_potential(2, &pot).unwrap();
        let metric = config.metric(pot.length());
        assert_relative_eq!(metric[1] - metric[0], s, max_relative = 1e-6);
    }

    #[test]
    fn potential_force_matches_energy_derivative() {
        let yb = IonSpecies::yb171();
        let p = AxialPotential::from_dimensionless(&yb, 10e-6, 0.4, Curvature::Anticonfining).unwrap();
        let x = 7e-6;
        let h = 1e-11;
        let fd = -(p.energy(x + h) - p.energy(x - h)) / (2.0 * h);
        assert_relative_eq!(p.force(x), fd, max_relative = 1e-6);
        assert_relative_eq!(p.beta(), 0.4, max_relative = 1e-12);
    }
}
