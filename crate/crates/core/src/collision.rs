//! Ion–neutral collisions in the induced-dipole potential V(r) = −C₄/r⁴.
//!
//! Classical scattering in the centre-of-mass frame is parameterized by
//! κ = 2C₄/(µ b⁴ v₀²). Orbits with 4κ < 1 are deflected; 4κ ≥ 1 (b ≤ b_c)
//! spiral in and are Langevin captures.

use nalgebra::Vector3;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{BOLTZMANN, HBAR, VACUUM_PERMITTIVITY};
use crate::error::{domain, Result};
use crate::special::ellipk;
use crate::species::{BackgroundGas, IonSpecies};

/// Default impact-parameter cutoff in units of b_c for Monte Carlo sampling.
pub const DEFAULT_B_MAX_FACTOR: f64 = 3.0;

/// C₄ = α e²/(8πε0) for a polarizability volume α [m³] and ion charge [C].
pub fn c4_from_polarizability(polarizability_volume: f64, charge: f64) -> f64 {
    polarizability_volume * charge * charge / (8.0 * PI * VACUUM_PERMITTIVITY)
}

/// Induced-dipole coefficient C₄ [J m⁴].
pub fn c4_coefficient(gas: &BackgroundGas, ion: &IonSpecies) -> f64 {
    c4_from_polarizability(gas.polarizability_volume(), ion.charge())
}

/// Ion–molecule pair in the C₄ potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    c4: f64,
    ion_mass: f64,
    molecule_mass: f64,
}

impl Interaction {
    pub fn new(gas: &BackgroundGas, ion: &IonSpecies) -> Self {
        Self {
            c4: c4_coefficient(gas, ion),
            ion_mass: ion.mass(),
            molecule_mass: gas.mass(),
        }
    }

    pub fn from_parts(c4: f64, ion_mass: f64, molecule_mass: f64) -> Result<Self> {
        if !(c4 >= 0.0 && c4.is_finite()) {
            return domain(format!("C₄ must be non-negative, got {c4}"));
        }
        if !(ion_mass > 0.0 && molecule_mass > 0.0) {
            return domain("masses must be positive");
        }
        Ok(Self {
            c4,
            ion_mass,
            molecule_mass,
        })
    }

    pub fn c4(&self) -> f64 {
        self.c4
    }
    pub fn ion_mass(&self) -> f64 {
        self.ion_mass
    }
    pub fn molecule_mass(&self) -> f64 {
        self.molecule_mass
    }
    pub fn reduced_mass(&self) -> f64 {
        self.ion_mass * self.molecule_mass / (self.ion_mass + self.molecule_mass)
    }
    /// ξ = M_m / M_i.
    pub fn mass_ratio(&self) -> f64 {
        self.molecule_mass / self.ion_mass
    }
    /// Maximum fractional energy transfer 4ξ/(1+ξ)².
    pub fn transfer_efficiency(&self) -> f64 {
        let xi = self.mass_ratio();
        4.0 * xi / (1.0 + xi).powi(2)
    }
}

/// p-wave centrifugal barrier E₄ = ħ²/(2µR₄²) with R₄ = (2µC₄/ħ²)^{1/2},
/// i.e. ħ⁴/(4µ²C₄) [J].
pub fn p_wave_barrier(gas: &BackgroundGas, ion: &IonSpecies) -> f64 {
    let it = Interaction::new(gas, ion);
    let mu = it.reduced_mass();
    let r4_sq = 2.0 * mu * it.c4 / (HBAR * HBAR);
    HBAR * HBAR / (2.0 * mu * r4_sq)
}

/// b_c = (8C₄/(µ v₀²))^{1/4} [m].
pub fn critical_impact_parameter(v0: f64, interaction: &Interaction) -> Result<f64> {
    if !(v0 > 0.0 && v0.is_finite()) {
        return domain(format!("relative speed must be positive, got {v0}"));
    }
    Ok((8.0 * interaction.c4 / (interaction.reduced_mass() * v0 * v0)).powf(0.25))
}

/// Treatment of captured (b ≤ b_c) trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaptureModel {
    /// θ_sc = π for every capture.
    #[default]
    HeadOn,
    /// θ_sc = π − 2θ with θ the polar angle swept before the pair overlaps.
    OverlapAngle,
}

/// Outcome of one classical scattering event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scattering {
    /// Lab-frame scattering angle folded into [0, π].
    pub theta: f64,
    pub captured: bool,
}

/// Folds an orbit rotation angle into a scattering angle in [0, π].
fn fold_angle(chi: f64) -> f64 {
    let r = chi.rem_euclid(2.0 * PI);
    if r > PI {
        2.0 * PI - r
    } else {
        r
    }
}

/// Signed centre-of-mass deflection χ for a non-captured orbit (negative
/// for the attractive potential), from the closed form
/// χ = π − 2√2 K((1−x)/(1+x))/√(1+x), x = √(1−4κ).
pub fn deflection_function(b: f64, v0: f64, interaction: &Interaction) -> Option<f64> {
    let kappa = kappa(b, v0, interaction);
    if !(4.0 * kappa < 1.0) {
        return None;
    }
    let x = (1.0 - 4.0 * kappa).sqrt();
    Some(PI - 2.0 * 2f64.sqrt() * ellipk((1.0 - x) / (1.0 + x)) / (1.0 + x).sqrt())
}

fn kappa(b: f64, v0: f64, interaction: &Interaction) -> f64 {
    2.0 * interaction.c4 / (interaction.reduced_mass() * b.powi(4) * v0 * v0)
}

/// Polar angle swept by a captured orbit before the particles overlap:
/// ∫₀^∞ dw/√(1 − w² + κw⁴) = K(m)/κ^{1/4}, m = (1 + 1/(2√κ))/2.
/// Diverges at b = b_c.
pub fn overlap_angle(b: f64, v0: f64, interaction: &Interaction) -> Option<f64> {
    let kappa = kappa(b, v0, interaction);
    if !(4.0 * kappa >= 1.0) {
        return None;
    }
    if kappa.is_infinite() {
        return Some(0.0);
    }
    let m = 0.5 * (1.0 + 0.5 / kappa.sqrt());
    Some(ellipk(m) / kappa.powf(0.25))
}

/// Lab-frame scattering angle for impact parameter `b` and relative speed
/// `v0`.
pub fn scattering_angle(
    b: f64,
    v0: f64,
    interaction: &Interaction,
    capture: CaptureModel,
) -> Result<Scattering> {
    if !(b >= 0.0) {
        return domain(format!("impact parameter must be non-negative, got {b}"));
    }
    if !(v0 > 0.0 && v0.is_finite()) {
        return domain(format!("relative speed must be positive, got {v0}"));
    }
    if let Some(chi) = deflection_function(b, v0, interaction) {
        return Ok(Scattering {
            theta: fold_angle(chi),
            captured: false,
        });
    }
    let theta = match capture {
        CaptureModel::HeadOn => PI,
        CaptureModel::OverlapAngle => match overlap_angle(b, v0, interaction) {
            Some(t) if t.is_finite() => fold_angle(PI - 2.0 * t),
            _ => PI,
        },
    };
    Ok(Scattering {
        theta,
        captured: true,
    })
}

/// ΔE = 4ξ/(1+ξ)² sin²(θ/2) E_m for an ion initially at rest.
pub fn energy_transfer(xi: f64, theta: f64, molecule_energy: f64) -> f64 {
    4.0 * xi / (1.0 + xi).powi(2) * (0.5 * theta).sin().powi(2) * molecule_energy
}

/// Unit vector perpendicular to `axis` at azimuth `phi`.
fn perpendicular(axis: &Vector3<f64>, phi: f64) -> Vector3<f64> {
    let helper = if axis.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = axis.cross(&helper).normalize();
    let e2 = axis.cross(&e1);
    e1 * phi.cos() + e2 * phi.sin()
}

/// Ion and molecule lab velocities after an elastic collision with
/// scattering angle `theta` in the plane at azimuth `phi` about the
/// relative velocity. The kick is computed in the ion rest frame.
pub fn collide(
    ion_velocity: &Vector3<f64>,
    molecule_velocity: &Vector3<f64>,
    theta: f64,
    phi: f64,
    interaction: &Interaction,
) -> (Vector3<f64>, Vector3<f64>) {
    let rel = molecule_velocity - ion_velocity;
    let v0 = rel.norm();
    if v0 == 0.0 {
        return (*ion_velocity, *molecule_velocity);
    }
    let axis = rel / v0;
    let frac = interaction.molecule_mass / (interaction.ion_mass + interaction.molecule_mass);
    let dv = (axis * (1.0 - theta.cos()) - perpendicular(&axis, phi) * theta.sin()) * (frac * v0);
    let ion_after = ion_velocity + dv;
    let molecule_after = molecule_velocity - dv * (interaction.ion_mass / interaction.molecule_mass);
    (ion_after, molecule_after)
}

/// Velocity change of the ion only; see [`collide`].
pub fn velocity_kick(
    ion_velocity: &Vector3<f64>,
    molecule_velocity: &Vector3<f64>,
    theta: f64,
    phi: f64,
    interaction: &Interaction,
) -> Vector3<f64> {
    collide(ion_velocity, molecule_velocity, theta, phi, interaction).0 - ion_velocity
}

/// Langevin rate coefficient k_L = e √(απ/(µε0)) = π b_c(v)² v [m³/s].
pub fn langevin_rate_coefficient(gas: &BackgroundGas, ion: &IonSpecies) -> f64 {
    let mu = Interaction::new(gas, ion).reduced_mass();
    ion.charge().abs() * (gas.polarizability_volume() * PI / (mu * VACUUM_PERMITTIVITY)).sqrt()
}

/// Langevin collision rate γ = n k_L [1/s].
pub fn langevin_rate(gas: &BackgroundGas, ion: &IonSpecies, density: f64) -> Result<f64> {
    if !(density >= 0.0) {
        return domain(format!("density must be non-negative, got {density}"));
    }
    Ok(density * langevin_rate_coefficient(gas, ion))
}

/// Pressure-to-density convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityConvention {
    /// n = (2/3) P/(k_B T).
    #[default]
    TwoThirds,
    /// n = P/(k_B T).
    IdealGas,
}

impl DensityConvention {
    pub fn factor(self) -> f64 {
        match self {
            DensityConvention::TwoThirds => 2.0 / 3.0,
            DensityConvention::IdealGas => 1.0,
        }
    }
}

/// Number density [1/m³] from pressure [Pa] and temperature [K].
pub fn density_from_pressure(
    pressure: f64,
    temperature: f64,
    convention: DensityConvention,
) -> Result<f64> {
    if !(temperature > 0.0) {
        return domain(format!("temperature must be positive, got {temperature}"));
    }
    if !(pressure >= 0.0) {
        return domain(format!("pressure must be non-negative, got {pressure}"));
    }
    Ok(convention.factor() * pressure / (BOLTZMANN * temperature))
}

/// Inverse of [`density_from_pressure`].
pub fn pressure_from_density(
    density: f64,
    temperature: f64,
    convention: DensityConvention,
) -> Result<f64> {
    if !(temperature > 0.0) {
        return domain(format!("temperature must be positive, got {temperature}"));
    }
    Ok(density * BOLTZMANN * temperature / convention.factor())
}

/// Maxwell–Boltzmann velocity: components i.i.d. N(0, k_B T/m).
pub fn sample_thermal_velocity<R: Rng + ?Sized>(gas: &BackgroundGas, rng: &mut R) -> Vector3<f64> {
    let sigma = (BOLTZMANN * gas.temperature() / gas.mass()).sqrt();
    let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
    Vector3::new(normal.sample(rng), normal.sample(rng), normal.sample(rng))
}

/// Uniformly distributed unit vector.
pub fn isotropic_direction<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    let cos_t: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    Vector3::new(sin_t * phi.cos(), sin_t * phi.sin(), cos_t)
}

/// One sampled encounter with an ion at rest or in motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub molecule_velocity: [f64; 3],
    pub impact_parameter: f64,
    /// Relative speed v₀ [m/s].
    pub relative_speed: f64,
    /// L = b µ v₀.
    pub angular_momentum: f64,
    /// E = µ v₀²/2 (centre-of-mass frame).
    pub energy: f64,
    pub azimuth: f64,
    pub theta: f64,
    pub captured: bool,
}

/// Draws a molecule from the thermal distribution, b² uniform on
/// [0, (b_max_factor · b_c(v₀))²] and a uniform azimuth.
pub fn sample_collision<R: Rng + ?Sized>(
    gas: &BackgroundGas,
    interaction: &Interaction,
    ion_velocity: &Vector3<f64>,
    b_max_factor: f64,
    capture: CaptureModel,
    rng: &mut R,
) -> Result<CollisionEvent> {
    if !(b_max_factor > 0.0) {
        return domain(format!("b_max factor must be positive, got {b_max_factor}"));
    }
    let vm = sample_thermal_velocity(gas, rng);
    let v0 = (vm - ion_velocity).norm();
    let b_max = b_max_factor * critical_impact_parameter(v0, interaction)?;
    let b = b_max * rng.random::<f64>().sqrt();
    let azimuth = rng.random_range(0.0..2.0 * PI);
    let s = scattering_angle(b, v0, interaction, capture)?;
    let mu = interaction.reduced_mass();
    Ok(CollisionEvent {
        molecule_velocity: [vm.x, vm.y, vm.z],
        impact_parameter: b,
        relative_speed: v0,
        angular_momentum: b * mu * v0,
        energy: 0.5 * mu * v0 * v0,
        azimuth,
        theta: s.theta,
        captured: s.captured,
    })
}

/// Monte Carlo mean and standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// Mean energy given to an ion at rest per Langevin collision [J].
///
/// With b² uniform on [0, (f b_c)²] the flux-weighted integral over b is
/// f² times the sample mean, since π b_c(v)² v = k_L for every v.
pub fn mean_energy_transfer(
    gas: &BackgroundGas,
    ion: &IonSpecies,
    samples: usize,
    b_max_factor: f64,
    capture: CaptureModel,
    seed: u64,
) -> Result<Estimate> {
    if samples < 2 {
        return domain("need at least 2 samples");
    }
    let interaction = Interaction::new(gas, ion);
    let xi = interaction.mass_ratio();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight = b_max_factor * b_max_factor;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let ev = sample_collision(gas, &interaction, &Vector3::zeros(), b_max_factor, capture, &mut rng)?;
        let vm = Vector3::from(ev.molecule_velocity);
        let e_m = 0.5 * gas.mass() * vm.norm_squared();
        let de = weight * energy_transfer(xi, ev.theta, e_m);
        sum += de;
        sum_sq += de * de;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(Estimate {
        mean,
        std_err: (var / n).sqrt(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn yb_h2() -> (BackgroundGas, IonSpecies, Interaction) {
        let gas = BackgroundGas::h2(4.5).unwrap();
        let ion = IonSpecies::yb171();
        (gas, ion, Interaction::new(&gas, &ion))
    }

    #[test]
    fn c4_value_and_linearity() {
        let (gas, ion, _) = yb_h2();
        let c4 = c4_coefficient(&gas, &ion);
        assert!((c4 - 9.08e-59).abs() < 0.01e-59, "{c4}");
        // U(1 nm) = −C₄ × 10³⁶
        assert_relative_eq!(c4 / 1e-9f64.powi(4), c4 * 1e36, max_relative = 1e-12);
        assert_eq!(c4_from_polarizability(0.0, ion.charge()), 0.0);
        assert_relative_eq!(
            c4_from_polarizability(2.0 * 0.787e-30, ion.charge()),
            2.0 * c4,
            max_relative = 1e-14
        );
    }

    #[test]
    fn p_wave_barrier_identities() {
        let (gas, ion, it) = yb_h2();
        let e4 = p_wave_barrier(&gas, &ion);
        let mu = it.reduced_mass();
        assert_relative_eq!(e4, HBAR.powi(4) / (4.0 * mu * mu * it.c4()), max_relative = 1e-12);
        // a few mK
        let mk = e4 / BOLTZMANN * 1e3;
        assert!(mk > 1.5 && mk < 3.5, "{mk}");
        // µ → 4µ: E₄ → E₄/16, via a gas four times heavier than the reduced
        // mass scaling requires; check the formula directly instead
        let e4_4mu = HBAR.powi(4) / (4.0 * (4.0 * mu).powi(2) * it.c4());
        assert_relative_eq!(e4_4mu, e4 / 16.0, max_relative = 1e-12);
    }

    #[test]
    fn critical_impact_parameter_examples() {
        let (_, _, it) = yb_h2();
        let bc = critical_impact_parameter(193.0, &it).unwrap();
        assert!((bc - 1.6e-9).abs() < 0.1e-9, "{bc}");
        // b_c ∝ v^{-1/2}
        let bc4 = critical_impact_parameter(4.0 * 193.0, &it).unwrap();
        assert_relative_eq!(bc4, bc / 2.0, max_relative = 1e-12);
        let bc16 = critical_impact_parameter(16.0 * 193.0, &it).unwrap();
        assert_relative_eq!(bc16, bc / 4.0, max_relative = 1e-12);
        assert_relative_eq!(
            bc.powi(4) * it.reduced_mass() * 193.0f64.powi(2) / 8.0,
            it.c4(),
            max_relative = 1e-12
        );
        assert!(critical_impact_parameter(0.0, &it).is_err());
    }

    #[test]
    fn capture_branch() {
        let (_, _, it) = yb_h2();
        let v = 200.0;
        let bc = critical_impact_parameter(v, &it).unwrap();
        for b in [0.0, 0.3 * bc, bc] {
            let s = scattering_angle(b, v, &it, CaptureModel::HeadOn).unwrap();
            assert!(s.captured);
            assert_eq!(s.theta, PI);
            let s = scattering_angle(b, v, &it, CaptureModel::OverlapAngle).unwrap();
            assert!(s.captured && (0.0..=PI).contains(&s.theta));
        }
        let s = scattering_angle(1.0001 * bc, v, &it, CaptureModel::HeadOn).unwrap();
        assert!(!s.captured);
        // head-on limit of the overlap model
        let s = scattering_angle(0.0, v, &it, CaptureModel::OverlapAngle).unwrap();
        assert_eq!(s.theta, PI);
    }

    #[test]
    fn vanishing_c4_gives_no_deflection() {
        let it = Interaction::from_parts(1e-80, 2.8e-25, 3.3e-27).unwrap();
        let s = scattering_angle(1e-9, 200.0, &it, CaptureModel::HeadOn).unwrap();
        assert!(s.theta < 1e-6 && !s.captured);
    }

    #[test]
    fn energy_transfer_limits() {
        assert_eq!(energy_transfer(0.011, 0.0, 1.0), 0.0);
        assert_relative_eq!(energy_transfer(1.0, PI, 2.5), 2.5, max_relative = 1e-15);
    }

    #[test]
    fn kick_examples() {
        let (_, _, it) = yb_h2();
        let frac = it.molecule_mass() / (it.ion_mass() + it.molecule_mass());
        let vm = Vector3::new(300.0, 0.0, 0.0);
        let k = velocity_kick(&Vector3::zeros(), &vm, 0.0, 0.3, &it);
        assert!(k.norm() < 1e-15);
        let k = velocity_kick(&Vector3::zeros(), &vm, PI, 1.1, &it);
        assert_relative_eq!(k.x, 2.0 * 300.0 * frac, max_relative = 1e-12);
        assert!(k.y.abs() < 1e-10 && k.z.abs() < 1e-10);
    }

    #[test]
    fn thermal_sampling_mean_energy() {
        let (gas, _, _) = yb_h2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000;
        let mean: f64 = (0..n)
            .map(|_| 0.5 * gas.mass() * sample_thermal_velocity(&gas, &mut rng).norm_squared())
            .sum::<f64>()
            / n as f64;
        assert_relative_eq!(mean, gas.mean_kinetic_energy(), max_relative = 5e-3);
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(
            sample_thermal_velocity(&gas, &mut a),
            sample_thermal_velocity(&gas, &mut b)
        );
    }

    #[test]
    fn density_conventions() {
        assert_eq!(density_from_pressure(0.0, 4.0, DensityConvention::TwoThirds).unwrap(), 0.0);
        let p = crate::constants::torr_to_pa(2e-12);
        let n = density_from_pressure(p, 4.7, DensityConvention::TwoThirds).unwrap();
        assert!((n - 2.74e12).abs() < 0.02e12, "{n}");
        let ideal = density_from_pressure(p, 4.7, DensityConvention::IdealGas).unwrap();
        assert_relative_eq!(ideal, 1.5 * n, max_relative = 1e-15);
        assert!(density_from_pressure(p, 0.0, DensityConvention::IdealGas).is_err());
        let back = pressure_from_density(n, 4.7, DensityConvention::TwoThirds).unwrap();
        assert_relative_eq!(back, p, max_relative = 1e-14);
    }

    #[test]
    fn langevin_rate_examples() {
        let (gas, ion, _) = yb_h2();
        let k = langevin_rate_coefficient(&gas, &ion);
        assert!((k - 1.47e-15).abs() < 0.01e-15, "{k}");
        assert_eq!(langevin_rate(&gas, &ion, 0.0).unwrap(), 0.0);
        let n = density_from_pressure(crate::constants::torr_to_pa(2e-12), 4.7, DensityConvention::TwoThirds)
            .unwrap();
        let g = langevin_rate(&gas, &ion, n).unwrap();
        assert!((g - 4.0e-3).abs() < 0.1e-3, "{g}");
    }

    #[test]
    fn isotropic_direction_is_unit_and_centred() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 200_000;
        let mut sum = Vector3::zeros();
        for _ in 0..n {
            let d = isotropic_direction(&mut rng);
            assert!((d.norm() - 1.0).abs() < 1e-12);
            sum += d;
        }
        assert!((sum / n as f64).norm() < 0.01);
    }
}
