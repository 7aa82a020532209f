//! Linear Paul trap: Mathieu parameters, secular-frequency calibration and the
//! time-dependent RF + static force field.
//!
//! Coordinates: x is the trap axis, y and z are the RF (transverse) axes. The
//! RF potential is `Φ(r, t) = V g cos(Ω t) (y² − z²) / 2` with `g` the
//! geometric efficiency. Static curvatures `k_y`, `k_z` are solved so that the
//! exact (Floquet) secular frequencies equal the configured ones, rather than
//! relying on the lowest-order pseudopotential approximation.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::brent;
use crate::species::IonSpecies;

/// Maximum Mathieu q accepted for a trap.
pub const MAX_MATHIEU_Q: f64 = 0.9;

const FLOQUET_STEPS: usize = 4000;

/// Lowest-order Mathieu parameter q ≃ 2√2 ω_tr / Ω_rf.
pub fn mathieu_q(secular: f64, rf_frequency: f64) -> Result<f64> {
    if !(rf_frequency > 0.0) {
        return domain(format!("rf frequency must be positive, got {rf_frequency}"));
    }
    if !(secular >= 0.0) || secular >= 0.5 * rf_frequency {
        return domain(format!(
            "secular frequency {secular} outside [0, Ω_rf/2) for Ω_rf = {rf_frequency}; secular approximation invalid"
        ));
    }
    Ok(2.0 * std::f64::consts::SQRT_2 * secular / rf_frequency)
}

/// Power dissipated in the trap electrodes, P = ½ Ω² C² V² R.
pub fn power_dissipated(
    rf_amplitude: f64,
    trap_capacitance: f64,
    trap_resistance: f64,
    rf_frequency: f64,
) -> Result<f64> {
    for (name, v) in [
        ("rf amplitude", rf_amplitude),
        ("trap capacitance", trap_capacitance),
        ("trap resistance", trap_resistance),
        ("rf frequency", rf_frequency),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return domain(format!("{name} must be non-negative, got {v}"));
        }
    }
    Ok(0.5
        * rf_frequency.powi(2)
        * trap_capacitance.powi(2)
        * rf_amplitude.powi(2)
        * trap_resistance)
}

/// Characteristic exponent β of the Mathieu equation y'' + (a − 2q cos 2τ) y = 0.
///
/// Computed from the monodromy matrix over one period π (RK4), using
/// cos(πβ) = tr(M)/2. Returns `None` outside the first stability region.
pub fn mathieu_beta(a: f64, q: f64) -> Option<f64> {
    let half_trace = monodromy_half_trace(a, q);
    if half_trace.abs() > 1.0 {
        None
    } else {
        Some(half_trace.acos() / std::f64::consts::PI)
    }
}

fn monodromy_half_trace(a: f64, q: f64) -> f64 {
    let h = std::f64::consts::PI / FLOQUET_STEPS as f64;
    // two fundamental solutions integrated together (RK4)
    let mut s = [[1.0, 0.0], [0.0, 1.0]];
    let mut w0 = a - 2.0 * q;
    for k in 0..FLOQUET_STEPS {
        let t = k as f64 * h;
        let wm = a - 2.0 * q * (2.0 * t + h).cos();
        let w1 = a - 2.0 * q * (2.0 * (t + h)).cos();
        for sol in s.iter_mut() {
            let (y, v) = (sol[0], sol[1]);
            let k1y = v;
            let k1v = -w0 * y;
            let k2y = v + 0.5 * h * k1v;
            let k2v = -wm * (y + 0.5 * h * k1y);
            let k3y = v + 0.5 * h * k2v;
            let k3v = -wm * (y + 0.5 * h * k2y);
            let k4y = v + h * k3v;
            let k4v = -w1 * (y + h * k3y);
            sol[0] = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            sol[1] = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        w0 = w1;
    }
    0.5 * (s[0][0] + s[1][1])
}

/// Solves for the Mathieu `a` that gives characteristic exponent `beta` at
/// fixed `q` (first stability region, 0 < beta < 1).
pub fn mathieu_a_for_beta(beta: f64, q: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return domain(format!("target Mathieu β must lie in (0, 1), got {beta}"));
    }
    // cos(πβ) decreases monotonically with a across the first stability
    // region; outside it the half trace exceeds ±1 on the matching side.
    let target = (std::f64::consts::PI * beta).cos();
    brent(
        |a| Ok(monodromy_half_trace(a, q) - target),
        -1.0 - q * q,
        1.0,
        1e-15,
    )
}

/// Geometric efficiency g [1/m²] such that a pure RF field (no static
/// curvature) of amplitude `rf_amplitude` at `rf_frequency` produces the
/// transverse secular frequency `secular`.
pub fn calibrate_geometric_efficiency(
    species: &IonSpecies,
    rf_frequency: f64,
    rf_amplitude: f64,
    secular: f64,
) -> Result<f64> {
    if !(rf_amplitude > 0.0) {
        return domain(format!("rf amplitude must be positive, got {rf_amplitude}"));
    }
    mathieu_q(secular, rf_frequency)?;
    let beta = 2.0 * secular / rf_frequency;
    // β(0, q) increases monotonically with q in the first region; cos(πβ)
    // decreases
    let target = (std::f64::consts::PI * beta).cos();
    let q = brent(
        |q| Ok(monodromy_half_trace(0.0, q) - target),
        0.0,
        MAX_MATHIEU_Q,
        1e-15,
    )?;
    Ok(q * species.mass() * rf_frequency.powi(2) / (2.0 * species.charge() * rf_amplitude))
}

/// Geometric efficiency of the reference blade trap: 480 V at 2π×24 MHz
/// gives a 2π×4 MHz transverse frequency for 171Yb+.
pub fn blade_trap_geometric_efficiency() -> f64 {
    use crate::constants::angular;
    calibrate_geometric_efficiency(&IonSpecies::yb171(), angular(24e6), 480.0, angular(4e6))
        .expect("reference calibration is in range")
}

/// Paul-trap parameterization. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapParameters {
    species: IonSpecies,
    rf_frequency: f64,
    rf_amplitude: f64,
    geometric_efficiency: f64,
    axial_frequency: f64,
    transverse_frequencies: [f64; 2],
    /// Static curvature [J/m²] along y and z.
    static_curvature: [f64; 2],
}

impl TrapParameters {
    /// Trap with a given RF amplitude; the static y and z curvatures are
    /// solved independently so the exact secular frequencies match.
    pub fn with_rf_amplitude(
        species: IonSpecies,
        rf_frequency: f64,
        rf_amplitude: f64,
        geometric_efficiency: f64,
        axial_frequency: f64,
        transverse_frequencies: [f64; 2],
    ) -> Result<Self> {
        check_frequencies(rf_frequency, axial_frequency, transverse_frequencies)?;
        if !(rf_amplitude > 0.0) || !(geometric_efficiency > 0.0) {
            return domain("rf amplitude and geometric efficiency must be positive");
        }
        let q = rf_q(&species, rf_frequency, rf_amplitude, geometric_efficiency);
        if q >= MAX_MATHIEU_Q {
            return domain(format!("Mathieu q = {q:.4} exceeds stability limit {MAX_MATHIEU_Q}"));
        }
        let mut static_curvature = [0.0; 2];
        for (k, w) in static_curvature.iter_mut().zip(transverse_frequencies) {
            let a = mathieu_a_for_beta(2.0 * w / rf_frequency, q)?;
            *k = a * species.mass() * rf_frequency.powi(2) / 4.0;
        }
        Ok(Self {
            species,
            rf_frequency,
            rf_amplitude,
            geometric_efficiency,
            axial_frequency,
            transverse_frequencies,
            static_curvature,
        })
    }

    /// Trap defined by its secular frequencies. The RF amplitude is chosen so
    /// that the static field satisfies Laplace's equation
    /// (k_x + k_y + k_z = 0 with k_x = m ω_x²).
    pub fn from_secular(
        species: IonSpecies,
        rf_frequency: f64,
        geometric_efficiency: f64,
        axial_frequency: f64,
        transverse_frequencies: [f64; 2],
    ) -> Result<Self> {
        check_frequencies(rf_frequency, axial_frequency, transverse_frequencies)?;
        if !(geometric_efficiency > 0.0) {
            return domain("geometric efficiency must be positive");
        }
        let m = species.mass();
        let scale = m * rf_frequency.powi(2) / 4.0;
        let a_axial = m * axial_frequency.powi(2) / scale;
        let [wy, wz] = transverse_frequencies;
        // residual of Laplace's equation as a function of q
        let laplace = |q: f64| -> Result<f64> {
            let ay = mathieu_a_for_beta(2.0 * wy / rf_frequency, q)?;
            let az = mathieu_a_for_beta(2.0 * wz / rf_frequency, q)?;
            Ok(ay + az + a_axial)
        };
        // lowest-order guess: ω_rf² = (ω_y² + ω_z² + ω_x²)/2
        let w_rf = ((wy * wy + wz * wz + axial_frequency.powi(2)) / 2.0).sqrt();
        let q0 = 2.0 * std::f64::consts::SQRT_2 * w_rf / rf_frequency;
        let q = brent(laplace, 0.5 * q0, (1.5 * q0).min(0.99 * MAX_MATHIEU_Q), 1e-14 * q0)?;
        let rf_amplitude = q * m * rf_frequency.powi(2) / (2.0 * species.charge() * geometric_efficiency);
        Self::with_rf_amplitude(
            species,
            rf_frequency,
            rf_amplitude,
            geometric_efficiency,
            axial_frequency,
            transverse_frequencies,
        )
    }

    pub fn species(&self) -> &IonSpecies {
        &self.species
    }
    pub fn rf_frequency(&self) -> f64 {
        self.rf_frequency
    }
    pub fn rf_amplitude(&self) -> f64 {
        self.rf_amplitude
    }
    pub fn geometric_efficiency(&self) -> f64 {
        self.geometric_efficiency
    }
    pub fn axial_frequency(&self) -> f64 {
        self.axial_frequency
    }
    pub fn transverse_frequencies(&self) -> [f64; 2] {
        self.transverse_frequencies
    }
    /// Secular frequencies (ω_x, ω_y, ω_z).
    pub fn secular_frequencies(&self) -> [f64; 3] {
        let [wy, wz] = self.transverse_frequencies;
        [self.axial_frequency, wy, wz]
    }
    pub fn static_curvature(&self) -> [f64; 2] {
        self.static_curvature
    }
    pub fn rf_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.rf_frequency
    }
    /// Transverse mode splitting ω_z − ω_y.
    pub fn transverse_split(&self) -> f64 {
        self.transverse_frequencies[1] - self.transverse_frequencies[0]
    }

    /// Exact Mathieu q of the RF drive, 2 e V g / (m Ω²).
    pub fn q(&self) -> f64 {
        rf_q(
            &self.species,
            self.rf_frequency,
            self.rf_amplitude,
            self.geometric_efficiency,
        )
    }

    /// RF field gradient coefficient e V g [J/m²].
    #[inline]
    pub fn rf_curvature(&self) -> f64 {
        self.species.charge() * self.rf_amplitude * self.geometric_efficiency
    }

    /// Transverse force (RF quadrupole plus static y/z curvature) on one ion.
    #[inline]
    pub fn transverse_force(&self, r: &Vector3<f64>, t: f64) -> Vector3<f64> {
        let c = self.rf_curvature() * (self.rf_frequency * t).cos();
        let [ky, kz] = self.static_curvature;
        Vector3::new(0.0, -(c + ky) * r.y, -(kz - c) * r.z)
    }

    /// Full single-ion trap force: transverse terms plus the harmonic axial
    /// term m ω_x² x.
    pub fn rf_force(&self, r: &Vector3<f64>, t: f64) -> Vector3<f64> {
        let mut f = self.transverse_force(r, t);
        f.x = -self.species.mass() * self.axial_frequency.powi(2) * r.x;
        f
    }

    /// Instantaneous potential energy of the transverse terms.
    pub fn transverse_energy(&self, r: &Vector3<f64>, t: f64) -> f64 {
        let c = self.rf_curvature() * (self.rf_frequency * t).cos();
        let [ky, kz] = self.static_curvature;
        0.5 * ((c + ky) * r.y * r.y + (kz - c) * r.z * r.z)
    }
}

fn rf_q(species: &IonSpecies, rf_frequency: f64, rf_amplitude: f64, g: f64) -> f64 {
    2.0 * species.charge().abs() * rf_amplitude * g / (species.mass() * rf_frequency.powi(2))
}

fn check_frequencies(rf: f64, axial: f64, transverse: [f64; 2]) -> Result<()> {
    let [wy, wz] = transverse;
    if !(axial > 0.0) {
        return domain(format!("axial frequency must be positive, got {axial}"));
    }
    if !(wy > axial && wz > axial) {
        return domain(format!(
            "transverse frequencies ({wy}, {wz}) must exceed the axial frequency {axial}"
        ));
    }
    if !(rf > 2.0 * wy.max(wz)) {
        return domain(format!(
            "rf frequency {rf} must exceed twice the largest transverse frequency"
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::angular;
    use approx::assert_relative_eq;

    #[test]
    fn mathieu_q_examples() {
        let q = mathieu_q(angular(2.97e6), angular(24e6)).unwrap();
        assert!((q - 0.350).abs() < 5e-4, "{q}");
        let q = mathieu_q(angular(4e6), angular(24e6)).unwrap();
        assert!((q - 0.471).abs() < 5e-4, "{q}");
        assert_eq!(mathieu_q(0.0, angular(24e6)).unwrap(), 0.0);
        assert!(mathieu_q(angular(12e6), angular(24e6)).is_err());
    }

    #[test]
    fn mathieu_q_is_linear() {
        let a = mathieu_q(1.0e6, 4.0e7).unwrap();
        let b = mathieu_q(2.0e6, 4.0e7).unwrap();
        let c = mathieu_q(1.0e6, 8.0e7).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-15);
        assert_relative_eq!(c, 0.5 * a, max_relative = 1e-15);
    }

    #[test]
    fn power_dissipated_examples() {
        let w = angular(24e6);
        let unit = power_dissipated(480.0, 1.5e-12, 1.0, w).unwrap();
        // resistance that gives the ~1 mW estimate
        let r = 1e-3 / unit;
        assert_relative_eq!(power_dissipated(480.0, 1.5e-12, r, w).unwrap(), 1e-3, max_relative = 1e-12);
        assert!(r > 0.05 && r < 1.0, "gold-layer resistance {r} ohm");
        assert_eq!(power_dissipated(0.0, 1.5e-12, r, w).unwrap(), 0.0);
        let p2 = power_dissipated(960.0, 1.5e-12, r, w).unwrap();
        assert_relative_eq!(p2, 4e-3, max_relative = 1e-12);
    }

    #[test]
    fn mathieu_beta_small_q_limit() {
        // β ≈ sqrt(a + q²/2) to lowest order
        let beta = mathieu_beta(0.0, 0.05).unwrap();
        assert_relative_eq!(beta, 0.05 / 2f64.sqrt(), max_relative = 2e-3);
        assert!(mathieu_beta(0.0, 0.95).is_none());
        assert!(mathieu_beta(-0.1, 0.1).is_none());
    }

    #[test]
    fn a_for_beta_inverts_beta() {
        for &(beta, q) in &[(0.1, 0.2), (0.3, 0.35), (0.05, 0.05)] {
            let a = mathieu_a_for_beta(beta, q).unwrap();
            assert_relative_eq!(mathieu_beta(a, q).unwrap(), beta, max_relative = 1e-10);
        }
    }

    #[test]
    fn blade_calibration_reproduces_4_mhz() {
        let g = blade_trap_geometric_efficiency();
        let yb = IonSpecies::yb171();
        let q = rf_q(&yb, angular(24e6), 480.0, g);
        let beta = mathieu_beta(0.0, q).unwrap();
        assert_relative_eq!(beta * angular(24e6) / 2.0, angular(4e6), max_relative = 1e-10);
        // the exact q differs from the lowest-order 0.471 by a few percent
        assert!((q - 0.471).abs() < 0.03, "{q}");
    }

    #[test]
    fn from_secular_satisfies_laplace() {
        let yb = IonSpecies::yb171();
        let trap = TrapParameters::from_secular(
            yb,
            angular(24e6),
            blade_trap_geometric_efficiency(),
            angular(67e3),
            [angular(613e3), angular(632e3)],
        )
        .unwrap();
        let [ky, kz] = trap.static_curvature();
        let kx = yb.mass() * angular(67e3).powi(2);
        assert!((kx + ky + kz).abs() < 1e-9 * kx, "{kx} {ky} {kz}");
        assert!(trap.q() < 0.1);
    }

    #[test]
    fn field_null_at_origin() {
        let trap = TrapParameters::from_secular(
            IonSpecies::yb171(),
            angular(24e6),
            blade_trap_geometric_efficiency(),
            angular(67e3),
            [angular(613e3), angular(632e3)],
        )
        .unwrap();
        for t in [0.0, 1.3e-8, 7.7e-7] {
            assert_eq!(trap.rf_force(&Vector3::zeros(), t).norm(), 0.0);
        }
    }

    #[test]
    fn rf_force_is_periodic() {
        let trap = TrapParameters::from_secular(
            IonSpecies::yb171(),
            angular(24e6),
            blade_trap_geometric_efficiency(),
            angular(67e3),
            [angular(613e3), angular(632e3)],
        )
        .unwrap();
        let r = Vector3::new(1e-6, 2e-6, -3e-6);
        let t = 1.234e-8;
        let f0 = trap.rf_force(&r, t);
        let f1 = trap.rf_force(&r, t + 5.0 * trap.rf_period());
        assert!((f0 - f1).norm() <= 1e-9 * f0.norm());
    }

    #[test]
    fn invalid_traps_rejected() {
        let yb = IonSpecies::yb171();
        let g = blade_trap_geometric_efficiency();
        // transverse below axial
        assert!(TrapParameters::from_secular(yb, angular(24e6), g, angular(700e3), [angular(613e3), angular(632e3)]).is_err());
        // rf too slow
        assert!(TrapParameters::from_secular(yb, angular(1e6), g, angular(67e3), [angular(613e3), angular(632e3)]).is_err());
        // q too large
        assert!(TrapParameters::with_rf_amplitude(yb, angular(24e6), 2000.0, g, angular(67e3), [angular(3e6), angular(3.1e6)]).is_err());
    }
}
