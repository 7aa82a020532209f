use nalgebra::Vector3;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::state::{Internal, SystemState, GROUND};
use crate::collision::isotropic_direction;
use crate::constants::HBAR;
use crate::error::{domain, Result};

/// Longest cooling substep in units of 1/Γ.
pub const MAX_SUBSTEP_GAMMA: f64 = 0.05;

/// Doppler cooling beam on a two-level transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingParameters {
    wavelength: f64,
    linewidth: f64,
    detuning: f64,
    saturation: f64,
    beam_direction: [f64; 3],
    recoil: bool,
}

impl CoolingParameters {
    /// `linewidth` Γ and `detuning` Δ in rad/s; `beam_direction` is
    /// normalized.
    pub fn new(
        wavelength: f64,
        linewidth: f64,
        detuning: f64,
        saturation: f64,
        beam_direction: [f64; 3],
    ) -> Result<Self> {
        if !(wavelength > 0.0) {
            return domain(format!("wavelength must be positive, got {wavelength}"));
        }
        if !(linewidth > 0.0) {
            return domain(format!("linewidth must be positive, got {linewidth}"));
        }
        if !(saturation >= 0.0) {
            return domain(format!("saturation must be non-negative, got {saturation}"));
        }
        if !detuning.is_finite() {
            return domain("detuning must be finite");
        }
        let d = Vector3::from(beam_direction);
        let norm = d.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return domain("beam direction must be a nonzero vector");
        }
        let d = d / norm;
        Ok(Self {
            wavelength,
            linewidth,
            detuning,
            saturation,
            beam_direction: [d.x, d.y, d.z],
            recoil: true,
        })
    }

    /// ¹⁷¹Yb⁺ at 369 nm, Γ = 2π×19 MHz, Δ = −Γ/2, s = 1, along `beam_direction`.
    pub fn yb171(beam_direction: [f64; 3]) -> Self {
        let gamma = 2.0 * PI * 19e6;
        Self::new(369.5e-9, gamma, -0.5 * gamma, 1.0, beam_direction).expect("valid preset")
    }

    /// Disables photon recoil (rate studies).
    pub fn without_recoil(mut self) -> Self {
        self.recoil = false;
        self
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
    pub fn linewidth(&self) -> f64 {
        self.linewidth
    }
    pub fn detuning(&self) -> f64 {
        self.detuning
    }
    pub fn saturation(&self) -> f64 {
        self.saturation
    }
    pub fn beam_direction(&self) -> Vector3<f64> {
        Vector3::from(self.beam_direction)
    }
    pub fn recoil(&self) -> bool {
        self.recoil
    }
    /// Ω = Γ √(s/2).
    pub fn rabi(&self) -> f64 {
        self.linewidth * (0.5 * self.saturation).sqrt()
    }
    pub fn wavevector(&self) -> Vector3<f64> {
        self.beam_direction() * (2.0 * PI / self.wavelength)
    }

    /// Steady-state scattering rate Γ/2 · s/(1 + s + (2δ/Γ)²) at detuning δ.
    pub fn steady_state_rate(&self, delta: f64) -> f64 {
        let x = 2.0 * delta / self.linewidth;
        0.5 * self.linewidth * self.saturation / (1.0 + self.saturation + x * x)
    }

    /// Doppler limit ħΓ/2 [J].
    pub fn doppler_limit_energy(&self) -> f64 {
        0.5 * HBAR * self.linewidth
    }

    /// Number of cooling substeps covering a dynamics step `dt`.
    pub fn substeps(&self, dt: f64) -> usize {
        ((dt * self.linewidth / MAX_SUBSTEP_GAMMA).ceil() as usize).max(1)
    }
}

/// Propagates one amplitude pair under
/// H_eff = (δ/2)σz + (Ω/2)σx − (iΓ/4)(I − σz) for time `dt` using the exact
/// 2×2 exponential. Ground is the σz = +1 component.
pub fn propagate_internal(psi: &Internal, delta: f64, rabi: f64, gamma: f64, dt: f64) -> Internal {
    let (a, b, r) = (0.5 * delta, 0.25 * gamma, 0.5 * rabi);
    // w = √(hx² + hz²) with hz = a + ib, hx = r; either root gives the same U
    let (x, y) = (r * r + a * a - b * b, 2.0 * a * b);
    let m = (x * x + y * y).sqrt();
    let u = (0.5 * (m + x)).max(0.0).sqrt();
    let v = (0.5 * (m - x)).max(0.0).sqrt().copysign(y);
    let w = Complex64::new(u, v);
    let (c, s_over_w) = if m.sqrt() * dt < 1e-8 {
        (Complex64::new(1.0, 0.0), Complex64::new(dt, 0.0))
    } else {
        let (sp, cp) = (u * dt).sin_cos();
        let eq = (v * dt).exp();
        let (ch, sh) = (0.5 * (eq + 1.0 / eq), 0.5 * (eq - 1.0 / eq));
        (
            Complex64::new(cp * ch, -sp * sh),
            Complex64::new(sp * ch, cp * sh) / w,
        )
    };
    let damp = (-b * dt).exp();
    let hz = Complex64::new(a, b);
    let mi = Complex64::new(0.0, -1.0);
    // U = damp · [c I − i s/w (hx σx + hz σz)]
    let u00 = damp * (c + mi * s_over_w * hz);
    let u11 = damp * (c - mi * s_over_w * hz);
    let u01 = damp * (mi * s_over_w * r);
    [u00 * psi[0] + u01 * psi[1], u01 * psi[0] + u11 * psi[1]]
}

/// One quantum-trajectory substep for every cooled ion. Returns the number
/// of photon scattering events. `cooled[i] == false` marks a dark ion.
pub fn cooling_substep<R: Rng + ?Sized>(
    state: &mut SystemState,
    dt: f64,
    cooling: &CoolingParameters,
    mass: f64,
    cooled: Option<&[bool]>,
    rng: &mut R,
) -> usize {
    let k = cooling.wavevector();
    let recoil_speed = HBAR * k.norm() / mass;
    let beam = cooling.beam_direction();
    let rabi = cooling.rabi();
    let mut jumps = 0;
    for i in 0..state.len() {
        if cooled.is_some_and(|c| !c[i]) {
            continue;
        }
        let delta = cooling.detuning - k.dot(&state.velocities[i]);
        let next = propagate_internal(&state.internal[i], delta, rabi, cooling.linewidth, dt);
        let norm_sq = next[0].norm_sqr() + next[1].norm_sqr();
        if rng.random::<f64>() < norm_sq {
            let inv = 1.0 / norm_sq.sqrt();
            state.internal[i] = [next[0] * inv, next[1] * inv];
        } else {
            state.internal[i] = GROUND;
            if cooling.recoil {
                state.velocities[i] += (beam + isotropic_direction(rng)) * recoil_speed;
            }
            jumps += 1;
        }
    }
    jumps
}
