use nalgebra::Vector3;

use crate::axial::AxialPotential;
use crate::constants::coulomb_constant;
use crate::error::{Error, Result};
use crate::trap::TrapParameters;

/// Ions closer than this abort the integration.
pub const COINCIDENCE_DISTANCE: f64 = 1e-9;

/// Time-dependent conservative force on N identical ions.
pub trait ForceField {
    /// Mass of every ion [kg].
    fn mass(&self) -> f64;

    /// Writes the force on each ion at time `t` into `out`.
    fn forces(&self, positions: &[Vector3<f64>], t: f64, out: &mut [Vector3<f64>]) -> Result<()>;

    /// Instantaneous potential energy at time `t`.
    fn potential_energy(&self, positions: &[Vector3<f64>], t: f64) -> f64;
}

/// Axial confinement used by [`IonTrapField`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axial {
    /// m ω_x² x²/2 from the trap parameters.
    Harmonic,
    Quartic(AxialPotential),
}

/// RF quadrupole and static curvatures, axial potential and pairwise
/// Coulomb repulsion.
#[derive(Debug, Clone, PartialEq)]
pub struct IonTrapField {
    trap: TrapParameters,
    axial: Axial,
    coulomb: f64,
}

impl IonTrapField {
    pub fn new(trap: TrapParameters, axial: Axial) -> Self {
        let coulomb = coulomb_constant(trap.species().charge());
        Self {
            trap,
            axial,
            coulomb,
        }
    }

    pub fn harmonic(trap: TrapParameters) -> Self {
        Self::new(trap, Axial::Harmonic)
    }

    pub fn trap(&self) -> &TrapParameters {
        &self.trap
    }

    pub fn axial(&self) -> &Axial {
        &self.axial
    }

    #[inline]
    fn axial_force(&self, x: f64) -> f64 {
        match &self.axial {
            Axial::Harmonic => -self.trap.species().mass() * self.trap.axial_frequency().powi(2) * x,
            Axial::Quartic(p) => p.force(x),
        }
    }

    #[inline]
    fn axial_energy(&self, x: f64) -> f64 {
        match &self.axial {
            Axial::Harmonic => {
                0.5 * self.trap.species().mass() * self.trap.axial_frequency().powi(2) * x * x
            }
            Axial::Quartic(p) => p.energy(x),
        }
    }
}

/// Pairwise Coulomb forces; third law holds by construction.
pub fn coulomb_forces(
    coulomb: f64,
    positions: &[Vector3<f64>],
    out: &mut [Vector3<f64>],
) -> Result<()> {
    let n = positions.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let d = positions[i] - positions[j];
            let r2 = d.norm_squared();
            if !(r2 >= COINCIDENCE_DISTANCE * COINCIDENCE_DISTANCE) {
                return Err(Error::CoincidentIons {
                    i,
                    j,
                    separation: r2.sqrt(),
                });
            }
            let f = d * (coulomb / (r2 * r2.sqrt()));
            out[i] += f;
            out[j] -= f;
        }
    }
    Ok(())
}

pub fn coulomb_energy(coulomb: f64, positions: &[Vector3<f64>]) -> f64 {
    let mut e = 0.0;
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            e += coulomb / (positions[i] - positions[j]).norm();
        }
    }
    e
}

impl ForceField for IonTrapField {
    fn mass(&self) -> f64 {
        self.trap.species().mass()
    }

    fn forces(&self, positions: &[Vector3<f64>], t: f64, out: &mut [Vector3<f64>]) -> Result<()> {
        let c = self.trap.rf_curvature() * (self.trap.rf_frequency() * t).cos();
        let [ky, kz] = self.trap.static_curvature();
        let (cy, cz) = (c + ky, kz - c);
        for (f, r) in out.iter_mut().zip(positions) {
            *f = Vector3::new(self.axial_force(r.x), -cy * r.y, -cz * r.z);
        }
        coulomb_forces(self.coulomb, positions, out)?;
        for (i, f) in out.iter().enumerate() {
            if !(f.x.is_finite() && f.y.is_finite() && f.z.is_finite()) {
                return Err(Error::NonFiniteForce { ion: i, time: t });
            }
        }
        Ok(())
    }

    fn potential_energy(&self, positions: &[Vector3<f64>], t: f64) -> f64 {
        positions
            .iter()
            .map(|r| self.trap.transverse_energy(r, t) + self.axial_energy(r.x))
            .sum::<f64>()
            + coulomb_energy(self.coulomb, positions)
    }
}

/// Sum of the trap (RF + static + axial) and Coulomb forces on each ion.
pub fn total_force(
    positions: &[Vector3<f64>],
    t: f64,
    trap: &TrapParameters,
    axial: Option<&AxialPotential>,
) -> Result<Vec<Vector3<f64>>> {
    let field = IonTrapField::new(
        trap.clone(),
        axial.map_or(Axial::Harmonic, |p| Axial::Quartic(*p)),
    );
    let mut out = vec![Vector3::zeros(); positions.len()];
    field.forces(positions, t, &mut out)?;
    Ok(out)
}
