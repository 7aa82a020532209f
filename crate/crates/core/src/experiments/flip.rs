use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Default flip threshold on the summed squared displacement [m²].
pub const DEFAULT_FLIP_THRESHOLD: f64 = 22e-12;

fn sorted_by_x(p: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let mut v = p.to_vec();
    v.sort_by(|a, b| a.x.total_cmp(&b.x));
    v
}

/// Σ|r_i − r'_i|² after sorting both configurations by x [m²].
pub fn flip_distance(initial: &[Vector3<f64>], final_: &[Vector3<f64>]) -> Result<f64> {
    if initial.len() != final_.len() {
        return domain(format!(
            "configurations differ in size: {} vs {}",
            initial.len(),
            final_.len()
        ));
    }
    Ok(sorted_by_x(initial)
        .iter()
        .zip(sorted_by_x(final_))
        .map(|(a, b)| (a - b).norm_squared())
        .sum())
}

/// True when the sorted summed squared displacement exceeds `threshold` [m²].
pub fn detect_flip(initial: &[Vector3<f64>], final_: &[Vector3<f64>], threshold: f64) -> Result<bool> {
    Ok(flip_distance(initial, final_)? > threshold)
}

/// Zig-zag partner: the configuration reflected through the chain axis.
pub fn mirror_configuration(p: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    p.iter().map(|r| Vector3::new(r.x, -r.y, -r.z)).collect()
}

/// Distance between a configuration and its mirror image, the natural
/// scale for the flip threshold of a given geometry [m²].
pub fn mirror_distance(p: &[Vector3<f64>]) -> f64 {
    flip_distance(p, &mirror_configuration(p)).expect("same size")
}

/// Classification of a relaxed final configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinalState {
    /// Within threshold of the initial configuration.
    Unflipped,
    /// Within threshold of the mirrored configuration.
    Flipped,
    /// Beyond threshold of both: another local minimum, typically half of
    /// the chain flipped.
    Partial,
}

impl FinalState {
    pub fn is_flip(self) -> bool {
        self != FinalState::Unflipped
    }
}

pub fn classify_final_state(
    initial: &[Vector3<f64>],
    final_: &[Vector3<f64>],
    threshold: f64,
) -> Result<FinalState> {
    if flip_distance(initial, final_)? <= threshold {
        Ok(FinalState::Unflipped)
    } else if flip_distance(&mirror_configuration(initial), final_)? <= threshold {
        Ok(FinalState::Flipped)
    } else {
        Ok(FinalState::Partial)
    }
}
