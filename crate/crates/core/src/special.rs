//! Special functions.

use std::f64::consts::FRAC_PI_2;

const AGM_MAX_ITER: usize = 64;

/// Complete elliptic integral of the first kind K(m), parameter convention
/// m = k².
///
/// Arithmetic-geometric mean: K(m) = π / (2 AGM(1, sqrt(1 - m))), iterated
/// until the two means agree to 1e-15 relative. Returns +inf at m = 1 and NaN
/// outside (-inf, 1].
pub fn ellipk(m: f64) -> f64 {
    if m.is_nan() || m > 1.0 {
        return f64::NAN;
    }
    if m == 1.0 {
        return f64::INFINITY;
    }
    if m == 0.0 {
        return FRAC_PI_2;
    }
    let mut a = 1.0;
    let mut g = (1.0 - m).sqrt();
    for _ in 0..AGM_MAX_ITER {
        if (a - g).abs() <= 1e-15 * a {
            break;
        }
        let next = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = next;
    }
    std::f64::consts::PI / (a + g)
}
