//! The symmetric concentration region Λ.

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// Axis-avoiding ellipse-of-revolution region in the (s, r) half-plane:
///
/// ```text
/// Λ = { (s, r) : (s / a_s)² + ((r - r0) / a_r)² < 1 },   r0 - a_r > 0.
/// ```
///
/// Rotated about the axis this is a solid torus, invariant under every
/// rotation fixing the axis, with closure disjoint from the axis and a
/// nonempty slice in the plane s = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionLambda {
    pub r0: f64,
    pub a_s: f64,
    pub a_r: f64,
}

impl RegionLambda {
    pub fn new(r0: f64, a_s: f64, a_r: f64) -> Result<RegionLambda> {
        if !(r0 > 0.0 && a_s > 0.0 && a_r > 0.0) {
            return Err(CoreError::Invariant(
                "region radii and half-widths must be positive".into(),
            ));
        }
        if r0 - a_r <= 0.0 {
            return Err(CoreError::Invariant(format!(
                "region closure touches the axis: r0 - a_r = {}",
                r0 - a_r
            )));
        }
        Ok(RegionLambda { r0, a_s, a_r })
    }

    /// Ring `r ∈ (r0 - a_r, r0 + a_r)` with the same s half-width.
    pub fn ring(r_lo: f64, r_hi: f64, a_s: f64) -> Result<RegionLambda> {
        RegionLambda::new(0.5 * (r_lo + r_hi), a_s, 0.5 * (r_hi - r_lo))
    }

    #[inline]
    pub fn contains(&self, s: f64, r: f64) -> bool {
        let a = s / self.a_s;
        let b = (r - self.r0) / self.a_r;
        a * a + b * b < 1.0
    }

    /// Radial extent of the slice Λ ∩ π (the plane s = 0).
    pub fn slice(&self) -> (f64, f64) {
        (self.r0 - self.a_r, self.r0 + self.a_r)
    }

    /// Distance (in the circle metric d_d) from an interior point to ∂Λ,
    /// by dense boundary sampling with local refinement.
    pub fn boundary_distance(&self, s: f64, r: f64) -> f64 {
        let d_to = |theta: f64| {
            let bs = self.a_s * theta.sin();
            let br = self.r0 + self.a_r * theta.cos();
            super::cyl_distance((s, r), (bs, br))
        };
        let n = 512;
        let mut best = (0usize, f64::INFINITY);
        for k in 0..n {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let d = d_to(th);
            if d < best.1 {
                best = (k, d);
            }
        }
        let th0 = 2.0 * std::f64::consts::PI * best.0 as f64 / n as f64;
        let span = 2.0 * std::f64::consts::PI / n as f64;
        let (_, d) = crate::util::golden_min(d_to, th0 - span, th0 + span, 1e-10);
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_avoidance_enforced() {
        assert!(RegionLambda::new(2.0, 1.0, 2.0).is_err());
        assert!(RegionLambda::new(2.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn contains_slice_points() {
        let lam = RegionLambda::ring(1.0, 3.0, 1.0).unwrap();
        assert!(lam.contains(0.0, 2.0));
        assert!(!lam.contains(0.0, 3.1));
        assert!(!lam.contains(1.5, 2.0));
        assert_eq!(lam.slice(), (1.0, 3.0));
    }

    #[test]
    fn boundary_distance_center() {
        let lam = RegionLambda::new(2.0, 1.0, 1.0).unwrap();
        // at the center the distance is min(a_s, a_r) = 1
        assert!((lam.boundary_distance(0.0, 2.0) - 1.0).abs() < 1e-6);
    }
}
