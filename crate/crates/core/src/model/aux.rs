//! Concentration functionals and their minimizers.

use super::{eval_potentials, PotentialSpec, RegionLambda};
use crate::error::{CoreError, Result};
use crate::util::golden_min;

/// Distance between the circles through `x = (s, r)` and `y`: the quotient
/// metric `sqrt((s_x - s_y)² + (r_x - r_y)²)` on the half-plane.
#[inline]
pub fn cyl_distance(x: (f64, f64), y: (f64, f64)) -> f64 {
    let ds = x.0 - y.0;
    let dr = x.1 - y.1;
    (ds * ds + dr * dr).sqrt()
}

/// Auxiliary potential locating circle concentration:
///
/// ```text
/// M(s, r) = E(1,1) · r · V^{(p+1)/(p-1) - 1} · K^{-2/(p-1)},
/// ```
///
/// with `M = +∞` where `K = 0`. `e11` is the cached ground energy `E(1,1)`
/// of the planar limit equation for this `p`.
pub fn auxiliary_potential_m(
    spec: &PotentialSpec,
    e11: f64,
    p: f64,
    s: f64,
    r: f64,
) -> Result<f64> {
    let (v, k, _) = eval_potentials(spec, s, r)?;
    if k == 0.0 {
        return Ok(f64::INFINITY);
    }
    let ev = (p + 1.0) / (p - 1.0) - 1.0;
    let ek = -2.0 / (p - 1.0);
    Ok(e11 * r * v.powf(ev) * k.powf(ek))
}

/// Concentration functional for point concentration:
///
/// ```text
/// A(s, r) = V^{(p+1)/(p-1) - 3/2} · K^{-2/(p-1)},
/// ```
///
/// again `+∞` where `K = 0` (and where `V = 0` with a negative exponent).
pub fn concentration_functional_a(spec: &PotentialSpec, p: f64, s: f64, r: f64) -> Result<f64> {
    let (v, k, _) = eval_potentials(spec, s, r)?;
    if k == 0.0 {
        return Ok(f64::INFINITY);
    }
    let ev = (p + 1.0) / (p - 1.0) - 1.5;
    let ek = -2.0 / (p - 1.0);
    if v == 0.0 && ev < 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(v.powf(ev) * k.powf(ek))
}

/// Outcome of minimizing M over the region's plane slice.
#[derive(Debug, Clone, Copy)]
pub struct MOnRingReport {
    /// Minimizer radius on the s = 0 slice.
    pub r_star: f64,
    /// inf of M over the open slice Λ ∩ π.
    pub interior_inf: f64,
    /// inf of M over ∂Λ ∩ π (the two slice endpoints).
    pub boundary_inf: f64,
    /// Whether the minimum is attained strictly inside the slice.
    pub interior: bool,
    /// 0 < inf_{Λ∩π} M < inf_{∂Λ∩π} M.
    pub hyp_strict_interior: bool,
    /// inf_{Λ∩π} M < 2 inf_Λ M.
    pub hyp_half_energy: bool,
    /// inf of M over the full 2D region Λ.
    pub lambda_inf: f64,
}

/// Minimize `M` over the slice Λ ∩ π by dense sampling plus golden-section
/// refinement; also evaluates the region hypotheses for this spec.
pub fn minimize_m_on_ring(
    spec: &PotentialSpec,
    e11: f64,
    p: f64,
    region: &RegionLambda,
    resolution: usize,
) -> Result<MOnRingReport> {
    let n = resolution.max(16);
    let (lo, hi) = region.slice();
    let m_at = |r: f64| auxiliary_potential_m(spec, e11, p, 0.0, r);
    // interior samples (open slice)
    let step = (hi - lo) / n as f64;
    let mut best = (lo + step, f64::INFINITY);
    let mut any_finite = false;
    for k in 1..n {
        let r = lo + step * k as f64;
        let m = m_at(r)?;
        if m.is_finite() {
            any_finite = true;
        }
        if m < best.1 {
            best = (r, m);
        }
    }
    if !any_finite {
        return Err(CoreError::NoMinimizer(
            "M is identically +infinity on the slice".into(),
        ));
    }
    let (r_star, interior_inf) = golden_min(
        |r| m_at(r).unwrap_or(f64::INFINITY),
        (best.0 - step).max(lo),
        (best.0 + step).min(hi),
        1e-10 * (hi - lo),
    );
    let boundary_inf = m_at(lo)?.min(m_at(hi)?);
    let interior = interior_inf < boundary_inf
        && r_star > lo + 0.5 * step
        && r_star < hi - 0.5 * step;

    // inf over the full 2D region by dense sampling of the ellipse
    let mut lambda_inf = f64::INFINITY;
    let nn = n.max(64);
    for a in 0..=nn {
        let s = -region.a_s + 2.0 * region.a_s * a as f64 / nn as f64;
        for b in 0..=nn {
            let r = region.r0 - region.a_r + 2.0 * region.a_r * b as f64 / nn as f64;
            if region.contains(s, r) {
                let m = auxiliary_potential_m(spec, e11, p, s, r)?;
                if m < lambda_inf {
                    lambda_inf = m;
                }
            }
        }
    }
    let lambda_inf = lambda_inf.min(interior_inf);

    Ok(MOnRingReport {
        r_star,
        interior_inf,
        boundary_inf,
        interior,
        hyp_strict_interior: interior_inf > 0.0 && interior_inf < boundary_inf,
        hyp_half_energy: interior_inf < 2.0 * lambda_inf,
        lambda_inf,
    })
}
