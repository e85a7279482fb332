//! Newtonian potential of cylindrically symmetric densities.
//!
//! For a nonnegative density `f(s, r)` (in practice `u^2 rho`), the
//! distributional solution of `-Δφ = f` is `φ = (4π|x|)^{-1} ⋆ f`. Reducing
//! the convolution over each source ring gives
//!
//! ```text
//! φ(s, r) = ∫∫ f(s', r') k(r, r', s - s') · 2π r' dr' ds',
//! k(r, r', Δs) = K(m) / (2π² √((r + r')² + Δs²)),
//! m = 4 r r' / ((r + r')² + Δs²),
//! ```
//!
//! where `K` is the complete elliptic integral of the first kind and `k` is
//! the potential at distance data `(r, Δs)` of a unit-mass ring of radius
//! `r'`. Everything here is direct summation over grid cells; the self-cell
//! uses a 4-point Gauss average displaced off the logarithmic singularity.

mod field;

pub use field::{Axis, CylField};

use crate::error::{CoreError, Result};
use crate::util::par_sum;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Complete elliptic integral of the first kind K(m), parameter convention
/// `m = k²`, computed by the arithmetic–geometric mean iteration.
///
/// K(0) = π/2, K(m) → ∞ as m → 1.
pub fn ellipk(m: f64) -> f64 {
    if m < 0.0 || m > 1.0 {
        return f64::NAN;
    }
    if m == 1.0 {
        return f64::INFINITY;
    }
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..40 {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        if (an - bn).abs() < 1e-16 * an {
            return PI / (2.0 * an);
        }
        a = an;
        b = bn;
    }
    PI / (2.0 * a)
}

/// Potential at field ring `(r, Δs)` of a unit-mass source ring of radius
/// `r'`: the angular average of `1/(4π|x - y|)` over the source circle.
///
/// Symmetric in `(r, r')`, even in `Δs`. The `r' → 0` limit is the axis
/// point source `1/(4π √(r² + Δs²))`. Singular exactly when the two rings
/// coincide (`m = 1`); callers must apply the self-cell rule there.
pub fn ring_kernel(r: f64, rp: f64, ds: f64) -> f64 {
    let sum = r + rp;
    let den2 = sum * sum + ds * ds;
    let m = 4.0 * r * rp / den2;
    ellipk(m) / (2.0 * PI * PI * den2.sqrt())
}

/// Self-interaction rule: kernel averaged over the cell by a 2x2 Gauss
/// sample of the source displaced off the ring singularity.
pub fn self_cell_kernel(r: f64, dr: f64, ds: f64) -> f64 {
    let g = 0.5 / 3.0_f64.sqrt();
    let (er, es) = (g * dr, g * ds);
    0.25 * (ring_kernel(r, r - er, es)
        + ring_kernel(r, r - er, -es)
        + ring_kernel(r, r + er, es)
        + ring_kernel(r, r + er, -es))
}

/// Newtonian potential `φ = (4π|x|)^{-1} ⋆ source` of a nonnegative
/// cylindrically symmetric density, by direct summation over cells.
pub fn newtonian_potential(source: &CylField) -> Result<CylField> {
    if source.values().iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(CoreError::Domain(
            "newtonian_potential requires a finite nonnegative source".into(),
        ));
    }
    Ok(potential_impl(source, 0.0, None))
}

/// Direct summation core. `rel_threshold` drops source cells whose |mass| is
/// below `rel_threshold * max|mass|`; `targets` restricts evaluation to
/// flagged cells (others get 0). Kernel values are cached per target row on
/// the exact `base/2` lattice of s-separations.
pub(crate) fn potential_impl(
    source: &CylField,
    rel_threshold: f64,
    targets: Option<&[bool]>,
) -> CylField {
    let ns = source.ns();
    let nr = source.nr();
    let s_ic = source.s_axis().icoords();
    let half_base = 0.5 * source.s_axis().base();
    let rc: Vec<f64> = source.r_axis().centers().to_vec();
    let rw = source.r_axis().widths();
    let sw = source.s_axis().widths();

    // compressed nonnegligible sources, grouped by r-row
    let mut max_mass = 0.0_f64;
    let mut masses = vec![0.0; ns * nr];
    for j in 0..nr {
        for i in 0..ns {
            let m = source.get(i, j) * source.volume(i, j);
            masses[j * ns + i] = m;
            max_mass = max_mass.max(m.abs());
        }
    }
    let cut = rel_threshold * max_mass;
    let rows: Vec<(usize, Vec<(usize, f64)>)> = (0..nr)
        .filter_map(|j| {
            let row: Vec<(usize, f64)> = (0..ns)
                .filter(|&i| masses[j * ns + i].abs() > cut)
                .map(|i| (i, masses[j * ns + i]))
                .collect();
            if row.is_empty() {
                None
            } else {
                Some((j, row))
            }
        })
        .collect();

    let n_ds = (s_ic[ns - 1] - s_ic[0]) as usize + 1;
    let mut out = CylField::zeros(source.s_axis().clone(), source.r_axis().clone()).unwrap();
    out.values_mut()
        .par_chunks_mut(ns)
        .enumerate()
        .for_each(|(jt, out_row)| {
            let rt = rc[jt];
            let mut cache = vec![f64::NAN; nr * n_ds];
            for (it, out_v) in out_row.iter_mut().enumerate() {
                if let Some(mask) = targets {
                    if !mask[jt * ns + it] {
                        continue;
                    }
                }
                let ict = s_ic[it];
                let mut acc = 0.0;
                for (js, row) in &rows {
                    let js = *js;
                    let cache_row = js * n_ds;
                    let rs = rc[js];
                    for &(is, m) in row {
                        let di = (ict - s_ic[is]).unsigned_abs() as usize;
                        if di == 0 && js == jt {
                            // self cell
                            acc += m * self_cell_kernel(rt, rw[jt], sw[it]);
                            continue;
                        }
                        let slot = cache_row + di;
                        let mut k = cache[slot];
                        if k.is_nan() {
                            k = ring_kernel(rt, rs, di as f64 * half_base);
                            cache[slot] = k;
                        }
                        acc += m * k;
                    }
                }
                *out_v = acc;
            }
        });
    out
}

/// Potential of `source` at an arbitrary point `(s, r)` of the half-plane.
/// Source cells containing the point fall back to the Gauss self rule.
pub fn potential_at(source: &CylField, s: f64, r: f64) -> Result<f64> {
    if source.values().iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(CoreError::Domain(
            "potential_at requires a finite nonnegative source".into(),
        ));
    }
    let ns = source.ns();
    let sc = source.s_axis().centers();
    let rc = source.r_axis().centers();
    let sw = source.s_axis().widths();
    let rw = source.r_axis().widths();
    let g = 0.5 / 3.0_f64.sqrt();
    let partial: Vec<f64> = (0..source.nr())
        .into_par_iter()
        .map(|j| {
            let mut acc = 0.0;
            for i in 0..ns {
                let m = source.get(i, j) * source.volume(i, j);
                if m == 0.0 {
                    continue;
                }
                let ds = s - sc[i];
                let dr = r - rc[j];
                if ds.abs() < 0.5 * sw[i] && dr.abs() < 0.5 * rw[j] {
                    let (er, es) = (g * rw[j], g * sw[i]);
                    acc += m
                        * 0.25
                        * (ring_kernel(r, rc[j] - er, ds - es)
                            + ring_kernel(r, rc[j] - er, ds + es)
                            + ring_kernel(r, rc[j] + er, ds - es)
                            + ring_kernel(r, rc[j] + er, ds + es));
                } else {
                    acc += m * ring_kernel(r, rc[j], ds);
                }
            }
            acc
        })
        .collect();
    Ok(partial.iter().sum())
}

/// Interaction energy `D(f, g) = ∫∫ f(x) g(y) / |x - y| dx dy` for
/// nonnegative densities, via the same ring average (without the `1/4π`).
pub fn interaction_energy(f: &CylField, g: &CylField) -> Result<f64> {
    for fld in [f, g] {
        if fld.values().iter().any(|&v| v < 0.0 || !v.is_finite()) {
            return Err(CoreError::Domain(
                "interaction_energy requires finite nonnegative densities".into(),
            ));
        }
    }
    let same = f.same_grid(g);
    let ns_f = f.ns();
    let ns_g = g.ns();
    let sc_f = f.s_axis().centers();
    let sc_g = g.s_axis().centers();
    let rc_f = f.r_axis().centers();
    let rc_g = g.r_axis().centers();
    let rw_f = f.r_axis().widths();
    let sw_f = f.s_axis().widths();
    let partials: Vec<f64> = (0..f.nr())
        .into_par_iter()
        .map(|jf| {
            let mut acc = 0.0;
            for i_f in 0..ns_f {
                let mf = f.get(i_f, jf) * f.volume(i_f, jf);
                if mf == 0.0 {
                    continue;
                }
                for jg in 0..g.nr() {
                    for ig in 0..ns_g {
                        let mg = g.get(ig, jg) * g.volume(ig, jg);
                        if mg == 0.0 {
                            continue;
                        }
                        let k = if same && ig == i_f && jg == jf {
                            self_cell_kernel(rc_f[jf], rw_f[jf], sw_f[i_f])
                        } else {
                            ring_kernel(rc_f[jf], rc_g[jg], sc_f[i_f] - sc_g[ig])
                        };
                        acc += mf * mg * k;
                    }
                }
            }
            acc
        })
        .collect();
    Ok(4.0 * PI * partials.iter().sum::<f64>())
}

/// Volume-weighted L2 norm of the defect `-Δ_cyl φ - source` on interior
/// cells, relative to the source norm (absolute when the source vanishes).
/// Interior excludes cells adjacent to the outer truncation boundaries; the
/// axis row is interior (the scheme's natural boundary there is exact).
pub fn poisson_residual(phi: &CylField, source: &CylField) -> Result<f64> {
    if !phi.same_grid(source) {
        return Err(CoreError::Grid(
            "poisson_residual requires matching grids".into(),
        ));
    }
    let lap = phi.laplacian();
    let ns = phi.ns();
    let nr = phi.nr();
    let mut defect2 = Vec::with_capacity((nr - 1) * (ns - 2));
    let mut src2 = Vec::with_capacity((nr - 1) * (ns - 2));
    for j in 0..nr.saturating_sub(1) {
        for i in 1..ns.saturating_sub(1) {
            let vol = phi.volume(i, j);
            let d = -lap.get(i, j) - source.get(i, j);
            defect2.push(d * d * vol);
            let s = source.get(i, j);
            src2.push(s * s * vol);
        }
    }
    let dn = par_sum(&defect2).sqrt();
    let sn = par_sum(&src2).sqrt();
    Ok(if sn > 0.0 { dn / sn } else { dn })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64, msg: &str) {
        assert!(
            (a - b).abs() <= tol * b.abs().max(1.0),
            "{msg}: {a} vs {b} (tol {tol})"
        );
    }

    /// Angular average of 1/(4π|x-y|) over a unit-mass ring, by trapezoid
    /// quadrature with an m-adaptive point count (the integrand's
    /// analyticity strip shrinks like sqrt(1-m)).
    fn ring_kernel_quadrature(r: f64, rp: f64, ds: f64) -> f64 {
        let a = ds * ds + r * r + rp * rp;
        let b = 2.0 * r * rp;
        let m = 2.0 * b / (a + b);
        let n = (512.0f64.max(60.0 / (1.0 - m).max(1e-12).sqrt())) as usize;
        let mut acc = 0.0;
        for k in 0..n {
            let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
            acc += 1.0 / (a - b * th.cos()).sqrt();
        }
        acc / (n as f64) / (4.0 * PI)
    }

    #[test]
    fn ellipk_special_values() {
        assert_close(ellipk(0.0), PI / 2.0, 1e-15, "K(0)");
        // K(0.5) from standard tables
        assert_close(ellipk(0.5), 1.854_074_677_301_372, 1e-12, "K(0.5)");
        assert!(ellipk(1.0).is_infinite());
        assert!(ellipk(-0.1).is_nan());
    }

    #[test]
    fn kernel_matches_angular_quadrature() {
        // unit ring, field point at r = 2 in the ring plane
        let k = ring_kernel(2.0, 1.0, 0.0);
        let q = ring_kernel_quadrature(2.0, 1.0, 0.0);
        assert!((k - q).abs() < 1e-8 * q, "{k} vs {q}");
    }

    #[test]
    fn kernel_agm_vs_quadrature_parameter_sweep() {
        // log-spaced distances from the singularity: m in [0, 1 - 1e-6]
        for &one_minus_m in &[1.0, 0.3, 0.1, 1e-2, 1e-3, 1e-4, 1e-6] {
            // realize target m with r = rp = 1 and ds chosen accordingly:
            // m = 4/(4 + ds^2) => ds^2 = 4 (1 - m)/m
            let m: f64 = 1.0 - one_minus_m;
            if m <= 0.0 {
                let k = ring_kernel(1.0, 1.0, 1e9);
                let q = ring_kernel_quadrature(1.0, 1.0, 1e9);
                assert!((k - q).abs() <= 1e-8 * q);
                continue;
            }
            let ds = (4.0 * (1.0 - m) / m).sqrt();
            let k = ring_kernel(1.0, 1.0, ds);
            let q = ring_kernel_quadrature(1.0, 1.0, ds);
            assert!(
                (k - q).abs() <= 1e-8 * q,
                "m={m}: {k} vs {q}, rel {}",
                (k - q).abs() / q
            );
        }
    }

    #[test]
    fn kernel_point_source_limit() {
        // r' -> 0 approaches the on-axis point source 1/(4π sqrt(r² + Δs²))
        let k = ring_kernel(1.5, 1e-9, 0.7);
        let point = 1.0 / (4.0 * PI * (1.5f64 * 1.5 + 0.49).sqrt());
        assert_close(k, point, 1e-8, "point-source limit");
    }

    #[test]
    fn kernel_symmetry_and_evenness() {
        let (a, b) = (ring_kernel(1.2, 0.4, 0.3), ring_kernel(0.4, 1.2, 0.3));
        assert!((a - b).abs() < 1e-15);
        let (c, d) = (ring_kernel(1.2, 0.4, -0.3), ring_kernel(1.2, 0.4, 0.3));
        assert!((c - d).abs() < 1e-15);
    }

    /// Radial reduction of the 3D quadrature for a radial source: potential
    /// of a spherical shell is 1/max(|x|, s), so
    /// φ(t) = (1/t)∫_0^t ρ(s) s² ds + ∫_t^∞ ρ(s) s ds.
    fn radial_oracle(rho: impl Fn(f64) -> f64 + Copy, t: f64, r_sup: f64) -> f64 {
        let inner = crate::util::adaptive_simpson(|s| rho(s) * s * s, 0.0, t.min(r_sup), 1e-12);
        let outer = if t < r_sup {
            crate::util::adaptive_simpson(|s| rho(s) * s, t, r_sup, 1e-12)
        } else {
            0.0
        };
        inner / t.max(1e-300) + outer
    }

    /// Fixed-grid 3D product midpoint quadrature of ∫ f(y)/(4π|x-y|) dy for
    /// a target outside the support (integrand smooth there).
    fn box_oracle_outside(
        f: impl Fn(f64, f64, f64) -> f64,
        target: [f64; 3],
        half: f64,
        n: usize,
    ) -> f64 {
        let h = 2.0 * half / n as f64;
        let mut acc = 0.0;
        for ix in 0..n {
            let x = -half + (ix as f64 + 0.5) * h;
            for iy in 0..n {
                let y = -half + (iy as f64 + 0.5) * h;
                for iz in 0..n {
                    let z = -half + (iz as f64 + 0.5) * h;
                    let v = f(x, y, z);
                    if v != 0.0 {
                        let d = ((x - target[0]).powi(2)
                            + (y - target[1]).powi(2)
                            + (z - target[2]).powi(2))
                        .sqrt();
                        acc += v / d;
                    }
                }
            }
        }
        acc * h * h * h / (4.0 * PI)
    }

    fn unit_ball_source(h: f64) -> CylField {
        // partial-volume weights on boundary cells via 4x4 subsampling
        let ns = (2.5 / h).round() as usize * 2 + 1;
        let s_min = -(ns as f64) * h / 2.0;
        let nr = (1.2 / h).round() as usize;
        let s = Axis::uniform(s_min, h, ns).unwrap();
        let r = Axis::uniform(0.0, h, nr).unwrap();
        CylField::from_fn(s, r, |sc, rc| {
            let d2 = sc * sc + rc * rc;
            let margin = 2.0 * h;
            if d2 < (1.0 - margin) * (1.0 - margin) {
                1.0
            } else if d2 > (1.0 + margin) * (1.0 + margin) {
                0.0
            } else {
                let mut inside = 0usize;
                for a in 0..4 {
                    for b in 0..4 {
                        let ss = sc + ((a as f64 + 0.5) / 4.0 - 0.5) * h;
                        let rr = rc + ((b as f64 + 0.5) / 4.0 - 0.5) * h;
                        if ss * ss + rr * rr <= 1.0 {
                            inside += 1;
                        }
                    }
                }
                inside as f64 / 16.0
            }
        })
        .unwrap()
    }

    #[test]
    fn unit_ball_potential_classical_values() {
        // uniform density 1 on the unit ball: φ = 1/2 at the center and
        // 1/(3|x|) outside, so 1/6 at |x| = 2. Confirm the classical values
        // with the independent quadrature oracles first.
        let rho = |t: f64| if t <= 1.0 { 1.0 } else { 0.0 };
        let oracle_center = radial_oracle(rho, 1e-9, 1.0);
        let oracle_out = radial_oracle(rho, 2.0, 1.0);
        assert_close(oracle_center, 0.5, 1e-6, "radial oracle at center");
        assert_close(oracle_out, 1.0 / 6.0, 1e-6, "radial oracle at |x|=2");
        let box_out = box_oracle_outside(
            |x, y, z| {
                if x * x + y * y + z * z <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            },
            [2.0, 0.0, 0.0],
            1.0,
            120,
        );
        assert_close(box_out, 1.0 / 6.0, 2e-3, "3D box oracle at |x|=2");

        let h = 1.0 / 64.0;
        let src = unit_ball_source(h);
        // (s, r) = (2, h/2) is |x| ≈ 2; (0, h/2) is the center
        let phi_out = potential_at(&src, 2.0, h / 2.0).unwrap();
        let phi_center = potential_at(&src, 0.0, h / 2.0).unwrap();
        assert_close(phi_out, 1.0 / 6.0, 1e-3, "discrete potential at |x|=2");
        assert_close(phi_center, 0.5, 1e-3, "discrete potential at center");
    }

    #[test]
    fn gaussian_source_matches_radial_oracle() {
        let w = 0.6;
        let h = 1.0 / 32.0;
        let ns = 160;
        let s = Axis::uniform(-(ns as f64) * h / 2.0, h, ns).unwrap();
        let r = Axis::uniform(0.0, h, 80).unwrap();
        let src = CylField::from_fn(s, r, |sc, rc| (-(sc * sc + rc * rc) / (w * w)).exp()).unwrap();
        let rho = |t: f64| (-(t * t) / (w * w)).exp();
        for &(sp, rp) in &[(0.0f64, 0.9f64), (1.5, 0.2), (0.4, 0.4)] {
            let t = (sp * sp + rp * rp).sqrt();
            let oracle = radial_oracle(rho, t, 2.5);
            let phi = potential_at(&src, sp, rp).unwrap();
            assert_close(phi, oracle, 1e-3, &format!("gaussian at ({sp},{rp})"));
        }
    }

    #[test]
    fn zero_source_gives_zero_potential() {
        let src = CylField::uniform(-1.0, 0.25, 8, 0.25, 4).unwrap();
        let phi = newtonian_potential(&src).unwrap();
        assert!(phi.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn negative_source_rejected() {
        let mut src = CylField::uniform(-1.0, 0.25, 8, 0.25, 4).unwrap();
        src.set(1, 1, -1.0);
        assert!(matches!(
            newtonian_potential(&src),
            Err(CoreError::Domain(_))
        ));
    }

    #[test]
    fn potential_positive_and_far_field_mass() {
        // compact bump; far field must approach M/(4π|x|) within 1% at 10x
        // the support radius, and φ decreases along the outward ray.
        let h = 1.0 / 24.0;
        let s = Axis::uniform(-0.75, h, 36).unwrap();
        let r = Axis::uniform(0.0, h, 18).unwrap();
        let src = CylField::from_fn(s, r, |sc, rc| {
            let d2 = (sc * sc + rc * rc) / 0.25;
            if d2 < 1.0 {
                (1.0 - d2).powi(2)
            } else {
                0.0
            }
        })
        .unwrap();
        let phi = newtonian_potential(&src).unwrap();
        assert!(phi.values().iter().all(|&v| v >= 0.0));
        let mut mass = 0.0;
        for j in 0..src.nr() {
            for i in 0..src.ns() {
                mass += src.get(i, j) * src.volume(i, j);
            }
        }
        let far = 5.0; // support radius 0.5, evaluate at 10x
        let phi_far = potential_at(&src, 0.0, far).unwrap();
        assert_close(
            4.0 * PI * far * phi_far,
            mass,
            1e-2,
            "far-field mass recovery",
        );
        let mut prev = f64::INFINITY;
        for k in 1..=8 {
            let v = potential_at(&src, 0.0, 0.75 + 0.5 * k as f64).unwrap();
            assert!(v < prev, "potential not decreasing along ray");
            prev = v;
        }
    }

    #[test]
    fn residual_zero_fields() {
        let z = CylField::uniform(-1.0, 0.25, 8, 0.25, 6).unwrap();
        assert_eq!(poisson_residual(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn residual_of_harmonic_far_field() {
        // φ = 1/(4π|x|) away from the source region is harmonic; the FV
        // Laplacian applied to it must be small in the absolute norm.
        let h = 1.0 / 64.0;
        let s = Axis::uniform(3.0, h, 48).unwrap();
        let r = Axis::uniform(0.0, h, 48).unwrap();
        let phi = CylField::from_fn(s.clone(), r.clone(), |sc, rc| {
            1.0 / (4.0 * PI * (sc * sc + rc * rc).sqrt())
        })
        .unwrap();
        let zero = CylField::zeros(s, r).unwrap();
        let res = poisson_residual(&phi, &zero).unwrap();
        assert!(res < 1e-6, "harmonic residual {res}");
    }

    #[test]
    fn residual_refinement_study() {
        // smooth compact bump: relative residual < 1e-2 at h = 1/64 and
        // decreasing at roughly second order under refinement
        let mut res = Vec::new();
        for &n in &[16usize, 32, 64] {
            let h = 1.0 / n as f64;
            let ns = (2.2 / h) as usize;
            let s = Axis::uniform(-(ns as f64) * h / 2.0, h, ns).unwrap();
            let r = Axis::uniform(0.0, h, (1.1 / h) as usize).unwrap();
            let src = CylField::from_fn(s, r, |sc, rc| {
                let d2 = (sc * sc + rc * rc) / 0.49;
                if d2 < 1.0 {
                    (1.0 - d2).powi(3)
                } else {
                    0.0
                }
            })
            .unwrap();
            let phi = newtonian_potential(&src).unwrap();
            res.push(poisson_residual(&phi, &src).unwrap());
        }
        assert!(res[2] < 1e-2, "residual at h=1/64: {}", res[2]);
        assert!(res[0] > res[1] && res[1] > res[2], "not decreasing: {res:?}");
        let order = (res[0] / res[2]).log2() / 2.0;
        assert!(order > 1.4, "observed order {order} ({res:?})");
    }

    #[test]
    fn interaction_energy_properties() {
        let s = Axis::uniform(-0.8, 0.1, 16).unwrap();
        let r = Axis::uniform(0.0, 0.1, 10).unwrap();
        let f = CylField::from_fn(s.clone(), r.clone(), |sc, rc| {
            (-(sc * sc + (rc - 0.4) * (rc - 0.4)) * 8.0).exp()
        })
        .unwrap();
        let zero = CylField::zeros(s, r).unwrap();
        assert_eq!(interaction_energy(&f, &zero).unwrap(), 0.0);
        // D(f, f) = 4π ∫ φ_f f dV with this 1/4π convention
        let phi = newtonian_potential(&f).unwrap();
        let mut dot = 0.0;
        for j in 0..f.nr() {
            for i in 0..f.ns() {
                dot += phi.get(i, j) * f.get(i, j) * f.volume(i, j);
            }
        }
        let d = interaction_energy(&f, &f).unwrap();
        assert_close(d, 4.0 * PI * dot, 1e-12, "D vs 4π∫φf");
    }

    #[test]
    fn potential_impl_threshold_consistency() {
        let s = Axis::uniform(-0.8, 0.1, 16).unwrap();
        let r = Axis::uniform(0.0, 0.1, 12).unwrap();
        let src = CylField::from_fn(s, r, |sc, rc| {
            (-(sc * sc + (rc - 0.5) * (rc - 0.5)) * 12.0).exp()
        })
        .unwrap();
        let full = newtonian_potential(&src).unwrap();
        let thr = potential_impl(&src, 1e-14, None);
        let max = full.values().iter().cloned().fold(0.0f64, f64::max);
        for (a, b) in full.values().iter().zip(thr.values()) {
            assert!((a - b).abs() <= 1e-10 * max);
        }
    }
}
