//! 2D gradient-flow solver for the limit equation, used as the independent
//! cross-check of the shooting oracle.
//!
//! The action is discretized on a Cartesian grid over [-l, l]² and driven
//! downhill with a preconditioned descent; after every step the iterate is
//! projected back to the Nehari set by the closed-form fiber maximizer
//!
//! ```text
//! t* = [ ∫(|∇u|² + a u²) / (b ∫ u₊^{p+1}) ]^{1/(p-1)},
//! ```
//!
//! along which the constrained minimum is an exact discrete critical point.

use super::GroundState2D;
use crate::error::{CoreError, Result};
use crate::limit2d::{radial_action, radial_nehari_parts};
use rayon::prelude::*;

/// Scalar field on a cell-centered Cartesian grid over [-l, l]².
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub n: usize,
    pub l: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

impl Field2D {
    pub fn zeros(n: usize, l: f64) -> Field2D {
        Field2D {
            n,
            l,
            h: 2.0 * l / n as f64,
            values: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, l: f64, mut f: impl FnMut(f64, f64) -> f64) -> Field2D {
        let mut fld = Field2D::zeros(n, l);
        let h = fld.h;
        for iy in 0..n {
            let y = -l + (iy as f64 + 0.5) * h;
            for ix in 0..n {
                let x = -l + (ix as f64 + 0.5) * h;
                fld.values[iy * n + ix] = f(x, y);
            }
        }
        fld
    }

    #[inline]
    fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.n + ix]
    }

    /// Bilinear interpolation, zero outside the cell-center hull.
    pub fn bilinear(&self, x: f64, y: f64) -> f64 {
        let n = self.n;
        let locate = |c: f64| -> Option<(usize, usize, f64)> {
            let t = (c + self.l) / self.h - 0.5;
            if t <= 0.0 {
                return if t > -0.5 { Some((0, 0, 0.0)) } else { None };
            }
            if t >= (n - 1) as f64 {
                return if t < n as f64 - 0.5 {
                    Some((n - 1, n - 1, 0.0))
                } else {
                    None
                };
            }
            let k = t as usize;
            Some((k, k + 1, t - k as f64))
        };
        match (locate(x), locate(y)) {
            (Some((x0, x1, tx)), Some((y0, y1, ty))) => {
                let v00 = self.get(x0, y0);
                let v10 = self.get(x1, y0);
                let v01 = self.get(x0, y1);
                let v11 = self.get(x1, y1);
                (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11)
            }
            _ => 0.0,
        }
    }
}

/// 5-point Laplacian with zero extension outside the box.
fn laplacian(u: &Field2D, out: &mut Field2D) {
    let n = u.n;
    let h2 = u.h * u.h;
    out.values
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(iy, row)| {
            for (ix, o) in row.iter_mut().enumerate() {
                let c = u.get(ix, iy);
                let l = if ix > 0 { u.get(ix - 1, iy) } else { 0.0 };
                let r = if ix + 1 < n { u.get(ix + 1, iy) } else { 0.0 };
                let d = if iy > 0 { u.get(ix, iy - 1) } else { 0.0 };
                let t = if iy + 1 < n { u.get(ix, iy + 1) } else { 0.0 };
                *o = (l + r + d + t - 4.0 * c) / h2;
            }
        });
}

/// `(∫(|∇u|² + a u²), ∫ u₊^{p+1})` of the discrete action.
fn quadratic_parts(u: &Field2D, a: f64, p: f64) -> (f64, f64) {
    let n = u.n;
    let h2 = u.h * u.h;
    let parts: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|iy| {
            let mut grad = 0.0;
            let mut pow = 0.0;
            for ix in 0..n {
                let c = u.get(ix, iy);
                // forward differences, ghost zero on the high side
                let gx = if ix + 1 < n { u.get(ix + 1, iy) - c } else { -c };
                let gy = if iy + 1 < n { u.get(ix, iy + 1) - c } else { -c };
                grad += gx * gx + gy * gy;
                // low-side boundary faces
                if ix == 0 {
                    grad += c * c;
                }
                if iy == 0 {
                    grad += c * c;
                }
                grad += a * c * c * h2;
                if c > 0.0 {
                    pow += c.powf(p + 1.0) * h2;
                }
            }
            (grad, pow)
        })
        .collect();
    let mut s = 0.0;
    let mut q = 0.0;
    for (g, pw) in parts {
        s += g;
        q += pw;
    }
    // the gradient faces carry (Δu/h)² h² = (Δu)²; a-term already scaled
    (s, q)
}

/// Discrete limit action `½∫(|∇u|² + a u²) - b/(p+1) ∫ u₊^{p+1}` by midpoint
/// quadrature with forward-difference gradients.
pub fn limit_functional(u: &Field2D, a: f64, b: f64, p: f64) -> f64 {
    let (s, q) = quadratic_parts(u, a, p);
    0.5 * s - b / (p + 1.0) * q
}

/// Discrete L² gradient `-Δu + a u - b u₊^p`.
fn gradient(u: &Field2D, a: f64, b: f64, p: f64, out: &mut Field2D) {
    laplacian(u, out);
    let n = u.n;
    out.values
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(iy, row)| {
            for (ix, o) in row.iter_mut().enumerate() {
                let c = u.get(ix, iy);
                let nonlin = if c > 0.0 { b * c.powf(p) } else { 0.0 };
                *o = -*o + a * c - nonlin;
            }
        });
}

/// CG solve of `(-Δ + a) x = rhs` (SPD), fixed iteration budget.
fn precondition(rhs: &Field2D, a: f64, iters: usize) -> Field2D {
    let n = rhs.n;
    let mut x = Field2D::zeros(n, rhs.l);
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut ap = Field2D::zeros(n, rhs.l);
    let dot = |u: &Field2D, v: &Field2D| -> f64 {
        u.values
            .par_chunks(4096)
            .zip(v.values.par_chunks(4096))
            .map(|(uc, vc)| uc.iter().zip(vc).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    };
    let mut rr = dot(&r, &r);
    let rr0 = rr;
    if rr0 == 0.0 {
        return x;
    }
    for _ in 0..iters {
        laplacian(&p, &mut ap);
        ap.values
            .par_chunks_mut(4096)
            .zip(p.values.par_chunks(4096))
            .for_each(|(apc, pc)| {
                for (av, pv) in apc.iter_mut().zip(pc) {
                    *av = -*av + a * pv;
                }
            });
        let alpha = rr / dot(&p, &ap);
        for (xv, pv) in x.values.iter_mut().zip(&p.values) {
            *xv += alpha * pv;
        }
        for (rv, av) in r.values.iter_mut().zip(&ap.values) {
            *rv -= alpha * av;
        }
        let rr_new = dot(&r, &r);
        if rr_new < 1e-8 * rr0 {
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pv, rv) in p.values.iter_mut().zip(&r.values) {
            *pv = rv + beta * *pv;
        }
    }
    x
}

/// Nehari fiber maximizer of the discrete action along t ↦ t u.
fn nehari_scale(u: &Field2D, a: f64, b: f64, p: f64) -> Result<f64> {
    let (s, q) = quadratic_parts(u, a, p);
    if q <= 0.0 {
        return Err(CoreError::solver("iterate has no positive part"));
    }
    Ok((s / (b * q)).powf(1.0 / (p - 1.0)))
}

/// Outcome of the gradient flow.
#[derive(Debug, Clone)]
pub struct FlowResult {
    /// Radialized profile with its radial-quadrature action.
    pub ground: GroundState2D,
    /// The converged 2D iterate.
    pub field: Field2D,
    /// Accepted descent steps at the finest level.
    pub iterations: usize,
    /// Action of the discrete 2D minimizer.
    pub grid_energy: f64,
    /// Relative gradient residual at termination.
    pub residual: f64,
}

/// Grid parameters for the flow.
#[derive(Debug, Clone, Copy)]
pub struct FlowGrid {
    /// Cells per side at the finest level (odd keeps a center cell).
    pub n: usize,
    /// Half-width of the box.
    pub l: f64,
}

impl FlowGrid {
    /// Default box: 10 decay lengths, 513 cells per side.
    pub fn for_coefficient(a: f64) -> FlowGrid {
        FlowGrid {
            n: 513,
            l: 10.0 / a.sqrt(),
        }
    }
}

fn descend(
    u: &mut Field2D,
    a: f64,
    b: f64,
    p: f64,
    rel_tol: f64,
    max_iters: usize,
) -> Result<(usize, f64)> {
    let n = u.n;
    let t = nehari_scale(u, a, b, p)?;
    for v in u.values.iter_mut() {
        *v *= t;
    }
    let mut energy = limit_functional(u, a, b, p);
    let mut g = Field2D::zeros(n, u.l);
    let mut alpha0 = 1.0f64;
    let mut iters = 0usize;
    loop {
        gradient(u, a, b, p, &mut g);
        let gnorm = g.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let unorm = u.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let res = gnorm / (a * unorm).max(1e-300);
        if res <= rel_tol {
            return Ok((iters, res));
        }
        if iters >= max_iters {
            return Err(CoreError::Solver {
                msg: format!("gradient flow stagnated at residual {res}"),
                history: vec![res],
            });
        }
        let d = precondition(&g, a, 60);
        let slope: f64 = g.values.iter().zip(&d.values).map(|(gv, dv)| gv * dv).sum();
        let mut alpha = alpha0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = u.clone();
            for (tv, dv) in trial.values.iter_mut().zip(&d.values) {
                *tv -= alpha * dv;
            }
            if let Ok(t) = nehari_scale(&trial, a, b, p) {
                for tv in trial.values.iter_mut() {
                    *tv *= t;
                }
                let e_trial = limit_functional(&trial, a, b, p);
                if e_trial <= energy - 1e-4 * alpha * slope * u.h * u.h {
                    *u = trial;
                    energy = e_trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            // line search exhausted: either we are converged or stuck
            if res <= 10.0 * rel_tol {
                return Ok((iters, res));
            }
            return Err(CoreError::Solver {
                msg: format!("line search failed at residual {res}"),
                history: vec![res],
            });
        }
        alpha0 = (alpha * 1.5).min(4.0);
        iters += 1;
    }
}

/// Gradient-flow ground state on a 2D Cartesian grid with Nehari rescaling
/// after each step, returning the radialized profile.
///
/// `init` seeds the finest level directly (used for fixed-point checks and
/// warm restarts); otherwise the solve runs nested refinement from a
/// Gaussian seed. Errors if the box is shorter than 3 decay lengths.
pub fn gradient_flow_ground_state(
    a: f64,
    b: f64,
    p: f64,
    grid: FlowGrid,
    tol: f64,
    init: Option<&Field2D>,
) -> Result<FlowResult> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(CoreError::Domain(format!(
            "limit equation needs a, b > 0, got ({a}, {b})"
        )));
    }
    if grid.l * a.sqrt() < 3.0 {
        return Err(CoreError::Grid(format!(
            "box holds only {:.2} decay lengths; need at least 3",
            grid.l * a.sqrt()
        )));
    }
    let rel_tol = 1e-9f64.max(tol * 1e-3);
    let mut u;
    let mut fine_iters = 0usize;
    let mut residual = f64::NAN;
    if let Some(seed) = init {
        u = seed.clone();
        let (it, res) = descend(&mut u, a, b, p, rel_tol, 600)?;
        fine_iters = it;
        residual = res;
    } else {
        let widths = [4usize, 2, 1];
        let amp = (a / b).powf(1.0 / (p - 1.0)) * 2.0;
        let sigma = 1.5 / a.sqrt();
        u = Field2D::from_fn((grid.n - 1) / widths[0] + 1, grid.l, |x, y| {
            amp * (-(x * x + y * y) / (2.0 * sigma * sigma)).exp()
        });
        for (k, &div) in widths.iter().enumerate() {
            let n_level = (grid.n - 1) / div + 1;
            if u.n != n_level {
                let prev = u.clone();
                u = Field2D::from_fn(n_level, grid.l, |x, y| prev.bilinear(x, y));
            }
            let level_tol = if div == 1 { rel_tol } else { 1e-6 };
            let (it, res) = descend(&mut u, a, b, p, level_tol, 800)?;
            if k == widths.len() - 1 {
                fine_iters = it;
                residual = res;
            }
        }
    }
    let grid_energy = limit_functional(&u, a, b, p);

    // radialize: angular averages around the origin
    let n_rad = ((grid.l * 0.98) / u.h) as usize;
    let h = u.h;
    let angles = 128;
    let mut w = vec![0.0; n_rad + 1];
    w[0] = u.bilinear(0.0, 0.0);
    for (i, wi) in w.iter_mut().enumerate().skip(1) {
        let rho = i as f64 * h;
        let mut acc = 0.0;
        for k in 0..angles {
            let th = 2.0 * std::f64::consts::PI * k as f64 / angles as f64;
            acc += u.bilinear(rho * th.cos(), rho * th.sin());
        }
        *wi = acc / angles as f64;
    }
    // strictly decreasing positive prefix; analytic tail beyond
    let floor = 1e-8 * w[0];
    let mut m = n_rad;
    for i in 1..=n_rad {
        if !(w[i] > 0.0) || w[i] >= w[i - 1] || w[i] < floor {
            m = i - 1;
            break;
        }
    }
    let sqrt_a = a.sqrt();
    let (rho_m, w_m) = (m as f64 * h, w[m]);
    for (i, wi) in w.iter_mut().enumerate().skip(m + 1) {
        let rho = i as f64 * h;
        *wi = w_m * (rho_m / rho).sqrt() * (-(sqrt_a) * (rho - rho_m)).exp();
    }
    let mut dw = vec![0.0; n_rad + 1];
    for i in 1..n_rad {
        dw[i] = (w[i + 1] - w[i - 1]) / (2.0 * h);
    }
    dw[n_rad] = (w[n_rad] - w[n_rad - 1]) / h;
    let (s_part, q_part) = radial_nehari_parts(&w, &dw, h, a, p);
    let nehari = (s_part - b * q_part).abs() / s_part;
    let energy = radial_action(&w, &dw, h, a, b, p);
    let ground = GroundState2D {
        a,
        b,
        p,
        h,
        r_max: n_rad as f64 * h,
        w,
        dw,
        energy,
        nehari_residual: nehari,
        equation_residual: f64::NAN,
        tol: 2e-2,
        tail_start: rho_m,
        provenance: format!("gradient-flow n={} l={:.3}", u.n, grid.l),
    };
    ground.validate()?;
    Ok(FlowResult {
        ground,
        field: u,
        iterations: fine_iters,
        grid_energy,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit2d::shoot_radial_ground_state;

    #[test]
    fn flow_matches_shooting_p4() {
        let shot = shoot_radial_ground_state(1.0, 1.0, 4.0, 1e-6).unwrap();
        let flow = gradient_flow_ground_state(
            1.0,
            1.0,
            4.0,
            FlowGrid::for_coefficient(1.0),
            1e-3,
            None,
        )
        .unwrap();
        let rel = (flow.ground.energy / shot.energy - 1.0).abs();
        assert!(
            rel < 1e-3,
            "flow {} vs shot {} (rel {rel})",
            flow.ground.energy,
            shot.energy
        );
    }

    #[test]
    fn flow_fixed_point_converges_immediately() {
        let grid = FlowGrid { n: 129, l: 8.0 };
        let first = gradient_flow_ground_state(1.0, 1.0, 4.0, grid, 1e-3, None).unwrap();
        let again =
            gradient_flow_ground_state(1.0, 1.0, 4.0, grid, 1e-3, Some(&first.field)).unwrap();
        assert!(
            again.iterations <= 2,
            "restart took {} iterations",
            again.iterations
        );
    }

    #[test]
    fn too_coarse_box_rejected() {
        let grid = FlowGrid { n: 65, l: 2.0 };
        assert!(matches!(
            gradient_flow_ground_state(1.0, 1.0, 4.0, grid, 1e-3, None),
            Err(CoreError::Grid(_))
        ));
    }

    #[test]
    fn limit_functional_zero_field() {
        let u = Field2D::zeros(32, 5.0);
        assert_eq!(limit_functional(&u, 1.0, 1.0, 4.0), 0.0);
    }

    #[test]
    fn limit_functional_on_ground_state_gives_energy() {
        let shot = shoot_radial_ground_state(1.0, 1.0, 4.0, 1e-6).unwrap();
        let u = Field2D::from_fn(401, 10.0, |x, y| shot.eval((x * x + y * y).sqrt()));
        let i = limit_functional(&u, 1.0, 1.0, 4.0);
        assert!(
            (i / shot.energy - 1.0).abs() < 5e-3,
            "I(w) = {i} vs E = {}",
            shot.energy
        );
    }

    #[test]
    fn fibering_map_has_unique_interior_maximum() {
        let shot = shoot_radial_ground_state(1.0, 1.0, 4.0, 1e-6).unwrap();
        let u = Field2D::from_fn(201, 10.0, |x, y| shot.eval((x * x + y * y).sqrt()));
        let mut values = Vec::new();
        for k in 1..=60 {
            let t = 0.05 * k as f64;
            let mut v = u.clone();
            for x in v.values.iter_mut() {
                *x *= t;
            }
            values.push(limit_functional(&v, 1.0, 1.0, 4.0));
        }
        // strictly increasing then strictly decreasing
        let peak = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(peak > 0 && peak < values.len() - 1);
        for k in 1..=peak {
            assert!(values[k] > values[k - 1]);
        }
        for k in peak + 1..values.len() {
            assert!(values[k] < values[k - 1]);
        }
    }
}
