//! Radial shooting solver for the planar limit equation.
//!
//! The ground state solves `-w'' - w'/ρ + a w = b w^p`, `w'(0) = 0`, with
//! exponential decay. Shooting classifies each initial amplitude w(0) by the
//! fate of its trajectory: too-large amplitudes cross zero, too-small ones
//! run out of energy and turn back upward. Bisection on the separatrix pins
//! w(0) to machine precision. The coordinate singularity at ρ = 0 is handled
//! by the series start `w(ρ) ≈ w(0) + (a w(0) - b w(0)^p) ρ²/4`.

use super::GroundState2D;
use crate::error::{CoreError, Result};
use crate::limit2d::{radial_action, radial_nehari_parts};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Fate {
    /// w reached zero: amplitude too large.
    Crossed,
    /// w' turned nonnegative while w > 0: amplitude too small.
    Turned,
}

struct Trajectory {
    rho: Vec<f64>,
    w: Vec<f64>,
    dw: Vec<f64>,
}

/// Dormand–Prince 5(4) step for the radial system y = (w, w').
fn dp45_step(
    a: f64,
    b: f64,
    p: f64,
    t: f64,
    y: [f64; 2],
    h: f64,
) -> ([f64; 2], [f64; 2], [f64; 2]) {
    let f = |t: f64, y: [f64; 2]| -> [f64; 2] {
        let w = y[0];
        let nonlin = b * w.abs().powf(p) * w.signum();
        [y[1], -y[1] / t + a * w - nonlin]
    };
    let k1 = f(t, y);
    let at = |c: f64, ks: &[( f64, [f64; 2])]| -> [f64; 2] {
        let mut out = y;
        for &(coef, k) in ks {
            out[0] += h * coef * k[0];
            out[1] += h * coef * k[1];
        }
        let _ = c;
        out
    };
    let k2 = f(t + h / 5.0, at(0.2, &[(1.0 / 5.0, k1)]));
    let k3 = f(
        t + 3.0 * h / 10.0,
        at(0.3, &[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]),
    );
    let k4 = f(
        t + 4.0 * h / 5.0,
        at(0.8, &[(44.0 / 45.0, k1), (-56.0 / 15.0, k2), (32.0 / 9.0, k3)]),
    );
    let k5 = f(
        t + 8.0 * h / 9.0,
        at(
            8.0 / 9.0,
            &[
                (19372.0 / 6561.0, k1),
                (-25360.0 / 2187.0, k2),
                (64448.0 / 6561.0, k3),
                (-212.0 / 729.0, k4),
            ],
        ),
    );
    let k6 = f(
        t + h,
        at(
            1.0,
            &[
                (9017.0 / 3168.0, k1),
                (-355.0 / 33.0, k2),
                (46732.0 / 5247.0, k3),
                (49.0 / 176.0, k4),
                (-5103.0 / 18656.0, k5),
            ],
        ),
    );
    // 5th order solution
    let y5 = at(
        1.0,
        &[
            (35.0 / 384.0, k1),
            (500.0 / 1113.0, k3),
            (125.0 / 192.0, k4),
            (-2187.0 / 6784.0, k5),
            (11.0 / 84.0, k6),
        ],
    );
    let k7 = f(t + h, y5);
    // embedded 4th order
    let y4 = at(
        1.0,
        &[
            (5179.0 / 57600.0, k1),
            (7571.0 / 16695.0, k3),
            (393.0 / 640.0, k4),
            (-92097.0 / 339200.0, k5),
            (187.0 / 2100.0, k6),
            (1.0 / 40.0, k7),
        ],
    );
    (y5, y4, k7)
}

/// Integrate from the series start, classifying the trajectory. Records
/// accepted steps when `record` is set.
fn integrate(
    a: f64,
    b: f64,
    p: f64,
    w0: f64,
    rho_cap: f64,
    max_step: f64,
    record: bool,
) -> (Fate, Option<Trajectory>) {
    let rho0 = 1e-8 / a.sqrt();
    let curv = a * w0 - b * w0.powf(p);
    let mut t = rho0;
    let mut y = [w0 + curv * rho0 * rho0 / 4.0, curv * rho0 / 2.0];
    let mut h = 1e-6 / a.sqrt();
    let rtol = 1e-12;
    let atol = 1e-14 * w0;
    let mut traj = record.then(|| Trajectory {
        rho: vec![t],
        w: vec![y[0]],
        dw: vec![y[1]],
    });
    let mut fate = Fate::Turned;
    while t < rho_cap {
        let h_use = h.min(max_step).min(rho_cap - t).max(1e-14);
        let (y5, y4, _) = dp45_step(a, b, p, t, y, h_use);
        let err = {
            let sc0 = atol + rtol * y5[0].abs().max(y[0].abs());
            let sc1 = atol + rtol * y5[1].abs().max(y[1].abs());
            let e0 = (y5[0] - y4[0]) / sc0;
            let e1 = (y5[1] - y4[1]) / sc1;
            (0.5 * (e0 * e0 + e1 * e1)).sqrt()
        };
        if err <= 1.0 {
            t += h_use;
            y = y5;
            if let Some(tr) = traj.as_mut() {
                tr.rho.push(t);
                tr.w.push(y[0]);
                tr.dw.push(y[1]);
            }
            if y[0] <= 0.0 {
                fate = Fate::Crossed;
                break;
            }
            if y[1] >= 0.0 && y[0] < 0.99 * w0 {
                fate = Fate::Turned;
                break;
            }
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h = h_use * factor;
    }
    (fate, traj)
}

/// Shooting solver: bisection on w(0) selecting the decaying separatrix.
///
/// Accepts `a, b > 0` and `p > 1` (the standing range for the full problem
/// is p > 3; smaller exponents are allowed here for oracle cross-checks).
pub fn shoot_radial_ground_state(a: f64, b: f64, p: f64, tol: f64) -> Result<GroundState2D> {
    if !(a > 0.0) || !(b > 0.0) {
        return Err(CoreError::Domain(format!(
            "limit equation needs a, b > 0, got ({a}, {b})"
        )));
    }
    if !(p > 1.0) {
        return Err(CoreError::Domain(format!("exponent p must exceed 1, got {p}")));
    }
    let sqrt_a = a.sqrt();
    let rho_cap = 60.0 / sqrt_a;
    let coarse = 0.25 / sqrt_a;

    // bracket: the zero-action amplitude always turns; grow until crossing
    let mut lo = ((p + 1.0) * a / (2.0 * b)).powf(1.0 / (p - 1.0)) * (1.0 + 1e-12);
    let mut hi = lo;
    let mut found = false;
    for _ in 0..200 {
        hi *= 1.5;
        if integrate(a, b, p, hi, rho_cap, coarse, false).0 == Fate::Crossed {
            found = true;
            break;
        }
    }
    if !found {
        return Err(CoreError::solver("shooting bracket not found"));
    }
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match integrate(a, b, p, mid, rho_cap, coarse, false).0 {
            Fate::Crossed => hi = mid,
            Fate::Turned => lo = mid,
        }
    }
    let w0 = 0.5 * (lo + hi);

    // final pass with dense recording for resampling
    let r_max = 12.0 / sqrt_a;
    let fine_step = 0.01 / sqrt_a;
    let (_, traj) = integrate(a, b, p, w0, rho_cap, fine_step, true);
    let traj = traj.expect("recording enabled");

    // resample onto the uniform grid by cubic Hermite interpolation
    let n_cells = 8192usize;
    let h = r_max / n_cells as f64;
    let mut w = vec![0.0; n_cells + 1];
    let mut dw = vec![0.0; n_cells + 1];
    w[0] = w0;
    dw[0] = 0.0;
    let mut seg = 0usize;
    for i in 1..=n_cells {
        let rho = i as f64 * h;
        while seg + 2 < traj.rho.len() && traj.rho[seg + 1] < rho {
            seg += 1;
        }
        let (t0, t1) = (traj.rho[seg], traj.rho[seg + 1]);
        if rho > t1 {
            // past the recorded trajectory; leave zero, tail patch follows
            w[i] = 0.0;
            dw[i] = 0.0;
            continue;
        }
        let dt = t1 - t0;
        let t = (rho - t0) / dt;
        let (w0s, w1s) = (traj.w[seg], traj.w[seg + 1]);
        let (d0s, d1s) = (traj.dw[seg] * dt, traj.dw[seg + 1] * dt);
        let t2 = t * t;
        let t3 = t2 * t;
        w[i] = (2.0 * t3 - 3.0 * t2 + 1.0) * w0s
            + (t3 - 2.0 * t2 + t) * d0s
            + (-2.0 * t3 + 3.0 * t2) * w1s
            + (t3 - t2) * d1s;
        dw[i] = ((6.0 * t2 - 6.0 * t) * w0s
            + (3.0 * t2 - 4.0 * t + 1.0) * d0s
            + (-6.0 * t2 + 6.0 * t) * w1s
            + (3.0 * t2 - 2.0 * t) * d1s)
            / dt;
    }

    // patch the far tail with the analytic decay w ~ ρ^{-1/2} e^{-√a ρ} from
    // the point where the trajectory leaves the separatrix (bisection noise
    // grows like e^{+√a ρ} and contaminates levels below ~1e-6 w0)
    let floor = 1e-6 * w0;
    let mut m = n_cells;
    for i in 1..=n_cells {
        if !(w[i] > 0.0) || w[i] >= w[i - 1] || w[i] < floor {
            m = i - 1;
            break;
        }
    }
    let (rho_m, w_m) = (m as f64 * h, w[m]);
    for i in (m + 1)..=n_cells {
        let rho = i as f64 * h;
        let amp = w_m * (rho_m / rho).sqrt() * (-(sqrt_a) * (rho - rho_m)).exp();
        w[i] = amp;
        dw[i] = amp * (-sqrt_a - 0.5 / rho);
    }

    // diagnostics on the final grid
    let (s_part, q_part) = radial_nehari_parts(&w, &dw, h, a, p);
    let nehari = (s_part - b * q_part).abs() / s_part;
    let energy = radial_action(&w, &dw, h, a, b, p);
    let equation_residual = radial_defect_norm(&w, &dw, h, a, b, p);
    let gs = GroundState2D {
        a,
        b,
        p,
        h,
        r_max,
        w,
        dw,
        energy,
        nehari_residual: nehari,
        equation_residual,
        tol,
        tail_start: rho_m,
        provenance: format!("radial-shooting w0={w0:.16e}"),
    };
    if gs.equation_residual > tol {
        return Err(CoreError::solver(format!(
            "shooting residual {} above tolerance {tol}",
            gs.equation_residual
        )));
    }
    gs.validate()?;
    Ok(gs)
}

/// Relative L²(ρ dρ) norm of the radial defect, with w'' from a 4th-order
/// stencil on the profile and the stored first derivative for w'/ρ.
fn radial_defect_norm(w: &[f64], dw: &[f64], h: f64, a: f64, b: f64, p: f64) -> f64 {
    let n = w.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 2..n - 2 {
        let rho = i as f64 * h;
        let wpp =
            (-w[i - 2] + 16.0 * w[i - 1] - 30.0 * w[i] + 16.0 * w[i + 1] - w[i + 2]) / (12.0 * h * h);
        let defect = -wpp - dw[i] / rho + a * w[i] - b * w[i].powf(p);
        num += defect * defect * rho;
        let scale = a * w[i];
        den += scale * scale * rho;
    }
    (num / den).sqrt()
}
