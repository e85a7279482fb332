//! Assembly and minimization of the penalized functional on the reduced
//! half-plane.
//!
//! ```text
//! J_eps(u) = 1/2 ∫ (eps²|∇u|² + V u²) + 1/4 ∫ φ_u u² ρ - ∫ G_eps(x, u),
//! ```
//!
//! all integrals with the cylindrical weight `2π r`, `φ_u` the Newtonian
//! potential of `u² ρ` recomputed self-consistently. The critical point is
//! found by descent constrained to the Nehari-type fiber: each iterate is
//! rescaled to the maximizer of `t ↦ J_eps(t u)`, on which the mountain-pass
//! point is a minimum, and steps are preconditioned by `(-eps²Δ + V)^{-1}`
//! (descent in the `H_{V,eps}` metric). The line search backtracks on the
//! projected energy, which therefore decreases strictly along the run;
//! convergence is certified on the plain L²(2πr) gradient.

mod grid;

pub use grid::GridSpec;

use crate::error::{CoreError, Result};
use crate::limit2d::GroundState2D;
use crate::model::{classify_growth, cyl_distance, eval_potentials, PotentialSpec, RegionLambda};
use crate::penalty::{branch_crossing, hardy_potential, PenalizationParams};
use crate::poisson::{newtonian_potential, potential_impl, CylField};
use crate::util::{golden_max, par_sum, smoothstep};

/// Solver tuning knobs; the defaults fit the desk-scale experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Relative residual below which the iterate counts as critical.
    pub residual_tol: f64,
    pub max_iters: usize,
    /// Armijo constant of the backtracking line search.
    pub ls_c1: f64,
    /// CG iteration budget for the metric solve per step.
    pub cg_iters: usize,
    /// Source cells below this fraction of the peak mass are dropped from
    /// the Poisson summation during iterations (the final potential is
    /// always a full summation).
    pub source_threshold: f64,
    /// Cells with |x| below this radius use μV alone as the linear branch
    /// coefficient (origin exclusion; 0 disables).
    pub origin_exclusion: f64,
    /// Cap for the fiber scaling search.
    pub fiber_max_t: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            residual_tol: 1e-6,
            max_iters: 600,
            ls_c1: 1e-4,
            cg_iters: 120,
            source_threshold: 1e-14,
            origin_exclusion: 0.0,
            fiber_max_t: 1e6,
        }
    }
}

/// The penalized problem: data, region, penalization constants, exponent,
/// grid and solver parameters.
#[derive(Debug, Clone)]
pub struct PenalizedProblem {
    pub spec: PotentialSpec,
    pub region: RegionLambda,
    pub pen: PenalizationParams,
    pub p: f64,
    pub grid: GridSpec,
    pub params: SolverParams,
}

impl PenalizedProblem {
    /// Validates the standing hypotheses: p > 3, an admissible growth
    /// classification, and an axis-avoiding region.
    pub fn new(
        spec: PotentialSpec,
        region: RegionLambda,
        pen: PenalizationParams,
        p: f64,
        grid: GridSpec,
        params: SolverParams,
    ) -> Result<PenalizedProblem> {
        if !(p > 3.0) {
            return Err(CoreError::Domain(format!("p must exceed 3, got {p}")));
        }
        let class = classify_growth(&spec, p)?;
        if !class.admissible() {
            return Err(CoreError::Invariant(
                "growth classification is not admissible (needs one condition at each end)".into(),
            ));
        }
        Ok(PenalizedProblem {
            spec,
            region,
            pen,
            p,
            grid,
            params,
        })
    }

    /// The problem's computational grid (zero field).
    pub fn field(&self) -> Result<CylField> {
        let (s, r) = self.grid.build()?;
        CylField::zeros(s, r)
    }
}

/// Per-cell tables the inner loops run on.
struct Prepared {
    v: Vec<f64>,
    k: Vec<f64>,
    rho: Vec<f64>,
    /// Linear branch coefficient eps²H + μV (μV alone inside the origin
    /// exclusion); +∞ marks cells inside Λ where the branch never applies.
    lin: Vec<f64>,
    /// Branch crossing amplitude per cell (+∞ inside Λ).
    s_c: Vec<f64>,
    in_lambda: Vec<bool>,
    vol: Vec<f64>,
    eps2: f64,
    p: f64,
    template: CylField,
}

impl Prepared {
    fn build(problem: &PenalizedProblem) -> Result<Prepared> {
        let template = problem.field()?;
        let ns = template.ns();
        let nr = template.nr();
        let n = ns * nr;
        let sc = template.s_axis().centers().to_vec();
        let rc = template.r_axis().centers().to_vec();
        let mut v = vec![0.0; n];
        let mut k = vec![0.0; n];
        let mut rho = vec![0.0; n];
        let mut lin = vec![0.0; n];
        let mut s_c = vec![0.0; n];
        let mut in_lambda = vec![false; n];
        let mut vol = vec![0.0; n];
        let p = problem.p;
        for j in 0..nr {
            for i in 0..ns {
                let idx = j * ns + i;
                let (vv, kk, rr) = eval_potentials(&problem.spec, sc[i], rc[j])?;
                v[idx] = vv;
                k[idx] = kk;
                rho[idx] = rr;
                vol[idx] = template.volume(i, j);
                let inside = problem.region.contains(sc[i], rc[j]);
                in_lambda[idx] = inside;
                if inside {
                    lin[idx] = f64::INFINITY;
                    s_c[idx] = f64::INFINITY;
                } else {
                    let x_norm = (sc[i] * sc[i] + rc[j] * rc[j]).sqrt();
                    let coef = if x_norm < problem.params.origin_exclusion {
                        problem.pen.mu * vv
                    } else {
                        problem.pen.eps * problem.pen.eps
                            * hardy_potential(&problem.pen, sc[i], rc[j])?
                            + problem.pen.mu * vv
                    };
                    lin[idx] = coef;
                    s_c[idx] = branch_crossing(coef, kk, p);
                }
            }
        }
        Ok(Prepared {
            v,
            k,
            rho,
            lin,
            s_c,
            in_lambda,
            vol,
            eps2: problem.pen.eps * problem.pen.eps,
            p,
            template,
        })
    }

    fn g_at(&self, idx: usize, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let power = self.k[idx] * s.powf(self.p);
        if self.in_lambda[idx] {
            power
        } else {
            (self.lin[idx] * s).min(power)
        }
    }

    fn g_primitive_at(&self, idx: usize, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let p = self.p;
        if self.in_lambda[idx] || s <= self.s_c[idx] {
            self.k[idx] * s.powf(p + 1.0) / (p + 1.0)
        } else {
            let sc = self.s_c[idx];
            self.k[idx] * sc.powf(p + 1.0) / (p + 1.0)
                + 0.5 * self.lin[idx] * (s * s - sc * sc)
        }
    }

    /// `∫ G_eps(x, t u) dV` over the grid.
    fn g_integral(&self, u: &[f64], t: f64) -> f64 {
        let vals: Vec<f64> = u
            .iter()
            .enumerate()
            .filter(|(_, &ui)| ui != 0.0)
            .map(|(idx, &ui)| self.g_primitive_at(idx, t * ui) * self.vol[idx])
            .collect();
        par_sum(&vals)
    }

    /// Quadratic part `∫ (eps²|∇u|² + V u²) dV`.
    fn quadratic_form(&self, u: &CylField) -> f64 {
        let grad = u.dirichlet_form();
        let vals: Vec<f64> = u
            .values()
            .iter()
            .enumerate()
            .map(|(idx, &ui)| self.v[idx] * ui * ui * self.vol[idx])
            .collect();
        self.eps2 * grad + par_sum(&vals)
    }

    /// Poisson source `u² ρ` as a field on the template grid.
    fn poisson_source(&self, u: &CylField) -> CylField {
        let mut src = self.template.clone();
        for (o, (ui, rho)) in src
            .values_mut()
            .iter_mut()
            .zip(u.values().iter().zip(&self.rho))
        {
            *o = ui * ui * rho;
        }
        src
    }

    /// `∫ φ u² ρ dV`.
    fn poisson_quartic(&self, u: &CylField, phi: &CylField) -> f64 {
        let vals: Vec<f64> = u
            .values()
            .iter()
            .zip(phi.values())
            .enumerate()
            .map(|(idx, (&ui, &pi))| pi * ui * ui * self.rho[idx] * self.vol[idx])
            .collect();
        par_sum(&vals)
    }

    fn energy_with_phi(&self, u: &CylField, phi: &CylField) -> f64 {
        0.5 * self.quadratic_form(u) + 0.25 * self.poisson_quartic(u, phi)
            - self.g_integral(u.values(), 1.0)
    }

    /// L²(2πr) gradient `-eps²Δu + V u + ρ φ u - g_eps(x, u)`.
    fn gradient_with_phi(&self, u: &CylField, phi: &CylField) -> CylField {
        let mut out = u.laplacian();
        for (idx, o) in out.values_mut().iter_mut().enumerate() {
            let ui = u.values()[idx];
            *o = -self.eps2 * *o + self.v[idx] * ui + self.rho[idx] * phi.values()[idx] * ui
                - self.g_at(idx, ui);
        }
        out
    }

    /// Scale of the equation's constituent terms, for relative residuals.
    fn term_scale(&self, u: &CylField, phi: &CylField) -> f64 {
        let lap = u.laplacian();
        let mut n_lap = 0.0;
        let mut n_v = 0.0;
        let mut n_phi = 0.0;
        let mut n_g = 0.0;
        for (idx, &ui) in u.values().iter().enumerate() {
            let w = self.vol[idx];
            let a = self.eps2 * lap.values()[idx];
            n_lap += a * a * w;
            let b = self.v[idx] * ui;
            n_v += b * b * w;
            let c = self.rho[idx] * phi.values()[idx] * ui;
            n_phi += c * c * w;
            let d = self.g_at(idx, ui);
            n_g += d * d * w;
        }
        n_lap.sqrt() + n_v.sqrt() + n_phi.sqrt() + n_g.sqrt()
    }

    /// Restricted Poisson solve: sources thresholded, targets limited to
    /// cells where u (or the trial direction) is non-negligible.
    fn phi_active(&self, u: &CylField, threshold: f64) -> CylField {
        let src = self.poisson_source(u);
        let umax = u.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let mask: Vec<bool> = u
            .values()
            .iter()
            .map(|&v| v.abs() > 1e-16 * umax)
            .collect();
        potential_impl(&src, threshold, Some(&mask))
    }

    /// Volume-weighted inner product.
    fn dot(&self, a: &CylField, b: &CylField) -> f64 {
        let vals: Vec<f64> = a
            .values()
            .iter()
            .zip(b.values())
            .enumerate()
            .map(|(idx, (&x, &y))| x * y * self.vol[idx])
            .collect();
        par_sum(&vals)
    }

    /// CG solve of `(-eps²Δ + V) d = rhs` in the volume inner product.
    fn metric_solve(&self, rhs: &CylField, iters: usize) -> CylField {
        let apply = |x: &CylField, out: &mut CylField| {
            x.laplacian_into(out);
            for (idx, o) in out.values_mut().iter_mut().enumerate() {
                *o = -self.eps2 * *o + self.v[idx].max(1e-12) * x.values()[idx];
            }
        };
        let mut x = self.template.clone();
        let mut r = rhs.clone();
        let mut p = r.clone();
        let mut ap = self.template.clone();
        let mut rr = self.dot(&r, &r);
        if rr == 0.0 {
            return x;
        }
        let rr0 = rr;
        for _ in 0..iters {
            apply(&p, &mut ap);
            let denom = self.dot(&p, &ap);
            if denom <= 0.0 {
                break;
            }
            let alpha = rr / denom;
            for (xv, pv) in x.values_mut().iter_mut().zip(p.values()) {
                *xv += alpha * pv;
            }
            for (rv, av) in r.values_mut().iter_mut().zip(ap.values()) {
                *rv -= alpha * av;
            }
            let rr_new = self.dot(&r, &r);
            if rr_new < 1e-6 * rr0 {
                break;
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for (pv, rv) in p.values_mut().iter_mut().zip(r.values()) {
                *pv = rv + beta * *pv;
            }
        }
        x
    }
}

/// Fiber data of an iterate: quadratic part A, Poisson part P, and the
/// nonlinear integral as a function of the scaling t:
/// `J(t u) = A t²/2 + P t⁴/4 - ∫G(x, t u)`.
struct Fiber<'a> {
    a: f64,
    p4: f64,
    prep: &'a Prepared,
    u: Vec<f64>,
}

impl<'a> Fiber<'a> {
    fn new(prep: &'a Prepared, u: &CylField, phi: &CylField) -> Fiber<'a> {
        Fiber {
            a: prep.quadratic_form(u),
            p4: prep.poisson_quartic(u, phi),
            prep,
            u: u.values().to_vec(),
        }
    }

    fn energy(&self, t: f64) -> f64 {
        0.5 * t * t * self.a + 0.25 * t.powi(4) * self.p4 - self.prep.g_integral(&self.u, t)
    }

    /// Maximize the fiber energy over t > 0. Errors when no scaling within
    /// the cap reaches negative energy (no mountain-pass endpoint).
    fn maximize(&self, t_cap: f64) -> Result<(f64, f64)> {
        let mut t_hi = 1.0;
        let mut guard = 0;
        while self.energy(t_hi) > 0.0 {
            t_hi *= 2.0;
            guard += 1;
            if t_hi > t_cap || guard > 80 {
                return Err(CoreError::solver(
                    "fiber energy stays positive: no negative-energy endpoint within range",
                ));
            }
        }
        let (t_star, j_star) = golden_max(|t| self.energy(t), 1e-9, t_hi, 1e-11 * t_hi);
        if !j_star.is_finite() {
            return Err(CoreError::solver("fiber maximization produced non-finite energy"));
        }
        Ok((t_star, j_star))
    }
}

/// Penalized energy `J_eps(u)`; the coupling potential is recomputed from
/// `u` by a full Newtonian summation.
pub fn energy_j(problem: &PenalizedProblem, u: &CylField) -> Result<f64> {
    let prep = Prepared::build(problem)?;
    if !u.same_grid(&prep.template) {
        return Err(CoreError::Grid("field does not match the problem grid".into()));
    }
    let phi = newtonian_potential(&prep.poisson_source(u))?;
    Ok(prep.energy_with_phi(u, &phi))
}

/// Discrete L²(2πr) gradient of `J_eps` at `u` (self-consistent potential).
pub fn grad_j(problem: &PenalizedProblem, u: &CylField) -> Result<CylField> {
    let prep = Prepared::build(problem)?;
    if !u.same_grid(&prep.template) {
        return Err(CoreError::Grid("field does not match the problem grid".into()));
    }
    let phi = newtonian_potential(&prep.poisson_source(u))?;
    Ok(prep.gradient_with_phi(u, &phi))
}

/// Concentrated ansatz: the limit-equation ground state scaled to the
/// semiclassical width, cut off inside Λ, and rescaled to its fiber maximum.
///
/// `ground` must be the ground state for `(a, b) = (V(0, r0), K(0, r0))`.
pub fn build_ansatz(
    problem: &PenalizedProblem,
    ground: &GroundState2D,
    r_center: f64,
) -> Result<CylField> {
    let prep = Prepared::build(problem)?;
    let (lo, hi) = problem.region.slice();
    if !(r_center > lo && r_center < hi) {
        return Err(CoreError::Domain(format!(
            "ansatz center {r_center} outside the region slice ({lo}, {hi})"
        )));
    }
    let d_max = problem.region.boundary_distance(0.0, r_center);
    let eps = problem.pen.eps;
    let mut u = prep.template.clone();
    let sc = u.s_axis().centers().to_vec();
    let rc = u.r_axis().centers().to_vec();
    let ns = u.ns();
    for j in 0..rc.len() {
        for i in 0..ns {
            let d = cyl_distance((sc[i], rc[j]), (0.0, r_center));
            // cutoff: 1 inside 0.75 d_max, 0 beyond 0.95 d_max
            let eta = smoothstep((0.95 * d_max - d) / (0.2 * d_max));
            if eta > 0.0 {
                u.values_mut()[j * ns + i] = eta * ground.eval(d / eps);
            }
        }
    }
    let phi = prep.phi_active(&u, problem.params.source_threshold);
    let fiber = Fiber::new(&prep, &u, &phi);
    if !fiber.energy(1e-3).is_finite() {
        return Err(CoreError::solver("ansatz energy not finite"));
    }
    // mountain-pass geometry guard: the fiber must rise from zero
    if fiber.energy(1e-3) <= 0.0 {
        return Err(CoreError::solver(
            "fiber energy nonpositive near zero: penalization constants too large",
        ));
    }
    let (t_star, _) = fiber.maximize(problem.params.fiber_max_t)?;
    for v in u.values_mut().iter_mut() {
        *v *= t_star;
    }
    Ok(u)
}

/// Converged solution of the penalized problem with its diagnostics.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub eps: f64,
    pub p: f64,
    /// Solution field.
    pub u: CylField,
    /// Self-consistent Newtonian potential of `u² ρ` (full summation).
    pub phi: CylField,
    /// `J_eps(u)`.
    pub energy: f64,
    /// Relative residual of `J'_eps(u)` against the equation term scale.
    pub residual: f64,
    /// Cell center where u attains its maximum.
    pub maximizer: (f64, f64),
    pub u_max: f64,
    /// Path maximum through the solution (upper representative of the
    /// minimax level).
    pub path_max_level: f64,
    pub positive: bool,
    /// Whether the penalized branch differs from `K u^p` anywhere.
    pub penalization_active: bool,
    /// `∫ (eps²|∇u|² + V u²) dV`.
    pub energy_norm_hv: f64,
    /// `D(u²ρ, u²ρ)`.
    pub interaction: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
}

/// Damped, preconditioned descent on the Nehari fiber from a concentrated
/// initial field. The energy of the projected iterates decreases strictly;
/// convergence is certified by the relative residual of the plain gradient.
pub fn descent_solve(problem: &PenalizedProblem, initial: &CylField) -> Result<SolveReport> {
    let prep = Prepared::build(problem)?;
    if !initial.same_grid(&prep.template) {
        return Err(CoreError::Grid(
            "initial field does not match the problem grid".into(),
        ));
    }
    let pars = problem.params;
    let thr = pars.source_threshold;

    let phi0 = prep.phi_active(initial, thr);
    let e0 = prep.energy_with_phi(initial, &phi0);
    if !(e0 > 0.0) {
        return Err(CoreError::solver(format!(
            "initial energy must be positive, got {e0}"
        )));
    }

    // project the start onto its fiber maximum
    let fiber0 = Fiber::new(&prep, initial, &phi0);
    let (t0, mut j_cur) = fiber0.maximize(pars.fiber_max_t)?;
    let mut u = initial.clone();
    for v in u.values_mut().iter_mut() {
        *v *= t0;
    }

    let mut history = Vec::new();
    let mut alpha0 = 1.0f64;
    let mut iterations = 0usize;
    let mut converged = false;
    let mut last_res = f64::INFINITY;
    while iterations < pars.max_iters {
        let phi = prep.phi_active(&u, thr);
        let grad = prep.gradient_with_phi(&u, &phi);
        let scale = prep.term_scale(&u, &phi).max(1e-300);
        let res = prep.dot(&grad, &grad).sqrt() / scale;
        history.push(res);
        last_res = res;
        if res <= pars.residual_tol {
            converged = true;
            break;
        }
        let dir = prep.metric_solve(&grad, pars.cg_iters);
        let slope = prep.dot(&grad, &dir);
        if !(slope > 0.0) {
            return Err(CoreError::Solver {
                msg: "preconditioned direction is not a descent direction".into(),
                history,
            });
        }
        let mut alpha = alpha0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial = u.clone();
            for (tv, dv) in trial.values_mut().iter_mut().zip(dir.values()) {
                *tv -= alpha * dv;
            }
            let phi_t = prep.phi_active(&trial, thr);
            let fiber = Fiber::new(&prep, &trial, &phi_t);
            if let Ok((t_star, j_t)) = fiber.maximize(pars.fiber_max_t) {
                if j_t <= j_cur - pars.ls_c1 * alpha * slope {
                    for tv in trial.values_mut().iter_mut() {
                        *tv *= t_star;
                    }
                    u = trial;
                    j_cur = j_t;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            return Err(CoreError::Solver {
                msg: format!(
                    "line search failed after energy {j_cur:.6e} at residual {res:.3e}"
                ),
                history,
            });
        }
        alpha0 = (alpha * 1.5).min(4.0);
        iterations += 1;
    }
    if !converged {
        return Err(CoreError::Solver {
            msg: format!(
                "descent hit the iteration cap {} at residual {last_res:.3e}",
                pars.max_iters
            ),
            history,
        });
    }

    // final full-summation potential and report assembly
    let phi = newtonian_potential(&prep.poisson_source(&u))?;
    let energy = prep.energy_with_phi(&u, &phi);
    let grad = prep.gradient_with_phi(&u, &phi);
    let residual = prep.dot(&grad, &grad).sqrt() / prep.term_scale(&u, &phi).max(1e-300);

    // positivity: the negative part must be numerically negligible
    let neg_sq: Vec<f64> = u
        .values()
        .iter()
        .enumerate()
        .map(|(idx, &v)| if v < 0.0 { v * v * prep.vol[idx] } else { 0.0 })
        .collect();
    let neg_norm = par_sum(&neg_sq).sqrt();
    let positive = neg_norm <= 1e-10;
    if !positive {
        return Err(CoreError::Solver {
            msg: format!("converged iterate has negative part of norm {neg_norm:.3e}"),
            history,
        });
    }

    let (im, jm, u_max) = u.argmax();
    let maximizer = (
        u.s_axis().centers()[im],
        u.r_axis().centers()[jm],
    );
    let fiber = Fiber::new(&prep, &u, &phi);
    let (_, path_max_level) = fiber.maximize(pars.fiber_max_t)?;
    let penalization_active = u
        .values()
        .iter()
        .enumerate()
        .any(|(idx, &v)| !prep.in_lambda[idx] && v > prep.s_c[idx]);
    let energy_norm_hv = prep.quadratic_form(&u);
    let interaction = 4.0 * std::f64::consts::PI * prep.poisson_quartic(&u, &phi);

    Ok(SolveReport {
        eps: problem.pen.eps,
        p: problem.p,
        u,
        phi,
        energy,
        residual,
        maximizer,
        u_max,
        path_max_level,
        positive,
        penalization_active,
        energy_norm_hv,
        interaction,
        iterations,
        residual_history: history,
    })
}

/// Path maximum of `J_eps` along the ray through a converged critical point
/// `u*`: an upper representative of the minimax level. Always at least
/// `J_eps(u*)`, with equality within 1% for converged solutions.
pub fn mountain_pass_level(problem: &PenalizedProblem, u_star: &CylField) -> Result<f64> {
    let prep = Prepared::build(problem)?;
    if !u_star.same_grid(&prep.template) {
        return Err(CoreError::Grid("field does not match the problem grid".into()));
    }
    let phi = newtonian_potential(&prep.poisson_source(u_star))?;
    let fiber = Fiber::new(&prep, u_star, &phi);
    let (_, level) = fiber.maximize(problem.params.fiber_max_t)?;
    Ok(level)
}

/// Check whether the penalized solution solves the original problem:
/// `K u^{p-1} ≤ eps² H + μ V` at every cell outside Λ. Returns the flag and
/// the margin field `(eps²H + μV) - K u^{p-1}` (+∞ inside Λ).
pub fn verify_original(
    problem: &PenalizedProblem,
    report: &SolveReport,
) -> Result<(bool, CylField)> {
    let prep = Prepared::build(problem)?;
    if !report.u.same_grid(&prep.template) {
        return Err(CoreError::Grid("report does not match the problem grid".into()));
    }
    let mut margin = prep.template.clone();
    let mut ok = true;
    let p = problem.p;
    for (idx, m) in margin.values_mut().iter_mut().enumerate() {
        if prep.in_lambda[idx] {
            *m = f64::INFINITY;
            continue;
        }
        let ui = report.u.values()[idx].max(0.0);
        let lhs = prep.k[idx] * ui.powf(p - 1.0);
        *m = prep.lin[idx] - lhs;
        if *m < 0.0 {
            ok = false;
        }
    }
    Ok((ok, margin))
}

#[cfg(test)]
mod tests;
