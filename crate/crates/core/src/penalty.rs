//! Penalization machinery: the Hardy-type potential H, the penalized
//! nonlinearity g_eps with its exact primitive, effective potentials, and
//! the decay-envelope evaluators.
//!
//! Outside the region Λ the nonlinearity is capped by a linear term
//! `(eps² H + μ V) s`, which Hardy's inequality keeps subordinate to the
//! Laplacian; solutions of the penalized problem solve the original one as
//! soon as they dip below the branch-crossing amplitude everywhere outside Λ.

use crate::error::{CoreError, Result};
use crate::model::{cyl_distance, eval_potentials, PotentialSpec, RegionLambda};
use crate::poisson::CylField;
use serde::{Deserialize, Serialize};

/// Penalization constants. `eps` is the semiclassical parameter; `kappa`
/// must stay below the Hardy constant 1/4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenalizationParams {
    pub eps: f64,
    pub kappa: f64,
    pub beta: f64,
    pub mu: f64,
}

impl PenalizationParams {
    pub fn new(eps: f64, kappa: f64, beta: f64, mu: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(CoreError::Domain(format!("eps must be positive: {eps}")));
        }
        if !(kappa > 0.0 && kappa < 0.25) {
            return Err(CoreError::Domain(format!("kappa must lie in (0, 1/4): {kappa}")));
        }
        if !(beta > 0.0) {
            return Err(CoreError::Domain(format!("beta must be positive: {beta}")));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(CoreError::Domain(format!("mu must lie in (0, 1): {mu}")));
        }
        Ok(PenalizationParams { eps, kappa, beta, mu })
    }

    /// Defaults κ = 0.1, β = 1, μ = 0.1.
    pub fn with_defaults(eps: f64) -> Result<Self> {
        PenalizationParams::new(eps, 0.1, 1.0, 0.1)
    }
}

/// Hardy-type penalization potential
/// `H(x) = κ / (|x|² ((log|x|)² + 1)^{(1+β)/2})`, satisfying `H ≤ κ/|x|²`.
pub fn hardy_potential(params: &PenalizationParams, s: f64, r: f64) -> Result<f64> {
    let x2 = s * s + r * r;
    if x2 == 0.0 {
        return Err(CoreError::Domain("H is undefined at the origin".into()));
    }
    let log = 0.5 * x2.ln(); // log |x|
    Ok(params.kappa / (x2 * (log * log + 1.0).powf(0.5 * (1.0 + params.beta))))
}

/// Outcome of the Hardy positivity check
/// `∫(|∇u|² - H u²) ≥ (1/4 - κ) ∫ u²/|x|²`.
#[derive(Debug, Clone, Copy)]
pub struct HardyCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Evaluate both sides of the Hardy positivity inequality on a field.
/// `slack` absorbs quadrature error (the acceptance uses 1e-6 ∫|∇u|²).
pub fn hardy_positivity_check(
    u: &CylField,
    params: &PenalizationParams,
    slack_rel: f64,
) -> Result<HardyCheck> {
    let grad = u.dirichlet_form();
    let mut h_term = 0.0;
    let mut inv_sq = 0.0;
    let sc = u.s_axis().centers();
    let rc = u.r_axis().centers();
    for j in 0..u.nr() {
        for i in 0..u.ns() {
            let v = u.get(i, j);
            if v == 0.0 {
                continue;
            }
            let vol = u.volume(i, j);
            let x2 = sc[i] * sc[i] + rc[j] * rc[j];
            h_term += hardy_potential(params, sc[i], rc[j])? * v * v * vol;
            inv_sq += v * v / x2 * vol;
        }
    }
    let lhs = grad - h_term;
    let rhs = (0.25 - params.kappa) * inv_sq;
    Ok(HardyCheck {
        lhs,
        rhs,
        pass: lhs >= rhs - slack_rel * grad,
    })
}

/// Linear branch coefficient `eps² H + μ V` at a point outside Λ.
pub fn linear_coefficient(
    spec: &PotentialSpec,
    params: &PenalizationParams,
    s: f64,
    r: f64,
) -> Result<f64> {
    let (v, _, _) = eval_potentials(spec, s, r)?;
    Ok(params.eps * params.eps * hardy_potential(params, s, r)? + params.mu * v)
}

/// Branch-crossing amplitude `s_c = ((eps²H + μV)/K)^{1/(p-1)}`; `+∞` when
/// K vanishes (the power branch is then identically zero).
pub fn branch_crossing(lin: f64, k: f64, p: f64) -> f64 {
    if k == 0.0 {
        f64::INFINITY
    } else {
        (lin / k).powf(1.0 / (p - 1.0))
    }
}

/// Penalized nonlinearity
/// `g_eps(x, s) = χ_Λ K s₊^p + (1-χ_Λ) min{(eps²H + μV) s₊, K s₊^p}`.
pub fn penalized_g(
    spec: &PotentialSpec,
    region: &RegionLambda,
    params: &PenalizationParams,
    x: (f64, f64),
    s_val: f64,
    p: f64,
) -> Result<f64> {
    if s_val <= 0.0 {
        return Ok(0.0);
    }
    let (_, k, _) = eval_potentials(spec, x.0, x.1)?;
    let power = k * s_val.powf(p);
    if region.contains(x.0, x.1) {
        return Ok(power);
    }
    let lin = linear_coefficient(spec, params, x.0, x.1)?;
    Ok((lin * s_val).min(power))
}

/// Exact primitive `G_eps(x, s) = ∫₀^s g_eps(x, σ) dσ`, continuous across
/// the branch crossing.
pub fn penalized_g_primitive(
    spec: &PotentialSpec,
    region: &RegionLambda,
    params: &PenalizationParams,
    x: (f64, f64),
    s_val: f64,
    p: f64,
) -> Result<f64> {
    if s_val <= 0.0 {
        return Ok(0.0);
    }
    let (_, k, _) = eval_potentials(spec, x.0, x.1)?;
    if region.contains(x.0, x.1) {
        return Ok(k * s_val.powf(p + 1.0) / (p + 1.0));
    }
    let lin = linear_coefficient(spec, params, x.0, x.1)?;
    let sc = branch_crossing(lin, k, p);
    if s_val <= sc {
        Ok(k * s_val.powf(p + 1.0) / (p + 1.0))
    } else {
        // power branch up to s_c, linear branch beyond
        Ok(k * sc.powf(p + 1.0) / (p + 1.0) + 0.5 * lin * (s_val * s_val - sc * sc))
    }
}

/// Effective potential `W = V + ρ/(1 + |x|)` entering the growth conditions.
pub fn effective_w(spec: &PotentialSpec, s: f64, r: f64) -> Result<f64> {
    let (v, _, rho) = eval_potentials(spec, s, r)?;
    let x = (s * s + r * r).sqrt();
    Ok(v + rho / (1.0 + x))
}

/// Outside-Λ operator potential `W_eps = (1-μ) V + C_eps ρ/(C'_eps + |x|)`,
/// with the Poisson lower-bound constants supplied by the solver's fit.
pub fn effective_w_eps(
    spec: &PotentialSpec,
    params: &PenalizationParams,
    c_eps: f64,
    c_eps_prime: f64,
    s: f64,
    r: f64,
) -> Result<f64> {
    let (v, _, rho) = eval_potentials(spec, s, r)?;
    let x = (s * s + r * r).sqrt();
    Ok((1.0 - params.mu) * v + c_eps * rho / (c_eps_prime + x))
}

/// Decay-envelope selector, following the growth-condition cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayCase {
    /// `C exp(-(λ/eps) d/(1+d)) (1+|x|)^{-1}`.
    Base,
    /// Quadratic decay of W at infinity: `(1+|x|)^{-ν/eps}` tail weight.
    QuadraticInfinity,
    /// Subquadratic decay, exponent α < 2:
    /// `C exp(-(λ/eps)(d/(1+d))(1+|x|)^{(2-α)/2})`.
    SubquadraticInfinity,
    /// Quadratic blowup of V at the origin: `(|x|/(1+|x|))^{ν/eps}` weight.
    QuadraticOrigin,
    /// Superquadratic blowup, exponent γ > 2:
    /// `C exp(-(λ/eps)(d/(1+d))(|x|/(1+|x|))^{(γ-2)/2})`.
    SuperquadraticOrigin,
}

/// Fitted envelope constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit {
    pub c: f64,
    pub lambda: f64,
    /// ν for the quadratic cases.
    pub nu: Option<f64>,
    /// α (infinity) or γ (origin) for the stretched cases.
    pub exponent: Option<f64>,
}

/// Evaluate a decay envelope at `x = (s, r)` with concentration circle
/// through `circle = (s̄, r̄)`.
pub fn decay_envelope(
    case: DecayCase,
    fit: &EnvelopeFit,
    eps: f64,
    x: (f64, f64),
    circle: (f64, f64),
) -> Result<f64> {
    if !(fit.c > 0.0) || !(fit.lambda > 0.0) {
        return Err(CoreError::Domain(
            "envelope constants must be positive".into(),
        ));
    }
    let d = cyl_distance(x, circle);
    let xn = (x.0 * x.0 + x.1 * x.1).sqrt();
    let core = (-(fit.lambda / eps) * d / (1.0 + d)).exp();
    match case {
        DecayCase::Base => Ok(fit.c * core / (1.0 + xn)),
        DecayCase::QuadraticInfinity => {
            let nu = fit.nu.ok_or_else(|| CoreError::Domain("missing ν".into()))?;
            Ok(fit.c * core * (1.0 + xn).powf(-nu / eps))
        }
        DecayCase::SubquadraticInfinity => {
            let alpha = fit
                .exponent
                .ok_or_else(|| CoreError::Domain("missing α".into()))?;
            if alpha >= 2.0 {
                return Err(CoreError::Domain(format!(
                    "subquadratic case needs α < 2, got {alpha}"
                )));
            }
            let stretch = (1.0 + xn).powf(0.5 * (2.0 - alpha));
            Ok(fit.c * (-(fit.lambda / eps) * d / (1.0 + d) * stretch).exp())
        }
        DecayCase::QuadraticOrigin => {
            let nu = fit.nu.ok_or_else(|| CoreError::Domain("missing ν".into()))?;
            Ok(fit.c * core * (xn / (1.0 + xn)).powf(nu / eps))
        }
        DecayCase::SuperquadraticOrigin => {
            let gamma = fit
                .exponent
                .ok_or_else(|| CoreError::Domain("missing γ".into()))?;
            if gamma <= 2.0 {
                return Err(CoreError::Domain(format!(
                    "superquadratic case needs γ > 2, got {gamma}"
                )));
            }
            let stretch = (xn / (1.0 + xn)).powf(0.5 * (gamma - 2.0));
            Ok(fit.c * (-(fit.lambda / eps) * d / (1.0 + d) * stretch).exp())
        }
    }
}

/// Interior comparison barrier `cosh(λ (R - d_d(x, x̄)) / eps)`: equals
/// cosh(λR/eps) at the center and 1 on the sphere d_d = R.
pub fn cosh_barrier(lambda: f64, big_r: f64, eps: f64, x: (f64, f64), center: (f64, f64)) -> f64 {
    ((lambda / eps) * (big_r - cyl_distance(x, center))).cosh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PotentialSpec;
    use crate::poisson::Axis;

    fn params(eps: f64) -> PenalizationParams {
        PenalizationParams::with_defaults(eps).unwrap()
    }

    #[test]
    fn parameter_ranges_enforced() {
        assert!(PenalizationParams::new(0.1, 0.3, 1.0, 0.1).is_err());
        assert!(PenalizationParams::new(0.1, 0.1, 0.0, 0.1).is_err());
        assert!(PenalizationParams::new(0.1, 0.1, 1.0, 1.0).is_err());
        assert!(PenalizationParams::new(-0.1, 0.1, 1.0, 0.5).is_err());
    }

    #[test]
    fn hardy_unit_radius() {
        // log|x| = 0 there, so H = κ
        let p = params(0.1);
        let h = hardy_potential(&p, 0.6, 0.8).unwrap();
        assert!((h - p.kappa).abs() < 1e-15);
    }

    #[test]
    fn hardy_at_radius_e() {
        // |x| = e, β = 1: H = κ / (e² · 2)
        let p = params(0.1);
        let e = std::f64::consts::E;
        let h = hardy_potential(&p, 0.0, e).unwrap();
        assert!((h - p.kappa / (e * e * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn hardy_dominated_by_inverse_square() {
        let p = params(0.1);
        // deterministic low-discrepancy sweep standing in for random points
        let mut x = 0.123f64;
        for _ in 0..100_000 {
            x = (x * 9301.0 + 49297.0) % 233280.0;
            let s = (x / 233280.0 - 0.5) * 20.0;
            x = (x * 9301.0 + 49297.0) % 233280.0;
            let r = (x / 233280.0) * 10.0 + 1e-6;
            let h = hardy_potential(&p, s, r).unwrap();
            let bound = p.kappa / (s * s + r * r);
            assert!(h <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn hardy_origin_is_domain_error() {
        assert!(hardy_potential(&params(0.1), 0.0, 0.0).is_err());
    }

    #[test]
    fn g_inside_region_is_pure_power() {
        let spec = PotentialSpec::constants(1.0, 1.0, 0.0);
        let lam = RegionLambda::ring(1.0, 3.0, 1.0).unwrap();
        let g = penalized_g(&spec, &lam, &params(0.1), (0.0, 2.0), 2.0, 4.0).unwrap();
        assert!((g - 16.0).abs() < 1e-12);
    }

    #[test]
    fn g_outside_selects_linear_branch_for_large_amplitude() {
        let spec = PotentialSpec::constants(1.0, 1.0, 0.0);
        let lam = RegionLambda::ring(1.0, 3.0, 1.0).unwrap();
        let pp = params(0.1);
        let x = (0.0, 5.0);
        let lin = linear_coefficient(&spec, &pp, x.0, x.1).unwrap();
        let s = 10.0;
        let g = penalized_g(&spec, &lam, &pp, x, s, 4.0).unwrap();
        assert!((g - lin * s).abs() < 1e-12 * g);
    }

    #[test]
    fn g_nonpositive_amplitude_is_zero() {
        let spec = PotentialSpec::constants(1.0, 1.0, 0.0);
        let lam = RegionLambda::ring(1.0, 3.0, 1.0).unwrap();
        assert_eq!(
            penalized_g(&spec, &lam, &params(0.1), (0.0, 5.0), -3.0, 4.0).unwrap(),
            0.0
        );
        assert_eq!(
            penalized_g(&spec, &lam, &params(0.1), (0.0, 2.0), 0.0, 4.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn primitive_branches() {
        let spec = PotentialSpec::constants(1.0, 1.0, 0.0);
        let lam = RegionLambda::ring(1.0, 3.0, 1.0).unwrap();
        let pp = params(0.1);
        let p = 4.0;
        // inside: pure power primitive
        let gi = penalized_g_primitive(&spec, &lam, &pp, (0.0, 2.0), 2.0, p).unwrap();
        assert!((gi - 32.0 / 5.0).abs() < 1e-12);
        // outside, below the crossing: still the power primitive
        let x = (0.0, 5.0);
        let lin = linear_coefficient(&spec, &pp, x.0, x.1).unwrap();
        let sc = branch_crossing(lin, 1.0, p);
        let s_small = 0.5 * sc;
        let go = penalized_g_primitive(&spec, &lam, &pp, x, s_small, p).unwrap();
        assert!((go - s_small.powf(p + 1.0) / (p + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn g_and_primitive_continuous_at_crossing() {
        let spec = PotentialSpec::constants(1.0, 1.0, 0.0);
        let lam = RegionLambda::ring(1.0, 3.0, 1.0).unwrap();
        let pp = params(0.1);
        let p = 4.0;
        let x = (1.0, 4.0);
        let lin = linear_coefficient(&spec, &pp, x.0, x.1).unwrap();
        let sc = branch_crossing(lin, 1.0, p);
        let eps = 1e-9 * sc;
        let (g_lo, g_hi) = (
            penalized_g(&spec, &lam, &pp, x, sc - eps, p).unwrap(),
            penalized_g(&spec, &lam, &pp, x, sc + eps, p).unwrap(),
        );
        assert!((g_lo - g_hi).abs() < 1e-12 * g_hi.max(1e-300));
        let (gg_lo, gg_hi) = (
            penalized_g_primitive(&spec, &lam, &pp, x, sc - eps, p).unwrap(),
            penalized_g_primitive(&spec, &lam, &pp, x, sc + eps, p).unwrap(),
        );
        assert!((gg_lo - gg_hi).abs() < 1e-12 * gg_hi.max(1e-300));
    }

    #[test]
    fn g_property_suite_on_lattice() {
        // (g1)-(g4) on an (x, s) lattice for the flagship-style spec
        let spec = PotentialSpec::constants(1.0, 1.0, 1.0);
        let lam = RegionLambda::ring(1.0, 3.0, 1.0).unwrap();
        let pp = params(0.1);
        let p = 4.0;
        for ix in 0..50 {
            let x = (-2.0 + 0.1 * ix as f64, 0.05 + 0.1 * ix as f64);
            let inside = lam.contains(x.0, x.1);
            let lin = if inside {
                f64::INFINITY
            } else {
                linear_coefficient(&spec, &pp, x.0, x.1).unwrap()
            };
            let mut prev_ratio = 0.0;
            for is in 1..50 {
                let s = 0.08 * is as f64;
                let g = penalized_g(&spec, &lam, &pp, x, s, p).unwrap();
                let gg = penalized_g_primitive(&spec, &lam, &pp, x, s, p).unwrap();
                // (g2): g/s^p bounded by K
                assert!(g / s.powf(p) <= 1.0 + 1e-12);
                // (g4): g/s nondecreasing
                let ratio = g / s;
                assert!(ratio >= prev_ratio - 1e-13);
                prev_ratio = ratio;
                if inside {
                    // (g3) inside: (p+1) G = g s exactly
                    assert!(((p + 1.0) * gg - g * s).abs() < 1e-12 * (g * s).max(1e-300));
                } else {
                    // (g3) outside: 2G ≤ gs ≤ (eps²H + μV)s²
                    assert!(2.0 * gg <= g * s + 1e-12 * (g * s).max(1e-300));
                    assert!(g * s <= lin * s * s * (1.0 + 1e-12));
                }
            }
            // (g1): g(x, s)/s -> 0 as s -> 0+
            let tiny = penalized_g(&spec, &lam, &pp, x, 1e-6, p).unwrap() / 1e-6;
            let unit = penalized_g(&spec, &lam, &pp, x, 1.0, p).unwrap();
            assert!(tiny <= 1e-3 * unit.max(1e-300));
        }
    }

    #[test]
    fn effective_potentials() {
        let spec = PotentialSpec::constants(0.0, 1.0, 1.0);
        let w = effective_w(&spec, 0.0, 1.0).unwrap();
        assert!((w - 0.5).abs() < 1e-15); // 1/(1+|x|) at |x| = 1
        let spec2 = PotentialSpec::constants(2.0, 1.0, 0.0);
        let pp = params(0.1);
        let weps = effective_w_eps(&spec2, &pp, 1.0, 1.0, 0.0, 1.0).unwrap();
        assert!((weps - (1.0 - pp.mu) * 2.0).abs() < 1e-15);
        // V≡1, ρ≡1: W -> 1 for |x| -> ∞
        let spec3 = PotentialSpec::constants(1.0, 1.0, 1.0);
        assert!((effective_w(&spec3, 0.0, 1e9).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn envelope_base_cases() {
        let fit = EnvelopeFit {
            c: 2.0,
            lambda: 0.8,
            nu: None,
            exponent: None,
        };
        let circle = (0.0, 2.0);
        // on the circle d = 0: envelope = C (1+|x|)^{-1}
        let v = decay_envelope(DecayCase::Base, &fit, 0.1, (0.0, 2.0), circle).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
        // halving eps squares the exponential factor at fixed d
        let x = (0.5, 2.5);
        let d = cyl_distance(x, circle);
        let geom = 2.0 / (1.0 + (x.0 * x.0 + x.1 * x.1).sqrt());
        let e1 = decay_envelope(DecayCase::Base, &fit, 0.2, x, circle).unwrap() / geom;
        let e2 = decay_envelope(DecayCase::Base, &fit, 0.1, x, circle).unwrap() / geom;
        assert!((e2 - e1 * e1).abs() < 1e-12);
        let _ = d;
        // decreasing along a ray
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let xv = (0.0, 2.0 + 0.3 * k as f64);
            let v = decay_envelope(DecayCase::Base, &fit, 0.1, xv, circle).unwrap();
            assert!(v < prev && v > 0.0);
            prev = v;
        }
    }

    #[test]
    fn envelope_case_parameters_required() {
        let fit = EnvelopeFit {
            c: 1.0,
            lambda: 1.0,
            nu: None,
            exponent: None,
        };
        assert!(decay_envelope(
            DecayCase::QuadraticInfinity,
            &fit,
            0.1,
            (0.0, 3.0),
            (0.0, 2.0)
        )
        .is_err());
    }

    #[test]
    fn cosh_barrier_values() {
        let center = (0.0, 2.0);
        // on the sphere d = R: cosh(0) = 1
        let v = cosh_barrier(0.7, 0.5, 0.1, (0.0, 2.5), center);
        assert!((v - 1.0).abs() < 1e-14);
        // at the center: cosh(λR/eps)
        let v0 = cosh_barrier(0.7, 0.5, 0.1, center, center);
        assert!((v0 - (0.7 * 0.5 / 0.1f64).cosh()).abs() < 1e-10);
        // parity in the sign of R - d
        let a = cosh_barrier(0.7, 0.5, 0.1, (0.0, 2.3), center); // d = 0.3
        let b = cosh_barrier(0.7, 0.5, 0.1, (0.0, 2.7), center); // d = 0.7
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn hardy_positivity_for_smooth_bumps() {
        let s = Axis::uniform(-2.0, 0.05, 80).unwrap();
        let r = Axis::uniform(0.0, 0.05, 60).unwrap();
        for &kappa in &[0.1, 0.2, 0.24] {
            let pp = PenalizationParams::new(0.1, kappa, 1.0, 0.1).unwrap();
            let u = CylField::from_fn(s.clone(), r.clone(), |sc, rc| {
                let d2 = ((sc - 0.3) * (sc - 0.3) + (rc - 1.2) * (rc - 1.2)) / 0.36;
                if d2 < 1.0 {
                    (1.0 - d2).powi(3)
                } else {
                    0.0
                }
            })
            .unwrap();
            let chk = hardy_positivity_check(&u, &pp, 1e-6).unwrap();
            assert!(chk.pass, "kappa={kappa}: {} < {}", chk.lhs, chk.rhs);
        }
    }

    #[test]
    fn hardy_positivity_zero_field() {
        let u = CylField::uniform(-1.0, 0.25, 8, 0.25, 4).unwrap();
        let chk = hardy_positivity_check(&u, &params(0.1), 1e-6).unwrap();
        assert!(chk.pass && chk.lhs == 0.0 && chk.rhs == 0.0);
    }
}
