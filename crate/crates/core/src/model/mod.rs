//! Problem data: potentials, the symmetric region Λ, growth classification
//! and the concentration functionals.
//!
//! Potentials are cylindrically symmetric by construction — every term is a
//! closed-form function of `(s, r)` with `s` the coordinate along the
//! symmetry axis and `r = |x''| ≥ 0` the distance to it. Restricting to a
//! closed-form term algebra keeps the asymptotic growth classification
//! decidable; arbitrary callables are deliberately not accepted.

mod aux;
mod growth;
mod region;

pub use aux::{
    auxiliary_potential_m, concentration_functional_a, cyl_distance, minimize_m_on_ring,
    MOnRingReport,
};
pub use growth::{classify_growth, FlagState, GrowthClass, Witness};
pub use region::RegionLambda;

use crate::error::{CoreError, Result};
use serde::{Deserialize, Serialize};

/// One closed-form term of a potential. All terms must be nonnegative on the
/// evaluated half-plane; this is validated at evaluation time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Term {
    /// Constant `c`.
    Constant { c: f64 },
    /// `c · |x|^q` with `|x| = sqrt(s² + r²)`. Singular at the origin for
    /// q < 0; evaluation there is a domain error.
    AxisPower { c: f64, q: f64 },
    /// Polynomial in `(s - s0, r - r0)`: `Σ c_k (s - s0)^{i_k} (r - r0)^{j_k}`,
    /// optionally restricted to a window (zero outside).
    RingPoly {
        #[serde(default)]
        s0: f64,
        #[serde(default)]
        r0: f64,
        /// Monomials as `(s-power, r-power, coefficient)`.
        coeffs: Vec<(u32, u32, f64)>,
        #[serde(default)]
        window: Option<Window>,
    },
    /// Gaussian bump `c · exp(-((s - s0)² + (r - r0)²) / w²)`.
    GaussianBump { c: f64, s0: f64, r0: f64, w: f64 },
    /// Smooth bump supported in the 3D-radius annulus `inner < |x| < outer`,
    /// peak value `c` at the mid-radius. Requires `inner > 0`.
    CompactBump { c: f64, inner: f64, outer: f64 },
}

/// Rectangular window in `(s, r)` for windowed polynomial terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub s_half: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Term {
    /// Evaluate at `(s, r)`; `Err` on a declared singularity.
    pub fn eval(&self, s: f64, r: f64) -> Result<f64> {
        match *self {
            Term::Constant { c } => Ok(c),
            Term::AxisPower { c, q } => {
                let x2 = s * s + r * r;
                if x2 == 0.0 && q < 0.0 {
                    return Err(CoreError::Domain(
                        "axis-power term with negative exponent evaluated at the origin".into(),
                    ));
                }
                if x2 == 0.0 && q == 0.0 {
                    return Ok(c);
                }
                Ok(c * x2.sqrt().powf(q))
            }
            Term::RingPoly {
                s0,
                r0,
                ref coeffs,
                window,
            } => {
                if let Some(w) = window {
                    if s.abs() > w.s_half || r < w.r_min || r > w.r_max {
                        return Ok(0.0);
                    }
                }
                let (ds, dr) = (s - s0, r - r0);
                Ok(coeffs
                    .iter()
                    .map(|&(i, j, c)| c * ds.powi(i as i32) * dr.powi(j as i32))
                    .sum())
            }
            Term::GaussianBump { c, s0, r0, w } => {
                let d2 = (s - s0) * (s - s0) + (r - r0) * (r - r0);
                Ok(c * (-d2 / (w * w)).exp())
            }
            Term::CompactBump { c, inner, outer } => {
                let x = (s * s + r * r).sqrt();
                let mid = 0.5 * (inner + outer);
                let half = 0.5 * (outer - inner);
                let t = (x - mid) / half;
                if t.abs() >= 1.0 {
                    Ok(0.0)
                } else {
                    Ok(c * (1.0 - 1.0 / (1.0 - t * t)).exp())
                }
            }
        }
    }
}

/// Sum of closed-form terms.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Potential {
    pub terms: Vec<Term>,
}

impl Potential {
    pub fn constant(c: f64) -> Potential {
        Potential {
            terms: vec![Term::Constant { c }],
        }
    }

    pub fn eval(&self, s: f64, r: f64) -> Result<f64> {
        let mut acc = 0.0;
        for t in &self.terms {
            acc += t.eval(s, r)?;
        }
        Ok(acc)
    }

    /// True when no term can produce a nonzero value.
    pub fn is_identically_zero(&self) -> bool {
        self.terms.iter().all(|t| match *t {
            Term::Constant { c } => c == 0.0,
            Term::AxisPower { c, .. }
            | Term::GaussianBump { c, .. }
            | Term::CompactBump { c, .. } => c == 0.0,
            Term::RingPoly { ref coeffs, .. } => coeffs.iter().all(|&(_, _, c)| c == 0.0),
        })
    }
}

/// Optional user-declared growth exponents, used as a fallback when the
/// symbolic classifier cannot certify a condition on its own.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GrowthHints {
    pub sigma: Option<f64>,
    pub tau: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
}

/// The problem's potential data `(V, K, ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub v: Potential,
    pub k: Potential,
    pub rho: Potential,
    #[serde(default)]
    pub hints: Option<GrowthHints>,
}

impl PotentialSpec {
    pub fn new(v: Potential, k: Potential, rho: Potential) -> Result<PotentialSpec> {
        if k.is_identically_zero() {
            return Err(CoreError::Invariant("K must not be identically zero".into()));
        }
        Ok(PotentialSpec {
            v,
            k,
            rho,
            hints: None,
        })
    }

    /// Constants `(V, K, ρ) ≡ (v0, k0, rho0)`.
    pub fn constants(v0: f64, k0: f64, rho0: f64) -> PotentialSpec {
        PotentialSpec {
            v: Potential::constant(v0),
            k: Potential::constant(k0),
            rho: Potential::constant(rho0),
            hints: None,
        }
    }
}

/// Evaluate `(V, K, ρ)` at `(s, r)`, checking nonnegativity.
pub fn eval_potentials(spec: &PotentialSpec, s: f64, r: f64) -> Result<(f64, f64, f64)> {
    debug_assert!(r >= 0.0, "r must be nonnegative");
    let v = spec.v.eval(s, r)?;
    let k = spec.k.eval(s, r)?;
    let rho = spec.rho.eval(s, r)?;
    for (name, val) in [("V", v), ("K", k), ("rho", rho)] {
        if val < 0.0 || !val.is_finite() {
            return Err(CoreError::Invariant(format!(
                "{name}({s}, {r}) = {val} violates nonnegativity"
            )));
        }
    }
    Ok((v, k, rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_spec_evaluates_everywhere() {
        let spec = PotentialSpec::constants(1.0, 1.0, 1.0);
        for &(s, r) in &[(0.0, 0.0), (-3.0, 2.0), (10.0, 0.5)] {
            assert_eq!(eval_potentials(&spec, s, r).unwrap(), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn singular_axis_power_at_origin_errors() {
        let mut spec = PotentialSpec::constants(1.0, 1.0, 0.0);
        spec.v = Potential {
            terms: vec![Term::AxisPower { c: 1.0, q: -2.0 }],
        };
        assert!(matches!(
            eval_potentials(&spec, 0.0, 0.0),
            Err(CoreError::Domain(_))
        ));
        // fine away from the origin
        assert!(eval_potentials(&spec, 0.5, 0.0).is_ok());
    }

    #[test]
    fn ring_polynomial_evaluation() {
        // V = 1 + (r - 2)^2 evaluated at (0, 2) is 1
        let v = Potential {
            terms: vec![
                Term::Constant { c: 1.0 },
                Term::RingPoly {
                    s0: 0.0,
                    r0: 2.0,
                    coeffs: vec![(0, 2, 1.0)],
                    window: None,
                },
            ],
        };
        assert!((v.eval(0.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((v.eval(0.0, 3.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn k_identically_zero_rejected() {
        let z = Potential::constant(0.0);
        assert!(PotentialSpec::new(z.clone(), z.clone(), z).is_err());
    }

    #[test]
    fn negative_potential_value_is_invariant_violation() {
        let mut spec = PotentialSpec::constants(1.0, 1.0, 0.0);
        spec.v = Potential {
            terms: vec![Term::RingPoly {
                s0: 0.0,
                r0: 0.0,
                coeffs: vec![(1, 0, 1.0)], // V = s, negative for s < 0
                window: None,
            }],
        };
        assert!(matches!(
            eval_potentials(&spec, -1.0, 0.0),
            Err(CoreError::Invariant(_))
        ));
    }

    #[test]
    fn compact_bump_support() {
        let t = Term::CompactBump {
            c: 2.0,
            inner: 1.0,
            outer: 2.0,
        };
        assert_eq!(t.eval(0.0, 0.5).unwrap(), 0.0);
        assert_eq!(t.eval(0.0, 3.0).unwrap(), 0.0);
        assert!((t.eval(0.0, 1.5).unwrap() - 2.0).abs() < 1e-15); // peak at mid-annulus
        assert!(t.eval(0.0, 1.2).unwrap() > 0.0);
    }
}
