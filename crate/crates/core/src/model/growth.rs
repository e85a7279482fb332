//! Symbolic growth classification of potential specs.
//!
//! The admissibility conditions compare `K` and `W = V + ρ/(1 + |x|)`
//! against power scales at infinity and at the origin. Because potentials
//! are built from a closed term algebra, each term contributes a certified
//! power-law envelope at both ends, and envelopes combine over nonnegative
//! sums. A condition that the envelopes can neither certify nor refute is
//! reported as indeterminate, never guessed.

use super::{GrowthHints, Potential, PotentialSpec, Term};
use crate::error::{CoreError, Result};

/// Certified one-sided power envelopes of a nonnegative function near one
/// end (infinity or the origin): `f ≥ c |x|^lo` and `f ≤ C |x|^hi` with
/// positive constants, or `Vanishes` when f is identically zero near the end.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Envelope {
    /// Certified lower order (with positive constant), when known.
    lo: Option<f64>,
    /// Certified upper order; `None` means no polynomial bound is claimed.
    hi: Option<f64>,
    /// Identically zero near the end.
    vanishes: bool,
}

impl Envelope {
    const ZERO: Envelope = Envelope {
        lo: None,
        hi: None,
        vanishes: true,
    };

    fn power(q: f64) -> Envelope {
        Envelope {
            lo: Some(q),
            hi: Some(q),
            vanishes: false,
        }
    }

    fn upper_only(q: f64) -> Envelope {
        Envelope {
            lo: None,
            hi: Some(q),
            vanishes: false,
        }
    }

    /// Superpolynomially small (Gaussian tail): any power upper bound holds.
    fn negligible() -> Envelope {
        Envelope {
            lo: None,
            hi: Some(f64::NEG_INFINITY),
            vanishes: false,
        }
    }

    fn shift(self, d: f64) -> Envelope {
        Envelope {
            lo: self.lo.map(|q| q + d),
            hi: self.hi.map(|q| if q.is_finite() { q + d } else { q }),
            vanishes: self.vanishes,
        }
    }
}

/// Combine envelopes of nonnegative summands at infinity: the sum dominates
/// each term (max of lower orders) and is dominated by the largest upper
/// order.
fn sum_at_infinity(terms: &[Envelope]) -> Envelope {
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = Some(f64::NEG_INFINITY);
    let mut all_vanish = true;
    for e in terms {
        if e.vanishes {
            continue;
        }
        all_vanish = false;
        if let Some(q) = e.lo {
            lo = Some(lo.map_or(q, |cur: f64| cur.max(q)));
        }
        hi = match (hi, e.hi) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
    }
    if all_vanish {
        Envelope::ZERO
    } else {
        Envelope {
            lo,
            hi,
            vanishes: false,
        }
    }
}

/// Combine at the origin: near 0 the most singular term dominates, so both
/// bounds combine with the minimum order.
fn sum_at_origin(terms: &[Envelope]) -> Envelope {
    let mut lo: Option<f64> = None;
    let mut hi: Option<f64> = Some(f64::INFINITY);
    let mut all_vanish = true;
    for e in terms {
        if e.vanishes {
            continue;
        }
        all_vanish = false;
        if let Some(q) = e.lo {
            lo = Some(lo.map_or(q, |cur: f64| cur.min(q)));
        }
        hi = match (hi, e.hi) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
    }
    if all_vanish {
        Envelope::ZERO
    } else {
        Envelope {
            lo,
            hi,
            vanishes: false,
        }
    }
}

/// A ring polynomial has a certified positive lower bound iff it is a
/// nonnegative-coefficient combination of even monomials plus a positive
/// constant.
fn poly_certified_positive(coeffs: &[(u32, u32, f64)]) -> bool {
    let mut constant = 0.0;
    for &(i, j, c) in coeffs {
        if i == 0 && j == 0 {
            constant += c;
            continue;
        }
        if c < 0.0 || i % 2 == 1 || j % 2 == 1 {
            return false;
        }
    }
    constant > 0.0
}

fn term_envelope_at_infinity(t: &Term) -> Envelope {
    match *t {
        Term::Constant { c } => {
            if c > 0.0 {
                Envelope::power(0.0)
            } else {
                Envelope::ZERO
            }
        }
        Term::AxisPower { c, q } => {
            if c > 0.0 {
                Envelope::power(q)
            } else {
                Envelope::ZERO
            }
        }
        Term::RingPoly {
            ref coeffs, window, ..
        } => {
            if coeffs.iter().all(|&(_, _, c)| c == 0.0) {
                return Envelope::ZERO;
            }
            if window.is_some() {
                // bounded support: contributes nothing at infinity
                return Envelope::ZERO;
            }
            let deg = coeffs
                .iter()
                .filter(|&&(_, _, c)| c != 0.0)
                .map(|&(i, j, _)| (i + j) as f64)
                .fold(0.0, f64::max);
            if poly_certified_positive(coeffs) {
                // bounded below by its constant part; may grow up to deg
                Envelope {
                    lo: Some(0.0),
                    hi: Some(deg),
                    vanishes: false,
                }
            } else {
                Envelope::upper_only(deg)
            }
        }
        Term::GaussianBump { c, .. } => {
            if c > 0.0 {
                Envelope::negligible()
            } else {
                Envelope::ZERO
            }
        }
        Term::CompactBump { .. } => Envelope::ZERO,
    }
}

fn term_envelope_at_origin(t: &Term) -> Envelope {
    match *t {
        Term::Constant { c } => {
            if c > 0.0 {
                Envelope::power(0.0)
            } else {
                Envelope::ZERO
            }
        }
        Term::AxisPower { c, q } => {
            if c > 0.0 {
                Envelope::power(q)
            } else {
                Envelope::ZERO
            }
        }
        Term::RingPoly {
            ref coeffs, window, ..
        } => {
            if coeffs.iter().all(|&(_, _, c)| c == 0.0) {
                return Envelope::ZERO;
            }
            if let Some(w) = window {
                if w.r_min > 0.0 {
                    // window excludes a neighborhood of the origin
                    return Envelope::ZERO;
                }
            }
            if poly_certified_positive(coeffs) {
                Envelope::power(0.0)
            } else {
                // bounded near the origin but positivity not certified
                Envelope::upper_only(0.0)
            }
        }
        Term::GaussianBump { c, .. } => {
            // positive and continuous at the origin
            if c > 0.0 {
                Envelope::power(0.0)
            } else {
                Envelope::ZERO
            }
        }
        Term::CompactBump { c, inner, .. } => {
            if c > 0.0 && inner <= 0.0 {
                Envelope::upper_only(0.0)
            } else {
                Envelope::ZERO
            }
        }
    }
}

fn potential_envelopes(p: &Potential) -> (Envelope, Envelope) {
    let at_inf: Vec<Envelope> = p.terms.iter().map(term_envelope_at_infinity).collect();
    let at_zero: Vec<Envelope> = p.terms.iter().map(term_envelope_at_origin).collect();
    (sum_at_infinity(&at_inf), sum_at_origin(&at_zero))
}

/// Witness exponents attached to a satisfied growth condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    /// σ at infinity / τ at the origin.
    pub power: f64,
    /// α at infinity / γ at the origin, for the third condition.
    pub aux: Option<f64>,
}

/// Tri-state outcome of one growth condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlagState {
    Holds(Witness),
    Fails,
    /// The term algebra could neither certify nor refute the condition.
    Indeterminate,
}

impl FlagState {
    pub fn holds(&self) -> bool {
        matches!(self, FlagState::Holds(_))
    }
}

/// Growth classification: the three conditions at infinity and the three at
/// the origin, with witnessing exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthClass {
    /// Conditions at infinity, in order (1, 2, 3).
    pub at_infinity: [FlagState; 3],
    /// Conditions at the origin, in order (1, 2, 3).
    pub at_origin: [FlagState; 3],
    pub p: f64,
}

impl GrowthClass {
    /// Admissible specs satisfy at least one condition at each end.
    pub fn admissible(&self) -> bool {
        self.at_infinity.iter().any(FlagState::holds)
            && self.at_origin.iter().any(FlagState::holds)
    }

    pub fn any_indeterminate(&self) -> bool {
        self.at_infinity
            .iter()
            .chain(self.at_origin.iter())
            .any(|f| matches!(f, FlagState::Indeterminate))
    }
}

/// Classify the spec's growth behavior for exponent `p > 3`.
///
/// `W = V + ρ/(1 + |x|)` enters the conditions at infinity; `V` alone enters
/// at the origin. Indeterminate outcomes are reported as such; declared
/// hints in the spec are used only to fill in an indeterminate condition.
pub fn classify_growth(spec: &PotentialSpec, p: f64) -> Result<GrowthClass> {
    if p <= 3.0 {
        return Err(CoreError::Domain(format!("p must exceed 3, got {p}")));
    }
    let (k_inf, k_zero) = potential_envelopes(&spec.k);
    let (v_inf, v_zero) = potential_envelopes(&spec.v);
    let (rho_inf, rho_zero) = potential_envelopes(&spec.rho);
    // W = V + ρ/(1+|x|): the ρ part gains a -1 power at infinity and is
    // order-neutral at the origin.
    let w_inf = sum_at_infinity(&[v_inf, rho_inf.shift(-1.0)]);
    let w_zero = sum_at_origin(&[v_zero, rho_zero]);
    let _ = w_zero;

    let hints = spec.hints.unwrap_or(GrowthHints::default());

    // K upper order at infinity; Vanishes or negligible count as any power.
    let k_inf_order = if k_inf.vanishes {
        Some(f64::NEG_INFINITY)
    } else {
        k_inf.hi
    };
    let k_zero_order = if k_zero.vanishes {
        Some(0.0)
    } else {
        k_zero.hi
    };

    // G1 at infinity: some σ < p - 3 bounds K. The witness is K's certified
    // upper order (0 for superpolynomially small K).
    let g1_inf = match k_inf_order {
        Some(q) if q < p - 3.0 => FlagState::Holds(Witness {
            power: if q.is_finite() { q } else { 0.0 },
            aux: None,
        }),
        Some(_) => {
            // upper order too large; definitively fails only if K really
            // grows at that order
            match k_inf.lo {
                Some(ql) if ql >= p - 3.0 => FlagState::Fails,
                _ => FlagState::Indeterminate,
            }
        }
        None => match hints.sigma {
            Some(s) if s < p - 3.0 => FlagState::Holds(Witness {
                power: s,
                aux: None,
            }),
            _ => FlagState::Indeterminate,
        },
    };

    // G2 at infinity: liminf W |x|² > 0 and K polynomially bounded.
    let w_quad_inf = match (w_inf.lo, w_inf.hi, w_inf.vanishes) {
        (_, _, true) => FlagState::Fails,
        (Some(q), _, _) if q >= -2.0 => FlagState::Holds(Witness {
            power: 0.0,
            aux: None,
        }),
        (_, Some(qh), _) if qh < -2.0 => FlagState::Fails,
        _ => FlagState::Indeterminate,
    };
    let g2_inf = match w_quad_inf {
        FlagState::Holds(_) => match k_inf_order {
            Some(q) => FlagState::Holds(Witness {
                power: if q.is_finite() { q.max(0.0) } else { 0.0 },
                aux: None,
            }),
            None => FlagState::Indeterminate,
        },
        other => other,
    };

    // G3 at infinity: liminf W |x|^α > 0 for some α < 2; K bounded by a
    // stretched exponential (true for the whole polynomial algebra).
    let g3_inf = match (w_inf.lo, w_inf.hi, w_inf.vanishes) {
        (_, _, true) => FlagState::Fails,
        (Some(q), _, _) if q > -2.0 => FlagState::Holds(Witness {
            power: 1.0,
            aux: Some((-q).min(2.0 - 1e-9).max(0.0)),
        }),
        (_, Some(qh), _) if qh <= -2.0 => FlagState::Fails,
        _ => FlagState::Indeterminate,
    };

    // G1 at the origin: some τ > -2 bounds K near 0.
    let g1_zero = match k_zero_order {
        Some(t) if t > -2.0 => FlagState::Holds(Witness {
            power: t.min(0.0).max(t),
            aux: None,
        }),
        Some(_) => match k_zero.lo {
            Some(tl) if tl <= -2.0 => FlagState::Fails,
            _ => FlagState::Indeterminate,
        },
        None => match hints.tau {
            Some(t) if t > -2.0 => FlagState::Holds(Witness {
                power: t,
                aux: None,
            }),
            _ => FlagState::Indeterminate,
        },
    };

    // G2 at the origin: liminf V |x|² > 0 near 0 (V alone here).
    let g2_zero = match (v_zero.lo, v_zero.hi, v_zero.vanishes) {
        (Some(q), _, _) if q <= -2.0 => match k_zero_order {
            Some(t) => FlagState::Holds(Witness {
                power: t,
                aux: None,
            }),
            None => FlagState::Indeterminate,
        },
        (_, _, true) => FlagState::Fails,
        (_, Some(qh), _) if qh > -2.0 => FlagState::Fails,
        _ => FlagState::Indeterminate,
    };

    // G3 at the origin: liminf V |x|^γ > 0 for some γ > 2.
    let g3_zero = match (v_zero.lo, v_zero.hi, v_zero.vanishes) {
        (Some(q), _, _) if q < -2.0 => FlagState::Holds(Witness {
            power: 1.0,
            aux: Some(-q),
        }),
        (_, _, true) => FlagState::Fails,
        (_, Some(qh), _) if qh >= -2.0 => FlagState::Fails,
        _ => match hints.gamma {
            Some(g) if g > 2.0 => FlagState::Holds(Witness {
                power: hints.tau.unwrap_or(1.0),
                aux: Some(g),
            }),
            _ => FlagState::Indeterminate,
        },
    };

    Ok(GrowthClass {
        at_infinity: [g1_inf, g2_inf, g3_inf],
        at_origin: [g1_zero, g2_zero, g3_zero],
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PotentialSpec;

    #[test]
    fn constants_satisfy_first_conditions() {
        // V≡1, K≡1, ρ≡1, p=4: G1∞ with σ=0 (0 < p-3), G1₀ with τ=0
        let spec = PotentialSpec::constants(1.0, 1.0, 1.0);
        let g = classify_growth(&spec, 4.0).unwrap();
        match g.at_infinity[0] {
            FlagState::Holds(w) => assert_eq!(w.power, 0.0),
            other => panic!("expected G1-infinity, got {other:?}"),
        }
        match g.at_origin[0] {
            FlagState::Holds(w) => assert_eq!(w.power, 0.0),
            other => panic!("expected G1-origin, got {other:?}"),
        }
        assert!(g.admissible());
    }

    #[test]
    fn compactly_supported_v_fails_second_condition() {
        // V compactly supported, K≡1, ρ≡0: G1∞ holds with σ=0 but W decays
        // faster than |x|^{-2}, so G2∞ fails.
        let mut spec = PotentialSpec::constants(0.0, 1.0, 0.0);
        spec.v = Potential {
            terms: vec![Term::CompactBump {
                c: 1.0,
                inner: 0.5,
                outer: 1.5,
            }],
        };
        let g = classify_growth(&spec, 4.0).unwrap();
        assert!(g.at_infinity[0].holds());
        assert_eq!(g.at_infinity[1], FlagState::Fails);
        assert_eq!(g.at_infinity[2], FlagState::Fails);
    }

    #[test]
    fn growing_k_needs_second_condition() {
        // V≡1, K = |x|^2, p=4: σ0 = 2 ≥ p-3 = 1 so G1∞ fails; W|x|² → ∞ and
        // K is polynomially bounded, so G2∞ holds.
        let mut spec = PotentialSpec::constants(1.0, 0.0, 0.0);
        spec.k = Potential {
            terms: vec![Term::AxisPower { c: 1.0, q: 2.0 }],
        };
        let g = classify_growth(&spec, 4.0).unwrap();
        assert_eq!(g.at_infinity[0], FlagState::Fails);
        match g.at_infinity[1] {
            FlagState::Holds(w) => assert!(w.power >= 2.0),
            other => panic!("expected G2-infinity, got {other:?}"),
        }
    }

    #[test]
    fn monotone_in_p_for_first_condition() {
        // if G1∞ holds at p with witness σ, it holds at any p' > p
        let mut spec = PotentialSpec::constants(1.0, 0.0, 1.0);
        spec.k = Potential {
            terms: vec![Term::AxisPower { c: 2.0, q: 0.5 }],
        };
        let mut prev_sigma = None;
        for &p in &[3.6, 4.0, 5.0, 7.0] {
            let g = classify_growth(&spec, p).unwrap();
            match g.at_infinity[0] {
                FlagState::Holds(w) => {
                    if let Some(s) = prev_sigma {
                        assert_eq!(w.power, s);
                    }
                    prev_sigma = Some(w.power);
                }
                other => panic!("G1-infinity should hold at p={p}, got {other:?}"),
            }
        }
    }

    #[test]
    fn mixed_terms_without_dominant_order_are_indeterminate() {
        // odd ring polynomial: no certified lower bound at infinity, so the
        // W-dependent conditions come back indeterminate rather than guessed
        let mut spec = PotentialSpec::constants(0.0, 1.0, 0.0);
        spec.v = Potential {
            terms: vec![Term::RingPoly {
                s0: 0.0,
                r0: 2.0,
                coeffs: vec![(0, 2, 1.0), (0, 3, 0.1)],
                window: None,
            }],
        };
        let g = classify_growth(&spec, 4.0).unwrap();
        assert_eq!(g.at_infinity[1], FlagState::Indeterminate);
        assert_eq!(g.at_infinity[2], FlagState::Indeterminate);
        assert!(g.any_indeterminate());
        // the K-only condition remains decidable
        assert!(g.at_infinity[0].holds());
    }

    #[test]
    fn inverse_square_v_at_origin() {
        // V = |x|^{-2} near 0 certifies the second origin condition
        let mut spec = PotentialSpec::constants(0.0, 1.0, 0.0);
        spec.v = Potential {
            terms: vec![Term::AxisPower { c: 1.0, q: -2.0 }],
        };
        let g = classify_growth(&spec, 4.0).unwrap();
        assert!(g.at_origin[1].holds());
        // and the third needs strictly faster blowup
        assert_eq!(g.at_origin[2], FlagState::Fails);
        let mut spec2 = spec.clone();
        spec2.v = Potential {
            terms: vec![Term::AxisPower { c: 1.0, q: -3.0 }],
        };
        let g2 = classify_growth(&spec2, 4.0).unwrap();
        match g2.at_origin[2] {
            FlagState::Holds(w) => assert_eq!(w.aux, Some(3.0)),
            other => panic!("expected G3-origin, got {other:?}"),
        }
    }

    #[test]
    fn p_at_most_three_rejected() {
        let spec = PotentialSpec::constants(1.0, 1.0, 1.0);
        assert!(classify_growth(&spec, 3.0).is_err());
    }
}
