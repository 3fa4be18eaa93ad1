//! The two-oscillator X state as a function of the injected noise energy.
//!
//! Each reservoir pumps an energy `epsilon` into its oscillator; the joint
//! density matrix keeps an X shape in the basis |00>, |01>, |10>, |11> with
//! party A on the most significant qubit. The raw entries come out of the
//! noise average without unit trace, so normalization is explicit and the
//! state carries a flag saying which form it is in.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, Matrix};

/// Constructors reject injected energies above this to keep `(1+eps)^5`
/// comfortably inside f64 range; physical sweeps stay far below it.
pub const MAX_EPSILON: f64 = 1e6;

const BLOCK_TOL: f64 = 1e-12;
const TRACE_FLAG_TOL: f64 = 1e-12;

/// X-shaped two-qubit density matrix: diagonal `a, b, c, d`, inner
/// off-diagonal `z` at |01><10|, outer off-diagonal `w` at |00><11|.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XState {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub z: f64,
    pub w: f64,
    pub normalized: bool,
}

impl XState {
    pub fn trace(&self) -> f64 {
        self.a + self.b + self.c + self.d
    }

    /// Divides every entry by the trace and flags the result normalized.
    pub fn normalize(&self) -> Result<XState> {
        let tr = self.trace();
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Ok(XState {
            a: self.a / tr,
            b: self.b / tr,
            c: self.c / tr,
            d: self.d / tr,
            z: self.z / tr,
            w: self.w / tr,
            normalized: true,
        })
    }

    /// Checks nonnegativity of the diagonal, positivity of the two 2x2
    /// blocks, and the unit trace when the state claims to be normalized.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (name, v) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            if !(v >= 0.0) {
                violations.push(StateViolation::NegativeDiagonal {
                    entry: name,
                    value: v,
                });
            }
        }
        let inner_bound = (self.b * self.c).max(0.0).sqrt();
        if self.z.abs() > inner_bound + BLOCK_TOL {
            violations.push(StateViolation::InnerBlock {
                z: self.z,
                bound: inner_bound,
            });
        }
        let outer_bound = (self.a * self.d).max(0.0).sqrt();
        if self.w.abs() > outer_bound + BLOCK_TOL {
            violations.push(StateViolation::OuterBlock {
                w: self.w,
                bound: outer_bound,
            });
        }
        if self.normalized {
            let tr = self.trace();
            if (tr - 1.0).abs() > TRACE_FLAG_TOL {
                violations.push(StateViolation::Trace { trace: tr });
            }
        }
        ValidationReport { violations }
    }

    /// Dense 4x4 form; Hermitian by construction.
    pub fn to_dense(&self) -> HermitianMatrix {
        let mut m = Matrix::zeros(4);
        for (i, v) in [self.a, self.b, self.c, self.d].iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        m[(1, 2)] = Complex64::new(self.z, 0.0);
        m[(2, 1)] = Complex64::new(self.z, 0.0);
        m[(0, 3)] = Complex64::new(self.w, 0.0);
        m[(3, 0)] = Complex64::new(self.w, 0.0);
        HermitianMatrix::new(m).expect("X layout is Hermitian")
    }
}

/// Why a state failed validation, carrying the violated bound.
#[derive(Clone, Debug, PartialEq)]
pub enum StateViolation {
    NegativeDiagonal { entry: &'static str, value: f64 },
    InnerBlock { z: f64, bound: f64 },
    OuterBlock { w: f64, bound: f64 },
    Trace { trace: f64 },
}

impl std::fmt::Display for StateViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StateViolation::NegativeDiagonal { entry, value } => {
                write!(f, "diagonal entry {entry} = {value} is negative")
            }
            StateViolation::InnerBlock { z, bound } => {
                write!(f, "|z| = {} exceeds sqrt(b c) = {bound}", z.abs())
            }
            StateViolation::OuterBlock { w, bound } => {
                write!(f, "|w| = {} exceeds sqrt(a d) = {bound}", w.abs())
            }
            StateViolation::Trace { trace } => {
                write!(f, "state flagged normalized but trace is {trace}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<StateViolation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::Domain(format!(
            "injected energy must be finite and nonnegative, got {epsilon}"
        )));
    }
    if epsilon > MAX_EPSILON {
        return Err(Error::Domain(format!(
            "injected energy {epsilon} exceeds supported maximum {MAX_EPSILON}"
        )));
    }
    Ok(())
}

/// Raw noise-averaged state at injected energy `epsilon`, trace not yet one:
/// `a = e/(1+e)^3`, `b = c = (1/2 + e^2)/(1+e)^4`, `z = (1/2)/(1+e)^4`,
/// `d = e(1+e^2)/(1+e)^5`, `w = 0`.
pub fn rho_unnormalized(epsilon: f64) -> Result<XState> {
    check_epsilon(epsilon)?;
    let e = epsilon;
    let p = 1.0 + e;
    let p3 = p * p * p;
    let p4 = p3 * p;
    let p5 = p4 * p;
    Ok(XState {
        a: e / p3,
        b: (0.5 + e * e) / p4,
        c: (0.5 + e * e) / p4,
        d: e * (1.0 + e * e) / p5,
        z: 0.5 / p4,
        w: 0.0,
        normalized: false,
    })
}

/// Unit-trace version of [`rho_unnormalized`].
pub fn rho_normalized(epsilon: f64) -> Result<XState> {
    rho_unnormalized(epsilon)?.normalize()
}

/// The maximally entangled initial state `(|01> + |10>)(<01| + <10|)/2`.
pub fn bell_initial() -> XState {
    XState {
        a: 0.0,
        b: 0.5,
        c: 0.5,
        d: 0.0,
        z: 0.5,
        w: 0.0,
        normalized: true,
    }
}

/// A sweep coordinate: angular frequency, time, and the injected energy the
/// reservoir has delivered by that time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub omega: f64,
    pub t: f64,
    pub epsilon: f64,
}

impl EvalPoint {
    pub fn new(omega: f64, t: f64, epsilon: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
        }
        if !(epsilon >= 0.0) || !epsilon.is_finite() {
            return Err(Error::Domain(format!(
                "injected energy must be nonnegative, got {epsilon}"
            )));
        }
        Ok(EvalPoint { omega, t, epsilon })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn raw_state_at_zero_energy_is_bell_shaped() {
        let s = rho_unnormalized(0.0).unwrap();
        assert_eq!(s.a, 0.0);
        assert_eq!(s.d, 0.0);
        assert_eq!(s.b, 0.5);
        assert_eq!(s.c, 0.5);
        assert_eq!(s.z, 0.5);
        assert_eq!(s.w, 0.0);
        assert!(!s.normalized);
    }

    #[test]
    fn raw_state_at_unit_energy() {
        let s = rho_unnormalized(1.0).unwrap();
        assert_close(s.a, 1.0 / 8.0, 1e-15);
        assert_close(s.b, 3.0 / 32.0, 1e-15);
        assert_close(s.c, 3.0 / 32.0, 1e-15);
        assert_close(s.z, 1.0 / 32.0, 1e-15);
        assert_close(s.d, 1.0 / 16.0, 1e-15);
        assert_close(s.trace(), 3.0 / 8.0, 1e-15);
    }

    #[test]
    fn raw_state_at_point_two() {
        let s = rho_unnormalized(0.2).unwrap();
        assert_close(s.a, 0.1157407, 1e-7);
        assert_close(s.b, 0.2604167, 1e-7);
        assert_close(s.z, 0.2411265, 1e-7);
        assert_close(s.d, 0.0835906, 1e-7);
    }

    #[test]
    fn normalized_state_at_unit_energy() {
        let s = rho_normalized(1.0).unwrap();
        assert_close(s.a, 1.0 / 3.0, 1e-15);
        assert_close(s.b, 1.0 / 4.0, 1e-15);
        assert_close(s.z, 1.0 / 12.0, 1e-15);
        assert_close(s.d, 1.0 / 6.0, 1e-15);
        assert!(s.normalized);
        assert!(s.validate().passed());
    }

    #[test]
    fn normalized_state_at_point_two() {
        let s = rho_normalized(0.2).unwrap();
        assert_close(s.trace(), 1.0, 1e-14);
        assert_close(s.a, 0.160714, 1e-6);
        assert_close(s.b, 0.361607, 1e-6);
        assert_close(s.z, 0.334821, 1e-6);
        assert_close(s.d, 0.116072, 1e-6);
    }

    #[test]
    fn bell_initial_matches_zero_energy_exactly() {
        let s = rho_normalized(0.0).unwrap();
        assert_eq!(s, bell_initial());
    }

    #[test]
    fn bell_initial_is_pure() {
        let vals = bell_initial().to_dense().eigenvalues().unwrap();
        for (v, want) in vals.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((v - want).abs() < 1e-13);
        }
    }

    #[test]
    fn negative_or_huge_energy_rejected() {
        assert!(matches!(rho_unnormalized(-0.1), Err(Error::Domain(_))));
        assert!(matches!(rho_unnormalized(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(
            rho_unnormalized(f64::INFINITY),
            Err(Error::Domain(_))
        ));
        assert!(matches!(rho_unnormalized(2e6), Err(Error::Domain(_))));
    }

    #[test]
    fn validation_passes_near_death_threshold() {
        assert!(rho_normalized(0.455).unwrap().validate().passed());
    }

    #[test]
    fn validation_flags_oversized_coherence() {
        let s = XState {
            a: 0.0,
            b: 0.5,
            c: 0.5,
            d: 0.0,
            z: 0.9,
            w: 0.0,
            normalized: true,
        };
        let report = s.validate();
        assert!(!report.passed());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, StateViolation::InnerBlock { .. })));
    }

    #[test]
    fn validation_flags_wrong_trace_when_marked_normalized() {
        let s = XState {
            a: 0.0,
            b: 0.45,
            c: 0.45,
            d: 0.0,
            z: 0.45,
            w: 0.0,
            normalized: true,
        };
        let report = s.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, StateViolation::Trace { .. })));
    }

    #[test]
    fn dense_form_places_entries() {
        let s = XState {
            a: 0.25,
            b: 0.25,
            c: 0.25,
            d: 0.25,
            z: 0.0,
            w: 0.0,
            normalized: true,
        };
        let m = s.to_dense();
        for i in 0..4 {
            assert_close(m.entry(i, i).re, 0.25, 0.0);
        }
        let bell = bell_initial().to_dense();
        assert_close(bell.entry(1, 2).re, 0.5, 0.0);
        assert_close(bell.entry(0, 3).re, 0.0, 0.0);
    }

    #[test]
    fn dense_form_above_threshold_has_psd_partial_transpose() {
        let m = rho_normalized(1.0).unwrap().to_dense();
        let pt = m
            .partial_transpose((2, 2), crate::linalg::Party::A)
            .unwrap();
        assert!(pt.eigenvalues().unwrap()[0] >= -1e-12);
    }

    #[test]
    fn unnormalized_trace_matches_symbolic_sum() {
        for &e in &[0.0, 0.1, 0.2, 0.455, 1.0, 3.0, 10.0, 100.0] {
            let s = rho_unnormalized(e).unwrap();
            let p = 1.0 + e;
            let symbolic =
                e / p.powi(3) + (1.0 + 2.0 * e * e) / p.powi(4) + e * (1.0 + e * e) / p.powi(5);
            assert_close(s.trace(), symbolic, 1e-14);
        }
    }

    #[test]
    fn eval_point_invariants() {
        assert!(EvalPoint::new(1.0, 0.0, 0.0).is_ok());
        assert!(EvalPoint::new(0.0, 0.0, 0.0).is_err());
        assert!(EvalPoint::new(1.0, -1.0, 0.0).is_err());
        assert!(EvalPoint::new(1.0, 0.0, -0.5).is_err());
    }
}
