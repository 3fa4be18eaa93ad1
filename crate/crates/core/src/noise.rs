//! Reservoir autocorrelation models and the injected energy they produce.
//!
//! The energy delivered to an oscillator of frequency `omega` by time `t` is
//! the double time integral of `exp(i omega (t1 - t2)) C(t1 - t2)` over the
//! square `[0, t]^2`. For a stationary Hermitian kernel this reduces to
//!
//! ```text
//! eps(t) = integral_0^t  2 (t - u) Re[exp(i omega u) C(u)] du
//! ```
//!
//! which is what the quadrature evaluates. Two kernels are supported: a white
//! (delta correlated) kernel handled symbolically, and an exponentially
//! correlated kernel `C(u) = (gamma lambda / 2) exp(-lambda |u|)` whose
//! `lambda -> inf` limit recovers the white case.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::EvalPoint;

/// Noise autocorrelation model. `gamma` is the noise power (an energy rate);
/// `lambda` the inverse correlation time of the exponential kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum NoiseKernel {
    White { gamma: f64 },
    Exponential { gamma: f64, lambda: f64 },
}

impl NoiseKernel {
    pub fn white(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(NoiseKernel::White { gamma })
    }

    pub fn exponential(gamma: f64, lambda: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(NoiseKernel::Exponential { gamma, lambda })
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            NoiseKernel::White { gamma } => gamma,
            NoiseKernel::Exponential { gamma, .. } => gamma,
        }
    }

    /// Pointwise autocorrelation `C(delta)`. The white kernel is a delta
    /// distribution and has no pointwise value, so asking for one is an error;
    /// white-noise energies use the closed form instead.
    pub fn autocorrelation(&self, delta: f64) -> Result<f64> {
        if !delta.is_finite() {
            return Err(Error::Domain(format!("delta must be finite, got {delta}")));
        }
        match *self {
            NoiseKernel::White { .. } => Err(Error::Unsupported(
                "white kernel is delta correlated and has no pointwise value".into(),
            )),
            NoiseKernel::Exponential { gamma, lambda } => {
                Ok(0.5 * gamma * lambda * (-lambda * delta.abs()).exp())
            }
        }
    }
}

/// Panel count for the composite 3-point Gauss-Legendre rule. The rule itself
/// is fixed at three points per panel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub panels: usize,
}

impl QuadratureConfig {
    pub fn new(panels: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::Domain("quadrature needs at least one panel".into()));
        }
        Ok(QuadratureConfig { panels })
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { panels: 64 }
    }
}

// 3-point Gauss-Legendre nodes and weights on [-1, 1]
const GAUSS3_NODE: f64 = 0.774596669241483_f64; // sqrt(3/5)
const GAUSS3_W_OUTER: f64 = 5.0 / 9.0;
const GAUSS3_W_CENTER: f64 = 8.0 / 9.0;

/// Composite 3-point Gauss-Legendre integration of `f` over `[a, b]` split
/// into `panels` uniform subintervals. Exact for polynomials up to degree 5.
pub fn gauss3_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels >= 1, "panels must be at least 1");
    assert!(a <= b, "integration bounds must be ordered");
    let h = (b - a) / panels as f64;
    let half = 0.5 * h;
    let mut acc = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        acc += half
            * (GAUSS3_W_OUTER * f(mid - half * GAUSS3_NODE)
                + GAUSS3_W_CENTER * f(mid)
                + GAUSS3_W_OUTER * f(mid + half * GAUSS3_NODE));
    }
    acc
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    Ok(())
}

/// Injected energy at time `t` by quadrature. The white kernel bypasses the
/// integral and returns `gamma * t` exactly.
pub fn epsilon_at(
    kernel: &NoiseKernel,
    omega: f64,
    t: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    check_time(t)?;
    match *kernel {
        NoiseKernel::White { gamma } => Ok(gamma * t),
        NoiseKernel::Exponential { gamma, lambda } => {
            let integrand =
                |u: f64| (t - u) * gamma * lambda * (-lambda * u).exp() * (omega * u).cos();
            let val = gauss3_integrate(integrand, 0.0, t, quad.panels);
            // the integral is nonnegative; absorb quadrature noise at eps ~ 0
            if val < 0.0 && val > -1e-9 {
                Ok(0.0)
            } else {
                Ok(val)
            }
        }
    }
}

/// Analytic injected energy, the oracle for the quadrature path. For the
/// exponential kernel, with `s = i omega - lambda`,
///
/// ```text
/// eps(t) = gamma lambda Re[(exp(s t) - 1) / s^2 - t / s]
/// ```
pub fn epsilon_closed_form(kernel: &NoiseKernel, omega: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    match *kernel {
        NoiseKernel::White { gamma } => Ok(gamma * t),
        NoiseKernel::Exponential { gamma, lambda } => {
            let s = Complex64::new(-lambda, omega);
            let est = (s * t).exp();
            let val = gamma * lambda * (((est - 1.0) / (s * s)) - t / s).re;
            if val < 0.0 && val > -1e-12 {
                Ok(0.0)
            } else {
                Ok(val)
            }
        }
    }
}

/// Evaluates the energy over a strictly increasing time grid. Each point is
/// computed independently, so the output does not depend on evaluation order.
pub fn epsilon_series(
    kernel: &NoiseKernel,
    omega: f64,
    t_grid: &[f64],
    quad: &QuadratureConfig,
) -> Result<Vec<EvalPoint>> {
    if t_grid.is_empty() {
        return Err(Error::Domain("time grid is empty".into()));
    }
    if !(t_grid[0] >= 0.0) {
        return Err(Error::Domain(format!(
            "time grid must start at a nonnegative time, got {}",
            t_grid[0]
        )));
    }
    if t_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Domain(
            "time grid must be strictly increasing".into(),
        ));
    }
    t_grid
        .iter()
        .map(|&t| {
            let eps = epsilon_at(kernel, omega, t, quad)?;
            #[cfg(debug_assertions)]
            {
                let oracle = epsilon_closed_form(kernel, omega, t)?;
                debug_assert!(
                    (eps - oracle).abs() <= 1e-6 * oracle.abs().max(1e-6),
                    "quadrature {eps} drifted from closed form {oracle} at t={t}"
                );
            }
            EvalPoint::new(omega, t, eps)
        })
        .collect()
}
