//! Correlation measures on two-qubit states.
//!
//! Six quantities are computed per state: concurrence, entanglement of
//! formation, negativity, logarithmic negativity, quantum discord, and
//! geometric discord. Entanglement measures exist twice, as an analytic
//! X-state shortcut and as a generic eigenvalue route; the two must agree.
//! Discord is minimized numerically over projective measurements on party A,
//! with the two-candidate X-state value serving as fast path and cross-check.
//! All entropic quantities are in bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    pauli, singular_values, symmetric_eigenvalues_3, BlochForm, HermitianMatrix, Party,
    EIG_CLIP_TOL, TRACE_TOL,
};
use crate::state::XState;

/// The six measure values at one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    pub concurrence: f64,
    pub eof: f64,
    pub negativity: f64,
    pub log_negativity: f64,
    pub discord: f64,
    pub geometric_discord: f64,
}

impl MeasureSet {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.concurrence,
            self.eof,
            self.negativity,
            self.log_negativity,
            self.discord,
            self.geometric_discord,
        ]
    }

    pub const NAMES: [&'static str; 6] = [
        "concurrence",
        "eof",
        "negativity",
        "log_negativity",
        "discord",
        "geometric_discord",
    ];
}

/// Controls the discord minimization: an exhaustive grid over the measurement
/// direction followed by a simplex refinement from the best cell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiscordOptimizerConfig {
    pub theta_grid: usize,
    pub phi_grid: usize,
    pub refine_iters: usize,
    pub tol: f64,
}

impl Default for DiscordOptimizerConfig {
    fn default() -> Self {
        DiscordOptimizerConfig {
            theta_grid: 64,
            phi_grid: 128,
            refine_iters: 200,
            tol: 1e-9,
        }
    }
}

impl DiscordOptimizerConfig {
    fn validate(&self) -> Result<()> {
        if self.theta_grid < 8 || self.phi_grid < 8 {
            return Err(Error::Config(format!(
                "measurement grids must have at least 8 samples, got {}x{}",
                self.theta_grid, self.phi_grid
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "optimizer tolerance must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Binary entropy in bits with the `0 log 0 = 0` convention. Inputs are
/// clamped into [0, 1] to absorb rounding at the endpoints.
pub fn binary_entropy(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let q = 1.0 - p;
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if q > 0.0 {
        h -= q * q.log2();
    }
    h.max(0.0)
}

fn validate_density(rho: &HermitianMatrix, dim: usize) -> Result<()> {
    if rho.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: rho.dim(),
        });
    }
    let tr = rho.trace();
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceNotOne { trace: tr });
    }
    let min = rho.eigenvalues()?[0];
    if min < -EIG_CLIP_TOL {
        return Err(Error::NotPositive { eigenvalue: min });
    }
    Ok(())
}

fn require_valid_xstate(s: &XState) -> Result<()> {
    if !s.normalized {
        return Err(Error::InvalidState(
            "X-state shortcut needs a normalized state".into(),
        ));
    }
    let report = s.validate();
    if !report.passed() {
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::InvalidState(msgs.join("; ")));
    }
    Ok(())
}

fn clamp_unit_interval(v: f64) -> f64 {
    if v < 0.0 && v > -1e-8 {
        return 0.0;
    }
    if v > 1.0 && v < 1.0 + 1e-8 {
        return 1.0;
    }
    v
}

/// Wootters concurrence of a two-qubit density matrix. The four roots
/// `sqrt(eig(rho rho~))` with `rho~ = (sy (x) sy) conj(rho) (sy (x) sy)` are
/// the singular values of `S' Y S` for any factor `rho = S S†`, which keeps
/// them accurate even when nearly degenerate and tiny; the factor comes from
/// the pivoted Cholesky.
pub fn concurrence(rho: &HermitianMatrix) -> Result<f64> {
    validate_density(rho, 4)?;
    let yy = pauli(1).kron(&pauli(1));
    let factor = rho.psd_factor()?;
    let mut transposed = factor.adjoint().conjugate(); // S transpose
    transposed = transposed.mul(&yy).mul(&factor);
    let roots = singular_values(&transposed)?;
    Ok(clamp_unit_interval(roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}

/// Analytic concurrence for X states: `2 max(0, |z| - sqrt(a d), |w| - sqrt(b c))`.
pub fn concurrence_xstate(s: &XState) -> Result<f64> {
    require_valid_xstate(s)?;
    let inner = s.z.abs() - (s.a * s.d).max(0.0).sqrt();
    let outer = s.w.abs() - (s.b * s.c).max(0.0).sqrt();
    Ok(clamp_unit_interval(2.0 * inner.max(outer).max(0.0)))
}

/// Entanglement of formation in bits from a concurrence value:
/// `h((1 + sqrt(1 - c^2)) / 2)`.
pub fn entanglement_of_formation(c: f64) -> Result<f64> {
    if !c.is_finite() || c < -1e-12 || c > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "concurrence must lie in [0, 1], got {c}"
        )));
    }
    let c = c.clamp(0.0, 1.0);
    Ok(binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt())))
}

/// Negativity: absolute sum of the negative eigenvalues of the partial
/// transpose with respect to party A.
pub fn negativity(rho: &HermitianMatrix) -> Result<f64> {
    validate_density(rho, 4)?;
    let pt = rho.partial_transpose((2, 2), Party::A)?;
    Ok(pt
        .eigenvalues()?
        .iter()
        .filter(|l| **l < 0.0)
        .map(|l| -l)
        .sum())
}

/// Analytic negativity for X states, from the partially transposed blocks.
pub fn negativity_xstate(s: &XState) -> Result<f64> {
    require_valid_xstate(s)?;
    // transpose on A swaps the two off-diagonals
    let outer_min = 0.5 * (s.a + s.d) - (0.25 * (s.a - s.d).powi(2) + s.z * s.z).sqrt();
    let inner_min = 0.5 * (s.b + s.c) - (0.25 * (s.b - s.c).powi(2) + s.w * s.w).sqrt();
    Ok((-outer_min).max(0.0) + (-inner_min).max(0.0))
}

/// Logarithmic negativity in bits: `log2` of the trace norm of the partial
/// transpose. Zero exactly when the partial transpose is positive.
pub fn log_negativity(rho: &HermitianMatrix) -> Result<f64> {
    validate_density(rho, 4)?;
    log_negativity_bipartite(rho, (2, 2))
}

/// Logarithmic negativity of a general bipartite split.
pub fn log_negativity_bipartite(rho: &HermitianMatrix, dims: (usize, usize)) -> Result<f64> {
    let tn = rho.partial_transpose(dims, Party::A)?.trace_norm()?;
    Ok(tn.log2().max(0.0))
}

/// Mutual information `S(A) + S(B) - S(AB)` in bits.
pub fn mutual_information(rho: &HermitianMatrix) -> Result<f64> {
    validate_density(rho, 4)?;
    let sa = rho.partial_trace((2, 2), Party::B)?.von_neumann_entropy()?;
    let sb = rho.partial_trace((2, 2), Party::A)?.von_neumann_entropy()?;
    Ok((sa + sb - rho.von_neumann_entropy()?).max(0.0))
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Average entropy of party B after projecting party A along the direction
/// `(theta, phi)`. Conditional qubit entropies come from the Bloch length.
fn conditional_entropy(b: &BlochForm, theta: f64, phi: f64) -> f64 {
    let n = [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ];
    let xn = dot3(b.x, n);
    let tn = [
        b.t[0][0] * n[0] + b.t[1][0] * n[1] + b.t[2][0] * n[2],
        b.t[0][1] * n[0] + b.t[1][1] * n[1] + b.t[2][1] * n[2],
        b.t[0][2] * n[0] + b.t[1][2] * n[1] + b.t[2][2] * n[2],
    ];
    let mut acc = 0.0;
    for sign in [1.0f64, -1.0] {
        let weight = 0.5 * (1.0 + sign * xn);
        if weight <= 1e-15 {
            continue;
        }
        let denom = 1.0 + sign * xn;
        let s = [
            (b.y[0] + sign * tn[0]) / denom,
            (b.y[1] + sign * tn[1]) / denom,
            (b.y[2] + sign * tn[2]) / denom,
        ];
        let r = norm3(s).min(1.0);
        acc += weight * binary_entropy(0.5 * (1.0 + r));
    }
    acc
}

struct SimplexOutcome {
    best_value: f64,
    spread: f64,
    converged: bool,
}

/// Deterministic Nelder-Mead in two variables with standard coefficients.
fn nelder_mead_2d(
    f: impl Fn([f64; 2]) -> f64,
    start: [f64; 2],
    step: [f64; 2],
    max_iters: usize,
    tol: f64,
) -> SimplexOutcome {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const BETA: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut pts = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut vals = [f(pts[0]), f(pts[1]), f(pts[2])];

    let mut spread = f64::INFINITY;
    for _ in 0..max_iters {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        let (lo, mid, hi) = (order[0], order[1], order[2]);
        spread = vals[hi] - vals[lo];
        if spread < tol {
            return SimplexOutcome {
                best_value: vals[lo],
                spread,
                converged: true,
            };
        }
        let centroid = [
            0.5 * (pts[lo][0] + pts[mid][0]),
            0.5 * (pts[lo][1] + pts[mid][1]),
        ];
        let reflect = [
            centroid[0] + ALPHA * (centroid[0] - pts[hi][0]),
            centroid[1] + ALPHA * (centroid[1] - pts[hi][1]),
        ];
        let fr = f(reflect);
        if fr < vals[lo] {
            let expand = [
                centroid[0] + GAMMA * (reflect[0] - centroid[0]),
                centroid[1] + GAMMA * (reflect[1] - centroid[1]),
            ];
            let fe = f(expand);
            if fe < fr {
                pts[hi] = expand;
                vals[hi] = fe;
            } else {
                pts[hi] = reflect;
                vals[hi] = fr;
            }
            continue;
        }
        if fr < vals[mid] {
            pts[hi] = reflect;
            vals[hi] = fr;
            continue;
        }
        let contract = [
            centroid[0] + BETA * (pts[hi][0] - centroid[0]),
            centroid[1] + BETA * (pts[hi][1] - centroid[1]),
        ];
        let fc = f(contract);
        if fc < vals[hi] {
            pts[hi] = contract;
            vals[hi] = fc;
            continue;
        }
        for i in [mid, hi] {
            pts[i] = [
                pts[lo][0] + SIGMA * (pts[i][0] - pts[lo][0]),
                pts[lo][1] + SIGMA * (pts[i][1] - pts[lo][1]),
            ];
            vals[i] = f(pts[i]);
        }
    }
    let best_value = vals[0].min(vals[1]).min(vals[2]);
    SimplexOutcome {
        best_value,
        spread,
        converged: spread < tol,
    }
}

/// Quantum discord in bits, with measurements on party A:
/// `S(A) - S(AB) + min over directions of the conditional entropy of B`.
/// The minimization walks an exhaustive grid and refines the best cell with
/// a simplex; the whole procedure is deterministic for a fixed config.
pub fn quantum_discord(rho: &HermitianMatrix, cfg: &DiscordOptimizerConfig) -> Result<f64> {
    cfg.validate()?;
    validate_density(rho, 4)?;
    let bloch = rho.bloch_decompose()?;
    let s_a = binary_entropy(0.5 * (1.0 + norm3(bloch.x)));
    let s_ab = rho.von_neumann_entropy()?;

    let objective = |p: [f64; 2]| conditional_entropy(&bloch, p[0], p[1]);

    let d_theta = std::f64::consts::PI / cfg.theta_grid as f64;
    let d_phi = std::f64::consts::TAU / cfg.phi_grid as f64;
    let mut best = f64::INFINITY;
    let mut best_point = [0.0f64; 2];
    for i in 0..cfg.theta_grid {
        let theta = (i as f64 + 0.5) * d_theta;
        for j in 0..cfg.phi_grid {
            let phi = j as f64 * d_phi;
            let v = objective([theta, phi]);
            if v < best {
                best = v;
                best_point = [theta, phi];
            }
        }
    }

    let refined = nelder_mead_2d(
        objective,
        best_point,
        [0.5 * d_theta, 0.5 * d_phi],
        cfg.refine_iters,
        cfg.tol,
    );
    let conditional = refined.best_value.min(best);
    let value = s_a - s_ab + conditional;
    let value = if value < 0.0 && value > -1e-8 {
        0.0
    } else {
        value
    };
    if !refined.converged {
        return Err(Error::OptimizerConvergence {
            best: value,
            spread: refined.spread,
        });
    }
    Ok(value)
}

fn xstate_eigenvalues(s: &XState) -> [f64; 4] {
    let outer_mid = 0.5 * (s.a + s.d);
    let outer_rad = (0.25 * (s.a - s.d).powi(2) + s.w * s.w).sqrt();
    let inner_mid = 0.5 * (s.b + s.c);
    let inner_rad = (0.25 * (s.b - s.c).powi(2) + s.z * s.z).sqrt();
    [
        outer_mid - outer_rad,
        outer_mid + outer_rad,
        inner_mid - inner_rad,
        inner_mid + inner_rad,
    ]
}

fn entropy_of_spectrum(vals: &[f64]) -> f64 {
    let mut s = 0.0;
    for &l in vals {
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    s.max(0.0)
}

/// Two-candidate discord for X states: conditional entropies of the z and x
/// axis measurements on party A, plugged into the discord formula. An upper
/// bound for the numeric minimum, and in practice equal to it.
pub fn ara_discord_xstate(s: &XState) -> Result<f64> {
    require_valid_xstate(s)?;
    let s_ab = entropy_of_spectrum(&xstate_eigenvalues(s));
    let s_a = binary_entropy(s.a + s.b);

    // z axis: outcomes project onto the diagonal blocks
    let p0 = s.a + s.b;
    let p1 = s.c + s.d;
    let mut e_z = 0.0;
    if p0 > 0.0 {
        e_z += p0 * binary_entropy(s.a / p0);
    }
    if p1 > 0.0 {
        e_z += p1 * binary_entropy(s.c / p1);
    }

    // x axis: equal weights, conditional Bloch length from the coherences
    let y3 = s.a - s.b + s.c - s.d;
    let r = (4.0 * (s.z + s.w).powi(2) + y3 * y3).sqrt().min(1.0);
    let e_x = binary_entropy(0.5 * (1.0 + r));

    let value = s_a - s_ab + e_z.min(e_x);
    Ok(if value < 0.0 && value > -1e-8 {
        0.0
    } else {
        value
    })
}

/// Geometric discord `(|x|^2 + |T|^2 - kmax) / 4` with `kmax` the largest
/// eigenvalue of `x x' + T T'`. Zero exactly on classical-quantum states.
pub fn geometric_discord(rho: &HermitianMatrix) -> Result<f64> {
    validate_density(rho, 4)?;
    let b = rho.bloch_decompose()?;
    let x2 = dot3(b.x, b.x);
    let mut t2 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            t2 += b.t[i][j] * b.t[i][j];
        }
    }
    let mut k = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = b.x[i] * b.x[j];
            for l in 0..3 {
                acc += b.t[i][l] * b.t[j][l];
            }
            k[i][j] = acc;
        }
    }
    let kmax = *symmetric_eigenvalues_3(k)?
        .last()
        .expect("3x3 spectrum is nonempty");
    Ok((0.25 * (x2 + t2 - kmax)).max(0.0))
}

/// Evaluates all six measures on a normalized X state. Entanglement measures
/// go through the analytic shortcuts; debug builds re-run the generic routes
/// and assert agreement. Discord comes from the numeric minimizer, with the
/// two-candidate value as a guard.
pub fn measure_all(s: &XState, cfg: &DiscordOptimizerConfig) -> Result<MeasureSet> {
    let conc = concurrence_xstate(s)?;
    let neg = negativity_xstate(s)?;
    let eof = entanglement_of_formation(conc)?;
    let log_neg = (1.0 + 2.0 * neg).log2();

    let rho = s.to_dense();
    let discord = quantum_discord(&rho, cfg)?;
    let geo = geometric_discord(&rho)?;

    let ara = ara_discord_xstate(s)?;
    if discord < ara - 1e-6 {
        eprintln!(
            "warning: numeric discord {discord:.9} beats the two-candidate value {ara:.9}; \
             candidate set missed the optimum"
        );
    }

    #[cfg(debug_assertions)]
    {
        let conc_generic = concurrence(&rho)?;
        debug_assert!(
            (conc - conc_generic).abs() <= 1e-9,
            "concurrence fast path {conc} vs generic {conc_generic}"
        );
        let neg_generic = negativity(&rho)?;
        debug_assert!(
            (neg - neg_generic).abs() <= 1e-9,
            "negativity fast path {neg} vs generic {neg_generic}"
        );
        let ln_generic = log_negativity(&rho)?;
        debug_assert!(
            (log_neg - ln_generic).abs() <= 1e-9,
            "log negativity fast path {log_neg} vs generic {ln_generic}"
        );
    }

    Ok(MeasureSet {
        concurrence: conc,
        eof,
        negativity: neg,
        log_negativity: log_neg,
        discord,
        geometric_discord: geo,
    })
}
