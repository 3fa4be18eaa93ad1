//! Shared helpers for integration tests: an independent brute-force discord
//! oracle that works through dense projectors (no Bloch shortcuts), random
//! state generators, and a bisection root locator.

// each test binary uses a different subset of these helpers
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;

use qcorr_core::linalg::{HermitianMatrix, Matrix, Party};

/// Conditional entropy of party B after projecting party A along
/// `(theta, phi)`, computed entirely through dense 2x2 conditional states
/// and their eigenvalues. Used to cross-check the analytic fast path.
pub fn conditional_entropy_dense(rho: &HermitianMatrix, theta: f64, phi: f64) -> f64 {
    let (ct, st) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let plus = [Complex64::new(ct, 0.0), Complex64::from_polar(st, phi)];
    let minus = [Complex64::new(st, 0.0), -Complex64::from_polar(ct, phi)];
    let mut acc = 0.0;
    for v in [plus, minus] {
        let mut sigma = Matrix::zeros(2);
        for ib in 0..2 {
            for jb in 0..2 {
                let mut e = Complex64::new(0.0, 0.0);
                for ia in 0..2 {
                    for ja in 0..2 {
                        e += v[ia].conj() * v[ja] * rho.entry(ia * 2 + ib, ja * 2 + jb);
                    }
                }
                sigma[(ib, jb)] = e;
            }
        }
        let p = sigma.trace().re;
        if p <= 1e-15 {
            continue;
        }
        let cond = HermitianMatrix::new(sigma.scale(1.0 / p).hermitized())
            .expect("conditional state is Hermitian");
        let mut s = 0.0;
        for l in cond.eigenvalues().expect("2x2 eigenvalues") {
            if l > 0.0 {
                s -= l * l.log2();
            }
        }
        acc += p * s.max(0.0);
    }
    acc
}

/// Brute-force discord: exhaustive measurement grid with no refinement,
/// dense conditional states throughout.
pub fn oracle_discord_grid(rho: &HermitianMatrix, n_theta: usize, n_phi: usize) -> f64 {
    let s_a = rho
        .partial_trace((2, 2), Party::B)
        .unwrap()
        .von_neumann_entropy()
        .unwrap();
    let s_ab = rho.von_neumann_entropy().unwrap();
    let mut best = f64::INFINITY;
    for i in 0..n_theta {
        let theta = (i as f64 + 0.5) * std::f64::consts::PI / n_theta as f64;
        for j in 0..n_phi {
            let phi = j as f64 * std::f64::consts::TAU / n_phi as f64;
            let v = conditional_entropy_dense(rho, theta, phi);
            if v < best {
                best = v;
            }
        }
    }
    (s_a - s_ab + best).max(0.0)
}

/// Random density matrix of the given dimension: `G G† / tr` with Gaussian
/// complex entries.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> HermitianMatrix {
    let g = Matrix::from_fn(dim, |_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    let prod = g.mul(&g.adjoint());
    let tr = prod.trace().re;
    HermitianMatrix::new(prod.scale(1.0 / tr).hermitized()).expect("G G† is Hermitian")
}

/// Random single-qubit unitary from two random phases and a rotation.
pub fn random_unitary_2(rng: &mut impl Rng) -> Matrix {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let alpha: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
    let mut u = Matrix::zeros(2);
    u[(0, 0)] = Complex64::from_polar(c, alpha);
    u[(0, 1)] = Complex64::from_polar(s, phi);
    u[(1, 0)] = -Complex64::from_polar(s, -phi);
    u[(1, 1)] = Complex64::from_polar(c, -alpha);
    u
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller from two uniforms
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Locates the boundary between `f > 0` and `f <= 0` by bisection, assuming
/// a single crossing between the brackets.
pub fn bisect_zero_boundary(
    mut f: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> f64 {
    assert!(f(lo) > 0.0, "left bracket must be positive");
    assert!(f(hi) <= 0.0, "right bracket must be nonpositive");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
