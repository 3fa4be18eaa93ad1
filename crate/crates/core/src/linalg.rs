//! Dense Hermitian matrix primitives for small bipartite systems.
//!
//! Everything here is dimension generic, but the routines are tuned for the
//! dense dimensions this crate actually touches (2 through 16). Eigenvalues
//! come from a cyclic Jacobi sweep over complex plane rotations, which is
//! robust at these sizes and needs no external solver.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Allowed deviation from exact Hermitian symmetry.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalues in `[-EIG_CLIP_TOL, 0)` count as numerical noise and clip to zero.
pub const EIG_CLIP_TOL: f64 = 1e-12;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-10;

const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// One side of a bipartite split. Party A owns the most significant index:
/// the joint basis index is `iA * dimB + iB`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

/// Dense square complex matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from real entries given in row-major rows.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        Matrix::from_fn(dim, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conjugate(&self) -> Matrix {
        Matrix::from_fn(self.dim, |i, j| self[(i, j)].conj())
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "matrix product needs equal dims");
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        Matrix::from_fn(self.dim, |i, j| self[(i, j)] + rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim);
        Matrix::from_fn(self.dim, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix::from_fn(self.dim, |i, j| self[(i, j)] * s)
    }

    pub fn kron(&self, rhs: &Matrix) -> Matrix {
        let (da, db) = (self.dim, rhs.dim);
        Matrix::from_fn(da * db, |i, j| {
            self[(i / db, j / db)] * rhs[(i % db, j % db)]
        })
    }

    /// Largest `|m[i][j] - conj(m[j][i])|` over all entries.
    pub fn hermiticity_violation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = self[(i, j)] - self[(j, i)].conj();
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Symmetrized copy `(M + M†)/2`.
    pub fn hermitized(&self) -> Matrix {
        Matrix::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn max_abs_diff(&self, rhs: &Matrix) -> f64 {
        assert_eq!(self.dim, rhs.dim);
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self[(i, j)] - rhs[(i, j)]).norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Square complex matrix known to satisfy `m[i][j] == conj(m[j][i])`
/// within [`HERMITICITY_TOL`]. The check runs once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: Matrix,
}

impl HermitianMatrix {
    /// Validates Hermitian symmetry and wraps the matrix.
    pub fn new(m: Matrix) -> Result<Self> {
        let violation = m.hermiticity_violation();
        if violation > HERMITICITY_TOL {
            return Err(Error::NotHermitian { violation });
        }
        Ok(HermitianMatrix { inner: m })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Matrix::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        HermitianMatrix { inner: m }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    /// Real trace (imaginary parts of the diagonal are zero by the invariant).
    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    /// Eigenvalues sorted ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let (vals, _) = jacobi_eigen(&self.inner, false)?;
        Ok(vals)
    }

    /// Eigenvalues sorted ascending together with the matching unitary
    /// whose columns are the eigenvectors.
    pub fn eigen_decomposition(&self) -> Result<(Vec<f64>, Matrix)> {
        let (vals, vecs) = jacobi_eigen(&self.inner, true)?;
        Ok((vals, vecs.expect("eigenvectors requested")))
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|l| l.abs()).sum())
    }

    /// Von Neumann entropy in bits: `-sum(l * log2(l))` with `0 log 0 = 0`.
    ///
    /// Requires a unit trace (within [`TRACE_TOL`]) and positive
    /// semidefiniteness; eigenvalues in `[-EIG_CLIP_TOL, 0)` clip to zero,
    /// anything below that is rejected.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace: tr });
        }
        let mut s = 0.0;
        for l in self.eigenvalues()? {
            if l < -EIG_CLIP_TOL {
                return Err(Error::NotPositive { eigenvalue: l });
            }
            if l > 0.0 {
                s -= l * l.log2();
            }
        }
        // l slightly above 1 can leave s at -1e-15
        Ok(s.max(0.0))
    }

    /// Transposes the indices of one party of a bipartite system.
    /// Applying it twice restores the input exactly (it only moves entries).
    pub fn partial_transpose(&self, dims: (usize, usize), party: Party) -> Result<Self> {
        let (da, db) = dims;
        if da * db != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: da * db,
            });
        }
        let out = Matrix::from_fn(self.dim(), |i, j| {
            let (ia, ib) = (i / db, i % db);
            let (ja, jb) = (j / db, j % db);
            match party {
                Party::A => self.inner[(ja * db + ib, ia * db + jb)],
                Party::B => self.inner[(ia * db + jb, ja * db + ib)],
            }
        });
        // entry relocation preserves Hermitian symmetry
        Ok(HermitianMatrix { inner: out })
    }

    /// Traces out the given party of a bipartite system, keeping the other.
    pub fn partial_trace(&self, dims: (usize, usize), traced: Party) -> Result<Self> {
        let (da, db) = dims;
        if da * db != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: da * db,
            });
        }
        let out = match traced {
            Party::B => Matrix::from_fn(da, |ia, ja| {
                (0..db)
                    .map(|b| self.inner[(ia * db + b, ja * db + b)])
                    .sum()
            }),
            Party::A => Matrix::from_fn(db, |ib, jb| {
                (0..da)
                    .map(|a| self.inner[(a * db + ib, a * db + jb)])
                    .sum()
            }),
        };
        Ok(HermitianMatrix { inner: out })
    }

    pub fn kron(&self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            inner: self.inner.kron(&rhs.inner),
        }
    }

    /// Reorders the tensor factors of a multipartite system. `dims` lists the
    /// factor dimensions of the current index (most significant first) and
    /// `perm[k]` names the old factor that moves to position `k`.
    pub fn permute_systems(&self, dims: &[usize], perm: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: total,
            });
        }
        let k = dims.len();
        if perm.len() != k {
            return Err(Error::Domain(format!(
                "permutation length {} does not match {} factors",
                perm.len(),
                k
            )));
        }
        let mut seen = vec![false; k];
        for &p in perm {
            if p >= k || seen[p] {
                return Err(Error::Domain(format!(
                    "invalid factor permutation {perm:?}"
                )));
            }
            seen[p] = true;
        }

        let decompose = |mut idx: usize| -> Vec<usize> {
            let mut parts = vec![0usize; k];
            for f in (0..k).rev() {
                parts[f] = idx % dims[f];
                idx /= dims[f];
            }
            parts
        };
        let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
        let compose = |parts: &[usize]| -> usize {
            let mut idx = 0usize;
            for f in 0..k {
                idx = idx * new_dims[f] + parts[perm[f]];
            }
            idx
        };

        let mut out = Matrix::zeros(self.dim());
        for i in 0..self.dim() {
            let pi = decompose(i);
            let ni = compose(&pi);
            for j in 0..self.dim() {
                let pj = decompose(j);
                out[(ni, compose(&pj))] = self.inner[(i, j)];
            }
        }
        Ok(HermitianMatrix { inner: out })
    }

    /// Pivoted Cholesky-style factor `S` with `self = S S†`, tolerating
    /// semidefinite inputs: once the largest remaining pivot falls to
    /// rounding level the remaining columns are zero. Tiny pivots come out
    /// with full relative accuracy, which matters downstream when nearly
    /// vanishing singular values get subtracted.
    pub fn psd_factor(&self) -> Result<Matrix> {
        let n = self.dim();
        let mut active: Vec<usize> = (0..n).collect();
        let mut l = Matrix::zeros(n);
        let mut diag: Vec<f64> = (0..n).map(|i| self.inner[(i, i)].re).collect();
        let scale = diag.iter().fold(1e-300f64, |m, d| m.max(d.abs()));
        let stop = 1e-14 * scale;
        for k in 0..n {
            let (pos, &piv_row) = active[k..]
                .iter()
                .enumerate()
                .max_by(|a, b| diag[*a.1].total_cmp(&diag[*b.1]))
                .expect("active set nonempty");
            active.swap(k, k + pos);
            let d = diag[piv_row];
            if d < -EIG_CLIP_TOL * scale.max(1.0) {
                return Err(Error::NotPositive { eigenvalue: d });
            }
            if d <= stop {
                break;
            }
            let lkk = d.sqrt();
            l[(piv_row, k)] = Complex64::new(lkk, 0.0);
            for &i in &active[(k + 1)..] {
                let mut val = self.inner[(i, piv_row)];
                for m in 0..k {
                    val -= l[(i, m)] * l[(piv_row, m)].conj();
                }
                let lik = val / lkk;
                l[(i, k)] = lik;
                diag[i] -= lik.norm_sqr();
            }
            diag[piv_row] = 0.0;
        }
        Ok(l)
    }

    /// Principal square root of a positive semidefinite matrix.
    /// Eigenvalues inside the clip band count as zero.
    pub fn sqrt(&self) -> Result<Matrix> {
        let (vals, vecs) = self.eigen_decomposition()?;
        let n = self.dim();
        let mut scaled = Matrix::zeros(n);
        for j in 0..n {
            let l = vals[j];
            if l < -EIG_CLIP_TOL {
                return Err(Error::NotPositive { eigenvalue: l });
            }
            let root = l.max(0.0).sqrt();
            for i in 0..n {
                scaled[(i, j)] = vecs[(i, j)] * root;
            }
        }
        Ok(scaled.mul(&vecs.adjoint()))
    }

    /// Pauli expansion of a two-qubit state.
    pub fn bloch_decompose(&self) -> Result<BlochForm> {
        if self.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                got: self.dim(),
            });
        }
        let id2 = Matrix::identity(2);
        let trace_with = |op: &Matrix| -> f64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    acc += self.inner[(i, j)] * op[(j, i)];
                }
            }
            acc.re
        };
        let mut form = BlochForm::zero();
        for i in 0..3 {
            let si = pauli(i);
            form.x[i] = trace_with(&si.kron(&id2));
            form.y[i] = trace_with(&id2.kron(&si));
            for j in 0..3 {
                form.t[i][j] = trace_with(&si.kron(&pauli(j)));
            }
        }
        Ok(form)
    }
}

/// Pauli matrix by axis index (0 = x, 1 = y, 2 = z).
pub fn pauli(axis: usize) -> Matrix {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut m = Matrix::zeros(2);
    match axis {
        0 => {
            m[(0, 1)] = one;
            m[(1, 0)] = one;
        }
        1 => {
            m[(0, 1)] = -i;
            m[(1, 0)] = i;
        }
        2 => {
            m[(0, 0)] = one;
            m[(1, 1)] = -one;
        }
        _ => panic!("pauli axis out of range: {axis}"),
    }
    m
}

/// Local Bloch vectors and correlation tensor of a two-qubit state:
/// `rho = (I + x.sigma (x) I + I (x) y.sigma + sum T_ij sigma_i (x) sigma_j) / 4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochForm {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl BlochForm {
    pub fn zero() -> Self {
        BlochForm {
            x: [0.0; 3],
            y: [0.0; 3],
            t: [[0.0; 3]; 3],
        }
    }

    /// Rebuilds the dense state from the expansion.
    pub fn reconstruct(&self) -> Result<HermitianMatrix> {
        let id2 = Matrix::identity(2);
        let mut acc = Matrix::identity(4);
        for i in 0..3 {
            let si = pauli(i);
            acc = acc.add(&si.kron(&id2).scale(self.x[i]));
            acc = acc.add(&id2.kron(&si).scale(self.y[i]));
            for j in 0..3 {
                acc = acc.add(&si.kron(&pauli(j)).scale(self.t[i][j]));
            }
        }
        HermitianMatrix::new(acc.scale(0.25))
    }
}

/// Eigenvalues of a real symmetric 3x3 matrix, ascending.
pub(crate) fn symmetric_eigenvalues_3(m: [[f64; 3]; 3]) -> Result<Vec<f64>> {
    let dense = Matrix::from_fn(3, |i, j| Complex64::new(m[i][j], 0.0));
    let (vals, _) = jacobi_eigen(&dense, false)?;
    Ok(vals)
}

/// Singular values of a square matrix, descending, through the Hermitian
/// embedding `[[0, A], [A†, 0]]` whose spectrum is the paired `±sigma`.
/// Each singular value carries absolute rounding error, with no squaring.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    let n = a.dim();
    let embedded = Matrix::from_fn(2 * n, |i, j| {
        if i < n && j >= n {
            a[(i, j - n)]
        } else if i >= n && j < n {
            a[(j, i - n)].conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let (vals, _) = jacobi_eigen(&embedded, false)?;
    Ok(vals.into_iter().rev().take(n).map(|s| s.max(0.0)).collect())
}

fn off_diagonal_mass(a: &Matrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix. Each rotation is a
/// plane rotation combined with a phase that makes the target entry real,
/// zeroing it exactly. Converges when the off-diagonal Frobenius mass drops
/// below `JACOBI_OFF_TOL`.
fn jacobi_eigen(m: &Matrix, want_vectors: bool) -> Result<(Vec<f64>, Option<Matrix>)> {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = if want_vectors {
        Some(Matrix::identity(n))
    } else {
        None
    };

    let mut converged = false;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_mass(&a) < JACOBI_OFF_TOL {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let beta = a[(p, q)];
                let mag = beta.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = beta / mag;
                let alpha = a[(p, p)].re;
                let gamma = a[(q, q)].re;
                let tau = (gamma - alpha) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // unitary G: G[p][p]=phase*c, G[p][q]=phase*s, G[q][p]=-s, G[q][q]=c
                let gpp = phase * c;
                let gpq = phase * s;

                // A <- A G
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * gpp - akq * s;
                    a[(k, q)] = akp * gpq + akq * c;
                }
                // A <- G† A
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = gpp.conj() * apk - s * aqk;
                    a[(q, k)] = gpq.conj() * apk + aqk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                if let Some(vm) = v.as_mut() {
                    for k in 0..n {
                        let vkp = vm[(k, p)];
                        let vkq = vm[(k, q)];
                        vm[(k, p)] = vkp * gpp - vkq * s;
                        vm[(k, q)] = vkp * gpq + vkq * c;
                    }
                }
            }
        }
    }
    if !converged && off_diagonal_mass(&a) >= JACOBI_OFF_TOL {
        let off = off_diagonal_mass(&a);
        // accept late convergence only just above the target
        if off > 1e-10 {
            return Err(Error::EigenConvergence { off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let vals: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let vecs = v.map(|vm| Matrix::from_fn(n, |i, j| vm[(i, order[j])]));
    Ok((vals, vecs))
}
