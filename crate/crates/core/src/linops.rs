//! Small dense complex matrices and the handful of spectral routines the rest
//! of the crate needs: Hermitian eigendecomposition (cyclic Jacobi), singular
//! values (one-sided Jacobi) and the trace norm.
//!
//! Matrices here are at most a few hundred rows on a side, so both routines
//! favour accuracy over asymptotic speed.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative asymmetry accepted by the Hermitian routines before they refuse
/// the input. Anything below this is symmetrized away.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN and infinities.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { row: i / cols.max(1), col: i % cols.max(1) });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Outer product `u v†`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn trace(&self) -> C64 {
        self.diag().iter().sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus of `self − self†`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols.min(self.rows) {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// `(m + m†) / 2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} does not match {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    fn require_square(&self, what: &str) -> Result<()> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(())
    }

    fn swap_cols_rotate(&mut self, p: usize, q: usize, c: f64, s: f64, phase: C64) {
        // columns (p, q) <- (p, q) · [[c, s], [-s e^{-iθ}, c e^{-iθ}]]
        let pc = phase.conj();
        for r in 0..self.rows {
            let xp = self[(r, p)];
            let xq = self[(r, q)] * pc;
            self[(r, p)] = xp * c - xq * s;
            self[(r, q)] = xp * s + xq * c;
        }
    }

    fn rotate_rows(&mut self, p: usize, q: usize, c: f64, s: f64, phase: C64) {
        // rows (p, q) <- U† · rows, the adjoint of the column rotation above
        for k in 0..self.cols {
            let xp = self[(p, k)];
            let xq = self[(q, k)] * phase;
            self[(p, k)] = xp * c - xq * s;
            self[(q, k)] = xp * s + xq * c;
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Jacobi rotation parameters `(c, s, e^{iθ})` annihilating the off-diagonal
/// entry `b` of the Hermitian 2x2 block `[[a, b], [b*, d]]`.
fn jacobi_rotation(a: f64, d: f64, b: C64) -> (f64, f64, C64) {
    let mag = b.norm();
    let phase = b / mag;
    let zeta = (d - a) / (2.0 * mag);
    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, c * t, phase)
}

fn checked_hermitian(m: &CMatrix) -> Result<CMatrix> {
    m.require_square("Hermitian eigensolve")?;
    let scale = m.max_abs();
    let asymmetry = m.hermitian_defect();
    let tolerance = HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE);
    if asymmetry > tolerance {
        return Err(Error::Symmetry { asymmetry, tolerance });
    }
    Ok(m.hermitian_part())
}

fn jacobi_diagonalize(mut a: CMatrix, mut vectors: Option<&mut CMatrix>) -> CMatrix {
    let n = a.rows();
    let total = a.frobenius_norm();
    if total == 0.0 {
        return a;
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-15 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[(p, q)];
                if b.norm() <= 1e-300 {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, b);
                a.swap_cols_rotate(p, q, c, s, phase);
                a.rotate_rows(p, q, c, s, phase);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
                if let Some(v) = vectors.as_deref_mut() {
                    v.swap_cols_rotate(p, q, c, s, phase);
                }
            }
        }
    }
    a
}

/// Eigenvalues of a Hermitian matrix in ascending order.
///
/// Inputs within [`HERMITIAN_TOL`] (relative to the largest entry) of being
/// Hermitian are symmetrized first; larger asymmetry is an error.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let a = jacobi_diagonalize(checked_hermitian(m)?, None);
    let mut values: Vec<f64> = a.diag().iter().map(|z| z.re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues of a Hermitian matrix, solving each connected block of its
/// sparsity pattern separately. Same result as [`hermitian_eigenvalues`],
/// much faster for matrices that are block diagonal up to a permutation.
pub fn hermitian_eigenvalues_blocked(m: &CMatrix) -> Result<Vec<f64>> {
    let a = checked_hermitian(m)?;
    let n = a.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if a[(i, j)] != C64::new(0.0, 0.0) {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = root(&mut parent, i);
        blocks[r].push(i);
    }
    let mut values = Vec::with_capacity(n);
    for idx in blocks.into_iter().filter(|b| !b.is_empty()) {
        if let [i] = idx[..] {
            values.push(a[(i, i)].re);
            continue;
        }
        let sub = CMatrix::from_fn(idx.len(), idx.len(), |r, c| a[(idx[r], idx[c])]);
        values.extend(jacobi_diagonalize(sub, None).diag().iter().map(|z| z.re));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues (ascending) and the matching orthonormal eigenvectors as the
/// columns of a unitary matrix.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = m.rows();
    let mut v = CMatrix::identity(n);
    let a = jacobi_diagonalize(checked_hermitian(m)?, Some(&mut v));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Singular values in descending order (one-sided Jacobi).
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    // Work on the orientation with at least as many rows as columns.
    let mut a = if m.rows() >= m.cols() { m.clone() } else { m.adjoint() };
    let n = a.cols();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::new(0.0, 0.0));
                for r in 0..a.rows() {
                    let (x, y) = (a[(r, p)], a[(r, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() <= 1e-300 {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                a.swap_cols_rotate(p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigmas: Vec<f64> =
        (0..n).map(|c| (0..a.rows()).map(|r| a[(r, c)].norm_sqr()).sum::<f64>().sqrt()).collect();
    sigmas.sort_by(|x, y| y.total_cmp(x));
    sigmas
}

/// `Tr √(X†X)`, the sum of the singular values.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    m.require_square("trace norm")?;
    Ok(singular_values(m).iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn blocked_eigenvalues_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 9;
        // two Hermitian blocks and an isolated entry, interleaved
        let groups = [vec![0, 4, 7], vec![1, 2, 5, 8], vec![3], vec![6]];
        let mut m = CMatrix::zeros(n, n);
        for g in &groups {
            for (a, &i) in g.iter().enumerate() {
                for &j in &g[a..] {
                    let z = if i == j {
                        c(rng.gen_range(-1.0..1.0))
                    } else {
                        random_matrix(&mut rng, 1, 1)[(0, 0)]
                    };
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
        }
        let dense = hermitian_eigenvalues(&m).unwrap();
        let blocked = hermitian_eigenvalues_blocked(&m).unwrap();
        for (a, b) in dense.iter().zip(&blocked) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
        assert!(hermitian_eigenvalues_blocked(&CMatrix::zeros(2, 3)).is_err());
    }

    pub(crate) fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
        random_matrix(rng, n, n).hermitian_part()
    }

    /// Roots of the characteristic polynomial of a 2x2 or 3x3 Hermitian matrix
    /// by the closed-form (trigonometric) cubic solution.
    fn char_poly_roots(m: &CMatrix) -> Vec<f64> {
        let mut roots = match m.rows() {
            2 => {
                let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
                let disc = ((a - d) * (a - d) / 4.0 + m[(0, 1)].norm_sqr()).sqrt();
                vec![(a + d) / 2.0 - disc, (a + d) / 2.0 + disc]
            }
            3 => {
                // x^3 - t x^2 + s x - det
                let t = m.trace().re;
                let s = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)] + m[(0, 0)] * m[(2, 2)]
                    - m[(0, 2)] * m[(2, 0)]
                    + m[(1, 1)] * m[(2, 2)]
                    - m[(1, 2)] * m[(2, 1)])
                    .re;
                let det = (m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
                    - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
                    + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]))
                    .re;
                // depressed cubic y^3 + p y + q with x = y + t/3
                let p = s - t * t / 3.0;
                let q = -2.0 * t.powi(3) / 27.0 + t * s / 3.0 - det;
                let r = (-p / 3.0).sqrt();
                let phi = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0).acos() / 3.0;
                (0..3)
                    .map(|k| {
                        2.0 * r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos()
                            + t / 3.0
                    })
                    .collect()
            }
            _ => unreachable!(),
        };
        roots.sort_by(f64::total_cmp);
        roots
    }

    #[test]
    fn identity_and_pauli_x() {
        assert_eq!(hermitian_eigenvalues(&CMatrix::identity(2)).unwrap(), vec![1.0, 1.0]);
        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let ev = hermitian_eigenvalues(&x).unwrap();
        assert_abs_diff_eq!(ev[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigenvalues_match_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3] {
            for _ in 0..20 {
                let m = random_hermitian(&mut rng, n);
                let ev = hermitian_eigenvalues(&m).unwrap();
                for (a, b) in ev.iter().zip(char_poly_roots(&m)) {
                    assert_abs_diff_eq!(*a, b, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn eigenvalue_sum_is_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_hermitian(&mut rng, 5);
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        let tol = 1e-10 * m.max_abs().max(1.0);
        assert_abs_diff_eq!(ev.iter().sum::<f64>(), m.trace().re, epsilon = tol);
    }

    #[test]
    fn eigenvectors_reconstruct_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_hermitian(&mut rng, 7);
        let (vals, v) = hermitian_eigen(&m).unwrap();
        let lam = CMatrix::from_diag(&vals.iter().map(|&x| c(x)).collect::<Vec<_>>());
        let back = v.matmul(&lam).unwrap().matmul(&v.adjoint()).unwrap();
        assert!(back.sub(&m).unwrap().max_abs() < 1e-12);
        let gram = v.adjoint().matmul(&v).unwrap();
        assert!(gram.sub(&CMatrix::identity(7)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(hermitian_eigenvalues(&CMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
        let skew = CMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&skew), Err(Error::Symmetry { .. })));
        assert!(matches!(trace_norm(&CMatrix::zeros(3, 2)), Err(Error::Dimension(_))));
        assert!(matches!(
            CMatrix::from_real(1, 2, &[1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(CMatrix::from_real(2, 2, &[1.0]).is_err());
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let mut m = CMatrix::from_real(2, 2, &[1.0, 0.5, 0.5, 2.0]).unwrap();
        m[(0, 1)] += C64::new(1e-13, 1e-13);
        assert!(hermitian_eigenvalues(&m).is_ok());
    }

    #[test]
    fn singular_value_examples() {
        let s = singular_values(&CMatrix::identity(3));
        assert_eq!(s.len(), 3);
        s.iter().for_each(|&x| assert_abs_diff_eq!(x, 1.0, epsilon = 1e-14));

        let u = [c(0.6), C64::new(0.0, 0.8), c(0.0)];
        let v = [C64::new(0.0, 1.0 / 2f64.sqrt()), c(1.0 / 2f64.sqrt())];
        let s = singular_values(&CMatrix::outer(&u, &v));
        assert_abs_diff_eq!(s[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn frobenius_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (r, cc) in [(4, 6), (6, 4), (5, 5)] {
            let m = random_matrix(&mut rng, r, cc);
            let s = singular_values(&m);
            assert!(s.windows(2).all(|w| w[0] >= w[1]));
            let f2 = m.frobenius_norm().powi(2);
            assert!((s.iter().map(|x| x * x).sum::<f64>() - f2).abs() <= 1e-10 * f2);
        }
    }

    #[test]
    fn trace_norm_examples() {
        assert_abs_diff_eq!(trace_norm(&CMatrix::identity(4)).unwrap(), 4.0, epsilon = 1e-13);
        let d = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -3.0]).unwrap();
        assert_abs_diff_eq!(trace_norm(&d).unwrap(), 4.0, epsilon = 1e-13);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(&mut rng, 6);
        let expected: f64 = hermitian_eigenvalues(&h).unwrap().iter().map(|x| x.abs()).sum();
        assert_abs_diff_eq!(trace_norm(&h).unwrap(), expected, epsilon = 1e-10);
    }

    #[test]
    fn gram_matrix_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = random_matrix(&mut rng, 6, 4);
        let g = a.adjoint().matmul(&a).unwrap();
        assert!(hermitian_eigenvalues(&g).unwrap()[0] >= -1e-10);
    }
}
