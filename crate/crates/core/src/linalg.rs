//! Small dense complex linear algebra: Hermitian solves and dominant
//! eigenvectors for the receive and transmit weight computations.
//!
//! Matrices here are at most a few dozen rows, so everything is a plain
//! row-major `Vec<Complex64>` without blocking or pivoting.

use num_complex::Complex64;

use crate::error::{numeric, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// `scale * I_n`.
    pub fn scaled_identity(n: usize, scale: f64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(scale, 0.0);
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Self { rows, cols, data }
    }

    /// Builds a matrix whose `j`th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "ragged columns");
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Adds `scale * v vᴴ` in place, keeping the matrix exactly Hermitian.
    pub fn add_outer(&mut self, scale: f64, v: &[Complex64]) {
        debug_assert_eq!(v.len(), self.rows);
        debug_assert_eq!(self.rows, self.cols);
        let n = self.rows;
        for i in 0..n {
            let vi = v[i] * scale;
            self.data[i * n + i].re += scale * v[i].norm_sqr();
            for (j, vj) in v.iter().enumerate().skip(i + 1) {
                let z = vi * vj.conj();
                self.data[i * n + j] += z;
                self.data[j * n + i] += z.conj();
            }
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.cols);
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Aᴴ A`.
    pub fn gram(&self) -> CMat {
        let (r, c) = (self.rows, self.cols);
        let mut g = CMat::zeros(c, c);
        for a in 0..c {
            for b in a..c {
                let s: Complex64 = (0..r).map(|i| self[(i, a)].conj() * self[(i, b)]).sum();
                g[(a, b)] = s;
                g[(b, a)] = s.conj();
            }
        }
        g
    }

    /// Largest absolute deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `aᴴ b`.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

/// Relative pivot floor below which a Cholesky factorization is rejected.
const PIVOT_FLOOR: f64 = 1e-14;

/// Lower-triangular Cholesky factor of a Hermitian positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<Complex64>,
}

impl Cholesky {
    pub fn factor(a: &CMat) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(numeric("cholesky of a non-square matrix"));
        }
        let scale = (0..n).map(|i| a[(i, i)].re.abs()).fold(0.0, f64::max);
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if !(d > PIVOT_FLOOR * scale) || !d.is_finite() {
                return Err(numeric(format!(
                    "matrix not positive definite (pivot {d:e} at column {j})"
                )));
            }
            let djj = d.sqrt();
            l[j * n + j] = Complex64::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self { n, l })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        let l = &self.l;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i].re;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= l[k * n + i].conj() * y[k];
            }
            y[i] = s / l[i * n + i].re;
        }
        y
    }
}

/// Solves `A x = b` for Hermitian positive definite `A`.
pub fn hermitian_solve(a: &CMat, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if b.len() != a.rows() {
        return Err(numeric("right-hand side length does not match matrix"));
    }
    Ok(Cholesky::factor(a)?.solve(b))
}

const EIG_TOL: f64 = 1e-12;
const EIG_MAX_ITER: usize = 10_000;
/// Number of repeated squarings applied before the power iteration.
const EIG_SQUARINGS: usize = 4;

/// Dominant eigenvector of a Hermitian positive semidefinite matrix by power
/// iteration.
///
/// The iteration runs on `A^(2^s)` (built by repeated normalized squaring) so
/// small eigengaps still converge quickly; convergence is judged on the
/// Rayleigh quotient of the original matrix. The start vector is the
/// largest-norm column of `A`, which is deterministic and never orthogonal
/// to the dominant eigenspace unless `A` is zero. The result is unit norm
/// with its first significant component real and nonnegative.
pub fn dominant_eigenvector(a: &CMat) -> Result<(Vec<Complex64>, f64)> {
    let n = a.rows();
    if n == 0 || a.cols() != n {
        return Err(numeric("eigenvector of an empty or non-square matrix"));
    }
    if a.as_slice().iter().any(|z| !z.is_finite()) {
        return Err(numeric("non-finite matrix entry"));
    }
    let best_col = (0..n)
        .max_by(|&x, &y| {
            let nx: f64 = (0..n).map(|i| a[(i, x)].norm_sqr()).sum();
            let ny: f64 = (0..n).map(|i| a[(i, y)].norm_sqr()).sum();
            nx.total_cmp(&ny)
        })
        .unwrap_or(0);
    let mut v: Vec<Complex64> = (0..n).map(|i| a[(i, best_col)]).collect();
    if norm_sqr(&v) == 0.0 {
        // Zero matrix: every unit vector is an eigenvector.
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[0] = Complex64::new(1.0, 0.0);
        return Ok((e, 0.0));
    }
    normalize(&mut v);

    let mut b = a.clone();
    for _ in 0..EIG_SQUARINGS {
        b = square_normalized(&b);
    }

    let mut quotient = rayleigh(a, &v);
    for _ in 0..EIG_MAX_ITER {
        let mut next = b.mul_vec(&v);
        if norm_sqr(&next) == 0.0 {
            break;
        }
        normalize(&mut next);
        let q = rayleigh(a, &next);
        v = next;
        let converged = (q - quotient).abs() <= EIG_TOL * q.abs();
        quotient = q;
        if converged {
            fix_phase(&mut v);
            return Ok((v, quotient));
        }
    }
    Err(numeric("power iteration did not converge"))
}

fn square_normalized(b: &CMat) -> CMat {
    let n = b.rows();
    let mut out = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (0..n).map(|k| b[(i, k)] * b[(k, j)]).sum();
        }
    }
    let trace: f64 = (0..n).map(|i| out[(i, i)].re).sum();
    if trace > 0.0 {
        for z in out.data.iter_mut() {
            *z /= trace;
        }
    }
    out
}

fn rayleigh(a: &CMat, v: &[Complex64]) -> f64 {
    dot(v, &a.mul_vec(v)).re / norm_sqr(v)
}

fn normalize(v: &mut [Complex64]) {
    let n = norm_sqr(v).sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// Rotates `v` so its first component with magnitude above 1e-9 is real
/// and nonnegative.
pub fn fix_phase(v: &mut [Complex64]) {
    if let Some(p) = v.iter().find(|z| z.norm() > 1e-9).copied() {
        let rot = p.conj() / p.norm();
        for z in v.iter_mut() {
            *z *= rot;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cholesky_solves_small_system() {
        // A = [[4, 1+i], [1-i, 3]], x = [1, i]
        let a = CMat::from_rows(
            2,
            2,
            vec![c(4.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)],
        );
        let x = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let b = a.mul_vec(&x);
        let got = hermitian_solve(&a, &b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).norm() < 1e-14);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = CMat::from_rows(
            2,
            2,
            vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)],
        );
        assert!(matches!(
            Cholesky::factor(&a),
            Err(crate::Error::Numeric(_))
        ));
    }

    #[test]
    fn eigenvector_of_diagonal() {
        let a = CMat::from_rows(
            2,
            2,
            vec![c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        );
        let (v, q) = dominant_eigenvector(&a).unwrap();
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(v[1].norm() < 1e-12);
        assert!((q - 4.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvector_of_zero_matrix_is_unit() {
        let (v, q) = dominant_eigenvector(&CMat::zeros(3, 3)).unwrap();
        assert_eq!(q, 0.0);
        assert!((norm_sqr(&v) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn phase_convention() {
        let mut v = vec![c(0.0, 0.0), c(0.0, -2.0), c(1.0, 1.0)];
        fix_phase(&mut v);
        assert!(v[1].im.abs() < 1e-15 && v[1].re > 0.0);
    }
}
