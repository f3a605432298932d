//! Small dense complex matrices and a Hermitian eigensolver.
//!
//! Everything here operates on matrices of modest dimension (4×4 for the
//! two-qubit entanglement oracles, up to a few hundred for truncated
//! Fock-space density matrices), so a cyclic complex Jacobi iteration is
//! both adequate and fully deterministic.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{c_zero, Scalar, C};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![c_zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from a nested slice of `(re, im)` f64 pairs.
    pub fn from_rows(rows: &[&[(f64, f64)]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| {
            let (re, im) = rows[i][j];
            Complex::new(T::of(re), T::of(im))
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).fold(c_zero(), |acc, i| acc + self[(i, i)])
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest absolute deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> T {
        let mut max = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > max {
                    max = d;
                }
            }
        }
        max
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Checks `U† U = I` within `tol` (max entrywise deviation).
    pub fn unitarity_deviation(&self) -> T {
        let prod = self.adjoint().mul(self);
        prod.sub(&Self::identity(self.cols)).max_abs()
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
    /// rotations. Returns eigenvalues in ascending order together with the
    /// matrix whose columns are the corresponding orthonormal eigenvectors.
    pub fn hermitian_eigen(&self) -> Result<(Vec<T>, CMatrix<T>)> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::Numeric("eigen: matrix not square".into()));
        }
        let herm_tol = T::of(1e-9);
        let scale = self.max_abs().max(T::one());
        if self.hermiticity_deviation() > herm_tol * scale {
            return Err(Error::Numeric("eigen: matrix not Hermitian".into()));
        }

        let mut a = self.clone();
        // Symmetrize exactly so rounding in the input cannot bias the sweep.
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (a[(i, j)] + a[(j, i)].conj()).unscale(T::of(2.0));
                a[(i, j)] = avg;
                a[(j, i)] = avg.conj();
            }
            a[(i, i)] = Complex::new(a[(i, i)].re, T::zero());
        }
        let mut v = Self::identity(n);

        let off = |m: &Self| -> T {
            let mut s = T::zero();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s = s + m[(i, j)].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };

        let tol = T::epsilon() * T::of(16.0) * scale;
        let max_sweeps = 60;
        for _ in 0..max_sweeps {
            if off(&a) <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let beta = a[(p, q)];
                    let babs = beta.norm();
                    if babs <= T::epsilon() * scale {
                        continue;
                    }
                    // Phase of the off-diagonal entry and the classic
                    // real-Jacobi angle on its magnitude.
                    let phase = beta.unscale(babs);
                    let tau = (a[(q, q)].re - a[(p, p)].re) / (T::of(2.0) * babs);
                    let t = if tau >= T::zero() {
                        T::one() / (tau + (T::one() + tau * tau).sqrt())
                    } else {
                        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                    };
                    let cth = T::one() / (T::one() + t * t).sqrt();
                    let sth = t * cth;

                    // J acts on columns (p, q):
                    //   col_p' = c·col_p − s·e^{-iφ}·col_q
                    //   col_q' = s·e^{iφ}·col_p + c·col_q
                    let jpp = Complex::new(cth, T::zero());
                    let jpq = phase * Complex::new(sth, T::zero());
                    let jqp = -phase.conj() * Complex::new(sth, T::zero());
                    let jqq = Complex::new(cth, T::zero());

                    // A <- J† A J
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * jpp + akq * jqp;
                        a[(k, q)] = akp * jpq + akq * jqq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
                        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
                    }
                    a[(p, q)] = c_zero();
                    a[(q, p)] = c_zero();

                    // V <- V J
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * jpp + vkq * jqp;
                        v[(k, q)] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
        if off(&a) > T::epsilon() * T::of(4096.0) * scale {
            return Err(Error::Numeric(
                "eigen: Jacobi iteration did not converge".into(),
            ));
        }

        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
        order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
        let values: Vec<T> = order.iter().map(|&i| diag[i]).collect();
        let vectors = Self::from_fn(n, n, |i, j| v[(i, order[j])]);
        Ok((values, vectors))
    }

    /// Eigenvalues only, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<T>> {
        self.hermitian_eigen().map(|(vals, _)| vals)
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}
