//! Dense complex linear algebra: the handful of kernels the simulator needs.
//!
//! Matrices are row-major. Products skip zero entries of the left factor,
//! which is where most of the speed comes from for the very sparse
//! operators of a Fock-truncated oscillator.

use crate::scalar::{cone, czero, re, Cx, Real};
use std::ops::{Add, Index, IndexMut, Mul, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![czero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Cx<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    pub fn from_diag(diag: &[Cx<T>]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = *d;
        }
        m
    }

    pub fn from_real_diag(diag: &[T]) -> Self {
        let d: Vec<Cx<T>> = diag.iter().map(|x| re(*x)).collect();
        Self::from_diag(&d)
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Cx<T>], b: &[Cx<T>]) -> Self {
        Self::from_fn(a.len(), b.len(), |i, j| a[i] * b[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Cx<T>] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Cx<T>> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[Cx<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Cx<T>] {
        let c = self.cols;
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn diag(&self) -> Vec<Cx<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| *z * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| *z * s).collect() }
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: Cx<T>, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "axpy shape");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b * s;
        }
    }

    pub fn trace(&self) -> Cx<T> {
        let mut acc = czero();
        for i in 0..self.rows.min(self.cols) {
            acc += self[(i, i)];
        }
        acc
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Largest absolute column sum.
    pub fn norm_one(&self) -> T {
        let mut best = T::zero();
        for j in 0..self.cols {
            let mut s = T::zero();
            for i in 0..self.rows {
                s += self[(i, j)].norm();
            }
            best = best.max(s);
        }
        best
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.rows).map(|i| self.row(i).iter().map(|z| z.norm()).sum::<T>()).fold(T::zero(), T::max)
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// `max |A - A†|`.
    pub fn hermitian_defect(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let mut worst = T::zero();
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.hermitian_defect() <= tol
    }

    /// Replaces `A` by `(A + A†)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        let half = T::lit(0.5);
        for i in 0..n {
            let d = self.data[i * n + i];
            self.data[i * n + i] = re(d.re);
            for j in (i + 1)..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()) * half;
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        matmul_into(self, other, &mut out);
        out
    }

    pub fn mul_vec(&self, v: &[Cx<T>]) -> Vec<Cx<T>> {
        assert_eq!(self.cols, v.len(), "matvec shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = czero();
                for (a, x) in self.row(i).iter().zip(v) {
                    acc += *a * *x;
                }
                acc
            })
            .collect()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| self[(i / r2, j / c2)] * other[(i % r2, j % c2)])
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn expm(&self) -> Self {
        assert!(self.is_square(), "expm needs a square matrix");
        let n = self.rows;
        let norm = self.norm_one();
        let mut squarings = 0u32;
        let mut s = T::one();
        let half = T::lit(0.5);
        while norm * s > half {
            s *= half;
            squarings += 1;
        }
        let b = self.scale_real(s);
        let mut result = Self::identity(n);
        let mut term = Self::identity(n);
        let tol = T::epsilon();
        for k in 1..40 {
            term = term.matmul(&b).scale_real(T::one() / T::from_usize_lossy(k));
            result = &result + &term;
            if term.max_abs() <= tol * result.max_abs() {
                break;
            }
        }
        for _ in 0..squarings {
            result = result.matmul(&result);
        }
        result
    }
}

/// `out = a * b`, skipping zero entries of `a`.
pub fn matmul_into<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>, out: &mut CMatrix<T>) {
    assert_eq!(a.cols, b.rows);
    assert_eq!((out.rows, out.cols), (a.rows, b.cols));
    let zero = czero::<T>();
    out.data.iter_mut().for_each(|z| *z = zero);
    let m = b.cols;
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.data[i * a.cols + k];
            if aik == zero {
                continue;
            }
            let brow = &b.data[k * m..(k + 1) * m];
            let orow = &mut out.data[i * m..(i + 1) * m];
            for (o, x) in orow.iter_mut().zip(brow) {
                *o += aik * *x;
            }
        }
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Cx<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: Self) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape");
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: Self) -> CMatrix<T> {
        self.matmul(rhs)
    }
}

pub fn inner<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
    let mut acc = czero();
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * *y;
    }
    acc
}

pub fn norm<T: Real>(v: &[Cx<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the second matrix.
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    assert!(a.is_square(), "eigen needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    m.symmetrize();
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius().max(T::min_positive_value());
    let tol = T::epsilon() * scale;
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= tol * T::lit(1e-3) {
                    continue;
                }
                let u = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (mag + mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let uc = u.conj();
                // Columns: A ← A J with J = diag(1, ū) · R(c, s).
                for r in 0..n {
                    let arp = m[(r, p)];
                    let arq = m[(r, q)];
                    m[(r, p)] = arp * c - arq * uc * s;
                    m[(r, q)] = arp * s + arq * uc * c;
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp * c - vrq * uc * s;
                    v[(r, q)] = vrp * s + vrq * uc * c;
                }
                // Rows: A ← J† A.
                for r in 0..n {
                    let apr = m[(p, r)];
                    let aqr = m[(q, r)];
                    m[(p, r)] = apr * c - aqr * u * s;
                    m[(q, r)] = apr * s + aqr * u * c;
                }
                m[(p, q)] = czero();
                m[(q, p)] = czero();
                m[(p, p)] = re(m[(p, p)].re);
                m[(q, q)] = re(m[(q, q)].re);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// negative eigenvalues from round-off are clipped to zero.
pub fn psd_sqrt<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let (vals, vecs) = hermitian_eigen(a);
    let n = a.rows;
    let roots: Vec<T> = vals.iter().map(|x| x.max(T::zero()).sqrt()).collect();
    CMatrix::from_fn(n, n, |i, j| {
        let mut acc = czero();
        for k in 0..n {
            acc += vecs[(i, k)] * vecs[(j, k)].conj() * roots[k];
        }
        acc
    })
}

/// Cholesky test of `a + shift·I`: true when the factorization succeeds,
/// i.e. the smallest eigenvalue of `a` is (numerically) above `-shift`.
pub fn is_positive_after_shift<T: Real>(a: &CMatrix<T>, shift: T) -> bool {
    let n = a.rows;
    let mut l = vec![czero::<T>(); n * n];
    for j in 0..n {
        let mut d = a[(j, j)].re + shift;
        for k in 0..j {
            d -= l[j * n + k].norm_sqr();
        }
        if !(d > T::zero()) {
            return false;
        }
        let djj = d.sqrt();
        l[j * n + j] = re(djj);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / djj;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }

    #[test]
    fn expm_of_pauli_rotation() {
        // exp(-iθσx) = cos θ I - i sin θ σx
        let theta = 0.7;
        let a = CMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, -theta), c(0.0, -theta), c(0.0, 0.0)]);
        let e = a.expm();
        assert!((e[(0, 0)] - c(theta.cos(), 0.0)).norm() < 1e-14);
        assert!((e[(0, 1)] - c(0.0, -theta.sin())).norm() < 1e-14);
    }

    #[test]
    fn expm_large_norm_diagonal() {
        let a = CMatrix::from_diag(&[c(0.0, 40.0), c(-3.0, 0.0)]);
        let e = a.expm();
        assert!((e[(0, 0)] - c(40f64.cos(), 40f64.sin())).norm() < 1e-12);
        assert!((e[(1, 1)].re - (-3f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        let a = CMatrix::from_vec(
            3,
            3,
            vec![c(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, -1.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&a);
        assert!((vals[0] - 1.0).abs() < 1e-13);
        assert!((vals[1] - 3.0).abs() < 1e-13);
        assert!((vals[2] - 5.0).abs() < 1e-13);
        let recon = CMatrix::from_fn(3, 3, |i, j| (0..3).fold(c(0.0, 0.0), |acc, k| acc + vecs[(i, k)] * vecs[(j, k)].conj() * vals[k]));
        assert!((&recon - &a).max_abs() < 1e-13);
    }

    #[test]
    fn kron_shapes_and_entries() {
        let a = CMatrix::<f64>::identity(2);
        let b = CMatrix::from_vec(1, 2, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        let k = a.kron(&b);
        assert_eq!((k.rows(), k.cols()), (2, 4));
        assert_eq!(k[(1, 3)], c(2.0, 0.0));
        assert_eq!(k[(0, 3)], c(0.0, 0.0));
    }

    #[test]
    fn cholesky_detects_negative_direction() {
        let a = CMatrix::<f64>::from_real_diag(&[1.0, -1e-3]);
        assert!(!is_positive_after_shift(&a, 1e-6));
        assert!(is_positive_after_shift(&a, 1e-2));
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let v = [c(0.6, 0.0), c(0.0, 0.8)];
        let rho = CMatrix::outer(&v, &v);
        let s = psd_sqrt(&rho);
        assert!((&s.matmul(&s) - &rho).max_abs() < 1e-12);
    }
}
