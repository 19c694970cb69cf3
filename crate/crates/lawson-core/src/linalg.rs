//! Small dense linear algebra: 2x2 complex matrices, real least squares,
//! complex LU.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Complex double.
pub type C64 = Complex64;

/// Imaginary unit.
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Shorthand constructor.
#[inline]
pub const fn c(re: f64, im: f64) -> C64 {
    C64 { re, im }
}

/// A 2x2 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    /// Matrix from its four entries.
    #[inline]
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    /// Identity.
    pub const IDENTITY: Mat2 = Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));

    /// Zero matrix.
    pub const ZERO: Mat2 = Mat2::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));

    /// Diagonal matrix.
    #[inline]
    pub fn diag(a: C64, d: C64) -> Self {
        Mat2::new(a, C64::new(0.0, 0.0), C64::new(0.0, 0.0), d)
    }

    /// Entry `(i, j)`.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.0[i][j]
    }

    /// Determinant.
    #[inline]
    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    /// Trace.
    #[inline]
    pub fn tr(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse via adjugate; `None` if the determinant vanishes.
    pub fn inv(&self) -> Option<Mat2> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        let s = d.inv();
        let [[a, b], [c, e]] = self.0;
        Some(Mat2::new(e * s, -b * s, -c * s, a * s))
    }

    /// Conjugate transpose.
    #[inline]
    pub fn adjoint(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a.conj(), c.conj(), b.conj(), d.conj())
    }

    /// Entrywise conjugate.
    #[inline]
    pub fn conj(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a.conj(), b.conj(), c.conj(), d.conj())
    }

    /// Scalar multiple.
    #[inline]
    pub fn scale(&self, s: C64) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a * s, b * s, c * s, d * s)
    }

    /// Real scalar multiple.
    #[inline]
    pub fn scale_re(&self, s: f64) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a * s, b * s, c * s, d * s)
    }

    /// Max-modulus entry norm.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// True if every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.is_finite())
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    #[inline]
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl AddAssign for Mat2 {
    #[inline]
    fn add_assign(&mut self, o: Mat2) {
        *self = *self + o;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    #[inline]
    fn sub(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2::new(a[0][0] - b[0][0], a[0][1] - b[0][1], a[1][0] - b[1][0], a[1][1] - b[1][1])
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    #[inline]
    fn neg(self) -> Mat2 {
        self.scale_re(-1.0)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    #[inline]
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

/// Dense row-major real matrix used by the least-squares solvers.
#[derive(Clone, Debug)]
pub struct Dense {
    /// Row count.
    pub rows: usize,
    /// Column count.
    pub cols: usize,
    /// Entries, row major.
    pub data: Vec<f64>,
}

impl Dense {
    /// Zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Entry accessor.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// Mutable entry accessor.
    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Least-squares solution of `a x = b` by Householder QR with unit column
/// scaling. Returns `None` if a column is numerically dependent.
pub fn least_squares(a: &Dense, b: &[f64]) -> Option<Vec<f64>> {
    let (m, n) = (a.rows, a.cols);
    if m < n || b.len() != m {
        return None;
    }
    let mut scale = vec![0.0; n];
    for (j, s) in scale.iter_mut().enumerate() {
        let norm = (0..m).map(|i| a.get(i, j).powi(2)).sum::<f64>().sqrt();
        *s = if norm > 0.0 { 1.0 / norm } else { 1.0 };
    }
    // Column-major working copy keeps the Householder sweeps contiguous.
    let mut q: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j) * scale[j]).collect()).collect();
    let mut rhs = b.to_vec();
    let mut diag = vec![0.0; n];
    for k in 0..n {
        let norm = q[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-14 {
            return None;
        }
        let alpha = if q[k][k] > 0.0 { -norm } else { norm };
        q[k][k] -= alpha;
        let vnorm2 = q[k][k..].iter().map(|v| v * v).sum::<f64>();
        diag[k] = alpha;
        let (head, tail) = q.split_at_mut(k + 1);
        let v = &head[k][k..];
        for col in tail.iter_mut() {
            let dot: f64 = v.iter().zip(&col[k..]).map(|(x, y)| x * y).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, x) in col[k..].iter_mut().zip(v) {
                *c -= f * x;
            }
        }
        let dot: f64 = v.iter().zip(&rhs[k..]).map(|(x, y)| x * y).sum();
        let f = 2.0 * dot / vnorm2;
        for (c, x) in rhs[k..].iter_mut().zip(v) {
            *c -= f * x;
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in k + 1..n {
            s -= q[j][k] * x[j];
        }
        x[k] = s / diag[k];
    }
    for (xi, s) in x.iter_mut().zip(&scale) {
        *xi *= s;
    }
    Some(x)
}

/// Solve the square complex system `a x = b` (row major, `b` with `nrhs`
/// columns) by LU with partial pivoting.
pub fn solve_complex(n: usize, a: &[C64], b: &[C64], nrhs: usize) -> Option<Vec<C64>> {
    let mut a = a.to_vec();
    let mut x = b.to_vec();
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pmax < 1e-300 {
            return None;
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            for j in 0..nrhs {
                x.swap(k * nrhs + j, p * nrhs + j);
            }
        }
        let piv = a[k * n + k].inv();
        for i in k + 1..n {
            let f = a[i * n + k] * piv;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let v = a[k * n + j];
                a[i * n + j] -= f * v;
            }
            for j in 0..nrhs {
                let v = x[k * nrhs + j];
                x[i * nrhs + j] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        let piv = a[k * n + k].inv();
        for j in 0..nrhs {
            let mut s = x[k * nrhs + j];
            for i in k + 1..n {
                s -= a[k * n + i] * x[i * nrhs + j];
            }
            x[k * nrhs + j] = s * piv;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_exact_solution() {
        let mut a = Dense::zeros(5, 3);
        for i in 0..5 {
            for j in 0..3 {
                *a.get_mut(i, j) = ((i * i + 1) as f64 * (j + 2) as f64).sin() * 10f64.powi(j as i32);
            }
        }
        let x0 = [1.0, -2.0, 0.5];
        let b: Vec<f64> = (0..5).map(|i| (0..3).map(|j| a.get(i, j) * x0[j]).sum()).collect();
        let x = least_squares(&a, &b).unwrap();
        for (u, v) in x.iter().zip(&x0) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_lu_solves() {
        let a = [c(2.0, 1.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, -3.0)];
        let b = [c(1.0, 0.0), c(0.0, 2.0)];
        let x = solve_complex(2, &a, &b, 1).unwrap();
        let r0 = a[0] * x[0] + a[1] * x[1] - b[0];
        let r1 = a[2] * x[0] + a[3] * x[1] - b[1];
        assert!(r0.norm() < 1e-14 && r1.norm() < 1e-14);
    }

    #[test]
    fn inverse_of_mat2() {
        let m = Mat2::new(c(1.0, 2.0), c(0.5, 0.0), c(-1.0, 1.0), c(3.0, 0.0));
        let p = m * m.inv().unwrap();
        assert!((p - Mat2::IDENTITY).max_abs() < 1e-14);
    }
}
