//! Truncated Laurent loops on the unit circle.
//!
//! Loops are stored as coefficients over a contiguous degree range. Sample
//! form lives at the `N`-th roots of unity with the convention
//! `sample_j = sum_m c_m exp(2 pi i j m / N)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{Mat2, C64, I};

/// The `N` sample points `exp(2 pi i j / N)`.
pub fn circle(n: usize) -> Vec<C64> {
    (0..n).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).collect()
}

fn fft_in_place(buf: &mut [C64], sign: f64) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    if !n.is_power_of_two() {
        let src = buf.to_vec();
        for (m, out) in buf.iter_mut().enumerate() {
            *out = src
                .iter()
                .enumerate()
                .map(|(j, v)| v * C64::from_polar(1.0, sign * 2.0 * PI * ((j * m) % n) as f64 / n as f64))
                .sum();
        }
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let twiddles: Vec<C64> =
            (0..half).map(|k| C64::from_polar(1.0, sign * 2.0 * PI * k as f64 / len as f64)).collect();
        for chunk in buf.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for k in 0..half {
                let t = hi[k] * twiddles[k];
                hi[k] = lo[k] - t;
                lo[k] += t;
            }
        }
        len *= 2;
    }
}

/// Discrete Fourier coefficients `c_m` (index `m mod N`) of circle samples.
pub fn dft(samples: &[C64]) -> Vec<C64> {
    let mut buf = samples.to_vec();
    fft_in_place(&mut buf, -1.0);
    let s = 1.0 / samples.len() as f64;
    buf.iter_mut().for_each(|v| *v *= s);
    buf
}

/// Inverse of [`dft`]: samples from coefficients indexed `m mod N`.
pub fn idft(coeffs: &[C64]) -> Vec<C64> {
    let mut buf = coeffs.to_vec();
    fft_in_place(&mut buf, 1.0);
    buf
}

/// Signed frequency of DFT slot `idx`; the Nyquist slot maps to `None`.
fn signed_freq(idx: usize, n: usize) -> Option<i64> {
    if 2 * idx == n {
        None
    } else if 2 * idx < n {
        Some(idx as i64)
    } else {
        Some(idx as i64 - n as i64)
    }
}

/// Value, first and second derivative at `tau = 0` of `g(tau) = h(e^{i tau})`
/// for a loop `h` given by circle samples (exact Fourier differentiation).
pub fn sample_tau_jet(samples: &[C64]) -> [C64; 3] {
    let n = samples.len();
    let c = dft(samples);
    let mut out = [C64::new(0.0, 0.0); 3];
    for (idx, v) in c.iter().enumerate() {
        out[0] += v;
        if let Some(m) = signed_freq(idx, n) {
            let m = m as f64;
            out[1] += I * m * v;
            out[2] -= m * m * v;
        }
    }
    out
}

/// Entrywise [`sample_tau_jet`] for matrix samples: value and first
/// derivative at `tau = 0`.
pub fn matrix_tau_derivative(samples: &[Mat2]) -> (Mat2, Mat2) {
    let mut val = Mat2::ZERO;
    let mut der = Mat2::ZERO;
    for i in 0..2 {
        for j in 0..2 {
            let s: Vec<C64> = samples.iter().map(|m| m.0[i][j]).collect();
            let jet = sample_tau_jet(&s);
            val.0[i][j] = jet[0];
            der.0[i][j] = jet[1];
        }
    }
    (val, der)
}

/// Truncated Laurent loop with complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexLoop {
    lo: i32,
    coeffs: Vec<C64>,
}

/// Truncated Laurent loop with real coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct RealLoop {
    lo: i32,
    coeffs: Vec<f64>,
}

macro_rules! loop_common {
    ($ty:ident, $scalar:ty) => {
        impl $ty {
            /// Loop with coefficients `coeffs` starting at degree `lo`.
            pub fn new(lo: i32, coeffs: Vec<$scalar>) -> Result<Self> {
                if coeffs.is_empty() {
                    return Err(invalid("empty coefficient list"));
                }
                if !coeffs.iter().all(|c| c.is_finite()) {
                    return Err(invalid("non-finite loop coefficient"));
                }
                Ok($ty { lo, coeffs })
            }

            /// Zero loop on degrees `lo..=hi`.
            pub fn zeros(lo: i32, hi: i32) -> Self {
                let len = (hi - lo + 1).max(1) as usize;
                $ty { lo, coeffs: vec![<$scalar>::default(); len] }
            }

            /// Lowest stored degree.
            pub fn lo(&self) -> i32 {
                self.lo
            }

            /// Highest stored degree.
            pub fn hi(&self) -> i32 {
                self.lo + self.coeffs.len() as i32 - 1
            }

            /// Coefficients from `lo()` upwards.
            pub fn coeffs(&self) -> &[$scalar] {
                &self.coeffs
            }

            /// Coefficient of `lambda^m` (zero outside the stored range).
            pub fn coeff(&self, m: i32) -> $scalar {
                if m < self.lo || m > self.hi() {
                    <$scalar>::default()
                } else {
                    self.coeffs[(m - self.lo) as usize]
                }
            }

            /// Largest absolute degree carried.
            pub fn max_degree(&self) -> usize {
                self.lo.unsigned_abs().max(self.hi().unsigned_abs()) as usize
            }

            /// Value at an arbitrary nonzero `lambda`.
            pub fn eval(&self, lambda: C64) -> C64 {
                // Horner in lambda, then shift by lambda^lo.
                let mut acc = C64::new(0.0, 0.0);
                for c in self.coeffs.iter().rev() {
                    acc = acc * lambda + *c;
                }
                acc * lambda.powi(self.lo)
            }

            /// Circle samples at the `n`-th roots of unity.
            pub fn samples(&self, n: usize) -> Result<Vec<C64>> {
                let needed = 2 * self.max_degree() + 1;
                if n < needed {
                    return Err(Error::Aliasing { needed, got: n });
                }
                let mut buf = vec![C64::new(0.0, 0.0); n];
                for (i, c) in self.coeffs.iter().enumerate() {
                    let m = self.lo + i as i32;
                    buf[m.rem_euclid(n as i32) as usize] += *c;
                }
                Ok(idft(&buf))
            }

            /// `sum |c_m| rho^|m|`.
            pub fn wiener_norm(&self, rho: f64) -> f64 {
                self.coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.abs() * rho.powi((self.lo + i as i32).abs()))
                    .sum()
            }

            /// `(g(0), g'(0), g''(0))` for `g(tau) = loop(e^{i tau})`.
            pub fn tau_jet(&self) -> [C64; 3] {
                let mut out = [C64::new(0.0, 0.0); 3];
                for (i, c) in self.coeffs.iter().enumerate() {
                    let m = (self.lo + i as i32) as f64;
                    let c = C64::from(*c);
                    out[0] += c;
                    out[1] += I * m * c;
                    out[2] -= m * m * c;
                }
                out
            }
        }
    };
}

trait Abs {
    fn abs(&self) -> f64;
}
impl Abs for C64 {
    fn abs(&self) -> f64 {
        self.norm()
    }
}

loop_common!(ComplexLoop, C64);
loop_common!(RealLoop, f64);

impl RealLoop {
    /// Complexification.
    pub fn to_complex(&self) -> ComplexLoop {
        ComplexLoop { lo: self.lo, coeffs: self.coeffs.iter().map(|&c| C64::new(c, 0.0)).collect() }
    }

    /// `u*(lambda) = conj(u(1/conj lambda))`: reverses the degree range.
    pub fn star(&self) -> RealLoop {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        RealLoop { lo: -self.hi(), coeffs }
    }

    /// Scalar multiple.
    pub fn scale(&self, s: f64) -> RealLoop {
        RealLoop { lo: self.lo, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }
}

impl ComplexLoop {
    /// Constant loop.
    pub fn constant(c: C64) -> Self {
        ComplexLoop { lo: 0, coeffs: vec![c] }
    }

    /// `u*_m = conj(u_{-m})`.
    pub fn star(&self) -> ComplexLoop {
        let mut coeffs: Vec<C64> = self.coeffs.iter().map(|c| c.conj()).collect();
        coeffs.reverse();
        ComplexLoop { lo: -self.hi(), coeffs }
    }

    /// Scalar multiple.
    pub fn scale(&self, s: C64) -> ComplexLoop {
        ComplexLoop { lo: self.lo, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// Sum over the union of the degree ranges.
    pub fn add(&self, o: &ComplexLoop) -> ComplexLoop {
        let lo = self.lo.min(o.lo);
        let hi = self.hi().max(o.hi());
        let coeffs = (lo..=hi).map(|m| self.coeff(m) + o.coeff(m)).collect();
        ComplexLoop { lo, coeffs }
    }

    /// Difference over the union of the degree ranges.
    pub fn sub(&self, o: &ComplexLoop) -> ComplexLoop {
        self.add(&o.scale(C64::new(-1.0, 0.0)))
    }

    /// Full product (degree range widens).
    pub fn mul(&self, o: &ComplexLoop) -> ComplexLoop {
        let mut coeffs = vec![C64::new(0.0, 0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        ComplexLoop { lo: self.lo + o.lo, coeffs }
    }

    /// Restrict to degrees `lo..=hi`; returns the loop and the dropped
    /// coefficient mass `sum |c_m|` outside the range.
    pub fn truncate(&self, lo: i32, hi: i32) -> (ComplexLoop, f64) {
        let mass = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| {
                let m = self.lo + *i as i32;
                m < lo || m > hi
            })
            .map(|(_, c)| c.norm())
            .sum();
        let coeffs = (lo..=hi).map(|m| self.coeff(m)).collect();
        (ComplexLoop { lo, coeffs }, mass)
    }

    /// Product truncated to `lo..=hi` with the dropped mass.
    pub fn mul_truncated(&self, o: &ComplexLoop, lo: i32, hi: i32) -> (ComplexLoop, f64) {
        self.mul(o).truncate(lo, hi)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

/// Fit a loop on degrees `lo..=hi` to circle samples.
///
/// Fails with the max residual if the samples carry content outside the
/// range beyond `1e-13` relative to their size.
pub fn fit_coefficients(samples: &[C64], lo: i32, hi: i32) -> Result<ComplexLoop> {
    let n = samples.len();
    let width = (hi - lo + 1) as usize;
    if hi < lo || n < width {
        return Err(Error::Aliasing { needed: width, got: n });
    }
    let c = dft(samples);
    let coeffs: Vec<C64> = (lo..=hi).map(|m| c[m.rem_euclid(n as i32) as usize]).collect();
    let fit = ComplexLoop { lo, coeffs };
    let back = fit.samples_unchecked(n);
    let scale = samples.iter().fold(1.0f64, |m, s| m.max(s.norm()));
    let residual = back.iter().zip(samples).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
    if residual > 1e-13 * scale {
        return Err(Error::InconsistentSamples { residual });
    }
    Ok(fit)
}

/// Fit a real-coefficient loop; imaginary parts must vanish to `1e-13`.
pub fn fit_real(samples: &[C64], lo: i32, hi: i32) -> Result<RealLoop> {
    let fit = fit_coefficients(samples, lo, hi)?;
    let imag = fit.coeffs.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if imag > 1e-13 * fit.max_abs().max(1.0) {
        return Err(Error::InconsistentSamples { residual: imag });
    }
    RealLoop::new(lo, fit.coeffs.iter().map(|c| c.re).collect())
}

impl ComplexLoop {
    fn samples_unchecked(&self, n: usize) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); n];
        for (i, c) in self.coeffs.iter().enumerate() {
            buf[(self.lo + i as i32).rem_euclid(n as i32) as usize] += *c;
        }
        idft(&buf)
    }
}

/// 2x2 matrix of loops.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLoop {
    /// Entries, row major.
    pub entries: [[ComplexLoop; 2]; 2],
}

impl MatrixLoop {
    /// Constant identity loop.
    pub fn identity() -> Self {
        let one = ComplexLoop::constant(C64::new(1.0, 0.0));
        let zero = ComplexLoop::constant(C64::new(0.0, 0.0));
        MatrixLoop { entries: [[one.clone(), zero.clone()], [zero, one]] }
    }

    /// Entrywise sum.
    pub fn add(&self, o: &MatrixLoop) -> MatrixLoop {
        let e = |i: usize, j: usize| self.entries[i][j].add(&o.entries[i][j]);
        MatrixLoop { entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    /// Matrix product of loops.
    pub fn mul(&self, o: &MatrixLoop) -> MatrixLoop {
        let e = |i: usize, j: usize| {
            self.entries[i][0].mul(&o.entries[0][j]).add(&self.entries[i][1].mul(&o.entries[1][j]))
        };
        MatrixLoop { entries: [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]] }
    }

    /// Determinant loop.
    pub fn det(&self) -> ComplexLoop {
        let [[a, b], [c, d]] = &self.entries;
        a.mul(d).sub(&b.mul(c))
    }

    /// Trace loop.
    pub fn tr(&self) -> ComplexLoop {
        self.entries[0][0].add(&self.entries[1][1])
    }

    /// `A*(lambda) = conj(A(1/conj lambda))^T`.
    pub fn adjoint_star(&self) -> MatrixLoop {
        let [[a, b], [c, d]] = &self.entries;
        MatrixLoop { entries: [[a.star(), c.star()], [b.star(), d.star()]] }
    }

    /// Largest absolute degree over the entries.
    pub fn max_degree(&self) -> usize {
        self.entries.iter().flatten().map(|e| e.max_degree()).max().unwrap_or(0)
    }

    /// Circle samples.
    pub fn samples(&self, n: usize) -> Result<MatrixSamples> {
        let mut out = vec![Mat2::ZERO; n];
        for i in 0..2 {
            for j in 0..2 {
                for (o, s) in out.iter_mut().zip(self.entries[i][j].samples(n)?) {
                    o.0[i][j] = s;
                }
            }
        }
        Ok(MatrixSamples(out))
    }

    /// Fit each entry on degrees `lo..=hi`.
    pub fn fit(samples: &MatrixSamples, lo: i32, hi: i32) -> Result<MatrixLoop> {
        let e = |i: usize, j: usize| -> Result<ComplexLoop> {
            let s: Vec<C64> = samples.0.iter().map(|m| m.0[i][j]).collect();
            fit_coefficients(&s, lo, hi)
        };
        Ok(MatrixLoop { entries: [[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]] })
    }
}

/// A matrix loop in sample form at the `N`-th roots of unity.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSamples(pub Vec<Mat2>);

impl MatrixSamples {
    /// Sample count.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// True if there are no samples.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pointwise product.
    pub fn mul(&self, o: &MatrixSamples) -> MatrixSamples {
        MatrixSamples(self.0.iter().zip(&o.0).map(|(a, b)| *a * *b).collect())
    }

    /// Pointwise sum.
    pub fn add(&self, o: &MatrixSamples) -> MatrixSamples {
        MatrixSamples(self.0.iter().zip(&o.0).map(|(a, b)| *a + *b).collect())
    }

    /// Pointwise inverse; reports the first singular sample.
    pub fn inv(&self) -> Result<MatrixSamples> {
        let lam = circle(self.len());
        self.0
            .iter()
            .zip(lam)
            .map(|(m, l)| {
                let d = m.det();
                if d.norm() < 1e-300 {
                    return Err(Error::Singular { lambda: l });
                }
                m.inv().ok_or(Error::Singular { lambda: l })
            })
            .collect::<Result<Vec<_>>>()
            .map(MatrixSamples)
    }

    /// Pointwise determinant.
    pub fn det(&self) -> Vec<C64> {
        self.0.iter().map(Mat2::det).collect()
    }

    /// Pointwise trace.
    pub fn tr(&self) -> Vec<C64> {
        self.0.iter().map(Mat2::tr).collect()
    }

    /// On the circle the star involution is the pointwise conjugate transpose.
    pub fn adjoint_star(&self) -> MatrixSamples {
        MatrixSamples(self.0.iter().map(Mat2::adjoint).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn constant_and_monomial_samples() {
        let one = ComplexLoop::constant(c(1.0, 0.0));
        assert!(one.samples(8).unwrap().iter().all(|s| (s - c(1.0, 0.0)).norm() < 1e-15));
        let lam = ComplexLoop::new(1, vec![c(1.0, 0.0)]).unwrap();
        let s = lam.samples(4).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (a, b) in s.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn aliasing_is_refused() {
        let l = RealLoop::zeros(-1, 20);
        assert!(matches!(l.samples(32), Err(Error::Aliasing { needed: 41, got: 32 })));
    }

    #[test]
    fn fit_monomial() {
        let s: Vec<C64> = circle(8).iter().map(|l| l * l).collect();
        let f = fit_coefficients(&s, -1, 3).unwrap();
        for m in -1..=3 {
            let want = if m == 2 { 1.0 } else { 0.0 };
            assert!((f.coeff(m) - c(want, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn fit_rejects_out_of_range_content() {
        let s: Vec<C64> = circle(16).iter().map(|l| l.powi(5)).collect();
        assert!(matches!(fit_coefficients(&s, -1, 3), Err(Error::InconsistentSamples { .. })));
    }

    #[test]
    fn star_of_monomial() {
        let lam = ComplexLoop::new(1, vec![c(1.0, 0.0)]).unwrap();
        let s = lam.star();
        assert_eq!(s.lo(), -1);
        assert_eq!(s.coeff(-1), c(1.0, 0.0));
    }

    #[test]
    fn wiener_norm_values() {
        let l = RealLoop::new(-1, vec![0.5]).unwrap();
        assert!((l.wiener_norm(2.0) - 1.0).abs() < 1e-15);
        assert_eq!(RealLoop::zeros(-1, 4).wiener_norm(3.0), 0.0);
    }

    #[test]
    fn tau_jet_of_lambda() {
        let lam = RealLoop::new(1, vec![1.0]).unwrap();
        let j = lam.tau_jet();
        assert!((j[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((j[1] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((j[2] - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sample_jet_matches_coefficient_jet() {
        let l = ComplexLoop::new(-2, vec![c(0.3, 0.1), c(-1.0, 0.0), c(0.5, 0.5), c(0.0, 2.0)]).unwrap();
        let a = l.tau_jet();
        let b = sample_tau_jet(&l.samples(16).unwrap());
        for i in 0..3 {
            assert!((a[i] - b[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn non_power_of_two_transform_roundtrips() {
        let l = ComplexLoop::new(-3, vec![c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0), c(2.0, 0.0)]).unwrap();
        let s = l.samples(12).unwrap();
        let f = fit_coefficients(&s, -3, 0).unwrap();
        assert!(f.sub(&l).max_abs() < 1e-13);
    }

    #[test]
    fn truncation_reports_mass() {
        let a = ComplexLoop::new(0, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let (t, mass) = a.mul_truncated(&a, 0, 1);
        assert_eq!(t.coeff(1), c(2.0, 0.0));
        assert!((mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_inverse() {
        let id = MatrixLoop::identity().samples(8).unwrap();
        let inv = id.inv().unwrap();
        assert!(inv.0.iter().all(|m| (*m - Mat2::IDENTITY).max_abs() < 1e-15));
    }
}
