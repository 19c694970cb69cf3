//! The four-puncture DPW potential
//! `eta = r t sum_j x_j(lambda) m_j omega_j(z) dz`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::linalg::{c, Mat2, C64, I};
use crate::loops::{ComplexLoop, RealLoop};

/// Residue signs of `omega_1, omega_2, omega_3` at `p_1..p_4`.
pub const RESIDUE_SIGNS: [[f64; 4]; 3] = [[1.0, -1.0, 1.0, -1.0], [1.0, -1.0, -1.0, 1.0], [1.0, 1.0, -1.0, -1.0]];

/// `m_1 = diag(i, -i)`.
pub const M1: Mat2 = Mat2::new(c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0));
/// `m_2` (real off-diagonal).
pub const M2: Mat2 = Mat2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
/// `m_3` (imaginary off-diagonal).
pub const M3: Mat2 = Mat2::new(c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0));
/// The basis `m_1, m_2, m_3`.
pub const MS: [Mat2; 3] = [M1, M2, M3];
/// `D = diag(i, -i)`, the symmetry matrix for `z -> -z`.
pub const D: Mat2 = M1;
/// `C`, the symmetry matrix for `z -> 1/z`.
pub const C: Mat2 = Mat2::new(c(0.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0));

/// Surface parameters `(k, phi)` with `t = 1/(2k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceParams {
    k: u32,
    phi: f64,
}

impl SurfaceParams {
    /// Validated constructor: `k >= 2`, `0 < phi < pi/2`.
    pub fn new(k: u32, phi: f64) -> Result<Self> {
        if k < 2 {
            return Err(invalid("k must be at least 2"));
        }
        if !(phi > 0.0 && phi < FRAC_PI_2) {
            return Err(invalid("phi must lie in (0, pi/2)"));
        }
        Ok(SurfaceParams { k, phi })
    }

    /// Branching order `k`.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Angle `phi`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `t = 1/(2k)`.
    pub fn t(&self) -> f64 {
        0.5 / self.k as f64
    }

    /// Punctures `e^{i phi}, -e^{-i phi}, -e^{i phi}, e^{-i phi}`.
    pub fn punctures(&self) -> [C64; 4] {
        punctures(self.phi)
    }

    /// Same parameters at a different angle.
    pub fn with_phi(&self, phi: f64) -> Result<Self> {
        SurfaceParams::new(self.k, phi)
    }
}

/// The four punctures for angle `phi`.
pub fn punctures(phi: f64) -> [C64; 4] {
    let e = C64::from_polar(1.0, phi);
    [e, -e.conj(), -e, e.conj()]
}

/// Distance from `z` to the nearest puncture.
pub fn puncture_distance(z: C64, phi: f64) -> f64 {
    punctures(phi).iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min)
}

/// The forms `omega_1, omega_2, omega_3` (coefficients of `dz`) via partial
/// fractions.
pub fn omega_forms(z: C64, phi: f64) -> Result<[C64; 3]> {
    let p = punctures(phi);
    let mut a = [C64::new(0.0, 0.0); 4];
    for (aj, pj) in a.iter_mut().zip(p) {
        let d = z - pj;
        if d.norm() == 0.0 {
            return Err(Error::Pole { z });
        }
        *aj = d.inv();
    }
    let mut out = [C64::new(0.0, 0.0); 3];
    for (o, signs) in out.iter_mut().zip(RESIDUE_SIGNS) {
        *o = a.iter().zip(signs).map(|(v, s)| v * s).sum();
    }
    Ok(out)
}

/// Closed rational forms of the three `omega_j`; a cross-check for
/// [`omega_forms`].
pub fn omega_forms_closed(z: C64, phi: f64) -> [C64; 3] {
    let z2 = z * z;
    let den = z2 * z2 - 2.0 * (2.0 * phi).cos() * z2 + 1.0;
    [
        I * 4.0 * (2.0 * phi).sin() * z / den,
        4.0 * phi.cos() * (z2 - 1.0) / den,
        I * 4.0 * phi.sin() * (z2 + 1.0) / den,
    ]
}

/// `t sum_j a_j m_j w_j` for given scalar weights `a_j = r x_j(lambda)` and
/// form values `w_j`.
#[inline]
pub fn eta_matrix(t: f64, a: &[C64; 3], w: &[C64; 3]) -> Mat2 {
    let e1 = a[0] * w[0] * t;
    let e2 = a[1] * w[1] * t;
    let e3 = a[2] * w[2] * t;
    // m_1 e1 + m_2 e2 + m_3 e3
    Mat2::new(I * e1, e2 + I * e3, e2 - I * e3, -I * e1)
}

/// Potential coefficients: `r > 0` and real loops `x_1, x_2, x_3` on degrees
/// `-1..=n` with fixed residues.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialCoeffs {
    params: SurfaceParams,
    r: f64,
    x: [RealLoop; 3],
}

/// The fixed `lambda^{-1}` coefficients of `x_1, x_2, x_3`.
pub fn fixed_residues(phi: f64) -> [f64; 3] {
    [0.5, -phi.sin() / 2.0, -phi.cos() / 2.0]
}

impl PotentialCoeffs {
    /// Build from the nonnegative-degree coefficients `xs[j][m]`, `m = 0..=n`.
    pub fn from_parts(params: SurfaceParams, r: f64, xs: [&[f64]; 3]) -> Result<Self> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("r must be positive"));
        }
        let n = xs[0].len();
        if n == 0 || xs.iter().any(|v| v.len() != n) {
            return Err(invalid("x_j must share a nonempty degree range"));
        }
        let res = fixed_residues(params.phi());
        let mk = |j: usize| -> Result<RealLoop> {
            let mut v = Vec::with_capacity(n + 1);
            v.push(res[j]);
            v.extend_from_slice(xs[j]);
            RealLoop::new(-1, v)
        };
        Ok(PotentialCoeffs { params, r, x: [mk(0)?, mk(1)?, mk(2)?] })
    }

    /// Build from full loops; residues must equal the fixed values.
    pub fn new(params: SurfaceParams, r: f64, x: [RealLoop; 3]) -> Result<Self> {
        let res = fixed_residues(params.phi());
        for (l, rj) in x.iter().zip(res) {
            if l.lo() != -1 || (l.coeff(-1) - rj).abs() > 1e-15 {
                return Err(invalid("x_j must start at degree -1 with the fixed residue"));
            }
        }
        let n = x[0].hi();
        if x.iter().any(|l| l.hi() != n) {
            return Err(invalid("x_j must share a degree range"));
        }
        PotentialCoeffs::from_parts(params, r, [&x[0].coeffs()[1..], &x[1].coeffs()[1..], &x[2].coeffs()[1..]])
    }

    /// Surface parameters.
    pub fn params(&self) -> &SurfaceParams {
        &self.params
    }

    /// `r`.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// The three loops.
    pub fn x(&self) -> &[RealLoop; 3] {
        &self.x
    }

    /// Truncation order `n`.
    pub fn order(&self) -> usize {
        self.x[0].hi() as usize
    }

    /// `r x_j(lambda)` for each sample.
    pub fn weights(&self, lambdas: &[C64]) -> Vec<[C64; 3]> {
        lambdas
            .iter()
            .map(|&l| {
                [self.r * self.x[0].eval(l), self.r * self.x[1].eval(l), self.r * self.x[2].eval(l)]
            })
            .collect()
    }
}

/// `eta(z, lambda)` (coefficient of `dz`) for each spectral sample.
pub fn build_eta(z: C64, coeffs: &PotentialCoeffs, lambdas: &[C64]) -> Result<Vec<Mat2>> {
    let w = omega_forms(z, coeffs.params.phi())?;
    let t = coeffs.params.t();
    Ok(coeffs.weights(lambdas).iter().map(|a| eta_matrix(t, a, &w)).collect())
}

/// The central value at `t = 0`, embedded on degrees `-1..=n`:
/// `x_1 = (1/lambda - lambda)/2`, `x_2 = -sin(phi)(lambda - 1)^2/(2 lambda)`,
/// `x_3 = -1/cos(phi) - cos(phi)(lambda - 1)^2/(2 lambda)`, `r = cos(phi)`.
pub fn central_value(params: SurfaceParams, n: usize) -> Result<PotentialCoeffs> {
    if n == 0 {
        return Err(invalid("order n must be at least 1"));
    }
    let (s, co) = params.phi().sin_cos();
    let mut x1 = vec![0.0; n + 1];
    let mut x2 = vec![0.0; n + 1];
    let mut x3 = vec![0.0; n + 1];
    x1[1] = -0.5;
    x2[0] = s;
    x2[1] = -s / 2.0;
    x3[0] = -1.0 / co + co;
    x3[1] = -co / 2.0;
    PotentialCoeffs::from_parts(params, co, [&x1, &x2, &x3])
}

/// `K = r^2 (-x_1^2 + x_2^2 + x_3^2)` on degrees `-2..=2n`.
pub fn cal_k(coeffs: &PotentialCoeffs) -> ComplexLoop {
    let [a, b, c3] = coeffs.x().clone().map(|l| l.to_complex());
    let r2 = coeffs.r() * coeffs.r();
    a.mul(&a).scale(C64::new(-r2, 0.0)).add(&b.mul(&b).scale(C64::new(r2, 0.0))).add(&c3.mul(&c3).scale(C64::new(r2, 0.0)))
}

/// Maximal deviations of the three potential symmetries.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymmetryReport {
    /// `z -> -z`: `-eta(-z) = D^{-1} eta(z) D`.
    pub delta: f64,
    /// `z -> 1/z`: `-eta(1/z)/z^2 = C^{-1} eta(z) C`.
    pub tau: f64,
    /// `z -> conj z`: `eta(conj z, lambda) = conj(eta(z, conj lambda))`.
    pub sigma: f64,
}

/// Check the symmetries for arbitrary complex coefficient loops `x_j`.
pub fn verify_symmetries_complex(
    params: &SurfaceParams,
    r: f64,
    x: &[ComplexLoop; 3],
    zs: &[C64],
    lambdas: &[C64],
) -> Result<SymmetryReport> {
    let phi = params.phi();
    let t = params.t();
    let dinv = D.inv().expect("D invertible");
    let cinv = C.inv().expect("C invertible");
    let mut rep = SymmetryReport::default();
    for &z in zs {
        let w = omega_forms(z, phi)?;
        let wm = omega_forms(-z, phi)?;
        let wi = omega_forms(z.inv(), phi)?;
        let wc = omega_forms(z.conj(), phi)?;
        let jac = -(z * z).inv();
        for &l in lambdas {
            let a = [r * x[0].eval(l), r * x[1].eval(l), r * x[2].eval(l)];
            let lc = l.conj();
            let ac = [r * x[0].eval(lc), r * x[1].eval(lc), r * x[2].eval(lc)];
            let eta = eta_matrix(t, &a, &w);
            let d1 = (-eta_matrix(t, &a, &wm)) - dinv * eta * D;
            let d2 = eta_matrix(t, &a, &wi).scale(jac) - cinv * eta * C;
            let d3 = eta_matrix(t, &a, &wc) - eta_matrix(t, &ac, &w).conj();
            rep.delta = rep.delta.max(d1.max_abs());
            rep.tau = rep.tau.max(d2.max_abs());
            rep.sigma = rep.sigma.max(d3.max_abs());
        }
    }
    Ok(rep)
}

/// Check the symmetries of a potential at the given points and samples.
pub fn verify_symmetries(coeffs: &PotentialCoeffs, zs: &[C64], lambdas: &[C64]) -> Result<SymmetryReport> {
    let x = coeffs.x().clone().map(|l| l.to_complex());
    verify_symmetries_complex(coeffs.params(), coeffs.r(), &x, zs, lambdas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_4;

    #[test]
    fn omega_at_origin() {
        let phi = 0.7;
        let w = omega_forms(C64::new(0.0, 0.0), phi).unwrap();
        assert!(w[0].norm() < 1e-15);
        assert!((w[1] + 4.0 * phi.cos()).norm() < 1e-14);
    }

    #[test]
    fn omega_pole_refused() {
        let p = punctures(0.3);
        assert!(matches!(omega_forms(p[2], 0.3), Err(Error::Pole { .. })));
    }

    #[test]
    fn residue_of_omega1_at_p1() {
        let phi = FRAC_PI_4;
        let p1 = punctures(phi)[0];
        let eps = 1e-6;
        let w = omega_forms(p1 + eps, phi).unwrap();
        assert!((w[0] * eps - 1.0).norm() < 1e-5);
    }

    #[test]
    fn residues_sum_to_zero() {
        for signs in RESIDUE_SIGNS {
            assert_eq!(signs.iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn central_value_expansions() {
        let p = SurfaceParams::new(3, 0.9).unwrap();
        let cv = central_value(p, 5).unwrap();
        let one = C64::new(1.0, 0.0);
        assert!((cv.r() * cv.x()[2].eval(one) + 1.0).norm() < 1e-15);
        assert!(cv.x()[0].eval(one).norm() < 1e-15);
        assert!(cv.x()[1].eval(one).norm() < 1e-15);
        let x1 = cv.x()[0].eval(I);
        assert!((x1 + I).norm() < 1e-15);
    }

    #[test]
    fn cal_k_of_central_is_one() {
        let p = SurfaceParams::new(3, 1.1).unwrap();
        let k = cal_k(&central_value(p, 4).unwrap());
        for m in k.lo()..=k.hi() {
            let want = if m == 0 { 1.0 } else { 0.0 };
            assert!((k.coeff(m) - want).norm() < 1e-13, "degree {m}");
        }
    }

    #[test]
    fn residue_only_cal_k_vanishes() {
        let p = SurfaceParams::new(3, 0.6).unwrap();
        let z = [0.0; 2];
        let co = PotentialCoeffs::from_parts(p, 1.0, [&z, &z, &z]).unwrap();
        assert!(cal_k(&co).max_abs() < 1e-15);
        let co2 = PotentialCoeffs::from_parts(p, 2.0, [&[0.3, 0.1], &[0.2, 0.0], &[-1.0, 0.4]]).unwrap();
        let co1 = PotentialCoeffs::from_parts(p, 1.0, [&[0.3, 0.1], &[0.2, 0.0], &[-1.0, 0.4]]).unwrap();
        assert!(cal_k(&co2).sub(&cal_k(&co1).scale(C64::new(4.0, 0.0))).max_abs() < 1e-13);
    }
}
