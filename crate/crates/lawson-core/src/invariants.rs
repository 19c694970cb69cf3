//! Closed-form invariants of solved data: area, tau-jet, the curvature
//! invariant `K`, enclosed volume, the diagonal unitarizer, and the period
//! lattice.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{geometry, invalid, Error, Result};
use crate::linalg::{c, Mat2, C64, I};
use crate::loops::{circle, dft, matrix_tau_derivative, ComplexLoop};
use crate::monodromy::{monodromies, TransportResult};
use crate::potential::{omega_forms, punctures, PotentialCoeffs};
use crate::solver::Solution;

/// Area `A = 8 pi (1 - r cos(phi) x_{2,0} + r sin(phi) x_{3,0})`.
pub fn area(coeffs: &PotentialCoeffs) -> f64 {
    let phi = coeffs.params().phi();
    let r = coeffs.r();
    let x = coeffs.x();
    8.0 * PI * (1.0 - r * phi.cos() * x[1].coeff(0) + r * phi.sin() * x[2].coeff(0))
}

/// Second-order expansion at `lambda = e^{i tau}`, `tau = 0`:
/// `r x_1 = a_1 tau + a_2 tau^2/2 + ...`, `r x_2 = b_1 tau + b_2 tau^2/2 + ...`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauJet {
    /// First derivative of `r x_1`.
    pub a1: C64,
    /// Second derivative of `r x_1`.
    pub a2: C64,
    /// First derivative of `r x_2`.
    pub b1: C64,
    /// Second derivative of `r x_2`.
    pub b2: C64,
    /// `r x_3(1)`, which equals `-1` at solutions.
    pub c0: C64,
}

/// Tau-jet of solved coefficients; `tol` bounds `|r x_3(1) + 1|` (checked
/// at `100 tol`).
pub fn tau_expansion(coeffs: &PotentialCoeffs, tol: f64) -> Result<TauJet> {
    let r = coeffs.r();
    let x = coeffs.x();
    let j1 = x[0].tau_jet();
    let j2 = x[1].tau_jet();
    let c0 = r * x[2].tau_jet()[0];
    if (c0 + 1.0).norm() > 100.0 * tol {
        return Err(geometry(format!("r x3(1) = {} differs from -1", c0.re)));
    }
    Ok(TauJet { a1: r * j1[1], a2: r * j1[2], b1: r * j2[1], b2: r * j2[2], c0 })
}

/// `K = 2 (a_1 b_2 - a_2 b_1)`.
pub fn curvature_k(jet: &TauJet) -> C64 {
    2.0 * (jet.a1 * jet.b2 - jet.a2 * jet.b1)
}

/// `(A - 4 pi i (a_1 b_2 - a_2 b_1)) / 3` as `(real part, imaginary residue)`.
pub fn enclosed_volume(a: f64, jet: &TauJet) -> Result<(f64, f64)> {
    let v = (C64::new(a, 0.0) - 4.0 * PI * I * (jet.a1 * jet.b2 - jet.a2 * jet.b1)) / 3.0;
    if v.im.abs() > 1e-6 {
        return Err(geometry(format!("enclosed volume has imaginary part {:e}", v.im)));
    }
    Ok((v.re, v.im))
}

/// Generalized Minkowski relation for lattices of rank at most two:
/// `V = (A - 2 pi i K) / 3`.
pub fn minkowski_volume(a: f64, k: C64) -> Result<(f64, f64)> {
    if k.re.abs() > 1e-6 {
        return Err(geometry(format!("K has real part {:e}", k.re)));
    }
    let v = (C64::new(a, 0.0) - 2.0 * PI * I * k) / 3.0;
    Ok((v.re, v.im))
}

/// Off-diagonal Laurent data of `theta_1` and `theta_2` at one puncture, in
/// a local coordinate (coefficients of `dy`).
#[derive(Clone, Debug, PartialEq)]
pub struct PunctureJetData {
    /// Entries `(1,2)` and `(2,1)` of `theta_1`.
    pub theta1: [ComplexLoop; 2],
    /// Entries `(1,2)` and `(2,1)` of `theta_2`.
    pub theta2: [ComplexLoop; 2],
}

fn primitive(l: &ComplexLoop, tol: f64) -> Result<ComplexLoop> {
    let res = l.coeff(-1);
    if res.norm() > tol {
        return Err(invalid(format!("theta_1 has residue {:e}; no local primitive", res.norm())));
    }
    let lo = l.lo() + 1;
    let coeffs = (l.lo()..=l.hi())
        .map(|m| if m == -1 { C64::new(0.0, 0.0) } else { l.coeff(m) / (m + 1) as f64 })
        .collect();
    ComplexLoop::new(lo, coeffs)
}

fn residue_of_product(a: &ComplexLoop, b: &ComplexLoop) -> C64 {
    (a.lo()..=a.hi()).map(|m| a.coeff(m) * b.coeff(-1 - m)).sum()
}

/// `K = -sum_j Res_{p_j} tr(F_1^j theta_2)` with `F_1^j` the off-diagonal
/// primitive of `theta_1` at each puncture.
pub fn curvature_residue_general(data: &[PunctureJetData]) -> Result<C64> {
    let mut k = C64::new(0.0, 0.0);
    for d in data {
        let scale = d.theta1.iter().map(|l| l.max_abs()).fold(1.0, f64::max);
        let f12 = primitive(&d.theta1[0], 1e-9 * scale)?;
        let f21 = primitive(&d.theta1[1], 1e-9 * scale)?;
        k -= residue_of_product(&f12, &d.theta2[1]) + residue_of_product(&f21, &d.theta2[0]);
    }
    Ok(k)
}

/// Numerical Laurent data of the gauged potential at the four punctures.
///
/// `theta_1 = (1/2k)(a_1 omega_1 E_1 + b_1 omega_2 E_2)` with
/// `E_1 = [[0, -i/y], [-i y, 0]]`, `E_2 = [[0, -i/y], [i y, 0]]`, and
/// likewise `theta_2` with `a_2, b_2`. The forms are pulled back to the
/// `k`-fold cover `y^k = (z - p_1)(z - p_2)/((z - p_3)(z - p_4))` and
/// expanded by sampling a small circle in the local coordinate (`y` at
/// `p_1, p_2`, `1/y` at `p_3, p_4`), so every higher-order term is kept.
pub fn lawson_puncture_jets(jet: &TauJet, k: u32, phi: f64) -> Result<Vec<PunctureJetData>> {
    let p = punctures(phi);
    let kf = k as f64;
    let samples = 64 * k as usize;
    let (lo, hi) = (-6, 10);
    let mut out = Vec::with_capacity(4);
    for j in 0..4 {
        let near_zero = j < 2;
        // Polynomial pair so that the local coordinate v satisfies
        // v^k = num(z)/den(z) with num vanishing at p_j.
        let (n1, n2, d1, d2) = if near_zero { (p[0], p[1], p[2], p[3]) } else { (p[2], p[3], p[0], p[1]) };
        let others = (0..4).filter(|&i| i != j).map(|i| (p[i] - p[j]).norm()).fold(f64::INFINITY, f64::min);
        let pj_other = if j % 2 == 0 { n2 } else { n1 };
        let ymag = 0.02 * others * (p[j] - pj_other).norm() / ((p[j] - d1).norm() * (p[j] - d2).norm());
        let rho = ymag.powf(1.0 / kf);
        let mut vals = [[vec![], vec![]], [vec![], vec![]]];
        for s in circle(samples) {
            let v = rho * s;
            let big_y = v.powi(k as i32);
            // (z - n1)(z - n2) - Y (z - d1)(z - d2) = 0
            let qa = 1.0 - big_y;
            let qb = -(n1 + n2) + big_y * (d1 + d2);
            let qc = n1 * n2 - big_y * d1 * d2;
            let disc = (qb * qb - 4.0 * qa * qc).sqrt();
            let r1 = (-qb + disc) / (2.0 * qa);
            let r2 = (-qb - disc) / (2.0 * qa);
            let z = if (r1 - p[j]).norm() < (r2 - p[j]).norm() { r1 } else { r2 };
            let logd = (z - n1).inv() + (z - n2).inv() - (z - d1).inv() - (z - d2).inv();
            // d(v^k) = k v^{k-1} dv = v^k logd dz
            let dzdv = kf / (v * logd);
            let w = omega_forms(z, phi)?;
            // y = v near p_1, p_2; y = 1/v near p_3, p_4.
            let (yinv, y) = if near_zero { (v.inv(), v) } else { (v, v.inv()) };
            let f = dzdv / (2.0 * kf);
            for (row, (a, b)) in [(jet.a1, jet.b1), (jet.a2, jet.b2)].into_iter().enumerate() {
                let e12 = -I * yinv * (a * w[0] + b * w[1]) * f;
                let e21 = (-I * y * a * w[0] + I * y * b * w[1]) * f;
                vals[row][0].push(e12);
                vals[row][1].push(e21);
            }
        }
        let laurent = |s: &Vec<C64>| -> Result<ComplexLoop> {
            let cf = dft(s);
            let coeffs = (lo..=hi)
                .map(|m: i32| cf[m.rem_euclid(samples as i32) as usize] * rho.powi(-m))
                .collect();
            ComplexLoop::new(lo, coeffs)
        };
        out.push(PunctureJetData {
            theta1: [laurent(&vals[0][0])?, laurent(&vals[0][1])?],
            theta2: [laurent(&vals[1][0])?, laurent(&vals[1][1])?],
        });
    }
    Ok(out)
}

/// The harmonic-gauged cylinder family: connection coefficients `(D_x, D_y)`
/// of `g^{-1} nabla g` at `(y, tau)` for complex `tau`.
pub fn cylinder_gauged_connection(y: f64, tau: C64) -> (Mat2, Mat2) {
    let e = |z: C64| z.exp();
    let s = e(I * tau);
    let em = (-I * tau).exp();
    let ey_m = e(c(0.0, -y) - I * tau);
    let ey_p = e(c(0.0, y) - I * tau);
    let q1 = (s * s - 1.0) / 8.0;
    let q2 = (s - 1.0) * (s - 1.0) / 8.0;
    let ax = Mat2::new(em * q1, I * q2 * ey_m, I * q2 * ey_p, -em * q1);
    let ay = Mat2::new(-I * em * q2, q1 * ey_m, q1 * ey_p, I * em * q2);
    let h = e(I * tau / 2.0);
    let (gm, gp) = (C64::from_polar(1.0, -y / 2.0), C64::from_polar(1.0, y / 2.0));
    let g = Mat2::new(-I * (h - 1.0) * gm, -I * (h + 1.0) * gm, (h + 1.0) * gp, (h - 1.0) * gp);
    let gi = g.inv().expect("gauge is invertible");
    let dg = Mat2::diag(c(0.0, -0.5), c(0.0, 0.5)) * g;
    (gi * ax * g, gi * ay * g + gi * dg)
}

/// `K = -i h / 16` for the cylinder of height `h/2`, cross-checked by
/// quadrature of `(i/2 pi) int tr(D' ^ D'')` over `[0, h] x [0, 2 pi]`, with
/// tau-derivatives from Cauchy's formula. Returns `(closed form, quadrature)`.
pub fn cylinder_curvature(h: f64) -> Result<(C64, C64)> {
    if !(h > 0.0) {
        return Err(invalid("cylinder height must be positive"));
    }
    let exact = C64::new(0.0, -h / 16.0);
    let (ny, nt) = (64usize, 32usize);
    let radius = 0.5;
    let mut integral = C64::new(0.0, 0.0);
    for iy in 0..ny {
        let y = 2.0 * PI * iy as f64 / ny as f64;
        // Cauchy: f^(n)(0) = n!/(M rho^n) sum f(rho w^j) w^{-jn}
        let mut d1 = (Mat2::ZERO, Mat2::ZERO);
        let mut d2 = (Mat2::ZERO, Mat2::ZERO);
        for (j, w) in circle(nt).into_iter().enumerate() {
            let (dx, dy) = cylinder_gauged_connection(y, radius * w);
            let ang = -2.0 * PI * j as f64 / nt as f64;
            let w1 = C64::from_polar(1.0 / (nt as f64 * radius), ang);
            let w2 = C64::from_polar(2.0 / (nt as f64 * radius * radius), 2.0 * ang);
            d1 = (d1.0 + dx.scale(w1), d1.1 + dy.scale(w1));
            d2 = (d2.0 + dx.scale(w2), d2.1 + dy.scale(w2));
        }
        let integrand = (d1.0 * d2.1 - d1.1 * d2.0).tr();
        // The family does not depend on x, so the x-rule is exact.
        integral += integrand * h * (2.0 * PI / ny as f64);
    }
    let quad = I / (2.0 * PI) * integral;
    if (quad - exact).norm() > 1e-10 * h.max(1.0) {
        return Err(geometry(format!("cylinder quadrature {} disagrees with -ih/16", quad.im)));
    }
    Ok((exact, quad))
}

/// `(A_norm, V_norm, s)` with `s = 1/l`.
pub fn normalize_geometry(a: f64, v: f64, shortest: f64) -> Result<(f64, f64, f64)> {
    if !(shortest > 0.0) {
        return Err(invalid("shortest period must be positive"));
    }
    let s = 1.0 / shortest;
    Ok((s * s * a, s * s * s * v, s))
}

/// Diagonal unitarizer `U = diag(u, 1/u)` on circle samples.
#[derive(Clone, Debug)]
pub struct Unitarizer {
    /// Positive real `u` per sample.
    pub u: Vec<f64>,
    /// Largest unitarity defect of `U L_j U^{-1}` over `j` and samples.
    pub unitarity_error: f64,
}

impl Unitarizer {
    /// `U` at sample `i`.
    pub fn matrix(&self, i: usize) -> Mat2 {
        Mat2::diag(C64::new(self.u[i], 0.0), C64::new(1.0 / self.u[i], 0.0))
    }

    /// All samples of `U`.
    pub fn samples(&self) -> Vec<Mat2> {
        (0..self.u.len()).map(|i| self.matrix(i)).collect()
    }

    /// `U M U^{-1}` for every sample.
    pub fn conjugate(&self, m: &[Mat2]) -> Vec<Mat2> {
        m.iter()
            .enumerate()
            .map(|(i, x)| {
                let (u, ui) = (self.u[i], 1.0 / self.u[i]);
                Mat2::new(x.at(0, 0), x.at(0, 1) * u * u, x.at(1, 0) * ui * ui, x.at(1, 1))
            })
            .collect()
    }
}

/// Compute the unitarizer from `P`, `Q`.
///
/// Unitarity of `U L_3 U^{-1} C^{-1}` gives `w^2 conj(Y) = X` with
/// `X = P22^2 - P21^2`, `Y = P11^2 - P12^2`, and `L_1` gives the analogous
/// relation with `X' = Q21^2 + Q22^2`, `Y' = Q11^2 + Q12^2`. Both are
/// combined in least squares because either pair can vanish at isolated
/// samples.
pub fn unitarizer(tr: &TransportResult) -> Result<Unitarizer> {
    let mut u = Vec::with_capacity(tr.p.len());
    for (i, (p, q)) in tr.p.iter().zip(&tr.q).enumerate() {
        let x = p.at(1, 1) * p.at(1, 1) - p.at(1, 0) * p.at(1, 0);
        let y = p.at(0, 0) * p.at(0, 0) - p.at(0, 1) * p.at(0, 1);
        let x2 = q.at(1, 0) * q.at(1, 0) + q.at(1, 1) * q.at(1, 1);
        let y2 = q.at(0, 0) * q.at(0, 0) + q.at(0, 1) * q.at(0, 1);
        let w2 = (x * y + x2 * y2) / (y.norm_sqr() + y2.norm_sqr());
        if !(w2.re > 0.0) || w2.im.abs() > 1e-6 * w2.norm() {
            return Err(Error::Unitarizability {
                reason: format!("w^2 = {} + {}i is not positive real at sample {i}", w2.re, w2.im),
            });
        }
        u.push(w2.re.sqrt().sqrt());
    }
    for i in 0..u.len() {
        let next = u[(i + 1) % u.len()];
        if (next / u[i]).ln().abs() > 0.5 {
            return Err(Error::Unitarizability { reason: format!("unitarizer jumps at sample {i}") });
        }
    }
    let mut un = Unitarizer { u, unitarity_error: 0.0 };
    let mono = monodromies(tr)?;
    let mut err = 0.0f64;
    for l in &mono.l {
        for m in un.conjugate(l) {
            err = err.max((m * m.adjoint() - Mat2::IDENTITY).max_abs());
        }
    }
    un.unitarity_error = err;
    if err > 1e-8 {
        return Err(Error::Unitarizability { reason: format!("conjugated L_j not unitary ({err:e})") });
    }
    Ok(un)
}

/// `S(1) = (U L_3 U^{-1} C^{-1})(lambda = 1)`.
pub fn s_matrix_at_one(tr: &TransportResult, un: &Unitarizer) -> Result<Mat2> {
    let mono = monodromies(tr)?;
    let l3 = un.conjugate(&mono.l[2])[0];
    Ok(l3 * crate::potential::C.inv().expect("C invertible"))
}

/// `su(2) -> R^3`: `[[-i y3, y1 + i y2], [-y1 + i y2, i y3]] -> (y1, y2, y3)`.
/// Returns the vector and the size of the non-`su(2)` part.
pub fn su2_to_r3(a: &Mat2) -> ([f64; 3], f64) {
    let y3 = (I * a.at(0, 0)).re;
    let y1 = ((a.at(0, 1) - a.at(1, 0)) / 2.0).re;
    let y2 = ((a.at(0, 1) + a.at(1, 0)) / (2.0 * I)).re;
    let back = r3_to_su2([y1, y2, y3]);
    (([y1, y2, y3]), (back - *a).max_abs())
}

/// Inverse of [`su2_to_r3`].
pub fn r3_to_su2(v: [f64; 3]) -> Mat2 {
    Mat2::new(c(0.0, -v[2]), c(v[0], v[1]), c(-v[0], v[1]), c(0.0, v[2]))
}

/// `T = -2 (d/dtau M)(0) M(1)^{-1}` from circle samples of a unitary loop.
pub fn sym_derivative(samples: &[Mat2]) -> Result<([f64; 3], f64)> {
    let (val, der) = matrix_tau_derivative(samples);
    let inv = val.inv().ok_or(Error::Singular { lambda: C64::new(1.0, 0.0) })?;
    Ok(su2_to_r3(&(der * inv).scale_re(-2.0)))
}

/// Rank-1 or rank-2 period lattice in the horizontal plane `y1 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodLattice {
    /// Reduced basis (first vector shortest).
    pub basis: Vec<[f64; 3]>,
    /// Length of the shortest vector.
    pub shortest: f64,
    /// All computed translation vectors.
    pub translations: Vec<[f64; 3]>,
    /// Number of times the four-punctured sphere model covers one period
    /// cell (2 for `k = 4`, where the word lattice has index 2, and for
    /// `k = 6`).
    pub cover_index: usize,
}

impl PeriodLattice {
    /// Acute angle between the two basis vectors (rank 2 only); the sign
    /// of a basis vector is arbitrary.
    pub fn angle(&self) -> Option<f64> {
        if self.basis.len() < 2 {
            return None;
        }
        let (a, b) = (self.basis[0], self.basis[1]);
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        Some((dot.abs() / (norm3(&a) * norm3(&b))).min(1.0).acos())
    }

    /// Area of the fundamental cell (rank 2), or the period length (rank 1).
    pub fn covolume(&self) -> f64 {
        match self.basis.len() {
            2 => cross2(h2(&self.basis[0]), h2(&self.basis[1])).abs(),
            _ => self.shortest,
        }
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn h2(v: &[f64; 3]) -> [f64; 2] {
    [v[1], v[2]]
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Lagrange-Gauss reduction of a 2D basis.
pub fn gauss_reduce(mut a: [f64; 2], mut b: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    let n = |v: [f64; 2]| v[0] * v[0] + v[1] * v[1];
    if n(a) > n(b) {
        core::mem::swap(&mut a, &mut b);
    }
    for _ in 0..100 {
        let mu = ((a[0] * b[0] + a[1] * b[1]) / n(a)).round();
        b = [b[0] - mu * a[0], b[1] - mu * a[1]];
        if n(b) >= n(a) {
            break;
        }
        core::mem::swap(&mut a, &mut b);
    }
    (a, b)
}

/// Basis of the lattice generated by `vectors` in the plane.
///
/// Works in exact integer coordinates over a provisional basis: every
/// generator must have rational coordinates with denominator at most 24.
pub fn lattice_from_generators(vectors: &[[f64; 2]], tol: f64) -> Result<Vec<[f64; 2]>> {
    let n = |v: &[f64; 2]| (v[0] * v[0] + v[1] * v[1]).sqrt();
    let scale = vectors.iter().map(n).fold(0.0, f64::max);
    let vs: Vec<[f64; 2]> = vectors.iter().copied().filter(|v| n(v) > tol * scale.max(1.0)).collect();
    let Some(&first) = vs.iter().min_by(|a, b| n(a).total_cmp(&n(b))) else {
        return Ok(vec![]);
    };
    let second = vs
        .iter()
        .filter(|v| cross2(first, **v).abs() > 1e-6 * n(&first) * n(v))
        .min_by(|a, b| n(a).total_cmp(&n(b)))
        .copied();
    let Some(second) = second else {
        // Rank one: Euclid on the signed multiples of `first`.
        let mut g = n(&first);
        for v in &vs {
            let mut a = (v[0] * first[0] + v[1] * first[1]) / n(&first);
            let mut b = g;
            while a.abs() > tol * scale.max(1.0) {
                let r = b - (b / a).round() * a;
                b = a;
                a = r;
            }
            g = b.abs();
        }
        let f = g / n(&first);
        return Ok(vec![[first[0] * f, first[1] * f]]);
    };
    // Integer coordinates of all generators over (first, second)/den.
    let det = cross2(first, second);
    let coords: Vec<[f64; 2]> = vs.iter().map(|v| [cross2(*v, second) / det, cross2(first, *v) / det]).collect();
    let den = (1..=24i64)
        .find(|d| {
            coords.iter().all(|c| c.iter().all(|x| ((x * *d as f64) - (x * *d as f64).round()).abs() < 1e-5))
        })
        .ok_or_else(|| geometry("lattice generators are not commensurable"))?;
    let ints: Vec<[i64; 2]> =
        coords.iter().map(|c| [(c[0] * den as f64).round() as i64, (c[1] * den as f64).round() as i64]).collect();
    // Hermite normal form of the integer rows.
    let mut h = [[0i64; 2]; 2];
    let mut rest: Vec<[i64; 2]> = ints;
    // Combine first-column entries by Euclid on rows.
    loop {
        rest.retain(|r| r[0] != 0 || r[1] != 0);
        let nz: Vec<usize> = (0..rest.len()).filter(|&i| rest[i][0] != 0).collect();
        if nz.len() <= 1 {
            break;
        }
        let piv = *nz.iter().min_by_key(|&&i| rest[i][0].abs()).expect("nonempty");
        let p = rest[piv];
        for &i in &nz {
            if i != piv {
                let q = rest[i][0] / p[0];
                rest[i] = [rest[i][0] - q * p[0], rest[i][1] - q * p[1]];
            }
        }
    }
    let piv = rest.iter().position(|r| r[0] != 0).ok_or_else(|| geometry("degenerate lattice"))?;
    h[0] = rest.remove(piv);
    let g2 = rest.iter().fold(0i64, |g, r| gcd(g, r[1]));
    h[1] = [0, g2];
    if g2 == 0 {
        return Err(geometry("degenerate lattice"));
    }
    let map = |r: [i64; 2]| -> [f64; 2] {
        let (x, y) = (r[0] as f64 / den as f64, r[1] as f64 / den as f64);
        [x * first[0] + y * second[0], x * first[1] + y * second[1]]
    };
    let (b0, b1) = gauss_reduce(map(h[0]), map(h[1]));
    Ok(vec![b0, b1])
}

/// Translational periods of the surface.
///
/// Closed words give the products `M_1 M_3`, `M_2 M_3`, `M_1 M_4` in both
/// orders and their conjugates by powers of each `M_j`, which rotate the
/// translation about the vertical axis. The vertical symmetry planes of the
/// fundamental piece generate a reflection group whose translations can be
/// finer than the word lattice (index 2 for `k = 4`), so both sets are
/// combined.
pub fn period_lattice(tr: &TransportResult, un: &Unitarizer, k: u32) -> Result<PeriodLattice> {
    let translations = word_translations(tr, un, k)?;
    let plane: Vec<[f64; 2]> = translations.iter().map(h2).collect();
    let words = lattice_from_generators(&plane, 1e-8)?;
    if words.is_empty() {
        return Err(geometry("no nonzero periods"));
    }
    let (walls, point_group) = wall_translations(tr, un, 1.0 / (2.0 * k as f64))?;
    let mut all = plane.clone();
    all.extend_from_slice(&walls);
    let basis2 = lattice_from_generators(&all, 1e-8)?;
    let wall_basis = lattice_from_generators(&walls, 1e-8)?;
    let covol = |b: &[[f64; 2]]| if b.len() == 2 { cross2(b[0], b[1]).abs() } else { (b[0][0].powi(2) + b[0][1].powi(2)).sqrt() };
    if basis2.len() != words.len() || wall_basis.len() != basis2.len() || (covol(&wall_basis) / covol(&basis2) - 1.0).abs() > 1e-6 {
        return Err(geometry("monodromy periods are not translations of the symmetry-plane group"));
    }
    // The sphere model consists of 8k copies of the fundamental piece; a
    // period cell holds two per element of the point group.
    if point_group == 0 || !(4 * k as usize).is_multiple_of(point_group) {
        return Err(geometry(format!("symmetry-plane point group of order {point_group} does not divide 4k")));
    }
    let cover_index = 4 * k as usize / point_group;
    let basis: Vec<[f64; 3]> = basis2.iter().map(|b| [0.0, b[0], b[1]]).collect();
    let shortest = norm3(&basis[0]);
    Ok(PeriodLattice { basis, shortest, translations, cover_index })
}

fn word_translations(tr: &TransportResult, un: &Unitarizer, k: u32) -> Result<Vec<[f64; 3]>> {
    let mono = monodromies(tr)?;
    let m: Vec<Vec<Mat2>> = mono.m.iter().map(|mj| un.conjugate(mj)).collect();
    let n = tr.p.len();
    let prod = |a: &[Mat2], b: &[Mat2]| -> Vec<Mat2> { a.iter().zip(b).map(|(x, y)| *x * *y).collect() };
    let mut words: Vec<Vec<Mat2>> = Vec::new();
    for (a, b) in [(0, 2), (1, 2), (0, 3)] {
        words.push(prod(&m[a], &m[b]));
        words.push(prod(&m[b], &m[a]));
    }
    let base = words.clone();
    for mj in &m {
        let mut pow = vec![Mat2::IDENTITY; n];
        for _ in 1..2 * k {
            pow = prod(&pow, mj);
            let powinv: Vec<Mat2> = pow.iter().map(|x| x.inv().expect("unimodular")).collect();
            for w in &base {
                words.push(prod(&prod(&pow, w), &powinv));
            }
        }
    }
    let mut translations = Vec::with_capacity(words.len());
    for w in &words {
        let one = w[0];
        let sign = if (one - Mat2::IDENTITY).max_abs() < (one + Mat2::IDENTITY).max_abs() { 1.0 } else { -1.0 };
        let dev = (one - Mat2::IDENTITY.scale_re(sign)).max_abs();
        if dev > 1e-6 {
            return Err(geometry(format!("word does not close at lambda = 1 (deviation {dev:e})")));
        }
        let (v, skew) = sym_derivative(w)?;
        if skew > 1e-6 * norm3(&v).max(1.0) {
            return Err(Error::Unitarizability { reason: format!("period not in su(2) (defect {skew:e})") });
        }
        translations.push(v);
    }
    let scale = translations.iter().map(norm3).fold(0.0, f64::max);
    for v in &translations {
        if v[0].abs() > 1e-6 * scale.max(1e-300) {
            return Err(geometry(format!("period has vertical component {:e}", v[0])));
        }
    }
    Ok(translations)
}

/// Immersion at `z = 1` and `z = i`, with `z = 0` at the origin.
pub fn corner_points(tr: &TransportResult, un: &Unitarizer) -> Result<([f64; 3], [f64; 3])> {
    use crate::loops::MatrixSamples;
    use crate::surface::{sym_point, unitary_frame, DEFAULT_IWASAWA_ORDER};
    let at = |m: &[Mat2]| -> Result<[f64; 3]> {
        let phi = MatrixSamples(m.iter().enumerate().map(|(i, x)| un.matrix(i) * *x).collect());
        sym_point(&unitary_frame(&phi, DEFAULT_IWASAWA_ORDER)?.0)
    };
    let id = vec![Mat2::IDENTITY; tr.p.len()];
    let f0 = at(&id)?;
    let sub = |v: [f64; 3]| [v[0] - f0[0], v[1] - f0[1], v[2] - f0[2]];
    Ok((sub(at(&tr.p)?), sub(at(&tr.q)?)))
}

/// Translations and point-group order of the group generated by
/// reflections in the vertical planes through `[0, i]` (`y2 = 0`), the arc
/// from `p_1` to `i` (`y3 = const`) and the arc from `p_1` to `1` (normal
/// `(sin 2 pi t, cos 2 pi t)` in the `(y2, y3)` plane).
pub fn wall_translations(tr: &TransportResult, un: &Unitarizer, t: f64) -> Result<(Vec<[f64; 2]>, usize)> {
    let (f1, fi) = corner_points(tr, un)?;
    let tilt = [(2.0 * PI * t).sin(), (2.0 * PI * t).cos()];
    let walls = [([1.0, 0.0], 0.0), ([0.0, 1.0], fi[2]), (tilt, tilt[0] * f1[1] + tilt[1] * f1[2])];
    let size = norm3(&f1).max(norm3(&fi));
    if !(size > 0.0) {
        return Err(geometry("degenerate fundamental piece"));
    }
    Ok(reflection_group_translations(&walls, 8.0 * size))
}

/// Translations within `radius` of the group generated by reflections in
/// the lines `n . y = c`, and the number of distinct linear parts.
fn reflection_group_translations(walls: &[([f64; 2], f64)], radius: f64) -> (Vec<[f64; 2]>, usize) {
    type Motion = ([[f64; 2]; 2], [f64; 2]);
    let refl: Vec<Motion> = walls
        .iter()
        .map(|&(n, c)| {
            let a = [[1.0 - 2.0 * n[0] * n[0], -2.0 * n[0] * n[1]], [-2.0 * n[0] * n[1], 1.0 - 2.0 * n[1] * n[1]]];
            (a, [2.0 * c * n[0], 2.0 * c * n[1]])
        })
        .collect();
    let key = |m: &Motion| -> [i64; 6] {
        let q = |x: f64| (x * 1e6).round() as i64;
        [q(m.0[0][0]), q(m.0[0][1]), q(m.0[1][0]), q(m.0[1][1]), q(m.1[0] / radius), q(m.1[1] / radius)]
    };
    let id: Motion = ([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0]);
    let mut seen = alloc::collections::BTreeSet::from([key(&id)]);
    let mut queue = alloc::collections::VecDeque::from([id]);
    let mut out = Vec::new();
    let mut linear = alloc::collections::BTreeSet::new();
    while let Some((a, b)) = queue.pop_front() {
        linear.insert(key(&(a, [0.0, 0.0])));
        for (ra, rb) in &refl {
            let m = |i: usize, j: usize| a[i][0] * ra[0][j] + a[i][1] * ra[1][j];
            let na = [[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]];
            let nb = [a[0][0] * rb[0] + a[0][1] * rb[1] + b[0], a[1][0] * rb[0] + a[1][1] * rb[1] + b[1]];
            if (nb[0] * nb[0] + nb[1] * nb[1]).sqrt() > radius || !seen.insert(key(&(na, nb))) {
                continue;
            }
            if (na[0][0] - 1.0).abs() < 1e-9 && (na[1][1] - 1.0).abs() < 1e-9 && na[0][1].abs() < 1e-9 {
                out.push(nb);
            }
            queue.push_back((na, nb));
        }
    }
    (out, linear.len())
}

/// All invariants of a solution.
#[derive(Clone, Debug)]
pub struct GeometricInvariants {
    /// Area in `H = 1` units.
    pub area: f64,
    /// Enclosed volume in `H = 1` units.
    pub volume: f64,
    /// Imaginary residue of the volume formula.
    pub volume_imag: f64,
    /// Curvature invariant `K`.
    pub k: C64,
    /// Tau-jet.
    pub jet: TauJet,
    /// Period lattice.
    pub lattice: PeriodLattice,
    /// Unitarizer.
    pub unitarizer: Unitarizer,
    /// Scale `s = 1/l`.
    pub scale: f64,
    /// `s^2 A` per period cell.
    pub area_normalized: f64,
    /// `s^3 V` per period cell.
    pub volume_normalized: f64,
}

/// Evaluate every invariant of a solved configuration.
pub fn compute_invariants(sol: &Solution) -> Result<GeometricInvariants> {
    let a = area(&sol.coeffs);
    let jet = tau_expansion(&sol.coeffs, sol.residual_norm.max(1e-12))?;
    let k = curvature_k(&jet);
    let (volume, volume_imag) = enclosed_volume(a, &jet)?;
    let unitarizer = unitarizer(&sol.transport)?;
    let lattice = period_lattice(&sol.transport, &unitarizer, sol.params.k())?;
    let index = lattice.cover_index as f64;
    let (area_normalized, volume_normalized, scale) =
        normalize_geometry(a / index, volume / index, lattice.shortest)?;
    Ok(GeometricInvariants {
        area: a,
        volume,
        volume_imag,
        k,
        jet,
        lattice,
        unitarizer,
        scale,
        area_normalized,
        volume_normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_reduction_of_skewed_hex_basis() {
        let a = [1.0, 0.0];
        let b = [0.5 + 3.0, 3f64.sqrt() / 2.0];
        let (x, y) = gauss_reduce(a, b);
        let ang = ((x[0] * y[0] + x[1] * y[1]) / ((x[0].hypot(x[1])) * y[0].hypot(y[1]))).acos();
        assert!((ang - PI / 3.0).abs() < 1e-12 || (ang - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lattice_from_rotated_generators() {
        let g: Vec<[f64; 2]> = (0..6).map(|j| { let a = j as f64 * PI / 3.0; [2.0 * a.cos(), 2.0 * a.sin()] }).collect();
        let b = lattice_from_generators(&g, 1e-9).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b[0][0].hypot(b[0][1]) - 2.0).abs() < 1e-12);
        assert!((cross2(b[0], b[1]).abs() - 2.0 * 3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn rank_one_generators() {
        let g = [[2.0, 0.0], [3.0, 0.0], [0.0, 0.0]];
        let b = lattice_from_generators(&g, 1e-9).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b[0][0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn su2_roundtrip() {
        let v = [0.3, -1.2, 2.5];
        let (w, defect) = su2_to_r3(&r3_to_su2(v));
        assert!(defect < 1e-15);
        for i in 0..3 {
            assert!((v[i] - w[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn normalization_scaling() {
        let (a, v, s) = normalize_geometry(4.0, 8.0, 2.0).unwrap();
        assert_eq!((a, v, s), (1.0, 1.0, 0.5));
    }
}
