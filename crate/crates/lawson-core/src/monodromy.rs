//! Runge-Kutta transport of `d Phi = Phi eta` and the algebraic monodromy
//! data assembled from `P = Phi(1)` and `Q = Phi(i)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::exec::Executor;
use crate::linalg::{Mat2, C64, I};
use crate::loops::circle;
use crate::potential::{eta_matrix, omega_forms, puncture_distance, PotentialCoeffs, C, D, MS};

/// Discretization knobs shared by the solver, invariants and meshing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Numerics {
    /// Truncation order `n` of the loops `x_j`.
    pub order: usize,
    /// Spectral sample count `N` (a multiple of 4, so that `lambda = i` is a sample).
    pub samples: usize,
    /// Runge-Kutta subdivisions per unit path length.
    pub rk_steps: usize,
    /// Minimal admitted distance between a path and a puncture.
    pub puncture_eps: f64,
    /// Graded refinement: local step at most `grading * distance / speed`;
    /// zero disables grading.
    pub grading: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics { order: 20, samples: 256, rk_steps: 500, puncture_eps: 1e-4, grading: 0.05 }
    }
}

impl Numerics {
    /// Cheaper settings: 100 subdivisions, order 12, 64 samples.
    pub fn fast() -> Self {
        Numerics { order: 12, samples: 64, rk_steps: 100, ..Numerics::default() }
    }

    /// Check the invariants of the configuration.
    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.rk_steps == 0 {
            return Err(invalid("order and rk_steps must be positive"));
        }
        if !self.samples.is_multiple_of(4) || self.samples < 2 * self.order + 4 {
            return Err(invalid("samples must be a multiple of 4 and at least 2n + 4"));
        }
        if !(self.puncture_eps > 0.0) || self.grading < 0.0 {
            return Err(invalid("puncture_eps must be positive and grading nonnegative"));
        }
        Ok(())
    }
}

/// Step sizes along a path with the values `omega_j dz/ds` at every node and
/// midpoint (`2 * steps + 1` entries). Shared by all spectral samples.
#[derive(Clone, Debug)]
pub struct OmegaTable {
    /// Step lengths in the path parameter.
    pub h: Vec<f64>,
    /// Form values times path velocity at `s_0, s_0 + h_0/2, s_1, ...`.
    pub w: Vec<[C64; 3]>,
    /// Closest approach to a singularity in the integration coordinate.
    pub min_distance: f64,
}

impl OmegaTable {
    /// Number of RK steps.
    pub fn steps(&self) -> usize {
        self.h.len()
    }

    /// Build for a curve `s -> (z(s), z'(s))`, `s in [0, 1]`. `dist(s)` gives
    /// the distance to the nearest singularity in the integration coordinate
    /// and the speed of the curve in that coordinate; `base_steps` sets the
    /// uniform step and `form` evaluates the forms at `z`.
    pub fn build(
        curve: impl Fn(f64) -> (C64, C64),
        dist: impl Fn(f64) -> (f64, f64),
        form: impl Fn(C64) -> Result<[C64; 3]>,
        base_steps: usize,
        grading: f64,
        eps: f64,
    ) -> Result<OmegaTable> {
        let h0 = 1.0 / base_steps.max(1) as f64;
        let mut h = Vec::with_capacity(base_steps);
        let mut w = Vec::with_capacity(2 * base_steps + 1);
        let mut min_distance = f64::INFINITY;
        let mut node = |s: f64, w: &mut Vec<[C64; 3]>| -> Result<f64> {
            let (z, dz) = curve(s);
            let (d, speed) = dist(s);
            if d < eps {
                return Err(Error::PathTooClose { z, distance: d });
            }
            min_distance = min_distance.min(d);
            let f = form(z)?;
            w.push([f[0] * dz, f[1] * dz, f[2] * dz]);
            Ok(d / speed.max(1e-300))
        };
        let mut s = 0.0;
        let mut reach = node(s, &mut w)?;
        while s < 1.0 {
            let mut step = h0;
            if grading > 0.0 {
                step = step.min(grading * reach);
            }
            let next = if 1.0 - s <= step * (1.0 + 1e-9) { 1.0 } else { s + step };
            let step = next - s;
            node(s + step / 2.0, &mut w)?;
            reach = node(next, &mut w)?;
            h.push(step);
            s = next;
        }
        Ok(OmegaTable { h, w, min_distance })
    }

    /// Straight segment `[a, b]` in the `z`-plane.
    pub fn segment(a: C64, b: C64, phi: f64, num: &Numerics) -> Result<OmegaTable> {
        let len = (b - a).norm();
        let steps = (len * num.rk_steps as f64).ceil().max(1.0) as usize;
        OmegaTable::build(
            |s| (a + (b - a) * s, b - a),
            |s| (puncture_distance(a + (b - a) * s, phi), len),
            |z| omega_forms(z, phi),
            steps,
            num.grading,
            num.puncture_eps,
        )
    }

    /// Polyline through `path` in the `z`-plane.
    pub fn polyline(path: &[C64], phi: f64, num: &Numerics) -> Result<Vec<OmegaTable>> {
        path.windows(2).map(|p| OmegaTable::segment(p[0], p[1], phi, num)).collect()
    }
}

#[inline]
fn rk_step(phi: Mat2, h: f64, e0: Mat2, em: Mat2, e1: Mat2) -> Mat2 {
    let k1 = phi * e0;
    let k2 = (phi + k1.scale_re(h / 2.0)) * em;
    let k3 = (phi + k2.scale_re(h / 2.0)) * em;
    let k4 = (phi + k3.scale_re(h)) * e1;
    phi + (k1 + k2.scale_re(2.0) + k3.scale_re(2.0) + k4).scale_re(h / 6.0)
}

/// Transport one spectral sample with weights `a_j = r x_j(lambda)`.
pub fn transport_one(table: &OmegaTable, t: f64, a: &[C64; 3], start: Mat2) -> Mat2 {
    let mut phi = start;
    let mut e0 = eta_matrix(t, a, &table.w[0]);
    for (i, &h) in table.h.iter().enumerate() {
        let em = eta_matrix(t, a, &table.w[2 * i + 1]);
        let e1 = eta_matrix(t, a, &table.w[2 * i + 2]);
        phi = rk_step(phi, h, e0, em, e1);
        e0 = e1;
    }
    phi
}

/// Transport with the exact tangent of the RK4 map with respect to the three
/// weights `a_j` (complex derivatives). Returns `(Phi, dPhi/da_j)`.
pub fn transport_tangent(table: &OmegaTable, t: f64, a: &[C64; 3], start: Mat2) -> (Mat2, [Mat2; 3]) {
    let mut phi = start;
    let mut tan = [Mat2::ZERO; 3];
    let g = |w: &[C64; 3]| -> [Mat2; 3] { [0, 1, 2].map(|j| MS[j].scale(w[j] * t)) };
    let mut e0 = eta_matrix(t, a, &table.w[0]);
    let mut g0 = g(&table.w[0]);
    for (i, &h) in table.h.iter().enumerate() {
        let em = eta_matrix(t, a, &table.w[2 * i + 1]);
        let e1 = eta_matrix(t, a, &table.w[2 * i + 2]);
        let gm = g(&table.w[2 * i + 1]);
        let g1 = g(&table.w[2 * i + 2]);
        let k1 = phi * e0;
        let y2 = phi + k1.scale_re(h / 2.0);
        let k2 = y2 * em;
        let y3 = phi + k2.scale_re(h / 2.0);
        let k3 = y3 * em;
        let y4 = phi + k3.scale_re(h);
        let k4 = y4 * e1;
        for j in 0..3 {
            let d = tan[j];
            let dk1 = d * e0 + phi * g0[j];
            let dy2 = d + dk1.scale_re(h / 2.0);
            let dk2 = dy2 * em + y2 * gm[j];
            let dy3 = d + dk2.scale_re(h / 2.0);
            let dk3 = dy3 * em + y3 * gm[j];
            let dy4 = d + dk3.scale_re(h);
            let dk4 = dy4 * e1 + y4 * g1[j];
            tan[j] = d + (dk1 + dk2.scale_re(2.0) + dk3.scale_re(2.0) + dk4).scale_re(h / 6.0);
        }
        phi += (k1 + k2.scale_re(2.0) + k3.scale_re(2.0) + k4).scale_re(h / 6.0);
        e0 = e1;
        g0 = g1;
    }
    (phi, tan)
}

/// Transport all spectral samples through a sequence of tables.
pub fn transport_tables<E: Executor>(
    tables: &[OmegaTable],
    t: f64,
    weights: &[[C64; 3]],
    start: &[Mat2],
    exec: &E,
) -> Vec<Mat2> {
    exec.map(weights.len(), |i| {
        tables.iter().fold(start[i], |phi, tab| transport_one(tab, t, &weights[i], phi))
    })
}

/// Transport `Phi` from `Identity` at `path[0]` along the polyline, for each
/// spectral sample.
pub fn transport<E: Executor>(
    path: &[C64],
    coeffs: &PotentialCoeffs,
    num: &Numerics,
    lambdas: &[C64],
    exec: &E,
) -> Result<Vec<Mat2>> {
    if path.len() < 2 {
        return Err(invalid("path needs at least two points"));
    }
    let tables = OmegaTable::polyline(path, coeffs.params().phi(), num)?;
    let weights = coeffs.weights(lambdas);
    let start = vec![Mat2::IDENTITY; lambdas.len()];
    Ok(transport_tables(&tables, coeffs.params().t(), &weights, &start, exec))
}

/// `P = Phi(1)` and `Q = Phi(i)` on the spectral circle.
#[derive(Clone, Debug)]
pub struct TransportResult {
    /// `Phi(z = 1)` per sample.
    pub p: Vec<Mat2>,
    /// `Phi(z = i)` per sample.
    pub q: Vec<Mat2>,
    /// Total RK steps over both segments.
    pub steps: usize,
    /// Richardson estimate of the RK error at `lambda = 1`.
    pub error_estimate: f64,
}

/// The two segment tables `[0, 1]` and `[0, i]`.
pub fn pq_tables(phi: f64, num: &Numerics) -> Result<[OmegaTable; 2]> {
    let zero = C64::new(0.0, 0.0);
    Ok([OmegaTable::segment(zero, C64::new(1.0, 0.0), phi, num)?, OmegaTable::segment(zero, I, phi, num)?])
}

/// Compute `P`, `Q` on `num.samples` circle samples.
pub fn compute_pq<E: Executor>(coeffs: &PotentialCoeffs, num: &Numerics, exec: &E) -> Result<TransportResult> {
    num.validate()?;
    let phi = coeffs.params().phi();
    let t = coeffs.params().t();
    let tabs = pq_tables(phi, num)?;
    let lambdas = circle(num.samples);
    let weights = coeffs.weights(&lambdas);
    let both = exec.map(2 * weights.len(), |i| {
        let (tab, w) = (&tabs[i % 2], &weights[i / 2]);
        transport_one(tab, t, w, Mat2::IDENTITY)
    });
    let p: Vec<Mat2> = both.iter().step_by(2).copied().collect();
    let q: Vec<Mat2> = both.iter().skip(1).step_by(2).copied().collect();
    let coarse = Numerics { rk_steps: (num.rk_steps / 2).max(1), ..*num };
    let ctabs = pq_tables(phi, &coarse)?;
    let pc = transport_one(&ctabs[0], t, &weights[0], Mat2::IDENTITY);
    let qc = transport_one(&ctabs[1], t, &weights[0], Mat2::IDENTITY);
    let error_estimate = ((pc - p[0]).max_abs()).max((qc - q[0]).max_abs()) / 15.0;
    Ok(TransportResult { p, q, steps: tabs[0].steps() + tabs[1].steps(), error_estimate })
}

/// `p = P11 P21 - P12 P22`.
#[inline]
pub fn p_coordinate(p: &Mat2) -> C64 {
    p.at(0, 0) * p.at(1, 0) - p.at(0, 1) * p.at(1, 1)
}

/// `q = i (Q11 Q21 + Q12 Q22)`.
#[inline]
pub fn q_coordinate(q: &Mat2) -> C64 {
    I * (q.at(0, 0) * q.at(1, 0) + q.at(0, 1) * q.at(1, 1))
}

/// The involutions `L_1..L_4` at one sample.
pub fn l_matrices(p: &Mat2, q: &Mat2) -> Result<[Mat2; 4]> {
    let pinv = p.inv().ok_or(Error::Singular { lambda: C64::new(f64::NAN, 0.0) })?;
    let qinv = q.inv().ok_or(Error::Singular { lambda: C64::new(f64::NAN, 0.0) })?;
    let l1 = *q * C * D * qinv;
    let l2 = D;
    let l3 = *p * C * pinv;
    let l4 = -(l3 * D * l1);
    Ok([l1, l2, l3, l4])
}

/// Half-trace coordinates and the Fricke discriminant per sample.
#[derive(Clone, Debug)]
pub struct HalfTraces {
    /// `p` samples.
    pub p: Vec<C64>,
    /// `q` samples.
    pub q: Vec<C64>,
    /// `r = -tr(L_2 L_4)/2` samples.
    pub r: Vec<C64>,
    /// Discriminant samples.
    pub delta: Vec<C64>,
}

/// `4 (1 - p^2)(1 - q^2) - 4 cos^2(2 pi t)`.
pub fn discriminant(p: C64, q: C64, t: f64) -> C64 {
    4.0 * (1.0 - p * p) * (1.0 - q * q) - 4.0 * (2.0 * PI * t).cos().powi(2)
}

/// Half-traces from `P`, `Q` samples.
pub fn half_traces(tr: &TransportResult, t: f64) -> Result<HalfTraces> {
    let lam = circle(tr.p.len());
    let mut out = HalfTraces { p: vec![], q: vec![], r: vec![], delta: vec![] };
    for ((p, q), l) in tr.p.iter().zip(&tr.q).zip(lam) {
        let ls = l_matrices(p, q).map_err(|_| Error::Singular { lambda: l })?;
        let (pp, qq) = (p_coordinate(p), q_coordinate(q));
        out.p.push(pp);
        out.q.push(qq);
        out.r.push(-0.5 * (ls[1] * ls[3]).tr());
        out.delta.push(discriminant(pp, qq, t));
    }
    Ok(out)
}

/// `L_1..L_4` and `M_1..M_4` per sample.
#[derive(Clone, Debug)]
pub struct Monodromies {
    /// `L_j` samples.
    pub l: [Vec<Mat2>; 4],
    /// `M_j` samples.
    pub m: [Vec<Mat2>; 4],
}

/// Assemble the monodromies around the four punctures.
pub fn monodromies(tr: &TransportResult) -> Result<Monodromies> {
    let lam = circle(tr.p.len());
    let mut l: [Vec<Mat2>; 4] = Default::default();
    let mut m: [Vec<Mat2>; 4] = Default::default();
    for ((p, q), lm) in tr.p.iter().zip(&tr.q).zip(lam) {
        let ls = l_matrices(p, q).map_err(|_| Error::Singular { lambda: lm })?;
        let l1i = ls[0].inv().ok_or(Error::Singular { lambda: lm })?;
        let l2i = ls[1].inv().ok_or(Error::Singular { lambda: lm })?;
        let m1 = ls[3];
        let m2 = l1i * m1 * ls[0];
        let m3 = l2i * m1 * ls[1];
        let m4 = l2i * l1i * m1 * ls[0] * ls[1];
        for j in 0..4 {
            l[j].push(ls[j]);
        }
        m[0].push(m1);
        m[1].push(m2);
        m[2].push(m3);
        m[3].push(m4);
    }
    Ok(Monodromies { l, m })
}
