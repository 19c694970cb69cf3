//! Immersion reconstruction: Iwasawa factorization, the Sym-Bobenko formula,
//! a structured mesh of the fundamental patch and its extension by the reflection
//! group to one period cell.
//!
//! The patch is meshed in the coordinate `w` with
//! `w^k = e^{-i phi} (z - p_1)/(z - p_4)`. The puncture `p_1` sits at `w = 0`,
//! where the conformal angle of the patch is `pi/k`, so the immersion is
//! smooth in `w`. The ray `arg w = 0` is the arc from `p_1` to `i`, the ray
//! `arg w = pi/k` is the arc from `p_1` to `1`, `[0, 1]` lies on `|w| = 1`
//! and `z = 0` sits at `w = e^{i phi/k}`.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{geometry, invalid, Error, Result};
use crate::exec::Executor;
use crate::invariants::{lattice_from_generators, sym_derivative, PeriodLattice, Unitarizer};
use crate::linalg::{least_squares, solve_complex, Dense, Mat2, C64};
use crate::loops::{circle, dft, idft, ComplexLoop, MatrixLoop, MatrixSamples};
use crate::monodromy::{transport_one, Numerics, OmegaTable};
use crate::potential::{omega_forms, SurfaceParams};
use crate::solver::Solution;

/// Default truncation order of the Iwasawa factorization.
pub const DEFAULT_IWASAWA_ORDER: usize = 20;

/// Weld tolerance for vertices on shared symmetry curves.
pub const WELD_TOLERANCE: f64 = 1e-7;

/// `Phi = B F` with `B` extending holomorphically to `lambda = 0` and `F`
/// unitary on the circle.
#[derive(Clone, Debug)]
pub struct IwasawaFactors {
    /// Positive loop, degrees `0..`.
    pub b: MatrixLoop,
    /// Samples of `B`.
    pub b_samples: MatrixSamples,
    /// Samples of the unitary factor.
    pub f: MatrixSamples,
    /// Truncation order that met the residual bound.
    pub order: usize,
    /// `max |B B* - Phi Phi*|` over the samples.
    pub residual: f64,
}

impl IwasawaFactors {
    /// `max |F F* - Id|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.f.0.iter().map(|f| (*f * f.adjoint() - Mat2::IDENTITY).max_abs()).fold(0.0, f64::max)
    }

    /// `max |B F - Phi|`.
    pub fn reconstruction_error(&self, phi: &MatrixSamples) -> f64 {
        self.b_samples.mul(&self.f).0.iter().zip(&phi.0).map(|(a, b)| (*a - *b).max_abs()).fold(0.0, f64::max)
    }

    /// Sum of the moduli of the negative Fourier coefficients of `Phi F*`,
    /// which equals `B` when the factorization is exact.
    pub fn negative_mass(&self, phi: &MatrixSamples) -> f64 {
        let prod = phi.mul(&self.f.adjoint_star());
        let n = prod.len();
        let mut mass = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let s: Vec<C64> = prod.0.iter().map(|m| m.0[i][j]).collect();
                mass += dft(&s)[n / 2..].iter().map(|c| c.norm()).sum::<f64>();
            }
        }
        mass
    }

    /// `B(0)`, upper triangular with positive diagonal.
    pub fn b_at_zero(&self) -> Mat2 {
        let e = |i: usize, j: usize| self.b.entries[i][j].coeff(0);
        Mat2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }
}

fn entry_coeffs(samples: &[Mat2]) -> Vec<Mat2> {
    let n = samples.len();
    let mut out = vec![Mat2::ZERO; n];
    for i in 0..2 {
        for j in 0..2 {
            let s: Vec<C64> = samples.iter().map(|m| m.0[i][j]).collect();
            for (o, v) in out.iter_mut().zip(dft(&s)) {
                o.0[i][j] = v;
            }
        }
    }
    out
}

/// Iwasawa factorization of circle samples, retrying with doubled order
/// while `|B B* - Phi Phi*| > 1e-8`.
pub fn iwasawa(phi: &MatrixSamples, order: usize) -> Result<IwasawaFactors> {
    let n = phi.len();
    if n < 8 || order == 0 {
        return Err(invalid("iwasawa needs at least 8 samples and a positive order"));
    }
    let cap = n / 2 - 1;
    let mut m = order.min(cap);
    loop {
        let fac = iwasawa_fixed(phi, m)?;
        if fac.residual <= 1e-8 {
            return Ok(fac);
        }
        if m >= cap {
            return Err(Error::Factorization { residual: fac.residual, order: m });
        }
        m = (2 * m).min(cap);
    }
}

/// Spectral factorization of `W = Phi Phi*` at truncation order `m`.
///
/// Solves the block Toeplitz system for the negative part
/// `G = sum_{j <= 0} G_j lambda^j`, `G_0 = Id`, of `(B*)^{-1} B(0)*`, then
/// `B = (W G)_+ G_0'` with `B(0) B(0)* = (W G)_0`.
fn iwasawa_fixed(phi: &MatrixSamples, m: usize) -> Result<IwasawaFactors> {
    let n = phi.len();
    let w_samples: Vec<Mat2> = phi.0.iter().map(|p| *p * p.adjoint()).collect();
    let table = entry_coeffs(&w_samples);
    let wc = |d: i64| -> Mat2 {
        if d.unsigned_abs() as usize >= n / 2 {
            Mat2::ZERO
        } else {
            table[d.rem_euclid(n as i64) as usize]
        }
    };
    let dim = 2 * m;
    let mut a = vec![C64::new(0.0, 0.0); dim * dim];
    let mut rhs = vec![C64::new(0.0, 0.0); dim * 2];
    for mi in 0..m {
        for jj in 0..m {
            let blk = wc(jj as i64 - mi as i64);
            for r in 0..2 {
                for s in 0..2 {
                    a[(2 * mi + r) * dim + 2 * jj + s] = blk.0[r][s];
                }
            }
        }
        let w = wc(-(mi as i64 + 1));
        for r in 0..2 {
            for s in 0..2 {
                rhs[(2 * mi + r) * 2 + s] = -w.0[r][s];
            }
        }
    }
    let x = solve_complex(dim, &a, &rhs, 2).ok_or(Error::Singular { lambda: C64::new(0.0, 0.0) })?;
    let g: Vec<Mat2> = (0..m)
        .map(|jj| Mat2::new(x[4 * jj], x[4 * jj + 1], x[4 * jj + 2], x[4 * jj + 3]))
        .collect();
    let wg = |d: i64| -> Mat2 {
        g.iter().enumerate().fold(wc(d), |acc, (jj, gj)| acc + wc(d + jj as i64 + 1) * *gj)
    };
    let mut h = wg(0);
    h = (h + h.adjoint()).scale_re(0.5);
    // Upper Cholesky factor with positive diagonal: h = b0 b0*.
    let h11 = h.at(1, 1).re;
    if !(h11 > 0.0) {
        return Err(Error::Factorization { residual: f64::INFINITY, order: m });
    }
    let l00 = h11.sqrt();
    let l10 = h.at(0, 1).conj() / l00;
    let rest = h.at(0, 0).re - l10.norm_sqr();
    if !(rest > 0.0) {
        return Err(Error::Factorization { residual: f64::INFINITY, order: m });
    }
    let l11 = rest.sqrt();
    let b0 = Mat2::new(C64::new(l11, 0.0), l10.conj(), C64::new(0.0, 0.0), C64::new(l00, 0.0));
    let g0 = b0.adjoint().inv().ok_or(Error::Singular { lambda: C64::new(0.0, 0.0) })?;
    let deg = n / 2 - 1;
    let bm: Vec<Mat2> = (0..=deg).map(|d| wg(d as i64) * g0).collect();
    let mut b_samples = vec![Mat2::ZERO; n];
    let mut entries: Vec<ComplexLoop> = Vec::with_capacity(4);
    for i in 0..2 {
        for j in 0..2 {
            let coeffs: Vec<C64> = bm.iter().map(|b| b.0[i][j]).collect();
            let mut buf = vec![C64::new(0.0, 0.0); n];
            buf[..=deg].copy_from_slice(&coeffs);
            for (o, v) in b_samples.iter_mut().zip(idft(&buf)) {
                o.0[i][j] = v;
            }
            entries.push(ComplexLoop::new(0, coeffs)?);
        }
    }
    let mut it = entries.into_iter();
    let mut next = || it.next().expect("four entries");
    let b = MatrixLoop { entries: [[next(), next()], [next(), next()]] };
    let b_samples = MatrixSamples(b_samples);
    let f = b_samples.inv()?.mul(phi);
    let residual = b_samples
        .0
        .iter()
        .zip(&w_samples)
        .map(|(b, w)| (*b * b.adjoint() - *w).max_abs())
        .fold(0.0, f64::max);
    Ok(IwasawaFactors { b, b_samples, f, order: m, residual })
}

/// Unitary left factor `F` of `Phi = F B`, the splitting compatible with
/// `d Phi = Phi eta`: left multiplication by a unitary monodromy moves `F`
/// by the same matrix. Obtained by factoring `Phi^{-1} = B' F'` and
/// inverting; returns `F` and the factorization of `Phi^{-1}`.
pub fn unitary_frame(phi: &MatrixSamples, order: usize) -> Result<(MatrixSamples, IwasawaFactors)> {
    let fac = iwasawa(&phi.inv()?, order)?;
    Ok((fac.f.adjoint_star(), fac))
}

/// Sym-Bobenko point `-2 (d/dtau F)(0) F(1)^{-1}` in `R^3`. Fails if the
/// result is not in `su(2)` to `1e-6`.
pub fn sym_point(f: &MatrixSamples) -> Result<[f64; 3]> {
    let (v, skew) = sym_derivative(&f.0)?;
    if skew > 1e-6 * (1.0 + norm3(&v)) {
        return Err(Error::Unitarizability { reason: format!("sym point not in su(2) (defect {skew:e})") });
    }
    Ok(v)
}

/// Mesh resolution and factorization order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshConfig {
    /// Subdivisions along the arc from `p_1` to `i`.
    pub resolution: usize,
    /// Initial Iwasawa truncation order.
    pub iwasawa_order: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig { resolution: 26, iwasawa_order: DEFAULT_IWASAWA_ORDER }
    }
}

impl MeshConfig {
    /// Subdivisions along the arc from `p_1` to `1`: 43 for the default 26,
    /// giving 2236 triangles.
    pub fn columns(&self) -> usize {
        ((self.resolution as f64 * 43.0 / 26.0).round() as usize).max(4)
    }
}

/// Structured quadrilateral grid of the fundamental patch in `w`.
///
/// The patch is a curvilinear quadrilateral with corners `p_1` (`w = 0`),
/// `i`, `0` and `1`. Node `(i, j)` is the transfinite interpolation of its
/// four sides at `(i/nu, j/nv)`: `j = 0` is the arc from `p_1` to `i`,
/// `i = nu` is the segment `[0, i]`, `j = nv` is the segment `[0, 1]` and
/// `i = 0` is the arc from `p_1` to `1`.
#[derive(Clone, Debug)]
pub struct PatchGrid {
    k: u32,
    phi: f64,
    nu: usize,
    nv: usize,
    nodes: Vec<C64>,
    singular: Vec<C64>,
}

impl PatchGrid {
    /// Grid with `nu x nv` quadrilaterals.
    pub fn new(params: &SurfaceParams, nu: usize, nv: usize) -> Result<PatchGrid> {
        if nu < 4 || nv < 4 {
            return Err(invalid("mesh needs at least 4 subdivisions per side"));
        }
        let (k, phi) = (params.k(), params.phi());
        let kf = k as f64;
        let mut singular = Vec::with_capacity(3 * k as usize);
        let cphi = phi.cos();
        for m in 0..k {
            let arg = 2.0 * PI * m as f64 / kf;
            singular.push(C64::from_polar(cphi.powf(1.0 / kf), arg));
            singular.push(C64::from_polar(cphi.powf(-1.0 / kf), arg));
            singular.push(C64::from_polar(1.0, (arg * kf - phi) / kf));
        }
        let mut grid = PatchGrid { k, phi, nu, nv, nodes: vec![], singular };
        let side_i = grid.imaginary_side();
        let w_i = side_i[0];
        let e_pi = C64::from_polar(1.0, PI / kf);
        let e_phi = C64::from_polar(1.0, phi / kf);
        let unit_arc = |u: f64| C64::from_polar(1.0, (PI - u * (PI - phi)) / kf);
        let mut nodes = Vec::with_capacity((nu + 1) * (nv + 1));
        #[allow(clippy::needless_range_loop)]
        for j in 0..=nv {
            let v = j as f64 / nv as f64;
            for i in 0..=nu {
                let u = i as f64 / nu as f64;
                let w = if j == 0 {
                    w_i * u
                } else if j == nv {
                    unit_arc(u)
                } else if i == 0 {
                    e_pi * v
                } else if i == nu {
                    side_i[j]
                } else {
                    (w_i * u) * (1.0 - v) + unit_arc(u) * v + (e_pi * v) * (1.0 - u) + side_i[j] * u
                        - (w_i * (u * (1.0 - v)) + e_pi * ((1.0 - u) * v) + e_phi * (u * v))
                };
                nodes.push(w);
            }
        }
        grid.nodes = nodes;
        Ok(grid)
    }

    /// Nodes on the image of `[i, 0]`, equally spaced in arc length in `w`
    /// and exactly on the curve.
    fn imaginary_side(&self) -> Vec<C64> {
        const FINE: usize = 4096;
        let ys: Vec<f64> = (0..=FINE).map(|m| 1.0 - m as f64 / FINE as f64).collect();
        let ws: Vec<C64> = ys.iter().map(|&y| self.w_of_z(C64::new(0.0, y))).collect();
        let mut arc = vec![0.0; FINE + 1];
        for m in 1..=FINE {
            arc[m] = arc[m - 1] + (ws[m] - ws[m - 1]).norm();
        }
        let total = arc[FINE];
        (0..=self.nv)
            .map(|j| {
                let s = total * j as f64 / self.nv as f64;
                let m = arc.partition_point(|&a| a < s).clamp(1, FINE);
                let f = (s - arc[m - 1]) / (arc[m] - arc[m - 1]);
                let y = if j == self.nv { 0.0 } else { ys[m - 1] + f * (ys[m] - ys[m - 1]) };
                self.w_of_z(C64::new(0.0, y))
            })
            .collect()
    }

    /// Principal branch of `w(z)`; valid on the closed quarter disk.
    pub fn w_of_z(&self, z: C64) -> C64 {
        let e = C64::from_polar(1.0, self.phi);
        let h = (z - e) / (z - e.conj()) * e.conj();
        h.powf(1.0 / self.k as f64)
    }

    /// `z(w)` and `dz/dw`.
    pub fn z_of_w(&self, w: C64) -> (C64, C64) {
        let kf = self.k as f64;
        let e = C64::from_polar(1.0, self.phi);
        let p1 = e;
        let p4 = e.conj();
        let wk1 = w.powi(self.k as i32 - 1);
        let big = e * wk1 * w;
        let z = (p1 - p4 * big) / (1.0 - big);
        let dz = (p1 - p4) / ((1.0 - big) * (1.0 - big)) * kf * e * wk1;
        (z, dz)
    }

    fn singular_distance(&self, w: C64) -> f64 {
        self.singular.iter().map(|s| (w - s).norm()).fold(w.norm(), f64::min)
    }

    /// Quadrilateral counts `(nu, nv)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.nu, self.nv)
    }

    /// Grid node `(i, j)`; `(0, 0)` is the puncture.
    pub fn vertex_w(&self, i: usize, j: usize) -> C64 {
        self.nodes[self.index(i, j)]
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        (self.nu + 1) * (self.nv + 1)
    }

    /// Vertex index of `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nu + 1) + i
    }

    /// Triangles, counterclockwise in `w`, each quadrilateral split along
    /// the diagonal for which `diag` is smaller.
    pub fn triangulate(&self, diag: impl Fn(usize, usize) -> f64) -> Vec<[usize; 3]> {
        let mut t = Vec::with_capacity(2 * self.nu * self.nv);
        for j in 0..self.nv {
            for i in 0..self.nu {
                let (a, b) = (self.index(i, j), self.index(i + 1, j));
                let (c, d) = (self.index(i + 1, j + 1), self.index(i, j + 1));
                if diag(a, c) <= diag(b, d) {
                    t.push([a, b, c]);
                    t.push([a, c, d]);
                } else {
                    t.push([a, b, d]);
                    t.push([b, c, d]);
                }
            }
        }
        t
    }

    /// Triangles split along the shorter diagonal in `w`.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        self.triangulate(|a, b| (self.nodes[a] - self.nodes[b]).norm())
    }

    /// Boundary vertex lists: images of `[0, 1]`, `[0, i]`, the arc from
    /// `p_1` to `i` and the arc from `p_1` to `1`.
    pub fn boundary(&self) -> [Vec<usize>; 4] {
        let (nu, nv) = (self.nu, self.nv);
        [
            (0..=nu).map(|i| self.index(i, nv)).collect(),
            (0..=nv).map(|j| self.index(nu, j)).collect(),
            (0..=nu).map(|i| self.index(i, 0)).collect(),
            (0..=nv).map(|j| self.index(0, j)).collect(),
        ]
    }

    fn edge_table(&self, wa: C64, wb: C64, num: &Numerics) -> Result<OmegaTable> {
        let dw = wb - wa;
        let len = dw.norm();
        let steps = ((len * num.rk_steps as f64).ceil() as usize).max(1);
        OmegaTable::build(
            |s| {
                let (z, dz) = self.z_of_w(wa + dw * s);
                (z, dz * dw)
            },
            |s| (self.singular_distance(wa + dw * s), len),
            |z| omega_forms(z, self.phi),
            steps,
            num.grading,
            num.puncture_eps,
        )
    }
}

/// Meshed fundamental patch.
#[derive(Clone, Debug)]
pub struct Patch {
    /// Immersion at the grid vertices; `z = 0` maps to the origin.
    pub vertices: Vec<[f64; 3]>,
    /// Triangles, counterclockwise in the domain.
    pub triangles: Vec<[usize; 3]>,
    /// Boundary lists as in [`PatchGrid::boundary`].
    pub boundary: [Vec<usize>; 4],
    /// Domain coordinate `w` per vertex.
    pub w: Vec<C64>,
    /// Largest `|F F* - Id|` over the vertices.
    pub unitarity_defect: f64,
    /// Largest non-`su(2)` part of a Sym derivative.
    pub skew_defect: f64,
    /// Largest Iwasawa order used.
    pub iwasawa_order: usize,
    /// Quadrilateral counts of the grid.
    pub shape: (usize, usize),
}

fn transport_edge(
    grid: &PatchGrid,
    wa: C64,
    wb: C64,
    t: f64,
    weights: &[[C64; 3]],
    start: &MatrixSamples,
    num: &Numerics,
) -> Result<MatrixSamples> {
    let table = grid.edge_table(wa, wb, num)?;
    Ok(MatrixSamples(start.0.iter().zip(weights).map(|(s, a)| transport_one(&table, t, a, *s)).collect()))
}

/// Mesh the fundamental patch: transport `Phi` from `z = 0` (initial value
/// the unitarizer) along the side `[0, 1]` and from there down every grid
/// column, take the unitary frame at each vertex and apply the Sym-Bobenko
/// formula. The puncture vertex is a cubic least-squares extrapolation.
pub fn build_patch<E: Executor>(
    sol: &Solution,
    un: &Unitarizer,
    cfg: &MeshConfig,
    exec: &E,
) -> Result<Patch> {
    let grid = PatchGrid::new(&sol.params, cfg.resolution, cfg.columns())?;
    let num = sol.numerics;
    let n = num.samples;
    if un.u.len() != n {
        return Err(invalid("unitarizer and solution sample counts differ"));
    }
    let t = sol.params.t();
    let weights = sol.coeffs.weights(&circle(n));
    let (nu, nv) = grid.shape();
    let start = MatrixSamples(un.samples());
    // Along [0, 1] from z = 0; top[i] holds Phi at (i, nv).
    let mut top = vec![MatrixSamples(vec![]); nu + 1];
    top[nu] = start.clone();
    for i in (0..nu).rev() {
        top[i] = transport_edge(&grid, grid.vertex_w(i + 1, nv), grid.vertex_w(i, nv), t, &weights, &top[i + 1], &num)?;
    }
    let columns: Vec<Result<Vec<MatrixSamples>>> = exec.map(nu + 1, |i| {
        let mut frames = vec![MatrixSamples(vec![]); nv + 1];
        frames[nv] = top[i].clone();
        let last = usize::from(i == 0);
        for j in (last..nv).rev() {
            frames[j] =
                transport_edge(&grid, grid.vertex_w(i, j + 1), grid.vertex_w(i, j), t, &weights, &frames[j + 1], &num)?;
        }
        Ok(frames)
    });
    let mut frames: Vec<Option<MatrixSamples>> = vec![None; grid.vertex_count()];
    for (i, col) in columns.into_iter().enumerate() {
        for (j, f) in col?.into_iter().enumerate() {
            if !(i == 0 && j == 0) {
                frames[grid.index(i, j)] = Some(f);
            }
        }
    }
    let (base, _) = unitary_frame(&start, cfg.iwasawa_order)?;
    let f0 = sym_point(&base)?;
    // Per vertex: position, Sym skew defect, unitarity defect, Iwasawa order.
    type VertexData = ([f64; 3], f64, f64, usize);
    let points: Vec<Result<Option<VertexData>>> = exec.map(frames.len(), |v| {
        let Some(phi) = &frames[v] else { return Ok(None) };
        let (frame, fac) = unitary_frame(phi, cfg.iwasawa_order)?;
        let (p, skew) = sym_derivative(&frame.0)?;
        Ok(Some(([p[0] - f0[0], p[1] - f0[1], p[2] - f0[2]], skew, fac.unitarity_defect(), fac.order)))
    });
    let mut vertices = vec![[0.0; 3]; grid.vertex_count()];
    let (mut skew_defect, mut unitarity_defect, mut order) = (0.0f64, 0.0f64, 0usize);
    for (v, r) in points.into_iter().enumerate() {
        let Some((p, skew, unit, ord)) = r? else { continue };
        if skew > 1e-6 * (1.0 + norm3(&p)) {
            return Err(Error::Unitarizability { reason: format!("sym point not in su(2) at vertex {v}") });
        }
        vertices[v] = p;
        skew_defect = skew_defect.max(skew);
        unitarity_defect = unitarity_defect.max(unit);
        order = order.max(ord);
    }
    vertices[grid.index(0, 0)] = extrapolate_center(&grid, &vertices)?;
    let w: Vec<C64> = grid.nodes.clone();
    let triangles = grid.triangulate(|a, b| {
        let (p, q) = (vertices[a], vertices[b]);
        norm3(&[p[0] - q[0], p[1] - q[1], p[2] - q[2]])
    });
    Ok(Patch {
        vertices,
        triangles,
        boundary: grid.boundary(),
        w,
        unitarity_defect,
        skew_defect,
        iwasawa_order: order,
        shape: (nu, nv),
    })
}

fn extrapolate_center(grid: &PatchGrid, vertices: &[[f64; 3]]) -> Result<[f64; 3]> {
    let (nu, nv) = grid.shape();
    let pts: Vec<(C64, [f64; 3])> = (0..=nv.min(5))
        .flat_map(|j| (0..=nu.min(5)).map(move |i| (i, j)))
        .filter(|&(i, j)| i + j > 0)
        .map(|(i, j)| (grid.vertex_w(i, j), vertices[grid.index(i, j)]))
        .collect();
    let scale = pts.iter().map(|(w, _)| w.norm()).fold(0.0, f64::max);
    let mut a = Dense::zeros(pts.len(), 10);
    for (row, (w, _)) in pts.iter().enumerate() {
        let (x, y) = (w.re / scale, w.im / scale);
        let basis = [1.0, x, y, x * x, x * y, y * y, x * x * x, x * x * y, x * y * y, y * y * y];
        for (col, b) in basis.iter().enumerate() {
            *a.get_mut(row, col) = *b;
        }
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let rhs: Vec<f64> = pts.iter().map(|(_, p)| p[c]).collect();
        *o = least_squares(&a, &rhs).ok_or_else(|| geometry("puncture extrapolation is rank deficient"))?[0];
    }
    Ok(out)
}

/// Plane `normal . y = offset` fitted to a boundary curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneFit {
    /// Unit normal.
    pub normal: [f64; 3],
    /// Offset along the normal.
    pub offset: f64,
    /// Largest distance of a fitted vertex from the plane.
    pub residual: f64,
}

impl PlaneFit {
    /// Signed distance.
    pub fn distance(&self, v: &[f64; 3]) -> f64 {
        dot3(&self.normal, v) - self.offset
    }

    /// Mirror image.
    pub fn reflect(&self, v: &[f64; 3]) -> [f64; 3] {
        let d = 2.0 * self.distance(v);
        [v[0] - d * self.normal[0], v[1] - d * self.normal[1], v[2] - d * self.normal[2]]
    }
}

/// The four symmetry planes of a patch.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPlanes {
    /// Horizontal plane `y1 = offset` through the image of `[0, 1]`.
    pub mirror: PlaneFit,
    /// Vertical planes through the images of `[0, i]`, the arc from `p_1`
    /// to `i` and the arc from `p_1` to `1`.
    pub walls: [PlaneFit; 3],
    /// Angles between each wall normal and its predicted direction
    /// `e_2`, `e_3`, `(0, sin 2 pi t, cos 2 pi t)`.
    pub angle_errors: [f64; 3],
}

impl BoundaryPlanes {
    /// Largest fit residual.
    pub fn max_residual(&self) -> f64 {
        self.walls.iter().map(|p| p.residual).fold(self.mirror.residual, f64::max)
    }
}

fn fit_vertical(points: &[[f64; 3]], predicted: [f64; 2]) -> PlaneFit {
    let n = points.len() as f64;
    let (my, mz) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p[1] / n, b + p[2] / n));
    let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
    for p in points {
        let (dy, dz) = (p[1] - my, p[2] - mz);
        a += dy * dy;
        b += dy * dz;
        c += dz * dz;
    }
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let mut nrm = [-theta.sin(), theta.cos()];
    if nrm[0] * predicted[0] + nrm[1] * predicted[1] < 0.0 {
        nrm = [-nrm[0], -nrm[1]];
    }
    let normal = [0.0, nrm[0], nrm[1]];
    let offset = normal[1] * my + normal[2] * mz;
    let residual = points.iter().map(|p| (dot3(&normal, p) - offset).abs()).fold(0.0, f64::max);
    PlaneFit { normal, offset, residual }
}

/// Fit the symmetry planes of the four boundary curves. Fails if any
/// residual exceeds `1e-3`.
pub fn fit_boundary_planes(patch: &Patch, t: f64) -> Result<BoundaryPlanes> {
    // The puncture vertex is extrapolated; it is snapped afterwards.
    let pick = |l: &Vec<usize>| -> Vec<[f64; 3]> { l.iter().filter(|&&i| i != 0).map(|&i| patch.vertices[i]).collect() };
    let horizontal = pick(&patch.boundary[0]);
    let h = horizontal.iter().map(|p| p[0]).sum::<f64>() / horizontal.len() as f64;
    let residual = horizontal.iter().map(|p| (p[0] - h).abs()).fold(0.0, f64::max);
    let mirror = PlaneFit { normal: [1.0, 0.0, 0.0], offset: h, residual };
    let a = 2.0 * PI * t;
    let predicted = [[1.0, 0.0], [0.0, 1.0], [a.sin(), a.cos()]];
    let walls = [0, 1, 2].map(|i| fit_vertical(&pick(&patch.boundary[i + 1]), predicted[i]));
    let angle_errors = [0, 1, 2].map(|i| {
        let n = walls[i].normal;
        (n[1] * predicted[i][0] + n[2] * predicted[i][1]).abs().min(1.0).acos()
    });
    let planes = BoundaryPlanes { mirror, walls, angle_errors };
    if planes.max_residual() > 1e-3 {
        return Err(geometry(format!("symmetry plane fit residual {:e}", planes.max_residual())));
    }
    Ok(planes)
}

/// Triangulated surface covering one period cell.
#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    /// Vertices in `R^3` (`y1` vertical).
    pub vertices: Vec<[f64; 3]>,
    /// Triangles with outward orientation.
    pub triangles: Vec<[usize; 3]>,
    /// Period lattice basis (one or two horizontal vectors).
    pub lattice: Vec<[f64; 3]>,
    /// Height of the horizontal symmetry plane.
    pub mirror_height: f64,
    /// Fitted symmetry planes.
    pub planes: Option<BoundaryPlanes>,
    /// Number of patch copies.
    pub copies: usize,
    /// Largest mismatch of a boundary vertex under lattice translations.
    pub boundary_mismatch: f64,
    /// Largest distance of a reflection-group translation from the lattice.
    pub lattice_mismatch: f64,
}

impl SurfaceMesh {
    /// Mesh without symmetry metadata, e.g. a single patch.
    pub fn from_parts(vertices: Vec<[f64; 3]>, triangles: Vec<[usize; 3]>, lattice: Vec<[f64; 3]>, mirror_height: f64) -> Self {
        SurfaceMesh {
            vertices,
            triangles,
            lattice,
            mirror_height,
            planes: None,
            copies: 1,
            boundary_mismatch: 0.0,
            lattice_mismatch: 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Motion {
    a: [[f64; 2]; 2],
    b: [f64; 2],
}

impl Motion {
    const ID: Motion = Motion { a: [[1.0, 0.0], [0.0, 1.0]], b: [0.0, 0.0] };

    fn reflection(p: &PlaneFit) -> Motion {
        let (n0, n1) = (p.normal[1], p.normal[2]);
        Motion {
            a: [[1.0 - 2.0 * n0 * n0, -2.0 * n0 * n1], [-2.0 * n0 * n1, 1.0 - 2.0 * n1 * n1]],
            b: [2.0 * p.offset * n0, 2.0 * p.offset * n1],
        }
    }

    fn apply2(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a[0][0] * v[0] + self.a[0][1] * v[1] + self.b[0], self.a[1][0] * v[0] + self.a[1][1] * v[1] + self.b[1]]
    }

    fn compose(&self, r: &Motion) -> Motion {
        let a = &self.a;
        let m = |i: usize, j: usize| a[i][0] * r.a[0][j] + a[i][1] * r.a[1][j];
        let rb = [a[0][0] * r.b[0] + a[0][1] * r.b[1], a[1][0] * r.b[0] + a[1][1] * r.b[1]];
        Motion { a: [[m(0, 0), m(0, 1)], [m(1, 0), m(1, 1)]], b: [rb[0] + self.b[0], rb[1] + self.b[1]] }
    }

    fn det(&self) -> f64 {
        self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0]
    }

    fn same_linear(&self, o: &Motion) -> bool {
        (0..2).all(|i| (0..2).all(|j| (self.a[i][j] - o.a[i][j]).abs() < 1e-6))
    }
}

/// Lattice in the horizontal plane with reduction of translations.
struct PlaneLattice {
    basis: Vec<[f64; 2]>,
}

impl PlaneLattice {
    /// Distance from `v` to the nearest lattice point, or to the lattice
    /// line set for rank one.
    fn residue(&self, v: [f64; 2]) -> [f64; 2] {
        match self.basis.len() {
            1 => {
                let e = self.basis[0];
                let c = (v[0] * e[0] + v[1] * e[1]) / (e[0] * e[0] + e[1] * e[1]);
                let r = c.round();
                [v[0] - r * e[0], v[1] - r * e[1]]
            }
            _ => {
                let (e, f) = (self.basis[0], self.basis[1]);
                let det = e[0] * f[1] - e[1] * f[0];
                let c0 = ((v[0] * f[1] - v[1] * f[0]) / det).round();
                let c1 = ((e[0] * v[1] - e[1] * v[0]) / det).round();
                let mut best = [v[0] - c0 * e[0] - c1 * f[0], v[1] - c0 * e[1] - c1 * f[1]];
                for d0 in -1..=1 {
                    for d1 in -1..=1 {
                        let (a, b) = (c0 + d0 as f64, c1 + d1 as f64);
                        let cand = [v[0] - a * e[0] - b * f[0], v[1] - a * e[1] - b * f[1]];
                        if norm2(cand) < norm2(best) {
                            best = cand;
                        }
                    }
                }
                best
            }
        }
    }

    fn covolume(&self) -> f64 {
        match self.basis.len() {
            1 => norm2(self.basis[0]),
            _ => (self.basis[0][0] * self.basis[1][1] - self.basis[0][1] * self.basis[1][0]).abs(),
        }
    }
}

fn norm2(v: [f64; 2]) -> f64 {
    (v[0] * v[0] + v[1] * v[1]).sqrt()
}

fn norm3(v: &[f64; 3]) -> f64 {
    dot3(v, v).sqrt()
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Move boundary vertices onto their fitted planes so that mirrored copies
/// weld exactly. Returns the snapped vertices and the largest displacement.
fn snap_to_planes(patch: &Patch, planes: &BoundaryPlanes) -> (Vec<[f64; 3]>, f64) {
    let mut verts = patch.vertices.clone();
    let mut walls: Vec<Vec<usize>> = vec![vec![]; verts.len()];
    for (w, list) in patch.boundary[1..].iter().enumerate() {
        for &i in list {
            walls[i].push(w);
        }
    }
    let mut moved = 0.0f64;
    for &i in &patch.boundary[0] {
        moved = moved.max((verts[i][0] - planes.mirror.offset).abs());
        verts[i][0] = planes.mirror.offset;
    }
    for (i, ws) in walls.iter().enumerate() {
        let v = verts[i];
        let target = match ws.as_slice() {
            [] => continue,
            [a] => planes.walls[*a].reflect(&v).iter().zip(&v).map(|(r, x)| 0.5 * (r + x)).collect::<Vec<_>>(),
            [a, b, ..] => {
                let (p, q) = (&planes.walls[*a], &planes.walls[*b]);
                let det = p.normal[1] * q.normal[2] - p.normal[2] * q.normal[1];
                if det.abs() < 1e-9 {
                    continue;
                }
                let y2 = (p.offset * q.normal[2] - q.offset * p.normal[2]) / det;
                let y3 = (p.normal[1] * q.offset - q.normal[1] * p.offset) / det;
                vec![v[0], y2, y3]
            }
        };
        let t = [target[0], target[1], target[2]];
        moved = moved.max(norm3(&sub3(&t, &v)));
        verts[i] = t;
    }
    (verts, moved)
}

/// Orient the patch so that triangle normals point away from the mean
/// curvature vector, i.e. out of the enclosed region.
fn orient_outward(vertices: &[[f64; 3]], triangles: &[[usize; 3]], boundary: &[Vec<usize>; 4]) -> Vec<[usize; 3]> {
    let n = vertices.len();
    let mut on_boundary = vec![false; n];
    boundary.iter().flatten().for_each(|&i| on_boundary[i] = true);
    let mut nbrs: Vec<Vec<usize>> = vec![vec![]; n];
    let mut normals = vec![[0.0; 3]; n];
    for t in triangles {
        let nrm = cross3(&sub3(&vertices[t[1]], &vertices[t[0]]), &sub3(&vertices[t[2]], &vertices[t[0]]));
        for a in 0..3 {
            for c in 0..3 {
                normals[t[a]][c] += nrm[c];
            }
            for b in 0..3 {
                if a != b && !nbrs[t[a]].contains(&t[b]) {
                    nbrs[t[a]].push(t[b]);
                }
            }
        }
    }
    let mut score = 0.0;
    for v in 0..n {
        if on_boundary[v] || nbrs[v].is_empty() {
            continue;
        }
        let k = nbrs[v].len() as f64;
        let mut lap = [0.0; 3];
        for &u in &nbrs[v] {
            for c in 0..3 {
                lap[c] += (vertices[u][c] - vertices[v][c]) / k;
            }
        }
        score += dot3(&lap, &normals[v]);
    }
    if score > 0.0 {
        triangles.iter().map(|t| [t[0], t[2], t[1]]).collect()
    } else {
        triangles.to_vec()
    }
}

struct Welder {
    cells: BTreeMap<[i64; 3], Vec<usize>>,
    vertices: Vec<[f64; 3]>,
    tol: f64,
}

impl Welder {
    fn new(tol: f64) -> Self {
        Welder { cells: BTreeMap::new(), vertices: Vec::new(), tol }
    }

    fn key(&self, v: &[f64; 3]) -> [i64; 3] {
        let h = 4.0 * self.tol;
        [(v[0] / h).floor() as i64, (v[1] / h).floor() as i64, (v[2] / h).floor() as i64]
    }

    fn find(&self, v: &[f64; 3]) -> Option<usize> {
        let k = self.key(v);
        let mut best: Option<(usize, f64)> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    for &i in self.cells.get(&[k[0] + dx, k[1] + dy, k[2] + dz]).into_iter().flatten() {
                        let d = norm3(&sub3(&self.vertices[i], v));
                        if d <= self.tol && best.is_none_or(|(_, b)| d < b) {
                            best = Some((i, d));
                        }
                    }
                }
            }
        }
        best.map(|(i, _)| i)
    }

    fn insert(&mut self, v: [f64; 3]) -> usize {
        if let Some(i) = self.find(&v) {
            return i;
        }
        let i = self.vertices.len();
        self.vertices.push(v);
        self.cells.entry(self.key(&v)).or_default().push(i);
        i
    }
}

/// Extend the patch by the reflections in its three vertical symmetry
/// planes and the horizontal mirror until one period cell is covered.
///
/// Copies are enumerated breadth first over reflection words, keyed modulo
/// the period lattice. Every word that returns to a known copy yields a
/// translation of the reflection group; these must lie in the lattice
/// (`1e-4`) and generate it.
pub fn extend_symmetry(patch: &Patch, t: f64, lattice: &PeriodLattice) -> Result<SurfaceMesh> {
    let planes = fit_boundary_planes(patch, t)?;
    let (verts, _) = snap_to_planes(patch, &planes);
    let tris = orient_outward(&verts, &patch.triangles, &patch.boundary);
    let lat = PlaneLattice { basis: lattice.basis.iter().map(|b| [b[1], b[2]]).collect() };
    if lat.basis.is_empty() {
        return Err(geometry("empty period lattice"));
    }
    let scale = lattice.shortest.max(1e-300);
    let reflections = planes.walls.map(|p| Motion::reflection(&p));
    let mut classes = vec![Motion::ID];
    let mut queue = VecDeque::from([0usize]);
    let mut translations: Vec<[f64; 2]> = Vec::new();
    let mut lattice_mismatch = 0.0f64;
    while let Some(g) = queue.pop_front() {
        for r in &reflections {
            let cand = classes[g].compose(r);
            let mut found = false;
            for h in &classes {
                if !cand.same_linear(h) {
                    continue;
                }
                let d = [cand.b[0] - h.b[0], cand.b[1] - h.b[1]];
                let res = lat.residue(d);
                if norm2(res) < 1e-4 * scale {
                    lattice_mismatch = lattice_mismatch.max(norm2(res));
                    if norm2(d) > 1e-4 * scale {
                        translations.push(d);
                    }
                    found = true;
                    break;
                }
            }
            if !found {
                if classes.len() >= 1024 {
                    return Err(geometry("reflection group is not finite modulo the period lattice"));
                }
                // A new class with trivial linear part is a translation
                // outside the lattice.
                if cand.same_linear(&Motion::ID) {
                    let res = norm2(lat.residue(cand.b));
                    return Err(geometry(format!("reflection translation misses the period lattice by {res:e}")));
                }
                classes.push(cand);
                queue.push_back(classes.len() - 1);
            }
        }
    }
    let generated = lattice_from_generators(&translations, 1e-8)?;
    let gen_lat = PlaneLattice { basis: generated };
    if gen_lat.basis.len() != lat.basis.len() || (gen_lat.covolume() / lat.covolume() - 1.0).abs() > 1e-4 {
        return Err(geometry(format!(
            "reflection translations generate covolume {} but the period lattice has {}",
            gen_lat.covolume(),
            lat.covolume()
        )));
    }
    let mut welder = Welder::new(WELD_TOLERANCE);
    let mut triangles = Vec::with_capacity(2 * classes.len() * tris.len());
    let h = planes.mirror.offset;
    for g in &classes {
        for mirror in [false, true] {
            let map: Vec<usize> = verts
                .iter()
                .map(|v| {
                    let [y2, y3] = g.apply2([v[1], v[2]]);
                    let y1 = if mirror { 2.0 * h - v[0] } else { v[0] };
                    welder.insert([y1, y2, y3])
                })
                .collect();
            let flip = (g.det() < 0.0) != mirror;
            for t in &tris {
                let (a, b, c) = (map[t[0]], map[t[1]], map[t[2]]);
                if a == b || b == c || a == c {
                    continue;
                }
                triangles.push(if flip { [a, c, b] } else { [a, b, c] });
            }
        }
    }
    let mut mesh = SurfaceMesh {
        vertices: welder.vertices,
        triangles,
        lattice: lattice.basis.clone(),
        mirror_height: h,
        planes: Some(planes),
        copies: 2 * classes.len(),
        boundary_mismatch: 0.0,
        lattice_mismatch,
    };
    mesh.boundary_mismatch = periodic_boundary_mismatch(&mesh, &lat);
    if mesh.boundary_mismatch > 1e-6 * scale.max(1.0) {
        return Err(geometry(format!("cell boundary not identified by the lattice ({:e})", mesh.boundary_mismatch)));
    }
    Ok(mesh)
}

/// Boundary edges (used by exactly one triangle) as vertex pairs.
pub fn boundary_edges(triangles: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for t in triangles {
        for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            *count.entry((e.0.min(e.1), e.0.max(e.1))).or_default() += 1;
        }
    }
    count.into_iter().filter(|(_, c)| *c == 1).map(|(e, _)| e).collect()
}

fn periodic_boundary_mismatch(mesh: &SurfaceMesh, lat: &PlaneLattice) -> f64 {
    let mut on = vec![false; mesh.vertices.len()];
    for (a, b) in boundary_edges(&mesh.triangles) {
        on[a] = true;
        on[b] = true;
    }
    let bverts: Vec<[f64; 3]> = (0..on.len()).filter(|&i| on[i]).map(|i| mesh.vertices[i]).collect();
    let mut worst = 0.0f64;
    let shifts: Vec<[f64; 2]> = match lat.basis.len() {
        1 => (-2i32..=2).filter(|&a| a != 0).map(|a| [a as f64 * lat.basis[0][0], a as f64 * lat.basis[0][1]]).collect(),
        _ => (-2i32..=2)
            .flat_map(|a| (-2i32..=2).map(move |b| (a, b)))
            .filter(|&(a, b)| a != 0 || b != 0)
            .map(|(a, b)| {
                let (e, f) = (lat.basis[0], lat.basis[1]);
                [a as f64 * e[0] + b as f64 * f[0], a as f64 * e[1] + b as f64 * f[1]]
            })
            .collect(),
    };
    let mut welder = Welder::new(1e-6);
    for v in &bverts {
        welder.insert(*v);
    }
    for v in &bverts {
        let best = shifts
            .iter()
            .filter_map(|s| {
                let moved = [v[0], v[1] + s[0], v[2] + s[1]];
                welder.find(&moved).map(|i| norm3(&sub3(&welder.vertices[i], &moved)))
            })
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    worst
}

/// Triangulated area and prism volume `sum (mean height above the mirror
/// plane) x (signed horizontal projected area)`. Fails if the signed
/// projected areas do not cancel, which signals inconsistent orientation.
pub fn mesh_geometry(mesh: &SurfaceMesh) -> Result<(f64, f64)> {
    let (area, volume, proj, abs_proj) = prism_sums(mesh);
    if proj.abs() > 1e-6 * abs_proj.max(1e-300) && mesh.copies > 1 {
        return Err(geometry(format!("signed projected areas do not cancel ({proj:e})")));
    }
    Ok((area, volume))
}

/// `(area, volume, signed projected area, absolute projected area)`.
pub fn prism_sums(mesh: &SurfaceMesh) -> (f64, f64, f64, f64) {
    let (mut area, mut volume, mut proj, mut abs_proj) = (0.0, 0.0, 0.0, 0.0);
    for t in &mesh.triangles {
        let (a, b, c) = (&mesh.vertices[t[0]], &mesh.vertices[t[1]], &mesh.vertices[t[2]]);
        let n = cross3(&sub3(b, a), &sub3(c, a));
        area += 0.5 * norm3(&n);
        let p = 0.5 * n[0];
        let height = (a[0] + b[0] + c[0]) / 3.0 - mesh.mirror_height;
        volume += height * p;
        proj += p;
        abs_proj += p.abs();
    }
    (area, volume, proj, abs_proj)
}

/// Patch mesh as a [`SurfaceMesh`] (no extension).
pub fn patch_mesh(patch: &Patch, lattice: &PeriodLattice) -> SurfaceMesh {
    SurfaceMesh::from_parts(patch.vertices.clone(), patch.triangles.clone(), lattice.basis.clone(), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn unitary_loop_factors_trivially() {
        let f = MatrixSamples(
            circle(32)
                .into_iter()
                .map(|l| Mat2::new(c(0.6, 0.0) * l, c(0.8, 0.0), c(-0.8, 0.0), c(0.6, 0.0) * l.conj()))
                .collect(),
        );
        let fac = iwasawa(&f, 8).unwrap();
        assert!((fac.b_at_zero() - Mat2::IDENTITY).max_abs() < 1e-10);
        assert!(fac.f.0.iter().zip(&f.0).all(|(a, b)| (*a - *b).max_abs() < 1e-10));
    }

    #[test]
    fn constant_diagonal_factors_into_b() {
        let d = Mat2::diag(c(2.0, 0.0), c(0.5, 0.0));
        let phi = MatrixSamples(vec![d; 16]);
        let fac = iwasawa(&phi, 4).unwrap();
        assert!((fac.b_at_zero() - d).max_abs() < 1e-12);
        assert!(fac.unitarity_defect() < 1e-12);
    }

    #[test]
    fn flat_square_prism_volume() {
        let h = 0.37;
        let mesh = SurfaceMesh::from_parts(
            vec![[h, 0.0, 0.0], [h, 1.0, 0.0], [h, 1.0, 1.0], [h, 0.0, 1.0]],
            vec![[0, 1, 2], [0, 2, 3]],
            vec![],
            0.0,
        );
        let (a, v, _, _) = prism_sums(&mesh);
        assert!((a - 1.0).abs() < 1e-15);
        assert!((v - h).abs() < 1e-15);
    }

    #[test]
    fn grid_maps_corners() {
        let p = SurfaceParams::new(3, 1.2).unwrap();
        let g = PatchGrid::new(&p, 26, 43).unwrap();
        let z0 = g.z_of_w(g.vertex_w(26, 43)).0;
        assert!(z0.norm() < 1e-14);
        let z1 = g.z_of_w(g.vertex_w(0, 43)).0;
        assert!((z1 - c(1.0, 0.0)).norm() < 1e-12);
        let zi = g.z_of_w(g.vertex_w(26, 0)).0;
        assert!((zi - c(0.0, 1.0)).norm() < 1e-12);
        for j in 0..=43 {
            assert!(g.z_of_w(g.vertex_w(26, j)).0.re.abs() < 1e-12);
        }
        assert_eq!(g.triangles().len(), 2236);
    }
}
