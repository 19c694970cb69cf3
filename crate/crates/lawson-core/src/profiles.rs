//! Isoperimetric competitors in `T^2 x R`, profile sweeps of the Lawson-type
//! families and the interval on which they beat the competitors.
//!
//! Lattices are normalized so that the shortest period has length 1. The
//! competitors are the sphere, the cylinder around the shortest closed
//! geodesic, and a pair of horizontal planes, each admitted only while it
//! fits in the cell.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::exec::Executor;
use crate::invariants::compute_invariants;
use crate::potential::SurfaceParams;
use crate::solver::{continuation, gauss_newton, solve, ContinuationPolicy, Solution, SolverConfig, UnknownVector};

/// Shape of a unit-normalized period lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeKind {
    /// Generated by `1` and `e^{i pi/3}`.
    Hexagonal,
    /// Generated by `1` and `i`.
    Square,
}

/// Flat torus with shortest period 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice2D {
    /// Lattice shape.
    pub kind: LatticeKind,
    /// Area of a fundamental cell.
    pub cell_area: f64,
}

impl Lattice2D {
    /// Equilateral torus, cell area `sqrt(3)/2`.
    pub fn hexagonal() -> Self {
        Lattice2D { kind: LatticeKind::Hexagonal, cell_area: 3f64.sqrt() / 2.0 }
    }

    /// Square torus, cell area 1.
    pub fn square() -> Self {
        Lattice2D { kind: LatticeKind::Square, cell_area: 1.0 }
    }

    /// Period lattice of the family with parameter `k`.
    pub fn for_k(k: u32) -> Result<Self> {
        match k {
            3 | 6 => Ok(Self::hexagonal()),
            4 => Ok(Self::square()),
            _ => Err(invalid("only k = 3, 4, 6 have a doubly periodic lattice of known shape")),
        }
    }

    /// Distance between neighbouring lines parallel to the shortest period.
    pub fn width(&self) -> f64 {
        self.cell_area
    }

    /// Volumes at which the least competitor changes: sphere to cylinder,
    /// then cylinder to planes.
    pub fn transitions(&self) -> [f64; 2] {
        [4.0 * PI / 81.0, self.cell_area * self.cell_area / PI]
    }
}

/// Which competitor realizes the minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Round sphere.
    Sphere,
    /// Round cylinder around the shortest closed geodesic.
    Cylinder,
    /// Two horizontal planes.
    Planes,
}

/// Least competitor area at enclosed volume `v` and the branch attaining it.
pub fn competitor(lattice: &Lattice2D, v: f64) -> (f64, Branch) {
    let mut best = (2.0 * lattice.cell_area, Branch::Planes);
    if 2.0 * (3.0 * v / (4.0 * PI)).cbrt() <= 1.0 {
        let a = (36.0 * PI * v * v).cbrt();
        if a < best.0 {
            best = (a, Branch::Sphere);
        }
    }
    if 2.0 * (v / PI).sqrt() <= lattice.width() {
        let a = 2.0 * (PI * v).sqrt();
        if a < best.0 {
            best = (a, Branch::Cylinder);
        }
    }
    best
}

/// Least competitor area at enclosed volume `v`.
pub fn competitor_area(lattice: &Lattice2D, v: f64) -> f64 {
    competitor(lattice, v).0
}

/// One row of an isoperimetric profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    /// Family parameter.
    pub phi: f64,
    /// Normalized enclosed volume.
    pub v_norm: f64,
    /// Normalized area.
    pub a_norm: f64,
    /// Least competitor area at `v_norm`.
    pub a_competitor: f64,
    /// `a_competitor - a_norm`; positive where the family wins.
    pub margin: f64,
    /// False if the solver failed at this `phi` (other fields are NaN).
    pub converged: bool,
}

impl ProfilePoint {
    fn failed(phi: f64) -> Self {
        ProfilePoint { phi, v_norm: f64::NAN, a_norm: f64::NAN, a_competitor: f64::NAN, margin: f64::NAN, converged: false }
    }
}

/// Profile row of a solved configuration.
pub fn profile_point(sol: &Solution) -> Result<ProfilePoint> {
    let lattice = Lattice2D::for_k(sol.params.k())?;
    let inv = compute_invariants(sol)?;
    let a_competitor = competitor_area(&lattice, inv.volume_normalized);
    Ok(ProfilePoint {
        phi: sol.params.phi(),
        v_norm: inv.volume_normalized,
        a_norm: inv.area_normalized,
        a_competitor,
        margin: a_competitor - inv.area_normalized,
        converged: true,
    })
}

fn solve_near<E: Executor>(
    seed: Option<&Solution>,
    params: SurfaceParams,
    cfg: &SolverConfig,
    exec: &E,
) -> Result<Solution> {
    let Some(seed) = seed else { return solve(params, cfg, exec) };
    match gauss_newton(&seed.unknowns(), params, cfg, exec) {
        Ok(s) => Ok(s),
        Err(first) => {
            let policy = ContinuationPolicy { step: (params.phi() - seed.params.phi()).abs() / 2.0, ..Default::default() };
            let mut chain = continuation(seed.clone(), params.phi(), &policy, cfg, exec);
            match chain.failure {
                Some(_) => Err(first),
                None => Ok(chain.solutions.pop().expect("nonempty chain")),
            }
        }
    }
}

/// Profile of the family `k` at the given parameters, in order. Each point
/// is seeded by the last converged one; failures are marked and skipped.
pub fn sweep_profile<E: Executor>(k: u32, phis: &[f64], cfg: &SolverConfig, exec: &E) -> Result<Vec<ProfilePoint>> {
    Lattice2D::for_k(k)?;
    let mut out = Vec::with_capacity(phis.len());
    let mut last: Option<Solution> = None;
    for &phi in phis {
        let params = SurfaceParams::new(k, phi)?;
        let row = solve_near(last.as_ref(), params, cfg, exec).and_then(|s| {
            let p = profile_point(&s)?;
            last = Some(s);
            Ok(p)
        });
        out.push(row.unwrap_or_else(|_| ProfilePoint::failed(phi)));
    }
    Ok(out)
}

/// `n + 1` equally spaced parameters from `a` to `b`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}

/// Parameter and volume range on which the family beats every competitor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImprovementInterval {
    /// Lower end in `phi`.
    pub phi_lo: f64,
    /// Upper end in `phi`.
    pub phi_hi: f64,
    /// Normalized volume at `phi_lo`.
    pub v_lo: f64,
    /// Normalized volume at `phi_hi`.
    pub v_hi: f64,
    /// Sampled parameter of largest margin.
    pub phi_peak: f64,
    /// Largest sampled margin.
    pub margin_peak: f64,
}

/// Find where the margin is positive inside `bracket`.
///
/// The bracket is sampled at `samples + 1` points; if no sample has positive
/// margin the result is `None`. Otherwise both zero crossings around the best
/// sample are bisected to `tol` in `phi`. The ends of the bracket must have
/// negative margin.
pub fn improvement_interval<E: Executor>(
    k: u32,
    bracket: (f64, f64),
    samples: usize,
    tol: f64,
    cfg: &SolverConfig,
    exec: &E,
) -> Result<Option<ImprovementInterval>> {
    let (a, b) = bracket;
    if !(a < b) || !(tol > 0.0) {
        return Err(invalid("bracket must be increasing and tol positive"));
    }
    let phis = linspace(a, b, samples.max(2));
    let mut sols: Vec<(Solution, ProfilePoint)> = Vec::with_capacity(phis.len());
    for &phi in &phis {
        let s = solve_near(sols.last().map(|x| &x.0), SurfaceParams::new(k, phi)?, cfg, exec)?;
        let p = profile_point(&s)?;
        sols.push((s, p));
    }
    let (peak, _) = sols
        .iter()
        .enumerate()
        .max_by(|x, y| x.1 .1.margin.total_cmp(&y.1 .1.margin))
        .expect("at least three samples");
    let best = sols[peak].1;
    if !(best.margin > 0.0) {
        return Ok(None);
    }
    if !(sols[0].1.margin < 0.0) || !(sols[sols.len() - 1].1.margin < 0.0) {
        return Err(invalid("margin does not change sign at both ends of the bracket"));
    }
    // Innermost samples with negative margin on either side of the peak.
    let left = (0..peak).rev().find(|&i| sols[i].1.margin < 0.0).expect("end has negative margin");
    let right = (peak + 1..sols.len()).find(|&i| sols[i].1.margin < 0.0).expect("end has negative margin");
    let lo = bisect_crossing(k, &sols[left], &sols[left + 1], tol, cfg, exec)?;
    let hi = bisect_crossing(k, &sols[right - 1], &sols[right], tol, cfg, exec)?;
    Ok(Some(ImprovementInterval {
        phi_lo: lo.phi,
        phi_hi: hi.phi,
        v_lo: lo.v_norm,
        v_hi: hi.v_norm,
        phi_peak: best.phi,
        margin_peak: best.margin,
    }))
}

/// Bisect the sign change of the margin between two solved ends, returning
/// the profile point at the final midpoint.
fn bisect_crossing<E: Executor>(
    k: u32,
    a: &(Solution, ProfilePoint),
    b: &(Solution, ProfilePoint),
    tol: f64,
    cfg: &SolverConfig,
    exec: &E,
) -> Result<ProfilePoint> {
    let (mut lo, mut hi) = (a.clone(), b.clone());
    let sign_lo = lo.1.margin.signum();
    while (hi.1.phi - lo.1.phi).abs() > tol {
        let mid = 0.5 * (lo.1.phi + hi.1.phi);
        let seed = UnknownVector::from_coeffs(&lo.0.coeffs);
        let s = gauss_newton(&seed, SurfaceParams::new(k, mid)?, cfg, exec)?;
        let p = profile_point(&s)?;
        if p.margin.signum() == sign_lo {
            lo = (s, p);
        } else {
            hi = (s, p);
        }
    }
    // Linear interpolation of the margin between the final ends.
    let (p, q) = (lo.1, hi.1);
    let f = p.margin / (p.margin - q.margin);
    Ok(ProfilePoint {
        phi: p.phi + f * (q.phi - p.phi),
        v_norm: p.v_norm + f * (q.v_norm - p.v_norm),
        a_norm: p.a_norm + f * (q.a_norm - p.a_norm),
        a_competitor: p.a_competitor + f * (q.a_competitor - p.a_competitor),
        margin: 0.0,
        converged: true,
    })
}

/// Profile point of the family `k` at normalized volume `v_target`, by
/// bisection in `phi` inside `bracket` (volume is increasing in `phi` on
/// the branches used here, but only a sign change is required).
pub fn point_at_volume<E: Executor>(
    k: u32,
    v_target: f64,
    bracket: (f64, f64),
    tol: f64,
    cfg: &SolverConfig,
    exec: &E,
) -> Result<ProfilePoint> {
    let sa = solve(SurfaceParams::new(k, bracket.0)?, cfg, exec)?;
    let pa = profile_point(&sa)?;
    let sb = solve_near(Some(&sa), SurfaceParams::new(k, bracket.1)?, cfg, exec)?;
    let pb = profile_point(&sb)?;
    let shift = |mut p: ProfilePoint| {
        p.margin = p.v_norm - v_target;
        p
    };
    let (a, b) = ((sa, shift(pa)), (sb, shift(pb)));
    if a.1.margin.signum() == b.1.margin.signum() {
        return Err(invalid("target volume is not bracketed"));
    }
    let (mut lo, mut hi) = (a, b);
    while (hi.1.phi - lo.1.phi).abs() > tol {
        let mid = 0.5 * (lo.1.phi + hi.1.phi);
        let s = gauss_newton(&lo.0.unknowns(), SurfaceParams::new(k, mid)?, cfg, exec)?;
        let p = shift(profile_point(&s)?);
        if p.margin.signum() == lo.1.margin.signum() {
            lo = (s, p);
        } else {
            hi = (s, p);
        }
    }
    let (p, q) = (lo.1, hi.1);
    let f = p.margin / (p.margin - q.margin);
    let lattice = Lattice2D::for_k(k)?;
    let a_norm = p.a_norm + f * (q.a_norm - p.a_norm);
    let a_competitor = competitor_area(&lattice, v_target);
    Ok(ProfilePoint {
        phi: p.phi + f * (q.phi - p.phi),
        v_norm: v_target,
        a_norm,
        a_competitor,
        margin: a_competitor - a_norm,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_volumes() {
        let hex = Lattice2D::hexagonal();
        let v = 3.0 / (4.0 * PI);
        assert!((competitor_area(&hex, v) - 3f64.sqrt()).abs() < 1e-14);
        let sq = Lattice2D::square();
        assert!((competitor_area(&sq, 1.0 / PI) - 2.0).abs() < 1e-14);
        for lat in [hex, sq] {
            let [a, b] = lat.transitions();
            let e = 1e-9;
            assert_eq!(competitor(&lat, a - e).1, Branch::Sphere);
            assert_eq!(competitor(&lat, a + e).1, Branch::Cylinder);
            assert_eq!(competitor(&lat, b - e).1, Branch::Cylinder);
            assert_eq!(competitor(&lat, b + e).1, Branch::Planes);
        }
    }

    #[test]
    fn small_volume_is_sphere() {
        let v = 1e-6;
        let (a, br) = competitor(&Lattice2D::square(), v);
        assert_eq!(br, Branch::Sphere);
        assert!((a - (36.0 * PI * v * v).cbrt()).abs() < 1e-15);
    }

    #[test]
    fn large_volume_is_planes() {
        let (a, br) = competitor(&Lattice2D::hexagonal(), 5.0);
        assert_eq!(br, Branch::Planes);
        assert!((a - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn linspace_hits_ends() {
        let p = linspace(0.1, 0.7, 6);
        assert_eq!(p.len(), 7);
        assert_eq!(p[6], 0.7);
        assert!((p[3] - 0.4).abs() < 1e-15);
    }
}
