//! Composite Gauss-Legendre integration on graded, oscillation-capped meshes.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use super::reference_legendre;
use super::truncation::{truncation_point, Envelope};
use crate::error::{Error, Result};

/// Panels per parallel work unit. Fixed so that the summation tree does not
/// depend on the number of threads.
const CHUNK: usize = 32;

/// Local oscillation scale of the integrand, expressed as the admissible
/// panel width (half the distance between consecutive zeros).
#[derive(Clone, Default)]
pub enum Oscillation {
    #[default]
    None,
    /// Orthonormal Laguerre functions of degree up to `n`: zeros near `x` are
    /// spaced about `π√x / √ñ`, `ñ = n + (α+1)/2`.
    Laguerre {
        n_tilde: f64,
    },
    /// Hermite functions of degree up to `n`: spacing at least `π/√(2n+1)`.
    Hermite {
        n: usize,
    },
    /// `J_ν(ω x)`: spacing `π/ω`.
    Bessel {
        omega: f64,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Oscillation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Oscillation::None => write!(f, "None"),
            Oscillation::Laguerre { n_tilde } => write!(f, "Laguerre {{ n_tilde: {n_tilde} }}"),
            Oscillation::Hermite { n } => write!(f, "Hermite {{ n: {n} }}"),
            Oscillation::Bessel { omega } => write!(f, "Bessel {{ omega: {omega} }}"),
            Oscillation::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Oscillation {
    pub fn half_wavelength(&self, x: f64) -> f64 {
        match self {
            Oscillation::None => f64::INFINITY,
            Oscillation::Laguerre { n_tilde } => 0.5 * PI * x.abs().sqrt() / n_tilde.sqrt(),
            Oscillation::Hermite { n } => 0.5 * PI / (2.0 * *n as f64 + 1.0).sqrt(),
            Oscillation::Bessel { omega } => 0.5 * PI / omega,
            Oscillation::Custom(h) => h(x),
        }
    }
}

/// Everything needed to integrate one (possibly vector-valued) integrand.
#[derive(Debug, Clone)]
pub struct SingularOscillatoryPlan {
    /// Integration interval; infinite ends are truncated via `envelope`.
    pub interval: (f64, f64),
    pub singular_points: Vec<f64>,
    /// Ratio between consecutive graded panels; panels touching a singular
    /// point shrink geometrically by this factor.
    pub grading_ratio: f64,
    pub oscillation: Oscillation,
    /// Gauss-Legendre order per panel; the error estimate re-evaluates with
    /// `panel_order + 8`.
    pub panel_order: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Smallest graded panel, relative to the interval scale.
    pub width_floor: f64,
    /// Decay of the integrand at infinite ends.
    pub envelope: Option<Envelope>,
    pub truncation_tol: f64,
    /// Largest coarse panel, relative to the truncated interval length.
    pub max_panel_fraction: f64,
    pub max_panels: usize,
    pub max_refinements: usize,
}

impl SingularOscillatoryPlan {
    pub fn new(a: f64, b: f64) -> Self {
        Self {
            interval: (a, b),
            singular_points: Vec::new(),
            grading_ratio: 0.5,
            oscillation: Oscillation::None,
            panel_order: 16,
            abs_tol: 1e-13,
            rel_tol: 1e-10,
            width_floor: 1e-30,
            envelope: None,
            truncation_tol: 1e-18,
            max_panel_fraction: 0.125,
            max_panels: 4_000_000,
            max_refinements: 3,
        }
    }

    pub fn with_singular_points(mut self, points: impl IntoIterator<Item = f64>) -> Self {
        self.singular_points.extend(points);
        self
    }

    pub fn with_oscillation(mut self, oscillation: Oscillation) -> Self {
        self.oscillation = oscillation;
        self
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_envelope(mut self, envelope: Envelope, tol: f64) -> Self {
        self.envelope = Some(envelope);
        self.truncation_tol = tol;
        self
    }

    pub fn with_width_floor(mut self, floor: f64) -> Self {
        self.width_floor = floor;
        self
    }

    pub fn with_panel_order(mut self, order: usize) -> Self {
        self.panel_order = order;
        self
    }

    /// Finite interval after truncation of infinite ends.
    pub fn truncated_interval(&self) -> Result<(f64, f64)> {
        let (mut a, mut b) = self.interval;
        if !(a < b) || a.is_nan() || b.is_nan() {
            return Err(Error::domain(format!("empty interval [{a}, {b}]")));
        }
        if a.is_infinite() || b.is_infinite() {
            let env = self
                .envelope
                .ok_or_else(|| Error::domain("infinite interval needs a decay envelope"))?;
            let x = truncation_point(env, self.truncation_tol);
            let reach = self
                .singular_points
                .iter()
                .fold(0.0f64, |m, s| m.max(s.abs() + 1.0));
            let x = x.max(reach);
            if a.is_infinite() {
                a = -x;
            }
            if b.is_infinite() {
                b = x;
            }
            if !(a < b) {
                return Err(Error::domain("truncated interval is empty"));
            }
        }
        Ok((a, b))
    }

    /// Panel breakpoints: strictly increasing, first and last equal to the
    /// truncated interval ends, every interior singular point a vertex.
    pub fn mesh(&self) -> Result<Vec<f64>> {
        Ok(self.mesh_breaks(false)?.iter().map(Break::x).collect())
    }

    /// Breakpoints stored relative to the singular point they grade toward.
    /// With `exact_offsets` the width floor is absolute at every singular
    /// point; otherwise it is at least `64ε|s|` so that vertices stay
    /// distinct in `x`.
    fn mesh_breaks(&self, exact_offsets: bool) -> Result<Vec<Break>> {
        let (a, b) = self.truncated_interval()?;
        if !(self.grading_ratio > 0.0 && self.grading_ratio < 1.0) {
            return Err(Error::domain("grading ratio must lie in (0, 1)"));
        }
        let scale = a.abs().max(b.abs()).max(1.0);
        let mut breaks: Vec<(f64, bool)> = vec![(a, false), (b, false)];
        for &s in &self.singular_points {
            if s >= a && s <= b {
                breaks.push((s, true));
            }
        }
        breaks.sort_by(|p, q| p.0.total_cmp(&q.0));
        // Merge duplicates, keeping the singular flag.
        let mut merged: Vec<(f64, bool)> = Vec::with_capacity(breaks.len());
        for (x, sing) in breaks {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 |= sing,
                _ => merged.push((x, sing)),
            }
        }
        let max_width = self.max_panel_fraction * (b - a);
        let cap = |x: f64| self.oscillation.half_wavelength(x).min(max_width);
        let grow = 1.0 / self.grading_ratio - 1.0;

        let mut mesh = vec![Break::at(merged[0].0)];
        for pair in merged.windows(2) {
            let (p, sp) = pair[0];
            let (q, sq) = pair[1];
            let floor_at = |s: f64| {
                let floor = self.width_floor * scale;
                if exact_offsets {
                    floor
                } else {
                    floor.max(64.0 * f64::EPSILON * s.abs())
                }
            };
            let piece: Vec<Break> = match (sp, sq) {
                (true, true) => {
                    let m = 0.5 * (p + q);
                    let mut left = march(p, m, Some(floor_at(p)), grow, &cap, self.max_panels)?;
                    let mut right = march(q, m, Some(floor_at(q)), grow, &cap, self.max_panels)?;
                    // Both halves end at the midpoint; keep the right one's.
                    right.reverse();
                    left.pop();
                    left.extend(right);
                    left
                }
                (true, false) => march(p, q, Some(floor_at(p)), grow, &cap, self.max_panels)?,
                (false, true) => {
                    let mut v = march(q, p, Some(floor_at(q)), grow, &cap, self.max_panels)?;
                    v.reverse();
                    v
                }
                (false, false) => march(p, q, None, grow, &cap, self.max_panels)?,
            };
            mesh.extend_from_slice(&piece[1..]);
            if mesh.len() > self.max_panels + 1 {
                return Err(Error::NotConverged {
                    err_est: f64::NAN,
                    tol: self.abs_tol,
                    context: format!("mesh exceeds {} panels", self.max_panels),
                });
            }
        }
        Ok(mesh)
    }
}

/// Breakpoints from `from` to `to` (either direction). With a floor the
/// panels grow geometrically away from `from`; every panel is also capped by
/// `cap`, evaluated at both of its ends.
fn march(
    from: f64,
    to: f64,
    floor: Option<f64>,
    grow: f64,
    cap: &dyn Fn(f64) -> f64,
    max: usize,
) -> Result<Vec<Break>> {
    let dir = if to >= from { 1.0 } else { -1.0 };
    let len = (to - from).abs();
    // Graded pieces keep offsets from the singular point `from` exactly.
    let anchor = if floor.is_some() { from } else { 0.0 };
    let at = |d: f64| {
        if floor.is_some() {
            Break {
                anchor,
                offset: dir * d,
            }
        } else {
            Break::at(from + dir * d)
        }
    };
    let end = if floor.is_some() {
        Break {
            anchor,
            offset: to - from,
        }
    } else {
        Break::at(to)
    };
    let mut pts = vec![at(0.0)];
    let mut d = 0.0;
    if let Some(fl) = floor {
        let first = fl.min(0.5 * len);
        if first > 0.0 && first < len {
            d = first;
            pts.push(at(d));
        }
    }
    while d < len {
        let x = from + dir * d;
        let mut step = cap(x);
        if floor.is_some() {
            step = step.min(grow * d);
        }
        step = step.min(cap(x + dir * step));
        if !(step > 0.0) {
            // The cap vanishes only at isolated points (x = 0 for Laguerre);
            // fall back to geometric growth there.
            step = if d > 0.0 { grow * d } else { len };
        }
        if d + step >= len {
            pts.push(end);
            break;
        }
        d += step;
        pts.push(at(d));
        if pts.len() > max {
            return Err(Error::NotConverged {
                err_est: f64::NAN,
                tol: 0.0,
                context: format!("mesh exceeds {max} panels"),
            });
        }
    }
    if pts.last().unwrap().x() != to {
        pts.push(end);
    }
    Ok(pts)
}

/// Mesh vertex `anchor + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Break {
    anchor: f64,
    offset: f64,
}

impl Break {
    fn at(x: f64) -> Self {
        Break {
            anchor: x,
            offset: 0.0,
        }
    }

    fn x(&self) -> f64 {
        self.anchor + self.offset
    }
}

/// Quadrature node `x = anchor + offset`, where `anchor` is the singular
/// point the panel is graded toward (or the panel's left end) and `offset`
/// is exact to working precision relative to itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    pub x: f64,
    pub anchor: f64,
    pub offset: f64,
}

impl QuadNode {
    /// `x − c`, exact when `c` is this node's anchor.
    pub fn offset_from(&self, c: f64) -> f64 {
        if self.anchor == c {
            self.offset
        } else {
            self.x - c
        }
    }
}

/// Panel `[lo, hi]` in a common frame: `(anchor, offset_lo, offset_hi)`.
fn panel_frame(l: Break, r: Break) -> (f64, f64, f64) {
    if l.anchor == r.anchor {
        (l.anchor, l.offset, r.offset)
    } else {
        let xl = l.x();
        (xl, 0.0, r.x() - xl)
    }
}

/// Result of a vector-valued integration: one entry per component.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorIntegral {
    pub values: Vec<f64>,
    pub err_est: Vec<f64>,
    pub converged: Vec<bool>,
    pub panels: usize,
}

fn pairwise_sum(parts: &mut [Vec<f64>]) -> Vec<f64> {
    match parts.len() {
        0 => Vec::new(),
        1 => std::mem::take(&mut parts[0]),
        n => {
            let (l, r) = parts.split_at_mut(n / 2);
            let mut a = pairwise_sum(l);
            let b = pairwise_sum(r);
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        }
    }
}

/// Integrate `dim` components over `mesh` with an `order`-point rule.
fn composite_sum<F>(dim: usize, f: &F, mesh: &[Break], order: usize) -> Result<Vec<f64>>
where
    F: Fn(QuadNode, &mut [f64]) + Sync,
{
    let rule = reference_legendre(order);
    let panels = mesh.len() - 1;
    let chunks: Vec<(usize, usize)> = (0..panels)
        .step_by(CHUNK)
        .map(|s| (s, (s + CHUNK).min(panels)))
        .collect();
    let partial: Result<Vec<Vec<f64>>> = chunks
        .par_iter()
        .map(|&(s, e)| {
            let mut acc = vec![0.0; dim];
            let mut buf = vec![0.0; dim];
            for i in s..e {
                let (anchor, lo, hi) = panel_frame(mesh[i], mesh[i + 1]);
                let half = 0.5 * (hi - lo);
                let mid = 0.5 * (hi + lo);
                for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                    let offset = mid + half * t;
                    let x = anchor + offset;
                    f(QuadNode { x, anchor, offset }, &mut buf);
                    let hw = half * w;
                    for (a, &v) in acc.iter_mut().zip(&buf) {
                        if !v.is_finite() {
                            return Err(Error::NonFinite { x });
                        }
                        *a += hw * v;
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut partial = partial?;
    Ok(pairwise_sum(&mut partial))
}

fn refine(mesh: &[Break]) -> Vec<Break> {
    let mut out = Vec::with_capacity(2 * mesh.len());
    for w in mesh.windows(2) {
        out.push(w[0]);
        let (anchor, lo, hi) = panel_frame(w[0], w[1]);
        out.push(Break {
            anchor,
            offset: 0.5 * (lo + hi),
        });
    }
    out.push(*mesh.last().unwrap());
    out
}

/// Integrate a vector-valued integrand `f(x, out)` that writes `dim` values.
///
/// Each component carries its own error estimate and convergence flag; the
/// mesh is bisected up to `max_refinements` times while any component misses
/// its tolerance. Only non-finite integrand values and mesh overflow are
/// hard errors.
pub fn integrate_vector<F>(
    dim: usize,
    f: F,
    plan: &SingularOscillatoryPlan,
) -> Result<VectorIntegral>
where
    F: Fn(f64, &mut [f64]) + Sync,
{
    integrate_on(
        dim,
        |node: QuadNode, out: &mut [f64]| f(node.x, out),
        plan,
        false,
    )
}

/// As [`integrate_vector`], with the integrand receiving each node's exact
/// offset from the singular point its panel is graded toward.
pub fn integrate_vector_nodes<F>(
    dim: usize,
    f: F,
    plan: &SingularOscillatoryPlan,
) -> Result<VectorIntegral>
where
    F: Fn(QuadNode, &mut [f64]) + Sync,
{
    integrate_on(dim, f, plan, true)
}

fn integrate_on<F>(
    dim: usize,
    f: F,
    plan: &SingularOscillatoryPlan,
    exact_offsets: bool,
) -> Result<VectorIntegral>
where
    F: Fn(QuadNode, &mut [f64]) + Sync,
{
    let mut mesh = plan.mesh_breaks(exact_offsets)?;
    if !exact_offsets {
        mesh = mesh
            .iter()
            .map(|b| Break {
                anchor: 0.0,
                offset: b.x(),
            })
            .collect();
    }
    let lo = plan.panel_order;
    let hi = plan.panel_order + 8;
    let mut round = 0;
    loop {
        let coarse = composite_sum(dim, &f, &mesh, lo)?;
        let fine = composite_sum(dim, &f, &mesh, hi)?;
        let err_est: Vec<f64> = coarse
            .iter()
            .zip(&fine)
            .map(|(c, v)| (c - v).abs())
            .collect();
        let converged: Vec<bool> = fine
            .iter()
            .zip(&err_est)
            .map(|(v, e)| *e <= plan.abs_tol.max(plan.rel_tol * v.abs()))
            .collect();
        let all = converged.iter().all(|&c| c);
        if all || round >= plan.max_refinements || 2 * mesh.len() > plan.max_panels {
            return Ok(VectorIntegral {
                values: fine,
                err_est,
                converged,
                panels: mesh.len() - 1,
            });
        }
        mesh = refine(&mesh);
        round += 1;
    }
}

/// Scalar integral with its error estimate; fails with `NotConverged` when
/// the tolerance is still missed after refinement.
pub fn integrate_singular_oscillatory<F>(f: F, plan: &SingularOscillatoryPlan) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync,
{
    let r = integrate_vector(1, |x, out: &mut [f64]| out[0] = f(x), plan)?;
    let (v, e) = (r.values[0], r.err_est[0]);
    if r.converged[0] {
        Ok((v, e))
    } else {
        Err(Error::NotConverged {
            err_est: e,
            tol: plan.abs_tol.max(plan.rel_tol * v.abs()),
            context: format!(
                "{} panels on [{}, {}]",
                r.panels, plan.interval.0, plan.interval.1
            ),
        })
    }
}
