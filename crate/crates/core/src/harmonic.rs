//! Harmonic measure of `(-1, 1)` in subdomains of the upper half-plane, its
//! level curves, and a walk-on-spheres estimator used as an independent
//! oracle.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::{fixing_pm_one, halfplane_slit_map, MapPipeline, MapStep};
use crate::curve::{refine_parametric, SampledCurve};
use crate::error::{Error, Result};
use crate::hyperbolic::Model;
use crate::moebius::{circline_image, Circline};
use crate::planar;

/// Absorbing shell width of the walk-on-spheres estimator.
pub const WOS_SHELL: f64 = 1e-6;
/// Walks that wander this far are counted as exits through `∞`.
pub const WOS_FAR: f64 = 1e7;
const WOS_CHUNK: u64 = 1 << 14;
/// Largest residual the corrector accepts once Newton stops improving.
const STALL_FLOOR: f64 = 1e-8;

/// Harmonic measure of `(a, b)` in the upper half-plane: the angle the
/// segment subtends at `z`, over `π`.
pub fn omega_halfplane(z: C, a: f64, b: f64) -> Result<f64> {
    if !(z.im > 0.0) {
        return Err(Error::domain("upper half-plane", z));
    }
    if !(a < b) {
        return Err(Error::Precondition(format!("empty interval ({a}, {b})")));
    }
    Ok((((z - b).arg() - (z - a).arg()) / PI).clamp(0.0, 1.0))
}

/// `2π(1 - α) / sin(πα)`.
pub fn conjecture_bound(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Precondition(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(2.0 * PI * (1.0 - alpha) / (PI * alpha).sin())
}

/// A boundary piece of `U` other than the real axis, with an exact or
/// conservative distance function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum BoundaryPiece {
    Segment { a: C, b: C },
    /// Circular arc from angle `start` sweeping by `sweep` (signed).
    Arc { center: C, radius: f64, start: f64, sweep: f64 },
    /// A sampled curve; distances are reduced by `pad`, which bounds how far
    /// the curve strays from its chords.
    Polyline { points: Vec<C>, pad: f64, lo: C, hi: C },
}

impl BoundaryPiece {
    fn arc_through(p: C, mid: C, q: C, center: C, radius: f64) -> Self {
        let a0 = (p - center).arg();
        let unwrap = |z: C| {
            let mut t = (z - center).arg() - a0;
            while t <= -PI {
                t += TAU;
            }
            while t > PI {
                t -= TAU;
            }
            t
        };
        let (tm, tq) = (unwrap(mid), unwrap(q));
        // Pick the sweep direction that passes through the midpoint.
        let sweep = if (tm > 0.0) == (tq > 0.0) && tm.abs() < tq.abs() {
            tq
        } else if tq > 0.0 {
            tq - TAU
        } else {
            tq + TAU
        };
        BoundaryPiece::Arc { center, radius, start: a0, sweep }
    }

    fn polyline(points: Vec<C>, pad: f64) -> Self {
        let lo = C::new(
            points.iter().map(|z| z.re).fold(f64::INFINITY, f64::min),
            points.iter().map(|z| z.im).fold(f64::INFINITY, f64::min),
        );
        let hi = C::new(
            points.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max),
            points.iter().map(|z| z.im).fold(f64::NEG_INFINITY, f64::max),
        );
        BoundaryPiece::Polyline { points, pad, lo, hi }
    }

    pub fn distance(&self, z: C) -> f64 {
        match self {
            BoundaryPiece::Segment { a, b } => planar::point_segment_distance(z, *a, *b),
            BoundaryPiece::Arc { center, radius, start, sweep } => {
                let mut t = (z - center).arg() - start;
                if *sweep < 0.0 {
                    t = -t;
                }
                let t = t.rem_euclid(TAU);
                if t <= sweep.abs() {
                    ((z - center).norm() - radius).abs()
                } else {
                    let p = center + C::from_polar(*radius, *start);
                    let q = center + C::from_polar(*radius, start + sweep);
                    (z - p).norm().min((z - q).norm())
                }
            }
            BoundaryPiece::Polyline { points, pad, lo, hi } => {
                let dx = (lo.re - z.re).max(z.re - hi.re).max(0.0);
                let dy = (lo.im - z.im).max(z.im - hi.im).max(0.0);
                let boxed = dx.hypot(dy);
                if boxed > 1.0 {
                    return boxed - pad;
                }
                points
                    .windows(2)
                    .map(|w| planar::point_segment_distance(z, w[0], w[1]))
                    .fold(f64::INFINITY, f64::min)
                    - pad
            }
        }
    }
}

/// The harmonic-measure problem `ω(·, (-1, 1), U)` with `U = F(ℍ)` and
/// `F((a′, b′)) = (-1, 1)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HMProblem {
    label: String,
    pipeline: MapPipeline,
    a: f64,
    b: f64,
    pieces: Vec<BoundaryPiece>,
}

fn certify_base(base: C, what: &str) -> Result<()> {
    if base.im.abs() > 1e-9 || base.re.abs() <= 1.0 {
        return Err(Error::Hypothesis(format!(
            "{what} meets the real axis at {base}, inside [-1, 1]"
        )));
    }
    Ok(())
}

impl HMProblem {
    fn from_parts(label: String, pipeline: MapPipeline, pieces: Vec<BoundaryPiece>) -> Result<Self> {
        let a = pipeline.real_preimage(-1.0)?;
        let b = pipeline.real_preimage(1.0)?;
        if !(a < b) {
            return Err(Error::Hypothesis(format!("preimages {a}, {b} of ±1 are out of order")));
        }
        Ok(Self { label, pipeline, a, b, pieces })
    }

    /// `U = ℍ`.
    pub fn half_plane() -> Self {
        Self {
            label: "half-plane".into(),
            pipeline: MapPipeline::identity(Model::HalfPlane),
            a: -1.0,
            b: 1.0,
            pieces: Vec::new(),
        }
    }

    /// `U = ℍ ∖ {x0 + iy : 0 < y ≤ h}`.
    pub fn slit(x0: f64, h: f64) -> Result<Self> {
        let p = halfplane_slit_map(x0, h)?;
        let pieces = vec![BoundaryPiece::Segment { a: C::new(x0, 0.0), b: C::new(x0, h) }];
        Self::from_parts(format!("slit(x0={x0},h={h})"), p, pieces)
    }

    /// Image of a slit domain under the real Möbius map fixing `±1` with
    /// parameter `k`: the slit becomes a circular arc.
    pub fn perturbed_slit(x0: f64, h: f64, k: f64) -> Result<Self> {
        let m = fixing_pm_one(k)?;
        let s = halfplane_slit_map(x0, h)?;
        let p = s.then(MapStep::Moebius { map: m });
        let img = |z: C| m.apply_to(z).ok_or_else(|| Error::domain("perturbation (pole)", z));
        let (base, mid, tip) = (img(C::new(x0, 0.0))?, img(C::new(x0, h / 2.0))?, img(C::new(x0, h))?);
        certify_base(base, "perturbed slit")?;
        let line = Circline::line_through(C::new(x0, 0.0), C::new(x0, 1.0))?;
        let piece = match circline_image(&m, &line).center_radius() {
            Some((center, radius)) => BoundaryPiece::arc_through(base, mid, tip, center, radius),
            None => BoundaryPiece::Segment { a: base, b: tip },
        };
        Self::from_parts(format!("perturbed(x0={x0},h={h},k={k})"), p, vec![piece])
    }

    /// Two slits: first `ℍ ∖ slit(x2, h2)`, then the slit map at `x1`
    /// bends the second slit into a curve.
    pub fn double_slit(x1: f64, h1: f64, x2: f64, h2: f64) -> Result<Self> {
        let inner = halfplane_slit_map(x2, h2)?;
        let outer = halfplane_slit_map(x1, h1)?;
        let p = MapPipeline::new(Model::HalfPlane, [inner.steps(), outer.steps()].concat());
        let bend = |y: f64| outer.eval(C::new(x2, y.max(1e-300))).unwrap_or(C::new(f64::NAN, f64::NAN));
        let base = outer.boundary_value(C::new(x2, 0.0))?;
        certify_base(base, "second slit")?;
        let (mut pts, errs, _) = refine_parametric(&bend, 0.0, h2, 1e-9);
        pts[0] = base;
        // A chord's sagitta is at most twice its length excess, so this pads
        // every chord conservatively.
        let pad = errs
            .iter()
            .zip(pts.windows(2))
            .map(|(e, w)| (3.0 * e * (w[1] - w[0]).norm()).sqrt())
            .fold(0.0, f64::max);
        let pieces = vec![
            BoundaryPiece::Segment { a: C::new(x1, 0.0), b: C::new(x1, h1) },
            BoundaryPiece::polyline(pts, pad),
        ];
        Self::from_parts(format!("double(x1={x1},h1={h1},x2={x2},h2={h2})"), p, pieces)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn pipeline(&self) -> &MapPipeline {
        &self.pipeline
    }

    pub fn marked_preimages(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn pieces(&self) -> &[BoundaryPiece] {
        &self.pieces
    }

    pub fn is_half_plane(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Distance from `z` to `∂U`; never larger than the true distance.
    pub fn boundary_distance(&self, z: C) -> f64 {
        self.pieces.iter().map(|p| p.distance(z)).fold(z.im, f64::min)
    }

    fn distance_to_pieces(&self, z: C) -> f64 {
        self.pieces.iter().map(|p| p.distance(z)).fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, z: C) -> bool {
        z.im > 0.0 && self.distance_to_pieces(z) > 0.0 && self.pipeline.inverse(z).is_ok()
    }

    /// Point of the level curve `ω = α` over the preimage arc, `θ ∈ [0, 1]`
    /// running from `-1` to `1`.
    pub fn level_point(&self, alpha: f64, theta: f64) -> Result<C> {
        let z = halfplane_level_point(alpha, theta, self.a, self.b);
        if theta <= 0.0 || theta >= 1.0 {
            self.pipeline.boundary_value(z)
        } else {
            self.pipeline.eval(z)
        }
    }
}

/// Point of the arc through `a, b` on which `(a, b)` subtends angle `πα`,
/// with `θ = 0` at `a` and `θ = 1` at `b`.
pub fn halfplane_level_point(alpha: f64, theta: f64, a: f64, b: f64) -> C {
    let m = (a + b) / 2.0;
    let r = (b - a) / 2.0;
    let cot = 1.0 / (PI * alpha).tan();
    let big = 1.0 / (PI * alpha).sin();
    let center = C::new(0.0, cot);
    // Angles from the center to +1 and -1, the arc passing above.
    let start = (C::new(-1.0, 0.0) - center).arg();
    let end = (C::new(1.0, 0.0) - center).arg();
    let mut sweep = end - start;
    if sweep > 0.0 {
        sweep -= TAU;
    }
    let u = center + C::from_polar(big, start + theta * sweep);
    C::new(m, 0.0) + r * u
}

/// `ω(z, (-1, 1), U) = ω_ℍ(F⁻¹ z, a′, b′)`.
pub fn omega_pipeline(p: &HMProblem, z: C) -> Result<f64> {
    let zeta = p.pipeline.inverse(z)?;
    omega_halfplane(zeta, p.a, p.b)
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Walk-on-spheres estimate of `ω(z)`.
///
/// Walk `j` of probe `point_index` draws from the ChaCha stream
/// `(seed, point_index)` at a word offset fixed by its chunk, so results do
/// not depend on the thread count.
pub fn omega_wos(p: &HMProblem, z: C, n: u64, seed: u64, point_index: u64) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::Precondition("walk-on-spheres needs at least one sample".into()));
    }
    if !(p.boundary_distance(z) > 0.0) {
        return Err(Error::domain("harmonic-measure domain", z));
    }
    let chunks = n.div_ceil(WOS_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(point_index);
            rng.set_word_pos((chunk as u128) << 40);
            let count = WOS_CHUNK.min(n - chunk * WOS_CHUNK);
            (0..count).filter(|_| walk(p, z, &mut rng)).count() as u64
        })
        .sum();
    let value = hits as f64 / n as f64;
    Ok(Estimate {
        value,
        stderr: (value * (1.0 - value) / n as f64).sqrt(),
        samples: n,
    })
}

fn walk(p: &HMProblem, start: C, rng: &mut ChaCha8Rng) -> bool {
    let mut z = start;
    loop {
        let other = p.distance_to_pieces(z);
        let r = z.im.min(other);
        if r < WOS_SHELL {
            return z.im <= other && z.re.abs() < 1.0;
        }
        if z.norm_sqr() > WOS_FAR * WOS_FAR {
            return false;
        }
        let (s, c) = (rng.gen::<f64>() * TAU).sin_cos();
        z += C::new(r * c, r * s);
    }
}

/// Tolerances for [`trace_level_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Target for the length missing from the traced polyline.
    pub length_tol: f64,
    /// Corrector stops once `|ω - α|` is below this.
    pub corrector_tol: f64,
    /// Tracing stops this close to `±1`.
    pub landing_tol: f64,
    pub max_step: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            length_tol: 1e-7,
            corrector_tol: 1e-10,
            landing_tol: 1e-6,
            max_step: 0.01,
        }
    }
}

/// A traced level curve `γ_α`, oriented from `-1` to `1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelCurve {
    pub alpha: f64,
    pub curve: SampledCurve,
    pub landing: (C, C),
    /// Polyline length plus the estimated missing length.
    pub length_estimate: f64,
    pub error_bound: f64,
    /// Largest `|ω - α|` over the traced points, endpoints excluded.
    pub max_residual: f64,
}

impl LevelCurve {
    pub fn polyline_length(&self) -> f64 {
        self.curve.euclidean_length()
    }

    /// CSV with columns `t, re, im, omega_residual` (`t` is arc length).
    pub fn write_csv(&self, p: &HMProblem, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
        w.write_record(["t", "re", "im", "omega_residual"]).map_err(|e| Error::Io(e.to_string()))?;
        let mut t = 0.0;
        let pts = self.curve.points();
        for (i, &z) in pts.iter().enumerate() {
            if i > 0 {
                t += (z - pts[i - 1]).norm();
            }
            let res = if i == 0 || i + 1 == pts.len() {
                0.0
            } else {
                omega_pipeline(p, z).map(|o| o - self.alpha).unwrap_or(f64::NAN)
            };
            w.write_record([t, z.re, z.im, res].map(|x| format!("{x:.17e}")))
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Tracer<'a> {
    p: &'a HMProblem,
    alpha: f64,
    opts: TraceOptions,
}

impl Tracer<'_> {
    fn omega(&self, z: C) -> Result<f64> {
        omega_pipeline(self.p, z)
    }

    fn fd_step(&self, z: C) -> f64 {
        let scale = (z - 1.0)
            .norm()
            .min((z + 1.0).norm())
            .min(self.p.boundary_distance(z))
            .min(1.0);
        1e-6 * scale
    }

    fn gradient(&self, z: C) -> Result<C> {
        let h = self.fd_step(z);
        let dx = (self.omega(z + h)? - self.omega(z - h)?) / (2.0 * h);
        let dy = (self.omega(z + C::new(0.0, h))? - self.omega(z - C::new(0.0, h))?) / (2.0 * h);
        Ok(C::new(dx, dy))
    }

    fn correct(&self, mut z: C) -> Result<C> {
        let mut best = (f64::INFINITY, z);
        let mut stalled = 0;
        for _ in 0..50 {
            let r = self.omega(z)? - self.alpha;
            if r.abs() < self.opts.corrector_tol {
                return Ok(z);
            }
            if r.abs() < 0.5 * best.0 {
                stalled = 0;
            } else {
                stalled += 1;
            }
            if r.abs() < best.0 {
                best = (r.abs(), z);
            }
            // Next to ±1 the inverse map cannot resolve ω below about 1e-10;
            // a stalled iteration at that floor is accepted.
            if stalled >= 3 && best.0 < STALL_FLOOR {
                return Ok(best.1);
            }
            let g = self.gradient(z)?;
            if g.norm_sqr() == 0.0 {
                break;
            }
            let step = g * (r / g.norm_sqr());
            if step.norm() < 4.0 * f64::EPSILON * z.norm().max(1e-300) {
                return Ok(z);
            }
            z -= step;
        }
        Err(Error::Tracing {
            reason: format!("corrector did not converge near {z}"),
            last_good: vec![],
        })
    }

    /// Starting point over the middle of `(a′, b′)`, found by bisection on
    /// the height of the vertical ray in the source.
    fn start(&self) -> Result<C> {
        let (a, b) = self.p.marked_preimages();
        let m = (a + b) / 2.0;
        let r = (b - a) / 2.0;
        let om = |t: f64| omega_halfplane(C::new(m, t), a, b).unwrap_or(0.0);
        let (mut lo, mut hi) = (1e-12 * r, r);
        while om(hi) > self.alpha {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if om(mid) > self.alpha {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = self.p.pipeline.eval(C::new(m, 0.5 * (lo + hi)))?;
        self.correct(z)
    }

    /// Traces from `z0` until within the landing tolerance of `end`.
    /// Returns the points after `z0` and their segment errors.
    fn branch(&self, z0: C, end: C, per_length: f64) -> Result<(Vec<C>, Vec<f64>)> {
        let mut pts = vec![z0];
        let mut errs = Vec::new();
        // `i∇ω` keeps `{ω > α}` on the right, so it heads towards `+1`.
        let turn = C::new(0.0, end.re.signum());
        let g0 = self.gradient(z0)?;
        let mut tau = turn * g0 / g0.norm();
        let mut h = self.opts.max_step;
        let fail = |pts: &[C], reason: String| Error::Tracing {
            reason,
            last_good: pts.iter().map(|z| (z.re, z.im)).collect(),
        };
        for _ in 0..2_000_000 {
            let z = *pts.last().unwrap();
            let d_end = (z - end).norm();
            if d_end < self.opts.landing_tol {
                pts.push(end);
                errs.push(0.0);
                pts.remove(0);
                return Ok((pts, errs));
            }
            let step = h
                .min(self.opts.max_step)
                .min(d_end / 4.0)
                .min(self.p.boundary_distance(z) / 2.0);
            if step < 1e-15 {
                return Err(fail(&pts, format!("step size underflow at {z}")));
            }
            let attempt = (|| -> Result<(C, C)> {
                let zc = self.correct(z + tau * step)?;
                let zm = self.correct((z + zc) / 2.0)?;
                Ok((zc, zm))
            })();
            let (zc, zm) = match attempt {
                Ok(v) => v,
                Err(_) => {
                    h = step / 2.0;
                    continue;
                }
            };
            let chord = (zc - z).norm();
            let excess = ((zm - z).norm() + (zc - zm).norm() - chord).max(0.0);
            let remaining = excess / 3.0;
            let turned = planar::dot(zc - z, tau) <= 0.0;
            if (remaining > per_length * chord || turned) && step > 1e-12 {
                h = step / 2.0;
                continue;
            }
            pts.push(zm);
            pts.push(zc);
            errs.push(remaining / 2.0);
            errs.push(remaining / 2.0);
            let g = self.gradient(zc)?;
            tau = turn * g / g.norm();
            h = if remaining < per_length * chord / 8.0 { step * 1.5 } else { step };
        }
        Err(fail(&pts, "step budget exhausted".into()))
    }
}

/// Predictor-corrector trace of `γ_α = {ω = α}` from `-1` to `1`.
pub fn trace_level_curve(p: &HMProblem, alpha: f64, opts: TraceOptions) -> Result<LevelCurve> {
    let bound = conjecture_bound(alpha)?;
    let t = Tracer { p, alpha, opts };
    let z0 = t.start()?;
    let per_length = opts.length_tol / bound.max(2.0);
    let (left, left_err) = t.branch(z0, C::new(-1.0, 0.0), per_length)?;
    let (right, right_err) = t.branch(z0, C::new(1.0, 0.0), per_length)?;
    let mut pts: Vec<C> = left.iter().rev().copied().collect();
    let mut errs: Vec<f64> = left_err.iter().rev().copied().collect();
    pts.push(z0);
    pts.extend(right.iter().copied());
    errs.extend(right_err.iter().copied());
    let max_residual = pts[1..pts.len() - 1]
        .iter()
        .map(|&z| omega_pipeline(p, z).map(|o| (o - alpha).abs()).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let curve = SampledCurve::with_errors(pts, Some(errs), false)?;
    let error_bound = curve.error_bound();
    Ok(LevelCurve {
        alpha,
        length_estimate: curve.euclidean_length() + error_bound,
        error_bound,
        max_residual,
        landing: (curve.first(), curve.last()),
        curve,
    })
}

/// `γ_α` by refinement of its exact parametrization `F(arc)`; an oracle for
/// the tracer.
pub fn level_curve_by_parametrization(p: &HMProblem, alpha: f64, tol: f64) -> Result<SampledCurve> {
    conjecture_bound(alpha)?;
    let f = |t: f64| p.level_point(alpha, t).unwrap_or(C::new(f64::NAN, f64::NAN));
    SampledCurve::from_parametric(f, 0.0, 1.0, tol, false)
}

/// `B = {ω > 1/2}`, the pipeline image of the half-disc on `(a′, b′)`,
/// bounded by `[-1, 1]` and the geodesic `γ = γ_{1/2}`.
#[derive(Debug, Clone)]
pub struct RegionB {
    problem: HMProblem,
    pub gamma: LevelCurve,
}

pub fn region_b(p: &HMProblem, opts: TraceOptions) -> Result<RegionB> {
    Ok(RegionB {
        problem: p.clone(),
        gamma: trace_level_curve(p, 0.5, opts)?,
    })
}

impl RegionB {
    pub fn contains(&self, z: C) -> Result<bool> {
        let zeta = self.problem.pipeline.inverse(z)?;
        let (a, b) = self.problem.marked_preimages();
        Ok((zeta - C::new((a + b) / 2.0, 0.0)).norm() < (b - a) / 2.0)
    }

    /// Largest distance of the pulled-back `γ` from the semicircle on `(a′, b′)`.
    pub fn geodesic_residual(&self) -> Result<f64> {
        let (a, b) = self.problem.marked_preimages();
        let (m, r) = ((a + b) / 2.0, (b - a) / 2.0);
        let pts = self.gamma.curve.points();
        let mut worst = 0.0f64;
        for &z in &pts[1..pts.len() - 1] {
            let zeta = self.problem.pipeline.inverse(z)?;
            worst = worst.max(((zeta - C::new(m, 0.0)).norm() - r).abs());
        }
        Ok(worst)
    }
}

/// SVG of level curves over the boundary pieces of `U`.
pub fn level_curves_svg(p: &HMProblem, curves: &[LevelCurve]) -> String {
    let (w, hgt) = (800.0, 500.0);
    let (xmin, xmax, ymax) = (-4.0, 4.0, 5.0);
    let sx = |x: f64| (x - xmin) / (xmax - xmin) * w;
    let sy = |y: f64| hgt - y / ymax * hgt;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{hgt}" viewBox="0 0 {w} {hgt}">"#);
    let _ = writeln!(s, r#"<line x1="0" y1="{}" x2="{w}" y2="{}" stroke="black"/>"#, sy(0.0), sy(0.0));
    let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="red" stroke-width="3"/>"#, sx(-1.0), sy(0.0), sx(1.0), sy(0.0));
    for piece in &p.pieces {
        let pts: Vec<C> = match piece {
            BoundaryPiece::Segment { a, b } => vec![*a, *b],
            BoundaryPiece::Arc { center, radius, start, sweep } => (0..=64)
                .map(|k| center + C::from_polar(*radius, start + sweep * k as f64 / 64.0))
                .collect(),
            BoundaryPiece::Polyline { points, .. } => points.clone(),
        };
        let _ = writeln!(s, r#"<polyline fill="none" stroke="black" stroke-width="2" points="{}"/>"#, svg_points(&pts, &sx, &sy));
    }
    for c in curves {
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="steelblue" points="{}"><title>alpha={}</title></polyline>"#,
            svg_points(c.curve.points(), &sx, &sy),
            c.alpha
        );
    }
    s.push_str("</svg>\n");
    s
}

pub(crate) fn svg_points(pts: &[C], sx: &impl Fn(f64) -> f64, sy: &impl Fn(f64) -> f64) -> String {
    pts.iter()
        .map(|z| format!("{:.3},{:.3}", sx(z.re), sy(z.im)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Uniform probe points inside `U`, away from the boundary, for oracle
/// comparisons.
pub fn probe_points(p: &HMProblem, count: usize, seed: u64) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = C::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.05..2.0));
        if p.boundary_distance(z) > 0.05 && p.contains(z) {
            out.push(z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn families() -> Vec<HMProblem> {
        vec![
            HMProblem::slit(2.0, 1.0).unwrap(),
            HMProblem::slit(-1.5, 0.4).unwrap(),
            HMProblem::perturbed_slit(2.0, 1.0, 0.5).unwrap(),
            HMProblem::double_slit(-2.0, 0.8, 1.7, 1.2).unwrap(),
        ]
    }

    #[test]
    fn omega_halfplane_examples() {
        assert_abs_diff_eq!(omega_halfplane(c(0.0, 1.0), -1.0, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(omega_halfplane(c(0.0, 1e-9), -1.0, 1.0).unwrap() > 1.0 - 1e-8);
        // Dot-product angle oracle.
        let (u, v) = (c(-1.0, -2.0), c(1.0, -2.0));
        let angle = ((u.re * v.re + u.im * v.im) / (u.norm() * v.norm())).acos();
        assert_abs_diff_eq!(angle, 0.6f64.acos(), epsilon = 1e-15);
        assert_abs_diff_eq!(omega_halfplane(c(0.0, 2.0), -1.0, 1.0).unwrap(), angle / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(0.6f64.acos() / PI, 0.29517, epsilon = 1e-5);
        assert!(omega_halfplane(c(0.0, -1.0), -1.0, 1.0).is_err());
    }

    #[test]
    fn conjecture_bound_examples() {
        assert_abs_diff_eq!(conjecture_bound(0.5).unwrap(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(conjecture_bound(0.25).unwrap(), 1.5 * PI / (PI / 4.0).sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(conjecture_bound(0.25).unwrap(), 6.6643, epsilon = 1e-4);
        assert!(conjecture_bound(1e-9).unwrap() > 1e9);
        assert!(conjecture_bound(0.0).is_err() && conjecture_bound(1.0).is_err());
    }

    #[test]
    fn omega_pipeline_examples() {
        let h = HMProblem::half_plane();
        for z in [c(0.3, 0.2), c(-4.0, 1.0), c(0.0, 7.0)] {
            assert_eq!(omega_pipeline(&h, z).unwrap(), omega_halfplane(z, -1.0, 1.0).unwrap());
        }
        let s = HMProblem::slit(2.0, 1.0).unwrap();
        let w = omega_pipeline(&s, c(0.0, 1.0)).unwrap();
        assert!(w < 0.5);
        assert!(omega_pipeline(&s, c(2.01, 0.5)).unwrap() < 0.05);
        assert!(omega_pipeline(&s, c(2.0, 1.0 + 1e-7)).unwrap() < 1e-3);
    }

    #[test]
    fn monotonicity_in_the_domain() {
        let h = HMProblem::half_plane();
        for p in families() {
            for z in probe_points(&p, 30, 3) {
                assert!(omega_pipeline(&p, z).unwrap() < omega_pipeline(&h, z).unwrap(), "{} at {z}", p.label());
            }
        }
    }

    #[test]
    fn arc_distance() {
        let arc = BoundaryPiece::arc_through(c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, 0.0), 1.0);
        assert_abs_diff_eq!(arc.distance(c(0.0, 0.5)), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(arc.distance(c(0.0, -0.5)), (1.25f64).sqrt(), epsilon = 1e-15);
        let other = BoundaryPiece::arc_through(c(-1.0, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0), 1.0);
        assert_abs_diff_eq!(other.distance(c(0.0, 2.0)), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn distances_are_conservative() {
        for p in families() {
            // Dense samples of the true boundary pieces, through the pipeline.
            let (a, b) = p.marked_preimages();
            let mut boundary = Vec::new();
            for k in 0..4000 {
                let x = -30.0 + 60.0 * k as f64 / 4000.0;
                if x > a && x < b {
                    continue;
                }
                if let Ok(v) = p.pipeline().boundary_value(c(x, 0.0)) {
                    boundary.push(v);
                }
            }
            for z in probe_points(&p, 50, 9) {
                let d = p.boundary_distance(z);
                let sampled = boundary.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min);
                assert!(d <= sampled + 1e-9, "{}: {d} > {sampled}", p.label());
            }
        }
    }

    #[test]
    fn wos_examples() {
        let h = HMProblem::half_plane();
        let e = omega_wos(&h, c(0.0, 1.0), 100_000, 42, 0).unwrap();
        assert!((e.value - 0.5).abs() < 3.0 * e.stderr + 1e-12);
        let again = omega_wos(&h, c(0.0, 1.0), 100_000, 42, 0).unwrap();
        assert_eq!(e, again);
        assert!(omega_wos(&h, c(0.0, 1.0), 0, 42, 0).is_err());
        for p in families() {
            for (i, z) in probe_points(&p, 3, 5).into_iter().enumerate() {
                let e = omega_wos(&p, z, 50_000, 7, i as u64).unwrap();
                let exact = omega_pipeline(&p, z).unwrap();
                assert!((e.value - exact).abs() < 4.0 * e.stderr + 1e-3, "{}: {} vs {exact}", p.label(), e.value);
            }
        }
    }

    #[test]
    fn level_curve_half_plane_is_the_semicircle() {
        let h = HMProblem::half_plane();
        let l = trace_level_curve(&h, 0.5, TraceOptions::default()).unwrap();
        assert!((l.length_estimate - PI).abs() < 1e-6, "{}", l.length_estimate - PI);
        assert!(l.max_residual < 1e-10);
        for z in l.curve.points() {
            assert!((z.norm() - 1.0).abs() < 1e-9);
        }
        assert_eq!(l.landing, (c(-1.0, 0.0), c(1.0, 0.0)));
    }

    #[test]
    fn level_curves_match_closed_form_and_parametrization() {
        let h = HMProblem::half_plane();
        for alpha in [0.1, 0.25, 0.75, 0.9] {
            let l = trace_level_curve(&h, alpha, TraceOptions::default()).unwrap();
            let exact = 2.0 * (PI - PI * alpha) / (PI * alpha).sin();
            assert!((l.length_estimate - exact).abs() < 1e-6, "{alpha}: {}", l.length_estimate - exact);
        }
        let s = HMProblem::slit(2.0, 1.0).unwrap();
        let l = trace_level_curve(&s, 0.5, TraceOptions::default()).unwrap();
        let oracle = level_curve_by_parametrization(&s, 0.5, 1e-9).unwrap();
        let ol = oracle.euclidean_length() + oracle.error_bound();
        assert!((l.length_estimate - ol).abs() < 1e-6, "{} vs {ol}", l.length_estimate);
        assert!(l.length_estimate < PI);
    }

    #[test]
    fn refinement_converges() {
        let s = HMProblem::slit(2.0, 1.0).unwrap();
        let mut last = 0.0;
        for tol in [1e-5, 1e-6, 1e-7] {
            let opts = TraceOptions { length_tol: tol, ..TraceOptions::default() };
            let l = trace_level_curve(&s, 0.4, opts).unwrap();
            if last > 0.0 {
                assert!((l.length_estimate - last).abs() < 10.0 * tol);
            }
            last = l.length_estimate;
        }
    }

    #[test]
    fn level_curves_nest() {
        let p = HMProblem::perturbed_slit(2.0, 1.0, 0.5).unwrap();
        let lo = trace_level_curve(&p, 0.3, TraceOptions::default()).unwrap();
        let hi = trace_level_curve(&p, 0.6, TraceOptions::default()).unwrap();
        assert!(lo.max_residual < 1e-9 && hi.max_residual < 1e-9);
        for &z in hi.curve.points() {
            if (z - 1.0).norm().min((z + 1.0).norm()) > 1e-4 {
                assert!((omega_pipeline(&p, z).unwrap() - 0.6).abs() < 1e-10);
            }
        }
        for &z in &hi.curve.points()[1..hi.curve.len() - 1] {
            assert!(omega_pipeline(&p, z).unwrap() > 0.3);
        }
        let inner = SampledCurve::polyline(hi.curve.points()[5..hi.curve.len() - 5].to_vec(), false).unwrap();
        let outer = SampledCurve::polyline(lo.curve.points()[5..lo.curve.len() - 5].to_vec(), false).unwrap();
        assert!(inner.vertex_distance(&outer) > 0.0);
    }

    #[test]
    fn region_b_examples() {
        let h = HMProblem::half_plane();
        let b = region_b(&h, TraceOptions::default()).unwrap();
        let s = region_b(&HMProblem::slit(2.0, 1.0).unwrap(), TraceOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.001..3.0));
            assert_eq!(b.contains(z).unwrap(), z.norm() < 1.0);
            let p = &s.problem;
            if p.contains(z) {
                assert_eq!(s.contains(z).unwrap(), omega_pipeline(p, z).unwrap() > 0.5);
            }
        }
        assert!(s.geodesic_residual().unwrap() < 1e-8);
    }

    #[test]
    fn csv_and_svg_export() {
        let h = HMProblem::half_plane();
        let l = trace_level_curve(&h, 0.5, TraceOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gamma.csv");
        l.write_csv(&h, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,re,im,omega_residual"));
        assert_eq!(text.lines().count(), l.curve.len() + 1);
        let svg = level_curves_svg(&HMProblem::slit(2.0, 1.0).unwrap(), &[l]);
        assert!(svg.contains("<polyline") && svg.ends_with("</svg>\n"));
    }
}
