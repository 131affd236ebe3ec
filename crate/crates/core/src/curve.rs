//! Adaptively refined polylines and length functionals on them.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform pieces laid down before adaptive bisection starts.
const INITIAL_PIECES: usize = 16;
const MAX_DEPTH: u32 = 40;

/// A polyline approximating a curve, with a per-segment bound on how much
/// length the chord misses.
///
/// The polyline length is a lower bound for the length of any curve through
/// the same points, so refinement can only increase it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    points: Vec<C>,
    errors: Vec<f64>,
    closed: bool,
    refined: bool,
}

impl SampledCurve {
    fn validate(points: &[C], closed: bool) -> Result<()> {
        if points.len() < 2 {
            return Err(Error::Degenerate {
                what: "sampled curve",
                detail: format!("needs at least 2 points, got {}", points.len()),
            });
        }
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Degenerate {
                    what: "sampled curve",
                    detail: format!("repeated consecutive point {}", w[0]),
                });
            }
        }
        if points.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Degenerate {
                what: "sampled curve",
                detail: "non-finite point".into(),
            });
        }
        if closed && points.len() < 3 {
            return Err(Error::Degenerate {
                what: "sampled curve",
                detail: "a closed curve needs at least 3 points".into(),
            });
        }
        Ok(())
    }

    fn segment_count(n: usize, closed: bool) -> usize {
        if closed {
            n
        } else {
            n - 1
        }
    }

    /// Raw samples with no error information. Length functionals that need a
    /// certified error reject such curves.
    pub fn from_points(points: Vec<C>, closed: bool) -> Result<Self> {
        Self::validate(&points, closed)?;
        let m = Self::segment_count(points.len(), closed);
        Ok(Self {
            points,
            errors: vec![f64::INFINITY; m],
            closed,
            refined: false,
        })
    }

    /// An exact polyline (straight edges), so every segment error is zero.
    pub fn polyline(points: Vec<C>, closed: bool) -> Result<Self> {
        Self::with_errors(points, None, closed)
    }

    /// Samples with explicit per-segment error bounds.
    pub fn with_errors(points: Vec<C>, errors: Option<Vec<f64>>, closed: bool) -> Result<Self> {
        Self::validate(&points, closed)?;
        let m = Self::segment_count(points.len(), closed);
        let errors = errors.unwrap_or_else(|| vec![0.0; m]);
        if errors.len() != m || errors.iter().any(|e| !(*e >= 0.0)) {
            return Err(Error::Degenerate {
                what: "sampled curve",
                detail: "error bounds must be nonnegative, one per segment".into(),
            });
        }
        Ok(Self {
            points,
            errors,
            closed,
            refined: true,
        })
    }

    /// Adaptive sampling of `f` on `[t0, t1]` until the estimated missing
    /// length is below `tol`.
    ///
    /// A chord split at its parameter midpoint gains length `δ`; for a smooth
    /// curve the chord error falls by four per halving, so what remains after
    /// the split is about `δ/3`.
    pub fn from_parametric(
        f: impl Fn(f64) -> C,
        t0: f64,
        t1: f64,
        tol: f64,
        closed: bool,
    ) -> Result<Self> {
        let (points, errors, _) = refine_parametric(&f, t0, t1, tol);
        let (points, errors) = if closed {
            let mut p = points;
            let e = errors;
            // The last sample repeats the first; the closing segment takes its place.
            p.pop();
            (p, e)
        } else {
            (points, errors)
        };
        Self::with_errors(points, Some(errors), closed)
    }

    pub fn points(&self) -> &[C] {
        &self.points
    }

    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_refined(&self) -> bool {
        self.refined
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Segment endpoints, including the closing segment of a closed curve.
    pub fn segments(&self) -> impl Iterator<Item = (C, C)> + '_ {
        let n = self.points.len();
        (0..Self::segment_count(n, self.closed)).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    pub fn euclidean_length(&self) -> f64 {
        self.segments().map(|(a, b)| (b - a).norm()).sum()
    }

    /// Upper bound on the length missing from [`Self::euclidean_length`].
    pub fn error_bound(&self) -> f64 {
        self.errors.iter().sum()
    }

    pub fn first(&self) -> C {
        self.points[0]
    }

    pub fn last(&self) -> C {
        *self.points.last().unwrap()
    }

    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.points.reverse();
        if self.closed {
            // Segment i of the reversed curve runs from p[n-1-i] to p[n-2-i].
            let n = self.points.len();
            out.errors = (0..n).map(|i| self.errors[(2 * n - 2 - i) % n]).collect();
        } else {
            out.errors.reverse();
        }
        out
    }

    /// Smallest distance between points of two curves' segments, sampled at
    /// the vertices.
    pub fn vertex_distance(&self, other: &SampledCurve) -> f64 {
        let mut best = f64::INFINITY;
        for &p in &self.points {
            for (a, b) in other.segments() {
                best = best.min(crate::planar::point_segment_distance(p, a, b));
            }
        }
        best
    }

    /// Map every point, keeping the error bounds scaled by `lipschitz`.
    pub fn map(&self, f: impl Fn(C) -> C, lipschitz: f64) -> Result<Self> {
        let pts: Vec<C> = self.points.iter().map(|&z| f(z)).collect();
        let mut out = Self::with_errors(pts, Some(self.errors.iter().map(|e| e * lipschitz).collect()), self.closed)?;
        out.refined = self.refined;
        Ok(out)
    }
}

/// Samples, per-segment errors and parameters of an adaptive refinement.
pub type Refinement = (Vec<C>, Vec<f64>, Vec<f64>);

/// Adaptive bisection of a parametric curve on `[t0, t1]`; returns points,
/// per-segment error estimates and the parameter of every point.
pub fn refine_parametric(f: &impl Fn(f64) -> C, t0: f64, t1: f64, tol: f64) -> Refinement {
    let span = t1 - t0;
    let mut points = vec![f(t0)];
    let mut params = vec![t0];
    let mut errors = Vec::new();
    for k in 0..INITIAL_PIECES {
        let a = t0 + span * k as f64 / INITIAL_PIECES as f64;
        let b = t0 + span * (k + 1) as f64 / INITIAL_PIECES as f64;
        let (fa, fb) = (*points.last().unwrap(), f(b));
        let budget = tol / INITIAL_PIECES as f64;
        bisect(f, (a, fa), (b, fb), budget, 0, &mut points, &mut errors, &mut params);
    }
    (points, errors, params)
}

#[allow(clippy::too_many_arguments)]
fn bisect(
    f: &impl Fn(f64) -> C,
    (a, fa): (f64, C),
    (b, fb): (f64, C),
    budget: f64,
    depth: u32,
    points: &mut Vec<C>,
    errors: &mut Vec<f64>,
    params: &mut Vec<f64>,
) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    let chord = (fb - fa).norm();
    let split = (fm - fa).norm() + (fb - fm).norm();
    let remaining = (split - chord).max(0.0) / 3.0;
    if remaining <= budget || depth >= MAX_DEPTH {
        for (t, p, e) in [(m, fm, remaining / 2.0), (b, fb, remaining / 2.0)] {
            points.push(p);
            params.push(t);
            errors.push(e);
        }
        return;
    }
    bisect(f, (a, fa), (m, fm), budget / 2.0, depth + 1, points, errors, params);
    bisect(f, (m, fm), (b, fb), budget / 2.0, depth + 1, points, errors, params);
}

/// A length with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Length {
    pub value: f64,
    pub error: f64,
}

/// Adaptive quadrature of a smooth integrand on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let out = quadrature::integrate(f, a, b, tol);
    (out.integral, out.error_estimate)
}

/// Spherical length element `2|dz|/(1+|z|²)`.
#[inline]
pub fn sigma_density(z: C) -> f64 {
    2.0 / (1.0 + z.norm_sqr())
}

/// Spherical length of the straight segment `[p, q]` by quadrature.
pub fn sigma_segment_length(p: C, q: C, tol: f64) -> (f64, f64) {
    let d = q - p;
    let len = d.norm();
    integrate(|t| len * sigma_density(p + d * t), 0.0, 1.0, tol)
}

/// Spherical length of a parametric curve with derivative `df`.
pub fn sigma_parametric_length(
    f: impl Fn(f64) -> C,
    df: impl Fn(f64) -> C,
    t0: f64,
    t1: f64,
    tol: f64,
) -> (f64, f64) {
    integrate(|t| df(t).norm() * sigma_density(f(t)), t0, t1, tol)
}

/// Quadrature tolerance per segment in [`spherical_curve_length`].
pub const SEGMENT_QUAD_TOL: f64 = 1e-13;

/// Spherical length of a refined curve: quadrature of the density along each
/// segment, plus the curve's own chord error weighted by the density bound 2.
pub fn spherical_curve_length(c: &SampledCurve) -> Result<Length> {
    if !c.is_refined() {
        return Err(Error::Precondition(
            "spherical length needs a refined curve with error bounds".into(),
        ));
    }
    let mut value = 0.0;
    let mut error = 0.0;
    for ((p, q), e) in c.segments().zip(c.errors()) {
        let (v, qe) = sigma_segment_length(p, q, SEGMENT_QUAD_TOL);
        value += v;
        error += qe + 2.0 * e;
    }
    Ok(Length { value, error })
}
