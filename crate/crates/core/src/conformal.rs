//! Pipelines of elementary conformal maps: slit-plane and slit-half-plane
//! uniformizers, Schwarz reflection, conformal reflections across level
//! curves, and the hyperbolic metric of the two-slit plane.
//!
//! Every multivalued step carries an explicit branch cut and an anchor pair,
//! so evaluation is a pure function of the input. Inverses are certified by a
//! forward round trip and a source-domain membership test.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::hyperbolic::{golden_section_min, hyperbolic_distance, Model};
use crate::moebius::MoebiusMap;

/// Relative tolerance of the forward check certifying an inverse.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

/// Real boundary points are evaluated at this height above the axis, which
/// selects the limit from the domain without moving the value.
const BOUNDARY_NUDGE: f64 = 1e-200;

/// Offset used for boundary preimages of real points.
const PREIMAGE_NUDGE: f64 = 1e-13;

/// One elementary conformal step.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapStep {
    Moebius {
        map: MoebiusMap,
    },
    Affine {
        s: C,
        t: C,
    },
    /// `z ↦ z²`, injective on the half-plane `{arg z ∈ (φ, φ + π)}`.
    Square {
        domain_angle: f64,
    },
    /// Square root with its cut on the ray `arg = cut_angle`; of the two
    /// branches, the one sending `anchor` to `anchor_image` is used.
    Sqrt {
        cut_angle: f64,
        anchor: C,
        anchor_image: C,
    },
    /// `z ↦ 2z/(1 + z²)`, the disc onto `ℂ ∖ ((-∞,-1] ∪ [1,∞))`.
    JoukowskiLike,
}

/// Square root with the cut on the ray `arg = cut`, returning the branch
/// whose argument lies in `(cut/2, cut/2 + π)`.
fn sqrt_cut(z: C, cut: f64) -> Result<C> {
    if z.norm() == 0.0 {
        return Ok(z);
    }
    let rel = (z * C::from_polar(1.0, -cut)).arg();
    if rel == 0.0 {
        return Err(Error::Branch(format!("{z} lies on the cut at angle {cut}")));
    }
    let turned = if rel < 0.0 { rel + 2.0 * PI } else { rel };
    Ok(C::from_polar(z.norm().sqrt(), (cut + turned) / 2.0))
}

impl MapStep {
    pub fn eval(&self, z: C) -> Result<C> {
        match *self {
            MapStep::Moebius { map } => map
                .apply_to(z)
                .ok_or_else(|| Error::domain("Moebius step (pole)", z)),
            MapStep::Affine { s, t } => Ok(s * z + t),
            MapStep::Square { .. } => Ok(z * z),
            MapStep::Sqrt {
                cut_angle,
                anchor,
                anchor_image,
            } => {
                let w = sqrt_cut(z, cut_angle)?;
                let a = sqrt_cut(anchor, cut_angle)?;
                Ok(if (a - anchor_image).norm() <= (a + anchor_image).norm() {
                    w
                } else {
                    -w
                })
            }
            MapStep::JoukowskiLike => {
                let den = 1.0 + z * z;
                if den.norm() == 0.0 {
                    return Err(Error::domain("Joukowski step (pole)", z));
                }
                Ok(2.0 * z / den)
            }
        }
    }

    /// Candidate inverse; the pipeline certifies it.
    pub fn inverse(&self, w: C) -> Result<C> {
        match *self {
            MapStep::Moebius { map } => map
                .inverse()
                .apply_to(w)
                .ok_or_else(|| Error::inversion(w, "Moebius preimage is ∞")),
            MapStep::Affine { s, t } => Ok((w - t) / s),
            MapStep::Square { domain_angle } => sqrt_cut(w, 2.0 * domain_angle),
            MapStep::Sqrt { .. } => Ok(w * w),
            MapStep::JoukowskiLike => Ok(w / (1.0 + (1.0 - w * w).sqrt())),
        }
    }

    pub fn derivative(&self, z: C) -> Result<C> {
        match *self {
            MapStep::Moebius { map } => map.derivative(z),
            MapStep::Affine { s, .. } => Ok(s),
            MapStep::Square { .. } => Ok(2.0 * z),
            MapStep::Sqrt { .. } => {
                let w = self.eval(z)?;
                Ok(0.5 / w)
            }
            MapStep::JoukowskiLike => {
                let den = 1.0 + z * z;
                Ok(2.0 * (1.0 - z * z) / (den * den))
            }
        }
    }
}

/// A composite conformal map `steps[n-1] ∘ … ∘ steps[0]` on a disc or
/// half-plane source.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapPipeline {
    steps: Vec<MapStep>,
    source: Model,
    /// Source boundary points with their limiting images.
    #[serde(default)]
    boundary_marks: Vec<(C, C)>,
}

impl MapPipeline {
    pub fn identity(source: Model) -> Self {
        Self {
            steps: Vec::new(),
            source,
            boundary_marks: Vec::new(),
        }
    }

    pub fn new(source: Model, steps: Vec<MapStep>) -> Self {
        Self {
            steps,
            source,
            boundary_marks: Vec::new(),
        }
    }

    pub fn with_marks(mut self, marks: Vec<(C, C)>) -> Self {
        self.boundary_marks = marks;
        self
    }

    /// Appends a step applied after the current ones.
    pub fn then(mut self, step: MapStep) -> Self {
        self.steps.push(step);
        self
    }

    /// `other ∘ self`; marks are carried through `other`.
    pub fn followed_by(&self, other: &MapPipeline) -> Result<Self> {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().copied());
        let out = Self::new(self.source, steps);
        let marks = self
            .boundary_marks
            .iter()
            .map(|&(s, _)| Ok((s, out.boundary_value(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(out.with_marks(marks))
    }

    /// `self ∘ m` for a Möbius map `m` preserving the source domain; marks
    /// are pulled back through `m`.
    pub fn precomposed(&self, m: &MoebiusMap) -> Result<Self> {
        let mut steps = vec![MapStep::Moebius { map: *m }];
        steps.extend(self.steps.iter().copied());
        let inv = m.inverse();
        let marks = self
            .boundary_marks
            .iter()
            .map(|&(s, t)| {
                inv.apply_to(s)
                    .map(|p| (p, t))
                    .ok_or_else(|| Error::inversion(s, "mark pulled back to ∞"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(self.source, steps).with_marks(marks))
    }

    pub fn steps(&self) -> &[MapStep] {
        &self.steps
    }

    pub fn source(&self) -> Model {
        self.source
    }

    pub fn boundary_marks(&self) -> &[(C, C)] {
        &self.boundary_marks
    }

    pub fn eval(&self, z: C) -> Result<C> {
        self.steps.iter().try_fold(z, |acc, s| s.eval(acc))
    }

    pub fn derivative(&self, z: C) -> Result<C> {
        let mut acc = z;
        let mut d = C::new(1.0, 0.0);
        for s in &self.steps {
            d *= s.derivative(acc)?;
            acc = s.eval(acc)?;
        }
        Ok(d)
    }

    pub fn inverse(&self, w: C) -> Result<C> {
        let z = self
            .steps
            .iter()
            .rev()
            .try_fold(w, |acc, s| s.inverse(acc))?;
        if !self.source.contains(z) {
            return Err(Error::inversion(w, format!("preimage {z} is outside the source")));
        }
        let back = self.eval(z)?;
        if (back - w).norm() > ROUND_TRIP_TOL * w.norm().max(1.0) {
            return Err(Error::inversion(
                w,
                format!("round trip lands at {back}; not in the certified image"),
            ));
        }
        Ok(z)
    }

    /// Limit of the map at a source boundary point, taken from inside.
    pub fn boundary_value(&self, s: C) -> Result<C> {
        match self.source {
            Model::HalfPlane => self.eval(C::new(s.re, BOUNDARY_NUDGE)),
            Model::Disc => radial_limit(self, s / s.norm()),
        }
    }

    /// Source boundary point over a real target boundary point `v`, for
    /// half-plane pipelines whose image touches the real axis at `v`.
    pub fn real_preimage(&self, v: f64) -> Result<f64> {
        let nudge = PREIMAGE_NUDGE * v.abs().max(1.0);
        Ok(self.inverse(C::new(v, nudge))?.re)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }
}

/// Radial limit at the unit-modulus point `zeta`, sampled at
/// `ζ(1 - 2⁻ᵏ)`, `k = 1..40`, with one Richardson step on the tail.
pub fn radial_limit(p: &MapPipeline, zeta: C) -> Result<C> {
    let mut vals = Vec::with_capacity(40);
    for k in 1..=40 {
        let r = 1.0 - 0.5f64.powi(k);
        match p.eval(zeta * r) {
            Ok(v) => vals.push(v),
            Err(_) => break,
        }
    }
    match vals.len() {
        0 => Err(Error::domain("radial limit", zeta)),
        1 => Ok(vals[0]),
        n => Ok(2.0 * vals[n - 1] - vals[n - 2]),
    }
}

/// Conformal map of the disc onto `ℂ ∖ ((-∞,a] ∪ [b,∞))` with real Taylor
/// coefficients, `g(-1) = a` and `g(1) = b`.
pub fn two_slit_map(a: f64, b: f64) -> Result<MapPipeline> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Precondition(format!("two-slit map needs a < b, got a = {a}, b = {b}")));
    }
    Ok(MapPipeline::new(
        Model::Disc,
        vec![
            MapStep::JoukowskiLike,
            MapStep::Affine {
                s: C::new((b - a) / 2.0, 0.0),
                t: C::new((a + b) / 2.0, 0.0),
            },
        ],
    )
    .with_marks(vec![(C::new(-1.0, 0.0), C::new(a, 0.0)), (C::new(1.0, 0.0), C::new(b, 0.0))]))
}

/// Source point of the slit map over the real boundary point `v`.
fn slit_preimage(x0: f64, h: f64, v: f64) -> f64 {
    let u = v - x0;
    x0 + u.signum() * (u * u + h * h).sqrt()
}

/// Conformal map of the half-plane onto `ℍ ∖ {x0 + iy : 0 < y ≤ h}`:
/// translate, square, subtract `h²`, take the upper square root, translate
/// back. Marks record the preimages of `-1, 0, 1`.
pub fn halfplane_slit_map(x0: f64, h: f64) -> Result<MapPipeline> {
    if x0.abs() <= 1.0 {
        return Err(Error::Hypothesis(format!(
            "slit base {x0} lies in [-1, 1]; the boundary outside (-1, 1) would be disconnected"
        )));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Precondition(format!("slit height must be positive, got {h}")));
    }
    let one = C::new(1.0, 0.0);
    let steps = vec![
        MapStep::Affine { s: one, t: C::new(-x0, 0.0) },
        MapStep::Square { domain_angle: 0.0 },
        MapStep::Affine { s: one, t: C::new(-h * h, 0.0) },
        MapStep::Sqrt {
            cut_angle: 0.0,
            anchor: C::new(-1.0, 0.0),
            anchor_image: C::new(0.0, 1.0),
        },
        MapStep::Affine { s: one, t: C::new(x0, 0.0) },
    ];
    let marks = [-1.0, 0.0, 1.0]
        .iter()
        .map(|&v| (C::new(slit_preimage(x0, h, v), 0.0), C::new(v, 0.0)))
        .collect();
    Ok(MapPipeline::new(Model::HalfPlane, steps).with_marks(marks))
}

/// Real Möbius map fixing `±1` and preserving the half-plane:
/// `z ↦ ((1+k)z + (1-k)) / ((1-k)z + (1+k))`, `k > 0`.
pub fn fixing_pm_one(k: f64) -> Result<MoebiusMap> {
    if !(k > 0.0) {
        return Err(Error::Precondition(format!("perturbation parameter must be positive, got {k}")));
    }
    MoebiusMap::new(
        C::new(1.0 + k, 0.0),
        C::new(1.0 - k, 0.0),
        C::new(1.0 - k, 0.0),
        C::new(1.0 + k, 0.0),
    )
}

/// Precomposes a half-plane pipeline with the real Möbius map sending
/// `-1, 0, 1` to the preimages of `-1, 0, 1`, so that the result fixes all
/// three boundary points.
pub fn normalize_three_marks(p: &MapPipeline) -> Result<MapPipeline> {
    if p.source() != Model::HalfPlane {
        return Err(Error::Precondition("three-mark normalization needs a half-plane source".into()));
    }
    let pre = [-1.0, 0.0, 1.0]
        .iter()
        .map(|&v| p.real_preimage(v))
        .collect::<Result<Vec<_>>>()?;
    if !(pre[0] < pre[1] && pre[1] < pre[2]) {
        return Err(Error::Precondition(format!("boundary preimages {pre:?} are not increasing")));
    }
    let t = MoebiusMap::from_three_points(
        [C::new(-1.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)],
        [C::new(pre[0], 0.0), C::new(pre[1], 0.0), C::new(pre[2], 0.0)],
    )?;
    let mut out = p.precomposed(&t)?;
    out.boundary_marks = [-1.0, 0.0, 1.0].iter().map(|&v| (C::new(v, 0.0), C::new(v, 0.0))).collect();
    Ok(out)
}

/// A half-plane pipeline extended across a real interval by
/// `G(z̄) = conj G(z)`.
#[derive(Debug, Clone)]
pub struct ReflectedPipeline {
    base: MapPipeline,
    arc: (f64, f64),
}

/// Samples along the arc used to check that its image is real.
const REFLECTION_SAMPLES: usize = 257;

pub fn schwarz_reflect_extend(p: &MapPipeline, arc: (f64, f64)) -> Result<ReflectedPipeline> {
    if p.source() != Model::HalfPlane {
        return Err(Error::Reflection("needs a half-plane source".into()));
    }
    let (a, b) = arc;
    if !(a < b) {
        return Err(Error::Reflection(format!("empty interval ({a}, {b})")));
    }
    for k in 1..REFLECTION_SAMPLES {
        let x = a + (b - a) * k as f64 / REFLECTION_SAMPLES as f64;
        let v = p.boundary_value(C::new(x, 0.0))?;
        if v.im.abs() > 1e-9 * v.norm().max(1.0) {
            return Err(Error::Reflection(format!("image of {x} is {v}, not real")));
        }
    }
    Ok(ReflectedPipeline { base: p.clone(), arc })
}

impl ReflectedPipeline {
    pub fn base(&self) -> &MapPipeline {
        &self.base
    }

    pub fn arc(&self) -> (f64, f64) {
        self.arc
    }

    /// Source domain: the half-plane, its mirror, and the open arc.
    pub fn contains(&self, z: C) -> bool {
        z.im != 0.0 || (z.re > self.arc.0 && z.re < self.arc.1)
    }

    pub fn eval(&self, z: C) -> Result<C> {
        if z.im > 0.0 {
            self.base.eval(z)
        } else if z.im < 0.0 {
            Ok(self.base.eval(z.conj())?.conj())
        } else if self.contains(z) {
            Ok(C::new(self.base.boundary_value(z)?.re, 0.0))
        } else {
            Err(Error::domain("reflected pipeline", z))
        }
    }

    pub fn inverse(&self, w: C) -> Result<C> {
        if w.im > 0.0 {
            self.base.inverse(w)
        } else if w.im < 0.0 {
            Ok(self.base.inverse(w.conj())?.conj())
        } else {
            let x = self.base.real_preimage(w.re)?;
            if x > self.arc.0 && x < self.arc.1 {
                Ok(C::new(x, 0.0))
            } else {
                Err(Error::inversion(w, "real point outside the reflected arc"))
            }
        }
    }

    pub fn derivative(&self, z: C) -> Result<C> {
        if z.im >= 0.0 {
            self.base.derivative(C::new(z.re, z.im.max(BOUNDARY_NUDGE)))
        } else {
            Ok(self.base.derivative(z.conj())?.conj())
        }
    }
}

/// Conformal reflection `f = φ ∘ ι ∘ φ⁻¹` across the image `γ` of the
/// semicircle on `(a′, b′)`, where `ι` is the anti-Möbius inversion fixing
/// that semicircle.
#[derive(Debug, Clone)]
pub struct ConformalReflection {
    phi: MapPipeline,
    center: f64,
    radius: f64,
    iota: MoebiusMap,
}

pub fn conformal_reflection_across(phi: &MapPipeline, a: f64, b: f64) -> Result<ConformalReflection> {
    if phi.source() != Model::HalfPlane {
        return Err(Error::Precondition("conformal reflection needs a half-plane source".into()));
    }
    if !(a < b) {
        return Err(Error::Precondition(format!("diameter ({a}, {b}) is empty")));
    }
    let center = (a + b) / 2.0;
    let radius = (b - a) / 2.0;
    let circle = crate::moebius::Circline::circle(C::new(center, 0.0), radius)?;
    Ok(ConformalReflection {
        phi: phi.clone(),
        center,
        radius,
        iota: crate::moebius::reflection_fixing(&circle),
    })
}

impl ConformalReflection {
    pub fn apply(&self, w: C) -> Result<C> {
        let z = self.phi.inverse(w)?;
        let r = self
            .iota
            .apply_to(z)
            .ok_or_else(|| Error::inversion(w, "reflected to ∞"))?;
        self.phi.eval(r)
    }

    /// Point of `γ` at angle `θ ∈ [0, π]` on the source semicircle.
    pub fn gamma_point(&self, theta: f64) -> Result<C> {
        let z = C::new(self.center, 0.0) + C::from_polar(self.radius, theta);
        if theta <= 0.0 || theta >= PI {
            self.phi.boundary_value(z)
        } else {
            self.phi.eval(z)
        }
    }

    /// Whether `w` lies in the region bounded by `γ` and the real interval.
    pub fn in_region(&self, w: C) -> Result<bool> {
        let z = self.phi.inverse(w)?;
        Ok((z - C::new(self.center, 0.0)).norm() < self.radius)
    }

    pub fn source_center_radius(&self) -> (f64, f64) {
        (self.center, self.radius)
    }

    pub fn pipeline(&self) -> &MapPipeline {
        &self.phi
    }

    /// `γ` as a refined curve.
    pub fn gamma_curve(&self, tol: f64) -> Result<SampledCurve> {
        let f = |t: f64| {
            self.gamma_point(t)
                .unwrap_or(C::new(f64::NAN, f64::NAN))
        };
        SampledCurve::from_parametric(f, 0.0, PI, tol, false)
    }
}

/// The two-slit plane `Ω = ℂ ∖ ((-∞,-1] ∪ [1,∞))` and its hyperbolic metric.
pub fn omega_uniformizer() -> MapPipeline {
    two_slit_map(-1.0, 1.0).expect("-1 < 1")
}

pub fn in_two_slit_plane(w: C) -> bool {
    !(w.im == 0.0 && w.re.abs() >= 1.0) && w.re.is_finite() && w.im.is_finite()
}

/// `ρ_Ω(w1, w2) = ρ_𝔻(g⁻¹ w1, g⁻¹ w2)`.
pub fn rho_omega(w1: C, w2: C) -> Result<f64> {
    let g = omega_uniformizer();
    for w in [w1, w2] {
        if !in_two_slit_plane(w) {
            return Err(Error::domain("two-slit plane", w));
        }
    }
    hyperbolic_distance(Model::Disc, g.inverse(w1)?, g.inverse(w2)?)
}

/// `ρ_Ω(w, (-1, 1))`, minimized over the segment in hyperbolic arc length
/// `s` with `x = tanh(s/2)` on the preimage diameter.
pub fn rho_omega_to_segment(w: C) -> Result<f64> {
    if !in_two_slit_plane(w) {
        return Err(Error::domain("two-slit plane", w));
    }
    let zeta = omega_uniformizer().inverse(w)?;
    let dist = |s: f64| {
        hyperbolic_distance(Model::Disc, zeta, C::new((s / 2.0).tanh(), 0.0)).unwrap_or(f64::INFINITY)
    };
    // Bracket around the foot of the perpendicular, whose Klein coordinate is
    // tanh s = 2 Re ζ / (1 + |ζ|²).
    let guess = ((2.0 * zeta.re) / (1.0 + zeta.norm_sqr())).clamp(-1.0 + 1e-16, 1.0 - 1e-16).atanh();
    let (_, d) = golden_section_min(dist, guess - 2.0, guess + 2.0, 1e-12);
    Ok(d)
}
