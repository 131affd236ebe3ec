//! Hyperbolic metric, geodesic segments and convex polygons in the disc and
//! half-plane models.
//!
//! Convexity is decided in the Klein model, where hyperbolic geodesics are
//! Euclidean chords: a subset of the disc is hyperbolically convex exactly
//! when its image under [`klein_map`] is convex.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{cayley_family, Circline, MoebiusMap};
use crate::planar;

/// Distance from the ideal boundary within which a point counts as ideal.
pub const IDEAL_TOL: f64 = 1e-12;

/// Orthogonal carriers with a larger radius are treated as straight lines.
pub const LINE_SWITCH_RADIUS: f64 = 1e6;

/// Relative cross-product tolerance for the Klein convexity test.
pub const CONVEXITY_TOL: f64 = 1e-12;

/// Inner tolerance of the golden-section search for the closest boundary
/// point.
pub const GOLDEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Disc,
    HalfPlane,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Disc => "disc",
            Model::HalfPlane => "half-plane",
        }
    }

    /// Signed distance to the ideal boundary, positive inside.
    fn depth(self, z: C) -> f64 {
        match self {
            Model::Disc => 1.0 - z.norm(),
            Model::HalfPlane => z.im,
        }
    }

    pub fn contains(self, z: C) -> bool {
        self.depth(z) > 0.0
    }
}

fn require_inside(model: Model, z: C) -> Result<()> {
    if model.depth(z) > 0.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(model.name(), z))
    }
}

/// Hyperbolic distance in the disc or the half-plane model.
pub fn hyperbolic_distance(model: Model, z: C, w: C) -> Result<f64> {
    require_inside(model, z)?;
    require_inside(model, w)?;
    let t = match model {
        Model::Disc => ((z - w) / (C::new(1.0, 0.0) - w.conj() * z)).norm(),
        Model::HalfPlane => ((z - w) / (z - w.conj())).norm(),
    };
    Ok(2.0 * t.min(1.0).atanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
enum Shape {
    Line,
    Arc { center: C, radius: f64 },
}

/// A hyperbolic geodesic segment with its Euclidean carrier.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeodesicSegment {
    model: Model,
    p: C,
    q: C,
    ideal: [bool; 2],
    shape: Shape,
}

fn endpoint_kind(model: Model, z: C) -> Result<bool> {
    let depth = model.depth(z);
    if !(z.re.is_finite() && z.im.is_finite()) || depth < -IDEAL_TOL {
        return Err(Error::domain(model.name(), z));
    }
    Ok(depth <= IDEAL_TOL)
}

/// The geodesic segment joining `z` to `w`. Endpoints on the ideal boundary
/// are accepted and flagged.
pub fn geodesic_between(model: Model, z: C, w: C) -> Result<GeodesicSegment> {
    let ideal = [endpoint_kind(model, z)?, endpoint_kind(model, w)?];
    if (z - w).norm() == 0.0 {
        return Err(Error::Degenerate {
            what: "geodesic segment",
            detail: format!("endpoints coincide at {z}"),
        });
    }
    let shape = match model {
        Model::Disc => {
            // Orthogonal circle: 2 Re(m̄ z) = 1 + |z|² for both endpoints.
            let det = 2.0 * planar::cross(z, w);
            if det == 0.0 {
                Shape::Line
            } else {
                let rz = (1.0 + z.norm_sqr()) / 2.0;
                let rw = (1.0 + w.norm_sqr()) / 2.0;
                let mx = (rz * w.im - rw * z.im) / (det / 2.0);
                let my = (z.re * rw - w.re * rz) / (det / 2.0);
                let center = C::new(mx, my);
                let radius = (center.norm_sqr() - 1.0).max(0.0).sqrt();
                if radius > LINE_SWITCH_RADIUS || !radius.is_finite() {
                    Shape::Line
                } else {
                    Shape::Arc { center, radius }
                }
            }
        }
        Model::HalfPlane => {
            let dx = z.re - w.re;
            if dx == 0.0 {
                Shape::Line
            } else {
                let x0 = (z.norm_sqr() - w.norm_sqr()) / (2.0 * dx);
                let center = C::new(x0, 0.0);
                let radius = (z - center).norm();
                if radius > LINE_SWITCH_RADIUS || !radius.is_finite() {
                    Shape::Line
                } else {
                    Shape::Arc { center, radius }
                }
            }
        }
    };
    Ok(GeodesicSegment {
        model,
        p: z,
        q: w,
        ideal,
        shape,
    })
}

impl GeodesicSegment {
    pub fn model(&self) -> Model {
        self.model
    }

    pub fn endpoints(&self) -> (C, C) {
        (self.p, self.q)
    }

    pub fn ideal_flags(&self) -> [bool; 2] {
        self.ideal
    }

    /// Center and radius of a circular carrier.
    pub fn center_radius(&self) -> Option<(C, f64)> {
        match self.shape {
            Shape::Arc { center, radius } => Some((center, radius)),
            Shape::Line => None,
        }
    }

    pub fn carrier(&self) -> Circline {
        match self.shape {
            Shape::Arc { center, radius } => Circline::circle(center, radius)
                .expect("positive radius"),
            Shape::Line => Circline::line_through(self.p, self.q).expect("distinct endpoints"),
        }
    }

    /// Signed angle swept from `p` to `q` around the carrier's center.
    fn sweep(&self, center: C) -> f64 {
        let u = self.p - center;
        let v = self.q - center;
        planar::cross(u, v).atan2(planar::dot(u, v))
    }

    /// Exact Euclidean arc length: radius × subtended angle for circular
    /// carriers, chord length for straight ones.
    pub fn euclidean_length(&self) -> f64 {
        match self.shape {
            Shape::Line => (self.q - self.p).norm(),
            Shape::Arc { center, radius } => radius * self.sweep(center).abs(),
        }
    }

    /// Point at Euclidean arc-length fraction `t ∈ [0, 1]`.
    pub fn point_at(&self, t: f64) -> C {
        match self.shape {
            Shape::Line => self.p + (self.q - self.p) * t,
            Shape::Arc { center, radius } => {
                let start = (self.p - center).arg();
                center + C::from_polar(radius, start + t * self.sweep(center))
            }
        }
    }

    /// Unit tangent at `t`, oriented from `p` towards `q`.
    pub fn tangent_at(&self, t: f64) -> C {
        match self.shape {
            Shape::Line => (self.q - self.p) / (self.q - self.p).norm(),
            Shape::Arc { center, .. } => {
                let sweep = self.sweep(center);
                let r = self.point_at(t) - center;
                let dir = C::new(0.0, sweep.signum()) * r;
                dir / dir.norm()
            }
        }
    }

    pub fn sample(&self, n: usize) -> Vec<C> {
        let n = n.max(2);
        (0..n)
            .map(|k| self.point_at(k as f64 / (n - 1) as f64))
            .collect()
    }
}

/// Length of a geodesic segment (free-function form).
pub fn segment_euclidean_length(s: &GeodesicSegment) -> f64 {
    s.euclidean_length()
}

/// The Klein map `z ↦ 2z/(1+|z|²)` from the Poincaré disc to the Klein disc.
pub fn klein_map(z: C) -> Result<C> {
    if z.norm() > 1.0 + IDEAL_TOL {
        return Err(Error::domain("disc", z));
    }
    Ok(z * (2.0 / (1.0 + z.norm_sqr())))
}

/// Inverse of [`klein_map`]: `x ↦ x / (1 + √(1 - |x|²))`.
pub fn klein_inverse(x: C) -> Result<C> {
    let r2 = x.norm_sqr();
    if r2 > (1.0 + IDEAL_TOL) * (1.0 + IDEAL_TOL) {
        return Err(Error::domain("Klein disc", x));
    }
    Ok(x / (1.0 + (1.0 - r2).max(0.0).sqrt()))
}

/// A closed polygon whose edges are hyperbolic geodesic segments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperbolicPolygon {
    model: Model,
    vertices: Vec<C>,
}

impl HyperbolicPolygon {
    pub fn new(model: Model, vertices: Vec<C>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Degenerate {
                what: "hyperbolic polygon",
                detail: format!("needs at least 3 vertices, got {}", vertices.len()),
            });
        }
        for &v in &vertices {
            require_inside(model, v)?;
        }
        let m = vertices.len();
        for i in 0..m {
            if vertices[i] == vertices[(i + 1) % m] {
                return Err(Error::Degenerate {
                    what: "hyperbolic polygon",
                    detail: format!("repeated consecutive vertex {}", vertices[i]),
                });
            }
        }
        Ok(Self { model, vertices })
    }

    /// Polygon in the disc whose Klein image has the given vertices.
    pub fn from_klein(klein_vertices: &[C]) -> Result<Self> {
        let v = klein_vertices
            .iter()
            .map(|&x| klein_inverse(x))
            .collect::<Result<Vec<_>>>()?;
        Self::new(Model::Disc, v)
    }

    /// Regular polygon with vertices `radius · e^{2πik/m + iφ}` in the disc.
    pub fn regular(m: usize, radius: f64, phase: f64) -> Result<Self> {
        let v = (0..m)
            .map(|k| C::from_polar(radius, phase + 2.0 * PI * k as f64 / m as f64))
            .collect();
        Self::new(Model::Disc, v)
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn vertices(&self) -> &[C] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The same polygon in the disc model (half-plane input is carried over
    /// by the Cayley map `w ↦ (w - i)/(w + i)`).
    pub fn to_disc(&self) -> HyperbolicPolygon {
        match self.model {
            Model::Disc => self.clone(),
            Model::HalfPlane => {
                let m = cayley_family(1.0).expect("n = 1 is valid");
                self.map_to(Model::Disc, &m)
            }
        }
    }

    fn map_to(&self, model: Model, m: &MoebiusMap) -> HyperbolicPolygon {
        HyperbolicPolygon {
            model,
            vertices: self
                .vertices
                .iter()
                .map(|&z| m.apply_to(z).expect("isometry keeps vertices finite"))
                .collect(),
        }
    }

    /// Image under a disc automorphism.
    pub fn mapped(&self, m: &MoebiusMap) -> HyperbolicPolygon {
        self.map_to(self.model, m)
    }

    pub fn edges(&self) -> Vec<GeodesicSegment> {
        let m = self.vertices.len();
        (0..m)
            .map(|i| {
                geodesic_between(self.model, self.vertices[i], self.vertices[(i + 1) % m])
                    .expect("validated vertices")
            })
            .collect()
    }

    /// Klein-model vertices (disc model only; half-plane polygons are
    /// transported first).
    pub fn klein_vertices(&self) -> Vec<C> {
        self.to_disc()
            .vertices
            .iter()
            .map(|&z| klein_map(z).expect("inside the disc"))
            .collect()
    }

    /// Euclidean length of the boundary in the polygon's own model.
    pub fn euclidean_perimeter(&self) -> f64 {
        self.edges().iter().map(|e| e.euclidean_length()).sum()
    }

    /// Euclidean diameter of the region, from the boundary arcs sampled at
    /// `per_edge` points each (a lower bound that converges quickly).
    pub fn euclidean_diameter(&self, per_edge: usize) -> f64 {
        let pts: Vec<C> = self
            .edges()
            .iter()
            .flat_map(|e| e.sample(per_edge))
            .collect();
        planar::diameter(&planar::convex_hull(&pts))
    }

    /// Hyperbolic convexity via the Klein image.
    pub fn is_hyperbolically_convex(&self) -> Result<bool> {
        let k = self.klein_vertices();
        if let Some((i, j)) = planar::first_self_intersection(&k) {
            return Err(Error::SelfIntersecting(i, j));
        }
        Ok(turns_consistently(&k))
    }

    fn require_convex(&self) -> Result<()> {
        if self.is_hyperbolically_convex()? {
            Ok(())
        } else {
            Err(Error::NonConvex)
        }
    }

    /// Whether the closed region contains the origin (disc model).
    pub fn contains_origin(&self) -> bool {
        let mut k = self.klein_vertices();
        if planar::signed_area2(&k) < 0.0 {
            k.reverse();
        }
        let tol = CONVEXITY_TOL * planar::diameter(&k).max(1e-300);
        let m = k.len();
        (0..m).all(|i| planar::cross(k[(i + 1) % m] - k[i], -k[i]) >= -tol)
    }

    /// Copy with counter-clockwise vertex order.
    pub fn counter_clockwise(&self) -> HyperbolicPolygon {
        let mut out = self.clone();
        if planar::signed_area2(&self.klein_vertices()) < 0.0 {
            out.vertices.reverse();
        }
        out
    }
}

fn turns_consistently(k: &[C]) -> bool {
    let m = k.len();
    let scale = planar::diameter(k);
    let tol = CONVEXITY_TOL * scale * scale;
    let mut pos = false;
    let mut neg = false;
    for i in 0..m {
        let prev = k[(i + m - 1) % m];
        let cur = k[i];
        let next = k[(i + 1) % m];
        let c = planar::cross(cur - prev, next - cur);
        if c > tol {
            pos = true;
        } else if c < -tol {
            neg = true;
        }
    }
    !(pos && neg)
}

/// Free-function form of [`HyperbolicPolygon::is_hyperbolically_convex`].
pub fn is_hyperbolically_convex(p: &HyperbolicPolygon) -> Result<bool> {
    p.is_hyperbolically_convex()
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = (a + b) / 2.0;
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .unwrap()
}

/// Closest boundary point to the origin together with the index of the edge
/// carrying it. The search runs on the Klein chords, where `ρ(0, ·)` is a
/// monotone function of the Euclidean modulus.
pub fn closest_boundary_point_to_origin(p: &HyperbolicPolygon) -> (usize, C) {
    let k = p.klein_vertices();
    let m = k.len();
    let mut best = (0usize, f64::INFINITY, C::new(0.0, 0.0));
    for i in 0..m {
        let a = k[i];
        let d = k[(i + 1) % m] - a;
        let (t, r) = golden_section_min(|t| (a + d * t).norm(), 0.0, 1.0, GOLDEN_TOL);
        if r < best.1 {
            best = (i, r, a + d * t);
        }
    }
    (best.0, klein_inverse(best.2).expect("inside the Klein disc"))
}

/// Moves a convex polygon by a disc automorphism so that the origin lies in
/// its closure.
///
/// Returns the identity when the origin is already in the closure; otherwise
/// the map `z ↦ (z - z0)/(1 - z̄0 z)` where `z0` is the boundary point
/// nearest to the origin, together with the image polygon.
pub fn normalize_to_contain_origin(
    p: &HyperbolicPolygon,
) -> Result<(MoebiusMap, HyperbolicPolygon)> {
    let disc = p.to_disc();
    disc.require_convex()?;
    if disc.contains_origin() {
        return Ok((MoebiusMap::identity(), disc));
    }
    let (_, z0) = closest_boundary_point_to_origin(&disc);
    let m = MoebiusMap::disc_automorphism(z0, 0.0)?;
    let image = disc.mapped(&m);
    Ok((m, image))
}

/// Perimeter and diameter of the Klein image with the two isoperimetric
/// verdicts `2·diam ≤ perimeter ≤ π·diam`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    pub perimeter: f64,
    pub diameter: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

pub fn isoperimetric_sandwich(p: &HyperbolicPolygon) -> Result<Sandwich> {
    p.require_convex()?;
    let k = p.klein_vertices();
    let perimeter = planar::closed_perimeter(&k);
    let diameter = planar::diameter(&k);
    let slack = 1e-12 * perimeter.max(1.0);
    Ok(Sandwich {
        perimeter,
        diameter,
        lower_ok: 2.0 * diameter <= perimeter + slack,
        upper_ok: perimeter <= PI * diameter + slack,
    })
}

/// Intersection of two convex polygons, computed on Klein images.
pub fn intersect_convex(
    p: &HyperbolicPolygon,
    q: &HyperbolicPolygon,
) -> Result<Option<HyperbolicPolygon>> {
    p.require_convex()?;
    q.require_convex()?;
    let mut a = p.klein_vertices();
    let mut b = q.klein_vertices();
    if planar::signed_area2(&a) < 0.0 {
        a.reverse();
    }
    if planar::signed_area2(&b) < 0.0 {
        b.reverse();
    }
    let mut clipped = planar::clip_convex(&a, &b);
    clipped.dedup_by(|x, y| (*x - *y).norm() < 1e-14);
    if clipped.len() >= 2 && (clipped[0] - clipped[clipped.len() - 1]).norm() < 1e-14 {
        clipped.pop();
    }
    if clipped.len() < 3 || planar::signed_area2(&clipped).abs() < 1e-14 {
        return Ok(None);
    }
    HyperbolicPolygon::from_klein(&clipped).map(Some)
}

/// Random convex hyperbolic polygon: the convex hull of `n` uniform points in
/// the Klein disc, mapped back to the Poincaré disc. Retries until the hull
/// has at least three vertices.
pub fn random_convex_polygon<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HyperbolicPolygon {
    let n = n.max(3);
    loop {
        let pts: Vec<C> = (0..n)
            .map(|_| {
                let r = rng.gen::<f64>().sqrt();
                let t = rng.gen::<f64>() * 2.0 * PI;
                C::from_polar(r, t)
            })
            .collect();
        let hull = planar::convex_hull(&pts);
        if hull.len() >= 3 {
            if let Ok(p) = HyperbolicPolygon::from_klein(&hull) {
                return p;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    /// Quadrature oracle: Euclidean length of a sampled arc.
    fn sampled_length(s: &GeodesicSegment, n: usize) -> f64 {
        planar::open_length(&s.sample(n))
    }

    #[test]
    fn distance_examples() {
        let z = c(0.0, 0.3);
        assert_eq!(hyperbolic_distance(Model::Disc, z, z).unwrap(), 0.0);
        assert_abs_diff_eq!(
            hyperbolic_distance(Model::Disc, c(0.0, 0.0), c(0.5, 0.0)).unwrap(),
            3f64.ln(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            hyperbolic_distance(Model::HalfPlane, c(0.0, 1.0), c(0.0, 2.0)).unwrap(),
            2f64.ln(),
            epsilon = 1e-14
        );
        assert!(hyperbolic_distance(Model::Disc, c(1.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(hyperbolic_distance(Model::HalfPlane, c(0.0, -1.0), c(0.0, 1.0)).is_err());
    }

    #[test]
    fn geodesic_carriers() {
        let s = geodesic_between(Model::Disc, c(-0.5, 0.0), c(0.5, 0.0)).unwrap();
        assert!(s.center_radius().is_none());
        assert_abs_diff_eq!(s.euclidean_length(), 1.0);

        let s = geodesic_between(Model::HalfPlane, c(0.0, 1.0), c(0.0, 2.0)).unwrap();
        assert!(s.center_radius().is_none());
        assert!(s.carrier().contains(c(0.0, 17.0), 1e-12));

        let s = geodesic_between(Model::Disc, c(0.5, 0.0), c(0.0, 0.5)).unwrap();
        let (center, radius) = s.center_radius().unwrap();
        assert_abs_diff_eq!((center - c(1.25, 1.25)).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(radius, 2.125f64.sqrt(), epsilon = 1e-14);
        // Independent value: radius × acos(1.875 / 2.125).
        let expected = 2.125f64.sqrt() * (1.875f64 / 2.125).acos();
        assert_abs_diff_eq!(expected, 0.71423, epsilon = 1e-5);
        assert_abs_diff_eq!(s.euclidean_length(), expected, epsilon = 1e-14);
        assert!(geodesic_between(Model::Disc, c(0.1, 0.1), c(0.1, 0.1)).is_err());
    }

    #[test]
    fn ideal_endpoints() {
        let s = geodesic_between(Model::HalfPlane, c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(s.ideal_flags(), [true, true]);
        assert_abs_diff_eq!(s.euclidean_length(), PI, epsilon = 1e-14);
        assert!(geodesic_between(Model::Disc, c(1.5, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn carrier_orthogonal_to_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let z = C::from_polar(rng.gen::<f64>().sqrt() * 0.99, rng.gen::<f64>() * 6.3);
            let w = C::from_polar(rng.gen::<f64>().sqrt() * 0.99, rng.gen::<f64>() * 6.3);
            let s = geodesic_between(Model::Disc, z, w).unwrap();
            assert!(s.carrier().contains(z, 1e-10) && s.carrier().contains(w, 1e-10));
            if let Some((m, r)) = s.center_radius() {
                assert!((m.norm_sqr() - 1.0 - r * r).abs() < 1e-10 * m.norm_sqr());
            }
            // Exact length vs. fine polyline.
            let exact = s.euclidean_length();
            assert!((exact - sampled_length(&s, 20001)).abs() < 1e-8);
        }
    }

    #[test]
    fn klein_examples() {
        assert_eq!(klein_map(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_abs_diff_eq!(klein_map(c(0.5, 0.0)).unwrap().re, 0.8, epsilon = 1e-15);
        for k in 0..12 {
            let z = C::from_polar(0.5, k as f64 * 0.5);
            assert_abs_diff_eq!(klein_map(z).unwrap().norm(), 0.8, epsilon = 1e-15);
            assert_abs_diff_eq!((klein_inverse(klein_map(z).unwrap()).unwrap() - z).norm(), 0.0, epsilon = 1e-15);
        }
        assert!(klein_map(c(1.1, 0.0)).is_err());
    }

    #[test]
    fn convexity_examples() {
        let tri = HyperbolicPolygon::new(Model::Disc, vec![c(0.3, 0.0), c(0.0, 0.3), c(-0.2, 0.0)]).unwrap();
        assert!(tri.is_hyperbolically_convex().unwrap());
        let dart = HyperbolicPolygon::new(
            Model::Disc,
            vec![c(0.5, 0.0), c(0.05, 0.05), c(0.0, 0.5), c(-0.5, 0.0)],
        )
        .unwrap();
        assert!(!dart.is_hyperbolically_convex().unwrap());
        let pent = HyperbolicPolygon::regular(5, 0.6, 0.0).unwrap();
        assert!(pent.is_hyperbolically_convex().unwrap());
        let star = HyperbolicPolygon::new(
            Model::Disc,
            vec![c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5)],
        )
        .unwrap();
        assert!(matches!(
            star.is_hyperbolically_convex(),
            Err(Error::SelfIntersecting(..))
        ));
    }

    #[test]
    fn dart_cross_products_by_brute_force() {
        // Oracle: cross products of the Klein image computed from scratch.
        let v = [c(0.5, 0.0), c(0.05, 0.05), c(0.0, 0.5), c(-0.5, 0.0)];
        let k: Vec<C> = v.iter().map(|z| 2.0 * z / (1.0 + z.norm_sqr())).collect();
        let signs: Vec<f64> = (0..4)
            .map(|i| {
                let a = k[(i + 3) % 4];
                let b = k[i];
                let cc = k[(i + 1) % 4];
                ((b - a).re * (cc - b).im - (b - a).im * (cc - b).re).signum()
            })
            .collect();
        assert!(signs.contains(&1.0) && signs.contains(&-1.0));
    }

    #[test]
    fn half_plane_polygons_are_transported() {
        let p = HyperbolicPolygon::new(Model::HalfPlane, vec![c(-1.0, 1.0), c(1.0, 1.0), c(0.0, 3.0)]).unwrap();
        assert!(p.is_hyperbolically_convex().unwrap());
        assert_eq!(p.to_disc().model(), Model::Disc);
    }

    #[test]
    fn normalization_examples() {
        let around = HyperbolicPolygon::regular(4, 0.4, 0.3).unwrap();
        let (m, q) = normalize_to_contain_origin(&around).unwrap();
        assert!(m.approx_eq(&MoebiusMap::identity(), 0.0));
        assert_eq!(q.vertices(), around.vertices());

        // Edge symmetric about the real axis: nearest point is the foot on it.
        let off = HyperbolicPolygon::new(
            Model::Disc,
            vec![c(0.3, -0.2), c(0.3, 0.2), c(0.7, 0.0)],
        )
        .unwrap();
        let (_, z0) = closest_boundary_point_to_origin(&off);
        // Dense-sampling oracle over the same edge.
        let edge = geodesic_between(Model::Disc, c(0.3, -0.2), c(0.3, 0.2)).unwrap();
        let best = edge
            .sample(200_001)
            .into_iter()
            .min_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        assert!((z0 - best).norm() < 1e-5, "{z0} vs {best}");
        assert!(z0.im.abs() < 1e-6);

        let (m, q) = normalize_to_contain_origin(&off).unwrap();
        assert!(m.apply_to(z0).unwrap().norm() < 1e-15);
        assert!(q.contains_origin());

        let dart = HyperbolicPolygon::new(
            Model::Disc,
            vec![c(0.5, 0.0), c(0.05, 0.05), c(0.0, 0.5), c(-0.5, 0.0)],
        )
        .unwrap();
        assert_eq!(normalize_to_contain_origin(&dart).unwrap_err(), Error::NonConvex);
    }

    #[test]
    fn sandwich_examples() {
        let s = 0.5;
        let square = HyperbolicPolygon::from_klein(&[
            c(-s / 2.0, -s / 2.0),
            c(s / 2.0, -s / 2.0),
            c(s / 2.0, s / 2.0),
            c(-s / 2.0, s / 2.0),
        ])
        .unwrap();
        let r = isoperimetric_sandwich(&square).unwrap();
        assert_abs_diff_eq!(r.perimeter, 4.0 * s, epsilon = 1e-14);
        assert_abs_diff_eq!(r.diameter, s * 2f64.sqrt(), epsilon = 1e-14);
        assert!(r.lower_ok && r.upper_ok);

        let thin = HyperbolicPolygon::from_klein(&[c(-0.5, 0.0), c(0.5, 0.0), c(0.0, 1e-6)]).unwrap();
        let r = isoperimetric_sandwich(&thin).unwrap();
        assert!((r.perimeter / r.diameter - 2.0).abs() < 1e-6);
        assert!(r.lower_ok && r.upper_ok);

        let ring: Vec<C> = (0..64).map(|k| C::from_polar(0.9, 2.0 * PI * k as f64 / 64.0)).collect();
        let r = isoperimetric_sandwich(&HyperbolicPolygon::from_klein(&ring).unwrap()).unwrap();
        // Inscribed polygon: ratio = 64 sin(π/64).
        assert_abs_diff_eq!(r.perimeter / r.diameter, 64.0 * (PI / 64.0).sin(), epsilon = 1e-12);
        assert!((r.perimeter / r.diameter - PI).abs() < 0.01);
    }

    #[test]
    fn intersection_of_convex_polygons_is_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut nonempty = 0;
        for _ in 0..100 {
            let n1 = rng.gen_range(3..12);
            let n2 = rng.gen_range(3..12);
            let p = random_convex_polygon(&mut rng, n1);
            let q = random_convex_polygon(&mut rng, n2);
            if let Some(r) = intersect_convex(&p, &q).unwrap() {
                nonempty += 1;
                assert!(r.is_hyperbolically_convex().unwrap());
            }
        }
        assert!(nonempty > 50);
    }

    fn arb_half_plane_point() -> impl Strategy<Value = C> {
        (-5.0..5.0f64, 0.01..5.0f64).prop_map(|(x, y)| C::new(x, y))
    }

    fn arb_disc_point() -> impl Strategy<Value = C> {
        (0.0..0.95f64, 0.0..(2.0 * PI)).prop_map(|(r, t)| C::from_polar(r, t))
    }

    proptest! {
        #[test]
        fn cayley_maps_are_isometries(z in arb_half_plane_point(), w in arb_half_plane_point()) {
            let rho_h = hyperbolic_distance(Model::HalfPlane, z, w).unwrap();
            for n in [1.0, 10.0, 100.0] {
                let m = cayley_family(n).unwrap();
                let rho_d = hyperbolic_distance(Model::Disc, m.apply_to(z).unwrap(), m.apply_to(w).unwrap()).unwrap();
                prop_assert!((rho_h - rho_d).abs() < 1e-10 * (1.0 + rho_h), "n={} {} vs {}", n, rho_h, rho_d);
            }
        }

        #[test]
        fn geodesics_map_to_klein_chords(z in arb_disc_point(), w in arb_disc_point()) {
            prop_assume!((z - w).norm() > 1e-3);
            let s = geodesic_between(Model::Disc, z, w).unwrap();
            let (kz, kw) = (klein_map(z).unwrap(), klein_map(w).unwrap());
            for p in s.sample(10) {
                let d = planar::point_segment_distance(klein_map(p).unwrap(), kz, kw);
                prop_assert!(d < 1e-10, "distance {}", d);
            }
        }

        #[test]
        fn convexity_is_moebius_invariant(seed in any::<u64>(), a in arb_disc_point(), theta in 0.0..(2.0 * PI)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(3..15);
            let p = random_convex_polygon(&mut rng, n);
            let m = MoebiusMap::disc_automorphism(a, theta).unwrap();
            prop_assert!(p.is_hyperbolically_convex().unwrap());
            prop_assert!(p.mapped(&m).is_hyperbolically_convex().unwrap());
        }

        #[test]
        fn non_convex_stays_non_convex(a in arb_disc_point(), theta in 0.0..(2.0 * PI)) {
            let dart = HyperbolicPolygon::new(
                Model::Disc,
                vec![C::new(0.5, 0.0), C::new(0.05, 0.05), C::new(0.0, 0.5), C::new(-0.5, 0.0)],
            ).unwrap();
            let m = MoebiusMap::disc_automorphism(a, theta).unwrap();
            prop_assert!(!dart.mapped(&m).is_hyperbolically_convex().unwrap());
        }

        #[test]
        fn chord_bound_in_half_plane(z in arb_half_plane_point(), w in arb_half_plane_point()) {
            prop_assume!((z - w).norm() > 1e-9);
            let s = geodesic_between(Model::HalfPlane, z, w).unwrap();
            prop_assert!(s.euclidean_length() <= PI / 2.0 * (z - w).norm() + 1e-12);
        }
    }
}
