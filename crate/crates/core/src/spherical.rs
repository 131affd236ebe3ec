//! Spherical metric, stereographic projection, and the development of the
//! lifted boundary of a convex polygon onto the half-plane.
//!
//! For a convex polygon `E` with `0 ∈ Ē`, the stereographic image of each
//! geodesic edge lies on the vertical cylinder over the Klein chord of that
//! edge. Unrolling that cylinder by arc length `s` along `K(∂E)` sends the
//! point above `γ(s)` to `s + i√(1 - |γ(s)|²)`, and on a chord at distance `d`
//! from the origin this traces a semicircle of radius `√(1 - d²)` centered at
//! the foot of the perpendicular. The lift is therefore piecewise geodesic in
//! the half-plane, in closed form.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::curve::{integrate, sigma_density};
use crate::error::{Error, Result};
use crate::hyperbolic::{geodesic_between, normalize_to_contain_origin, GeodesicSegment, HyperbolicPolygon, Model};
use crate::moebius::RSPoint;
use crate::planar;

/// Quadrature tolerance for σ-lengths of geodesic arcs.
pub const ARC_QUAD_TOL: f64 = 1e-13;

/// Carriers whose centers and radii agree to this tolerance are merged.
const MERGE_TOL: f64 = 1e-12;

/// A point on the unit sphere in `ℂ × ℝ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub x: C,
    pub t: f64,
}

impl SpherePoint {
    pub fn new(x: C, t: f64) -> Result<Self> {
        if ((x.norm_sqr() + t * t) - 1.0).abs() > 1e-12 {
            return Err(Error::Domain {
                model: "unit sphere",
                point: format!("({x}, {t})"),
            });
        }
        Ok(Self { x, t })
    }

    pub fn chord(&self, other: &SpherePoint) -> f64 {
        ((self.x - other.x).norm_sqr() + (self.t - other.t).powi(2)).sqrt()
    }
}

/// Great-circle distance between the stereographic images of `z` and `w`.
///
/// Uses homogeneous coordinates, so `∞` needs no special case.
pub fn sigma_distance(z: RSPoint, w: RSPoint) -> f64 {
    let (z1, z2) = (z.num(), z.den());
    let (w1, w2) = (w.num(), w.den());
    let cross = (z1 * w2 - z2 * w1).norm();
    let inner = (w1.conj() * z1 + w2.conj() * z2).norm();
    2.0 * cross.atan2(inner)
}

/// Stereographic projection from the south pole; the disc goes to the upper
/// hemisphere.
pub fn stereographic(z: RSPoint) -> SpherePoint {
    let (n, d) = (z.num(), z.den());
    let s = n.norm_sqr() + d.norm_sqr();
    SpherePoint {
        x: 2.0 * n * d.conj() / s,
        t: (d.norm_sqr() - n.norm_sqr()) / s,
    }
}

/// Inverse of [`stereographic`].
pub fn stereographic_inverse(p: SpherePoint) -> RSPoint {
    if p.t >= 0.0 {
        RSPoint::finite(p.x / (1.0 + p.t))
    } else {
        // Near the south pole divide the other way: z = (1 - t)/conj(x).
        let den = p.x.conj();
        if den.norm() == 0.0 {
            RSPoint::INFINITY
        } else {
            RSPoint::new(C::new(1.0 - p.t, 0.0), den).expect("nonzero")
        }
    }
}

/// σ-length of a geodesic segment, by quadrature along its exact carrier.
pub fn sigma_segment_length(s: &GeodesicSegment) -> (f64, f64) {
    let len = s.euclidean_length();
    integrate(|u| len * sigma_density(s.point_at(u)), 0.0, 1.0, ARC_QUAD_TOL)
}

/// σ-length of the boundary of a hyperbolic polygon.
pub fn polygon_sigma_length(p: &HyperbolicPolygon) -> f64 {
    p.to_disc().edges().iter().map(|e| sigma_segment_length(e).0).sum()
}

/// The development of `Π(∂E)` onto the half-plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnrolledCurve {
    pieces: Vec<GeodesicSegment>,
    base_height: f64,
    base_length: f64,
    /// Arc-length position of each relabeled Klein vertex, the first at 0.
    joints: Vec<f64>,
    /// Klein vertices after relabeling, counter-clockwise.
    klein: Vec<C>,
}

impl UnrolledCurve {
    pub fn pieces(&self) -> &[GeodesicSegment] {
        &self.pieces
    }

    pub fn base_height(&self) -> f64 {
        self.base_height
    }

    pub fn base_length(&self) -> f64 {
        self.base_length
    }

    pub fn joints(&self) -> &[f64] {
        &self.joints
    }

    pub fn total_length(&self) -> f64 {
        self.pieces.iter().map(|p| p.euclidean_length()).sum()
    }

    /// Point of the lift above arc length `s ∈ [0, L]`.
    pub fn lift(&self, s: f64) -> C {
        let g = self.klein_point(s);
        C::new(s, (1.0 - g.norm_sqr()).max(0.0).sqrt())
    }

    fn klein_point(&self, s: f64) -> C {
        let m = self.klein.len();
        let i = match self.joints.binary_search_by(|x| x.total_cmp(&s)) {
            Ok(i) => i.min(m - 1),
            Err(i) => i.saturating_sub(1).min(m - 1),
        };
        let a = self.klein[i];
        let b = self.klein[(i + 1) % m];
        let e = (b - a) / (b - a).norm();
        a + e * (s - self.joints[i])
    }

    /// Jumps of `sin arg Γ'` at the interior joints, from the closed form
    /// `sin arg Γ' = -|γ| cos θ / √(1 - |γ|² sin² θ)` with `θ = arg(γ'/γ)`.
    pub fn joint_jumps(&self) -> Vec<f64> {
        let m = self.klein.len();
        (1..m)
            .map(|i| {
                let v = self.klein[i];
                let e_in = self.klein[i] - self.klein[i - 1];
                let e_out = self.klein[(i + 1) % m] - self.klein[i];
                sin_arg_lift(v, e_out / e_out.norm()) - sin_arg_lift(v, e_in / e_in.norm())
            })
            .collect()
    }

    /// The region above the lift, between the two vertical geodesics, is
    /// hyperbolically convex exactly when no joint turns clockwise.
    pub fn is_lift_convex(&self) -> bool {
        self.joint_jumps().iter().all(|&j| j >= -1e-12)
    }
}

/// `sin arg` of the lift tangent at Klein point `g` moving in unit direction `e`.
fn sin_arg_lift(g: C, e: C) -> f64 {
    let dot = planar::dot(g, e);
    let h2 = (1.0 - g.norm_sqr()).max(0.0);
    -dot / (h2 + dot * dot).sqrt()
}

/// Develops the lifted boundary of a convex polygon whose closure contains 0.
pub fn unroll_polygon(p: &HyperbolicPolygon) -> Result<UnrolledCurve> {
    let p = p.to_disc();
    if !p.is_hyperbolically_convex()? {
        return Err(Error::NonConvex);
    }
    if !p.contains_origin() {
        return Err(Error::Precondition(
            "the origin must lie in the closed polygon; normalize first".into(),
        ));
    }
    let mut k = p.counter_clockwise().klein_vertices();
    // Lowest lift height is the Klein vertex farthest out; first index wins ties.
    let start = k
        .iter()
        .enumerate()
        .fold((0usize, f64::NEG_INFINITY), |best, (i, z)| {
            if z.norm_sqr() > best.1 {
                (i, z.norm_sqr())
            } else {
                best
            }
        })
        .0;
    k.rotate_left(start);
    let m = k.len();
    let mut joints = Vec::with_capacity(m + 1);
    let mut s = 0.0;
    let mut pieces: Vec<GeodesicSegment> = Vec::with_capacity(m);
    for i in 0..m {
        joints.push(s);
        let a = k[i];
        let b = k[(i + 1) % m];
        let len = (b - a).norm();
        let lift = |z: C, at: f64| C::new(at, (1.0 - z.norm_sqr()).max(0.0).sqrt());
        let piece = geodesic_between(Model::HalfPlane, lift(a, s), lift(b, s + len))?;
        match pieces.last_mut() {
            Some(prev) if same_carrier(prev, &piece) => {
                *prev = geodesic_between(Model::HalfPlane, prev.endpoints().0, piece.endpoints().1)?;
            }
            _ => pieces.push(piece),
        }
        s += len;
    }
    joints.push(s);
    if !(s > 0.0 && s < 2.0 * PI) {
        return Err(Error::Precondition(format!(
            "Klein perimeter {s} outside (0, 2π); convex Klein polygons cannot reach this"
        )));
    }
    Ok(UnrolledCurve {
        pieces,
        base_height: (1.0 - k[0].norm_sqr()).max(0.0).sqrt(),
        base_length: s,
        joints,
        klein: k,
    })
}

fn same_carrier(a: &GeodesicSegment, b: &GeodesicSegment) -> bool {
    match (a.center_radius(), b.center_radius()) {
        (Some((c1, r1)), Some((c2, r2))) => (c1 - c2).norm() < MERGE_TOL && (r1 - r2).abs() < MERGE_TOL,
        _ => false,
    }
}

/// Chain `σ(∂E) ≤ σ(M(∂E)) ≤ πL/2 < π²`, where `M` moves the origin into
/// the closure of `E` and `L` is the Klein perimeter of `M(E)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalBoundReport {
    pub sigma_length: f64,
    pub normalized_sigma_length: f64,
    pub lift_length: f64,
    pub klein_length: f64,
    /// `πL/2 - σ(M(∂E))`.
    pub chain_margin: f64,
    /// `π² - πL/2`.
    pub outer_margin: f64,
    /// `π² - σ(∂E)`.
    pub total_margin: f64,
    pub lift_convex: bool,
}

impl SphericalBoundReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.sigma_length <= self.normalized_sigma_length + tol
            && self.chain_margin >= -tol
            && self.outer_margin > 0.0
            && self.lift_convex
    }
}

pub fn spherical_bound_check(p: &HyperbolicPolygon) -> Result<SphericalBoundReport> {
    let (_, normalized) = normalize_to_contain_origin(p)?;
    let unrolled = unroll_polygon(&normalized)?;
    let sigma_length = polygon_sigma_length(p);
    let normalized_sigma_length = polygon_sigma_length(&normalized);
    let l = unrolled.base_length();
    Ok(SphericalBoundReport {
        sigma_length,
        normalized_sigma_length,
        lift_length: unrolled.total_length(),
        klein_length: l,
        chain_margin: PI * l / 2.0 - normalized_sigma_length,
        outer_margin: PI * PI - PI * l / 2.0,
        total_margin: PI * PI - sigma_length,
        lift_convex: unrolled.is_lift_convex(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::{hyperbolic_distance, klein_map, random_convex_polygon};
    use crate::moebius::MoebiusMap;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(re: f64, im: f64) -> RSPoint {
        RSPoint::finite(C::new(re, im))
    }

    /// Oracle: σ-length of a polyline by midpoint rule on a fine subdivision.
    fn sigma_by_midpoints(pts: &[C]) -> f64 {
        pts.windows(2)
            .map(|w| (w[1] - w[0]).norm() * sigma_density((w[0] + w[1]) / 2.0))
            .sum()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_distance(pt(0.3, 0.2), pt(0.3, 0.2)), 0.0);
        assert_abs_diff_eq!(sigma_distance(pt(0.0, 0.0), RSPoint::INFINITY), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(sigma_distance(pt(0.0, 0.0), pt(1.0, 0.0)), PI / 2.0, epsilon = 1e-15);
        // Formula 2·atan|(z-w)/(1+w̄z)| on a generic pair.
        let (z, w) = (C::new(0.3, -0.4), C::new(-1.2, 2.0));
        let expected = 2.0 * ((z - w) / (1.0 + w.conj() * z)).norm().atan();
        assert_abs_diff_eq!(sigma_distance(z.into(), w.into()), expected, epsilon = 1e-14);
    }

    #[test]
    fn stereographic_examples() {
        let n = stereographic(pt(0.0, 0.0));
        assert_eq!((n.x, n.t), (C::new(0.0, 0.0), 1.0));
        let e = stereographic(pt(1.0, 0.0));
        assert_abs_diff_eq!((e.x - C::new(1.0, 0.0)).norm() + e.t.abs(), 0.0, epsilon = 1e-15);
        let h = stereographic(pt(0.5, 0.0));
        assert_abs_diff_eq!(h.x.re, 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(h.t, 0.6, epsilon = 1e-15);
        let s = stereographic(RSPoint::INFINITY);
        assert_eq!(s.t, -1.0);
        assert!(stereographic_inverse(s).is_infinite());
        for z in [C::new(0.3, 0.1), C::new(-4.0, 7.0), C::new(1e-3, 0.0)] {
            let back = stereographic_inverse(stereographic(z.into())).to_complex().unwrap();
            assert!((back - z).norm() < 1e-13 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn chord_on_sphere_matches_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let z = C::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let w = C::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let chord = stereographic(z.into()).chord(&stereographic(w.into()));
            assert_abs_diff_eq!(2.0 * (chord / 2.0).asin(), sigma_distance(z.into(), w.into()), epsilon = 1e-12);
        }
    }

    #[test]
    fn metric_ordering_and_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let z = C::from_polar(rng.gen::<f64>().sqrt() * 0.999, rng.gen::<f64>() * 2.0 * PI);
            let w = C::from_polar(rng.gen::<f64>().sqrt() * 0.999, rng.gen::<f64>() * 2.0 * PI);
            let s = sigma_distance(z.into(), w.into());
            assert!((z - w).norm() < s);
            assert!(s < hyperbolic_distance(Model::Disc, z, w).unwrap());
            assert!((stereographic(z.into()).x - klein_map(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn regular_square_unrolls_symmetrically() {
        let sq = HyperbolicPolygon::regular(4, 0.5, 0.1).unwrap();
        let u = unroll_polygon(&sq).unwrap();
        assert_eq!(u.pieces().len(), 4);
        let l0 = u.pieces()[0].euclidean_length();
        for piece in u.pieces() {
            assert_abs_diff_eq!(piece.euclidean_length(), l0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(u.total_length(), polygon_sigma_length(&sq), epsilon = 1e-8);
        let (first, _) = u.pieces()[0].endpoints();
        let (_, last) = u.pieces()[3].endpoints();
        assert_abs_diff_eq!((first - C::new(0.0, u.base_height())).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((last - C::new(u.base_length(), u.base_height())).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn lift_length_matches_sigma_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let n = rng.gen_range(3..20);
            let p = random_convex_polygon(&mut rng, n);
            let (_, q) = normalize_to_contain_origin(&p).unwrap();
            let u = unroll_polygon(&q).unwrap();
            assert!((u.total_length() - polygon_sigma_length(&q)).abs() < 1e-8);
            // Independent oracle: fine sampling of each edge.
            let pts: Vec<C> = q.edges().iter().flat_map(|e| e.sample(4000)).collect();
            assert!((sigma_by_midpoints(&pts) - polygon_sigma_length(&q)).abs() < 1e-5);
        }
    }

    #[test]
    fn triangle_joint_jumps_by_finite_differences() {
        let tri = HyperbolicPolygon::new(
            Model::Disc,
            vec![C::new(0.6, -0.1), C::new(-0.3, 0.5), C::new(-0.4, -0.5)],
        )
        .unwrap();
        let u = unroll_polygon(&tri).unwrap();
        let jumps = u.joint_jumps();
        assert_eq!(jumps.len(), 2);
        for (i, jump) in jumps.iter().enumerate() {
            let s = u.joints()[i + 1];
            let h = 1e-7;
            let sin_arg = |a: f64, b: f64| {
                let d = u.lift(b) - u.lift(a);
                d.im / d.norm()
            };
            let fd = sin_arg(s + h, s + 2.0 * h) - sin_arg(s - 2.0 * h, s - h);
            assert!((fd - jump).abs() < 1e-5, "{fd} vs {jump}");
            assert!(*jump > 0.0);
        }
        // Closing joint at s = L, from the last piece into the first.
        assert!(u.is_lift_convex());
    }

    #[test]
    fn lift_rejects_bad_input() {
        let off = HyperbolicPolygon::new(Model::Disc, vec![C::new(0.3, -0.2), C::new(0.3, 0.2), C::new(0.7, 0.0)]).unwrap();
        assert!(matches!(unroll_polygon(&off), Err(Error::Precondition(_))));
    }

    #[test]
    fn edges_through_origin_merge() {
        // The origin is a vertex; its two edges lift onto one geodesic.
        let p = HyperbolicPolygon::new(
            Model::Disc,
            vec![C::new(0.0, 0.0), C::new(0.6, 0.0), C::new(0.0, 0.6)],
        )
        .unwrap();
        let u = unroll_polygon(&p).unwrap();
        assert_eq!(u.pieces().len(), 2);
        assert!(u.is_lift_convex());
    }

    #[test]
    fn bound_check_examples() {
        let tiny = HyperbolicPolygon::new(
            Model::Disc,
            vec![C::new(1e-3, 0.0), C::new(0.0, 1e-3), C::new(-1e-3, -1e-3)],
        )
        .unwrap();
        let r = spherical_bound_check(&tiny).unwrap();
        let eu = tiny.euclidean_perimeter();
        assert!((r.sigma_length / eu - 2.0).abs() < 1e-5);
        assert!(r.total_margin > PI * PI - 3.0 * eu, "{r:?}");

        // Vertex spacing far above the distance to the circle: the geodesic
        // edges sag, and the σ-length climbs towards π² instead of 2π.
        let ring = HyperbolicPolygon::regular(256, 1.0 - 1e-3, 0.0).unwrap();
        let r = spherical_bound_check(&ring).unwrap();
        assert!(r.sigma_length > 2.0 * PI && r.total_margin > 0.0, "{r:?}");
        assert!(r.holds(1e-9));

        // Dense vertices: the polygon converges to the circle, σ-length 4πρ/(1+ρ²).
        let rho = 0.99;
        let circle = 4.0 * PI * rho / (1.0 + rho * rho);
        let mut last = f64::INFINITY;
        for n in [512, 2048, 8192] {
            let r = spherical_bound_check(&HyperbolicPolygon::regular(n, rho, 0.0).unwrap()).unwrap();
            assert!(r.holds(1e-9));
            let excess = r.sigma_length - circle;
            assert!(excess > 0.0 && excess < last, "{n}: {excess}");
            last = excess;
        }
        assert!(last < 2e-3);

        let dart = HyperbolicPolygon::new(
            Model::Disc,
            vec![C::new(0.5, 0.0), C::new(0.05, 0.05), C::new(0.0, 0.5), C::new(-0.5, 0.0)],
        )
        .unwrap();
        assert_eq!(spherical_bound_check(&dart).unwrap_err(), Error::NonConvex);
    }

    #[test]
    fn normalization_increases_sigma_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut checked = 0;
        while checked < 30 {
            let n = rng.gen_range(3..10);
            let p = random_convex_polygon(&mut rng, n);
            let a = C::from_polar(rng.gen_range(0.3..0.9), rng.gen::<f64>() * 2.0 * PI);
            let p = p.mapped(&MoebiusMap::disc_automorphism(a, 0.0).unwrap());
            if p.contains_origin() {
                continue;
            }
            let (_, q) = normalize_to_contain_origin(&p).unwrap();
            assert!(polygon_sigma_length(&q) > polygon_sigma_length(&p));
            checked += 1;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn bound_holds_on_random_polygons(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(3..30);
            let p = random_convex_polygon(&mut rng, n);
            let r = spherical_bound_check(&p).unwrap();
            prop_assert!(r.holds(1e-9), "{:?}", r);
            prop_assert!(r.total_margin > 0.0);
        }
    }
}
