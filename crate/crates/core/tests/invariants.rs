//! Cross-module invariants through the public API.

use std::f64::consts::PI;

use conflen::harmonic::{omega_pipeline, trace_level_curve, HMProblem, TraceOptions};
use conflen::{
    hyperbolic_distance, sigma_distance, spherical_bound_check, two_slit_map, HyperbolicPolygon, Model,
    MoebiusMap, RSPoint,
};
use num_complex::Complex64 as C;
use proptest::prelude::*;

fn disc_point() -> impl Strategy<Value = C> {
    (0.0..0.95f64, 0.0..2.0 * PI).prop_map(|(r, t)| C::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn disc_automorphisms_preserve_both_distances(z in disc_point(), w in disc_point(), a in disc_point(), t in 0.0..2.0 * PI) {
        let m = MoebiusMap::disc_automorphism(a, t).unwrap();
        let (mz, mw) = (m.apply_to(z).unwrap(), m.apply_to(w).unwrap());
        let rho = hyperbolic_distance(Model::Disc, z, w).unwrap();
        prop_assert!((hyperbolic_distance(Model::Disc, mz, mw).unwrap() - rho).abs() <= 1e-8 * rho.max(1.0));
        // Rotations are the only automorphisms that are spherical isometries.
        let rot = MoebiusMap::disc_automorphism(C::new(0.0, 0.0), t).unwrap();
        let s = sigma_distance(RSPoint::finite(z), RSPoint::finite(w));
        let s_rot = sigma_distance(rot.apply(RSPoint::finite(z)), rot.apply(RSPoint::finite(w)));
        prop_assert!((s - s_rot).abs() < 1e-12);
    }

    #[test]
    fn regular_polygons_satisfy_the_spherical_chain(m in 3usize..40, r in 0.05..0.999f64, phase in 0.0..PI) {
        let p = HyperbolicPolygon::regular(m, r, phase).unwrap();
        let rep = spherical_bound_check(&p).unwrap();
        prop_assert!(rep.holds(1e-12));
        prop_assert!(rep.sigma_length < PI * PI);
    }

    #[test]
    fn two_slit_map_is_totally_real(a in -3.0..0.0f64, len in 0.1..4.0f64, z in disc_point()) {
        let g = two_slit_map(a, a + len).unwrap();
        let (w, wb) = (g.eval(z).unwrap(), g.eval(z.conj()).unwrap());
        prop_assert!((w.conj() - wb).norm() <= 1e-12 * w.norm().max(1.0));
    }
}

#[test]
fn level_curves_of_a_slit_domain_carry_their_level() {
    let p = HMProblem::slit(2.0, 1.0).unwrap();
    for alpha in [0.2, 0.5, 0.8] {
        let lc = trace_level_curve(&p, alpha, TraceOptions::default()).unwrap();
        let pts = lc.curve.points();
        for z in &pts[1..pts.len() - 1] {
            assert!((omega_pipeline(&p, *z).unwrap() - alpha).abs() < 1e-8);
        }
        assert!(lc.length_estimate < 2.0 * PI * (1.0 - alpha) / (PI * alpha).sin());
    }
}
