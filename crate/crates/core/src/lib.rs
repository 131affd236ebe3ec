//! Conformal geometry toolkit for length problems on the disc and the
//! half-plane.
//!
//! The crate covers Möbius and anti-Möbius algebra on the Riemann sphere,
//! hyperbolic and spherical length functionals, elementary slit-domain
//! conformal maps, harmonic-measure level curves, preimage tracing of lines
//! and circles, and a reproducible experiment runner that checks the sharp
//! length constants these constructions are built around.

// Range checks written as `!(x > 0.0)` also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod conformal;
pub mod curve;
pub mod error;
pub mod experiments;
pub mod harmonic;
pub mod hyperbolic;
pub mod moebius;
pub mod planar;
pub mod preimage;
pub mod spherical;

pub use error::{Error, Result};
pub use moebius::{cayley_family, circline_image, reflection_fixing, Circline, MoebiusMap, Orientation, RSPoint};
pub use hyperbolic::{geodesic_between, hyperbolic_distance, klein_inverse, klein_map, normalize_to_contain_origin, GeodesicSegment, HyperbolicPolygon, Model};
pub use curve::{spherical_curve_length, Length, SampledCurve};
pub use spherical::{sigma_distance, spherical_bound_check, stereographic, stereographic_inverse, unroll_polygon, SpherePoint, UnrolledCurve};
pub use conformal::{conformal_reflection_across, halfplane_slit_map, rho_omega, schwarz_reflect_extend, two_slit_map, MapPipeline, MapStep};
pub use harmonic::{conjecture_bound, omega_halfplane, omega_pipeline, omega_wos, region_b, trace_level_curve, HMProblem, LevelCurve, TraceOptions};
pub use preimage::{hypothesis_check, preimage_components, preimage_verdict, trace_implicit, HypothesisVerdict, PreimageReport};
pub use experiments::{run_and_write, run_scenario, ResultRow, RunOutcome, Scenario, ScenarioConfig};
