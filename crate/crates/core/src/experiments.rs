//! Seeded scenario runner: every sharp length constant as a table of
//! measured values, bounds and margins.
//!
//! Each scenario expands into independent instances that run on the rayon
//! pool. An instance owns its RNG substream (`seed`, stream = instance
//! index), so results do not depend on scheduling; rows are sorted by
//! `(scenario, id)` before they are written.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64 as C;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::conformal::{conformal_reflection_across, two_slit_map, MapPipeline};
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::harmonic::{
    conjecture_bound, halfplane_level_point, level_curves_svg, svg_points, trace_level_curve, HMProblem,
    TraceOptions,
};
use crate::hyperbolic::{random_convex_polygon, HyperbolicPolygon};
use crate::preimage::{default_fixtures, hypothesis_check, preimage_components_at, HypothesisVerdict};
use crate::spherical::spherical_bound_check;

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Largest allowed `|f(w) - w|` on `γ` for a conformal reflection.
pub const FIXED_POINT_TOL: f64 = 1e-9;

/// Edge samples used for the Euclidean diameter of a polygon.
const DIAMETER_SAMPLES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    BrownFlinn,
    LevelSet,
    ConjectureSweep,
    SlitExtremal,
    ReflectionCheck,
    HaymanWu,
    All,
}

impl Scenario {
    pub const EACH: [Scenario; 6] = [
        Scenario::BrownFlinn,
        Scenario::LevelSet,
        Scenario::ConjectureSweep,
        Scenario::SlitExtremal,
        Scenario::ReflectionCheck,
        Scenario::HaymanWu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::BrownFlinn => "brown-flinn",
            Scenario::LevelSet => "level-set",
            Scenario::ConjectureSweep => "conjecture-sweep",
            Scenario::SlitExtremal => "slit-extremal",
            Scenario::ReflectionCheck => "reflection-check",
            Scenario::HaymanWu => "hayman-wu",
            Scenario::All => "all",
        }
    }

    /// The concrete scenarios this one stands for.
    pub fn expand(self) -> Vec<Scenario> {
        match self {
            Scenario::All => Self::EACH.to_vec(),
            s => vec![s],
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::EACH
            .iter()
            .chain(std::iter::once(&Scenario::All))
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub curve_length: f64,
    pub round_trip: f64,
    pub corrector: f64,
    /// Allowed `|margin|` on rows where the bound is attained.
    pub equality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            curve_length: 1e-7,
            round_trip: 1e-11,
            corrector: 1e-10,
            equality: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn trace_options(&self) -> TraceOptions {
        TraceOptions {
            length_tol: self.curve_length,
            corrector_tol: self.corrector,
            ..TraceOptions::default()
        }
    }
}

/// A member of the half-plane domain families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    HalfPlane,
    Slit { x0: f64, h: f64 },
    Perturbed { x0: f64, h: f64, k: f64 },
    Double { x1: f64, h1: f64, x2: f64, h2: f64 },
}

impl DomainSpec {
    pub fn build(&self) -> Result<HMProblem> {
        match *self {
            DomainSpec::HalfPlane => Ok(HMProblem::half_plane()),
            DomainSpec::Slit { x0, h } => HMProblem::slit(x0, h),
            DomainSpec::Perturbed { x0, h, k } => HMProblem::perturbed_slit(x0, h, k),
            DomainSpec::Double { x1, h1, x2, h2 } => HMProblem::double_slit(x1, h1, x2, h2),
        }
    }
}

fn slit(x0: f64, h: f64) -> DomainSpec {
    DomainSpec::Slit { x0, h }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BrownFlinnConfig {
    pub polygons: usize,
    /// Klein-disc points per polygon before the hull is taken.
    pub points: usize,
}

impl Default for BrownFlinnConfig {
    fn default() -> Self {
        Self { polygons: 1000, points: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevelSetConfig {
    pub domains: Vec<DomainSpec>,
    pub sweep_x0: f64,
    /// Slit heights of the sweep, in decreasing order.
    pub sweep_heights: Vec<f64>,
}

impl Default for LevelSetConfig {
    fn default() -> Self {
        Self {
            domains: vec![DomainSpec::HalfPlane, slit(2.0, 1.0), slit(-1.5, 0.4), slit(3.0, 2.0), slit(1.2, 0.3)],
            sweep_x0: 2.0,
            sweep_heights: vec![1.0, 0.5, 0.25, 0.1, 0.05],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConjectureConfig {
    pub alphas: Vec<f64>,
    pub domains: Vec<DomainSpec>,
}

impl Default for ConjectureConfig {
    fn default() -> Self {
        let mut domains = vec![DomainSpec::HalfPlane];
        domains.extend(
            [
                (2.0, 1.0),
                (2.0, 0.5),
                (2.0, 0.1),
                (-2.0, 1.0),
                (1.5, 0.3),
                (-1.5, 0.4),
                (3.0, 2.0),
                (1.2, 0.2),
                (-1.2, 0.05),
                (5.0, 4.0),
                (2.0, 3.0),
                (-3.0, 0.5),
                (1.05, 1.0),
                (-4.0, 6.0),
            ]
            .map(|(x0, h)| slit(x0, h)),
        );
        domains.extend([
            DomainSpec::Perturbed { x0: 2.0, h: 1.0, k: 0.5 },
            DomainSpec::Perturbed { x0: -2.0, h: 0.7, k: 2.0 },
            DomainSpec::Perturbed { x0: 1.5, h: 2.0, k: 0.8 },
            DomainSpec::Double { x1: -2.0, h1: 0.8, x2: 1.7, h2: 1.2 },
            DomainSpec::Double { x1: 1.5, h1: 0.5, x2: -3.0, h2: 2.0 },
            DomainSpec::Double { x1: -1.3, h1: 0.3, x2: 1.3, h2: 0.3 },
        ]);
        Self {
            alphas: (1..=9).map(|k| k as f64 / 10.0).collect(),
            domains,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlitExtremalConfig {
    pub pairs: Vec<[f64; 2]>,
    /// Radii `r < 1` of the non-extremal maps `z ↦ g(rz)`.
    pub radii: Vec<f64>,
}

impl Default for SlitExtremalConfig {
    fn default() -> Self {
        Self {
            pairs: vec![[-1.0, 1.0], [0.0, 1.0], [-2.0, 3.0]],
            radii: vec![0.5, 0.9, 0.99],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReflectionConfig {
    pub domains: Vec<DomainSpec>,
    /// Sample points of `B` checked for `f(B) ⊂ ℍ`.
    pub samples: usize,
}

impl Default for ReflectionConfig {
    fn default() -> Self {
        Self {
            domains: vec![
                DomainSpec::HalfPlane,
                slit(2.0, 1.0),
                slit(-1.5, 0.4),
                DomainSpec::Perturbed { x0: 2.0, h: 1.0, k: 0.5 },
                DomainSpec::Double { x1: -2.0, h1: 0.8, x2: 1.7, h2: 1.2 },
            ],
            samples: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HaymanWuConfig {
    /// Marching-squares grid resolution.
    pub resolution: usize,
    /// Curve-length tolerance per component.
    pub tolerance: f64,
}

impl Default for HaymanWuConfig {
    fn default() -> Self {
        Self {
            resolution: crate::preimage::TRACE_RESOLUTION,
            tolerance: crate::preimage::TRACE_TOLERANCE,
        }
    }
}

/// Scenario configuration, read from TOML. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub seed: u64,
    /// Caps the instance count: the polygon count, or the number of family
    /// members taken from each domain list.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instances: Option<usize>,
    pub output_dir: PathBuf,
    /// Write per-row runtimes into `results.csv`; this makes the file vary
    /// between runs.
    pub record_runtime: bool,
    pub svg: bool,
    pub tolerances: Tolerances,
    pub brown_flinn: BrownFlinnConfig,
    pub level_set: LevelSetConfig,
    pub conjecture: ConjectureConfig,
    pub slit_extremal: SlitExtremalConfig,
    pub reflection: ReflectionConfig,
    pub hayman_wu: HaymanWuConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::All,
            seed: 20240521,
            instances: None,
            output_dir: PathBuf::from("results"),
            record_runtime: false,
            svg: false,
            tolerances: Tolerances::default(),
            brown_flinn: BrownFlinnConfig::default(),
            level_set: LevelSetConfig::default(),
            conjecture: ConjectureConfig::default(),
            slit_extremal: SlitExtremalConfig::default(),
            reflection: ReflectionConfig::default(),
            hayman_wu: HaymanWuConfig::default(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_err(e.to_string()))
    }

    fn take<T: Clone>(&self, v: &[T]) -> Vec<T> {
        v.iter().take(self.instances.unwrap_or(usize::MAX)).cloned().collect()
    }

    pub fn polygon_count(&self) -> usize {
        self.instances.unwrap_or(self.brown_flinn.polygons)
    }

    /// Checks ranges and that every family member can be built.
    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("curve_length", t.curve_length),
            ("round_trip", t.round_trip),
            ("corrector", t.corrector),
            ("equality", t.equality),
            ("hayman_wu.tolerance", self.hayman_wu.tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.instances == Some(0) {
            return Err(config_err("instances must be at least 1"));
        }
        if self.polygon_count() == 0 {
            return Err(config_err("brown_flinn.polygons must be at least 1"));
        }
        if self.brown_flinn.points < 3 {
            return Err(config_err("brown_flinn.points must be at least 3"));
        }
        if let Some(a) = self.conjecture.alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(config_err(format!("conjecture alpha {a} is outside (0, 1)")));
        }
        if let Some(h) = self.level_set.sweep_heights.iter().find(|h| !(**h > 0.0)) {
            return Err(config_err(format!("sweep height {h} must be positive")));
        }
        if self.level_set.sweep_heights.windows(2).any(|w| w[1] >= w[0]) {
            return Err(config_err("sweep heights must decrease"));
        }
        if let Some(p) = self.slit_extremal.pairs.iter().find(|p| !(p[0] < p[1] && p[1].is_finite() && p[0].is_finite())) {
            return Err(config_err(format!("slit pair {p:?} needs a < b")));
        }
        if let Some(r) = self.slit_extremal.radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(config_err(format!("radius {r} is outside (0, 1)")));
        }
        if self.hayman_wu.resolution < 8 {
            return Err(config_err("hayman_wu.resolution must be at least 8"));
        }
        let sweep = self.level_set.sweep_heights.iter().map(|&h| slit(self.level_set.sweep_x0, h));
        for d in self
            .level_set
            .domains
            .iter()
            .chain(&self.conjecture.domains)
            .chain(&self.reflection.domains)
            .copied()
            .chain(sweep)
        {
            d.build().map_err(|e| config_err(format!("domain {d:?}: {e}")))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowKind {
    /// `measured ≤ bound`.
    Bound,
    /// `measured < bound`.
    Strict,
    /// `measured = bound` within the row tolerance.
    Equality,
}

/// One measured quantity against its bound. `margin = bound - measured`,
/// kept as computed even when negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: Scenario,
    pub id: String,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub kind: RowKind,
    pub bound_description: String,
    pub passed: bool,
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl ResultRow {
    fn new(scenario: Scenario, id: String, measured: f64, bound: f64, kind: RowKind, tolerance: f64, desc: &str) -> Self {
        let margin = bound - measured;
        let passed = match kind {
            RowKind::Bound => margin >= 0.0,
            RowKind::Strict => margin > 0.0,
            RowKind::Equality => margin.abs() <= tolerance,
        };
        Self {
            scenario,
            id,
            measured,
            bound,
            margin,
            tolerance,
            kind,
            bound_description: desc.to_string(),
            passed,
            runtime_ms: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Numeric,
    Hypothesis,
}

/// An instance that produced no rows, or whose setup broke an assumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub scenario: Scenario,
    pub instance: String,
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<Failure>,
    pub extras: BTreeMap<String, Value>,
    /// SVG documents keyed by file stem.
    pub svgs: BTreeMap<String, String>,
}

impl RunOutcome {
    fn merge(&mut self, other: RunOutcome) {
        self.rows.extend(other.rows);
        self.failures.extend(other.failures);
        self.extras.extend(other.extras);
        self.svgs.extend(other.svgs);
    }

    fn sort(&mut self) {
        self.rows.sort_by(|a, b| (a.scenario, &a.id).cmp(&(b.scenario, &b.id)));
        self.failures
            .sort_by(|a, b| (a.scenario, &a.instance).cmp(&(b.scenario, &b.instance)));
    }

    pub fn violations(&self) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(|r| !r.passed)
    }

    /// Smallest margin over `Bound` and `Strict` rows.
    pub fn min_margin(&self, scenario: Scenario) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.scenario == scenario && r.kind != RowKind::Equality)
            .map(|r| r.margin)
            .reduce(f64::min)
    }

    /// Bound violations take precedence over numeric failures.
    pub fn exit_code(&self) -> i32 {
        if self.violations().next().is_some() {
            EXIT_VIOLATION
        } else if !self.failures.is_empty() {
            EXIT_NUMERIC
        } else {
            EXIT_OK
        }
    }
}

/// Instance result before aggregation.
struct Part {
    outcome: RunOutcome,
}

impl Part {
    fn new() -> Self {
        Self { outcome: RunOutcome::default() }
    }

    fn row(&mut self, r: ResultRow) {
        self.outcome.rows.push(r);
    }

    fn fail(&mut self, scenario: Scenario, instance: &str, kind: FailureKind, e: impl std::fmt::Display) {
        self.outcome.failures.push(Failure {
            scenario,
            instance: instance.to_string(),
            kind,
            message: e.to_string(),
        });
    }
}

/// Runs `work` on every instance in parallel, timing each one.
fn run_instances<T: Sync>(items: &[T], work: impl Fn(usize, &T) -> Part + Sync) -> RunOutcome {
    let parts: Vec<RunOutcome> = items
        .par_iter()
        .enumerate()
        .map(|(i, item)| {
            let start = Instant::now();
            let mut part = work(i, item);
            let ms = start.elapsed().as_secs_f64() * 1e3;
            for r in &mut part.outcome.rows {
                r.runtime_ms = ms;
            }
            part.outcome
        })
        .collect();
    let mut out = RunOutcome::default();
    for p in parts {
        out.merge(p);
    }
    out
}

fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

const PI2: f64 = PI * PI;

/// Checks `Λ(∂E) ≤ (π²/2)·diam ≤ π²` and `σ(∂E) ≤ πL/2 < π²` on seeded
/// random convex polygons and two fixed shapes.
pub fn run_brown_flinn(cfg: &ScenarioConfig) -> RunOutcome {
    let s = Scenario::BrownFlinn;
    let mut items: Vec<(String, Option<HyperbolicPolygon>)> =
        (0..cfg.polygon_count()).map(|i| (format!("p{i:05}"), None)).collect();
    // Near-disc and thin extremes.
    items.push(("ring256".into(), HyperbolicPolygon::regular(256, 1.0 - 1e-3, 0.0).ok()));
    let sliver = [C::new(-0.8, -1e-3), C::new(0.8, -1e-3), C::new(0.8, 1e-3), C::new(-0.8, 1e-3)];
    items.push(("sliver".into(), HyperbolicPolygon::from_klein(&sliver).ok()));
    let named = items.len() - 2;

    let mut out = run_instances(&items, |i, (name, fixed)| {
        let mut part = Part::new();
        let poly = match fixed {
            Some(p) => p.clone(),
            None if i < named => random_convex_polygon(&mut instance_rng(cfg.seed, i), cfg.brown_flinn.points),
            None => {
                part.fail(s, name, FailureKind::Numeric, "polygon construction failed");
                return part;
            }
        };
        let perimeter = poly.euclidean_perimeter();
        let diam = poly.euclidean_diameter(DIAMETER_SAMPLES);
        let tol = 1e-12 * perimeter.max(1.0);
        part.row(ResultRow::new(s, format!("{name}:perimeter"), perimeter, PI2 / 2.0 * diam, RowKind::Bound, tol, "Euclidean perimeter <= (pi^2/2) diam"));
        part.row(ResultRow::new(s, format!("{name}:diameter"), PI2 / 2.0 * diam, PI2, RowKind::Bound, tol, "(pi^2/2) diam <= pi^2"));
        match spherical_bound_check(&poly) {
            Ok(rep) => {
                let half = PI * rep.klein_length / 2.0;
                part.row(ResultRow::new(s, format!("{name}:spherical"), rep.sigma_length, half, RowKind::Bound, tol, "spherical perimeter <= pi L/2, L the Klein perimeter after centering"));
                part.row(ResultRow::new(s, format!("{name}:klein"), half, PI2, RowKind::Strict, tol, "pi L/2 < pi^2"));
                if !rep.lift_convex {
                    part.fail(s, name, FailureKind::Hypothesis, "unrolled lift is not convex");
                }
                if fixed.is_some() {
                    part.outcome.extras.insert(
                        format!("{}/{name}", s.name()),
                        json!({
                            "perimeter": perimeter,
                            "diameter": diam,
                            "perimeter_over_diameter": perimeter / diam,
                            "sigma_length": rep.sigma_length,
                            "klein_length": rep.klein_length,
                        }),
                    );
                }
            }
            Err(e) => part.fail(s, name, FailureKind::Numeric, e),
        }
        if cfg.svg {
            part.outcome.svgs.insert(format!("{}-{name}", s.name()), polygon_svg(&poly));
        }
        part
    });
    out.extras.insert(format!("{}/polygons", s.name()), json!(named));
    out
}

/// Largest relative round-trip error `|F(F⁻¹ z) - z| / max(1, |z|)` over
/// the interior points of a curve.
fn round_trip_error(p: &MapPipeline, pts: &[C]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in &pts[1..pts.len().saturating_sub(1)] {
        let back = p.eval(p.inverse(z)?)?;
        worst = worst.max((back - z).norm() / z.norm().max(1.0));
    }
    Ok(worst)
}

fn domain_name(p: &HMProblem) -> String {
    p.label().replace(' ', "")
}

/// `Λ(γ_{1/2}) ≤ π` over half-plane domains, equality for `ℍ`, and the
/// monotone approach to `π` as a slit shrinks.
pub fn run_level_set(cfg: &ScenarioConfig) -> RunOutcome {
    let s = Scenario::LevelSet;
    let tol = cfg.tolerances;
    let opts = tol.trace_options();
    let mut items: Vec<(String, DomainSpec)> = cfg
        .take(&cfg.level_set.domains)
        .into_iter()
        .map(|d| (String::new(), d))
        .collect();
    let sweep: Vec<DomainSpec> = cfg.level_set.sweep_heights.iter().map(|&h| slit(cfg.level_set.sweep_x0, h)).collect();
    items.extend(sweep.iter().enumerate().map(|(k, d)| (format!("sweep{k:02}"), *d)));

    let mut out = run_instances(&items, |_, (tag, spec)| {
        let mut part = Part::new();
        let p = match spec.build() {
            Ok(p) => p,
            Err(e) => {
                part.fail(s, &format!("{spec:?}"), FailureKind::Numeric, e);
                return part;
            }
        };
        let name = if tag.is_empty() { domain_name(&p) } else { format!("{tag}:{}", domain_name(&p)) };
        match trace_level_curve(&p, 0.5, opts) {
            Ok(lc) => {
                let kind = if p.is_half_plane() { RowKind::Equality } else { RowKind::Bound };
                let t = if p.is_half_plane() { tol.equality } else { lc.error_bound };
                part.row(ResultRow::new(s, format!("{name}:length"), lc.length_estimate, PI, kind, t, "length of the 1/2 level curve <= pi, equality for the half-plane"));
                match round_trip_error(p.pipeline(), lc.curve.points()) {
                    Ok(rt) => part.row(ResultRow::new(s, format!("{name}:round-trip"), rt, tol.round_trip, RowKind::Bound, 0.0, "map round trip on the traced curve")),
                    Err(e) => part.fail(s, &name, FailureKind::Numeric, e),
                }
                if cfg.svg {
                    part.outcome.svgs.insert(format!("{}-{}", s.name(), file_stem(&name)), level_curves_svg(&p, std::slice::from_ref(&lc)));
                }
                part.outcome.extras.insert(format!("{}/{name}", s.name()), json!({"length": lc.length_estimate, "max_residual": lc.max_residual}));
            }
            Err(e) => part.fail(s, &name, FailureKind::Numeric, e),
        }
        part
    });

    // Monotone sweep: each step toward h = 0 must not shorten the curve.
    let lengths: Vec<Option<f64>> = (0..sweep.len())
        .map(|k| {
            let prefix = format!("sweep{k:02}:");
            out.rows
                .iter()
                .find(|r| r.id.starts_with(&prefix) && r.id.ends_with(":length"))
                .map(|r| r.measured)
        })
        .collect();
    for k in 1..lengths.len() {
        if let (Some(prev), Some(next)) = (lengths[k - 1], lengths[k]) {
            let id = format!("sweep-monotone:{k:02}");
            out.rows.push(ResultRow::new(s, id, prev, next, RowKind::Strict, 0.0, "length increases as the slit height decreases"));
        }
    }
    out
}

/// `Λ(γ_α) ≤ 2π(1-α)/sin πα` across the family, equality for `ℍ`.
pub fn run_conjecture_sweep(cfg: &ScenarioConfig) -> RunOutcome {
    let s = Scenario::ConjectureSweep;
    let tol = cfg.tolerances;
    let opts = tol.trace_options();
    let domains = cfg.take(&cfg.conjecture.domains);
    let mut out = run_instances(&domains, |_, spec| {
        let mut part = Part::new();
        let p = match spec.build() {
            Ok(p) => p,
            Err(e) => {
                part.fail(s, &format!("{spec:?}"), FailureKind::Numeric, e);
                return part;
            }
        };
        let name = domain_name(&p);
        let mut curves = Vec::new();
        for &alpha in &cfg.conjecture.alphas {
            let bound = match conjecture_bound(alpha) {
                Ok(b) => b,
                Err(e) => {
                    part.fail(s, &name, FailureKind::Numeric, e);
                    continue;
                }
            };
            match trace_level_curve(&p, alpha, opts) {
                Ok(lc) => {
                    let (kind, t) = if p.is_half_plane() { (RowKind::Equality, tol.equality) } else { (RowKind::Strict, lc.error_bound) };
                    part.row(ResultRow::new(s, format!("{name}:alpha={alpha}"), lc.length_estimate, bound, kind, t, "length of the alpha level curve <= 2 pi (1 - alpha) / sin(pi alpha)"));
                    curves.push(lc);
                }
                Err(e) => part.fail(s, &format!("{name}:alpha={alpha}"), FailureKind::Numeric, e),
            }
        }
        if cfg.svg {
            part.outcome.svgs.insert(format!("{}-{}", s.name(), file_stem(&name)), level_curves_svg(&p, &curves));
        }
        part
    });
    if let Some(m) = out.min_margin(s) {
        out.extras.insert(format!("{}/min_margin", s.name()), json!(m));
    }
    out
}

/// Length of `g(Γ)` with `Γ = {w ∈ 𝔻 : arg((w-1)/(w+1)) = ±3π/4}`, the two
/// mirror arcs through `±1` inside the disc, for `g(z) = base(r z)`.
pub fn slit_curve_length(base: &MapPipeline, r: f64, tol: f64) -> Result<f64> {
    let g = |z: C| -> C {
        let v = if r == 1.0 && z.norm() >= 1.0 { base.boundary_value(z) } else { base.eval(r * z) };
        v.unwrap_or(C::new(f64::NAN, f64::NAN))
    };
    let upper = SampledCurve::from_parametric(|t| g(halfplane_level_point(0.75, t, -1.0, 1.0)), 0.0, 1.0, tol / 2.0, false)?;
    let lower = SampledCurve::from_parametric(|t| g(halfplane_level_point(0.75, t, -1.0, 1.0).conj()), 0.0, 1.0, tol / 2.0, false)?;
    let len = upper.euclidean_length() + lower.euclidean_length();
    if !len.is_finite() {
        return Err(Error::Tracing {
            reason: "slit curve left the map domain".into(),
            last_good: Vec::new(),
        });
    }
    Ok(len)
}

/// `Λ(g(Γ)) = π(b-a)` for the two-slit map and strictly less for `g(rz)`.
pub fn run_slit_extremal(cfg: &ScenarioConfig) -> RunOutcome {
    let s = Scenario::SlitExtremal;
    let tol = cfg.tolerances;
    let mut items = Vec::new();
    for pair in cfg.take(&cfg.slit_extremal.pairs) {
        items.push((pair, 1.0));
        for &r in &cfg.slit_extremal.radii {
            items.push((pair, r));
        }
    }
    run_instances(&items, |_, &([a, b], r)| {
        let mut part = Part::new();
        let name = format!("pair({a},{b})");
        let result = two_slit_map(a, b).and_then(|g| {
            let len = slit_curve_length(&g, r, tol.curve_length)?;
            let ends = (g.eval(C::new(-r, 0.0))?, g.eval(C::new(r, 0.0))?);
            Ok((len, ends))
        });
        let result = if r == 1.0 { result.map(|(len, _)| (len, (C::new(a, 0.0), C::new(b, 0.0)))) } else { result };
        match result {
            Ok((len, (ga, gb))) => {
                let bound = PI * (gb.re - ga.re);
                if r == 1.0 {
                    part.row(ResultRow::new(s, format!("{name}:extremal"), len, bound, RowKind::Equality, tol.equality, "length of g(Gamma) <= pi (b - a), equality for the two-slit plane"));
                } else {
                    part.row(ResultRow::new(s, format!("{name}:r={r}"), len, bound, RowKind::Strict, tol.curve_length, "length of g(Gamma) < pi (g(1) - g(-1)) off the two-slit plane"));
                }
            }
            Err(e) => part.fail(s, &format!("{name}:r={r}"), FailureKind::Numeric, e),
        }
        part
    })
}

/// Conformal reflection across `γ = γ_{1/2}`: `f(B) ⊂ ℍ`, `f = id` on `γ`,
/// and `Λ(γ) ≤ π`.
pub fn run_reflection_check(cfg: &ScenarioConfig) -> RunOutcome {
    let s = Scenario::ReflectionCheck;
    let tol = cfg.tolerances;
    let opts = tol.trace_options();
    let domains = cfg.take(&cfg.reflection.domains);
    run_instances(&domains, |i, spec| {
        let mut part = Part::new();
        let p = match spec.build() {
            Ok(p) => p,
            Err(e) => {
                part.fail(s, &format!("{spec:?}"), FailureKind::Numeric, e);
                return part;
            }
        };
        let name = domain_name(&p);
        let (a, b) = p.marked_preimages();
        let refl = match conformal_reflection_across(p.pipeline(), a, b) {
            Ok(f) => f,
            Err(e) => {
                part.fail(s, &name, FailureKind::Numeric, e);
                return part;
            }
        };
        // f(B) ⊂ ℍ on points of B drawn from the source half-disc.
        let mut rng = instance_rng(cfg.seed, i);
        let (m, rad) = refl.source_center_radius();
        let mut outside = 0usize;
        let mut errors = 0usize;
        for _ in 0..cfg.reflection.samples {
            use rand::Rng;
            let rr = rad * rng.gen::<f64>().sqrt();
            let th = PI * rng.gen_range(1e-6..1.0 - 1e-6);
            let zeta = C::new(m, 0.0) + C::from_polar(rr, th);
            match p.pipeline().eval(zeta).and_then(|w| refl.apply(w)) {
                Ok(fw) if fw.im > 0.0 => {}
                Ok(_) => outside += 1,
                Err(_) => errors += 1,
            }
        }
        if outside > 0 {
            part.fail(s, &name, FailureKind::Hypothesis, format!("{outside} sample points of B reflect outside the half-plane"));
        }
        if errors > 0 {
            part.fail(s, &name, FailureKind::Numeric, format!("{errors} sample points of B could not be reflected"));
        }
        part.outcome.extras.insert(format!("{}/{name}", s.name()), json!({"samples": cfg.reflection.samples, "outside": outside, "errors": errors}));

        // Fixed points on γ.
        let mut worst = 0.0f64;
        for k in 1..200 {
            let th = PI * k as f64 / 200.0;
            match refl.gamma_point(th).and_then(|w| Ok((refl.apply(w)? - w).norm() / w.norm().max(1.0))) {
                Ok(d) => worst = worst.max(d),
                Err(e) => {
                    part.fail(s, &name, FailureKind::Numeric, e);
                    break;
                }
            }
        }
        part.row(ResultRow::new(s, format!("{name}:fixed-points"), worst, FIXED_POINT_TOL, RowKind::Bound, 0.0, "reflection fixes gamma pointwise"));

        match trace_level_curve(&p, 0.5, opts) {
            Ok(lc) => {
                let (kind, t) = if p.is_half_plane() { (RowKind::Equality, tol.equality) } else { (RowKind::Strict, lc.error_bound) };
                part.row(ResultRow::new(s, format!("{name}:length"), lc.length_estimate, PI, kind, t, "Euclidean length of gamma <= pi, equality for the semicircle"));
                if cfg.svg {
                    part.outcome.svgs.insert(format!("{}-{}", s.name(), file_stem(&name)), level_curves_svg(&p, std::slice::from_ref(&lc)));
                }
            }
            Err(e) => part.fail(s, &name, FailureKind::Numeric, e),
        }
        part
    })
}

/// Preimage lengths of a line or circle under the fixture maps: spherical
/// total below `π²`, Euclidean below spherical, convex complement.
pub fn run_hayman_wu(cfg: &ScenarioConfig) -> RunOutcome {
    let s = Scenario::HaymanWu;
    let fixtures = match default_fixtures() {
        Ok(f) => f,
        Err(e) => {
            let mut out = RunOutcome::default();
            out.failures.push(Failure { scenario: s, instance: "fixtures".into(), kind: FailureKind::Numeric, message: e.to_string() });
            return out;
        }
    };
    let fixtures = cfg.take(&fixtures);
    let hw = &cfg.hayman_wu;
    run_instances(&fixtures, |_, fx| {
        let mut part = Part::new();
        let name = fx.name.clone();
        let verdict = hypothesis_check(&fx.g, &fx.l);
        if verdict == HypothesisVerdict::Violated {
            part.fail(s, &name, FailureKind::Hypothesis, "hypothesis check failed");
            return part;
        }
        match preimage_components_at(&fx.g, &fx.l, hw.resolution, hw.tolerance) {
            Ok(rep) => {
                part.row(ResultRow::new(s, format!("{name}:spherical"), rep.spherical_total, PI2, RowKind::Strict, rep.spherical_error, "spherical length of the preimage < pi^2"));
                part.row(ResultRow::new(s, format!("{name}:euclidean"), rep.euclidean_total, rep.spherical_total, RowKind::Strict, rep.spherical_error, "Euclidean length < spherical length"));
                let nonconvex = rep.convexity_verdicts.iter().filter(|c| !**c).count() + usize::from(!rep.region_convex);
                part.row(ResultRow::new(s, format!("{name}:nonconvex"), nonconvex as f64, 0.0, RowKind::Equality, 0.0, "the complement of the removed pieces is hyperbolically convex"));
                part.outcome.extras.insert(
                    format!("{}/{name}", s.name()),
                    json!({
                        "hypothesis_verdict": verdict,
                        "components": rep.components.len(),
                        "euclidean_total": rep.euclidean_total,
                        "spherical_total": rep.spherical_total,
                        "convexity_verdicts": rep.convexity_verdicts,
                        "region_convex": rep.region_convex,
                    }),
                );
                if cfg.svg {
                    let curves: Vec<&[C]> = rep.components.iter().map(|c| c.curve.points()).collect();
                    part.outcome.svgs.insert(format!("{}-{}", s.name(), file_stem(&name)), disc_svg(&curves, true));
                }
            }
            Err(e) => part.fail(s, &name, FailureKind::Numeric, e),
        }
        part
    })
}

/// Validates the configuration and runs the selected scenarios.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let mut out = RunOutcome::default();
    for s in cfg.scenario.expand() {
        out.merge(match s {
            Scenario::BrownFlinn => run_brown_flinn(cfg),
            Scenario::LevelSet => run_level_set(cfg),
            Scenario::ConjectureSweep => run_conjecture_sweep(cfg),
            Scenario::SlitExtremal => run_slit_extremal(cfg),
            Scenario::ReflectionCheck => run_reflection_check(cfg),
            Scenario::HaymanWu => run_hayman_wu(cfg),
            Scenario::All => unreachable!("expanded"),
        });
    }
    out.sort();
    Ok(out)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    scenario: &'a str,
    id: &'a str,
    measured: f64,
    bound: f64,
    margin: f64,
    runtime_ms: Option<f64>,
}

/// `results.csv`. Runtimes are left empty unless requested.
pub fn results_csv(out: &RunOutcome, record_runtime: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &out.rows {
        w.serialize(CsvRow {
            scenario: r.scenario.name(),
            id: &r.id,
            measured: r.measured,
            bound: r.bound,
            margin: r.margin,
            runtime_ms: record_runtime.then_some(r.runtime_ms),
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// `report.json`: rows with bound descriptions, failures, extras and a
/// per-scenario summary. Free of timings.
pub fn report_json(cfg: &ScenarioConfig, out: &RunOutcome) -> Value {
    let summary: BTreeMap<&str, Value> = cfg
        .scenario
        .expand()
        .into_iter()
        .map(|s| {
            let rows = out.rows.iter().filter(|r| r.scenario == s);
            json!({
                "rows": rows.clone().count(),
                "violations": rows.filter(|r| !r.passed).count(),
                "failures": out.failures.iter().filter(|f| f.scenario == s).count(),
                "min_margin": out.min_margin(s),
            })
        })
        .zip(cfg.scenario.expand())
        .map(|(v, s)| (s.name(), v))
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "scenario": cfg.scenario,
        "seed": cfg.seed,
        "exit_code": out.exit_code(),
        "summary": summary,
        "rows": out.rows,
        "failures": out.failures,
        "extras": out.extras,
    })
}

fn metadata_json(cfg: &ScenarioConfig, out: &RunOutcome, started: &str, elapsed_ms: f64) -> Value {
    let runtimes: BTreeMap<String, f64> = out
        .rows
        .iter()
        .map(|r| (format!("{}/{}", r.scenario.name(), r.id), r.runtime_ms))
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "started_unix_s": started,
        "elapsed_ms": elapsed_ms,
        "threads": rayon::current_num_threads(),
        "crate_version": env!("CARGO_PKG_VERSION"),
        "scenario": cfg.scenario,
        "row_runtime_ms": runtimes,
    })
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

/// Runs the configured scenarios and writes `results.csv`, `report.json`,
/// `metadata.json`, `config.resolved.toml` and, if enabled, `svg/`.
pub fn run_and_write(cfg: &ScenarioConfig) -> Result<RunOutcome> {
    let started = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_default();
    let clock = Instant::now();
    let out = run_scenario(cfg)?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    write_file(&dir.join("config.resolved.toml"), &cfg.to_toml()?)?;
    write_file(&dir.join("results.csv"), &results_csv(&out, cfg.record_runtime)?)?;
    let report = serde_json::to_string_pretty(&report_json(cfg, &out)).map_err(|e| Error::Io(e.to_string()))?;
    write_file(&dir.join("report.json"), &report)?;
    let meta = metadata_json(cfg, &out, &started, clock.elapsed().as_secs_f64() * 1e3);
    write_file(&dir.join("metadata.json"), &serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?)?;
    if cfg.svg && !out.svgs.is_empty() {
        let svg_dir = dir.join("svg");
        fs::create_dir_all(&svg_dir).map_err(|e| io_err(&svg_dir, e))?;
        for (stem, doc) in &out.svgs {
            write_file(&svg_dir.join(format!("{stem}.svg")), doc)?;
        }
    }
    Ok(out)
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '.' { c } else { '_' })
        .collect()
}

/// Curves drawn in the unit disc; closed when `closed` is set.
fn disc_svg(curves: &[&[C]], closed: bool) -> String {
    let size = 400.0;
    let sx = |x: f64| (x + 1.05) / 2.1 * size;
    let sy = |y: f64| (1.05 - y) / 2.1 * size;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{}" fill="none" stroke="black"/>"#, sx(0.0), sy(0.0), size / 2.1);
    let tag = if closed { "polygon" } else { "polyline" };
    for pts in curves {
        let _ = writeln!(s, r#"<{tag} fill="none" stroke="steelblue" points="{}"/>"#, svg_points(pts, &sx, &sy));
    }
    s.push_str("</svg>\n");
    s
}

fn polygon_svg(p: &HyperbolicPolygon) -> String {
    let pts: Vec<C> = p.edges().iter().flat_map(|e| e.sample(DIAMETER_SAMPLES)).collect();
    disc_svg(&[&pts], true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            instances: Some(3),
            conjecture: ConjectureConfig {
                alphas: vec![0.25, 0.5],
                ..ConjectureConfig::default()
            },
            level_set: LevelSetConfig {
                sweep_heights: vec![0.5, 0.1],
                ..LevelSetConfig::default()
            },
            reflection: ReflectionConfig { samples: 100, ..ReflectionConfig::default() },
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::EACH.iter().chain([&Scenario::All]) {
            assert_eq!(s.name().parse::<Scenario>().unwrap(), *s);
        }
        assert!("nope".parse::<Scenario>().is_err());
        assert_eq!(Scenario::All.expand().len(), 6);
    }

    #[test]
    fn config_rejects_unknown_keys_and_bad_ranges() {
        assert!(ScenarioConfig::from_toml_str("scenario = \"level-set\"\nbogus = 1\n").is_err());
        assert!(ScenarioConfig::from_toml_str("[tolerances]\ncurve = 1e-7\n").is_err());
        let cfg = ScenarioConfig::from_toml_str("scenario = \"conjecture-sweep\"\n[conjecture]\nalphas = [0.5, 1.0]\n").unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let bad_slit = "[[level_set.domains]]\nkind = \"slit\"\nx0 = 0.5\nh = 1.0\n";
        assert!(ScenarioConfig::from_toml_str(bad_slit).unwrap().validate().is_err());
        let zero = ScenarioConfig { instances: Some(0), ..ScenarioConfig::default() };
        assert!(zero.validate().is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = small();
        let text = cfg.to_toml().unwrap();
        assert_eq!(ScenarioConfig::from_toml_str(&text).unwrap(), cfg);
        ScenarioConfig::default().validate().unwrap();
        assert!(ScenarioConfig::default().conjecture.domains.len() >= 20);
    }

    #[test]
    fn margins_are_never_clamped() {
        let r = ResultRow::new(Scenario::LevelSet, "x".into(), 4.0, 3.0, RowKind::Bound, 0.0, "");
        assert_eq!(r.margin, -1.0);
        assert!(!r.passed);
        let e = ResultRow::new(Scenario::LevelSet, "x".into(), 3.0 + 1e-7, 3.0, RowKind::Equality, 1e-6, "");
        assert!(e.passed && e.margin < 0.0);
        let st = ResultRow::new(Scenario::LevelSet, "x".into(), 3.0, 3.0, RowKind::Strict, 0.0, "");
        assert!(!st.passed);
        let out = RunOutcome { rows: vec![r], ..RunOutcome::default() };
        assert_eq!(out.exit_code(), EXIT_VIOLATION);
    }

    #[test]
    fn slit_extremal_lengths() {
        let g = two_slit_map(-1.0, 1.0).unwrap();
        assert_abs_diff_eq!(slit_curve_length(&g, 1.0, 1e-8).unwrap(), 2.0 * PI, epsilon = 1e-6);
        let g = two_slit_map(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(slit_curve_length(&g, 1.0, 1e-8).unwrap(), PI, epsilon = 1e-6);
        // For small r, g(rz) ≈ r·g′(0)·z. Each arc of Γ is the minor arc of
        // the circle of radius √2 through ±1, central angle π/2.
        let g = two_slit_map(-1.0, 1.0).unwrap();
        let r = 1e-3;
        let d0 = g.derivative(C::new(0.0, 0.0)).unwrap().re;
        let approx = r * d0 * 2.0 * 2f64.sqrt() * PI / 2.0;
        assert_abs_diff_eq!(slit_curve_length(&g, r, 1e-12).unwrap(), approx, epsilon = 1e-8);
    }

    #[test]
    fn small_suite_runs_clean_and_deterministic() {
        let cfg = small();
        let a = run_scenario(&cfg).unwrap();
        let b = run_scenario(&cfg).unwrap();
        assert!(a.failures.is_empty(), "{:?}", a.failures);
        assert_eq!(a.violations().count(), 0, "{:?}", a.violations().collect::<Vec<_>>());
        assert_eq!(a.exit_code(), EXIT_OK);
        assert_eq!(results_csv(&a, false).unwrap(), results_csv(&b, false).unwrap());
        assert_eq!(report_json(&cfg, &a), report_json(&cfg, &b));
        let mut ids: Vec<_> = a.rows.iter().map(|r| (r.scenario, r.id.clone())).collect();
        let n = ids.len();
        ids.dedup();
        assert_eq!(ids.len(), n, "row ids are unique");
        for s in Scenario::EACH {
            assert!(a.rows.iter().any(|r| r.scenario == s), "{s} produced rows");
        }
    }

    #[test]
    fn outputs_are_written() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ScenarioConfig {
            scenario: Scenario::SlitExtremal,
            output_dir: dir.path().to_path_buf(),
            svg: true,
            ..small()
        };
        let out = run_and_write(&cfg).unwrap();
        assert_eq!(out.exit_code(), EXIT_OK);
        let csv = fs::read_to_string(dir.path().join("results.csv")).unwrap();
        assert!(csv.starts_with("scenario,id,measured,bound,margin,runtime_ms\n"));
        assert!(csv.lines().nth(1).unwrap().ends_with(','));
        let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
        assert_eq!(report["schema_version"], 1);
        assert!(report["rows"][0]["bound_description"].as_str().unwrap().contains("pi"));
        let resolved = ScenarioConfig::load(&dir.path().join("config.resolved.toml")).unwrap();
        assert_eq!(resolved, cfg);
        assert!(dir.path().join("metadata.json").exists());
    }
}
