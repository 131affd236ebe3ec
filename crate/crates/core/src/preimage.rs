//! Preimages of lines and circles under conformal maps of the disc: implicit
//! curve tracing, the boundary-structure hypothesis on `Ω ∩ r(Ω)`, and the
//! resulting length and convexity verdicts.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::{two_slit_map, MapPipeline, MapStep};
use crate::curve::{spherical_curve_length, SampledCurve};
use crate::error::{Error, Result};
use crate::hyperbolic::{klein_map, Model};
use crate::moebius::{reflection_fixing, Circline, MoebiusMap};
use crate::planar;

/// Tracing stops on this circle; the rest of each component is a tail.
pub const DISC_CUT: f64 = 1.0 - 1e-8;
const JITTER_RETRIES: usize = 3;
const MIN_CHORD: f64 = 1e-12;
/// Absolute position error assumed for Klein images of traced points.
const TURN_TOL: f64 = 1e-13;

fn clamp_to_cut(z: C) -> C {
    let r = z.norm();
    if r > DISC_CUT {
        z * (DISC_CUT / r)
    } else {
        z
    }
}

struct Field<'a, F: Fn(C) -> f64 + Sync> {
    h: &'a F,
}

impl<F: Fn(C) -> f64 + Sync> Field<'_, F> {
    fn at(&self, z: C) -> f64 {
        (self.h)(clamp_to_cut(z))
    }

    /// Zero of the field on the segment `[p, q]`, whose ends differ in sign.
    fn bisect(&self, mut p: C, mut q: C, mut fp: f64) -> C {
        for _ in 0..80 {
            let m = (p + q) / 2.0;
            if m == p || m == q {
                break;
            }
            let fm = self.at(m);
            if fm == 0.0 {
                return m;
            }
            if (fm > 0.0) == (fp > 0.0) {
                p = m;
                fp = fm;
            } else {
                q = m;
            }
        }
        (p + q) / 2.0
    }

    /// Zero near `m` along the normal direction `n`, searched out to `reach`.
    fn project(&self, m: C, n: C, reach: f64) -> Option<C> {
        let f0 = self.at(m);
        if f0 == 0.0 {
            return Some(m);
        }
        let mut t = reach / 64.0;
        while t <= reach {
            for s in [t, -t] {
                let z = m + n * s;
                let fz = self.at(z);
                if fz.is_finite() && (fz > 0.0) != (f0 > 0.0) {
                    return Some(self.bisect(m, z, f0));
                }
            }
            t *= 2.0;
        }
        None
    }
}

/// Splits `[p, q]` until the estimated missing length of each piece is
/// below `per_length` times its chord.
fn refine_segment<F: Fn(C) -> f64 + Sync>(
    field: &Field<F>,
    p: C,
    q: C,
    per_length: f64,
    depth: usize,
    pts: &mut Vec<C>,
    errs: &mut Vec<f64>,
) {
    let chord = (q - p).norm();
    let push_plain = |pts: &mut Vec<C>, errs: &mut Vec<f64>, e: f64| {
        pts.push(q);
        errs.push(e);
    };
    if chord < MIN_CHORD || depth == 0 {
        push_plain(pts, errs, 0.0);
        return;
    }
    let n = C::new(0.0, 1.0) * (q - p) / chord;
    let Some(m) = field.project((p + q) / 2.0, n, chord).map(clamp_to_cut) else {
        push_plain(pts, errs, 0.0);
        return;
    };
    if m == p || m == q {
        push_plain(pts, errs, 0.0);
        return;
    }
    let excess = ((m - p).norm() + (q - m).norm() - chord).max(0.0);
    let remaining = excess / 3.0;
    if remaining <= per_length * chord {
        pts.push(m);
        errs.push(remaining / 2.0);
        pts.push(q);
        errs.push(remaining / 2.0);
        return;
    }
    refine_segment(field, p, m, per_length, depth - 1, pts, errs);
    refine_segment(field, m, q, per_length, depth - 1, pts, errs);
}

/// Zero set of `h` inside the disc as sampled curves.
///
/// Marching squares on a `resolution × resolution` grid over `[-1, 1]²`
/// finds the components; crossings are located by bisection on cell edges
/// and every chord is split until its missing length is below
/// `tolerance / 10` per unit length. Outside the cut circle the field is
/// extended radially, so open components end on it.
pub fn trace_implicit<F>(h: F, resolution: usize, tolerance: f64) -> Result<Vec<SampledCurve>>
where
    F: Fn(C) -> f64 + Sync,
{
    if resolution < 4 {
        return Err(Error::Precondition(format!("grid resolution {resolution} is too coarse")));
    }
    let field = Field { h: &h };
    for attempt in 0..=JITTER_RETRIES {
        let jitter = if attempt == 0 {
            C::new(0.0, 0.0)
        } else {
            let k = attempt as f64;
            C::new((0.381_966 * k).fract() - 0.5, (0.618_034 * k).fract() - 0.5) * 0.5
        };
        if let Some(curves) = march(&field, resolution, jitter, tolerance)? {
            return Ok(curves);
        }
    }
    Err(Error::Tracing {
        reason: format!("zero set meets grid nodes after {JITTER_RETRIES} jittered retries"),
        last_good: vec![],
    })
}

/// One marching pass; `None` when the grid is degenerate for the field.
fn march<F: Fn(C) -> f64 + Sync>(
    field: &Field<F>,
    n: usize,
    jitter: C,
    tolerance: f64,
) -> Result<Option<Vec<SampledCurve>>> {
    let cell = 2.0 / n as f64;
    // Nodes span one extra cell on each side so every edge crossing inside
    // the disc is seen.
    let side = n + 3;
    let origin = C::new(-1.0 - cell, -1.0 - cell) + jitter * cell;
    let node = |i: usize, j: usize| origin + C::new(i as f64 * cell, j as f64 * cell);
    let values: Vec<f64> = (0..side * side)
        .into_par_iter()
        .map(|k| field.at(node(k % side, k / side)))
        .collect();
    if values.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return Ok(None);
    }
    let val = |i: usize, j: usize| values[j * side + i];
    // Edge ids: 2·node for the edge to the right, 2·node + 1 for the edge up.
    let h_edge = |i: usize, j: usize| 2 * (j * side + i);
    let v_edge = |i: usize, j: usize| 2 * (j * side + i) + 1;
    let mut crossing: HashMap<usize, C> = HashMap::new();
    let mut cross = |id: usize, p: C, q: C, fp: f64| {
        *crossing.entry(id).or_insert_with(|| field.bisect(p, q, fp))
    };
    let mut links: HashMap<usize, Vec<usize>> = HashMap::new();
    for j in 0..side - 1 {
        for i in 0..side - 1 {
            let lo = node(i, j);
            // Skip cells entirely outside the disc.
            let cx = (0.0f64).clamp(lo.re, lo.re + cell);
            let cy = (0.0f64).clamp(lo.im, lo.im + cell);
            if C::new(cx, cy).norm() >= 1.0 {
                continue;
            }
            let f = [val(i, j), val(i + 1, j), val(i + 1, j + 1), val(i, j + 1)];
            let s: Vec<bool> = f.iter().map(|v| *v > 0.0).collect();
            let corners = [node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)];
            let ids = [h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)];
            let mut hits = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                if s[a] != s[b] {
                    cross(ids[e], corners[a], corners[b], f[a]);
                    hits.push(e);
                }
            }
            let mut link = |x: usize, y: usize| {
                links.entry(ids[x]).or_default().push(ids[y]);
                links.entry(ids[y]).or_default().push(ids[x]);
            };
            match hits.len() {
                0 => {}
                2 => link(hits[0], hits[1]),
                4 => {
                    let center = field.at(lo + C::new(cell / 2.0, cell / 2.0));
                    if center == 0.0 || !center.is_finite() {
                        return Ok(None);
                    }
                    // Corners sharing the center's sign are joined through the
                    // center; each of the other two corners is cut off.
                    let cut_corner = if (center > 0.0) == s[0] { 1 } else { 0 };
                    if cut_corner == 1 {
                        link(0, 1);
                        link(2, 3);
                    } else {
                        link(3, 0);
                        link(1, 2);
                    }
                }
                _ => unreachable!("a cell has an even number of sign changes"),
            }
        }
    }
    let chains = chain_links(&links);
    let per_length = tolerance / 10.0;
    let mut curves = Vec::new();
    for (ids, closed) in chains {
        let mut raw: Vec<C> = Vec::with_capacity(ids.len());
        for id in ids {
            let z = clamp_to_cut(crossing[&id]);
            if raw.last().is_none_or(|p: &C| (z - p).norm() > 1e-15) {
                raw.push(z);
            }
        }
        if closed && raw.len() > 1 && (raw[0] - raw[raw.len() - 1]).norm() <= 1e-15 {
            raw.pop();
        }
        // Components that only run along the cut circle are artifacts of the
        // radial extension.
        if raw.iter().all(|z| z.norm() >= DISC_CUT * (1.0 - 1e-15)) {
            continue;
        }
        if raw.len() < 2 || (closed && raw.len() < 3) {
            continue;
        }
        let mut pts = vec![raw[0]];
        let mut errs = Vec::new();
        let m = raw.len();
        let segs = if closed { m } else { m - 1 };
        for k in 0..segs {
            refine_segment(field, raw[k], raw[(k + 1) % m], per_length, 40, &mut pts, &mut errs);
        }
        if closed {
            pts.pop();
        }
        dedupe(&mut pts, &mut errs, closed);
        curves.push(SampledCurve::with_errors(pts, Some(errs), closed)?);
    }
    Ok(Some(curves))
}

fn dedupe(pts: &mut Vec<C>, errs: &mut Vec<f64>, closed: bool) {
    let mut out = vec![pts[0]];
    let mut oe: Vec<f64> = Vec::new();
    for (k, &z) in pts.iter().enumerate().skip(1) {
        if z == *out.last().unwrap() {
            if let Some(e) = oe.last_mut() {
                *e += errs[k - 1];
            }
            continue;
        }
        out.push(z);
        oe.push(errs[k - 1]);
    }
    if closed {
        let last = errs.last().copied().unwrap_or(0.0);
        if out.len() > 1 && out[0] == *out.last().unwrap() {
            out.pop();
        }
        oe.push(last);
        oe.truncate(out.len());
        while oe.len() < out.len() {
            oe.push(0.0);
        }
    }
    *pts = out;
    *errs = oe;
}

/// Walks the crossing graph into chains; open chains first, then loops.
fn chain_links(links: &HashMap<usize, Vec<usize>>) -> Vec<(Vec<usize>, bool)> {
    let mut keys: Vec<usize> = links.keys().copied().collect();
    keys.sort_unstable();
    let mut used: HashMap<usize, bool> = HashMap::new();
    let mut out = Vec::new();
    let walk = |start: usize, used: &mut HashMap<usize, bool>| {
        let mut chain = vec![start];
        used.insert(start, true);
        let mut cur = start;
        loop {
            let next = links[&cur].iter().copied().find(|e| !used.contains_key(e));
            match next {
                Some(e) => {
                    used.insert(e, true);
                    chain.push(e);
                    cur = e;
                }
                None => break,
            }
        }
        chain
    };
    for &k in &keys {
        if links[&k].len() == 1 && !used.contains_key(&k) {
            out.push((walk(k, &mut used), false));
        }
    }
    for &k in &keys {
        if !used.contains_key(&k) {
            out.push((walk(k, &mut used), true));
        }
    }
    out
}

/// Möbius map sending `L` to the real line: three canonical points of `L` go
/// to `-1, 0, 1`. For a line these are the foot of the perpendicular from
/// the origin and its unit neighbours, the direction taken with argument in
/// `(-π/2, π/2]`; for a circle of center `c` and radius `r` they are
/// `c - r`, `c - ir`, `c + r`.
pub fn canonical_normalizer(l: &Circline) -> Result<MoebiusMap> {
    match l.center_radius() {
        Some((c, r)) => MoebiusMap::from_three_points(
            [c - r, c - C::new(0.0, r), c + r],
            [C::new(-1.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)],
        ),
        None => {
            let foot = l.point_at(0.0);
            let mut dir = l.point_at(1.0) - foot;
            let arg = dir.arg();
            if arg <= -PI / 2.0 || arg > PI / 2.0 {
                dir = -dir;
            }
            MoebiusMap::affine(dir.inv(), -foot / dir)
        }
    }
}

/// Verdict on the boundary structure of `Ω ∩ r(Ω)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisVerdict {
    AnnulusCase,
    Satisfied,
    Violated,
    Undecided,
}

/// One preimage component with its lengths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreimageComponent {
    pub curve: SampledCurve,
    pub euclidean: f64,
    pub euclidean_error: f64,
    pub spherical: f64,
    pub spherical_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreimageReport {
    pub components: Vec<PreimageComponent>,
    pub euclidean_total: f64,
    pub spherical_total: f64,
    /// Sum of the per-component error estimates of the spherical total.
    pub spherical_error: f64,
    pub convexity_verdicts: Vec<bool>,
    /// Whether `𝔻 ∖ ∪B_k` passes the Klein-image convexity test.
    pub region_convex: bool,
    pub components_disjoint: bool,
    pub hypothesis_verdict: HypothesisVerdict,
}

impl PreimageReport {
    /// `π² - spherical_total`.
    pub fn margin(&self) -> f64 {
        PI * PI - self.spherical_total
    }
}

/// Length of the ray from `end` along `dir` to the unit circle.
fn tail_to_circle(end: C, dir: C) -> f64 {
    let d = dir / dir.norm();
    let b = planar::dot(end, d);
    let c = end.norm_sqr() - 1.0;
    (-b + (b * b - c).max(0.0).sqrt()).max(0.0)
}

fn at_cut(z: C) -> bool {
    z.norm() >= DISC_CUT * (1.0 - 1e-12)
}

/// A component whose two ends stop on the cut circle close to each other
/// touches `∂𝔻` tangentially; the hidden piece is replaced by the chord
/// joining the ends.
fn close_tangential(curve: SampledCurve) -> Result<SampledCurve> {
    if curve.is_closed() || curve.len() < 3 {
        return Ok(curve);
    }
    let (a, b) = (curve.first(), curve.last());
    let gap = (a - b).norm();
    if !(at_cut(a) && at_cut(b) && gap < 1e-2) {
        return Ok(curve);
    }
    let mut errs = curve.errors().to_vec();
    errs.push(gap * gap);
    SampledCurve::with_errors(curve.points().to_vec(), Some(errs), true)
}

fn measure(curve: SampledCurve) -> Result<PreimageComponent> {
    let curve = close_tangential(curve)?;
    let s = spherical_curve_length(&curve)?;
    let mut euclidean = curve.euclidean_length() + curve.error_bound();
    let mut euclidean_error = curve.error_bound();
    let mut spherical = s.value;
    let mut spherical_error = s.error;
    if !curve.is_closed() {
        let p = curve.points();
        let n = p.len();
        for (end, prev) in [(p[0], p[1]), (p[n - 1], p[n - 2])] {
            if !at_cut(end) {
                continue;
            }
            let t = tail_to_circle(end, end - prev).min(1.0 - end.norm() + 1e-3);
            // The σ density is at most 2/(1 + |end|²) beyond the end.
            euclidean += t;
            euclidean_error += t;
            spherical += t * 2.0 / (1.0 + end.norm_sqr());
            spherical_error += t;
        }
    }
    Ok(PreimageComponent {
        curve,
        euclidean,
        euclidean_error,
        spherical,
        spherical_error,
    })
}

/// Whether the Klein image of a component turns one way only, so that the
/// side it turns towards is hyperbolically convex.
pub fn klein_turning_consistent(curve: &SampledCurve) -> Result<bool> {
    let k = curve
        .points()
        .iter()
        .map(|&z| klein_map(z))
        .collect::<Result<Vec<C>>>()?;
    let n = k.len();
    let dirs: Vec<C> = if curve.is_closed() {
        (0..n).map(|i| k[(i + 1) % n] - k[i]).collect()
    } else {
        k.windows(2).map(|w| w[1] - w[0]).collect()
    };
    let m = dirs.len();
    let joints = if curve.is_closed() { m } else { m - 1 };
    let (mut left, mut right) = (false, false);
    for i in 0..joints {
        let (a, b) = (dirs[i], dirs[(i + 1) % m]);
        // Points carry an absolute error of about TURN_TOL, which bounds the
        // cross product noise by TURN_TOL·(|a| + |b|).
        let s = planar::cross(a, b);
        let noise = TURN_TOL * (a.norm() + b.norm());
        if s > noise {
            left = true;
        } else if s < -noise {
            right = true;
        }
    }
    Ok(!(left && right))
}

/// Default marching resolution and length tolerance.
pub const TRACE_RESOLUTION: usize = 128;
pub const TRACE_TOLERANCE: f64 = 1e-9;

/// Traces `g⁻¹(L)` as the zero set of `Im μ(g(z))` and measures each
/// component in the Euclidean and spherical metrics.
pub fn preimage_components(g: &MapPipeline, l: &Circline) -> Result<PreimageReport> {
    preimage_components_at(g, l, TRACE_RESOLUTION, TRACE_TOLERANCE)
}

pub fn preimage_components_at(g: &MapPipeline, l: &Circline, resolution: usize, tol: f64) -> Result<PreimageReport> {
    if g.source() != Model::Disc {
        return Err(Error::Precondition("preimage tracing needs a disc source".into()));
    }
    let mu = canonical_normalizer(l)?;
    let h = |z: C| match g.eval(z) {
        Ok(w) => mu.apply_to(w).map(|v| v.im).unwrap_or(f64::NAN),
        Err(_) => f64::NAN,
    };
    let curves = trace_implicit(h, resolution, tol)?;
    let components = curves
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            measure(c).map_err(|e| match e {
                Error::Tracing { reason, last_good } => Error::Tracing {
                    reason: format!("component {i}: {reason}"),
                    last_good,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let convexity_verdicts = components
        .iter()
        .map(|c| klein_turning_consistent(&c.curve))
        .collect::<Result<Vec<_>>>()?;
    let mut components_disjoint = true;
    for i in 0..components.len() {
        for j in i + 1..components.len() {
            if components[i].curve.vertex_distance(&components[j].curve) <= 1e-9 {
                components_disjoint = false;
            }
        }
    }
    Ok(PreimageReport {
        euclidean_total: components.iter().map(|c| c.euclidean).sum(),
        spherical_total: components.iter().map(|c| c.spherical).sum(),
        spherical_error: components.iter().map(|c| c.spherical_error).sum(),
        region_convex: convexity_verdicts.iter().all(|v| *v),
        convexity_verdicts,
        components,
        components_disjoint,
        hypothesis_verdict: HypothesisVerdict::Undecided,
    })
}

/// Counts for one component of the pulled-back intersection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ComponentShape {
    circle_arcs: usize,
    inner_pieces: usize,
}

/// Components of `{z ∈ 𝔻 : in_u(z)}` on an `n × n` grid, each with the
/// number of arcs of `∂𝔻` it touches and the number of connected pieces of
/// its boundary inside the disc.
fn component_shapes(in_u: &(impl Fn(C) -> bool + Sync), n: usize) -> Vec<ComponentShape> {
    let cell = 2.0 / n as f64;
    let center = |i: usize, j: usize| C::new(-1.0 + (i as f64 + 0.5) * cell, -1.0 + (j as f64 + 0.5) * cell);
    let ring = 1.0 - 1.5 * cell;
    let inside_disc = |i: usize, j: usize| center(i, j).norm() < 1.0 - 0.5 * cell;
    let member: Vec<bool> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % n, k / n);
            inside_disc(i, j) && in_u(center(i, j))
        })
        .collect();
    let at = |i: usize, j: usize| member[j * n + i];
    // Connected components of member cells (4-neighbourhood).
    let mut label = vec![usize::MAX; n * n];
    let mut count = 0;
    for start in 0..n * n {
        if !member[start] || label[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        label[start] = count;
        while let Some(k) = stack.pop() {
            let (i, j) = ((k % n) as isize, (k / n) as isize);
            for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (a, b) = (i + di, j + dj);
                if a < 0 || b < 0 || a >= n as isize || b >= n as isize {
                    continue;
                }
                let kk = b as usize * n + a as usize;
                if member[kk] && label[kk] == usize::MAX {
                    label[kk] = count;
                    stack.push(kk);
                }
            }
        }
        count += 1;
    }
    let mut shapes = vec![ComponentShape { circle_arcs: 0, inner_pieces: 0 }; count];
    // Arcs of the circle: cyclic runs of ring samples carrying a label.
    let samples = 8 * n;
    let ring_label: Vec<Option<usize>> = (0..samples)
        .map(|s| {
            let z = C::from_polar(ring, 2.0 * PI * s as f64 / samples as f64);
            let i = (((z.re + 1.0) / cell) as usize).min(n - 1);
            let j = (((z.im + 1.0) / cell) as usize).min(n - 1);
            member[j * n + i].then_some(label[j * n + i])
        })
        .collect();
    // Gaps shorter than a few cells are staircase artifacts where a curve
    // meets the ring at a shallow angle.
    let min_gap = ((3.0 * cell) / (2.0 * PI * ring / samples as f64)).ceil() as usize;
    for (k, shape) in shapes.iter_mut().enumerate() {
        let mut on: Vec<bool> = ring_label.iter().map(|l| *l == Some(k)).collect();
        close_short_gaps(&mut on, min_gap);
        if on.iter().all(|b| *b) {
            shape.circle_arcs = 1;
            continue;
        }
        shape.circle_arcs = (0..samples).filter(|&s| on[s] && !on[(s + samples - 1) % samples]).count();
    }
    // Inner boundary cells: member cells away from the circle next to a
    // non-member cell of the disc.
    let deep = |i: usize, j: usize| center(i, j).norm() < ring - 1.5 * cell;
    let mut frontier = vec![false; n * n];
    for j in 1..n - 1 {
        for i in 1..n - 1 {
            if !at(i, j) || !deep(i, j) {
                continue;
            }
            let neighbours = [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)];
            if neighbours.iter().any(|&(a, b)| inside_disc(a, b) && !at(a, b)) {
                frontier[j * n + i] = true;
            }
        }
    }
    let mut seen = vec![false; n * n];
    for start in 0..n * n {
        if !frontier[start] || seen[start] {
            continue;
        }
        shapes[label[start]].inner_pieces += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(k) = stack.pop() {
            let (i, j) = ((k % n) as isize, (k / n) as isize);
            for di in -2..=2 {
                for dj in -2..=2 {
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= n as isize || b >= n as isize {
                        continue;
                    }
                    let kk = b as usize * n + a as usize;
                    if frontier[kk] && !seen[kk] && label[kk] == label[start] {
                        seen[kk] = true;
                        stack.push(kk);
                    }
                }
            }
        }
    }
    shapes
}

/// Fills cyclic runs of `false` shorter than `min_gap` that sit between
/// runs of `true`.
fn close_short_gaps(on: &mut [bool], min_gap: usize) {
    let n = on.len();
    let Some(start) = (0..n).find(|&s| on[s]) else {
        return;
    };
    let mut k = 0;
    while k < n {
        let s = (start + k) % n;
        if on[s] {
            k += 1;
            continue;
        }
        let mut len = 0;
        while len < n && !on[(s + len) % n] {
            len += 1;
        }
        if len < min_gap {
            for t in 0..len {
                on[(s + t) % n] = true;
            }
        }
        k += len;
    }
}

fn verdict_from_shapes(shapes: &[ComponentShape]) -> HypothesisVerdict {
    let ok = shapes.iter().all(|s| s.circle_arcs == 1 && s.inner_pieces <= 1);
    if ok {
        HypothesisVerdict::Satisfied
    } else {
        HypothesisVerdict::Violated
    }
}

/// Grid verdict for a pulled-back region, repeated at doubling resolutions
/// until two consecutive grids agree.
fn grid_verdict(in_u: &(impl Fn(C) -> bool + Sync)) -> HypothesisVerdict {
    let mut prev: Option<Vec<ComponentShape>> = None;
    for n in [64, 128, 256] {
        let mut shapes = component_shapes(in_u, n);
        // Specks of a few cells are grid noise at this resolution.
        shapes.retain(|s| s.circle_arcs > 0 || s.inner_pieces > 0);
        if let Some(p) = &prev {
            if *p == shapes {
                return verdict_from_shapes(&shapes);
            }
        }
        prev = Some(shapes);
    }
    HypothesisVerdict::Undecided
}

/// Checks that each component of `Ω ∩ r(Ω)`, `Ω = g(𝔻)`, is bounded by one
/// arc of `∂Ω` and one arc of `r(∂Ω)`.
///
/// The intersection is pulled back to `{z ∈ 𝔻 : r(g(z)) ∈ Ω}`, where arcs of
/// `∂Ω` become arcs of the unit circle and arcs of `r(∂Ω)` become curves
/// inside the disc.
pub fn hypothesis_check(g: &MapPipeline, l: &Circline) -> HypothesisVerdict {
    if g.source() != Model::Disc {
        return HypothesisVerdict::Undecided;
    }
    let in_omega = |w: C| g.inverse(w).is_ok();
    if let Some((c, r)) = l.center_radius() {
        let all_in = (0..4096).all(|k| in_omega(c + C::from_polar(r, 2.0 * PI * k as f64 / 4096.0)));
        if all_in {
            return HypothesisVerdict::AnnulusCase;
        }
    }
    let refl = reflection_fixing(l);
    let in_u = |z: C| {
        g.eval(z)
            .ok()
            .and_then(|w| refl.apply_to(w))
            .is_some_and(in_omega)
    };
    grid_verdict(&in_u)
}

/// Full verdict: hypothesis, components, totals, and convexity of the
/// region left after removing the pieces `B_k`.
pub fn preimage_verdict(g: &MapPipeline, l: &Circline) -> Result<PreimageReport> {
    let verdict = hypothesis_check(g, l);
    if verdict == HypothesisVerdict::Violated {
        return Err(Error::Hypothesis(
            "a component of the intersection with the reflected domain has a split boundary".into(),
        ));
    }
    let mut report = preimage_components(g, l)?;
    report.hypothesis_verdict = verdict;
    Ok(report)
}

/// A named map and circline.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub g: MapPipeline,
    pub l: Circline,
}

/// Disc onto the upper half-plane, `z ↦ i(1 + z)/(1 - z)`.
pub fn disc_to_halfplane() -> MoebiusMap {
    let i = C::new(0.0, 1.0);
    MoebiusMap::new(i, i, C::new(-1.0, 0.0), C::new(1.0, 0.0)).expect("nonzero determinant")
}

/// Fixtures with known preimage structure, plus ten disc automorphisms of
/// the two-slit map.
pub fn default_fixtures() -> Result<Vec<Fixture>> {
    let two = two_slit_map(-1.0, 1.0)?;
    let mut out = vec![
        Fixture {
            name: "identity/real-axis".into(),
            g: MapPipeline::identity(Model::Disc),
            l: Circline::real_axis(),
        },
        Fixture {
            name: "two-slit/real-axis".into(),
            g: two.clone(),
            l: Circline::real_axis(),
        },
        Fixture {
            name: "two-slit/imaginary-axis".into(),
            g: two.clone(),
            l: Circline::imaginary_axis(),
        },
        Fixture {
            name: "two-slit/circle-0.5".into(),
            g: two.clone(),
            l: Circline::circle(C::new(0.0, 0.0), 0.5)?,
        },
        Fixture {
            name: "shifted-halfplane/real-axis".into(),
            g: MapPipeline::new(
                Model::Disc,
                vec![
                    MapStep::Moebius { map: disc_to_halfplane() },
                    MapStep::Affine { s: C::new(1.0, 0.0), t: C::new(0.0, -0.5) },
                ],
            ),
            l: Circline::real_axis(),
        },
        Fixture {
            name: "two-slit(0,1)/line-re-0.3".into(),
            g: two_slit_map(0.0, 1.0)?,
            l: Circline::line_through(C::new(0.3, 0.0), C::new(0.3, 1.0))?,
        },
    ];
    for k in 0..10 {
        let theta = 2.0 * PI * k as f64 / 10.0;
        let z0 = C::from_polar(0.15 * (k % 4) as f64, 1.3 * k as f64);
        let m = MoebiusMap::disc_automorphism(z0, theta)?;
        out.push(Fixture {
            name: format!("two-slit-automorphism-{k}/real-axis"),
            g: two.precomposed(&m)?,
            l: Circline::real_axis(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn total(curves: &[SampledCurve]) -> f64 {
        curves.iter().map(|c| c.euclidean_length() + c.error_bound()).sum()
    }

    #[test]
    fn trace_implicit_examples() {
        let line = trace_implicit(|z: C| z.im, 64, 1e-9).unwrap();
        assert_eq!(line.len(), 1);
        assert_abs_diff_eq!(total(&line), 2.0, epsilon = 1e-7);
        let circle = trace_implicit(|z: C| z.norm_sqr() - 0.25, 64, 1e-9).unwrap();
        assert_eq!(circle.len(), 1);
        assert!(circle[0].is_closed());
        assert_abs_diff_eq!(total(&circle), PI, epsilon = 1e-6);
        let cross = trace_implicit(|z: C| (z * z).im, 64, 1e-9).unwrap();
        assert_abs_diff_eq!(total(&cross), 4.0, epsilon = 1e-6);
    }

    #[test]
    fn trace_implicit_resolution_stability() {
        let f = |z: C| (z - C::new(0.2, 0.1)).norm_sqr() - 0.3 + 0.1 * z.re * z.im;
        let a = total(&trace_implicit(f, 64, 1e-9).unwrap());
        let b = total(&trace_implicit(f, 128, 1e-9).unwrap());
        assert!((a - b).abs() < 1e-6);
        assert!(trace_implicit(f, 2, 1e-9).is_err());
    }

    #[test]
    fn normalizer_sends_l_to_real_line() {
        for l in [
            Circline::real_axis(),
            Circline::imaginary_axis(),
            Circline::circle(C::new(0.3, -0.2), 0.7).unwrap(),
            Circline::line_through(C::new(1.0, 2.0), C::new(-3.0, 0.5)).unwrap(),
        ] {
            let mu = canonical_normalizer(&l).unwrap();
            for t in [-2.0, -0.3, 0.0, 0.9, 2.5] {
                let w = mu.apply_to(l.point_at(t)).unwrap();
                assert!(w.im.abs() < 1e-12 * w.norm().max(1.0), "{w}");
            }
        }
        let id = canonical_normalizer(&Circline::real_axis()).unwrap();
        assert!(id.approx_eq(&MoebiusMap::identity(), 1e-15));
    }

    #[test]
    fn wiggles_fail_the_turning_test() {
        let wiggle = trace_implicit(|z: C| z.im - 0.1 * (5.0 * z.re).sin(), 64, 1e-9).unwrap();
        assert_eq!(wiggle.len(), 1);
        assert!(!klein_turning_consistent(&wiggle[0]).unwrap());
        let geodesic = trace_implicit(|z: C| z.norm_sqr() - 2.0 * 1.25 * z.re + 1.0, 64, 1e-9).unwrap();
        assert!(klein_turning_consistent(&geodesic[0]).unwrap());
    }

    #[test]
    fn preimage_examples() {
        let id = MapPipeline::identity(Model::Disc);
        let r = preimage_components(&id, &Circline::real_axis()).unwrap();
        assert_eq!(r.components.len(), 1);
        assert_abs_diff_eq!(r.euclidean_total, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(r.spherical_total, PI, epsilon = 1e-6);
        assert!(r.region_convex && r.components_disjoint);
        assert_abs_diff_eq!(r.margin(), PI * PI - PI, epsilon = 1e-6);

        let two = two_slit_map(-1.0, 1.0).unwrap();
        let r = preimage_components(&two, &Circline::real_axis()).unwrap();
        assert_eq!(r.components.len(), 1);
        for z in r.components[0].curve.points() {
            assert!(z.im.abs() < 1e-12);
        }
        assert_abs_diff_eq!(r.spherical_total, PI, epsilon = 1e-6);

        let r = preimage_components(&two, &Circline::imaginary_axis()).unwrap();
        assert_eq!(r.components.len(), 1);
        assert_abs_diff_eq!(r.euclidean_total, 2.0, epsilon = 1e-6);
        for z in r.components[0].curve.points() {
            assert!(z.re.abs() < 1e-12);
        }
    }

    #[test]
    fn horocycle_matches_closed_form() {
        // Im(i(1+z)/(1-z)) = 1/2 is the circle of radius 2/3 about 1/3.
        let f = default_fixtures().unwrap();
        let fx = f.iter().find(|f| f.name.starts_with("shifted")).unwrap();
        let r = preimage_components(&fx.g, &fx.l).unwrap();
        assert_eq!(r.components.len(), 1);
        for z in r.components[0].curve.points() {
            assert!(((z - C::new(1.0 / 3.0, 0.0)).norm() - 2.0 / 3.0).abs() < 1e-9);
        }
        assert!((r.euclidean_total - 4.0 * PI / 3.0).abs() < 1e-6);
        let oracle = crate::curve::sigma_parametric_length(
            |t| C::new(1.0 / 3.0, 0.0) + C::from_polar(2.0 / 3.0, t),
            |t| C::from_polar(2.0 / 3.0, t) * C::new(0.0, 1.0),
            0.0,
            2.0 * PI,
            1e-12,
        );
        assert!((r.spherical_total - oracle.0).abs() < 1e-6, "{} vs {}", r.spherical_total, oracle.0);
        assert!(r.region_convex);
    }

    #[test]
    fn hypothesis_examples() {
        let id = MapPipeline::identity(Model::Disc);
        assert_eq!(hypothesis_check(&id, &Circline::real_axis()), HypothesisVerdict::Satisfied);
        let two = two_slit_map(-1.0, 1.0).unwrap();
        assert_eq!(hypothesis_check(&two, &Circline::real_axis()), HypothesisVerdict::Satisfied);
        let circle = Circline::circle(C::new(0.0, 0.0), 0.5).unwrap();
        assert_eq!(hypothesis_check(&two, &circle), HypothesisVerdict::AnnulusCase);
        let small = Circline::circle(C::new(0.2, 0.1), 0.3).unwrap();
        assert_eq!(hypothesis_check(&id, &small), HypothesisVerdict::AnnulusCase);
    }

    #[test]
    fn split_boundaries_are_violations() {
        // A horizontal band of the disc touches the circle in two arcs.
        let band = |z: C| z.im.abs() < 0.3;
        assert_eq!(grid_verdict(&band), HypothesisVerdict::Violated);
        // A lens cut off by one chord is fine.
        let cap = |z: C| z.im > 0.3;
        assert_eq!(grid_verdict(&cap), HypothesisVerdict::Satisfied);
        // A disc minus two separated blobs has two inner boundary pieces.
        let holes = |z: C| (z - 0.4).norm() > 0.2 && (z + 0.4).norm() > 0.2;
        assert_eq!(grid_verdict(&holes), HypothesisVerdict::Violated);
    }

    #[test]
    fn fixture_suite_verdicts() {
        for f in default_fixtures().unwrap() {
            let r = preimage_verdict(&f.g, &f.l).unwrap();
            assert_ne!(r.hypothesis_verdict, HypothesisVerdict::Undecided, "{}", f.name);
            assert!(!r.components.is_empty(), "{}", f.name);
            assert!(r.euclidean_total < r.spherical_total, "{}", f.name);
            assert!(r.spherical_total < PI * PI, "{}", f.name);
            assert!(r.region_convex && r.components_disjoint, "{}", f.name);
        }
    }

    #[test]
    fn double_resolution_changes_totals_little() {
        let two = two_slit_map(-1.0, 1.0).unwrap();
        let l = Circline::circle(C::new(0.0, 0.0), 0.5).unwrap();
        let a = preimage_components_at(&two, &l, 64, 1e-9).unwrap();
        let b = preimage_components_at(&two, &l, 128, 1e-9).unwrap();
        assert!((a.euclidean_total - b.euclidean_total).abs() < 1e-6);
        assert!((a.spherical_total - b.spherical_total).abs() < 1e-6);
    }
}
