//! Small Euclidean polygon toolkit used on Klein-model images.

use num_complex::Complex64 as C;

#[inline]
pub fn cross(u: C, v: C) -> f64 {
    u.re * v.im - u.im * v.re
}

#[inline]
pub fn dot(u: C, v: C) -> f64 {
    u.re * v.re + u.im * v.im
}

/// Twice the signed area; positive for counter-clockwise vertex order.
pub fn signed_area2(pts: &[C]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| cross(pts[i], pts[(i + 1) % n])).sum()
}

pub fn closed_perimeter(pts: &[C]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| (pts[(i + 1) % n] - pts[i]).norm()).sum()
}

pub fn open_length(pts: &[C]) -> f64 {
    pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Largest pairwise distance, brute force.
pub fn diameter(pts: &[C]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            best = best.max((p - q).norm());
        }
    }
    best
}

/// Convex hull by Andrew's monotone chain, counter-clockwise, without
/// collinear points.
pub fn convex_hull(points: &[C]) -> Vec<C> {
    let mut pts: Vec<C> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup_by(|a, b| a == b);
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<C> = Vec::with_capacity(2 * pts.len());
    for pass in [pts.clone(), pts.iter().rev().copied().collect()] {
        let base = hull.len();
        for p in pass {
            while hull.len() >= base + 2 {
                let k = hull.len();
                if cross(hull[k - 1] - hull[k - 2], p - hull[k - 2]) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Proper crossing of segments `[p1, p2]` and `[q1, q2]` (touching does not
/// count).
pub fn segments_cross(p1: C, p2: C, q1: C, q2: C) -> bool {
    let d1 = cross(p2 - p1, q1 - p1);
    let d2 = cross(p2 - p1, q2 - p1);
    let d3 = cross(q2 - q1, p1 - q1);
    let d4 = cross(q2 - q1, p2 - q1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// First pair of non-adjacent edges of a closed polygon that cross.
pub fn first_self_intersection(pts: &[C]) -> Option<(usize, usize)> {
    let n = pts.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Distance from `z` to the segment `[p, q]`.
pub fn point_segment_distance(z: C, p: C, q: C) -> f64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - p).norm();
    }
    let t = (dot(z - p, d) / len2).clamp(0.0, 1.0);
    (z - (p + d * t)).norm()
}

/// Sutherland-Hodgman clipping of `subject` by the convex counter-clockwise
/// polygon `clip`.
pub fn clip_convex(subject: &[C], clip: &[C]) -> Vec<C> {
    let mut out = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if out.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % m];
        let inside = |z: C| cross(b - a, z - a) >= 0.0;
        let input = std::mem::take(&mut out);
        let k = input.len();
        for j in 0..k {
            let cur = input[j];
            let prev = input[(j + k - 1) % k];
            let intersect = |p: C, q: C| {
                let dp = cross(b - a, p - a);
                let dq = cross(b - a, q - a);
                p + (q - p) * (dp / (dp - dq))
            };
            match (inside(prev), inside(cur)) {
                (true, true) => out.push(cur),
                (true, false) => out.push(intersect(prev, cur)),
                (false, true) => {
                    out.push(intersect(prev, cur));
                    out.push(cur);
                }
                (false, false) => {}
            }
        }
    }
    out
}
