//! Complex projective algebra on the Riemann sphere.
//!
//! Points are homogeneous pairs so that `∞` never needs a special case, maps
//! are 2×2 complex matrices tagged with an orientation, and lines and circles
//! share one representation as a real Hermitian form.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: C = C { re: 0.0, im: 1.0 };

/// Relative threshold below which `ad - bc` is treated as zero.
pub const DEGENERACY_TOL: f64 = 1e-14;

/// Tolerance used when comparing normalized representatives.
pub const EQ_TOL: f64 = 1e-12;

/// A point of the Riemann sphere in homogeneous coordinates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RSPoint {
    num: C,
    den: C,
}

impl RSPoint {
    pub const INFINITY: RSPoint = RSPoint {
        num: C { re: 1.0, im: 0.0 },
        den: C { re: 0.0, im: 0.0 },
    };

    pub fn new(num: C, den: C) -> Result<Self> {
        if num.norm_sqr() == 0.0 && den.norm_sqr() == 0.0 {
            return Err(Error::Degenerate {
                what: "sphere point",
                detail: "both homogeneous coordinates are zero".into(),
            });
        }
        Ok(Self { num, den })
    }

    pub fn finite(z: C) -> Self {
        Self {
            num: z,
            den: C::new(1.0, 0.0),
        }
    }

    pub fn num(&self) -> C {
        self.num
    }

    pub fn den(&self) -> C {
        self.den
    }

    pub fn is_infinite(&self) -> bool {
        self.den.norm() <= f64::EPSILON * 1e-3 * self.num.norm()
    }

    /// Affine coordinate, or `None` for `∞`.
    pub fn to_complex(&self) -> Option<C> {
        if self.is_infinite() {
            None
        } else {
            Some(self.num / self.den)
        }
    }

    /// Finite points get denominator 1; `∞` becomes `(1, 0)`.
    pub fn normalized(&self) -> Self {
        match self.to_complex() {
            Some(z) => Self::finite(z),
            None => Self::INFINITY,
        }
    }

    /// Projective equality: the cross product of the two pairs vanishes
    /// relative to their magnitudes.
    pub fn approx_eq(&self, other: &RSPoint, tol: f64) -> bool {
        let cross = self.num * other.den - self.den * other.num;
        let scale = (self.num.norm_sqr() + self.den.norm_sqr()).sqrt()
            * (other.num.norm_sqr() + other.den.norm_sqr()).sqrt();
        cross.norm() <= tol * scale
    }
}

impl PartialEq for RSPoint {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, EQ_TOL)
    }
}

impl From<C> for RSPoint {
    fn from(z: C) -> Self {
        RSPoint::finite(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Direct,
    Anti,
}

impl Orientation {
    fn compose(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Direct
        } else {
            Orientation::Anti
        }
    }
}

/// A Möbius map `z ↦ (az+b)/(cz+d)`, or the anti-Möbius map
/// `z ↦ (a z̄ + b)/(c z̄ + d)` when the orientation is [`Orientation::Anti`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MoebiusMap {
    a: C,
    b: C,
    c: C,
    d: C,
    orientation: Orientation,
}

type Mat = [[C; 2]; 2];

fn mat_mul(m: Mat, n: Mat) -> Mat {
    [
        [
            m[0][0] * n[0][0] + m[0][1] * n[1][0],
            m[0][0] * n[0][1] + m[0][1] * n[1][1],
        ],
        [
            m[1][0] * n[0][0] + m[1][1] * n[1][0],
            m[1][0] * n[0][1] + m[1][1] * n[1][1],
        ],
    ]
}

fn mat_conj(m: Mat) -> Mat {
    [
        [m[0][0].conj(), m[0][1].conj()],
        [m[1][0].conj(), m[1][1].conj()],
    ]
}

fn adjugate(m: Mat) -> Mat {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

impl MoebiusMap {
    pub fn new(a: C, b: C, c: C, d: C) -> Result<Self> {
        Self::with_orientation(a, b, c, d, Orientation::Direct)
    }

    pub fn new_anti(a: C, b: C, c: C, d: C) -> Result<Self> {
        Self::with_orientation(a, b, c, d, Orientation::Anti)
    }

    pub fn with_orientation(a: C, b: C, c: C, d: C, orientation: Orientation) -> Result<Self> {
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        let det = a * d - b * c;
        if !(scale > 0.0) || !scale.is_finite() || det.norm() <= DEGENERACY_TOL * scale * scale {
            return Err(Error::Degenerate {
                what: "Moebius map",
                detail: format!("ad - bc = {det} for coefficients ({a}, {b}, {c}, {d})"),
            });
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            orientation,
        })
    }

    fn from_matrix(m: Mat, orientation: Orientation) -> Result<Self> {
        Self::with_orientation(m[0][0], m[0][1], m[1][0], m[1][1], orientation)
    }

    pub fn identity() -> Self {
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
            orientation: Orientation::Direct,
        }
    }

    /// Complex conjugation `z ↦ z̄`.
    pub fn conjugation() -> Self {
        Self {
            orientation: Orientation::Anti,
            ..Self::identity()
        }
    }

    /// `z ↦ s z + t`.
    pub fn affine(s: C, t: C) -> Result<Self> {
        Self::new(s, t, C::new(0.0, 0.0), C::new(1.0, 0.0))
    }

    /// The disc automorphism `z ↦ e^{iθ} (z - z0) / (1 - z̄0 z)`.
    pub fn disc_automorphism(z0: C, theta: f64) -> Result<Self> {
        if z0.norm() >= 1.0 {
            return Err(Error::domain("disc", z0));
        }
        let rot = C::from_polar(1.0, theta);
        Self::new(rot, -rot * z0, -z0.conj(), C::new(1.0, 0.0))
    }

    /// The unique Möbius map sending `from[k]` to `to[k]` for k = 0, 1, 2.
    pub fn from_three_points(from: [C; 3], to: [C; 3]) -> Result<Self> {
        fn to_zero_one_inf(p: [C; 3]) -> Result<Mat> {
            let [z1, z2, z3] = p;
            if (z1 - z2).norm() == 0.0 || (z2 - z3).norm() == 0.0 || (z1 - z3).norm() == 0.0 {
                return Err(Error::Degenerate {
                    what: "three-point normalization",
                    detail: "points must be distinct".into(),
                });
            }
            Ok([[z2 - z3, -z1 * (z2 - z3)], [z2 - z1, -z3 * (z2 - z1)]])
        }
        let s = to_zero_one_inf(from)?;
        let t = to_zero_one_inf(to)?;
        Self::from_matrix(mat_mul(adjugate(t), s), Orientation::Direct)
    }

    pub fn coefficients(&self) -> [C; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_direct(&self) -> bool {
        self.orientation == Orientation::Direct
    }

    fn matrix(&self) -> Mat {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn determinant(&self) -> C {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: RSPoint) -> RSPoint {
        let (p, q) = match self.orientation {
            Orientation::Direct => (z.num, z.den),
            Orientation::Anti => (z.num.conj(), z.den.conj()),
        };
        RSPoint {
            num: self.a * p + self.b * q,
            den: self.c * p + self.d * q,
        }
    }

    /// Evaluates at a finite point; `None` when the image is `∞`.
    pub fn apply_to(&self, z: C) -> Option<C> {
        self.apply(RSPoint::finite(z)).to_complex()
    }

    /// Returns `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        let rhs = match self.orientation {
            Orientation::Direct => other.matrix(),
            Orientation::Anti => mat_conj(other.matrix()),
        };
        let m = mat_mul(self.matrix(), rhs);
        let orientation = self.orientation.compose(other.orientation);
        // The product of non-degenerate matrices is non-degenerate; only the
        // relative threshold could reject it, so fall back to rescaling.
        Self::from_matrix(m, orientation).unwrap_or_else(|_| {
            let s = m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
            Self {
                a: m[0][0] / s,
                b: m[0][1] / s,
                c: m[1][0] / s,
                d: m[1][1] / s,
                orientation,
            }
        })
    }

    pub fn inverse(&self) -> MoebiusMap {
        let adj = adjugate(self.matrix());
        let m = match self.orientation {
            Orientation::Direct => adj,
            Orientation::Anti => mat_conj(adj),
        };
        Self {
            a: m[0][0],
            b: m[0][1],
            c: m[1][0],
            d: m[1][1],
            orientation: self.orientation,
        }
    }

    /// Complex derivative of a direct map at a finite point.
    pub fn derivative(&self, z: C) -> Result<C> {
        if !self.is_direct() {
            return Err(Error::Precondition(
                "anti-Moebius maps have no complex derivative".into(),
            ));
        }
        let den = self.c * z + self.d;
        Ok(self.determinant() / (den * den))
    }

    /// Equality up to a common nonzero complex scale of the coefficients.
    pub fn approx_eq(&self, other: &MoebiusMap, tol: f64) -> bool {
        if self.orientation != other.orientation {
            return false;
        }
        let p = self.coefficients();
        let q = other.coefficients();
        let k = (0..4)
            .max_by(|&i, &j| p[i].norm().total_cmp(&p[j].norm()))
            .unwrap();
        if q[k].norm() == 0.0 {
            return false;
        }
        let lambda = p[k] / q[k];
        let scale = p[k].norm();
        (0..4).all(|i| (p[i] - lambda * q[i]).norm() <= tol * scale)
    }
}

/// The Cayley-type map `w ↦ (w - n i)/(w + n i)`, carrying the upper
/// half-plane isometrically onto the unit disc.
pub fn cayley_family(n: f64) -> Result<MoebiusMap> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Precondition(format!(
            "Cayley parameter must be positive, got {n}"
        )));
    }
    MoebiusMap::new(C::new(1.0, 0.0), -I * n, C::new(1.0, 0.0), I * n)
}

/// A line or circle: the zero set of `A|z|² + 2 Re(B̄ z) + C`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Circline {
    a: f64,
    b: C,
    c: f64,
}

impl Circline {
    pub fn new(a: f64, b: C, c: f64) -> Result<Self> {
        let scale = a.abs().max(b.norm()).max(c.abs());
        let disc = b.norm_sqr() - a * c;
        if !(scale > 0.0) || !scale.is_finite() || disc <= 1e-14 * scale * scale {
            return Err(Error::Degenerate {
                what: "circline",
                detail: format!("|B|^2 - AC = {disc} for ({a}, {b}, {c})"),
            });
        }
        Ok(Self { a, b, c })
    }

    pub fn circle(center: C, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Degenerate {
                what: "circle",
                detail: format!("radius {radius}"),
            });
        }
        Self::new(1.0, -center, center.norm_sqr() - radius * radius)
    }

    /// The line through two distinct finite points.
    pub fn line_through(p: C, q: C) -> Result<Self> {
        let dir = q - p;
        if dir.norm() == 0.0 {
            return Err(Error::Degenerate {
                what: "line",
                detail: "coincident points".into(),
            });
        }
        // Normal n = i·dir; the line is Re(n̄ z) = Re(n̄ p).
        let n = I * dir;
        Self::new(0.0, n / 2.0, -(n.conj() * p).re)
    }

    pub fn real_axis() -> Self {
        Self {
            a: 0.0,
            b: I,
            c: 0.0,
        }
    }

    pub fn imaginary_axis() -> Self {
        Self {
            a: 0.0,
            b: C::new(1.0, 0.0),
            c: 0.0,
        }
    }

    pub fn unit_circle() -> Self {
        Self {
            a: 1.0,
            b: C::new(0.0, 0.0),
            c: -1.0,
        }
    }

    pub fn coefficients(&self) -> (f64, C, f64) {
        (self.a, self.b, self.c)
    }

    pub fn is_line(&self) -> bool {
        self.a.abs() <= 1e-14 * self.b.norm().max(self.c.abs())
    }

    /// Center and radius, or `None` for a line.
    pub fn center_radius(&self) -> Option<(C, f64)> {
        if self.is_line() {
            return None;
        }
        let center = -self.b / self.a;
        let radius = (self.b.norm_sqr() - self.a * self.c).sqrt() / self.a.abs();
        Some((center, radius))
    }

    /// Value of the Hermitian form at `z`.
    pub fn form(&self, z: C) -> f64 {
        self.a * z.norm_sqr() + 2.0 * (self.b.conj() * z).re + self.c
    }

    /// Hermitian form evaluated at a homogeneous point.
    pub fn form_homogeneous(&self, p: RSPoint) -> f64 {
        let (z1, z2) = (p.num, p.den);
        self.a * z1.norm_sqr() + 2.0 * (self.b.conj() * z1 * z2.conj()).re + self.c * z2.norm_sqr()
    }

    /// Euclidean distance from `z` to the circline.
    pub fn distance(&self, z: C) -> f64 {
        match self.center_radius() {
            Some((c, r)) => ((z - c).norm() - r).abs(),
            None => (2.0 * (self.b.conj() * z).re + self.c).abs() / (2.0 * self.b.norm()),
        }
    }

    pub fn contains(&self, z: C, tol: f64) -> bool {
        self.distance(z) <= tol
    }

    /// Point on the circline at parameter `t`: angle for circles, signed
    /// arc length from the foot of the origin for lines.
    pub fn point_at(&self, t: f64) -> C {
        match self.center_radius() {
            Some((c, r)) => c + C::from_polar(r, t),
            None => {
                let b2 = self.b.norm_sqr();
                let foot = -self.b * (self.c / (2.0 * b2));
                let dir = I * self.b / b2.sqrt();
                foot + dir * t
            }
        }
    }

    /// `n` points spread over the circline (over `[-span, span]` for lines).
    pub fn sample(&self, n: usize, span: f64) -> Vec<C> {
        let n = n.max(1);
        if self.is_line() {
            (0..n)
                .map(|k| {
                    let t = if n == 1 {
                        0.0
                    } else {
                        -span + 2.0 * span * k as f64 / (n - 1) as f64
                    };
                    self.point_at(t)
                })
                .collect()
        } else {
            (0..n)
                .map(|k| self.point_at(std::f64::consts::TAU * k as f64 / n as f64))
                .collect()
        }
    }

    /// Representative with the largest-magnitude real coefficient scaled to 1.
    pub fn canonical(&self) -> Circline {
        let entries = [self.a, self.b.re, self.b.im, self.c];
        let pivot = entries
            .iter()
            .copied()
            .max_by(|x, y| x.abs().total_cmp(&y.abs()))
            .unwrap();
        Circline {
            a: self.a / pivot,
            b: self.b / pivot,
            c: self.c / pivot,
        }
    }

    pub fn approx_eq(&self, other: &Circline, tol: f64) -> bool {
        let p = self.canonical();
        let q = other.canonical();
        (p.a - q.a).abs() <= tol && (p.b - q.b).norm() <= tol && (p.c - q.c).abs() <= tol
    }

    fn hermitian(&self) -> Mat {
        [
            [C::new(self.a, 0.0), self.b],
            [self.b.conj(), C::new(self.c, 0.0)],
        ]
    }
}

impl PartialEq for Circline {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, EQ_TOL)
    }
}

/// Image of a circline under a Möbius or anti-Möbius map.
pub fn circline_image(m: &MoebiusMap, l: &Circline) -> Circline {
    // w = M v  ⇒  v = adj(M) w / det, and v* H v = 0 becomes w* N* H N w = 0.
    // For anti maps conj(v) = adj(M) w, which replaces H by its conjugate.
    let n = adjugate(m.matrix());
    let h = match m.orientation {
        Orientation::Direct => l.hermitian(),
        Orientation::Anti => mat_conj(l.hermitian()),
    };
    let n_star = [
        [n[0][0].conj(), n[1][0].conj()],
        [n[0][1].conj(), n[1][1].conj()],
    ];
    let hp = mat_mul(mat_mul(n_star, h), n);
    let out = Circline {
        a: hp[0][0].re,
        b: hp[0][1],
        c: hp[1][1].re,
    };
    // Rescale to keep coefficients O(1).
    let s = out.a.abs().max(out.b.norm()).max(out.c.abs());
    Circline {
        a: out.a / s,
        b: out.b / s,
        c: out.c / s,
    }
}

/// The anti-Möbius reflection that fixes `l` pointwise.
///
/// For a circle with center `c` and radius `ρ` this is `z ↦ c + ρ²/conj(z - c)`;
/// for a line it is the Euclidean mirror reflection.
pub fn reflection_fixing(l: &Circline) -> MoebiusMap {
    let (a, b, c) = l.coefficients();
    // r(z) = -(B z̄ + C)/(A z̄ + B̄); det = AC - |B|² ≠ 0 by construction.
    MoebiusMap::new_anti(-b, C::new(-c, 0.0), C::new(a, 0.0), b.conj())
        .expect("non-degenerate circline yields a non-degenerate reflection")
}
