//! Möbius transformations and generalized circles on the Riemann sphere.
//!
//! Maps are stored as `SL(2, C)` representatives, so every matrix satisfies
//! `ad - bc = 1` up to rounding. The projective sign is kept as computed;
//! comparisons that care about the group element use
//! [`MoebiusMap::projective_distance`].

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use thiserror::Error;

/// Default tolerance on `|trace^2 - 4|` below which a map is treated as
/// numerically parabolic.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;

const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoebiusError {
    #[error("singular matrix, |ad - bc| = {det_abs:e}")]
    Singular { det_abs: f64 },
    #[error("map is numerically parabolic: |trace^2 - 4| = {gap:e}")]
    NearlyDegenerate { gap: f64 },
    #[error("circle radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("line normal must be a nonzero finite complex number")]
    InvalidLine,
}

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtPoint::Finite(z) => Some(z),
            ExtPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtPoint::Infinity)
    }
}

impl From<Complex64> for ExtPoint {
    fn from(z: Complex64) -> Self {
        ExtPoint::Finite(z)
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Distance between two angles measured on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Translation length and rotation angle of a loxodromic element.
///
/// With `lambda` the eigenvalue of the normalized matrix satisfying
/// `|lambda| > 1`, `ell = 2 log|lambda|` and `theta = 2 arg(lambda)` wrapped
/// into `(-pi, pi]`. `exp(ell + i theta) = lambda^2` is the multiplier of the
/// derivative at the repelling fixed point, so the sign ambiguity of the
/// `SL(2, C)` lift does not affect it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ComplexLength {
    pub ell: f64,
    pub theta: f64,
}

impl ComplexLength {
    pub fn new(ell: f64, theta: f64) -> Self {
        Self {
            ell,
            theta: wrap_angle(theta),
        }
    }

    /// Complex length of the `c`-th power.
    pub fn scaled(self, c: u32) -> Self {
        Self::new(self.ell * c as f64, self.theta * c as f64)
    }

    /// `ell + i theta`, defined modulo `2 pi i`.
    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.ell, self.theta)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.ell - other.ell).abs() <= tol && angle_distance(self.theta, other.theta) <= tol
    }
}

impl fmt::Display for ComplexLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.ell, self.theta)
    }
}

/// Data attached to a loxodromic element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loxodromic {
    pub attracting: ExtPoint,
    pub repelling: ExtPoint,
    /// `lambda^2`, the derivative of the inverse map at the attracting point.
    pub multiplier: Complex64,
    /// Eigenvalue of the normalized matrix with modulus greater than one.
    pub eigenvalue: Complex64,
    pub length: ComplexLength,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    Identity,
    /// Rotation by `angle` about the fixed points.
    Elliptic {
        angle: f64,
    },
    Parabolic,
    Loxodromic(Loxodromic),
}

impl Classification {
    pub fn complex_length(&self) -> Option<ComplexLength> {
        match self {
            Classification::Loxodromic(l) => Some(l.length),
            _ => None,
        }
    }
}

/// A Möbius transformation `z -> (az + b) / (cz + d)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MoebiusMap {
    /// Builds the map from any nonsingular matrix, rescaling it into `SL(2, C)`.
    pub fn new(
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    ) -> Result<Self, MoebiusError> {
        let det = a * d - b * c;
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        if !det.is_finite() || !(det.norm() > 1e-300) || det.norm() <= 1e-28 * scale * scale {
            return Err(MoebiusError::Singular {
                det_abs: det.norm(),
            });
        }
        let s = det.sqrt();
        Ok(Self {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    /// Real-entry convenience constructor.
    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MoebiusError> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// `z -> lambda^2 z`, represented by `diag(lambda, 1/lambda)`.
    pub fn diagonal(lambda: Complex64) -> Result<Self, MoebiusError> {
        let zero = Complex64::new(0.0, 0.0);
        Self::new(lambda, zero, zero, lambda.inv())
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }
    pub fn b(&self) -> Complex64 {
        self.b
    }
    pub fn c(&self) -> Complex64 {
        self.c
    }
    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        // Products of unimodular matrices drift slowly; renormalize.
        let s = (a * d - b * c).sqrt();
        Self {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        }
    }

    /// Conjugate `p ∘ self ∘ p^-1`.
    pub fn conjugated_by(&self, p: &Self) -> Self {
        p.compose(self).compose(&p.inverse())
    }

    pub fn apply(&self, z: ExtPoint) -> ExtPoint {
        match z {
            ExtPoint::Infinity => {
                if self.c == Complex64::new(0.0, 0.0) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(self.a / self.c)
                }
            }
            ExtPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() <= f64::EPSILON * (self.c.norm() * z.norm() + self.d.norm()) {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Applies the map to a finite point, returning `None` at the pole.
    pub fn apply_finite(&self, z: Complex64) -> Option<Complex64> {
        self.apply(ExtPoint::Finite(z)).finite()
    }

    /// Preimage of infinity.
    pub fn pole(&self) -> ExtPoint {
        if self.c == Complex64::new(0.0, 0.0) {
            ExtPoint::Infinity
        } else {
            ExtPoint::Finite(-self.d / self.c)
        }
    }

    /// Largest entrywise difference, minimized over the `±` lift.
    pub fn projective_distance(&self, other: &Self) -> f64 {
        let plus = self
            .entries()
            .iter()
            .zip(other.entries())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        let minus = self
            .entries()
            .iter()
            .zip(other.entries())
            .map(|(x, y)| (x + y).norm())
            .fold(0.0, f64::max);
        plus.min(minus)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.projective_distance(&Self::identity()) <= tol
    }

    pub fn classify(&self) -> Result<Classification, MoebiusError> {
        self.classify_with_tol(DEFAULT_DEGENERACY_TOL)
    }

    /// Classifies the map; maps within `tol` of the parabolic locus are
    /// rejected with [`MoebiusError::NearlyDegenerate`].
    pub fn classify_with_tol(&self, tol: f64) -> Result<Classification, MoebiusError> {
        match self.classify_inner(tol) {
            Classification::Parabolic => {
                let t = self.trace();
                Err(MoebiusError::NearlyDegenerate {
                    gap: (t * t - 4.0).norm(),
                })
            }
            other => Ok(other),
        }
    }

    /// Like [`MoebiusMap::classify_with_tol`], but reports near-parabolic maps
    /// as [`Classification::Parabolic`] instead of failing.
    pub fn classify_allowing_parabolic(&self, tol: f64) -> Classification {
        self.classify_inner(tol)
    }

    fn classify_inner(&self, tol: f64) -> Classification {
        if self.is_identity(IDENTITY_TOL) {
            return Classification::Identity;
        }
        let t = self.trace();
        let t2 = t * t;
        if (t2 - 4.0).norm() < tol {
            return Classification::Parabolic;
        }
        if t2.im.abs() <= 1e-14 * t2.norm().max(1.0) && t2.re >= 0.0 && t2.re < 4.0 {
            // t = 2 cos(phi), rotation by 2 phi
            let half = (t2.re.sqrt() / 2.0).clamp(-1.0, 1.0).acos();
            return Classification::Elliptic { angle: 2.0 * half };
        }
        let disc = (t2 - 4.0).sqrt();
        let l1 = (t + disc) / 2.0;
        let l2 = (t - disc) / 2.0;
        let big = if l1.norm() >= l2.norm() { l1 } else { l2 };
        let small = big.inv();
        let length = ComplexLength::new(2.0 * big.norm().ln(), 2.0 * big.arg());
        Classification::Loxodromic(Loxodromic {
            attracting: self.eigen_fixed_point(big),
            repelling: self.eigen_fixed_point(small),
            multiplier: big * big,
            eigenvalue: big,
            length,
        })
    }

    /// Fixed point spanned by the eigenvector of eigenvalue `mu`.
    fn eigen_fixed_point(&self, mu: Complex64) -> ExtPoint {
        if self.c.norm() > 1e-15 * (self.a.norm() + self.d.norm()) {
            ExtPoint::Finite((mu - self.d) / self.c)
        } else if (mu - self.a).norm() <= (mu - self.d).norm() {
            ExtPoint::Infinity
        } else {
            ExtPoint::Finite(self.b / (mu - self.a))
        }
    }

    /// Complex length if loxodromic.
    pub fn complex_length(&self) -> Result<Option<ComplexLength>, MoebiusError> {
        Ok(self.classify()?.complex_length())
    }
}

impl Mul for MoebiusMap {
    type Output = MoebiusMap;
    fn mul(self, rhs: Self) -> Self::Output {
        self.compose(&rhs)
    }
}

impl Mul for &MoebiusMap {
    type Output = MoebiusMap;
    fn mul(self, rhs: Self) -> Self::Output {
        self.compose(rhs)
    }
}

/// A round circle with its open disk as interior.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Result<Self, MoebiusError> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(MoebiusError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn point_at(&self, angle: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, angle)
    }

    /// `n` equally spaced points, the first at angle `offset`.
    pub fn sample(&self, n: usize, offset: f64) -> Vec<Complex64> {
        (0..n)
            .map(|k| self.point_at(offset + 2.0 * PI * k as f64 / n as f64))
            .collect()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// `|c1 - c2| - r1 - r2`; positive when the closed disks are disjoint.
    pub fn separation(&self, other: &Circle) -> f64 {
        (self.center - other.center).norm() - self.radius - other.radius
    }

    pub fn is_disjoint_from(&self, other: &Circle, tol: f64) -> bool {
        self.separation(other) > tol
    }

    pub fn distance_to(&self, z: Complex64) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    /// Closed-disk containment with slack `tol`.
    pub fn contains_disk(&self, inner: &Circle, tol: f64) -> bool {
        (inner.center - self.center).norm() + inner.radius <= self.radius + tol
    }
}

/// A straight line `{ z : Re(conj(normal) z) = offset }`; its interior is the
/// open half-plane where `Re(conj(normal) z) < offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    normal: Complex64,
    offset: f64,
}

impl Line {
    pub fn new(normal: Complex64, offset: f64) -> Result<Self, MoebiusError> {
        let n = normal.norm();
        if !(n > 0.0) || !n.is_finite() || !offset.is_finite() {
            return Err(MoebiusError::InvalidLine);
        }
        Ok(Self {
            normal: normal / n,
            offset: offset / n,
        })
    }

    /// Line through two distinct points, oriented with `interior_point` inside
    /// when given.
    fn through(p: Complex64, q: Complex64) -> Result<Self, MoebiusError> {
        let dir = q - p;
        let normal = Complex64::new(0.0, 1.0) * dir;
        Line::new(normal, (normal.conj() * p).re)
    }

    pub fn normal(&self) -> Complex64 {
        self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn signed(&self, z: Complex64) -> f64 {
        (self.normal.conj() * z).re - self.offset
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.signed(z) < 0.0
    }

    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.signed(z).abs()
    }

    /// Point on the line at parameter `t` along the direction `i * normal`.
    pub fn point_at(&self, t: f64) -> Complex64 {
        self.normal * self.offset + Complex64::new(0.0, t) * self.normal
    }

    fn flipped(&self) -> Self {
        Self {
            normal: -self.normal,
            offset: -self.offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneralizedCircle {
    Circle(Circle),
    Line(Line),
}

impl GeneralizedCircle {
    pub fn circle(center: Complex64, radius: f64) -> Result<Self, MoebiusError> {
        Circle::new(center, radius).map(GeneralizedCircle::Circle)
    }

    pub fn as_circle(&self) -> Option<&Circle> {
        match self {
            GeneralizedCircle::Circle(c) => Some(c),
            GeneralizedCircle::Line(_) => None,
        }
    }

    /// Is `z` in the interior (open disk or open half-plane)?
    pub fn interior_contains(&self, z: ExtPoint) -> bool {
        match (self, z) {
            (_, ExtPoint::Infinity) => false,
            (GeneralizedCircle::Circle(c), ExtPoint::Finite(z)) => c.contains(z),
            (GeneralizedCircle::Line(l), ExtPoint::Finite(z)) => l.contains(z),
        }
    }

    /// Euclidean distance from a point to the curve; infinity lies on lines.
    pub fn distance_to(&self, z: ExtPoint) -> f64 {
        match (self, z) {
            (GeneralizedCircle::Circle(_), ExtPoint::Infinity) => f64::INFINITY,
            (GeneralizedCircle::Line(_), ExtPoint::Infinity) => 0.0,
            (GeneralizedCircle::Circle(c), ExtPoint::Finite(z)) => c.distance_to(z),
            (GeneralizedCircle::Line(l), ExtPoint::Finite(z)) => l.distance_to(z),
        }
    }

    /// A point strictly inside the interior, avoiding `avoid`.
    fn interior_point(&self, avoid: ExtPoint) -> Complex64 {
        let candidates: [Complex64; 3] = match self {
            GeneralizedCircle::Circle(c) => [
                c.center,
                c.center + c.radius * 0.5,
                c.center - Complex64::new(0.0, c.radius * 0.5),
            ],
            GeneralizedCircle::Line(l) => {
                let base = l.point_at(0.0);
                [
                    base - l.normal,
                    base - 2.0 * l.normal,
                    base - l.normal + Complex64::new(0.0, 1.0) * l.normal,
                ]
            }
        };
        candidates
            .into_iter()
            .find(|z| match avoid {
                ExtPoint::Finite(p) => (z - p).norm() > 1e-9,
                ExtPoint::Infinity => true,
            })
            .expect("three distinct candidates cannot all equal one point")
    }
}

/// Image of a generalized circle, with the fate of its interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleImage {
    pub image: GeneralizedCircle,
    /// True if the interior of the source maps onto the interior of `image`.
    pub interior_to_interior: bool,
}

fn circumcircle(p: Complex64, q: Complex64, r: Complex64) -> Option<Circle> {
    let (ax, ay, bx, by, cx, cy) = (p.re, p.im, q.re, q.im, r.re, r.im);
    let d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
    let scale = (q - p).norm().max((r - p).norm()).max(1e-300);
    if d.abs() <= 1e-14 * scale * scale {
        return None;
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let center = Complex64::new(ux, uy);
    Circle::new(center, (p - center).norm()).ok()
}

/// Image of `c` under `m`, with orientation tracking.
///
/// A circle maps to a line exactly when the pole of `m` lies on it. Lines are
/// returned oriented so that the interior of the source maps onto the
/// interior of the image.
pub fn image_of_circle(m: &MoebiusMap, c: &GeneralizedCircle) -> CircleImage {
    let pole = m.pole();
    match c {
        GeneralizedCircle::Circle(circ) => match pole {
            ExtPoint::Infinity => {
                let center = m
                    .apply_finite(circ.center)
                    .expect("affine map has no finite pole");
                let radius = circ.radius * (m.a() / m.d()).norm();
                CircleImage {
                    image: GeneralizedCircle::Circle(Circle { center, radius }),
                    interior_to_interior: true,
                }
            }
            ExtPoint::Finite(p) => {
                let rel = p - circ.center;
                let dist = rel.norm();
                if (dist - circ.radius).abs() <= 1e-12 * circ.radius.max(dist) {
                    let base = rel.arg();
                    let w1 = m
                        .apply_finite(circ.point_at(base + 2.0 * PI / 3.0))
                        .expect("off-pole");
                    let w2 = m
                        .apply_finite(circ.point_at(base + 4.0 * PI / 3.0))
                        .expect("off-pole");
                    let line = Line::through(w1, w2).expect("distinct image points");
                    let inside = m.apply_finite(circ.center).expect("center is not the pole");
                    let line = if line.contains(inside) {
                        line
                    } else {
                        line.flipped()
                    };
                    return CircleImage {
                        image: GeneralizedCircle::Line(line),
                        interior_to_interior: true,
                    };
                }
                // Points symmetric in C map to points symmetric in m(C), and the
                // pole maps to infinity, so the image center is m(p*).
                let center = if dist == 0.0 {
                    m.apply(ExtPoint::Infinity).finite().expect("c != 0 here")
                } else {
                    let mirror = circ.center + circ.radius * circ.radius / rel.conj();
                    m.apply_finite(mirror)
                        .expect("mirror of the pole is not the pole")
                };
                let far = if dist == 0.0 {
                    circ.point_at(0.0)
                } else {
                    circ.center - rel * (circ.radius / dist)
                };
                let radius =
                    (m.apply_finite(far).expect("far point is not the pole") - center).norm();
                CircleImage {
                    image: GeneralizedCircle::Circle(Circle { center, radius }),
                    interior_to_interior: dist > circ.radius,
                }
            }
        },
        GeneralizedCircle::Line(line) => {
            let pole_t = match pole {
                ExtPoint::Finite(p) if line.distance_to(p) <= 1e-12 * (1.0 + p.norm()) => Some(
                    (Complex64::new(0.0, -1.0) * line.normal.conj() * (p - line.point_at(0.0))).re,
                ),
                _ => None,
            };
            let image = if pole.is_infinite() || pole_t.is_some() {
                let t0 = pole_t.unwrap_or(0.0);
                let w1 = m.apply_finite(line.point_at(t0 + 1.0)).expect("off-pole");
                let w2 = m.apply_finite(line.point_at(t0 - 1.0)).expect("off-pole");
                GeneralizedCircle::Line(Line::through(w1, w2).expect("distinct image points"))
            } else {
                let w_inf = m.apply(ExtPoint::Infinity).finite().expect("c != 0 here");
                let w1 = m
                    .apply_finite(line.point_at(1.0))
                    .expect("pole is off the line");
                let w2 = m
                    .apply_finite(line.point_at(-1.0))
                    .expect("pole is off the line");
                GeneralizedCircle::Circle(
                    circumcircle(w_inf, w1, w2).expect("non-collinear images"),
                )
            };
            let probe = m.apply(ExtPoint::Finite(c.interior_point(pole)));
            match image {
                GeneralizedCircle::Line(l) => {
                    let oriented = match probe {
                        ExtPoint::Finite(w) if !l.contains(w) => l.flipped(),
                        _ => l,
                    };
                    CircleImage {
                        image: GeneralizedCircle::Line(oriented),
                        interior_to_interior: true,
                    }
                }
                circle => CircleImage {
                    image: circle,
                    interior_to_interior: circle.interior_contains(probe),
                },
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// A(z) = 3 + 1/(z + 3)
    fn pairing_a() -> MoebiusMap {
        MoebiusMap::from_real(3.0, 10.0, 1.0, 3.0).unwrap()
    }

    #[test]
    fn normalization_gives_unit_determinant() {
        let m = pairing_a();
        assert!((m.det() - 1.0).norm() <= 1e-12);
        let m = MoebiusMap::new(c(2.0, 1.0), c(0.3, -4.0), c(1.5, 0.2), c(-0.7, 2.0)).unwrap();
        assert!((m.det() - 1.0).norm() <= 1e-12);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        assert!(matches!(
            MoebiusMap::from_real(1.0, 2.0, 2.0, 4.0),
            Err(MoebiusError::Singular { .. })
        ));
    }

    #[test]
    fn apply_identity_and_pole() {
        let z = c(1.0, 2.0);
        assert_eq!(MoebiusMap::identity().apply(z.into()), ExtPoint::Finite(z));
        let inv = MoebiusMap::from_real(0.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(inv.apply(c(0.0, 0.0).into()), ExtPoint::Infinity);
        assert_eq!(inv.apply(ExtPoint::Infinity), ExtPoint::Finite(c(0.0, 0.0)));
    }

    #[test]
    fn apply_pairing_lands_on_target_circle() {
        let z = c(-3.0, 0.0) + Complex64::from_polar(1.0, PI / 3.0);
        let w = pairing_a().apply_finite(z).unwrap();
        assert!(((w - 3.0).norm() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let m = MoebiusMap::new(c(2.0, 1.0), c(0.3, -4.0), c(1.5, 0.2), c(-0.7, 2.0)).unwrap();
        assert!((m * m.inverse()).is_identity(1e-10));
        assert!((m.inverse() * m).is_identity(1e-10));
    }

    #[test]
    fn circle_image_identity() {
        let circ = GeneralizedCircle::circle(c(0.0, 0.0), 1.0).unwrap();
        let img = image_of_circle(&MoebiusMap::identity(), &circ);
        let out = img.image.as_circle().unwrap();
        assert!(out.center.norm() <= 1e-15 && (out.radius - 1.0).abs() <= 1e-15);
        assert!(img.interior_to_interior);
    }

    #[test]
    fn circle_image_pairing_swaps_sides() {
        let circ = GeneralizedCircle::circle(c(-3.0, 0.0), 1.0).unwrap();
        let img = image_of_circle(&pairing_a(), &circ);
        let out = img.image.as_circle().unwrap();
        assert!((out.center - c(3.0, 0.0)).norm() <= 1e-12);
        assert!((out.radius - 1.0).abs() <= 1e-12);
        assert!(!img.interior_to_interior);
    }

    #[test]
    fn circle_image_inversion() {
        let inv = MoebiusMap::from_real(0.0, 1.0, 1.0, 0.0).unwrap();
        let circ = GeneralizedCircle::circle(c(0.0, 0.0), 1.0).unwrap();
        let img = image_of_circle(&inv, &circ);
        let out = img.image.as_circle().unwrap();
        assert!(out.center.norm() <= 1e-15 && (out.radius - 1.0).abs() <= 1e-15);
        assert!(!img.interior_to_interior);
    }

    #[test]
    fn circle_through_pole_maps_to_line() {
        let inv = MoebiusMap::from_real(0.0, 1.0, 1.0, 0.0).unwrap();
        // |z - 1| = 1 passes through 0; its image under 1/z is Re w = 1/2.
        let circ = GeneralizedCircle::circle(c(1.0, 0.0), 1.0).unwrap();
        let img = image_of_circle(&inv, &circ);
        let GeneralizedCircle::Line(line) = img.image else {
            panic!("expected a line");
        };
        for t in [-3.0, 0.0, 2.5] {
            assert!((line.point_at(t).re - 0.5).abs() <= 1e-12);
        }
        // interior (disk around 1) maps to Re w > 1/2
        assert!(line.contains(c(2.0, 0.0)));
        // and back again: the line maps to the circle
        let back = image_of_circle(&inv, &img.image);
        let out = back.image.as_circle().unwrap();
        assert!((out.center - 1.0).norm() <= 1e-12 && (out.radius - 1.0).abs() <= 1e-12);
        assert!(back.interior_to_interior);
    }

    #[test]
    fn classify_diagonal() {
        let m = MoebiusMap::diagonal(c(2.0, 0.0)).unwrap();
        let Classification::Loxodromic(l) = m.classify().unwrap() else {
            panic!("expected loxodromic")
        };
        assert!((l.multiplier - 4.0).norm() <= 1e-12);
        assert!((l.length.ell - 2.0 * 2f64.ln()).abs() <= 1e-14);
        assert!(l.length.theta.abs() <= 1e-14);
        assert_eq!(l.attracting, ExtPoint::Infinity);
        assert_eq!(l.repelling, ExtPoint::Finite(c(0.0, 0.0)));
    }

    #[test]
    fn classify_rotating_diagonal() {
        let m = MoebiusMap::diagonal(Complex64::from_polar(2.0, PI / 4.0)).unwrap();
        let l = m.classify().unwrap().complex_length().unwrap();
        assert!((l.ell - 2.0 * 2f64.ln()).abs() <= 1e-14);
        assert!((l.theta - PI / 2.0).abs() <= 1e-14);
    }

    #[test]
    fn classify_pairing_a() {
        // det [[3,10],[1,3]] = -1, so the normalized trace is -6i and
        // lambda = -i (3 + sqrt 10); theta lands on the pi branch.
        let m = pairing_a();
        assert!((m.trace() * m.trace() + 36.0).norm() <= 1e-12);
        let l = m.classify().unwrap().complex_length().unwrap();
        assert!((l.ell - 2.0 * (3.0 + 10f64.sqrt()).ln()).abs() <= 1e-13);
        assert!(angle_distance(l.theta, PI) <= 1e-13);
    }

    #[test]
    fn classify_identity_elliptic_parabolic() {
        assert_eq!(
            MoebiusMap::identity().classify().unwrap(),
            Classification::Identity
        );
        let rot = MoebiusMap::diagonal(Complex64::from_polar(1.0, 0.3)).unwrap();
        let Classification::Elliptic { angle } = rot.classify().unwrap() else {
            panic!("expected elliptic")
        };
        assert!((angle - 0.6).abs() <= 1e-12);
        let para = MoebiusMap::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(
            para.classify(),
            Err(MoebiusError::NearlyDegenerate { .. })
        ));
        assert_eq!(
            para.classify_allowing_parabolic(1e-10),
            Classification::Parabolic
        );
    }

    #[test]
    fn fixed_points_are_fixed() {
        let m = MoebiusMap::new(c(2.0, 1.0), c(0.3, -4.0), c(1.5, 0.2), c(-0.7, 2.0)).unwrap();
        let Classification::Loxodromic(l) = m.classify().unwrap() else {
            panic!()
        };
        for p in [l.attracting, l.repelling] {
            let z = p.finite().unwrap();
            assert!((m.apply_finite(z).unwrap() - z).norm() <= 1e-10);
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() <= 1e-15);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() <= 1e-15);
    }
}
