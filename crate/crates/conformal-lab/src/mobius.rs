//! The Möbius group of the sphere: fractional-linear maps in the north
//! chart coordinate, acting on points and (through `metrics::pullback`) on
//! conformal metrics.
//!
//! Transforms are stored as determinant-normalized 2×2 complex matrices.
//! Points are pushed through homogeneous coordinates (z₁ : z₂) on CP¹, which
//! keeps every formula finite at both poles — no chart-switching case work.

use crate::error::{LabError, Result};
use crate::sphere::SpherePoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::Mul;

/// A Möbius transformation z ↦ (az + b)/(cz + d) of the north chart
/// coordinate, with ad − bc = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "MobiusRecord", into = "MobiusRecord")]
pub struct MobiusTransform {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Flat serialization record: the eight real parts of the matrix entries.
#[derive(Serialize, Deserialize)]
struct MobiusRecord {
    a_re: f64,
    a_im: f64,
    b_re: f64,
    b_im: f64,
    c_re: f64,
    c_im: f64,
    d_re: f64,
    d_im: f64,
}

impl From<MobiusRecord> for MobiusTransform {
    fn from(r: MobiusRecord) -> Self {
        // Renormalize on load so stored rounding cannot accumulate.
        MobiusTransform::new(
            Complex64::new(r.a_re, r.a_im),
            Complex64::new(r.b_re, r.b_im),
            Complex64::new(r.c_re, r.c_im),
            Complex64::new(r.d_re, r.d_im),
        )
    }
}

impl From<MobiusTransform> for MobiusRecord {
    fn from(m: MobiusTransform) -> Self {
        MobiusRecord {
            a_re: m.a.re,
            a_im: m.a.im,
            b_re: m.b.re,
            b_im: m.b.im,
            c_re: m.c.re,
            c_im: m.c.im,
            d_re: m.d.re,
            d_im: m.d.im,
        }
    }
}

impl MobiusTransform {
    /// Builds a transform from matrix entries, normalizing to det = 1.
    ///
    /// Panics if the matrix is singular.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        let det = a * d - b * c;
        assert!(
            det.norm() > 1e-15,
            "Möbius matrix must be invertible (det = {det})"
        );
        let scale = det.sqrt().inv();
        Self {
            a: a * scale,
            b: b * scale,
            c: c * scale,
            d: d * scale,
        }
    }

    /// The identity transform.
    pub fn identity() -> Self {
        Self {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    /// The inverse transform (swap a/d, negate b/c — valid for det = 1).
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Rotation of the sphere by `angle` about the axis through `axis`
    /// (right-hand rule in ambient coordinates).
    pub fn rotation_about(axis: SpherePoint, angle: f64) -> Self {
        let (half_sin, half_cos) = (angle / 2.0).sin_cos();
        // SU(2) representative matching our chart conventions: verified
        // against the ambient Rodrigues formula in the unit tests.
        Self {
            a: Complex64::new(half_cos, axis.x3 * half_sin),
            b: Complex64::new(-axis.x2 * half_sin, axis.x1 * half_sin),
            c: Complex64::new(axis.x2 * half_sin, axis.x1 * half_sin),
            d: Complex64::new(half_cos, -axis.x3 * half_sin),
        }
    }

    /// The minimal rotation taking `p` to `q`.
    ///
    /// For antipodal pairs the geodesic is not unique; the tie-break is a
    /// half-turn about the first ambient basis direction orthogonal to `p`
    /// (x1 preferred), which is deterministic.
    pub fn rotation_between(p: SpherePoint, q: SpherePoint) -> Self {
        let (cx, cy, cz) = p.cross(&q);
        let sin = (cx * cx + cy * cy + cz * cz).sqrt();
        let cos = p.dot(&q);
        if sin < 1e-14 {
            if cos > 0.0 {
                return Self::identity();
            }
            // Antipodal: half-turn about a basis direction ⊥ p.
            let axis = if p.x1.abs() < 0.9 {
                SpherePoint::new(1.0 - p.x1 * p.x1, -p.x1 * p.x2, -p.x1 * p.x3)
            } else {
                SpherePoint::new(-p.x2 * p.x1, 1.0 - p.x2 * p.x2, -p.x2 * p.x3)
            };
            return Self::rotation_about(axis, std::f64::consts::PI);
        }
        let axis = SpherePoint::new(cx / sin, cy / sin, cz / sin);
        Self::rotation_about(axis, sin.atan2(cos))
    }

    /// Conjugated dilation fixing `p` and its antipode.
    ///
    /// Realized as R⁻¹ ∘ D ∘ R where R rotates `p` to the north chart origin
    /// (0,0,−1) and D is z ↦ z/s there. Pulling the round metric back by
    /// `dilation_at(p, s)` with s < 1 concentrates mass near `p`.
    pub fn dilation_at(p: SpherePoint, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(LabError::NonPositiveScale { scale: s });
        }
        let sqrt_s = s.sqrt();
        let dil = Self {
            a: Complex64::new(1.0 / sqrt_s, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(sqrt_s, 0.0),
        };
        let rot = Self::rotation_between(p, SpherePoint::south_pole());
        Ok(rot.inverse() * dil * rot)
    }

    /// Homogeneous action on CP¹ and return to the sphere.
    ///
    /// The input is lifted to a unit vector (z₁, z₂) with z = z₁/z₂ the
    /// north coordinate (the representative is chosen by the larger
    /// denominator, so both poles are regular), mapped linearly, and
    /// projected back by x3 = (|w₁|²−|w₂|²)/‖w‖², x1+ix2 = 2w₁·conj(w₂)/‖w‖².
    pub fn apply(&self, p: SpherePoint) -> SpherePoint {
        let (z1, z2) = homogeneous(p);
        let w1 = self.a * z1 + self.b * z2;
        let w2 = self.c * z1 + self.d * z2;
        from_homogeneous(w1, w2)
    }

    /// Action on a chart coordinate (north chart), without pole handling.
    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Conformal stretch λ_σ(p) of the map with respect to the round metric:
    /// the pulled-back metric is σ*(g_{S²}) = λ_σ² g_{S²}... in exponent
    /// form, pullback adds log λ_σ to the conformal factor.
    ///
    /// In homogeneous form λ = 1/‖M·ẑ‖² for the unit representative ẑ,
    /// which agrees with the chart formula |σ′(z)|(1+|z|²)/(1+|σ(z)|²) and
    /// stays finite at both poles.
    pub fn stretch(&self, p: SpherePoint) -> f64 {
        let (z1, z2) = homogeneous(p);
        let w1 = self.a * z1 + self.b * z2;
        let w2 = self.c * z1 + self.d * z2;
        1.0 / (w1.norm_sqr() + w2.norm_sqr())
    }

    /// log λ_σ(p); see [`MobiusTransform::stretch`].
    pub fn log_stretch(&self, p: SpherePoint) -> f64 {
        let (z1, z2) = homogeneous(p);
        let w1 = self.a * z1 + self.b * z2;
        let w2 = self.c * z1 + self.d * z2;
        -(w1.norm_sqr() + w2.norm_sqr()).ln()
    }

    /// sup over the sphere of |log λ_σ| — a scale-invariant distance from
    /// the rotation subgroup (0 exactly for rotations).
    ///
    /// Closed form from the singular values of the unit-determinant matrix:
    /// sup|log λ| = log σ_max² where σ_max² = (T + √(T²−4))/2 and T is the
    /// squared Frobenius norm. The square root near T = 2 amplifies rounding
    /// to about √ε ≈ 1e-8, which is the resolution of this function.
    pub fn sup_log_stretch(&self) -> f64 {
        let t = self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr();
        let t = t.max(2.0);
        ((t + (t * t - 4.0).sqrt()) / 2.0).ln()
    }

    /// Frobenius distance to another transform, modulo the ±M sign ambiguity
    /// of the determinant normalization.
    pub fn distance(&self, other: &Self) -> f64 {
        let direct = (self.a - other.a).norm_sqr()
            + (self.b - other.b).norm_sqr()
            + (self.c - other.c).norm_sqr()
            + (self.d - other.d).norm_sqr();
        let flipped = (self.a + other.a).norm_sqr()
            + (self.b + other.b).norm_sqr()
            + (self.c + other.c).norm_sqr()
            + (self.d + other.d).norm_sqr();
        direct.min(flipped).sqrt()
    }
}

impl Mul for MobiusTransform {
    type Output = MobiusTransform;

    /// Matrix product: (σ ∘ τ)(z) = σ(τ(z)).
    fn mul(self, rhs: Self) -> Self {
        // Renormalize to stop determinant drift over long compositions.
        Self::new(
            self.a * rhs.a + self.b * rhs.c,
            self.a * rhs.b + self.b * rhs.d,
            self.c * rhs.a + self.d * rhs.c,
            self.c * rhs.b + self.d * rhs.d,
        )
    }
}

/// Unit-norm homogeneous representative (z₁, z₂) of the north coordinate.
fn homogeneous(p: SpherePoint) -> (Complex64, Complex64) {
    // z = (x1+ix2)/(1−x3) = (1+x3)/(x1−ix2): pick the better-conditioned
    // form, then normalize.
    let (z1, z2) = if p.x3 <= 0.0 {
        (Complex64::new(p.x1, p.x2), Complex64::new(1.0 - p.x3, 0.0))
    } else {
        (Complex64::new(1.0 + p.x3, 0.0), Complex64::new(p.x1, -p.x2))
    };
    let norm = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
    (z1 / norm, z2 / norm)
}

/// Sphere point of a homogeneous coordinate pair (not necessarily unit).
fn from_homogeneous(w1: Complex64, w2: Complex64) -> SpherePoint {
    let n1 = w1.norm_sqr();
    let n2 = w2.norm_sqr();
    let denom = n1 + n2;
    let cross = 2.0 * (w1 * w2.conj()) / denom;
    SpherePoint::new(cross.re, cross.im, (n1 - n2) / denom)
}
