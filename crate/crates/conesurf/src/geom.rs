//! Plane isometries and similarities.
//!
//! The euclidean plane is identified with ℂ. An orientation-preserving
//! isometry acts as z ↦ u·z + v with |u| = 1; a similarity as z ↦ a·z + b
//! with a ≠ 0. This single action convention is used by every module in the
//! crate. Rotation parts are renormalized to unit modulus after every
//! construction and composition so that long products stay on U(1).

use num_complex::Complex64;
use thiserror::Error;

/// Default relative tolerance for geometric comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A position in the developed plane.
pub type PlanePoint = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// The element is a translation or the identity; it has no fixed point.
    #[error("no fixed point: rotation part within {tol} of 1")]
    NoFixedPoint { tol: f64 },
    /// A segment used to define an isometry has (near-)zero length.
    #[error("degenerate segment of length {len}")]
    DegenerateSegment { len: f64 },
    /// The two segments do not have matching lengths.
    #[error("segment length mismatch: {src} vs {dst}")]
    LengthMismatch { src: f64, dst: f64 },
}

/// An orientation-preserving isometry of the plane, z ↦ u·z + v.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SE2 {
    u: Complex64,
    v: Complex64,
}

impl SE2 {
    /// Builds z ↦ u·z + v, renormalizing `u` to unit modulus.
    ///
    /// Panics if `u` is zero.
    pub fn new(u: Complex64, v: Complex64) -> Self {
        let norm = u.norm();
        assert!(norm > 0.0, "rotation part must be nonzero");
        SE2 { u: u / norm, v }
    }

    pub fn identity() -> Self {
        SE2 {
            u: Complex64::new(1.0, 0.0),
            v: Complex64::new(0.0, 0.0),
        }
    }

    /// Rotation by `angle` radians about the origin.
    pub fn rotation(angle: f64) -> Self {
        SE2 {
            u: Complex64::from_polar(1.0, angle),
            v: Complex64::new(0.0, 0.0),
        }
    }

    /// Rotation by `angle` radians about `center`.
    pub fn rotation_about(angle: f64, center: PlanePoint) -> Self {
        let u = Complex64::from_polar(1.0, angle);
        SE2 {
            u,
            v: center - u * center,
        }
    }

    pub fn translation(v: Complex64) -> Self {
        SE2 {
            u: Complex64::new(1.0, 0.0),
            v,
        }
    }

    pub fn u(&self) -> Complex64 {
        self.u
    }

    pub fn v(&self) -> Complex64 {
        self.v
    }

    /// Rotation angle in (−π, π].
    pub fn angle(&self) -> f64 {
        self.u.arg()
    }

    pub fn apply(&self, z: PlanePoint) -> PlanePoint {
        self.u * z + self.v
    }

    /// Group product: the result acts as `self` applied after `other`.
    pub fn compose(&self, other: &SE2) -> SE2 {
        SE2::new(self.u * other.u, self.v + self.u * other.v)
    }

    pub fn inverse(&self) -> SE2 {
        // for unit u the inverse rotation is the conjugate
        let ui = self.u.conj();
        SE2::new(ui, -ui * self.v)
    }

    /// The unique fixed point v/(1−u) of a nontrivial rotation.
    pub fn fixed_point(&self, tol: f64) -> Result<PlanePoint, GeomError> {
        let one = Complex64::new(1.0, 0.0);
        if (self.u - one).norm() <= tol {
            return Err(GeomError::NoFixedPoint { tol });
        }
        Ok(self.v / (one - self.u))
    }

    /// True when both components are within `tol` of the identity.
    pub fn is_identity(&self, tol: f64) -> bool {
        (self.u - Complex64::new(1.0, 0.0)).norm() <= tol && self.v.norm() <= tol
    }

    /// Componentwise distance, for comparisons in tests and reports.
    pub fn dist(&self, other: &SE2) -> f64 {
        (self.u - other.u).norm().max((self.v - other.v).norm())
    }
}

/// An orientation-preserving similarity of the plane, z ↦ a·z + b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sim2 {
    a: Complex64,
    b: Complex64,
}

impl Sim2 {
    /// Panics if `a` is zero.
    pub fn new(a: Complex64, b: Complex64) -> Self {
        assert!(a.norm() > 0.0, "scale part must be nonzero");
        Sim2 { a, b }
    }

    pub fn identity() -> Self {
        Sim2 {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
        }
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn apply(&self, z: PlanePoint) -> PlanePoint {
        self.a * z + self.b
    }

    pub fn compose(&self, other: &Sim2) -> Sim2 {
        Sim2::new(self.a * other.a, self.b + self.a * other.b)
    }

    /// Conjugates an isometry: g φ g⁻¹ = (u, a·v + b·(1 − u)).
    ///
    /// The rotation part is copied untouched; only the translation part is
    /// recomputed.
    pub fn conjugate_se2(&self, phi: &SE2) -> SE2 {
        let one = Complex64::new(1.0, 0.0);
        SE2 {
            u: phi.u,
            v: self.a * phi.v + self.b * (one - phi.u),
        }
    }
}

impl From<SE2> for Sim2 {
    fn from(g: SE2) -> Sim2 {
        Sim2 { a: g.u, b: g.v }
    }
}

/// The unique orientation-preserving isometry carrying the segment
/// (src_start → src_end) onto (dst_start → dst_end).
///
/// The two segments must be nondegenerate and of equal length up to
/// `tol` relative error.
pub fn isometry_from_edge_pair(
    src_start: PlanePoint,
    src_end: PlanePoint,
    dst_start: PlanePoint,
    dst_end: PlanePoint,
    tol: f64,
) -> Result<SE2, GeomError> {
    let src = src_end - src_start;
    let dst = dst_end - dst_start;
    let (ls, ld) = (src.norm(), dst.norm());
    if ls == 0.0 || ld == 0.0 {
        return Err(GeomError::DegenerateSegment { len: ls.min(ld) });
    }
    if (ls - ld).abs() > tol * ls.max(ld) {
        return Err(GeomError::LengthMismatch { src: ls, dst: ld });
    }
    let u = dst / src; // renormalized by SE2::new
    let g = SE2::new(u, Complex64::new(0.0, 0.0));
    Ok(SE2::new(g.u, dst_start - g.u * src_start))
}
