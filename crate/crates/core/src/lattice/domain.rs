use std::f64::consts::{PI, TAU};

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::{invalid, LatticeError};

/// Annular sector extruded along +z: the envelope of the compliant module.
///
/// Angles are measured in the xy-plane from +x toward +y, about `origin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorDomain {
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// `[start, end]` in radians.
    pub angular_span: [f64; 2],
    pub thickness: f64,
    #[serde(default = "Point3::origin")]
    pub origin: Point3<f64>,
}

impl SectorDomain {
    pub fn new(
        inner_radius: f64,
        outer_radius: f64,
        angular_span: [f64; 2],
        thickness: f64,
    ) -> Result<Self, LatticeError> {
        let d = SectorDomain {
            inner_radius,
            outer_radius,
            angular_span,
            thickness,
            origin: Point3::origin(),
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let [start, end] = self.angular_span;
        if !(self.inner_radius > 0.0 && self.inner_radius < self.outer_radius) {
            return Err(invalid(
                "domain.inner_radius",
                format!(
                    "need 0 < inner ({}) < outer ({})",
                    self.inner_radius, self.outer_radius
                ),
            ));
        }
        let span = end - start;
        if !(span > 0.0 && span < TAU) {
            return Err(invalid(
                "domain.angular_span",
                format!("end - start must lie in (0, 2π), got {span}"),
            ));
        }
        if !(self.thickness > 0.0 && self.thickness.is_finite()) {
            return Err(invalid("domain.thickness", "must be positive"));
        }
        Ok(())
    }

    pub fn span(&self) -> f64 {
        self.angular_span[1] - self.angular_span[0]
    }

    fn local_sdf(&self, d: &Vector3<f64>) -> f64 {
        let r = d.x.hypot(d.y);
        let annulus = (r - self.outer_radius).max(self.inner_radius - r);
        let [start, end] = self.angular_span;
        // half-planes bounding the wedge, outward normals
        let d_start = d.x * start.sin() - d.y * start.cos();
        let d_end = -d.x * end.sin() + d.y * end.cos();
        let wedge = if self.span() <= PI {
            d_start.max(d_end)
        } else {
            d_start.min(d_end)
        };
        let slab = (-d.z).max(d.z - self.thickness);
        annulus.max(wedge).max(slab)
    }

    fn local_bounds(&self) -> (Vector3<f64>, Vector3<f64>) {
        let [start, end] = self.angular_span;
        let mut angles = vec![start, end];
        // axis-aligned extremes swept by the arc
        let first = (start / (PI / 2.0)).ceil() as i64;
        let mut k = first;
        while (k as f64) * PI / 2.0 < end {
            angles.push(k as f64 * PI / 2.0);
            k += 1;
        }
        let mut lo = Vector3::new(f64::INFINITY, f64::INFINITY, 0.0);
        let mut hi = Vector3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, self.thickness);
        for a in angles {
            for r in [self.inner_radius, self.outer_radius] {
                let (s, c) = a.sin_cos();
                lo.x = lo.x.min(r * c);
                lo.y = lo.y.min(r * s);
                hi.x = hi.x.max(r * c);
                hi.y = hi.y.max(r * s);
            }
        }
        (lo, hi)
    }

    fn local_sample(&self, u: f64, v: f64, w: f64) -> Vector3<f64> {
        let (ri, ro) = (self.inner_radius, self.outer_radius);
        // area-uniform radius
        let r = (ri * ri + u * (ro * ro - ri * ri)).sqrt();
        let a = self.angular_span[0] + v * self.span();
        Vector3::new(r * a.cos(), r * a.sin(), w * self.thickness)
    }

    pub fn volume(&self) -> f64 {
        0.5 * self.span() * (self.outer_radius.powi(2) - self.inner_radius.powi(2)) * self.thickness
    }
}

/// Axis-aligned box `[min, max]`, e.g. a whole number of unit cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl BoxDomain {
    pub fn new(min: Point3<f64>, max: Point3<f64>) -> Result<Self, LatticeError> {
        let b = BoxDomain { min, max };
        b.validate()?;
        Ok(b)
    }

    /// Cube of side `size` with one corner at the origin.
    pub fn cube(size: f64) -> Result<Self, LatticeError> {
        Self::new(Point3::origin(), Point3::new(size, size, size))
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        let e = self.max - self.min;
        if !(e.x > 0.0 && e.y > 0.0 && e.z > 0.0) || !e.iter().all(|v| v.is_finite()) {
            return Err(LatticeError::EmptyDomain(format!(
                "box extents must be positive, got {:?}",
                e.as_slice()
            )));
        }
        Ok(())
    }
}

/// Region the lattice is clipped to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    Sector(SectorDomain),
    Box(BoxDomain),
}

impl Domain {
    pub fn validate(&self) -> Result<(), LatticeError> {
        match self {
            Domain::Sector(s) => s.validate().map_err(|e| match e {
                LatticeError::InvalidParameter { field, reason } => {
                    LatticeError::EmptyDomain(format!("{field}: {reason}"))
                }
                other => other,
            }),
            Domain::Box(b) => b.validate(),
        }
    }

    /// Reference point: local coordinates are measured from here.
    pub fn origin(&self) -> Point3<f64> {
        match self {
            Domain::Sector(s) => s.origin,
            Domain::Box(b) => b.min,
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Domain::Sector(s) => s.volume(),
            Domain::Box(b) => (b.max - b.min).product(),
        }
    }

    /// Distance-like function of a local displacement, negative inside.
    pub(crate) fn local_sdf(&self, d: &Vector3<f64>) -> f64 {
        match self {
            Domain::Sector(s) => s.local_sdf(d),
            Domain::Box(b) => {
                let e = b.max - b.min;
                let mut v = f64::NEG_INFINITY;
                for i in 0..3 {
                    v = v.max(-d[i]).max(d[i] - e[i]);
                }
                v
            }
        }
    }

    pub fn sdf(&self, p: &Point3<f64>) -> f64 {
        self.local_sdf(&(p - self.origin()))
    }

    pub fn contains(&self, p: &Point3<f64>) -> bool {
        self.sdf(p) <= 0.0
    }

    /// Local axis-aligned bounds.
    pub(crate) fn local_bounds(&self) -> (Vector3<f64>, Vector3<f64>) {
        match self {
            Domain::Sector(s) => s.local_bounds(),
            Domain::Box(b) => (Vector3::zeros(), b.max - b.min),
        }
    }

    /// Volume-preserving map from the unit cube onto the domain, in local
    /// coordinates.
    pub(crate) fn local_sample(&self, u: f64, v: f64, w: f64) -> Vector3<f64> {
        match self {
            Domain::Sector(s) => s.local_sample(u, v, w),
            Domain::Box(b) => {
                let e = b.max - b.min;
                Vector3::new(u * e.x, v * e.y, w * e.z)
            }
        }
    }

    pub fn translated(&self, by: &Vector3<f64>) -> Domain {
        match *self {
            Domain::Sector(mut s) => {
                s.origin += by;
                Domain::Sector(s)
            }
            Domain::Box(mut b) => {
                b.min += by;
                b.max += by;
                Domain::Box(b)
            }
        }
    }
}

impl From<SectorDomain> for Domain {
    fn from(s: SectorDomain) -> Self {
        Domain::Sector(s)
    }
}

impl From<BoxDomain> for Domain {
    fn from(b: BoxDomain) -> Self {
        Domain::Box(b)
    }
}
