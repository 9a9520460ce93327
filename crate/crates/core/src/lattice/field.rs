use std::f64::consts::TAU;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::{invalid, LatticeError};

/// Triply periodic minimal surface family.
///
/// Only the gyroid has an exact trigonometric form; the others use the
/// nodal approximations that are standard in lattice design tools.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TpmsKind {
    Gyroid,
    SchwarzPrimitive,
    Diamond,
    Lidinoid,
}

impl TpmsKind {
    /// Evaluate the level-set function at normalized coordinates, where one
    /// unit cell spans `2π` along each axis.
    pub fn eval_normalized(self, x: f64, y: f64, z: f64) -> f64 {
        let (sx, cx) = x.sin_cos();
        let (sy, cy) = y.sin_cos();
        let (sz, cz) = z.sin_cos();
        match self {
            // sin x cos y + sin y cos z + sin z cos x
            TpmsKind::Gyroid => sx * cy + sy * cz + sz * cx,
            // cos x + cos y + cos z
            TpmsKind::SchwarzPrimitive => cx + cy + cz,
            // Schwarz D:
            // sin x sin y sin z + sin x cos y cos z + cos x sin y cos z + cos x cos y sin z
            TpmsKind::Diamond => sx * sy * sz + sx * cy * cz + cx * sy * cz + cx * cy * sz,
            // 0.5 (sin 2x cos y sin z + sin 2y cos z sin x + sin 2z cos x sin y)
            //   - 0.5 (cos 2x cos 2y + cos 2y cos 2z + cos 2z cos 2x) + 0.15
            TpmsKind::Lidinoid => {
                let (s2x, c2x) = (2.0 * x).sin_cos();
                let (s2y, c2y) = (2.0 * y).sin_cos();
                let (s2z, c2z) = (2.0 * z).sin_cos();
                0.5 * (s2x * cy * sz + s2y * cz * sx + s2z * cx * sy)
                    - 0.5 * (c2x * c2y + c2y * c2z + c2z * c2x)
                    + 0.15
            }
        }
    }

    /// Upper bound on `|g|` over all of space. Any shell half-width at or
    /// above `bound + |t|` makes the whole domain solid.
    pub fn amplitude_bound(self) -> f64 {
        match self {
            TpmsKind::Gyroid => 1.5,
            TpmsKind::SchwarzPrimitive => 3.0,
            TpmsKind::Diamond => 2.0_f64.sqrt(),
            TpmsKind::Lidinoid => 3.15,
        }
    }
}

impl std::str::FromStr for TpmsKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['_', '-', ' '], "").as_str() {
            "gyroid" => Ok(TpmsKind::Gyroid),
            "schwarzprimitive" | "primitive" | "schwarzp" => Ok(TpmsKind::SchwarzPrimitive),
            "diamond" | "schwarzd" => Ok(TpmsKind::Diamond),
            "lidinoid" => Ok(TpmsKind::Lidinoid),
            other => Err(format!("unknown TPMS kind '{other}'")),
        }
    }
}

/// Implicit lattice phase: solid where `|g(p) - level| <= shell_halfwidth`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TpmsField {
    pub kind: TpmsKind,
    /// Period of one unit cell, m.
    pub cell_size: f64,
    pub level: f64,
    pub shell_halfwidth: f64,
    /// Lattice origin; the field is translated with it.
    #[serde(default = "Point3::origin")]
    pub origin: Point3<f64>,
}

impl TpmsField {
    pub fn new(
        kind: TpmsKind,
        cell_size: f64,
        level: f64,
        shell_halfwidth: f64,
    ) -> Result<Self, LatticeError> {
        let field = TpmsField {
            kind,
            cell_size,
            level,
            shell_halfwidth,
            origin: Point3::origin(),
        };
        field.validate()?;
        Ok(field)
    }

    pub fn with_origin(mut self, origin: Point3<f64>) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_halfwidth(mut self, w: f64) -> Self {
        self.shell_halfwidth = w;
        self
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if !(self.cell_size > 0.0 && self.cell_size.is_finite()) {
            return Err(invalid(
                "cell_size",
                format!("must be positive, got {}", self.cell_size),
            ));
        }
        if !(self.shell_halfwidth >= 0.0 && self.shell_halfwidth.is_finite()) {
            return Err(invalid(
                "shell_halfwidth",
                format!("must be non-negative, got {}", self.shell_halfwidth),
            ));
        }
        if !self.level.is_finite() {
            return Err(invalid("level", "must be finite"));
        }
        Ok(())
    }

    /// `g(2π p / cell_size) - t`.
    pub fn eval(&self, p: &Point3<f64>) -> f64 {
        self.eval_offset(&(p - self.origin))
    }

    /// Evaluate at a displacement from the field origin.
    pub(crate) fn eval_offset(&self, d: &Vector3<f64>) -> f64 {
        let s = TAU / self.cell_size;
        self.kind.eval_normalized(d.x * s, d.y * s, d.z * s) - self.level
    }

    pub fn is_solid(&self, p: &Point3<f64>) -> bool {
        self.eval(p).abs() <= self.shell_halfwidth
    }

    /// Signed shell indicator scaled to roughly meters (negative inside).
    pub(crate) fn shell_value_offset(&self, d: &Vector3<f64>) -> f64 {
        (self.eval_offset(d).abs() - self.shell_halfwidth) * self.cell_size / TAU
    }
}

/// Free-function form of [`TpmsField::eval`].
pub fn eval_field(field: &TpmsField, point: &Point3<f64>) -> f64 {
    field.eval(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn gyroid(cell: f64, t: f64) -> TpmsField {
        TpmsField::new(TpmsKind::Gyroid, cell, t, 0.0).unwrap()
    }

    #[test]
    fn gyroid_point_values() {
        assert_eq!(gyroid(0.008, 0.0).eval(&Point3::origin()), 0.0);
        let f = gyroid(TAU, 0.0);
        assert!((f.eval(&Point3::new(FRAC_PI_2, 0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert_eq!(gyroid(0.008, 0.3).eval(&Point3::origin()), -0.3);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TpmsField::new(TpmsKind::Gyroid, 0.0, 0.0, 0.1).is_err());
        assert!(TpmsField::new(TpmsKind::Gyroid, 0.01, 0.0, -0.1).is_err());
    }

    #[test]
    fn amplitude_bounds_hold_on_a_grid() {
        for kind in [
            TpmsKind::Gyroid,
            TpmsKind::SchwarzPrimitive,
            TpmsKind::Diamond,
            TpmsKind::Lidinoid,
        ] {
            let n = 24;
            let mut max = 0.0_f64;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let c = |m: usize| m as f64 * TAU / n as f64;
                        max = max.max(kind.eval_normalized(c(i), c(j), c(k)).abs());
                    }
                }
            }
            assert!(max <= kind.amplitude_bound() + 1e-12, "{kind:?} {max}");
        }
    }

    #[test]
    fn primitive_peak() {
        assert!((TpmsKind::SchwarzPrimitive.eval_normalized(0.0, 0.0, 0.0) - 3.0).abs() < 1e-15);
        assert!((TpmsKind::SchwarzPrimitive.eval_normalized(PI, PI, PI) + 3.0).abs() < 1e-15);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("Gyroid".parse::<TpmsKind>().unwrap(), TpmsKind::Gyroid);
        assert_eq!(
            "schwarz_primitive".parse::<TpmsKind>().unwrap(),
            TpmsKind::SchwarzPrimitive
        );
        assert!("octet".parse::<TpmsKind>().is_err());
    }
}
