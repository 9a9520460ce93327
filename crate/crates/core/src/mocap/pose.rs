use nalgebra::{Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use super::MocapError;

const MIN_AREA_MM2: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidBodyPose {
    pub rotation: Matrix3<f64>,
    /// mm
    pub translation: Vector3<f64>,
    /// Root-mean-square residual of the fit, mm.
    pub rmsd: f64,
}

impl RigidBodyPose {
    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }
}

/// Least-squares rigid transform taking `reference` onto `observed`
/// (Kabsch). Reflections are excluded.
pub fn solve_pose(
    reference: &[Point3<f64>; 3],
    observed: &[Point3<f64>; 3],
) -> Result<RigidBodyPose, MocapError> {
    let area = 0.5
        * (reference[1] - reference[0])
            .cross(&(reference[2] - reference[0]))
            .norm();
    if !(area > MIN_AREA_MM2) {
        return Err(MocapError::Collinear(area));
    }
    let centroid = |pts: &[Point3<f64>; 3]| (pts[0].coords + pts[1].coords + pts[2].coords) / 3.0;
    let (cp, cq) = (centroid(reference), centroid(observed));

    let mut h = Matrix3::zeros();
    for (p, q) in reference.iter().zip(observed) {
        h += (p.coords - cp) * (q.coords - cq).transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested Vᵀ"));
    let v = v_t.transpose();
    let d = (v * u.transpose()).determinant().signum();
    let rotation = v * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * u.transpose();
    let translation = cq - rotation * cp;

    let pose = RigidBodyPose {
        rotation,
        translation,
        rmsd: 0.0,
    };
    let sq: f64 = reference
        .iter()
        .zip(observed)
        .map(|(p, q)| (pose.apply(p) - q).norm_squared())
        .sum();
    Ok(RigidBodyPose {
        rmsd: (sq / 3.0).sqrt(),
        ..pose
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Rotation3;

    fn tri() -> [Point3<f64>; 3] {
        [
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(100.0, 0.0, 0.0),
            Point3::new(20.0, 60.0, 5.0),
        ]
    }

    #[test]
    fn identity() {
        let p = solve_pose(&tri(), &tri()).unwrap();
        assert!((p.rotation - Matrix3::identity()).norm() < 1e-12);
        assert!(p.translation.norm() < 1e-12);
        assert!(p.rmsd < 1e-12);
    }

    #[test]
    fn quarter_turn_about_z() {
        let r = Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::FRAC_PI_2);
        let t = Vector3::new(10.0, 0.0, 0.0);
        let obs = tri().map(|p| r * p + t);
        let pose = solve_pose(&tri(), &obs).unwrap();
        assert!((pose.rotation - r.matrix()).abs().max() < 1e-9);
        assert!((pose.translation - t).abs().max() < 1e-9);
    }

    #[test]
    fn collinear_rejected() {
        let line = [
            Point3::origin(),
            Point3::new(1.0, 1.0, 1.0),
            Point3::new(2.0, 2.0, 2.0),
        ];
        assert!(matches!(
            solve_pose(&line, &line),
            Err(MocapError::Collinear(_))
        ));
    }

    #[test]
    fn mirror_image_still_gives_a_rotation() {
        let obs = tri().map(|p| Point3::new(p.x, p.y, -p.z));
        let pose = solve_pose(&tri(), &obs).unwrap();
        assert!((pose.rotation.determinant() - 1.0).abs() < 1e-9);
    }
}
