use std::collections::HashMap;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest admissible triangle area, m².
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshDefect {
    #[error("mesh has no triangles")]
    Empty,
    #[error("triangle {0} references a missing vertex")]
    BadIndex(usize),
    #[error("edge ({a}, {b}) is used by {count} triangles")]
    NonManifoldEdge { a: u32, b: u32, count: usize },
    #[error("edge ({a}, {b}) is traversed twice in the same direction")]
    InconsistentOrientation { a: u32, b: u32 },
    #[error("triangle {index} is degenerate (area {area:e})")]
    Degenerate { index: usize, area: f64 },
    #[error("signed volume {0:e} is not positive")]
    InwardFacing(f64),
}

/// Indexed triangle mesh, counter-clockwise faces seen from outside.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<Point3<f64>>,
    pub triangles: Vec<[u32; 3]>,
}

impl SurfaceMesh {
    pub fn triangle(&self, t: usize) -> [Point3<f64>; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle(t);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    /// Enclosed volume by the divergence theorem; positive when outward.
    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle(t);
                a.coords.dot(&b.coords.cross(&c.coords))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| self.triangle_area(t))
            .sum()
    }

    /// Undirected edge -> number of incident triangles.
    pub fn edge_counts(&self) -> HashMap<(u32, u32), usize> {
        let mut counts = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }

    /// `V - E + F`, counting only referenced vertices.
    pub fn euler_characteristic(&self) -> i64 {
        let mut used = vec![false; self.vertices.len()];
        for tri in &self.triangles {
            for &v in tri {
                if let Some(u) = used.get_mut(v as usize) {
                    *u = true;
                }
            }
        }
        let v = used.iter().filter(|&&u| u).count() as i64;
        let e = self.edge_counts().len() as i64;
        v - e + self.triangles.len() as i64
    }

    pub fn translate(&mut self, by: &Vector3<f64>) {
        for v in &mut self.vertices {
            *v += by;
        }
    }

    /// Check every structural invariant: indices in range, each edge shared
    /// by exactly two oppositely oriented triangles, no degenerate triangles
    /// and a positive enclosed volume.
    pub fn validate(&self) -> Result<(), MeshDefect> {
        if self.triangles.is_empty() {
            return Err(MeshDefect::Empty);
        }
        let nv = self.vertices.len() as u32;
        let mut directed: HashMap<(u32, u32), usize> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(MeshDefect::BadIndex(t));
            }
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                let c = directed.entry(e).or_insert(0);
                *c += 1;
                if *c > 1 {
                    return Err(MeshDefect::InconsistentOrientation { a: e.0, b: e.1 });
                }
            }
        }
        for (&(a, b), &count) in &self.edge_counts() {
            if count != 2 {
                return Err(MeshDefect::NonManifoldEdge { a, b, count });
            }
        }
        // with every undirected edge used twice and no directed duplicates,
        // each edge appears once in each direction
        for t in 0..self.triangles.len() {
            let area = self.triangle_area(t);
            if !(area > MIN_TRIANGLE_AREA) {
                return Err(MeshDefect::Degenerate { index: t, area });
            }
        }
        let vol = self.signed_volume();
        if !(vol > 0.0) {
            return Err(MeshDefect::InwardFacing(vol));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Unit-scale tetrahedron with outward faces.
    pub(crate) fn tetrahedron(scale: f64) -> SurfaceMesh {
        SurfaceMesh {
            vertices: vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(scale, 0.0, 0.0),
                Point3::new(0.0, scale, 0.0),
                Point3::new(0.0, 0.0, scale),
            ],
            triangles: vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]],
        }
    }

    #[test]
    fn tetrahedron_is_valid() {
        let m = tetrahedron(0.01);
        m.validate().unwrap();
        assert_eq!(m.euler_characteristic(), 2);
        assert!((m.signed_volume() - 1e-6 / 6.0).abs() < 1e-18);
    }

    #[test]
    fn flipped_mesh_is_rejected() {
        let mut m = tetrahedron(0.01);
        for t in &mut m.triangles {
            t.swap(1, 2);
        }
        assert!(matches!(m.validate(), Err(MeshDefect::InwardFacing(_))));
    }

    #[test]
    fn open_mesh_is_rejected() {
        let mut m = tetrahedron(0.01);
        m.triangles.pop();
        assert!(matches!(
            m.validate(),
            Err(MeshDefect::NonManifoldEdge { count: 1, .. })
        ));
    }

    #[test]
    fn one_face_flipped_is_rejected() {
        let mut m = tetrahedron(0.01);
        m.triangles[0].swap(1, 2);
        assert!(matches!(
            m.validate(),
            Err(MeshDefect::InconsistentOrientation { .. })
        ));
    }

    #[test]
    fn degenerate_is_rejected() {
        let m = tetrahedron(1e-7);
        assert!(matches!(m.validate(), Err(MeshDefect::Degenerate { .. })));
    }
}
