//! Binary STL: 80-byte header, little-endian `u32` triangle count, then 50
//! bytes per triangle (normal, three vertices as `f32`, `u16` attribute).

use std::collections::HashMap;
use std::path::Path;

use nalgebra::Point3;

use super::{LatticeError, SurfaceMesh};
use crate::io::write_atomic;

const HEADER: &[u8] = b"dcl binary STL";

/// Serialize `mesh` to binary STL bytes. The header is fixed, so equal
/// meshes always give identical files.
pub fn stl_bytes(mesh: &SurfaceMesh) -> Vec<u8> {
    let mut out = Vec::with_capacity(84 + 50 * mesh.triangles.len());
    let mut header = [0u8; 80];
    header[..HEADER.len()].copy_from_slice(HEADER);
    out.extend_from_slice(&header);
    out.extend_from_slice(&(mesh.triangles.len() as u32).to_le_bytes());
    for t in 0..mesh.triangles.len() {
        let [a, b, c] = mesh.triangle(t);
        let n = (b - a).cross(&(c - a));
        let n = n.try_normalize(0.0).unwrap_or(n);
        for x in n.iter().chain(a.iter()).chain(b.iter()).chain(c.iter()) {
            out.extend_from_slice(&(*x as f32).to_le_bytes());
        }
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    out
}

pub fn export_stl(mesh: &SurfaceMesh, path: &Path) -> Result<(), LatticeError> {
    write_atomic(path, &stl_bytes(mesh))?;
    Ok(())
}

/// Parse binary STL, welding vertices with identical `f32` coordinates.
pub fn read_stl(bytes: &[u8]) -> Result<SurfaceMesh, LatticeError> {
    if bytes.len() < 84 {
        return Err(LatticeError::MalformedStl(format!(
            "{} bytes is shorter than the 84-byte preamble",
            bytes.len()
        )));
    }
    let count = u32::from_le_bytes(bytes[80..84].try_into().unwrap()) as usize;
    let expected = 84 + 50 * count;
    if bytes.len() != expected {
        return Err(LatticeError::MalformedStl(format!(
            "{count} triangles need {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    let f = |off: usize| f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let mut index: HashMap<[u32; 3], u32> = HashMap::new();
    let mut mesh = SurfaceMesh::default();
    for t in 0..count {
        let rec = 84 + 50 * t;
        let mut tri = [0u32; 3];
        for (v, slot) in tri.iter_mut().enumerate() {
            let off = rec + 12 + 12 * v;
            let xyz = [f(off), f(off + 4), f(off + 8)];
            let key = xyz.map(f32::to_bits);
            *slot = *index.entry(key).or_insert_with(|| {
                mesh.vertices
                    .push(Point3::new(xyz[0] as f64, xyz[1] as f64, xyz[2] as f64));
                (mesh.vertices.len() - 1) as u32
            });
        }
        mesh.triangles.push(tri);
    }
    Ok(mesh)
}

pub fn import_stl(path: &Path) -> Result<SurfaceMesh, LatticeError> {
    read_stl(&std::fs::read(path)?)
}
