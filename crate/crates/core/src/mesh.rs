//! Triangle-mesh container and basic queries.

use std::collections::BTreeMap;

use nalgebra::{Point3, Vector3};

use crate::error::{Error, Result};

/// An indexed triangle mesh. Coordinates are millimeters.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point3<f64>>,
    pub faces: Vec<[u32; 3]>,
}

impl Mesh {
    pub fn new(vertices: Vec<Point3<f64>>, faces: Vec<[u32; 3]>) -> Mesh {
        Mesh { vertices, faces }
    }

    /// Checks that all face indices are in range and all coordinates finite.
    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len() as u32;
        for (fi, f) in self.faces.iter().enumerate() {
            if f.iter().any(|&i| i >= n) {
                return Err(Error::invalid(format!(
                    "face {fi} references vertex out of range (n={n})"
                )));
            }
        }
        if !self
            .vertices
            .iter()
            .all(|v| v.coords.iter().all(|c| c.is_finite()))
        {
            return Err(Error::invalid("mesh has non-finite vertex coordinates"));
        }
        Ok(())
    }

    /// Unique undirected edges, each as `(lo, hi)` vertex indices, sorted.
    pub fn unique_edges(&self) -> Vec<(u32, u32)> {
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(self.faces.len() * 3);
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                edges.push((a.min(b), a.max(b)));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        edges
    }

    /// Number of undirected edges used by an odd number of faces.
    /// Zero for a watertight surface.
    pub fn boundary_edge_count(&self) -> usize {
        let mut counts: BTreeMap<(u32, u32), usize> = BTreeMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts.values().filter(|&&c| c != 2).count()
    }

    pub fn surface_area(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let a = self.vertices[f[0] as usize];
                let b = self.vertices[f[1] as usize];
                let c = self.vertices[f[2] as usize];
                (b - a).cross(&(c - a)).norm() * 0.5
            })
            .sum::<f64>()
    }

    /// Per-vertex one-ring neighbor lists (sorted, deduplicated).
    pub fn vertex_adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (a, b) in self.unique_edges() {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn translated(&self, offset: &Vector3<f64>) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|v| v + offset).collect(),
            faces: self.faces.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Mesh {
        Mesh {
            vertices: self
                .vertices
                .iter()
                .map(|v| Point3::from(v.coords * factor))
                .collect(),
            faces: self.faces.clone(),
        }
    }

    pub fn transformed(&self, t: &crate::transform::Affine3) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(|v| t.apply(v)).collect(),
            faces: self.faces.clone(),
        }
    }

    /// Flat `[x0, y0, z0, x1, ...]` view of the vertices.
    pub fn flat_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.vertices.len() * 3);
        for v in &self.vertices {
            out.extend_from_slice(&[v.x, v.y, v.z]);
        }
        out
    }
}

/// Test and fixture geometry.
pub mod primitives {
    use super::*;

    /// Axis-aligned box from `min` to `max`, outward-oriented, 12 triangles.
    pub fn cuboid(min: Point3<f64>, max: Point3<f64>) -> Mesh {
        let (x0, y0, z0) = (min.x, min.y, min.z);
        let (x1, y1, z1) = (max.x, max.y, max.z);
        let vertices = vec![
            Point3::new(x0, y0, z0),
            Point3::new(x1, y0, z0),
            Point3::new(x1, y1, z0),
            Point3::new(x0, y1, z0),
            Point3::new(x0, y0, z1),
            Point3::new(x1, y0, z1),
            Point3::new(x1, y1, z1),
            Point3::new(x0, y1, z1),
        ];
        let faces = vec![
            // bottom (z = z0), normal -z
            [0, 2, 1],
            [0, 3, 2],
            // top (z = z1), normal +z
            [4, 5, 6],
            [4, 6, 7],
            // front (y = y0), normal -y
            [0, 1, 5],
            [0, 5, 4],
            // back (y = y1), normal +y
            [2, 3, 7],
            [2, 7, 6],
            // left (x = x0), normal -x
            [0, 4, 7],
            [0, 7, 3],
            // right (x = x1), normal +x
            [1, 2, 6],
            [1, 6, 5],
        ];
        Mesh::new(vertices, faces)
    }

    /// Unit cube `[0,1]^3`.
    pub fn unit_cube() -> Mesh {
        cuboid(Point3::origin(), Point3::new(1.0, 1.0, 1.0))
    }

    /// Sphere approximated by subdividing an icosahedron and projecting onto
    /// the sphere. `subdivisions = 4` gives 2562 vertices / 5120 faces.
    pub fn icosphere(radius: f64, subdivisions: usize) -> Mesh {
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let mut vertices: Vec<Point3<f64>> = [
            (-1.0, phi, 0.0),
            (1.0, phi, 0.0),
            (-1.0, -phi, 0.0),
            (1.0, -phi, 0.0),
            (0.0, -1.0, phi),
            (0.0, 1.0, phi),
            (0.0, -1.0, -phi),
            (0.0, 1.0, -phi),
            (phi, 0.0, -1.0),
            (phi, 0.0, 1.0),
            (-phi, 0.0, -1.0),
            (-phi, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| {
            let v = Vector3::new(x, y, z).normalize() * radius;
            Point3::from(v)
        })
        .collect();
        let mut faces: Vec<[u32; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut midpoint: BTreeMap<(u32, u32), u32> = BTreeMap::new();
            let mut next = Vec::with_capacity(faces.len() * 4);
            for f in &faces {
                let mut mids = [0u32; 3];
                for k in 0..3 {
                    let (a, b) = (f[k], f[(k + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    mids[k] = *midpoint.entry(key).or_insert_with(|| {
                        let m = (vertices[a as usize].coords + vertices[b as usize].coords) / 2.0;
                        let p = Point3::from(m.normalize() * radius);
                        vertices.push(p);
                        (vertices.len() - 1) as u32
                    });
                }
                next.push([f[0], mids[0], mids[2]]);
                next.push([f[1], mids[1], mids[0]]);
                next.push([f[2], mids[2], mids[1]]);
                next.push([mids[0], mids[1], mids[2]]);
            }
            faces = next;
        }
        Mesh::new(vertices, faces)
    }

    /// Closed cylinder along +z from `z = 0` to `z = height`, cross-section a
    /// regular `segments`-gon, capped with triangle fans.
    pub fn cylinder(radius: f64, height: f64, segments: usize) -> Mesh {
        assert!(segments >= 3);
        let mut vertices = Vec::with_capacity(2 * segments + 2);
        for ring in 0..2 {
            let z = height * ring as f64;
            for s in 0..segments {
                let a = 2.0 * std::f64::consts::PI * s as f64 / segments as f64;
                vertices.push(Point3::new(radius * a.cos(), radius * a.sin(), z));
            }
        }
        let bottom_center = vertices.len() as u32;
        vertices.push(Point3::new(0.0, 0.0, 0.0));
        let top_center = vertices.len() as u32;
        vertices.push(Point3::new(0.0, 0.0, height));
        let mut faces = Vec::new();
        let seg = segments as u32;
        for s in 0..seg {
            let sn = (s + 1) % seg;
            // side quad, outward
            faces.push([s, sn, seg + sn]);
            faces.push([s, seg + sn, seg + s]);
            // bottom fan (normal -z) and top fan (normal +z)
            faces.push([bottom_center, sn, s]);
            faces.push([top_center, seg + s, seg + sn]);
        }
        Mesh::new(vertices, faces)
    }
}

#[cfg(test)]
mod tests {
    use super::primitives::*;
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cube_is_watertight_with_correct_area() {
        let cube = unit_cube();
        cube.validate().unwrap();
        assert_eq!(cube.boundary_edge_count(), 0);
        assert_relative_eq!(cube.surface_area(), 6.0, epsilon = 1e-12);
        assert_eq!(cube.unique_edges().len(), 18);
    }

    #[test]
    fn icosphere_area_approaches_analytic() {
        let s = icosphere(10.0, 4);
        assert_eq!(s.boundary_edge_count(), 0);
        let analytic = 4.0 * std::f64::consts::PI * 100.0;
        let rel = (s.surface_area() - analytic).abs() / analytic;
        assert!(rel < 5e-3, "icosphere area off by {rel}");
    }

    #[test]
    fn cylinder_is_watertight() {
        let c = cylinder(25.0, 40.0, 64);
        c.validate().unwrap();
        assert_eq!(c.boundary_edge_count(), 0);
    }

    #[test]
    fn validate_rejects_bad_faces() {
        let m = Mesh::new(vec![Point3::origin()], vec![[0, 0, 5]]);
        assert!(m.validate().is_err());
        let nan = Mesh::new(vec![Point3::new(f64::NAN, 0.0, 0.0)], vec![]);
        assert!(nan.validate().is_err());
    }

    #[test]
    fn adjacency_is_symmetric() {
        let s = icosphere(1.0, 1);
        let adj = s.vertex_adjacency();
        for (i, list) in adj.iter().enumerate() {
            for &j in list {
                assert!(adj[j as usize].contains(&(i as u32)));
            }
        }
    }
}
