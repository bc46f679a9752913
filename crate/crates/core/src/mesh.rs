//! Triangulated Möbius strip carrying a scalar field on the dyad orbifold.
//!
//! The strip parameters are sampled on an `m x (m + 1)` lattice:
//! `alpha = pi * a / m` for `a in 0..m` and `r = -1/2 + j / m` for
//! `j in 0..=m`. The column `alpha = pi` is not stored; quads that reach it
//! use the glued vertices `(0, -r)` instead, so the seam is welded by shared
//! indices. Pulled back through `phi`, every vertex lands on a node of the
//! `2m x 2m` unit grid, which lets a sampled field be read off without
//! interpolation.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::export::format_number;
use crate::field::GridField;
use crate::geometry::{moebius_embed, EmbeddedPoint3D, StripCoords};

#[derive(Debug, Clone, PartialEq)]
pub struct MoebiusMesh {
    pub resolution: usize,
    pub vertices: Vec<EmbeddedPoint3D>,
    /// Strip parameters of each vertex.
    pub strip: Vec<StripCoords>,
    /// Preimage of each vertex as node indices `(ix, iy)` on the `2m` grid,
    /// with `0 <= iy <= ix < 2m`.
    pub preimage_nodes: Vec<(usize, usize)>,
    pub scalars: Vec<f64>,
    pub faces: Vec<[usize; 3]>,
}

/// Number of vertices of a mesh at resolution `m`.
pub fn vertex_count(m: usize) -> usize {
    m * (m + 1)
}

/// Number of triangles of a mesh at resolution `m`.
pub fn face_count(m: usize) -> usize {
    2 * m * m
}

/// Node of the `2m` grid that `phi` sends to strip vertex `(a, j)`.
fn preimage_node(a: usize, j: usize, m: usize) -> (usize, usize) {
    if j <= a {
        (a + j, a - j)
    } else {
        (a + 2 * m - j, a + j)
    }
}

impl MoebiusMesh {
    /// Builds the mesh with `scalar(ix, iy)` evaluated at each vertex
    /// preimage, given as node indices on the `2m x 2m` unit grid.
    pub fn with_node_scalar(m: usize, scalar: impl Fn(usize, usize) -> f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter(
                "mesh resolution must be at least 1".into(),
            ));
        }
        let index = |a: usize, j: usize| a * (m + 1) + j;
        let mut vertices = Vec::with_capacity(vertex_count(m));
        let mut strip = Vec::with_capacity(vertex_count(m));
        let mut preimage_nodes = Vec::with_capacity(vertex_count(m));
        let mut scalars = Vec::with_capacity(vertex_count(m));
        for a in 0..m {
            for j in 0..=m {
                let s = StripCoords::new(PI * a as f64 / m as f64, j as f64 / m as f64 - 0.5)?;
                let node = preimage_node(a, j, m);
                vertices.push(moebius_embed(s));
                strip.push(s);
                preimage_nodes.push(node);
                scalars.push(scalar(node.0, node.1));
            }
        }
        let mut faces = Vec::with_capacity(face_count(m));
        for a in 0..m {
            for j in 0..m {
                let (v00, v01) = (index(a, j), index(a, j + 1));
                // (pi, r) is glued to (0, -r).
                let (v10, v11) = if a + 1 == m {
                    (index(0, m - j), index(0, m - j - 1))
                } else {
                    (index(a + 1, j), index(a + 1, j + 1))
                };
                faces.push([v00, v10, v11]);
                faces.push([v00, v11, v01]);
            }
        }
        Ok(Self {
            resolution: m,
            vertices,
            strip,
            preimage_nodes,
            scalars,
            faces,
        })
    }

    /// Builds the mesh with `f(x, y)` evaluated at each vertex preimage in
    /// the unit domain `T_1`.
    pub fn with_unit_function(m: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let h = 1.0 / (2 * m) as f64;
        Self::with_node_scalar(m, |ix, iy| f(ix as f64 * h, iy as f64 * h))
    }

    /// Preimage of vertex `v` in `T_1`.
    pub fn preimage(&self, v: usize) -> (f64, f64) {
        let h = 1.0 / (2 * self.resolution) as f64;
        let (ix, iy) = self.preimage_nodes[v];
        (ix as f64 * h, iy as f64 * h)
    }

    /// Writes the mesh as ASCII PLY with a per-vertex `value` property.
    pub fn write_ply<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "ply")?;
        writeln!(w, "format ascii 1.0")?;
        writeln!(w, "comment Moebius strip model of the dyad orbifold")?;
        writeln!(w, "element vertex {}", self.vertices.len())?;
        for p in ["x", "y", "z", "value"] {
            writeln!(w, "property double {p}")?;
        }
        writeln!(w, "element face {}", self.faces.len())?;
        writeln!(w, "property list uchar int vertex_indices")?;
        writeln!(w, "end_header")?;
        for (v, s) in self.vertices.iter().zip(&self.scalars) {
            writeln!(
                w,
                "{} {} {} {}",
                format_number(v.0[0]),
                format_number(v.0[1]),
                format_number(v.0[2]),
                format_number(*s)
            )?;
        }
        for f in &self.faces {
            writeln!(w, "3 {} {} {}", f[0], f[1], f[2])?;
        }
        Ok(())
    }
}

/// Meshes a sampled orbifold field at resolution `m`; the field grid must
/// be a multiple of `2m` so that every vertex preimage is a grid node.
pub fn export_mesh(field: &GridField, m: usize) -> Result<MoebiusMesh> {
    if m == 0 || field.n() % (2 * m) != 0 {
        return Err(Error::InvalidParameter(format!(
            "mesh resolution {m} needs a grid that is a multiple of {}, got {}",
            2 * m,
            field.n()
        )));
    }
    let stride = field.n() / (2 * m);
    MoebiusMesh::with_node_scalar(m, |ix, iy| field.get(ix * stride, iy * stride))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{moebius_embed_raw, phi, phi_inverse};

    #[test]
    fn counts_follow_resolution() {
        for m in [1, 2, 5, 12] {
            let mesh = MoebiusMesh::with_node_scalar(m, |_, _| 1.0).unwrap();
            assert_eq!(mesh.vertices.len(), vertex_count(m));
            assert_eq!(mesh.faces.len(), face_count(m));
            assert!(mesh.faces.iter().flatten().all(|&v| v < vertex_count(m)));
        }
        assert!(MoebiusMesh::with_node_scalar(0, |_, _| 1.0).is_err());
    }

    #[test]
    fn preimages_lie_in_the_domain_and_map_back() {
        let m = 9;
        let mesh = MoebiusMesh::with_node_scalar(m, |_, _| 0.0).unwrap();
        for v in 0..mesh.vertices.len() {
            let (ix, iy) = mesh.preimage_nodes[v];
            assert!(iy <= ix && ix < 2 * m, "{ix} {iy}");
            let (x, y) = mesh.preimage(v);
            let s = phi(x, y).unwrap();
            let p = moebius_embed(s);
            assert!(p.distance(&mesh.vertices[v]) < 1e-12);
            let back = phi_inverse(mesh.strip[v]);
            // The branch line has two preimages glued in the orbifold.
            let same = (back.0 - x).abs() < 1e-12 && (back.1 - y).abs() < 1e-12;
            let glued = (back.0 - 1.0).abs() < 1e-12 && (back.1 - x).abs() < 1e-12 && y == 0.0;
            assert!(same || glued, "{v}: {back:?} vs ({x}, {y})");
        }
    }

    #[test]
    fn preimage_nodes_are_distinct() {
        let m = 8;
        let mesh = MoebiusMesh::with_node_scalar(m, |_, _| 0.0).unwrap();
        let mut seen = std::collections::HashSet::new();
        for node in &mesh.preimage_nodes {
            assert!(seen.insert(*node));
        }
    }

    #[test]
    fn seam_is_welded() {
        let m = 16;
        let mesh = MoebiusMesh::with_node_scalar(m, |ix, iy| (ix * 100 + iy) as f64).unwrap();
        for j in 0..=m {
            let r = j as f64 / m as f64 - 0.5;
            let far = moebius_embed_raw(PI, r);
            let glued = mesh.vertices[m - j];
            assert!(far.distance(&glued) < 1e-12);
        }
    }

    #[test]
    fn constant_field_gives_uniform_scalars() {
        let f = GridField::from_fn(12.0, 24, |_, _| 0.75).unwrap();
        let mesh = export_mesh(&f, 6).unwrap();
        assert!(mesh.scalars.iter().all(|&s| s == 0.75));
        assert!(export_mesh(&f, 5).is_err());
        assert!(export_mesh(&f, 0).is_err());
    }

    #[test]
    fn ply_header_and_body() {
        let mesh = MoebiusMesh::with_node_scalar(2, |_, _| 0.5).unwrap();
        let mut buf = Vec::new();
        mesh.write_ply(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "ply");
        assert!(text.contains("element vertex 6\n"));
        assert!(text.contains("element face 8\n"));
        let body = lines.iter().position(|l| *l == "end_header").unwrap() + 1;
        assert_eq!(lines.len() - body, 6 + 8);
        assert_eq!(lines[body], "0.5 0 0 0.5");
    }
}
