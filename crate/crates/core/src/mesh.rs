//! Polygon-mesh export: one rhombic dodecahedron per module.
//!
//! Geometry is kept in half units so shared faces compare exactly; the
//! text writers scale back to lattice units.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::lattice::NEIGHBOR_OFFSETS;

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    #[default]
    Off,
    Obj,
}

impl fmt::Display for MeshFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeshFormat::Off => "off",
            MeshFormat::Obj => "obj",
        })
    }
}

impl FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            other => Err(Error::Malformed(format!("unknown mesh format {other:?} (expected off or obj)"))),
        }
    }
}

/// Quad mesh with vertices in half lattice units.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Mesh {
    pub vertices: Vec<[i32; 3]>,
    /// Vertex indices, counter-clockwise seen from outside.
    pub faces: Vec<[usize; 4]>,
}

/// The 14 vertices of the unit cell around the origin, in half units:
/// six axis points then eight cube corners.
pub fn cell_vertices() -> [[i32; 3]; 14] {
    let mut out = [[0; 3]; 14];
    for axis in 0..3 {
        out[2 * axis][axis] = 2;
        out[2 * axis + 1][axis] = -2;
    }
    for (k, slot) in out[6..].iter_mut().enumerate() {
        *slot = [0, 1, 2].map(|i| if k >> i & 1 == 0 { 1 } else { -1 });
    }
    out
}

/// Faces of the unit cell, one per neighbor offset and in the same order,
/// as indices into [`cell_vertices`].
pub fn cell_faces() -> [[usize; 4]; 12] {
    let verts = cell_vertices();
    let find = |v: [i32; 3]| verts.iter().position(|&w| w == v).expect("cell vertex");
    NEIGHBOR_OFFSETS.map(|d| {
        let d = d.coords();
        let (i, j) = match (0..3).filter(|&a| d[a] != 0).collect::<Vec<_>>()[..] {
            [i, j] => (i, j),
            _ => unreachable!("neighbor offsets have two nonzero coordinates"),
        };
        let k = 3 - i - j;
        let mut a = [0; 3];
        a[i] = 2 * d[i];
        let mut b = [0; 3];
        b[j] = 2 * d[j];
        let mut up = d;
        up[k] = 1;
        let mut down = d;
        down[k] = -1;
        let mut quad = [a, up, b, down];
        // Orient so the normal points along d.
        let e1 = sub(quad[1], quad[0]);
        let e2 = sub(quad[2], quad[1]);
        let n = cross(e1, e2);
        if n[0] * d[0] + n[1] * d[1] + n[2] * d[2] < 0 {
            quad.swap(1, 3);
        }
        quad.map(find)
    })
}

fn sub(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// One cell per module, in configuration order; vertices are not shared
/// between cells.
pub fn mesh(c: &Configuration) -> Mesh {
    let verts = cell_vertices();
    let faces = cell_faces();
    let mut m = Mesh {
        vertices: Vec::with_capacity(14 * c.len()),
        faces: Vec::with_capacity(12 * c.len()),
    };
    for p in c.iter() {
        let base = m.vertices.len();
        let center = p.coords().map(|v| 2 * v);
        m.vertices.extend(verts.iter().map(|v| [0, 1, 2].map(|i| center[i] + v[i])));
        m.faces.extend(faces.iter().map(|f| f.map(|i| base + i)));
    }
    m
}

/// Center of face `f` in half units.
pub fn face_center(m: &Mesh, f: usize) -> [i32; 3] {
    let sum = m.faces[f].iter().fold([0; 3], |acc, &v| [0, 1, 2].map(|i| acc[i] + m.vertices[v][i]));
    sum.map(|s| s / 4)
}

fn coord(v: i32) -> String {
    if v % 2 == 0 {
        (v / 2).to_string()
    } else {
        format!("{}", v as f64 / 2.0)
    }
}

impl Mesh {
    pub fn to_off(&self) -> String {
        let mut s = String::new();
        writeln!(s, "OFF").unwrap();
        writeln!(s, "{} {} 0", self.vertices.len(), self.faces.len()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{} {} {}", coord(v[0]), coord(v[1]), coord(v[2])).unwrap();
        }
        for f in &self.faces {
            writeln!(s, "4 {} {} {} {}", f[0], f[1], f[2], f[3]).unwrap();
        }
        s
    }

    pub fn to_obj(&self) -> String {
        let mut s = String::new();
        for v in &self.vertices {
            writeln!(s, "v {} {} {}", coord(v[0]), coord(v[1]), coord(v[2])).unwrap();
        }
        for f in &self.faces {
            writeln!(s, "f {} {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1, f[3] + 1).unwrap();
        }
        s
    }
}

/// Mesh text for `c` in the requested format.
pub fn export_mesh(c: &Configuration, format: MeshFormat) -> String {
    let m = mesh(c);
    match format {
        MeshFormat::Off => m.to_off(),
        MeshFormat::Obj => m.to_obj(),
    }
}
