//! Structured tetrahedral meshes.
//!
//! Every cube cell is split into six tetrahedra sharing the main diagonal
//! from the cell corner `(0,0,0)` to `(1,1,1)` (Kuhn/Freudenthal pattern),
//! which yields a conforming mesh across neighbouring cells. Vertices are
//! numbered lexicographically in the `(x, y, z)` grid coordinates.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{
    circumradius, inradius, tet_signed_volume, triangle_area, triangle_enclosing_diameter, TetGeom,
    TriGeom, Vec3,
};

/// Orthonormal tangent pair of a face.
///
/// `t1` points from the lowest-indexed face vertex to the second lowest and
/// `t2 = n × t1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceFrame {
    pub t1: Vec3,
    pub t2: Vec3,
}

#[derive(Debug, Clone)]
pub struct Face {
    /// Global vertex indices, ascending.
    pub vertices: [usize; 3],
    /// Lower-indexed owner tetrahedron.
    pub owner: usize,
    /// Higher-indexed owner; `None` on the boundary.
    pub neighbor: Option<usize>,
    /// Unit normal, pointing out of `owner`.
    pub normal: Vec3,
    pub area: f64,
    /// Diameter of the smallest circle containing the face.
    pub diameter: f64,
    pub centroid: Vec3,
    pub frame: FaceFrame,
    pub edges: [usize; 3],
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.neighbor.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    /// Global vertex indices, ascending.
    pub vertices: [usize; 2],
    pub boundary: bool,
}

#[derive(Debug, Clone)]
pub struct Tet {
    /// Positively oriented vertex indices.
    pub vertices: [usize; 4],
    /// Face `i` is opposite local vertex `i`.
    pub faces: [usize; 4],
    /// `+1` when the face normal is outward for this tet, `-1` otherwise.
    pub face_signs: [f64; 4],
    pub edges: [usize; 6],
    pub volume: f64,
    /// Longest edge (`h_T`).
    pub diameter: f64,
    pub centroid: Vec3,
}

impl Tet {
    /// Outward unit normal of local face `i`.
    pub fn outward_normal(&self, mesh: &Mesh, i: usize) -> Vec3 {
        mesh.faces[self.faces[i]].normal * self.face_signs[i]
    }
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub tets: Vec<Tet>,
    pub faces: Vec<Face>,
    pub edges: Vec<Edge>,
}

/// Axis-aligned box `[min, max]`.
#[derive(Debug, Clone, Copy)]
pub struct BoxBounds {
    pub min: Vec3,
    pub max: Vec3,
}

impl BoxBounds {
    pub fn unit_cube() -> Self {
        Self { min: Vec3::zeros(), max: Vec3::new(1.0, 1.0, 1.0) }
    }
}

impl Default for BoxBounds {
    fn default() -> Self {
        Self::unit_cube()
    }
}

const KUHN_PERMUTATIONS: [[usize; 3]; 6] =
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Six tetrahedra of a unit cell, as integer corner offsets.
fn kuhn_cell(origin: [usize; 3]) -> [[[usize; 3]; 4]; 6] {
    let mut out = [[[0usize; 3]; 4]; 6];
    for (t, perm) in KUHN_PERMUTATIONS.iter().enumerate() {
        let mut corner = origin;
        out[t][0] = corner;
        for (step, &axis) in perm.iter().enumerate() {
            corner[axis] += 1;
            out[t][step + 1] = corner;
        }
    }
    out
}

pub fn generate_box_mesh(n: usize, bounds: BoxBounds) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidParameter("box mesh needs n >= 1".into()));
    }
    let extent = bounds.max - bounds.min;
    if extent.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "box bounds must have positive finite extent, got {:?}",
            extent.as_slice()
        )));
    }
    let cells: Vec<[usize; 3]> = grid_cells(n).collect();
    let step = extent / n as f64;
    build_structured(n, &cells, |g| {
        Vec3::new(
            bounds.min.x + g[0] as f64 * step.x,
            bounds.min.y + g[1] as f64 * step.y,
            bounds.min.z + g[2] as f64 * step.z,
        )
    })
}

/// Mesh of `(-1,1)^3` minus the notch `(-1,0) × (-1,0) × (-1,1)`.
///
/// `n` counts cells across the full width 2, so the reentrant edge
/// `x = y = 0` is a mesh line whenever `n` is even.
pub fn generate_lshape_mesh(n: usize) -> Result<Mesh> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "L-shape mesh needs an even n >= 2, got {n}"
        )));
    }
    let half = n / 2;
    let cells: Vec<[usize; 3]> = grid_cells(n).filter(|c| !(c[0] < half && c[1] < half)).collect();
    let step = 2.0 / n as f64;
    build_structured(n, &cells, |g| {
        Vec3::new(
            -1.0 + g[0] as f64 * step,
            -1.0 + g[1] as f64 * step,
            -1.0 + g[2] as f64 * step,
        )
    })
}

fn grid_cells(n: usize) -> impl Iterator<Item = [usize; 3]> {
    (0..n).flat_map(move |i| (0..n).flat_map(move |j| (0..n).map(move |k| [i, j, k])))
}

fn build_structured(n: usize, cells: &[[usize; 3]], coord: impl Fn([usize; 3]) -> Vec3) -> Result<Mesh> {
    let np = n + 1;
    let lex = |g: [usize; 3]| (g[0] * np + g[1]) * np + g[2];
    let mut used = vec![false; np * np * np];
    let mut raw_tets = Vec::with_capacity(cells.len() * 6);
    for &c in cells {
        for tet in kuhn_cell(c) {
            for g in tet {
                used[lex(g)] = true;
            }
            raw_tets.push(tet.map(lex));
        }
    }
    // compact while preserving lexicographic order
    let mut index = vec![usize::MAX; used.len()];
    let mut vertices = Vec::new();
    for i in 0..np {
        for j in 0..np {
            for k in 0..np {
                let g = [i, j, k];
                if used[lex(g)] {
                    index[lex(g)] = vertices.len();
                    vertices.push(coord(g));
                }
            }
        }
    }
    let tets = raw_tets.into_iter().map(|t| t.map(|v| index[v])).collect();
    Mesh::from_tets(vertices, tets)
}

const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

impl Mesh {
    /// Builds faces, edges and geometric data from a tetrahedral connectivity.
    /// Negatively oriented tets are flipped; degenerate ones are rejected.
    pub fn from_tets(vertices: Vec<Vec3>, raw_tets: Vec<[usize; 4]>) -> Result<Self> {
        let mut tets = Vec::with_capacity(raw_tets.len());
        for (t, mut tv) in raw_tets.into_iter().enumerate() {
            if tv.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidParameter(format!("tet {t} references a missing vertex")));
            }
            let p = tv.map(|v| vertices[v]);
            let mut vol = tet_signed_volume(&p[0], &p[1], &p[2], &p[3]);
            if vol < 0.0 {
                tv.swap(2, 3);
                vol = -vol;
            }
            if !(vol > 0.0) {
                return Err(Error::InvalidParameter(format!("tet {t} is degenerate")));
            }
            let p = tv.map(|v| vertices[v]);
            let diameter = TET_EDGES
                .iter()
                .map(|e| (p[e[0]] - p[e[1]]).norm())
                .fold(0.0, f64::max);
            tets.push(Tet {
                vertices: tv,
                faces: [0; 4],
                face_signs: [1.0; 4],
                edges: [0; 6],
                volume: vol,
                diameter,
                centroid: (p[0] + p[1] + p[2] + p[3]) / 4.0,
            });
        }

        // Faces: sort all (key, tet, local) triples so numbering is reproducible.
        let mut incidences: Vec<([usize; 3], usize, usize)> = Vec::with_capacity(tets.len() * 4);
        for (t, tet) in tets.iter().enumerate() {
            for local in 0..4 {
                let mut key = [0usize; 3];
                let mut m = 0;
                for (j, &v) in tet.vertices.iter().enumerate() {
                    if j != local {
                        key[m] = v;
                        m += 1;
                    }
                }
                key.sort_unstable();
                incidences.push((key, t, local));
            }
        }
        incidences.sort_unstable();

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut edge_of = |a: usize, b: usize, edges: &mut Vec<Edge>| -> usize {
            let key = if a < b { [a, b] } else { [b, a] };
            *edge_index.entry(key).or_insert_with(|| {
                edges.push(Edge { vertices: key, boundary: false });
                edges.len() - 1
            })
        };

        let mut faces: Vec<Face> = Vec::new();
        let mut i = 0;
        while i < incidences.len() {
            let (key, owner, owner_local) = incidences[i];
            let mut neighbor = None;
            let mut j = i + 1;
            while j < incidences.len() && incidences[j].0 == key {
                if neighbor.is_some() {
                    return Err(Error::InvalidParameter(format!(
                        "face {key:?} is shared by more than two tets"
                    )));
                }
                neighbor = Some((incidences[j].1, incidences[j].2));
                j += 1;
            }
            let f = faces.len();
            let [a, b, c] = key.map(|v| vertices[v]);
            let mut normal = (b - a).cross(&(c - a)).normalize();
            // outward for the owner: away from the opposite vertex
            let opposite = vertices[tets[owner].vertices[owner_local]];
            if normal.dot(&(a - opposite)) < 0.0 {
                normal = -normal;
            }
            let t1 = (b - a).normalize();
            let t2 = normal.cross(&t1);
            let fedges = [
                edge_of(key[0], key[1], &mut edges),
                edge_of(key[0], key[2], &mut edges),
                edge_of(key[1], key[2], &mut edges),
            ];
            faces.push(Face {
                vertices: key,
                owner,
                neighbor: neighbor.map(|n| n.0),
                normal,
                area: triangle_area(&a, &b, &c),
                diameter: triangle_enclosing_diameter(&a, &b, &c),
                centroid: (a + b + c) / 3.0,
                frame: FaceFrame { t1, t2 },
                edges: fedges,
            });
            tets[owner].faces[owner_local] = f;
            tets[owner].face_signs[owner_local] = 1.0;
            if let Some((nb, nb_local)) = neighbor {
                tets[nb].faces[nb_local] = f;
                tets[nb].face_signs[nb_local] = -1.0;
            } else {
                for &e in &fedges {
                    edges[e].boundary = true;
                }
            }
            i = j;
        }

        for tet in tets.iter_mut() {
            let v = tet.vertices;
            for (slot, e) in TET_EDGES.iter().enumerate() {
                tet.edges[slot] = edge_of(v[e[0]], v[e[1]], &mut edges);
            }
        }

        Ok(Mesh { vertices, tets, faces, edges })
    }

    pub fn tet_points(&self, t: usize) -> [Vec3; 4] {
        self.tets[t].vertices.map(|v| self.vertices[v])
    }

    pub fn face_points(&self, f: usize) -> [Vec3; 3] {
        self.faces[f].vertices.map(|v| self.vertices[v])
    }

    pub fn edge_points(&self, e: usize) -> [Vec3; 2] {
        self.edges[e].vertices.map(|v| self.vertices[v])
    }

    pub fn tet_geom(&self, t: usize) -> TetGeom {
        TetGeom { verts: self.tet_points(t), volume: self.tets[t].volume }
    }

    pub fn face_geom(&self, f: usize) -> TriGeom {
        let face = &self.faces[f];
        TriGeom {
            verts: self.face_points(f),
            area: face.area,
            normal: face.normal,
            t1: face.frame.t1,
            t2: face.frame.t2,
        }
    }

    pub fn boundary_face_count(&self) -> usize {
        self.faces.iter().filter(|f| f.is_boundary()).count()
    }

    /// Mesh size `h = max h_T`.
    pub fn h(&self) -> f64 {
        self.tets.iter().map(|t| t.diameter).fold(0.0, f64::max)
    }

    pub fn volume(&self) -> f64 {
        self.tets.iter().map(|t| t.volume).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshReport {
    pub vertices: usize,
    pub tets: usize,
    pub faces: usize,
    pub boundary_faces: usize,
    pub edges: usize,
    pub h: f64,
    pub volume: f64,
    /// Smallest inradius/circumradius ratio.
    pub min_quality: f64,
    pub max_quality: f64,
}

pub fn mesh_report(mesh: &Mesh) -> MeshReport {
    let (min_quality, max_quality) = (0..mesh.tets.len())
        .map(|t| {
            let p = mesh.tet_points(t);
            inradius(&p) / circumradius(&p)
        })
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), q| (lo.min(q), hi.max(q)));
    MeshReport {
        vertices: mesh.vertices.len(),
        tets: mesh.tets.len(),
        faces: mesh.faces.len(),
        boundary_faces: mesh.boundary_face_count(),
        edges: mesh.edges.len(),
        h: mesh.h(),
        volume: mesh.volume(),
        min_quality,
        max_quality,
    }
}

impl fmt::Display for MeshReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vertices        {}", self.vertices)?;
        writeln!(f, "tets            {}", self.tets)?;
        writeln!(f, "faces           {}", self.faces)?;
        writeln!(f, "boundary faces  {}", self.boundary_faces)?;
        writeln!(f, "edges           {}", self.edges)?;
        writeln!(f, "h               {:.6}", self.h)?;
        writeln!(f, "volume          {:.6}", self.volume)?;
        write!(f, "quality (r/R)   {:.6} .. {:.6}", self.min_quality, self.max_quality)
    }
}
