//! Small geometric helpers shared by the mesh and basis code.

use nalgebra::{Matrix3, Vector3};

pub type Vec3 = Vector3<f64>;

pub fn tet_signed_volume(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    (b - a).dot(&(c - a).cross(&(d - a))) / 6.0
}

pub fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Diameter of the smallest circle containing the triangle.
///
/// For right and obtuse triangles this is the longest edge, otherwise the
/// circumcircle diameter.
pub fn triangle_enclosing_diameter(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let mut sq = [(b - c).norm_squared(), (c - a).norm_squared(), (a - b).norm_squared()];
    sq.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let longest = sq[2].sqrt();
    if sq[2] >= (sq[0] + sq[1]) * (1.0 - 1e-12) {
        longest
    } else {
        let area = triangle_area(a, b, c);
        (sq[0] * sq[1] * sq[2]).sqrt() / (2.0 * area)
    }
}

pub fn circumradius(v: &[Vec3; 4]) -> f64 {
    let a = v[0];
    let m = Matrix3::from_rows(&[
        (v[1] - a).transpose(),
        (v[2] - a).transpose(),
        (v[3] - a).transpose(),
    ]);
    let rhs = Vec3::new(
        0.5 * (v[1] - a).norm_squared(),
        0.5 * (v[2] - a).norm_squared(),
        0.5 * (v[3] - a).norm_squared(),
    );
    match m.lu().solve(&rhs) {
        Some(center) => center.norm(),
        None => f64::INFINITY,
    }
}

pub fn inradius(v: &[Vec3; 4]) -> f64 {
    let vol = tet_signed_volume(&v[0], &v[1], &v[2], &v[3]).abs();
    let surface = triangle_area(&v[1], &v[2], &v[3])
        + triangle_area(&v[0], &v[2], &v[3])
        + triangle_area(&v[0], &v[1], &v[3])
        + triangle_area(&v[0], &v[1], &v[2]);
    3.0 * vol / surface
}

/// Tetrahedron vertices and volume.
#[derive(Debug, Clone, Copy)]
pub struct TetGeom {
    pub verts: [Vec3; 4],
    pub volume: f64,
}

impl TetGeom {
    /// Orders the vertices positively.
    pub fn new(mut verts: [Vec3; 4]) -> Self {
        let mut volume = tet_signed_volume(&verts[0], &verts[1], &verts[2], &verts[3]);
        if volume < 0.0 {
            verts.swap(2, 3);
            volume = -volume;
        }
        Self { verts, volume }
    }

    pub fn reference() -> Self {
        Self::new([Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()])
    }

    pub fn diameter(&self) -> f64 {
        let mut h: f64 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                h = h.max((self.verts[i] - self.verts[j]).norm());
            }
        }
        h
    }

    /// Vertices of the face opposite local vertex `i`.
    pub fn face(&self, i: usize) -> [Vec3; 3] {
        let mut out = [Vec3::zeros(); 3];
        let mut m = 0;
        for (j, v) in self.verts.iter().enumerate() {
            if j != i {
                out[m] = *v;
                m += 1;
            }
        }
        out
    }

    pub fn centroid(&self) -> Vec3 {
        (self.verts[0] + self.verts[1] + self.verts[2] + self.verts[3]) / 4.0
    }
}

/// Triangle with unit normal and tangent frame `t2 = n × t1`.
#[derive(Debug, Clone, Copy)]
pub struct TriGeom {
    pub verts: [Vec3; 3],
    pub area: f64,
    pub normal: Vec3,
    pub t1: Vec3,
    pub t2: Vec3,
}

impl TriGeom {
    /// Normal `(v1 - v0) × (v2 - v0)`, `t1` along `v1 - v0`.
    pub fn new(verts: [Vec3; 3]) -> Self {
        let normal = (verts[1] - verts[0]).cross(&(verts[2] - verts[0])).normalize();
        Self::with_normal(verts, normal)
    }

    pub fn with_normal(verts: [Vec3; 3], normal: Vec3) -> Self {
        let t1 = (verts[1] - verts[0]).normalize();
        let t2 = normal.cross(&t1);
        Self { verts, area: triangle_area(&verts[0], &verts[1], &verts[2]), normal, t1, t2 }
    }

    /// The three edges `(v0,v1)`, `(v0,v2)`, `(v1,v2)`.
    pub fn edges(&self) -> [[Vec3; 2]; 3] {
        let v = self.verts;
        [[v[0], v[1]], [v[0], v[2]], [v[1], v[2]]]
    }
}
