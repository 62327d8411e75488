use rayon::prelude::*;

use super::cases::ManufacturedCase;
use crate::error::Result;
use crate::geometry::{tet_signed_volume, Vec3};
use crate::hdg::{Discretization, SolutionFields};
use crate::polybasis::quad_tet;

/// Levels of local refinement of the error quadrature towards the singular
/// edge `x = y = 0` of the L-shaped domain.
const SINGULAR_DEPTH: usize = 3;

/// `L2` errors as reported in the convergence tables.
///
/// For cases with [`ManufacturedCase::relative_errors`] the `r`, `u` and
/// `curl u` errors are divided by the norm of the exact field; `p` and
/// `grad p` are always absolute (the exact pressure vanishes).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorVector {
    pub r: f64,
    pub u: f64,
    pub p: f64,
    pub curl_u: f64,
    pub grad_p: f64,
}

/// Quadrature degree of the error integrals before any boost.
pub fn error_quad_degree(k: usize) -> usize {
    2 * k + 6
}

fn on_axis(x: &Vec3) -> bool {
    x.x.abs() < 1e-12 && x.y.abs() < 1e-12
}

/// Regular (red) refinement of a tetrahedron into eight children.
fn red_children(v: &[Vec3; 4]) -> [[Vec3; 4]; 8] {
    let m = |i: usize, j: usize| (v[i] + v[j]) * 0.5;
    let (m01, m02, m03, m12, m13, m23) = (m(0, 1), m(0, 2), m(0, 3), m(1, 2), m(1, 3), m(2, 3));
    [
        [v[0], m01, m02, m03],
        [m01, v[1], m12, m13],
        [m02, m12, v[2], m23],
        [m03, m13, m23, v[3]],
        [m01, m02, m03, m13],
        [m01, m02, m12, m13],
        [m02, m03, m13, m23],
        [m02, m12, m13, m23],
    ]
}

/// Sub-tetrahedra covering `verts`: the tet itself, or, when it touches the
/// singular edge, a mesh graded towards that edge.
fn quadrature_cells(verts: [Vec3; 4], singular: bool) -> Vec<[Vec3; 4]> {
    if !singular || !verts.iter().any(on_axis) {
        return vec![verts];
    }
    let mut out = Vec::new();
    let mut front = vec![verts];
    for _ in 0..SINGULAR_DEPTH {
        let mut next = Vec::new();
        for c in front {
            for child in red_children(&c) {
                if child.iter().any(on_axis) {
                    next.push(child);
                } else {
                    out.push(child);
                }
            }
        }
        front = next;
    }
    out.extend(front);
    out
}

/// `L2` errors of the discrete fields against the exact solution of `case`.
///
/// Elements touching a singular edge of the exact solution are integrated
/// on a locally graded sub-mesh.
pub fn compute_errors(
    disc: &Discretization,
    fields: &SolutionFields,
    case: &ManufacturedCase,
    quad_boost: usize,
) -> Result<ErrorVector> {
    let rule = quad_tet(error_quad_degree(disc.k()) + quad_boost)?;
    let singular = matches!(case, ManufacturedCase::LShape { .. });
    // [err r, err u, err p, err curl u, err grad p, |r|, |u|, |curl u|]
    let per_tet: Vec<[f64; 8]> = (0..disc.layout.n_tets)
        .into_par_iter()
        .map(|t| {
            let mut acc = [0.0; 8];
            for cell in quadrature_cells(disc.mesh.tet_points(t), singular) {
                let vol = tet_signed_volume(&cell[0], &cell[1], &cell[2], &cell[3]).abs();
                for (x, w) in rule.mapped(&cell, vol) {
                let v = disc.eval_tet(fields, t, &x);
                let (r, u, cu) = (case.r(&x), case.u(&x), case.curl_u(&x));
                acc[0] += w * (v.r - r).norm_squared();
                acc[1] += w * (v.u - u).norm_squared();
                acc[2] += w * (v.p - case.p(&x)).powi(2);
                acc[3] += w * (v.curl_u - cu).norm_squared();
                acc[4] += w * (v.grad_p - case.grad_p(&x)).norm_squared();
                acc[5] += w * r.norm_squared();
                acc[6] += w * u.norm_squared();
                acc[7] += w * cu.norm_squared();
                }
            }
            acc
        })
        .collect();
    let mut s = [0.0; 8];
    for a in &per_tet {
        for i in 0..8 {
            s[i] += a[i];
        }
    }
    let s = s.map(f64::sqrt);
    let rel = |e: f64, norm: f64| if case.relative_errors() && norm > 0.0 { e / norm } else { e };
    Ok(ErrorVector { r: rel(s[0], s[5]), u: rel(s[1], s[6]), p: s[2], curl_u: rel(s[3], s[7]), grad_p: s[4] })
}
