//! Legacy ASCII VTK output (unstructured grid, linear tetrahedra).
//!
//! Solution fields are discontinuous, so every tetrahedron gets its own four
//! points and the point data is the element polynomial evaluated at its
//! vertices.

use std::io::Write;

use crate::error::Result;
use crate::hdg::{Discretization, SolutionFields};
use crate::mesh::Mesh;

const VTK_TETRA: u8 = 10;

fn header<W: Write>(out: &mut W, title: &str) -> Result<()> {
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{title}")?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    Ok(())
}

fn cells<W: Write>(out: &mut W, tets: &[[usize; 4]]) -> Result<()> {
    writeln!(out, "CELLS {} {}", tets.len(), 5 * tets.len())?;
    for t in tets {
        writeln!(out, "4 {} {} {} {}", t[0], t[1], t[2], t[3])?;
    }
    writeln!(out, "CELL_TYPES {}", tets.len())?;
    for _ in tets {
        writeln!(out, "{VTK_TETRA}")?;
    }
    Ok(())
}

/// Mesh only, sharing vertices between elements.
pub fn write_mesh<W: Write>(mesh: &Mesh, mut out: W) -> Result<()> {
    header(&mut out, "quadcurl mesh")?;
    writeln!(out, "POINTS {} double", mesh.vertices.len())?;
    for v in &mesh.vertices {
        writeln!(out, "{:e} {:e} {:e}", v.x, v.y, v.z)?;
    }
    let tets: Vec<[usize; 4]> = mesh.tets.iter().map(|t| t.vertices).collect();
    cells(&mut out, &tets)?;
    Ok(())
}

/// Mesh with point data `u_h`, `r_h` (vectors) and `p_h` (scalar).
pub fn write_solution<W: Write>(disc: &Discretization, fields: &SolutionFields, mut out: W) -> Result<()> {
    let mesh = &disc.mesh;
    let nt = mesh.tets.len();
    header(&mut out, "quadcurl solution")?;
    writeln!(out, "POINTS {} double", 4 * nt)?;
    let mut values = Vec::with_capacity(4 * nt);
    for t in 0..nt {
        for x in mesh.tet_points(t) {
            writeln!(out, "{:e} {:e} {:e}", x.x, x.y, x.z)?;
            values.push(disc.eval_tet(fields, t, &x));
        }
    }
    let tets: Vec<[usize; 4]> = (0..nt).map(|t| [4 * t, 4 * t + 1, 4 * t + 2, 4 * t + 3]).collect();
    cells(&mut out, &tets)?;
    writeln!(out, "POINT_DATA {}", 4 * nt)?;
    writeln!(out, "VECTORS u_h double")?;
    for v in &values {
        writeln!(out, "{:e} {:e} {:e}", v.u.x, v.u.y, v.u.z)?;
    }
    writeln!(out, "VECTORS r_h double")?;
    for v in &values {
        writeln!(out, "{:e} {:e} {:e}", v.r.x, v.r.y, v.r.z)?;
    }
    writeln!(out, "SCALARS p_h double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in &values {
        writeln!(out, "{:e}", v.p)?;
    }
    Ok(())
}
