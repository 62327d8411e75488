use std::f64::consts::PI;
use std::fmt;

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::hdg::{ExactFields, ProblemData};
use crate::mesh::{generate_box_mesh, generate_lshape_mesh, BoxBounds, Mesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `(0,1)^3`.
    Cube,
    /// `(-1,1)^3` minus `(-1,0) x (-1,0) x (-1,1)`.
    LShape,
}

impl Domain {
    pub fn mesh(self, n: usize) -> Result<Mesh> {
        match self {
            Domain::Cube => generate_box_mesh(n, BoxBounds::unit_cube()),
            Domain::LShape => generate_lshape_mesh(n),
        }
    }
}

/// Exact solutions with their derived data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManufacturedCase {
    /// `u = (sin y sin z, sin z sin x, sin x sin y)`, `p = 0` on the cube.
    Smooth,
    /// `u = grad(ρ^t sin tθ)` about the reentrant edge, `p = 0`.
    LShape { t: f64 },
    /// `u = A x + b`, `p = 0` on the cube.
    Linear { a: Matrix3<f64>, b: Vec3 },
}

pub fn case_smooth() -> ManufacturedCase {
    ManufacturedCase::Smooth
}

pub fn case_lshape(t: f64) -> Result<ManufacturedCase> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("singular exponent t must be positive, got {t}")));
    }
    Ok(ManufacturedCase::LShape { t })
}

/// Polar angle in `[-π/2, π]`, the range covered by the L-shaped domain.
fn lshape_angle(x: &Vec3) -> f64 {
    let th = x.y.atan2(x.x);
    if th < -PI / 2.0 - 1e-12 {
        th + 2.0 * PI
    } else {
        th
    }
}

impl ManufacturedCase {
    pub fn domain(&self) -> Domain {
        match self {
            ManufacturedCase::LShape { .. } => Domain::LShape,
            _ => Domain::Cube,
        }
    }

    /// Whether the error table normalizes `r` and `u` errors.
    pub fn relative_errors(&self) -> bool {
        matches!(self, ManufacturedCase::Smooth)
    }

    pub fn name(&self) -> String {
        match self {
            ManufacturedCase::Smooth => "smooth".into(),
            ManufacturedCase::LShape { t } => format!("lshape(t={t})"),
            ManufacturedCase::Linear { .. } => "linear".into(),
        }
    }

    pub fn u(&self, x: &Vec3) -> Vec3 {
        match self {
            ManufacturedCase::Smooth => {
                let (sx, sy, sz) = (x.x.sin(), x.y.sin(), x.z.sin());
                Vec3::new(sy * sz, sz * sx, sx * sy)
            }
            ManufacturedCase::LShape { t } => {
                let rho = x.x.hypot(x.y);
                if rho == 0.0 {
                    // only reached by edge quadrature on the reentrant edge, where the
                    // tangential trace is parallel to the edge and its moments vanish
                    return Vec3::zeros();
                }
                let th = lshape_angle(x);
                let a = t * rho.powf(t - 1.0);
                Vec3::new(a * ((t - 1.0) * th).sin(), a * ((t - 1.0) * th).cos(), 0.0)
            }
            ManufacturedCase::Linear { a, b } => a * x + b,
        }
    }

    pub fn curl_u(&self, x: &Vec3) -> Vec3 {
        match self {
            ManufacturedCase::Smooth => {
                let (sx, sy, sz) = (x.x.sin(), x.y.sin(), x.z.sin());
                let (cx, cy, cz) = (x.x.cos(), x.y.cos(), x.z.cos());
                Vec3::new(sx * (cy - cz), sy * (cz - cx), sz * (cx - cy))
            }
            ManufacturedCase::LShape { .. } => Vec3::zeros(),
            ManufacturedCase::Linear { a, .. } => {
                Vec3::new(a[(2, 1)] - a[(1, 2)], a[(0, 2)] - a[(2, 0)], a[(1, 0)] - a[(0, 1)])
            }
        }
    }

    /// `r = curl curl u`.
    pub fn r(&self, x: &Vec3) -> Vec3 {
        match self {
            ManufacturedCase::Smooth => 2.0 * self.u(x),
            _ => Vec3::zeros(),
        }
    }

    pub fn p(&self, _: &Vec3) -> f64 {
        0.0
    }

    pub fn grad_p(&self, _: &Vec3) -> Vec3 {
        Vec3::zeros()
    }

    /// `f = curl curl r + grad p`.
    pub fn f(&self, x: &Vec3) -> Vec3 {
        match self {
            ManufacturedCase::Smooth => 4.0 * self.u(x),
            _ => Vec3::zeros(),
        }
    }

    /// `g = div u`.
    pub fn g(&self, _: &Vec3) -> f64 {
        match self {
            ManufacturedCase::Linear { a, .. } => a.trace(),
            _ => 0.0,
        }
    }

    pub fn exact_fields(&self) -> ExactFieldsOwned<'_> {
        ExactFieldsOwned(self)
    }
}

/// Borrowing adapter producing [`ExactFields`] closures for a case.
pub struct ExactFieldsOwned<'a>(&'a ManufacturedCase);

impl ExactFieldsOwned<'_> {
    pub fn with<R>(&self, f: impl FnOnce(&ExactFields) -> R) -> R {
        let c = self.0;
        let r = |x: &Vec3| c.r(x);
        let u = |x: &Vec3| c.u(x);
        let cu = |x: &Vec3| c.curl_u(x);
        let p = |x: &Vec3| c.p(x);
        f(&ExactFields { r: &r, u: &u, curl_u: &cu, p: &p })
    }
}

impl ProblemData for ManufacturedCase {
    fn f(&self, x: &Vec3) -> Vec3 {
        ManufacturedCase::f(self, x)
    }
    fn g(&self, x: &Vec3) -> f64 {
        ManufacturedCase::g(self, x)
    }
    fn g1(&self, x: &Vec3, n: &Vec3) -> Vec3 {
        n.cross(&self.u(x))
    }
    fn g2(&self, x: &Vec3, n: &Vec3) -> Vec3 {
        n.cross(&self.curl_u(x))
    }
}

impl fmt::Display for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
