//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::process::ExitCode;

use nalgebra::{DVector, Matrix3};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRunner};
use quadcurl_core::geometry::TetGeom;
use quadcurl_core::hdg::{assemble_local, sample_exact, solve_full_dense};
use quadcurl_core::polybasis::{quad_tet, ScalarBasis, VectorBasis};
use quadcurl_core::projection::{commuting_check, hcurl_project, hdiv_project, l2_project_element_vector};
use quadcurl_core::study::Domain;
use quadcurl_core::{
    case_lshape, case_smooth, condense, dense_solve, infsup_estimate, recover_interior, run_study, sigma_norm,
    Discretization, DofLayout, ManufacturedCase, SolveOptions, StudyRow, Vec3,
};

/// Printed reference values per level 2, 4, 8 and rates 2→4, 4→8.
struct Reference {
    r: [f64; 3],
    u: [f64; 3],
    p: [f64; 3],
    rate_r: [f64; 2],
    rate_u: [f64; 2],
    rate_p: [f64; 2],
}

const SMOOTH_K1: Reference = Reference {
    r: [3.57e-1, 1.92e-1, 1.02e-1],
    u: [1.34e-1, 3.42e-2, 8.67e-3],
    p: [1.05e-2, 1.64e-3, 2.13e-4],
    rate_r: [0.93, 0.91],
    rate_u: [1.97, 1.98],
    rate_p: [2.69, 2.94],
};

const SMOOTH_K2: Reference = Reference {
    r: [3.85e-2, 1.26e-2, 4.90e-3],
    u: [2.73e-2, 2.11e-3, 1.56e-4],
    p: [1.60e-3, 6.41e-5, 3.40e-6],
    rate_r: [1.61, 1.37],
    rate_u: [3.69, 3.75],
    rate_p: [4.64, 4.24],
};

const LEVELS: [usize; 3] = [2, 4, 8];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

fn study(case: ManufacturedCase, k: usize) -> Result<Vec<StudyRow>, String> {
    run_study(&case, &LEVELS, &SolveOptions { k, ..SolveOptions::default() }).map_err(|e| e.to_string())
}

fn within_factor(got: f64, want: f64, factor: f64) -> bool {
    got <= want * factor && got >= want / factor
}

/// Appends failing comparisons to `bad`.
fn compare_errors(rows: &[StudyRow], reference: &Reference, bad: &mut Vec<String>) {
    for (i, row) in rows.iter().enumerate() {
        for (name, got, want) in
            [("r", row.err_r, reference.r[i]), ("u", row.err_u, reference.u[i]), ("p", row.err_p, reference.p[i])]
        {
            if !within_factor(got, want, 2.0) {
                bad.push(format!("{name}(n={}) {got:.3e} vs {want:.3e}", row.n));
            }
        }
    }
}

fn rates(rows: &[StudyRow], pick: fn(&StudyRow) -> Option<f64>) -> Vec<f64> {
    rows.iter().filter_map(pick).collect()
}

fn fmt_rates(v: &[f64]) -> String {
    v.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join("/")
}

fn dof_counts() -> Outcome {
    let cases = [
        (Domain::Cube, 1, 2, 1320),
        (Domain::Cube, 1, 4, 9504),
        (Domain::Cube, 1, 8, 71808),
        (Domain::Cube, 1, 16, 557568),
        (Domain::LShape, 1, 2, 1034),
        (Domain::LShape, 1, 4, 7304),
        (Domain::LShape, 1, 8, 54560),
        (Domain::Cube, 2, 2, 2880),
        (Domain::Cube, 2, 4, 20736),
        (Domain::Cube, 2, 8, 156672),
    ];
    let mut bad = Vec::new();
    for (domain, k, n, want) in cases {
        let got = domain.mesh(n).and_then(|m| DofLayout::new(&m, k)).map(|l| l.total_face_dofs());
        match got {
            Ok(g) if g == want => {}
            Ok(g) => bad.push(format!("{domain:?} k={k} n={n}: {g} vs {want}")),
            Err(e) => bad.push(format!("{domain:?} k={k} n={n}: {e}")),
        }
    }
    let detail = if bad.is_empty() { format!("{} levels exact", cases.len()) } else { bad.join("; ") };
    Outcome::new(bad.is_empty(), detail)
}

fn smooth_k1() -> Outcome {
    let rows = match study(case_smooth(), 1) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, e),
    };
    let reference = &SMOOTH_K1;
    let mut bad = Vec::new();
    let picks: [(&str, fn(&StudyRow) -> Option<f64>, [f64; 2]); 3] = [
        ("r", |r| r.rate_r, reference.rate_r),
        ("u", |r| r.rate_u, reference.rate_u),
        ("p", |r| r.rate_p, reference.rate_p),
    ];
    let mut summary = Vec::new();
    for (name, pick, want) in picks {
        let got = rates(&rows, pick);
        summary.push(format!("rate {name} {}", fmt_rates(&got)));
        for (g, w) in got.iter().zip(want) {
            if (g - w).abs() > 0.25 {
                bad.push(format!("rate {name} {g:.2} vs {w:.2}"));
            }
        }
    }
    compare_errors(&rows, reference, &mut bad);
    let detail = if bad.is_empty() { summary.join(", ") } else { format!("{}; off: {}", summary.join(", "), bad.join(", ")) };
    Outcome::new(bad.is_empty(), detail)
}

fn smooth_k2() -> Outcome {
    let rows = match study(case_smooth(), 2) {
        Ok(r) => r,
        Err(e) => return Outcome::new(false, e),
    };
    let mut bad = Vec::new();
    let ru = rates(&rows, |r| r.rate_u);
    for g in &ru {
        if *g < 3.4 {
            bad.push(format!("rate u {g:.2} < 3.4"));
        }
    }
    compare_errors(&rows, &SMOOTH_K2, &mut bad);
    let summary = format!("rate u {}", fmt_rates(&ru));
    let detail = if bad.is_empty() { summary } else { format!("{summary}; off: {}", bad.join(", ")) };
    Outcome::new(bad.is_empty(), detail)
}

fn singular() -> Outcome {
    let mut bad = Vec::new();
    let mut summary = Vec::new();
    for (t, want) in [(0.9, [0.81, 0.83]), (1.4, [1.23, 1.29])] {
        let rows = match case_lshape(t).map_err(|e| e.to_string()).and_then(|c| study(c, 1)) {
            Ok(r) => r,
            Err(e) => return Outcome::new(false, e),
        };
        let got = rates(&rows, |r| r.rate_u);
        summary.push(format!("t={t} rate u {}", fmt_rates(&got)));
        for (g, w) in got.iter().zip(want) {
            if (g - w).abs() > 0.25 {
                bad.push(format!("t={t} rate u {g:.2} vs {w:.2}"));
            }
        }
    }
    let detail = if bad.is_empty() { summary.join(", ") } else { format!("{}; off: {}", summary.join(", "), bad.join(", ")) };
    Outcome::new(bad.is_empty(), detail)
}

fn cube(n: usize, k: usize) -> Discretization {
    Discretization::new(Domain::Cube.mesh(n).unwrap(), k).unwrap()
}

/// Smooth field and its curl with random frequencies and amplitudes.
fn random_field(a: [f64; 9]) -> (impl Fn(&Vec3) -> Vec3, impl Fn(&Vec3) -> Vec3) {
    let v = move |x: &Vec3| {
        Vec3::new(
            a[0] * (a[3] * x.y + a[6] * x.z).sin(),
            a[1] * (a[4] * x.z + a[7] * x.x).cos(),
            a[2] * (a[5] * x.x + a[8] * x.y).exp(),
        )
    };
    let curl = move |x: &Vec3| {
        let (s0, s1, s2) = (a[3] * x.y + a[6] * x.z, a[4] * x.z + a[7] * x.x, a[5] * x.x + a[8] * x.y);
        let (d0y, d0z) = (a[0] * a[3] * s0.cos(), a[0] * a[6] * s0.cos());
        let (d1z, d1x) = (-a[1] * a[4] * s1.sin(), -a[1] * a[7] * s1.sin());
        let (d2x, d2y) = (a[2] * a[5] * s2.exp(), a[2] * a[8] * s2.exp());
        Vec3::new(d2y - d1z, d0z - d2x, d1x - d0y)
    };
    (v, curl)
}

fn tilted_tet() -> TetGeom {
    TetGeom::new([
        Vec3::new(0.1, 0.0, 0.05),
        Vec3::new(0.9, 0.2, 0.0),
        Vec3::new(0.2, 0.8, 0.1),
        Vec3::new(0.15, 0.25, 0.7),
    ])
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn properties() -> Outcome {
    let mut bad = Vec::new();
    let mut worst = [0.0f64; 6];

    // symmetry of local and condensed matrices
    let smooth = case_smooth();
    for k in 1..=2 {
        let disc = cube(2, k);
        for t in 0..disc.mesh.tets.len() {
            let a = assemble_local(&disc, t, &smooth).unwrap().asymmetry();
            worst[0] = worst[0].max(a);
        }
        let sys = condense(&disc, &smooth).unwrap();
        let max = sys.matrix.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        worst[0] = worst[0].max(sys.matrix.asymmetry() / max);
    }
    if worst[0] >= 1e-11 {
        bad.push(format!("asymmetry {:.1e}", worst[0]));
    }

    // linear patch test
    let lin = ManufacturedCase::Linear {
        a: Matrix3::new(0.3, -1.0, 0.5, 2.0, 0.1, -0.7, 0.4, 1.2, -0.2),
        b: Vec3::new(0.5, -0.25, 1.0),
    };
    for (n, k) in [(1, 1), (2, 1), (1, 2)] {
        let disc = cube(n, k);
        let sys = condense(&disc, &lin).unwrap();
        let x = dense_solve(&sys.matrix.to_dense(), &DVector::from_vec(sys.rhs.clone())).unwrap();
        let uh = recover_interior(&disc, &sys, x.as_slice()).unwrap();
        let exact = lin.exact_fields().with(|e| sample_exact(&disc, e)).unwrap();
        let e = sigma_norm(&disc, &uh.sub(&exact)).unwrap();
        worst[1] = worst[1].max(e.r).max(e.u).max(e.p);
    }
    if worst[1] >= 1e-9 {
        bad.push(format!("patch {:.1e}", worst[1]));
    }

    // condensed vs full dense solve
    let disc = cube(1, 1);
    let full = solve_full_dense(&disc, &smooth).unwrap();
    let sys = condense(&disc, &smooth).unwrap();
    let x = dense_solve(&sys.matrix.to_dense(), &DVector::from_vec(sys.rhs.clone())).unwrap();
    let cond = recover_interior(&disc, &sys, x.as_slice()).unwrap();
    let diff: f64 = full.interior.iter().chain(&full.faces).zip(cond.interior.iter().chain(&cond.faces)).map(|(a, b)| (a - b).powi(2)).sum();
    let norm: f64 = full.interior.iter().chain(&full.faces).map(|a| a * a).sum();
    worst[2] = (diff / norm).sqrt();
    if worst[2] >= 1e-9 {
        bad.push(format!("condensed vs full {:.1e}", worst[2]));
    }

    // commuting diagram and idempotence on random inputs
    let tet = tilted_tet();
    let mut runner = TestRunner::new(Config::default());
    let strategy = (proptest::array::uniform9(-1.5f64..1.5), 1usize..=3, proptest::collection::vec(-1.0f64..1.0, 60));
    let fields: Vec<_> = (0..32).map(|_| strategy.new_tree(&mut runner).unwrap().current()).collect();
    for (a, j, c) in &fields {
        let (v, curl) = random_field(*a);
        worst[3] = worst[3].max(commuting_check(&v, &curl, &tet, *j).unwrap());

        let basis = VectorBasis::cartesian(ScalarBasis::on_tet(&tet.verts, tet.volume, *j).unwrap());
        let coeffs = &c[..basis.len()];
        let f = |x: &Vec3| basis.combine(coeffs, x);
        let once = hcurl_project(&f, &tet, *j).unwrap();
        let twice = hcurl_project(&|x| once.value(x), &tet, *j).unwrap();
        let l2 = l2_project_element_vector(&f, &tet, *j).unwrap();
        let d = hdiv_project(&f, &tet, *j + 1).unwrap();
        let dd = hdiv_project(&|x| d.value(x), &tet, *j + 1).unwrap();
        let scale = d.coeffs.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        let gaps = once.coeffs.coeffs.iter().zip(&twice.coeffs.coeffs).map(|(a, b)| (a - b).abs())
            .chain(l2.coeffs.iter().zip(coeffs).map(|(a, b)| (a - b).abs()))
            .chain(d.coeffs.coeffs.iter().zip(&dd.coeffs.coeffs).map(|(a, b)| (a - b).abs() / scale));
        worst[4] = gaps.fold(worst[4], f64::max);
    }
    if worst[3] >= 1e-10 {
        bad.push(format!("commuting {:.1e}", worst[3]));
    }
    if worst[4] >= 1e-12 {
        bad.push(format!("idempotence {:.1e}", worst[4]));
    }

    // quadrature exactness on the reference tet
    let reference = TetGeom::reference();
    for deg in 0..=16u32 {
        let q = quad_tet(deg as usize).unwrap();
        for a in 0..=deg {
            for b in 0..=(deg - a) {
                let c = deg - a - b;
                let val: f64 = q
                    .mapped(&reference.verts, reference.volume)
                    .map(|(x, w)| w * x.x.powi(a as i32) * x.y.powi(b as i32) * x.z.powi(c as i32))
                    .sum();
                let exact = factorial(a) * factorial(b) * factorial(c) / factorial(deg + 3);
                worst[5] = worst[5].max(((val - exact) / exact).abs());
            }
        }
    }
    if worst[5] >= 1e-13 {
        bad.push(format!("quadrature {:.1e}", worst[5]));
    }

    let detail = format!(
        "asym {:.1e}, patch {:.1e}, cond/full {:.1e}, commuting {:.1e}, idempotence {:.1e}, quadrature {:.1e}",
        worst[0], worst[1], worst[2], worst[3], worst[4], worst[5]
    );
    Outcome::new(bad.is_empty(), detail)
}

fn infsup() -> Outcome {
    let b1 = infsup_estimate(&cube(1, 1));
    let b2 = infsup_estimate(&cube(2, 1));
    match (b1, b2) {
        (Ok(a), Ok(b)) => {
            let ratio = b.beta / a.beta;
            let pass = a.beta > 0.0 && b.beta > 0.0 && ratio >= 0.5;
            Outcome::new(pass, format!("beta n=1 {:.3e}, n=2 {:.3e}, ratio {ratio:.3}", a.beta, b.beta))
        }
        (Err(e), _) | (_, Err(e)) => Outcome::new(false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("1 DOF counts", dof_counts),
        ("2 smooth k=1 convergence", smooth_k1),
        ("3 smooth k=2 convergence", smooth_k2),
        ("4 singular u-rates", singular),
        ("5 property suite", properties),
        ("6 inf-sup diagnostic", infsup),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let out = check();
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{name}] {}", out.detail);
        failed += usize::from(!out.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
