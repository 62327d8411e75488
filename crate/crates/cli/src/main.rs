use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use quadcurl_core::study::{to_markdown, write_csv, Domain, SolveOutcome};
use quadcurl_core::{
    case_lshape, case_smooth, mesh_report, run_study, solve_case, vtk, DofLayout, ManufacturedCase,
    PreconditionerKind, SolveOptions,
};

#[derive(Parser)]
#[command(name = "quadcurl", version, about = "HDG solver for the 3D mixed quad-curl problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Cube,
    Lshape,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Smooth,
    Lshape,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecondArg {
    /// Sparse symmetric-indefinite factorization.
    Lblt,
    /// Block incomplete LU over face blocks.
    Ilu,
    /// Block Jacobi over face blocks.
    Jacobi,
}

impl From<PrecondArg> for PreconditionerKind {
    fn from(p: PrecondArg) -> Self {
        match p {
            PrecondArg::Lblt => PreconditionerKind::SparseLblt,
            PrecondArg::Ilu => PreconditionerKind::BlockIlu0,
            PrecondArg::Jacobi => PreconditionerKind::BlockJacobi,
        }
    }
}

#[derive(clap::Args)]
struct CaseArgs {
    #[arg(long, value_enum)]
    case: CaseArg,
    /// Singular exponent of the L-shape solution.
    #[arg(long, default_value_t = 0.9, allow_negative_numbers = true)]
    t: f64,
    /// Polynomial degree.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// GMRES relative residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = PrecondArg::Lblt)]
    precond: PrecondArg,
}

impl CaseArgs {
    fn case(&self) -> quadcurl_core::Result<ManufacturedCase> {
        match self.case {
            CaseArg::Smooth => Ok(case_smooth()),
            CaseArg::Lshape => case_lshape(self.t),
        }
    }

    fn options(&self) -> SolveOptions {
        let mut opts = SolveOptions { k: self.k, precond: self.precond.into(), ..SolveOptions::default() };
        opts.gmres.tol = self.tol;
        opts
    }
}

#[derive(Subcommand)]
enum Command {
    /// Mesh statistics and face DOF counts.
    MeshInfo {
        #[arg(long, value_enum)]
        domain: DomainArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Write the mesh as legacy VTK.
        #[arg(long)]
        vtk: Option<PathBuf>,
    },
    /// Solve one level and report errors.
    Solve {
        #[command(flatten)]
        args: CaseArgs,
        #[arg(long)]
        n: usize,
        /// Write u_h, r_h and p_h as legacy VTK.
        #[arg(long)]
        vtk: Option<PathBuf>,
    },
    /// Convergence study over several levels.
    Study {
        #[command(flatten)]
        args: CaseArgs,
        /// Comma-separated levels, ascending.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        levels: Vec<usize>,
        /// CSV output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print a markdown table.
        #[arg(long)]
        markdown: bool,
    },
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn mesh_info(domain: DomainArg, n: usize, k: usize, vtk_path: Option<PathBuf>) -> Result<()> {
    let domain = match domain {
        DomainArg::Cube => Domain::Cube,
        DomainArg::Lshape => Domain::LShape,
    };
    let mesh = domain.mesh(n)?;
    let layout = DofLayout::new(&mesh, k)?;
    let mut out = io::stdout().lock();
    writeln!(out, "{}", mesh_report(&mesh))?;
    writeln!(out, "k               {k}")?;
    writeln!(out, "face dofs       {}", layout.total_face_dofs())?;
    writeln!(out, "free face dofs  {}", layout.free_face_dofs())?;
    if let Some(p) = vtk_path {
        let mut w = create(&p)?;
        vtk::write_mesh(&mesh, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn print_outcome(out: &SolveOutcome) -> io::Result<()> {
    let e = &out.errors;
    let mut w = io::stdout().lock();
    writeln!(w, "dof             {}", out.dof)?;
    writeln!(w, "free dof        {}", out.free_dof)?;
    writeln!(w, "gmres its       {}", out.report.iterations)?;
    writeln!(w, "residual        {:.3e}", out.report.relative_residual)?;
    writeln!(w, "err r           {:.6e}", e.r)?;
    writeln!(w, "err u           {:.6e}", e.u)?;
    writeln!(w, "err p           {:.6e}", e.p)?;
    writeln!(w, "err curl u      {:.6e}", e.curl_u)?;
    writeln!(w, "err grad p      {:.6e}", e.grad_p)?;
    writeln!(w, "seconds         {:.3}", out.seconds)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::MeshInfo { domain, n, k, vtk } => mesh_info(domain, n, k, vtk),
        Command::Solve { args, n, vtk: vtk_path } => {
            let case = args.case()?;
            let mut writer = vtk_path.as_ref().map(create).transpose()?;
            let out = solve_case(&case, n, &args.options())?;
            print_outcome(&out)?;
            if let Some(w) = writer.as_mut() {
                vtk::write_solution(&out.disc, &out.fields, &mut *w)?;
                w.flush()?;
            }
            Ok(())
        }
        Command::Study { args, levels, out, markdown } => {
            let case = args.case()?;
            let writer = out.as_ref().map(create).transpose()?;
            let rows = run_study(&case, &levels, &args.options())?;
            match writer {
                Some(w) => write_csv(&rows, w)?,
                None => write_csv(&rows, io::stdout().lock())?,
            }
            if markdown {
                print!("{}", to_markdown(&rows, case.relative_errors()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let kind = err.downcast_ref::<quadcurl_core::Error>().map_or("io", |e| e.kind());
            let message = format!("{err:#}").replace('\n', " ");
            eprintln!("error kind={kind} message={message:?}");
            ExitCode::FAILURE
        }
    }
}
