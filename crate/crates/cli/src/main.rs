use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use geomom::geometry::Convention;
use geomom::quantize::{GammaRep, PhysicsConfig, VGAnsatz, DEFAULT_SAMPLES, DEFAULT_SEED};

mod commands;
mod render;

use commands::{Output, Surface};

#[derive(Parser, Debug)]
#[command(name = "geomom", version, about = "Geometric momentum and Dirac Hamiltonians on parametric surfaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for interior sample points.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of sample points per check.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Tolerance override applied to every selected check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub mass: f64,
    /// Dirac matrices (γ1, γ2, γ0) as Pauli labels, e.g. `x,y,-z`.
    #[arg(long = "gamma-rep", global = true, default_value = "x,y,-z")]
    pub gamma_rep: GammaRep,
    /// Signs `s_M,s_omega,s_A`, or `default`.
    #[arg(long, global = true, default_value = "default")]
    pub convention: Convention,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the report to a file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

impl Global {
    fn physics(&self) -> Result<PhysicsConfig> {
        let cfg = PhysicsConfig {
            hbar: self.hbar,
            mass: self.mass,
            gamma: self.gamma_rep,
            convention: self.convention,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Built-in surface catalog.
    Surfaces {
        #[command(subcommand)]
        action: SurfacesAction,
    },
    /// Symbolic and sampled geometric fields.
    Geometry(TableArgs),
    /// Geometric and covariant momentum operators.
    Momentum(TableArgs),
    /// Dirac Hamiltonian, optionally with a geometric potential.
    Hamiltonian {
        #[command(flatten)]
        table: TableArgs,
        /// Geometric potential: a generator label or `a0,ax,ay,az`.
        #[arg(long)]
        vg: Option<VGAnsatz>,
    },
    /// Run quantization-condition checks. No selection means all four.
    Check(CheckArgs),
    /// Solve for the admissible constant geometric potentials.
    SolveVg {
        surface: String,
    },
    /// Apply an operator to a spinor read from a JSON file.
    Apply {
        surface: String,
        /// `{"psi1": "expr", "psi2": "expr"}`.
        spinor: PathBuf,
        /// One of p_x, p_y, p_z, Pi_x, Pi_y, Pi_z, H.
        #[arg(long, default_value = "H")]
        op: String,
        #[arg(long, default_value_t = 5)]
        points: usize,
    },
}

#[derive(Subcommand, Debug)]
enum SurfacesAction {
    List,
    Export { name: String },
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Catalog name or path to a surface-spec JSON file.
    surface: String,
    /// Sample points in the numeric tables.
    #[arg(long, default_value_t = 5)]
    points: usize,
}

#[derive(Args, Debug)]
struct CheckArgs {
    surface: String,
    /// fcc, tangency, ppc and dqc.
    #[arg(long)]
    all: bool,
    /// Commutators of position with momentum.
    #[arg(long)]
    fcc: bool,
    /// n·p + p·n = 0.
    #[arg(long)]
    tangency: bool,
    /// Momentum components commute.
    #[arg(long)]
    ppc: bool,
    /// Wedge condition with the Hamiltonian.
    #[arg(long)]
    dqc: bool,
    /// Geometric potential for the dqc check (default 0).
    #[arg(long)]
    vg: Option<VGAnsatz>,
    /// Also run the quadrature hermiticity check.
    #[arg(long)]
    hermiticity: bool,
}

fn run(cli: Cli) -> Result<Output> {
    let g = &cli.global;
    match cli.command {
        Command::Surfaces { action } => match action {
            SurfacesAction::List => Ok(commands::surfaces_list()),
            SurfacesAction::Export { name } => commands::surfaces_export(&name),
        },
        Command::Geometry(t) => {
            let s = Surface::load(&t.surface, &g.physics()?)?;
            commands::geometry(&s, g, t.points)
        }
        Command::Momentum(t) => {
            let s = Surface::load(&t.surface, &g.physics()?)?;
            commands::momentum(&s, g, t.points)
        }
        Command::Hamiltonian { table, vg } => {
            let s = Surface::load(&table.surface, &g.physics()?)?;
            commands::hamiltonian(&s, g, table.points, vg.as_ref())
        }
        Command::Check(c) => {
            let s = Surface::load(&c.surface, &g.physics()?)?;
            let none = !(c.fcc || c.tangency || c.ppc || c.dqc);
            let all = c.all || none;
            let sel = commands::Selection {
                fcc: all || c.fcc,
                tangency: all || c.tangency,
                ppc: all || c.ppc,
                dqc: all || c.dqc,
                hermiticity: c.hermiticity,
            };
            commands::check(&s, g, &sel, &c.vg.unwrap_or_else(VGAnsatz::zero))
        }
        Command::SolveVg { surface } => {
            let s = Surface::load(&surface, &g.physics()?)?;
            commands::solve_vg(&s, g)
        }
        Command::Apply {
            surface,
            spinor,
            op,
            points,
        } => {
            let s = Surface::load(&surface, &g.physics()?)?;
            let text = fs::read_to_string(&spinor).with_context(|| format!("reading {}", spinor.display()))?;
            commands::apply(&s, g, &op, &text, points)
        }
    }
}

fn emit(out: &Output, g: &Global) -> Result<()> {
    let mut body = if g.json {
        serde_json::to_string_pretty(&out.json)?
    } else {
        out.text.clone()
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &g.output {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let global = cli.global.clone();
    let out = match run(cli).and_then(|out| emit(&out, &global).map(|_| out)) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if out.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed: {}", out.failed.join(", "));
        ExitCode::from(1)
    }
}
