use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lesys::{DomainSpec, Grid};

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "lesys",
    version,
    about = "Positive solutions of the planar Lane-Emden system"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Solve once and write `<out>.solution.json` and `<out>.report.json`.
    Solve(SolveArgs),
    /// Run an exponent sweep and write `<out>.csv` and `<out>.json`.
    Sweep(SweepArgs),
    /// Run diagnostic checks on a stored or freshly computed solution.
    Verify(VerifyArgs),
    /// First Dirichlet eigenpair of the domain.
    Eigen(EigenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Disk,
    Rect,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DomainArgs {
    #[arg(long, value_enum, default_value = "disk")]
    pub domain: Shape,
    /// Disk radius.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Rectangle side along x.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Rectangle side along y.
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Radial intervals on a disk, interior nodes along x on a rectangle.
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
}

impl DomainArgs {
    pub fn domain(&self) -> lesys::Result<DomainSpec> {
        match self.domain {
            Shape::Disk => DomainSpec::disk(self.radius),
            Shape::Rect => DomainSpec::rectangle(self.a, self.b),
        }
    }

    pub fn grid(&self) -> lesys::Result<Grid> {
        Grid::for_domain(self.domain()?, self.grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Finite-difference Newton, with continuation from (2,2) on failure.
    Newton,
    /// ODE shooting sampled on the grid (disk only).
    Shooting,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Relative residual target.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value = "newton")]
    pub method: Method,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiagnosticArgs {
    /// Brezis–Merle parameter in (0, 4π).
    #[arg(long, default_value_t = 2.0 * std::f64::consts::PI)]
    pub delta: f64,
    /// Floor for the mass-concentration check (default: ∫u^q of the solution).
    #[arg(long)]
    pub c_floor: Option<f64>,
}

impl DiagnosticArgs {
    pub fn options(&self) -> lesys::DiagnosticsOptions {
        lesys::DiagnosticsOptions {
            delta: self.delta,
            c_floor: self.c_floor,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub diagnostics: DiagnosticArgs,
    /// Output path prefix.
    #[arg(long)]
    pub out: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    FixedP,
    Diagonal,
    Ray,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Fixed p for `fixed-p`.
    #[arg(long)]
    pub p: Option<f64>,
    /// Ratio p/q for `ray`.
    #[arg(long = "K", alias = "k")]
    pub k: Option<f64>,
    /// Comma-separated q values.
    #[arg(long, value_delimiter = ',', conflicts_with = "q_dyadic")]
    pub q_list: Option<Vec<f64>>,
    /// `kmin:kmax`, expanding to {2^k} inclusive.
    #[arg(long)]
    pub q_dyadic: Option<String>,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Solve every row from the eigenfunction start (allows --jobs > 1).
    #[arg(long)]
    pub cold: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Skip the per-row diagnostics battery.
    #[arg(long)]
    pub no_diagnostics: bool,
    #[command(flatten)]
    pub diagnostics: DiagnosticArgs,
    /// Output path prefix.
    #[arg(long)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Stored solution; otherwise --p and --q solve afresh.
    #[arg(long = "in", conflicts_with_all = ["p", "q"])]
    pub input: Option<String>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value = "newton")]
    pub method: Method,
    /// `all` or a comma-separated list of check names.
    #[arg(long, default_value = "all")]
    pub checks: String,
    #[command(flatten)]
    pub diagnostics: DiagnosticArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EigenArgs {
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Also write the eigenpair as JSON.
    #[arg(long)]
    pub out: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_grid_follows_aspect_ratio() {
        let cli = Cli::try_parse_from([
            "lesys", "eigen", "--domain", "rect", "--a", "1", "--b", "2", "--grid", "63",
        ])
        .unwrap();
        let Command::Eigen(args) = cli.command else {
            panic!("expected eigen");
        };
        let g = args.domain.grid().unwrap();
        let pg = g.as_planar().unwrap();
        assert_eq!((pg.nx(), pg.ny()), (63, 127));
    }

    #[test]
    fn q_list_and_dyadic_conflict() {
        let argv = [
            "lesys",
            "sweep",
            "--mode",
            "diagonal",
            "--q-list",
            "2,4",
            "--q-dyadic",
            "1:2",
            "--out",
            "x",
        ];
        assert!(Cli::try_parse_from(argv).is_err());
    }
}
