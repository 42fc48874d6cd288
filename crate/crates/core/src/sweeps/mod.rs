//! Exponent sweeps with warm-start continuation, fits and table export.

mod export;
mod fit;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use export::{
    export, import_json, to_json_string, write_json, ExportFormat, CSV_COLUMNS, SCHEMA_VERSION,
};
pub use fit::{fit_logarithmic, LogFit};

use crate::diagnostics::{
    energy_identity, evaluate, evaluate_profile, pohozaev_residual, DiagnosticsOptions,
    DiagnosticsReport,
};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::exponents::ExponentPair;
use crate::grid::Grid;
use crate::newton::{Damping, Init};
use crate::planar::{solve_planar, PlanarSolveConfig};
use crate::power::pow_value;
use crate::quadrature::{gradient_dot, integrate_map};
use crate::radial::{
    continue_path, profile_integrals, solve_shooting_on, solve_with_continuation, RadialSolveConfig,
};
use crate::solution::{Eigenpair, SolutionPair};
use crate::spectral::first_dirichlet_eigenpair;

/// How `p` is tied to `q` along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepMode {
    FixedP {
        p: f64,
    },
    /// `p = q`.
    Diagonal,
    /// `p = k·q`.
    Ray {
        k: f64,
    },
}

impl SweepMode {
    pub fn exponents(&self, q: f64) -> Result<ExponentPair> {
        match *self {
            SweepMode::FixedP { p } => ExponentPair::new(p, q),
            SweepMode::Diagonal => ExponentPair::new(q, q),
            SweepMode::Ray { k } => ExponentPair::new(k * q, q),
        }
    }
}

/// `{2^k : kmin ≤ k ≤ kmax}`.
pub fn dyadic(kmin: i32, kmax: i32) -> Vec<f64> {
    (kmin..=kmax).map(|k| 2f64.powi(k)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub mode: SweepMode,
    pub q_list: Vec<f64>,
    pub domain: DomainSpec,
    /// See [`Grid::for_domain`].
    pub resolution: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: Damping,
    /// Full diagnostics per converged row when set.
    pub diagnostics: Option<DiagnosticsOptions>,
    /// Sequential warm starts; otherwise rows are independent cold solves.
    pub warm_start: bool,
    /// Worker threads for cold sweeps.
    pub jobs: usize,
}

impl SweepPlan {
    pub fn new(mode: SweepMode, q_list: Vec<f64>, domain: DomainSpec, resolution: usize) -> Self {
        SweepPlan {
            mode,
            q_list,
            domain,
            resolution,
            tol: 1e-10,
            max_iter: 200,
            damping: Damping::default(),
            diagnostics: Some(DiagnosticsOptions::default()),
            warm_start: true,
            jobs: 1,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::for_domain(self.domain, self.resolution)
    }

    pub fn validate(&self) -> Result<Vec<ExponentPair>> {
        if self
            .q_list
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(Error::InvalidConfig(
                "q-list must be strictly increasing".into(),
            ));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidConfig("jobs must be at least 1".into()));
        }
        if self.warm_start && self.jobs > 1 {
            return Err(Error::InvalidConfig(
                "warm-start sweeps are sequential; use jobs = 1 or cold starts".into(),
            ));
        }
        self.radial_config(Init::EigenfunctionScaled).validate()?;
        self.grid()?;
        self.q_list
            .iter()
            .map(|&q| self.mode.exponents(q))
            .collect()
    }

    fn shooting_tol(&self) -> f64 {
        self.tol.min(1e-6)
    }

    fn radial_config(&self, init: Init) -> RadialSolveConfig {
        RadialSolveConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            damping: self.damping,
            init,
        }
    }

    fn planar_config(&self, init: Init) -> PlanarSolveConfig {
        PlanarSolveConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            damping: self.damping,
            init,
            ..Default::default()
        }
    }

    fn solve_cold(&self, e: ExponentPair, grid: &Grid) -> Result<SolutionPair> {
        match *grid {
            Grid::Radial(g) => {
                solve_with_continuation(e, g, &self.radial_config(Init::EigenfunctionScaled))
            }
            Grid::Planar(g) => solve_planar(e, g, &self.planar_config(Init::EigenfunctionScaled)),
        }
    }

    fn solve_warm(
        &self,
        e: ExponentPair,
        grid: &Grid,
        prev: &SolutionPair,
    ) -> Result<SolutionPair> {
        let warm = match *grid {
            Grid::Radial(g) => continue_path(
                prev.clone(),
                e,
                g,
                &self.radial_config(Init::EigenfunctionScaled),
            ),
            Grid::Planar(g) => solve_planar(
                e,
                g,
                &self.planar_config(Init::WarmStart(Box::new(prev.clone()))),
            ),
        };
        match warm {
            Err(err) if recoverable(&err) => self.solve_cold(e, grid),
            other => other,
        }
    }

    /// Finite-difference solve with the shooting fallback on disks.
    fn solve_row(
        &self,
        e: ExponentPair,
        grid: &Grid,
        prev: Option<&SolutionPair>,
    ) -> (SweepRow, Option<SolutionPair>) {
        let solved = match prev {
            Some(p) => self.solve_warm(e, grid, p),
            None => self.solve_cold(e, grid),
        };
        let err = match solved {
            Ok(s) => return (SweepRow::from_solution(&s), Some(s)),
            Err(err) => err,
        };
        if let (Grid::Radial(g), true) = (grid, recoverable(&err)) {
            let tol = self.shooting_tol();
            let shot = solve_shooting_on(e, *g, tol)
                .and_then(|s| Ok((SweepRow::from_shooting(&s, tol)?, s)));
            if let Ok((row, s)) = shot {
                return (row, Some(s));
            }
        }
        (SweepRow::from_error(e, &err), None)
    }
}

fn recoverable(err: &Error) -> bool {
    matches!(
        err,
        Error::NonConvergence { .. }
            | Error::PositivityLoss { .. }
            | Error::ContinuationStalled { .. }
    )
}

/// Which solver produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowSource {
    #[default]
    Newton,
    /// Disk rows whose finite-difference solve failed; integrals come from
    /// quadrature along the trajectory.
    Shooting,
}

/// One table row. Failed rows carry the best iterate's values when one exists
/// (NaN otherwise) and the failure message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(with = "export::nullable")]
    pub p: f64,
    #[serde(with = "export::nullable")]
    pub q: f64,
    #[serde(rename = "M", with = "export::nullable")]
    pub m: f64,
    #[serde(rename = "N", with = "export::nullable")]
    pub n: f64,
    #[serde(with = "export::nullable")]
    pub energy: f64,
    #[serde(with = "export::nullable")]
    pub p_energy: f64,
    #[serde(rename = "L1_u", with = "export::nullable")]
    pub l1_u: f64,
    #[serde(rename = "L1_v", with = "export::nullable")]
    pub l1_v: f64,
    #[serde(rename = "L1_uq", with = "export::nullable")]
    pub l1_uq: f64,
    #[serde(rename = "L1_uq1", with = "export::nullable")]
    pub l1_uq1: f64,
    #[serde(with = "export::nullable")]
    pub pohozaev_rel: f64,
    #[serde(with = "export::nullable")]
    pub energy_id_rel: f64,
    pub converged: bool,
    #[serde(with = "export::nullable")]
    pub residual_norm: f64,
    pub iterations: usize,
    #[serde(default)]
    pub source: RowSource,
    pub failure: Option<String>,
}

impl SweepRow {
    fn blank(e: ExponentPair, failure: String) -> Self {
        SweepRow {
            p: e.p(),
            q: e.q(),
            m: f64::NAN,
            n: f64::NAN,
            energy: f64::NAN,
            p_energy: f64::NAN,
            l1_u: f64::NAN,
            l1_v: f64::NAN,
            l1_uq: f64::NAN,
            l1_uq1: f64::NAN,
            pohozaev_rel: f64::NAN,
            energy_id_rel: f64::NAN,
            converged: false,
            residual_norm: f64::NAN,
            iterations: 0,
            source: RowSource::Newton,
            failure: Some(failure),
        }
    }

    /// Row summary of a (possibly unconverged) solution.
    pub fn from_solution(s: &SolutionPair) -> Self {
        let (p, q) = (s.exponents.p(), s.exponents.q());
        let energy = gradient_dot(&s.u, &s.v).unwrap_or(f64::NAN);
        SweepRow {
            p,
            q,
            m: s.max_u(),
            n: s.max_v(),
            energy,
            p_energy: p * energy,
            l1_u: integrate_map(&s.u, |x| x),
            l1_v: integrate_map(&s.v, |x| x),
            l1_uq: integrate_map(&s.u, |x| pow_value(x, q)),
            l1_uq1: integrate_map(&s.u, |x| pow_value(x, q + 1.0)),
            pohozaev_rel: pohozaev_residual(s).unwrap_or(f64::NAN),
            energy_id_rel: energy_identity(s)
                .map(|(a, b)| a.max(b))
                .unwrap_or(f64::NAN),
            converged: s.converged,
            residual_norm: s.residual_norm,
            iterations: s.newton_iterations,
            source: RowSource::Newton,
            failure: None,
        }
    }

    fn from_shooting(s: &SolutionPair, tol: f64) -> Result<Self> {
        let e = s.exponents;
        let radius = s.grid().domain().diameter() / 2.0;
        let ints = profile_integrals(e, radius, s.max_u(), s.max_v(), tol)?;
        let (a, b) = ints.energy_identity();
        Ok(SweepRow {
            energy: ints.energy,
            p_energy: e.p() * ints.energy,
            l1_u: ints.l1_u,
            l1_v: ints.l1_v,
            l1_uq: ints.l1_uq,
            l1_uq1: ints.l1_uq1,
            pohozaev_rel: ints.pohozaev_residual(&e, radius),
            energy_id_rel: a.max(b),
            source: RowSource::Shooting,
            ..Self::from_solution(s)
        })
    }

    fn from_error(e: ExponentPair, err: &Error) -> Self {
        match err.best_iterate() {
            Some(best) => SweepRow {
                failure: Some(err.to_string()),
                ..Self::from_solution(best)
            },
            None => Self::blank(e, err.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn converged(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.converged)
    }

    /// Fraction of rows that converged.
    pub fn convergence_rate(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.converged().count() as f64 / self.rows.len() as f64
    }
}

/// Table plus the per-row solutions and diagnostics.
#[derive(Debug, Clone)]
pub struct SweepRun {
    pub table: SweepTable,
    pub solutions: Vec<Option<SolutionPair>>,
    pub reports: Vec<Option<DiagnosticsReport>>,
    /// Shared by every row's diagnostics.
    pub eigenpair: Option<Eigenpair>,
}

pub fn run_sweep(plan: &SweepPlan) -> Result<SweepTable> {
    Ok(run_sweep_detailed(plan)?.table)
}

pub fn run_sweep_detailed(plan: &SweepPlan) -> Result<SweepRun> {
    let pairs = plan.validate()?;
    let grid = plan.grid()?;
    let eigenpair = match plan.diagnostics {
        Some(_) => Some(first_dirichlet_eigenpair(plan.domain, &grid)?),
        None => None,
    };
    let solved: Vec<(SweepRow, Option<SolutionPair>)> = if plan.warm_start {
        // shooting rows are not discrete solutions, so they never seed Newton
        let mut prev: Option<SolutionPair> = None;
        let mut out = Vec::with_capacity(pairs.len());
        for &e in &pairs {
            let (row, s) = plan.solve_row(e, &grid, prev.as_ref());
            if let (Some(s), RowSource::Newton) = (&s, row.source) {
                prev = Some(s.clone());
            }
            out.push((row, s));
        }
        out
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(plan.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
        pool.install(|| {
            pairs
                .par_iter()
                .map(|&e| plan.solve_row(e, &grid, None))
                .collect()
        })
    };
    let (rows, solutions): (Vec<_>, Vec<_>) = solved.into_iter().unzip();
    let reports = match (&plan.diagnostics, &eigenpair) {
        (Some(opts), Some(ep)) => rows
            .par_iter()
            .zip(&solutions)
            .map(|(row, s)| {
                let s = s.as_ref()?;
                match row.source {
                    RowSource::Newton => evaluate(s, ep, opts).ok(),
                    RowSource::Shooting => evaluate_profile(s, ep, opts, plan.shooting_tol()).ok(),
                }
            })
            .collect(),
        _ => vec![None; solutions.len()],
    };
    Ok(SweepRun {
        table: SweepTable { rows },
        solutions,
        reports,
        eigenpair,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(warm: bool, jobs: usize) -> SweepPlan {
        SweepPlan {
            warm_start: warm,
            jobs,
            diagnostics: None,
            ..SweepPlan::new(
                SweepMode::FixedP { p: 1.0 },
                dyadic(2, 5),
                DomainSpec::unit_disk(),
                128,
            )
        }
    }

    #[test]
    fn warm_and_cold_rows_agree() {
        let warm = run_sweep(&plan(true, 1)).unwrap();
        let cold = run_sweep(&plan(false, 2)).unwrap();
        assert_eq!(warm.rows.len(), 4);
        for (a, b) in warm.rows.iter().zip(&cold.rows) {
            assert!(a.converged && b.converged);
            assert!((a.m / b.m - 1.0).abs() < 1e-8, "{} vs {}", a.m, b.m);
        }
    }

    #[test]
    fn cold_rows_do_not_depend_on_worker_count() {
        assert_eq!(
            run_sweep(&plan(false, 1)).unwrap(),
            run_sweep(&plan(false, 3)).unwrap()
        );
    }

    #[test]
    fn invalid_plans_are_rejected() {
        let mut p = plan(true, 1);
        p.q_list = vec![4.0, 4.0];
        assert!(run_sweep(&p).is_err());
        let p = plan(true, 2);
        assert!(run_sweep(&p).is_err());
        let mut p = plan(true, 1);
        p.mode = SweepMode::FixedP { p: 0.5 };
        assert!(matches!(run_sweep(&p), Err(Error::InvalidExponents { .. })));
    }

    #[test]
    fn unresolved_disk_rows_fall_back_to_shooting() {
        let p = SweepPlan::new(
            SweepMode::Diagonal,
            vec![4.0, 64.0],
            DomainSpec::unit_disk(),
            128,
        );
        let run = run_sweep_detailed(&p).unwrap();
        let rows = &run.table.rows;
        assert_eq!(rows[0].source, RowSource::Newton);
        assert_eq!(rows[1].source, RowSource::Shooting);
        assert!(rows[1].converged && rows[1].energy_id_rel < 1e-8);
        let report = run.reports[1].as_ref().unwrap();
        assert!(!report.resolved);
        assert!(report.passes(), "{:?}", report.checks());
    }

    #[test]
    fn rectangle_grid_keeps_spacing_close() {
        let mut p = plan(true, 1);
        p.domain = DomainSpec::rectangle(1.0, 2.0).unwrap();
        p.resolution = 31;
        let g = p.grid().unwrap();
        let g = g.as_planar().unwrap();
        assert_eq!(g.ny(), 63);
    }
}
