use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use lesys::sweeps::{write_json, SCHEMA_VERSION};
use lesys::{DiagnosticsReport, DomainSpec, ExponentPair, Field, Grid, SolutionPair};

/// The invoking flags, as typed and as parsed.
pub fn provenance(parsed: &impl Serialize) -> Value {
    serde_json::json!({
        "program": "lesys",
        "version": env!("CARGO_PKG_VERSION"),
        "argv": std::env::args().skip(1).collect::<Vec<_>>(),
        "flags": serde_json::to_value(parsed).unwrap_or(Value::Null),
    })
}

pub fn with_suffix(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}{suffix}"))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub schema: String,
    #[serde(default)]
    pub provenance: Value,
    pub p: f64,
    pub q: f64,
    pub domain: DomainSpec,
    pub grid: Grid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub residual_norm: f64,
    #[serde(default)]
    pub tolerance: f64,
    pub iterations: usize,
    #[serde(default = "yes")]
    pub converged: bool,
}

fn yes() -> bool {
    true
}

impl SolutionFile {
    pub fn new(s: &SolutionPair, provenance: Value) -> Self {
        SolutionFile {
            schema: SCHEMA_VERSION.into(),
            provenance,
            p: s.exponents.p(),
            q: s.exponents.q(),
            domain: s.grid().domain(),
            grid: *s.grid(),
            u: s.u.values().to_vec(),
            v: s.v.values().to_vec(),
            residual_norm: s.residual_norm,
            tolerance: s.tolerance,
            iterations: s.newton_iterations,
            converged: s.converged,
        }
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        let file: SolutionFile =
            serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        if file.schema != SCHEMA_VERSION {
            anyhow::bail!("{}: unsupported schema {}", path.display(), file.schema);
        }
        Ok(file)
    }

    pub fn write(&self, path: &Path) -> lesys::Result<()> {
        write_json(self, path)
    }

    pub fn into_pair(self) -> lesys::Result<SolutionPair> {
        if self.grid.domain() != self.domain {
            return Err(lesys::Error::GridMismatch);
        }
        Ok(SolutionPair {
            exponents: ExponentPair::new(self.p, self.q)?,
            u: Field::new(self.grid, self.u)?,
            v: Field::new(self.grid, self.v)?,
            residual_norm: self.residual_norm,
            tolerance: self.tolerance,
            newton_iterations: self.iterations,
            converged: self.converged,
        })
    }
}

#[derive(Serialize)]
pub struct ReportFile<'a> {
    pub schema: &'static str,
    pub provenance: &'a Value,
    #[serde(flatten)]
    pub report: &'a DiagnosticsReport,
}
