use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{SweepRow, SweepTable};

pub const SCHEMA_VERSION: &str = "1";

pub const CSV_COLUMNS: [&str; 13] = [
    "p",
    "q",
    "M",
    "N",
    "energy",
    "p_energy",
    "L1_u",
    "L1_v",
    "L1_uq",
    "L1_uq1",
    "pohozaev_rel",
    "energy_id_rel",
    "converged",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

/// Non-finite values travel as `null`.
pub(crate) mod nullable {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// Writes every float with 17 significant digits.
struct FixedDigits;

impl serde_json::ser::Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        write!(w, "{:.16e}", value as f64)
    }
}

fn number(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON with the fixed float format; object keys keep declaration order.
pub fn to_json_string<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = to_json_string(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    std::fs::write(path, text + "\n").map_err(io_err(path))
}

#[derive(Serialize)]
struct JsonOut<'a> {
    schema_version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    provenance: Option<&'a serde_json::Value>,
    rows: &'a [SweepRow],
}

#[derive(Deserialize)]
struct JsonIn {
    schema_version: String,
    rows: Vec<SweepRow>,
}

/// Writes `table`. CSV holds exactly [`CSV_COLUMNS`]; JSON holds every row
/// field plus the schema version and optional provenance.
pub fn export(
    table: &SweepTable,
    format: ExportFormat,
    path: &Path,
    provenance: Option<&serde_json::Value>,
) -> Result<()> {
    match format {
        ExportFormat::Json => write_json(
            &JsonOut {
                schema_version: SCHEMA_VERSION,
                provenance,
                rows: &table.rows,
            },
            path,
        ),
        ExportFormat::Csv => {
            let csv_err = |source| Error::Csv {
                path: path.to_path_buf(),
                source,
            };
            let file = File::create(path).map_err(io_err(path))?;
            let mut w = csv::Writer::from_writer(BufWriter::new(file));
            w.write_record(CSV_COLUMNS).map_err(csv_err)?;
            for r in &table.rows {
                let nums = [
                    r.p,
                    r.q,
                    r.m,
                    r.n,
                    r.energy,
                    r.p_energy,
                    r.l1_u,
                    r.l1_v,
                    r.l1_uq,
                    r.l1_uq1,
                    r.pohozaev_rel,
                    r.energy_id_rel,
                ];
                let mut rec: Vec<String> = nums.iter().map(|&x| number(x)).collect();
                rec.push(r.converged.to_string());
                w.write_record(&rec).map_err(csv_err)?;
            }
            w.flush().map_err(io_err(path))
        }
    }
}

/// Reads a table written by [`export`] in JSON form.
pub fn import_json(path: &Path) -> Result<SweepTable> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let parsed: JsonIn = serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    if parsed.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidInput(format!(
            "{}: unsupported schema version {}",
            path.display(),
            parsed.schema_version
        )));
    }
    Ok(SweepTable { rows: parsed.rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweeps::RowSource;

    fn row(q: f64) -> SweepRow {
        SweepRow {
            p: 1.0,
            q,
            m: 1.0 + 1.0 / q,
            n: q.ln() * 0.1 + 1.0 / 3.0,
            energy: 2.0f64.sqrt() * q,
            p_energy: 2.0f64.sqrt() * q,
            l1_u: std::f64::consts::PI / 7.0,
            l1_v: 1e-300,
            l1_uq: 5e300,
            l1_uq1: f64::NAN,
            pohozaev_rel: 1.234e-9,
            energy_id_rel: 0.1 + 0.2,
            converged: q < 100.0,
            residual_norm: 3e-11,
            iterations: 7,
            source: if q < 100.0 {
                RowSource::Newton
            } else {
                RowSource::Shooting
            },
            failure: (q >= 100.0).then(|| "no convergence".to_string()),
        }
    }

    fn same(a: &SweepTable, b: &SweepTable) -> bool {
        a.rows.len() == b.rows.len()
            && a.rows.iter().zip(&b.rows).all(|(x, y)| {
                let fx = serde_json::to_value(x).unwrap();
                let fy = serde_json::to_value(y).unwrap();
                fx == fy
                    && x.m.to_bits() == y.m.to_bits()
                    && x.energy_id_rel.to_bits() == y.energy_id_rel.to_bits()
            })
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let t = SweepTable {
            rows: vec![row(16.0), row(128.0)],
        };
        export(&t, ExportFormat::Json, &path, None).unwrap();
        let back = import_json(&path).unwrap();
        assert!(same(&t, &back));
        assert!(back.rows[0].l1_uq1.is_nan());
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"schema_version\":\"1\""));
        assert!(text.contains("\"L1_uq1\":null"));
    }

    #[test]
    fn empty_table_gives_header_only_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        export(&SweepTable::default(), ExportFormat::Csv, &path, None).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, format!("{}\n", CSV_COLUMNS.join(",")));
    }

    #[test]
    fn csv_has_one_line_per_row_with_17_digits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let t = SweepTable {
            rows: (0..12).map(|k| row(2f64.powi(k))).collect(),
        };
        export(&t, ExportFormat::Csv, &path, None).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 13);
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 13);
        assert_eq!(first[2], "2.0000000000000000e0");
        let digits = first[3].split('e').next().unwrap().replace('.', "");
        assert_eq!(digits.len(), 17);
        assert_eq!(
            first[3].parse::<f64>().unwrap().to_bits(),
            t.rows[0].n.to_bits()
        );
    }

    #[test]
    fn unwritable_path_reports_it() {
        let err = export(
            &SweepTable::default(),
            ExportFormat::Csv,
            Path::new("/nonexistent-dir/x.csv"),
            None,
        )
        .unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }
}
