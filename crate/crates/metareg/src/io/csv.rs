//! CSV ingestion (study data, designs, tabulated priors) and effect-size
//! export. Comma-separated, `.` decimal, UTF-8, header row required.

use std::path::Path;

use crate::effect_sizes::{self, EffectEstimate, TwoByTwoTable};
use crate::error::{Error, Result};
use crate::model_spec::{DesignMatrix, StudyDataset};

/// How raw columns are turned into estimate/standard-error pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Log odds ratio from 2x2 counts:
    /// `events.trt, total.trt, events.ctl, total.ctl`.
    Or,
    /// Log odds of an event proportion: `events, n` or `percent, n`.
    Plo,
    /// Log ratio of means: `m1, sd1, n1, m2, sd2, n2`
    /// (precomputed `yi`/`vi` columns are used when present).
    Rom,
    /// Precomputed `yi` plus `vi` (variance) or `sigma` (standard error).
    Precomputed,
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "or" => Ok(Measure::Or),
            "plo" => Ok(Measure::Plo),
            "rom" => Ok(Measure::Rom),
            "precomputed" => Ok(Measure::Precomputed),
            other => Err(Error::invalid(format!(
                "unknown measure {other:?} (expected or, plo, rom or precomputed)"
            ))),
        }
    }
}

/// A parsed study CSV: the derived dataset plus the raw columns, kept for
/// design construction (group labels, covariable values).
#[derive(Debug, Clone)]
pub struct StudyTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub dataset: StudyDataset,
}

impl StudyTable {
    fn column_index(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column {name:?}")))
    }

    /// Raw string values of a column.
    pub fn column(&self, name: &str) -> Result<Vec<String>> {
        let idx = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[idx].clone()).collect())
    }

    /// Numeric values of a column, with row-addressed diagnostics.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| parse_number(&r[idx], i + 2, name))
            .collect()
    }
}

fn parse_number(raw: &str, line: usize, column: &str) -> Result<f64> {
    raw.trim().parse::<f64>().map_err(|_| {
        Error::Parse(format!(
            "line {line}: cannot parse {raw:?} in column {column:?} as a number"
        ))
    })
}

struct RawCsv {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_raw(path: &Path) -> Result<RawCsv> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(record.iter().map(|f| f.to_string()).collect());
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!(
            "{} contains a header but no data rows",
            path.display()
        )));
    }
    Ok(RawCsv { headers, rows })
}

fn get(raw: &RawCsv, idx: usize, row: usize) -> &str {
    raw.rows[row].get(idx).map(String::as_str).unwrap_or("")
}

/// Read a study CSV and derive effect estimates under the given measure.
/// Labels come from the required `study` column.
pub fn read_study_csv(path: impl AsRef<Path>, measure: Measure) -> Result<StudyTable> {
    let path = path.as_ref();
    let raw = read_raw(path)?;
    let find = |name: &str| raw.headers.iter().position(|h| h == name);
    let require = |name: &str| {
        find(name).ok_or_else(|| {
            Error::Parse(format!(
                "{}: missing required column {name:?}",
                path.display()
            ))
        })
    };

    let study_idx = require("study")?;
    let mut estimates: Vec<EffectEstimate> = Vec::with_capacity(raw.rows.len());
    for i in 0..raw.rows.len() {
        let line = i + 2; // header is line 1
        let label = get(&raw, study_idx, i).to_string();
        if label.is_empty() {
            return Err(Error::Parse(format!("line {line}: empty study label")));
        }
        let est = match measure {
            Measure::Or => {
                let a = parse_number(get(&raw, require("events.trt")?, i), line, "events.trt")?;
                let n1 = parse_number(get(&raw, require("total.trt")?, i), line, "total.trt")?;
                let c = parse_number(get(&raw, require("events.ctl")?, i), line, "events.ctl")?;
                let n2 = parse_number(get(&raw, require("total.ctl")?, i), line, "total.ctl")?;
                let table = TwoByTwoTable::new(a, n1, c, n2)
                    .map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
                effect_sizes::log_odds_ratio(&table, label)
            }
            Measure::Plo => {
                let n = parse_number(get(&raw, require("n")?, i), line, "n")?;
                let events = if let Some(idx) = find("events") {
                    parse_number(get(&raw, idx, i), line, "events")?
                } else if let Some(idx) = find("percent") {
                    n * parse_number(get(&raw, idx, i), line, "percent")? / 100.0
                } else {
                    return Err(Error::Parse(format!(
                        "{}: measure plo needs an events or percent column",
                        path.display()
                    )));
                };
                effect_sizes::logit_proportion(events, n, label)
            }
            Measure::Rom => {
                if let (Some(yi), Some(vi)) = (find("yi"), find("vi")) {
                    let y = parse_number(get(&raw, yi, i), line, "yi")?;
                    let v = parse_number(get(&raw, vi, i), line, "vi")?;
                    EffectEstimate::new(y, v, label)
                } else {
                    let m1 = parse_number(get(&raw, require("m1")?, i), line, "m1")?;
                    let sd1 = parse_number(get(&raw, require("sd1")?, i), line, "sd1")?;
                    let n1 = parse_number(get(&raw, require("n1")?, i), line, "n1")?;
                    let m2 = parse_number(get(&raw, require("m2")?, i), line, "m2")?;
                    let sd2 = parse_number(get(&raw, require("sd2")?, i), line, "sd2")?;
                    let n2 = parse_number(get(&raw, require("n2")?, i), line, "n2")?;
                    effect_sizes::log_ratio_of_means(m1, sd1, n1, m2, sd2, n2, label)
                }
            }
            Measure::Precomputed => {
                let y = parse_number(get(&raw, require("yi")?, i), line, "yi")?;
                if let Some(vi) = find("vi") {
                    let v = parse_number(get(&raw, vi, i), line, "vi")?;
                    EffectEstimate::new(y, v, label)
                } else if let Some(si) = find("sigma") {
                    let s = parse_number(get(&raw, si, i), line, "sigma")?;
                    EffectEstimate::new(y, s * s, label)
                } else {
                    return Err(Error::Parse(format!(
                        "{}: measure precomputed needs a vi or sigma column",
                        path.display()
                    )));
                }
            }
        };
        estimates.push(est.map_err(|e| Error::Parse(format!("line {line}: {e}")))?);
    }

    let dataset = StudyDataset::from_estimates(&estimates)?;
    Ok(StudyTable {
        headers: raw.headers,
        rows: raw.rows,
        dataset,
    })
}

/// Write derived effect sizes as `study, yi, vi`.
pub fn write_escalc_csv(dataset: &StudyDataset, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(["study", "yi", "vi"])?;
    for i in 0..dataset.len() {
        let v = dataset.sigma[i] * dataset.sigma[i];
        writer.write_record([
            dataset.labels[i].as_str(),
            &format_float(dataset.y[i]),
            &format_float(v),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// Read a design matrix from CSV: header names the columns, every cell
/// numeric.
pub fn read_design_csv(path: impl AsRef<Path>) -> Result<DesignMatrix> {
    let path = path.as_ref();
    let raw = read_raw(path)?;
    let mut columns: Vec<(String, Vec<f64>)> = raw
        .headers
        .iter()
        .map(|h| (h.clone(), Vec::new()))
        .collect();
    for (i, row) in raw.rows.iter().enumerate() {
        if row.len() != raw.headers.len() {
            return Err(Error::Parse(format!(
                "{}: line {} has {} fields, expected {}",
                path.display(),
                i + 2,
                row.len(),
                raw.headers.len()
            )));
        }
        for (j, cell) in row.iter().enumerate() {
            columns[j]
                .1
                .push(parse_number(cell, i + 2, &raw.headers[j])?);
        }
    }
    DesignMatrix::from_columns(columns)
}

/// Read a tabulated heterogeneity density: columns `tau, density`.
pub fn read_tabulated_csv(path: impl AsRef<Path>) -> Result<(Vec<f64>, Vec<f64>)> {
    let path = path.as_ref();
    let raw = read_raw(path)?;
    let t_idx = raw
        .headers
        .iter()
        .position(|h| h == "tau")
        .ok_or_else(|| Error::Parse(format!("{}: missing column \"tau\"", path.display())))?;
    let d_idx = raw
        .headers
        .iter()
        .position(|h| h == "density")
        .ok_or_else(|| Error::Parse(format!("{}: missing column \"density\"", path.display())))?;
    let mut taus = Vec::with_capacity(raw.rows.len());
    let mut dens = Vec::with_capacity(raw.rows.len());
    for (i, row) in raw.rows.iter().enumerate() {
        taus.push(parse_number(&row[t_idx], i + 2, "tau")?);
        dens.push(parse_number(&row[d_idx], i + 2, "density")?);
    }
    Ok((taus, dens))
}

/// Write a tabulated density as `tau, density`.
pub fn write_tabulated_csv(taus: &[f64], densities: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())?;
    writer.write_record(["tau", "density"])?;
    for (t, d) in taus.iter().zip(densities) {
        writer.write_record([&format_float(*t), &format_float(*d)])?;
    }
    writer.flush()?;
    Ok(())
}

/// Shortest round-trip decimal representation of an f64.
pub fn format_float(v: f64) -> String {
    let mut buf = ryu_format(v);
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_format(v: f64) -> String {
    // serde_json uses ryu internally; formatting through it keeps CSV and
    // JSON byte-consistent
    serde_json::to_string(&v).unwrap_or_else(|_| format!("{v}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn precomputed_crins_rows() {
        let f = write_temp(
            "study,IL2RA,yi,sigma\n\
             Heffron (2003),daclizumab,-2.31,0.60\n\
             Gibelli (2004),basiliximab,-0.46,0.56\n\
             Schuller (2005),daclizumab,-2.30,0.88\n\
             Ganschow (2005),basiliximab,-1.76,0.46\n\
             Spada (2006),basiliximab,-1.26,0.64\n\
             Gras (2008),basiliximab,-2.42,1.53\n",
        );
        let table = read_study_csv(f.path(), Measure::Precomputed).unwrap();
        assert_eq!(table.dataset.len(), 6);
        assert_relative_eq!(table.dataset.y[0], -2.31);
        assert_relative_eq!(table.dataset.sigma[5], 1.53);
        assert_eq!(table.column("IL2RA").unwrap()[0], "daclizumab");
    }

    #[test]
    fn plo_from_percent() {
        let f = write_temp(
            "study,year,n,percent\n\
             Kastrukoff (1990),1990,50,46.0\n\
             Wolinsky (1990),1990,274,72.5\n",
        );
        let table = read_study_csv(f.path(), Measure::Plo).unwrap();
        assert_relative_eq!(table.dataset.y[0], -0.1603, epsilon = 5e-5);
        assert_relative_eq!(
            table.dataset.sigma[0] * table.dataset.sigma[0],
            0.0805,
            epsilon = 5e-5
        );
        assert_relative_eq!(table.dataset.y[1], 0.9694, epsilon = 5e-5);
    }

    #[test]
    fn or_counts() {
        let f = write_temp(
            "study,events.trt,total.trt,events.ctl,total.ctl\n\
             a,10,100,20,100\n",
        );
        let table = read_study_csv(f.path(), Measure::Or).unwrap();
        assert_relative_eq!(table.dataset.y[0], -0.8109, epsilon = 5e-5);
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write_temp("study,yi,vi\n");
        let err = read_study_csv(f.path(), Measure::Precomputed).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
    }

    #[test]
    fn bad_cell_reports_row() {
        let f = write_temp("study,yi,vi\na,0.5,0.3\nb,oops,0.3\n");
        let err = read_study_csv(f.path(), Measure::Precomputed).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("yi"), "{msg}");
    }

    #[test]
    fn missing_column_diagnostic() {
        let f = write_temp("study,yi\na,0.5\n");
        let err = read_study_csv(f.path(), Measure::Precomputed).unwrap_err();
        assert!(err.to_string().contains("vi"), "{err}");
    }

    #[test]
    fn escalc_roundtrip_exact() {
        let f = write_temp("study,yi,vi\na,-0.123456789012345,0.987654321098765\nb,2.5,0.25\n");
        let table = read_study_csv(f.path(), Measure::Precomputed).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        write_escalc_csv(&table.dataset, out.path()).unwrap();
        let back = read_study_csv(out.path(), Measure::Precomputed).unwrap();
        for i in 0..2 {
            assert_eq!(table.dataset.y[i], back.dataset.y[i]);
            assert_relative_eq!(
                table.dataset.sigma[i],
                back.dataset.sigma[i],
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn design_csv() {
        let f = write_temp("intercept,year\n1,-10\n1,-10\n1,-9\n");
        let x = read_design_csv(f.path()).unwrap();
        assert_eq!(x.nrows(), 3);
        assert_eq!(x.column_names, vec!["intercept", "year"]);
        assert_relative_eq!(x.entries[(2, 1)], -9.0);
    }

    #[test]
    fn tabulated_csv_roundtrip() {
        let taus = vec![0.0, 0.5, 1.0];
        let dens = vec![1.5, 0.7, 0.1];
        let out = tempfile::NamedTempFile::new().unwrap();
        write_tabulated_csv(&taus, &dens, out.path()).unwrap();
        let (t2, d2) = read_tabulated_csv(out.path()).unwrap();
        assert_eq!(taus, t2);
        assert_eq!(dens, d2);
    }
}
