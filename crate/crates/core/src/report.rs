//! Tabular experiment results with fitted power laws.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use crate::error::{ensure, Error, Result};

/// Least-squares slope of `log y` against `log x` and its standard error.
///
/// ```
/// let rows: Vec<(f64, f64)> = (0..6).map(|i| {
///     let x = 2f64.powi(i);
///     (x, x * x)
/// }).collect();
/// let (slope, stderr) = invsq::report::fit_slope(&rows).unwrap();
/// assert!((slope - 2.0).abs() < 1e-12 && stderr < 1e-12);
/// ```
pub fn fit_slope(rows: &[(f64, f64)]) -> Result<(f64, f64)> {
    ensure!(rows.len() >= 4, Domain, "a slope fit needs at least 4 points, got {}", rows.len());
    ensure!(
        rows.iter().all(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite()),
        DegenerateData,
        "slope fits need positive finite values"
    );
    let pts: Vec<(f64, f64)> = rows.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / m, a.1 + p.1 / m));
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    ensure!(sxx > 0.0, DegenerateData, "all x values coincide");
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let stderr = (ssr / (m - 2.0) / sxx).sqrt();
    Ok((slope, stderr))
}

/// Rows of a sweep, the power laws fitted to them and a description of the
/// run. Wall time is kept out of the CSV so identical runs write identical
/// files.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub fitted_slopes: BTreeMap<String, (f64, f64)>,
    pub metadata: BTreeMap<String, String>,
    pub wall_time: Option<Duration>,
}

impl ExperimentReport {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("version".to_string(), env!("CARGO_PKG_VERSION").to_string());
        Self { columns: columns.into_iter().map(Into::into).collect(), metadata, ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        ensure!(
            row.len() == self.columns.len(),
            InvalidConfig,
            "row has {} fields for {} columns",
            row.len(),
            self.columns.len()
        );
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Fit `log y` against `log x` for two columns and record it under `name`.
    pub fn fit(&mut self, name: &str, x: &str, y: &str) -> Result<(f64, f64)> {
        let missing = |c: &str| Error::InvalidConfig(format!("no column named {c}"));
        let xs = self.column(x).ok_or_else(|| missing(x))?;
        let ys = self.column(y).ok_or_else(|| missing(y))?;
        let pairs: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
        let fit = fit_slope(&pairs)?;
        self.fitted_slopes.insert(name.to_string(), fit);
        Ok(fit)
    }

    pub fn slope(&self, name: &str) -> Option<f64> {
        self.fitted_slopes.get(name).map(|f| f.0)
    }

    /// Metadata as `# key=value` lines, a header, the rows, then
    /// `# slope name=slope,stderr` lines. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        for (k, (s, e)) in &self.fitted_slopes {
            let _ = writeln!(out, "# slope {k}={s:?},{e:?}");
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |line: &str| Error::InvalidConfig(format!("malformed report line: {line}"));
        let mut report = Self::default();
        let mut header = false;
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# slope ") {
                let (k, v) = rest.split_once('=').ok_or_else(|| bad(line))?;
                let (s, e) = v.split_once(',').ok_or_else(|| bad(line))?;
                let s: f64 = s.parse().map_err(|_| bad(line))?;
                let e: f64 = e.parse().map_err(|_| bad(line))?;
                report.fitted_slopes.insert(k.to_string(), (s, e));
            } else if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest.split_once('=').ok_or_else(|| bad(line))?;
                report.metadata.insert(k.to_string(), v.to_string());
            } else if !header {
                report.columns = line.split(',').map(str::to_string).collect();
                header = true;
            } else {
                let row = line.split(',').map(|f| f.parse::<f64>().map_err(|_| bad(line))).collect::<Result<Vec<_>>>()?;
                report.push(row)?;
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_data_has_zero_slope() {
        let rows: Vec<(f64, f64)> = (0..5).map(|i| (2f64.powi(i), 3.0)).collect();
        assert_eq!(fit_slope(&rows).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn preconditions() {
        assert!(matches!(fit_slope(&[(1.0, 1.0), (2.0, 2.0), (4.0, 4.0)]), Err(Error::Domain(_))));
        let rows = [(1.0, 1.0), (2.0, -2.0), (4.0, 4.0), (8.0, 8.0)];
        assert!(matches!(fit_slope(&rows), Err(Error::DegenerateData(_))));
    }

    #[test]
    fn csv_round_trip() {
        let mut r = ExperimentReport::new(["N", "value"]);
        r.metadata.insert("n".into(), "3".into());
        for i in 0..5 {
            let x = 2f64.powi(i + 6);
            r.push(vec![x, x.powf(1.5) * (1.0 + 0.1 / 3.0)]).unwrap();
        }
        r.fit("value", "N", "value").unwrap();
        let back = ExperimentReport::from_csv(&r.to_csv()).unwrap();
        assert_eq!(back, r);
    }
}
