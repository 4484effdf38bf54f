//! Run reports: CSV time series, adjustment logs, coefficient snapshots and
//! report comparison.

use super::spatial::Geometry;
use crate::adaptivity::Adjustment;
use crate::error::{invalid, Error, Result};
use crate::hermite::{BasisSpec, CoeffField, IndexSet};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// One reported time. Error columns are `NaN` when the scenario has no exact
/// solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub t: f64,
    pub dt: f64,
    pub beta: f64,
    #[serde(rename = "N")]
    pub order: u32,
    pub indicator: f64,
    pub l2_error: f64,
    pub rho_err: f64,
    pub u_err: f64,
    pub theta_err: f64,
    pub sigma_err: f64,
    pub q_err: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidArgument(format!("malformed CSV: {other:?}")),
    }
}

impl RunReport {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
        for row in &self.rows {
            w.serialize(row).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
        let rows = r.deserialize().collect::<std::result::Result<Vec<ReportRow>, _>>().map_err(csv_error)?;
        if rows.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return invalid(format!("report {} is not strictly increasing in time", path.display()));
        }
        Ok(RunReport { rows })
    }

    pub fn last(&self) -> Option<&ReportRow> {
        self.rows.last()
    }
}

/// Writes the adjustment log as CSV.
pub fn write_adjustments(log: &[Adjustment], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    if log.is_empty() {
        w.write_record(["time", "kind", "old", "new", "indicator_before", "indicator_after"]).map_err(csv_error)?;
    }
    for a in log {
        w.serialize(a).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_adjustments(path: &Path) -> Result<Vec<Adjustment>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.deserialize().collect::<std::result::Result<Vec<Adjustment>, _>>().map_err(csv_error)
}

/// Final coefficients of a run, keyed by `"k1,k2,k3"` at every point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub spec: BasisSpec,
    pub geometry: Option<Geometry>,
    pub points: Vec<BTreeMap<String, f64>>,
}

impl Snapshot {
    pub fn new(time: f64, field: &CoeffField, geometry: Option<Geometry>) -> Self {
        let set = IndexSet::new(field.spec().order);
        let points = (0..field.points())
            .map(|j| {
                set.indices()
                    .iter()
                    .zip(field.point(j))
                    .map(|(k, c)| (format!("{},{},{}", k[0], k[1], k[2]), *c))
                    .collect()
            })
            .collect();
        Snapshot { time, spec: *field.spec(), geometry, points }
    }

    pub fn to_field(&self) -> Result<CoeffField> {
        let set = IndexSet::new(self.spec.order);
        let mut f = CoeffField::zeros(self.spec, self.points.len());
        for (j, p) in self.points.iter().enumerate() {
            if p.len() != set.len() {
                return invalid(format!("snapshot point {j} has {} coefficients, expected {}", p.len(), set.len()));
            }
            for (r, k) in set.indices().iter().enumerate() {
                let key = format!("{},{},{}", k[0], k[1], k[2]);
                f.point_mut(j)[r] = *p
                    .get(&key)
                    .ok_or_else(|| Error::InvalidArgument(format!("snapshot point {j} lacks coefficient {key}")))?;
            }
        }
        Ok(f)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidArgument(format!("snapshot serialisation: {e}")))?;
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("malformed snapshot: {e}")))
    }
}

/// Ratios `a / b` of the error columns at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub t: f64,
    pub l2_error_a: f64,
    pub l2_error_b: f64,
    pub l2_ratio: f64,
    pub rho_ratio: f64,
    pub u_ratio: f64,
    pub theta_ratio: f64,
    pub sigma_ratio: f64,
    pub q_ratio: f64,
}

fn ratio(a: f64, b: f64) -> f64 {
    if a == b {
        1.0
    } else {
        a / b
    }
}

/// Compares two reports time by time. The time grids must agree; no
/// interpolation is attempted.
pub fn compare(a: &RunReport, b: &RunReport) -> Result<Vec<ComparisonRow>> {
    if a.rows.len() != b.rows.len() {
        return invalid(format!("time grids differ: {} rows vs {} rows", a.rows.len(), b.rows.len()));
    }
    a.rows
        .iter()
        .zip(&b.rows)
        .map(|(x, y)| {
            if (x.t - y.t).abs() > 1e-12 * x.t.abs().max(1.0) {
                return invalid(format!("time grids differ: t = {} vs t = {}", x.t, y.t));
            }
            Ok(ComparisonRow {
                t: x.t,
                l2_error_a: x.l2_error,
                l2_error_b: y.l2_error,
                l2_ratio: ratio(x.l2_error, y.l2_error),
                rho_ratio: ratio(x.rho_err, y.rho_err),
                u_ratio: ratio(x.u_err, y.u_err),
                theta_ratio: ratio(x.theta_err, y.theta_err),
                sigma_ratio: ratio(x.sigma_err, y.sigma_err),
                q_ratio: ratio(x.q_err, y.q_err),
            })
        })
        .collect()
}
