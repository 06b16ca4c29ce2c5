//! Per-bin NMSE aggregation across runs.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};

/// One label's aggregate over all runs.
#[derive(Clone, Debug, PartialEq)]
pub struct NmseRow {
    pub label: u32,
    pub true_omega: f64,
    pub mean_estimate: f64,
    /// `sqrt(mean((estimate - truth)^2)) / truth`.
    pub nmse: f64,
}

/// Experiment outcome: per-bin rows for labels with positive truth, plus
/// estimated mass that landed on labels absent from the truth.
#[derive(Clone, Debug)]
pub struct NmseReport {
    pub rows: Vec<NmseRow>,
    /// (label, mean estimated mass) for labels with zero true mass.
    pub spurious: Vec<(u32, f64)>,
    pub runs: usize,
    /// Resolved configuration, echoed into the report header.
    pub config_echo: String,
    /// Not serialized: reports must be byte-identical across reruns.
    pub wall: Duration,
}

/// Estimates plus the truth they are scored against. `truths` holds one
/// entry when a single store served every run, or one entry per run when
/// stores were regenerated.
pub struct RunSet {
    pub estimates: Vec<BTreeMap<u32, f64>>,
    pub truths: Vec<BTreeMap<u32, f64>>,
}

impl RunSet {
    fn truth_of(&self, run: usize) -> &BTreeMap<u32, f64> {
        if self.truths.len() == 1 {
            &self.truths[0]
        } else {
            &self.truths[run]
        }
    }
}

/// Aggregates estimates against truth. Labels with zero true mass cannot be
/// scored by a relative error and are reported separately.
pub fn compute_nmse(runs: &RunSet) -> (Vec<NmseRow>, Vec<(u32, f64)>) {
    let n = runs.estimates.len() as f64;
    let mut labels: BTreeSet<u32> = BTreeSet::new();
    for bins in runs.estimates.iter().chain(runs.truths.iter()) {
        labels.extend(bins.keys().copied());
    }

    let mut rows = Vec::new();
    let mut spurious = Vec::new();
    for label in labels {
        let mut mean_true = 0.0;
        let mut mean_est = 0.0;
        let mut mse = 0.0;
        for (r, est) in runs.estimates.iter().enumerate() {
            let t = runs.truth_of(r).get(&label).copied().unwrap_or(0.0);
            let e = est.get(&label).copied().unwrap_or(0.0);
            mean_true += t / n;
            mean_est += e / n;
            mse += (e - t) * (e - t) / n;
        }
        if mean_true > 0.0 {
            rows.push(NmseRow {
                label,
                true_omega: mean_true,
                mean_estimate: mean_est,
                nmse: mse.sqrt() / mean_true,
            });
        } else if mean_est > 0.0 {
            spurious.push((label, mean_est));
        }
    }
    (rows, spurious)
}

impl NmseReport {
    /// Deterministic CSV rendering: `#`-prefixed config echo and spurious
    /// diagnostics, then `label,true_omega,mean_estimate,nmse,runs` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in self.config_echo.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        for (label, mass) in &self.spurious {
            out.push_str(&format!(
                "# spurious_mass label={label} mean_estimate={mass}\n"
            ));
        }
        out.push_str("label,true_omega,mean_estimate,nmse,runs\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.label, row.true_omega, row.mean_estimate, row.nmse, self.runs
            ));
        }
        out
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let io_err = |source| Error::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
        w.write_all(self.to_csv().as_bytes()).map_err(io_err)?;
        w.flush().map_err(io_err)
    }

    pub fn row(&self, label: u32) -> Option<&NmseRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}
