use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use log::warn;
use qecsplit::analysis::{
    emit_results, fit_alpha, fit_ansatz, read_results, write_curve, AnsatzOptions, DataPoint,
    FitResult, Readout, ResultRecord,
};
use qecsplit::geometry::ErrorKind;
use serde::Serialize;

use crate::experiment::RunError;

#[derive(Debug, Serialize)]
pub struct AnsatzEntry {
    pub error_kind: ErrorKind,
    pub readout: Readout,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct AlphaEntry {
    pub error_kind: ErrorKind,
    pub readout: Readout,
    pub p: f64,
    pub sizes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Default, Serialize)]
pub struct FitReport {
    pub ansatz: Vec<AnsatzEntry>,
    pub alpha: Vec<AlphaEntry>,
}

/// Records with a usable estimate; zero-failure Monte Carlo rows carry no
/// information for a log-scale fit.
fn usable(records: &[ResultRecord]) -> impl Iterator<Item = &ResultRecord> {
    records
        .iter()
        .filter(|r| r.p_l > 0.0 && r.sigma_rel.is_finite())
}

fn point(r: &ResultRecord) -> DataPoint {
    DataPoint {
        p: r.p,
        r: r.r,
        p_l: r.p_l,
        sigma_rel: r.sigma_rel,
    }
}

/// Fits the formula once per (error kind, readout) and the decay rate once
/// per rate with at least two sizes. Fits that fail are reported, not fatal.
pub fn fit_records(records: &[ResultRecord], options: &AnsatzOptions) -> FitReport {
    let mut groups: BTreeMap<(ErrorKind, Readout), Vec<&ResultRecord>> = BTreeMap::new();
    for rec in usable(records) {
        groups
            .entry((rec.error_kind, rec.readout))
            .or_default()
            .push(rec);
    }
    let mut report = FitReport::default();
    for ((error_kind, readout), recs) in groups {
        let points: Vec<DataPoint> = recs.iter().map(|r| point(r)).collect();
        let (fit, error) = match fit_ansatz(&points, options) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        report.ansatz.push(AnsatzEntry {
            error_kind,
            readout,
            points: points.len(),
            fit,
            error,
        });
        let mut by_p: BTreeMap<u64, Vec<DataPoint>> = BTreeMap::new();
        for pt in &points {
            by_p.entry(pt.p.to_bits()).or_default().push(*pt);
        }
        for (bits, mut pts) in by_p {
            pts.sort_by_key(|pt| pt.r);
            let mut sizes: Vec<usize> = pts.iter().map(|pt| pt.r).collect();
            sizes.dedup();
            if sizes.len() < 2 {
                continue;
            }
            let mut entry = AlphaEntry {
                error_kind,
                readout,
                p: f64::from_bits(bits),
                sizes,
                alpha: None,
                sigma: None,
                error: None,
            };
            match fit_alpha(&pts) {
                Ok(a) => {
                    entry.alpha = Some(a.alpha);
                    entry.sigma = Some(a.sigma);
                }
                Err(e) => entry.error = Some(e.to_string()),
            }
            report.alpha.push(entry);
        }
    }
    report
}

pub fn read_results_file(path: &Path) -> Result<Vec<ResultRecord>, RunError> {
    let file = std::fs::File::open(path).map_err(|e| RunError::io(path, e))?;
    read_results(std::io::BufReader::new(file)).map_err(|e| RunError::io(path, e))
}

pub fn write_fit(path: &Path, report: &FitReport) -> Result<(), RunError> {
    for e in &report.ansatz {
        if let Some(msg) = &e.error {
            warn!("{} {} fit: {msg}", e.error_kind, e.readout);
        }
    }
    let text = serde_json::to_string_pretty(report).expect("serializable");
    std::fs::write(path, text).map_err(|e| RunError::io(path, e))
}

/// Gathers plot data from `dir` into `dir/report`: results and curves,
/// `alpha_<kind>_<readout>.dat` from the decay-rate fits, and `fit.json`.
/// A directory without results gives a header-only table.
pub fn bundle(dir: &Path, options: &AnsatzOptions) -> Result<Vec<PathBuf>, RunError> {
    let results = dir.join("results.csv");
    let records = if results.exists() {
        read_results_file(&results)?
    } else {
        Vec::new()
    };
    let out = dir.join("report");
    let mut written = emit_results(&out, &records).map_err(|e| RunError::io(&out, e))?;
    if records.is_empty() {
        return Ok(written);
    }
    let fits = fit_records(&records, options);
    let mut alpha: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for a in &fits.alpha {
        if let Some(v) = a.alpha {
            alpha
                .entry(format!("{}_{}", a.error_kind, a.readout))
                .or_default()
                .push((a.p, v));
        }
    }
    for (name, pts) in alpha {
        let path = out.join(format!("alpha_{name}.dat"));
        let file = std::fs::File::create(&path).map_err(|e| RunError::io(&path, e))?;
        write_curve(&pts, std::io::BufWriter::new(file)).map_err(|e| RunError::io(&path, e))?;
        written.push(path);
    }
    let fit_path = out.join("fit.json");
    write_fit(&fit_path, &fits)?;
    written.push(fit_path);
    Ok(written)
}
