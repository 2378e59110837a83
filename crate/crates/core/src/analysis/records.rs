use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::geometry::ErrorKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    Noiseless,
    Noisy,
}

impl std::fmt::Display for Readout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Readout::Noiseless => "noiseless",
            Readout::Noisy => "noisy",
        })
    }
}

impl std::str::FromStr for Readout {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "noiseless" => Ok(Readout::Noiseless),
            "noisy" => Ok(Readout::Noisy),
            _ => Err(format!("unknown readout '{s}' (noiseless|noisy)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mc,
    Split,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Mc => "mc",
            Method::Split => "split",
        })
    }
}

/// One estimate of the logical error rate, as written to `results.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub method: Method,
    pub error_kind: ErrorKind,
    pub readout: Readout,
    pub p: f64,
    pub r: usize,
    #[serde(rename = "P_L")]
    pub p_l: f64,
    pub sigma_rel: f64,
    pub seed: u64,
    pub flips: u64,
    /// Seconds.
    pub wall_time: f64,
}

pub const RESULT_COLUMNS: [&str; 10] = [
    "method",
    "error_kind",
    "readout",
    "p",
    "r",
    "P_L",
    "sigma_rel",
    "seed",
    "flips",
    "wall_time",
];

pub fn write_results<W: Write>(records: &[ResultRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(RESULT_COLUMNS)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results<R: Read>(input: R) -> csv::Result<Vec<ResultRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Two-column `(x, y)` text, one point per line.
pub fn write_curve<W: Write>(points: &[(f64, f64)], mut out: W) -> std::io::Result<()> {
    for (x, y) in points {
        writeln!(out, "{x:e} {y:e}")?;
    }
    Ok(())
}

/// `P_L` against `p` for one method, error kind, readout and size, sorted
/// by `p`.
pub fn curves(records: &[ResultRecord]) -> BTreeMap<String, Vec<(f64, f64)>> {
    let mut out: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for rec in records {
        let name = format!(
            "{}_{}_{}_r{}",
            rec.method, rec.error_kind, rec.readout, rec.r
        );
        out.entry(name).or_default().push((rec.p, rec.p_l));
    }
    for pts in out.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// Writes `results.csv` and one `curve_<name>.dat` per curve into `dir`;
/// returns the files written.
pub fn emit_results(dir: &Path, records: &[ResultRecord]) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join("results.csv");
    let file = std::fs::File::create(&csv_path)?;
    write_results(records, std::io::BufWriter::new(file)).map_err(std::io::Error::other)?;
    let mut written = vec![csv_path];
    for (name, pts) in curves(records) {
        let path = dir.join(format!("curve_{name}.dat"));
        write_curve(&pts, std::io::BufWriter::new(std::fs::File::create(&path)?))?;
        written.push(path);
    }
    Ok(written)
}
