//! Fits of the decay rate and of the fitting formula, and result files.

mod fit;
mod records;

pub use fit::{
    fit_alpha, fit_ansatz, AlphaFit, AnsatzCoefficients, AnsatzOptions, DataPoint, FitResult,
    COEFFICIENT_NAMES, DEFAULT_R0,
};
pub use records::{
    curves, emit_results, read_results, write_curve, write_results, Method, Readout, ResultRecord,
    RESULT_COLUMNS,
};

use serde::Deserialize;

use crate::geometry::ErrorKind;

/// Published coefficients of the fitting formula for the four settings,
/// shipped for validation runs.
pub const REFERENCE_FIT_CSV: &str = include_str!("../../data/reference_fit.csv");

#[derive(Deserialize)]
struct ReferenceRow {
    readout: Readout,
    error_kind: ErrorKind,
    #[serde(flatten)]
    coefficients: AnsatzCoefficients,
}

pub fn reference_coefficients(readout: Readout, kind: ErrorKind) -> AnsatzCoefficients {
    csv::Reader::from_reader(REFERENCE_FIT_CSV.as_bytes())
        .deserialize::<ReferenceRow>()
        .map(|row| row.expect("bundled table parses"))
        .find(|row| row.readout == readout && row.error_kind == kind)
        .expect("bundled table covers every setting")
        .coefficients
}

/// `P_L` per readout cycle: noisy-readout estimates cover `cycles` cycles.
pub fn per_cycle(p_l: f64, cycles: usize) -> f64 {
    p_l / cycles as f64
}
