//! Compression-vs-error theory, experiment records and CSV emission.

use serde::{Deserialize, Serialize};

use crate::trainer::ModelSnapshot;

/// One logged epoch: retained relations R, learned atom count Z, paired
/// constant count C, error rates, and the compression ratio κ = R/Z.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub epoch: u32,
    pub retained: usize,
    pub atom_count: usize,
    pub constant_count: usize,
    pub train_err: f64,
    pub test_err: f64,
    /// None when the model has no learned atoms.
    pub kappa: Option<f64>,
    pub seed: u64,
}

/// Worst-case expected test error of a random model at compression κ over
/// C paired constants: (ln 3 / 2) · C / κ, clipped to [0, 1].
pub fn predicted_error(constant_count: usize, kappa: f64) -> f64 {
    assert!(kappa > 0.0);
    let raw = 0.5 * 3f64.ln() * constant_count as f64 / kappa;
    raw.clamp(0.0, 1.0)
}

/// Symmetry-corrected prediction for d×d grids whose rows and columns can
/// be permuted freely: (ln 3 · d² − 2 ln d!) / κ, clipped to [0, 1].
pub fn predicted_error_symmetric(d: u32, kappa: f64) -> f64 {
    assert!(d >= 1 && kappa > 0.0);
    let mut log_fact = 0.0f64;
    for k in 2..=d {
        log_fact += (k as f64).ln();
    }
    let raw = (3f64.ln() * (d as f64).powi(2) - 2.0 * log_fact) / kappa;
    raw.clamp(0.0, 1.0)
}

/// Builds the record for one epoch from the snapshot and the measured
/// rates. Z excludes the bottom atom; κ is undefined at Z = 0.
pub fn record_epoch(
    snapshot: &ModelSnapshot,
    paired_constants: usize,
    retained: usize,
    train_err: f64,
    test_err: f64,
    epoch: u32,
) -> ExperimentRecord {
    let atom_count = snapshot.atoms.len();
    let kappa = if atom_count > 0 {
        Some(retained as f64 / atom_count as f64)
    } else {
        None
    };
    ExperimentRecord {
        epoch,
        retained,
        atom_count,
        constant_count: paired_constants,
        train_err,
        test_err,
        kappa,
        seed: snapshot.seed,
    }
}

pub const CSV_HEADER: &str = "epoch,R,Z,C,train_err,test_err,kappa,seed";

/// CSV with a fixed header and one row per record; decimal point, no
/// locale, κ written as `NA` when undefined. Byte-identical for identical
/// inputs.
pub fn write_csv(records: &[ExperimentRecord], out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let kappa = match r.kappa {
            Some(k) => format!("{k}"),
            None => "NA".to_string(),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.epoch, r.retained, r.atom_count, r.constant_count, r.train_err, r.test_err, kappa, r.seed
        )?;
    }
    Ok(())
}

pub fn csv_string(records: &[ExperimentRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(records, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv is ascii")
}
