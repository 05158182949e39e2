//! Stratified transect-width data: construction and validation, CSV
//! ingestion/emission, the two embedded survey replications, and the
//! γ-dependent per-stratum summaries the posterior needs.

use std::io::{Read, Write};

use crate::{Error, Result};

/// One transect's widths. Stratum identity is positional within a
/// [`TransectData`]; the replication/transect labels are opaque strings kept
/// for CSV round-trips.
#[derive(Debug, Clone, PartialEq)]
pub struct Stratum {
    pub replication: String,
    pub transect: String,
    pub widths: Vec<f64>,
}

/// Stratified width observations plus the baseline length W.
///
/// Invariants enforced at construction: at least one stratum, every stratum
/// non-empty, and every width strictly inside (0, W). The upper bound is a
/// hard error because the complement weight 1 − x/W must stay positive.
#[derive(Debug, Clone, PartialEq)]
pub struct TransectData {
    strata: Vec<Stratum>,
    baseline_length: f64,
}

impl TransectData {
    pub fn new(strata: Vec<Stratum>, baseline_length: f64) -> Result<Self> {
        if !baseline_length.is_finite() || baseline_length <= 0.0 {
            return Err(Error::Data(format!(
                "baseline length must be positive, got {baseline_length}"
            )));
        }
        if strata.is_empty() {
            return Err(Error::Data("no strata".into()));
        }
        for s in &strata {
            if s.widths.is_empty() {
                return Err(Error::Data(format!("stratum {} has no widths", s.transect)));
            }
            for &w in &s.widths {
                if !w.is_finite() || w <= 0.0 {
                    return Err(Error::Data(format!(
                        "width {w} in stratum {} is not positive",
                        s.transect
                    )));
                }
                if w >= baseline_length {
                    return Err(Error::Data(format!(
                        "width {w} in stratum {} is not below the baseline length {baseline_length}",
                        s.transect
                    )));
                }
            }
        }
        Ok(Self { strata, baseline_length })
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn baseline_length(&self) -> f64 {
        self.baseline_length
    }

    pub fn stratum_count(&self) -> usize {
        self.strata.len()
    }

    pub fn stratum_sizes(&self) -> Vec<usize> {
        self.strata.iter().map(|s| s.widths.len()).collect()
    }

    pub fn total_count(&self) -> usize {
        self.strata.iter().map(|s| s.widths.len()).sum()
    }

    /// All widths in stratum-then-file order.
    pub fn all_widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.strata.iter().flat_map(|s| s.widths.iter().copied())
    }

    /// Arithmetic mean of all sampled widths.
    pub fn sample_mean(&self) -> f64 {
        self.all_widths().sum::<f64>() / self.total_count() as f64
    }

    /// Emit as CSV with header `replication,transect,width`. Widths use
    /// shortest round-trip formatting so a reload is bit-identical.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let to_data = |e: csv::Error| Error::Data(format!("csv write: {e}"));
        out.write_record(["replication", "transect", "width"]).map_err(to_data)?;
        for s in &self.strata {
            for &w in &s.widths {
                out.write_record([s.replication.as_str(), s.transect.as_str(), &format!("{w}")])
                    .map_err(to_data)?;
            }
        }
        out.flush().map_err(|e| Error::Data(format!("csv flush: {e}")))?;
        Ok(())
    }
}

/// Parse CSV with header `replication,transect,width`, grouping rows into
/// strata by their (replication, transect) pair in order of first
/// appearance, then validate against `baseline_length`.
pub fn load_transects<R: Read>(source: R, baseline_length: f64) -> Result<TransectData> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    {
        let headers = reader
            .headers()
            .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?;
        let got: Vec<&str> = headers.iter().collect();
        if got != ["replication", "transect", "width"] {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header replication,transect,width; got {}", got.join(",")),
            });
        }
    }

    let mut strata: Vec<Stratum> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx + 2; // 1-based, after the header
        let record = record.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, got {}", record.len()),
            });
        }
        let replication = record[0].to_string();
        let transect = record[1].to_string();
        let width: f64 = record[2].parse().map_err(|e| Error::Parse {
            line,
            message: format!("bad width {:?}: {e}", &record[2]),
        })?;
        match strata
            .iter_mut()
            .find(|s| s.replication == replication && s.transect == transect)
        {
            Some(s) => s.widths.push(width),
            None => strata.push(Stratum { replication, transect, widths: vec![width] }),
        }
    }
    if strata.is_empty() {
        return Err(Error::Data("empty input: no data rows".into()));
    }
    TransectData::new(strata, baseline_length)
}

/// Selector for the two embedded survey replications.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Replication {
    One,
    Two,
}

/// Shrub widths (meters), replication 1, three transects.
const REP1_I: [f64; 18] = [
    1.53, 0.87, 0.79, 0.78, 1.85, 1.45, 0.48, 0.52, 0.22, 0.38, 0.59, 0.20, 0.42, 1.02, 0.97,
    0.56, 0.62, 0.42,
];
const REP1_II: [f64; 22] = [
    1.15, 0.87, 0.57, 0.97, 0.57, 1.97, 0.58, 2.54, 1.85, 0.35, 1.24, 1.80, 0.78, 0.98, 1.30,
    1.55, 1.69, 2.12, 1.27, 0.75, 1.01, 1.82,
];
const REP1_III: [f64; 6] = [0.71, 1.50, 1.82, 1.86, 1.61, 1.21];

/// Shrub widths (meters), replication 2, two transects (the third was empty).
const REP2_I: [f64; 32] = [
    0.67, 0.31, 0.83, 1.95, 1.36, 1.45, 0.72, 1.15, 0.98, 1.29, 0.88, 0.25, 0.63, 1.12, 0.34,
    0.21, 1.36, 0.95, 1.04, 0.48, 1.05, 0.88, 0.16, 1.08, 0.95, 0.25, 0.30, 1.40, 0.58, 0.73,
    1.30, 0.57,
];
const REP2_II: [f64; 11] = [0.96, 2.08, 0.68, 1.39, 0.50, 0.72, 0.19, 1.91, 0.88, 0.48, 0.12];

/// Baseline length of the embedded survey, in meters.
pub const EMBEDDED_BASELINE_LENGTH: f64 = 125.0;

/// The embedded survey data, W = 125 m.
pub fn embedded_replication(which: Replication) -> TransectData {
    let stratum = |rep: &str, tr: &str, widths: &[f64]| Stratum {
        replication: rep.to_string(),
        transect: tr.to_string(),
        widths: widths.to_vec(),
    };
    let strata = match which {
        Replication::One => vec![
            stratum("1", "I", &REP1_I),
            stratum("1", "II", &REP1_II),
            stratum("1", "III", &REP1_III),
        ],
        Replication::Two => vec![stratum("2", "I", &REP2_I), stratum("2", "II", &REP2_II)],
    };
    TransectData::new(strata, EMBEDDED_BASELINE_LENGTH).expect("embedded data is valid")
}

/// Per-stratum summaries of the powered widths x^γ: the arithmetic mean
/// aᵢ = Σx^γ/nᵢ, the geometric mean gᵢ = (Πx^γ)^{1/nᵢ}, and the raw sum.
#[derive(Debug, Clone, PartialEq)]
pub struct StratumSummary {
    pub n: usize,
    pub arith_mean_pow: f64,
    pub geom_mean_pow: f64,
    pub sum_pow: f64,
}

/// Compute the γ-powered summaries for every stratum. The geometric mean
/// goes through the mean of logs so large γ cannot overflow it.
pub fn stratum_summaries(data: &TransectData, gamma_shape: f64) -> Result<Vec<StratumSummary>> {
    if !gamma_shape.is_finite() || gamma_shape <= 0.0 {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma_shape}")));
    }
    Ok(data
        .strata()
        .iter()
        .map(|s| {
            let n = s.widths.len();
            let sum_pow: f64 = s.widths.iter().map(|&x| x.powf(gamma_shape)).sum();
            let mean_log: f64 =
                s.widths.iter().map(|&x| gamma_shape * x.ln()).sum::<f64>() / n as f64;
            StratumSummary {
                n,
                arith_mean_pow: sum_pow / n as f64,
                geom_mean_pow: mean_log.exp(),
                sum_pow,
            }
        })
        .collect())
}
