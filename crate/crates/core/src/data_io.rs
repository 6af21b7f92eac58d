//! Reference heavy-tailed target samplers and financial CSV ingestion.
//!
//! Targets cover the multivariate Cauchy (Student-t with one degree of
//! freedom), general Student-t, and Gaussian baselines. Ingestion joins
//! per-instrument daily close prices on date and converts them to returns in
//! basis points.

use std::collections::HashSet;
use std::path::Path;

use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::audit::SampleSet;
use crate::numerics::{cholesky, Matrix, RngStream, Vector};
use crate::{Error, Result};

/// Heavy-tailed (or Gaussian baseline) target distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSpec {
    Cauchy {
        mode: Vector,
        scale: Matrix,
    },
    StudentT {
        dof: f64,
        mode: Vector,
        scale: Matrix,
    },
    GaussianTarget {
        mu: Vector,
        sigma: Matrix,
    },
}

impl TargetSpec {
    pub fn standard_cauchy(dim: usize) -> Self {
        TargetSpec::Cauchy {
            mode: Vector::zeros(dim),
            scale: Matrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TargetSpec::Cauchy { mode, .. } => mode.dim(),
            TargetSpec::StudentT { mode, .. } => mode.dim(),
            TargetSpec::GaussianTarget { mu, .. } => mu.dim(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            TargetSpec::Cauchy { mode, .. } => format!("cauchy(dim={})", mode.dim()),
            TargetSpec::StudentT { dof, mode, .. } => {
                format!("student_t(dim={}, dof={dof})", mode.dim())
            }
            TargetSpec::GaussianTarget { mu, .. } => format!("gaussian(dim={})", mu.dim()),
        }
    }
}

/// Draw `n` i.i.d. samples from the target; deterministic in `rng`.
///
/// Student-t (and Cauchy, its one-degree-of-freedom case) is sampled as
/// `mode + A g / sqrt(w / dof)` with `g` standard normal, `w` chi-squared
/// with `dof` degrees of freedom, and `A` the Cholesky factor of the scale
/// matrix.
pub fn sample_target(spec: &TargetSpec, rng: &RngStream, n: usize) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let (mode, scale, dof) = match spec {
        TargetSpec::Cauchy { mode, scale } => (mode, scale, Some(1.0)),
        TargetSpec::StudentT { dof, mode, scale } => {
            if !(dof.is_finite() && *dof > 0.0) {
                return Err(Error::Domain(format!(
                    "degrees of freedom must be positive, got {dof}"
                )));
            }
            (mode, scale, Some(*dof))
        }
        TargetSpec::GaussianTarget { mu, sigma } => (mu, sigma, None),
    };
    if mode.dim() != scale.rows() {
        return Err(Error::Shape(format!(
            "mode has dim {} but scale is {}x{}",
            mode.dim(),
            scale.rows(),
            scale.cols()
        )));
    }
    let factor = cholesky(scale)?;
    let dim = mode.dim();
    let chi = match dof {
        Some(d) => Some(ChiSquared::new(d).map_err(|e| Error::Domain(e.to_string()))?),
        None => None,
    };
    let mut r = rng.rng();
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let g = Vector::new(
            (0..dim)
                .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut r))
                .collect(),
        )
        .expect("finite");
        let correlated = factor.matvec(&g)?;
        let sample = match (&chi, dof) {
            (Some(chi), Some(d)) => {
                let mut w: f64 = chi.sample(&mut r);
                // Guard against a zero chi-squared draw from underflow.
                while w <= 0.0 {
                    w = chi.sample(&mut r);
                }
                mode.add(&correlated.scale(1.0 / (w / d).sqrt()))
            }
            _ => mode.add(&correlated),
        };
        samples.push(sample);
    }
    SampleSet::new(
        samples,
        format!("{} seed={}/{}", spec.describe(), rng.seed, rng.stream_id),
    )
}

/// How price ratios become returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReturnMode {
    /// `(close_t / close_{t-1} - 1) * 10^4` basis points.
    Simple,
    /// `ln(close_t / close_{t-1}) * 10^4` basis points.
    Log,
}

/// One instrument's close-price series, dates strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub name: String,
    pub dates: Vec<String>,
    pub closes: Vec<f64>,
}

/// Parse one CSV of dated closing prices. The file must have a header row
/// naming `date_column` and `price_column`, strictly increasing dates, and
/// positive prices.
pub fn read_price_csv(path: &Path, date_column: &str, price_column: &str) -> Result<PriceSeries> {
    let name = path.display().to_string();
    let ingest = |row: usize, message: String| Error::Ingest {
        file: name.clone(),
        row,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| ingest(1, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| ingest(1, e.to_string()))?
        .clone();
    let find = |col: &str| {
        headers
            .iter()
            .position(|h| h == col)
            .ok_or_else(|| ingest(1, format!("missing column {col:?}")))
    };
    let date_idx = find(date_column)?;
    let price_idx = find(price_column)?;

    let mut dates = Vec::new();
    let mut closes = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // header is row 1
        let record = record.map_err(|e| ingest(row, e.to_string()))?;
        let date = record
            .get(date_idx)
            .ok_or_else(|| ingest(row, "missing date field".into()))?
            .trim()
            .to_string();
        if date.is_empty() {
            return Err(ingest(row, "empty date".into()));
        }
        if let Some(prev) = dates.last() {
            if *prev >= date {
                return Err(ingest(
                    row,
                    format!("dates must be strictly increasing ({prev:?} then {date:?})"),
                ));
            }
        }
        let raw_price = record
            .get(price_idx)
            .ok_or_else(|| ingest(row, "missing price field".into()))?
            .trim();
        let price: f64 = raw_price
            .parse()
            .map_err(|_| ingest(row, format!("unparseable price {raw_price:?}")))?;
        if !(price.is_finite() && price > 0.0) {
            return Err(ingest(row, format!("nonpositive price {price}")));
        }
        dates.push(date);
        closes.push(price);
    }
    if dates.len() < 2 {
        return Err(ingest(
            dates.len() + 1,
            "need at least two price rows".into(),
        ));
    }
    Ok(PriceSeries {
        name,
        dates,
        closes,
    })
}

/// Inner-join price CSVs on date and convert to daily returns in basis
/// points. Output dimension is the number of instruments; length is the
/// joined length minus one.
pub fn ingest_returns(
    csv_paths: &[std::path::PathBuf],
    date_column: &str,
    price_column: &str,
    mode: ReturnMode,
) -> Result<SampleSet> {
    if csv_paths.is_empty() {
        return Err(Error::Domain("need at least one CSV path".into()));
    }
    let series: Vec<PriceSeries> = csv_paths
        .iter()
        .map(|p| read_price_csv(p, date_column, price_column))
        .collect::<Result<_>>()?;
    returns_from_series(&series, mode)
}

/// Join already-parsed price series; exposed for synthetic fixtures.
pub fn returns_from_series(series: &[PriceSeries], mode: ReturnMode) -> Result<SampleSet> {
    let common: Vec<&String> = {
        let mut sets: Vec<HashSet<&String>> = series
            .iter()
            .skip(1)
            .map(|s| s.dates.iter().collect())
            .collect();
        series[0]
            .dates
            .iter()
            .filter(|d| sets.iter_mut().all(|set| set.contains(*d)))
            .collect()
    };
    if common.len() < 2 {
        return Err(Error::Domain(format!(
            "date join produced {} shared rows; need at least 2",
            common.len()
        )));
    }
    // Per-instrument closes aligned on the joined dates (join preserves the
    // chronological order of the first file).
    let aligned: Vec<Vec<f64>> = series
        .iter()
        .map(|s| {
            let lookup: std::collections::HashMap<&String, f64> =
                s.dates.iter().zip(s.closes.iter().copied()).collect();
            common.iter().map(|d| lookup[*d]).collect()
        })
        .collect();

    let p = series.len();
    let n = common.len() - 1;
    let mut samples = Vec::with_capacity(n);
    for t in 1..common.len() {
        let mut row = Vec::with_capacity(p);
        for closes in &aligned {
            let ratio = closes[t] / closes[t - 1];
            let r = match mode {
                ReturnMode::Simple => (ratio - 1.0) * 1e4,
                ReturnMode::Log => ratio.ln() * 1e4,
            };
            row.push(r);
        }
        samples.push(Vector::new(row).expect("finite returns from positive prices"));
    }
    let names: Vec<&str> = series.iter().map(|s| s.name.as_str()).collect();
    SampleSet::new(
        samples,
        format!(
            "returns({mode:?} basis points) from {} joined rows of [{}]",
            common.len(),
            names.join(", ")
        ),
    )
}

/// Persist a sample set as CSV with header `dim_0,...,dim_{p-1}`; numbers
/// round-trip exactly.
pub fn samples_to_csv(set: &SampleSet) -> String {
    let mut out = String::new();
    let header: Vec<String> = (0..set.dim()).map(|j| format!("dim_{j}")).collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for s in set.samples() {
        let row: Vec<String> = s.as_slice().iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parse a sample CSV produced by [`samples_to_csv`].
pub fn samples_from_csv(content: &str, provenance: impl Into<String>) -> Result<SampleSet> {
    let mut lines = content.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Domain("sample CSV is empty".into()))?;
    let columns: Vec<&str> = header.split(',').collect();
    let p = columns.len();
    for (j, c) in columns.iter().enumerate() {
        if *c != format!("dim_{j}") {
            return Err(Error::Domain(format!(
                "sample CSV header column {j} is {c:?}, expected \"dim_{j}\""
            )));
        }
    }
    let mut samples = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let row = i + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != p {
            return Err(Error::Domain(format!(
                "sample CSV row {row} has {} fields, expected {p}",
                fields.len()
            )));
        }
        let values: Vec<f64> = fields
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Domain(format!("sample CSV row {row}: bad number {f:?}")))
            })
            .collect::<Result<_>>()?;
        samples.push(Vector::new(values)?);
    }
    SampleSet::new(samples, provenance)
}

pub fn write_samples_csv(set: &SampleSet, path: &Path) -> Result<()> {
    std::fs::write(path, samples_to_csv(set))?;
    Ok(())
}

pub fn read_samples_csv(path: &Path) -> Result<SampleSet> {
    let content = std::fs::read_to_string(path)?;
    samples_from_csv(&content, format!("loaded from {}", path.display()))
}
