//! Empirical tail diagnostics: exceedance curves, Orlicz-norm estimators,
//! the Hill tail-index estimator, a union-bound maximum-growth check, and
//! the certificate-vs-empirical comparison verdict.
//!
//! The comparison mechanics (binomial slack, testable-grid floor, direction
//! panels) are artifact decisions, not theorems, and reports label them as
//! such through their provenance fields.

use serde::{Deserialize, Serialize};

use crate::certificates::TailCertificate;
use crate::latents::LatentSpec;
use crate::network::FeedForwardNetwork;
use crate::numerics::{RngStream, Vector};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    Mean,
    Median,
}

/// A set of p-dimensional samples with free-text provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    p: usize,
    samples: Vec<Vector>,
    provenance: String,
}

impl SampleSet {
    pub fn new(samples: Vec<Vector>, provenance: impl Into<String>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Domain(
                "sample set needs at least two samples".into(),
            ));
        }
        let p = samples[0].dim();
        if let Some(bad) = samples.iter().position(|s| s.dim() != p) {
            return Err(Error::Shape(format!(
                "sample {bad} has dim {}, expected {p}",
                samples[bad].dim()
            )));
        }
        Ok(Self {
            p,
            samples,
            provenance: provenance.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vector] {
        &self.samples
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn center(&self, centering: Centering) -> Vector {
        let n = self.samples.len() as f64;
        match centering {
            Centering::Mean => {
                let mut acc = vec![0.0; self.p];
                for s in &self.samples {
                    for (a, v) in acc.iter_mut().zip(s.as_slice()) {
                        *a += v;
                    }
                }
                Vector::new(acc.into_iter().map(|a| a / n).collect()).expect("finite")
            }
            Centering::Median => {
                let mut coords: Vec<f64> = Vec::with_capacity(self.samples.len());
                let mut out = Vec::with_capacity(self.p);
                for j in 0..self.p {
                    coords.clear();
                    coords.extend(self.samples.iter().map(|s| s.as_slice()[j]));
                    coords.sort_by(|a, b| a.total_cmp(b));
                    let mid = coords.len() / 2;
                    let median = if coords.len() % 2 == 1 {
                        coords[mid]
                    } else {
                        0.5 * (coords[mid - 1] + coords[mid])
                    };
                    out.push(median);
                }
                Vector::new(out).expect("finite")
            }
        }
    }

    /// Euclidean magnitudes of the centered samples.
    pub fn centered_magnitudes(&self, centering: Centering) -> Vec<f64> {
        let center = self.center(centering);
        self.samples.iter().map(|s| s.sub(&center).norm()).collect()
    }
}

/// Normalized direction, signed projections of the centered samples on it,
/// and whether normalization had to be applied.
fn project(s: &SampleSet, u: &Vector, centering: Centering) -> Result<(Vector, Vec<f64>, bool)> {
    if u.dim() != s.dim() {
        return Err(Error::Shape(format!(
            "direction has dim {}, samples have dim {}",
            u.dim(),
            s.dim()
        )));
    }
    let norm = u.norm();
    if norm == 0.0 {
        return Err(Error::Domain("direction must be nonzero".into()));
    }
    let was_normalized = (norm - 1.0).abs() > 1e-12;
    let unit = u.scale(1.0 / norm);
    let center = s.center(centering);
    let projections = s
        .samples
        .iter()
        .map(|x| unit.dot(&x.sub(&center)))
        .collect();
    Ok((unit, projections, was_normalized))
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("grid must be nonempty".into()));
    }
    if grid[0] < 0.0 {
        return Err(Error::Domain("grid values must be nonnegative".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("grid must be sorted ascending".into()));
    }
    Ok(())
}

fn exceedance_from_sorted(sorted_abs: &[f64], grid: &[f64]) -> Vec<f64> {
    let n = sorted_abs.len() as f64;
    grid.iter()
        .map(|&t| {
            let below = sorted_abs.partition_point(|&v| v < t);
            (sorted_abs.len() - below) as f64 / n
        })
        .collect()
}

/// For each grid `t`, the fraction of samples with `|u^T (x - center)| >= t`.
/// A non-unit `u` is normalized first.
pub fn exceedance_curve(
    s: &SampleSet,
    u: &Vector,
    centering: Centering,
    grid: &[f64],
) -> Result<Vec<f64>> {
    check_grid(grid)?;
    let (_, projections, _) = project(s, u, centering)?;
    let mut abs: Vec<f64> = projections.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| a.total_cmp(b));
    Ok(exceedance_from_sorted(&abs, grid))
}

fn orlicz_estimate(values: &[f64], sub_gaussian: bool) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::Domain(
            "Orlicz estimation needs at least two values".into(),
        ));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "Orlicz input".into(),
            index: i,
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let deviations: Vec<f64> = values.iter().map(|v| (v - mean).abs()).collect();
    let max_dev = deviations.iter().fold(0.0_f64, |a, &d| a.max(d));
    if max_dev == 0.0 {
        return Ok(0.0);
    }
    let criterion = |k: f64| -> f64 {
        let mut acc = 0.0;
        for &d in &deviations {
            let x = d / k;
            acc += if sub_gaussian { (x * x).exp() } else { x.exp() };
        }
        acc / n
    };
    // Bracket the root of `criterion(K) = 2`: criterion is strictly
    // decreasing in K. At hi = 2 max_dev the mean is at most e^{1/4} (resp.
    // e^{1/2}) < 2; lo is small enough that the largest deviation alone
    // pushes the mean above 2.
    let mut hi = 2.0 * max_dev;
    let mut lo = if sub_gaussian {
        0.5 * max_dev / (2.0 * n).ln().sqrt()
    } else {
        0.5 * max_dev / (2.0 * n).ln()
    };
    debug_assert!(criterion(hi) <= 2.0);
    debug_assert!(criterion(lo) > 2.0);
    while (hi - lo) > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if criterion(mid) <= 2.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `K` (to 1e-6 relative) with
/// `mean of exp(((v - mean)/K)^2) <= 2`; 0 for constant input. Finiteness of
/// this norm characterizes sub-Gaussian tails.
pub fn orlicz_psi2_estimate(values: &[f64]) -> Result<f64> {
    orlicz_estimate(values, true)
}

/// Smallest `K` (to 1e-6 relative) with `mean of exp(|v - mean|/K) <= 2`;
/// 0 for constant input. Finiteness characterizes sub-exponential tails.
pub fn orlicz_psi1_estimate(values: &[f64]) -> Result<f64> {
    orlicz_estimate(values, false)
}

/// Hill tail-index estimator on positive magnitudes:
/// `alpha = [ (1/k) sum_{i=1..k} ln(X_(i) / X_(k+1)) ]^{-1}` with descending
/// order statistics. Small values indicate heavy (power-law) tails; an index
/// near 1 is Cauchy-like.
pub fn hill_estimator(values: &[f64], k: usize) -> Result<f64> {
    let n = values.len();
    if k == 0 || k >= n {
        return Err(Error::Domain(format!(
            "hill estimator needs 1 <= k < n, got k = {k}, n = {n}"
        )));
    }
    if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Domain(format!(
            "hill estimator needs positive magnitudes, entry {i} is {}",
            values[i]
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let reference = sorted[k];
    if reference == 0.0 {
        return Err(Error::Domain(
            "hill reference order statistic is zero".into(),
        ));
    }
    let mean_log: f64 = sorted[..k]
        .iter()
        .map(|x| (x / reference).ln())
        .sum::<f64>()
        / k as f64;
    if mean_log <= 0.0 {
        return Err(Error::Domain(
            "hill estimator degenerate: top order statistics are tied".into(),
        ));
    }
    Ok(1.0 / mean_log)
}

/// Default Hill order-statistic count: `n/20` capped at 1000.
pub fn default_hill_k(n: usize) -> usize {
    (n / 20).clamp(1, 1000)
}

/// Result of the maximum-growth check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxGrowthReport {
    pub pass: bool,
    pub max_abs_deviation: f64,
    pub allowance: f64,
    pub n: usize,
    pub delta: f64,
}

/// Union-bound check: with probability `1 - delta`, the maximum of `n`
/// draws from a distribution obeying a sub-Gaussian certificate stays below
/// `quantile(delta / n)`. Heavy-tailed samples grow past this allowance.
pub fn max_growth_check(
    s: &SampleSet,
    u: &Vector,
    cert: &TailCertificate,
    delta: f64,
) -> Result<MaxGrowthReport> {
    if !cert.is_sub_gaussian() {
        return Err(Error::Capability(
            "max growth check applies to sub-Gaussian certificates".into(),
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain("delta must lie in (0, 1)".into()));
    }
    let (_, projections, _) = project(s, u, Centering::Mean)?;
    let max_abs_deviation = projections.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let allowance = cert.quantile(delta / s.len() as f64)?;
    Ok(MaxGrowthReport {
        pass: max_abs_deviation <= allowance,
        max_abs_deviation,
        allowance,
        n: s.len(),
        delta,
    })
}

/// Finite-sample slack for the certificate comparison: a grid point is
/// testable when the bound is at least `min_expected / n`, and a violation
/// requires the empirical exceedance to clear the bound by `z` binomial
/// standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlackRule {
    pub z: f64,
    pub min_expected: f64,
}

impl Default for SlackRule {
    fn default() -> Self {
        Self {
            z: 3.0,
            min_expected: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    ConsistentWithCertificate {
        underpowered: bool,
    },
    Violation {
        t: f64,
        empirical: f64,
        bound: f64,
        slack: f64,
    },
}

impl Verdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, Verdict::Violation { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HillReport {
    pub k: usize,
    pub index_estimate: f64,
}

/// Per-direction empirical tail report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalTailReport {
    pub direction: Vector,
    pub direction_was_normalized: bool,
    pub centering: Centering,
    pub n: usize,
    pub grid: Vec<f64>,
    pub empirical_exceedance: Vec<f64>,
    pub certificate_bound: Vec<f64>,
    pub psi2_estimate: f64,
    pub psi1_estimate: f64,
    pub hill: Option<HillReport>,
    pub verdict: Verdict,
}

/// Compare a sample set against a certificate along one direction.
pub fn compare_to_certificate(
    s: &SampleSet,
    u: &Vector,
    cert: &TailCertificate,
    grid: &[f64],
    slack: &SlackRule,
    centering: Centering,
) -> Result<EmpiricalTailReport> {
    check_grid(grid)?;
    let (unit, projections, direction_was_normalized) = project(s, u, centering)?;
    let n = s.len();

    let mut abs: Vec<f64> = projections.iter().map(|v| v.abs()).collect();
    abs.sort_by(|a, b| a.total_cmp(b));
    let empirical = exceedance_from_sorted(&abs, grid);
    let bounds: Vec<f64> = grid
        .iter()
        .map(|&t| cert.evaluate(t))
        .collect::<Result<_>>()?;

    let floor = slack.min_expected / n as f64;
    let mut verdict = Verdict::ConsistentWithCertificate { underpowered: true };
    let mut worst_excess = 0.0_f64;
    for ((&t, &emp), &bound) in grid.iter().zip(&empirical).zip(&bounds) {
        if bound < floor {
            continue;
        }
        if let Verdict::ConsistentWithCertificate { underpowered } = &mut verdict {
            *underpowered = false;
        }
        let slack_width = slack.z * (bound * (1.0 - bound) / n as f64).sqrt();
        let excess = emp - (bound + slack_width);
        if excess > 0.0 && excess > worst_excess {
            worst_excess = excess;
            verdict = Verdict::Violation {
                t,
                empirical: emp,
                bound,
                slack: slack_width,
            };
        }
    }

    let psi2_estimate = orlicz_psi2_estimate(&projections)?;
    let psi1_estimate = orlicz_psi1_estimate(&projections)?;
    let positive: Vec<f64> = abs.iter().copied().filter(|v| *v > 0.0).collect();
    let k = default_hill_k(positive.len());
    let hill = if positive.len() >= 2 && k < positive.len() {
        hill_estimator(&positive, k)
            .ok()
            .map(|index_estimate| HillReport { k, index_estimate })
    } else {
        None
    };

    Ok(EmpiricalTailReport {
        direction: unit,
        direction_was_normalized,
        centering,
        n,
        grid: grid.to_vec(),
        empirical_exceedance: empirical,
        certificate_bound: bounds,
        psi2_estimate,
        psi1_estimate,
        hill,
        verdict,
    })
}

/// Draw latents and push them through the network.
pub fn pushforward_samples(
    net: &FeedForwardNetwork,
    spec: &LatentSpec,
    rng: &RngStream,
    n: usize,
) -> Result<SampleSet> {
    if spec.dim() != net.input_dim() {
        return Err(Error::Shape(format!(
            "latent dim {} does not match network input dim {}",
            spec.dim(),
            net.input_dim()
        )));
    }
    let latents = spec.sample(rng, n)?;
    let samples: Vec<Vector> = latents
        .iter()
        .map(|z| net.forward(z))
        .collect::<Result<_>>()?;
    SampleSet::new(
        samples,
        format!(
            "pushforward of {} latents through {}-layer network, seed={}/{}",
            n,
            net.depth(),
            rng.seed,
            rng.stream_id
        ),
    )
}

/// Default audit panel: the `p` canonical axes plus `n_random` seeded random
/// unit directions.
pub fn default_direction_panel(p: usize, rng: &RngStream, n_random: usize) -> Vec<Vector> {
    use rand_distr::{Distribution, StandardNormal};
    let mut panel: Vec<Vector> = (0..p).map(|j| Vector::basis(p, j)).collect();
    let mut r = rng.rng();
    while panel.len() < p + n_random {
        let v = Vector::new(
            (0..p)
                .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut r))
                .collect(),
        )
        .expect("finite");
        if let Some(unit) = v.normalized() {
            panel.push(unit);
        }
    }
    panel
}

/// Empirical survival points `(log10 t, log10 P(X >= t))` over the positive
/// observed magnitudes, for log-log tail plots.
pub fn survival_curve(magnitudes: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted: Vec<f64> = magnitudes.iter().copied().filter(|v| *v > 0.0).collect();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut points = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let t = sorted[i];
        // Skip duplicates: survival is evaluated at each distinct magnitude.
        let survival = (sorted.len() - i) as f64 / n;
        points.push((t.log10(), survival.log10()));
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == t {
            j += 1;
        }
        i = j;
    }
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificates::{certify_gaussian, ConstantConfig, ConstantMode};
    use crate::latents::CertificateParams;
    use crate::network::{BoundMethod, LipschitzBound};

    fn scalar_set(values: &[f64]) -> SampleSet {
        SampleSet::new(
            values
                .iter()
                .map(|&v| Vector::new(vec![v]).unwrap())
                .collect(),
            "test",
        )
        .unwrap()
    }

    fn unit_cert(scale_sigma: f64) -> TailCertificate {
        let lip = LipschitzBound {
            value: 1.0,
            per_layer: vec![],
            method: BoundMethod::Min,
        };
        let params = CertificateParams {
            sigma_op_norm: scale_sigma,
            sigma_sqrt_op_norm: scale_sigma.sqrt(),
            cheeger: None,
            gamma: Some(1.0 / scale_sigma),
            ricci_lower: None,
            embedding_lipschitz: None,
        };
        certify_gaussian(
            &lip,
            &params,
            1,
            ConstantMode::Tight,
            &ConstantConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn exceedance_hand_counts() {
        let s = scalar_set(&[-1.0, 0.0, 1.0]);
        let u = Vector::new(vec![1.0]).unwrap();
        let curve = exceedance_curve(&s, &u, Centering::Mean, &[0.5, 2.0]).unwrap();
        assert!((curve[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(curve[1], 0.0);
    }

    #[test]
    fn exceedance_constant_samples() {
        let s = scalar_set(&[3.0, 3.0, 3.0]);
        let u = Vector::new(vec![1.0]).unwrap();
        let curve = exceedance_curve(&s, &u, Centering::Mean, &[0.001, 1.0]).unwrap();
        assert_eq!(curve, vec![0.0, 0.0]);
    }

    #[test]
    fn exceedance_rejects_unsorted_grid() {
        let s = scalar_set(&[0.0, 1.0]);
        let u = Vector::new(vec![1.0]).unwrap();
        assert!(exceedance_curve(&s, &u, Centering::Mean, &[1.0, 0.5]).is_err());
    }

    #[test]
    fn psi2_constant_is_zero() {
        assert_eq!(orlicz_psi2_estimate(&[5.0, 5.0, 5.0]).unwrap(), 0.0);
    }

    #[test]
    fn psi2_balanced_rademacher() {
        let mut values = vec![1.0; 500];
        values.extend(vec![-1.0; 500]);
        let expected = 1.0 / 2.0_f64.ln().sqrt();
        let got = orlicz_psi2_estimate(&values).unwrap();
        assert!((got - expected).abs() < 1e-5, "got {got}, want {expected}");
    }

    #[test]
    fn psi1_balanced_rademacher() {
        let mut values = vec![1.0; 500];
        values.extend(vec![-1.0; 500]);
        let expected = 1.0 / 2.0_f64.ln();
        let got = orlicz_psi1_estimate(&values).unwrap();
        assert!((got - expected).abs() < 1e-5, "got {got}, want {expected}");
    }

    #[test]
    fn psi_estimators_scale_equivariant() {
        let values = [0.3, -1.2, 2.4, 0.7, -0.9, 1.1];
        let c = 3.7;
        let scaled: Vec<f64> = values.iter().map(|v| c * v).collect();
        let p2 = orlicz_psi2_estimate(&values).unwrap();
        let p2s = orlicz_psi2_estimate(&scaled).unwrap();
        assert!((p2s - c * p2).abs() <= 1e-6 * p2s.abs());
        let p1 = orlicz_psi1_estimate(&values).unwrap();
        let p1s = orlicz_psi1_estimate(&scaled).unwrap();
        assert!((p1s - c * p1).abs() <= 1e-6 * p1s.abs());
    }

    #[test]
    fn hill_hand_case() {
        let got = hill_estimator(&[8.0, 4.0, 2.0, 1.0], 3).unwrap();
        let expected = 1.0 / (2.0 * 2.0_f64.ln());
        assert!((got - expected).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn hill_scale_invariant() {
        let values = [8.0, 4.0, 2.0, 1.0, 0.5, 0.25];
        let a = hill_estimator(&values, 3).unwrap();
        let scaled: Vec<f64> = values.iter().map(|v| 17.0 * v).collect();
        let b = hill_estimator(&scaled, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hill_rejects_bad_inputs() {
        assert!(hill_estimator(&[1.0, 2.0], 2).is_err());
        assert!(hill_estimator(&[1.0, -2.0, 3.0], 1).is_err());
        assert!(hill_estimator(&[2.0, 2.0, 2.0, 2.0], 2).is_err());
    }

    #[test]
    fn max_growth_constant_passes() {
        let s = scalar_set(&[1.0, 1.0]);
        let u = Vector::new(vec![1.0]).unwrap();
        let report = max_growth_check(&s, &u, &unit_cert(1.0), 0.01).unwrap();
        assert!(report.pass);
        assert_eq!(report.max_abs_deviation, 0.0);
    }

    #[test]
    fn compare_consistent_on_underpowered_grid() {
        let s = scalar_set(&[-0.1, 0.0, 0.1, 0.05]);
        let u = Vector::new(vec![1.0]).unwrap();
        // Grid far beyond the data: every bound is below 10/n.
        let cert = unit_cert(0.001);
        let report = compare_to_certificate(
            &s,
            &u,
            &cert,
            &[5.0, 10.0],
            &SlackRule::default(),
            Centering::Mean,
        )
        .unwrap();
        match report.verdict {
            Verdict::ConsistentWithCertificate { underpowered } => assert!(underpowered),
            other => panic!("expected consistent verdict, got {other:?}"),
        }
    }

    #[test]
    fn compare_flags_heavy_tail() {
        // Deterministic Pareto-like magnitudes against a tiny sub-Gaussian
        // scale: gross violation at moderate t.
        let n = 2000;
        let values: Vec<f64> = (0..n)
            .map(|i| {
                let u = (i as f64 + 0.5) / n as f64;
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign / u
            })
            .collect();
        let s = scalar_set(&values);
        let u = Vector::new(vec![1.0]).unwrap();
        let cert = unit_cert(1.0);
        let grid: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let report = compare_to_certificate(
            &s,
            &u,
            &cert,
            &grid,
            &SlackRule::default(),
            Centering::Median,
        )
        .unwrap();
        assert!(
            report.verdict.is_violation(),
            "verdict {:?}",
            report.verdict
        );
    }

    #[test]
    fn direction_panel_size_and_unit_norm() {
        let panel = default_direction_panel(3, &RngStream::new(8, 0), 5);
        assert_eq!(panel.len(), 8);
        for u in &panel {
            assert!((u.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_unit_direction_is_normalized_and_flagged() {
        let s = scalar_set(&[-1.0, 1.0]);
        let u = Vector::new(vec![2.0]).unwrap();
        let report = compare_to_certificate(
            &s,
            &u,
            &unit_cert(1.0),
            &[0.0, 1.0],
            &SlackRule::default(),
            Centering::Mean,
        )
        .unwrap();
        assert!(report.direction_was_normalized);
        assert!((report.direction.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn survival_curve_drops_zeros_and_duplicates() {
        let points = survival_curve(&[0.0, 1.0, 1.0, 10.0]);
        assert_eq!(points.len(), 2);
        // At t = 1: survival 3/3 = 1 -> log10 = 0.
        assert!((points[0].0 - 0.0).abs() < 1e-12);
        assert!((points[0].1 - 0.0).abs() < 1e-12);
        // At t = 10: survival 1/3.
        assert!((points[1].0 - 1.0).abs() < 1e-12);
        assert!((points[1].1 - (1.0f64 / 3.0).log10()).abs() < 1e-12);
    }
}
