//! Eigenphases, nearest-neighbour spacings, reference spacing laws and
//! distribution distances.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::linalg;
use crate::quadrature;
use crate::sampling::UnitaryMatrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error("eigensolver did not converge")]
    ConvergenceFailure,
    #[error("eigenpair residual {residual:e} exceeds {limit:e}")]
    ResidualTooLarge { residual: f64, limit: f64 },
    #[error("spacings need at least two phases, got {0}")]
    FewerThanTwoPhases(usize),
    #[error("negative argument {0}")]
    NegativeArgument(f64),
    #[error("empty sample")]
    EmptySample,
    #[error("need at least {needed} phases for {bins} bins, got {got}")]
    InsufficientData { needed: usize, got: usize, bins: usize },
}

/// Eigenvalues closer than this on the unit circle are treated as one
/// degenerate cluster and get an orthonormal eigenbasis.
const CLUSTER_TOL: f64 = 1e-9;

/// Sorted eigenphases in `[0, 2π)` with matching unit eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    phases: Vec<f64>,
    vectors: Mat<c64>,
}

impl SpectralData {
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Column `j` is the eigenvector of `phases()[j]`.
    pub fn vectors(&self) -> MatRef<'_, c64> {
        self.vectors.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    /// `V · diag(e^{iθ}) · V†`.
    pub fn reconstruct(&self) -> Mat<c64> {
        let mut scaled = self.vectors.clone();
        for (j, &t) in self.phases.iter().enumerate() {
            let z = c64::cis(t);
            for i in 0..scaled.nrows() {
                scaled[(i, j)] *= z;
            }
        }
        linalg::mul(scaled.as_ref(), self.vectors.adjoint())
    }

    /// Largest `‖U v_j − e^{iθ_j} v_j‖₂` over all columns.
    pub fn max_residual(&self, u: &UnitaryMatrix) -> f64 {
        let uv = linalg::mul(u.as_ref(), self.vectors.as_ref());
        (0..self.dim())
            .map(|j| {
                let z = c64::cis(self.phases[j]);
                (0..self.dim())
                    .map(|i| (uv[(i, j)] - z * self.vectors[(i, j)]).norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

fn phase_of(z: c64) -> f64 {
    let t = z.arg().rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

fn normalize_column(m: &mut Mat<c64>, j: usize) {
    let norm = (0..m.nrows()).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for i in 0..m.nrows() {
            m[(i, j)] /= norm;
        }
    }
}

/// Groups of sorted positions whose eigenvalues are within `CLUSTER_TOL`,
/// merging across the 0/2π seam.
fn degenerate_clusters(phases: &[f64]) -> Vec<Vec<usize>> {
    let n = phases.len();
    let close = |a: f64, b: f64| (c64::cis(a) - c64::cis(b)).norm() < CLUSTER_TOL;
    let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..n {
        if close(phases[i - 1], phases[i]) {
            clusters.last_mut().unwrap().push(i);
        } else {
            clusters.push(vec![i]);
        }
    }
    if clusters.len() > 1 && close(phases[n - 1], phases[0]) {
        let mut last = clusters.pop().unwrap();
        last.append(&mut clusters[0]);
        clusters[0] = last;
    }
    clusters.retain(|c| c.len() > 1);
    clusters
}

/// Full eigensystem of a unitary matrix, sorted by phase.
///
/// Degenerate eigenvalue clusters get an orthonormal basis of their
/// eigenspace from the null space of `U − λI`, so the eigenvector matrix is
/// unitary even for matrices such as `I` or tensor products with repeated
/// phases.
pub fn eigendecompose(u: &UnitaryMatrix) -> Result<SpectralData, SpectralError> {
    let n = u.dim();
    let (values, raw) = linalg::eigen(u.as_ref()).map_err(|_| SpectralError::ConvergenceFailure)?;
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(SpectralError::ConvergenceFailure);
    }
    let mut order: Vec<usize> = (0..n).collect();
    let raw_phases: Vec<f64> = values.iter().map(|&v| phase_of(v)).collect();
    order.sort_by(|&a, &b| raw_phases[a].total_cmp(&raw_phases[b]));
    let mut phases: Vec<f64> = order.iter().map(|&i| raw_phases[i]).collect();
    let mut vectors = Mat::<c64>::from_fn(n, n, |i, j| raw[(i, order[j])]);
    for j in 0..n {
        normalize_column(&mut vectors, j);
    }

    for cluster in degenerate_clusters(&phases) {
        let m = cluster.len();
        let mut center = cluster.iter().fold(c64::new(0.0, 0.0), |acc, &j| acc + c64::cis(phases[j]));
        center /= center.norm();
        let mut shifted = u.as_ref().to_owned();
        for i in 0..n {
            shifted[(i, i)] -= center;
        }
        let (_, right) = linalg::svd_right(shifted.as_ref()).map_err(|_| SpectralError::ConvergenceFailure)?;
        // smallest singular values sit in the trailing columns
        let basis = right.as_ref().subcols(n - m, m);
        let projected = linalg::mul(linalg::mul(basis.adjoint(), u.as_ref()).as_ref(), basis);
        for (slot, &j) in cluster.iter().enumerate() {
            for i in 0..n {
                vectors[(i, j)] = basis[(i, slot)];
            }
            phases[j] = phase_of(projected[(slot, slot)]);
        }
    }

    // cluster refinement may reorder nearly equal phases
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]));
    let data = SpectralData {
        phases: order.iter().map(|&i| phases[i]).collect(),
        vectors: Mat::from_fn(n, n, |i, j| vectors[(i, order[j])]),
    };
    let limit = 1e-9 * n as f64;
    let residual = data.max_residual(u);
    if residual.is_nan() || residual > limit {
        return Err(SpectralError::ResidualTooLarge { residual, limit });
    }
    Ok(data)
}

/// Whether the wrap-around gap `θ₁ + 2π − θ_N` is part of the sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WrapGap {
    /// All `N` circular gaps; the mean spacing is exactly 1.
    #[default]
    Include,
    /// Only the `N − 1` interior gaps.
    Exclude,
}

/// Unfolded nearest-neighbour spacings.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacingSample {
    spacings: Vec<f64>,
}

impl SpacingSample {
    pub fn as_slice(&self) -> &[f64] {
        &self.spacings
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.spacings
    }

    pub fn len(&self) -> usize {
        self.spacings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spacings.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.spacings.iter().sum::<f64>() / self.spacings.len() as f64
    }
}

/// `S_i = N/(2π) · (θ_{i+1} − θ_i)` over the sorted phases, including the
/// circular wrap gap. Phases are expected in `[0, 2π)`.
pub fn spacings(phases: &[f64]) -> Result<SpacingSample, SpectralError> {
    spacings_with(phases, WrapGap::Include)
}

pub fn spacings_with(phases: &[f64], wrap: WrapGap) -> Result<SpacingSample, SpectralError> {
    let n = phases.len();
    if n < 2 {
        return Err(SpectralError::FewerThanTwoPhases(n));
    }
    let mut sorted;
    let phases = if phases.windows(2).all(|w| w[0] <= w[1]) {
        phases
    } else {
        sorted = phases.to_vec();
        sorted.sort_by(f64::total_cmp);
        &sorted[..]
    };
    let scale = n as f64 / TAU;
    let mut out: Vec<f64> = phases.windows(2).map(|w| (w[1] - w[0]) * scale).collect();
    if wrap == WrapGap::Include {
        out.push((phases[0] + TAU - phases[n - 1]) * scale);
    }
    Ok(SpacingSample { spacings: out })
}

/// Wigner surmise for CUE spacings, `(32/π²) S² exp(−4S²/π)`.
pub fn wigner_pdf(s: f64) -> Result<f64, SpectralError> {
    if s < 0.0 {
        return Err(SpectralError::NegativeArgument(s));
    }
    Ok(32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp())
}

/// Poisson spacing density `exp(−S)`.
pub fn poisson_pdf(s: f64) -> Result<f64, SpectralError> {
    if s < 0.0 {
        return Err(SpectralError::NegativeArgument(s));
    }
    Ok((-s).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Wigner,
    Poisson,
}

/// Beyond this the Wigner density is below `1e-180`; the CDF is 1 there.
const WIGNER_SUPPORT: f64 = 12.0;

/// Cumulative spacing probability. The Wigner branch integrates the density
/// adaptively to absolute error `1e-10`; Poisson uses `1 − e^{−S}`.
pub fn reference_cdf(which: Reference, s: f64) -> Result<f64, SpectralError> {
    if s < 0.0 {
        return Err(SpectralError::NegativeArgument(s));
    }
    Ok(match which {
        Reference::Poisson => -(-s).exp_m1(),
        Reference::Wigner => {
            let upper = s.min(WIGNER_SUPPORT);
            let density = |x: f64| 32.0 / (PI * PI) * x * x * (-4.0 * x * x / PI).exp();
            quadrature::integrate(density, 0.0, upper, 1e-10).min(1.0)
        }
    })
}

/// Two-sided Kolmogorov–Smirnov distance `sup |F_n − F|`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64, SpectralError> {
    if sample.is_empty() {
        return Err(SpectralError::EmptySample);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// KS distance against one of the reference spacing laws.
pub fn ks_against(sample: &[f64], which: Reference) -> Result<f64, SpectralError> {
    ks_statistic(sample, |s| reference_cdf(which, s.max(0.0)).expect("non-negative argument"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of binned phases against the uniform density on
/// `[0, 2π)`.
pub fn phase_uniformity(phases: &[f64], bins: usize) -> Result<ChiSquareTest, SpectralError> {
    let needed = 10 * bins;
    if bins < 2 || phases.len() < needed {
        return Err(SpectralError::InsufficientData {
            needed: needed.max(20),
            got: phases.len(),
            bins,
        });
    }
    let mut counts = vec![0u64; bins];
    for &t in phases {
        let b = ((t.rem_euclid(TAU) / TAU) * bins as f64) as usize;
        counts[b.min(bins - 1)] += 1;
    }
    let expected = phases.len() as f64 / bins as f64;
    let statistic: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = bins - 1;
    let p_value = ChiSquared::new(dof as f64).expect("positive dof").sf(statistic);
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value,
    })
}

/// Fixed-width histogram with a separate tally of values beyond the upper
/// edge (or below the lower one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    lo: f64,
    hi: f64,
    counts: Vec<u64>,
    overflow: u64,
}

impl Histogram {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Self {
        assert!(bins > 0 && hi > lo, "histogram needs bins > 0 and hi > lo");
        Self {
            lo,
            hi,
            counts: vec![0; bins],
            overflow: 0,
        }
    }

    /// 50 bins on `[0, 4]`.
    pub fn for_spacings() -> Self {
        Self::new(0.0, 4.0, 50)
    }

    pub fn add(&mut self, x: f64) {
        if !(x >= self.lo && x < self.hi) {
            self.overflow += 1;
            return;
        }
        let b = ((x - self.lo) / self.bin_width()) as usize;
        let last = self.counts.len() - 1;
        self.counts[b.min(last)] += 1;
    }

    pub fn extend<I: IntoIterator<Item = f64>>(&mut self, xs: I) {
        for x in xs {
            self.add(x);
        }
    }

    /// Adds another histogram with identical binning.
    pub fn merge(&mut self, other: &Histogram) {
        assert!(
            self.lo == other.lo && self.hi == other.hi && self.counts.len() == other.counts.len(),
            "merging histograms with different binning"
        );
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..=self.counts.len()).map(|i| self.lo + i as f64 * w).collect()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }

    /// Counts divided by `total · bin_width`, so the in-range mass equals the
    /// in-range fraction.
    pub fn density(&self) -> Vec<f64> {
        let total = self.total();
        if total == 0 {
            return vec![0.0; self.counts.len()];
        }
        let norm = total as f64 * self.bin_width();
        self.counts.iter().map(|&c| c as f64 / norm).collect()
    }

    /// `bin_left,bin_right,count,density` rows plus a trailing
    /// `overflow,,count,` row.
    pub fn to_csv(&self) -> String {
        let edges = self.edges();
        let mut out = String::from("bin_left,bin_right,count,density\n");
        for (i, (&c, d)) in self.counts.iter().zip(self.density()).enumerate() {
            writeln!(out, "{},{},{},{}", edges[i], edges[i + 1], c, d).unwrap();
        }
        writeln!(out, "overflow,,{},", self.overflow).unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_spectrum() {
        let u = UnitaryMatrix::from_phases(&[0.0, PI / 2.0]);
        let s = eigendecompose(&u).unwrap();
        assert!((s.phases()[0] - 0.0).abs() < 1e-14);
        assert!((s.phases()[1] - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn identity_has_zero_phases_and_unitary_basis() {
        let u = UnitaryMatrix::identity(6);
        let s = eigendecompose(&u).unwrap();
        assert!(s.phases().iter().all(|&t| t.abs() < 1e-12 || (TAU - t) < 1e-12));
        let v = UnitaryMatrix::checked(s.vectors().to_owned());
        assert!(v.is_ok());
    }

    #[test]
    fn spacing_examples() {
        assert_eq!(spacings(&[0.0, PI]).unwrap().as_slice(), &[1.0, 1.0]);
        let four = spacings(&[0.0, PI / 2.0, PI, 1.5 * PI]).unwrap();
        for s in four.as_slice() {
            assert!((s - 1.0).abs() < 1e-15);
        }
        assert_eq!(spacings(&[1.0]), Err(SpectralError::FewerThanTwoPhases(1)));
        let strict = spacings_with(&[0.0, 1.0, 2.0], WrapGap::Exclude).unwrap();
        assert_eq!(strict.len(), 2);
    }

    #[test]
    fn wigner_values() {
        assert_eq!(wigner_pdf(0.0).unwrap(), 0.0);
        // (32/π²)·e^{−4/π}
        assert!((wigner_pdf(1.0).unwrap() - 0.907_589_2).abs() < 1e-7);
        assert_eq!(wigner_pdf(-0.1), Err(SpectralError::NegativeArgument(-0.1)));
        let peak = PI.sqrt() / 2.0;
        let h = 1e-4;
        assert!(wigner_pdf(peak).unwrap() > wigner_pdf(peak - h).unwrap());
        assert!(wigner_pdf(peak).unwrap() > wigner_pdf(peak + h).unwrap());
        assert_eq!(poisson_pdf(0.0).unwrap(), 1.0);
    }

    #[test]
    fn reference_cdf_edges() {
        assert_eq!(reference_cdf(Reference::Wigner, 0.0).unwrap(), 0.0);
        assert!((reference_cdf(Reference::Wigner, 50.0).unwrap() - 1.0).abs() < 1e-8);
        assert!((reference_cdf(Reference::Poisson, 2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        assert!(reference_cdf(Reference::Poisson, -1.0).is_err());
    }

    #[test]
    fn ks_examples() {
        let median = 2f64.ln();
        let d = ks_against(&[median], Reference::Poisson).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        let far = ks_against(&[30.0; 10], Reference::Poisson).unwrap();
        assert!(far > 1.0 - 1e-12);
        assert_eq!(ks_against(&[], Reference::Wigner), Err(SpectralError::EmptySample));
    }

    #[test]
    fn uniformity_examples() {
        let bins = 8;
        let even: Vec<f64> = (0..800).map(|i| (i as f64 + 0.5) * TAU / 800.0).collect();
        let t = phase_uniformity(&even, bins).unwrap();
        assert_eq!(t.statistic, 0.0);
        assert!((t.p_value - 1.0).abs() < 1e-12);

        let lumped = vec![0.01; 800];
        assert!(phase_uniformity(&lumped, bins).unwrap().p_value < 1e-100);
        assert!(matches!(phase_uniformity(&lumped[..79], bins), Err(SpectralError::InsufficientData { .. })));
    }

    #[test]
    fn histogram_mass_and_csv() {
        let mut h = Histogram::new(0.0, 1.0, 4);
        h.extend([0.1, 0.3, 0.3, 0.9, 1.5]);
        let mass: f64 = h.density().iter().map(|d| d * h.bin_width()).sum();
        assert!((mass - 0.8).abs() < 1e-15);
        let csv = h.to_csv();
        assert!(csv.starts_with("bin_left,bin_right,count,density\n0,0.25,1,"));
        assert!(csv.ends_with("overflow,,1,\n"));
        let mut other = Histogram::new(0.0, 1.0, 4);
        other.add(0.6);
        h.merge(&other);
        assert_eq!(h.counts(), &[1, 2, 1, 1]);
    }
}
