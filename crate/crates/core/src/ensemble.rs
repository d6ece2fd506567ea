//! Monte Carlo campaigns over structured or reference ensembles.
//!
//! Draw `t` always uses `RandomStream::new(master_seed, t)`. Per-draw results
//! are collected by draw index and reduced in that order, so a report does
//! not depend on how the draws were split across threads.

use std::collections::BTreeMap;
use std::ops::Range;
use std::time::Instant;

use faer::{c64, Mat};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{self, ProjectionWeighting};
use crate::graph::InteractionGraph;
use crate::sampling::{self, RandomStream, UnitaryMatrix};
use crate::spectral::{self, ChiSquareTest, Histogram, Reference, SpectralData, WrapGap};
use crate::tensor::{self, TensorError, DEFAULT_DIM_CAP};

#[derive(Debug, thiserror::Error)]
pub enum EnsembleError {
    #[error("invalid ensemble spec: {0}")]
    InvalidSpec(String),
    #[error("analysis {analysis} is incompatible with the source: {reason}")]
    IncompatibleAnalysis { analysis: String, reason: String },
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error("draw {draw} failed: {source}")]
    Draw {
        draw: u64,
        #[source]
        source: Box<crate::Error>,
    },
}

/// What each draw produces.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Graph(InteractionGraph),
    /// Haar unitaries of the given order.
    Cue(usize),
    /// `P₁ X P₂ X†` of the given order.
    Composed(usize),
    /// Diagonal unitaries with uniform phases.
    Diagonal(usize),
}

impl Source {
    pub fn dim(&self) -> usize {
        match self {
            Source::Graph(g) => g.total_dim(),
            Source::Cue(n) | Source::Composed(n) | Source::Diagonal(n) => *n,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Source::Graph(g) => format!("graph(dims={:?}, layers={})", g.dims(), g.layers().len()),
            Source::Cue(n) => format!("cue({n})"),
            Source::Composed(n) => format!("composed({n})"),
            Source::Diagonal(n) => format!("diagonal({n})"),
        }
    }

    fn graph(&self) -> Option<&InteractionGraph> {
        match self {
            Source::Graph(g) => Some(g),
            _ => None,
        }
    }

    /// The draw's unitary.
    pub fn sample(&self, stream: RandomStream, dim_cap: usize) -> crate::Result<UnitaryMatrix> {
        Ok(match self {
            Source::Graph(g) => tensor::evolution_unitary_with_cap(g, stream, dim_cap)?,
            Source::Cue(n) => sampling::haar_unitary(*n, stream)?,
            Source::Composed(n) => sampling::sample_composed(*n, stream)?,
            Source::Diagonal(n) => sampling::random_phases_diagonal(*n, stream)?,
        })
    }
}

/// Per-draw statistic requested from a campaign. Particle labels are
/// 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Spacing,
    PhaseDensity { bins: usize },
    EvecEntropy,
    /// Eigenvector entanglement across `keep | rest`.
    Entanglement { keep: Vec<usize> },
    ElementEntropy,
    /// Eigenvectors projected onto each basis state of `particle`, then
    /// entanglement across `keep | rest` of the remaining particles.
    Projection { particle: usize, keep: Vec<usize> },
    TraceMoments { max_power: usize },
    /// The state `U|0…0⟩` and its entanglement across `keep | rest`.
    StateSample { keep: Vec<usize> },
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Spacing => "spacing",
            Analysis::PhaseDensity { .. } => "phase_density",
            Analysis::EvecEntropy => "evec_entropy",
            Analysis::Entanglement { .. } => "entanglement",
            Analysis::ElementEntropy => "element_entropy",
            Analysis::Projection { .. } => "projection",
            Analysis::TraceMoments { .. } => "trace_moments",
            Analysis::StateSample { .. } => "state_sample",
        }
    }

    fn needs_spectrum(&self) -> bool {
        !matches!(self, Analysis::ElementEntropy | Analysis::StateSample { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleOptions {
    pub wrap: WrapGap,
    pub projection_weighting: ProjectionWeighting,
    pub dim_cap: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            wrap: WrapGap::Include,
            projection_weighting: ProjectionWeighting::Weighted,
            dim_cap: DEFAULT_DIM_CAP,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub source: Source,
    pub draws: u64,
    pub master_seed: u64,
    pub analyses: Vec<Analysis>,
    pub options: EnsembleOptions,
}

impl EnsembleSpec {
    pub fn new(source: Source, draws: u64, master_seed: u64, analyses: Vec<Analysis>) -> Self {
        Self {
            source,
            draws,
            master_seed,
            analyses,
            options: EnsembleOptions::default(),
        }
    }

    pub fn with_options(mut self, options: EnsembleOptions) -> Self {
        self.options = options;
        self
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.draws == 0 {
            return Err(EnsembleError::InvalidSpec("draws must be at least 1".into()));
        }
        let dim = self.source.dim();
        if dim == 0 {
            return Err(EnsembleError::InvalidSpec("dimension must be at least 1".into()));
        }
        if dim > self.options.dim_cap {
            return Err(EnsembleError::DimensionCapExceeded {
                dim,
                cap: self.options.dim_cap,
            });
        }
        for analysis in &self.analyses {
            self.validate_analysis(analysis)?;
        }
        Ok(())
    }

    fn validate_analysis(&self, analysis: &Analysis) -> Result<(), EnsembleError> {
        let incompatible = |reason: String| EnsembleError::IncompatibleAnalysis {
            analysis: analysis.name().to_string(),
            reason,
        };
        let dim = self.source.dim();
        let graph = || {
            self.source
                .graph()
                .ok_or_else(|| incompatible("needs a graph source with particle structure".into()))
        };
        let check_bipartition = |keep: &[usize], particles: &[usize]| {
            if keep.is_empty() || keep.iter().any(|p| !particles.contains(p)) {
                return Err(incompatible(format!("keep set {keep:?} must be drawn from {particles:?}")));
            }
            let mut sorted = keep.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != keep.len() || sorted.len() >= particles.len() {
                return Err(incompatible(format!("keep set {keep:?} is not a proper subset of {particles:?}")));
            }
            Ok(())
        };
        match analysis {
            Analysis::Spacing if dim < 2 => Err(incompatible("spacings need N >= 2".into())),
            Analysis::PhaseDensity { bins } if *bins < 2 => Err(incompatible("need at least 2 bins".into())),
            Analysis::TraceMoments { max_power } if *max_power == 0 => {
                Err(incompatible("max_power must be at least 1".into()))
            }
            Analysis::Entanglement { keep } | Analysis::StateSample { keep } => {
                let g = graph()?;
                let all: Vec<usize> = (1..=g.particle_count()).collect();
                check_bipartition(keep, &all)
            }
            Analysis::Projection { particle, keep } => {
                let g = graph()?;
                let k = g.particle_count();
                if *particle == 0 || *particle > k {
                    return Err(incompatible(format!("particle {particle} not in 1..={k}")));
                }
                if k < 3 {
                    return Err(incompatible(format!("projection needs at least 3 particles, system has {k}")));
                }
                let remaining: Vec<usize> = (1..=k).filter(|p| p != particle).collect();
                check_bipartition(keep, &remaining)
            }
            _ => Ok(()),
        }
    }
}

/// Mean, standard error and sample variance of per-draw values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarStat {
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
    pub variance: f64,
}

impl ScalarStat {
    pub fn from_values(values: &[f64]) -> Self {
        let count = values.len();
        let n = count as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = if count > 1 {
            values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Self {
            count,
            mean,
            stderr: (variance / n).sqrt(),
            variance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingReport {
    pub wrap: WrapGap,
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    /// Spread of the per-draw spacing variances.
    pub per_draw_variance: ScalarStat,
    pub ks_wigner: f64,
    pub ks_poisson: f64,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDensityReport {
    pub count: usize,
    pub bins: usize,
    pub chi_square: ChiSquareTest,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvecEntropyReport {
    pub entropy: ScalarStat,
    /// Random-vector mean `Σ_{j=2}^N 1/j`.
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub keep: Vec<usize>,
    pub dim_keep: usize,
    pub dim_rest: usize,
    pub entropy: ScalarStat,
    pub purity: ScalarStat,
    pub page_reference: f64,
    pub purity_reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementEntropyReport {
    pub entropy: ScalarStat,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub particle: usize,
    pub keep: Vec<usize>,
    pub weighting: ProjectionWeighting,
    pub entropy: ScalarStat,
    pub purity: ScalarStat,
    pub page_reference: f64,
    pub purity_reference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceMomentReport {
    pub power: usize,
    pub re: ScalarStat,
    pub im: ScalarStat,
    pub abs_sq: ScalarStat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSampleReport {
    pub keep: Vec<usize>,
    pub entropy: ScalarStat,
    pub purity: ScalarStat,
    /// Per-draw entanglement entropies, in draw order.
    pub entropies: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

/// Aggregated campaign results, one optional block per analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub source: String,
    pub dim: usize,
    pub draws: u64,
    pub master_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing: Option<SpacingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_density: Option<PhaseDensityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evec_entropy: Option<EvecEntropyReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub entanglement: Vec<EntanglementReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub element_entropy: Option<ElementEntropyReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub projection: Vec<ProjectionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_moments: Option<Vec<TraceMomentReport>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub state_sample: Vec<StateSampleReport>,
    pub timing: Timing,
}

impl EnsembleReport {
    /// The report with timing zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            timing: Timing::default(),
            ..self.clone()
        }
    }

    /// Histograms by analysis name, for CSV emission.
    pub fn histograms(&self) -> Vec<(&'static str, &Histogram)> {
        let mut out = Vec::new();
        if let Some(s) = &self.spacing {
            out.push(("spacing", &s.histogram));
        }
        if let Some(p) = &self.phase_density {
            out.push(("phase_density", &p.histogram));
        }
        if let Some(e) = &self.element_entropy {
            out.push(("element_entropy", &e.histogram));
        }
        out
    }
}

/// Everything one draw contributes, slot-aligned with `spec.analyses`.
#[derive(Debug, Clone, PartialEq)]
enum DrawValue {
    Spacing { spacings: Vec<f64>, variance: f64 },
    Phases(Vec<f64>),
    Scalar(f64),
    Pair(f64, f64),
    Moments(Vec<c64>),
}

#[derive(Debug, Clone, PartialEq)]
struct DrawResult {
    values: Vec<DrawValue>,
}

/// Per-draw results for a subset of draws. Merging is a keyed union, so any
/// partition of the draws merges to the same report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialReport {
    draws: BTreeMap<u64, DrawResult>,
    wall_seconds: f64,
}

impl PartialReport {
    pub fn merge(mut self, other: PartialReport) -> PartialReport {
        self.draws.extend(other.draws);
        self.wall_seconds += other.wall_seconds;
        self
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }
}

/// Exact `Tr(U^m)` for `m = 1..=max_power` from the eigenphases.
pub fn trace_moments_from_phases(phases: &[f64], max_power: usize) -> Vec<c64> {
    (1..=max_power)
        .map(|m| phases.iter().map(|&t| c64::cis(m as f64 * t)).sum())
        .collect()
}

/// Exact `Tr(U^m)` for `m = 1..=max_power`.
pub fn trace_moments(u: &UnitaryMatrix, max_power: usize) -> Result<Vec<c64>, spectral::SpectralError> {
    let spec = spectral::eigendecompose(u)?;
    Ok(trace_moments_from_phases(spec.phases(), max_power))
}

/// `U |0…0⟩` for the graph's evolution under `stream`, computed by applying
/// the layers to the basis vector. Equal to column 0 of
/// [`tensor::evolution_unitary`] for the same stream.
pub fn random_graph_state(graph: &InteractionGraph, stream: RandomStream) -> Result<Vec<c64>, TensorError> {
    let n = graph.total_dim();
    let mut state = Mat::<c64>::zeros(n, 1);
    state[(0, 0)] = c64::new(1.0, 0.0);
    tensor::apply_evolution(graph, stream, &mut state)?;
    Ok((0..n).map(|i| state[(i, 0)]).collect())
}

fn eigen_columns(spec: &SpectralData) -> impl Iterator<Item = Vec<c64>> + '_ {
    let v = spec.vectors();
    (0..v.ncols()).map(move |j| (0..v.nrows()).map(|i| v[(i, j)]).collect())
}

fn run_draw(spec: &EnsembleSpec, draw: u64) -> crate::Result<DrawResult> {
    let stream = RandomStream::new(spec.master_seed, draw);
    let u = spec.source.sample(stream, spec.options.dim_cap)?;
    let spectrum = if spec.analyses.iter().any(Analysis::needs_spectrum) {
        Some(spectral::eigendecompose(&u)?)
    } else {
        None
    };
    let dims = spec.source.graph().map(|g| g.dims().to_vec());
    let mut values = Vec::with_capacity(spec.analyses.len());
    for analysis in &spec.analyses {
        let value = match analysis {
            Analysis::Spacing => {
                let s = spectral::spacings_with(spectrum.as_ref().unwrap().phases(), spec.options.wrap)?;
                let variance = ScalarStat::from_values(s.as_slice()).variance;
                DrawValue::Spacing {
                    spacings: s.into_vec(),
                    variance,
                }
            }
            Analysis::PhaseDensity { .. } => DrawValue::Phases(spectrum.as_ref().unwrap().phases().to_vec()),
            Analysis::EvecEntropy => DrawValue::Scalar(entropy::eigenvector_entropy(spectrum.as_ref().unwrap())),
            Analysis::ElementEntropy => DrawValue::Scalar(entropy::element_entropy(&u)),
            Analysis::Entanglement { keep } => {
                let dims = dims.as_deref().unwrap();
                let (mut h, mut r, mut n) = (0.0, 0.0, 0.0);
                for col in eigen_columns(spectrum.as_ref().unwrap()) {
                    let (eh, er) = entropy::entanglement(&col, dims, keep)?;
                    h += eh;
                    r += er;
                    n += 1.0;
                }
                DrawValue::Pair(h / n, r / n)
            }
            Analysis::Projection { particle, keep } => {
                let dims = dims.as_deref().unwrap();
                let (mut h, mut r, mut n) = (0.0, 0.0, 0.0);
                for col in eigen_columns(spectrum.as_ref().unwrap()) {
                    if let Some((eh, er)) =
                        entropy::projected_entanglement(&col, dims, *particle, keep, spec.options.projection_weighting)?
                    {
                        h += eh;
                        r += er;
                        n += 1.0;
                    }
                }
                DrawValue::Pair(h / n, r / n)
            }
            Analysis::TraceMoments { max_power } => {
                DrawValue::Moments(trace_moments_from_phases(spectrum.as_ref().unwrap().phases(), *max_power))
            }
            Analysis::StateSample { keep } => {
                let dims = dims.as_deref().unwrap();
                let state: Vec<c64> = (0..u.dim()).map(|i| u.get(i, 0)).collect();
                let (h, r) = entropy::entanglement(&state, dims, keep)?;
                DrawValue::Pair(h, r)
            }
        };
        values.push(value);
    }
    Ok(DrawResult { values })
}

fn with_workers<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(job),
        None => job(),
    }
}

/// Runs draws `range` of the campaign. Fails on the first failing draw.
pub fn run_draws(spec: &EnsembleSpec, range: Range<u64>) -> Result<PartialReport, EnsembleError> {
    spec.validate()?;
    let start = Instant::now();
    let results: Vec<(u64, crate::Result<DrawResult>)> = with_workers(spec.options.workers, || {
        range.into_par_iter().map(|t| (t, run_draw(spec, t))).collect()
    });
    let mut draws = BTreeMap::new();
    for (t, result) in results {
        let result = result.map_err(|e| EnsembleError::Draw {
            draw: t,
            source: Box::new(e),
        })?;
        draws.insert(t, result);
    }
    Ok(PartialReport {
        draws,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Reduces per-draw results into the report.
pub fn finalize(spec: &EnsembleSpec, partial: PartialReport) -> Result<EnsembleReport, EnsembleError> {
    if partial.draws.len() as u64 != spec.draws || partial.draws.keys().next_back() != Some(&(spec.draws - 1)) {
        return Err(EnsembleError::InvalidSpec(format!(
            "expected draws 0..{}, have {} results",
            spec.draws,
            partial.draws.len()
        )));
    }
    let dim = spec.source.dim();
    let mut report = EnsembleReport {
        source: spec.source.label(),
        dim,
        draws: spec.draws,
        master_seed: spec.master_seed,
        spacing: None,
        phase_density: None,
        evec_entropy: None,
        entanglement: Vec::new(),
        element_entropy: None,
        projection: Vec::new(),
        trace_moments: None,
        state_sample: Vec::new(),
        timing: Timing {
            wall_seconds: partial.wall_seconds,
        },
    };
    let column = |slot: usize| partial.draws.values().map(move |d| &d.values[slot]);
    let scalars = |slot: usize| -> Vec<f64> {
        column(slot)
            .map(|v| match v {
                DrawValue::Scalar(x) => *x,
                _ => unreachable!("scalar slot"),
            })
            .collect()
    };
    let pairs = |slot: usize| -> (ScalarStat, ScalarStat, Vec<f64>) {
        let (a, b): (Vec<f64>, Vec<f64>) = column(slot)
            .map(|v| match v {
                DrawValue::Pair(x, y) => (*x, *y),
                _ => unreachable!("pair slot"),
            })
            .unzip();
        (ScalarStat::from_values(&a), ScalarStat::from_values(&b), a)
    };
    let bipartition_dims = |keep: &[usize], skip: Option<usize>| -> (usize, usize) {
        let dims = spec.source.graph().unwrap().dims();
        let mut kept = 1;
        let mut rest = 1;
        for (p, &d) in dims.iter().enumerate() {
            if Some(p + 1) == skip {
                continue;
            }
            if keep.contains(&(p + 1)) {
                kept *= d;
            } else {
                rest *= d;
            }
        }
        (kept, rest)
    };
    let page = |a: usize, b: usize| entropy::page_mean_entropy(a.min(b), a.max(b)).unwrap_or(f64::NAN);

    for (slot, analysis) in spec.analyses.iter().enumerate() {
        match analysis {
            Analysis::Spacing => {
                let mut pooled = Vec::new();
                let mut variances = Vec::new();
                for v in column(slot) {
                    if let DrawValue::Spacing { spacings, variance } = v {
                        pooled.extend_from_slice(spacings);
                        variances.push(*variance);
                    }
                }
                // sorting first makes the pooled sums independent of draw order
                pooled.sort_by(f64::total_cmp);
                let stat = ScalarStat::from_values(&pooled);
                let mut histogram = Histogram::for_spacings();
                histogram.extend(pooled.iter().copied());
                let ks = |r| spectral::ks_against(&pooled, r).expect("non-empty pooled sample");
                report.spacing = Some(SpacingReport {
                    wrap: spec.options.wrap,
                    count: pooled.len(),
                    mean: stat.mean,
                    variance: stat.variance,
                    per_draw_variance: ScalarStat::from_values(&variances),
                    ks_wigner: ks(Reference::Wigner),
                    ks_poisson: ks(Reference::Poisson),
                    histogram,
                });
            }
            Analysis::PhaseDensity { bins } => {
                let pooled: Vec<f64> = column(slot)
                    .flat_map(|v| match v {
                        DrawValue::Phases(p) => p.iter().copied(),
                        _ => unreachable!("phase slot"),
                    })
                    .collect();
                let chi_square = spectral::phase_uniformity(&pooled, *bins).map_err(|e| {
                    EnsembleError::IncompatibleAnalysis {
                        analysis: analysis.name().into(),
                        reason: e.to_string(),
                    }
                })?;
                let mut histogram = Histogram::new(0.0, std::f64::consts::TAU, *bins);
                histogram.extend(pooled.iter().copied());
                report.phase_density = Some(PhaseDensityReport {
                    count: pooled.len(),
                    bins: *bins,
                    chi_square,
                    histogram,
                });
            }
            Analysis::EvecEntropy => {
                report.evec_entropy = Some(EvecEntropyReport {
                    entropy: ScalarStat::from_values(&scalars(slot)),
                    reference: entropy::mean_random_vector_entropy(dim),
                });
            }
            Analysis::ElementEntropy => {
                let values = scalars(slot);
                let upper = if dim > 1 { (dim as f64).ln() } else { 1.0 };
                let mut histogram = Histogram::new(0.0, upper * (1.0 + 1e-12), 50);
                histogram.extend(values.iter().copied());
                report.element_entropy = Some(ElementEntropyReport {
                    entropy: ScalarStat::from_values(&values),
                    histogram,
                });
            }
            Analysis::Entanglement { keep } => {
                let (entropy, purity, _) = pairs(slot);
                let (a, b) = bipartition_dims(keep, None);
                report.entanglement.push(EntanglementReport {
                    keep: keep.clone(),
                    dim_keep: a,
                    dim_rest: b,
                    entropy,
                    purity,
                    page_reference: page(a, b),
                    purity_reference: entropy::mean_purity(a, b),
                });
            }
            Analysis::Projection { particle, keep } => {
                let (entropy, purity, _) = pairs(slot);
                let (a, b) = bipartition_dims(keep, Some(*particle));
                report.projection.push(ProjectionReport {
                    particle: *particle,
                    keep: keep.clone(),
                    weighting: spec.options.projection_weighting,
                    entropy,
                    purity,
                    page_reference: page(a, b),
                    purity_reference: entropy::mean_purity(a, b),
                });
            }
            Analysis::TraceMoments { max_power } => {
                let moments: Vec<&Vec<c64>> = column(slot)
                    .map(|v| match v {
                        DrawValue::Moments(m) => m,
                        _ => unreachable!("moment slot"),
                    })
                    .collect();
                let per_power = (0..*max_power)
                    .map(|m| {
                        let pick = |f: fn(c64) -> f64| moments.iter().map(|ms| f(ms[m])).collect::<Vec<_>>();
                        TraceMomentReport {
                            power: m + 1,
                            re: ScalarStat::from_values(&pick(|z| z.re)),
                            im: ScalarStat::from_values(&pick(|z| z.im)),
                            abs_sq: ScalarStat::from_values(&pick(|z| z.norm_sqr())),
                        }
                    })
                    .collect();
                report.trace_moments = Some(per_power);
            }
            Analysis::StateSample { keep } => {
                let (entropy, purity, entropies) = pairs(slot);
                report.state_sample.push(StateSampleReport {
                    keep: keep.clone(),
                    entropy,
                    purity,
                    entropies,
                });
            }
        }
    }
    Ok(report)
}

/// Runs every draw and aggregates.
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<EnsembleReport, EnsembleError> {
    let partial = run_draws(spec, 0..spec.draws)?;
    finalize(spec, partial)
}

/// Generation wall-clock for structured versus direct Haar matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTimings {
    pub dim: usize,
    pub draws: u64,
    pub structured_seconds: f64,
    pub cue_seconds: f64,
    /// `structured_seconds / cue_seconds`.
    pub ratio: f64,
}

/// Times the generation (not diagonalization) of `draws` structured matrices
/// of `graph` against `draws` Haar matrices of the same order, both on the
/// calling thread.
pub fn benchmark_generation(graph: &InteractionGraph, draws: u64, seed: u64) -> Result<BenchmarkTimings, EnsembleError> {
    if draws == 0 {
        return Err(EnsembleError::InvalidSpec("draws must be at least 1".into()));
    }
    let dim = graph.total_dim();
    let fail = |t: u64, e: crate::Error| EnsembleError::Draw {
        draw: t,
        source: Box::new(e),
    };
    let start = Instant::now();
    for t in 0..draws {
        let u = tensor::evolution_unitary_with_cap(graph, RandomStream::new(seed, t), usize::MAX)
            .map_err(|e| fail(t, e.into()))?;
        std::hint::black_box(u);
    }
    let structured_seconds = start.elapsed().as_secs_f64();
    let start = Instant::now();
    for t in 0..draws {
        let u = sampling::haar_unitary(dim, RandomStream::new(seed ^ 0xC0E, t)).map_err(|e| fail(t, e.into()))?;
        std::hint::black_box(u);
    }
    let cue_seconds = start.elapsed().as_secs_f64();
    Ok(BenchmarkTimings {
        dim,
        draws,
        structured_seconds,
        cue_seconds,
        ratio: structured_seconds / cue_seconds,
    })
}
