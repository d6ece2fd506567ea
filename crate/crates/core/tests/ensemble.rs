use unigraph::ensemble::{
    self, benchmark_generation, random_graph_state, run_draws, run_ensemble, trace_moments, Analysis, EnsembleError,
    EnsembleOptions, EnsembleSpec, Source,
};
use unigraph::entropy::entanglement;
use unigraph::graph::{presets, ring_graph};
use unigraph::sampling::{haar_unitary, RandomStream};
use unigraph::spectral::{eigendecompose, spacings};
use unigraph::c64;

fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
}

#[test]
fn reports_are_reproducible_across_workers_and_partitions() {
    let spec = EnsembleSpec::new(
        Source::Graph(presets::three_chain([2, 3, 2]).unwrap()),
        24,
        11,
        vec![
            Analysis::Spacing,
            Analysis::PhaseDensity { bins: 4 },
            Analysis::EvecEntropy,
            Analysis::Projection {
                particle: 2,
                keep: vec![1],
            },
            Analysis::StateSample { keep: vec![3] },
        ],
    );
    let reference = run_ensemble(&spec).unwrap().without_timing();
    for workers in [1, 3] {
        let s = spec.clone().with_options(EnsembleOptions {
            workers: Some(workers),
            ..Default::default()
        });
        assert_eq!(run_ensemble(&s).unwrap().without_timing(), reference);
    }
    let parts = [0..7, 7..8, 8..20, 20..24].map(|r| run_draws(&spec, r).unwrap());
    let [a, b, c, d] = parts;
    let merged = ensemble::finalize(&spec, d.merge(b).merge(a.merge(c))).unwrap();
    assert_eq!(merged.without_timing(), reference);
    let s = reference.spacing.unwrap();
    assert_eq!(s.count, 24 * 12);
    assert!((s.mean - 1.0).abs() < 1e-9);
}

#[test]
fn incomplete_partials_are_rejected() {
    let spec = EnsembleSpec::new(Source::Cue(3), 4, 0, vec![Analysis::Spacing]);
    let partial = run_draws(&spec, 0..3).unwrap();
    assert!(ensemble::finalize(&spec, partial).is_err());
}

#[test]
fn diagonal_source_is_poissonian() {
    let report = run_ensemble(&EnsembleSpec::new(Source::Diagonal(200), 200, 5, vec![Analysis::Spacing])).unwrap();
    let s = report.spacing.unwrap();
    // N uniform points on a circle: Var S = (N − 1)/(N + 1)
    assert!((s.variance - 199.0 / 201.0).abs() < 0.03, "{}", s.variance);
    assert!(s.ks_poisson < s.ks_wigner);
}

#[test]
fn tensor_product_spacing_matches_direct_phase_sums() {
    // two 9-dimensional blocks: the spectrum is {θ_i + φ_j}
    let draws = 300;
    let report = run_ensemble(&EnsembleSpec::new(
        Source::Graph(presets::disjoint_pairs(3).unwrap()),
        draws,
        21,
        vec![Analysis::Spacing],
    ))
    .unwrap();
    let mut pooled = Vec::new();
    for t in 0..draws {
        let a = eigendecompose(&haar_unitary(9, RandomStream::new(777, 2 * t)).unwrap()).unwrap();
        let b = eigendecompose(&haar_unitary(9, RandomStream::new(777, 2 * t + 1)).unwrap()).unwrap();
        let sums: Vec<f64> = a
            .phases()
            .iter()
            .flat_map(|x| b.phases().iter().map(move |y| (x + y).rem_euclid(std::f64::consts::TAU)))
            .collect();
        pooled.extend(spacings(&sums).unwrap().into_vec());
    }
    let oracle = variance(&pooled);
    let got = report.spacing.unwrap().variance;
    assert!((got - oracle).abs() < 0.04, "ensemble {got} vs direct {oracle}");
    assert!(oracle < 0.9, "finite tensor products are not yet Poissonian: {oracle}");
}

#[test]
fn cue_trace_moments() {
    let draws = 1000;
    let report = run_ensemble(&EnsembleSpec::new(
        Source::Cue(16),
        draws,
        8,
        vec![Analysis::TraceMoments { max_power: 3 }],
    ))
    .unwrap();
    let moments = report.trace_moments.unwrap();
    for m in &moments {
        assert!(m.re.mean.abs() < 4.0 * m.re.stderr);
        assert!(m.im.mean.abs() < 4.0 * m.im.stderr);
        // E|Tr U^m|² = min(m, N)
        assert!((m.abs_sq.mean - m.power as f64).abs() < 5.0 * m.abs_sq.stderr, "{m:?}");
    }
    let one = haar_unitary(5, RandomStream::new(1, 1)).unwrap();
    let direct: c64 = (0..5).map(|i| one.get(i, i)).sum();
    assert!((trace_moments(&one, 1).unwrap()[0] - direct).norm() < 1e-12);
}

#[test]
fn two_qubit_graph_states_are_haar_distributed() {
    let draws = 2000;
    let graph = presets::two_particle(2).unwrap();
    let mut structured = Vec::new();
    let mut direct = Vec::new();
    for t in 0..draws {
        let psi = random_graph_state(&graph, RandomStream::new(31, t)).unwrap();
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        structured.push(entanglement(&psi, &[2, 2], &[1]).unwrap().0);
        let u = haar_unitary(4, RandomStream::new(32, t)).unwrap();
        let phi: Vec<c64> = (0..4).map(|i| u.get(i, 0)).collect();
        direct.push(entanglement(&phi, &[2, 2], &[1]).unwrap().0);
    }
    // 0.1% critical value of the two-sample KS statistic
    let critical = 1.95 * (2.0 / draws as f64).sqrt();
    let d = two_sample_ks(&structured, &direct);
    assert!(d < critical, "D={d} critical={critical}");

    let report = run_ensemble(&EnsembleSpec::new(
        Source::Graph(graph),
        draws,
        31,
        vec![Analysis::StateSample { keep: vec![1] }],
    ))
    .unwrap();
    assert_eq!(report.state_sample[0].entropies, structured);
}

#[test]
fn invalid_campaigns_fail_before_drawing() {
    let two = Source::Graph(presets::two_particle(2).unwrap());
    let proj = EnsembleSpec::new(two, 3, 0, vec![Analysis::Projection { particle: 2, keep: vec![1] }]);
    assert!(matches!(run_ensemble(&proj), Err(EnsembleError::IncompatibleAnalysis { .. })));
    let capped = EnsembleSpec::new(Source::Graph(ring_graph(6, 2).unwrap()), 1, 0, vec![]).with_options(
        EnsembleOptions {
            dim_cap: 32,
            ..Default::default()
        },
    );
    assert!(matches!(
        run_ensemble(&capped),
        Err(EnsembleError::DimensionCapExceeded { dim: 64, cap: 32 })
    ));
}

#[test]
fn generation_time_grows_with_ring_size() {
    let times: Vec<f64> = [4, 6, 8]
        .iter()
        .map(|&k| {
            benchmark_generation(&ring_graph(k, 2).unwrap(), 100, 3)
                .unwrap()
                .structured_seconds
        })
        .collect();
    assert!(times[0] < times[1] && times[1] < times[2], "{times:?}");
}
