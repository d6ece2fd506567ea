//! End-to-end statistical checks at desk scale. Each test prints one
//! `PASS`/`FAIL` line with the measured values before asserting.

use std::f64::consts::PI;
use std::sync::OnceLock;

use unigraph::ensemble::{self, Analysis, EnsembleReport, EnsembleSpec, Source};
use unigraph::entropy::{element_entropy, mean_purity, mean_random_vector_entropy};
use unigraph::graph::{chain_graph, presets, ring_graph};
use unigraph::quadrature::integrate;
use unigraph::sampling::{haar_unitary, RandomStream};
use unigraph::spectral::{eigendecompose, reference_cdf, wigner_pdf, Reference};
use unigraph::tensor::{component_evolutions, evolution_unitary, kron};

fn verdict(id: u32, title: &str, pass: bool, detail: String) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {id:>2}: {title}: {detail}");
}

fn run(source: Source, draws: u64, seed: u64, analyses: Vec<Analysis>) -> EnsembleReport {
    ensemble::run_ensemble(&EnsembleSpec::new(source, draws, seed, analyses)).expect("ensemble runs")
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

#[test]
fn criterion_01_wigner_reference_moments() {
    let start = std::time::Instant::now();
    let pdf = |s: f64| wigner_pdf(s).unwrap();
    let mass = integrate(pdf, 0.0, 12.0, 1e-13);
    let mean = integrate(|s| s * pdf(s), 0.0, 12.0, 1e-13);
    let second = integrate(|s| s * s * pdf(s), 0.0, 12.0, 1e-13);
    let variance = second - mean * mean;
    let target = 3.0 * PI / 8.0 - 1.0;
    let cdf_tail = reference_cdf(Reference::Wigner, 50.0).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = within(mass, 1.0, 1e-8)
        && within(mean, 1.0, 1e-8)
        && within(variance, target, 1e-6)
        && within(cdf_tail, 1.0, 1e-8)
        && elapsed < 1.0;
    verdict(
        1,
        "Wigner quadrature",
        pass,
        format!("mass={mass:.12} mean={mean:.12} var={variance:.9} (target {target:.9}) in {elapsed:.3}s"),
    );
    assert!(pass);
}

struct ConnectedRuns {
    two_particle: EnsembleReport,
    six_particle: EnsembleReport,
}

fn connected_runs() -> &'static ConnectedRuns {
    static RUNS: OnceLock<ConnectedRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let analyses = vec![Analysis::Spacing, Analysis::PhaseDensity { bins: 32 }];
        ConnectedRuns {
            two_particle: run(
                Source::Graph(presets::two_particle(10).unwrap()),
                1000,
                0x2B,
                analyses.clone(),
            ),
            six_particle: run(
                Source::Graph(presets::triangle_with_pendants(2).unwrap()),
                1500,
                0x3F,
                analyses,
            ),
        }
    })
}

#[test]
fn criterion_02_connected_graphs_follow_wigner() {
    let runs = connected_runs();
    let mut all = true;
    for (label, report) in [("two-particle n=10", &runs.two_particle), ("six-qubit", &runs.six_particle)] {
        let s = report.spacing.as_ref().unwrap();
        let pass = within(s.variance, 0.178, 0.015) && s.ks_wigner < s.ks_poisson && s.ks_wigner <= 0.015;
        all &= pass;
        verdict(
            2,
            &format!("connected {label} (N={}, T={})", report.dim, report.draws),
            pass,
            format!(
                "var={:.4} ks_wigner={:.4} ks_poisson={:.4} mean={:.6}",
                s.variance, s.ks_wigner, s.ks_poisson, s.mean
            ),
        );
    }
    assert!(all);
}

#[test]
fn criterion_03_disconnected_graph_is_poissonian() {
    let graph = presets::disjoint_pairs(4).unwrap();
    let report = run(Source::Graph(graph.clone()), 400, 0x3A, vec![Analysis::Spacing]);
    let s = report.spacing.as_ref().unwrap();

    let mut worst = 0.0f64;
    for t in 0..400 {
        let stream = RandomStream::new(0x3A, t);
        let u = evolution_unitary(&graph, stream).unwrap();
        let phases = eigendecompose(&u).unwrap().phases().to_vec();
        let parts = component_evolutions(&graph, stream).unwrap();
        let mut combined = vec![0.0];
        for (_, block) in &parts {
            let local = eigendecompose(block).unwrap().phases().to_vec();
            combined = combined.iter().flat_map(|a| local.iter().map(move |b| a + b)).collect();
        }
        assert_eq!(combined.len(), phases.len());
        let circ = |a: f64, b: f64| {
            let d = (a - b).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d)
        };
        let nearest = |x: f64, set: &[f64]| set.iter().map(|&y| circ(x, y)).fold(f64::INFINITY, f64::min);
        for &p in &phases {
            worst = worst.max(nearest(p, &combined));
        }
        for &c in &combined {
            worst = worst.max(nearest(c, &phases));
        }
    }
    let pass = within(s.variance, 1.0, 0.1) && s.ks_poisson < s.ks_wigner && worst <= 1e-9;
    verdict(
        3,
        "disjoint pairs n=4 (N=256, T=400)",
        pass,
        format!(
            "var={:.4} ks_poisson={:.4} ks_wigner={:.4} factorization error={worst:.2e}",
            s.variance, s.ks_poisson, s.ks_wigner
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_cue_eigenvector_entropy() {
    let report = run(Source::Cue(64), 200, 0x40, vec![Analysis::EvecEntropy]);
    let e = report.evec_entropy.as_ref().unwrap();
    // Σ_{j=2}^{64} 1/j, summed independently of the library
    let target: f64 = (2..=64).map(|j| 1.0 / j as f64).sum();
    assert!((mean_random_vector_entropy(64) - target).abs() < 1e-14);
    let pass = (e.entropy.mean - target).abs() <= 0.01 * target;
    verdict(
        4,
        "CUE N=64 eigenvector entropy (T=200)",
        pass,
        format!("mean={:.5} ± {:.5} target={target:.5}", e.entropy.mean, e.entropy.stderr),
    );
    assert!(pass);
}

#[test]
fn criterion_05_page_entanglement_of_eigenvectors() {
    let report = run(
        Source::Graph(presets::crossed_square(4).unwrap()),
        200,
        0x55,
        vec![Analysis::Entanglement { keep: vec![1, 2] }],
    );
    let e = &report.entanglement[0];
    let target = 0.5 * 256f64.ln() - 0.5;
    let pass = (e.entropy.mean - target).abs() <= 0.02 * target;
    verdict(
        5,
        "crossed square n=4 entanglement {1,2}|{3,4} (T=200)",
        pass,
        format!("mean={:.5} ± {:.5} target={target:.5}", e.entropy.mean, e.entropy.stderr),
    );
    assert!(pass);
}

#[test]
fn criterion_06_projected_purity_independent_of_centre() {
    let target = 6.0 / 10.0;
    assert!((mean_purity(3, 3) - target).abs() < 1e-15);
    let mut means = Vec::new();
    let mut pass = true;
    for nb in [2, 3, 4] {
        let report = run(
            Source::Graph(presets::three_chain([3, nb, 3]).unwrap()),
            300,
            0x60 + nb as u64,
            vec![Analysis::Projection {
                particle: 2,
                keep: vec![1],
            }],
        );
        let p = &report.projection[0];
        let ok = (p.purity.mean - target).abs() <= 0.03 * target;
        pass &= ok;
        means.push(p.purity.mean);
        verdict(
            6,
            &format!("three-chain [3,{nb},3] projected purity (T=300)"),
            ok,
            format!("mean={:.5} ± {:.5} target={target}", p.purity.mean, p.purity.stderr),
        );
    }
    let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mutual = hi - lo <= 0.03 * lo;
    verdict(
        6,
        "projected purity spread across centre dimensions",
        mutual,
        format!("means={means:.5?} relative spread={:.4}", (hi - lo) / lo),
    );
    assert!(pass && mutual);
}

#[test]
fn criterion_07_element_entropy_is_additive() {
    let mut worst = 0.0f64;
    for t in 0..200 {
        let a = haar_unitary(4, RandomStream::new(0x70, 2 * t)).unwrap();
        let b = haar_unitary(8, RandomStream::new(0x70, 2 * t + 1)).unwrap();
        let ab = kron(&a, &b).unwrap();
        worst = worst.max((element_entropy(&ab) - element_entropy(&a) - element_entropy(&b)).abs());
    }
    let pass = worst <= 1e-10;
    verdict(7, "element entropy additivity (200 pairs, 4 and 8)", pass, format!("max defect={worst:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_08_structured_element_entropy_is_broader_and_lower() {
    let structured = run(
        Source::Graph(chain_graph(6, 2).unwrap()),
        2000,
        0x80,
        vec![Analysis::ElementEntropy],
    );
    let cue = run(Source::Cue(64), 2000, 0x81, vec![Analysis::ElementEntropy]);
    let s = &structured.element_entropy.as_ref().unwrap().entropy;
    let c = &cue.element_entropy.as_ref().unwrap().entropy;
    let pass = s.variance > c.variance && s.mean < c.mean;
    verdict(
        8,
        "chain(6,2) vs CUE 64 element entropy (T=2000)",
        pass,
        format!(
            "structured mean={:.5} var={:.3e}; CUE mean={:.5} var={:.3e}",
            s.mean, s.variance, c.mean, c.variance
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_09_composed_ensemble_spacing() {
    let report = run(Source::Composed(100), 1000, 0x90, vec![Analysis::Spacing]);
    let s = report.spacing.as_ref().unwrap();
    let pass = within(s.variance, 0.178, 0.02);
    verdict(
        9,
        "composed P1 X P2 X† N=100 (T=1000)",
        pass,
        format!("var={:.4} ks_wigner={:.4} ks_poisson={:.4}", s.variance, s.ks_wigner, s.ks_poisson),
    );
    assert!(pass);
}

#[test]
fn criterion_10_five_step_chain_is_closer_to_wigner() {
    let report = run(Source::Graph(chain_graph(6, 2).unwrap()), 2000, 0xA0, vec![Analysis::Spacing]);
    let s = report.spacing.as_ref().unwrap();
    let pass = s.ks_wigner < s.ks_poisson;
    verdict(
        10,
        "chain(6,2) spacing (T=2000)",
        pass,
        format!("ks_wigner={:.4} ks_poisson={:.4} var={:.4}", s.ks_wigner, s.ks_poisson, s.variance),
    );
    assert!(pass);
}

#[test]
fn criterion_11_phase_density_is_uniform() {
    let runs = connected_runs();
    let mut all = true;
    for (label, report) in [("two-particle n=10", &runs.two_particle), ("six-qubit", &runs.six_particle)] {
        let p = report.phase_density.as_ref().unwrap();
        let pass = p.bins == 32 && p.chi_square.p_value > 0.01;
        all &= pass;
        verdict(
            11,
            &format!("phase density of {label}"),
            pass,
            format!(
                "count={} chi2={:.2} dof={} p={:.4}",
                p.count, p.chi_square.statistic, p.chi_square.dof, p.chi_square.p_value
            ),
        );
    }
    assert!(all);
}

#[test]
fn criterion_12_structured_generation_is_faster() {
    let graph = ring_graph(8, 2).unwrap();
    let t = ensemble::benchmark_generation(&graph, 100, 0xC0).unwrap();
    let pass = t.dim == 256 && t.ratio < 1.0;
    verdict(
        12,
        "ring of 8 qubits generation time (T=100)",
        pass,
        format!(
            "structured={:.4}s CUE={:.4}s ratio={:.1}%",
            t.structured_seconds,
            t.cue_seconds,
            100.0 * t.ratio
        ),
    );
    assert!(pass);
}
