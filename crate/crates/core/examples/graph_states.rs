//! Random states `U|0…0⟩` from graph evolutions, and trace moments.

use unigraph::ensemble::{random_graph_state, run_ensemble, Analysis, EnsembleSpec, Source};
use unigraph::entropy::{entanglement, page_mean_entropy};
use unigraph::graph::ring_graph;
use unigraph::sampling::RandomStream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = ring_graph(8, 2)?;
    let psi = random_graph_state(&g, RandomStream::new(5, 0))?;
    let (h, r) = entanglement(&psi, g.dims(), &[1, 2, 3, 4])?;
    println!("ring(8, 2) state: H={h:.4} purity={r:.4} (Page {:.4})", page_mean_entropy(16, 16)?);

    let spec = EnsembleSpec::new(
        Source::Graph(g),
        200,
        5,
        vec![
            Analysis::StateSample { keep: vec![1, 2, 3, 4] },
            Analysis::TraceMoments { max_power: 3 },
        ],
    );
    let report = run_ensemble(&spec)?;
    let s = &report.state_sample[0];
    println!("mean H over {} states: {:.4} ± {:.4}", report.draws, s.entropy.mean, s.entropy.stderr);
    for m in report.trace_moments.unwrap() {
        println!("E|Tr U^{}|² = {:.3} (CUE: {})", m.power, m.abs_sq.mean, m.power);
    }
    Ok(())
}
