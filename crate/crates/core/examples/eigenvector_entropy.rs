//! Shannon entropy of eigenvectors: CUE against structured graphs of the same
//! order, with the random-vector mean `Σ_{j=2}^N 1/j`.

use unigraph::ensemble::{run_ensemble, Analysis, EnsembleSpec, Source};
use unigraph::graph::{chain_graph, presets, ring_graph};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sources = [
        ("CUE 64", Source::Cue(64)),
        ("ring(6, 2)", Source::Graph(ring_graph(6, 2)?)),
        ("chain(6, 2)", Source::Graph(chain_graph(6, 2)?)),
        ("six-qubit triangle", Source::Graph(presets::triangle_with_pendants(2)?)),
        ("diagonal 64", Source::Diagonal(64)),
    ];
    println!("{:<20} {:>10} {:>10} {:>10}", "source", "mean H_ev", "stderr", "reference");
    for (name, source) in sources {
        let r = run_ensemble(&EnsembleSpec::new(source, 200, 3, vec![Analysis::EvecEntropy]))?;
        let e = r.evec_entropy.unwrap();
        println!("{name:<20} {:>10.4} {:>10.4} {:>10.4}", e.entropy.mean, e.entropy.stderr, e.reference);
    }
    Ok(())
}
