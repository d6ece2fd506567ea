//! Element entropy: additivity under tensor products, and the broader,
//! lower distribution for structured matrices than for CUE.

use unigraph::ensemble::{run_ensemble, Analysis, EnsembleSpec, Source};
use unigraph::entropy::element_entropy;
use unigraph::graph::chain_graph;
use unigraph::sampling::{haar_unitary, RandomStream};
use unigraph::tensor::kron;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = haar_unitary(4, RandomStream::new(1, 0))?;
    let b = haar_unitary(8, RandomStream::new(1, 1))?;
    let ab = kron(&a, &b)?;
    println!(
        "H(A⊗B) − H(A) − H(B) = {:.2e}",
        element_entropy(&ab) - element_entropy(&a) - element_entropy(&b)
    );

    for (name, source) in [("chain(6, 2)", Source::Graph(chain_graph(6, 2)?)), ("CUE 64", Source::Cue(64))] {
        let r = run_ensemble(&EnsembleSpec::new(source, 1000, 2, vec![Analysis::ElementEntropy]))?;
        let e = r.element_entropy.unwrap();
        println!("{name:<12} mean {:.4}  variance {:.3e}", e.entropy.mean, e.entropy.variance);
    }
    Ok(())
}
