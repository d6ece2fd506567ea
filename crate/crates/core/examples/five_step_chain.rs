//! Chains of six particles, one pair per step: closer to Wigner than to
//! Poisson, with visible deviations for qubits.

use unigraph::ensemble::{run_ensemble, Analysis, EnsembleSpec, Source};
use unigraph::graph::chain_graph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, draws) in [(2, 1000), (3, 40)] {
        let g = chain_graph(6, n)?;
        let r = run_ensemble(&EnsembleSpec::new(Source::Graph(g), draws, 6, vec![Analysis::Spacing]))?;
        let s = r.spacing.unwrap();
        println!(
            "n={n} N={:>4}: variance {:.4}  KS Wigner {:.4}  KS Poisson {:.4}",
            r.dim, s.variance, s.ks_wigner, s.ks_poisson
        );
    }
    Ok(())
}
