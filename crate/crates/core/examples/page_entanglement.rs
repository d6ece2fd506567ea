//! Entanglement of eigenvectors of the crossed-square graph
//! `(W₁₂ ⊗ W₃₄)(V₁₃ ⊗ V₂₄)` across {1,2}|{3,4}, compared with the
//! random-state mean `ln N_A − (N_A − 1)/(2 N_B)`.

use unigraph::ensemble::{run_ensemble, Analysis, EnsembleSpec, Source};
use unigraph::entropy::page_mean_entropy;
use unigraph::graph::presets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>3} {:>6} {:>10} {:>10} {:>10} {:>10}", "n", "N", "H mean", "Page", "purity", "mean R");
    for n in [2, 3, 4] {
        let spec = EnsembleSpec::new(
            Source::Graph(presets::crossed_square(n)?),
            if n < 4 { 200 } else { 40 },
            17,
            vec![Analysis::Entanglement { keep: vec![1, 2] }],
        );
        let r = run_ensemble(&spec)?;
        let e = &r.entanglement[0];
        println!(
            "{n:>3} {:>6} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            r.dim,
            e.entropy.mean,
            page_mean_entropy(n * n, n * n)?,
            e.purity.mean,
            e.purity_reference
        );
    }
    Ok(())
}
