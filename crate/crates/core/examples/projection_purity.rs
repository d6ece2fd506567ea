//! Eigenvectors of the three-particle chain `(W₁₂ ⊗ W₃)(V₁ ⊗ V₂₃)` projected
//! onto basis states of the middle particle. The purity of the remaining
//! pair does not depend on the middle dimension.

use unigraph::ensemble::{run_ensemble, Analysis, EnsembleOptions, EnsembleSpec, Source};
use unigraph::entropy::{mean_purity, ProjectionWeighting};
use unigraph::graph::presets;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("reference mean purity for 3 x 3: {:.4}", mean_purity(3, 3));
    println!("{:>4} {:>12} {:>12}", "N_B", "weighted", "unweighted");
    for nb in 2..=5 {
        let mut row = Vec::new();
        for weighting in [ProjectionWeighting::Weighted, ProjectionWeighting::Unweighted] {
            let spec = EnsembleSpec::new(
                Source::Graph(presets::three_chain([3, nb, 3])?),
                150,
                nb as u64,
                vec![Analysis::Projection {
                    particle: 2,
                    keep: vec![1],
                }],
            )
            .with_options(EnsembleOptions {
                projection_weighting: weighting,
                ..Default::default()
            });
            row.push(run_ensemble(&spec)?.projection[0].purity.mean);
        }
        println!("{nb:>4} {:>12.4} {:>12.4}", row[0], row[1]);
    }
    Ok(())
}
