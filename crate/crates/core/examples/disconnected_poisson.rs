//! A disconnected graph factorizes: `U = U_A ⊗ U_B`, so its phases are the
//! sums `θ_i + φ_j` and the spacings drift towards Poisson as the blocks grow.

use unigraph::ensemble::{run_ensemble, Analysis, EnsembleSpec, Source};
use unigraph::graph::presets;
use unigraph::sampling::RandomStream;
use unigraph::spectral::eigendecompose;
use unigraph::tensor::{component_evolutions, evolution_unitary};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = presets::disjoint_pairs(3)?;
    let stream = RandomStream::new(1, 0);
    let u = evolution_unitary(&g, stream)?;
    let parts = component_evolutions(&g, stream)?;
    let mut sums = vec![0.0];
    for (members, block) in &parts {
        println!("component {members:?}: order {}", block.dim());
        let phases = eigendecompose(block)?.phases().to_vec();
        sums = sums.iter().flat_map(|a| phases.iter().map(move |b| a + b)).collect();
    }
    let mut sums: Vec<f64> = sums.iter().map(|t| t.rem_euclid(std::f64::consts::TAU)).collect();
    sums.sort_by(f64::total_cmp);
    let direct = eigendecompose(&u)?;
    let err = direct
        .phases()
        .iter()
        .zip(&sums)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("max |phase − phase sum| = {err:.2e}");

    println!("{:>4} {:>6} {:>9} {:>8} {:>8}", "n", "N", "variance", "KS_P", "KS_W");
    for n in [2, 3, 4] {
        let spec = EnsembleSpec::new(
            Source::Graph(presets::disjoint_pairs(n)?),
            40_000 / (n * n * n * n) as u64,
            9,
            vec![Analysis::Spacing],
        );
        let r = run_ensemble(&spec)?;
        let s = r.spacing.unwrap();
        println!("{n:>4} {:>6} {:>9.4} {:>8.4} {:>8.4}", r.dim, s.variance, s.ks_poisson, s.ks_wigner);
    }
    Ok(())
}
