//! Time to generate structured matrices against Haar matrices of the same
//! order (generation only, no diagonalization).

use unigraph::ensemble::benchmark_generation;
use unigraph::graph::ring_graph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<22} {:>6} {:>12} {:>12} {:>8}", "graph", "N", "structured s", "CUE s", "rel %");
    for (label, k, n) in [("ring of 8 qubits", 8, 2), ("square, n = 4", 4, 4), ("ring of 6 qutrits", 6, 3)] {
        let t = benchmark_generation(&ring_graph(k, n)?, 50, 1)?;
        println!(
            "{label:<22} {:>6} {:>12.4} {:>12.4} {:>8.1}",
            t.dim,
            t.structured_seconds,
            t.cue_seconds,
            100.0 * t.ratio
        );
    }
    Ok(())
}
