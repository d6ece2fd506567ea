//! Building interaction graphs: builders, presets, bond/vertex conversion and
//! JSON specs.

use unigraph::graph::{self, presets, InteractionGraph};

fn describe(name: &str, g: &InteractionGraph) {
    println!("{name}: k={} dims={:?} N={}", g.particle_count(), g.dims(), g.total_dim());
    for layer in g.layers() {
        let cliques: Vec<String> = layer.cliques().iter().map(ToString::to_string).collect();
        println!("  {:>6}: {}", layer.color(), cliques.join(" "));
    }
    let comps: Vec<Vec<usize>> = g.components().iter().map(|c| c.iter().map(|p| p + 1).collect()).collect();
    println!("  connected={} components={comps:?}", g.is_connected());
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    describe("ring(6, 2)", &graph::ring_graph(6, 2)?);
    describe("chain(4, 3)", &graph::chain_graph(4, 3)?);
    describe("three-chain [3,2,3]", &presets::three_chain([3, 2, 3])?);
    describe("disjoint pairs", &presets::disjoint_pairs(4)?);

    // vertices {2,3},{1,4} act first, then bonds 1-2 and 3-4
    let bv = graph::from_bond_vertex_graph(&[(1, 2), (3, 4)], &[vec![2, 3], vec![1, 4]], 2)?;
    describe("bond/vertex", &bv);

    let spec = r#"{
        "dims": [2, 3, 2],
        "layers": [
            { "color": "red",   "cliques": [[1, 3], [2]] },
            { "color": "black", "cliques": [[1, 2], [3]], "singletons": "identity" }
        ]
    }"#;
    let g = graph::parse_graph_spec(spec)?;
    describe("from JSON", &g);
    println!("round trip: {}", graph::serialize_graph_spec(&g));

    let broken = r#"{"n": 2, "k": 3, "layers": [{"cliques": [[1, 2]]}]}"#;
    println!("invalid spec: {}", graph::parse_graph_spec(broken).unwrap_err());
    Ok(())
}
