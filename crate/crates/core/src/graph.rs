//! Interaction graphs as ordered layers of clique partitions.
//!
//! Particle indices are 1-based at every public boundary (constructors,
//! JSON, error values) and 0-based inside [`Clique`] storage.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph spec syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("a particle system needs at least one particle")]
    NoParticles,
    #[error("particle {0} has local dimension 0")]
    ZeroDimension(usize),
    #[error("total Hilbert-space dimension overflows usize")]
    DimensionOverflow,
    #[error("give either \"dims\" or both \"n\" and \"k\"")]
    AmbiguousDimensions,
    #[error("empty clique")]
    EmptyClique,
    #[error("particle index {0} is out of range")]
    IndexOutOfRange(usize),
    #[error("particle {0} appears more than once in the layer")]
    DuplicateParticle(usize),
    #[error("particle {0} is not covered by the layer")]
    MissingParticle(usize),
    #[error("an interaction graph needs at least one layer")]
    NoLayers,
    #[error("pair bonds need an even particle count, got {0}")]
    OddParticleCount(usize),
    #[error("builder needs at least {min} particles, got {k}")]
    TooFewParticles { k: usize, min: usize },
}

/// Local Hilbert-space dimensions of `k` particles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParticleSystem {
    dims: Vec<usize>,
    total_dim: usize,
}

impl ParticleSystem {
    pub fn new(dims: Vec<usize>) -> Result<Self, GraphError> {
        if dims.is_empty() {
            return Err(GraphError::NoParticles);
        }
        let mut total: usize = 1;
        for (i, &d) in dims.iter().enumerate() {
            if d == 0 {
                return Err(GraphError::ZeroDimension(i + 1));
            }
            total = total.checked_mul(d).ok_or(GraphError::DimensionOverflow)?;
        }
        Ok(Self {
            dims,
            total_dim: total,
        })
    }

    /// `k` particles of equal dimension `n`.
    pub fn uniform(n: usize, k: usize) -> Result<Self, GraphError> {
        Self::new(vec![n; k])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn particle_count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }
}

/// A set of particles interacting jointly in one layer. Stored sorted and
/// 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clique {
    members: Vec<usize>,
}

impl Clique {
    /// Builds a clique from 1-based particle indices in any order.
    pub fn new<I: IntoIterator<Item = usize>>(one_based: I) -> Result<Self, GraphError> {
        let mut members = Vec::new();
        for p in one_based {
            if p == 0 {
                return Err(GraphError::IndexOutOfRange(0));
            }
            members.push(p - 1);
        }
        if members.is_empty() {
            return Err(GraphError::EmptyClique);
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateParticle(w[0] + 1));
        }
        Ok(Self { members })
    }

    pub(crate) fn from_zero_based(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        debug_assert!(!members.is_empty());
        Self { members }
    }

    /// 0-based particle indices in increasing order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// 1-based particle indices in increasing order.
    pub fn particles(&self) -> Vec<usize> {
        self.members.iter().map(|p| p + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }

    /// Product of the member dimensions.
    pub fn block_dim(&self, dims: &[usize]) -> usize {
        self.members.iter().map(|&p| dims[p]).product()
    }
}

impl fmt::Display for Clique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.particles().iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// How singleton cliques are realized.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SingletonMode {
    /// Each singleton gets its own Haar unitary of the local dimension.
    #[default]
    Haar,
    /// Singletons are left untouched.
    Identity,
}

/// One time step: a partition of the particles into cliques.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Layer {
    color: String,
    cliques: Vec<Clique>,
    singletons: SingletonMode,
}

impl Layer {
    pub fn new(color: impl Into<String>, cliques: Vec<Clique>) -> Self {
        let mut cliques = cliques;
        cliques.sort();
        Self {
            color: color.into(),
            cliques,
            singletons: SingletonMode::Haar,
        }
    }

    /// Builds a layer from 1-based index lists.
    pub fn from_indices(color: impl Into<String>, cliques: &[Vec<usize>]) -> Result<Self, GraphError> {
        let cliques = cliques
            .iter()
            .map(|c| Clique::new(c.iter().copied()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(color, cliques))
    }

    pub fn with_singletons(mut self, mode: SingletonMode) -> Self {
        self.singletons = mode;
        self
    }

    pub fn color(&self) -> &str {
        &self.color
    }

    /// Cliques in canonical order (sorted by smallest member).
    pub fn cliques(&self) -> &[Clique] {
        &self.cliques
    }

    pub fn singletons(&self) -> SingletonMode {
        self.singletons
    }
}

/// Checks that the layer's cliques partition particles `1..=k`.
pub fn validate_layer(layer: &Layer, k: usize) -> Result<(), GraphError> {
    for clique in &layer.cliques {
        if let Some(&p) = clique.members.iter().find(|&&p| p >= k) {
            return Err(GraphError::IndexOutOfRange(p + 1));
        }
    }
    let mut seen = vec![false; k];
    for clique in &layer.cliques {
        if clique.is_empty() {
            return Err(GraphError::EmptyClique);
        }
        for &p in &clique.members {
            if seen[p] {
                return Err(GraphError::DuplicateParticle(p + 1));
            }
            seen[p] = true;
        }
    }
    match seen.iter().position(|s| !s) {
        Some(p) => Err(GraphError::MissingParticle(p + 1)),
        None => Ok(()),
    }
}

/// A particle system plus the ordered layers acting on it. Immutable once
/// validated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InteractionGraph {
    system: ParticleSystem,
    layers: Vec<Layer>,
}

impl InteractionGraph {
    pub fn new(system: ParticleSystem, layers: Vec<Layer>) -> Result<Self, GraphError> {
        if layers.is_empty() {
            return Err(GraphError::NoLayers);
        }
        let k = system.particle_count();
        for layer in &layers {
            validate_layer(layer, k)?;
        }
        Ok(Self { system, layers })
    }

    pub fn system(&self) -> &ParticleSystem {
        &self.system
    }

    pub fn dims(&self) -> &[usize] {
        self.system.dims()
    }

    pub fn particle_count(&self) -> usize {
        self.system.particle_count()
    }

    pub fn total_dim(&self) -> usize {
        self.system.total_dim()
    }

    /// Layers in temporal order; `layers()[0]` acts first.
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Connected components of the union graph, as sorted 0-based particle
    /// lists ordered by their smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let k = self.particle_count();
        let mut uf = UnionFind::new(k);
        for layer in &self.layers {
            for clique in &layer.cliques {
                let first = clique.members[0];
                for &p in &clique.members[1..] {
                    uf.union(first, p);
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; k];
        for p in 0..k {
            let root = uf.find(p);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(p);
        }
        groups
    }

    /// Whether every particle is linked to every other through cliques of
    /// some layer.
    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GraphSpecFile::from(self)).expect("graph spec serializes")
    }
}

/// Free-function form of [`InteractionGraph::is_connected`].
pub fn is_connected(graph: &InteractionGraph) -> bool {
    graph.is_connected()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Converts the bond/vertex picture (every bond is a pair of particles,
/// every vertex couples a group of particles) into a two-layer graph: the
/// vertex interactions act first, then the bond interactions.
///
/// Repeated bonds are merged.
pub fn from_bond_vertex_graph(
    bond_pairs: &[(usize, usize)],
    vertex_groups: &[Vec<usize>],
    n: usize,
) -> Result<InteractionGraph, GraphError> {
    let k = bond_pairs
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .chain(vertex_groups.iter().flatten().copied())
        .max()
        .unwrap_or(0);
    if k == 0 {
        return Err(GraphError::NoParticles);
    }
    if k % 2 == 1 {
        return Err(GraphError::OddParticleCount(k));
    }
    let bonds: BTreeSet<(usize, usize)> = bond_pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let bond_cliques = bonds
        .into_iter()
        .map(|(a, b)| Clique::new([a, b]))
        .collect::<Result<Vec<_>, _>>()?;
    let vertex_cliques = vertex_groups
        .iter()
        .map(|g| Clique::new(g.iter().copied()))
        .collect::<Result<Vec<_>, _>>()?;
    let system = ParticleSystem::uniform(n, k)?;
    InteractionGraph::new(
        system,
        vec![Layer::new("vertex", vertex_cliques), Layer::new("bond", bond_cliques)],
    )
}

/// Two-colour ring: pairs (1,2),(3,4),… act first, then (2,3),…,(k,1).
pub fn ring_graph(k: usize, n: usize) -> Result<InteractionGraph, GraphError> {
    if k < 2 {
        return Err(GraphError::TooFewParticles { k, min: 2 });
    }
    if k % 2 == 1 {
        return Err(GraphError::OddParticleCount(k));
    }
    let even: Vec<Clique> = (0..k / 2).map(|j| Clique::from_zero_based(vec![2 * j, 2 * j + 1])).collect();
    let odd: Vec<Clique> = (0..k / 2)
        .map(|j| Clique::from_zero_based(vec![2 * j + 1, (2 * j + 2) % k]))
        .collect();
    InteractionGraph::new(
        ParticleSystem::uniform(n, k)?,
        vec![Layer::new("red", even), Layer::new("black", odd)],
    )
}

/// Nearest-neighbour chain with `k - 1` steps; step `i` couples particles
/// `i` and `i + 1` while every other particle evolves alone.
pub fn chain_graph(k: usize, n: usize) -> Result<InteractionGraph, GraphError> {
    chain_graph_with_dims(vec![n; k])
}

/// [`chain_graph`] over arbitrary local dimensions.
pub fn chain_graph_with_dims(dims: Vec<usize>) -> Result<InteractionGraph, GraphError> {
    let k = dims.len();
    if k < 2 {
        return Err(GraphError::TooFewParticles { k, min: 2 });
    }
    let layers = (0..k - 1)
        .map(|i| {
            let mut cliques = vec![Clique::from_zero_based(vec![i, i + 1])];
            cliques.extend((0..k).filter(|&p| p != i && p != i + 1).map(|p| Clique::from_zero_based(vec![p])));
            Layer::new(format!("step{}", i + 1), cliques)
        })
        .collect();
    InteractionGraph::new(ParticleSystem::new(dims)?, layers)
}

/// Small named topologies used throughout the examples and tests.
pub mod presets {
    use super::*;

    fn build(dims: Vec<usize>, layers: &[&[&[usize]]]) -> Result<InteractionGraph, GraphError> {
        let layers = layers
            .iter()
            .enumerate()
            .map(|(i, cliques)| {
                let lists: Vec<Vec<usize>> = cliques.iter().map(|c| c.to_vec()).collect();
                Layer::from_indices(if i % 2 == 0 { "black" } else { "red" }, &lists)
            })
            .collect::<Result<Vec<_>, _>>()?;
        InteractionGraph::new(ParticleSystem::new(dims)?, layers)
    }

    /// One particle, one Haar block: plain CUE(n).
    pub fn single_particle(n: usize) -> Result<InteractionGraph, GraphError> {
        build(vec![n], &[&[&[1]]])
    }

    /// `W12 (V1 ⊗ V2)`: two particles, CUE(n²) in distribution.
    pub fn two_particle(n: usize) -> Result<InteractionGraph, GraphError> {
        build(vec![n, n], &[&[&[1], &[2]], &[&[1, 2]]])
    }

    /// `(W12 ⊗ W3)(V1 ⊗ V23)` over possibly unequal dimensions.
    pub fn three_chain(dims: [usize; 3]) -> Result<InteractionGraph, GraphError> {
        build(dims.to_vec(), &[&[&[1], &[2, 3]], &[&[1, 2], &[3]]])
    }

    /// `(W12 ⊗ W34)(V13 ⊗ V24)`.
    pub fn crossed_square(n: usize) -> Result<InteractionGraph, GraphError> {
        build(vec![n; 4], &[&[&[1, 3], &[2, 4]], &[&[1, 2], &[3, 4]]])
    }

    /// `(W123 ⊗ W4 ⊗ W5 ⊗ W6)(V14 ⊗ V25 ⊗ V36)`: a triangle with a pendant
    /// on each corner.
    pub fn triangle_with_pendants(n: usize) -> Result<InteractionGraph, GraphError> {
        build(
            vec![n; 6],
            &[&[&[1, 4], &[2, 5], &[3, 6]], &[&[1, 2, 3], &[4], &[5], &[6]]],
        )
    }

    /// Two independent two-particle blocks {1,2} and {3,4}; disconnected.
    pub fn disjoint_pairs(n: usize) -> Result<InteractionGraph, GraphError> {
        build(vec![n; 4], &[&[&[1], &[2], &[3], &[4]], &[&[1, 2], &[3, 4]]])
    }

    /// Names accepted by [`by_name`].
    pub const NAMES: &[&str] = &[
        "single",
        "two-particle",
        "three-chain",
        "crossed-square",
        "triangle-pendants",
        "disjoint-pairs",
    ];

    /// Looks up a preset; `three-chain` takes `dims` when given, all other
    /// presets use the uniform dimension `n`.
    pub fn by_name(name: &str, n: usize, dims: Option<&[usize]>) -> Option<Result<InteractionGraph, GraphError>> {
        Some(match name {
            "single" => single_particle(n),
            "two-particle" => two_particle(n),
            "three-chain" => match dims {
                Some(&[a, b, c]) => three_chain([a, b, c]),
                Some(other) => Err(GraphError::TooFewParticles { k: other.len(), min: 3 }),
                None => three_chain([n, n, n]),
            },
            "crossed-square" => crossed_square(n),
            "triangle-pendants" => triangle_with_pendants(n),
            "disjoint-pairs" => disjoint_pairs(n),
            _ => return None,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    layers: Vec<LayerSpecFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerSpecFile {
    #[serde(default)]
    color: String,
    cliques: Vec<Vec<usize>>,
    #[serde(default)]
    singletons: SingletonMode,
}

impl From<&InteractionGraph> for GraphSpecFile {
    fn from(g: &InteractionGraph) -> Self {
        Self {
            dims: Some(g.dims().to_vec()),
            n: None,
            k: None,
            layers: g
                .layers
                .iter()
                .map(|l| LayerSpecFile {
                    color: l.color.clone(),
                    cliques: l.cliques.iter().map(Clique::particles).collect(),
                    singletons: l.singletons,
                })
                .collect(),
        }
    }
}

/// Parses and validates a JSON graph spec.
///
/// ```json
/// { "dims": [2,2,2,2],
///   "layers": [ { "color": "red", "cliques": [[1,3],[2,4]], "singletons": "haar" },
///               { "color": "black", "cliques": [[1,2],[3,4]] } ] }
/// ```
///
/// `{"n": 2, "k": 4, ...}` is accepted in place of `dims`.
pub fn parse_graph_spec(text: &str) -> Result<InteractionGraph, GraphError> {
    let raw: GraphSpecFile = serde_json::from_str(text).map_err(|e| GraphError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let system = match (raw.dims, raw.n, raw.k) {
        (Some(dims), None, None) => ParticleSystem::new(dims)?,
        (None, Some(n), Some(k)) => ParticleSystem::uniform(n, k)?,
        _ => return Err(GraphError::AmbiguousDimensions),
    };
    let layers = raw
        .layers
        .iter()
        .map(|l| Ok(Layer::from_indices(l.color.clone(), &l.cliques)?.with_singletons(l.singletons)))
        .collect::<Result<Vec<_>, GraphError>>()?;
    InteractionGraph::new(system, layers)
}

/// Inverse of [`parse_graph_spec`]; always emits the explicit `dims` form.
pub fn serialize_graph_spec(graph: &InteractionGraph) -> String {
    graph.to_json()
}
