//! Multi-index arithmetic and assembly of layer and evolution unitaries.
//!
//! Global basis index convention: particle 1 is the most significant digit,
//! `g = Σ_j digit_j · stride_j` with `stride_{k-1} = 1`.

use faer::{c64, Mat, MatMut};

use crate::graph::{Clique, InteractionGraph, Layer, SingletonMode};
use crate::sampling::{haar_unitary, RandomStream, SamplingError, UnitaryMatrix};

/// Largest evolution dimension assembled unless configured otherwise.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Environment variable overriding [`DEFAULT_DIM_CAP`].
pub const DIM_CAP_ENV: &str = "UNIGRAPH_DIM_CAP";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TensorError {
    #[error("index out of range")]
    OutOfRange,
    #[error("kronecker product dimension overflows usize")]
    OverflowOnDim,
    #[error("block has dimension {got}, clique needs {expected}")]
    BlockDimMismatch { expected: usize, got: usize },
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

/// Reads [`DIM_CAP_ENV`], falling back to [`DEFAULT_DIM_CAP`] when unset or
/// unparsable.
pub fn dim_cap_from_env() -> usize {
    std::env::var(DIM_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DIM_CAP)
}

pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for j in (1..dims.len()).rev() {
        strides[j - 1] = strides[j] * dims[j];
    }
    strides
}

/// Per-particle digits of a basis state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<usize>);

pub fn global_index(m: &MultiIndex, dims: &[usize]) -> Result<usize, TensorError> {
    if m.0.len() != dims.len() {
        return Err(TensorError::OutOfRange);
    }
    let mut g = 0usize;
    for (&d, &n) in m.0.iter().zip(dims) {
        if d >= n {
            return Err(TensorError::OutOfRange);
        }
        g = g * n + d;
    }
    Ok(g)
}

pub fn multi_index(g: usize, dims: &[usize]) -> Result<MultiIndex, TensorError> {
    let total: usize = dims.iter().product();
    if g >= total {
        return Err(TensorError::OutOfRange);
    }
    let mut digits = vec![0; dims.len()];
    let mut rest = g;
    for j in (0..dims.len()).rev() {
        digits[j] = rest % dims[j];
        rest /= dims[j];
    }
    Ok(MultiIndex(digits))
}

/// Standard Kronecker product `a ⊗ b`.
pub fn kron(a: &UnitaryMatrix, b: &UnitaryMatrix) -> Result<UnitaryMatrix, TensorError> {
    let (na, nb) = (a.dim(), b.dim());
    let n = na.checked_mul(nb).ok_or(TensorError::OverflowOnDim)?;
    n.checked_mul(n).ok_or(TensorError::OverflowOnDim)?;
    let (ar, br) = (a.as_ref(), b.as_ref());
    let out = Mat::<c64>::from_fn(n, n, |i, j| ar[(i / nb, j / nb)] * br[(i % nb, j % nb)]);
    Ok(UnitaryMatrix::from_trusted(out))
}

/// Index bookkeeping for one clique inside the full tensor product.
///
/// Every global index decomposes uniquely as `base + offsets[a]`, where
/// `base` has zero digits on the clique and `a` is the clique-local index
/// (clique members in increasing order, first member most significant).
#[derive(Debug, Clone)]
pub struct CliqueIndexMap {
    offsets: Vec<usize>,
    bases: Vec<usize>,
}

impl CliqueIndexMap {
    pub fn new(clique: &Clique, dims: &[usize]) -> Self {
        let strides = strides(dims);
        let members = clique.members();
        let mut offsets = vec![0usize];
        for &p in members {
            let step = strides[p];
            offsets = offsets
                .iter()
                .flat_map(|&o| (0..dims[p]).map(move |d| o + d * step))
                .collect();
        }
        let mut bases = vec![0usize];
        for p in (0..dims.len()).filter(|p| !members.contains(p)) {
            let step = strides[p];
            bases = bases
                .iter()
                .flat_map(|&o| (0..dims[p]).map(move |d| o + d * step))
                .collect();
        }
        Self { offsets, bases }
    }

    pub fn block_dim(&self) -> usize {
        self.offsets.len()
    }

    /// Clique-local index for every global index.
    fn local_of_global(&self) -> Vec<usize> {
        let n = self.offsets.len() * self.bases.len();
        let mut local = vec![0usize; n];
        for &b in &self.bases {
            for (a, &o) in self.offsets.iter().enumerate() {
                local[b + o] = a;
            }
        }
        local
    }
}

/// `target ← lift(block) · target` without forming the lifted matrix.
fn apply_block_left(target: MatMut<'_, c64>, block: &UnitaryMatrix, map: &CliqueIndexMap) {
    let mut target = target;
    let d = map.block_dim();
    let b = block.as_ref();
    let mut gathered = vec![c64::new(0.0, 0.0); d];
    for j in 0..target.ncols() {
        for &base in &map.bases {
            for (a, &o) in map.offsets.iter().enumerate() {
                gathered[a] = target[(base + o, j)];
            }
            for (r, &o) in map.offsets.iter().enumerate() {
                let mut acc = c64::new(0.0, 0.0);
                for (c, g) in gathered.iter().enumerate() {
                    acc += b[(r, c)] * g;
                }
                target[(base + o, j)] = acc;
            }
        }
    }
}

fn check_block(block: &UnitaryMatrix, clique: &Clique, dims: &[usize]) -> Result<(), TensorError> {
    let expected = clique.block_dim(dims);
    if block.dim() != expected {
        return Err(TensorError::BlockDimMismatch {
            expected,
            got: block.dim(),
        });
    }
    Ok(())
}

/// The full-space operator acting as `block` on the clique's legs and as the
/// identity elsewhere.
pub fn lift(block: &UnitaryMatrix, clique: &Clique, dims: &[usize]) -> Result<UnitaryMatrix, TensorError> {
    check_block(block, clique, dims)?;
    let map = CliqueIndexMap::new(clique, dims);
    let n: usize = dims.iter().product();
    let b = block.as_ref();
    let mut out = Mat::<c64>::zeros(n, n);
    for &base in &map.bases {
        for (c, &oc) in map.offsets.iter().enumerate() {
            for (r, &or) in map.offsets.iter().enumerate() {
                out[(base + or, base + oc)] = b[(r, c)];
            }
        }
    }
    Ok(UnitaryMatrix::from_trusted(out))
}

/// Random blocks for one layer, one per clique in canonical order. `None`
/// marks an identity singleton. Clique `c` draws from `stream.child(c)`.
pub fn draw_layer_blocks(
    layer: &Layer,
    dims: &[usize],
    stream: RandomStream,
) -> Result<Vec<Option<UnitaryMatrix>>, TensorError> {
    layer
        .cliques()
        .iter()
        .enumerate()
        .map(|(c, clique)| {
            if clique.is_singleton() && layer.singletons() == SingletonMode::Identity {
                Ok(None)
            } else {
                Ok(Some(haar_unitary(clique.block_dim(dims), stream.child(c as u64))?))
            }
        })
        .collect()
}

/// Blocks for every layer; layer `i` draws from `stream.child(i)`.
pub fn draw_blocks(
    graph: &InteractionGraph,
    stream: RandomStream,
) -> Result<Vec<Vec<Option<UnitaryMatrix>>>, TensorError> {
    graph
        .layers()
        .iter()
        .enumerate()
        .map(|(i, layer)| draw_layer_blocks(layer, graph.dims(), stream.child(i as u64)))
        .collect()
}

fn layer_from_blocks(layer: &Layer, dims: &[usize], blocks: &[Option<UnitaryMatrix>]) -> Mat<c64> {
    let n: usize = dims.iter().product();
    let mut out = Mat::<c64>::from_fn(n, n, |_, _| c64::new(1.0, 0.0));
    // Disjoint cliques covering every particle: each entry is the product of
    // the clique-local block entries.
    for (clique, block) in layer.cliques().iter().zip(blocks) {
        let local = CliqueIndexMap::new(clique, dims).local_of_global();
        match block {
            Some(b) => {
                let b = b.as_ref();
                for h in 0..n {
                    for g in 0..n {
                        out[(g, h)] *= b[(local[g], local[h])];
                    }
                }
            }
            None => {
                for h in 0..n {
                    for g in 0..n {
                        if local[g] != local[h] {
                            out[(g, h)] = c64::new(0.0, 0.0);
                        }
                    }
                }
            }
        }
    }
    out
}

/// One layer's unitary: the tensor product of independent Haar blocks over
/// the layer's cliques.
pub fn layer_unitary(layer: &Layer, dims: &[usize], stream: RandomStream) -> Result<UnitaryMatrix, TensorError> {
    let blocks = draw_layer_blocks(layer, dims, stream)?;
    Ok(UnitaryMatrix::from_trusted(layer_from_blocks(layer, dims, &blocks)))
}

fn check_cap(dim: usize, cap: usize) -> Result<(), TensorError> {
    if dim > cap {
        Err(TensorError::DimensionCapExceeded { dim, cap })
    } else {
        Ok(())
    }
}

/// Assembles `layer_L ⋯ layer_1` from pre-drawn blocks.
pub fn assemble_evolution(
    graph: &InteractionGraph,
    blocks: &[Vec<Option<UnitaryMatrix>>],
) -> Result<UnitaryMatrix, TensorError> {
    let dims = graph.dims();
    for (layer, layer_blocks) in graph.layers().iter().zip(blocks) {
        for (clique, block) in layer.cliques().iter().zip(layer_blocks) {
            if let Some(b) = block {
                check_block(b, clique, dims)?;
            }
        }
    }
    let mut u = layer_from_blocks(&graph.layers()[0], dims, &blocks[0]);
    for (layer, layer_blocks) in graph.layers().iter().zip(blocks).skip(1) {
        for (clique, block) in layer.cliques().iter().zip(layer_blocks) {
            if let Some(b) = block {
                apply_block_left(u.as_mut(), b, &CliqueIndexMap::new(clique, dims));
            }
        }
    }
    Ok(UnitaryMatrix::from_trusted(u))
}

/// Evolution operator of the graph with the default dimension cap.
pub fn evolution_unitary(graph: &InteractionGraph, stream: RandomStream) -> Result<UnitaryMatrix, TensorError> {
    evolution_unitary_with_cap(graph, stream, DEFAULT_DIM_CAP)
}

/// `U = layer_L ⋯ layer_2 · layer_1`, each layer drawn from its own
/// sub-stream. Later layers are applied clique by clique, costing
/// `O(N² · Σ dim(block))` instead of dense matrix products.
pub fn evolution_unitary_with_cap(
    graph: &InteractionGraph,
    stream: RandomStream,
    cap: usize,
) -> Result<UnitaryMatrix, TensorError> {
    check_cap(graph.total_dim(), cap)?;
    let blocks = draw_blocks(graph, stream)?;
    assemble_evolution(graph, &blocks)
}

/// `U · state` for the graph's evolution, computed without forming `U`.
/// `state` may hold several columns.
pub fn apply_evolution(graph: &InteractionGraph, stream: RandomStream, state: &mut Mat<c64>) -> Result<(), TensorError> {
    let blocks = draw_blocks(graph, stream)?;
    let dims = graph.dims();
    for (layer, layer_blocks) in graph.layers().iter().zip(&blocks) {
        for (clique, block) in layer.cliques().iter().zip(layer_blocks) {
            if let Some(b) = block {
                apply_block_left(state.as_mut(), b, &CliqueIndexMap::new(clique, dims));
            }
        }
    }
    Ok(())
}

/// For each connected component (0-based particles, ascending), the
/// evolution restricted to it, built from the same random blocks that
/// [`evolution_unitary`] would draw for `stream`. For a disconnected graph
/// the full evolution is, up to a leg permutation, the Kronecker product of
/// these.
pub fn component_evolutions(
    graph: &InteractionGraph,
    stream: RandomStream,
) -> Result<Vec<(Vec<usize>, UnitaryMatrix)>, TensorError> {
    let blocks = draw_blocks(graph, stream)?;
    let dims = graph.dims();
    graph
        .components()
        .into_iter()
        .map(|component| {
            let sub_dims: Vec<usize> = component.iter().map(|&p| dims[p]).collect();
            let n: usize = sub_dims.iter().product();
            let mut u = Mat::<c64>::identity(n, n);
            for (layer, layer_blocks) in graph.layers().iter().zip(&blocks) {
                for (clique, block) in layer.cliques().iter().zip(layer_blocks) {
                    let Some(b) = block else { continue };
                    if !component.contains(&clique.members()[0]) {
                        continue;
                    }
                    let local: Vec<usize> = clique
                        .members()
                        .iter()
                        .map(|p| component.binary_search(p).expect("clique inside its component"))
                        .collect();
                    let map = CliqueIndexMap::new(&Clique::from_zero_based(local), &sub_dims);
                    apply_block_left(u.as_mut(), b, &map);
                }
            }
            Ok((component, UnitaryMatrix::from_trusted(u)))
        })
        .collect()
}
