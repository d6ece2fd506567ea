//! Random unitary evolution operators structured by interaction graphs.
//!
//! An [`InteractionGraph`] describes `k` particles and an ordered list of
//! colored layers. Each layer partitions the particles into cliques, and every
//! clique interacts through an independent Haar-random unitary during that
//! time step. The evolution operator is the product of the layer unitaries,
//! with the first listed layer applied first.
//!
//! The crate then measures how close such structured matrices come to the
//! Circular Unitary Ensemble (CUE):
//!
//! - [`spectral`]: eigenphases, nearest-neighbour spacings, Wigner surmise
//!   and Poisson references, Kolmogorov-Smirnov distances.
//! - [`entropy`]: eigenvector and element entropies, partial traces,
//!   entanglement entropy, purity and projections onto a basis state.
//! - [`ensemble`]: seeded Monte Carlo campaigns that aggregate all of the
//!   above, plus a generation-time benchmark.
//!
//! ```
//! use unigraph::{graph, sampling::RandomStream, spectral, tensor};
//!
//! let ring = graph::ring_graph(4, 2).unwrap();
//! assert!(ring.is_connected());
//! let u = tensor::evolution_unitary(&ring, RandomStream::new(7, 0)).unwrap();
//! let spec = spectral::eigendecompose(&u).unwrap();
//! assert_eq!(spec.phases().len(), 16);
//! ```

pub mod cli;
pub mod ensemble;
pub mod entropy;
pub mod graph;
mod linalg;
pub mod quadrature;
pub mod sampling;
pub mod spectral;
pub mod tensor;

pub use faer::c64;
pub use faer::Mat;

pub use ensemble::{Analysis, EnsembleReport, EnsembleSpec, Source};
pub use graph::{Clique, InteractionGraph, Layer, ParticleSystem, SingletonMode};
pub use sampling::{RandomStream, UnitaryMatrix};
pub use spectral::{Histogram, SpacingSample, SpectralData};

/// Crate-wide error type. Each module has its own error enum; this wraps
/// them for callers that mix several stages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Sampling(#[from] sampling::SamplingError),
    #[error(transparent)]
    Tensor(#[from] tensor::TensorError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error(transparent)]
    Entropy(#[from] entropy::EntropyError),
    #[error(transparent)]
    Ensemble(#[from] ensemble::EnsembleError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
