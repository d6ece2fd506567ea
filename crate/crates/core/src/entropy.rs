//! Shannon-type entropies of unitary matrices and their eigenvectors, reduced
//! states of pure states, and the closed-form random-state means they are
//! compared against. Natural logarithms throughout.

use faer::{c64, Mat, MatRef};
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::sampling::UnitaryMatrix;
use crate::spectral::SpectralData;
use crate::tensor::strides;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EntropyError {
    #[error("not a probability vector: {0}")]
    NotAProbabilityVector(String),
    #[error("keep set is empty")]
    EmptyKeepSet,
    #[error("keep set covers every particle")]
    FullKeepSet,
    #[error("particle {0} is not part of the system")]
    InvalidParticle(usize),
    #[error("state has length {got}, system dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("state norm {0} differs from 1")]
    NormViolation(f64),
    #[error("basis index {index} out of range for particle of dimension {dim}")]
    BasisIndexOutOfRange { index: usize, dim: usize },
    #[error("projection weight {0:e} is numerically zero")]
    ZeroNormProjection(f64),
    #[error("need N_A <= N_B, got N_A = {na}, N_B = {nb}")]
    OrderViolation { na: usize, nb: usize },
    #[error("not a density matrix: {0}")]
    InvalidReducedState(String),
}

/// `x ln x` with `0 ln 0 = 0`.
fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// `−Σ pᵢ ln pᵢ`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64, EntropyError> {
    if let Some(x) = p.iter().find(|x| x.is_nan() || **x < 0.0) {
        return Err(EntropyError::NotAProbabilityVector(format!("entry {x}")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(EntropyError::NotAProbabilityVector(format!("sum {sum}")));
    }
    Ok(-p.iter().map(|&x| xlnx(x)).sum::<f64>())
}

fn squared_modulus_entropy(m: MatRef<'_, c64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += xlnx(m[(i, j)].norm_sqr());
        }
    }
    -acc / m.ncols() as f64
}

/// `H_ev = −(1/N) Σ_{i,j} |χ_{ji}|² ln |χ_{ji}|²` over the eigenvector matrix.
pub fn eigenvector_entropy(spec: &SpectralData) -> f64 {
    squared_modulus_entropy(spec.vectors())
}

/// `H_el = −(1/N) Σ_{ij} |u_ij|² ln |u_ij|²`.
pub fn element_entropy(u: &UnitaryMatrix) -> f64 {
    squared_modulus_entropy(u.as_ref())
}

/// Mean Shannon entropy of a random unit vector in `C^N`:
/// `ψ(N+1) − ψ(2) = Σ_{j=2}^{N} 1/j`.
pub fn mean_random_vector_entropy(n: usize) -> f64 {
    (2..=n).map(|j| 1.0 / j as f64).sum()
}

/// Page-type estimate `ln N_A − (N_A − 1)/(2 N_B)` of the mean entanglement
/// entropy of a random pure state on `N_A × N_B`.
pub fn page_mean_entropy(na: usize, nb: usize) -> Result<f64, EntropyError> {
    if na == 0 || na > nb {
        return Err(EntropyError::OrderViolation { na, nb });
    }
    Ok((na as f64).ln() - (na as f64 - 1.0) / (2.0 * nb as f64))
}

/// Mean purity `(N_A + N_B)/(N_A N_B + 1)` of a random bipartite pure state.
pub fn mean_purity(na: usize, nb: usize) -> f64 {
    (na + nb) as f64 / (na as f64 * nb as f64 + 1.0)
}

/// A density matrix obtained from a partial trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    mat: Mat<c64>,
}

impl ReducedState {
    /// Checks unit trace (1e-10) and Hermiticity (1e-12).
    pub fn new(mat: Mat<c64>) -> Result<Self, EntropyError> {
        let n = mat.nrows();
        if n == 0 || mat.ncols() != n {
            return Err(EntropyError::InvalidReducedState("not square".into()));
        }
        let trace: c64 = (0..n).map(|i| mat[(i, i)]).sum();
        if (trace - c64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(EntropyError::InvalidReducedState(format!("trace {trace}")));
        }
        for i in 0..n {
            for j in 0..=i {
                if (mat[(i, j)] - mat[(j, i)].conj()).norm() > 1e-12 {
                    return Err(EntropyError::InvalidReducedState("not Hermitian".into()));
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    /// Eigenvalues, ascending, with values above `−1e-10` clamped to 0.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(self.mat.as_ref())
            .expect("Hermitian eigensolver")
            .into_iter()
            .map(|x| if x < 0.0 && x > -1e-10 { 0.0 } else { x })
            .collect()
    }
}

/// `−Tr σ ln σ` from the clamped spectrum of `σ`.
pub fn von_neumann_entropy(sigma: &ReducedState) -> f64 {
    -sigma.eigenvalues().into_iter().map(|x| xlnx(x.max(0.0))).sum::<f64>()
}

/// `Tr σ²` as the squared Frobenius norm.
pub fn purity(sigma: &ReducedState) -> f64 {
    let m = sigma.as_ref();
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc
}

fn check_state(state: &[c64], dims: &[usize]) -> Result<(), EntropyError> {
    let expected: usize = dims.iter().product();
    if state.len() != expected {
        return Err(EntropyError::DimensionMismatch {
            expected,
            got: state.len(),
        });
    }
    let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(EntropyError::NormViolation(norm));
    }
    Ok(())
}

/// 1-based particle list → sorted 0-based membership mask.
fn keep_mask(keep: &[usize], k: usize) -> Result<Vec<bool>, EntropyError> {
    let mut mask = vec![false; k];
    for &p in keep {
        if p == 0 || p > k {
            return Err(EntropyError::InvalidParticle(p));
        }
        mask[p - 1] = true;
    }
    let kept = mask.iter().filter(|&&m| m).count();
    if kept == 0 {
        return Err(EntropyError::EmptyKeepSet);
    }
    if kept == k {
        return Err(EntropyError::FullKeepSet);
    }
    Ok(mask)
}

/// `σ = Tr_B |ψ⟩⟨ψ|` over the particles not in `keep` (1-based). Rows and
/// columns follow the multi-index order of the kept particles.
pub fn partial_trace(state: &[c64], dims: &[usize], keep: &[usize]) -> Result<ReducedState, EntropyError> {
    check_state(state, dims)?;
    let mask = keep_mask(keep, dims.len())?;
    let psi = bipartite_matrix(state, dims, &mask);
    let sigma = linalg::mul(psi.as_ref(), psi.adjoint());
    // symmetrize away rounding so the Hermiticity check is about structure
    let n = sigma.nrows();
    let sigma = Mat::from_fn(n, n, |i, j| (sigma[(i, j)] + sigma[(j, i)].conj()) * 0.5);
    ReducedState::new(sigma)
}

/// Reshapes `state` into `Ψ[a, b]` with `a` the multi-index of the masked
/// particles and `b` that of the rest.
fn bipartite_matrix(state: &[c64], dims: &[usize], mask: &[bool]) -> Mat<c64> {
    let kept_dims: Vec<usize> = dims.iter().zip(mask).filter(|(_, &m)| m).map(|(&d, _)| d).collect();
    let rest_dims: Vec<usize> = dims.iter().zip(mask).filter(|(_, &m)| !m).map(|(&d, _)| d).collect();
    let (na, nb): (usize, usize) = (kept_dims.iter().product(), rest_dims.iter().product());
    let ks = strides(&kept_dims);
    let rs = strides(&rest_dims);
    let mut psi = Mat::<c64>::zeros(na, nb);
    let mut digits = vec![0usize; dims.len()];
    for &amp in state {
        let (mut a, mut b, mut ki, mut ri) = (0, 0, 0, 0);
        for (p, &d) in digits.iter().enumerate() {
            if mask[p] {
                a += d * ks[ki];
                ki += 1;
            } else {
                b += d * rs[ri];
                ri += 1;
            }
        }
        psi[(a, b)] = amp;
        // odometer increment, last particle fastest
        for p in (0..dims.len()).rev() {
            digits[p] += 1;
            if digits[p] < dims[p] {
                break;
            }
            digits[p] = 0;
        }
    }
    psi
}

/// Entanglement entropy and purity of `state` across `keep | rest`.
pub fn entanglement(state: &[c64], dims: &[usize], keep: &[usize]) -> Result<(f64, f64), EntropyError> {
    let sigma = partial_trace(state, dims, keep)?;
    Ok((von_neumann_entropy(&sigma), purity(&sigma)))
}

/// The slice `⟨i|ψ⟩` on `particle` (1-based), renormalized, together with
/// its weight `‖⟨i|ψ⟩‖²`.
pub fn project_onto_basis(
    state: &[c64],
    dims: &[usize],
    particle: usize,
    basis_index: usize,
) -> Result<(Vec<c64>, f64), EntropyError> {
    check_state(state, dims)?;
    if particle == 0 || particle > dims.len() {
        return Err(EntropyError::InvalidParticle(particle));
    }
    let p = particle - 1;
    if basis_index >= dims[p] {
        return Err(EntropyError::BasisIndexOutOfRange {
            index: basis_index,
            dim: dims[p],
        });
    }
    let stride = strides(dims)[p];
    let block = stride * dims[p];
    let slice: Vec<c64> = state
        .chunks_exact(block)
        .flat_map(|chunk| chunk[basis_index * stride..(basis_index + 1) * stride].iter().copied())
        .collect();
    let weight: f64 = slice.iter().map(|z| z.norm_sqr()).sum();
    if weight < 1e-14 {
        return Err(EntropyError::ZeroNormProjection(weight));
    }
    let norm = weight.sqrt();
    Ok((slice.into_iter().map(|z| z / norm).collect(), weight))
}

/// How projection outcomes are averaged over the basis of the projected
/// particle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionWeighting {
    /// Weighted by the outcome probability `‖⟨i|ψ⟩‖²`.
    #[default]
    Weighted,
    /// Plain mean over the non-null outcomes.
    Unweighted,
}

/// Mean entanglement entropy and purity of the projected states
/// `⟨i|ψ⟩` over `i`, across `keep | rest` of the remaining particles.
/// `keep` uses the original 1-based labels and must not contain `particle`.
/// Null slices are skipped. Returns `None` if every slice is null.
pub fn projected_entanglement(
    state: &[c64],
    dims: &[usize],
    particle: usize,
    keep: &[usize],
    weighting: ProjectionWeighting,
) -> Result<Option<(f64, f64)>, EntropyError> {
    if particle == 0 || particle > dims.len() {
        return Err(EntropyError::InvalidParticle(particle));
    }
    if keep.contains(&particle) {
        return Err(EntropyError::InvalidParticle(particle));
    }
    let rest_dims: Vec<usize> = dims
        .iter()
        .enumerate()
        .filter(|&(p, _)| p + 1 != particle)
        .map(|(_, &d)| d)
        .collect();
    let relabeled: Vec<usize> = keep.iter().map(|&p| if p > particle { p - 1 } else { p }).collect();
    let (mut h_sum, mut r_sum, mut w_sum) = (0.0, 0.0, 0.0);
    for i in 0..dims[particle - 1] {
        let (slice, weight) = match project_onto_basis(state, dims, particle, i) {
            Ok(v) => v,
            Err(EntropyError::ZeroNormProjection(_)) => continue,
            Err(e) => return Err(e),
        };
        let (h, r) = entanglement(&slice, &rest_dims, &relabeled)?;
        let w = match weighting {
            ProjectionWeighting::Weighted => weight,
            ProjectionWeighting::Unweighted => 1.0,
        };
        h_sum += w * h;
        r_sum += w * r;
        w_sum += w;
    }
    if w_sum == 0.0 {
        return Ok(None);
    }
    Ok(Some((h_sum / w_sum, r_sum / w_sum)))
}
