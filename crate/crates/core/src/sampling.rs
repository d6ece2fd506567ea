//! Haar-random unitaries, Poissonian diagonal unitaries and the composed
//! ensemble `P₁ X P₂ X†`, all driven by a counter-based random stream.

use std::f64::consts::TAU;

use faer::{c64, Mat, MatRef};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplingError {
    #[error("matrix dimension must be at least 1")]
    DimensionZero,
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("unitarity defect {defect:e} exceeds tolerance {tolerance:e}")]
    NotUnitary { defect: f64, tolerance: f64 },
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies one reproducible random sequence: a ChaCha12 key derived from
/// `master_seed`, positioned on stream `stream_index`.
///
/// Equal pairs always produce identical sequences; distinct stream indices
/// under one seed are independent ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RandomStream {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl RandomStream {
    pub const fn new(master_seed: u64, stream_index: u64) -> Self {
        Self {
            master_seed,
            stream_index,
        }
    }

    pub fn rng(&self) -> ChaCha12Rng {
        let mut key = [0u8; 32];
        let mut state = self.master_seed;
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha12Rng::from_seed(key);
        rng.set_stream(self.stream_index);
        rng
    }

    /// Sub-stream `index` of this stream. Children of different parents never
    /// share a key except by 64-bit hash collision.
    pub fn child(&self, index: u64) -> RandomStream {
        let key = splitmix64(splitmix64(self.master_seed ^ 0xD1B5_4A32_D192_ED03) ^ self.stream_index);
        RandomStream::new(key, index)
    }
}

/// Unitarity tolerance for a matrix of order `dim`: `1e-12`, widened to
/// `1e-14 · dim` above order 1024.
pub fn default_tolerance(dim: usize) -> f64 {
    if dim > 1024 {
        1e-14 * dim as f64
    } else {
        1e-12
    }
}

/// Dense complex square matrix that passed a unitarity check.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    mat: Mat<c64>,
}

impl UnitaryMatrix {
    /// Wraps `mat` after checking `max |U†U − I| ≤ tolerance`.
    pub fn new(mat: Mat<c64>, tolerance: f64) -> Result<Self, SamplingError> {
        if mat.nrows() != mat.ncols() {
            return Err(SamplingError::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() == 0 {
            return Err(SamplingError::DimensionZero);
        }
        let defect = linalg::unitarity_defect(mat.as_ref());
        if defect.is_nan() || defect > tolerance {
            return Err(SamplingError::NotUnitary { defect, tolerance });
        }
        Ok(Self { mat })
    }

    /// [`UnitaryMatrix::new`] with [`default_tolerance`].
    pub fn checked(mat: Mat<c64>) -> Result<Self, SamplingError> {
        let tol = default_tolerance(mat.nrows());
        Self::new(mat, tol)
    }

    /// For products and tensor products of already-checked unitaries.
    pub(crate) fn from_trusted(mat: Mat<c64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_trusted(Mat::identity(dim, dim))
    }

    pub fn from_phases(phases: &[f64]) -> Self {
        let n = phases.len();
        let mut mat = Mat::<c64>::zeros(n, n);
        for (i, &t) in phases.iter().enumerate() {
            mat[(i, i)] = c64::cis(t);
        }
        Self::from_trusted(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        self.mat.as_ref()
    }

    pub fn into_inner(self) -> Mat<c64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.mat[(row, col)]
    }

    /// `self · rhs`.
    pub fn mul(&self, rhs: &UnitaryMatrix) -> UnitaryMatrix {
        Self::from_trusted(linalg::mul(self.as_ref(), rhs.as_ref()))
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        Self::from_trusted(self.mat.adjoint().to_owned())
    }

    /// `max |U†U − I|`.
    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(self.as_ref())
    }

    pub fn determinant(&self) -> c64 {
        let (values, _) = linalg::eigen(self.as_ref()).expect("eigenvalues of a unitary matrix");
        values.into_iter().fold(c64::new(1.0, 0.0), |acc, v| acc * v)
    }
}

fn ginibre<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Mat<c64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut z = Mat::<c64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            z[(i, j)] = c64::new(re * scale, im * scale);
        }
    }
    z
}

pub(crate) fn haar_from_rng<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<UnitaryMatrix, SamplingError> {
    if dim == 0 {
        return Err(SamplingError::DimensionZero);
    }
    let z = ginibre(dim, rng);
    let (mut q, rdiag) = linalg::qr_q_and_rdiag(z.as_ref());
    // Q · diag(r_jj / |r_jj|) removes the QR routine's phase convention.
    for (j, r) in rdiag.iter().enumerate() {
        let modulus = r.norm();
        let phase = if modulus > 0.0 { r / modulus } else { c64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::checked(q)
}

/// Haar-distributed unitary of order `dim` via Ginibre sampling, QR and a
/// diagonal phase correction.
pub fn haar_unitary(dim: usize, stream: RandomStream) -> Result<UnitaryMatrix, SamplingError> {
    haar_from_rng(dim, &mut stream.rng())
}

/// `dim` independent phases uniform on `[0, 2π)`, in draw order.
pub fn random_phases(dim: usize, stream: RandomStream) -> Result<Vec<f64>, SamplingError> {
    if dim == 0 {
        return Err(SamplingError::DimensionZero);
    }
    let mut rng = stream.rng();
    Ok((0..dim).map(|_| TAU * rng.random::<f64>()).collect())
}

/// Diagonal unitary with i.i.d. uniform eigenphases (Poissonian spectrum).
pub fn random_phases_diagonal(dim: usize, stream: RandomStream) -> Result<UnitaryMatrix, SamplingError> {
    Ok(UnitaryMatrix::from_phases(&random_phases(dim, stream)?))
}

/// `P₁ X P₂ X†` with `P₁, P₂` Poissonian diagonals and `X` Haar, drawn from
/// children 0, 1 and 2 of `stream` respectively.
pub fn sample_composed(dim: usize, stream: RandomStream) -> Result<UnitaryMatrix, SamplingError> {
    let p1 = random_phases(dim, stream.child(0))?;
    let x = haar_unitary(dim, stream.child(1))?;
    let p2 = random_phases(dim, stream.child(2))?;
    let mut left = x.as_ref().to_owned();
    for j in 0..dim {
        let cj = c64::cis(p2[j]);
        for i in 0..dim {
            left[(i, j)] *= c64::cis(p1[i]) * cj;
        }
    }
    Ok(UnitaryMatrix::from_trusted(linalg::mul(left.as_ref(), x.as_ref().adjoint())))
}
