//! Thin wrappers over faer's dense kernels, always run sequentially so that
//! results do not depend on the global thread pool.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::{evd, householder, matmul::matmul, qr::no_pivoting::factor as qr, svd};
use faer::traits::Conjugate;
use faer::{c64, Accum, Mat, MatRef, Par};

const PAR: Par = Par::Seq;

/// `lhs · rhs`.
pub(crate) fn mul<L, R>(lhs: MatRef<'_, L>, rhs: MatRef<'_, R>) -> Mat<c64>
where
    L: Conjugate<Canonical = c64>,
    R: Conjugate<Canonical = c64>,
{
    let mut out = Mat::<c64>::zeros(lhs.nrows(), rhs.ncols());
    matmul(out.as_mut(), Accum::Replace, lhs, rhs, c64::new(1.0, 0.0), PAR);
    out
}

/// Householder QR. Returns the full `Q` and the diagonal of `R`.
pub(crate) fn qr_q_and_rdiag(a: MatRef<'_, c64>) -> (Mat<c64>, Vec<c64>) {
    let (m, n) = a.shape();
    let size = m.min(n);
    let mut factors = a.to_owned();
    let block = qr::recommended_block_size::<c64>(m, n);
    let mut coeff = Mat::<c64>::zeros(block, size);
    qr::qr_in_place(
        factors.as_mut(),
        coeff.as_mut(),
        PAR,
        MemStack::new(&mut MemBuffer::new(qr::qr_in_place_scratch::<c64>(m, n, block, PAR, Default::default()))),
        Default::default(),
    );
    let rdiag: Vec<c64> = (0..size).map(|j| factors[(j, j)]).collect();
    let mut q = Mat::<c64>::identity(m, m);
    householder::apply_block_householder_sequence_on_the_left_in_place_with_conj(
        factors.as_ref(),
        coeff.as_ref(),
        faer::Conj::No,
        q.as_mut(),
        PAR,
        MemStack::new(&mut MemBuffer::new(
            householder::apply_block_householder_sequence_on_the_left_in_place_scratch::<c64>(m, block, m),
        )),
    );
    (q, rdiag)
}

/// General complex eigendecomposition: eigenvalues and right eigenvectors.
pub(crate) fn eigen(a: MatRef<'_, c64>) -> Result<(Vec<c64>, Mat<c64>), evd::EvdError> {
    let n = a.nrows();
    let mut vectors = Mat::<c64>::zeros(n, n);
    let mut values = faer::diag::Diag::<c64>::zeros(n);
    evd::evd_cplx(
        a,
        values.as_mut(),
        None,
        Some(vectors.as_mut()),
        PAR,
        MemStack::new(&mut MemBuffer::new(evd::evd_scratch::<c64>(
            n,
            evd::ComputeEigenvectors::No,
            evd::ComputeEigenvectors::Yes,
            PAR,
            Default::default(),
        ))),
        Default::default(),
    )?;
    let values = (0..n).map(|i| values[i]).collect();
    Ok((values, vectors))
}

/// Singular values (descending) and the full right singular vector matrix.
pub(crate) fn svd_right(a: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>), svd::SvdError> {
    let (m, n) = a.shape();
    let mut s = faer::diag::Diag::<c64>::zeros(m.min(n));
    let mut v = Mat::<c64>::zeros(n, n);
    svd::svd(
        a,
        s.as_mut(),
        None,
        Some(v.as_mut()),
        PAR,
        MemStack::new(&mut MemBuffer::new(svd::svd_scratch::<c64>(
            m,
            n,
            svd::ComputeSvdVectors::No,
            svd::ComputeSvdVectors::Full,
            PAR,
            Default::default(),
        ))),
        Default::default(),
    )?;
    let s = (0..m.min(n)).map(|i| s[i].re).collect();
    Ok((s, v))
}

/// `max |(A†A − I)_ij|`.
pub(crate) fn unitarity_defect(a: MatRef<'_, c64>) -> f64 {
    let gram = mul(a.adjoint(), a);
    let n = gram.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - c64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>, evd::EvdError> {
    let n = a.nrows();
    let mut s = faer::diag::Diag::<c64>::zeros(n);
    evd::self_adjoint_evd(
        a,
        s.as_mut(),
        None,
        PAR,
        MemStack::new(&mut MemBuffer::new(evd::self_adjoint_evd_scratch::<c64>(
            n,
            evd::ComputeEigenvectors::No,
            PAR,
            Default::default(),
        ))),
        Default::default(),
    )?;
    Ok((0..n).map(|i| s[i].re).collect())
}
