//! Small dense complex matrices and the handful of factorizations built on them.

use nalgebra::{DMatrix, Matrix2, Matrix4, SMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;
pub type Mat10 = SMatrix<C64, 10, 10>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{i phi}`.
#[inline]
pub fn cis(phi: f64) -> C64 {
    C64::from_polar(1.0, phi)
}

pub fn frobenius<const R: usize, const K: usize>(m: &SMatrix<C64, R, K>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||U^dagger U - I||_F`.
pub fn unitarity_defect<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    frobenius(&(m.adjoint() * m - SMatrix::<C64, N, N>::identity()))
}

/// `||H - H^dagger||_F`.
pub fn hermiticity_defect<const N: usize>(m: &SMatrix<C64, N, N>) -> f64 {
    frobenius(&(m - m.adjoint()))
}

/// Eigendecomposition `H = W diag(lambda) W^dagger` of a Hermitian matrix.
///
/// The caller is responsible for Hermiticity; only the lower triangle is read.
pub fn hermitian_eigen<const N: usize>(h: &SMatrix<C64, N, N>) -> (SMatrix<C64, N, N>, [f64; N]) {
    let eig = SymmetricEigen::new(DMatrix::from_column_slice(N, N, h.as_slice()));
    let mut values = [0.0; N];
    for (v, e) in values.iter_mut().zip(eig.eigenvalues.iter()) {
        *v = *e;
    }
    (
        SMatrix::from_column_slice(eig.eigenvectors.as_slice()),
        values,
    )
}

/// `exp(i s H)` for Hermitian `H`, via the spectral decomposition.
pub fn expi_hermitian<const N: usize>(h: &SMatrix<C64, N, N>, s: f64) -> SMatrix<C64, N, N> {
    let (w, lambda) = hermitian_eigen(h);
    let mut scaled = w;
    for (j, l) in lambda.iter().enumerate() {
        let phase = cis(s * l);
        for i in 0..N {
            scaled[(i, j)] *= phase;
        }
    }
    scaled * w.adjoint()
}

/// Block-diagonal 4x4 matrix from two 2x2 blocks (rows/cols 0-1 and 2-3).
pub fn block_diag(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
    m
}

pub fn block(m: &Mat4, row: usize, col: usize) -> Mat2 {
    m.fixed_view::<2, 2>(2 * row, 2 * col).into_owned()
}

/// Unitary polar factor of a nonsingular 2x2 matrix.
pub fn polar_unitary(m: &Mat2) -> Mat2 {
    let svd = nalgebra::SVD::new(*m, true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Multiply `v` by the phase that makes its first non-negligible component real
/// and positive. Returns the phase that was applied.
pub fn fix_phase<const N: usize>(v: &mut nalgebra::SVector<C64, N>) -> C64 {
    let Some(lead) = v.iter().find(|z| z.norm() > 1e-12).copied() else {
        return ONE;
    };
    let phase = lead.conj() / lead.norm();
    *v *= phase;
    phase
}

/// Gram-Schmidt completion: orthonormal basis of the orthogonal complement of the
/// given orthonormal columns, drawn from the canonical basis in order.
pub fn complete_basis<const N: usize>(
    given: &[nalgebra::SVector<C64, N>],
) -> Vec<nalgebra::SVector<C64, N>> {
    let mut basis: Vec<nalgebra::SVector<C64, N>> = given.to_vec();
    let mut extra = Vec::new();
    for k in 0..N {
        if basis.len() == N {
            break;
        }
        let mut v = nalgebra::SVector::<C64, N>::zeros();
        v[k] = ONE;
        for b in &basis {
            let overlap = b.dotc(&v);
            v -= b * overlap;
        }
        // second pass for numerical orthogonality
        for b in &basis {
            let overlap = b.dotc(&v);
            v -= b * overlap;
        }
        let n = v.norm();
        if n > 1e-6 {
            v /= C64::from(n);
            basis.push(v);
            extra.push(v);
        }
    }
    extra
}
