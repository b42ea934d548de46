//! Random group elements and generators for sweeps, tests and benchmarks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::fockspace::{GeneratorCombo, GeneratorLabel};
use crate::lie::Unitary4;
use crate::linalg::{block_diag, c, Mat2, Mat4, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random `N x N` unitary: QR of a complex Ginibre matrix with the phases of
/// `R`'s diagonal moved into `Q`.
fn haar<const N: usize, R: Rng + ?Sized>(rng: &mut R) -> nalgebra::SMatrix<C64, N, N> {
    let z = nalgebra::DMatrix::<C64>::from_fn(N, N, |_, _| gaussian(rng));
    let (q, r) = z.qr().unpack();
    let mut q = nalgebra::SMatrix::<C64, N, N>::from_column_slice(q.as_slice());
    for j in 0..N {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..N {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unitary4<R: Rng + ?Sized>(rng: &mut R) -> Unitary4 {
    Unitary4::assume(haar::<4, R>(rng))
}

pub fn random_u2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    haar::<2, R>(rng)
}

/// Haar-random element of `U(2) x U(2)`.
pub fn random_local<R: Rng + ?Sized>(rng: &mut R) -> Unitary4 {
    Unitary4::assume(block_diag(&random_u2(rng), &random_u2(rng)))
}

/// Combination with independent normal coefficients on every label.
pub fn random_combo<R: Rng + ?Sized>(rng: &mut R) -> GeneratorCombo {
    GeneratorLabel::ALL
        .into_iter()
        .fold(GeneratorCombo::zero(), |acc, l| {
            acc.with(l, rng.sample(StandardNormal))
        })
}

/// Combination of local labels only.
pub fn random_local_combo<R: Rng + ?Sized>(rng: &mut R) -> GeneratorCombo {
    GeneratorLabel::ALL
        .into_iter()
        .filter(|l| l.is_local())
        .fold(GeneratorCombo::zero(), |acc, l| {
            acc.with(l, rng.sample(StandardNormal))
        })
}

/// Random Hermitian 4x4 matrix (GUE-like).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let z = Mat4::from_fn(|_, _| gaussian(rng));
    (z + z.adjoint()) * c(0.5, 0.0)
}
