//! Matrix-group numerics on U(4): exponentials, the `P0` family, Euler angles of
//! local operations and Maurer-Cartan forms of parametrized curves.

use std::f64::consts::{PI, TAU};
use std::ops::Mul;

use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{generator_fundamental, GeneratorLabel};
use crate::linalg::{
    block, block_diag, c, cis, expi_hermitian, frobenius, hermiticity_defect, unitarity_defect,
    Mat2, Mat4, C64, I, ZERO,
};

pub const UNITARY_TOL: f64 = 1e-8;
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Off-diagonal block weight below which a matrix counts as block-diagonal.
pub const BLOCK_TOL: f64 = 1e-8;

/// A 4x4 unitary on the optical modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary4(Mat4);

impl Unitary4 {
    pub fn new(m: Mat4) -> Result<Self> {
        Self::with_tolerance(m, UNITARY_TOL)
    }

    pub fn with_tolerance(m: Mat4, tol: f64) -> Result<Self> {
        let defect = unitarity_defect(&m);
        if defect <= tol {
            Ok(Self(m))
        } else {
            Err(Error::NonUnitaryInput { defect })
        }
    }

    /// Wrap a matrix that is unitary by construction.
    pub(crate) fn assume(m: Mat4) -> Self {
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Mat4::identity())
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn into_inner(self) -> Mat4 {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }
}

impl Mul for Unitary4 {
    type Output = Unitary4;

    fn mul(self, rhs: Unitary4) -> Unitary4 {
        Unitary4(self.0 * rhs.0)
    }
}

impl From<Unitary4> for Mat4 {
    fn from(u: Unitary4) -> Mat4 {
        u.0
    }
}

/// `exp(i s H)` for Hermitian `H` (4x4 or 10x10).
pub fn expm<const N: usize>(h: &SMatrix<C64, N, N>, s: f64) -> Result<SMatrix<C64, N, N>> {
    let defect = hermiticity_defect(h);
    if defect.is_nan() || defect > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput { defect });
    }
    Ok(expi_hermitian(h, s))
}

/// `P0(x_H, x_V) = exp(i x_H J_HHx) exp(i x_V J_VVx)`: rotates `(aH, bH)` by
/// `x_H / 2` and `(aV, bV)` by `x_V / 2`.
pub fn p0(x_h: f64, x_v: f64) -> Unitary4 {
    let (ch, sh) = ((x_h / 2.0).cos(), (x_h / 2.0).sin());
    let (cv, sv) = ((x_v / 2.0).cos(), (x_v / 2.0).sin());
    let cc = Mat2::from_diagonal(&nalgebra::Vector2::new(c(ch, 0.0), c(cv, 0.0)));
    let ss = Mat2::from_diagonal(&nalgebra::Vector2::new(c(0.0, sh), c(0.0, sv)));
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&cc);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&ss);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&ss);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&cc);
    Unitary4(m)
}

/// Euler angles of a local operation, one `U(2)` per spatial channel:
/// `e^{i alpha Jz} e^{i beta Jy} e^{i gamma Jz} e^{i delta J0}`.
///
/// Canonical ranges: `alpha, gamma` in `[0, 2pi)`, `beta` in `[0, pi]`,
/// `delta` in `[0, 4pi)`. The doubled `delta` range is what makes the
/// parametrization cover all of `U(2)`: `-1` is reached by shifting `delta` by
/// `2pi`, which the `SU(2)` factor alone cannot absorb with `alpha, gamma < 2pi`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EulerParamsLO {
    pub alpha_a: f64,
    pub beta_a: f64,
    pub gamma_a: f64,
    pub delta_a: f64,
    pub alpha_b: f64,
    pub beta_b: f64,
    pub gamma_b: f64,
    pub delta_b: f64,
}

impl EulerParamsLO {
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.alpha_a,
            self.beta_a,
            self.gamma_a,
            self.delta_a,
            self.alpha_b,
            self.beta_b,
            self.gamma_b,
            self.delta_b,
        ]
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        Self {
            alpha_a: a[0],
            beta_a: a[1],
            gamma_a: a[2],
            delta_a: a[3],
            alpha_b: a[4],
            beta_b: a[5],
            gamma_b: a[6],
            delta_b: a[7],
        }
    }

    /// Generators multiplying each parameter, in product order.
    pub const GENERATORS: [GeneratorLabel; 8] = [
        GeneratorLabel::Jaz,
        GeneratorLabel::Jay,
        GeneratorLabel::Jaz,
        GeneratorLabel::Ja0,
        GeneratorLabel::Jbz,
        GeneratorLabel::Jby,
        GeneratorLabel::Jbz,
        GeneratorLabel::Jb0,
    ];
}

fn rz(angle: f64) -> Mat2 {
    Mat2::new(cis(angle / 2.0), ZERO, ZERO, cis(-angle / 2.0))
}

fn ry(angle: f64) -> Mat2 {
    let (cb, sb) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    Mat2::new(c(cb, 0.0), c(sb, 0.0), c(-sb, 0.0), c(cb, 0.0))
}

pub(crate) fn euler_block(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Mat2 {
    rz(alpha) * ry(beta) * rz(gamma) * cis(delta / 2.0)
}

pub fn euler_to_unitary(p: &EulerParamsLO) -> Unitary4 {
    let a = euler_block(p.alpha_a, p.beta_a, p.gamma_a, p.delta_a);
    let b = euler_block(p.alpha_b, p.beta_b, p.gamma_b, p.delta_b);
    Unitary4(block_diag(&a, &b))
}

/// Reduce `x` into `[0, period)`, returning the number of periods removed.
fn wrap(x: f64, period: f64) -> (f64, i64) {
    let k = (x / period).floor();
    let mut r = x - k * period;
    let mut k = k as i64;
    if r >= period {
        r -= period;
        k += 1;
    }
    if r < 0.0 {
        r += period;
        k -= 1;
    }
    (r, k)
}

/// Threshold on `|cos(beta/2)|` or `|sin(beta/2)|` below which the Euler
/// angles are treated as degenerate and `gamma` is set to zero.
const EULER_DEGENERATE: f64 = 1e-12;

/// Euler angles `(alpha, beta, gamma, delta)` of a 2x2 unitary.
pub(crate) fn block_to_euler(u: &Mat2) -> [f64; 4] {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let (delta0, _) = wrap(det.arg(), TAU);
    let su = u * cis(-delta0 / 2.0);
    let (a, b) = (su[(0, 0)], su[(0, 1)]);
    let beta = 2.0 * b.norm().atan2(a.norm());
    let (alpha_raw, gamma_raw) = if b.norm() <= EULER_DEGENERATE {
        (2.0 * a.arg(), 0.0)
    } else if a.norm() <= EULER_DEGENERATE {
        (2.0 * b.arg(), 0.0)
    } else {
        (a.arg() + b.arg(), a.arg() - b.arg())
    };
    let (alpha, ka) = wrap(alpha_raw, TAU);
    let (gamma, kg) = wrap(gamma_raw, TAU);
    // each 2pi shift of alpha or gamma flips the sign of the SU(2) factor
    let delta = if (ka + kg).rem_euclid(2) == 1 {
        delta0 + TAU
    } else {
        delta0
    };
    let (delta, _) = wrap(delta, 2.0 * TAU);
    [alpha, beta.clamp(0.0, PI), gamma, delta]
}

pub fn off_diagonal_weight(m: &Mat4) -> f64 {
    (frobenius(&block(m, 0, 1)).powi(2) + frobenius(&block(m, 1, 0)).powi(2)).sqrt()
}

/// Euler angles of a block-diagonal unitary.
pub fn unitary_to_euler(k: &Unitary4) -> Result<EulerParamsLO> {
    let weight = off_diagonal_weight(k.matrix());
    if weight > BLOCK_TOL {
        return Err(Error::NotBlockDiagonal { weight });
    }
    let [aa, ba, ga, da] = block_to_euler(&block(k.matrix(), 0, 0));
    let [ab, bb, gb, db] = block_to_euler(&block(k.matrix(), 1, 1));
    Ok(EulerParamsLO::from_array([aa, ba, ga, da, ab, bb, gb, db]))
}

/// A differentiable curve `s -> G(s)` of unitaries.
pub trait UnitaryCurve<const N: usize> {
    fn at(&self, s: f64) -> SMatrix<C64, N, N>;

    /// `dG/ds` in closed form, when the curve knows it.
    fn derivative(&self, _s: f64) -> Option<SMatrix<C64, N, N>> {
        None
    }
}

impl<const N: usize, F> UnitaryCurve<N> for F
where
    F: Fn(f64) -> SMatrix<C64, N, N>,
{
    fn at(&self, s: f64) -> SMatrix<C64, N, N> {
        self(s)
    }
}

/// `G(s) = L exp(i (s - s0) J) R` with Hermitian `J`.
#[derive(Debug, Clone)]
pub struct ExponentialCurve<const N: usize> {
    pub left: SMatrix<C64, N, N>,
    pub generator: SMatrix<C64, N, N>,
    pub right: SMatrix<C64, N, N>,
    pub s0: f64,
}

impl<const N: usize> ExponentialCurve<N> {
    pub fn new(generator: SMatrix<C64, N, N>) -> Self {
        Self {
            left: SMatrix::identity(),
            generator,
            right: SMatrix::identity(),
            s0: 0.0,
        }
    }
}

impl<const N: usize> UnitaryCurve<N> for ExponentialCurve<N> {
    fn at(&self, s: f64) -> SMatrix<C64, N, N> {
        self.left * expi_hermitian(&self.generator, s - self.s0) * self.right
    }

    fn derivative(&self, s: f64) -> Option<SMatrix<C64, N, N>> {
        let e = expi_hermitian(&self.generator, s - self.s0);
        Some(self.left * self.generator * e * self.right * I)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McMode {
    /// Closed-form derivative; falls back to finite differences for curves that
    /// do not provide one.
    Analytic,
    FiniteDifference,
}

/// `Theta/ds = i G^dagger dG/ds` sampled at one pseudotime.
#[derive(Debug, Clone, PartialEq)]
pub struct MaurerCartanSample<const N: usize> {
    pub matrix: SMatrix<C64, N, N>,
    pub s: f64,
}

pub fn finite_difference_step(s: f64) -> f64 {
    1e-6 * s.abs().max(1.0)
}

pub fn maurer_cartan<const N: usize, C: UnitaryCurve<N> + ?Sized>(
    curve: &C,
    s: f64,
    mode: McMode,
) -> MaurerCartanSample<N> {
    let g = curve.at(s);
    let derivative = match (mode, curve.derivative(s)) {
        (McMode::Analytic, Some(d)) => d,
        _ => {
            let h = finite_difference_step(s);
            (curve.at(s + h) - curve.at(s - h)) / c(2.0 * h, 0.0)
        }
    };
    let theta = g.adjoint() * derivative * I;
    // the exact form is Hermitian; symmetrize away the rounding
    let matrix = (theta + theta.adjoint()) * c(0.5, 0.0);
    MaurerCartanSample { matrix, s }
}

/// Maurer-Cartan form of the Euler parametrization with `alpha_b` and `delta_b`
/// held fixed, as a function of the parameter rates. No `d(delta_b)` term and no
/// `cos(beta_b) d(alpha_b) J_bz` term appear; the expression is only complete for
/// curves that leave `alpha_b` and `delta_b` constant.
pub fn euler_maurer_cartan(p: &EulerParamsLO, rate: &EulerParamsLO) -> Mat4 {
    use GeneratorLabel::*;
    let j = |l| generator_fundamental(l);
    let r = |x: f64| c(x, 0.0);
    let (ba, ga, bb, gb) = (p.beta_a, p.gamma_a, p.beta_b, p.gamma_b);
    let term_az = ba.cos() * rate.alpha_a + rate.gamma_a;
    let term_bz = rate.gamma_b;
    let term_ax = ga.cos() * ba.sin() * rate.alpha_a - ga.sin() * rate.beta_a;
    let term_bx = gb.cos() * bb.sin() * rate.alpha_b - gb.sin() * rate.beta_b;
    let term_ay = ga.sin() * ba.sin() * rate.alpha_a + ga.cos() * rate.beta_a;
    let term_by = gb.sin() * bb.sin() * rate.alpha_b + gb.cos() * rate.beta_b;
    let term_a0 = rate.delta_a;
    -(j(Jaz) * r(term_az)
        + j(Jbz) * r(term_bz)
        + j(Jax) * r(term_ax)
        + j(Jbx) * r(term_bx)
        + j(Jay) * r(term_ay)
        + j(Jby) * r(term_by)
        + j(Ja0) * r(term_a0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::GeneratorLabel::*;
    use crate::linalg::ONE;
    use rand::{Rng, SeedableRng};

    fn fundamental(l: GeneratorLabel) -> Mat4 {
        generator_fundamental(l)
    }

    #[test]
    fn expm_examples() {
        let u = expm(&fundamental(Jaz), TAU).unwrap();
        let want = Mat4::from_diagonal(&nalgebra::Vector4::new(-ONE, -ONE, ONE, ONE));
        assert!(frobenius(&(u - want)) < 1e-14);

        let u = expm(&fundamental(JHHx), PI).unwrap();
        let mut want = Mat4::identity();
        want[(0, 0)] = ZERO;
        want[(2, 2)] = ZERO;
        want[(0, 2)] = I;
        want[(2, 0)] = I;
        assert!(frobenius(&(u - want)) < 1e-14);

        assert!(frobenius(&(expm(&fundamental(JVHy), 0.0).unwrap() - Mat4::identity())) < 1e-15);
    }

    #[test]
    fn expm_rejects_non_hermitian() {
        let mut h = Mat4::zeros();
        h[(0, 1)] = ONE;
        assert!(matches!(
            expm(&h, 1.0),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn expm_group_law() {
        let h =
            fundamental(Jax) * c(0.3, 0.0) + fundamental(JHVy) * c(-1.2, 0.0) + fundamental(Jb0);
        let a = expm(&h, 0.7).unwrap();
        let b = expm(&h, -1.9).unwrap();
        assert!(frobenius(&(a * b - expm(&h, -1.2).unwrap())) < 1e-12);
        assert!(frobenius(&(expm(&h, -0.7).unwrap() - a.adjoint())) < 1e-12);
        assert!(unitarity_defect(&a) < 1e-13);
    }

    #[test]
    fn p0_matches_exponentials() {
        for (x, y) in [(0.0, 0.0), (PI, PI), (TAU, TAU), (0.4, 2.9), (-1.0, 5.0)] {
            let dense = expm(&fundamental(JHHx), x).unwrap() * expm(&fundamental(JVVx), y).unwrap();
            assert!(frobenius(&(p0(x, y).into_inner() - dense)) < 1e-14);
        }
        assert!(frobenius(&(p0(TAU, TAU).into_inner() + Mat4::identity())) < 1e-14);
        let swap = p0(PI, PI).into_inner();
        for (i, j) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
            assert!((swap[(i, j)] - I).norm() < 1e-15);
        }
    }

    #[test]
    fn euler_examples() {
        assert_eq!(
            euler_to_unitary(&EulerParamsLO::default()).into_inner(),
            Mat4::identity()
        );
        let beta = 0.83;
        let u = euler_to_unitary(&EulerParamsLO {
            beta_a: beta,
            ..Default::default()
        });
        let dense = expm(&fundamental(Jay), beta).unwrap();
        assert!(frobenius(&(u.into_inner() - dense)) < 1e-14);
        assert!((u.matrix()[(0, 1)] - c((beta / 2.0).sin(), 0.0)).norm() < 1e-15);
        let delta = 1.1;
        let u = euler_to_unitary(&EulerParamsLO {
            delta_a: delta,
            ..Default::default()
        });
        assert!((u.matrix()[(0, 0)] - cis(delta / 2.0)).norm() < 1e-15);
        assert!((u.matrix()[(2, 2)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn euler_matches_ordered_exponentials() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let p: [f64; 8] = std::array::from_fn(|_| rng.random_range(-7.0..7.0));
            let product = EulerParamsLO::GENERATORS
                .iter()
                .zip(p)
                .fold(Mat4::identity(), |acc, (l, x)| {
                    acc * expm(&fundamental(*l), x).unwrap()
                });
            let u = euler_to_unitary(&EulerParamsLO::from_array(p));
            assert!(frobenius(&(u.into_inner() - product)) < 1e-12);
        }
    }

    #[test]
    fn euler_extraction_edge_cases() {
        let p = unitary_to_euler(&Unitary4::identity()).unwrap();
        assert_eq!(p.to_array(), [0.0; 8]);

        let phi = 0.9;
        let k = block_diag(&(Mat2::identity() * cis(phi)), &Mat2::identity());
        let p = unitary_to_euler(&Unitary4::new(k).unwrap()).unwrap();
        let want = [0.0, 0.0, 0.0, 2.0 * phi, 0.0, 0.0, 0.0, 0.0];
        for (g, w) in p.to_array().iter().zip(want) {
            assert!((g - w).abs() < 1e-14);
        }

        // -I is outside the span of alpha, gamma < 2pi with delta < 2pi
        let minus = Unitary4::new(-Mat4::identity()).unwrap();
        let p = unitary_to_euler(&minus).unwrap();
        assert!(frobenius(&(euler_to_unitary(&p).into_inner() + Mat4::identity())) < 1e-14);

        assert!(matches!(
            unitary_to_euler(&p0(1.0, 0.0)),
            Err(Error::NotBlockDiagonal { .. })
        ));
    }

    #[test]
    fn euler_round_trip_random() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let p = EulerParamsLO::from_array([
                rng.random_range(0.0..TAU),
                rng.random_range(0.01..PI - 0.01),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
                rng.random_range(0.01..PI - 0.01),
                rng.random_range(0.0..TAU),
                rng.random_range(0.0..TAU),
            ]);
            let q = unitary_to_euler(&euler_to_unitary(&p)).unwrap();
            for (x, y) in p.to_array().iter().zip(q.to_array()) {
                let d = (x - y).rem_euclid(TAU);
                assert!(d.min(TAU - d) < 1e-8, "{p:?} vs {q:?}");
            }
            assert!(q.beta_a >= 0.0 && q.beta_a <= PI);
            assert!((0.0..2.0 * TAU).contains(&q.delta_b));
        }
    }

    #[test]
    fn maurer_cartan_of_exponential_is_minus_generator() {
        let j = fundamental(Jay) * c(0.5, 0.0) + fundamental(Jby) * c(0.5, 0.0);
        let curve = ExponentialCurve::new(j);
        for s in [0.0, 0.4, 3.0, -2.5] {
            let analytic = maurer_cartan(&curve, s, McMode::Analytic).matrix;
            let fd = maurer_cartan(&curve, s, McMode::FiniteDifference).matrix;
            assert!(frobenius(&(analytic + j)) < 1e-14);
            assert!(frobenius(&(fd + j)) < 1e-8);
        }
    }

    #[test]
    fn maurer_cartan_of_p0_curve() {
        let (a, b) = (0.7, -1.3);
        let curve = |s: f64| p0(s * a, s * b).into_inner();
        let theta = maurer_cartan(&curve, 0.9, McMode::FiniteDifference).matrix;
        let want = -(fundamental(JHHx) * c(a, 0.0) + fundamental(JVVx) * c(b, 0.0));
        assert!(frobenius(&(theta - want)) < 1e-8);
    }

    #[test]
    fn maurer_cartan_of_constant_curve() {
        let k = euler_to_unitary(&EulerParamsLO {
            beta_b: 1.0,
            ..Default::default()
        })
        .into_inner();
        let theta = maurer_cartan(&|_s: f64| k, 2.0, McMode::FiniteDifference).matrix;
        assert_eq!(frobenius(&theta), 0.0);
    }

    #[test]
    fn closed_form_euler_maurer_cartan_per_parameter() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        // alpha_b (4) and delta_b (7) are the gauge-fixed parameters
        for index in [0usize, 1, 2, 3, 5, 6] {
            for _ in 0..5 {
                let mut base: [f64; 8] = std::array::from_fn(|_| rng.random_range(0.1..3.0));
                base[4] = 0.0;
                base[7] = 0.0;
                let s = base[index];
                let curve = |t: f64| {
                    let mut q = base;
                    q[index] = t;
                    euler_to_unitary(&EulerParamsLO::from_array(q)).into_inner()
                };
                let sampled = maurer_cartan(&curve, s, McMode::FiniteDifference).matrix;
                let mut rate = [0.0; 8];
                rate[index] = 1.0;
                let closed = euler_maurer_cartan(
                    &EulerParamsLO::from_array(base),
                    &EulerParamsLO::from_array(rate),
                );
                assert!(frobenius(&(sampled - closed)) < 1e-8, "parameter {index}");
            }
        }
    }
}
