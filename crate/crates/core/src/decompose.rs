//! Factorizations of U(4) elements into local and nonlocal parts.
//!
//! Every `G` in U(4) splits as `Kbar P0(x_H, x_V) K'` with `Kbar`, `K'` local and
//! `P0` the two-angle beamsplitter family. The constructive route is a
//! cosine-sine decomposition of `G` in its 2x2 channel blocks: the cosine-sine
//! middle factor is exactly `P0(2 d_H, 2 d_V)`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Vector2, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockspace::{leakage, lift_unchecked, GeneratorCombo};
use crate::lie::{
    block_to_euler, euler_block, euler_to_unitary, p0, EulerParamsLO, Unitary4, HERMITIAN_TOL,
};
use crate::linalg::{
    block, block_diag, c, cis, complete_basis, fix_phase, frobenius, hermitian_eigen,
    hermiticity_defect, polar_unitary, Mat2, Mat4, C64, I, ONE,
};

/// Singular values closer than this are treated as equal.
const DEGENERATE: f64 = 1e-12;
/// Norms below this are treated as zero when fixing singular vectors.
const NEGLIGIBLE: f64 = 1e-12;
/// `x_H` and `x_V` closer than this are flagged as degenerate.
pub const DEGENERATE_ANGLE_TOL: f64 = 1e-10;
/// Default tolerance for the block-structure tests.
pub const CLOSURE_TOL: f64 = 1e-8;

/// `G = diag(U1, U2) [[C, iS], [iS, C]] diag(V1, V2)^dagger` with
/// `C = diag(cos d)`, `S = diag(sin d)` and `d` in `[0, pi/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsdFactors {
    pub u1: Mat2,
    pub u2: Mat2,
    pub v1: Mat2,
    pub v2: Mat2,
    pub angles: [f64; 2],
}

impl CsdFactors {
    pub fn middle(&self) -> Mat4 {
        p0(2.0 * self.angles[0], 2.0 * self.angles[1]).into_inner()
    }

    pub fn reconstruct(&self) -> Mat4 {
        block_diag(&self.u1, &self.u2) * self.middle() * block_diag(&self.v1, &self.v2).adjoint()
    }
}

fn column(m: &Mat2, k: usize) -> Vector2<C64> {
    m.column(k).into_owned()
}

/// Left/right singular vectors of the `aa` block with the ordering and phase
/// conventions applied.
fn leading_block_svd(g11: &Mat2) -> (Mat2, [f64; 2], Mat2) {
    let svd = nalgebra::SVD::new(*g11, true, true);
    let sigma = [
        svd.singular_values[0].clamp(0.0, 1.0),
        svd.singular_values[1].clamp(0.0, 1.0),
    ];
    if (sigma[0] - sigma[1]).abs() <= DEGENERATE {
        // any orthonormal right basis works; take the canonical one
        let cval = 0.5 * (sigma[0] + sigma[1]);
        let u1 = if cval > NEGLIGIBLE {
            polar_unitary(g11)
        } else {
            Mat2::identity()
        };
        return (u1, [cval; 2], Mat2::identity());
    }
    let mut u = svd.u.unwrap();
    let mut v = svd.v_t.unwrap().adjoint();
    let mut sigma = sigma;
    // keep the singular vector with the larger H component first
    if u[(0, 1)].norm() > u[(0, 0)].norm() + NEGLIGIBLE {
        u.swap_columns(0, 1);
        v.swap_columns(0, 1);
        sigma.swap(0, 1);
    }
    for k in 0..2 {
        let mut uk = column(&u, k);
        let phase = fix_phase(&mut uk);
        u.set_column(k, &uk);
        let vk = column(&v, k) * phase;
        v.set_column(k, &vk);
    }
    (u, sigma, v)
}

/// Cosine-sine decomposition with respect to the channel blocks.
///
/// Conventions: singular vectors of the `aa` block are ordered with the larger
/// H component first and phased so their first nonzero entry is real positive;
/// for equal singular values the right vectors are the canonical basis.
pub fn cs_decompose(g: &Unitary4) -> CsdFactors {
    let m = g.matrix();
    let (g11, g12, g21, g22) = (
        block(m, 0, 0),
        block(m, 0, 1),
        block(m, 1, 0),
        block(m, 1, 1),
    );
    let (u1, cosines, v1) = leading_block_svd(&g11);

    let t = g21 * v1;
    let sines = [t.column(0).norm(), t.column(1).norm()];
    let angles = [sines[0].atan2(cosines[0]), sines[1].atan2(cosines[1])];

    let (k, o) = if sines[0] >= sines[1] { (0, 1) } else { (1, 0) };
    let u2 = if sines[k] <= NEGLIGIBLE {
        // locally block-diagonal: any U2 with G22 = U2 C V2^dagger
        polar_unitary(&g22)
    } else {
        let uk = column(&t, k) / (I * sines[k]);
        let perp = Vector2::new(-uk[1].conj(), uk[0].conj());
        let projection = perp.dotc(&column(&t, o)) / I;
        let uo = if projection.norm() > NEGLIGIBLE {
            perp * (projection / projection.norm())
        } else {
            let mut p = perp;
            fix_phase(&mut p);
            p
        };
        let mut u2 = Mat2::zeros();
        u2.set_column(k, &uk);
        u2.set_column(o, &uo);
        u2
    };

    // rows of V2^dagger, each from whichever block is better conditioned
    let mut v2_dag = Mat2::zeros();
    for j in 0..2 {
        let row = if cosines[j] >= sines[j] {
            (g22.adjoint() * column(&u2, j)).adjoint() / c(cosines[j], 0.0)
        } else {
            (g12.adjoint() * column(&u1, j)).adjoint() / (I * sines[j])
        };
        v2_dag.set_row(j, &row);
    }
    CsdFactors {
        u1,
        u2,
        v1,
        v2: v2_dag.adjoint(),
        angles: [
            angles[0].clamp(0.0, FRAC_PI_2),
            angles[1].clamp(0.0, FRAC_PI_2),
        ],
    }
}

/// `G = euler_to_unitary(kbar) * P0(x_h, x_v) * kprime`.
///
/// `kbar` is gauge-fixed with `gamma_b = delta_b = 0`: the isotropy of `P0`
/// (generated by `J_az + J_bz` and `J_a0 + J_b0`) multiplies `Kbar` from the
/// right, which shifts the trailing Euler angles `gamma` and `delta` of both
/// channels together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartanFactors {
    pub kbar: EulerParamsLO,
    pub x_h: f64,
    pub x_v: f64,
    #[serde(with = "crate::pathio::matrix4")]
    pub kprime: Mat4,
    /// `x_H == x_V`: the isotropy is larger and the factors are not unique.
    pub degenerate: bool,
}

impl CartanFactors {
    pub fn reconstruct(&self) -> Mat4 {
        euler_to_unitary(&self.kbar).into_inner()
            * p0(self.x_h, self.x_v).into_inner()
            * self.kprime
    }
}

pub fn cartan_kpk(g: &Unitary4) -> CartanFactors {
    let csd = cs_decompose(g);
    let [alpha_b, beta_b, gamma_b, delta_b] = block_to_euler(&csd.u2);
    // exp(-i gamma_b (J_az + J_bz)) exp(-i delta_b (J_a0 + J_b0)), per channel
    let iso = euler_block(0.0, 0.0, -gamma_b, -delta_b);
    let [alpha_a, beta_a, gamma_a, delta_a] = block_to_euler(&(csd.u1 * iso));
    let kbar = EulerParamsLO {
        alpha_a,
        beta_a,
        gamma_a,
        delta_a,
        alpha_b,
        beta_b,
        gamma_b: 0.0,
        delta_b: 0.0,
    };
    let iso_inv = iso.adjoint();
    let kprime = block_diag(&iso_inv, &iso_inv) * block_diag(&csd.v1, &csd.v2).adjoint();
    let (x_h, x_v) = (2.0 * csd.angles[0], 2.0 * csd.angles[1]);
    CartanFactors {
        kbar,
        x_h,
        x_v,
        kprime,
        degenerate: (x_h - x_v).abs() <= DEGENERATE_ANGLE_TOL,
    }
}

/// True when both off-diagonal channel blocks have Frobenius norm `<= tol`.
pub fn is_local(g: &Mat4, tol: f64) -> bool {
    frobenius(&block(g, 0, 1)) <= tol && frobenius(&block(g, 1, 0)) <= tol
}

/// Channel swap `aH <-> bH`, `aV <-> bV`.
pub fn channel_swap() -> Mat4 {
    let mut s = Mat4::zeros();
    for (i, j) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
        s[(i, j)] = ONE;
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closing {
    StrictlyLocal,
    SwapTimesLocal,
    NotClosing,
}

impl Closing {
    pub fn closes(self) -> bool {
        self != Closing::NotClosing
    }

    pub fn name(self) -> &'static str {
        match self {
            Closing::StrictlyLocal => "StrictlyLocal",
            Closing::SwapTimesLocal => "SwapTimesLocal",
            Closing::NotClosing => "NotClosing",
        }
    }
}

impl std::fmt::Display for Closing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Does `G` map the dual-rail qubit space onto itself, and how.
pub fn classify_closing(g: &Mat4, tol: f64) -> Closing {
    if is_local(g, tol) {
        Closing::StrictlyLocal
    } else if is_local(&(channel_swap() * g), tol) {
        Closing::SwapTimesLocal
    } else {
        Closing::NotClosing
    }
}

/// Subspace test: weight the lifted `G` moves from the qubit space into the rest
/// of the two-photon space.
pub fn qubit_space_leakage(g: &Mat4) -> f64 {
    leakage(&lift_unchecked(g))
}

/// One element of a passive mesh, acting on the 4 modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OpticalElement {
    /// On modes `(m, n)`: `[[e^{i phi} cos theta, -sin theta], [e^{i phi} sin theta, cos theta]]`.
    Rotation {
        modes: (usize, usize),
        theta: f64,
        phi: f64,
    },
    /// `diag(e^{i p_k})`.
    Phases { phases: [f64; 4] },
}

impl OpticalElement {
    pub fn matrix(&self) -> Mat4 {
        match *self {
            OpticalElement::Rotation {
                modes: (m, n),
                theta,
                phi,
            } => {
                let mut t = Mat4::identity();
                let (ct, st) = (theta.cos(), theta.sin());
                t[(m, m)] = cis(phi) * ct;
                t[(m, n)] = c(-st, 0.0);
                t[(n, m)] = cis(phi) * st;
                t[(n, n)] = c(ct, 0.0);
                t
            }
            OpticalElement::Phases { phases } => {
                Mat4::from_diagonal(&Vector4::from_fn(|k, _| cis(phases[k])))
            }
        }
    }
}

/// Product of elements in application order (later elements on the left).
pub fn recompose(elements: &[OpticalElement]) -> Mat4 {
    elements
        .iter()
        .fold(Mat4::identity(), |acc, e| e.matrix() * acc)
}

/// Factor a unitary into six nearest-neighbour rotations followed by a phase
/// layer, nulling the lower triangle row by row from the bottom.
pub fn givens_factorize(v: &Mat4) -> Vec<OpticalElement> {
    let mut work = *v;
    let mut elements = Vec::with_capacity(7);
    for row in (1..4).rev() {
        for col in 0..row {
            let (m, n) = (col, col + 1);
            let (a, b) = (work[(row, m)], work[(row, n)]);
            let theta = a.norm().atan2(b.norm());
            let phi = if a.norm() == 0.0 {
                0.0
            } else {
                a.arg() - b.arg()
            };
            let rotation = OpticalElement::Rotation {
                modes: (m, n),
                theta,
                phi,
            };
            work *= rotation.matrix().adjoint();
            elements.push(rotation);
        }
    }
    let phases = std::array::from_fn(|k| work[(k, k)].arg());
    elements.push(OpticalElement::Phases { phases });
    elements
}

/// `exp(i s J) = V^dagger diag(e^{i s c}) V`, with `V` realized as a mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompiledSubgroup {
    #[serde(with = "crate::pathio::matrix4")]
    pub v: Mat4,
    pub c: [f64; 4],
    pub factorization: Vec<OpticalElement>,
}

impl CompiledSubgroup {
    /// The variable phase layer `S(s)`.
    pub fn phase_layer(&self, s: f64) -> Mat4 {
        Mat4::from_diagonal(&Vector4::from_fn(|k, _| cis(s * self.c[k])))
    }

    pub fn evolution(&self, s: f64) -> Mat4 {
        self.v.adjoint() * self.phase_layer(s) * self.v
    }
}

pub fn compile_one_param(j: &GeneratorCombo) -> CompiledSubgroup {
    compile_hermitian(&j.fundamental()).expect("generator combinations are Hermitian")
}

/// Eigen-decompose `J = V^dagger diag(c) V` with `c` descending and factor `V`.
///
/// Within a degenerate eigenspace the basis is Gram-Schmidt on the projected
/// canonical vectors; every row of `V` has its first nonzero entry real positive
/// (in the conjugated sense: the eigenvector does).
pub fn compile_hermitian(h: &Mat4) -> Result<CompiledSubgroup> {
    let defect = hermiticity_defect(h);
    if defect > HERMITIAN_TOL {
        return Err(Error::NonHermitianInput { defect });
    }
    let (w, lambda) = hermitian_eigen(h);
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| lambda[b].total_cmp(&lambda[a]));

    let scale = frobenius(h).max(1.0);
    let mut vectors: Vec<Vector4<C64>> = Vec::with_capacity(4);
    let mut values = Vec::with_capacity(4);
    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && (lambda[order[start]] - lambda[order[end]]).abs() <= 1e-10 * scale {
            end += 1;
        }
        let cluster: Vec<Vector4<C64>> = order[start..end]
            .iter()
            .map(|&k| w.column(k).into_owned())
            .collect();
        let projector = cluster
            .iter()
            .fold(Mat4::zeros(), |acc, v| acc + v * v.adjoint());
        let mut chosen: Vec<Vector4<C64>> = Vec::new();
        for e in 0..4 {
            if chosen.len() == cluster.len() {
                break;
            }
            let mut v = projector.column(e).into_owned();
            for u in &chosen {
                let overlap = u.dotc(&v);
                v -= u * overlap;
            }
            let n = v.norm();
            if n > 1e-6 {
                chosen.push(v / C64::from(n));
            }
        }
        if chosen.len() < cluster.len() {
            // numerically thin projections; fall back to completing the span
            let mut all = vectors.clone();
            all.extend(chosen.iter().copied());
            let extra = complete_basis(&all);
            chosen.extend(extra.into_iter().take(cluster.len() - chosen.len()));
        }
        for mut v in chosen {
            fix_phase(&mut v);
            vectors.push(v);
        }
        for &k in &order[start..end] {
            values.push(lambda[k]);
        }
        start = end;
    }
    let mut eigvecs = Mat4::zeros();
    for (k, v) in vectors.iter().enumerate() {
        eigvecs.set_column(k, v);
    }
    let v = eigvecs.adjoint();
    let factorization = givens_factorize(&v);
    Ok(CompiledSubgroup {
        v,
        c: [values[0], values[1], values[2], values[3]],
        factorization,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockspace::GeneratorLabel::*;
    use crate::lie::{expm, unitary_to_euler};
    use crate::linalg::unitarity_defect;
    use crate::sampling::{random_combo, random_local, random_unitary4};
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn rng(seed: u64) -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(seed)
    }

    #[test]
    fn csd_of_p0_is_trivial() {
        for (x, y) in [(0.3, 2.9), (2.0, 1.0), (PI / 2.0, 0.1)] {
            let f = cs_decompose(&p0(x, y));
            assert!((f.angles[0] - x / 2.0).abs() < 1e-14 && (f.angles[1] - y / 2.0).abs() < 1e-14);
            for m in [f.u1, f.u2, f.v1, f.v2] {
                assert!(frobenius(&(m - Mat2::identity())) < 1e-13, "{m}");
            }
        }
    }

    #[test]
    fn csd_of_local_recovers_blocks() {
        let mut r = rng(2);
        let k = random_local(&mut r);
        let f = cs_decompose(&k);
        assert_eq!(f.angles, [0.0, 0.0]);
        assert!(frobenius(&(f.u1 * f.v1.adjoint() - block(k.matrix(), 0, 0))) < 1e-13);
        assert!(frobenius(&(f.u2 * f.v2.adjoint() - block(k.matrix(), 1, 1))) < 1e-13);
        assert!(frobenius(&(f.reconstruct() - k.matrix())) < 1e-13);
    }

    #[test]
    fn csd_round_trip_random() {
        let mut r = rng(7);
        for _ in 0..500 {
            let g = random_unitary4(&mut r);
            let f = cs_decompose(&g);
            assert!(frobenius(&(f.reconstruct() - g.matrix())) <= 1e-10);
            for m in [f.u1, f.u2, f.v1, f.v2] {
                assert!(unitarity_defect(&m) < 1e-12);
            }
            assert!(f.angles.iter().all(|d| (0.0..=FRAC_PI_2).contains(d)));
        }
    }

    #[test]
    fn csd_handles_full_swap() {
        let f = cs_decompose(&p0(PI, PI));
        assert!((f.angles[0] - FRAC_PI_2).abs() < 1e-15);
        assert!(frobenius(&(f.reconstruct() - p0(PI, PI).matrix())) < 1e-14);
    }

    #[test]
    fn cartan_identity() {
        let f = cartan_kpk(&Unitary4::identity());
        assert_eq!(f.kbar.to_array(), [0.0; 8]);
        assert_eq!((f.x_h, f.x_v), (0.0, 0.0));
        assert!(frobenius(&(f.kprime - Mat4::identity())) < 1e-15);
        assert!(f.degenerate);
    }

    #[test]
    fn cartan_of_half_beamsplitter_times_local() {
        let mut r = rng(9);
        for _ in 0..20 {
            let k = random_local(&mut r);
            let g = p0(PI / 2.0, PI / 2.0) * k;
            let f = cartan_kpk(&g);
            assert!((f.x_h - PI / 2.0).abs() < 1e-12 && (f.x_v - PI / 2.0).abs() < 1e-12);
            assert!(f.degenerate);
            assert!(frobenius(&(f.reconstruct() - g.matrix())) <= 1e-10);
            assert!(is_local(&f.kprime, 1e-12));
        }
    }

    #[test]
    fn cartan_canonicalizes_angles() {
        let g = p0(3.0 * PI / 2.0, 0.0);
        let f = cartan_kpk(&g);
        assert!((f.x_h - PI / 2.0).abs() < 1e-12, "{}", f.x_h);
        assert!(f.x_v.abs() < 1e-12);
        assert!(frobenius(&(f.reconstruct() - g.matrix())) <= 1e-10);
    }

    #[test]
    fn cartan_round_trip_random() {
        let mut r = rng(13);
        for _ in 0..500 {
            let g = random_unitary4(&mut r);
            let f = cartan_kpk(&g);
            assert!(frobenius(&(f.reconstruct() - g.matrix())) <= 1e-10);
            assert_eq!((f.kbar.gamma_b, f.kbar.delta_b), (0.0, 0.0));
            assert!(is_local(&f.kprime, 1e-10));
            assert!((0.0..=PI).contains(&f.x_h) && (0.0..=PI).contains(&f.x_v));
            // kbar in canonical ranges
            let back = unitary_to_euler(&euler_to_unitary(&f.kbar)).unwrap();
            assert!(
                frobenius(
                    &(euler_to_unitary(&back).into_inner()
                        - euler_to_unitary(&f.kbar).into_inner())
                ) < 1e-12
            );
        }
    }

    #[test]
    fn locality_and_closing() {
        let mut r = rng(4);
        assert!(is_local(&Mat4::identity(), 1e-12));
        assert!(!is_local(p0(PI, PI).matrix(), 1e-8));
        let k = euler_to_unitary(&crate::lie::EulerParamsLO::from_array([
            0.3, 1.0, 2.0, 0.1, 4.0, 2.2, 0.5, 3.0,
        ]));
        assert!(is_local(k.matrix(), 1e-14));
        assert_eq!(
            classify_closing(k.matrix(), CLOSURE_TOL),
            Closing::StrictlyLocal
        );
        assert_eq!(
            classify_closing(p0(PI, PI).matrix(), CLOSURE_TOL),
            Closing::SwapTimesLocal
        );
        assert_eq!(
            classify_closing(p0(PI / 2.0, PI / 2.0).matrix(), CLOSURE_TOL),
            Closing::NotClosing
        );
        let g = random_local(&mut r) * p0(PI, PI) * random_local(&mut r);
        assert_eq!(
            classify_closing(g.matrix(), CLOSURE_TOL),
            Closing::SwapTimesLocal
        );
    }

    #[test]
    fn block_test_agrees_with_subspace_test() {
        let mut r = rng(21);
        for i in 0..300 {
            let g = match i % 3 {
                0 => random_local(&mut r),
                1 => random_local(&mut r) * p0(PI, PI) * random_local(&mut r),
                _ => random_unitary4(&mut r),
            };
            let closes = classify_closing(g.matrix(), CLOSURE_TOL).closes();
            let preserved = qubit_space_leakage(g.matrix()) <= CLOSURE_TOL;
            assert_eq!(closes, preserved, "sample {i}");
        }
    }

    #[test]
    fn compile_examples() {
        let compiled = compile_one_param(&GeneratorCombo::single(Jaz, 1.0));
        assert_eq!(compiled.c, [0.5, 0.0, 0.0, -0.5]);
        let mut perm = Mat4::zeros();
        for (row, col) in [(0, 0), (1, 2), (2, 3), (3, 1)] {
            perm[(row, col)] = ONE;
        }
        assert!(frobenius(&(compiled.v - perm)) < 1e-14);

        let bs = GeneratorCombo::single(JHHx, 0.5).with(JVVx, 0.5);
        let compiled = compile_one_param(&bs);
        for (got, want) in compiled.c.iter().zip([0.25, 0.25, -0.25, -0.25]) {
            assert!((got - want).abs() < 1e-14);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rows = [
            [h, 0.0, h, 0.0],
            [0.0, h, 0.0, h],
            [h, 0.0, -h, 0.0],
            [0.0, h, 0.0, -h],
        ];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!((compiled.v[(i, j)] - c(*v, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn compiled_subgroup_reproduces_exponential() {
        let mut r = rng(17);
        for _ in 0..20 {
            let combo = random_combo(&mut r);
            let compiled = compile_one_param(&combo);
            let j = combo.fundamental();
            for s in [0.1, 1.0, PI, 10.0] {
                let err = frobenius(&(compiled.evolution(s) - expm(&j, s).unwrap()));
                assert!(err <= 1e-10, "{err}");
            }
            assert!(frobenius(&(recompose(&compiled.factorization) - compiled.v)) <= 1e-10);
            assert_eq!(compiled.factorization.len(), 7);
            assert!(compiled.c.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn givens_handles_permutations_and_diagonals() {
        for m in [
            channel_swap(),
            Mat4::identity(),
            p0(PI, PI).into_inner(),
            -Mat4::identity(),
        ] {
            assert!(frobenius(&(recompose(&givens_factorize(&m)) - m)) < 1e-14);
        }
    }
}
