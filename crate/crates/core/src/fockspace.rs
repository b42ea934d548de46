//! Optical modes, the two-photon Fock basis and the u(4) generators.
//!
//! Modes are ordered `aH, aV, bH, bV`, so modes 0-1 belong to spatial channel `a`
//! and modes 2-3 to channel `b`. Local operations are then block-diagonal with
//! 2x2 blocks in the fundamental representation.
//!
//! The ten two-photon states are ordered with the dual-rail qubit space first,
//! `|HH>, |HV>, |VH>, |VV>`, followed by the remaining six occupation vectors in
//! ascending lexicographic order.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector4;

use crate::error::{Error, Result};
use crate::linalg::{
    c, frobenius, hermitian_eigen, unitarity_defect, Mat10, Mat4, C64, I, ONE, ZERO,
};

/// Unitarity tolerance applied to matrices handed to [`lift`].
pub const LIFT_UNITARITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    AH = 0,
    AV = 1,
    BH = 2,
    BV = 3,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::AH, Mode::AV, Mode::BH, Mode::BV];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Spatial channel: 0 for `a`, 1 for `b`.
    pub fn channel(self) -> usize {
        self.index() / 2
    }
}

/// Photon occupation numbers of the four modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState(pub [u8; 4]);

impl FockState {
    pub fn occupations(&self) -> [u8; 4] {
        self.0
    }

    pub fn photons(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    /// Position in [`basis_h2`], if this is a two-photon state.
    pub fn index(&self) -> Option<usize> {
        BASIS_H2.iter().position(|s| s == self)
    }

    /// Modes occupied, listed with multiplicity in ascending order.
    fn mode_list(&self) -> [usize; 2] {
        let mut out = [0; 2];
        let mut k = 0;
        for (mode, &n) in self.0.iter().enumerate() {
            for _ in 0..n {
                out[k] = mode;
                k += 1;
            }
        }
        out
    }

    fn factorial_weight(&self) -> f64 {
        self.0
            .iter()
            .map(|&n| if n == 2 { 2.0 } else { 1.0 })
            .product()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, cc, d] = self.0;
        write!(f, "|{a}{b}{cc}{d}>")
    }
}

const BASIS_H2: [FockState; 10] = [
    FockState([1, 0, 1, 0]),
    FockState([1, 0, 0, 1]),
    FockState([0, 1, 1, 0]),
    FockState([0, 1, 0, 1]),
    FockState([0, 0, 0, 2]),
    FockState([0, 0, 1, 1]),
    FockState([0, 0, 2, 0]),
    FockState([0, 2, 0, 0]),
    FockState([1, 1, 0, 0]),
    FockState([2, 0, 0, 0]),
];

/// Canonical ordered basis of the two-photon space.
pub fn basis_h2() -> [FockState; 10] {
    BASIS_H2
}

/// The U(4) highest-weight state `(2,0,0,0)`.
pub fn highest_weight() -> FockState {
    FockState([2, 0, 0, 0])
}

/// Names of the sixteen u(4) basis generators. The first eight generate local
/// operations, the last eight their complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorLabel {
    Jax,
    Jay,
    Jaz,
    Ja0,
    Jbx,
    Jby,
    Jbz,
    Jb0,
    JHHx,
    JHHy,
    JHVx,
    JHVy,
    JVHx,
    JVHy,
    JVVx,
    JVVy,
}

impl GeneratorLabel {
    pub const ALL: [GeneratorLabel; 16] = [
        GeneratorLabel::Jax,
        GeneratorLabel::Jay,
        GeneratorLabel::Jaz,
        GeneratorLabel::Ja0,
        GeneratorLabel::Jbx,
        GeneratorLabel::Jby,
        GeneratorLabel::Jbz,
        GeneratorLabel::Jb0,
        GeneratorLabel::JHHx,
        GeneratorLabel::JHHy,
        GeneratorLabel::JHVx,
        GeneratorLabel::JHVy,
        GeneratorLabel::JVHx,
        GeneratorLabel::JVHy,
        GeneratorLabel::JVVx,
        GeneratorLabel::JVVy,
    ];

    pub fn token(self) -> &'static str {
        use GeneratorLabel::*;
        match self {
            Jax => "J_ax",
            Jay => "J_ay",
            Jaz => "J_az",
            Ja0 => "J_a0",
            Jbx => "J_bx",
            Jby => "J_by",
            Jbz => "J_bz",
            Jb0 => "J_b0",
            JHHx => "J_HHx",
            JHHy => "J_HHy",
            JHVx => "J_HVx",
            JHVy => "J_HVy",
            JVHx => "J_VHx",
            JVHy => "J_VHy",
            JVVx => "J_VVx",
            JVVy => "J_VVy",
        }
    }

    pub fn is_local(self) -> bool {
        (self as usize) < 8
    }
}

impl fmt::Display for GeneratorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for GeneratorLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GeneratorLabel::ALL
            .into_iter()
            .find(|l| l.token() == s)
            .ok_or_else(|| Error::InvalidGenerator(format!("unknown generator token `{s}`")))
    }
}

/// `a_i^dagger a_j` in the fundamental (one-photon) representation.
fn unit(i: usize, j: usize) -> Mat4 {
    let mut m = Mat4::zeros();
    m[(i, j)] = ONE;
    m
}

fn x_pair(i: usize, j: usize) -> Mat4 {
    (unit(i, j) + unit(j, i)) * c(0.5, 0.0)
}

fn y_pair(i: usize, j: usize) -> Mat4 {
    (unit(i, j) - unit(j, i)) / (I * 2.0)
}

/// Generator matrix acting on single-photon states.
pub fn generator_fundamental(label: GeneratorLabel) -> Mat4 {
    use GeneratorLabel::*;
    const AH: usize = 0;
    const AV: usize = 1;
    const BH: usize = 2;
    const BV: usize = 3;
    let half = c(0.5, 0.0);
    match label {
        Jax => x_pair(AH, AV),
        Jay => y_pair(AH, AV),
        Jaz => (unit(AH, AH) - unit(AV, AV)) * half,
        Ja0 => (unit(AH, AH) + unit(AV, AV)) * half,
        Jbx => x_pair(BH, BV),
        Jby => y_pair(BH, BV),
        Jbz => (unit(BH, BH) - unit(BV, BV)) * half,
        Jb0 => (unit(BH, BH) + unit(BV, BV)) * half,
        JHHx => x_pair(AH, BH),
        JHHy => y_pair(AH, BH),
        JHVx => x_pair(AH, BV),
        JHVy => y_pair(AH, BV),
        JVHx => x_pair(AV, BH),
        JVHy => y_pair(AV, BH),
        JVVx => x_pair(AV, BV),
        JVVy => y_pair(AV, BV),
    }
}

/// Matrix of the bilinear `a_i^dagger a_j` on the two-photon basis.
pub fn hopping_two_photon(i: usize, j: usize) -> Mat10 {
    let mut m = Mat10::zeros();
    for (col, state) in BASIS_H2.iter().enumerate() {
        let mut occ = state.0;
        if occ[j] == 0 {
            continue;
        }
        let mut amp = (occ[j] as f64).sqrt();
        occ[j] -= 1;
        amp *= (occ[i] as f64 + 1.0).sqrt();
        occ[i] += 1;
        let row = FockState(occ).index().expect("photon number is conserved");
        m[(row, col)] += c(amp, 0.0);
    }
    m
}

/// Second-quantized image `sum_ij h_ij a_i^dagger a_j` of a one-photon operator.
pub fn lift_generator(h: &Mat4) -> Mat10 {
    let mut out = Mat10::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let coeff = h[(i, j)];
            if coeff != ZERO {
                out += hopping_two_photon(i, j) * coeff;
            }
        }
    }
    out
}

/// Generator matrix acting on the two-photon space.
pub fn generator_two_photon(label: GeneratorLabel) -> Mat10 {
    lift_generator(&generator_fundamental(label))
}

/// Real combination of the sixteen named generators.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeneratorCombo {
    coefficients: BTreeMap<GeneratorLabel, f64>,
}

impl GeneratorCombo {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(label: GeneratorLabel, coefficient: f64) -> Self {
        Self::zero().with(label, coefficient)
    }

    /// Add `coefficient` to the weight of `label`.
    pub fn with(mut self, label: GeneratorLabel, coefficient: f64) -> Self {
        *self.coefficients.entry(label).or_insert(0.0) += coefficient;
        self
    }

    pub fn from_terms<I: IntoIterator<Item = (GeneratorLabel, f64)>>(terms: I) -> Result<Self> {
        let mut combo = Self::zero();
        for (label, coeff) in terms {
            if !coeff.is_finite() {
                return Err(Error::InvalidGenerator(format!(
                    "non-finite coefficient for {label}"
                )));
            }
            combo = combo.with(label, coeff);
        }
        Ok(combo)
    }

    pub fn coefficient(&self, label: GeneratorLabel) -> f64 {
        self.coefficients.get(&label).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (GeneratorLabel, f64)> + '_ {
        self.coefficients.iter().map(|(l, v)| (*l, *v))
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.values().all(|v| *v == 0.0)
    }

    /// True when every nonzero term is a local generator.
    pub fn is_local(&self) -> bool {
        self.terms().all(|(l, v)| l.is_local() || v == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coefficients: self
                .coefficients
                .iter()
                .map(|(l, v)| (*l, v * factor))
                .collect(),
        }
    }

    pub fn fundamental(&self) -> Mat4 {
        self.terms().fold(Mat4::zeros(), |acc, (l, v)| {
            acc + generator_fundamental(l) * c(v, 0.0)
        })
    }

    pub fn two_photon(&self) -> Mat10 {
        lift_generator(&self.fundamental())
    }
}

impl fmt::Display for GeneratorCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (label, v) in self.terms().filter(|(_, v)| *v != 0.0) {
            if !first {
                f.write_str(" + ")?;
            }
            write!(f, "{v}*{label}")?;
            first = false;
        }
        Ok(())
    }
}

/// Permanent-based lift of a 4x4 matrix onto the two-photon space.
///
/// `<S|lift(g)|T> = perm(g[S, T]) / sqrt(S! T!)`, with `S`, `T` the occupied
/// modes listed with multiplicity. This is a homomorphism for any `g`; it is
/// unitary when `g` is.
pub fn lift_unchecked(g: &Mat4) -> Mat10 {
    let mut out = Mat10::zeros();
    for (r, row_state) in BASIS_H2.iter().enumerate() {
        let [i1, i2] = row_state.mode_list();
        for (k, col_state) in BASIS_H2.iter().enumerate() {
            let [j1, j2] = col_state.mode_list();
            let perm = g[(i1, j1)] * g[(i2, j2)] + g[(i1, j2)] * g[(i2, j1)];
            let norm = (row_state.factorial_weight() * col_state.factorial_weight()).sqrt();
            out[(r, k)] = perm / norm;
        }
    }
    out
}

/// Lift a unitary on the four modes to the two-photon space.
pub fn lift(g: &Mat4) -> Result<Mat10> {
    let defect = unitarity_defect(g);
    if defect.is_nan() || defect > LIFT_UNITARITY_TOL {
        return Err(Error::NonUnitaryInput { defect });
    }
    Ok(lift_unchecked(g))
}

/// Leading 4x4 block: the restriction onto the dual-rail qubit space.
pub fn project_h11(m: &Mat10) -> Mat4 {
    m.fixed_view::<4, 4>(0, 0).into_owned()
}

/// Weight `||(1 - Pi) M Pi||_F` that `M` moves out of the qubit space.
pub fn leakage(m: &Mat10) -> f64 {
    frobenius(&m.fixed_view::<6, 4>(4, 0).into_owned())
}

pub const HH: usize = 0;
pub const HV: usize = 1;
pub const VH: usize = 2;
pub const VV: usize = 3;

/// Density matrix on `|HH>, |HV>, |VH>, |VV>`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: Mat4,
}

impl TwoQubitState {
    pub const HERMITIAN_TOL: f64 = 1e-10;
    pub const TRACE_TOL: f64 = 1e-10;
    pub const PSD_TOL: f64 = 1e-12;

    pub fn new(matrix: Mat4) -> Result<Self> {
        let herm = frobenius(&(matrix - matrix.adjoint()));
        if herm > Self::HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {herm:.3e})"
            )));
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > Self::TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let sym = (matrix + matrix.adjoint()) * c(0.5, 0.0);
        let (_, eigenvalues) = hermitian_eigen(&sym);
        if let Some(min) = eigenvalues.iter().copied().reduce(f64::min) {
            if min < -Self::PSD_TOL {
                return Err(Error::InvalidState(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(Self { matrix })
    }

    /// Projector onto a (normalized) pure state.
    pub fn pure(psi: &Vector4<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let v = psi / C64::from(norm);
        Self::new(v * v.adjoint())
    }

    pub fn basis(index: usize) -> Self {
        let mut v = Vector4::zeros();
        v[index] = ONE;
        Self::pure(&v).expect("basis vector is normalized")
    }

    pub fn phi_plus() -> Self {
        Self::pure(&Vector4::new(ONE, ZERO, ZERO, ONE)).unwrap()
    }

    pub fn phi_minus() -> Self {
        Self::pure(&Vector4::new(ONE, ZERO, ZERO, -ONE)).unwrap()
    }

    pub fn psi_plus() -> Self {
        Self::pure(&Vector4::new(ZERO, ONE, ONE, ZERO)).unwrap()
    }

    pub fn psi_minus() -> Self {
        Self::pure(&Vector4::new(ZERO, ONE, -ONE, ZERO)).unwrap()
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    /// `U rho U^dagger`, revalidated.
    pub fn conjugate(&self, u: &Mat4) -> Result<Self> {
        Self::new(u * self.matrix * u.adjoint())
    }
}
