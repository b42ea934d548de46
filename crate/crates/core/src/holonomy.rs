//! Piecewise pseudotime paths, the entanglement-gauge potential along them and
//! the path-ordered Wilson loop.
//!
//! A path is a sequence of one-parameter segments `G_k(s) = exp(i s J_k)`; the
//! cumulative transformation multiplies later segments on the left. With
//! `G(s)` the cumulative two-photon transformation and `Pi` the projector onto
//! the qubit space, the gauge potential per unit pseudotime is
//! `A(s) = i Pi G^dagger dG/ds Pi = -Pi G^dagger J_k G Pi` on segment `k`.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::SMatrix;

use crate::decompose::{classify_closing, qubit_space_leakage, Closing, CLOSURE_TOL};
use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::fockspace::{
    lift_generator, lift_unchecked, project_h11, GeneratorCombo, GeneratorLabel, TwoQubitState,
};
use crate::lie::off_diagonal_weight;
use crate::linalg::{c, cis, expi_hermitian, frobenius, hermitian_eigen, Mat10, Mat4, C64};

/// Generator of one segment: a named combination, or a dense Hermitian matrix
/// for generators outside the label span (such as conjugated ones).
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Combo(GeneratorCombo),
    Dense(Mat4),
}

impl Generator {
    pub fn fundamental(&self) -> Mat4 {
        match self {
            Generator::Combo(combo) => combo.fundamental(),
            Generator::Dense(m) => *m,
        }
    }

    pub fn is_local(&self) -> bool {
        match self {
            Generator::Combo(combo) => combo.is_local(),
            Generator::Dense(m) => off_diagonal_weight(m) == 0.0,
        }
    }
}

impl From<GeneratorCombo> for Generator {
    fn from(c: GeneratorCombo) -> Self {
        Generator::Combo(c)
    }
}

#[derive(Debug, Clone)]
pub struct PathSegment {
    generator: Generator,
    s_start: f64,
    s_end: f64,
    fundamental: Mat4,
    lifted: Mat10,
    eigvecs: Mat4,
    eigvals: [f64; 4],
}

impl PathSegment {
    fn new(generator: Generator, s_start: f64, s_end: f64) -> Result<Self> {
        let fundamental = generator.fundamental();
        let defect = frobenius(&(fundamental - fundamental.adjoint()));
        if defect > crate::lie::HERMITIAN_TOL
            || fundamental
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonHermitianInput { defect });
        }
        let (eigvecs, eigvals) = hermitian_eigen(&fundamental);
        Ok(Self {
            lifted: lift_generator(&fundamental),
            generator,
            s_start,
            s_end,
            fundamental,
            eigvecs,
            eigvals,
        })
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn s_start(&self) -> f64 {
        self.s_start
    }

    pub fn s_end(&self) -> f64 {
        self.s_end
    }

    pub fn length(&self) -> f64 {
        self.s_end - self.s_start
    }

    /// Hermitian generator on the four modes.
    pub fn fundamental(&self) -> &Mat4 {
        &self.fundamental
    }

    /// Hermitian generator on the two-photon space.
    pub fn two_photon(&self) -> &Mat10 {
        &self.lifted
    }

    /// `exp(i t J)` on the four modes.
    pub fn evolution(&self, t: f64) -> Mat4 {
        if t == 0.0 {
            return Mat4::identity();
        }
        let mut scaled = self.eigvecs;
        for (j, l) in self.eigvals.iter().enumerate() {
            let phase = cis(t * l);
            for i in 0..4 {
                scaled[(i, j)] *= phase;
            }
        }
        scaled * self.eigvecs.adjoint()
    }
}

/// Contiguous sequence of segments starting at pseudotime zero.
#[derive(Debug, Clone)]
pub struct Path {
    segments: Vec<PathSegment>,
    /// `prefix[k]`: fundamental transformation accumulated before segment `k`.
    prefix: Vec<Mat4>,
}

impl Path {
    /// Build a path from `(generator, length)` pairs. Lengths must be finite and
    /// non-negative; zero-length segments contribute nothing.
    pub fn new<G: Into<Generator>>(pieces: impl IntoIterator<Item = (G, f64)>) -> Result<Self> {
        let mut segments = Vec::new();
        let mut s = 0.0;
        for (generator, length) in pieces {
            if !length.is_finite() || length < 0.0 {
                return Err(Error::InvalidPath(format!(
                    "segment length {length} must be finite and non-negative"
                )));
            }
            segments.push(PathSegment::new(generator.into(), s, s + length)?);
            s += length;
        }
        if segments.is_empty() {
            return Err(Error::InvalidPath(
                "a path needs at least one segment".into(),
            ));
        }
        let mut prefix = Vec::with_capacity(segments.len());
        let mut acc = Mat4::identity();
        for seg in &segments {
            prefix.push(acc);
            acc = seg.evolution(seg.length()) * acc;
        }
        Ok(Self { segments, prefix })
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn start(&self) -> f64 {
        self.segments[0].s_start
    }

    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].s_end
    }

    /// Segment index containing `s`: the one with `s_start <= s < s_end`, or
    /// the last nonempty segment at the final endpoint.
    pub fn locate(&self, s: f64) -> Result<usize> {
        let (start, end) = (self.start(), self.end());
        if !(s >= start && s <= end) {
            return Err(Error::OutOfRange { s, start, end });
        }
        if let Some(k) = self
            .segments
            .iter()
            .position(|seg| seg.s_start <= s && s < seg.s_end)
        {
            return Ok(k);
        }
        Ok(self
            .segments
            .iter()
            .rposition(|seg| seg.length() > 0.0)
            .unwrap_or(self.segments.len() - 1))
    }

    /// Cumulative transformation on the four modes.
    pub fn cumulative_fundamental(&self, s: f64) -> Result<Mat4> {
        let k = self.locate(s)?;
        let seg = &self.segments[k];
        Ok(seg.evolution(s - seg.s_start) * self.prefix[k])
    }

    /// Transformation at the end of the path, on the four modes.
    pub fn endpoint(&self) -> Mat4 {
        let last = self.segments.len() - 1;
        let seg = &self.segments[last];
        seg.evolution(seg.length()) * self.prefix[last]
    }
}

/// Cumulative two-photon transformation `G(s)`.
pub fn cumulative(path: &Path, s: f64) -> Result<Mat10> {
    Ok(lift_unchecked(&path.cumulative_fundamental(s)?))
}

/// `A/ds` at one pseudotime, on `|HH>, |HV>, |VH>, |VV>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePotentialSample {
    pub matrix: Mat4,
    pub s: f64,
}

pub fn gauge_potential(path: &Path, s: f64) -> Result<GaugePotentialSample> {
    gauge_potential_in_frame(path, &Mat4::identity(), s)
}

/// Gauge potential with the initial basis rotated to `frame |psi_a(0)>`.
pub fn gauge_potential_in_frame(path: &Path, frame: &Mat4, s: f64) -> Result<GaugePotentialSample> {
    let k = path.locate(s)?;
    let g = lift_unchecked(&(path.cumulative_fundamental(s)? * frame));
    let g_qubits: SMatrix<C64, 10, 4> = g.fixed_columns::<4>(0).into_owned();
    let a = -(g_qubits.adjoint() * path.segments[k].two_photon() * g_qubits);
    let matrix = (a + a.adjoint()) * c(0.5, 0.0);
    Ok(GaugePotentialSample { matrix, s })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    /// Stop once successive step doublings differ by at most this (Frobenius).
    pub tol: f64,
    pub max_steps: usize,
    pub strategy: Strategy,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_steps: 1 << 22,
            strategy: Strategy::default(),
        }
    }
}

/// Result of an ordered-exponential evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedExponential {
    pub matrix: Mat4,
    pub steps: usize,
    pub residual: f64,
}

fn midpoint_product<F>(connection: &F, s0: f64, s1: f64, n: usize, strategy: Strategy) -> Mat4
where
    F: Fn(f64) -> Mat4 + Sync,
{
    let h = (s1 - s0) / n as f64;
    exec::ordered_product(n, Mat4::identity(), strategy, |k| {
        let a = connection(s0 + (k as f64 + 0.5) * h);
        expi_hermitian(&a, h)
    })
}

/// `P exp(i int_{s0}^{s1} A(s) ds)` with later pseudotime on the left, by the
/// midpoint product with step doubling.
pub fn ordered_exponential<F>(
    connection: F,
    s0: f64,
    s1: f64,
    opts: &IntegratorOptions,
) -> Result<OrderedExponential>
where
    F: Fn(f64) -> Mat4 + Sync,
{
    let mut n = 8.min(opts.max_steps.max(1));
    let mut previous = midpoint_product(&connection, s0, s1, n, opts.strategy);
    let mut residual = f64::INFINITY;
    loop {
        let next_n = 2 * n;
        if next_n > opts.max_steps {
            return Err(Error::NoConvergence {
                max_steps: opts.max_steps,
                residual,
            });
        }
        let next = midpoint_product(&connection, s0, s1, next_n, opts.strategy);
        residual = frobenius(&(next - previous));
        if residual <= opts.tol {
            return Ok(OrderedExponential {
                matrix: next,
                steps: next_n,
                residual,
            });
        }
        previous = next;
        n = next_n;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilsonOptions {
    pub integrator: IntegratorOptions,
    /// Block tolerance for the closure check.
    pub closure_tol: f64,
    /// Exponentiate segments whose potential is constant in one step.
    pub exact_constant_segments: bool,
}

impl Default for WilsonOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorOptions::default(),
            closure_tol: CLOSURE_TOL,
            exact_constant_segments: true,
        }
    }
}

impl WilsonOptions {
    pub fn with_tol(tol: f64) -> Self {
        let mut opts = Self::default();
        opts.integrator.tol = tol;
        opts
    }
}

/// The geometric phase `K = P exp(i oint A)` acting on the qubit space.
#[derive(Debug, Clone, PartialEq)]
pub struct Holonomy {
    pub matrix: Mat4,
    /// Total exponentials multiplied over all segments.
    pub steps: usize,
    /// Largest final step-doubling change over the integrated segments.
    pub residual: f64,
}

/// Potential samples closer than this count as constant along a segment.
const CONSTANT_TOL: f64 = 1e-12;

pub fn wilson_loop(path: &Path, opts: &WilsonOptions) -> Result<Holonomy> {
    wilson_loop_in_frame(path, &Mat4::identity(), opts)
}

/// Wilson loop computed in the initial basis `frame |psi_a(0)>`.
pub fn wilson_loop_in_frame(path: &Path, frame: &Mat4, opts: &WilsonOptions) -> Result<Holonomy> {
    let endpoint = path.endpoint();
    if !classify_closing(&endpoint, opts.closure_tol).closes() {
        return Err(Error::NotClosed {
            weight: qubit_space_leakage(&endpoint),
        });
    }
    let mut matrix = Mat4::identity();
    let mut steps = 0;
    let mut residual: f64 = 0.0;
    for seg in path.segments().iter().filter(|seg| seg.length() > 0.0) {
        let (s0, s1) = (seg.s_start, seg.s_end);
        let connection = |s: f64| {
            gauge_potential_in_frame(path, frame, s)
                .expect("sample points lie inside the segment")
                .matrix
        };
        let factor = if opts.exact_constant_segments && is_constant(&connection, s0, s1) {
            steps += 1;
            expi_hermitian(&connection(0.5 * (s0 + s1)), s1 - s0)
        } else {
            let ordered = ordered_exponential(connection, s0, s1, &opts.integrator)?;
            steps += ordered.steps;
            residual = residual.max(ordered.residual);
            ordered.matrix
        };
        matrix = factor * matrix;
    }
    Ok(Holonomy {
        matrix,
        steps,
        residual,
    })
}

fn is_constant<F: Fn(f64) -> Mat4>(connection: &F, s0: f64, s1: f64) -> bool {
    let samples = [0.25, 0.5, 0.75].map(|f| connection(s0 + f * (s1 - s0)));
    frobenius(&(samples[0] - samples[1])) <= CONSTANT_TOL
        && frobenius(&(samples[2] - samples[1])) <= CONSTANT_TOL
}

/// Closed form of the worked-example holonomy as a function of the local
/// segment's length `s2`.
pub fn nagp_example_closed_form(s2_end: f64) -> Mat4 {
    let s = 0.5 * (s2_end / 2.0).sin();
    let cp = 0.5 * (1.0 + (s2_end / 2.0).cos());
    let cm = 0.5 * (1.0 - (s2_end / 2.0).cos());
    let rows = [
        [cp, -s, -s, cm], //
        [s, cp, -cm, -s],
        [s, -cm, cp, -s],
        [cm, s, s, cp],
    ];
    Mat4::from_fn(|i, j| c(rows[i][j], 0.0))
}

/// Integers `m, n` and the third segment's length closing a triangle path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureSolution {
    pub m: i64,
    pub n: i64,
    pub s3_end: f64,
}

pub const CLOSURE_EQUATION_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_MN: u32 = 16;

/// Smallest `m + n` (then smallest `m`) with `m, n` of equal parity and
/// `s3 >= 0` such that
/// `s1 cos^2(theta) + s3 cos^2(phi) = m pi` and `s1 sin^2(theta) + s3 sin^2(phi) = n pi`.
/// Adding both equations gives `s3 = (m + n) pi - s1`.
pub fn solve_closure(theta: f64, phi: f64, s1_end: f64, max_mn: u32) -> Result<ClosureSolution> {
    for (name, angle) in [("theta", theta), ("phi", phi)] {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&angle) {
            return Err(Error::InvalidParameter(format!(
                "{name} = {angle} outside [0, pi/2]"
            )));
        }
    }
    if !s1_end.is_finite() || s1_end < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "s1 = {s1_end} must be finite and non-negative"
        )));
    }
    let (ct, st) = (theta.cos().powi(2), theta.sin().powi(2));
    let (cp, sp) = (phi.cos().powi(2), phi.sin().powi(2));
    for total in 0..=max_mn as i64 {
        let s3 = total as f64 * PI - s1_end;
        if s3 < -CLOSURE_EQUATION_TOL {
            continue;
        }
        let s3 = s3.max(0.0);
        for m in 0..=total {
            let n = total - m;
            if (m - n).rem_euclid(2) != 0 {
                continue;
            }
            let first = s1_end * ct + s3 * cp - m as f64 * PI;
            let second = s1_end * st + s3 * sp - n as f64 * PI;
            if first.abs() <= CLOSURE_EQUATION_TOL && second.abs() <= CLOSURE_EQUATION_TOL {
                return Ok(ClosureSolution { m, n, s3_end: s3 });
            }
        }
    }
    Err(Error::NoSolution { max_mn })
}

fn mixing_generator(angle: f64) -> GeneratorCombo {
    GeneratorCombo::single(GeneratorLabel::JHHx, angle.cos().powi(2))
        .with(GeneratorLabel::JVVx, angle.sin().powi(2))
}

/// Three-segment closed path: a nonlocal mixing `P0(s cos^2 theta, s sin^2 theta)`,
/// a local one-parameter subgroup `Kbar(s)`, then `Kbar P0(s cos^2 phi, s sin^2 phi) Kbar^dagger`
/// with `Kbar = Kbar(s2_end)` and the closing length from [`solve_closure`].
pub fn build_triangle_path(
    theta: f64,
    phi: f64,
    s1_end: f64,
    kbar_generator: &GeneratorCombo,
    s2_end: f64,
) -> Result<Path> {
    if !kbar_generator.is_local() {
        return Err(Error::InvalidGenerator(format!(
            "`{kbar_generator}` is not a local generator"
        )));
    }
    if !s2_end.is_finite() || s2_end < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "s2 = {s2_end} must be finite and non-negative"
        )));
    }
    let closure = solve_closure(theta, phi, s1_end, DEFAULT_MAX_MN)?;
    let kbar = expi_hermitian(&kbar_generator.fundamental(), s2_end);
    let conjugated = kbar * mixing_generator(phi).fundamental() * kbar.adjoint();
    let conjugated = (conjugated + conjugated.adjoint()) * c(0.5, 0.0);
    Path::new([
        (Generator::Combo(mixing_generator(theta)), s1_end),
        (Generator::Combo(kbar_generator.clone()), s2_end),
        (Generator::Dense(conjugated), closure.s3_end),
    ])
}

/// The two worked-example loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExampleVariant {
    /// `theta = phi = pi/4`: polarization-independent beamsplitters.
    #[default]
    Diagonal,
    /// `theta = phi = 0`: only the horizontal components are mixed.
    HorizontalOnly,
}

impl ExampleVariant {
    pub fn angles(self) -> (f64, f64) {
        match self {
            ExampleVariant::Diagonal => (FRAC_PI_4, FRAC_PI_4),
            ExampleVariant::HorizontalOnly => (0.0, 0.0),
        }
    }
}

/// Local generator of the worked example, `(J_ay + J_by) / 2`.
pub fn example_local_generator() -> GeneratorCombo {
    GeneratorCombo::single(GeneratorLabel::Jay, 0.5).with(GeneratorLabel::Jby, 0.5)
}

pub fn example_path(s2_end: f64, variant: ExampleVariant) -> Result<Path> {
    let (theta, phi) = variant.angles();
    build_triangle_path(theta, phi, PI, &example_local_generator(), s2_end)
}

/// Holonomies of the worked example over many `s2` values.
pub fn sweep_example(
    s2_values: &[f64],
    variant: ExampleVariant,
    opts: &WilsonOptions,
) -> Vec<Result<Holonomy>> {
    exec::map(s2_values, opts.integrator.strategy, |&s2| {
        wilson_loop(&example_path(s2, variant)?, opts)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TotalTransformation {
    pub fundamental: Mat4,
    pub lifted: Mat10,
    pub restricted: Mat4,
    pub classification: Closing,
}

pub fn total_transformation(path: &Path) -> TotalTransformation {
    let fundamental = path.endpoint();
    let lifted = lift_unchecked(&fundamental);
    TotalTransformation {
        restricted: project_h11(&lifted),
        classification: classify_closing(&fundamental, CLOSURE_TOL),
        fundamental,
        lifted,
    }
}

/// State after one cycle: `rho -> G rho G^dagger` restricted to the qubit space.
pub fn apply_cycle(rho: &TwoQubitState, path: &Path) -> Result<TwoQubitState> {
    let total = total_transformation(path);
    if !total.classification.closes() {
        return Err(Error::NotClosed {
            weight: qubit_space_leakage(&total.fundamental),
        });
    }
    rho.conjugate(&total.restricted)
}
