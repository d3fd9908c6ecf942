//! Dense complex linear algebra for single qudits and bipartite pure states.
//!
//! Everything here is small and dense: a qudit of dimension `d` is a vector of
//! `d` amplitudes, a shared two-qudit state is a `d × d` coefficient matrix
//! `m[i][j]` (Alice's index first), and local operations act on that matrix
//! from the left (Alice) or the right (Bob).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Squared-norm tolerance for normalized vectors and states.
pub const NORM_TOL: f64 = 1e-12;
/// Max entrywise deviation of `U†U` from the identity.
pub const UNITARY_TOL: f64 = 1e-10;
/// Probabilities below this are treated as impossible measurement branches.
pub const ZERO_BRANCH_TOL: f64 = 1e-15;
/// Residual norm below which a Gram-Schmidt candidate is considered dependent.
pub const DEPENDENCE_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Build a complex scalar, rejecting NaN and infinities.
pub fn complex(re: f64, im: f64) -> Result<ComplexScalar> {
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(Error::NonFinite("complex scalar"))
    }
}

fn all_finite(values: &[Complex64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn norm_sq(values: &[Complex64]) -> f64 {
    values.iter().map(|z| z.norm_sqr()).sum()
}

/// Which party a local measurement acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Alice,
    Bob,
}

/// A normalized single-qudit state used as a measurement axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    amplitudes: Vec<ComplexScalar>,
}

impl Direction {
    /// Wrap amplitudes that are already normalized.
    pub fn new(amplitudes: Vec<ComplexScalar>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if !all_finite(&amplitudes) {
            return Err(Error::NonFinite("direction"));
        }
        let n = norm_sq(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { amplitudes })
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(mut amplitudes: Vec<ComplexScalar>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if !all_finite(&amplitudes) {
            return Err(Error::NonFinite("direction"));
        }
        let n = norm_sq(&amplitudes).sqrt();
        if n < DEPENDENCE_TOL {
            return Err(Error::NotNormalized(n * n));
        }
        for z in &mut amplitudes {
            *z /= n;
        }
        Ok(Self { amplitudes })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Standard basis vector `|k⟩` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if d == 0 || k >= d {
            return Err(Error::InvalidDimension(d));
        }
        let mut amplitudes = vec![ZERO; d];
        amplitudes[k] = ONE;
        Ok(Self { amplitudes })
    }

    /// Qubit `a|0⟩ + e^{iφ}√(1−a²)|1⟩` with `a ∈ [0, 1]`.
    pub fn qubit(a: f64, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::ParameterOutOfRange { name: "a", value: a });
        }
        if !phase.is_finite() {
            return Err(Error::NonFinite("phase"));
        }
        let s = (1.0 - a * a).max(0.0).sqrt();
        Ok(Self {
            amplitudes: vec![Complex64::new(a, 0.0), Complex64::from_polar(s, phase)],
        })
    }

    /// Qubit `cos t|0⟩ + sin t|1⟩`.
    pub fn from_angle(t: f64) -> Self {
        Self {
            amplitudes: vec![Complex64::new(t.cos(), 0.0), Complex64::new(t.sin(), 0.0)],
        }
    }

    /// Zero-pad into a larger space.
    pub fn embed(&self, d: usize) -> Result<Self> {
        if d < self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: d,
            });
        }
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(d, ZERO);
        Ok(Self { amplitudes })
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[ComplexScalar] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Direction) -> ComplexScalar {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.amplitudes)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Direction {
        Direction {
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }
}

/// A bipartite pure state `Σ m_ij |i⟩_A |j⟩_B`, possibly subnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQuditState {
    dimension: usize,
    coeffs: Vec<ComplexScalar>,
    normalized: bool,
}

impl TwoQuditState {
    /// Normalized state from a row-major `d × d` coefficient matrix.
    pub fn from_matrix(dimension: usize, coeffs: Vec<ComplexScalar>) -> Result<Self> {
        let state = Self::subnormalized(dimension, coeffs)?;
        if !state.normalized {
            return Err(Error::NotNormalized(state.norm_sq()));
        }
        Ok(state)
    }

    /// State with squared norm at most one. Flagged normalized when within tolerance.
    pub fn subnormalized(dimension: usize, coeffs: Vec<ComplexScalar>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if coeffs.len() != dimension * dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension * dimension,
                found: coeffs.len(),
            });
        }
        if !all_finite(&coeffs) {
            return Err(Error::NonFinite("state coefficients"));
        }
        let n = norm_sq(&coeffs);
        if n > 1.0 + NORM_TOL {
            return Err(Error::SuperNormalized(n));
        }
        Ok(Self {
            dimension,
            coeffs,
            normalized: (n - 1.0).abs() <= NORM_TOL,
        })
    }

    /// Normalize an arbitrary nonzero coefficient matrix.
    pub fn normalized_from(dimension: usize, mut coeffs: Vec<ComplexScalar>) -> Result<Self> {
        if !all_finite(&coeffs) {
            return Err(Error::NonFinite("state coefficients"));
        }
        let n = norm_sq(&coeffs).sqrt();
        if n < DEPENDENCE_TOL {
            return Err(Error::NotNormalized(n * n));
        }
        for z in &mut coeffs {
            *z /= n;
        }
        Self::from_matrix(dimension, coeffs)
    }

    /// Two-qubit Schmidt form `√L₀|00⟩ + √(1−L₀)|11⟩`.
    pub fn schmidt(l0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&l0) {
            return Err(Error::InvalidSchmidtWeight(l0));
        }
        let coeffs = vec![
            Complex64::new(l0.sqrt(), 0.0),
            ZERO,
            ZERO,
            Complex64::new((1.0 - l0).sqrt(), 0.0),
        ];
        Self::from_matrix(2, coeffs)
    }

    /// `(1/√d) Σ_j |j⟩|j⟩`
    pub fn fully_entangled(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let amp = Complex64::new(1.0 / (dimension as f64).sqrt(), 0.0);
        let mut coeffs = vec![ZERO; dimension * dimension];
        for j in 0..dimension {
            coeffs[j * dimension + j] = amp;
        }
        Self::from_matrix(dimension, coeffs)
    }

    /// `|alice⟩ ⊗ |bob⟩`
    pub fn product(alice: &Direction, bob: &Direction) -> Result<Self> {
        check_dim(alice.dimension(), bob.dimension())?;
        let coeffs = alice
            .amplitudes
            .iter()
            .flat_map(|a| bob.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self::subnormalized(alice.dimension(), coeffs)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn coeffs(&self) -> &[ComplexScalar] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize, j: usize) -> ComplexScalar {
        self.coeffs[i * self.dimension + j]
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.coeffs)
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Squared Frobenius distance between coefficient matrices.
    pub fn distance_sq(&self, other: &TwoQuditState) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A `d × d` unitary acting on one party.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    dimension: usize,
    entries: Vec<ComplexScalar>,
}

impl LocalUnitary {
    /// Row-major entries `u_ij`; rejects matrices with `‖U†U − I‖_max > 1e-10`.
    pub fn new(dimension: usize, entries: Vec<ComplexScalar>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidDimension(0));
        }
        check_dim(dimension * dimension, entries.len())?;
        if !all_finite(&entries) {
            return Err(Error::NonFinite("unitary"));
        }
        let u = Self { dimension, entries };
        let dev = u.unitarity_deviation();
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    pub fn identity(dimension: usize) -> Self {
        let mut entries = vec![ZERO; dimension * dimension];
        for i in 0..dimension {
            entries[i * dimension + i] = ONE;
        }
        Self { dimension, entries }
    }

    /// Unitary whose `k`-th row is `⟨basis[k]|`, so it maps `basis[k] → |k⟩`.
    pub fn from_rows_of_basis(basis: &[Direction]) -> Result<Self> {
        let d = basis.len();
        let mut entries = Vec::with_capacity(d * d);
        for v in basis {
            check_dim(d, v.dimension())?;
            entries.extend(v.amplitudes.iter().map(|z| z.conj()));
        }
        Self::new(d, entries)
    }

    fn unitarity_deviation(&self) -> f64 {
        let d = self.dimension;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let s: Complex64 = (0..d)
                    .map(|k| self.entries[k * d + i].conj() * self.entries[k * d + j])
                    .sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[ComplexScalar] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> ComplexScalar {
        self.entries[i * self.dimension + j]
    }

    /// `U|v⟩`
    pub fn apply(&self, v: &Direction) -> Result<Direction> {
        check_dim(self.dimension, v.dimension())?;
        let d = self.dimension;
        let amplitudes: Vec<_> = (0..d)
            .map(|i| (0..d).map(|j| self.entries[i * d + j] * v.amplitudes[j]).sum())
            .collect();
        Ok(Direction { amplitudes })
    }
}

/// Entrywise complex conjugate `U*` of a unitary.
pub fn conjugate_unitary(u: &LocalUnitary) -> LocalUnitary {
    LocalUnitary {
        dimension: u.dimension,
        entries: u.entries.iter().map(|z| z.conj()).collect(),
    }
}

/// `Σ_j |Σ_i ψ_i* m_ij|²`
fn alice_marginal(state: &TwoQuditState, psi: &Direction) -> f64 {
    let d = state.dimension;
    (0..d)
        .map(|j| {
            (0..d)
                .map(|i| psi.amplitudes[i].conj() * state.coeffs[i * d + j])
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum()
}

/// `Σ_i |Σ_j η_j* m_ij|²`
fn bob_marginal(state: &TwoQuditState, eta: &Direction) -> f64 {
    let d = state.dimension;
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| eta.amplitudes[j].conj() * state.coeffs[i * d + j])
                .sum::<Complex64>()
                .norm_sqr()
        })
        .sum()
}

/// `|⟨ψ,η|Φ⟩|²`
fn joint(state: &TwoQuditState, psi: &Direction, eta: &Direction) -> f64 {
    let d = state.dimension;
    let mut acc = ZERO;
    for i in 0..d {
        let pi = psi.amplitudes[i].conj();
        let row: Complex64 = (0..d).map(|j| eta.amplitudes[j].conj() * state.coeffs[i * d + j]).sum();
        acc += pi * row;
    }
    acc.norm_sqr()
}

/// `⟨Φ| P_A ⊗ P_B |Φ⟩` with rank-1 projectors; an omitted side is the identity.
///
/// Subnormalized states give the unnormalized quadratic form.
pub fn born_expectation(state: &TwoQuditState, alice: Option<&Direction>, bob: Option<&Direction>) -> Result<f64> {
    if let Some(psi) = alice {
        check_dim(state.dimension, psi.dimension())?;
    }
    if let Some(eta) = bob {
        check_dim(state.dimension, eta.dimension())?;
    }
    Ok(match (alice, bob) {
        (None, None) => state.norm_sq(),
        (Some(psi), None) => alice_marginal(state, psi),
        (None, Some(eta)) => bob_marginal(state, eta),
        (Some(psi), Some(eta)) => joint(state, psi, eta),
    })
}

/// Measure one party along `dir` and keep the `outcome` branch.
///
/// Returns the branch probability and the renormalized post-measurement state.
pub fn post_measurement(
    state: &TwoQuditState,
    side: Side,
    dir: &Direction,
    outcome: bool,
) -> Result<(f64, TwoQuditState)> {
    check_dim(state.dimension, dir.dimension())?;
    if !state.normalized {
        return Err(Error::NotNormalized(state.norm_sq()));
    }
    let d = state.dimension;
    let v = &dir.amplitudes;
    let mut projected = vec![ZERO; d * d];
    match side {
        Side::Alice => {
            for j in 0..d {
                let overlap: Complex64 = (0..d).map(|k| v[k].conj() * state.coeffs[k * d + j]).sum();
                for i in 0..d {
                    projected[i * d + j] = v[i] * overlap;
                }
            }
        }
        Side::Bob => {
            for i in 0..d {
                let overlap: Complex64 = (0..d).map(|k| v[k].conj() * state.coeffs[i * d + k]).sum();
                for j in 0..d {
                    projected[i * d + j] = overlap * v[j];
                }
            }
        }
    }
    if !outcome {
        for (p, m) in projected.iter_mut().zip(&state.coeffs) {
            *p = m - *p;
        }
    }
    let prob = norm_sq(&projected);
    if prob < ZERO_BRANCH_TOL {
        return Err(Error::ZeroProbabilityBranch(prob));
    }
    let scale = prob.sqrt();
    for z in &mut projected {
        *z /= scale;
    }
    Ok((
        prob,
        TwoQuditState {
            dimension: d,
            coeffs: projected,
            normalized: true,
        },
    ))
}

/// `(U_A ⊗ U_B)|Φ⟩`, i.e. `m ↦ U_A · m · U_Bᵀ`.
pub fn apply_local(state: &TwoQuditState, u_alice: &LocalUnitary, u_bob: &LocalUnitary) -> Result<TwoQuditState> {
    let d = state.dimension;
    check_dim(d, u_alice.dimension)?;
    check_dim(d, u_bob.dimension)?;
    let mut left = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            left[i * d + j] = (0..d)
                .map(|k| u_alice.entries[i * d + k] * state.coeffs[k * d + j])
                .sum();
        }
    }
    let mut out = vec![ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            out[i * d + j] = (0..d).map(|k| left[i * d + k] * u_bob.entries[j * d + k]).sum();
        }
    }
    Ok(TwoQuditState {
        dimension: d,
        coeffs: out,
        normalized: state.normalized,
    })
}

fn orthogonalize(candidate: &mut [Complex64], basis: &[Vec<Complex64>]) {
    // two passes of modified Gram-Schmidt keep pairwise overlaps near 1e-16
    for _ in 0..2 {
        for b in basis {
            let overlap: Complex64 = b.iter().zip(candidate.iter()).map(|(x, y)| x.conj() * y).sum();
            for (c, x) in candidate.iter_mut().zip(b) {
                *c -= overlap * x;
            }
        }
    }
}

/// Extend `seeds` to an orthonormal basis of `C^d`.
///
/// `output[0]` is `seeds[0]` itself and `output[k]` lies in the span of
/// `seeds[0..=k]`. Remaining vectors come from the standard basis in index
/// order, skipping candidates with residual norm below `1e-10`.
pub fn gram_schmidt_extend(seeds: &[Direction], d: usize) -> Result<Vec<Direction>> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if seeds.len() > d {
        return Err(Error::TooManySeeds {
            seeds: seeds.len(),
            dimension: d,
        });
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for (idx, seed) in seeds.iter().enumerate() {
        check_dim(d, seed.dimension())?;
        if idx == 0 {
            basis.push(seed.amplitudes.clone());
            continue;
        }
        let mut v = seed.amplitudes.clone();
        orthogonalize(&mut v, &basis);
        let n = norm_sq(&v).sqrt();
        if n < DEPENDENCE_TOL {
            return Err(Error::LinearlyDependent(n, idx));
        }
        v.iter_mut().for_each(|z| *z /= n);
        basis.push(v);
    }
    let mut k = 0;
    while basis.len() < d && k < d {
        let mut v = vec![ZERO; d];
        v[k] = ONE;
        orthogonalize(&mut v, &basis);
        let n = norm_sq(&v).sqrt();
        if n >= DEPENDENCE_TOL {
            v.iter_mut().for_each(|z| *z /= n);
            basis.push(v);
        }
        k += 1;
    }
    Ok(basis.into_iter().map(|amplitudes| Direction { amplitudes }).collect())
}
