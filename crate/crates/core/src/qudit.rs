//! Qudit strategies: truncation to a qubit block, the fully entangled
//! `(2/d)·F_max` bound, and the `U ⊗ U*` invariance of the fully entangled state.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    apply_local, born_expectation, conjugate_unitary, gram_schmidt_extend, Direction, LocalUnitary, TwoQuditState,
};
use crate::optimizer::f_max;
use crate::protocol::{enhancement_f, Directions};

/// Slack on the inequalities checked here.
pub const BOUND_TOL: f64 = 1e-12;

/// The shared state re-expressed in measurement-adapted bases and cut down to
/// the `2 × 2` block spanned by `p₀, p₁` (Alice) and `n₀, n₁` (Bob).
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationResult {
    /// `Σ_{i,j≤1} m_ij |p_i⟩|n_j⟩` written in the computational basis of `C^d ⊗ C^d`.
    pub truncated: TwoQuditState,
    /// The `2 × 2` block `m_ij` itself, as a subnormalized two-qubit state.
    pub block: TwoQuditState,
    pub norm_sq: f64,
    /// `p₀ = psi_prime`, `psi ∈ span(p₀, p₁)`.
    pub alice_basis: Vec<Direction>,
    /// `n₀ = eta`, `eta_prime ∈ span(n₀, n₁)`.
    pub bob_basis: Vec<Direction>,
}

impl TruncationResult {
    /// Coordinates of the four axes in the `p₀, p₁` / `n₀, n₁` planes.
    pub fn block_directions(&self, dirs: &Directions) -> Result<Directions> {
        let coords =
            |basis: &[Direction], v: &Direction| Direction::normalized(vec![basis[0].inner(v), basis[1].inner(v)]);
        Directions::new(
            coords(&self.alice_basis, &dirs.psi)?,
            coords(&self.alice_basis, &dirs.psi_prime)?,
            coords(&self.bob_basis, &dirs.eta)?,
            coords(&self.bob_basis, &dirs.eta_prime)?,
        )
    }
}

fn check_dims(state: &TwoQuditState, dirs: &Directions) -> Result<()> {
    if state.dimension() < 2 {
        return Err(Error::InvalidDimension(state.dimension()));
    }
    if dirs.dimension() != state.dimension() {
        return Err(Error::DimensionMismatch {
            expected: state.dimension(),
            found: dirs.dimension(),
        });
    }
    Ok(())
}

/// Build the adapted bases and keep only the `i, j ≤ 1` coefficients.
///
/// Fails with [`Error::LinearlyDependent`] if `psi ∝ psi_prime` or `eta ∝ eta_prime`.
pub fn truncate(state: &TwoQuditState, dirs: &Directions) -> Result<TruncationResult> {
    check_dims(state, dirs)?;
    let d = state.dimension();
    let alice_basis = gram_schmidt_extend(&[dirs.psi_prime.clone(), dirs.psi.clone()], d)?;
    let bob_basis = gram_schmidt_extend(&[dirs.eta.clone(), dirs.eta_prime.clone()], d)?;

    // m'_ij = ⟨p_i n_j | Φ⟩
    let coeff = |p: &Direction, n: &Direction| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..d {
            let pk = p.amplitudes()[k].conj();
            for l in 0..d {
                acc += pk * n.amplitudes()[l].conj() * state.coeff(k, l);
            }
        }
        acc
    };
    let mut block = Vec::with_capacity(4);
    for p in &alice_basis[..2] {
        for n in &bob_basis[..2] {
            block.push(coeff(p, n));
        }
    }

    let mut embedded = vec![Complex64::new(0.0, 0.0); d * d];
    for (i, p) in alice_basis[..2].iter().enumerate() {
        for (j, n) in bob_basis[..2].iter().enumerate() {
            let m = block[i * 2 + j];
            for k in 0..d {
                for l in 0..d {
                    embedded[k * d + l] += m * p.amplitudes()[k] * n.amplitudes()[l];
                }
            }
        }
    }
    let norm_sq = block.iter().map(|z| z.norm_sqr()).sum();
    Ok(TruncationResult {
        truncated: TwoQuditState::subnormalized(d, embedded)?,
        block: TwoQuditState::subnormalized(2, block)?,
        norm_sq,
        alice_basis,
        bob_basis,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationCheck {
    pub f_full: f64,
    pub f_truncated: f64,
    pub norm_sq: f64,
    /// Largest change among the four joint expectations `⟨P_x P_y⟩`.
    pub joint_delta: f64,
    /// Whether `⟨Φ|P|Φ⟩ ≥ ⟨Φ̃|P|Φ̃⟩` for `P = P_psi` and `P = P_eta`.
    pub marginals_dominate: bool,
    pub ok: bool,
}

/// Check `F(Φ) ≤ F(Φ̃) ≤ ‖Φ̃‖²·F_max` for one strategy.
pub fn verify_truncation_inequality(state: &TwoQuditState, dirs: &Directions) -> Result<TruncationCheck> {
    let t = truncate(state, dirs)?;
    let f_full = enhancement_f(state, dirs)?;
    let f_truncated = enhancement_f(&t.truncated, dirs)?;

    let mut joint_delta: f64 = 0.0;
    for x in [&dirs.psi, &dirs.psi_prime] {
        for y in [&dirs.eta, &dirs.eta_prime] {
            let full = born_expectation(state, Some(x), Some(y))?;
            let cut = born_expectation(&t.truncated, Some(x), Some(y))?;
            joint_delta = joint_delta.max((full - cut).abs());
        }
    }
    let marginals_dominate = born_expectation(state, Some(&dirs.psi), None)? + BOUND_TOL
        >= born_expectation(&t.truncated, Some(&dirs.psi), None)?
        && born_expectation(state, None, Some(&dirs.eta))? + BOUND_TOL
            >= born_expectation(&t.truncated, None, Some(&dirs.eta))?;

    let ok = f_full <= f_truncated + BOUND_TOL && f_truncated <= t.norm_sq * f_max() + BOUND_TOL;
    Ok(TruncationCheck {
        f_full,
        f_truncated,
        norm_sq: t.norm_sq,
        joint_delta,
        marginals_dominate,
        ok,
    })
}

/// Largest enhancement reachable with the fully entangled state in dimension `d`: `(2/d)·F_max`.
pub fn fully_entangled_bound(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    Ok(2.0 / d as f64 * f_max())
}

/// Optimal qubit axes embedded in `span(|0⟩, |1⟩) ⊂ C^d`, evaluated on the
/// fully entangled state.
pub fn achieve_fully_entangled_bound(d: usize) -> Result<(Directions, f64)> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let dirs = Directions::qubit_optimal().embed(d)?;
    let f = enhancement_f(&TwoQuditState::fully_entangled(d)?, &dirs)?;
    Ok((dirs, f))
}

/// Max deviation of `state` from `(1/√d) Σ |jj⟩`.
fn fully_entangled_deviation(state: &TwoQuditState) -> f64 {
    let d = state.dimension();
    let diag = 1.0 / (d as f64).sqrt();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { diag } else { 0.0 };
            worst = worst.max((state.coeff(i, j) - target).norm());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryFreedomCheck {
    pub f_original: f64,
    pub f_transformed: f64,
    pub delta: f64,
    /// `‖(U ⊗ U*)|Φ⟩ − |Φ⟩‖`
    pub state_delta: f64,
    pub ok: bool,
    /// `U` applied to Alice's axes, `U*` to Bob's.
    pub transformed: Directions,
}

/// Compare `F` before and after moving Alice's axes by `U` and Bob's by `U*`.
pub fn verify_unitary_freedom(
    state: &TwoQuditState,
    dirs: &Directions,
    u: &LocalUnitary,
) -> Result<UnitaryFreedomCheck> {
    check_dims(state, dirs)?;
    if u.dimension() != state.dimension() {
        return Err(Error::DimensionMismatch {
            expected: state.dimension(),
            found: u.dimension(),
        });
    }
    let dev = fully_entangled_deviation(state);
    if dev > BOUND_TOL {
        return Err(Error::NotFullyEntangled(dev));
    }
    let u_conj = conjugate_unitary(u);
    let transformed = Directions::new(
        u.apply(&dirs.psi)?,
        u.apply(&dirs.psi_prime)?,
        u_conj.apply(&dirs.eta)?,
        u_conj.apply(&dirs.eta_prime)?,
    )?;
    let f_original = enhancement_f(state, dirs)?;
    let f_transformed = enhancement_f(state, &transformed)?;
    let rotated = apply_local(state, u, &u_conj)?;
    let delta = (f_original - f_transformed).abs();
    Ok(UnitaryFreedomCheck {
        f_original,
        f_transformed,
        delta,
        state_delta: rotated.distance_sq(state).sqrt(),
        ok: delta < BOUND_TOL,
        transformed,
    })
}

/// Unitary sending `psi_prime → |0⟩` and `psi` into `span(|0⟩, |1⟩)`.
pub fn canonicalizing_unitary(dirs: &Directions) -> Result<LocalUnitary> {
    let basis = gram_schmidt_extend(&[dirs.psi_prime.clone(), dirs.psi.clone()], dirs.dimension())?;
    LocalUnitary::from_rows_of_basis(&basis)
}
