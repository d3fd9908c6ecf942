//! Maximizing the protocol's success probability.
//!
//! Three independent routes to the optimum:
//! - [`analytic_optimum`]: closed-form optimal angles and value on a general channel,
//! - [`numeric_optimize`]: multi-start simplex search over all measurement axes
//!   (and the entanglement weights) in any dimension,
//! - [`grid_oracle`]: exhaustive lattice scan of the reduced qubit objective.

mod simplex;

pub use simplex::{Minimum, NelderMead};

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::linalg::{conjugate_unitary, gram_schmidt_extend, Direction, LocalUnitary, TwoQuditState};
use crate::protocol::{classical_baseline, success_exact, success_probability, Directions, InputMode, Strategy};
use crate::random::instance_rng;

/// Maximal qubit enhancement on the equal channel, `(4cos²(π/8) − 3)/6 = (√2 − 1)/6`.
pub fn f_max() -> f64 {
    (4.0 * (PI / 8.0).cos().powi(2) - 3.0) / 6.0
}

pub const DEFAULT_RESTARTS: usize = 32;

/// Real amplitudes `a, b, b′` of `psi, eta, eta_prime` with `psi_prime = |0⟩`,
/// a Bell shared state and all phases zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitParams {
    pub a: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl QubitParams {
    pub fn new(a: f64, b: f64, b_prime: f64) -> Result<Self> {
        for (name, value) in [("a", a), ("b", b), ("b_prime", b_prime)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ParameterOutOfRange { name, value });
            }
        }
        Ok(Self { a, b, b_prime })
    }

    /// `(cos π/4, cos π/8, cos 3π/8)`
    pub fn optimal() -> Self {
        Self {
            a: FRAC_PI_4.cos(),
            b: (PI / 8.0).cos(),
            b_prime: (3.0 * PI / 8.0).cos(),
        }
    }

    pub fn directions(&self) -> Directions {
        Directions {
            psi: Direction::qubit(self.a, 0.0).expect("a in [0,1]"),
            psi_prime: Direction::basis(2, 0).expect("valid basis index"),
            eta: Direction::qubit(self.b, 0.0).expect("b in [0,1]"),
            eta_prime: Direction::qubit(self.b_prime, 0.0).expect("b' in [0,1]"),
        }
    }

    pub fn strategy(&self, mode: InputMode) -> Strategy {
        Strategy::new(
            TwoQuditState::fully_entangled(2).expect("valid dimension"),
            self.directions(),
            mode,
        )
        .expect("consistent qubit strategy")
    }

    fn overlaps(&self) -> (f64, f64) {
        let sa = (1.0 - self.a * self.a).max(0.0).sqrt();
        let x = self.a * self.b + sa * (1.0 - self.b * self.b).max(0.0).sqrt();
        let xp = self.a * self.b_prime + sa * (1.0 - self.b_prime * self.b_prime).max(0.0).sqrt();
        (x * x, xp * xp)
    }
}

/// Reduced equal-channel enhancement
/// `[(ab + √(1−a²)√(1−b²))² + (ab′ + √(1−a²)√(1−b′²))² + b² − b′² − 2] / 6`.
pub fn objective_reduced(p: &QubitParams) -> f64 {
    let (x, xp) = p.overlaps();
    (x + xp + p.b * p.b - p.b_prime * p.b_prime - 2.0) / 6.0
}

/// Reduced success probability on a general channel:
/// `1 − c/2 + (c/2)(X′ − b′²) + (c₃/2)(X + b² − 2)` with `c` the indirect-tag weight.
pub fn reduced_success(p: &QubitParams, spec: &ChannelSpec, mode: InputMode) -> f64 {
    let (_, indirect, parity) = mode.weights(spec);
    let (x, xp) = p.overlaps();
    1.0 - indirect / 2.0 + indirect / 2.0 * (xp - p.b_prime * p.b_prime) + parity / 2.0 * (x + p.b * p.b - 2.0)
}

/// `1 + (√(c² + c₃²) − c − c₃)/2` for indirect-tag weight `c` and parity weight `c₃`.
pub fn closed_form_value(indirect: f64, parity: f64) -> f64 {
    1.0 + 0.5 * (indirect.hypot(parity) - indirect - parity)
}

/// Input order maximizing the closed-form value: `(alpha, q)` exactly when `c1 < c2`.
pub fn preferred_mode(spec: &ChannelSpec) -> InputMode {
    if spec.c1 < spec.c2 {
        InputMode::AlphaQ
    } else {
        InputMode::QAlpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Analytic,
    Numeric,
    Grid,
}

/// Best strategy found by one of the three routes.
///
/// `enhancement` is `value` minus the channel's classical baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimumResult {
    pub method: Method,
    pub spec: ChannelSpec,
    pub value: f64,
    pub enhancement: f64,
    pub input_mode: InputMode,
    pub params: Option<QubitParams>,
    pub l0: Option<f64>,
    pub dimension: usize,
    pub strategy: Option<Strategy>,
}

impl OptimumResult {
    fn new(method: Method, spec: &ChannelSpec, value: f64, input_mode: InputMode, dimension: usize) -> Self {
        Self {
            method,
            spec: *spec,
            value,
            enhancement: value - classical_baseline(spec).1,
            input_mode,
            params: None,
            l0: None,
            dimension,
            strategy: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("optimum serializes")
    }
}

/// Closed-form optimum for qubits on channel `spec`.
///
/// Angles `a = cos θ`, `b = cos(θ/2)`, `b′ = cos(θ/2 + π/4)` with
/// `θ = atan2(c, c₃)`, where `c` is `c2` in `(q, alpha)` mode and `c1` in
/// `(alpha, q)` mode. `c3 = 0` gives the `θ = π/2` limit.
pub fn analytic_optimum(spec: &ChannelSpec) -> Result<OptimumResult> {
    spec.validate()?;
    let mode = preferred_mode(spec);
    let (_, indirect, parity) = mode.weights(spec);
    let theta = indirect.atan2(parity);
    let params = QubitParams::new(
        theta.cos().clamp(0.0, 1.0),
        (theta / 2.0).cos().clamp(0.0, 1.0),
        (theta / 2.0 + FRAC_PI_4).cos().abs().min(1.0),
    )?;
    let mut result = OptimumResult::new(Method::Analytic, spec, closed_form_value(indirect, parity), mode, 2);
    result.params = Some(params);
    result.l0 = Some(0.5);
    result.strategy = Some(params.strategy(mode));
    Ok(result)
}

/// How the shared state is chosen during a numeric search.
#[derive(Debug, Clone, PartialEq)]
pub enum SharedMode {
    /// Schmidt weights searched jointly with the axes.
    FreeSchmidt,
    /// `(1/√d) Σ |jj⟩`
    FullyEntangled,
    Fixed(TwoQuditState),
}

/// Hyperspherical real unit vector from `len − 1` angles.
fn unit_real(angles: &[f64], len: usize, out: &mut Vec<f64>) {
    out.clear();
    let mut sin_prod = 1.0;
    for &t in angles.iter().take(len - 1) {
        out.push(sin_prod * t.cos());
        sin_prod *= t.sin();
    }
    out.push(sin_prod);
}

/// Direction from `2d − 2` parameters: `d − 1` hyperspherical angles then `d − 1`
/// relative phases. The first amplitude is real.
fn direction_from_params(params: &[f64], d: usize) -> Direction {
    let mut moduli = Vec::with_capacity(d);
    unit_real(&params[..d - 1], d, &mut moduli);
    let amps: Vec<Complex64> = moduli
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            if k == 0 {
                Complex64::new(r, 0.0)
            } else {
                Complex64::from_polar(r, params[d - 1 + k - 1])
            }
        })
        .collect();
    Direction::normalized(amps).expect("unit vector")
}

struct SearchSpace {
    dimension: usize,
    shared: SharedMode,
}

impl SearchSpace {
    fn direction_len(&self) -> usize {
        2 * self.dimension - 2
    }

    fn len(&self) -> usize {
        let dirs = 4 * self.direction_len();
        match self.shared {
            SharedMode::FreeSchmidt => dirs + self.dimension - 1,
            _ => dirs,
        }
    }

    fn decode(&self, x: &[f64]) -> (TwoQuditState, Directions) {
        let d = self.dimension;
        let n = self.direction_len();
        let dir = |k: usize| direction_from_params(&x[k * n..(k + 1) * n], d);
        let dirs = Directions {
            psi: dir(0),
            psi_prime: dir(1),
            eta: dir(2),
            eta_prime: dir(3),
        };
        let shared = match &self.shared {
            SharedMode::FreeSchmidt => {
                let mut weights = Vec::with_capacity(d);
                unit_real(&x[4 * n..], d, &mut weights);
                let mut coeffs = vec![Complex64::new(0.0, 0.0); d * d];
                for (j, w) in weights.iter().enumerate() {
                    coeffs[j * d + j] = Complex64::new(w.abs(), 0.0);
                }
                TwoQuditState::normalized_from(d, coeffs).expect("unit Schmidt vector")
            }
            SharedMode::FullyEntangled => TwoQuditState::fully_entangled(d).expect("valid dimension"),
            SharedMode::Fixed(state) => state.clone(),
        };
        (shared, dirs)
    }

    fn random_start<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let d = self.dimension;
        let mut x = Vec::with_capacity(self.len());
        for _ in 0..4 {
            x.extend((0..d - 1).map(|_| rng.random_range(0.0..PI)));
            x.extend((0..d - 1).map(|_| rng.random_range(0.0..2.0 * PI)));
        }
        if matches!(self.shared, SharedMode::FreeSchmidt) {
            x.extend((0..d - 1).map(|_| rng.random_range(0.0..FRAC_PI_2)));
        }
        x
    }
}

/// Multi-start simplex search maximizing [`success_exact`] over both input
/// orders, all four axes and (for [`SharedMode::FreeSchmidt`]) the Schmidt weights.
///
/// Each restart is polished by re-running the simplex from its endpoint until
/// the value stops improving. The best restart wins; ties go to the lower
/// restart index and to `(q, alpha)` order.
pub fn numeric_optimize(
    spec: &ChannelSpec,
    dimension: usize,
    shared: SharedMode,
    restarts: usize,
    seed: u64,
) -> Result<OptimumResult> {
    numeric_optimize_with(spec, dimension, shared, restarts, seed, &NelderMead::default())
}

pub fn numeric_optimize_with(
    spec: &ChannelSpec,
    dimension: usize,
    shared: SharedMode,
    restarts: usize,
    seed: u64,
    simplex: &NelderMead,
) -> Result<OptimumResult> {
    spec.validate()?;
    if dimension < 2 {
        return Err(Error::InvalidDimension(dimension));
    }
    if restarts == 0 {
        return Err(Error::NoRestarts);
    }
    if let SharedMode::Fixed(state) = &shared {
        if state.dimension() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: state.dimension(),
            });
        }
        if !state.is_normalized() {
            return Err(Error::NotNormalized(state.norm_sq()));
        }
    }
    let space = SearchSpace { dimension, shared };
    let modes = [InputMode::QAlpha, InputMode::AlphaQ];

    let runs: Vec<(usize, usize, f64, Vec<f64>)> = (0..restarts * modes.len())
        .into_par_iter()
        .map(|job| {
            let (restart, mode_idx) = (job / modes.len(), job % modes.len());
            let mode = modes[mode_idx];
            let mut rng = instance_rng(seed, restart as u64);
            let start = space.random_start(&mut rng);
            let objective = |x: &[f64]| {
                let (state, dirs) = space.decode(x);
                -success_probability(&state, &dirs, mode, spec).expect("consistent dimensions")
            };
            let mut best = simplex.minimize(objective, &start);
            for _ in 0..8 {
                let next = simplex.minimize(objective, &best.point);
                let improved = next.value < best.value - 1e-15;
                if next.value < best.value {
                    best = next;
                }
                if !improved {
                    break;
                }
            }
            (restart, mode_idx, -best.value, best.point)
        })
        .collect();

    let (_, mode_idx, _, point) = runs
        .into_iter()
        .reduce(|acc, run| if run.2 > acc.2 { run } else { acc })
        .expect("at least one restart");
    let mode = modes[mode_idx];
    let (state, dirs) = space.decode(&point);
    let strategy = Strategy::new(state, dirs, mode)?;
    let value = success_exact(&strategy, spec)?;

    let mut result = OptimumResult::new(Method::Numeric, spec, value, mode, dimension);
    if dimension == 2 {
        if matches!(space.shared, SharedMode::FreeSchmidt) {
            result.l0 = Some(strategy.shared().coeff(0, 0).norm_sqr());
        }
        result.params = canonical_qubit_params(&strategy).ok();
    }
    result.strategy = Some(strategy);
    Ok(result)
}

/// Rotate a qubit strategy by `U ⊗ U*` with `U psi_prime = |0⟩` and read off
/// the moduli `(|⟨0|psi⟩|, |⟨0|eta⟩|, |⟨0|eta_prime⟩|)`.
///
/// Only meaningful when the shared state is (close to) the Bell state.
pub fn canonical_qubit_params(strategy: &Strategy) -> Result<QubitParams> {
    if strategy.dimension() != 2 {
        return Err(Error::InvalidDimension(strategy.dimension()));
    }
    let dirs = strategy.directions();
    let basis = gram_schmidt_extend(std::slice::from_ref(&dirs.psi_prime), 2)?;
    let u = LocalUnitary::from_rows_of_basis(&basis)?;
    let u_conj = conjugate_unitary(&u);
    let first = |v: &Direction, w: &LocalUnitary| -> Result<f64> { Ok(w.apply(v)?.amplitudes()[0].norm().min(1.0)) };
    QubitParams::new(
        first(&dirs.psi, &u)?,
        first(&dirs.eta, &u_conj)?,
        first(&dirs.eta_prime, &u_conj)?,
    )
}

fn lattice(step: f64) -> Vec<f64> {
    let mut points = Vec::new();
    let mut k = 0usize;
    loop {
        let x = k as f64 * step;
        if x > 1.0 + 1e-12 {
            break;
        }
        points.push(x.min(1.0));
        k += 1;
    }
    if *points.last().expect("non-empty lattice") < 1.0 {
        points.push(1.0);
    }
    points
}

/// Exhaustive scan of `(a, b, b′)` over the lattice `{0, step, 2·step, …, 1}³`.
///
/// On the equal channel the scanned objective is [`objective_reduced`]; on
/// other channels it is [`reduced_success`] in both input orders. The lattice
/// maximum never exceeds the true maximum.
pub fn grid_oracle(spec: &ChannelSpec, step: f64) -> Result<OptimumResult> {
    spec.validate()?;
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidStep(step));
    }
    let axis = lattice(step);
    let equal = *spec == ChannelSpec::equal();
    let modes = [InputMode::QAlpha, InputMode::AlphaQ];
    let score = |p: &QubitParams| -> (f64, InputMode) {
        if equal {
            (5.0 / 6.0 + objective_reduced(p), InputMode::QAlpha)
        } else {
            let mut best = (f64::NEG_INFINITY, InputMode::QAlpha);
            for mode in modes {
                let v = reduced_success(p, spec, mode);
                if v > best.0 {
                    best = (v, mode);
                }
            }
            best
        }
    };
    let best = axis
        .par_iter()
        .map(|&a| {
            let mut best: Option<(f64, InputMode, QubitParams)> = None;
            for &b in &axis {
                for &bp in &axis {
                    let p = QubitParams { a, b, b_prime: bp };
                    let (v, mode) = score(&p);
                    if best.as_ref().is_none_or(|cur| v > cur.0) {
                        best = Some((v, mode, p));
                    }
                }
            }
            best.expect("non-empty lattice")
        })
        .collect::<Vec<_>>()
        .into_iter()
        .reduce(|acc, cand| if cand.0 > acc.0 { cand } else { acc })
        .expect("non-empty lattice");
    let (value, mode, params) = best;
    let mut result = OptimumResult::new(Method::Grid, spec, value, mode, 2);
    result.params = Some(params);
    result.l0 = Some(0.5);
    result.strategy = Some(params.strategy(mode));
    Ok(result)
}
