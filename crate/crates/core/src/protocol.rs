//! The entanglement-assisted one-bit protocol.
//!
//! Alice measures her half of the shared state along `psi` (message `q = 0`)
//! or `psi_prime` (`q = 1`), records `alpha = 0` on a "true" outcome, and feeds
//! `(q, alpha)` (or `(alpha, q)`) into the channel. Bob reads the message
//! directly from the direct-tag output; otherwise he measures along `eta_prime`
//! (indirect tag) or `eta` (parity tag) and decodes with his outcome `beta`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_output, ChannelInput, ChannelOutput, ChannelSpec, OutputTag};
use crate::error::{Error, Result};
use crate::linalg::{
    born_expectation, complex, post_measurement, ComplexScalar, Direction, Side, TwoQuditState, NORM_TOL,
    ZERO_BRANCH_TOL,
};
use crate::random::instance_rng;

/// Trials per independently seeded chunk in [`run_protocol`].
pub const CHUNK_TRIALS: u64 = 1 << 16;

/// Order in which Alice places her two bits into the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InputMode {
    /// `(q, alpha)`: the first output carries the message.
    #[serde(rename = "q_alpha")]
    QAlpha,
    /// `(alpha, q)`: the second output carries the message.
    #[serde(rename = "alpha_q")]
    AlphaQ,
}

impl InputMode {
    /// Tag whose bit is the message itself.
    pub fn direct_tag(self) -> OutputTag {
        match self {
            InputMode::QAlpha => OutputTag::First,
            InputMode::AlphaQ => OutputTag::Second,
        }
    }

    /// Tag whose bit is Alice's outcome.
    pub fn indirect_tag(self) -> OutputTag {
        match self {
            InputMode::QAlpha => OutputTag::Second,
            InputMode::AlphaQ => OutputTag::First,
        }
    }

    /// `(c_direct, c_indirect, c_parity)` for this mode.
    pub fn weights(self, spec: &ChannelSpec) -> (f64, f64, f64) {
        match self {
            InputMode::QAlpha => (spec.c1, spec.c2, spec.c3),
            InputMode::AlphaQ => (spec.c2, spec.c1, spec.c3),
        }
    }
}

/// The four measurement axes of a strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct Directions {
    pub psi: Direction,
    pub psi_prime: Direction,
    pub eta: Direction,
    pub eta_prime: Direction,
}

impl Directions {
    pub fn new(psi: Direction, psi_prime: Direction, eta: Direction, eta_prime: Direction) -> Result<Self> {
        let d = psi.dimension();
        for v in [&psi_prime, &eta, &eta_prime] {
            if v.dimension() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.dimension(),
                });
            }
        }
        Ok(Self {
            psi,
            psi_prime,
            eta,
            eta_prime,
        })
    }

    pub fn dimension(&self) -> usize {
        self.psi.dimension()
    }

    /// Qubit axes `cos t|0⟩ + sin t|1⟩` with the optimal angles
    /// `(π/4, 0, π/8, 3π/8)`.
    pub fn qubit_optimal() -> Self {
        use std::f64::consts::PI;
        Self {
            psi: Direction::from_angle(PI / 4.0),
            psi_prime: Direction::from_angle(0.0),
            eta: Direction::from_angle(PI / 8.0),
            eta_prime: Direction::from_angle(3.0 * PI / 8.0),
        }
    }

    pub fn embed(&self, d: usize) -> Result<Self> {
        Ok(Self {
            psi: self.psi.embed(d)?,
            psi_prime: self.psi_prime.embed(d)?,
            eta: self.eta.embed(d)?,
            eta_prime: self.eta_prime.embed(d)?,
        })
    }
}

/// Joint outcome probabilities for one Alice axis and one Bob axis.
/// `tf` is Alice "true", Bob "false", and so on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeTable {
    pub tt: f64,
    pub tf: f64,
    pub ft: f64,
    pub ff: f64,
}

impl OutcomeTable {
    pub fn new(state: &TwoQuditState, alice: &Direction, bob: &Direction) -> Result<Self> {
        let tt = born_expectation(state, Some(alice), Some(bob))?;
        let pa = born_expectation(state, Some(alice), None)?;
        let pb = born_expectation(state, None, Some(bob))?;
        let total = state.norm_sq();
        Ok(Self {
            tt,
            tf: pa - tt,
            ft: pb - tt,
            ff: total - pa - pb + tt,
        })
    }

    pub fn total(&self) -> f64 {
        self.tt + self.tf + self.ft + self.ff
    }
}

/// The eight success cases, (a)–(d) for the indirect tag and (e)–(h) for parity,
/// together with the complementary failure tables they are drawn from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseProbabilities {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    psi_eta_prime: OutcomeTable,
    psi_prime_eta_prime: OutcomeTable,
    psi_eta: OutcomeTable,
    psi_prime_eta: OutcomeTable,
}

impl CaseProbabilities {
    pub fn new(shared: &TwoQuditState, dirs: &Directions) -> Result<Self> {
        let psi_eta_prime = OutcomeTable::new(shared, &dirs.psi, &dirs.eta_prime)?;
        let psi_prime_eta_prime = OutcomeTable::new(shared, &dirs.psi_prime, &dirs.eta_prime)?;
        let psi_eta = OutcomeTable::new(shared, &dirs.psi, &dirs.eta)?;
        let psi_prime_eta = OutcomeTable::new(shared, &dirs.psi_prime, &dirs.eta)?;
        Ok(Self {
            a: psi_eta_prime.tt,
            b: psi_eta_prime.ff,
            c: psi_prime_eta_prime.tf,
            d: psi_prime_eta_prime.ft,
            e: psi_eta.tt,
            f: psi_eta.ff,
            g: psi_prime_eta.tt,
            h: psi_prime_eta.ff,
            psi_eta_prime,
            psi_prime_eta_prime,
            psi_eta,
            psi_prime_eta,
        })
    }

    pub fn cases(&self) -> [f64; 8] {
        [self.a, self.b, self.c, self.d, self.e, self.f, self.g, self.h]
    }

    /// P(success | indirect tag), messages equiprobable.
    pub fn indirect_success(&self) -> f64 {
        0.5 * (self.a + self.b + self.c + self.d)
    }

    /// P(failure | indirect tag), summed from the complementary outcomes.
    pub fn indirect_failure(&self) -> f64 {
        let x = &self.psi_eta_prime;
        let y = &self.psi_prime_eta_prime;
        0.5 * (x.tf + x.ft + y.tt + y.ff)
    }

    pub fn parity_success(&self) -> f64 {
        0.5 * (self.e + self.f + self.g + self.h)
    }

    pub fn parity_failure(&self) -> f64 {
        let x = &self.psi_eta;
        let y = &self.psi_prime_eta;
        0.5 * (x.tf + x.ft + y.tf + y.ft)
    }
}

/// Departure of the success rate from 5/6 on the equal channel:
/// `(⟨PψPη⟩ + ⟨PψPη′⟩ + ⟨Pψ′Pη⟩ − ⟨Pψ′Pη′⟩ − ⟨Pψ⟩ − ⟨Pη⟩) / 3`.
///
/// `shared` may be subnormalized.
pub fn enhancement_f(shared: &TwoQuditState, dirs: &Directions) -> Result<f64> {
    let j = |a: &Direction, b: &Direction| born_expectation(shared, Some(a), Some(b));
    let bracket = j(&dirs.psi, &dirs.eta)? + j(&dirs.psi, &dirs.eta_prime)? + j(&dirs.psi_prime, &dirs.eta)?
        - j(&dirs.psi_prime, &dirs.eta_prime)?
        - born_expectation(shared, Some(&dirs.psi), None)?
        - born_expectation(shared, None, Some(&dirs.eta))?;
    Ok(bracket / 3.0)
}

/// Exact success probability of a strategy given by its parts.
pub fn success_probability(
    shared: &TwoQuditState,
    dirs: &Directions,
    mode: InputMode,
    spec: &ChannelSpec,
) -> Result<f64> {
    let cases = CaseProbabilities::new(shared, dirs)?;
    let (direct, indirect, parity) = mode.weights(spec);
    Ok(direct * shared.norm_sq() + indirect * cases.indirect_success() + parity * cases.parity_success())
}

/// A full protocol configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StrategyDocument", into = "StrategyDocument")]
pub struct Strategy {
    shared: TwoQuditState,
    dirs: Directions,
    input_mode: InputMode,
}

impl Strategy {
    pub fn new(shared: TwoQuditState, dirs: Directions, input_mode: InputMode) -> Result<Self> {
        if shared.dimension() != dirs.dimension() {
            return Err(Error::DimensionMismatch {
                expected: shared.dimension(),
                found: dirs.dimension(),
            });
        }
        if !shared.is_normalized() {
            return Err(Error::NotNormalized(shared.norm_sq()));
        }
        Ok(Self {
            shared,
            dirs,
            input_mode,
        })
    }

    /// Bell state with the optimal qubit axes, `(q, alpha)` input.
    pub fn qubit_optimal() -> Self {
        Self {
            shared: TwoQuditState::fully_entangled(2).expect("valid dimension"),
            dirs: Directions::qubit_optimal(),
            input_mode: InputMode::QAlpha,
        }
    }

    /// Unentangled strategy reproducing the classical `(q, q)` input:
    /// shared `|0,0⟩`, `psi = |0⟩`, `psi_prime = |1⟩`, `eta = eta_prime = |0⟩`.
    pub fn classical_emulation() -> Self {
        let k0 = Direction::basis(2, 0).expect("valid basis index");
        let k1 = Direction::basis(2, 1).expect("valid basis index");
        Self {
            shared: TwoQuditState::product(&k0, &k0).expect("normalized product"),
            dirs: Directions {
                psi: k0.clone(),
                psi_prime: k1,
                eta: k0.clone(),
                eta_prime: k0,
            },
            input_mode: InputMode::QAlpha,
        }
    }

    pub fn shared(&self) -> &TwoQuditState {
        &self.shared
    }

    pub fn directions(&self) -> &Directions {
        &self.dirs
    }

    pub fn input_mode(&self) -> InputMode {
        self.input_mode
    }

    pub fn dimension(&self) -> usize {
        self.shared.dimension()
    }

    pub fn with_input_mode(mut self, mode: InputMode) -> Self {
        self.input_mode = mode;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategy serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::StrategyFormat(e.to_string()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum SharedDocument {
    Schmidt { l0: f64 },
    Matrix { m: Vec<Vec<[f64; 2]>> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StrategyDocument {
    dimension: usize,
    shared: SharedDocument,
    psi: Vec<[f64; 2]>,
    psi_prime: Vec<[f64; 2]>,
    eta: Vec<[f64; 2]>,
    eta_prime: Vec<[f64; 2]>,
    input_mode: InputMode,
}

/// Squared-norm slack tolerated (and renormalized away) in strategy files.
const FILE_NORM_TOL: f64 = 1e-9;

fn amplitudes_from_pairs(pairs: &[[f64; 2]], what: &str) -> Result<Vec<ComplexScalar>> {
    pairs
        .iter()
        .map(|&[re, im]| complex(re, im))
        .collect::<Result<Vec<_>>>()
        .map_err(|_| Error::StrategyFormat(format!("{what}: non-finite amplitude")))
}

fn direction_from_pairs(pairs: &[[f64; 2]], d: usize, what: &str) -> Result<Direction> {
    if pairs.len() != d {
        return Err(Error::StrategyFormat(format!(
            "{what}: expected {d} amplitudes, found {}",
            pairs.len()
        )));
    }
    let amps = amplitudes_from_pairs(pairs, what)?;
    let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if (n - 1.0).abs() > FILE_NORM_TOL {
        return Err(Error::StrategyFormat(format!("{what}: squared norm {n} is not 1")));
    }
    if (n - 1.0).abs() <= NORM_TOL {
        Direction::new(amps)
    } else {
        Direction::normalized(amps)
    }
}

fn pairs(amps: &[ComplexScalar]) -> Vec<[f64; 2]> {
    amps.iter().map(|z| [z.re, z.im]).collect()
}

impl TryFrom<StrategyDocument> for Strategy {
    type Error = Error;

    fn try_from(doc: StrategyDocument) -> Result<Self> {
        let d = doc.dimension;
        if d < 2 {
            return Err(Error::StrategyFormat(format!("dimension {d} must be at least 2")));
        }
        let shared = match doc.shared {
            SharedDocument::Schmidt { l0 } => {
                if d != 2 {
                    return Err(Error::StrategyFormat(
                        "schmidt shared state requires dimension 2".into(),
                    ));
                }
                TwoQuditState::schmidt(l0)?
            }
            SharedDocument::Matrix { m } => {
                if m.len() != d || m.iter().any(|row| row.len() != d) {
                    return Err(Error::StrategyFormat(format!("shared matrix must be {d}x{d}")));
                }
                let flat: Vec<[f64; 2]> = m.into_iter().flatten().collect();
                let coeffs = amplitudes_from_pairs(&flat, "shared")?;
                let n: f64 = coeffs.iter().map(|z| z.norm_sqr()).sum();
                if (n - 1.0).abs() > FILE_NORM_TOL {
                    return Err(Error::StrategyFormat(format!("shared: squared norm {n} is not 1")));
                }
                if (n - 1.0).abs() <= NORM_TOL {
                    TwoQuditState::from_matrix(d, coeffs)?
                } else {
                    TwoQuditState::normalized_from(d, coeffs)?
                }
            }
        };
        let dirs = Directions::new(
            direction_from_pairs(&doc.psi, d, "psi")?,
            direction_from_pairs(&doc.psi_prime, d, "psi_prime")?,
            direction_from_pairs(&doc.eta, d, "eta")?,
            direction_from_pairs(&doc.eta_prime, d, "eta_prime")?,
        )?;
        Strategy::new(shared, dirs, doc.input_mode)
    }
}

impl From<Strategy> for StrategyDocument {
    fn from(s: Strategy) -> Self {
        let d = s.dimension();
        let m = s.shared.coeffs().chunks(d).map(pairs).collect();
        StrategyDocument {
            dimension: d,
            shared: SharedDocument::Matrix { m },
            psi: pairs(s.dirs.psi.amplitudes()),
            psi_prime: pairs(s.dirs.psi_prime.amplitudes()),
            eta: pairs(s.dirs.eta.amplitudes()),
            eta_prime: pairs(s.dirs.eta_prime.amplitudes()),
            input_mode: s.input_mode,
        }
    }
}

/// Exact success probability with equiprobable messages.
pub fn success_exact(strategy: &Strategy, spec: &ChannelSpec) -> Result<f64> {
    success_probability(&strategy.shared, &strategy.dirs, strategy.input_mode, spec)
}

/// Channel input for message `q` and Alice's outcome bit `alpha`.
pub fn alice_encode(q: bool, mode: InputMode, alpha: bool) -> ChannelInput {
    match mode {
        InputMode::QAlpha => ChannelInput::new(q, alpha),
        InputMode::AlphaQ => ChannelInput::new(alpha, q),
    }
}

/// Which of Bob's axes he measures for a given output tag, if any.
fn bob_axis(tag: OutputTag, mode: InputMode) -> Option<BobAxis> {
    if tag == mode.direct_tag() {
        None
    } else if tag == OutputTag::Parity {
        Some(BobAxis::Eta)
    } else {
        Some(BobAxis::EtaPrime)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BobAxis {
    Eta,
    EtaPrime,
}

/// Bob's guess of the message.
///
/// `beta` must be present exactly when the tag requires a measurement.
pub fn bob_decode(output: ChannelOutput, beta: Option<bool>, mode: InputMode) -> Result<bool> {
    match (bob_axis(output.tag, mode), beta) {
        (None, None) => Ok(output.bit),
        // indirect: q = 0 iff beta = alpha; parity: q = (q ⊕ alpha) ⊕ beta
        (Some(_), Some(beta)) => Ok(output.bit ^ beta),
        (None, Some(_)) => Err(Error::BetaMismatch { expected: false }),
        (Some(_), None) => Err(Error::BetaMismatch { expected: true }),
    }
}

/// One simulated transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub q: bool,
    pub alpha: bool,
    pub output: ChannelOutput,
    pub beta: Option<bool>,
    pub q_hat: bool,
    pub success: bool,
}

#[derive(Debug, Clone, Copy)]
struct AliceBranch {
    prob: f64,
    /// P(Bob "true") along eta, eta_prime in the collapsed state.
    bob_true: [f64; 2],
}

#[derive(Debug, Clone, Copy)]
struct MessageBranches {
    true_prob: f64,
    branches: [Option<AliceBranch>; 2],
}

/// Sequential Alice-then-Bob sampler for one strategy and channel.
///
/// The post-measurement states depend only on `(q, alpha)`, so the conditional
/// probabilities for Bob are computed once up front.
#[derive(Debug, Clone)]
pub struct ProtocolSampler {
    spec: ChannelSpec,
    mode: InputMode,
    messages: [MessageBranches; 2],
}

impl ProtocolSampler {
    pub fn new(strategy: &Strategy, spec: &ChannelSpec) -> Result<Self> {
        spec.validate()?;
        let dirs = &strategy.dirs;
        let mut messages = [MessageBranches {
            true_prob: 0.0,
            branches: [None; 2],
        }; 2];
        for (q, axis) in [&dirs.psi, &dirs.psi_prime].into_iter().enumerate() {
            let mut entry = MessageBranches {
                true_prob: 0.0,
                branches: [None; 2],
            };
            for (slot, outcome) in [true, false].into_iter().enumerate() {
                match post_measurement(&strategy.shared, Side::Alice, axis, outcome) {
                    Ok((prob, collapsed)) => {
                        let bob_true = [
                            born_expectation(&collapsed, None, Some(&dirs.eta))?,
                            born_expectation(&collapsed, None, Some(&dirs.eta_prime))?,
                        ];
                        entry.branches[slot] = Some(AliceBranch { prob, bob_true });
                        if outcome {
                            entry.true_prob = prob;
                        }
                    }
                    Err(Error::ZeroProbabilityBranch(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            messages[q] = entry;
        }
        Ok(Self {
            spec: *spec,
            mode: strategy.input_mode,
            messages,
        })
    }

    /// Draw order per trial: message, Alice's outcome, channel, Bob's outcome.
    pub fn trial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialRecord {
        let q = rng.random::<f64>() < 0.5;
        let message = &self.messages[usize::from(q)];
        let alice_true = match message.branches {
            [Some(_), Some(_)] => rng.random::<f64>() < message.true_prob,
            [Some(_), None] => {
                let _ = rng.random::<f64>();
                true
            }
            _ => {
                let _ = rng.random::<f64>();
                false
            }
        };
        let branch = message.branches[usize::from(!alice_true)].expect("sampled branch exists");
        let alpha = !alice_true;
        let output = sample_output(alice_encode(q, self.mode, alpha), &self.spec, rng.random::<f64>());
        let beta = bob_axis(output.tag, self.mode).map(|axis| {
            let p_true = match axis {
                BobAxis::Eta => branch.bob_true[0],
                BobAxis::EtaPrime => branch.bob_true[1],
            };
            let draw = rng.random::<f64>();
            let bob_true = if p_true < ZERO_BRANCH_TOL {
                false
            } else if 1.0 - p_true < ZERO_BRANCH_TOL {
                true
            } else {
                draw < p_true
            };
            !bob_true
        });
        let q_hat = bob_decode(output, beta, self.mode).expect("axis binding matches decode");
        TrialRecord {
            q,
            alpha,
            output,
            beta,
            q_hat,
            success: q_hat == q,
        }
    }

    /// Alice's branch probabilities `[P(true), P(false)]` for message `q`.
    pub fn alice_probabilities(&self, q: bool) -> [f64; 2] {
        let m = &self.messages[usize::from(q)];
        [
            m.branches[0].map_or(0.0, |b| b.prob),
            m.branches[1].map_or(0.0, |b| b.prob),
        ]
    }
}

/// Monte Carlo summary of a protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub trials: u64,
    pub successes: u64,
    pub empirical_rate: f64,
    pub exact_rate: f64,
    pub std_error: f64,
    pub seed: u64,
}

impl RunReport {
    /// `(empirical − exact) / std_error`; zero when both agree and the error vanishes.
    pub fn z_score(&self) -> f64 {
        let diff = self.empirical_rate - self.exact_rate;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff.abs() < 1e-12 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }
}

/// Seeded Monte Carlo realization of the protocol.
///
/// Trials are split into chunks of [`CHUNK_TRIALS`], chunk `k` drawing from
/// stream `k` of the seeded generator, so the result depends only on
/// `(seed, trials)`.
pub fn run_protocol(strategy: &Strategy, spec: &ChannelSpec, trials: u64, seed: u64) -> Result<RunReport> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let sampler = ProtocolSampler::new(strategy, spec)?;
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let successes: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = instance_rng(seed, chunk);
            let n = CHUNK_TRIALS.min(trials - chunk * CHUNK_TRIALS);
            (0..n).filter(|_| sampler.trial(&mut rng).success).count() as u64
        })
        .sum();
    let p = successes as f64 / trials as f64;
    Ok(RunReport {
        trials,
        successes,
        empirical_rate: p,
        exact_rate: success_exact(strategy, spec)?,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        seed,
    })
}

/// Every trial of [`run_protocol`] with the same `(seed, trials)`, in order.
pub fn trial_records(strategy: &Strategy, spec: &ChannelSpec, trials: u64, seed: u64) -> Result<Vec<TrialRecord>> {
    if trials == 0 {
        return Err(Error::NoTrials);
    }
    let sampler = ProtocolSampler::new(strategy, spec)?;
    let chunks = trials.div_ceil(CHUNK_TRIALS);
    let records = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = instance_rng(seed, chunk);
            let n = CHUNK_TRIALS.min(trials - chunk * CHUNK_TRIALS);
            (0..n).map(|_| sampler.trial(&mut rng)).collect::<Vec<_>>()
        })
        .collect();
    Ok(records)
}

/// Channel-only input rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassicalMode {
    /// `(q, q)`
    QQ,
    /// `(q, 0)`
    Q0,
    /// `(0, q)`
    ZeroQ,
}

/// Best unassisted success probability, ties going to the earlier of `QQ, Q0, ZeroQ`.
pub fn classical_baseline(spec: &ChannelSpec) -> (ClassicalMode, f64) {
    let candidates = [
        (ClassicalMode::QQ, 1.0 - spec.c3 / 2.0),
        (ClassicalMode::Q0, 1.0 - spec.c2 / 2.0),
        (ClassicalMode::ZeroQ, 1.0 - spec.c1 / 2.0),
    ];
    let mut best = candidates[0];
    for &c in &candidates[1..] {
        if c.1 > best.1 {
            best = c;
        }
    }
    best
}
