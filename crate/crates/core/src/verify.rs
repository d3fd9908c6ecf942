//! Property suite over every module, run at fixed sample counts.
//!
//! Each property reports its worst observed deviation next to the tolerance
//! it is held to. The suite is what `entchan verify` prints.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::channel::{output_distribution, sample_output, ChannelInput, ChannelSpec, OutputTag};
use crate::linalg::{
    apply_local, born_expectation, conjugate_unitary, gram_schmidt_extend, post_measurement, Side, TwoQuditState,
};
use crate::optimizer::{
    analytic_optimum, closed_form_value, f_max, grid_oracle, numeric_optimize, objective_reduced, QubitParams,
    SharedMode,
};
use crate::protocol::{
    classical_baseline, enhancement_f, run_protocol, success_exact, success_probability, CaseProbabilities, Directions,
    InputMode, OutcomeTable, Strategy,
};
use crate::qudit::{fully_entangled_bound, truncate, verify_truncation_inequality, verify_unitary_freedom};
use crate::random::{instance_rng, random_direction, random_directions, random_spec, random_state, random_unitary};

/// χ² critical value for 2 degrees of freedom at significance 1e-6: `2 ln 10⁶`.
pub const CHI2_2DOF_1E6: f64 = 27.631021115928547;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Multiplies every tolerance; `1.0` in normal use.
    pub tolerance_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 20110906,
            tolerance_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub module: &'static str,
    pub name: &'static str,
    pub samples: usize,
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub results: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| !r.passed)
    }
}

struct Suite {
    config: SuiteConfig,
    results: Vec<PropertyResult>,
    next_stream: u64,
}

impl Suite {
    fn rng(&mut self) -> rand_chacha::ChaCha8Rng {
        self.next_stream += 1;
        instance_rng(self.config.seed, self.next_stream)
    }

    fn record(&mut self, module: &'static str, name: &'static str, samples: usize, worst: f64, tolerance: f64) {
        let tolerance = tolerance * self.config.tolerance_scale;
        self.results.push(PropertyResult {
            module,
            name,
            samples,
            worst,
            tolerance,
            passed: worst <= tolerance,
        });
    }
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |acc, v| if v.is_nan() { f64::NAN } else { acc.max(v.abs()) })
}

fn random_strategy<R: Rng>(d: usize, rng: &mut R) -> Strategy {
    let mode = if rng.random::<bool>() {
        InputMode::QAlpha
    } else {
        InputMode::AlphaQ
    };
    Strategy::new(random_state(d, rng), random_directions(d, rng), mode).expect("consistent random strategy")
}

/// `P = |v⟩⟨v|` when `outcome`, else `I − P`, as a dense row-major matrix.
fn projector(v: &crate::linalg::Direction, outcome: bool) -> Vec<Complex64> {
    let a = v.amplitudes();
    let d = a.len();
    let mut p = vec![Complex64::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let proj = a[i] * a[k].conj();
            p[i * d + k] = if outcome {
                proj
            } else if i == k {
                Complex64::new(1.0, 0.0) - proj
            } else {
                -proj
            };
        }
    }
    p
}

/// `‖(A ⊗ B)Φ‖²` with Φ as its coefficient matrix: `A · m · Bᵀ`.
fn projected_norm_sq(phi: &TwoQuditState, a: &[Complex64], b: &[Complex64]) -> f64 {
    let d = phi.dimension();
    let m = phi.coeffs();
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut z = Complex64::new(0.0, 0.0);
            for k in 0..d {
                for l in 0..d {
                    z += a[i * d + k] * b[j * d + l] * m[k * d + l];
                }
            }
            total += z.norm_sqr();
        }
    }
    total
}

fn linalg_properties(s: &mut Suite) {
    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for d in 2..=7 {
        for _ in 0..50 {
            worst = worst.max((random_direction(d, &mut rng).norm_sq() - 1.0).abs());
            worst = worst.max((random_state(d, &mut rng).norm_sq() - 1.0).abs());
        }
    }
    s.record("linalg", "constructed vectors are normalized", 600, worst, 1e-12);

    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for d in 2..=5 {
        for _ in 0..100 {
            let phi = random_state(d, &mut rng);
            let (psi, eta) = (random_direction(d, &mut rng), random_direction(d, &mut rng));
            let table = OutcomeTable::new(&phi, &psi, &eta).unwrap();
            let direct = [
                (true, true, table.tt),
                (true, false, table.tf),
                (false, true, table.ft),
                (false, false, table.ff),
            ];
            for (alpha, beta, expected) in direct {
                let p = projected_norm_sq(&phi, &projector(&psi, alpha), &projector(&eta, beta));
                worst = worst.max((p - expected).abs());
            }
            worst = worst.max((table.total() - 1.0).abs());
        }
    }
    s.record(
        "linalg",
        "2x2 outcome table matches projector sandwiches",
        400,
        worst,
        1e-12,
    );

    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for d in [2, 3, 4, 7] {
        let phi = TwoQuditState::fully_entangled(d).unwrap();
        for _ in 0..100 {
            let u = random_unitary(d, &mut rng);
            let out = apply_local(&phi, &u, &conjugate_unitary(&u)).unwrap();
            worst = worst.max(out.distance_sq(&phi).sqrt());
        }
    }
    s.record("linalg", "U (x) U* fixes the fully entangled state", 400, worst, 1e-12);

    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for d in 2..=5 {
        for _ in 0..100 {
            let phi = random_state(d, &mut rng);
            let (psi, eta) = (random_direction(d, &mut rng), random_direction(d, &mut rng));
            for alpha in [true, false] {
                let (pa, post) = post_measurement(&phi, Side::Alice, &psi, alpha).unwrap();
                for beta in [true, false] {
                    let chained = match post_measurement(&post, Side::Bob, &eta, beta) {
                        Ok((pb, _)) => pa * pb,
                        Err(_) => 0.0,
                    };
                    let tt = born_expectation(&phi, Some(&psi), Some(&eta)).unwrap();
                    let pa_true = born_expectation(&phi, Some(&psi), None).unwrap();
                    let pb_true = born_expectation(&phi, None, Some(&eta)).unwrap();
                    let joint = match (alpha, beta) {
                        (true, true) => tt,
                        (true, false) => pa_true - tt,
                        (false, true) => pb_true - tt,
                        (false, false) => 1.0 - pa_true - pb_true + tt,
                    };
                    worst = worst.max((chained - joint).abs());
                }
            }
        }
    }
    s.record(
        "linalg",
        "sequential collapse reproduces joint probabilities",
        400,
        worst,
        1e-12,
    );

    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for d in 2..=8 {
        for seeds in 1..=d.min(4) {
            let seed_vecs: Vec<_> = (0..seeds).map(|_| random_direction(d, &mut rng)).collect();
            let basis = gram_schmidt_extend(&seed_vecs, d).unwrap();
            for (i, u) in basis.iter().enumerate() {
                for (j, v) in basis.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((u.inner(v).norm() - target).abs());
                }
            }
        }
    }
    s.record("linalg", "Gram-Schmidt output is orthonormal", 25, worst, 1e-12);
}

fn channel_properties(s: &mut Suite) {
    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let spec = random_spec(&mut rng);
        for (q1, q2) in [(false, false), (false, true), (true, false), (true, true)] {
            let dist = output_distribution(ChannelInput::new(q1, q2), &spec);
            let probs = [dist[0].1, dist[1].1, dist[2].1];
            worst = worst.max(max_abs(probs.iter().zip(spec.probabilities()).map(|(a, b)| a - b)));
            worst = worst.max((probs.iter().sum::<f64>() - 1.0).abs());
        }
    }
    s.record("channel", "output distribution carries (c1,c2,c3)", 800, worst, 1e-12);

    let mut rng = s.rng();
    let spec = ChannelSpec::new(0.5, 0.3, 0.2).unwrap();
    let input = ChannelInput::new(true, false);
    let n = 1_000_000usize;
    let mut counts = [0usize; 3];
    for _ in 0..n {
        let out = sample_output(input, &spec, rng.random::<f64>());
        counts[match out.tag {
            OutputTag::First => 0,
            OutputTag::Second => 1,
            OutputTag::Parity => 2,
        }] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(spec.probabilities())
        .map(|(&c, p)| {
            let expected = p * n as f64;
            (c as f64 - expected).powi(2) / expected
        })
        .sum();
    s.record(
        "channel",
        "sampling chi-square (2 dof, 1e-6 level)",
        n,
        chi2,
        CHI2_2DOF_1E6,
    );
}

fn protocol_properties(s: &mut Suite) {
    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let strategy = random_strategy(2 + k % 3, &mut rng);
        let spec = random_spec(&mut rng);
        let report = run_protocol(&strategy, &spec, 100_000, s.config.seed.wrapping_add(k as u64)).unwrap();
        worst = worst.max(report.z_score().abs());
    }
    s.record(
        "protocol",
        "simulation within 4 sigma of closed form (|z|)",
        20,
        worst,
        4.0,
    );

    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let strategy = random_strategy(2 + k % 4, &mut rng);
        let exact = success_exact(&strategy, &ChannelSpec::equal()).unwrap();
        let f = enhancement_f(strategy.shared(), strategy.directions()).unwrap();
        worst = worst.max((exact - 5.0 / 6.0 - f).abs());
    }
    s.record("protocol", "equal channel success is 5/6 + F", 200, worst, 1e-12);

    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let strategy = random_strategy(2 + k % 4, &mut rng);
        let cases = CaseProbabilities::new(strategy.shared(), strategy.directions()).unwrap();
        for c in cases.cases() {
            worst = worst.max((-c).max(c - 1.0).max(0.0));
        }
        worst = worst.max((cases.indirect_success() + cases.indirect_failure() - 1.0).abs());
        worst = worst.max((cases.parity_success() + cases.parity_failure() - 1.0).abs());
    }
    s.record(
        "protocol",
        "case probabilities in [0,1], success + failure = 1 per tag",
        200,
        worst,
        1e-12,
    );

    let mut rng = s.rng();
    let (mut residual, mut endpoints): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let dirs = random_directions(2, &mut rng);
        let (worst_fit, gap) = l0_structure(&dirs);
        residual = residual.max(worst_fit);
        endpoints = endpoints.max(gap);
    }
    s.record(
        "protocol",
        "F(L0) - linear part is G*sqrt(L0(1-L0))",
        100,
        residual,
        1e-10,
    );
    s.record("protocol", "F(L0=0) = F(L0=1)", 100, endpoints, 1e-12);

    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let strategy = random_strategy(2 + k % 3, &mut rng);
        let spec = random_spec(&mut rng);
        let swapped = success_probability(strategy.shared(), strategy.directions(), InputMode::AlphaQ, &spec).unwrap();
        let direct = success_probability(
            strategy.shared(),
            strategy.directions(),
            InputMode::QAlpha,
            &spec.swap_first_second(),
        )
        .unwrap();
        worst = worst.max((swapped - direct).abs());
    }
    s.record(
        "protocol",
        "(alpha,q) at (c1,c2,c3) = (q,alpha) at (c2,c1,c3)",
        200,
        worst,
        1e-12,
    );
}

/// `(max fit residual at L0 ∈ {0.1, 0.3, 0.7}, |F(0) − F(1)|)` for qubit axes `dirs`.
pub fn l0_structure(dirs: &Directions) -> (f64, f64) {
    let f = |l0: f64| enhancement_f(&TwoQuditState::schmidt(l0).unwrap(), dirs).unwrap();
    let (f0, f1) = (f(0.0), f(1.0));
    let linear = |l0: f64| l0 * f1 + (1.0 - l0) * f0;
    let g = (f(0.5) - linear(0.5)) / 0.5;
    let residual = max_abs([0.1, 0.3, 0.7].map(|l0| f(l0) - linear(l0) - (l0 * (1.0 - l0)).sqrt() * g));
    (residual, (f0 - f1).abs())
}

fn optimizer_properties(s: &mut Suite) {
    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    let bell = TwoQuditState::fully_entangled(2).unwrap();
    for _ in 0..1000 {
        let p = QubitParams::new(rng.random(), rng.random(), rng.random()).unwrap();
        worst = worst.max((objective_reduced(&p) - enhancement_f(&bell, &p.directions()).unwrap()).abs());
    }
    s.record("optimizer", "reduced objective equals Born-rule F", 1000, worst, 1e-12);

    let mut rng = s.rng();
    let (mut upper, mut lower): (f64, f64) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for k in 0..50 {
        let spec = random_spec(&mut rng);
        let analytic = analytic_optimum(&spec).unwrap().value;
        let numeric = numeric_optimize(&spec, 2, SharedMode::FreeSchmidt, 8, s.config.seed.wrapping_add(k))
            .unwrap()
            .value;
        let grid = grid_oracle(&spec, 0.05).unwrap().value;
        upper = upper.max(numeric - analytic);
        lower = lower.max(grid - numeric);
    }
    s.record("optimizer", "numeric <= analytic (excess)", 50, upper, 1e-7);
    s.record("optimizer", "grid <= numeric (excess)", 50, lower, 1e-9);

    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 500 {
        let spec = random_spec(&mut rng);
        worst = worst.max((closed_form_value(spec.c2, spec.c3) - closed_form_value(spec.c3, spec.c2)).abs());
        if spec.c1 >= spec.c2.max(spec.c3) {
            let swapped = ChannelSpec::new(spec.c1, spec.c3, spec.c2).unwrap();
            let a = analytic_optimum(&spec).unwrap().value;
            let b = analytic_optimum(&swapped).unwrap().value;
            worst = worst.max((a - b).abs());
        }
        n += 1;
    }
    s.record("optimizer", "closed form symmetric under c2 <-> c3", 500, worst, 1e-12);

    let h = 1e-6;
    let p = QubitParams::optimal();
    let grad = [0, 1, 2].map(|i| {
        let shift = |delta: f64| {
            let mut v = [p.a, p.b, p.b_prime];
            v[i] += delta;
            objective_reduced(&QubitParams {
                a: v[0],
                b: v[1],
                b_prime: v[2],
            })
        };
        (shift(h) - shift(-h)) / (2.0 * h)
    });
    let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
    s.record("optimizer", "gradient vanishes at the interior optimum", 1, norm, 1e-5);

    let mut worst: f64 = f64::NEG_INFINITY;
    let mut count = 0;
    for i in 0..=20 {
        for j in 0..=(20 - i) {
            let (c1, c2) = (i as f64 * 0.05, j as f64 * 0.05);
            let spec = ChannelSpec::new(c1, c2, (1.0 - c1 - c2).max(0.0)).unwrap();
            let analytic = analytic_optimum(&spec).unwrap().value;
            worst = worst.max(classical_baseline(&spec).1 - analytic);
            count += 1;
        }
    }
    s.record(
        "optimizer",
        "analytic value >= classical baseline (deficit)",
        count,
        worst,
        1e-12,
    );
}

fn qudit_properties(s: &mut Suite) {
    let mut rng = s.rng();
    let (mut joint, mut marginal, mut chain): (f64, f64, f64) = (0.0, 0.0, f64::NEG_INFINITY);
    for k in 0..300 {
        let d = 3 + k % 3;
        let phi = random_state(d, &mut rng);
        let dirs = random_directions(d, &mut rng);
        let check = verify_truncation_inequality(&phi, &dirs).unwrap();
        joint = joint.max(check.joint_delta);
        if !check.marginals_dominate {
            marginal = 1.0;
        }
        chain = chain
            .max(check.f_full - check.f_truncated)
            .max(check.f_truncated - check.norm_sq * f_max());
    }
    s.record("qudit", "truncation preserves joint expectations", 300, joint, 1e-12);
    s.record(
        "qudit",
        "truncation lowers single-side expectations (violations)",
        300,
        marginal,
        0.0,
    );
    s.record(
        "qudit",
        "F(full) <= F(truncated) <= |trunc|^2 F_max (excess)",
        300,
        chain,
        1e-12,
    );

    let mut rng = s.rng();
    let mut worst: f64 = f64::NEG_INFINITY;
    for d in [3, 4, 5, 6] {
        let phi = TwoQuditState::fully_entangled(d).unwrap();
        for _ in 0..100 {
            let t = truncate(&phi, &random_directions(d, &mut rng)).unwrap();
            worst = worst.max(t.norm_sq - 2.0 / d as f64);
        }
    }
    s.record(
        "qudit",
        "fully entangled truncation norm <= 2/d (excess)",
        400,
        worst,
        1e-12,
    );

    let mut rng = s.rng();
    let mut worst: f64 = f64::NEG_INFINITY;
    for d in [3, 4] {
        let phi = TwoQuditState::fully_entangled(d).unwrap();
        let bound = fully_entangled_bound(d).unwrap();
        for _ in 0..500 {
            let f = enhancement_f(&phi, &random_directions(d, &mut rng)).unwrap();
            worst = worst.max(f - bound);
        }
    }
    s.record("qudit", "fully entangled F <= (2/d) F_max (excess)", 1000, worst, 1e-9);

    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for d in [2, 3, 4] {
        let phi = TwoQuditState::fully_entangled(d).unwrap();
        for _ in 0..100 {
            let dirs = random_directions(d, &mut rng);
            let u = random_unitary(d, &mut rng);
            worst = worst.max(verify_unitary_freedom(&phi, &dirs, &u).unwrap().delta);
        }
    }
    s.record("qudit", "F invariant under (U, U*)", 300, worst, 1e-12);
}

fn interface_properties(s: &mut Suite) {
    let mut rng = s.rng();
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let strategy = random_strategy(2 + k % 3, &mut rng);
        let spec = random_spec(&mut rng);
        let back = Strategy::from_json(&strategy.to_json()).unwrap();
        worst = worst.max((success_exact(&back, &spec).unwrap() - success_exact(&strategy, &spec).unwrap()).abs());
        let coeff_gap = back
            .shared()
            .coeffs()
            .iter()
            .zip(strategy.shared().coeffs())
            .map(|(a, b): (&Complex64, &Complex64)| (a - b).norm())
            .fold(0.0, f64::max);
        worst = worst.max(coeff_gap);
    }
    s.record(
        "protocol",
        "strategy JSON round trip preserves success",
        50,
        worst,
        1e-10,
    );
}

/// Run every property at its default sample count.
pub fn run_suite(config: SuiteConfig) -> SuiteReport {
    let mut suite = Suite {
        config,
        results: Vec::new(),
        next_stream: 0,
    };
    linalg_properties(&mut suite);
    channel_properties(&mut suite);
    protocol_properties(&mut suite);
    optimizer_properties(&mut suite);
    qudit_properties(&mut suite);
    interface_properties(&mut suite);
    SuiteReport {
        seed: config.seed,
        results: suite.results,
    }
}
