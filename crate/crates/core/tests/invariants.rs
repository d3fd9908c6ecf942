use proptest::prelude::*;

use entchan_core::linalg::{apply_local, born_expectation, conjugate_unitary, post_measurement, Side};
use entchan_core::optimizer::{analytic_optimum, closed_form_value, f_max, objective_reduced, QubitParams};
use entchan_core::protocol::{
    classical_baseline, enhancement_f, success_exact, success_probability, CaseProbabilities, InputMode,
    Strategy as Plan,
};
use entchan_core::qudit::{fully_entangled_bound, verify_truncation_inequality};
use entchan_core::random::{instance_rng, random_direction, random_directions, random_state, random_unitary};
use entchan_core::{ChannelSpec, TwoQuditState};

fn channel() -> impl Strategy<Value = ChannelSpec> {
    (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0).prop_filter_map("degenerate", |(x, y, z)| {
        let s = x + y + z;
        if s < 1e-6 {
            return None;
        }
        let (c1, c2) = (x / s, y / s);
        ChannelSpec::new(c1, c2, (1.0 - c1 - c2).max(0.0)).ok()
    })
}

fn unit() -> impl Strategy<Value = f64> {
    0.0f64..=1.0
}

proptest! {
    #[test]
    fn born_values_are_probabilities(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = instance_rng(seed, 0);
        let phi = random_state(d, &mut rng);
        let (psi, eta) = (random_direction(d, &mut rng), random_direction(d, &mut rng));
        let joint = born_expectation(&phi, Some(&psi), Some(&eta)).unwrap();
        let pa = born_expectation(&phi, Some(&psi), None).unwrap();
        let pb = born_expectation(&phi, None, Some(&eta)).unwrap();
        prop_assert!(joint >= -1e-15 && joint <= pa.min(pb) + 1e-12);
        prop_assert!(pa + pb - joint <= 1.0 + 1e-12);
    }

    #[test]
    fn collapse_branches_sum_to_one(seed in any::<u64>(), d in 2usize..6, alice in any::<bool>()) {
        let mut rng = instance_rng(seed, 1);
        let phi = random_state(d, &mut rng);
        let v = random_direction(d, &mut rng);
        let side = if alice { Side::Alice } else { Side::Bob };
        let mut total = 0.0;
        for outcome in [true, false] {
            if let Ok((p, post)) = post_measurement(&phi, side, &v, outcome) {
                prop_assert!((post.norm_sq() - 1.0).abs() < 1e-12);
                total += p;
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fully_entangled_state_is_fixed_by_conjugate_pairs(seed in any::<u64>(), d in 2usize..8) {
        let mut rng = instance_rng(seed, 2);
        let u = random_unitary(d, &mut rng);
        let phi = TwoQuditState::fully_entangled(d).unwrap();
        let out = apply_local(&phi, &u, &conjugate_unitary(&u)).unwrap();
        prop_assert!(out.distance_sq(&phi).sqrt() < 1e-12);
    }

    #[test]
    fn success_is_a_probability(seed in any::<u64>(), d in 2usize..5, spec in channel(), alpha_first in any::<bool>()) {
        let mut rng = instance_rng(seed, 3);
        let mode = if alpha_first { InputMode::AlphaQ } else { InputMode::QAlpha };
        let s = success_probability(&random_state(d, &mut rng), &random_directions(d, &mut rng), mode, &spec).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s));
    }

    #[test]
    fn qubit_strategies_never_beat_the_closed_form(seed in any::<u64>(), spec in channel(), alpha_first in any::<bool>()) {
        let mut rng = instance_rng(seed, 4);
        let mode = if alpha_first { InputMode::AlphaQ } else { InputMode::QAlpha };
        let s = success_probability(&random_state(2, &mut rng), &random_directions(2, &mut rng), mode, &spec).unwrap();
        prop_assert!(s <= analytic_optimum(&spec).unwrap().value + 1e-12);
    }

    #[test]
    fn equal_channel_success_is_five_sixths_plus_f(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = instance_rng(seed, 5);
        let strategy = Plan::new(random_state(d, &mut rng), random_directions(d, &mut rng), InputMode::QAlpha).unwrap();
        let s = success_exact(&strategy, &ChannelSpec::equal()).unwrap();
        let f = enhancement_f(strategy.shared(), strategy.directions()).unwrap();
        prop_assert!((s - 5.0 / 6.0 - f).abs() < 1e-12);
    }

    #[test]
    fn tag_success_and_failure_are_complementary(seed in any::<u64>(), d in 2usize..5) {
        let mut rng = instance_rng(seed, 6);
        let cases = CaseProbabilities::new(&random_state(d, &mut rng), &random_directions(d, &mut rng)).unwrap();
        prop_assert!((cases.indirect_success() + cases.indirect_failure() - 1.0).abs() < 1e-12);
        prop_assert!((cases.parity_success() + cases.parity_failure() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn input_order_swaps_first_and_second_weights(seed in any::<u64>(), spec in channel()) {
        let mut rng = instance_rng(seed, 7);
        let (phi, dirs) = (random_state(3, &mut rng), random_directions(3, &mut rng));
        let a = success_probability(&phi, &dirs, InputMode::AlphaQ, &spec).unwrap();
        let b = success_probability(&phi, &dirs, InputMode::QAlpha, &spec.swap_first_second()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn reduced_objective_agrees_with_born_rule(a in unit(), b in unit(), bp in unit()) {
        let p = QubitParams::new(a, b, bp).unwrap();
        let bell = TwoQuditState::fully_entangled(2).unwrap();
        let f = enhancement_f(&bell, &p.directions()).unwrap();
        prop_assert!((objective_reduced(&p) - f).abs() < 1e-12);
        prop_assert!(f <= f_max() + 1e-12);
    }

    #[test]
    fn closed_form_bounds(spec in channel()) {
        let v = analytic_optimum(&spec).unwrap().value;
        prop_assert!(v >= classical_baseline(&spec).1 - 1e-12);
        prop_assert!(v <= 1.0 + 1e-15);
        prop_assert!((closed_form_value(spec.c2, spec.c3) - closed_form_value(spec.c3, spec.c2)).abs() < 1e-15);
    }

    #[test]
    fn truncation_chain_holds(seed in any::<u64>(), d in 3usize..7) {
        let mut rng = instance_rng(seed, 8);
        let check = verify_truncation_inequality(&random_state(d, &mut rng), &random_directions(d, &mut rng)).unwrap();
        prop_assert!(check.ok, "{check:?}");
        prop_assert!(check.joint_delta < 1e-12);
    }

    #[test]
    fn fully_entangled_enhancement_is_bounded(seed in any::<u64>(), d in 2usize..6) {
        let mut rng = instance_rng(seed, 9);
        let phi = TwoQuditState::fully_entangled(d).unwrap();
        let f = enhancement_f(&phi, &random_directions(d, &mut rng)).unwrap();
        prop_assert!(f <= fully_entangled_bound(d).unwrap() + 1e-12);
    }

    #[test]
    fn strategy_json_round_trips_exactly(seed in any::<u64>(), d in 2usize..5, alpha_first in any::<bool>()) {
        let mut rng = instance_rng(seed, 10);
        let mode = if alpha_first { InputMode::AlphaQ } else { InputMode::QAlpha };
        let s = Plan::new(random_state(d, &mut rng), random_directions(d, &mut rng), mode).unwrap();
        prop_assert_eq!(Plan::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn channel_text_parses_with_renormalization(x in 0.01f64..1.0, y in 0.01f64..1.0, z in 0.01f64..1.0) {
        let s = x + y + z;
        let text = format!("{},{},{}", x / s, y / s, z / s);
        let spec: ChannelSpec = text.parse().unwrap();
        prop_assert!((spec.c1 + spec.c2 + spec.c3 - 1.0).abs() < 1e-12);
        prop_assert!((spec.c1 - x / s).abs() < 1e-9);
    }
}
