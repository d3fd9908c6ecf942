#![allow(clippy::approx_constant)]

use approx::assert_abs_diff_eq;

use entchan_core::optimizer::{
    analytic_optimum, closed_form_value, f_max, grid_oracle, numeric_optimize, objective_reduced, reduced_success,
    QubitParams, SharedMode,
};
use entchan_core::protocol::{classical_baseline, success_exact, InputMode};
use entchan_core::ChannelSpec;

fn spec(c1: f64, c2: f64, c3: f64) -> ChannelSpec {
    ChannelSpec::new(c1, c2, c3).unwrap()
}

#[test]
fn frozen_closed_form_values() {
    let cases = [
        ((1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0), 0.9023689270621825, InputMode::QAlpha),
        ((0.3, 0.6, 0.1), 0.958113883008419, InputMode::AlphaQ),
        ((0.3, 0.5, 0.2), 0.9302775637731995, InputMode::AlphaQ),
        ((0.25, 0.5, 0.25), 0.9267766952966369, InputMode::AlphaQ),
        ((0.2, 0.7, 0.1), 0.9618033988749895, InputMode::AlphaQ),
        ((0.1, 0.45, 0.45), 0.9554886114323222, InputMode::AlphaQ),
        ((0.6, 0.3, 0.1), 0.958113883008419, InputMode::QAlpha),
    ];
    for ((c1, c2, c3), value, mode) in cases {
        let s = if c1 == 1.0 / 3.0 {
            ChannelSpec::equal()
        } else {
            spec(c1, c2, c3)
        };
        let opt = analytic_optimum(&s).unwrap();
        assert_abs_diff_eq!(opt.value, value, epsilon = 1e-12);
        assert_eq!(opt.input_mode, mode, "{s}");
        let strategy = opt.strategy.unwrap();
        assert_abs_diff_eq!(success_exact(&strategy, &s).unwrap(), value, epsilon = 1e-12);
    }
}

#[test]
fn alpha_first_order_beats_plain_formula() {
    // Evaluating the closed form with (c2, c3) alone undershoots here.
    let s = spec(0.3, 0.6, 0.1);
    let plain = closed_form_value(s.c2, s.c3);
    let opt = analytic_optimum(&s).unwrap();
    assert_abs_diff_eq!(plain, 0.9541381265149109, epsilon = 1e-12);
    assert_abs_diff_eq!(opt.value, 0.9581138830084189, epsilon = 1e-12);
    let numeric = numeric_optimize(&s, 2, SharedMode::FreeSchmidt, 16, 7).unwrap();
    assert_eq!(numeric.input_mode, InputMode::AlphaQ);
    assert_abs_diff_eq!(numeric.value, opt.value, epsilon = 1e-9);
}

#[test]
fn second_third_swap_keeps_value_when_first_dominates() {
    for (c1, c2, c3) in [(0.5, 0.3, 0.2), (0.6, 0.1, 0.3), (0.4, 0.4, 0.2)] {
        let a = analytic_optimum(&spec(c1, c2, c3)).unwrap().value;
        let b = analytic_optimum(&spec(c1, c3, c2)).unwrap().value;
        assert_abs_diff_eq!(a, b, epsilon = 1e-14);
    }
}

#[test]
fn classical_channels_reach_one() {
    for s in [
        spec(0.5, 0.0, 0.5),
        spec(0.0, 0.5, 0.5),
        spec(0.4, 0.6, 0.0),
        spec(0.0, 0.0, 1.0),
    ] {
        let analytic = analytic_optimum(&s).unwrap();
        assert_abs_diff_eq!(analytic.value, 1.0, epsilon = 1e-15);
        let numeric = numeric_optimize(&s, 2, SharedMode::FreeSchmidt, 8, 3).unwrap();
        assert_abs_diff_eq!(numeric.value, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(classical_baseline(&s).1, 1.0, epsilon = 1e-15);
    }
}

#[test]
fn fine_grid_brackets_the_optimum() {
    let grid = grid_oracle(&ChannelSpec::equal(), 0.01).unwrap();
    let f = grid.value - 5.0 / 6.0;
    assert!(f <= f_max() + 1e-15);
    assert!(f_max() - f < 1e-3, "grid F {f}");
    let p = grid.params.unwrap();
    assert!((p.a - 0.7071).abs() < 0.02, "{p:?}");
    assert!((p.b - 0.9239).abs() < 0.02, "{p:?}");
    assert!((p.b_prime - 0.3827).abs() < 0.02, "{p:?}");
}

#[test]
fn grid_has_a_single_competitive_local_maximum() {
    let n = 100usize;
    let h = 1.0 / n as f64;
    let value = |i: usize, j: usize, k: usize| {
        objective_reduced(&QubitParams {
            a: i as f64 * h,
            b: j as f64 * h,
            b_prime: k as f64 * h,
        })
    };
    let mut peaks = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            for k in 0..=n {
                let v = value(i, j, k);
                if v < 0.5 * f_max() {
                    continue;
                }
                let mut is_peak = true;
                'nbr: for di in -1i64..=1 {
                    for dj in -1i64..=1 {
                        for dk in -1i64..=1 {
                            let (x, y, z) = (i as i64 + di, j as i64 + dj, k as i64 + dk);
                            if (di, dj, dk) == (0, 0, 0) || [x, y, z].iter().any(|&c| c < 0 || c > n as i64) {
                                continue;
                            }
                            if value(x as usize, y as usize, z as usize) > v {
                                is_peak = false;
                                break 'nbr;
                            }
                        }
                    }
                }
                if is_peak {
                    peaks.push((i, j, k));
                }
            }
        }
    }
    assert_eq!(peaks.len(), 1, "{peaks:?}");
    let (i, j, k) = peaks[0];
    assert!((i as f64 * h - 0.7071).abs() < 0.02);
    assert!((j as f64 * h - 0.9239).abs() < 0.02);
    assert!((k as f64 * h - 0.3827).abs() < 0.02);
}

#[test]
fn fully_entangled_qutrits_reach_two_thirds_of_the_qubit_gain() {
    let r = numeric_optimize(&ChannelSpec::equal(), 3, SharedMode::FullyEntangled, 32, 11).unwrap();
    assert_abs_diff_eq!(r.value - 5.0 / 6.0, 2.0 / 3.0 * f_max(), epsilon = 1e-6);
    assert!(r.value - 5.0 / 6.0 <= 2.0 / 3.0 * f_max() + 1e-12);
}

#[test]
fn numeric_search_is_deterministic_per_seed() {
    let s = spec(0.2, 0.3, 0.5);
    let a = numeric_optimize(&s, 2, SharedMode::FreeSchmidt, 4, 99).unwrap();
    let b = numeric_optimize(&s, 2, SharedMode::FreeSchmidt, 4, 99).unwrap();
    assert_eq!(a, b);
}

#[test]
fn reduced_success_matches_protocol_evaluation() {
    let s = spec(0.15, 0.35, 0.5);
    for (a, b, bp) in [(0.3, 0.8, 0.1), (0.9, 0.2, 0.6), (0.5, 0.5, 0.5)] {
        let p = QubitParams::new(a, b, bp).unwrap();
        for mode in [InputMode::QAlpha, InputMode::AlphaQ] {
            let exact = success_exact(&p.strategy(mode), &s).unwrap();
            assert_abs_diff_eq!(reduced_success(&p, &s, mode), exact, epsilon = 1e-12);
        }
    }
}

#[test]
fn invalid_grid_steps_are_rejected() {
    for step in [0.0, -0.1, 0.6, f64::NAN] {
        assert!(grid_oracle(&ChannelSpec::equal(), step).is_err());
    }
}
