//! Property-based invariants.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use rdnet::certificates::{mode_matrices, solve_lambda, verify_certificate};
use rdnet::document::SystemDocument;
use rdnet::geometry::{helmholtz_solve, Grid, GridFunction, RectDomain, ScalarField};
use rdnet::initial::InitialHistory;
use rdnet::model::{Activation, DelaySpec, Mode, ScalarActivation, SwitchedNetwork};
use rdnet::presets::{self, EXAMPLE41_Q};
use rdnet::simulator::{
    decide_from_scores, fit_decay, simulate, simulate_ode, switching_scores, SimConfig, StateForm, SwitchingForm,
};

fn grid_strategy() -> impl Strategy<Value = Grid> {
    prop_oneof![
        (0.3f64..3.0, 3usize..40).prop_map(|(l, n)| Grid::uniform(RectDomain::interval(l).unwrap(), n).unwrap()),
        (0.3f64..3.0, 0.3f64..3.0, 3usize..20, 3usize..20)
            .prop_map(|(a, b, nx, ny)| Grid::new(RectDomain::rectangle(a, b).unwrap(), &[nx, ny]).unwrap()),
    ]
}

fn grid_and_vectors() -> impl Strategy<Value = (Grid, Vec<f64>, Vec<f64>)> {
    grid_strategy().prop_flat_map(|g| {
        let n = g.len();
        (Just(g), prop::collection::vec(-1.0f64..1.0, n), prop::collection::vec(-1.0f64..1.0, n))
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn scalar_network(d: f64, c: f64, a: f64, b: f64, tau: f64) -> SwitchedNetwork {
    let mode = Mode::new(
        vec![d],
        vec![c],
        DMatrix::from_element(1, 1, a),
        DMatrix::from_element(1, 1, b),
        vec![0.0],
        RectDomain::interval(1.0).unwrap(),
    )
    .unwrap();
    let act = Activation::uniform(ScalarActivation::Tanh { scale: 1.0 }, 1.0, 1).unwrap();
    SwitchedNetwork::new(vec![mode], act, tau, DelaySpec::Constant(tau), DMatrix::identity(1, 1), 1.01, 0.1).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_is_symmetric_and_nonpositive((grid, a, b) in grid_and_vectors()) {
        let (la, lb) = (grid.laplacian(&a), grid.laplacian(&b));
        let scale = 1.0 + dot(&la, &la).sqrt() * dot(&b, &b).sqrt();
        prop_assert!((dot(&la, &b) - dot(&a, &lb)).abs() <= 1e-12 * scale);
        prop_assert!(dot(&la, &a) <= 1e-12 * scale);
    }

    #[test]
    fn helmholtz_round_trip((grid, u, _) in grid_and_vectors(), c in 0.0f64..50.0) {
        let lap = grid.laplacian(&u);
        let rhs: Vec<f64> = u.iter().zip(&lap).map(|(x, l)| c * x - l).collect();
        let solved = helmholtz_solve(&grid, c, &ScalarField::from_values(&grid, rhs).unwrap()).unwrap();
        let err = solved.values().iter().zip(&u).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-9, "err {err:e}");
    }

    #[test]
    fn margin_grows_with_gamma_and_q(case in 1u8..=3, g1 in 0.01f64..1.0, dg in 0.0f64..0.5, q1 in 1.0001f64..1.5, dq in 0.0f64..0.5) {
        let net = presets::example41(case).unwrap();
        let beta = presets::example41_published(case).unwrap().beta;
        let base = verify_certificate(&net, &beta, g1, q1).unwrap().margin;
        prop_assert!(verify_certificate(&net, &beta, g1 + dg, q1).unwrap().margin >= base - 1e-12);
        prop_assert!(verify_certificate(&net, &beta, g1, q1 + dq).unwrap().margin >= base - 1e-12);
    }

    /// When `Σβ_σ Q_σ ≺ 0`, every nonzero state lies in some region with a
    /// negative form, and the law picks a mode whose score is minimal.
    #[test]
    fn switching_regions_cover(case in 1u8..=3, state in prop::collection::vec(-5.0f64..5.0, 2 * 9), current in 0usize..3) {
        let p = presets::example41_published(case).unwrap();
        let q = mode_matrices(&presets::example41(case).unwrap(), p.gamma, EXAMPLE41_Q);
        prop_assume!(state.iter().any(|x| *x != 0.0));
        for form in [SwitchingForm::Integrated, SwitchingForm::Pointwise] {
            let scores = switching_scores(&state, 9, 0.01, &q, form);
            let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
            if form == SwitchingForm::Integrated {
                let weighted: f64 = p.beta.iter().zip(&scores).map(|(b, s)| b * s).sum();
                prop_assert!(weighted < 0.0);
                prop_assert!(min < 0.0);
            }
            let chosen = decide_from_scores(&scores, current, 0.0);
            prop_assert!(scores[chosen] < 0.0 || scores[chosen] == min);
            prop_assert!(scores[chosen] <= min || scores[current] < 0.0);
        }
    }

    #[test]
    fn zero_data_stays_zero(d in 0.01f64..0.5, c in 0.1f64..3.0, a in -2.0f64..2.0, b in -2.0f64..2.0, tau in 0.05f64..1.5) {
        let net = scalar_network(d, c, a, b, tau);
        let grid = Grid::uniform(RectDomain::interval(1.0).unwrap(), 25).unwrap();
        let config = SimConfig::new(SimConfig::default_dt(tau), 2.0);
        let pde = simulate(&net, &grid, StateForm::Absolute, &config, &InitialHistory::zero()).unwrap();
        prop_assert!(pde.v.iter().all(|v| *v == 0.0));
        let ode = simulate_ode(&net, StateForm::Absolute, &config, &InitialHistory::zero()).unwrap();
        prop_assert!(ode.final_state.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn lambda_root(b in 0.0f64..5.0, gap in 1e-3f64..5.0, tau in 0.0f64..4.0) {
        let a = b + gap;
        let l = solve_lambda(a, b, tau).unwrap();
        prop_assert!(l > 0.0 && l <= a);
        prop_assert!((l - a + b * (l * tau).exp()).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn decay_fit_recovers_exponentials(rate in 0.01f64..5.0, amp in 1e-3f64..1e3) {
        let times: Vec<f64> = (0..400).map(|k| k as f64 * 0.01).collect();
        let v: Vec<f64> = times.iter().map(|t| amp * (-2.0 * rate * t).exp()).collect();
        let d = fit_decay(&times, &v, 0.5).unwrap();
        prop_assert!((d.rate - rate).abs() <= 1e-9 * rate.max(1.0));
        prop_assert!(d.r_squared > 1.0 - 1e-9);
    }

    #[test]
    fn documents_round_trip(d in 1e-3f64..1.0, c in 1e-3f64..3.0, a in -1.0f64..1.0, j in -1.0f64..1.0, len in 0.2f64..3.0, tau in 0.0f64..2.0) {
        let mode = Mode::new(vec![d], vec![c], DMatrix::from_element(1, 1, a), DMatrix::from_element(1, 1, -a), vec![j], RectDomain::square(len).unwrap()).unwrap();
        let act = Activation::uniform(ScalarActivation::Saturation, 1.0, 1).unwrap();
        let net = SwitchedNetwork::new(vec![mode], act, tau, DelaySpec::Constant(tau), DMatrix::identity(1, 1) * 0.3, 1.2, 0.05).unwrap();
        let doc = SystemDocument::from_network(&net, None).unwrap();
        let back = SystemDocument::from_json(&doc.to_json().unwrap()).unwrap();
        prop_assert_eq!(&back, &doc);
        let expected = 2.0 * PI * PI / (len * len);
        prop_assert!((back.network().unwrap().modes[0].lambda1 - expected).abs() <= 1e-14 * expected);
    }
}
