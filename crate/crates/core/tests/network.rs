mod common;

use common::*;
use gan_mdf::nn::{ActivationKind, AdamState, DenseNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [ActivationKind; 5] = [
    ActivationKind::Sigmoid,
    ActivationKind::LeakyRelu { alpha: 0.01 },
    ActivationKind::Ricker,
    ActivationKind::Dft,
    ActivationKind::InverseMultiquadratic,
];

#[test]
fn finite_differences_agree_for_every_activation() {
    for (i, kind) in KINDS.into_iter().enumerate() {
        let r = gradient_check(kind, 20, 100 + i as u64);
        assert!(r.max_rel < 1e-4, "{kind:?}: relative error {}", r.max_rel);
        assert!(r.max_oracle_diff < 1e-12, "{kind:?}: oracle diff {}", r.max_oracle_diff);
    }
}

#[test]
fn leaky_relu_custom_slope_gradients() {
    let r = gradient_check(ActivationKind::LeakyRelu { alpha: 0.2 }, 10, 7);
    assert!(r.max_rel < 1e-4, "{}", r.max_rel);
}

#[test]
fn forward_matches_straight_line_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for kind in KINDS {
        for _ in 0..10 {
            let (net, x) = random_network(kind, &mut rng);
            let got = net.eval(&x).unwrap();
            let want = Mlp::from_network(&net).forward(&x).output().to_vec();
            assert!(max_abs_diff(&got, &want) < 1e-12, "{kind:?}");
        }
    }
}

#[test]
fn hand_computed_two_layer_forward() {
    // 2 -> 2 (sigmoid) -> 1 (identity)
    let net = DenseNetwork::from_parts(
        vec![2, 2, 1],
        vec![ActivationKind::Sigmoid],
        ActivationKind::Identity,
        vec![vec![1.0, -1.0, 0.5, 2.0], vec![3.0, -2.0]],
        vec![vec![0.0, -1.0], vec![0.25]],
    )
    .unwrap();
    let s = |z: f64| 1.0 / (1.0 + (-z).exp());
    let (a, b) = (0.3, 0.7);
    let want = 0.25 + 3.0 * s(a - b) - 2.0 * s(0.5 * a + 2.0 * b - 1.0);
    assert!((net.eval(&[a, b]).unwrap()[0] - want).abs() < 1e-12);
}

#[test]
fn adam_matches_reference_over_many_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut params: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut reference = params.clone();
    let mut state = AdamState::new(&[6]);
    let mut ref_state = RefAdam::new(6);
    for _ in 0..50 {
        let g: Vec<f64> = (0..6).map(|_| rng.random_range(-3.0..3.0)).collect();
        state.step(&mut [params.as_mut_slice()], &[g.as_slice()], 0.01).unwrap();
        ref_state.step(&mut reference, &g, 0.01);
    }
    assert!(max_abs_diff(&params, &reference) < 1e-12);
}

#[test]
fn network_json_round_trip_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (net, x) = random_network(ActivationKind::Dft, &mut rng);
    let text = serde_json::to_string(&net).unwrap();
    let back: DenseNetwork = serde_json::from_str(&text).unwrap();
    assert_eq!(net, back);
    assert_eq!(net.eval(&x).unwrap(), back.eval(&x).unwrap());
}
