mod common;

use std::f64::consts::PI;

use common::{c, propagator_oracle};
use ep_coupler::classical::{
    classical_power_curve, classify_ep, coupler_matrix, propagate_classical, supermodes, EpRegime,
};
use ep_coupler::scattering::{scattering_curve, scattering_matrix};
use ep_coupler::{ClassicalInput, CouplerParams, PropagationGrid};
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

fn random_params(rng: &mut impl Rng) -> CouplerParams {
    let kappa = rng.random_range(0.2..2.0);
    CouplerParams::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        kappa,
        kappa * rng.random_range(0.0..10.0),
    )
    .unwrap()
}

#[test]
fn matches_dense_exponential() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        // every tenth draw sits on or next to the EP
        let p = if i % 10 == 0 {
            let eps = [0.0, 1e-9, -1e-9, 1e-6][i / 10 % 4];
            CouplerParams::symmetric(1.0, 2.0 + eps).unwrap()
        } else {
            random_params(&mut rng)
        };
        let z = rng.random_range(0.0..10.0);
        let s = scattering_matrix(&p, z).unwrap();
        let want = propagator_oracle(&coupler_matrix(&p), z);
        worst = worst.max((*s.matrix() - want).max_abs());
    }
    assert!(worst < 1e-10, "max deviation {worst:e}");
}

#[test]
fn unitary_without_loss() {
    let p = CouplerParams::new(0.3, -0.4, 0.8, 0.0).unwrap();
    let grid = PropagationGrid::new(25.0, 400).unwrap();
    for s in scattering_curve(&p, &grid).unwrap() {
        let m = *s.matrix();
        let gram = m.transpose().rows();
        let conj_t = ep_coupler::ComplexMatrix2::new(
            gram[0][0].conj(),
            gram[0][1].conj(),
            gram[1][0].conj(),
            gram[1][1].conj(),
        )
        .unwrap();
        let id = conj_t * m;
        let dev = (id - ep_coupler::ComplexMatrix2::identity()).max_abs();
        assert!(dev < 1e-12, "z={} deviation {dev:e}", s.z());
    }
}

#[test]
fn passive_on_grids() {
    for gamma in [0.1, 1.0, 2.0, 2.5, 10.0, 50.0] {
        let p = CouplerParams::new(0.5, -0.5, 1.0, gamma).unwrap();
        let grid = PropagationGrid::new(20.0, 300).unwrap();
        for s in scattering_curve(&p, &grid).unwrap() {
            let (hi, lo) = s.singular_values();
            assert!(
                hi <= 1.0 + 1e-12 && lo >= 0.0 && lo <= hi,
                "gamma={gamma} z={}: {hi} {lo}",
                s.z()
            );
        }
    }
}

#[test]
fn lossless_full_swap_of_classical_amplitudes() {
    let p = CouplerParams::symmetric(1.0, 0.0).unwrap();
    let [a, b] = propagate_classical(&p, [c(1.0, 0.0), c(0.0, 0.0)], PI / 2.0).unwrap();
    assert!(a.norm() < 1e-15);
    assert!((b - c(0.0, -1.0)).norm() < 1e-15);
}

#[test]
fn jordan_limit_of_classical_amplitudes() {
    let p = CouplerParams::symmetric(1.0, 2.0).unwrap();
    let [a, b] = propagate_classical(&p, [c(1.0, 0.0), c(0.0, 0.0)], 1.0).unwrap();
    let e = (-1.0f64).exp();
    assert!((a - c(2.0 * e, 0.0)).norm() < 1e-15);
    assert!((b - c(0.0, -e)).norm() < 1e-15);
}

#[test]
fn power_never_increases() {
    let grid = PropagationGrid::new(15.0, 3001).unwrap();
    for gamma in [0.0, 0.5, 2.0, 3.0, 10.0] {
        for input in [
            ClassicalInput::SingleWaveguide,
            ClassicalInput::BalancedOrthogonal,
        ] {
            let curve =
                classical_power_curve(&CouplerParams::symmetric(1.0, gamma).unwrap(), input, &grid)
                    .unwrap();
            let v: Vec<f64> = curve.values().collect();
            for w in v.windows(2) {
                assert!(
                    w[1] <= w[0] * (1.0 + 1e-13),
                    "gamma={gamma} {}: {} -> {}",
                    input.name(),
                    w[0],
                    w[1]
                );
            }
        }
    }
}

#[test]
fn lossless_power_is_constant() {
    let grid = PropagationGrid::new(10.0, 101).unwrap();
    let curve = classical_power_curve(
        &CouplerParams::symmetric(1.0, 0.0).unwrap(),
        ClassicalInput::SingleWaveguide,
        &grid,
    )
    .unwrap();
    assert!(curve.values().all(|v| (v - 1.0).abs() < 1e-13));
}

#[test]
fn below_ep_beating_period() {
    let gamma = 0.5;
    let period = PI / (1.0 - gamma * gamma / 4.0f64).sqrt();
    let p = CouplerParams::symmetric(1.0, gamma).unwrap();
    let reduced = |z: f64| {
        let s = scattering_matrix(&p, z).unwrap();
        ep_coupler::classical::classical_power(&s, ClassicalInput::BalancedOrthogonal)
            * (gamma * z).exp()
    };
    // locate the period from the first two maxima of P e^{gamma z}
    let n = 20000;
    let zs: Vec<f64> = (0..=n)
        .map(|i| 3.0 * period * i as f64 / n as f64)
        .collect();
    let vals: Vec<f64> = zs.iter().map(|&z| reduced(z)).collect();
    let maxima: Vec<f64> = (1..n)
        .filter(|&i| vals[i] > vals[i - 1] && vals[i] >= vals[i + 1])
        .map(|i| zs[i])
        .collect();
    assert!(maxima.len() >= 2, "{maxima:?}");
    let measured = maxima[1] - maxima[0];
    assert!(
        (measured - period).abs() / period < 0.01,
        "measured {measured}, expected {period}"
    );
    for &z in &[0.3, 1.1, 2.7] {
        assert!((reduced(z + period) - reduced(z)).abs() < 0.01 * reduced(z));
    }
}

#[test]
fn ep_regimes_at_sample_losses() {
    let regime = |g: f64| {
        classify_ep(&CouplerParams::symmetric(1.0, g).unwrap())
            .unwrap()
            .regime
    };
    assert_eq!(regime(0.5), EpRegime::Below);
    assert_eq!(regime(2.0), EpRegime::At);
    assert_eq!(regime(10.0), EpRegime::Above);
    assert!(classify_ep(&CouplerParams::new(0.0, 1.0, 1.0, 2.0).unwrap()).is_err());
}

#[test]
fn ep_discrete_log_derivative_is_flat() {
    let gamma = 2.0;
    let grid = PropagationGrid::new(20.0, 2001).unwrap();
    let curve = classical_power_curve(
        &CouplerParams::symmetric(1.0, gamma).unwrap(),
        ClassicalInput::BalancedOrthogonal,
        &grid,
    )
    .unwrap();
    let f: Vec<(f64, f64)> = curve
        .points()
        .iter()
        .filter(|(z, _)| *z >= 10.0)
        .map(|&(z, p)| (z, (p * (gamma * z).exp()).ln() - 2.0 * z.ln()))
        .collect();
    for w in f.windows(2) {
        let d = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        assert!(d.abs() < 0.02, "derivative {d} at z={}", w[0].0);
    }
}

proptest! {
    #[test]
    fn semigroup(
        b1 in -2.0f64..2.0, b2 in -2.0f64..2.0, k in 0.2f64..2.0, g in 0.0f64..10.0,
        z1 in 0.0f64..5.0, z2 in 0.0f64..5.0,
    ) {
        let p = CouplerParams::new(b1, b2, k, g).unwrap();
        let a = scattering_matrix(&p, z1 + z2).unwrap();
        let b = *scattering_matrix(&p, z2).unwrap().matrix() * *scattering_matrix(&p, z1).unwrap().matrix();
        prop_assert!((*a.matrix() - b).max_abs() < 1e-10);
    }

    #[test]
    fn determinant_modulus(
        b1 in -2.0f64..2.0, b2 in -2.0f64..2.0, g in 0.0f64..10.0, z in 0.0f64..20.0,
    ) {
        let p = CouplerParams::new(b1, b2, 1.0, g).unwrap();
        let s = scattering_matrix(&p, z).unwrap();
        let want = (-g * z).exp();
        prop_assert!((s.det().norm() - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn supermode_trace(
        b1 in -5.0f64..5.0, b2 in -5.0f64..5.0, k in 0.01f64..5.0, g in 0.0f64..20.0,
    ) {
        let p = CouplerParams::new(b1, b2, k, g).unwrap();
        let pair = supermodes(&p);
        let tr = c(b1 + b2, -g);
        prop_assert!((pair.lambda1 + pair.lambda2 - tr).norm() < 1e-12 * (1.0 + tr.norm()));
        prop_assert!(pair.lambda1.im <= 1e-12 && pair.lambda2.im <= 1e-12);
        prop_assert!(pair.lambda1.im >= pair.lambda2.im);
    }
}
