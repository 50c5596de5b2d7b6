//! Equilibrium enumeration against the brute-force oracle, plus the
//! separating-nonexistence property on randomized parameter corpora.

mod common;

use common::{
    brute_force_pure_corners, default_grid, degenerate_params, enumerated_corners, sample_strict_params,
    sample_valid_params, seeded_rng,
};
use proptest::prelude::*;
use rand::Rng as _;
use sasg::equilibria::{
    check_separating, enumerate_pure_pbne, solve_mixed, verify_pbne, EnumerateOptions,
    MixedPbneError, PbneCategory,
};
use sasg::game::GameParameters;

const EPS: f64 = 1e-9;

#[test]
fn enumeration_matches_brute_force_on_degenerate_corners() {
    for (i, params) in degenerate_params().iter().enumerate() {
        let found = enumerate_pure_pbne(params, &EnumerateOptions::default());
        for profile in &found {
            assert!(profile.verified, "case {i}: unverified {profile:?}");
        }
        let enumerated = enumerated_corners(&found);
        let oracle = brute_force_pure_corners(params, EPS, &default_grid(params));
        assert_eq!(enumerated, oracle, "case {i}: {params:?}");
    }
}

#[test]
fn enumeration_matches_brute_force_on_random_corpus() {
    let mut rng = seeded_rng(0x5eed_0001);
    for i in 0..100 {
        let params = sample_valid_params(&mut rng);
        let found = enumerate_pure_pbne(&params, &EnumerateOptions::default());
        for profile in &found {
            assert!(
                verify_pbne(&params, &profile.strategy, &profile.beliefs, EPS).passed,
                "case {i}: profile fails its oracle: {profile:?} under {params:?}"
            );
        }
        let enumerated = enumerated_corners(&found);
        let oracle = brute_force_pure_corners(&params, EPS, &default_grid(&params));
        assert_eq!(enumerated, oracle, "case {i}: {params:?}");
    }
}

#[test]
fn strict_regime_never_yields_separating_profiles() {
    let mut rng = seeded_rng(0x5eed_0002);
    for _ in 0..300 {
        let params = sample_strict_params(&mut rng);
        let found = enumerate_pure_pbne(&params, &EnumerateOptions::default());
        assert!(
            found.iter().all(|e| e.category != PbneCategory::Separating),
            "separating equilibrium under {params:?}"
        );
        let certs = check_separating(&params).expect("strict regime");
        assert!(certs.s_ns.gain > 0.0);
        assert!(certs.ns_s.gain > 0.0);
    }
}

#[test]
fn mixed_solution_contract_holds_whenever_it_returns() {
    use sasg::beliefs::dm_expected_utilities;
    use sasg::game::{app_signal_utility, AppType, Signal};

    let mut rng = seeded_rng(0x5eed_0003);
    let mut successes = 0;
    for _ in 0..300 {
        // Place theta exactly on the threshold half the time so the solver
        // has a chance to succeed.
        let mut params = sample_strict_params(&mut rng);
        if rng.gen_bool(0.5) {
            params.theta = params.block_threshold();
        }
        match solve_mixed(&params, EPS) {
            Ok(mixed) => {
                successes += 1;
                assert!((params.theta - params.block_threshold()).abs() <= EPS);
                for t in [AppType::Malicious, AppType::Honest] {
                    let eu_s = app_signal_utility(&params, t, Signal::Suspicious, mixed.y);
                    let eu_ns = app_signal_utility(&params, t, Signal::NonSuspicious, mixed.x);
                    assert!((eu_s - eu_ns).abs() <= EPS, "{t} not indifferent: {params:?}");
                }
                for s in [Signal::Suspicious, Signal::NonSuspicious] {
                    let (eu_b, eu_a) = dm_expected_utilities(&params, s, mixed.q_star);
                    assert!((eu_b - eu_a).abs() <= EPS, "DM not indifferent on {s}");
                }
            }
            Err(
                MixedPbneError::ThetaMismatch { .. }
                | MixedPbneError::SingularIndifferenceSystem { .. }
                | MixedPbneError::InfeasibleMixing { .. },
            ) => {}
            Err(other) => panic!("unexpected error {other:?} for {params:?}"),
        }
    }
    assert!(successes > 50, "solver should succeed on threshold priors, got {successes}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Enumerator/brute-force agreement under proptest-driven parameters.
    #[test]
    fn enumeration_agrees_with_oracle(seed in 0u64..10_000) {
        let mut rng = seeded_rng(seed);
        let params = sample_valid_params(&mut rng);
        let found = enumerate_pure_pbne(&params, &EnumerateOptions::default());
        let enumerated = enumerated_corners(&found);
        let oracle = brute_force_pure_corners(&params, EPS, &default_grid(&params));
        prop_assert_eq!(enumerated, oracle);
    }

    /// The pooling threshold on theta and the hybrid threshold on the
    /// posterior are the same function of their argument.
    #[test]
    fn threshold_forms_are_equivalent(
        belief in 0.0f64..=1.0,
        kappa in 0.01f64..10.0,
        beta in 0.01f64..10.0,
        phi in 0.01f64..10.0,
    ) {
        let params = GameParameters { kappa, beta, phi, ..GameParameters::default() };
        let normalized = belief >= params.block_threshold();
        let ratio_form = belief >= (1.0 - belief) * kappa / (beta + phi);
        prop_assert_eq!(normalized, ratio_form);
    }
}
