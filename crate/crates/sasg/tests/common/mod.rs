//! Shared test utilities: parameter samplers and the independent
//! brute-force equilibrium search used as the enumeration oracle.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sasg::beliefs::bayes_update;
use sasg::equilibria::{verify_pbne, PbneCategory, PbneProfile};
use sasg::game::{GameParameters, StrategyProfile};

/// A valid parameter set with all ordering constraints satisfied. Makes no
/// strictness promises: deviation margins may be arbitrarily small or zero.
pub fn sample_valid_params(rng: &mut ChaCha8Rng) -> GameParameters {
    let cost_ns = rng.gen_range(0.0..5.0);
    let cost_s = cost_ns + rng.gen_range(0.0..5.0);
    let psi_ns = rng.gen_range(0.0..3.0);
    let psi_s = psi_ns + rng.gen_range(0.0..3.0);
    let params = GameParameters {
        theta: rng.gen_range(0.0..=1.0),
        cost_s,
        cost_ns,
        gamma: rng.gen_range(0.0..10.0),
        psi_s,
        psi_ns,
        phi: rng.gen_range(0.0..10.0),
        tau: rng.gen_range(0.0..10.0),
        kappa: rng.gen_range(0.0..10.0),
        alpha: rng.gen_range(0.0..10.0),
        beta: rng.gen_range(0.0..10.0),
        sigma: rng.gen_range(0.0..10.0),
        u: rng.gen_range(0.0..10.0),
        v: rng.gen_range(0.0..10.0),
    };
    debug_assert!(params.validate().is_valid());
    params
}

/// A valid parameter set in the strict-deviation regime: every parameter is
/// bounded away from zero, the prior is interior, and the malicious type's
/// imitation gains are strictly positive, so the separating-nonexistence
/// argument applies with strict inequalities.
pub fn sample_strict_params(rng: &mut ChaCha8Rng) -> GameParameters {
    loop {
        let cost_ns = rng.gen_range(0.1..5.0);
        let cost_s = cost_ns + rng.gen_range(0.1..5.0);
        let psi_ns = rng.gen_range(0.1..3.0);
        let psi_s = psi_ns + rng.gen_range(0.1..3.0);
        let params = GameParameters {
            theta: rng.gen_range(0.01..0.99),
            cost_s,
            cost_ns,
            gamma: rng.gen_range(0.1..10.0),
            psi_s,
            psi_ns,
            phi: rng.gen_range(0.1..10.0),
            tau: rng.gen_range(0.1..10.0),
            kappa: rng.gen_range(0.1..10.0),
            alpha: rng.gen_range(0.1..10.0),
            beta: rng.gen_range(0.1..10.0),
            sigma: rng.gen_range(0.1..10.0),
            u: rng.gen_range(0.1..10.0),
            v: rng.gen_range(0.1..10.0),
        };
        let strict_sns = params.alpha + params.tau > params.cost_ns + 0.5;
        let strict_nss = params.alpha + params.tau + params.u > params.cost_s + 0.5;
        if strict_sns && strict_nss {
            debug_assert!(params.validate().is_valid());
            return params;
        }
    }
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exhaustive search over all 16 pure strategy corners, quantifying off-path
/// beliefs over `grid`: a corner is in the returned set when some belief
/// choice makes the full profile pass [`verify_pbne`].
pub fn brute_force_pure_corners(
    params: &GameParameters,
    eps: f64,
    grid: &[f64],
) -> BTreeSet<[u8; 4]> {
    let mut found = BTreeSet::new();
    for m in [0.0f64, 1.0] {
        for n in [0.0f64, 1.0] {
            for y in [0.0f64, 1.0] {
                for x in [0.0f64, 1.0] {
                    let strategy = StrategyProfile { m, n, y, x };
                    let passes = grid.iter().any(|&c| {
                        let beliefs = bayes_update(params.theta, m, n, c, c);
                        verify_pbne(params, &strategy, &beliefs, eps).passed
                    });
                    if passes {
                        found.insert([m as u8, n as u8, y as u8, x as u8]);
                    }
                }
            }
        }
    }
    found
}

/// The pure corners named by an enumeration (hybrid families excluded).
pub fn enumerated_corners(profiles: &[PbneProfile]) -> BTreeSet<[u8; 4]> {
    profiles
        .iter()
        .filter(|e| e.category != PbneCategory::Hybrid)
        .map(|e| {
            [
                e.strategy.m as u8,
                e.strategy.n as u8,
                e.strategy.y as u8,
                e.strategy.x as u8,
            ]
        })
        .collect()
}

/// The default off-path belief grid: `{0, κ/(κ+β+φ), 1}`.
pub fn default_grid(params: &GameParameters) -> Vec<f64> {
    vec![0.0, params.block_threshold(), 1.0]
}

/// Handcrafted degenerate parameter sets that exercise weak-deviation and
/// boundary behavior the random samplers essentially never hit.
pub fn degenerate_params() -> Vec<GameParameters> {
    let base = GameParameters::default();
    vec![
        // Imitation not worth it: alpha + tau < cost_ns revives rows the
        // strict regime forbids.
        GameParameters { alpha: 0.2, tau: 0.1, cost_ns: 2.0, cost_s: 3.0, ..base },
        // Defender indifferent at degenerate beliefs.
        GameParameters { beta: 0.0, phi: 0.0, ..base },
        GameParameters { kappa: 0.0, ..base },
        // Fully indifferent defender.
        GameParameters { beta: 0.0, phi: 0.0, kappa: 0.0, ..base },
        // Nature degenerate.
        GameParameters { theta: 0.0, ..base },
        GameParameters { theta: 1.0, ..base },
        // Prior exactly at the blocking threshold.
        GameParameters { theta: 0.25, ..base },
        // Everything zero: all comparisons tie.
        GameParameters {
            theta: 0.5,
            cost_s: 0.0,
            cost_ns: 0.0,
            gamma: 0.0,
            psi_s: 0.0,
            psi_ns: 0.0,
            phi: 0.0,
            tau: 0.0,
            kappa: 0.0,
            alpha: 0.0,
            beta: 0.0,
            sigma: 0.0,
            u: 0.0,
            v: 0.0,
        },
    ]
}
