use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crn_msa::generate::{random_network, Limits};
use crn_msa::kinetics::PLKinetics;
use crn_msa::linalg::{in_column_space, int, to_f64, Rational, Relation};
use crn_msa::msa::{is_all_middle, run_msa, MsaConfig, MsaError, Verdict};
use crn_msa::network::{Complex, ReactionSpec};
use crn_msa::Network;

fn reversible_ab() -> Network {
    Network::new(
        vec!["A".into(), "B".into()],
        vec![
            ReactionSpec::new("f", Complex::from_pairs([(0, int(1))]), Complex::from_pairs([(1, int(1))])),
            ReactionSpec::new("b", Complex::from_pairs([(1, int(1))]), Complex::from_pairs([(0, int(1))])),
        ],
    )
    .unwrap()
}

#[test]
fn reversible_pair_is_monostationary() {
    let net = reversible_ab();
    let out = run_msa(&net, &PLKinetics::mass_action(&net), &MsaConfig::default()).unwrap();
    assert_eq!(out.verdict, Verdict::Monostationary);
    assert!(out.witness.is_none());
}

#[test]
fn zero_budget_is_an_error() {
    let net = reversible_ab();
    let cfg = MsaConfig {
        budget: 0,
        ..MsaConfig::default()
    };
    assert_eq!(
        run_msa(&net, &PLKinetics::mass_action(&net), &cfg).unwrap_err(),
        MsaError::BudgetExhausted { budget: 0 }
    );
}

proptest! {
    /// On `a + b = T`, `f(a) = k2 (T − a) − k1 a` is affine with slope
    /// `−(k1 + k2) < 0`, so it has exactly one root in `(0, T)`.
    #[test]
    fn reversible_pair_has_one_equilibrium_per_class(k1 in 0.01f64..100.0, k2 in 0.01f64..100.0, total in 0.01f64..100.0) {
        let f = |a: f64| k2 * (total - a) - k1 * a;
        let steps = 2000;
        let mut changes = 0;
        let mut prev = f(0.0);
        for i in 1..=steps {
            let cur = f(total * i as f64 / steps as f64);
            if prev.signum() != cur.signum() {
                changes += 1;
            }
            prev = cur;
        }
        prop_assert_eq!(changes, 1);
        let root = k2 * total / (k1 + k2);
        prop_assert!(f(root).abs() < 1e-9 * (1.0 + k1 + k2) * total);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn witnesses_are_genuine(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let limits = Limits { max_species: 3, max_complexes: 4, max_reactions: 5, ..Limits::default() };
        let net = random_network(&mut rng, &limits);
        let kin = PLKinetics::mass_action(&net);
        let cfg = MsaConfig { budget: 20_000, ..MsaConfig::default() };
        let out = match run_msa(&net, &kin, &cfg) {
            Ok(out) => out,
            Err(MsaError::BudgetExhausted { .. }) | Err(MsaError::TooManyOrderedClasses { .. }) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        let Some(w) = out.witness else { return Ok(()) };
        prop_assert_eq!(out.verdict, Verdict::Multistationary);
        prop_assert!(w.c_star.iter().chain(&w.c_star2).all(|&c| c > 0.0));
        prop_assert!(w.c_star.iter().zip(&w.c_star2).any(|(a, b)| a != b));
        prop_assert!(in_column_space(&net.stoichiometric_matrix(), &w.sigma));
        prop_assert!(!w.sigma.iter().all(Zero::is_zero));
        for s in 0..net.num_species() {
            let u = to_f64(&w.mu[s]);
            let diff = w.c_star[s] - w.c_star2[s];
            prop_assert!((diff - to_f64(&w.sigma[s])).abs() < 1e-9 * (1.0 + diff.abs()));
            if u != 0.0 {
                prop_assert!(((w.c_star[s] / w.c_star2[s]).ln() - u).abs() < 1e-9);
            }
        }
        prop_assert!(w.recovery.residual_star < 1e-6 && w.recovery.residual_star2 < 1e-6);
        prop_assert!(w.provenance.system.is_satisfied(&w.sample));
        let finite = w.provenance.kinds.iter().all(|k| k.has_finite_m());
        if finite && is_all_middle(&w.provenance.shelving) {
            // only ordering constraints among the M variables are strict
            let m = net.num_species();
            for c in w.provenance.system.constraints() {
                if c.relation != Relation::Eq {
                    prop_assert!(c.coeffs[..m].iter().all(Zero::is_zero));
                }
            }
        }
    }
}

/// Per reactant degree of a one-species mass-action network, whether
/// `f(x) = Σ_j k_j (y'_j − y_j) x^{y_j}` can get a positive and a negative
/// coefficient there.
fn coefficient_signs(net: &Network) -> Vec<(bool, bool)> {
    let mut degrees: Vec<(Rational, bool, bool)> = Vec::new();
    for j in 0..net.num_reactions() {
        let d = net.reactant(j).get(0);
        let up = net.product(j).get(0) > d;
        match degrees.iter_mut().find(|e| e.0 == d) {
            Some(e) => {
                e.1 |= up;
                e.2 |= !up;
            }
            None => degrees.push((d, up, !up)),
        }
    }
    degrees.sort();
    degrees.into_iter().map(|(_, p, m)| (p, m)).collect()
}

/// Most sign changes over attainable coefficient sequences.
fn max_sign_changes(signs: &[(bool, bool)]) -> usize {
    // best[s]: most changes of a prefix ending in sign s (0 is +, 1 is −)
    let mut best: [Option<usize>; 2] = [None, None];
    for &(plus, minus) in signs {
        let prev = best;
        let end = |s: usize| prev[s].max(prev[1 - s].map(|c| c + 1)).or(Some(0));
        if plus {
            best[0] = end(0);
        }
        if minus {
            best[1] = end(1);
        }
    }
    best.iter().flatten().copied().max().unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn one_species_verdict_matches_descartes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let limits = Limits { max_species: 1, max_complexes: 4, max_reactions: 6, max_coefficient: 3, ..Limits::default() };
        let net = random_network(&mut rng, &limits);
        let out = run_msa(&net, &PLKinetics::mass_action(&net), &MsaConfig::default()).unwrap();
        let signs = coefficient_signs(&net);
        // two positive roots, or f ≡ 0 when every coefficient can cancel
        let multi = max_sign_changes(&signs) >= 2 || signs.iter().all(|&(p, m)| p && m);
        match out.verdict {
            Verdict::Monostationary => prop_assert!(!multi, "missed multistationarity"),
            Verdict::Multistationary => prop_assert!(multi),
            _ => {}
        }
    }
}
