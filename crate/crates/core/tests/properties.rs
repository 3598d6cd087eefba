use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crn_msa::decomposition::{is_c_decomposition, is_incidence_independent, is_independent, Decomposition};
use crn_msa::generate::{random_c_partition, random_network, random_partition, random_poly_pl, Limits};
use crn_msa::kinetics::sfrf;
use crn_msa::linalg::nullspace;
use crn_msa::star::{star_msc, verify_dynamic_equivalence, verify_network_numbers};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn replica_identities_hold(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, &Limits::default());
        let kin = random_poly_pl(&mut rng, &net, 4);
        let t = star_msc(&net, &kin).unwrap();
        let report = verify_network_numbers(&t);
        for c in &report.checks {
            prop_assert!(c.passed(), "{}: expected {} got {}", c.name, c.expected, c.actual);
        }
    }

    #[test]
    fn replicas_reproduce_the_rate_function(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, &Limits::default());
        let kin = random_poly_pl(&mut rng, &net, 4);
        let t = star_msc(&net, &kin).unwrap();
        let rates: Vec<f64> = (0..net.num_reactions()).map(|j| 0.5 + j as f64).collect();
        prop_assert!(verify_dynamic_equivalence(&t, 10, &rates, seed).unwrap() < 1e-9);
    }

    #[test]
    fn padding_keeps_the_rate_function(seed in any::<u64>(), x in prop::collection::vec(0.01f64..50.0, 5)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, &Limits::default());
        let kin = random_poly_pl(&mut rng, &net, 4);
        let x = &x[..net.num_species()];
        let rates = vec![1.3; net.num_reactions()];
        let a = sfrf(&net, &kin, x, &rates).unwrap();
        let b = sfrf(&net, &kin.canonical(), x, &rates).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn deficiency_recomputed_independently(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, &Limits::default());
        let nn = net.numbers();
        // s = r - dim Ker N, and ℓ from the incidence matrix rank n - ℓ
        let s = net.num_reactions() - nullspace(&net.stoichiometric_matrix()).len();
        let inc_rank = net.num_reactions() - nullspace(&net.incidence_matrix()).len();
        let l = net.num_complexes() - inc_rank;
        prop_assert_eq!(nn.rank, s);
        prop_assert_eq!(nn.linkage_classes, l);
        prop_assert_eq!(nn.deficiency, net.num_complexes() as i64 - l as i64 - s as i64);
    }

    #[test]
    fn decomposition_inequalities(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let net = random_network(&mut rng, &Limits::default());
        let delta = net.numbers().deficiency;
        let c_parts = random_c_partition(&mut rng, &net);
        let d = Decomposition::new(&net, c_parts).unwrap();
        prop_assert!(is_c_decomposition(&d));
        prop_assert!(is_incidence_independent(&d));
        let parts = random_partition(&mut rng, net.num_reactions());
        let d = Decomposition::new(&net, parts).unwrap();
        let sum: i64 = d.part_deficiencies().iter().sum();
        if is_independent(&d) {
            prop_assert!(delta <= sum);
        }
        if is_incidence_independent(&d) {
            prop_assert!(delta >= sum);
        }
        if is_c_decomposition(&d) {
            prop_assert!(is_incidence_independent(&d));
        }
    }
}
