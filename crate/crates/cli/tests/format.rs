use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crn_cli::format::{parse_network, print_network, NetworkFile};
use crn_msa::generate::{random_network, random_poly_pl, Limits};
use crn_msa::linalg::{int, ratio};

fn err(text: &str) -> (usize, usize, String) {
    let e = parse_network(text).unwrap_err();
    (e.line, e.column, e.message)
}

#[test]
fn running_example_file() {
    let f = parse_network(include_str!("../data/running_example.net")).unwrap();
    assert_eq!(f.network.num_species(), 2);
    assert_eq!(f.network.num_complexes(), 2);
    assert_eq!(f.network.num_reactions(), 2);
    assert_eq!(f.kinetics.max_terms(), 4);
    assert_eq!(f.kinetics.terms()[0][3].orders, vec![int(3), int(1)]);
}

#[test]
fn defaults_to_mass_action() {
    let f = parse_network("A + 2 B -> C\nrate kr1 = 0.5\n").unwrap();
    assert_eq!(f.network.species_names(), vec!["A", "B", "C"]);
    assert_eq!(f.kinetics.terms()[0][0].orders, vec![int(1), int(2), int(0)]);
    assert_eq!(f.kinetics.rates()[0].symbol, "kr1");
    assert_eq!(f.rate_values(), vec![0.5]);
}

#[test]
fn exact_numbers() {
    let f = parse_network(
        "species X, Y\nr: 3/2 X + 0.25 Y -> 0\nkinetics r: k * (1/3 X^-1/2 Y^(2/3) + 2)\n",
    )
    .unwrap();
    assert_eq!(f.network.reactant(0).get(0), ratio(3, 2));
    assert_eq!(f.network.reactant(0).get(1), ratio(1, 4));
    assert!(f.network.product(0).is_zero());
    let t = &f.kinetics.terms()[0];
    assert_eq!(t[0].coeff, ratio(1, 3));
    assert_eq!(t[0].orders, vec![ratio(-1, 2), ratio(2, 3)]);
    assert_eq!(t[1].coeff, int(2));
    assert_eq!(t[1].orders, vec![int(0), int(0)]);
}

#[test]
fn power_law_lines() {
    let f = parse_network("species X, Y\nr: X -> Y\nkinetics r: powerlaw k [1/2, -1]\n").unwrap();
    assert_eq!(f.kinetics.terms()[0][0].orders, vec![ratio(1, 2), int(-1)]);
    assert_eq!(err("species X, Y\nr: X -> Y\nkinetics r: powerlaw k [1]\n").0, 3);
}

#[test]
fn positioned_errors() {
    assert_eq!(err(""), (1, 1, "no reactions".into()));
    assert_eq!(err("# only a comment\n").2, "no reactions");
    assert_eq!(err("species X, Y, X\nX -> Y").0, 1);
    assert!(err("species X, Y, X\nX -> Y").2.contains("duplicate species"));
    let (l, c, m) = err("species X\nr: X -> 0\nkinetics r: k * (X Z)\n");
    assert_eq!((l, c), (3, 20));
    assert!(m.contains("unknown species `Z`"));
    let (l, c, m) = err("species X\n  X -> -2 X\n");
    assert_eq!((l, c), (2, 8));
    assert!(m.contains("negative"));
    let (l, _, m) = err("species X\nX ->\n");
    assert_eq!(l, 2);
    assert!(m.contains("empty reaction side"));
    assert!(err("species X\n -> X\n").2.contains("empty reaction side"));
    assert!(err("species X\nX -> Y\n").2.contains("unknown species `Y`"));
    assert!(err("species X\nX -> 0\nrate k = -1\n").2.contains("positive"));
    assert!(err("species X\nr: X -> 0\nkinetics s: k * X\n").2.contains("unknown reaction"));
    assert!(err("X -> 0 junk ->").2.contains("unexpected"));
}

#[test]
fn normalized_text_is_a_fixed_point() {
    let text = include_str!("../data/running_example.net");
    let once = print_network(&parse_network(text).unwrap());
    let twice = print_network(&parse_network(&once).unwrap());
    assert_eq!(once, twice);
}

fn random_file(seed: u64) -> NetworkFile {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let network = random_network(&mut rng, &Limits::default());
    let kinetics = random_poly_pl(&mut rng, &network, 4);
    let mut rates = BTreeMap::new();
    rates.insert("k1".to_string(), 0.5 + seed as f64 / 7.0);
    NetworkFile {
        network,
        kinetics,
        rates,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_after_print_is_identity(seed in any::<u64>()) {
        let f = random_file(seed);
        let text = print_network(&f);
        let g = parse_network(&text).unwrap();
        prop_assert_eq!(&g.network, &f.network);
        prop_assert_eq!(&g.kinetics, &f.kinetics);
        prop_assert_eq!(&g.rates, &f.rates);
        prop_assert_eq!(print_network(&g), text);
    }
}
