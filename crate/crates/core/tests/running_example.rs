use crn_msa::kinetics::{PolyPLKinetics, PolyPLTerm, RateLabel};
use crn_msa::linalg::{int, RatVector};
use crn_msa::msa::{pyk_verdict, run_msa, MsaConfig, Verdict};
use crn_msa::network::{Complex, ReactionSpec};
use crn_msa::star::star_msc;
use crn_msa::Network;

fn cx(x: i64, y: i64) -> Complex {
    Complex::from_dense(&[int(x), int(y)])
}

fn orders(x: i64, y: i64) -> RatVector {
    vec![int(x), int(y)]
}

fn running_example() -> (Network, PolyPLKinetics) {
    let net = Network::new(
        vec!["X".into(), "Y".into()],
        vec![
            ReactionSpec::new("r1", cx(5, 1), cx(1, 3)),
            ReactionSpec::new("r2", cx(1, 3), cx(5, 1)),
        ],
    )
    .unwrap();
    let term = |x, y| PolyPLTerm::new(int(1), orders(x, y));
    let kin = PolyPLKinetics::new(
        &net,
        vec![
            vec![term(2, 1), term(1, 2), term(2, 2), term(3, 1)],
            vec![term(1, 0), term(0, 1), term(1, 1), term(2, 0)],
        ],
        vec![RateLabel::symbol("k1"), RateLabel::symbol("k2")],
    )
    .unwrap();
    (net, kin)
}

const RATES: [f64; 8] = [
    0.466582793, 0.859140914, 0.343292434, 0.632120559, 0.294936576, 0.543080635, 0.400860367,
    0.738123111,
];

#[test]
fn pinned_orientation_reproduces_reference_branch() {
    let (net, kin) = running_example();
    let t = star_msc(&net, &kin).unwrap();
    assert_eq!(t.h, 4);
    let o: Vec<usize> = ["R1", "R3", "R6", "R8"]
        .iter()
        .map(|l| t.transformed.reaction_index(l).unwrap())
        .collect();
    let cfg = MsaConfig {
        orientation: Some(o),
        ..MsaConfig::default()
    };
    let out = run_msa(&t.transformed, &t.transformed_kinetics, &cfg).unwrap();
    assert_eq!(out.verdict, Verdict::Multistationary);
    let w = out.witness.unwrap();
    assert_eq!(w.mu, vec![int(1), int(-1)]);
    assert_eq!(w.sigma, vec![int(2), int(-1)]);
    assert_eq!(w.provenance.structure.kernel_dim(), 3);
    assert_eq!(w.provenance.structure.classes.len(), 4);
    assert_eq!(w.provenance.w_basis, vec![vec![int(-1), int(-1), int(1), int(1)]]);
    for (got, want) in w.recovery.rates.iter().zip(RATES) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
    let rep = pyk_verdict(&t, &w).unwrap();
    assert!(rep.verified());
}

#[test]
fn full_search_finds_a_witness() {
    let (net, kin) = running_example();
    let t = star_msc(&net, &kin).unwrap();
    let out = run_msa(&t.transformed, &t.transformed_kinetics, &MsaConfig::default()).unwrap();
    assert_eq!(out.verdict, Verdict::Multistationary);
    let w = out.witness.unwrap();
    assert!(pyk_verdict(&t, &w).unwrap().verified());
    assert_eq!(w.mu, vec![int(1), int(-1)]);
    for (got, want) in w.recovery.rates.iter().zip(RATES) {
        assert!((got - want).abs() < 1e-6);
    }
}
