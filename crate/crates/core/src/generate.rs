//! Seeded random networks and kinetics for property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::kinetics::{PolyPLKinetics, PolyPLTerm, RateLabel};
use crate::linalg::{ratio, Rational};
use crate::network::{Complex, Network, ReactionSpec};

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_species: usize,
    pub max_complexes: usize,
    pub max_reactions: usize,
    pub max_terms: usize,
    pub max_coefficient: i64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_species: 5,
            max_complexes: 6,
            max_reactions: 8,
            max_terms: 4,
            max_coefficient: 3,
        }
    }
}

/// Random network within `limits`; every complex takes part in a reaction.
pub fn random_network<R: Rng>(rng: &mut R, limits: &Limits) -> Network {
    loop {
        let m = rng.gen_range(1..=limits.max_species);
        let n = rng.gen_range(2..=limits.max_complexes);
        let mut complexes: Vec<Complex> = Vec::with_capacity(n);
        let mut guard = 0;
        while complexes.len() < n && guard < 100 {
            guard += 1;
            let c = Complex::from_pairs((0..m).map(|s| {
                let v = if rng.gen_bool(0.4) {
                    0
                } else {
                    rng.gen_range(0..=limits.max_coefficient)
                };
                (s, ratio(v, 1))
            }));
            if !complexes.contains(&c) {
                complexes.push(c);
            }
        }
        let n = complexes.len();
        if n < 2 {
            continue;
        }
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (0..n).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        pairs.shuffle(rng);
        let r = rng.gen_range(1..=limits.max_reactions.min(pairs.len()));
        pairs.truncate(r);
        let names = (0..m).map(|s| format!("X{}", s + 1)).collect();
        let specs = pairs
            .iter()
            .enumerate()
            .map(|(j, &(a, b))| {
                ReactionSpec::new(format!("R{}", j + 1), complexes[a].clone(), complexes[b].clone())
            })
            .collect();
        if let Ok(net) = Network::new(names, specs) {
            return net;
        }
    }
}

fn random_rational<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Rational {
    let d = rng.gen_range(1..=3);
    ratio(rng.gen_range(lo * d..=hi * d), d)
}

/// Random poly-PL kinetics with up to `max_terms` terms per reaction.
pub fn random_poly_pl<R: Rng>(rng: &mut R, net: &Network, max_terms: usize) -> PolyPLKinetics {
    let m = net.num_species();
    let terms = (0..net.num_reactions())
        .map(|_| {
            let t = rng.gen_range(1..=max_terms);
            (0..t)
                .map(|_| {
                    let mut coeff = random_rational(rng, 0, 4);
                    if coeff <= ratio(0, 1) {
                        coeff = ratio(1, 2);
                    }
                    PolyPLTerm::new(coeff, (0..m).map(|_| random_rational(rng, -2, 3)).collect())
                })
                .collect()
        })
        .collect();
    let rates = (1..=net.num_reactions())
        .map(|j| RateLabel::symbol(format!("k{j}")))
        .collect();
    PolyPLKinetics::new(net, terms, rates).expect("generated kinetics is valid")
}

/// Random partition of the reaction set into nonempty parts.
pub fn random_partition<R: Rng>(rng: &mut R, r: usize) -> Vec<Vec<usize>> {
    let k = rng.gen_range(1..=r);
    let mut parts = vec![Vec::new(); k];
    let mut order: Vec<usize> = (0..r).collect();
    order.shuffle(rng);
    for (idx, &j) in order.iter().enumerate() {
        let p = if idx < k { idx } else { rng.gen_range(0..k) };
        parts[p].push(j);
    }
    for p in &mut parts {
        p.sort_unstable();
    }
    parts
}

/// Random grouping of whole linkage classes, a partition whose parts share
/// no complex.
pub fn random_c_partition<R: Rng>(rng: &mut R, net: &Network) -> Vec<Vec<usize>> {
    let classes = net.linkage_classes();
    let mut class_of = vec![0; net.num_complexes()];
    for (l, cls) in classes.iter().enumerate() {
        for &c in cls {
            class_of[c] = l;
        }
    }
    let groups = random_partition(rng, classes.len());
    let mut group_of = vec![0; classes.len()];
    for (g, ls) in groups.iter().enumerate() {
        for &l in ls {
            group_of[l] = g;
        }
    }
    let mut parts = vec![Vec::new(); groups.len()];
    for (j, r) in net.reactions().iter().enumerate() {
        parts[group_of[class_of[r.reactant]]].push(j);
    }
    parts.retain(|p| !p.is_empty());
    parts
}
