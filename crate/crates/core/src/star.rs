//! STAR-MSC: replica construction turning poly-PL kinetics into power-law
//! kinetics with the same species formation rate function.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kinetics::{classify_rdk, sfrf, KineticsError, PLKinetics, PolyPLKinetics, RateLabel, RdkClass};
use crate::linalg::{in_column_space, int, RatMatrix, Rational};
use crate::network::{Complex, Network, NetworkError, NetworkNumbers, ReactionSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StarError {
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error("kinetics is already reactant-determined")]
    AlreadyRdk,
}

#[derive(Clone, Debug)]
pub struct StarMscTransform {
    pub original: Network,
    pub original_kinetics: PolyPLKinetics,
    /// Original kinetics padded to `h` terms per reaction.
    pub canonical_kinetics: PolyPLKinetics,
    pub transformed: Network,
    pub transformed_kinetics: PLKinetics,
    pub h: usize,
    /// Translation unit: 1 + ceiling of the largest stoichiometric coefficient.
    pub m_shift: Rational,
    /// Transformed reaction → (original reaction, padded term index).
    pub reaction_map: Vec<(usize, usize)>,
    /// Transformed reaction → replica, 1-based.
    pub replica_map: Vec<usize>,
    /// `term_origin[i][j]`: written term of reaction i that padded term j came from.
    pub term_origin: Vec<Vec<usize>>,
    /// True when `h = 1` and the network was passed through unchanged.
    pub identity: bool,
}

pub fn max_shift(net: &Network) -> Rational {
    let max = net
        .complexes()
        .iter()
        .map(Complex::max_coefficient)
        .max()
        .unwrap_or_else(Rational::zero);
    max.ceil() + Rational::one()
}

pub fn star_msc(net: &Network, kin: &PolyPLKinetics) -> Result<StarMscTransform, StarError> {
    let canonical = kin.canonical();
    let h = canonical.max_terms();
    let r = net.num_reactions();
    let m = net.num_species();
    let m_shift = max_shift(net);
    let term_origin: Vec<Vec<usize>> = kin
        .terms()
        .iter()
        .map(|ts| (0..h).map(|j| j.min(ts.len() - 1)).collect())
        .collect();

    let mut specs = Vec::with_capacity(h * r);
    let mut orders = Vec::with_capacity(h * r);
    let mut rates = Vec::with_capacity(h * r);
    let mut reaction_map = Vec::with_capacity(h * r);
    let mut replica_map = Vec::with_capacity(h * r);
    for j in 0..h {
        let shift = &m_shift * int(j as i64);
        for i in 0..r {
            let label = if h == 1 {
                net.reactions()[i].label.clone()
            } else {
                format!("R{}", j * r + i + 1)
            };
            specs.push(ReactionSpec::new(
                label,
                net.reactant(i).translated(&shift, m),
                net.product(i).translated(&shift, m),
            ));
            let term = &canonical.terms()[i][j];
            orders.push(term.orders.clone());
            let base = &canonical.rates()[i];
            rates.push(RateLabel::scaled(base.symbol.clone(), &base.factor * &term.coeff));
            reaction_map.push((i, j));
            replica_map.push(j + 1);
        }
    }
    let transformed = Network::new(net.species_names(), specs)?;
    let transformed_kinetics = PLKinetics::new(&transformed, RatMatrix::from_rows(m, orders), rates)?;
    Ok(StarMscTransform {
        original: net.clone(),
        original_kinetics: kin.clone(),
        canonical_kinetics: canonical,
        transformed,
        transformed_kinetics,
        h,
        m_shift,
        reaction_map,
        replica_map,
        term_origin,
        identity: h == 1,
    })
}

impl StarMscTransform {
    /// Transformed reactions grouped by replica.
    pub fn replica_parts(&self) -> Vec<Vec<usize>> {
        let mut parts = vec![Vec::new(); self.h];
        for (k, &rep) in self.replica_map.iter().enumerate() {
            parts[rep - 1].push(k);
        }
        parts
    }

    /// Numeric rate constants of the transformed system given the original
    /// per-reaction constants.
    pub fn transformed_rates(&self, original_rates: &[f64]) -> Vec<f64> {
        self.reaction_map
            .iter()
            .map(|&(i, j)| {
                original_rates[i]
                    * crate::linalg::to_f64(&self.canonical_kinetics.terms()[i][j].coeff)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub expected: i64,
    pub actual: i64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumbersReport {
    pub ones_in_reactant_space: bool,
    pub checks: Vec<IdentityCheck>,
}

impl NumbersReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }
}

/// Recomputes the transformed network numbers and compares them with the
/// values predicted from the original network and `h`.
pub fn verify_network_numbers(t: &StarMscTransform) -> NumbersReport {
    let a = NetworkNumbers::of(&t.original);
    let b = NetworkNumbers::of(&t.transformed);
    let h = t.h as i64;
    let ones = vec![Rational::one(); t.original.num_species()];
    let ones_in_r = in_column_space(&t.original.reactant_matrix(), &ones);
    let q = a.reactant_rank as i64;
    let q_star = if t.h == 1 || ones_in_r { q } else { q + 1 };
    let n = a.complexes as i64;
    let l = a.linkage_classes as i64;
    let check = |name, expected, actual: usize| IdentityCheck {
        name,
        expected,
        actual: actual as i64,
    };
    let checks = vec![
        check("m*", a.species as i64, b.species),
        check("n*", h * n, b.complexes),
        check("n_r*", h * a.reactant_complexes as i64, b.reactant_complexes),
        check("r*", h * a.reactions as i64, b.reactions),
        check("l*", h * l, b.linkage_classes),
        check("sl*", h * a.strong_linkage_classes as i64, b.strong_linkage_classes),
        check("t*", h * a.terminal_classes as i64, b.terminal_classes),
        check("s*", a.rank as i64, b.rank),
        check("q*", q_star, b.reactant_rank),
        IdentityCheck {
            name: "delta*",
            expected: a.deficiency + (h - 1) * (n - l),
            actual: b.deficiency,
        },
        IdentityCheck {
            name: "delta_rho*",
            expected: h * a.reactant_complexes as i64 - q_star,
            actual: b.reactant_deficiency,
        },
    ];
    NumbersReport {
        ones_in_reactant_space: ones_in_r,
        checks,
    }
}

/// Max over `trials` log-uniform points in `[1e-2, 1e2]^m` of
/// `‖f*(x) − f(x)‖∞ / (1 + ‖f(x)‖∞)`.
pub fn verify_dynamic_equivalence(
    t: &StarMscTransform,
    trials: usize,
    rates: &[f64],
    seed: u64,
) -> Result<f64, KineticsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let star_rates = t.transformed_rates(rates);
    let m = t.original.num_species();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let x: Vec<f64> = (0..m).map(|_| 10f64.powf(rng.gen_range(-2.0..2.0))).collect();
        let f = sfrf(&t.original, &t.original_kinetics, &x, rates)?;
        let g = sfrf(&t.transformed, &t.transformed_kinetics, &x, &star_rates)?;
        let scale = 1.0 + f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let diff = f.iter().zip(&g).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}

/// Makes power-law kinetics reactant-determined by translating, for every
/// reactant complex carrying several distinct kinetic-order rows, all but the
/// first row's reactions by a fresh multiple of `M·(1,…,1)`.
pub fn cf_translate(net: &Network, kin: &PLKinetics) -> Result<(Network, PLKinetics), StarError> {
    if classify_rdk(net, kin) == RdkClass::Rdk {
        return Err(StarError::AlreadyRdk);
    }
    let m = net.num_species();
    let unit = max_shift(net);
    let mut next = 1i64;
    // (reactant complex, order row) → translation multiple
    let mut multiple: HashMap<(usize, Vec<Rational>), i64> = HashMap::new();
    let mut first_row: HashMap<usize, Vec<Rational>> = HashMap::new();
    let mut specs = Vec::with_capacity(net.num_reactions());
    for (j, r) in net.reactions().iter().enumerate() {
        let row = kin.order_row(j).to_vec();
        let first = first_row.entry(r.reactant).or_insert_with(|| row.clone());
        let k = if *first == row {
            0
        } else {
            *multiple.entry((r.reactant, row)).or_insert_with(|| {
                next += 1;
                next - 1
            })
        };
        let shift = &unit * int(k);
        specs.push(ReactionSpec::new(
            r.label.clone(),
            net.reactant(j).translated(&shift, m),
            net.product(j).translated(&shift, m),
        ));
    }
    let out = Network::new(net.species_names(), specs)?;
    let out_kin = PLKinetics::new(&out, kin.orders().clone(), kin.rates().to_vec())?;
    Ok((out, out_kin))
}
