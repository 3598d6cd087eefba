//! Power-law and poly-PL kinetics.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::linalg::{int, to_f64, RatMatrix, RatVector, Rational};
use crate::network::Network;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KineticsError {
    #[error("kinetics has {found} reactions, network has {expected}")]
    ReactionCount { expected: usize, found: usize },
    #[error("kinetic order vector of reaction {reaction} has {found} entries, expected {expected}")]
    OrderLength {
        reaction: usize,
        expected: usize,
        found: usize,
    },
    #[error("reaction {0} has no rate terms")]
    NoTerms(usize),
    #[error("term coefficient of reaction {0} is not positive")]
    NonPositiveCoefficient(usize),
    #[error("concentration of species {0} is not positive")]
    NonPositiveConcentration(usize),
    #[error("rate vector has {found} entries, expected {expected}")]
    RateCount { expected: usize, found: usize },
    #[error("kinetics is not reactant-determined: reactions {0} and {1} share a reactant with different orders")]
    NotReactantDetermined(usize, usize),
}

/// A rate constant written as `factor · symbol`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RateLabel {
    pub symbol: String,
    pub factor: Rational,
}

impl RateLabel {
    pub fn symbol(symbol: impl Into<String>) -> Self {
        RateLabel {
            symbol: symbol.into(),
            factor: Rational::one(),
        }
    }

    pub fn scaled(symbol: impl Into<String>, factor: Rational) -> Self {
        RateLabel {
            symbol: symbol.into(),
            factor,
        }
    }

    pub fn evaluate(&self, values: &HashMap<String, f64>) -> Option<f64> {
        values.get(&self.symbol).map(|v| v * to_f64(&self.factor))
    }
}

impl std::fmt::Display for RateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.factor.is_one() {
            write!(f, "{}", self.symbol)
        } else {
            write!(f, "{}*{}", self.factor, self.symbol)
        }
    }
}

/// Anything that assigns a rate function to each reaction of a network.
pub trait RateFunction {
    fn num_reactions(&self) -> usize;

    /// Value of reaction `i`'s rate function at `x` with rate constant `k`.
    fn rate(&self, i: usize, x: &[f64], k: f64) -> f64;
}

/// Mono power-law kinetics: `K_i(x) = k_i ∏ x_j^{F_ij}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLKinetics {
    orders: RatMatrix,
    rates: Vec<RateLabel>,
}

impl PLKinetics {
    pub fn new(net: &Network, orders: RatMatrix, rates: Vec<RateLabel>) -> Result<Self, KineticsError> {
        let r = net.num_reactions();
        if orders.rows() != r {
            return Err(KineticsError::ReactionCount {
                expected: r,
                found: orders.rows(),
            });
        }
        if orders.cols() != net.num_species() {
            return Err(KineticsError::OrderLength {
                reaction: 0,
                expected: net.num_species(),
                found: orders.cols(),
            });
        }
        if rates.len() != r {
            return Err(KineticsError::RateCount {
                expected: r,
                found: rates.len(),
            });
        }
        Ok(PLKinetics { orders, rates })
    }

    /// Kinetic orders equal to reactant stoichiometry, symbols `k1..kr`.
    pub fn mass_action(net: &Network) -> Self {
        let m = net.num_species();
        let rows = (0..net.num_reactions())
            .map(|j| net.reactant(j).to_dense(m))
            .collect();
        let rates = (0..net.num_reactions())
            .map(|j| RateLabel::symbol(format!("k{}", j + 1)))
            .collect();
        PLKinetics {
            orders: RatMatrix::from_rows(m, rows),
            rates,
        }
    }

    pub fn orders(&self) -> &RatMatrix {
        &self.orders
    }

    pub fn order_row(&self, i: usize) -> &[Rational] {
        self.orders.row(i)
    }

    pub fn rates(&self) -> &[RateLabel] {
        &self.rates
    }
}

impl RateFunction for PLKinetics {
    fn num_reactions(&self) -> usize {
        self.orders.rows()
    }

    fn rate(&self, i: usize, x: &[f64], k: f64) -> f64 {
        k * monomial(x, self.orders.row(i))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyPLTerm {
    pub coeff: Rational,
    pub orders: RatVector,
}

impl PolyPLTerm {
    pub fn new(coeff: Rational, orders: RatVector) -> Self {
        PolyPLTerm { coeff, orders }
    }
}

/// Poly-PL kinetics: `K_i(x) = k_i Σ_j a_ij x^{F_ij}`. Terms are kept in the
/// order they were written; that order decides replica assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyPLKinetics {
    terms: Vec<Vec<PolyPLTerm>>,
    rates: Vec<RateLabel>,
}

impl PolyPLKinetics {
    pub fn new(
        net: &Network,
        terms: Vec<Vec<PolyPLTerm>>,
        rates: Vec<RateLabel>,
    ) -> Result<Self, KineticsError> {
        let r = net.num_reactions();
        let m = net.num_species();
        if terms.len() != r {
            return Err(KineticsError::ReactionCount {
                expected: r,
                found: terms.len(),
            });
        }
        if rates.len() != r {
            return Err(KineticsError::RateCount {
                expected: r,
                found: rates.len(),
            });
        }
        for (i, ts) in terms.iter().enumerate() {
            if ts.is_empty() {
                return Err(KineticsError::NoTerms(i));
            }
            for t in ts {
                if !t.coeff.is_positive() {
                    return Err(KineticsError::NonPositiveCoefficient(i));
                }
                if t.orders.len() != m {
                    return Err(KineticsError::OrderLength {
                        reaction: i,
                        expected: m,
                        found: t.orders.len(),
                    });
                }
            }
        }
        Ok(PolyPLKinetics { terms, rates })
    }

    /// Single-term view of a power-law system.
    pub fn from_pl(kin: &PLKinetics) -> Self {
        let terms = (0..kin.num_reactions())
            .map(|i| vec![PolyPLTerm::new(Rational::one(), kin.order_row(i).to_vec())])
            .collect();
        PolyPLKinetics {
            terms,
            rates: kin.rates.clone(),
        }
    }

    pub fn terms(&self) -> &[Vec<PolyPLTerm>] {
        &self.terms
    }

    pub fn rates(&self) -> &[RateLabel] {
        &self.rates
    }

    /// Largest number of terms over all reactions.
    pub fn max_terms(&self) -> usize {
        self.terms.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Pads every reaction to `max_terms()` terms by splitting its last term
    /// into equal parts.
    pub fn canonical(&self) -> PolyPLKinetics {
        let h = self.max_terms();
        let terms = self
            .terms
            .iter()
            .map(|ts| {
                let short = ts.len();
                if short == h {
                    return ts.clone();
                }
                let copies = h - short + 1;
                let mut out = ts[..short - 1].to_vec();
                let last = &ts[short - 1];
                let part = &last.coeff / int(copies as i64);
                out.extend((0..copies).map(|_| PolyPLTerm::new(part.clone(), last.orders.clone())));
                out
            })
            .collect();
        PolyPLKinetics {
            terms,
            rates: self.rates.clone(),
        }
    }

    /// Same orders with coefficients replaced; `coeffs[i][j]` for term j of reaction i.
    pub fn with_coefficients(&self, coeffs: &[Vec<Rational>]) -> PolyPLKinetics {
        let terms = self
            .terms
            .iter()
            .zip(coeffs)
            .map(|(ts, cs)| {
                ts.iter()
                    .zip(cs)
                    .map(|(t, c)| PolyPLTerm::new(c.clone(), t.orders.clone()))
                    .collect()
            })
            .collect();
        PolyPLKinetics {
            terms,
            rates: self.rates.clone(),
        }
    }
}

impl RateFunction for PolyPLKinetics {
    fn num_reactions(&self) -> usize {
        self.terms.len()
    }

    fn rate(&self, i: usize, x: &[f64], k: f64) -> f64 {
        k * self.terms[i]
            .iter()
            .map(|t| to_f64(&t.coeff) * monomial(x, &t.orders))
            .sum::<f64>()
    }
}

/// `∏ x_j^{e_j}` evaluated as `exp(Σ e_j ln x_j)`.
pub fn monomial(x: &[f64], exponents: &[Rational]) -> f64 {
    x.iter()
        .zip(exponents)
        .map(|(xi, e)| to_f64(e) * xi.ln())
        .sum::<f64>()
        .exp()
}

/// Species formation rate `N·K(x)`.
pub fn sfrf<K: RateFunction + ?Sized>(
    net: &Network,
    kin: &K,
    x: &[f64],
    rates: &[f64],
) -> Result<Vec<f64>, KineticsError> {
    let r = net.num_reactions();
    if rates.len() != r {
        return Err(KineticsError::RateCount {
            expected: r,
            found: rates.len(),
        });
    }
    if kin.num_reactions() != r {
        return Err(KineticsError::ReactionCount {
            expected: r,
            found: kin.num_reactions(),
        });
    }
    if let Some(s) = x.iter().position(|&v| v.is_nan() || v <= 0.0) {
        return Err(KineticsError::NonPositiveConcentration(s));
    }
    let mut f = vec![0.0; net.num_species()];
    for (j, &rate) in rates.iter().enumerate() {
        let k = kin.rate(j, x, rate);
        for (s, v) in net.reaction_vector(j).iter().enumerate() {
            if !v.is_zero() {
                f[s] += k * to_f64(v);
            }
        }
    }
    Ok(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RdkClass {
    Rdk,
    /// Two reactions with the same reactant but different kinetic orders.
    Ndk(usize, usize),
}

pub fn classify_rdk(net: &Network, kin: &PLKinetics) -> RdkClass {
    let mut first: BTreeMap<usize, usize> = BTreeMap::new();
    for (j, r) in net.reactions().iter().enumerate() {
        match first.get(&r.reactant) {
            Some(&i) if kin.order_row(i) != kin.order_row(j) => return RdkClass::Ndk(i, j),
            Some(_) => {}
            None => {
                first.insert(r.reactant, j);
            }
        }
    }
    RdkClass::Rdk
}

/// Kinetic-order column per reactant complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TMatrix {
    complexes: Vec<usize>,
    columns: Vec<RatVector>,
}

impl TMatrix {
    pub fn complexes(&self) -> &[usize] {
        &self.complexes
    }

    pub fn column(&self, complex: usize) -> Option<&RatVector> {
        self.complexes
            .binary_search(&complex)
            .ok()
            .map(|k| &self.columns[k])
    }

    /// m × n_r matrix form.
    pub fn to_matrix(&self, m: usize) -> RatMatrix {
        RatMatrix::from_columns(m, &self.columns)
    }
}

pub fn t_matrix(net: &Network, kin: &PLKinetics) -> Result<TMatrix, KineticsError> {
    if let RdkClass::Ndk(a, b) = classify_rdk(net, kin) {
        return Err(KineticsError::NotReactantDetermined(a, b));
    }
    let complexes = net.reactant_complexes();
    let columns = complexes
        .iter()
        .map(|&c| {
            let j = net
                .reactions()
                .iter()
                .position(|r| r.reactant == c)
                .expect("reactant complex has a reaction");
            kin.order_row(j).to_vec()
        })
        .collect();
    Ok(TMatrix { complexes, columns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;
    use crate::network::{Complex, ReactionSpec};

    fn cx(pairs: &[(usize, i64)]) -> Complex {
        Complex::from_pairs(pairs.iter().map(|&(s, c)| (s, int(c))))
    }

    fn orders(v: &[i64]) -> RatVector {
        v.iter().map(|&x| int(x)).collect()
    }

    fn illustration() -> (Network, PolyPLKinetics) {
        let net = Network::new(
            vec!["X".into(), "Y".into()],
            vec![
                ReactionSpec::new("r1", cx(&[(0, 1)]), cx(&[(0, 2)])),
                ReactionSpec::new("r2", cx(&[(0, 2), (1, 3)]), cx(&[(0, 1), (1, 2)])),
            ],
        )
        .unwrap();
        let terms = vec![
            vec![
                PolyPLTerm::new(int(1), orders(&[1, 0])),
                PolyPLTerm::new(int(1), orders(&[0, 1])),
                PolyPLTerm::new(int(1), orders(&[1, 1])),
                PolyPLTerm::new(int(1), orders(&[2, 0])),
            ],
            vec![
                PolyPLTerm::new(int(5), orders(&[4, 2])),
                PolyPLTerm::new(int(6), orders(&[1, 3])),
            ],
        ];
        let rates = vec![RateLabel::symbol("k1"), RateLabel::symbol("k2")];
        let kin = PolyPLKinetics::new(&net, terms, rates).unwrap();
        (net, kin)
    }

    #[test]
    fn padding_splits_last_term() {
        let (_, kin) = illustration();
        let canon = kin.canonical();
        let r2 = &canon.terms()[1];
        assert_eq!(r2.len(), 4);
        assert_eq!(r2[0], PolyPLTerm::new(int(5), orders(&[4, 2])));
        for t in &r2[1..] {
            assert_eq!(*t, PolyPLTerm::new(int(2), orders(&[1, 3])));
        }
        assert_eq!(canon.terms()[0], kin.terms()[0]);
    }

    #[test]
    fn uniform_kinetics_unchanged_by_padding() {
        let (_, kin) = illustration();
        let canon = kin.canonical();
        assert_eq!(canon.canonical(), canon);
    }

    #[test]
    fn padding_preserves_rates() {
        let (net, kin) = illustration();
        let canon = kin.canonical();
        let x = [1.7, 0.3];
        let k = [2.0, 0.5];
        let a = sfrf(&net, &kin, &x, &k).unwrap();
        let b = sfrf(&net, &canon, &x, &k).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn rdk_classification() {
        let net = Network::new(
            vec!["X".into(), "Y".into()],
            vec![
                ReactionSpec::new("a", cx(&[(0, 1)]), cx(&[(1, 1)])),
                ReactionSpec::new("b", cx(&[(0, 1)]), cx(&[(0, 2)])),
            ],
        )
        .unwrap();
        let same = PLKinetics::new(
            &net,
            RatMatrix::from_i64_rows(2, &[&[1, 0], &[1, 0]]),
            vec![RateLabel::symbol("k1"), RateLabel::symbol("k2")],
        )
        .unwrap();
        assert_eq!(classify_rdk(&net, &same), RdkClass::Rdk);
        let differ = PLKinetics::new(
            &net,
            RatMatrix::from_i64_rows(2, &[&[1, 0], &[0, 1]]),
            vec![RateLabel::symbol("k1"), RateLabel::symbol("k2")],
        )
        .unwrap();
        assert_eq!(classify_rdk(&net, &differ), RdkClass::Ndk(0, 1));
        assert_eq!(
            t_matrix(&net, &differ),
            Err(KineticsError::NotReactantDetermined(0, 1))
        );
    }

    #[test]
    fn mass_action_t_matrix_is_stoichiometry() {
        let (net, _) = illustration();
        let kin = PLKinetics::mass_action(&net);
        let t = t_matrix(&net, &kin).unwrap();
        for &c in t.complexes() {
            assert_eq!(t.column(c).unwrap(), &net.complexes()[c].to_dense(2));
        }
    }

    #[test]
    fn sfrf_rejects_nonpositive_concentration() {
        let (net, kin) = illustration();
        assert_eq!(
            sfrf(&net, &kin, &[1.0, 0.0], &[1.0, 1.0]),
            Err(KineticsError::NonPositiveConcentration(1))
        );
    }

    #[test]
    fn single_term_poly_matches_mono() {
        let (net, _) = illustration();
        let pl = PLKinetics::new(
            &net,
            RatMatrix::from_rows(2, vec![vec![ratio(1, 2), int(0)], vec![int(2), ratio(-1, 3)]]),
            vec![RateLabel::symbol("k1"), RateLabel::symbol("k2")],
        )
        .unwrap();
        let poly = PolyPLKinetics::from_pl(&pl);
        let x = [0.4, 2.5];
        let k = [1.3, 0.7];
        assert_eq!(sfrf(&net, &pl, &x, &k).unwrap(), sfrf(&net, &poly, &x, &k).unwrap());
    }

    #[test]
    fn coefficients_must_be_positive() {
        let (net, kin) = illustration();
        let mut terms = kin.terms().to_vec();
        terms[0][0].coeff = int(0);
        assert_eq!(
            PolyPLKinetics::new(&net, terms, kin.rates().to_vec()),
            Err(KineticsError::NonPositiveCoefficient(0))
        );
    }
}
