//! Multistationarity algorithm for power-law kinetics.
//!
//! The search runs over orientations, sign patterns, shelvings and `M`
//! orderings. A feasible branch gives `μ` and `σ`, from which two distinct
//! positive equilibria and rate constants are built and checked numerically.

mod classes;
mod patterns;
mod system;
mod witness;

use num_traits::Zero;
use thiserror::Error;

pub use classes::*;
pub use patterns::*;
pub use system::*;
pub use witness::*;

use crate::kinetics::{sfrf, KineticsError, PLKinetics, PolyPLKinetics, TMatrix};
use crate::linalg::{
    fourier_motzkin_feasible, to_f64, ConstraintSystem, FmError, RatVector, Rational,
};
use crate::network::Network;
use crate::star::StarMscTransform;

/// Largest number of classes with finite `M` whose orderings are enumerated.
pub const MAX_ORDERED_CLASSES: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MsaConfig {
    /// Maximum number of branch systems handed to Fourier–Motzkin.
    pub budget: usize,
    pub max_orientations: usize,
    /// Restrict the search to one orientation (reaction indices).
    pub orientation: Option<Vec<usize>>,
}

impl Default for MsaConfig {
    fn default() -> Self {
        MsaConfig {
            budget: 100_000,
            max_orientations: 4096,
            orientation: None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MsaError {
    #[error("search budget of {budget} branch solves exhausted")]
    BudgetExhausted { budget: usize },
    #[error(transparent)]
    Kinetics(#[from] KineticsError),
    #[error(transparent)]
    Classes(#[from] ClassError),
    #[error(transparent)]
    Fm(#[from] FmError),
    #[error("{count} classes with finite M need ordering; the limit is {limit}")]
    TooManyOrderedClasses { count: usize, limit: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// A verified pair of distinct positive equilibria was found.
    Multistationary,
    /// Every branch is infeasible.
    Monostationary,
    /// A branch is feasible but no rates could be recovered for it and the
    /// orientation fails the forest test.
    InconclusiveNonlinear,
    /// A branch is feasible but no rates could be recovered for it, or the
    /// search was restricted to a pinned orientation.
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Multistationary => "multistationary",
            Verdict::Monostationary => "monostationary",
            Verdict::InconclusiveNonlinear => "inconclusive (nonlinear)",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Everything the witness was derived from.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub initial_orientation: Orientation,
    pub structure: ClassStructure,
    pub w_basis: Vec<RatVector>,
    pub linearity: Linearity,
    pub kinds: Vec<ClassKind>,
    pub shelving: Shelving,
    /// Classes ordered by the `M` ordering and their levels.
    pub ordered_classes: Vec<usize>,
    pub levels: Vec<usize>,
    pub system: ConstraintSystem,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub provenance: Provenance,
    /// Full FM sample: `μ` followed by the `M` values.
    pub sample: RatVector,
    pub mu: RatVector,
    pub tau: Vec<i8>,
    pub sigma: RatVector,
    pub c_star: Vec<f64>,
    pub c_star2: Vec<f64>,
    pub recovery: RateRecovery,
}

impl Witness {
    pub fn m_values(&self) -> &[Rational] {
        &self.sample[self.mu.len()..]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub orientations: usize,
    /// Orientations failing the class conditions or blocked in realignment.
    pub orientations_rejected: usize,
    pub branch_solves: usize,
    pub feasible_unrealized: usize,
    pub nonlinear_feasible_unrealized: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MsaOutcome {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub stats: SearchStats,
}

struct Prepared {
    initial: Orientation,
    cs: ClassStructure,
    w: Vec<RatVector>,
    linearity: Linearity,
    groups: Vec<ShelfGroups>,
    kinds: Vec<Vec<ClassKind>>,
    w_on_reps: Vec<Vec<Rational>>,
}

fn prepare(net: &Network, o: Orientation) -> Result<Option<Prepared>, MsaError> {
    let cs = class_structure(net, &o)?;
    if !cs.has_capacity() {
        return Ok(None);
    }
    let Realigned::Ready(_, cs) = realign(net, &o, cs)? else {
        return Ok(None);
    };
    if !cs.has_capacity() {
        return Ok(None);
    }
    let w = w_basis(&cs);
    let linearity = forest_basis_check(&w);
    let groups = cs
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| shelf_groups(net, &c.members, &colinkage(net, cs.class_fundamental(i))))
        .collect();
    let kinds = pattern_kinds(&kernel_sign_patterns(&cs)?);
    let reps: Vec<usize> = cs
        .representatives()
        .iter()
        .map(|&j| cs.orientation.position(j).expect("representative in orientation"))
        .collect();
    let w_on_reps = w.iter().map(|b| reps.iter().map(|&p| b[p].clone()).collect()).collect();
    Ok(Some(Prepared {
        initial: o,
        cs,
        w,
        linearity,
        groups,
        kinds,
        w_on_reps,
    }))
}

struct Search<'a> {
    net: &'a Network,
    kin: &'a PLKinetics,
    tm: TMatrix,
    signs: Vec<SpeciesSign>,
    budget: usize,
    stats: SearchStats,
}

impl Search<'_> {
    fn spend(&mut self) -> Result<(), MsaError> {
        if self.stats.branch_solves >= self.budget {
            return Err(MsaError::BudgetExhausted { budget: self.budget });
        }
        self.stats.branch_solves += 1;
        Ok(())
    }

    /// Runs one (orientation, kinds, shelving) branch through every
    /// admissible ordering.
    fn branch(
        &mut self,
        p: &Prepared,
        kinds: &[ClassKind],
        shelving: &Shelving,
    ) -> Result<Option<Witness>, MsaError> {
        let layout = Layout::new(self.net, kinds);
        let base = base_system(self.net, &self.tm, &p.cs, kinds, shelving, &layout)?;
        self.spend()?;
        if !fourier_motzkin_feasible(&base)?.is_sat() {
            return Ok(None);
        }
        let balances: Vec<Balance> = p.w_on_reps.iter().map(|b| Balance::new(b, kinds)).collect();
        let mut ordered: Vec<usize> = balances.iter().flat_map(Balance::finite_classes).collect();
        ordered.sort_unstable();
        ordered.dedup();
        if ordered.len() > MAX_ORDERED_CLASSES {
            return Err(MsaError::TooManyOrderedClasses {
                count: ordered.len(),
                limit: MAX_ORDERED_CLASSES,
            });
        }
        let admissible: Vec<Vec<usize>> = total_preorders(ordered.len())
            .into_iter()
            .filter(|levels| {
                let level_of = |c: usize| levels[ordered.binary_search(&c).expect("ordered class")];
                balances.iter().all(|b| b.admits(&level_of))
            })
            .collect();
        // the species sign vector varies slowest so `+` signs are preferred
        for sign in self.signs.clone() {
            let mut signed = base.clone();
            add_species_signs(&mut signed, &layout, &sign.tau)?;
            self.spend()?;
            if !fourier_motzkin_feasible(&signed)?.is_sat() {
                continue;
            }
            for levels in &admissible {
                let mut sys = base.clone();
                add_ordering(&mut sys, &layout, &ordered, levels)?;
                let mut full = signed.clone();
                add_ordering(&mut full, &layout, &ordered, levels)?;
                if !ordered.is_empty() {
                    self.spend()?;
                }
                let Some(sample) = fourier_motzkin_feasible(&full)?.sample().cloned() else {
                    continue;
                };
                let branch = Branch {
                    kinds,
                    shelving,
                    ordered: &ordered,
                    levels,
                };
                if let Some(w) = self.realize(p, &branch, &sign, sys, sample) {
                    return Ok(Some(w));
                }
            }
        }
        Ok(None)
    }

    fn realize(
        &mut self,
        p: &Prepared,
        b: &Branch<'_>,
        sign: &SpeciesSign,
        sys: ConstraintSystem,
        sample: RatVector,
    ) -> Option<Witness> {
        let m = self.net.num_species();
        let mu: RatVector = sample[..m].to_vec();
        let (c_star, c_star2) = construct_equilibria(&mu, &sign.sigma);
        let Some(recovery) = recover_rates(self.net, self.kin, &self.tm, &mu, &c_star, &c_star2) else {
            self.stats.feasible_unrealized += 1;
            if p.linearity == Linearity::PossiblyNonlinear {
                self.stats.nonlinear_feasible_unrealized += 1;
            }
            return None;
        };
        Some(Witness {
            provenance: Provenance {
                initial_orientation: p.initial.clone(),
                structure: p.cs.clone(),
                w_basis: p.w.clone(),
                linearity: p.linearity,
                kinds: b.kinds.to_vec(),
                shelving: b.shelving.clone(),
                ordered_classes: b.ordered.to_vec(),
                levels: b.levels.to_vec(),
                system: sys,
            },
            sample,
            mu,
            tau: sign.tau.clone(),
            sigma: sign.sigma.clone(),
            c_star,
            c_star2,
            recovery,
        })
    }
}

struct Branch<'a> {
    kinds: &'a [ClassKind],
    shelving: &'a Shelving,
    ordered: &'a [usize],
    levels: &'a [usize],
}

fn all_positive(kinds: &[ClassKind]) -> bool {
    kinds
        .iter()
        .all(|k| *k == ClassKind::Nondegenerate { g: 1, h: 1 })
}

/// Runs the search on a network with reactant-determined power-law kinetics.
pub fn run_msa(net: &Network, kin: &PLKinetics, cfg: &MsaConfig) -> Result<MsaOutcome, MsaError> {
    if cfg.budget == 0 {
        return Err(MsaError::BudgetExhausted { budget: 0 });
    }
    let tm = crate::kinetics::t_matrix(net, kin)?;
    let orientations = match &cfg.orientation {
        Some(o) => vec![Orientation::new(net, o.clone())?],
        None => enumerate_orientations(net, cfg.max_orientations)?,
    };
    let mut search = Search {
        net,
        kin,
        tm,
        signs: stoichiometric_signs(net)?,
        budget: cfg.budget,
        stats: SearchStats::default(),
    };
    let mut prepared: Vec<Prepared> = Vec::new();
    for o in orientations {
        search.stats.orientations += 1;
        match prepare(net, o)? {
            Some(p) if !prepared.iter().any(|q| q.cs.orientation == p.cs.orientation) => {
                prepared.push(p)
            }
            Some(_) => {}
            None => search.stats.orientations_rejected += 1,
        }
    }

    // all-positive, all-middle branches of every orientation come first
    for first_pass in [true, false] {
        for p in &prepared {
            for kinds in &p.kinds {
                let positive = all_positive(kinds);
                if first_pass && !positive {
                    continue;
                }
                let Some(shelvings) = enumerate_shelvings(&p.groups, kinds) else {
                    continue;
                };
                for shelving in shelvings {
                    let middle = is_all_middle(&shelving);
                    if first_pass != (positive && middle) {
                        if first_pass {
                            break;
                        }
                        continue;
                    }
                    if let Some(w) = search.branch(p, kinds, &shelving)? {
                        return Ok(MsaOutcome {
                            verdict: Verdict::Multistationary,
                            witness: Some(w),
                            stats: search.stats,
                        });
                    }
                }
            }
        }
    }

    let stats = search.stats;
    let verdict = if stats.nonlinear_feasible_unrealized > 0 {
        Verdict::InconclusiveNonlinear
    } else if stats.feasible_unrealized > 0 || cfg.orientation.is_some() {
        Verdict::Inconclusive
    } else {
        Verdict::Monostationary
    };
    Ok(MsaOutcome {
        verdict,
        witness: None,
        stats,
    })
}

/// A witness carried back to the original poly-PL system.
#[derive(Clone, Debug, PartialEq)]
pub struct PykReport {
    /// Recovered coefficient of every written term, per original reaction.
    pub coefficients: Vec<Vec<f64>>,
    /// Ratio of each recovered coefficient to the declared one.
    pub scale: Vec<Vec<f64>>,
    /// Per reaction, the common ratio when all terms scale alike.
    pub rate_constants: Vec<Option<f64>>,
    pub residual_star: f64,
    pub residual_star2: f64,
}

impl PykReport {
    pub fn verified(&self) -> bool {
        self.residual_star < RESIDUAL_TOL && self.residual_star2 < RESIDUAL_TOL
    }
}

/// Maps rates of the transformed system back to term coefficients of the
/// original kinetics (summing padded copies) and checks both equilibria
/// against the original species formation rate function.
pub fn pyk_verdict(t: &StarMscTransform, w: &Witness) -> Result<PykReport, KineticsError> {
    let orig = &t.original_kinetics;
    let mut coefficients: Vec<Vec<f64>> = orig.terms().iter().map(|ts| vec![0.0; ts.len()]).collect();
    for (k, &(i, j)) in t.reaction_map.iter().enumerate() {
        let origin = t.term_origin[i][j];
        coefficients[i][origin] += w.recovery.rates[k];
    }
    let as_rational: Vec<Vec<Rational>> = coefficients
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| Rational::from_float(c).unwrap_or_else(Rational::zero))
                .collect()
        })
        .collect();
    let scale: Vec<Vec<f64>> = coefficients
        .iter()
        .zip(orig.terms())
        .map(|(row, ts)| {
            row.iter()
                .zip(ts)
                .map(|(c, term)| c / to_f64(&term.coeff))
                .collect()
        })
        .collect();
    let rate_constants = scale
        .iter()
        .map(|row| {
            let first = row[0];
            row.iter()
                .all(|v| (v - first).abs() <= 1e-9 * first.abs().max(1.0))
                .then_some(first)
        })
        .collect();
    let recovered = PolyPLKinetics::new(
        &t.original,
        orig.terms()
            .iter()
            .zip(&as_rational)
            .map(|(ts, cs)| {
                ts.iter()
                    .zip(cs)
                    .map(|(term, c)| crate::kinetics::PolyPLTerm::new(c.clone(), term.orders.clone()))
                    .collect()
            })
            .collect(),
        orig.rates().to_vec(),
    )?;
    let ones = vec![1.0; t.original.num_reactions()];
    let residual = |c: &[f64]| -> Result<f64, KineticsError> {
        let f = sfrf(&t.original, &recovered, c, &ones)?;
        Ok(f.iter().fold(0.0f64, |a, v| a.max(v.abs())))
    };
    Ok(PykReport {
        residual_star: residual(&w.c_star)?,
        residual_star2: residual(&w.c_star2)?,
        coefficients,
        scale,
        rate_constants,
    })
}
