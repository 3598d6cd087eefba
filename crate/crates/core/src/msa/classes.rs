//! Orientations, equivalence and fundamental classes, colinkage sets, the
//! `Ker⊥ L_O ∩ Γ_W` basis and the forest test.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::linalg::{nullspace, orthogonal_complement_intersect_support, RatMatrix, RatVector, Rational};
use crate::network::Network;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassError {
    #[error("{count} reversible pairs give more than {cap} orientations")]
    TooManyOrientations { count: usize, cap: usize },
    #[error("reaction index {0} out of range")]
    UnknownReaction(usize),
    #[error("not an orientation: {0}")]
    InvalidOrientation(String),
}

/// One direction per reversible pair plus every irreversible reaction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orientation {
    chosen: Vec<usize>,
}

impl Orientation {
    pub fn new(net: &Network, mut chosen: Vec<usize>) -> Result<Self, ClassError> {
        chosen.sort_unstable();
        chosen.dedup();
        let r = net.num_reactions();
        if let Some(&j) = chosen.iter().find(|&&j| j >= r) {
            return Err(ClassError::UnknownReaction(j));
        }
        let set: BTreeSet<usize> = chosen.iter().copied().collect();
        for j in 0..r {
            let rev = net.reverse_of(j);
            let ok = match rev {
                None => set.contains(&j),
                Some(k) => set.contains(&j) != set.contains(&k),
            };
            if !ok {
                let label = &net.reactions()[j].label;
                return Err(ClassError::InvalidOrientation(match rev {
                    None => format!("irreversible reaction {label} missing"),
                    Some(_) => format!("reversible reaction {label} needs exactly one direction"),
                }));
            }
        }
        Ok(Orientation { chosen })
    }

    pub fn reactions(&self) -> &[usize] {
        &self.chosen
    }

    pub fn contains(&self, j: usize) -> bool {
        self.chosen.binary_search(&j).is_ok()
    }

    pub fn position(&self, j: usize) -> Option<usize> {
        self.chosen.binary_search(&j).ok()
    }

    pub fn labels(&self, net: &Network) -> Vec<String> {
        self.chosen
            .iter()
            .map(|&j| net.reactions()[j].label.clone())
            .collect()
    }

    fn flipped(&self, net: &Network, flips: &[usize]) -> Orientation {
        let mut chosen: Vec<usize> = self
            .chosen
            .iter()
            .map(|&j| {
                if flips.contains(&j) {
                    net.reverse_of(j).expect("only reversible reactions are flipped")
                } else {
                    j
                }
            })
            .collect();
        chosen.sort_unstable();
        Orientation { chosen }
    }
}

/// Reversible pairs as (smaller index, larger index), ascending.
pub fn reversible_pairs(net: &Network) -> Vec<(usize, usize)> {
    (0..net.num_reactions())
        .filter_map(|j| net.reverse_of(j).filter(|&k| k > j).map(|k| (j, k)))
        .collect()
}

/// All orientations, by binary counting over the reversible pairs: bit `p`
/// set selects the later-listed direction of pair `p` (bit 0 is the first pair).
pub fn enumerate_orientations(net: &Network, cap: usize) -> Result<Vec<Orientation>, ClassError> {
    let pairs = reversible_pairs(net);
    let too_many = || ClassError::TooManyOrientations {
        count: pairs.len(),
        cap,
    };
    if pairs.len() >= usize::BITS as usize - 1 {
        return Err(too_many());
    }
    let total = 1usize << pairs.len();
    if total > cap {
        return Err(too_many());
    }
    let fixed: Vec<usize> = (0..net.num_reactions())
        .filter(|&j| !net.is_reversible(j))
        .collect();
    Ok((0..total)
        .map(|mask| {
            let mut chosen = fixed.clone();
            for (p, &(a, b)) in pairs.iter().enumerate() {
                chosen.push(if mask >> p & 1 == 1 { b } else { a });
            }
            chosen.sort_unstable();
            Orientation { chosen }
        })
        .collect())
}

/// One equivalence class `P_i` of the orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClass {
    /// Members in orientation order.
    pub members: Vec<usize>,
    pub representative: usize,
    /// `v_rep = alpha · v_member` for each member, in `members` order.
    pub alphas: Vec<Rational>,
    /// Contains an irreversible reaction.
    pub nonreversible: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassStructure {
    pub orientation: Orientation,
    /// Basis of `Ker L_O`, coordinates in orientation order.
    pub kernel_basis: Vec<RatVector>,
    pub p0: Vec<usize>,
    pub classes: Vec<EquivalenceClass>,
    /// `C_0` (from `P0`) followed by `C_1..C_w`; each sorted.
    pub fundamental: Vec<Vec<usize>>,
    /// Reactions of `P0` that are irreversible.
    pub irreversible_in_p0: Vec<usize>,
    /// Irreversible members whose proportionality constant against an
    /// irreversible representative is negative.
    pub irreversible_sign_conflicts: Vec<usize>,
}

impl ClassStructure {
    /// Necessary conditions for the capacity to admit multiple equilibria.
    pub fn has_capacity(&self) -> bool {
        self.irreversible_in_p0.is_empty() && self.irreversible_sign_conflicts.is_empty()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_basis.len()
    }

    pub fn representatives(&self) -> Vec<usize> {
        self.classes.iter().map(|c| c.representative).collect()
    }

    /// Kernel basis row of reaction `j` (which must be in the orientation).
    pub fn kernel_row(&self, j: usize) -> RatVector {
        let pos = self.orientation.position(j).expect("reaction in orientation");
        self.kernel_basis.iter().map(|v| v[pos].clone()).collect()
    }

    /// C_1..C_w, the fundamental classes attached to equivalence classes.
    pub fn class_fundamental(&self, i: usize) -> &[usize] {
        let offset = usize::from(!self.fundamental_zero().is_empty());
        &self.fundamental[i + offset]
    }

    pub fn fundamental_zero(&self) -> &[usize] {
        if self.p0.is_empty() {
            &[]
        } else {
            &self.fundamental[0]
        }
    }

    /// Nonempty fundamental classes, for use as a decomposition.
    pub fn fundamental_parts(&self) -> Vec<Vec<usize>> {
        self.fundamental.iter().filter(|c| !c.is_empty()).cloned().collect()
    }
}

/// Classes, fundamental classes and representatives of an orientation.
pub fn class_structure(net: &Network, o: &Orientation) -> Result<ClassStructure, ClassError> {
    if o.reactions().iter().any(|&j| j >= net.num_reactions()) {
        return Err(ClassError::InvalidOrientation("reaction out of range".into()));
    }
    let m = net.num_species();
    let cols: Vec<RatVector> = o.reactions().iter().map(|&j| net.reaction_vector(j)).collect();
    let l_o = RatMatrix::from_columns(m, &cols);
    let kernel_basis = nullspace(&l_o);
    let row = |pos: usize| -> RatVector { kernel_basis.iter().map(|v| v[pos].clone()).collect() };

    let mut p0 = Vec::new();
    // (row of the first member, members, rows)
    let mut groups: Vec<(RatVector, Vec<usize>)> = Vec::new();
    for (pos, &j) in o.reactions().iter().enumerate() {
        let v = row(pos);
        if v.iter().all(Zero::is_zero) {
            p0.push(j);
            continue;
        }
        match groups.iter_mut().find(|(lead, _)| proportionality(lead, &v).is_some()) {
            Some((_, members)) => members.push(j),
            None => groups.push((v, vec![j])),
        }
    }

    let mut classes = Vec::with_capacity(groups.len());
    let mut conflicts = Vec::new();
    for (_, members) in groups {
        let nonreversible = members.iter().any(|&j| !net.is_reversible(j));
        let representative = if nonreversible {
            *members.iter().find(|&&j| !net.is_reversible(j)).expect("irreversible member")
        } else {
            members[0]
        };
        let rep_row = row(o.position(representative).expect("member of orientation"));
        let alphas: Vec<Rational> = members
            .iter()
            .map(|&j| {
                let v = row(o.position(j).expect("member of orientation"));
                proportionality(&v, &rep_row).expect("members are proportional")
            })
            .collect();
        for (&j, a) in members.iter().zip(&alphas) {
            if !net.is_reversible(j) && a.is_negative() {
                conflicts.push(j);
            }
        }
        classes.push(EquivalenceClass {
            members,
            representative,
            alphas,
            nonreversible,
        });
    }

    let with_reverses = |set: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = set
            .iter()
            .flat_map(|&j| std::iter::once(j).chain(net.reverse_of(j)))
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut fundamental = Vec::with_capacity(classes.len() + 1);
    if !p0.is_empty() {
        fundamental.push(with_reverses(&p0));
    }
    for c in &classes {
        fundamental.push(with_reverses(&c.members));
    }
    let irreversible_in_p0 = p0.iter().copied().filter(|&j| !net.is_reversible(j)).collect();
    Ok(ClassStructure {
        orientation: o.clone(),
        kernel_basis,
        p0,
        classes,
        fundamental,
        irreversible_in_p0,
        irreversible_sign_conflicts: conflicts,
    })
}

/// `alpha` with `target = alpha · v`, if the two nonzero rows are proportional.
fn proportionality(target: &[Rational], v: &[Rational]) -> Option<Rational> {
    let k = v.iter().position(|x| !x.is_zero())?;
    let alpha = &target[k] / &v[k];
    if alpha.is_zero() {
        return None;
    }
    target
        .iter()
        .zip(v)
        .all(|(t, x)| *t == &alpha * x)
        .then_some(alpha)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Realigned {
    Ready(Orientation, ClassStructure),
    /// An irreversible reaction has a negative proportionality constant.
    Blocked(Vec<usize>),
}

/// Flips reversible members whose proportionality constant is
/// negative, recomputing the structure until every constant is positive.
pub fn realign(net: &Network, o: &Orientation, cs: ClassStructure) -> Result<Realigned, ClassError> {
    let mut o = o.clone();
    let mut cs = cs;
    for _ in 0..=net.num_reactions() {
        let mut flips = Vec::new();
        let mut blockers = Vec::new();
        for c in &cs.classes {
            for (&j, a) in c.members.iter().zip(&c.alphas) {
                if a.is_negative() {
                    if net.is_reversible(j) {
                        flips.push(j);
                    } else {
                        blockers.push(j);
                    }
                }
            }
        }
        if !blockers.is_empty() {
            return Ok(Realigned::Blocked(blockers));
        }
        if flips.is_empty() {
            return Ok(Realigned::Ready(o, cs));
        }
        o = o.flipped(net, &flips);
        cs = class_structure(net, &o)?;
    }
    unreachable!("a flip makes the constant positive, so realignment terminates")
}

/// Subnetwork of one fundamental class with its colinkage marking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Colinkage {
    /// Reactions of the class (indices into the parent network).
    pub reactions: Vec<usize>,
    /// Whether each reaction's reactant lies in a terminal strong linkage
    /// class of the class subnetwork, in `reactions` order.
    pub reactant_terminal: Vec<bool>,
    /// Terminal strong linkage class id of each reaction's reactant, if terminal.
    pub terminal_class: Vec<Option<usize>>,
    /// The subnetwork's undirected graph has a cycle through ≥ 3 complexes.
    pub big_cycle: bool,
}

/// Colinkage marking of one fundamental class.
pub fn colinkage(net: &Network, class: &[usize]) -> Colinkage {
    let mut complexes: Vec<usize> = class
        .iter()
        .flat_map(|&j| [net.reactions()[j].reactant, net.reactions()[j].product])
        .collect();
    complexes.sort_unstable();
    complexes.dedup();
    let local = |c: usize| complexes.binary_search(&c).expect("complex of class");
    let sub = net.induced(class);
    // induced() interns complexes in first-appearance order; map through reactions
    let mut sub_of_local = vec![usize::MAX; complexes.len()];
    for (k, &j) in class.iter().enumerate() {
        let r = &net.reactions()[j];
        let s = &sub.reactions()[k];
        sub_of_local[local(r.reactant)] = s.reactant;
        sub_of_local[local(r.product)] = s.product;
    }
    let terminal = sub.terminal_strong_linkage_classes();
    let mut term_id = vec![None; sub.num_complexes()];
    for (t, cls) in terminal.iter().enumerate() {
        for &c in cls {
            term_id[c] = Some(t);
        }
    }
    let terminal_class: Vec<Option<usize>> = class
        .iter()
        .map(|&j| term_id[sub_of_local[local(net.reactions()[j].reactant)]])
        .collect();

    let edges: BTreeSet<(usize, usize)> = class
        .iter()
        .map(|&j| {
            let r = &net.reactions()[j];
            (r.reactant.min(r.product), r.reactant.max(r.product))
        })
        .collect();
    let mut uf = UnionFind::<usize>::new(complexes.len());
    let mut big_cycle = false;
    for &(a, b) in &edges {
        if !uf.union(local(a), local(b)) {
            big_cycle = true;
        }
    }
    Colinkage {
        reactions: class.to_vec(),
        reactant_terminal: terminal_class.iter().map(Option::is_some).collect(),
        terminal_class,
        big_cycle,
    }
}

/// Basis of `Ker⊥ L_O ∩ Γ_W` with `W` the representatives, in
/// orientation coordinates.
pub fn w_basis(cs: &ClassStructure) -> Vec<RatVector> {
    let support: Vec<usize> = cs
        .representatives()
        .iter()
        .map(|&j| cs.orientation.position(j).expect("representative in orientation"))
        .collect();
    if support.is_empty() {
        return Vec::new();
    }
    orthogonal_complement_intersect_support(
        &cs.kernel_basis,
        &support,
        cs.orientation.reactions().len(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Linearity {
    Linear,
    PossiblyNonlinear,
}

/// The bipartite incidence graph between basis vectors and the
/// positions they touch must be a forest.
pub fn forest_basis_check(basis: &[RatVector]) -> Linearity {
    let Some(dim) = basis.first().map(Vec::len) else {
        return Linearity::Linear;
    };
    let mut uf = UnionFind::<usize>::new(basis.len() + dim);
    for (b, v) in basis.iter().enumerate() {
        for (k, x) in v.iter().enumerate() {
            if !x.is_zero() && !uf.union(b, basis.len() + k) {
                return Linearity::PossiblyNonlinear;
            }
        }
    }
    Linearity::Linear
}
