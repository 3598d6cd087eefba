//! Reaction networks and their structural numbers.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::linalg::{RatMatrix, RatVector, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("network has no reactions")]
    NoReactions,
    #[error("duplicate species `{0}`")]
    DuplicateSpecies(String),
    #[error("species index {index} out of range for {count} species")]
    UnknownSpecies { index: usize, count: usize },
    #[error("negative stoichiometric coefficient for species `{0}`")]
    NegativeCoefficient(String),
    #[error("reaction {0} has identical reactant and product")]
    SelfLoop(String),
    #[error("reaction {0} duplicates an earlier reaction")]
    DuplicateReaction(String),
    #[error("duplicate reaction label `{0}`")]
    DuplicateLabel(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Species {
    pub name: String,
    pub index: usize,
}

/// Sparse nonnegative combination of species. Zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Complex {
    coeffs: BTreeMap<usize, Rational>,
}

impl Complex {
    pub fn zero() -> Self {
        Complex::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(pairs: I) -> Self {
        let mut coeffs = BTreeMap::new();
        for (s, c) in pairs {
            let slot = coeffs.entry(s).or_insert_with(Rational::zero);
            *slot += c;
        }
        coeffs.retain(|_, c: &mut Rational| !c.is_zero());
        Complex { coeffs }
    }

    pub fn from_dense(v: &[Rational]) -> Self {
        Self::from_pairs(v.iter().cloned().enumerate())
    }

    pub fn get(&self, species: usize) -> Rational {
        self.coeffs.get(&species).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coeffs.iter().map(|(&s, c)| (s, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn to_dense(&self, m: usize) -> RatVector {
        let mut v = vec![Rational::zero(); m];
        for (&s, c) in &self.coeffs {
            v[s] = c.clone();
        }
        v
    }

    /// Adds `shift` to the coefficient of every one of the `m` species.
    pub fn translated(&self, shift: &Rational, m: usize) -> Complex {
        let dense: RatVector = self.to_dense(m).into_iter().map(|c| c + shift).collect();
        Complex::from_dense(&dense)
    }

    pub fn max_coefficient(&self) -> Rational {
        self.coeffs
            .values()
            .cloned()
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Formats as `5 X + Y`, or `0` for the zero complex.
    pub fn display(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|(&s, c)| {
                if c.is_one() {
                    names[s].clone()
                } else {
                    format!("{c} {}", names[s])
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Reaction {
    pub label: String,
    pub reactant: usize,
    pub product: usize,
}

/// Description of one reaction before complexes are interned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionSpec {
    pub label: String,
    pub reactant: Complex,
    pub product: Complex,
}

impl ReactionSpec {
    pub fn new(label: impl Into<String>, reactant: Complex, product: Complex) -> Self {
        ReactionSpec {
            label: label.into(),
            reactant,
            product,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    species: Vec<Species>,
    complexes: Vec<Complex>,
    reactions: Vec<Reaction>,
    reverse_of: Vec<Option<usize>>,
}

impl Network {
    /// Builds a network, interning complexes in order of first appearance.
    pub fn new(species: Vec<String>, reactions: Vec<ReactionSpec>) -> Result<Self, NetworkError> {
        if reactions.is_empty() {
            return Err(NetworkError::NoReactions);
        }
        let mut seen = HashSet::new();
        for name in &species {
            if !seen.insert(name.clone()) {
                return Err(NetworkError::DuplicateSpecies(name.clone()));
            }
        }
        let m = species.len();
        let mut complexes: Vec<Complex> = Vec::new();
        let mut index: HashMap<Complex, usize> = HashMap::new();
        let mut intern = |c: Complex| -> Result<usize, NetworkError> {
            for (s, v) in c.iter() {
                if s >= m {
                    return Err(NetworkError::UnknownSpecies { index: s, count: m });
                }
                if v.is_negative() {
                    return Err(NetworkError::NegativeCoefficient(species[s].clone()));
                }
            }
            Ok(*index.entry(c.clone()).or_insert_with(|| {
                complexes.push(c);
                complexes.len() - 1
            }))
        };
        let mut out = Vec::with_capacity(reactions.len());
        let mut pairs = HashSet::new();
        let mut labels = HashSet::new();
        for spec in reactions {
            let reactant = intern(spec.reactant)?;
            let product = intern(spec.product)?;
            if reactant == product {
                return Err(NetworkError::SelfLoop(spec.label));
            }
            if !pairs.insert((reactant, product)) {
                return Err(NetworkError::DuplicateReaction(spec.label));
            }
            if !labels.insert(spec.label.clone()) {
                return Err(NetworkError::DuplicateLabel(spec.label));
            }
            out.push(Reaction {
                label: spec.label,
                reactant,
                product,
            });
        }
        let lookup: HashMap<(usize, usize), usize> = out
            .iter()
            .enumerate()
            .map(|(j, r)| ((r.reactant, r.product), j))
            .collect();
        let reverse_of = out
            .iter()
            .map(|r| lookup.get(&(r.product, r.reactant)).copied())
            .collect();
        Ok(Network {
            species: species
                .into_iter()
                .enumerate()
                .map(|(index, name)| Species { name, index })
                .collect(),
            complexes,
            reactions: out,
            reverse_of,
        })
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn species_names(&self) -> Vec<String> {
        self.species.iter().map(|s| s.name.clone()).collect()
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    pub fn num_complexes(&self) -> usize {
        self.complexes.len()
    }

    pub fn num_reactions(&self) -> usize {
        self.reactions.len()
    }

    pub fn reactant(&self, j: usize) -> &Complex {
        &self.complexes[self.reactions[j].reactant]
    }

    pub fn product(&self, j: usize) -> &Complex {
        &self.complexes[self.reactions[j].product]
    }

    pub fn reverse_of(&self, j: usize) -> Option<usize> {
        self.reverse_of[j]
    }

    pub fn is_reversible(&self, j: usize) -> bool {
        self.reverse_of[j].is_some()
    }

    pub fn reaction_index(&self, label: &str) -> Option<usize> {
        self.reactions.iter().position(|r| r.label == label)
    }

    /// `product − reactant` as a dense species vector.
    pub fn reaction_vector(&self, j: usize) -> RatVector {
        let m = self.num_species();
        self.product(j)
            .to_dense(m)
            .into_iter()
            .zip(self.reactant(j).to_dense(m))
            .map(|(p, r)| p - r)
            .collect()
    }

    pub fn format_reaction(&self, j: usize) -> String {
        let names = self.species_names();
        format!(
            "{} -> {}",
            self.reactant(j).display(&names),
            self.product(j).display(&names)
        )
    }

    /// m × r matrix whose columns are the reaction vectors.
    pub fn stoichiometric_matrix(&self) -> RatMatrix {
        let cols: Vec<RatVector> = (0..self.num_reactions())
            .map(|j| self.reaction_vector(j))
            .collect();
        RatMatrix::from_columns(self.num_species(), &cols)
    }

    /// n × r matrix with −1 at the reactant and +1 at the product of each reaction.
    pub fn incidence_matrix(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.num_complexes(), self.num_reactions());
        for (j, r) in self.reactions.iter().enumerate() {
            m.set(r.reactant, j, -Rational::one());
            m.set(r.product, j, Rational::one());
        }
        m
    }

    /// Distinct reactant complexes, ascending by complex index.
    pub fn reactant_complexes(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.reactions.iter().map(|r| r.reactant).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Connected components of the undirected reaction graph, each sorted,
    /// listed by smallest member.
    pub fn linkage_classes(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::<usize>::new(self.num_complexes());
        for r in &self.reactions {
            uf.union(r.reactant, r.product);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for c in 0..self.num_complexes() {
            groups.entry(uf.find(c)).or_default().push(c);
        }
        sorted_classes(groups.into_values().collect())
    }

    pub fn strong_linkage_classes(&self) -> Vec<Vec<usize>> {
        let g = self.complex_graph();
        let sccs = tarjan_scc(&g)
            .into_iter()
            .map(|scc| scc.into_iter().map(NodeIndex::index).collect())
            .collect();
        sorted_classes(sccs)
    }

    /// Strong linkage classes with no reaction leaving them.
    pub fn terminal_strong_linkage_classes(&self) -> Vec<Vec<usize>> {
        let classes = self.strong_linkage_classes();
        let mut class_of = vec![0; self.num_complexes()];
        for (k, cls) in classes.iter().enumerate() {
            for &c in cls {
                class_of[c] = k;
            }
        }
        let mut leaves = vec![false; classes.len()];
        for r in &self.reactions {
            if class_of[r.reactant] != class_of[r.product] {
                leaves[class_of[r.reactant]] = true;
            }
        }
        classes
            .into_iter()
            .zip(leaves)
            .filter(|(_, l)| !l)
            .map(|(c, _)| c)
            .collect()
    }

    fn complex_graph(&self) -> DiGraph<(), ()> {
        let mut g = DiGraph::with_capacity(self.num_complexes(), self.num_reactions());
        for _ in 0..self.num_complexes() {
            g.add_node(());
        }
        for r in &self.reactions {
            g.add_edge(NodeIndex::new(r.reactant), NodeIndex::new(r.product), ());
        }
        g
    }

    /// Matrix whose columns are the distinct reactant complexes.
    pub fn reactant_matrix(&self) -> RatMatrix {
        let m = self.num_species();
        let cols: Vec<RatVector> = self
            .reactant_complexes()
            .into_iter()
            .map(|c| self.complexes[c].to_dense(m))
            .collect();
        RatMatrix::from_columns(m, &cols)
    }

    pub fn numbers(&self) -> NetworkNumbers {
        NetworkNumbers::of(self)
    }

    /// Subnetwork on the given reactions. Species are restricted to those with
    /// a nonzero coefficient in some retained complex; labels are kept.
    pub fn induced(&self, reactions: &[usize]) -> Network {
        let mut used = vec![false; self.num_species()];
        for &j in reactions {
            for (s, _) in self.reactant(j).iter().chain(self.product(j).iter()) {
                used[s] = true;
            }
        }
        let mut remap = vec![usize::MAX; self.num_species()];
        let mut names = Vec::new();
        for (s, &u) in used.iter().enumerate() {
            if u {
                remap[s] = names.len();
                names.push(self.species[s].name.clone());
            }
        }
        let restrict = |c: &Complex| Complex::from_pairs(c.iter().map(|(s, v)| (remap[s], v.clone())));
        let specs = reactions
            .iter()
            .map(|&j| {
                ReactionSpec::new(
                    self.reactions[j].label.clone(),
                    restrict(self.reactant(j)),
                    restrict(self.product(j)),
                )
            })
            .collect();
        Network::new(names, specs).expect("subnetwork of a valid network is valid")
    }
}

fn sorted_classes(mut classes: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for c in &mut classes {
        c.sort_unstable();
    }
    classes.sort();
    classes
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReactantDiversity {
    /// n_r < s
    Low,
    /// n_r = s
    Medium,
    /// n_r > s
    High,
}

impl ReactantDiversity {
    pub fn is_sufficient(self) -> bool {
        self != ReactantDiversity::Low
    }

    pub fn code(self) -> &'static str {
        match self {
            ReactantDiversity::Low => "LRD",
            ReactantDiversity::Medium => "MRD",
            ReactantDiversity::High => "HRD",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubspaceType {
    Srs,
    Rss,
    Res,
    Other,
}

impl SubspaceType {
    pub fn code(self) -> &'static str {
        match self {
            SubspaceType::Srs => "SRS",
            SubspaceType::Rss => "RSS",
            SubspaceType::Res => "RES",
            SubspaceType::Other => "other",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkNumbers {
    pub species: usize,
    pub complexes: usize,
    pub reactant_complexes: usize,
    pub reactions: usize,
    pub linkage_classes: usize,
    pub strong_linkage_classes: usize,
    pub terminal_classes: usize,
    pub rank: usize,
    pub reactant_rank: usize,
    pub deficiency: i64,
    pub reactant_deficiency: i64,
    pub weakly_reversible: bool,
    pub t_minimal: bool,
    pub point_terminal: bool,
    pub cycle_terminal: bool,
    pub tbd: bool,
    pub reactant_diversity: ReactantDiversity,
    pub subspace_type: SubspaceType,
}

impl NetworkNumbers {
    pub fn of(net: &Network) -> Self {
        let n = net.num_complexes();
        let n_r = net.reactant_complexes().len();
        let l = net.linkage_classes().len();
        let sl = net.strong_linkage_classes().len();
        let t = net.terminal_strong_linkage_classes().len();
        let stoich = net.stoichiometric_matrix();
        let reactant = net.reactant_matrix();
        let s = stoich.rank();
        let q = reactant.rank();
        let joint = reactant.hstack(&stoich).rank();
        let r_in_s = q > 0 && joint == s;
        let s_in_r = joint == q;
        let deficiency = n as i64 - l as i64 - s as i64;
        NetworkNumbers {
            species: net.num_species(),
            complexes: n,
            reactant_complexes: n_r,
            reactions: net.num_reactions(),
            linkage_classes: l,
            strong_linkage_classes: sl,
            terminal_classes: t,
            rank: s,
            reactant_rank: q,
            deficiency,
            reactant_deficiency: n_r as i64 - q as i64,
            weakly_reversible: sl == l,
            t_minimal: t == l,
            point_terminal: t == n - n_r,
            cycle_terminal: n == n_r,
            tbd: t as i64 - l as i64 <= deficiency,
            reactant_diversity: match n_r.cmp(&s) {
                std::cmp::Ordering::Less => ReactantDiversity::Low,
                std::cmp::Ordering::Equal => ReactantDiversity::Medium,
                std::cmp::Ordering::Greater => ReactantDiversity::High,
            },
            subspace_type: match (r_in_s, s_in_r) {
                (true, true) => SubspaceType::Res,
                (true, false) => SubspaceType::Srs,
                (false, true) => SubspaceType::Rss,
                (false, false) => SubspaceType::Other,
            },
        }
    }
}

impl fmt::Display for NetworkNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "species (m): {}", self.species)?;
        writeln!(f, "complexes (n): {}", self.complexes)?;
        writeln!(f, "reactant complexes (n_r): {}", self.reactant_complexes)?;
        writeln!(f, "reactions (r): {}", self.reactions)?;
        writeln!(f, "linkage classes (l): {}", self.linkage_classes)?;
        writeln!(f, "strong linkage classes (sl): {}", self.strong_linkage_classes)?;
        writeln!(f, "terminal strong linkage classes (t): {}", self.terminal_classes)?;
        writeln!(f, "rank (s): {}", self.rank)?;
        writeln!(f, "reactant rank (q): {}", self.reactant_rank)?;
        writeln!(f, "deficiency: {}", self.deficiency)?;
        writeln!(f, "reactant deficiency: {}", self.reactant_deficiency)?;
        writeln!(f, "weakly reversible: {}", yes_no(self.weakly_reversible))?;
        writeln!(f, "t-minimal: {}", yes_no(self.t_minimal))?;
        writeln!(f, "point terminal: {}", yes_no(self.point_terminal))?;
        writeln!(f, "cycle terminal: {}", yes_no(self.cycle_terminal))?;
        writeln!(f, "terminality: {}", if self.tbd { "TBD" } else { "TND" })?;
        writeln!(
            f,
            "reactant diversity: {} ({})",
            if self.reactant_diversity.is_sufficient() { "SRD" } else { "LRD" },
            self.reactant_diversity.code()
        )?;
        write!(f, "subspace type: {}", self.subspace_type.code())
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}
