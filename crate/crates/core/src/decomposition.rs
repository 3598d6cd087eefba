//! Reaction-set partitions and the independence tests on them.

use std::collections::HashSet;

use thiserror::Error;

use crate::msa::{class_structure, ClassError, Orientation};
use crate::network::Network;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompositionError {
    #[error("part {0} is empty")]
    EmptyPart(usize),
    #[error("reaction index {0} out of range")]
    UnknownReaction(usize),
    #[error("reaction {0} appears in more than one part")]
    Overlap(usize),
    #[error("reaction {0} is not covered by any part")]
    Uncovered(usize),
    #[error(transparent)]
    Classes(#[from] ClassError),
}

/// Subnetworks induced by a partition of the reaction set.
#[derive(Clone, Debug)]
pub struct Decomposition<'a> {
    parent: &'a Network,
    parts: Vec<Vec<usize>>,
    subnetworks: Vec<Network>,
}

impl<'a> Decomposition<'a> {
    pub fn new(parent: &'a Network, parts: Vec<Vec<usize>>) -> Result<Self, DecompositionError> {
        let r = parent.num_reactions();
        let mut seen = vec![false; r];
        for (k, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(DecompositionError::EmptyPart(k));
            }
            for &j in part {
                if j >= r {
                    return Err(DecompositionError::UnknownReaction(j));
                }
                if std::mem::replace(&mut seen[j], true) {
                    return Err(DecompositionError::Overlap(j));
                }
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(DecompositionError::Uncovered(j));
        }
        let subnetworks = parts.iter().map(|p| parent.induced(p)).collect();
        Ok(Decomposition {
            parent,
            parts,
            subnetworks,
        })
    }

    /// Partition given by reaction labels.
    pub fn from_labels(parent: &'a Network, parts: &[Vec<String>]) -> Result<Self, String> {
        let mut idx = Vec::with_capacity(parts.len());
        for part in parts {
            let mut p = Vec::with_capacity(part.len());
            for label in part {
                p.push(
                    parent
                        .reaction_index(label)
                        .ok_or_else(|| format!("unknown reaction label `{label}`"))?,
                );
            }
            idx.push(p);
        }
        Decomposition::new(parent, idx).map_err(|e| e.to_string())
    }

    pub fn parent(&self) -> &Network {
        self.parent
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    pub fn subnetworks(&self) -> &[Network] {
        &self.subnetworks
    }

    pub fn part_deficiencies(&self) -> Vec<i64> {
        self.subnetworks.iter().map(|s| s.numbers().deficiency).collect()
    }
}

/// Stoichiometric subspace is the direct sum of the parts' subspaces.
pub fn is_independent(d: &Decomposition<'_>) -> bool {
    let total: usize = d
        .subnetworks
        .iter()
        .map(|s| s.stoichiometric_matrix().rank())
        .sum();
    total == d.parent.stoichiometric_matrix().rank()
}

/// `n − ℓ = Σ (nᵢ − ℓᵢ)`.
pub fn is_incidence_independent(d: &Decomposition<'_>) -> bool {
    let whole = d.parent.num_complexes() - d.parent.linkage_classes().len();
    let parts: usize = d
        .subnetworks
        .iter()
        .map(|s| s.num_complexes() - s.linkage_classes().len())
        .sum();
    whole == parts
}

/// Complex sets of distinct parts are pairwise disjoint.
pub fn is_c_decomposition(d: &Decomposition<'_>) -> bool {
    let mut owner: HashSet<usize> = HashSet::new();
    for part in &d.parts {
        let mine: HashSet<usize> = part
            .iter()
            .flat_map(|&j| {
                let r = &d.parent.reactions()[j];
                [r.reactant, r.product]
            })
            .collect();
        if mine.iter().any(|c| owner.contains(c)) {
            return false;
        }
        owner.extend(mine);
    }
    true
}

/// Parts are the fundamental classes of the given orientation.
pub fn fundamental_decomposition<'a>(
    net: &'a Network,
    orientation: &Orientation,
) -> Result<Decomposition<'a>, DecompositionError> {
    let cs = class_structure(net, orientation)?;
    Decomposition::new(net, cs.fundamental_parts())
}
