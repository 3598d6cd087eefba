//! Linear systems over `(μ, M)` for one branch of the search.

use num_traits::{One, Zero};

use super::classes::ClassStructure;
use super::patterns::{ClassKind, Shelf, Shelving};
use crate::kinetics::TMatrix;
use crate::linalg::{ConstraintSystem, FmError, LinearConstraint, RatVector, Rational};
use crate::network::Network;

/// Variable layout: `μ_s` for every species, then one `M_i` per class with a
/// finite `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub species: usize,
    /// Variable index of `M_i`, per class.
    pub m_var: Vec<Option<usize>>,
    pub names: Vec<String>,
}

impl Layout {
    pub fn new(net: &Network, kinds: &[ClassKind]) -> Self {
        let m = net.num_species();
        let mut names: Vec<String> = net.species_names().iter().map(|s| format!("mu_{s}")).collect();
        let mut m_var = Vec::with_capacity(kinds.len());
        for (i, k) in kinds.iter().enumerate() {
            if k.has_finite_m() {
                m_var.push(Some(names.len()));
                names.push(format!("M{}", i + 1));
            } else {
                m_var.push(None);
            }
        }
        Layout {
            species: m,
            m_var,
            names,
        }
    }

    pub fn width(&self) -> usize {
        self.names.len()
    }

    fn t_mu(&self, tm: &TMatrix, complex: usize) -> RatVector {
        let mut v = vec![Rational::zero(); self.width()];
        let col = tm.column(complex).expect("reactant complex of the network");
        v[..self.species].clone_from_slice(col);
        v
    }

    fn m(&self, class: usize) -> RatVector {
        let mut v = vec![Rational::zero(); self.width()];
        v[self.m_var[class].expect("class with finite M")] = Rational::one();
        v
    }
}

/// Constraints from the kinds and shelving, without any `M` ordering.
pub fn base_system(
    net: &Network,
    tm: &TMatrix,
    cs: &ClassStructure,
    kinds: &[ClassKind],
    shelving: &Shelving,
    layout: &Layout,
) -> Result<ConstraintSystem, FmError> {
    let mut sys = ConstraintSystem::new(layout.names.clone());
    let pair = |j: usize| {
        let r = &net.reactions()[j];
        let a = layout.t_mu(tm, r.reactant);
        let b = net.is_reversible(j).then(|| layout.t_mu(tm, r.product));
        (a, b)
    };
    for (i, class) in cs.classes.iter().enumerate() {
        for (k, &j) in class.members.iter().enumerate() {
            let (a, b) = pair(j);
            match kinds[i] {
                ClassKind::Nondegenerate { g, h } if g == h => {
                    let mv = layout.m(i);
                    let Some(b) = b else {
                        sys.add(LinearConstraint::equal(&mv, &a))?;
                        continue;
                    };
                    let shelf = shelving[i].as_ref().expect("shelves for finite class")[k];
                    // (lo, hi) is the positive-g reading; negative g swaps them
                    let (lo, hi) = if g > 0 { (&a, &b) } else { (&b, &a) };
                    match shelf {
                        Shelf::Middle => {
                            sys.add(LinearConstraint::equal(&mv, &a))?;
                            sys.add(LinearConstraint::equal(&a, &b))?;
                        }
                        Shelf::Upper => {
                            sys.add(LinearConstraint::greater(lo, &mv))?;
                            sys.add(LinearConstraint::greater(hi, lo))?;
                        }
                        Shelf::Lower => {
                            sys.add(LinearConstraint::greater(&mv, lo))?;
                            sys.add(LinearConstraint::greater(lo, hi))?;
                        }
                    }
                }
                ClassKind::Nondegenerate { g, .. } => {
                    let b = b.expect("classes without finite M are reversible");
                    if g > 0 {
                        sys.add(LinearConstraint::greater(&b, &a))?;
                    } else {
                        sys.add(LinearConstraint::greater(&a, &b))?;
                    }
                }
                ClassKind::Degenerate { h } => {
                    let b = b.expect("degenerate classes are reversible");
                    match h {
                        1 => sys.add(LinearConstraint::greater(&a, &b))?,
                        0 => sys.add(LinearConstraint::equal(&a, &b))?,
                        _ => sys.add(LinearConstraint::greater(&b, &a))?,
                    }
                }
            }
        }
    }
    for &j in &cs.p0 {
        let (a, b) = pair(j);
        if let Some(b) = b {
            sys.add(LinearConstraint::equal(&a, &b))?;
        }
    }
    Ok(sys)
}

/// Adds `M` ordering constraints: `levels[k]` is the level of `classes[k]`.
pub fn add_ordering(
    sys: &mut ConstraintSystem,
    layout: &Layout,
    classes: &[usize],
    levels: &[usize],
) -> Result<(), FmError> {
    let top = levels.iter().copied().max().map_or(0, |l| l + 1);
    let first_at = |l: usize| classes[levels.iter().position(|&x| x == l).expect("levels are onto")];
    for (k, &c) in classes.iter().enumerate() {
        let head = first_at(levels[k]);
        if head != c {
            sys.add(LinearConstraint::equal(&layout.m(c), &layout.m(head)))?;
        }
    }
    for l in 1..top {
        sys.add(LinearConstraint::greater(&layout.m(first_at(l)), &layout.m(first_at(l - 1))))?;
    }
    Ok(())
}

/// `sign(μ_s) = τ_s` for every species.
pub fn add_species_signs(sys: &mut ConstraintSystem, layout: &Layout, tau: &[i8]) -> Result<(), FmError> {
    let zero = vec![Rational::zero(); layout.width()];
    for (s, &t) in tau.iter().enumerate() {
        let mut e = zero.clone();
        e[s] = Rational::one();
        let c = match t {
            1 => LinearConstraint::greater(&e, &zero),
            -1 => LinearConstraint::greater(&zero, &e),
            _ => LinearConstraint::equal(&e, &zero),
        };
        sys.add(c)?;
    }
    Ok(())
}
