//! Exact Fourier–Motzkin feasibility for mixed equality / strict / weak systems.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::{dot, RatVector, Rational};

/// Largest intermediate system the eliminator will build before giving up.
const MAX_CONSTRAINTS: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `a·x = b`
    Eq,
    /// `a·x > b`
    Gt,
    /// `a·x ≥ b`
    Ge,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Gt => ">",
            Relation::Ge => ">=",
        }
    }
}

/// A single constraint `coeffs · x  REL  rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearConstraint {
    pub coeffs: RatVector,
    pub relation: Relation,
    pub rhs: Rational,
}

impl LinearConstraint {
    pub fn new(coeffs: RatVector, relation: Relation, rhs: Rational) -> Self {
        LinearConstraint {
            coeffs,
            relation,
            rhs,
        }
    }

    /// `lhs · x = rhs · x`, both sides homogeneous.
    pub fn equal(lhs: &[Rational], rhs: &[Rational]) -> Self {
        Self::new(difference(lhs, rhs), Relation::Eq, Rational::zero())
    }

    /// `lhs · x > rhs · x`.
    pub fn greater(lhs: &[Rational], rhs: &[Rational]) -> Self {
        Self::new(difference(lhs, rhs), Relation::Gt, Rational::zero())
    }

    /// `lhs · x ≥ rhs · x`.
    pub fn greater_eq(lhs: &[Rational], rhs: &[Rational]) -> Self {
        Self::new(difference(lhs, rhs), Relation::Ge, Rational::zero())
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Eq => lhs == self.rhs,
            Relation::Gt => lhs > self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Truth value of a constraint with no variables left.
    fn holds_constant(&self) -> bool {
        let zero = Rational::zero();
        match self.relation {
            Relation::Eq => self.rhs.is_zero(),
            Relation::Gt => zero > self.rhs,
            Relation::Ge => zero >= self.rhs,
        }
    }

    /// Scales so the first nonzero coefficient has absolute value 1 (and is
    /// exactly 1 for equalities).
    fn normalized(mut self) -> Self {
        let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).cloned() else {
            return self;
        };
        let scale = match self.relation {
            Relation::Eq => lead,
            _ => lead.abs(),
        };
        if !scale.is_one() {
            for c in &mut self.coeffs {
                *c /= &scale;
            }
            self.rhs /= &scale;
        }
        self
    }
}

fn difference(a: &[Rational], b: &[Rational]) -> RatVector {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FmError {
    #[error("constraint has {found} coefficients but the system has {expected} variables")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("elimination exceeded {limit} intermediate constraints")]
    TooLarge { limit: usize },
}

/// A linear system over named rational variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSystem {
    names: Vec<String>,
    constraints: Vec<LinearConstraint>,
}

impl ConstraintSystem {
    pub fn new(names: Vec<String>) -> Self {
        ConstraintSystem {
            names,
            constraints: Vec::new(),
        }
    }

    /// System over `n` anonymous variables `x0..x{n-1}`.
    pub fn with_vars(n: usize) -> Self {
        Self::new((0..n).map(|i| format!("x{i}")).collect())
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn add(&mut self, c: LinearConstraint) -> Result<(), FmError> {
        if c.coeffs.len() != self.names.len() {
            return Err(FmError::DimensionMismatch {
                expected: self.names.len(),
                found: c.coeffs.len(),
            });
        }
        self.constraints.push(c);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = LinearConstraint>>(&mut self, cs: I) -> Result<(), FmError> {
        for c in cs {
            self.add(c)?;
        }
        Ok(())
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars() && self.constraints.iter().all(|c| c.is_satisfied(x))
    }

    /// Human-readable form of one constraint, e.g. `2 mu_X + mu_Y = 0`.
    pub fn render(&self, c: &LinearConstraint) -> String {
        let mut terms = Vec::new();
        for (name, a) in self.names.iter().zip(&c.coeffs) {
            if a.is_zero() {
                continue;
            }
            let mag = a.abs();
            let body = if mag.is_one() {
                name.clone()
            } else {
                format!("{mag} {name}")
            };
            if terms.is_empty() {
                terms.push(if a.is_negative() { format!("-{body}") } else { body });
            } else {
                terms.push(format!("{} {body}", if a.is_negative() { "-" } else { "+" }));
            }
        }
        let lhs = if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" ")
        };
        format!("{lhs} {} {}", c.relation.symbol(), c.rhs)
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constraints {
            writeln!(f, "{}", self.render(c))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Sat(RatVector),
    Unsat,
}

impl Feasibility {
    pub fn is_sat(&self) -> bool {
        matches!(self, Feasibility::Sat(_))
    }

    pub fn sample(&self) -> Option<&RatVector> {
        match self {
            Feasibility::Sat(x) => Some(x),
            Feasibility::Unsat => None,
        }
    }
}

/// Decides feasibility exactly and returns a rational sample point on success.
///
/// Variables are eliminated from the last to the first; equalities are used
/// for substitution whenever one mentions the variable. Back-substitution then
/// fixes `x0, x1, ...` in order, choosing the midpoint of each interval, an
/// integer just past a one-sided bound, or 0 when unconstrained.
pub fn fourier_motzkin_feasible(sys: &ConstraintSystem) -> Result<Feasibility, FmError> {
    let n = sys.num_vars();
    for c in &sys.constraints {
        if c.coeffs.len() != n {
            return Err(FmError::DimensionMismatch {
                expected: n,
                found: c.coeffs.len(),
            });
        }
    }

    let Some(mut current) = simplify(sys.constraints.clone()) else {
        return Ok(Feasibility::Unsat);
    };
    // stages[k] holds the system right before eliminating variable k
    let mut stages: Vec<Vec<LinearConstraint>> = vec![Vec::new(); n];
    for k in (0..n).rev() {
        let next = eliminate(&current, k)?;
        stages[k] = std::mem::take(&mut current);
        match simplify(next) {
            Some(s) => current = s,
            None => return Ok(Feasibility::Unsat),
        }
    }

    let mut x: RatVector = vec![Rational::zero(); n];
    for k in 0..n {
        x[k] = choose_value(&stages[k], &x, k);
    }
    debug_assert!(sys.is_satisfied(&x), "sample point violates the system");
    Ok(Feasibility::Sat(x))
}

/// Drops satisfied constant constraints, keeps only the tightest inequality
/// per coefficient vector, and reports `None` on a violated constant.
fn simplify(cs: Vec<LinearConstraint>) -> Option<Vec<LinearConstraint>> {
    let mut equalities: Vec<LinearConstraint> = Vec::new();
    let mut tightest: BTreeMap<Vec<Rational>, (Rational, Relation)> = BTreeMap::new();
    let mut order: Vec<Vec<Rational>> = Vec::new();
    for c in cs {
        if c.is_trivial() {
            if !c.holds_constant() {
                return None;
            }
            continue;
        }
        let c = c.normalized();
        match c.relation {
            Relation::Eq => {
                if !equalities.contains(&c) {
                    equalities.push(c);
                }
            }
            rel => match tightest.get_mut(&c.coeffs) {
                Some(entry) => {
                    if c.rhs > entry.0 || (c.rhs == entry.0 && rel == Relation::Gt) {
                        *entry = (c.rhs, rel);
                    }
                }
                None => {
                    order.push(c.coeffs.clone());
                    tightest.insert(c.coeffs, (c.rhs, rel));
                }
            },
        }
    }
    let mut out = equalities;
    for coeffs in order {
        let (rhs, rel) = tightest.remove(&coeffs).expect("recorded key");
        out.push(LinearConstraint::new(coeffs, rel, rhs));
    }
    Some(out)
}

fn eliminate(cs: &[LinearConstraint], k: usize) -> Result<Vec<LinearConstraint>, FmError> {
    if let Some(pivot) = cs
        .iter()
        .find(|c| c.relation == Relation::Eq && !c.coeffs[k].is_zero())
    {
        let a = pivot.coeffs[k].clone();
        return Ok(cs
            .iter()
            .filter(|c| !std::ptr::eq(*c, pivot))
            .map(|c| {
                if c.coeffs[k].is_zero() {
                    return c.clone();
                }
                let f = &c.coeffs[k] / &a;
                let coeffs = c
                    .coeffs
                    .iter()
                    .zip(&pivot.coeffs)
                    .map(|(x, p)| x - &f * p)
                    .collect();
                LinearConstraint::new(coeffs, c.relation, &c.rhs - &f * &pivot.rhs)
            })
            .collect());
    }

    let mut lower = Vec::new();
    let mut upper = Vec::new();
    let mut out = Vec::new();
    for c in cs {
        if c.coeffs[k].is_positive() {
            lower.push(c);
        } else if c.coeffs[k].is_negative() {
            upper.push(c);
        } else {
            out.push(c.clone());
        }
    }
    if out.len() + lower.len() * upper.len() > MAX_CONSTRAINTS {
        return Err(FmError::TooLarge {
            limit: MAX_CONSTRAINTS,
        });
    }
    for lo in &lower {
        for up in &upper {
            let wl = -up.coeffs[k].clone();
            let wu = lo.coeffs[k].clone();
            let coeffs: RatVector = lo
                .coeffs
                .iter()
                .zip(&up.coeffs)
                .map(|(a, b)| &wl * a + &wu * b)
                .collect();
            let rhs = &wl * &lo.rhs + &wu * &up.rhs;
            let relation = if lo.relation == Relation::Gt || up.relation == Relation::Gt {
                Relation::Gt
            } else {
                Relation::Ge
            };
            out.push(LinearConstraint::new(coeffs, relation, rhs));
        }
    }
    Ok(out)
}

/// Picks `x[k]` given fixed `x[..k]`, using only constraints that mention at
/// most variables `0..=k`.
fn choose_value(cs: &[LinearConstraint], x: &[Rational], k: usize) -> Rational {
    let mut lower: Option<(Rational, bool)> = None;
    let mut upper: Option<(Rational, bool)> = None;
    for c in cs {
        let a = &c.coeffs[k];
        if a.is_zero() {
            continue;
        }
        let rest: Rational = (0..k).fold(Rational::zero(), |acc, j| acc + &c.coeffs[j] * &x[j]);
        let bound = (&c.rhs - rest) / a;
        if c.relation == Relation::Eq {
            return bound;
        }
        let strict = c.relation == Relation::Gt;
        if a.is_positive() {
            if lower.as_ref().is_none_or(|(l, s)| bound > *l || (bound == *l && strict && !s)) {
                lower = Some((bound, strict));
            }
        } else if upper
            .as_ref()
            .is_none_or(|(u, s)| bound < *u || (bound == *u && strict && !s))
        {
            upper = Some((bound, strict));
        }
    }
    match (lower, upper) {
        (Some((l, _)), Some((u, _))) => (l + u) / Rational::from_integer(2.into()),
        (Some((l, _)), None) => l.floor() + Rational::one(),
        (None, Some((u, _))) => u.ceil() - Rational::one(),
        (None, None) => Rational::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    fn c(coeffs: &[i64], relation: Relation, rhs: i64) -> LinearConstraint {
        LinearConstraint::new(coeffs.iter().map(|&v| int(v)).collect(), relation, int(rhs))
    }

    #[test]
    fn opposite_strict_bounds_are_unsat() {
        let mut sys = ConstraintSystem::with_vars(1);
        sys.add(c(&[1], Relation::Gt, 0)).unwrap();
        sys.add(c(&[-1], Relation::Gt, 0)).unwrap();
        assert_eq!(fourier_motzkin_feasible(&sys).unwrap(), Feasibility::Unsat);
    }

    #[test]
    fn touching_weak_bounds_pin_the_value() {
        let mut sys = ConstraintSystem::with_vars(1);
        sys.add(c(&[1], Relation::Ge, 3)).unwrap();
        sys.add(c(&[-1], Relation::Ge, -3)).unwrap();
        assert_eq!(
            fourier_motzkin_feasible(&sys).unwrap(),
            Feasibility::Sat(vec![int(3)])
        );
        sys.add(c(&[1], Relation::Gt, 3)).unwrap();
        assert_eq!(fourier_motzkin_feasible(&sys).unwrap(), Feasibility::Unsat);
    }

    #[test]
    fn strictness_propagates_through_combination() {
        // x > y, y ≥ x  is infeasible only because of the strict side
        let mut sys = ConstraintSystem::with_vars(2);
        sys.add(c(&[1, -1], Relation::Gt, 0)).unwrap();
        sys.add(c(&[-1, 1], Relation::Ge, 0)).unwrap();
        assert_eq!(fourier_motzkin_feasible(&sys).unwrap(), Feasibility::Unsat);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let mut sys = ConstraintSystem::with_vars(2);
        assert_eq!(
            sys.add(c(&[1], Relation::Eq, 0)),
            Err(FmError::DimensionMismatch {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn running_example_system() {
        // variables: mu_X, mu_Y, M1, M2, M3, M4
        let mut sys = ConstraintSystem::new(
            ["mu_X", "mu_Y", "M1", "M2", "M3", "M4"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        );
        let rows: [(&[i64], Relation); 13] = [
            (&[1, 1, 0, 0, 0, 0], Relation::Eq),   // 2X+Y = X
            (&[1, 0, -1, 0, 0, 0], Relation::Eq),  // X = M1
            (&[1, 1, 0, 0, 0, 0], Relation::Eq),   // X+2Y = Y
            (&[0, 1, 0, -1, 0, 0], Relation::Eq),  // Y = M2
            (&[1, 1, 0, 0, 0, 0], Relation::Eq),   // 2X+2Y = X+Y
            (&[1, 1, 0, 0, -1, 0], Relation::Eq),  // X+Y = M3
            (&[1, 1, 0, 0, 0, 0], Relation::Eq),   // 3X+Y = 2X
            (&[2, 0, 0, 0, 0, -1], Relation::Eq),  // 2X = M4
            (&[0, 0, 1, 0, -1, 0], Relation::Gt),  // M1 > M3
            (&[0, 0, 0, -1, 1, 0], Relation::Gt),  // M3 > M2
            (&[0, 0, 1, 0, -1, 0], Relation::Gt),
            (&[0, 0, 0, -1, 1, 0], Relation::Gt),
            (&[0, 0, 1, -1, 0, 0], Relation::Gt),
        ];
        for (coeffs, rel) in rows {
            sys.add(c(coeffs, rel, 0)).unwrap();
        }
        let Feasibility::Sat(x) = fourier_motzkin_feasible(&sys).unwrap() else {
            panic!("expected SAT");
        };
        assert!(sys.is_satisfied(&x));
        assert_eq!(&x[..2], &[int(1), int(-1)]);
    }

    #[test]
    fn unconstrained_and_one_sided_values() {
        let mut sys = ConstraintSystem::with_vars(3);
        sys.add(c(&[0, 2, 0], Relation::Gt, 3)).unwrap();
        sys.add(c(&[0, 0, -1], Relation::Ge, 0)).unwrap();
        let Feasibility::Sat(x) = fourier_motzkin_feasible(&sys).unwrap() else {
            panic!("expected SAT");
        };
        assert_eq!(x, vec![int(0), int(2), int(-1)]);
    }

    #[test]
    fn render_uses_names() {
        let mut sys = ConstraintSystem::new(vec!["a".into(), "b".into()]);
        sys.add(c(&[2, -1], Relation::Gt, 0)).unwrap();
        assert_eq!(sys.to_string(), "2 a - b > 0\n");
    }
}
