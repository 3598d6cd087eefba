//! Sign patterns for `g` and `h`, shelvings, and orderings of the `M_i`.

use num_traits::Zero;
use petgraph::unionfind::UnionFind;

use super::classes::{ClassStructure, Colinkage};
use crate::linalg::{
    fourier_motzkin_feasible, ConstraintSystem, FmError, LinearConstraint, RatVector, Rational,
    Relation,
};
use crate::network::Network;

/// Depth-first enumeration of sign vectors `τ` (order `+`, `−`, `0` per
/// coordinate, first coordinate most significant) such that some combination
/// `Σ λ_l rows[·][l]` has sign `τ_k` in coordinate `k`. `forced_positive[k]`
/// restricts coordinate `k` to `+`. Returns each pattern with a feasible `λ`.
pub fn realizable_signs(
    rows: &[RatVector],
    dim: usize,
    forced_positive: &[bool],
) -> Result<Vec<(Vec<i8>, RatVector)>, FmError> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(rows.len());
    extend_signs(rows, dim, forced_positive, &mut prefix, &mut out)?;
    Ok(out)
}

fn extend_signs(
    rows: &[RatVector],
    dim: usize,
    forced_positive: &[bool],
    prefix: &mut Vec<i8>,
    out: &mut Vec<(Vec<i8>, RatVector)>,
) -> Result<(), FmError> {
    let k = prefix.len();
    let choices: &[i8] = if k < rows.len() && forced_positive[k] {
        &[1]
    } else {
        &[1, -1, 0]
    };
    if k == rows.len() {
        if let Some(lambda) = sign_sample(rows, dim, prefix)? {
            out.push((prefix.clone(), lambda));
        }
        return Ok(());
    }
    for &s in choices {
        prefix.push(s);
        if sign_sample(&rows[..=k], dim, prefix)?.is_some() {
            extend_signs(rows, dim, forced_positive, prefix, out)?;
        }
        prefix.pop();
    }
    Ok(())
}

fn sign_sample(rows: &[RatVector], dim: usize, signs: &[i8]) -> Result<Option<RatVector>, FmError> {
    let mut sys = ConstraintSystem::with_vars(dim);
    for (row, &s) in rows.iter().zip(signs) {
        let (coeffs, relation) = match s {
            1 => (row.clone(), Relation::Gt),
            -1 => (row.iter().map(|x| -x.clone()).collect(), Relation::Gt),
            _ => (row.clone(), Relation::Eq),
        };
        sys.add(LinearConstraint::new(coeffs, relation, Rational::zero()))?;
    }
    Ok(fourier_motzkin_feasible(&sys)?.sample().cloned())
}

/// What a `(g, h)` pattern pair implies for one equivalence class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassKind {
    /// `g ≠ 0` on the representative; `M` is finite iff `ρ = h/g > 0`.
    Nondegenerate { g: i8, h: i8 },
    /// `g = 0` on the representative.
    Degenerate { h: i8 },
}

impl ClassKind {
    pub fn has_finite_m(self) -> bool {
        matches!(self, ClassKind::Nondegenerate { g, h } if g == h)
    }
}

/// Sign patterns realizable in `Ker L_O` over the representatives, with
/// nonreversible representatives forced positive.
pub fn kernel_sign_patterns(cs: &ClassStructure) -> Result<Vec<Vec<i8>>, FmError> {
    let rows: Vec<RatVector> = cs.representatives().iter().map(|&j| cs.kernel_row(j)).collect();
    let forced: Vec<bool> = cs.classes.iter().map(|c| c.nonreversible).collect();
    Ok(realizable_signs(&rows, cs.kernel_dim(), &forced)?
        .into_iter()
        .map(|(s, _)| s)
        .collect())
}

/// All `(g, h)` pairs from `patterns × patterns`, the pair of zero patterns
/// last, collapsed to per-class kinds with duplicates removed.
pub fn pattern_kinds(patterns: &[Vec<i8>]) -> Vec<Vec<ClassKind>> {
    let is_zero = |p: &[i8]| p.iter().all(|&s| s == 0);
    let mut pairs: Vec<(&Vec<i8>, &Vec<i8>)> = Vec::new();
    let mut zero_pair = None;
    for g in patterns {
        for h in patterns {
            if is_zero(g) && is_zero(h) {
                zero_pair = Some((g, h));
            } else {
                pairs.push((g, h));
            }
        }
    }
    pairs.extend(zero_pair);
    let mut out: Vec<Vec<ClassKind>> = Vec::new();
    for (g, h) in pairs {
        let kinds: Vec<ClassKind> = g
            .iter()
            .zip(h)
            .map(|(&gs, &hs)| {
                if gs == 0 {
                    ClassKind::Degenerate { h: hs }
                } else {
                    ClassKind::Nondegenerate { g: gs, h: hs }
                }
            })
            .collect();
        if !out.contains(&kinds) {
            out.push(kinds);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shelf {
    Middle,
    Upper,
    Lower,
}

impl Shelf {
    pub fn name(self) -> &'static str {
        match self {
            Shelf::Middle => "middle",
            Shelf::Upper => "upper",
            Shelf::Lower => "lower",
        }
    }
}

/// Shelf constraints among the members of one equivalence class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShelfGroups {
    /// Group id of each member, in member order.
    pub group_of: Vec<usize>,
    /// Groups that must sit on the middle shelf.
    pub forced_middle: Vec<bool>,
}

impl ShelfGroups {
    pub fn count(&self) -> usize {
        self.forced_middle.len()
    }

    pub fn any_forced(&self) -> bool {
        self.forced_middle.iter().any(|&f| f)
    }
}

/// Applies the shelving clauses to one equivalence class `members` with
/// fundamental class colinkage `col`.
pub fn shelf_groups(net: &Network, members: &[usize], col: &Colinkage) -> ShelfGroups {
    let unit_of = |j: usize| -> usize {
        members
            .iter()
            .position(|&m| m == j || net.reverse_of(m) == Some(j))
            .expect("reaction belongs to the class")
    };
    let mut uf = UnionFind::<usize>::new(members.len());
    let mut forced = vec![false; members.len()];
    for (&m, f) in members.iter().zip(forced.iter_mut()) {
        if !net.is_reversible(m) || col.big_cycle {
            *f = true;
        }
    }
    for (a, &ja) in col.reactions.iter().enumerate() {
        let ua = unit_of(ja);
        if !col.reactant_terminal[a] {
            forced[ua] = true;
        }
        for (b, &jb) in col.reactions.iter().enumerate().skip(a + 1) {
            let same_reactant = net.reactions()[ja].reactant == net.reactions()[jb].reactant;
            let same_terminal =
                col.terminal_class[a].is_some() && col.terminal_class[a] == col.terminal_class[b];
            if same_reactant || same_terminal {
                uf.union(ua, unit_of(jb));
            }
        }
    }
    let mut ids: Vec<usize> = Vec::new();
    let mut group_of = Vec::with_capacity(members.len());
    for u in 0..members.len() {
        let root = uf.find(u);
        let id = match ids.iter().position(|&r| r == root) {
            Some(id) => id,
            None => {
                ids.push(root);
                ids.len() - 1
            }
        };
        group_of.push(id);
    }
    let mut forced_middle = vec![false; ids.len()];
    for (u, &f) in forced.iter().enumerate() {
        if f {
            forced_middle[group_of[u]] = true;
        }
    }
    ShelfGroups {
        group_of,
        forced_middle,
    }
}

/// Shelf of each member, per class; `None` for classes without shelves.
pub type Shelving = Vec<Option<Vec<Shelf>>>;

pub fn is_all_middle(s: &Shelving) -> bool {
    s.iter().flatten().flatten().all(|&x| x == Shelf::Middle)
}

/// Every shelving consistent with the clauses, middle first, the earliest
/// free group varying slowest. `None` if the kinds admit no shelving.
pub fn enumerate_shelvings(groups: &[ShelfGroups], kinds: &[ClassKind]) -> Option<ShelvingIter> {
    let mut free = Vec::new();
    for (i, (g, k)) in groups.iter().zip(kinds).enumerate() {
        match k {
            k if !k.has_finite_m() && matches!(k, ClassKind::Nondegenerate { .. }) => {
                if g.any_forced() {
                    return None;
                }
            }
            ClassKind::Nondegenerate { .. } => {
                for (gid, &f) in g.forced_middle.iter().enumerate() {
                    if !f {
                        free.push((i, gid));
                    }
                }
            }
            _ => {}
        }
    }
    Some(ShelvingIter {
        groups: groups.to_vec(),
        kinds: kinds.to_vec(),
        free,
        counter: Vec::new(),
        done: false,
        started: false,
    })
}

pub struct ShelvingIter {
    groups: Vec<ShelfGroups>,
    kinds: Vec<ClassKind>,
    free: Vec<(usize, usize)>,
    counter: Vec<u8>,
    done: bool,
    started: bool,
}

impl ShelvingIter {
    /// Number of shelvings the iterator will produce, if it fits in a `u64`.
    pub fn total(&self) -> Option<u64> {
        3u64.checked_pow(self.free.len() as u32)
    }

    fn current(&self) -> Shelving {
        const ORDER: [Shelf; 3] = [Shelf::Middle, Shelf::Upper, Shelf::Lower];
        self.groups
            .iter()
            .zip(&self.kinds)
            .enumerate()
            .map(|(i, (g, k))| match k {
                ClassKind::Degenerate { .. } => None,
                _ if !k.has_finite_m() => Some(vec![Shelf::Upper; g.group_of.len()]),
                ClassKind::Nondegenerate { .. } => Some(
                    g.group_of
                        .iter()
                        .map(|&gid| {
                            self.free
                                .iter()
                                .position(|&f| f == (i, gid))
                                .map_or(Shelf::Middle, |p| ORDER[self.counter[p] as usize])
                        })
                        .collect(),
                ),
            })
            .collect()
    }
}

impl Iterator for ShelvingIter {
    type Item = Shelving;

    fn next(&mut self) -> Option<Shelving> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            self.counter = vec![0; self.free.len()];
            return Some(self.current());
        }
        // odometer with the last free group varying fastest
        for p in (0..self.counter.len()).rev() {
            if self.counter[p] < 2 {
                self.counter[p] += 1;
                return Some(self.current());
            }
            self.counter[p] = 0;
        }
        self.done = true;
        None
    }
}

/// All total preorders of `k` items as level vectors (`levels[i]` is the rank
/// of item `i`, levels `0..L` all used), in lexicographic order.
pub fn total_preorders(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; k];
    fn rec(i: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == k {
            let max = cur.iter().copied().max().map_or(0, |m| m + 1);
            if (0..max).all(|l| cur.contains(&l)) {
                out.push(cur.clone());
            }
            return;
        }
        for l in 0..k {
            cur[i] = l;
            rec(i + 1, k, cur, out);
        }
    }
    rec(0, k, &mut cur, &mut out);
    out
}

/// Weighted averages `Σ w_i ρ_i / Σ w_i` (all `w_i > 0`) achievable from a
/// set of `ρ` values, on the ordinal scale where finite classes sit at their
/// level plus one, `ρ = 0` at zero, and `ρ < 0` classes anywhere below zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Averages {
    /// `None` is unbounded below.
    lo: Option<i64>,
    hi: i64,
    /// All values coincide, so only that value is achievable.
    point: bool,
}

impl Averages {
    fn of(values: &[Value]) -> Option<Averages> {
        if values.is_empty() {
            return None;
        }
        let fixed: Vec<i64> = values
            .iter()
            .filter_map(|v| match v {
                Value::Level(l) => Some(*l),
                Value::Negative => None,
            })
            .collect();
        if fixed.len() < values.len() {
            return Some(Averages {
                lo: None,
                hi: fixed.iter().copied().max().unwrap_or(0),
                point: false,
            });
        }
        let lo = *fixed.iter().min().expect("nonempty");
        let hi = *fixed.iter().max().expect("nonempty");
        Some(Averages {
            lo: Some(lo),
            hi,
            point: lo == hi,
        })
    }

    /// Some average of `self` is strictly below some average of `other`.
    fn can_be_below(&self, other: &Averages) -> bool {
        self.lo.is_none_or(|lo| lo < other.hi)
    }

    fn can_equal(&self, other: &Averages) -> bool {
        let lo_a = self.lo.unwrap_or(i64::MIN);
        let lo_b = other.lo.unwrap_or(i64::MIN);
        match (self.point, other.point) {
            (true, true) => lo_a == lo_b,
            (true, false) => lo_b < lo_a && lo_a < other.hi,
            (false, true) => lo_a < lo_b && lo_b < self.hi,
            (false, false) => lo_a.max(lo_b) < self.hi.min(other.hi),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Value {
    Level(i64),
    Negative,
}

/// Whether the weighted averages achievable from finite levels `plus` and
/// `minus` can coincide.
pub fn nonsegregated(plus: &[usize], minus: &[usize]) -> bool {
    let lift = |q: &[usize]| q.iter().map(|&l| Value::Level(l as i64 + 1)).collect::<Vec<_>>();
    match (Averages::of(&lift(plus)), Averages::of(&lift(minus))) {
        (None, None) => true,
        (Some(a), Some(b)) => a.can_equal(&b),
        _ => false,
    }
}

/// A nondegenerate class touched by a vector `b` of `Ker⊥ L_O ∩ Γ_W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Touch {
    /// Class with finite `M`.
    Finite(usize),
    /// `ρ = 0`.
    Zero,
    /// `ρ < 0`.
    Negative,
}

/// What `b · g_W = 0` and `b · h_W = 0` require of one basis vector `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Balance {
    /// Nondegenerate classes with `b_i g_i > 0` and `b_i g_i < 0`.
    pub plus: Vec<Touch>,
    pub minus: Vec<Touch>,
    /// Signs of `b_k h_k` over degenerate classes with `h_k ≠ 0`.
    pub degenerate: Vec<i8>,
}

impl Balance {
    pub fn new(b_on_reps: &[Rational], kinds: &[ClassKind]) -> Self {
        let mut out = Balance {
            plus: Vec::new(),
            minus: Vec::new(),
            degenerate: Vec::new(),
        };
        for (i, (b, k)) in b_on_reps.iter().zip(kinds).enumerate() {
            if b.is_zero() {
                continue;
            }
            let sb: i8 = if *b > Rational::zero() { 1 } else { -1 };
            match *k {
                ClassKind::Nondegenerate { g, h } => {
                    let touch = match h * g {
                        1 => Touch::Finite(i),
                        0 => Touch::Zero,
                        _ => Touch::Negative,
                    };
                    if sb * g > 0 {
                        out.plus.push(touch);
                    } else {
                        out.minus.push(touch);
                    }
                }
                ClassKind::Degenerate { h } if h != 0 => out.degenerate.push(sb * h),
                ClassKind::Degenerate { .. } => {}
            }
        }
        out
    }

    /// Classes whose `M` ordering this balance depends on.
    pub fn finite_classes(&self) -> impl Iterator<Item = usize> + '_ {
        self.plus.iter().chain(&self.minus).filter_map(|t| match t {
            Touch::Finite(i) => Some(*i),
            _ => None,
        })
    }

    /// Whether positive weights and degenerate magnitudes exist that satisfy
    /// both sums, given the level of each finite class.
    pub fn admits(&self, level_of: &dyn Fn(usize) -> usize) -> bool {
        let values = |q: &[Touch]| -> Vec<Value> {
            q.iter()
                .map(|t| match *t {
                    Touch::Finite(i) => Value::Level(level_of(i) as i64 + 1),
                    Touch::Zero => Value::Level(0),
                    Touch::Negative => Value::Negative,
                })
                .collect()
        };
        let pos = self.degenerate.iter().any(|&d| d > 0);
        let neg = self.degenerate.iter().any(|&d| d < 0);
        match (Averages::of(&values(&self.plus)), Averages::of(&values(&self.minus))) {
            // the degenerate terms must cancel among themselves
            (None, None) => pos == neg,
            (Some(a), Some(b)) => match (pos, neg) {
                (false, false) => a.can_equal(&b),
                (true, false) => a.can_be_below(&b),
                (false, true) => b.can_be_below(&a),
                (true, true) => true,
            },
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    #[test]
    fn fubini_counts() {
        let counts: Vec<usize> = (0..=5).map(|k| total_preorders(k).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 13, 75, 541]);
    }

    #[test]
    fn nonsegregation_cases() {
        // interleaved levels
        assert!(nonsegregated(&[1, 3], &[0, 2]));
        assert!(!nonsegregated(&[0, 1], &[2, 3]));
        assert!(nonsegregated(&[1], &[1]));
        assert!(!nonsegregated(&[1], &[2]));
        assert!(nonsegregated(&[1, 1], &[1]));
        assert!(!nonsegregated(&[0, 1], &[1]));
        assert!(!nonsegregated(&[0], &[]));
        assert!(nonsegregated(&[], &[]));
    }

    #[test]
    fn sign_patterns_of_a_line() {
        // kernel spanned by (1, -1): patterns (+,-), (-,+), (0,0)
        let rows = vec![vec![int(1)], vec![int(-1)]];
        let pats: Vec<Vec<i8>> = realizable_signs(&rows, 1, &[false, false])
            .unwrap()
            .into_iter()
            .map(|p| p.0)
            .collect();
        assert_eq!(pats, vec![vec![1, -1], vec![-1, 1], vec![0, 0]]);
        let forced: Vec<Vec<i8>> = realizable_signs(&rows, 1, &[true, false])
            .unwrap()
            .into_iter()
            .map(|p| p.0)
            .collect();
        assert_eq!(forced, vec![vec![1, -1]]);
    }

    /// Brute force over all 3^w sign vectors with an explicit integer search
    /// for a realizing combination agrees with the pruned enumeration.
    #[test]
    fn sign_enumeration_matches_brute_force() {
        let rows: Vec<RatVector> = vec![
            vec![int(1), int(0)],
            vec![int(0), int(1)],
            vec![int(1), int(-1)],
        ];
        let got: Vec<Vec<i8>> = realizable_signs(&rows, 2, &[false; 3])
            .unwrap()
            .into_iter()
            .map(|p| p.0)
            .collect();
        let mut brute = Vec::new();
        for code in 0..27 {
            let s: Vec<i8> = (0..3).map(|k| [1, -1, 0][(code / 3usize.pow(2 - k)) % 3]).collect();
            let hit = (-4i64..=4).any(|a| {
                (-4i64..=4).any(|b| {
                    let v = [a, b, a - b];
                    v.iter().zip(&s).all(|(x, &t)| x.signum() as i8 == t)
                })
            });
            if hit {
                brute.push(s);
            }
        }
        assert_eq!(got, brute);
    }

    #[test]
    fn kinds_put_zero_pair_last_and_dedupe() {
        let pats = vec![vec![1], vec![0]];
        let kinds = pattern_kinds(&pats);
        assert_eq!(
            kinds,
            vec![
                vec![ClassKind::Nondegenerate { g: 1, h: 1 }],
                vec![ClassKind::Nondegenerate { g: 1, h: 0 }],
                vec![ClassKind::Degenerate { h: 1 }],
                vec![ClassKind::Degenerate { h: 0 }],
            ]
        );
    }

    #[test]
    fn balance_with_degenerate_terms() {
        let pos = ClassKind::Nondegenerate { g: 1, h: 1 };
        let b = vec![int(-1), int(3), int(2)];
        // classes 0 and 2 on opposite sides at one level: balanced exactly
        let kinds = [pos, ClassKind::Degenerate { h: 0 }, pos];
        let bal = Balance::new(&b, &kinds);
        assert!(bal.admits(&|_| 0));
        // a positive degenerate term needs the plus side strictly lower
        let kinds = [pos, ClassKind::Degenerate { h: 1 }, pos];
        let bal = Balance::new(&b, &kinds);
        assert_eq!(bal.degenerate, vec![1]);
        assert!(!bal.admits(&|_| 0));
        assert!(bal.admits(&|c| if c == 2 { 0 } else { 1 }));
        // only degenerate terms of one sign cannot cancel
        let kinds = [ClassKind::Degenerate { h: 0 }, ClassKind::Degenerate { h: 1 }, ClassKind::Degenerate { h: 0 }];
        assert!(!Balance::new(&b, &kinds).admits(&|_| 0));
        // a class with rho < 0 lies below every finite level
        let kinds = [ClassKind::Nondegenerate { g: 1, h: -1 }, ClassKind::Degenerate { h: 0 }, pos];
        let bal = Balance::new(&b, &kinds);
        assert!(!bal.admits(&|_| 0));
    }

    #[test]
    fn shelving_iteration_order() {
        let groups = vec![ShelfGroups {
            group_of: vec![0, 1],
            forced_middle: vec![false, false],
        }];
        let kinds = vec![ClassKind::Nondegenerate { g: 1, h: 1 }];
        let all: Vec<Shelving> = enumerate_shelvings(&groups, &kinds).unwrap().collect();
        assert_eq!(all.len(), 9);
        assert!(is_all_middle(&all[0]));
        assert_eq!(all[1], vec![Some(vec![Shelf::Middle, Shelf::Upper])]);
        let forced = vec![ShelfGroups {
            group_of: vec![0],
            forced_middle: vec![true],
        }];
        let neg = vec![ClassKind::Nondegenerate { g: 1, h: -1 }];
        assert!(enumerate_shelvings(&forced, &neg).is_none());
    }
}
