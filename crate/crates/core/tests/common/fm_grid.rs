//! Grid oracle for small linear systems with integer coefficients.

use num_traits::ToPrimitive;
use rand::Rng;

use crn_msa::linalg::{int, ratio, ConstraintSystem, LinearConstraint, Rational, Relation};

/// Common denominator of every grid point: lcm(1..=8).
const DEN: i64 = 840;

/// Random system over `n ≤ 4` variables with `≤ 8` constraints; half the
/// time every constraint is made to hold at a planted grid point.
pub fn random_system(rng: &mut impl Rng) -> (ConstraintSystem, Option<Vec<Rational>>) {
    let n = rng.gen_range(1..=4);
    let k = rng.gen_range(1..=8);
    let planted: Option<Vec<Rational>> = rng
        .gen_bool(0.5)
        .then(|| (0..n).map(|_| ratio(rng.gen_range(-16..=16), rng.gen_range(1..=8))).collect());
    let mut sys = ConstraintSystem::with_vars(n);
    for _ in 0..k {
        let coeffs: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
        let relation = [Relation::Eq, Relation::Gt, Relation::Ge][rng.gen_range(0..3)];
        let rhs = match &planted {
            Some(p) => {
                let v: Rational = coeffs.iter().zip(p).map(|(a, b)| a * b).sum();
                match relation {
                    Relation::Eq | Relation::Ge => v,
                    Relation::Gt => v - ratio(1, 8),
                }
            }
            None => int(rng.gen_range(-4..=4)),
        };
        sys.add(LinearConstraint::new(coeffs, relation, rhs)).unwrap();
    }
    (sys, planted)
}

struct Scaled {
    coeffs: Vec<i64>,
    relation: Relation,
    /// `rhs · DEN · scale`, with `scale` clearing the rhs denominator.
    rhs: i64,
    scale: i64,
}

fn scaled(sys: &ConstraintSystem) -> Vec<Scaled> {
    sys.constraints()
        .iter()
        .map(|c| {
            let scale = c.rhs.denom().to_i64().unwrap();
            Scaled {
                coeffs: c.coeffs.iter().map(|a| a.to_integer().to_i64().unwrap()).collect(),
                relation: c.relation,
                rhs: (c.rhs.numer().to_i64().unwrap()) * DEN,
                scale,
            }
        })
        .collect()
}

fn holds(cs: &[Scaled], x: &[i64]) -> bool {
    cs.iter().all(|c| {
        let lhs: i64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum::<i64>() * c.scale;
        match c.relation {
            Relation::Eq => lhs == c.rhs,
            Relation::Gt => lhs > c.rhs,
            Relation::Ge => lhs >= c.rhs,
        }
    })
}

/// A point with denominator `≤ 8` in `[-2, 2]^n` satisfying `sys`, searched
/// exhaustively for `n ≤ 2` and by rejection sampling otherwise. Coefficients
/// must be integers.
pub fn grid_witness(rng: &mut impl Rng, sys: &ConstraintSystem) -> Option<Vec<Rational>> {
    let n = sys.num_vars();
    let cs = scaled(sys);
    let mut values: Vec<i64> = (1..=8)
        .flat_map(|d| (-2 * d..=2 * d).map(move |p| p * (DEN / d)))
        .collect();
    values.sort_unstable();
    values.dedup();
    let lift = |x: &[i64]| x.iter().map(|&v| ratio(v, DEN)).collect::<Vec<_>>();
    if n <= 2 {
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<i64> = idx.iter().map(|&i| values[i]).collect();
            if holds(&cs, &x) {
                return Some(lift(&x));
            }
            let mut p = 0;
            loop {
                if p == n {
                    return None;
                }
                idx[p] += 1;
                if idx[p] < values.len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
        }
    }
    (0..50_000)
        .map(|_| (0..n).map(|_| values[rng.gen_range(0..values.len())]).collect::<Vec<_>>())
        .find(|x| holds(&cs, x))
        .map(|x| lift(&x))
}
