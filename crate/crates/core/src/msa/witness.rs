//! From a feasible `μ` to a pair of positive equilibria and rate constants.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use num_traits::Zero;

use super::patterns::realizable_signs;
use crate::kinetics::{sfrf, PLKinetics, TMatrix};
use crate::linalg::{dot, primitive, to_f64, FmError, RatVector, Rational};
use crate::network::Network;

/// A nonzero sign vector realized in the stoichiometric subspace, with a
/// vector of `S` realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpeciesSign {
    pub tau: Vec<i8>,
    pub sigma: RatVector,
}

/// Every nonzero sign vector of `S`, order `+ − 0` per species.
pub fn stoichiometric_signs(net: &Network) -> Result<Vec<SpeciesSign>, FmError> {
    let m = net.num_species();
    let basis: Vec<RatVector> = net
        .stoichiometric_matrix()
        .transpose()
        .row_space_basis()
        .iter()
        .map(|v| primitive(v))
        .collect();
    // coordinate s of Σ λ_l basis_l, as a row over λ
    let rows: Vec<RatVector> = (0..m)
        .map(|s| basis.iter().map(|b| b[s].clone()).collect())
        .collect();
    let out = realizable_signs(&rows, basis.len(), &vec![false; m])?
        .into_iter()
        .filter(|(tau, _)| tau.iter().any(|&t| t != 0))
        .map(|(tau, lambda)| SpeciesSign {
            sigma: rows.iter().map(|row| dot(row, &lambda)).collect(),
            tau,
        })
        .collect();
    Ok(out)
}

/// `c** = σ / (e^μ − 1)` and `c* = e^μ c**`, with 1 wherever `μ_s = 0`.
pub fn construct_equilibria(mu: &[Rational], sigma: &[Rational]) -> (Vec<f64>, Vec<f64>) {
    let mut c_star = Vec::with_capacity(mu.len());
    let mut c_star2 = Vec::with_capacity(mu.len());
    for (u, s) in mu.iter().zip(sigma) {
        if u.is_zero() {
            c_star.push(1.0);
            c_star2.push(1.0);
            continue;
        }
        let u = to_f64(u);
        let lo = to_f64(s) / u.exp_m1();
        c_star2.push(lo);
        c_star.push(lo * u.exp());
    }
    (c_star, c_star2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateRecovery {
    pub kappa: Vec<f64>,
    /// `e^{T_{y_j}·μ}` per reaction.
    pub exp_t_mu: Vec<f64>,
    pub rates: Vec<f64>,
    pub residual_star: f64,
    pub residual_star2: f64,
}

/// Absolute tolerance on `‖N K(c)‖∞` at both equilibria.
pub const RESIDUAL_TOL: f64 = 1e-6;

/// Minimizes `Σ κ` subject to `κ ≥ 1`, `N κ = 0` and `N diag(e^{Tμ}) κ = 0`,
/// then sets `k_j = κ_j / (c**)^{T_j}`. `None` if the LP is infeasible or the
/// resulting rates fail the residual check.
pub fn recover_rates(
    net: &Network,
    kin: &PLKinetics,
    tm: &TMatrix,
    mu: &[Rational],
    c_star: &[f64],
    c_star2: &[f64],
) -> Option<RateRecovery> {
    let r = net.num_reactions();
    let exp_t_mu: Vec<f64> = (0..r)
        .map(|j| {
            let t = tm.column(net.reactions()[j].reactant).expect("reactant column");
            to_f64(&dot(t, mu)).exp()
        })
        .collect();
    let basis = net.stoichiometric_matrix().row_space_basis();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(2 * basis.len());
    for b in &basis {
        rows.push(b.iter().map(to_f64).collect());
    }
    for b in &basis {
        rows.push(b.iter().zip(&exp_t_mu).map(|(x, e)| to_f64(x) * e).collect());
    }
    let rows = independent_rows(rows);

    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..r).map(|_| lp.add_var(1.0, (1.0, f64::INFINITY))).collect();
    for row in &rows {
        let expr: Vec<_> = vars
            .iter()
            .zip(row)
            .filter(|(_, c)| **c != 0.0)
            .map(|(v, c)| (*v, *c))
            .collect();
        lp.add_constraint(expr.as_slice(), ComparisonOp::Eq, 0.0);
    }
    let sol = lp.solve().ok()?;
    let kappa: Vec<f64> = vars.iter().map(|&v| sol[v]).collect();

    let rates: Vec<f64> = (0..r)
        .map(|j| kappa[j] / crate::kinetics::monomial(c_star2, kin.order_row(j)))
        .collect();
    let residual = |c: &[f64]| -> Option<f64> {
        let f = sfrf(net, kin, c, &rates).ok()?;
        Some(f.iter().fold(0.0f64, |a, v| a.max(v.abs())))
    };
    let residual_star = residual(c_star)?;
    let residual_star2 = residual(c_star2)?;
    (residual_star < RESIDUAL_TOL && residual_star2 < RESIDUAL_TOL).then_some(RateRecovery {
        kappa,
        exp_t_mu,
        rates,
        residual_star,
        residual_star2,
    })
}

/// Rows scaled to unit max norm, keeping those independent of earlier ones
/// under partial-pivot elimination.
fn independent_rows(rows: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    const TOL: f64 = 1e-9;
    let mut kept: Vec<Vec<f64>> = Vec::new();
    let mut reduced: Vec<(usize, Vec<f64>)> = Vec::new();
    for row in rows {
        let scale = row.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if scale == 0.0 {
            continue;
        }
        let row: Vec<f64> = row.iter().map(|v| v / scale).collect();
        let mut w = row.clone();
        for (p, red) in &reduced {
            let f = w[*p];
            if f != 0.0 {
                for (x, y) in w.iter_mut().zip(red) {
                    *x -= f * y;
                }
            }
        }
        let (p, &piv) = w
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("nonempty row");
        if piv.abs() <= TOL {
            continue;
        }
        let norm: Vec<f64> = w.iter().map(|v| v / piv).collect();
        reduced.push((p, norm));
        kept.push(row);
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int;

    #[test]
    fn equilibria_from_log_ratio() {
        let (a, b) = construct_equilibria(&[int(1), int(-1)], &[int(2), int(-1)]);
        assert!((a[0] - 3.163953414).abs() < 1e-9);
        assert!((a[1] - 0.581976707).abs() < 1e-9);
        assert!((b[0] - 1.163953414).abs() < 1e-9);
        assert!((b[1] - 1.581976707).abs() < 1e-9);
        let (a, b) = construct_equilibria(&[int(0)], &[int(0)]);
        assert_eq!((a[0], b[0]), (1.0, 1.0));
    }

    #[test]
    fn dependent_rows_dropped() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![0.0, 1.0], vec![3.0, 3.0]];
        assert_eq!(independent_rows(rows).len(), 2);
    }
}
