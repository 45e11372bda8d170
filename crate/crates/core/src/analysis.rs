//! Error norms and observed convergence orders.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{CellBasis, FaceBasis};
use crate::error::{HdgError, Result};
use crate::hdg::{DiscretizationConfig, Solution};
use crate::mesh::{Mesh, Point};
use crate::problem::Problem;
use crate::projection::{dot, face_reference_points};
use crate::quadrature::{interval_rule, triangle_rule, TriangleRule};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub n: usize,
    pub h_global: f64,
    pub err_q: f64,
    pub err_u: f64,
    pub err_jump: f64,
}

fn cell_l2<const C: usize>(
    mesh: &Mesh,
    basis: &CellBasis,
    rule: &TriangleRule,
    coeffs: &[Vec<f64>],
    exact: impl Fn(Point) -> [f64; C] + Sync,
) -> f64 {
    let dim = basis.dim();
    let tab: Vec<Vec<f64>> = rule.points.iter().map(|&p| basis.eval(p)).collect();
    (0..mesh.num_cells())
        .into_par_iter()
        .map(|cell| {
            let geo = mesh.geometry(cell);
            let c = &coeffs[cell];
            rule.iter()
                .zip(&tab)
                .map(|((xi, w), phi)| {
                    let ex = exact(geo.to_physical(xi));
                    let e2: f64 = (0..C)
                        .map(|d| (ex[d] - dot(&c[d * dim..(d + 1) * dim], phi)).powi(2))
                        .sum();
                    w * geo.det * e2
                })
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .iter()
        .sum::<f64>()
        .sqrt()
}

/// `||q - q_h||` over the mesh.
pub fn error_q_l2(
    solution: &Solution,
    exact_q: impl Fn(Point) -> [f64; 2] + Sync,
    mesh: &Mesh,
    rule: &TriangleRule,
) -> f64 {
    let basis = CellBasis::new(solution.k + solution.l);
    cell_l2(mesh, &basis, rule, &solution.q, exact_q)
}

/// `||u - u_h||` over the mesh.
pub fn error_u_l2(
    solution: &Solution,
    exact_u: impl Fn(Point) -> f64 + Sync,
    mesh: &Mesh,
    rule: &TriangleRule,
) -> f64 {
    let basis = CellBasis::new(solution.k + 1);
    cell_l2(mesh, &basis, rule, &solution.u, |x| [exact_u(x)])
}

/// `||h^{-1/2} (P_M u_h - uhat_h)||` over all cell boundaries with the
/// global `h`; interior faces contribute once from each side.
pub fn jump_norm(solution: &Solution, mesh: &Mesh) -> f64 {
    let k = solution.k;
    let scalar = CellBasis::new(k + 1);
    let trace = FaceBasis::new(k);
    let rule = interval_rule(2 * k + 2);
    let psi: Vec<Vec<f64>> = rule.points.iter().map(|&t| trace.eval(t)).collect();
    let total: f64 = (0..mesh.num_cells())
        .into_par_iter()
        .map(|cell| {
            let mut s = 0.0;
            for local in 0..3 {
                let fid = mesh.cell_faces[cell][local];
                let refs = face_reference_points(mesh, cell, local, &rule.points);
                let mut pm = vec![0.0; trace.dim()];
                for ((xi, w), p) in refs.iter().zip(&rule.weights).zip(&psi) {
                    let uh = dot(&solution.u[cell], &scalar.eval(*xi));
                    for (a, pj) in pm.iter_mut().zip(p) {
                        *a += w * uh * pj;
                    }
                }
                let d2: f64 = pm
                    .iter()
                    .zip(&solution.u_hat[fid])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum();
                s += mesh.faces[fid].length * d2;
            }
            s
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    (total / mesh.h_global).sqrt()
}

/// `log(E1/E2) / log(h1/h2)` for consecutive levels.
pub fn observed_order(coarse: (f64, f64), fine: (f64, f64)) -> Result<f64> {
    let (h1, e1) = coarse;
    let (h2, e2) = fine;
    if !(e1 > 0.0 && e2 > 0.0) {
        return Err(HdgError::NonPositiveError {
            coarse: e1,
            fine: e2,
        });
    }
    assert!(h1 > h2, "coarse h {h1} must exceed fine h {h2}");
    Ok((e1 / e2).ln() / (h1 / h2).ln())
}

/// All three error columns of one solve.
pub fn error_report(
    n: usize,
    mesh: &Mesh,
    config: &DiscretizationConfig,
    solution: &Solution,
    problem: &Problem,
) -> ErrorReport {
    let rule = triangle_rule(config.exactness());
    ErrorReport {
        n,
        h_global: mesh.h_global,
        err_q: error_q_l2(solution, |x| problem.q(x), mesh, &rule),
        err_u: error_u_l2(solution, |x| problem.u(x), mesh, &rule),
        err_jump: jump_norm(solution, mesh),
    }
}
