#![allow(dead_code)]

use hdg_core::basis::{monomial_exponents, CellBasis, FaceBasis};
use hdg_core::mesh::Point;
use hdg_core::projection::{project_cell, project_face};
use hdg_core::quadrature::{interval_rule, triangle_rule};
use hdg_core::{DiscretizationConfig, Mesh, Problem, Solution};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `(P_V q, P_W u, P_M u)` of an exact solution, in solver layout.
pub fn interpolant(mesh: &Mesh, config: &DiscretizationConfig, problem: &Problem) -> Solution {
    let (k, l) = (config.k, config.l);
    let vector = CellBasis::new(k + l);
    let scalar = CellBasis::new(k + 1);
    let trace = FaceBasis::new(k);
    let cell_rule = triangle_rule(2 * (k + l + 2) + 6);
    let face_rule = interval_rule(2 * k + 8);
    Solution {
        k,
        l,
        q: (0..mesh.num_cells())
            .map(|c| project_cell(|x| problem.q(x), &vector, mesh, c, &cell_rule).coeffs)
            .collect(),
        u: (0..mesh.num_cells())
            .map(|c| project_cell(|x| problem.u(x), &scalar, mesh, c, &cell_rule).coeffs)
            .collect(),
        u_hat: (0..mesh.num_faces())
            .map(|f| project_face(|x| problem.u(x), &trace, mesh, f, None, &face_rule).coeffs)
            .collect(),
    }
}

pub fn sin_sin(x: Point) -> f64 {
    (std::f64::consts::PI * x[0]).sin() * (std::f64::consts::PI * x[1]).sin()
}

pub fn random_poly(rng: &mut ChaCha8Rng, degree: usize, cells: usize) -> Vec<Vec<f64>> {
    (0..cells)
        .map(|_| {
            (0..monomial_exponents(degree).len())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect()
        })
        .collect()
}

pub fn eval_mono(c: &[f64], degree: usize, x: Point) -> f64 {
    monomial_exponents(degree)
        .iter()
        .zip(c)
        .map(|(&(a, b), c)| c * x[0].powi(a as i32) * x[1].powi(b as i32))
        .sum()
}

/// Evaluate <(I - P_M)(v - Pi_k v).n, (I - P_M) w> over all cell boundaries
/// with independently computed projections.
pub fn projected_form(
    mesh: &Mesh,
    k: usize,
    v: &dyn Fn(usize, Point) -> [f64; 2],
    w: &dyn Fn(usize, Point) -> f64,
) -> f64 {
    let cell_basis = CellBasis::new(k);
    let face_basis = FaceBasis::new(k);
    let cell_rule = triangle_rule(2 * k + 8);
    let rule = interval_rule(2 * k + 10);
    let mut total = 0.0;
    for cell in 0..mesh.num_cells() {
        let pik = project_cell(|x| v(cell, x), &cell_basis, mesh, cell, &cell_rule);
        for local in 0..3 {
            let fid = mesh.cell_faces[cell][local];
            let n = mesh.outward_normal(cell, local);
            let a = |x: Point| {
                let vv = v(cell, x);
                let pv = pik.eval_cell(mesh, &cell_basis, x);
                (vv[0] - pv[0]) * n[0] + (vv[1] - pv[1]) * n[1]
            };
            let pa = project_face(a, &face_basis, mesh, fid, Some(cell), &rule);
            let pw = project_face(|x| w(cell, x), &face_basis, mesh, fid, Some(cell), &rule);
            let face = &mesh.faces[fid];
            total += face.length
                * rule.integrate(|t| {
                    let x = face.point_at(mesh, t);
                    (a(x) - pa.eval_face(&face_basis, t))
                        * (w(cell, x) - pw.eval_face(&face_basis, t))
                });
        }
    }
    total
}
