use nalgebra::DVector;
use rayon::prelude::*;

use super::assembly::{assemble_full, local_trace, solve_trace};
use super::local::local_matrices;
use super::{DiscretizationConfig, MethodVariant, Spaces};
use crate::error::Result;
use crate::mesh::{Mesh, Point};

/// Coefficients in the orthonormal bases: `q` per cell (x block then y
/// block, degree k+l), `u` per cell (degree k+1), `u_hat` per face
/// (degree k, single-valued in the global face parameterization).
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub k: usize,
    pub l: usize,
    pub q: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub u_hat: Vec<Vec<f64>>,
}

impl Solution {
    pub fn zeros(mesh: &Mesh, config: &DiscretizationConfig) -> Self {
        let spaces = Spaces::new(config);
        Self {
            k: config.k,
            l: config.l,
            q: vec![vec![0.0; spaces.vector_dofs()]; mesh.num_cells()],
            u: vec![vec![0.0; spaces.scalar_dofs()]; mesh.num_cells()],
            u_hat: vec![vec![0.0; spaces.face_dofs()]; mesh.num_faces()],
        }
    }

    /// Largest absolute coefficient over all three fields.
    pub fn max_abs(&self) -> f64 {
        self.q
            .iter()
            .chain(&self.u)
            .chain(&self.u_hat)
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest coefficientwise difference relative to the larger solution.
    pub fn relative_difference(&self, other: &Solution) -> f64 {
        let diff = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| {
            a.iter()
                .flatten()
                .zip(b.iter().flatten())
                .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        };
        let d = diff(&self.q, &other.q)
            .max(diff(&self.u, &other.u))
            .max(diff(&self.u_hat, &other.u_hat));
        let scale = self.max_abs().max(other.max_abs());
        if scale == 0.0 {
            d
        } else {
            d / scale
        }
    }

    pub(crate) fn local_trace(&self, mesh: &Mesh, cell: usize) -> DVector<f64> {
        DVector::from_iterator(
            3 * self.u_hat[0].len(),
            mesh.cell_faces[cell]
                .iter()
                .flat_map(|&f| self.u_hat[f].iter().copied()),
        )
    }
}

/// Assemble, solve the trace system, and recover `(q_h, u_h)` cell by cell.
pub fn solve(
    mesh: &Mesh,
    config: &DiscretizationConfig,
    variant: MethodVariant,
    f: impl Fn(Point) -> f64 + Sync,
    g: impl Fn(Point) -> f64 + Sync,
) -> Result<Solution> {
    let spaces = Spaces::new(config);
    let assembled = assemble_full(mesh, config, &spaces, variant, &f, &g)?;
    let system = &assembled.system;
    let x = solve_trace(system)?;
    let map = &system.dof_map;

    let (q, u): (Vec<Vec<f64>>, Vec<Vec<f64>>) = assembled
        .recoveries
        .par_iter()
        .enumerate()
        .map(|(cell, rec)| {
            let uhat = local_trace(mesh, cell, map, &system.boundary_values, &x);
            let (q, u) = rec.recover(&uhat);
            (q.as_slice().to_vec(), u.as_slice().to_vec())
        })
        .unzip();

    let nm = spaces.face_dofs();
    let u_hat = (0..mesh.num_faces())
        .map(|f| match map.face_offset[f] {
            Some(o) => x[o..o + nm].to_vec(),
            None => system.boundary_values[f].clone(),
        })
        .collect();

    Ok(Solution {
        k: config.k,
        l: config.l,
        q,
        u,
        u_hat,
    })
}

/// Max over interior faces and trace basis functions of the assembled
/// flux-continuity residual `sum_K <qhat.n, mu>_{dK}`.
pub fn flux_residual(
    solution: &Solution,
    mesh: &Mesh,
    config: &DiscretizationConfig,
    variant: MethodVariant,
) -> f64 {
    let spaces = Spaces::new(config);
    let tau = config.tau(mesh);
    let nm = spaces.face_dofs();
    let contributions: Vec<DVector<f64>> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|cell| {
            let local = local_matrices(mesh, cell, &spaces, variant, tau, |_| 0.0);
            let q = DVector::from_column_slice(&solution.q[cell]);
            let u = DVector::from_column_slice(&solution.u[cell]);
            local.trace_rows(&q, &u, &solution.local_trace(mesh, cell))
        })
        .collect();
    let mut residual = vec![vec![0.0; nm]; mesh.num_faces()];
    for (cell, r) in contributions.iter().enumerate() {
        for (local, &f) in mesh.cell_faces[cell].iter().enumerate() {
            for j in 0..nm {
                residual[f][j] += r[local * nm + j];
            }
        }
    }
    mesh.faces
        .iter()
        .zip(&residual)
        .filter(|(f, _)| !f.boundary)
        .flat_map(|(_, r)| r.iter())
        .fold(0.0, |m, v| m.max(v.abs()))
}
