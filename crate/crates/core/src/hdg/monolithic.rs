//! Uncondensed dense solve over (q, u, uhat), used as an oracle for the
//! hybridized path.

use nalgebra::{DMatrix, DVector};

use super::assembly::{boundary_projection, DofMap};
use super::local::local_matrices;
use super::solver::Solution;
use super::{DiscretizationConfig, MethodVariant, Spaces};
use crate::error::{HdgError, Result};
use crate::mesh::{Mesh, Point};

pub const MONOLITHIC_CELL_LIMIT: usize = 200;

/// Global block system. Unknowns are ordered cell by cell as (q, u), then
/// the interior trace dofs. The q rows are negated, which makes the matrix
/// symmetric (and indefinite).
#[derive(Clone, Debug)]
pub struct MonolithicSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub cell_block: usize,
    pub vector_dofs: usize,
    pub dof_map: DofMap,
    pub boundary_values: Vec<Vec<f64>>,
}

pub fn monolithic_system(
    mesh: &Mesh,
    config: &DiscretizationConfig,
    variant: MethodVariant,
    f: impl Fn(Point) -> f64,
    g: impl Fn(Point) -> f64 + Sync,
) -> Result<MonolithicSystem> {
    config.validate()?;
    if mesh.num_cells() > MONOLITHIC_CELL_LIMIT {
        return Err(HdgError::SizeGuard {
            cells: mesh.num_cells(),
            limit: MONOLITHIC_CELL_LIMIT,
        });
    }
    let spaces = Spaces::new(config);
    let tau = config.tau(mesh);
    let nq = spaces.vector_dofs();
    let nu = spaces.scalar_dofs();
    let nm = spaces.face_dofs();
    let block = nq + nu;
    let dof_map = DofMap::new(mesh, nm);
    let trace_start = block * mesh.num_cells();
    let n = trace_start + dof_map.num_dofs;
    let boundary_values = boundary_projection(mesh, &spaces, &g);

    let mut matrix = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for cell in 0..mesh.num_cells() {
        let local = local_matrices(mesh, cell, &spaces, variant, tau, &f);
        let (m, r) = local.full();
        // local index -> global index, or the known boundary value
        let place = |i: usize| -> std::result::Result<usize, f64> {
            if i < block {
                Ok(cell * block + i)
            } else {
                let lf = (i - block) / nm;
                let j = (i - block) % nm;
                let face = mesh.cell_faces[cell][lf];
                match dof_map.face_offset[face] {
                    Some(o) => Ok(trace_start + o + j),
                    None => Err(boundary_values[face][j]),
                }
            }
        };
        for i in 0..m.nrows() {
            let Ok(gi) = place(i) else { continue };
            let sign = if i < nq { -1.0 } else { 1.0 };
            rhs[gi] += sign * r[i];
            for j in 0..m.ncols() {
                match place(j) {
                    Ok(gj) => matrix[(gi, gj)] += sign * m[(i, j)],
                    Err(value) => rhs[gi] -= sign * m[(i, j)] * value,
                }
            }
        }
    }
    Ok(MonolithicSystem {
        matrix,
        rhs,
        cell_block: block,
        vector_dofs: nq,
        dof_map,
        boundary_values,
    })
}

/// Dense LU solve of the full system; limited to small meshes.
pub fn solve_monolithic(
    mesh: &Mesh,
    config: &DiscretizationConfig,
    variant: MethodVariant,
    f: impl Fn(Point) -> f64,
    g: impl Fn(Point) -> f64 + Sync,
) -> Result<Solution> {
    let sys = monolithic_system(mesh, config, variant, f, g)?;
    let x = sys
        .matrix
        .clone()
        .lu()
        .solve(&sys.rhs)
        .ok_or_else(|| HdgError::NotSpd("monolithic system is singular".into()))?;
    let block = sys.cell_block;
    let nq = sys.vector_dofs;
    let trace_start = block * mesh.num_cells();
    let nm = sys.dof_map.dofs_per_face;
    Ok(Solution {
        k: config.k,
        l: config.l,
        q: (0..mesh.num_cells())
            .map(|c| x.rows(c * block, nq).iter().copied().collect())
            .collect(),
        u: (0..mesh.num_cells())
            .map(|c| x.rows(c * block + nq, block - nq).iter().copied().collect())
            .collect(),
        u_hat: (0..mesh.num_faces())
            .map(|f| match sys.dof_map.face_offset[f] {
                Some(o) => x.rows(trace_start + o, nm).iter().copied().collect(),
                None => sys.boundary_values[f].clone(),
            })
            .collect(),
    })
}
