use std::collections::HashMap;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Par, Side};
use nalgebra::DVector;
use rayon::prelude::*;

use super::local::{condense_local, local_matrices, Recovery};
use super::{DiscretizationConfig, MethodVariant, Spaces};
use crate::error::{HdgError, Result};
use crate::mesh::{Mesh, Point};
use crate::projection::project_face;

/// Interior faces carry `dofs_per_face` consecutive unknowns each, numbered
/// in face order; boundary faces carry none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofMap {
    pub face_offset: Vec<Option<usize>>,
    pub dofs_per_face: usize,
    pub num_dofs: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, dofs_per_face: usize) -> Self {
        let mut next = 0;
        let face_offset = mesh
            .faces
            .iter()
            .map(|f| {
                (!f.boundary).then(|| {
                    let o = next;
                    next += dofs_per_face;
                    o
                })
            })
            .collect();
        Self {
            face_offset,
            dofs_per_face,
            num_dofs: next,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceSystem {
    pub matrix: SparseColMat<usize, f64>,
    pub rhs: Vec<f64>,
    pub dof_map: DofMap,
    /// `P_M g` on every boundary face (empty for interior faces).
    pub boundary_values: Vec<Vec<f64>>,
}

impl TraceSystem {
    pub fn num_dofs(&self) -> usize {
        self.dof_map.num_dofs
    }

    pub fn entries(&self) -> Vec<(usize, usize, f64)> {
        csc_entries(&self.matrix)
    }

    /// max |A_ij - A_ji| / max |A_ij|.
    pub fn asymmetry(&self) -> f64 {
        let entries = self.entries();
        let map: HashMap<(usize, usize), f64> =
            entries.iter().map(|&(r, c, v)| ((r, c), v)).collect();
        let scale = entries.iter().fold(0.0f64, |m, e| m.max(e.2.abs()));
        let diff = entries.iter().fold(0.0f64, |m, &(r, c, v)| {
            let t = map.get(&(c, r)).copied().unwrap_or(0.0);
            m.max((v - t).abs())
        });
        if scale == 0.0 {
            0.0
        } else {
            diff / scale
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.num_dofs()];
        for (r, c, v) in self.entries() {
            y[r] += v * x[c];
        }
        y
    }

    /// ||A x - b|| / ||b|| (or ||A x|| when b = 0).
    pub fn relative_residual(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        let r = ax
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let b = self.rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
        if b > 0.0 {
            r / b
        } else {
            r
        }
    }
}

pub(crate) fn csc_entries(m: &SparseColMat<usize, f64>) -> Vec<(usize, usize, f64)> {
    let m = m.as_ref();
    let mut out = Vec::with_capacity(m.compute_nnz());
    for c in 0..m.ncols() {
        for (r, v) in m.row_idx_of_col(c).zip(m.val_of_col(c)) {
            out.push((r, c, *v));
        }
    }
    out
}

pub(crate) fn boundary_projection(
    mesh: &Mesh,
    spaces: &Spaces,
    g: &(impl Fn(Point) -> f64 + Sync),
) -> Vec<Vec<f64>> {
    mesh.faces
        .iter()
        .enumerate()
        .map(|(id, f)| {
            if f.boundary {
                project_face(g, &spaces.trace, mesh, id, None, &spaces.face_rule).coeffs
            } else {
                Vec::new()
            }
        })
        .collect()
}

pub(crate) struct Assembled {
    pub system: TraceSystem,
    pub recoveries: Vec<Recovery>,
}

pub(crate) fn assemble_full(
    mesh: &Mesh,
    config: &DiscretizationConfig,
    spaces: &Spaces,
    variant: MethodVariant,
    f: &(impl Fn(Point) -> f64 + Sync),
    g: &(impl Fn(Point) -> f64 + Sync),
) -> Result<Assembled> {
    config.validate()?;
    let tau = config.tau(mesh);
    let nm = spaces.face_dofs();
    let dof_map = DofMap::new(mesh, nm);
    let boundary_values = boundary_projection(mesh, spaces, g);

    // Per-cell work is staged in cell order and merged sequentially so the
    // assembled matrix does not depend on scheduling.
    let condensed = (0..mesh.num_cells())
        .into_par_iter()
        .map(|cell| condense_local(&local_matrices(mesh, cell, spaces, variant, tau, f)))
        .collect::<Result<Vec<_>>>()?;

    let mut triplets = Vec::with_capacity(mesh.num_cells() * 9 * nm * nm);
    let mut rhs = vec![0.0; dof_map.num_dofs];
    let mut recoveries = Vec::with_capacity(condensed.len());
    for (cell, cond) in condensed.into_iter().enumerate() {
        let faces = mesh.cell_faces[cell];
        for (la, &fa) in faces.iter().enumerate() {
            let Some(oa) = dof_map.face_offset[fa] else {
                continue;
            };
            for i in 0..nm {
                let row = la * nm + i;
                rhs[oa + i] += cond.trace_rhs[row];
                for (lb, &fb) in faces.iter().enumerate() {
                    let block = (0..nm).map(|j| cond.trace_matrix[(row, lb * nm + j)]);
                    match dof_map.face_offset[fb] {
                        Some(ob) => triplets.extend(
                            block
                                .enumerate()
                                .map(|(j, v)| Triplet::new(oa + i, ob + j, v)),
                        ),
                        None => {
                            rhs[oa + i] -= block
                                .zip(&boundary_values[fb])
                                .map(|(v, g)| v * g)
                                .sum::<f64>()
                        }
                    }
                }
            }
        }
        recoveries.push(cond.recovery);
    }
    let n = dof_map.num_dofs;
    let matrix = SparseColMat::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| HdgError::NotSpd(format!("sparse construction failed: {e:?}")))?;
    Ok(Assembled {
        system: TraceSystem {
            matrix,
            rhs,
            dof_map,
            boundary_values,
        },
        recoveries,
    })
}

/// Condensed global system over the interior trace unknowns, with
/// `uhat = P_M g` eliminated on boundary faces.
pub fn assemble(
    mesh: &Mesh,
    config: &DiscretizationConfig,
    variant: MethodVariant,
    f: impl Fn(Point) -> f64 + Sync,
    g: impl Fn(Point) -> f64 + Sync,
) -> Result<TraceSystem> {
    let spaces = Spaces::new(config);
    Ok(assemble_full(mesh, config, &spaces, variant, &f, &g)?.system)
}

/// Sparse Cholesky solve of a symmetric positive definite matrix; only the
/// lower triangle is read.
pub fn cholesky_solve(matrix: &SparseColMat<usize, f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    // single-threaded factorization keeps the solve bitwise reproducible
    faer::set_global_parallelism(Par::Seq);
    let llt = matrix
        .sp_cholesky(Side::Lower)
        .map_err(|e| HdgError::NotSpd(format!("{e:?}")))?;
    let b = Col::<f64>::from_fn(n, |i| rhs[i]);
    let x = llt.solve(&b);
    Ok((0..n).map(|i| x[i]).collect())
}

pub fn solve_trace(system: &TraceSystem) -> Result<Vec<f64>> {
    cholesky_solve(&system.matrix, &system.rhs)
}

/// Pull the local trace vector of a cell out of the global solution.
pub(crate) fn local_trace(
    mesh: &Mesh,
    cell: usize,
    dof_map: &DofMap,
    boundary_values: &[Vec<f64>],
    x: &[f64],
) -> DVector<f64> {
    let nm = dof_map.dofs_per_face;
    DVector::from_iterator(
        3 * nm,
        mesh.cell_faces[cell].iter().flat_map(|&f| {
            (0..nm).map(move |j| match dof_map.face_offset[f] {
                Some(o) => x[o + j],
                None => boundary_values[f][j],
            })
        }),
    )
}
