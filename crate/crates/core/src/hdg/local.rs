use nalgebra::{DMatrix, DVector};

use super::{MethodVariant, Spaces};
use crate::error::{HdgError, Result};
use crate::mesh::{Mesh, Point};
use crate::projection::face_reference_points;

/// Dense blocks of one cell. With `x = (u, uhat)` the local equations read
///
/// ```text
///  A q + C x       = 0
/// -C^T q + S x     = (load, 0)
/// ```
///
/// where the uhat rows are this cell's share of the flux-continuity
/// equations on its faces.
#[derive(Clone, Debug)]
pub struct LocalSystem {
    pub cell: usize,
    /// q-q mass, `2 dimV x 2 dimV`.
    pub a: DMatrix<f64>,
    /// Coupling of u into the q equation, `2 dimV x dimW`.
    pub c_u: DMatrix<f64>,
    /// Coupling of uhat into the q equation, `2 dimV x 3 dimM`.
    pub c_hat: DMatrix<f64>,
    /// Stabilization blocks, tau included.
    pub s_uu: DMatrix<f64>,
    pub s_uh: DMatrix<f64>,
    pub s_hh: DMatrix<f64>,
    pub load: DVector<f64>,
}

impl LocalSystem {
    pub fn size(&self) -> usize {
        self.a.nrows() + self.c_u.ncols() + self.c_hat.ncols()
    }

    /// The full local matrix in (q, u, uhat) order, with the rhs.
    pub fn full(&self) -> (DMatrix<f64>, DVector<f64>) {
        let nq = self.a.nrows();
        let nu = self.c_u.ncols();
        let nh = self.c_hat.ncols();
        let n = nq + nu + nh;
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (nq, nq)).copy_from(&self.a);
        m.view_mut((0, nq), (nq, nu)).copy_from(&self.c_u);
        m.view_mut((0, nq + nu), (nq, nh)).copy_from(&self.c_hat);
        m.view_mut((nq, 0), (nu, nq))
            .copy_from(&(-self.c_u.transpose()));
        m.view_mut((nq + nu, 0), (nh, nq))
            .copy_from(&(-self.c_hat.transpose()));
        m.view_mut((nq, nq), (nu, nu)).copy_from(&self.s_uu);
        m.view_mut((nq, nq + nu), (nu, nh)).copy_from(&self.s_uh);
        m.view_mut((nq + nu, nq), (nh, nu))
            .copy_from(&self.s_uh.transpose());
        m.view_mut((nq + nu, nq + nu), (nh, nh))
            .copy_from(&self.s_hh);
        let mut rhs = DVector::zeros(n);
        rhs.rows_mut(nq, nu).copy_from(&self.load);
        (m, rhs)
    }

    /// This cell's contribution to the flux-continuity rows given local
    /// coefficients.
    pub fn trace_rows(
        &self,
        q: &DVector<f64>,
        u: &DVector<f64>,
        uhat: &DVector<f64>,
    ) -> DVector<f64> {
        -self.c_hat.tr_mul(q) + self.s_uh.tr_mul(u) + &self.s_hh * uhat
    }
}

/// Assemble the local blocks of `cell` for `variant`.
pub fn local_matrices(
    mesh: &Mesh,
    cell: usize,
    spaces: &Spaces,
    variant: MethodVariant,
    tau: f64,
    f: impl Fn(Point) -> f64,
) -> LocalSystem {
    let geo = mesh.geometry(cell);
    let det = geo.det;
    let nv = spaces.vector.dim();
    let nw = spaces.scalar.dim();
    let nm = spaces.trace.dim();
    let nh = 3 * nm;

    let mut a = DMatrix::zeros(2 * nv, 2 * nv);
    let mut c_u = DMatrix::zeros(2 * nv, nw);
    let mut c_hat = DMatrix::zeros(2 * nv, nh);
    let mut s_uu = DMatrix::zeros(nw, nw);
    let mut s_uh = DMatrix::zeros(nw, nh);
    let mut s_hh = DMatrix::zeros(nh, nh);
    let mut load = DVector::zeros(nw);

    let mut phi_v = vec![0.0; nv];
    let mut phi_w = vec![0.0; nw];
    for (xi, w) in spaces.cell_rule.iter() {
        let jw = det * w;
        spaces.vector.eval_into(xi, &mut phi_v);
        spaces.scalar.eval_into(xi, &mut phi_w);
        let grads: Vec<Point> = spaces
            .scalar
            .grad(xi)
            .into_iter()
            .map(|g| geo.physical_gradient(g))
            .collect();
        for i in 0..nv {
            for j in 0..nv {
                let m = jw * phi_v[i] * phi_v[j];
                a[(i, j)] += m;
                a[(nv + i, nv + j)] += m;
            }
            for (j, g) in grads.iter().enumerate() {
                c_u[(i, j)] += jw * phi_v[i] * g[0];
                c_u[(nv + i, j)] += jw * phi_v[i] * g[1];
            }
        }
        let fx = jw * f(geo.to_physical(xi));
        for (l, p) in load.iter_mut().zip(&phi_w) {
            *l += fx * p;
        }
    }

    let face_rule = &spaces.face_rule;
    let nq = face_rule.len();
    let psi: Vec<Vec<f64>> = face_rule
        .points
        .iter()
        .map(|&t| spaces.trace.eval(t))
        .collect();
    for local in 0..3 {
        let length = mesh.faces[mesh.cell_faces[cell][local]].length;
        let n = mesh.outward_normal(cell, local);
        let refs = face_reference_points(mesh, cell, local, &face_rule.points);
        let vals_v: Vec<Vec<f64>> = refs.iter().map(|&p| spaces.vector.eval(p)).collect();
        let vals_w: Vec<Vec<f64>> = refs.iter().map(|&p| spaces.scalar.eval(p)).collect();

        // P_M of each scalar basis function, in the face basis
        let mut pm_w = vec![vec![0.0; nw]; nm];
        for q in 0..nq {
            let w = face_rule.weights[q];
            for (j, row) in pm_w.iter_mut().enumerate() {
                for (i, x) in row.iter_mut().enumerate() {
                    *x += w * psi[q][j] * vals_w[q][i];
                }
            }
        }
        let projected: Vec<Vec<f64>> = (0..nq)
            .map(|q| {
                (0..nw)
                    .map(|i| (0..nm).map(|j| psi[q][j] * pm_w[j][i]).sum())
                    .collect()
            })
            .collect();
        let trace1 = if variant.projects_coupling() {
            &projected
        } else {
            &vals_w
        };
        let trace2 = if variant.projects_stabilization() {
            &projected
        } else {
            &vals_w
        };

        let off = local * nm;
        for q in 0..nq {
            let lw = length * face_rule.weights[q];
            let tw = tau * lw;
            for a_ in 0..nv {
                let vn = [lw * n[0] * vals_v[q][a_], lw * n[1] * vals_v[q][a_]];
                for i in 0..nw {
                    c_u[(a_, i)] -= vn[0] * trace1[q][i];
                    c_u[(nv + a_, i)] -= vn[1] * trace1[q][i];
                }
                for j in 0..nm {
                    c_hat[(a_, off + j)] += vn[0] * psi[q][j];
                    c_hat[(nv + a_, off + j)] += vn[1] * psi[q][j];
                }
            }
            for i in 0..nw {
                for i2 in 0..nw {
                    s_uu[(i, i2)] += tw * trace2[q][i] * trace2[q][i2];
                }
                for j in 0..nm {
                    s_uh[(i, off + j)] -= tw * trace2[q][i] * psi[q][j];
                }
            }
            for j in 0..nm {
                for j2 in 0..nm {
                    s_hh[(off + j, off + j2)] += tw * psi[q][j] * psi[q][j2];
                }
            }
        }
    }

    LocalSystem {
        cell,
        a,
        c_u,
        c_hat,
        s_uu,
        s_uh,
        s_hh,
        load,
    }
}

/// Local reconstruction `u = u_load + u_from_hat uhat`,
/// `q = q_load + q_from_hat uhat`.
#[derive(Clone, Debug)]
pub struct Recovery {
    pub u_from_hat: DMatrix<f64>,
    pub u_load: DVector<f64>,
    pub q_from_hat: DMatrix<f64>,
    pub q_load: DVector<f64>,
}

impl Recovery {
    pub fn recover(&self, uhat: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let q = &self.q_load + &self.q_from_hat * uhat;
        let u = &self.u_load + &self.u_from_hat * uhat;
        (q, u)
    }
}

#[derive(Clone, Debug)]
pub struct Condensed {
    pub trace_matrix: DMatrix<f64>,
    pub trace_rhs: DVector<f64>,
    pub recovery: Recovery,
}

/// Eliminate q and u, leaving the Schur complement on the local trace dofs.
pub fn condense_local(local: &LocalSystem) -> Result<Condensed> {
    let singular = || HdgError::SingularLocalBlock { cell: local.cell };
    let a_chol = local.a.clone().cholesky().ok_or_else(singular)?;
    // q = -A^{-1} (C_u u + C_hat uhat)
    let ainv_cu = a_chol.solve(&local.c_u);
    let ainv_ch = a_chol.solve(&local.c_hat);
    let k_uu = &local.s_uu + local.c_u.tr_mul(&ainv_cu);
    let k_uh = &local.s_uh + local.c_u.tr_mul(&ainv_ch);
    let k_hh = &local.s_hh + local.c_hat.tr_mul(&ainv_ch);

    let uu_chol = k_uu.cholesky().ok_or_else(singular)?;
    let u_load = uu_chol.solve(&local.load);
    let u_from_hat = -uu_chol.solve(&k_uh);
    let trace_matrix = &k_hh + k_uh.tr_mul(&u_from_hat);
    let trace_rhs = -k_uh.tr_mul(&u_load);
    let q_load = -&ainv_cu * &u_load;
    let q_from_hat = -(&ainv_cu * &u_from_hat + &ainv_ch);

    Ok(Condensed {
        trace_matrix,
        trace_rhs,
        recovery: Recovery {
            u_from_hat,
            u_load,
            q_from_hat,
            q_load,
        },
    })
}
