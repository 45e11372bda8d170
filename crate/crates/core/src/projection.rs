//! L2-orthogonal projections onto cell and face polynomial spaces.
//!
//! With orthonormal reference bases and affine cells, the physical mass
//! matrix of a cell is `|det J| I` and that of a face is `|F| I`, so every
//! projection reduces to quadrature inner products.

use crate::basis::{CellBasis, FaceBasis};
use crate::mesh::{Mesh, Point};
use crate::quadrature::{IntervalRule, TriangleRule};

/// Reference-triangle vertices in local vertex order.
const REF_VERTICES: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Values a projected field can take: scalars or 2-vectors.
pub trait FieldValue: Copy {
    const COMPONENTS: usize;
    fn component(&self, i: usize) -> f64;
}

impl FieldValue for f64 {
    const COMPONENTS: usize = 1;
    fn component(&self, _: usize) -> f64 {
        *self
    }
}

impl FieldValue for [f64; 2] {
    const COMPONENTS: usize = 2;
    fn component(&self, i: usize) -> f64 {
        self[i]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entity {
    Cell(usize),
    /// A face trace taken from the adjacent cell `side`; `None` for data
    /// that is single-valued on the face (e.g. boundary data).
    Face {
        face: usize,
        side: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedField {
    pub entity: Entity,
    pub degree: usize,
    pub components: usize,
    /// Component-major coefficient blocks in the orthonormal basis.
    pub coeffs: Vec<f64>,
}

impl ProjectedField {
    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.coeffs.len() / self.components;
        &self.coeffs[c * n..(c + 1) * n]
    }

    /// Evaluate a cell field at a physical point.
    pub fn eval_cell(&self, mesh: &Mesh, basis: &CellBasis, x: Point) -> Vec<f64> {
        let Entity::Cell(cell) = self.entity else {
            panic!("eval_cell on a face field");
        };
        let phi = basis.eval(mesh.geometry(cell).to_reference(x));
        (0..self.components)
            .map(|c| dot(self.component(c), &phi))
            .collect()
    }

    /// Evaluate a scalar face field at the face parameter `t`.
    pub fn eval_face(&self, basis: &FaceBasis, t: f64) -> f64 {
        dot(&self.coeffs, &basis.eval(t))
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reference coordinates of the face points `ts` (global face parameter)
/// seen from `cell` through its local face `local`.
pub fn face_reference_points(mesh: &Mesh, cell: usize, local: usize, ts: &[f64]) -> Vec<Point> {
    let verts = mesh.cells[cell];
    let face = &mesh.faces[mesh.cell_faces[cell][local]];
    let la = (local + 1) % 3;
    let lb = (local + 2) % 3;
    let (start, end) = if verts[la] == face.vertices[0] {
        (REF_VERTICES[la], REF_VERTICES[lb])
    } else {
        (REF_VERTICES[lb], REF_VERTICES[la])
    };
    ts.iter()
        .map(|&t| {
            [
                start[0] + t * (end[0] - start[0]),
                start[1] + t * (end[1] - start[1]),
            ]
        })
        .collect()
}

/// Best L2 approximation of `f` on `cell` in the span of `basis`.
pub fn project_cell<T: FieldValue>(
    f: impl Fn(Point) -> T,
    basis: &CellBasis,
    mesh: &Mesh,
    cell: usize,
    rule: &TriangleRule,
) -> ProjectedField {
    assert!(
        rule.exactness >= 2 * basis.degree(),
        "cell rule exactness {} below 2 * degree {}",
        rule.exactness,
        basis.degree()
    );
    let geo = mesh.geometry(cell);
    let dim = basis.dim();
    let mut coeffs = vec![0.0; T::COMPONENTS * dim];
    let mut phi = vec![0.0; dim];
    for (xi, w) in rule.iter() {
        basis.eval_into(xi, &mut phi);
        let v = f(geo.to_physical(xi));
        for c in 0..T::COMPONENTS {
            let fc = w * v.component(c);
            for (a, p) in coeffs[c * dim..(c + 1) * dim].iter_mut().zip(&phi) {
                *a += fc * p;
            }
        }
    }
    ProjectedField {
        entity: Entity::Cell(cell),
        degree: basis.degree(),
        components: T::COMPONENTS,
        coeffs,
    }
}

/// Best L2 approximation of `f` on a face in its global parameterization.
/// `f` receives the physical point; `side` records which cell's trace it is.
pub fn project_face(
    f: impl Fn(Point) -> f64,
    basis: &FaceBasis,
    mesh: &Mesh,
    face: usize,
    side: Option<usize>,
    rule: &IntervalRule,
) -> ProjectedField {
    assert!(
        rule.exactness >= 2 * basis.degree(),
        "face rule exactness {} below 2 * degree {}",
        rule.exactness,
        basis.degree()
    );
    let fc = &mesh.faces[face];
    let mut coeffs = vec![0.0; basis.dim()];
    let mut psi = vec![0.0; basis.dim()];
    for (t, w) in rule.iter() {
        basis.eval_into(t, &mut psi);
        let v = w * f(fc.point_at(mesh, t));
        for (a, p) in coeffs.iter_mut().zip(&psi) {
            *a += v * p;
        }
    }
    ProjectedField {
        entity: Entity::Face { face, side },
        degree: basis.degree(),
        components: 1,
        coeffs,
    }
}

/// `R(v, w) = sum_K <(v.n) - P_M(v.n), w>_{dK}` for broken fields given as
/// `(cell, point) -> value`, with `n` the outward normal of each cell.
pub fn residual_r(
    v: impl Fn(usize, Point) -> [f64; 2],
    w: impl Fn(usize, Point) -> f64,
    mesh: &Mesh,
    k: usize,
    rule: &IntervalRule,
) -> f64 {
    assert!(rule.exactness >= 2 * k);
    let basis = FaceBasis::new(k);
    let psi: Vec<Vec<f64>> = rule.points.iter().map(|&t| basis.eval(t)).collect();
    let mut total = 0.0;
    for cell in 0..mesh.num_cells() {
        for local in 0..3 {
            let face = &mesh.faces[mesh.cell_faces[cell][local]];
            let n = mesh.outward_normal(cell, local);
            let pts: Vec<Point> = rule
                .points
                .iter()
                .map(|&t| face.point_at(mesh, t))
                .collect();
            let vn: Vec<f64> = pts
                .iter()
                .map(|&x| {
                    let vv = v(cell, x);
                    vv[0] * n[0] + vv[1] * n[1]
                })
                .collect();
            let mut proj = vec![0.0; basis.dim()];
            for ((wq, vq), pq) in rule.weights.iter().zip(&vn).zip(&psi) {
                for (a, p) in proj.iter_mut().zip(pq) {
                    *a += wq * vq * p;
                }
            }
            let local_sum: f64 = rule
                .weights
                .iter()
                .zip(&pts)
                .zip(vn.iter().zip(&psi))
                .map(|((wq, &x), (vq, pq))| wq * (vq - dot(&proj, pq)) * w(cell, x))
                .sum();
            total += face.length * local_sum;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{interval_rule, triangle_rule};

    #[test]
    fn constant_is_reproduced() {
        let mesh = Mesh::generate_structured(2).unwrap();
        for degree in 0..4 {
            let b = CellBasis::new(degree);
            let p = project_cell(|_| 1.0, &b, &mesh, 3, &triangle_rule(2 * degree));
            let v = p.eval_cell(&mesh, &b, [0.6, 0.3])[0];
            assert!((v - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn degree_zero_is_mean() {
        let mesh = Mesh::generate_structured(2).unwrap();
        let b = CellBasis::new(0);
        for cell in 0..mesh.num_cells() {
            let p = project_cell(|x| x[0] + x[1], &b, &mesh, cell, &triangle_rule(2));
            let pts = mesh.cell_points(cell);
            let mean = pts.iter().map(|q| q[0] + q[1]).sum::<f64>() / 3.0;
            let v = p.eval_cell(&mesh, &b, pts[0])[0];
            assert!((v - mean).abs() < 1e-14);
        }
    }

    #[test]
    fn face_projection_examples() {
        let mesh = Mesh::generate_structured(1).unwrap();
        let face = mesh
            .faces
            .iter()
            .position(|f| f.vertices == [0, 1])
            .expect("bottom edge");
        let b1 = FaceBasis::new(1);
        let p = project_face(|x| x[0], &b1, &mesh, face, None, &interval_rule(4));
        for t in [0.0, 0.3, 1.0] {
            assert!((p.eval_face(&b1, t) - t).abs() < 1e-14);
        }
        let b0 = FaceBasis::new(0);
        let p = project_face(|x| x[0] * x[0], &b0, &mesh, face, None, &interval_rule(4));
        assert!((p.coeffs[0] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn face_points_agree_from_both_sides() {
        let mesh = Mesh::generate_structured(3).unwrap();
        let ts = [0.0, 0.25, 0.9];
        for (fid, face) in mesh.faces.iter().enumerate() {
            for s in &face.sides {
                assert_eq!(mesh.cell_faces[s.cell][s.local], fid);
                let geo = mesh.geometry(s.cell);
                let refs = face_reference_points(&mesh, s.cell, s.local, &ts);
                for (&t, xi) in ts.iter().zip(refs) {
                    let x = geo.to_physical(xi);
                    let y = face.point_at(&mesh, t);
                    assert!((x[0] - y[0]).abs() < 1e-14 && (x[1] - y[1]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn residual_vanishes_for_piecewise_pk_fields() {
        let mesh = Mesh::generate_structured(3).unwrap();
        let k = 2;
        let v = |c: usize, x: Point| {
            let s = c as f64;
            [x[0] * x[1] + s, x[1] * x[1] - s * x[0]]
        };
        let w = |c: usize, x: Point| (x[0] + 2.0 * c as f64).sin() * x[1].exp();
        let r = residual_r(v, w, &mesh, k, &interval_rule(20));
        assert!(r.abs() < 1e-13, "{r}");
    }
}
