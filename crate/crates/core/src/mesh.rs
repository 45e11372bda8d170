//! Conforming triangulations of the unit square.
//!
//! Local face `f` of a cell is the edge opposite its local vertex `f`, i.e.
//! the edge from `cell[(f + 1) % 3]` to `cell[(f + 2) % 3]`. Every face stores
//! its vertex pair with the lower global index first; that vertex is the
//! origin of the face parameterization `t in [0, 1]` used by all trace
//! quantities. The global normal of an interior face points out of the
//! lower-indexed adjacent cell; boundary normals point out of the domain.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{HdgError, Result};

pub type Point = [f64; 2];

const COORD_TOL: f64 = 1e-12;

/// One cell's view of a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceSide {
    pub cell: usize,
    pub local: usize,
    /// +1 if the global normal is the outward normal of `cell`, -1 otherwise.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    /// Vertex pair, lower index first.
    pub vertices: [usize; 2],
    pub normal: Point,
    pub length: f64,
    pub boundary: bool,
    pub sides: Vec<FaceSide>,
}

impl Face {
    pub fn point_at(&self, mesh: &Mesh, t: f64) -> Point {
        let a = mesh.vertices[self.vertices[0]];
        let b = mesh.vertices[self.vertices[1]];
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counter-clockwise vertex triples.
    pub cells: Vec<[usize; 3]>,
    pub faces: Vec<Face>,
    /// Global face index of each local face.
    pub cell_faces: Vec<[usize; 3]>,
    pub h_global: f64,
}

/// Affine map from the reference triangle {(0,0),(1,0),(0,1)} onto a cell.
#[derive(Clone, Copy, Debug)]
pub struct CellGeometry {
    pub origin: Point,
    /// Columns are the edge vectors `p1 - p0` and `p2 - p0`.
    pub jacobian: [[f64; 2]; 2],
    pub inverse: [[f64; 2]; 2],
    pub det: f64,
}

impl CellGeometry {
    pub fn new(p: [Point; 3]) -> Self {
        let jacobian = [
            [p[1][0] - p[0][0], p[2][0] - p[0][0]],
            [p[1][1] - p[0][1], p[2][1] - p[0][1]],
        ];
        let det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
        let inverse = [
            [jacobian[1][1] / det, -jacobian[0][1] / det],
            [-jacobian[1][0] / det, jacobian[0][0] / det],
        ];
        Self {
            origin: p[0],
            jacobian,
            inverse,
            det,
        }
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det.abs()
    }

    pub fn to_physical(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    pub fn to_reference(&self, x: Point) -> Point {
        let d = [x[0] - self.origin[0], x[1] - self.origin[1]];
        let m = &self.inverse;
        [
            m[0][0] * d[0] + m[0][1] * d[1],
            m[1][0] * d[0] + m[1][1] * d[1],
        ]
    }

    /// Chain rule: physical gradient = J^{-T} * reference gradient.
    pub fn physical_gradient(&self, g: Point) -> Point {
        let m = &self.inverse;
        [
            m[0][0] * g[0] + m[1][0] * g[1],
            m[0][1] * g[0] + m[1][1] * g[1],
        ]
    }
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    /// Uniform `n x n` grid of squares, each split along the diagonal from
    /// its lower-left to its upper-right corner.
    pub fn generate_structured(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(HdgError::InvalidMesh("n must be at least 1".into()));
        }
        let np = n + 1;
        let hs = 1.0 / n as f64;
        let mut vertices = Vec::with_capacity(np * np);
        for j in 0..np {
            for i in 0..np {
                let x = if i == n { 1.0 } else { i as f64 * hs };
                let y = if j == n { 1.0 } else { j as f64 * hs };
                vertices.push([x, y]);
            }
        }
        let mut cells = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let v00 = j * np + i;
                let v10 = v00 + 1;
                let v01 = v00 + np;
                let v11 = v01 + 1;
                cells.push([v00, v10, v11]);
                cells.push([v00, v11, v01]);
            }
        }
        Self::build_connectivity(vertices, cells)
    }

    /// Deduplicate faces and populate adjacency, normals and boundary flags.
    /// Clockwise cells are re-oriented.
    pub fn build_connectivity(vertices: Vec<Point>, mut cells: Vec<[usize; 3]>) -> Result<Self> {
        if cells.is_empty() {
            return Err(HdgError::InvalidMesh("no cells".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            let inside = v
                .iter()
                .all(|c| c.is_finite() && *c >= -COORD_TOL && *c <= 1.0 + COORD_TOL);
            if !inside {
                return Err(HdgError::InvalidMesh(format!(
                    "vertex {i} ({}, {}) lies outside the unit square",
                    v[0], v[1]
                )));
            }
        }
        for (c, cell) in cells.iter_mut().enumerate() {
            if let Some(&bad) = cell.iter().find(|&&v| v >= vertices.len()) {
                return Err(HdgError::InvalidMesh(format!(
                    "cell {c} references vertex {bad}, only {} vertices",
                    vertices.len()
                )));
            }
            let area = signed_area(vertices[cell[0]], vertices[cell[1]], vertices[cell[2]]);
            if area.abs() <= 1e-14 {
                return Err(HdgError::InvalidMesh(format!("cell {c} is degenerate")));
            }
            if area < 0.0 {
                cell.swap(1, 2);
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut faces: Vec<Face> = Vec::new();
        let mut cell_faces = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let mut local_faces = [0usize; 3];
            for (f, slot) in local_faces.iter_mut().enumerate() {
                let a = cell[(f + 1) % 3];
                let b = cell[(f + 2) % 3];
                let key = (a.min(b), a.max(b));
                let id = *lookup.entry(key).or_insert_with(|| {
                    let pa = vertices[a];
                    let pb = vertices[b];
                    let length = dist(pa, pb);
                    // outward normal of an edge traversed counter-clockwise
                    let normal = [(pb[1] - pa[1]) / length, -(pb[0] - pa[0]) / length];
                    faces.push(Face {
                        vertices: [key.0, key.1],
                        normal,
                        length,
                        boundary: false,
                        sides: Vec::with_capacity(2),
                    });
                    faces.len() - 1
                });
                let face = &mut faces[id];
                let sign = if face.sides.is_empty() { 1 } else { -1 };
                face.sides.push(FaceSide {
                    cell: c,
                    local: f,
                    sign,
                });
                if face.sides.len() > 2 {
                    return Err(HdgError::InvalidMesh(format!(
                        "face ({}, {}) is shared by more than two cells",
                        key.0, key.1
                    )));
                }
                *slot = id;
            }
            cell_faces.push(local_faces);
        }
        for face in faces.iter_mut() {
            face.boundary = face.sides.len() == 1;
        }

        // A hanging vertex shows up as a vertex lying inside a face that only
        // one cell sees.
        for face in faces.iter().filter(|f| f.boundary) {
            let a = vertices[face.vertices[0]];
            let b = vertices[face.vertices[1]];
            for (i, &p) in vertices.iter().enumerate() {
                if face.vertices.contains(&i) {
                    continue;
                }
                let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                if cross.abs() > 1e-12 * face.length {
                    continue;
                }
                let t = ((p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]))
                    / (face.length * face.length);
                if t > 1e-12 && t < 1.0 - 1e-12 {
                    return Err(HdgError::InvalidMesh(format!(
                        "hanging vertex {i} on face ({}, {})",
                        face.vertices[0], face.vertices[1]
                    )));
                }
            }
        }

        let h_global = cells
            .iter()
            .map(|c| {
                let p = [vertices[c[0]], vertices[c[1]], vertices[c[2]]];
                dist(p[0], p[1]).max(dist(p[1], p[2])).max(dist(p[2], p[0]))
            })
            .fold(0.0, f64::max);

        Ok(Self {
            vertices,
            cells,
            faces,
            cell_faces,
            h_global,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_interior_faces(&self) -> usize {
        self.faces.iter().filter(|f| !f.boundary).count()
    }

    pub fn cell_points(&self, cell: usize) -> [Point; 3] {
        let c = self.cells[cell];
        [
            self.vertices[c[0]],
            self.vertices[c[1]],
            self.vertices[c[2]],
        ]
    }

    pub fn geometry(&self, cell: usize) -> CellGeometry {
        CellGeometry::new(self.cell_points(cell))
    }

    /// Outward unit normal of `cell` on its local face.
    pub fn outward_normal(&self, cell: usize, local: usize) -> Point {
        let face = &self.faces[self.cell_faces[cell][local]];
        let side = face
            .sides
            .iter()
            .find(|s| s.cell == cell)
            .expect("cell adjacent to its own face");
        let s = f64::from(side.sign);
        [s * face.normal[0], s * face.normal[1]]
    }

    /// Parse the plain-text format: a header `V C`, then `V` lines `x y`,
    /// then `C` lines `i j k` with 0-based vertex indices.
    ///
    /// The importer does not check shape regularity; callers supplying mesh
    /// families for convergence studies are responsible for it.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, msg: &str| HdgError::MeshParse {
            line,
            msg: msg.to_string(),
        };
        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let counts: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(hl, "expected `V C`")))
            .collect::<Result<_>>()?;
        let [nv, nc] = counts[..] else {
            return Err(parse_err(hl, "expected `V C`"));
        };
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| parse_err(hl, "too few vertex lines"))?;
            let xs: Vec<f64> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(ln, "expected `x y`")))
                .collect::<Result<_>>()?;
            let [x, y] = xs[..] else {
                return Err(parse_err(ln, "expected `x y`"));
            };
            vertices.push([x, y]);
        }
        let mut cells = Vec::with_capacity(nc);
        for _ in 0..nc {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| parse_err(hl, "too few cell lines"))?;
            let ids: Vec<usize> = l
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| parse_err(ln, "expected `i j k`")))
                .collect::<Result<_>>()?;
            let [i, j, k] = ids[..] else {
                return Err(parse_err(ln, "expected `i j k`"));
            };
            cells.push([i, j, k]);
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse_err(ln, "trailing content"));
        }
        Self::build_connectivity(vertices, cells)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.vertices.len(), self.cells.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:?} {:?}", v[0], v[1]);
        }
        for c in &self.cells {
            let _ = writeln!(s, "{} {} {}", c[0], c[1], c[2]);
        }
        s
    }
}
