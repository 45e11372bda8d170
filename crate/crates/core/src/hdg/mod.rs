//! Hybridizable DG discretization of `q + grad u = 0`, `div q = f`,
//! `u = g` on the boundary.
//!
//! The three variants share one bilinear form
//!
//! ```text
//! B = (q, v) + b(u, uhat; v) - b(w, mu; q) + tau <J2(u, uhat), J2(w, mu)>
//! b(u, uhat; v) = (grad u, v)_K - <J1(u, uhat), v.n>_dK
//! ```
//!
//! and differ only in the jumps:
//!
//! | variant | J1          | J2          |
//! |---------|-------------|-------------|
//! | STD     | u - uhat    | u - uhat    |
//! | LS      | u - uhat    | P_M u - uhat|
//! | PROJ    | P_M u - uhat| P_M u - uhat|
//!
//! Local unknowns are ordered q (x component, then y), u, then uhat on the
//! three local faces.

mod assembly;
mod local;
mod monolithic;
mod solver;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::basis::{CellBasis, FaceBasis};
use crate::error::{HdgError, Result};
use crate::mesh::Mesh;
use crate::quadrature::{interval_rule, triangle_rule, IntervalRule, TriangleRule};

pub use assembly::{assemble, cholesky_solve, solve_trace, DofMap, TraceSystem};
pub use local::{condense_local, local_matrices, Condensed, LocalSystem, Recovery};
pub use monolithic::{
    monolithic_system, solve_monolithic, MonolithicSystem, MONOLITHIC_CELL_LIMIT,
};
pub use solver::{flux_residual, solve, Solution};

/// Largest supported degree of the vector space, `k + l`.
pub const MAX_VECTOR_DEGREE: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodVariant {
    Std,
    Ls,
    Proj,
}

impl MethodVariant {
    pub const ALL: [MethodVariant; 3] =
        [MethodVariant::Std, MethodVariant::Ls, MethodVariant::Proj];

    /// Whether the coupling jump uses `P_M u`.
    pub fn projects_coupling(self) -> bool {
        matches!(self, MethodVariant::Proj)
    }

    /// Whether the stabilization jump uses `P_M u`.
    pub fn projects_stabilization(self) -> bool {
        !matches!(self, MethodVariant::Std)
    }
}

impl fmt::Display for MethodVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MethodVariant::Std => "STD",
            MethodVariant::Ls => "LS",
            MethodVariant::Proj => "PROJ",
        })
    }
}

impl FromStr for MethodVariant {
    type Err = HdgError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "std" => Ok(MethodVariant::Std),
            "ls" => Ok(MethodVariant::Ls),
            "proj" => Ok(MethodVariant::Proj),
            _ => Err(HdgError::InvalidConfig(format!(
                "unknown method variant `{s}`"
            ))),
        }
    }
}

/// Degrees: vector space P_{k+l}, scalar space P_{k+1}, trace space P_k.
/// `tau = tau_coeff / h_global`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationConfig {
    pub k: usize,
    pub l: usize,
    pub tau_coeff: f64,
    /// Overrides the default quadrature exactness `2 max(k+l, k+2) + 3`.
    pub quad_exactness: Option<usize>,
}

impl DiscretizationConfig {
    pub fn new(k: usize, l: usize) -> Self {
        Self {
            k,
            l,
            tau_coeff: 1.0,
            quad_exactness: None,
        }
    }

    pub fn with_tau_coeff(mut self, c: f64) -> Self {
        self.tau_coeff = c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_coeff.is_finite() && self.tau_coeff > 0.0) {
            return Err(HdgError::InvalidConfig(format!(
                "tau coefficient must be positive, got {}",
                self.tau_coeff
            )));
        }
        if self.k + self.l > MAX_VECTOR_DEGREE || self.k + 1 > MAX_VECTOR_DEGREE {
            return Err(HdgError::InvalidConfig(format!(
                "degrees k={} l={} exceed the supported range (k + l <= {MAX_VECTOR_DEGREE})",
                self.k, self.l
            )));
        }
        if let Some(e) = self.quad_exactness {
            if e < self.min_exactness() {
                return Err(HdgError::InvalidConfig(format!(
                    "quadrature exactness {e} below the bilinear-form degree {}",
                    self.min_exactness()
                )));
            }
        }
        Ok(())
    }

    pub fn vector_degree(&self) -> usize {
        self.k + self.l
    }

    pub fn scalar_degree(&self) -> usize {
        self.k + 1
    }

    pub fn trace_degree(&self) -> usize {
        self.k
    }

    fn min_exactness(&self) -> usize {
        2 * self.vector_degree().max(self.scalar_degree())
    }

    pub fn exactness(&self) -> usize {
        self.quad_exactness
            .unwrap_or(2 * self.vector_degree().max(self.k + 2) + 3)
    }

    pub fn tau(&self, mesh: &Mesh) -> f64 {
        self.tau_coeff / mesh.h_global
    }
}

/// Bases and quadrature rules shared by every cell of one discretization.
#[derive(Clone, Debug)]
pub struct Spaces {
    pub vector: CellBasis,
    pub scalar: CellBasis,
    pub trace: FaceBasis,
    pub cell_rule: TriangleRule,
    pub face_rule: IntervalRule,
}

impl Spaces {
    pub fn new(config: &DiscretizationConfig) -> Self {
        let e = config.exactness();
        Self {
            vector: CellBasis::new(config.vector_degree()),
            scalar: CellBasis::new(config.scalar_degree()),
            trace: FaceBasis::new(config.trace_degree()),
            cell_rule: triangle_rule(e),
            face_rule: interval_rule(e),
        }
    }

    pub fn vector_dofs(&self) -> usize {
        2 * self.vector.dim()
    }

    pub fn scalar_dofs(&self) -> usize {
        self.scalar.dim()
    }

    pub fn face_dofs(&self) -> usize {
        self.trace.dim()
    }

    pub fn local_trace_dofs(&self) -> usize {
        3 * self.trace.dim()
    }
}
