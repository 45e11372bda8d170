//! Hybridizable discontinuous Galerkin solvers for the Poisson problem on
//! triangulations of the unit square.
//!
//! Three methods are provided: the standard HDG flux, the
//! Lehrenfeld–Schöberl flux (projected stabilization), and a variant that
//! applies the facet L2 projection in every facet integral, which keeps the
//! scalar variable superconvergent for any vector space P_{k+l}.

pub mod analysis;
pub mod basis;
pub mod error;
pub mod hdg;
pub mod mesh;
pub mod problem;
pub mod projection;
pub mod quadrature;
pub mod study;

pub use analysis::{error_report, observed_order, ErrorReport};
pub use error::{HdgError, Result};
pub use hdg::{DiscretizationConfig, MethodVariant, Solution};
pub use mesh::Mesh;
pub use problem::Problem;
