//! Exact solutions used for verification.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{HdgError, Result};
use crate::mesh::Point;

/// Polynomial in two variables, stored as `(coefficient, a, b)` terms of
/// `c x^a y^b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(f64, usize, usize)>,
}

impl Polynomial {
    pub fn degree(&self) -> usize {
        self.terms.iter().map(|&(_, a, b)| a + b).max().unwrap_or(0)
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.terms
            .iter()
            .map(|&(c, a, b)| c * x[0].powi(a as i32) * x[1].powi(b as i32))
            .sum()
    }

    pub fn grad(&self, x: Point) -> [f64; 2] {
        self.terms.iter().fold([0.0, 0.0], |g, &(c, a, b)| {
            let dx = if a > 0 {
                c * a as f64 * x[0].powi(a as i32 - 1) * x[1].powi(b as i32)
            } else {
                0.0
            };
            let dy = if b > 0 {
                c * b as f64 * x[0].powi(a as i32) * x[1].powi(b as i32 - 1)
            } else {
                0.0
            };
            [g[0] + dx, g[1] + dy]
        })
    }

    pub fn laplacian(&self, x: Point) -> f64 {
        self.terms
            .iter()
            .map(|&(c, a, b)| {
                let mut s = 0.0;
                if a > 1 {
                    s += c * (a * (a - 1)) as f64 * x[0].powi(a as i32 - 2) * x[1].powi(b as i32);
                }
                if b > 1 {
                    s += c * (b * (b - 1)) as f64 * x[0].powi(a as i32) * x[1].powi(b as i32 - 2);
                }
                s
            })
            .sum()
    }

    /// A fixed polynomial with every monomial of total degree <= `degree`
    /// present.
    pub fn patch(degree: usize) -> Self {
        let terms = (0..=degree)
            .flat_map(|d| (0..=d).map(move |b| (d - b, b)))
            .map(|(a, b)| {
                let sign = if (a + 2 * b) % 3 == 1 { -1.0 } else { 1.0 };
                (sign / (1 + a + 2 * b) as f64, a, b)
            })
            .collect();
        Self { terms }
    }
}

/// Model problem `-Δu = f` with `u = g` on the boundary and `q = -∇u`.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    /// `u = sin(πx) sin(πy)`, `f = 2π² u`, `g = 0`.
    SinSin,
    /// Global polynomial solution with matching Dirichlet data.
    Patch(Polynomial),
}

impl Problem {
    pub fn u(&self, x: Point) -> f64 {
        match self {
            Problem::SinSin => (PI * x[0]).sin() * (PI * x[1]).sin(),
            Problem::Patch(p) => p.eval(x),
        }
    }

    pub fn q(&self, x: Point) -> [f64; 2] {
        match self {
            Problem::SinSin => {
                let (sx, cx) = (PI * x[0]).sin_cos();
                let (sy, cy) = (PI * x[1]).sin_cos();
                [-PI * cx * sy, -PI * sx * cy]
            }
            Problem::Patch(p) => {
                let g = p.grad(x);
                [-g[0], -g[1]]
            }
        }
    }

    pub fn f(&self, x: Point) -> f64 {
        match self {
            Problem::SinSin => 2.0 * PI * PI * self.u(x),
            Problem::Patch(p) => -p.laplacian(x),
        }
    }

    pub fn g(&self, x: Point) -> f64 {
        match self {
            Problem::SinSin => 0.0,
            Problem::Patch(p) => p.eval(x),
        }
    }
}

impl FromStr for Problem {
    type Err = HdgError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "paper-sin" {
            return Ok(Problem::SinSin);
        }
        if let Some(d) = s.strip_prefix("patch:") {
            let degree: usize = d
                .parse()
                .map_err(|_| HdgError::InvalidConfig(format!("bad patch degree in `{s}`")))?;
            return Ok(Problem::Patch(Polynomial::patch(degree)));
        }
        Err(HdgError::InvalidConfig(format!("unknown problem `{s}`")))
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::SinSin => f.write_str("paper-sin"),
            Problem::Patch(p) => write!(f, "patch:{}", p.degree()),
        }
    }
}
