//! Gauss rules on the reference interval [0, 1] and the reference triangle
//! {(0,0), (1,0), (0,1)}.

use nalgebra::{DMatrix, SymmetricEigen};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

pub type IntervalRule = QuadRule<f64>;
pub type TriangleRule = QuadRule<[f64; 2]>;

impl<P: Copy> QuadRule<P> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (P, f64)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(P) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// Gauss–Jacobi nodes and weights on [-1, 1] for the weight
/// (1 - x)^alpha (1 + x)^beta, via the Golub–Welsch eigenproblem.
fn gauss_jacobi(m: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let diag = |n: usize| -> f64 {
        let n = n as f64;
        if n == 0.0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * n + ab) * (2.0 * n + ab + 2.0))
        }
    };
    let off = |n: usize| -> f64 {
        // coupling between rows n-1 and n, n >= 1
        let n = n as f64;
        let s = 2.0 * n + ab;
        (4.0 * n * (n + alpha) * (n + beta) * (n + ab) / (s * s * (s + 1.0) * (s - 1.0))).sqrt()
    };
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        jac[(i, i)] = diag(i);
        if i + 1 < m {
            let b = off(i + 1);
            jac[(i, i + 1)] = b;
            jac[(i + 1, i)] = b;
        }
    }
    let mu0 = 2f64.powf(ab + 1.0) * gamma_ratio(alpha, beta);
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Gamma(a+1) Gamma(b+1) / Gamma(a+b+2) for non-negative integer a, b.
fn gamma_ratio(alpha: f64, beta: f64) -> f64 {
    let fact = |n: f64| -> f64 { (1..=n as u64).map(|i| i as f64).product() };
    fact(alpha) * fact(beta) / fact(alpha + beta + 1.0)
}

fn points_for(exactness: usize) -> usize {
    exactness / 2 + 1
}

/// Gauss–Legendre rule on [0, 1] exact for polynomials of degree `exactness`.
pub fn interval_rule(exactness: usize) -> IntervalRule {
    let (x, w) = gauss_jacobi(points_for(exactness), 0.0, 0.0);
    QuadRule {
        points: x.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        weights: w.iter().map(|w| 0.5 * w).collect(),
        exactness,
    }
}

/// Collapsed (Duffy) tensor rule on the reference triangle:
/// (x, y) = (s, (1 - s) t) with Gauss–Jacobi(1, 0) in `s` and Gauss–Legendre
/// in `t`.
pub fn triangle_rule(exactness: usize) -> TriangleRule {
    let m = points_for(exactness);
    let (xs, ws) = gauss_jacobi(m, 1.0, 0.0);
    let line = interval_rule(exactness);
    let mut points = Vec::with_capacity(m * m);
    let mut weights = Vec::with_capacity(m * m);
    for (x, w) in xs.iter().zip(&ws) {
        let s = 0.5 * (x + 1.0);
        // dx = 2 ds and (1 - x) = 2 (1 - s)
        let ws = 0.25 * w;
        for (t, wt) in line.iter() {
            points.push([s, (1.0 - s) * t]);
            weights.push(ws * wt);
        }
    }
    QuadRule {
        points,
        weights,
        exactness,
    }
}

/// Exact integral of x^p y^q over the reference triangle: p! q! / (p+q+2)!.
pub fn triangle_monomial_integral(p: usize, q: usize) -> f64 {
    let fact = |n: usize| -> f64 { (1..=n).map(|i| i as f64).product() };
    fact(p) * fact(q) / fact(p + q + 2)
}
