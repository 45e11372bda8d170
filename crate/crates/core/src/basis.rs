//! Orthonormal polynomial bases on the reference triangle and interval.

use crate::quadrature::triangle_rule;

/// Shift applied to monomials before orthonormalization (the reference
/// centroid); it only improves conditioning, the span is unchanged.
const CENTER: f64 = 1.0 / 3.0;

/// Exponent pairs of P_degree in graded lexicographic order:
/// (0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...
pub fn monomial_exponents(degree: usize) -> Vec<(usize, usize)> {
    (0..=degree)
        .flat_map(|d| (0..=d).rev().map(move |a| (a, d - a)))
        .collect()
}

pub fn cell_dim(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// L2(reference triangle)-orthonormal basis of P_degree.
#[derive(Clone, Debug)]
pub struct CellBasis {
    degree: usize,
    exponents: Vec<(usize, usize)>,
    /// Row i holds the centered-monomial coefficients of basis function i.
    coeffs: Vec<Vec<f64>>,
}

impl CellBasis {
    pub fn new(degree: usize) -> Self {
        let exponents = monomial_exponents(degree);
        let dim = exponents.len();
        let rule = triangle_rule(2 * degree);
        let monomials: Vec<Vec<f64>> = exponents
            .iter()
            .map(|&(a, b)| {
                rule.points
                    .iter()
                    .map(|p| (p[0] - CENTER).powi(a as i32) * (p[1] - CENTER).powi(b as i32))
                    .collect()
            })
            .collect();
        let dot = |f: &[f64], g: &[f64]| -> f64 {
            rule.weights
                .iter()
                .zip(f.iter().zip(g))
                .map(|(w, (a, b))| w * a * b)
                .sum()
        };

        // Modified Gram–Schmidt, two passes per vector, on values at the
        // quadrature points; coefficients are carried alongside.
        let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(dim);
        let mut values: Vec<Vec<f64>> = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut c = vec![0.0; dim];
            c[i] = 1.0;
            let mut v = monomials[i].clone();
            for _pass in 0..2 {
                for j in 0..i {
                    let r = dot(&v, &values[j]);
                    for (vq, bq) in v.iter_mut().zip(&values[j]) {
                        *vq -= r * bq;
                    }
                    for (cm, bm) in c.iter_mut().zip(&coeffs[j]) {
                        *cm -= r * bm;
                    }
                }
            }
            let norm = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            c.iter_mut().for_each(|x| *x /= norm);
            values.push(v);
            coeffs.push(c);
        }
        Self {
            degree,
            exponents,
            coeffs,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    fn powers(&self, p: [f64; 2]) -> (Vec<f64>, Vec<f64>) {
        let x = p[0] - CENTER;
        let y = p[1] - CENTER;
        let mut px = vec![1.0; self.degree + 1];
        let mut py = vec![1.0; self.degree + 1];
        for i in 1..=self.degree {
            px[i] = px[i - 1] * x;
            py[i] = py[i - 1] * y;
        }
        (px, py)
    }

    pub fn eval_into(&self, p: [f64; 2], out: &mut [f64]) {
        let (px, py) = self.powers(p);
        let mono: Vec<f64> = self.exponents.iter().map(|&(a, b)| px[a] * py[b]).collect();
        for (o, c) in out.iter_mut().zip(&self.coeffs) {
            *o = c.iter().zip(&mono).map(|(c, m)| c * m).sum();
        }
    }

    pub fn eval(&self, p: [f64; 2]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(p, &mut out);
        out
    }

    /// Reference-coordinate gradients, one `[d/dx, d/dy]` per basis function.
    pub fn grad(&self, p: [f64; 2]) -> Vec<[f64; 2]> {
        let (px, py) = self.powers(p);
        let dmono: Vec<[f64; 2]> = self
            .exponents
            .iter()
            .map(|&(a, b)| {
                let dx = if a > 0 {
                    a as f64 * px[a - 1] * py[b]
                } else {
                    0.0
                };
                let dy = if b > 0 {
                    b as f64 * px[a] * py[b - 1]
                } else {
                    0.0
                };
                [dx, dy]
            })
            .collect();
        self.coeffs
            .iter()
            .map(|c| {
                c.iter().zip(&dmono).fold([0.0, 0.0], |acc, (c, d)| {
                    [acc[0] + c * d[0], acc[1] + c * d[1]]
                })
            })
            .collect()
    }
}

/// L2([0,1])-orthonormal basis of P_degree: sqrt(2n+1) P_n(2t - 1).
#[derive(Clone, Copy, Debug)]
pub struct FaceBasis {
    degree: usize,
}

impl FaceBasis {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let x = 2.0 * t - 1.0;
        let mut p_prev = 1.0;
        let mut p = x;
        for (n, o) in out.iter_mut().enumerate().take(self.dim()) {
            let pn = match n {
                0 => 1.0,
                1 => x,
                _ => {
                    let m = n as f64;
                    let next = ((2.0 * m - 1.0) * x * p - (m - 1.0) * p_prev) / m;
                    p_prev = p;
                    p = next;
                    next
                }
            };
            *o = (2.0 * n as f64 + 1.0).sqrt() * pn;
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, &mut out);
        out
    }
}
