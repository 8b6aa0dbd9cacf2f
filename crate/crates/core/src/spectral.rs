//! Chebyshev series on [-1, 1]: Lobatto nodes, Clenshaw–Curtis weights,
//! coefficient recovery from samples, and term-by-term calculus.

use std::f64::consts::PI;

/// Chebyshev–Gauss–Lobatto nodes on [-1, 1] in ascending order,
/// `x_j = -cos(pi j / n)` for `j = 0..=n`.
pub fn lobatto_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 1, "need at least two nodes");
    (0..=n)
        .map(|j| {
            // exact endpoints and an exactly symmetric midpoint
            if j == 0 {
                -1.0
            } else if j == n {
                1.0
            } else if 2 * j == n {
                0.0
            } else {
                -(PI * j as f64 / n as f64).cos()
            }
        })
        .collect()
}

/// Clenshaw–Curtis quadrature weights matching [`lobatto_nodes`].
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    assert!(n >= 1);
    let nf = n as f64;
    let mut w = vec![0.0; n + 1];
    if n == 1 {
        return vec![1.0, 1.0];
    }
    let mut v = vec![1.0; n - 1];
    if n.is_multiple_of(2) {
        w[0] = 1.0 / (nf * nf - 1.0);
        w[n] = w[0];
        for k in 1..n / 2 {
            let kf = k as f64;
            for (i, vi) in v.iter_mut().enumerate() {
                let theta = PI * (i + 1) as f64 / nf;
                *vi -= 2.0 * (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for (i, vi) in v.iter_mut().enumerate() {
            let theta = PI * (i + 1) as f64 / nf;
            *vi -= (nf * theta).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        w[n] = w[0];
        for k in 1..=(n - 1) / 2 {
            let kf = k as f64;
            for (i, vi) in v.iter_mut().enumerate() {
                let theta = PI * (i + 1) as f64 / nf;
                *vi -= 2.0 * (2.0 * kf * theta).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for (i, vi) in v.iter().enumerate() {
        w[i + 1] = 2.0 * vi / nf;
    }
    w
}

/// A truncated Chebyshev expansion `f(x) = sum_k c_k T_k(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<f64>,
}

impl ChebSeries {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    /// Interpolant through samples taken at the ascending Lobatto nodes
    /// (`values.len() == n + 1`).
    pub fn from_lobatto_samples(values: &[f64]) -> Self {
        assert!(values.len() >= 2, "need at least two samples");
        let n = values.len() - 1;
        let nf = n as f64;
        // descending-node ordering: f_j = f(cos(pi j / n)) = values[n - j]
        let f = |j: usize| values[n - j];
        let mut coeffs = vec![0.0; n + 1];
        for (k, ck) in coeffs.iter_mut().enumerate() {
            let mut s = 0.5 * (f(0) + f(n) * if k % 2 == 0 { 1.0 } else { -1.0 });
            for j in 1..n {
                s += f(j) * (PI * (j * k % (2 * n)) as f64 / nf).cos();
            }
            *ck = 2.0 * s / nf;
        }
        coeffs[0] *= 0.5;
        coeffs[n] *= 0.5;
        Self { coeffs }
    }

    /// Drops trailing coefficients below `rel_tol * max |c_k|`. Roundoff in the tail is
    /// amplified roughly by `k^2` per differentiation, so sampled data is chopped first.
    pub fn chopped(mut self, rel_tol: f64) -> Self {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let keep = self
            .coeffs
            .iter()
            .rposition(|c| c.abs() > rel_tol * scale)
            .map_or(1, |i| i + 1);
        self.coeffs.truncate(keep);
        self
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, x: f64) -> f64 {
        let c = &self.coeffs;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &ck in c.iter().skip(1).rev() {
            let b0 = ck + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        c[0] + x * b1 - b2
    }

    pub fn derivative(&self) -> Self {
        let n = self.degree();
        if n == 0 {
            return Self::new(vec![0.0]);
        }
        let c = &self.coeffs;
        let mut d = vec![0.0; n + 1];
        for k in (1..=n).rev() {
            let next = if k < n { d[k + 1] } else { 0.0 };
            d[k - 1] = next + 2.0 * k as f64 * c[k];
        }
        d[0] *= 0.5;
        d.truncate(n);
        Self::new(d)
    }

    /// Antiderivative normalized to vanish at x = -1.
    pub fn antiderivative(&self) -> Self {
        let c = &self.coeffs;
        let n = self.degree();
        let get = |k: usize| if k <= n { c[k] } else { 0.0 };
        let mut a = vec![0.0; n + 2];
        a[1] = get(0) - 0.5 * get(2);
        for (k, ak) in a.iter_mut().enumerate().skip(2) {
            *ak = (get(k - 1) - get(k + 1)) / (2.0 * k as f64);
        }
        // T_k(-1) = (-1)^k
        let at_minus_one: f64 = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, ak)| if k % 2 == 0 { *ak } else { -*ak })
            .sum();
        a[0] = -at_minus_one;
        Self::new(a)
    }
}
