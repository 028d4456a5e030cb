//! Grundmann–Möller quadrature on the standard `n`-simplex
//! `{t : t_i >= 0, sum t_i <= 1}`.
//!
//! The rule of order `s` integrates polynomials of total degree `2s + 1`
//! exactly. Weights sum to the simplex volume `1/n!`.

use crate::numeric::factorial;

/// Nodes (in standard-simplex coordinates) and weights of one rule.
#[derive(Debug, Clone)]
pub struct SimplexRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SimplexRule {
    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Grundmann–Möller rule of order `s` on the standard `n`-simplex.
pub fn grundmann_moeller(n: usize, s: usize) -> SimplexRule {
    let d = 2 * s + 1; // polynomial degree of exactness
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=s {
        let denom_shift = (d + n - 2 * i) as f64;
        // (-1)^i 2^{-2s} (d + n - 2i)^d / (i! (d + n - i)!)
        let mut w = 0.25_f64.powi(s as i32) * denom_shift.powi(d as i32);
        w /= factorial(i) as f64 * factorial(d + n - i) as f64;
        if i % 2 == 1 {
            w = -w;
        }
        // β runs over the n+1 barycentric slots; dropping the first
        // barycentric coordinate gives standard-simplex coordinates
        for beta in compositions(s - i, n + 1) {
            points.push(
                beta[1..]
                    .iter()
                    .map(|&b| (2 * b + 1) as f64 / denom_shift)
                    .collect(),
            );
            weights.push(w);
        }
    }
    SimplexRule { points, weights }
}

/// All nonnegative integer `parts`-tuples summing to `total`, in
/// deterministic lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; parts];
    fill(total, 0, &mut current, &mut out);
    out
}

fn fill(remaining: usize, slot: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if slot == current.len() - 1 {
        current[slot] = remaining;
        out.push(current.clone());
        return;
    }
    for v in 0..=remaining {
        current[slot] = v;
        fill(remaining - v, slot + 1, current, out);
    }
}
