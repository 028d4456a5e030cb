//! The built-in cochain library.
//!
//! Conventions: differential forms are evaluation callbacks in the
//! antisymmetrization wedge convention (the standard volume form gives
//! `1/n!` on the standard basis), so the hull cocycle of the constant
//! volume form coincides with [`det_volume`].

use std::sync::Arc;

use super::quadrature::grundmann_moeller;
use super::{Cochain, CochainError, FieldFn, FormFn, ScalarFn, SymmetryTag};
use crate::numeric::{edge_det, factorial, gram_volume};
use crate::rng;

/// `Ω(x_0..x_n) = f(x_0) · det[x_1−x_0, …, x_n−x_0] / n!` — the left
/// Riemann-sum cochain of the form `f dx^1∧…∧dx^n` on `R^n`.
pub fn left_riemann(n: usize, f: FieldFn) -> Cochain {
    Cochain::from_fn(n, n, f64::INFINITY, SymmetryTag::None, true, move |t| {
        f(t[0]) * edge_det(t) / factorial(t.len() - 1) as f64
    })
}

/// `Ω(x_0..x_n) = det[x_1−x_0, …, x_n−x_0] / n!` — the simplex volume
/// cochain, a completely antisymmetric cocycle with `VE(Ω)` the volume form.
pub fn det_volume(n: usize) -> Cochain {
    Cochain::from_fn(
        n,
        n,
        f64::INFINITY,
        SymmetryTag::CompletelyAntisymmetric,
        true,
        move |t| edge_det(t) / factorial(t.len() - 1) as f64,
    )
}

/// `Ω(x, y) = F(y) − F(x)` — the coboundary of the 0-cochain `F`; summing it
/// over any partition telescopes, which is the one-line FTC.
pub fn antiderivative(big_f: ScalarFn) -> Cochain {
    Cochain::from_fn(
        1,
        1,
        f64::INFINITY,
        SymmetryTag::CompletelyAntisymmetric,
        true,
        move |t| big_f(t[1][0]) - big_f(t[0][0]),
    )
}

/// Top-degree form `c(p) · dx^1∧…∧dx^n` as a callback.
pub fn scalar_top_form(n: usize, c: FieldFn) -> FormFn {
    let nfact = factorial(n) as f64;
    Arc::new(move |p: &[f64], vectors: &[&[f64]]| {
        let rows: Vec<Vec<f64>> = vectors.iter().map(|v| v.to_vec()).collect();
        c(p) * crate::numeric::det(&rows) / nfact
    })
}

/// Constant-coefficient 2-form `Σ c · dx_i∧dx_j` in any ambient dimension.
pub fn constant_two_form(terms: Vec<(usize, usize, f64)>) -> FormFn {
    Arc::new(move |_p: &[f64], v: &[&[f64]]| {
        terms
            .iter()
            .map(|&(i, j, c)| 0.5 * c * (v[0][i] * v[1][j] - v[0][j] * v[1][i]))
            .sum()
    })
}

/// `Ω(x_0..x_n) = ∫ over the oriented convex hull of the tuple of the form
/// `omega`, by Grundmann–Möller quadrature of the given order (exact for
/// polynomial integrands of degree `2·order + 1`). Degenerate hulls evaluate
/// to zero. For closed `omega` this is a completely antisymmetric cocycle.
pub fn convex_hull_cocycle(
    degree: usize,
    ambient: usize,
    omega: FormFn,
    order: usize,
) -> Result<Cochain, CochainError> {
    if degree == 0 || degree > ambient {
        return Err(CochainError::InvalidParameter(format!(
            "hull cocycle needs 1 <= degree <= ambient, got degree {degree} in R^{ambient}"
        )));
    }
    let rule = grundmann_moeller(degree, order);
    let nfact = factorial(degree) as f64;
    Ok(Cochain::from_fn(
        degree,
        ambient,
        f64::INFINITY,
        SymmetryTag::CompletelyAntisymmetric,
        true,
        move |t| {
            let x0 = t[0];
            let edges: Vec<Vec<f64>> = (1..t.len())
                .map(|i| t[i].iter().zip(x0).map(|(a, b)| a - b).collect())
                .collect();
            let scale = edges
                .iter()
                .map(|e| e.iter().map(|c| c * c).sum::<f64>().sqrt())
                .fold(0.0, f64::max);
            if scale == 0.0 {
                return 0.0;
            }
            let vol = gram_volume(t);
            if vol <= 1e-13 * scale.powi(degree as i32) {
                return 0.0;
            }
            let edge_refs: Vec<&[f64]> = edges.iter().map(|e| e.as_slice()).collect();
            let mut point = vec![0.0; x0.len()];
            let mut acc = 0.0;
            for (node, w) in rule.points.iter().zip(&rule.weights) {
                for (c, p) in point.iter_mut().zip(x0) {
                    *c = *p;
                }
                for (tj, e) in node.iter().zip(&edges) {
                    for (c, ec) in point.iter_mut().zip(e) {
                        *c += tj * ec;
                    }
                }
                acc += w * omega(&point, &edge_refs);
            }
            nfact * acc
        },
    ))
}

/// The Dirac cochain at `m`: 1 when every tuple entry equals `m` exactly,
/// 0 otherwise. Completely symmetric and deliberately not normalized; its
/// Riemann-like sum picks out the degenerate simplex sitting at `m`.
pub fn dirac(m: Vec<f64>, degree: usize) -> Cochain {
    let ambient = m.len();
    Cochain::from_fn(
        degree,
        ambient,
        f64::INFINITY,
        SymmetryTag::CompletelySymmetric,
        false,
        move |t| {
            if t.iter().all(|p| p.iter().zip(&m).all(|(a, b)| a == b)) {
                1.0
            } else {
                0.0
            }
        },
    )
}

/// The Euler cochain `Ω(x_0..x_n) = (−1)^{#distinct + 1}`. Summed once over
/// every face of a triangulation (including the degenerate ones) it counts
/// the Euler characteristic.
pub fn euler(degree: usize, ambient: usize) -> Cochain {
    Cochain::from_fn(
        degree,
        ambient,
        f64::INFINITY,
        SymmetryTag::CompletelySymmetric,
        false,
        move |t| {
            let mut distinct: Vec<&[f64]> = Vec::with_capacity(t.len());
            for p in t {
                if !distinct.iter().any(|q| q.iter().zip(*p).all(|(a, b)| a == b)) {
                    distinct.push(p);
                }
            }
            if (distinct.len() + 1) % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        },
    )
}

/// Measure cochain of the density `h`: `Ω(x_0..x_n) = ∫_hull h dVol`
/// (unsigned volume), completely symmetric and normalized.
pub fn density_measure(
    degree: usize,
    ambient: usize,
    h: FieldFn,
    order: usize,
) -> Result<Cochain, CochainError> {
    if degree == 0 || degree > ambient {
        return Err(CochainError::InvalidParameter(format!(
            "density measure needs 1 <= degree <= ambient, got degree {degree} in R^{ambient}"
        )));
    }
    let rule = grundmann_moeller(degree, order);
    let nfact = factorial(degree) as f64;
    Ok(Cochain::from_fn(
        degree,
        ambient,
        f64::INFINITY,
        SymmetryTag::CompletelySymmetric,
        true,
        move |t| {
            // hull volume is permutation invariant, as is the integrand
            let vol = gram_volume(t);
            if vol == 0.0 {
                return 0.0;
            }
            let x0 = t[0];
            let edges: Vec<Vec<f64>> = (1..t.len())
                .map(|i| t[i].iter().zip(x0).map(|(a, b)| a - b).collect())
                .collect();
            let mut point = vec![0.0; x0.len()];
            let mut acc = 0.0;
            for (node, w) in rule.points.iter().zip(&rule.weights) {
                for (c, p) in point.iter_mut().zip(x0) {
                    *c = *p;
                }
                for (tj, e) in node.iter().zip(&edges) {
                    for (c, ec) in point.iter_mut().zip(e) {
                        *c += tj * ec;
                    }
                }
                acc += w * h(&point);
            }
            // Σw = 1/n!; rescale so the weights average over the hull with
            // total mass vol
            acc * nfact * vol
        },
    ))
}

/// Winding cochain around `center` in the plane: the signed angle subtended
/// by the two points, i.e. the integral of `dθ` along the chord. Locality is
/// capped at chordal `√2` (a quarter turn on the unit circle) to keep the
/// angle branch unambiguous.
pub fn winding(center: Vec<f64>) -> Cochain {
    Cochain::from_fn(
        1,
        2,
        std::f64::consts::SQRT_2,
        SymmetryTag::CompletelyAntisymmetric,
        true,
        move |t| {
            let u = [t[0][0] - center[0], t[0][1] - center[1]];
            let v = [t[1][0] - center[0], t[1][1] - center[1]];
            if (u[0] == 0.0 && u[1] == 0.0) || (v[0] == 0.0 && v[1] == 0.0) {
                return f64::NAN;
            }
            let cross = u[0] * v[1] - u[1] * v[0];
            let dot = u[0] * v[0] + u[1] * v[1];
            cross.atan2(dot)
        },
    )
}

/// A smooth, bounded pseudo-random cochain (a short Fourier-style sum with
/// frequencies and phases drawn from the counter generator). Useful as raw
/// material for randomized identities; antisymmetrize for a random element
/// of the completely antisymmetric cochains.
pub fn random_fourier(seed: u64, degree: usize, ambient: usize) -> Cochain {
    let k = degree + 1;
    let n_terms = 3usize;
    let mut freqs = Vec::new();
    let mut phases = Vec::new();
    let mut amps = Vec::new();
    let mut counter = 0u64;
    let mut draw = |lo: f64, hi: f64| {
        counter += 1;
        rng::draw_uniform_in(seed, counter, lo, hi)
    };
    for _ in 0..n_terms {
        amps.push(draw(-1.0, 1.0));
        let mut fj = Vec::new();
        let mut pj = Vec::new();
        for _ in 0..k {
            for _ in 0..ambient {
                fj.push(draw(-1.5, 1.5));
                pj.push(draw(0.0, std::f64::consts::TAU));
            }
        }
        freqs.push(fj);
        phases.push(pj);
    }
    Cochain::from_fn(
        degree,
        ambient,
        f64::INFINITY,
        SymmetryTag::None,
        false,
        move |t| {
            let mut total = 0.0;
            for j in 0..n_terms {
                let mut prod = amps[j];
                for (slot, p) in t.iter().enumerate() {
                    for (c, x) in p.iter().enumerate() {
                        let idx = slot * p.len() + c;
                        prod *= (freqs[j][idx] * x + phases[j][idx]).sin();
                    }
                }
                total += prod;
            }
            total
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hull_cocycle_of_volume_form_is_det_volume() {
        let omega = convex_hull_cocycle(2, 2, scalar_top_form(2, Arc::new(|_: &[f64]| 1.0)), 0)
            .unwrap();
        let dv = det_volume(2);
        let pts = vec![vec![0.1, 0.2], vec![1.3, 0.4], vec![0.5, 1.9]];
        let a = omega.evaluate_points(&pts).unwrap();
        let b = dv.evaluate_points(&pts).unwrap();
        assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        // negatively oriented tuple
        let flipped = vec![pts[0].clone(), pts[2].clone(), pts[1].clone()];
        let c = omega.evaluate_points(&flipped).unwrap();
        assert!((c + b).abs() < 1e-13);
    }

    #[test]
    fn hull_cocycle_degenerate_tuple_is_zero() {
        let omega = convex_hull_cocycle(2, 2, scalar_top_form(2, Arc::new(|_: &[f64]| 1.0)), 2)
            .unwrap();
        let collinear = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
        assert_eq!(omega.evaluate_points(&collinear).unwrap(), 0.0);
    }

    #[test]
    fn hull_cocycle_is_closed_for_nonconstant_top_form() {
        let omega = convex_hull_cocycle(
            2,
            2,
            scalar_top_form(2, Arc::new(|p: &[f64]| 1.0 + p[0] + p[1] * p[1])),
            3,
        )
        .unwrap();
        let sampler =
            |i: u64| super::super::random_tuple(&[0.0, 0.0], 1.0, 4, rng::substream(77, i));
        let report = super::super::is_cocycle(&omega, sampler, 300, 1e-11).unwrap();
        assert!(report.pass, "max residual {}", report.max_residual);
    }

    #[test]
    fn density_measure_of_unit_density_is_volume() {
        let mu = density_measure(2, 2, Arc::new(|_: &[f64]| 1.0), 1).unwrap();
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 2.0]];
        assert!((mu.evaluate_points(&pts).unwrap() - 2.0).abs() < 1e-13);
        // order irrelevant
        let swapped = vec![pts[1].clone(), pts[0].clone(), pts[2].clone()];
        assert!((mu.evaluate_points(&swapped).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn density_measure_integrates_polynomials_exactly() {
        // ∫ over the standard triangle of x dA = 1/6
        let mu = density_measure(2, 2, Arc::new(|p: &[f64]| p[0]), 1).unwrap();
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!((mu.evaluate_points(&pts).unwrap() - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn winding_measures_subtended_angle() {
        let w = winding(vec![0.0, 0.0]);
        let quarter = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let v = w.evaluate_points(&quarter).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let reversed = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!((w.evaluate_points(&reversed).unwrap() + v).abs() < 1e-15);
    }

    #[test]
    fn dirac_hits_only_its_point() {
        let d = dirac(vec![0.5], 1);
        assert_eq!(
            d.evaluate_points(&vec![vec![0.5], vec![0.5]]).unwrap(),
            1.0
        );
        assert_eq!(
            d.evaluate_points(&vec![vec![0.5], vec![0.6]]).unwrap(),
            0.0
        );
    }
}
