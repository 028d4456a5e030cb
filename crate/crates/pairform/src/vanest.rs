//! The van Est map: extracting differential-form data from cochains.
//!
//! For a degree-`n` cochain the van Est value on tangent vectors
//! `v_1, …, v_n` at `x` is the mixed first partial derivative of
//! `Ω(x, y_1, …, y_n)` with one `y_i` differentiated along each `v_i` at the
//! diagonal. For normalized even-invariant cochains this leading term is
//! automatically multilinear and antisymmetric, i.e. an `n`-form, and it is
//! the quantity whose integral the Riemann-like sums converge to.
//!
//! Everything here is finite differences: central stencils with one
//! Richardson extrapolation step (`h`, `h/2`), default step
//! `1e-3 · (1 + |x|)`. Expected accuracy is about `1e-4` relative; tests and
//! callers should budget tolerances accordingly.

use thiserror::Error;

use crate::cochain::{Cochain, CochainError};
use crate::numeric::{det, permutations_with_sign};

#[derive(Debug, Error)]
pub enum VanEstError {
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error("expected {expected} vectors, got {got}")]
    VectorCount { expected: usize, got: usize },
    #[error("vector has dimension {got}, expected {expected}")]
    VectorDim { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// One evaluation of the form extracted from a cochain.
#[derive(Debug, Clone)]
pub struct FormSample {
    pub basepoint: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub value: f64,
}

/// The two-jet data `f dx + g dx²` of a degree-1 cochain on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub f_val: f64,
    pub g_val: f64,
}

/// Default finite-difference step at `x`.
pub fn default_step(x: &[f64]) -> f64 {
    let norm = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    1e-3 * (1.0 + norm)
}

fn check_vectors(omega: &Cochain, vectors: &[Vec<f64>]) -> Result<(), VanEstError> {
    if vectors.len() != omega.degree() {
        return Err(VanEstError::VectorCount {
            expected: omega.degree(),
            got: vectors.len(),
        });
    }
    for v in vectors {
        if v.len() != omega.ambient_dim() {
            return Err(VanEstError::VectorDim {
                expected: omega.ambient_dim(),
                got: v.len(),
            });
        }
    }
    Ok(())
}

/// The `2^n`-point mixed central difference at step `h`, no extrapolation.
fn mixed_stencil(
    omega: &Cochain,
    x: &[f64],
    vectors: &[Vec<f64>],
    h: f64,
) -> Result<f64, VanEstError> {
    let n = vectors.len();
    if n == 0 {
        let tuple: Vec<&[f64]> = vec![x];
        return Ok(omega.evaluate(&tuple)?);
    }
    let mut acc = 0.0;
    let mut points: Vec<Vec<f64>> = vec![x.to_vec(); n];
    for mask in 0..(1usize << n) {
        let mut sign = 1.0;
        for (i, v) in vectors.iter().enumerate() {
            let eps = if mask & (1 << i) != 0 { 1.0 } else { -1.0 };
            if eps < 0.0 {
                sign = -sign;
            }
            for (c, (xc, vc)) in points[i].iter_mut().zip(x.iter().zip(v)) {
                *c = xc + eps * h * vc;
            }
        }
        let mut tuple: Vec<&[f64]> = Vec::with_capacity(n + 1);
        tuple.push(x);
        tuple.extend(points.iter().map(|p| p.as_slice()));
        acc += sign * omega.evaluate(&tuple)?;
    }
    Ok(acc / (2.0 * h).powi(n as i32))
}

/// Estimates `VE(Ω)(v_1..v_n)` at `x`: mixed first partials in each non-base
/// slot, one Richardson step. For a 0-cochain this is just `Ω(x)`.
pub fn van_est(
    omega: &Cochain,
    x: &[f64],
    vectors: &[Vec<f64>],
    h: f64,
) -> Result<f64, VanEstError> {
    check_vectors(omega, vectors)?;
    if omega.degree() == 0 {
        return mixed_stencil(omega, x, vectors, h);
    }
    let coarse = mixed_stencil(omega, x, vectors, h)?;
    let fine = mixed_stencil(omega, x, vectors, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// [`van_est`] packaged with its inputs.
pub fn sample_form(
    omega: &Cochain,
    x: &[f64],
    vectors: &[Vec<f64>],
    h: f64,
) -> Result<FormSample, VanEstError> {
    Ok(FormSample {
        basepoint: x.to_vec(),
        vectors: vectors.to_vec(),
        value: van_est(omega, x, vectors, h)?,
    })
}

/// The standard (extension-based) van Est map, computed as the sign-weighted
/// sum of mixed derivatives over all slot permutations. On normalized
/// even-invariant cochains it equals `n! · van_est` up to finite-difference
/// error.
pub fn van_est_standard(
    omega: &Cochain,
    x: &[f64],
    vectors: &[Vec<f64>],
    h: f64,
) -> Result<f64, VanEstError> {
    check_vectors(omega, vectors)?;
    let n = omega.degree();
    if n == 0 {
        return van_est(omega, x, vectors, h);
    }
    let mut acc = 0.0;
    for (perm, sign) in permutations_with_sign(n) {
        let permuted: Vec<Vec<f64>> = perm.iter().map(|&i| vectors[i].clone()).collect();
        let coarse = mixed_stencil(omega, x, &permuted, h)?;
        let fine = mixed_stencil(omega, x, &permuted, h / 2.0)?;
        acc += sign as f64 * (4.0 * fine - coarse) / 3.0;
    }
    Ok(acc)
}

/// Second-order jet of a degree-1 cochain on the line at `x`:
/// `f = ∂_y Ω(x,y)|_{y=x}`, `g = ½ ∂²_y Ω(x,y)|_{y=x}`.
///
/// Requires `Ω(x,x) = 0` within `1e-12` (normalized cochains only).
pub fn jet2(omega: &Cochain, x: f64, h: f64) -> Result<Jet2, VanEstError> {
    if omega.degree() != 1 || omega.ambient_dim() != 1 {
        return Err(VanEstError::Precondition(
            "jet2 needs a degree-1 cochain on R".into(),
        ));
    }
    let at = |a: f64, b: f64| -> Result<f64, VanEstError> {
        let pa = [a];
        let pb = [b];
        let tuple: Vec<&[f64]> = vec![&pa, &pb];
        Ok(omega.evaluate(&tuple)?)
    };
    let diag = at(x, x)?;
    if diag.abs() > 1e-12 {
        return Err(VanEstError::Precondition(format!(
            "jet2 requires Ω(x,x) = 0; got {diag} at x = {x}"
        )));
    }
    let first = |h: f64| -> Result<f64, VanEstError> {
        Ok((at(x, x + h)? - at(x, x - h)?) / (2.0 * h))
    };
    let second = |h: f64| -> Result<f64, VanEstError> {
        Ok((at(x, x + h)? - 2.0 * diag + at(x, x - h)?) / (h * h))
    };
    let f_val = (4.0 * first(h / 2.0)? - first(h)?) / 3.0;
    let g_val = 0.5 * (4.0 * second(h / 2.0)? - second(h)?) / 3.0;
    Ok(Jet2 { f_val, g_val })
}

/// Residual of the leading-term expansion on a simplex of scale `t`:
/// `|Ω(x, x+t·v_1, …, x+t·v_n) − van_est(Ω)·t^n·det[v_1..v_n]|`.
///
/// For normalized even-invariant cochains this vanishes faster than `t^n`.
/// Needs as many vectors as ambient dimensions for the determinant.
pub fn leading_term_residual(
    omega: &Cochain,
    x: &[f64],
    vectors: &[Vec<f64>],
    t: f64,
    h: f64,
) -> Result<f64, VanEstError> {
    check_vectors(omega, vectors)?;
    let n = omega.degree();
    if n != omega.ambient_dim() {
        return Err(VanEstError::Precondition(
            "leading-term residual needs degree = ambient dimension".into(),
        ));
    }
    let ve = van_est(omega, x, vectors, h)?;
    let mut tuple_points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    tuple_points.push(x.to_vec());
    for v in vectors {
        tuple_points.push(x.iter().zip(v).map(|(xc, vc)| xc + t * vc).collect());
    }
    let value = omega.evaluate_points(&tuple_points)?;
    let rows: Vec<Vec<f64>> = vectors.to_vec();
    Ok((value - ve * t.powi(n as i32) * det(&rows)).abs())
}

/// Log-log slope of the leading-term residual over a set of scales; `None`
/// when the residuals vanish identically (the expansion is exact).
pub fn leading_term_slope(
    omega: &Cochain,
    x: &[f64],
    vectors: &[Vec<f64>],
    scales: &[f64],
    h: f64,
) -> Result<Option<f64>, VanEstError> {
    let mut residuals = Vec::with_capacity(scales.len());
    for &t in scales {
        residuals.push(leading_term_residual(omega, x, vectors, t, h)?);
    }
    Ok(crate::numeric::loglog_slope(scales, &residuals))
}

/// Central directional derivative with one Richardson step.
fn directional<F: Fn(&[f64]) -> Result<f64, VanEstError>>(
    g: &F,
    x: &[f64],
    v: &[f64],
    h: f64,
) -> Result<f64, VanEstError> {
    let shift = |s: f64| -> Vec<f64> { x.iter().zip(v).map(|(xc, vc)| xc + s * vc).collect() };
    let central = |h: f64| -> Result<f64, VanEstError> {
        Ok((g(&shift(h))? - g(&shift(-h))?) / (2.0 * h))
    };
    Ok((4.0 * central(h / 2.0)? - central(h)?) / 3.0)
}

/// Exterior derivative of a form callback by finite differences, in the same
/// antisymmetrization wedge convention as the van Est values:
/// `dψ(v_0..v_n) = (1/(n+1)) Σ_i (−1)^i ∂_{v_i} [ψ(v_0..v̂_i..v_n)]`.
pub fn exterior_derivative_fd<F>(
    psi: &F,
    x: &[f64],
    vectors: &[Vec<f64>],
    h: f64,
) -> Result<f64, VanEstError>
where
    F: Fn(&[f64], &[Vec<f64>]) -> Result<f64, VanEstError>,
{
    let k = vectors.len(); // result is a k-form value; psi takes k-1 vectors
    let mut acc = 0.0;
    for i in 0..k {
        let rest: Vec<Vec<f64>> = vectors
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.clone())
            .collect();
        let slot = |y: &[f64]| psi(y, &rest);
        let d = directional(&slot, x, &vectors[i], h)?;
        acc += if i % 2 == 0 { d } else { -d };
    }
    Ok(acc / k as f64)
}

/// Residual of the defining relation of the algebroid differential,
/// `VE δ* = d VE`, at one point: compares `van_est(δ*Ω)` against the
/// finite-difference exterior derivative of the van Est form of `Ω`.
pub fn ve_delta_commutation(
    omega: &Cochain,
    x: &[f64],
    vectors: &[Vec<f64>],
    h: f64,
) -> Result<f64, VanEstError> {
    if vectors.len() != omega.degree() + 1 {
        return Err(VanEstError::VectorCount {
            expected: omega.degree() + 1,
            got: vectors.len(),
        });
    }
    let lhs = van_est(&omega.differential(), x, vectors, h)?;
    let psi =
        |y: &[f64], vs: &[Vec<f64>]| -> Result<f64, VanEstError> { van_est(omega, y, vs, h) };
    let rhs = exterior_derivative_fd(&psi, x, vectors, h)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::{builtins, random_tuple, Cochain, SymmetryTag};
    use crate::rng;
    use std::sync::Arc;

    fn basis(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect()
    }

    #[test]
    fn van_est_of_det_volume_is_inverse_factorial() {
        for n in [2usize, 3] {
            let omega = builtins::det_volume(n);
            let x = vec![0.25; n];
            let ve = van_est(&omega, &x, &basis(n), 1e-3).unwrap();
            let expected = 1.0 / crate::numeric::factorial(n) as f64;
            assert!(
                (ve - expected).abs() < 1e-10,
                "n={n}: VE = {ve}, expected {expected}"
            );
        }
    }

    #[test]
    fn van_est_of_left_riemann_recovers_the_coefficient() {
        let f = |x: f64| x.sin() + 2.0;
        let omega = builtins::left_riemann(1, Arc::new(move |p: &[f64]| f(p[0])));
        let x = [0.7];
        let ve = van_est(&omega, &x, &basis(1), 1e-3).unwrap();
        assert!((ve - f(0.7)).abs() < 1e-10, "VE = {ve}");
    }

    #[test]
    fn van_est_of_zero_is_zero() {
        let ve = van_est(&Cochain::zero(2, 2), &[0.0, 0.0], &basis(2), 1e-3).unwrap();
        assert_eq!(ve, 0.0);
    }

    #[test]
    fn van_est_degree_zero_evaluates_the_function() {
        let f = Cochain::from_fn(0, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            t[0][0].cos()
        });
        let v = van_est(&f, &[0.3], &[], 1e-3).unwrap();
        assert!((v - 0.3_f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn standard_van_est_scaling_on_det_volume() {
        let omega = builtins::det_volume(2);
        let x = [0.0, 0.0];
        let v = van_est_standard(&omega, &x, &basis(2), 1e-3).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "standard VE = {v}");
    }

    #[test]
    fn standard_van_est_matches_plain_in_degree_one() {
        let omega = builtins::antiderivative(Arc::new(f64::sin));
        let x = [0.4];
        let a = van_est(&omega, &x, &basis(1), 1e-3).unwrap();
        let b = van_est_standard(&omega, &x, &basis(1), 1e-3).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - 0.4_f64.cos()).abs() < 1e-9, "dF should be F'(x)");
    }

    #[test]
    fn standard_over_plain_is_factorial_on_random_even_invariant_cochains() {
        // Λ-part with a normalized symmetric part mixed in
        for trial in 0..10u64 {
            let n = 2usize;
            let anti = builtins::random_fourier(40 + trial, n, n).antisymmetrize();
            let sym_raw = builtins::random_fourier(80 + trial, n, n).symmetrize();
            let sym_norm = Cochain::from_fn(
                n,
                n,
                f64::INFINITY,
                SymmetryTag::CompletelySymmetric,
                true,
                move |t| {
                    let mut gaps = 1.0;
                    for i in 0..t.len() {
                        for j in i + 1..t.len() {
                            gaps *= crate::numeric::distance(t[i], t[j]).powi(2);
                        }
                    }
                    gaps * sym_raw.evaluate(t).unwrap_or(f64::NAN)
                },
            );
            let omega = Cochain::linear_combination(1.0, &anti, 0.7, &sym_norm).unwrap();
            let x = [0.2, -0.1];
            let vectors = basis(2);
            let plain = van_est(&omega, &x, &vectors, 1e-3).unwrap();
            if plain.abs() < 1e-3 {
                continue; // ratio meaningless at a zero of the form
            }
            let standard = van_est_standard(&omega, &x, &vectors, 1e-3).unwrap();
            let ratio = standard / plain;
            assert!(
                (ratio - 2.0).abs() < 1e-3 * (1.0 + ratio.abs()),
                "trial {trial}: ratio {ratio} should be 2! = 2"
            );
        }
    }

    #[test]
    fn jet2_examples() {
        let f = |x: f64| x.cos() + 0.5 * x;
        let fp = |x: f64| -x.sin() + 0.5;
        let left = Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, true, move |t| {
            f(t[0][0]) * (t[1][0] - t[0][0])
        });
        let right = Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, true, move |t| {
            f(t[1][0]) * (t[1][0] - t[0][0])
        });
        let x = 0.6;
        let jl = jet2(&left, x, 1e-3).unwrap();
        assert!((jl.f_val - f(x)).abs() < 1e-9);
        assert!(jl.g_val.abs() < 1e-7, "left jet g = {}", jl.g_val);
        let jr = jet2(&right, x, 1e-3).unwrap();
        assert!((jr.f_val - f(x)).abs() < 1e-9);
        assert!((jr.g_val - fp(x)).abs() < 1e-7, "right jet g = {}", jr.g_val);

        let quad = Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            (t[1][0] - t[0][0]).powi(2)
        });
        let jq = jet2(&quad, 0.2, 1e-3).unwrap();
        assert!(jq.f_val.abs() < 1e-12);
        assert!((jq.g_val - 1.0).abs() < 1e-10);
    }

    #[test]
    fn jet2_rejects_non_normalized_cochains() {
        let bad = Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, false, |t| {
            1.0 + t[1][0] - t[0][0]
        });
        assert!(matches!(
            jet2(&bad, 0.0, 1e-3),
            Err(VanEstError::Precondition(_))
        ));
    }

    #[test]
    fn jet2_is_linear() {
        let a = builtins::antiderivative(Arc::new(f64::sin));
        let b = Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            (t[1][0] - t[0][0]).powi(2) * t[0][0]
        });
        let combo = Cochain::linear_combination(2.0, &a, -3.0, &b).unwrap();
        let x = 0.9;
        let ja = jet2(&a, x, 1e-3).unwrap();
        let jb = jet2(&b, x, 1e-3).unwrap();
        let jc = jet2(&combo, x, 1e-3).unwrap();
        assert!((jc.f_val - (2.0 * ja.f_val - 3.0 * jb.f_val)).abs() < 1e-9);
        assert!((jc.g_val - (2.0 * ja.g_val - 3.0 * jb.g_val)).abs() < 1e-7);
    }

    #[test]
    fn leading_term_exact_for_det_volume() {
        let omega = builtins::det_volume(2);
        for t in [0.5, 0.1, 0.01] {
            let r = leading_term_residual(&omega, &[0.3, 0.3], &basis(2), t, 1e-3).unwrap();
            assert!(r < 1e-12, "residual {r} at t = {t}");
        }
    }

    #[test]
    fn leading_term_slopes() {
        let scales: Vec<f64> = (3..=8).map(|k| 0.5f64.powi(k)).collect();
        // cubic gap cochain: VE = 0, residual exactly t³
        let cubic = Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            (t[1][0] - t[0][0]).powi(3)
        });
        let s = leading_term_slope(&cubic, &[0.2], &basis(1), &scales, 1e-3)
            .unwrap()
            .unwrap();
        assert!((s - 3.0).abs() < 0.05, "cubic slope {s}");

        // right-point rule: second-order Taylor remainder
        let right = Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            t[1][0].exp() * (t[1][0] - t[0][0])
        });
        let s = leading_term_slope(&right, &[0.1], &basis(1), &scales, 1e-4)
            .unwrap()
            .unwrap();
        assert!(s >= 1.9, "right-point slope {s}");
    }

    #[test]
    fn ve_delta_commutation_cases() {
        // coboundary: both sides vanish
        let omega = builtins::antiderivative(Arc::new(f64::sin));
        let r = ve_delta_commutation(&omega, &[0.3], &[vec![1.0], vec![1.0]], 1e-3).unwrap();
        assert!(r < 1e-6, "coboundary residual {r}");

        // antisymmetrized one-form cochain on the line
        let f = |x: f64| (x * 0.8).cos();
        let raw = Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, true, move |t| {
            f(t[0][0]) * (t[1][0] - t[0][0])
        });
        let anti = raw.antisymmetrize();
        let r = ve_delta_commutation(&anti, &[0.5], &[vec![1.0], vec![1.0]], 1e-3).unwrap();
        assert!(r <= 1e-4, "1-D residual {r}");

        // planar antisymmetric cochain, nontrivial two-form on both sides
        let raw2 = Cochain::from_fn(1, 2, f64::INFINITY, SymmetryTag::None, true, |t| {
            (t[0][1].sin() + 1.0) * (t[1][0] - t[0][0])
        });
        let anti2 = raw2.antisymmetrize();
        let r = ve_delta_commutation(
            &anti2,
            &[0.2, 0.4],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            1e-3,
        )
        .unwrap();
        assert!(r <= 1e-4, "2-D residual {r}");

        let z = ve_delta_commutation(
            &Cochain::zero(1, 2),
            &[0.0, 0.0],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            1e-3,
        )
        .unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn van_est_is_multilinear_and_antisymmetric() {
        let omega = builtins::convex_hull_cocycle(
            2,
            3,
            builtins::constant_two_form(vec![(0, 1, 1.0), (1, 2, -0.5), (0, 2, 0.25)]),
            1,
        )
        .unwrap();
        let x = [0.1, 0.2, -0.3];
        for s in 0..10u64 {
            let stream = rng::substream(900, s);
            let pts = random_tuple(&[0.0, 0.0, 0.0], 1.0, 2, stream);
            let (v1, v2) = (pts[0].clone(), pts[1].clone());
            let a = rng::draw_uniform_in(stream, 50, -2.0, 2.0);
            let base = van_est(&omega, &x, &[v1.clone(), v2.clone()], 1e-3).unwrap();
            let scaled_vec: Vec<f64> = v1.iter().map(|c| a * c).collect();
            let scaled = van_est(&omega, &x, &[scaled_vec, v2.clone()], 1e-3).unwrap();
            assert!(
                (scaled - a * base).abs() < 1e-7 * (1.0 + base.abs()),
                "multilinearity: {scaled} vs {}",
                a * base
            );
            let swapped = van_est(&omega, &x, &[v2, v1], 1e-3).unwrap();
            assert!(
                (swapped + base).abs() < 1e-7 * (1.0 + base.abs()),
                "antisymmetry: {swapped} vs {}",
                -base
            );
        }
    }

    #[test]
    fn poincare_primitive_of_constant_form_in_r3() {
        // Ω = hull cocycle of a closed constant 2-form, trivialized at 0;
        // d VE(Ω_0) reproduces the form
        let coeffs = vec![(0usize, 1usize, 1.3), (1, 2, -0.7), (0, 2, 0.4)];
        let omega_form = builtins::constant_two_form(coeffs.clone());
        let omega = builtins::convex_hull_cocycle(2, 3, omega_form.clone(), 1).unwrap();
        let prim = omega.trivialize(&[0.0, 0.0, 0.0]).unwrap();
        let psi = |y: &[f64], vs: &[Vec<f64>]| -> Result<f64, VanEstError> {
            van_est(&prim, y, vs, 1e-3)
        };
        let e = basis(3);
        for s in 0..10u64 {
            let x = random_tuple(&[0.2, -0.1, 0.3], 0.8, 1, rng::substream(31337, s)).remove(0);
            for (i, j) in [(0usize, 1usize), (1, 2), (0, 2)] {
                let pair = vec![e[i].clone(), e[j].clone()];
                let d = exterior_derivative_fd(&psi, &x, &pair, 1e-3).unwrap();
                let refs: Vec<&[f64]> = pair.iter().map(|v| v.as_slice()).collect();
                let expected = omega_form(&x, &refs);
                assert!(
                    (d - expected).abs() < 1e-4,
                    "d VE(Ω_0)(e{i},e{j}) = {d}, form gives {expected}"
                );
            }
        }
    }
}
