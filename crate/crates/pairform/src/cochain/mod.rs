//! Cochains on the (local) pair groupoid of an embedded manifold.
//!
//! A degree-`n` cochain is a function on `(n+1)`-tuples of points. The
//! symmetric group on the `n+1` slots acts by permuting the tuple; cochains
//! invariant under even permutations are the ones a Riemann-like sum can be
//! formed from, and they split into a completely antisymmetric part (form-like,
//! orientation-sensitive) and a completely symmetric part (measure-like).
//! The groupoid differential is the alternating sum over dropping one tuple
//! entry; it squares to zero, and its kernel — the cocycles — are exactly the
//! cochains whose Riemann-like sums are triangulation independent.
//!
//! Evaluators are black-box pure functions, so symmetry and normalization
//! declarations are verified by randomized sampling ([`Cochain::verify_tags`])
//! rather than proven. Locality (the restriction to tuples near the diagonal
//! that models the local pair groupoid) is a metric radius checked on every
//! evaluation.

pub mod builtins;
pub mod quadrature;

use std::sync::Arc;

use thiserror::Error;

use crate::numeric::{distance, factorial, permutations_with_sign};
use crate::rng;

/// Scalar function of one real variable.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Scalar function on the ambient space.
pub type FieldFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Differential form as an evaluation callback: `(point, vectors) -> value`,
/// in the convention where the wedge is the plain antisymmetrization (so the
/// standard volume form evaluates to `1/n!` on the standard basis).
pub type FormFn = Arc<dyn Fn(&[f64], &[&[f64]]) -> f64 + Send + Sync>;
/// Map between ambient spaces, sampled pointwise.
pub type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// Raw cochain evaluator on a vertex tuple.
pub type EvalFn = Arc<dyn Fn(&[&[f64]]) -> f64 + Send + Sync>;

/// Errors from cochain construction and evaluation.
#[derive(Debug, Error)]
pub enum CochainError {
    #[error("expected a tuple of {expected} points, got {got}")]
    TupleArity { expected: usize, got: usize },
    #[error("point has dimension {got}, cochain lives on R^{expected}")]
    AmbientMismatch { expected: usize, got: usize },
    #[error("tuple diameter {diameter} exceeds locality radius {radius}")]
    Locality { radius: f64, diameter: f64 },
    #[error("evaluator left its domain: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("declared tag {tag:?} violated: {detail}")]
    TagViolation { tag: SymmetryTag, detail: String },
}

/// Declared symmetry of a cochain under permutations of its tuple slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryTag {
    None,
    /// Invariant under even permutations of all slots.
    EvenInvariant,
    /// Sign-changing under every transposition of the slots.
    CompletelyAntisymmetric,
    /// Invariant under all permutations of the slots.
    CompletelySymmetric,
}

/// A degree-`n` cochain: evaluator, locality radius and symmetry metadata.
#[derive(Clone)]
pub struct Cochain {
    degree: usize,
    ambient_dim: usize,
    eval: EvalFn,
    locality_radius: f64,
    symmetry: SymmetryTag,
    normalized: bool,
}

impl std::fmt::Debug for Cochain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cochain")
            .field("degree", &self.degree)
            .field("ambient_dim", &self.ambient_dim)
            .field("locality_radius", &self.locality_radius)
            .field("symmetry", &self.symmetry)
            .field("normalized", &self.normalized)
            .finish()
    }
}

impl Cochain {
    /// Wraps a raw evaluator. The declared metadata is trusted here and can
    /// be spot-checked later with [`Cochain::verify_tags`].
    pub fn from_fn(
        degree: usize,
        ambient_dim: usize,
        locality_radius: f64,
        symmetry: SymmetryTag,
        normalized: bool,
        eval: impl Fn(&[&[f64]]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Cochain {
            degree,
            ambient_dim,
            eval: Arc::new(eval),
            locality_radius,
            symmetry,
            normalized,
        }
    }

    /// The zero cochain of a given degree.
    pub fn zero(degree: usize, ambient_dim: usize) -> Self {
        Cochain::from_fn(
            degree,
            ambient_dim,
            f64::INFINITY,
            SymmetryTag::CompletelyAntisymmetric,
            true,
            |_| 0.0,
        )
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn locality_radius(&self) -> f64 {
        self.locality_radius
    }

    pub fn symmetry(&self) -> SymmetryTag {
        self.symmetry
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Evaluates on a tuple after checking arity, ambient dimension and
    /// locality. A nonfinite evaluator result is reported as a domain error.
    pub fn evaluate(&self, tuple: &[&[f64]]) -> Result<f64, CochainError> {
        if tuple.len() != self.degree + 1 {
            return Err(CochainError::TupleArity {
                expected: self.degree + 1,
                got: tuple.len(),
            });
        }
        for p in tuple {
            if p.len() != self.ambient_dim {
                return Err(CochainError::AmbientMismatch {
                    expected: self.ambient_dim,
                    got: p.len(),
                });
            }
        }
        if self.locality_radius.is_finite() {
            let mut diameter: f64 = 0.0;
            for i in 0..tuple.len() {
                for j in i + 1..tuple.len() {
                    diameter = diameter.max(distance(tuple[i], tuple[j]));
                }
            }
            if diameter > self.locality_radius * (1.0 + 1e-12) {
                return Err(CochainError::Locality {
                    radius: self.locality_radius,
                    diameter,
                });
            }
        }
        let v = (self.eval)(tuple);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(CochainError::Domain(format!(
                "evaluator returned {v} on an in-range tuple"
            )))
        }
    }

    /// Evaluation for use inside other evaluators: domain failures surface as
    /// NaN, which the outermost [`Cochain::evaluate`] turns back into an error.
    fn eval_nan(&self, tuple: &[&[f64]]) -> f64 {
        match self.evaluate(tuple) {
            Ok(v) => v,
            Err(_) => f64::NAN,
        }
    }

    /// Convenience evaluation from owned points.
    pub fn evaluate_points(&self, points: &[Vec<f64>]) -> Result<f64, CochainError> {
        let tuple: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
        self.evaluate(&tuple)
    }

    /// `(1/(n+1)!) Σ_σ sgn(σ) σ·Ω` — the completely antisymmetric part.
    pub fn antisymmetrize(&self) -> Cochain {
        self.symmetrized_part(true)
    }

    /// `(1/(n+1)!) Σ_σ σ·Ω` — the completely symmetric part.
    pub fn symmetrize(&self) -> Cochain {
        self.symmetrized_part(false)
    }

    fn symmetrized_part(&self, antisymmetric: bool) -> Cochain {
        let parent = self.clone();
        let perms = permutations_with_sign(self.degree + 1);
        let scale = 1.0 / factorial(self.degree + 1) as f64;
        let symmetry = if antisymmetric {
            SymmetryTag::CompletelyAntisymmetric
        } else {
            SymmetryTag::CompletelySymmetric
        };
        // antisymmetrization is automatically normalized; symmetrization
        // keeps the parent's normalization
        let normalized = if antisymmetric { true } else { self.normalized };
        Cochain::from_fn(
            self.degree,
            self.ambient_dim,
            self.locality_radius,
            symmetry,
            normalized,
            move |tuple| {
                let mut acc = 0.0;
                for (sigma, sign) in &perms {
                    let v = parent.eval_nan(&permute(tuple, sigma));
                    acc += if antisymmetric { *sign as f64 * v } else { v };
                }
                acc * scale
            },
        )
    }

    /// The groupoid differential `δ*`: alternating sum over dropping one
    /// tuple entry. Degree rises by one; the locality radius is inherited.
    pub fn differential(&self) -> Cochain {
        let parent = self.clone();
        let symmetry = if self.symmetry == SymmetryTag::CompletelyAntisymmetric {
            SymmetryTag::CompletelyAntisymmetric
        } else {
            SymmetryTag::None
        };
        Cochain::from_fn(
            self.degree + 1,
            self.ambient_dim,
            self.locality_radius,
            symmetry,
            self.normalized,
            move |tuple| {
                let mut acc = 0.0;
                let mut sub: Vec<&[f64]> = Vec::with_capacity(tuple.len() - 1);
                for drop in 0..tuple.len() {
                    sub.clear();
                    sub.extend(
                        tuple
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| *i != drop)
                            .map(|(_, p)| *p),
                    );
                    let v = parent.eval_nan(&sub);
                    acc += if drop % 2 == 0 { v } else { -v };
                }
                acc
            },
        )
    }

    /// Pins the first slot to `basepoint`: `Ω_m(x_1..x_n) = Ω(m, x_1..x_n)`.
    ///
    /// For a cocycle `Ω` this is a primitive: `δ*(Ω_m) = Ω` wherever the
    /// augmented tuples stay within the locality radius.
    pub fn trivialize(&self, basepoint: &[f64]) -> Result<Cochain, CochainError> {
        if self.degree == 0 {
            return Err(CochainError::Precondition(
                "trivialize needs degree >= 1".into(),
            ));
        }
        if basepoint.len() != self.ambient_dim {
            return Err(CochainError::AmbientMismatch {
                expected: self.ambient_dim,
                got: basepoint.len(),
            });
        }
        let parent = self.clone();
        let m = basepoint.to_vec();
        let symmetry = if self.symmetry == SymmetryTag::CompletelyAntisymmetric {
            SymmetryTag::CompletelyAntisymmetric
        } else {
            SymmetryTag::None
        };
        Ok(Cochain::from_fn(
            self.degree - 1,
            self.ambient_dim,
            self.locality_radius,
            symmetry,
            self.normalized,
            move |tuple| {
                let mut full: Vec<&[f64]> = Vec::with_capacity(tuple.len() + 1);
                full.push(m.as_slice());
                full.extend_from_slice(tuple);
                parent.eval_nan(&full)
            },
        ))
    }

    /// Pullback along a pointwise-sampled map `phi: R^{domain_dim} -> R^d`.
    /// `phi` need not be differentiable; tuples whose images leave the
    /// locality radius produce domain errors at evaluation time.
    pub fn pullback(&self, domain_dim: usize, phi: MapFn) -> Cochain {
        let parent = self.clone();
        Cochain::from_fn(
            self.degree,
            domain_dim,
            f64::INFINITY,
            self.symmetry,
            self.normalized,
            move |tuple| {
                let images: Vec<Vec<f64>> = tuple.iter().map(|p| phi(p)).collect();
                let refs: Vec<&[f64]> = images.iter().map(|p| p.as_slice()).collect();
                parent.eval_nan(&refs)
            },
        )
    }

    /// Pointwise linear combination `a·Ω + b·Ψ`. Symmetry survives only
    /// when both summands declare the same tag.
    pub fn linear_combination(
        a: f64,
        omega: &Cochain,
        b: f64,
        psi: &Cochain,
    ) -> Result<Cochain, CochainError> {
        if omega.degree != psi.degree {
            return Err(CochainError::InvalidParameter(format!(
                "degree mismatch: {} vs {}",
                omega.degree, psi.degree
            )));
        }
        if omega.ambient_dim != psi.ambient_dim {
            return Err(CochainError::InvalidParameter(format!(
                "ambient mismatch: {} vs {}",
                omega.ambient_dim, psi.ambient_dim
            )));
        }
        let symmetry = if omega.symmetry == psi.symmetry {
            omega.symmetry
        } else {
            SymmetryTag::None
        };
        let (l, r) = (omega.clone(), psi.clone());
        Ok(Cochain::from_fn(
            omega.degree,
            omega.ambient_dim,
            omega.locality_radius.min(psi.locality_radius),
            symmetry,
            omega.normalized && psi.normalized,
            move |tuple| a * l.eval_nan(tuple) + b * r.eval_nan(tuple),
        ))
    }

    /// Multiplies by the scalar field sampled at the common source `x_0`
    /// (the pullback `s*f`). The declared tags are inherited, which is only
    /// sound when the weighting respects the symmetry on the support of the
    /// cochain (true for diagonal-supported cochains like the Dirac one).
    pub fn with_source_weight(&self, f: FieldFn) -> Cochain {
        let parent = self.clone();
        Cochain::from_fn(
            self.degree,
            self.ambient_dim,
            self.locality_radius,
            self.symmetry,
            self.normalized,
            move |tuple| f(tuple[0]) * parent.eval_nan(tuple),
        )
    }

    /// Randomized spot-check of the declared `symmetry`/`normalized` flags on
    /// tuples drawn near `center` with the given spread.
    pub fn verify_tags(
        &self,
        center: &[f64],
        spread: f64,
        n_samples: usize,
        seed: u64,
        tol: f64,
    ) -> Result<(), CochainError> {
        let k = self.degree + 1;
        let perms = permutations_with_sign(k);
        for sample in 0..n_samples {
            let stream = rng::substream(seed, sample as u64);
            let points = random_tuple(center, spread, k, stream);
            let tuple: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
            let base = self.evaluate(&tuple)?;
            let scale = 1.0 + base.abs();

            if self.normalized && k >= 2 {
                // duplicate a consecutive pair
                let slot = (rng::draw_u64(stream, 9000) as usize) % (k - 1);
                let mut dup = points.clone();
                dup[slot + 1] = dup[slot].clone();
                let refs: Vec<&[f64]> = dup.iter().map(|p| p.as_slice()).collect();
                let v = self.evaluate(&refs)?;
                if v.abs() > tol * scale {
                    return Err(CochainError::TagViolation {
                        tag: self.symmetry,
                        detail: format!(
                            "declared normalized but evaluates to {v} with slots {slot},{} equal",
                            slot + 1
                        ),
                    });
                }
            }

            match self.symmetry {
                SymmetryTag::None => {}
                SymmetryTag::CompletelyAntisymmetric => {
                    let pick = (rng::draw_u64(stream, 9001) as usize) % perms.len();
                    let (sigma, sign) = &perms[pick];
                    let v = self.evaluate(&permute(&tuple, sigma))?;
                    if (v - *sign as f64 * base).abs() > tol * scale {
                        return Err(CochainError::TagViolation {
                            tag: self.symmetry,
                            detail: format!(
                                "sigma={sigma:?}: {v} vs sign*base {}",
                                *sign as f64 * base
                            ),
                        });
                    }
                }
                SymmetryTag::CompletelySymmetric => {
                    let pick = (rng::draw_u64(stream, 9001) as usize) % perms.len();
                    let (sigma, _) = &perms[pick];
                    let v = self.evaluate(&permute(&tuple, sigma))?;
                    if (v - base).abs() > tol * scale {
                        return Err(CochainError::TagViolation {
                            tag: self.symmetry,
                            detail: format!("sigma={sigma:?}: {v} vs {base}"),
                        });
                    }
                }
                SymmetryTag::EvenInvariant => {
                    let even: Vec<_> = perms.iter().filter(|(_, s)| *s > 0).collect();
                    let pick = (rng::draw_u64(stream, 9001) as usize) % even.len();
                    let (sigma, _) = even[pick];
                    let v = self.evaluate(&permute(&tuple, sigma))?;
                    if (v - base).abs() > tol * scale {
                        return Err(CochainError::TagViolation {
                            tag: self.symmetry,
                            detail: format!("even sigma={sigma:?}: {v} vs {base}"),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Reorders a tuple: slot `j` of the input lands in slot `sigma[j]`.
/// Satisfies `permute(permute(t, σ), τ) = permute(t, τ∘σ)` with
/// `(τ∘σ)(j) = τ(σ(j))`.
pub fn permute<'a>(tuple: &[&'a [f64]], sigma: &[usize]) -> Vec<&'a [f64]> {
    debug_assert_eq!(tuple.len(), sigma.len());
    let mut out: Vec<&'a [f64]> = vec![tuple[0]; tuple.len()];
    for (j, &to) in sigma.iter().enumerate() {
        out[to] = tuple[j];
    }
    out
}

/// Report from a randomized cocycle check.
#[derive(Debug, Clone)]
pub struct CocycleReport {
    pub max_residual: f64,
    pub pass: bool,
    pub n_samples: usize,
    pub tol: f64,
}

/// Checks `δ*Ω ≈ 0` on sampled `(n+2)`-tuples. The sampler receives the
/// sample index and must produce tuples within the locality domain; an
/// out-of-domain tuple is an error, not a failed check.
pub fn is_cocycle(
    omega: &Cochain,
    sampler: impl Fn(u64) -> Vec<Vec<f64>>,
    n_samples: usize,
    tol: f64,
) -> Result<CocycleReport, CochainError> {
    let d = omega.differential();
    let mut max_residual: f64 = 0.0;
    for i in 0..n_samples {
        let points = sampler(i as u64);
        let v = d.evaluate_points(&points)?;
        max_residual = max_residual.max(v.abs());
    }
    Ok(CocycleReport {
        max_residual,
        pass: max_residual <= tol,
        n_samples,
        tol,
    })
}

/// Deterministic random tuple of `k` points near `center`.
pub fn random_tuple(center: &[f64], spread: f64, k: usize, stream: u64) -> Vec<Vec<f64>> {
    let d = center.len();
    (0..k)
        .map(|i| {
            (0..d)
                .map(|c| {
                    center[c] + rng::draw_uniform_in(stream, (i * d + c) as u64, -spread, spread)
                })
                .collect()
        })
        .collect()
}

/// A relative cochain: a degree-`k` cochain on `M` paired with a degree-`k-1`
/// cochain on `∂M`. The relative differential is
/// `(Ω_M, Ω_∂M) ↦ (δ*Ω_M, i*Ω_M − δ*Ω_∂M)`.
#[derive(Clone, Debug)]
pub struct RelativeCochain {
    pub omega_m: Cochain,
    pub omega_bdry: Cochain,
}

impl RelativeCochain {
    pub fn new(omega_m: Cochain, omega_bdry: Cochain) -> Result<Self, CochainError> {
        if omega_m.degree() != omega_bdry.degree() + 1 {
            return Err(CochainError::InvalidParameter(format!(
                "relative cochain degrees must differ by one, got {} and {}",
                omega_m.degree(),
                omega_bdry.degree()
            )));
        }
        if omega_m.ambient_dim() != omega_bdry.ambient_dim() {
            return Err(CochainError::InvalidParameter(
                "relative cochain parts must share an ambient space".into(),
            ));
        }
        Ok(RelativeCochain { omega_m, omega_bdry })
    }

    /// The relative differential of a pair `(a, b)` one degree down:
    /// `(δ*a, a|_∂ − δ*b)`. When `a` has degree 0 there is no boundary part
    /// below it; pass `None` and the boundary component is just `a` restricted.
    pub fn coboundary_of(a: &Cochain, b: Option<&Cochain>) -> Result<RelativeCochain, CochainError> {
        let omega_m = a.differential();
        let omega_bdry = match b {
            Some(b) => {
                if b.degree() + 1 != a.degree() {
                    return Err(CochainError::InvalidParameter(format!(
                        "coboundary pair needs degrees (k, k-1), got ({}, {})",
                        a.degree(),
                        b.degree()
                    )));
                }
                Cochain::linear_combination(1.0, a, -1.0, &b.differential())?
            }
            None => {
                if a.degree() != 0 {
                    return Err(CochainError::InvalidParameter(
                        "missing boundary part for a positive-degree pair".into(),
                    ));
                }
                a.clone()
            }
        };
        RelativeCochain::new(omega_m, omega_bdry)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::builtins;

    fn tuple1(xs: &[f64]) -> Vec<Vec<f64>> {
        xs.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn permute_swap_and_identity() {
        let a = [0.0];
        let b = [1.0];
        let t: Vec<&[f64]> = vec![&a, &b];
        let swapped = permute(&t, &[1, 0]);
        assert_eq!(swapped[0], &b[..]);
        assert_eq!(swapped[1], &a[..]);
        let id = permute(&t, &[0, 1]);
        assert_eq!(id[0], &a[..]);
    }

    #[test]
    fn permute_composition_law() {
        let pts: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64, -(i as f64)]).collect();
        let t: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        for (sigma, _) in permutations_with_sign(4) {
            for (tau, _) in permutations_with_sign(4) {
                let lhs = permute(&permute(&t, &sigma), &tau);
                let comp: Vec<usize> = (0..4).map(|j| tau[sigma[j]]).collect();
                let rhs = permute(&t, &comp);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn antisymmetrize_left_riemann_gives_trapezoid() {
        // Ω(x,y) = f(x)(y−x) antisymmetrizes to ½(f(x)+f(y))(y−x)
        let f = |x: f64| x * x + 1.0;
        let omega = Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, true, move |t| {
            f(t[0][0]) * (t[1][0] - t[0][0])
        });
        let anti = omega.antisymmetrize();
        let (x, y) = (0.3, 1.1);
        let got = anti.evaluate_points(&tuple1(&[x, y])).unwrap();
        let expected = 0.5 * (f(x) + f(y)) * (y - x);
        assert!((got - expected).abs() < 1e-14);
    }

    #[test]
    fn antisymmetrize_is_identity_on_antisymmetric() {
        let omega = builtins::antiderivative(Arc::new(f64::sin));
        let anti = omega.antisymmetrize();
        for (x, y) in [(0.0, 1.0), (-0.7, 0.2), (2.0, 2.5)] {
            let a = omega.evaluate_points(&tuple1(&[x, y])).unwrap();
            let b = anti.evaluate_points(&tuple1(&[x, y])).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn antisymmetrize_kills_even_functions_of_the_gap() {
        let omega = Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            (t[1][0] - t[0][0]).powi(2)
        });
        let anti = omega.antisymmetrize();
        let got = anti.evaluate_points(&tuple1(&[0.2, 0.9])).unwrap();
        assert_eq!(got, 0.0);
    }

    fn even_invariant_part(omega: &Cochain) -> Cochain {
        let parent = omega.clone();
        let perms = permutations_with_sign(omega.degree() + 1);
        let n_even = perms.iter().filter(|(_, s)| *s > 0).count() as f64;
        Cochain::from_fn(
            omega.degree(),
            omega.ambient_dim(),
            omega.locality_radius(),
            SymmetryTag::EvenInvariant,
            false,
            move |tuple| {
                perms
                    .iter()
                    .filter(|(_, s)| *s > 0)
                    .map(|(sigma, _)| parent.eval_nan(&permute(tuple, sigma)))
                    .sum::<f64>()
                    / n_even
            },
        )
    }

    #[test]
    fn decomposition_on_even_invariant_cochains() {
        // an even-invariant cochain equals antisymmetrization + symmetrization
        let raw = builtins::random_fourier(11, 2, 2);
        let even = even_invariant_part(&raw);
        let anti = even.antisymmetrize();
        let sym = even.symmetrize();
        for s in 0..20u64 {
            let pts = random_tuple(&[0.3, -0.2], 1.0, 3, rng::substream(5, s));
            let w = even.evaluate_points(&pts).unwrap();
            let a = anti.evaluate_points(&pts).unwrap();
            let m = sym.evaluate_points(&pts).unwrap();
            assert!(
                (w - (a + m)).abs() <= 1e-12 * (1.0 + w.abs()),
                "decomposition failed: {w} vs {a} + {m}"
            );
        }
    }

    #[test]
    fn differential_of_zero_cochain_is_increment() {
        let f = Cochain::from_fn(0, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            t[0][0].powi(3)
        });
        let df = f.differential();
        let v = df.evaluate_points(&tuple1(&[0.5, 2.0])).unwrap();
        assert!((v - (8.0 - 0.125)).abs() < 1e-14);
    }

    #[test]
    fn differential_squares_to_zero() {
        let omega = builtins::random_fourier(3, 1, 2);
        let dd = omega.differential().differential();
        for s in 0..50u64 {
            let pts = random_tuple(&[0.0, 0.0], 1.5, 4, rng::substream(17, s));
            let v = dd.evaluate_points(&pts).unwrap();
            assert!(v.abs() < 1e-12, "δ*δ* = {v}");
        }
    }

    #[test]
    fn differential_commutes_with_antisymmetrization() {
        let omega = builtins::random_fourier(23, 1, 2);
        let lhs = omega.differential().antisymmetrize();
        let rhs = omega.antisymmetrize().differential();
        for s in 0..20u64 {
            let pts = random_tuple(&[0.1, 0.4], 1.0, 3, rng::substream(29, s));
            let a = lhs.evaluate_points(&pts).unwrap();
            let b = rhs.evaluate_points(&pts).unwrap();
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn coboundaries_are_cocycles() {
        let big_f = builtins::antiderivative(Arc::new(|x: f64| x.exp().sin()));
        let sampler = |i: u64| random_tuple(&[0.0], 2.0, 3, rng::substream(100, i));
        let report = is_cocycle(&big_f, sampler, 10_000, 1e-12).unwrap();
        assert!(report.pass, "max residual {}", report.max_residual);
    }

    #[test]
    fn left_riemann_is_not_a_cocycle() {
        let omega = builtins::left_riemann(1, Arc::new(|p: &[f64]| p[0] * p[0]));
        let sampler = |i: u64| random_tuple(&[1.0], 0.5, 3, rng::substream(100, i));
        let report = is_cocycle(&omega, sampler, 500, 1e-12).unwrap();
        assert!(!report.pass);
        assert!(
            report.max_residual > 1e-3,
            "expected residual bounded away from zero, got {}",
            report.max_residual
        );
    }

    #[test]
    fn zero_cochain_is_a_cocycle() {
        let zero = Cochain::zero(1, 1);
        let sampler = |i: u64| random_tuple(&[0.0], 1.0, 3, rng::substream(4, i));
        let report = is_cocycle(&zero, sampler, 100, 0.0).unwrap();
        assert_eq!(report.max_residual, 0.0);
        assert!(report.pass);
    }

    #[test]
    fn trivialize_recovers_primitive_of_antiderivative() {
        let big_f = |x: f64| x.powi(2) + x.sin();
        let omega = builtins::antiderivative(Arc::new(big_f));
        let prim = omega.trivialize(&[0.0]).unwrap();
        let at = |x: f64| prim.evaluate_points(&tuple1(&[x])).unwrap();
        assert!((at(1.3) - (big_f(1.3) - big_f(0.0))).abs() < 1e-14);
        // δ*(Ω_m) = Ω for the cocycle Ω
        let reconstructed = prim.differential();
        for (x, y) in [(0.1, 0.9), (-1.0, 0.3)] {
            let a = reconstructed.evaluate_points(&tuple1(&[x, y])).unwrap();
            let b = omega.evaluate_points(&tuple1(&[x, y])).unwrap();
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn trivialize_zero_is_zero() {
        let z = Cochain::zero(2, 2).trivialize(&[0.0, 0.0]).unwrap();
        let pts = vec![vec![0.1, 0.2], vec![0.3, -0.1]];
        assert_eq!(z.evaluate_points(&pts).unwrap(), 0.0);
    }

    #[test]
    fn trivialized_hull_cocycle_reconstructs_it() {
        // ω = dx∧dy on R², Ω = hull cocycle, δ*(Ω_0) = Ω on random triangles
        let omega = builtins::convex_hull_cocycle(
            2,
            2,
            builtins::scalar_top_form(2, Arc::new(|_: &[f64]| 1.0)),
            1,
        )
        .unwrap();
        let prim = omega.trivialize(&[0.0, 0.0]).unwrap();
        let reconstructed = prim.differential();
        for s in 0..50u64 {
            let pts = random_tuple(&[0.5, -0.5], 1.0, 3, rng::substream(31, s));
            let a = reconstructed.evaluate_points(&pts).unwrap();
            let b = omega.evaluate_points(&pts).unwrap();
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn pullback_by_identity_is_identity() {
        let omega = builtins::antiderivative(Arc::new(f64::cos));
        let pulled = omega.pullback(1, Arc::new(|p: &[f64]| p.to_vec()));
        let pts = tuple1(&[0.2, 1.4]);
        assert_eq!(
            pulled.evaluate_points(&pts).unwrap(),
            omega.evaluate_points(&pts).unwrap()
        );
    }

    #[test]
    fn pullback_of_coboundary_telescopes() {
        let big_f = |x: f64| (2.0 * x).cos();
        let omega = builtins::antiderivative(Arc::new(big_f));
        // a rough, non-differentiable sampled map
        let phi = Arc::new(|p: &[f64]| vec![p[0].abs().sqrt() + (7.0 * p[0]).floor() * 0.01]);
        let pulled = omega.pullback(1, phi.clone());
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let mut sum = 0.0;
        for w in grid.windows(2) {
            sum += pulled.evaluate_points(&tuple1(&[w[0], w[1]])).unwrap();
        }
        let expected = big_f(phi(&[1.0])[0]) - big_f(phi(&[0.0])[0]);
        assert!((sum - expected).abs() < 1e-12);
    }

    #[test]
    fn builtin_values() {
        let det = builtins::det_volume(2);
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!((det.evaluate_points(&pts).unwrap() - 0.5).abs() < 1e-15);

        let anti = builtins::antiderivative(Arc::new(f64::sin));
        let v = anti
            .evaluate_points(&tuple1(&[0.0, std::f64::consts::FRAC_PI_2]))
            .unwrap();
        assert!((v - 1.0).abs() < 1e-15);

        let euler = builtins::euler(2, 2);
        let same = vec![vec![0.5, 0.5]; 3];
        assert_eq!(euler.evaluate_points(&same).unwrap(), 1.0);
        let two = vec![vec![0.0, 0.0], vec![0.0, 0.0], vec![1.0, 0.0]];
        assert_eq!(euler.evaluate_points(&two).unwrap(), -1.0);
    }

    #[test]
    fn builtin_tags_verify() {
        let center2 = [0.2, -0.3];
        builtins::det_volume(2)
            .verify_tags(&center2, 0.8, 200, 1, 1e-10)
            .unwrap();
        builtins::antiderivative(Arc::new(f64::sin))
            .verify_tags(&[0.0], 1.0, 200, 2, 1e-10)
            .unwrap();
        builtins::euler(2, 2)
            .verify_tags(&center2, 0.5, 200, 3, 1e-12)
            .unwrap();
        builtins::density_measure(2, 2, Arc::new(|p: &[f64]| 1.0 + p[0] * p[0]), 2)
            .unwrap()
            .verify_tags(&center2, 0.5, 100, 4, 1e-10)
            .unwrap();
        builtins::winding(vec![0.0, 0.0])
            .verify_tags(&[0.8, 0.3], 0.2, 200, 5, 1e-12)
            .unwrap();
    }

    #[test]
    fn verify_tags_flags_a_lie() {
        // claims antisymmetry but is symmetric
        let liar = Cochain::from_fn(
            1,
            1,
            f64::INFINITY,
            SymmetryTag::CompletelyAntisymmetric,
            true,
            |t| (t[1][0] - t[0][0]).powi(2),
        );
        let err = liar.verify_tags(&[0.0], 1.0, 200, 7, 1e-10).unwrap_err();
        assert!(matches!(err, CochainError::TagViolation { .. }));
    }

    #[test]
    fn locality_is_enforced() {
        let w = builtins::winding(vec![0.0, 0.0]);
        let far = vec![vec![1.0, 0.0], vec![-1.0, 0.1]];
        assert!(matches!(
            w.evaluate_points(&far),
            Err(CochainError::Locality { .. })
        ));
    }
}
