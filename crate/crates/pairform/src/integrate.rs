//! Riemann-like sums over triangulations and their refinement limits.
//!
//! The sum of a cochain over the oriented top simplices of a triangulation
//! approximates the integral of its van Est form; refining and extrapolating
//! realizes the net limit over an equivalence class of triangulations. For
//! cocycles the sums are already exact at every level — the refinement study
//! then just confirms it — and for relative cocycles the interior-minus-boundary
//! pairing reproduces the generalized fundamental theorem of calculus.
//!
//! Conventions fixed here, for reproducibility:
//! - non-normalized completely symmetric cochains (the Dirac and Euler ones)
//!   are additionally summed once over every lower-dimensional face, embedded
//!   as a degenerate tuple by repeating the last vertex;
//! - the scalar factor in Riemann–Stieltjes sums samples the *first* oriented
//!   vertex of each simplex;
//! - non-convergence within the level budget is reported, not raised.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cochain::{Cochain, CochainError, FieldFn, MapFn, RelativeCochain, SymmetryTag};
use crate::mesh::{MeshError, RefinementScheme, Triangulation};
use crate::numeric::tree_sum;

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error("cochain degree {degree} does not match mesh dimension {dimension}")]
    DegreeMismatch { degree: usize, dimension: usize },
    #[error("simplex {simplex} has diameter {diameter}, beyond the locality radius {radius}")]
    LocalityViolation {
        simplex: usize,
        diameter: f64,
        radius: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelRecord {
    pub mesh_size: f64,
    pub sum: f64,
    pub n_simplices: usize,
}

/// Refinement study of a Riemann-like sum: per-level sums, the fitted decay
/// rate of the increments, and the Richardson-extrapolated limit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub levels: Vec<LevelRecord>,
    pub extrapolated: f64,
    /// Log-log slope of `|Δsum|` against mesh size; `None` when the sums are
    /// already exact (nothing to fit).
    pub rate_estimate: Option<f64>,
    pub converged: bool,
    pub scheme: RefinementScheme,
}

impl ConvergenceReport {
    /// Successive sum differences, one per refinement step.
    pub fn deltas(&self) -> Vec<f64> {
        self.levels.windows(2).map(|w| w[1].sum - w[0].sum).collect()
    }

    /// CSV rendering with columns `level,mesh_size,n_simplices,sum,delta`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,mesh_size,n_simplices,sum,delta\n");
        for (i, l) in self.levels.iter().enumerate() {
            let delta = if i == 0 {
                String::new()
            } else {
                format!("{}", l.sum - self.levels[i - 1].sum)
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                i, l.mesh_size, l.n_simplices, l.sum, delta
            ));
        }
        out
    }
}

fn check_compatible(omega: &Cochain, mesh: &Triangulation) -> Result<(), IntegrateError> {
    if omega.degree() != mesh.dimension() {
        return Err(IntegrateError::DegreeMismatch {
            degree: omega.degree(),
            dimension: mesh.dimension(),
        });
    }
    if omega.locality_radius().is_finite() {
        for i in 0..mesh.n_simplices() {
            let pts = mesh.oriented_points(i)?;
            let mut diameter: f64 = 0.0;
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    diameter = diameter.max(crate::numeric::distance(pts[a], pts[b]));
                }
            }
            if diameter > omega.locality_radius() * (1.0 + 1e-12) {
                return Err(IntegrateError::LocalityViolation {
                    simplex: i,
                    diameter,
                    radius: omega.locality_radius(),
                });
            }
        }
    }
    Ok(())
}

/// `Σ_Δ Ω(Δ)` over the oriented top simplices of `mesh`.
///
/// Zero-dimensional meshes weight each point by its orientation sign. For a
/// non-normalized completely symmetric cochain the sum also visits every
/// lower face once, on a degenerate tuple, which is what makes the Dirac and
/// Euler cochains integrate correctly.
pub fn riemann_sum(omega: &Cochain, mesh: &Triangulation) -> Result<f64, IntegrateError> {
    check_compatible(omega, mesh)?;
    let mut terms: Vec<f64> = Vec::with_capacity(mesh.n_simplices());
    if mesh.dimension() == 0 {
        for i in 0..mesh.n_simplices() {
            let p = mesh.vertex(mesh.simplex(i)[0]);
            let tuple: Vec<&[f64]> = vec![p];
            terms.push(mesh.orientation_sign(i) as f64 * omega.evaluate(&tuple)?);
        }
        return Ok(tree_sum(&terms));
    }
    for i in 0..mesh.n_simplices() {
        let pts = mesh.oriented_points(i)?;
        terms.push(omega.evaluate(&pts)?);
    }
    if omega.symmetry() == SymmetryTag::CompletelySymmetric && !omega.is_normalized() {
        for k in 0..mesh.dimension() {
            for face in mesh.faces(k)? {
                let mut pts: Vec<&[f64]> = face.iter().map(|&v| mesh.vertex(v)).collect();
                while pts.len() < mesh.dimension() + 1 {
                    pts.push(pts[pts.len() - 1]);
                }
                terms.push(omega.evaluate(&pts)?);
            }
        }
    }
    Ok(tree_sum(&terms))
}

/// Refines until two successive increments fall below `tol` (or the level
/// budget runs out), recording the sum produced by `summand` at every level.
fn refinement_study(
    mesh: &Triangulation,
    scheme: RefinementScheme,
    tol: f64,
    max_levels: usize,
    mut summand: impl FnMut(&Triangulation) -> Result<f64, IntegrateError>,
) -> Result<ConvergenceReport, IntegrateError> {
    let mut levels = Vec::new();
    let mut current = mesh.clone();
    loop {
        let sum = summand(&current)?;
        levels.push(LevelRecord {
            mesh_size: current.mesh_size(),
            sum,
            n_simplices: current.n_simplices(),
        });
        let n = levels.len();
        let converged = n >= 3
            && (levels[n - 1].sum - levels[n - 2].sum).abs() <= tol
            && (levels[n - 2].sum - levels[n - 3].sum).abs() <= tol;
        if converged || n > max_levels {
            let (extrapolated, rate) = extrapolate(&levels);
            return Ok(ConvergenceReport {
                levels,
                extrapolated,
                rate_estimate: rate,
                converged,
                scheme,
            });
        }
        current = current.refine(scheme)?;
    }
}

/// Richardson/Aitken extrapolation from the level sums, plus the fitted
/// rate of increment decay against mesh size.
fn extrapolate(levels: &[LevelRecord]) -> (f64, Option<f64>) {
    let last = levels.last().expect("at least one level").sum;
    let n = levels.len();
    if n < 3 {
        return (last, None);
    }
    let scale: f64 = levels.iter().map(|l| l.sum.abs()).fold(0.0, f64::max);
    let deltas: Vec<f64> = levels.windows(2).map(|w| w[1].sum - w[0].sum).collect();
    let hs: Vec<f64> = levels[1..].iter().map(|l| l.mesh_size).collect();
    let abs_deltas: Vec<f64> = deltas.iter().map(|d| d.abs()).collect();
    let measurable = abs_deltas.iter().all(|&d| d > 1e-14 * (1.0 + scale));
    let rate = if measurable {
        crate::numeric::loglog_slope(&hs, &abs_deltas)
    } else {
        None
    };
    let d_last = deltas[deltas.len() - 1];
    let d_prev = deltas[deltas.len() - 2];
    if measurable && d_last != 0.0 {
        let ratio = d_prev / d_last;
        if ratio > 1.05 {
            let correction = d_last / (ratio - 1.0);
            if correction.abs() <= 10.0 * d_last.abs() {
                return (last + correction, rate);
            }
        }
    }
    (last, rate)
}

/// Net-limit integration: refinement study of [`riemann_sum`].
pub fn integrate(
    omega: &Cochain,
    mesh: &Triangulation,
    scheme: RefinementScheme,
    tol: f64,
    max_levels: usize,
) -> Result<ConvergenceReport, IntegrateError> {
    refinement_study(mesh, scheme, tol, max_levels, |t| riemann_sum(omega, t))
}

/// The relative pairing `Σ_M Ω_M − Σ_∂M Ω_∂M`; for closed relative cochains
/// this is the two-sided integral of the generalized FTC and does not depend
/// on the triangulation.
pub fn relative_pairing(
    relative: &RelativeCochain,
    mesh: &Triangulation,
) -> Result<f64, IntegrateError> {
    let interior = riemann_sum(&relative.omega_m, mesh)?;
    let boundary_mesh = mesh.boundary()?;
    let boundary = if boundary_mesh.n_simplices() == 0 {
        0.0
    } else {
        riemann_sum(&relative.omega_bdry, &boundary_mesh)?
    };
    Ok(interior - boundary)
}

/// Residual of the combinatorial Stokes identity
/// `Σ_∂T Ω = Σ_T δ*Ω` for completely antisymmetric `Ω`. Pure cancellation:
/// the residual is rounding noise, independent of mesh size.
pub fn stokes_check(omega: &Cochain, mesh: &Triangulation) -> Result<f64, IntegrateError> {
    if omega.symmetry() != SymmetryTag::CompletelyAntisymmetric {
        return Err(IntegrateError::InvalidParameter(
            "Stokes identity needs a completely antisymmetric cochain".into(),
        ));
    }
    let coboundary = omega.differential();
    let interior = riemann_sum(&coboundary, mesh)?;
    let boundary_mesh = mesh.boundary()?;
    let boundary = if boundary_mesh.n_simplices() == 0 {
        0.0
    } else {
        riemann_sum(omega, &boundary_mesh)?
    };
    Ok((boundary - interior).abs())
}

/// `χ(M) = Σ_k (−1)^k #(k-faces)` — the Euler cochain summed once per face.
pub fn euler_characteristic(mesh: &Triangulation) -> Result<i64, IntegrateError> {
    let mut chi = 0i64;
    for k in 0..=mesh.dimension() {
        let count = mesh.faces(k)?.len() as i64;
        chi += if k % 2 == 0 { count } else { -count };
    }
    Ok(chi)
}

/// Generalized Riemann–Stieltjes integral `∫_M f dΩ`: refinement limit of
/// `Σ_Δ f(first oriented vertex) · δ*Ω(Δ)` for an antisymmetric cochain `Ω`
/// of degree `dim − 1`.
pub fn rs_integral(
    f: FieldFn,
    omega: &Cochain,
    mesh: &Triangulation,
    scheme: RefinementScheme,
    tol: f64,
    max_levels: usize,
) -> Result<ConvergenceReport, IntegrateError> {
    let weighted = omega.differential().with_source_weight(f);
    refinement_study(mesh, scheme, tol, max_levels, move |t| {
        riemann_sum(&weighted, t)
    })
}

/// Total variation estimate: last-level value of `Σ_Δ |Ω(Δ)|` after the given
/// number of refinements (the per-level sums are monotone nondecreasing for
/// coboundaries, so the last level is the tightest lower bound).
pub fn total_variation(
    omega: &Cochain,
    mesh: &Triangulation,
    scheme: RefinementScheme,
    levels: usize,
) -> Result<f64, IntegrateError> {
    let mut current = mesh.clone();
    let mut last = abs_riemann_sum(omega, &current)?;
    for _ in 0..levels {
        current = current.refine(scheme)?;
        last = abs_riemann_sum(omega, &current)?;
    }
    Ok(last)
}

fn abs_riemann_sum(omega: &Cochain, mesh: &Triangulation) -> Result<f64, IntegrateError> {
    check_compatible(omega, mesh)?;
    let mut terms = Vec::with_capacity(mesh.n_simplices());
    for i in 0..mesh.n_simplices() {
        let pts = mesh.oriented_points(i)?;
        terms.push(omega.evaluate(&pts)?.abs());
    }
    Ok(tree_sum(&terms))
}

/// Integrates a pullback: refinement study of `Σ φ*Ω` over a mesh of the
/// domain. For a cocycle `Ω` the level sums are constant.
pub fn pullback_integrate(
    omega: &Cochain,
    phi: MapFn,
    mesh: &Triangulation,
    scheme: RefinementScheme,
    tol: f64,
    max_levels: usize,
) -> Result<ConvergenceReport, IntegrateError> {
    let pulled = omega.pullback(mesh.ambient_dim(), phi);
    integrate(&pulled, mesh, scheme, tol, max_levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochain::builtins;
    use crate::mesh::MeshKind;
    use std::sync::Arc;

    fn gen(kind: MeshKind) -> Triangulation {
        Triangulation::generate(&kind).unwrap()
    }

    #[test]
    fn ftc_sum_is_exact_for_any_partition() {
        let omega = builtins::antiderivative(Arc::new(f64::sin));
        for k in [1usize, 4, 17] {
            let t = gen(MeshKind::Interval { a: 0.0, b: 3.0, k });
            let s = riemann_sum(&omega, &t).unwrap();
            assert!(
                (s - 3.0f64.sin()).abs() < 1e-13,
                "k={k}: sum {s} vs {}",
                3.0f64.sin()
            );
        }
    }

    #[test]
    fn det_volume_sums_to_unit_square_area() {
        let omega = builtins::det_volume(2);
        for k in [1usize, 2, 3] {
            let t = gen(MeshKind::KuhnCube { n: 2, k });
            let s = riemann_sum(&omega, &t).unwrap();
            assert!((s - 1.0).abs() < 1e-13, "k={k}: area {s}");
        }
    }

    #[test]
    fn dirac_with_source_weight_samples_the_function() {
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 4 });
        let f = |p: &[f64]| 3.0 + p[0] * p[0];
        let m = vec![0.5];
        let weighted = builtins::dirac(m.clone(), 1).with_source_weight(Arc::new(f));
        let s = riemann_sum(&weighted, &t).unwrap();
        assert!((s - f(&m)).abs() < 1e-15, "got {s}, expected {}", f(&m));
    }

    #[test]
    fn euler_cochain_riemann_sum_matches_euler_characteristic() {
        for (kind, chi) in [
            (MeshKind::OctaSphere { level: 0 }, 2i64),
            (MeshKind::Interval { a: 0.0, b: 1.0, k: 3 }, 1),
            (MeshKind::FlatTorus { k: 3 }, 0),
        ] {
            let t = gen(kind);
            let omega = builtins::euler(t.dimension(), t.ambient_dim());
            let s = riemann_sum(&omega, &t).unwrap();
            assert!((s - chi as f64).abs() < 1e-12, "sum {s} vs chi {chi}");
            assert_eq!(euler_characteristic(&t).unwrap(), chi);
        }
    }

    #[test]
    fn euler_characteristic_invariant_under_refinement() {
        for kind in [
            MeshKind::OctaSphere { level: 0 },
            MeshKind::Interval { a: 0.0, b: 1.0, k: 2 },
            MeshKind::FlatTorus { k: 3 },
        ] {
            let t = gen(kind);
            let chi = euler_characteristic(&t).unwrap();
            let r = t.refine(RefinementScheme::Barycentric).unwrap();
            assert_eq!(euler_characteristic(&r).unwrap(), chi);
        }
    }

    #[test]
    fn left_riemann_converges_to_the_integral() {
        let omega = builtins::left_riemann(1, Arc::new(|p: &[f64]| p[0] * p[0]));
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 4 });
        let report = integrate(&omega, &t, RefinementScheme::EdgeMidpoint, 1e-4, 14).unwrap();
        assert!(report.converged);
        assert!(
            (report.extrapolated - 1.0 / 3.0).abs() < 1e-6,
            "extrapolated {} vs 1/3",
            report.extrapolated
        );
        let rate = report.rate_estimate.unwrap();
        assert!(rate > 0.9, "rate {rate}");
    }

    #[test]
    fn winding_sum_is_two_pi_at_every_level() {
        let w = builtins::winding(vec![0.0, 0.0]);
        let t = gen(MeshKind::Circle { k: 8 });
        for scheme in [RefinementScheme::EdgeMidpoint, RefinementScheme::Barycentric] {
            let report = integrate(&w, &t, scheme, 1e-12, 4).unwrap();
            for level in &report.levels {
                assert!(
                    (level.sum - std::f64::consts::TAU).abs() < 1e-12,
                    "level sum {} vs 2π",
                    level.sum
                );
            }
            assert!(report.converged);
        }
    }

    #[test]
    fn zero_cochain_integrates_to_zero() {
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 2 });
        let report = integrate(
            &Cochain::zero(1, 1),
            &t,
            RefinementScheme::EdgeMidpoint,
            1e-12,
            3,
        )
        .unwrap();
        assert!(report.levels.iter().all(|l| l.sum == 0.0));
        assert_eq!(report.extrapolated, 0.0);
        assert!(report.rate_estimate.is_none());
    }

    #[test]
    fn relative_pairing_reproduces_ftc() {
        let big_f = |x: f64| x.exp().sin();
        let rel = RelativeCochain::new(
            builtins::antiderivative(Arc::new(big_f)),
            Cochain::zero(0, 1),
        )
        .unwrap();
        for k in [1usize, 5, 9] {
            let t = gen(MeshKind::Interval { a: -1.0, b: 2.0, k });
            let v = relative_pairing(&rel, &t).unwrap();
            let expected = big_f(2.0) - big_f(-1.0);
            assert!((v - expected).abs() < 1e-12, "k={k}: {v} vs {expected}");
        }
    }

    #[test]
    fn relative_pairing_of_zero_is_zero() {
        let rel = RelativeCochain::new(Cochain::zero(1, 1), Cochain::zero(0, 1)).unwrap();
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 3 });
        assert_eq!(relative_pairing(&rel, &t).unwrap(), 0.0);
    }

    #[test]
    fn relative_pairing_of_coboundary_vanishes() {
        // interval: d(A, —) = (δ*A, A|_∂), pairing telescopes to zero
        let a = Cochain::from_fn(0, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            (t[0][0] * 1.7).cos()
        });
        let rel = RelativeCochain::coboundary_of(&a, None).unwrap();
        let t = gen(MeshKind::Interval { a: 0.0, b: 2.0, k: 6 });
        let v = relative_pairing(&rel, &t).unwrap();
        assert!(v.abs() < 1e-13, "coboundary pairing {v}");

        // disk: d(A, B) = (δ*A, A|_∂ − δ*B); the pairing reduces to the sum
        // of δ*B over the closed boundary polygon, which telescopes to zero
        let a2 = builtins::random_fourier(41, 1, 2).antisymmetrize();
        let b2 = Cochain::from_fn(0, 2, f64::INFINITY, SymmetryTag::None, true, |t| {
            t[0][0] * t[0][1] + t[0][1].sin()
        });
        let rel2 = RelativeCochain::coboundary_of(&a2, Some(&b2)).unwrap();
        let disk = gen(MeshKind::KuhnCube { n: 2, k: 3 });
        let v2 = relative_pairing(&rel2, &disk).unwrap();
        assert!(v2.abs() < 1e-12, "disk coboundary pairing {v2}");
    }

    #[test]
    fn stokes_identity_on_flat_square() {
        let t = gen(MeshKind::KuhnCube { n: 2, k: 2 });
        let raw = builtins::random_fourier(5, 1, 2);
        let omega = raw.antisymmetrize();
        let r = stokes_check(&omega, &t).unwrap();
        let n_terms = (t.n_simplices() * 3 + 8) as f64;
        assert!(r <= 1e-12 * n_terms, "Stokes residual {r}");
    }

    #[test]
    fn stokes_on_closed_surface_sums_coboundary_to_zero() {
        let t = gen(MeshKind::OctaSphere { level: 1 });
        let omega = builtins::random_fourier(9, 1, 3).antisymmetrize();
        let total = riemann_sum(&omega.differential(), &t).unwrap();
        assert!(total.abs() < 1e-12, "closed-surface coboundary sum {total}");
        let r = stokes_check(&omega, &t).unwrap();
        assert!(r < 1e-12);
    }

    #[test]
    fn stokes_telescopes_on_interval() {
        let omega = builtins::antiderivative(Arc::new(f64::exp));
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 7 });
        // δ*Ω = 0, and the boundary sum telescopes to zero as well
        let r = stokes_check(&omega.trivialize(&[0.0]).unwrap(), &t).unwrap();
        assert!(r < 1e-12, "interval Stokes residual {r}");
    }

    #[test]
    fn rs_integral_x_d_x_squared() {
        let g = Cochain::from_fn(0, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            t[0][0] * t[0][0]
        });
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 4 });
        let report = rs_integral(
            Arc::new(|p: &[f64]| p[0]),
            &g,
            &t,
            RefinementScheme::EdgeMidpoint,
            1e-4,
            10,
        )
        .unwrap();
        assert!(
            (report.extrapolated - 2.0 / 3.0).abs() < 1e-5,
            "∫x d(x²) = {}",
            report.extrapolated
        );
    }

    #[test]
    fn rs_integral_constant_factor_reduces_to_boundary_sum() {
        let g = Cochain::from_fn(0, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            (t[0][0] * 0.9).sin()
        });
        let t = gen(MeshKind::Interval { a: 0.0, b: 2.0, k: 5 });
        let c = 2.5;
        let report = rs_integral(
            Arc::new(move |_: &[f64]| c),
            &g,
            &t,
            RefinementScheme::EdgeMidpoint,
            1e-10,
            4,
        )
        .unwrap();
        let expected = c * ((2.0f64 * 0.9).sin() - 0.0f64.sin());
        for level in &report.levels {
            assert!((level.sum - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn rs_integral_of_zero_is_zero() {
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 2 });
        let report = rs_integral(
            Arc::new(|p: &[f64]| p[0]),
            &Cochain::zero(0, 1),
            &t,
            RefinementScheme::EdgeMidpoint,
            1e-12,
            3,
        )
        .unwrap();
        assert!(report.levels.iter().all(|l| l.sum == 0.0));
    }

    #[test]
    fn total_variation_of_monotone_coboundary() {
        let g = Cochain::from_fn(0, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            t[0][0] * t[0][0]
        });
        let omega = g.differential();
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 4 });
        let tv = total_variation(&omega, &t, RefinementScheme::EdgeMidpoint, 4).unwrap();
        assert!((tv - 1.0).abs() < 1e-12, "variation of x² on [0,1] is 1, got {tv}");
    }

    #[test]
    fn total_variation_of_sine_over_full_period() {
        let g = Cochain::from_fn(0, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            t[0][0].sin()
        });
        let omega = g.differential();
        let t = gen(MeshKind::Interval {
            a: 0.0,
            b: std::f64::consts::TAU,
            k: 4,
        });
        let tv = total_variation(&omega, &t, RefinementScheme::EdgeMidpoint, 5).unwrap();
        assert!((tv - 4.0).abs() < 1e-12, "TV of sin over a period is 4, got {tv}");
        assert_eq!(
            total_variation(&Cochain::zero(1, 1), &t, RefinementScheme::EdgeMidpoint, 2).unwrap(),
            0.0
        );
    }

    #[test]
    fn total_variation_is_monotone_for_coboundaries() {
        let g = Cochain::from_fn(0, 1, f64::INFINITY, SymmetryTag::None, true, |t| {
            (3.0 * t[0][0]).sin() + t[0][0]
        });
        let omega = g.differential();
        let t = gen(MeshKind::Interval { a: 0.0, b: 2.0, k: 2 });
        let mut prev = 0.0;
        for levels in 0..5 {
            let tv = total_variation(&omega, &t, RefinementScheme::EdgeMidpoint, levels).unwrap();
            assert!(tv >= prev - 1e-12, "TV dropped: {tv} after {prev}");
            prev = tv;
        }
    }

    #[test]
    fn pullback_integrate_telescopes_along_rough_paths() {
        let big_f = |x: f64| (x - 0.3).powi(3);
        let omega = builtins::antiderivative(Arc::new(big_f));
        // piecewise-linear interpolation of rough samples
        let samples: Vec<f64> = (0..=16)
            .map(|i| ((i * 2654435761usize) % 97) as f64 / 97.0)
            .collect();
        let phi = Arc::new(move |p: &[f64]| {
            let x = p[0].clamp(0.0, 1.0) * 16.0;
            let i = (x.floor() as usize).min(15);
            let frac = x - i as f64;
            vec![samples[i] * (1.0 - frac) + samples[i + 1] * frac]
        });
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 3 });
        let report =
            pullback_integrate(&omega, phi.clone(), &t, RefinementScheme::EdgeMidpoint, 1e-12, 6)
                .unwrap();
        let expected = big_f(phi(&[1.0])[0]) - big_f(phi(&[0.0])[0]);
        for level in &report.levels {
            assert!(
                (level.sum - expected).abs() < 1e-12,
                "level sum {} vs {expected}",
                level.sum
            );
        }
    }

    #[test]
    fn orientation_reversal_negates_antisymmetric_sums() {
        let omega = builtins::det_volume(2);
        let t = gen(MeshKind::KuhnCube { n: 2, k: 2 });
        let s = riemann_sum(&omega, &t).unwrap();
        let s_rev = riemann_sum(&omega, &t.reversed()).unwrap();
        assert!((s + s_rev).abs() < 1e-13);

        let mu = builtins::density_measure(2, 2, Arc::new(|_: &[f64]| 1.0), 1).unwrap();
        let m = riemann_sum(&mu, &t).unwrap();
        let m_rev = riemann_sum(&mu, &t.reversed()).unwrap();
        assert!((m - m_rev).abs() < 1e-13, "symmetric sum changed under reversal");
        assert!((m - 1.0).abs() < 1e-13);
    }

    #[test]
    fn left_riemann_and_its_antisymmetrization_agree_in_the_limit() {
        let f = Arc::new(|p: &[f64]| p[0].exp());
        let omega = builtins::left_riemann(1, f);
        let anti = omega.antisymmetrize();
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 4 });
        let a = integrate(&omega, &t, RefinementScheme::EdgeMidpoint, 1e-6, 10).unwrap();
        let b = integrate(&anti, &t, RefinementScheme::EdgeMidpoint, 1e-6, 10).unwrap();
        let exact = std::f64::consts::E - 1.0;
        assert!((a.extrapolated - exact).abs() < 1e-5, "left: {}", a.extrapolated);
        assert!((b.extrapolated - exact).abs() < 1e-6, "trapezoid: {}", b.extrapolated);
    }

    #[test]
    fn locality_violation_names_the_simplex() {
        let w = builtins::winding(vec![0.0, 0.0]);
        let t = gen(MeshKind::Circle { k: 3 }); // chords of length √3 > √2
        match riemann_sum(&w, &t) {
            Err(IntegrateError::LocalityViolation { simplex, .. }) => assert_eq!(simplex, 0),
            other => panic!("expected locality violation, got {other:?}"),
        }
    }

    #[test]
    fn csv_report_has_one_row_per_level() {
        let omega = builtins::antiderivative(Arc::new(f64::sin));
        let t = gen(MeshKind::Interval { a: 0.0, b: 1.0, k: 1 });
        let report = integrate(&omega, &t, RefinementScheme::EdgeMidpoint, 1e-12, 3).unwrap();
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), report.levels.len() + 1);
        assert!(csv.starts_with("level,mesh_size,n_simplices,sum,delta"));
    }
}
