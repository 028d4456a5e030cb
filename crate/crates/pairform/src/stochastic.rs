//! Stochastic integration of two-jet integrands `f dx + g dx²` along
//! Brownian paths, and the Wiener (Feynman–Kac) lattice.
//!
//! A Brownian path only has Hölder regularity below 1/2, so the value of a
//! Riemann-like sum `Σ Ω(γ(t_i), γ(t_{i+1}))` depends on the second-order
//! Taylor data of the cochain `Ω`, not just its leading term: representatives
//! with equal two-jets agree in the L² limit, and the choice `g = 0` gives
//! the Itô integral while `g = ½f′` (the antisymmetric sections) gives
//! Stratonovich. All randomness is counter-based (a pure function of seed and
//! index), so every report is reproducible bit for bit; the
//! `PAIRFORM_THREADS` environment variable caps the sampling workers without
//! affecting results.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cochain::{Cochain, CochainError, ScalarFn, SymmetryTag};
use crate::numeric::{parallel_collect, tree_sum};
use crate::vanest::{jet2, VanEstError};

pub use crate::rng::{draw_standard_normal, draw_u64, draw_uniform, substream};

use std::sync::Arc;

#[derive(Debug, Error)]
pub enum StochasticError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("representative two-jet mismatch at x = {x}: jet ({got_f}, {got_g}) vs integrand ({want_f}, {want_g})")]
    JetMismatch {
        x: f64,
        got_f: f64,
        got_g: f64,
        want_f: f64,
        want_g: f64,
    },
    #[error("spatial grid too coarse: kernel std {kernel_std} < 2 × grid step {step}")]
    Resolution { kernel_std: f64, step: f64 },
    #[error(transparent)]
    Cochain(#[from] CochainError),
    #[error(transparent)]
    VanEst(#[from] VanEstError),
}

/// A Wiener path sampled on the uniform grid `t_i = i/n`, `γ(0) = 0`.
/// Increments are the `N(0, 1/n)` draws of the counter stream for `seed`.
#[derive(Debug, Clone)]
pub struct BrownianPath {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub seed: u64,
}

impl BrownianPath {
    pub fn n_steps(&self) -> usize {
        self.values.len() - 1
    }
}

/// Samples a Brownian path with `n` uniform steps on `[0, 1]`.
pub fn sample_brownian(n: usize, seed: u64) -> Result<BrownianPath, StochasticError> {
    if n == 0 {
        return Err(StochasticError::Parameter(
            "a Brownian path needs at least one step".into(),
        ));
    }
    let dt = 1.0 / n as f64;
    let scale = dt.sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut times = Vec::with_capacity(n + 1);
    values.push(0.0);
    times.push(0.0);
    let mut w = 0.0;
    for i in 0..n {
        w += scale * draw_standard_normal(seed, i as u64);
        values.push(w);
        times.push((i + 1) as f64 * dt);
    }
    Ok(BrownianPath { times, values, seed })
}

/// The integrand `f(x) dx + g(x) dx²`.
#[derive(Clone)]
pub struct Jet2Integrand {
    pub f: ScalarFn,
    pub g: ScalarFn,
}

impl Jet2Integrand {
    pub fn new(f: ScalarFn, g: ScalarFn) -> Self {
        Jet2Integrand { f, g }
    }

    /// Itô data: `g = 0`.
    pub fn ito(f: ScalarFn) -> Self {
        Jet2Integrand {
            f,
            g: Arc::new(|_| 0.0),
        }
    }

    /// Stratonovich data: `g = ½ f′`, with `f′` supplied analytically or by
    /// central differences at step `1e-6`.
    pub fn stratonovich(f: ScalarFn, df: Option<ScalarFn>) -> Self {
        let df = df.unwrap_or_else(|| numeric_derivative(f.clone()));
        Jet2Integrand {
            f,
            g: Arc::new(move |x| 0.5 * df(x)),
        }
    }
}

fn numeric_derivative(f: ScalarFn) -> ScalarFn {
    Arc::new(move |x| {
        let h = 1e-6 * (1.0 + x.abs());
        (f(x + h) - f(x - h)) / (2.0 * h)
    })
}

/// The generator of the `S_2` action on two-jet integrands:
/// `(f, g) ↦ (−f, g − f′)`. It is an involution, and its antisymmetric
/// (sign-flipping) fixed points are exactly the Stratonovich data `(f, ½f′)`.
pub fn s2_action(j: &Jet2Integrand) -> Jet2Integrand {
    let f = j.f.clone();
    let g = j.g.clone();
    let df = numeric_derivative(j.f.clone());
    Jet2Integrand {
        f: Arc::new(move |x| -f(x)),
        g: Arc::new(move |x| g(x) - df(x)),
    }
}

/// The canonical representative `Ω(x,y) = f(x)(y−x) + g(x)(y−x)²`.
pub fn canonical_cochain(j: &Jet2Integrand) -> Cochain {
    let f = j.f.clone();
    let g = j.g.clone();
    Cochain::from_fn(1, 1, f64::INFINITY, SymmetryTag::None, true, move |t| {
        let dx = t[1][0] - t[0][0];
        f(t[0][0]) * dx + g(t[0][0]) * dx * dx
    })
}

/// Which cochain realizes the two-jet in the Riemann-like sum.
#[derive(Clone)]
pub enum Representative {
    Canonical,
    Custom(Cochain),
}

/// Checks that a custom representative carries the required two-jet at a
/// handful of points spanning the path's range.
fn check_representative(
    omega: &Cochain,
    j: &Jet2Integrand,
    path: &BrownianPath,
) -> Result<(), StochasticError> {
    let lo = path.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = path.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let samples = 5;
    for k in 0..samples {
        let x = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
        let jet = jet2(omega, x, 1e-3)?;
        let (want_f, want_g) = ((j.f)(x), (j.g)(x));
        if (jet.f_val - want_f).abs() > 1e-8 * (1.0 + want_f.abs())
            || (jet.g_val - want_g).abs() > 1e-8 * (1.0 + want_g.abs())
        {
            return Err(StochasticError::JetMismatch {
                x,
                got_f: jet.f_val,
                got_g: jet.g_val,
                want_f,
                want_g,
            });
        }
    }
    Ok(())
}

/// Sum of a degree-1 cochain along the path's vertex pairs.
pub fn sum_along_path(omega: &Cochain, path: &BrownianPath) -> Result<f64, StochasticError> {
    let mut terms = Vec::with_capacity(path.n_steps());
    for w in path.values.windows(2) {
        let a = [w[0]];
        let b = [w[1]];
        let tuple: Vec<&[f64]> = vec![&a, &b];
        terms.push(omega.evaluate(&tuple)?);
    }
    Ok(tree_sum(&terms))
}

/// The Riemann-like sum `Σ_i Ω(γ(t_i), γ(t_{i+1}))` for a representative of
/// the two-jet `j`. Custom representatives are verified against `j` first.
pub fn jet_integral(
    j: &Jet2Integrand,
    path: &BrownianPath,
    representative: &Representative,
) -> Result<f64, StochasticError> {
    match representative {
        Representative::Canonical => {
            let mut terms = Vec::with_capacity(path.n_steps());
            for w in path.values.windows(2) {
                let dx = w[1] - w[0];
                terms.push((j.f)(w[0]) * dx + (j.g)(w[0]) * dx * dx);
            }
            Ok(tree_sum(&terms))
        }
        Representative::Custom(omega) => {
            check_representative(omega, j, path)?;
            sum_along_path(omega, path)
        }
    }
}

/// Itô integral `∫ γ*(f dx)` at the path's resolution.
pub fn ito(f: ScalarFn, path: &BrownianPath) -> Result<f64, StochasticError> {
    jet_integral(&Jet2Integrand::ito(f), path, &Representative::Canonical)
}

/// Stratonovich integral `∫ γ*(f dx + ½f′ dx²)` at the path's resolution.
pub fn stratonovich(
    f: ScalarFn,
    df: Option<ScalarFn>,
    path: &BrownianPath,
) -> Result<f64, StochasticError> {
    jet_integral(
        &Jet2Integrand::stratonovich(f, df),
        path,
        &Representative::Canonical,
    )
}

/// Monte Carlo mean and sample standard deviation of a per-path statistic
/// over `n_samples` seeded paths of `n_steps` steps each.
pub fn monte_carlo_paths<F>(
    n_steps: usize,
    n_samples: usize,
    seed: u64,
    stat: F,
) -> Result<(f64, f64), StochasticError>
where
    F: Fn(&BrownianPath) -> Result<f64, StochasticError> + Sync,
{
    if n_samples == 0 {
        return Err(StochasticError::Parameter("need at least one sample".into()));
    }
    let values: Vec<Result<f64, StochasticError>> = parallel_collect(n_samples, |k| {
        let path = sample_brownian(n_steps, substream(seed, k as u64))?;
        stat(&path)
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_, _>>()?;
    let mean = tree_sum(&values) / n_samples as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let sd = (tree_sum(&sq) / (n_samples.max(2) - 1) as f64).sqrt();
    Ok((mean, sd))
}

/// Bookkeeping of an L² grid study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub n_samples: usize,
    pub grid_sizes: Vec<usize>,
    /// Per-grid mean of the compared quantity.
    pub means: Vec<f64>,
    /// Per-grid `E[(S_1 − S_2)²]^{1/2}`.
    pub l2_diffs: Vec<f64>,
    /// Log-log slope of `l2_diffs` against `1/N`; `None` if not measurable.
    pub slope: Option<f64>,
    pub seed: u64,
}

/// Estimates `E[(S_{Ω_1} − S_{Ω_2})²]^{1/2}` per grid size, where both sums
/// run over the same sampled paths, and fits the decay slope against `1/N`.
///
/// With `check_jets` set, the two representatives must carry the same
/// two-jet (sampled on `[-2, 2]`); this is the hypothesis under which the
/// L² limits agree. Clearing it permits deliberately mismatched pairs, whose
/// difference converges to a nonzero constant instead.
pub fn l2_equivalence_study(
    omega_1: &Cochain,
    omega_2: &Cochain,
    grid_sizes: &[usize],
    n_samples: usize,
    seed: u64,
    check_jets: bool,
) -> Result<MonteCarloReport, StochasticError> {
    if grid_sizes.is_empty() || n_samples == 0 {
        return Err(StochasticError::Parameter(
            "need at least one grid size and one sample".into(),
        ));
    }
    if check_jets {
        for k in 0..=8 {
            let x = -2.0 + 0.5 * k as f64;
            let j1 = jet2(omega_1, x, 1e-3)?;
            let j2 = jet2(omega_2, x, 1e-3)?;
            if (j1.f_val - j2.f_val).abs() > 1e-8 * (1.0 + j1.f_val.abs())
                || (j1.g_val - j2.g_val).abs() > 1e-8 * (1.0 + j1.g_val.abs())
            {
                return Err(StochasticError::JetMismatch {
                    x,
                    got_f: j2.f_val,
                    got_g: j2.g_val,
                    want_f: j1.f_val,
                    want_g: j1.g_val,
                });
            }
        }
    }
    let mut means = Vec::with_capacity(grid_sizes.len());
    let mut l2_diffs = Vec::with_capacity(grid_sizes.len());
    for (gi, &n) in grid_sizes.iter().enumerate() {
        if n == 0 {
            return Err(StochasticError::Parameter("grid size 0".into()));
        }
        let grid_seed = substream(seed, gi as u64);
        let diffs: Vec<Result<f64, StochasticError>> = parallel_collect(n_samples, |k| {
            let path = sample_brownian(n, substream(grid_seed, k as u64))?;
            Ok(sum_along_path(omega_1, &path)? - sum_along_path(omega_2, &path)?)
        });
        let diffs: Vec<f64> = diffs.into_iter().collect::<Result<_, _>>()?;
        means.push(tree_sum(&diffs) / n_samples as f64);
        let sq: Vec<f64> = diffs.iter().map(|d| d * d).collect();
        l2_diffs.push((tree_sum(&sq) / n_samples as f64).sqrt());
    }
    let inverse_n: Vec<f64> = grid_sizes.iter().map(|&n| 1.0 / n as f64).collect();
    let slope = crate::numeric::loglog_slope(&inverse_n, &l2_diffs);
    Ok(MonteCarloReport {
        n_samples,
        grid_sizes: grid_sizes.to_vec(),
        means,
        l2_diffs,
        slope,
        seed,
    })
}

/// Uniform spatial grid for the lattice evolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid1D {
    pub min: f64,
    pub step: f64,
    pub len: usize,
}

impl Grid1D {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self, StochasticError> {
        if !(step > 0.0) || !(max > min) {
            return Err(StochasticError::Parameter(
                "grid needs max > min and step > 0".into(),
            ));
        }
        let len = ((max - min) / step).round() as usize + 1;
        Ok(Grid1D { min, step, len })
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.min + i as f64 * self.step).collect()
    }
}

/// The Wiener-measure lattice: `n_steps` alternating applications of the
/// potential weight `exp(−V(x)/N)` and the normalized heat kernel of
/// variance `1/N`, evaluated by trapezoid quadrature on the grid. This is
/// the imaginary-time (`ħ = −i`) case only; the per-step kernel
/// normalization replaces the divergent lattice constants.
pub fn feynman_kac_lattice(
    v: &ScalarFn,
    psi0: &ScalarFn,
    n_steps: usize,
    grid: &Grid1D,
) -> Result<Vec<f64>, StochasticError> {
    if n_steps == 0 {
        return Err(StochasticError::Parameter("need at least one step".into()));
    }
    let n = n_steps as f64;
    let kernel_std = (1.0 / n).sqrt();
    if kernel_std < 2.0 * grid.step {
        return Err(StochasticError::Resolution {
            kernel_std,
            step: grid.step,
        });
    }
    let points = grid.points();
    let g_len = points.len();
    // Toeplitz kernel row and per-point quadrature-and-potential weights
    let norm = (n / std::f64::consts::TAU).sqrt();
    let kernel: Vec<f64> = (0..g_len)
        .map(|m| {
            let dx = m as f64 * grid.step;
            norm * (-0.5 * n * dx * dx).exp()
        })
        .collect();
    let weights: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(j, &x)| {
            let trap = if j == 0 || j == g_len - 1 { 0.5 } else { 1.0 };
            trap * grid.step * (-v(x) / n).exp()
        })
        .collect();
    let mut state: Vec<f64> = points.iter().map(|&x| psi0(x)).collect();
    let mut weighted = vec![0.0; g_len];
    for _ in 0..n_steps {
        for j in 0..g_len {
            weighted[j] = weights[j] * state[j];
        }
        let next: Vec<f64> = parallel_collect(g_len, |i| {
            let mut acc = 0.0;
            for (j, wj) in weighted.iter().enumerate() {
                acc += kernel[i.abs_diff(j)] * wj;
            }
            acc
        });
        state = next;
    }
    Ok(state)
}
