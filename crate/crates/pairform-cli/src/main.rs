//! `pairform` — batch front end for the pairform engine.
//!
//! Every subcommand writes a machine-readable report (JSON by default, CSV
//! where the result is tabular) that embeds the fully resolved run
//! configuration, so identical invocations produce byte-identical output.
//! Exit codes: 0 success, 2 validation or usage error, 3 the computation ran
//! but did not converge within its level budget (the report is still
//! written). The `PAIRFORM_THREADS` environment variable caps the worker
//! count of the sampling loops; it never changes results.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pairform::cochain::{builtins, Cochain, FieldFn, RelativeCochain, ScalarFn};
use pairform::curvature;
use pairform::exprlang::{Bindings, Expr};
use pairform::integrate;
use pairform::mesh::{fan_disk, MeshKind, RefinementScheme, Triangulation};
use pairform::stochastic::{self, Grid1D, Jet2Integrand};
use pairform::vanest;

mod report;
use report::{Report, RunConfig};

#[derive(Parser)]
#[command(
    name = "pairform",
    about = "Riemann-like integration of forms, densities and stochastic integrands",
    version
)]
struct Cli {
    /// Output format: json or csv.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Report file path (stdout when omitted). Written atomically.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct MeshArgs {
    /// Mesh spec (`interval:a,b,k`, `kuhn_cube:n,k`, `octa_sphere:l`,
    /// `icosa_sphere:l`, `circle:k`, `flat_torus:k`, `fan_disk:k`,
    /// `random_disk:k,seed`) or a path to a mesh JSON file.
    #[arg(long)]
    mesh: String,
}

#[derive(Args, Clone)]
struct StudyArgs {
    /// Refinement scheme: barycentric or edge_midpoint.
    #[arg(long, default_value = "edge_midpoint")]
    scheme: String,
    /// Convergence tolerance on successive sums.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Maximum number of refinement levels.
    #[arg(long, default_value_t = 8)]
    max_levels: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or load a mesh, optionally refine it, and summarize it.
    Mesh {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Refinement scheme to apply `--levels` times.
        #[arg(long, default_value = "edge_midpoint")]
        scheme: String,
        #[arg(long, default_value_t = 0)]
        levels: usize,
        /// Save the (refined) mesh to this JSON file.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Refinement study of the Riemann-like sum of a cochain.
    Integrate {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Cochain spec, e.g. `builtin:antiderivative`, `builtin:left_riemann`,
        /// `builtin:det_volume`, `builtin:winding`, `builtin:density_measure`,
        /// `builtin:convex_hull`, `random_antisym:seed`.
        #[arg(long)]
        cochain: String,
        /// Scalar coefficient f (expr:...) for left_riemann.
        #[arg(long)]
        f: Option<String>,
        /// Antiderivative F (expr:...) for builtin:antiderivative.
        #[arg(long = "F")]
        big_f: Option<String>,
        /// Density h (expr:...) for builtin:density_measure.
        #[arg(long)]
        h: Option<String>,
        /// Top-form coefficient c (expr:...) for builtin:convex_hull.
        #[arg(long)]
        c: Option<String>,
        /// Quadrature order for hull/density cochains.
        #[arg(long, default_value_t = 2)]
        quad_order: usize,
        #[command(flatten)]
        study: StudyArgs,
    },
    /// Relative (interior minus boundary) pairing of a cochain pair.
    Relative {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Pair spec: `antiderivative` (with --F) or `flat-disk`.
        #[arg(long)]
        pair: String,
        #[arg(long = "F")]
        big_f: Option<String>,
    },
    /// Residual of the combinatorial Stokes identity.
    Stokes {
        #[command(flatten)]
        mesh: MeshArgs,
        /// Antisymmetric cochain spec (`random_antisym:seed` or
        /// `builtin:antiderivative` with --F on interval meshes).
        #[arg(long, default_value = "random_antisym:1")]
        cochain: String,
        #[arg(long = "F")]
        big_f: Option<String>,
    },
    /// Euler characteristic of a mesh.
    Euler {
        #[command(flatten)]
        mesh: MeshArgs,
    },
    /// Generalized Riemann-Stieltjes integral ∫ f dΩ (1-D: Ω = 0-cochain g).
    Rs {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long)]
        f: String,
        /// The 0-cochain g (expr:...) whose coboundary is integrated against.
        #[arg(long)]
        g: String,
        #[command(flatten)]
        study: StudyArgs,
    },
    /// Gauss-Bonnet sums per refinement level (sphere or flat-disk meshes).
    GaussBonnet {
        #[command(flatten)]
        mesh: MeshArgs,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value = "edge_midpoint")]
        scheme: String,
    },
    /// Monte Carlo mean of the Itô integral ∫ γ*(f dx).
    Ito {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1024)]
        steps: usize,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo mean of the Stratonovich integral ∫ γ*(f dx + ½f' dx²).
    Strat {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1024)]
        steps: usize,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// L² equivalence study of two representatives of one two-jet.
    JetStudy {
        #[arg(long)]
        f: String,
        /// Second representative compared against the canonical Itô one:
        /// `smooth` (endpoint-corrected, same two-jet, smooth remainder),
        /// `abscubic` (canonical plus a |Δx|³ term, same two-jet, rough
        /// remainder), or `endpoint` (f sampled at the right point — a
        /// deliberately mismatched jet whose difference converges to a
        /// nonzero constant).
        #[arg(long, default_value = "abscubic")]
        rep2: String,
        /// Grid sizes, repeatable: --steps 64 --steps 128 ...
        #[arg(long, required = true)]
        steps: Vec<usize>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Wiener-measure lattice evolution (imaginary-time path integral).
    FkLattice {
        /// Potential V (expr:...).
        #[arg(long, default_value = "expr:0")]
        potential: String,
        /// Initial state ψ₀ (expr:...).
        #[arg(long)]
        psi0: String,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long, default_value_t = -8.0)]
        xmin: f64,
        #[arg(long, default_value_t = 8.0)]
        xmax: f64,
        #[arg(long, default_value_t = 0.015625)]
        dx: f64,
    },
    /// Van Est residual checks on a builtin cochain.
    VeCheck {
        /// Cochain spec: `builtin:det_volume`, `builtin:left_riemann`,
        /// `builtin:antiderivative`.
        #[arg(long, default_value = "builtin:det_volume")]
        cochain: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        f: Option<String>,
        #[arg(long = "F")]
        big_f: Option<String>,
        /// Finite-difference step.
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

type CliError = String;

fn err<T>(e: impl std::fmt::Display) -> Result<T, CliError> {
    Err(e.to_string())
}

fn scalar_expr(spec: &str, what: &str) -> Result<(ScalarFn, String), CliError> {
    let Some(text) = spec.strip_prefix("expr:") else {
        return err(format!("{what} must be given as expr:<expression>"));
    };
    let parsed = Expr::parse(text).map_err(|e| format!("{what}: {e}"))?;
    let resolved = text.to_string();
    let f: ScalarFn = Arc::new(move |x: f64| parsed.evaluate(&Bindings::scalar(x)).unwrap_or(f64::NAN));
    Ok((f, resolved))
}

fn field_expr(spec: &str, what: &str) -> Result<(FieldFn, String), CliError> {
    let Some(text) = spec.strip_prefix("expr:") else {
        return err(format!("{what} must be given as expr:<expression>"));
    };
    let parsed = Expr::parse(text).map_err(|e| format!("{what}: {e}"))?;
    let resolved = text.to_string();
    let f: FieldFn =
        Arc::new(move |p: &[f64]| parsed.evaluate(&Bindings::point(p)).unwrap_or(f64::NAN));
    Ok((f, resolved))
}

fn load_mesh(spec: &str) -> Result<Triangulation, CliError> {
    if std::path::Path::new(spec).exists() {
        return Triangulation::load(spec).map_err(|e| e.to_string());
    }
    if let Some(rest) = spec.strip_prefix("fan_disk:") {
        let k: usize = rest.parse().map_err(|_| "fan_disk:k needs an integer".to_string())?;
        if k < 3 {
            return err("fan_disk needs k >= 3");
        }
        let polygon: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let theta = std::f64::consts::TAU * i as f64 / k as f64;
                vec![theta.cos(), theta.sin()]
            })
            .collect();
        return fan_disk(&polygon).map_err(|e| e.to_string());
    }
    if let Some(rest) = spec.strip_prefix("random_disk:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return err("random_disk spec is random_disk:k,seed");
        }
        let k: usize = parts[0].parse().map_err(|_| "bad k".to_string())?;
        let seed: u64 = parts[1].parse().map_err(|_| "bad seed".to_string())?;
        if k < 3 {
            return err("random_disk needs k >= 3");
        }
        let polygon: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                let theta = std::f64::consts::TAU * i as f64 / k as f64;
                let r = 0.6 + 0.8 * stochastic::draw_uniform(seed, i as u64);
                vec![r * theta.cos(), r * theta.sin()]
            })
            .collect();
        return fan_disk(&polygon).map_err(|e| e.to_string());
    }
    let kind: MeshKind = spec.parse().map_err(|e: pairform::mesh::MeshError| e.to_string())?;
    Triangulation::generate(&kind).map_err(|e| e.to_string())
}

fn parse_scheme(s: &str) -> Result<RefinementScheme, CliError> {
    s.parse::<RefinementScheme>().map_err(|e| e.to_string())
}

struct CochainSpec {
    cochain: Cochain,
    resolved: Vec<(String, String)>,
}

fn build_cochain(
    spec: &str,
    dim: usize,
    ambient: usize,
    f: Option<&str>,
    big_f: Option<&str>,
    h: Option<&str>,
    c: Option<&str>,
    quad_order: usize,
) -> Result<CochainSpec, CliError> {
    let mut resolved = vec![("cochain".to_string(), spec.to_string())];
    let cochain = match spec {
        "builtin:antiderivative" => {
            let (func, text) = scalar_expr(big_f.ok_or("builtin:antiderivative needs --F")?, "--F")?;
            resolved.push(("F".into(), text));
            builtins::antiderivative(func)
        }
        "builtin:left_riemann" => {
            let (func, text) = field_expr(f.ok_or("builtin:left_riemann needs --f")?, "--f")?;
            resolved.push(("f".into(), text));
            builtins::left_riemann(dim, func)
        }
        "builtin:det_volume" => builtins::det_volume(dim),
        "builtin:winding" => builtins::winding(vec![0.0, 0.0]),
        "builtin:euler" => builtins::euler(dim, ambient),
        "builtin:density_measure" => {
            let (func, text) = field_expr(h.ok_or("builtin:density_measure needs --h")?, "--h")?;
            resolved.push(("h".into(), text));
            resolved.push(("quad_order".into(), quad_order.to_string()));
            builtins::density_measure(dim, ambient, func, quad_order).map_err(|e| e.to_string())?
        }
        "builtin:convex_hull" => {
            let (func, text) = field_expr(c.ok_or("builtin:convex_hull needs --c")?, "--c")?;
            resolved.push(("c".into(), text));
            resolved.push(("quad_order".into(), quad_order.to_string()));
            let form = builtins::scalar_top_form(dim, func);
            builtins::convex_hull_cocycle(dim, ambient, form, quad_order)
                .map_err(|e| e.to_string())?
        }
        other => {
            if let Some(rest) = other.strip_prefix("random_antisym:") {
                let seed: u64 = rest.parse().map_err(|_| "bad random_antisym seed".to_string())?;
                builtins::random_fourier(seed, dim, ambient).antisymmetrize()
            } else {
                return err(format!("unknown cochain spec '{other}'"));
            }
        }
    };
    Ok(CochainSpec { cochain, resolved })
}

#[derive(Serialize)]
struct MeshSummary {
    dimension: usize,
    ambient_dim: usize,
    manifold_tag: String,
    n_vertices: usize,
    n_simplices: usize,
    mesh_size: f64,
    euler_characteristic: i64,
    boundary_simplices: usize,
}

#[derive(Serialize)]
struct ScalarResult {
    value: f64,
}

#[derive(Serialize)]
struct StokesResult {
    residual: f64,
    n_terms: usize,
    bound: f64,
    pass: bool,
}

#[derive(Serialize)]
struct GaussBonnetResult {
    kind: String,
    expected: f64,
    levels: Vec<GaussBonnetLevel>,
    max_error: f64,
}

#[derive(Serialize)]
struct GaussBonnetLevel {
    mesh_size: f64,
    n_simplices: usize,
    sum: f64,
}

#[derive(Serialize)]
struct MonteCarloMean {
    steps: usize,
    samples: usize,
    seed: u64,
    mean: f64,
    sample_sd: f64,
    std_error: f64,
}

#[derive(Serialize)]
struct LatticeResult {
    xmin: f64,
    dx: f64,
    steps: usize,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct VeCheckResult {
    van_est: f64,
    van_est_standard: f64,
    ratio: f64,
    expected_ratio: f64,
    commutation_residual: Option<f64>,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let format = cli.format.clone();
    if format != "json" && format != "csv" {
        return err("--format must be json or csv");
    }
    let output = cli.output.clone();
    let mut exit = ExitCode::SUCCESS;

    let report: Report = match &cli.command {
        Command::Mesh {
            mesh,
            scheme,
            levels,
            save,
        } => {
            let scheme_parsed = parse_scheme(scheme)?;
            let mut t = load_mesh(&mesh.mesh)?;
            for _ in 0..*levels {
                t = t.refine(scheme_parsed).map_err(|e| e.to_string())?;
            }
            if let Some(path) = save {
                t.save(path).map_err(|e| e.to_string())?;
            }
            let boundary_simplices = if t.dimension() > 0 {
                t.boundary().map_err(|e| e.to_string())?.n_simplices()
            } else {
                0
            };
            let summary = MeshSummary {
                dimension: t.dimension(),
                ambient_dim: t.ambient_dim(),
                manifold_tag: t.manifold_tag().to_string(),
                n_vertices: t.n_vertices(),
                n_simplices: t.n_simplices(),
                mesh_size: t.mesh_size(),
                euler_characteristic: integrate::euler_characteristic(&t)
                    .map_err(|e| e.to_string())?,
                boundary_simplices,
            };
            let config = RunConfig::new("mesh")
                .with("mesh", &mesh.mesh)
                .with("scheme", scheme)
                .with("levels", levels);
            Report::json(config, summary)
        }
        Command::Integrate {
            mesh,
            cochain,
            f,
            big_f,
            h,
            c,
            quad_order,
            study,
        } => {
            let t = load_mesh(&mesh.mesh)?;
            let scheme = parse_scheme(&study.scheme)?;
            let built = build_cochain(
                cochain,
                t.dimension(),
                t.ambient_dim(),
                f.as_deref(),
                big_f.as_deref(),
                h.as_deref(),
                c.as_deref(),
                *quad_order,
            )?;
            let report = integrate::integrate(&built.cochain, &t, scheme, study.tol, study.max_levels)
                .map_err(|e| e.to_string())?;
            if !report.converged {
                exit = ExitCode::from(3);
            }
            let mut config = RunConfig::new("integrate")
                .with("mesh", &mesh.mesh)
                .with("scheme", &study.scheme)
                .with("tol", &study.tol)
                .with("max_levels", &study.max_levels);
            for (k, v) in &built.resolved {
                config = config.with(k, v);
            }
            Report::convergence(config, report)
        }
        Command::Relative { mesh, pair, big_f } => {
            let t = load_mesh(&mesh.mesh)?;
            let (value, resolved_f) = match pair.as_str() {
                "antiderivative" => {
                    let (func, text) =
                        scalar_expr(big_f.as_deref().ok_or("pair antiderivative needs --F")?, "--F")?;
                    let rel = RelativeCochain::new(
                        builtins::antiderivative(func),
                        Cochain::zero(0, 1),
                    )
                    .map_err(|e| e.to_string())?;
                    (
                        integrate::relative_pairing(&rel, &t).map_err(|e| e.to_string())?,
                        Some(text),
                    )
                }
                "flat-disk" => (
                    curvature::flat_disk_pairing(&t).map_err(|e| e.to_string())?,
                    None,
                ),
                other => return err(format!("unknown pair spec '{other}'")),
            };
            let mut config = RunConfig::new("relative")
                .with("mesh", &mesh.mesh)
                .with("pair", pair);
            if let Some(text) = resolved_f {
                config = config.with("F", &text);
            }
            Report::json(config, ScalarResult { value })
        }
        Command::Stokes { mesh, cochain, big_f } => {
            let t = load_mesh(&mesh.mesh)?;
            if t.dimension() == 0 {
                return err("Stokes needs a mesh of dimension >= 1");
            }
            let built = build_cochain(
                cochain,
                t.dimension() - 1,
                t.ambient_dim(),
                None,
                big_f.as_deref(),
                None,
                None,
                0,
            )?;
            let residual = integrate::stokes_check(&built.cochain, &t).map_err(|e| e.to_string())?;
            let boundary = t.boundary().map_err(|e| e.to_string())?;
            let n_terms = t.n_simplices() * (t.dimension() + 2) + boundary.n_simplices();
            let bound = 1e-12 * n_terms as f64;
            let mut config = RunConfig::new("stokes").with("mesh", &mesh.mesh);
            for (k, v) in &built.resolved {
                config = config.with(k, v);
            }
            Report::json(
                config,
                StokesResult {
                    residual,
                    n_terms,
                    bound,
                    pass: residual <= bound,
                },
            )
        }
        Command::Euler { mesh } => {
            let t = load_mesh(&mesh.mesh)?;
            let chi = integrate::euler_characteristic(&t).map_err(|e| e.to_string())?;
            let config = RunConfig::new("euler").with("mesh", &mesh.mesh);
            Report::chi(config, chi)
        }
        Command::Rs { mesh, f, g, study } => {
            let t = load_mesh(&mesh.mesh)?;
            let scheme = parse_scheme(&study.scheme)?;
            let (ff, f_text) = field_expr(f, "--f")?;
            let (gf, g_text) = field_expr(g, "--g")?;
            let g_cochain = Cochain::from_fn(
                0,
                t.ambient_dim(),
                f64::INFINITY,
                pairform::cochain::SymmetryTag::None,
                true,
                move |tuple| gf(tuple[0]),
            );
            let report =
                integrate::rs_integral(ff, &g_cochain, &t, scheme, study.tol, study.max_levels)
                    .map_err(|e| e.to_string())?;
            if !report.converged {
                exit = ExitCode::from(3);
            }
            let config = RunConfig::new("rs")
                .with("mesh", &mesh.mesh)
                .with("f", &f_text)
                .with("g", &g_text)
                .with("scheme", &study.scheme)
                .with("tol", &study.tol)
                .with("max_levels", &study.max_levels);
            Report::convergence(config, report)
        }
        Command::GaussBonnet { mesh, levels, scheme } => {
            let scheme_parsed = parse_scheme(scheme)?;
            let mut t = load_mesh(&mesh.mesh)?;
            let is_sphere = t.manifold_tag() == pairform::mesh::ManifoldTag::Sphere;
            let expected = if is_sphere {
                4.0 * std::f64::consts::PI
            } else {
                2.0 * std::f64::consts::PI
            };
            let mut recs = Vec::new();
            let mut max_error: f64 = 0.0;
            for level in 0..=*levels {
                if level > 0 {
                    t = t.refine(scheme_parsed).map_err(|e| e.to_string())?;
                }
                let sum = if is_sphere {
                    curvature::gauss_bonnet_sphere(&t).map_err(|e| e.to_string())?
                } else {
                    curvature::flat_disk_pairing(&t).map_err(|e| e.to_string())?
                };
                max_error = max_error.max((sum - expected).abs());
                recs.push(GaussBonnetLevel {
                    mesh_size: t.mesh_size(),
                    n_simplices: t.n_simplices(),
                    sum,
                });
            }
            let config = RunConfig::new("gauss-bonnet")
                .with("mesh", &mesh.mesh)
                .with("levels", levels)
                .with("scheme", scheme);
            Report::gauss_bonnet(
                config,
                GaussBonnetResult {
                    kind: if is_sphere { "sphere".into() } else { "flat_disk".into() },
                    expected,
                    levels: recs,
                    max_error,
                },
            )
        }
        Command::Ito { f, steps, samples, seed } => {
            let (func, f_text) = scalar_expr(f, "--f")?;
            let (mean, sd) = stochastic::monte_carlo_paths(*steps, *samples, *seed, |p| {
                stochastic::ito(func.clone(), p)
            })
            .map_err(|e| e.to_string())?;
            let config = RunConfig::new("ito")
                .with("f", &f_text)
                .with("steps", steps)
                .with("samples", samples)
                .with("seed", seed);
            Report::json(
                config,
                MonteCarloMean {
                    steps: *steps,
                    samples: *samples,
                    seed: *seed,
                    mean,
                    sample_sd: sd,
                    std_error: sd / (*samples as f64).sqrt(),
                },
            )
        }
        Command::Strat { f, steps, samples, seed } => {
            let (func, f_text) = scalar_expr(f, "--f")?;
            let (mean, sd) = stochastic::monte_carlo_paths(*steps, *samples, *seed, |p| {
                stochastic::stratonovich(func.clone(), None, p)
            })
            .map_err(|e| e.to_string())?;
            let config = RunConfig::new("strat")
                .with("f", &f_text)
                .with("steps", steps)
                .with("samples", samples)
                .with("seed", seed);
            Report::json(
                config,
                MonteCarloMean {
                    steps: *steps,
                    samples: *samples,
                    seed: *seed,
                    mean,
                    sample_sd: sd,
                    std_error: sd / (*samples as f64).sqrt(),
                },
            )
        }
        Command::JetStudy {
            f,
            rep2,
            steps,
            samples,
            seed,
        } => {
            let (func, f_text) = scalar_expr(f, "--f")?;
            let jet = Jet2Integrand::ito(func.clone());
            let omega1 = stochastic::canonical_cochain(&jet);
            let f2 = func.clone();
            // The sampled jet check assumes smooth representatives; for the
            // |Δx|³ pair the two-jet equality is exact by construction but
            // not certifiable by finite differences, so the check is skipped.
            let (omega2, check) = match rep2.as_str() {
                "smooth" => (
                    Cochain::from_fn(
                        1,
                        1,
                        f64::INFINITY,
                        pairform::cochain::SymmetryTag::None,
                        true,
                        move |t| {
                            let dx = t[1][0] - t[0][0];
                            let h = 1e-6 * (1.0 + t[0][0].abs());
                            let df = (f2(t[0][0] + h) - f2(t[0][0] - h)) / (2.0 * h);
                            f2(t[1][0]) * dx - df * dx * dx
                        },
                    ),
                    true,
                ),
                "abscubic" => (
                    Cochain::from_fn(
                        1,
                        1,
                        f64::INFINITY,
                        pairform::cochain::SymmetryTag::None,
                        true,
                        move |t| {
                            let dx = t[1][0] - t[0][0];
                            f2(t[0][0]) * dx + dx.abs().powi(3)
                        },
                    ),
                    false,
                ),
                // deliberately mismatched jet: g differs by f'
                "endpoint" => (
                    Cochain::from_fn(
                        1,
                        1,
                        f64::INFINITY,
                        pairform::cochain::SymmetryTag::None,
                        true,
                        move |t| f2(t[1][0]) * (t[1][0] - t[0][0]),
                    ),
                    false,
                ),
                other => return err(format!("unknown rep2 '{other}'")),
            };
            let report = stochastic::l2_equivalence_study(
                &omega1, &omega2, steps, *samples, *seed, check,
            )
            .map_err(|e| e.to_string())?;
            let config = RunConfig::new("jet-study")
                .with("f", &f_text)
                .with("rep2", rep2)
                .with("steps", &format!("{steps:?}"))
                .with("samples", samples)
                .with("seed", seed)
                .with("check_jets", &check);
            Report::monte_carlo(config, report)
        }
        Command::FkLattice {
            potential,
            psi0,
            steps,
            xmin,
            xmax,
            dx,
        } => {
            let (v, v_text) = scalar_expr(potential, "--potential")?;
            let (p0, p0_text) = scalar_expr(psi0, "--psi0")?;
            let grid = Grid1D::new(*xmin, *xmax, *dx).map_err(|e| e.to_string())?;
            let values =
                stochastic::feynman_kac_lattice(&v, &p0, *steps, &grid).map_err(|e| e.to_string())?;
            let config = RunConfig::new("fk-lattice")
                .with("potential", &v_text)
                .with("psi0", &p0_text)
                .with("steps", steps)
                .with("xmin", xmin)
                .with("xmax", xmax)
                .with("dx", dx);
            Report::lattice(
                config,
                LatticeResult {
                    xmin: *xmin,
                    dx: *dx,
                    steps: *steps,
                    values,
                },
            )
        }
        Command::VeCheck {
            cochain,
            dim,
            f,
            big_f,
            step,
        } => {
            let (omega, resolved) = match cochain.as_str() {
                "builtin:det_volume" => (builtins::det_volume(*dim), Vec::new()),
                "builtin:left_riemann" => {
                    let (func, text) = field_expr(f.as_deref().ok_or("needs --f")?, "--f")?;
                    (builtins::left_riemann(*dim, func), vec![("f".to_string(), text)])
                }
                "builtin:antiderivative" => {
                    let (func, text) = scalar_expr(big_f.as_deref().ok_or("needs --F")?, "--F")?;
                    (builtins::antiderivative(func), vec![("F".to_string(), text)])
                }
                other => return err(format!("unknown cochain spec '{other}'")),
            };
            let n = omega.degree();
            let x = vec![0.3; omega.ambient_dim()];
            let vectors: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    (0..omega.ambient_dim())
                        .map(|j| if i == j { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect();
            let ve = vanest::van_est(&omega, &x, &vectors, *step).map_err(|e| e.to_string())?;
            let ve_std =
                vanest::van_est_standard(&omega, &x, &vectors, *step).map_err(|e| e.to_string())?;
            let d = omega.ambient_dim();
            let commute_vectors: Vec<Vec<f64>> = (0..=n)
                .map(|i| (0..d).map(|j| if i % d == j { 1.0 } else { 0.0 }).collect())
                .collect();
            let commutation =
                vanest::ve_delta_commutation(&omega.antisymmetrize(), &x, &commute_vectors, *step)
                    .ok();
            let mut config = RunConfig::new("ve-check")
                .with("cochain", cochain)
                .with("dim", dim)
                .with("step", step);
            for (k, v) in &resolved {
                config = config.with(k, v);
            }
            Report::json(
                config,
                VeCheckResult {
                    van_est: ve,
                    van_est_standard: ve_std,
                    ratio: ve_std / ve,
                    expected_ratio: (1..=n as u64).product::<u64>() as f64,
                    commutation_residual: commutation,
                },
            )
        }
    };

    report.emit(&format, output.as_deref())?;
    Ok(exit)
}
