//! Scene-driven command line. Exit codes: 0 success, 1 mathematical or
//! validation inconsistency, 2 input error.

mod scene;

use clap::{Parser, Subcommand, ValueEnum};
use equiloc_core as core;
use equiloc_core::{Error as CoreError, Slice};
use scene::{build_model, build_sheaf, build_x, parse_x_arg, Scene};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "equiloc", version, about = "Fixed-point localization over characteristic cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClassArg {
    /// The constant class 1
    One,
    /// Equivariant Euler form of the tangent bundle
    Euler,
    /// exp(J + ω), Hamiltonian scaled by --t
    ExpHamiltonian,
}

#[derive(Subcommand)]
enum Command {
    /// List fixed points, tangent weights and Hamiltonians of the scene's manifold
    FixedPoints { scene: PathBuf },
    /// Enumerate realizable chambers with exact witnesses
    Chambers { scene: PathBuf },
    /// Attracting-cell decomposition in the chamber of X
    Bb {
        scene: PathBuf,
        #[arg(long = "X", allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Fixed-point multiplicities of the scene's sheaf in the chamber of X
    Multiplicities {
        scene: PathBuf,
        #[arg(long = "X", allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Localize an equivariant class over the sheaf's cycle at X
    Localize {
        scene: PathBuf,
        #[arg(long, value_enum)]
        class: ClassArg,
        /// Rational Hamiltonian scale for exp-hamiltonian (e.g. 1, 1/2, 0.25)
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        t: String,
        #[arg(long = "X", allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Compare the localized Euler form with the sheaf Euler characteristic
    GaussBonnet {
        scene: PathBuf,
        #[arg(long = "X", allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Fourier transform of the Duistermaat-Heckman measure at X
    Dh {
        scene: PathBuf,
        #[arg(long = "X", allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Evaluate multiplicities and the localized class once per chamber
    ChamberScan {
        scene: PathBuf,
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        t: String,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
    /// Run every consistency check the sheaf data admits
    Validate { scene: PathBuf },
    /// Numerical oracles (no scene required)
    Oracle {
        #[command(subcommand)]
        cmd: OracleCmd,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Direct sphere quadrature of e^{tH} against the area form
    Cp1Quadrature {
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = SchemeArg::GaussLegendre)]
        scheme: SchemeArg,
    },
    /// Gaussian fiber integral over a disk; converges to -2πi/β
    Gaussian {
        /// Complex β as "re,im"
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        /// Truncation radius; default 6/sqrt(|β|)
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, default_value_t = 128)]
        grid: usize,
    },
    /// Monte-Carlo pushforward of the Liouville measure; CSV histogram
    DhPushforward {
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Compare localized DH transforms against 1-D quadrature
    DhInvert {
        /// Comma-separated t values, e.g. "0.5,1,2"
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Midpoint,
    GaussLegendre,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("EQUILOC_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                CoreError::InconsistentSheaf(_) | CoreError::IncompatibleStratification(_) => {
                    ExitCode::from(1)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}

struct Loaded {
    model: core::GKMModel,
    sheaf: core::ConstructibleSheaf,
    scene: Scene,
}

fn load(path: &PathBuf) -> Result<Loaded, CoreError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CoreError::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let scene: Scene = serde_json::from_str(&text)
        .map_err(|e| CoreError::InvalidInput(format!("malformed scene JSON: {e}")))?;
    let model = build_model(&scene.manifold)?;
    let sheaf = build_sheaf(&model, &scene.sheaf)?;
    Ok(Loaded { model, sheaf, scene })
}

fn resolve_x(loaded: &Loaded, flag: &Option<String>) -> Result<core::CartanElement, CoreError> {
    match flag {
        Some(s) => parse_x_arg(s, loaded.model.rank),
        None => match &loaded.scene.x {
            Some(desc) => build_x(desc, loaded.model.rank),
            None => Err(CoreError::InvalidInput(
                "no X: pass --X or put an \"X\" object in the scene".into(),
            )),
        },
    }
}

fn class_of(
    model: &core::GKMModel,
    class: ClassArg,
    t: &str,
) -> Result<core::FixedPointClass, CoreError> {
    Ok(match class {
        ClassArg::One => core::one_class(model),
        ClassArg::Euler => core::euler_form_class(model),
        ClassArg::ExpHamiltonian => {
            let t = core::parse_rat(t)
                .ok_or_else(|| CoreError::InvalidInput(format!("cannot parse --t '{t}'")))?;
            core::exp_hamiltonian_class(model, &t)
        }
    })
}

fn result_json(r: &core::LocalizationResult) -> serde_json::Value {
    json!({
        "value_re": r.value.re,
        "value_im": r.value.im,
        "prefactor": {
            "sign": r.prefactor.sign,
            "two_pi_power": r.prefactor.two_pi_power,
            "i_power": r.prefactor.i_power,
        },
        "terms": r.terms.iter().map(|t| json!({
            "fixed_point": t.fixed_point,
            "m": t.m,
            "numerator": {"re": t.numerator.re, "im": t.numerator.im},
            "den": {"re": t.den.re, "im": t.den.im},
        })).collect::<Vec<_>>(),
        "warnings": r.warnings,
    })
}

fn emit(value: &serde_json::Value) {
    println!("{value}");
}

fn run(command: Command) -> Result<ExitCode, CoreError> {
    match command {
        Command::FixedPoints { scene } => {
            let loaded = load(&scene)?;
            let fps: Vec<_> = loaded
                .model
                .fixed_points
                .iter()
                .map(|fp| {
                    json!({
                        "name": fp.name,
                        "tangent_weights": fp.tangent_weights.iter().map(|w| w.0.clone()).collect::<Vec<_>>(),
                        "hamiltonian": fp.hamiltonian.iter().map(|h| h.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            emit(&json!({
                "kind": loaded.model.kind,
                "rank": loaded.model.rank,
                "dim": loaded.model.dim,
                "fixed_points": fps,
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Chambers { scene } => {
            let loaded = load(&scene)?;
            let chambers = core::enumerate_chambers(&loaded.model)?;
            emit(&json!({
                "count": chambers.len(),
                "chambers": chambers.iter().map(|c| json!({
                    "chamber": c.chamber,
                    "witness": c.witness.to_string(),
                })).collect::<Vec<_>>(),
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Bb { scene, x } => {
            let loaded = load(&scene)?;
            let x = resolve_x(&loaded, &x)?;
            let d = core::bb_decompose(&loaded.model, &x, loaded.scene.options.slice)?;
            emit(&json!({
                "chamber": d.chamber,
                "cells": d.cells.iter().map(|c| json!({
                    "fixed_point": c.fixed_point,
                    "dim_minus": c.dim_minus,
                    "negative_weights": c.negative_weights.iter().map(|w| w.0.clone()).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Multiplicities { scene, x } => {
            let loaded = load(&scene)?;
            let x = resolve_x(&loaded, &x)?;
            let mv = core::multiplicities(&loaded.model, &loaded.sheaf, &x, loaded.scene.options.slice)?;
            let m: serde_json::Map<String, serde_json::Value> = loaded
                .model
                .fixed_points
                .iter()
                .zip(&mv.m)
                .map(|(fp, &v)| (fp.name.clone(), json!(v)))
                .collect();
            emit(&json!({"chamber": mv.chamber, "m": m}));
            Ok(ExitCode::SUCCESS)
        }
        Command::Localize { scene, class, t, x } => {
            let loaded = load(&scene)?;
            let x = resolve_x(&loaded, &x)?;
            let cls = class_of(&loaded.model, class, &t)?;
            let r = core::sheaf_localize(&loaded.model, &loaded.sheaf, &cls, &x, loaded.scene.options.slice)?;
            emit(&result_json(&r));
            Ok(ExitCode::SUCCESS)
        }
        Command::GaussBonnet { scene, x } => {
            let loaded = load(&scene)?;
            let x = resolve_x(&loaded, &x)?;
            let g = core::gauss_bonnet(&loaded.model, &loaded.sheaf, &x, loaded.scene.options.slice)?;
            emit(&json!({
                "localized": g.localized.re,
                "combinatorial": g.combinatorial,
                "match": g.matched,
            }));
            Ok(if g.matched { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Dh { scene, x } => {
            let loaded = load(&scene)?;
            let x = resolve_x(&loaded, &x)?;
            let r = core::dh_fourier(&loaded.model, &loaded.sheaf, &x, loaded.scene.options.slice)?;
            emit(&result_json(&r));
            Ok(ExitCode::SUCCESS)
        }
        Command::ChamberScan { scene, class, t, format } => {
            let loaded = load(&scene)?;
            let cls = class_of(&loaded.model, class, &t)?;
            let rows = core::chamber_scan(&loaded.model, &loaded.sheaf, &cls)?;
            match format {
                FormatArg::Json => {
                    emit(&json!({
                        "strata": loaded.sheaf.strata.iter().map(|s| json!({
                            "name": s.name,
                            "chi_c": s.chi_c,
                            "stalk_euler": s.stalk_euler,
                        })).collect::<Vec<_>>(),
                        "euler_characteristic": core::euler_characteristic(&loaded.sheaf),
                        "rows": rows.iter().map(|r| json!({
                            "chamber": r.chamber,
                            "sample_x": r.sample_x,
                            "m": r.m,
                            "sum_m": r.sum_m,
                            "value_re": r.value.re,
                            "value_im": r.value.im,
                        })).collect::<Vec<_>>(),
                    }));
                }
                FormatArg::Csv => {
                    let names: Vec<String> = loaded
                        .model
                        .fixed_points
                        .iter()
                        .map(|fp| format!("m_{}", fp.name))
                        .collect();
                    println!("chamber,{},sum_m,value_re,value_im", names.join(","));
                    for r in &rows {
                        let ms: Vec<String> = r.m.iter().map(|v| v.to_string()).collect();
                        println!(
                            "{},{},{},{},{}",
                            r.chamber,
                            ms.join(","),
                            r.sum_m,
                            r.value.re,
                            r.value.im
                        );
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { scene } => {
            let loaded = load(&scene)?;
            let mut checks: Vec<String> = Vec::new();
            let mut violations: Vec<String> = Vec::new();
            match core::validate_cell_tables(&loaded.model, &loaded.sheaf) {
                Ok(()) => checks.push(format!(
                    "cell-table additivity over {} stored chamber(s)",
                    loaded.sheaf.cell_tables.len()
                )),
                Err(e) => violations.push(e.to_string()),
            }
            let chi = core::euler_characteristic(&loaded.sheaf);
            if violations.is_empty() {
                match core::enumerate_chambers(&loaded.model) {
                    Ok(chambers) => {
                        for cw in &chambers {
                            match core::multiplicities(&loaded.model, &loaded.sheaf, &cw.witness, Slice::Split) {
                                Ok(mv) => {
                                    if mv.total() != chi {
                                        violations.push(format!(
                                            "chamber {}: Σ m = {} differs from χ(F) = {chi}",
                                            cw.chamber,
                                            mv.total()
                                        ));
                                    }
                                    if let Ok(local) = core::multiplicities_local(
                                        &loaded.model,
                                        &loaded.sheaf,
                                        &cw.witness,
                                        Slice::Split,
                                    ) {
                                        if local.m != mv.m {
                                            violations.push(format!(
                                                "chamber {}: costalk multiplicities {:?} differ from global {:?}",
                                                cw.chamber, local.m, mv.m
                                            ));
                                        } else {
                                            checks.push(format!(
                                                "chamber {}: local = global multiplicities",
                                                cw.chamber
                                            ));
                                        }
                                    }
                                }
                                Err(e) => violations.push(format!("chamber {}: {e}", cw.chamber)),
                            }
                        }
                        checks.push(format!("Σ m = χ(F) = {chi} over {} chamber(s)", chambers.len()));
                    }
                    Err(e) => checks.push(format!("chamber sweep skipped: {e}")),
                }
            }
            let ok = violations.is_empty();
            emit(&json!({"ok": ok, "checks": checks, "violations": violations}));
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Oracle { cmd } => run_oracle(cmd),
    }
}

fn run_oracle(cmd: OracleCmd) -> Result<ExitCode, CoreError> {
    match cmd {
        OracleCmd::Cp1Quadrature { t, grid, scheme } => {
            let spec = match scheme {
                SchemeArg::Midpoint => core::QuadratureSpec::midpoint(grid),
                SchemeArg::GaussLegendre => core::QuadratureSpec::gauss_legendre(grid),
            };
            let value = core::quadrature_cp1(t, &spec)?;
            let expected = core::cp1_closed_form(t);
            emit(&json!({
                "t": t,
                "grid": grid,
                "value": value,
                "closed_form": expected,
                "rel_err": (value - expected).abs() / expected.abs().max(f64::MIN_POSITIVE),
            }));
            Ok(ExitCode::SUCCESS)
        }
        OracleCmd::Gaussian { beta, radius, grid } => {
            let parts: Vec<&str> = beta.split(',').collect();
            if parts.len() != 2 {
                return Err(CoreError::InvalidInput(format!("--beta wants 're,im', got '{beta}'")));
            }
            let re: f64 = parts[0].trim().parse().map_err(|_| {
                CoreError::InvalidInput(format!("cannot parse beta real part '{}'", parts[0]))
            })?;
            let im: f64 = parts[1].trim().parse().map_err(|_| {
                CoreError::InvalidInput(format!("cannot parse beta imaginary part '{}'", parts[1]))
            })?;
            let b = num::complex::Complex64::new(re, im);
            let radius = radius.unwrap_or_else(|| 6.0 / b.norm().sqrt());
            let v = core::gaussian_fiber_integral(b, radius, grid)?;
            let expected = num::complex::Complex64::new(0.0, -2.0 * std::f64::consts::PI) / b;
            emit(&json!({
                "beta": {"re": re, "im": im},
                "radius": radius,
                "grid": grid,
                "value": {"re": v.re, "im": v.im},
                "expected": {"re": expected.re, "im": expected.im},
                "abs_err": (v - expected).norm(),
            }));
            Ok(ExitCode::SUCCESS)
        }
        OracleCmd::DhPushforward { samples, seed, bins } => {
            let push = core::dh_pushforward_cp1(samples, seed, bins)?;
            println!("bin_lo,bin_hi,mass");
            for b in &push.bins {
                println!("{},{},{}", b.bin_lo, b.bin_hi, b.mass);
            }
            eprintln!(
                "seed={} samples={} kolmogorov={} mean={}",
                push.seed, push.samples, push.kolmogorov, push.mean
            );
            Ok(ExitCode::SUCCESS)
        }
        OracleCmd::DhInvert { t } => {
            let ts: Vec<f64> = if t.trim().is_empty() {
                Vec::new()
            } else {
                t.split(',')
                    .map(|s| {
                        s.trim().parse::<f64>().map_err(|_| {
                            CoreError::InvalidInput(format!("cannot parse t value '{s}'"))
                        })
                    })
                    .collect::<Result<_, _>>()?
            };
            let report = core::dh_inversion_check(&ts)?;
            emit(&json!({
                "rows": report.rows.iter().map(|r| json!({
                    "t": r.t,
                    "localized": r.localized,
                    "quadrature": r.quadrature,
                    "rel_err": r.rel_err,
                })).collect::<Vec<_>>(),
                "max_rel_err": report.max_rel_err,
            }));
            Ok(ExitCode::SUCCESS)
        }
    }
}
