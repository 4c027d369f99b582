//! The six subcommands and their option surfaces.
//!
//! Every run setting resolves as flag > config file > default (the seed
//! additionally consults THERMOWALK_SEED before its default). Primary
//! outputs are grid files whose bytes depend only on the experiment
//! configuration, never on worker count or wall time; timing and
//! machine-local details go to the JSON summary on stdout instead.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use serde_json::json;

use thermowalk_core::analysis::{
    compare_grids, fit_soret, noise_uniformity, normalized_difference, SoretSample,
};
use thermowalk_core::fields::{coefficients_from_temperature, SpeedModel, WalkProfile};
use thermowalk_core::fvm::{analytic_steady, apply_operator, FluxLaw, Solver};
use thermowalk_core::mc::{histogram, init_ensemble, variance, EvalMode, StepOptions};
use thermowalk_core::{DomainSpec, Error, FieldGrid, Result};

use crate::config::{
    parse_cells, parse_linear, require, resolve, resolve_opt, resolve_seed, Settings,
};
use crate::gridfile;
use crate::parallel::simulate_threaded;

const DEFAULT_DIFFUSIVITY: f64 = 0.005;
const DEFAULT_TOL: f64 = 1e-10;
const DEFAULT_MAX_STEPS: u64 = 100_000_000;

/// Walk-profile selection shared by the ensemble commands and the
/// profile-driven solver setups.
#[derive(Args, Debug, Clone)]
pub struct ProfileArgs {
    /// Built-in profile: paper-fig2, constant, or sqrt-temperature
    #[arg(long)]
    pub profile: Option<String>,
    /// Grid file with the step-length field (requires --profile-dt)
    #[arg(long, value_name = "PATH")]
    pub profile_dx: Option<PathBuf>,
    /// Grid file with the step-duration field (requires --profile-dx)
    #[arg(long, value_name = "PATH")]
    pub profile_dt: Option<PathBuf>,
    /// Step length for the constant profile
    #[arg(long)]
    pub dx: Option<f64>,
    /// Step duration for the constant profile
    #[arg(long)]
    pub dt: Option<f64>,
    /// Domain dimension for built-in profiles (1 or 2)
    #[arg(long)]
    pub dim: Option<usize>,
    /// Domain edge length for built-in profiles
    #[arg(long)]
    pub extent: Option<f64>,
    /// Linear temperature "a,b" meaning T = a + b x
    #[arg(long)]
    pub temp: Option<String>,
    /// Constant diffusivity used with --temp
    #[arg(long)]
    pub d: Option<f64>,
}

/// A resolved profile plus the name recorded in output metadata.
struct BuiltProfile {
    profile: WalkProfile,
    name: String,
}

fn build_profile(args: &ProfileArgs, settings: &Settings) -> Result<BuiltProfile> {
    let dx_path = resolve_opt(args.profile_dx.clone(), settings, "profile_dx")?;
    let dt_path = resolve_opt(args.profile_dt.clone(), settings, "profile_dt")?;
    match (dx_path, dt_path) {
        (Some(dx), Some(dt)) => {
            let (dx_grid, _) = gridfile::read(&dx)?;
            let (dt_grid, _) = gridfile::read(&dt)?;
            return Ok(BuiltProfile {
                profile: WalkProfile::sampled(dx_grid, dt_grid)?,
                name: String::from("sampled"),
            });
        }
        (None, None) => {}
        _ => {
            return Err(Error::Config(String::from(
                "--profile-dx and --profile-dt must be given together",
            )));
        }
    }
    let name = resolve(
        args.profile.clone(),
        settings,
        "profile",
        String::from("paper-fig2"),
    )?;
    let extent = resolve(args.extent, settings, "extent", 1.0)?;
    let profile = match name.as_str() {
        "paper-fig2" => WalkProfile::quadratic_bowl(),
        "constant" => {
            let dim = resolve(args.dim, settings, "dim", 2usize)?;
            let dx = resolve(args.dx, settings, "dx", 0.01)?;
            let dt = resolve(args.dt, settings, "dt", 0.01)?;
            let domain = match dim {
                1 => DomainSpec::line(extent, 1)?,
                2 => DomainSpec::rect(extent, extent, 1, 1)?,
                _ => return Err(Error::Config(format!("dim must be 1 or 2, got {dim}"))),
            };
            WalkProfile::constant(domain, dx, dt)?
        }
        "sqrt-temperature" => {
            let (a, b) = parse_linear(&resolve(
                args.temp.clone(),
                settings,
                "temp",
                String::from("1,1"),
            )?)?;
            let d = resolve(args.d, settings, "d", DEFAULT_DIFFUSIVITY)?;
            WalkProfile::sqrt_temperature(DomainSpec::line(extent, 1)?, a, b, d)?
        }
        other => {
            return Err(Error::Config(format!(
                "unknown profile '{other}' (expected paper-fig2, constant, or sqrt-temperature)"
            )));
        }
    };
    Ok(BuiltProfile { profile, name })
}

fn eval_mode(raw: &str) -> Result<EvalMode> {
    match raw {
        "departure" => Ok(EvalMode::Departure),
        "midpoint" => Ok(EvalMode::Midpoint),
        other => Err(Error::Config(format!(
            "unknown eval mode '{other}' (expected departure or midpoint)"
        ))),
    }
}

fn write_outputs(
    out: &Path,
    grid: &FieldGrid,
    meta: &[(String, String)],
    emit_plot: bool,
) -> Result<()> {
    gridfile::write(out, grid, meta)?;
    if emit_plot {
        let mut plot = out.as_os_str().to_owned();
        plot.push(".plot.csv");
        gridfile::write_plot_data(Path::new(&plot), grid)?;
    }
    Ok(())
}

fn meta(key: &str, value: impl ToString) -> (String, String) {
    (key.to_string(), value.to_string())
}

#[derive(Args, Debug)]
pub struct McArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Number of walkers
    #[arg(long)]
    pub particles: Option<usize>,
    /// Time horizon every walker is advanced to
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Histogram bins: "n" or "nx,ny"
    #[arg(long)]
    pub bins: Option<String>,
    /// Master seed (default 42; THERMOWALK_SEED overrides the default)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (affects wall time only, never results)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Where the step fields are evaluated: departure or midpoint
    #[arg(long)]
    pub eval: Option<String>,
    /// Output grid file (default mc.csv)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write <out>.plot.csv with x,y,value rows
    #[arg(long)]
    pub emit_plot_data: bool,
    /// Flat key=value config file supplying defaults for these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn cmd_mc(args: &McArgs) -> Result<()> {
    let settings = Settings::load_optional(args.config.as_deref())?;
    let built = build_profile(&args.profile, &settings)?;
    let particles = require(args.particles, &settings, "particles")?;
    let t_final = require(args.t_final, &settings, "t_final")?;
    let seed = resolve_seed(args.seed, &settings)?;
    let workers = resolve(args.workers, &settings, "workers", 1usize)?;
    let bins_raw = resolve(args.bins.clone(), &settings, "bins", String::from("50"))?;
    let dim = built.profile.domain().dim();
    let bins = parse_cells(&bins_raw, dim)?;
    let eval_raw = resolve(args.eval.clone(), &settings, "eval", String::from("departure"))?;
    let opts = StepOptions { eval: eval_mode(&eval_raw)?, ..StepOptions::default() };
    let out = resolve(args.out.clone(), &settings, "out", PathBuf::from("mc.csv"))?;

    let mut ens = init_ensemble(built.profile.domain(), particles, seed)?;
    let start = Instant::now();
    let report = simulate_threaded(&mut ens, &built.profile, t_final, &opts, workers)?;
    let elapsed = start.elapsed().as_secs_f64();
    let grid = histogram(&ens, bins)?;

    let header = [
        meta("command", "mc"),
        meta("profile", &built.name),
        meta("particles", particles),
        meta("t_final", t_final),
        meta("seed", seed),
        meta("eval", &eval_raw),
        meta("steps", report.total_steps),
        meta("normalization", "mean-1"),
    ];
    write_outputs(&out, &grid, &header, args.emit_plot_data)?;
    println!(
        "{}",
        json!({
            "command": "mc",
            "profile": built.name,
            "particles": particles,
            "t_final": t_final,
            "seed": seed,
            "workers": workers,
            "steps": report.total_steps,
            "elapsed_seconds": elapsed,
            "out": out.display().to_string(),
        })
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct LawArgs {
    /// Flux law: fick, chapman, vankampen, randomwalk, or thermophoretic
    #[arg(long)]
    pub law: Option<String>,
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Diffusivity field grid file
    #[arg(long, value_name = "PATH")]
    pub field_d: Option<PathBuf>,
    /// Walk-speed field grid file
    #[arg(long, value_name = "PATH")]
    pub field_s: Option<PathBuf>,
    /// Conductivity field grid file (fick, chapman)
    #[arg(long, value_name = "PATH")]
    pub field_kappa: Option<PathBuf>,
    /// Temperature field grid file
    #[arg(long, value_name = "PATH")]
    pub field_t: Option<PathBuf>,
    /// Thermal-diffusivity field grid file (thermophoretic)
    #[arg(long, value_name = "PATH")]
    pub field_dtherm: Option<PathBuf>,
    /// Solver grid: "n" or "nx,ny" (built-in coefficient sources)
    #[arg(long)]
    pub cells: Option<String>,
}

/// Everything needed to instantiate coefficient grids for a law.
struct LawSetup {
    law: FluxLaw,
    law_name: String,
}

fn read_opt(path: &Option<PathBuf>) -> Result<Option<FieldGrid>> {
    match path {
        Some(p) => Ok(Some(gridfile::read(p)?.0)),
        None => Ok(None),
    }
}

fn build_law(args: &LawArgs, settings: &Settings) -> Result<LawSetup> {
    let law_name = require(args.law.clone(), settings, "law")?.to_lowercase();

    let g_d = read_opt(&args.field_d)?;
    let g_s = read_opt(&args.field_s)?;
    let g_kappa = read_opt(&args.field_kappa)?;
    let g_t = read_opt(&args.field_t)?;
    let g_dtherm = read_opt(&args.field_dtherm)?;

    let has_profile = args.profile.profile.is_some()
        || args.profile.profile_dx.is_some()
        || settings.get_raw("profile").is_some()
        || settings.get_raw("profile_dx").is_some();
    let temp_spec = resolve_opt(args.profile.temp.clone(), settings, "temp")?;
    let d_const = resolve(args.profile.d, settings, "d", DEFAULT_DIFFUSIVITY)?;

    // the grid shape: taken from the first field file, else built from
    // --cells (default 100) on the profile/temperature domain
    let file_domain = [&g_d, &g_s, &g_kappa, &g_t, &g_dtherm]
        .into_iter()
        .flatten()
        .next()
        .map(|g| g.domain().clone());

    let built = if has_profile { Some(build_profile(&args.profile, settings)?) } else { None };

    let domain = match &file_domain {
        Some(d) => d.clone(),
        None => {
            let dim = match (&built, &temp_spec) {
                (Some(b), _) => b.profile.domain().dim(),
                (None, Some(_)) => 1,
                (None, None) => resolve(args.profile.dim, settings, "dim", 2usize)?,
            };
            let extent = resolve(args.profile.extent, settings, "extent", 1.0)?;
            let cells_raw = resolve(args.cells.clone(), settings, "cells", String::from("100"))?;
            let cells = parse_cells(&cells_raw, dim)?;
            if dim == 1 {
                DomainSpec::line(extent, cells[0])?
            } else {
                DomainSpec::rect(extent, extent, cells[0], cells[1])?
            }
        }
    };
    let cells = domain.cells();

    // coefficient grids derived from the temperature, when one is given
    let temp_grid = match (&g_t, &temp_spec) {
        (Some(g), _) => Some(g.clone()),
        (None, Some(raw)) => {
            let (a, b) = parse_linear(raw)?;
            Some(FieldGrid::from_fn(domain.clone(), |p| a + b * p[0]))
        }
        (None, None) => None,
    };

    let diffusivity = |src: &Option<FieldGrid>| -> Result<FieldGrid> {
        if let Some(g) = src {
            return Ok(g.clone());
        }
        if let Some(b) = &built {
            return b.profile.diffusivity_grid(cells);
        }
        Ok(FieldGrid::constant(domain.clone(), d_const))
    };

    let law = match law_name.as_str() {
        "fick" | "chapman" => {
            let kappa = if let Some(g) = &g_kappa {
                g.clone()
            } else if let Some(b) = &built {
                b.profile.diffusivity_grid(cells)?
            } else if temp_grid.is_some() || args.profile.d.is_some() {
                FieldGrid::constant(domain.clone(), d_const)
            } else {
                return Err(Error::Config(format!(
                    "law {law_name} needs --field-kappa, a profile, or --d"
                )));
            };
            if law_name == "fick" {
                FluxLaw::Fick { kappa }
            } else {
                FluxLaw::Chapman { kappa }
            }
        }
        "randomwalk" => {
            let (d, s) = if g_d.is_some() && g_s.is_some() {
                (g_d.clone().unwrap(), g_s.clone().unwrap())
            } else if let Some(b) = &built {
                (b.profile.diffusivity_grid(cells)?, b.profile.speed_grid(cells)?)
            } else if let Some(t) = &temp_grid {
                let d = diffusivity(&g_d)?;
                let set = coefficients_from_temperature(t, &d, &SpeedModel::sqrt())?;
                (set.diffusivity, set.speed)
            } else {
                return Err(Error::Config(String::from(
                    "law randomwalk needs --field-d/--field-s, a profile, or --temp",
                )));
            };
            FluxLaw::RandomWalk { d, s }
        }
        "vankampen" => {
            let t = temp_grid.clone().ok_or_else(|| {
                Error::Config(String::from("law vankampen needs --field-t or --temp"))
            })?;
            FluxLaw::VanKampen { d: diffusivity(&g_d)?, temp: t }
        }
        "thermophoretic" => {
            let t = temp_grid.clone().ok_or_else(|| {
                Error::Config(String::from("law thermophoretic needs --field-t or --temp"))
            })?;
            let d = diffusivity(&g_d)?;
            let d_t = if let Some(g) = &g_dtherm {
                g.clone()
            } else {
                coefficients_from_temperature(&t, &d, &SpeedModel::sqrt())?.thermal_diffusivity
            };
            FluxLaw::Thermophoretic { d, d_t, temp: t }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown law '{other}' (expected fick, chapman, vankampen, randomwalk, or thermophoretic)"
            )));
        }
    };
    law.validate()?;
    Ok(LawSetup { law, law_name })
}

#[derive(Args, Debug)]
pub struct PdeArgs {
    #[command(flatten)]
    pub law: LawArgs,
    /// Iterate until the residual drops below --tol
    #[arg(long)]
    pub steady: bool,
    /// Integrate to a fixed horizon instead of steady state
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Steady-state residual threshold
    #[arg(long)]
    pub tol: Option<f64>,
    /// Step cap for the steady-state iteration
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Initial density grid file (default: uniform)
    #[arg(long, value_name = "PATH")]
    pub u0: Option<PathBuf>,
    /// Output grid file (default pde.csv)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write <out>.plot.csv with x,y,value rows
    #[arg(long)]
    pub emit_plot_data: bool,
    /// Flat key=value config file supplying defaults for these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn cmd_pde(args: &PdeArgs) -> Result<()> {
    let settings = Settings::load_optional(args.config.as_deref())?;
    let setup = build_law(&args.law, &settings)?;
    let steady = resolve(args.steady.then_some(true), &settings, "steady", false)?;
    let t_final = resolve_opt(args.t_final, &settings, "t_final")?;
    if steady == t_final.is_some() {
        return Err(Error::Config(String::from(
            "pass exactly one of --steady or --t-final",
        )));
    }
    let tol = resolve(args.tol, &settings, "tol", DEFAULT_TOL)?;
    let max_steps = resolve(args.max_steps, &settings, "max_steps", DEFAULT_MAX_STEPS)?;
    let out = resolve(args.out.clone(), &settings, "out", PathBuf::from("pde.csv"))?;

    let u0 = match read_opt(&args.u0)? {
        Some(g) => g,
        None => FieldGrid::constant(setup.law.domain().clone(), 1.0),
    };
    let mut solver = Solver::new(setup.law.clone(), u0)?;
    let start = Instant::now();
    let steps = if steady {
        solver.run_to_steady(tol, max_steps)?.steps
    } else {
        solver.run_to_time(t_final.unwrap())?
    };
    let elapsed = start.elapsed().as_secs_f64();
    let grid = solver.normalized_density()?;
    // final residual measured on the converged state, for both modes
    let residual =
        apply_operator(&setup.law, solver.density())?.values().iter().fold(0.0f64, |m, v| {
            m.max(v.abs())
        });

    let [nx, ny] = grid.domain().cells();
    let mut header = vec![
        meta("command", "pde"),
        meta("law", &setup.law_name),
        meta("cells", if grid.domain().dim() == 1 { format!("{nx}") } else { format!("{nx},{ny}") }),
        meta("dt", solver.dt()),
        meta("steps", steps),
        meta("residual", residual),
        meta("normalization", "mean-1"),
    ];
    if steady {
        header.push(meta("tol", tol));
    } else {
        header.push(meta("t_final", t_final.unwrap()));
    }
    write_outputs(&out, &grid, &header, args.emit_plot_data)?;
    println!(
        "{}",
        json!({
            "command": "pde",
            "law": setup.law_name,
            "steps": steps,
            "dt": solver.dt(),
            "residual": residual,
            "mass_drift": solver.mass_drift(),
            "elapsed_seconds": elapsed,
            "out": out.display().to_string(),
        })
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct SteadyArgs {
    #[command(flatten)]
    pub law: LawArgs,
    /// Output grid file (default steady.csv)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write <out>.plot.csv with x,y,value rows
    #[arg(long)]
    pub emit_plot_data: bool,
    /// Flat key=value config file supplying defaults for these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn cmd_steady(args: &SteadyArgs) -> Result<()> {
    let settings = Settings::load_optional(args.config.as_deref())?;
    let setup = build_law(&args.law, &settings)?;
    let out = resolve(args.out.clone(), &settings, "out", PathBuf::from("steady.csv"))?;
    let grid = analytic_steady(&setup.law)?;
    let header = [
        meta("command", "steady"),
        meta("law", &setup.law_name),
        meta("normalization", "mean-1"),
    ];
    write_outputs(&out, &grid, &header, args.emit_plot_data)?;
    println!(
        "{}",
        json!({
            "command": "steady",
            "law": setup.law_name,
            "out": out.display().to_string(),
        })
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// First grid file
    pub a: PathBuf,
    /// Second grid file (the reference for relative measures)
    pub b: PathBuf,
    /// Write the normalized difference grid here
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write <out>.plot.csv with x,y,value rows
    #[arg(long)]
    pub emit_plot_data: bool,
}

pub fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let (ga, _) = gridfile::read(&args.a)?;
    let (gb, _) = gridfile::read(&args.b)?;
    let report = compare_grids(&ga, &gb)?;
    let diff = normalized_difference(&ga, &gb)?;
    let ratio = noise_uniformity(&diff).ok().map(|u| u.ratio);
    if let Some(out) = &args.out {
        let header = [meta("command", "compare"), meta("normalization", "mean-1")];
        write_outputs(out, &diff, &header, args.emit_plot_data)?;
    }
    let mut doc = json!({
        "l1": report.l1,
        "l2": report.l2,
        "linf": report.linf,
        "rms": report.rms,
        "bias": report.bias,
    });
    if let Some(r) = ratio {
        doc["uniformity_ratio"] = json!(r);
    }
    println!("{doc}");
    Ok(())
}

#[derive(Args, Debug)]
pub struct SoretArgs {
    /// Flux law for the steady profile: randomwalk or vankampen
    #[arg(long)]
    pub law: Option<String>,
    /// Linear temperature "a,b" meaning T = a + b x
    #[arg(long)]
    pub temp: Option<String>,
    /// Temperature field grid file (1D) instead of --temp
    #[arg(long, value_name = "PATH")]
    pub field_t: Option<PathBuf>,
    /// Number of cells for the built-in temperature
    #[arg(long)]
    pub cells: Option<String>,
    /// Domain length for the built-in temperature
    #[arg(long)]
    pub extent: Option<f64>,
    /// Constant diffusivity
    #[arg(long)]
    pub d: Option<f64>,
    /// Steady-state residual threshold
    #[arg(long)]
    pub tol: Option<f64>,
    /// Step cap for the steady-state iteration
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Write the local S_T table (x, temperature, s_t, s_t_sqrt_model)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat key=value config file supplying defaults for these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn cmd_soret(args: &SoretArgs) -> Result<()> {
    let settings = Settings::load_optional(args.config.as_deref())?;
    let law_name =
        resolve(args.law.clone(), &settings, "law", String::from("randomwalk"))?.to_lowercase();
    let d_const = resolve(args.d, &settings, "d", DEFAULT_DIFFUSIVITY)?;
    let tol = resolve(args.tol, &settings, "tol", DEFAULT_TOL)?;
    let max_steps = resolve(args.max_steps, &settings, "max_steps", DEFAULT_MAX_STEPS)?;

    let temp = match read_opt(&args.field_t)? {
        Some(g) => {
            if g.domain().dim() != 1 {
                return Err(Error::Config(String::from("soret needs a 1D temperature grid")));
            }
            g
        }
        None => {
            let (a, b) =
                parse_linear(&resolve(args.temp.clone(), &settings, "temp", String::from("1,1"))?)?;
            let cells_raw = resolve(args.cells.clone(), &settings, "cells", String::from("200"))?;
            let cells = parse_cells(&cells_raw, 1)?;
            let extent = resolve(args.extent, &settings, "extent", 1.0)?;
            let domain = DomainSpec::line(extent, cells[0])?;
            FieldGrid::from_fn(domain, |p| a + b * p[0])
        }
    };
    let d = FieldGrid::constant(temp.domain().clone(), d_const);
    let set = coefficients_from_temperature(&temp, &d, &SpeedModel::sqrt())?;
    let law = match law_name.as_str() {
        "randomwalk" => FluxLaw::RandomWalk { d, s: set.speed },
        "vankampen" => FluxLaw::VanKampen { d, temp: temp.clone() },
        other => {
            return Err(Error::Config(format!(
                "unknown soret law '{other}' (expected randomwalk or vankampen)"
            )));
        }
    };

    let u0 = FieldGrid::constant(temp.domain().clone(), 1.0);
    let mut solver = Solver::new(law, u0)?;
    let report = solver.run_to_steady(tol, max_steps)?;
    let u = solver.normalized_density()?;
    // a gradient-free temperature carries no thermophoretic signal; the
    // fit itself would be degenerate, so report the trivial answer here
    let constant_t = temp.max() == temp.min();
    let (exponent, samples) = if constant_t {
        let [n, _] = temp.domain().cells();
        let samples = (1..n.saturating_sub(1))
            .map(|ix| SoretSample {
                x: temp.domain().cell_center(ix, 0)[0],
                temperature: temp.get(ix, 0),
                s_t: 0.0,
            })
            .collect();
        (0.0, samples)
    } else {
        let fit = fit_soret(&u, &temp)?;
        (fit.exponent, fit.local)
    };

    // the sqrt speed model predicts S_T = 1/(2T); report the worst
    // interior deviation from it
    let mut max_rel = 0.0f64;
    if !constant_t {
        for s in &samples {
            let reference = 0.5 / s.temperature;
            max_rel = max_rel.max((s.s_t - reference).abs() / reference);
        }
    }
    if let Some(out) = &args.out {
        let mut table = String::from("x,temperature,s_t,s_t_sqrt_model\n");
        for s in &samples {
            table.push_str(&format!(
                "{},{},{},{}\n",
                gridfile::format_value(s.x),
                gridfile::format_value(s.temperature),
                gridfile::format_value(s.s_t),
                gridfile::format_value(0.5 / s.temperature),
            ));
        }
        std::fs::write(out, table)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", out.display())))?;
    }
    println!(
        "{}",
        json!({
            "command": "soret",
            "law": law_name,
            "exponent": exponent,
            "s_t_max_rel_err_vs_half_inv_t": max_rel,
            "steps": report.steps,
            "residual": report.residual,
            "samples": samples.len(),
        })
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct VarianceArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// Number of walkers
    #[arg(long)]
    pub particles: Option<usize>,
    /// Tracking horizon
    #[arg(long)]
    pub t_final: Option<f64>,
    /// Master seed (default 42; THERMOWALK_SEED overrides the default)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (affects wall time only, never results)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Flat key=value config file supplying defaults for these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn cmd_variance(args: &VarianceArgs) -> Result<()> {
    let settings = Settings::load_optional(args.config.as_deref())?;
    let mut profile_args = args.profile.clone();
    if profile_args.profile.is_none() && settings.get_raw("profile").is_none() {
        profile_args.profile = Some(String::from("constant"));
    }
    let built = build_profile(&profile_args, &settings)?;
    let particles = require(args.particles, &settings, "particles")?;
    let t_final = require(args.t_final, &settings, "t_final")?;
    let seed = resolve_seed(args.seed, &settings)?;
    let workers = resolve(args.workers, &settings, "workers", 1usize)?;

    let mut before = init_ensemble(built.profile.domain(), particles, seed)?;
    before.enable_displacement_tracking();
    let mut after = before.clone();
    let start = Instant::now();
    simulate_threaded(&mut after, &built.profile, t_final, &StepOptions::default(), workers)?;
    let elapsed = start.elapsed().as_secs_f64();
    let d_empirical = variance(&before, &after, t_final)?;

    let center = {
        let ext = built.profile.domain().extent();
        [0.5 * ext[0], 0.5 * ext[1]]
    };
    let d_theoretical = built.profile.diffusivity(center)?;
    println!(
        "{}",
        json!({
            "command": "variance",
            "profile": built.name,
            "particles": particles,
            "t_final": t_final,
            "seed": seed,
            "d_empirical": d_empirical,
            "d_theoretical": d_theoretical,
            "relative_error": (d_empirical - d_theoretical).abs() / d_theoretical,
            "elapsed_seconds": elapsed,
        })
    );
    Ok(())
}
