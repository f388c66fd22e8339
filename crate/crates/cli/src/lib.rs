//! Command implementations behind the `cqedlab` binary.

pub mod plot;
pub mod repro;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cqedlab_core::config::{SimConfig, SIM_SCHEMA};
use cqedlab_core::fit::{
    extract_dip_ridge, fit_avoided_crossing, fit_exponential_decay, fit_flux_noise_amplitude, fit_lorentzian,
    fit_power_broadening, find_ridge_transitions, t2_lower_bound_from_fwhm, FitResult, Polarity, DEFAULT_PHI_WINDOW,
    FIT_SCHEMA,
};
use cqedlab_core::io::{self, LinewidthAxis, MAP_SCHEMA};
use cqedlab_core::jc::{critical_photon_number, fq_from_shift, g_from_shift};
use cqedlab_core::model::DEVICE_SCHEMA;
use cqedlab_core::synth::{flux_map, power_map, t1_trace, two_tone_map, SpectroMap};
use cqedlab_core::transmon::{charging_energy, scale_fq_by_design};
use cqedlab_core::{Error, FluxBias, Frequency, QubitModel};

pub const SEED_ENV: &str = "CQEDLAB_SEED";
pub const MANIFEST_SCHEMA: &str = "cqedlab-manifest-v1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cqedlab", version, about = "Circuit-QED spectroscopy simulation and parameter extraction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic dataset from a cqedlab-sim-v1 config.
    Simulate {
        kind: SimKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write an SVG rendering.
        #[arg(long)]
        plot: bool,
    },
    /// Fit a dataset and write a cqedlab-fit-v1 result.
    Fit(FitArgs),
    /// Evaluate a closed-form relation.
    #[command(subcommand)]
    Extract(Quantity),
    #[command(subcommand)]
    Report(ReportKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimKind {
    FluxMap,
    PowerMap,
    TwoTone,
    T1Trace,
}

impl SimKind {
    fn stem(self) -> &'static str {
        match self {
            SimKind::FluxMap => "flux_map",
            SimKind::PowerMap => "power_map",
            SimKind::TwoTone => "two_tone",
            SimKind::T1Trace => "t1_trace",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitKind {
    Lorentzian,
    RabiSplitting,
    Decay,
    PowerBroadening,
    FluxNoise,
    Ridge,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    pub kind: FitKind,
    pub input: PathBuf,
    /// Bare cavity frequency in Hz (rabi-splitting; ridge crossing count).
    #[arg(long, allow_negative_numbers = true)]
    pub fbare: Option<f64>,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub allow_nonconverged: bool,
    /// Fit a peak instead of a dip (lorentzian).
    #[arg(long)]
    pub peak: bool,
    /// SQUID sweet-spot frequency in Hz (flux-noise).
    #[arg(long, allow_negative_numbers = true)]
    pub fq_max: Option<f64>,
    /// T1 in seconds, for the drive-coupling estimate (power-broadening).
    #[arg(long, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// Flux window in Φ0 (flux-noise).
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_PHI_WINDOW)]
    pub window: f64,
    /// Minimum resonance step in Hz counted as a transition (ridge).
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5e6)]
    pub min_step: f64,
    /// Where to write the extracted ridge CSV (ridge).
    #[arg(long)]
    pub ridge_csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Quantity {
    /// Qubit frequency from a dispersive shift.
    FqFromShift {
        #[arg(long, allow_negative_numbers = true)]
        chi: f64,
        #[arg(long, allow_negative_numbers = true)]
        g: f64,
        #[arg(long, allow_negative_numbers = true)]
        fbare: f64,
    },
    /// Coupling strength from a dispersive shift.
    GFromShift {
        #[arg(long, allow_negative_numbers = true)]
        chi: f64,
        #[arg(long, allow_negative_numbers = true)]
        fq: f64,
        #[arg(long, allow_negative_numbers = true)]
        fbare: f64,
    },
    /// Critical photon number.
    Ncrit {
        #[arg(long, allow_negative_numbers = true)]
        g: f64,
        #[arg(long, allow_negative_numbers = true)]
        fq: f64,
        #[arg(long, allow_negative_numbers = true)]
        fbare: f64,
    },
    /// Lower bound on T2* from a linewidth.
    T2Bound {
        #[arg(long, allow_negative_numbers = true)]
        fwhm: f64,
    },
    /// Qubit frequency rescaled by EJ and EC ratios.
    Scaling {
        #[arg(long, allow_negative_numbers = true)]
        fq_ref: f64,
        #[arg(long, allow_negative_numbers = true)]
        ej_ratio: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
        ec_ratio: f64,
    },
    /// Charging energy of a shunt capacitance in farads.
    Ec {
        #[arg(long, allow_negative_numbers = true)]
        capacitance: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReportKind {
    /// Recompute the published device numbers and compare.
    PaperNumbers {
        #[arg(long)]
        json: Option<PathBuf>,
        /// Multiply every embedded coupling strength (sensitivity check).
        #[arg(long, default_value_t = 1.0, hide = true)]
        g_scale: f64,
    },
}

/// A failure and the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Io(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failure(_) => EXIT_FAILURE,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Io(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Io(e.to_string())
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Wraps a core error with the file it came from.
fn in_file(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| match CliError::from(e) {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// Runs a parsed command, writing normal output to `out`.
pub fn run(cli: Cli, out: &mut dyn std::io::Write) -> CliResult<()> {
    match cli.command {
        Command::Simulate {
            kind,
            config,
            out: dir,
            plot,
        } => simulate(kind, &config, &dir, plot, out),
        Command::Fit(args) => fit(&args, out),
        Command::Extract(q) => extract(&q, out),
        Command::Report(ReportKind::PaperNumbers { json, g_scale }) => report(json.as_deref(), g_scale, out),
    }
}

fn emit(out: &mut dyn std::io::Write, text: &str) -> CliResult<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
}

fn seed_override() -> CliResult<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{SEED_ENV}: '{v}' is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

pub fn simulate(kind: SimKind, config: &Path, dir: &Path, plot: bool, out: &mut dyn std::io::Write) -> CliResult<()> {
    let mut cfg = SimConfig::from_json(&read(config)?).map_err(in_file(config))?;
    if let Some(seed) = seed_override()? {
        cfg.override_seed(seed);
    }
    let dev = &cfg.device;
    let (csv, svg, dataset_schema) = match kind {
        SimKind::FluxMap => {
            let map = flux_map(dev, &cfg.grids.require("phi")?, &cfg.grids.require("freq_hz")?, &cfg.drive)?;
            map_outputs(&map, plot, "readout frequency (GHz)")
        }
        SimKind::PowerMap => {
            let map = power_map(
                dev,
                FluxBias::new(cfg.phi),
                &cfg.grids.require("power_dbm")?,
                &cfg.grids.require("freq_hz")?,
                &cfg.saturation,
                &cfg.drive,
            )?;
            map_outputs(&map, plot, "readout frequency (GHz)")
        }
        SimKind::TwoTone => {
            let map = two_tone_map(
                dev,
                &cfg.grids.require("phi")?,
                &cfg.grids.require("drive_freq_hz")?,
                &cfg.drive,
                &cfg.two_tone,
            )?;
            map_outputs(&map, plot, "drive frequency (GHz)")
        }
        SimKind::T1Trace => {
            let t1 = cfg.t1_trace.ok_or_else(|| CliError::Input("t1_trace: required for this simulation".into()))?;
            let trace = t1_trace(t1.t1_s, t1.amplitude, &cfg.grids.require("delay_s")?, t1.noise_sigma, cfg.drive.seed)?;
            let svg = plot.then(|| plot::line_svg(&trace.delays, &trace.amplitudes, "delay (ns)", "amplitude", 1e-9, 1.0));
            (io::write_decay(&trace), svg, "delay_s,amplitude")
        }
    };

    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let stem = kind.stem();
    let csv_name = format!("{stem}.csv");
    write(&dir.join(&csv_name), &csv)?;
    let mut files = vec![csv_name];
    if let Some(svg) = svg {
        let name = format!("{stem}.svg");
        write(&dir.join(&name), &svg)?;
        files.push(name);
    }
    let manifest = json!({
        "schema": MANIFEST_SCHEMA,
        "kind": stem,
        "seed": cfg.drive.seed,
        "schemas": {
            "config": SIM_SCHEMA,
            "device": DEVICE_SCHEMA,
            "dataset": dataset_schema,
        },
        "files": files,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    write(&dir.join("manifest.json"), &(text + "\n"))?;
    emit(out, &format!("wrote {} to {}\n", files.join(", "), dir.display()))
}

fn map_outputs(map: &SpectroMap, plot: bool, y_label: &str) -> (String, Option<String>, &'static str) {
    (io::write_map(map), plot.then(|| plot::heatmap_svg(map, y_label)), MAP_SCHEMA)
}

fn required(value: Option<f64>, flag: &str, kind: &str) -> CliResult<f64> {
    value.ok_or_else(|| CliError::Input(format!("fit {kind} needs --{flag}")))
}

pub fn fit(args: &FitArgs, out: &mut dyn std::io::Write) -> CliResult<()> {
    let text = read(&args.input)?;
    let ctx = in_file(&args.input);
    let result = match args.kind {
        FitKind::Lorentzian => {
            let trace = io::read_trace(&text).map_err(&ctx)?;
            let polarity = if args.peak { Polarity::Peak } else { Polarity::Dip };
            fit_lorentzian(&trace, polarity)?
        }
        FitKind::RabiSplitting => {
            let fbare = required(args.fbare, "fbare", "rabi-splitting")?;
            fit_avoided_crossing(&io::read_branches(&text).map_err(&ctx)?, Frequency::hz(fbare))?
        }
        FitKind::Decay => fit_exponential_decay(&io::read_decay(&text).map_err(&ctx)?)?,
        FitKind::PowerBroadening => {
            fit_power_broadening(&io::read_linewidths(&text, LinewidthAxis::PowerDbm).map_err(&ctx)?, args.t1)?
        }
        FitKind::FluxNoise => {
            let fq_max = required(args.fq_max, "fq-max", "flux-noise")?;
            // the coupling does not enter the linewidth slope
            let q = QubitModel::squid("q", Frequency::hz(fq_max), Frequency::mhz(100.0));
            q.validate()?;
            fit_flux_noise_amplitude(&io::read_linewidths(&text, LinewidthAxis::Phi).map_err(&ctx)?, &q, args.window)?
        }
        FitKind::Ridge => ridge_summary(args, &text)?,
    };
    let json = result.to_json()? + "\n";
    match &args.out {
        Some(path) => write(path, &json)?,
        None => emit(out, &json)?,
    }
    if !result.converged && !args.allow_nonconverged {
        return Err(CliError::Failure(format!(
            "fit did not converge after {} iterations (use --allow-nonconverged to accept)",
            result.iterations
        )));
    }
    Ok(())
}

fn ridge_summary(args: &FitArgs, text: &str) -> CliResult<FitResult> {
    let map = io::read_map(text).map_err(in_file(&args.input))?;
    let ridge = extract_dip_ridge(&map)?;
    if let Some(path) = &args.ridge_csv {
        write(path, &io::write_ridge(&ridge))?;
    }
    let steps = find_ridge_transitions(&ridge, args.min_step);
    let mut res = FitResult::new(0.0, true, 0);
    res.set("columns", ridge.points.len() as f64, None);
    res.set("omitted", ridge.omitted as f64, None);
    res.set("transitions", steps.len() as f64, None);
    for (i, s) in steps.iter().enumerate() {
        res.set(&format!("transition_{i}_x"), s.x, None);
        res.set(&format!("transition_{i}_step_hz"), s.step, None);
    }
    if let Some(fb) = args.fbare {
        let crossings = ridge.points.windows(2).filter(|w| (w[0].1 - fb) * (w[1].1 - fb) < 0.0).count();
        res.set("fbare_crossings", crossings as f64, None);
    }
    if ridge.omitted > 0 {
        res.flag("omitted_columns");
    }
    Ok(res)
}

/// Value printed by `extract`: display scale and unit, plus the SI value.
struct Extracted {
    quantity: &'static str,
    si: f64,
    si_unit: &'static str,
    scale: f64,
    unit: &'static str,
}

pub fn extract(q: &Quantity, out: &mut dyn std::io::Write) -> CliResult<()> {
    let hz = Frequency::hz;
    let v = match *q {
        Quantity::FqFromShift { chi, g, fbare } => Extracted {
            quantity: "fq",
            si: fq_from_shift(hz(chi), hz(g), hz(fbare))?.as_hz(),
            si_unit: "Hz",
            scale: 1e9,
            unit: "GHz",
        },
        Quantity::GFromShift { chi, fq, fbare } => Extracted {
            quantity: "g",
            si: g_from_shift(hz(chi), hz(fq), hz(fbare))?.as_hz(),
            si_unit: "Hz",
            scale: 1e6,
            unit: "MHz",
        },
        Quantity::Ncrit { g, fq, fbare } => Extracted {
            quantity: "n_crit",
            si: critical_photon_number(hz(g), hz(fq), hz(fbare))?,
            si_unit: "",
            scale: 1.0,
            unit: "",
        },
        Quantity::T2Bound { fwhm } => Extracted {
            quantity: "t2_star_lower_bound",
            si: t2_lower_bound_from_fwhm(hz(fwhm))?,
            si_unit: "s",
            scale: 1e-9,
            unit: "ns",
        },
        Quantity::Scaling {
            fq_ref,
            ej_ratio,
            ec_ratio,
        } => Extracted {
            quantity: "fq",
            si: scale_fq_by_design(hz(fq_ref), ej_ratio, ec_ratio)?.as_hz(),
            si_unit: "Hz",
            scale: 1e9,
            unit: "GHz",
        },
        Quantity::Ec { capacitance } => Extracted {
            quantity: "ec",
            si: charging_energy(capacitance)?.as_hz(),
            si_unit: "Hz",
            scale: 1e6,
            unit: "MHz",
        },
    };
    let human = format!("{} = {} {}", v.quantity, format_sig(v.si / v.scale), v.unit);
    let machine = json!({"quantity": v.quantity, "value": v.si, "unit": v.si_unit});
    emit(out, &format!("{}\n{machine}\n", human.trim_end()))
}

/// Six significant figures without trailing zeros.
fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let digits = (5 - x.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.digits$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn report(json_path: Option<&Path>, g_scale: f64, out: &mut dyn std::io::Write) -> CliResult<()> {
    let inputs = repro::ReproInputs::default().scale_couplings(g_scale);
    let rows = repro::paper_numbers(&inputs).map_err(|e| CliError::Failure(format!("reproduction failed: {e}")))?;
    emit(out, &repro::render_table(&rows))?;
    if let Some(path) = json_path {
        write(path, &(repro::rows_to_json(&rows)? + "\n"))?;
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::Failure(format!("{failed} of {} rows outside tolerance", rows.len())));
    }
    emit(out, &format!("all {} rows within tolerance\n", rows.len()))
}

/// Schema tags the binary reads and writes.
pub fn schemas() -> [&'static str; 5] {
    [SIM_SCHEMA, DEVICE_SCHEMA, MAP_SCHEMA, FIT_SCHEMA, repro::REPRO_SCHEMA]
}
