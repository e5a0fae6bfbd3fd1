use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use arraymirror_core::bands::{band_structure, directional_mode, mode_vs_angle, mode_vs_lattice};
use arraymirror_core::eit::{dressed_poles, susceptibility_spectrum, EitParams};
use arraymirror_core::green::{eta_with, AccelParams, ModePoint, DEFAULT_SHIFT_TOLERANCE, MIN_CUTOFF};
use arraymirror_core::scattering::{
    diffraction_threshold, extract_bands, order_contribution_xx, rt_spectrum, spectra_sweep, sweep_bands,
    BandDescriptor, OperatingPoint, SweepParam, DEFAULT_BAND_THRESHOLD,
};
use arraymirror_core::units::{bz_path, SymmetryPoint};
use arraymirror_core::verify;
use arraymirror_core::{Axis, Flags, IncidencePlane, SweepTable, SystemConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::config::{FileConfig, Overrides, RunConfig};
use crate::output::{base_meta, write_table, Format};
use crate::parallel::RayonExecutor;
use crate::range::{AxisSpec, Range, Scan};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "arraymirror",
    version,
    about = "Band structures, EIT response and reflection spectra of 2D atomic arrays"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Δ_k and Γ_k along a Brillouin-zone path.
    Bands {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Waypoints from G, X, Y, M.
        #[arg(long, default_value = "GXMG")]
        path: String,
        /// Intervals per path segment.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Accel::Ewald)]
        accel: Accel,
        /// Largest damping radius of the real-space sum, in wavelengths.
        #[arg(long, default_value_t = MIN_CUTOFF)]
        cutoff: f64,
        #[arg(long, default_value_t = DEFAULT_SHIFT_TOLERANCE)]
        tolerance: f64,
    },
    /// The directional mode; `--theta` or `--d` given as a range sweeps it.
    Mode {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        physics: PhysicsArgs,
    },
    /// Susceptibility χ̃ and its two-pole split over probe detuning.
    Response {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        physics: PhysicsArgs,
        #[arg(long, allow_hyphen_values = true)]
        dp: Range,
    },
    /// Reflectivities and transmissivities over probe detuning.
    Spectra {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        physics: PhysicsArgs,
        #[arg(long, allow_hyphen_values = true)]
        dp: Range,
    },
    /// Spectra over one or two of omega_c, delta_c, theta, d.
    Sweep {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        physics: PhysicsArgs,
        /// `name=min:max:count`; give once or twice.
        #[arg(long = "axis", required = true, allow_hyphen_values = true)]
        axes: Vec<AxisSpec>,
        #[arg(long, allow_hyphen_values = true)]
        dp: Range,
        /// Write per-trace band metrics instead of the full grid.
        #[arg(long)]
        bands: bool,
        /// Smallest peak reflectivity counted as a band.
        #[arg(long, default_value_t = DEFAULT_BAND_THRESHOLD)]
        threshold: f64,
    },
    /// Diffraction threshold and the (1,0) xx-order term; `--d` may be a range.
    Diffraction {
        #[command(flatten)]
        io: IoArgs,
        #[command(flatten)]
        physics: PhysicsArgs,
    },
    /// Runs the acceptance checks and prints one line per criterion.
    Verify {
        /// Run only these criteria.
        #[arg(long = "criterion")]
        criteria: Vec<u32>,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Accel {
    Ewald,
    Realspace,
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// TOML file with lattice_constant, gamma_r, polarization, theta, plane, omega_c, delta_c.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent or `-`.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Defaults to json for `.json` outputs and csv otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct PhysicsArgs {
    /// Dipole orientation: x, y, z or three components.
    #[arg(long)]
    pol: Option<String>,
    /// Lattice constant in wavelengths (a range where the command allows).
    #[arg(long, allow_hyphen_values = true)]
    d: Option<Scan>,
    #[arg(long)]
    gamma_r: Option<f64>,
    /// Angle of incidence in radians (a range where the command allows).
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<Scan>,
    /// Incidence plane: xz or yz.
    #[arg(long)]
    plane: Option<String>,
    /// Probe polarization: p or s.
    #[arg(long)]
    probe: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    omega_c: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta_c: Option<f64>,
}

/// Resolved inputs of one command.
struct Setup {
    run: RunConfig,
    theta_scan: Option<Range>,
    d_scan: Option<Range>,
    output: Option<PathBuf>,
    format: Format,
}

fn fixed(s: Option<Scan>) -> (Option<f64>, Option<Range>) {
    match s {
        Some(Scan::Fixed(v)) => (Some(v), None),
        Some(Scan::Range(r)) => (None, Some(r)),
        None => (None, None),
    }
}

fn setup(io: IoArgs, p: PhysicsArgs) -> Result<Setup, CliError> {
    let file = match &io.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let (theta, theta_scan) = fixed(p.theta);
    let (d, d_scan) = fixed(p.d);
    let over = Overrides {
        lattice_constant: d,
        gamma_r: p.gamma_r,
        polarization: p.pol,
        theta,
        plane: p.plane,
        probe: p.probe,
        omega_c: p.omega_c,
        delta_c: p.delta_c,
    };
    let mut run = RunConfig::merge(&file, &over);
    // a scanned value is echoed through the axis, the config keeps its start
    if let Some(r) = theta_scan {
        run.theta = r.min;
    }
    if let Some(r) = d_scan {
        run.lattice_constant = r.min;
    }
    let format = io.format.unwrap_or_else(|| match &io.output {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
        _ => Format::Csv,
    });
    Ok(Setup {
        run,
        theta_scan,
        d_scan,
        output: io.output,
        format,
    })
}

impl Setup {
    fn no_scans(&self, command: &str) -> Result<(), CliError> {
        if self.theta_scan.is_some() || self.d_scan.is_some() {
            return Err(CliError::Invalid(format!(
                "{command} takes single values for --theta and --d"
            )));
        }
        Ok(())
    }

    fn emit(&self, command: &str, table: &SweepTable, extra: Map<String, Value>) -> Result<(), CliError> {
        let mut meta = base_meta(command, &self.run);
        meta.extend(extra);
        write_table(table, meta, self.format, self.output.as_deref())?;
        let unconverged = table.flags.iter().filter(|f| f.contains(Flags::NO_CONVERGENCE)).count();
        if unconverged > 0 {
            return Err(CliError::Unconverged { count: unconverged });
        }
        Ok(())
    }
}

fn parse_path(s: &str) -> Result<Vec<SymmetryPoint>, CliError> {
    let pts = s
        .chars()
        .filter(|c| !matches!(c, '-' | ',' | ' '))
        .map(|c| {
            SymmetryPoint::from_char(c)
                .ok_or_else(|| CliError::Invalid(format!("unknown symmetry point {c:?} in path {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if pts.len() < 2 {
        return Err(CliError::Invalid(format!("path {s:?} needs at least two points")));
    }
    Ok(pts)
}

fn mode_json(m: &ModePoint) -> Value {
    json!({
        "kx": m.k.kx,
        "ky": m.k.ky,
        "delta_k": m.delta,
        "gamma_k": m.gamma,
        "shift_error": m.shift_error,
        "propagating_orders": m.propagating,
    })
}

fn band_json(b: &BandDescriptor) -> Value {
    json!({"center": b.center, "peak": b.peak, "fwhm": b.fwhm})
}

fn cmd_bands(
    s: Setup,
    path: &str,
    samples: usize,
    accel: Accel,
    cutoff: f64,
    tolerance: f64,
    exec: &RayonExecutor,
) -> Result<(), CliError> {
    s.no_scans("bands")?;
    if samples < 1 {
        return Err(CliError::Invalid("--samples must be at least 1".into()));
    }
    let cfg = s.run.system()?;
    let pts: Vec<_> = parse_path(path)?.iter().map(|p| p.bloch(&cfg)).collect();
    let accel = match accel {
        Accel::Ewald => AccelParams::Ewald { tolerance },
        Accel::Realspace => AccelParams::RealSpace { cutoff, tolerance },
    };
    let path_pts = bz_path(&pts, samples + 1, &cfg)?;
    let table = band_structure(&path_pts, &cfg, accel, exec).to_table();
    let mut extra = Map::new();
    extra.insert("path".into(), json!(path));
    extra.insert("samples_per_segment".into(), json!(samples));
    s.emit("bands", &table, extra)
}

const MODE_COLUMNS: [&str; 7] = [
    "theta",
    "kx",
    "ky",
    "delta_k",
    "gamma_k",
    "shift_error",
    "propagating_orders",
];

fn cmd_mode(s: Setup, exec: &RayonExecutor) -> Result<(), CliError> {
    let table = match (s.theta_scan, s.d_scan) {
        (Some(_), Some(_)) => return Err(CliError::Invalid("scan either --theta or --d, not both".into())),
        (Some(r), None) => mode_vs_angle(&r.values(), s.run.plane()?, &s.run.system()?, exec)?,
        (None, Some(r)) => {
            let template = SystemConfig::new(0.5, s.run.gamma_r, s.run.dipole()?)?;
            mode_vs_lattice(&r.values(), &s.run.geometry()?, &template, exec)?
        }
        (None, None) => {
            let g = s.run.geometry()?;
            let m = directional_mode(&g, &s.run.system()?)?;
            let mut t = SweepTable::new(vec![Axis::new("theta", vec![g.theta()])], &MODE_COLUMNS);
            t.push(
                vec![
                    g.theta(),
                    m.k.kx,
                    m.k.ky,
                    m.delta,
                    m.gamma,
                    m.shift_error,
                    m.propagating as f64,
                ],
                m.flags(),
            );
            t
        }
    };
    s.emit("mode", &table, Map::new())
}

fn cmd_response(s: Setup, dp: Range) -> Result<(), CliError> {
    s.no_scans("response")?;
    let cfg = s.run.system()?;
    let mode = directional_mode(&s.run.geometry()?, &cfg)?;
    let params = EitParams::new(&s.run.drive()?, &mode, &cfg);
    let poles = dressed_poles(&params);
    let table = susceptibility_spectrum(&dp.values(), &params);
    let mut extra = Map::new();
    extra.insert("mode".into(), mode_json(&mode));
    extra.insert(
        "poles".into(),
        json!({
            "plus": [poles.plus.re, poles.plus.im],
            "minus": [poles.minus.re, poles.minus.im],
        }),
    );
    s.emit("response", &table, extra)
}

fn cmd_spectra(s: Setup, dp: Range) -> Result<(), CliError> {
    s.no_scans("spectra")?;
    let cfg = s.run.system()?;
    let g = s.run.geometry()?;
    let table = rt_spectrum(&dp.values(), &g, &s.run.drive()?, &cfg)?;
    let mut extra = Map::new();
    if let Ok(m) = eta_with(&g.bloch(), &cfg, AccelParams::default()) {
        extra.insert("mode".into(), mode_json(&m));
    }
    let col = match g.polarization() {
        arraymirror_core::ProbePolarization::P => "R_pp",
        arraymirror_core::ProbePolarization::S => "R_ss",
    };
    if let (Some(x), Some(r)) = (table.column("delta_p"), table.column(col)) {
        if let Ok((n, b)) = extract_bands(&x, &r) {
            extra.insert("bands".into(), json!({"narrow": band_json(&n), "broad": band_json(&b)}));
        }
    }
    s.emit("spectra", &table, extra)
}

const BAND_METRIC_COLUMNS: [&str; 6] = [
    "narrow_center",
    "narrow_peak",
    "narrow_fwhm",
    "broad_center",
    "broad_peak",
    "broad_fwhm",
];

fn cmd_sweep(
    s: Setup,
    axes: Vec<AxisSpec>,
    dp: Range,
    bands: bool,
    threshold: f64,
    exec: &RayonExecutor,
) -> Result<(), CliError> {
    s.no_scans("sweep")?;
    if axes.is_empty() || axes.len() > 2 {
        return Err(CliError::Invalid("give one or two --axis options".into()));
    }
    let parsed = axes
        .iter()
        .map(|a| {
            SweepParam::parse(&a.name)
                .map(|p| (p, a.range.values()))
                .ok_or_else(|| {
                    CliError::Invalid(format!("unknown sweep axis {:?} (omega_c, delta_c, theta, d)", a.name))
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let base = OperatingPoint {
        geometry: s.run.geometry()?,
        drive: s.run.drive()?,
        config: s.run.system()?,
    };
    let grid = spectra_sweep(&parsed, &dp.values(), &base, exec)?;
    let mut extra = Map::new();
    extra.insert("delta_p".into(), json!(dp.to_string()));
    if !bands {
        return s.emit("sweep", &grid, extra);
    }

    let metrics = sweep_bands(&grid, base.geometry.polarization(), threshold)?;
    let outer: Vec<Axis> = grid.axes[..parsed.len()].to_vec();
    let mut names: Vec<&str> = parsed.iter().map(|(p, _)| p.name()).collect();
    names.extend_from_slice(&BAND_METRIC_COLUMNS);
    let mut t = SweepTable::new(outer, &names);
    let n_dp = dp.count;
    for (i, m) in metrics.iter().enumerate() {
        let first = &grid.rows[i * n_dp];
        let mut row: Vec<f64> = first[..parsed.len()].to_vec();
        let flags = grid.flags[i * n_dp..(i + 1) * n_dp]
            .iter()
            .fold(Flags::NONE, |a, f| a | *f);
        match m {
            Ok((n, b)) => {
                row.extend([n.center, n.peak, n.fwhm, b.center, b.peak, b.fwhm]);
                t.push(row, flags);
            }
            Err(e) => {
                row.extend([f64::NAN; 6]);
                t.push(row, flags | Flags::from_error(e));
            }
        }
    }
    extra.insert("band_threshold".into(), json!(threshold));
    s.emit("sweep", &t, extra)
}

const DIFFRACTION_COLUMNS: [&str; 7] = [
    "theta",
    "d",
    "d_star",
    "order_mx",
    "order_my",
    "xx_term_re",
    "xx_term_im",
];

fn cmd_diffraction(s: Setup) -> Result<(), CliError> {
    if s.theta_scan.is_some() {
        return Err(CliError::Invalid("diffraction scans --d only".into()));
    }
    let g = s.run.geometry()?;
    let th = diffraction_threshold(&g);
    let ds = match s.d_scan {
        Some(r) => r.values(),
        None => vec![s.run.lattice_constant],
    };
    let mut t = SweepTable::new(vec![Axis::new("d", ds.clone())], &DIFFRACTION_COLUMNS);
    for d in ds {
        let term = order_contribution_xx(d, g.theta())?;
        let flags = if term.anomaly {
            Flags::ANOMALY_PROXIMITY
        } else {
            Flags::NONE
        };
        t.push(
            vec![
                g.theta(),
                d,
                th.d_star,
                th.order.0 as f64,
                th.order.1 as f64,
                term.value.re,
                term.value.im,
            ],
            flags,
        );
    }
    let mut extra = Map::new();
    extra.insert(
        "xx_term".into(),
        json!("(1,0)-order term of the reciprocal xx sum at xz incidence with the same theta"),
    );
    if g.plane() == IncidencePlane::YZ {
        extra.insert(
            "note".into(),
            json!("threshold order follows the yz plane; the xx term is the xz-plane (1,0) order"),
        );
    }
    s.emit("diffraction", &t, extra)
}

fn cmd_verify(criteria: Vec<u32>, output: Option<PathBuf>, exec: &RayonExecutor) -> Result<(), CliError> {
    let ids: Vec<u32> = if criteria.is_empty() {
        (1..=verify::CRITERIA).collect()
    } else {
        criteria
    };
    let mut lines = Vec::new();
    let mut failed = 0;
    let stdout = std::io::stdout();
    for id in &ids {
        let report = verify::run(*id, exec)
            .ok_or_else(|| CliError::Invalid(format!("no criterion {id} (1..={})", verify::CRITERIA)))?;
        if !report.pass {
            failed += 1;
        }
        let line = report.to_string();
        let mut out = stdout.lock();
        writeln!(out, "{line}").map_err(|e| CliError::Io("stdout".into(), e))?;
        lines.push(line);
    }
    let summary = format!("{} of {} criteria passed", ids.len() - failed, ids.len());
    writeln!(stdout.lock(), "{summary}").map_err(|e| CliError::Io("stdout".into(), e))?;
    if let Some(p) = output {
        lines.push(summary);
        std::fs::write(&p, lines.join("\n") + "\n").map_err(|e| CliError::Io(p.display().to_string(), e))?;
    }
    if failed > 0 {
        return Err(CliError::VerifyFailed {
            failed,
            total: ids.len(),
        });
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let exec = RayonExecutor::from_env()?;
    match cli.command {
        Command::Bands {
            io,
            physics,
            path,
            samples,
            accel,
            cutoff,
            tolerance,
        } => cmd_bands(setup(io, physics)?, &path, samples, accel, cutoff, tolerance, &exec),
        Command::Mode { io, physics } => cmd_mode(setup(io, physics)?, &exec),
        Command::Response { io, physics, dp } => cmd_response(setup(io, physics)?, dp),
        Command::Spectra { io, physics, dp } => cmd_spectra(setup(io, physics)?, dp),
        Command::Sweep {
            io,
            physics,
            axes,
            dp,
            bands,
            threshold,
        } => cmd_sweep(setup(io, physics)?, axes, dp, bands, threshold, &exec),
        Command::Diffraction { io, physics } => cmd_diffraction(setup(io, physics)?),
        Command::Verify { criteria, output } => cmd_verify(criteria, output, &exec),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to stderr as one machine-readable line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let rendered = e.to_string();
            let msg = rendered
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more"))
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            let msg = msg.strip_prefix("error: ").unwrap_or(&msg).to_string();
            eprintln!("{}", CliError::Usage(msg).stderr_line());
            return 1;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.stderr_line());
            e.exit_code()
        }
    }
}
