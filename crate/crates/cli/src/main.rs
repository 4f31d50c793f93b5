use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use phasemode::channel::read_channel_csv;
use phasemode::geometry::{build_concentric, read_geometry_csv, write_geometry_csv};
use phasemode::scenario::output::{
    write_artifacts, write_run, write_sweep, GEOMETRY_FILE, MANIFEST_FILE,
};
use phasemode::scenario::{load_preset, run_ingested, run_scenario, run_sweep, PRESETS};
use phasemode::{mode_limit, nyquist_audit, Error, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "phasemode",
    version,
    about = "Joint azimuth and delay estimation with elliptical arrays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write spectrum, heatmap, report and manifest.
    Run(RunArgs),
    /// Run the `[sweep]` section of a scenario and write sweep.csv.
    Sweep(RunArgs),
    /// Check sensor spacing and the stable mode range without simulating.
    Audit(RunArgs),
    /// Process a measured channel file.
    Ingest(IngestArgs),
    /// List the built-in scenarios, or print one.
    Presets { name: Option<String> },
}

#[derive(Args)]
struct Source {
    /// Scenario file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in scenario name (see `phasemode presets`).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct Overrides {
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    allow_undersampled: bool,
    #[arg(long)]
    force_modes: bool,
    #[arg(long)]
    pad_az: Option<usize>,
    #[arg(long)]
    pad_delay: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct IngestArgs {
    /// Channel CSV (`p,f_hz,re,im`).
    #[arg(long)]
    channel: PathBuf,
    /// Geometry CSV (`ring,p,x_m,y_m`). Without it the array is built from
    /// the scenario.
    #[arg(long)]
    geometry: Option<PathBuf>,
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    overrides: Overrides,
}

impl Source {
    fn load(&self) -> Result<Option<ScenarioConfig>, Error> {
        match (&self.config, &self.preset) {
            (Some(path), _) => ScenarioConfig::load(path).map(Some),
            (None, Some(name)) => load_preset(name).map(Some),
            (None, None) => Ok(None),
        }
    }

    fn require(&self) -> Result<ScenarioConfig, Error> {
        self.load()?
            .ok_or_else(|| Error::Config("give --config <file> or --preset <name>".into()))
    }
}

impl Overrides {
    fn apply(&self, c: &mut ScenarioConfig) {
        let p = &mut c.processing;
        if let Some(s) = self.seed {
            p.seed = s;
        }
        p.allow_undersampled |= self.allow_undersampled;
        p.force_modes |= self.force_modes;
        if let Some(n) = self.pad_az {
            p.pad_az = n;
        }
        if let Some(n) = self.pad_delay {
            p.pad_delay = n;
        }
    }

    fn out_dir(&self, c: Option<&ScenarioConfig>) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| c.and_then(|c| c.output.dir.as_ref().map(PathBuf::from)))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

fn print_report(dir: &Path, report: &phasemode::PeakReport) {
    let m = &report.main;
    println!(
        "main peak: azimuth {} deg, delay {:e} s",
        m.azimuth_deg, m.delay_s
    );
    match &report.artifact {
        Some(a) => println!(
            "strongest artifact: azimuth {} deg, delay {:e} s, delta {:.2} dB",
            a.azimuth_deg, a.delay_s, report.delta_db
        ),
        None => println!("no artifact outside the exclusion window"),
    }
    println!("wrote {}", dir.display());
}

fn run(args: &RunArgs) -> Result<(), Error> {
    let mut config = args.source.require()?;
    args.overrides.apply(&mut config);
    let scenario = config.resolve()?;
    let (prepared, out) = run_scenario(&scenario)?;
    let dir = args.overrides.out_dir(Some(&config));
    write_run(&dir, &config, &prepared, &out)?;
    print_report(&dir, &out.report);
    Ok(())
}

fn sweep(args: &RunArgs) -> Result<(), Error> {
    let mut config = args.source.require()?;
    args.overrides.apply(&mut config);
    if config.sweep.is_none() {
        return Err(Error::Validation("scenario has no [sweep] section".into()));
    }
    let scenario = config.resolve()?;
    let outcome = run_sweep(&config, &scenario)?;
    let dir = args.overrides.out_dir(Some(&config));
    write_sweep(&dir, &config, &outcome)?;
    for r in &outcome.rows {
        println!("{:>8} {:>10} {:>9.2} dB", r.series, r.value, r.delta_db);
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn audit(args: &RunArgs) -> Result<(), Error> {
    let mut config = args.source.require()?;
    args.overrides.apply(&mut config);
    let scenario = config.resolve()?;
    let array = build_concentric(&scenario.rings)?;
    let f_max = scenario.grid.f_stop_hz();
    let report = nyquist_audit(&array, f_max);
    println!("wavelength at {f_max} Hz: {:.6e} m", report.wavelength_m);
    for r in &report.rings {
        println!(
            "ring {}: largest spacing {:.6e} m = {:.4} wavelengths ({})",
            r.ring,
            r.max_spacing_m,
            r.max_spacing_wavelengths,
            if r.pass { "ok" } else { "undersampled" }
        );
    }
    let limit = mode_limit(&array, &scenario.grid, scenario.mode_threshold)?;
    println!("stable mode half-width: {limit}");
    if let Some(m) = scenario.modes {
        println!("configured mode half-width: {}", m.half_width());
    }
    if let Some(dir) = &args.overrides.out_dir {
        std::fs::create_dir_all(dir)?;
        write_geometry_csv(&array, &dir.join(GEOMETRY_FILE))?;
        println!("wrote {}", dir.join(GEOMETRY_FILE).display());
    }
    Ok(())
}

fn ingest(args: &IngestArgs) -> Result<(), Error> {
    let mut config = args.source.load()?;
    if let Some(c) = config.as_mut() {
        args.overrides.apply(c);
    }
    let array = match (&args.geometry, &config) {
        (Some(path), _) => read_geometry_csv(path)?,
        (None, Some(c)) => build_concentric(&c.resolve()?.rings)?,
        (None, None) => {
            return Err(Error::Config(
                "give --geometry <csv> or a scenario for the array".into(),
            ))
        }
    };
    let channel = read_channel_csv(&args.channel, Some(array.total_sensors()))?;
    let (scenario, prepared, out) = run_ingested(config.as_ref(), array, channel)?;
    let dir = args.overrides.out_dir(config.as_ref());
    let mut output = config
        .as_ref()
        .map(|c| c.output.clone())
        .unwrap_or_default();
    output.channel_csv = false;
    write_artifacts(&dir, &output, &prepared, &out)?;
    let manifest = format!(
        "channel = {:?}\ngeometry = {:?}\nscenario = {:?}\nversion = {:?}\nmode_limit = {}\nmode_half_width = {}\npad_az = {}\npad_delay = {}\n",
        args.channel.display().to_string(),
        args.geometry.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
        args.source.config.as_ref().map(|p| p.display().to_string()).or(args.source.preset.clone()).unwrap_or_default(),
        phasemode::VERSION,
        prepared.mode_limit,
        prepared.modes().half_width(),
        scenario.pad_az,
        scenario.pad_delay,
    );
    std::fs::write(dir.join(MANIFEST_FILE), manifest)?;
    print_report(&dir, &out.report);
    Ok(())
}

fn presets(name: Option<&str>) -> Result<(), Error> {
    match name {
        None => {
            for p in PRESETS {
                println!("{:<10} {}", p.name, p.summary);
            }
        }
        Some(n) => {
            let p = phasemode::scenario::find_preset(n)
                .ok_or_else(|| Error::Config(format!("unknown preset `{n}`")))?;
            print!("{}", p.toml);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
        Command::Audit(a) => audit(a),
        Command::Ingest(a) => ingest(a),
        Command::Presets { name } => presets(name.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
