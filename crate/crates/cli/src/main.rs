use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rodeo_core::bounds::{
    exact_se_from_table, monotone_envelope, partial_info_bound, BoundReport, PartialSpectralInfo,
};
use rodeo_core::formats::{parse_spectrum, Format};
use rodeo_core::qsim::{empirical_success_rate, suppression_via_simulation, PhysicalState};
use rodeo_core::rra::{
    best_over_continuous_n, monte_carlo_statistics, rra_mean_total, sample_schedule,
    separatrix_fit_for, EnsembleStatistics, HalfNormalTimeDistribution, Statistic,
};
use rodeo_core::superiter::{
    max_valid_energy, BesselProfile, SuperSchedule, DEFAULT_DEPTH, SINGLE_SUPER_LEADING_TIME,
};
use rodeo_core::wam::{wam_optimize, WamTable};
use rodeo_core::{RodeoError, Schedule, StreamId, SuppressionProfile};

mod config;
mod table;
mod verify;

use table::{emit, json_text, Cell, Table};

#[derive(Parser)]
#[command(
    name = "rodeo",
    version,
    about = "Design and check rodeo-algorithm iteration schedules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Whac-a-Mole super-iteration table
    #[command(args_override_self = true)]
    Wam(WamArgs),
    /// Random-schedule ensemble statistics, separatrix fits and single runs
    #[command(args_override_self = true)]
    Rra(RraArgs),
    /// Super-iteration suppression against random schedules, validity limits
    #[command(name = "super", args_override_self = true)]
    Super(SuperArgs),
    /// Monotone envelopes, partial-information bounds, table selection
    #[command(args_override_self = true)]
    Bound(BoundArgs),
    /// Statevector simulation of a schedule on a physical state
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Cross-checks against the simulator and the reference table
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    format: FormatArg,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// JSON file whose keys mirror these flags; explicit flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl Common {
    fn format(&self) -> Format {
        self.format.into()
    }

    fn write(&self, text: &str) -> Result<(), CliError> {
        emit(text, self.out.as_deref()).map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// `a:b:step` (inclusive), a comma list, or a single number.
#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

impl std::str::FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [a, b, h] => {
                let (a, b, h) = (num(a)?, num(b)?, num(h)?);
                if !(h > 0.0 && b >= a) {
                    return Err("grid needs start <= stop and a positive step".into());
                }
                let count = ((b - a) / h + 1e-9).floor() as usize + 1;
                if count > 10_000_000 {
                    return Err("grid too large".into());
                }
                (0..count).map(|i| a + i as f64 * h).collect()
            }
            [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
            _ => return Err("expected start:stop:step or a comma list".into()),
        };
        if values.iter().any(|v| !v.is_finite()) {
            return Err("grid values must be finite".into());
        }
        Ok(Grid(values))
    }
}

#[derive(Args)]
struct WamArgs {
    /// Number of whack-and-rescale cycles
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=12))]
    cycles: u32,
    /// Rungs per super iteration when the schedule is expanded
    #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = clap::value_parser!(u32).range(1..=60))]
    depth: u32,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RraArgs {
    /// Phase counts per iteration (or totals with --total)
    #[arg(long)]
    zeta: Option<Grid>,
    /// Iteration counts, comma separated
    #[arg(long, value_delimiter = ',', default_value = "6", value_parser = clap::value_parser!(u32).range(1..=100_000))]
    n: Vec<u32>,
    /// Monte Carlo trials per grid point; 0 gives closed forms only
    #[arg(long, default_value_t = 0)]
    trials: u64,
    /// Interpret --zeta as the total phase count ζ_tot = n ζ
    #[arg(long)]
    total: bool,
    /// Separatrix fits for the three statistics
    #[arg(long, conflicts_with_all = ["best", "single_run"])]
    separatrix: bool,
    /// Best value over continuous n at each ζ_tot, next to the fitted exponentials
    #[arg(long, conflicts_with = "single_run")]
    best: bool,
    /// Suppression of one sampled schedule of n iterations along the grid
    #[arg(long)]
    single_run: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SuperArgs {
    /// Energy ratios
    #[arg(long, default_value = "1:20:0.01")]
    x: Grid,
    /// Base times of the super iterations, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1")]
    base: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_DEPTH, value_parser = clap::value_parser!(u32).range(1..=60))]
    depth: u32,
    /// Iteration count of the random-schedule comparison
    #[arg(long, default_value_t = 3)]
    rra_n: u32,
    /// Validity limit of a truncated single super iteration instead of profiles
    #[arg(long)]
    emax: bool,
    #[arg(long, default_value_t = SINGLE_SUPER_LEADING_TIME)]
    leading_time: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BoundArgs {
    /// Fraction of excited weight at or above x0
    #[arg(long)]
    f: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    /// Cycles of the optimizer table when no --table is given
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=12))]
    cycles: u32,
    /// Schedule table (CSV or JSON) as written by `wam`
    #[arg(long)]
    table: Option<PathBuf>,
    /// Table row (1-based) whose profile is used; defaults to the last
    #[arg(long)]
    row: Option<usize>,
    /// Upper end of the sampled envelope
    #[arg(long, default_value_t = 60.0)]
    x_max: f64,
    /// Emit the envelope instead of a bound
    #[arg(long)]
    envelope: bool,
    /// With --envelope: evaluate profile and envelope on this grid
    #[arg(long, requires = "envelope")]
    grid: Option<Grid>,
    /// Choose the shortest table row whose exact S_E meets --threshold
    #[arg(long, requires = "threshold")]
    spectrum: Option<PathBuf>,
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SimulateArgs {
    /// PhysicalState JSON; a random state is drawn when absent
    #[arg(long)]
    state: Option<PathBuf>,
    /// Dimension of the random state
    #[arg(long, default_value_t = 4)]
    dim: usize,
    /// Iteration times, comma separated
    #[arg(long, value_delimiter = ',', conflicts_with = "schedule")]
    times: Vec<f64>,
    /// Schedule JSON `{times, total}`
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Sampled trajectories; 0 reports per-component suppressions
    #[arg(long, default_value_t = 0)]
    trials: u64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    /// Restrict to these check groups
    #[arg(long, value_enum, value_delimiter = ',')]
    only: Vec<verify::Group>,
    /// Reference table to compare the optimizer against
    #[arg(long)]
    golden: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug)]
enum CliError {
    Check(String),
    Usage(String),
    Numeric(String),
}

impl From<RodeoError> for CliError {
    fn from(e: RodeoError) -> Self {
        match e {
            RodeoError::Usage(_) | RodeoError::Domain(_) => CliError::Usage(e.to_string()),
            RodeoError::Numeric(_) | RodeoError::DegenerateBranch(_) => {
                CliError::Numeric(e.to_string())
            }
            RodeoError::ThresholdNotMet { .. } => CliError::Check(e.to_string()),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn cmd_wam(a: &WamArgs) -> Result<(), CliError> {
    let state = wam_optimize(a.cycles as usize, a.depth)?;
    let table = state.table();
    let text = match a.common.format() {
        Format::Csv => table.to_csv()?,
        Format::Json => json_text(&table),
    };
    a.common.write(&text)
}

fn cmd_rra(a: &RraArgs) -> Result<(), CliError> {
    if a.separatrix {
        let mut t = Table::new(&["statistic", "alpha", "beta"]);
        for stat in Statistic::ALL {
            let fit = separatrix_fit_for(stat)?;
            t.push(vec![stat.name().into(), fit.alpha.into(), fit.beta.into()]);
        }
        return a.common.write(&t.render(a.common.format()));
    }
    let grid = a.zeta.clone().unwrap_or_else(|| {
        Grid(if a.single_run {
            (0..=800).map(|i| 2.0 + i as f64 * 0.01).collect()
        } else {
            (1..=200).map(|i| i as f64 * 0.05).collect()
        })
    });
    if grid.0.iter().any(|&z| z < 0.0) {
        return Err(CliError::Usage("phase counts must be non-negative".into()));
    }

    if a.best {
        let fits: Vec<_> = Statistic::ALL
            .iter()
            .map(|&s| separatrix_fit_for(s))
            .collect::<Result<_, _>>()?;
        let mut t = Table::new(&[
            "zeta_tot",
            "best_geometric",
            "best_arithmetic",
            "best_rms",
            "fit_geometric",
            "fit_arithmetic",
            "fit_rms",
        ]);
        for &z in &grid.0 {
            if z <= 0.0 {
                continue;
            }
            let mut row: Vec<Cell> = vec![z.into()];
            for stat in Statistic::ALL {
                row.push(best_over_continuous_n(stat, z)?.1.into());
            }
            for fit in &fits {
                row.push(fit.envelope(z).into());
            }
            t.push(row);
        }
        return a.common.write(&t.render(a.common.format()));
    }

    if a.single_run {
        let n = a.n[0];
        let dist = HalfNormalTimeDistribution::new(1.0)?;
        let schedule = sample_schedule(n, &dist, StreamId::new(a.common.seed, 0))?;
        let typical = 0.25f64.powi(n as i32);
        let mut t = Table::new(&["zeta", "suppression", "quarter_power", "half_power"]);
        for &z in &grid.0 {
            t.push(vec![
                z.into(),
                schedule.suppression(z).into(),
                typical.into(),
                0.5f64.powi(n as i32).into(),
            ]);
        }
        return a.common.write(&t.render(a.common.format()));
    }

    let mut t = Table::new(&[
        "source",
        "zeta",
        "zeta_tot",
        "n",
        "mean",
        "geomean",
        "rms",
        "sigma_over_mean",
        "median",
        "stderr_mean",
    ]);
    for &n in &a.n {
        for &z in &grid.0 {
            let zeta = if a.total { z / n as f64 } else { z };
            let cf = EnsembleStatistics::closed_form(zeta, n)?;
            let mean = if a.total {
                rra_mean_total(z, n)
            } else {
                cf.arithmetic_mean
            };
            t.push(vec![
                "closed".into(),
                zeta.into(),
                (zeta * n as f64).into(),
                n.into(),
                mean.into(),
                cf.geometric_mean.into(),
                cf.rms.into(),
                cf.sigma_over_mean.into(),
                Cell::Empty,
                Cell::Empty,
            ]);
            if a.trials > 0 {
                let mc = monte_carlo_statistics(zeta, n, a.trials, a.common.seed)?;
                t.push(vec![
                    "monte_carlo".into(),
                    zeta.into(),
                    (zeta * n as f64).into(),
                    n.into(),
                    mc.stats.arithmetic_mean.into(),
                    mc.stats.geometric_mean.into(),
                    mc.stats.rms.into(),
                    mc.stats.sigma_over_mean.into(),
                    mc.median.into(),
                    mc.mean_std_error.into(),
                ]);
            }
        }
    }
    a.common.write(&t.render(a.common.format()))
}

fn cmd_super(a: &SuperArgs) -> Result<(), CliError> {
    if a.emax {
        let mut t = Table::new(&["depth", "leading_time", "e_max"]);
        t.push(vec![
            a.depth.into(),
            a.leading_time.into(),
            max_valid_energy(a.depth, a.leading_time).into(),
        ]);
        return a.common.write(&t.render(a.common.format()));
    }
    let exact = BesselProfile::new(a.base.clone())?;
    let truncated = SuperSchedule::from_base_times(&a.base, a.depth)?;
    let nominal = truncated.nominal_total();
    let mut t = Table::new(&["x", "bessel", "truncated", "rra_mean", "ratio"]);
    for &x in &a.x.0 {
        if x < 0.0 {
            return Err(CliError::Usage("energy ratios must be non-negative".into()));
        }
        let s = exact.suppression(x);
        let r = rra_mean_total(x * nominal, a.rra_n);
        let ratio = if s > 0.0 {
            Cell::Real(r / s)
        } else {
            Cell::Empty
        };
        t.push(vec![
            x.into(),
            s.into(),
            truncated.suppression(x).into(),
            r.into(),
            ratio,
        ]);
    }
    a.common.write(&t.render(a.common.format()))
}

fn load_table(a: &BoundArgs) -> Result<(WamTable, String), CliError> {
    match &a.table {
        Some(path) => Ok((WamTable::parse(&read(path)?)?, path.display().to_string())),
        None => Ok((
            wam_optimize(a.cycles as usize, DEFAULT_DEPTH)?.table(),
            "wam".to_owned(),
        )),
    }
}

fn cmd_bound(a: &BoundArgs) -> Result<(), CliError> {
    let (table, source) = load_table(a)?;
    if table.rows.is_empty() {
        return Err(CliError::Usage("schedule table is empty".into()));
    }

    if let Some(path) = &a.spectrum {
        let spectrum = parse_spectrum(&read(path)?)?;
        let threshold = a.threshold.expect("clap enforces --threshold");
        let (i, se) = exact_se_from_table(&spectrum, &table, threshold)?;
        let row = &table.rows[i];
        let mut t = Table::new(&["row", "n", "total_time", "exact_se", "threshold"]);
        t.push(vec![
            (i + 1).into(),
            row.n.into(),
            row.total_time.into(),
            se.into(),
            threshold.into(),
        ]);
        return a.common.write(&t.render(a.common.format()));
    }

    let index = match a.row {
        Some(r) if r >= 1 && r <= table.rows.len() => r - 1,
        Some(r) => {
            return Err(CliError::Usage(format!(
                "row {r} not in table of {}",
                table.rows.len()
            )))
        }
        None => table.rows.len() - 1,
    };
    let row = &table.rows[index];
    let profile = BesselProfile::new(row.times.clone())?;
    let envelope = monotone_envelope(profile, 1.0, a.x_max)?;

    if a.envelope {
        let text = match &a.grid {
            None => match a.common.format() {
                Format::Csv => envelope.to_csv()?,
                Format::Json => {
                    let mut t = Table::new(&["x", "s_ub"]);
                    for &(x, s) in envelope.breakpoints() {
                        t.push(vec![x.into(), s.into()]);
                    }
                    t.render(Format::Json)
                }
            },
            Some(grid) => {
                let mut t = Table::new(&["x", "s", "s_ub"]);
                for &x in &grid.0 {
                    let ub = envelope.value(x)?;
                    t.push(vec![
                        x.into(),
                        envelope.profile().suppression(x).into(),
                        ub.into(),
                    ]);
                }
                t.render(a.common.format())
            }
        };
        return a.common.write(&text);
    }

    let (Some(f), Some(x0)) = (a.f, a.x0) else {
        return Err(CliError::Usage(
            "bound needs --f and --x0 (or --envelope / --spectrum)".into(),
        ));
    };
    let info = PartialSpectralInfo::new(f, x0)?;
    let report = BoundReport {
        f,
        x0,
        bound: partial_info_bound(&envelope, info)?,
        q: envelope.max_value(),
        schedule_id: format!("{source}#n{}", row.n),
    };
    let text = match a.common.format() {
        Format::Json => json_text(&report),
        Format::Csv => {
            let mut t = Table::new(&["f", "x0", "bound", "Q", "schedule_id"]);
            t.push(vec![
                f.into(),
                x0.into(),
                report.bound.into(),
                report.q.into(),
                report.schedule_id.as_str().into(),
            ]);
            t.to_csv()
        }
    };
    a.common.write(&text)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let state = match &a.state {
        Some(path) => {
            serde_json::from_str::<PhysicalState>(&read(path)?).map_err(RodeoError::from)?
        }
        None => PhysicalState::random(a.dim, 1.0, 6.0, StreamId::new(a.common.seed, u64::MAX))?,
    };
    let schedule = match (&a.schedule, a.times.is_empty()) {
        (Some(path), _) => {
            serde_json::from_str::<Schedule>(&read(path)?).map_err(RodeoError::from)?
        }
        (None, false) => Schedule::new(a.times.clone())?,
        (None, true) => {
            return Err(CliError::Usage(
                "simulate needs --times or --schedule".into(),
            ))
        }
    };

    if a.trials > 0 {
        let p: f64 = state
            .energies()
            .iter()
            .zip(state.amplitudes())
            .map(|(&x, amp)| amp.norm_sqr() * schedule.suppression(x))
            .sum();
        let rate = empirical_success_rate(&state, &schedule, a.trials, a.common.seed)?;
        let mut t = Table::new(&["success_probability", "success_rate", "std_error", "trials"]);
        let se = (p * (1.0 - p) / a.trials as f64).sqrt();
        t.push(vec![
            p.into(),
            rate.into(),
            se.into(),
            Cell::Int(a.trials as i64),
        ]);
        return a.common.write(&t.render(a.common.format()));
    }

    let mut t = Table::new(&[
        "component",
        "energy",
        "weight",
        "simulated",
        "closed_form",
        "abs_diff",
    ]);
    for c in 1..state.dim() {
        let x = state.energies()[c];
        let closed = schedule.suppression(x);
        let sim = match suppression_via_simulation(&state, &schedule, c) {
            Ok(v) => Cell::Real(v),
            Err(RodeoError::Domain(_)) => Cell::Empty,
            Err(e) => return Err(e.into()),
        };
        let diff = match sim {
            Cell::Real(v) => Cell::Real((v - closed).abs()),
            _ => Cell::Empty,
        };
        t.push(vec![
            c.into(),
            x.into(),
            state.amplitudes()[c].norm_sqr().into(),
            sim,
            closed.into(),
            diff,
        ]);
    }
    a.common.write(&t.render(a.common.format()))
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), CliError> {
    let golden = match &a.golden {
        Some(path) => Some(read(path)?),
        None => None,
    };
    let results = verify::run(&a.only, golden.as_deref(), a.common.seed);
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.as_str())
        .collect();
    let text = match a.common.format() {
        Format::Json => json_text(&results),
        Format::Csv => results.iter().map(|r| r.line()).collect(),
    };
    a.common.write(&text)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Wam(a) => cmd_wam(a),
        Command::Rra(a) => cmd_rra(a),
        Command::Super(a) => cmd_super(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect()) {
        Ok(args) => args,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::Check(m) | CliError::Usage(m) | CliError::Numeric(m)) = &e;
            eprintln!("error: {m}");
            ExitCode::from(e.code())
        }
    }
}
