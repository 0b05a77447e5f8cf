mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use dispersplit_core::report::{self, ErrorNorm};
use dispersplit_core::{
    commutator_check, evolve, local_error_probe, run_convergence, shock_time,
    validate_dissipativity, ConvergenceTable, FlowError, HarnessError, ModelError, Monitor,
    ProbeOptions, SplitError, StepPlan, StudySpec,
};

use config::{Format, RunConfig};

const THREADS_VAR: &str = "DISPERSPLIT_THREADS";

#[derive(Parser)]
#[command(
    name = "dispersplit",
    version,
    about = "Splitting studies for u_t = P(d/dx)u + u u_x"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML run configuration.
    config: PathBuf,
    /// Override a config key, e.g. `--set scheme.dt=0.01`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the symbol, print its extremes, the shock time of u0 and (r, q, p).
    Validate(Common),
    /// Evolve to t_final with scheme.dt; write norm traces and the final field.
    Run(Common),
    /// Global convergence study over scheme.dt_list.
    Converge(Common),
    /// One-step local error study over scheme.dt_list.
    LocalError(Common),
    /// Compare both evaluation routes of the commutators on seeded fields.
    CommutatorCheck(Common),
}

/// Failure classes, one per exit code.
enum Failure {
    Config(String),
    Check(String),
    Guard(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Check(_) => 2,
            Failure::Guard(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Check(m) | Failure::Guard(m) => m,
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let text = e.to_string();
        match e {
            HarnessError::Model(ModelError::Dissipativity { .. })
            | HarnessError::Split(SplitError::ReferenceInvalid { .. })
            | HarnessError::Flow(FlowError::NotBandLimited { .. }) => Failure::Check(text),
            HarnessError::Split(SplitError::Guard { .. } | SplitError::NonFinite { .. })
            | HarnessError::Split(SplitError::Flow(_))
            | HarnessError::Flow(_) => Failure::Guard(text),
            _ => Failure::Config(text),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = configure_threads() {
        eprintln!("error: {message}");
        return ExitCode::from(1);
    }
    let result = match &cli.command {
        Command::Validate(c) => load(c).and_then(|cfg| cmd_validate(&cfg)),
        Command::Run(c) => load(c).and_then(|cfg| cmd_run(&cfg)),
        Command::Converge(c) => load(c).and_then(|cfg| cmd_study(&cfg, Study::Converge)),
        Command::LocalError(c) => load(c).and_then(|cfg| cmd_study(&cfg, Study::LocalError)),
        Command::CommutatorCheck(c) => load(c).and_then(|cfg| cmd_commutator(&cfg)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("{THREADS_VAR} must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn load(common: &Common) -> Result<RunConfig, Failure> {
    config::load(&common.config, &common.overrides).map_err(Failure::Config)
}

fn cmd_validate(cfg: &RunConfig) -> Result<(), Failure> {
    let grid = cfg.grid().map_err(Failure::Config)?;
    let preset = cfg.preset().map_err(Failure::Config)?;
    let indices = cfg.indices().map_err(Failure::Config)?;
    let u0 = cfg.initial.sample(&grid);
    println!("equation: {} with P(X) = {}", preset.name, preset.symbol);
    println!("grid: N = {}, L = {}", grid.n_points(), grid.length());
    let report = validate_dissipativity(&preset.symbol, &grid, false)
        .map_err(|e| Failure::Config(e.to_string()))?;
    println!("mode        Re P(ik)        Im P(ik)");
    let values = dispersplit_core::model::symbol_values(&preset.symbol, &grid);
    let top = (grid.n_points() / 2) as i64;
    for m in symbol_table_modes(top) {
        let v = values[grid.index_of_mode(m).expect("mode on grid")];
        println!("{m:>4}  {:>14.6e}  {:>14.6e}", v.re, v.im);
    }
    println!(
        "Re P(ik) in [{:e}, {:e}], Im P(ik) in [{:e}, {:e}]",
        report.min_real_part, report.max_real_part, report.min_imag_part, report.max_imag_part
    );
    println!("shock time of u0: {}", shock_time(&u0));
    println!(
        "indices: r = {}, q = {}, p = {}",
        indices.r, indices.q, indices.p
    );
    if report.passed {
        println!("dissipativity: PASS");
        return Ok(());
    }
    let modes: Vec<i64> = report.violations.iter().map(|v| v.mode).collect();
    let worst = report.worst().expect("violations present");
    let line = format!(
        "dissipativity: FAIL at modes {modes:?} (worst mode {}, Re P = {:e})",
        worst.mode, worst.real_part
    );
    println!("{line}");
    if cfg.equation.strict {
        Err(Failure::Check(line))
    } else {
        println!("equation.strict = false: continuing with amplified modes allowed");
        Ok(())
    }
}

fn symbol_table_modes(top: i64) -> Vec<i64> {
    let mut modes: Vec<i64> = (-4i64..=4).filter(|m| m.abs() <= top).collect();
    for m in [top / 4, top / 2, top] {
        if m > 4 && !modes.contains(&m) {
            modes.push(m);
        }
    }
    modes
}

fn check_symbol(cfg: &RunConfig) -> Result<(), Failure> {
    let grid = cfg.grid().map_err(Failure::Config)?;
    let preset = cfg.preset().map_err(Failure::Config)?;
    validate_dissipativity(&preset.symbol, &grid, cfg.equation.strict)
        .map(|_| ())
        .map_err(|e| Failure::Check(e.to_string()))
}

fn cmd_run(cfg: &RunConfig) -> Result<(), Failure> {
    check_symbol(cfg)?;
    let grid = cfg.grid().map_err(Failure::Config)?;
    let preset = cfg.preset().map_err(Failure::Config)?;
    let indices = cfg.indices().map_err(Failure::Config)?;
    let dt = cfg.dt().map_err(Failure::Config)?;
    let monitors = vec![
        Monitor::Sobolev(indices.r),
        Monitor::Sobolev(indices.q),
        Monitor::Sobolev(indices.p),
        Monitor::Linf,
    ];
    let plan = StepPlan::new(cfg.scheme.kind, cfg.scheme.t_final, dt)
        .map_err(|e| Failure::Config(e.to_string()))?
        .with_burgers(cfg.burgers_options())
        .with_growth(cfg.growth())
        .with_monitors(monitors.clone())
        .with_guard_norm(indices.q);
    let u0 = cfg.initial.sample(&grid);
    let start = Instant::now();
    let outcome = evolve(&u0, &plan, &preset.symbol);
    let seconds = start.elapsed().as_secs_f64();
    let (trajectory, failure) = match outcome {
        Ok(t) => (t, None),
        Err(f) => (f.partial, Some(f.error)),
    };

    let dir = &cfg.output.directory;
    create_dir(dir)?;
    let mut trace = String::from("step,t");
    for m in &monitors {
        write!(trace, ",{}", m.label().to_lowercase().replace('^', "")).expect("string");
    }
    trace.push('\n');
    for (step, t) in trajectory.times.iter().enumerate() {
        write!(trace, "{step},{t:e}").expect("string");
        for m in &monitors {
            let v = trajectory.trace(*m).expect("monitored")[step];
            write!(trace, ",{v:e}").expect("string");
        }
        trace.push('\n');
    }
    write_file(&dir.join("trace.csv"), &trace)?;
    let mut field = String::new();
    for (x, u) in grid.nodes().iter().zip(trajectory.final_field.samples()) {
        writeln!(field, "{x:e} {u:e}").expect("string");
    }
    write_file(&dir.join("final_field.dat"), &field)?;

    let last = |m: Monitor| {
        *trajectory
            .trace(m)
            .expect("monitored")
            .last()
            .expect("t = 0 row")
    };
    println!(
        "steps {} t {} H^{} {:e} H^{} {:e} H^{} {:e} Linf {:e} wallclock {:.3}s",
        trajectory.steps_taken(),
        trajectory.times.last().expect("t = 0 row"),
        indices.r,
        last(Monitor::Sobolev(indices.r)),
        indices.q,
        last(Monitor::Sobolev(indices.q)),
        indices.p,
        last(Monitor::Sobolev(indices.p)),
        last(Monitor::Linf),
        seconds
    );
    match failure {
        None => Ok(()),
        Some(e @ SplitError::Guard { .. }) | Some(e @ SplitError::NonFinite { .. }) => {
            Err(Failure::Guard(e.to_string()))
        }
        Some(e) => Err(Failure::Check(e.to_string())),
    }
}

#[derive(Clone, Copy)]
enum Study {
    Converge,
    LocalError,
}

impl Study {
    fn stem(self) -> &'static str {
        match self {
            Study::Converge => "convergence",
            Study::LocalError => "local_error",
        }
    }
}

fn cmd_study(cfg: &RunConfig, study: Study) -> Result<(), Failure> {
    let spec = cfg.study().map_err(Failure::Config)?;
    let table = match study {
        Study::Converge => {
            spec.validate_convergence()?;
            run_convergence(&spec)?
        }
        Study::LocalError => {
            spec.validate_local()?;
            let grid = spec.grid()?;
            let u0 = spec.initial.sample(&grid);
            local_error_probe(
                &u0,
                &spec.dt_list,
                &spec.preset.symbol,
                spec.r,
                &ProbeOptions {
                    scheme: spec.scheme,
                    burgers: spec.burgers,
                    growth: spec.growth,
                    ref_dt: spec.ref_dt,
                    reference_tolerance: spec.reference_tolerance,
                },
            )?
        }
    };
    write_study(cfg, &spec, &table, study.stem())?;
    print_table(&table);
    let guarded: Vec<String> = table
        .rows
        .iter()
        .filter_map(|r| {
            r.guard_violation
                .as_ref()
                .map(|g| format!("dt = {:e}: {g}", r.dt))
        })
        .collect();
    if table.under_resolved {
        return Err(Failure::Check(
            "study is under-resolved: too few rows above the reference accuracy floor".into(),
        ));
    }
    if !guarded.is_empty() {
        return Err(Failure::Guard(format!(
            "guard violations in {} row(s): {}",
            guarded.len(),
            guarded.join("; ")
        )));
    }
    Ok(())
}

fn write_study(
    cfg: &RunConfig,
    spec: &StudySpec,
    table: &ConvergenceTable,
    stem: &str,
) -> Result<(), Failure> {
    let out = &cfg.output;
    create_dir(&out.directory)?;
    if out.wants(Format::Csv) {
        write_file(
            &out.directory.join(format!("{stem}.csv")),
            &report::csv(table, out.record_wallclock),
        )?;
    }
    if out.wants(Format::Json) {
        write_file(
            &out.directory.join(format!("{stem}.json")),
            &report::json(spec, table, out.record_wallclock),
        )?;
    }
    if out.wants(Format::Dat) {
        for norm in [ErrorNorm::Hr, ErrorNorm::Hq] {
            write_file(
                &out.directory
                    .join(format!("{stem}_{}.dat", norm.file_stem())),
                &report::loglog_data(table, norm),
            )?;
        }
    }
    Ok(())
}

fn print_table(table: &ConvergenceTable) {
    let ix = table.indices;
    println!(
        "{:>12} {:>14} {:>14} {:>14}  note",
        "dt",
        format!("err_H{}", ix.r),
        format!("err_H{}", ix.q),
        "err_L2"
    );
    for row in &table.rows {
        let note = match &row.guard_violation {
            Some(_) => "guard".to_string(),
            None if !row.admissible_hr => "below floor".to_string(),
            None => String::new(),
        };
        println!(
            "{:>12.6e} {:>14.6e} {:>14.6e} {:>14.6e}  {note}",
            row.dt, row.err_hr, row.err_hq, row.err_l2
        );
    }
    let show = |fit: Option<dispersplit_core::OrderFit>| match fit {
        Some(f) => format!("{} (residual {}, {} points)", f.slope, f.residual, f.points),
        None => "unavailable".into(),
    };
    println!("fitted_order_hr: {}", show(table.fitted_order_hr));
    println!("fitted_order_hq: {}", show(table.fitted_order_hq));
    println!(
        "reference: ref_dt {:e}, self-convergence H^{} {:e}, H^{} {:e}",
        table.reference.ref_dt, ix.r, table.reference.delta_hr, ix.q, table.reference.delta_hq
    );
    if table.under_resolved {
        println!("under_resolved: true");
    }
}

fn cmd_commutator(cfg: &RunConfig) -> Result<(), Failure> {
    let spec = cfg.commutator_spec().map_err(Failure::Config)?;
    let report = commutator_check(&spec)?;
    for r in &report.results {
        let constant = r
            .constant_field_magnitude
            .map(|m| format!(", constant field {m:e}"))
            .unwrap_or_default();
        println!(
            "{}: worst relative error [A,B] {:e}, [A,[A,B]] {:e} over {} fields{constant}",
            r.preset.name, r.worst_single, r.worst_double, r.fields
        );
    }
    if report.passed() {
        println!(
            "commutator check: PASS (worst {:e} <= {:e})",
            report.worst(),
            report.tolerance
        );
        Ok(())
    } else {
        let line = format!(
            "commutator check: FAIL (worst {:e} > {:e})",
            report.worst(),
            report.tolerance
        );
        println!("{line}");
        Err(Failure::Check(line))
    }
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display())))
}
