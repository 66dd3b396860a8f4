use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Parser;
use hardisk::contraction::BoundRecord;
use hardisk::coupling::CouplingExperiment;
use hardisk::dynamics::{random_config, stream_rng};
use hardisk::format::{fmt_sig, round_sig};
use hardisk::metric::analytic_small_ell;
use hardisk::{
    BoundResultF64, BoundSearch, ConstraintSystemF64, ContractionEstimate, PiecewiseMetricF64,
    SavingsKernel,
};
use serde::Serialize;

use crate::manifest::{self, Recorder};
use crate::{
    BoundArgs, Cli, Command, CoupleArgs, MetricArgs, ReplayArgs, SimulateArgs, SolverArgs,
    TableArgs,
};

/// A violated precondition such as an infeasible density.
#[derive(Debug)]
struct Precondition(String);

impl fmt::Display for Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Precondition {}

/// 2 for flag errors, 3 for failed preconditions, 4 for I/O and parse errors.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<clap::Error>().is_some() {
            return 2;
        }
        if cause.downcast_ref::<Precondition>().is_some() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<hardisk::Error>() {
            return match e {
                hardisk::Error::Io(_)
                | hardisk::Error::Csv(_)
                | hardisk::Error::Json(_)
                | hardisk::Error::Parse(_) => 4,
                _ => 3,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
        {
            return 4;
        }
    }
    3
}

pub fn dispatch(command: Command, args: &[String]) -> anyhow::Result<()> {
    match command {
        Command::Bound(a) => bound(a, args),
        Command::Table(a) => table(a, args),
        Command::Metric(a) => metric(a, args),
        Command::Simulate(a) => simulate(a, args),
        Command::Couple(a) => couple(a, args),
        Command::Replay(a) => replay(a),
    }
}

fn search(cells: usize, solver: &SolverArgs, hamming: bool) -> BoundSearch {
    BoundSearch {
        cells,
        tol: solver.tol,
        variant: solver.variant,
        quadrature_order: solver.order,
        epsilon_hat: solver.epsilon_hat,
        hamming,
    }
}

fn pretty<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Prints `text` and, with `out`, writes it there plus a manifest.
fn emit(text: &str, out: Option<&Path>, recorder: Recorder) -> anyhow::Result<()> {
    print!("{text}");
    if let Some(path) = out {
        write_file(path, text)?;
        recorder.finish(path, &[path.to_path_buf()])?;
    }
    Ok(())
}

fn bound(a: BoundArgs, args: &[String]) -> anyhow::Result<()> {
    let recorder = Recorder::start("bound", args, &a, None)?;
    let result: BoundResultF64 = search(a.cells, &a.solver, a.hamming)
        .run()
        .map_err(|e| anyhow::Error::new(e).context("bound search failed"))?;
    let record: BoundRecord = result.to_record();
    emit(&pretty(&record)?, a.out.as_deref(), recorder)
}

fn table(a: TableArgs, args: &[String]) -> anyhow::Result<()> {
    let recorder = Recorder::start("table", args, &a, None)?;
    let mut text = String::from("L,rho_star\n");
    for &cells in &a.cells {
        let result: BoundResultF64 = search(cells, &a.solver, false).run()?;
        text.push_str(&format!("{cells},{}\n", fmt_sig(result.rho_star)));
    }
    emit(&text, a.out.as_deref(), recorder)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_owned()).unwrap_or_default();
    let mut name = stem;
    name.push(suffix);
    path.with_file_name(name)
}

#[derive(Serialize)]
struct MetricSummary {
    #[serde(rename = "L")]
    cells: usize,
    rho: f64,
    feasible: bool,
    tight_lambda_max: Option<f64>,
    tight_ranges: Vec<(f64, f64)>,
    max_overlay_error: f64,
    axioms: hardisk::AxiomReport,
    metric_csv: PathBuf,
    report_csv: PathBuf,
}

fn metric(a: MetricArgs, args: &[String]) -> anyhow::Result<()> {
    let recorder = Recorder::start("metric", args, &a, None)?;
    let kernel = SavingsKernel::<f64>::new(a.cells, a.solver.order, a.solver.variant)?;
    let system = ConstraintSystemF64::from_kernel(&kernel, a.rho, a.solver.epsilon_hat)?;
    let found = system.feasibility()?;
    let Some(metric) = found.metric else {
        return Err(Precondition(format!(
            "rho = {} is infeasible for L = {}",
            a.rho, a.cells
        ))
        .into());
    };
    let slack = system.slack_report(&metric)?;
    let axioms = metric.check_axioms();

    metric.write_csv(create(&a.out)?)?;

    let report_path = sibling(&a.out, ".report.csv");
    let mut w = create(&report_path)?;
    writeln!(w, "lambda_right,d,minimal,residual,tight,analytic")?;
    let mut max_overlay_error: f64 = 0.0;
    for i in 0..a.cells {
        let lambda = system.lambda(i);
        let d = metric.values()[i];
        let analytic = if lambda <= 1.0 + 1e-12 {
            let v = analytic_small_ell(lambda, a.rho)?;
            max_overlay_error = max_overlay_error.max((v - d).abs());
            fmt_sig(v)
        } else {
            String::new()
        };
        let residual = slack.residuals[i];
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_sig(lambda),
            fmt_sig(d),
            fmt_sig(found.minimal.values()[i]),
            fmt_sig(residual),
            u8::from(residual < hardisk::contraction::TIGHT_THRESHOLD),
            analytic
        )?;
    }
    w.flush()?;

    let summary = MetricSummary {
        cells: a.cells,
        rho: round_sig(a.rho),
        feasible: true,
        tight_lambda_max: slack.tight_lambda_max.map(round_sig),
        tight_ranges: slack
            .tight_ranges
            .iter()
            .map(|&(lo, hi)| (round_sig(lo), round_sig(hi)))
            .collect(),
        max_overlay_error: round_sig(max_overlay_error),
        axioms,
        metric_csv: a.out.clone(),
        report_csv: report_path.clone(),
    };
    let text = pretty(&summary)?;
    let summary_path = sibling(&a.out, ".axioms.json");
    write_file(&summary_path, &text)?;
    print!("{text}");
    recorder.finish(&a.out, &[a.out.clone(), report_path, summary_path])
}

#[derive(Serialize)]
struct SimulationSummary {
    n: usize,
    rho: f64,
    seed: u64,
    steps: u64,
    accepted: u64,
    rejected: u64,
    acceptance_rate: f64,
    audits_passed: u64,
}

fn simulate(a: SimulateArgs, args: &[String]) -> anyhow::Result<()> {
    let recorder = Recorder::start("simulate", args, &a, Some(a.seed))?;
    let mut config = random_config::<f64>(a.n, a.rho, a.seed)?;
    let mut rng = stream_rng(a.seed, 1);
    let segments = a.checkpoints.max(1);
    let mut stats = hardisk::ChainStats::default();
    let mut audits = 0;
    for k in 0..segments {
        let todo = a.steps * (k + 1) / segments - a.steps * k / segments;
        stats += config.run_with(todo, &mut rng);
        config.audit()?;
        audits += 1;
    }
    let summary = SimulationSummary {
        n: a.n,
        rho: round_sig(a.rho),
        seed: a.seed,
        steps: stats.steps,
        accepted: stats.accepted,
        rejected: stats.rejected,
        acceptance_rate: round_sig(stats.acceptance_rate()),
        audits_passed: audits,
    };
    let text = pretty(&summary)?;
    let mut outputs = Vec::new();
    if let Some(prefix) = &a.snapshot {
        let csv_path = prefix.with_extension("csv");
        let json_path = prefix.with_extension("json");
        config.write_snapshot(&csv_path, &json_path, a.seed)?;
        outputs.extend([csv_path, json_path]);
    }
    print!("{text}");
    if let Some(path) = &a.out {
        write_file(path, &text)?;
        outputs.insert(0, path.clone());
    }
    if let Some(primary) = outputs.first().cloned() {
        recorder.finish(&primary, &outputs)?;
    }
    Ok(())
}

fn rounded(mut e: ContractionEstimate) -> ContractionEstimate {
    e.rho = round_sig(e.rho);
    e.ell_over_r = round_sig(e.ell_over_r);
    e.mean_delta_bound = round_sig(e.mean_delta_bound);
    e.mean_delta_exact = round_sig(e.mean_delta_exact);
    e.ci99_bound = e.ci99_bound.map(round_sig);
    e.ci99_exact = e.ci99_exact.map(round_sig);
    e
}

fn couple(a: CoupleArgs, args: &[String]) -> anyhow::Result<()> {
    let recorder = Recorder::start("couple", args, &a, Some(a.seed))?;
    let metric = match &a.metric {
        Some(path) => {
            let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            PiecewiseMetricF64::read_csv(f)
                .with_context(|| format!("reading metric {}", path.display()))?
        }
        None => PiecewiseMetricF64::constant_one(16),
    };
    if !(a.ell > 0.0 && a.ell <= 4.0) {
        bail!(Precondition(format!("--ell {} not in (0, 4]", a.ell)));
    }
    let experiment = CouplingExperiment {
        burn_in_sweeps: a.burn_in,
        ..CouplingExperiment::new(a.n, a.rho, a.ell, a.trials, a.seed)
    };
    let estimate = rounded(experiment.run(&metric)?);
    emit(&pretty(&estimate)?, a.out.as_deref(), recorder)
}

fn replay(a: ReplayArgs) -> anyhow::Result<()> {
    let m = manifest::read(&a.manifest)?;
    let argv = std::iter::once("hardisk".to_string()).chain(m.args.iter().cloned());
    let cli = Cli::try_parse_from(argv)?;
    if matches!(cli.command, Command::Replay(_)) {
        bail!(Precondition("a manifest cannot replay another replay".into()));
    }
    dispatch(cli.command, &m.args)
}
