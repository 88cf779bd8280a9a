//! Command-line front end: reproducible simulation runs, theory tables and
//! simulation-vs-theory comparison reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dupdel::analysis::{compare, ComparisonReport};
use dupdel::formats;
use dupdel::process::{replica_seed, simulate, ProcessParams, Snapshot};
use dupdel::theory;
use dupdel::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dupdel",
    about = "Duplication-deletion clique process: simulation, exact limit distribution, diagnostics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the process and write checkpoint snapshots.
    Simulate(SimulateArgs),
    /// Tabulate the exact limiting degree distribution.
    Theory(TheoryArgs),
    /// Run a simulation and compare checkpoints against the exact limit.
    Compare(CompareArgs),
    /// Tabulate the tail asymptotics next to the exact values.
    Asymptotics(AsymptoticsArgs),
    /// Cross-check all computation methods against each other.
    OracleCheck(OracleCheckArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

impl OutputArgs {
    fn emit(
        &self,
        csv: impl FnOnce() -> Result<String>,
        json: impl FnOnce() -> Result<String>,
    ) -> Result<()> {
        let text = match self.format {
            Format::Csv => csv()?,
            Format::Json => json()?,
        };
        match &self.out {
            Some(path) => formats::atomic_write(path, &text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Duplication probability, strictly between 0 and 1.
    #[arg(long)]
    p: f64,
    #[arg(long)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated checkpoint steps (scientific notation allowed, e.g.
    /// 1e3,1e4). Defaults to the final step only.
    #[arg(long)]
    checkpoints: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TheoryArgs {
    #[arg(long)]
    p: f64,
    /// Truncation K; chosen by the tail rule when omitted.
    #[arg(long = "K")]
    truncation: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "K")]
    truncation: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    checkpoints: Option<String>,
    /// Number of independent replicas (seed-split streams).
    #[arg(long, default_value_t = 1)]
    replicas: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AsymptoticsArgs {
    #[arg(long)]
    p: f64,
    #[arg(long = "K", default_value_t = 100)]
    truncation: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OracleCheckArgs {
    #[arg(long)]
    p: f64,
    #[arg(long = "K", default_value_t = 50)]
    truncation: usize,
    /// Maximum allowed pairwise deviation between exact methods.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(
            "--p",
            format!("need 0 < p < 1 strictly, got {p}"),
        ));
    }
    Ok(())
}

fn parse_checkpoints(spec: &Option<String>, steps: u64) -> Result<Vec<u64>> {
    let cps = match spec {
        Some(text) => formats::parse_checkpoint_list(text)?,
        None => vec![steps],
    };
    dupdel::process::validate_checkpoints(&cps, steps).map_err(|e| match e {
        Error::InvalidParameter { reason, .. } => Error::invalid("--checkpoints", reason),
        other => other,
    })?;
    Ok(cps)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    check_p(args.p)?;
    if args.steps == 0 {
        return Err(Error::invalid("--steps", "need at least one step"));
    }
    let checkpoints = parse_checkpoints(&args.checkpoints, args.steps)?;
    let params = ProcessParams::new(args.p, args.seed)?;
    let mut snapshots: Vec<Snapshot> = Vec::with_capacity(checkpoints.len());
    let final_state = simulate(&params, args.steps, &checkpoints, |_, snap| {
        snapshots.push(snap);
    })?;
    args.output.emit(
        || Ok(formats::snapshots_to_csv(&snapshots)),
        || formats::snapshots_to_json(&snapshots),
    )?;
    eprintln!(
        "growth_ratio N_m/(p m) = {:.6}",
        dupdel::analysis::growth_rate_check(&final_state, args.p)
    );
    Ok(())
}

fn theory_table_for(
    p: f64,
    truncation: Option<usize>,
    tol: f64,
) -> Result<theory::DegreeDistribution> {
    let k = match truncation {
        Some(k) => k,
        None => theory::choose_truncation(p, tol.max(1e-6))?,
    };
    theory::degree_distribution(p, k, tol)
}

fn cmd_theory(args: &TheoryArgs) -> Result<()> {
    check_p(args.p)?;
    let dist = theory_table_for(args.p, args.truncation, args.tol)?;
    let table = formats::theory_table(&dist)?;
    args.output.emit(
        || Ok(formats::theory_table_to_csv(&table)),
        || formats::theory_table_to_json(&table),
    )
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    check_p(args.p)?;
    if args.steps == 0 {
        return Err(Error::invalid("--steps", "need at least one step"));
    }
    if args.replicas == 0 {
        return Err(Error::invalid("--replicas", "need at least one replica"));
    }
    let checkpoints = parse_checkpoints(&args.checkpoints, args.steps)?;
    let dist = theory_table_for(args.p, args.truncation, args.tol)?;

    let mut rows: Vec<(u64, u64, ComparisonReport)> = Vec::new();
    for r in 0..args.replicas {
        let seed = if args.replicas == 1 {
            args.seed
        } else {
            replica_seed(args.seed, r)
        };
        let params = ProcessParams::new(args.p, seed)?;
        let mut reports = Vec::new();
        simulate(&params, args.steps, &checkpoints, |m, snap| {
            let state = dupdel::process::CliqueState::from_snapshot(&snap);
            reports.push((m, compare(&state, &dist, args.p)));
        })?;
        for (m, report) in reports {
            rows.push((r, m, report));
        }
    }

    let final_m = *checkpoints.last().unwrap();
    let finals: Vec<f64> = rows
        .iter()
        .filter(|(_, m, _)| *m == final_m)
        .map(|(_, _, rep)| rep.tv_distance)
        .collect();
    let mean_tv = finals.iter().sum::<f64>() / finals.len() as f64;
    eprintln!(
        "mean tv_distance at m={final_m}: {mean_tv:.6} over {} replica(s)",
        finals.len()
    );

    args.output.emit(
        || {
            let mut out =
                String::from("replica,m,tv_distance,fitted_exponent,fitted_rate,growth_ratio\n");
            for (r, m, rep) in &rows {
                let opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{:e},{},{},{:e}\n",
                    r,
                    m,
                    rep.tv_distance,
                    opt(rep.fitted_exponent),
                    opt(rep.fitted_rate),
                    rep.growth_ratio
                ));
            }
            Ok(out)
        },
        || {
            #[derive(serde::Serialize)]
            struct Row<'a> {
                replica: u64,
                m: u64,
                #[serde(flatten)]
                report: &'a ComparisonReport,
            }
            let entries: Vec<Row> = rows
                .iter()
                .map(|(r, m, rep)| Row {
                    replica: *r,
                    m: *m,
                    report: rep,
                })
                .collect();
            Ok(serde_json::to_string_pretty(&entries).map_err(Error::from)?)
        },
    )
}

fn cmd_asymptotics(args: &AsymptoticsArgs) -> Result<()> {
    check_p(args.p)?;
    let rp = theory::regime_params(args.p)?;
    let rows: Vec<(usize, f64)> = (1..=args.truncation)
        .map(|k| Ok((k, theory::asymptotic_value(args.p, k)?)))
        .collect::<Result<_>>()?;
    args.output.emit(
        || {
            let mut out = format!("# p={} regime={}\nk,asymptotic_k\n", args.p, rp.regime);
            for (k, v) in &rows {
                out.push_str(&format!("{k},{v:e}\n"));
            }
            Ok(out)
        },
        || {
            #[derive(serde::Serialize)]
            struct Row {
                k: usize,
                asymptotic_k: f64,
            }
            let entries: Vec<Row> = rows
                .iter()
                .map(|&(k, asymptotic_k)| Row { k, asymptotic_k })
                .collect();
            Ok(serde_json::to_string_pretty(&entries).map_err(Error::from)?)
        },
    )
}

fn cmd_oracle_check(args: &OracleCheckArgs) -> Result<()> {
    check_p(args.p)?;
    let k_max = args.truncation;
    let quad = theory::degree_distribution(args.p, k_max, 1e-12)?;
    let back = theory::backward_recursion_auto(args.p, k_max)?;
    let supercritical = theory::regime_params(args.p)?.regime == theory::Regime::Supercritical;
    let series = if supercritical {
        Some(theory::degree_dist_hypergeometric(args.p, k_max)?)
    } else {
        None
    };

    let max_dev = |a: &theory::DegreeDistribution, b: &theory::DegreeDistribution| {
        (1..=k_max)
            .map(|k| (a.entry(k) - b.entry(k)).abs())
            .fold(0.0_f64, f64::max)
    };

    let mut failures = Vec::new();
    let mut report = |pair: &str, dev: f64, tol: f64| {
        println!("{pair}: max deviation {dev:.3e} (tol {tol:.0e})");
        if dev > tol {
            failures.push((pair.to_string(), dev));
        }
    };

    report(
        "quadrature vs backward-recursion",
        max_dev(&quad, &back),
        args.tol,
    );
    if let Some(series) = &series {
        report(
            "quadrature vs hypergeometric",
            max_dev(&quad, series),
            args.tol,
        );
        report(
            "hypergeometric vs backward-recursion",
            max_dev(series, &back),
            args.tol,
        );
    } else {
        println!("hypergeometric: skipped (series form defined for p > 1/2 only)");
    }

    // Fixed point converges from below to c_k = d_k/k; check closeness on
    // low k and the one-sided bound everywhere.
    let fp = theory::lower_bound_fixed_point(args.p, (4 * k_max).max(400), 10_000)?;
    let c = quad.clique_size_distribution();
    let mut fp_dev = 0.0_f64;
    let mut fp_overshoot = 0.0_f64;
    for k in 1..=20.min(k_max) {
        fp_dev = fp_dev.max((c.values[k - 1] - fp.values[k - 1]).abs());
    }
    for k in 1..=k_max {
        fp_overshoot = fp_overshoot.max(fp.values[k - 1] - c.values[k - 1]);
    }
    report("fixed-point vs quadrature (c_k, k <= 20)", fp_dev, 1e-4);
    report(
        "fixed-point overshoot above c_k",
        fp_overshoot.max(0.0),
        1e-9,
    );

    if let Some((pair, dev)) = failures.first() {
        return Err(Error::NonConvergence {
            worst_k: k_max,
            detail: format!("method pair `{pair}` deviates by {dev:.3e}"),
        });
    }
    println!("all method pairs agree");
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Theory(args) => cmd_theory(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Asymptotics(args) => cmd_asymptotics(args),
        Command::OracleCheck(args) => cmd_oracle_check(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
