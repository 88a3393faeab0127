//! `discord-bounds`: bounds, oracles and experiment scans from the command line.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 invalid input.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use discord_bounds::harness::{self, run_channel, run_dqc1, run_scan, run_selftest, ScanConfig, SelfTestConfig};
use discord_bounds::qstate::{random_unitary, read_state, read_unitary, seeded_rng, traceless_unitary, write_state};
use discord_bounds::{
    compute_bounds, make_x_state, minimize_povm, minimize_projective, x_state_discord, BlochVector, Error,
    UnitaryMatrix, XStateParams,
};

/// Largest DQC1 register for which the generic pipeline runs at all.
const DQC1_MAX_QUBITS: u32 = 10;
/// Largest DQC1 register for which the generic pipeline and oracle run by default.
const DQC1_CROSS_CHECK_QUBITS: u32 = 6;

#[derive(Parser)]
#[command(name = "discord-bounds", version, about = "Computable bounds on the quantum discord of qubit-qudit states")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower and upper bounds for a state file.
    Bounds { state: PathBuf },
    /// Brute-force discord by projective measurements, optionally also POVMs.
    Oracle {
        state: PathBuf,
        /// Also minimize over rank-1 POVMs with up to this many outcomes (2-4).
        #[arg(long)]
        povm: Option<usize>,
    },
    /// Seeded random-state scan comparing the bounds with the projective oracle.
    Figure1(Figure1Args),
    /// Closed-form bounds for the DQC1 output state.
    Dqc1(Dqc1Args),
    /// Bounds on the accessible information of a binary qubit channel.
    Channel(ChannelArgs),
    /// Closed-form discord of a two-qubit X-state.
    Xstate(XStateArgs),
    /// Run the invariant suite at reduced sample sizes.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct Figure1Args {
    #[arg(long, default_value_t = 10_000)]
    n: u64,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..=4))]
    rank: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report the tight upper bound instead of the weak closed form.
    #[arg(long)]
    tight: bool,
    /// Also run the POVM oracle with up to this many outcomes.
    #[arg(long)]
    povm: Option<usize>,
}

#[derive(Args)]
struct Dqc1Args {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
    n_qubits: u32,
    #[arg(long)]
    alpha: f64,
    /// Unitary JSON file acting on the register.
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    unitary: Option<PathBuf>,
    /// Seed for a random unitary.
    #[arg(long)]
    random: Option<u64>,
    /// Make the random unitary traceless by pairing eigenphases `phi` and `phi + pi`.
    #[arg(long, requires = "random")]
    traceless: bool,
    /// Skip the generic pipeline and oracle cross-checks.
    #[arg(long)]
    formula_only: bool,
}

#[derive(Args)]
struct ChannelArgs {
    #[arg(long)]
    p1: f64,
    /// Bloch vector of the first signal, as `x,y,z`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_bloch)]
    a: BlochVector,
    /// Bloch vector of the second signal, as `x,y,z`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_bloch)]
    b: BlochVector,
    /// Skip the POVM oracle.
    #[arg(long)]
    no_oracle: bool,
}

#[derive(Args)]
struct XStateArgs {
    #[arg(long, allow_hyphen_values = true)]
    x: f64,
    #[arg(long, allow_hyphen_values = true)]
    y: f64,
    #[arg(long, allow_hyphen_values = true)]
    s1: f64,
    #[arg(long, allow_hyphen_values = true)]
    s2: f64,
    #[arg(long, allow_hyphen_values = true)]
    s3: f64,
    /// Also write the state to this JSON file.
    #[arg(long)]
    save: Option<PathBuf>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Smaller sample sizes.
    #[arg(long)]
    quick: bool,
    /// Deliberately shift `co` in the lower bound; the sandwich check should then fail.
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    co_offset: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_bloch(s: &str) -> Result<BlochVector, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let v: [f64; 3] = parts.try_into().map_err(|p: Vec<f64>| format!("expected 3 components, got {}", p.len()))?;
    // Length is checked where the channel is built so that the error carries its name.
    Ok(BlochVector(v))
}

enum Failure {
    Input(Error),
    Property(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(Error::from(e))
    }
}

type CliResult = Result<(), Failure>;

fn emit_json<T: Serialize>(value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    println!("{text}");
    Ok(())
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|c| format!("{c:.9}")).collect();
    format!("({})", parts.join(", "))
}

fn cmd_bounds(state: &PathBuf, json: bool) -> CliResult {
    let rho = read_state(state)?;
    let b = compute_bounds(&rho)?;
    if json {
        return emit_json(&b);
    }
    println!("lower      {}", b.lower);
    println!("upper      {}", b.upper);
    println!("coincide   {}", b.coincide);
    println!("axis m     {}", fmt_vec(&b.direction.m));
    println!("t1         {}", b.t1);
    println!("q2 filtered {}", b.q2);
    println!("q spectrum {}", fmt_vec(&b.spectrum.q));
    println!("L          {}", b.l_value);
    Ok(())
}

#[derive(Serialize)]
struct OracleReport {
    projective: discord_bounds::OracleResult,
    povm: Option<discord_bounds::OracleResult>,
}

fn cmd_oracle(state: &PathBuf, povm: Option<usize>, json: bool) -> CliResult {
    let rho = read_state(state)?;
    let report = OracleReport {
        projective: minimize_projective(&rho),
        povm: povm.map(|n| minimize_povm(&rho, n)).transpose()?,
    };
    if json {
        return emit_json(&report);
    }
    let p = &report.projective;
    println!("projective {} ({} evaluations, converged {})", p.value, p.evaluations, p.converged);
    if let discord_bounds::Argmin::Projective(m) = &p.argmin {
        println!("axis m     {}", fmt_vec(m));
    }
    if let Some(r) = &report.povm {
        println!("povm       {} ({} evaluations, converged {})", r.value, r.evaluations, r.converged);
        for e in r.argmin.effects() {
            println!("  effect   {}", fmt_vec(&e));
        }
    }
    Ok(())
}

fn cmd_figure1(args: &Figure1Args, json: bool) -> CliResult {
    let mut cfg = ScanConfig::figure1(args.n, args.rank as usize, args.seed);
    if args.tight {
        cfg.upper = harness::UpperKind::Tight;
    }
    cfg.povm_outcomes = args.povm;
    let report = run_scan(&cfg)?;
    match &args.out {
        Some(path) => report.write_csv(BufWriter::new(File::create(path)?))?,
        None => report.write_csv(io::stdout().lock())?,
    }
    let s = &report.summary;
    if json {
        emit_json(s)?;
    } else {
        // Keep stdout clean for the CSV when no output file is given.
        let mut out: Box<dyn Write> = if args.out.is_some() { Box::new(io::stdout()) } else { Box::new(io::stderr()) };
        writeln!(out, "states              {}", s.n)?;
        writeln!(out, "fraction within 0.01 {}", s.fraction_within_0_01)?;
        writeln!(out, "max |gap|           {}", s.max_abs_gap)?;
        writeln!(out, "violations          {}", s.violations)?;
    }
    if s.violations > 0 {
        return Err(Failure::Property(format!("{} rows violate the sandwich", s.violations)));
    }
    Ok(())
}

fn dqc1_unitary(args: &Dqc1Args) -> Result<UnitaryMatrix, Failure> {
    let d = 1usize << args.n_qubits;
    let u = match (&args.unitary, args.random) {
        (Some(path), _) => read_unitary(path)?,
        (None, Some(seed)) if args.traceless => traceless_unitary(d, seed)?,
        (None, Some(seed)) => random_unitary(d, &mut seeded_rng(seed)),
        (None, None) => unreachable!("clap requires --unitary or --random"),
    };
    if u.dim() != d {
        return Err(Error::WrongDimension { expected: d, actual: u.dim() }.into());
    }
    Ok(u)
}

fn cmd_dqc1(args: &Dqc1Args, json: bool) -> CliResult {
    if args.n_qubits > DQC1_MAX_QUBITS && !args.formula_only {
        return Err(Error::DimensionTooLarge { dim: 1 << args.n_qubits, max: 1 << DQC1_MAX_QUBITS }.into());
    }
    let u = dqc1_unitary(args)?;
    let cross = !args.formula_only && args.n_qubits <= DQC1_CROSS_CHECK_QUBITS;
    let report = run_dqc1(&u, args.alpha, cross, cross)?;
    if json {
        return emit_json(&report);
    }
    let p = &report.params;
    println!("d          {}", p.d);
    println!("alpha      {}", p.alpha);
    println!("u1         {}", p.u1);
    println!("beta       {}", p.beta);
    match report.formula_lower {
        Some(lo) => println!("formula lower {lo}"),
        None => println!("formula lower unavailable: {}", Error::Regime { u1: p.u1, d: p.d }),
    }
    println!("formula upper {}", report.formula_upper);
    if let Some(g) = report.generic {
        println!("generic lower {}", g.lower);
        println!("generic upper {}", g.upper);
    }
    if let Some(o) = report.oracle_projective {
        println!("oracle     {o}");
    }
    Ok(())
}

fn cmd_channel(args: &ChannelArgs, json: bool) -> CliResult {
    let report = run_channel(args.p1, args.a, args.b, !args.no_oracle)?;
    if json {
        return emit_json(&report);
    }
    let b = &report.bounds;
    println!("holevo chi {}", b.holevo_chi);
    println!("lambda +-  {} {}", b.lambda_plus, b.lambda_minus);
    println!("lower      {}", b.lower);
    println!("upper      {}", b.upper);
    println!("coincide   {}", b.coincide);
    println!("axis m     {}", fmt_vec(&b.optimal_direction));
    if let Some(o) = report.oracle {
        println!("oracle     {o}");
    }
    Ok(())
}

#[derive(Serialize)]
struct XStateReport {
    condition_lhs: f64,
    condition_rhs: f64,
    closed_form: Option<f64>,
    bounds: discord_bounds::DiscordBounds,
}

fn cmd_xstate(args: &XStateArgs, json: bool) -> CliResult {
    let p = XStateParams::new(args.x, args.y, args.s1, args.s2, args.s3);
    let rho = make_x_state(p)?;
    if let Some(path) = &args.save {
        write_state(path, &rho)?;
    }
    let (lhs, rhs) = discord_bounds::bounds::x_state_coincidence_condition(&p);
    let closed_form = match x_state_discord(p) {
        Ok(v) => Some(v),
        Err(Error::ConditionViolated { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let report = XStateReport { condition_lhs: lhs, condition_rhs: rhs, closed_form, bounds: compute_bounds(&rho)? };
    if json {
        return emit_json(&report);
    }
    println!("condition  {lhs} <= {rhs}: {}", lhs <= rhs);
    match closed_form {
        Some(v) => println!("discord    {v}"),
        None => println!("discord    no closed form (condition violated)"),
    }
    println!("lower      {}", report.bounds.lower);
    println!("upper      {}", report.bounds.upper);
    println!("coincide   {}", report.bounds.coincide);
    Ok(())
}

fn cmd_selftest(args: &SelftestArgs, json: bool) -> CliResult {
    let cfg = SelfTestConfig { quick: args.quick, co_offset: args.co_offset, seed: args.seed };
    let results = run_selftest(&cfg);
    if json {
        emit_json(&results)?;
    } else {
        for r in &results {
            let verdict = if r.passed { "PASS" } else { "FAIL" };
            println!("{verdict} {:<30} checked {:>4}  failures {:>4}  worst {:.3e}", r.name, r.checked, r.failures, r.worst);
        }
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(format!("failed properties: {}", failed.join(", "))))
    }
}

fn run(cli: &Cli) -> CliResult {
    harness::init_threads_from_env()?;
    match &cli.command {
        Command::Bounds { state } => cmd_bounds(state, cli.json),
        Command::Oracle { state, povm } => cmd_oracle(state, *povm, cli.json),
        Command::Figure1(args) => cmd_figure1(args, cli.json),
        Command::Dqc1(args) => cmd_dqc1(args, cli.json),
        Command::Channel(args) => cmd_channel(args, cli.json),
        Command::Xstate(args) => cmd_xstate(args, cli.json),
        Command::Selftest(args) => cmd_selftest(args, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(2)
        }
    }
}
