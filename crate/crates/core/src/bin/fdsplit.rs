use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fdsplit::config::SystemConfig;
use fdsplit::decomposition::identity_suite;
use fdsplit::error::{Error, Result};
use fdsplit::harness::{
    aggregate_mean, load_config_file, parse_methods, run_experiment, Experiment, ExperimentSpec, Profile,
};

#[derive(Parser)]
#[command(name = "fdsplit", version, about = "Uplink/downlink antenna splitting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One realization, every method.
    Single(RunArgs),
    /// Sum-SE distribution at a fixed point.
    Cdf(RunArgs),
    /// Mean sum SE over SI cancellation levels.
    SweepSi(RunArgs),
    /// Mean sum SE over antenna counts.
    SweepAntennas(RunArgs),
    /// Internal consistency checks.
    Selftest,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo realizations per sweep point.
    #[arg(long)]
    iters: Option<usize>,
    /// Comma separated subset of rlx,exh,split.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "desk")]
    profile: String,
    /// Record measured wall times (output is then not reproducible).
    #[arg(long)]
    timing: bool,
}

fn build(experiment: Experiment, args: &RunArgs) -> Result<(ExperimentSpec, SystemConfig)> {
    let profile: Profile = args.profile.parse()?;
    let file = args.config.as_deref().map(load_config_file).transpose()?;
    let mut cfg = SystemConfig::default();
    if let Some(f) = &file {
        f.apply_system(&mut cfg);
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let mut spec = ExperimentSpec::for_profile(experiment, profile, &cfg);
    if let Some(f) = &file {
        f.apply_experiment(&mut spec)?;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(n) = args.iters {
        spec.monte_carlo_iters = n;
    }
    if let Some(m) = &args.methods {
        spec.methods = parse_methods(m)?;
    }
    if let Some(p) = &args.out {
        spec.output_path = Some(p.clone());
    }
    spec.record_wall_time = args.timing;
    spec.validate()?;
    Ok((spec, cfg))
}

fn run(experiment: Experiment, args: &RunArgs) -> Result<()> {
    let (spec, cfg) = build(experiment, args)?;
    let records = run_experiment(&spec, &cfg)?;
    if experiment == Experiment::Single {
        for r in &records {
            println!("{:<6} sum_mse {:.6}  sum_se {:.4} bit/s/Hz  iterations {}", r.method, r.sum_mse, r.sum_se, r.iterations_used);
        }
    } else {
        for (k, g) in aggregate_mean(&records) {
            println!("{:<6} M={:<3} si={:>6} dB  mean sum SE {:.4}  (n={})", k.method, k.num_antennas, k.si_db(), g.mean_se, g.count);
        }
    }
    if let Some(p) = &spec.output_path {
        eprintln!("wrote {} records to {}", records.len(), p.display());
    }
    Ok(())
}

fn selftest() -> Result<()> {
    let mut ok = true;
    for c in identity_suite() {
        println!("{:<18} max rel err {:.2e}  {}", c.name, c.max_rel_err, if c.passed { "ok" } else { "FAILED" });
        ok &= c.passed;
    }
    if ok {
        Ok(())
    } else {
        Err(Error::Numerical("identity suite failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Single(a) => run(Experiment::Single, a),
        Command::Cdf(a) => run(Experiment::Cdf, a),
        Command::SweepSi(a) => run(Experiment::SweepSi, a),
        Command::SweepAntennas(a) => run(Experiment::SweepAntennas, a),
        Command::Selftest => selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
