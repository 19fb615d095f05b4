use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use rtsim_core::harness::experiment::{default_out_dir, jobs, OUT_DIR_ENV};
use rtsim_core::harness::{parse_config, run_experiment, run_single, Job, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "rtsim",
    version,
    about = "Real-time packet scheduling in wireless sensor networks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    /// Output directory
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    /// Write event traces (`run`) or send the trace to a file under --out (`trace`)
    #[arg(long, global = true)]
    trace: bool,
    /// Suppress progress and summary output
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every sweep point and seed, writing CSV and plot data
    Run { config: PathBuf },
    /// Run one seed and print its event trace
    Trace {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the deployed topology: `id x y energy zone`
    Topo {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and validate a scenario file
    Validate { config: PathBuf },
}

fn load(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("{}", path.display()))
}

fn cmd_run(cli: &Cli, path: &Path) -> Result<()> {
    let cfg = load(path)?;
    let out = cli.out.clone().unwrap_or_else(default_out_dir);
    if !cli.quiet {
        eprintln!("{}: {} runs", cfg.name, cfg.run_count());
    }
    let batch = run_experiment(&cfg)?;
    let written = batch
        .write(&out)
        .with_context(|| format!("writing to {}", out.display()))?;
    if cli.trace {
        for job in jobs(&cfg) {
            let run = run_single(&cfg, job, true, false)?;
            let p = job.point;
            let name = format!(
                "{}_{}_{}_a{}_d{}_s{}.trace",
                cfg.name, p.policy, p.protocol, p.alpha, p.deadline, job.seed
            );
            write_trace(&out.join(name), &run.trace)?;
        }
    }
    if !cli.quiet {
        println!(
            "{:<14} {:<4} {:>5} {:>8} {:>9} {:>9}",
            "policy", "rt", "alpha", "deadline", "miss", "drop"
        );
        for s in batch.series() {
            for p in &s.points {
                println!(
                    "{:<14} {:<4} {:>5} {:>8} {:>9.4} {:>9.4}",
                    s.policy.to_string(),
                    s.protocol.to_string(),
                    s.alpha,
                    p.deadline,
                    p.mean_miss,
                    p.mean_drop
                );
            }
        }
        eprintln!("wrote {} files to {}", written.len(), out.display());
    }
    Ok(())
}

fn write_trace(path: &Path, lines: &[rtsim_core::engine::TraceLine]) -> Result<()> {
    let f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()?;
    Ok(())
}

fn first_job(cfg: &ScenarioConfig, seed: Option<u64>) -> Result<Job> {
    let Some(mut job) = jobs(cfg).into_iter().next() else {
        bail!("scenario has no runs");
    };
    if let Some(s) = seed {
        job.seed = s;
    }
    Ok(job)
}

fn cmd_trace(cli: &Cli, path: &Path, seed: Option<u64>) -> Result<()> {
    let cfg = load(path)?;
    let job = first_job(&cfg, seed)?;
    let run = run_single(&cfg, job, true, false)?;
    if cli.trace || cli.out.is_some() {
        let dir = cli.out.clone().unwrap_or_else(default_out_dir);
        fs::create_dir_all(&dir)?;
        let file = dir.join(format!("{}_s{}.trace", cfg.name, job.seed));
        write_trace(&file, &run.trace)?;
        if !cli.quiet {
            eprintln!("wrote {}", file.display());
        }
    } else {
        let stdout = io::stdout();
        let mut w = BufWriter::new(stdout.lock());
        for l in &run.trace {
            writeln!(w, "{l}")?;
        }
        w.flush()?;
    }
    if !cli.quiet {
        let s = &run.summary;
        eprintln!(
            "published={} on_time={} late={} dropped={} in_flight={} miss={:.6} drop={:.6} control={}",
            s.published, s.on_time, s.late, s.dropped, s.in_flight, s.miss_ratio, s.drop_ratio, s.control_messages
        );
        eprintln!(
            "transmissions={} collisions={} deferrals={}",
            run.mac.transmissions, run.mac.collisions, run.mac.deferrals
        );
    }
    Ok(())
}

fn cmd_topo(path: &Path, seed: Option<u64>) -> Result<()> {
    let cfg = load(path)?;
    let seed = seed.or(cfg.seeds.first().copied()).unwrap_or(1);
    let topo = cfg.build_topology(seed)?;
    print!("{}", topo.dump());
    Ok(())
}

fn cmd_validate(cli: &Cli, path: &Path) -> Result<()> {
    let cfg = load(path)?;
    if !cli.quiet {
        println!("{}: ok ({} runs)", cfg.name, cfg.run_count());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Command::Run { config } => cmd_run(&cli, config),
        Command::Trace { config, seed } => cmd_trace(&cli, config, *seed),
        Command::Topo { config, seed } => cmd_topo(config, *seed),
        Command::Validate { config } => cmd_validate(&cli, config),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
