use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use ce_density::{render_pgm, scale_sweep, write_density_csv, NSchedule, Sampler};
use ce_dynamics::{critical_orbit, Complex64, FamilyParams};
use ce_lab::pipeline::{run_scenario, write_run_dir};
use ce_lab::scenario::Scenario;
use ce_lab::verify::{all_pass, run_suite, VerifyOptions};
use ce_lab::{parse_complex, LabError};
use ce_partition::SquareStatus;
use ce_returns::{timeline, write_timeline_csv, CriticalNeighborhoods};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ce-lab", version, about = "Critical-orbit recurrence and parameter-exclusion experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct OrbitArgs {
    /// Parameter as RE,IM.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    c: Complex64,
    #[arg(long, default_value_t = 2)]
    d: u32,
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Write here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Built-in name or scenario file.
    #[arg(default_value = "cheb-neighborhood")]
    scenario: String,
    /// KEY=VALUE override, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    set: Vec<String>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario, LabError> {
        let mut s = Scenario::load(&self.scenario)?;
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| LabError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            s.set(k.trim(), v.trim())?;
        }
        Ok(s)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Critical orbit as CSV: n, re, im, alpha_n, gamma_n.
    Orbit(OrbitArgs),
    /// Free returns with bound and free periods.
    Timeline(OrbitArgs),
    /// Run a scenario and write the final partition tree as JSON lines.
    Partition {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full exclusion run into a directory.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "run")]
        out: PathBuf,
    },
    /// Escape density of Q(c0, eps0 * shrink^-k) for k = 0..=k-max.
    Density {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        c0: Complex64,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long, default_value_t = 1.0)]
        eps0: f64,
        #[arg(long, default_value_t = 4.0)]
        shrink: f64,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        /// Samples per side.
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Jittered samples from this seed instead of grid centers.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        n_base: usize,
        #[arg(long, default_value_t = 2)]
        n_growth: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Escape-time PGM of Q(c0, eps).
    Render {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        c0: Complex64,
        #[arg(long, default_value_t = 2)]
        d: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 256)]
        width: usize,
        #[arg(long, default_value_t = 256)]
        height: usize,
        #[arg(long, default_value_t = 1000)]
        n_max: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Property suite: chain-identity, transversality, p-lt-n, bound-order,
    /// inessential-no-deletion, q-bound, deletion-bound, density-trend, or all.
    Verify {
        suite: String,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "-2,0")]
        anchor: Complex64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        /// Scenarios feeding the exclusion suites.
        #[arg(long = "scenario")]
        scenarios: Vec<String>,
    },
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, LabError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn orbit(a: &OrbitArgs) -> Result<(), LabError> {
    let o = critical_orbit(&FamilyParams::new(a.d, a.c)?, a.n)?;
    if o.is_degenerate() {
        eprintln!(
            "warning: critical orbit hits 0 at n = {}; later recurrence exponents are infinite",
            o.first_zero().unwrap_or(0)
        );
    }
    if let Some(k) = o.escape_index {
        eprintln!("note: orbit escaped at n = {k}");
    }
    let mut w = csv::Writer::from_writer(sink(&a.csv)?);
    w.write_record(["n", "re", "im", "alpha_n", "gamma_n"])?;
    for n in 1..=o.length() {
        let z = o.point(n);
        w.write_record([n.to_string(), z.re.to_string(), z.im.to_string(), o.alpha[n].to_string(), o.gamma[n].to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn execute(cmd: Cmd) -> Result<bool, LabError> {
    match cmd {
        Cmd::Orbit(a) => orbit(&a)?,
        Cmd::Timeline(a) => {
            let o = critical_orbit(&FamilyParams::new(a.d, a.c)?, a.n)?;
            let ev = timeline(&o, &CriticalNeighborhoods::default(), a.n);
            let mut w = sink(&a.csv)?;
            write_timeline_csv(&ev, &o, &mut w)?;
            w.flush()?;
        }
        Cmd::Partition { scenario, out } => {
            let a = run_scenario(&scenario.load()?)?;
            let tree = &a.output.tree;
            let mut w = sink(&out)?;
            tree.write_jsonl(&mut w)?;
            w.flush()?;
            let total = tree.leaf_area();
            for s in [SquareStatus::Escaped, SquareStatus::DeletedAlpha, SquareStatus::Undetermined, SquareStatus::Anomalous] {
                eprintln!("{:<13} {:.6e}", s.label(), tree.area_with_status(s) / total);
            }
        }
        Cmd::Run { scenario, out } => {
            let a = run_scenario(&scenario.load()?)?;
            write_run_dir(&a, &out)?;
            let s = &a.output.summary;
            println!("{}", out.display());
            println!("startup    {:?} at N = {}", s.startup_status, s.startup_n);
            println!("delta0     {:.6e}", s.delta0);
            println!("escaped    {:.6e}", s.escaped_fraction);
            println!("deleted    {:.6e}", s.deleted_fraction);
        }
        Cmd::Density { c0, d, eps0, shrink, k_max, grid, seed, n_base, n_growth, csv } => {
            if shrink <= 1.0 || !(eps0 > 0.0) || grid == 0 {
                return Err(LabError::Usage("need shrink > 1, eps0 > 0, grid > 0".into()));
            }
            let sampler = match seed {
                Some(seed) => Sampler::Stratified { n: grid, seed },
                None => Sampler::Grid { n: grid },
            };
            let rows = scale_sweep(c0, d, eps0, shrink, k_max, &sampler, &NSchedule { base: n_base, growth: n_growth })?;
            let mut w = sink(&csv)?;
            write_density_csv(&rows, &mut w)?;
            w.flush()?;
        }
        Cmd::Render { c0, d, eps, width, height, n_max, out } => {
            if !(eps > 0.0) || width == 0 || height == 0 {
                return Err(LabError::Usage("need eps > 0 and a non-empty image".into()));
            }
            std::fs::write(out, render_pgm(c0, d, eps, width, height, n_max))?;
        }
        Cmd::Verify { suite, anchor, seed, grid, k_max, scenarios } => {
            let mut opts = VerifyOptions { seed, anchor, density_grid: grid, density_k_max: k_max, ..Default::default() };
            if !scenarios.is_empty() {
                opts.scenarios = scenarios;
            }
            let rows = run_suite(&suite, &opts)?;
            for r in &rows {
                println!("{r}");
            }
            return Ok(all_pass(&rows));
        }
    }
    Ok(true)
}

fn threads() -> Result<(), LabError> {
    let Ok(v) = std::env::var("CE_LAB_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| LabError::Usage(format!("CE_LAB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| LabError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match threads().and_then(|_| execute(cli.cmd)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
