//! Command line laboratory: scenario sweeps, verification suites, exact
//! time scale tables, trajectory dumps, collapse set queries and
//! equilibrium flow exports. Exit codes: 0 pass, 1 hard check failed,
//! 2 usage or solver error.

use std::collections::BTreeSet;
use std::error::Error;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use east_core::bottleneck::{delta_chain, det_passes, in_astar};
use east_core::exact::{caps, Engine, StateSet, TimescaleReport};
use east_core::graphical::{evolve, evolve_thinned, NoiseField};
use east_core::lab::{traceability, Grid, Report, Scenario, ScenarioKind, Suite};
use east_core::network::{b_ell, capacity, equilibrium_flow, flow_energy, Network};
use east_core::{Configuration, Params};

#[derive(Parser)]
#[command(
    name = "eastlab",
    version,
    about = "East chain laboratory: exact time scales, bottlenecks and flows"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario sweep over a parameter grid
    Scenario {
        /// equivalence | paletti | separation | heterogeneity | exponential_law
        name: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run a verification suite; hard checks gate the exit code
    Verify {
        /// core | coupling | equo | dominare | paletti | astar | gamma |
        /// flows | capacity | all
        #[arg(default_value = "all")]
        suite: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Exact time scale table over a grid
    Exact {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Replay one trajectory of the ring-and-coin construction as TSV
    Simulate {
        /// chain length
        #[arg(long = "L")]
        l: usize,
        /// vacancy density
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1729)]
        seed: u64,
        /// time to run the clocks for
        #[arg(long)]
        horizon: f64,
        /// starting spins such as 0110, site 1 first; all ones with the
        /// last site vacant when omitted
        #[arg(long)]
        start: Option<String>,
        /// record only the legal rings
        #[arg(long)]
        thin: bool,
        /// output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collapse set membership predicate; exits 0 for members, 1 otherwise
    Astar {
        /// spins such as 0110, site 1 first
        #[arg(long)]
        config: String,
    },
    /// Export the equilibrium flow from the all ones state to a vacancy set
    Flows {
        /// chain length
        #[arg(long = "L")]
        l: usize,
        /// vacancy density
        #[arg(long)]
        q: f64,
        /// the target is the set vacant at this site with everything to its
        /// right occupied; the last site when omitted
        #[arg(long)]
        ell: Option<usize>,
        /// output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GridArgs {
    /// chain lengths, comma separated
    #[arg(long = "L", value_delimiter = ',')]
    lens: Vec<usize>,
    /// vacancy densities, comma separated
    #[arg(long = "q", value_delimiter = ',')]
    qs: Vec<f64>,
    /// mesoscopic exponents in [0, 1], comma separated
    #[arg(long = "gamma", value_delimiter = ',')]
    gammas: Vec<f64>,
    /// length prefactors, comma separated
    #[arg(long = "d", value_delimiter = ',')]
    ds: Vec<f64>,
    /// JSON grid file; explicit flags override its fields
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per sampled row
    #[arg(long)]
    trials: Option<usize>,
}

impl GridArgs {
    fn resolve(&self) -> Result<Grid, Box<dyn Error>> {
        let mut grid = match &self.grid {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                serde_json::from_str::<Grid>(&text)
                    .map_err(|e| format!("bad grid file {}: {e}", path.display()))?
            }
            None => Grid::default(),
        };
        if !self.lens.is_empty() {
            grid.lens = self.lens.clone();
        }
        if !self.qs.is_empty() {
            grid.qs = self.qs.clone();
        }
        if !self.gammas.is_empty() {
            grid.gammas = self.gammas.clone();
        }
        if !self.ds.is_empty() {
            grid.ds = self.ds.clone();
        }
        if let Some(seed) = self.seed {
            grid.seed = seed;
        }
        if let Some(trials) = self.trials {
            grid.trials = trials;
        }
        grid.validate()?;
        Ok(grid)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutArgs {
    /// output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Box<dyn Error>> {
    match cli.cmd {
        Cmd::Scenario { name, grid, out } => {
            let kind = ScenarioKind::parse(&name).ok_or_else(|| {
                let names: Vec<&str> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown scenario '{name}'; one of: {}", names.join(", "))
            })?;
            let grid = grid.resolve()?;
            let report = Scenario::new(kind, grid).run()?;
            emit_reports(&[report], &out, false)
        }
        Cmd::Verify { suite, grid, out } => {
            let suite = Suite::parse(&suite).ok_or_else(|| {
                let mut names: Vec<&str> = Suite::MEMBERS.iter().map(|s| s.name()).collect();
                names.push("all");
                format!("unknown suite '{suite}'; one of: {}", names.join(", "))
            })?;
            let grid = grid.resolve()?;
            let reports = suite.run(&grid)?;
            emit_reports(&reports, &out, true)
        }
        Cmd::Exact { grid, out } => {
            let grid = grid.resolve()?;
            let mut rows = Vec::new();
            for &l in &grid.lens {
                for &q in &grid.qs {
                    if l > caps::MIXING {
                        eprintln!(
                            "skipping L={l} q={q}: the dense spectrum cap is {}",
                            caps::MIXING
                        );
                        continue;
                    }
                    rows.push(Engine::new(&Params::new(l, q)?)?.timescales()?);
                }
            }
            let table = match out.format {
                Format::Csv => {
                    let mut s = String::from(TimescaleReport::csv_header());
                    s.push('\n');
                    for row in &rows {
                        s.push_str(&row.csv_row());
                        s.push('\n');
                    }
                    s
                }
                Format::Json => serde_json::to_string_pretty(&rows)?,
            };
            write_table(&out.out, &table)?;
            Ok(true)
        }
        Cmd::Simulate {
            l,
            q,
            seed,
            horizon,
            start,
            thin,
            out,
        } => {
            if !(horizon > 0.0 && horizon.is_finite()) {
                return Err("--horizon must be positive and finite".into());
            }
            let params = Params::new(l, q)?;
            let start = match start {
                Some(s) => {
                    let cfg = Configuration::from_str_spins(&s)?;
                    if cfg.len() != l {
                        return Err(format!("--start has {} sites, --L is {l}", cfg.len()).into());
                    }
                    cfg
                }
                None => Configuration::single_right_vacancy(l),
            };
            let mut noise = NoiseField::sample(&params, horizon, seed);
            let traj = if thin {
                evolve_thinned(start, &mut noise, horizon)
            } else {
                evolve(start, &mut noise, horizon)
            };
            let mut buf = Vec::new();
            traj.export_tsv(&mut buf)?;
            write_table(&out, &String::from_utf8(buf)?)?;
            eprintln!(
                "initial {} final {} events {} horizon {}",
                traj.initial.display_verbose(),
                traj.final_state.display_verbose(),
                traj.events.len(),
                traj.horizon
            );
            Ok(true)
        }
        Cmd::Astar { config } => {
            let cfg = Configuration::from_str_spins(&config)?;
            let l = cfg.len();
            let member = in_astar(cfg);
            println!("config {}", cfg.display_verbose());
            println!("id {}", cfg.id());
            println!("L {l}");
            let vacancies: Vec<String> = cfg.vacancies().map(|x| x.to_string()).collect();
            println!(
                "vacancies {}",
                if vacancies.is_empty() {
                    "-".to_string()
                } else {
                    vacancies.join(",")
                }
            );
            println!("collapse fixpoint {}", det_passes(cfg).display_verbose());
            println!("member {member}");
            if member {
                let witnesses: Vec<usize> = (1..=l)
                    .filter(|&x| cfg.constraint(x) && !in_astar(cfg.flipped(x)))
                    .collect();
                println!("boundary {}", !witnesses.is_empty());
                for &z0 in &witnesses {
                    let chain = delta_chain(cfg, z0)?;
                    println!(
                        "witness {z0} sites {:?} distances {:?} intervals {:?}",
                        chain.sites, chain.distances, chain.intervals
                    );
                }
            }
            Ok(member)
        }
        Cmd::Flows { l, q, ell, out } => {
            let params = Params::new(l, q)?;
            let ell = ell.unwrap_or(l);
            let source = StateSet::singleton(1 << l, Configuration::all_ones(l).id());
            let sink = b_ell(l, ell)?;
            let flow = equilibrium_flow(&params, &source, &sink)?;
            let net = Network::build(&params)?;
            let energy = flow_energy(&net, &flow)?;
            let cap = capacity(&params, &source, &sink)?;
            write_table(&out, &flow.export())?;
            eprintln!("energy {energy:.12e}");
            eprintln!("capacity {:.12e} residual {:.3e}", cap.value, cap.residual);
            eprintln!("effective resistance {:.12e}", 1.0 / cap.value);
            Ok(true)
        }
    }
}

/// Table to `--out` or stdout; summaries (and the traceability rows of every
/// check the run graded, when asked) go to the other stream.
fn emit_reports(reports: &[Report], out: &OutArgs, trace: bool) -> Result<bool, Box<dyn Error>> {
    let table = match out.format {
        Format::Csv => {
            if reports.len() == 1 {
                reports[0].to_csv()
            } else {
                let mut s = String::new();
                for r in reports {
                    s.push_str(&format!("# suite: {}\n", r.scenario));
                    s.push_str(&r.to_csv());
                }
                s
            }
        }
        Format::Json => {
            if reports.len() == 1 {
                reports[0].to_json()
            } else {
                serde_json::to_string_pretty(reports)?
            }
        }
    };
    write_table(&out.out, &table)?;

    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut summary: Box<dyn Write> = if out.out.is_some() {
        Box::new(stdout.lock())
    } else {
        Box::new(stderr.lock())
    };
    if trace {
        let graded: BTreeSet<&str> = reports
            .iter()
            .flat_map(|r| r.verdicts.iter().map(|v| v.check.as_str()))
            .collect();
        writeln!(summary, "traceability:")?;
        for (label, statement) in traceability() {
            if graded.contains(label) {
                writeln!(summary, "  {label} :: {statement}")?;
            }
        }
    }
    for r in reports {
        writeln!(summary, "[{}]", r.scenario)?;
        for line in r.summary_lines() {
            writeln!(summary, "{line}")?;
        }
    }
    Ok(reports.iter().all(|r| r.hard_passed()))
}

fn write_table(out: &Option<PathBuf>, table: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, table),
        None => io::stdout().lock().write_all(table.as_bytes()),
    }
}
