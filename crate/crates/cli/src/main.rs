use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use linevoronoi::gainmap::AMap;
use linevoronoi::game::{canonical_response, payoff, realize_response, Strategy};
use linevoronoi::io::{verify_certificate, InstanceFile, ResultFile};
use linevoronoi::oracle::{oracle_gamma, random_instance};
use linevoronoi::{solve_game, Coord, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const CERTIFICATE_TRIALS: usize = 1000;

#[derive(Parser)]
#[command(
    name = "linevoronoi",
    version,
    about = "Exact leader strategies for the discrete Voronoi game on a line"
)]
struct Cli {
    /// Worker threads for independent threshold runs (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for randomized checks and fuzzing.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and write a self-checked result file.
    Solve {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Canonical follower response to a given leader strategy.
    BestResponse {
        input: PathBuf,
        /// Comma-separated leader coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        p: Vec<String>,
    },
    /// Export the gain map of an instance's voters.
    Gainmap {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Emit::Csv)]
        emit: Emit,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exhaustive search, for small integer instances only.
    Oracle { input: PathBuf },
    /// Compare the solver with the exhaustive search on random instances.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
        /// Where to write the first counterexample.
        #[arg(long, default_value = "fuzz-counterexample.json")]
        dump: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Csv,
    Svg,
}

/// A fuzz run found an instance where the solver and the oracle disagree.
#[derive(Debug)]
struct Counterexample(String);

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Counterexample {}

fn read_instance(path: &Path) -> anyhow::Result<InstanceFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(InstanceFile::parse(&text)?)
}

fn write_output(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match cli.command {
        Command::Solve { input, output } => {
            let game = read_instance(&input)?.to_instance()?;
            let sol = solve_game(&game)?;
            let result = ResultFile::from_solution(&game, &sol)?;
            verify_certificate(&game, &result, CERTIFICATE_TRIALS, cli.seed)?;
            write_output(output.as_deref(), &(result.to_json() + "\n"))
        }
        Command::BestResponse { input, p } => {
            let file = read_instance(&input)?;
            let game = file.to_instance()?;
            let points = p
                .iter()
                .map(|s| s.parse::<Coord>())
                .collect::<Result<Vec<_>, _>>()?;
            if points.is_empty() {
                bail!("--p needs at least one leader coordinate");
            }
            let leader = Strategy::leader(points);
            let (rep, winnings) = canonical_response(&game.voters, &leader, game.l);
            let q = realize_response(&game.voters, &leader, &rep)?;
            let kept = payoff(&game.voters, &leader, &q);
            let out = json!({
                "winnings": winnings,
                "leader_keeps": kept,
                "representation": rep.m,
                "q": q.points(),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(())
        }
        Command::Gainmap {
            input,
            emit,
            output,
        } => {
            let game = read_instance(&input)?.to_instance()?;
            let map = AMap::new(&game.voters)?;
            let text = match emit {
                Emit::Csv => map.to_csv(),
                Emit::Svg => map.to_svg(),
            };
            write_output(output.as_deref(), &text)
        }
        Command::Oracle { input } => {
            let game = read_instance(&input)?.to_instance()?;
            let (gamma, p) = oracle_gamma(&game.voters, game.k, game.l)?;
            let out = json!({ "gamma": gamma, "p_strategy": p.points() });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(())
        }
        Command::Fuzz {
            trials,
            max_n,
            max_k,
            dump,
        } => {
            let max_k = max_k.min(linevoronoi::oracle::MAX_ORACLE_POINTS);
            let max_n = max_n.min(linevoronoi::oracle::MAX_ORACLE_VOTERS);
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            for trial in 0..trials {
                let game = random_instance(&mut rng, max_n, max_k);
                let dp = solve_game(&game)?.gamma;
                let (oracle, _) = oracle_gamma(&game.voters, game.k, game.l)?;
                if dp != oracle {
                    let repro = InstanceFile::from_instance(&game).to_json();
                    fs::write(&dump, &repro)
                        .with_context(|| format!("writing {}", dump.display()))?;
                    return Err(Counterexample(format!(
                        "trial {trial}: solver gives {dp}, oracle gives {oracle}; instance written to {}\n{repro}",
                        dump.display()
                    ))
                    .into());
                }
            }
            println!("{trials} instances, solver and oracle agree");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Counterexample>().is_some() {
                ExitCode::from(3)
            } else if matches!(e.downcast_ref::<Error>(), Some(Error::OracleTooLarge(_))) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
