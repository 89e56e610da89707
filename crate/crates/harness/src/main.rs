use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use deltabound_harness::{
    run_converge, run_fuzz, run_verify, AxisSpec, ConvergeTask, Family, FuzzConfig, HarnessError,
    Scenario, Task, Tolerances,
};

#[derive(Parser)]
#[command(
    name = "deltabound",
    version,
    about = "Check Gronwall-type estimates on finite time scales"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file and print the per-point table and summary.
    Verify {
        config: PathBuf,
        /// Write the CSV table here instead of standard output.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Search random grids and data for bound violations.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Scale family to draw from (integer, uniform, geometric, random); repeatable.
        #[arg(long = "family")]
        families: Vec<Family>,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Refine uniform grids of the unit square and report observed order.
    Converge {
        /// `constant` (bound with p = coefficient, k = 1) or `solve` (u = 1 + int int int u).
        #[arg(long)]
        task: String,
        /// Intervals per axis, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
        #[arg(long, default_value_t = 0.5)]
        coefficient: f64,
    },
    /// Run a few built-in scenarios.
    Demo,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<bool, HarnessError> {
    match command {
        Command::Verify { config, csv } => {
            let text = std::fs::read_to_string(&config)?;
            let scenario = Scenario::from_json(&text)?;
            let report = run_verify(&scenario)?;
            match csv {
                Some(path) => std::fs::write(path, report.csv())?,
                None => print!("{}", report.csv()),
            }
            println!("{report}");
            Ok(report.is_clean())
        }
        Command::Fuzz {
            trials,
            seed,
            families,
            tolerance,
        } => {
            let mut config = FuzzConfig::new(trials, seed);
            if !families.is_empty() {
                config.families = families;
            }
            config.tolerance = tolerance;
            let summary = run_fuzz(&config)?;
            println!("{summary}");
            Ok(summary.violations() == 0 && summary.refused() == 0)
        }
        Command::Converge {
            task,
            levels,
            coefficient,
        } => {
            let table = run_converge(ConvergeTask::parse(&task, coefficient)?, &levels)?;
            print!("{}", table.csv());
            println!("{table}");
            Ok(true)
        }
        Command::Demo => demo(),
    }
}

fn demo_scenarios() -> Vec<(&'static str, Scenario)> {
    let ints = AxisSpec::Integers { lo: 0, hi: 4 };
    let unit = AxisSpec::Uniform {
        lo: 0.0,
        hi: 1.0,
        n: 17,
    };
    let quantum = AxisSpec::Geometric {
        base: 1.25,
        first: 0.5,
        n: 8,
    };
    let make = |axis1: &AxisSpec, axis2: &AxisSpec, task, f: &[(&str, &str)]| Scenario {
        axis1: axis1.clone(),
        axis2: axis2.clone(),
        functions: f
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect::<BTreeMap<_, _>>(),
        task,
        tolerances: Tolerances::default(),
        seed: 1,
    };
    vec![
        (
            "integers, p = 1, k = 1 (attained at (2, 2))",
            make(&ints, &ints, Task::Constant, &[("p", "1"), ("k", "1")]),
        ),
        (
            "unit square, monotone free term",
            make(
                &unit,
                &unit,
                Task::Monotone,
                &[("p", "x + y"), ("q", "1 + x * y")],
            ),
        ),
        (
            "geometric x integers, saturating nonlinearity",
            make(
                &quantum,
                &ints,
                Task::Nonlinear,
                &[
                    ("g", "1"),
                    ("h", "0.5"),
                    ("L", "u / (1 + u)"),
                    ("H", "1 / (1 + v)^2"),
                ],
            ),
        ),
        (
            "unit square, linear",
            make(
                &unit,
                &unit,
                Task::Linear,
                &[("g", "exp(-x)"), ("h", "1 + y"), ("p", "x")],
            ),
        ),
        (
            "integers, bounded kernel",
            make(
                &ints,
                &ints,
                Task::APriori,
                &[
                    ("g", "1"),
                    ("K", "0.1 * u + 0.05 * s"),
                    ("q", "0.1"),
                    ("r", "1"),
                ],
            ),
        ),
        (
            "unit square, two nearby solutions",
            make(
                &unit,
                &unit,
                Task::Difference,
                &[
                    ("g", "1"),
                    ("K", "s * t * u"),
                    ("q", "1"),
                    ("r", "x * y"),
                    ("delta", "0.01"),
                ],
            ),
        ),
    ]
}

fn demo() -> Result<bool, HarnessError> {
    let mut clean = true;
    for (title, scenario) in demo_scenarios() {
        let report = run_verify(&scenario)?;
        println!("# {title}");
        println!("{report}");
        clean &= report.is_clean();
    }
    let table = run_converge(
        ConvergeTask::Constant { coefficient: 0.5 },
        &[16, 32, 64, 128],
    )?;
    println!("# refinement of the constant bound towards exp(0.25)");
    println!("{table}");
    let summary = run_fuzz(&FuzzConfig::new(50, 0))?;
    println!("# random trials");
    println!("{summary}");
    Ok(clean && summary.violations() == 0)
}
