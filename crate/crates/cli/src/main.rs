//! `quadwaring`: runs the verification suites and writes JSON reports.
//!
//! Exit status: 0 when every assertion holds, 1 when a mathematical
//! assertion fails, 2 on usage or input errors.

mod commands;
mod manifest;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use serde_json::Value;

use quadwaring_core::calibration::Calibration;
use quadwaring_core::Rational;

use commands::{ModeArg, Outcome, PropKind, DEFAULT_SEED};
use manifest::{Report, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "quadwaring", version, about = "Verification suites for density theorems on sums of squares")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve every canonical LP for (s, n) exactly and check optima against d_s.
    VerifyBaseCases {
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded property suites with exhaustive witness search.
    PropTest {
        #[arg(value_enum)]
        kind: PropKind,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        s: Option<u32>,
        #[arg(long)]
        n: Option<usize>,
        /// Modulus for `local` and `thm82`.
        #[arg(long)]
        w: Option<u64>,
        /// Threshold for `lemma72`, e.g. `1/2`.
        #[arg(long)]
        d: Option<Rational>,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gauss-sum closed forms and calibrated bounds.
    Gauss {
        #[arg(long)]
        p_max: Option<u64>,
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Additive energy, T-counts and the restriction ratio.
    Energy {
        #[arg(long)]
        max_product: Option<u64>,
        /// CSV table with columns p, n, S, energy, ratio.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sumset inequalities on random instances, or one explicit sumset.
    Sumset {
        #[arg(long)]
        modulus: Option<u64>,
        /// Comma-separated residues; repeat for each summand set.
        #[arg(long = "set")]
        sets: Vec<String>,
        #[arg(long)]
        instances: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense set of quadratic residues whose s-fold sumset misses a residue.
    Counterexample {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 5)]
        s: u32,
        #[arg(long, default_value_t = 0.15)]
        tau: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Prime-square majorant normalisation and the Chebyshev sum.
    Majorant {
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also report W-trick parameters for this target.
        #[arg(long)]
        y: Option<u64>,
        #[arg(long, default_value_t = 5)]
        s: u32,
        #[arg(long)]
        w_override: Option<f64>,
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact LP operations.
    Lp {
        #[command(subcommand)]
        action: LpAction,
    },
    /// Every suite in sequence.
    All {
        #[arg(long)]
        quick: bool,
        /// Write one report per suite into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Re-run the calibration sweeps and print (or write) a calibration file.
    Calibrate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum LpAction {
    /// Solve an LP from JSON and verify its certificate.
    Solve {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_sets(raw: &[String]) -> anyhow::Result<Vec<Vec<u64>>> {
    // Each `--set` value is one summand; `;` inside a value also separates summands.
    raw.iter()
        .flat_map(|v| v.split(';'))
        .map(|group| {
            group
                .split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| x.trim().parse::<u64>().with_context(|| format!("bad residue {x:?}")))
                .collect()
        })
        .filter(|v: &anyhow::Result<Vec<u64>>| v.as_ref().map_or(true, |v| !v.is_empty()))
        .collect()
}

fn write_json(path: Option<&Path>, value: &impl serde::Serialize) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn finish(mut manifest: RunManifest, outcome: Outcome, out: Option<&Path>) -> anyhow::Result<bool> {
    manifest.finish();
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    eprintln!("{}: {}", manifest.subcommand, if outcome.passed { "PASS" } else { "FAIL" });
    let passed = outcome.passed;
    write_json(out, &Report { manifest, passed, body: outcome.body })?;
    Ok(passed)
}

fn run_all(cal: &Calibration, quick: bool, out_dir: Option<&Path>) -> anyhow::Result<bool> {
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let digest = cal.digest();
    let trials = if quick { 50 } else { 500 };
    type Job<'a> = Box<dyn Fn(&mut RunManifest) -> anyhow::Result<Outcome> + 'a>;
    let prop = |kind: PropKind, trials: u64| -> Job {
        Box::new(move |m: &mut RunManifest| {
            commands::prop_test(
                m,
                &commands::PropArgs {
                    kind,
                    trials,
                    seed: DEFAULT_SEED,
                    s: None,
                    n: None,
                    w: None,
                    d: None,
                    mode: ModeArg::Both,
                    quick,
                },
            )
        })
    };
    let local_trials = if quick { 20 } else { 100 };
    let jobs: Vec<(&str, Job)> = vec![
        ("verify-base-cases", Box::new(|m: &mut RunManifest| commands::verify_base_cases(m, None, None, quick))),
        ("prop-test-lemma71", prop(PropKind::Lemma71, trials)),
        ("prop-test-lemma72", prop(PropKind::Lemma72, trials)),
        ("prop-test-local", prop(PropKind::Local, local_trials)),
        ("prop-test-thm82", prop(PropKind::Thm82, local_trials)),
        ("gauss", Box::new(|m: &mut RunManifest| commands::gauss(m, cal, None, quick))),
        ("energy", Box::new(|m: &mut RunManifest| commands::energy(m, cal, None, None, quick))),
        (
            "sumset",
            Box::new(|m: &mut RunManifest| {
                commands::sumset(
                    m,
                    &commands::SumsetArgs { modulus: None, sets: Vec::new(), instances: None, seed: DEFAULT_SEED, quick },
                )
            }),
        ),
        ("counterexample", Box::new(|m: &mut RunManifest| commands::counterexample(m, 10_007, 5, 0.15))),
        (
            "majorant",
            Box::new(|m: &mut RunManifest| {
                commands::majorant(
                    m,
                    cal,
                    &commands::MajorantArgs { csv: None, y: None, s: 5, w_override: None, quick },
                )
            }),
        ),
    ];
    let mut all_passed = true;
    let mut index = BTreeMap::new();
    for (name, job) in jobs {
        let mut m = RunManifest::new(name, digest.clone());
        let outcome = job(&mut m)?;
        let path = out_dir.map(|d| d.join(format!("{name}.json")));
        eprintln!("== {name}");
        let passed = match &path {
            Some(p) => finish(m, outcome, Some(p))?,
            None => {
                m.finish();
                for line in &outcome.summary {
                    eprintln!("{line}");
                }
                eprintln!("{name}: {}", if outcome.passed { "PASS" } else { "FAIL" });
                outcome.passed
            }
        };
        index.insert(name.to_string(), Value::Bool(passed));
        all_passed &= passed;
    }
    if let Some(dir) = out_dir {
        write_json(Some(&dir.join("summary.json")), &index)?;
    }
    Ok(all_passed)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let cal = Calibration::load()?;
    let digest = cal.digest();
    let m = |name: &str| RunManifest::new(name, digest.clone());
    match cli.command {
        Command::VerifyBaseCases { s, n, quick, out } => {
            let mut man = m("verify-base-cases");
            let o = commands::verify_base_cases(&mut man, s, n, quick)?;
            finish(man, o, out.as_deref())
        }
        Command::PropTest { kind, trials, seed, s, n, w, d, mode, quick, out } => {
            let mut man = m("prop-test");
            let trials = trials.unwrap_or(match (kind, quick) {
                (PropKind::Local | PropKind::Thm82, true) => 20,
                (PropKind::Local | PropKind::Thm82, false) => 100,
                (_, true) => 50,
                (_, false) => 500,
            });
            let args = commands::PropArgs { kind, trials, seed, s, n, w, d, mode, quick };
            let o = commands::prop_test(&mut man, &args)?;
            finish(man, o, out.as_deref())
        }
        Command::Gauss { p_max, quick, out } => {
            let mut man = m("gauss");
            let o = commands::gauss(&mut man, &cal, p_max, quick)?;
            finish(man, o, out.as_deref())
        }
        Command::Energy { max_product, csv, quick, out } => {
            let mut man = m("energy");
            let o = commands::energy(&mut man, &cal, max_product, csv.as_deref(), quick)?;
            finish(man, o, out.as_deref())
        }
        Command::Sumset { modulus, sets, instances, seed, quick, out } => {
            let mut man = m("sumset");
            let args = commands::SumsetArgs { modulus, sets: parse_sets(&sets)?, instances, seed, quick };
            let o = commands::sumset(&mut man, &args)?;
            finish(man, o, out.as_deref())
        }
        Command::Counterexample { p, s, tau, out } => {
            let mut man = m("counterexample");
            let o = commands::counterexample(&mut man, p, s, tau)?;
            finish(man, o, out.as_deref())
        }
        Command::Majorant { csv, y, s, w_override, quick, out } => {
            let mut man = m("majorant");
            let args = commands::MajorantArgs { csv, y, s, w_override, quick };
            let o = commands::majorant(&mut man, &cal, &args)?;
            finish(man, o, out.as_deref())
        }
        Command::Lp { action: LpAction::Solve { file, out } } => {
            let mut man = m("lp solve");
            let o = commands::lp_solve(&mut man, &file)?;
            finish(man, o, out.as_deref())
        }
        Command::All { quick, out_dir } => run_all(&cal, quick, out_dir.as_deref()),
        Command::Calibrate { out } => {
            let mut man = m("calibrate");
            let (fresh, sweep) = commands::calibrate(&mut man)?;
            eprintln!("{}", serde_json::to_string(&sweep)?);
            match out {
                Some(p) => std::fs::write(&p, fresh.to_json() + "\n").with_context(|| format!("writing {}", p.display()))?,
                None => println!("{}", fresh.to_json()),
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if commands::is_usage_error(&e) { 2 } else { 1 })
        }
    }
}
