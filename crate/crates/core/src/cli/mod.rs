//! The `hp2` command line.

mod table;

pub use table::ExpectedTable;

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use crate::cw_topology::{classify, describe_summand, skeleton_of_pinch_fibre, smash_square_split, GradedModP};
use crate::extensions::{brute_force_oracle, classify_extensions, solve_with_constraints, Constraint, ExtensionProblem};
use crate::factdb::{validate_db, FactDb, Resolver};
use crate::local_algebra::{int_valuation, FgModule, TableCell};
use crate::sequence_engine::{derive_pi, Derivation, EngineError, Outcome};

/// Process exit status. When several apply the first in this order wins:
/// mismatch, missing fact, ambiguity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Ok = 0,
    Ambiguous = 3,
    Missing = 2,
    Mismatch = 1,
}

impl Exit {
    fn rank(self) -> u8 {
        match self {
            Exit::Ok => 0,
            Exit::Ambiguous => 1,
            Exit::Missing => 2,
            Exit::Mismatch => 3,
        }
    }

    pub fn worst(self, other: Exit) -> Exit {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }

    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(name = "hp2", version, about = "2- and 3-local homotopy groups of suspended HP^2")]
pub struct Cli {
    /// Directory of fact files to use instead of the shipped database.
    #[arg(long, global = true)]
    pub db: Option<PathBuf>,
    /// Also load the extended fact files.
    #[arg(long, global = true)]
    pub extended: bool,
    /// Write derivation traces and a run summary here.
    #[arg(long, global = true)]
    pub trace_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Space {
    #[value(name = "HP2", alias = "hp2")]
    Hp2,
    #[value(name = "HP3", alias = "hp3")]
    Hp3,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Determine π_{r+k}(Σ^k HP^2) at one prime.
    Derive {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        r: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        /// Every displayed column (of row r, or of the whole table).
        #[arg(long)]
        all: bool,
    },
    /// Derive every table cell at both primes.
    Table {
        /// Compare with the published table.
        #[arg(long)]
        compare: bool,
    },
    /// Middle terms of 0 → left → B → right → 0.
    Ext {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// B must have an element of at least this order.
        #[arg(long)]
        order_at_least: Option<u64>,
        /// Cross-check against exhaustive enumeration.
        #[arg(long)]
        oracle: bool,
    },
    /// Split H̃(ΣX∧X) for X = HP^2 or HP^3.
    Smash {
        #[arg(long, value_enum)]
        space: Space,
        #[arg(long, default_value_t = 3)]
        prime: u64,
    },
    /// Homotopy types of three-cell complexes with cells in 4+k, 8+k, 12+k.
    Classify {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 3)]
        prime: u64,
    },
    /// The two-cell skeleton of the pinch-map fibre.
    Skeleton {
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        k: u32,
    },
    /// Fact database maintenance.
    Db {
        #[command(subcommand)]
        action: DbAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum DbAction {
    /// Check orders, names, degrees and references.
    Validate,
}

pub fn load_db(cli: &Cli) -> anyhow::Result<FactDb> {
    Ok(match &cli.db {
        Some(dir) => FactDb::load_dir(dir, cli.extended).with_context(|| format!("loading {}", dir.display()))?,
        None if cli.extended => FactDb::builtin_extended(),
        None => FactDb::builtin(),
    })
}

/// One goal's result compared with the table.
#[derive(Clone, Debug)]
pub struct GoalReport {
    pub prime: u64,
    pub r: u32,
    pub k: u32,
    pub status: Exit,
    pub result: String,
    pub expected: Option<String>,
    pub derivation: Option<Derivation>,
}

impl GoalReport {
    fn status_word(&self) -> &'static str {
        match (self.status, &self.expected) {
            (Exit::Ok, None) => "computed",
            (Exit::Ok, Some(_)) => "match",
            (Exit::Mismatch, _) => "mismatch",
            (Exit::Missing, _) => "missing-fact",
            (Exit::Ambiguous, _) => "ambiguous",
        }
    }

    pub fn line(&self) -> String {
        format!(
            "p={} r={} k={} | {} | {} | expected {}",
            self.prime,
            self.r,
            self.k,
            self.status_word(),
            self.result,
            self.expected.as_deref().unwrap_or("-")
        )
    }
}

fn is_missing(e: &EngineError) -> bool {
    e.is_missing()
        || matches!(e, EngineError::Underdetermined(_) | EngineError::Partial(_) | EngineError::OutOfRange(_))
}

pub fn run_goal(db: &FactDb, table: &ExpectedTable, prime: u64, r: u32, k: u32) -> GoalReport {
    let expected = table.component(prime, r, k);
    let mut report = GoalReport {
        prime,
        r,
        k,
        status: Exit::Ok,
        result: String::new(),
        expected: expected.as_ref().map(|m| m.render()),
        derivation: None,
    };
    match derive_pi(db, prime, r, k) {
        Ok(d) => {
            report.result = d.outcome.to_string();
            report.status = match (&d.outcome, &expected) {
                (Outcome::Ambiguous(_), _) => Exit::Ambiguous,
                (Outcome::Unique(m), Some(e)) if m != e => Exit::Mismatch,
                _ => Exit::Ok,
            };
            report.derivation = Some(d);
        }
        Err(e) => {
            report.result = format!("error: {e}");
            report.status = if is_missing(&e) { Exit::Missing } else { Exit::Mismatch };
        }
    }
    report
}

fn write_traces(dir: &Path, reports: &[GoalReport], db: &FactDb) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut summary = format!("db | {}\n", db.version());
    for rep in reports {
        if let Some(d) = &rep.derivation {
            let path = dir.join(format!("p{}-r{}-k{}.trace", rep.prime, rep.r, rep.k));
            fs::write(&path, d.render_trace()).with_context(|| format!("writing {}", path.display()))?;
        }
        summary.push_str(&rep.line());
        summary.push('\n');
    }
    fs::write(dir.join("run.txt"), summary)?;
    Ok(())
}

fn table_goals(table: &ExpectedTable, r: Option<u32>) -> Vec<(u32, u32)> {
    let rows = match r {
        Some(r) => vec![r],
        None => table.rows(),
    };
    rows.into_iter().flat_map(|r| table.columns(r).into_iter().map(move |k| (r, k))).collect()
}

/// Run the parsed command, writing the report to `out`. Returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<Exit> {
    let db = load_db(cli)?;
    let table = ExpectedTable::builtin();
    match &cli.command {
        Command::Derive { prime, r, k, all } => {
            let goals: Vec<(u32, u32)> = match (r, k, all) {
                (Some(r), Some(k), false) => vec![(*r, *k)],
                (r, None, true) => table_goals(&table, *r),
                _ => bail!("give --r and --k, or --all (optionally with --r)"),
            };
            let reports: Vec<GoalReport> = goals.iter().map(|&(r, k)| run_goal(&db, &table, *prime, r, k)).collect();
            let mut exit = Exit::Ok;
            for rep in &reports {
                writeln!(out, "{}", rep.line())?;
                if goals.len() == 1 {
                    if let Some(d) = &rep.derivation {
                        write!(out, "{}", d.render_trace())?;
                    }
                }
                exit = exit.worst(rep.status);
            }
            if let Some(dir) = &cli.trace_dir {
                write_traces(dir, &reports, &db)?;
            }
            Ok(exit)
        }
        Command::Table { compare } => {
            let mut exit = Exit::Ok;
            let mut reports = Vec::new();
            for r in table.rows() {
                let mut row = Vec::new();
                for k in table.columns(r) {
                    let two = run_goal(&db, &table, 2, r, k);
                    let three = run_goal(&db, &table, 3, r, k);
                    let cell = match (&two.derivation, &three.derivation) {
                        (Some(a), Some(b)) => match (a.unique(), b.unique()) {
                            (Some(x), Some(y)) => TableCell { two: x.clone(), three: y.clone() }.render(),
                            _ => "?".to_string(),
                        },
                        _ => "!".to_string(),
                    };
                    let expected = table.get(r, k).map(|c| c.render()).unwrap_or_default();
                    if *compare {
                        let s = two.status.worst(three.status);
                        exit = exit.worst(s);
                        if s != Exit::Ok {
                            row.push(format!("{cell} (expected {expected})"));
                        } else {
                            row.push(cell);
                        }
                    } else {
                        row.push(cell);
                    }
                    reports.push(two);
                    reports.push(three);
                }
                writeln!(out, "r={r:2} | {}", row.join(" | "))?;
            }
            if *compare {
                let diffs: Vec<&GoalReport> = reports.iter().filter(|r| r.status != Exit::Ok).collect();
                writeln!(out, "{} goals, {} differ", reports.len(), diffs.len())?;
                for d in diffs {
                    writeln!(out, "  {}", d.line())?;
                }
            }
            if let Some(dir) = &cli.trace_dir {
                write_traces(dir, &reports, &db)?;
            }
            Ok(exit)
        }
        Command::Ext { p, left, right, order_at_least, oracle } => {
            let a = FgModule::parse(left, *p)?;
            let c = FgModule::parse(right, *p)?;
            let problem = ExtensionProblem::new(a, c)?;
            let mut constraints = Vec::new();
            if let Some(n) = order_at_least {
                let e = int_valuation(&(*n).into(), *p);
                if p.checked_pow(e) != Some(*n) {
                    bail!("--order-at-least {n} is not a power of {p}");
                }
                constraints.push(Constraint::OrderAtLeast(e));
            }
            let set = if constraints.is_empty() {
                classify_extensions(&problem)?
            } else {
                solve_with_constraints(&problem, &constraints)?
            };
            for m in set.modules() {
                writeln!(out, "{}", m.render())?;
            }
            if *oracle {
                let brute = brute_force_oracle(&problem)?;
                let kept: Vec<FgModule> = brute
                    .modules()
                    .into_iter()
                    .filter(|m| constraints.iter().all(|c| !c.is_structural() || structural_holds(c, m)))
                    .collect();
                let agree = kept == set.modules();
                writeln!(out, "oracle: {} ({} candidates)", if agree { "agrees" } else { "DISAGREES" }, kept.len())?;
                if !agree {
                    return Ok(Exit::Mismatch);
                }
            }
            Ok(Exit::Ok)
        }
        Command::Smash { space, prime } => {
            let n = match space {
                Space::Hp2 => 2,
                Space::Hp3 => 3,
            };
            let h = GradedModP::quaternionic(n, *prime)?;
            let sq = smash_square_split(&h)?;
            for (name, part) in [("plus", &sq.plus), ("minus", &sq.minus)] {
                writeln!(out, "{name}: {}", describe_summand(part))?;
                writeln!(out, "  {part}")?;
                for line in part.render_p1() {
                    writeln!(out, "  {line}")?;
                }
            }
            Ok(Exit::Ok)
        }
        Command::Classify { k, prime } => {
            let c = classify(&db, *k, *prime)?;
            write!(out, "{c}")?;
            Ok(Exit::Ok)
        }
        Command::Skeleton { prime, k } => {
            let resolver = Resolver::new(&db, *prime);
            let sk = skeleton_of_pinch_fibre(&resolver, *k)?;
            let mut line = format!("k={k} p={prime}: sk_{}(F_{k}) = {}", sk.through_dim, sk.complex);
            if sk.is_wedge() {
                let _ = write!(line, " (attaching class {} vanishes)", sk.reduced.render());
            }
            writeln!(out, "{line}")?;
            Ok(Exit::Ok)
        }
        Command::Db { action: DbAction::Validate } => {
            let violations = validate_db(&db);
            writeln!(out, "db {}: {} files, {} violations", db.version(), db.files().len(), violations.len())?;
            for v in &violations {
                writeln!(out, "  {:?} {}: {}", v.kind, v.location, v.message)?;
            }
            Ok(if violations.is_empty() { Exit::Ok } else { Exit::Mismatch })
        }
    }
}

fn structural_holds(c: &Constraint, m: &FgModule) -> bool {
    match c {
        Constraint::OrderAtLeast(n) => m.exponent() >= *n,
        Constraint::OrderExactly(n) => *n == 0 || m.exponent() >= *n,
        Constraint::NoElementOfOrder(n) => m.exponent() < *n,
        Constraint::ContainsSubgroup(s) => m.contains_copy_of(s),
        _ => true,
    }
}
