//! Command-line front end: loads `.ssm` documents, dispatches tasks, and
//! emits deterministic human- or machine-readable reports.
//!
//! Exit codes: 0 all checked relations hold, 1 at least one fails,
//! 2 input error, 3 internal error.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num::{BigRational, Zero};
use sha2::{Digest, Sha256};

use crate::atlas::AtlasError;
use crate::format::{self, Document, TaskSpec};
use crate::grassmann::GrassmannElement;
use crate::report::RelationReport;
use crate::solver::solve_linear;
use crate::supermap::{orientation_class, OrientationClass, SuperMap};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "semimf", version, about = "Verification engine for semi-supermanifold gluing data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check gluing, tower and identity laws of the atlas in FILE.
    Check {
        file: PathBuf,
        /// Largest cycle length / tower degree to check.
        #[arg(long = "n-max")]
        n_max: Option<u32>,
        /// Also check the reflexive (reversed-cycle) relations.
        #[arg(long)]
        reflexive: bool,
        /// Line-oriented key=value output.
        #[arg(long)]
        machine: bool,
    },
    /// Run the `solve` tasks of FILE (division in the Grassmann algebra).
    Solve {
        file: PathBuf,
        #[arg(long)]
        machine: bool,
    },
    /// Berezinian of a named map at a point.
    Berezinian {
        file: PathBuf,
        /// Map name; defaults to the file's `berezinian` task.
        #[arg(long)]
        map: Option<String>,
        /// Comma-separated rational even coordinates, e.g. `1,3/2`.
        #[arg(long)]
        at: Option<String>,
        #[arg(long)]
        machine: bool,
    },
    /// Tower semigroup of a chart.
    Semigroup {
        file: PathBuf,
        /// Chart name; defaults to the file's `semigroup` task charts.
        #[arg(long)]
        chart: Option<String>,
        #[arg(long = "n-max")]
        n_max: Option<u32>,
        #[arg(long)]
        machine: bool,
    },
    /// Run the `homotopy` tasks of FILE.
    Homotopy {
        file: PathBuf,
        #[arg(long)]
        machine: bool,
    },
}

struct Out {
    machine: bool,
    stdout: String,
}

impl Out {
    fn new(machine: bool) -> Self {
        Out {
            machine,
            stdout: String::new(),
        }
    }

    fn header(&mut self, digest: &str) {
        if self.machine {
            let _ = writeln!(self.stdout, "tool=semimf version={}", VERSION);
            let _ = writeln!(self.stdout, "input=sha256:{}", digest);
        } else {
            let _ = writeln!(self.stdout, "semimf {}", VERSION);
            let _ = writeln!(self.stdout, "input: sha256:{}", digest);
        }
    }

    fn section(&mut self, name: &str) {
        if !self.machine {
            let _ = writeln!(self.stdout, "== {} ==", name);
        }
    }

    fn report(&mut self, r: &RelationReport) {
        if self.machine {
            let _ = writeln!(self.stdout, "{}", r.machine_line());
        } else {
            let _ = writeln!(self.stdout, "{}", r);
        }
    }

    fn scalar(&mut self, key: &str, human_label: &str, value: impl std::fmt::Display) {
        if self.machine {
            let _ = writeln!(self.stdout, "{}={}", key, value);
        } else {
            let _ = writeln!(self.stdout, "{}: {}", human_label, value);
        }
    }

    fn summary(&mut self, reports: &[&RelationReport]) {
        let hold = reports.iter().filter(|r| r.verdict.is_hold()).count();
        let fail = reports.iter().filter(|r| r.verdict.is_fail()).count();
        let skip = reports.iter().filter(|r| r.verdict.is_skip()).count();
        if self.machine {
            let _ = writeln!(self.stdout, "summary hold={} fail={} skip={}", hold, fail, skip);
        } else {
            let _ = writeln!(self.stdout, "summary: hold={} fail={} skip={}", hold, fail, skip);
        }
    }
}

fn verdict_code(reports: &[&RelationReport]) -> i32 {
    if reports.iter().any(|r| r.verdict.is_fail()) {
        1
    } else {
        0
    }
}

/// Runs the CLI on explicit arguments (`argv[0]` is the program name) and
/// returns `(exit_code, stdout, stderr)`.
pub fn run(argv: &[String]) -> (i32, String, String) {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests exit 0 and print to stdout.
            return if e.use_stderr() {
                (2, String::new(), e.to_string())
            } else {
                (0, e.to_string(), String::new())
            };
        }
    };
    match dispatch(cli) {
        Ok((code, stdout)) => (code, stdout, String::new()),
        Err((code, message)) => (code, String::new(), format!("error: {}\n", message)),
    }
}

type Failure = (i32, String);

fn load(file: &PathBuf) -> Result<(Document, String), Failure> {
    let bytes = std::fs::read(file)
        .map_err(|e| (2, format!("cannot read {}: {}", file.display(), e)))?;
    let digest = hex(&Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| (2, "input is not UTF-8".to_string()))?;
    let doc = format::parse(&text).map_err(|e| (2, e.to_string()))?;
    Ok((doc, digest))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{:02x}", b)).collect()
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    (2, e.to_string())
}

fn dispatch(cli: Cli) -> Result<(i32, String), Failure> {
    match cli.command {
        Command::Check {
            file,
            n_max,
            reflexive,
            machine,
        } => {
            let (doc, digest) = load(&file)?;
            let n_max = n_max
                .or_else(|| {
                    doc.tasks.iter().find_map(|t| match t {
                        TaskSpec::Check { n_max } => Some(n_max.unwrap_or(3)),
                        _ => None,
                    })
                })
                .unwrap_or(3);
            let atlas = doc.to_atlas().map_err(input_err)?;
            let mut out = Out::new(machine);
            out.header(&digest);
            out.section("check");
            let mut reports = atlas.check_gluing();
            reports.extend(atlas.check_tower_relations(n_max));
            if reflexive {
                reports.extend(atlas.check_reflexivity(n_max));
            }
            reports.extend(atlas.check_tower_identity_laws(n_max));
            for r in &reports {
                out.report(r);
            }
            out.scalar(
                "obstructedness",
                "obstructedness degree",
                atlas.obstructedness_degree(n_max),
            );
            let nice = atlas.is_nice(n_max);
            out.scalar("nice", "nice", nice.nice);
            let refs: Vec<&RelationReport> = reports.iter().collect();
            out.summary(&refs);
            Ok((verdict_code(&refs), out.stdout))
        }
        Command::Solve { file, machine } => {
            let (doc, digest) = load(&file)?;
            let tasks: Vec<(&GrassmannElement, &GrassmannElement)> = doc
                .tasks
                .iter()
                .filter_map(|t| match t {
                    TaskSpec::Solve { lhs, rhs } => Some((lhs, rhs)),
                    _ => None,
                })
                .collect();
            if tasks.is_empty() {
                return Err((2, "no solve tasks in document".to_string()));
            }
            let mut out = Out::new(machine);
            out.header(&digest);
            out.section("solve");
            let mut code = 0;
            for (lhs, rhs) in tasks {
                let sol = solve_linear(lhs, rhs).map_err(|e| (3, e.to_string()))?;
                if machine {
                    match &sol {
                        Some(s) => {
                            let _ = writeln!(
                                out.stdout,
                                "task=solve verdict=solution particular={} kernel_size={}",
                                s.particular,
                                s.kernel_basis.len()
                            );
                        }
                        None => {
                            let _ = writeln!(out.stdout, "task=solve verdict=nosolution");
                        }
                    }
                } else {
                    let _ = writeln!(out.stdout, "solve {} * X = {}", lhs, rhs);
                    match &sol {
                        Some(s) => {
                            let _ = writeln!(out.stdout, "  particular: {}", s.particular);
                            let _ = writeln!(
                                out.stdout,
                                "  kernel basis ({}):",
                                s.kernel_basis.len()
                            );
                            for k in &s.kernel_basis {
                                let _ = writeln!(out.stdout, "    {}", k);
                            }
                        }
                        None => {
                            let _ = writeln!(out.stdout, "  no solution");
                        }
                    }
                }
                if sol.is_none() {
                    code = 1;
                }
            }
            Ok((code, out.stdout))
        }
        Command::Berezinian {
            file,
            map,
            at,
            machine,
        } => {
            let (doc, digest) = load(&file)?;
            let name = map
                .or_else(|| {
                    doc.tasks.iter().find_map(|t| match t {
                        TaskSpec::Berezinian { map } => Some(map.clone()),
                        _ => None,
                    })
                })
                .ok_or((2, "no map named (use --map or a berezinian task)".to_string()))?;
            let decl = doc
                .map_decl(&name)
                .ok_or((2, format!("unknown map `{}`", name)))?;
            let m = squared_up(&decl.map).map_err(input_err)?;
            let point = match at {
                Some(list) => parse_point(&list)?,
                None => vec![BigRational::zero(); m.source().n_even as usize],
            };
            let ber = m.berezinian(&point).map_err(input_err)?;
            let mut out = Out::new(machine);
            out.header(&digest);
            out.section("berezinian");
            out.scalar("map", "map", &name);
            out.scalar("value", "value", &ber.value);
            out.scalar("schur_det", "schur factor", &ber.schur_det);
            out.scalar("odd_det", "odd block det", &ber.odd_det);
            let orient = match orientation_class(&ber) {
                OrientationClass::SignPair(a, b) => format!("pair({},{})", a, b),
                OrientationClass::Nilpotent(k) => format!("nilpotent({})", k),
                OrientationClass::ZeroBerezinian => "zero".to_string(),
            };
            out.scalar("orientation", "orientation class", orient);
            Ok((0, out.stdout))
        }
        Command::Semigroup {
            file,
            chart,
            n_max,
            machine,
        } => {
            let (doc, digest) = load(&file)?;
            let task = doc.tasks.iter().find_map(|t| match t {
                TaskSpec::Semigroup {
                    chart_a,
                    chart_b,
                    n_max,
                } => Some((chart_a.clone(), chart_b.clone(), *n_max)),
                _ => None,
            });
            let charts: Vec<String> = match (&chart, &task) {
                (Some(c), _) => vec![c.clone()],
                (None, Some((a, b, _))) => {
                    if a == b {
                        vec![a.clone()]
                    } else {
                        vec![a.clone(), b.clone()]
                    }
                }
                (None, None) => {
                    return Err((2, "no chart named (use --chart or a semigroup task)".to_string()))
                }
            };
            let n_max = n_max
                .or(task.map(|(_, _, k)| k))
                .ok_or((2, "no n_max given (use --n-max or a semigroup task)".to_string()))?;
            let atlas = doc.to_atlas().map_err(input_err)?;
            let mut out = Out::new(machine);
            out.header(&digest);
            let mut reports: Vec<RelationReport> = Vec::new();
            for chart in &charts {
                out.section(&format!("semigroup {}", chart));
                let tower = match atlas.tower_semigroup(chart, n_max) {
                    Ok(t) => t,
                    Err(AtlasError::NotNice {
                        chart,
                        n,
                        cycle_a,
                        cycle_b,
                    }) => {
                        let msg = format!(
                            "atlas is not nice at chart {} (degree {}): cycles {} and {} disagree",
                            chart,
                            n,
                            cycle_a.join(","),
                            cycle_b.join(",")
                        );
                        if machine {
                            let _ = writeln!(out.stdout, "nice=false");
                        }
                        let _ = writeln!(out.stdout, "{}", msg);
                        return Ok((1, out.stdout));
                    }
                    Err(e) => return Err(input_err(e)),
                };
                out.scalar("chart", "chart", chart);
                out.scalar("elements", "distinct elements", tower.elements.len());
                match tower.index_period {
                    Some((i, p)) => {
                        out.scalar("index", "index", i);
                        out.scalar("period", "period", p);
                    }
                    None => out.scalar("periodicity", "periodicity", "undetermined"),
                }
                for r in &tower.compatibility {
                    out.report(r);
                }
                reports.extend(tower.compatibility.clone());
            }
            let refs: Vec<&RelationReport> = reports.iter().collect();
            out.summary(&refs);
            Ok((verdict_code(&refs), out.stdout))
        }
        Command::Homotopy { file, machine } => {
            let (doc, digest) = load(&file)?;
            let tasks: Vec<&TaskSpec> = doc
                .tasks
                .iter()
                .filter(|t| matches!(t, TaskSpec::Homotopy { .. }))
                .collect();
            if tasks.is_empty() {
                return Err((2, "no homotopy tasks in document".to_string()));
            }
            let mut out = Out::new(machine);
            out.header(&digest);
            out.section("homotopy");
            let mut reports = Vec::new();
            for task in tasks {
                let (h, f, g) = doc.homotopy_instance(task).map_err(input_err)?;
                let rs = match h.parameter_kind() {
                    crate::homotopy::ParameterKind::Even => h.check_even_semihomotopy(&f, &g),
                    crate::homotopy::ParameterKind::Odd => h.check_odd_semihomotopy(&f, &g),
                }
                .map_err(input_err)?;
                for r in &rs {
                    out.report(r);
                }
                reports.extend(rs);
            }
            let refs: Vec<&RelationReport> = reports.iter().collect();
            out.summary(&refs);
            Ok((verdict_code(&refs), out.stdout))
        }
    }
}

/// Pads the source of a rectangular map up to its target so the Berezinian
/// (defined for endomaps) applies; errors when the source is larger.
fn squared_up(map: &SuperMap) -> Result<SuperMap, crate::format::FormatError> {
    if map.source() == map.target() {
        return Ok(map.clone());
    }
    format::pad_map_source(map, map.target())
}

fn parse_point(list: &str) -> Result<Vec<BigRational>, Failure> {
    list.split(',')
        .map(|s| {
            BigRational::from_str(s.trim())
                .map_err(|_| (2, format!("invalid rational coordinate `{}`", s.trim())))
        })
        .collect()
}
