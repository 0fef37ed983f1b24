//! Command-line surface for the stability-condition toolkit. Machine output
//! is JSON on stdout, human diagnostics go to stderr. Exit codes: 1 usage,
//! 2 parse or input error, 3 invariant violation.

mod parse;
mod selftest;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use qstable::cubecomplex::{enumerate_cells, CubePoint};
use qstable::curvetype::CombinatorialType;
use qstable::qcond::{
    count_conditions_forced, enumerate_conditions, symmetric_conditions, QCondition,
};
use qstable::tropical::{CoreKind, TropicalCurve};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qstable",
    version,
    about = "Stability conditions, tropical contractions, and the cube complex \
             for pointed genus-one curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    #[default]
    Json,
    /// Graphviz output; contract and family only.
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Count stability conditions (nonempty antichains of the partition
    /// lattice); with --symmetric, only the S_n-fixed ones.
    CountQ {
        n: usize,
        #[arg(long)]
        symmetric: bool,
        /// Worker threads for the antichain search; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Count past n = 5 despite the combinatorial explosion.
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Emit every condition as JSON (n <= 4).
    EnumerateQ { n: usize },
    /// Evaluate the stability predicate of a combinatorial type against a
    /// condition or a cube point.
    CheckStability {
        /// Combinatorial type, as JSON or the text language.
        #[arg(long = "type")]
        type_file: PathBuf,
        /// Condition JSON file.
        #[arg(long)]
        q: Option<PathBuf>,
        /// Cube point JSON file (interpolated stability).
        #[arg(long)]
        cube: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Contract a radially aligned curve at a radius index or at the radius
    /// a condition assigns.
    Contract {
        /// Curve file, as JSON or the text language.
        #[arg(long)]
        curve: PathBuf,
        /// Radius index: 0 for the zero radius, i for the i-th radius.
        #[arg(long)]
        radius: Option<usize>,
        /// Condition JSON file driving the radius choice.
        #[arg(long)]
        q: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// The contraction family of a chain's test curve, radius by radius.
    Family {
        /// Chain in block syntax, e.g. "1234 < 12|34".
        #[arg(long)]
        chain: String,
        /// Core shape: "smooth" or "cycle:J".
        #[arg(long, default_value = "smooth")]
        core: String,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check that exactly one member of the family is stable; prints the
    /// index, exits 3 on a violation.
    VerifyExactlyOne {
        #[arg(long)]
        chain: String,
        #[arg(long)]
        q: PathBuf,
        #[arg(long, default_value = "smooth")]
        core: String,
    },
    /// Cube-complex reports: vertex or cell censuses, or point validation.
    Cube {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        vertices: bool,
        #[arg(long)]
        cells: bool,
        /// Validate a cube-point JSON file.
        #[arg(long)]
        validate: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run the exhaustive invariant suites.
    Selftest {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
}

enum Failure {
    Input(String),
    Violation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Violation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Violation(m) => m,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

/// Types and curves load from JSON or from the text language, keyed on the
/// leading brace.
fn load_type(path: &Path) -> Result<CombinatorialType, Failure> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(input_err)
    } else {
        parse::parse_type(text.trim()).map_err(input_err)
    }
}

fn load_curve(path: &Path) -> Result<TropicalCurve, Failure> {
    let text = read_file(path)?;
    if text.trim_start().starts_with('{') {
        serde_json::from_str(&text).map_err(input_err)
    } else {
        parse::parse_curve(text.trim()).map_err(input_err)
    }
}

fn load_condition(path: &Path) -> Result<QCondition, Failure> {
    serde_json::from_str(&read_file(path)?).map_err(input_err)
}

fn parse_core(core: &str) -> Result<CoreKind, Failure> {
    if core == "smooth" {
        return Ok(CoreKind::SmoothVertex);
    }
    if let Some(j) = core.strip_prefix("cycle:") {
        let j: usize = j
            .parse()
            .map_err(|_| Failure::Input(format!("bad cycle length '{j}'")))?;
        return Ok(CoreKind::Cycle(j));
    }
    Err(Failure::Input(format!(
        "unknown core '{core}', expected 'smooth' or 'cycle:J'"
    )))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable outputs")
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::CountQ {
            n,
            symmetric,
            threads,
            force,
            format,
        } => {
            if n == 0 {
                return Err(Failure::Input("n must be positive".into()));
            }
            if symmetric {
                let conditions = symmetric_conditions(n).map_err(input_err)?;
                let flags: Vec<bool> = conditions
                    .iter()
                    .map(|q| (0..n).any(|m| QCondition::m_stable(n, m).as_ref() == Ok(q)))
                    .collect();
                let m_stable_count = flags.iter().filter(|&&f| f).count();
                match format {
                    Format::Text => {
                        println!("{}", conditions.len());
                        eprintln!(
                            "{} symmetric conditions; {} of them are the block-count \
                             (m-stable) conditions",
                            conditions.len(),
                            m_stable_count
                        );
                    }
                    Format::Dot => {
                        return Err(Failure::Input("dot output is for contract/family".into()))
                    }
                    Format::Json => {
                        #[derive(serde::Serialize)]
                        struct Row {
                            condition: QCondition,
                            m_stable: bool,
                        }
                        let rows: Vec<Row> = conditions
                            .into_iter()
                            .zip(flags)
                            .map(|(condition, m_stable)| Row {
                                condition,
                                m_stable,
                            })
                            .collect();
                        let doc = serde_json::json!({
                            "n": n,
                            "count": rows.len(),
                            "m_stable_count": m_stable_count,
                            "conditions": rows,
                        });
                        println!("{}", to_json(&doc));
                    }
                }
                return Ok(());
            }
            if n > 5 && !force {
                return Err(Failure::Input(format!(
                    "counting for n = {n} explodes combinatorially; pass --force to insist"
                )));
            }
            if n >= 5 {
                eprintln!("counting antichains of Part({n})...");
            }
            let start = std::time::Instant::now();
            let count = count_conditions_forced(n, threads).map_err(input_err)?;
            if n >= 5 {
                eprintln!("done in {:?}", start.elapsed());
            }
            match format {
                Format::Text => println!("{count}"),
                Format::Json => {
                    println!("{}", to_json(&serde_json::json!({"n": n, "count": count})))
                }
                Format::Dot => {
                    return Err(Failure::Input("dot output is for contract/family".into()))
                }
            }
            Ok(())
        }
        Command::EnumerateQ { n } => {
            let conditions = enumerate_conditions(n).map_err(input_err)?;
            println!("{}", to_json(&conditions));
            Ok(())
        }
        Command::CheckStability {
            type_file,
            q,
            cube,
            format,
        } => {
            let t = load_type(&type_file)?;
            let verdict = match (q, cube) {
                (Some(q), None) => {
                    let q = load_condition(&q)?;
                    if q.n() != t.n() {
                        return Err(Failure::Input(format!(
                            "type has n = {}, condition has n = {}",
                            t.n(),
                            q.n()
                        )));
                    }
                    t.is_stable_for(&q)
                }
                (None, Some(cube)) => {
                    let point: CubePoint =
                        serde_json::from_str(&read_file(&cube)?).map_err(input_err)?;
                    if point.n() != t.n() {
                        return Err(Failure::Input(format!(
                            "type has n = {}, cube point has n = {}",
                            t.n(),
                            point.n()
                        )));
                    }
                    t.is_stable_for_cube_point(&point)
                }
                _ => {
                    return Err(Failure::Input(
                        "pass exactly one of --q FILE or --cube FILE".into(),
                    ))
                }
            };
            match format {
                Format::Json => {
                    let doc = serde_json::json!({
                        "stable": verdict.stable,
                        "failure": verdict.failure.as_ref().map(|f| format!("{f:?}")),
                    });
                    println!("{}", to_json(&doc));
                }
                Format::Text => match &verdict.failure {
                    None => println!("stable"),
                    Some(f) => println!("unstable: {f:?}"),
                },
                Format::Dot => {
                    return Err(Failure::Input("dot output is for contract/family".into()))
                }
            }
            Ok(())
        }
        Command::Contract {
            curve,
            radius,
            q,
            format,
        } => {
            let c = load_curve(&curve)?;
            let t = match (radius, q) {
                (Some(i), None) => {
                    let radial = c.radial_structure().map_err(input_err)?;
                    let rho = if i == 0 {
                        qstable::MonoidElement::zero()
                    } else {
                        radial.radii.get(i - 1).cloned().ok_or_else(|| {
                            Failure::Input(format!(
                                "radius index {i} out of range; the curve has {} radii",
                                radial.radii.len()
                            ))
                        })?
                    };
                    qstable::contract_at_radius(&c, &rho).map_err(input_err)?
                }
                (None, Some(q)) => {
                    let q = load_condition(&q)?;
                    qstable::contract_for_condition(&c, &q)
                        .map_err(|e| Failure::Violation(e.to_string()))?
                }
                _ => {
                    return Err(Failure::Input(
                        "pass exactly one of --radius IDX or --q FILE".into(),
                    ))
                }
            };
            match format {
                Format::Json => println!("{}", to_json(&t)),
                Format::Text => println!("{}", t.render_text()),
                Format::Dot => print!("{}", t.render_dot()),
            }
            Ok(())
        }
        Command::Family {
            chain,
            core,
            format,
        } => {
            let chain = parse::parse_chain(&chain).map_err(input_err)?;
            let core = parse_core(&core)?;
            let family = qstable::contraction_family(&chain, core).map_err(input_err)?;
            match format {
                Format::Json => println!("{}", to_json(&family)),
                Format::Text => {
                    let curve = qstable::build_test_curve(&chain, core).map_err(input_err)?;
                    eprintln!("chain: {}", parse::print_chain(&chain));
                    eprintln!("test curve: {}", parse::print_curve(&curve));
                    for (i, t) in family.iter().enumerate() {
                        println!("{i}: {}", t.render_text());
                    }
                }
                Format::Dot => {
                    for t in &family {
                        print!("{}", t.render_dot());
                    }
                }
            }
            Ok(())
        }
        Command::VerifyExactlyOne { chain, q, core } => {
            let chain = parse::parse_chain(&chain).map_err(input_err)?;
            let core = parse_core(&core)?;
            let q = load_condition(&q)?;
            if q.n() != chain.n() {
                return Err(Failure::Input(format!(
                    "chain has n = {}, condition has n = {}",
                    chain.n(),
                    q.n()
                )));
            }
            match qstable::verify_exactly_one(&chain, core, &q) {
                Ok(index) => {
                    println!("{index}");
                    Ok(())
                }
                Err(e @ qstable::contraction::ContractionError::ExactlyOneViolated { .. }) => {
                    Err(Failure::Violation(e.to_string()))
                }
                Err(e) => Err(input_err(e)),
            }
        }
        Command::Cube {
            n,
            vertices,
            cells,
            validate,
            format,
        } => {
            if let Some(path) = validate {
                let text = read_file(&path)?;
                return match serde_json::from_str::<CubePoint>(&text) {
                    Ok(point) => {
                        if point.n() != n {
                            return Err(Failure::Input(format!(
                                "point has n = {}, expected {n}",
                                point.n()
                            )));
                        }
                        match format {
                            Format::Json => println!(
                                "{}",
                                to_json(&serde_json::json!({
                                    "valid": true,
                                    "vertex": point.is_vertex(),
                                }))
                            ),
                            Format::Text => println!("valid"),
                            Format::Dot => {
                                return Err(Failure::Input(
                                    "dot output is for contract/family".into(),
                                ))
                            }
                        }
                        Ok(())
                    }
                    Err(e) => Err(Failure::Input(format!("invalid cube point: {e}"))),
                };
            }
            if vertices == cells {
                return Err(Failure::Input(
                    "pass exactly one of --vertices, --cells, or --validate FILE".into(),
                ));
            }
            let all_cells = enumerate_cells(n).map_err(input_err)?;
            if vertices {
                let vertex_conditions: Vec<QCondition> = all_cells
                    .iter()
                    .filter(|c| c.dimension() == 0)
                    .map(|c| c.sample_point().to_condition().expect("vertex cell"))
                    .collect();
                match format {
                    Format::Json => println!("{}", to_json(&vertex_conditions)),
                    Format::Text => {
                        for q in &vertex_conditions {
                            let members: Vec<String> =
                                q.members().iter().map(|p| p.to_string()).collect();
                            println!("{{{}}}", members.join(", "));
                        }
                    }
                    Format::Dot => {
                        return Err(Failure::Input("dot output is for contract/family".into()))
                    }
                }
            } else {
                match format {
                    Format::Json => {
                        #[derive(serde::Serialize)]
                        struct CellRow {
                            dimension: usize,
                            ones: Vec<qstable::SetPartition>,
                            free: Vec<qstable::SetPartition>,
                        }
                        let rows: Vec<CellRow> = all_cells
                            .iter()
                            .map(|c| CellRow {
                                dimension: c.dimension(),
                                ones: c.ones().iter().cloned().collect(),
                                free: c.free().iter().cloned().collect(),
                            })
                            .collect();
                        println!("{}", to_json(&rows));
                    }
                    Format::Text => {
                        for c in &all_cells {
                            let ones: Vec<String> =
                                c.ones().iter().map(|p| p.to_string()).collect();
                            let free: Vec<String> =
                                c.free().iter().map(|p| p.to_string()).collect();
                            println!(
                                "dim {}: ones [{}] free [{}]",
                                c.dimension(),
                                ones.join(", "),
                                free.join(", ")
                            );
                        }
                    }
                    Format::Dot => {
                        return Err(Failure::Input("dot output is for contract/family".into()))
                    }
                }
            }
            Ok(())
        }
        Command::Selftest { n } => selftest::run(n).map_err(Failure::Violation),
    }
}
