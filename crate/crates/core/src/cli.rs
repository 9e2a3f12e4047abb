//! Command-line entry points. [`run`] takes explicit streams so every
//! subcommand can be driven from tests.

use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;

use crate::algebra::{Modulus, DEFAULT_BUDGET};
use crate::catalog::{Catalog, CATALOG_ENV};
use crate::diagram::{parse_diagram, DiagramError, DiagramShadow, Shade};
use crate::engine::{new_session, Hint, SessionSource};
use crate::game::{build_game_matrix, Coloring, GameConfig, PushPattern};
use crate::structure::{alternating_signing, connectedly_reducible_parts};
use crate::verify::{run_suite, Corpus};

pub const EXIT_OK: i32 = 0;
/// Verification failures and rejected requests.
pub const EXIT_FAILURE: i32 = 1;
/// Usage errors and unreadable or malformed input files.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "region-select", version, about = "Exact solver for the k-color region select game on knot diagrams")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regions, adjacency, shading and dual distances of a diagram file.
    Regions {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Solve a coloring, leaving two adjacent regions unpushed.
    Solve {
        file: PathBuf,
        /// Number of colors, or `inf` for integer colors.
        #[arg(long, default_value = "2")]
        k: Modulus,
        /// Vertex colors, e.g. `1,0,2`; all zero when omitted.
        #[arg(long, allow_hyphen_values = true)]
        coloring: Option<String>,
        /// Adjacent regions left unpushed, e.g. `0,1`.
        #[arg(long, conflicts_with = "prescribe")]
        pin: Option<String>,
        /// Push counts for two adjacent regions, e.g. `0=1,1=0`.
        #[arg(long)]
        prescribe: Option<String>,
        /// Print all k^2 solving patterns.
        #[arg(long, conflicts_with = "prescribe")]
        all: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run the theorem suite over a corpus.
    Verify {
        /// Directory holding `corpus.json`; the bundled corpus when omitted.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = "2,3,4,5,6,inf")]
        k_list: String,
        /// Brute-force pattern evaluations allowed per report row.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
    /// Play in the terminal, reading commands from standard input.
    Play {
        /// Catalog diagram name or path to a diagram file.
        diagram: String,
        #[arg(long, default_value = "3")]
        k: Modulus,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, env = CATALOG_ENV)]
        catalog: Option<PathBuf>,
    },
    /// Serve the JSON API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, env = CATALOG_ENV)]
        catalog: Option<PathBuf>,
        /// File that keeps sessions across restarts.
        #[arg(long)]
        persist: Option<PathBuf>,
    },
}

/// Failure of a command, with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn failure(message: impl ToString) -> Self {
        CliError {
            code: EXIT_FAILURE,
            message: message.to_string(),
        }
    }
}

type CmdResult = Result<i32, CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Regions { file, json } => cmd_regions(&file, json, out),
        Command::Solve {
            file,
            k,
            coloring,
            pin,
            prescribe,
            all,
            json,
        } => cmd_solve(
            &file,
            &SolveOptions {
                k,
                coloring,
                pin,
                prescribe,
                all,
                json,
            },
            out,
        ),
        Command::Verify {
            corpus,
            k_list,
            budget,
            json,
        } => cmd_verify(corpus.as_deref(), &k_list, budget, json, out),
        Command::Play { diagram, k, seed, catalog } => cmd_play(&diagram, k, seed, catalog.as_deref(), input, out),
        Command::Serve { port, catalog, persist } => cmd_serve(port, catalog.as_deref(), persist, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn io_failure(e: std::io::Error) -> CliError {
    CliError::failure(e)
}

pub fn load_diagram(path: &Path) -> Result<DiagramShadow, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    parse_diagram(&text).map_err(|e| match e {
        DiagramError::Json { line, column, message } => {
            CliError::usage(format!("{}:{line}:{column}: {message}", path.display()))
        }
        other => CliError::usage(format!("{}: {other}", path.display())),
    })
}

#[derive(Debug, Serialize)]
pub struct RegionInfo {
    pub id: usize,
    pub shade: Shade,
    /// Boundary length counted with multiplicity.
    pub edges: usize,
    pub vertices: Vec<usize>,
    pub neighbors: Vec<usize>,
}

#[derive(Debug, Serialize)]
pub struct RegionsReport {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub components: usize,
    pub reducible_vertices: Vec<usize>,
    pub regions: Vec<RegionInfo>,
    pub shaded: Vec<usize>,
    pub unshaded: Vec<usize>,
    pub dual_distances: Vec<Vec<usize>>,
}

pub fn regions_report(shadow: &DiagramShadow) -> Result<RegionsReport, DiagramError> {
    let shading = shadow.checkerboard_shading()?;
    let dual = shadow.dual_graph();
    Ok(RegionsReport {
        name: shadow.name().to_string(),
        n: shadow.vertex_count(),
        m: shadow.region_count(),
        components: shadow.component_count(),
        reducible_vertices: shadow.reducible_vertices().iter().map(|r| r.vertex).collect(),
        regions: shadow
            .regions()
            .iter()
            .map(|r| RegionInfo {
                id: r.id,
                shade: shading.shade(r.id),
                edges: r.edges.len(),
                vertices: r.vertices().into_iter().collect(),
                neighbors: dual.neighbors(r.id).to_vec(),
            })
            .collect(),
        shaded: shading.regions_with(Shade::Shaded),
        unshaded: shading.regions_with(Shade::Unshaded),
        dual_distances: shadow.dual_distances(),
    })
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn cmd_regions(file: &Path, json: bool, out: &mut dyn Write) -> CmdResult {
    let shadow = load_diagram(file)?;
    let report = regions_report(&shadow).map_err(CliError::failure)?;
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes")).map_err(io_failure)?;
        return Ok(EXIT_OK);
    }
    let mut text = format!(
        "{}: {} crossings, {} regions, {} component(s)\n",
        report.name, report.n, report.m, report.components
    );
    if !report.reducible_vertices.is_empty() {
        text += &format!("reducible vertices: {}\n", join(&report.reducible_vertices));
    }
    for r in &report.regions {
        text += &format!(
            "region {}: {}, {} edges, vertices [{}], neighbors [{}]\n",
            r.id,
            r.shade,
            r.edges,
            join(&r.vertices),
            join(&r.neighbors)
        );
    }
    text += &format!("shaded [{}], unshaded [{}]\n", join(&report.shaded), join(&report.unshaded));
    text += "dual distances:\n";
    for row in &report.dual_distances {
        text += &format!("  {}\n", row.iter().map(|d| format!("{d:>2}")).collect::<Vec<_>>().join(" "));
    }
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub k: Modulus,
    pub coloring: Option<String>,
    pub pin: Option<String>,
    pub prescribe: Option<String>,
    pub all: bool,
    pub json: bool,
}

/// `1,0,2` or `[1,0,2]`.
pub fn parse_integers(text: &str) -> Result<Vec<BigInt>, String> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .map(|x| BigInt::from_str(x.trim()).map_err(|_| format!("not an integer: {:?}", x.trim())))
        .collect()
}

fn parse_pair(text: &str) -> Result<(usize, usize), String> {
    match parse_integers(text)?.as_slice() {
        [a, b] => Ok((region_id(a)?, region_id(b)?)),
        _ => Err(format!("expected two regions, got {text:?}")),
    }
}

fn region_id(x: &BigInt) -> Result<usize, String> {
    usize::try_from(x).map_err(|_| format!("invalid region {x}"))
}

/// `rA=a,rB=b`.
fn parse_prescription(text: &str) -> Result<((usize, BigInt), (usize, BigInt)), String> {
    let parts: Vec<(usize, BigInt)> = text
        .split(',')
        .map(|item| {
            let (r, v) = item.split_once('=').ok_or_else(|| format!("expected region=value, got {item:?}"))?;
            let r = r.trim().parse::<usize>().map_err(|_| format!("invalid region {r:?}"))?;
            let v = BigInt::from_str(v.trim()).map_err(|_| format!("invalid value {v:?}"))?;
            Ok((r, v))
        })
        .collect::<Result<_, String>>()?;
    match <[(usize, BigInt); 2]>::try_from(parts) {
        Ok([a, b]) => Ok((a, b)),
        Err(_) => Err(format!("expected two prescriptions, got {text:?}")),
    }
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub diagram: String,
    pub k: Modulus,
    pub coloring: Coloring,
    /// The two regions whose pushes are fixed.
    pub fixed: [usize; 2],
    pub patterns: Vec<PushPattern>,
}

pub fn solve_report(shadow: DiagramShadow, options: &SolveOptions) -> Result<SolveReport, String> {
    let shadow = std::sync::Arc::new(shadow);
    let gm = build_game_matrix(shadow.clone(), GameConfig::new(options.k)).map_err(|e| e.to_string())?;
    let n = gm.vertex_count();
    let coloring = match &options.coloring {
        Some(text) => Coloring(parse_integers(text)?),
        None => Coloring::zeros(n),
    };
    if coloring.len() != n {
        return Err(format!("coloring has {} entries, the diagram has {n} crossings", coloring.len()));
    }
    let (ra, rb) = match (&options.pin, &options.prescribe) {
        (Some(pin), _) => parse_pair(pin)?,
        (None, Some(p)) => {
            let ((ra, _), (rb, _)) = parse_prescription(p)?;
            (ra, rb)
        }
        (None, None) => gm.pinned_pair(),
    };
    let patterns = if let Some(p) = &options.prescribe {
        let (a, b) = parse_prescription(p)?;
        vec![gm.solve_prescribed(&coloring, a, b).map_err(|e| e.to_string())?]
    } else if options.all {
        let k = options
            .k
            .value()
            .ok_or("--all needs a finite k: with k = inf there are infinitely many solutions")?;
        let mut all = Vec::with_capacity((k * k) as usize);
        for a in 0..k {
            for b in 0..k {
                all.push(
                    gm.solve_prescribed(&coloring, (ra, a.into()), (rb, b.into()))
                        .map_err(|e| e.to_string())?,
                );
            }
        }
        all.sort();
        all
    } else {
        vec![gm.solve_pinned(&coloring, ra, rb).map_err(|e| e.to_string())?]
    };
    for p in &patterns {
        if !gm.apply_pattern(&coloring, p).map_err(|e| e.to_string())?.is_zero() {
            return Err("internal error: solution does not clear the coloring".into());
        }
    }
    Ok(SolveReport {
        diagram: shadow.name().to_string(),
        k: options.k,
        coloring: coloring.reduced(options.k),
        fixed: [ra, rb],
        patterns,
    })
}

pub fn cmd_solve(file: &Path, options: &SolveOptions, out: &mut dyn Write) -> CmdResult {
    let shadow = load_diagram(file)?;
    let report = solve_report(shadow, options).map_err(CliError::failure)?;
    if options.json {
        writeln!(out, "{}", serde_json::to_string(&report).expect("report serializes")).map_err(io_failure)?;
        return Ok(EXIT_OK);
    }
    let mut text = format!(
        "{} k={} coloring [{}], regions {} and {} fixed\n",
        report.diagram,
        report.k,
        join(&report.coloring.0),
        report.fixed[0],
        report.fixed[1]
    );
    for p in &report.patterns {
        text += &format!("[{}]\n", join(&p.0));
    }
    text += &format!("{} solution(s), each verified to clear the coloring\n", report.patterns.len());
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(EXIT_OK)
}

pub fn parse_k_list(text: &str) -> Result<Vec<Modulus>, String> {
    text.split(',').map(|k| k.trim().parse::<Modulus>().map_err(|e| e.to_string())).collect()
}

pub fn cmd_verify(corpus: Option<&Path>, k_list: &str, budget: u64, json: bool, out: &mut dyn Write) -> CmdResult {
    let k_list = parse_k_list(k_list).map_err(CliError::usage)?;
    let corpus = match corpus {
        Some(dir) => Corpus::load_dir(dir).map_err(CliError::failure)?,
        None => Corpus::builtin(),
    };
    let report = run_suite(&corpus, &k_list, budget);
    let text = if json { report.to_json() + "\n" } else { report.to_text() };
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAILURE })
}

fn resolve_diagram(diagram: &str, catalog: Option<&Path>) -> Result<DiagramShadow, CliError> {
    let path = Path::new(diagram);
    if path.extension().is_some_and(|e| e == "json") && path.exists() {
        return load_diagram(path);
    }
    let catalog = Catalog::resolve(catalog).map_err(CliError::failure)?;
    catalog
        .get(diagram)
        .map(|s| (**s).clone())
        .ok_or_else(|| CliError::usage(format!("no diagram named {diagram:?} in the catalog")))
}

const PLAY_HELP: &str = "commands: push R [-1] | undo | reset | hint | solution | show | quit\n";

pub fn cmd_play(diagram: &str, k: Modulus, seed: u64, catalog: Option<&Path>, input: &mut dyn BufRead, out: &mut dyn Write) -> CmdResult {
    let shadow = resolve_diagram(diagram, catalog)?;
    let mut session = new_session("terminal", std::sync::Arc::new(shadow), GameConfig::new(k), SessionSource::Seed(seed))
        .map_err(CliError::failure)?;
    let show = |s: &crate::engine::GameSession| format!("colors [{}]\n", join(&s.current().0));
    let mut text = format!(
        "{} with k={k}, {} regions. {PLAY_HELP}{}",
        session.game().shadow().name(),
        session.game().region_count(),
        show(&session)
    );
    out.write_all(text.as_bytes()).map_err(io_failure)?;
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line).map_err(io_failure)? == 0 {
            break;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        text = match words.as_slice() {
            [] => continue,
            ["quit" | "q"] => break,
            ["push" | "p", r, rest @ ..] => {
                let sign = match rest {
                    [] => Ok(1),
                    [s] => s.parse::<i64>().map_err(|_| format!("invalid sign {s:?}")),
                    _ => Err("too many arguments".to_string()),
                };
                match (r.parse::<usize>(), sign) {
                    (Ok(r), Ok(sign)) => match session.push(r, sign) {
                        Ok(()) => show(&session),
                        Err(e) => format!("{e}\n"),
                    },
                    (Err(_), _) => format!("invalid region {r:?}\n"),
                    (_, Err(e)) => format!("{e}\n"),
                }
            }
            ["undo"] => match session.undo() {
                Ok(()) => show(&session),
                Err(e) => format!("{e}\n"),
            },
            ["reset"] => {
                session.reset();
                show(&session)
            }
            ["hint"] => match session.hint() {
                Ok(Hint::Push { region, remaining }) => format!("push region {region} ({remaining} more)\n"),
                Ok(Hint::Solved { .. }) => "already solved\n".into(),
                Err(e) => format!("{e}\n"),
            },
            ["solution"] => match session.solution() {
                Ok(p) => format!("[{}]\n", join(&p.0)),
                Err(e) => format!("{e}\n"),
            },
            ["show"] => show(&session),
            _ => PLAY_HELP.into(),
        };
        if session.status() == crate::engine::Status::Solved && !session.history().is_empty() {
            text += &format!("solved in {} pushes\n", session.history().len());
        }
        out.write_all(text.as_bytes()).map_err(io_failure)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_serve(port: u16, catalog: Option<&Path>, persist: Option<PathBuf>, out: &mut dyn Write) -> CmdResult {
    let catalog = Catalog::resolve(catalog).map_err(CliError::failure)?;
    let state = crate::service::AppState::new(catalog, persist).map_err(CliError::failure)?;
    let runtime = tokio::runtime::Runtime::new().map_err(io_failure)?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await.map_err(io_failure)?;
        let addr = listener.local_addr().map_err(io_failure)?;
        writeln!(out, "listening on http://{addr}").map_err(io_failure)?;
        out.flush().map_err(io_failure)?;
        crate::service::serve(listener, state).await.map_err(io_failure)
    })?;
    Ok(EXIT_OK)
}

/// Region summary of parts and signings, shared with the analysis endpoint.
#[derive(Debug, Serialize)]
pub struct PartSummary {
    pub vertices: Vec<usize>,
    pub regions: Vec<usize>,
    pub is_loop: bool,
}

pub fn part_summaries(shadow: &DiagramShadow) -> Result<Vec<PartSummary>, String> {
    Ok(connectedly_reducible_parts(shadow)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|p| PartSummary {
            vertices: p.vertices,
            regions: p.regions,
            is_loop: p.is_loop,
        })
        .collect())
}

/// Sides of the canonical shading admitting an alternating signing.
pub fn signable_sides(shadow: &DiagramShadow) -> BTreeSet<Shade> {
    shadow.checkerboard_shading().map_or_else(
        |_| BTreeSet::new(),
        |shading| {
            [Shade::Unshaded, Shade::Shaded]
                .into_iter()
                .filter(|&side| alternating_signing(shadow, &shading, side).is_some())
                .collect()
        },
    )
}
