use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use cube_ramsey::coloring::{Color, Coloring, SCHEME_C0, SCHEME_LAYERED};
use cube_ramsey::embedding::{verify_embedding, Embedding};
use cube_ramsey::flip_graph::{build_flip_graph, check_bipartition};
use cube_ramsey::format::{coloring_to_string, load_coloring, save_coloring};
use cube_ramsey::lattice::{parse_element_set, ElementSet};
use cube_ramsey::oracle::{ramsey_bruteforce, BruteForceOptions};
use cube_ramsey::restrictive::{is_restrictive, RestrictiveReport};
use cube_ramsey::search::{find_copy, SearchConfig, SearchMode, SearchOutcome, SearchStatus};
use cube_ramsey::Error;

use crate::report::{Report, Section};
use crate::{ColorChoice, Command, Scheme};

pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILED: u8 = 1;
    pub const FOUND: u8 = 2;
    pub const INCONCLUSIVE: u8 = 3;
    pub const NOT_COVERED: u8 = 4;
    pub const USAGE: u8 = 64;
    pub const DATA: u8 = 65;
    pub const IO: u8 = 66;
    pub const CAPACITY: u8 = 69;
    pub const SOFTWARE: u8 = 70;
}

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: u8,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: exit::USAGE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Usage(_) | Error::Precondition(_) => exit::USAGE,
            Error::Parse { .. } | Error::Structural(_) => exit::DATA,
            Error::Io(_) => exit::IO,
            Error::Capacity(_) => exit::CAPACITY,
            Error::OracleDisagreement(_) => exit::SOFTWARE,
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}

pub struct Outcome {
    /// Report text; suppressed by `--quiet`.
    pub stdout: Option<String>,
    pub code: u8,
}

impl Outcome {
    fn report(mut report: Report, started: Instant, code: u8) -> Self {
        report
            .section("summary")
            .field("exit_code", code)
            .field("elapsed_ms", started.elapsed().as_millis());
        Outcome {
            stdout: Some(report.render()),
            code,
        }
    }
}

pub fn run(command: &Command, threads: usize) -> Result<Outcome, CliError> {
    let started = Instant::now();
    match command {
        Command::Color { n, scheme, m, out } => cmd_color(*n, *scheme, *m, out.as_deref(), started),
        Command::Check { n, coloring } => cmd_check(*n, coloring, started),
        Command::FindCopy {
            n,
            coloring,
            color,
            budget_ms,
        } => cmd_find_copy(*n, coloring, *color, *budget_ms, threads, started),
        Command::VerifyLowerBound { n, coloring, budget_ms } => {
            cmd_verify_lower_bound(*n, coloring.as_deref(), *budget_ms, threads, started)
        }
        Command::BruteRamsey {
            n,
            max_m,
            symmetry_reduction,
        } => cmd_brute_ramsey(*n, *max_m, *symmetry_reduction, started),
        Command::FlipGraph { n, out } => cmd_flip_graph(*n, out.as_deref(), started),
        Command::Recheck { report, coloring } => cmd_recheck(report, coloring.as_deref(), started),
    }
}

fn search_config(budget_ms: Option<u64>, threads: usize) -> SearchConfig {
    SearchConfig {
        parallel: threads > 1,
        budget: budget_ms.map(Duration::from_millis),
        ..SearchConfig::default()
    }
}

fn generate(n: u32, scheme: Scheme, m: Option<u32>) -> Result<Coloring, CliError> {
    match scheme {
        Scheme::C0 => {
            if let Some(m) = m {
                if m != 2 * n {
                    return Err(CliError::usage(format!("c0 lives on 2^[2n]; --m {m} != {}", 2 * n)));
                }
            }
            Ok(Coloring::c0(n)?)
        }
        Scheme::Layered => {
            let m = match m {
                Some(m) => m,
                None if n >= 1 => 2 * n - 1,
                None => return Err(CliError::usage("--n must be at least 1")),
            };
            Ok(Coloring::layered(m)?)
        }
    }
}

fn cmd_color(n: u32, scheme: Scheme, m: Option<u32>, out: Option<&Path>, started: Instant) -> Result<Outcome, CliError> {
    let coloring = generate(n, scheme, m)?;
    let Some(path) = out else {
        // The coloring itself is the output; print it even under --quiet.
        print!("{}", coloring_to_string(&coloring)?);
        return Ok(Outcome { stdout: None, code: exit::OK });
    };
    save_coloring(&coloring, path)?;
    let mut report = Report::new("color");
    report
        .param("n", n)
        .param("m", coloring.space().ground_size())
        .param("scheme", coloring.scheme())
        .param("out", path.display())
        .param("entries", coloring.space().len());
    Ok(Outcome::report(report, started, exit::OK))
}

fn load(path: &Path) -> Result<Coloring, CliError> {
    load_coloring(path).map_err(|e| CliError {
        code: match e {
            Error::Io(_) => exit::IO,
            _ => exit::DATA,
        },
        message: format!("{}: {e}", path.display()),
    })
}

fn restrictive_section(report: &mut Report, name: &str, result: &RestrictiveReport) {
    let section = report.section(name);
    section.field("restrictive", result.holds());
    for part in &result.parts {
        let key = part.property.name();
        section.field(&format!("{key}.holds"), part.holds);
        section.field(&format!("{key}.checked"), part.checked_count);
        section.field(
            &format!("{key}.witness"),
            part.witness.map_or("none".to_string(), |w| w.to_string()),
        );
    }
}

/// Restrictiveness of the Red class and of the Red class of the dual.
fn run_checks(report: &mut Report, coloring: &Coloring, n: u32) -> Result<bool, CliError> {
    let red = is_restrictive(&coloring.color_class(Color::Red), n)?;
    let dual = is_restrictive(&coloring.dual().color_class(Color::Red), n)?;
    restrictive_section(report, "check.red", &red);
    restrictive_section(report, "check.dual-red", &dual);
    Ok(red.holds() && dual.holds())
}

fn cmd_check(n: Option<u32>, path: &Path, started: Instant) -> Result<Outcome, CliError> {
    let coloring = load(path)?;
    let m = coloring.space().ground_size();
    let n = match n {
        Some(n) if 2 * n == m => n,
        Some(n) => return Err(CliError::usage(format!("coloring is over [{m}], but --n {n} needs [{}]", 2 * n))),
        None if m % 2 == 0 => m / 2,
        None => return Err(CliError::usage(format!("coloring is over [{m}], which has no pairing"))),
    };
    let mut report = Report::new("check");
    report
        .param("n", n)
        .param("m", m)
        .param("scheme", coloring.scheme())
        .param("coloring", "file");
    let ok = run_checks(&mut report, &coloring, n)?;
    Ok(Outcome::report(report, started, if ok { exit::OK } else { exit::FAILED }))
}

fn outcome_label(status: &SearchStatus) -> &'static str {
    match status {
        SearchStatus::Found(_) => "found",
        SearchStatus::Absent => "absent",
        SearchStatus::Counted(_) => "counted",
        SearchStatus::Inconclusive => "inconclusive",
    }
}

fn search_section(report: &mut Report, color: Color, outcome: &SearchOutcome, family_size: u64) {
    let section = report.section(format!("search.{}", color.name()));
    section
        .field("family_size", family_size)
        .field("outcome", outcome_label(&outcome.status))
        .field("exhaustive", matches!(outcome.status, SearchStatus::Absent))
        .field("roots", outcome.roots)
        .field("nodes_explored", outcome.nodes_explored)
        .field("prune.root_gap", outcome.prunes.root_gap)
        .field("prune.window", outcome.prunes.window)
        .field("prune.top_children", outcome.prunes.top_children)
        .field("prune.symmetry", outcome.prunes.symmetry)
        .field("prune.order", outcome.prunes.order);
    if let Some(e) = outcome.embedding() {
        section.block("embedding", e.listing());
    }
}

/// Runs the requested classes; returns the combined exit status.
fn run_searches(
    report: &mut Report,
    coloring: &Coloring,
    n: u32,
    colors: &[Color],
    config: &SearchConfig,
) -> Result<u8, CliError> {
    let mut found = false;
    let mut inconclusive = false;
    for &color in colors {
        let class = coloring.color_class(color);
        let outcome = find_copy(&class, n, SearchMode::First, config)?;
        found |= outcome.is_found();
        inconclusive |= matches!(outcome.status, SearchStatus::Inconclusive);
        search_section(report, color, &outcome, class.len());
    }
    Ok(if found {
        exit::FOUND
    } else if inconclusive {
        exit::INCONCLUSIVE
    } else {
        exit::OK
    })
}

fn colors_for(choice: ColorChoice) -> &'static [Color] {
    match choice {
        ColorChoice::Red => &[Color::Red],
        ColorChoice::Blue => &[Color::Blue],
        ColorChoice::Both => &[Color::Red, Color::Blue],
    }
}

fn cmd_find_copy(
    n: u32,
    path: &Path,
    choice: ColorChoice,
    budget_ms: Option<u64>,
    threads: usize,
    started: Instant,
) -> Result<Outcome, CliError> {
    let coloring = load(path)?;
    let mut report = Report::new("find-copy");
    report
        .param("n", n)
        .param("m", coloring.space().ground_size())
        .param("scheme", coloring.scheme())
        .param("coloring", "file")
        .param("color", format!("{choice:?}").to_lowercase())
        .param("budget_ms", budget_ms.map_or("none".to_string(), |b| b.to_string()));
    let code = run_searches(&mut report, &coloring, n, colors_for(choice), &search_config(budget_ms, threads))?;
    Ok(Outcome::report(report, started, code))
}

fn cmd_verify_lower_bound(
    n: u32,
    path: Option<&Path>,
    budget_ms: Option<u64>,
    threads: usize,
    started: Instant,
) -> Result<Outcome, CliError> {
    let mut report = Report::new("verify-lower-bound");
    report.param("n", n).param("m", 2 * n);
    let config = search_config(budget_ms, threads);
    let claim = format!("R(Q{n},Q{n}) > {}", 2 * n);

    let (coloring, checked) = match path {
        Some(path) => {
            let coloring = load(path)?;
            if coloring.space().ground_size() != 2 * n {
                return Err(CliError::usage(format!(
                    "coloring is over [{}], a lower-bound instance for n = {n} needs [{}]",
                    coloring.space().ground_size(),
                    2 * n
                )));
            }
            report.param("scheme", coloring.scheme()).param("coloring", "file");
            (coloring, None)
        }
        None if n < 4 => {
            report.param("scheme", SCHEME_C0).param("coloring", "none");
            report
                .section("result")
                .field("claim", &claim)
                .field("status", "not-covered")
                .field("reason", "c0 certifies n >= 4 only; supply --coloring for smaller n");
            return Ok(Outcome::report(report, started, exit::NOT_COVERED));
        }
        None => {
            let coloring = Coloring::c0(n)?;
            report.param("scheme", SCHEME_C0).param("coloring", "generated");
            let ok = run_checks(&mut report, &coloring, n)?;
            (coloring, Some(ok))
        }
    };
    report.param("budget_ms", budget_ms.map_or("none".to_string(), |b| b.to_string()));

    let search_code = run_searches(&mut report, &coloring, n, colors_for(ColorChoice::Both), &config)?;
    let code = match (checked, search_code) {
        (_, exit::FOUND) => exit::FOUND,
        (Some(false), _) => exit::FAILED,
        (_, code) => code,
    };
    let status = match code {
        exit::OK => "certified",
        exit::FOUND => "refuted",
        exit::INCONCLUSIVE => "inconclusive",
        _ => "failed",
    };
    report.section("result").field("claim", &claim).field("status", status);
    Ok(Outcome::report(report, started, code))
}

fn cmd_brute_ramsey(n: u32, max_m: u32, symmetry_reduction: bool, started: Instant) -> Result<Outcome, CliError> {
    let options = BruteForceOptions {
        symmetry_reduction,
        cross_check: false,
    };
    let outcome = ramsey_bruteforce(n, max_m, options)?;
    let mut report = Report::new("brute-ramsey");
    report
        .param("n", n)
        .param("max_m", max_m)
        .param("symmetry_reduction", symmetry_reduction);
    for probe in &outcome.probes {
        let section = report.section(format!("probe.m{}", probe.m));
        section
            .field("good_coloring_exists", probe.good_coloring.is_some())
            .field("colorings_checked", probe.colorings_checked);
        if let Some(c) = &probe.good_coloring {
            section.field("good_coloring", c.symbols().collect::<String>());
        }
    }
    report.section("result").field(
        "ramsey_value",
        outcome.value.map_or("unresolved".to_string(), |v| v.to_string()),
    );
    Ok(Outcome::report(report, started, exit::OK))
}

fn cmd_flip_graph(n: u32, out: Option<&Path>, started: Instant) -> Result<Outcome, CliError> {
    let graph = build_flip_graph(n)?;
    let check = check_bipartition(&graph);
    if let Some(path) = out {
        let mut file = fs::File::create(path).map_err(Error::from)?;
        graph.write_edge_list(&mut file).map_err(Error::from)?;
    }
    let mut report = Report::new("flip-graph");
    report.param("n", n);
    report
        .section("graph")
        .field("vertices", check.vertices)
        .field("edges", check.edges)
        .field("expected_edges", u64::from(n) << (n - 1))
        .field("regular", check.regular)
        .field("connected", check.connected)
        .field("bipartite", check.bipartite)
        .field("class_sizes", format!("{} {}", check.class_sizes.0, check.class_sizes.1))
        .field("matches_parity", check.matches_parity);
    let code = if check.all_hold() { exit::OK } else { exit::FAILED };
    Ok(Outcome::report(report, started, code))
}

fn header_u32(report: &Report, key: &str) -> Result<u32, CliError> {
    report
        .header
        .get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CliError {
            message: format!("report has no numeric {key:?} field"),
            code: exit::DATA,
        })
}

fn parse_certificate(section: &Section, n: u32, m: u32) -> Result<Embedding, String> {
    let (_, lines) = section.block.as_ref().ok_or("found outcome without an embedding listing")?;
    let mut images: Vec<Option<ElementSet>> = vec![None; 1 << n];
    for line in lines {
        let (source, image) = line.split_once(" -> ").ok_or_else(|| format!("bad listing line {line:?}"))?;
        let source = parse_element_set(source, n).map_err(|e| e.to_string())?;
        let image = parse_element_set(image, m).map_err(|e| e.to_string())?;
        let slot = &mut images[source.bits() as usize];
        if slot.replace(image).is_some() {
            return Err(format!("source {source} listed twice"));
        }
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.ok_or_else(|| format!("no image for source encoding {i}")))
        .collect::<Result<Vec<_>, _>>()?;
    Embedding::new(n, m, images).map_err(|e| e.to_string())
}

fn cmd_recheck(path: &Path, coloring_path: Option<&Path>, started: Instant) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError {
        message: format!("{}: {e}", path.display()),
        code: exit::IO,
    })?;
    let source = Report::parse(&text).map_err(|message| CliError { message, code: exit::DATA })?;
    let n = header_u32(&source, "n")?;
    let m = header_u32(&source, "m")?;
    let coloring = match coloring_path {
        Some(p) => load(p)?,
        None => match (source.header.get("coloring"), source.header.get("scheme")) {
            (Some("generated"), Some(SCHEME_C0)) => Coloring::c0(n)?,
            (Some("generated"), Some(SCHEME_LAYERED)) => Coloring::layered(m)?,
            _ => return Err(CliError::usage("the report's coloring came from a file; pass --coloring")),
        },
    };
    if coloring.space().ground_size() != m {
        return Err(CliError::usage(format!(
            "coloring is over [{}], the report is over [{m}]",
            coloring.space().ground_size()
        )));
    }

    let mut report = Report::new("recheck");
    report.param("n", n).param("m", m).param("source_command", source.header.get("command").unwrap_or("?"));
    let mut certificates = 0;
    let mut all_valid = true;
    for color in [Color::Red, Color::Blue] {
        let Some(section) = source.find(&format!("search.{}", color.name())) else { continue };
        if section.get("outcome") != Some("found") {
            continue;
        }
        certificates += 1;
        let verdict = parse_certificate(section, n, m).and_then(|e| {
            verify_embedding(&e, Some(&coloring.color_class(color))).map_err(|v| v.describe(n))
        });
        let out = report.section(format!("recheck.{}", color.name()));
        match verdict {
            Ok(()) => {
                out.field("valid", true);
            }
            Err(reason) => {
                all_valid = false;
                out.field("valid", false).field("reason", reason);
            }
        }
    }
    report.section("result").field("certificates", certificates);
    let code = if certificates > 0 && all_valid { exit::OK } else { exit::FAILED };
    Ok(Outcome::report(report, started, code))
}
