//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.
//!
//! Time limits below are the pinned tolerances; they are generous relative
//! to an optimized single-core build.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use cube_ramsey::coloring::{Color, Coloring};
use cube_ramsey::embedding::{cardinality_gap_violation, top_children_violation, Embedding};
use cube_ramsey::flip_graph::{build_flip_graph, check_bipartition};
use cube_ramsey::format::{coloring_to_string, load_coloring, parse_coloring, save_coloring};
use cube_ramsey::lattice::CubeSpace;
use cube_ramsey::oracle::{exists_good_coloring, naive_count, naive_find_copy, ramsey_bruteforce, BruteForceOptions};
use cube_ramsey::restrictive::{extend_to_maximal, is_restrictive};
use cube_ramsey::search::{all_embeddings, count_embeddings, find_copy, SearchConfig, SearchMode};
use cube_ramsey::SetFamily;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const BIN: &str = env!("CARGO_BIN_EXE_cube-ramsey");

const LIMIT_RESTRICTIVE_N10: Duration = Duration::from_secs(5);
const LIMIT_LOWER_BOUND_N4: Duration = Duration::from_secs(60);
const LIMIT_LOWER_BOUND_N5_MS: u64 = 30 * 60 * 1000;
const LIMIT_REMARK_N3: Duration = Duration::from_secs(5);
const LIMIT_TRIVIAL_N3: Duration = Duration::from_secs(60);
const LIMIT_ORACLE: Duration = Duration::from_secs(60);
const LIMIT_FLIP_N10: Duration = Duration::from_secs(10);

struct Run {
    code: i32,
    stdout: String,
    elapsed: Duration,
}

fn cli(args: &[&str]) -> Run {
    let started = Instant::now();
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 report"),
        elapsed: started.elapsed(),
    }
}

/// Value of `key` inside `[section]` of a rendered report.
fn field<'a>(report: &'a str, section: &str, key: &str) -> Option<&'a str> {
    let header = format!("[{section}]");
    let body = report.split(&header).nth(1)?;
    body.lines()
        .take_while(|l| !l.starts_with('['))
        .find_map(|l| l.strip_prefix(key)?.strip_prefix(" = "))
}

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn random_family(m: u32, density: f64, rng: &mut StdRng) -> SetFamily {
    let space = CubeSpace::plain(m).unwrap();
    let members: Vec<_> = (0..1u32 << m)
        .filter(|_| rng.gen_bool(density))
        .map(|b| space.set(b).unwrap())
        .collect();
    SetFamily::from_sets(space, members).unwrap()
}

fn criterion_1() -> Verdict {
    let mut at_10 = Duration::ZERO;
    for n in 4..=10 {
        let started = Instant::now();
        let c = Coloring::c0(n).map_err(|e| e.to_string())?;
        let red = is_restrictive(&c.color_class(Color::Red), n).map_err(|e| e.to_string())?;
        let dual = is_restrictive(&c.dual().color_class(Color::Red), n).map_err(|e| e.to_string())?;
        ensure(red.holds(), || format!("red class fails at n={n}: {:?}", red.first_failure()))?;
        ensure(dual.holds(), || format!("dual red class fails at n={n}: {:?}", dual.first_failure()))?;
        if n == 10 {
            at_10 = started.elapsed();
        }
    }
    ensure(at_10 <= LIMIT_RESTRICTIVE_N10, || format!("n=10 took {at_10:?}"))?;
    Ok(format!("n=4..10 both classes restrictive; n=10 in {at_10:.2?}"))
}

fn lower_bound(n: u32, extra: &[&str]) -> (Run, Option<String>) {
    let n_text = n.to_string();
    let mut args = vec!["--threads", "1", "verify-lower-bound", "--n", &n_text];
    args.extend_from_slice(extra);
    let run = cli(&args);
    let status = field(&run.stdout, "result", "status").map(str::to_string);
    (run, status)
}

fn criterion_2() -> Verdict {
    let (run, status) = lower_bound(4, &[]);
    ensure(run.code == 0, || format!("exit {} report:\n{}", run.code, run.stdout))?;
    ensure(status.as_deref() == Some("certified"), || format!("status {status:?}"))?;
    for section in ["check.red", "check.dual-red"] {
        ensure(field(&run.stdout, section, "restrictive") == Some("true"), || format!("{section} not restrictive"))?;
    }
    for section in ["search.red", "search.blue"] {
        ensure(field(&run.stdout, section, "outcome") == Some("absent"), || format!("{section} not absent"))?;
        ensure(field(&run.stdout, section, "exhaustive") == Some("true"), || format!("{section} not exhaustive"))?;
    }
    ensure(run.stdout.contains("budget_ms = none"), || "run was budgeted".into())?;
    ensure(run.elapsed <= LIMIT_LOWER_BOUND_N4, || format!("took {:?}", run.elapsed))?;
    Ok(format!("n=4 restrictive + absent/absent, single thread, {:.2?}", run.elapsed))
}

/// The stretch run is budgeted, so it either certifies or says Inconclusive.
fn criterion_2_stretch() -> Verdict {
    let budget = LIMIT_LOWER_BOUND_N5_MS.to_string();
    let (run, status) = lower_bound(5, &["--budget-ms", &budget]);
    match (run.code, status.as_deref()) {
        (0, Some("certified")) => Ok(format!("n=5 restrictive + absent/absent in {:.2?}", run.elapsed)),
        (3, Some("inconclusive")) => Err(format!("n=5 hit the {budget} ms budget; reported inconclusive")),
        _ => Err(format!("exit {} status {status:?}", run.code)),
    }
}

fn criterion_3(found: &mut Vec<Embedding>) -> Verdict {
    let dir = tempdir();
    let coloring = dir.join("c0-n3.qrc");
    let report = dir.join("find-n3.txt");
    let made = cli(&["color", "--n", "3", "--out", coloring.to_str().unwrap()]);
    ensure(made.code == 0, || "color failed".into())?;
    let run = cli(&["find-copy", "--n", "3", "--coloring", coloring.to_str().unwrap()]);
    ensure(run.code == 2, || format!("find-copy exit {}", run.code))?;
    ensure(run.elapsed <= LIMIT_REMARK_N3, || format!("took {:?}", run.elapsed))?;
    let colors: Vec<&str> = ["red", "blue"]
        .into_iter()
        .filter(|c| field(&run.stdout, &format!("search.{c}"), "outcome") == Some("found"))
        .collect();
    std::fs::write(&report, &run.stdout).unwrap();
    let recheck = cli(&["recheck", report.to_str().unwrap(), "--coloring", coloring.to_str().unwrap()]);
    ensure(recheck.code == 0, || format!("recheck exit {}:\n{}", recheck.code, recheck.stdout))?;

    let c = Coloring::c0(3).unwrap();
    for color in [Color::Red, Color::Blue] {
        if let Some(e) = find_copy(&c.color_class(color), 3, SearchMode::First, &SearchConfig::default())
            .unwrap()
            .embedding()
        {
            found.push(e.clone());
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("copies found in {} class(es) in {:.2?}; recheck passed", colors.join("+"), run.elapsed))
}

fn criterion_4() -> Verdict {
    let dir = tempdir();
    let mut notes = Vec::new();
    for n in [2u32, 3] {
        let path = dir.join(format!("layered-{n}.qrc"));
        let n_text = n.to_string();
        let made = cli(&["color", "--n", &n_text, "--scheme", "layered", "--out", path.to_str().unwrap()]);
        ensure(made.code == 0, || "color failed".into())?;
        let run = cli(&["find-copy", "--n", &n_text, "--coloring", path.to_str().unwrap()]);
        ensure(run.code == 0, || format!("n={n} exit {}", run.code))?;
        for c in ["red", "blue"] {
            let section = format!("search.{c}");
            ensure(field(&run.stdout, &section, "exhaustive") == Some("true"), || format!("n={n} {c} not exhaustive"))?;
        }
        if n == 3 {
            ensure(run.elapsed <= LIMIT_TRIVIAL_N3, || format!("n=3 took {:?}", run.elapsed))?;
        }
        notes.push(format!("n={n} over Q{} in {:.2?}", 2 * n - 1, run.elapsed));
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("absent/absent: {}", notes.join(", ")))
}

fn criterion_5() -> Verdict {
    let started = Instant::now();
    let plain = BruteForceOptions::default();
    let checked = BruteForceOptions { cross_check: true, ..plain };
    let q1 = exists_good_coloring(1, 1, checked).map_err(|e| e.to_string())?;
    let q2 = exists_good_coloring(1, 2, checked).map_err(|e| e.to_string())?;
    let q3 = exists_good_coloring(2, 3, checked).map_err(|e| e.to_string())?;
    let q4 = exists_good_coloring(2, 4, plain).map_err(|e| e.to_string())?;
    ensure(q1.good_coloring.is_some(), || "no good coloring of Q1 for n=1".into())?;
    ensure(q2.good_coloring.is_none() && q2.colorings_checked == 16, || format!("Q2: {q2:?}"))?;
    ensure(q3.good_coloring.is_some(), || "no good coloring of Q3 for n=2".into())?;
    ensure(q4.good_coloring.is_none() && q4.colorings_checked == 65_536, || format!("Q4: checked {}", q4.colorings_checked))?;
    for (n, expected) in [(1u32, 2u32), (2, 4)] {
        for opts in [plain, BruteForceOptions { symmetry_reduction: true, ..plain }] {
            let r = ramsey_bruteforce(n, 4, opts).map_err(|e| e.to_string())?;
            ensure(r.value == Some(expected), || format!("n={n} {opts:?}: {:?}", r.value))?;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed <= LIMIT_ORACLE, || format!("took {elapsed:?}"))?;
    Ok(format!("R=2 (n=1), R=4 (n=2); Q2 16 and Q4 65536 colorings all bad; {elapsed:.2?}"))
}

fn criterion_6(found: &mut Vec<Embedding>) -> Verdict {
    let mut rng = StdRng::seed_from_u64(0xacce_0006);
    let pools: Vec<rayon::ThreadPool> = [1, 2, 4]
        .into_iter()
        .map(|t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap())
        .collect();
    let mut families = 0;
    for n in 1..=2u32 {
        for m in 1..=4u32 {
            for _ in 0..50 {
                let f = random_family(m, rng.gen_range(0.2..1.0), &mut rng);
                let naive_found = naive_find_copy(&f, n).unwrap().is_some();
                let naive = naive_count(&f, n).unwrap();
                for pool in &pools {
                    for config in [SearchConfig::default(), SearchConfig::sequential()] {
                        let outcome = pool.install(|| find_copy(&f, n, SearchMode::First, &config)).unwrap();
                        ensure(outcome.is_found() == naive_found, || format!("n={n} m={m}: found mismatch"))?;
                        let counted = pool.install(|| count_embeddings(&f, n, &config)).unwrap();
                        ensure(counted == naive, || format!("n={n} m={m}: count {counted} vs {naive}"))?;
                        if let Some(e) = outcome.embedding() {
                            found.push(e.clone());
                        }
                    }
                }
                families += 1;
            }
        }
    }
    Ok(format!("{families} families, threads 1/2/4, find and count agree with the naive oracle"))
}

fn criterion_7(mut found: Vec<Embedding>) -> Verdict {
    // Add every embedding of the full cube for small shapes.
    for (n, m) in [(1, 3), (2, 4), (2, 5), (3, 4), (3, 5)] {
        found.extend(all_embeddings(&SetFamily::full(CubeSpace::plain(m).unwrap()), n).unwrap());
    }
    let mut bad = 0;
    for e in &found {
        if cardinality_gap_violation(e).is_some() || top_children_violation(e).is_some() {
            bad += 1;
        }
    }
    ensure(bad == 0, || format!("{bad} of {} embeddings violate a bound", found.len()))?;
    Ok(format!("{} embeddings checked, 0 violations", found.len()))
}

fn criterion_8() -> Verdict {
    let mut at_10 = Duration::ZERO;
    for n in 1..=10 {
        let started = Instant::now();
        let g = build_flip_graph(n).map_err(|e| e.to_string())?;
        let r = check_bipartition(&g);
        ensure(r.all_hold(), || format!("n={n}: {r:?}"))?;
        ensure(r.edges == u64::from(n) << (n - 1), || format!("n={n}: {} edges", r.edges))?;
        if n == 10 {
            at_10 = started.elapsed();
        }
    }
    ensure(at_10 <= LIMIT_FLIP_N10, || format!("n=10 took {at_10:?}"))?;
    Ok(format!("n=1..10 bipartite, connected, n-regular, parity classes; n=10 in {at_10:.2?}"))
}

fn criterion_9() -> Verdict {
    let mut total = 0;
    for n in 4..=6u32 {
        let c = Coloring::c0(n).unwrap();
        let red = c.color_class(Color::Red);
        let space = CubeSpace::paired(n).unwrap();
        for s in red.iter() {
            let top = extend_to_maximal(&red, s, n).map_err(|e| format!("{s}: {e}"))?;
            let (pairs, _) = space.count_pairs_singles(top).unwrap();
            ensure(top.cardinality() == n + n / 2, || format!("{s} -> {top}: wrong size"))?;
            ensure(pairs == n / 2, || format!("{s} -> {top}: {pairs} pairs"))?;
            ensure(space.missed_pairs(top).unwrap().is_empty(), || format!("{s} -> {top}: misses a pair"))?;
            ensure(s.is_subset_of(top), || format!("{s} -> {top}: not a superset"))?;
            let mut augmented = red.clone();
            augmented.insert(top).unwrap();
            let report = is_restrictive(&augmented, n).unwrap();
            ensure(report.holds(), || format!("adding {top} breaks {:?}", report.first_failure()))?;
            total += 1;
        }
    }
    Ok(format!("{total} red sets extended over n=4,5,6; all properties held"))
}

fn criterion_10() -> Verdict {
    let dir = tempdir();
    let mut rng = StdRng::seed_from_u64(0xacce_0010);
    for m in 1..=8u32 {
        let space = CubeSpace::plain(m).unwrap();
        for i in 0..200 {
            let red: Vec<bool> = (0..1u32 << m).map(|_| rng.gen_bool(0.5)).collect();
            let c = Coloring::from_fn(space, format!("random-{m}-{i}"), |s| {
                if red[s.bits() as usize] {
                    Color::Red
                } else {
                    Color::Blue
                }
            });
            let path = dir.join("c.qrc");
            save_coloring(&c, &path).unwrap();
            let bytes = std::fs::read(&path).unwrap();
            let back = load_coloring(&path).map_err(|e| e.to_string())?;
            ensure(back == c, || format!("m={m} #{i}: load differs"))?;
            save_coloring(&back, &path).unwrap();
            ensure(std::fs::read(&path).unwrap() == bytes, || format!("m={m} #{i}: resave differs"))?;
        }
    }
    // Fixed inputs, frozen bytes.
    let layered = coloring_to_string(&Coloring::layered(2).unwrap()).unwrap();
    ensure(layered == "QRC1\nm=2\nscheme=layered\nBRRB\n", || format!("layered m=2: {layered:?}"))?;
    let c0 = coloring_to_string(&Coloring::c0(1).unwrap()).unwrap();
    ensure(c0 == "QRC1\nm=2\nscheme=c0\nRRBB\n", || format!("c0 n=1: {c0:?}"))?;
    ensure(parse_coloring(&c0).unwrap() == Coloring::c0(1).unwrap(), || "c0 n=1 parse".into())?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok("1600 random colorings round-trip byte-exact; fixed outputs match".into())
}

fn tempdir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("cube-ramsey-acceptance-{}-{:?}", std::process::id(), Instant::now()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn main() {
    assert!(Path::new(BIN).exists(), "binary {BIN} missing");
    let mut found = Vec::new();
    let mut failures = 0;
    let mut report = |id: &str, verdict: Verdict| match verdict {
        Ok(detail) => println!("criterion {id}: PASS {detail}"),
        Err(detail) => {
            println!("criterion {id}: FAIL {detail}");
            failures += 1;
        }
    };
    report("1", criterion_1());
    report("2", criterion_2());
    report("2 (stretch n=5)", criterion_2_stretch());
    report("3", criterion_3(&mut found));
    report("4", criterion_4());
    report("5", criterion_5());
    report("6", criterion_6(&mut found));
    report("7", criterion_7(found));
    report("8", criterion_8());
    report("9", criterion_9());
    report("10", criterion_10());
    if failures > 0 {
        println!("acceptance: {failures} criterion line(s) failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
