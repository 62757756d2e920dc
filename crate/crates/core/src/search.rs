//! Exhaustive search for copies of `2^[n]` inside a set family.
//!
//! The search fixes the bottom and top images `(f(∅), f([n]))` first, then
//! assigns the remaining subsets of `[n]` in order of increasing size (ties
//! by encoding). A candidate image for `S` must:
//!
//! * lie strictly between the bottom and the top,
//! * strictly contain `f(S \ {i})` for every `i ∈ S`,
//! * be incomparable with `f(T)` for every already-assigned `T` incomparable to `S`.
//!
//! These are exactly the order-isomorphism constraints. On top of them the
//! engine applies pruning rules that follow from the chain-length bound
//! `|f(B)| - |f(A)| >= |B| - |A|` and from the top-children intersection
//! bound, plus (in first-hit mode) a symmetry rule that keeps only the
//! member of each `Sym(n)` orbit whose singleton images increase.
//! Every rule can be switched off; outcomes must not change.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::coloring::{Color, Coloring};
use crate::embedding::{verify_embedding, Embedding};
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::lattice::ground_mask;

/// Largest source cube the engine accepts.
pub const MAX_SOURCE: u32 = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Stop at the first embedding in branch order.
    First,
    /// Count all embeddings (labelled maps, not distinct image families).
    Count,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Cardinality-window and top-children pruning.
    pub pruning: bool,
    /// Increasing singleton images; only used in `First` mode.
    pub symmetry_breaking: bool,
    /// Split the root pairs across the rayon pool.
    pub parallel: bool,
    /// Wall-clock budget. Exceeding it yields `Inconclusive`, never `Absent`.
    pub budget: Option<Duration>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            pruning: true,
            symmetry_breaking: true,
            parallel: true,
            budget: None,
        }
    }
}

impl SearchConfig {
    pub fn sequential() -> Self {
        SearchConfig {
            parallel: false,
            ..SearchConfig::default()
        }
    }

    /// No pruning, no symmetry breaking; constraint propagation only.
    pub fn unpruned() -> Self {
        SearchConfig {
            pruning: false,
            symmetry_breaking: false,
            parallel: false,
            budget: None,
        }
    }
}

/// Hit counters for each pruning rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PruneStats {
    /// Root pairs discarded because `|top \ bottom| < n`.
    pub root_gap: u64,
    /// Candidates outside the cardinality window of their source.
    pub window: u64,
    /// Partial assignments rejected by the top-children intersection bound.
    pub top_children: u64,
    /// Candidates rejected by the increasing-singletons rule.
    pub symmetry: u64,
    /// Candidates rejected by the order constraints themselves.
    pub order: u64,
}

impl PruneStats {
    fn add(&mut self, other: &PruneStats) {
        self.root_gap += other.root_gap;
        self.window += other.window;
        self.top_children += other.top_children;
        self.symmetry += other.symmetry;
        self.order += other.order;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Found(Embedding),
    /// The search tree was exhausted without finding an embedding.
    Absent,
    /// Exhaustive count of embeddings.
    Counted(u64),
    /// The budget ran out first.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub status: SearchStatus,
    /// Root pairs whose subtrees were searched.
    pub roots: u64,
    /// Partial assignments visited, roots included.
    pub nodes_explored: u64,
    pub prunes: PruneStats,
    pub elapsed: Duration,
}

impl SearchOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self.status, SearchStatus::Found(_))
    }

    pub fn is_absent(&self) -> bool {
        matches!(self.status, SearchStatus::Absent)
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        match &self.status {
            SearchStatus::Found(e) => Some(e),
            _ => None,
        }
    }

    pub fn count(&self) -> Option<u64> {
        match self.status {
            SearchStatus::Counted(c) => Some(c),
            _ => None,
        }
    }
}

struct Step {
    source: u32,
    size: u32,
    children: Vec<u32>,
    incomparable: Vec<u32>,
    /// Source of the previous singleton, for the symmetry rule.
    previous_singleton: Option<u32>,
    /// `k - 1` if this is the `k`-th top child in assignment order.
    top_child_rank: Option<usize>,
}

/// Assignment order and per-source constraint lists for a given `n`.
struct Plan {
    n: u32,
    full: u32,
    steps: Vec<Step>,
}

impl Plan {
    fn new(n: u32) -> Plan {
        let full = ground_mask(n);
        let mut order: Vec<u32> = (1..full).collect();
        order.sort_by_key(|&s| (s.count_ones(), s));
        let mut steps = Vec::with_capacity(order.len());
        let mut top_children = 0;
        let mut last_singleton = None;
        for (pos, &source) in order.iter().enumerate() {
            let size = source.count_ones();
            let children = (0..n)
                .filter(|i| source >> i & 1 == 1)
                .map(|i| source & !(1 << i))
                .collect();
            let incomparable = order[..pos]
                .iter()
                .copied()
                .filter(|&t| t & !source != 0 && source & !t != 0)
                .collect();
            let previous_singleton = if size == 1 { last_singleton.replace(source) } else { None };
            let top_child_rank = (size == n - 1 && n >= 2).then(|| {
                top_children += 1;
                top_children - 1
            });
            steps.push(Step {
                source,
                size,
                children,
                incomparable,
                previous_singleton,
                top_child_rank,
            });
        }
        Plan { n, full, steps }
    }
}

/// Root pair `(f(∅), f([n]))`.
#[derive(Clone, Copy, Debug)]
struct Root {
    bottom: u32,
    top: u32,
}

struct Shared<'a> {
    family: &'a SetFamily,
    plan: &'a Plan,
    config: &'a SearchConfig,
    mode: SearchMode,
    deadline: Option<Instant>,
    timed_out: &'a AtomicBool,
    /// Lowest root index known to contain a hit; later roots may stop.
    best_root: &'a AtomicUsize,
}

#[derive(Default)]
struct RootResult {
    found: Option<Vec<u32>>,
    count: u64,
    nodes: u64,
    prunes: PruneStats,
    aborted: bool,
}

struct Worker<'a, 'b> {
    shared: &'b Shared<'a>,
    root_index: usize,
    bottom: u32,
    top: u32,
    gap: u32,
    /// `buckets[k]`: members strictly between bottom and top with `k` more
    /// elements than the bottom, ascending.
    buckets: Vec<Vec<u32>>,
    images: Vec<u32>,
    meets: Vec<u32>,
    result: RootResult,
}

enum Flow {
    Continue,
    Stop,
}

const CLOCK_INTERVAL: u64 = 1 << 12;

impl<'a, 'b> Worker<'a, 'b> {
    fn new(shared: &'b Shared<'a>, root_index: usize, root: Root) -> Self {
        let gap = (root.top & !root.bottom).count_ones();
        let free = root.top & !root.bottom;
        let mut buckets = vec![Vec::new(); gap as usize + 1];
        if shared.plan.steps.is_empty() {
            // n = 1: nothing between bottom and top is needed.
        } else {
            // Proper nonempty submasks of the free part, ascending.
            let mut members: Vec<u32> = Vec::new();
            let mut sub = free.wrapping_sub(1) & free;
            while sub != 0 {
                let set = root.bottom | sub;
                if shared.family.contains_bits(set) {
                    members.push(set);
                }
                sub = (sub - 1) & free;
            }
            members.sort_unstable();
            for set in members {
                buckets[(set & !root.bottom).count_ones() as usize].push(set);
            }
        }
        let plan = shared.plan;
        let mut images = vec![0u32; 1 << plan.n];
        images[0] = root.bottom;
        images[plan.full as usize] = root.top;
        let top_child_count = if plan.n >= 2 { plan.n as usize } else { 0 };
        Worker {
            shared,
            root_index,
            bottom: root.bottom,
            top: root.top,
            gap,
            buckets,
            images,
            meets: vec![0; top_child_count + 1],
            result: RootResult::default(),
        }
    }

    fn should_abort(&mut self) -> bool {
        if self.result.aborted {
            return true;
        }
        if self.shared.mode == SearchMode::First
            && self.shared.best_root.load(Ordering::Relaxed) < self.root_index
        {
            self.result.aborted = true;
            return true;
        }
        if self.result.nodes.is_multiple_of(CLOCK_INTERVAL) {
            if self.shared.timed_out.load(Ordering::Relaxed) {
                self.result.aborted = true;
                return true;
            }
            if let Some(deadline) = self.shared.deadline {
                if Instant::now() >= deadline {
                    self.shared.timed_out.store(true, Ordering::Relaxed);
                    self.result.aborted = true;
                    return true;
                }
            }
        }
        false
    }

    fn run(mut self) -> RootResult {
        self.result.nodes += 1;
        self.meets[0] = self.top;
        let _ = self.descend(0);
        self.result
    }

    fn complete(&mut self) -> Flow {
        match self.shared.mode {
            SearchMode::First => {
                self.result.found = Some(self.images.clone());
                self.shared.best_root.fetch_min(self.root_index, Ordering::Relaxed);
                Flow::Stop
            }
            SearchMode::Count => {
                self.result.count += 1;
                Flow::Continue
            }
        }
    }

    fn descend(&mut self, depth: usize) -> Flow {
        let plan = self.shared.plan;
        if depth == plan.steps.len() {
            return self.complete();
        }
        if self.should_abort() {
            return Flow::Stop;
        }
        let step = &plan.steps[depth];
        let config = self.shared.config;
        let n = plan.n;

        let (lo, hi) = if config.pruning {
            // |f(∅)| + |S| <= |f(S)| <= |f([n])| - (n - |S|)
            (step.size, self.gap.saturating_sub(n - step.size))
        } else {
            (1, self.gap.saturating_sub(1))
        };
        if config.pruning {
            let skipped: usize = self
                .buckets
                .iter()
                .enumerate()
                .filter(|(k, _)| (*k as u32) < lo || (*k as u32) > hi)
                .map(|(_, b)| b.len())
                .sum();
            self.result.prunes.window += skipped as u64;
        }

        let symmetry_floor = match (config.symmetry_breaking, self.shared.mode, step.previous_singleton) {
            (true, SearchMode::First, Some(prev)) => Some(self.images[prev as usize]),
            _ => None,
        };

        for k in lo..=hi {
            let bucket_len = self.buckets[k as usize].len();
            for idx in 0..bucket_len {
                let candidate = self.buckets[k as usize][idx];
                if let Some(floor) = symmetry_floor {
                    let prev_key = (floor & !self.bottom).count_ones();
                    if (k, candidate) <= (prev_key, floor) {
                        self.result.prunes.symmetry += 1;
                        continue;
                    }
                }
                if !self.consistent(step, candidate) {
                    self.result.prunes.order += 1;
                    continue;
                }
                if let Some(rank) = step.top_child_rank {
                    if config.pruning {
                        let meet = self.meets[rank] & candidate;
                        if meet.count_ones() + rank as u32 + 1 > self.top.count_ones() {
                            self.result.prunes.top_children += 1;
                            continue;
                        }
                        self.meets[rank + 1] = meet;
                    }
                }
                self.images[step.source as usize] = candidate;
                self.result.nodes += 1;
                if let Flow::Stop = self.descend(depth + 1) {
                    return Flow::Stop;
                }
            }
        }
        Flow::Continue
    }

    #[inline]
    fn consistent(&self, step: &Step, candidate: u32) -> bool {
        for &child in &step.children {
            let below = self.images[child as usize];
            if below & !candidate != 0 || below == candidate {
                return false;
            }
        }
        for &other in &step.incomparable {
            let image = self.images[other as usize];
            if image & !candidate == 0 || candidate & !image == 0 {
                return false;
            }
        }
        true
    }
}

fn enumerate_roots(family: &SetFamily, n: u32, config: &SearchConfig, stats: &mut PruneStats) -> Vec<Root> {
    let members: Vec<u32> = family.iter().map(|s| s.bits()).collect();
    let mut roots = Vec::new();
    for &bottom in &members {
        for &top in &members {
            if bottom & !top != 0 || bottom == top {
                continue;
            }
            let gap = (top & !bottom).count_ones();
            if gap < n
                && config.pruning {
                    stats.root_gap += 1;
                    continue;
                }
                // Without the gap rule the subtree still fails, just later.
            roots.push(Root { bottom, top });
        }
    }
    roots
}

/// Searches `family` for a copy of `2^[n]`.
///
/// In `First` mode the result is the first embedding in branch order
/// (roots by `(bottom, top)` encoding, then sources by size and encoding,
/// candidates by size and encoding), independent of thread count.
pub fn find_copy(family: &SetFamily, n: u32, mode: SearchMode, config: &SearchConfig) -> Result<SearchOutcome> {
    let start = Instant::now();
    if n == 0 {
        return Err(Error::Domain("the source cube needs n >= 1".into()));
    }
    if n > MAX_SOURCE {
        return Err(Error::Capacity(format!("source cube 2^[{n}] exceeds 2^[{MAX_SOURCE}]")));
    }
    let m = family.space().ground_size();
    let empty_outcome = |status| SearchOutcome {
        status,
        roots: 0,
        nodes_explored: 0,
        prunes: PruneStats::default(),
        elapsed: start.elapsed(),
    };
    if n > m {
        return Ok(empty_outcome(match mode {
            SearchMode::First => SearchStatus::Absent,
            SearchMode::Count => SearchStatus::Counted(0),
        }));
    }

    let plan = Plan::new(n);
    let mut prunes = PruneStats::default();
    let roots = enumerate_roots(family, n, config, &mut prunes);
    let timed_out = AtomicBool::new(false);
    let best_root = AtomicUsize::new(usize::MAX);
    let shared = Shared {
        family,
        plan: &plan,
        config,
        mode,
        deadline: config.budget.map(|b| start + b),
        timed_out: &timed_out,
        best_root: &best_root,
    };

    let run_root = |(index, root): (usize, &Root)| -> RootResult {
        if mode == SearchMode::First && best_root.load(Ordering::Relaxed) < index {
            return RootResult {
                aborted: true,
                ..RootResult::default()
            };
        }
        if timed_out.load(Ordering::Relaxed) || shared.deadline.is_some_and(|d| Instant::now() >= d) {
            timed_out.store(true, Ordering::Relaxed);
            return RootResult {
                aborted: true,
                ..RootResult::default()
            };
        }
        Worker::new(&shared, index, *root).run()
    };

    let results: Vec<RootResult> = if config.parallel {
        roots.par_iter().enumerate().map(run_root).collect()
    } else {
        let mut out = Vec::with_capacity(roots.len());
        for item in roots.iter().enumerate() {
            let r = run_root(item);
            let stop = r.found.is_some() || timed_out.load(Ordering::Relaxed);
            out.push(r);
            if stop {
                break;
            }
        }
        out
    };

    // Statistics cover the roots up to and including the winner, which is
    // the same set of completed subtrees in sequential and parallel runs.
    let winner = results.iter().position(|r| r.found.is_some());
    let considered = winner.map_or(results.len(), |w| w + 1);
    let mut nodes = 0u64;
    let mut count = 0u64;
    for r in &results[..considered] {
        nodes += r.nodes;
        count += r.count;
        prunes.add(&r.prunes);
    }

    let status = if let Some(w) = winner {
        let images = results[w].found.as_ref().expect("winner has images");
        let embedding = Embedding::from_raw(n, m, images);
        if let Err(v) = verify_embedding(&embedding, Some(family)) {
            return Err(Error::OracleDisagreement(format!(
                "search produced an invalid embedding: {}",
                v.describe(n)
            )));
        }
        SearchStatus::Found(embedding)
    } else if timed_out.load(Ordering::Relaxed) {
        SearchStatus::Inconclusive
    } else {
        match mode {
            SearchMode::First => SearchStatus::Absent,
            SearchMode::Count => SearchStatus::Counted(count),
        }
    };

    Ok(SearchOutcome {
        status,
        roots: considered as u64,
        nodes_explored: nodes,
        prunes,
        elapsed: start.elapsed(),
    })
}

/// First-hit search whose `Absent` outcome is an absence certificate: the
/// outcome records the roots, nodes and per-rule prune counts of the
/// exhausted tree.
pub fn verify_no_copy(family: &SetFamily, n: u32, config: &SearchConfig) -> Result<SearchOutcome> {
    find_copy(family, n, SearchMode::First, config)
}

/// Exact number of embeddings of `2^[n]` into `family`.
pub fn count_embeddings(family: &SetFamily, n: u32, config: &SearchConfig) -> Result<u64> {
    let config = SearchConfig {
        budget: None,
        ..config.clone()
    };
    let outcome = find_copy(family, n, SearchMode::Count, &config)?;
    Ok(outcome.count().expect("unbudgeted count completes"))
}

/// Every embedding of `2^[n]` into `family`, in branch order. Meant for
/// small instances.
pub fn all_embeddings(family: &SetFamily, n: u32) -> Result<Vec<Embedding>> {
    let mut out = Vec::new();
    let m = family.space().ground_size();
    if n == 0 || n > m {
        return Ok(out);
    }
    let config = SearchConfig {
        symmetry_breaking: false,
        parallel: false,
        ..SearchConfig::default()
    };
    let plan = Plan::new(n);
    let mut stats = PruneStats::default();
    let timed_out = AtomicBool::new(false);
    let best_root = AtomicUsize::new(usize::MAX);
    let shared = Shared {
        family,
        plan: &plan,
        config: &config,
        mode: SearchMode::Count,
        deadline: None,
        timed_out: &timed_out,
        best_root: &best_root,
    };
    for (index, root) in enumerate_roots(family, n, &config, &mut stats).into_iter().enumerate() {
        let mut collector = Collector {
            worker: Worker::new(&shared, index, root),
            out: &mut out,
            m,
        };
        collector.run();
    }
    Ok(out)
}

/// Distinct copies (image families) of `2^[n]` in `family`.
pub fn distinct_copies(family: &SetFamily, n: u32) -> Result<Vec<Vec<u32>>> {
    let mut keys: Vec<Vec<u32>> = all_embeddings(family, n)?.iter().map(Embedding::copy_key).collect();
    keys.sort();
    keys.dedup();
    Ok(keys)
}

struct Collector<'a, 'b, 'c> {
    worker: Worker<'a, 'b>,
    out: &'c mut Vec<Embedding>,
    m: u32,
}

impl Collector<'_, '_, '_> {
    fn run(&mut self) {
        self.worker.meets[0] = self.worker.top;
        self.walk(0);
    }

    fn walk(&mut self, depth: usize) {
        let plan = self.worker.shared.plan;
        if depth == plan.steps.len() {
            self.out.push(Embedding::from_raw(plan.n, self.m, &self.worker.images));
            return;
        }
        let step = &plan.steps[depth];
        let n = plan.n;
        let (lo, hi) = (step.size, self.worker.gap.saturating_sub(n - step.size));
        for k in lo..=hi {
            for idx in 0..self.worker.buckets[k as usize].len() {
                let candidate = self.worker.buckets[k as usize][idx];
                if !self.worker.consistent(step, candidate) {
                    continue;
                }
                self.worker.images[step.source as usize] = candidate;
                self.walk(depth + 1);
            }
        }
    }
}

/// Result of searching both color classes of a coloring.
#[derive(Clone, Debug)]
pub enum MonochromaticResult {
    Found(Color, Embedding),
    Absent,
    Inconclusive,
}

/// Searches the Red class, then the Blue class, and reports the first hit.
pub fn contains_monochromatic_copy(coloring: &Coloring, n: u32, config: &SearchConfig) -> Result<MonochromaticResult> {
    let mut inconclusive = false;
    for color in [Color::Red, Color::Blue] {
        let class = coloring.color_class(color);
        let outcome = find_copy(&class, n, SearchMode::First, config)?;
        match outcome.status {
            SearchStatus::Found(e) => return Ok(MonochromaticResult::Found(color, e)),
            SearchStatus::Inconclusive => inconclusive = true,
            _ => {}
        }
    }
    Ok(if inconclusive {
        MonochromaticResult::Inconclusive
    } else {
        MonochromaticResult::Absent
    })
}
