//! Ground truth for tiny instances.
//!
//! The naive copy check tries every injective map from `2^[n]` into a family
//! (ordered selections of distinct members) and tests order isomorphism only
//! once the map is complete. The Ramsey enumerator walks every 2-coloring of
//! `2^[m]` for `m <= 4`.

use rayon::prelude::*;

use crate::coloring::{Color, Coloring};
use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::lattice::CubeSpace;
use crate::search::{contains_monochromatic_copy, MonochromaticResult, SearchConfig};

/// Largest cube whose colorings are enumerated (`2^16` colorings).
pub const MAX_ENUMERATED_GROUND: u32 = 4;

/// Largest source cube the naive check accepts.
pub const MAX_NAIVE_SOURCE: u32 = 3;

fn is_order_isomorphic(images: &[u32]) -> bool {
    let count = images.len();
    (0..count).all(|a| {
        (0..count).all(|b| {
            let source = a & !b == 0;
            let image = images[a] & !images[b] == 0;
            source == image
        })
    })
}

/// Visits every ordered selection of `2^n` distinct members; `visit` returns
/// `true` to stop.
fn for_each_selection(members: &[u32], slots: usize, visit: &mut dyn FnMut(&[u32]) -> bool) -> bool {
    fn go(members: &[u32], used: &mut [bool], chosen: &mut Vec<u32>, slots: usize, visit: &mut dyn FnMut(&[u32]) -> bool) -> bool {
        if chosen.len() == slots {
            return visit(chosen);
        }
        for i in 0..members.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            chosen.push(members[i]);
            let stop = go(members, used, chosen, slots, visit);
            chosen.pop();
            used[i] = false;
            if stop {
                return true;
            }
        }
        false
    }
    let mut used = vec![false; members.len()];
    let mut chosen = Vec::with_capacity(slots);
    go(members, &mut used, &mut chosen, slots, visit)
}

fn check_naive_capacity(family: &SetFamily, n: u32) -> Result<()> {
    if n > MAX_NAIVE_SOURCE || family.space().ground_size() > 6 {
        return Err(Error::Capacity(format!(
            "naive enumeration limited to n <= {MAX_NAIVE_SOURCE}, m <= 6"
        )));
    }
    Ok(())
}

/// First copy of `2^[n]` in `family` found by exhaustive selection, if any.
pub fn naive_find_copy(family: &SetFamily, n: u32) -> Result<Option<Embedding>> {
    check_naive_capacity(family, n)?;
    let members: Vec<u32> = family.iter().map(|s| s.bits()).collect();
    let slots = 1usize << n;
    let mut found = None;
    for_each_selection(&members, slots, &mut |images| {
        if is_order_isomorphic(images) {
            found = Some(images.to_vec());
            true
        } else {
            false
        }
    });
    Ok(found.map(|images| Embedding::from_raw(n, family.space().ground_size(), &images)))
}

/// Number of embeddings of `2^[n]` into `family`, by exhaustive selection.
pub fn naive_count(family: &SetFamily, n: u32) -> Result<u64> {
    check_naive_capacity(family, n)?;
    let members: Vec<u32> = family.iter().map(|s| s.bits()).collect();
    let mut count = 0u64;
    for_each_selection(&members, 1 << n, &mut |images| {
        if is_order_isomorphic(images) {
            count += 1;
        }
        false
    });
    Ok(count)
}

pub fn naive_monochromatic(coloring: &Coloring, n: u32) -> Result<Option<(Color, Embedding)>> {
    for color in [Color::Red, Color::Blue] {
        if let Some(e) = naive_find_copy(&coloring.color_class(color), n)? {
            return Ok(Some((color, e)));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BruteForceOptions {
    /// Only test colorings that are minimal in their orbit under ground-set
    /// permutations and color swap.
    pub symmetry_reduction: bool,
    /// Run the naive copy check on every tested coloring and fail on any
    /// disagreement with the search engine.
    pub cross_check: bool,
}

#[derive(Clone, Debug)]
pub struct BruteForceResult {
    pub n: u32,
    pub m: u32,
    /// Lowest-index coloring with no monochromatic copy of `2^[n]`.
    pub good_coloring: Option<Coloring>,
    /// Colorings tested up to and including the winner (all of them if none).
    pub colorings_checked: u64,
    pub symmetry_reduced: bool,
}

/// Coloring `mask` of `2^[m]`: bit `i` set iff the set encoded by `i` is Red.
pub fn coloring_from_mask(m: u32, mask: u32) -> Result<Coloring> {
    let space = CubeSpace::plain(m)?;
    Ok(Coloring::from_fn(space, format!("bruteforce:{mask:#x}"), |s| {
        if mask >> s.bits() & 1 == 1 {
            Color::Red
        } else {
            Color::Blue
        }
    }))
}

/// Index permutations of `2^[m]` induced by all permutations of `[m]`.
fn ground_permutations(m: u32) -> Vec<Vec<u32>> {
    fn permutations(items: Vec<u32>) -> Vec<Vec<u32>> {
        if items.len() <= 1 {
            return vec![items];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.clone();
            let head = rest.remove(i);
            for mut tail in permutations(rest) {
                tail.insert(0, head);
                out.push(tail);
            }
        }
        out
    }
    permutations((0..m).collect())
        .into_iter()
        .map(|perm| {
            (0..1u32 << m)
                .map(|set| {
                    (0..m)
                        .filter(|&j| set >> j & 1 == 1)
                        .fold(0u32, |acc, j| acc | 1 << perm[j as usize])
                })
                .collect()
        })
        .collect()
}

fn is_canonical(mask: u32, m: u32, perms: &[Vec<u32>]) -> bool {
    let size = 1u32 << m;
    let all = if size == 32 { u32::MAX } else { (1u32 << size) - 1 };
    perms.iter().all(|table| {
        let image = (0..size).fold(0u32, |acc, i| acc | (mask >> i & 1) << table[i as usize]);
        image >= mask && (!image & all) >= mask
    })
}

/// Searches all colorings of `2^[m]` for one with no monochromatic copy of
/// `2^[n]`, or certifies that none exists.
pub fn exists_good_coloring(n: u32, m: u32, options: BruteForceOptions) -> Result<BruteForceResult> {
    if m == 0 || m > MAX_ENUMERATED_GROUND {
        return Err(Error::Capacity(format!(
            "enumerating colorings of 2^[{m}] is out of reach; the limit is m <= {MAX_ENUMERATED_GROUND}"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("the source cube needs n >= 1".into()));
    }
    let total: u32 = 1 << (1u32 << m);
    let perms = if options.symmetry_reduction { ground_permutations(m) } else { Vec::new() };
    let engine = SearchConfig::sequential();

    let tested = |mask: u32| !options.symmetry_reduction || is_canonical(mask, m, &perms);
    let good = |mask: u32| -> Result<bool> {
        let coloring = coloring_from_mask(m, mask)?;
        let engine_hit = match contains_monochromatic_copy(&coloring, n, &engine)? {
            MonochromaticResult::Found(..) => true,
            MonochromaticResult::Absent => false,
            MonochromaticResult::Inconclusive => unreachable!("no budget configured"),
        };
        if options.cross_check {
            let naive_hit = naive_monochromatic(&coloring, n)?.is_some();
            if naive_hit != engine_hit {
                return Err(Error::OracleDisagreement(format!(
                    "coloring {mask:#x} of 2^[{m}], n = {n}: engine says {engine_hit}, naive says {naive_hit}"
                )));
            }
        }
        Ok(!engine_hit)
    };

    let winner = (0..total)
        .into_par_iter()
        .filter(|&mask| tested(mask))
        .map(|mask| good(mask).map(|g| g.then_some(mask)))
        .find_first(|r| !matches!(r, Ok(None)));
    let winner = match winner {
        Some(Err(e)) => return Err(e),
        Some(Ok(found)) => found,
        None => None,
    };

    let limit = winner.map_or(total, |w| w + 1);
    let colorings_checked = if options.symmetry_reduction {
        (0..limit).into_par_iter().filter(|&mask| tested(mask)).count() as u64
    } else {
        u64::from(limit)
    };
    Ok(BruteForceResult {
        n,
        m,
        good_coloring: winner.map(|mask| coloring_from_mask(m, mask)).transpose()?,
        colorings_checked,
        symmetry_reduced: options.symmetry_reduction,
    })
}

#[derive(Clone, Debug)]
pub struct RamseyOutcome {
    pub n: u32,
    pub max_m: u32,
    /// Least `m` for which every coloring of `2^[m]` has a monochromatic
    /// copy of `2^[n]`; `None` if no probed `m` qualifies.
    pub value: Option<u32>,
    pub probes: Vec<BruteForceResult>,
}

/// Probes `m = 1, 2, ..., max_m` independently and stops at the first `m`
/// with no good coloring.
pub fn ramsey_bruteforce(n: u32, max_m: u32, options: BruteForceOptions) -> Result<RamseyOutcome> {
    let mut probes = Vec::new();
    for m in 1..=max_m {
        let probe = exists_good_coloring(n, m, options)?;
        let settled = probe.good_coloring.is_none();
        probes.push(probe);
        if settled {
            return Ok(RamseyOutcome {
                n,
                max_m,
                value: Some(m),
                probes,
            });
        }
    }
    Ok(RamseyOutcome {
        n,
        max_m,
        value: None,
        probes,
    })
}
