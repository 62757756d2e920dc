//! Decision procedures for the four structural properties of a family
//! `F ⊆ 2^[2n]` and for their conjunction ("restrictive").
//!
//! Each checker scans its cardinality band layer by layer and reports the
//! violating member with the lowest encoding, so sequential and parallel
//! scans agree on the witness.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::lattice::{has_pair, missed_pair_count, CubeSpace, ElementSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    PairEnforcing,
    MissForbidding,
    NotTooHigh,
    FlipSusceptible,
}

impl Property {
    pub const ALL: [Property; 4] = [
        Property::PairEnforcing,
        Property::MissForbidding,
        Property::NotTooHigh,
        Property::FlipSusceptible,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::PairEnforcing => "pair-enforcing",
            Property::MissForbidding => "miss-forbidding",
            Property::NotTooHigh => "not-too-high",
            Property::FlipSusceptible => "flip-susceptible",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Witness {
    Set(ElementSet),
    /// Two flip-neighbouring transversals, lower encoding first.
    Pair(ElementSet, ElementSet),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Set(s) => write!(f, "{s}"),
            Witness::Pair(a, b) => write!(f, "{a} {b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: Property,
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Sets (or transversals) examined.
    pub checked_count: u64,
}

impl PropertyReport {
    fn from_scan(property: Property, witness: Option<Witness>, checked_count: u64) -> Self {
        PropertyReport {
            property,
            holds: witness.is_none(),
            witness,
            checked_count,
        }
    }
}

/// Outcome of all four checks, in the order of [`Property::ALL`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictiveReport {
    pub parts: Vec<PropertyReport>,
}

impl RestrictiveReport {
    pub fn holds(&self) -> bool {
        self.parts.iter().all(|p| p.holds)
    }

    pub fn first_failure(&self) -> Option<&PropertyReport> {
        self.parts.iter().find(|p| !p.holds)
    }

    pub fn witness(&self) -> Option<Witness> {
        self.first_failure().and_then(|p| p.witness)
    }
}

fn paired_space(family: &SetFamily, n: u32) -> Result<CubeSpace> {
    let space = CubeSpace::paired(n)?;
    if family.space().ground_size() != space.ground_size() {
        return Err(Error::Usage(format!(
            "family over [{}] checked with n = {n}; expected ground set [{}]",
            family.space().ground_size(),
            2 * n
        )));
    }
    Ok(space)
}

/// Lowest-encoded member of `family` in layers `sizes` that satisfies `bad`,
/// plus the number of sets examined.
fn scan_band<F>(family: &SetFamily, space: CubeSpace, sizes: std::ops::RangeInclusive<u32>, bad: F) -> (Option<ElementSet>, u64)
where
    F: Fn(ElementSet) -> bool + Sync,
{
    let sizes: Vec<u32> = sizes.filter(|&k| k <= space.ground_size()).collect();
    sizes
        .into_par_iter()
        .map(|k| {
            let mut first = None;
            let mut count = 0u64;
            for s in space.iterate_layer(k).expect("layer within ground set") {
                count += 1;
                if first.is_none() && family.contains_bits(s.bits()) && bad(s) {
                    first = Some(s);
                }
            }
            (first, count)
        })
        .reduce(
            || (None, 0),
            |(a, ca), (b, cb)| {
                let first = match (a, b) {
                    (Some(x), Some(y)) => Some(if x.bits() <= y.bits() { x } else { y }),
                    (x, None) => x,
                    (None, y) => y,
                };
                (first, ca + cb)
            },
        )
}

/// Members with `ceil(n/2) <= |S| < n` must contain a pair.
pub fn is_pair_enforcing(family: &SetFamily, n: u32) -> Result<PropertyReport> {
    let space = paired_space(family, n)?;
    let band = n.div_ceil(2)..=n - 1;
    let (witness, count) = scan_band(family, space, band, |s| !has_pair(s.bits()));
    Ok(PropertyReport::from_scan(Property::PairEnforcing, witness.map(Witness::Set), count))
}

/// Members with `n < |S| <= n + floor(n/2)` must miss no pair.
pub fn is_miss_forbidding(family: &SetFamily, n: u32) -> Result<PropertyReport> {
    let space = paired_space(family, n)?;
    let (witness, count) = scan_band(family, space, n + 1..=n + n / 2, |s| {
        missed_pair_count(s.bits(), n) != 0
    });
    Ok(PropertyReport::from_scan(Property::MissForbidding, witness.map(Witness::Set), count))
}

/// No member may exceed `n + floor(n/2)` elements.
pub fn is_not_too_high(family: &SetFamily, n: u32) -> Result<PropertyReport> {
    let space = paired_space(family, n)?;
    let (witness, count) = scan_band(family, space, n + n / 2 + 1..=2 * n, |_| true);
    Ok(PropertyReport::from_scan(Property::NotTooHigh, witness.map(Witness::Set), count))
}

/// Transversal with choice vector `choice`: bit `i` selects the upper
/// element `2i+2` of pair `i+1` instead of the lower `2i+1`.
#[inline]
pub(crate) fn transversal_bits(choice: u32, n: u32) -> u32 {
    let mut bits = 0u32;
    for i in 0..n {
        bits |= 1 << (2 * i + ((choice >> i) & 1));
    }
    bits
}

/// No two members may be transversals differing in a single pair.
///
/// Two pair-free `n`-sets whose union has `n + 1` elements are necessarily
/// transversals that disagree on exactly one pair, so it suffices to walk
/// the `2^n` transversals and their `n` flip neighbours. Transversal
/// encodings increase with the choice vector, so the first hit in choice
/// order is also the lowest-encoded witness.
pub fn is_flip_susceptible(family: &SetFamily, n: u32) -> Result<PropertyReport> {
    paired_space(family, n)?;
    let total = 1u64 << n;
    let witness = (0..total)
        .into_par_iter()
        .find_map_first(|choice| {
            let choice = choice as u32;
            let lower = transversal_bits(choice, n);
            if !family.contains_bits(lower) {
                return None;
            }
            (0..n).filter(|i| choice >> i & 1 == 0).find_map(|i| {
                let upper = transversal_bits(choice | 1 << i, n);
                family.contains_bits(upper).then(|| {
                    Witness::Pair(
                        ElementSet::from_raw(lower, 2 * n),
                        ElementSet::from_raw(upper, 2 * n),
                    )
                })
            })
        });
    let report = PropertyReport::from_scan(Property::FlipSusceptible, witness, total);
    #[cfg(debug_assertions)]
    if n <= 4 {
        debug_assert_eq!(report.holds, is_flip_susceptible_literal(family, n)?.holds);
    }
    Ok(report)
}

/// Direct quantification over all pairs of `n`-sets. Exponentially slower;
/// kept as a cross-check for small `n`.
pub fn is_flip_susceptible_literal(family: &SetFamily, n: u32) -> Result<PropertyReport> {
    let space = paired_space(family, n)?;
    let layer: Vec<ElementSet> = space.iterate_layer(n)?.collect();
    let mut checked = 0u64;
    for (i, &a) in layer.iter().enumerate() {
        for &b in &layer[i + 1..] {
            checked += 1;
            if !has_pair(a.bits())
                && !has_pair(b.bits())
                && (a.bits() | b.bits()).count_ones() == n + 1
                && family.contains(a)
                && family.contains(b)
            {
                return Ok(PropertyReport::from_scan(
                    Property::FlipSusceptible,
                    Some(Witness::Pair(a, b)),
                    checked,
                ));
            }
        }
    }
    Ok(PropertyReport::from_scan(Property::FlipSusceptible, None, checked))
}

pub fn check_property(family: &SetFamily, n: u32, property: Property) -> Result<PropertyReport> {
    match property {
        Property::PairEnforcing => is_pair_enforcing(family, n),
        Property::MissForbidding => is_miss_forbidding(family, n),
        Property::NotTooHigh => is_not_too_high(family, n),
        Property::FlipSusceptible => is_flip_susceptible(family, n),
    }
}

pub fn is_restrictive(family: &SetFamily, n: u32) -> Result<RestrictiveReport> {
    let parts = Property::ALL
        .iter()
        .map(|&p| check_property(family, n, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(RestrictiveReport { parts })
}

/// Whether `witness` genuinely violates `property` in `family`. Used to
/// re-check failing reports independently of the scanners.
pub fn witness_violates(family: &SetFamily, n: u32, property: Property, witness: Witness) -> bool {
    let in_family = |s: ElementSet| s.ground_size() == 2 * n && family.contains(s);
    match (property, witness) {
        (Property::PairEnforcing, Witness::Set(s)) => {
            let size = s.cardinality();
            in_family(s) && size >= n.div_ceil(2) && size < n && !has_pair(s.bits())
        }
        (Property::MissForbidding, Witness::Set(s)) => {
            let size = s.cardinality();
            in_family(s) && size > n && size <= n + n / 2 && missed_pair_count(s.bits(), n) > 0
        }
        (Property::NotTooHigh, Witness::Set(s)) => in_family(s) && s.cardinality() > n + n / 2,
        (Property::FlipSusceptible, Witness::Pair(a, b)) => {
            a != b
                && in_family(a)
                && in_family(b)
                && a.cardinality() == n
                && b.cardinality() == n
                && (a.bits() | b.bits()).count_ones() == n + 1
                && !has_pair(a.bits())
                && !has_pair(b.bits())
        }
        _ => false,
    }
}

/// Grows `s` to a set of size `n + floor(n/2)` with exactly `floor(n/2)`
/// pairs that misses no pair. Such a set can be added to any restrictive
/// family without breaking any of the four properties.
///
/// Choice rule: complete the singles of `s` into pairs in ascending pair
/// order until there are `floor(n/2)` pairs, taking untouched pairs (lowest
/// first) if the singles run out; then add the lower element of every pair
/// still missed.
pub fn extend_to_maximal(family: &SetFamily, s: ElementSet, n: u32) -> Result<ElementSet> {
    let space = paired_space(family, n)?;
    if !family.contains(s) {
        return Err(Error::Precondition(format!("{s} is not a member of the family")));
    }
    let target = n / 2;
    let (pairs, _) = space.count_pairs_singles(s)?;
    if pairs > target {
        return Err(Error::Precondition(format!(
            "{s} has {pairs} pairs, more than floor({n}/2) = {target}; a restrictive family cannot contain it"
        )));
    }
    let mut bits = s.bits();
    let pair_mask = |i: u32| 0b11u32 << (2 * i);
    let mut have = pairs;
    for i in 0..n {
        if have == target {
            break;
        }
        let p = bits & pair_mask(i);
        if p != 0 && p != pair_mask(i) {
            bits |= pair_mask(i);
            have += 1;
        }
    }
    for i in 0..n {
        if have == target {
            break;
        }
        if bits & pair_mask(i) == 0 {
            bits |= pair_mask(i);
            have += 1;
        }
    }
    for i in 0..n {
        if bits & pair_mask(i) == 0 {
            bits |= 1 << (2 * i);
        }
    }
    Ok(ElementSet::from_raw(bits, 2 * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{Color, Coloring};
    use crate::lattice::ground_mask;
    use proptest::prelude::*;

    fn set(elements: &[u32], m: u32) -> ElementSet {
        ElementSet::from_elements(elements, m).unwrap()
    }

    fn family(n: u32, sets: &[&[u32]]) -> SetFamily {
        let space = CubeSpace::paired(n).unwrap();
        SetFamily::from_sets(space, sets.iter().map(|e| set(e, 2 * n))).unwrap()
    }

    fn red_c0(n: u32) -> SetFamily {
        Coloring::c0(n).unwrap().color_class(Color::Red)
    }

    #[test]
    fn c0_red_class_is_restrictive() {
        let report = is_restrictive(&red_c0(4), 4).unwrap();
        assert!(report.holds(), "{report:?}");
        let dual = Coloring::c0(4).unwrap().dual().color_class(Color::Red);
        assert!(is_restrictive(&dual, 4).unwrap().holds());
    }

    #[test]
    fn pair_enforcing_examples() {
        let r = is_pair_enforcing(&family(4, &[&[1, 3]]), 4).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some(Witness::Set(set(&[1, 3], 8))));
        assert!(is_pair_enforcing(&family(4, &[]), 4).unwrap().holds);
        assert!(is_pair_enforcing(&family(4, &[&[1, 2, 3]]), 4).unwrap().holds);
    }

    #[test]
    fn miss_forbidding_examples() {
        let r = is_miss_forbidding(&family(4, &[&[1, 2, 3, 4, 5]]), 4).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some(Witness::Set(set(&[1, 2, 3, 4, 5], 8))));
        assert!(is_miss_forbidding(&family(4, &[&[1, 2, 3, 4, 5, 6, 7, 8]]), 4).unwrap().holds);
        assert!(is_miss_forbidding(&red_c0(4), 4).unwrap().holds);
    }

    #[test]
    fn not_too_high_examples() {
        let r = is_not_too_high(&family(4, &[&[1, 2, 3, 4, 5, 6, 7, 8]]), 4).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some(Witness::Set(set(&[1, 2, 3, 4, 5, 6, 7, 8], 8))));
        assert!(is_not_too_high(&family(4, &[]), 4).unwrap().holds);
        let red = red_c0(4);
        assert!(is_not_too_high(&red, 4).unwrap().holds);
        assert_eq!(red.iter().map(|s| s.cardinality()).max(), Some(6));
    }

    #[test]
    fn flip_susceptible_examples() {
        let r = is_flip_susceptible(&family(4, &[&[1, 3, 5, 7], &[2, 3, 5, 7]]), 4).unwrap();
        assert!(!r.holds);
        assert_eq!(
            r.witness,
            Some(Witness::Pair(set(&[1, 3, 5, 7], 8), set(&[2, 3, 5, 7], 8)))
        );
        assert!(is_flip_susceptible(&family(4, &[&[1, 3, 5, 7]]), 4).unwrap().holds);
        for n in 1..=12 {
            assert!(is_flip_susceptible(&red_c0(n), n).unwrap().holds);
        }
    }

    #[test]
    fn full_cube_is_not_restrictive() {
        let full = SetFamily::full(CubeSpace::paired(4).unwrap());
        let report = is_restrictive(&full, 4).unwrap();
        assert!(!report.holds());
        let not_too_high = &report.parts[2];
        assert!(!not_too_high.holds);
    }

    #[test]
    fn wrong_ground_set_is_usage_error() {
        let f = SetFamily::empty(CubeSpace::plain(7).unwrap());
        assert!(matches!(is_pair_enforcing(&f, 4), Err(Error::Usage(_))));
        assert!(matches!(is_restrictive(&f, 4), Err(Error::Usage(_))));
    }

    #[test]
    fn restrictive_for_all_small_n() {
        for n in 1..=12 {
            let c = Coloring::c0(n).unwrap();
            assert!(is_restrictive(&c.color_class(Color::Red), n).unwrap().holds(), "n={n}");
            assert!(is_restrictive(&c.dual().color_class(Color::Red), n).unwrap().holds(), "dual n={n}");
        }
    }

    #[test]
    fn parity_classes_of_transversals_are_flip_susceptible() {
        for n in 1..=10 {
            let space = CubeSpace::paired(n).unwrap();
            for parity in [crate::lattice::Parity::Even, crate::lattice::Parity::Odd] {
                let f = SetFamily::from_predicate(space, |s| {
                    s.cardinality() == n && !has_pair(s.bits()) && s.element_sum_parity() == parity
                });
                assert!(is_flip_susceptible(&f, n).unwrap().holds);
            }
        }
    }

    #[test]
    fn literal_flip_check_agrees() {
        for n in 1..=4 {
            let space = CubeSpace::paired(n).unwrap();
            let all_transversals = SetFamily::from_predicate(space, |s| s.cardinality() == n && !has_pair(s.bits()));
            let fast = is_flip_susceptible(&all_transversals, n).unwrap();
            let slow = is_flip_susceptible_literal(&all_transversals, n).unwrap();
            assert!(!fast.holds && !slow.holds);
            assert_eq!(fast.witness, slow.witness);
            assert!(is_flip_susceptible_literal(&red_c0(n), n).unwrap().holds);
        }
    }

    #[test]
    fn extend_examples() {
        let red = red_c0(4);
        assert_eq!(
            extend_to_maximal(&red, set(&[1, 2, 3], 8), 4).unwrap(),
            set(&[1, 2, 3, 4, 5, 7], 8)
        );
        assert_eq!(
            extend_to_maximal(&red, set(&[1, 2, 3, 4, 5, 7], 8), 4).unwrap(),
            set(&[1, 2, 3, 4, 5, 7], 8)
        );
        let f = family(4, &[&[1, 2, 3, 4, 5, 6]]);
        assert!(matches!(
            extend_to_maximal(&f, set(&[1, 2, 3, 4, 5, 6], 8), 4),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            extend_to_maximal(&red, set(&[1, 3], 8), 4),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn extend_uses_fresh_pairs_when_singles_run_out() {
        // {1} has one single; floor(6/2) = 3 pairs needed.
        let f = family(6, &[&[1]]);
        let out = extend_to_maximal(&f, set(&[1], 12), 6).unwrap();
        assert_eq!(out, set(&[1, 2, 3, 4, 5, 6, 7, 9, 11], 12));
    }

    fn random_family(n: u32, seed: u64, density: u32) -> SetFamily {
        let space = CubeSpace::paired(n).unwrap();
        SetFamily::from_predicate(space, |s| {
            let h = (u64::from(s.bits()) ^ seed).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            (h >> 40) as u32 % 100 < density
        })
    }

    proptest! {
        #[test]
        fn witnesses_are_genuine(n in 1u32..=5, seed in any::<u64>(), density in 0u32..=100) {
            let f = random_family(n, seed, density);
            for report in is_restrictive(&f, n).unwrap().parts {
                match report.witness {
                    None => prop_assert!(report.holds),
                    Some(w) => prop_assert!(witness_violates(&f, n, report.property, w)),
                }
            }
        }

        #[test]
        fn properties_are_downward_closed(n in 2u32..=5, drop_seed in any::<u64>()) {
            let red = red_c0(n);
            let thinned = SetFamily::from_predicate(red.space(), |s| {
                red.contains(s) && (u64::from(s.bits()) ^ drop_seed).wrapping_mul(0x2545_F491_4F6C_DD1D) >> 63 == 0
            });
            prop_assert!(is_restrictive(&thinned, n).unwrap().holds());
        }

        #[test]
        fn extension_post_conditions(n in 1u32..=8, raw in any::<u32>()) {
            let red = red_c0(n);
            let s = ElementSet::new(raw & ground_mask(2 * n), 2 * n).unwrap();
            prop_assume!(red.contains(s));
            let out = extend_to_maximal(&red, s, n).unwrap();
            let space = CubeSpace::paired(n).unwrap();
            prop_assert_eq!(out.cardinality(), n + n / 2);
            prop_assert_eq!(space.count_pairs_singles(out).unwrap().0, n / 2);
            prop_assert!(space.missed_pairs(out).unwrap().is_empty());
            prop_assert!(s.is_subset_of(out));
        }
    }
}
