//! Subsets of a small ground set `[m] = {1, ..., m}` encoded as machine words,
//! together with the pairing structure `{1,2}, {3,4}, ...` of `[2n]`.
//!
//! Element `j` lives at bit `j - 1`. Every set fits in a `u32`, so `m <= 32`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_GROUND: u32 = 32;

/// Bits `0, 2, 4, ...`: the lower (odd-numbered) element of every pair.
const LOWER_ELEMENTS: u32 = 0x5555_5555;

/// Mask with the lowest `m` bits set.
#[inline]
pub const fn ground_mask(m: u32) -> u32 {
    if m >= 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

/// A subset of `[m]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    bits: u32,
    m: u8,
}

impl ElementSet {
    /// Wraps a raw encoding. Fails if `m` is out of range or a bit at
    /// position `>= m` is set.
    pub fn new(bits: u32, m: u32) -> Result<Self> {
        check_ground(m)?;
        if bits & !ground_mask(m) != 0 {
            return Err(Error::Domain(format!(
                "encoding {bits:#x} has bits outside a ground set of size {m}"
            )));
        }
        Ok(ElementSet { bits, m: m as u8 })
    }

    /// Builds a set from 1-based element numbers.
    pub fn from_elements(elements: &[u32], m: u32) -> Result<Self> {
        check_ground(m)?;
        let mut bits = 0u32;
        for &e in elements {
            if e == 0 || e > m {
                return Err(Error::Domain(format!("element {e} is not in [1, {m}]")));
            }
            bits |= 1 << (e - 1);
        }
        Ok(ElementSet { bits, m: m as u8 })
    }

    pub fn empty(m: u32) -> Result<Self> {
        Self::new(0, m)
    }

    pub fn full(m: u32) -> Result<Self> {
        Self::new(ground_mask(m), m)
    }

    /// Caller guarantees `bits` lies within `[m]` and `1 <= m <= 32`.
    #[inline]
    pub(crate) fn from_raw(bits: u32, m: u32) -> Self {
        debug_assert!(bits & !ground_mask(m) == 0);
        ElementSet { bits, m: m as u8 }
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn ground_size(self) -> u32 {
        self.m as u32
    }

    #[inline]
    pub fn cardinality(self) -> u32 {
        self.bits.count_ones()
    }

    #[inline]
    pub fn contains(self, element: u32) -> bool {
        element >= 1 && element <= self.m as u32 && self.bits & (1 << (element - 1)) != 0
    }

    #[inline]
    pub fn is_subset_of(self, other: ElementSet) -> bool {
        self.bits & !other.bits == 0
    }

    /// Elements in increasing order.
    pub fn elements(self) -> impl Iterator<Item = u32> {
        let mut rest = self.bits;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let low = rest.trailing_zeros();
                rest &= rest - 1;
                Some(low + 1)
            }
        })
    }

    /// `[m] \ S`.
    pub fn complement(self) -> ElementSet {
        ElementSet {
            bits: !self.bits & ground_mask(self.m as u32),
            m: self.m,
        }
    }

    /// Parity of the sum of the elements. Only odd elements (bits 0, 2, ...)
    /// contribute to the parity.
    pub fn element_sum_parity(self) -> Parity {
        Parity::of((self.bits & LOWER_ELEMENTS).count_ones())
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}/{}", self.m)
    }
}

/// Parses the `{1,2,5}` rendering produced by `Display`.
pub fn parse_element_set(text: &str, m: u32) -> Result<ElementSet> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| Error::Domain(format!("expected a braced set, found {text:?}")))?;
    let mut elements = Vec::new();
    for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let e = part
            .parse::<u32>()
            .map_err(|_| Error::Domain(format!("bad element {part:?} in {text:?}")))?;
        elements.push(e);
    }
    ElementSet::from_elements(&elements, m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(value: u32) -> Parity {
        if value.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

fn check_ground(m: u32) -> Result<()> {
    if m == 0 || m > MAX_GROUND {
        return Err(Error::Domain(format!(
            "ground set size {m} outside [1, {MAX_GROUND}]"
        )));
    }
    Ok(())
}

/// The ambient cube `2^[m]`, optionally carrying the pairing of `[2n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CubeSpace {
    m: u32,
    n: Option<u32>,
}

impl CubeSpace {
    /// `2^[m]` with no pairing.
    pub fn plain(m: u32) -> Result<Self> {
        check_ground(m)?;
        Ok(CubeSpace { m, n: None })
    }

    /// `2^[2n]` with pairs `{2i-1, 2i}`.
    pub fn paired(n: u32) -> Result<Self> {
        if n == 0 || 2 * n > MAX_GROUND {
            return Err(Error::Domain(format!(
                "cube parameter {n} outside [1, {}]",
                MAX_GROUND / 2
            )));
        }
        Ok(CubeSpace { m: 2 * n, n: Some(n) })
    }

    /// Paired view of a plain space of even size.
    pub fn with_pairing(self) -> Result<Self> {
        if !self.m.is_multiple_of(2) {
            return Err(Error::Usage(format!(
                "ground set of odd size {} has no pairing",
                self.m
            )));
        }
        CubeSpace::paired(self.m / 2)
    }

    #[inline]
    pub fn ground_size(self) -> u32 {
        self.m
    }

    pub fn is_paired(self) -> bool {
        self.n.is_some()
    }

    /// Cube parameter `n` for a paired space.
    pub fn pair_count(self) -> Result<u32> {
        self.n
            .ok_or_else(|| Error::Usage(format!("space 2^[{}] carries no pairing", self.m)))
    }

    /// Number of sets in the cube, `2^m`.
    pub fn len(self) -> u64 {
        1u64 << self.m
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn set(self, bits: u32) -> Result<ElementSet> {
        ElementSet::new(bits, self.m)
    }

    pub fn empty_set(self) -> ElementSet {
        ElementSet::from_raw(0, self.m)
    }

    pub fn full_set(self) -> ElementSet {
        ElementSet::from_raw(ground_mask(self.m), self.m)
    }

    fn check_member(self, s: ElementSet) -> Result<()> {
        if s.ground_size() != self.m {
            return Err(Error::Usage(format!(
                "set over [{}] used in a space over [{}]",
                s.ground_size(),
                self.m
            )));
        }
        Ok(())
    }

    /// Index `ceil(a/2)` of the pair containing element `a`.
    pub fn pair_index(self, a: u32) -> Result<u32> {
        let n = self.pair_count()?;
        if a == 0 || a > 2 * n {
            return Err(Error::Domain(format!("element {a} not in [1, {}]", 2 * n)));
        }
        Ok(a.div_ceil(2))
    }

    /// The other element of `a`'s pair.
    pub fn partner(self, a: u32) -> Result<u32> {
        self.pair_index(a)?;
        Ok(if a % 2 == 1 { a + 1 } else { a - 1 })
    }

    /// `(pairs, singles)` of `s`: pairs fully inside `s`, and elements of
    /// `s` whose partner is absent.
    pub fn count_pairs_singles(self, s: ElementSet) -> Result<(u32, u32)> {
        self.pair_count()?;
        self.check_member(s)?;
        Ok(pair_profile(s.bits()))
    }

    /// Indices of the pairs disjoint from `s`, ascending.
    pub fn missed_pairs(self, s: ElementSet) -> Result<Vec<u32>> {
        let n = self.pair_count()?;
        self.check_member(s)?;
        let touched = touched_pairs(s.bits());
        Ok((0..n).filter(|i| touched & (1 << (2 * i)) == 0).map(|i| i + 1).collect())
    }

    pub fn complement(self, s: ElementSet) -> Result<ElementSet> {
        self.check_member(s)?;
        Ok(s.complement())
    }

    /// All `k`-subsets of `[m]` in increasing order of encoding.
    pub fn iterate_layer(self, k: u32) -> Result<LayerIter> {
        if k > self.m {
            return Err(Error::Domain(format!(
                "layer {k} does not exist in 2^[{}]",
                self.m
            )));
        }
        Ok(LayerIter::new(self.m, k))
    }
}

/// Pair/single counts of a raw encoding over `[2n]`.
#[inline]
pub(crate) fn pair_profile(bits: u32) -> (u32, u32) {
    let low = bits & LOWER_ELEMENTS;
    let high = (bits >> 1) & LOWER_ELEMENTS;
    ((low & high).count_ones(), (low ^ high).count_ones())
}

/// Bit `2(i-1)` set iff pair `i` meets the set.
#[inline]
pub(crate) fn touched_pairs(bits: u32) -> u32 {
    (bits | (bits >> 1)) & LOWER_ELEMENTS
}

#[inline]
pub(crate) fn has_pair(bits: u32) -> bool {
    bits & (bits >> 1) & LOWER_ELEMENTS != 0
}

/// Number of pairs among `1..=n` that `bits` misses.
#[inline]
pub(crate) fn missed_pair_count(bits: u32, n: u32) -> u32 {
    n - touched_pairs(bits).count_ones()
}

/// Gosper's-hack enumeration of one cardinality layer.
#[derive(Clone, Debug)]
pub struct LayerIter {
    m: u32,
    next: Option<u64>,
}

impl LayerIter {
    fn new(m: u32, k: u32) -> Self {
        LayerIter {
            m,
            next: Some((1u64 << k) - 1),
        }
    }
}

impl Iterator for LayerIter {
    type Item = ElementSet;

    fn next(&mut self) -> Option<ElementSet> {
        let current = self.next?;
        if current >> self.m != 0 {
            self.next = None;
            return None;
        }
        self.next = if current == 0 {
            None
        } else {
            let low = current & current.wrapping_neg();
            let ripple = current + low;
            Some((((ripple ^ current) >> 2) / low) | ripple)
        };
        Some(ElementSet::from_raw(current as u32, self.m))
    }
}
