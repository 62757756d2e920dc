//! Red/Blue colorings of `2^[m]`.
//!
//! Two schemes are built in: [`c0_color`], the construction on `2^[2n]` that
//! avoids monochromatic copies of `2^[n]` for `n >= 4`, and [`layered_color`],
//! which colors by cardinality parity.

use std::fmt;

use crate::bits::BitTable;
use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::lattice::{has_pair, missed_pair_count, CubeSpace, ElementSet, Parity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn flip(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Color::Red => 'R',
            Color::Blue => 'B',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Blue => "blue",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const SCHEME_C0: &str = "c0";
pub const SCHEME_LAYERED: &str = "layered";

/// The construction on `2^[2n]`, by cardinality band:
///
/// | `|S|`                        | Red iff                 |
/// |------------------------------|-------------------------|
/// | `< ceil(n/2)`                | always                  |
/// | `ceil(n/2) ..= n-1`          | `S` contains a pair     |
/// | `= n`                        | element sum is odd      |
/// | `n+1 ..= n + floor(n/2)`     | `S` misses no pair      |
/// | `> n + floor(n/2)`           | never                   |
///
/// `s` must be a subset of `[2n]`.
pub fn c0_color(s: ElementSet, n: u32) -> Color {
    debug_assert_eq!(s.ground_size(), 2 * n);
    let size = s.cardinality();
    let red = if size < n.div_ceil(2) {
        true
    } else if size < n {
        has_pair(s.bits())
    } else if size == n {
        s.element_sum_parity() == Parity::Odd
    } else if size <= n + n / 2 {
        missed_pair_count(s.bits(), n) == 0
    } else {
        false
    };
    if red {
        Color::Red
    } else {
        Color::Blue
    }
}

/// Red iff `|S|` is odd.
pub fn layered_color(s: ElementSet) -> Color {
    if s.cardinality() % 2 == 1 {
        Color::Red
    } else {
        Color::Blue
    }
}

/// A total coloring of `2^[m]`. Bit `i` of the table is set iff the set
/// with encoding `i` is Red.
///
/// Equality compares ground size, assignment and scheme label, but not
/// whether the space carries a pairing.
#[derive(Clone)]
pub struct Coloring {
    space: CubeSpace,
    red: BitTable,
    scheme: String,
}

impl Coloring {
    pub fn from_fn<F>(space: CubeSpace, scheme: impl Into<String>, color: F) -> Self
    where
        F: Fn(ElementSet) -> Color + Sync,
    {
        let m = space.ground_size();
        Coloring {
            space,
            red: BitTable::from_fn(space.len(), |i| {
                color(ElementSet::from_raw(i as u32, m)) == Color::Red
            }),
            scheme: scheme.into(),
        }
    }

    /// Coloring whose Red class is exactly `red`.
    pub fn from_red_class(red: &SetFamily, scheme: impl Into<String>) -> Self {
        let space = red.space();
        Coloring::from_fn(space, scheme, |s| if red.contains(s) { Color::Red } else { Color::Blue })
    }

    pub(crate) fn from_table(space: CubeSpace, red: BitTable, scheme: String) -> Self {
        Coloring { space, red, scheme }
    }

    /// `c0` on `2^[2n]`.
    pub fn c0(n: u32) -> Result<Self> {
        let space = CubeSpace::paired(n)?;
        Ok(Coloring::from_fn(space, SCHEME_C0, |s| c0_color(s, n)))
    }

    /// Parity-of-cardinality coloring on `2^[m]`.
    pub fn layered(m: u32) -> Result<Self> {
        let space = CubeSpace::plain(m)?;
        Ok(Coloring::from_fn(space, SCHEME_LAYERED, layered_color))
    }

    pub fn space(&self) -> CubeSpace {
        self.space
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn with_scheme(mut self, scheme: impl Into<String>) -> Self {
        self.scheme = scheme.into();
        self
    }

    pub fn color_of(&self, s: ElementSet) -> Result<Color> {
        if s.ground_size() != self.space.ground_size() {
            return Err(Error::Usage(format!(
                "set over [{}] queried in a coloring of 2^[{}]",
                s.ground_size(),
                self.space.ground_size()
            )));
        }
        Ok(self.color_of_bits(s.bits()))
    }

    #[inline]
    pub fn color_of_bits(&self, bits: u32) -> Color {
        if self.red.get(u64::from(bits)) {
            Color::Red
        } else {
            Color::Blue
        }
    }

    pub fn set_color(&mut self, s: ElementSet, color: Color) -> Result<()> {
        self.color_of(s)?;
        self.red.set(u64::from(s.bits()), color == Color::Red);
        Ok(())
    }

    /// `c'(S) = flip(c([m] \ S))`. An involution.
    pub fn dual(&self) -> Coloring {
        let m = self.space.ground_size();
        let mask = crate::lattice::ground_mask(m);
        Coloring {
            space: self.space,
            red: BitTable::from_fn(self.space.len(), |i| !self.red.get(u64::from(!(i as u32) & mask))),
            scheme: format!("dual({})", self.scheme),
        }
    }

    /// Swaps Red and Blue everywhere.
    pub fn swapped(&self) -> Coloring {
        Coloring {
            space: self.space,
            red: self.red.inverted(),
            scheme: format!("swap({})", self.scheme),
        }
    }

    /// All sets of the given color.
    pub fn color_class(&self, color: Color) -> SetFamily {
        let table = match color {
            Color::Red => self.red.clone(),
            Color::Blue => self.red.inverted(),
        };
        SetFamily::from_table(self.space, table)
    }

    /// Colors in encoded order, as `R`/`B` symbols.
    pub fn symbols(&self) -> impl Iterator<Item = char> + '_ {
        (0..self.space.len()).map(|i| if self.red.get(i) { 'R' } else { 'B' })
    }

    /// Equality of the assignments, ignoring the scheme label.
    pub fn same_assignment(&self, other: &Coloring) -> bool {
        self.space.ground_size() == other.space.ground_size() && self.red == other.red
    }
}

impl PartialEq for Coloring {
    fn eq(&self, other: &Coloring) -> bool {
        self.same_assignment(other) && self.scheme == other.scheme
    }
}

impl Eq for Coloring {}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Coloring(2^[{}], scheme={:?}, {} red)",
            self.space.ground_size(),
            self.scheme,
            self.red.count_ones()
        )
    }
}
