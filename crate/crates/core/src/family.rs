use std::fmt;

use crate::bits::BitTable;
use crate::error::{Error, Result};
use crate::lattice::{CubeSpace, ElementSet};

/// An arbitrary collection of subsets of `[m]`, stored as a membership
/// bitset over all `2^m` encodings. Equality ignores the pairing flag.
#[derive(Clone)]
pub struct SetFamily {
    space: CubeSpace,
    members: BitTable,
}

impl SetFamily {
    pub fn empty(space: CubeSpace) -> Self {
        SetFamily {
            space,
            members: BitTable::zeros(space.len()),
        }
    }

    /// The whole cube `2^[m]`.
    pub fn full(space: CubeSpace) -> Self {
        SetFamily {
            space,
            members: BitTable::zeros(space.len()).inverted(),
        }
    }

    pub fn from_sets<I>(space: CubeSpace, sets: I) -> Result<Self>
    where
        I: IntoIterator<Item = ElementSet>,
    {
        let mut family = SetFamily::empty(space);
        for s in sets {
            family.insert(s)?;
        }
        Ok(family)
    }

    /// Family of all sets satisfying `pred`, built in parallel.
    pub fn from_predicate<F>(space: CubeSpace, pred: F) -> Self
    where
        F: Fn(ElementSet) -> bool + Sync,
    {
        let m = space.ground_size();
        SetFamily {
            space,
            members: BitTable::from_fn(space.len(), |i| pred(ElementSet::from_raw(i as u32, m))),
        }
    }

    pub(crate) fn from_table(space: CubeSpace, members: BitTable) -> Self {
        debug_assert_eq!(members.len(), space.len());
        SetFamily { space, members }
    }

    pub fn space(&self) -> CubeSpace {
        self.space
    }

    /// Same members, viewed in a different space over the same ground set
    /// (typically to attach the pairing structure).
    pub fn in_space(mut self, space: CubeSpace) -> Result<Self> {
        if space.ground_size() != self.space.ground_size() {
            return Err(Error::Usage(format!(
                "cannot move a family over [{}] into 2^[{}]",
                self.space.ground_size(),
                space.ground_size()
            )));
        }
        self.space = space;
        Ok(self)
    }

    #[inline]
    pub fn contains(&self, s: ElementSet) -> bool {
        s.ground_size() == self.space.ground_size() && self.members.get(u64::from(s.bits()))
    }

    /// Membership by raw encoding; `bits` must lie within `[m]`.
    #[inline]
    pub fn contains_bits(&self, bits: u32) -> bool {
        self.members.get(u64::from(bits))
    }

    pub fn insert(&mut self, s: ElementSet) -> Result<()> {
        self.check(s)?;
        self.members.set(u64::from(s.bits()), true);
        Ok(())
    }

    pub fn remove(&mut self, s: ElementSet) -> Result<()> {
        self.check(s)?;
        self.members.set(u64::from(s.bits()), false);
        Ok(())
    }

    fn check(&self, s: ElementSet) -> Result<()> {
        if s.ground_size() != self.space.ground_size() {
            return Err(Error::Usage(format!(
                "set over [{}] does not belong to 2^[{}]",
                s.ground_size(),
                self.space.ground_size()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> u64 {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Members in increasing encoded order.
    pub fn iter(&self) -> impl Iterator<Item = ElementSet> + '_ {
        let m = self.space.ground_size();
        self.members.ones().map(move |i| ElementSet::from_raw(i as u32, m))
    }

    /// `{ [m] \ S : S in F }`.
    pub fn complemented(&self) -> SetFamily {
        let m = self.space.ground_size();
        let mask = crate::lattice::ground_mask(m);
        SetFamily {
            space: self.space,
            members: BitTable::from_fn(self.space.len(), |i| {
                self.members.get(u64::from(!(i as u32) & mask))
            }),
        }
    }

    /// `2^[m] \ F`.
    pub fn inverted(&self) -> SetFamily {
        SetFamily {
            space: self.space,
            members: self.members.inverted(),
        }
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.space.ground_size() == other.space.ground_size() && self.iter().all(|s| other.contains(s))
    }
}

impl PartialEq for SetFamily {
    fn eq(&self, other: &SetFamily) -> bool {
        self.space.ground_size() == other.space.ground_size() && self.members == other.members
    }
}

impl Eq for SetFamily {}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily(2^[{}], {} members)", self.space.ground_size(), self.len())
    }
}
