//! Embeddings `f: 2^[n] -> 2^[m]` with `A ⊆ B ⟺ f(A) ⊆ f(B)`, and a checker
//! that re-derives every required property from the raw image table.

use std::fmt;

use crate::error::{Error, Result};
use crate::family::SetFamily;
use crate::lattice::{ground_mask, ElementSet};

/// Images of all `2^n` subsets of `[n]`; entry `i` is the image of the
/// subset encoded by `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Embedding {
    n: u32,
    m: u32,
    images: Vec<ElementSet>,
}

impl Embedding {
    pub fn new(n: u32, m: u32, images: Vec<ElementSet>) -> Result<Self> {
        if n > 20 {
            return Err(Error::Capacity(format!("source cube 2^[{n}] is too large")));
        }
        if images.len() != 1usize << n {
            return Err(Error::Structural(format!(
                "an embedding of 2^[{n}] needs {} images, got {}",
                1usize << n,
                images.len()
            )));
        }
        if let Some(bad) = images.iter().find(|s| s.ground_size() != m) {
            return Err(Error::Structural(format!(
                "image {bad} lives over [{}], expected [{m}]",
                bad.ground_size()
            )));
        }
        Ok(Embedding { n, m, images })
    }

    pub(crate) fn from_raw(n: u32, m: u32, images: &[u32]) -> Self {
        Embedding {
            n,
            m,
            images: images.iter().map(|&b| ElementSet::from_raw(b, m)).collect(),
        }
    }

    /// `f(S) = S` inside `2^[m]`.
    pub fn identity(n: u32, m: u32) -> Result<Self> {
        if n > m {
            return Err(Error::Domain(format!("2^[{n}] does not fit inside 2^[{m}]")));
        }
        let images = (0..1u32 << n).map(|s| ElementSet::new(s, m)).collect::<Result<_>>()?;
        Embedding::new(n, m, images)
    }

    pub fn source_size(&self) -> u32 {
        self.n
    }

    pub fn target_size(&self) -> u32 {
        self.m
    }

    pub fn images(&self) -> &[ElementSet] {
        &self.images
    }

    pub fn image(&self, source: u32) -> ElementSet {
        self.images[source as usize]
    }

    /// `f([n])`.
    pub fn top(&self) -> ElementSet {
        self.images[ground_mask(self.n) as usize]
    }

    pub fn bottom(&self) -> ElementSet {
        self.images[0]
    }

    /// `f([n] \ {a})` for `a = 1..=n`.
    pub fn top_children(&self) -> Vec<ElementSet> {
        let full = ground_mask(self.n);
        (0..self.n).map(|i| self.images[(full & !(1 << i)) as usize]).collect()
    }

    /// Sorted image sets; two embeddings with equal keys define the same copy.
    pub fn copy_key(&self) -> Vec<u32> {
        let mut key: Vec<u32> = self.images.iter().map(|s| s.bits()).collect();
        key.sort_unstable();
        key
    }

    /// `S -> f(S)` lines in source order.
    pub fn listing(&self) -> Vec<String> {
        (0..self.images.len())
            .map(|i| {
                let source = ElementSet::from_raw(i as u32, self.n.max(1));
                let source = if self.n == 0 { "{}".to_string() } else { source.to_string() };
                format!("{source} -> {}", self.images[i])
            })
            .collect()
    }

    /// Property violations are returned as `Err`; see [`Violation`].
    pub fn verify(&self, family: Option<&SetFamily>) -> std::result::Result<(), Violation> {
        verify_embedding(self, family)
    }
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding(2^[{}] -> 2^[{}]: ", self.n, self.m)?;
        f.debug_list().entries(self.images.iter()).finish()?;
        f.write_str(")")
    }
}

/// The first property an embedding fails. Sources are raw encodings of
/// subsets of `[n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Violation {
    NotInjective { a: u32, b: u32 },
    /// `a ⊆ b` and `f(a) ⊆ f(b)` disagree.
    Order { a: u32, b: u32 },
    /// `a ⊆ b` but `|f(b)| - |f(a)| < |b| - |a|`.
    CardinalityGap { a: u32, b: u32 },
    /// The top children indexed by `indices` meet in more than
    /// `|f([n])| - |indices|` elements.
    TopChildren { indices: u32 },
    NotInFamily { source: u32 },
}

impl Violation {
    pub fn describe(&self, n: u32) -> String {
        let s = |bits: u32| ElementSet::from_raw(bits, n.max(1)).to_string();
        match *self {
            Violation::NotInjective { a, b } => format!("images of {} and {} coincide", s(a), s(b)),
            Violation::Order { a, b } => format!("order not preserved between {} and {}", s(a), s(b)),
            Violation::CardinalityGap { a, b } => {
                format!("image sizes of {} ⊆ {} grow by less than the source", s(a), s(b))
            }
            Violation::TopChildren { indices } => {
                format!("top children indexed by {} intersect too much", s(indices))
            }
            Violation::NotInFamily { source } => format!("image of {} is not in the family", s(source)),
        }
    }
}

/// Checks injectivity, order isomorphism, the cardinality-gap bound for all
/// comparable pairs, the top-children intersection bound for all nonempty
/// index sets, and (if given) membership of every image in `family`.
pub fn verify_embedding(e: &Embedding, family: Option<&SetFamily>) -> std::result::Result<(), Violation> {
    let count = e.images.len() as u32;
    let img: Vec<u32> = e.images.iter().map(|s| s.bits()).collect();

    let mut sorted: Vec<(u32, u32)> = img.iter().copied().zip(0..).collect();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0].0 == w[1].0) {
        let (a, b) = (w[0].1.min(w[1].1), w[0].1.max(w[1].1));
        return Err(Violation::NotInjective { a, b });
    }

    for a in 0..count {
        for b in 0..count {
            let source_sub = a & !b == 0;
            let image_sub = img[a as usize] & !img[b as usize] == 0;
            if source_sub != image_sub {
                return Err(Violation::Order { a, b });
            }
        }
    }

    if let Some(v) = cardinality_gap_violation(e) {
        return Err(v);
    }
    if let Some(v) = top_children_violation(e) {
        return Err(v);
    }

    if let Some(family) = family {
        if family.space().ground_size() != e.m {
            return Err(Violation::NotInFamily { source: 0 });
        }
        if let Some(source) = (0..count).find(|&i| !family.contains_bits(img[i as usize])) {
            return Err(Violation::NotInFamily { source });
        }
    }
    Ok(())
}

/// `|f(B)| - |f(A)| >= |B| - |A|` for every `A ⊆ B`.
pub fn cardinality_gap_violation(e: &Embedding) -> Option<Violation> {
    let count = e.images.len() as u32;
    for b in 0..count {
        let fb = e.images[b as usize].cardinality() as i64;
        // enumerate submasks a of b
        let mut a = b;
        loop {
            let fa = e.images[a as usize].cardinality() as i64;
            if fb - fa < i64::from(b.count_ones()) - i64::from(a.count_ones()) {
                return Some(Violation::CardinalityGap { a, b });
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
    }
    None
}

/// `|⋂_{a∈I} f([n]∖{a})| <= |f([n])| - |I|` for every nonempty `I ⊆ [n]`.
pub fn top_children_violation(e: &Embedding) -> Option<Violation> {
    let n = e.n;
    if n == 0 {
        return None;
    }
    let children = e.top_children();
    let top = e.top().cardinality();
    let mut meet = vec![0u32; 1 << n];
    meet[0] = ground_mask(e.m);
    for indices in 1u32..1 << n {
        let low = indices.trailing_zeros();
        meet[indices as usize] = meet[(indices & (indices - 1)) as usize] & children[low as usize].bits();
        let size = meet[indices as usize].count_ones();
        if size + indices.count_ones() > top {
            return Some(Violation::TopChildren { indices });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::CubeSpace;

    #[test]
    fn identity_is_valid() {
        for (n, m) in [(1, 1), (2, 2), (2, 5), (3, 3), (4, 7)] {
            let e = Embedding::identity(n, m).unwrap();
            assert_eq!(e.verify(None), Ok(()));
            let full = SetFamily::full(CubeSpace::plain(m).unwrap());
            assert_eq!(e.verify(Some(&full)), Ok(()));
        }
    }

    #[test]
    fn uniform_augmentation_is_valid() {
        let (n, m) = (3, 5);
        let images = (0..8u32).map(|s| ElementSet::new(s | 1 << (m - 1), m).unwrap()).collect();
        let e = Embedding::new(n, m, images).unwrap();
        assert_eq!(e.verify(None), Ok(()));
    }

    #[test]
    fn reversed_pair_is_an_order_violation() {
        let images = vec![ElementSet::new(1, 1).unwrap(), ElementSet::new(0, 1).unwrap()];
        let e = Embedding::new(1, 1, images).unwrap();
        assert!(matches!(e.verify(None), Err(Violation::Order { .. })));
    }

    #[test]
    fn structural_errors() {
        let one = ElementSet::new(0, 2).unwrap();
        assert!(matches!(Embedding::new(1, 2, vec![one]), Err(Error::Structural(_))));
        let other = ElementSet::new(0, 3).unwrap();
        assert!(matches!(Embedding::new(1, 2, vec![one, other]), Err(Error::Structural(_))));
    }

    #[test]
    fn repeated_image_is_not_injective() {
        let s = |b| ElementSet::new(b, 2).unwrap();
        let e = Embedding::new(1, 2, vec![s(1), s(1)]).unwrap();
        assert_eq!(e.verify(None), Err(Violation::NotInjective { a: 0, b: 1 }));
    }

    #[test]
    fn membership_is_checked() {
        let e = Embedding::identity(2, 2).unwrap();
        let mut f = SetFamily::full(CubeSpace::plain(2).unwrap());
        f.remove(ElementSet::new(0b10, 2).unwrap()).unwrap();
        assert_eq!(e.verify(Some(&f)), Err(Violation::NotInFamily { source: 0b10 }));
    }

    #[test]
    fn listing_format() {
        let e = Embedding::identity(1, 2).unwrap();
        assert_eq!(e.listing(), vec!["{} -> {}", "{1} -> {1}"]);
    }

    #[test]
    fn lemma_checks_accept_a_non_join_copy() {
        // f(S) = S ∪ {extra element per singleton}: f({1}) = {1,3}, f({2}) = {2,4},
        // f({1,2}) = {1,2,3,4,5}. Not union-respecting at the top, still a copy.
        let s = |e: &[u32]| ElementSet::from_elements(e, 5).unwrap();
        let e = Embedding::new(2, 5, vec![s(&[]), s(&[1, 3]), s(&[2, 4]), s(&[1, 2, 3, 4, 5])]).unwrap();
        assert_eq!(e.verify(None), Ok(()));
        assert!(cardinality_gap_violation(&e).is_none());
        assert!(top_children_violation(&e).is_none());
    }
}
