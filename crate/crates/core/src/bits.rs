use rayon::prelude::*;

/// Dense bitset over `0..len`, one bit per encoded set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct BitTable {
    words: Vec<u64>,
    len: u64,
}

impl BitTable {
    pub fn zeros(len: u64) -> Self {
        BitTable {
            words: vec![0; len.div_ceil(64) as usize],
            len,
        }
    }

    /// Builds the table in parallel, one word per task. Identical to a
    /// sequential fill.
    pub fn from_fn<F>(len: u64, f: F) -> Self
    where
        F: Fn(u64) -> bool + Sync,
    {
        let words = (0..len.div_ceil(64))
            .into_par_iter()
            .map(|w| {
                let base = w * 64;
                let end = (base + 64).min(len);
                (base..end).fold(0u64, |acc, i| acc | (u64::from(f(i)) << (i - base)))
            })
            .collect();
        BitTable { words, len }
    }

    #[inline]
    pub fn len(&self) -> u64 {
        self.len
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        debug_assert!(i < self.len);
        self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: u64, value: bool) {
        debug_assert!(i < self.len);
        let word = &mut self.words[(i / 64) as usize];
        if value {
            *word |= 1 << (i % 64);
        } else {
            *word &= !(1 << (i % 64));
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Bitwise complement restricted to `0..len`.
    pub fn inverted(&self) -> Self {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        BitTable { words, len: self.len }
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let low = rest.trailing_zeros() as u64;
                    rest &= rest - 1;
                    Some(w as u64 * 64 + low)
                }
            })
        })
    }
}
