use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::graph::ArcId;

/// A set of arc ids backed by a growable bitset.
///
/// Ordering is lexicographic on the ascending id sequence, so `{0, 5} < {1}`
/// and `{0} < {0, 1}`. Every tie-break rule in the crate that talks about
/// "the lexicographically smallest set" relies on this order.
#[derive(Clone, Default)]
pub struct ArcSet {
    words: Vec<u64>,
}

impl ArcSet {
    pub fn new() -> Self {
        Self { words: Vec::new() }
    }

    pub fn with_capacity(arcs: usize) -> Self {
        Self {
            words: Vec::with_capacity(arcs.div_ceil(64)),
        }
    }

    /// All ids in `0..n`.
    pub fn full(n: usize) -> Self {
        let mut set = Self::with_capacity(n);
        for id in 0..n {
            set.insert(id);
        }
        set
    }

    pub fn insert(&mut self, id: ArcId) -> bool {
        let (w, b) = (id / 64, id % 64);
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, id: ArcId) -> bool {
        let (w, b) = (id / 64, id % 64);
        match self.words.get_mut(w) {
            Some(word) if *word & (1 << b) != 0 => {
                *word &= !(1 << b);
                true
            }
            _ => false,
        }
    }

    #[inline]
    pub fn contains(&self, id: ArcId) -> bool {
        self.words
            .get(id / 64)
            .is_some_and(|w| w & (1 << (id % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Ascending ids.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<ArcId> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &ArcSet) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn difference(&self, other: &ArcSet) -> ArcSet {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
        out
    }

    pub fn intersection(&self, other: &ArcSet) -> ArcSet {
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        ArcSet { words }
    }

    pub fn is_subset(&self, other: &ArcSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint(&self, other: &ArcSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    fn trimmed(&self) -> &[u64] {
        let end = self
            .words
            .iter()
            .rposition(|&w| w != 0)
            .map_or(0, |i| i + 1);
        &self.words[..end]
    }
}

impl FromIterator<ArcId> for ArcSet {
    fn from_iter<I: IntoIterator<Item = ArcId>>(iter: I) -> Self {
        let mut set = ArcSet::new();
        for id in iter {
            set.insert(id);
        }
        set
    }
}

impl<'a> FromIterator<&'a ArcId> for ArcSet {
    fn from_iter<I: IntoIterator<Item = &'a ArcId>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

impl Extend<ArcId> for ArcSet {
    fn extend<I: IntoIterator<Item = ArcId>>(&mut self, iter: I) {
        for id in iter {
            self.insert(id);
        }
    }
}

impl PartialEq for ArcSet {
    fn eq(&self, other: &Self) -> bool {
        self.trimmed() == other.trimmed()
    }
}

impl Eq for ArcSet {}

impl Hash for ArcSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.trimmed().hash(state);
    }
}

impl Ord for ArcSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for ArcSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// `{0,4,7}`; the form used by game logs.
impl fmt::Display for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = ArcId;

    fn next(&mut self) -> Option<ArcId> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * 64 + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a ArcSet {
    type Item = ArcId;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}
