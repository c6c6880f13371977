/// Fixed-capacity bitset over `0..len`, stored as 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Bitset {
    words: Vec<u64>,
    len: usize,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bitset { words: vec![!0; len.div_ceil(64)], len };
        b.trim();
        b
    }

    /// Bits `start..len` set.
    pub fn from_index(len: usize, start: usize) -> Self {
        let mut b = Bitset::full(len);
        for w in 0..(start / 64).min(b.words.len()) {
            b.words[w] = 0;
        }
        if start / 64 < b.words.len() {
            b.words[start / 64] &= !0u64 << (start % 64);
        }
        b
    }

    pub fn from_indices(len: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut b = Bitset::new(len);
        for i in it {
            b.insert(i);
        }
        b
    }

    fn trim(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    #[inline]
    pub fn intersect_with(&mut self, other: &Bitset) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    #[inline]
    pub fn difference_with(&mut self, other: &Bitset) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
    }

    pub fn union_with(&mut self, other: &Bitset) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn intersection(&self, other: &Bitset) -> Bitset {
        let mut r = self.clone();
        r.intersect_with(other);
        r
    }

    pub fn intersection_count(&self, other: &Bitset) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn complement(&self) -> Bitset {
        let mut r = Bitset { words: self.words.iter().map(|w| !w).collect(), len: self.len };
        r.trim();
        r
    }

    /// Ascending iterator over set bits.
    pub fn iter(&self) -> Ones<'_> {
        Ones { words: &self.words, idx: 0, cur: self.words.first().copied().unwrap_or(0) }
    }
}

pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let mut b = Bitset::new(130);
        b.insert(0);
        b.insert(64);
        b.insert(129);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(b.count(), 3);
        assert_eq!(b.complement().count(), 127);
        assert_eq!(Bitset::full(130).count(), 130);
        assert_eq!(Bitset::from_index(130, 65).count(), 65);
        assert_eq!(Bitset::from_index(130, 65).first(), Some(65));
        b.remove(0);
        assert_eq!(b.first(), Some(64));
    }
}
