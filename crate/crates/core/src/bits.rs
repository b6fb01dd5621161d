//! Dense bit-packed grid, row-major. All algorithms in this crate scan rows,
//! so each row occupies a contiguous run of u64 words.

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitGrid {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitGrid {
    pub fn zeroed(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        BitGrid {
            rows,
            cols,
            words_per_row,
            words: vec![0u64; rows * words_per_row],
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        debug_assert!(row < self.rows && col < self.cols);
        self.words[row * self.words_per_row + col / 64] >> (col % 64) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, bit: bool) {
        debug_assert!(row < self.rows && col < self.cols);
        let w = &mut self.words[row * self.words_per_row + col / 64];
        let mask = 1u64 << (col % 64);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn row_words(&self, row: usize) -> &[u64] {
        debug_assert!(row < self.rows);
        &self.words[row * self.words_per_row..(row + 1) * self.words_per_row]
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }
}

/// Pack a sorted index set into a word mask of the given bit length.
pub(crate) fn pack_support(len: usize, support: &[u32]) -> Vec<u64> {
    let mut words = vec![0u64; len.div_ceil(64)];
    for &j in support {
        words[j as usize / 64] |= 1u64 << (j % 64);
    }
    words
}

/// True when the two masks share at least one set bit.
#[inline]
pub(crate) fn intersects(a: &[u64], b: &[u64]) -> bool {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}
