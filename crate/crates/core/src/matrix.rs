//! Measurement matrices, input vectors, and Boolean-OR test outcomes.

use crate::bits::{intersects, pack_support, BitGrid};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Hard cap on t*n cells for dense storage.
pub const MAX_CELLS: u64 = 100_000_000;

/// Dense t x n binary measurement matrix; row = test, column = item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementMatrix {
    grid: BitGrid,
}

impl MeasurementMatrix {
    pub fn zeroed(rows: usize, cols: usize) -> Result<Self> {
        check_capacity(rows, cols)?;
        Ok(MeasurementMatrix {
            grid: BitGrid::zeroed(rows, cols),
        })
    }

    /// Build from explicit 0/1 rows; rows must all have the declared width.
    pub fn from_rows(rows: &[&[u8]]) -> Result<Self> {
        let t = rows.len();
        let n = rows.first().map_or(0, |r| r.len());
        let mut m = MeasurementMatrix::zeroed(t, n)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            for (j, &bit) in row.iter().enumerate() {
                m.grid.set(i, j, bit != 0);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.grid.rows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.grid.cols()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.grid.get(row, col)
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, bit: bool) {
        self.grid.set(row, col, bit);
    }

    #[inline]
    pub fn row_words(&self, row: usize) -> &[u64] {
        self.grid.row_words(row)
    }

    pub fn count_ones(&self) -> u64 {
        self.grid.count_ones()
    }

    /// Fraction of 1-entries.
    pub fn density(&self) -> f64 {
        self.count_ones() as f64 / (self.rows() * self.cols()) as f64
    }
}

fn check_capacity(rows: usize, cols: usize) -> Result<()> {
    let cells = rows as u64 * cols as u64;
    if cells > MAX_CELLS {
        return Err(Error::CapacityExceeded(format!(
            "{rows} x {cols} = {cells} cells exceeds the {MAX_CELLS} cap"
        )));
    }
    Ok(())
}

/// Binary input vector of length n; the support marks defective items.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InputVector {
    len: usize,
    support: Vec<u32>,
    words: Vec<u64>,
}

impl InputVector {
    /// Build from a support set (0-based column indices). The support is
    /// sorted and must be duplicate-free and in range.
    pub fn from_support(len: usize, mut support: Vec<u32>) -> Result<Self> {
        support.sort_unstable();
        if support.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::PreconditionViolated(
                "input support contains duplicates".into(),
            ));
        }
        if let Some(&last) = support.last() {
            if last as usize >= len {
                return Err(Error::IndexOutOfRange(format!(
                    "support index {last} >= length {len}"
                )));
            }
        }
        let words = pack_support(len, &support);
        Ok(InputVector {
            len,
            support,
            words,
        })
    }

    pub fn all_zero(len: usize) -> Self {
        InputVector {
            len,
            support: Vec::new(),
            words: vec![0u64; len.div_ceil(64)],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.support.len()
    }

    #[inline]
    pub fn support(&self) -> &[u32] {
        &self.support
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn contains(&self, col: u32) -> bool {
        self.words[col as usize / 64] >> (col % 64) & 1 != 0
    }

    /// Entrywise OR of two vectors of equal length.
    pub fn or(&self, other: &InputVector) -> Result<InputVector> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        let mut support = self.support.clone();
        support.extend_from_slice(&other.support);
        support.sort_unstable();
        support.dedup();
        InputVector::from_support(self.len, support)
    }
}

/// Length-t binary outcome vector; bit i is the result of test i.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeVector {
    bits: Vec<bool>,
}

impl OutcomeVector {
    pub fn new(bits: Vec<bool>) -> Self {
        OutcomeVector { bits }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_positive(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Entrywise `self <= other`.
    pub fn le(&self, other: &OutcomeVector) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(a, b)| *b || !*a)
    }

    pub fn or(&self, other: &OutcomeVector) -> OutcomeVector {
        OutcomeVector {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| *a || *b)
                .collect(),
        }
    }
}

/// Draw a t x n matrix with i.i.d. Bernoulli(p) entries.
pub fn generate_matrix(t: usize, n: usize, p: f64, rng: &mut RngStream) -> Result<MeasurementMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::DomainError(format!("p={p} outside [0, 1]")));
    }
    let mut m = MeasurementMatrix::zeroed(t, n)?;
    for i in 0..t {
        for j in 0..n {
            if rng.bernoulli(p) {
                m.set(i, j, true);
            }
        }
    }
    Ok(m)
}

/// Boolean group-testing outcome: y_i = 1 iff test i contains a defective.
pub fn test_outcome(m: &MeasurementMatrix, x: &InputVector) -> Result<OutcomeVector> {
    if x.len() != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: m.cols(),
            got: x.len(),
        });
    }
    let bits = (0..m.rows())
        .map(|i| intersects(m.row_words(i), x.words()))
        .collect();
    Ok(OutcomeVector::new(bits))
}
