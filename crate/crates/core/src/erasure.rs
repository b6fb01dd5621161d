//! Erasure injection, the missing matrix, erased-position bookkeeping, and
//! matrix completion from an estimate.
//!
//! Erased positions are kept in left-to-right, top-to-bottom order (ascending
//! linear index); every psi index in the crate refers to that order.

use serde::{Deserialize, Serialize};

use crate::bits::BitGrid;
use crate::error::{Error, Result};
use crate::matrix::MeasurementMatrix;
use crate::rng::RngStream;

/// Cell state of a missing matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trit {
    Zero,
    One,
    Erased,
}

/// Recovery state of one erased entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiState {
    Zero,
    One,
    Unknown,
}

/// Rule for assigning values to erased entries still unknown after solving.
///
/// `GreedyCover` satisfies every observed positive constraint with as few
/// ones as possible and writes zeros elsewhere, the maximum-prior-likelihood
/// completion for p < 1/2. `Bernoulli` redraws unknowns from the matrix
/// prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FillPolicy {
    FillZero,
    FillOne,
    FillBernoulli(f64),
    FillGreedyCover,
}

/// Ordered list of erased positions (0-based internally).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasureMap {
    positions: Vec<(u32, u32)>,
    rows: usize,
    cols: usize,
}

impl ErasureMap {
    /// Positions may arrive in any order; they are canonicalized to ascending
    /// linear index. Duplicates are rejected.
    pub fn new(rows: usize, cols: usize, mut positions: Vec<(u32, u32)>) -> Result<Self> {
        for &(i, j) in &positions {
            if i as usize >= rows || j as usize >= cols {
                return Err(Error::IndexOutOfRange(format!(
                    "erased position ({}, {}) outside {rows} x {cols}",
                    i + 1,
                    j + 1
                )));
            }
        }
        positions.sort_unstable_by_key(|&(i, j)| (i, j));
        if positions.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::PreconditionViolated(
                "duplicate erased position".into(),
            ));
        }
        Ok(ErasureMap {
            positions,
            rows,
            cols,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// 0-based (row, col) of the g-th erased entry.
    pub fn position(&self, g: usize) -> (u32, u32) {
        self.positions[g]
    }

    pub fn positions(&self) -> &[(u32, u32)] {
        &self.positions
    }

    pub fn matrix_rows(&self) -> usize {
        self.rows
    }

    pub fn matrix_cols(&self) -> usize {
        self.cols
    }
}

/// True values of the erased entries, in map order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiVector {
    pub values: Vec<bool>,
}

/// Per-entry recovery status produced by the solver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiEstimate {
    pub states: Vec<PsiState>,
}

impl PsiEstimate {
    pub fn all_unknown(r: usize) -> Self {
        PsiEstimate {
            states: vec![PsiState::Unknown; r],
        }
    }

    pub fn from_values(psi: &PsiVector) -> Self {
        PsiEstimate {
            states: psi
                .values
                .iter()
                .map(|&v| if v { PsiState::One } else { PsiState::Zero })
                .collect(),
        }
    }

    pub fn unknown_count(&self) -> usize {
        self.states
            .iter()
            .filter(|s| **s == PsiState::Unknown)
            .count()
    }
}

/// A t x n matrix over {0, 1, erased}: the source matrix with some cells
/// blanked out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MissingMatrix {
    values: BitGrid,
    erased: BitGrid,
}

impl MissingMatrix {
    /// Blank out the given positions of `m`.
    pub fn with_erasures(m: &MeasurementMatrix, map: &ErasureMap) -> Result<(Self, PsiVector)> {
        if map.matrix_rows() != m.rows() || map.matrix_cols() != m.cols() {
            return Err(Error::DimensionMismatch {
                expected: m.rows() * m.cols(),
                got: map.matrix_rows() * map.matrix_cols(),
            });
        }
        let mut values = BitGrid::zeroed(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m.get(i, j) {
                    values.set(i, j, true);
                }
            }
        }
        let mut erased = BitGrid::zeroed(m.rows(), m.cols());
        let mut psi = Vec::with_capacity(map.len());
        for &(i, j) in map.positions() {
            erased.set(i as usize, j as usize, true);
            psi.push(m.get(i as usize, j as usize));
            values.set(i as usize, j as usize, false);
        }
        Ok((
            MissingMatrix { values, erased },
            PsiVector { values: psi },
        ))
    }

    /// Build directly from trits (used by the text-format parser).
    pub fn from_trits(rows: usize, cols: usize, trits: &[Trit]) -> Result<Self> {
        if trits.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: trits.len(),
            });
        }
        let mut values = BitGrid::zeroed(rows, cols);
        let mut erased = BitGrid::zeroed(rows, cols);
        for (idx, t) in trits.iter().enumerate() {
            let (i, j) = (idx / cols, idx % cols);
            match t {
                Trit::Zero => {}
                Trit::One => values.set(i, j, true),
                Trit::Erased => erased.set(i, j, true),
            }
        }
        Ok(MissingMatrix { values, erased })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Trit {
        if self.erased.get(row, col) {
            Trit::Erased
        } else if self.values.get(row, col) {
            Trit::One
        } else {
            Trit::Zero
        }
    }

    /// Word mask of known-1 cells in a row.
    #[inline]
    pub(crate) fn known_one_words(&self, row: usize) -> &[u64] {
        self.values.row_words(row)
    }

    /// Word mask of erased cells in a row.
    #[inline]
    pub(crate) fn erased_words(&self, row: usize) -> &[u64] {
        self.erased.row_words(row)
    }

    /// Recover the canonical erasure map by scanning for erased cells.
    pub fn erasure_map(&self) -> ErasureMap {
        let mut positions = Vec::new();
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                if self.erased.get(i, j) {
                    positions.push((i as u32, j as u32));
                }
            }
        }
        ErasureMap::new(self.rows(), self.cols(), positions)
            .expect("scan produces in-range, duplicate-free positions")
    }

    pub fn erased_count(&self) -> usize {
        self.erased.count_ones() as usize
    }
}

/// Blank each cell of `m` independently with probability q.
pub fn erase_matrix(
    m: &MeasurementMatrix,
    q: f64,
    rng: &mut RngStream,
) -> Result<(MissingMatrix, ErasureMap, PsiVector)> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::DomainError(format!("q={q} outside [0, 1]")));
    }
    let mut positions = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if rng.bernoulli(q) {
                positions.push((i as u32, j as u32));
            }
        }
    }
    let map = ErasureMap::new(m.rows(), m.cols(), positions)?;
    let (missing, psi) = MissingMatrix::with_erasures(m, &map)?;
    Ok((missing, map, psi))
}

/// 1-based linearization: (i, j) -> (i-1)*n + j.
pub fn linearize(i: usize, j: usize, n: usize) -> usize {
    (i - 1) * n + j
}

/// Inverse of `linearize`: 1-based g -> 1-based (row, col).
pub fn position_of(g: usize, n: usize, t: usize) -> Result<(usize, usize)> {
    if g == 0 || g > t * n {
        return Err(Error::IndexOutOfRange(format!(
            "linear index {g} outside [1, {}]",
            t * n
        )));
    }
    let i = g.div_ceil(n);
    let j = g - (i - 1) * n;
    Ok((i, j))
}

/// Write recovered values over the erasures; fill whatever stayed unknown
/// according to `policy`. `FillGreedyCover` has no system context here, so
/// its residual unknowns fall back to zero (cover resolution happens in the
/// solver's `resolve_unknowns`).
pub fn complete_matrix(
    missing: &MissingMatrix,
    map: &ErasureMap,
    estimate: &PsiEstimate,
    policy: FillPolicy,
    rng: &mut RngStream,
) -> Result<MeasurementMatrix> {
    if estimate.states.len() != map.len() {
        return Err(Error::DimensionMismatch {
            expected: map.len(),
            got: estimate.states.len(),
        });
    }
    let mut out = MeasurementMatrix::zeroed(missing.rows(), missing.cols())?;
    for i in 0..missing.rows() {
        for j in 0..missing.cols() {
            if missing.get(i, j) == Trit::One {
                out.set(i, j, true);
            }
        }
    }
    for (g, &(i, j)) in map.positions().iter().enumerate() {
        let bit = match estimate.states[g] {
            PsiState::Zero => false,
            PsiState::One => true,
            PsiState::Unknown => match policy {
                FillPolicy::FillZero | FillPolicy::FillGreedyCover => false,
                FillPolicy::FillOne => true,
                FillPolicy::FillBernoulli(p) => rng.bernoulli(p),
            },
        };
        out.set(i as usize, j as usize, bit);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::generate_matrix;

    #[test]
    fn no_erasure_at_q_zero() {
        let mut rng = RngStream::from_seed(1);
        let m = generate_matrix(5, 8, 0.4, &mut rng).unwrap();
        let (missing, map, psi) = erase_matrix(&m, 0.0, &mut rng).unwrap();
        assert!(map.is_empty());
        assert!(psi.values.is_empty());
        for i in 0..5 {
            for j in 0..8 {
                assert_eq!(missing.get(i, j) == Trit::One, m.get(i, j));
            }
        }
    }

    #[test]
    fn total_erasure_at_q_one() {
        let mut rng = RngStream::from_seed(2);
        let m = generate_matrix(3, 4, 0.5, &mut rng).unwrap();
        let (missing, map, _) = erase_matrix(&m, 1.0, &mut rng).unwrap();
        assert_eq!(map.len(), 12);
        assert_eq!(missing.erased_count(), 12);
    }

    #[test]
    fn psi_records_true_values_in_linear_order() {
        let mut m = MeasurementMatrix::zeroed(3, 4).unwrap();
        m.set(0, 1, true);
        m.set(2, 3, true);
        // Deliberately unsorted input positions.
        let map = ErasureMap::new(3, 4, vec![(2, 3), (0, 1), (1, 0)]).unwrap();
        assert_eq!(map.positions(), &[(0, 1), (1, 0), (2, 3)]);
        let (_, psi) = MissingMatrix::with_erasures(&m, &map).unwrap();
        assert_eq!(psi.values, vec![true, false, true]);
    }

    #[test]
    fn linearize_and_position_roundtrip() {
        // The 1-based contract: g=15 with n=12 sits at row 2, column 3.
        assert_eq!(position_of(15, 12, 9).unwrap(), (2, 3));
        assert_eq!(position_of(1, 12, 9).unwrap(), (1, 1));
        assert_eq!(position_of(108, 12, 9).unwrap(), (9, 12));
        assert!(position_of(0, 12, 9).is_err());
        assert!(position_of(109, 12, 9).is_err());
        for i in 1..=9 {
            for j in 1..=12 {
                assert_eq!(position_of(linearize(i, j, 12), 12, 9).unwrap(), (i, j));
            }
        }
    }

    #[test]
    fn erase_then_complete_with_truth_is_identity() {
        let mut rng = RngStream::from_seed(77);
        let m = generate_matrix(7, 11, 0.3, &mut rng).unwrap();
        let (missing, map, psi) = erase_matrix(&m, 0.35, &mut rng).unwrap();
        let est = PsiEstimate::from_values(&psi);
        let rebuilt =
            complete_matrix(&missing, &map, &est, FillPolicy::FillZero, &mut rng).unwrap();
        assert_eq!(rebuilt, m);
    }

    #[test]
    fn constant_fill_policies() {
        let mut rng = RngStream::from_seed(5);
        let m = generate_matrix(4, 6, 0.5, &mut rng).unwrap();
        let (missing, map, _) = erase_matrix(&m, 0.4, &mut rng).unwrap();
        let unknown = PsiEstimate::all_unknown(map.len());
        let zeros =
            complete_matrix(&missing, &map, &unknown, FillPolicy::FillZero, &mut rng).unwrap();
        let ones =
            complete_matrix(&missing, &map, &unknown, FillPolicy::FillOne, &mut rng).unwrap();
        for &(i, j) in map.positions() {
            assert!(!zeros.get(i as usize, j as usize));
            assert!(ones.get(i as usize, j as usize));
        }
    }

    #[test]
    fn bernoulli_fill_density_within_ci() {
        // All-unknown fill at p=0.1 over repeated completions: one-density
        // within 3 sigma of 0.1.
        let m = MeasurementMatrix::zeroed(10, 10).unwrap();
        let map = ErasureMap::new(
            10,
            10,
            (0..10u32)
                .flat_map(|i| (0..10u32).map(move |j| (i, j)))
                .collect(),
        )
        .unwrap();
        let (missing, _) = MissingMatrix::with_erasures(&m, &map).unwrap();
        let unknown = PsiEstimate::all_unknown(100);
        let reps = 2_000usize;
        let mut ones = 0u64;
        let root = RngStream::from_seed(31);
        for k in 0..reps {
            let mut rng = root.substream("fill", k as u64);
            let filled = complete_matrix(
                &missing,
                &map,
                &unknown,
                FillPolicy::FillBernoulli(0.1),
                &mut rng,
            )
            .unwrap();
            ones += filled.count_ones();
        }
        let density = ones as f64 / (reps as f64 * 100.0);
        let sigma = (0.1f64 * 0.9 / (reps as f64 * 100.0)).sqrt();
        assert!((density - 0.1).abs() < 3.0 * sigma);
    }

    #[test]
    fn trit_marginals_match_model() {
        // Pr(erased)=q, Pr(one)=p(1-q), Pr(zero)=(1-p)(1-q).
        let (p, q) = (0.3, 0.2);
        let mut rng = RngStream::from_seed(1234);
        let m = generate_matrix(200, 200, p, &mut rng).unwrap();
        let (missing, _, _) = erase_matrix(&m, q, &mut rng).unwrap();
        let cells = 200.0 * 200.0;
        let mut counts = [0usize; 3];
        for i in 0..200 {
            for j in 0..200 {
                match missing.get(i, j) {
                    Trit::Zero => counts[0] += 1,
                    Trit::One => counts[1] += 1,
                    Trit::Erased => counts[2] += 1,
                }
            }
        }
        let expected = [(1.0 - p) * (1.0 - q), p * (1.0 - q), q];
        for (count, ex) in counts.iter().zip(expected) {
            let sigma = (ex * (1.0 - ex) / cells).sqrt();
            assert!((*count as f64 / cells - ex).abs() < 4.0 * sigma);
        }
    }
}
