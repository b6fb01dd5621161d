//! Informative-pair detection and construction of the erased system.
//!
//! A sample/test pair can only tell us something about erased entries when
//! some erased cell sits inside the sample's support on that test row and no
//! known 1 of the row does. Each such pair contributes one constraint row over
//! the erased entries; duplicate constraints (same erased-cell set) are
//! dropped on first-seen order.

use std::collections::HashMap;

use crate::bits::intersects;
use crate::erasure::{ErasureMap, MissingMatrix};
use crate::error::{Error, Result};
use crate::matrix::InputVector;
use crate::sample::SampleSet;

/// The set of erased positions on one test row hit by a sample's support,
/// expressed as ascending psi indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub test_row: usize,
    pub psi_indices: Vec<u32>,
}

/// One constraint row: OR of the referenced erased entries equals `outcome`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemRow {
    /// Ascending psi indices with a 1 in this row.
    pub support: Vec<u32>,
    pub outcome: bool,
    /// Index of the sample that first produced this row.
    pub source_sample: usize,
    /// Test row (0-based) the constraint came from.
    pub source_test_row: usize,
}

/// Deduplicated constraint system (Gamma, v) over the erased entries.
#[derive(Debug, Clone)]
pub struct ErasedSystem {
    rows: Vec<SystemRow>,
    map: ErasureMap,
}

impl ErasedSystem {
    /// Reassemble a system from parsed rows, re-validating the invariants.
    pub fn from_rows(map: ErasureMap, rows: Vec<SystemRow>) -> Result<Self> {
        let r = map.len();
        let mut seen: HashMap<&[u32], usize> = HashMap::new();
        for (idx, row) in rows.iter().enumerate() {
            if row.support.is_empty() {
                return Err(Error::PreconditionViolated(format!(
                    "system row {idx} is all-zero"
                )));
            }
            if row.support.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::PreconditionViolated(format!(
                    "system row {idx} support not strictly ascending"
                )));
            }
            for &z in &row.support {
                if z as usize >= r {
                    return Err(Error::IndexOutOfRange(format!(
                        "system row {idx} references column {z} of {r}"
                    )));
                }
                if map.position(z as usize).0 as usize != row.source_test_row {
                    return Err(Error::PreconditionViolated(format!(
                        "system row {idx} mixes erased entries from different test rows"
                    )));
                }
            }
            if let Some(first) = seen.insert(&row.support, idx) {
                return Err(Error::InconsistentOutcome {
                    first,
                    second: idx,
                });
            }
        }
        Ok(ErasedSystem { rows, map })
    }

    pub fn rows(&self) -> &[SystemRow] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Number of columns, i.e. erased entries.
    pub fn num_cols(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &ErasureMap {
        &self.map
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Check Gamma (.) psi = v under Boolean OR semantics.
    pub fn consistent_with(&self, psi: &[bool]) -> bool {
        psi.len() == self.num_cols()
            && self.rows.iter().all(|row| {
                row.support.iter().any(|&z| psi[z as usize]) == row.outcome
            })
    }
}

/// Definition check: does the pair (x, test_row) constrain erased entries?
/// True iff some erased cell of the row lies in supp(x) and no known 1 does.
pub fn is_informative(missing: &MissingMatrix, x: &InputVector, test_row: usize) -> bool {
    debug_assert_eq!(x.len(), missing.cols());
    debug_assert!(test_row < missing.rows());
    intersects(missing.erased_words(test_row), x.words())
        && !intersects(missing.known_one_words(test_row), x.words())
}

/// The erased positions of `test_row` hit by supp(x), as psi indices.
/// Callers must pass an informative pair.
pub fn signature(
    missing: &MissingMatrix,
    map: &ErasureMap,
    x: &InputVector,
    test_row: usize,
) -> Result<Signature> {
    if !is_informative(missing, x, test_row) {
        return Err(Error::PreconditionViolated(format!(
            "pair (x, {}) is not informative",
            test_row + 1
        )));
    }
    let psi_indices = map
        .positions()
        .iter()
        .enumerate()
        .filter(|(_, &(i, j))| i as usize == test_row && x.contains(j))
        .map(|(g, _)| g as u32)
        .collect();
    Ok(Signature {
        test_row,
        psi_indices,
    })
}

/// Build the deduplicated system from all sample/test pairs.
///
/// Pairs are visited sample-major (each sample against test rows 1..t) and
/// the first occurrence of each distinct signature keeps its slot, so the row
/// order is reproducible. Two occurrences of one signature with different
/// outcomes cannot happen in the noiseless model and signal corrupted input.
pub fn build_erased_system(
    missing: &MissingMatrix,
    map: &ErasureMap,
    samples: &SampleSet,
) -> Result<ErasedSystem> {
    if map.matrix_rows() != missing.rows() || map.matrix_cols() != missing.cols() {
        return Err(Error::DimensionMismatch {
            expected: missing.rows() * missing.cols(),
            got: map.matrix_rows() * map.matrix_cols(),
        });
    }
    let t = missing.rows();
    // Erased cells of each test row as (column, psi index), ascending column.
    let mut row_erased: Vec<Vec<(u32, u32)>> = vec![Vec::new(); t];
    for (g, &(i, j)) in map.positions().iter().enumerate() {
        row_erased[i as usize].push((j, g as u32));
    }

    let mut rows: Vec<SystemRow> = Vec::new();
    let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
    for (k, (x, y)) in samples.inputs.iter().zip(&samples.outcomes).enumerate() {
        if x.len() != missing.cols() {
            return Err(Error::DimensionMismatch {
                expected: missing.cols(),
                got: x.len(),
            });
        }
        if y.len() != t {
            return Err(Error::DimensionMismatch {
                expected: t,
                got: y.len(),
            });
        }
        for i in 0..t {
            if !is_informative(missing, x, i) {
                continue;
            }
            let support: Vec<u32> = row_erased[i]
                .iter()
                .filter(|(col, _)| x.contains(*col))
                .map(|&(_, g)| g)
                .collect();
            debug_assert!(!support.is_empty());
            let outcome = y.get(i);
            match seen.get(&support) {
                Some(&first) => {
                    if rows[first].outcome != outcome {
                        return Err(Error::InconsistentOutcome {
                            first,
                            second: rows.len(),
                        });
                    }
                }
                None => {
                    seen.insert(support.clone(), rows.len());
                    rows.push(SystemRow {
                        support,
                        outcome,
                        source_sample: k,
                        source_test_row: i,
                    });
                }
            }
        }
    }
    Ok(ErasedSystem { rows, map: map.clone() })
}
