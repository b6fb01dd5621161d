//! Noiseless group-testing decoders: COMP, SCOMP, and SSS.
//!
//! COMP declares every item that appears in no negative test. SCOMP starts
//! from the definite defectives and greedily covers the remaining positive
//! tests. SSS searches for a smallest set consistent with all outcomes via
//! branch and bound over the COMP survivors, with the number of pairwise
//! disjoint unexplained positive tests as the lower bound. All tie-breaks go
//! to the lowest item index so runs are reproducible.

use crate::bits::intersects;
use crate::error::{Error, Result};
use crate::matrix::{MeasurementMatrix, OutcomeVector};

pub const DEFAULT_SSS_BUDGET: u64 = 1_000_000;

/// Decoder output: the declared item set (0-based, ascending), whether the
/// search certified its answer, and whether the set reproduces the outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub declared: Vec<u32>,
    pub exact: bool,
    pub satisfies: bool,
}

fn check_dims(m: &MeasurementMatrix, y: &OutcomeVector) -> Result<()> {
    if y.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            got: y.len(),
        });
    }
    Ok(())
}

/// Does `declared` explain every positive test and avoid every negative one?
pub fn satisfies_outcomes(m: &MeasurementMatrix, y: &OutcomeVector, declared: &[u32]) -> bool {
    let mut mask = vec![0u64; m.cols().div_ceil(64)];
    for &j in declared {
        mask[j as usize / 64] |= 1u64 << (j % 64);
    }
    (0..m.rows()).all(|i| intersects(m.row_words(i), &mask) == y.get(i))
}

fn possibly_defective(m: &MeasurementMatrix, y: &OutcomeVector) -> Vec<u32> {
    let words = m.cols().div_ceil(64);
    let mut eliminated = vec![0u64; words];
    for i in 0..m.rows() {
        if !y.get(i) {
            for (w, &row) in eliminated.iter_mut().zip(m.row_words(i)) {
                *w |= row;
            }
        }
    }
    (0..m.cols() as u32)
        .filter(|&j| eliminated[j as usize / 64] >> (j % 64) & 1 == 0)
        .collect()
}

/// COMP: declare the complement of everything seen in a negative test.
pub fn comp(m: &MeasurementMatrix, y: &OutcomeVector) -> Result<DecodeResult> {
    check_dims(m, y)?;
    let declared = possibly_defective(m, y);
    let satisfies = satisfies_outcomes(m, y, &declared);
    Ok(DecodeResult {
        declared,
        exact: true,
        satisfies,
    })
}

/// SCOMP: definite defectives plus greedy covering of unexplained positives.
pub fn scomp(m: &MeasurementMatrix, y: &OutcomeVector) -> Result<DecodeResult> {
    check_dims(m, y)?;
    let pd = possibly_defective(m, y);
    let positives: Vec<usize> = (0..m.rows()).filter(|&i| y.get(i)).collect();

    // Which PD items sit in each positive test.
    let members: Vec<Vec<u32>> = positives
        .iter()
        .map(|&i| {
            pd.iter()
                .copied()
                .filter(|&j| m.get(i, j as usize))
                .collect()
        })
        .collect();

    let mut declared: Vec<u32> = Vec::new();
    // Definite defectives: sole PD member of some positive test.
    for row in &members {
        if row.len() == 1 && !declared.contains(&row[0]) {
            declared.push(row[0]);
        }
    }

    let mut unexplained: Vec<usize> = (0..positives.len())
        .filter(|&k| !members[k].iter().any(|j| declared.contains(j)))
        .collect();
    while !unexplained.is_empty() {
        let mut best: Option<(u32, usize)> = None;
        for &j in &pd {
            if declared.contains(&j) {
                continue;
            }
            let coverage = unexplained
                .iter()
                .filter(|&&k| members[k].contains(&j))
                .count();
            let better = match best {
                None => coverage > 0,
                Some((bj, bc)) => coverage > bc || (coverage == bc && j < bj),
            };
            if better {
                best = Some((j, coverage));
            }
        }
        match best {
            Some((j, coverage)) if coverage > 0 => {
                declared.push(j);
                unexplained.retain(|&k| !members[k].contains(&j));
            }
            // No PD item covers the rest; only possible on corrupted inputs.
            _ => break,
        }
    }
    declared.sort_unstable();
    let satisfies = satisfies_outcomes(m, y, &declared);
    Ok(DecodeResult {
        declared,
        exact: true,
        satisfies,
    })
}

/// SSS: smallest satisfying set by branch and bound, lexicographically
/// smallest among minimum sets. `exact` is false when `node_budget` ran out
/// before the search space was exhausted.
pub fn sss(m: &MeasurementMatrix, y: &OutcomeVector, node_budget: u64) -> Result<DecodeResult> {
    check_dims(m, y)?;
    if node_budget == 0 {
        return Err(Error::DomainError("node_budget must be >= 1".into()));
    }
    let pd = possibly_defective(m, y);
    let positives: Vec<usize> = (0..m.rows()).filter(|&i| y.get(i)).collect();
    if positives.is_empty() {
        // The empty set explains everything; nothing smaller exists.
        return Ok(DecodeResult {
            declared: Vec::new(),
            exact: true,
            satisfies: satisfies_outcomes(m, y, &[]),
        });
    }

    let npd = pd.len();
    let pd_words = npd.div_ceil(64).max(1);
    let test_words = positives.len().div_ceil(64).max(1);
    // candidates[k]: PD items inside positive test k (mask over PD indices).
    let mut candidates = vec![vec![0u64; pd_words]; positives.len()];
    // covers[a]: positive tests containing PD item a (mask over test indices).
    let mut covers = vec![vec![0u64; test_words]; npd];
    for (k, &i) in positives.iter().enumerate() {
        for (a, &j) in pd.iter().enumerate() {
            if m.get(i, j as usize) {
                candidates[k][a / 64] |= 1u64 << (a % 64);
                covers[a][k / 64] |= 1u64 << (k % 64);
            }
        }
    }

    // A positive test with no PD member cannot be explained by any set: the
    // instance is unsatisfiable (never the case for honest outcomes). Fall
    // back to a greedy cover of what is coverable.
    if candidates.iter().any(|c| c.iter().all(|w| *w == 0)) {
        let declared = greedy_cover_items(&pd, &covers, positives.len(), test_words);
        return Ok(DecodeResult {
            declared,
            exact: true,
            satisfies: false,
        });
    }

    // suffix_mask[a]: PD items with index >= a.
    let mut suffix_masks = vec![vec![0u64; pd_words]; npd + 1];
    for a in (0..npd).rev() {
        suffix_masks[a] = suffix_masks[a + 1].clone();
        suffix_masks[a][a / 64] |= 1u64 << (a % 64);
    }

    let greedy = greedy_cover_items(&pd, &covers, positives.len(), test_words);
    let mut search = Search {
        pd: &pd,
        candidates: &candidates,
        covers: &covers,
        suffix_masks: &suffix_masks,
        test_words,
        best_size: greedy.len() + 1,
        best: None,
        budget: node_budget,
        exhausted_budget: false,
    };
    let all_uncovered: Vec<u64> = {
        let mut mask = vec![0u64; test_words];
        for (k, w) in mask.iter_mut().enumerate().take(test_words) {
            let bits = positives.len() - k * 64;
            *w = if bits >= 64 { !0 } else { (1u64 << bits) - 1 };
        }
        mask
    };
    let mut chosen: Vec<usize> = Vec::new();
    search.dfs(0, &mut chosen, &all_uncovered);

    let exact = !search.exhausted_budget;
    let declared = match search.best {
        Some(set) => set.iter().map(|&a| pd[a]).collect(),
        None => greedy,
    };
    let satisfies = satisfies_outcomes(m, y, &declared);
    Ok(DecodeResult {
        declared,
        exact,
        satisfies,
    })
}

fn greedy_cover_items(
    pd: &[u32],
    covers: &[Vec<u64>],
    num_tests: usize,
    test_words: usize,
) -> Vec<u32> {
    let mut uncovered = vec![0u64; test_words];
    for k in 0..num_tests {
        uncovered[k / 64] |= 1u64 << (k % 64);
    }
    let mut declared: Vec<u32> = Vec::new();
    loop {
        let mut best: Option<(usize, u32)> = None; // (pd index, coverage)
        for (a, cover) in covers.iter().enumerate() {
            let coverage: u32 = cover
                .iter()
                .zip(&uncovered)
                .map(|(c, u)| (c & u).count_ones())
                .sum();
            if coverage > 0 && best.map_or(true, |(_, bc)| coverage > bc) {
                best = Some((a, coverage));
            }
        }
        match best {
            Some((a, _)) => {
                for (u, c) in uncovered.iter_mut().zip(&covers[a]) {
                    *u &= !c;
                }
                declared.push(pd[a]);
            }
            None => break,
        }
        if uncovered.iter().all(|w| *w == 0) {
            break;
        }
    }
    declared.sort_unstable();
    declared
}

struct Search<'a> {
    pd: &'a [u32],
    candidates: &'a [Vec<u64>],
    covers: &'a [Vec<u64>],
    suffix_masks: &'a [Vec<u64>],
    test_words: usize,
    best_size: usize,
    best: Option<Vec<usize>>,
    budget: u64,
    exhausted_budget: bool,
}

impl Search<'_> {
    /// Include-first DFS in ascending item order visits equal-size sets in
    /// lexicographic order, so keeping only strictly smaller solutions yields
    /// the lexicographically smallest minimum set.
    fn dfs(&mut self, pos: usize, chosen: &mut Vec<usize>, uncovered: &[u64]) {
        if self.exhausted_budget {
            return;
        }
        if self.budget == 0 {
            self.exhausted_budget = true;
            return;
        }
        self.budget -= 1;

        if uncovered.iter().all(|w| *w == 0) {
            if chosen.len() < self.best_size {
                self.best_size = chosen.len();
                self.best = Some(chosen.clone());
            }
            return;
        }
        if pos == self.pd.len() {
            return;
        }

        // Feasibility plus packing lower bound in one sweep: every uncovered
        // test needs a candidate at or beyond `pos`; tests whose remaining
        // candidates are pairwise disjoint each need their own item.
        let allowed = &self.suffix_masks[pos];
        let mut packed = 0usize;
        let mut used = vec![0u64; allowed.len()];
        for k in 0..self.candidates.len() {
            if uncovered[k / 64] >> (k % 64) & 1 == 0 {
                continue;
            }
            let cand = &self.candidates[k];
            let mut any = false;
            let mut disjoint = true;
            for w in 0..cand.len() {
                let rem = cand[w] & allowed[w];
                if rem != 0 {
                    any = true;
                }
                if rem & used[w] != 0 {
                    disjoint = false;
                }
            }
            if !any {
                return; // some test can no longer be covered on this branch
            }
            if disjoint {
                packed += 1;
                for w in 0..cand.len() {
                    used[w] |= cand[w] & allowed[w];
                }
            }
        }
        if chosen.len() + packed >= self.best_size {
            return;
        }

        // Include `pos` when it covers something new.
        let covers_new = self.covers[pos]
            .iter()
            .zip(uncovered)
            .any(|(c, u)| c & u != 0);
        if covers_new {
            let next: Vec<u64> = uncovered
                .iter()
                .zip(&self.covers[pos])
                .map(|(u, c)| u & !c)
                .collect();
            chosen.push(pos);
            self.dfs(pos + 1, chosen, &next);
            chosen.pop();
        }
        self.dfs(pos + 1, chosen, uncovered);
        let _ = self.test_words;
    }
}
