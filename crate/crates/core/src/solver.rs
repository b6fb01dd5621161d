//! Recovery of erased-entry values from the constraint system.
//!
//! Solving runs in two phases per component (rows sharing one source test row
//! have disjoint column supports, so components are independent):
//!
//! 1. logical forcing to a fixpoint — a negative row zeroes everything it
//!    covers; a positive row with a single live candidate forces a one; rows
//!    already containing a one are satisfied and dropped;
//! 2. bounded exact enumeration — if a component still has at most
//!    `enum_limit` unknowns, every assignment is checked and entries constant
//!    across all consistent assignments are promoted.
//!
//! Anything still unknown afterwards is genuinely undetermined by the data
//! and is resolved by an explicit fill policy.

use std::collections::BTreeMap;

use crate::erasure::{FillPolicy, PsiEstimate, PsiState, PsiVector};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::system::ErasedSystem;

/// Outcome of `solve_psi`: the estimate plus counters describing how it was
/// reached.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub estimate: PsiEstimate,
    pub forced_zero: usize,
    pub forced_one: usize,
    pub unknown: usize,
    /// Number of per-test-row components with at least one row.
    pub components: usize,
    /// Components whose residual unknowns were exhaustively enumerated.
    pub enumerated: usize,
}

/// A complete fill of the estimate plus diagnostics: indices of system rows
/// the filled vector fails to reproduce (possible under constant fills,
/// never under `FillGreedyCover`).
#[derive(Debug, Clone)]
pub struct ResolvedPsi {
    pub psi: PsiVector,
    pub violated_rows: Vec<usize>,
}

pub fn solve_psi(system: &ErasedSystem, enum_limit: usize) -> Result<SolveReport> {
    let r = system.num_cols();
    let mut states = vec![PsiState::Unknown; r];

    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (idx, row) in system.rows().iter().enumerate() {
        components.entry(row.source_test_row).or_default().push(idx);
    }

    let mut enumerated = 0usize;
    for row_indices in components.values() {
        force_component(system, row_indices, &mut states)?;
        if enumerate_component(system, row_indices, &mut states, enum_limit)? {
            enumerated += 1;
        }
    }

    let forced_zero = states.iter().filter(|s| **s == PsiState::Zero).count();
    let forced_one = states.iter().filter(|s| **s == PsiState::One).count();
    Ok(SolveReport {
        unknown: r - forced_zero - forced_one,
        forced_zero,
        forced_one,
        components: components.len(),
        enumerated,
        estimate: PsiEstimate { states },
    })
}

fn force_component(
    system: &ErasedSystem,
    row_indices: &[usize],
    states: &mut [PsiState],
) -> Result<()> {
    loop {
        let mut changed = false;
        for &idx in row_indices {
            let row = &system.rows()[idx];
            if row.outcome {
                let mut satisfied = false;
                let mut candidate = None;
                let mut live = 0usize;
                for &z in &row.support {
                    match states[z as usize] {
                        PsiState::One => {
                            satisfied = true;
                            break;
                        }
                        PsiState::Unknown => {
                            live += 1;
                            candidate = Some(z as usize);
                        }
                        PsiState::Zero => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match live {
                    0 => return Err(Error::InconsistentSystem { row: idx }),
                    1 => {
                        states[candidate.expect("live candidate")] = PsiState::One;
                        changed = true;
                    }
                    _ => {}
                }
            } else {
                for &z in &row.support {
                    match states[z as usize] {
                        PsiState::One => {
                            return Err(Error::InconsistentSystem { row: idx })
                        }
                        PsiState::Unknown => {
                            states[z as usize] = PsiState::Zero;
                            changed = true;
                        }
                        PsiState::Zero => {}
                    }
                }
            }
        }
        if !changed {
            return Ok(());
        }
    }
}

/// Exhaustively test the residual unknowns of one component; promote entries
/// that take the same value in every assignment consistent with its rows.
/// Returns whether enumeration ran.
fn enumerate_component(
    system: &ErasedSystem,
    row_indices: &[usize],
    states: &mut [PsiState],
    enum_limit: usize,
) -> Result<bool> {
    let mut vars: Vec<usize> = Vec::new();
    for &idx in row_indices {
        for &z in &system.rows()[idx].support {
            if states[z as usize] == PsiState::Unknown && !vars.contains(&(z as usize)) {
                vars.push(z as usize);
            }
        }
    }
    if vars.is_empty() || vars.len() > enum_limit {
        return Ok(vars.is_empty());
    }
    vars.sort_unstable();

    let k = vars.len();
    let mut seen = vec![[false, false]; k];
    let mut any_consistent = false;
    'assignment: for mask in 0u64..(1u64 << k) {
        for &idx in row_indices {
            let row = &system.rows()[idx];
            let or = row.support.iter().any(|&z| match states[z as usize] {
                PsiState::One => true,
                PsiState::Zero => false,
                PsiState::Unknown => {
                    let pos = vars.binary_search(&(z as usize)).expect("component var");
                    mask >> pos & 1 != 0
                }
            });
            if or != row.outcome {
                continue 'assignment;
            }
        }
        any_consistent = true;
        for (pos, slot) in seen.iter_mut().enumerate() {
            slot[(mask >> pos & 1) as usize] = true;
        }
    }
    if !any_consistent {
        return Err(Error::InconsistentSystem {
            row: row_indices[0],
        });
    }
    for (pos, slot) in seen.iter().enumerate() {
        match (slot[0], slot[1]) {
            (true, false) => states[vars[pos]] = PsiState::Zero,
            (false, true) => states[vars[pos]] = PsiState::One,
            _ => {}
        }
    }
    Ok(true)
}

/// Turn an estimate into a full binary vector.
///
/// `FillGreedyCover` satisfies every still-unsatisfied positive row by
/// repeatedly setting to one the unknown entry covering the most such rows
/// (lowest psi index on ties) and writes zeros everywhere else, including
/// entries no row touches. Constant and Bernoulli policies apply to every
/// unknown uniformly and may leave positive rows violated; those rows are
/// reported in the diagnostics.
pub fn resolve_unknowns(
    report: &SolveReport,
    system: &ErasedSystem,
    policy: FillPolicy,
    rng: &mut RngStream,
) -> ResolvedPsi {
    let states = &report.estimate.states;
    let mut values: Vec<bool> = states
        .iter()
        .map(|s| match s {
            PsiState::One => true,
            PsiState::Zero => false,
            PsiState::Unknown => match policy {
                FillPolicy::FillZero | FillPolicy::FillGreedyCover => false,
                FillPolicy::FillOne => true,
                FillPolicy::FillBernoulli(p) => rng.bernoulli(p),
            },
        })
        .collect();

    if policy == FillPolicy::FillGreedyCover {
        greedy_cover(system, states, &mut values);
    }

    let violated_rows = system
        .rows()
        .iter()
        .enumerate()
        .filter(|(_, row)| {
            row.support.iter().any(|&z| values[z as usize]) != row.outcome
        })
        .map(|(idx, _)| idx)
        .collect();
    ResolvedPsi {
        psi: PsiVector { values },
        violated_rows,
    }
}

fn greedy_cover(system: &ErasedSystem, states: &[PsiState], values: &mut [bool]) {
    let mut unsatisfied: Vec<usize> = system
        .rows()
        .iter()
        .enumerate()
        .filter(|(_, row)| row.outcome && !row.support.iter().any(|&z| values[z as usize]))
        .map(|(idx, _)| idx)
        .collect();
    while !unsatisfied.is_empty() {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &idx in &unsatisfied {
            for &z in &system.rows()[idx].support {
                if states[z as usize] == PsiState::Unknown && !values[z as usize] {
                    *counts.entry(z as usize).or_insert(0) += 1;
                }
            }
        }
        // Max coverage; BTreeMap iteration order makes the lowest index win ties.
        let best = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&z, &c)| (z, c));
        match best {
            Some((z, c)) if c > 0 => {
                values[z] = true;
                unsatisfied.retain(|&idx| {
                    !system.rows()[idx].support.contains(&(z as u32))
                });
            }
            _ => break,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erasure::{erase_matrix, ErasureMap, MissingMatrix};
    use crate::matrix::generate_matrix;
    use crate::sample::sample_pairs;
    use crate::system::{build_erased_system, SystemRow};

    fn toy_system(rows: Vec<(Vec<u32>, bool)>, r: usize) -> ErasedSystem {
        // Single test row wide enough to host r erased cells.
        let map = ErasureMap::new(1, r, (0..r as u32).map(|j| (0, j)).collect()).unwrap();
        let rows = rows
            .into_iter()
            .map(|(support, outcome)| SystemRow {
                support,
                outcome,
                source_sample: 0,
                source_test_row: 0,
            })
            .collect();
        ErasedSystem::from_rows(map, rows).unwrap()
    }

    #[test]
    fn empty_system_leaves_all_unknown() {
        let system = toy_system(vec![], 4);
        let report = solve_psi(&system, 20).unwrap();
        assert_eq!(report.unknown, 4);
        assert_eq!(report.components, 0);
    }

    #[test]
    fn negative_rows_force_zeros_and_singletons_force_ones() {
        let system = toy_system(
            vec![
                (vec![0, 1], true),
                (vec![1], false),
            ],
            3,
        );
        let report = solve_psi(&system, 20).unwrap();
        assert_eq!(report.estimate.states[0], PsiState::One);
        assert_eq!(report.estimate.states[1], PsiState::Zero);
        assert_eq!(report.estimate.states[2], PsiState::Unknown);
    }

    #[test]
    fn unsatisfiable_positive_row_is_an_error() {
        let system = toy_system(vec![(vec![0, 1], true), (vec![0, 1], false)], 2);
        // Dedup would normally prevent this; rows differ here so it builds,
        // but the negative row zeroes both entries of the positive one.
        assert!(matches!(
            solve_psi(&system, 20),
            Err(Error::InconsistentSystem { .. })
        ));
    }

    #[test]
    fn solver_is_sound_on_random_pipelines() {
        for seed in 0..200 {
            let mut rng = RngStream::from_seed(seed);
            let m = generate_matrix(10, 18, 0.3, &mut rng).unwrap();
            let (missing, map, psi) = erase_matrix(&m, 0.3, &mut rng).unwrap();
            let samples = sample_pairs(&m, 3, 6, &mut rng).unwrap();
            let system = build_erased_system(&missing, &map, &samples).unwrap();
            let report = solve_psi(&system, 20).unwrap();
            for (g, state) in report.estimate.states.iter().enumerate() {
                match state {
                    PsiState::Zero => assert!(!psi.values[g], "seed {seed} psi {g}"),
                    PsiState::One => assert!(psi.values[g], "seed {seed} psi {g}"),
                    PsiState::Unknown => {}
                }
            }
        }
    }

    #[test]
    fn forcing_is_order_independent() {
        // Solving a row-permuted copy of the same system gives identical states.
        for seed in 0..30 {
            let mut rng = RngStream::from_seed(3000 + seed);
            let m = generate_matrix(9, 15, 0.35, &mut rng).unwrap();
            let (missing, map, _) = erase_matrix(&m, 0.35, &mut rng).unwrap();
            let samples = sample_pairs(&m, 3, 5, &mut rng).unwrap();
            let system = build_erased_system(&missing, &map, &samples).unwrap();
            let mut rows = system.rows().to_vec();
            rows.reverse();
            let permuted = ErasedSystem::from_rows(system.map().clone(), rows).unwrap();
            let a = solve_psi(&system, 20).unwrap();
            let b = solve_psi(&permuted, 20).unwrap();
            assert_eq!(a.estimate, b.estimate, "seed {seed}");
        }
    }

    #[test]
    fn adding_samples_never_flips_forced_states() {
        for seed in 0..30 {
            let mut rng = RngStream::from_seed(7000 + seed);
            let m = generate_matrix(9, 15, 0.3, &mut rng).unwrap();
            let (missing, map, _) = erase_matrix(&m, 0.3, &mut rng).unwrap();
            let samples = sample_pairs(&m, 3, 8, &mut rng).unwrap();
            let mut prefix = samples.clone();
            prefix.inputs.truncate(4);
            prefix.outcomes.truncate(4);
            let small = build_erased_system(&missing, &map, &prefix).unwrap();
            let large = build_erased_system(&missing, &map, &samples).unwrap();
            let a = solve_psi(&small, 20).unwrap();
            let b = solve_psi(&large, 20).unwrap();
            for (g, state) in a.estimate.states.iter().enumerate() {
                if *state != PsiState::Unknown {
                    assert_eq!(*state, b.estimate.states[g], "seed {seed} psi {g}");
                }
            }
        }
    }

    #[test]
    fn greedy_cover_always_satisfies_consistent_systems() {
        for seed in 0..100 {
            let mut rng = RngStream::from_seed(5000 + seed);
            let m = generate_matrix(10, 16, 0.3, &mut rng).unwrap();
            let (missing, map, _) = erase_matrix(&m, 0.35, &mut rng).unwrap();
            let samples = sample_pairs(&m, 3, 5, &mut rng).unwrap();
            let system = build_erased_system(&missing, &map, &samples).unwrap();
            let report = solve_psi(&system, 20).unwrap();
            let resolved =
                resolve_unknowns(&report, &system, FillPolicy::FillGreedyCover, &mut rng);
            assert!(resolved.violated_rows.is_empty(), "seed {seed}");
            assert!(system.consistent_with(&resolved.psi.values), "seed {seed}");
        }
    }

    #[test]
    fn all_known_estimate_ignores_policy() {
        let system = toy_system(vec![(vec![0], true), (vec![1], false)], 2);
        let report = solve_psi(&system, 20).unwrap();
        assert_eq!(report.unknown, 0);
        let mut rng = RngStream::from_seed(0);
        let resolved = resolve_unknowns(&report, &system, FillPolicy::FillOne, &mut rng);
        assert_eq!(resolved.psi.values, vec![true, false]);
        assert!(resolved.violated_rows.is_empty());
    }

    #[test]
    fn fill_zero_reports_violations() {
        let system = toy_system(vec![(vec![0, 1], true)], 2);
        let report = solve_psi(&system, 20).unwrap();
        let mut rng = RngStream::from_seed(0);
        let resolved = resolve_unknowns(&report, &system, FillPolicy::FillZero, &mut rng);
        assert_eq!(resolved.psi.values, vec![false, false]);
        assert_eq!(resolved.violated_rows, vec![0]);
    }

    #[test]
    fn fully_forced_pipeline_reproduces_the_matrix() {
        // Erase a single cell covered by a negative test; recovery is exact.
        let mut rng = RngStream::from_seed(42);
        let m = generate_matrix(6, 10, 0.25, &mut rng).unwrap();
        let map = ErasureMap::new(6, 10, vec![(2, 4)]).unwrap();
        let (missing, psi) = MissingMatrix::with_erasures(&m, &map).unwrap();
        let samples = sample_pairs(&m, 2, 20, &mut rng).unwrap();
        let system = build_erased_system(&missing, &map, &samples).unwrap();
        let report = solve_psi(&system, 20).unwrap();
        if report.unknown == 0 {
            let resolved =
                resolve_unknowns(&report, &system, FillPolicy::FillGreedyCover, &mut rng);
            assert_eq!(resolved.psi.values, psi.values);
        }
    }
}
