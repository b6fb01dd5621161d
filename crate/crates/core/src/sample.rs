//! Uniform sampling of defective configurations and their test outcomes.

use std::collections::HashSet;

use crate::combin::{binomial_capped, next_combination};
use crate::error::{Error, Result};
use crate::matrix::{test_outcome, InputVector, MeasurementMatrix, OutcomeVector};
use crate::rng::RngStream;

/// Below this universe size the sampler enumerates all weight-d supports and
/// takes a partial Fisher-Yates prefix, which is exact even when s is close
/// to C(n, d). Larger universes use rejection on Floyd-sampled supports.
const ENUMERATION_LIMIT: u128 = 1 << 16;

/// An ordered set of distinct weight-d input vectors with matching outcomes.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub inputs: Vec<InputVector>,
    pub outcomes: Vec<OutcomeVector>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn empty() -> Self {
        SampleSet {
            inputs: Vec::new(),
            outcomes: Vec::new(),
        }
    }
}

/// Draw a uniformly random s-subset of the weight-d vectors (no duplicates)
/// and compute each outcome against `m`.
pub fn sample_pairs(
    m: &MeasurementMatrix,
    d: usize,
    s: usize,
    rng: &mut RngStream,
) -> Result<SampleSet> {
    let n = m.cols();
    let universe = check_universe(n, d, s)?;
    let supports = if universe <= ENUMERATION_LIMIT {
        subset_by_enumeration(n, d, s, universe as usize, rng)
    } else {
        subset_by_rejection(n, d, s, rng)
    };
    build_set(m, supports)
}

/// I.i.d. variant: s independent uniform draws from the weight-d vectors,
/// duplicates allowed. Offered for sensitivity checks against the
/// without-replacement default.
pub fn sample_pairs_iid(
    m: &MeasurementMatrix,
    d: usize,
    s: usize,
    rng: &mut RngStream,
) -> Result<SampleSet> {
    let n = m.cols();
    if d == 0 || d > n {
        return Err(Error::DomainError(format!(
            "d must satisfy 1 <= d <= n; got d={d}, n={n}"
        )));
    }
    let supports = (0..s).map(|_| floyd_sample(n, d, rng)).collect();
    build_set(m, supports)
}

fn check_universe(n: usize, d: usize, s: usize) -> Result<u128> {
    if d == 0 || d > n {
        return Err(Error::DomainError(format!(
            "d must satisfy 1 <= d <= n; got d={d}, n={n}"
        )));
    }
    let universe = binomial_capped(n as u64, d as u64, u128::from(u64::MAX));
    if s as u128 > universe {
        return Err(Error::InsufficientUniverse {
            requested: s as u64,
            universe: universe.min(u128::from(u64::MAX)) as u64,
        });
    }
    Ok(universe)
}

fn build_set(m: &MeasurementMatrix, supports: Vec<Vec<u32>>) -> Result<SampleSet> {
    let n = m.cols();
    let mut inputs = Vec::with_capacity(supports.len());
    let mut outcomes = Vec::with_capacity(supports.len());
    for support in supports {
        let x = InputVector::from_support(n, support)?;
        let y = test_outcome(m, &x)?;
        inputs.push(x);
        outcomes.push(y);
    }
    Ok(SampleSet { inputs, outcomes })
}

fn subset_by_enumeration(
    n: usize,
    d: usize,
    s: usize,
    universe: usize,
    rng: &mut RngStream,
) -> Vec<Vec<u32>> {
    let mut all: Vec<Vec<u32>> = Vec::with_capacity(universe);
    let mut support: Vec<u32> = (0..d as u32).collect();
    loop {
        all.push(support.clone());
        if !next_combination(&mut support, n as u32) {
            break;
        }
    }
    debug_assert_eq!(all.len(), universe);
    // Partial Fisher-Yates: the first s slots become a uniform s-subset.
    for k in 0..s {
        let pick = k + rng.below((universe - k) as u64) as usize;
        all.swap(k, pick);
    }
    all.truncate(s);
    all
}

fn subset_by_rejection(n: usize, d: usize, s: usize, rng: &mut RngStream) -> Vec<Vec<u32>> {
    let mut seen: HashSet<Vec<u32>> = HashSet::with_capacity(s);
    let mut out = Vec::with_capacity(s);
    while out.len() < s {
        let support = floyd_sample(n, d, rng);
        if seen.insert(support.clone()) {
            out.push(support);
        }
    }
    out
}

/// Floyd's algorithm: uniform d-subset of 0..n in O(d) draws.
fn floyd_sample(n: usize, d: usize, rng: &mut RngStream) -> Vec<u32> {
    let mut chosen: HashSet<u32> = HashSet::with_capacity(d);
    for j in (n - d)..n {
        let t = rng.below(j as u64 + 1) as u32;
        if !chosen.insert(t) {
            chosen.insert(j as u32);
        }
    }
    let mut support: Vec<u32> = chosen.into_iter().collect();
    support.sort_unstable();
    support
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::generate_matrix;

    #[test]
    fn singleton_universe_when_d_equals_n() {
        let m = MeasurementMatrix::zeroed(3, 4).unwrap();
        let set = sample_pairs(&m, 4, 1, &mut RngStream::from_seed(1)).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.inputs[0].support(), &[0, 1, 2, 3]);
    }

    #[test]
    fn full_universe_is_exhaustive() {
        let m = MeasurementMatrix::zeroed(2, 4).unwrap();
        let set = sample_pairs(&m, 2, 6, &mut RngStream::from_seed(7)).unwrap();
        let mut supports: Vec<Vec<u32>> =
            set.inputs.iter().map(|x| x.support().to_vec()).collect();
        supports.sort();
        let expected: Vec<Vec<u32>> = vec![
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3],
        ];
        assert_eq!(supports, expected);
    }

    #[test]
    fn oversampling_is_rejected() {
        let m = MeasurementMatrix::zeroed(2, 4).unwrap();
        assert!(matches!(
            sample_pairs(&m, 2, 7, &mut RngStream::from_seed(7)),
            Err(Error::InsufficientUniverse { .. })
        ));
    }

    #[test]
    fn samples_are_distinct_and_weight_d() {
        let mut rng = RngStream::from_seed(99);
        let m = generate_matrix(5, 30, 0.2, &mut rng).unwrap();
        let set = sample_pairs(&m, 3, 50, &mut rng).unwrap();
        let mut seen = HashSet::new();
        for x in &set.inputs {
            assert_eq!(x.weight(), 3);
            assert!(seen.insert(x.support().to_vec()), "duplicate sample");
        }
    }

    #[test]
    fn outcomes_match_regeneration() {
        let mut rng = RngStream::from_seed(13);
        let m = generate_matrix(8, 20, 0.3, &mut rng).unwrap();
        let set = sample_pairs(&m, 2, 10, &mut rng).unwrap();
        for (x, y) in set.inputs.iter().zip(&set.outcomes) {
            assert_eq!(test_outcome(&m, x).unwrap(), *y);
        }
    }

    #[test]
    fn inclusion_frequency_matches_hypergeometric() {
        // n=10, d=2, s=3: each fixed support appears with probability
        // s / C(10,2) = 3/45. 20k resamples keep the test fast; 3 sigma gate.
        let m = MeasurementMatrix::zeroed(1, 10).unwrap();
        let target: Vec<u32> = vec![2, 7];
        let resamples = 20_000;
        let mut hits = 0usize;
        let root = RngStream::from_seed(4242);
        for k in 0..resamples {
            let mut rng = root.substream("resample", k as u64);
            let set = sample_pairs(&m, 2, 3, &mut rng).unwrap();
            if set.inputs.iter().any(|x| x.support() == target.as_slice()) {
                hits += 1;
            }
        }
        let f = hits as f64 / resamples as f64;
        let expect = 3.0 / 45.0;
        let sigma = (expect * (1.0 - expect) / resamples as f64).sqrt();
        assert!(
            (f - expect).abs() < 3.0 * sigma,
            "inclusion frequency {f} vs {expect} (sigma {sigma})"
        );
    }

    #[test]
    fn iid_mode_allows_duplicates() {
        let m = MeasurementMatrix::zeroed(1, 3).unwrap();
        // d=3 forces every draw to the all-ones vector.
        let set = sample_pairs_iid(&m, 3, 5, &mut RngStream::from_seed(0)).unwrap();
        assert_eq!(set.len(), 5);
        assert!(set.inputs.iter().all(|x| x.weight() == 3));
    }
}
