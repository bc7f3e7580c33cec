//! Brute-force ground truth.
//!
//! Enumerates every way of picking at most one term from each of the bins
//! `b_0, ..., b_n` and records what comes out. Apart from [`term`] nothing
//! here calls into `seqcore` or `exact`, so agreement between the census
//! and those modules is a real check rather than a tautology.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::seqcore::{term, MGonParams, SeqIndex};

/// Largest number of choice vectors [`enumerate_all`] will visit.
pub const ENUMERATION_LIMIT: u64 = 100_000_000;

/// Largest dense joint-count table, in cells.
pub const JOINT_TABLE_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    /// Also tally pairs of gaps (the `X_{j1,j1+g1,j2,j2+g2}` counts).
    pub joint: bool,
    pub execution: Execution,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            joint: false,
            execution: Execution::Parallel,
        }
    }
}

/// Which `(j1, g1, j2, g2)` configurations a joint statistic sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointScope {
    /// Every `j1 < j2`.
    All,
    /// `j1 != 0` and `j1 + g1 < j2`: the configurations that carry the
    /// leading term of the count.
    MainTerm,
    /// The rest: `j1 = 0` or `j1 + g1 = j2`.
    Boundary,
}

/// Everything learned from one exhaustive enumeration of `I_n`.
#[derive(Debug, Clone)]
pub struct EnumerationCensus {
    pub m: u32,
    pub n: u64,
    /// `2(m+1)^n`, the number of choice vectors.
    pub size: u64,
    /// `ordinal_of_value[z]` is the choice vector that produced `z`.
    ordinal_of_value: Vec<u32>,
    /// Indexed by summand count.
    pub pnk_counts: Vec<u64>,
    /// Gap length -> occurrences over all `z`.
    pub gap_counts: BTreeMap<u64, u64>,
    /// `(i, g)` -> `sum_z X_{i,g}(z)`.
    pub gap_start_counts: BTreeMap<(u64, u64), u64>,
    /// Gaps actually present, summed over all nonempty decompositions.
    pub n_gaps_total: u64,
    /// `sum_z (k(z) - 1)` including `-1` from `z = 0`.
    pub signed_gap_sum: i64,
    /// Number of unordered pairs of gaps, `sum_z C(k(z) - 1, 2)`.
    pub gap_pair_total: u64,
    /// `(j1, g1, j2, g2)` -> number of `z` with both gaps, `j1 < j2`.
    pub joint_counts: Option<BTreeMap<(u64, u64, u64, u64), u64>>,
}

/// Per-partition accumulator; merging is plain addition.
struct Partial {
    values: Vec<(u64, u32)>,
    pnk: Vec<u64>,
    gap_starts: Vec<u64>,
    joint: Vec<u64>,
    gap_pairs: u64,
}

fn enumeration_size(m: u32, n: u64) -> Option<u64> {
    let radix = m as u64 + 1;
    let mut size: u64 = 2;
    for _ in 0..n {
        size = size.checked_mul(radix)?;
    }
    Some(size)
}

/// Enumerates all legal decompositions over bins `b_0..=b_n`.
///
/// Each bin contributes one of its terms or nothing (`b_0`: `a_0` or
/// nothing), walked as an odometer; the work is split by the choice made in
/// the top bin. Errors if any value appears twice or falls outside
/// `[0, 2(m+1)^n)`.
pub fn enumerate_all(
    params: MGonParams,
    n: u64,
    options: CensusOptions,
) -> Result<EnumerationCensus> {
    let m = params.m();
    let size = match enumeration_size(m, n) {
        Some(s) if s <= ENUMERATION_LIMIT => s,
        other => {
            return Err(Error::InstanceTooLarge {
                count: other.map_or(u128::MAX, u128::from),
                limit: ENUMERATION_LIMIT as u128,
            })
        }
    };
    let max_index = m as u64 * n;
    let width = max_index + 1;
    if options.joint && width.pow(4) > JOINT_TABLE_LIMIT {
        return Err(Error::InstanceTooLarge {
            count: width.pow(4) as u128,
            limit: JOINT_TABLE_LIMIT as u128,
        });
    }

    // Bin i holds indices m(i-1)+1 ..= mi; bin 0 holds index 0.
    let bin_terms: Vec<Vec<(u64, u64)>> = (0..=n)
        .map(|bin| {
            if bin == 0 {
                vec![(0, 1)]
            } else {
                (1..=m as u64)
                    .map(|r| {
                        let idx = m as u64 * (bin - 1) + r;
                        let v = term(params, SeqIndex(idx))
                            .to_u64()
                            .expect("term fits in u64 under the size guard");
                        (idx, v)
                    })
                    .collect()
            }
        })
        .collect();
    let radices: Vec<u64> = bin_terms.iter().map(|b| b.len() as u64 + 1).collect();
    let top = n as usize;
    let partitions = radices[top] as usize;

    let run_partition = |top_choice: usize| -> Partial {
        let mut part = Partial {
            values: Vec::new(),
            pnk: vec![0; n as usize + 2],
            gap_starts: vec![0; (width * width) as usize],
            joint: if options.joint {
                vec![0; width.pow(4) as usize]
            } else {
                Vec::new()
            },
            gap_pairs: 0,
        };
        let mut choice = vec![0usize; top + 1];
        choice[top] = top_choice;
        let mut indices: Vec<u64> = Vec::with_capacity(top + 1);
        loop {
            indices.clear();
            let mut value = 0u64;
            let mut ordinal = 0u64;
            let mut place = 1u64;
            for (bin, &c) in choice.iter().enumerate() {
                if c > 0 {
                    let (idx, v) = bin_terms[bin][c - 1];
                    indices.push(idx);
                    value += v;
                }
                ordinal += c as u64 * place;
                place *= radices[bin];
            }
            part.values.push((value, ordinal as u32));
            part.pnk[indices.len()] += 1;
            let gaps = indices.len().saturating_sub(1);
            part.gap_pairs += (gaps * gaps.saturating_sub(1) / 2) as u64;
            for w in indices.windows(2) {
                let g = w[1] - w[0];
                part.gap_starts[(w[0] * width + g) as usize] += 1;
            }
            if options.joint {
                for a in 0..gaps {
                    let (j1, g1) = (indices[a], indices[a + 1] - indices[a]);
                    for b in a + 1..gaps {
                        let (j2, g2) = (indices[b], indices[b + 1] - indices[b]);
                        let cell = ((j1 * width + g1) * width + j2) * width + g2;
                        part.joint[cell as usize] += 1;
                    }
                }
            }
            // Advance the odometer over the bins below the top one.
            let mut pos = 0;
            loop {
                if pos == top {
                    return part;
                }
                choice[pos] += 1;
                if (choice[pos] as u64) < radices[pos] {
                    break;
                }
                choice[pos] = 0;
                pos += 1;
            }
        }
    };

    // With n = 0 the top bin is b_0 itself and each partition is one vector.
    let partials: Vec<Partial> = options.execution.map_indexed(partitions, run_partition);

    let mut ordinal_of_value = vec![u32::MAX; size as usize];
    let mut pnk = vec![0u64; n as usize + 2];
    let mut gap_starts = vec![0u64; (width * width) as usize];
    let mut joint = vec![
        0u64;
        if options.joint {
            width.pow(4) as usize
        } else {
            0
        }
    ];
    let mut gap_pair_total = 0u64;
    for part in partials {
        for (value, ordinal) in part.values {
            let slot = ordinal_of_value
                .get_mut(value as usize)
                .ok_or(Error::ValueOutOfRange { value, size })?;
            if *slot != u32::MAX {
                return Err(Error::DuplicateValue { value });
            }
            *slot = ordinal;
        }
        for (a, b) in pnk.iter_mut().zip(part.pnk) {
            *a += b;
        }
        for (a, b) in gap_starts.iter_mut().zip(part.gap_starts) {
            *a += b;
        }
        for (a, b) in joint.iter_mut().zip(part.joint) {
            *a += b;
        }
        gap_pair_total += part.gap_pairs;
    }

    let mut gap_counts = BTreeMap::new();
    let mut gap_start_counts = BTreeMap::new();
    for (cell, &c) in gap_starts.iter().enumerate() {
        if c > 0 {
            let (i, g) = (cell as u64 / width, cell as u64 % width);
            gap_start_counts.insert((i, g), c);
            *gap_counts.entry(g).or_insert(0) += c;
        }
    }
    let n_gaps_total: u64 = gap_counts.values().sum();
    let signed_gap_sum = pnk
        .iter()
        .enumerate()
        .map(|(k, &c)| (k as i64 - 1) * c as i64)
        .sum();
    let joint_counts = options.joint.then(|| {
        joint
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(cell, &c)| {
                let cell = cell as u64;
                let g2 = cell % width;
                let j2 = cell / width % width;
                let g1 = cell / width / width % width;
                let j1 = cell / width / width / width;
                ((j1, g1, j2, g2), c)
            })
            .collect()
    });

    Ok(EnumerationCensus {
        m,
        n,
        size,
        ordinal_of_value,
        pnk_counts: pnk,
        gap_counts,
        gap_start_counts,
        n_gaps_total,
        signed_gap_sum,
        gap_pair_total,
        joint_counts,
    })
}

impl EnumerationCensus {
    /// True iff every value in `[0, size)` was produced (uniqueness is
    /// enforced during enumeration).
    pub fn is_complete(&self) -> bool {
        self.ordinal_of_value.iter().all(|&o| o != u32::MAX)
    }

    /// Indices of the decomposition the enumeration found for `z`.
    pub fn decomposition_of(&self, z: u64) -> Option<Vec<SeqIndex>> {
        let ordinal = *self.ordinal_of_value.get(z as usize)?;
        if ordinal == u32::MAX {
            return None;
        }
        let m = self.m as u64;
        let mut rest = ordinal as u64;
        let mut out = Vec::new();
        if rest % 2 == 1 {
            out.push(SeqIndex(0));
        }
        rest /= 2;
        for bin in 1..=self.n {
            let c = rest % (m + 1);
            rest /= m + 1;
            if c > 0 {
                out.push(SeqIndex(m * (bin - 1) + c));
            }
        }
        Some(out)
    }

    /// Mean summand count over the enumerated interval.
    pub fn mean_summands(&self) -> BigRational {
        let weighted: u64 = self
            .pnk_counts
            .iter()
            .enumerate()
            .map(|(k, &c)| k as u64 * c)
            .sum();
        BigRational::new(BigInt::from(weighted), BigInt::from(self.size))
    }

    /// Sum over `j1 < j2` of the joint counts for `(g1, g2)` within `scope`.
    pub fn joint_sum(&self, g1: u64, g2: u64, scope: JointScope) -> Result<u64> {
        let joint = self
            .joint_counts
            .as_ref()
            .ok_or_else(|| Error::param("census was built without joint counts"))?;
        Ok(joint
            .iter()
            .filter(|(&(j1, a, j2, b), _)| {
                a == g1
                    && b == g2
                    && match scope {
                        JointScope::All => true,
                        JointScope::MainTerm => j1 != 0 && j1 + g1 < j2,
                        JointScope::Boundary => j1 == 0 || j1 + g1 == j2,
                    }
            })
            .map(|(_, &c)| c)
            .sum())
    }
}

/// Which total [`census_gap_probability`] divides by.
pub use crate::exact::GapConvention;

/// Fraction of gaps of length `g`. `None` when the chosen total is zero.
pub fn census_gap_probability(
    census: &EnumerationCensus,
    g: u64,
    convention: GapConvention,
) -> Option<BigRational> {
    let count = census.gap_counts.get(&g).copied().unwrap_or(0);
    let total: i64 = match convention {
        GapConvention::Observed => census.n_gaps_total as i64,
        GapConvention::Signed => census.signed_gap_sum,
    };
    (total != 0).then(|| BigRational::new(BigInt::from(count), BigInt::from(total)))
}

/// `2 / (|I_n| mu_n^2) * sum_{j1<j2} X_{j1,j1+g1,j2,j2+g2}(n)`, with `mu_n`
/// the census's own mean summand count.
pub fn census_joint_statistic(
    census: &EnumerationCensus,
    g1: u64,
    g2: u64,
    scope: JointScope,
) -> Result<BigRational> {
    let sum = census.joint_sum(g1, g2, scope)?;
    let mu = census.mean_summands();
    if mu.is_zero() {
        return Ok(BigRational::zero());
    }
    let scale = BigRational::new(BigInt::from(2), BigInt::from(census.size)) / (&mu * &mu);
    Ok(scale * BigRational::from_integer(BigInt::from(sum)))
}

/// Limit on intervals tracked by [`sequence_by_definition`].
const INTERVAL_LIMIT: usize = 4096;

/// Sorted, disjoint, non-adjacent closed intervals of naturals.
fn normalize(mut spans: Vec<(BigUint, BigUint)>) -> Vec<(BigUint, BigUint)> {
    spans.sort();
    let mut out: Vec<(BigUint, BigUint)> = Vec::with_capacity(spans.len());
    for (lo, hi) in spans {
        if let Some(last) = out.last_mut() {
            if lo <= &last.1 + 1u32 {
                if hi > last.1 {
                    last.1 = hi;
                }
                continue;
            }
        }
        out.push((lo, hi));
    }
    out
}

/// Builds the sequence straight from its definition: each new term is the
/// smallest positive integer with no legal decomposition over the terms
/// chosen so far, bins being consecutive runs of `m` terms after `a_0`.
///
/// Representable sets are tracked as unions of intervals, so nothing about
/// the closed form is assumed. Errors if the union fragments beyond a
/// fixed limit.
pub fn sequence_by_definition(params: MGonParams, count: usize) -> Result<Vec<BigUint>> {
    let m = params.m() as usize;
    let mut out: Vec<BigUint> = Vec::with_capacity(count);
    // Sums over completed bins only.
    let mut closed = vec![(BigUint::zero(), BigUint::zero())];
    let mut open_bin: Vec<BigUint> = Vec::new();
    let current = |closed: &Vec<(BigUint, BigUint)>, open_bin: &Vec<BigUint>| {
        let mut spans = closed.clone();
        for t in open_bin {
            spans.extend(closed.iter().map(|(lo, hi)| (lo + t, hi + t)));
        }
        normalize(spans)
    };
    while out.len() < count {
        let reach = current(&closed, &open_bin);
        if reach.len() > INTERVAL_LIMIT {
            return Err(Error::InstanceTooLarge {
                count: reach.len() as u128,
                limit: INTERVAL_LIMIT as u128,
            });
        }
        // 0 is always representable, so the first span starts at 0.
        let next = &reach[0].1 + BigUint::one();
        out.push(next.clone());
        open_bin.push(next);
        let bin_len = if out.len() == 1 { 1 } else { m };
        if open_bin.len() == bin_len {
            closed = current(&closed, &open_bin);
            open_bin.clear();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: u32) -> MGonParams {
        MGonParams::new(m).unwrap()
    }

    fn census(m: u32, n: u64, joint: bool) -> EnumerationCensus {
        enumerate_all(
            p(m),
            n,
            CensusOptions {
                joint,
                execution: Execution::Sequential,
            },
        )
        .unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let c = census(3, 1, false);
        assert_eq!(c.size, 8);
        assert!(c.is_complete());
        assert_eq!(c.pnk_counts, vec![1, 4, 3]);

        let c = census(1, 3, false);
        assert_eq!(c.size, 16);
        assert!(c.is_complete());
        assert_eq!(c.pnk_counts, vec![1, 4, 6, 4, 1]);

        let c = census(2, 2, false);
        assert_eq!(c.size, 18);
        assert!(c.is_complete());
    }

    #[test]
    fn n_zero() {
        let c = census(4, 0, true);
        assert_eq!(c.size, 2);
        assert!(c.is_complete());
        assert_eq!(c.pnk_counts, vec![1, 1]);
        assert_eq!(c.n_gaps_total, 0);
        assert_eq!(c.signed_gap_sum, -1);
    }

    #[test]
    fn decomposition_lookup() {
        let c = census(2, 2, false);
        assert_eq!(c.decomposition_of(7), Some(vec![SeqIndex(0), SeqIndex(3)]));
        assert_eq!(c.decomposition_of(0), Some(vec![]));
        assert_eq!(c.decomposition_of(18), None);
    }

    #[test]
    fn size_guard() {
        let err = enumerate_all(p(9), 9, CensusOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InstanceTooLarge { .. }));
    }

    #[test]
    fn gap_probabilities() {
        let c = census(3, 2, false);
        let total: BigRational = (1..=10)
            .filter_map(|g| census_gap_probability(&c, g, GapConvention::Observed))
            .fold(BigRational::zero(), |a, b| a + b);
        assert_eq!(total, BigRational::one());
        assert_eq!(
            census_gap_probability(&c, 7, GapConvention::Observed),
            Some(BigRational::zero())
        );
        assert_eq!(c.signed_gap_sum + 1, c.n_gaps_total as i64);
        // m = 1, n = 1: one gap in total, signed sum zero.
        let c = census(1, 1, false);
        assert_eq!(census_gap_probability(&c, 1, GapConvention::Signed), None);
    }

    #[test]
    fn joint_statistic_basics() {
        let c = census(3, 4, true);
        // Pairs are ordered (j1 < j2), so swapping g1 and g2 changes the
        // finite-n value; only the limit is symmetric.
        assert_ne!(
            census_joint_statistic(&c, 1, 3, JointScope::All).unwrap(),
            census_joint_statistic(&c, 3, 1, JointScope::All).unwrap(),
        );
        assert!(census_joint_statistic(&c, 12, 1, JointScope::All)
            .unwrap()
            .is_zero());
        let all: u64 = c.joint_counts.as_ref().unwrap().values().sum();
        assert_eq!(all, c.gap_pair_total);
        let split = c.joint_sum(3, 3, JointScope::MainTerm).unwrap()
            + c.joint_sum(3, 3, JointScope::Boundary).unwrap();
        assert_eq!(split, c.joint_sum(3, 3, JointScope::All).unwrap());
        assert!(census(3, 2, false)
            .joint_sum(1, 1, JointScope::All)
            .is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let a = census(3, 5, true);
        let b = enumerate_all(
            p(3),
            5,
            CensusOptions {
                joint: true,
                execution: Execution::Parallel,
            },
        )
        .unwrap();
        assert_eq!(a.pnk_counts, b.pnk_counts);
        assert_eq!(a.gap_start_counts, b.gap_start_counts);
        assert_eq!(a.joint_counts, b.joint_counts);
        assert_eq!(a.ordinal_of_value, b.ordinal_of_value);
    }

    #[test]
    fn definition_builds_known_prefixes() {
        let got: Vec<u64> = sequence_by_definition(p(3), 16)
            .unwrap()
            .iter()
            .map(|v| v.to_u64().unwrap())
            .collect();
        assert_eq!(
            got,
            vec![1, 2, 4, 6, 8, 16, 24, 32, 64, 96, 128, 256, 384, 512, 1024, 1536]
        );
        let got: Vec<u64> = sequence_by_definition(p(2), 11)
            .unwrap()
            .iter()
            .map(|v| v.to_u64().unwrap())
            .collect();
        assert_eq!(got, vec![1, 2, 4, 6, 12, 18, 36, 54, 108, 162, 324]);
    }
}
