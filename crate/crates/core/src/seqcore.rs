//! Sequence terms, bin structure and the integer <-> decomposition codec.
//!
//! Index `n >= 1` is split as `n = m*k + r` with `1 <= r <= m` (note: `r`
//! runs to `m`, so this is not `n % m`). Term `a_n` is the `r`-th entry of
//! bin `b_{k+1}` and equals `2r(m+1)^k`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Bin size `m` together with the cached radix `m + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MGonParams {
    m: u32,
    radix: u32,
}

impl MGonParams {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("m must be at least 1"));
        }
        let radix = m
            .checked_add(1)
            .ok_or_else(|| Error::param("m is too large"))?;
        Ok(MGonParams { m, radix })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn radix(&self) -> u32 {
        self.radix
    }
}

/// Position `n` in the sequence `a_0, a_1, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SeqIndex(pub u64);

impl SeqIndex {
    /// Splits `n = m*k + r` with `1 <= r <= m`. `None` for `n = 0`, which
    /// sits alone in bin `b_0`.
    #[inline]
    pub fn split(self, params: MGonParams) -> Option<(u64, u32)> {
        if self.0 == 0 {
            return None;
        }
        let m = params.m as u64;
        let k = (self.0 - 1) / m;
        let r = self.0 - m * k;
        Some((k, r as u32))
    }

    /// Inverse of [`SeqIndex::split`].
    #[inline]
    pub fn from_parts(params: MGonParams, k: u64, r: u32) -> SeqIndex {
        debug_assert!(r >= 1 && r <= params.m);
        SeqIndex(params.m as u64 * k + r as u64)
    }
}

impl fmt::Display for SeqIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Bin number `i` of `b_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct BinIndex(pub u64);

impl fmt::Display for BinIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The term `a_n`.
pub fn term(params: MGonParams, n: SeqIndex) -> BigUint {
    match n.split(params) {
        None => BigUint::one(),
        Some((k, r)) => {
            let k = u32::try_from(k).expect("sequence index too large");
            BigUint::from(2 * r as u64) * BigUint::from(params.radix).pow(k)
        }
    }
}

/// `[a_0, ..., a_{count-1}]`.
pub fn sequence_prefix(params: MGonParams, count: u64) -> Result<Vec<BigUint>> {
    if count == 0 {
        return Err(Error::param("count must be at least 1"));
    }
    let mut out = Vec::with_capacity(count as usize);
    out.push(BigUint::one());
    let mut power = BigUint::one();
    'bins: loop {
        for r in 1..=params.m {
            if out.len() as u64 == count {
                break 'bins;
            }
            out.push(&power * (2 * r));
        }
        power *= params.radix;
    }
    Ok(out)
}

pub fn bin_of(params: MGonParams, n: SeqIndex) -> BinIndex {
    match n.split(params) {
        None => BinIndex(0),
        Some((k, _)) => BinIndex(k + 1),
    }
}

/// `Omega_n = a_0 + a_m + a_{2m} + ... + a_{nm}`, the largest value that
/// bins `b_0..=b_n` can represent.
pub fn omega(params: MGonParams, n: u64) -> BigUint {
    (0..=n)
        .map(|i| term(params, SeqIndex(params.m as u64 * i)))
        .sum()
}

/// True iff `indices` is strictly increasing and no two entries share a bin.
pub fn is_legal(params: MGonParams, indices: &[SeqIndex]) -> bool {
    indices
        .windows(2)
        .all(|w| w[0] < w[1] && bin_of(params, w[0]) != bin_of(params, w[1]))
}

/// Sum of the terms at `indices`, rejecting illegal index lists.
pub fn recompose(params: MGonParams, indices: &[SeqIndex]) -> Result<BigUint> {
    if let Some(w) = indices
        .windows(2)
        .find(|w| !(w[0] < w[1] && bin_of(params, w[0]) != bin_of(params, w[1])))
    {
        return Err(Error::IllegalDecomposition(format!(
            "indices {} and {} are out of order or share a bin",
            w[0], w[1]
        )));
    }
    Ok(indices.iter().map(|&i| term(params, i)).sum())
}

/// A legal decomposition: strictly increasing indices, at most one per bin.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition {
    indices: Vec<SeqIndex>,
    value: BigUint,
}

impl Decomposition {
    /// Validates `indices` and computes the represented value.
    pub fn from_indices(params: MGonParams, indices: Vec<SeqIndex>) -> Result<Self> {
        let value = recompose(params, &indices)?;
        Ok(Decomposition { indices, value })
    }

    pub(crate) fn from_parts_unchecked(indices: Vec<SeqIndex>, value: BigUint) -> Self {
        Decomposition { indices, value }
    }

    pub fn empty() -> Self {
        Decomposition {
            indices: Vec::new(),
            value: BigUint::zero(),
        }
    }

    /// Indices `l_1 < l_2 < ... < l_t`.
    pub fn indices(&self) -> &[SeqIndex] {
        &self.indices
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn summand_count(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The summands `a_{l_j}`, smallest first.
    pub fn summands(&self, params: MGonParams) -> Vec<BigUint> {
        self.indices.iter().map(|&i| term(params, i)).collect()
    }

    pub fn bins(&self, params: MGonParams) -> Vec<BinIndex> {
        self.indices.iter().map(|&i| bin_of(params, i)).collect()
    }
}

/// Differences of consecutive summand indices, in index order. The leading
/// distance `l_1 - 0` is not a gap.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
#[serde(transparent)]
pub struct GapMultiset {
    gaps: Vec<u64>,
}

impl GapMultiset {
    pub fn from_indices(indices: &[SeqIndex]) -> Self {
        GapMultiset {
            gaps: indices.windows(2).map(|w| w[1].0 - w[0].0).collect(),
        }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.gaps.iter().copied().max()
    }

    /// Multiplicity of each gap length.
    pub fn counts(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for &g in &self.gaps {
            *out.entry(g).or_insert(0) += 1;
        }
        out
    }
}

pub fn gaps_of(d: &Decomposition) -> GapMultiset {
    GapMultiset::from_indices(&d.indices)
}

/// Parity bit plus base-`(m+1)` digits.
///
/// Bin `b_{k+1}` holds exactly `{2r(m+1)^k : 1 <= r <= m}`, so a legal
/// decomposition is the same thing as a choice of `a_0` (the parity bit)
/// and one digit `d_k` in `0..=m` per bin, with value
/// `parity + 2 * sum_k d_k (m+1)^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DigitVector {
    pub parity_bit: bool,
    /// Least significant first; trailing zeros are allowed.
    pub digits: Vec<u32>,
}

impl DigitVector {
    pub fn from_value(params: MGonParams, z: &BigUint) -> Self {
        let parity_bit = z.is_odd();
        let half: BigUint = z >> 1u32;
        let digits = if half.is_zero() {
            Vec::new()
        } else if params.radix <= 256 {
            half.to_radix_le(params.radix)
                .into_iter()
                .map(u32::from)
                .collect()
        } else {
            let radix = BigUint::from(params.radix);
            let mut rest = half;
            let mut digits = Vec::new();
            while !rest.is_zero() {
                let (q, r) = rest.div_rem(&radix);
                digits.push(r.to_u32().expect("digit below radix"));
                rest = q;
            }
            digits
        };
        DigitVector { parity_bit, digits }
    }

    pub fn value(&self, params: MGonParams) -> BigUint {
        let mut acc = BigUint::zero();
        for &d in self.digits.iter().rev() {
            acc *= params.radix;
            acc += d;
        }
        (acc << 1u32) + u32::from(self.parity_bit)
    }

    /// Sequence indices selected by this vector, ascending.
    pub fn indices(&self, params: MGonParams) -> Vec<SeqIndex> {
        let mut out = Vec::with_capacity(self.digits.len() + 1);
        if self.parity_bit {
            out.push(SeqIndex(0));
        }
        out.extend(
            self.digits
                .iter()
                .enumerate()
                .filter(|&(_, &d)| d != 0)
                .map(|(k, &d)| SeqIndex::from_parts(params, k as u64, d)),
        );
        out
    }

    pub fn summand_count(&self) -> usize {
        usize::from(self.parity_bit) + self.digits.iter().filter(|&&d| d != 0).count()
    }

    pub fn to_decomposition(&self, params: MGonParams) -> Decomposition {
        Decomposition::from_parts_unchecked(self.indices(params), self.value(params))
    }
}

/// The unique legal decomposition of `z`, via its digit vector.
pub fn decompose(params: MGonParams, z: &BigUint) -> Decomposition {
    let digits = DigitVector::from_value(params, z);
    Decomposition::from_parts_unchecked(digits.indices(params), z.clone())
}

/// Decomposition by repeatedly taking the largest term that still fits.
///
/// Kept as an independent cross-check of [`decompose`].
pub fn decompose_greedy(params: MGonParams, z: &BigUint) -> Decomposition {
    let mut terms = Vec::new();
    let mut n = 0u64;
    loop {
        let t = term(params, SeqIndex(n));
        if &t > z {
            break;
        }
        terms.push(t);
        n += 1;
    }
    let mut rest = z.clone();
    let mut picked = Vec::new();
    for (i, t) in terms.iter().enumerate().rev() {
        if rest.is_zero() {
            break;
        }
        if t <= &rest {
            rest -= t;
            picked.push(SeqIndex(i as u64));
        }
    }
    debug_assert!(rest.is_zero());
    picked.reverse();
    Decomposition::from_parts_unchecked(picked, z.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(m: u32) -> MGonParams {
        MGonParams::new(m).unwrap()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn idx(v: &[u64]) -> Vec<SeqIndex> {
        v.iter().copied().map(SeqIndex).collect()
    }

    #[test]
    fn rejects_zero_m() {
        assert!(MGonParams::new(0).is_err());
        assert_eq!(p(4).radix(), 5);
    }

    #[test]
    fn term_examples() {
        // Bin b_2 of m = 3 is [8, 16, 24] = a_4..a_6; a_7 opens b_3.
        assert_eq!(term(p(3), SeqIndex(5)), big(16));
        assert_eq!(term(p(3), SeqIndex(7)), big(32));
        assert_eq!(term(p(2), SeqIndex(6)), big(36));
        assert_eq!(term(p(1), SeqIndex(10)), big(1024));
        for m in 1..6 {
            assert_eq!(term(p(m), SeqIndex(0)), big(1));
        }
    }

    #[test]
    fn split_uses_r_up_to_m() {
        assert_eq!(SeqIndex(0).split(p(3)), None);
        assert_eq!(SeqIndex(3).split(p(3)), Some((0, 3)));
        assert_eq!(SeqIndex(4).split(p(3)), Some((1, 1)));
        assert_eq!(SeqIndex(6).split(p(3)), Some((1, 3)));
        assert_eq!(SeqIndex(5).split(p(1)), Some((4, 1)));
    }

    #[test]
    fn prefix_examples() {
        let as_u64 = |v: Vec<BigUint>| v.iter().map(|x| x.to_u64().unwrap()).collect::<Vec<_>>();
        assert_eq!(
            as_u64(sequence_prefix(p(3), 7).unwrap()),
            vec![1, 2, 4, 6, 8, 16, 24]
        );
        assert_eq!(
            as_u64(sequence_prefix(p(2), 5).unwrap()),
            vec![1, 2, 4, 6, 12]
        );
        assert_eq!(as_u64(sequence_prefix(p(1), 4).unwrap()), vec![1, 2, 4, 8]);
        assert!(sequence_prefix(p(1), 0).is_err());
    }

    #[test]
    fn prefix_matches_term() {
        for m in 1..=5 {
            let pre = sequence_prefix(p(m), 60).unwrap();
            for (n, t) in pre.iter().enumerate() {
                assert_eq!(*t, term(p(m), SeqIndex(n as u64)));
            }
        }
    }

    #[test]
    fn bin_examples() {
        assert_eq!(bin_of(p(3), SeqIndex(0)), BinIndex(0));
        assert_eq!(bin_of(p(3), SeqIndex(4)), BinIndex(2));
        assert_eq!(bin_of(p(2), SeqIndex(6)), BinIndex(3));
        assert_eq!(bin_of(p(3), SeqIndex(3)), BinIndex(1));
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega(p(3), 0), big(1));
        assert_eq!(omega(p(3), 1), big(7));
        assert_eq!(omega(p(2), 2), big(17));
    }

    #[test]
    fn decompose_2015() {
        let d = decompose(p(3), &big(2015));
        assert_eq!(d.indices(), idx(&[0, 3, 6, 8, 12, 15]).as_slice());
        let values: Vec<u64> = d
            .summands(p(3))
            .iter()
            .rev()
            .map(|v| v.to_u64().unwrap())
            .collect();
        assert_eq!(values, vec![1536, 384, 64, 24, 6, 1]);
        assert_eq!(gaps_of(&d).as_slice(), &[3, 3, 2, 4, 3]);
    }

    #[test]
    fn decompose_small_examples() {
        assert!(decompose(p(4), &big(0)).is_empty());
        assert_eq!(decompose(p(2), &big(7)).indices(), idx(&[0, 3]).as_slice());
        let bin13: Vec<u64> = decompose(p(1), &big(13))
            .summands(p(1))
            .iter()
            .map(|v| v.to_u64().unwrap())
            .collect();
        assert_eq!(bin13, vec![1, 4, 8]);
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(
            decompose_greedy(p(3), &big(2015)),
            decompose(p(3), &big(2015))
        );
        assert_eq!(
            decompose_greedy(p(3), &big(7)).indices(),
            idx(&[0, 3]).as_slice()
        );
        for m in 1..5 {
            assert_eq!(
                decompose_greedy(p(m), &big(1)).indices(),
                idx(&[0]).as_slice()
            );
            assert!(decompose_greedy(p(m), &big(0)).is_empty());
        }
    }

    #[test]
    fn recompose_examples() {
        assert_eq!(
            recompose(p(3), &idx(&[0, 3, 6, 8, 12, 15])).unwrap(),
            big(2015)
        );
        assert_eq!(recompose(p(3), &[]).unwrap(), big(0));
        assert!(matches!(
            recompose(p(3), &idx(&[1, 2])),
            Err(Error::IllegalDecomposition(_))
        ));
        assert!(recompose(p(3), &idx(&[5, 4])).is_err());
        assert!(Decomposition::from_indices(p(3), idx(&[1, 3])).is_err());
    }

    #[test]
    fn legality_examples() {
        assert!(is_legal(p(3), &idx(&[0, 3, 6])));
        assert!(!is_legal(p(3), &idx(&[1, 3])));
        assert!(is_legal(p(2), &[]));
        assert!(!is_legal(p(2), &idx(&[3, 3])));
        assert!(is_legal(p(1), &idx(&[0, 1, 2, 3])));
    }

    #[test]
    fn gaps_edge_cases() {
        let single = decompose(p(3), &big(16));
        assert!(gaps_of(&single).is_empty());
        assert_eq!(gaps_of(&decompose(p(2), &big(7))).as_slice(), &[3]);
        assert_eq!(gaps_of(&Decomposition::empty()).len(), 0);
    }

    #[test]
    fn digit_vector_roundtrip_large_radix() {
        let params = p(300);
        let z = BigUint::from(123_456_789_012_345u64);
        let dv = DigitVector::from_value(params, &z);
        assert!(dv.digits.iter().all(|&d| d <= 300));
        assert_eq!(dv.value(params), z);
        assert_eq!(recompose(params, &dv.indices(params)).unwrap(), z);
    }
}
