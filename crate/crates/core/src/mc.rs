//! Seeded Monte Carlo experiments.
//!
//! A run is split into `chunks` pieces of near-equal size. Chunk `i` draws
//! from `ChaCha8Rng::seed_from_u64(seed)` switched to stream `i`, and keeps
//! a private accumulator; accumulators are merged in chunk order. Output is
//! therefore a function of `(config, chunks)` only, whether the chunks run
//! sequentially or on the rayon pool.
//!
//! Two samplers are used:
//!
//! * full interval `I_n`: a fair parity bit plus `n` uniform digits in
//!   `0..=m`, which is uniform on `I_n` and gives the summand indices
//!   directly with no big-integer work;
//! * bracket `[a_n, a_{n+1})`: a uniform big integer decoded with
//!   [`decompose`].

use std::collections::BTreeMap;

use num_bigint::{BigUint, RandBigInt};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::exact::{self, rational_to_f64, LongestGapPrediction};
use crate::exec::Execution;
use crate::seqcore::{decompose, term, Decomposition, DigitVector, MGonParams, SeqIndex};

/// Chunk count used when none is given.
pub const DEFAULT_CHUNKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalKind {
    /// `I_n = [0, a_{mn+1})`.
    Full,
    /// `[a_n, a_{n+1})`.
    Bracket,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SamplerConfig {
    pub m: u32,
    pub n: u64,
    pub interval: IntervalKind,
    pub samples: u64,
    pub seed: u64,
    pub chunks: usize,
}

impl SamplerConfig {
    pub fn new(
        params: MGonParams,
        n: u64,
        interval: IntervalKind,
        samples: u64,
        seed: u64,
    ) -> Result<Self> {
        let config = SamplerConfig {
            m: params.m(),
            n,
            interval,
            samples,
            seed,
            chunks: DEFAULT_CHUNKS,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_chunks(mut self, chunks: usize) -> Result<Self> {
        self.chunks = chunks;
        self.validate()?;
        Ok(self)
    }

    pub fn params(&self) -> MGonParams {
        MGonParams::new(self.m).expect("validated")
    }

    fn validate(&self) -> Result<()> {
        MGonParams::new(self.m)?;
        if self.samples == 0 {
            return Err(Error::param("sample count must be at least 1"));
        }
        if self.chunks == 0 {
            return Err(Error::param("chunk count must be at least 1"));
        }
        Ok(())
    }

    fn chunk_len(&self, chunk: usize) -> u64 {
        let c = self.chunks as u64;
        self.samples / c + u64::from((chunk as u64) < self.samples % c)
    }
}

/// The RNG for one chunk.
pub fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn draw_digits<R: Rng>(rng: &mut R, params: MGonParams, n: u64) -> DigitVector {
    DigitVector {
        parity_bit: rng.gen(),
        digits: (0..n).map(|_| rng.gen_range(0..=params.m())).collect(),
    }
}

/// Summand indices of a uniform draw from `I_n`, written into `out`.
fn draw_full_indices<R: Rng>(rng: &mut R, params: MGonParams, n: u64, out: &mut Vec<u64>) {
    out.clear();
    if rng.gen::<bool>() {
        out.push(0);
    }
    let m = params.m() as u64;
    for k in 0..n {
        let d = rng.gen_range(0..=params.m()) as u64;
        if d != 0 {
            out.push(m * k + d);
        }
    }
}

struct Bracket {
    low: BigUint,
    high: BigUint,
}

impl Bracket {
    fn new(params: MGonParams, n: u64) -> Self {
        Bracket {
            low: term(params, SeqIndex(n)),
            high: term(params, SeqIndex(n + 1)),
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R, params: MGonParams) -> Decomposition {
        decompose(params, &rng.gen_biguint_range(&self.low, &self.high))
    }
}

/// Runs `visit` on the summand indices of every sample, one accumulator per
/// chunk, and returns the accumulators in chunk order.
fn run_chunks<A, F>(config: &SamplerConfig, exec: Execution, visit: F) -> Vec<A>
where
    A: Default + Send,
    F: Fn(&mut A, &[u64]) + Sync + Send,
{
    let params = config.params();
    let bracket =
        (config.interval == IntervalKind::Bracket).then(|| Bracket::new(params, config.n));
    exec.map_indexed(config.chunks, |chunk| {
        let mut rng = chunk_rng(config.seed, chunk);
        let mut acc = A::default();
        let mut buf = Vec::new();
        for _ in 0..config.chunk_len(chunk) {
            match &bracket {
                None => draw_full_indices(&mut rng, params, config.n, &mut buf),
                Some(b) => {
                    buf.clear();
                    buf.extend(b.draw(&mut rng, params).indices().iter().map(|i| i.0));
                }
            }
            visit(&mut acc, &buf);
        }
        acc
    })
}

/// Draws `config.samples` decompositions, in chunk order.
pub fn sample_uniform(config: &SamplerConfig, exec: Execution) -> Vec<Decomposition> {
    let params = config.params();
    let bracket =
        (config.interval == IntervalKind::Bracket).then(|| Bracket::new(params, config.n));
    exec.map_indexed(config.chunks, |chunk| {
        let mut rng = chunk_rng(config.seed, chunk);
        (0..config.chunk_len(chunk))
            .map(|_| match &bracket {
                None => draw_digits(&mut rng, params, config.n).to_decomposition(params),
                Some(b) => b.draw(&mut rng, params),
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Extra fields of a longest-gap run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LongestGapSummary {
    pub prediction: LongestGapPrediction,
    /// Empirical mean minus the main term.
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: SamplerConfig,
    /// Number of observations behind the histogram: samples, or pooled gaps.
    pub observations: u64,
    pub sample_mean: f64,
    /// Unbiased (`N - 1`) estimator.
    pub sample_variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub histogram: BTreeMap<u64, u64>,
    /// Against the standard normal (summand counts) or the limiting gap
    /// law (gap lengths).
    pub ks_statistic: Option<f64>,
    pub predicted_mean: f64,
    pub predicted_variance: f64,
    pub longest: Option<LongestGapSummary>,
}

struct HistogramMoments {
    total: u64,
    mean: f64,
    variance: f64,
    skewness: f64,
    excess_kurtosis: f64,
}

fn histogram_moments(hist: &BTreeMap<u64, u64>) -> HistogramMoments {
    let total: u64 = hist.values().sum();
    if total == 0 {
        return HistogramMoments {
            total,
            mean: f64::NAN,
            variance: f64::NAN,
            skewness: f64::NAN,
            excess_kurtosis: f64::NAN,
        };
    }
    let n = total as f64;
    let mean = hist.iter().map(|(&k, &c)| k as f64 * c as f64).sum::<f64>() / n;
    let central = |p: i32| {
        hist.iter()
            .map(|(&k, &c)| (k as f64 - mean).powi(p) * c as f64)
            .sum::<f64>()
            / n
    };
    let (m2, m3, m4) = (central(2), central(3), central(4));
    HistogramMoments {
        total,
        mean,
        variance: if total > 1 { m2 * n / (n - 1.0) } else { 0.0 },
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    }
}

fn merge_histograms(parts: Vec<BTreeMap<u64, u64>>) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    for part in parts {
        for (k, c) in part {
            *out.entry(k).or_insert(0) += c;
        }
    }
    out
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// KS distance between a lattice histogram standardised by `(mean, sd)`
/// and the standard normal, comparing the empirical CDF at `k` with
/// `Phi((k + 1/2 - mean) / sd)` (continuity correction).
pub fn ks_against_normal(hist: &BTreeMap<u64, u64>, mean: f64, sd: f64) -> f64 {
    let total: u64 = hist.values().sum();
    let (Some((&lo, _)), Some((&hi, _))) = (hist.first_key_value(), hist.last_key_value()) else {
        return f64::NAN;
    };
    let mut cum = 0u64;
    let mut worst = 0.0f64;
    for k in lo as i64 - 1..=hi as i64 {
        if k >= 0 {
            cum += hist.get(&(k as u64)).copied().unwrap_or(0);
        }
        let emp = cum as f64 / total as f64;
        let model = standard_normal_cdf((k as f64 + 0.5 - mean) / sd);
        worst = worst.max((emp - model).abs());
    }
    worst
}

/// CDF of the limiting gap law at `g = 0..=g_max`, as floats.
pub fn limit_gap_cdf(params: MGonParams, g_max: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(g_max as usize + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for g in 1..=g_max {
        acc += rational_to_f64(&exact::gap_prob_limit(params, g).expect("g >= 1"));
        out.push(acc.min(1.0));
    }
    out
}

/// Mean and variance of the limiting gap law.
pub fn limit_gap_moments(params: MGonParams) -> (f64, f64) {
    // P(g) decays by a factor m+1 per m steps; 64 blocks reach 2^-64.
    let g_max = 64 * params.m() as u64 + params.m() as u64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for g in 1..=g_max {
        let p = rational_to_f64(&exact::gap_prob_limit(params, g).expect("g >= 1"));
        s1 += g as f64 * p;
        s2 += (g * g) as f64 * p;
    }
    (s1, s2 - s1 * s1)
}

/// Distribution of the number of summands.
pub fn run_summand_experiment(config: &SamplerConfig, exec: Execution) -> ExperimentReport {
    let parts = run_chunks(config, exec, |h: &mut BTreeMap<u64, u64>, idx| {
        *h.entry(idx.len() as u64).or_insert(0) += 1;
    });
    let histogram = merge_histograms(parts);
    let stats = histogram_moments(&histogram);
    let (predicted_mean, predicted_variance) = match config.interval {
        IntervalKind::Full => {
            let mm = exact::exact_moments(config.params(), config.n);
            (mm.mean_f64(), mm.variance_f64())
        }
        // Not a closed form here; standardise by the sample itself.
        IntervalKind::Bracket => (stats.mean, stats.variance),
    };
    let ks = ks_against_normal(&histogram, predicted_mean, predicted_variance.sqrt());
    ExperimentReport {
        config: config.clone(),
        observations: stats.total,
        sample_mean: stats.mean,
        sample_variance: stats.variance,
        skewness: stats.skewness,
        excess_kurtosis: stats.excess_kurtosis,
        histogram,
        ks_statistic: Some(ks),
        predicted_mean,
        predicted_variance,
        longest: None,
    }
}

/// All gaps of all samples pooled into one histogram.
pub fn run_gap_experiment(config: &SamplerConfig, exec: Execution) -> ExperimentReport {
    let parts = run_chunks(config, exec, |h: &mut BTreeMap<u64, u64>, idx| {
        for w in idx.windows(2) {
            *h.entry(w[1] - w[0]).or_insert(0) += 1;
        }
    });
    let histogram = merge_histograms(parts);
    let stats = histogram_moments(&histogram);
    let params = config.params();
    let (predicted_mean, predicted_variance) = limit_gap_moments(params);
    let ks = histogram.last_key_value().map(|(&g_max, _)| {
        let cdf = limit_gap_cdf(params, g_max);
        let mut cum = 0u64;
        let mut worst = 0.0f64;
        for g in 1..=g_max {
            cum += histogram.get(&g).copied().unwrap_or(0);
            let emp = cum as f64 / stats.total as f64;
            worst = worst.max((emp - cdf[g as usize]).abs());
        }
        worst
    });
    ExperimentReport {
        config: config.clone(),
        observations: stats.total,
        sample_mean: stats.mean,
        sample_variance: stats.variance,
        skewness: stats.skewness,
        excess_kurtosis: stats.excess_kurtosis,
        histogram,
        ks_statistic: ks,
        predicted_mean,
        predicted_variance,
        longest: None,
    }
}

/// One row of an empirical gap table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRow {
    pub g: u64,
    pub alpha: u64,
    pub beta: u64,
    pub empirical: f64,
    pub limit: f64,
    /// Closed-form finite-n value (signed convention), when defined.
    pub finite: Option<f64>,
}

/// Empirical `P(g)` for `g = 1..=g_max` next to the exact values.
pub fn gap_rows(report: &ExperimentReport, g_max: u64) -> Vec<GapRow> {
    let params = report.config.params();
    let n = report.config.n;
    (1..=g_max)
        .map(|g| {
            let (alpha, beta) = exact::gap_parts(params, g);
            let count = report.histogram.get(&g).copied().unwrap_or(0);
            let finite = (n >= 1)
                .then(|| exact::gap_prob_finite(params, n, g).ok())
                .flatten()
                .and_then(|f| f.signed)
                .map(|r| rational_to_f64(&r));
            GapRow {
                g,
                alpha,
                beta,
                empirical: if report.observations == 0 {
                    0.0
                } else {
                    count as f64 / report.observations as f64
                },
                limit: rational_to_f64(&exact::gap_prob_limit(params, g).expect("g >= 1")),
                finite,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndividualGapReport {
    pub config: SamplerConfig,
    /// KS distance between each sample's gap measure and the limiting law,
    /// for samples with at least one gap, in draw order.
    #[serde(skip)]
    pub distances: Vec<f64>,
    pub evaluated: u64,
    /// Samples with fewer than two summands.
    pub skipped: u64,
    pub mean: f64,
    pub median: f64,
    pub p90: f64,
}

/// Nearest-rank quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = (q * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// KS distance between the gap measure of one decomposition (mass
/// `1/(k-1)` per gap) and the limiting gap law with CDF `cdf`.
pub fn individual_ks(gaps: &[u64], cdf: &[f64]) -> f64 {
    let mut sorted = gaps.to_vec();
    sorted.sort_unstable();
    let total = sorted.len() as f64;
    let g_max = *sorted.last().expect("at least one gap");
    let mut worst = 0.0f64;
    let mut seen = 0usize;
    for g in 1..=g_max {
        while seen < sorted.len() && sorted[seen] <= g {
            seen += 1;
        }
        worst = worst.max((seen as f64 / total - cdf[g as usize]).abs());
    }
    worst
}

#[derive(Default)]
struct IndividualAcc {
    distances: Vec<f64>,
    skipped: u64,
}

/// Per-sample distance between the spacing gap measure and the limit.
pub fn run_individual_gap_experiment(
    config: &SamplerConfig,
    exec: Execution,
) -> IndividualGapReport {
    let params = config.params();
    let top_index = match config.interval {
        IntervalKind::Full => params.m() as u64 * config.n,
        IntervalKind::Bracket => config.n,
    };
    let cdf = limit_gap_cdf(params, top_index.max(1));
    let parts = run_chunks(config, exec, |acc: &mut IndividualAcc, idx| {
        if idx.len() < 2 {
            acc.skipped += 1;
            return;
        }
        let gaps: Vec<u64> = idx.windows(2).map(|w| w[1] - w[0]).collect();
        acc.distances.push(individual_ks(&gaps, &cdf));
    });
    let mut distances = Vec::new();
    let mut skipped = 0;
    for part in parts {
        distances.extend(part.distances);
        skipped += part.skipped;
    }
    let mut sorted = distances.clone();
    sorted.sort_by(f64::total_cmp);
    IndividualGapReport {
        config: config.clone(),
        evaluated: distances.len() as u64,
        skipped,
        mean: distances.iter().sum::<f64>() / distances.len() as f64,
        median: quantile(&sorted, 0.5),
        p90: quantile(&sorted, 0.9),
        distances,
    }
}

/// Longest gap of `z` uniform in `[a_n, a_{n+1})`; zero for fewer than two
/// summands.
pub fn run_longest_gap_experiment(
    config: &SamplerConfig,
    exec: Execution,
) -> Result<ExperimentReport> {
    if config.interval != IntervalKind::Bracket {
        return Err(Error::param(
            "the longest-gap experiment samples from [a_n, a_{n+1})",
        ));
    }
    let params = config.params();
    let prediction = exact::longest_gap_prediction(params, config.n)?;
    let parts = run_chunks(config, exec, |h: &mut BTreeMap<u64, u64>, idx| {
        let longest = idx.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        *h.entry(longest).or_insert(0) += 1;
    });
    let histogram = merge_histograms(parts);
    let stats = histogram_moments(&histogram);
    Ok(ExperimentReport {
        config: config.clone(),
        observations: stats.total,
        sample_mean: stats.mean,
        sample_variance: stats.variance,
        skewness: stats.skewness,
        excess_kurtosis: stats.excess_kurtosis,
        histogram,
        ks_statistic: None,
        predicted_mean: prediction.main_term,
        predicted_variance: prediction.refined_variance,
        longest: Some(LongestGapSummary {
            prediction,
            offset: stats.mean - prediction.main_term,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::is_legal;
    use num_traits::ToPrimitive;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn p(m: u32) -> MGonParams {
        MGonParams::new(m).unwrap()
    }

    fn cfg(m: u32, n: u64, kind: IntervalKind, samples: u64, seed: u64) -> SamplerConfig {
        SamplerConfig::new(p(m), n, kind, samples, seed).unwrap()
    }

    fn chi_square_99(df: f64) -> f64 {
        ChiSquared::new(df).unwrap().inverse_cdf(0.99)
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::new(p(2), 3, IntervalKind::Full, 0, 1).is_err());
        assert!(cfg(2, 3, IntervalKind::Full, 10, 1).with_chunks(0).is_err());
        let c = cfg(2, 3, IntervalKind::Full, 10, 1).with_chunks(3).unwrap();
        assert_eq!(
            (0..3).map(|i| c.chunk_len(i)).collect::<Vec<_>>(),
            vec![4, 3, 3]
        );
        let c = cfg(2, 3, IntervalKind::Full, 2, 1).with_chunks(5).unwrap();
        assert_eq!((0..5).map(|i| c.chunk_len(i)).sum::<u64>(), 2);
    }

    #[test]
    fn full_sampler_is_uniform() {
        // I_3 for m = 2 is [0, 54).
        let c = cfg(2, 3, IntervalKind::Full, 1_000_000, 20_251_016);
        let mut freq = vec![0u64; 54];
        for d in sample_uniform(&c, Execution::Parallel) {
            assert!(is_legal(p(2), d.indices()));
            freq[d.value().to_usize().unwrap()] += 1;
        }
        let expected = 1_000_000.0 / 54.0;
        let chi2: f64 = freq
            .iter()
            .map(|&f| (f as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < chi_square_99(53.0), "chi2 = {chi2}");
    }

    #[test]
    fn binary_summand_counts_are_binomial() {
        let c = cfg(1, 8, IntervalKind::Full, 200_000, 7);
        let r = run_summand_experiment(&c, Execution::Parallel);
        let binom = crate::exact::binomial_row(9);
        let total = r.observations as f64;
        let chi2: f64 = (0..=9u64)
            .map(|k| {
                let e = total * binom[k as usize].to_f64().unwrap() / 512.0;
                let o = r.histogram.get(&k).copied().unwrap_or(0) as f64;
                (o - e).powi(2) / e
            })
            .sum();
        assert!(chi2 < chi_square_99(9.0), "chi2 = {chi2}");
    }

    #[test]
    fn digit_sampler_mean() {
        let c = cfg(3, 40, IntervalKind::Full, 100_000, 3);
        let r = run_summand_experiment(&c, Execution::Parallel);
        let se = (r.predicted_variance / 100_000f64).sqrt();
        assert_eq!(r.predicted_mean, 0.5 + 40.0 * 3.0 / 4.0);
        assert!((r.sample_mean - r.predicted_mean).abs() < 4.0 * se);
        assert_eq!(r.histogram.values().sum::<u64>(), 100_000);
    }

    #[test]
    fn tiny_interval_distribution() {
        // I_1 for m = 1 is {0, 1, 2, 3}: summand counts 0, 1, 1, 2.
        let r = run_summand_experiment(
            &cfg(1, 1, IntervalKind::Full, 80_000, 5),
            Execution::Parallel,
        );
        let frac = |k| r.histogram.get(&k).copied().unwrap_or(0) as f64 / 80_000.0;
        assert!((frac(0) - 0.25).abs() < 0.01);
        assert!((frac(1) - 0.5).abs() < 0.01);
        assert!((frac(2) - 0.25).abs() < 0.01);
        assert_eq!(r.histogram.len(), 3);
    }

    #[test]
    fn reports_are_deterministic_across_modes() {
        let c = cfg(3, 50, IntervalKind::Full, 5_000, 99)
            .with_chunks(7)
            .unwrap();
        let a = run_summand_experiment(&c, Execution::Sequential);
        let b = run_summand_experiment(&c, Execution::Parallel);
        assert_eq!(a, b);
        let c = cfg(2, 30, IntervalKind::Bracket, 2_000, 99);
        assert_eq!(
            run_longest_gap_experiment(&c, Execution::Sequential).unwrap(),
            run_longest_gap_experiment(&c, Execution::Parallel).unwrap()
        );
        let other = cfg(3, 50, IntervalKind::Full, 5_000, 100)
            .with_chunks(7)
            .unwrap();
        assert_ne!(
            a.histogram,
            run_summand_experiment(&other, Execution::Parallel).histogram
        );
    }

    #[test]
    fn bracket_samples_stay_in_range() {
        let c = cfg(3, 20, IntervalKind::Bracket, 2_000, 11);
        let low = term(p(3), SeqIndex(20));
        let high = term(p(3), SeqIndex(21));
        for d in sample_uniform(&c, Execution::Parallel) {
            assert!(d.value() >= &low && d.value() < &high);
            assert_eq!(d.indices().last(), Some(&SeqIndex(20)));
        }
    }

    #[test]
    fn gap_histogram_is_a_distribution() {
        let c = cfg(3, 100, IntervalKind::Full, 5_000, 1);
        let r = run_gap_experiment(&c, Execution::Parallel);
        let rows = gap_rows(&r, 300);
        let total: f64 = rows.iter().map(|row| row.empirical).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(r.histogram.values().sum::<u64>(), r.observations);
        let third = &rows[2];
        assert_eq!((third.alpha, third.beta), (1, 0));
        let se = (0.25f64 * 0.75 / r.observations as f64).sqrt();
        assert!((third.empirical - 0.25).abs() < 4.0 * se + 0.01);
    }

    #[test]
    fn binary_gaps_are_geometric() {
        let c = cfg(1, 200, IntervalKind::Full, 2_000, 4);
        let r = run_gap_experiment(&c, Execution::Parallel);
        for row in gap_rows(&r, 4) {
            assert_eq!(row.limit, 0.5f64.powi(row.g as i32));
            let finite = row.finite.unwrap();
            let se = (finite * (1.0 - finite) / r.observations as f64).sqrt();
            assert!((row.empirical - finite).abs() < 4.0 * se, "{row:?}");
            assert!((finite - row.limit).abs() < 2.0 / 200.0, "{row:?}");
        }
    }

    #[test]
    fn individual_ks_edge_cases() {
        let cdf = limit_gap_cdf(p(3), 30);
        // A point mass at 3 against a law with P(<=2) = 1/4, P(<=3) = 1/2.
        let d = individual_ks(&[3], &cdf);
        assert!((d - 0.5).abs() < 1e-12);
        let r = run_individual_gap_experiment(
            &cfg(3, 60, IntervalKind::Full, 2_000, 2),
            Execution::Parallel,
        );
        assert!(r.distances.iter().all(|&x| (0.0..=1.0).contains(&x)));
        assert_eq!(r.evaluated + r.skipped, 2_000);
        assert!(r.median <= r.p90);
    }

    #[test]
    fn longest_gap_requires_bracket_and_range() {
        let full = cfg(3, 600, IntervalKind::Full, 10, 1);
        assert!(run_longest_gap_experiment(&full, Execution::Parallel).is_err());
        let short = cfg(3, 5, IntervalKind::Bracket, 10, 1);
        assert!(run_longest_gap_experiment(&short, Execution::Parallel).is_err());
    }

    #[test]
    fn normal_cdf_values() {
        assert!((standard_normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((standard_normal_cdf(1.96) - 0.975_002_1).abs() < 1e-6);
    }
}
