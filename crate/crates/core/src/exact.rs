//! Exact combinatorics of the m-gonal system.
//!
//! Everything here is big-integer or big-rational arithmetic, except the
//! longest-run predictors which are inherently floating point.
//!
//! Conventions used throughout: `I_n = [0, a_{mn+1})` has `2(m+1)^n`
//! elements; `p_{n,k}` counts the `z` in `I_n` with exactly `k` summands;
//! a gap length is split as `g = m*alpha + beta` with `0 <= beta < m`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seqcore::{term, MGonParams, SeqIndex};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Band for the bounded `r_i(n)` terms of the longest-run formulas, which
/// are not modelled.
pub const LONGEST_RUN_MODEL_ERROR: f64 = 1e-4;

pub(crate) fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn radix_pow(params: MGonParams, e: u64) -> BigUint {
    BigUint::from(params.radix()).pow(u32::try_from(e).expect("exponent too large"))
}

/// Lossy conversion for reporting.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The interval `I_n = [0, a_{mn+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSpec {
    pub m: u32,
    pub n: u64,
    pub size: BigUint,
}

impl IntervalSpec {
    pub fn new(params: MGonParams, n: u64) -> Self {
        IntervalSpec {
            m: params.m(),
            n,
            size: BigUint::from(2u32) * radix_pow(params, n),
        }
    }

    /// The same size obtained from the sequence itself, `a_{mn+1}`.
    pub fn size_from_sequence(params: MGonParams, n: u64) -> BigUint {
        term(params, SeqIndex(params.m() as u64 * n + 1))
    }
}

/// Row `n` of Pascal's triangle, built by repeated addition.
pub fn pascal_row(n: u64) -> Vec<BigUint> {
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(BigUint::one());
        next.extend(row.windows(2).map(|w| &w[0] + &w[1]));
        next.push(BigUint::one());
        row = next;
    }
    row
}

/// Row `n` of Pascal's triangle via `C(n, k+1) = C(n, k) (n-k) / (k+1)`;
/// every division is exact. Linear in `n` big-integer operations.
pub fn binomial_row(n: u64) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    row
}

fn closed_entry(params: MGonParams, n: u64, k: u64, row: &[BigUint]) -> BigUint {
    if k == 0 {
        return BigUint::one();
    }
    if k > n + 1 {
        return BigUint::zero();
    }
    let m = BigUint::from(params.m());
    let mut out = BigUint::zero();
    if k <= n {
        out += m.pow(k as u32) * &row[k as usize];
    }
    out += m.pow((k - 1) as u32) * &row[(k - 1) as usize];
    out
}

/// `p_{n,k} = m^k C(n,k) + m^{k-1} C(n,k-1)`, with `p_{n,0} = 1` and
/// `p_{n,k} = 0` for `k > n + 1`.
pub fn pnk_closed(params: MGonParams, n: u64, k: u64) -> BigUint {
    if k == 0 || k > n + 1 {
        return closed_entry(params, n, k, &[]);
    }
    closed_entry(params, n, k, &pascal_row(n))
}

/// Exact distribution of the summand count over `I_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummandDistribution {
    pub m: u32,
    pub n: u64,
    /// `counts[k] = p_{n,k}` for `k = 0..=n+1`.
    pub counts: Vec<BigUint>,
}

impl SummandDistribution {
    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Mean and variance by direct weighted sums over the row.
    pub fn moments(&self) -> ExactMoments {
        let total = BigInt::from(self.total());
        let mut first = BigInt::zero();
        let mut second = BigInt::zero();
        for (k, c) in self.counts.iter().enumerate() {
            let c = BigInt::from(c.clone());
            let k = BigInt::from(k);
            first += &c * &k;
            second += c * &k * &k;
        }
        let mean = BigRational::new(first, total.clone());
        let variance = BigRational::new(second, total) - &mean * &mean;
        ExactMoments { mean, variance }
    }
}

/// The full closed-form row, using [`binomial_row`] (fast enough for
/// `n` in the thousands).
pub fn pnk_row_closed(params: MGonParams, n: u64) -> SummandDistribution {
    let row = binomial_row(n);
    SummandDistribution {
        m: params.m(),
        n,
        counts: (0..=n + 1)
            .map(|k| closed_entry(params, n, k, &row))
            .collect(),
    }
}

/// Row `n` built from row `n-1` by `p_{n,k} = m p_{n-1,k-1} + p_{n-1,k}`,
/// starting from `[1, 1]` at `n = 0`.
pub fn pnk_row_recursive(params: MGonParams, n: u64) -> SummandDistribution {
    let m = params.m();
    let mut row = vec![BigUint::one(), BigUint::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row[0].clone());
        for k in 1..=row.len() {
            let mut v = &row[k - 1] * m;
            if let Some(prev) = row.get(k) {
                v += prev;
            }
            next.push(v);
        }
        row = next;
    }
    SummandDistribution { m, n, counts: row }
}

/// Dense univariate polynomial with big-integer coefficients, constant
/// term first.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Poly(Vec<BigUint>);

impl Poly {
    fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![BigUint::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly(vec![BigUint::one()]);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

/// Coefficients of `g_n(y) = (1 + y)(m y + 1)^n`, the `x^n` coefficient of
/// the bivariate generating function of the `p_{n,k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenPolyRow {
    pub m: u32,
    pub n: u64,
    pub coefficients: Vec<BigUint>,
}

impl GenPolyRow {
    pub fn eval(&self, y: &BigUint) -> BigUint {
        let mut acc = BigUint::zero();
        for c in self.coefficients.iter().rev() {
            acc = acc * y + c;
        }
        acc
    }

    fn derivative_coefficients(coeffs: &[BigUint]) -> Vec<BigUint> {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * k)
            .collect()
    }

    /// Moments through derivatives at `y = 1`: `mean = g'(1)/g(1)` and
    /// `variance = (g'(1) + g''(1))/g(1) - mean^2`.
    pub fn moments(&self) -> ExactMoments {
        let sum = |c: &[BigUint]| BigInt::from(c.iter().sum::<BigUint>());
        let d1 = Self::derivative_coefficients(&self.coefficients);
        let d2 = Self::derivative_coefficients(&d1);
        let g1 = sum(&self.coefficients);
        let gp = sum(&d1);
        let gpp = sum(&d2);
        let mean = BigRational::new(gp.clone(), g1.clone());
        let variance = BigRational::new(gp + gpp, g1) - &mean * &mean;
        ExactMoments { mean, variance }
    }
}

/// Expands `(1 + y)(m y + 1)^n` by polynomial multiplication.
pub fn gen_poly_row(params: MGonParams, n: u64) -> GenPolyRow {
    let linear = Poly(vec![BigUint::one(), BigUint::from(params.m())]);
    let expanded = Poly(vec![BigUint::one(), BigUint::one()]).mul(&linear.pow(n));
    GenPolyRow {
        m: params.m(),
        n,
        coefficients: expanded.0,
    }
}

/// Mean and variance of the summand count of a uniform `z` in `I_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMoments {
    pub mean: BigRational,
    pub variance: BigRational,
}

impl ExactMoments {
    pub fn mean_f64(&self) -> f64 {
        rational_to_f64(&self.mean)
    }

    pub fn variance_f64(&self) -> f64 {
        rational_to_f64(&self.variance)
    }
}

/// `mean = mn/(m+1) + 1/2`, `variance = mn/(m+1)^2 + 1/4`.
pub fn exact_moments(params: MGonParams, n: u64) -> ExactMoments {
    let m = BigInt::from(params.m());
    let radix = BigInt::from(params.radix());
    let mn = &m * BigInt::from(n);
    ExactMoments {
        mean: BigRational::new(mn.clone(), radix.clone()) + ratio(1, 2),
        variance: BigRational::new(mn, &radix * &radix) + ratio(1, 4),
    }
}

/// `(alpha, beta)` with `g = m*alpha + beta`, `0 <= beta < m`.
pub fn gap_parts(params: MGonParams, g: u64) -> (u64, u64) {
    let m = params.m() as u64;
    (g / m, g % m)
}

/// Which total the gap counts of `I_n` are divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GapConvention {
    /// `sum_z (k(z) - 1) = (mu_n - 1)|I_n|`, in which `z = 0` contributes
    /// `-1`. This is the denominator of the closed-form finite-n
    /// probabilities.
    Signed,
    /// The number of gaps actually present, one more than `Signed`.
    Observed,
}

/// Total gap count over `I_n` under `convention`.
pub fn gap_total(params: MGonParams, n: u64, convention: GapConvention) -> BigUint {
    if n == 0 {
        // I_0 = {0, 1}: no gaps; the signed sum is -1 + 0.
        return BigUint::zero();
    }
    let m = params.m() as u64;
    let signed = radix_pow(params, n - 1) * (2 * m * n - m - 1);
    match convention {
        GapConvention::Signed => signed,
        GapConvention::Observed => signed + 1u32,
    }
}

/// Number of occurrences of a gap of length `g` over all decompositions in
/// `I_n`, i.e. `sum_z sum_i X_{i,g}(z)`.
pub fn gap_count_finite(params: MGonParams, n: u64, g: u64) -> Result<BigUint> {
    check_gap_args(n, g)?;
    let m = params.m() as u64;
    if g > m * n {
        return Ok(BigUint::zero());
    }
    let (alpha, beta) = gap_parts(params, g);
    let pw = |e: u64| radix_pow(params, e);
    // Terms whose leading factor vanishes are skipped so no exponent goes
    // negative.
    let count = if alpha == 0 {
        let inner = if n >= 2 {
            pw(n - 2) * (2 * beta * (n - 1))
        } else {
            BigUint::zero()
        };
        inner + pw(n - 1)
    } else if beta == 0 {
        let inner = if n > alpha {
            pw(n - alpha - 1) * (2 * (n - alpha) * m)
        } else {
            BigUint::zero()
        };
        inner + pw(n - alpha)
    } else {
        let low = pw(n - alpha - 1) * (2 * (n - alpha) * (m - beta));
        let high = if n >= alpha + 2 {
            pw(n - alpha - 2) * (2 * beta * (n - alpha - 1))
        } else {
            BigUint::zero()
        };
        low + high + pw(n - alpha - 1)
    };
    Ok(count)
}

fn check_gap_args(n: u64, g: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    if g == 0 {
        return Err(Error::param("gap length must be at least 1"));
    }
    Ok(())
}

/// Finite-n gap probability under both conventions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGapProbability {
    pub g: u64,
    pub alpha: u64,
    pub beta: u64,
    /// Closed form over the signed total. `None` when that total is zero,
    /// which only happens for `m = 1, n = 1`.
    pub signed: Option<BigRational>,
    /// Gap count over the observed number of gaps.
    pub observed: BigRational,
}

impl FiniteGapProbability {
    /// False where the closed form is undefined.
    pub fn formula_valid(&self) -> bool {
        self.signed.is_some()
    }
}

/// `P_n(g)`, evaluated from the three closed-form cases
/// (`alpha = 0`; `alpha >= 1, beta > 0`; `alpha >= 1, beta = 0`), each over
/// `(m+1)^{n-1}(2mn - m - 1)`. Gaps longer than `mn` cannot occur and get
/// probability zero.
pub fn gap_prob_finite(params: MGonParams, n: u64, g: u64) -> Result<FiniteGapProbability> {
    check_gap_args(n, g)?;
    let m = params.m() as u64;
    let (alpha, beta) = gap_parts(params, g);
    let observed_total = gap_total(params, n, GapConvention::Observed);
    let count = gap_count_finite(params, n, g)?;
    let observed = ratio(count, observed_total);

    let d = 2 * m * n - m - 1;
    let signed = if d == 0 {
        None
    } else if g > m * n {
        Some(BigRational::zero())
    } else {
        let radix = BigInt::from(params.radix());
        let rpow = |e: u64| radix.pow(e as u32);
        let d = BigInt::from(d);
        let (n_i, a_i, b_i, m_i) = (
            BigInt::from(n),
            BigInt::from(alpha),
            BigInt::from(beta),
            BigInt::from(m),
        );
        let two = BigInt::from(2);
        let v = if alpha == 0 {
            BigRational::new(&two * &b_i * (&n_i - 1), &radix * &d) + BigRational::new(1.into(), d)
        } else if beta == 0 {
            BigRational::new(&two * (&n_i - &a_i) * &m_i, rpow(alpha) * &d)
                + BigRational::new(1.into(), rpow(alpha - 1) * &d)
        } else {
            BigRational::new(&two * (&n_i - &a_i) * (&m_i - &b_i), rpow(alpha) * &d)
                + BigRational::new(&two * &b_i * (&n_i - &a_i - 1), rpow(alpha + 1) * &d)
                + BigRational::new(1.into(), rpow(alpha) * &d)
        };
        Some(v)
    };
    Ok(FiniteGapProbability {
        g,
        alpha,
        beta,
        signed,
        observed,
    })
}

/// Limiting gap probability: `beta / (m(m+1))` if `alpha = 0`, else
/// `(m + 1 - beta) / (m+1)^{alpha+1}`.
pub fn gap_prob_limit(params: MGonParams, g: u64) -> Result<BigRational> {
    if g == 0 {
        return Err(Error::param("gap length must be at least 1"));
    }
    let m = params.m() as u64;
    let radix = params.radix() as u64;
    let (alpha, beta) = gap_parts(params, g);
    Ok(if alpha == 0 {
        ratio(beta, m * radix)
    } else {
        ratio(radix - beta, radix_pow(params, alpha + 1))
    })
}

/// Sum of `P(g)` over every `g` with `alpha <= alpha_max`, plus the
/// geometric tail `(m+3) / (2 (m+1)^{alpha_max+1})` of the rest. Equals 1.
pub fn gap_limit_normalization(params: MGonParams, alpha_max: u64) -> BigRational {
    let m = params.m() as u64;
    let head: BigRational = (1..m * (alpha_max + 1))
        .map(|g| gap_prob_limit(params, g).expect("g >= 1"))
        .fold(BigRational::zero(), |acc, p| acc + p);
    let tail = ratio(m + 3, radix_pow(params, alpha_max + 1) * 2u32);
    head + tail
}

/// `P(g1) P(g2)`, the limit of the normalised two-gap count.
pub fn joint_gap_limit_product(params: MGonParams, g1: u64, g2: u64) -> Result<BigRational> {
    Ok(gap_prob_limit(params, g1)? * gap_prob_limit(params, g2)?)
}

/// Longest run of heads in `n_flips` tosses of a `p`-coin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongestRunPrediction {
    pub p: f64,
    pub n_flips: u64,
    pub mean: f64,
    pub variance: f64,
    /// Unmodelled bounded terms; the vanishing terms are not included.
    pub model_error: f64,
}

/// `mean = log_{1/p}(n q) - gamma / ln p - 1/2`,
/// `variance = pi^2 / (6 ln^2 p) + 1/12`.
pub fn schilling_prediction(p: f64, n_flips: u64) -> Result<LongestRunPrediction> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param("p must lie strictly between 0 and 1"));
    }
    if n_flips == 0 {
        return Err(Error::param("n_flips must be at least 1"));
    }
    let q = 1.0 - p;
    let lnp = p.ln();
    let mean = (n_flips as f64 * q).ln() / (1.0 / p).ln() - EULER_GAMMA / lnp - 0.5;
    let variance = std::f64::consts::PI.powi(2) / (6.0 * lnp * lnp) + 1.0 / 12.0;
    Ok(LongestRunPrediction {
        p,
        n_flips,
        mean,
        variance,
        model_error: LONGEST_RUN_MODEL_ERROR,
    })
}

/// Predictions for the longest gap of `z` drawn from `[a_n, a_{n+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongestGapPrediction {
    pub m: u32,
    pub n: u64,
    /// `m log2(n / 2m)`.
    pub main_term: f64,
    /// Fair-coin run model over `floor(n/m)` bins.
    pub coin: LongestRunPrediction,
    /// `m * coin.mean`.
    pub refined_mean: f64,
    /// `m^2 * coin.variance`.
    pub refined_variance: f64,
    /// Run model in which a bin is empty with its actual probability
    /// `1/(m+1)` (uniform digit), over `floor(n/m)` bins.
    pub occupancy: LongestRunPrediction,
    /// `m (occupancy.mean + 1)`: a run of `h` empty bins between two used
    /// bins is a gap of about `m (h + 1)`.
    pub occupancy_mean: f64,
}

pub fn longest_gap_prediction(params: MGonParams, n: u64) -> Result<LongestGapPrediction> {
    let m = params.m() as u64;
    if n < 2 * m {
        return Err(Error::param(format!("n must be at least 2m = {}", 2 * m)));
    }
    let mf = m as f64;
    let flips = n / m;
    let coin = schilling_prediction(0.5, flips)?;
    let occupancy = schilling_prediction(1.0 / (mf + 1.0), flips)?;
    Ok(LongestGapPrediction {
        m: params.m(),
        n,
        main_term: mf * (n as f64 / (2.0 * mf)).log2(),
        coin,
        refined_mean: mf * coin.mean,
        refined_variance: mf * mf * coin.variance,
        occupancy,
        occupancy_mean: mf * (occupancy.mean + 1.0),
    })
}
