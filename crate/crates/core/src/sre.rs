//! Stabilizer Rényi entropy of 3-uniform hypergraph states from GF(2) ranks.
//!
//! The Pauli-Liouville moment of a hypergraph state reduces to
//!
//! ```text
//!   m_α = 2^-N Σ_x 2^((1-α) 2h(x)),    2h(x) = rank(C(x) + C(x)ᵀ)
//! ```
//!
//! so everything here is driven by the histogram of `h(x)` over bit-strings
//! `x`, either fully enumerated or sampled.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{rank_alternating_single_word, BitVec};
use crate::hypergraph::Hypergraph3;

/// Default qubit limit for exhaustive enumeration over `x`.
pub const DEFAULT_ENUMERATION_CAP: usize = 28;

/// Enumeration is indexed by a `u64` Gray-code counter.
pub const MAX_ENUMERATION_CAP: usize = 62;

/// Rényi index.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Alpha {
    /// Finite `α > 0`, `α != 1`.
    Finite(f64),
    One,
    Infinity,
}

impl Alpha {
    /// Any positive value; `1.0` and `+inf` map to their tags.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::InvalidAlpha(format!("alpha must be positive, got {value}")));
        }
        Ok(if value == 1.0 {
            Alpha::One
        } else if value.is_infinite() {
            Alpha::Infinity
        } else {
            Alpha::Finite(value)
        })
    }

    /// The finite value, rejecting the `One` and `Infinity` tags.
    pub fn finite(self) -> Result<f64> {
        match self {
            Alpha::Finite(a) => Ok(a),
            other => Err(Error::InvalidAlpha(format!(
                "a finite alpha other than 1 is required, got {other}"
            ))),
        }
    }

    /// `2α` when it is an integer, which makes every moment a dyadic rational.
    pub fn twice_integral(self) -> Option<i64> {
        match self {
            Alpha::Finite(a) => {
                let t = 2.0 * a;
                (t.fract() == 0.0 && t.abs() < 1e15).then_some(t as i64)
            }
            Alpha::One => Some(2),
            Alpha::Infinity => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Alpha::Finite(a) => a,
            Alpha::One => 1.0,
            Alpha::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::One => f.write_str("1"),
            Alpha::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Alpha {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Alpha::Infinity),
            t => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidAlpha(format!("cannot parse `{s}` as alpha")))?;
                Alpha::new(v)
            }
        }
    }
}

/// A moment value, exact when the exponents involved are integral.
#[derive(Clone, Debug, PartialEq)]
pub enum Moment {
    Exact(BigRational),
    Float(f64),
    /// Stored as its base-2 logarithm; used where the value underflows `f64`.
    Log2(f64),
}

impl Moment {
    pub fn to_f64(&self) -> f64 {
        match self {
            Moment::Exact(r) => {
                let l = log2_rational(r);
                if l.abs() < 1000.0 {
                    r.to_f64().unwrap_or_else(|| l.exp2())
                } else {
                    l.exp2()
                }
            }
            Moment::Float(v) => *v,
            Moment::Log2(l) => l.exp2(),
        }
    }

    pub fn log2(&self) -> f64 {
        match self {
            Moment::Exact(r) => log2_rational(r),
            Moment::Float(v) => v.log2(),
            Moment::Log2(l) => *l,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Moment::Exact(r) => Some(r),
            Moment::Float(_) | Moment::Log2(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Moment::Exact(_))
    }
}

impl fmt::Display for Moment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Moment::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Moment::Float(v) => write!(f, "{v}"),
            Moment::Log2(l) => write!(f, "2^{l}"),
        }
    }
}

fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("finite below 2^1000").log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.log2() + shift as f64
}

/// `log2` of a positive rational without overflowing `f64`.
pub fn log2_rational(r: &BigRational) -> f64 {
    assert!(r.numer() > &BigInt::zero(), "log2 of a non-positive rational");
    let num = r.numer().magnitude();
    let den = r.denom().magnitude();
    log2_biguint(num) - log2_biguint(den)
}

/// `2^e` as an exact rational.
pub fn pow2_rational(e: i64) -> BigRational {
    let p = BigInt::one() << e.unsigned_abs();
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Neumaier compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Counts of `h(x)` (half the rank of `C(x) + C(x)ᵀ`) over a set of
/// bit-strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankHistogram {
    /// Number of qubits.
    pub n: usize,
    /// `counts[h]` bit-strings had `rank = 2h`.
    pub counts: Vec<u64>,
}

impl RankHistogram {
    fn new(n: usize) -> Self {
        Self {
            n,
            counts: vec![0; n / 2 + 1],
        }
    }

    fn merge(mut self, other: &RankHistogram) -> Self {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Smallest `2h` present.
    pub fn min_two_h(&self) -> Option<usize> {
        self.counts.iter().position(|&c| c > 0).map(|h| 2 * h)
    }

    /// Average of `2h(x)`, the α = 1 entropy in bits.
    pub fn mean_two_h(&self) -> BigRational {
        let num: BigInt = self
            .counts
            .iter()
            .enumerate()
            .map(|(h, &c)| BigInt::from(c) * BigInt::from(2 * h))
            .sum();
        BigRational::new(num, BigInt::from(self.total()))
    }

    /// `(1/total) Σ_x 2^((1-α) 2h(x))`.
    pub fn moment(&self, alpha: f64) -> Moment {
        let total = self.total();
        assert!(total > 0, "empty histogram");
        match Alpha::Finite(alpha).twice_integral() {
            Some(k) => {
                // term exponent (1-α)2h = h(2-k)
                let step = 2 - k;
                let exps: Vec<i64> = (0..self.counts.len() as i64).map(|h| h * step).collect();
                let e_min = *exps.iter().min().expect("non-empty");
                let num: BigInt = self
                    .counts
                    .iter()
                    .zip(&exps)
                    .filter(|(&c, _)| c > 0)
                    .map(|(&c, &e)| BigInt::from(c) << (e - e_min) as u64)
                    .sum();
                let den = BigInt::from(total);
                Moment::Exact(BigRational::new(num, den) * pow2_rational(e_min))
            }
            None => {
                let s = compensated_sum(
                    self.counts
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c > 0)
                        .map(|(h, &c)| c as f64 * ((1.0 - alpha) * 2.0 * h as f64).exp2()),
                );
                Moment::Float(s / total as f64)
            }
        }
    }
}

/// Limits and worker count for enumeration and sampling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumOptions {
    /// Largest qubit count accepted by exhaustive enumeration.
    pub cap: usize,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for EnumOptions {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
            threads: None,
        }
    }
}

impl EnumOptions {
    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.threads {
            Some(t) => rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .expect("thread pool")
                .install(f),
            None => f(),
        }
    }
}

// log2 of the number of Gray-code blocks handed to workers
const BLOCK_BITS: u32 = 10;

/// Histogram of `h(x)` over all `x` agreeing with `fixed` (pairs of
/// `(qubit, value)`), enumerated in Gray-code order.
///
/// The free bit-strings are split into contiguous Gray-code blocks processed
/// independently; block histograms are summed, so the result does not depend
/// on the number of workers.
pub fn rank_histogram(h: &Hypergraph3, fixed: &[(usize, bool)], opts: &EnumOptions) -> Result<RankHistogram> {
    let n = h.n();
    let cap = opts.cap.min(MAX_ENUMERATION_CAP);
    if n > cap {
        return Err(Error::Capacity {
            what: "exact enumeration",
            n,
            cap,
            hint: "raise the enumeration cap (--max-qubits) or use Monte Carlo",
        });
    }
    let mut is_fixed = vec![false; n];
    for &(i, _) in fixed {
        if i >= n {
            return Err(Error::IndexOutOfRange {
                what: "fixed qubit",
                index: i,
                size: n,
            });
        }
        if std::mem::replace(&mut is_fixed[i], true) {
            return Err(Error::InvalidArgument {
                field: "fixed",
                reason: format!("qubit {i} fixed twice"),
            });
        }
    }
    if n == 0 {
        let mut hist = RankHistogram::new(0);
        hist.counts[0] = 1;
        return Ok(hist);
    }

    let polar = h.vertex_polar_words();
    let mut base = vec![0u64; n];
    for &(i, v) in fixed {
        if v {
            xor_rows(&mut base, &polar[i]);
        }
    }
    let free: Vec<&[u64]> = (0..n).filter(|&i| !is_fixed[i]).map(|i| polar[i].as_slice()).collect();
    let free_bits = free.len() as u32;
    let block_bits = free_bits.min(BLOCK_BITS);
    let block_len = 1u64 << (free_bits - block_bits);

    let run_block = |b: u64| -> RankHistogram {
        let mut hist = RankHistogram::new(n);
        let start = b * block_len;
        let mut m = base.clone();
        let mut g = start ^ (start >> 1);
        while g != 0 {
            let k = g.trailing_zeros() as usize;
            g &= g - 1;
            xor_rows(&mut m, free[k]);
        }
        let mut scratch = [0u64; 64];
        let mut record = |m: &[u64]| {
            scratch[..n].copy_from_slice(m);
            let two_h = rank_alternating_single_word(&mut scratch[..n]);
            hist.counts[two_h / 2] += 1;
        };
        record(&m);
        for i in start + 1..start + block_len {
            xor_rows(&mut m, free[i.trailing_zeros() as usize]);
            record(&m);
        }
        hist
    };

    let hist = opts.install(|| {
        (0..1u64 << block_bits)
            .into_par_iter()
            .map(run_block)
            .reduce(|| RankHistogram::new(n), |a, b| a.merge(&b))
    });
    Ok(hist)
}

#[inline]
fn xor_rows(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

/// `2h(x)` for a single bit-string, any `n`.
pub fn two_h(h: &Hypergraph3, x: &BitVec) -> Result<usize> {
    Ok(h.c_matrix(x)?.symmetrize_upper()?.rank())
}

/// Exact Pauli-Liouville moment by enumerating all `2^N` bit-strings.
pub fn exact_pl_moment(h: &Hypergraph3, alpha: Alpha, opts: &EnumOptions) -> Result<Moment> {
    let a = alpha.finite()?;
    Ok(rank_histogram(h, &[], opts)?.moment(a))
}

/// How an [`SreResult`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
    Recursion,
    Bound,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte_carlo",
            Method::Recursion => "recursion",
            Method::Bound => "bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SreResult {
    pub alpha: Alpha,
    /// `None` for α = ∞.
    pub pl_moment: Option<Moment>,
    /// Entropy in bits.
    pub sre: f64,
    /// The entropy itself as a rational, available for α = 1.
    pub sre_exact: Option<BigRational>,
    pub method: Method,
    pub n: usize,
}

/// `M_α = log2(m_α) / (1 - α)`, with `-0.0` normalized away.
pub fn sre_from_moment(moment: &Moment, alpha: f64) -> f64 {
    let v = moment.log2() / (1.0 - alpha);
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Stabilizer Rényi entropy by exhaustive enumeration.
pub fn sre(h: &Hypergraph3, alpha: Alpha, opts: &EnumOptions) -> Result<SreResult> {
    let n = h.n();
    match alpha {
        Alpha::Finite(a) => {
            let m = exact_pl_moment(h, alpha, opts)?;
            Ok(SreResult {
                alpha,
                sre: sre_from_moment(&m, a),
                pl_moment: Some(m),
                sre_exact: None,
                method: Method::Exact,
                n,
            })
        }
        Alpha::One => {
            let hist = rank_histogram(h, &[], opts)?;
            let mean = hist.mean_two_h();
            Ok(SreResult {
                alpha,
                sre: mean.to_f64().unwrap_or(f64::NAN),
                pl_moment: Some(Moment::Exact(BigRational::one())),
                sre_exact: Some(mean),
                method: Method::Exact,
                n,
            })
        }
        Alpha::Infinity => {
            // min_x 2h(x) is attained at x = 0 where C vanishes
            let at_zero = two_h(h, &BitVec::zeros(n))?;
            if at_zero != 0 {
                return Err(Error::Invariant(format!("rank of C(0) is {at_zero}, expected 0")));
            }
            Ok(SreResult {
                alpha,
                pl_moment: None,
                sre: 0.0,
                sre_exact: Some(BigRational::zero()),
                method: Method::Exact,
                n,
            })
        }
    }
}

/// Monte Carlo estimate of the moment and entropy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    /// Sample mean of `2^((1-α) 2h(x_i))`.
    pub mean: f64,
    /// Sample standard deviation over `sqrt(samples)` (one standard error).
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    /// Entropy evaluated at `mean`.
    pub sre_point: f64,
    pub histogram: RankHistogram,
}

impl McEstimate {
    /// One-standard-error interval on the entropy, propagated through
    /// `log2(m) / (1 - α)` to first order.
    pub fn sre_std_error(&self, alpha: f64) -> f64 {
        (self.std_error / (self.mean * std::f64::consts::LN_2 * (1.0 - alpha))).abs()
    }
}

/// Uniform bit-string for sample `index`, drawn from the ChaCha stream
/// `index` under key `seed`. Independent of scheduling.
pub fn sample_bitstring(n: usize, seed: u64, index: u64) -> BitVec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let mut bits = vec![false; n];
    let mut word = 0u64;
    for (i, b) in bits.iter_mut().enumerate() {
        if i % 64 == 0 {
            word = rng.random();
        }
        *b = (word >> (i % 64)) & 1 == 1;
    }
    BitVec::from_bools(&bits)
}

/// Monte Carlo estimate from `samples` uniform bit-strings.
pub fn mc_sre(h: &Hypergraph3, alpha: Alpha, samples: u64, seed: u64, opts: &EnumOptions) -> Result<McEstimate> {
    let a = alpha.finite()?;
    if samples < 2 {
        return Err(Error::InvalidArgument {
            field: "samples",
            reason: format!("at least 2 samples are needed for an error bar, got {samples}"),
        });
    }
    let n = h.n();
    let sample_h = |i: u64| -> Result<usize> { Ok(two_h(h, &sample_bitstring(n, seed, i))? / 2) };
    let hist = opts.install(|| {
        (0..samples)
            .into_par_iter()
            .map(|i| {
                let mut hist = RankHistogram::new(n);
                hist.counts[sample_h(i)?] += 1;
                Ok(hist)
            })
            .try_reduce(|| RankHistogram::new(n), |a, b| Ok(a.merge(&b)))
    })?;

    let value = |hh: usize| ((1.0 - a) * 2.0 * hh as f64).exp2();
    let m = samples as f64;
    let mean = compensated_sum(hist.counts.iter().enumerate().map(|(hh, &c)| c as f64 * value(hh))) / m;
    let ss = compensated_sum(
        hist.counts
            .iter()
            .enumerate()
            .map(|(hh, &c)| c as f64 * (value(hh) - mean).powi(2)),
    );
    let std_error = (ss / (m - 1.0)).sqrt() / m.sqrt();
    Ok(McEstimate {
        mean,
        std_error,
        samples,
        seed,
        sre_point: sre_from_moment(&Moment::Float(mean), a),
        histogram: hist,
    })
}

/// Which line of the rank-based upper bound to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// Sum over vertices of the single-vertex bound.
    PerVertex,
    /// The same bound after Jensen's inequality, using the mean rank.
    Jensen,
}

fn bound_alpha(alpha: Alpha) -> Result<f64> {
    match alpha {
        Alpha::Finite(a) if a > 1.0 => Ok(a),
        other => Err(Error::InvalidAlpha(format!(
            "upper bounds hold only for finite alpha > 1, got {other}"
        ))),
    }
}

/// `1 - log2(1 + 2^-t)`
fn bound_term(t: f64) -> f64 {
    1.0 - (-t).exp2().ln_1p() / std::f64::consts::LN_2
}

/// Upper bound on `M_α` from the per-vertex ranks `h_k`.
pub fn upper_bound(h: &Hypergraph3, alpha: Alpha, variant: BoundVariant) -> Result<f64> {
    let a = bound_alpha(alpha)?;
    let stats = h.vertex_stats()?;
    Ok(match variant {
        BoundVariant::PerVertex => {
            compensated_sum(stats.h_k.iter().map(|&hk| bound_term((a - 1.0) * 2.0 * hk as f64))) / (a - 1.0)
        }
        BoundVariant::Jensen => h.n() as f64 / (a - 1.0) * bound_term((a - 1.0) * 2.0 * stats.h_bar_f64()),
    })
}

/// Degree-based upper bound using the mean hyperedge degree.
pub fn prev_upper_bound(h: &Hypergraph3, alpha: Alpha) -> Result<f64> {
    let a = bound_alpha(alpha)?;
    let stats = h.vertex_stats()?;
    Ok(h.n() as f64 / (a - 1.0) * bound_term((2.0 * a - 1.0) * stats.delta_bar_f64()))
}
