//! Exact moments of the open triangle chain `(0,1,2), (1,2,3), ...` by an
//! eight-dimensional linear recursion in the number of qubits.
//!
//! Write `m(N; fixed)` for the moment of the `N`-qubit chain averaged only over
//! bit-strings with some `x_i` pinned, and `β = 2^(2(1-α))` for the weight of a
//! single decoupled CZ. The state vector is
//!
//! ```text
//!   [ m(N;00), m(N;01), m(N;1), m(N-1;00), m(N-1;01), m(N-1;1), m(N-2;0), m(N-2;1) ]
//! ```
//!
//! where the labels pin `x_0` (and `x_1`). One step of the recursion is a
//! fixed 8x8 matrix whose entries are multiples of `1` or `β`. The unpinned
//! moment is `(m(N;00) + m(N;01)) / 4 + m(N;1) / 2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::hypergraph::chain;
use crate::sre::{
    compensated_sum, exact_pl_moment, pow2_rational, rank_histogram, sre_from_moment, Alpha,
    EnumOptions, Moment,
};

/// Number of qubits at which the state is seeded by direct enumeration.
pub const SEED_N: usize = 5;

/// A recursion coefficient `num/den * β^beta_power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Coeff {
    num: i64,
    den: i64,
    beta: bool,
}

const fn c(num: i64, den: i64, beta: bool) -> Coeff {
    Coeff { num, den, beta }
}

const O: Coeff = c(0, 1, false);

/// Acts on `(m(N-2;00), m(N-2;01), m(N-2;1))`.
const BLOCK_A: [[Coeff; 3]; 3] = [
    [c(1, 4, false), O, c(1, 2, true)],
    [O, O, c(1, 2, true)],
    [O, c(1, 8, false), c(1, 2, true)],
];

/// Acts on `(m(N-3;0), m(N-3;1))`.
const BLOCK_B: [[Coeff; 2]; 3] = [
    [O, c(1, 4, true)],
    [c(1, 4, true), c(1, 4, true)],
    [c(1, 4, true), c(1, 8, true)],
];

/// Marginalizes `x_1` out of the two-pin moments.
const BLOCK_C: [[Coeff; 3]; 2] = [[c(1, 2, false), c(1, 2, false), O], [O, O, c(1, 1, false)]];

/// The full 8x8 step `[[0, A, B], [I, 0, 0], [0, C, 0]]`.
fn transfer_matrix() -> [[Coeff; 8]; 8] {
    let mut t = [[O; 8]; 8];
    for r in 0..3 {
        for j in 0..3 {
            t[r][3 + j] = BLOCK_A[r][j];
        }
        for j in 0..2 {
            t[r][6 + j] = BLOCK_B[r][j];
        }
        t[3 + r][r] = c(1, 1, false);
    }
    for r in 0..2 {
        for j in 0..3 {
            t[6 + r][3 + j] = BLOCK_C[r][j];
        }
    }
    t
}

/// The recursion step evaluated at a given `α`.
pub fn transfer_matrix_f64(alpha: f64) -> [[f64; 8]; 8] {
    let beta = (2.0 * (1.0 - alpha)).exp2();
    transfer_matrix().map(|row| row.map(|k| k.num as f64 / k.den as f64 * if k.beta { beta } else { 1.0 }))
}

/// Entries of a [`ChainState`].
#[derive(Clone, Debug, PartialEq)]
pub enum ChainEntries {
    Exact(Vec<BigRational>),
    /// True values are `values * 2^log2_scale`.
    Scaled { values: [f64; 8], log2_scale: f64 },
}

/// The eight fixed-value moments at chain length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub n: usize,
    pub alpha: f64,
    pub entries: ChainEntries,
}

impl ChainState {
    /// State at `n = 5`, every entry taken from enumeration.
    pub fn seed(alpha: Alpha, opts: &EnumOptions) -> Result<Self> {
        let a = alpha.finite()?;
        let (n, m1, m2) = (SEED_N, SEED_N - 1, SEED_N - 2);
        let plan: [(usize, &[(usize, bool)]); 8] = [
            (n, &[(0, false), (1, false)]),
            (n, &[(0, false), (1, true)]),
            (n, &[(0, true)]),
            (m1, &[(0, false), (1, false)]),
            (m1, &[(0, false), (1, true)]),
            (m1, &[(0, true)]),
            (m2, &[(0, false)]),
            (m2, &[(0, true)]),
        ];
        let moments = plan
            .iter()
            .map(|&(size, fixed)| fixed_moment(size, alpha, fixed, opts))
            .collect::<Result<Vec<_>>>()?;
        let entries = if moments.iter().all(Moment::is_exact) {
            ChainEntries::Exact(moments.into_iter().map(|m| m.as_exact().cloned().expect("exact")).collect())
        } else {
            let mut values = [0.0; 8];
            for (v, m) in values.iter_mut().zip(&moments) {
                *v = m.to_f64();
            }
            ChainEntries::Scaled {
                values,
                log2_scale: 0.0,
            }
        };
        Ok(Self { n, alpha: a, entries })
    }

    /// Same state with floating-point entries.
    pub fn to_scaled(&self) -> Self {
        let entries = match &self.entries {
            ChainEntries::Exact(v) => {
                let mut values = [0.0; 8];
                for (dst, r) in values.iter_mut().zip(v) {
                    *dst = Moment::Exact(r.clone()).to_f64();
                }
                ChainEntries::Scaled {
                    values,
                    log2_scale: 0.0,
                }
            }
            scaled => scaled.clone(),
        };
        Self {
            n: self.n,
            alpha: self.alpha,
            entries,
        }
    }

    /// Applies one recursion step, `n -> n + 1`.
    pub fn advance(&self) -> Self {
        let t = transfer_matrix();
        let entries = match &self.entries {
            ChainEntries::Exact(old) => {
                let beta = pow2_rational(beta_exponent(self.alpha).expect("exact state has integral 2 alpha"));
                let coeff = |k: Coeff| {
                    let base = BigRational::new(BigInt::from(k.num), BigInt::from(k.den));
                    if k.beta {
                        base * &beta
                    } else {
                        base
                    }
                };
                ChainEntries::Exact(
                    t.iter()
                        .map(|row| {
                            row.iter()
                                .zip(old)
                                .filter(|(k, _)| k.num != 0)
                                .fold(BigRational::zero(), |acc, (&k, v)| acc + coeff(k) * v)
                        })
                        .collect(),
                )
            }
            ChainEntries::Scaled { values, log2_scale } => {
                let tf = transfer_matrix_f64(self.alpha);
                let mut next = [0.0; 8];
                for (r, dst) in next.iter_mut().enumerate() {
                    *dst = compensated_sum((0..8).map(|j| tf[r][j] * values[j]));
                }
                let mut scale = *log2_scale;
                let max = next.iter().cloned().fold(0.0f64, f64::max);
                if max > 0.0 && !(2f64.powi(-256)..2f64.powi(256)).contains(&max) {
                    let shift = max.log2().round();
                    for v in &mut next {
                        *v *= (-shift).exp2();
                    }
                    scale += shift;
                }
                ChainEntries::Scaled {
                    values: next,
                    log2_scale: scale,
                }
            }
        };
        Self {
            n: self.n + 1,
            alpha: self.alpha,
            entries,
        }
    }

    /// Unpinned moment `(m(N;00) + m(N;01)) / 4 + m(N;1) / 2`.
    pub fn pl_moment(&self) -> Moment {
        match &self.entries {
            ChainEntries::Exact(v) => {
                let quarter = BigRational::new(1.into(), 4.into());
                let half = BigRational::new(1.into(), 2.into());
                Moment::Exact((&v[0] + &v[1]) * quarter + &v[2] * half)
            }
            ChainEntries::Scaled { values, log2_scale } => {
                let m = compensated_sum([values[0] / 4.0, values[1] / 4.0, values[2] / 2.0]);
                Moment::Log2(m.log2() + log2_scale)
            }
        }
    }

    /// Entries as plain floats; may underflow for long chains.
    pub fn entries_f64(&self) -> [f64; 8] {
        match &self.entries {
            ChainEntries::Exact(v) => {
                let mut out = [0.0; 8];
                for (o, r) in out.iter_mut().zip(v) {
                    *o = Moment::Exact(r.clone()).to_f64();
                }
                out
            }
            ChainEntries::Scaled { values, log2_scale } => values.map(|v| v * log2_scale.exp2()),
        }
    }

    /// Entries as base-2 logarithms.
    pub fn entries_log2(&self) -> [f64; 8] {
        match &self.entries {
            ChainEntries::Exact(v) => {
                let mut out = [0.0; 8];
                for (o, r) in out.iter_mut().zip(v) {
                    *o = Moment::Exact(r.clone()).log2();
                }
                out
            }
            ChainEntries::Scaled { values, log2_scale } => values.map(|v| v.log2() + log2_scale),
        }
    }
}

/// `log2 β = 2 - 2α` when integral.
fn beta_exponent(alpha: f64) -> Option<i64> {
    Alpha::Finite(alpha).twice_integral().map(|k| 2 - k)
}

/// Moment of the `n`-qubit chain averaged over bit-strings with the given
/// `(qubit, value)` pins.
pub fn fixed_moment(n: usize, alpha: Alpha, fixed: &[(usize, bool)], opts: &EnumOptions) -> Result<Moment> {
    let a = alpha.finite()?;
    let h = chain(n)?;
    Ok(rank_histogram(&h, fixed, opts)?.moment(a))
}

/// Options for [`chain_pl_moment`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainOptions {
    /// Above this length the recursion runs in scaled floating point.
    pub float_above: usize,
    /// Up to this length the result is also compared against direct
    /// enumeration.
    pub cross_check_up_to: usize,
    pub enumeration: EnumOptions,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            float_above: 512,
            cross_check_up_to: 16,
            enumeration: EnumOptions::default(),
        }
    }
}

/// Checks the enumerated seeds at `n = 3, 4` against their closed forms in `β`.
fn check_initial_conditions(alpha: Alpha, opts: &EnumOptions) -> Result<()> {
    let Some(k) = alpha.twice_integral() else {
        return Ok(());
    };
    let beta = pow2_rational(2 - k);
    let one = BigRational::from_integer(1.into());
    let frac = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let expected = [
        (3, vec![(0, false), (1, false)], (&one + &beta) * frac(1, 2)),
        (3, vec![(0, false), (1, true)], beta.clone()),
        (3, vec![(0, true)], beta.clone()),
        (4, vec![(0, false), (1, false)], (&one + &beta * frac(3, 1)) * frac(1, 4)),
        (4, vec![(0, false), (1, true)], beta.clone()),
        (4, vec![(0, true)], (&one + &beta * frac(7, 1)) * frac(1, 8)),
    ];
    for (n, fixed, want) in expected {
        let got = fixed_moment(n, alpha, &fixed, opts)?;
        if got.as_exact() != Some(&want) {
            return Err(Error::Invariant(format!(
                "initial condition n={n} {fixed:?}: enumeration gives {got}, closed form {want}"
            )));
        }
    }
    Ok(())
}

fn small_chain_moment(n: usize, alpha: Alpha, opts: &EnumOptions) -> Result<Moment> {
    let pins = |f: &[(usize, bool)]| fixed_moment(n, alpha, f, opts);
    let m00 = pins(&[(0, false), (1, false)])?;
    let m01 = pins(&[(0, false), (1, true)])?;
    let m1 = pins(&[(0, true)])?;
    Ok(match (m00, m01, m1) {
        (Moment::Exact(a0), Moment::Exact(a1), Moment::Exact(b)) => Moment::Exact(
            (a0 + a1) * BigRational::new(1.into(), 4.into()) + b * BigRational::new(1.into(), 2.into()),
        ),
        (a0, a1, b) => Moment::Float(compensated_sum([a0.to_f64() / 4.0, a1.to_f64() / 4.0, b.to_f64() / 2.0])),
    })
}

/// Moment of the `n`-qubit chain from the recursion.
pub fn chain_pl_moment(n: usize, alpha: Alpha, opts: &ChainOptions) -> Result<Moment> {
    if n < 3 {
        return Err(Error::InvalidLattice(format!("chain needs n >= 3, got {n}")));
    }
    alpha.finite()?;
    check_initial_conditions(alpha, &opts.enumeration)?;
    let moment = if n < SEED_N {
        small_chain_moment(n, alpha, &opts.enumeration)?
    } else {
        let mut state = ChainState::seed(alpha, &opts.enumeration)?;
        if n > opts.float_above {
            state = state.to_scaled();
        }
        while state.n < n {
            state = state.advance();
        }
        state.pl_moment()
    };
    if n <= opts.cross_check_up_to.min(opts.enumeration.cap) {
        let direct = exact_pl_moment(&chain(n)?, alpha, &opts.enumeration)?;
        let agree = match (&moment, &direct) {
            (Moment::Exact(a), Moment::Exact(b)) => a == b,
            (a, b) => (a.to_f64() - b.to_f64()).abs() <= 1e-12 * b.to_f64().abs(),
        };
        if !agree {
            return Err(Error::Invariant(format!(
                "chain({n}) recursion gives {moment}, enumeration gives {direct}"
            )));
        }
    }
    Ok(moment)
}

/// Entropies `M_α(n)` for `n = 3 ..= n_max` from one recursion sweep.
pub fn chain_sre_series(n_max: usize, alpha: Alpha, opts: &ChainOptions) -> Result<Vec<(usize, f64)>> {
    let a = alpha.finite()?;
    let mut out = Vec::new();
    for n in 3..SEED_N.min(n_max + 1) {
        out.push((n, sre_from_moment(&small_chain_moment(n, alpha, &opts.enumeration)?, a)));
    }
    if n_max >= SEED_N {
        let mut state = ChainState::seed(alpha, &opts.enumeration)?;
        loop {
            if state.n == opts.float_above + 1 {
                state = state.to_scaled();
            }
            out.push((state.n, sre_from_moment(&state.pl_moment(), a)));
            if state.n == n_max {
                break;
            }
            state = state.advance();
        }
    }
    Ok(out)
}

/// Large-`N` linear form `M_α(N) ≈ slope * N + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticFit {
    pub slope: f64,
    pub intercept: f64,
    /// First difference at `n_lo`, for the convergence diagnostic.
    pub slope_at_lo: f64,
}

/// Tolerance on the change of the first difference between `n_lo` and `n_hi`.
pub const FIT_TOLERANCE: f64 = 1e-6;

/// Slope from the converged first difference at `n_hi`, intercept from the
/// value at `n_hi`.
pub fn asymptotic_fit(alpha: Alpha, n_lo: usize, n_hi: usize, opts: &ChainOptions) -> Result<AsymptoticFit> {
    if n_lo < 4 || n_hi <= n_lo {
        return Err(Error::InvalidArgument {
            field: "n_hi",
            reason: format!("need n_hi > n_lo >= 4, got n_lo = {n_lo}, n_hi = {n_hi}"),
        });
    }
    let series = chain_sre_series(n_hi, alpha, opts)?;
    let at = |n: usize| series[n - 3].1;
    let slope = at(n_hi) - at(n_hi - 1);
    let slope_at_lo = at(n_lo) - at(n_lo - 1);
    if (slope - slope_at_lo).abs() > FIT_TOLERANCE {
        return Err(Error::NonConvergence(format!(
            "first difference moved by {:.3e} between n = {n_lo} and n = {n_hi}; try a larger n_hi",
            (slope - slope_at_lo).abs()
        )));
    }
    Ok(AsymptoticFit {
        slope,
        intercept: at(n_hi) - slope * n_hi as f64,
        slope_at_lo,
    })
}

/// Dominant eigenvalue of the recursion step by power iteration.
pub fn dominant_eigenvalue(alpha: f64) -> f64 {
    let t = transfer_matrix_f64(alpha);
    let mut v = [1.0f64; 8];
    let mut lambda = 0.0;
    for _ in 0..100_000 {
        let mut w = [0.0; 8];
        for (r, wr) in w.iter_mut().enumerate() {
            *wr = (0..8).map(|j| t[r][j] * v[j]).sum();
        }
        let norm = w.iter().cloned().fold(0.0, f64::max);
        let next = w.map(|x| x / norm);
        // the norm alone can stall for a step, so converge on the vector
        let moved = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        lambda = norm;
        v = next;
        if moved <= 1e-15 {
            break;
        }
    }
    lambda
}
