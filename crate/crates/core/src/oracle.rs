//! Brute-force reference values for small hypergraph states.
//!
//! Amplitudes of a hypergraph state are `±2^(-n/2)`, so everything here works
//! with integer signs and integer sums; divisions by powers of two happen only
//! when a value is reported.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::hypergraph::Hypergraph3;
use crate::sre::{compensated_sum, Alpha, Moment};

/// Largest qubit count for statevector construction.
pub const STATEVECTOR_CAP: usize = 14;
/// Largest qubit count for the full sum over `4^n` Pauli strings.
pub const PAULI_SUM_CAP: usize = 8;

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::Capacity {
            what,
            n,
            cap,
            hint: "the brute-force oracle is only meant for small states",
        });
    }
    Ok(())
}

/// `P^{x,z} = i^{x·z} X^x Z^z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PauliLabel {
    pub x: BitVec,
    pub z: BitVec,
}

impl PauliLabel {
    pub fn new(x: BitVec, z: BitVec) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch(format!(
                "x has length {} but z has length {}",
                x.len(),
                z.len()
            )));
        }
        Ok(Self { x, z })
    }

    /// Label on `n` qubits from integer masks (bit `i` = qubit `i`).
    pub fn from_masks(n: usize, x: u64, z: u64) -> Self {
        Self {
            x: BitVec::from_u64(n, x),
            z: BitVec::from_u64(n, z),
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    fn masks(&self) -> (usize, usize) {
        let word = |v: &BitVec| v.words().first().copied().unwrap_or(0) as usize;
        (word(&self.x), word(&self.z))
    }
}

/// Real statevector with amplitudes `sign[a] * 2^(-n/2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateVector {
    n: usize,
    signs: Vec<i8>,
}

impl StateVector {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Sign of the amplitude on basis state `a` (bit `i` of `a` = qubit `i`).
    pub fn sign(&self, a: usize) -> i8 {
        self.signs[a]
    }

    pub fn amplitude(&self, a: usize) -> f64 {
        f64::from(self.signs[a]) * (-(self.n as f64) / 2.0).exp2()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        (0..self.signs.len()).map(|a| self.amplitude(a)).collect()
    }

    pub fn norm_squared(&self) -> f64 {
        compensated_sum(self.amplitudes().into_iter().map(|v| v * v))
    }
}

/// Applies every CCZ, CZ and Z edge to `|+>^n`.
pub fn statevector(h: &Hypergraph3) -> Result<StateVector> {
    let n = h.n();
    check_cap("statevector", n, STATEVECTOR_CAP)?;
    let masks3: Vec<usize> = h.edges3().iter().map(|e| e.iter().map(|&v| 1 << v).sum()).collect();
    let masks2: Vec<usize> = h.edges2().iter().map(|e| e.iter().map(|&v| 1 << v).sum()).collect();
    let masks1: Vec<usize> = h.edges1().iter().map(|&v| 1 << v).collect();
    let signs = (0..1usize << n)
        .map(|a| {
            let flips = masks3
                .iter()
                .chain(&masks2)
                .chain(&masks1)
                .filter(|&&m| a & m == m)
                .count();
            if flips % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .collect();
    Ok(StateVector { n, signs })
}

/// `Σ_a s(a ⊕ x) s(a) (-1)^{z·a}`, the expectation value without the phase
/// `i^{x·z}` and the `2^-n` normalization.
fn raw_overlap(psi: &StateVector, x: usize, z: usize) -> i64 {
    (0..psi.signs.len())
        .map(|a| {
            let s = i64::from(psi.signs[a ^ x]) * i64::from(psi.signs[a]);
            if (z & a).count_ones().is_multiple_of(2) {
                s
            } else {
                -s
            }
        })
        .sum()
}

/// `<psi| P |psi>` including the `i^{x·z}` phase. The value is real for the
/// real states handled here; a non-real result is reported as an error.
pub fn pauli_expectation(psi: &StateVector, p: &PauliLabel) -> Result<f64> {
    if p.n() != psi.n {
        return Err(Error::DimensionMismatch(format!(
            "Pauli on {} qubits, state on {}",
            p.n(),
            psi.n
        )));
    }
    let (x, z) = p.masks();
    let overlap = raw_overlap(psi, x, z);
    let scale = (-(psi.n as f64)).exp2();
    match (x & z).count_ones() % 4 {
        0 => Ok(overlap as f64 * scale),
        2 => Ok(-(overlap as f64) * scale),
        _ if overlap == 0 => Ok(0.0),
        _ => Err(Error::Invariant(format!(
            "expectation of x={x:#b} z={z:#b} is imaginary ({overlap} / 2^{})",
            psi.n
        ))),
    }
}

/// `|<psi| P^{x,z} |psi>|` from the generalized-stabilizer phase sum
///
/// ```text
///   2^-n | Σ_a (-1)^{Σ_i a_i (z_i + Σ_{jk: ijk ∈ E3} x_j x_k) + Σ_{ijk ∈ E3} a_i a_j x_k} |
/// ```
///
/// evaluated without building the state. CZ edges contribute the linear
/// term `a_i x_j + a_j x_i`, Z edges only a global sign.
pub fn eq9_expectation(h: &Hypergraph3, p: &PauliLabel) -> Result<f64> {
    let n = h.n();
    check_cap("phase-sum expectation", n, STATEVECTOR_CAP)?;
    if p.n() != n {
        return Err(Error::DimensionMismatch(format!("Pauli on {} qubits, hypergraph on {n}", p.n())));
    }
    let (x, z) = p.masks();
    let bit = |m: usize, i: usize| (m >> i) & 1 == 1;

    let mut linear = z;
    // quadratic form rows, upper triangular
    let mut quad = vec![0usize; n];
    for &[i, j, k] in h.edges3() {
        for (a, b, c) in [(i, j, k), (j, i, k), (k, i, j)] {
            if bit(x, b) && bit(x, c) {
                linear ^= 1 << a;
            }
        }
        for (lo, hi, c) in [(i, j, k), (i, k, j), (j, k, i)] {
            if bit(x, c) {
                quad[lo] ^= 1 << hi;
            }
        }
    }
    for &[i, j] in h.edges2() {
        if bit(x, j) {
            linear ^= 1 << i;
        }
        if bit(x, i) {
            linear ^= 1 << j;
        }
    }

    let total: i64 = (0..1usize << n)
        .map(|a| {
            let mut parity = (linear & a).count_ones();
            for (i, &row) in quad.iter().enumerate() {
                if bit(a, i) {
                    parity += (row & a).count_ones();
                }
            }
            if parity % 2 == 0 {
                1
            } else {
                -1
            }
        })
        .sum();
    Ok(total.unsigned_abs() as f64 * (-(n as f64)).exp2())
}

/// `|Σ_a s(a ⊕ x) s(a) (-1)^{z·a}|` for every `z`, indexed by `z`; the
/// expectation magnitudes are these values over `2^n`. Uses an in-place
/// Walsh-Hadamard transform over `a`.
pub fn abs_overlaps_for_x(psi: &StateVector, x: usize) -> Vec<u64> {
    let len = psi.signs.len();
    let mut f: Vec<i64> = (0..len)
        .map(|a| i64::from(psi.signs[a ^ x]) * i64::from(psi.signs[a]))
        .collect();
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for i in block..block + half {
                let (u, v) = (f[i], f[i + half]);
                f[i] = u + v;
                f[i + half] = u - v;
            }
        }
        half *= 2;
    }
    f.into_iter().map(i64::unsigned_abs).collect()
}

/// Definitional Pauli-Liouville moment `2^-n Σ_{x,z} |<P^{x,z}>|^{2α}`.
pub fn brute_pl_moment(h: &Hypergraph3, alpha: Alpha) -> Result<Moment> {
    let a = alpha.finite()?;
    let n = h.n();
    check_cap("Pauli-sum moment", n, PAULI_SUM_CAP)?;
    let psi = statevector(h)?;

    // multiplicity of each |overlap| across all (x, z)
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for x in 0..1usize << n {
        for v in abs_overlaps_for_x(&psi, x) {
            if v != 0 {
                *counts.entry(v).or_default() += 1;
            }
        }
    }

    Ok(match alpha.twice_integral() {
        Some(k) => {
            let k = u32::try_from(k).expect("positive alpha");
            // Σ c v^k / 2^(n + n k)
            let num: BigInt = counts.iter().map(|(&v, &c)| BigInt::from(c) * BigInt::from(v).pow(k)).sum();
            let den = BigInt::from(1) << (n as u64 * (1 + u64::from(k)));
            Moment::Exact(BigRational::new(num, den))
        }
        None => {
            let scale = (-(n as f64)).exp2();
            let s = compensated_sum(counts.iter().map(|(&v, &c)| c as f64 * (v as f64 * scale).powf(2.0 * a)));
            Moment::Float(s * scale)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::chain;
    use crate::sre::{exact_pl_moment, EnumOptions};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn plus_states() {
        let psi = statevector(&Hypergraph3::empty(2)).unwrap();
        assert_eq!(psi.amplitudes(), vec![0.5; 4]);
        let one = statevector(&Hypergraph3::empty(1)).unwrap();
        assert_eq!(pauli_expectation(&one, &PauliLabel::from_masks(1, 1, 0)).unwrap(), 1.0);
        assert_eq!(pauli_expectation(&one, &PauliLabel::from_masks(1, 0, 1)).unwrap(), 0.0);
        // Y on |+>
        assert_eq!(pauli_expectation(&one, &PauliLabel::from_masks(1, 1, 1)).unwrap(), 0.0);
    }

    #[test]
    fn single_ccz_state() {
        let psi = statevector(&chain(3).unwrap()).unwrap();
        let amp = 1.0 / 8f64.sqrt();
        for a in 0..8 {
            let expected = if a == 7 { -amp } else { amp };
            assert!((psi.amplitude(a) - expected).abs() < 1e-15);
        }
        assert!((psi.norm_squared() - 1.0).abs() < 1e-12);
        let xxx = PauliLabel::from_masks(3, 0b111, 0);
        assert_eq!(pauli_expectation(&psi, &xxx).unwrap(), 0.5);
        assert_eq!(eq9_expectation(&chain(3).unwrap(), &xxx).unwrap(), 0.5);
    }

    #[test]
    fn identity_pauli() {
        let h = chain(5).unwrap();
        assert_eq!(eq9_expectation(&h, &PauliLabel::from_masks(5, 0, 0)).unwrap(), 1.0);
        let psi = statevector(&h).unwrap();
        assert_eq!(pauli_expectation(&psi, &PauliLabel::from_masks(5, 0, 0)).unwrap(), 1.0);
    }

    #[test]
    fn phase_sum_matches_statevector_with_clifford_edges() {
        let mut h = chain(5).unwrap();
        h.add_edge2(0, 4).unwrap();
        h.add_edge2(1, 3).unwrap();
        h.add_edge1(2).unwrap();
        let psi = statevector(&h).unwrap();
        for x in 0..32u64 {
            for z in 0..32u64 {
                let p = PauliLabel::from_masks(5, x, z);
                let direct = pauli_expectation(&psi, &p).unwrap().abs();
                let phase_sum = eq9_expectation(&h, &p).unwrap();
                assert!((direct - phase_sum).abs() < 1e-12, "x={x} z={z}");
            }
        }
    }

    #[test]
    fn walsh_rows_match_single_expectations() {
        let h = chain(4).unwrap();
        let psi = statevector(&h).unwrap();
        for x in 0..16 {
            let row = abs_overlaps_for_x(&psi, x);
            for (z, &v) in row.iter().enumerate() {
                let e = pauli_expectation(&psi, &PauliLabel::from_masks(4, x as u64, z as u64)).unwrap();
                assert_eq!(v as f64 / 16.0, e.abs());
            }
        }
    }

    #[test]
    fn brute_moments() {
        assert_eq!(
            brute_pl_moment(&Hypergraph3::empty(3), Alpha::Finite(2.0)).unwrap(),
            Moment::Exact(rat(1, 1))
        );
        assert_eq!(
            brute_pl_moment(&chain(3).unwrap(), Alpha::Finite(2.0)).unwrap(),
            Moment::Exact(rat(11, 32))
        );
        let c4 = chain(4).unwrap();
        assert_eq!(
            brute_pl_moment(&c4, Alpha::Finite(3.0)).unwrap(),
            exact_pl_moment(&c4, Alpha::Finite(3.0), &EnumOptions::default()).unwrap()
        );
        let f = brute_pl_moment(&c4, Alpha::Finite(2.3)).unwrap();
        let g = exact_pl_moment(&c4, Alpha::Finite(2.3), &EnumOptions::default()).unwrap();
        assert!((f.to_f64() - g.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn caps() {
        assert!(statevector(&Hypergraph3::empty(15)).unwrap_err().is_capacity());
        assert!(brute_pl_moment(&Hypergraph3::empty(9), Alpha::Finite(2.0))
            .unwrap_err()
            .is_capacity());
        let psi = statevector(&Hypergraph3::empty(2)).unwrap();
        assert!(pauli_expectation(&psi, &PauliLabel::from_masks(3, 0, 0)).is_err());
        assert!(PauliLabel::new(BitVec::zeros(2), BitVec::zeros(3)).is_err());
    }
}
