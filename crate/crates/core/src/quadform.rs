//! Reduction of GF(2) quadratic forms `Q(a) = aᵀ C a` to canonical form.
//!
//! `C` is strictly upper triangular, so `Q` has no linear part in the original
//! variables. After a change of variables `a = P a'` the form becomes
//!
//! ```text
//!   a'0 a'1 + ... + a'(r-3) a'(r-2) + a'(r-1)                  r odd
//!   a'0 a'1 + ... + a'(r-2) a'(r-1) + eta (a'(r-2) + a'(r-1))  r even
//! ```
//!
//! The transform is found with a symplectic Gram–Schmidt pass over the polar
//! form `B = C + Cᵀ`, followed by fixing up the values of `Q` on the resulting
//! basis vectors.

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

/// Canonical form of a GF(2) quadratic form and the transform reaching it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardForm {
    /// Invertible `N x N` transform with `a = P a'`.
    pub p: BitMatrix,
    /// Dimension of the non-degenerate part.
    pub r: usize,
    /// Only ever set when `r` is even.
    pub eta: bool,
    /// Number of hyperbolic pairs `a'(2i) a'(2i+1)`.
    pub pairs: usize,
}

impl StandardForm {
    pub fn n(&self) -> usize {
        self.p.n_rows()
    }

    /// Value of the canonical form at `a'`.
    pub fn evaluate(&self, a_prime: &BitVec) -> bool {
        let mut v = false;
        for i in 0..self.pairs {
            v ^= a_prime.get(2 * i) & a_prime.get(2 * i + 1);
        }
        if self.r % 2 == 1 {
            v ^= a_prime.get(self.r - 1);
        } else if self.eta {
            v ^= a_prime.get(self.r - 2) ^ a_prime.get(self.r - 1);
        }
        v
    }

    /// Upper-triangular representative of `Pᵀ C P`: the strictly-lower part is
    /// folded onto the upper part, the diagonal carries the linear terms.
    pub fn transformed(&self, c: &BitMatrix) -> Result<BitMatrix> {
        let congruent = self.p.transpose().multiply(c)?.multiply(&self.p)?;
        let n = congruent.n_rows();
        BitMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => congruent.get(i, j) ^ congruent.get(j, i),
            std::cmp::Ordering::Equal => congruent.get(i, i),
            std::cmp::Ordering::Greater => false,
        })
    }
}

fn check_strict_upper(c: &BitMatrix) -> Result<()> {
    if !c.is_square() {
        return Err(Error::Contract(format!(
            "quadratic form matrix must be square, got {}x{}",
            c.n_rows(),
            c.n_cols()
        )));
    }
    if !c.is_strictly_upper() {
        return Err(Error::Contract(
            "quadratic form matrix must be strictly upper triangular".into(),
        ));
    }
    Ok(())
}

/// `aᵀ C a` over GF(2).
pub fn quad_value(c: &BitMatrix, a: &BitVec) -> bool {
    a.iter_ones().fold(false, |acc, i| {
        let row = c.row(i);
        let par = row
            .iter()
            .zip(a.words())
            .fold(0u32, |p, (x, y)| p ^ (x & y).count_ones());
        acc ^ (par & 1 == 1)
    })
}

struct Forms<'a> {
    c: &'a BitMatrix,
    polar: BitMatrix,
}

impl Forms<'_> {
    fn q(&self, v: &BitVec) -> bool {
        quad_value(self.c, v)
    }

    fn polar_image(&self, v: &BitVec) -> BitVec {
        self.polar.mul_vec(v).expect("square polar matrix")
    }
}

/// Reduces `Q(a) = aᵀ C a` to canonical form.
///
/// Pivots are taken lowest index first, so the output is deterministic. The
/// transform returned is one valid choice among many.
pub fn standardize(c: &BitMatrix) -> Result<StandardForm> {
    check_strict_upper(c)?;
    let n = c.n_rows();
    let forms = Forms {
        c,
        polar: c.symmetrize_upper()?,
    };

    let mut pool: Vec<BitVec> = (0..n).map(|i| BitVec::unit(n, i)).collect();
    let mut pairs: Vec<(BitVec, BitVec)> = Vec::new();

    // symplectic Gram-Schmidt
    'search: loop {
        for i in 0..pool.len() {
            let image = forms.polar_image(&pool[i]);
            if image.is_zero() {
                continue;
            }
            let Some(j) = (i + 1..pool.len()).find(|&j| image.dot(&pool[j])) else {
                continue;
            };
            let f = pool.remove(j);
            let e = pool.remove(i);
            let be = image;
            let bf = forms.polar_image(&f);
            for w in &mut pool {
                let with_e = w.dot(&be);
                let with_f = w.dot(&bf);
                if with_f {
                    w.xor_assign(&e);
                }
                if with_e {
                    w.xor_assign(&f);
                }
            }
            pairs.push((e, f));
            continue 'search;
        }
        break;
    }
    let mut radical = pool;

    // clear Q on each pair where possible; Q(e)=Q(f)=1 pairs are left marked
    let fix_pair = |e: &mut BitVec, f: &mut BitVec| match (forms.q(e), forms.q(f)) {
        (true, false) => e.xor_assign(f),
        (false, true) => f.xor_assign(e),
        _ => {}
    };
    for (e, f) in &mut pairs {
        fix_pair(e, f);
    }
    let mut odd: Vec<usize> = (0..pairs.len())
        .filter(|&k| forms.q(&pairs[k].0) && forms.q(&pairs[k].1))
        .collect();
    // two pairs of Arf invariant 1 combine into two pairs of invariant 0
    while odd.len() >= 2 {
        let k2 = odd.pop().expect("len >= 2");
        let k1 = odd.pop().expect("len >= 2");
        let (e2, f1) = (pairs[k2].0.clone(), pairs[k1].1.clone());
        pairs[k1].0.xor_assign(&e2);
        pairs[k2].1.xor_assign(&f1);
        for k in [k1, k2] {
            let (e, f) = &mut pairs[k];
            fix_pair(e, f);
        }
    }
    let arf_pair = odd.pop();

    // Q is additive on the radical; keep at most one vector with Q = 1
    let lone = radical.iter().position(|w| forms.q(w));
    if let Some(l) = lone {
        let w0 = radical.remove(l);
        for w in &mut radical {
            if forms.q(w) {
                w.xor_assign(&w0);
            }
        }
        if let Some(k) = arf_pair {
            pairs[k].0.xor_assign(&w0);
            pairs[k].1.xor_assign(&w0);
        }
        radical.insert(0, w0);
    } else if let Some(k) = arf_pair {
        let last = pairs.remove(k);
        pairs.push(last);
    }

    let h = pairs.len();
    let r = 2 * h + usize::from(lone.is_some());
    let eta = lone.is_none() && arf_pair.is_some();

    let columns: Vec<BitVec> = pairs
        .into_iter()
        .flat_map(|(e, f)| [e, f])
        .chain(radical)
        .collect();
    let p = BitMatrix::from_row_vecs(n, &columns)?.transpose();

    Ok(StandardForm {
        p,
        r,
        eta,
        pairs: h,
    })
}

/// Returns `(2h, r)` where `2h = rank(C + Cᵀ)` and `r` is the canonical-form
/// dimension, after checking `2h == r - (r mod 2)`.
pub fn rank_relation(c: &BitMatrix) -> Result<(usize, usize)> {
    let form = standardize(c)?;
    let two_h = c.symmetrize_upper()?.rank();
    if two_h != form.r - form.r % 2 || two_h != 2 * form.pairs {
        return Err(Error::Invariant(format!(
            "rank(C+Ct) = {two_h} but canonical form has r = {} with {} pairs",
            form.r, form.pairs
        )));
    }
    Ok((two_h, form.r))
}
