//! Oracle checks behind the `verify` subcommand.

use hypersre::oracle::{abs_overlaps_for_x, PAULI_SUM_CAP};
use hypersre::quadform::quad_value;
use hypersre::sre::{exact_pl_moment, two_h, upper_bound};
use hypersre::{
    brute_pl_moment, eq9_expectation, pauli_expectation, rank_relation, standardize, statevector, Alpha, BitVec,
    BoundVariant, EnumOptions, Error, Hypergraph3, Moment, PauliLabel, Result,
};
use serde::Serialize;

use crate::{EXIT_OK, EXIT_VERIFY};

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, failure: Option<String>, ok_detail: impl Into<String>) -> Self {
        match failure {
            None => Check {
                name: name.to_string(),
                passed: true,
                detail: ok_detail.into(),
            },
            Some(d) => Check {
                name: name.to_string(),
                passed: false,
                detail: d,
            },
        }
    }
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub n: usize,
    pub passed: bool,
    pub checks: &'a [Check],
}

impl<'a> Report<'a> {
    pub fn new(n: usize, checks: &'a [Check]) -> Self {
        Report {
            n,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

/// 0 if every check passed, 3 otherwise.
pub fn exit_code(checks: &[Check]) -> i32 {
    if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}

fn bits(n: usize, mask: usize) -> BitVec {
    BitVec::from_u64(n, mask as u64)
}

fn moments_agree(a: &Moment, b: &Moment) -> bool {
    match (a, b) {
        (Moment::Exact(x), Moment::Exact(y)) => x == y,
        _ => (a.to_f64() - b.to_f64()).abs() <= 1e-12 * b.to_f64().abs().max(1e-300),
    }
}

/// Every oracle check on `h`. Needs `n <= 8`; `alpha` is added to the
/// moment comparisons when it is finite.
pub fn run_checks(h: &Hypergraph3, alpha: Alpha, opts: &EnumOptions) -> Result<Vec<Check>> {
    let n = h.n();
    if n > PAULI_SUM_CAP {
        return Err(Error::Capacity {
            what: "verify",
            n,
            cap: PAULI_SUM_CAP,
            hint: "the oracle sums over all 4^n Pauli strings",
        });
    }
    let psi = statevector(h)?;
    let mut checks = Vec::new();

    let norm = psi.norm_squared();
    checks.push(Check::new(
        "state_norm",
        ((norm - 1.0).abs() > 1e-12).then(|| format!("norm squared {norm}")),
        "1",
    ));

    let mut bad = None;
    'outer: for x in 0..1usize << n {
        for z in 0..1usize << n {
            let p = PauliLabel::from_masks(n, x as u64, z as u64);
            let direct = pauli_expectation(&psi, &p)?.abs();
            let phase = eq9_expectation(h, &p)?;
            if (direct - phase).abs() > 1e-12 {
                bad = Some(format!("x={x:#b} z={z:#b}: statevector {direct}, phase sum {phase}"));
                break 'outer;
            }
        }
    }
    checks.push(Check::new("phase_sum", bad, format!("{} Pauli strings", 1u64 << (2 * n))));

    let mut bad = None;
    for x in 0..1usize << n {
        let hx = two_h(h, &bits(n, x))? / 2;
        let overlaps = abs_overlaps_for_x(&psi, x);
        let nonzero: Vec<u64> = overlaps.into_iter().filter(|&v| v != 0).collect();
        let want = 1u64 << (n - hx);
        if nonzero.len() != 1 << (2 * hx) || nonzero.iter().any(|&v| v != want) {
            bad = Some(format!(
                "x={x:#b}: h={hx}, {} nonzero expectations, values {:?}",
                nonzero.len(),
                nonzero.iter().collect::<std::collections::BTreeSet<_>>()
            ));
            break;
        }
    }
    checks.push(Check::new(
        "expectation_structure",
        bad,
        "2^(2h) nonzero expectations of magnitude 2^-h per x",
    ));

    let mut bad = None;
    'forms: for x in 0..1usize << n {
        let c = h.c_matrix(&bits(n, x))?;
        let form = standardize(&c)?;
        let (two_h_x, r) = rank_relation(&c)?;
        if two_h_x != 2 * form.pairs || r != form.r {
            bad = Some(format!("x={x:#b}: rank relation ({two_h_x}, {r}) vs form ({}, {})", form.pairs, form.r));
            break;
        }
        for a in 0..1usize << n {
            let ap = bits(n, a);
            let pa = form.p.mul_vec(&ap)?;
            if quad_value(&c, &pa) != form.evaluate(&ap) {
                bad = Some(format!("x={x:#b}: standard form differs at a'={a:#b}"));
                break 'forms;
            }
        }
    }
    checks.push(Check::new("standard_form", bad, "all C(x) reduce to their standard form"));

    let mut alphas = vec![Alpha::Finite(2.0), Alpha::Finite(3.0)];
    if matches!(alpha, Alpha::Finite(_)) && !alphas.contains(&alpha) {
        alphas.push(alpha);
    }
    let mut bad = None;
    for &a in &alphas {
        let fast = exact_pl_moment(h, a, opts)?;
        let slow = brute_pl_moment(h, a)?;
        if !moments_agree(&fast, &slow) {
            bad = Some(format!("alpha={a}: rank formula {fast}, Pauli sum {slow}"));
            break;
        }
    }
    checks.push(Check::new("rank_formula", bad, format!("alpha in {:?}", alphas.iter().map(|a| a.to_string()).collect::<Vec<_>>())));

    let bare = h.without_clifford_edges();
    let mut bad = None;
    for &a in &alphas {
        let with = exact_pl_moment(h, a, opts)?;
        let without = brute_pl_moment(&bare, a)?;
        if !moments_agree(&with, &without) {
            bad = Some(format!("alpha={a}: {with} with CZ/Z edges, {without} without"));
            break;
        }
    }
    checks.push(Check::new("clifford_invariance", bad, "CZ and Z edges leave the moment unchanged"));

    let mut bad = None;
    for &a in alphas.iter().filter(|a| a.as_f64() > 1.0) {
        let m = exact_pl_moment(h, a, opts)?;
        let s = hypersre::sre::sre_from_moment(&m, a.as_f64());
        let pv = upper_bound(h, a, BoundVariant::PerVertex)?;
        let jb = upper_bound(h, a, BoundVariant::Jensen)?;
        if s > pv + 1e-9 || pv > jb + 1e-9 {
            bad = Some(format!("alpha={a}: sre {s}, per-vertex {pv}, jensen {jb}"));
            break;
        }
    }
    checks.push(Check::new("bounds_order", bad, "sre <= per-vertex bound <= jensen bound"));

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hypersre::chain;

    #[test]
    fn chain_passes() {
        let checks = run_checks(&chain(6).unwrap(), Alpha::Finite(2.0), &EnumOptions::default()).unwrap();
        assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        assert_eq!(exit_code(&checks), EXIT_OK);
    }

    #[test]
    fn any_failure_exits_three() {
        let mut checks = run_checks(&chain(4).unwrap(), Alpha::Finite(2.0), &EnumOptions::default()).unwrap();
        checks[2].passed = false;
        assert_eq!(exit_code(&checks), EXIT_VERIFY);
    }

    #[test]
    fn too_large_is_capacity() {
        let err = run_checks(&chain(9).unwrap(), Alpha::Finite(2.0), &EnumOptions::default()).unwrap_err();
        assert!(err.is_capacity());
    }
}
