"""Smoke test for the hypersre_py extension module.

Build the module and put it on the path first, e.g.

    cargo build --release -p hypersre-py --features extension-module
    cp target/release/libhypersre_py.so python/hypersre_py.so
    python3 python/smoke_test.py
"""

import json
import math
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import hypersre_py as hs  # noqa: E402


def main():
    h = hs.Hypergraph.chain(3)
    assert h.n == 3 and h.edges3 == [[0, 1, 2]], h
    r = hs.sre(h, 2)
    assert r["pl_moment"] == Fraction(11, 32), r
    assert abs(r["sre"] - 1.5406) < 1e-4, r
    assert hs.sre(h, "inf")["sre"] == 0.0
    assert hs.sre(h, 1)["sre"] > r["sre"]

    # rank formula against the Pauli sum and the recursion
    c7 = hs.Hypergraph.chain(7)
    assert hs.exact_pl_moment(c7, 3) == hs.brute_pl_moment(c7, 3)
    assert hs.chain_pl_moment(12, 2) == hs.exact_pl_moment(hs.Hypergraph.chain(12), 2)
    slope, intercept = hs.asymptotic_fit(2)
    assert abs(slope - 0.6637) < 5e-4 and abs(intercept + 0.9125) < 5e-3

    # CZ and Z edges do not change the moment
    dressed = hs.Hypergraph(5, [(0, 1, 2), (2, 3, 4)], edges2=[(0, 4)], edges1=[1])
    assert hs.exact_pl_moment(dressed, 2) == hs.exact_pl_moment(dressed.without_clifford_edges(), 2)
    assert abs(hs.pauli_expectation(dressed, 0, 0) - 1.0) < 1e-12

    t4 = hs.Hypergraph.triangular(4)
    stats = t4.vertex_stats()
    assert stats["h_bar"] == 2 and stats["delta_bar"] == 6
    jensen = hs.upper_bound(t4, 2, "jensen")
    assert abs(jensen - 16 * (1 - math.log2(17 / 16))) < 1e-12
    assert hs.upper_bound(t4, 2) <= hs.prev_upper_bound(t4, 2)

    uj3 = hs.Hypergraph.union_jack(3)
    hist = hs.rank_histogram(uj3)
    assert sum(hist) == 2**18
    est = hs.mc_sre(uj3, 2, samples=512, seed=7)
    assert est == hs.mc_sre(uj3, 2, samples=512, seed=7)
    exact = hs.exact_pl_moment(uj3, 2)
    assert abs(est["mean"] - float(exact)) < 5 * est["std_error"], (est, exact)

    again = hs.Hypergraph.from_json(t4.to_json())
    assert again == t4
    assert json.loads(t4.to_json())["n"] == 16
    assert hs.two_h(h, [1, 0, 0]) == 2

    try:
        hs.exact_pl_moment(hs.Hypergraph.union_jack(4), 2)
    except hs.CapacityError:
        pass
    else:
        raise AssertionError("expected CapacityError")
    try:
        hs.Hypergraph(4, [(0, 1, 1)])
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")

    print("hypersre_py smoke test passed")


if __name__ == "__main__":
    main()
