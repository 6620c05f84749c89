import numpy as np
import pytest
from conftest import context
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix
from sympy import ZZ as SZ
from sympy.matrices.normalforms import smith_normal_form

from colpart.algebra import AlgebraContext
from colpart.errors import BudgetExceeded, RingUnsupported
from colpart.groups import abelianization_invariants, cyclic, direct_product, parse_group, symmetric, trivial, wreath_product
from colpart.homology.bar import (
    AugmentedAlgebraView,
    ReducedProducts,
    bar_complex,
    check_d_squared,
    group_algebra_view,
    partition_algebra_view,
)
from colpart.homology.linalg import FieldRank, dense_rank, kernel_basis, smith_divisors
from colpart.homology.tor import (
    compare_stability,
    ext_of,
    homology,
    induced_map_on_tor,
    tor_of_algebra,
    tor_of_group,
    tor_of_view,
)
from colpart.rings import GF, QQ, ZZ

D8 = wreath_product(cyclic(2), 2)


# ---------------------------------------------------------------- linear algebra oracles


def _coo(A, ring):
    cols, rows = np.nonzero(A.T)
    vals = A[rows, cols]
    if ring.kind == "F":
        vals = vals % ring.p
        keep = vals != 0
        return rows[keep].astype(np.int64), cols[keep].astype(np.int64), vals[keep].astype(np.int64)
    return rows.astype(np.int64), cols.astype(np.int64), np.array([ring(int(v)) for v in vals], dtype=object)


matrices = st.integers(0, 2**32 - 1).map(np.random.default_rng)


@given(matrices, st.sampled_from(["F2", "F3", "F7", "Q"]))
@settings(max_examples=150, deadline=None)
def test_field_rank_matches_dense(rng, ring_name):
    ring = {"F2": GF(2), "F3": GF(3), "F7": GF(7), "Q": QQ}[ring_name]
    nr, nc = int(rng.integers(1, 14)), int(rng.integers(1, 20))
    density = rng.choice([0.08, 0.2, 0.5])
    A = (rng.random((nr, nc)) < density) * rng.integers(-3, 4, (nr, nc))
    fr = FieldRank(nr, ring)
    rows, cols, vals = _coo(A, ring)
    cut = int(rng.integers(0, rows.size + 1))
    # feed in two column-aligned chunks
    while 0 < cut < rows.size and cols[cut] == cols[cut - 1]:
        cut += 1
    fr.feed(rows[:cut], cols[:cut], vals[:cut])
    fr.feed(rows[cut:], cols[cut:], vals[cut:])
    assert fr.rank() == dense_rank([[ring(int(x)) for x in row] for row in A], ring)


@given(matrices)
@settings(max_examples=100, deadline=None)
def test_smith_matches_sympy(rng):
    nr, nc = int(rng.integers(1, 8)), int(rng.integers(1, 8))
    A = (rng.random((nr, nc)) < 0.5) * rng.integers(-9, 10, (nr, nc))
    cols = [{i: int(A[i, j]) for i in range(nr) if A[i, j]} for j in range(nc)]
    rank, divisors = smith_divisors(cols, nr)
    S = smith_normal_form(Matrix(A.tolist()), domain=SZ)
    diag = [abs(int(S[i, i])) for i in range(min(nr, nc)) if S[i, i] != 0]
    assert rank == len(diag)
    assert divisors == [d for d in diag if d > 1]
    assert all(b % a == 0 for a, b in zip(divisors, divisors[1:]))


def test_kernel_basis():
    M = [[QQ(1), QQ(2), QQ(3)], [QQ(2), QQ(4), QQ(6)]]
    K = kernel_basis(M, QQ)
    assert len(K) == 2
    for v in K:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in M)


# ---------------------------------------------------------------- bar complex


def test_ground_ring_has_no_positive_chains():
    view = group_algebra_view(trivial(), GF(2))
    C = bar_complex(view, 3)
    assert [C.dim(q) for q in range(4)] == [1, 0, 0, 0]
    assert homology(C).betti == [1, 0, 0, 0]


def test_trivial_group():
    assert tor_of_group(trivial(), ZZ, 3).rank == [1, 0, 0, 0]


@pytest.mark.parametrize("ring", [GF(2), GF(3), QQ, ZZ])
def test_d_squared_partition(ring):
    C = bar_complex(partition_algebra_view(context(2, "C2", 1, str(ring))), 2)
    assert check_d_squared(C, 2)


def test_reduced_products_have_at_most_three_terms():
    rp = ReducedProducts(partition_algebra_view(context(2, "C2")))
    assert rp.idx.shape[2] == 3


def test_view_checks():
    group_algebra_view(symmetric(3), QQ).check()
    partition_algebra_view(context(3)).check()


def test_budget():
    with pytest.raises(BudgetExceeded):
        bar_complex(partition_algebra_view(context(3)), 4, budget_mb=64)


# ---------------------------------------------------------------- group homology


def test_sigma2_mod2():
    assert tor_of_group(symmetric(2), GF(2), 3).betti == [1, 1, 1, 1]


def test_sigma2_integral():
    r = tor_of_group(symmetric(2), ZZ, 3)
    assert r.rank == [1, 0, 0, 0]
    assert r.divisors == [[], [2], [], [2]]


def test_dihedral():
    assert tor_of_group(D8, GF(2), 3).betti == [1, 2, 3, 4]
    r = tor_of_group(D8, ZZ, 2)
    assert r.divisors[1] == [2, 2] and r.divisors[2] == [2]


def test_sigma3():
    r = tor_of_group(symmetric(3), ZZ, 2)
    assert r.divisors[:3] == [[], [2], []]
    assert tor_of_group(symmetric(3), GF(2), 2).betti == [1, 1, 1]
    assert tor_of_group(symmetric(3), GF(3), 2).betti == [1, 0, 0]


@pytest.mark.parametrize(
    "group",
    [cyclic(3), cyclic(4), cyclic(6), symmetric(3), direct_product(cyclic(2), cyclic(2)), D8, parse_group("prod:C:2,C:3")],
    ids=["C3", "C4", "C6", "S3", "V4", "D8", "C2xC3"],
)
def test_tor1_is_abelianization(group):
    r = tor_of_group(group, ZZ, 1)
    assert r.rank[1] == 0
    assert r.divisors[1] == abelianization_invariants(group)


def test_rational_vs_integral_and_mod_p():
    ctx_q, ctx_z = context(2, "C2", 1, "Q"), context(2, "C2", 1, "Z")
    q = tor_of_algebra(ctx_q, 2).betti
    z = tor_of_algebra(ctx_z, 1)
    assert q[:2] == z.rank
    for p in (2, 3):
        fp = tor_of_algebra(context(2, "C2", 1, f"F:{p}"), 2).betti
        assert all(a >= b for a, b in zip(fp, q))


def test_ext_matches_tor():
    assert ext_of(group_algebra_view(symmetric(2), GF(2)), 3).betti == [1, 1, 1, 1]
    assert ext_of(partition_algebra_view(context(2, "C2", 1, "F:2")), 1).betti == [1, 2]
    with pytest.raises(RingUnsupported):
        ext_of(group_algebra_view(symmetric(2), ZZ), 1)


def test_custom_view():
    # k[x]/(x^2) with ε(x)=0: Tor_q = k in every degree
    ring = GF(3)
    target = np.array([[0, 1], [1, -1]])
    coef = np.array([[1, 1], [1, 0]])
    A = AugmentedAlgebraView("dual numbers", ring, target, coef, np.array([1, 0]), 0)
    assert tor_of_view(A, 3).betti == [1, 1, 1, 1]


# ---------------------------------------------------------------- comparisons


@pytest.mark.parametrize("G", ["trivial", "C2"])
@pytest.mark.parametrize("delta", [0, 1])
@pytest.mark.parametrize("ring", ["Z", "Q", "F:2", "F:3"])
def test_stability_n2(G, delta, ring):
    rep = compare_stability(context(2, G, delta, ring), 1)
    assert rep["pass"], rep["mismatches"]


def test_stability_n2_values():
    rep = compare_stability(context(2, "C2", 1, "Z"), 1)
    assert rep["algebra"].divisors[1] == rep["wreath"].divisors[1] == [2, 2]
    rep = compare_stability(context(2, "trivial", 0, "F:3"), 1)
    assert rep["algebra"].betti == rep["wreath"].betti == [1, 0]


def test_stability_n1():
    rep = compare_stability(AlgebraContext(1, symmetric(3), 1, QQ), 0)
    assert rep["pass"] and rep["asserted_range"] == 0


def test_induced_map_small():
    rep = induced_map_on_tor(context(1, "C2", 1, "F:2"), context(2, "C2", 1, "F:2"), 1)
    assert rep["chain_map"]
    assert rep["degrees"][0]["isomorphism"]
