import itertools

import pytest
from conftest import context

from colpart.algebra import ideal_basis, multiply
from colpart.cover import (
    CoverSpec,
    count_specs,
    cover_union_check,
    enumerate_specs,
    idempotent_generator,
    intersection_basis,
    is_zero_by_criterion,
    k_ideal_basis,
    l_ideal_basis,
    verify_cover,
    verify_retraction_mu,
    verify_retraction_nu,
)
from colpart.diagrams import L, R, NodeId, identity_diagram, make_diagram, mu, nu
from colpart.errors import BadIndex, FullS, UsageError, ZeroIdeal
from colpart.groups import cyclic, symmetric, trivial
from colpart.verify import run_lemmas_suite

C2 = cyclic(2)
E, T = 0, 1


def isolated_right(d, i):
    code = NodeId("R", i).code(d.n)
    return any(b == (code,) for b in d.blocks)


def right_colour(d, i, j, G):
    ci, cj = NodeId("R", i).code(d.n), NodeId("R", j).code(d.n)
    for b, cols in zip(d.blocks, d.colours):
        if ci in b and cj in b:
            return G.m(G.inv(cols[b.index(ci)]), cols[b.index(cj)])
    return None


def test_k_and_l_counts_by_filtering():
    ctx1 = context(1)
    assert len(k_ideal_basis(ctx1, 1)) == 1
    ctx = context(2)
    assert len(k_ideal_basis(ctx, 1)) == 5
    assert len(l_ideal_basis(ctx, 1, 2, E)) == 5
    c2 = context(2, "C2")
    brute_k = [k for k, d in enumerate(c2.diagrams) if isolated_right(d, 1)]
    brute_l = [k for k, d in enumerate(c2.diagrams) if right_colour(d, 1, 2, C2) == T]
    assert k_ideal_basis(c2, 1) == brute_k
    assert l_ideal_basis(c2, 1, 2, T) == brute_l
    # 1' isolated (or 1',2' merged) leaves three coloured nodes: 4 + 3·2 + 1
    assert len(brute_k) == len(brute_l) == 11
    with pytest.raises(BadIndex):
        k_ideal_basis(ctx, 3)
    with pytest.raises(BadIndex):
        l_ideal_basis(ctx, 2, 1, E)


@pytest.mark.parametrize("n, G", [(1, "trivial"), (2, "trivial"), (3, "C2")])
def test_cover_union(n, G):
    assert cover_union_check(context(n, G))


def test_intersection_examples():
    ctx = context(2, "C2")
    assert len(intersection_basis(ctx, CoverSpec())) == ctx.dim
    assert intersection_basis(ctx, CoverSpec(frozenset({1}), frozenset({((1, 2), T)}))) == []
    assert intersection_basis(ctx, CoverSpec(frozenset(), frozenset({((1, 2), E), ((1, 2), T)}))) == []
    with pytest.raises(UsageError):
        CoverSpec(frozenset(), frozenset({((2, 1), E)}))


def test_zero_criterion_condition_three():
    S3 = symmetric(3)
    f, g = 1, 3
    fg = S3.m(f, g)
    ok = CoverSpec(frozenset(), frozenset({((1, 2), f), ((2, 3), g), ((1, 3), fg)}))
    assert not is_zero_by_criterion(ok, S3)
    other = next(h for h in range(6) if h != fg)
    bad = CoverSpec(frozenset(), frozenset({((1, 2), f), ((2, 3), g), ((1, 3), other)}))
    assert is_zero_by_criterion(bad, S3)
    assert not is_zero_by_criterion(CoverSpec(), S3)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("G", ["trivial", "C2"])
def test_zero_criterion_exhaustive(n, G):
    ctx = context(n, G)
    for spec in enumerate_specs(n, ctx.group):
        assert is_zero_by_criterion(spec, ctx.group) == (not intersection_basis(ctx, spec)), spec


def test_spec_counting():
    for n, order in [(2, 1), (2, 2), (3, 2)]:
        G = cyclic(order)
        assert count_specs(n, order) == len(list(enumerate_specs(n, G)))
        assert count_specs(n, order, n - 1) == len(list(enumerate_specs(n, G, n - 1)))


def test_generator_examples():
    ctx = context(2, "C2")
    e = idempotent_generator(ctx, CoverSpec(frozenset({1})))
    assert e == ctx.of(mu(2, 1, 2, C2))
    assert multiply(ctx, e, e) == e
    spec = CoverSpec(frozenset(), frozenset({((1, 2), T)}))
    e = idempotent_generator(ctx, spec)
    assert e == ctx.of(nu(2, 1, 2, T, C2))
    basis = intersection_basis(ctx, spec)
    assert len(basis) == 11
    for k in basis:
        assert multiply(ctx, ctx.basis(k), e) == ctx.basis(k)
    assert idempotent_generator(ctx, CoverSpec()) == ctx.of(identity_diagram(2, C2))
    with pytest.raises(FullS):
        idempotent_generator(ctx, CoverSpec(frozenset({1, 2})))
    with pytest.raises(ZeroIdeal):
        idempotent_generator(ctx, CoverSpec(frozenset(), frozenset({((1, 2), E), ((1, 2), T)})))


def test_retractions_whole_algebra():
    ctx = context(2, "C2")
    rep = verify_retraction_mu(ctx, CoverSpec(), 1, 2)
    assert rep["checked"] == 49 and rep["failures"] == [] and not rep["vacuous"]
    rep = verify_retraction_nu(ctx, CoverSpec(), 1, 2, T)
    assert rep["checked"] == 49 and rep["failures"] == []
    # vacuous: L_{1,2,t} ∩ L_{1,2,e} = 0
    rep = verify_retraction_nu(ctx, CoverSpec(frozenset(), frozenset({((1, 2), E)})), 1, 2, T)
    assert rep["vacuous"] and rep["failures"] == []


def test_case_table_colouring_would_fail():
    """The colouring with γ(a,b)=1 and γ(a,ā)=h kills L_{a,b,h} instead of fixing it."""
    ctx = context(2, "C2")
    alt = make_diagram(2, [[L(1), L(2), R(1), R(2)]], [[E, E, T, T]], C2)
    members = l_ideal_basis(ctx, 1, 2, T)
    fixed = sum(ctx.compose_indices(k, ctx.index[alt]) == (k, 0) for k in members)
    assert fixed < len(members)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("G", ["trivial", "C2"])
def test_verify_cover(n, G):
    rep = verify_cover(context(n, G), max(n - 1, 0), seed=1)
    assert rep["failures"] == []
    assert rep["exhaustive"]


def test_verify_cover_height_checked():
    with pytest.raises(UsageError):
        verify_cover(context(2), 2)


@pytest.mark.parametrize("n, G", [(2, "C2"), (3, "trivial"), (3, "C2")])
def test_lemmas_suite(n, G):
    rep = run_lemmas_suite(context(n, G))
    assert rep["pass"], [c for c in rep["checks"] if c["failures"]]


def test_left_multiples_stay_inside():
    ctx = context(3, "C2")
    spec = CoverSpec(frozenset({2}), frozenset({((1, 3), T)}))
    e = idempotent_generator(ctx, spec)
    members = set(intersection_basis(ctx, spec))
    for k in itertools.islice(ideal_basis(ctx), 0, None, 7):
        assert set(multiply(ctx, ctx.basis(k), e).support()) <= members
