import itertools
import random

import pytest
from conftest import context

from colpart.algebra import (
    AlgebraContext,
    augmentation,
    element_from_json,
    element_to_json,
    ideal_basis,
    include_element,
    multiply,
    permutation_basis,
    quotient_image,
    quotient_map,
    quotient_multiply,
    wreath_diagram,
)
from colpart.diagrams import L, R, identity_diagram, make_diagram, mu, permutation_diagram
from colpart.errors import ContextMismatch, NotAPermutationDiagram
from colpart.groups import cyclic, trivial, wreath_elements
from colpart.rings import GF, QQ
from colpart.verify import check_quotient, run_algebra_suite

C2 = cyclic(2)


def test_unit_and_delta_power():
    ctx = AlgebraContext(1, trivial(), 5, QQ)
    single = ctx.of(make_diagram(1, [[L(1)], [R(1)]]))
    assert multiply(ctx, ctx.one, single) == single
    assert multiply(ctx, single, single) == single.scale(5)


def test_colour_clash_gives_zero():
    ctx = context(2, "C2")
    d1 = make_diagram(2, [[L(1)], [L(2)], [R(1), R(2)]], [[0], [0], [0, 1]], C2)
    d2 = make_diagram(2, [[L(1), L(2)], [R(1)], [R(2)]], group=C2)
    assert multiply(ctx, ctx.of(d1), ctx.of(d2)).is_zero()


def test_augmentation():
    ctx = context(3)
    assert augmentation(ctx, ctx.one) == 1
    assert augmentation(ctx, ctx.of(mu(3, 1, 2))) == 0


@pytest.mark.parametrize("n, G, ideal", [(1, "trivial", 1), (2, "trivial", 13), (2, "C2", 41)])
def test_ideal_dimension(n, G, ideal):
    assert len(ideal_basis(context(n, G))) == ideal


def test_quotient_map_basics():
    ctx = context(2, "C2")
    W = ctx.wreath
    assert quotient_map(ctx, identity_diagram(2, C2)) == W.identity
    swap = permutation_diagram([1, 0], [0, 0], C2)
    x = wreath_elements(C2, 2)[quotient_map(ctx, swap)]
    assert x.labels == (0, 0) and x.perm == (1, 0)
    with pytest.raises(NotAPermutationDiagram):
        quotient_map(ctx, mu(2, 1, 2))
    elements = wreath_elements(C2, 2)
    for k in permutation_basis(ctx):
        d = ctx.diagrams[k]
        assert wreath_diagram(ctx, elements[quotient_map(ctx, d)]) == d


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("G", ["trivial", "C2"])
@pytest.mark.parametrize("delta", [0, 1, 2])
def test_quotient_isomorphism(n, G, delta):
    rep = check_quotient(context(n, G, delta))
    assert rep["failures"] == []


def test_quotient_multiply_f3():
    ctx = AlgebraContext(2, C2, 2, GF(3))
    for i, j in itertools.product(range(ctx.dim), repeat=2):
        u, v = ctx.basis(i), ctx.basis(j)
        lhs = quotient_multiply(ctx, u, v)
        rhs = quotient_image(ctx, u) * quotient_image(ctx, v)
        assert lhs == rhs


def test_include_element():
    small, big = context(2), context(3)
    u = small.of(mu(2, 1, 2)) + small.one.scale(3)
    assert include_element(small, big, u) == big.of(mu(3, 1, 2)) + big.one.scale(3)
    with pytest.raises(ContextMismatch):
        include_element(small, context(3, "C2"), u)


def test_mixed_contexts_rejected():
    with pytest.raises(ContextMismatch):
        multiply(context(2), context(2).one, context(2, "C2").one)


def test_element_json_roundtrip():
    ctx = AlgebraContext(2, C2, 2, GF(5))
    rng = random.Random(3)
    for _ in range(20):
        u = ctx.element({rng.randrange(ctx.dim): rng.randrange(1, 5) for _ in range(4)})
        assert element_from_json(ctx, element_to_json(u)) == u


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("G", ["trivial", "C2"])
@pytest.mark.parametrize("delta", [0, 2])
def test_algebra_suite(n, G, delta):
    rep = run_algebra_suite(context(n, G, delta), seed=7)
    assert rep["pass"], [c for c in rep["checks"] if c["failures"]]
