import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colpart.diagrams import (
    L,
    R,
    canonical,
    compose,
    count_diagrams,
    diagram_from_json,
    diagram_to_json,
    enumerate_diagrams,
    enumerate_partitions,
    enumerate_partitions_recursive,
    gamma,
    gamma_axioms_hold,
    identity_diagram,
    include,
    is_permutation,
    make_diagram,
    mu,
    nu,
    permutation_diagram,
    propagating_count,
)
from colpart.errors import BadIndex, SizeMismatch, UsageError
from colpart.groups import cyclic, symmetric, trivial

C2 = cyclic(2)
E, T = 0, 1


@pytest.mark.parametrize("n, bell", [(1, 2), (2, 15), (3, 203), (4, 4140)])
def test_partition_generators_agree(n, bell):
    a = list(enumerate_partitions(n))
    b = list(enumerate_partitions_recursive(n))
    assert len(a) == bell
    assert sorted(p.blocks for p in a) == sorted(p.blocks for p in b)
    assert len(set(p.blocks for p in a)) == bell


@pytest.mark.parametrize("n, G, count", [(1, C2, 3), (2, trivial(), 15), (2, C2, 49), (3, trivial(), 203), (3, C2, 1539)])
def test_diagram_counts(n, G, count):
    ds = list(enumerate_diagrams(n, G))
    assert len(ds) == count == count_diagrams(n, G.order)
    assert len(set(ds)) == count


def brute_force_colourings(n, G):
    """Count colourings by listing every vector of node colours and quotienting by the
    left G-action on each block (independent of the base-point convention)."""
    total = 0
    for p in enumerate_partitions_recursive(n):
        orbits = set()
        nodes = [x for blk in p.blocks for x in blk]
        for cols in itertools.product(range(G.order), repeat=len(nodes)):
            colour = dict(zip(nodes, cols))
            key = []
            for blk in p.blocks:
                base = G.inv(colour[blk[0]])
                key.append(tuple(G.m(base, colour[x]) for x in blk))
            orbits.add((p.blocks, tuple(key)))
        total += len(orbits)
    return total


def test_count_matches_brute_force():
    assert brute_force_colourings(2, C2) == 49
    assert brute_force_colourings(1, cyclic(3)) == 1 * 3 + 1


def test_permutation_diagrams_match_wreath_order():
    for n, G in [(1, C2), (2, trivial()), (2, C2), (3, trivial()), (3, C2)]:
        perms = [d for d in enumerate_diagrams(n, G) if is_permutation(d)]
        assert len(perms) == G.order**n * len(list(itertools.permutations(range(n))))


def test_composition_examples():
    single = make_diagram(1, [[L(1)], [R(1)]])
    out = compose(single, single, trivial())
    assert out.result == single and out.internal_components == 1

    d1 = make_diagram(2, [[L(1)], [L(2)], [R(1), R(2)]], [[E], [E], [E, T]], C2)
    d2 = make_diagram(2, [[L(1), L(2)], [R(1)], [R(2)]], [[E, E], [E], [E]], C2)
    assert compose(d1, d2, C2).result is None
    d2t = make_diagram(2, [[L(1), L(2)], [R(1)], [R(2)]], [[E, T], [E], [E]], C2)
    out = compose(d1, d2t, C2)
    assert out.internal_components == 1
    assert out.result == make_diagram(2, [[L(1)], [L(2)], [R(1)], [R(2)]], group=C2)


def test_identity_laws():
    for G in (trivial(), C2):
        one = identity_diagram(2, G)
        for d in enumerate_diagrams(2, G):
            assert compose(one, d, G) == (d, 0)
            assert compose(d, one, G) == (d, 0)
    with pytest.raises(SizeMismatch):
        compose(identity_diagram(1), identity_diagram(2), trivial())


def test_permutation_constructor():
    assert permutation_diagram([0, 1], [E, E], C2) == identity_diagram(2, C2)
    swap = permutation_diagram([1, 0], [E, E], C2)
    assert str(swap) == "{{1,2'},{2,1'}}"
    every = {permutation_diagram(s, lab, C2) for s in itertools.permutations(range(2)) for lab in itertools.product(range(2), repeat=2)}
    assert len(every) == 8


def test_queries():
    assert propagating_count(identity_diagram(3)) == 3 and is_permutation(identity_diagram(3))
    singles = make_diagram(2, [[L(1)], [L(2)], [R(1)], [R(2)]])
    assert propagating_count(singles) == 0
    whole = make_diagram(2, [[L(1), L(2), R(1), R(2)]])
    assert propagating_count(whole) == 1 and not is_permutation(whole)
    assert gamma(whole, L(1), R(2), trivial()) == 0
    assert gamma(singles, L(1), R(1), trivial()) is None


def test_mu():
    assert mu(2, 1, 2) == make_diagram(2, [[R(1)], [L(1), L(2), R(2)]])
    assert mu(3, 1, 2) == make_diagram(3, [[R(1)], [L(1), L(2), R(2)], [L(3), R(3)]])
    for n in (2, 3, 4):
        for a, b in itertools.permutations(range(1, n + 1), 2):
            assert propagating_count(mu(n, a, b)) == n - 1
    with pytest.raises(BadIndex):
        mu(2, 1, 1)


def test_nu_colouring():
    assert nu(2, 1, 2, E, C2) == make_diagram(2, [[L(1), L(2), R(1), R(2)]], group=C2)
    v = nu(2, 1, 2, T, C2)
    # γ(a,b) = γ(ā,b̄) = h so that ν fixes L_{a,b,h} under right multiplication
    assert gamma(v, L(1), L(2), C2) == T
    assert gamma(v, R(1), R(2), C2) == T
    assert gamma(v, L(1), R(1), C2) == E
    S3 = symmetric(3)
    for h in range(6):
        w = nu(3, 1, 3, h, S3)
        assert gamma(w, L(1), L(3), S3) == h and gamma(w, R(1), R(3), S3) == h
    with pytest.raises(BadIndex):
        nu(2, 2, 1, T, C2)


def test_include():
    assert include(identity_diagram(2)) == identity_diagram(3)
    assert include(mu(2, 1, 2)) == mu(3, 1, 2)
    for d in enumerate_diagrams(2, C2):
        assert is_permutation(include(d, C2)) == is_permutation(d)


def test_json_roundtrip_and_validation():
    for d in enumerate_diagrams(2, C2):
        assert diagram_from_json(diagram_to_json(d, C2), C2) == d
    bad = diagram_to_json(nu(2, 1, 2, T, C2), C2)
    bad["blocks"][0]["colours"][0] = "t"
    with pytest.raises(UsageError):
        diagram_from_json(bad, C2)


DS = list(enumerate_diagrams(2, C2))
diag_index = st.integers(0, len(DS) - 1)


@given(diag_index, diag_index, diag_index)
@settings(max_examples=200, deadline=None)
def test_compose_properties(i, j, k):
    a, b, c = DS[i], DS[j], DS[k]
    ab = compose(a, b, C2)
    if ab.result is not None:
        assert canonical(ab.result, C2) == ab.result
        assert gamma_axioms_hold(ab.result, C2)
        assert propagating_count(ab.result) <= min(propagating_count(a), propagating_count(b))
        if is_permutation(a) and is_permutation(b):
            assert is_permutation(ab.result) and ab.internal_components == 0
    # associativity including internal-component counts and zeroing
    bc = compose(b, c, C2)
    left = None if ab.result is None else compose(ab.result, c, C2)
    right = None if bc.result is None else compose(a, bc.result, C2)
    lv = None if left is None or left.result is None else (left.result, left.internal_components + ab.internal_components)
    rv = None if right is None or right.result is None else (right.result, right.internal_components + bc.internal_components)
    assert lv == rv
