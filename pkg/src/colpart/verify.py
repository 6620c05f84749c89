"""Verification suites run by ``colpart verify``.

Each suite returns a report dict with a ``checks`` list; a check passes when its
``failures`` list is empty. Randomness comes from ``random.Random(seed)``.
"""

from __future__ import annotations

import itertools
import random

from .algebra import (
    AlgebraContext,
    augmentation,
    ideal_basis,
    multiply,
    permutation_basis,
    quotient_image,
    quotient_map,
)
from .cover import (
    CoverSpec,
    all_triples,
    count_specs,
    cover_ideals,
    cover_union_check,
    enumerate_specs,
    intersection_basis,
    is_zero_by_criterion,
    l_ideal_basis,
    verify_cover,
    verify_retraction_mu,
    verify_retraction_nu,
)
from .diagrams import propagating_count
from .errors import SizeLimit, UsageError

SAMPLES = 1000
EXHAUSTIVE_PAIRS = 10**5
MAX_WITNESSES = 20

SUITES = ("algebra", "lemmas", "cover")


def _check(name: str, checked: int, failures: list, **extra) -> dict:
    return {"name": name, "checked": checked, "failures": failures[:MAX_WITNESSES], "failure_count": len(failures), **extra}


def _pairs(rng: random.Random, left: list[int], right: list[int]) -> tuple[list[tuple[int, int]], bool]:
    if len(left) * len(right) <= EXHAUSTIVE_PAIRS:
        return list(itertools.product(left, right)), True
    return [(rng.choice(left), rng.choice(right)) for _ in range(SAMPLES)], False


# ---------------------------------------------------------------- algebra


def check_associativity(ctx: AlgebraContext, rng: random.Random, samples: int = SAMPLES) -> dict:
    failures = []
    N = ctx.dim
    for _ in range(samples):
        a, b, c = (ctx.basis(rng.randrange(N)) for _ in range(3))
        if multiply(ctx, multiply(ctx, a, b), c) != multiply(ctx, a, multiply(ctx, b, c)):
            failures.append({"triple": [str(ctx.diagrams[x.support()[0]]) for x in (a, b, c)]})
    return _check("associativity", samples, failures)


def check_unit(ctx: AlgebraContext) -> dict:
    one = ctx.one
    failures = []
    for k in range(ctx.dim):
        d = ctx.basis(k)
        if multiply(ctx, one, d) != d or multiply(ctx, d, one) != d:
            failures.append({"diagram": str(ctx.diagrams[k])})
    return _check("unit", ctx.dim, failures)


def check_augmentation(ctx: AlgebraContext, rng: random.Random, samples: int = SAMPLES) -> dict:
    ring = ctx.ring
    failures = []
    N = ctx.dim
    for _ in range(samples):
        x, y = ctx.basis(rng.randrange(N)), ctx.basis(rng.randrange(N))
        if augmentation(ctx, multiply(ctx, x, y)) != ring.mul(augmentation(ctx, x), augmentation(ctx, y)):
            failures.append({"pair": [str(ctx.diagrams[u.support()[0]]) for u in (x, y)]})
    return _check("augmentation-multiplicative", samples, failures)


def check_two_sided_ideal(ctx: AlgebraContext, rng: random.Random) -> dict:
    """x·d and d·x stay in span(non-permutation diagrams) for ideal basis d."""
    ideal = ideal_basis(ctx)
    failures = []
    pairs, exhaustive = _pairs(rng, list(range(ctx.dim)), ideal)
    for x, d in pairs:
        for k, l in ((x, d), (d, x)):
            out = ctx.compose_indices(k, l)
            if out is not None and ctx.is_perm[out[0]]:
                failures.append({"left": str(ctx.diagrams[k]), "right": str(ctx.diagrams[l])})
    return _check("two-sided-ideal", len(pairs), failures, exhaustive=exhaustive)


def check_quotient(ctx: AlgebraContext) -> dict:
    """Pₙ(δ,G)/I_{n-1} ≅ k[G≀Sₙ]: bijection on permutation diagrams and matching products,
    with no δ factor in any product of two permutation diagrams."""
    perms = permutation_basis(ctx)
    failures = []
    images = [quotient_map(ctx, ctx.diagrams[k]) for k in perms]
    if sorted(images) != list(range(ctx.wreath.order)):
        failures.append({"kind": "not-a-bijection"})
    image = dict(zip(perms, images))
    W = ctx.wreath
    for a, b in itertools.product(perms, perms):
        out = ctx.compose_indices(a, b)
        if out is None or out[1] != 0 or not ctx.is_perm[out[0]]:
            failures.append({"kind": "not-a-permutation-product", "pair": [str(ctx.diagrams[a]), str(ctx.diagrams[b])]})
            continue
        if image[out[0]] != W.mul[image[a]][image[b]]:
            failures.append({"kind": "structure-constant", "pair": [str(ctx.diagrams[a]), str(ctx.diagrams[b])]})
    # the quotient kills the ideal
    for k in ideal_basis(ctx)[:50]:
        if quotient_image(ctx, ctx.basis(k)).terms:
            failures.append({"kind": "ideal-survives", "diagram": str(ctx.diagrams[k])})
    return _check("quotient-isomorphism", len(perms) ** 2, failures, exhaustive=True)


def run_algebra_suite(ctx: AlgebraContext, seed: int = 0) -> dict:
    rng = random.Random(seed)
    checks = [
        check_unit(ctx),
        check_associativity(ctx, rng),
        check_augmentation(ctx, rng),
        check_two_sided_ideal(ctx, rng),
        check_quotient(ctx),
    ]
    return {"suite": "algebra", "checks": checks, "pass": all(not c["failures"] for c in checks)}


# ---------------------------------------------------------------- lemmas


def check_zero_criterion(ctx: AlgebraContext, specs: list[CoverSpec]) -> dict:
    G = ctx.group
    failures = []
    for spec in specs:
        predicted = is_zero_by_criterion(spec, G)
        actual = not intersection_basis(ctx, spec)
        if predicted != actual:
            failures.append({"spec": spec.to_json(G), "criterion": predicted, "empty": actual})
    return _check("zero-criterion", len(specs), failures)


def check_retractions(ctx: AlgebraContext, specs: list[CoverSpec]) -> dict:
    """Every μ(a,b) and ν(a,b,h) retraction that applies to every spec (all admissible b)."""
    n, G = ctx.n, ctx.group
    triples = all_triples(n, G)
    failures = []
    checked = vacuous = 0
    for spec in specs:
        if not intersection_basis(ctx, spec):
            continue
        reports = []
        for a, b in itertools.permutations(range(1, n + 1), 2):
            if a not in spec.S and b not in spec.S:
                reports.append(verify_retraction_mu(ctx, spec, a, b))
        for (a, b), h in triples:
            if ((a, b), h) not in spec.T:
                reports.append(verify_retraction_nu(ctx, spec, a, b, h))
        for rep in reports:
            checked += 1
            vacuous += rep["vacuous"]
            for f in rep["failures"]:
                failures.append({"spec": spec.to_json(G), "factor": rep["factor"], **f})
    return _check("retractions", checked, failures, vacuous=vacuous)


def check_cover_family(ctx: AlgebraContext) -> dict:
    """K/L union is I_{n-1}; L ideals of one pair with different colours are disjoint;
    every K/L basis diagram has at most n−1 propagating blocks."""
    n, G = ctx.n, ctx.group
    failures = []
    if not cover_union_check(ctx):
        failures.append({"kind": "cover-union"})
    for i, j in itertools.combinations(range(1, n + 1), 2):
        for g, h in itertools.combinations(range(G.order), 2):
            if set(l_ideal_basis(ctx, i, j, g)) & set(l_ideal_basis(ctx, i, j, h)):
                failures.append({"kind": "colours-overlap", "pair": [i, j], "colours": [G.names[g], G.names[h]]})
    ideals = cover_ideals(ctx)
    for spec in ideals:
        for k in intersection_basis(ctx, spec):
            if propagating_count(ctx.diagrams[k]) > n - 1:
                failures.append({"kind": "propagating", "spec": spec.to_json(G), "diagram": str(ctx.diagrams[k])})
    return _check("cover-family", len(ideals), failures)


def run_lemmas_suite(ctx: AlgebraContext, *, spec_limit: int = 10**5) -> dict:
    """Exhaustive over every CoverSpec (any size)."""
    total = count_specs(ctx.n, ctx.group.order)
    if total > spec_limit:
        raise SizeLimit(f"{total} cover specs exceed the exhaustive limit {spec_limit}")
    specs = list(enumerate_specs(ctx.n, ctx.group))
    checks = [check_cover_family(ctx), check_zero_criterion(ctx, specs), check_retractions(ctx, specs)]
    return {"suite": "lemmas", "checks": checks, "pass": all(not c["failures"] for c in checks)}


# ---------------------------------------------------------------- cover


def run_cover_suite(ctx: AlgebraContext, height: int | None = None, seed: int = 0) -> dict:
    if height is None:
        height = max(ctx.n - 1, 0)
    rep = verify_cover(ctx, height, seed=seed)
    failures = rep.pop("failures")
    check = _check("idempotent-cover", rep["checked"], failures, **{k: v for k, v in rep.items() if k != "checked"})
    return {"suite": "cover", "checks": [check], "pass": not failures}


def run_suite(name: str, ctx: AlgebraContext, *, seed: int = 0, height: int | None = None) -> dict:
    if name == "algebra":
        return run_algebra_suite(ctx, seed)
    if name == "lemmas":
        return run_lemmas_suite(ctx)
    if name == "cover":
        return run_cover_suite(ctx, height, seed)
    raise UsageError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
