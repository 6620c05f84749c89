"""The left ideals K_i and L_{i,j,g} covering I_{n-1}, their intersections and
idempotent generators, and the retraction checks for μ and ν.

Each K/L ideal is free on a subset of the diagram basis, so every ideal
here is handled as a sorted list of basis indices.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Iterator

from .algebra import AlgebraContext, AlgebraElement, ideal_basis, multiply
from .diagrams import ColouredDiagram, gamma_codes, mu, nu, propagating_count
from .errors import BadIndex, FullS, UsageError, VerificationFailed, ZeroIdeal
from .groups import FiniteGroup

EXHAUSTIVE_SPEC_LIMIT = 10**6
SAMPLED_SPECS = 10**4

Triple = tuple[tuple[int, int], int]


@dataclass(frozen=True)
class CoverSpec:
    """Indexes J = ⋂_{i∈S} K_i ∩ ⋂_{((i,j),g)∈T} L_{i,j,g}; the empty spec is the whole algebra."""

    S: frozenset[int] = frozenset()
    T: frozenset[Triple] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "S", frozenset(self.S))
        object.__setattr__(self, "T", frozenset(((int(i), int(j)), int(g)) for (i, j), g in self.T))
        for (i, j), _ in self.T:
            if not i < j:
                raise UsageError(f"cover triple needs i < j, got ({i},{j})")

    @property
    def size(self) -> int:
        return len(self.S) + len(self.T)

    def sorted_T(self) -> list[Triple]:
        return sorted(self.T)

    def to_json(self, group: FiniteGroup) -> dict:
        return {
            "S": sorted(self.S),
            "T": [[[i, j], group.names[g]] for (i, j), g in self.sorted_T()],
        }

    @classmethod
    def from_json(cls, data: dict, group: FiniteGroup) -> "CoverSpec":
        return cls(
            frozenset(int(i) for i in data.get("S", [])),
            frozenset(((int(i), int(j)), group.index(g)) for (i, j), g in data.get("T", [])),
        )


class _Membership:
    """Per-diagram K/L memberships, computed once per context."""

    def __init__(self, ctx: AlgebraContext):
        n, G = ctx.n, ctx.group
        self.isolated: list[frozenset[int]] = []
        self.pairs: list[dict[tuple[int, int], int]] = []
        for d in ctx.diagrams:
            iso = set()
            pairs = {}
            for b in d.blocks:
                right = [x - n + 1 for x in b if x >= n]
                if len(b) == 1 and right:
                    iso.add(right[0])
                for i, j in itertools.combinations(right, 2):
                    pairs[(i, j)] = gamma_codes(d, n + i - 1, n + j - 1, G)
            self.isolated.append(frozenset(iso))
            self.pairs.append(pairs)

    def member(self, k: int, spec: CoverSpec) -> bool:
        if not spec.S <= self.isolated[k]:
            return False
        pairs = self.pairs[k]
        return all(pairs.get(ij) == g for ij, g in spec.T)


def _membership(ctx: AlgebraContext) -> _Membership:
    m = getattr(ctx, "_cover_membership", None)
    if m is None:
        m = _Membership(ctx)
        ctx._cover_membership = m
    return m


def k_ideal_basis(ctx: AlgebraContext, i: int) -> list[int]:
    """Diagrams in which right node i is isolated."""
    if not 1 <= i <= ctx.n:
        raise BadIndex(f"K_{i} needs 1 <= i <= {ctx.n}")
    return intersection_basis(ctx, CoverSpec(S={i}))


def l_ideal_basis(ctx: AlgebraContext, i: int, j: int, g: int) -> list[int]:
    """Diagrams with right nodes i, j in one block and γ(i', j') = g."""
    if not (1 <= i < j <= ctx.n) or not 0 <= g < ctx.group.order:
        raise BadIndex(f"L_({i},{j},{g}) out of range")
    return intersection_basis(ctx, CoverSpec(T={((i, j), g)}))


def intersection_basis(ctx: AlgebraContext, spec: CoverSpec) -> list[int]:
    m = _membership(ctx)
    return [k for k in range(ctx.dim) if m.member(k, spec)]


def cover_ideals(ctx: AlgebraContext) -> list[CoverSpec]:
    """The singleton specs naming K_1..K_n and every L_{i,j,g}."""
    n = ctx.n
    out = [CoverSpec(S={i}) for i in range(1, n + 1)]
    out += [
        CoverSpec(T={((i, j), g)})
        for i, j in itertools.combinations(range(1, n + 1), 2)
        for g in range(ctx.group.order)
    ]
    return out


def cover_union_check(ctx: AlgebraContext) -> bool:
    ideal = set(ideal_basis(ctx))
    union: set[int] = set()
    for spec in cover_ideals(ctx):
        basis = set(intersection_basis(ctx, spec))
        if not basis <= ideal:
            return False
        union |= basis
    return union == ideal


def is_zero_by_criterion(spec: CoverSpec, group: FiniteGroup) -> bool:
    """The three vanishing conditions for an intersection of cover ideals."""
    S, T = spec.S, spec.T
    if any(i in S or j in S for (i, j), _ in T):
        return True
    colour: dict[tuple[int, int], int] = {}
    for ij, g in T:
        if colour.setdefault(ij, g) != g:
            return True
    for ((i, j), f), ((j2, k), g) in itertools.product(T, T):
        if j2 == j:
            for h in (h for (ik, h) in T if ik == (i, k)):
                if h != group.mul[f][g]:
                    return True
    return False


def all_triples(n: int, group: FiniteGroup) -> list[Triple]:
    return [((i, j), g) for i, j in itertools.combinations(range(1, n + 1), 2) for g in range(group.order)]


def count_specs(n: int, order: int, max_size: int | None = None) -> int:
    t = math.comb(n, 2) * order
    if max_size is None:
        return 2 ** (n + t)
    return sum(math.comb(n, s) * math.comb(t, r) for s in range(n + 1) for r in range(t + 1) if s + r <= max_size)


def enumerate_specs(n: int, group: FiniteGroup, max_size: int | None = None) -> Iterator[CoverSpec]:
    """All specs, ordered by size, then S, then T (lexicographic)."""
    triples = all_triples(n, group)
    top = n + len(triples) if max_size is None else max_size
    for size in range(top + 1):
        for s in range(min(size, n) + 1):
            r = size - s
            if r > len(triples):
                continue
            for S in itertools.combinations(range(1, n + 1), s):
                for T in itertools.combinations(triples, r):
                    yield CoverSpec(frozenset(S), frozenset(T))


def sample_specs(n: int, group: FiniteGroup, max_size: int, count: int, seed: int) -> list[CoverSpec]:
    rng = random.Random(seed)
    triples = all_triples(n, group)
    out = []
    for _ in range(count):
        size = rng.randint(0, max_size)
        s = rng.randint(max(0, size - len(triples)), min(size, n))
        S = rng.sample(range(1, n + 1), s)
        T = rng.sample(triples, size - s)
        out.append(CoverSpec(frozenset(S), frozenset(T)))
    return out


# ---------------------------------------------------------------- generators


def generator_factors(ctx: AlgebraContext, spec: CoverSpec) -> list[tuple[str, tuple, ColouredDiagram]]:
    """The μ factors (S ascending) then ν factors (T sorted) whose product is the generator."""
    n, G = ctx.n, ctx.group
    rest = sorted(set(range(1, n + 1)) - spec.S)
    if spec.S and not rest:
        raise FullS(f"S = {{1..{n}}} has no idempotent generator")
    factors = []
    for a in sorted(spec.S):
        b = rest[0]
        factors.append(("mu", (a, b), mu(n, a, b, G)))
    for (a, b), h in spec.sorted_T():
        factors.append(("nu", (a, b, h), nu(n, a, b, h, G)))
    return factors


def idempotent_generator(ctx: AlgebraContext, spec: CoverSpec, *, verify: bool = True) -> AlgebraElement:
    """An idempotent e with Pₙ(δ,G)·e = J, for J the intersection named by ``spec``."""
    if spec.S and spec.S >= set(range(1, ctx.n + 1)):
        raise FullS(f"S = {{1..{ctx.n}}} has no idempotent generator")
    basis = intersection_basis(ctx, spec)
    if not basis:
        raise ZeroIdeal(f"intersection for {spec} is zero")
    e = ctx.one
    for _, _, d in generator_factors(ctx, spec):
        e = multiply(ctx, e, ctx.of(d))
    if verify:
        failure = check_generator(ctx, spec, e, basis)
        if failure is not None:
            raise VerificationFailed(failure["kind"], failure)
    return e


def check_generator(
    ctx: AlgebraContext, spec: CoverSpec, e: AlgebraElement, basis: list[int] | None = None
) -> dict | None:
    """None if e² = e, d·e = d for every basis d of J, and supp(e) ⊆ J; else a witness."""
    if basis is None:
        basis = intersection_basis(ctx, spec)
    members = set(basis)
    if multiply(ctx, e, e) != e:
        return {"kind": "not-idempotent"}
    outside = [k for k in e.support() if k not in members]
    if outside:
        return {"kind": "generator-outside-ideal", "diagram": str(ctx.diagrams[outside[0]])}
    for k in basis:
        d = ctx.basis(k)
        if multiply(ctx, d, e) != d:
            return {"kind": "not-right-identity", "diagram": str(ctx.diagrams[k])}
    return None


# ---------------------------------------------------------------- retractions


def _retraction_report(ctx: AlgebraContext, spec: CoverSpec, target: CoverSpec, factor: ColouredDiagram, label: dict) -> dict:
    J = intersection_basis(ctx, spec)
    TJ = intersection_basis(ctx, target)
    report = {"factor": label, "checked": 0, "vacuous": not TJ, "failures": []}
    if not TJ:
        return report
    fidx = ctx.index[factor]
    members = set(TJ)
    for k in J:
        report["checked"] += 1
        out = ctx.compose_indices(k, fidx)
        if out is not None and out[0] not in members:
            report["failures"].append({"kind": "image-outside", "diagram": str(ctx.diagrams[k])})
    for k in TJ:
        out = ctx.compose_indices(k, fidx)
        if out != (k, 0):
            report["failures"].append(
                {
                    "kind": "not-fixed",
                    "diagram": str(ctx.diagrams[k]),
                    "result": None if out is None else [str(ctx.diagrams[out[0]]), out[1]],
                }
            )
    return report


def verify_retraction_mu(ctx: AlgebraContext, spec: CoverSpec, a: int, b: int) -> dict:
    """J·μ ⊆ span(K_a ∩ J), and d·μ = d with no δ factor for d ∈ K_a ∩ J (vacuous if that is 0)."""
    if a in spec.S or b in spec.S or a == b:
        raise UsageError("mu retraction needs a, b outside S and a != b")
    target = CoverSpec(spec.S | {a}, spec.T)
    return _retraction_report(ctx, spec, target, mu(ctx.n, a, b, ctx.group), {"mu": [a, b]})


def verify_retraction_nu(ctx: AlgebraContext, spec: CoverSpec, a: int, b: int, h: int) -> dict:
    """As :func:`verify_retraction_mu`, for ν and L_{a,b,h} ∩ J."""
    if ((a, b), h) in spec.T:
        raise UsageError("nu retraction needs ((a,b),h) outside T")
    target = CoverSpec(spec.S, spec.T | {((a, b), h)})
    return _retraction_report(ctx, spec, target, nu(ctx.n, a, b, h, ctx.group), {"nu": [a, b, ctx.group.names[h]]})


def verify_spec(ctx: AlgebraContext, spec: CoverSpec, rng: random.Random, samples: int = 8) -> list[dict]:
    """Zero-criterion equivalence, and for nonzero J the generator and every retraction step."""
    G = ctx.group
    failures = []
    spec_json = spec.to_json(G)
    basis = intersection_basis(ctx, spec)
    predicted_zero = is_zero_by_criterion(spec, G)
    if predicted_zero != (not basis):
        failures.append({"spec": spec_json, "kind": "zero-criterion", "witness": {"criterion": predicted_zero, "basis_size": len(basis)}})
        return failures
    if not basis or (spec.S and spec.S >= set(range(1, ctx.n + 1))):
        return failures

    # each retraction step of the μ/ν chain, on the partial intersection built so far
    partial = CoverSpec()
    for kind, args, _ in generator_factors(ctx, spec):
        if kind == "mu":
            rep = verify_retraction_mu(ctx, partial, *args)
            partial = CoverSpec(partial.S | {args[0]}, partial.T)
        else:
            a, b, h = args
            rep = verify_retraction_nu(ctx, partial, a, b, h)
            partial = CoverSpec(partial.S, partial.T | {((a, b), h)})
        for f in rep["failures"]:
            failures.append({"spec": spec_json, "kind": "retraction-" + f["kind"], "witness": {**f, "factor": rep["factor"]}})

    e = idempotent_generator(ctx, spec, verify=False)
    bad = check_generator(ctx, spec, e, basis)
    if bad is not None:
        failures.append({"spec": spec_json, "kind": bad["kind"], "witness": bad})
        return failures
    members = set(basis)
    for _ in range(samples):
        x = ctx.basis(rng.randrange(ctx.dim))
        xe = multiply(ctx, x, e)
        if not set(xe.support()) <= members:
            failures.append({"spec": spec_json, "kind": "left-multiple-outside", "witness": {"x": str(ctx.diagrams[x.support()[0]])}})
    return failures


def verify_cover(ctx: AlgebraContext, height: int, *, seed: int = 0) -> dict:
    """Check the K/L family is an idempotent left cover of I_{n-1} of the given height."""
    n, G = ctx.n, ctx.group
    if not 0 <= height <= max(n - 1, 0):
        raise UsageError(f"height must lie in 0..{n - 1}")
    failures: list[dict] = []
    if not cover_union_check(ctx):
        failures.append({"spec": None, "kind": "cover-union", "witness": {}})
    for spec in cover_ideals(ctx):
        for k in intersection_basis(ctx, spec):
            if propagating_count(ctx.diagrams[k]) > n - 1:
                failures.append({"spec": spec.to_json(G), "kind": "propagating", "witness": {"diagram": str(ctx.diagrams[k])}})

    total = count_specs(n, G.order, height)
    exhaustive = total <= EXHAUSTIVE_SPEC_LIMIT
    specs = enumerate_specs(n, G, height) if exhaustive else sample_specs(n, G, height, SAMPLED_SPECS, seed)
    rng = random.Random(seed)
    checked = nonzero = 0
    for spec in specs:
        checked += 1
        if intersection_basis(ctx, spec):
            nonzero += 1
        failures.extend(verify_spec(ctx, spec, rng))
    return {
        "checked": checked,
        "nonzero": nonzero,
        "width": len(cover_ideals(ctx)),
        "height": height,
        "failures": failures,
        "exhaustive": exhaustive,
        "seed": seed,
    }
