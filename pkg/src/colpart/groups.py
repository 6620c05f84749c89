"""Finite groups presented by multiplication tables."""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import NotAGroup, SizeLimit, UsageError

EXHAUSTIVE_ASSOCIATIVITY_LIMIT = 64
SAMPLED_TRIPLES = 10_000
WREATH_ORDER_CAP = 10_000


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its Cayley table.

    Elements are the integers ``0..order-1``; ``mul[a][b]`` is the index of ``a*b``.
    Build instances with :func:`group_from_table` (or the constructors below),
    which locate the identity and inverses and check the axioms.
    """

    order: int
    mul: tuple[tuple[int, ...], ...]
    identity: int
    inverse: tuple[int, ...]
    names: tuple[str, ...]

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order}, names={list(self.names)!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self.mul == other.mul and self.names == other.names

    def __hash__(self) -> int:
        return hash((self.order, self.mul))

    def m(self, a: int, b: int) -> int:
        return self.mul[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no group element named {name!r}") from None

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul[x][a]
            k += 1
        return k

    def is_abelian(self) -> bool:
        return all(self.mul[a][b] == self.mul[b][a] for a in range(self.order) for b in range(a))


def group_from_table(
    table: Sequence[Sequence[int]],
    names: Sequence[str] | None = None,
    *,
    full_check: bool = False,
    seed: int = 0,
) -> FiniteGroup:
    """Validate a Cayley table and wrap it as a :class:`FiniteGroup`.

    Associativity is checked on all triples up to order 64 (or always, with
    ``full_check``); above that on ``SAMPLED_TRIPLES`` seeded random triples.
    Raises :class:`NotAGroup` with a witness on any failure.
    """
    m = len(table)
    if m == 0:
        raise NotAGroup("empty table")
    mul = tuple(tuple(int(x) for x in row) for row in table)
    for r, row in enumerate(mul):
        if len(row) != m:
            raise NotAGroup(f"table is not square: row {r} has length {len(row)}, expected {m}")
        for x in row:
            if not 0 <= x < m:
                raise NotAGroup(f"entry {x} in row {r} out of range")
    if names is None:
        names = [str(i) for i in range(m)]
    names = tuple(str(s) for s in names)
    if len(names) != m:
        raise NotAGroup(f"{len(names)} names for {m} elements")
    if len(set(names)) != m:
        raise NotAGroup("element names are not pairwise distinct")

    identity = next(
        (e for e in range(m) if all(mul[e][a] == a == mul[a][e] for a in range(m))), None
    )
    if identity is None:
        raise NotAGroup("no two-sided identity element")
    inverse = []
    for a in range(m):
        b = mul[a].index(identity) if identity in mul[a] else None
        if b is None or mul[b][a] != identity:
            raise NotAGroup(f"element {names[a]!r} has no two-sided inverse", witness=(a,))
        inverse.append(b)

    if full_check or m <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT:
        triples = itertools.product(range(m), repeat=3)
    else:
        rng = random.Random(seed)
        triples = ((rng.randrange(m), rng.randrange(m), rng.randrange(m)) for _ in range(SAMPLED_TRIPLES))
    for a, b, c in triples:
        if mul[mul[a][b]][c] != mul[a][mul[b][c]]:
            raise NotAGroup(
                f"not associative at ({names[a]}, {names[b]}, {names[c]})", witness=(a, b, c)
            )
    return FiniteGroup(order=m, mul=mul, identity=identity, inverse=tuple(inverse), names=names)


def trivial() -> FiniteGroup:
    return group_from_table([[0]], ["e"])


def cyclic(m: int) -> FiniteGroup:
    if m < 1:
        raise UsageError("cyclic group order must be positive")
    if m == 1:
        return trivial()
    if m == 2:
        names = ["e", "t"]
    else:
        names = ["e"] + [f"g{i}" for i in range(1, m)]
    return group_from_table([[(a + b) % m for b in range(m)] for a in range(m)], names)


def _compose_perm(s: tuple[int, ...], t: tuple[int, ...]) -> tuple[int, ...]:
    # (s∘t)(i) = s(t(i))
    return tuple(s[t[i]] for i in range(len(t)))


def symmetric(m: int) -> FiniteGroup:
    """Σ_m on one-line permutations (0-based) in lexicographic order; product is composition."""
    if m < 1:
        raise UsageError("symmetric group degree must be positive")
    if m > 6:
        raise SizeLimit(f"symmetric({m}) has order {math.factorial(m)} > 720")
    perms = list(itertools.permutations(range(m)))
    where = {p: i for i, p in enumerate(perms)}
    table = [[where[_compose_perm(s, t)] for t in perms] for s in perms]
    names = ["".join(str(x + 1) for x in p) for p in perms]
    if m == 1:
        names = ["e"]
    return group_from_table(table, names)


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    pairs = [(a, b) for a in range(g.order) for b in range(h.order)]
    where = {p: i for i, p in enumerate(pairs)}
    table = [[where[(g.mul[a][c], h.mul[b][d])] for (c, d) in pairs] for (a, b) in pairs]
    names = [f"({g.names[a]},{h.names[b]})" for a, b in pairs]
    return group_from_table(table, names)


@dataclass(frozen=True)
class WreathElement:
    labels: tuple[int, ...]
    perm: tuple[int, ...]  # 0-based one-line notation: i ↦ perm[i]


def wreath_multiply(g: FiniteGroup, x: WreathElement, y: WreathElement) -> WreathElement:
    """(g; σ)·(h; τ) = (g · σ(h), σ∘τ) where σ(h)_i = h_{σ⁻¹(i)}."""
    n = len(x.perm)
    sigma_inv = [0] * n
    for i, s in enumerate(x.perm):
        sigma_inv[s] = i
    labels = tuple(g.mul[x.labels[i]][y.labels[sigma_inv[i]]] for i in range(n))
    return WreathElement(labels, _compose_perm(x.perm, y.perm))


def wreath_elements(g: FiniteGroup, n: int) -> list[WreathElement]:
    """Elements of G≀Σₙ ordered by permutation (lexicographic), then label tuple."""
    return [
        WreathElement(labels, perm)
        for perm in itertools.permutations(range(n))
        for labels in itertools.product(range(g.order), repeat=n)
    ]


def wreath_product(g: FiniteGroup, n: int, *, cap: int = WREATH_ORDER_CAP) -> FiniteGroup:
    if n < 1:
        raise UsageError("wreath product needs n >= 1")
    order = g.order**n * math.factorial(n)
    if order > cap:
        raise SizeLimit(f"|G≀Σ{n}| = {order} exceeds cap {cap}")
    elems = wreath_elements(g, n)
    where = {x: i for i, x in enumerate(elems)}
    table = [[where[wreath_multiply(g, x, y)] for y in elems] for x in elems]
    names = [
        "(" + ",".join(g.names[a] for a in x.labels) + ";" + "".join(str(p + 1) for p in x.perm) + ")"
        for x in elems
    ]
    return group_from_table(table, names)


def abelianization_invariants(g: FiniteGroup) -> list[int]:
    """Invariant factors (>1, each dividing the next) of G/[G,G], straight from the table."""
    comms = {
        g.mul[g.mul[g.inverse[a]][g.inverse[b]]][g.mul[a][b]]
        for a in range(g.order)
        for b in range(g.order)
    }
    sub = {g.identity}
    frontier = [g.identity]
    while frontier:
        x = frontier.pop()
        for c in comms:
            y = g.mul[x][c]
            if y not in sub:
                sub.add(y)
                frontier.append(y)
    coset_of = [-1] * g.order
    reps: list[int] = []
    for a in range(g.order):
        if coset_of[a] < 0:
            for s in sub:
                coset_of[g.mul[a][s]] = len(reps)
            reps.append(a)
    k = len(reps)
    table = [[coset_of[g.mul[reps[i]][reps[j]]] for j in range(k)] for i in range(k)]
    ident = coset_of[g.identity]

    def power(i: int, e: int) -> int:
        x = ident
        for _ in range(e):
            x = table[x][i]
        return x

    # #{x : x^(p^j) = 1} = p^(sum_i min(e_i, j)) for the p-primary cyclic factors p^(e_i)
    factors: list[int] = []
    for p in _prime_factors(k):
        logs = [0]
        while logs[-1] < _valuation(k, p):
            j = len(logs)
            killed = sum(1 for i in range(k) if power(i, p**j) == ident)
            logs.append(round(math.log(killed, p)))
        at_least = [logs[j] - logs[j - 1] for j in range(1, len(logs))] + [0]
        exps = []
        for j in range(len(at_least) - 1):
            exps += [j + 1] * (at_least[j] - at_least[j + 1])
        exps.sort(reverse=True)
        # merge into invariant factors: largest p-powers go to the largest factors
        while len(factors) < len(exps):
            factors.insert(0, 1)
        for i, e in enumerate(exps):
            factors[len(factors) - 1 - i] *= p**e
    return [f for f in factors if f > 1]


def _prime_factors(k: int) -> list[int]:
    out, d = [], 2
    while d * d <= k:
        if k % d == 0:
            out.append(d)
            while k % d == 0:
                k //= d
        d += 1
    if k > 1:
        out.append(k)
    return out


def _valuation(k: int, p: int) -> int:
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return v


def parse_group(spec: str) -> FiniteGroup:
    """Parse a group spec: ``trivial``, ``C:m``, ``S:m``, ``prod:A,B`` or ``table:FILE.json``."""
    spec = spec.strip()
    if spec == "trivial":
        return trivial()
    kind, _, rest = spec.partition(":")
    try:
        if kind == "C":
            return cyclic(int(rest))
        if kind == "S":
            return symmetric(int(rest))
    except ValueError:
        raise UsageError(f"bad group spec {spec!r}") from None
    if kind == "prod":
        left, right = _split_top_level(rest)
        return direct_product(parse_group(left), parse_group(right))
    if kind == "table":
        data = json.loads(Path(rest).read_text())
        return group_from_table(data["table"], data["names"])
    raise UsageError(f"bad group spec {spec!r}")


def _split_top_level(s: str) -> tuple[str, str]:
    # "prod:prod:C:2,C:2,C:3" splits at the comma that closes the left operand
    for i, ch in enumerate(s):
        if ch == ",":
            left = s[:i]
            try:
                _check_complete(left)
            except UsageError:
                continue
            return left, s[i + 1 :]
    raise UsageError(f"prod spec needs two operands: {s!r}")


def _check_complete(s: str) -> None:
    if s.startswith("prod:"):
        _split_top_level(s[5:])
    elif not (s == "trivial" or s.startswith(("C:", "S:", "table:"))):
        raise UsageError(s)
