"""The coloured partition algebras Pₙ(δ,G) and the group algebras k[H].

Diagrams are interned per :class:`AlgebraContext`: basis indices are their
positions in the deterministic enumeration order of
:func:`~colpart.diagrams.enumerate_diagrams`.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .diagrams import (
    DIAGRAM_COUNT_CAP,
    ColouredDiagram,
    compose,
    diagram_from_json,
    diagram_to_json,
    enumerate_diagrams,
    identity_diagram,
    include,
    is_permutation,
)
from .errors import ContextMismatch, NotAPermutationDiagram, UsageError
from .groups import FiniteGroup, WreathElement, wreath_elements, wreath_multiply, wreath_product
from .rings import Ring, Scalar


class AlgebraContext:
    """Pₙ(δ,G) over a coefficient ring, with an interned diagram basis."""

    def __init__(self, n: int, group: FiniteGroup, delta: Scalar | str, ring: Ring, *, cap: int = DIAGRAM_COUNT_CAP):
        if n < 1:
            raise UsageError("n must be positive")
        self.n = n
        self.group = group
        self.ring = ring
        self.delta = ring.parse(delta) if isinstance(delta, str) else ring(delta)
        self.diagrams: list[ColouredDiagram] = list(enumerate_diagrams(n, group, cap=cap))
        self.index: dict[ColouredDiagram, int] = {d: i for i, d in enumerate(self.diagrams)}
        self.is_perm = [is_permutation(d) for d in self.diagrams]
        self.identity_index = self.index[identity_diagram(n, group)]
        self._products: dict[tuple[int, int], tuple[int, int] | None] = {}
        self._lock = threading.Lock()
        self._wreath: FiniteGroup | None = None
        self._wreath_index: dict[WreathElement, int] | None = None

    def __repr__(self) -> str:
        return f"AlgebraContext(n={self.n}, |G|={self.group.order}, delta={self.ring.format(self.delta)}, ring={self.ring})"

    @property
    def dim(self) -> int:
        return len(self.diagrams)

    def same_algebra(self, other: "AlgebraContext") -> bool:
        return (
            self is other
            or (self.n, self.group, self.delta, self.ring) == (other.n, other.group, other.delta, other.ring)
        )

    # -- structure constants

    def compose_indices(self, i: int, j: int) -> tuple[int, int] | None:
        """(index of the composite, number of internal components), or None on colour clash."""
        key = (i, j)
        try:
            return self._products[key]
        except KeyError:
            pass
        out = compose(self.diagrams[i], self.diagrams[j], self.group)
        val = None if out.result is None else (self.index[out.result], out.internal_components)
        with self._lock:
            self._products[key] = val
        return val

    def basis_product(self, i: int, j: int) -> tuple[int, Scalar] | None:
        """d_i·d_j as (index, coefficient), or None when it is zero."""
        out = self.compose_indices(i, j)
        if out is None:
            return None
        k, internal = out
        c = self.ring.power(self.delta, internal)
        if c == 0:
            return None
        return k, c

    def product_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense (target index, internal components) tables; target -1 means colour clash."""
        N = self.dim
        target = np.full((N, N), -1, dtype=np.int64)
        internal = np.zeros((N, N), dtype=np.int64)
        for i in range(N):
            for j in range(N):
                out = self.compose_indices(i, j)
                if out is not None:
                    target[i, j], internal[i, j] = out
        return target, internal

    # -- elements

    def element(self, coeffs: Mapping[int, Scalar] | Iterable[tuple[int, Scalar]]) -> "AlgebraElement":
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[int, Scalar] = {}
        for k, c in items:
            acc[k] = self.ring.add(acc.get(k, self.ring.zero), self.ring(c))
        return AlgebraElement(self, tuple(sorted((k, c) for k, c in acc.items() if c != 0)))

    def basis(self, i: int) -> "AlgebraElement":
        return AlgebraElement(self, ((i, self.ring.one),))

    def of(self, d: ColouredDiagram) -> "AlgebraElement":
        try:
            return self.basis(self.index[d])
        except KeyError:
            raise ContextMismatch(f"diagram {d} is not a basis element of {self}") from None

    @property
    def one(self) -> "AlgebraElement":
        return self.basis(self.identity_index)

    @property
    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, ())

    # -- wreath quotient

    @property
    def wreath(self) -> FiniteGroup:
        if self._wreath is None:
            self._wreath = wreath_product(self.group, self.n)
            self._wreath_index = {x: i for i, x in enumerate(wreath_elements(self.group, self.n))}
        return self._wreath

    def wreath_index(self, x: WreathElement) -> int:
        self.wreath
        return self._wreath_index[x]


@dataclass(frozen=True)
class AlgebraElement:
    ctx: AlgebraContext = field(repr=False, compare=False)
    terms: tuple[tuple[int, Scalar], ...]

    def coeffs(self) -> dict[int, Scalar]:
        return dict(self.terms)

    def support(self) -> list[int]:
        return [k for k, _ in self.terms]

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "AlgebraElement") -> None:
        if not self.ctx.same_algebra(other.ctx):
            raise ContextMismatch(f"{self.ctx} vs {other.ctx}")

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        self._check(other)
        return self.ctx.element(itertools.chain(self.terms, other.terms))

    def __neg__(self) -> "AlgebraElement":
        r = self.ctx.ring
        return AlgebraElement(self.ctx, tuple((k, r.neg(c)) for k, c in self.terms))

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-other)

    def scale(self, s: Scalar) -> "AlgebraElement":
        r = self.ctx.ring
        return self.ctx.element((k, r.mul(r(s), c)) for k, c in self.terms)

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return multiply(self.ctx, self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return self.ctx.same_algebra(other.ctx) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        r = self.ctx.ring
        return " + ".join(f"{r.format(c)}*{self.ctx.diagrams[k]}" for k, c in self.terms)


def multiply(ctx: AlgebraContext, u: AlgebraElement, v: AlgebraElement) -> AlgebraElement:
    """Bilinear extension of d1·d2 = δ^(internal components)·(d1∘d2), or 0 on a colour clash."""
    for w in (u, v):
        if not ctx.same_algebra(w.ctx):
            raise ContextMismatch(f"{w.ctx} is not {ctx}")
    ring = ctx.ring
    acc: dict[int, Scalar] = {}
    for i, a in u.terms:
        for j, b in v.terms:
            out = ctx.basis_product(i, j)
            if out is None:
                continue
            k, c = out
            acc[k] = ring.add(acc.get(k, ring.zero), ring.mul(ring.mul(a, b), c))
    return AlgebraElement(ctx, tuple(sorted((k, c) for k, c in acc.items() if c != 0)))


def augmentation(ctx: AlgebraContext, u: AlgebraElement) -> Scalar:
    ring = ctx.ring
    total = ring.zero
    for k, c in u.terms:
        if ctx.is_perm[k]:
            total = ring.add(total, c)
    return total


def ideal_basis(ctx: AlgebraContext) -> list[int]:
    """Indices of the non-permutation diagrams, which span I_{n-1}."""
    return [i for i, p in enumerate(ctx.is_perm) if not p]


def permutation_basis(ctx: AlgebraContext) -> list[int]:
    return [i for i, p in enumerate(ctx.is_perm) if p]


def include_element(src: AlgebraContext, dst: AlgebraContext, u: AlgebraElement) -> AlgebraElement:
    """Image of u under Pₙ(δ,G) → Pₙ₊₁(δ,G)."""
    if dst.n != src.n + 1 or dst.group != src.group or dst.ring != src.ring or dst.delta != src.delta:
        raise ContextMismatch("include needs contexts n and n+1 over the same G, δ and ring")
    return dst.element((dst.index[include(src.diagrams[k], src.group)], c) for k, c in u.terms)


# ---------------------------------------------------------------- group algebras


@dataclass(frozen=True)
class GroupAlgebraElement:
    group: FiniteGroup = field(repr=False, compare=False)
    ring: Ring = field(compare=False)
    terms: tuple[tuple[int, Scalar], ...]

    def __mul__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        r = self.ring
        acc: dict[int, Scalar] = {}
        for g, a in self.terms:
            row = self.group.mul[g]
            for h, b in other.terms:
                k = row[h]
                acc[k] = r.add(acc.get(k, r.zero), r.mul(a, b))
        return group_element(self.group, self.ring, acc)

    def __add__(self, other: "GroupAlgebraElement") -> "GroupAlgebraElement":
        r = self.ring
        acc = dict(self.terms)
        for k, c in other.terms:
            acc[k] = r.add(acc.get(k, r.zero), c)
        return group_element(self.group, self.ring, acc)


WreathAlgebraElement = GroupAlgebraElement


def group_element(group: FiniteGroup, ring: Ring, coeffs: Mapping[int, Scalar]) -> GroupAlgebraElement:
    return GroupAlgebraElement(group, ring, tuple(sorted((k, ring(c)) for k, c in coeffs.items() if ring(c) != 0)))


def quotient_map(ctx: AlgebraContext, d: ColouredDiagram) -> int:
    """The element of G≀Sₙ (as an index into ``ctx.wreath``) matching a permutation diagram.

    A diagram with blocks {i, π(i)'} and γ(i, π(i)') = λᵢ maps to (λ; π⁻¹); with
    the wreath convention of :mod:`colpart.groups` this makes the quotient
    Pₙ(δ,G)/I_{n-1} → k[G≀Sₙ] multiplicative.
    """
    if not is_permutation(d):
        raise NotAPermutationDiagram(str(d))
    n = d.n
    pi = [0] * n
    labels = [0] * n
    for (x, y), (_, c) in zip(d.blocks, d.colours):
        pi[x] = y - n
        labels[x] = c
    sigma = [0] * n
    for i, j in enumerate(pi):
        sigma[j] = i
    return ctx.wreath_index(WreathElement(tuple(labels), tuple(sigma)))


def quotient_image(ctx: AlgebraContext, u: AlgebraElement) -> GroupAlgebraElement:
    """Push u through Pₙ(δ,G) → Pₙ(δ,G)/I_{n-1} ≅ k[G≀Sₙ]: non-permutation terms vanish."""
    acc = {quotient_map(ctx, ctx.diagrams[k]): c for k, c in u.terms if ctx.is_perm[k]}
    return group_element(ctx.wreath, ctx.ring, acc)


def quotient_multiply(ctx: AlgebraContext, u: AlgebraElement, v: AlgebraElement) -> GroupAlgebraElement:
    return quotient_image(ctx, multiply(ctx, u, v))


def wreath_diagram(ctx: AlgebraContext, x: WreathElement) -> ColouredDiagram:
    """Inverse of :func:`quotient_map`."""
    from .diagrams import permutation_diagram

    n = ctx.n
    pi = [0] * n
    for i, s in enumerate(x.perm):
        pi[s] = i
    return permutation_diagram(pi, x.labels, ctx.group)


# ---------------------------------------------------------------- JSON


def element_to_json(u: AlgebraElement) -> dict:
    ctx = u.ctx
    return {
        "terms": [
            {"coeff": ctx.ring.format(c), "diagram": diagram_to_json(ctx.diagrams[k], ctx.group)}
            for k, c in u.terms
        ]
    }


def element_from_json(ctx: AlgebraContext, data: dict) -> AlgebraElement:
    """Accepts an element ``{"terms": [...]}`` or a bare diagram (coefficient 1)."""
    if "terms" not in data:
        return ctx.of(diagram_from_json(data, ctx.group))
    items = []
    for t in data["terms"]:
        d = diagram_from_json(t["diagram"], ctx.group)
        if d.n != ctx.n:
            raise ContextMismatch(f"diagram of size {d.n} in a size-{ctx.n} context")
        items.append((ctx.index[d], ctx.ring.parse(str(t.get("coeff", "1")))))
    return ctx.element(items)
