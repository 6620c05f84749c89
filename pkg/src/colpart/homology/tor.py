"""Tor and Ext of the trivial module, the inclusion-induced maps, and the
comparison of Pₙ(δ,G) with k[G≀Sₙ]."""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..algebra import AlgebraContext
from ..diagrams import identity_diagram, include, is_permutation
from ..errors import BudgetExceeded, ContextMismatch, RingUnsupported, VerificationFailed
from ..groups import FiniteGroup, wreath_product
from ..rings import Ring
from .bar import (
    DEFAULT_BATCH,
    DEFAULT_BUDGET_MB,
    AugmentedAlgebraView,
    ChainComplex,
    bar_complex,
    check_d_squared,
    combine,
    group_algebra_view,
    partition_algebra_view,
)
from .linalg import FieldRank, kernel_basis, smith_divisors

SNF_ROW_CAP = 50_000
SNF_COLUMN_CAP = 2_000_000
TRANSPOSE_ENTRY_CAP = 20_000_000


@dataclass
class HomologyResult:
    """Per-degree homology. Over a field ``betti`` is filled; over ℤ ``rank`` and
    ``divisors`` (``None`` for a degree whose Smith form was skipped)."""

    ring: Ring
    max_q: int
    dims: list[int]
    ranks: list[int]  # ranks[q] = rank d_q over the field (or ℚ), q = 0..max_q+1
    betti: list[int] | None = None
    rank: list[int] | None = None
    divisors: list[list[int] | None] | None = None
    d_squared_zero: bool = True
    notes: list[str] = field(default_factory=list)

    def values(self) -> list:
        """Comparable per-degree values: Betti numbers, or (rank, divisors) pairs."""
        if self.betti is not None:
            return list(self.betti)
        return [(r, d) for r, d in zip(self.rank, self.divisors)]

    def payload(self) -> dict | list:
        if self.betti is not None:
            return list(self.betti)
        return {"rank": list(self.rank), "divisors": [None if d is None else list(d) for d in self.divisors]}


def _column_dicts(C: ChainComplex, q: int) -> list[dict[int, int]]:
    d = C.d(q)
    cols: list[dict[int, int]] = [dict() for _ in range(d.ncols)]
    for r, c, v in d.batches():
        for i, j, x in zip(r.tolist(), c.tolist(), v.tolist()):
            cols[j][i] = int(x)
    return cols


def _ordered_batches(d, batch: int, threads: int):
    """Column batches of d in order; with threads > 1 up to that many are generated ahead."""
    if threads <= 1:
        yield from d.batches(batch)
        return
    starts = range(0, d.ncols, batch)

    def make(s):
        return d.columns_coo(np.arange(s, min(s + batch, d.ncols), dtype=np.int64))

    with ThreadPoolExecutor(max_workers=threads) as pool:
        pending = deque()
        for s in starts:
            pending.append(pool.submit(make, s))
            if len(pending) >= threads:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def _field_rank(C: ChainComplex, q: int, ring: Ring, batch: int, threads: int = 1) -> int:
    if q <= 1:
        return 0
    d = C.d(q)
    fr = FieldRank(d.nrows, ring)
    for r, c, v in _ordered_batches(d, batch, threads):
        fr.feed(r, c, v)
    return fr.rank()


def homology(C: ChainComplex, *, batch: int = DEFAULT_BATCH, check: bool = True, threads: int = 1) -> HomologyResult:
    """H_q for q ≤ max_q: Betti numbers over a field, rank and elementary divisors over ℤ."""
    ring = C.ring
    top = C.max_q
    dims = [C.dim(q) for q in range(top + 2)]
    ok = True
    if check:
        ok = all(check_d_squared(C, q) for q in range(1, top + 1))
        if not ok:
            raise VerificationFailed("d∘d != 0 in the bar complex")
    if ring.is_field:
        ranks = [0] + [_field_rank(C, q, ring, batch, threads) for q in range(1, top + 2)]
        betti = [dims[q] - ranks[q] - ranks[q + 1] for q in range(top + 1)]
        return HomologyResult(ring, top, dims, ranks, betti=betti, d_squared_zero=ok)

    ranks = [0, 0]
    divs: list[list[int] | None] = [[], []]  # d_0 and d_1 vanish
    notes = []
    for q in range(2, top + 2):
        d = C.d(q)
        if d.nrows <= SNF_ROW_CAP and d.ncols <= SNF_COLUMN_CAP:
            r, dv = smith_divisors(_column_dicts(C, q), d.nrows)
        else:
            notes.append(f"d_{q}: Smith form skipped ({d.nrows}x{d.ncols}); rank over Q only")
            r, dv = _field_rank(C, q, Ring("Q"), batch, threads), None
        ranks.append(r)
        divs.append(dv)
    rank = [dims[q] - ranks[q] - ranks[q + 1] for q in range(top + 1)]
    divisors = [divs[q + 1] for q in range(top + 1)]
    return HomologyResult(ring, top, dims, ranks, rank=rank, divisors=divisors, d_squared_zero=ok, notes=notes)


def tor_of_view(A: AugmentedAlgebraView, max_q: int, *, budget_mb: int = DEFAULT_BUDGET_MB, check: bool = True, threads: int = 1) -> HomologyResult:
    A.check()
    return homology(bar_complex(A, max_q, budget_mb=budget_mb), check=check, threads=threads)


def tor_of_algebra(ctx: AlgebraContext, max_q: int, *, budget_mb: int = DEFAULT_BUDGET_MB, check: bool = True, threads: int = 1) -> HomologyResult:
    """Tor^{Pₙ(δ,G)}_q(𝟙, 𝟙) for q ≤ max_q via the normalized bar complex."""
    return tor_of_view(partition_algebra_view(ctx), max_q, budget_mb=budget_mb, check=check, threads=threads)


def tor_of_group(group: FiniteGroup, ring: Ring, max_q: int, *, budget_mb: int = DEFAULT_BUDGET_MB, check: bool = True, threads: int = 1) -> HomologyResult:
    """Tor^{k[H]}_q(k, k) = H_q(H; k) for q ≤ max_q."""
    return tor_of_view(group_algebra_view(group, ring), max_q, budget_mb=budget_mb, check=check, threads=threads)


def _transposed_rank(C: ChainComplex, q: int, ring: Ring) -> int:
    if q <= 1:
        return 0
    d = C.d(q)
    parts = list(d.batches())
    nnz = sum(r.size for r, _, _ in parts)
    if nnz > TRANSPOSE_ENTRY_CAP:
        raise BudgetExceeded(f"transposing d_{q} needs {nnz} stored entries")
    rows = np.concatenate([c for _, c, _ in parts]) if parts else np.zeros(0, np.int64)
    cols = np.concatenate([r for r, _, _ in parts]) if parts else np.zeros(0, np.int64)
    vals = np.concatenate([v for _, _, v in parts]) if parts else np.zeros(0, np.int64)
    rows, cols, vals = combine(rows, cols, vals, ring)
    fr = FieldRank(d.ncols, ring)
    fr.feed(rows, cols, vals)
    return fr.rank()


def ext_of(A: AugmentedAlgebraView, max_q: int, *, budget_mb: int = DEFAULT_BUDGET_MB) -> HomologyResult:
    """dim Ext^q_A(k, k) over a field, from the transposed bar differentials."""
    ring = A.ring
    if not ring.is_field:
        raise RingUnsupported("Ext is only computed over fields")
    A.check()
    C = bar_complex(A, max_q, budget_mb=budget_mb)
    dims = [C.dim(q) for q in range(max_q + 2)]
    ranks = [0] + [_transposed_rank(C, q, ring) for q in range(1, max_q + 2)]
    betti = [dims[q] - ranks[q] - ranks[q + 1] for q in range(max_q + 1)]
    tor = homology(C)
    if tor.betti != betti:
        raise VerificationFailed("dim Ext != dim Tor", witness={"ext": betti, "tor": tor.betti})
    return HomologyResult(ring, max_q, dims, ranks, betti=betti)


# ---------------------------------------------------------------- stabilization maps


def _reduced_inclusion(small: AlgebraContext, big: AlgebraContext, C_small: ChainComplex, C_big: ChainComplex) -> np.ndarray:
    """Reduced basis of Pₙ₋₁ → reduced basis of Pₙ (the inclusion is monomial on these)."""
    red_big = np.full(big.dim, -1, dtype=np.int64)
    red_big[C_big.products.basis_of] = np.arange(C_big.products.M)
    images = [big.index[include(small.diagrams[x], small.group)] for x in C_small.products.basis_of]
    fmap = red_big[np.array(images, dtype=np.int64)] if images else np.zeros(0, np.int64)
    if (fmap < 0).any():
        raise VerificationFailed("inclusion sends a reduced basis element to the unit")
    return fmap


def _apply_tensor_map(fmap: np.ndarray, idx: np.ndarray, q: int, M_src: int, M_dst: int) -> np.ndarray:
    out = np.zeros_like(idx)
    for k in range(q):
        digit = (idx // M_src ** (q - 1 - k)) % M_src
        out = out * M_dst + fmap[digit]
    return out


def induced_map_on_tor(small: AlgebraContext, big: AlgebraContext, max_q: int, *, budget_mb: int = DEFAULT_BUDGET_MB) -> dict:
    """The map Tor_q(Pₙ₋₁) → Tor_q(Pₙ) induced by inclusion, over a field."""
    ring = big.ring
    if not ring.is_field:
        raise RingUnsupported("induced maps are computed over fields")
    if big.n != small.n + 1 or big.group != small.group or big.ring != small.ring or big.delta != small.delta:
        raise ContextMismatch("need Pₙ₋₁ and Pₙ over the same G, δ and ring")
    G = small.group
    if include(identity_diagram(small.n, G), G) != identity_diagram(big.n, G):
        raise VerificationFailed("inclusion is not unital")
    for d in small.diagrams:
        if is_permutation(include(d, G)) != is_permutation(d):
            raise VerificationFailed("inclusion does not preserve the augmentation", witness=str(d))

    A, B = partition_algebra_view(small), partition_algebra_view(big)
    CA = bar_complex(A, max_q, budget_mb=budget_mb)
    CB = bar_complex(B, max_q, budget_mb=budget_mb)
    fmap = _reduced_inclusion(small, big, CA, CB)
    MA, MB = CA.products.M, CB.products.M

    # chain map: f_{q-1}∘d^A = d^B∘f_q on every column
    chain_ok = True
    for q in range(2, max_q + 2):
        dA, dB = CA.d(q), CB.d(q)
        for start in range(0, dA.ncols, DEFAULT_BATCH):
            cols = np.arange(start, min(start + DEFAULT_BATCH, dA.ncols), dtype=np.int64)
            r, c, v = dA.columns_coo(cols)
            lhs = combine(_apply_tensor_map(fmap, r, q - 1, MA, MB), _apply_tensor_map(fmap, c, q, MA, MB), v, ring)
            rhs = dB.columns_coo(_apply_tensor_map(fmap, cols, q, MA, MB))
            if not all(np.array_equal(x, y) for x, y in zip(lhs, rhs)):
                chain_ok = False
    if not chain_ok:
        raise VerificationFailed("inclusion is not a chain map")

    tor_a = homology(CA)
    tor_b = homology(CB)
    degrees = []
    for q in range(max_q + 1):
        if q == 0:
            rank_f = 1
        else:
            # cycles of the source
            if q == 1:
                cyc = [{int(fmap[r]): ring.one} for r in range(MA)]
            else:
                dense = CA.d(q).to_dense()
                cyc = []
                for z in kernel_basis(dense, ring):
                    img: dict[int, object] = {}
                    for i, x in enumerate(z):
                        if x != 0:
                            img[int(_apply_tensor_map(fmap, np.array([i]), q, MA, MB)[0])] = x
                    cyc.append(img)
            nrows = CB.dim(q)
            base = FieldRank(nrows, ring)
            both = FieldRank(nrows, ring)
            if q + 1 <= CB.max_q + 1:
                for r, c, v in CB.d(q + 1).batches():
                    base.feed(r, c, v)
                    both.feed(r, c, v)
            rows, cols, vals = [], [], []
            for j, vec in enumerate(cyc):
                for i in sorted(vec):
                    rows.append(i)
                    cols.append(j)
                    vals.append(vec[i])
            dtype = np.int64 if ring.kind == "F" else object
            both.feed(np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), np.array(vals, dtype=dtype))
            rank_f = both.rank() - base.rank()
        ha, hb = tor_a.betti[q], tor_b.betti[q]
        degrees.append(
            {
                "q": q,
                "dim_source": ha,
                "dim_target": hb,
                "rank": rank_f,
                "isomorphism": rank_f == ha == hb,
                "in_stable_range": big.n > 2 * q,
            }
        )
    return {"chain_map": chain_ok, "degrees": degrees}


# ---------------------------------------------------------------- stability


def compare_stability(ctx: AlgebraContext, max_q: int, *, budget_mb: int = DEFAULT_BUDGET_MB, threads: int = 1) -> dict:
    """Tor of Pₙ(δ,G) against Tor of G≀Sₙ; equality is asserted for q ≤ min(max_q, n−1)."""
    alg = tor_of_algebra(ctx, max_q, budget_mb=budget_mb, threads=threads)
    wr = tor_of_group(wreath_product(ctx.group, ctx.n), ctx.ring, max_q, budget_mb=budget_mb, threads=threads)
    asserted = min(max_q, ctx.n - 1)
    va, vw = alg.values(), wr.values()
    mismatches = [q for q in range(asserted + 1) if va[q] != vw[q]]
    # a skipped Smith form on either side means only ranks can be compared there
    for q in list(mismatches):
        if alg.betti is None and (va[q][1] is None or vw[q][1] is None) and va[q][0] == vw[q][0]:
            mismatches.remove(q)
    return {
        "asserted_range": asserted,
        "algebra": alg,
        "wreath": wr,
        "mismatches": mismatches,
        "pass": not mismatches,
    }
