"""Normalized bar complexes of augmented algebras with monomial structure constants.

For an augmented algebra A with basis x_0..x_{N-1}, unit x_u and augmentation
ε, the augmentation ideal has basis x̄ = x − ε(x)·1 for x ≠ x_u. The complex
computing Tor^A(k, k) has C_q = Ī^{⊗q}, indexed by q-digit base-(N−1)
numbers (first tensor factor most significant), and

    d(a₁⊗…⊗a_q) = Σ_{i=1}^{q−1} (−1)^{i−1} a₁⊗…⊗(a_i·a_{i+1})⊗…⊗a_q.

C_0 is the ground ring and d_1 = 0.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from ..errors import BudgetExceeded, UsageError, VerificationFailed
from ..groups import FiniteGroup
from ..rings import Ring, Scalar

DEFAULT_BATCH = 1 << 17
DEFAULT_BUDGET_MB = 4096
# rough bytes held per row of the top differential while eliminating
BYTES_PER_ROW = 96


def _coef_dtype(values) -> type:
    return np.int64 if all(isinstance(v, int) or getattr(v, "denominator", 1) == 1 for v in values) else object


@dataclass
class AugmentedAlgebraView:
    """What the bar construction needs from an algebra.

    ``target[i, j]`` is the basis index of x_i·x_j (−1 when the product is
    zero) and ``coef[i, j]`` its coefficient; ``eps`` is the augmentation on
    the basis and ``unit`` the index of 1.
    """

    name: str
    ring: Ring
    target: np.ndarray
    coef: np.ndarray
    eps: list
    unit: int

    @property
    def dim(self) -> int:
        return len(self.eps)

    def product(self, i: int, j: int) -> list[tuple[int, Scalar]]:
        t = int(self.target[i, j])
        c = self.ring(self.coef[i, j].item() if hasattr(self.coef[i, j], "item") else self.coef[i, j])
        return [] if t < 0 or c == 0 else [(t, c)]

    def check(self, samples: int = 100, seed: int = 0) -> None:
        """Unit is two-sided and ε multiplicative on seeded samples; raises on failure."""
        rng = random.Random(seed)
        N, r = self.dim, self.ring
        if r(self.eps[self.unit]) != r.one:
            raise VerificationFailed("augmentation of the unit is not 1")
        for _ in range(samples):
            x = rng.randrange(N)
            if self.product(self.unit, x) != [(x, r.one)] or self.product(x, self.unit) != [(x, r.one)]:
                raise VerificationFailed("unit is not a two-sided identity", witness=x)
        for _ in range(samples):
            x, y = rng.randrange(N), rng.randrange(N)
            lhs = r.zero
            for k, c in self.product(x, y):
                lhs = r.add(lhs, r.mul(c, self.eps[k]))
            if lhs != r.mul(self.eps[x], self.eps[y]):
                raise VerificationFailed("augmentation is not multiplicative", witness=(x, y))


def group_algebra_view(group: FiniteGroup, ring: Ring) -> AugmentedAlgebraView:
    """k[H] with ε(h) = 1."""
    target = np.array(group.mul, dtype=np.int64)
    coef = np.ones_like(target)
    return AugmentedAlgebraView(f"k[H], |H|={group.order}", ring, target, coef, [ring.one] * group.order, group.identity)


def partition_algebra_view(ctx) -> AugmentedAlgebraView:
    """Pₙ(δ,G) with ε = 1 on permutation diagrams and 0 elsewhere."""
    ring = ctx.ring
    target, internal = ctx.product_table()
    powers = [ring.power(ctx.delta, e) for e in range(int(internal.max(initial=0)) + 1)]
    dtype = _coef_dtype(powers)
    lookup = np.array(powers, dtype=dtype)
    coef = lookup[internal]
    target = np.where(_is_zero(coef), -1, target)
    eps = [ring.one if p else ring.zero for p in ctx.is_perm]
    return AugmentedAlgebraView(str(ctx), ring, target, coef, eps, ctx.identity_index)


# ---------------------------------------------------------------- reduced products


class ReducedProducts:
    """x̄·ȳ = Σ_z c_z z̄ − ε(y) x̄ − ε(x) ȳ on the augmentation ideal, as ≤3-term rows."""

    def __init__(self, A: AugmentedAlgebraView):
        self.ring = ring = A.ring
        N, u = A.dim, A.unit
        self.M = M = N - 1
        keep = np.array([x for x in range(N) if x != u], dtype=np.int64)
        red = np.full(N, -1, dtype=np.int64)
        red[keep] = np.arange(M)
        self.basis_of = keep  # reduced index -> algebra basis index

        eps_vals = [A.eps[x] for x in keep]
        dtype = np.int64 if _coef_dtype(list(eps_vals) + list(np.unique(A.coef).tolist())) is np.int64 else object
        eps = np.array(eps_vals, dtype=dtype) if M else np.zeros(0, dtype=dtype)
        T = A.target[np.ix_(keep, keep)]
        C = A.coef[np.ix_(keep, keep)].astype(dtype)
        idx = np.empty((M, M, 3), dtype=np.int64)
        val = np.empty((M, M, 3), dtype=dtype)
        t_red = np.where(T >= 0, red[np.maximum(T, 0)], -1)
        idx[:, :, 0] = t_red
        val[:, :, 0] = np.where(t_red >= 0, C, 0)
        ar = np.arange(M)
        idx[:, :, 1] = ar[:, None]
        val[:, :, 1] = -np.broadcast_to(eps[None, :], (M, M))
        idx[:, :, 2] = ar[None, :]
        val[:, :, 2] = -np.broadcast_to(eps[:, None], (M, M))
        for s, t in ((0, 1), (0, 2), (1, 2)):
            same = (idx[:, :, s] == idx[:, :, t]) & (idx[:, :, s] >= 0)
            val[:, :, s] = np.where(same, val[:, :, s] + val[:, :, t], val[:, :, s])
            idx[:, :, t] = np.where(same, -1, idx[:, :, t])
        val = _reduce(val, ring)
        zero = _is_zero(val)
        idx[zero] = -1
        val[zero] = 0
        self.idx, self.val = idx, val
        self.dtype = dtype

    def product(self, a: int, b: int) -> dict[int, Scalar]:
        return {int(i): self.ring(v) for i, v in zip(self.idx[a, b], self.val[a, b]) if i >= 0}


def _reduce(a: np.ndarray, ring: Ring) -> np.ndarray:
    if ring.kind == "F":
        return np.mod(a, ring.p)
    return a


def _is_zero(a: np.ndarray) -> np.ndarray:
    if a.dtype == object:
        return np.vectorize(lambda v: v == 0, otypes=[bool])(a) if a.size else np.zeros(a.shape, bool)
    return a == 0


# ---------------------------------------------------------------- complexes


class Differential:
    """d_q : C_q → C_{q−1}, generated column batch by column batch."""

    def __init__(self, rp: ReducedProducts, q: int):
        self.rp, self.q = rp, q
        M = rp.M
        self.nrows = 1 if q == 1 else M ** (q - 1)
        self.ncols = M**q if q >= 1 else 1
        self.shape = (self.nrows, self.ncols)

    @property
    def ring(self) -> Ring:
        return self.rp.ring

    def columns_coo(self, cols: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Entries (row, col, val) of the given columns, sorted by (col, row), nonzero and reduced."""
        q, M, rp = self.q, self.rp.M, self.rp
        cols = np.asarray(cols, dtype=np.int64)
        if q <= 1 or cols.size == 0:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, np.zeros(0, dtype=rp.dtype)
        rows_l, cols_l, vals_l = [], [], []
        for i in range(q - 1):
            low = M ** (q - i - 2)
            prefix = cols // (low * M * M)
            a = (cols // (low * M)) % M
            b = (cols // low) % M
            suffix = cols % low
            sign = 1 if i % 2 == 0 else -1
            for s in range(3):
                t = rp.idx[a, b, s]
                ok = t >= 0
                if not ok.any():
                    continue
                rows_l.append((prefix[ok] * M + t[ok]) * low + suffix[ok])
                cols_l.append(cols[ok])
                v = rp.val[a[ok], b[ok], s]
                vals_l.append(v if sign == 1 else -v)
        if not rows_l:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty, np.zeros(0, dtype=rp.dtype)
        return combine(np.concatenate(rows_l), np.concatenate(cols_l), np.concatenate(vals_l), self.ring)

    def batches(self, batch: int = DEFAULT_BATCH) -> Iterator[tuple[np.ndarray, np.ndarray, np.ndarray]]:
        for start in range(0, self.ncols, batch):
            yield self.columns_coo(np.arange(start, min(start + batch, self.ncols), dtype=np.int64))

    def column(self, c: int) -> dict[int, Scalar]:
        r, _, v = self.columns_coo(np.array([c]))
        return {int(i): self.ring(x if not hasattr(x, "item") else x.item()) for i, x in zip(r, v)}

    def to_dense(self) -> list[list[Scalar]]:
        out = [[self.ring.zero] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.batches():
            for i, j, x in zip(r.tolist(), c.tolist(), v.tolist()):
                out[i][j] = self.ring(x)
        return out


def combine(rows: np.ndarray, cols: np.ndarray, vals: np.ndarray, ring: Ring):
    """Sum duplicate (row, col) entries, reduce into the ring, drop zeros; sort by (col, row)."""
    if rows.size == 0:
        return rows, cols, vals
    order = np.lexsort((rows, cols))
    rows, cols, vals = rows[order], cols[order], vals[order]
    new = np.ones(rows.size, dtype=bool)
    new[1:] = (rows[1:] != rows[:-1]) | (cols[1:] != cols[:-1])
    starts = np.flatnonzero(new)
    if vals.dtype == object:
        summed = np.array([sum(vals[s:e]) for s, e in zip(starts, list(starts[1:]) + [vals.size])], dtype=object)
    else:
        summed = np.add.reduceat(vals, starts)
    rows, cols = rows[starts], cols[starts]
    summed = _reduce(summed, ring)
    keep = ~_is_zero(summed)
    return rows[keep], cols[keep], summed[keep]


@dataclass
class ChainComplex:
    """Bar complex of an augmented algebra through degree ``max_q + 1``."""

    algebra: AugmentedAlgebraView
    products: ReducedProducts
    max_q: int

    @property
    def ring(self) -> Ring:
        return self.algebra.ring

    def dim(self, q: int) -> int:
        return 1 if q == 0 else self.products.M**q

    def d(self, q: int) -> Differential:
        if not 1 <= q <= self.max_q + 1:
            raise UsageError(f"differential d_{q} outside the built range 1..{self.max_q + 1}")
        return Differential(self.products, q)


def estimate_bytes(A: AugmentedAlgebraView, max_q: int) -> int:
    """Memory needed to eliminate d_{max_q+1}, dominated by per-row state on C_{max_q}."""
    M = A.dim - 1
    return BYTES_PER_ROW * (M**max_q) + 8 * 27 * M * M


def bar_complex(A: AugmentedAlgebraView, max_q: int, *, budget_mb: int = DEFAULT_BUDGET_MB) -> ChainComplex:
    if max_q < 0:
        raise UsageError("max_q must be >= 0")
    need = estimate_bytes(A, max_q)
    if need > budget_mb * 2**20:
        raise BudgetExceeded(f"degree {max_q} needs ~{need >> 20} MB, budget is {budget_mb} MB")
    return ChainComplex(A, ReducedProducts(A), max_q)


def check_d_squared(C: ChainComplex, q: int, batch: int = DEFAULT_BATCH // 4) -> bool:
    """d_{q}∘d_{q+1} = 0 exactly, streamed over the columns of d_{q+1}."""
    if q <= 1:
        return True  # d_1 = 0
    dq, dq1 = C.d(q), C.d(q + 1)
    for r, c, v in dq1.batches(batch):
        if r.size == 0:
            continue
        # expand each entry (r, c, v) through column r of d_q
        uniq, inv = np.unique(r, return_inverse=True)
        r2, c2, v2 = dq.columns_coo(uniq)
        if r2.size == 0:
            continue
        starts = np.searchsorted(c2, uniq, side="left")
        ends = np.searchsorted(c2, uniq, side="right")
        counts = (ends - starts)[inv]
        rep_col = np.repeat(c, counts)
        rep_val = np.repeat(v, counts)
        offsets = np.cumsum(counts) - counts
        pos = np.repeat(starts[inv] - offsets, counts) + np.arange(counts.sum())
        out_rows = r2[pos]
        out_vals = rep_val * v2[pos]
        rr, _, _ = combine(out_rows, rep_col, out_vals, C.ring)
        if rr.size:
            return False
    return True
