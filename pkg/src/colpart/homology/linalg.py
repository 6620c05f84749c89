"""Exact ranks over fields and Smith normal forms over ℤ for sparse matrices.

:class:`FieldRank` consumes a matrix column batch by column batch and never
stores it. Columns with one or two nonzero entries are relations x ≡ 0 or
x ≡ c·y between row basis vectors and go into a weighted union-find; the
quotient of the row space by them is spanned by the live union-find roots.
Wider columns are deferred, rewritten in terms of roots (which may turn them
into further one- or two-term relations) and finally eliminated. The rank
is then ``nrows − dim(row space / column span)``.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

try:
    import numba

    _njit = numba.njit(cache=True, nogil=True)
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

    def _njit(f):
        return f


from ..rings import Ring, Scalar


# ---------------------------------------------------------------- 𝔽_p kernels


@_njit
def _inv_mod(a, p):
    t, new_t, r, new_r = 0, 1, p, a % p
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    return t % p


@_njit
def _find(parent, weight, x, p):
    # x ≡ w·root; path halving keeps every stored relation valid
    w = 1
    while parent[x] != x:
        px = parent[x]
        ppx = parent[px]
        if ppx != px:
            weight[x] = weight[x] * weight[px] % p
            parent[x] = ppx
        w = w * weight[x] % p
        x = parent[x]
    return x, w


@_njit
def _kill_all(parent, weight, dead, us, p):
    changed = 0
    for k in range(us.shape[0]):
        r, _ = _find(parent, weight, us[k], p)
        if not dead[r]:
            dead[r] = True
            changed += 1
    return changed


@_njit
def _union_all(parent, weight, dead, size, us, vs, cs, p):
    """Impose u ≡ c·v for each triple; returns the number of relations that changed the quotient."""
    changed = 0
    for k in range(us.shape[0]):
        ru, wu = _find(parent, weight, us[k], p)
        rv, wv = _find(parent, weight, vs[k], p)
        # wu·ru ≡ c·wv·rv  ⇒  ru ≡ m·rv
        m = cs[k] * wv % p * _inv_mod(wu, p) % p
        if ru == rv:
            if m != 1 and not dead[ru]:
                dead[ru] = True
                changed += 1
            continue
        changed += 1
        d = dead[ru] or dead[rv]
        if size[ru] < size[rv]:
            parent[ru] = rv
            weight[ru] = m
            size[rv] += size[ru]
            dead[rv] = d
        else:
            parent[rv] = ru
            weight[rv] = _inv_mod(m, p)
            size[ru] += size[rv]
            dead[ru] = d
    return changed


@_njit
def _find_many(parent, weight, xs, p):
    roots = np.empty(xs.shape[0], dtype=np.int64)
    ws = np.empty(xs.shape[0], dtype=np.int64)
    for k in range(xs.shape[0]):
        roots[k], ws[k] = _find(parent, weight, xs[k], p)
    return roots, ws


@_njit
def _eliminate_mod(colptr, rows, vals, nrows, p):
    """Rank of sparse columns over 𝔽_p by pivoting on each column's largest row.

    Pivot vectors are kept dense in a dict-free layout: pivot_of[row] gives the
    slot of the stored vector whose leading (largest) row is ``row``.
    """
    pivot_of = np.full(nrows, -1, dtype=np.int64)
    store_rows = []
    store_vals = []
    acc = np.zeros(nrows, dtype=np.int64)
    mark = np.zeros(nrows, dtype=np.bool_)
    rank = 0
    for c in range(colptr.shape[0] - 1):
        touched = []
        for k in range(colptr[c], colptr[c + 1]):
            r = rows[k]
            if not mark[r]:
                mark[r] = True
                touched.append(r)
            acc[r] = (acc[r] + vals[k]) % p
        # heap-free: repeatedly take the largest nonzero row
        while True:
            lead = -1
            for r in touched:
                if acc[r] != 0 and r > lead:
                    lead = r
            if lead < 0:
                break
            slot = pivot_of[lead]
            if slot < 0:
                # normalise and store
                inv = _inv_mod(acc[lead], p)
                vr = []
                vv = []
                for r in touched:
                    if acc[r] != 0:
                        vr.append(r)
                        vv.append(acc[r] * inv % p)
                store_rows.append(np.array(vr, dtype=np.int64))
                store_vals.append(np.array(vv, dtype=np.int64))
                pivot_of[lead] = len(store_rows) - 1
                rank += 1
                break
            f = acc[lead]
            pr = store_rows[slot]
            pv = store_vals[slot]
            for k in range(pr.shape[0]):
                r = pr[k]
                if not mark[r]:
                    mark[r] = True
                    touched.append(r)
                acc[r] = (acc[r] - f * pv[k]) % p
        for r in touched:
            acc[r] = 0
            mark[r] = False
    return rank


# ---------------------------------------------------------------- generic (ℚ) fallback


class _PyUnionFind:
    def __init__(self, n: int, ring: Ring):
        self.parent = list(range(n))
        self.weight = [ring.one] * n
        self.dead = [False] * n
        self.size = [1] * n
        self.ring = ring

    def find(self, x: int):
        parent, weight, mul = self.parent, self.weight, self.ring.mul
        w = self.ring.one
        while parent[x] != x:
            px = parent[x]
            ppx = parent[px]
            if ppx != px:
                weight[x] = mul(weight[x], weight[px])
                parent[x] = ppx
            w = mul(w, weight[x])
            x = parent[x]
        return x, w

    def kill(self, u: int) -> int:
        r, _ = self.find(u)
        if self.dead[r]:
            return 0
        self.dead[r] = True
        return 1

    def union(self, u: int, v: int, c) -> int:
        R = self.ring
        ru, wu = self.find(u)
        rv, wv = self.find(v)
        m = R.mul(R.mul(c, wv), R.inv(wu))
        if ru == rv:
            if m != R.one and not self.dead[ru]:
                self.dead[ru] = True
                return 1
            return 0
        d = self.dead[ru] or self.dead[rv]
        if self.size[ru] < self.size[rv]:
            self.parent[ru], self.weight[ru] = rv, m
            self.size[rv] += self.size[ru]
            self.dead[rv] = d
        else:
            self.parent[rv], self.weight[rv] = ru, R.inv(m)
            self.size[ru] += self.size[rv]
            self.dead[ru] = d
        return 1


def _group_columns(cols: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Start offsets and lengths of runs of equal values in a sorted array."""
    if cols.size == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    new = np.ones(cols.size, dtype=bool)
    new[1:] = cols[1:] != cols[:-1]
    starts = np.flatnonzero(new)
    lengths = np.diff(np.append(starts, cols.size))
    return starts, lengths


class FieldRank:
    """Rank of a sparse matrix over a field, fed in column batches.

    ``feed(rows, cols, vals)`` takes the entries of a batch of whole columns,
    sorted by column, with no duplicate positions and nonzero reduced values.
    Column ids only need to be distinct within one call.
    """

    def __init__(self, nrows: int, ring: Ring):
        if not ring.is_field:
            raise ValueError(f"{ring} is not a field")
        self.nrows = nrows
        self.ring = ring
        self.fast = ring.kind == "F" and numba is not None
        if self.fast:
            self.p = ring.p
            self.parent = np.arange(nrows, dtype=np.int64)
            self.weight = np.ones(nrows, dtype=np.int64)
            self.dead = np.zeros(nrows, dtype=np.bool_)
            self.size = np.ones(nrows, dtype=np.int64)
        else:
            self.uf = _PyUnionFind(nrows, ring)
        self._pool: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
        self._next_col = 0
        self.columns_seen = 0

    # -- streaming stage

    def feed(self, rows: np.ndarray, cols: np.ndarray, vals: np.ndarray) -> None:
        starts, lengths = _group_columns(cols)
        self.columns_seen += int(starts.size)
        self._relations(rows, vals, starts, lengths)
        wide = lengths >= 3
        if wide.any():
            sel = np.repeat(wide, lengths)
            ids = np.repeat(np.arange(starts.size, dtype=np.int64), lengths)[sel] + self._next_col
            self._pool.append((rows[sel].astype(np.int64), ids, vals[sel]))
        self._next_col += int(starts.size)

    def _relations(self, rows, vals, starts, lengths) -> int:
        """Apply the one- and two-entry columns; return how many changed the quotient."""
        changed = 0
        one = starts[lengths == 1]
        two = starts[lengths == 2]
        if self.fast:
            p = self.p
            if one.size:
                changed += _kill_all(self.parent, self.weight, self.dead, rows[one].astype(np.int64), p)
            if two.size:
                u, v = rows[two].astype(np.int64), rows[two + 1].astype(np.int64)
                a, b = vals[two].astype(np.int64) % p, vals[two + 1].astype(np.int64) % p
                inv_a = np.array([pow(int(x), -1, p) for x in np.unique(a)], dtype=np.int64)
                lut = np.zeros(p, dtype=np.int64) if p < 1 << 20 else None
                if lut is not None:
                    lut[np.unique(a)] = inv_a
                    c = (-b % p) * lut[a] % p
                else:
                    c = np.array([(-int(y)) * pow(int(x), -1, p) % p for x, y in zip(a, b)], dtype=np.int64)
                changed += _union_all(self.parent, self.weight, self.dead, self.size, u, v, c, p)
        else:
            R = self.ring
            for s in one.tolist():
                changed += self.uf.kill(int(rows[s]))
            for s in two.tolist():
                a, b = R(_py(vals[s])), R(_py(vals[s + 1]))
                changed += self.uf.union(int(rows[s]), int(rows[s + 1]), R.neg(R.mul(b, R.inv(a))))
        return changed

    # -- final stage

    def _roots(self, xs: np.ndarray):
        if self.fast:
            return _find_many(self.parent, self.weight, xs.astype(np.int64), self.p)
        found = [self.uf.find(int(x)) for x in xs]
        return (
            np.array([r for r, _ in found], dtype=np.int64),
            np.array([w for _, w in found], dtype=object),
        )

    def _is_dead(self, roots: np.ndarray) -> np.ndarray:
        if self.fast:
            return self.dead[roots]
        return np.array([self.uf.dead[r] for r in roots], dtype=bool)

    def _live_roots(self) -> np.ndarray:
        if self.fast:
            idx = np.arange(self.nrows)
            return idx[(self.parent == idx) & ~self.dead]
        return np.array([x for x in range(self.nrows) if self.uf.parent[x] == x and not self.uf.dead[x]], dtype=np.int64)

    def _rewrite(self, rows, ids, vals):
        """Express deferred entries in terms of live roots, merging duplicates."""
        roots, ws = self._roots(rows)
        alive = ~self._is_dead(roots)
        roots, ids, vals, ws = roots[alive], ids[alive], vals[alive], ws[alive]
        if self.fast:
            vals = vals.astype(np.int64) % self.p * ws % self.p
        else:
            R = self.ring
            vals = np.array([R.mul(R(_py(v)), w) for v, w in zip(vals, ws)], dtype=object)
        order = np.lexsort((roots, ids))
        roots, ids, vals = roots[order], ids[order], vals[order]
        if roots.size:
            new = np.ones(roots.size, dtype=bool)
            new[1:] = (roots[1:] != roots[:-1]) | (ids[1:] != ids[:-1])
            starts = np.flatnonzero(new)
            if self.fast:
                vals = np.add.reduceat(vals, starts) % self.p
            else:
                ends = list(starts[1:]) + [vals.size]
                vals = np.array([sum(vals[s:e], self.ring.zero) for s, e in zip(starts, ends)], dtype=object)
            roots, ids = roots[starts], ids[starts]
            nz = vals != 0 if self.fast else np.array([v != 0 for v in vals], dtype=bool)
            roots, ids, vals = roots[nz], ids[nz], vals[nz]
        return roots, ids, vals

    def rank(self) -> int:
        if self._pool:
            rows = np.concatenate([r for r, _, _ in self._pool])
            ids = np.concatenate([c for _, c, _ in self._pool])
            vals = np.concatenate([v for _, _, v in self._pool])
        else:
            rows = ids = np.zeros(0, dtype=np.int64)
            vals = np.zeros(0, dtype=np.int64)
        self._pool = []
        while True:
            rows, ids, vals = self._rewrite(rows, ids, vals)
            starts, lengths = _group_columns(ids)
            changed = self._relations(rows, vals, starts, lengths)
            wide = np.repeat(lengths >= 3, lengths)
            rows, ids, vals = rows[wide], ids[wide], vals[wide]
            if not changed:
                break
        live = self._live_roots()
        # remaining wide columns live on the live roots; eliminate them there
        pos = np.full(self.nrows, -1, dtype=np.int64)
        pos[live] = np.arange(live.size)
        local = pos[rows]
        starts, lengths = _group_columns(ids)
        colptr = np.append(starts, ids.size).astype(np.int64)
        if self.fast:
            r_extra = _eliminate_mod(colptr, local, vals.astype(np.int64), max(live.size, 1), self.p) if starts.size else 0
        else:
            r_extra = _py_eliminate(colptr, local, vals, self.ring)
        self.residual_columns = int(starts.size)
        self.quotient_dim = int(live.size) - r_extra
        return self.nrows - self.quotient_dim


def _py(v):
    return v.item() if hasattr(v, "item") else v


def _py_eliminate(colptr, rows, vals, ring: Ring) -> int:
    pivots: dict[int, dict[int, Scalar]] = {}
    for c in range(len(colptr) - 1):
        vec: dict[int, Scalar] = {}
        for k in range(colptr[c], colptr[c + 1]):
            vec[int(rows[k])] = ring(_py(vals[k]))
        while vec:
            lead = max(vec)
            piv = pivots.get(lead)
            if piv is None:
                inv = ring.inv(vec[lead])
                pivots[lead] = {r: ring.mul(v, inv) for r, v in vec.items()}
                break
            f = vec[lead]
            for r, v in piv.items():
                nv = ring.sub(vec.get(r, ring.zero), ring.mul(f, v))
                if nv == 0:
                    vec.pop(r, None)
                else:
                    vec[r] = nv
    return len(pivots)


def rank_over_field(batches, nrows: int, ring: Ring) -> int:
    fr = FieldRank(nrows, ring)
    for r, c, v in batches:
        fr.feed(r, c, v)
    return fr.rank()


# ---------------------------------------------------------------- dense oracle


def dense_rank(matrix: list[list[Scalar]], ring: Ring) -> int:
    """Textbook Gaussian elimination on a dense matrix (independent check for small cases)."""
    if ring.kind == "Z":
        ring = Ring("Q")
    a = [[ring(x) for x in row] for row in matrix]
    rank = 0
    ncols = len(a[0]) if a else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(a)) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = ring.inv(a[rank][c])
        a[rank] = [ring.mul(x, inv) for x in a[rank]]
        for r in range(len(a)):
            if r != rank and a[r][c] != 0:
                f = a[r][c]
                a[r] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


def kernel_basis(matrix: list[list[Scalar]], ring: Ring) -> list[list[Scalar]]:
    """Basis of {x : A x = 0} over a field, for a dense matrix given as rows."""
    nrows = len(matrix)
    ncols = len(matrix[0]) if matrix else 0
    a = [[ring(x) for x in row] for row in matrix]
    pivots: list[int] = []
    rank = 0
    for c in range(ncols):
        piv = next((r for r in range(rank, nrows) if a[r][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = ring.inv(a[rank][c])
        a[rank] = [ring.mul(x, inv) for x in a[rank]]
        for r in range(nrows):
            if r != rank and a[r][c] != 0:
                f = a[r][c]
                a[r] = [ring.sub(x, ring.mul(f, y)) for x, y in zip(a[r], a[rank])]
        pivots.append(c)
        rank += 1
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [ring.zero] * ncols
        x[f] = ring.one
        for r, c in enumerate(pivots):
            x[c] = ring.neg(a[r][f])
        basis.append(x)
    return basis


# ---------------------------------------------------------------- Smith normal form


def smith_divisors(columns: list[dict[int, int]], nrows: int) -> tuple[int, list[int]]:
    """Rank and elementary divisors (> 1, each dividing the next) of an integer matrix.

    ``columns`` holds each column as a sparse {row: value} dict. Entries ±1 are
    used as pivots first (row and column then drop out, at the cost of a
    Schur-complement update); what remains is reduced densely.
    """
    # row-major sparse copy
    rows: dict[int, dict[int, int]] = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            if v:
                rows.setdefault(i, {})[j] = int(v)
    cols: dict[int, set[int]] = {}
    for i, row in rows.items():
        for j in row:
            cols.setdefault(j, set()).add(i)
    rank = 0
    while True:
        pivot = None
        # prefer a unit entry in the shortest row
        for i in sorted(rows, key=lambda i: (len(rows[i]), i)):
            for j in sorted(rows[i], key=lambda j: (len(cols[j]), j)):
                if rows[i][j] in (1, -1):
                    pivot = (i, j)
                    break
            if pivot:
                break
        if pivot is None:
            break
        pi, pj = pivot
        prow = rows.pop(pi)
        pv = prow[pj]
        for j in prow:
            cols[j].discard(pi)
        for i in sorted(cols.pop(pj)):
            row = rows[i]
            f = row.pop(pj) * pv  # pv = ±1 so f/pv = f·pv
            for j, v in prow.items():
                if j == pj:
                    continue
                nv = row.get(j, 0) - f * v
                if nv:
                    if j not in row:
                        cols[j].add(i)
                    row[j] = nv
                elif j in row:
                    del row[j]
                    cols[j].discard(i)
            if not row:
                del rows[i]
        for j in prow:
            if j != pj and j in cols and not cols[j]:
                del cols[j]
        rank += 1
    if not rows:
        return rank, []
    ri = sorted(rows)
    cj = sorted({j for r in rows.values() for j in r})
    dense = [[rows[i].get(j, 0) for j in cj] for i in ri]
    diag = dense_smith_diagonal(dense)
    divisors = sorted(abs(d) for d in diag if abs(d) > 1)
    return rank + len(diag), divisors


def dense_smith_diagonal(a: list[list[int]]) -> list[int]:
    """Nonzero diagonal of the Smith normal form of a dense integer matrix."""
    a = [row[:] for row in a]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        # smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    for row in a:
                        row[j] -= q * row[t]
                    if a[t][j]:
                        done = False
            if not done:
                # move the smallest remaining entry of row/column t to the pivot
                cands = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
                cands += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
                _, i, j = min(cands)
                a[t], a[i] = a[i], a[t]
                for row in a:
                    row[t], row[j] = row[j], row[t]
                continue
            # divisibility: pivot must divide every remaining entry
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p), None)
            if bad is None:
                break
            i, _ = bad
            a[t] = [x + y for x, y in zip(a[t], a[i])]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def fraction_free(v) -> bool:
    return not isinstance(v, Fraction) or v.denominator == 1
