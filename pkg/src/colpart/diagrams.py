"""G-coloured partition diagrams in canonical form, and their composition.

Nodes of a size-``n`` diagram are integers: left node ``i`` (1-based) is
``i - 1`` and right node ``i`` (the barred one) is ``n + i - 1``, so the
integer order is L1 < ... < Ln < R1 < ... < Rn.

A colouring is stored per block relative to the block's minimal node: the
entry for node ``y`` is γ(base, y), so the base always carries the identity
and γ(x, y) = colour(x)⁻¹·colour(y).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

from .errors import BadIndex, SizeLimit, SizeMismatch, UsageError
from .groups import FiniteGroup

PARTITION_SIZE_CAP = 10
DIAGRAM_COUNT_CAP = 10**6


class NodeId(NamedTuple):
    side: str  # "L" or "R"
    index: int  # 1..n

    def code(self, n: int) -> int:
        if self.side not in ("L", "R") or not 1 <= self.index <= n:
            raise BadIndex(f"node {self} out of range for n={n}")
        return self.index - 1 if self.side == "L" else n + self.index - 1

    @classmethod
    def decode(cls, code: int, n: int) -> "NodeId":
        return cls("L", code + 1) if code < n else cls("R", code - n + 1)


def L(i: int) -> NodeId:
    return NodeId("L", i)


def R(i: int) -> NodeId:
    return NodeId("R", i)


Blocks = tuple[tuple[int, ...], ...]


def canonical_blocks(blocks) -> Blocks:
    return tuple(sorted(tuple(sorted(b)) for b in blocks))


@dataclass(frozen=True)
class SetPartition:
    n: int
    blocks: Blocks

    def __post_init__(self) -> None:
        if canonical_blocks(self.blocks) != self.blocks:
            raise ValueError("blocks are not in canonical form")
        seen = sorted(x for b in self.blocks for x in b)
        if seen != list(range(2 * self.n)):
            raise ValueError(f"blocks do not partition the {2 * self.n} nodes")


@dataclass(frozen=True)
class ColouredDiagram:
    n: int
    blocks: Blocks
    colours: tuple[tuple[int, ...], ...]

    @property
    def partition(self) -> SetPartition:
        return SetPartition(self.n, self.blocks)

    def block_of(self, code: int) -> int:
        for k, b in enumerate(self.blocks):
            if code in b:
                return k
        raise BadIndex(code)

    def __str__(self) -> str:
        parts = []
        for b, c in zip(self.blocks, self.colours):
            names = [_node_str(x, self.n) for x in b]
            if any(c[1:]):
                names = [f"{nm}:{col}" for nm, col in zip(names, c)]
            parts.append("{" + ",".join(names) + "}")
        return "{" + ",".join(parts) + "}"


def _node_str(code: int, n: int) -> str:
    return str(code + 1) if code < n else f"{code - n + 1}'"


def make_diagram(n: int, blocks, colours=None, group: FiniteGroup | None = None) -> ColouredDiagram:
    """Build a canonical diagram from arbitrary blocks.

    Nodes are integer codes or :class:`NodeId`. ``colours`` gives, per block and
    aligned with the block as passed, a group element per node (a potential α);
    stored colours are α_base⁻¹·α_y. Without ``colours`` the colouring is trivial.
    """
    e = group.identity if group is not None else 0
    blocks = [[x.code(n) if isinstance(x, NodeId) else x for x in b] for b in blocks]
    if colours is None:
        colours = [[e] * len(b) for b in blocks]
    items = []
    for b, c in zip(blocks, colours):
        if len(b) != len(c):
            raise UsageError("colour vector length does not match block")
        pairs = sorted(zip(b, c))
        base = pairs[0][1]
        if group is not None:
            binv = group.inverse[base]
            rel = tuple(group.mul[binv][a] for _, a in pairs)
        else:
            rel = tuple(e for _ in pairs)
        items.append((tuple(x for x, _ in pairs), rel))
    items.sort()
    d = ColouredDiagram(n, tuple(b for b, _ in items), tuple(c for _, c in items))
    SetPartition(n, d.blocks)
    return d


# ---------------------------------------------------------------- enumeration


def _rgs_to_blocks(rgs: Sequence[int]) -> Blocks:
    blocks: list[list[int]] = []
    for x, b in enumerate(rgs):
        if b == len(blocks):
            blocks.append([x])
        else:
            blocks[b].append(x)
    return tuple(tuple(b) for b in blocks)


def _restricted_growth_strings(m: int) -> Iterator[list[int]]:
    # a[0] = 0, a[i] <= 1 + max(a[:i]); lexicographic order
    if m == 0:
        yield []
        return
    a = [0] * m
    mx = [0] * m  # mx[i] = max(a[:i+1])
    while True:
        yield a
        i = m - 1
        while i > 0 and a[i] > mx[i - 1]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        mx[i] = max(mx[i - 1], a[i])
        for j in range(i + 1, m):
            a[j] = 0
            mx[j] = mx[i]


def enumerate_partitions(size: int, *, cap: int = PARTITION_SIZE_CAP) -> Iterator[SetPartition]:
    """All set partitions of the ``2*size`` nodes, via restricted growth strings."""
    if size < 1:
        raise UsageError("diagram size must be positive")
    if size > cap:
        raise SizeLimit(f"partition enumeration capped at size {cap}")
    for rgs in _restricted_growth_strings(2 * size):
        yield SetPartition(size, _rgs_to_blocks(rgs))


def enumerate_partitions_recursive(size: int, *, cap: int = PARTITION_SIZE_CAP) -> Iterator[SetPartition]:
    """Independent generator: insert each node into an existing block or a new one."""
    if size < 1:
        raise UsageError("diagram size must be positive")
    if size > cap:
        raise SizeLimit(f"partition enumeration capped at size {cap}")

    def rec(m: int) -> Iterator[list[list[int]]]:
        if m == 0:
            yield []
            return
        for blocks in rec(m - 1):
            for k in range(len(blocks)):
                yield blocks[:k] + [blocks[k] + [m - 1]] + blocks[k + 1 :]
            yield blocks + [[m - 1]]

    for blocks in rec(2 * size):
        yield SetPartition(size, canonical_blocks(blocks))


def stirling2(m: int, k: int) -> int:
    row = [1] + [0] * k
    for i in range(1, m + 1):
        new = [0] * (k + 1)
        for j in range(1, min(i, k) + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row[k]


def count_diagrams(n: int, order: int) -> int:
    """Σ over partitions of 2n nodes of Π_blocks |G|^(|B|-1) = Σ_k S(2n,k)·|G|^(2n-k)."""
    return sum(stirling2(2 * n, k) * order ** (2 * n - k) for k in range(1, 2 * n + 1))


def enumerate_diagrams(n: int, group: FiniteGroup, *, cap: int = DIAGRAM_COUNT_CAP) -> Iterator[ColouredDiagram]:
    total = count_diagrams(n, group.order)
    if total > cap:
        raise SizeLimit(f"P_{n} over a group of order {group.order} has {total} diagrams (cap {cap})")
    e = group.identity
    elems = range(group.order)
    for part in enumerate_partitions(n):
        choices = [itertools.product(elems, repeat=len(b) - 1) for b in part.blocks]
        for cols in itertools.product(*choices):
            yield ColouredDiagram(n, part.blocks, tuple((e,) + c for c in cols))


# ---------------------------------------------------------------- composition


class CompositionOutcome(NamedTuple):
    result: ColouredDiagram | None  # None means zero (colour mismatch)
    internal_components: int | None


def compose(d1: ColouredDiagram, d2: ColouredDiagram, group: FiniteGroup) -> CompositionOutcome:
    """Glue d1's right face to d2's left face.

    Nodes of the glued picture: 0..n-1 are d1's left face, n..2n-1 the middle
    layer and 2n..3n-1 d2's right face. A potential is propagated through
    both diagrams' colour edges; a clash means the colourings do not extend
    and the outcome is zero.
    """
    n = d1.n
    if d2.n != n:
        raise SizeMismatch(f"cannot compose sizes {d1.n} and {d2.n}")
    mul, inv = group.mul, group.inverse
    size = 3 * n
    adj: list[list[tuple[int, int]]] = [[] for _ in range(size)]
    for shift, d in ((0, d1), (n, d2)):
        for b, c in zip(d.blocks, d.colours):
            base = b[0] + shift
            for x, col in zip(b[1:], c[1:]):
                x += shift
                adj[base].append((x, col))
                adj[x].append((base, inv[col]))

    pot = [-1] * size
    comp = [-1] * size
    components: list[list[int]] = []
    for start in range(size):
        if comp[start] >= 0:
            continue
        cid = len(components)
        members = [start]
        comp[start] = cid
        pot[start] = group.identity
        stack = [start]
        while stack:
            u = stack.pop()
            pu = pot[u]
            for v, col in adj[u]:
                want = mul[pu][col]
                if comp[v] < 0:
                    comp[v] = cid
                    pot[v] = want
                    members.append(v)
                    stack.append(v)
                elif pot[v] != want:
                    return CompositionOutcome(None, None)
        components.append(members)

    internal = 0
    items = []
    for members in components:
        outer = sorted(x for x in members if x < n or x >= 2 * n)
        if not outer:
            internal += 1
            continue
        base_inv = inv[pot[outer[0]]]
        items.append(
            (
                tuple(x if x < n else x - n for x in outer),
                tuple(mul[base_inv][pot[x]] for x in outer),
            )
        )
    items.sort()
    d = ColouredDiagram(n, tuple(b for b, _ in items), tuple(c for _, c in items))
    return CompositionOutcome(d, internal)


# ---------------------------------------------------------------- special diagrams


def identity_diagram(n: int, group: FiniteGroup | None = None) -> ColouredDiagram:
    if n < 1:
        raise UsageError("n must be positive")
    e = group.identity if group is not None else 0
    return ColouredDiagram(n, tuple((i, n + i) for i in range(n)), tuple((e, e) for _ in range(n)))


def permutation_diagram(sigma: Sequence[int], labels: Sequence[int], group: FiniteGroup | None = None) -> ColouredDiagram:
    """Blocks {i, σ(i)'} with γ(i, σ(i)') = labels[i]; σ is 0-based one-line notation."""
    n = len(sigma)
    if sorted(sigma) != list(range(n)):
        raise UsageError(f"{sigma} is not a permutation")
    if len(labels) != n:
        raise UsageError("need one label per strand")
    e = group.identity if group is not None else 0
    return ColouredDiagram(
        n, tuple((i, n + sigma[i]) for i in range(n)), tuple((e, labels[i]) for i in range(n))
    )


def propagating_count(d: ColouredDiagram) -> int:
    return sum(1 for b in d.blocks if b[0] < d.n <= b[-1])


def is_permutation(d: ColouredDiagram) -> bool:
    return len(d.blocks) == d.n and all(len(b) == 2 and b[0] < d.n <= b[1] for b in d.blocks)


def gamma(d: ColouredDiagram, x: NodeId, y: NodeId, group: FiniteGroup) -> int | None:
    """γ(x, y), or ``None`` when x and y lie in different blocks."""
    cx, cy = x.code(d.n), y.code(d.n)
    for b, c in zip(d.blocks, d.colours):
        if cx in b:
            if cy not in b:
                return None
            return group.mul[group.inverse[c[b.index(cx)]]][c[b.index(cy)]]
    raise BadIndex(x)


def gamma_codes(d: ColouredDiagram, x: int, y: int, group: FiniteGroup) -> int | None:
    for b, c in zip(d.blocks, d.colours):
        if x in b:
            if y not in b:
                return None
            return group.mul[group.inverse[c[b.index(x)]]][c[b.index(y)]]
    raise BadIndex(x)


def _check_indices(n: int, *idx: int) -> None:
    for i in idx:
        if not 1 <= i <= n:
            raise BadIndex(f"index {i} not in 1..{n}")


def mu(n: int, a: int, b: int, group: FiniteGroup | None = None) -> ColouredDiagram:
    """Blocks {a'}, {a, b, b'} and {i, i'} otherwise; trivial colouring."""
    _check_indices(n, a, b)
    if a == b:
        raise BadIndex("mu needs a != b")
    blocks = [(n + a - 1,), (a - 1, b - 1, n + b - 1)]
    blocks += [(i - 1, n + i - 1) for i in range(1, n + 1) if i not in (a, b)]
    return make_diagram(n, blocks, group=group)


def nu(n: int, a: int, b: int, h: int, group: FiniteGroup) -> ColouredDiagram:
    """Block {a, b, a', b'} with γ(a, b) = γ(a', b') = h and γ(a, a') = γ(b, b') = 1;
    {i, i'} otherwise."""
    _check_indices(n, a, b)
    if not a < b:
        raise BadIndex("nu needs a < b")
    e = group.identity
    blocks = [(a - 1, b - 1, n + a - 1, n + b - 1)]
    colours = [(e, h, e, h)]
    for i in range(1, n + 1):
        if i not in (a, b):
            blocks.append((i - 1, n + i - 1))
            colours.append((e, e))
    return make_diagram(n, blocks, colours, group)


def include(d: ColouredDiagram, group: FiniteGroup | None = None) -> ColouredDiagram:
    """P_n → P_{n+1}: add the trivially coloured block {n+1, (n+1)'}."""
    n = d.n
    e = group.identity if group is not None else 0
    blocks = [tuple(x if x < n else x + 1 for x in b) for b in d.blocks]
    colours = list(d.colours)
    blocks.append((n, 2 * n + 1))
    colours.append((e, e))
    items = sorted(zip(blocks, colours))
    return ColouredDiagram(n + 1, tuple(b for b, _ in items), tuple(c for _, c in items))


def canonical(d: ColouredDiagram, group: FiniteGroup) -> ColouredDiagram:
    pots = [list(c) for c in d.colours]
    return make_diagram(d.n, d.blocks, pots, group)


def gamma_axioms_hold(d: ColouredDiagram, group: FiniteGroup) -> bool:
    mul, inv = group.mul, group.inverse
    for b in d.blocks:
        for x in b:
            if gamma_codes(d, x, x, group) != group.identity:
                return False
            for y in b:
                gxy = gamma_codes(d, x, y, group)
                if gxy != inv[gamma_codes(d, y, x, group)]:
                    return False
                for z in b:
                    if gamma_codes(d, x, z, group) != mul[gxy][gamma_codes(d, y, z, group)]:
                        return False
    return True


# ---------------------------------------------------------------- JSON


def diagram_to_json(d: ColouredDiagram, group: FiniteGroup) -> dict:
    return {
        "n": d.n,
        "blocks": [
            {
                "nodes": [list(NodeId.decode(x, d.n)) for x in b],
                "colours": [group.names[c] for c in cols],
            }
            for b, cols in zip(d.blocks, d.colours)
        ],
    }


def diagram_from_json(data: dict, group: FiniteGroup) -> ColouredDiagram:
    n = int(data["n"])
    blocks, colours = [], []
    for blk in data["blocks"]:
        codes = [NodeId(side, int(i)).code(n) for side, i in blk["nodes"]]
        cols = [group.index(name) for name in blk["colours"]]
        if len(codes) != len(cols):
            raise UsageError("each node needs a colour")
        if codes != sorted(codes):
            raise UsageError("nodes must be listed in canonical order")
        if cols[0] != group.identity:
            raise UsageError("the first colour of a block must be the identity")
        blocks.append(tuple(codes))
        colours.append(tuple(cols))
    d = make_diagram(n, blocks, colours, group)
    return d


def dumps(d: ColouredDiagram, group: FiniteGroup) -> str:
    return json.dumps(diagram_to_json(d, group), sort_keys=True)
