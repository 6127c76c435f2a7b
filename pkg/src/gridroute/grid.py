"""Lattice topologies, addressing and convex windows.

Three plane lattices are supported:

* square: nodes ``(u, v)``, arcs ``(±1, 0)`` (horizontal) and ``(0, ±1)``
  (vertical).
* triangular: nodes ``(u, v)`` are coefficients of the unit vectors ``i`` and
  ``j``; ``k = -i - j``, so the six neighbours are ``±(1, 0)`` (class i),
  ``±(0, 1)`` (class j) and ``±(1, 1)`` (class k, ``+k`` being ``(-1, -1)``).
* hexagonal: a two-site honeycomb. The A-site ``(u, v, 0)`` is joined to the
  B-sites ``(u, v, 1)`` (class e1), ``(u - 1, v, 1)`` (e2) and ``(u, v - 1, 1)``
  (e3).

Hexagonal addresses count edge steps along the three zigzag chain classes.
Chain c1 alternates e2/e3 edges, c2 alternates e1/e3 and c3 alternates
e1/e2. Chain orientations are cyclic (their translation vectors sum to
zero), which makes every arc positive for one of its two chains and negative
for the other.
"""

from __future__ import annotations

import enum
from collections import deque
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional


class GridKind(str, enum.Enum):
    SQUARE = "square"
    TRIANGULAR = "tri"
    HEXAGONAL = "hex"

    @classmethod
    def parse(cls, text: str) -> "GridKind":
        aliases = {
            "square": cls.SQUARE, "sq": cls.SQUARE,
            "tri": cls.TRIANGULAR, "triangular": cls.TRIANGULAR,
            "hex": cls.HEXAGONAL, "hexagonal": cls.HEXAGONAL,
        }
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown grid kind {text!r}") from None


class DuplexMode(str, enum.Enum):
    FULL = "full"
    HALF = "half"


class EdgeClass(str, enum.Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    I = "i"
    J = "j"
    K = "k"
    E1 = "e1"
    E2 = "e2"
    E3 = "e3"


class Node(NamedTuple):
    u: int
    v: int
    site: int = 0

    def format(self, kind: GridKind) -> str:
        if kind is GridKind.HEXAGONAL:
            return f"{kind.value}:{self.u},{self.v},{self.site}"
        return f"{kind.value}:{self.u},{self.v}"


class RelativeAddress(NamedTuple):
    a: int
    b: int
    c: int = 0

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0


Arc = tuple  # (Node, Node)

ZERO = RelativeAddress(0, 0, 0)

_SQUARE_STEPS = (
    ((1, 0), EdgeClass.HORIZONTAL), ((-1, 0), EdgeClass.HORIZONTAL),
    ((0, 1), EdgeClass.VERTICAL), ((0, -1), EdgeClass.VERTICAL),
)
_TRI_STEPS = (
    ((1, 0), EdgeClass.I), ((-1, 0), EdgeClass.I),
    ((0, 1), EdgeClass.J), ((0, -1), EdgeClass.J),
    ((-1, -1), EdgeClass.K), ((1, 1), EdgeClass.K),
)
# unit move of the triangular axes i, j, k
TRI_AXIS = ((1, 0), (0, 1), (-1, -1))

# chain class -> the two edge classes it alternates
CHAIN_EDGES = {
    1: (EdgeClass.E2, EdgeClass.E3),
    2: (EdgeClass.E1, EdgeClass.E3),
    3: (EdgeClass.E1, EdgeClass.E2),
}


def parse_node(text: str) -> tuple[GridKind, Node]:
    """Parse ``"kind:u,v[,site]"``."""
    try:
        prefix, coords = text.strip().split(":", 1)
        kind = GridKind.parse(prefix)
        parts = [int(p) for p in coords.split(",")]
    except ValueError:
        raise ValueError(f"malformed node {text!r}") from None
    if kind is GridKind.HEXAGONAL:
        if len(parts) != 3 or parts[2] not in (0, 1):
            raise ValueError(f"hex node needs u,v,site with site in {{0,1}}: {text!r}")
        return kind, Node(*parts)
    if len(parts) != 2:
        raise ValueError(f"{kind.value} node needs u,v: {text!r}")
    return kind, Node(parts[0], parts[1], 0)


# ---------------------------------------------------------------------------
# infinite lattices


def lattice_arcs(kind: GridKind, n: Node) -> list[tuple[Node, EdgeClass]]:
    """Neighbours of ``n`` on the infinite lattice with their edge classes."""
    if kind is GridKind.HEXAGONAL:
        u, v, s = n
        if s == 0:
            return [(Node(u, v, 1), EdgeClass.E1), (Node(u - 1, v, 1), EdgeClass.E2),
                    (Node(u, v - 1, 1), EdgeClass.E3)]
        return [(Node(u, v, 0), EdgeClass.E1), (Node(u + 1, v, 0), EdgeClass.E2),
                (Node(u, v + 1, 0), EdgeClass.E3)]
    steps = _SQUARE_STEPS if kind is GridKind.SQUARE else _TRI_STEPS
    return [(Node(n.u + du, n.v + dv, 0), cls) for (du, dv), cls in steps]


def edge_class(kind: GridKind, a: Node, b: Node) -> EdgeClass:
    for m, cls in lattice_arcs(kind, a):
        if m == b:
            return cls
    raise ValueError(f"{a} and {b} are not adjacent on the {kind.value} lattice")


def is_lattice_arc(kind: GridKind, a: Node, b: Node) -> bool:
    return any(m == b for m, _ in lattice_arcs(kind, a))


def is_positive_arc(a: Node, b: Node) -> bool:
    """Orientation used for half-duplex parity: (u, v, site) increases."""
    return tuple(b) > tuple(a)


# hexagonal chains


def chain_id(n: Node, chain: int) -> int:
    u, v, s = n
    if chain == 1:
        return u + v + s
    if chain == 2:
        return u
    return v


def chain_pos(n: Node, chain: int) -> int:
    u, v, s = n
    if chain == 1:
        return -2 * v - s
    if chain == 2:
        return 2 * v + s
    return -2 * u - s


def _chain_step_search(n: Node, chain: int, sign: int) -> Node:
    target = chain_pos(n, chain) + sign
    cid = chain_id(n, chain)
    for m, _ in lattice_arcs(GridKind.HEXAGONAL, n):
        if chain_id(m, chain) == cid and chain_pos(m, chain) == target:
            return m
    raise AssertionError("chain layout broken")  # unreachable for valid nodes


# the layout is translation invariant, so one neighbour search per site suffices
_CHAIN_DELTA = {
    (s, ch, sg): tuple(_chain_step_search(Node(0, 0, s), ch, sg))
    for s in (0, 1) for ch in (1, 2, 3) for sg in (1, -1)
}


def chain_step(n: Node, chain: int, sign: int) -> Node:
    """Next node along ``chain`` through ``n`` in direction ``sign``."""
    du, dv, site = _CHAIN_DELTA[n.site, chain, sign]
    return Node(n.u + du, n.v + dv, site)


def chain_intersection(x: int, xid: int, y: int, yid: int) -> tuple[Node, Node]:
    """The A and B endpoints of the unique edge shared by two chains."""
    ids = {x: xid, y: yid}
    if 2 in ids and 3 in ids:
        u, v = ids[2], ids[3]
        return Node(u, v, 0), Node(u, v, 1)
    if 2 in ids:  # classes 1 and 2
        u = ids[2]
        return Node(u, ids[1] - u, 0), Node(u, ids[1] - 1 - u, 1)
    v = ids[3]  # classes 1 and 3
    return Node(ids[1] - v, v, 0), Node(ids[1] - 1 - v, v, 1)


def arc_chains(a: Node, b: Node) -> dict[int, int]:
    """Map chain class -> direction (+1/-1) of the arc a->b along that chain."""
    out = {}
    for ch in (1, 2, 3):
        if chain_id(a, ch) == chain_id(b, ch):
            out[ch] = chain_pos(b, ch) - chain_pos(a, ch)
    return out


# ---------------------------------------------------------------------------
# addresses


def _tri_canonical(a: int, b: int, c: int) -> RelativeAddress:
    m = sorted((a, b, c))[1]
    return RelativeAddress(a - m, b - m, c - m)


def hex_walk(start: Node, addr: RelativeAddress) -> list[Node]:
    """Nodes visited when following ``addr`` from ``start``.

    Negative components are walked first, then positive ones, each group in
    chain-class order.
    """
    comps = list(addr)
    order = [ch for ch in (1, 2, 3) if comps[ch - 1] < 0] + \
            [ch for ch in (1, 2, 3) if comps[ch - 1] > 0]
    path = [start]
    n = start
    for ch in order:
        k = comps[ch - 1]
        sign = 1 if k > 0 else -1
        for _ in range(abs(k)):
            n = chain_step(n, ch, sign)
            path.append(n)
    return path


def _hex_candidates(s: Node, d: Node) -> Iterator[tuple[int, ...]]:
    for ch in (1, 2, 3):
        if chain_id(s, ch) == chain_id(d, ch):
            comp = [0, 0, 0]
            comp[ch - 1] = chain_pos(d, ch) - chain_pos(s, ch)
            yield tuple(comp)
    for x in (1, 2, 3):
        for y in (1, 2, 3):
            if x == y:
                continue
            for m in chain_intersection(x, chain_id(s, x), y, chain_id(d, y)):
                comp = [0, 0, 0]
                comp[x - 1] = chain_pos(m, x) - chain_pos(s, x)
                comp[y - 1] = chain_pos(d, y) - chain_pos(m, y)
                # walked negative-first, so only (x<0, y>0) keeps the x-then-y order
                if comp[x - 1] < 0 < comp[y - 1] or comp[x - 1] == 0 or comp[y - 1] == 0:
                    yield tuple(comp)


@lru_cache(maxsize=1 << 16)
def hex_relative_address(s: Node, d: Node) -> RelativeAddress:
    """Shortest chain decomposition from ``s`` to ``d``.

    Among minimum-length decompositions that walk their negative component
    first, the one with fewest non-zero components wins; a remaining bent
    edge is attributed to the smaller chain class.
    """
    if s == d:
        return ZERO
    best = None
    for comp in _hex_candidates(s, d):
        if hex_walk(s, RelativeAddress(*comp))[-1] != d:
            continue
        key = (sum(abs(x) for x in comp), sum(1 for x in comp if x),
               -abs(comp[0]), -abs(comp[1]), -abs(comp[2]), comp)
        if best is None or key < best:
            best = key
    assert best is not None
    return RelativeAddress(*best[-1])


_HEX_ORIGIN = Node(0, 0, 0)


def canonical_address(a: int, b: int, c: int, kind: GridKind) -> RelativeAddress:
    """Shortest-path form of the address ``(a, b, c)``.

    Triangular addresses are equivalent under adding the same integer to all
    components, and the median is subtracted. Hexagonal chain counts depend
    on the parity of the start node, so they are resolved from the A-site
    origin: the address is walked there and re-derived.
    """
    if kind is GridKind.TRIANGULAR:
        return _tri_canonical(a, b, c)
    if kind is GridKind.HEXAGONAL:
        end = hex_walk(_HEX_ORIGIN, RelativeAddress(a, b, c))[-1]
        return hex_relative_address(_HEX_ORIGIN, end)
    raise ValueError("canonical_address is defined for triangular and hexagonal grids")


def tri_distance(addr: RelativeAddress) -> int:
    a, b, c = addr
    return min(abs(a - c) + abs(b - c), abs(a - b) + abs(b - c), abs(a - b) + abs(a - c))


def relative_address(kind: GridKind, s: Node, d: Node) -> RelativeAddress:
    if kind is GridKind.SQUARE:
        return RelativeAddress(d.u - s.u, d.v - s.v, 0)
    if kind is GridKind.TRIANGULAR:
        return _tri_canonical(d.u - s.u, d.v - s.v, 0)
    return hex_relative_address(s, d)


def address_length(kind: GridKind, addr: RelativeAddress) -> int:
    if kind is GridKind.TRIANGULAR:
        return tri_distance(addr)
    return abs(addr.a) + abs(addr.b) + abs(addr.c)


def hex_to_brick(n: Node) -> tuple[int, int]:
    """Brick-wall coordinates: horizontal rows, vertical edge (x,y)-(x,y+1) iff x+y is even."""
    return 2 * n.u + n.v + n.site, -n.v


def hex_distance(s: Node, d: Node) -> int:
    """Honeycomb distance from brick-wall coordinates.

    With dy <= dx the rows absorb every vertical step. Otherwise the walk
    zigzags: 2*dy steps, one fewer for each endpoint whose vertical edge
    already points towards the other one, one more if neither does.
    """
    sx, sy = hex_to_brick(s)
    x, y = hex_to_brick(d)
    dx, dy = abs(x - sx), abs(y - sy)
    if dy <= dx:
        return dx + dy
    up = y > sy
    s_toward = ((sx + sy) % 2 == 0) == up
    d_toward = ((x + y) % 2 == 0) != up
    return 2 * dy + 1 - s_toward - d_toward


def distance(kind: GridKind, s: Node, d: Node) -> int:
    """Closed-form hop distance on the infinite lattice."""
    if kind is GridKind.HEXAGONAL:
        return hex_distance(s, d)
    return address_length(kind, relative_address(kind, s, d))


@lru_cache(maxsize=1 << 16)
def move_node(kind: GridKind, n: Node, component: int, sign: int) -> Node:
    """Neighbour of ``n`` one hop along ``component`` in direction ``sign``."""
    if kind is GridKind.HEXAGONAL:
        return chain_step(n, component + 1, sign)
    du, dv = ((1, 0), (0, 1))[component] if kind is GridKind.SQUARE else TRI_AXIS[component]
    return Node(n.u + sign * du, n.v + sign * dv, 0)


def address_step(kind: GridKind, n: Node, addr: RelativeAddress,
                 component: int, sign: int) -> tuple[Node, RelativeAddress]:
    """Move one hop along ``component`` in direction ``sign``."""
    comps = list(addr)
    comps[component] -= sign
    return move_node(kind, n, component, sign), RelativeAddress(*comps)


@lru_cache(maxsize=1 << 16)
def canonical_move(kind: GridKind, addr: RelativeAddress) -> Optional[tuple[int, int]]:
    """(component, sign) of the next hop on the canonical path, or None at the target.

    Square paths go horizontally then vertically; triangular and hexagonal
    paths exhaust the negative component before the positive one.
    """
    comps = list(addr)
    if kind is GridKind.SQUARE:
        for i in (0, 1):
            if comps[i]:
                return i, (1 if comps[i] > 0 else -1)
        return None
    for i, x in enumerate(comps):
        if x < 0:
            return i, -1
    for i, x in enumerate(comps):
        if x > 0:
            return i, 1
    return None


def canonical_route(kind: GridKind, s: Node, d: Node) -> list[Node]:
    """Node sequence of the canonical geodesic from ``s`` to ``d``."""
    addr = relative_address(kind, s, d)
    path = [s]
    n = s
    while (mv := canonical_move(kind, addr)) is not None:
        n, addr = address_step(kind, n, addr, *mv)
        path.append(n)
    assert n == d
    return path


# ---------------------------------------------------------------------------
# honeycomb inside the triangular lattice

def hex_to_tri(n: Node) -> tuple[int, int]:
    """Embed a honeycomb node into triangular coordinates (class (p+q)%3 != 0)."""
    u, v, s = n
    return 1 + u + 2 * v + s, v - u


def tri_to_hex(p: int, q: int) -> Optional[Node]:
    r = (p + q) % 3
    if r == 0:
        return None
    if r == 2:
        p -= 1
    v = (p + q - 1) // 3
    return Node(v - q, v, 1 if r == 2 else 0)


# ---------------------------------------------------------------------------
# windows


@dataclass(frozen=True)
class ConvexSubgrid:
    """A finite window of a lattice, or the whole lattice when ``nodes`` is None."""

    kind: GridKind
    nodes: Optional[frozenset] = None
    extent: str = "infinite"
    _order: tuple = field(default=(), compare=False, repr=False)

    def __contains__(self, n) -> bool:
        if self.nodes is None:
            return isinstance(n, tuple) and (self.kind is GridKind.HEXAGONAL or n[2] == 0)
        return n in self.nodes

    def __len__(self) -> int:
        if self.nodes is None:
            raise TypeError("infinite grid has no size")
        return len(self.nodes)

    def __iter__(self) -> Iterator[Node]:
        if self.nodes is None:
            raise TypeError("cannot iterate an infinite grid")
        return iter(self._order or sorted(self.nodes))

    @property
    def finite(self) -> bool:
        return self.nodes is not None

    def sorted_nodes(self) -> list[Node]:
        return list(self)


def make_subgrid(kind: GridKind, nodes: Iterable[Node], extent: str = "nodes") -> ConvexSubgrid:
    ns = frozenset(Node(*n) for n in nodes)
    return ConvexSubgrid(kind, ns, extent, tuple(sorted(ns)))


def infinite(kind: GridKind) -> ConvexSubgrid:
    return ConvexSubgrid(kind)


def rectangle(w: int, h: int, origin: tuple[int, int] = (0, 0)) -> ConvexSubgrid:
    ou, ov = origin
    nodes = [Node(ou + x, ov + y) for x in range(w) for y in range(h)]
    return make_subgrid(GridKind.SQUARE, nodes, f"rect:{w},{h}@{ou},{ov}")


def rhombus(a: int, b: int, origin: tuple[int, int] = (0, 0)) -> ConvexSubgrid:
    """Triangular rhombus ``{o + x i + y j : 0 <= x < a, 0 <= y < b}``."""
    ou, ov = origin
    nodes = [Node(ou + x, ov + y) for x in range(a) for y in range(b)]
    return make_subgrid(GridKind.TRIANGULAR, nodes, f"rhombus:{a},{b}@{ou},{ov}")


def hex_rectangle_nodes(a: int, b: int, v: Node = Node(0, 0, 0)) -> set[Node]:
    """Honeycomb nodes of ``{v + x i + y j + z k : 0<=x<a, -z<y<b, 0<=z<b}``.

    The set is taken in triangular coordinates, with the honeycomb embedded
    as the triangular points whose colour ``(p + q) % 3`` is non-zero.
    """
    vp, vq = hex_to_tri(v)
    out = set()
    for x in range(a):
        for z in range(b):
            for y in range(-z + 1, b):
                n = tri_to_hex(vp + x - z, vq + y - z)
                if n is not None:
                    out.add(n)
    return out


def hex_rectangle(a: int, b: int, v: Node = Node(0, 0, 0)) -> ConvexSubgrid:
    nodes = convex_closure(GridKind.HEXAGONAL, hex_rectangle_nodes(a, b, v))
    return make_subgrid(GridKind.HEXAGONAL, nodes, f"hexrect:{a},{b}@{v.u},{v.v},{v.site}")


def ball_nodes(kind: GridKind, center: Node, r: int) -> set[Node]:
    seen = {center: 0}
    q = deque([center])
    while q:
        n = q.popleft()
        if seen[n] == r:
            continue
        for m, _ in lattice_arcs(kind, n):
            if m not in seen:
                seen[m] = seen[n] + 1
                q.append(m)
    return set(seen)


def ball(kind: GridKind, center: Node, r: int) -> ConvexSubgrid:
    """Convex closure of the radius-``r`` ball around ``center``."""
    nodes = convex_closure(kind, ball_nodes(kind, center, r))
    c = ",".join(str(x) for x in (center if kind is GridKind.HEXAGONAL else center[:2]))
    return make_subgrid(kind, nodes, f"ball:{r}@{c}")


def geodesic_interval(kind: GridKind, s: Node, t: Node) -> set[Node]:
    """All nodes on some shortest s-t path on the infinite lattice."""
    dt = distance(kind, s, t)
    out = {t}
    layer = {t}
    for k in range(dt, 0, -1):
        nxt = set()
        for w in layer:
            for p, _ in lattice_arcs(kind, w):
                if distance(kind, s, p) == k - 1 and distance(kind, p, t) == dt - k + 1:
                    nxt.add(p)
        out |= nxt
        layer = nxt
    return out


def _bfs_layers(kind: GridKind, s: Node, targets: set[Node]) -> dict[Node, int]:
    """BFS from ``s`` on the infinite lattice until every target is labelled."""
    dist = {s: 0}
    q = deque([s])
    missing = set(targets) - {s}
    limit = None
    while q:
        n = q.popleft()
        if limit is not None and dist[n] >= limit:
            continue
        for m, _ in lattice_arcs(kind, n):
            if m not in dist:
                dist[m] = dist[n] + 1
                q.append(m)
                if m in missing:
                    missing.discard(m)
                    if not missing:
                        limit = dist[m]
        if not missing and limit is None:
            limit = dist[n]
    return dist


def is_convex(grid: ConvexSubgrid) -> bool:
    """True iff every geodesic between members stays inside the window.

    For each source a BFS on the infinite lattice labels distances, then
    every member is checked to have all of its BFS predecessors inside the
    window: a geodesic leaving the window would need a member whose
    predecessor layer leaves it.
    """
    if not grid.finite:
        return True
    members = grid.nodes
    for s in members:
        dist = _bfs_layers(grid.kind, s, members)
        for w in members:
            dw = dist[w]
            for p, _ in lattice_arcs(grid.kind, w):
                if dist.get(p, dw + 1) == dw - 1 and p not in members:
                    return False
    return True


def convex_closure(kind: GridKind, nodes: Iterable[Node]) -> set[Node]:
    """Smallest superset closed under geodesics.

    Square windows close to their bounding box and triangular ones to the
    hexagon bounded by the ranges of u, v and u - v; the honeycomb uses the
    generic BFS fixpoint.
    """
    nodes = set(nodes)
    if not nodes or kind is GridKind.HEXAGONAL:
        return convex_closure_bfs(kind, nodes)
    us = [n.u for n in nodes]
    vs = [n.v for n in nodes]
    box = {Node(u, v) for u in range(min(us), max(us) + 1) for v in range(min(vs), max(vs) + 1)}
    if kind is GridKind.SQUARE:
        return box
    ds = [n.u - n.v for n in nodes]
    lo, hi = min(ds), max(ds)
    return {n for n in box if lo <= n.u - n.v <= hi}


def convex_closure_bfs(kind: GridKind, nodes: Iterable[Node]) -> set[Node]:
    """Geodesic closure as a fixpoint: add every neighbour of a member that is
    one step closer to another member (reference version for all lattices)."""
    cur = set(nodes)
    frontier = set(cur)
    while frontier:
        added = set()
        for w in cur:
            for p, _ in lattice_arcs(kind, w):
                if p in cur or p in added:
                    continue
                for s in cur:
                    if distance(kind, s, p) == distance(kind, s, w) - 1:
                        added.add(p)
                        break
        cur |= added
        frontier = added
    return cur


# ---------------------------------------------------------------------------
# window queries


def neighbors(grid: ConvexSubgrid, n: Node) -> list[tuple[tuple[Node, Node], EdgeClass]]:
    if n not in grid:
        raise ValueError(f"{n} is not a member of the grid")
    return [((n, m), cls) for m, cls in lattice_arcs(grid.kind, n) if m in grid]


def bfs_distance(grid: ConvexSubgrid, u: Node, v: Node) -> Optional[int]:
    """Hop distance inside the window; ``None`` when v is unreachable."""
    for n in (u, v):
        if n not in grid:
            raise ValueError(f"{n} is not a member of the grid")
    if u == v:
        return 0
    dist = {u: 0}
    q = deque([u])
    while q:
        n = q.popleft()
        for m, _ in lattice_arcs(grid.kind, n):
            if m in grid and m not in dist:
                dist[m] = dist[n] + 1
                if m == v:
                    return dist[m]
                q.append(m)
    return None


def bfs_all(grid: ConvexSubgrid, u: Node) -> dict[Node, int]:
    """Distances from ``u`` to every reachable member of a finite window."""
    dist = {u: 0}
    q = deque([u])
    while q:
        n = q.popleft()
        for m, _ in lattice_arcs(grid.kind, n):
            if m in grid and m not in dist:
                dist[m] = dist[n] + 1
                q.append(m)
    return dist
