"""Square-grid routings carried over to the triangular and hexagonal grids.

The hexagonal map works in brick-wall coordinates: the honeycomb node with
brick position (x, y) is the image of the square node (x, y). Horizontal
square edges and the vertical edges with x + y even are honeycomb edges;
a vertical edge with x + y odd is replaced by the three-edge path around
the hexagon to its right.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .engine import Trace, validate_trace
from .grid import (
    GridKind, Node, distance, hex_distance, is_lattice_arc, lattice_arcs, make_subgrid,
)
from .instances import Instance


class EmbeddingError(ValueError):
    """A trace or node lies outside the window an embedding was asked to cover."""


@dataclass(frozen=True)
class Embedding:
    name: str
    target: GridKind
    node_map: Callable[[Node], Node]
    _edge_map: Callable[[Node, Node], list]
    load: int  # how many square edges share one target edge at most
    stretch: int  # longest edge image

    source = GridKind.SQUARE

    def edge_map(self, a: Node, b: Node) -> list:
        """Target node path for the square arc a -> b (endpoints included)."""
        if not is_lattice_arc(GridKind.SQUARE, a, b):
            raise EmbeddingError(f"{a} -> {b} is not a square arc")
        return self._edge_map(a, b)

    def image_nodes(self, nodes) -> set:
        """Every target node touched by the images of the window's edges."""
        nodes = set(nodes)
        out = {self.node_map(n) for n in nodes}
        for a, b in _window_arcs(nodes):
            out.update(self.edge_map(a, b))
        return out


def _window_arcs(nodes):
    for n in nodes:
        for du, dv in ((1, 0), (0, 1), (-1, 0), (0, -1)):
            m = Node(n.u + du, n.v + dv, 0)
            if m in nodes:
                yield n, m


# ---------------------------------------------------------------------------
# square -> triangle


def _tri_node(n: Node) -> Node:
    return Node(n.u, n.v, 0)


def square2triangle() -> Embedding:
    """Identity on coordinates; the triangular diagonal is simply not used."""
    return Embedding("square2triangle", GridKind.TRIANGULAR, _tri_node,
                     lambda a, b: [_tri_node(a), _tri_node(b)], load=1, stretch=1)


# ---------------------------------------------------------------------------
# square -> hexagon


def brick_to_hex(x: int, y: int) -> Node:
    site = (x + y) % 2
    return Node((x + y - site) // 2, -y, site)


def _hex_node(n: Node) -> Node:
    return brick_to_hex(n.u, n.v)


def is_white(n: Node) -> bool:
    """White squares have an even lower-left corner and sit in the left half of a hexagon."""
    return (n.u + n.v) % 2 == 0


def _hex_edge_path(a: Node, b: Node) -> list:
    if a.v == b.v or (a.u + min(a.v, b.v)) % 2 == 0:
        return [_hex_node(a), _hex_node(b)]
    # missing vertical edge: go round the right of the hexagon
    x, lo = a.u, min(a.v, b.v)
    path = [(x, lo), (x + 1, lo), (x + 1, lo + 1), (x, lo + 1)]
    if a.v > b.v:
        path.reverse()
    return [brick_to_hex(*p) for p in path]


def square2hexagon() -> Embedding:
    return Embedding("square2hexagon", GridKind.HEXAGONAL, _hex_node, _hex_edge_path,
                     load=2, stretch=3)


def make_embedding(target) -> Embedding:
    target = GridKind.parse(target) if isinstance(target, str) else target
    if target is GridKind.TRIANGULAR:
        return square2triangle()
    if target is GridKind.HEXAGONAL:
        return square2hexagon()
    raise ValueError(f"no embedding of the square grid into {target.value}")


# ---------------------------------------------------------------------------
# checkable properties


def edge_cover_counts(emb: Embedding, nodes) -> Counter:
    """Number of undirected square edges of the window whose image uses each target edge."""
    count = Counter()
    for a, b in _window_arcs(set(nodes)):
        if a < b:
            path = emb.edge_map(a, b)
            for x, y in zip(path, path[1:]):
                count[frozenset((x, y))] += 1
    return count


def two_cover_violations(w: int, h: int, margin: int = 2) -> list:
    """Interior honeycomb edges of a w x h window not covered exactly twice.

    The square window is padded by ``margin`` on every side so that the
    edges near the border of the inspected window see all their preimages.
    """
    emb = square2hexagon()
    big = {Node(x, y) for x in range(-margin, w + margin) for y in range(-margin, h + margin)}
    count = edge_cover_counts(emb, big)
    inner = {_hex_node(Node(x, y)) for x in range(w) for y in range(h)}
    bad = []
    for n in sorted(inner):
        for x, y in ((n, m) for m in _hex_neighbours(n) if m in inner and n < m):
            c = count[frozenset((x, y))]
            if c != 2:
                bad.append(((x, y), c))
    return bad


def _hex_neighbours(n: Node):
    return [m for m, _ in lattice_arcs(GridKind.HEXAGONAL, n)]


def distance_factor(emb: Embedding, nodes) -> Fraction:
    """Largest dist_square / dist_target over pairs of the window."""
    nodes = sorted(nodes)
    worst = Fraction(0)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            ds = abs(a.u - b.u) + abs(a.v - b.v)
            dt = distance(emb.target, emb.node_map(a), emb.node_map(b))
            worst = max(worst, Fraction(ds, dt))
    return worst


def hex_distance_relation(samples: int = 50, radius: int = 8, seed: int = 0) -> list:
    """Sample pairs and return those violating dist_hex = 2 dist_square + 1.

    Each entry is (a, b, dist_square, dist_hex).
    """
    rng = random.Random(seed)
    out = []
    for _ in range(samples):
        a = Node(rng.randint(-radius, radius), rng.randint(-radius, radius))
        b = Node(rng.randint(-radius, radius), rng.randint(-radius, radius))
        ds = abs(a.u - b.u) + abs(a.v - b.v)
        dh = hex_distance(_hex_node(a), _hex_node(b))
        if dh != 2 * ds + 1:
            out.append((a, b, ds, dh))
    return out


# ---------------------------------------------------------------------------
# trace transport


def transport_instance(emb: Embedding, instance: Instance) -> Instance:
    if instance.kind is not GridKind.SQUARE:
        raise EmbeddingError("only square instances can be transported")
    if not instance.grid.finite:
        raise EmbeddingError("transport needs a finite square window")
    nodes = emb.image_nodes(instance.grid)
    grid = make_subgrid(emb.target, nodes)
    demands = [(emb.node_map(s), emb.node_map(d)) for s, d in instance.demands]
    return Instance(grid, demands, instance.limits, instance.duplex)


def transport_routing(emb: Embedding, instance: Instance, trace: Trace):
    """Carry a square trace over; returns (target instance, target trace).

    Triangular: one target step per square step. Hexagonal: three substeps
    per square step. Vertical single edges go in substep 0, horizontal ones
    in substep 1, and a three-edge path uses substeps 0, 1 and 2. Trailing
    empty substeps of the last step are dropped.
    """
    target = transport_instance(emb, instance)
    if not trace.steps:
        return target, Trace(emb.target, [])
    window = instance.grid
    per = 1 if emb.target is GridKind.TRIANGULAR else 3
    steps = []
    for t, moves in enumerate(trace.steps, 1):
        sub = [[] for _ in range(per)]
        for pid, a, b in moves:
            if a not in window or b not in window:
                raise EmbeddingError(f"step {t}: packet {pid} leaves the window")
            path = emb.edge_map(a, b)
            if len(path) == 2:
                slot = 0 if per == 1 or a.u == b.u else 1
                sub[slot].append((pid, path[0], path[1]))
            else:
                for i, (x, y) in enumerate(zip(path, path[1:])):
                    sub[i].append((pid, x, y))
        steps.extend(sorted(s) for s in sub)
    while steps and not steps[-1]:
        steps.pop()
    return target, Trace(emb.target, steps)


def check_transport(emb: Embedding, instance: Instance, trace: Trace):
    """Transport and validate with the capacity relaxed to the embedding load.

    Returns (target instance, target trace, violations).
    """
    target, out = transport_routing(emb, instance, trace)
    violations = validate_trace(target, None, out, shortest_path=False, capacity=emb.load)
    return target, out, violations

