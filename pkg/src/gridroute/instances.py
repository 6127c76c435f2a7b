"""Routing instances: model, text format, random and adversarial generators."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from math import comb, isqrt
from typing import Optional

import networkx as nx

from .grid import (
    ConvexSubgrid, DuplexMode, GridKind, Node, ball, ball_nodes, chain_id, chain_pos,
    chain_step, distance, hex_rectangle_nodes, infinite, lattice_arcs, make_subgrid,
    parse_node, rectangle, rhombus, TRI_AXIS,
)


class InstanceError(ValueError):
    """Invalid instance; ``line`` is set when raised while parsing."""

    def __init__(self, msg: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


class ConstructionError(RuntimeError):
    """A generator's feasibility oracle failed; ``deficient`` is a Hall violator."""

    def __init__(self, msg: str, deficient=()):
        self.deficient = list(deficient)
        super().__init__(msg)


@dataclass
class Instance:
    grid: ConvexSubgrid
    demands: list = field(default_factory=list)
    limits: tuple = (1, 1)
    duplex: DuplexMode = DuplexMode.FULL

    @property
    def kind(self) -> GridKind:
        return self.grid.kind

    def validate(self) -> None:
        l, k = self.limits
        if l < 1 or k < 1:
            raise InstanceError(f"limits must be positive, got {self.limits}")
        sends = Counter()
        recvs = Counter()
        for s, d in self.demands:
            for n in (s, d):
                if n not in self.grid:
                    raise InstanceError(f"node {n.format(self.kind)} is outside the grid")
            sends[s] += 1
            recvs[d] += 1
            if sends[s] > l:
                raise InstanceError(f"node {s.format(self.kind)} sends more than l={l} packets")
            if recvs[d] > k:
                raise InstanceError(f"node {d.format(self.kind)} receives more than k={k} packets")

    def lmax(self) -> int:
        return max((distance(self.kind, s, d) for s, d in self.demands), default=0)

    def with_demands(self, demands, limits=None) -> "Instance":
        return Instance(self.grid, list(demands), limits or self.limits, self.duplex)


@dataclass
class Certificate:
    """A claimed congestion or bound value together with the cut it is measured on."""

    claim: int
    kind: str  # "arc-congestion", "edge-congestion" or "bisection"
    cut: list = field(default_factory=list)  # arcs (Node, Node)
    note: str = ""


# ---------------------------------------------------------------------------
# text format


def _extent_grid(kind: GridKind, extent: str, node_lines: list) -> ConvexSubgrid:
    name, _, rest = extent.partition(":")
    if name == "infinite":
        return infinite(kind)
    if name == "nodes":
        return make_subgrid(kind, node_lines, "nodes")
    dims, _, at = rest.partition("@")
    nums = [int(x) for x in dims.split(",")]
    origin = [int(x) for x in at.split(",")] if at else []
    if name == "rect" and kind is GridKind.SQUARE:
        return rectangle(nums[0], nums[1], tuple(origin or (0, 0)))
    if name == "rhombus" and kind is GridKind.TRIANGULAR:
        return rhombus(nums[0], nums[1], tuple(origin or (0, 0)))
    if name == "ball":
        center = Node(*origin) if origin else Node(0, 0, 0)
        return ball(kind, center, nums[0])
    if name == "hexrect" and kind is GridKind.HEXAGONAL:
        from .grid import hex_rectangle
        return hex_rectangle(nums[0], nums[1], Node(*origin) if origin else Node(0, 0, 0))
    raise ValueError(f"unknown extent {extent!r} for {kind.value} grid")


def serialize_instance(inst: Instance) -> str:
    kind = inst.kind
    lines = [f"grid {kind.value} {inst.duplex.value} {inst.grid.extent}",
             f"limits {inst.limits[0]} {inst.limits[1]}"]
    if inst.grid.extent == "nodes":
        lines += [f"node {n.format(kind)}" for n in inst.grid]
    lines += [f"{s.format(kind)} -> {d.format(kind)}" for s, d in inst.demands]
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> Instance:
    header = None
    limits = (1, 1)
    node_lines: list = []
    demands: list = []
    demand_lines: list = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if header is None:
                parts = line.split()
                if len(parts) != 4 or parts[0] != "grid":
                    raise InstanceError("expected header 'grid <kind> <duplex> <extent>'", lineno)
                kind = GridKind.parse(parts[1])
                duplex = DuplexMode(parts[2])
                header = (kind, duplex, parts[3])
            elif line.startswith("limits"):
                parts = line.split()
                if len(parts) != 3:
                    raise InstanceError("expected 'limits <l> <k>'", lineno)
                limits = (int(parts[1]), int(parts[2]))
            elif line.startswith("node "):
                nk, n = parse_node(line[5:])
                node_lines.append(n)
            else:
                src, arrow, dst = line.partition("->")
                if not arrow:
                    raise InstanceError(f"malformed demand {line!r}", lineno)
                ks, s = parse_node(src)
                kd, d = parse_node(dst)
                if ks is not header[0] or kd is not header[0]:
                    raise InstanceError("node kind does not match grid kind", lineno)
                demands.append((s, d))
                demand_lines.append(lineno)
        except InstanceError:
            raise
        except ValueError as exc:
            raise InstanceError(str(exc), lineno) from None
    if header is None:
        raise InstanceError("missing grid header")
    kind, duplex, extent = header
    grid = _extent_grid(kind, extent, node_lines)
    inst = Instance(grid, demands, limits, duplex)
    # re-run validation incrementally to attach the offending line
    for i in range(len(demands)):
        try:
            inst.with_demands(demands[: i + 1]).validate()
        except InstanceError as exc:
            raise InstanceError(str(exc), demand_lines[i]) from None
    return inst


def serialize_certificate(cert: Certificate, kind: GridKind) -> str:
    lines = [f"certificate {cert.kind} {cert.claim}"]
    if cert.note:
        lines.append(f"note {cert.note}")
    lines += [f"cut {a.format(kind)} -> {b.format(kind)}" for a, b in cert.cut]
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Certificate:
    cert = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        try:
            if word == "certificate":
                ckind, claim = rest.split()
                cert = Certificate(int(claim), ckind)
            elif cert is None:
                raise InstanceError("expected 'certificate <kind> <claim>' first", lineno)
            elif word == "note":
                cert.note = rest
            elif word == "cut":
                a, _, b = rest.partition("->")
                cert.cut.append((parse_node(a)[1], parse_node(b)[1]))
            else:
                raise InstanceError(f"unknown certificate line {line!r}", lineno)
        except InstanceError:
            raise
        except ValueError as exc:
            raise InstanceError(str(exc), lineno) from None
    if cert is None:
        raise InstanceError("empty certificate")
    return cert


# ---------------------------------------------------------------------------
# random instances


def gen_random_permutation(grid: ConvexSubgrid, seed: int,
                           duplex: DuplexMode = DuplexMode.FULL) -> Instance:
    """Uniform permutation of the window's nodes (fixed points included)."""
    nodes = grid.sorted_nodes()
    dests = nodes[:]
    random.Random(seed).shuffle(dests)
    return Instance(grid, list(zip(nodes, dests)), (1, 1), duplex)


def gen_random_lk(grid: ConvexSubgrid, l: int, k: int, lmax: int, seed: int,
                  duplex: DuplexMode = DuplexMode.FULL, density: float = 1.0) -> Instance:
    """Random (l,k) instance whose demands are all within distance ``lmax``."""
    rng = random.Random(seed)
    nodes = grid.sorted_nodes()
    recv = Counter()
    demands = []
    for s in nodes:
        near = [d for d in nodes if distance(grid.kind, s, d) <= lmax]
        for _ in range(l):
            if rng.random() > density:
                continue
            options = [d for d in near if recv[d] < k]
            if not options:
                break
            d = rng.choice(options)
            recv[d] += 1
            demands.append((s, d))
    return Instance(grid, demands, (l, k), duplex)


# ---------------------------------------------------------------------------
# adversarial families


def _tri_line(start: Node, axis: int, t: int) -> Node:
    du, dv = TRI_AXIS[axis]
    return Node(start.u + t * du, start.v + t * dv)


def gen_line_adversarial_tri(lmax: int, multiplicity: int = 1, both_sides: bool = True,
                             duplex: DuplexMode = DuplexMode.HALF) -> tuple[Instance, Certificate]:
    """Packets on a line of the triangular grid all crossing the edge (0,0)-(1,0).

    With ``both_sides`` the nodes at positions ``-lmax+1..0`` send rightwards
    and ``1..lmax`` send leftwards, each to the node at distance exactly
    ``lmax``; the marked edge then lies on ``2*lmax`` shortest paths. With
    ``both_sides=False`` only the left group sends, ``multiplicity`` packets
    per node (the (l,k) line family).
    """
    if lmax < 1:
        raise ValueError("lmax must be >= 1")
    x, y = Node(0, 0), Node(1, 0)
    demands = []
    for p in range(-lmax + 1, 1):
        for _ in range(multiplicity):
            demands.append((_tri_line(x, 0, p), _tri_line(x, 0, p + lmax)))
    if both_sides:
        for p in range(1, lmax + 1):
            for _ in range(multiplicity):
                demands.append((_tri_line(x, 0, p), _tri_line(x, 0, p - lmax)))
    grid = rhombus(2 * lmax + 1, 1, (-lmax, 0))
    m = multiplicity
    inst = Instance(grid, demands, (m, m), duplex)
    if both_sides:
        cert = Certificate(2 * lmax * m, "edge-congestion", [(x, y)], "marked edge")
    else:
        cert = Certificate(lmax * m, "arc-congestion", [(x, y)], "marked arc")
    return inst, cert


def _chain_walk(n: Node, chain: int, sign: int, t: int) -> Node:
    for _ in range(t):
        n = chain_step(n, chain, sign)
    return n


def hex_x_demands(lmax: int, x: Node = Node(0, 0, 0), y: Node = Node(0, 0, 1)) -> list:
    """Demands of the X-shaped hexagonal family around the edge x-y.

    The two zigzag chains through the edge carry the traffic. Towards y, the
    first chain contributes sources at chain distance 1..lmax-1 from x and the
    second chain 1..lmax-2 plus x itself; every destination lies on the
    source's chain beyond the edge at distance exactly lmax. The direction
    towards x mirrors this with the chains' roles swapped. That gives
    ``2*lmax - 2`` packets per direction and pairwise distinct endpoints.
    """
    chains = [ch for ch in (1, 2, 3) if chain_id(x, ch) == chain_id(y, ch)]
    first, second = chains
    demands = []
    for a, b, long_chain, short_chain in ((x, y, first, second), (y, x, second, first)):
        for ch, count in ((long_chain, lmax - 1), (short_chain, lmax - 2)):
            toward = chain_pos(b, ch) - chain_pos(a, ch)
            for j in range(1, count + 1):
                src = _chain_walk(a, ch, -toward, j)
                dst = _chain_walk(a, ch, toward, lmax - j)
                demands.append((src, dst))
        toward = chain_pos(b, short_chain) - chain_pos(a, short_chain)
        demands.append((a, _chain_walk(a, short_chain, toward, lmax)))
    return demands


def gen_x_adversarial_hex(lmax: int, duplex: DuplexMode = DuplexMode.FULL
                          ) -> tuple[Instance, Certificate]:
    if lmax < 2:
        raise ValueError("the X family needs lmax >= 2")
    x, y = Node(0, 0, 0), Node(0, 0, 1)
    demands = hex_x_demands(lmax, x, y)
    nodes = {n for dem in demands for n in dem}
    grid = make_subgrid(GridKind.HEXAGONAL, _closure(GridKind.HEXAGONAL, nodes), "nodes")
    if duplex is DuplexMode.HALF:
        cert = Certificate(4 * lmax - 4, "edge-congestion", [(x, y)], "X edge, both directions")
    else:
        cert = Certificate(2 * lmax - 2, "arc-congestion", [(x, y), (y, x)], "X edge, per direction")
    return Instance(grid, demands, (1, 1), duplex), cert


def _closure(kind, nodes):
    from .grid import convex_closure
    return convex_closure(kind, nodes)


def gen_r_central(kind: GridKind, r: int, center: Node = Node(0, 0, 0),
                  duplex: DuplexMode = DuplexMode.FULL) -> Instance:
    """Every node within distance ``r`` of ``center`` sends one packet to it."""
    if r < 1:
        raise ValueError("r must be >= 1")
    sources = sorted(ball_nodes(kind, center, r) - {center})
    grid = ball(kind, center, r)
    return Instance(grid, [(s, center) for s in sources], (1, max(1, len(sources))), duplex)


def r_central_source_count(kind: GridKind, r: int) -> int:
    return {GridKind.SQUARE: 4, GridKind.TRIANGULAR: 6, GridKind.HEXAGONAL: 3}[kind] * comb(r + 1, 2)


# ---------------------------------------------------------------------------
# Hall rectangles for the second (l,k) lower bound


def rectangle_side(c: int, lmax: int) -> int:
    """floor((lmax + 1) / sqrt(c + 1)) in exact integer arithmetic."""
    return isqrt((lmax + 1) ** 2 // (c + 1))


def _tri_cone_distance(a: Node, b: Node) -> int:
    # distance inside the cone {x i + y j : x, y >= 0}; geodesics between cone
    # points are monotone in both coordinates, so they never leave it
    return distance(GridKind.TRIANGULAR, a, b)


def _flow_assignment(senders, receivers, eligible, supply: int, capacity: int):
    """Max-flow b-matching: each sender ships ``supply``, each receiver takes <= ``capacity``.

    Returns a list of (sender, receiver, count) or raises ConstructionError
    carrying the source side of a minimum cut (a Hall-deficient sender set).
    """
    g = nx.DiGraph()
    for s in senders:
        g.add_edge("SRC", ("s", s), capacity=supply)
        for r in eligible[s]:
            g.add_edge(("s", s), ("r", r), capacity=min(supply, capacity))
    for r in receivers:
        g.add_edge(("r", r), "SNK", capacity=capacity)
    value, flow = nx.maximum_flow(g, "SRC", "SNK")
    need = supply * len(senders)
    if value < need:
        cut_value, (side, _) = nx.minimum_cut(g, "SRC", "SNK")
        bad = sorted(n[1] for n in side if isinstance(n, tuple) and n[0] == "s")
        raise ConstructionError(f"flow {value} < demand {need}", bad)
    out = []
    for s in senders:
        for key, f in sorted(flow[("s", s)].items()):
            if f:
                out.append((s, key[1], f))
    return out


def gen_rectangle_lk(kind: GridKind, l: int, k: int, lmax: int,
                     v: Node = Node(0, 0, 0)) -> tuple[Instance, Certificate]:
    """Dense (l,k) instance forcing the second lower bound.

    The larger side (senders when l >= k) is the d x d rectangle at ``v``; the
    other side lives in the ring of rectangles up to side ``d + lmax``. The
    assignment comes from a max-flow over pairs at distance <= lmax, and the
    certificate is the bisection bound on the arcs crossing the rectangle
    boundary.
    """
    big, small = max(l, k), min(l, k)
    c = -(-big // small)
    if kind is GridKind.HEXAGONAL:
        from .analysis import hex_rect_side
        d = hex_rect_side(c, lmax)
        if d < 1:
            raise ValueError("parameters give an empty rectangle")
        inner = hex_rectangle_nodes(d, d, v)
        ring = hex_rectangle_nodes(d + lmax, d + lmax, v) - inner
        dist = lambda a, b: distance(kind, a, b)  # noqa: E731
    elif kind is GridKind.TRIANGULAR:
        d = rectangle_side(c, lmax)
        if d < 1:
            raise ValueError("parameters give an empty rectangle")
        inner = {Node(v.u + a, v.v + b) for a in range(d) for b in range(d)}
        ring = {Node(v.u + a, v.v + b) for a in range(d + lmax) for b in range(d + lmax)} - inner
        dist = _tri_cone_distance
    else:
        d = rectangle_side(c, lmax)
        if d < 1:
            raise ValueError("parameters give an empty rectangle")
        inner = {Node(v.u + a, v.v + b) for a in range(d) for b in range(d)}
        ring = {Node(v.u + a, v.v + b) for a in range(d + lmax) for b in range(d + lmax)} - inner
        dist = lambda a, b: distance(kind, a, b)  # noqa: E731
    inner_l, ring_l = sorted(inner), sorted(ring)
    eligible = {s: [r for r in ring_l if dist(s, r) <= lmax] for s in inner_l}
    # senders are the rectangle when l >= k, receivers otherwise
    capacity = small
    pairs = _flow_assignment(inner_l, ring_l, eligible, big, capacity)
    demands = []
    for a, b, count in pairs:
        for _ in range(count):
            demands.append((a, b) if l >= k else (b, a))
    nodes = inner | ring
    grid = make_subgrid(kind, _closure(kind, nodes), "nodes")
    cut = sorted((a, b) if l >= k else (b, a)
                 for a in inner for b, _ in lattice_arcs(kind, a) if b in ring)
    m = len(demands)
    claim = -(-m // len(cut))
    cert = Certificate(claim, "bisection", cut, f"d={d} rectangle, {len(inner)} nodes")
    return Instance(grid, demands, (l, k), DuplexMode.FULL), cert


def gen_lk_adversarial_tri(l: int, k: int, lmax: int) -> Instance:
    """Union of the line family and the Hall rectangle, far apart.

    Any shortest-path schedule needs at least the larger of the two lower
    bounds on this instance.
    """
    line, _ = gen_line_adversarial_tri(lmax, multiplicity=min(l, k), both_sides=False)
    demands = list(line.demands)
    c = -(-max(l, k) // min(l, k))
    if rectangle_side(c, lmax) >= 1:
        rect, _ = gen_rectangle_lk(GridKind.TRIANGULAR, l, k, lmax, Node(0, 4 * lmax + 4))
        demands += rect.demands
        nodes = set(line.grid.nodes) | set(rect.grid.nodes)
    else:
        nodes = set(line.grid.nodes)
    grid = make_subgrid(GridKind.TRIANGULAR, nodes, "nodes")
    return Instance(grid, demands, (l, k), DuplexMode.FULL)
