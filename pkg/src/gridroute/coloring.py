"""Centralised (l,k) scheduling by weighted bipartite edge colouring.

Every demand becomes an edge between a sender copy and a receiver copy of
the grid nodes, weighted by its hop distance. A colouring into Delta
matchings is a sequence of permutation routings; a matching costs its
heaviest edge.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .engine import SimConfig, SimResult, run
from .grid import bfs_distance, distance

EXACT_LIMIT = 16


class ColoringTooLarge(ValueError):
    pass


@dataclass
class WeightedBipartiteGraph:
    left: list
    right: list
    edges: list = field(default_factory=list)  # (sender, receiver, weight); index = edge id

    def degree(self) -> int:
        deg = Counter()
        for u, v, _ in self.edges:
            deg[("L", u)] += 1
            deg[("R", v)] += 1
        return max(deg.values(), default=0)

    def weight(self, e: int) -> int:
        return self.edges[e][2]


@dataclass
class EdgeColoring:
    matchings: list  # lists of edge ids

    def costs(self, g: WeightedBipartiteGraph) -> list:
        return [max((g.weight(e) for e in m), default=0) for m in self.matchings]

    def cost(self, g: WeightedBipartiteGraph) -> int:
        return sum(self.costs(g))

    def problems(self, g: WeightedBipartiteGraph, exact_count: Optional[int] = None) -> list:
        """Structural defects: overlap, missing edges, endpoint clashes, wrong count."""
        out = []
        seen = Counter(e for m in self.matchings for e in m)
        dup = sorted(e for e, n in seen.items() if n > 1)
        if dup:
            out.append(f"edges in several matchings: {dup}")
        missing = sorted(set(range(len(g.edges))) - set(seen))
        if missing:
            out.append(f"uncoloured edges: {missing}")
        for i, m in enumerate(self.matchings):
            ls = Counter(g.edges[e][0] for e in m)
            rs = Counter(g.edges[e][1] for e in m)
            if any(n > 1 for n in ls.values()) or any(n > 1 for n in rs.values()):
                out.append(f"matching {i} is not a matching")
        delta = g.degree()
        if len(self.matchings) > delta:
            out.append(f"{len(self.matchings)} matchings for degree {delta}")
        if exact_count is not None and len(self.matchings) != exact_count:
            out.append(f"expected {exact_count} matchings, got {len(self.matchings)}")
        return out


def build_bipartite(instance) -> WeightedBipartiteGraph:
    grid = instance.grid
    edges = []
    for s, d in instance.demands:
        w = bfs_distance(grid, s, d) if grid.finite else distance(instance.kind, s, d)
        if w is None:
            raise ValueError(f"{d} is unreachable from {s} inside the window")
        edges.append((s, d, w))
    left = sorted({s for s, _, _ in edges})
    right = sorted({d for _, d, _ in edges})
    return WeightedBipartiteGraph(left, right, edges)


# ---------------------------------------------------------------------------
# Delta-colouring by alternating paths


class _Colours:
    """Edge colouring under construction with per-endpoint colour slots."""

    def __init__(self, g: WeightedBipartiteGraph, delta: int):
        self.g = g
        self.delta = delta
        self.colour = {}
        self.at = {}  # (side, node) -> {colour: edge}

    def _slots(self, e):
        u, v, _ = self.g.edges[e]
        return self.at.setdefault(("L", u), {}), self.at.setdefault(("R", v), {})

    def free(self, end) -> list:
        used = self.at.get(end, {})
        return [c for c in range(self.delta) if c not in used]

    def admits(self, e, c) -> bool:
        a, b = self._slots(e)
        return c not in a and c not in b

    def put(self, e, c):
        a, b = self._slots(e)
        a[c] = b[c] = e
        self.colour[e] = c

    def take(self, e):
        c = self.colour.pop(e)
        a, b = self._slots(e)
        del a[c], b[c]
        return c

    def flip(self, start, a, b):
        """Swap colours a and b along the alternating path leaving ``start`` on colour a."""
        path, end, c = [], start, a
        while c in self.at.get(end, {}):
            e = self.at[end][c]
            path.append(e)
            u, v, _ = self.g.edges[e]
            end = ("R", v) if end == ("L", u) else ("L", u)
            c = b if c == a else a
        old = [self.take(e) for e in path]
        for e, c in zip(path, old):
            self.put(e, b if c == a else a)

    def insert(self, e):
        """Colour e, recolouring one alternating path if no colour is free at both ends."""
        u, v, _ = self.g.edges[e]
        lu, rv = ("L", u), ("R", v)
        fu, fv = self.free(lu), self.free(rv)
        common = [c for c in fu if c in fv]
        if common:
            self.put(e, common[0])
            return
        a, b = fu[0], fv[0]
        # a is used at v; the a/b path from v cannot reach u in a bipartite graph
        self.flip(rv, a, b)
        self.put(e, a)

    def result(self) -> EdgeColoring:
        ms = [[] for _ in range(self.delta)]
        for e in sorted(self.colour):
            ms[self.colour[e]].append(e)
        return EdgeColoring(ms)


def konig_decompose(g: WeightedBipartiteGraph) -> EdgeColoring:
    """Exactly Delta matchings covering every edge; weights are ignored."""
    col = _Colours(g, g.degree())
    for e in range(len(g.edges)):
        col.insert(e)
    return col.result()


# ---------------------------------------------------------------------------
# weighted colouring


def weighted_color_exact(g: WeightedBipartiteGraph) -> EdgeColoring:
    """Minimum sum of matching maxima over partitions into Delta matchings.

    Branch and bound over edges in decreasing weight: the first edge put in
    a matching fixes its cost, so the running sum is exact and monotone.
    """
    m = len(g.edges)
    if m > EXACT_LIMIT:
        raise ColoringTooLarge(f"{m} edges exceeds the exact limit of {EXACT_LIMIT}; "
                               "use weighted_color_greedy")
    delta = g.degree()
    if m == 0:
        return EdgeColoring([])
    order = sorted(range(m), key=lambda e: (-g.weight(e), e))
    best = [weighted_color_greedy(g).cost(g) + 1, None]
    blocks = [[] for _ in range(delta)]
    used = [set() for _ in range(delta)]

    def rec(i, cost):
        if cost >= best[0]:
            return
        if i == m:
            best[0], best[1] = cost, [list(b) for b in blocks]
            return
        e = order[i]
        u, v, w = g.edges[e]
        seen_empty = False
        for j in range(delta):
            if not blocks[j]:
                if seen_empty:
                    continue  # empty matchings are interchangeable
                seen_empty = True
            if ("L", u) in used[j] or ("R", v) in used[j]:
                continue
            extra = w if not blocks[j] else 0
            blocks[j].append(e)
            used[j].update((("L", u), ("R", v)))
            rec(i + 1, cost + extra)
            blocks[j].pop()
            used[j].difference_update((("L", u), ("R", v)))

    rec(0, 0)
    return EdgeColoring([sorted(b) for b in best[1]])


def weighted_color_greedy(g: WeightedBipartiteGraph) -> EdgeColoring:
    """Heaviest edge first into the matching whose cost grows least.

    When no matching admits an edge, one alternating path is recoloured to
    make room (as in ``konig_decompose``).
    """
    delta = g.degree()
    col = _Colours(g, delta)
    top = [0] * delta
    for e in sorted(range(len(g.edges)), key=lambda e: (-g.weight(e), e)):
        w = g.weight(e)
        fits = [c for c in range(delta) if col.admits(e, c)]
        if fits:
            c = min(fits, key=lambda c: (max(w - top[c], 0), c))
            col.put(e, c)
        else:
            col.insert(e)
        top = [0] * delta
        for x, c in col.colour.items():
            top[c] = max(top[c], g.weight(x))
    return col.result()


COLORING_METHODS = {
    "exact": weighted_color_exact,
    "greedy": weighted_color_greedy,
    "konig": konig_decompose,
}


# ---------------------------------------------------------------------------
# scheduling


@dataclass
class ScheduleResult(SimResult):
    phase_times: list = field(default_factory=list)
    phase_lmax: list = field(default_factory=list)


def schedule_from_coloring(instance, coloring: EdgeColoring,
                           config: Optional[SimConfig] = None) -> ScheduleResult:
    """Route the matchings one after another as permutation instances."""
    config = config or SimConfig()
    g = build_bipartite(instance)
    bad = coloring.problems(g)
    if bad:
        raise ValueError("invalid colouring: " + "; ".join(bad))
    usage = Counter()
    times, lmaxes = [], []
    max_queue = 0
    delivered = True
    policy = ""
    for m in coloring.matchings:
        sub = instance.with_demands([instance.demands[e] for e in m], (1, 1))
        cfg = SimConfig(policy=config.policy, duplex=config.duplex, max_steps=config.max_steps,
                        seed=config.seed)
        res, _ = run(sub, cfg)
        times.append(res.completion_time)
        lmaxes.append(sub.lmax())
        usage.update(res.arc_usage)
        max_queue = max(max_queue, res.max_queue)
        delivered = delivered and res.delivered
        policy = policy or res.policy
    return ScheduleResult(sum(times), usage, max_queue, delivered, policy, times, lmaxes)
