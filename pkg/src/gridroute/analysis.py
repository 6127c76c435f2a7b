"""Lower and upper bounds: distance, congestion, bisection and the (l,k) formulas.

All bound arithmetic is exact: square roots go through ``math.isqrt`` on
integers and fractions through ``fractions.Fraction``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional

from .grid import DuplexMode, GridKind, canonical_route, distance, lattice_arcs


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def c_ratio(l: int, k: int) -> int:
    """ceil(max(l,k) / min(l,k))."""
    return -(-max(l, k) // min(l, k))


# ---------------------------------------------------------------------------
# path systems


def canonical_paths(instance) -> dict:
    """Packet id -> arc list of its canonical geodesic (negative part first)."""
    kind = instance.kind
    out = {}
    for i, (s, d) in enumerate(instance.demands):
        nodes = canonical_route(kind, s, d)
        out[i] = list(zip(nodes, nodes[1:]))
    return out


def arc_loads(ps: dict, duplex: DuplexMode) -> Counter:
    load = Counter()
    for arcs in ps.values():
        for a, b in arcs:
            load[(a, b) if duplex is DuplexMode.FULL else frozenset((a, b))] += 1
    return load


def path_congestion(ps: dict, duplex: DuplexMode) -> int:
    load = arc_loads(ps, duplex)
    return max(load.values(), default=0)


def dilation(ps: dict) -> int:
    return max((len(arcs) for arcs in ps.values()), default=0)


def bisection_bound(instance, cut, duplex: Optional[DuplexMode] = None,
                    ps: Optional[dict] = None) -> int:
    """ceil(m / |F|) for the packets whose canonical path crosses ``cut``.

    ``cut`` is a collection of arcs (a, b). In half duplex it is counted in
    undirected edges. Every counted packet must cross the cut: the cut has
    to separate the origin from the destination once the cut arcs (in both
    directions) are removed, otherwise a ValueError is raised.
    """
    duplex = duplex or instance.duplex
    cut = list(cut)
    if duplex is DuplexMode.FULL:
        size = len(set(cut))
        keys = set(cut)
    else:
        keys = {frozenset(a) for a in cut}
        size = len(keys)
    ps = ps if ps is not None else canonical_paths(instance)
    crossing = [i for i, arcs in ps.items()
                if any(((a, b) if duplex is DuplexMode.FULL else frozenset((a, b))) in keys
                       for a, b in arcs)]
    if not crossing:
        return 0
    _check_separates(instance, cut, crossing)
    return -(-len(crossing) // size)


def _check_separates(instance, cut, packets) -> None:
    kind = instance.kind
    grid = instance.grid
    removed = {frozenset(a) for a in cut}
    for i in packets:
        s, d = instance.demands[i]
        seen, stack = {s}, [s]
        # shortest-path routing: only geodesic moves towards d count
        while stack:
            n = stack.pop()
            for m, _ in lattice_arcs(kind, n):
                if m in seen or frozenset((n, m)) in removed or m not in grid:
                    continue
                if distance(kind, m, d) != distance(kind, n, d) - 1:
                    continue
                seen.add(m)
                stack.append(m)
        if d in seen:
            raise ValueError(f"cut does not separate packet {i}")


# ---------------------------------------------------------------------------
# (l,k) formulas


def tri_rect_side(c: int, lmax: int) -> int:
    """floor((lmax + 1) / sqrt(c + 1))."""
    return isqrt((lmax + 1) ** 2 // (c + 1))


def hex_rect_side(c: int, lmax: int) -> int:
    """floor(sqrt(73c + 64 lmax^2 + 121 + 144 lmax) / (8 sqrt(c+1)) - 3/8)."""
    x = 73 * c + 64 * lmax * lmax + 121 + 144 * lmax
    return (isqrt(x // (c + 1)) - 3) // 8


def hex_rect_node_count(d: int) -> int:
    return 4 * d * d + d - 2


def hex_rect_boundary(d: int) -> int:
    return 2 * d + 1


def lb1(kind: GridKind, l: int, k: int, lmax: int) -> int:
    m = min(l, k)
    if kind is GridKind.HEXAGONAL:
        return 2 * m * lmax - m
    return m * lmax


def lb2(kind: GridKind, l: int, k: int, lmax: int) -> int:
    big = max(l, k)
    c = c_ratio(l, k)
    if kind is GridKind.HEXAGONAL:
        d = hex_rect_side(c, lmax)
        val = big * (2 * d + Fraction(d - 2, 2 * d + 1))
        return max(0, _ceil(val))
    d = tri_rect_side(c, lmax)
    return _ceil(Fraction(big * d, 4))


def lb_lk(kind: GridKind, l: int, k: int, lmax: int) -> dict:
    a, b = lb1(kind, l, k, lmax), lb2(kind, l, k, lmax)
    return {"lb1": a, "lb2": b, "lb_combined": max(a, b)}


def ub_lk(kind: GridKind, l: int, k: int, lmax: int) -> int:
    m, big = min(l, k), max(l, k)
    c = c_ratio(l, k)
    if c <= lmax:
        val = m * c * (c - 1) // 2 + big * (lmax - c + 1)
    else:
        val = m * lmax * (lmax + 1) // 2
    return 2 * val if kind is GridKind.HEXAGONAL else val


def lb2_beats_lb1_condition(l: int, k: int, lmax: int) -> bool:
    """The printed crossover test c / sqrt(c+1) > 4 lmax / (lmax+1), squared exactly."""
    c = c_ratio(l, k)
    return c * c * (lmax + 1) ** 2 > 16 * lmax * lmax * (c + 1)


def permutation_bound(kind: GridKind, duplex: DuplexMode, lmax: int, n: Optional[int] = None) -> int:
    """Upper bound of the permutation algorithms for the given grid."""
    half = duplex is DuplexMode.HALF
    if kind is GridKind.TRIANGULAR:
        return 2 * lmax if half else lmax
    if kind is GridKind.HEXAGONAL:
        if lmax == 0:
            return 0
        return max(1, (4 if half else 2) * lmax - (4 if half else 2))
    bound = 2 * n - 2 if n is not None else 2 * lmax
    return 2 * bound if half else bound


@dataclass
class BoundReport:
    kind: GridKind
    duplex: DuplexMode
    l: int
    k: int
    lmax: int
    c: int
    lb1: int
    lb2: int
    lb_combined: int
    ub: int
    distance_bound: Optional[int] = None
    congestion_bound: Optional[int] = None
    bisection_bound: Optional[int] = None
    adapted: bool = False  # square grids reuse the triangular formulas

    def as_dict(self) -> dict:
        out = asdict(self)
        out["kind"] = self.kind.value
        out["duplex"] = self.duplex.value
        return out

    def table(self) -> str:
        rows = [(k, v) for k, v in self.as_dict().items()]
        w = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{w}}  {'-' if v is None else v}" for k, v in rows)


def bound_report(kind: GridKind, l: int, k: int, lmax: int,
                 duplex: DuplexMode = DuplexMode.FULL, instance=None, cut=None) -> BoundReport:
    """Closed-form (l,k) bounds, doubled for half duplex.

    With an ``instance`` the distance and canonical-congestion bounds are
    filled in; with a ``cut`` also the bisection bound.
    """
    lbs = lb_lk(kind, l, k, lmax)
    ub = ub_lk(kind, l, k, lmax)
    f = 2 if duplex is DuplexMode.HALF else 1
    rep = BoundReport(kind, duplex, l, k, lmax, c_ratio(l, k), f * lbs["lb1"], f * lbs["lb2"],
                      f * lbs["lb_combined"], f * ub, adapted=kind is GridKind.SQUARE)
    if instance is not None:
        ps = canonical_paths(instance)
        rep.distance_bound = dilation(ps)
        rep.congestion_bound = path_congestion(ps, duplex)
        if cut is not None:
            rep.bisection_bound = bisection_bound(instance, cut, duplex, ps)
    return rep
