"""Reference implementations used only by the tests.

Nothing here imports gridroute's own distance, address or colouring code;
adjacency is rebuilt from the lattice definitions.
"""

from collections import deque
from itertools import product

SQUARE_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1))
TRI_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1))


def square_adj(n):
    u, v = n[0], n[1]
    return [(u + du, v + dv, 0) for du, dv in SQUARE_OFFSETS]


def tri_adj(n):
    u, v = n[0], n[1]
    return [(u + du, v + dv, 0) for du, dv in TRI_OFFSETS]


def hex_adj(n):
    # A(u,v,0) ~ B(u,v,1), B(u-1,v,1), B(u,v-1,1)
    u, v, s = n
    if s == 0:
        return [(u, v, 1), (u - 1, v, 1), (u, v - 1, 1)]
    return [(u, v, 0), (u + 1, v, 0), (u, v + 1, 0)]


ADJ = {"square": square_adj, "tri": tri_adj, "hex": hex_adj}


def bfs(kind, src, members=None, limit=None):
    """Distances from ``src``; restricted to ``members`` if given."""
    adj = ADJ[kind]
    src = tuple(src)
    dist = {src: 0}
    q = deque([src])
    while q:
        n = q.popleft()
        if limit is not None and dist[n] >= limit:
            continue
        for m in adj(n):
            if members is not None and m not in members:
                continue
            if m not in dist:
                dist[m] = dist[n] + 1
                q.append(m)
    return dist


def bfs_pair(kind, a, b, members=None):
    a, b = tuple(a), tuple(b)
    if a == b:
        return 0
    adj = ADJ[kind]
    dist = {a: 0}
    q = deque([a])
    while q:
        n = q.popleft()
        for m in adj(n):
            if members is not None and m not in members:
                continue
            if m not in dist:
                dist[m] = dist[n] + 1
                if m == b:
                    return dist[m]
                q.append(m)
    return None


def tri_min_address(a, b, c, span=30):
    """Shortest representative of the class {(a+d, b+d, c+d)} by search over d."""
    best = None
    for d in range(-span, span + 1):
        x = (a + d, b + d, c + d)
        key = (sum(abs(t) for t in x), x)
        if best is None or key < best:
            best = key
    return best[1]


def set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def coloring_optimum(edges):
    """Minimum sum of block maxima over partitions of the edges into <= Delta matchings."""
    if not edges:
        return 0
    deg = {}
    for u, v, _ in edges:
        deg[("L", u)] = deg.get(("L", u), 0) + 1
        deg[("R", v)] = deg.get(("R", v), 0) + 1
    delta = max(deg.values())
    best = None
    for part in set_partitions(list(range(len(edges)))):
        if len(part) > delta:
            continue
        ok = True
        for block in part:
            ls = [edges[e][0] for e in block]
            rs = [edges[e][1] for e in block]
            if len(set(ls)) < len(ls) or len(set(rs)) < len(rs):
                ok = False
                break
        if ok:
            cost = sum(max(edges[e][2] for e in block) for block in part)
            best = cost if best is None else min(best, cost)
    return best


def brute_force_lb2_beats_lb1(l, k, lmax):
    """LB2 > LB1 from the triangular formulas, evaluated by integer search."""
    m, big = min(l, k), max(l, k)
    c = -(-big // m)
    # largest d with d * sqrt(c+1) <= lmax + 1
    d = 0
    while (d + 1) ** 2 * (c + 1) <= (lmax + 1) ** 2:
        d += 1
    lb2 = -(-(big * d) // 4)
    return lb2 > m * lmax


def all_pairs(nodes):
    nodes = list(nodes)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            yield a, b


def grid_points(w, h):
    return [(x, y, 0) for x, y in product(range(w), range(h))]
