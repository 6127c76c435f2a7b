"""Node-local routing policies.

A policy sees one node's queue, the global step counter and static grid data.
``decide`` returns the packets to dispatch this step; each dispatched packet
moves along ``next_move``. Queues are grouped per outgoing arc.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from math import comb
from typing import Optional

from .grid import (
    DuplexMode, EdgeClass, GridKind, ball_nodes, canonical_move, edge_class,
    is_positive_arc, move_node, relative_address,
)

HEX_PHASE_TABLE = {
    1: {1: EdgeClass.E2, 2: EdgeClass.E3, 3: EdgeClass.E1},
    2: {1: EdgeClass.E3, 2: EdgeClass.E1, 3: EdgeClass.E2},
}


class Policy:
    id = "base"
    kinds: frozenset = frozenset(GridKind)
    duplex = DuplexMode.FULL
    shortest_path = True

    def check(self, instance) -> None:
        if instance.kind not in self.kinds:
            raise ValueError(f"policy {self.id} does not apply to {instance.kind.value} grids")

    def initial_address(self, kind, s, d):
        return relative_address(kind, s, d)

    def next_move(self, kind, p):
        return canonical_move(kind, p.remaining)

    def priority(self, kind, p, move):
        return (-p.dist(kind), p.id)

    def arc_queues(self, kind, node, queue):
        """Queued packets grouped by the arc they want next, keyed by its head."""
        groups = defaultdict(list)
        for p in queue:
            mv = self.next_move(kind, p)
            if mv is not None:
                groups[move_node(kind, node, *mv)].append((p, mv))
        return sorted(groups.items())

    def decide(self, kind, node, queue, step):
        return [min(g, key=lambda pm: self.priority(kind, *pm))[0]
                for _, g in self.arc_queues(kind, node, queue)]


def _require_permutation(policy, instance):
    l, k = instance.limits
    if (l, k) != (1, 1):
        raise ValueError(f"policy {policy.id} needs a permutation instance, got limits {instance.limits}")


class SquareXY(Policy):
    """Horizontal first, then vertical; farthest packet wins each arc."""

    id = "square_xy"
    kinds = frozenset({GridKind.SQUARE})


class NegativeFirst(Policy):
    """Negative components are exhausted first and win their arcs outright
    (lowest id among several); positive movers go farthest-first."""

    def priority(self, kind, p, move):
        if move[1] < 0:
            return (0, 0, p.id)
        return (1, -p.dist(kind), p.id)


class TriPermFull(NegativeFirst):
    id = "tri_perm_full"
    kinds = frozenset({GridKind.TRIANGULAR})

    def check(self, instance):
        super().check(instance)
        _require_permutation(self, instance)


class LkGeneral(NegativeFirst):
    """Negative-first with multiplicities.

    Several packets may contend for one negative arc. By default the lowest
    id wins; with ``tie_break="farthest"`` the packet farthest from its
    destination wins, so a packet passing through never delays one that is
    still at its origin.
    """

    id = "lk_general"
    TIE_BREAKS = ("id", "farthest")

    def __init__(self, l: Optional[int] = None, k: Optional[int] = None, tie_break: str = "id"):
        if tie_break not in self.TIE_BREAKS:
            raise ValueError(f"tie_break must be one of {self.TIE_BREAKS}")
        self.l, self.k = l, k
        self.tie_break = tie_break

    def priority(self, kind, p, move):
        if self.tie_break == "id":
            return super().priority(kind, p, move)
        return (0 if move[1] < 0 else 1, -p.dist(kind), p.id)

    def check(self, instance):
        super().check(instance)
        l = self.l or instance.limits[0]
        k = self.k or instance.limits[1]
        sends, recvs = Counter(s for s, _ in instance.demands), Counter(d for _, d in instance.demands)
        if sends and max(sends.values()) > l or recvs and max(recvs.values()) > k:
            raise ValueError(f"instance exceeds the ({l},{k}) multiplicities")


def hex_phase(step: int) -> int:
    """0 for the first step, then 1 and 2 alternately."""
    if step <= 1:
        return 0
    return 1 if step % 2 == 0 else 2


def phase_name(step: int, duplex: DuplexMode = DuplexMode.FULL) -> str:
    """Named phase of the hexagonal algorithm at engine step ``step``."""
    if duplex is DuplexMode.FULL:
        return ("first-step", "Phase1", "Phase2")[hex_phase(step)]
    inner = (step + 1) // 2
    half = "even" if step % 2 == 1 else "odd"
    ph = hex_phase(inner)
    return f"{'first-step' if ph == 0 else f'P{ph}'}-{half}"


class HexPermFull(Policy):
    """The three-rule hexagonal permutation algorithm.

    Step 1 moves every packet (negative component preferred). From step 2
    on, a packet with a negative component leaves at once along it (rule
    2a); otherwise the farthest positive mover of each arc goes (rule 2b),
    taking packets on the chain that the current phase assigns to the arc's
    edge class first. If every packet at a node is one hop away, all of them
    leave at once (rule 3).

    An arc is positive for exactly one of its two chains, so the positive
    queue of an arc holds a single chain. With ``strict=True`` that queue
    waits for its phase; by default the arc is never left idle.
    """

    id = "hex_perm_full"
    kinds = frozenset({GridKind.HEXAGONAL})

    def __init__(self, strict: bool = False):
        self.strict = strict
        self.violations = Counter()  # uniqueness checks of rules 2a and 2b

    def check(self, instance):
        super().check(instance)
        _require_permutation(self, instance)

    def decide(self, kind, node, queue, step):
        phase = hex_phase(step)
        flush = phase == 0 or all(p.dist(kind) == 1 for p in queue)
        out = []
        for nxt, movers in self.arc_queues(kind, node, queue):
            neg = [p for p, (_, sign) in movers if sign < 0]
            if neg:
                if len(neg) > 1:
                    self.violations["2a"] += 1
                out.append(min(neg, key=lambda p: p.id))
                continue
            if not flush:
                cls = edge_class(kind, node, nxt)
                allowed = [(p, mv) for p, mv in movers if HEX_PHASE_TABLE[phase][mv[0] + 1] is cls]
                if allowed or self.strict:
                    movers = allowed
            if not movers:
                continue
            best = max(p.dist(kind) for p, _ in movers)
            top = [p for p, _ in movers if p.dist(kind) == best]
            if len(top) > 1 and not flush:
                self.violations["2b"] += 1
            out.append(min(top, key=lambda p: p.id))
        return out


class OddEven(Policy):
    """Half-duplex wrapper: inner step s becomes engine steps 2s-1 and 2s.

    The inner decision for step s is taken on the packets that were present
    when the inner step began; step 2s-1 carries the chosen packets on
    positive arcs and step 2s those on negative arcs.
    """

    duplex = DuplexMode.HALF

    def __init__(self, inner: Policy, id: Optional[str] = None):
        self.inner = inner
        self.id = id or f"odd_even({inner.id})"
        self.kinds = inner.kinds
        self.shortest_path = inner.shortest_path

    def check(self, instance):
        self.inner.check(instance)

    def initial_address(self, kind, s, d):
        return self.inner.initial_address(kind, s, d)

    def next_move(self, kind, p):
        return self.inner.next_move(kind, p)

    def decide(self, kind, node, queue, step):
        s = (step + 1) // 2
        present = [p for p in queue if p.arrived <= 2 * s - 2]
        chosen = self.inner.decide(kind, node, present, s)
        positive = step % 2 == 1
        out = []
        for p in chosen:
            nxt = move_node(kind, node, *self.next_move(kind, p))
            if is_positive_arc(node, nxt) == positive:
                out.append(p)
        return out

    @property
    def violations(self):
        return getattr(self.inner, "violations", Counter())


# ---------------------------------------------------------------------------
# r-central routing

# the six triangular directions in counter-clockwise order as (axis, sign)
_TRI_CCW = ((0, 1), (2, -1), (1, 1), (0, -1), (2, 1), (1, -1))


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


class RCentral(Policy):
    """Sector routing towards a common centre.

    A packet first removes the part of its displacement along the sector's
    counter-clockwise bounding axis, then runs in along the clockwise one;
    farther packets win contested arcs.
    """

    id = "r_central"

    def __init__(self, r: Optional[int] = None):
        self.r = r

    def check(self, instance):
        super().check(instance)
        if not instance.demands:
            return
        centers = {d for _, d in instance.demands}
        if len(centers) != 1:
            raise ValueError("not an r-central instance: several destinations")
        (center,) = centers
        kind = instance.kind
        r = self.r or instance.lmax()
        sources = [s for s, _ in instance.demands]
        if len(set(sources)) != len(sources) or set(sources) != ball_nodes(kind, center, r) - {center}:
            raise ValueError(f"not an r-central instance: sources are not the radius-{r} ball")

    def next_move(self, kind, p):
        a, b, c = p.remaining
        if kind is GridKind.SQUARE:
            if a == 0 and b == 0:
                return None
            if a == 0 or a * b > 0:
                return 1, _sgn(b)
            return 0, _sgn(a)
        if kind is GridKind.TRIANGULAR:
            nz = [(i, x) for i, x in enumerate(p.remaining) if x]
            if not nz:
                return None
            if len(nz) == 1:
                i, x = nz[0]
                return i, _sgn(x)
            # directions of the displacement from the centre, i.e. of -remaining
            (i1, x1), (i2, x2) = nz
            d1, d2 = (i1, -_sgn(x1)), (i2, -_sgn(x2))
            ccw = d2 if _TRI_CCW.index(d2) == (_TRI_CCW.index(d1) + 1) % 6 else d1
            i = ccw[0]
            return i, _sgn(p.remaining[i])
        return hex_central_move(p.remaining)


def hex_central_move(addr):
    """Hexagonal sector rule: the negative chain segment first, then the positive one.

    This splits the ball into three sectors of C(r+1, 2) nodes, one per arc
    into the centre.
    """
    return canonical_move(GridKind.HEXAGONAL, addr)


def r_central_time(r: int) -> int:
    return comb(r + 1, 2)


# ---------------------------------------------------------------------------
# registry

POLICY_IDS = ("square_xy", "tri_perm_full", "tri_perm_half", "hex_perm_full", "hex_perm_half",
              "r_central", "lk_general")


def make_policy(pid: str, duplex: DuplexMode = DuplexMode.FULL, l=None, k=None, r=None,
                tie_break: str = "id") -> Policy:
    """Build policy ``pid`` for ``duplex``.

    The ``*_full``/``*_half`` ids are tied to their link model; the others
    are full-duplex policies that get wrapped in ``OddEven`` for half duplex.
    """
    if pid == "tri_perm_half":
        pol = OddEven(TriPermFull(), "tri_perm_half")
        native = DuplexMode.HALF
    elif pid == "hex_perm_half":
        pol = OddEven(HexPermFull(), "hex_perm_half")
        native = DuplexMode.HALF
    elif pid in ("tri_perm_full", "hex_perm_full"):
        pol = TriPermFull() if pid == "tri_perm_full" else HexPermFull()
        native = DuplexMode.FULL
    elif pid == "square_xy":
        pol, native = SquareXY(), None
    elif pid == "r_central":
        pol, native = RCentral(r), None
    elif pid == "lk_general":
        pol, native = LkGeneral(l, k, tie_break), None
    else:
        raise ValueError(f"unknown policy {pid!r}; choose from {', '.join(POLICY_IDS)}")
    if native is not None and native is not duplex:
        raise ValueError(f"policy {pid} is for {native.value} duplex, not {duplex.value}")
    if native is None and duplex is DuplexMode.HALF:
        pol = OddEven(pol)
    return pol


def default_policy_id(instance, duplex: DuplexMode) -> str:
    kind = instance.kind
    if instance.limits != (1, 1):
        return "lk_general"
    if kind is GridKind.SQUARE:
        return "square_xy"
    half = duplex is DuplexMode.HALF
    if kind is GridKind.TRIANGULAR:
        return "tri_perm_half" if half else "tri_perm_full"
    return "hex_perm_half" if half else "hex_perm_full"


def resolve_policy(policy, instance, duplex: DuplexMode, config=None) -> Policy:
    if isinstance(policy, Policy):
        pol = policy
    else:
        pid = default_policy_id(instance, duplex) if policy in (None, "auto") else policy
        cfg = config
        pol = make_policy(pid, duplex, getattr(cfg, "l", None), getattr(cfg, "k", None),
                          getattr(cfg, "r", None), getattr(cfg, "tie_break", "id"))
    if pol.duplex is not duplex:
        raise ValueError(f"policy {pol.id} is for {pol.duplex.value} duplex, not {duplex.value}")
    pol.check(instance)
    return pol
