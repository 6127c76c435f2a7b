"""Synchronous store-and-forward simulator and an independent trace validator."""

from __future__ import annotations

import json
import os
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .grid import (
    DuplexMode, GridKind, Node, RelativeAddress, address_length, address_step, distance,
    is_lattice_arc, move_node, parse_node,
)


class PolicyError(RuntimeError):
    """A policy dispatched more than the link model allows."""


@dataclass
class Packet:
    id: int
    origin: Node
    destination: Node
    remaining: RelativeAddress
    location: Node
    arrived: int = 0  # step at which the packet reached ``location``
    hops: int = 0

    def dist(self, kind: GridKind) -> int:
        return address_length(kind, self.remaining)


@dataclass
class SimConfig:
    policy: object = "auto"  # policy id or a policy object from ``algorithms``
    duplex: Optional[DuplexMode] = None  # None: take it from the instance
    max_steps: Optional[int] = None
    seed: int = 0
    l: Optional[int] = None
    k: Optional[int] = None
    r: Optional[int] = None
    tie_break: str = "id"  # lk_general: "id" or "farthest"

    def __post_init__(self):
        if self.max_steps is not None and self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


Move = tuple  # (packet id, from Node, to Node)


@dataclass
class Trace:
    kind: GridKind
    steps: list = field(default_factory=list)  # list of lists of Move

    def paths(self, instance) -> dict:
        """Node sequence walked by every packet, including waiting-free start."""
        out = {i: [s] for i, (s, _) in enumerate(instance.demands)}
        for moves in self.steps:
            for pid, _, b in moves:
                out[pid].append(b)
        return out

    def to_text(self, result: Optional["SimResult"] = None) -> str:
        lines = []
        for t, moves in enumerate(self.steps, 1):
            body = "; ".join(f"{pid} {a.format(self.kind)} -> {b.format(self.kind)}"
                             for pid, a, b in moves)
            lines.append(f"step {t}: {body}")
        if result is not None:
            lines.append(f"# completion_time {result.completion_time}")
            lines.append(f"# delivered {str(result.delivered).lower()}")
            lines.append(f"# max_queue {result.max_queue}")
            for (a, b), n in result.top_arcs(10):
                lines.append(f"# arc {a.format(self.kind)} -> {b.format(self.kind)} {n}")
        return "\n".join(lines) + ("\n" if lines else "")

    def to_jsonl(self, result: Optional["SimResult"] = None) -> str:
        rows = []
        for t, moves in enumerate(self.steps, 1):
            rows.append({"step": t, "moves": [
                {"packet": pid, "from": a.format(self.kind), "to": b.format(self.kind)}
                for pid, a, b in moves]})
        if result is not None:
            rows.append({"summary": {
                "completion_time": result.completion_time,
                "delivered": result.delivered,
                "max_queue": result.max_queue,
                "top_arcs": [[a.format(self.kind), b.format(self.kind), n]
                             for (a, b), n in result.top_arcs(10)]}})
        return "".join(json.dumps(r) + "\n" for r in rows)


def parse_trace(text: str, kind: Optional[GridKind] = None) -> Trace:
    """Read either trace format back; summary lines are ignored."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("{"):
            row = json.loads(line)
            if "summary" in row:
                continue
            items = [(m["packet"], m["from"], m["to"]) for m in row["moves"]]
            t = row["step"]
        else:
            head, _, body = line.partition(":")
            if not head.startswith("step "):
                raise ValueError(f"line {lineno}: expected 'step <t>: ...'")
            t = int(head[5:])
            items = []
            for part in filter(None, (p.strip() for p in body.split(";"))):
                pid, rest = part.split(None, 1)
                a, _, b = rest.partition("->")
                items.append((int(pid), a.strip(), b.strip()))
        if t != len(steps) + 1:
            raise ValueError(f"line {lineno}: step {t} out of order")
        moves = []
        for pid, a, b in items:
            ka, na = parse_node(a)
            kb, nb = parse_node(b)
            kind = kind or ka
            moves.append((int(pid), na, nb))
        steps.append(moves)
    return Trace(kind or GridKind.SQUARE, steps)


@dataclass
class SimResult:
    completion_time: int
    arc_usage: Counter
    max_queue: int
    delivered: bool
    policy: str = ""

    def top_arcs(self, n: int):
        return sorted(self.arc_usage.items(), key=lambda kv: (-kv[1], kv[0]))[:n]


def default_max_steps(instance) -> int:
    env = os.environ.get("GRIDROUTE_MAX_STEPS")
    if env:
        return int(env)
    l, k = instance.limits
    return 8 * (instance.lmax() + 1) * max(l, k) + 8


def run(instance, config: Optional[SimConfig] = None):
    """Simulate ``instance`` to completion or timeout; returns (SimResult, Trace)."""
    from .algorithms import resolve_policy

    config = config or SimConfig()
    kind = instance.kind
    duplex = config.duplex or instance.duplex
    policy = resolve_policy(config.policy, instance, duplex, config)
    max_steps = config.max_steps or default_max_steps(instance)

    packets = [Packet(i, s, d, policy.initial_address(kind, s, d), s)
               for i, (s, d) in enumerate(instance.demands)]
    active = [p for p in packets if p.location != p.destination]
    trace = Trace(kind)
    usage: Counter = Counter()
    max_queue = 0
    t = 0
    while active and t < max_steps:
        t += 1
        queues = defaultdict(list)
        for p in active:
            queues[p.location].append(p)
        moves = []
        for node in sorted(queues):
            queue = queues[node]
            per_arc = Counter(move_node(kind, node, *mv) for p in queue
                              if (mv := policy.next_move(kind, p)) is not None)
            if per_arc:
                max_queue = max(max_queue, max(per_arc.values()))
            for p in policy.decide(kind, node, queue, t):
                comp, sign = policy.next_move(kind, p)
                nxt, rem = address_step(kind, p.location, p.remaining, comp, sign)
                moves.append((p, nxt, rem))
        used = Counter()
        for p, nxt, _ in moves:
            key = (p.location, nxt) if duplex is DuplexMode.FULL else frozenset((p.location, nxt))
            used[key] += 1
            if used[key] > 1:
                raise PolicyError(f"step {t}: {policy.id} overloads {p.location} -> {nxt}")
        step_moves = []
        for p, nxt, rem in moves:
            usage[(p.location, nxt)] += 1
            step_moves.append((p.id, p.location, nxt))
            p.location, p.remaining, p.arrived = nxt, rem, t
            p.hops += 1
        trace.steps.append(sorted(step_moves))
        active = [p for p in active if p.location != p.destination]
    result = SimResult(t, usage, max_queue, not active, policy.id)
    return result, trace


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str  # adjacency, capacity, exclusion, undelivered, hop-count, conservation, window
    step: int
    detail: str


def validate_trace(instance, config: Optional[SimConfig], trace: Trace,
                   shortest_path: bool = True, capacity: int = 1) -> list:
    """Check ``trace`` against the link model; returns a list of violations.

    Written independently of ``run``: only the demands, the grid window and
    the moves are consulted. ``capacity`` relaxes the per-arc (or per-edge)
    limit for transported traces.
    """
    kind = instance.kind
    duplex = (config.duplex if config and config.duplex else None) or instance.duplex
    where = {i: s for i, (s, _) in enumerate(instance.demands)}
    hops = Counter()
    out = []
    for t, moves in enumerate(trace.steps, 1):
        load = Counter()
        seen = set()
        for pid, a, b in moves:
            if pid not in where:
                out.append(Violation("conservation", t, f"unknown packet {pid}"))
                continue
            if pid in seen:
                out.append(Violation("conservation", t, f"packet {pid} moves twice"))
                continue
            seen.add(pid)
            if where[pid] != a:
                out.append(Violation("adjacency", t,
                                     f"packet {pid} is at {where[pid].format(kind)}, not {a.format(kind)}"))
            if not is_lattice_arc(kind, a, b):
                out.append(Violation("adjacency", t,
                                     f"{a.format(kind)} -> {b.format(kind)} is not an arc"))
            if b not in instance.grid:
                out.append(Violation("window", t, f"packet {pid} leaves the grid at {b.format(kind)}"))
            if duplex is DuplexMode.FULL:
                load[(a, b)] += 1
            else:
                load[frozenset((a, b))] += 1
            where[pid] = b
            hops[pid] += 1
        for key, n in load.items():
            if n > capacity:
                if duplex is DuplexMode.FULL:
                    a, b = key
                    out.append(Violation("capacity", t,
                                         f"{n} packets on {a.format(kind)} -> {b.format(kind)}"))
                else:
                    ends = " -- ".join(x.format(kind) for x in sorted(key))
                    out.append(Violation("exclusion", t, f"{n} packets on edge {ends}"))
        if len(where) != len(instance.demands):
            out.append(Violation("conservation", t, "packet count changed"))
    final = len(trace.steps)
    for i, (s, d) in enumerate(instance.demands):
        if where[i] != d:
            out.append(Violation("undelivered", final, f"packet {i} ends at {where[i].format(kind)}"))
        elif shortest_path and hops[i] != distance(kind, s, d):
            out.append(Violation("hop-count", final,
                                 f"packet {i} took {hops[i]} hops for distance {distance(kind, s, d)}"))
    return out
