"""Command line front-end: ``gridroute <subcommand> ...``.

Exit codes: 0 success, 1 violations / bound breach / failed sweep cell,
2 usage error, 3 simulation timeout, 4 unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import ast
import itertools
import json
import math
import operator
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import analysis, coloring, embeddings
from .algorithms import POLICY_IDS, r_central_time
from .engine import PolicyError, SimConfig, parse_trace, run, validate_trace
from .grid import DuplexMode, GridKind, Node, ball, infinite, rectangle, rhombus
from .instances import (
    Instance, InstanceError, gen_line_adversarial_tri, gen_lk_adversarial_tri,
    gen_r_central, gen_random_lk, gen_random_permutation, gen_rectangle_lk,
    gen_x_adversarial_hex, parse_certificate, parse_instance, serialize_certificate,
    serialize_instance,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_TIMEOUT, EXIT_INPUT = 0, 1, 2, 3, 4

FAMILIES = ("x_adversarial", "line_adversarial", "r_central", "random_perm", "random_lk",
            "rectangle_lk", "lk_adversarial")


class CliError(Exception):
    def __init__(self, msg: str, code: int = EXIT_INPUT):
        super().__init__(msg)
        self.code = code


# ---------------------------------------------------------------------------
# instance construction


@dataclass
class Built:
    instance: Instance
    certificate: object = None
    family: str = ""
    params: dict = field(default_factory=dict)
    policy: str = "auto"  # what "auto" means for this family


def window(kind: GridKind, n: int):
    """Default n-sized window: n x n square, n x n rhombus, radius-n hexagonal ball."""
    if kind is GridKind.SQUARE:
        return rectangle(n, n)
    if kind is GridKind.TRIANGULAR:
        return rhombus(n, n)
    return ball(kind, Node(0, 0, 0), n)


def build_family(family: str, grid=None, duplex=None, lmax=None, l=1, k=1, r=None, n=None,
                 seed=0, sides=2) -> Built:
    kind = GridKind.parse(grid) if isinstance(grid, str) else grid
    dup = DuplexMode(duplex) if isinstance(duplex, str) else duplex
    params = {"family": family, "grid": kind.value if kind else None,
              "duplex": dup.value if dup else None, "lmax": lmax, "l": l, "k": k, "r": r,
              "n": n, "seed": seed, "sides": sides}

    def need(name, value):
        if value is None:
            raise CliError(f"family {family} needs --{name}", EXIT_USAGE)
        return value

    cert = None
    if family == "x_adversarial":
        inst, cert = gen_x_adversarial_hex(need("lmax", lmax), dup or DuplexMode.FULL)
    elif family == "line_adversarial":
        both = int(sides) == 2
        d = dup or (DuplexMode.HALF if both else DuplexMode.FULL)
        inst, cert = gen_line_adversarial_tri(need("lmax", lmax), multiplicity=k, both_sides=both,
                                              duplex=d)
    elif family == "r_central":
        inst = gen_r_central(need("grid", kind), need("r", r), duplex=dup or DuplexMode.FULL)
    elif family == "random_perm":
        inst = gen_random_permutation(window(need("grid", kind), need("n", n)), seed,
                                      dup or DuplexMode.FULL)
    elif family == "random_lk":
        inst = gen_random_lk(window(need("grid", kind), need("n", n)), l, k, need("lmax", lmax),
                             seed, dup or DuplexMode.FULL)
    elif family == "rectangle_lk":
        inst, cert = gen_rectangle_lk(need("grid", kind), l, k, need("lmax", lmax))
        if dup:
            inst = Instance(inst.grid, inst.demands, inst.limits, dup)
    elif family == "lk_adversarial":
        inst = gen_lk_adversarial_tri(l, k, need("lmax", lmax))
        if dup:
            inst = Instance(inst.grid, inst.demands, inst.limits, dup)
    else:
        raise CliError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}", EXIT_USAGE)
    return Built(inst, cert, family, params, "r_central" if family == "r_central" else "auto")


def empty_instance(kind: GridKind, duplex: DuplexMode) -> Instance:
    return Instance(infinite(kind), [], (1, 1), duplex)


def load_instance(path: str, kind=None, duplex=None) -> Instance:
    if path == "empty":
        return empty_instance(kind or GridKind.SQUARE, duplex or DuplexMode.FULL)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    inst = parse_instance(text)
    if duplex is not None and duplex is not inst.duplex:
        inst = Instance(inst.grid, inst.demands, inst.limits, duplex)
    return inst


# ---------------------------------------------------------------------------
# reference bounds


def reference_bounds(built: Built, policy_id: str, duplex: DuplexMode):
    """(lower, upper) time bounds that must hold for this run; upper may be None."""
    inst = built.instance
    kind = inst.kind
    lmax = inst.lmax()
    half = duplex is DuplexMode.HALF
    lb = lmax
    cert = built.certificate
    if cert is not None and not (cert.kind == "edge-congestion" and not half):
        lb = max(lb, cert.claim)
    if built.family == "lk_adversarial":
        l, k = inst.limits
        lb = max(lb, analysis.lb_lk(kind, l, k, lmax)["lb_combined"] * (2 if half else 1))
    base = policy_id.replace("odd_even(", "").rstrip(")")
    ub = None
    if base in ("tri_perm_full", "tri_perm_half", "hex_perm_full", "hex_perm_half"):
        ub = analysis.permutation_bound(kind, duplex, lmax)
    elif base == "square_xy" and inst.grid.finite and inst.limits == (1, 1):
        us = [n.u for n in inst.grid]
        vs = [n.v for n in inst.grid]
        side = max(max(us) - min(us), max(vs) - min(vs)) + 1
        ub = analysis.permutation_bound(kind, duplex, lmax, side)
    elif base == "r_central" and lmax:
        ub = r_central_time(lmax) * (2 if half else 1)
    elif base == "lk_general" and kind is not GridKind.SQUARE:
        l, k = inst.limits
        ub = analysis.ub_lk(kind, l, k, lmax) * (2 if half else 1)
    return lb, ub


@dataclass
class RunReport:
    params: dict
    policy: str
    time: int
    delivered: bool
    lb: int
    ub: Optional[int]
    violations: list
    max_queue: int
    packets: int
    lmax: int

    @property
    def within(self) -> bool:
        return self.lb <= self.time and (self.ub is None or self.time <= self.ub)

    @property
    def ok(self) -> bool:
        return self.delivered and not self.violations and self.within

    def as_dict(self) -> dict:
        return {"params": self.params, "policy": self.policy, "time": self.time,
                "delivered": self.delivered, "lb": self.lb, "ub": self.ub,
                "within": self.within, "violations": [v.kind + ": " + v.detail for v in self.violations],
                "max_queue": self.max_queue, "packets": self.packets, "lmax": self.lmax}


def simulate_built(built: Built, policy="auto", duplex=None, max_steps=None, seed=0,
                   l=None, k=None, r=None, tie_break="id"):
    inst = built.instance
    dup = duplex or inst.duplex
    if policy in (None, "auto"):
        policy = built.policy
    cfg = SimConfig(policy=policy, duplex=dup, max_steps=max_steps, seed=seed, l=l, k=k, r=r,
                    tie_break=tie_break)
    result, trace = run(inst, cfg)
    violations = validate_trace(inst, cfg, trace) if result.delivered else []
    lb, ub = reference_bounds(built, result.policy, dup)
    rep = RunReport(built.params, result.policy, result.completion_time, result.delivered, lb, ub,
                    violations, result.max_queue, len(inst.demands), inst.lmax())
    return rep, result, trace


# ---------------------------------------------------------------------------
# safe expressions for sweep expectations

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.FloorDiv: operator.floordiv, ast.Mod: operator.mod,
           ast.Pow: operator.pow}
_CMPOPS = {ast.Eq: operator.eq, ast.NotEq: operator.ne, ast.Lt: operator.lt, ast.LtE: operator.le,
           ast.Gt: operator.gt, ast.GtE: operator.ge}
_FUNCS = {"comb": math.comb, "min": min, "max": max, "abs": abs, "ceil": math.ceil,
          "floor": math.floor, "isqrt": math.isqrt}


class ExprError(ValueError):
    pass


def parse_expr(text: str, names) -> ast.AST:
    """Parse ``text`` and reject anything but arithmetic, comparisons and a few functions."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExprError(f"bad expression {text!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if isinstance(node, ast.Name):
            if node.id not in names and node.id not in _FUNCS:
                raise ExprError(f"unknown name {node.id!r} in {text!r}")
        elif isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS or node.keywords:
                raise ExprError(f"call not allowed in {text!r}")
        elif isinstance(node, ast.Constant):
            if not isinstance(node.value, (int, float, bool)):
                raise ExprError(f"constant {node.value!r} not allowed")
        elif not isinstance(node, (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Compare, ast.BoolOp,
                                   ast.Load, ast.And, ast.Or, ast.Not, ast.USub, ast.UAdd,
                                   *_BINOPS, *_CMPOPS)):
            raise ExprError(f"{type(node).__name__} not allowed in {text!r}")
    return tree


def eval_expr(tree: ast.AST, env: dict):
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant):
            return node.value
        if isinstance(node, ast.Name):
            return env[node.id] if node.id in env else _FUNCS[node.id]
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp):
            x = ev(node.operand)
            return {ast.USub: lambda: -x, ast.UAdd: lambda: +x, ast.Not: lambda: not x}[type(node.op)]()
        if isinstance(node, ast.BoolOp):
            vals = (ev(v) for v in node.values)
            return all(vals) if isinstance(node.op, ast.And) else any(vals)
        if isinstance(node, ast.Compare):
            left = ev(node.left)
            for op, right in zip(node.ops, node.comparators):
                r = ev(right)
                if not _CMPOPS[type(op)](left, r):
                    return False
                left = r
            return True
        if isinstance(node, ast.Call):
            return _FUNCS[node.func.id](*(ev(a) for a in node.args))
        raise ExprError(f"cannot evaluate {type(node).__name__}")
    return ev(tree)


# ---------------------------------------------------------------------------
# sweeps

RESULT_NAMES = ("time", "lb", "ub", "lmax", "packets", "max_queue", "seed")
CELL_KEYS = ("family", "grid", "duplex", "policy", "tie_break", "params", "seeds", "expect")


def _values(v):
    if isinstance(v, dict) and set(v) == {"range"}:
        a, b = v["range"]
        return list(range(a, b + 1))
    return v if isinstance(v, list) else [v]


def expand_spec(spec: dict, seed: int) -> list:
    """Flatten a sweep spec into (cell index, build kwargs, policy, expectations) jobs."""
    jobs = []
    for ci, cell in enumerate(spec.get("cells", [])):
        unknown = set(cell) - set(CELL_KEYS)
        if unknown:
            raise CliError(f"cell {ci}: unknown keys {sorted(unknown)}")
        if cell.get("family") not in FAMILIES:
            raise CliError(f"cell {ci}: unknown family {cell.get('family')!r}")
        policy = cell.get("policy", "auto")
        if policy != "auto" and policy not in POLICY_IDS:
            raise CliError(f"cell {ci}: unknown policy {policy!r}")
        params = cell.get("params", {})
        names = list(params)
        exprs = [(e, parse_expr(e, set(names) | set(RESULT_NAMES))) for e in cell.get("expect", [])]
        seeds = _values(cell.get("seeds", [seed]))
        for combo in itertools.product(*(_values(params[n]) for n in names)):
            for s in seeds:
                kw = dict(zip(names, combo))
                jobs.append((ci, {"family": cell["family"], "grid": cell.get("grid"),
                                  "duplex": cell.get("duplex"), "seed": s, **kw},
                             (policy, cell.get("tie_break", "id")), exprs))
    return jobs


def run_job(job):
    ci, kw, (policy, tie_break), exprs = job
    row = {"cell": ci, "params": {k: v for k, v in kw.items() if v is not None}, "policy": policy}
    try:
        built = build_family(**kw)
        dup = DuplexMode(kw["duplex"]) if kw.get("duplex") else None
        rep, _, _ = simulate_built(built, policy, dup, seed=kw.get("seed", 0),
                                   l=kw.get("l"), k=kw.get("k"), r=kw.get("r"),
                                   tie_break=tie_break)
    except (ValueError, PolicyError, CliError) as exc:
        row.update(error=str(exc), ok=False)
        return row
    env = {**{k: v for k, v in kw.items() if v is not None}, "time": rep.time, "lb": rep.lb,
           "ub": rep.ub, "lmax": rep.lmax, "packets": rep.packets, "max_queue": rep.max_queue}
    expect = {text: bool(eval_expr(tree, env)) for text, tree in exprs}
    row.update(policy=rep.policy, time=rep.time, lb=rep.lb, ub=rep.ub, within=rep.within,
               delivered=rep.delivered, violations=len(rep.violations), expect=expect,
               ok=rep.ok and all(expect.values()))
    return row


def run_sweep(spec: dict, seed: int = 0, jobs: int = 1) -> list:
    work = expand_spec(spec, seed)
    if jobs > 1 and len(work) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            return list(ex.map(run_job, work))  # map keeps cell order
    return [run_job(j) for j in work]


def _why(row) -> str:
    if "error" in row:
        return row["error"]
    bad = [e for e, ok in row.get("expect", {}).items() if not ok]
    if row.get("violations"):
        bad.append(f"{row['violations']} violations")
    if not row.get("delivered", True):
        bad.append("timeout")
    if not row.get("within", True):
        bad.append("outside [lb, ub]")
    return "; ".join(bad)


def format_rows(rows: list) -> str:
    head = ("cell", "params", "policy", "time", "lb", "ub", "within", "ok")
    body = []
    for r in rows:
        ps = " ".join(f"{k}={v}" for k, v in r["params"].items() if k not in ("family",))
        body.append((str(r["cell"]), f"{r['params'].get('family')} {ps}", str(r.get("policy", "")),
                     str(r.get("time", "-")), str(r.get("lb", "-")),
                     "-" if r.get("ub") is None else str(r["ub"]),
                     str(r.get("within", "-")), "ok" if r["ok"] else "FAIL " + _why(r)))
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in [head, *body]]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands


def _echo(args) -> str:
    return "# args " + json.dumps({k: v for k, v in vars(args).items() if k != "func"}, sort_keys=True)


def _built_from_args(args) -> Built:
    kind = GridKind.parse(args.grid) if args.grid else None
    dup = DuplexMode(args.duplex) if args.duplex else None
    if args.instance:
        inst = load_instance(args.instance, kind, dup)
        cert = None
        if getattr(args, "cert", None):
            cert = parse_certificate(Path(args.cert).read_text())
        return Built(inst, cert, "", {"instance": args.instance})
    if not args.family:
        raise CliError("give --instance or --family", EXIT_USAGE)
    return build_family(args.family, kind, dup, args.lmax, args.l or 1, args.k or 1, args.r,
                        args.n, args.seed, args.sides)


def cmd_simulate(args) -> int:
    built = _built_from_args(args)
    rep, result, trace = simulate_built(built, args.policy, None, args.max_steps, args.seed,
                                        args.l, args.k, args.r, args.tie_break)
    if args.trace_out:
        text = trace.to_jsonl(result) if args.trace_format == "jsonl" else trace.to_text(result)
        Path(args.trace_out).write_text(text)
    if args.json:
        print(json.dumps({**rep.as_dict(), "args": {k: v for k, v in vars(args).items()
                                                     if k != "func"}}))
    else:
        print(_echo(args))
        print(f"policy           {rep.policy}")
        print(f"packets          {rep.packets}")
        print(f"lmax             {rep.lmax}")
        print(f"completion_time  {rep.time}")
        print(f"delivered        {str(rep.delivered).lower()}")
        print(f"max_queue        {rep.max_queue}")
        print(f"bounds           [{rep.lb}, {'-' if rep.ub is None else rep.ub}]"
              f" {'satisfied' if rep.within else 'BREACHED'}")
        print(f"violations       {len(rep.violations)}")
        for v in rep.violations[:20]:
            print(f"  step {v.step}: {v.kind}: {v.detail}")
    if not rep.delivered:
        print(f"timeout after {rep.time} steps", file=sys.stderr)
        return EXIT_TIMEOUT
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_sweep(args) -> int:
    try:
        spec = json.loads(Path(args.spec).read_text() or "{}")
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read sweep spec: {exc}") from None
    if not isinstance(spec, dict):
        raise CliError("sweep spec must be a JSON object")
    seed = spec.get("seed", args.seed)
    rows = run_sweep(spec, seed, args.jobs)
    if args.json:
        for r in rows:
            print(json.dumps(r))
    else:
        print(_echo(args))
        if rows:
            print(format_rows(rows))
        bad = sum(not r["ok"] for r in rows)
        print(f"# {len(rows)} rows, {bad} failed")
    return EXIT_OK if all(r["ok"] for r in rows) else EXIT_FAIL


def cmd_bounds(args) -> int:
    kind = GridKind.parse(args.grid)
    dup = DuplexMode(args.duplex)
    inst = cut = None
    if args.instance:
        inst = load_instance(args.instance, kind, dup)
        if args.cert:
            cut = parse_certificate(Path(args.cert).read_text()).cut
    rep = analysis.bound_report(kind, args.l, args.k, args.lmax, dup, inst, cut)
    print(rep.table())
    print(json.dumps(rep.as_dict()))
    return EXIT_OK


def cmd_generate(args) -> int:
    built = _built_from_args(args)
    text = serialize_instance(built.instance)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if built.certificate is not None:
        ctext = serialize_certificate(built.certificate, built.instance.kind)
        if args.cert_out:
            Path(args.cert_out).write_text(ctext)
        elif args.out:
            Path(args.out + ".cert").write_text(ctext)
    print(f"# {built.family}: {len(built.instance.demands)} demands, lmax {built.instance.lmax()}",
          file=sys.stderr)
    return EXIT_OK


def cmd_embed(args) -> int:
    if args.source != "square":
        raise CliError("only square traces can be embedded", EXIT_USAGE)
    emb = embeddings.make_embedding(args.to)
    inst = load_instance(args.instance)
    trace = parse_trace(Path(args.trace).read_text(), GridKind.SQUARE)
    try:
        target, out, violations = embeddings.check_transport(emb, inst, trace)
    except embeddings.EmbeddingError as exc:
        raise CliError(str(exc)) from None
    text = out.to_jsonl() if args.trace_format == "jsonl" else out.to_text()
    if args.out:
        Path(args.out).write_text(text)
        if args.instance_out:
            Path(args.instance_out).write_text(serialize_instance(target))
    else:
        sys.stdout.write(text)
    print(f"# {emb.name}: {len(trace.steps)} square steps -> {len(out.steps)} steps, "
          f"{len(violations)} violations at load {emb.load}", file=sys.stderr)
    for v in violations[:20]:
        print(f"  step {v.step}: {v.kind}: {v.detail}", file=sys.stderr)
    return EXIT_FAIL if violations else EXIT_OK


def cmd_color(args) -> int:
    inst = load_instance(args.instance)
    g = coloring.build_bipartite(inst)
    try:
        col = coloring.COLORING_METHODS[args.method](g)
    except coloring.ColoringTooLarge as exc:
        raise CliError(str(exc)) from None
    costs = col.costs(g)
    print(f"# degree {g.degree()}, {len(g.edges)} edges, method {args.method}")
    for i, (m, c) in enumerate(zip(col.matchings, costs)):
        print(f"matching {i} cost {c}: {' '.join(str(e) for e in m)}")
    print(f"objective {sum(costs)}")
    problems = col.problems(g)
    for p in problems:
        print(f"invalid: {p}")
    if problems:
        return EXIT_FAIL
    if args.schedule:
        res = coloring.schedule_from_coloring(inst, col, SimConfig(policy=args.policy))
        print(f"schedule {' + '.join(map(str, res.phase_times)) or '0'} = {res.completion_time}")
        if not res.delivered:
            return EXIT_TIMEOUT
    return EXIT_OK


def cmd_verify(args) -> int:
    dup = DuplexMode(args.duplex) if args.duplex else None
    inst = load_instance(args.instance, None, dup)
    trace = parse_trace(Path(args.trace).read_text(), inst.kind)
    violations = validate_trace(inst, None, trace, shortest_path=not args.any_path,
                                capacity=args.capacity)
    for v in violations:
        print(f"step {v.step}: {v.kind}: {v.detail}")
    print(f"# {len(trace.steps)} steps, {len(violations)} violations")
    return EXIT_FAIL if violations else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _instance_flags(p, family=True):
    p.add_argument("--instance", help="instance file, or 'empty'")
    if family:
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--cert", help="certificate file for --instance")
    p.add_argument("--grid", choices=[g.value for g in GridKind])
    p.add_argument("--duplex", choices=[d.value for d in DuplexMode])
    p.add_argument("--lmax", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--n", type=int, help="window size for random families")
    p.add_argument("--sides", type=int, choices=(1, 2), default=2,
                   help="line family: senders on one or both sides")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gridroute", description="Packet routing on plane grids.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a policy on one instance")
    _instance_flags(p)
    p.add_argument("--policy", default="auto", choices=("auto",) + POLICY_IDS)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--tie-break", choices=("id", "farthest"), default="id",
                   help="lk_general: who wins a contested negative arc")
    p.add_argument("--trace-out")
    p.add_argument("--trace-format", choices=("text", "jsonl"), default="text")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a JSON experiment matrix")
    p.add_argument("spec")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="closed-form (l,k) bounds")
    p.add_argument("--grid", required=True, choices=[g.value for g in GridKind])
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lmax", type=int, required=True)
    p.add_argument("--duplex", choices=[d.value for d in DuplexMode], default="full")
    p.add_argument("--instance")
    p.add_argument("--cert")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("generate", help="write an instance (and certificate) file")
    _instance_flags(p)
    p.add_argument("--out")
    p.add_argument("--cert-out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("embed", help="carry a square trace to another grid")
    p.add_argument("--from", dest="source", default="square")
    p.add_argument("--to", required=True, choices=("tri", "hex"))
    p.add_argument("--trace", required=True)
    p.add_argument("--instance", required=True, help="square instance the trace belongs to")
    p.add_argument("--out")
    p.add_argument("--instance-out")
    p.add_argument("--trace-format", choices=("text", "jsonl"), default="text")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("color", help="weighted bipartite edge colouring of the demands")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=tuple(coloring.COLORING_METHODS), default="greedy")
    p.add_argument("--schedule", action="store_true")
    p.add_argument("--policy", default="auto")
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("verify", help="check a trace against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--trace", required=True)
    p.add_argument("--duplex", choices=[d.value for d in DuplexMode])
    p.add_argument("--any-path", action="store_true", help="do not require shortest paths")
    p.add_argument("--capacity", type=int, default=1)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (InstanceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PolicyError as exc:
        print(f"policy error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
