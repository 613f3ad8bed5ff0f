"""Command-line front end: scenario files, solves, oracle checks, sweeps.

Scenario files are flat text, one directive per line, ``#`` comments::

    network preset paper-fig3     # or explicit: root first, then edges
    network root v1
    network node v9               # optional; edge endpoints are implied
    network edge v1 v2 80000
    param k_p 5e-05
    param k_t 0.015
    vehicle v4 0 -500 500         # destination preferred window_lo window_hi
    generate n 10                 # generator section, alternative to vehicles
    generate alpha 300
    generate halfwidth 500
    generate pool v2 v3 v4
    generate seed 42

Exactly one of the vehicle lines or the generate section must be present;
a preset excludes explicit network lines; with explicit edges the root must
be declared first.  Vehicle ids are assigned 1..N in file order.  Units are
fixed: seconds, meters, dollars, liters.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import (
    ScenarioConfig,
    default_alpha_grid,
    generate_scenario,
    sweep_alpha,
    trend_summary,
)
from .game import Instance, ModelParams, Vehicle, evaluate
from .network import PRESETS, build_network
from .solvers import ConvergenceError, brd_solve, brute_force_nash, coop_solve, is_nash


class ScenarioError(ValueError):
    """Scenario file rejected; the message is anchored to the offending line."""


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# scenario parsing


class _Parser:
    def __init__(self):
        self.preset = None
        self.root = None
        self.root_line = None
        self.nodes: list[str] = []
        self.edges: list[tuple[str, str, float]] = []
        self.edge_lines: dict[tuple[str, str], int] = {}
        self.params: dict[str, float] = {}
        self.vehicles: list[tuple[str, float, float, float]] = []
        self.vehicle_lines: list[int] = []
        self.gen: dict[str, object] = {}
        self.net_anchor = None  # first network directive line, for late errors

    def fail(self, lineno: int, msg: str):
        raise ScenarioError(f"line {lineno}: {msg}")

    def feed(self, lineno: int, line: str):
        text = line.split("#", 1)[0].strip()
        if not text:
            return
        tokens = text.split()
        head = tokens[0]
        if head == "network":
            self._network(lineno, tokens[1:])
        elif head == "param":
            self._param(lineno, tokens[1:])
        elif head == "vehicle":
            self._vehicle(lineno, tokens[1:])
        elif head == "generate":
            self._generate(lineno, tokens[1:])
        else:
            self.fail(lineno, f"unknown directive {head!r}")

    def _network(self, lineno, rest):
        if self.net_anchor is None:
            self.net_anchor = lineno
        if not rest:
            self.fail(lineno, "incomplete network directive")
        kind = rest[0]
        if kind == "preset":
            if len(rest) != 2:
                self.fail(lineno, "usage: network preset <name>")
            if self.preset is not None:
                self.fail(lineno, "preset already declared")
            if self.root is not None or self.edges or self.nodes:
                self.fail(lineno, "a preset cannot be combined with explicit network lines")
            if rest[1] not in PRESETS:
                known = ", ".join(sorted(PRESETS))
                self.fail(lineno, f"unknown preset {rest[1]!r} (known: {known})")
            self.preset = rest[1]
        elif kind == "root":
            if len(rest) != 2:
                self.fail(lineno, "usage: network root <node>")
            if self.preset is not None:
                self.fail(lineno, "explicit root cannot be combined with a preset")
            if self.root is not None:
                self.fail(lineno, "root already declared")
            if self.edges:
                self.fail(lineno, "the root must be declared before any edge")
            self.root, self.root_line = rest[1], lineno
        elif kind == "node":
            if len(rest) != 2:
                self.fail(lineno, "usage: network node <node>")
            if self.preset is not None:
                self.fail(lineno, "explicit nodes cannot be combined with a preset")
            self.nodes.append(rest[1])
        elif kind == "edge":
            if len(rest) != 4:
                self.fail(lineno, "usage: network edge <tail> <head> <length_m>")
            if self.preset is not None:
                self.fail(lineno, "explicit edges cannot be combined with a preset")
            if self.root is None:
                self.fail(lineno, "declare 'network root' before edges")
            tail, head = rest[1], rest[2]
            length = self._float(lineno, rest[3], "edge length")
            if not length > 0:
                self.fail(lineno, f"edge {tail}->{head} must have a positive length, got {rest[3]}")
            if (tail, head) in self.edge_lines:
                self.fail(lineno, f"duplicate edge {tail}->{head} (first at line {self.edge_lines[(tail, head)]})")
            if head == self.root:
                self.fail(lineno, f"edge {tail}->{head} enters the root {self.root}")
            for t, h, _ in self.edges:
                if h == head:
                    self.fail(lineno, f"node {head} has more than one incoming edge: {t}->{h} and {tail}->{head}")
                if t == self.root and tail == self.root:
                    self.fail(lineno, f"root {self.root} already has outgoing edge {t}->{h}; extra edge {tail}->{head} is not allowed")
            self.edges.append((tail, head, length))
            self.edge_lines[(tail, head)] = lineno
        else:
            self.fail(lineno, f"unknown network directive {kind!r}")

    def _param(self, lineno, rest):
        if len(rest) != 2 or rest[0] not in ("k_p", "k_t"):
            self.fail(lineno, "usage: param k_p|k_t <value>")
        value = self._float(lineno, rest[1], rest[0])
        if value < 0:
            self.fail(lineno, f"{rest[0]} must be >= 0, got {rest[1]}")
        if rest[0] in self.params:
            self.fail(lineno, f"{rest[0]} already declared")
        self.params[rest[0]] = value

    def _vehicle(self, lineno, rest):
        if self.gen:
            self.fail(lineno, "explicit vehicles cannot be combined with a generate section")
        if len(rest) != 4:
            self.fail(lineno, "usage: vehicle <destination> <preferred> <window_lo> <window_hi>")
        dest = rest[0]
        pref = self._float(lineno, rest[1], "preferred time")
        lo = self._float(lineno, rest[2], "window_lo")
        hi = self._float(lineno, rest[3], "window_hi")
        if not lo <= pref <= hi:
            self.fail(lineno, f"preferred time {rest[1]} outside window [{rest[2]}, {rest[3]}]")
        self.vehicles.append((dest, pref, lo, hi))
        self.vehicle_lines.append(lineno)

    def _generate(self, lineno, rest):
        if self.vehicles:
            self.fail(lineno, "a generate section cannot be combined with explicit vehicles")
        if not rest:
            self.fail(lineno, "incomplete generate directive")
        key = rest[0]
        if key in self.gen:
            self.fail(lineno, f"generate {key} already declared")
        if key == "n":
            if len(rest) != 2:
                self.fail(lineno, "usage: generate n <count>")
            n = self._int(lineno, rest[1], "vehicle count")
            if n < 1:
                self.fail(lineno, f"vehicle count must be >= 1, got {n}")
            self.gen["n"] = n
        elif key == "alpha":
            if len(rest) != 2:
                self.fail(lineno, "usage: generate alpha <seconds>")
            alpha = self._float(lineno, rest[1], "alpha")
            if alpha < 0:
                self.fail(lineno, f"alpha must be >= 0, got {rest[1]}")
            self.gen["alpha"] = alpha
        elif key == "halfwidth":
            if len(rest) != 2:
                self.fail(lineno, "usage: generate halfwidth <seconds>")
            h = self._float(lineno, rest[1], "halfwidth")
            if h < 0:
                self.fail(lineno, f"halfwidth must be >= 0, got {rest[1]}")
            self.gen["halfwidth"] = h
        elif key == "seed":
            if len(rest) != 2:
                self.fail(lineno, "usage: generate seed <int>")
            seed = self._int(lineno, rest[1], "seed")
            if seed < 0:
                self.fail(lineno, f"seed must be >= 0, got {seed}")
            self.gen["seed"] = seed
        elif key == "pool":
            if len(rest) < 2:
                self.fail(lineno, "usage: generate pool <node> [<node> ...]")
            self.gen["pool"] = tuple(rest[1:])
            self.gen["pool_line"] = lineno
        else:
            self.fail(lineno, f"unknown generate directive {key!r}")

    def _float(self, lineno, token, what) -> float:
        try:
            return float(token)
        except ValueError:
            self.fail(lineno, f"{what} must be a number, got {token!r}")

    def _int(self, lineno, token, what) -> int:
        try:
            return int(token)
        except ValueError:
            self.fail(lineno, f"{what} must be an integer, got {token!r}")


def _parse_text(text: str) -> _Parser:
    parser = _Parser()
    for lineno, line in enumerate(text.splitlines(), start=1):
        parser.feed(lineno, line)
    return parser


def load_scenario(path: str | Path, seed_override: int | None = None) -> Instance:
    """Parse a scenario file into an Instance, resolving any generator section.

    ``seed_override`` replaces the file's generator seed (explicit-vehicle
    files ignore it: they contain no randomness).
    """
    path = Path(path)
    parsed = _parse_text(path.read_text())

    if parsed.preset is not None:
        network = PRESETS[parsed.preset]()
    elif parsed.edges:
        nodes = set(parsed.nodes) | {parsed.root}
        for t, h, _ in parsed.edges:
            nodes.update((t, h))
        try:
            network = build_network(nodes, parsed.edges, parsed.root)
        except ValueError as exc:
            raise ScenarioError(f"line {parsed.net_anchor}: {exc}") from exc
    else:
        raise ScenarioError("scenario has no network section (preset or root+edges)")

    params = ModelParams(
        k_p=parsed.params.get("k_p", 5e-5),
        k_t=parsed.params.get("k_t", 1.5e-2),
    )

    if parsed.vehicles and parsed.gen:
        raise ScenarioError("scenario mixes explicit vehicles with a generate section")
    if parsed.vehicles:
        for lineno, (dest, _, _, _) in zip(parsed.vehicle_lines, parsed.vehicles):
            if dest not in network.nodes:
                raise ScenarioError(f"line {lineno}: unknown destination {dest!r}")
            if dest == network.root:
                raise ScenarioError(
                    f"line {lineno}: destination equals the origin {network.root!r}"
                )
        vehicles = [
            Vehicle(id=i + 1, destination=dest, preferred_time=pref, window=(lo, hi))
            for i, (dest, pref, lo, hi) in enumerate(parsed.vehicles)
        ]
        try:
            return Instance(network, vehicles, params)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from exc
    if parsed.gen:
        if "n" not in parsed.gen:
            raise ScenarioError("generate section is missing 'generate n'")
        if "alpha" not in parsed.gen:
            raise ScenarioError("generate section is missing 'generate alpha'")
        pool = parsed.gen.get("pool", ())
        seed = parsed.gen.get("seed", 0)
        if seed_override is not None:
            seed = seed_override
        try:
            config = ScenarioConfig(
                network=network,
                n_vehicles=parsed.gen["n"],
                alpha=parsed.gen["alpha"],
                destination_pool=pool,
                seed=seed,
                window_halfwidth=parsed.gen.get("halfwidth", 500.0),
                params=params,
            )
        except ValueError as exc:
            anchor = parsed.gen.get("pool_line")
            prefix = f"line {anchor}: " if anchor and "pool" in str(exc) else ""
            raise ScenarioError(f"{prefix}{exc}") from exc
        return generate_scenario(config)
    raise ScenarioError("scenario defines neither vehicles nor a generate section")


def dump_scenario(instance: Instance) -> str:
    """Serialize an instance as a scenario file that re-parses identically."""
    params = instance.params
    if params.saving is not None or params.penalty is not None:
        raise ValueError("custom saving/penalty functions cannot be serialized")
    lines = ["# platoonmatch scenario"]
    net = instance.network
    lines.append(f"network root {net.root}")
    for tail, head, length in net.edges:
        lines.append(f"network edge {tail} {head} {_fmt(length)}")
    lines.append(f"param k_p {_fmt(params.k_p)}")
    lines.append(f"param k_t {_fmt(params.k_t)}")
    for v in instance.vehicles:
        lo, hi = v.window
        lines.append(
            f"vehicle {v.destination} {_fmt(v.preferred_time)} {_fmt(lo)} {_fmt(hi)}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# output rendering


def _solve_payload(instance: Instance, report, mode: str) -> dict:
    outcome = evaluate(instance, report.final)
    return {
        "mode": mode,
        "profile": list(report.final),
        "partition": [
            {"time": t, "vehicles": list(members)} for t, members in outcome.partition
        ],
        "utilities": list(outcome.utilities),
        "potential": outcome.potential,
        "total_fuel_saving": outcome.total_fuel_saving,
        "nonplatooning_fraction": outcome.nonplatooning_fraction,
        "rounds": report.rounds,
        "converged": report.converged,
    }


def _solve_csv(instance: Instance, payload: dict) -> str:
    platoon_of = {}
    for k, entry in enumerate(payload["partition"], start=1):
        for vid in entry["vehicles"]:
            platoon_of[vid] = k
    lines = ["vehicle,destination,preferred_time,chosen_time,platoon,utility"]
    for v in instance.vehicles:
        lines.append(
            ",".join(
                [
                    str(v.id),
                    v.destination,
                    _fmt(v.preferred_time),
                    _fmt(payload["profile"][v.id - 1]),
                    str(platoon_of[v.id]),
                    _fmt(payload["utilities"][v.id - 1]),
                ]
            )
        )
    for key in ("potential", "total_fuel_saving", "nonplatooning_fraction", "rounds"):
        lines.append(f"# {key}={payload[key]!r}")
    return "\n".join(lines) + "\n"


def _write_out(text: str, out: str | None):
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_solve(args) -> int:
    instance = load_scenario(args.scenario, seed_override=args.seed)
    if args.dump_scenario:
        Path(args.dump_scenario).write_text(dump_scenario(instance))
    report = brd_solve(instance) if args.mode == "ne" else coop_solve(instance)
    payload = _solve_payload(instance, report, args.mode)
    if args.format == "json":
        _write_out(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        _write_out(_solve_csv(instance, payload), args.out)
    return 0


def cmd_oracle(args) -> int:
    instance = load_scenario(args.scenario, seed_override=args.seed)
    equilibria = brute_force_nash(instance, cap=args.cap)
    report = brd_solve(instance)
    print(f"pure Nash equilibria: {len(equilibria)}")
    for profile in sorted(equilibria):
        print("  " + " ".join(_fmt(t) for t in profile))
    print("best-response answer: " + " ".join(_fmt(t) for t in report.final))
    member = report.final in equilibria
    print(f"best-response answer is an equilibrium: {member}")
    return 0 if equilibria and member else 1


def _parse_alphas(spec: str) -> list[float]:
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"alpha range must be start:stop:step, got {spec!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError(f"alpha step must be > 0, got {step}")
        out = []
        k = 0
        while start + k * step <= stop + 1e-9:
            out.append(start + k * step)
            k += 1
        return out
    return [float(p) for p in spec.split(",") if p.strip()]


def cmd_sweep(args) -> int:
    network = PRESETS[args.preset]()
    config = ScenarioConfig(
        network=network,
        n_vehicles=args.n,
        alpha=0.0,
        seed=args.seed,
        window_halfwidth=args.halfwidth,
        params=ModelParams(k_p=args.kp, k_t=args.kt),
    )
    alphas = _parse_alphas(args.alphas) if args.alphas else list(default_alpha_grid())
    result = sweep_alpha(config, alphas, args.reps)
    _write_out(result.to_csv(), args.out)
    for key, rho in trend_summary(result).items():
        print(f"spearman {key} vs alpha: {rho:+.3f}")
    return 0


def cmd_demo_fig4(args) -> int:
    network = PRESETS["paper-fig3"]()
    config = ScenarioConfig(network=network, n_vehicles=5, alpha=15000.0, seed=args.seed)
    instance = generate_scenario(config)
    print("vehicles (id, destination, preferred time):")
    for v in instance.vehicles:
        print(f"  {v.id}  {v.destination:>4}  {v.preferred_time:12.3f}")
    report = brd_solve(instance)
    for k, profile in enumerate(report.history):
        print(f"sweep {k}: " + " ".join(f"{t:12.3f}" for t in profile))
    outcome = evaluate(instance, report.final)
    print("platoons:")
    for t, members in outcome.partition:
        print(f"  t={t:.3f}  vehicles {list(members)}")
    print(f"rounds: {report.rounds}")
    print(f"total fuel saving: {outcome.total_fuel_saving:.6f} liters")
    print(f"nonplatooning fraction: {outcome.nonplatooning_fraction:.3f}")
    nash = is_nash(instance, report.final)
    print(f"is_nash: {nash}")
    return 0 if nash else 1


# ---------------------------------------------------------------------------
# argument parsing


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="platoonmatch",
        description="Departure-time platoon matching: equilibrium and cooperative solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one scenario file")
    p_solve.add_argument("scenario", help="path to a scenario file")
    p_solve.add_argument("--mode", choices=("ne", "coop"), default="ne")
    p_solve.add_argument("--out", default=None, help="output path (default stdout)")
    p_solve.add_argument("--format", choices=("json", "csv"), default="json")
    p_solve.add_argument("--seed", type=int, default=None, help="override the generator seed")
    p_solve.add_argument("--dump-scenario", default=None, metavar="PATH",
                         help="also write the resolved instance as a scenario file")
    p_solve.set_defaults(func=cmd_solve)

    p_oracle = sub.add_parser("oracle", help="enumerate all pure NE and check the solver")
    p_oracle.add_argument("scenario")
    p_oracle.add_argument("--cap", type=int, default=1_000_000,
                          help="maximum profile-space size to enumerate")
    p_oracle.add_argument("--seed", type=int, default=None)
    p_oracle.set_defaults(func=cmd_oracle)

    p_sweep = sub.add_parser("sweep", help="Monte-Carlo sweep over alpha")
    p_sweep.add_argument("--preset", choices=sorted(PRESETS), default="paper-fig3")
    p_sweep.add_argument("--n", type=int, default=10, help="vehicles per replication")
    p_sweep.add_argument("--alphas", default=None,
                         help="comma list or start:stop:step (default 0:1500:150)")
    p_sweep.add_argument("--reps", type=int, default=100)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--halfwidth", type=float, default=500.0)
    p_sweep.add_argument("--kp", type=float, default=5e-5)
    p_sweep.add_argument("--kt", type=float, default=1.5e-2)
    p_sweep.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_demo = sub.add_parser("demo-fig4", help="five-vehicle convergence demo with sweep trace")
    p_demo.add_argument("--seed", type=int, default=60)
    p_demo.set_defaults(func=cmd_demo_fig4)

    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
