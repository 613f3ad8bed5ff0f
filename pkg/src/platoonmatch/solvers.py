"""Best-response dynamics, cooperative coordinate ascent, and NE oracles.

Both solvers sweep the vehicles in ascending id order, each updating its
coordinate immediately (Gauss-Seidel style).  A sweep that changes nothing
is a fixed point: for the selfish objective that is a pure Nash
equilibrium, for the cooperative objective a coordinate-wise local maximum
of the common utility.  The selfish solver starts from the preferred-time
profile; the cooperative solver starts from the selfish equilibrium and
refines it.  Because the game is a finite exact potential game and every
accepted move strictly improves the active objective, termination is
guaranteed; the iteration cap only exists to turn a bug into a loud error.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from . import game
from .game import Instance, Profile

#: Gains at or below this threshold count as floating-point noise: a vehicle
#: keeps its current action unless some alternative beats it by more.
GAIN_EPS = 1e-12

_OBJECTIVES = ("self", "cooperative")


class ConvergenceError(RuntimeError):
    """A solve exceeded its sweep cap, which signals a bug, never truncation."""


@dataclass
class SolveReport:
    """Trace of one solver run.

    ``history[k]`` is the profile after sweep ``k`` (``history[0]`` is the
    initial profile); ``objective_trace`` matches it entry by entry, holding
    the potential for the selfish solver and the common utility for the
    cooperative one.  ``rounds`` counts executed sweeps, including the final
    one that confirmed the fixed point.
    """

    final: tuple[float, ...]
    history: list[tuple[float, ...]] = field(repr=False)
    rounds: int = 0
    converged: bool = True
    objective_trace: list[float] = field(default_factory=list)


def _candidate_values(instance: Instance, profile, idx: int, objective: str) -> list[float]:
    """Objective value for each feasible action of vehicle ``idx``, in action order."""
    actions = instance._actions[idx]
    if objective == "self":
        others: dict[float, list[int]] = {}
        for j, t in enumerate(profile):
            if j != idx:
                others.setdefault(t, []).append(j)
        pen = instance.params.deviation_penalty
        pref = instance._pref[idx]
        vals = []
        for a in actions:
            members = others.get(a)
            members = members + [idx] if members else [idx]
            vals.append(game._saving_for_member(instance, idx, members) - pen(a, pref))
        return vals
    trial = list(profile)
    vals = []
    for a in actions:
        trial[idx] = a
        vals.append(game._cooperative_unchecked(instance, trial))
    return vals


def _pick(actions: tuple[float, ...], values: list[float], current: float) -> float:
    """Keep the current action unless something beats it by more than GAIN_EPS;
    otherwise move to the smallest action attaining the maximum."""
    vmax = max(values)
    if values[actions.index(current)] >= vmax - GAIN_EPS:
        return current
    for a, v in zip(actions, values):
        if v == vmax:
            return a
    raise AssertionError("unreachable: max not found among candidates")


def best_response(
    instance: Instance,
    profile: Profile,
    vehicle_id: int,
    objective: str = "self",
) -> float:
    """Best action for one vehicle with the rest of the profile held fixed.

    ``objective`` is ``"self"`` (the vehicle's own utility) or
    ``"cooperative"`` (the sum of all utilities).
    """
    if objective not in _OBJECTIVES:
        raise ValueError(f"objective must be one of {_OBJECTIVES}, got {objective!r}")
    game._check_profile(instance, profile)
    idx = game._index_of(instance, vehicle_id)
    values = _candidate_values(instance, tuple(profile), idx, objective)
    return _pick(instance._actions[idx], values, profile[idx])


def _sweep_solve(
    instance: Instance,
    objective: str,
    max_sweeps: int | None,
    start: tuple[float, ...] | None = None,
) -> SolveReport:
    n = instance.n_vehicles
    if max_sweeps is None:
        max_sweeps = 10 * n * len(instance._all_times)
    metric = (
        game._potential_unchecked if objective == "self" else game._cooperative_unchecked
    )
    s = list(instance._pref if start is None else start)
    history = [tuple(s)]
    trace = [metric(instance, s)]
    rounds = 0
    while True:
        changed = False
        for idx in range(n):
            a = _pick(
                instance._actions[idx],
                _candidate_values(instance, s, idx, objective),
                s[idx],
            )
            if a != s[idx]:
                s[idx] = a
                changed = True
        rounds += 1
        history.append(tuple(s))
        trace.append(metric(instance, s))
        if not changed:
            break
        if rounds >= max_sweeps:
            raise ConvergenceError(
                f"no fixed point after {rounds} sweeps (cap {max_sweeps}); "
                "this should be impossible for a finite exact potential game"
            )
    return SolveReport(
        final=tuple(s),
        history=history,
        rounds=rounds,
        converged=True,
        objective_trace=trace,
    )


def brd_solve(instance: Instance, max_sweeps: int | None = None) -> SolveReport:
    """Sweep best responses from the preferred-time profile to a pure NE.

    The default sweep cap is ``10 * N * |distinct preferred times|``.
    """
    return _sweep_solve(instance, "self", max_sweeps)


def coop_solve(
    instance: Instance,
    max_sweeps: int | None = None,
    start: Profile | None = None,
) -> SolveReport:
    """Cooperative refinement: coordinate ascent on the common utility.

    Runs the same ascending-id sweeps as brd_solve but each vehicle moves to
    the action maximizing the sum of all utilities.  By default the ascent
    starts from the best-response equilibrium, so the result never falls
    below the equilibrium's common utility; greedy ascent from scattered
    preferred times tends to lock in low-value pairings, which is why the
    equilibrium is the better anchor.  Pass ``start`` to ascend from another
    profile instead.
    """
    if start is None:
        start = brd_solve(instance).final
    else:
        game._check_profile(instance, start)
    return _sweep_solve(instance, "cooperative", max_sweeps, start=tuple(start))


def _is_nash_unchecked(instance: Instance, profile, tol: float) -> bool:
    groups = game._groups(profile)
    pen = instance.params.deviation_penalty
    for idx in range(instance.n_vehicles):
        cur = profile[idx]
        pref = instance._pref[idx]
        cur_val = game._saving_for_member(instance, idx, groups[cur]) - pen(cur, pref)
        for a in instance._actions[idx]:
            if a == cur:
                continue
            members = groups.get(a)
            members = members + [idx] if members else [idx]
            val = game._saving_for_member(instance, idx, members) - pen(a, pref)
            if val > cur_val + tol:
                return False
    return True


def is_nash(instance: Instance, profile: Profile, tol: float = GAIN_EPS) -> bool:
    """True iff no vehicle can gain more than ``tol`` by deviating alone."""
    game._check_profile(instance, profile)
    return _is_nash_unchecked(instance, tuple(profile), tol)


def brute_force_nash(instance: Instance, cap: int = 1_000_000) -> set[tuple[float, ...]]:
    """All pure Nash equilibria, by checking every profile against is_nash.

    Raises ValueError when the profile space exceeds ``cap``.  Never empty:
    a finite exact potential game always has a pure NE.
    """
    size = math.prod(len(a) for a in instance._actions)
    if size > cap:
        raise ValueError(f"profile space holds {size} profiles, exceeding the cap {cap}")
    out: set[tuple[float, ...]] = set()
    for s in itertools.product(*instance._actions):
        if _is_nash_unchecked(instance, s, GAIN_EPS):
            out.add(s)
    return out
