"""Cross-check the sweep solver against exhaustive equilibrium enumeration.

For small instances every profile can be tested directly for profitable
unilateral deviations.  The equilibrium set is never empty (the game has an
exact potential), it contains whatever brd_solve returns, and the profile
with the highest potential is always one of the equilibria.
"""

import itertools

import numpy as np

from platoonmatch import (
    Instance,
    ScenarioConfig,
    Vehicle,
    brd_solve,
    brute_force_nash,
    feasible_actions,
    generate_scenario,
    paper_fig3,
    potential,
)

net = paper_fig3()

print("two identical trucks to v5, preferred times 0 and 100:")
pair = Instance(
    net,
    [
        Vehicle(1, "v5", 0.0, (-500.0, 500.0)),
        Vehicle(2, "v5", 100.0, (-400.0, 600.0)),
    ],
)
equilibria = brute_force_nash(pair)
for s in sorted(equilibria):
    print(f"  equilibrium: {s}  potential {potential(pair, s):.3f}")
print(f"  brd_solve answer {brd_solve(pair).final} is in the set: "
      f"{brd_solve(pair).final in equilibria}")

print("\nrandom 4-vehicle draws, solver vs oracle vs potential argmax:")
rng = np.random.default_rng(2)
for k in range(5):
    config = ScenarioConfig(
        network=net, n_vehicles=4, alpha=float(rng.uniform(100, 900)),
        seed=int(rng.integers(0, 2**32)),
    )
    inst = generate_scenario(config)
    equilibria = brute_force_nash(inst)
    answer = brd_solve(inst).final
    actions = [feasible_actions(inst, i + 1) for i in range(4)]
    best = max(itertools.product(*actions), key=lambda s: potential(inst, s))
    print(f"  draw {k}: {len(equilibria):2d} equilibria; solver answer included: "
          f"{answer in equilibria}; potential argmax included: {best in equilibria}")
