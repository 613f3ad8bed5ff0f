"""Walk through the model on two trucks sharing part of their route.

Vehicle 1 heads to v4 and prefers to leave at t=0; vehicle 2 heads to v5
and prefers t=100.  Their routes share the first 160 km, so departing
together saves k_p/2 dollars per shared meter for each of them, while the
one that moves pays k_t per second of deviation.
"""

from platoonmatch import (
    Instance,
    Vehicle,
    evaluate,
    paper_fig3,
    potential,
    vehicle_utility,
)

net = paper_fig3()
print(net)
instance = Instance(
    net,
    [
        Vehicle(1, "v4", 0.0, (-500.0, 500.0)),
        Vehicle(2, "v5", 100.0, (-400.0, 600.0)),
    ],
)

print("\nutility and potential over the whole 2x2 profile space:")
profiles = [(0.0, 0.0), (0.0, 100.0), (100.0, 0.0), (100.0, 100.0)]
print(f"{'profile':>18} {'u1':>8} {'u2':>8} {'potential':>10}")
for s in profiles:
    u1 = vehicle_utility(instance, s, 1)
    u2 = vehicle_utility(instance, s, 2)
    print(f"{str(s):>18} {u1:8.3f} {u2:8.3f} {potential(instance, s):10.3f}")

print("\nexact-potential check: vehicle 2 switching 100 -> 0 with s1 = 0")
du = vehicle_utility(instance, (0.0, 0.0), 2) - vehicle_utility(instance, (0.0, 100.0), 2)
dphi = potential(instance, (0.0, 0.0)) - potential(instance, (0.0, 100.0))
print(f"  utility change {du:+.3f}, potential change {dphi:+.3f}")

print("\nfull outcome when both leave at t=0:")
out = evaluate(instance, (0.0, 0.0))
print(f"  platoons: {out.partition}")
print(f"  utilities: {out.utilities}")
print(f"  total fuel saving: {out.total_fuel_saving} liters")
