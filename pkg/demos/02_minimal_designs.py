"""Designing the cheapest robust network, and choosing how many sensors.

The minimum number of communication links that withstands p simultaneous
compromises has a closed form in both attack models:

    sensors attackable too:   n*p + n - m
    agents only:              (n-m)*p + n

This script builds those optima, verifies each certificate, and then
frees the sensor count to trade hardware (K2 per sensor) against
communication (K1 per link).

Run:  python3 demos/02_minimal_designs.py
"""

from stealthguard import (
    SynthesisSpec,
    certify_robustness,
    format_topology,
    min_links_value,
    optimal_sensor_count,
    synthesize,
)


def banner(text):
    print()
    print(text)
    print("-" * len(text))


banner("Minimum links for n = 8 agents, budget p = 2")
print(f"{'m':>3} {'full surface':>14} {'agents only':>13}")
for m in range(2, 9):
    full = min_links_value(8, m, 2, observers_attackable=True)
    agents = min_links_value(8, m, 2, observers_attackable=False)
    print(f"{m:>3} {full:>14} {agents:>13}")
print("more sensors always buy fewer links on the full surface,")
print("and buy p links apiece when only agents can be compromised")

banner("The dense optimum for n = 4, m = 2, p = 2")
res = synthesize(SynthesisSpec(n=4, m=2, p=2))
print(format_topology(res.topology, 2), end="")
print(f"links: {res.link_count} (closed form {min_links_value(4, 2, 2)}), "
      f"certified: {res.certified}")

banner("The same numbers when sensors are trusted")
res = synthesize(SynthesisSpec(n=4, m=2, p=2, observers_attackable=False))
print(format_topology(res.topology, 2), end="")
print(f"links: {res.link_count} (closed form "
      f"{min_links_value(4, 2, 2, observers_attackable=False)}), certified: {res.certified}")

# A design is only as good as its certificate: re-check both.
for flag in (True, False):
    built = synthesize(SynthesisSpec(n=4, m=2, p=2, observers_attackable=flag))
    assert certify_robustness(built.topology, 2, observers_attackable=flag).robust

banner("Problem: how many sensors should we buy?")
# total cost = K1 * links + K2 * sensors, sensor count free in [p, n].
# The link count is affine in m, so the optimum sits at an endpoint and
# flips at a cost threshold: K2 = K1 on the full surface, K2 = K1*p when
# only agents are attackable.
n, p = 10, 3
print(f"n = {n}, p = {p}")
print(f"{'K1':>5} {'K2':>5} {'class':>7} {'m*':>4} {'cost':>8}")
for k1, k2, flag in [
    (1.0, 2.0, True),
    (1.0, 0.5, True),
    (1.0, 1.0, True),   # tie: prefer fewer sensors
    (1.0, 4.0, False),
    (1.0, 2.0, False),
    (1.0, 3.0, False),  # tie at K2 = K1*p: prefer fewer sensors
]:
    m_star, cost = optimal_sensor_count(n, p, k1, k2, observers_attackable=flag)
    label = "xy" if flag else "x"
    print(f"{k1:>5.1f} {k2:>5.1f} {label:>7} {m_star:>4} {cost:>8.1f}")

banner("Brute-force confirmation of the endpoint rule")
worst = 0.0
for k1, k2 in [(0.3, 2.7), (2.0, 0.4), (1.1, 1.1), (0.9, 2.6)]:
    for flag in (True, False):
        m_star, cost = optimal_sensor_count(n, p, k1, k2, observers_attackable=flag)
        scan = min(k1 * min_links_value(n, m, p, flag) + k2 * m for m in range(p, n + 1))
        worst = max(worst, abs(cost - scan))
print(f"largest deviation from the exhaustive scan: {worst:.1e}")
