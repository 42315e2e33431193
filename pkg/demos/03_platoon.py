"""Vehicle platoons: robustness when messages may only travel forward.

A platoon constrains who can talk to whom: vehicle i can send its state
only a bounded number of positions down the chain. Under that constraint
the cheapest robust wiring is explicit: each lead vehicle feeds the p
vehicles behind it, sensors sit on the last m vehicles, and the tail
keeps only its own state.

Run:  python3 demos/03_platoon.py
"""

from stealthguard import (
    build_separator_graph,
    certify_robustness,
    format_topology,
    max_disjoint_paths,
    synthesize_platoon,
)
from stealthguard.topology import OBSERVER_SINK


def banner(text):
    print()
    print(text)
    print("-" * len(text))


n, m, p = 6, 2, 2

banner(f"Platoon of {n} vehicles, {m} sensed, budget p = {p} (agents only)")
strict = synthesize_platoon(n, m, p, observers_attackable=False)
print(format_topology(strict.topology, p), end="")
print(f"links: {strict.link_count}, certified: {strict.certified}")

banner("Every lead vehicle is guarded by the two directly behind it")
g = build_separator_graph(strict.topology, collapse_observers=True)
for i in range(1, n - m + 1):
    res = max_disjoint_paths(g, f"x{i}", OBSERVER_SINK)
    print(f"x{i}: {res.size} disjoint routes to the sensors, "
          f"bottleneck {sorted(res.witness)}")

banner("The forward-only rule keeps the graph sparse")
for (a, b) in sorted(strict.topology.agent_edges):
    if a != b:
        print(f"  x{a} -> x{b}  (forward by {b - a})")

banner("Letting the adversary also hit sensors costs extra links")
relaxed = synthesize_platoon(n, m, p, observers_attackable=True)
print(f"agents-only optimum: {strict.link_count} links")
print(f"full-surface optimum: {relaxed.link_count} links")
report = certify_robustness(relaxed.topology, p, observers_attackable=True)
print(f"relaxed design certified on the full surface: {report.robust}")

# The strict design cannot survive sensor attacks: the sensed tail
# vehicles keep only their self-loop, so compromising a tail vehicle
# together with its sensor leaves no second route.
report = certify_robustness(strict.topology, p, observers_attackable=True)
print(f"strict design on the full surface: robust = {report.robust}")
ce = report.counterexample
print(f"  deficiency at {ce.agent}: separator {sorted(ce.separator)}, "
      f"attack = agents {sorted(ce.attack.compromised_agents)} + "
      f"observers {sorted(ce.attack.compromised_observers)}")
