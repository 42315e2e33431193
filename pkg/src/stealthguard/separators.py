"""Vertex separators, disjoint-path certificates and robustness verdicts.

The workhorse is a unit-vertex-capacity max flow: every graph vertex is
split into an entry and an exit copy joined by a capacity-1 arc, original
edges get effectively unlimited capacity, and the flow value between two
terminals then equals the maximum number of internally vertex-disjoint
paths. By duality that value also equals the smallest vertex separator,
and the saturated split arcs on the source side of the final residual
graph form a canonical minimum separator (the one nearest the source).
Augmentation is by shortest path (breadth-first search), so results are
deterministic for a fixed input.

All functions are pure; per-agent certification queries are independent
and could run concurrently, the implementation just runs them in order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .topology import (
    OBSERVER_SINK,
    AttackScenario,
    DcsTopology,
    Digraph,
    StructuredSystem,
    agent_id,
    build_attack_graph,
    build_separator_graph,
    parse_agent_id,
    parse_observer_id,
)

_SUPER_SOURCE = "_S"
_SUPER_SINK = "_T"


class InfeasibilityError(ValueError):
    """No topology can meet the requested robustness level."""


@dataclass(frozen=True)
class SeparatorResult:
    """Outcome of a disjoint-path / separator query.

    ``size`` is None exactly when no finite separator exists (the endpoints
    are adjacent); otherwise size == len(witness) == len(disjoint_paths).
    """

    size: int | None
    witness: frozenset | None
    disjoint_paths: tuple

    @property
    def separable(self) -> bool:
        return self.size is not None


@dataclass(frozen=True)
class LinkingResult:
    """Maximum family of fully vertex-disjoint attack-to-sensor paths."""

    size: int
    paths: tuple


@dataclass(frozen=True)
class Counterexample:
    """A deficient separator converted into a concrete attack set."""

    agent: str
    separator: frozenset
    attack: AttackScenario


@dataclass(frozen=True)
class RobustnessReport:
    """Verdict of :func:`certify_robustness`.

    ``per_agent_min_separator`` records, for every certified agent, the
    smallest separator cutting it off from the sensor sink, saturated at
    ``p`` (the search stops augmenting once the budget is matched, so a
    recorded value of p means "at least p"). The verdict is robust exactly
    when every recorded value is >= p.
    """

    robust: bool
    observers_attackable: bool
    p: int
    per_agent_min_separator: dict
    counterexample: Counterexample | None

    def to_dict(self) -> dict:
        doc = {
            "robust": self.robust,
            "attack_class": "xy" if self.observers_attackable else "x",
            "p": self.p,
            "per_agent_min_separator": dict(self.per_agent_min_separator),
            "counterexample": None,
        }
        if self.counterexample is not None:
            ce = self.counterexample
            doc["counterexample"] = {
                "agent": ce.agent,
                "separator": sorted(ce.separator, key=_node_sort_key),
                "attack_agents": [f"x{i}" for i in sorted(ce.attack.compromised_agents)],
                "attack_observers": [f"y{k}" for k in sorted(ce.attack.compromised_observers)],
            }
        return doc


def _node_sort_key(node):
    # "x10" after "x2": sort by kind letter, then numeric suffix when present
    s = str(node)
    head = s.rstrip("0123456789")
    tail = s[len(head):]
    return (head, int(tail) if tail else -1)


class _VertexFlowNet:
    """Split-vertex flow network with unit capacities on chosen vertices."""

    def __init__(self, graph: Digraph, source, sink, uncapped):
        nodes = graph.nodes()
        self._nodes = nodes
        idx = {v: i for i, v in enumerate(nodes)}
        nv = len(nodes)
        self._nv = nv
        self._big = nv + 1  # exceeds any achievable flow, so never in a min cut
        self._to = []
        self._cap = []
        self._adj = [[] for _ in range(2 * nv)]
        # entry copy of node i is 2i, exit copy is 2i+1; split arcs first so
        # arc id e < 2*nv identifies the split arc of node e // 2
        for v in nodes:
            i = idx[v]
            self._add_arc(2 * i, 2 * i + 1, self._big if v in uncapped else 1)
        for u in nodes:
            iu = idx[u]
            for w in graph.successors(u):
                if w == u:
                    continue  # self-loops never lie on a simple path
                self._add_arc(2 * iu + 1, 2 * idx[w], self._big)
        self._source = 2 * idx[source] + 1
        self._sink = 2 * idx[sink]
        self._init_cap = list(self._cap)

    def _add_arc(self, u, v, c):
        self._adj[u].append(len(self._to))
        self._to.append(v)
        self._cap.append(c)
        self._adj[v].append(len(self._to))
        self._to.append(u)
        self._cap.append(0)

    def _augment(self, limit):
        """Push along one shortest residual path; returns the amount pushed."""
        to, cap, adj = self._to, self._cap, self._adj
        parent = [-1] * (2 * self._nv)
        parent[self._source] = -2
        queue = deque([self._source])
        while queue:
            u = queue.popleft()
            if u == self._sink:
                break
            for e in adj[u]:
                v = to[e]
                if cap[e] > 0 and parent[v] == -1:
                    parent[v] = e
                    queue.append(v)
        if parent[self._sink] == -1:
            return 0
        push = limit
        v = self._sink
        while v != self._source:
            e = parent[v]
            push = min(push, cap[e])
            v = to[e ^ 1]
        v = self._sink
        while v != self._source:
            e = parent[v]
            cap[e] -= push
            cap[e ^ 1] += push
            v = to[e ^ 1]
        return push

    def max_flow(self, cutoff=None) -> int:
        flow = 0
        while cutoff is None or flow < cutoff:
            limit = self._big if cutoff is None else cutoff - flow
            pushed = self._augment(limit)
            if pushed == 0:
                break
            flow += pushed
        return flow

    def source_side_cut(self) -> list:
        """Vertices whose split arc crosses the residual source side.

        Only valid after max_flow ran to exhaustion (no cutoff hit).
        """
        to, cap, adj = self._to, self._cap, self._adj
        seen = [False] * (2 * self._nv)
        seen[self._source] = True
        queue = deque([self._source])
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                v = to[e]
                if cap[e] > 0 and not seen[v]:
                    seen[v] = True
                    queue.append(v)
        return [self._nodes[i] for i in range(self._nv)
                if seen[2 * i] and not seen[2 * i + 1]]

    def extract_paths(self, count) -> list:
        """Decompose the flow into `count` vertex-disjoint paths."""
        used = [self._init_cap[e] - self._cap[e] for e in range(0, len(self._cap), 2)]
        to, adj = self._to, self._adj
        paths = []
        src_node = self._nodes[(self._source - 1) // 2]
        sink_node = self._nodes[self._sink // 2]
        for _ in range(count):
            path = [src_node]
            cur = self._source
            while cur != self._sink:
                for e in adj[cur]:
                    if e % 2 == 0 and used[e // 2] > 0:
                        used[e // 2] -= 1
                        if e < 2 * self._nv:
                            path.append(self._nodes[e // 2])
                        cur = to[e]
                        break
                else:  # pragma: no cover - flow conservation rules this out
                    raise AssertionError("flow decomposition dead-ended")
            path.append(sink_node)
            paths.append(path)
        return paths


def max_disjoint_paths(graph: Digraph, source, sink,
                       internal_only: bool = True) -> SeparatorResult:
    """Count disjoint source-to-sink paths and return a matching separator.

    With ``internal_only`` (the default) paths may share only the two
    endpoints and the witness is a minimum vertex separator excluding them;
    adjacent endpoints admit no finite separator and yield a result with
    ``size=None``. With the flag off the endpoints are unit-capacity too,
    so paths must be disjoint everywhere (at most one exists) and the
    witness may name an endpoint.
    """
    if not graph.has_node(source) or not graph.has_node(sink):
        raise KeyError(f"unknown endpoint: {source!r} or {sink!r}")
    if source == sink:
        raise ValueError("source and sink must differ")
    if internal_only and graph.has_edge(source, sink):
        return SeparatorResult(size=None, witness=None, disjoint_paths=())
    uncapped = {source, sink} if internal_only else set()
    net = _VertexFlowNet(graph, source, sink, uncapped)
    value = net.max_flow()
    witness = frozenset(net.source_side_cut())
    paths = tuple(tuple(p) for p in net.extract_paths(value))
    assert len(witness) == value
    return SeparatorResult(size=value, witness=witness, disjoint_paths=paths)


def max_linking(sys: StructuredSystem) -> LinkingResult:
    """Largest family of fully vertex-disjoint paths from the attack inputs
    to the observers in the attack-augmented graph.

    Endpoints count toward disjointness: two paths may not share even an
    input node or a sensor node.
    """
    p_in = sys.num_attack_inputs
    if p_in == 0:
        return LinkingResult(size=0, paths=())
    g = build_attack_graph(sys)
    g.add_node(_SUPER_SOURCE)
    g.add_node(_SUPER_SINK)
    for t in range(1, p_in + 1):
        g.add_edge(_SUPER_SOURCE, f"u{t}")
    for k in range(1, sys.topology.m + 1):
        g.add_edge(f"y{k}", _SUPER_SINK)
    net = _VertexFlowNet(g, _SUPER_SOURCE, _SUPER_SINK, {_SUPER_SOURCE, _SUPER_SINK})
    value = net.max_flow()
    paths = tuple(tuple(p[1:-1]) for p in net.extract_paths(value))
    return LinkingResult(size=value, paths=paths)


def is_structurally_left_invertible(sys: StructuredSystem) -> bool:
    """True when every admissible realization lets the attack inputs be
    reconstructed from the sensor outputs (generically).

    Holds exactly when the attack graph carries a disjoint linking that
    uses every attack input. Vacuously true for an empty attack set.
    """
    p_in = sys.num_attack_inputs
    if p_in == 0:
        return True
    if p_in > sys.topology.m:
        # fewer sensors than attack inputs can never separate them
        return False
    return max_linking(sys).size == p_in


def certify_robustness(topology: DcsTopology, p: int,
                       observers_attackable: bool = True) -> RobustnessReport:
    """Decide whether every attack of size <= p stays reconstructible.

    Reduces to separator sizes toward the sensor sink: with observers in
    the attack surface every agent needs a separator of size >= p, and in
    the agents-only class just the unobserved agents do (the collapsed
    reduction). On failure the first deficient separator (agents scanned
    in ascending order) is converted into a concrete attack set of size
    <= p that defeats left invertibility: the agent itself plus every
    separator member.
    """
    if p < 0:
        raise ValueError("attack budget p must be nonnegative")
    if observers_attackable and topology.m < p:
        raise InfeasibilityError(
            f"m={topology.m} sensors cannot withstand p={p} attacks on the "
            f"full surface: an adversary hitting all sensors plus one agent "
            f"always stays hidden; need m >= p")
    gprime = build_separator_graph(topology, collapse_observers=not observers_attackable)
    if observers_attackable:
        agents = range(1, topology.n + 1)
    else:
        agents = sorted(topology.unobserved_agents)
    counts = {}
    counterexample = None
    for i in agents:
        net = _VertexFlowNet(gprime, agent_id(i), OBSERVER_SINK,
                             {agent_id(i), OBSERVER_SINK})
        size = net.max_flow(cutoff=p)
        counts[agent_id(i)] = size
        if size < p and counterexample is None:
            witness = frozenset(net.source_side_cut())
            bad_agents = {i}
            bad_observers = set()
            for node in witness:
                try:
                    bad_agents.add(parse_agent_id(node))
                except ValueError:
                    bad_observers.add(parse_observer_id(node))
            attack = AttackScenario(compromised_agents=bad_agents,
                                    compromised_observers=bad_observers,
                                    p_bound=p)
            counterexample = Counterexample(agent=agent_id(i), separator=witness,
                                            attack=attack)
    robust = counterexample is None
    return RobustnessReport(robust=robust, observers_attackable=observers_attackable,
                            p=p, per_agent_min_separator=counts,
                            counterexample=counterexample)
