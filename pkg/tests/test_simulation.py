import dataclasses

import numpy as np
import pytest

from stealthguard import (
    AttackScenario,
    AttackTrace,
    DcsTopology,
    FilterConvergenceError,
    Realization,
    StructuredSystem,
    SynthesisSpec,
    attack_output_pattern,
    attack_state_pattern,
    evaluate_transfer,
    false_alarm_rate,
    find_perfect_attack,
    is_structurally_left_invertible,
    load_realization,
    normal_rank,
    output_pattern,
    realize,
    save_realization,
    simulate,
    spectral_radius,
    state_pattern,
    synthesize,
)

from oracles import random_topology


def make_system(n, m, edges, sensors, agents=(), observers=()):
    t = DcsTopology(n=n, m=m, agent_edges=edges, observer_assignment=sensors)
    scen = AttackScenario(compromised_agents=set(agents), compromised_observers=set(observers),
                         p_bound=len(agents) + len(observers))
    return StructuredSystem(topology=t, scenario=scen)


def hidden_pair():
    # two agents, one sensor: two attack inputs can never be told apart
    return make_system(2, 1, {(1, 1), (2, 2), (2, 1)}, {1: 1}, agents=[1, 2])


def test_realize_single_agent_hits_target_radius():
    sys = make_system(1, 1, {(1, 1)}, {1: 1}, agents=[1])
    real = realize(sys, seed=0)
    assert real.A.shape == (1, 1)
    assert abs(abs(real.A[0, 0]) - 0.9) < 1e-12


def test_realize_preserves_patterns_and_stabilizes():
    rng = np.random.default_rng(9)
    for seed in range(100):
        t = random_topology(rng, n_max=5)
        if t.n + t.m == 0:
            continue
        agents = {int(v) + 1 for v in rng.permutation(t.n)[: int(rng.integers(0, t.n + 1))]}
        scen = AttackScenario(compromised_agents=agents, compromised_observers=set(),
                              p_bound=max(1, len(agents)))
        sys = StructuredSystem(topology=t, scenario=scen)
        real = realize(sys, seed=seed)
        assert np.array_equal(real.A != 0, state_pattern(t))
        assert np.array_equal(real.C != 0, output_pattern(t))
        assert np.array_equal(real.B != 0, attack_state_pattern(sys))
        assert np.array_equal(real.D != 0, attack_output_pattern(sys))
        assert abs(spectral_radius(real.A) - 0.9) < 1e-9
        if t.m:
            assert spectral_radius(real.A - real.K @ real.C @ real.A) < 1.0


def test_realize_validates_arguments():
    sys = hidden_pair()
    with pytest.raises(ValueError):
        realize(sys, spectral_radius_target=1.0)
    with pytest.raises(ValueError):
        realize(sys, spectral_radius_target=0.0)
    with pytest.raises(FilterConvergenceError):
        realize(sys, process_noise=0.0, measurement_noise=0.0)


def test_realize_accepts_noise_configuration():
    sys = hidden_pair()
    real = realize(sys, process_noise=2.0, measurement_noise=0.5)
    assert np.array_equal(real.Q, 2.0 * np.eye(2))
    assert np.array_equal(real.R, 0.5 * np.eye(1))
    custom = realize(sys, process_noise=np.diag([1.0, 3.0]))
    assert np.array_equal(custom.Q, np.diag([1.0, 3.0]))
    with pytest.raises(ValueError):
        realize(sys, process_noise=np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_transfer_matches_closed_form():
    sys = make_system(1, 1, {(1, 1)}, {1: 1}, agents=[1])
    real = realize(sys, seed=4)
    a = real.A[0, 0]
    b = real.B[0, 0]
    c = real.C[0, 0]
    for z in (2.0, -1.5 + 0.5j):
        got = evaluate_transfer(real, z)[0, 0]
        assert got == pytest.approx(c * b / (z - a))


def test_normal_rank_observed_agent():
    sys = make_system(2, 2, {(1, 1), (2, 2)}, {1: 1, 2: 2}, agents=[1])
    real = realize(sys, seed=1)
    assert normal_rank(real) == 1
    with pytest.raises(ValueError):
        normal_rank(real, trials=2)


def test_normal_rank_tracks_structure():
    rng = np.random.default_rng(21)
    for _ in range(25):
        n = int(rng.integers(1, 5))
        t = random_topology(rng, n=n, m=int(rng.integers(1, n + 1)))
        count = int(rng.integers(1, t.n + 1))
        agents = {int(v) + 1 for v in rng.permutation(t.n)[:count]}
        scen = AttackScenario(compromised_agents=agents, compromised_observers=set(),
                              p_bound=count)
        sys = StructuredSystem(topology=t, scenario=scen)
        real = realize(sys, seed=int(rng.integers(10000)))
        rank = normal_rank(real)
        if is_structurally_left_invertible(sys):
            assert rank == sys.num_attack_inputs
        else:
            assert rank < sys.num_attack_inputs


def test_perfect_attack_exists_with_outnumbered_sensors():
    real = realize(hidden_pair(), seed=3)
    trace = find_perfect_attack(real)
    assert trace is not None
    assert trace.horizon == 4
    assert np.max(np.abs(trace.inputs)) > 0
    assert np.max(np.abs(trace.delta_residues)) <= 1e-8
    assert np.max(np.abs(trace.delta_states)) == pytest.approx(1.0)


def test_perfect_attack_absent_for_invertible_system():
    sys = make_system(2, 2, {(1, 1), (2, 2), (1, 2)}, {1: 1, 2: 2}, agents=[1, 2])
    assert is_structurally_left_invertible(sys)
    for seed in range(5):
        real = realize(sys, seed=seed)
        assert find_perfect_attack(real) is None


def test_perfect_attack_none_without_inputs():
    sys = make_system(1, 1, {(1, 1)}, {1: 1})
    real = realize(sys, seed=0)
    assert find_perfect_attack(real) is None


def test_perfect_attack_horizon_validation():
    real = realize(hidden_pair(), seed=3)
    with pytest.raises(ValueError):
        find_perfect_attack(real, horizon=3)
    longer = find_perfect_attack(real, horizon=6)
    assert longer is not None and longer.horizon == 6


def test_simulate_without_attack_has_zero_deviation():
    sys = make_system(3, 1, {(1, 1), (2, 2), (3, 3), (1, 2), (2, 3)}, {1: 3})
    real = realize(sys, seed=2)
    res = simulate(real, seed=8, horizon=50)
    assert res.horizon == 50
    assert not res.delta_states.any()
    assert not res.delta_outputs.any()
    assert not res.delta_residues.any()
    assert np.array_equal(res.alarms, res.attacked_alarms)
    assert np.array_equal(res.attacked_states, res.states)


def test_simulate_filter_recursion_and_first_residue():
    sys = make_system(2, 1, {(1, 1), (2, 2), (1, 2)}, {1: 2})
    real = realize(sys, seed=6)
    res = simulate(real, seed=12, horizon=30)
    # the estimate starts pinned at zero, so the first residue is raw output
    assert np.array_equal(res.residues[0], res.outputs[0])
    assert np.array_equal(res.estimates[0], np.zeros(2))
    A, C, K = real.A, real.C, real.K
    for k in range(1, 30):
        pred = A @ res.estimates[k - 1]
        assert np.allclose(res.residues[k], res.outputs[k] - C @ pred, atol=1e-12)
        assert np.allclose(res.estimates[k], pred + K @ res.residues[k], atol=1e-12)


def test_simulate_rejects_bad_attack_shape():
    real = realize(hidden_pair(), seed=3)
    with pytest.raises(ValueError):
        simulate(real, attack=np.zeros((10, 5)))
    with pytest.raises(ValueError):
        simulate(real, horizon=0)


def test_simulate_rejects_unstable_filter():
    real = Realization(
        A=np.array([[1.5]]), B=np.zeros((1, 0)), C=np.eye(1), D=np.zeros((1, 0)),
        Q=np.eye(1), R=np.zeros((1, 1)), K=np.zeros((1, 1)),
        residue_cov=np.eye(1), eta=3.84)
    with pytest.raises(ValueError):
        simulate(real)


def test_perfect_attack_leaves_alarms_untouched():
    real = realize(hidden_pair(), seed=3)
    trace = find_perfect_attack(real, horizon=40)
    res = simulate(real, attack=trace, seed=19, horizon=40)
    assert np.array_equal(res.alarms, res.attacked_alarms)
    assert np.max(np.abs(res.delta_residues)) <= 1e-8
    assert np.max(np.abs(res.delta_states)) >= 1e-3
    assert np.allclose(res.attacked_states, res.states - res.delta_states)


def test_deviation_is_noise_independent():
    real = realize(hidden_pair(), seed=3)
    trace = find_perfect_attack(real)
    a = simulate(real, attack=trace, seed=1, horizon=20)
    b = simulate(real, attack=trace, seed=2, horizon=20)
    assert np.array_equal(a.delta_states, b.delta_states)
    assert np.array_equal(a.delta_residues, b.delta_residues)
    assert not np.array_equal(a.states, b.states)


def test_noise_free_residues_decay():
    sys = make_system(3, 2, {(1, 1), (2, 2), (3, 3), (1, 2), (2, 3), (3, 1)},
                      {1: 1, 2: 3})
    real = realize(sys, seed=5)
    quiet = dataclasses.replace(real, Q=np.zeros((3, 3)), R=np.zeros((2, 2)))
    res = simulate(quiet, seed=30, horizon=400)
    assert np.max(np.abs(res.residues[-10:])) < 1e-10
    assert np.max(np.abs(res.residues[0])) > 1e-3  # starts from a random state


def test_residue_covariance_matches_monte_carlo():
    sys = make_system(3, 2, {(1, 1), (2, 2), (3, 3), (1, 2), (2, 3), (3, 1)},
                      {1: 1, 2: 3})
    real = realize(sys, seed=5)
    res = simulate(real, seed=77, horizon=30000)
    sample = res.residues[1000:]
    got = sample.T @ sample / len(sample)
    rel = np.linalg.norm(got - real.residue_cov) / np.linalg.norm(real.residue_cov)
    assert rel < 0.1


def test_false_alarm_rate_extremes():
    sys = make_system(2, 1, {(1, 1), (2, 2), (1, 2)}, {1: 2})
    real = realize(sys, seed=14)
    assert false_alarm_rate(real, eta=0.0, samples=2000, seed=3) > 0.99
    assert false_alarm_rate(real, eta=1e9, samples=2000, seed=3) == 0.0


def test_false_alarm_rate_at_default_threshold():
    sys = make_system(2, 1, {(1, 1), (2, 2), (1, 2)}, {1: 2})
    real = realize(sys, seed=14)
    rate = false_alarm_rate(real, samples=100000, seed=3)
    assert abs(rate - 0.05) <= 0.02


def test_realization_round_trip(tmp_path):
    real = realize(hidden_pair(), seed=3)
    path = tmp_path / "real.txt"
    save_realization(path, real)
    back = load_realization(path)
    for field in ("A", "B", "C", "D", "Q", "R", "K", "residue_cov"):
        assert np.array_equal(getattr(back, field), getattr(real, field)), field
    assert back.eta == real.eta


def test_trace_file_layout(tmp_path):
    from stealthguard import write_trace

    real = realize(hidden_pair(), seed=3)
    trace = find_perfect_attack(real)
    res = simulate(real, attack=trace, seed=4, horizon=trace.horizon)
    path = tmp_path / "trace.tsv"
    write_trace(path, res)
    lines = path.read_text().splitlines()
    header = lines[0].split("\t")
    assert header[0] == "k"
    assert header.count("alarm") == 1 and header.count("alarm_attacked") == 1
    assert "dx1" in header and "dz1" in header
    assert len(lines) == 1 + trace.horizon
    row = lines[1].split("\t")
    assert len(row) == len(header)
    assert float(row[header.index("x1")]) == res.states[0, 0]

    quiet = simulate(real, seed=4, horizon=5)
    path2 = tmp_path / "quiet.tsv"
    write_trace(path2, quiet)
    header2 = path2.read_text().splitlines()[0].split("\t")
    assert "dx1" not in header2 and "alarm_attacked" not in header2
