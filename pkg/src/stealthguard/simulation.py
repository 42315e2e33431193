"""Numeric realizations, stealthy-input search and detector simulation.

A realization draws concrete coefficients for a structured system: state
couplings land in [-1, -0.1] or [0.1, 1] before the matrix is rescaled to
a target spectral radius below one, attack and sensor matrices are 0/1
indicators, and a steady-state one-step filter with gain K feeds a
chi-square residue detector with threshold eta.

The stealthy-input search asks whether some nonzero attack sequence
produces exactly zero output deviation. It builds the block-Toeplitz map
from inputs to output deviations, with extra trailing output rows (inputs
off) so a null vector certifies invisibility for all time rather than for
a truncated window, and every candidate is re-verified by simulation.

Difference trajectories (attacked minus nominal) are simulated without
noise: by linearity the noise terms cancel exactly, so Delta traces never
depend on whether noise is switched on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import chi2

from .topology import (
    StructuredSystem,
    attack_output_pattern,
    attack_state_pattern,
    output_pattern,
    state_pattern,
)


class FilterConvergenceError(RuntimeError):
    """The steady-state gain iteration failed to converge."""


class NullspaceAmbiguityError(RuntimeError):
    """A null-space candidate sat too close to the rank threshold."""


def spectral_radius(mat) -> float:
    mat = np.asarray(mat, dtype=float)
    if mat.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(mat))))


@dataclass(frozen=True, eq=False)
class Realization:
    """Concrete matrices for one structured system.

    A: state couplings, B: attack actuation (0/1), C: sensor selection
    (0/1), D: sensor corruption (0/1), Q/R: process and measurement noise
    covariances, K: steady-state filter gain, residue_cov: steady-state
    covariance of the detector residue, eta: alarm threshold.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    K: np.ndarray
    residue_cov: np.ndarray
    eta: float

    def __post_init__(self):
        n = self.A.shape[0]
        m = self.C.shape[0]
        if self.A.shape != (n, n):
            raise ValueError("state matrix must be square")
        if self.B.shape[0] != n or self.D.shape[0] != m:
            raise ValueError("attack matrices do not match system dimensions")
        if self.B.shape[1] != self.D.shape[1]:
            raise ValueError("actuation and corruption must share the input count")
        if self.C.shape[1] != n or self.K.shape != (n, m):
            raise ValueError("sensor or gain matrix has the wrong shape")
        if self.Q.shape != (n, n) or self.R.shape != (m, m):
            raise ValueError("noise covariances have the wrong shape")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.C.shape[0]

    @property
    def num_inputs(self) -> int:
        return self.B.shape[1]


def _as_cov(value, dim: int, default: float) -> np.ndarray:
    if value is None:
        return np.eye(dim) * default
    if np.isscalar(value):
        if value < 0:
            raise ValueError("noise variance must be nonnegative")
        return np.eye(dim) * float(value)
    cov = np.array(value, dtype=float)
    if cov.shape != (dim, dim):
        raise ValueError(f"covariance must be {dim}x{dim}")
    if not np.allclose(cov, cov.T):
        raise ValueError("covariance must be symmetric")
    if cov.size and np.min(np.linalg.eigvalsh(cov)) < -1e-10:
        raise ValueError("covariance must be positive semidefinite")
    return cov


def _steady_state_filter(A, C, Q, R, tol=1e-12, max_iter=50_000):
    """Iterate the prediction covariance to steady state; returns (K, S)."""
    n = A.shape[0]
    m = C.shape[0]
    if m == 0:
        return np.zeros((n, 0)), np.zeros((0, 0))
    P = Q.copy()
    for _ in range(max_iter):
        S = C @ P @ C.T + R
        try:
            gain_t = np.linalg.solve(S, C @ P)  # equals (P C^T S^-1)^T
        except np.linalg.LinAlgError:
            raise FilterConvergenceError(
                "innovation covariance is singular; the gain iteration needs "
                "process or measurement noise") from None
        P_filtered = P - gain_t.T @ (C @ P)
        P_next = A @ P_filtered @ A.T + Q
        P_next = (P_next + P_next.T) / 2
        if np.max(np.abs(P_next - P)) <= tol * (1 + np.max(np.abs(P_next))):
            P = P_next
            break
        P = P_next
    else:
        raise FilterConvergenceError(
            f"gain iteration did not converge within {max_iter} steps")
    S = C @ P @ C.T + R
    K = np.linalg.solve(S, C @ P).T
    return K, (S + S.T) / 2


def realize(sys: StructuredSystem, seed: int = 0,
            spectral_radius_target: float = 0.9,
            process_noise=None, measurement_noise=None,
            eta: float | None = None) -> Realization:
    """Draw an admissible realization and its steady-state detector.

    Nonzero state couplings are sampled from +-[0.1, 1] and the matrix is
    rescaled so its spectral radius hits the target (default 0.9, must be
    inside the unit circle). Process noise defaults to the identity,
    measurement noise to zero, and eta to the 95th percentile of a
    chi-square with one degree of freedom per sensor.
    """
    if not 0 < spectral_radius_target < 1:
        raise ValueError("spectral radius target must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    top = sys.topology
    n, m = top.n, top.m
    rows, cols = np.nonzero(state_pattern(top))
    A = np.zeros((n, n))
    for _ in range(100):
        A[rows, cols] = rng.uniform(0.1, 1.0, rows.size) * rng.choice((-1.0, 1.0), rows.size)
        rho = spectral_radius(A)
        if rho > 1e-9:
            break
    else:  # pragma: no cover - mandatory self-loops make this unreachable
        raise RuntimeError("could not draw a nonzero state matrix")
    A *= spectral_radius_target / rho
    B = attack_state_pattern(sys).astype(float)
    C = output_pattern(top).astype(float)
    D = attack_output_pattern(sys).astype(float)
    Q = _as_cov(process_noise, n, default=1.0)
    R = _as_cov(measurement_noise, m, default=0.0)
    K, S = _steady_state_filter(A, C, Q, R)
    if m and spectral_radius(A - K @ C @ A) >= 1.0:
        raise FilterConvergenceError("steady-state filter came out unstable")
    if eta is None:
        eta = float(chi2.ppf(0.95, m)) if m else 0.0
    return Realization(A=A, B=B, C=C, D=D, Q=Q, R=R, K=K,
                       residue_cov=S, eta=float(eta))


# ---- structural rank, numerically ----

def evaluate_transfer(real: Realization, z: complex) -> np.ndarray:
    """Attack-to-output transfer matrix at one complex frequency."""
    n = real.n
    resolvent = np.linalg.solve(z * np.eye(n) - real.A, real.B)
    return real.C @ resolvent + real.D


def normal_rank(real: Realization, trials: int = 7, seed: int = 0) -> int:
    """Generic rank of the attack-to-output transfer matrix.

    Evaluates at random points outside the spectrum (resampling any point
    that lands within 1e-3 of an eigenvalue) and takes the largest
    numerical rank seen, with a relative singular-value threshold of 1e-9.
    """
    if trials < 3:
        raise ValueError("need at least 3 evaluation points")
    eigs = np.linalg.eigvals(real.A) if real.n else np.zeros(0, dtype=complex)
    rng = np.random.default_rng(seed)
    best = 0
    for _ in range(trials):
        while True:
            z = rng.uniform(1.2, 2.5) * np.exp(2j * np.pi * rng.uniform())
            if eigs.size == 0 or np.min(np.abs(z - eigs)) > 1e-3:
                break
        s = np.linalg.svd(evaluate_transfer(real, z), compute_uv=False)
        if s.size and s[0] > 0:
            best = max(best, int(np.sum(s > s[0] * 1e-9)))
    return best


# ---- stealthy inputs ----

@dataclass(frozen=True, eq=False)
class AttackTrace:
    """A nonzero input sequence with (numerically) zero output deviation.

    All traces run over the input horizon: delta_states[k] is the state
    deviation entering step k, delta_outputs and delta_residues the output
    and detector deviations at step k. min_singular_value records how
    decisively the null space was separated from the retained ranks.
    """

    inputs: np.ndarray
    horizon: int
    delta_states: np.ndarray
    delta_outputs: np.ndarray
    delta_residues: np.ndarray
    min_singular_value: float


def _delta_open_loop(real: Realization, inputs: np.ndarray, steps: int):
    """Noise-free deviation response; inputs are zero past their horizon."""
    A, B, C, D = real.A, real.B, real.C, real.D
    n, m = real.n, real.m
    dx = np.zeros((steps, n))
    dy = np.zeros((steps, m))
    x = np.zeros(n)
    for k in range(steps):
        u = inputs[k] if k < len(inputs) else np.zeros(real.num_inputs)
        dx[k] = x
        dy[k] = C @ x - D @ u
        x = A @ x - B @ u
    return dx, dy


def _delta_residues(real: Realization, dy: np.ndarray) -> np.ndarray:
    """Detector-residue deviation driven by an output deviation."""
    A, C, K = real.A, real.C, real.K
    steps = len(dy)
    dz = np.zeros_like(dy)
    dxh = np.zeros(real.n)
    for k in range(steps):
        if k == 0:
            dz[0] = dy[0]  # both filters start from the same fixed estimate
        else:
            dz[k] = dy[k] - C @ (A @ dxh)
            dxh = A @ dxh + K @ dz[k]
    return dz


def find_perfect_attack(real: Realization, horizon: int | None = None):
    """Search for an undetectable nonzero input sequence.

    Builds the lower block-triangular map from inputs over `horizon` steps
    (default twice the state dimension, the minimum accepted) to output
    deviations over horizon plus n steps; the surplus rows carry zero
    input, so any null vector keeps the output at zero forever, not just
    inside the window. Returns an AttackTrace scaled to unit peak state
    deviation, or None when the map has full column rank. A candidate
    whose re-simulated output deviation is not numerically zero raises
    NullspaceAmbiguityError instead of being reported either way.
    """
    n, m, p_in = real.n, real.m, real.num_inputs
    N = 2 * n if horizon is None else int(horizon)
    if N < 2 * n:
        raise ValueError("horizon must be at least twice the state dimension")
    if p_in == 0:
        return None
    blocks = [real.D]
    power = np.eye(n)
    for _ in range(N + n - 1):
        blocks.append(real.C @ power @ real.B)
        power = real.A @ power
    M = np.zeros(((N + n) * m, N * p_in))
    for kb in range(N + n):
        for jb in range(min(kb, N - 1) + 1):
            M[kb * m:(kb + 1) * m, jb * p_in:(jb + 1) * p_in] = blocks[kb - jb]
    cols = N * p_in
    if m == 0:
        inputs = np.zeros((N, p_in))
        inputs[0, 0] = 1.0
        smallest = 0.0
    else:
        _, s, vh = np.linalg.svd(M, full_matrices=True)
        smax = s[0] if s.size else 0.0
        rank = int(np.sum(s > smax * 1e-9)) if smax > 0 else 0
        if rank == cols:
            return None
        inputs = vh[-1].reshape(N, p_in)
        smallest = float(s[rank]) if rank < s.size else 0.0
    dx, dy = _delta_open_loop(real, inputs, N + n)
    resid = float(np.max(np.abs(dy))) if dy.size else 0.0
    if resid > 1e-8:
        raise NullspaceAmbiguityError(
            f"null-space candidate leaks through the outputs "
            f"(deviation {resid:.3e}, smallest retained singular value {smallest:.3e})")
    peak = float(np.max(np.abs(dx))) if dx.size else 0.0
    if peak > 1e-300:
        scale = 1.0 / peak
        inputs = inputs * scale
        dx = dx * scale
        dy = dy * scale
        if resid * scale > 1e-8:
            raise NullspaceAmbiguityError(
                f"output deviation {resid * scale:.3e} after rescaling; "
                f"smallest retained singular value {smallest:.3e}")
    dz = _delta_residues(real, dy[:N])
    return AttackTrace(inputs=inputs, horizon=N, delta_states=dx[:N],
                       delta_outputs=dy[:N], delta_residues=dz,
                       min_singular_value=smallest)


# ---- closed-loop simulation ----

@dataclass(frozen=True, eq=False)
class SimulationResult:
    """Nominal and attacked trajectories under shared noise.

    Deviations are computed from the noise-free difference system, so the
    attacked arrays equal nominal minus delta exactly.
    """

    states: np.ndarray
    estimates: np.ndarray
    outputs: np.ndarray
    residues: np.ndarray
    alarms: np.ndarray
    delta_states: np.ndarray
    delta_outputs: np.ndarray
    delta_residues: np.ndarray
    attacked_states: np.ndarray
    attacked_outputs: np.ndarray
    attacked_residues: np.ndarray
    attacked_alarms: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.states)


def _sample_noise(rng, cov: np.ndarray, steps: int) -> np.ndarray:
    dim = cov.shape[0]
    if dim == 0 or not np.any(cov):
        return np.zeros((steps, dim))
    w, U = np.linalg.eigh(cov)
    factor = U * np.sqrt(np.clip(w, 0.0, None))
    return rng.standard_normal((steps, dim)) @ factor.T


def _quadratic_form(residues: np.ndarray, cov: np.ndarray) -> np.ndarray:
    if cov.shape[0] == 0:
        return np.zeros(len(residues))
    inv = np.linalg.inv(cov)
    return np.einsum("ki,ij,kj->k", residues, inv, residues)


def simulate(real: Realization, attack=None, seed: int = 0,
             horizon: int = 200) -> SimulationResult:
    """Run the plant, filter and detector for `horizon` steps.

    `attack` may be None, an AttackTrace, or an array of per-step inputs
    (zero-padded or truncated to the horizon). The nominal run draws
    process and measurement noise from Q and R; the attacked run shares
    that noise, which is why only the noise-free deviation system is
    integrated for the difference.
    """
    if horizon < 1:
        raise ValueError("horizon must be positive")
    A, C, K = real.A, real.C, real.K
    n, m = real.n, real.m
    if m and spectral_radius(A - K @ C @ A) >= 1.0:
        raise ValueError("filter realization is unstable; refusing to simulate")
    if attack is None:
        inputs = None
    else:
        inputs = attack.inputs if isinstance(attack, AttackTrace) else np.asarray(attack, dtype=float)
        if inputs.ndim != 2 or inputs.shape[1] != real.num_inputs:
            raise ValueError(f"attack inputs must have {real.num_inputs} columns")
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal(n)
    w = _sample_noise(rng, real.Q, horizon)
    v = _sample_noise(rng, real.R, horizon)
    states = np.zeros((horizon, n))
    estimates = np.zeros((horizon, n))
    outputs = np.zeros((horizon, m))
    residues = np.zeros((horizon, m))
    x = x0
    xh = np.zeros(n)
    for k in range(horizon):
        states[k] = x
        y = C @ x + v[k]
        outputs[k] = y
        if k == 0:
            residues[0] = y - C @ xh
        else:
            residues[k] = y - C @ (A @ xh)
            xh = A @ xh + K @ residues[k]
        estimates[k] = xh
        x = A @ x + w[k]
    if inputs is None:
        dx = np.zeros((horizon, n))
        dy = np.zeros((horizon, m))
        dz = np.zeros((horizon, m))
    else:
        dx, dy = _delta_open_loop(real, inputs, horizon)
        dz = _delta_residues(real, dy)
    alarms = _quadratic_form(residues, real.residue_cov) > real.eta
    attacked_residues = residues - dz
    attacked_alarms = _quadratic_form(attacked_residues, real.residue_cov) > real.eta
    return SimulationResult(
        states=states, estimates=estimates, outputs=outputs, residues=residues,
        alarms=alarms, delta_states=dx, delta_outputs=dy, delta_residues=dz,
        attacked_states=states - dx, attacked_outputs=outputs - dy,
        attacked_residues=attacked_residues, attacked_alarms=attacked_alarms)


def false_alarm_rate(real: Realization, eta: float | None = None,
                     samples: int = 100_000, burn_in: int = 1000,
                     seed: int = 0) -> float:
    """Empirical no-attack alarm rate after the transient has died out."""
    if samples < 1 or burn_in < 0:
        raise ValueError("need samples >= 1 and burn_in >= 0")
    result = simulate(real, attack=None, seed=seed, horizon=burn_in + samples)
    threshold = real.eta if eta is None else float(eta)
    quad = _quadratic_form(result.residues[burn_in:], real.residue_cov)
    return float(np.mean(quad > threshold))


# ---- file round trips ----

_MATRIX_FIELDS = ("A", "B", "C", "D", "Q", "R", "K", "residue_cov")


def save_realization(path, real: Realization) -> None:
    """Write all matrices to a text file, one 'name rows cols' block each."""
    lines = ["# realization v1"]
    for name in _MATRIX_FIELDS:
        mat = getattr(real, name)
        lines.append(f"{name} {mat.shape[0]} {mat.shape[1]}")
        for row in np.atleast_2d(mat) if mat.size else []:
            lines.append(" ".join(f"{val:.17g}" for val in row))
    lines.append("eta 1 1")
    lines.append(f"{real.eta:.17g}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_realization(path) -> Realization:
    with open(path, "r", encoding="utf-8") as fh:
        rows = [ln.split("#", 1)[0].strip() for ln in fh]
    rows = [r for r in rows if r]
    mats = {}
    i = 0
    while i < len(rows):
        fields = rows[i].split()
        if len(fields) != 3:
            raise ValueError(f"bad matrix header: {rows[i]!r}")
        name, nr, nc = fields[0], int(fields[1]), int(fields[2])
        data = np.zeros((nr, nc))
        for r in range(nr):
            if nc == 0:
                continue
            i += 1
            vals = rows[i].split()
            if len(vals) != nc:
                raise ValueError(f"matrix {name}: row {r + 1} has {len(vals)} values, want {nc}")
            data[r] = [float(v) for v in vals]
        mats[name] = data
        i += 1
    missing = [f for f in _MATRIX_FIELDS + ("eta",) if f not in mats]
    if missing:
        raise ValueError(f"realization file is missing {missing}")
    eta = float(mats.pop("eta")[0, 0])
    return Realization(eta=eta, **{k: mats[k] for k in _MATRIX_FIELDS})


def write_trace(path, result: SimulationResult) -> None:
    """Tab-separated trace: step index, then state, estimate, output,
    residue and alarm columns. Deviation columns appear only when the
    run actually carried an attack (some deviation is nonzero)."""
    n = result.states.shape[1]
    m = result.outputs.shape[1]
    attacked = bool(np.any(result.delta_states) or np.any(result.delta_outputs)
                    or np.any(result.delta_residues))
    header = (["k"]
              + [f"x{i}" for i in range(1, n + 1)]
              + [f"xhat{i}" for i in range(1, n + 1)]
              + [f"y{k}" for k in range(1, m + 1)]
              + [f"z{k}" for k in range(1, m + 1)]
              + ["alarm"])
    if attacked:
        header += ([f"dx{i}" for i in range(1, n + 1)]
                   + [f"dy{k}" for k in range(1, m + 1)]
                   + [f"dz{k}" for k in range(1, m + 1)]
                   + ["alarm_attacked"])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for k in range(result.horizon):
            row = ([str(k)]
                   + [f"{v:.17g}" for v in result.states[k]]
                   + [f"{v:.17g}" for v in result.estimates[k]]
                   + [f"{v:.17g}" for v in result.outputs[k]]
                   + [f"{v:.17g}" for v in result.residues[k]]
                   + [str(int(result.alarms[k]))])
            if attacked:
                row += ([f"{v:.17g}" for v in result.delta_states[k]]
                        + [f"{v:.17g}" for v in result.delta_outputs[k]]
                        + [f"{v:.17g}" for v in result.delta_residues[k]]
                        + [str(int(result.attacked_alarms[k]))])
            fh.write("\t".join(row) + "\n")
