"""Exact gate-level noisy density-matrix simulation.

Noise placement follows the noisy-gate decomposition: the ideal gate first,
then the error channel, and only CX gates carry noise. All channels are
applied deterministically as superoperators; there is no sampling anywhere.

Noise orientation: the error channel's first tensor slot (the projector
slot of the timekeeping Kraus operator) is attached to the gate's TARGET
qubit and the second slot to its control, i.e. the little-endian reading of
the two-qubit channel definition. With the aligned reading the timekeeping
error reduces to pure gate dropout, whose effect on the protocols' cold,
population-dominated states falls far below the depolarizing summary; the
little-endian reading reproduces the summary's accuracy on both protocols
and is adopted globally.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    FULL_SPACE_MAX_QUBITS,
    GateNoiseModel,
    apply_channel,
    apply_two_qubit_channel_local,
    conjugate_local,
    embed_two_qubit,
    reset_channel,
    thermal_reset_state,
)
from .circuits import SX_MATRIX, Circuit, build_dc_mirror_circuit, build_tsac_circuit, count_cx, transpile
from .dc import ThermalSpec, effective_temperature, reduce_to_target, thermal_qubit
from .errors import InvalidParam, NotTranspiled, SizeLimit
from .gda import GdaEstimate
from .linalg import check_density_matrix, num_qubits, trace_distance

MAX_SIM_QUBITS = 10


@dataclass(frozen=True)
class SimConfig:
    """Envelope for an iterative cooling run.

    ``validate`` re-checks Hermiticity/trace/positivity of the full state
    after every round (slow; intended for debugging runs).
    """

    n: int
    noise: GateNoiseModel
    epsilon: float
    max_rounds: int = 10_000
    conv_tol: float = 1e-12
    validate: bool = False

    def __post_init__(self) -> None:
        if not 2 <= self.n <= MAX_SIM_QUBITS:
            raise SizeLimit(f"gate-level path capped at {MAX_SIM_QUBITS} qubits, got {self.n}")
        if self.conv_tol <= 0 or self.max_rounds < 1:
            raise InvalidParam("conv_tol must be positive and max_rounds at least 1")


@dataclass
class Trajectory:
    """Per-round target populations and successive-state step sizes."""

    populations: list[float] = field(default_factory=list)
    steps: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def rounds(self) -> int:
        return len(self.steps)


def _flip_perm(n: int, controls: tuple[int, ...], target: int) -> np.ndarray:
    idx = np.arange(1 << n)
    perm = idx.copy()
    mask = np.ones(1 << n, dtype=bool)
    for c in controls:
        mask &= (idx >> (n - 1 - c) & 1).astype(bool)
    perm[mask] = idx[mask] ^ (1 << (n - 1 - target))
    return perm


def _apply_gate_state(rho: np.ndarray, gate, n: int) -> np.ndarray:
    """Conjugate the state by one basis gate."""
    if gate.kind in ("CX", "X"):
        perm = _flip_perm(n, gate.controls, gate.target)
        return rho[np.ix_(perm, perm)]
    if gate.kind == "RZ":
        bit = (np.arange(1 << n) >> (n - 1 - gate.target)) & 1
        phase = np.exp(1j * gate.theta * (bit - 0.5))
        return rho * phase[:, None] * phase.conj()[None, :]
    if gate.kind == "SX":
        return conjugate_local(rho, SX_MATRIX, [gate.target])
    raise NotTranspiled(f"gate kind {gate.kind} outside the simulator basis")


def _monomial_parts(op: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
    """Decompose a generalized permutation matrix as (row index, coefficient).

    Returns arrays with op = sum_j coeff[j] |perm[j]><j|, or None when some
    column has more than one nonzero entry.
    """
    d = op.shape[0]
    perm = np.full(d, -1)
    coeff = np.zeros(d, dtype=complex)
    rows, cols = np.nonzero(np.abs(op) > 1e-15)
    if len(cols) != len(set(cols)) or len(set(rows)) != len(rows):
        return None
    perm[cols] = rows
    coeff[cols] = op[rows, cols]
    if (perm < 0).any():
        return None
    return perm, coeff


class _MonomialChannel:
    """Kraus sum where every operator is a scaled permutation."""

    def __init__(self, parts: list[tuple[np.ndarray, np.ndarray]]):
        self.parts = [(perm, np.outer(c, c.conj())) for perm, c in parts]

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros_like(rho)
        for perm, weight in self.parts:
            grid = np.ix_(perm, perm)
            out[grid] += weight[grid] * rho
        return out


class _GateProgram:
    """Per-circuit precompiled gate actions (permutations, phases, channels)."""

    def __init__(self, circuit: Circuit, noise: GateNoiseModel):
        n = circuit.n_qubits
        self.n = n
        self.steps: list[tuple[str, object]] = []
        channel_cache: dict[tuple[int, int], object] = {}
        for g in circuit.gates:
            if g.kind == "CX":
                self.steps.append(("perm", _flip_perm(n, g.controls, g.target)))
                if noise.is_noisy:
                    slots = noise_slots(g.controls[0], g.target)
                    self.steps.append(("noise", self._channel(noise, slots, n, channel_cache)))
            elif g.kind == "RZ":
                bit = (np.arange(1 << n) >> (n - 1 - g.target)) & 1
                phase = np.exp(1j * g.theta * (bit - 0.5))
                self.steps.append(("phase", np.outer(phase, phase.conj())))
            elif g.kind == "SX":
                self.steps.append(("sx", g.target))
            else:
                raise NotTranspiled(f"gate kind {g.kind} outside the simulator basis")

    @staticmethod
    def _channel(noise: GateNoiseModel, slots: tuple[int, int], n: int, cache: dict):
        if slots in cache:
            return cache[slots]
        if n <= FULL_SPACE_MAX_QUBITS:
            embedded = embed_two_qubit(noise.full, slots, n)
            parts = [_monomial_parts(k) for k in embedded.kraus_ops]
            if all(p is not None for p in parts):
                action = _MonomialChannel(parts)
            else:
                action = lambda rho, ch=embedded: apply_channel(rho, ch)
        else:
            action = lambda rho: apply_two_qubit_channel_local(rho, noise.full, slots)
        cache[slots] = action
        return action

    def run(self, rho: np.ndarray) -> np.ndarray:
        for kind, data in self.steps:
            if kind == "perm":
                rho = rho[np.ix_(data, data)]
            elif kind == "phase":
                rho = rho * data
            elif kind == "sx":
                rho = conjugate_local(rho, SX_MATRIX, [data])
            else:
                rho = data(rho)
        return rho


def noise_slots(control: int, target: int) -> tuple[int, int]:
    """Qubits receiving the error channel's tensor slots, for a CX gate."""
    return (target, control)


def simulate_noisy_circuit(
    circuit: Circuit, rho0: np.ndarray, noise: GateNoiseModel
) -> np.ndarray:
    """Run a transpiled circuit: each gate ideally, then noise after every CX."""
    n = circuit.n_qubits
    if rho0.shape != (1 << n, 1 << n):
        raise InvalidParam(f"state shape {rho0.shape} does not match {n} qubits")
    return _GateProgram(circuit, noise).run(np.array(rho0, dtype=complex))


def tsac_round(
    rho: np.ndarray, circuit: Circuit, noise: GateNoiseModel, epsilon: float
) -> np.ndarray:
    """One protocol round: reset the last qubit, then the noisy compression."""
    return simulate_noisy_circuit(circuit, reset_channel(rho, epsilon), noise)


def thermal_product_state(n: int, epsilon: float) -> np.ndarray:
    rho = np.eye(1, dtype=complex)
    single = thermal_reset_state(epsilon)
    for _ in range(n):
        rho = np.kron(rho, single)
    return rho


def target_ground_population(rho: np.ndarray) -> float:
    """Tr(rho |0><0|_target) with the target being qubit 0."""
    d = rho.shape[0]
    return float(np.diagonal(rho)[: d // 2].real.sum())


def run_tsac(cfg: SimConfig) -> tuple[Trajectory, float]:
    """Iterate rounds from the thermal product state until convergence.

    Convergence is trace distance <= conv_tol between successive full
    states; hitting max_rounds first leaves the trajectory flagged as
    unconverged rather than raising.
    """
    circuit = transpile(build_tsac_circuit(cfg.n))
    program = _GateProgram(circuit, cfg.noise)
    rho = thermal_product_state(cfg.n, cfg.epsilon)
    traj = Trajectory(populations=[target_ground_population(rho)])
    for _ in range(cfg.max_rounds):
        rho_next = program.run(reset_channel(rho, cfg.epsilon))
        step = trace_distance(rho_next, rho)
        rho = rho_next
        if cfg.validate:
            check_density_matrix(rho)
        traj.populations.append(target_ground_population(rho))
        traj.steps.append(step)
        if step <= cfg.conv_tol:
            traj.converged = True
            break
    tail = traj.steps[-8:]
    floor = max(10 * cfg.conv_tol, 1e-14)  # ignore rounding jitter at the fixed point
    if len(tail) > 1 and any(b > 1.2 * a and b > floor for a, b in zip(tail, tail[1:])):
        warnings.warn("step sizes increased on the trajectory tail", RuntimeWarning)
    return traj, traj.populations[-1]


def run_dc(
    n: int, spec: ThermalSpec, noise: GateNoiseModel
) -> tuple[np.ndarray, float]:
    """Gate-level mirror protocol on n thermal qubits; returns (rho_target, T_eff)."""
    if not 2 <= n <= 8:
        raise SizeLimit(f"gate-level mirror protocol capped at 8 qubits, got {n}")
    circuit = transpile(build_dc_mirror_circuit(n))
    rho0 = np.eye(1, dtype=complex)
    q = thermal_qubit(spec)
    for _ in range(n):
        rho0 = np.kron(rho0, q)
    rho = simulate_noisy_circuit(circuit, rho0, noise)
    target = reduce_to_target(rho)
    return target, effective_temperature(target, spec.frequency)


def dc_gate_count(n: int) -> int:
    return count_cx(transpile(build_dc_mirror_circuit(n)))


def tsac_gate_count(n: int) -> int:
    return count_cx(transpile(build_tsac_circuit(n)))


def twodesign_validation(
    n: int,
    repetitions: list[int],
    p_init: float,
    noise: GateNoiseModel,
) -> list[tuple[int, float]]:
    """Fidelity test of the twirled error channel against its depolarizing form.

    A location is an (unordered) qubit pair hosting CX gates; its error
    channel is fixed by the first CX on that pair. With the compression
    circuit repeated R times, the channel is conjugated by every noiseless
    prefix (gate included) ending in a CX on that pair, the outputs are
    averaged and compared against q rho0 + (1-q) I/d. Returned value per R
    is the mean fidelity over locations; R = 0 uses identity prefixes.
    """
    from .channels import q_param
    from .linalg import fidelity

    if noise.error_part is None:
        raise InvalidParam("needs a noisy gate model")
    base = transpile(build_tsac_circuit(n))
    d = 1 << n
    rho0 = np.eye(1, dtype=complex)
    p0 = np.diag([p_init, 1.0 - p_init]).astype(complex)
    for _ in range(n):
        rho0 = np.kron(rho0, p0)
    q = q_param(noise.error_part, d)
    rhs = q * rho0 + (1.0 - q) * np.eye(d, dtype=complex) / d

    locations: list[tuple[int, int]] = []
    error_on = {}
    for g in base.gates:
        if g.kind != "CX":
            continue
        key = tuple(sorted((g.controls[0], g.target)))
        if key not in error_on:
            locations.append(key)
            slots = noise_slots(g.controls[0], g.target)
            error_on[key] = embed_two_qubit(noise.error_part, slots, n)

    results = []
    for reps in repetitions:
        if reps == 0:
            fids = [fidelity(apply_channel(rho0, error_on[k]), rhs) for k in locations]
            results.append((0, float(np.mean(fids))))
            continue
        accum = {k: np.zeros((d, d), dtype=complex) for k in locations}
        counts = {k: 0 for k in locations}
        rho = np.array(rho0)
        prefix = np.eye(d, dtype=complex)
        for _ in range(reps):
            for g in base.gates:
                rho = _apply_gate_state(rho, g, n)
                prefix = _apply_gate_unitary(prefix, g, n)
                if g.kind == "CX":
                    k = tuple(sorted((g.controls[0], g.target)))
                    sigma = apply_channel(rho, error_on[k])
                    accum[k] += prefix.conj().T @ sigma @ prefix
                    counts[k] += 1
        fids = [fidelity(accum[k] / counts[k], rhs) for k in locations]
        results.append((reps, float(np.mean(fids))))
    return results


def _apply_gate_unitary(u: np.ndarray, gate, n: int) -> np.ndarray:
    from .circuits import _apply_gate_matrix

    return _apply_gate_matrix(u, gate, n)


def gda_round_reference(
    rho: np.ndarray, epsilon: float, est: GdaEstimate
) -> np.ndarray:
    """One idealized round: reset, exact compression unitary, global depolarizing."""
    from .channels import depolarize
    from .circuits import tsac_compression_unitary
    from .linalg import apply_unitary

    n = num_qubits(rho.shape[0])
    out = apply_unitary(reset_channel(rho, epsilon), tsac_compression_unitary(n))
    return depolarize(out, est.eta)
