"""Kraus channels for the gate-noise models, plus reset and depolarizing maps.

A noisy two-qubit gate is modelled as the ideal gate followed by an error
channel of the form ``E(rho) = (1-p) rho + p Lambda(rho)`` with error
probability ``p`` and a trace-preserving error part ``Lambda``. Single-qubit
gates are treated as noiseless throughout (two-qubit gates dominate the error
budget on the targeted hardware), so this module deliberately provides no
single-qubit noise model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidDims, InvalidParam, InvalidQubits
from .linalg import I2, PAULI_X, PAULI_Y, PAULI_Z, kron, num_qubits, partial_trace

COMPLETENESS_ATOL = 1e-10

# Above this register size, two-qubit channels are applied by tensor
# contraction on the target axes instead of dense full-space Kraus sums.
FULL_SPACE_MAX_QUBITS = 6


@dataclass(frozen=True)
class KrausChannel:
    """A completely positive trace-preserving map given by Kraus operators."""

    n_qubits: int
    kraus_ops: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def completeness_defect(self) -> float:
        """Max-entry deviation of sum(K^dag K) from the identity."""
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for k in self.kraus_ops:
            acc += k.conj().T @ k
        return float(np.abs(acc - np.eye(self.dim)).max())


def identity_channel(n_qubits: int = 2) -> KrausChannel:
    return KrausChannel(n_qubits, (np.eye(2**n_qubits, dtype=complex),))


@dataclass(frozen=True)
class GateNoiseModel:
    """Two-qubit gate noise split into error probability and error part.

    ``full`` is the complete error channel; ``error_part`` is the normalized
    non-identity component (None when the channel is noiseless).
    """

    kind: str
    error_probability: float
    full: KrausChannel
    error_part: Optional[KrausChannel] = None
    parameter: float = field(default=0.0)

    @property
    def is_noisy(self) -> bool:
        return self.error_probability > 0.0


def no_noise() -> GateNoiseModel:
    return GateNoiseModel("none", 0.0, identity_channel(2), None)


def bitflip_channel(chi: float) -> GateNoiseModel:
    """Two-qubit bit-flip noise with physical flip parameter ``chi``.

    Kraus operators (1-chi) I@I, sqrt(chi(1-chi)) X@I, sqrt(chi(1-chi)) I@X,
    chi X@X; the error probability is p = 2 chi - chi^2 and the error part is
    the normalized mixture of the three non-identity terms.
    """
    if not 0.0 <= chi <= 1.0:
        raise InvalidParam(f"chi must lie in [0, 1], got {chi}")
    xi = kron(PAULI_X, I2)
    ix = kron(I2, PAULI_X)
    xx = kron(PAULI_X, PAULI_X)
    ii = kron(I2, I2)
    c = np.sqrt(chi * (1.0 - chi))
    full_ops = [(1.0 - chi) * ii, c * xi, c * ix, chi * xx]
    full = KrausChannel(2, tuple(op for op in full_ops if np.abs(op).max() > 0))
    p = 2.0 * chi - chi**2
    if p == 0.0:
        return GateNoiseModel("bitflip", 0.0, full, None, parameter=chi)
    # Pauli mixture with weights chi(1-chi)/p, chi(1-chi)/p, chi^2/p.
    w = chi * (1.0 - chi) / p
    err_ops = [np.sqrt(w) * xi, np.sqrt(w) * ix, (chi / np.sqrt(p)) * xx]
    error = KrausChannel(2, tuple(op for op in err_ops if np.abs(op).max() > 0))
    return GateNoiseModel("bitflip", p, full, error, parameter=chi)


def timekeeping_channel(p: float) -> GateNoiseModel:
    """Timekeeping noise of a CX gate: the gate fires twice with probability p.

    Kraus operators A1 = sqrt(1-p) I@I and
    A2 = sqrt(p) (|1><1|@X + |0><0|@I); A2/sqrt(p) is itself the CX unitary,
    so the error part has that single Kraus operator.
    """
    if not 0.0 <= p < 1.0:
        raise InvalidParam(f"p must lie in [0, 1), got {p}")
    cx = kron(np.diag([1.0, 0.0]), I2) + kron(np.diag([0.0, 1.0]), PAULI_X)
    if p == 0.0:
        return GateNoiseModel("timekeeping", 0.0, identity_channel(2), None, parameter=0.0)
    full = KrausChannel(2, (np.sqrt(1.0 - p) * np.eye(4, dtype=complex), np.sqrt(p) * cx))
    error = KrausChannel(2, (cx,))
    return GateNoiseModel("timekeeping", p, full, error, parameter=p)


def depolarizing2q_channel(strength: float) -> GateNoiseModel:
    """Symmetric two-qubit depolarizing channel of the given strength."""
    if not 0.0 <= strength <= 16.0 / 15.0:
        raise InvalidParam(f"strength must lie in [0, 16/15], got {strength}")
    paulis = [I2, PAULI_X, PAULI_Y, PAULI_Z]
    two_q = [kron(a, b) for a, b in product(paulis, paulis)]
    p = 15.0 * strength / 16.0
    full_ops = [np.sqrt(1.0 - p) * two_q[0]]
    full_ops += [np.sqrt(strength / 16.0) * op for op in two_q[1:]]
    full = KrausChannel(2, tuple(op for op in full_ops if np.abs(op).max() > 0))
    if p == 0.0:
        return GateNoiseModel("depolarizing2q", 0.0, full, None, parameter=strength)
    error = KrausChannel(2, tuple(op / np.sqrt(15.0) for op in two_q[1:]))
    return GateNoiseModel("depolarizing2q", p, full, error, parameter=strength)


def superop_trace(channel: KrausChannel) -> float:
    """Trace of the channel as a superoperator: sum_i |Tr K_i|^2."""
    return float(sum(abs(np.trace(k)) ** 2 for k in channel.kraus_ops))


def q_param(channel: KrausChannel, d: int) -> float:
    """Twirled survival weight q = (Tr(Lambda) - 1) / (d^2 - 1).

    ``d`` is the dimension of the full register the channel is embedded in;
    spectator qubits act as the identity and contribute a factor (d/d_ch)^2
    to the superoperator trace.
    """
    if d < 2:
        raise InvalidParam(f"dimension must be at least 2, got {d}")
    d_ch = channel.dim
    if d % d_ch != 0:
        raise InvalidDims(f"target dimension {d} incompatible with channel dim {d_ch}")
    embedded_trace = superop_trace(channel) * (d / d_ch) ** 2
    return (embedded_trace - 1.0) / (d**2 - 1.0)


def embed_two_qubit(channel: KrausChannel, pair: tuple[int, int], n: int) -> KrausChannel:
    """Extend a two-qubit channel to ``n`` qubits, acting on ``pair``.

    The first tensor factor of each Kraus operator lands on ``pair[0]``, the
    second on ``pair[1]``; spectators get the identity.
    """
    a, b = pair
    if a == b or not (0 <= a < n and 0 <= b < n):
        raise InvalidQubits(f"pair {pair} invalid for {n} qubits")
    if channel.n_qubits != 2:
        raise InvalidDims(f"expected a two-qubit channel, got {channel.n_qubits} qubits")
    rest = [q for q in range(n) if q not in (a, b)]
    order = [a, b] + rest  # qubit carried by each tensor axis of kron(K, I)
    ops = []
    for k in channel.kraus_ops:
        full = np.kron(k, np.eye(2 ** (n - 2), dtype=complex))
        tensor = full.reshape((2,) * (2 * n))
        # axis i carries qubit order[i]; send it to position order[i]
        tensor = np.moveaxis(
            tensor,
            list(range(2 * n)),
            order + [n + q for q in order],
        )
        ops.append(np.ascontiguousarray(tensor.reshape(2**n, 2**n)))
    return KrausChannel(n, tuple(ops))


def apply_channel(rho: np.ndarray, channel: KrausChannel) -> np.ndarray:
    """Apply a full-space channel: sum_i K_i rho K_i^dag."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.dim, channel.dim):
        raise InvalidDims(
            f"state shape {rho.shape} does not match channel dim {channel.dim}"
        )
    out = np.zeros_like(rho)
    for k in channel.kraus_ops:
        out += k @ rho @ k.conj().T
    return out


def conjugate_local(rho: np.ndarray, op: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Compute op rho op^dag where op acts only on the listed qubits."""
    n = num_qubits(rho.shape[0])
    k = len(qubits)
    t = rho.reshape((2,) * (2 * n))
    opt = np.asarray(op, dtype=complex).reshape((2,) * (2 * k))
    row = list(qubits)
    col = [n + q for q in qubits]
    t = np.tensordot(opt, t, axes=(list(range(k, 2 * k)), row))
    t = np.moveaxis(t, list(range(k)), row)
    t = np.tensordot(np.conj(opt), t, axes=(list(range(k, 2 * k)), col))
    t = np.moveaxis(t, list(range(k)), col)
    return t.reshape(2**n, 2**n)


def apply_two_qubit_channel(
    rho: np.ndarray, channel: KrausChannel, pair: tuple[int, int]
) -> np.ndarray:
    """Apply a two-qubit channel to an n-qubit state on the given pair.

    Small registers go through dense embedded operators; larger ones through
    local tensor contraction. Both paths agree to within float rounding.
    """
    n = num_qubits(rho.shape[0])
    if n <= FULL_SPACE_MAX_QUBITS:
        return apply_channel(rho, embed_two_qubit(channel, pair, n))
    return apply_two_qubit_channel_local(rho, channel, pair)


def apply_two_qubit_channel_local(
    rho: np.ndarray, channel: KrausChannel, pair: tuple[int, int]
) -> np.ndarray:
    a, b = pair
    n = num_qubits(rho.shape[0])
    if a == b or not (0 <= a < n and 0 <= b < n):
        raise InvalidQubits(f"pair {pair} invalid for {n} qubits")
    out = np.zeros_like(rho, dtype=complex)
    for k in channel.kraus_ops:
        out += conjugate_local(rho, k, [a, b])
    return out


def depolarize(rho: np.ndarray, eta: float) -> np.ndarray:
    """Global depolarizing map (1-eta) rho + eta I/d.

    Written as rho + eta (I/d - rho) so the maximally mixed state is an exact
    fixed point.
    """
    if not 0.0 <= eta <= 1.0:
        raise InvalidParam(f"eta must lie in [0, 1], got {eta}")
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    return rho + eta * (np.eye(d, dtype=complex) / d - rho)


def thermal_reset_state(epsilon: float) -> np.ndarray:
    """Single-qubit thermal state diag(e^eps, e^-eps) / (e^eps + e^-eps)."""
    z = np.exp(epsilon) + np.exp(-epsilon)
    return np.diag([np.exp(epsilon) / z, np.exp(-epsilon) / z]).astype(complex)


def reset_channel(rho: np.ndarray, epsilon: float) -> np.ndarray:
    """Replace the last qubit with a fresh thermal state of polarization eps.

    The reset qubit is always the last (least significant) qubit.
    """
    if epsilon <= 0:
        raise InvalidParam(f"polarization must be positive, got {epsilon}")
    n = num_qubits(rho.shape[0])
    if n < 2:
        raise InvalidDims("reset needs at least one computational qubit besides the reset qubit")
    kept = partial_trace(rho, keep=range(n - 1), dims=[2] * n)
    return np.kron(kept, thermal_reset_state(epsilon))
