"""Single-shot dynamic cooling via the mirror (bitwise-complement) protocol.

The protocol pairs every computational basis state with its bitwise
complement and swaps the populations of a pair exactly when that moves
probability weight toward the target qubit's ground state. The target qubit
is qubit 0 (most significant bit).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParam, NegativeTemperature, SizeLimit, ZeroTemperatureWarning
from .linalg import num_qubits, partial_trace
from . import gda as _gda

# CODATA exact values (SI).
PLANCK_H = 6.62607015e-34  # J s
BOLTZMANN_K = 1.380649e-23  # J / K

MAX_UNITARY_QUBITS = 12


@dataclass(frozen=True)
class MirrorPair:
    """A complement pair of basis indices, canonically oriented x < x_bar."""

    x: int
    x_bar: int
    swap: bool


@dataclass(frozen=True)
class ThermalSpec:
    """Thermal qubit ensemble: temperature in kelvin, transition frequency in Hz.

    The energy gap is h*f; the excited-state weight follows the Boltzmann
    factor exp(-h f / (kB T)).
    """

    temperature: float
    frequency: float

    def __post_init__(self) -> None:
        if self.temperature <= 0:
            raise InvalidParam(f"temperature must be positive, got {self.temperature}")
        if self.frequency <= 0:
            raise InvalidParam(f"frequency must be positive, got {self.frequency}")

    @property
    def boltzmann_ratio(self) -> float:
        """p1/p0 = exp(-h f / (kB T))."""
        return float(np.exp(-PLANCK_H * self.frequency / (BOLTZMANN_K * self.temperature)))

    @property
    def ground_probability(self) -> float:
        return 1.0 / (1.0 + self.boltzmann_ratio)


def mirror_pairs(n: int) -> list[MirrorPair]:
    """All 2^(n-1) complement pairs with their swap flags.

    A pair is swapped when the two members have different Hamming weights and
    the lower-weight member has its target bit (qubit 0) excited. Equal-weight
    pairs are never swapped:
    their members carry identical thermal populations, so the swap would be a
    no-op on the protocol's input.
    """
    if n < 2:
        raise InvalidParam(f"need at least 2 qubits, got {n}")
    full = (1 << n) - 1
    pairs = []
    for x in range(1 << (n - 1)):  # x < x_bar exactly when the top bit of x is 0
        x_bar = x ^ full
        wx, wb = bin(x).count("1"), bin(x_bar).count("1")
        if wx == wb:
            swap = False
        else:
            low = x if wx < wb else x_bar
            swap = bool(low >> (n - 1) & 1)
        pairs.append(MirrorPair(x, x_bar, swap))
    return pairs


def dc_unitary(n: int) -> np.ndarray:
    """Permutation matrix of the mirror protocol: product of flagged swaps."""
    if n > MAX_UNITARY_QUBITS:
        raise SizeLimit(f"dense unitary capped at {MAX_UNITARY_QUBITS} qubits, got {n}")
    perm = np.arange(1 << n)
    for pair in mirror_pairs(n):
        if pair.swap:
            perm[pair.x], perm[pair.x_bar] = pair.x_bar, pair.x
    u = np.zeros((1 << n, 1 << n), dtype=complex)
    u[perm, np.arange(1 << n)] = 1.0
    return u


def thermal_qubit(spec: ThermalSpec) -> np.ndarray:
    """Single-qubit thermal state diag(p0, p1) for the given spec."""
    p0 = spec.ground_probability
    return np.diag([p0, 1.0 - p0]).astype(complex)


def _dc_permuted_populations(n: int, spec: ThermalSpec) -> np.ndarray:
    p0 = spec.ground_probability
    pops = np.ones(1)
    for _ in range(n):
        pops = np.kron(pops, np.array([p0, 1.0 - p0]))
    for pair in mirror_pairs(n):
        if pair.swap:
            pops[pair.x], pops[pair.x_bar] = pops[pair.x_bar], pops[pair.x]
    return pops


def ideal_dc_output(n: int, spec: ThermalSpec) -> np.ndarray:
    """Target-qubit state after the exact mirror permutation on n thermal qubits.

    The input is diagonal and the protocol is a basis permutation, so the
    populations are permuted directly and then summed over the auxiliaries.
    """
    if not 2 <= n <= MAX_UNITARY_QUBITS:
        raise SizeLimit(f"qubit count {n} outside [2, {MAX_UNITARY_QUBITS}]")
    pops = _dc_permuted_populations(n, spec)
    half = 1 << (n - 1)
    return np.diag([pops[:half].sum(), pops[half:].sum()]).astype(complex)


def gda_dc_output(n: int, spec: ThermalSpec, p: float, n_tg: int) -> np.ndarray:
    """Depolarized ideal output: (1 - eta_T) rho_ideal + eta_T I/2.

    eta_T is the timekeeping depolarizing strength for the full n-qubit
    register; depolarizing commutes with the partial trace, so the reduced
    target state is depolarized with the same strength.
    """
    est = _gda.eta_timekeeping(p, n_tg, 2**n)
    ideal = ideal_dc_output(n, spec)
    return ideal + est.eta * (np.eye(2, dtype=complex) / 2 - ideal)


def effective_temperature(rho: np.ndarray, frequency: float) -> float:
    """Invert the Boltzmann relation on a diagonal one-qubit state.

    T = h f / (kB ln(p0/p1)). Raises NegativeTemperature on population
    inversion; returns 0 (with a warning) for a pure ground state.
    """
    rho = np.asarray(rho)
    p0 = float(rho[0, 0].real)
    p1 = float(rho[1, 1].real)
    if p1 <= 0.0:
        warnings.warn("excited-state population is zero", ZeroTemperatureWarning)
        return 0.0
    if p1 >= p0:
        raise NegativeTemperature(f"populations ({p0:.6g}, {p1:.6g}) are not cooling-ordered")
    return PLANCK_H * frequency / (BOLTZMANN_K * np.log(p0 / p1))


def reduce_to_target(rho: np.ndarray) -> np.ndarray:
    """Trace out everything but qubit 0."""
    n = num_qubits(rho.shape[0])
    return partial_trace(rho, keep=[0], dims=[2] * n)
