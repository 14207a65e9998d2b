"""Markov-chain model of the iterative cooling protocol's diagonal dynamics.

One protocol round (reset, compression, global depolarizing noise) acts on
the diagonal of the computational-qubit density matrix as a column-stochastic
transition matrix. Its unique steady state has the closed form

    v_k = z1 * lambda1^(k-1) + z2 * lambda2^(k-1) + 1/d_c,

where lambda1, lambda2 are the roots of
(1+E) x^2 - (2 + d_c C) x + (1-E) = 0 with E = tanh(eps) and
C = 2 eta / (d_c (1 - eta)), constrained by lambda1 * lambda2 = e^(-2 eps).

The coefficients follow from the two boundary rows of the transition matrix
together with normalization:

    z1 = 2 E (lambda2^dc - 1) / [dc (lambda2 - 1)(E + 1)(lambda2^dc - lambda1^dc)]

and z2 symmetrically with the roles of the roots exchanged. (The factor 2 is
required for the boundary conditions to hold and for the noiseless limit to
reduce to z1 = -1/d_c; see the ideal-reduction tests.)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidParam, NoConvergence
from . import circuits as _circuits
from . import gda as _gda

STOCHASTIC_ATOL = 1e-12
IDEAL_ETA_SWITCH = 1e-12
POWER_MAX_ITERS = 10**7


@dataclass(frozen=True)
class CoolingLimit:
    """Analytic steady state of the noisy cooling chain."""

    n_c: int
    epsilon: float
    eta: float
    lambda1: float
    lambda2: float
    z1: float
    z2: float
    v: np.ndarray

    @property
    def d_c(self) -> int:
        return 2**self.n_c


def ideal_transition(n_c: int, epsilon: float) -> np.ndarray:
    """Noiseless d_c x d_c transition matrix of one cooling round."""
    if n_c < 1:
        raise InvalidParam(f"need at least one computational qubit, got {n_c}")
    if epsilon <= 0:
        raise InvalidParam(f"polarization must be positive, got {epsilon}")
    d_c = 2**n_c
    z = np.exp(epsilon) + np.exp(-epsilon)
    up = np.exp(epsilon) / z
    down = np.exp(-epsilon) / z
    t = np.zeros((d_c, d_c))
    for i in range(d_c - 1):
        t[i, i + 1] = up
        t[i + 1, i] = down
    t[0, 0] = up
    t[d_c - 1, d_c - 1] = down
    return t


def noisy_transition(n_c: int, epsilon: float, eta: float) -> np.ndarray:
    """(1 - eta) T + (eta / d_c) * ones: the depolarized transition matrix."""
    if not 0.0 <= eta <= 1.0:
        raise InvalidParam(f"eta must lie in [0, 1], got {eta}")
    t = ideal_transition(n_c, epsilon)
    d_c = t.shape[0]
    return (1.0 - eta) * t + eta / d_c * np.ones_like(t)


def assert_column_stochastic(t: np.ndarray, atol: float = STOCHASTIC_ATOL) -> None:
    if t.min() < -atol:
        raise InvalidParam(f"negative entry {t.min():.3e}")
    defect = np.abs(t.sum(axis=0) - 1.0).max()
    if defect > atol:
        raise InvalidParam(f"columns sum to 1 +- {defect:.3e}, beyond {atol}")


def steady_state_power(t: np.ndarray, tol: float = 1e-13) -> np.ndarray:
    """Steady state by power iteration from the uniform distribution.

    Convergence is accelerated by repeated squaring of the matrix (each
    squaring doubles the effective iteration count); the returned vector is
    polished with plain multiplications and satisfies ||T v - v||_1 <= tol.
    """
    assert_column_stochastic(t)
    d = t.shape[0]
    v = np.full(d, 1.0 / d)
    power = np.array(t, dtype=float)
    doublings = max(int(np.log2(POWER_MAX_ITERS)) + 1, 1)
    for _ in range(doublings):
        v = power @ v
        v /= v.sum()
        if np.abs(t @ v - v).sum() <= tol:
            break
        power = power @ power
    else:
        raise NoConvergence(
            f"power iteration residual above {tol} after {POWER_MAX_ITERS} effective steps"
        )
    # Rounding from the matrix squarings washes out under the exact map.
    for _ in range(50):
        v = t @ v
        v /= v.sum()
    return v


def _characteristic_roots(epsilon: float, eta: float) -> tuple[float, float, float]:
    """Return (lambda1 - 1, lambda1, lambda2), computed without cancellation."""
    e_ = np.tanh(epsilon)
    s = 2.0 * eta / (1.0 - eta)  # equals d_c * C, independent of d_c
    disc = s * s + 4.0 * s + 4.0 * e_ * e_
    lam1m1 = 2.0 * s / (np.sqrt(disc) + 2.0 * e_ - s)
    lam1 = 1.0 + lam1m1
    lam2 = np.exp(-2.0 * epsilon) / lam1
    return lam1m1, lam1, lam2


def steady_state_analytic(n_c: int, epsilon: float, eta: float) -> CoolingLimit:
    """Closed-form steady state of the noisy transition matrix.

    Large powers of the roots are handled in log space; below
    ``IDEAL_ETA_SWITCH`` the noiseless closed form is used directly, since
    the general z2 expression degenerates to 0/0 at lambda1 = 1.
    """
    if n_c < 1:
        raise InvalidParam(f"need at least one computational qubit, got {n_c}")
    if epsilon <= 0:
        raise InvalidParam(f"polarization must be positive, got {epsilon}")
    if not 0.0 <= eta < 1.0:
        raise InvalidParam(f"eta must lie in [0, 1), got {eta}")
    d_c = 2**n_c
    k = np.arange(1, d_c + 1)
    if eta < IDEAL_ETA_SWITCH:
        lam2 = np.exp(-2.0 * epsilon)
        z2 = (1.0 - lam2) / -np.expm1(-2.0 * d_c * epsilon)
        v = z2 * np.exp(-2.0 * epsilon * (k - 1))
        return CoolingLimit(n_c, epsilon, eta, 1.0, lam2, -1.0 / d_c, z2, v)
    e_ = np.tanh(epsilon)
    lam1m1, lam1, lam2 = _characteristic_roots(epsilon, eta)
    l1 = np.log1p(lam1m1)
    l2 = -2.0 * epsilon - l1
    pref = 2.0 * e_ / (d_c * (e_ + 1.0))
    lam2_dc = np.exp(d_c * l2)
    ratio_dc = np.exp(d_c * (l2 - l1))  # (lambda2 / lambda1)^d_c
    # z1 lam1^(k-1), with lam1^d_c folded into the ratio to avoid overflow
    grow = pref * (lam2_dc - 1.0) / ((lam2 - 1.0) * (ratio_dc - 1.0))
    term1 = grow * np.exp((k - 1.0 - d_c) * l1)
    # z2 lam2^(k-1); (1 - lam1^-d_c)/(lam1 - 1) stays finite as eta -> 0
    decay = pref * -np.expm1(-d_c * l1) / (lam1m1 * (1.0 - ratio_dc))
    term2 = decay * np.exp((k - 1.0) * l2)
    v = term1 + term2 + 1.0 / d_c
    return CoolingLimit(n_c, epsilon, eta, lam1, lam2, float(term1[0]), float(term2[0]), v)


def perturbative_eigs(epsilon: float, eta: float) -> tuple[float, float]:
    """First-order roots: (1 + eta/tanh(eps), e^(-2 eps) (1 - eta/tanh(eps)))."""
    e_ = np.tanh(epsilon)
    return 1.0 + eta / e_, np.exp(-2.0 * epsilon) * (1.0 - eta / e_)


def target_population(limit: CoolingLimit) -> float:
    """Ground-state population of the target qubit: sum of the first d_c/2 weights."""
    return float(limit.v[: limit.d_c // 2].sum())


def target_population_of(v: np.ndarray) -> float:
    return float(np.asarray(v)[: len(v) // 2].sum())


def iterate_dynamics(
    n_c: int,
    epsilon: float,
    eta: float,
    v0: Sequence[float],
    rounds: int,
) -> list[float]:
    """Target-qubit population per round, starting from v0 (round 0)."""
    v = np.asarray(v0, dtype=float)
    if abs(v.sum() - 1.0) > 1e-9:
        raise InvalidParam(f"initial vector sums to {v.sum()}, expected 1")
    t = noisy_transition(n_c, epsilon, eta)
    trace = [target_population_of(v)]
    for _ in range(rounds):
        v = t @ v
        trace.append(target_population_of(v))
    return trace


def thermal_diagonal(n_c: int, epsilon: float) -> np.ndarray:
    """Diagonal of the n_c-fold thermal product state."""
    z = np.exp(epsilon) + np.exp(-epsilon)
    single = np.array([np.exp(epsilon) / z, np.exp(-epsilon) / z])
    v = np.ones(1)
    for _ in range(n_c):
        v = np.kron(v, single)
    return v


@dataclass(frozen=True)
class ScanRow:
    n: int
    n_tg: int
    eta: float
    population: float


def optimal_scan(
    p: float,
    epsilon: float,
    n_range: Iterable[int],
    model: str = "timekeeping",
) -> tuple[int, float, list[ScanRow]]:
    """Steady-state target population across qubit counts; returns the argmax.

    For each total qubit count n the circuit is built and transpiled to get
    its two-qubit gate count, the depolarizing strength follows from the
    noise model, and the population from the analytic steady state on
    n_c = n - 1 computational qubits. Ties break to the smallest n.
    """
    ns = sorted(set(n_range))
    if not ns:
        raise InvalidParam("empty qubit range")
    if any(n < 2 or n > 10 for n in ns):
        raise InvalidParam(f"qubit counts must lie in [2, 10], got {ns}")
    rows = []
    for n in ns:
        n_tg = _circuits.count_cx(_circuits.transpile(_circuits.build_tsac_circuit(n)))
        d = 2**n
        if model == "timekeeping":
            est = _gda.eta_timekeeping(p, n_tg, d)
        elif model == "bitflip":
            est = _gda.eta_bitflip(p, n_tg, d)
        else:
            raise InvalidParam(f"unknown noise model {model!r}")
        limit = steady_state_analytic(n - 1, epsilon, min(est.eta, 1.0 - 1e-15))
        rows.append(ScanRow(n, n_tg, est.eta, target_population(limit)))
    best = max(rows, key=lambda r: (r.population, -r.n))
    return best.n, best.population, rows
