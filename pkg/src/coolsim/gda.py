"""Global depolarizing strength calculator and related scaling estimates.

The cumulative effect of identical two-qubit gate noise in a deep circuit is
summarized by a single depolarizing channel of strength

    eta = p * n_TG * (1 - q),

where p is the per-gate error probability, n_TG the number of two-qubit
gates, and q = (Tr(Lambda) - 1) / (d^2 - 1) the twirled survival weight of
the error part Lambda. The formula is first order in p * n_TG; estimates
carry flags once that product leaves the perturbative regime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import depolarize
from .errors import InvalidDims, InvalidParam, Unmitigable

# p * n_TG thresholds operationalizing the first-order truncation.
REGIME_WARN = 0.1
REGIME_CLAMP = 1.0


@dataclass(frozen=True)
class GdaEstimate:
    """Effective depolarizing strength with its ingredients."""

    p: float
    n_tg: int
    q: float
    eta: float
    d: int
    regime_warning: bool = False
    clamped: bool = False


def eta_general(p: float, n_tg: int, q: float, d: int) -> GdaEstimate:
    """eta = p * n_TG * (1 - q), clamped to [0, 1] with regime flags."""
    if not 0.0 <= p < 1.0:
        raise InvalidParam(f"p must lie in [0, 1), got {p}")
    if q > 1.0:
        raise InvalidParam(f"q must not exceed 1, got {q}")
    if n_tg < 0:
        raise InvalidParam(f"gate count must be non-negative, got {n_tg}")
    if d < 2:
        raise InvalidParam(f"dimension must be at least 2, got {d}")
    raw = p * n_tg * (1.0 - q)
    budget = p * n_tg
    clamped = raw > 1.0 or budget >= REGIME_CLAMP
    eta = min(max(raw, 0.0), 1.0)
    return GdaEstimate(
        p=p,
        n_tg=n_tg,
        q=q,
        eta=eta,
        d=d,
        regime_warning=budget >= REGIME_WARN,
        clamped=clamped,
    )


def timekeeping_q(d: int) -> float:
    """q of the embedded timekeeping error part: (d^2/4 - 1) / (d^2 - 1)."""
    if d < 2:
        raise InvalidParam(f"dimension must be at least 2, got {d}")
    return (d**2 / 4.0 - 1.0) / (d**2 - 1.0)


def eta_timekeeping(p: float, n_tg: int, d: int) -> GdaEstimate:
    """eta_T = p * n_TG * (3 d^2 / 4) / (d^2 - 1)."""
    return eta_general(p, n_tg, timekeeping_q(d), d)


def eta_bitflip(chi: float, n_tg: int, d: int) -> GdaEstimate:
    """eta_B = (2 chi - chi^2) * n_TG * d^2 / (d^2 - 1)."""
    if not 0.0 <= chi <= 1.0:
        raise InvalidParam(f"chi must lie in [0, 1], got {chi}")
    p = 2.0 * chi - chi**2
    q = -1.0 / (d**2 - 1.0)
    if p >= 1.0:
        # chi = 1 gives p = 1; keep the construction but flag a hard clamp.
        raw = p * n_tg * (1.0 - q)
        return GdaEstimate(p, n_tg, q, min(raw, 1.0), d, regime_warning=True, clamped=True)
    return eta_general(p, n_tg, q, d)


def mitigate_expectation(noisy: float, eta: float) -> float:
    """Invert the depolarizing attenuation of a traceless-observable expectation."""
    if eta >= 1.0:
        raise Unmitigable(f"eta = {eta} leaves no signal to rescale")
    if eta < 0.0:
        raise InvalidParam(f"eta must be non-negative, got {eta}")
    return noisy / (1.0 - eta)


def twodesign_depth(n: int, o_norm: float, eps: float, delta: float) -> float:
    """Circuit-depth scale for the averaging sets to act as a 2-design.

    depth ~ n (n-1) * (2 ||O|| / eps^2) * ln(2/delta). Returned unrounded;
    this is an order-of-magnitude guide, not a gate count.
    """
    return n * (n - 1) * mk_samples(o_norm, eps, delta)


def mk_samples(o_norm: float, eps: float, delta: float) -> float:
    """Hoeffding sample bound (2 ||O|| / eps^2) * ln(2/delta) per gate location."""
    if eps <= 0.0:
        raise InvalidParam(f"eps must be positive, got {eps}")
    if not 0.0 < delta < 1.0:
        raise InvalidParam(f"delta must lie in (0, 1), got {delta}")
    if o_norm <= 0.0:
        raise InvalidParam(f"observable norm must be positive, got {o_norm}")
    return (2.0 * o_norm / eps**2) * math.log(2.0 / delta)


def apply_gda(rho_ideal: np.ndarray, est: GdaEstimate) -> np.ndarray:
    """Depolarize an ideal output state by the estimated strength."""
    rho_ideal = np.asarray(rho_ideal, dtype=complex)
    if rho_ideal.shape != (est.d, est.d):
        raise InvalidDims(f"state shape {rho_ideal.shape} does not match d = {est.d}")
    return depolarize(rho_ideal, est.eta)
