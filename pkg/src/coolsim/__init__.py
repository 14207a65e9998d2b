"""Noisy algorithmic-cooling simulator and depolarizing-summary analytics.

Subpackages:

- ``linalg``: dense density-matrix primitives (big-endian qubit order).
- ``channels``: Kraus channels for the gate-noise models, reset, depolarize.
- ``circuits``: gate model, protocol circuit builders, transpilation.
- ``gda``: effective depolarizing strength and mitigation arithmetic.
- ``markov``: transition matrices and analytic cooling limits.
- ``dc``: single-shot mirror-protocol cooling and temperature conversion.
- ``simulate``: exact gate-level noisy simulation.
- ``experiments`` / ``cli``: config-driven experiment runner and CLI.
"""

__version__ = "0.1.0"
