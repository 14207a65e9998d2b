import numpy as np
import pytest

from coolsim import circuits as cc
from coolsim.dc import dc_unitary
from coolsim.errors import InvalidParam, InvalidQubits, NotTranspiled, SizeLimit

RNG = np.random.default_rng(99)


def direct_mcx(n, controls, target):
    d = 1 << n
    u = np.zeros((d, d), dtype=complex)
    for m in range(d):
        if all((m >> (n - 1 - c)) & 1 for c in controls):
            u[m ^ (1 << (n - 1 - target)), m] = 1
        else:
            u[m, m] = 1
    return u


class TestGateValidation:
    def test_rejects_duplicate_qubits(self):
        with pytest.raises(InvalidQubits):
            cc.Circuit(2, (cc.cx(0, 0),))

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidQubits):
            cc.Circuit(2, (cc.x(2),))

    def test_single_control_mcx_normalizes_to_cx(self):
        assert cc.mcx((1,), 0).kind == "CX"


class TestTsacBuilder:
    def test_n2_exact_sequence(self):
        got = [(g.kind, g.controls, g.target) for g in cc.build_tsac_circuit(2).gates]
        want = [
            ("X", (), 1),
            ("CX", (1,), 0),
            ("CX", (0,), 1),
            ("X", (), 1),
            ("CX", (1,), 0),
            ("X", (), 1),
        ]
        assert got == want

    def test_n3_gate_census(self):
        gates = cc.build_tsac_circuit(3).gates
        kinds = [g.kind for g in gates]
        assert kinds.count("X") == 3
        assert kinds.count("CX") == 2
        assert kinds.count("MCX") == 3

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_unitary_is_block_compression(self, n):
        u = cc.circuit_unitary(cc.build_tsac_circuit(n))
        assert np.abs(u - cc.tsac_compression_unitary(n)).max() < 1e-10

    def test_rejects_single_qubit(self):
        with pytest.raises(InvalidParam):
            cc.build_tsac_circuit(1)


class TestMcxDecompose:
    def test_single_control(self):
        assert cc.mcx_decompose((3,), 1) == [cc.cx(3, 1)]

    def test_two_controls_is_six_cx(self):
        gates = cc.mcx_decompose((0, 1), 2)
        circuit = cc.Circuit(3, tuple(gates))
        assert cc.count_cx(circuit) == 6
        assert cc.unitaries_equal_up_to_phase(
            cc.circuit_unitary(circuit), direct_mcx(3, (0, 1), 2), 1e-10
        )

    @pytest.mark.parametrize("k", [3, 4, 5])
    def test_gray_network_matches_direct_matrix(self, k):
        n = k + 1
        circuit = cc.Circuit(n, tuple(cc.mcx_decompose(tuple(range(k)), k)))
        assert cc.unitaries_equal_up_to_phase(
            cc.circuit_unitary(circuit), direct_mcx(n, tuple(range(k)), k), 1e-10
        )

    def test_scrambled_qubit_order(self):
        circuit = cc.Circuit(5, tuple(cc.mcx_decompose((4, 0, 2), 1)))
        assert cc.unitaries_equal_up_to_phase(
            cc.circuit_unitary(circuit), direct_mcx(5, (4, 0, 2), 1), 1e-10
        )

    def test_no_controls_rejected(self):
        with pytest.raises(InvalidParam):
            cc.mcx_decompose((), 0)


def random_circuit(n, length, rng):
    gates = []
    for _ in range(length):
        kind = rng.choice(["X", "SX", "RZ", "CX", "MCX"])
        if kind in ("X", "SX"):
            gates.append(cc.Gate(kind, int(rng.integers(n))))
        elif kind == "RZ":
            gates.append(cc.rz(float(rng.uniform(-np.pi, np.pi)), int(rng.integers(n))))
        else:
            count = 1 if kind == "CX" or n < 4 else int(rng.integers(2, n - 1))
            qubits = rng.choice(n, size=count + 1, replace=False)
            gates.append(cc.mcx(tuple(int(q) for q in qubits[:-1]), int(qubits[-1])))
    return cc.Circuit(n, tuple(gates))


class TestTranspile:
    def test_basis_circuit_unchanged(self):
        circuit = cc.Circuit(2, (cc.cx(0, 1), cc.sx(0), cc.rz(0.3, 1)))
        assert cc.transpile(circuit) == circuit

    def test_x_becomes_two_sx(self):
        out = cc.transpile(cc.Circuit(1, (cc.x(0),)))
        assert [g.kind for g in out.gates] == ["SX", "SX"]
        assert cc.unitaries_equal_up_to_phase(
            cc.circuit_unitary(out), np.array([[0, 1], [1, 0]], dtype=complex), 1e-12
        )

    def test_tsac_n3_has_twenty_cx(self):
        assert cc.count_cx(cc.transpile(cc.build_tsac_circuit(3))) == 20

    def test_single_toffoli_costs_six(self):
        out = cc.transpile(cc.Circuit(3, (cc.mcx((0, 1), 2),)))
        assert cc.count_cx(out) == 6

    def test_only_basis_gates_emitted(self):
        out = cc.transpile(cc.build_tsac_circuit(5))
        assert set(g.kind for g in out.gates) <= {"CX", "SX", "RZ"}

    @pytest.mark.parametrize("seed", range(50))
    def test_preserves_unitary_up_to_phase(self, seed):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(2, 5))
        circuit = random_circuit(n, int(rng.integers(1, 8)), rng)
        assert cc.unitaries_equal_up_to_phase(
            cc.circuit_unitary(cc.transpile(circuit)), cc.circuit_unitary(circuit), 1e-8
        )


class TestCounts:
    def test_empty_circuit(self):
        assert cc.count_cx(cc.Circuit(3, ())) == 0

    def test_known_counts(self):
        counts = {n: cc.count_cx(cc.transpile(cc.build_tsac_circuit(n))) for n in range(2, 9)}
        assert counts[2] == 3
        assert counts[3] == 20
        values = [counts[n] for n in range(2, 9)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_untranspiled_rejected(self):
        with pytest.raises(NotTranspiled):
            cc.count_cx(cc.build_tsac_circuit(3))

    def test_locations(self):
        circuit = cc.transpile(cc.build_tsac_circuit(3))
        locs = cc.cnot_locations(circuit)
        assert len(locs) == 20
        for idx, (a, b) in locs:
            assert circuit.gates[idx].kind == "CX"
            assert a != b and 0 <= a < 3 and 0 <= b < 3

    def test_locations_empty_without_cx(self):
        assert cc.cnot_locations(cc.Circuit(2, (cc.sx(0),))) == []


class TestCircuitUnitary:
    def test_empty_is_identity(self):
        assert np.allclose(cc.circuit_unitary(cc.Circuit(2, ())), np.eye(4))

    def test_single_x(self):
        u = cc.circuit_unitary(cc.Circuit(1, (cc.x(0),)))
        assert np.allclose(u, [[0, 1], [1, 0]])

    def test_size_limit(self):
        with pytest.raises(SizeLimit):
            cc.circuit_unitary(cc.Circuit(13, ()))


class TestDcMirrorBuilder:
    def test_n2_is_empty(self):
        assert cc.build_dc_mirror_circuit(2).gates == ()

    def test_n3_swaps_single_pair(self):
        u = cc.circuit_unitary(cc.transpile(cc.build_dc_mirror_circuit(3)))
        perm = np.arange(8)
        perm[3], perm[4] = 4, 3
        want = np.zeros((8, 8))
        want[perm, np.arange(8)] = 1
        assert cc.unitaries_equal_up_to_phase(u, want.astype(complex), 1e-9)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_matches_reference_permutation(self, n):
        u = cc.circuit_unitary(cc.transpile(cc.build_dc_mirror_circuit(n)))
        assert cc.unitaries_equal_up_to_phase(u, dc_unitary(n), 1e-9)

    def test_already_in_basis(self):
        circuit = cc.build_dc_mirror_circuit(4)
        assert set(g.kind for g in circuit.gates) <= {"CX", "SX", "RZ"}

    def test_symmetric_permutation(self):
        u = cc.circuit_unitary(cc.transpile(cc.build_dc_mirror_circuit(4)))
        ref = dc_unitary(4)
        assert np.abs(ref - ref.T).max() == 0
        assert np.abs(ref @ ref - np.eye(16)).max() == 0
        assert cc.unitaries_equal_up_to_phase(u @ u, np.eye(16, dtype=complex), 1e-8)


def test_circuit_text_roundtrip_format():
    circuit = cc.Circuit(3, (cc.x(1), cc.cx(1, 0), cc.rz(0.25, 2), cc.sx(0), cc.mcx((0, 1), 2)))
    lines = cc.circuit_to_text(circuit).splitlines()
    assert lines[0] == "X 1"
    assert lines[1] == "CX 1 0"
    assert lines[2] == "RZ 0.25 2"
    assert lines[3] == "SX 0"
    assert lines[4] == "MCX 0,1 2"
