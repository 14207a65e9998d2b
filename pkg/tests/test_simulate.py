import numpy as np
import pytest

from coolsim import simulate as sim
from coolsim.channels import (
    bitflip_channel,
    depolarize,
    no_noise,
    reset_channel,
    timekeeping_channel,
)
from coolsim.circuits import (
    Circuit,
    build_dc_mirror_circuit,
    build_tsac_circuit,
    circuit_unitary,
    cx,
    transpile,
    tsac_compression_unitary,
)
from coolsim.dc import ThermalSpec, ideal_dc_output, thermal_qubit
from coolsim.errors import NotTranspiled, SizeLimit
from coolsim.gda import eta_timekeeping
from coolsim.linalg import apply_unitary, check_density_matrix, partial_trace
from coolsim.markov import noisy_transition, steady_state_analytic, target_population

EPS_REF = 0.8673


class TestNoiselessSimulation:
    @pytest.mark.parametrize("builder,n", [(build_tsac_circuit, 2), (build_tsac_circuit, 4),
                                           (build_dc_mirror_circuit, 3), (build_dc_mirror_circuit, 5)])
    def test_equals_unitary_conjugation(self, builder, n):
        circuit = transpile(builder(n))
        rho0 = sim.thermal_product_state(n, 0.7)
        direct = apply_unitary(rho0, circuit_unitary(circuit))
        assert np.abs(sim.simulate_noisy_circuit(circuit, rho0, no_noise()) - direct).max() < 1e-10

    def test_untranspiled_rejected(self):
        rho0 = sim.thermal_product_state(3, 0.7)
        with pytest.raises(NotTranspiled):
            sim.simulate_noisy_circuit(build_tsac_circuit(3), rho0, no_noise())

    def test_local_contraction_path_above_dense_cap(self):
        # n = 7 exceeds the dense-embedding cap, exercising tensor contraction
        circuit = transpile(build_dc_mirror_circuit(7))
        rho0 = sim.thermal_product_state(7, 0.9)
        out = sim.simulate_noisy_circuit(circuit, rho0, no_noise())
        direct = apply_unitary(rho0, circuit_unitary(circuit))
        assert np.abs(out - direct).max() < 1e-10
        noisy = sim.simulate_noisy_circuit(circuit, rho0, timekeeping_channel(1e-3))
        assert abs(np.trace(noisy).real - 1) < 1e-10
        assert sim.target_ground_population(noisy) < sim.target_ground_population(out)


class TestNoisyCx:
    def test_single_cx_timekeeping(self):
        # gate CX(0->1) takes |10> to |11>; the timekeeping error then fires
        # an extra CX whose control slot sits on the gate target (qubit 1),
        # sending |11> to |01> with probability p
        p = 0.2
        circuit = Circuit(2, (cx(0, 1),))
        rho0 = np.zeros((4, 4), dtype=complex)
        rho0[2, 2] = 1.0
        out = sim.simulate_noisy_circuit(circuit, rho0, timekeeping_channel(p))
        assert out[3, 3].real == pytest.approx(1 - p)
        assert out[1, 1].real == pytest.approx(p)

    def test_trace_preserved(self):
        circuit = transpile(build_tsac_circuit(3))
        rho0 = sim.thermal_product_state(3, 0.5)
        out = sim.simulate_noisy_circuit(circuit, rho0, timekeeping_channel(1e-2))
        assert abs(np.trace(out) - 1.0) < 1e-10

    def test_output_stays_valid_density_matrix(self):
        circuit = transpile(build_tsac_circuit(3))
        rho = sim.thermal_product_state(3, EPS_REF)
        for _ in range(5):
            rho = sim.tsac_round(rho, circuit, bitflip_channel(5e-3), EPS_REF)
            check_density_matrix(rho)


class TestChannelFastPath:
    def test_monomial_detection(self):
        from coolsim.simulate import _monomial_parts

        cx_mat = np.zeros((4, 4), dtype=complex)
        cx_mat[0, 0] = cx_mat[1, 1] = cx_mat[2, 3] = cx_mat[3, 2] = 1
        parts = _monomial_parts(cx_mat)
        assert parts is not None
        perm, coeff = parts
        assert list(perm) == [0, 1, 3, 2]
        assert np.allclose(coeff, 1.0)
        dense = np.full((2, 2), 0.5 + 0j)
        assert _monomial_parts(dense) is None

    def test_dense_channel_fallback_matches_direct_application(self):
        # a rotation-type error is not a generalized permutation, so the
        # program falls back to dense Kraus sums
        from coolsim.channels import GateNoiseModel, KrausChannel
        from coolsim.circuits import Circuit, cx

        theta = 0.3
        rot = np.array(
            [[np.cos(theta / 2), -1j * np.sin(theta / 2)],
             [-1j * np.sin(theta / 2), np.cos(theta / 2)]]
        )
        err = np.kron(rot, rot)
        p = 0.2
        full = KrausChannel(2, (np.sqrt(1 - p) * np.eye(4, dtype=complex), np.sqrt(p) * err))
        model = GateNoiseModel("rotation", p, full, KrausChannel(2, (err,)))
        circuit = Circuit(3, (cx(0, 2),))
        rho0 = sim.thermal_product_state(3, 0.8)
        out = sim.simulate_noisy_circuit(circuit, rho0, model)
        from coolsim.channels import apply_channel, embed_two_qubit

        gate_only = sim.simulate_noisy_circuit(circuit, rho0, no_noise())
        direct = apply_channel(gate_only, embed_two_qubit(full, sim.noise_slots(0, 2), 3))
        assert np.abs(out - direct).max() < 1e-12


class TestMarkovCrossCheck:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_depolarized_round_matches_transition_matrix(self, n):
        """One reset + compression + global depolarizing round, restricted to
        the computational diagonal, is exactly one noisy transition."""
        rng = np.random.default_rng(42 + n)
        eta, eps = 0.07, 0.52
        diag = rng.uniform(0.1, 1.0, size=1 << n)
        diag /= diag.sum()
        rho = np.diag(diag).astype(complex)
        est = eta_timekeeping(1e-3, 20, 1 << n)
        out = depolarize(apply_unitary(reset_channel(rho, eps), tsac_compression_unitary(n)), eta)
        rho_c = partial_trace(out, keep=range(n - 1), dims=[2] * n)
        v = np.diagonal(rho).reshape(-1, 2).sum(axis=1)
        want = noisy_transition(n - 1, eps, eta) @ v
        assert np.abs(np.diagonal(rho_c).real - want).max() < 1e-12

    def test_gda_round_reference_agrees(self):
        n = 3
        est = eta_timekeeping(1e-3, 20, 8)
        rho = sim.thermal_product_state(n, EPS_REF)
        out = sim.gda_round_reference(rho, EPS_REF, est)
        v = np.diagonal(rho).reshape(-1, 2).sum(axis=1)
        want = noisy_transition(n - 1, EPS_REF, est.eta) @ v
        got = np.diagonal(partial_trace(out, keep=range(n - 1), dims=[2] * n)).real
        assert np.abs(got - want).max() < 1e-12


class TestRunTsac:
    def test_noiseless_reaches_ideal_limit(self):
        traj, p_final = sim.run_tsac(sim.SimConfig(3, no_noise(), EPS_REF))
        ideal = target_population(steady_state_analytic(2, EPS_REF, 0.0))
        assert traj.converged
        assert abs(p_final - ideal) < 1e-8

    def test_steady_state_is_fixed_point(self):
        circuit = transpile(build_tsac_circuit(2))
        lim = steady_state_analytic(1, EPS_REF, 0.0)
        rho = np.kron(np.diag(lim.v), thermal_qubit(ThermalSpec(0.163, 1e10)))
        rho = rho.astype(complex)
        out = sim.tsac_round(rho, circuit, no_noise(), EPS_REF)
        v_out = np.diagonal(partial_trace(out, [0], [2, 2])).real
        assert np.abs(v_out - lim.v).max() < 1e-10

    def test_monotone_degradation_in_p(self):
        finals = []
        for p in (0.0, 1e-4, 1e-3, 1e-2):
            _, p_final = sim.run_tsac(sim.SimConfig(3, timekeeping_channel(p), EPS_REF))
            finals.append(p_final)
        assert all(a > b for a, b in zip(finals, finals[1:]))

    def test_trajectory_rises_then_plateaus(self):
        traj, _ = sim.run_tsac(sim.SimConfig(4, timekeeping_channel(1.5e-4), EPS_REF))
        pops = traj.populations
        assert pops[-1] > pops[0]
        assert abs(pops[-1] - pops[-2]) < 1e-9
        ideal = target_population(steady_state_analytic(3, EPS_REF, 0.0))
        assert pops[-1] < ideal

    def test_unconverged_flag(self):
        traj, _ = sim.run_tsac(sim.SimConfig(3, no_noise(), EPS_REF, max_rounds=2))
        assert not traj.converged

    def test_validated_run(self):
        traj, _ = sim.run_tsac(
            sim.SimConfig(3, timekeeping_channel(1e-3), EPS_REF, max_rounds=8, validate=True)
        )
        assert traj.rounds == 8

    def test_size_cap(self):
        with pytest.raises(SizeLimit):
            sim.SimConfig(11, no_noise(), 0.5)


class TestRunDc:
    def test_noiseless_matches_closed_form(self):
        spec = ThermalSpec(0.163, 1e10)
        target, _ = sim.run_dc(3, spec, no_noise())
        want = ideal_dc_output(3, spec)
        assert np.abs(target - want).max() < 1e-10

    def test_n2_identity_returns_input_temperature(self):
        spec = ThermalSpec(0.163, 1e10)
        _, t_eff = sim.run_dc(2, spec, timekeeping_channel(1e-3))
        assert t_eff == pytest.approx(0.163, rel=1e-9)

    def test_gate_level_cap(self):
        with pytest.raises(SizeLimit):
            sim.run_dc(9, ThermalSpec(0.163, 1e10), no_noise())


class TestTwodesign:
    def test_reference_values(self):
        res = dict(sim.twodesign_validation(3, [0, 1, 2, 4], 0.8, timekeeping_channel(1e-3)))
        assert res[0] == pytest.approx(0.823, abs=5e-3)
        assert res[1] == pytest.approx(0.928, abs=5e-3)
        assert res[2] == pytest.approx(0.939, abs=5e-3)
        assert abs(res[4] - res[2]) < 5e-3  # plateau

    def test_needs_noisy_model(self):
        from coolsim.errors import InvalidParam

        with pytest.raises(InvalidParam):
            sim.twodesign_validation(3, [0], 0.8, no_noise())
