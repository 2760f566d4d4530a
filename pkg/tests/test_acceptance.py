"""Acceptance suite: one test class per criterion, tolerances as stated.

``conftest.py`` prints a PASS/FAIL line per criterion in the terminal summary.
"""
import math
import time

import numpy as np
import pytest

from qclique.circuit import count_resources
from qclique.counting import m_from_j, readout_distribution, run_counting
from qclique.graph import AdjacencyMatrix, count_maximal_cliques, is_maximal_clique
from qclique.grover import GroverConfig, GroverOperator, rotation_angle, run_search, success_probability
from qclique.oracle import build_oracle
from qclique.sim import StateVector, apply_circuit, basis_state, split_register, zero_state
from qclique.verify import gate_oracle_phases, oracle_truth_table, structured_oracle_phases


def graphs_up_to(n_max):
    for n in range(1, n_max + 1):
        yield from AdjacencyMatrix.all_graphs(n)


def global_phase_distance(u, v):
    """``min_phi |u - e^{i phi} v|_inf`` with phi fixed by the overlap."""
    overlap = np.vdot(v, u)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.max(np.abs(u - phase * v)))


@pytest.mark.acceptance(1, "worked example: P3 oracle on |110> and |111>, width 21")
class TestWorkedExample:
    @pytest.mark.parametrize("bits,sign", [("110", -1), ("111", +1)])
    def test_basis_input(self, p3, bits, sign):
        start = time.perf_counter()
        bundle = build_oracle(p3)
        layout = bundle.layout
        assert layout.total_width == 21
        loaded = apply_circuit(zero_state(21), bundle.prep)
        base = int(np.flatnonzero(loaded.amplitudes)[0])
        s_in = basis_state(21, base | (int(bits, 2) << 18))
        s_out = apply_circuit(s_in, bundle.body)
        assert np.max(np.abs(s_out.amplitudes - sign * s_in.amplitudes)) <= 1e-10

        # data register holds I + A and the ancillas are back to zero
        data = split_register(s_out, layout.data_qubits())
        row = int("".join(str(b) for b in p3.closed().ravel()), 2)
        assert np.sum(np.abs(data[row]) ** 2) == pytest.approx(1.0, abs=1e-10)
        anc = split_register(s_out, layout.ancilla_qubits())
        assert np.sum(np.abs(anc[0]) ** 2) == pytest.approx(1.0, abs=1e-10)
        assert time.perf_counter() - start < 5


@pytest.mark.acceptance(2, "oracle and classical test agree on all small graphs")
class TestOracleEquivalence:
    def test_all_graphs(self):
        start = time.perf_counter()
        for a in AdjacencyMatrix.all_graphs(4):
            rows, _ = oracle_truth_table(a, "structured")
            assert len(rows) == 16
            for r in rows:
                assert r.f_circuit == is_maximal_clique(a, r.x)
        for a in AdjacencyMatrix.all_graphs(3):
            rows, leakage = oracle_truth_table(a, "gate")
            assert len(rows) == 8 and leakage <= 1e-10
            for r in rows:
                assert r.f_circuit == is_maximal_clique(a, r.x)
        assert time.perf_counter() - start < 30


@pytest.mark.acceptance(3, "Grover exactness on P3 at R=1")
class TestGroverExactness:
    def test_p3(self, p3):
        res = run_search(p3, GroverConfig(n=3, R=1, shots=10_000))
        assert res.marked_mass == 1.0
        assert set(res.samples.counts) == {"110", "011"}
        assert sum(res.samples.counts.values()) == 10_000
        marked = res.amplitudes[[0b110, 0b011]]
        assert abs(abs(marked[0]) - abs(marked[1])) <= 1e-9
        assert abs(marked[0] - marked[1]) <= 1e-9


@pytest.mark.acceptance(4, "Grover closed form sin^2((2R+1)theta/2), n <= 4, R <= 3")
class TestGroverClosedForm:
    def test_all_graphs(self):
        for a in graphs_up_to(4):
            m = count_maximal_cliques(a)
            theta = rotation_angle(a.n, m)
            marked = np.array([is_maximal_clique(a, x) for x in range(1 << a.n)], dtype=bool)
            op = GroverOperator(a)
            s = op.initial_state()
            for r in range(4):
                p = float(np.sum(np.abs(s.amplitudes[marked]) ** 2))
                assert abs(p - success_probability(theta, r)) <= 1e-9, (a, r)
                s = op(s)


@pytest.mark.acceptance(5, "counting exact branch: zero graph n=2, t=3")
class TestCountingExact:
    def test_zero_graph(self, empty2):
        p = readout_distribution(empty2, 3)
        assert p[2] + p[6] >= 1 - 1e-9
        est = run_counting(empty2, t=3)
        assert est.j_measured in (2, 6)
        assert est.M_raw == 2.0
        assert abs(m_from_j(2, 3, 2) - m_from_j(6, 3, 2)) <= 1e-12
        assert m_from_j(2, 3, 2) == 2.0 and m_from_j(6, 3, 2) == 2.0


@pytest.mark.acceptance(6, "counting inexact branch: P3, t=5, 64 shots, 100 seeds")
class TestCountingInexact:
    def test_repetitions(self, p3):
        start = time.perf_counter()
        good = 0
        for seed in range(100):
            est = run_counting(p3, t=5, shots=64, seed=seed)
            good += est.j_canonical in (5, 6) and est.M_rounded == 2
        assert good >= 95
        assert time.perf_counter() - start < 120


@pytest.mark.acceptance(7, "resource count 10n^2 - 2n - 4 Toffolis, 3 <= n <= 12")
class TestResourceAccounting:
    @pytest.mark.parametrize("n", range(3, 13))
    def test_closed_form(self, n):
        r = count_resources(build_oracle(AdjacencyMatrix.empty(n)).body, decompose=True)
        assert r.toffoli_count == 10 * n * n - 2 * n - 4
        assert r.total_qubits == n + 2 * n * n
        assert r.register_width == n + 2 * n * n + r.workspace_qubits
        if n >= 5:
            assert abs(r.toffoli_count / (10 * n * n) - 1) <= 0.15


@pytest.mark.acceptance(8, "eigenvalues of G on span{chi, xi} are exp(+-i theta)")
class TestEigenphase:
    def test_all_graphs(self):
        for a in graphs_up_to(4):
            N = 1 << a.n
            m = count_maximal_cliques(a)
            marked = np.array([is_maximal_clique(a, x) for x in range(N)], dtype=bool)
            chi = marked / math.sqrt(m)
            xi = (~marked) / math.sqrt(N - m)
            op = GroverOperator(a, phase_corrected=True)
            basis = np.stack([chi, xi], axis=1).astype(np.complex128)
            images = np.stack([op(StateVector(basis[:, k], a.n)).amplitudes for k in range(2)], axis=1)
            g2 = basis.conj().T @ images
            # the plane is invariant: nothing leaks out of span{chi, xi}
            assert np.max(np.abs(basis @ g2 - images)) <= 1e-12
            theta = 2 * math.asin(math.sqrt(m / N))
            found = sorted(np.linalg.eigvals(g2), key=lambda z: z.imag)
            expected = [np.exp(-1j * theta), np.exp(1j * theta)]
            assert np.max(np.abs(np.subtract(found, expected))) <= 1e-9, a


@pytest.mark.acceptance(9, "gate-level and structured backends agree at n=3")
class TestBackendEquivalence:
    @pytest.mark.parametrize("k", range(8))
    def test_graph(self, k):
        a = AdjacencyMatrix.from_index(3, k)
        ratios, leakage = gate_oracle_phases(a, seed=k)
        assert global_phase_distance(ratios, structured_oracle_phases(a)) <= 1e-10
        assert leakage <= 1e-10

        gate, fast = GroverOperator(a, "gate"), GroverOperator(a)
        s_gate, s_fast = gate(gate.initial_state()), fast(fast.initial_state())
        assert global_phase_distance(gate.clique_amplitudes(s_gate), s_fast.amplitudes) <= 1e-10

        full_gate = run_search(a, GroverConfig(n=3, backend="gate", shots=256))
        full_fast = run_search(a, GroverConfig(n=3, shots=256))
        assert global_phase_distance(full_gate.amplitudes, full_fast.amplitudes) <= 1e-10
        assert full_gate.samples.counts == full_fast.samples.counts
