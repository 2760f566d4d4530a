"""Simulation-side checks of the oracle against the classical test.

The gate-level check feeds one superposition with distinct random amplitudes
through the circuit.  The circuit only permutes basis states and flips signs,
so reading back ``out[x] / in[x]`` for every ``x`` recovers each basis-state
phase; any permutation among clique states or leakage into the workspace
shows up as a ratio that is not +-1 or as missing norm.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .graph import AdjacencyMatrix, NodeSubset, is_maximal_clique
from .grover import GroverOperator
from .oracle import eval_oracle_classical, oracle_phase_table
from .sim import (
    StateVector,
    apply_circuit,
    apply_diagonal_phase,
    basis_state,
    init_uniform,
    zero_state,
)


@dataclass(frozen=True)
class OracleRow:
    x: str
    f_circuit: int | None
    f_classical: int
    phase: complex

    @property
    def agree(self) -> bool:
        return self.f_circuit == self.f_classical

    def to_dict(self) -> dict:
        return {"x": self.x, "f_circuit": self.f_circuit, "f_classical": self.f_classical,
                "agree": self.agree, "sign": round(self.phase.real, 12)}


def _phase_bit(ratio: complex, tol: float) -> int | None:
    if abs(ratio - 1) <= tol:
        return 0
    if abs(ratio + 1) <= tol:
        return 1
    return None


def gate_oracle_phases(a: AdjacencyMatrix, seed: int = 0) -> tuple[np.ndarray, float]:
    """Per-basis-state phase ratios of the literal circuit, and workspace leakage."""
    op = GroverOperator(a, "gate")
    n, width = a.n, op.width
    rng = np.random.default_rng(seed)
    alpha = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    alpha /= np.linalg.norm(alpha)
    loaded = apply_circuit(zero_state(width), op.bundle.prep)
    amps = np.zeros(1 << width, dtype=np.complex128)
    base = int(np.flatnonzero(loaded.amplitudes)[0])
    shift = width - n
    for xv in range(1 << n):
        amps[base | (xv << shift)] = alpha[xv]
    out = apply_circuit(StateVector(amps, width), op.bundle.body)
    clique = op.clique_amplitudes(out)
    return clique / alpha, op.leakage(out)


def structured_oracle_phases(a: AdjacencyMatrix) -> np.ndarray:
    s = init_uniform(a.n)
    return apply_diagonal_phase(s, oracle_phase_table(a)).amplitudes / s.amplitudes


def oracle_truth_table(a: AdjacencyMatrix, backend: str = "structured",
                       tol: float = 1e-10) -> tuple[list[OracleRow], float]:
    """Rows ``(x, f_circuit, f_classical)`` for all ``2**n`` inputs, plus leakage."""
    if backend == "gate":
        ratios, leakage = gate_oracle_phases(a)
    else:
        ratios, leakage = structured_oracle_phases(a), 0.0
    rows = []
    for xv in range(1 << a.n):
        x = NodeSubset(a.n, xv)
        rows.append(OracleRow(str(x), _phase_bit(complex(ratios[xv]), tol),
                              is_maximal_clique(a, x), complex(ratios[xv])))
    return rows, leakage


def classical_agreement(a: AdjacencyMatrix) -> bool:
    """eval_oracle_classical agrees with the intersection test on every subset."""
    return all(eval_oracle_classical(a, x) == is_maximal_clique(a, x) for x in range(1 << a.n))


def circuit_unitary(c: Circuit) -> np.ndarray:
    """Dense matrix of ``c`` by simulating every basis state. Small widths only."""
    cols = [apply_circuit(basis_state(c.width, k), c).amplitudes for k in range(1 << c.width)]
    return np.stack(cols, axis=1)
