"""Quantum counting: phase estimation of the Grover operator's eigenphase.

Register-1 holds ``t`` precision qubits placed before the target register.
Counting qubit 0 is the most significant bit of the readout ``j`` and
controls ``G^(2^(t-1))``; qubit ``t-1`` controls ``G``.  After the inverse
QFT the readout concentrates near ``j = 2^t theta / 2pi`` or its mirror
``2^t - j``, and both give ``M = 2^n sin^2(pi j / 2^t)``.

The target is evolved with ``G = U O`` exactly (not the circuit's ``-U O``):
a controlled global phase is a relative phase and would shift the readout
by half a turn.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit, cphase, h, invert, swap, z
from .errors import NoMarkedStatesError, WidthLimitError
from .graph import AdjacencyMatrix
from .grover import GroverConfig, SearchResult, build_diffusion, run_search
from .oracle import build_layout, build_oracle, oracle_phase_table
from .sim import (
    DEFAULT_SEED,
    GATE_MAX_QUBITS,
    MAX_COUNTING_QUBITS,
    STRUCTURED_MAX_NODES,
    SampleCounts,
    StateVector,
    apply_circuit,
    check_width,
    counts_from_draws,
    marginal_probabilities,
    sample_distribution,
    zero_state,
)

DEFAULT_SHOTS = 64


def default_precision(n: int) -> int:
    return math.ceil(n / 2) + 3


def qft(t: int, qubits: Sequence[int] | None = None, width: int | None = None) -> Circuit:
    """Hadamard and controlled-phase ladder followed by the swap layer.

    Maps ``|j>`` to ``2^(-t/2) sum_k exp(2 pi i j k / 2^t) |k>`` with the first
    listed qubit as the most significant bit.
    """
    if t < 1:
        raise ValueError("t must be at least 1")
    qs = list(range(t) if qubits is None else qubits)
    gates = []
    for i in range(t):
        gates.append(h(qs[i]))
        for k in range(i + 1, t):
            gates.append(cphase(2 * math.pi / (1 << (k - i + 1)), qs[k], qs[i]))
    gates.extend(swap(qs[i], qs[t - 1 - i]) for i in range(t // 2))
    return Circuit(width or 1 + max(qs), gates)


def inverse_qft(t: int, qubits: Sequence[int] | None = None, width: int | None = None) -> Circuit:
    return invert(qft(t, qubits, width))


def m_from_j(j: int, t: int, n: int) -> float:
    """``2^n sin^2(theta/2)`` with ``theta = 2 pi j / 2^t``.

    Evaluated as ``2^n (1 - cos theta) / 2`` on the folded angle, with the
    cosine taken as a sine of the (exact, dyadic) offset from a quarter turn,
    so quarter and half turns give exact results and ``j``, ``2^t - j`` agree.
    """
    f = fold_j(j % (1 << t), t) / (1 << t)
    c = math.sin(2 * math.pi * (0.25 - f))
    return (1 << n) * (1 - c) / 2


def fold_j(j: int, t: int) -> int:
    """Map the ``2pi - theta`` branch onto ``theta`` so the angle lies in [0, pi]."""
    return min(j, (1 << t) - j) if j else 0


@dataclass(frozen=True)
class CountEstimate:
    n: int
    t: int
    j_measured: int
    j_canonical: int
    theta_hat: float
    M_raw: float
    M_rounded: int
    samples: SampleCounts
    backend: str
    half_integer_tie: bool = False
    distribution: np.ndarray = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "n": self.n, "t": self.t, "j_measured": self.j_measured,
            "j_canonical": self.j_canonical, "theta_hat": self.theta_hat,
            "M_raw": self.M_raw, "M_rounded": self.M_rounded, "backend": self.backend,
            "half_integer_tie": self.half_integer_tie, "samples": self.samples.to_dict(),
        }


def _structured_distribution(a: AdjacencyMatrix, t: int) -> np.ndarray:
    n = a.n
    check_width(n, STRUCTURED_MAX_NODES, "structured clique register")
    check_width(t + n, GATE_MAX_QUBITS, "counting + clique register")
    signs = (1 - 2 * oracle_phase_table(a)).astype(np.float64)
    psi = np.full((1 << t, 1 << n), 1 / math.sqrt(1 << (t + n)), dtype=np.complex128)
    rows_index = np.arange(1 << t)
    for k in range(t):
        rows = ((rows_index >> (t - 1 - k)) & 1).astype(bool)
        sub = psi[rows]
        for _ in range(1 << (t - 1 - k)):
            sub = sub * signs
            sub = 2 * sub.mean(axis=1, keepdims=True) - sub
        psi[rows] = sub
    state = StateVector(psi.ravel(), t + n)
    state = apply_circuit(state, inverse_qft(t, width=t + n))
    return marginal_probabilities(state, range(t))


def controlled_grover_circuit(a: AdjacencyMatrix, layout, control: int) -> Circuit:
    """Controlled ``G = U O`` on the full oracle register.

    Only the two reflections need the extra control; the trailing Z on the
    control supplies the ``-1`` that turns the circuit's ``-U`` into ``U``.
    """
    oracle = build_oracle(a, layout, controls=[control]).body
    diffusion = build_diffusion(a.n, layout.clique, layout.total_width, controls=[control])
    return oracle + diffusion + Circuit(layout.total_width, [z(control)])


def counting_circuit(a: AdjacencyMatrix, t: int) -> Circuit:
    """Full gate-level counting circuit: load, prepare, controlled powers, F^dagger."""
    layout = build_layout(a.n, offset=t)
    width = layout.total_width
    bundle = build_oracle(a, layout)
    c = bundle.prep + Circuit(width, [h(q) for q in range(t)] + [h(q) for q in layout.clique])
    for k in range(t):
        step = controlled_grover_circuit(a, layout, k)
        for _ in range(1 << (t - 1 - k)):
            c = c + step
    return (c + inverse_qft(t, width=width)).with_layout(layout)


def _gate_distribution(a: AdjacencyMatrix, t: int) -> np.ndarray:
    width = t + a.n + 2 * a.n * a.n
    check_width(width, GATE_MAX_QUBITS, "gate-level counting register")
    c = counting_circuit(a, t)
    state = apply_circuit(zero_state(width), c)
    return marginal_probabilities(state, range(t))


def readout_distribution(a: AdjacencyMatrix, t: int, backend: str = "structured") -> np.ndarray:
    """Exact probabilities of each register-1 value ``j`` before measurement."""
    if not 1 <= t <= MAX_COUNTING_QUBITS:
        raise WidthLimitError(f"t must lie in 1..{MAX_COUNTING_QUBITS}, got {t}")
    if backend == "structured":
        return _structured_distribution(a, t)
    if backend == "gate":
        return _gate_distribution(a, t)
    raise ValueError(f"unknown backend {backend!r}")


def estimate_from_counts(samples: SampleCounts, n: int, t: int, backend: str,
                         distribution=None) -> CountEstimate:
    """Modal readout over folded ``j`` values and the resulting count."""
    folded: dict[int, int] = {}
    for bits, c in samples.counts.items():
        j = fold_j(int(bits, 2), t)
        folded[j] = folded.get(j, 0) + c
    j_canon = min(folded, key=lambda j: (-folded[j], j))
    raw = {int(b, 2): c for b, c in samples.counts.items() if fold_j(int(b, 2), t) == j_canon}
    j_meas = min(raw, key=lambda j: (-raw[j], j))
    m_raw = m_from_j(j_canon, t, n)
    # round half away from zero; exact half-integers are flagged
    m_rounded = int(math.floor(m_raw + 0.5))
    tie = abs(m_raw - math.floor(m_raw) - 0.5) < 1e-9
    return CountEstimate(
        n=n, t=t, j_measured=j_meas, j_canonical=j_canon,
        theta_hat=2 * math.pi * j_canon / (1 << t), M_raw=m_raw, M_rounded=m_rounded,
        samples=samples, backend=backend, half_integer_tie=tie, distribution=distribution,
    )


def run_counting(a: AdjacencyMatrix, t: int | None = None, shots: int = DEFAULT_SHOTS,
                 seed: int = DEFAULT_SEED, backend: str = "structured") -> CountEstimate:
    """Estimate the number of maximal cliques by phase estimation on ``G``."""
    t = default_precision(a.n) if t is None else t
    if t < 1:
        raise ValueError("t must be at least 1")
    p = readout_distribution(a, t, backend)
    draws = sample_distribution(p, shots, seed)
    samples = counts_from_draws(draws, t, shots, seed, tuple(range(t)))
    return estimate_from_counts(samples, a.n, t, backend, p)


def count_then_search(a: AdjacencyMatrix, t: int | None = None, shots: int = DEFAULT_SHOTS,
                      seed: int = DEFAULT_SEED, backend: str = "structured",
                      search_shots: int = 1024) -> SearchResult:
    """Feed the rounded counting estimate into :func:`~qclique.grover.run_search`."""
    estimate = run_counting(a, t, shots, seed, backend)
    if estimate.M_rounded == 0:
        raise NoMarkedStatesError(
            f"no marked states detected (M_raw={estimate.M_raw:.6g})", estimate
        )
    config = GroverConfig(n=a.n, backend=backend, shots=search_shots, seed=seed)
    return run_search(a, config, estimate=estimate, classical_fallback=False)
