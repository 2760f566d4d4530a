"""Grover search over the clique register.

Two backends share one interface:

* ``"gate"`` simulates the literal oracle circuit on the full
  ``n + 2n**2`` register (``n <= 3`` within the 24-qubit limit);
* ``"structured"`` applies the oracle as a diagonal sign on the ``n`` clique
  qubits, which is exact because data and ancilla registers are classical
  and always uncomputed.

Global phase: the circuit diffusion ``H (I - 2|0><0|) H`` equals ``-U`` with
``U = 2|psi><psi| - I``.  Operators built with ``phase_corrected=False``
(the default) follow the circuit; ``phase_corrected=True`` gives ``G = U O``
exactly.  Probabilities are identical either way.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import Circuit, h
from .errors import CountRequiredError, NoMarkedStatesError, WidthMismatchError
from .graph import AdjacencyMatrix, count_maximal_cliques, is_maximal_clique
from .oracle import build_oracle, oracle_phase_table, phase_flip_gates
from .sim import (
    DEFAULT_SEED,
    GATE_MAX_QUBITS,
    STRUCTURED_MAX_NODES,
    SampleCounts,
    StateVector,
    apply_circuit,
    check_width,
    init_uniform,
    measure,
    split_register,
    zero_state,
)

BACKENDS = ("gate", "structured")


def build_diffusion(n: int, qubits: Sequence[int] | None = None, width: int | None = None,
                    controls: Sequence = ()) -> Circuit:
    """``H^n (I - 2|0><0|) H^n``, i.e. ``-(2|psi><psi| - I)``."""
    qubits = list(range(n) if qubits is None else qubits)
    hs = [h(q) for q in qubits]
    gates = hs + phase_flip_gates(qubits, controls) + hs
    if width is None:
        width = 1 + max(q for g in gates for q in g.qubits)
    return Circuit(width, gates)


def rotation_angle(n: int, m: int) -> float:
    """theta with ``sin(theta/2) = sqrt(M/N)``."""
    return 2 * math.asin(math.sqrt(m / (1 << n)))


def success_probability(theta: float, r: int) -> float:
    return math.sin((2 * r + 1) * theta / 2) ** 2


def asymptotic_iterations(n: int, m: int) -> float:
    """The large-N approximation ``(pi/4) sqrt(N/M)``, for reference only."""
    return math.pi / 4 * math.sqrt((1 << n) / m)


def optimal_iterations(n: int, m: int) -> int:
    """Smallest nonnegative R maximising ``sin^2((2R+1) theta/2)`` on the first peak."""
    if m <= 0:
        raise NoMarkedStatesError("no marked states: M must be at least 1")
    if m > 1 << n:
        raise ValueError(f"M={m} exceeds the 2**{n} basis states")
    theta = rotation_angle(n, m)
    r_star = math.pi / (2 * theta) - 0.5
    lo = max(0, math.floor(r_star))
    hi = max(0, math.ceil(r_star))
    if success_probability(theta, hi) > success_probability(theta, lo) + 1e-12:
        return hi
    return lo


class GroverOperator:
    """One Grover iteration (oracle sign, then diffusion) as a callable on states."""

    def __init__(self, a: AdjacencyMatrix, backend: str = "structured",
                 phase_corrected: bool = False):
        if backend not in BACKENDS:
            raise ValueError(f"unknown backend {backend!r}; choose from {BACKENDS}")
        self.matrix = a
        self.n = a.n
        self.backend = backend
        self.phase_corrected = phase_corrected
        if backend == "structured":
            check_width(a.n, STRUCTURED_MAX_NODES, "structured clique register")
            self.phase_table = oracle_phase_table(a)
            self._signs = (1 - 2 * self.phase_table).astype(np.float64)
            self.width = a.n
            self.clique = tuple(range(a.n))
        else:
            bundle = build_oracle(a)
            self.bundle = bundle
            self.width = bundle.layout.total_width
            check_width(self.width, GATE_MAX_QUBITS, "gate-level oracle register")
            self.clique = bundle.layout.clique
            diffusion = build_diffusion(a.n, self.clique, self.width)
            self.step_circuit = bundle.body + diffusion

    @property
    def global_phase(self) -> int:
        """Sign of this operator relative to ``G = U O``."""
        return 1 if self.phase_corrected else -1

    def initial_state(self) -> StateVector:
        """Uniform clique register (data loaded, ancillas zero for the gate backend)."""
        if self.backend == "structured":
            return init_uniform(self.n, STRUCTURED_MAX_NODES)
        prep = self.bundle.prep + Circuit(self.width, [h(q) for q in self.clique])
        return apply_circuit(zero_state(self.width), prep)

    def __call__(self, s: StateVector) -> StateVector:
        if s.width != self.width:
            raise WidthMismatchError(f"state width {s.width} != operator width {self.width}")
        if self.backend == "structured":
            v = s.amplitudes * self._signs
            mean = v.mean()
            out = 2 * mean - v if self.phase_corrected else v - 2 * mean
            return StateVector(out, self.width)
        out = apply_circuit(s, self.step_circuit)
        if self.phase_corrected:
            out.amplitudes *= -1
        return out

    def power(self, s: StateVector, r: int) -> StateVector:
        for _ in range(r):
            s = self(s)
        return s

    def _workspace_column(self) -> int:
        """Column of :func:`split_register` holding the loaded data and zero ancillas."""
        layout = self.bundle.layout
        rest = [q for q in range(self.width) if q not in set(self.clique)]
        closed = self.matrix.closed()
        loaded = {layout.data[i][j] for i in range(self.n) for j in range(self.n) if closed[i, j]}
        col = 0
        for q in rest:
            col = (col << 1) | (q in loaded)
        return col

    def clique_amplitudes(self, s: StateVector) -> np.ndarray:
        """Amplitudes over the ``2**n`` clique states."""
        if self.backend == "structured":
            return s.amplitudes.copy()
        return split_register(s, self.clique)[:, self._workspace_column()].copy()

    def leakage(self, s: StateVector) -> float:
        """Probability mass outside the loaded-data / zero-ancilla workspace."""
        if self.backend == "structured":
            return 0.0
        return float(max(0.0, 1.0 - np.sum(np.abs(self.clique_amplitudes(s)) ** 2)))

    def __repr__(self):
        return f"GroverOperator(n={self.n}, backend={self.backend!r})"


def grover_operator(a: AdjacencyMatrix, backend: str = "structured",
                    phase_corrected: bool = False) -> GroverOperator:
    return GroverOperator(a, backend, phase_corrected)


@dataclass(frozen=True)
class GroverConfig:
    n: int | None = None
    M: int | None = None
    R: int | None = None
    backend: str = "structured"
    shots: int = 1024
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.M is not None and self.n is not None and not 0 < self.M <= 1 << self.n:
            raise ValueError(f"M={self.M} must lie in 1..2**{self.n}")
        if self.R is not None and self.R < 0:
            raise ValueError("R must be nonnegative")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass(frozen=True)
class SearchResult:
    R_used: int
    theta: float
    predicted_success: float
    samples: SampleCounts
    marked_mass: float
    M_used: int
    M_source: str
    exact_marked_probability: float
    asymptotic_R: float
    backend: str
    amplitudes: np.ndarray = field(repr=False, compare=False)
    global_phase: int = -1

    @property
    def oracle_calls(self) -> int:
        return self.R_used

    def to_dict(self) -> dict:
        return {
            "R_used": self.R_used,
            "oracle_calls": self.oracle_calls,
            "theta": self.theta,
            "predicted_success": self.predicted_success,
            "marked_mass": self.marked_mass,
            "exact_marked_probability": self.exact_marked_probability,
            "M_used": self.M_used,
            "M_source": self.M_source,
            "asymptotic_R": self.asymptotic_R,
            "backend": self.backend,
            "global_phase": self.global_phase,
            "samples": self.samples.to_dict(),
        }


def _resolve_m(a: AdjacencyMatrix, config: GroverConfig, estimate, classical_fallback: bool):
    if config.M is not None:
        return config.M, "given"
    if estimate is not None:
        return estimate.M_rounded, "counting"
    if classical_fallback:
        return count_maximal_cliques(a), "classical"
    raise CountRequiredError(
        "the number of maximal cliques M is unknown: pass M, run `count` first, "
        "or allow the classical fallback"
    )


def run_search(a: AdjacencyMatrix, config: GroverConfig | None = None, *, estimate=None,
               classical_fallback: bool = True) -> SearchResult:
    """Uniform state, ``R`` Grover iterations, then sampling of the clique register.

    ``M`` comes from ``config.M``, else a counting ``estimate``, else brute
    force enumeration when ``classical_fallback`` is allowed.
    """
    config = config or GroverConfig()
    if config.n is not None and config.n != a.n:
        raise WidthMismatchError(f"config is for n={config.n}, graph has {a.n} nodes")
    m, source = _resolve_m(a, config, estimate, classical_fallback)
    if m <= 0:
        raise NoMarkedStatesError("no marked states detected", estimate)
    if m > 1 << a.n:
        raise ValueError(f"M={m} exceeds 2**{a.n}")
    r = config.R if config.R is not None else optimal_iterations(a.n, m)
    theta = rotation_angle(a.n, m)

    op = GroverOperator(a, config.backend)
    state = op.power(op.initial_state(), r)
    amps = op.clique_amplitudes(state)
    marked = oracle_phase_table(a).astype(bool)
    exact = float(np.sum(np.abs(amps[marked]) ** 2))

    samples = measure(state, config.shots, config.seed,
                      None if config.backend == "structured" else op.clique)
    hits = sum(c for bits, c in samples.counts.items() if is_maximal_clique(a, bits))
    return SearchResult(
        R_used=r,
        theta=theta,
        predicted_success=success_probability(theta, r),
        samples=samples,
        marked_mass=hits / samples.shots,
        M_used=m,
        M_source=source,
        exact_marked_probability=exact,
        asymptotic_R=asymptotic_iterations(a.n, m),
        backend=config.backend,
        amplitudes=amps,
        global_phase=op.global_phase ** r,
    )
