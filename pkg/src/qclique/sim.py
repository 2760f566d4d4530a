"""Dense state-vector simulation and seeded measurement sampling.

Amplitudes are stored flat, indexed by basis state with qubit 0 as the most
significant bit, so ``amplitudes.reshape((2,) * width)`` puts qubit ``k`` on
axis ``k``.  Gates are applied natively (multi-controlled gates included)
by slicing that tensor view; no decomposition happens here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit, Gate
from .errors import WidthLimitError, WidthMismatchError

GATE_MAX_QUBITS = 24
STRUCTURED_MAX_NODES = 20
MAX_COUNTING_QUBITS = 8
RNG_NAME = "numpy.random.Generator(PCG64)"
DEFAULT_SEED = 20171114

_SQRT1_2 = 1 / np.sqrt(2)


def check_width(width: int, limit: int = GATE_MAX_QUBITS, what: str = "register") -> None:
    if width < 1:
        raise WidthLimitError(f"{what} needs at least one qubit")
    if width > limit:
        raise WidthLimitError(f"{what} of {width} qubits exceeds the {limit}-qubit limit")


class StateVector:
    """``2**width`` complex amplitudes. Operations return new instances."""

    __slots__ = ("width", "amplitudes")

    def __init__(self, amplitudes, width: int | None = None):
        amps = np.asarray(amplitudes, dtype=np.complex128).ravel()
        if width is None:
            width = int(amps.size).bit_length() - 1
        if amps.size != 1 << width:
            raise ValueError(f"{amps.size} amplitudes do not form a {width}-qubit state")
        self.width = width
        self.amplitudes = amps

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.width)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.width)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self):
        return self.amplitudes.size

    def __repr__(self):
        return f"StateVector(width={self.width})"


def zero_state(width: int) -> StateVector:
    return basis_state(width, 0)


def basis_state(width: int, index: int) -> StateVector:
    check_width(width)
    amps = np.zeros(1 << width, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, width)


def init_uniform(n: int, limit: int = GATE_MAX_QUBITS) -> StateVector:
    """Equal superposition of all ``2**n`` basis states."""
    check_width(n, limit)
    amps = np.full(1 << n, 1 / np.sqrt(1 << n), dtype=np.complex128)
    return StateVector(amps, n)


def _apply_gate(psi: np.ndarray, g: Gate) -> None:
    """Apply ``g`` in place to the rank-``width`` tensor ``psi``."""
    idx: list = [slice(None)] * psi.ndim
    for c in g.controls:
        idx[c.qubit] = 1 if c.positive else 0
    kind = g.kind
    if kind == "SWAP":
        a, b = g.targets
        i01, i10 = list(idx), list(idx)
        i01[a], i01[b] = 0, 1
        i10[a], i10[b] = 1, 0
        i01, i10 = tuple(i01), tuple(i10)
        tmp = psi[i01].copy()
        psi[i01] = psi[i10]
        psi[i10] = tmp
        return
    t = g.target
    i0, i1 = list(idx), list(idx)
    i0[t], i1[t] = 0, 1
    i0, i1 = tuple(i0), tuple(i1)
    if kind in ("X", "CNOT", "TOFFOLI", "MCX"):
        tmp = psi[i0].copy()
        psi[i0] = psi[i1]
        psi[i1] = tmp
    elif kind in ("Z", "MCZ"):
        psi[i1] *= -1
    elif kind == "CPHASE":
        psi[i1] *= np.exp(1j * g.angle)
    elif kind == "H":
        a = psi[i0].copy()
        b = psi[i1]
        psi[i0] = (a + b) * _SQRT1_2
        psi[i1] = (a - b) * _SQRT1_2
    else:  # pragma: no cover - Gate validates kinds
        raise ValueError(f"cannot simulate gate kind {kind}")


def apply_circuit(s: StateVector, c: Circuit) -> StateVector:
    if c.width != s.width:
        raise WidthMismatchError(f"circuit width {c.width} != state width {s.width}")
    out = s.copy()
    psi = out.tensor()
    for g in c.gates:
        _apply_gate(psi, g)
    return out


def apply_diagonal_phase(s: StateVector, f) -> StateVector:
    """Multiply amplitude ``x`` by ``(-1)**f(x)``.

    ``f`` is either a sequence of bits indexed by basis state or a callable
    taking the basis index.
    """
    bits = as_phase_table(f, s.width)
    if bits.shape != (len(s),):
        raise WidthMismatchError(f"phase table of shape {bits.shape} for {len(s)} amplitudes")
    return StateVector(s.amplitudes * (1 - 2 * bits), s.width)


def split_register(s: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Amplitudes as a ``(2**len(qubits), 2**rest)`` matrix.

    Rows index the listed qubits (first listed = most significant), columns
    the remaining qubits in ascending order.
    """
    qubits = list(qubits)
    rest = [q for q in range(s.width) if q not in set(qubits)]
    t = np.transpose(s.tensor(), qubits + rest)
    return t.reshape(1 << len(qubits), 1 << len(rest))


def marginal_probabilities(s: StateVector, qubits: Sequence[int] | None = None) -> np.ndarray:
    if qubits is None:
        return s.probabilities()
    return (np.abs(split_register(s, qubits)) ** 2).sum(axis=1)


@dataclass(frozen=True)
class SampleCounts:
    """Measurement histogram keyed by bitstring (first measured qubit leftmost)."""

    counts: dict
    shots: int
    seed: int
    width: int
    rng: str = RNG_NAME
    qubits: tuple = field(default=())

    def most_common(self) -> str:
        # ties resolve to the smallest bitstring
        return min(self.counts, key=lambda k: (-self.counts[k], k))

    def frequency(self, bitstring: str) -> float:
        return self.counts.get(bitstring, 0) / self.shots

    def to_dict(self) -> dict:
        return {"counts": dict(self.counts), "shots": self.shots, "seed": self.seed,
                "rng": self.rng, "qubits": list(self.qubits)}


def sample_distribution(p: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """Multinomial draw of ``shots`` outcomes from ``p`` with a fresh seeded RNG."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    p = p / p.sum()
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.multinomial(shots, p)


def counts_from_draws(draws: np.ndarray, width: int, shots: int, seed: int,
                      qubits: Sequence[int] = ()) -> SampleCounts:
    counts = {format(int(k), f"0{width}b"): int(draws[k]) for k in np.flatnonzero(draws)}
    return SampleCounts(dict(sorted(counts.items())), shots, seed, width, qubits=tuple(qubits))


def measure(s: StateVector, shots: int, seed: int = DEFAULT_SEED,
            qubits: Sequence[int] | None = None) -> SampleCounts:
    """Sample ``shots`` computational-basis outcomes of ``qubits`` (default: all).

    Identical ``(state, shots, seed)`` always yields identical counts.
    """
    p = marginal_probabilities(s, qubits)
    width = s.width if qubits is None else len(qubits)
    draws = sample_distribution(p, shots, seed)
    return counts_from_draws(draws, width, shots, seed, range(s.width) if qubits is None else qubits)


def as_phase_table(f: Callable[[int], int] | Sequence[int], n: int) -> np.ndarray:
    if callable(f):
        return np.fromiter((f(k) for k in range(1 << n)), dtype=np.int8, count=1 << n)
    return np.asarray(f, dtype=np.int8)
