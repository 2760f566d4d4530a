"""The maximal-clique phase oracle as an explicit reversible circuit.

Register layout (offsets relative to ``layout.offset``)::

    clique   x_1 .. x_n                 n qubits, the candidate subset
    data     c_ij of A + I, row-major   n*n qubits, classical after loading
    ancilla  a_ij, row-major            n*n qubits, start and end in |0>
    work     decomposition workspace    optional, unused by the simulator

``body = V . W . P . W . V`` where V writes ``a_ij = c_ij if x_j else 1``
with three Toffoli variants, W XORs each row-wise AND of the ancillas into
``x_i``, and P = I - 2|0><0| on the clique register.  The clique register is
all-zero after W exactly when the subset equals the intersection of its own
closed neighbourhoods, i.e. when it is a maximal clique.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import Circuit, Gate, invert, mcx, mcz, neg, toffoli, x, z
from .errors import WidthMismatchError
from .graph import AdjacencyMatrix, NodeSubset, _as_subset


@dataclass(frozen=True)
class RegisterLayout:
    n: int
    clique: tuple[int, ...]
    data: tuple[tuple[int, ...], ...]
    ancilla: tuple[tuple[int, ...], ...]
    work: tuple[int, ...]
    total_width: int
    offset: int = 0

    @property
    def oracle_width(self) -> int:
        """Clique + data + ancilla qubits, ``n + 2n**2``."""
        return self.n + 2 * self.n * self.n

    def data_qubits(self) -> list[int]:
        return [q for row in self.data for q in row]

    def ancilla_qubits(self) -> list[int]:
        return [q for row in self.ancilla for q in row]

    def to_dict(self) -> dict:
        return {"n": self.n, "clique": list(self.clique), "data": [list(r) for r in self.data],
                "ancilla": [list(r) for r in self.ancilla], "work": list(self.work),
                "total_width": self.total_width}


def build_layout(n: int, work: int = 0, offset: int = 0, extra: int = 0) -> RegisterLayout:
    """Assign clique, data, ancilla, then work qubits, starting at ``offset``.

    ``extra`` widens ``total_width`` for qubits a caller appends after the work
    register. ``offset`` leaves room for qubits placed in front (counting).
    """
    if n < 1:
        raise ValueError("need at least one node")
    base = offset
    clique = tuple(range(base, base + n))
    base += n
    data = tuple(tuple(base + i * n + j for j in range(n)) for i in range(n))
    base += n * n
    ancilla = tuple(tuple(base + i * n + j for j in range(n)) for i in range(n))
    base += n * n
    work_q = tuple(range(base, base + work))
    return RegisterLayout(n, clique, data, ancilla, work_q, base + work + extra, offset)


def build_data_prep(a: AdjacencyMatrix, layout: RegisterLayout) -> Circuit:
    """X on data qubit (i, j) wherever A + I has a one."""
    if a.n != layout.n:
        raise WidthMismatchError(f"graph has {a.n} nodes, layout {layout.n}")
    closed = a.closed()
    gates = [x(layout.data[i][j]) for i in range(a.n) for j in range(a.n) if closed[i, j]]
    return Circuit(layout.total_width, gates, layout)


def build_V(layout: RegisterLayout) -> Circuit:
    """Three Toffoli variants per (i, j): controls (x_j, c_ij) at (+,+), (-,+), (-,-).

    Starting from a zero ancilla the XOR of the three terms leaves ``c_ij``
    when ``x_j = 1`` and 1 when ``x_j = 0``.
    """
    gates = []
    for i in range(layout.n):
        for j in range(layout.n):
            xj, cij, aij = layout.clique[j], layout.data[i][j], layout.ancilla[i][j]
            gates.append(toffoli(xj, cij, aij))
            gates.append(toffoli(neg(xj), cij, aij))
            gates.append(toffoli(neg(xj), neg(cij), aij))
    return Circuit(layout.total_width, gates, layout)


def build_W(layout: RegisterLayout) -> Circuit:
    """One n-controlled X per row: ``x_i ^= AND_j a_ij``."""
    gates = [mcx(layout.ancilla[i], layout.clique[i]) for i in range(layout.n)]
    return Circuit(layout.total_width, gates, layout)


def phase_flip_gates(qubits: Sequence[int], controls: Sequence = ()) -> list[Gate]:
    """X-conjugated multi-controlled Z realising I - 2|0><0| on ``qubits``.

    Extra ``controls`` condition the whole reflection (used for controlled
    Grover steps); a single unconditioned qubit degenerates to X Z X.
    """
    qubits = list(qubits)
    flips = [x(q) for q in qubits]
    ctl = list(controls) + qubits[:-1]
    core = mcz(ctl, qubits[-1]) if ctl else z(qubits[-1])
    return flips + [core] + flips


def build_phase_flip(n: int, qubits: Sequence[int] | None = None, width: int | None = None,
                     controls: Sequence = ()) -> Circuit:
    """``2n`` X gates around one ``C^{n-1}(Z)``: the sign flip of ``|0...0>``."""
    if qubits is None:
        qubits = range(n)
    qubits = list(qubits)
    if len(qubits) != n:
        raise ValueError(f"expected {n} qubits, got {len(qubits)}")
    gates = phase_flip_gates(qubits, controls)
    if width is None:
        width = 1 + max(q for g in gates for q in g.qubits)
    return Circuit(width, gates)


@dataclass(frozen=True)
class OracleBundle:
    layout: RegisterLayout
    prep: Circuit
    body: Circuit
    matrix: AdjacencyMatrix
    V: Circuit
    W: Circuit
    phase: Circuit

    def blocks(self) -> dict[str, Circuit]:
        """The five blocks of ``body`` in application order."""
        return {"V": self.V, "W": self.W, "phase": self.phase,
                "W_dagger": invert(self.W), "V_dagger": invert(self.V)}

    def circuit(self) -> Circuit:
        """Data loading followed by the oracle body."""
        return self.prep + self.body


def build_oracle(a: AdjacencyMatrix, layout: RegisterLayout | None = None,
                 controls: Sequence = ()) -> OracleBundle:
    """Assemble V, W, phase flip, W^dagger, V^dagger for graph ``a``.

    With ``controls`` only the phase flip is conditioned; V and W are undone by
    their inverses either way, so this yields the controlled oracle.
    """
    layout = layout or build_layout(a.n)
    V, W = build_V(layout), build_W(layout)
    phase = Circuit(layout.total_width, phase_flip_gates(layout.clique, controls), layout)
    body = V + W + phase + invert(W) + invert(V)
    return OracleBundle(layout, build_data_prep(a, layout), body, a, V, W, phase)


def eval_oracle_classical(a: AdjacencyMatrix, x_in) -> int:
    """Run the oracle's reversible logic on one basis input, arithmetically.

    Follows the circuit step by step: ancilla formula, row-wise AND, XOR into
    the clique bits, then the zero test of the phase flip.
    """
    x_sub = _as_subset(a.n, x_in)
    n = a.n
    closed = a.closed()
    bits = list(x_sub.bits)
    ancilla = [[(bits[j] & closed[i, j]) ^ ((1 - bits[j]) & closed[i, j])
                ^ ((1 - bits[j]) & (1 - closed[i, j])) for j in range(n)] for i in range(n)]
    after_w = [bits[i] ^ int(all(ancilla[i])) for i in range(n)]
    return int(not any(after_w))


def oracle_phase_table(a: AdjacencyMatrix) -> np.ndarray:
    """``f(x)`` for every basis state, vectorised over the circuit semantics.

    Row i of W fires iff every selected column has ``c_ij = 1``, i.e. iff
    ``x`` is a subset of row i of A + I.
    """
    n = a.n
    xs = np.arange(1 << n, dtype=np.int64)
    closed = a.closed()
    after_w = xs.copy()
    for i in range(n):
        row_mask = NodeSubset.from_nodes(n, (j + 1 for j in range(n) if closed[i, j])).value
        fires = (xs & ~row_mask) == 0
        after_w ^= fires.astype(np.int64) << (n - 1 - i)
    return (after_w == 0).astype(np.int8)
