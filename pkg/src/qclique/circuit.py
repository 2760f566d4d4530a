"""Gate-level intermediate representation and resource accounting.

A :class:`Circuit` is an immutable ordered list of :class:`Gate` objects over
qubits ``0..width-1``.  Controls carry a polarity: a negative control fires
on ``|0>``.  Negative polarity stays first-class in the IR and is only turned
into X-conjugation when a gate is decomposed or counted with ``decompose=True``.

Qubit 0 is the most significant bit of a basis-state index.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Iterator, NamedTuple, Sequence

from .errors import InsufficientWorkspaceError

KINDS = ("X", "Z", "H", "CNOT", "TOFFOLI", "MCX", "MCZ", "CPHASE", "SWAP")
_SINGLE = {"X", "Z", "H"}
_SELF_INVERSE = {"X", "Z", "H", "CNOT", "TOFFOLI", "MCX", "MCZ", "SWAP"}


class Control(NamedTuple):
    qubit: int
    positive: bool = True

    def __str__(self):
        return f"{'+' if self.positive else '-'}q{self.qubit}"


def neg(qubit: int) -> Control:
    """Negative-polarity control on ``qubit``."""
    return Control(qubit, False)


def _controls(items) -> tuple[Control, ...]:
    out = []
    for item in items:
        if isinstance(item, Control):
            out.append(item)
        elif isinstance(item, tuple):
            out.append(Control(int(item[0]), bool(item[1])))
        else:
            out.append(Control(int(item), True))
    return tuple(out)


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    controls: tuple[Control, ...] = ()
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", _controls(self.controls))
        k = len(self.controls)
        kind = self.kind
        if kind not in KINDS:
            raise ValueError(f"unknown gate kind {kind!r}")
        n_targets = 2 if kind == "SWAP" else 1
        if len(self.targets) != n_targets:
            raise ValueError(f"{kind} takes {n_targets} target(s), got {self.targets}")
        expected = {"CNOT": (1, 1), "TOFFOLI": (2, 2), "MCX": (1, None), "MCZ": (1, None),
                    "CPHASE": (1, None)}.get(kind, (0, 0))
        lo, hi = expected
        if k < lo or (hi is not None and k > hi):
            raise ValueError(f"{kind} cannot take {k} control(s)")
        if (kind == "CPHASE") != (self.angle is not None):
            raise ValueError("an angle is required for CPHASE and only for CPHASE")
        qubits = [c.qubit for c in self.controls] + list(self.targets)
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{kind}: control and target qubits must be distinct: {qubits}")
        if min(qubits) < 0:
            raise ValueError("qubit indices must be nonnegative")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(c.qubit for c in self.controls) + self.targets

    @property
    def target(self) -> int:
        return self.targets[0]

    @property
    def num_controls(self) -> int:
        return len(self.controls)

    def inverse(self) -> "Gate":
        if self.kind in _SELF_INVERSE:
            return self
        return Gate(self.kind, self.targets, self.controls, -self.angle)

    def __str__(self):
        return format_gate(self)


def x(q: int) -> Gate:
    return Gate("X", (q,))


def z(q: int) -> Gate:
    return Gate("Z", (q,))


def h(q: int) -> Gate:
    return Gate("H", (q,))


def cnot(control, target: int) -> Gate:
    return Gate("CNOT", (target,), (control,))


def toffoli(c1, c2, target: int) -> Gate:
    return Gate("TOFFOLI", (target,), (c1, c2))


def mcx(controls: Iterable, target: int) -> Gate:
    return Gate("MCX", (target,), tuple(controls))


def mcz(controls: Iterable, target: int) -> Gate:
    return Gate("MCZ", (target,), tuple(controls))


def cphase(angle: float, control, target: int) -> Gate:
    return Gate("CPHASE", (target,), (control,), float(angle))


def swap(a: int, b: int) -> Gate:
    return Gate("SWAP", (a, b))


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[Gate, ...] = ()
    layout: Any = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.qubits) >= self.width:
                raise ValueError(f"gate {g} does not fit in width {self.width}")

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if not isinstance(other, Circuit):
            return NotImplemented
        if other.width != self.width:
            raise ValueError(f"cannot concatenate widths {self.width} and {other.width}")
        return Circuit(self.width, self.gates + other.gates, self.layout or other.layout)

    def with_layout(self, layout) -> "Circuit":
        return Circuit(self.width, self.gates, layout)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def qubits_used(self) -> set[int]:
        return {q for g in self.gates for q in g.qubits}


def invert(c: Circuit) -> Circuit:
    """Reverse the gate list and invert each gate (CPHASE negates its angle)."""
    return Circuit(c.width, tuple(g.inverse() for g in reversed(c.gates)), c.layout)


# ------------------------------------------------------------ decomposition


def toffoli_cost(g: Gate) -> int:
    """Toffoli gates used by :func:`decompose_mcx` for ``g``."""
    k = g.num_controls
    if g.kind == "TOFFOLI":
        return 1
    if g.kind == "MCX":
        return {1: 0, 2: 1}.get(k, 2 * (k - 1))
    if g.kind == "MCZ":
        return 0 if k == 1 else 2 * (k - 1)
    return 0


def work_needed(g: Gate) -> int:
    if g.kind == "MCX" and g.num_controls >= 3:
        return g.num_controls - 1
    if g.kind == "MCZ" and g.num_controls >= 2:
        return g.num_controls - 1
    return 0


def _expanded_counts(g: Gate) -> Counter:
    """Gate-kind histogram of ``g`` after decomposition, without building it."""
    out = Counter()
    negatives = sum(1 for c in g.controls if not c.positive)
    out["X"] += 2 * negatives
    k = g.num_controls
    if g.kind in ("MCX", "MCZ", "TOFFOLI") and work_needed(g) == 0:
        if g.kind == "MCZ":
            out["MCZ"] += 1
        else:
            out[{1: "CNOT", 2: "TOFFOLI"}[k]] += 1
    elif g.kind in ("MCX", "MCZ"):
        out["TOFFOLI"] += 2 * (k - 1)
        out["CNOT" if g.kind == "MCX" else "MCZ"] += 1
    else:
        out[g.kind] += 1
    return out


def _positive(controls: Sequence[Control]) -> list[Control]:
    return [Control(c.qubit, True) for c in controls]


def _decompose(g: Gate, work: Sequence[int]) -> list[Gate]:
    sandwich = [x(c.qubit) for c in g.controls if not c.positive]
    controls = _positive(g.controls)
    k = len(controls)
    need = work_needed(g)
    if need == 0:
        if g.kind == "MCX" or g.kind == "TOFFOLI":
            core = [cnot(controls[0], g.target) if k == 1 else toffoli(*controls, g.target)]
        elif g.kind == "MCZ":
            core = [mcz(controls, g.target)]
        else:
            core = [Gate(g.kind, g.targets, controls, g.angle)]
        return sandwich + core + sandwich
    if len(work) < need:
        raise InsufficientWorkspaceError(
            f"{g.kind} with {k} controls needs {need} work qubits, got {len(work)}"
        )
    work = list(work[:need])
    clash = set(work) & set(g.qubits)
    if clash:
        raise InsufficientWorkspaceError(f"work qubits {sorted(clash)} overlap the gate")
    chain = [toffoli(controls[0], controls[1], work[0])]
    for i in range(2, k):
        chain.append(toffoli(controls[i], work[i - 2], work[i - 1]))
    last = work[-1]
    core = cnot(last, g.target) if g.kind == "MCX" else mcz([last], g.target)
    return sandwich + chain + [core] + chain[::-1] + sandwich


def decompose_mcx(g: Gate, work: Sequence[int] = (), width: int | None = None) -> Circuit:
    """Expand a multi-controlled X or Z into Toffolis and one two-qubit gate.

    With ``k`` controls the compute chain writes the AND of all controls into
    ``k - 1`` clean work qubits, fires a single CNOT (or CZ) from the last one,
    then uncomputes, for ``2(k - 1)`` Toffolis in total.  A two-control MCX is
    already a Toffoli and is returned unchanged.  Negative controls are
    conjugated by X.  Work qubits must start in ``|0>`` and are restored.
    """
    if g.kind not in ("MCX", "MCZ", "TOFFOLI", "CNOT"):
        raise ValueError(f"decompose_mcx expects a multi-controlled X/Z gate, got {g.kind}")
    gates = _decompose(g, work)
    if width is None:
        width = 1 + max(q for gg in gates for q in gg.qubits)
    return Circuit(width, gates)


def decompose_circuit(c: Circuit, work: Sequence[int] | None = None) -> Circuit:
    """Decompose every MCX/MCZ and negative control in ``c``.

    Without explicit ``work`` qubits the register is widened by the largest
    workspace any single gate needs.
    """
    need = max((work_needed(g) for g in c.gates), default=0)
    width = c.width
    if work is None:
        work = list(range(c.width, c.width + need))
        width = c.width + need
    else:
        width = max([c.width] + [w + 1 for w in work])
    out: list[Gate] = []
    for g in c.gates:
        if g.kind in ("MCX", "MCZ", "TOFFOLI", "CNOT") or any(not ct.positive for ct in g.controls):
            out.extend(_decompose(g, work))
        else:
            out.append(g)
    return Circuit(width, out, c.layout)


# ------------------------------------------------------------ resources


@dataclass(frozen=True)
class ResourceReport:
    toffoli_count: int
    mcx_count_pre_decomposition: int
    x_count: int
    total_qubits: int
    workspace_qubits: int
    workspace_qubits_used: int
    register_width: int
    gate_total: int
    two_qubit_controlled: int
    negative_controls: int
    depth: int
    by_kind: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def circuit_depth(c: Circuit) -> int:
    """Greedy as-soon-as-possible layer count. Informational only."""
    level: dict[int, int] = {}
    depth = 0
    for g in c.gates:
        layer = 1 + max((level.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            level[q] = layer
        depth = max(depth, layer)
    return depth


def count_resources(c: Circuit, decompose: bool = False) -> ResourceReport:
    """Gate and qubit accounting for ``c``.

    With ``decompose`` set, MCX/MCZ gates are charged at the cost of
    :func:`decompose_mcx` (``2(k-1)`` Toffolis and one CNOT/CZ) and each
    negative control at two X gates, without materialising the expansion.
    ``workspace_qubits`` is the larger reservation of one work qubit per
    control; ``workspace_qubits_used`` is what the chain actually touches.
    ``total_qubits`` is the circuit width before any workspace is added and
    ``register_width`` includes the reserved workspace.
    """
    negatives = sum(1 for g in c.gates for ct in g.controls if not ct.positive)
    multi = [g for g in c.gates if g.kind in ("MCX", "MCZ")]
    if decompose:
        kinds = Counter()
        for g in c.gates:
            kinds.update(_expanded_counts(g))
        used = max((work_needed(g) for g in c.gates), default=0)
        reserved = max((g.num_controls for g in c.gates if work_needed(g)), default=0)
    else:
        kinds = Counter(g.kind for g in c.gates)
        used = reserved = 0
    two_qubit = kinds["CNOT"] + kinds["CPHASE"] + sum(
        1 for g in c.gates if g.kind == "MCZ" and (decompose or g.num_controls == 1)
    )
    return ResourceReport(
        toffoli_count=kinds["TOFFOLI"],
        mcx_count_pre_decomposition=len(multi),
        x_count=kinds["X"],
        total_qubits=c.width,
        workspace_qubits=reserved,
        workspace_qubits_used=used,
        register_width=c.width + reserved,
        gate_total=sum(kinds.values()),
        two_qubit_controlled=two_qubit,
        negative_controls=negatives,
        depth=circuit_depth(c),
        by_kind=dict(sorted(kinds.items())),
    )


# ------------------------------------------------------------ text export


def format_gate(g: Gate) -> str:
    """One line of the gate listing, e.g. ``TOFFOLI q3 -q7 -> q12``."""
    def ctl(c: Control) -> str:
        return f"q{c.qubit}" if c.positive else f"-q{c.qubit}"

    if g.kind in _SINGLE:
        return f"{g.kind} q{g.target}"
    if g.kind == "SWAP":
        return f"SWAP q{g.targets[0]} q{g.targets[1]}"
    if g.kind in ("MCX", "MCZ"):
        return f"{g.kind}[{' '.join(str(c) for c in g.controls)}] -> q{g.target}"
    head = g.kind if g.angle is None else f"{g.kind}({g.angle!r})"
    return f"{head} {' '.join(ctl(c) for c in g.controls)} -> q{g.target}"


def to_listing(c: Circuit) -> str:
    lines = [f"# width {c.width}"]
    lines.extend(format_gate(g) for g in c.gates)
    return "\n".join(lines) + "\n"


_QUBIT = re.compile(r"^([+-]?)q(\d+)$")


def _parse_qubit(token: str, lineno: int) -> Control:
    m = _QUBIT.match(token)
    if not m:
        raise ValueError(f"line {lineno}: bad qubit token {token!r}")
    return Control(int(m.group(2)), m.group(1) != "-")


def parse_listing(text: str) -> Circuit:
    """Inverse of :func:`to_listing`."""
    width = None
    gates = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.match(r"#\s*width\s+(\d+)", line)
            if m:
                width = int(m.group(1))
            continue
        m = re.match(r"^(MCX|MCZ)\[([^\]]*)\]\s*->\s*(\S+)$", line)
        if m:
            controls = [_parse_qubit(t, lineno) for t in m.group(2).split()]
            gates.append(Gate(m.group(1), (_parse_qubit(m.group(3), lineno).qubit,), controls))
            continue
        m = re.match(r"^([A-Z]+)(?:\(([^)]*)\))?\s+(.*)$", line)
        if not m:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
        kind, angle, rest = m.group(1), m.group(2), m.group(3)
        if "->" in rest:
            lhs, rhs = rest.split("->")
            controls = [_parse_qubit(t, lineno) for t in lhs.split()]
            targets = [_parse_qubit(rhs.strip(), lineno).qubit]
        else:
            controls = []
            targets = [_parse_qubit(t, lineno).qubit for t in rest.split()]
        gates.append(Gate(kind, tuple(targets), controls, None if angle is None else float(angle)))
    if width is None:
        width = 1 + max((q for g in gates for q in g.qubits), default=-1)
    return Circuit(width, gates)


def to_qasm(c: Circuit) -> str:
    """OpenQASM 2.0 text; multi-controlled gates are decomposed first.

    Work qubits needed by the decomposition are appended after qubit
    ``c.width - 1`` in the same ``q`` register.
    """
    d = decompose_circuit(c)
    lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{d.width}];"]
    for g in d.gates:
        qs = [f"q[{ct.qubit}]" for ct in g.controls] + [f"q[{t}]" for t in g.targets]
        if g.kind == "CPHASE":
            if g.num_controls != 1:
                raise ValueError("qasm export supports singly controlled CPHASE only")
            op = f"cu1({g.angle!r})"
        elif g.kind == "MCZ":
            op = "cz"
        else:
            op = {"X": "x", "Z": "z", "H": "h", "CNOT": "cx", "TOFFOLI": "ccx", "SWAP": "swap"}[g.kind]
        lines.append(f"{op} {','.join(qs)};")
    return "\n".join(lines) + "\n"
