"""Graphs, threshold binarization and the classical maximal-clique test.

Bit-order convention used throughout the package: for an ``n``-node graph a
subset is an integer ``x`` in ``[0, 2**n)`` whose most significant bit is
node 1.  Printed bitstrings therefore read node 1 leftmost, so ``"110"`` is
the subset {1, 2}.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import (
    BruteForceLimitError,
    GraphParseError,
    NodeRangeError,
    SelfLoopError,
    WidthMismatchError,
)

BRUTE_FORCE_MAX_NODES = 24
FORMATS = ("edgelist", "matrix-json", "dimacs")


@dataclass(frozen=True)
class NodeSubset:
    """A subset of the nodes ``1..n`` packed into an integer (node 1 = MSB)."""

    n: int
    value: int

    def __post_init__(self):
        if self.n < 0 or not 0 <= self.value < (1 << self.n):
            raise ValueError(f"subset value {self.value} out of range for width {self.n}")

    @classmethod
    def from_string(cls, bits: str) -> "NodeSubset":
        if not bits or set(bits) - {"0", "1"}:
            raise ValueError(f"not a bitstring: {bits!r}")
        return cls(len(bits), int(bits, 2))

    @classmethod
    def from_nodes(cls, n: int, nodes: Iterable[int]) -> "NodeSubset":
        value = 0
        for j in nodes:
            if not 1 <= j <= n:
                raise ValueError(f"node {j} outside 1..{n}")
            value |= 1 << (n - j)
        return cls(n, value)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.n - j)) & 1 for j in range(1, self.n + 1))

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(j for j, b in enumerate(self.bits, start=1) if b)

    def __contains__(self, node: int) -> bool:
        return 1 <= node <= self.n and bool((self.value >> (self.n - node)) & 1)

    def __len__(self) -> int:
        return bin(self.value).count("1")

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b") if self.n else ""


def _as_subset(n: int, x) -> NodeSubset:
    if isinstance(x, NodeSubset):
        subset = x
    elif isinstance(x, str):
        subset = NodeSubset.from_string(x)
    else:
        subset = NodeSubset(n, int(x))
    if subset.n != n:
        raise WidthMismatchError(f"subset has width {subset.n}, graph has {n} nodes")
    return subset


class AdjacencyMatrix:
    """Symmetric 0/1 matrix with zero diagonal. Immutable."""

    __slots__ = ("_entries",)

    def __init__(self, entries):
        arr = np.array(entries, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"adjacency matrix must be square, got shape {arr.shape}")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        if not (arr == arr.T).all():
            raise ValueError("adjacency matrix must be symmetric")
        if np.diagonal(arr).any():
            raise SelfLoopError("adjacency matrix has a nonzero diagonal entry")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        self._entries = arr

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "AdjacencyMatrix":
        """Build from 1-based edge pairs; duplicates collapse."""
        arr = np.zeros((n, n), dtype=np.uint8)
        for u, v in edges:
            if u == v:
                raise SelfLoopError(f"self-loop on node {u}")
            if not (1 <= u <= n and 1 <= v <= n):
                raise NodeRangeError(f"edge ({u}, {v}) outside 1..{n}")
            arr[u - 1, v - 1] = arr[v - 1, u - 1] = 1
        return cls(arr)

    @classmethod
    def complete(cls, n: int) -> "AdjacencyMatrix":
        return cls(np.ones((n, n), dtype=np.uint8) - np.eye(n, dtype=np.uint8))

    @classmethod
    def empty(cls, n: int) -> "AdjacencyMatrix":
        return cls(np.zeros((n, n), dtype=np.uint8))

    @classmethod
    def path(cls, n: int) -> "AdjacencyMatrix":
        return cls.from_edges(n, [(k, k + 1) for k in range(1, n)])

    @classmethod
    def from_index(cls, n: int, index: int) -> "AdjacencyMatrix":
        """The ``index``-th graph on ``n`` labelled nodes, upper-triangle bits LSB first."""
        pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        if not 0 <= index < (1 << len(pairs)):
            raise ValueError("graph index out of range")
        return cls.from_edges(n, [p for k, p in enumerate(pairs) if (index >> k) & 1])

    @classmethod
    def all_graphs(cls, n: int) -> list["AdjacencyMatrix"]:
        return [cls.from_index(n, k) for k in range(1 << (n * (n - 1) // 2))]

    @classmethod
    def random(cls, n: int, p: float = 0.5, rng=None) -> "AdjacencyMatrix":
        rng = np.random.default_rng(rng)
        upper = np.triu(rng.random((n, n)) < p, k=1).astype(np.uint8)
        return cls(upper + upper.T)

    @property
    def n(self) -> int:
        return self._entries.shape[0]

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    def closed(self) -> np.ndarray:
        """The matrix A + I (entries c_ij)."""
        return self._entries + np.eye(self.n, dtype=np.uint8)

    @property
    def edges(self) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(np.triu(self._entries, k=1))
        return [(int(i) + 1, int(j) + 1) for i, j in zip(rows, cols)]

    @property
    def num_edges(self) -> int:
        return int(self._entries.sum()) // 2

    def column_mask(self, j: int) -> int:
        """Column j (1-based) of A + I packed with node 1 as MSB."""
        return closed_neighborhood(self, j).value

    def digest(self) -> str:
        """sha256 over the canonical bit matrix, used as provenance in reports."""
        canon = f"{self.n}:" + "".join(map(str, self._entries.ravel().tolist()))
        return hashlib.sha256(canon.encode()).hexdigest()

    def to_json(self) -> str:
        return json.dumps(self._entries.tolist())

    def __eq__(self, other):
        if not isinstance(other, AdjacencyMatrix):
            return NotImplemented
        return self._entries.shape == other._entries.shape and bool(
            (self._entries == other._entries).all()
        )

    def __hash__(self):
        return hash((self.n, self._entries.tobytes()))

    def __repr__(self):
        return f"AdjacencyMatrix(n={self.n}, edges={self.edges})"


class WeightedMatrix:
    """Symmetric real matrix (e.g. pairwise correlations). Diagonal is ignored."""

    __slots__ = ("_entries",)

    def __init__(self, entries, atol: float = 1e-9):
        arr = np.array(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"weighted matrix must be square, got shape {arr.shape}")
        if not np.allclose(arr, arr.T, rtol=0.0, atol=atol):
            raise ValueError("weighted matrix must be symmetric")
        arr.setflags(write=False)
        self._entries = arr

    @property
    def n(self) -> int:
        return self._entries.shape[0]

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    def off_diagonal(self) -> np.ndarray:
        return self._entries[np.triu_indices(self.n, k=1)]


# ---------------------------------------------------------------- parsing


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise GraphParseError(f"expected an integer, got {token!r}", lineno) from None


def _check_edge(u: int, v: int, n: int, lineno: int) -> None:
    if u == v:
        raise SelfLoopError(f"self-loop on node {u}", lineno)
    for node in (u, v):
        if not 1 <= node <= n:
            raise NodeRangeError(f"node {node} outside declared range 1..{n}", lineno)


def _parse_edgelist(text: str) -> AdjacencyMatrix:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        tokens = line.split()
        if n is None:
            if len(tokens) != 1:
                raise GraphParseError("first line must hold the node count", lineno)
            n = _parse_int(tokens[0], lineno)
            if n < 1:
                raise GraphParseError("node count must be positive", lineno)
            continue
        if len(tokens) != 2:
            raise GraphParseError(f"expected 'u v', got {line!r}", lineno)
        u, v = (_parse_int(t, lineno) for t in tokens)
        _check_edge(u, v, n, lineno)
        edges.append((u, v))
    if n is None:
        raise GraphParseError("empty input: missing node count", 1)
    return AdjacencyMatrix.from_edges(n, edges)


def _parse_dimacs(text: str) -> AdjacencyMatrix:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        tokens = line.split()
        if tokens[0] == "p":
            if n is not None:
                raise GraphParseError("duplicate problem line", lineno)
            if len(tokens) != 4 or tokens[1] not in ("edge", "col"):
                raise GraphParseError("expected 'p edge <n> <m>'", lineno)
            n = _parse_int(tokens[2], lineno)
            _parse_int(tokens[3], lineno)
            if n < 1:
                raise GraphParseError("node count must be positive", lineno)
        elif tokens[0] == "e":
            if n is None:
                raise GraphParseError("edge line before problem line", lineno)
            if len(tokens) != 3:
                raise GraphParseError("expected 'e <u> <v>'", lineno)
            u, v = (_parse_int(t, lineno) for t in tokens[1:])
            _check_edge(u, v, n, lineno)
            edges.append((u, v))
        else:
            raise GraphParseError(f"unknown line type {tokens[0]!r}", lineno)
    if n is None:
        raise GraphParseError("missing 'p edge' problem line", 1)
    return AdjacencyMatrix.from_edges(n, edges)


def _parse_matrix_json(text: str) -> AdjacencyMatrix:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(exc.msg, exc.lineno) from None
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise GraphParseError("expected a JSON array of rows", 1)
    n = len(data)
    for i, row in enumerate(data):
        if len(row) != n:
            raise GraphParseError(f"row {i + 1} has {len(row)} entries, expected {n}", 1)
        for v in row:
            if isinstance(v, bool) or v not in (0, 1):
                raise GraphParseError(f"row {i + 1}: entries must be 0 or 1, got {v!r}", 1)
        if row[i]:
            raise SelfLoopError(f"self-loop on node {i + 1}", 1)
    try:
        return AdjacencyMatrix(data)
    except ValueError as exc:
        raise GraphParseError(str(exc), 1) from None


_PARSERS = {
    "edgelist": _parse_edgelist,
    "matrix-json": _parse_matrix_json,
    "dimacs": _parse_dimacs,
}


def parse_graph(text: str, format: str = "edgelist") -> AdjacencyMatrix:
    """Parse ``text`` in one of :data:`FORMATS`.

    Raises :class:`GraphParseError` (or its subclasses :class:`SelfLoopError`,
    :class:`NodeRangeError`) carrying the offending line number.
    """
    try:
        parser = _PARSERS[format]
    except KeyError:
        raise ValueError(f"unknown graph format {format!r}; choose from {FORMATS}") from None
    return parser(text)


def parse_weighted(text: str) -> WeightedMatrix:
    """Parse a JSON array of rows of real weights."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(exc.msg, exc.lineno) from None
    try:
        return WeightedMatrix(data)
    except (ValueError, TypeError) as exc:
        raise GraphParseError(str(exc), 1) from None


def guess_format(path: str) -> str:
    if re.search(r"\.(json)$", path):
        return "matrix-json"
    if re.search(r"\.(dimacs|col|clq)$", path):
        return "dimacs"
    return "edgelist"


# ---------------------------------------------------------------- analysis


def binarize(w: WeightedMatrix, threshold: float) -> AdjacencyMatrix:
    """Edge (i, j) iff ``i != j`` and the weight is strictly above ``threshold``."""
    # upper triangle only, so weights symmetric merely within tolerance stay consistent
    upper = np.triu(w.entries > threshold, k=1).astype(np.uint8)
    return AdjacencyMatrix(upper + upper.T)


def edge_density(a: AdjacencyMatrix) -> float:
    if a.n < 2:
        raise ValueError("edge density is undefined for fewer than two nodes")
    return a.num_edges / (a.n * (a.n - 1) / 2)


def closed_neighborhood(a: AdjacencyMatrix, j: int) -> NodeSubset:
    """Column ``j`` (1-based) of A + I: node j together with its neighbours."""
    if not 1 <= j <= a.n:
        raise IndexError(f"node {j} outside 1..{a.n}")
    column = a.closed()[:, j - 1]
    return NodeSubset.from_nodes(a.n, (i + 1 for i in np.flatnonzero(column)))


def intersect_columns(a: AdjacencyMatrix, x) -> NodeSubset:
    """Bitwise AND of the A + I columns selected by ``x``.

    Deselected columns act as all-ones, so the empty subset maps to all-ones.
    """
    x = _as_subset(a.n, x)
    acc = (1 << a.n) - 1
    for j in x.nodes:
        acc &= a.column_mask(j)
    return NodeSubset(a.n, acc)


def is_maximal_clique(a: AdjacencyMatrix, x) -> int:
    """1 iff ``x`` is a nonempty maximal clique of ``a``.

    A subset equal to the intersection of its own closed neighbourhoods is
    both a clique (nothing was removed) and maximal (nothing was added).
    """
    x = _as_subset(a.n, x)
    return int(x.value != 0 and intersect_columns(a, x) == x)


def is_clique(a: AdjacencyMatrix, x) -> bool:
    """Pairwise adjacency check, independent of the intersection test."""
    nodes = _as_subset(a.n, x).nodes
    return all(a.entries[u - 1, v - 1] for k, u in enumerate(nodes) for v in nodes[k + 1:])


def maximal_clique_table(a: AdjacencyMatrix) -> np.ndarray:
    """Boolean array over all ``2**n`` subsets; entry x is the maximal-clique flag.

    Vectorised form of the intersection test: ``inter[x]`` is built one node at
    a time by AND-ing column j into every subset that contains j.
    """
    n = a.n
    if n > BRUTE_FORCE_MAX_NODES:
        raise BruteForceLimitError(
            f"brute force enumeration is capped at {BRUTE_FORCE_MAX_NODES} nodes, got {n}"
        )
    dtype = np.uint32
    inter = np.full(1 << n, (1 << n) - 1, dtype=dtype)
    for j in range(1, n + 1):
        view = inter.reshape(1 << (j - 1), 2, 1 << (n - j))
        view[:, 1, :] &= dtype(a.column_mask(j))
    xs = np.arange(1 << n, dtype=dtype)
    table = inter == xs
    table[0] = False
    return table


def enumerate_maximal_cliques(a: AdjacencyMatrix) -> list[NodeSubset]:
    """All maximal cliques by brute force over the ``2**n - 1`` nonempty subsets.

    Ordered by descending integer value. Limited to ``n <= 24``.
    """
    table = maximal_clique_table(a)
    return [NodeSubset(a.n, int(x)) for x in np.flatnonzero(table)[::-1]]


def count_maximal_cliques(a: AdjacencyMatrix) -> int:
    return int(maximal_clique_table(a).sum())


def order_complex_thresholds(w: WeightedMatrix) -> list[float]:
    """Thresholds that add one distinct weight level at a time.

    Starts at the largest off-diagonal weight (no edges under the strict
    comparison) and finishes just below the smallest (complete graph).
    """
    levels = np.unique(w.off_diagonal())[::-1]
    if levels.size == 0:
        return []
    below = float(levels[-1]) - 1e-9 * (1.0 + abs(float(levels[-1])))
    return [float(v) for v in levels] + [below]
