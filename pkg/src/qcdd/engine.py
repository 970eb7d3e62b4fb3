"""Edge-weighted decision diagram engine for quantum states and operators.

A vector of 2**n amplitudes is stored as a DAG with one node per qubit
level (level 0 = least significant qubit); each node holds two weighted
successor edges for the |0> and |1> branch of its qubit.  Operators are
stored likewise with four successors per node, ordered as the sub-blocks
U00, U01, U10, U11 of the level's 2x2 block split (row index = output
value, column index = input value).  The amplitude or matrix entry
addressed by a bitstring is the product of the edge weights along the
corresponding root-to-terminal path.

Canonicity rests on three mechanisms:

* complex interning -- edge weights live in a tolerance-bucketed table,
  so values that agree within the engine tolerance in both components
  share one integer handle;
* node normalization -- vector nodes carry L2-normalized successor
  weights with the first nonzero weight rotated onto the positive real
  axis, matrix nodes are scaled so the largest-magnitude successor
  weight is exactly 1 (ties resolved toward the lowest edge index);
* hash consing -- structurally identical normalized nodes are unique
  within one engine, so equality of diagrams reduces to comparing root
  nodes and root weights.

Node handles and weight handles are only meaningful within the engine
that created them.  An engine is single-threaded (it may be moved across
threads, but never shared); parallel work uses independent engines.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Sequence

__all__ = [
    "EngineConfig",
    "Engine",
    "Edge",
    "Node",
    "VectorDD",
    "MatrixDD",
]

# Interned handles of the two canonical weights.  Handle values are
# indices into the engine's complex table; 0 and 1 are pre-seeded and
# survive garbage collection by construction (the table is append-only).
ZERO = 0
ONE = 1


def _is_pow2(x: int) -> bool:
    return x > 0 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class EngineConfig:
    """Engine tuning knobs.

    tolerance: complex values closer than this (per component) intern to
        the same handle; also the snap-to-zero threshold.  The default is
        roughly 100x double-precision epsilon, which absorbs rounding
        drift accumulated over thousands of gate applications.
    unique_table_buckets / compute_table_entries: power-of-two sizes of
        the hash-consing buckets and the per-operation memo caches.
    seed: default RNG seed handed to consumers that sample.
    """

    tolerance: float = 1e-13
    unique_table_buckets: int = 1 << 15
    compute_table_entries: int = 1 << 16
    seed: int = 0

    def __post_init__(self) -> None:
        if not (self.tolerance > 0):
            raise ValueError("tolerance must be positive")
        if not _is_pow2(self.unique_table_buckets):
            raise ValueError("unique_table_buckets must be a power of two")
        if not _is_pow2(self.compute_table_entries):
            raise ValueError("compute_table_entries must be a power of two")

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "EngineConfig":
        """Load a ``key = value`` configuration file.

        Recognized keys: tolerance, unique_table_buckets,
        compute_table_entries, seed.  Blank lines and ``#`` comments are
        ignored.  Unknown keys raise ValueError.
        """
        values: dict[str, str] = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value'")
                key, _, val = line.partition("=")
                values[key.strip()] = val.strip()
        return cls._from_strings(values)

    @classmethod
    def from_env(cls, base: "EngineConfig | None" = None, prefix: str = "QCDD_") -> "EngineConfig":
        """Overlay environment overrides (e.g. QCDD_TOLERANCE) on a base config."""
        base = base or cls()
        overrides = {}
        for field in ("tolerance", "unique_table_buckets", "compute_table_entries", "seed"):
            raw = os.environ.get(prefix + field.upper())
            if raw is not None:
                overrides[field] = raw
        if not overrides:
            return base
        merged = cls._from_strings(overrides, base)
        return merged

    @classmethod
    def _from_strings(cls, values: dict[str, str], base: "EngineConfig | None" = None) -> "EngineConfig":
        kwargs: dict[str, float | int] = {}
        for key, raw in values.items():
            if key == "tolerance":
                kwargs[key] = float(raw)
            elif key in ("unique_table_buckets", "compute_table_entries", "seed"):
                kwargs[key] = int(raw)
            else:
                raise ValueError(f"unknown configuration key: {key!r}")
        if base is not None:
            return replace(base, **kwargs)
        return cls(**kwargs)


class Node:
    """A decision-diagram node; uniqueness is enforced by the engine."""

    __slots__ = ("level", "edges", "ref", "serial")

    def __init__(self, level: int, edges: tuple, serial: int):
        self.level = level
        self.edges = edges
        self.ref = 0
        self.serial = serial

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"<Node q{self.level} #{self.serial} ref={self.ref}>"


class Edge(NamedTuple):
    """A weighted edge: target node plus interned weight handle."""

    node: Node
    w: int


@dataclass(frozen=True)
class VectorDD:
    """Root edge of a diagram representing a 2**num_qubits state vector."""

    root: Edge
    num_qubits: int


@dataclass(frozen=True)
class MatrixDD:
    """Root edge of a diagram representing a 2**n x 2**n operator."""

    root: Edge
    num_qubits: int


class _ComputeTable:
    """Fixed-size direct-mapped memo cache; colliding entries overwrite."""

    __slots__ = ("_mask", "_slots")

    def __init__(self, entries: int):
        self._mask = entries - 1
        self._slots: list = [None] * entries

    def get(self, key):
        slot = self._slots[hash(key) & self._mask]
        if slot is not None and slot[0] == key:
            return slot[1]
        return None

    def put(self, key, value) -> None:
        self._slots[hash(key) & self._mask] = (key, value)

    def clear(self) -> None:
        for i in range(len(self._slots)):
            self._slots[i] = None


class Engine:
    """Owner of the complex table, the unique tables, and all DD operations."""

    def __init__(self, config: EngineConfig | None = None):
        self.config = config or EngineConfig()
        self.tol = self.config.tolerance

        # Complex table: values indexed by handle, bucket map for lookup.
        # Append-only; the canonical handles for 0 and 1 are therefore
        # never reclaimed.
        self._cvals: list[complex] = []
        self._cbuckets: dict[tuple[int, int], list[int]] = {}
        z = self.intern_complex(0.0, 0.0)
        o = self.intern_complex(1.0, 0.0)
        assert z == ZERO and o == ONE

        self._serial = 0
        self.terminal = Node(-1, (), self._next_serial())

        self.zero_edge = Edge(self.terminal, ZERO)
        self.one_edge = Edge(self.terminal, ONE)

        # Unique tables: level -> bucket -> chain of nodes.
        self._umask = self.config.unique_table_buckets - 1
        self._unique: dict[int, dict[int, list[Node]]] = {}
        self._usize = 0
        self._gc_threshold = 4 * self.config.unique_table_buckets

        entries = self.config.compute_table_entries
        self._ct = {
            name: _ComputeTable(entries)
            for name in ("add_v", "add_m", "mv", "mm", "kron", "adjoint", "ip")
        }

    # ------------------------------------------------------------------
    # complex table

    def _next_serial(self) -> int:
        self._serial += 1
        return self._serial

    def intern_complex(self, re: float, im: float = 0.0) -> int:
        """Return the handle of the stored value within tolerance of (re, im).

        A component smaller than the tolerance snaps to exactly zero
        before lookup; a new value is stored when no existing entry is
        within tolerance in both components.
        """
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ValueError(f"cannot intern non-finite value ({re}, {im})")
        tol = self.tol
        if -tol < re < tol:
            re = 0.0
        if -tol < im < tol:
            im = 0.0
        kr = round(re / tol)
        ki = round(im / tol)
        buckets = self._cbuckets
        vals = self._cvals
        for dr in (0, -1, 1):
            for di in (0, -1, 1):
                chain = buckets.get((kr + dr, ki + di))
                if chain is None:
                    continue
                for h in chain:
                    v = vals[h]
                    if abs(v.real - re) < tol and abs(v.imag - im) < tol:
                        return h
        h = len(vals)
        vals.append(complex(re, im))
        buckets.setdefault((kr, ki), []).append(h)
        return h

    def _intern(self, z: complex) -> int:
        return self.intern_complex(z.real, z.imag)

    def value(self, handle: int) -> complex:
        """The complex value stored under an interned handle."""
        return self._cvals[handle]

    # ------------------------------------------------------------------
    # node construction

    def _lookup(self, level: int, edges: tuple) -> Node:
        parts = [level]
        for e in edges:
            parts.append(e.node.serial)
            parts.append(e.w)
        bucket = hash(tuple(parts)) & self._umask
        table = self._unique.setdefault(level, {})
        chain = table.get(bucket)
        if chain is None:
            chain = []
            table[bucket] = chain
        else:
            for cand in chain:
                if cand.edges == edges:
                    return cand
        node = Node(level, edges, self._next_serial())
        chain.append(node)
        self._usize += 1
        return node

    def make_vector_node(self, level: int, e0: Edge, e1: Edge) -> Edge:
        """Normalize, deduplicate, and wrap two successors into a node.

        The L2 norm of the successor weights is extracted onto the
        returned edge, then the phase of the first nonzero successor
        weight, leaving that weight positive real.  Reading successor
        weights as branch amplitudes therefore gives measurement
        probabilities directly as squared magnitudes.
        """
        if level < 0:
            raise ValueError("vector node level must be >= 0")
        for e in (e0, e1):
            if e.w != ZERO and e.node.level != level - 1:
                raise ValueError(
                    f"successor at level {e.node.level} under node at level {level}"
                )
        if e0.w == ZERO and e1.w == ZERO:
            return self.zero_edge
        v0 = self._cvals[e0.w]
        v1 = self._cvals[e1.w]
        norm = math.hypot(abs(v0), abs(v1))
        # Snap relatively tiny branches to the zero stub so that noise
        # cannot produce spurious structure.
        if v0 != 0 and abs(v0) < self.tol * norm:
            v0 = 0j
        if v1 != 0 and abs(v1) < self.tol * norm:
            v1 = 0j
        norm = math.hypot(abs(v0), abs(v1))
        lead = v0 if v0 != 0 else v1
        factor = norm * (lead / abs(lead))
        c0 = self.zero_edge if v0 == 0 else Edge(e0.node, self._intern(v0 / factor))
        c1 = self.zero_edge if v1 == 0 else Edge(e1.node, self._intern(v1 / factor))
        if c0.w == ZERO:
            c0 = self.zero_edge
        if c1.w == ZERO:
            c1 = self.zero_edge
        if c0.w == ZERO and c1.w == ZERO:
            return self.zero_edge
        node = self._lookup(level, (c0, c1))
        return Edge(node, self._intern(factor))

    def make_matrix_node(self, level: int, edges: Sequence[Edge]) -> Edge:
        """Normalize, deduplicate, and wrap four successors into a node.

        The successor weight of largest magnitude (lowest index on ties)
        is divided out onto the returned edge, so it becomes exactly 1.
        """
        if level < 0:
            raise ValueError("matrix node level must be >= 0")
        e0, e1, e2, e3 = edges
        for e in (e0, e1, e2, e3):
            if e.w != ZERO and e.node.level != level - 1:
                raise ValueError(
                    f"successor at level {e.node.level} under node at level {level}"
                )
        vals = [self._cvals[e.w] for e in (e0, e1, e2, e3)]
        mags = [abs(v) for v in vals]
        largest = max(mags)
        if largest == 0.0:
            return self.zero_edge
        for i, m in enumerate(mags):
            if m != 0 and m < self.tol * largest:
                vals[i] = 0j
                mags[i] = 0.0
        # lowest index within tolerance of the maximum wins: exact magnitude
        # ties must resolve identically regardless of rounding noise in the
        # inputs, or canonicity breaks across construction orders
        threshold = largest * (1.0 - self.tol)
        best = next(i for i in range(4) if mags[i] >= threshold)
        factor = vals[best]
        children = []
        for e, v in zip((e0, e1, e2, e3), vals):
            if v == 0:
                children.append(self.zero_edge)
                continue
            h = self._intern(v / factor)
            children.append(self.zero_edge if h == ZERO else Edge(e.node, h))
        node = self._lookup(level, tuple(children))
        return Edge(node, self._intern(factor))

    # ------------------------------------------------------------------
    # reference counting / reclamation

    def inc_ref(self, edge: Edge) -> None:
        """Pin a diagram root; pinned nodes survive garbage collection."""
        node = edge.node
        if node is self.terminal:
            return
        node.ref += 1
        if node.ref == 1:
            for e in node.edges:
                self.inc_ref(e)

    def dec_ref(self, edge: Edge) -> None:
        """Release a pin acquired with inc_ref."""
        node = edge.node
        if node is self.terminal:
            return
        if node.ref <= 0:
            raise RuntimeError("dec_ref on an unreferenced node")
        node.ref -= 1
        if node.ref == 0:
            for e in node.edges:
                self.dec_ref(e)

    def unique_table_size(self) -> int:
        return self._usize

    def collect_garbage(self) -> int:
        """Sweep unreferenced nodes; returns the number reclaimed.

        Memo caches are cleared because they may reference swept nodes.
        Only call between operations: intermediate results of an
        in-flight operation are not pinned.
        """
        swept = 0
        for table in self._unique.values():
            for bucket, chain in list(table.items()):
                kept = [n for n in chain if n.ref > 0]
                swept += len(chain) - len(kept)
                if kept:
                    table[bucket] = kept
                else:
                    del table[bucket]
        self._usize -= swept
        if swept:
            for ct in self._ct.values():
                ct.clear()
        return swept

    def maybe_collect(self) -> int:
        """Collect when occupancy exceeds the threshold (safe points only)."""
        if self._usize <= self._gc_threshold:
            return 0
        swept = self.collect_garbage()
        if swept < self._usize // 4:
            self._gc_threshold *= 2
        return swept

    # ------------------------------------------------------------------
    # constructors

    def basis_state(self, n: int, bits: str) -> VectorDD:
        """The computational basis state |bits>, bits written q_{n-1}..q_0."""
        if len(bits) != n:
            raise ValueError(f"bitstring length {len(bits)} != qubit count {n}")
        if n < 1:
            raise ValueError("need at least one qubit")
        e = self.one_edge
        for level in range(n):
            bit = bits[n - 1 - level]
            if bit == "0":
                e = self.make_vector_node(level, e, self.zero_edge)
            elif bit == "1":
                e = self.make_vector_node(level, self.zero_edge, e)
            else:
                raise ValueError(f"invalid bit {bit!r}")
        return VectorDD(e, n)

    def identity_dd(self, n: int) -> MatrixDD:
        """The n-qubit identity operator (a shared chain of n nodes)."""
        if n < 1:
            raise ValueError("need at least one qubit")
        e = self.one_edge
        for level in range(n):
            e = self.make_matrix_node(level, (e, self.zero_edge, self.zero_edge, e))
        return MatrixDD(e, n)

    def _identity_chain(self, top_level: int) -> Edge:
        """Identity structure spanning levels [0, top_level]; one_edge below 0."""
        e = self.one_edge
        for level in range(top_level + 1):
            e = self.make_matrix_node(level, (e, self.zero_edge, self.zero_edge, e))
        return e

    def gate_dd(
        self,
        u: Sequence[Sequence[complex]],
        n: int,
        controls: Iterable[int] = (),
        target: int = 0,
    ) -> MatrixDD:
        """Extend a single-qubit matrix to the full n-qubit operator.

        Control qubits leave the system untouched when in |0> and gate
        the target when in |1>.  Uninvolved qubits contribute identity
        blocks, which collapse into shared chain nodes.
        """
        ctrl = frozenset(controls)
        if target in ctrl:
            raise ValueError(f"target qubit {target} also listed as control")
        if not (0 <= target < n):
            raise ValueError(f"target qubit {target} out of range for {n} qubits")
        for c in ctrl:
            if not (0 <= c < n):
                raise ValueError(f"control qubit {c} out of range for {n} qubits")

        em = [
            [Edge(self.terminal, self._intern(complex(u[i][j]))) for j in (0, 1)]
            for i in (0, 1)
        ]
        for i in (0, 1):
            for j in (0, 1):
                if em[i][j].w == ZERO:
                    em[i][j] = self.zero_edge

        zero = self.zero_edge
        for level in range(target):
            below = self._identity_chain(level - 1)
            for i in (0, 1):
                for j in (0, 1):
                    cur = em[i][j]
                    if level in ctrl:
                        keep = below if i == j else zero
                        em[i][j] = self.make_matrix_node(level, (keep, zero, zero, cur))
                    else:
                        em[i][j] = self.make_matrix_node(level, (cur, zero, zero, cur))
        e = self.make_matrix_node(target, (em[0][0], em[0][1], em[1][0], em[1][1]))
        for level in range(target + 1, n):
            if level in ctrl:
                below = self._identity_chain(level - 1)
                e = self.make_matrix_node(level, (below, zero, zero, e))
            else:
                e = self.make_matrix_node(level, (e, zero, zero, e))
        return MatrixDD(e, n)

    def vector_dd_from_dense(self, amplitudes: Sequence[complex], n: int) -> VectorDD:
        """Build a VectorDD from a dense amplitude array of length 2**n."""
        if len(amplitudes) != 1 << n:
            raise ValueError("amplitude count does not match qubit count")

        def build(level: int, offset: int) -> Edge:
            if level < 0:
                h = self._intern(complex(amplitudes[offset]))
                return self.zero_edge if h == ZERO else Edge(self.terminal, h)
            half = 1 << level
            e0 = build(level - 1, offset)
            e1 = build(level - 1, offset + half)
            if e0.w == ZERO and e1.w == ZERO:
                return self.zero_edge
            return self.make_vector_node(level, e0, e1)

        return VectorDD(build(n - 1, 0), n)

    def matrix_dd_from_dense(
        self, entries: Sequence[Sequence[complex]], n: int, reverse_order: bool = False
    ) -> MatrixDD:
        """Build a MatrixDD from a dense 2**n x 2**n matrix.

        reverse_order flips the recursion order over the four quadrants;
        the result must not depend on it (canonicity).
        """
        dim = 1 << n
        if len(entries) != dim:
            raise ValueError("matrix dimension does not match qubit count")

        def build(level: int, row: int, col: int) -> Edge:
            if level < 0:
                h = self._intern(complex(entries[row][col]))
                return self.zero_edge if h == ZERO else Edge(self.terminal, h)
            half = 1 << level
            quads = [(0, 0), (0, half), (half, 0), (half, half)]
            order = range(3, -1, -1) if reverse_order else range(4)
            children: list[Edge] = [self.zero_edge] * 4
            for q in order:
                dr, dc = quads[q]
                children[q] = build(level - 1, row + dr, col + dc)
            if all(c.w == ZERO for c in children):
                return self.zero_edge
            return self.make_matrix_node(level, tuple(children))

        return MatrixDD(build(n - 1, 0, 0), n)

    # ------------------------------------------------------------------
    # arithmetic

    def add(self, a, b):
        """Elementwise sum of two diagrams of the same kind and size."""
        if a.num_qubits != b.num_qubits:
            raise ValueError("size mismatch in add")
        if isinstance(a, VectorDD) != isinstance(b, VectorDD):
            raise TypeError("cannot add a vector to a matrix")
        if isinstance(a, VectorDD):
            return VectorDD(self._add(a.root, b.root, a.num_qubits - 1, False), a.num_qubits)
        return MatrixDD(self._add(a.root, b.root, a.num_qubits - 1, True), a.num_qubits)

    def _scaled(self, e: Edge, w: complex) -> Edge:
        if e.w == ZERO:
            return self.zero_edge
        h = self._intern(self._cvals[e.w] * w)
        return self.zero_edge if h == ZERO else Edge(e.node, h)

    def _add(self, e1: Edge, e2: Edge, level: int, matrix: bool) -> Edge:
        if e1.w == ZERO:
            return e2
        if e2.w == ZERO:
            return e1
        if level < 0:
            h = self._intern(self._cvals[e1.w] + self._cvals[e2.w])
            return self.zero_edge if h == ZERO else Edge(self.terminal, h)
        k1 = (e1.node.serial, e1.w)
        k2 = (e2.node.serial, e2.w)
        if k2 < k1:
            e1, e2 = e2, e1
            k1, k2 = k2, k1
        table = self._ct["add_m" if matrix else "add_v"]
        key = k1 + k2
        hit = table.get(key)
        if hit is not None:
            return hit
        w1 = self._cvals[e1.w]
        w2 = self._cvals[e2.w]
        n1, n2 = e1.node, e2.node
        children = tuple(
            self._add(self._scaled(c1, w1), self._scaled(c2, w2), level - 1, matrix)
            for c1, c2 in zip(n1.edges, n2.edges)
        )
        if matrix:
            result = self.make_matrix_node(level, children)
        else:
            result = self.make_vector_node(level, *children)
        table.put(key, result)
        return result

    def multiply_mv(self, U: MatrixDD, v: VectorDD) -> VectorDD:
        """Apply an operator diagram to a state diagram (U @ v)."""
        if U.num_qubits != v.num_qubits:
            raise ValueError("size mismatch in multiply_mv")
        return VectorDD(self._mv(U.root, v.root, U.num_qubits - 1), v.num_qubits)

    def _mv(self, ue: Edge, ve: Edge, level: int) -> Edge:
        if ue.w == ZERO or ve.w == ZERO:
            return self.zero_edge
        w = self._cvals[ue.w] * self._cvals[ve.w]
        if level < 0:
            h = self._intern(w)
            return self.zero_edge if h == ZERO else Edge(self.terminal, h)
        un, vn = ue.node, ve.node
        table = self._ct["mv"]
        key = (un.serial, vn.serial)
        res = table.get(key)
        if res is None:
            rows = []
            for i in (0, 1):
                p0 = self._mv(un.edges[2 * i], vn.edges[0], level - 1)
                p1 = self._mv(un.edges[2 * i + 1], vn.edges[1], level - 1)
                rows.append(self._add(p0, p1, level - 1, False))
            res = self.make_vector_node(level, rows[0], rows[1])
            table.put(key, res)
        return self._scaled(res, w)

    def multiply_mm(self, A: MatrixDD, B: MatrixDD) -> MatrixDD:
        """Operator composition A @ B (B acts first)."""
        if A.num_qubits != B.num_qubits:
            raise ValueError("size mismatch in multiply_mm")
        return MatrixDD(self._mm(A.root, B.root, A.num_qubits - 1), A.num_qubits)

    def _mm(self, ae: Edge, be: Edge, level: int) -> Edge:
        if ae.w == ZERO or be.w == ZERO:
            return self.zero_edge
        w = self._cvals[ae.w] * self._cvals[be.w]
        if level < 0:
            h = self._intern(w)
            return self.zero_edge if h == ZERO else Edge(self.terminal, h)
        an, bn = ae.node, be.node
        table = self._ct["mm"]
        key = (an.serial, bn.serial)
        res = table.get(key)
        if res is None:
            children = []
            for i in (0, 1):
                for j in (0, 1):
                    p0 = self._mm(an.edges[2 * i], bn.edges[j], level - 1)
                    p1 = self._mm(an.edges[2 * i + 1], bn.edges[2 + j], level - 1)
                    children.append(self._add(p0, p1, level - 1, True))
            res = self.make_matrix_node(level, tuple(children))
            table.put(key, res)
        return self._scaled(res, w)

    def kron(self, upper: MatrixDD, lower: MatrixDD) -> MatrixDD:
        """Tensor product; `upper` takes the more significant qubits.

        Realized by hanging the lower diagram where the upper diagram's
        paths reach the terminal, shifting upper levels up by the lower
        qubit count.
        """
        shift = lower.num_qubits
        e = self._kron(upper.root, lower.root, shift)
        return MatrixDD(e, upper.num_qubits + lower.num_qubits)

    def _kron(self, ue: Edge, lroot: Edge, shift: int) -> Edge:
        if ue.w == ZERO:
            return self.zero_edge
        if ue.node is self.terminal:
            return self._scaled(lroot, self._cvals[ue.w])
        table = self._ct["kron"]
        key = (ue.node.serial, lroot.node.serial, lroot.w, shift)
        res = table.get(key)
        if res is None:
            children = tuple(self._kron(c, lroot, shift) for c in ue.node.edges)
            res = self.make_matrix_node(ue.node.level + shift, children)
            table.put(key, res)
        return self._scaled(res, self._cvals[ue.w])

    def conjugate_transpose(self, U: MatrixDD) -> MatrixDD:
        """The adjoint operator: transpose the block structure, conjugate weights."""
        return MatrixDD(self._adjoint(U.root), U.num_qubits)

    def _adjoint(self, e: Edge) -> Edge:
        if e.w == ZERO:
            return self.zero_edge
        wc = self._cvals[e.w].conjugate()
        if e.node is self.terminal:
            return Edge(self.terminal, self._intern(wc))
        table = self._ct["adjoint"]
        key = e.node.serial
        res = table.get(key)
        if res is None:
            c = e.node.edges
            children = (
                self._adjoint(c[0]),
                self._adjoint(c[2]),
                self._adjoint(c[1]),
                self._adjoint(c[3]),
            )
            res = self.make_matrix_node(e.node.level, children)
            table.put(key, res)
        return self._scaled(res, wc)

    # ------------------------------------------------------------------
    # queries

    def get_amplitude(self, v: VectorDD, bits: str) -> complex:
        """Amplitude of one basis state: product of weights along its path."""
        n = v.num_qubits
        if len(bits) != n:
            raise ValueError(f"bitstring length {len(bits)} != qubit count {n}")
        e = v.root
        if e.w == ZERO:
            return 0j
        amp = self._cvals[e.w]
        node = e.node
        for level in range(n - 1, -1, -1):
            edge = node.edges[int(bits[n - 1 - level])]
            if edge.w == ZERO:
                return 0j
            amp *= self._cvals[edge.w]
            node = edge.node
        return amp

    def matrix_entry(self, U: MatrixDD, row: str, col: str) -> complex:
        """One operator entry, addressed by output and input bitstrings."""
        n = U.num_qubits
        if len(row) != n or len(col) != n:
            raise ValueError("bitstring length does not match qubit count")
        e = U.root
        if e.w == ZERO:
            return 0j
        val = self._cvals[e.w]
        node = e.node
        for level in range(n - 1, -1, -1):
            i = int(row[n - 1 - level])
            j = int(col[n - 1 - level])
            edge = node.edges[2 * i + j]
            if edge.w == ZERO:
                return 0j
            val *= self._cvals[edge.w]
            node = edge.node
        return val

    def node_count(self, dd: VectorDD | MatrixDD) -> int:
        """Number of distinct non-terminal nodes reachable from the root."""
        seen: set[int] = set()
        stack = [dd.root.node]
        while stack:
            node = stack.pop()
            if node is self.terminal or node.serial in seen:
                continue
            seen.add(node.serial)
            for e in node.edges:
                if e.w != ZERO:
                    stack.append(e.node)
        return len(seen)

    def inner_product(self, a: VectorDD, b: VectorDD) -> complex:
        """<a|b>: conjugate-linear in the first argument."""
        if a.num_qubits != b.num_qubits:
            raise ValueError("size mismatch in inner_product")
        return self._ip(a.root, b.root, a.num_qubits - 1)

    def _ip(self, ae: Edge, be: Edge, level: int) -> complex:
        if ae.w == ZERO or be.w == ZERO:
            return 0j
        w = self._cvals[ae.w].conjugate() * self._cvals[be.w]
        if level < 0:
            return w
        table = self._ct["ip"]
        key = (ae.node.serial, be.node.serial)
        s = table.get(key)
        if s is None:
            s = 0j
            for ce, cf in zip(ae.node.edges, be.node.edges):
                s += self._ip(ce, cf, level - 1)
            table.put(key, s)
        return w * s

    def count_nonzero_entries(self, v: VectorDD) -> int:
        """Number of basis states with structurally nonzero amplitude.

        Counted over root-to-terminal paths without expanding the dense
        vector; weights below tolerance were already snapped to the zero
        stub during normalization.
        """
        if v.root.w == ZERO:
            return 0
        memo: dict[int, int] = {}

        def paths(node: Node) -> int:
            if node is self.terminal:
                return 1
            cached = memo.get(node.serial)
            if cached is None:
                cached = sum(paths(e.node) for e in node.edges if e.w != ZERO)
                memo[node.serial] = cached
            return cached

        return paths(v.root.node)

    def measurement_probabilities(self, v: VectorDD, qubit: int) -> tuple[float, float]:
        """Marginal probabilities (p0, p1) for one qubit of a normalized state.

        Squared edge magnitudes accumulate downward from the root; the L2
        node normalization makes each node's branch probabilities local.
        """
        n = v.num_qubits
        if not (0 <= qubit < n):
            raise ValueError(f"qubit {qubit} out of range")
        frontier: dict[Node, float] = {v.root.node: abs(self._cvals[v.root.w]) ** 2}
        for level in range(n - 1, qubit, -1):
            nxt: dict[Node, float] = {}
            for node, mass in frontier.items():
                for e in node.edges:
                    if e.w == ZERO:
                        continue
                    nxt[e.node] = nxt.get(e.node, 0.0) + mass * abs(self._cvals[e.w]) ** 2
            frontier = nxt
        p0 = 0.0
        p1 = 0.0
        for node, mass in frontier.items():
            p0 += mass * abs(self._cvals[node.edges[0].w]) ** 2
            p1 += mass * abs(self._cvals[node.edges[1].w]) ** 2
        total = p0 + p1
        if total > 0:
            p0, p1 = p0 / total, p1 / total
        return p0, p1

    def collapse(self, v: VectorDD, qubit: int, outcome: int) -> VectorDD:
        """Project a state onto one branch of a qubit and renormalize.

        The discarded branch becomes a zero stub at the qubit's level;
        the surviving diagram is rebuilt bottom-up so node normalization
        is restored, then the root weight is rescaled to unit magnitude
        (its phase is preserved).
        """
        n = v.num_qubits
        if not (0 <= qubit < n):
            raise ValueError(f"qubit {qubit} out of range")
        if outcome not in (0, 1):
            raise ValueError("outcome must be 0 or 1")
        memo: dict[int, Edge] = {}

        def rebuild(node: Node, level: int) -> Edge:
            cached = memo.get(node.serial)
            if cached is not None:
                return cached
            if level == qubit:
                kept = node.edges[outcome]
                if outcome == 0:
                    res = self.make_vector_node(level, kept, self.zero_edge)
                else:
                    res = self.make_vector_node(level, self.zero_edge, kept)
            else:
                parts = []
                for e in node.edges:
                    if e.w == ZERO:
                        parts.append(self.zero_edge)
                    else:
                        sub = rebuild(e.node, level - 1)
                        parts.append(self._scaled(sub, self._cvals[e.w]))
                res = self.make_vector_node(level, parts[0], parts[1])
            memo[node.serial] = res
            return res

        top = rebuild(v.root.node, n - 1)
        if top.w == ZERO:
            raise ValueError("cannot collapse onto a zero-probability outcome")
        w = self._cvals[v.root.w] * self._cvals[top.w]
        w /= abs(w)
        return VectorDD(Edge(top.node, self._intern(w)), n)

    def vector_to_dense(self, v: VectorDD) -> list[complex]:
        """Expand all 2**n amplitudes (intended for small n only)."""
        n = v.num_qubits
        out = [0j] * (1 << n)

        def walk(node: Node, level: int, amp: complex, index: int) -> None:
            if level < 0:
                out[index] = amp
                return
            for bit, e in enumerate(node.edges):
                if e.w != ZERO:
                    walk(e.node, level - 1, amp * self._cvals[e.w], index | (bit << level))

        if v.root.w != ZERO:
            walk(v.root.node, n - 1, self._cvals[v.root.w], 0)
        return out

    def matrix_to_dense(self, U: MatrixDD) -> list[list[complex]]:
        """Expand the full operator matrix (intended for small n only)."""
        n = U.num_qubits
        dim = 1 << n
        out = [[0j] * dim for _ in range(dim)]

        def walk(node: Node, level: int, val: complex, row: int, col: int) -> None:
            if level < 0:
                out[row][col] = val
                return
            for slot, e in enumerate(node.edges):
                if e.w == ZERO:
                    continue
                i, j = divmod(slot, 2)
                walk(
                    e.node,
                    level - 1,
                    val * self._cvals[e.w],
                    row | (i << level),
                    col | (j << level),
                )

        if U.root.w != ZERO:
            walk(U.root.node, n - 1, self._cvals[U.root.w], 0, 0)
        return out
