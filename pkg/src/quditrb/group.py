"""Exhaustive enumeration of prime-qudit Clifford groups.

Enumeration is breadth-first closure from the identity under right
multiplication by the standard generators, with tableaux as exact dedup keys.
Element 0 is always the identity, and the element order is determined by the
generator order, so enumeration is reproducible run to run.
"""

from __future__ import annotations

import struct
from collections import deque
from pathlib import Path

import numpy as np

from .algebra import is_prime, phase_order
from .tableau import (
    CliffordTableau,
    compose,
    generator_dense,
    generator_tableaux,
    identity_tableau,
    invert,
    tableau_to_dense,
    validate_tableau,
)

# Full multiplication tables are quadratic in group order; above this size
# only rows requested via prod_row are materialized.
EAGER_PROD_LIMIT = 1024

_CACHE_MAGIC = b"QRBG"
_CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<4sIIIQ")


def clifford_group_order(d: int, n: int) -> int:
    """|C_d^n| = d^(n^2 + 2n) * prod_{i=1..n} (d^(2i) - 1) for prime d."""
    if not is_prime(d):
        raise ValueError(f"dimension {d} is not prime")
    if n < 1:
        raise ValueError(f"need at least one qudit, got n={n}")
    order = d ** (n * n + 2 * n)
    for i in range(1, n + 1):
        order *= d ** (2 * i) - 1
    return order


class CliffordGroupTable:
    """Indexed Clifford group with lazy dense forms and composition tables.

    prod(i, j) is the index of element_j * element_i, i.e. the element acting
    as i first and j second, matching compose() on tableaux.
    """

    def __init__(
        self,
        d: int,
        n: int,
        elements: tuple[CliffordTableau, ...],
        dense: list[np.ndarray] | None = None,
    ):
        self.d = d
        self.n = n
        self.elements = elements
        self.index = {t: i for i, t in enumerate(elements)}
        if len(self.index) != len(elements):
            raise ValueError("duplicate tableaux in element list")
        if elements[0] != identity_tableau(d, n):
            raise ValueError("element 0 must be the identity")
        self._dense: list[np.ndarray | None] = (
            list(dense) if dense is not None else [None] * len(elements)
        )
        self._prod_full: np.ndarray | None = None
        self._prod_rows: dict[int, np.ndarray] = {}
        self._inv: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.elements)

    def index_of(self, t: CliffordTableau) -> int:
        try:
            return self.index[t]
        except KeyError:
            raise ValueError("tableau is not an element of this group table") from None

    def dense(self, i: int) -> np.ndarray:
        u = self._dense[i]
        if u is None:
            u = tableau_to_dense(self.elements[i])
            self._dense[i] = u
        return u

    def dense_stack(self) -> np.ndarray:
        return np.stack([self.dense(i) for i in range(len(self))])

    def prod(self, i: int, j: int) -> int:
        """Index of the composition applying element i first, then j."""
        if self._prod_full is not None:
            return int(self._prod_full[i, j])
        row = self._prod_rows.get(i)
        if row is not None:
            return int(row[j])
        return self.index[compose(self.elements[i], self.elements[j])]

    def prod_row(self, i: int) -> np.ndarray:
        if self._prod_full is not None:
            return self._prod_full[i]
        row = self._prod_rows.get(i)
        if row is None:
            first = self.elements[i]
            row = np.fromiter(
                (self.index[compose(first, t)] for t in self.elements),
                dtype=np.int64,
                count=len(self),
            )
            self._prod_rows[i] = row
        return row

    def ensure_prod_table(self) -> np.ndarray:
        if self._prod_full is None:
            if len(self) > EAGER_PROD_LIMIT:
                raise ValueError(
                    f"full product table disabled for {len(self)} elements "
                    f"(limit {EAGER_PROD_LIMIT})"
                )
            self._prod_full = np.stack([self.prod_row(i) for i in range(len(self))])
            self._prod_rows.clear()
        return self._prod_full

    def inv(self, i: int) -> int:
        if self._inv is None:
            self._inv = np.fromiter(
                (self.index[invert(t)] for t in self.elements),
                dtype=np.int64,
                count=len(self),
            )
        return int(self._inv[i])


def enumerate_group(d: int, n: int, max_size: int = 10**6, keep_dense: bool = True) -> CliffordGroupTable:
    """Enumerate the full Clifford group on n qudits of prime dimension d.

    The predicted order is checked against max_size before any work happens,
    and the BFS result is asserted to match it exactly. With keep_dense the
    dense unitary of every element is carried through the closure (one matrix
    product per element) instead of being synthesized later on demand.
    """
    order = clifford_group_order(d, n)
    if order > max_size:
        raise ValueError(
            f"group order {order} for d={d}, n={n} exceeds the cap {max_size}"
        )
    gens = generator_tableaux(d, n)
    gen_dense = [generator_dense(name, d, n) for name, _ in gens] if keep_dense else None

    ident = identity_tableau(d, n)
    elements = [ident]
    index = {ident: 0}
    dense: list[np.ndarray] | None = None
    if keep_dense:
        dense = [np.eye(d**n, dtype=complex)]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for g, (_, gt) in enumerate(gens):
            t = compose(elements[i], gt)
            if t not in index:
                index[t] = len(elements)
                elements.append(t)
                if dense is not None:
                    dense.append(gen_dense[g] @ dense[i])
                queue.append(index[t])
    if len(elements) != order:
        raise AssertionError(
            f"closure found {len(elements)} elements, expected {order}"
        )
    return CliffordGroupTable(d, n, tuple(elements), dense)


# ---------------------------------------------------------------------------
# Binary cache
# ---------------------------------------------------------------------------
#
# Layout (little endian):
#   magic "QRBG" | u32 version | u32 d | u32 n | u64 count
# then per element, row major:
#   (2n)^2 bytes of tableau matrix entries (u8) | 2n bytes of phases (u8)


def write_group_cache(table: CliffordGroupTable, path: str | Path) -> None:
    d, n = table.d, table.n
    chunks = [_CACHE_HEADER.pack(_CACHE_MAGIC, _CACHE_VERSION, d, n, len(table))]
    for t in table.elements:
        mat = np.asarray(t.mat, dtype=np.uint8)
        phases = np.asarray(t.phases, dtype=np.uint8)
        chunks.append(mat.tobytes())
        chunks.append(phases.tobytes())
    Path(path).write_bytes(b"".join(chunks))


def read_group_cache(path: str | Path) -> CliffordGroupTable:
    raw = Path(path).read_bytes()
    if len(raw) < _CACHE_HEADER.size:
        raise ValueError(f"{path}: truncated cache header")
    magic, version, d, n, count = _CACHE_HEADER.unpack_from(raw)
    if magic != _CACHE_MAGIC:
        raise ValueError(f"{path}: not a group cache file")
    if version != _CACHE_VERSION:
        raise ValueError(f"{path}: unsupported cache version {version}")
    side = 2 * n
    record = side * side + side
    body = raw[_CACHE_HEADER.size :]
    if len(body) != count * record:
        raise ValueError(
            f"{path}: expected {count * record} bytes of records, found {len(body)}"
        )
    dphi = phase_order(d)
    elements = []
    for k in range(count):
        rec = body[k * record : (k + 1) * record]
        flat = np.frombuffer(rec, dtype=np.uint8)
        mat = flat[: side * side].reshape(side, side)
        phases = flat[side * side :]
        if mat.max(initial=0) >= d or phases.max(initial=0) >= dphi:
            raise ValueError(f"{path}: record {k} has out-of-range entries")
        t = CliffordTableau(
            d,
            n,
            tuple(tuple(int(x) for x in row) for row in mat),
            tuple(int(x) for x in phases),
        )
        validate_tableau(t)
        elements.append(t)
    return CliffordGroupTable(d, n, tuple(elements))
