"""Sparse exact linear algebra over the Gaussian rationals.

Vectors are plain tuples of :class:`Scalar`.  Matrices are immutable
:class:`SparseMatrix` values.  All elimination is pivot-normalised Gaussian
elimination with a fixed pivot order (columns left to right, first available
row), so every basis returned here is reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import InvalidQuotientError, ShapeError
from .scalars import ONE, ZERO, Scalar, as_scalar

__all__ = [
    "Vector",
    "SparseMatrix",
    "Subspace",
    "rank",
    "rref",
    "kernel_basis",
    "image_basis",
    "quotient_dim",
    "solve",
    "inverse",
    "coordinates",
    "zero_vector",
    "vec",
]

Vector = tuple  # tuple[Scalar, ...]


def vec(*entries) -> Vector:
    return tuple(as_scalar(x) for x in entries)


def zero_vector(n: int) -> Vector:
    return (ZERO,) * n


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """A ``rows x cols`` matrix storing only nonzero entries."""

    rows: int
    cols: int
    entries: Mapping[tuple[int, int], Scalar] = field(default_factory=dict)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ShapeError(f"negative shape {self.rows}x{self.cols}")
        clean = {}
        for (i, j), x in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise ShapeError(f"entry ({i}, {j}) outside {self.rows}x{self.cols}")
            x = as_scalar(x)
            if x:
                clean[(i, j)] = x
        object.__setattr__(self, "entries", clean)

    # constructors

    @classmethod
    def zeros(cls, rows: int, cols: int) -> SparseMatrix:
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, n: int, scale=ONE) -> SparseMatrix:
        return cls(n, n, {(i, i): scale for i in range(n)})

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> SparseMatrix:
        rows = list(rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != cols:
                raise ShapeError("ragged rows")
            for j, x in enumerate(row):
                entries[(i, j)] = x
        return cls(len(rows), cols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> SparseMatrix:
        entries = {}
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise ShapeError("column length mismatch")
            for i, x in enumerate(col):
                entries[(i, j)] = x
        return cls(rows, len(columns), entries)

    @classmethod
    def block(cls, blocks: Sequence[Sequence[SparseMatrix | None]],
              row_sizes: Sequence[int], col_sizes: Sequence[int]) -> SparseMatrix:
        """Assemble from a grid of blocks; ``None`` stands for a zero block."""
        entries = {}
        r0 = 0
        for bi, brow in enumerate(blocks):
            c0 = 0
            for bj, b in enumerate(brow):
                if b is not None:
                    if b.shape != (row_sizes[bi], col_sizes[bj]):
                        raise ShapeError(f"block ({bi},{bj}) has shape {b.shape}, "
                                         f"expected {(row_sizes[bi], col_sizes[bj])}")
                    for (i, j), x in b.entries.items():
                        entries[(r0 + i, c0 + j)] = x
                c0 += col_sizes[bj]
            r0 += row_sizes[bi]
        return cls(sum(row_sizes), sum(col_sizes), entries)

    @classmethod
    def block_diag(cls, blocks: Sequence[SparseMatrix]) -> SparseMatrix:
        grid = [[b if i == j else None for j, b in enumerate(blocks)] for i in range(len(blocks))]
        return cls.block(grid, [b.rows for b in blocks], [b.cols for b in blocks])

    # views

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij) -> Scalar:
        return self.entries.get(ij, ZERO)

    def to_rows(self) -> list[list[Scalar]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (i, j), x in self.entries.items():
            out[i][j] = x
        return out

    def column(self, j: int) -> Vector:
        col = [ZERO] * self.rows
        for (i, jj), x in self.entries.items():
            if jj == j:
                col[i] = x
        return tuple(col)

    def columns(self) -> list[Vector]:
        cols = [[ZERO] * self.rows for _ in range(self.cols)]
        for (i, j), x in self.entries.items():
            cols[j][i] = x
        return [tuple(c) for c in cols]

    def row_dicts(self) -> list[dict[int, Scalar]]:
        out: list[dict[int, Scalar]] = [{} for _ in range(self.rows)]
        for (i, j), x in self.entries.items():
            out[i][j] = x
        return out

    def is_zero(self) -> bool:
        return not self.entries

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> SparseMatrix:
        rmap = {r: k for k, r in enumerate(row_idx)}
        cmap = {c: k for k, c in enumerate(col_idx)}
        entries = {(rmap[i], cmap[j]): x for (i, j), x in self.entries.items()
                   if i in rmap and j in cmap}
        return SparseMatrix(len(row_idx), len(col_idx), entries)

    # algebra

    @property
    def T(self) -> SparseMatrix:
        return SparseMatrix(self.cols, self.rows, {(j, i): x for (i, j), x in self.entries.items()})

    def __matmul__(self, other: SparseMatrix) -> SparseMatrix:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        right = other.row_dicts()
        acc: dict[tuple[int, int], Scalar] = {}
        for (i, k), a in self.entries.items():
            for j, b in right[k].items():
                key = (i, j)
                acc[key] = acc.get(key, ZERO) + a * b
        return SparseMatrix(self.rows, other.cols, acc)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: SparseMatrix) -> SparseMatrix:
        self._same_shape(other)
        acc = dict(self.entries)
        for k, x in other.entries.items():
            acc[k] = acc.get(k, ZERO) + x
        return SparseMatrix(self.rows, self.cols, acc)

    def __sub__(self, other: SparseMatrix) -> SparseMatrix:
        return self + (-other)

    def __neg__(self) -> SparseMatrix:
        return SparseMatrix(self.rows, self.cols, {k: -x for k, x in self.entries.items()})

    def scale(self, s) -> SparseMatrix:
        s = as_scalar(s)
        return SparseMatrix(self.rows, self.cols, {k: s * x for k, x in self.entries.items()})

    def apply(self, v: Sequence[Scalar]) -> Vector:
        if len(v) != self.cols:
            raise ShapeError(f"vector of length {len(v)} for matrix {self.shape}")
        out = [ZERO] * self.rows
        for (i, j), x in self.entries.items():
            if v[j]:
                out[i] = out[i] + x * v[j]
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self.entries.items())))

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"

    def pretty(self) -> str:
        rows = [[str(x) if x else "." for x in r] for r in self.to_rows()]
        w = max((len(s) for r in rows for s in r), default=1)
        return "\n".join("[" + " ".join(s.rjust(w) for s in r) + "]" for r in rows)


# elimination


def _rref_rows(rows: list[dict[int, Scalar]], col_order: Iterable[int]):
    """Reduce ``rows`` in place to reduced row echelon form.

    Returns ``(pivot_rows, pivot_cols)`` where ``pivot_rows[k]`` has a 1 in
    column ``pivot_cols[k]`` and zeros in every other pivot column.
    """
    remaining = [r for r in rows if r]
    pivots: list[tuple[int, dict[int, Scalar]]] = []
    for c in col_order:
        idx = next((k for k, r in enumerate(remaining) if c in r), None)
        if idx is None:
            continue
        prow = remaining.pop(idx)
        inv = prow[c].inverse()
        if inv != ONE:
            prow = {j: x * inv for j, x in prow.items()}
        for group in (remaining, [p for _, p in pivots]):
            for r in group:
                f = r.get(c)
                if f is None:
                    continue
                for j, x in prow.items():
                    y = r.get(j, ZERO) - f * x
                    if y:
                        r[j] = y
                    else:
                        r.pop(j, None)
        pivots.append((c, prow))
        remaining = [r for r in remaining if r]
        if not remaining:
            break
    return [p for _, p in pivots], [c for c, _ in pivots]


def rref(m: SparseMatrix) -> tuple[SparseMatrix, list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    prows, pcols = _rref_rows(m.row_dicts(), range(m.cols))
    order = sorted(range(len(pcols)), key=lambda k: pcols[k])
    entries = {}
    for new_i, k in enumerate(order):
        for j, x in prows[k].items():
            entries[(new_i, j)] = x
    return SparseMatrix(len(pcols), m.cols, entries), sorted(pcols)


def rank(m: SparseMatrix) -> int:
    if m.rows == 0 or m.cols == 0 or m.is_zero():
        return 0
    if m.rows < m.cols:
        m = m.T
    _, pcols = _rref_rows(m.row_dicts(), range(m.cols))
    return len(pcols)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of ``Q(i)^ambient_dim`` given by a basis of coordinate vectors."""

    ambient_dim: int
    basis: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(tuple(as_scalar(x) for x in v) for v in self.basis))
        for v in self.basis:
            if len(v) != self.ambient_dim:
                raise ShapeError(f"basis vector of length {len(v)} in ambient {self.ambient_dim}")

    @classmethod
    def span(cls, vectors: Iterable[Sequence[Scalar]], ambient_dim: int) -> Subspace:
        """Canonical (reduced echelon) basis of the span of ``vectors``."""
        vectors = [tuple(v) for v in vectors]
        m = SparseMatrix.from_rows(vectors, ambient_dim) if vectors else SparseMatrix.zeros(0, ambient_dim)
        r, _ = rref(m)
        return cls(ambient_dim, tuple(tuple(row) for row in r.to_rows()))

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls(n, tuple(SparseMatrix.identity(n).to_rows()))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def as_columns(self) -> SparseMatrix:
        return SparseMatrix.from_columns(self.basis, self.ambient_dim)

    def contains(self, v: Sequence[Scalar]) -> bool:
        return solve(self.as_columns(), v) is not None

    def contains_subspace(self, other: Subspace) -> bool:
        if other.ambient_dim != self.ambient_dim:
            return False
        if other.dim == 0:
            return True
        both = SparseMatrix.from_columns(self.basis + other.basis, self.ambient_dim)
        return rank(both) == rank(self.as_columns())

    def is_independent(self) -> bool:
        return rank(self.as_columns()) == self.dim if self.basis else True

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.ambient_dim == other.ambient_dim and self.dim == other.dim
                and self.contains_subspace(other))

    __hash__ = None


def kernel_basis(m: SparseMatrix) -> Subspace:
    """Basis of ``ker m``, one vector per free column in increasing order."""
    prows, pcols = _rref_rows(m.row_dicts(), range(m.cols))
    pivot_of = dict(zip(pcols, prows))
    free = [j for j in range(m.cols) if j not in pivot_of]
    basis = []
    for f in free:
        v = [ZERO] * m.cols
        v[f] = ONE
        for c, row in pivot_of.items():
            x = row.get(f)
            if x is not None:
                v[c] = -x
        basis.append(tuple(v))
    return Subspace(m.cols, tuple(basis))


def image_basis(m: SparseMatrix) -> Subspace:
    """Reduced echelon basis of the column space of ``m``."""
    r, _ = rref(m.T)
    return Subspace(m.rows, tuple(tuple(row) for row in r.to_rows()))


def quotient_dim(sub: Subspace, total: Subspace) -> int:
    """``dim(total) - dim(sub)``, after checking ``sub`` lies in ``total``."""
    if sub.ambient_dim != total.ambient_dim or not total.contains_subspace(sub):
        raise InvalidQuotientError("subspace is not contained in the total space")
    return total.dim - sub.dim


def solve(m: SparseMatrix, b: Sequence[Scalar], strategy: str = "low") -> Vector | None:
    """Return some ``x`` with ``m @ x == b``, or ``None`` if ``b`` is not in the image.

    ``strategy="low"`` pivots on the lowest column indices, ``"high"`` on the
    highest; the two give different particular solutions on singular systems.
    """
    if len(b) != m.rows:
        raise ShapeError(f"right-hand side of length {len(b)} for matrix {m.shape}")
    rows = m.row_dicts()
    aug = m.cols
    for i, x in enumerate(b):
        x = as_scalar(x)
        if x:
            rows[i][aug] = x
    if strategy == "low":
        order = list(range(m.cols))
    elif strategy == "high":
        order = list(range(m.cols - 1, -1, -1))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    order.append(aug)
    prows, pcols = _rref_rows(rows, order)
    if aug in pcols:
        return None
    x = [ZERO] * m.cols
    for c, row in zip(pcols, prows):
        x[c] = row.get(aug, ZERO)
    return tuple(x)


def inverse(m: SparseMatrix) -> SparseMatrix:
    if m.rows != m.cols:
        raise ShapeError(f"cannot invert non-square {m.shape}")
    n = m.rows
    rows = m.row_dicts()
    for i in range(n):
        rows[i][n + i] = ONE
    prows, pcols = _rref_rows(rows, range(n))
    if len(pcols) != n:
        raise ZeroDivisionError("matrix is singular")
    entries = {}
    for c, row in zip(pcols, prows):
        for j, x in row.items():
            if j >= n:
                entries[(c, j - n)] = x
    return SparseMatrix(n, n, entries)


def coordinates(basis: Sequence[Sequence[Scalar]], v: Sequence[Scalar], ambient_dim: int) -> Vector | None:
    """Coefficients of ``v`` in an independent ``basis``; ``None`` if outside the span."""
    if not basis:
        return () if not any(v) else None
    return solve(SparseMatrix.from_columns(basis, ambient_dim), v)
