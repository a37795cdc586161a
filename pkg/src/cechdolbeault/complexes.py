"""Bigraded cochain complexes with a q-raising differential.

A :class:`BigradedComplex` stores one finite-dimensional space per bidegree
``(p, q)`` and a differential ``(p, q) -> (p, q + 1)``.  Everything here is a
value: nothing mutates its inputs, and results are cached per object.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

from .errors import InvalidComplexError, NotAChainMapError, CechDolbeaultError
from .linalg import SparseMatrix, Subspace, coordinates, image_basis, kernel_basis, rank
from .scalars import ONE, as_scalar

__all__ = [
    "Bidegree",
    "Issue",
    "BigradedComplex",
    "ChainMap",
    "CohomologyGroup",
    "validate",
    "cohomology",
    "cohomology_dims",
    "induced_map",
    "cone",
    "reindex",
    "direct_sum",
    "euler_characteristic",
]


class Bidegree(NamedTuple):
    p: int
    q: int

    def __add__(self, other):
        return Bidegree(self.p + other[0], self.q + other[1])

    def __str__(self):
        return f"({self.p},{self.q})"


def _bd(x) -> Bidegree:
    return x if isinstance(x, Bidegree) else Bidegree(*x)


class Issue(NamedTuple):
    """One defect found by a validation pass."""

    at: Bidegree
    kind: str
    detail: str = ""

    def __str__(self):
        return f"{self.kind} at {self.at}" + (f" ({self.detail})" if self.detail else "")


@dataclass(frozen=True, eq=False)
class BigradedComplex:
    name: str
    dims: Mapping[Bidegree, int]
    diff: Mapping[Bidegree, SparseMatrix] = field(default_factory=dict)

    def __post_init__(self):
        dims = {}
        for k, v in self.dims.items():
            if v < 0:
                raise ValueError(f"negative dimension at {k}")
            if v:
                dims[_bd(k)] = int(v)
        diff = {}
        for k, m in self.diff.items():
            k = _bd(k)
            expected = (dims.get((k.p, k.q + 1), 0), dims.get(k, 0))
            if not m.is_zero() or m.shape != expected:
                diff[k] = m
        object.__setattr__(self, "dims", dict(sorted(dims.items())))
        object.__setattr__(self, "diff", dict(sorted(diff.items())))

    def dim(self, p: int, q: int) -> int:
        return self.dims.get((p, q), 0)

    def d(self, p: int, q: int) -> SparseMatrix:
        """Differential from ``(p, q)`` to ``(p, q + 1)``; zero if not declared."""
        m = self.diff.get((p, q))
        if m is None:
            return SparseMatrix.zeros(self.dim(p, q + 1), self.dim(p, q))
        return m

    @property
    def support(self) -> list[Bidegree]:
        return list(self.dims)

    @property
    def ps(self) -> list[int]:
        return sorted({b.p for b in self.dims})

    def q_span(self, p: int) -> tuple[int, int] | None:
        qs = [b.q for b in self.dims if b.p == p]
        return (min(qs), max(qs)) if qs else None

    def total_dim(self) -> int:
        return sum(self.dims.values())

    @cached_property
    def issues(self) -> list[Issue]:
        return _validate(self)

    @cached_property
    def _cohomology_cache(self) -> dict:
        return {}

    @cached_property
    def _dual_cache(self) -> dict:
        return {}

    def __repr__(self):
        return f"BigradedComplex({self.name!r}, dims={dict(self.dims)})"


def _validate(c: BigradedComplex) -> list[Issue]:
    out = []
    for (p, q), m in c.diff.items():
        if m.shape != (c.dim(p, q + 1), c.dim(p, q)):
            out.append(Issue(Bidegree(p, q), "shape",
                             f"differential is {m.shape}, expected {(c.dim(p, q + 1), c.dim(p, q))}"))
    if out:
        return out
    for (p, q) in c.diff:
        if (p, q + 1) in c.diff and not (c.d(p, q + 1) @ c.d(p, q)).is_zero():
            out.append(Issue(Bidegree(p, q), "d∘d≠0"))
    return out


def validate(c: BigradedComplex) -> list[Issue]:
    """Every bidegree where shapes mismatch or ``d∘d ≠ 0``; empty means valid."""
    return list(c.issues)


def _require_valid(c: BigradedComplex):
    if c.issues:
        raise InvalidComplexError(c.name, c.issues)


@dataclass(frozen=True, eq=False)
class ChainMap:
    """Blockwise linear map ``source(p, q) -> target((p, q) + shift)``.

    The chain condition is ``d_T ∘ f = (-1)^shift.q · f ∘ d_S``.
    """

    source: BigradedComplex
    target: BigradedComplex
    blocks: Mapping[Bidegree, SparseMatrix] = field(default_factory=dict)
    shift: Bidegree = Bidegree(0, 0)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "shift", _bd(self.shift))
        object.__setattr__(self, "blocks", {_bd(k): m for k, m in sorted(self.blocks.items())})
        if not self.name:
            object.__setattr__(self, "name", f"{self.source.name}->{self.target.name}")

    def block(self, p: int, q: int) -> SparseMatrix:
        m = self.blocks.get((p, q))
        if m is None:
            return SparseMatrix.zeros(self.target.dim(p + self.shift.p, q + self.shift.q),
                                      self.source.dim(p, q))
        return m

    @property
    def sign(self) -> int:
        return -1 if self.shift.q % 2 else 1

    @cached_property
    def defects(self) -> list[Issue]:
        out = []
        s = self.shift
        for (p, q), m in self.blocks.items():
            expected = (self.target.dim(p + s.p, q + s.q), self.source.dim(p, q))
            if m.shape != expected:
                out.append(Issue(Bidegree(p, q), "shape", f"block is {m.shape}, expected {expected}"))
        if out:
            return out
        for p, q in self.source.dims:
            lhs = self.target.d(p + s.p, q + s.q) @ self.block(p, q)
            rhs = self.block(p, q + 1) @ self.source.d(p, q)
            if self.sign < 0:
                rhs = -rhs
            if lhs != rhs:
                out.append(Issue(Bidegree(p, q), "does not commute with d"))
        return out

    def is_chain_map(self) -> bool:
        return not self.defects

    def require(self):
        if self.defects:
            raise NotAChainMapError(self.name, self.defects)
        return self

    def compose(self, first: ChainMap) -> ChainMap:
        """``self ∘ first``."""
        s1 = first.shift
        keys = set(first.blocks)
        blocks = {}
        for p, q in keys:
            blocks[Bidegree(p, q)] = self.block(p + s1.p, q + s1.q) @ first.block(p, q)
        return ChainMap(first.source, self.target, blocks, s1 + self.shift,
                        name=f"({self.name})∘({first.name})")

    def __add__(self, other: ChainMap) -> ChainMap:
        if self.shift != other.shift:
            raise ValueError("cannot add chain maps with different shifts")
        keys = set(self.blocks) | set(other.blocks)
        return ChainMap(self.source, self.target,
                        {k: self.block(*k) + other.block(*k) for k in keys}, self.shift)

    def __sub__(self, other: ChainMap) -> ChainMap:
        return self + other.scale(-1)

    def scale(self, s) -> ChainMap:
        return ChainMap(self.source, self.target,
                        {k: m.scale(s) for k, m in self.blocks.items()}, self.shift)

    @classmethod
    def identity(cls, c: BigradedComplex, scale=ONE) -> ChainMap:
        return cls(c, c, {b: SparseMatrix.identity(n, as_scalar(scale)) for b, n in c.dims.items()},
                   name=f"id[{c.name}]")

    @classmethod
    def zero(cls, source: BigradedComplex, target: BigradedComplex) -> ChainMap:
        return cls(source, target, {}, name=f"0[{source.name}->{target.name}]")


@dataclass(frozen=True, eq=False)
class CohomologyGroup:
    at: Bidegree
    dim: int
    representatives: Subspace
    cocycles: Subspace
    coboundaries: Subspace

    @cached_property
    def _coord_basis(self):
        return self.representatives.basis + self.coboundaries.basis

    def class_of(self, v) -> tuple:
        """Coordinates of the class of cocycle ``v`` in the representative basis."""
        n = self.cocycles.ambient_dim
        coords = coordinates(self._coord_basis, tuple(v), n)
        if coords is None:
            raise CechDolbeaultError(f"vector is not a cocycle at {self.at}")
        return coords[: self.dim]

    def is_zero_class(self, v) -> bool:
        return not any(self.class_of(v))


def cohomology(c: BigradedComplex, p: int, q: int) -> CohomologyGroup:
    """``ker d(p,q) / im d(p,q-1)`` with a deterministic representative basis."""
    key = (p, q)
    cache = c._cohomology_cache
    if key in cache:
        return cache[key]
    _require_valid(c)
    n = c.dim(p, q)
    z = kernel_basis(c.d(p, q))
    b = image_basis(c.d(p, q - 1))
    reps = []
    current = list(b.basis)
    r = len(current)
    for v in z.basis:
        trial = current + [v]
        r2 = rank(SparseMatrix.from_columns(trial, n))
        if r2 > r:
            reps.append(v)
            current, r = trial, r2
    group = CohomologyGroup(Bidegree(p, q), len(reps), Subspace(n, tuple(reps)), z, b)
    assert group.dim == z.dim - b.dim
    cache[key] = group
    return group


def cohomology_dims(c: BigradedComplex, bidegrees: Iterable | None = None) -> dict[Bidegree, int]:
    if bidegrees is None:
        bidegrees = c.support
    return {_bd(b): cohomology(c, *b).dim for b in bidegrees}


def induced_map(f: ChainMap, p: int, q: int) -> SparseMatrix:
    """Matrix of ``f`` on cohomology at ``(p, q)`` in the representative bases."""
    f.require()
    src = cohomology(f.source, p, q)
    s = f.shift
    tgt = cohomology(f.target, p + s.p, q + s.q)
    block = f.block(p, q)
    cols = [tgt.class_of(block.apply(v)) for v in src.representatives.basis]
    return SparseMatrix.from_columns(cols, tgt.dim)


def cone(f: ChainMap, name: str | None = None) -> BigradedComplex:
    """Mapping cone: ``cone(p,q) = T(p,q) ⊕ S(p,q+1)``, ``D(a,b) = (d a + f b, -d b)``."""
    if f.shift != (0, 0):
        raise ValueError("cone requires a shift-(0,0) chain map")
    f.require()
    S, T = f.source, f.target
    keys = {b for b in T.dims} | {Bidegree(b.p, b.q - 1) for b in S.dims}
    dims = {b: T.dim(*b) + S.dim(b.p, b.q + 1) for b in keys}
    diff = {}
    for p, q in keys | {Bidegree(b.p, b.q - 1) for b in keys}:
        rows = [T.dim(p, q + 1), S.dim(p, q + 2)]
        cols = [T.dim(p, q), S.dim(p, q + 1)]
        if not sum(rows) or not sum(cols):
            continue
        m = SparseMatrix.block([[T.d(p, q), f.block(p, q + 1)], [None, -S.d(p, q + 1)]], rows, cols)
        if not m.is_zero():
            diff[Bidegree(p, q)] = m
    return BigradedComplex(name or f"Cone({f.name})", dims, diff)


def reindex(c: BigradedComplex, dp: int = 0, dq: int = 0, name: str | None = None) -> BigradedComplex:
    """Move every space from ``(p, q)`` to ``(p + dp, q + dq)``; differentials unchanged."""
    return BigradedComplex(name or f"{c.name}[{dp},{dq}]",
                           {Bidegree(b.p + dp, b.q + dq): n for b, n in c.dims.items()},
                           {Bidegree(b.p + dp, b.q + dq): m for b, m in c.diff.items()})


def direct_sum(complexes: list[BigradedComplex], name: str | None = None) -> BigradedComplex:
    keys = sorted({b for c in complexes for b in c.dims})
    dims = {b: sum(c.dim(*b) for c in complexes) for b in keys}
    diff = {}
    for b in keys:
        m = SparseMatrix.block_diag([c.d(*b) for c in complexes])
        if not m.is_zero():
            diff[b] = m
    return BigradedComplex(name or "⊕".join(c.name for c in complexes), dims, diff)


def euler_characteristic(c: BigradedComplex, p: int) -> int:
    """``Σ_q (-1)^q dim(p,q)``, checked against the same sum over cohomology."""
    span = c.q_span(p)
    if span is None:
        return 0
    qs = range(span[0], span[1] + 1)
    from_dims = sum((-1) ** (q % 2) * c.dim(p, q) for q in qs)
    from_h = sum((-1) ** (q % 2) * cohomology(c, p, q).dim for q in qs)
    if from_dims != from_h:
        raise CechDolbeaultError(f"Euler characteristic mismatch at p={p}: {from_dims} vs {from_h}")
    return from_dims
