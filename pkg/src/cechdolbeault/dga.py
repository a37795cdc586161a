"""Finite differential bigraded algebra models.

A :class:`DgaModel` is a :class:`BigradedComplex` together with a product,
a unit in bidegree ``(0, 0)``, an optional integration functional on the top
bidegree ``(n, n)`` and an optional partition of unity ``(rho0, rho1)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct
from typing import Mapping

from .complexes import Bidegree, BigradedComplex
from .linalg import SparseMatrix, Vector
from .scalars import ONE, ZERO, Scalar, as_scalar

__all__ = ["DgaModel", "validate_model"]


@dataclass(frozen=True, eq=False)
class DgaModel:
    """Products are stored per pair of bidegrees ``(a, b)`` as a matrix of
    shape ``dim(a+b) x (dim(a) * dim(b))``; column ``i * dim(b) + j`` holds
    the product of basis element ``i`` of ``a`` with basis element ``j`` of ``b``.
    """

    name: str
    complex: BigradedComplex
    products: Mapping[tuple[Bidegree, Bidegree], SparseMatrix]
    unit: Vector
    n: int | None = None
    integral: Vector | None = None
    partition: tuple[Vector, Vector] | None = None

    def __post_init__(self):
        prods = {(Bidegree(*a), Bidegree(*b)): m for (a, b), m in sorted(self.products.items())}
        object.__setattr__(self, "products", prods)
        object.__setattr__(self, "unit", tuple(as_scalar(x) for x in self.unit))
        if self.integral is not None:
            object.__setattr__(self, "integral", tuple(as_scalar(x) for x in self.integral))
        if self.partition is not None:
            object.__setattr__(self, "partition",
                               tuple(tuple(as_scalar(x) for x in v) for v in self.partition))

    def dim(self, b) -> int:
        return self.complex.dim(*b)

    def product_table(self, a, b) -> SparseMatrix:
        a, b = Bidegree(*a), Bidegree(*b)
        m = self.products.get((a, b))
        if m is None:
            return SparseMatrix.zeros(self.dim(a + b), self.dim(a) * self.dim(b))
        return m

    def wedge(self, a_deg, a: Vector, b_deg, b: Vector) -> Vector:
        """Product of ``a`` (in ``a_deg``) with ``b`` (in ``b_deg``)."""
        a_deg, b_deg = Bidegree(*a_deg), Bidegree(*b_deg)
        nb = self.dim(b_deg)
        table = self.product_table(a_deg, b_deg)
        out = [ZERO] * table.rows
        for (k, col), x in table.entries.items():
            i, j = divmod(col, nb)
            if a[i] and b[j]:
                out[k] = out[k] + x * a[i] * b[j]
        return tuple(out)

    def left_multiplication(self, a_deg, a: Vector, b_deg) -> SparseMatrix:
        """Matrix of ``y ↦ a ∧ y`` from ``b_deg`` to ``a_deg + b_deg``."""
        a_deg, b_deg = Bidegree(*a_deg), Bidegree(*b_deg)
        nb = self.dim(b_deg)
        table = self.product_table(a_deg, b_deg)
        acc: dict = {}
        for (k, col), x in table.entries.items():
            i, j = divmod(col, nb)
            if a[i]:
                acc[(k, j)] = acc.get((k, j), ZERO) + x * a[i]
        return SparseMatrix(table.rows, nb, acc)

    def basis_vector(self, b, i) -> Vector:
        v = [ZERO] * self.dim(b)
        v[i] = ONE
        return tuple(v)

    def d(self, b, v: Vector) -> Vector:
        return self.complex.d(*b).apply(v)

    def integrate(self, v: Vector) -> Scalar:
        if self.integral is None:
            raise ValueError(f"model {self.name!r} has no integration functional")
        return sum((x * y for x, y in zip(self.integral, v)), ZERO)

    @cached_property
    def issues(self) -> list[str]:
        return validate_model(self)


def _deg(b: Bidegree) -> int:
    return b.p + b.q


def validate_model(m: DgaModel, max_triples: int = 4000, seed: int = 0) -> list[str]:
    """Check the algebra axioms on basis elements; returns human-readable defects.

    Associativity is checked on every basis triple when there are at most
    ``max_triples`` of them, otherwise on a seeded sample of that size.
    """
    c = m.complex
    out = [str(i) for i in c.issues]
    if out:
        return out
    degs = list(c.dims)
    zero = Bidegree(0, 0)
    for (a, b), t in m.products.items():
        if t.shape != (c.dim(*(a + b)), c.dim(*a) * c.dim(*b)):
            out.append(f"product table {a}x{b} has shape {t.shape}")
    if out:
        return out
    if len(m.unit) != c.dim(0, 0) or not any(m.unit):
        return out + ["unit is missing or has the wrong length"]
    if any(m.d(zero, m.unit)):
        out.append("d(unit) != 0")
    elems = [(b, i) for b in degs for i in range(c.dim(*b))]
    for b, i in elems:
        e = m.basis_vector(b, i)
        if m.wedge(zero, m.unit, b, e) != e or m.wedge(b, e, zero, m.unit) != e:
            out.append(f"unit is not a two-sided identity on basis element {i} of {b}")
    for (a, i), (b, j) in iproduct(elems, elems):
        x, y = m.basis_vector(a, i), m.basis_vector(b, j)
        xy = m.wedge(a, x, b, y)
        yx = m.wedge(b, y, a, x)
        sign = -1 if (_deg(a) * _deg(b)) % 2 else 1
        if xy != tuple(sign * v for v in yx):
            out.append(f"graded commutativity fails for {a}[{i}], {b}[{j}]")
        lhs = m.d(a + b, xy)
        a1, b1 = Bidegree(a.p, a.q + 1), Bidegree(b.p, b.q + 1)
        t1 = m.wedge(a1, m.d(a, x), b, y)
        t2 = m.wedge(a, x, b1, m.d(b, y))
        s = -1 if _deg(a) % 2 else 1
        rhs = tuple(u + s * v for u, v in zip(t1, t2))
        if lhs != rhs:
            out.append(f"Leibniz rule fails for {a}[{i}], {b}[{j}]")
    triples = list(iproduct(elems, repeat=3)) if len(elems) ** 3 <= max_triples else None
    if triples is None:
        rng = random.Random(seed)
        triples = [tuple(rng.choice(elems) for _ in range(3)) for _ in range(max_triples)]
    for (a, i), (b, j), (e, k) in triples:
        x, y, z = m.basis_vector(a, i), m.basis_vector(b, j), m.basis_vector(e, k)
        left = m.wedge(a + b, m.wedge(a, x, b, y), e, z)
        right = m.wedge(a, x, b + e, m.wedge(b, y, e, z))
        if left != right:
            out.append(f"associativity fails for {a}[{i}], {b}[{j}], {e}[{k}]")
    if m.partition is not None:
        r0, r1 = m.partition
        if len(r0) != c.dim(0, 0) or len(r1) != c.dim(0, 0):
            out.append("partition elements have the wrong length")
        elif tuple(x + y for x, y in zip(r0, r1)) != m.unit:
            out.append("partition does not sum to the unit")
    if m.integral is not None:
        n = m.n
        if n is None or len(m.integral) != c.dim(n, n):
            out.append("integration functional does not match the top bidegree")
        else:
            for i in range(c.dim(n, n - 1)):
                eta = m.basis_vector(Bidegree(n, n - 1), i)
                if m.integrate(m.d((n, n - 1), eta)):
                    out.append(f"Stokes fails: integral of d(eta) != 0 for eta = basis element {i} of ({n},{n - 1})")
    return out
