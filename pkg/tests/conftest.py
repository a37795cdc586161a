"""Shared strategies, the sympy oracles and two split-cover fixtures."""

from fractions import Fraction

import sympy
from hypothesis import strategies as st

from cechdolbeault.cech import CoverDiagram
from cechdolbeault.complexes import BigradedComplex, ChainMap
from cechdolbeault.currents import PairingData, pairing_from_model
from cechdolbeault.linalg import SparseMatrix
from cechdolbeault.models import sum_models, torus_model
from cechdolbeault.morphisms import CoverMorphism, relative_pullback
from cechdolbeault.scalars import Scalar

small_fractions = st.fractions(min_value=-5, max_value=5, max_denominator=4)

scalars = st.builds(Scalar, small_fractions, small_fractions)

# mostly small Gaussian integers so random matrices are often rank deficient
entries = st.sampled_from([0, 0, 0, 1, -1, 2, Scalar(0, 1), Scalar(1, -1), Scalar(Fraction(1, 2))])


@st.composite
def matrices(draw, max_rows=5, max_cols=5, elements=entries):
    rows = draw(st.integers(0, max_rows))
    cols = draw(st.integers(0, max_cols))
    data = draw(st.lists(st.lists(elements, min_size=cols, max_size=cols), min_size=rows, max_size=rows))
    if not rows:
        return SparseMatrix.zeros(0, cols)
    return SparseMatrix.from_rows(data, cols)


def to_sympy(m: SparseMatrix) -> sympy.Matrix:
    def conv(i, j):
        x = m[i, j]
        return sympy.Rational(x.re.numerator, x.re.denominator) + sympy.I * sympy.Rational(
            x.im.numerator, x.im.denominator)
    return sympy.Matrix(m.rows, m.cols, conv)


def sympy_rank(m: SparseMatrix) -> int:
    if not m.rows or not m.cols:
        return 0
    return to_sympy(m).rank(simplify=True)


def sympy_h(c, p: int, q: int) -> int:
    """``dim ker d(p,q) - rank d(p,q-1)`` computed by sympy."""
    return c.dim(p, q) - sympy_rank(c.d(p, q)) - sympy_rank(c.d(p, q - 1))


def sympy_induced_rank(f, p: int, q: int) -> int:
    """Rank of ``f`` on cohomology: ``rank[f Z | B] - rank B`` with ``Z`` from sympy's nullspace."""
    src, tgt = f.source, f.target
    if not src.dim(p, q) or not tgt.dim(p, q):
        return 0
    d = src.d(p, q)
    if d.rows:
        z = to_sympy(d).nullspace(simplify=True)
        z = sympy.Matrix.hstack(*z) if z else sympy.zeros(src.dim(p, q), 0)
    else:
        z = sympy.eye(src.dim(p, q))
    fz = to_sympy(f.block(p, q)) * z
    b = tgt.d(p, q - 1)
    bm = to_sympy(b) if b.cols else sympy.zeros(tgt.dim(p, q), 0)
    both = sympy.Matrix.hstack(fz, bm)
    return both.rank(simplify=True) - (bm.rank(simplify=True) if bm.cols else 0)


def brute_force_dims(m, p, q):
    """Every dimension of the decomposition from the raw total complexes, via sympy."""
    tot_t, tot_s = m.target.total, m.source.total
    rel_map = relative_pullback(m)
    rel_rank = sympy_induced_rank(rel_map, p, q)
    h_rel_s = sympy_h(rel_map.target, p, q)
    return {
        "h_global_target": sympy_h(tot_t, p, q),
        "h_global_source": sympy_h(tot_s, p, q),
        "h_rel_target": sympy_h(rel_map.source, p, q),
        "h_rel_source": h_rel_s,
        "rank_rel_pullback": rel_rank,
        "quotient_dim": h_rel_s - rel_rank,
    }


def split_torus(n):
    """U0 = U1 = torus, empty overlap: the relative group is all of H(U1)."""
    m = torus_model(n)
    t, empty = m.complex, BigradedComplex("empty", {})
    pieces = {(0,): t, (1,): t, (0, 1): empty}
    zero_r = {((a,), (0, 1)): ChainMap.zero(t, empty) for a in (0, 1)}
    zero_e = {((a,), (0, 1)): ChainMap.zero(empty, t) for a in (0, 1)}
    d = CoverDiagram((0, 1), tuple(pieces), pieces, zero_r, name=f"split{n}", extend=zero_e)
    pd = pairing_from_model(m)
    return d, {(0,): pd, (1,): pd, (0, 1): PairingData(empty, n, {})}


def split_cover(k0, k1):
    """Two torus pieces with empty overlap, ``k0`` sheets over U0 and ``k1`` over U1."""
    t1 = torus_model(1)
    t2 = sum_models([t1, t1], name="t1x2")
    empty = BigradedComplex("empty", {})

    def diagram(c, name):
        pieces = {(0,): c, (1,): c, (0, 1): empty}
        return CoverDiagram((0, 1), tuple(pieces), pieces,
                            {((a,), (0, 1)): ChainMap.zero(c, empty) for a in (0, 1)}, name=name,
                            extend={((a,), (0, 1)): ChainMap.zero(empty, c) for a in (0, 1)})

    tgt, src = diagram(t1.complex, "X"), diagram(t2.complex, "Xt")

    def pull(k):
        blocks = {b: SparseMatrix.block([[SparseMatrix.identity(1)], [SparseMatrix.identity(1) if k > 1 else None]],
                                        [1, 1], [1]) for b in t1.complex.dims}
        return ChainMap(t1.complex, t2.complex, blocks)

    pe = PairingData(empty, 1, {})
    return CoverMorphism("split", src, tgt, {(0,): pull(k0), (1,): pull(k1), (0, 1): ChainMap.zero(empty, empty)},
                         0, 1, {(0,): pairing_from_model(t2), (1,): pairing_from_model(t2), (0, 1): pe},
                         {(0,): pairing_from_model(t1), (1,): pairing_from_model(t1), (0, 1): pe})
