import pytest
from hypothesis import given, settings, strategies as st

from cechdolbeault.cech import (CechElement, CoverDiagram, build_double_complex, canonical_map, cech_cohomology,
                                constant_diagram, glue_global, relative_complex, ses_of_pair, total_complex,
                                total_layout)
from cechdolbeault.complexes import (Bidegree, BigradedComplex, ChainMap, cohomology, cone, induced_map,
                                     reindex, validate)
from cechdolbeault.errors import CechDolbeaultError, DiagramError, UnsupportedRelativeError
from cechdolbeault.linalg import SparseMatrix, kernel_basis, rank
from cechdolbeault.models import (RandomBounds, interval_model, random_complex, random_iso_diagram,
                                  random_valid_diagram, tensor_models, torus_model)
from cechdolbeault.scalars import ZERO

from conftest import sympy_h

seeds = st.integers(0, 10 ** 6)


def two_set(u0, u1, u01, r0, r1, name="d"):
    pieces = {(0,): u0, (1,): u1, (0, 1): u01}
    return CoverDiagram((0, 1), tuple(pieces), pieces, {((0,), (0, 1)): r0, ((1,), (0, 1)): r1}, name=name)


def one_set(c):
    return CoverDiagram((0,), ((0,),), {(0,): c}, {})


def test_one_set_cover_is_the_input_complex():
    c = random_complex(7)
    d = one_set(c)
    dc = build_double_complex(d)
    assert all(dc.delta(0, *b).is_zero() for b in c.dims)
    tot = total_complex(dc)
    assert tot.dims == c.dims
    assert all(tot.d(*b) == c.d(*b) for b in c.dims)


def test_zero_restrictions_give_zero_delta():
    c = random_complex(5)
    d = two_set(c, c, c, ChainMap.zero(c, c), ChainMap.zero(c, c))
    dc = build_double_complex(d)
    for p in dc.ps:
        for s in dc.s_range(p):
            assert dc.delta(0, p, s).is_zero()


def test_torus_delta_is_minus_identity_plus_identity():
    t = torus_model(2).complex
    d = constant_diagram(t)
    dc = build_double_complex(d)
    for b, n in t.dims.items():
        expected = SparseMatrix.block([[-SparseMatrix.identity(n), SparseMatrix.identity(n)]], [n], [n, n])
        assert dc.delta(0, *b) == expected


def test_two_set_total_differential():
    """D(ξ0, ξ1, ξ01) = (dξ0, dξ1, ξ1 - ξ0 - dξ01) with restrictions the identity."""
    c = random_complex(21)
    d = constant_diagram(c)
    tot = d.total
    for p in c.ps:
        for q in range(-1, 6):
            a, b, z = c.dim(p, q), c.dim(p, q + 1), c.dim(p, q - 1)
            ident = SparseMatrix.identity(a)
            expected = SparseMatrix.block(
                [[c.d(p, q), None, None], [None, c.d(p, q), None], [-ident, ident, -c.d(p, q - 1)]],
                [b, b, a], [a, a, z])
            assert tot.d(p, q) == expected


def test_restricted_global_form_is_closed():
    m = tensor_models(torus_model(1), interval_model())
    d = constant_diagram(m.complex)
    can = canonical_map(d)
    for b in m.complex.dims:
        for eta in kernel_basis(m.complex.d(*b)).basis:
            x = CechElement(*b, {(0,): eta, (1,): eta})
            assert x.to_vector(d) == can.block(*b).apply(eta)
            assert not any(d.total.d(*b).apply(x.to_vector(d)))


def test_total_differential_matches_double_complex_blocks():
    """Independent reassembly from δ and (-1)^r ∂̄."""
    d = random_valid_diagram(4)
    dc = build_double_complex(d)
    tot = d.total
    for p in dc.ps:
        for q in range(-1, 6):
            src, tgt = total_layout(d, p, q), total_layout(d, p, q + 1)
            rows = [sum(n for r2, _, _, n in tgt if r2 == r) for r in range(2)]
            cols = [sum(n for r2, _, _, n in src if r2 == r) for r in range(2)]
            expected = SparseMatrix.block(
                [[dc.dbar(0, p, q), None], [dc.delta(0, p, q), -dc.dbar(1, p, q - 1)]], rows, cols)
            assert tot.d(p, q) == expected


def test_cech_cohomology_examples():
    t = torus_model(1).complex
    assert [cech_cohomology(one_set(t), *b).dim for b in sorted(t.dims)] == [1, 1, 1, 1]
    for n in (1, 2):
        t = torus_model(n).complex
        d = constant_diagram(t)
        for b in t.dims:
            assert cech_cohomology(d, *b).dim == t.dim(*b)
    acyclic = BigradedComplex("a", {(0, 0): 1, (0, 1): 1}, {(0, 0): SparseMatrix.identity(1)})
    d = constant_diagram(acyclic)
    assert all(h == 0 for h in (cech_cohomology(d, *b).dim for b in d.total.dims))


def test_three_set_cover_independence():
    c = random_complex(13)
    d = constant_diagram(c, (0, 1, 2))
    assert d.max_r == 2
    assert validate(d.total) == []
    can = canonical_map(d)
    for b in c.dims:
        m = induced_map(can, *b)
        assert m.rows == m.cols == rank(m) == cohomology(c, *b).dim


def test_non_functorial_restrictions_are_named():
    c = BigradedComplex("c", {(0, 0): 1})
    ident, zero = ChainMap.identity(c), ChainMap.zero(c, c)
    simplices = [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
    restrict = {(f, s): ident for s in simplices if len(s) > 1 for f in
                [s[:k] + s[k + 1:] for k in range(len(s))]}
    restrict[((0, 1), (0, 1, 2))] = zero
    d = CoverDiagram((0, 1, 2), simplices, {s: c for s in simplices}, restrict, name="bad")
    assert any("not functorial" in i and "(0,)" in i for i in d.issues)
    with pytest.raises(DiagramError, match="not functorial"):
        build_double_complex(d)


def test_unclosed_nerve_is_reported():
    c = BigradedComplex("c", {(0, 0): 1})
    d = CoverDiagram((0, 1), [(0,), (0, 1)], {(0,): c, (0, 1): c}, {((0,), (0, 1)): ChainMap.identity(c)})
    assert any("nerve not closed" in i for i in d.issues)


def test_relative_with_empty_u1_is_shifted_negated_u01():
    c = random_complex(8)
    empty = BigradedComplex("e", {})
    d = two_set(c, empty, c, ChainMap.identity(c), ChainMap.zero(empty, c))
    rel = relative_complex(d, 0)
    assert rel.dims == {Bidegree(b.p, b.q + 1): n for b, n in c.dims.items()}
    for b in c.dims:
        assert rel.d(b.p, b.q + 1) == -c.d(*b)


@pytest.mark.parametrize("seed", range(5))
def test_relative_of_iso_restriction_is_acyclic(seed):
    d = random_iso_diagram(seed)
    rel = relative_complex(d, 0)
    assert all(cohomology(rel, *b).dim == 0 for b in rel.dims)


@pytest.mark.parametrize("n", [1, 2])
def test_torus_relative_matches_cone(n):
    d = constant_diagram(torus_model(n).complex)
    rel = relative_complex(d, 0)
    shifted = reindex(cone(d.restriction((1,), (0, 1))), 0, 1)
    for b in set(rel.dims) | set(shifted.dims):
        assert cohomology(rel, *b).dim == cohomology(shifted, *b).dim


def test_relative_rejects_three_sets():
    d = constant_diagram(torus_model(1).complex, (0, 1, 2))
    with pytest.raises(UnsupportedRelativeError):
        relative_complex(d, 0)
    with pytest.raises(UnsupportedRelativeError):
        ses_of_pair(d, 0)


def test_ses_with_empty_overlap_is_split():
    a, b = random_complex(1), random_complex(2)
    empty = BigradedComplex("e", {})
    d = two_set(a, b, empty, ChainMap.zero(a, empty), ChainMap.zero(b, empty))
    s = ses_of_pair(d, 0)
    assert s.issues == []
    for bd in set(a.dims) | set(b.dims):
        assert s.mid.dim(*bd) == a.dim(*bd) + b.dim(*bd)
        assert s.mid.d(*bd) == SparseMatrix.block_diag([a.d(*bd), b.d(*bd)])


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_random_diagram_properties(seed):
    d = random_valid_diagram(seed)
    assert d.issues == []
    assert random_valid_diagram(seed).total.dims == d.total.dims
    tot = d.total
    for p, q in tot.dims:
        assert (tot.d(p, q + 1) @ tot.d(p, q)).is_zero()
        assert cohomology(tot, p, q).dim == sympy_h(tot, p, q)
    s = ses_of_pair(d, 0)
    assert s.issues == []
    for bd in s.bidegrees():
        assert s.mid.dim(*bd) == s.sub.dim(*bd) + s.quot.dim(*bd)


def test_random_diagram_respects_bounds():
    bounds = RandomBounds(3, 3, 4)
    for seed in range(20):
        d = random_valid_diagram(seed, bounds)
        for c in d.complex_at.values():
            assert c.total_dim() <= 4
            assert all(0 <= b.p < 3 and 0 <= b.q < 3 for b in c.dims)


def _class_matches(d, x, eta):
    """``can(η) - x`` is D̄-exact in the total complex."""
    p, q = x.p, x.q
    diff = tuple(u - v for u, v in zip(canonical_map(d).block(p, q).apply(eta), x.to_vector(d)))
    return cohomology(d.total, p, q).is_zero_class(diff)


def test_glue_constant_element():
    m = torus_model(2)
    for b in m.complex.dims:
        for eta in kernel_basis(m.complex.d(*b)).basis:
            x = CechElement(*b, {(0,): eta, (1,): eta})
            assert glue_global(m, x) == eta


def test_glue_with_rho0_one_returns_xi0():
    m = torus_model(1, c=1)
    d = constant_diagram(m.complex)
    for b in m.complex.dims:
        for v in kernel_basis(d.total.d(*b)).basis:
            x = CechElement.from_vector(d, *b, v)
            assert glue_global(m, x) == x.components[(0,)]


@pytest.mark.parametrize("model", [
    torus_model(2, c="1/3"),
    tensor_models(torus_model(1), interval_model("1/4")),
    tensor_models(torus_model(2), interval_model("-2")),
], ids=["torus2", "torus1xinterval", "torus2xinterval"])
def test_glue_matches_cover_isomorphism(model):
    d = constant_diagram(model.complex)
    for b in d.total.dims:
        for v in kernel_basis(d.total.d(*b)).basis:
            x = CechElement.from_vector(d, *b, v)
            eta = glue_global(model, x)
            assert not any(model.d(b, eta))
            assert _class_matches(d, x, eta)


def test_glue_uses_the_derivative_of_the_partition():
    """With a nonconstant partition the ∂̄ρ0 ∧ ξ01 term is needed."""
    m = tensor_models(torus_model(1), interval_model())
    d = constant_diagram(m.complex)
    hit = False
    for b in d.total.dims:
        for v in kernel_basis(d.total.d(*b)).basis:
            x = CechElement.from_vector(d, *b, v)
            xi01 = x.components[(0, 1)]
            if any(xi01) and any(m.wedge((0, 1), m.d((0, 0), m.partition[0]), (b.p, b.q - 1), xi01)):
                hit = True
    assert hit


def test_glue_errors():
    m = torus_model(1)
    bare = type(m)(m.name, m.complex, m.products, m.unit)
    x = CechElement(0, 0, {(0,): (ZERO,), (1,): (ZERO,)})
    with pytest.raises(CechDolbeaultError, match="partition"):
        glue_global(bare, x)
    one = torus_model(1).unit
    with pytest.raises(CechDolbeaultError, match="not D̄-closed"):
        glue_global(m, CechElement(0, 0, {(0,): one}))
