import pytest
from hypothesis import given, settings, strategies as st

from cechdolbeault.cech import CoverDiagram, constant_diagram, relative_complex
from cechdolbeault.complexes import Bidegree, BigradedComplex, ChainMap, cohomology, validate
from cechdolbeault.currents import (PairingData, compare_forms_currents, double_dual_iso, dual_chain_map,
                                    dual_diagram, dualize, form_to_current, pairing_from_model,
                                    relative_current_complex, sign_identity_holds)
from cechdolbeault.dga import DgaModel
from cechdolbeault.errors import PairingSquareError, ShapeError, StokesError
from cechdolbeault.linalg import SparseMatrix, inverse
from cechdolbeault.models import (RandomBounds, model_pairings, model_two_set_diagram, random_chain_map,
                                  random_complex, random_iso_diagram, random_valid_diagram, sum_models,
                                  torus_model)
from cechdolbeault.scalars import Scalar

from conftest import split_torus

seeds = st.integers(0, 10 ** 6)
N = 3  # random pieces live in [0,3] x [0,3]


def test_dualize_zero_differential():
    c = BigradedComplex("z", {(0, 1): 2, (1, 2): 3, (2, 0): 1})
    k = dualize(c, 2).dual
    assert k.dims == {(2, 1): 2, (1, 0): 3, (0, 2): 1}
    assert not k.diff


def test_dualize_torus():
    k = dualize(torus_model(1).complex, 1).dual
    assert k.dims == {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 1}
    assert not k.diff


def test_dualize_sign_by_hand():
    a = Scalar("3/2-i")
    c = BigradedComplex("c", {(1, 0): 1, (1, 1): 1}, {(1, 0): SparseMatrix.from_rows([[a]])})
    k = dualize(c, 1).dual
    assert k.d(0, 0) == SparseMatrix.from_rows([[-a]])


def test_dualize_rejects_outside_support():
    with pytest.raises(ShapeError):
        dualize(BigradedComplex("c", {(0, 3): 1}), 2)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_dual_is_valid_and_signed(seed):
    c = random_complex(seed)
    k = dualize(c, N).dual
    assert validate(k) == []
    assert sign_identity_holds(c, N) == []
    # the pairing identity, written out entrywise
    for p in range(N + 1):
        for q in range(N):
            sign = -1 if (p + q) % 2 == 0 else 1
            assert k.d(p, q) == c.d(N - p, N - q - 1).T.scale(sign)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_double_dual_preserves_cohomology(seed):
    c = random_complex(seed)
    dd = dualize(dualize(c, N).dual, N).dual
    assert dd.dims == c.dims
    iso = double_dual_iso(c, N)
    for b in c.dims:
        assert cohomology(dd, *b).dim == cohomology(c, *b).dim
        assert iso.block(*b).rows == iso.block(*b).cols
    for b in c.dims:
        assert dd.d(*b) == -c.d(*b)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_dual_chain_map_is_chain_map(seed):
    f = random_chain_map(seed)
    assert dual_chain_map(f, N).is_chain_map()


def test_form_to_current_torus_is_iso():
    i = form_to_current(pairing_from_model(torus_model(1)))
    assert i.injective
    for b in i.map.source.dims:
        m = i.map.block(*b)
        assert m.shape == (1, 1) and m[0, 0] in (Scalar(1), Scalar(-1))


def test_zero_pairing():
    c = torus_model(2).complex
    i = form_to_current(PairingData(c, 2, {}))
    assert all(i.map.block(*b).is_zero() for b in c.dims)
    assert not any(i.injective_at.values())


def test_one_degenerate_block():
    pd = pairing_from_model(torus_model(2))
    blocks = dict(pd.pairing)
    blocks[Bidegree(1, 1)] = SparseMatrix.zeros(4, 4)
    i = form_to_current(PairingData(pd.complex, 2, blocks))
    assert [b for b, ok in i.injective_at.items() if not ok] == [Bidegree(1, 1)]


def test_stokes_violation_names_eta():
    c = BigradedComplex("c", {(1, 0): 1, (1, 1): 1, (0, 0): 1, (0, 1): 1},
                        {(1, 0): SparseMatrix.identity(1)})
    m = DgaModel("bad", c, {}, (1,), n=1, integral=(1,))
    with pytest.raises(StokesError, match="basis element 0 of \\(1,0\\)"):
        form_to_current(PairingData(c, 1, {}, m))


def test_pairing_needs_integral():
    m = torus_model(1)
    with pytest.raises(StokesError):
        pairing_from_model(DgaModel(m.name, m.complex, m.products, m.unit))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_torus_pairing_is_stokes_compatible(n):
    i = form_to_current(pairing_from_model(torus_model(n)))
    assert i.map.is_chain_map() and i.injective


def test_relative_current_with_empty_u1():
    c = random_complex(31)
    empty = BigradedComplex("e", {})
    pieces = {(0,): c, (1,): empty, (0, 1): c}
    d = CoverDiagram((0, 1), tuple(pieces), pieces,
                     {((0,), (0, 1)): ChainMap.identity(c), ((1,), (0, 1)): ChainMap.zero(empty, c)},
                     extend={((0,), (0, 1)): ChainMap.identity(c), ((1,), (0, 1)): ChainMap.zero(c, empty)})
    k01 = dualize(c, N).dual
    rel = relative_current_complex(dual_diagram(d, N), 0)
    assert rel.dims == {Bidegree(b.p, b.q + 1): n for b, n in k01.dims.items()}
    for b in k01.dims:
        assert rel.d(b.p, b.q + 1) == -k01.d(*b)


@pytest.mark.parametrize("n", [1, 2])
def test_relative_current_dims_mirror_forms(n):
    d = constant_diagram(torus_model(n).complex)
    rel_a = relative_complex(d, 0)
    rel_k = relative_current_complex(dual_diagram(d, n), 0)
    # A(U1)(p,q) ⊕ A(U01)(p,q-1) against K(U1)(p,q) ⊕ K(U01)(p,q-1) = A(n-p,n-q) ⊕ A(n-p,n-q+1)
    for p in range(n + 1):
        for q in range(n + 2):
            assert rel_k.dim(p, q) == rel_a.dim(n - p, n - q + 1)


@pytest.mark.parametrize("seed", range(5))
def test_relative_current_of_iso_restriction_is_acyclic(seed):
    d = random_iso_diagram(seed)
    r1 = d.restrict[((1,), (0, 1))]
    u0, u01 = d.complex_at[(0,)], d.complex_at[(0, 1)]
    e1 = ChainMap(r1.target, r1.source, {b: inverse(m) for b, m in r1.blocks.items()})
    d = CoverDiagram(d.index_set, d.simplices, d.complex_at, d.restrict,
                     extend={((0,), (0, 1)): ChainMap.zero(u01, u0), ((1,), (0, 1)): e1})
    rel = relative_current_complex(dual_diagram(d, N), 0)
    assert all(cohomology(rel, *b).dim == 0 for b in rel.dims)


@pytest.mark.parametrize("model", [torus_model(1), torus_model(2), torus_model(3),
                                   sum_models([torus_model(1), torus_model(1)])],
                         ids=["t1", "t2", "t3", "t1+t1"])
def test_compare_forms_currents_torus(model):
    d = model_two_set_diagram(model)
    report = compare_forms_currents(d, model_pairings(model, d), 0)
    assert report.all_iso and report.ladders_commute
    assert all(l.five_lemma_confirmed for l in report.ladders.values())
    assert all(les.all_exact for les in report.les_forms.values())
    assert all(les.all_exact for les in report.les_currents.values())


@pytest.mark.parametrize("n", [1, 2])
def test_compare_forms_currents_nonzero_relative_groups(n):
    d, pairs = split_torus(n)
    report = compare_forms_currents(d, pairs, 0)
    rel = relative_complex(d, 0)
    assert sum(cohomology(rel, *b).dim for b in rel.dims) == 4 ** n
    assert report.all_iso and report.ladders_commute
    assert all(l.five_lemma_confirmed for l in report.ladders.values())


def test_compare_forms_currents_degenerate_pairing():
    d, pairs = split_torus(1)
    zero = PairingData(d.complex_at[(1,)], 1, {})
    pairs = {(0,): zero, (1,): zero, (0, 1): pairs[(0, 1)]}
    report = compare_forms_currents(d, pairs, 0)
    assert not report.all_iso
    rel = relative_complex(d, 0)
    for b, ok in report.verdicts.items():
        assert report.kernel_dims[b] == cohomology(rel, *b).dim == 1
        assert not ok


def test_derived_extensions_match_given_ones():
    """Derived extensions and given extensions produce the same dual diagram on the torus."""
    m = torus_model(2)
    d = model_two_set_diagram(m)
    pairs = model_pairings(m, d)
    bare = CoverDiagram(d.index_set, d.simplices, d.complex_at, d.restrict)
    given, derived = dual_diagram(d, 2), dual_diagram(bare, 2, pairs)
    for key, r in given.restrict.items():
        for b in r.source.dims:
            assert r.block(*b) == derived.restrict[key].block(*b)


def test_pairing_square_mismatch():
    m = torus_model(1)
    d = model_two_set_diagram(m)
    pd = pairing_from_model(m)
    pairs = {s: pd for s in d.simplices}
    pairs[(0, 1)] = pd.scaled(2)
    with pytest.raises(PairingSquareError):
        compare_forms_currents(d, pairs, 0)


def test_dual_diagram_of_random_is_valid():
    for seed in range(10):
        d = random_valid_diagram(seed, RandomBounds())
        dd = dual_diagram(d, N)
        assert dd.issues == []
