import pytest
from hypothesis import given, settings, strategies as st

from cechdolbeault.cech import ses_of_pair
from cechdolbeault.complexes import BigradedComplex, ChainMap, cohomology
from cechdolbeault.errors import ShapeError, ZigzagError
from cechdolbeault.linalg import SparseMatrix, rank
from cechdolbeault.models import random_complex, random_valid_diagram
from cechdolbeault.sequences import ShortExactSequence, assemble_les, compare_les, connecting_map

seeds = st.integers(0, 10 ** 6)


def split_ses(a: BigradedComplex, b: BigradedComplex) -> ShortExactSequence:
    keys = sorted(set(a.dims) | set(b.dims))
    mid = BigradedComplex("mid", {k: a.dim(*k) + b.dim(*k) for k in keys},
                          {k: SparseMatrix.block_diag([a.d(*k), b.d(*k)]) for k in keys})
    incl = {k: SparseMatrix.block([[SparseMatrix.identity(a.dim(*k))], [None]],
                                  [a.dim(*k), b.dim(*k)], [a.dim(*k)]) for k in keys}
    proj = {k: SparseMatrix.block([[None, SparseMatrix.identity(b.dim(*k))]],
                                  [b.dim(*k)], [a.dim(*k), b.dim(*k)]) for k in keys}
    return ShortExactSequence(a, mid, b, ChainMap(a, mid, incl), ChainMap(mid, b, proj))


def two_step() -> ShortExactSequence:
    """sub = F in (0,1), quot = F in (0,0), mid = F -id-> F."""
    sub = BigradedComplex("sub", {(0, 1): 1})
    quot = BigradedComplex("quot", {(0, 0): 1})
    mid = BigradedComplex("mid", {(0, 0): 1, (0, 1): 1}, {(0, 0): SparseMatrix.identity(1)})
    incl = ChainMap(sub, mid, {(0, 1): SparseMatrix.identity(1)})
    proj = ChainMap(mid, quot, {(0, 0): SparseMatrix.identity(1)})
    return ShortExactSequence(sub, mid, quot, incl, proj)


def test_split_connecting_map_vanishes():
    s = split_ses(random_complex(3), random_complex(4))
    assert s.issues == []
    for p, q in s.bidegrees():
        assert connecting_map(s, p, q + 1).is_zero()


def test_acyclic_sub_connecting_map_vanishes():
    sub = BigradedComplex("a", {(0, 0): 1, (0, 1): 1}, {(0, 0): SparseMatrix.identity(1)})
    s = split_ses(sub, random_complex(9))
    for p, q in s.bidegrees():
        assert connecting_map(s, p, q + 1).rows == 0


def test_two_step_connecting_map_is_iso():
    s = two_step()
    assert s.issues == []
    delta = connecting_map(s, 0, 1)
    assert delta.shape == (1, 1) and rank(delta) == 1


def test_acyclic_mid_les():
    s = two_step()
    les = assemble_les(s, 0)
    assert les.all_exact
    assert all(cohomology(s.mid, *b).dim == 0 for b in s.mid.dims)
    deltas = [m for k, m in enumerate(les.maps) if k % 3 == 2]
    assert any(m.shape == (1, 1) and rank(m) == 1 for m in deltas)


def test_split_les_is_exact():
    s = split_ses(random_complex(5), random_complex(6))
    for p in s.mid.ps:
        les = assemble_les(s, p)
        assert les.all_exact
        assert all(m.is_zero() for k, m in enumerate(les.maps) if k % 3 == 2)


def test_les_boundary_nodes_are_zero():
    s = ses_of_pair(random_valid_diagram(2), 0)
    for p in s.mid.ps:
        les = assemble_les(s, p)
        assert les.nodes[0].dim == les.nodes[-1].dim == 0


def test_non_exact_sequence_raises():
    a = BigradedComplex("a", {(0, 0): 1})
    bad = ShortExactSequence(a, a, a, ChainMap.identity(a), ChainMap.identity(a))
    assert bad.issues
    with pytest.raises(ZigzagError):
        connecting_map(bad, 0, 1)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_les_of_pair_is_exact(seed):
    d = random_valid_diagram(seed)
    s = ses_of_pair(d, 0)
    for p in d.piece_ps():
        les = assemble_les(s, p)
        assert les.all_exact
        assert all(les.composites_zero)
        for node in les.nodes:
            assert node.incoming_rank == node.dim - node.outgoing_rank


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_connecting_map_independent_of_lift(seed):
    d = random_valid_diagram(seed)
    s = ses_of_pair(d, 0)
    for p, q in s.bidegrees():
        assert connecting_map(s, p, q + 1, "low") == connecting_map(s, p, q + 1, "high")


def test_compare_identity_ladder():
    s = ses_of_pair(random_valid_diagram(7), 0)
    p = s.mid.ps[0]
    les = assemble_les(s, p)
    ladder = compare_les(les, les, [SparseMatrix.identity(n.dim) for n in les.nodes])
    assert ladder.all_commute and all(ladder.vertical_iso) and ladder.five_lemma_confirmed


def test_compare_zero_ladder_on_nonzero_groups():
    s = split_ses(random_complex(3), random_complex(4))
    p = s.mid.ps[0]
    les = assemble_les(s, p)
    zeros = [SparseMatrix.zeros(n.dim, n.dim) for n in les.nodes]
    ladder = compare_les(les, les, zeros)
    assert ladder.all_commute
    for k, n in enumerate(les.nodes):
        assert ladder.vertical_iso[k] == (n.dim == 0)
    assert all(not mid for k, flanks, mid in ladder.five_lemma if les.nodes[k].dim)


def test_compare_shape_mismatch():
    les = assemble_les(two_step(), 0)
    with pytest.raises(ShapeError):
        compare_les(les, les, [])
    with pytest.raises(ShapeError):
        compare_les(les, les, [SparseMatrix.zeros(1, 1)] * len(les.nodes))


def test_report_serialises():
    les = assemble_les(two_step(), 0)
    doc = les.to_dict()
    assert doc["all_exact"] and len(doc["nodes"]) == len(les.nodes)
    assert "exact" in les.text()
