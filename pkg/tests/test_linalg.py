import pytest
from hypothesis import given, strategies as st

from cechdolbeault.errors import InvalidQuotientError
from cechdolbeault.linalg import (SparseMatrix, Subspace, image_basis, inverse, kernel_basis, quotient_dim,
                                  rank, solve, vec)
from cechdolbeault.scalars import I, ONE, Scalar

from conftest import matrices, sympy_rank

MI = SparseMatrix.from_rows([[1, I], [I, -1]])


def test_rank_examples():
    assert rank(SparseMatrix.zeros(0, 0)) == 0
    assert rank(SparseMatrix.identity(2)) == 2
    assert rank(MI) == 1


def test_kernel_examples():
    assert kernel_basis(SparseMatrix.identity(3)).dim == 0
    assert kernel_basis(SparseMatrix.zeros(2, 3)).dim == 3
    k = kernel_basis(MI)
    assert k.dim == 1
    assert k == Subspace.span([vec(I, -1)], 2)


def test_image_examples():
    assert image_basis(SparseMatrix.zeros(3, 2)).dim == 0
    assert image_basis(SparseMatrix.identity(3)) == Subspace.full(3)
    im = image_basis(SparseMatrix.from_rows([[1], [I]]))
    assert im == Subspace.span([vec(1, I)], 2)


def test_quotient_dim_examples():
    full = Subspace.full(2)
    assert quotient_dim(full, full) == 0
    assert quotient_dim(Subspace(3), Subspace.full(3)) == 3
    assert quotient_dim(Subspace.span([vec(1, 0)], 2), full) == 1


def test_quotient_dim_rejects_non_subspace():
    with pytest.raises(InvalidQuotientError):
        quotient_dim(Subspace.span([vec(1, 1)], 2), Subspace.span([vec(1, 0)], 2))


def test_solve_examples():
    b = vec(1, "1/2", I)
    assert solve(SparseMatrix.identity(3), b) == b
    assert solve(SparseMatrix.zeros(2, 2), vec(1, 0)) is None
    assert solve(SparseMatrix.from_rows([[2]]), vec(1)) == (Scalar("1/2"),)


def test_inverse():
    m = SparseMatrix.from_rows([[1, I], [0, 2]])
    assert m @ inverse(m) == SparseMatrix.identity(2)
    with pytest.raises(ZeroDivisionError):
        inverse(MI)


@given(matrices())
def test_rank_nullity(m):
    assert rank(m) + kernel_basis(m).dim == m.cols


@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == sympy_rank(m)


@given(matrices())
def test_kernel_vectors_are_killed(m):
    k = kernel_basis(m)
    assert k.is_independent()
    for v in k.basis:
        assert not any(m.apply(v))


@given(matrices(), st.data())
def test_image_contains_products(m, data):
    x = data.draw(st.lists(st.sampled_from([0, 1, -1, I, 2]), min_size=m.cols, max_size=m.cols))
    im = image_basis(m)
    assert im.dim == rank(m)
    assert im.contains(m.apply(x))


@given(matrices(), st.data())
def test_solve_whenever_consistent(m, data):
    b = data.draw(st.lists(st.sampled_from([0, 1, I]), min_size=m.rows, max_size=m.rows))
    aug = SparseMatrix.block([[m, SparseMatrix.from_columns([b], m.rows)]], [m.rows], [m.cols, 1])
    consistent = rank(aug) == rank(m)
    for strategy in ("low", "high"):
        x = solve(m, b, strategy)
        assert (x is not None) == consistent
        if x is not None:
            assert m.apply(x) == tuple(Scalar(v) if not isinstance(v, Scalar) else v for v in b)


@given(matrices(), matrices())
def test_matmul_is_associative_with_transpose(a, b):
    if a.cols == b.rows:
        assert (a @ b).T == b.T @ a.T


def test_rows_reject_ragged():
    with pytest.raises(ValueError):
        SparseMatrix.from_rows([[1, 2], [3]])


def test_identity_scale():
    assert SparseMatrix.identity(2, -ONE) == -SparseMatrix.identity(2)
