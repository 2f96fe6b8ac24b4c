import pytest

from dgcyclic.linalg import Field, QQ, SparseMatrix
from dgcyclic.dga import builtin, builtin_witness
from dgcyclic.hochschild import cyclic_module
from dgcyclic.edgewise import (
    EdgewiseError, SubdividedModule, subdivide, subdivided_chains,
    subdivision_quasi_iso_check, tate_totalization_check, _monotone_matrix,
)

F3 = Field.prime(3)
F5 = Field.prime(5)


def test_monotone_matrix_identity_and_faces():
    X = cyclic_module(builtin("dual_numbers", F3), 4)
    ident = _monotone_matrix(X, (0, 1, 2), 2)
    assert ident == SparseMatrix.identity(F3, X.spaces[2].dim)
    face = _monotone_matrix(X, (0, 2), 2)
    assert face == X.face(2, 1)
    degeneracy = _monotone_matrix(X, (0, 0, 1), 1)
    assert degeneracy == X.degeneracy(1, 0)


def test_monotone_matrix_mixed():
    X = cyclic_module(builtin("dual_numbers", F3), 4)
    # f: [2] -> [2], values (0, 0, 2): collapse then skip 1
    m = _monotone_matrix(X, (0, 0, 2), 2)
    manual = X.degeneracy(1, 0) @ X.face(2, 1)
    assert m == manual


def test_subdivide_requires_depth():
    X = cyclic_module(builtin("ground_field", QQ), 3)
    with pytest.raises(EdgewiseError):
        subdivide(X, 3)


def test_subdivision_dims_law():
    A = builtin("dual_numbers", F3)
    X = cyclic_module(A, 8)
    Y = subdivide(X, 3)
    assert Y.n_max == 2
    for n in range(Y.n_max + 1):
        assert Y.space(n).dim == X.spaces[3 * (n + 1) - 1].dim


def test_subdivision_point_algebra():
    X = cyclic_module(builtin("ground_field", QQ), 6)
    Y = subdivide(X, 3)
    for n in range(Y.n_max + 1):
        assert Y.sigma(n) == SparseMatrix.identity(QQ, 1)
    assert Y.verify().passed


def test_subdivision_sigma_relations_dual_numbers():
    A = builtin("dual_numbers", F3)
    Y = subdivide(cyclic_module(A, 8), 3)
    assert Y.space(0).dim == 8
    rep = Y.verify()
    assert rep.passed, rep.summary()


def test_subdivided_chains_shape():
    A = builtin("product_of_fields", F5, 2)
    Y = subdivide(cyclic_module(A, 9), 5)
    chains, _ = subdivided_chains(Y)
    assert chains.dim(0) == 2 ** 5
    assert chains.dim(1) == 2 ** 10


@pytest.mark.parametrize("name,n,field,p,N", [
    ("ground_field", None, QQ, 3, 8),
    ("ground_field", None, F3, 3, 6),
    ("dual_numbers", None, F3, 3, 8),
])
def test_subdivision_quasi_iso(name, n, field, p, N):
    A = builtin(name, field, n)
    X = cyclic_module(A, N)
    check = subdivision_quasi_iso_check(X, p)
    assert check.passed, (check.mutual_range, check.base_dims, check.subdivided_dims)
    assert check.mutual_range, "window must be nonempty"


def test_subdivision_quasi_iso_product_of_fields_f5():
    A = builtin("product_of_fields", F5, 2)
    X = cyclic_module(A, 9)
    check = subdivision_quasi_iso_check(X, 5)
    assert check.mutual_range == [0]
    assert check.base_dims[0] == 2
    assert check.passed


def test_subdivision_reliable_window_dual_numbers():
    A = builtin("dual_numbers", F3)
    check = subdivision_quasi_iso_check(cyclic_module(A, 8), 3)
    assert check.mutual_range == [0, 1]
    assert check.base_dims == {0: 2, 1: 1}
    assert check.passed


def test_tate_totalization_ground_field():
    A = builtin("ground_field", F3)
    rep = tate_totalization_check(A, builtin_witness(A), 3, 6)
    assert rep.passed
    assert all(v == 1 for v in rep.tate_of_total.values())
    assert rep.termwise_then_total == rep.tate_of_total


def test_tate_totalization_guards():
    A = builtin("ground_field", F5)
    with pytest.raises(EdgewiseError):
        tate_totalization_check(A, builtin_witness(A), 3, 6)  # char mismatch
    B = builtin("dual_numbers", F3)
    from dgcyclic.dga import BimoduleResolution, ResolutionGenerator
    fake = BimoduleResolution(B, [[ResolutionGenerator("g")]], [], [{0: 1}])
    with pytest.raises(EdgewiseError):
        tate_totalization_check(B, fake, 3, 6)


def test_tate_totalization_informational_non_smooth():
    B = builtin("dual_numbers", F3)
    rep = tate_totalization_check(B, None, 3, 6)
    assert rep.informational
    assert not rep.smooth_witness_validated
    # both sides are finite models of the same triple complex
    assert rep.termwise_then_total == rep.tate_of_total
