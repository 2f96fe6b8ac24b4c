import random

import pytest

from dgcyclic.linalg import Field, QQ, SparseMatrix
from dgcyclic.complexes import (
    ChainComplex, ChainMap, GradedSpace, cone, direct_sum, single_space,
)
from dgcyclic.tate import (
    CpAction, GroupDescriptor, TateError, beta_dimension_check,
    cyclic_power_action, fixed_points_dims, free_module_action, quotient_dims,
    tate_dims, tensor_power_complex, trace_triangle_check, trivial_action,
)

F2 = Field.prime(2)
F3 = Field.prime(3)
F5 = Field.prime(5)


def test_group_descriptor():
    g = GroupDescriptor(3)
    assert g.dimension == 0
    with pytest.raises(TateError):
        GroupDescriptor(3, 1)


def test_action_validation():
    C = single_space(F3, 0, 2)
    swap = SparseMatrix.from_dense(F3, [[0, 1], [1, 0]])
    CpAction(C, {0: swap}, 2)
    with pytest.raises(TateError):
        CpAction(C, {0: swap}, 3)   # swap^3 != id


def test_action_must_commute_with_differential():
    C = ChainComplex(GradedSpace(F3, {0: 1, 1: 1}),
                     {1: SparseMatrix.from_dense(F3, [[1]])})
    bad = {1: SparseMatrix.from_dense(F3, [[2]])}
    with pytest.raises(TateError):
        CpAction(C, bad, 3)   # would need sigma_0 = 2 as well


def test_fixed_points_trivial_mod_p():
    for p in (3, 5):
        X = trivial_action(single_space(Field.prime(p)), p)
        res = fixed_points_dims(X, 6)
        assert res.reliable == list(range(-5, 1))
        assert all(res.dims[m] == 1 for m in res.reliable)


def test_fixed_points_free_module():
    X = free_module_action(F3, 3)
    res = fixed_points_dims(X, 6)
    assert res.dims == {m: (1 if m == 0 else 0) for m in res.reliable}


def test_fixed_points_rational_c2():
    X = trivial_action(single_space(QQ), 2)
    res = fixed_points_dims(X, 6)
    assert res.dims == {m: (1 if m == 0 else 0) for m in res.reliable}


def test_quotient_trivial_mod_p():
    X = trivial_action(single_space(F3), 3)
    res = quotient_dims(X, 6)
    assert res.reliable == list(range(0, 6))
    assert all(res.dims[m] == 1 for m in res.reliable)


def test_quotient_free_and_rational():
    assert quotient_dims(free_module_action(F5, 5), 5).dims == {
        m: (1 if m == 0 else 0) for m in range(0, 5)}
    assert quotient_dims(trivial_action(single_space(QQ), 2), 5).dims == {
        m: (1 if m == 0 else 0) for m in range(0, 5)}


@pytest.mark.parametrize("p", [3, 5])
def test_tate_trivial_module(p):
    X = trivial_action(single_space(Field.prime(p)), p)
    res = tate_dims(X)
    assert res.periodic
    assert res.localization_agrees
    assert all(v == 1 for v in res.dims.values())


def test_tate_free_module_vanishes():
    for p in (2, 3, 5):
        res = tate_dims(free_module_action(Field.prime(p), p))
        assert all(v == 0 for v in res.dims.values())
        assert res.periodic


def test_tate_rational_actions_vanish():
    res = tate_dims(trivial_action(single_space(QQ), 3))
    assert all(v == 0 for v in res.dims.values())
    two = ChainComplex(GradedSpace(QQ, {0: 2}), {})
    swap = SparseMatrix.from_dense(QQ, [[0, 1], [1, 0]])
    res = tate_dims(CpAction(two, {0: swap}, 2))
    assert all(v == 0 for v in res.dims.values())


def test_tate_multiplicativity():
    X1 = trivial_action(single_space(F3), 3)
    X2 = trivial_action(single_space(F3, 0, 2), 3)
    t1, t2 = tate_dims(X1), tate_dims(X2)
    for m in range(-2, 3):
        assert t2.dim_at(m) == 2 * t1.dim_at(m)


def test_tate_two_periodicity_on_spread_complex():
    C = ChainComplex(GradedSpace(F3, {-1: 1, 0: 1, 2: 1}), {})
    res = tate_dims(trivial_action(C, 3))
    assert res.periodic
    # trivial action: every degree sees total homology = 3
    assert all(v == 3 for v in res.dims.values())


def test_trace_triangle_free_module():
    rep = trace_triangle_check(free_module_action(F3, 3), 6)
    assert rep.passed
    assert all(v == 0 for v in rep.tate_dims.values())
    assert rep.dimension_shift == 0


def test_trace_triangle_trivial_module():
    rep = trace_triangle_check(trivial_action(single_space(F5), 5), 6)
    assert rep.passed
    assert all(v == 1 for v in rep.tate_dims.values())


def test_trace_triangle_rational():
    rep = trace_triangle_check(trivial_action(single_space(QQ), 2), 5)
    assert rep.passed
    assert all(v == 0 for v in rep.tate_dims.values())


def test_tensor_power_dims():
    C = ChainComplex(GradedSpace(F3, {0: 1, 1: 1}), {})
    P, _ = tensor_power_complex(C, 3)
    assert P.dim(0) == 1 and P.dim(1) == 3 and P.dim(2) == 3 and P.dim(3) == 1


def test_cyclic_power_point():
    X = cyclic_power_action(single_space(F3), 3)
    assert X.sigma[0] == SparseMatrix.identity(F3, 1)


def test_cyclic_power_odd_generator_sign():
    # sign of the 3-cycle on ξ⊗ξ⊗ξ with |ξ| = 1 is +1
    C = single_space(F3, 1)
    X = cyclic_power_action(C, 3)
    assert X.sigma[3] == SparseMatrix.identity(F3, 1)
    # but for p = 2 the rotation on ξ⊗ξ is -1
    D = single_space(QQ, 1)
    Y = cyclic_power_action(D, 2)
    assert Y.sigma[2] == SparseMatrix.from_dense(QQ, [[-1]])


def test_cyclic_power_order_on_two_dim():
    C = ChainComplex(GradedSpace(F3, {0: 1, 1: 1}), {})
    X = cyclic_power_action(C, 3)
    assert sum(X.complex.dim(n) for n in X.complex.degrees()) == 8
    X.validate()


def test_beta_law_point():
    assert beta_dimension_check(single_space(F3), 3).passed


def test_beta_law_two_dim_sum():
    M = direct_sum(single_space(F5), single_space(F5, 1))
    rep = beta_dimension_check(M, 5)
    assert rep.passed and rep.total_homology_dim == 2


def test_beta_law_acyclic():
    C = single_space(F3)
    f = ChainMap(C, C, {0: SparseMatrix.identity(F3, 1)})
    M = cone(f)
    rep = beta_dimension_check(M, 3)
    assert rep.passed and rep.total_homology_dim == 0


def test_beta_law_guards():
    with pytest.raises(TateError):
        beta_dimension_check(single_space(F3), 2)
    with pytest.raises(TateError):
        beta_dimension_check(single_space(F3), 5)


def test_beta_law_seeded_random_complexes():
    from tests.test_complexes import random_elementary_complex
    rng = random.Random(20240)
    for _ in range(6):
        M = random_elementary_complex(F3, rng, max_total_dim=4, degrees=(-1, 2))
        rep = beta_dimension_check(M, 3)
        assert rep.passed, (M.space.dims, rep.failures)
