import random

import pytest
from hypothesis import given, settings, strategies as st

from dgcyclic.linalg import Field, QQ, SparseMatrix, rank, image_basis
from dgcyclic.complexes import (
    Bicomplex, ChainComplex, ChainMap, ComplexError, GradedSpace,
    HomologyBasis, cone, direct_sum, induced_map_on_homology, quotient_complex,
    shift, single_space, tensor, total_complex, zero_complex,
)

F2 = Field.prime(2)
F5 = Field.prime(5)


def complex_from_dense(field, dims, diffs):
    """dims: {degree: dim}; diffs: {degree: dense rows for d_n}."""
    space = GradedSpace(field, dims)
    diff = {n: SparseMatrix.from_dense(field, rows) for n, rows in diffs.items()}
    return ChainComplex(space, diff)


def test_dd_validation():
    with pytest.raises(ComplexError):
        complex_from_dense(QQ, {0: 1, 1: 1, 2: 1},
                           {1: [[1]], 2: [[1]]})
    c = complex_from_dense(QQ, {0: 1, 1: 1, 2: 1}, {1: [[1]], 2: [[0]]})
    assert c.homology_dims() == {2: 1}


def test_homology_examples():
    acyclic = complex_from_dense(QQ, {0: 1, 1: 1}, {1: [[1]]})
    assert acyclic.homology_dims() == {}
    lazy = complex_from_dense(F5, {0: 2, 1: 3}, {})
    assert lazy.homology_dims() == {0: 2, 1: 3}
    two = complex_from_dense(QQ, {0: 1, 1: 1, 2: 1}, {1: [[2]], 2: [[0]]})
    assert two.homology_dims() == {2: 1}


def test_shift():
    c = complex_from_dense(QQ, {0: 1, 1: 2}, {1: [[1, 1]]})
    assert shift(c, 0) == c
    assert shift(shift(c, 1), -1) == c
    s = shift(single_space(QQ, 0), 3)
    assert s.space.dims == {3: 1}
    odd = shift(c, 1)
    assert odd.differential(2).entries()[0][2] == QQ.of(-1)


def test_cone_of_identity_acyclic():
    c = complex_from_dense(QQ, {0: 2, 1: 1}, {1: [[1], [2]]})
    idm = ChainMap(c, c, {n: SparseMatrix.identity(QQ, c.dim(n)) for n in c.degrees()})
    assert cone(idm).homology_dims() == {}


def test_cone_of_zero_splits():
    c = complex_from_dense(QQ, {0: 1, 1: 1}, {})
    d = complex_from_dense(QQ, {0: 2}, {})
    z = ChainMap(c, d, {})
    cz = cone(z)
    hd = cz.homology_dims()
    sums = direct_sum(d, shift(c, 1))
    assert hd == sums.homology_dims()


def test_cone_multiplication_by_two():
    c = single_space(QQ)
    f = ChainMap(c, c, {0: SparseMatrix.from_dense(QQ, [[2]])})
    assert cone(f).homology_dims() == {}
    c2 = single_space(F2)
    f2 = ChainMap(c2, c2, {0: SparseMatrix.zero(F2, 1, 1)})
    assert cone(f2).homology_dims() == {0: 1, 1: 1}


def test_tensor_unit_and_dims():
    c = complex_from_dense(QQ, {0: 2, 1: 1}, {1: [[1], [0]]})
    unit = single_space(QQ)
    t = tensor(c, unit)
    assert t.space.dims == c.space.dims
    assert t.homology_dims() == c.homology_dims()
    d = complex_from_dense(QQ, {0: 1, 2: 3}, {})
    td = tensor(c, d)
    for n in td.degrees():
        expected = sum(c.dim(i) * d.dim(n - i) for i in c.degrees())
        assert td.dim(n) == expected
    k1 = shift(single_space(QQ), 1)
    sq = tensor(k1, k1)
    assert sq.space.dims == {2: 1}
    assert not sq.diff


def random_elementary_complex(field, rng, max_total_dim=6, degrees=(-1, 3)):
    """Direct sums of points and identity intervals, conjugated at random."""
    dims = {}
    pieces = []
    budget = rng.randint(0, max_total_dim)
    while budget > 0:
        d = rng.randint(degrees[0], degrees[1])
        if budget >= 2 and rng.random() < 0.5:
            pieces.append(("interval", d))
            budget -= 2
        else:
            pieces.append(("point", d))
            budget -= 1
    c = zero_complex(field)
    for kind, d in pieces:
        if kind == "point":
            c = direct_sum(c, single_space(field, d))
        else:
            piece = complex_from_dense(field, {d: 1, d - 1: 1}, {d: [[1]]})
            c = direct_sum(c, piece)
    # conjugate by random invertible maps degreewise
    changes = {}
    for n in c.degrees():
        dim = c.dim(n)
        while True:
            m = SparseMatrix.from_dense(field, [[field.of(rng.randrange(field.char) if field.char else rng.randint(-2, 2))
                                                 for _ in range(dim)] for _ in range(dim)])
            if rank(m) == dim:
                changes[n] = m
                break
    from dgcyclic.linalg import inverse
    diff = {}
    for n in c.degrees():
        if c.dim(n) and c.dim(n - 1):
            m = changes[n - 1] @ c.differential(n) @ inverse(changes[n])
            if not m.is_zero():
                diff[n] = m
    return ChainComplex(c.space, diff)


@pytest.mark.parametrize("seed", range(8))
def test_euler_characteristic_matches_homology(seed):
    rng = random.Random(seed)
    field = rng.choice([QQ, F5])
    c = random_elementary_complex(field, rng)
    h = c.homology_dims()
    assert sum((-1) ** n * d for n, d in h.items()) == c.euler_characteristic()


@pytest.mark.parametrize("seed", range(6))
def test_kunneth_over_field(seed):
    rng = random.Random(1000 + seed)
    field = rng.choice([QQ, F2, F5])
    c = random_elementary_complex(field, rng, max_total_dim=6)
    d = random_elementary_complex(field, rng, max_total_dim=6)
    hc, hd = c.homology_dims(), d.homology_dims()
    expected = {}
    for i, a in hc.items():
        for j, b in hd.items():
            expected[i + j] = expected.get(i + j, 0) + a * b
    assert tensor(c, d).homology_dims() == expected


@pytest.mark.parametrize("seed", range(6))
def test_cone_long_exact_sequence_ranks(seed):
    # dim H_n(cone) = (dim H_n(D) - rank Hf_n) + (dim H_{n-1}(C) - rank Hf_{n-1})
    rng = random.Random(2000 + seed)
    field = rng.choice([QQ, F5])
    c = random_elementary_complex(field, rng, max_total_dim=5)
    # f = alpha * id + d h + h d is always a chain map
    alpha = field.of(rng.randint(-2, 2))
    h = {n: SparseMatrix.from_dense(field,
                                    [[field.of(rng.randint(-2, 2)) for _ in range(c.dim(n))]
                                     for _ in range(c.dim(n + 1))])
         for n in c.degrees()}
    comps = {}
    for n in c.degrees():
        m = SparseMatrix.identity(field, c.dim(n)).scale(alpha)
        hn = h.get(n)
        if hn is not None and hn.nrows:
            m = m + c.differential(n + 1) @ hn
        hm = h.get(n - 1)
        if hm is not None and hm.nrows:
            m = m + hm @ c.differential(n)
        comps[n] = m
    f = ChainMap(c, c, comps)
    cf = cone(f)
    hcone = cf.homology_dims()
    hb = {n: HomologyBasis(c, n) for n in c.degrees()}
    for n in set(list(hcone) + [d + 1 for d in c.degrees()] + list(c.degrees())):
        hn = hb.get(n) or HomologyBasis(c, n)
        hn1 = hb.get(n - 1) or HomologyBasis(c, n - 1)
        rk_n = rank(induced_map_on_homology(f.component(n), hn, hn)) if hn.dim else 0
        rk_n1 = rank(induced_map_on_homology(f.component(n - 1), hn1, hn1)) if hn1.dim else 0
        expected = (hn.dim - rk_n) + (hn1.dim - rk_n1)
        assert hcone.get(n, 0) == expected


def test_total_complex_single_column():
    b = Bicomplex(QQ, {(0, 0): 1, (0, 1): 1},
                  {}, {(0, 1): SparseMatrix.from_dense(QQ, [[3]])})
    t = total_complex(b)
    assert t.space.dims == {0: 1, 1: 1}
    assert t.homology_dims() == {}


def test_total_complex_two_columns_identity():
    b = Bicomplex(QQ, {(0, 0): 1, (1, 0): 1},
                  {(1, 0): SparseMatrix.from_dense(QQ, [[1]])}, {})
    assert total_complex(b).homology_dims() == {}


def test_total_complex_antidiagonal_dims():
    dims = {(0, 0): 2, (1, 0): 1, (0, 1): 3, (1, 1): 1}
    b = Bicomplex(F5, dims, {}, {})
    t = total_complex(b)
    assert t.dim(0) == 2 and t.dim(1) == 4 and t.dim(2) == 1


def test_bicomplex_anticommutation_enforced():
    one = SparseMatrix.from_dense(QQ, [[1]])
    with pytest.raises(ComplexError):
        Bicomplex(QQ, {(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1},
                  {(1, 0): one, (1, 1): one},
                  {(0, 1): one, (1, 1): one})


def test_quotient_complex():
    c = complex_from_dense(QQ, {0: 2, 1: 2}, {1: [[1, 0], [0, 0]]})
    sub = {1: SparseMatrix.from_dense(QQ, [[1], [0]]),
           0: SparseMatrix.from_dense(QQ, [[1], [0]])}
    q, projs, sects = quotient_complex(c, sub)
    assert q.dim(0) == 1 and q.dim(1) == 1
    assert q.homology_dims() == {0: 1, 1: 1}
    bad = {1: SparseMatrix.from_dense(QQ, [[1], [0]])}
    with pytest.raises(ComplexError):
        quotient_complex(c, bad)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_homology_basis_roundtrip(seed):
    rng = random.Random(seed)
    field = rng.choice([QQ, F5])
    c = random_elementary_complex(field, rng, max_total_dim=5)
    for n in c.degrees():
        hb = HomologyBasis(c, n)
        assert hb.dim == c.homology_dims().get(n, 0)
        if hb.dim:
            reps = hb.representative(SparseMatrix.identity(field, hb.dim))
            assert (c.differential(n) @ reps).is_zero()
            assert hb.class_of(reps) == SparseMatrix.identity(field, hb.dim)
