import pytest

from dgcyclic.linalg import Field, QQ
from dgcyclic.dga import builtin, builtin_witness
from dgcyclic.hochschild import (
    hh_via_witness, mixed_complex, zero_mixed_complex,
)
from dgcyclic.cyclic import (
    CyclicError, degeneration_verdict, hc_dims, hdr_pages, hp_dims,
    hp_via_localization, sbi_report, tau_truncate, usable_truncation,
)

F3 = Field.prime(3)
F5 = Field.prime(5)
F7 = Field.prime(7)


def test_usable_truncation_degree_zero_algebra():
    M = mixed_complex(builtin("dual_numbers", F5), 6)
    assert usable_truncation(M) == 5


def test_tau_truncation_is_mixed_complex():
    M = mixed_complex(builtin("dual_numbers", F5), 6)
    D = tau_truncate(M, 5)
    assert D.verify_relations().passed
    assert max(D.chains.degrees()) <= 5
    # homology of the truncation is the true HH in every kept degree
    h = D.chains.homology_dims()
    assert [h.get(m, 0) for m in range(6)] == [2, 1, 1, 1, 1, 1]


def test_tau_truncation_guards():
    M = mixed_complex(builtin("dual_numbers", F5), 6)
    with pytest.raises(CyclicError):
        tau_truncate(M, 6)  # B out of degree 5 would need simplicial degree 6 columns


def test_hc_ground_field():
    M = mixed_complex(builtin("ground_field", QQ), 8)
    res = hc_dims(M)
    assert len(res.reliable_range) >= 7 and res.reliable_range[0] == 0
    for m in res.reliable_range:
        assert res.dims[m] == (1 if m % 2 == 0 else 0)


def test_hc_product_of_fields():
    M = mixed_complex(builtin("product_of_fields", F7, 2), 8)
    res = hc_dims(M)
    assert len(res.reliable_range) >= 6
    for m in res.reliable_range:
        assert res.dims[m] == (2 if m % 2 == 0 else 0)


def test_hc_zero():
    assert hc_dims(zero_mixed_complex(F5)).dims == {}


@pytest.mark.parametrize("name,n,field,expected", [
    ("ground_field", None, QQ, (1, 0)),
    ("ground_field", None, F5, (1, 0)),
    ("product_of_fields", 2, F5, (2, 0)),
    ("upper_triangular", 2, F7, (2, 0)),
    ("matrix_algebra", 2, F3, (1, 0)),
])
def test_hp_dims_stable_cases(name, n, field, expected):
    M = mixed_complex(builtin(name, field, n), 5 if name == "matrix_algebra" else 8)
    res = hp_dims(M)
    assert res.stable, res.windows
    assert res.hp == expected
    assert res.periodic


def test_hp_dims_zero():
    res = hp_dims(zero_mixed_complex(F5))
    assert res.stable and res.hp == (0, 0)


def test_hp_dual_numbers_inconclusive():
    M = mixed_complex(builtin("dual_numbers", QQ), 8)
    res = hp_dims(M)
    assert not res.stable
    # the two windows disagree by exactly the edge class
    vals = sorted(res.windows.values())
    assert vals == [(1, 0), (2, 0)]


@pytest.mark.parametrize("name,n,field,expected", [
    ("ground_field", None, QQ, (1, 0)),
    ("matrix_algebra", 2, F3, (1, 0)),
    ("product_of_fields", 2, F5, (2, 0)),
])
def test_hp_via_localization(name, n, field, expected):
    M = mixed_complex(builtin(name, field, n), 5 if name == "matrix_algebra" else 8)
    res = hp_via_localization(M)
    assert res.stable
    assert res.hp == expected


def test_hp_localization_zero():
    res = hp_via_localization(zero_mixed_complex(F3))
    assert res.stable and res.hp == (0, 0)


def test_hp_consistency_where_both_stabilize():
    for (name, n, field) in [("ground_field", None, F5),
                             ("product_of_fields", 2, F5),
                             ("matrix_algebra", 2, F3),
                             ("upper_triangular", 2, F7)]:
        M = mixed_complex(builtin(name, field, n), 5 if name == "matrix_algebra" else 8)
        a, b = hp_dims(M), hp_via_localization(M)
        if a.stable and b.stable:
            assert a.hp == b.hp, (name, a.hp, b.hp)


def test_parity_euler_characteristic():
    # HP0 - HP1 = Σ (-1)^n dim HH_n for algebras with finite total HH
    for (name, n, field) in [("ground_field", None, F5),
                             ("product_of_fields", 2, F5),
                             ("matrix_algebra", 2, F3),
                             ("upper_triangular", 2, F7)]:
        A = builtin(name, field, n)
        exact = hh_via_witness(A, builtin_witness(A))
        M = mixed_complex(A, 5 if name == "matrix_algebra" else 8)
        res = hp_dims(M)
        assert res.stable
        assert res.hp[0] - res.hp[1] == sum((-1) ** m * v for m, v in exact.items())


def test_hdr_pages_ground_field_all_zero():
    M = mixed_complex(builtin("ground_field", QQ), 8)
    data = hdr_pages(M, r_max=3)
    assert data.first_nonzero is None
    for page in data.pages:
        assert page.degenerate_within_reliable
        assert all(v == 0 for v in page.d_ranks.values())


def test_hdr_pages_dual_numbers_witness():
    M = mixed_complex(builtin("dual_numbers", QQ), 8)
    data = hdr_pages(M, r_max=2)
    assert data.first_nonzero is not None
    (r, p, n, rk) = data.first_nonzero
    assert r <= 2 and rk >= 1
    assert data.witness_matrix is not None and not data.witness_matrix.is_zero()


def test_hdr_pages_separable_constant():
    M = mixed_complex(builtin("product_of_fields", F5, 2), 8)
    data = hdr_pages(M, r_max=3)
    assert data.first_nonzero is None
    first, last = data.pages[0], data.pages[-1]
    for s in last.reliable & first.reliable:
        assert first.dims.get(s, 0) == last.dims.get(s, 0)


def test_page_dims_consistency():
    # dims of E_{r+1} equal homology dims of (E_r, d_r) in reliable spots
    M = mixed_complex(builtin("dual_numbers", QQ), 8)
    data = hdr_pages(M, r_max=3)
    for r_idx in range(len(data.pages) - 1):
        cur, nxt = data.pages[r_idx], data.pages[r_idx + 1]
        for (p, n) in nxt.reliable:
            if (p, n) not in cur.reliable or (p + cur.r, n + 1) not in cur.dims:
                continue
            incoming = cur.d_ranks.get((p + cur.r, n + 1), 0)
            expected = cur.dims.get((p, n), 0) - cur.d_ranks.get((p, n), 0) - incoming
            assert nxt.dims.get((p, n), 0) == expected, (cur.r, p, n)


def test_degeneration_verdicts():
    A = builtin("product_of_fields", F5, 2)
    M = mixed_complex(A, 8)
    v = degeneration_verdict(M, exact_hh=hh_via_witness(A, builtin_witness(A)))
    assert v.verdict == "Degenerate"

    B = builtin("dual_numbers", QQ)
    vb = degeneration_verdict(mixed_complex(B, 8))
    assert vb.verdict == "NonDegenerate"
    assert vb.evidence["witness"]["rank"] >= 1

    G = builtin("ground_field", QQ)
    vg = degeneration_verdict(mixed_complex(G, 8),
                              exact_hh=hh_via_witness(G, builtin_witness(G)))
    assert vg.verdict == "Degenerate"


def test_degeneration_inconclusive_without_certificate():
    A = builtin("product_of_fields", F5, 2)
    v = degeneration_verdict(mixed_complex(A, 8), exact_hh=None)
    assert v.verdict == "Inconclusive"


def test_verdict_soundness_never_both():
    for (name, n, field) in [("ground_field", None, QQ),
                             ("dual_numbers", None, QQ),
                             ("product_of_fields", 2, F5),
                             ("upper_triangular", 2, F7)]:
        A = builtin(name, field, n)
        M = mixed_complex(A, 8)
        wit = builtin_witness(A)
        exact = hh_via_witness(A, wit) if wit else None
        v = degeneration_verdict(M, exact_hh=exact)
        if v.verdict == "NonDegenerate":
            assert "witness" in v.evidence
        if v.verdict == "Degenerate":
            assert v.evidence.get("page_dims_match")


def test_sbi_rank_identities():
    for (name, n, field) in [("dual_numbers", None, F5),
                             ("product_of_fields", 2, F7),
                             ("ground_field", None, QQ)]:
        M = mixed_complex(builtin(name, field, n), 7)
        rep = sbi_report(M)
        assert rep.passed, (name, rep.identities)
