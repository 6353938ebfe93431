import json
import math
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from torsionkit.certify import (
    THEOREMS,
    Certificate,
    CIQuery,
    bound_B,
    certify_ci,
    certify_grassmannian,
    certify_product,
    closed_form_2bound,
    fano_index,
    floor_binomial_sum,
    grass_bound,
    identity_suite,
    invertible,
    log_form_holds,
    rojtman_upper_bound,
)
from torsionkit.errors import InputError


def oracle_B(n, m):
    """2^n - m plus floor(|S|/m) over proper subsets S of an n-set."""
    extra = sum(len(S) // m for k in range(n) for S in combinations(range(n), k))
    return 2**n + extra - m


def oracle_main(degrees, D, m, char):
    """Smallest witness n of the n-search theorem, or None."""
    ds = [d for d in degrees if d > 1]
    if not ds or D < 4 or (char and m % char == 0):
        return None
    r = D + len(degrees) + 1 - sum(degrees)
    for n in range(2, max(ds) - m + 1):
        if r <= oracle_B(n, m):
            return n
    return None


# ---------------------------------------------------------------------------
# bounds


@pytest.mark.parametrize("degs, D, r", [((4,), 4, 2), ((4,), 5, 3), ((2, 3), 4, 2), ((7,), 3, -2)])
def test_fano_index(degs, D, r):
    assert fano_index(degs, D) == r


@pytest.mark.parametrize("n, m, value", [(2, 2, 2), (4, 2, 24), (3, 2, 9), (5, 7, 25)])
def test_bound_B_examples(n, m, value):
    assert bound_B(n, m) == value


@pytest.mark.parametrize("n", range(2, 13))
def test_bound_B_matches_subset_enumeration(n):
    for m in range(2, 6):
        assert bound_B(n, m) == oracle_B(n, m)
        if m > n - 1:
            assert bound_B(n, m) == 2**n - m


def test_bound_B_rejects_small_arguments():
    with pytest.raises(InputError):
        bound_B(1, 2)


def test_bound_B_monotone():
    for n in range(2, 21):
        for m in range(2, 9):
            assert bound_B(n + 1, m) >= bound_B(n, m)
            assert bound_B(n, m + 1) <= bound_B(n, m)


def test_bound_B_big_integers():
    assert bound_B(200, 2) == 2**200 + floor_binomial_sum(200, 2) - 2
    assert bound_B(200, 2) > 2**200


@pytest.mark.parametrize("d, value", [(4, 2), (5, 9), (6, 24), (7, 60), (8, 139)])
def test_closed_form_values(d, value):
    assert closed_form_2bound(d) == value
    assert (d + 1) * 2 ** (d - 4) - (d + 2) // 2 == value


@pytest.mark.parametrize("d", range(4, 21))
def test_closed_form_equals_bound_B(d):
    expected = oracle_B(d - 2, 2) if d <= 14 else bound_B(d - 2, 2)
    assert closed_form_2bound(d) == expected


@pytest.mark.parametrize("n", range(2, 21))
def test_floor_sum_identity(n):
    assert floor_binomial_sum(n, 2) == (n - 1) * 2 ** (n - 2) - n // 2
    assert floor_binomial_sum(n, 2) == sum(math.comb(n, j) * (j // 2) for j in range(n))


@pytest.mark.parametrize("degs, value", [((2, 3), 12), ((1,), 1), ((4,), 24), ((5, 5, 2), 28800)])
def test_rojtman_bound(degs, value):
    assert rojtman_upper_bound(degs) == value


@pytest.mark.parametrize("d, r, m, ok", [(4, 2, 2, True), (4, 3, 2, False), (6, 14, 2, True), (6, 15, 2, False)])
def test_log_form(d, r, m, ok):
    assert log_form_holds(d, r, m) is ok


def test_invertible():
    assert invertible(2, 0) and invertible(2, 3) and not invertible(6, 3)


# ---------------------------------------------------------------------------
# complete intersections


def test_quartic_fourfold_low_index():
    c = certify_ci(CIQuery((4,), 4, 2))
    assert c.certified and c.theorem == "CI_LOW_INDEX"
    assert c.fano_index == 2 and c.upper_bound == 24


def test_quartic_fivefold_not_certified():
    c = certify_ci(CIQuery((4,), 5, 2))
    assert not c.certified and c.theorem == "NONE" and c.witness_n is None
    assert c.fano_index == 3 and c.upper_bound == 24
    assert oracle_main((4,), 5, 2, 0) is None


def test_sextic_threshold():
    for r in range(3, 25):
        c = certify_ci(CIQuery((6,), r + 4, 2))
        assert c.certified and c.theorem == "CI_MAIN" and c.witness_n == oracle_main((6,), r + 4, 2, 0)
    assert certify_ci(CIQuery((6,), 28, 2)).witness_n == 4
    assert not certify_ci(CIQuery((6,), 29, 2)).certified


def test_low_index_needs_odd_characteristic():
    assert certify_ci(CIQuery((3, 3), 5, 2, 3)).theorem == "CI_LOW_INDEX"
    c = certify_ci(CIQuery((3, 3), 5, 2, 2))
    assert not c.certified


def test_quartic_threefold_uses_log_form():
    c = certify_ci(CIQuery((4,), 3, 2))
    assert c.certified and c.theorem == "CI_LOG"
    assert any("cited" in note for note in c.caveats)


def test_degree_one_entries_are_dropped():
    a = certify_ci(CIQuery((6, 1), 8, 2))
    b = certify_ci(CIQuery((6,), 8, 2))
    assert a.fano_index == b.fano_index and a.theorem == b.theorem and a.witness_n == b.witness_n
    assert not certify_ci(CIQuery((1, 1), 5, 2)).certified


def test_m_equal_one():
    c = certify_ci(CIQuery((3,), 6, 1))
    assert c.certified and c.witness_n is None


@pytest.mark.parametrize("args", [((0,), 4, 2), ((4,), 0, 2), ((4,), 4, 0), ((4,), 4, 2, 4), ((), 4, 2)])
def test_query_validation(args):
    with pytest.raises(InputError):
        CIQuery(*args)


@given(
    st.lists(st.integers(1, 9), min_size=1, max_size=4),
    st.integers(1, 40),
    st.integers(2, 5),
    st.sampled_from([0, 2, 3, 5]),
)
def test_certify_ci_against_oracle(degs, D, m, char):
    c = certify_ci(CIQuery(tuple(degs), D, m, char))
    r = D + len(degs) + 1 - sum(degs)
    low = m == 2 and char != 2 and D >= 4 and r <= 2 and any(d > 1 for d in degs)
    main = oracle_main(degs, D, m, char)
    quartic3 = sorted(d for d in degs if d > 1) == [4] and D == 3 and m == 2 and r == 2 and char != 2
    assert c.certified == (low or main is not None or quartic3)
    if low:
        assert c.theorem == "CI_LOW_INDEX"
    elif main is not None:
        assert c.theorem == "CI_MAIN" and c.witness_n == main
    assert c.fano_index == r
    assert c.upper_bound == (math.prod(math.factorial(d) for d in degs) if r > 0 else None)


@given(st.lists(st.integers(1, 9), min_size=1, max_size=4), st.integers(1, 40), st.integers(2, 4), st.randoms())
def test_certify_ci_is_permutation_invariant(degs, D, m, rnd):
    shuffled = list(degs)
    rnd.shuffle(shuffled)
    a = certify_ci(CIQuery(tuple(degs), D, m)).to_json()
    b = certify_ci(CIQuery(tuple(shuffled), D, m)).to_json()
    assert a == b


@given(st.integers(4, 16), st.integers(1, 3000), st.integers(2, 5))
def test_log_form_implies_main(d, r, m):
    if d < m + 2 or not log_form_holds(d, r, m):
        return
    n = max(2, math.ceil(math.log2(r + m)))
    assert d >= n + m
    assert r <= 2**n - m <= bound_B(n, m)
    D = r + d - 2
    if D >= 4:
        main = oracle_main((d,), D, m, 0)
        assert main is not None and main <= n
        assert certify_ci(CIQuery((d,), D, m)).certified


# ---------------------------------------------------------------------------
# certificates


def test_certificate_json_schema():
    c = certify_ci(CIQuery((4,), 4, 2))
    js = c.to_json()
    assert set(js) == {"certified", "theorem", "witness_n", "fano_index", "upper_bound", "caveats"}
    assert js["upper_bound"] == "24"
    assert json.loads(json.dumps(js)) == js
    assert any("very general" in note for note in js["caveats"])


def test_certificate_rechecks_inequalities():
    with pytest.raises(AssertionError):
        Certificate(True, "CI_MAIN", 2, 5, None, [], [("r <= bound_B(n, m)", 5, 2)])
    with pytest.raises(AssertionError):
        Certificate(False, "CI_MAIN", None, 5, None, [])
    with pytest.raises(AssertionError):
        Certificate(True, "NONE", None, 5, None, [])


def test_theorem_ids():
    assert set(THEOREMS) == {
        "CI_MAIN",
        "CI_LOG",
        "CI_2TORSION_CLOSED",
        "CI_LOW_INDEX",
        "PRODUCT",
        "PRODUCT_INTRO",
        "GRASS",
        "GRASS_INTRO",
        "NONE",
    }


# ---------------------------------------------------------------------------
# products and Grassmannians


def test_product_examples():
    c = certify_product((4, 2), (4, 3), 2)
    assert c.certified and c.theorem == "PRODUCT" and c.witness_n == 2
    assert not certify_product((3, 2), (4, 3), 2).certified
    assert certify_product((4,), (4,), 2).certified
    assert not certify_product((4, 2), (4, 2), 2).certified
    assert not certify_product((4, 2), (4, 3), 2, characteristic=2).certified


@given(st.integers(4, 40), st.integers(4, 12), st.integers(2, 4))
def test_product_against_oracle(M0, d0, m):
    c = certify_product((M0,), (d0,), m)
    expected = any(
        d0 >= n + m and M0 <= n + 2**n - 1 + sum(len(S) // m for k in range(n) for S in combinations(range(n), k))
        for n in range(2, d0 - m + 1)
    )
    assert c.certified == expected


@pytest.mark.parametrize(
    "l, n, d, m, ok",
    [(2, 4, 4, 2, True), (2, 4, 3, 2, False), (1, 2, 6, 2, False), (2, 5, 4, 2, False), (1, 6, 4, 2, True), (3, 6, 4, 2, False)],
)
def test_grassmannian_examples(l, n, d, m, ok):
    assert certify_grassmannian(l, n, d, m).certified is ok


def test_grassmannian_positive_characteristic():
    c = certify_grassmannian(2, 4, 4, 2, characteristic=5)
    assert not c.certified
    with pytest.raises(InputError):
        certify_grassmannian(3, 2, 4, 2)


@pytest.mark.parametrize("d", range(4, 12))
def test_grassmannian_intro_form_is_implied(d):
    for dim in range(4, (d + 1) * 2 ** (d - 4) + 1):
        c = certify_grassmannian(1, dim + 1, d, 2)
        assert c.certified and c.witness_n <= d - 2
        assert dim <= grass_bound(c.witness_n, 2, d)


# ---------------------------------------------------------------------------
# identities


def test_identity_suite_clean():
    rep = identity_suite(20, 6)
    assert rep.ok and rep.failures == []
    assert rep.checked > 0
    assert json.loads(json.dumps(rep.to_json())) == rep.to_json()
