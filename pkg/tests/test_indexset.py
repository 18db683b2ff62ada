import itertools
import math
from math import comb

import pytest
from hypothesis import assume, given, strategies as st

from anisogrid import InvalidArgumentError, LevelOverflowError
from anisogrid.gauss1d import build_family
from anisogrid.indexset import (
    WeightedIndexSet,
    WeightVector,
    bound_bd,
    bound_loglog,
    bound_sg,
    bound_tp,
    cardinality_X,
    check_go_tail,
    combination_coefficient,
    combination_coefficients,
    cost_bound_sq,
    cost_exact,
    enumerate_X,
    enumerate_Y,
    go_constant,
    max_box_volume,
)


def brute_X(w, q):
    """Box scan with an independent comparison; callers avoid near-ties."""
    ranges = [range(int(q // wn) + 2) for wn in w]
    return sorted(a for a in itertools.product(*ranges) if sum(x * y for x, y in zip(a, w)) <= q + 1e-12)


def near_tie(w, q):
    ranges = [range(int(q // wn) + 3) for wn in w]
    return any(
        abs(sum(x * y for x, y in zip(a, w)) - t) < 1e-9
        for a in itertools.product(*ranges)
        for t in (q, q - sum(w))
    )


def box_size(w, q):
    return math.prod(int(q // wn) + 3 for wn in w)


weights_st = st.lists(st.floats(min_value=0.3, max_value=3.0), min_size=1, max_size=5)
levels_st = st.floats(min_value=0.0, max_value=10.0)


# enumeration

@pytest.mark.parametrize(
    "w,q,expected",
    [([1, 1], 5, 21), ([1, 1, 1], 5, 56), ([1, 2.5], 5, 10), ([1, 2, 3], 5, 16)],
)
def test_cardinality_figures(w, q, expected):
    assert len(enumerate_X(w, q)) == expected
    assert cardinality_X(w, q) == expected


def test_enumerate_X_lexicographic_and_unique():
    X = enumerate_X([1, 2.5], 5)
    assert X == sorted(set(X))


def test_negative_level_rejected():
    with pytest.raises(InvalidArgumentError):
        enumerate_X([1, 1], -1)
    with pytest.raises(InvalidArgumentError):
        enumerate_Y([1, 1], -0.5)


def test_dimension_mismatch_rejected():
    with pytest.raises(InvalidArgumentError):
        enumerate_X([1, 1], 1, m=1)


def test_Y_one_dimensional():
    assert enumerate_Y([1], 1) == [(1,)]


def test_Y_isotropic_level_two():
    assert sorted(enumerate_Y([1, 1], 2)) == sorted([(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)])


def test_Y_anisotropic_excludes_low_indices():
    X = set(enumerate_X([1, 2.5], 5))
    assert set(enumerate_Y([1, 2.5], 5)) == X - {(0, 0), (1, 0)}


def test_huge_nominal_dimension_is_cheap():
    # most of the thousand dimensions are too expensive to activate
    w = [math.log(2 * n * n) for n in range(1, 1001)]
    X = enumerate_X(w, 3.0)
    assert len(X) == cardinality_X(w, 3.0)
    assert all(len(a) == 1000 for a in X)


@given(weights_st, levels_st)
def test_membership_matches_box_scan(w, q):
    assume(box_size(w, q) < 20000)
    assume(not near_tie(w, q))
    # output is in the ascending-weight order of the dimensions
    ws = sorted(w)
    X = enumerate_X(w, q)
    assert X == brute_X(ws, q)
    assert cardinality_X(w, q) == len(X)
    lim = q - sum(ws)
    assert enumerate_Y(w, q) == [a for a in X if sum(x * y for x, y in zip(a, ws)) > lim]


@given(weights_st, levels_st)
def test_downward_closed(w, q):
    assume(box_size(w, q) < 20000)
    X = set(enumerate_X(w, q))
    for a in X:
        for n in range(len(a)):
            if a[n]:
                b = list(a)
                b[n] -= 1
                assert tuple(b) in X


def test_weight_vector_sorts_and_remembers_order():
    w = WeightVector([3.0, 1.0, 2.0])
    assert tuple(w) == (1.0, 2.0, 3.0)
    assert w.permutation == (1, 2, 0)
    assert w.to_original((5, 6, 7)) == (7, 5, 6)


def test_weight_vector_rejects_nonpositive():
    with pytest.raises(InvalidArgumentError):
        WeightVector([1.0, 0.0])


def test_tie_is_included():
    # 0.1 * 3 is not exactly 0.3 in binary
    assert (3,) in enumerate_X([0.1], 0.3)
    assert cardinality_X([0.1], 0.3) == 4


# combination coefficients

def isotropic_coefficient(alpha, q, m):
    k = q - sum(alpha)
    return (-1) ** k * comb(m - 1, k)


def test_isotropic_coefficient_examples():
    assert combination_coefficient((2, 1), [1, 1], 4) == -1
    assert combination_coefficient((4, 0), [1, 1], 4) == 1


@pytest.mark.parametrize("m", [1, 2, 3, 4])
@pytest.mark.parametrize("q", range(0, 9))
def test_isotropic_coefficients_closed_form(q, m):
    for alpha, c in combination_coefficients(1.0, q, m).items():
        assert c == isotropic_coefficient(alpha, q, m)


def test_coefficient_outside_Y_rejected():
    with pytest.raises(InvalidArgumentError):
        combination_coefficient((0, 0), [1, 1], 4)


def full_beta_sum(alpha, w, q):
    total = 0
    for beta in itertools.product((0, 1), repeat=len(alpha)):
        s = sum((a + b) * wn for a, b, wn in zip(alpha, beta, w))
        if s <= q + 1e-12:
            total += (-1) ** sum(beta)
    return total


@given(weights_st, levels_st)
def test_coefficients_match_full_beta_sum(w, q):
    assume(box_size(w, q) < 20000)
    assume(not near_tie(w, q))
    ws = sorted(w)
    coeffs = combination_coefficients(w, q)
    for alpha, c in coeffs.items():
        assert c == full_beta_sum(alpha, ws, q)
    assert sum(coeffs.values()) == 1


@given(weights_st, levels_st)
def test_interior_coefficients_vanish(w, q):
    assume(box_size(w, q) < 20000)
    assume(not near_tie(w, q))
    ws = sorted(w)
    for alpha in enumerate_X(w, q):
        if sum((a + 1) * wn for a, wn in zip(alpha, ws)) <= q:
            assert full_beta_sum(alpha, ws, q) == 0


def test_weighted_index_set_bundle():
    s = WeightedIndexSet.build([1, 2.5], 5)
    assert len(s.members_X) == 10
    assert set(s.members_Y) <= set(s.members_X)
    assert sum(s.coefficients.values()) == 1
    assert s.dim == 2


# cardinality and bounds

def test_cardinality_examples():
    assert cardinality_X(1.0, 3, 3) == 20
    assert cardinality_X([1, 2, 3], 5) == 16
    assert cardinality_X([2], 1) == 1


@pytest.mark.parametrize("m", range(1, 7))
@pytest.mark.parametrize("q", range(0, 13))
def test_isotropic_cardinality(q, m):
    assert cardinality_X(1.0, q, m) == comb(q + m, m)


def test_bound_examples():
    assert bound_sg([1, 2.5], 5) == pytest.approx(12.0, rel=1e-15)
    assert bound_sg(1.0, 0, 3) == 1
    assert bound_sg(1.0, 5, 2) == pytest.approx(21.0, rel=1e-15)
    assert bound_bd([1, 2.5], 5) == pytest.approx(14.45, rel=1e-15)
    assert bound_bd([1], 5) == pytest.approx(6.0, rel=1e-15)
    assert bound_tp([1, 2.5], 5) == 18
    assert bound_tp(1.0, 5, 2) == 36
    assert bound_tp([1, 2], 0) == 1


def test_loglog_bound():
    assert bound_loglog(0, 10, 2) == 1
    assert bound_loglog(10, 100, 2) == pytest.approx(math.log(100) ** 5, rel=1e-14)
    assert bound_loglog(10, 100, 2) == pytest.approx(2071.23, rel=1e-5)
    assert bound_loglog(2, 3, 2) == pytest.approx(math.log(3), rel=1e-15)
    with pytest.raises(InvalidArgumentError):
        bound_loglog(2, 2, 2)


def test_cost_examples():
    assert cost_exact([1], 3) == 5
    assert cost_exact([1, 1], 2) == 9
    assert cost_exact([1, 2, 3], 0) == 1


def test_cost_needs_deep_enough_family():
    with pytest.raises(LevelOverflowError):
        cost_exact([1], 5, family=build_family(3))


def test_cost_bound_sq_examples():
    assert cost_bound_sq([1, 2.5], 5) == 100
    assert cost_bound_sq([1, 1], 0) == 1
    assert cost_bound_sq(1.0, 5, 2) == 441


def brute_max_box(w, q):
    return max(math.prod(a + 1 for a in alpha) for alpha in brute_X(sorted(w), q))


def test_max_box_examples():
    # (2, 3) has weighted level 5 and box volume 3 * 4
    assert max_box_volume(1.0, 5, 2) == 12 == brute_max_box([1, 1], 5)
    assert max_box_volume([1, 3], 0) == 1
    assert max_box_volume([1, 2.5], 5) == 6 == brute_max_box([1, 2.5], 5)


@given(
    st.lists(st.floats(min_value=0.2, max_value=5.0), min_size=1, max_size=8),
    st.floats(min_value=0.0, max_value=30.0),
)
def test_bound_chain(w, q):
    assume(bound_tp(w, q) < 200000)
    card = cardinality_X(w, q)
    assert max_box_volume(w, q) <= card
    assert card <= bound_sg(w, q) * (1 + 1e-12)
    assert bound_sg(w, q) <= bound_bd(w, q) * (1 + 1e-12)
    assert card <= bound_tp(w, q)


# tail estimate

def test_go_constant_examples():
    beta = 2.0
    assert go_constant([beta * math.log(2)] * 3, beta) == pytest.approx(3.0, rel=1e-14)
    assert go_constant([1.0], 2.0) == pytest.approx(1 / (math.exp(0.5) - 1), rel=1e-14)
    assert go_constant([], 2.0) == 0
    with pytest.raises(InvalidArgumentError):
        go_constant([1.0], 1.0)


def test_go_tail_geometric_case():
    tail, bound = check_go_tail([1.0], 2, None, 2.0, (60,))
    assert tail == pytest.approx(math.exp(-3) / (1 - math.exp(-1)), rel=1e-12)
    expected_bound = math.exp(2 / (math.exp(0.5) - 1)) / 2 / 3
    assert bound == pytest.approx(expected_bound, rel=1e-12)
    assert tail <= bound


def test_go_tail_vanishes_for_large_level():
    tail, _ = check_go_tail([1.0, 1.5], 200, None, 2.0, (20, 20))
    assert tail == 0.0


def test_go_tail_two_dimensional_brute_force():
    w, q, beta = [1.0, 1.0], 1, 1.5
    brute = math.fsum(
        math.exp(-(a + b)) for a in range(21) for b in range(21) if a + b > q
    )
    tail, bound = check_go_tail(w, q, None, beta, (20, 20))
    assert tail == pytest.approx(brute, rel=1e-12)
    assert tail <= bound


def test_go_tail_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        check_go_tail([1.0], 2, None, 1.0, (10,))
    with pytest.raises(InvalidArgumentError):
        check_go_tail([1.0, 2.0], 2, None, 2.0, (10,))
