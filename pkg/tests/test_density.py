"""The four analytic routes and their cross-checks at desk scale."""

from fractions import Fraction

import pytest

from indexdensity.density import (
    LevelMap,
    correction_ratio,
    hooley_series,
    singleton_sum,
    valuation_density,
)
from indexdensity.artin import euler_product
from indexdensity.errors import UnsupportedScopeError
from indexdensity.groups import GroupFamily, MultGroup, profile_of
from indexdensity.index_sets import (
    Divides,
    Equals,
    FiniteSet,
    KFree,
    PrimesSet,
    SquarefreeModulus,
    ValuationConstraint,
    ValuationMap,
    ValuationPattern,
    named_predicate,
)

FAM2 = GroupFamily.from_strings(["2"])
G2 = MultGroup.from_strings("2")


def _artin_interval(cutoff=3000):
    vm = ValuationMap.build(1, {}, ValuationPattern.exact_zero(1))
    return euler_product(vm, profile_of(FAM2), cutoff).interval


def test_level_maps():
    assert [LevelMap.identity()(n) for n in (1, 2, 6)] == [1, 2, 6]
    assert [LevelMap.times(3)(n) for n in (1, 2)] == [3, 6]
    assert [LevelMap.times_local(2)(n) for n in (1, 2, 3, 6)] == [1, 4, 3, 12]
    assert [LevelMap.power(2)(n) for n in (1, 2, 6)] == [1, 4, 36]
    assert [LevelMap.prime_powers({2: 3})(n) for n in (1, 2, 3, 6)] == [1, 8, 3, 24]
    labels = {
        LevelMap.identity().label(),
        LevelMap.times(2).label(),
        LevelMap.power(2).label(),
    }
    assert len(labels) == 3
    with pytest.raises(ValueError):
        LevelMap.times(0)
    with pytest.raises(ValueError):
        LevelMap.identity()(0)


def test_hooley_series_matches_euler_product():
    rep = hooley_series(G2, LevelMap.identity(), 3000)
    assert rep.method == "series"
    assert rep.value.overlaps(_artin_interval())
    assert rep.ledger[0] == ("n=1 level=1", Fraction(1))
    assert rep.ledger[1] == ("n=2 level=2", Fraction(-1, 2))


def test_hooley_series_square_generator_collapses_in_corrected_mode():
    rep = hooley_series(MultGroup.from_strings("4"), LevelMap.identity(), 3000, "corrected")
    # 4 is a perfect square, so index 1 has density zero; generic mode
    # misses this completely
    assert rep.value.low == 0
    assert rep.value.high < Fraction(1, 100)
    generic = hooley_series(MultGroup.from_strings("4"), LevelMap.identity(), 1000)
    assert generic.value.low > Fraction(1, 3)


def test_hooley_series_rejects_higher_rank():
    with pytest.raises(UnsupportedScopeError):
        hooley_series(MultGroup.from_strings("2", "3"), LevelMap.identity(), 100)
    with pytest.raises(ValueError):
        hooley_series(G2, LevelMap.identity(), 0)


def test_valuation_density_squarefree_agrees_with_series():
    series = hooley_series(G2, LevelMap.power(2), 2000)
    euler = valuation_density(FAM2, KFree((2,)), cutoff=3000)
    assert euler.method == "euler-product"
    assert series.value.overlaps(euler.value)


def test_valuation_density_odd_index_is_half():
    vc = ValuationConstraint(
        ValuationMap.build(
            1, {2: ValuationPattern.exact_zero(1)}, ValuationPattern.anything(1)
        )
    )
    rep = valuation_density(FAM2, vc, cutoff=200)
    assert rep.value.contains(Fraction(1, 2))
    assert rep.value.width < Fraction(1, 10**6)


def test_valuation_density_ledger_carries_corrections():
    rep = valuation_density(FAM2, KFree((2,)), cutoff=500)
    tags = [tag for tag, _ in rep.ledger]
    assert any("ell=2" in t and "corrected" in t for t in tags)
    assert any("ell=2" in t and "generic" in t for t in tags)


def test_valuation_density_routes_and_refusals():
    with pytest.raises(UnsupportedScopeError, match="singleton_sum"):
        valuation_density(FAM2, PrimesSet(), cutoff=100)
    with pytest.raises(UnsupportedScopeError):
        valuation_density(FAM2, named_predicate("even-omega"), cutoff=100)


def test_singleton_sum_refuses_non_separated_families():
    fam = GroupFamily.from_strings(["2"], ["2"])
    with pytest.raises(UnsupportedScopeError, match="separated"):
        singleton_sum(fam, named_predicate("prime-square-pair"))


def test_correction_ratio_values():
    assert correction_ratio((1,), FAM2).value == 1
    r3 = correction_ratio((3,), FAM2)
    assert r3.value == Fraction(8, 45)
    assert r3.tag == "generic"
    assert correction_ratio((5,), FAM2).value == Fraction(24, 475)
    r2 = correction_ratio((2,), FAM2)
    assert r2.tag == "estimated"
    assert r2.value == Fraction(3, 4)


def test_correction_ratio_matches_paper_prime_shape():
    # for a single rank-1 group and prime q outside the deficiency scope,
    # the ratio F_1(q)/F_0(q) collapses to (q^2-1)/(q^2(q^2-q-1))
    for q in (3, 5, 7, 11, 13, 17):
        expect = Fraction(q * q - 1, q * q * (q * q - q - 1))
        assert correction_ratio((q,), FAM2).value == expect, q


def test_singleton_telescopes_through_the_correction_ratio():
    got = singleton_sum(FAM2, FiniteSet(((3,),)), cutoff=3000).value
    target = _artin_interval().times_exact(Fraction(8, 45))
    assert got.overlaps(target)


def test_singleton_sum_monotone_in_bound_and_smoothness():
    lows = []
    for b in (10, 40, 160):
        rep = singleton_sum(FAM2, KFree((2,)), bound=b, cutoff=600)
        lows.append(rep.value.low)
    assert lows[0] <= lows[1] <= lows[2]

    q_small = singleton_sum(
        FAM2, KFree((2,)), bound=160, smooth=SquarefreeModulus.from_int(6), cutoff=600
    )
    q_large = singleton_sum(
        FAM2, KFree((2,)), bound=160, smooth=SquarefreeModulus.from_int(30), cutoff=600
    )
    assert q_small.value.low <= q_large.value.low

    ceiling = valuation_density(FAM2, KFree((2,)), cutoff=600)
    slack = Fraction(1, 100)
    assert lows[2] <= ceiling.value.high + slack
    assert q_large.value.low <= ceiling.value.high + slack


def test_singleton_partial_sums_stay_below_one():
    prev = Fraction(0)
    for b in (5, 15, 40):
        rep = singleton_sum(
            FAM2, FiniteSet(tuple((t,) for t in range(1, b + 1))), cutoff=500
        )
        assert prev <= rep.value.low
        assert rep.value.high <= 1
        prev = rep.value.low


def test_ziegler_index_two_vs_direct_equality_route():
    series = hooley_series(G2, LevelMap.times(2), 2000)
    singles = singleton_sum(FAM2, Equals((2,)), cutoff=3000)
    assert series.value.overlaps(singles.value.widen(Fraction(1, 200)))


def test_report_metadata():
    rep = hooley_series(G2, LevelMap.identity(), 500)
    assert any(n.startswith("truncation=") for n in rep.notes)
    assert any(n.startswith("tail-estimate=") for n in rep.notes)
    assert 0 <= rep.midpoint_float() <= 1
