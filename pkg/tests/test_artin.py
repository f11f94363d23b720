"""Local factors, local series, Euler products, and the splitting oracle."""

import random
from fractions import Fraction
from itertools import product as iproduct

import pytest

from indexdensity.artin import (
    corner_degree,
    euler_product,
    inclusion_exclusion,
    local_factor,
    local_series,
    prob_model_oracle,
)
from indexdensity.errors import UnsupportedScopeError
from indexdensity.groups import GroupFamily, is_separated, profile_of
from indexdensity.index_sets import ValuationMap, ValuationPattern

ARTIN_CONSTANT = Fraction(3739558136192022880547280543464164151, 10**37)

FAM1 = GroupFamily.from_strings(["2"])
FAM1R2 = GroupFamily.from_strings(["2", "3"])
FAM_IND = GroupFamily.from_strings(["2"], ["3"])
FAM_SAME = GroupFamily.from_strings(["2"], ["2"])
FAM_DEP = GroupFamily.from_strings(["2", "3"], ["3", "5"])


def test_inclusion_exclusion_basics():
    assert inclusion_exclusion(()) == 1
    assert inclusion_exclusion((Fraction(1, 2),)) == Fraction(1, 2)
    assert inclusion_exclusion((Fraction(1, 2), Fraction(1, 3))) == Fraction(1, 3)
    rng = random.Random(1)
    for _ in range(50):
        xs = tuple(Fraction(rng.randint(0, 5), 6) for _ in range(rng.randint(0, 4)))
        signed = Fraction(0)
        for mask in range(1 << len(xs)):
            term = Fraction(1)
            bits = 0
            for i, x in enumerate(xs):
                if mask >> i & 1:
                    term *= x
                    bits += 1
            signed += (-1) ** bits * term
        assert inclusion_exclusion(xs) == signed


def test_corner_degrees():
    p1 = profile_of(FAM1)
    assert corner_degree(3, (0,), p1) == 1
    assert corner_degree(3, (1,), p1) == 6
    assert corner_degree(3, (2,), p1) == 54
    assert corner_degree(2, (1, 0), profile_of(FAM_IND)) == 2


def test_zero_tuple_values():
    assert local_factor(2, (0,), profile_of(FAM1)) == Fraction(1, 2)
    assert local_factor(3, (0,), profile_of(FAM1)) == Fraction(5, 6)
    assert local_factor(5, (0,), profile_of(FAM1)) == Fraction(19, 20)
    assert local_factor(3, (0, 0), profile_of(FAM_IND)) == Fraction(13, 18)
    assert local_factor(2, (0, 0), profile_of(FAM_IND)) == Fraction(1, 4)


def test_general_values_frozen():
    assert local_factor(3, (1,), profile_of(FAM1)) == Fraction(4, 27)
    assert local_factor(2, (1, 0), profile_of(FAM_IND)) == Fraction(3, 16)
    assert local_factor(2, (1, 1), profile_of(FAM_SAME)) == Fraction(3, 8)
    assert local_factor(3, (0, 1), profile_of(FAM_SAME)) == 0
    assert local_factor(3, (1, 1), profile_of(FAM_DEP)) == Fraction(38, 2187)


def test_values_stay_in_range_and_positive_when_separated():
    for fam in (FAM1, FAM1R2, FAM_IND, FAM_SAME, FAM_DEP):
        prof = profile_of(fam)
        sep = is_separated(fam)
        for ell in (2, 3, 5, 7, 11, 13):
            for v in iproduct(range(4), repeat=prof.n):
                val = local_factor(ell, v, prof)
                assert 0 <= val <= 1, (fam, ell, v)
                if sep:
                    assert val > 0, (fam, ell, v)


def test_local_series_closed_values():
    p1 = profile_of(FAM1)
    assert local_series(3, ValuationPattern.anything(1), p1).value == 1
    assert local_series(3, ValuationPattern.exact_zero(1), p1).value == Fraction(5, 6)
    assert local_series(2, ValuationPattern.below((2,)), p1).value == Fraction(7, 8)


def test_local_series_explicit_list_is_a_plain_sum():
    prof = profile_of(FAM_IND)
    spec = [(0, 1), (2, 0), (1, 1)]
    got = local_series(3, spec, prof).value
    expect = sum(local_factor(3, v, prof) for v in spec)
    assert got == expect


def test_local_series_telescopes_across_profiles():
    # bounded-pattern value equals the term-by-term sum over the box,
    # dependent profiles included
    for fam in (FAM_IND, FAM_SAME, FAM_DEP):
        prof = profile_of(fam)
        for ell in (2, 3, 5):
            pat = ValuationPattern.below((3, 3))
            got = local_series(ell, pat, prof).value
            expect = sum(
                local_factor(ell, v, prof) for v in iproduct(range(3), repeat=2)
            )
            assert got == expect, (fam, ell)


def test_local_series_mixed_pattern():
    prof = profile_of(FAM_IND)
    pat = ValuationPattern((2, None))  # v_1 < 2, v_2 unconstrained
    got = local_series(3, pat, prof).value
    cols = sum(local_factor(3, (v1,), profile_of(FAM1)) for v1 in range(2))
    # marginalizing the unconstrained coordinate leaves the v_1 marginal
    assert got == cols


def test_normalization_small_sweep():
    for fam in (FAM1, FAM1R2, FAM_IND, FAM_SAME, FAM_DEP):
        prof = profile_of(fam)
        for ell in (2, 3, 5):
            assert local_series(ell, ValuationPattern.anything(prof.n), prof).value == 1


def test_euler_product_contains_artin_constant():
    vm = ValuationMap.build(1, {}, ValuationPattern.exact_zero(1))
    ep = euler_product(vm, profile_of(FAM1), 10**4)
    assert ep.interval.low <= ARTIN_CONSTANT <= ep.interval.high
    assert ep.interval.width < Fraction(2, 10**3)
    assert ep.factors[0] == (2, Fraction(1, 2))
    assert ep.zero_at is None


def test_euler_product_intervals_nest_as_cutoff_grows():
    vm = ValuationMap.build(1, {}, ValuationPattern.exact_zero(1))
    prof = profile_of(FAM1)
    small = euler_product(vm, prof, 1000).interval
    big = euler_product(vm, prof, 4000).interval
    assert small.low <= big.low and big.high <= small.high


def test_euler_product_zero_absorption():
    vm = ValuationMap.build(2, {3: [(0, 1)]}, ValuationPattern.exact_zero(2))
    ep = euler_product(vm, profile_of(FAM_SAME), 100)
    assert ep.interval.low == 0 == ep.interval.high
    assert ep.zero_at == 3


def test_euler_product_trivial_default_is_exact():
    # no tail correction needed when every unlisted prime contributes 1
    vm = ValuationMap.build(1, {2: ValuationPattern.exact_zero(1)}, ValuationPattern.anything(1))
    ep = euler_product(vm, profile_of(FAM1), 50)
    assert ep.interval.low == ep.interval.high == Fraction(1, 2)


def test_prob_oracle_exact_matches_local_factor():
    cases = [
        (FAM1, (2, 3), 1),
        (FAM1R2, (2, 3), 1),
        (FAM_IND, (2, 3), 2),
    ]
    for fam, ells, n in cases:
        prof = profile_of(fam)
        for ell in ells:
            for v in iproduct(range(2), repeat=n):
                got = prob_model_oracle(ell, v, fam, "exact")
                assert got == local_factor(ell, v, prof), (fam, ell, v)


def test_prob_oracle_exact_refuses_dependent_families():
    with pytest.raises(UnsupportedScopeError):
        prob_model_oracle(3, (0, 0), FAM_SAME, "exact")
    with pytest.raises(UnsupportedScopeError):
        prob_model_oracle(3, (0, 0), FAM_DEP, "exact")


def test_prob_oracle_monte_carlo_tracks_the_formula():
    est = prob_model_oracle(3, (0, 0), FAM_SAME, "monte-carlo", samples=200000, seed=5)
    assert est.agrees_with(local_factor(3, (0, 0), profile_of(FAM_SAME)))
    est = prob_model_oracle(3, (0, 1), FAM_SAME, "monte-carlo", samples=100000, seed=5)
    assert est.value == 0  # identical groups can never split at different depths
    est = prob_model_oracle(3, (1, 1), FAM_DEP, "monte-carlo", samples=300000, seed=11)
    assert est.agrees_with(local_factor(3, (1, 1), profile_of(FAM_DEP)))


def test_prob_oracle_monte_carlo_is_seeded():
    a = prob_model_oracle(2, (1, 0), FAM_IND, "monte-carlo", samples=50000, seed=42)
    b = prob_model_oracle(2, (1, 0), FAM_IND, "monte-carlo", samples=50000, seed=42)
    assert a == b
