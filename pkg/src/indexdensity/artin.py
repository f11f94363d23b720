"""Local index-valuation densities and their Euler products.

The heuristic: a prime has index valuations v_I at ell exactly when its
Frobenius splits in the corner field (cyclotomic level ell^v_i, radical
level ell^v_i for group i) but in none of the 2^n one-step bumps. Each
splitting probability is one over a field degree, and inclusion-exclusion
over bump subsets J gives the local factor

    F(v_I) = sum_J (-1)^|J| / D(v_I + delta_J),

with D the corner-field degree (generically phi(ell^max) times ell to the
rank-weighted exponent form). Everything here is exact rational arithmetic;
the same alternating-sum structure telescopes over boxes of tuples, which
is what makes cofinite valuation patterns and certified Euler tails exact.

A probabilistic model provides an independent oracle for the same
numbers: each support prime's discrete logarithm is uniform ell-adic, a
generator's splitting depth is the valuation of the matching integer
combination, and a group's index valuation is the minimum depth over its
generators and the cyclotomic variable. Independent families reduce to a
finite product law (enumerated exactly); everything else is seeded
simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product as iproduct

import numpy as np

from .arith import euler_phi, primes_up_to
from .errors import SizeLimitError, UnsupportedScopeError
from .exact import Interval, round_down
from .groups import (
    FactoredRational,
    GroupFamily,
    RankProfile,
    profile_of,
)
from .index_sets import ValuationMap, ValuationPattern, VSpec
from .kummer import generic_exponent

CROSSCHECK_BOX_LIMIT = 4096
ENUMERATION_ATOM_LIMIT = 4_000_000


def _subsets(indices):
    for size in range(len(indices) + 1):
        yield from combinations(indices, size)


def inclusion_exclusion(x_I) -> Fraction:
    """prod_i (1 - x_i), cross-checked against the signed subset sum."""
    xs = tuple(Fraction(x) for x in x_I)
    value = Fraction(1)
    for x in xs:
        value *= 1 - x
    if len(xs) <= 16:
        signed = Fraction(0)
        for sub in _subsets(range(len(xs))):
            term = Fraction((-1) ** len(sub))
            for j in sub:
                term *= xs[j]
            signed += term
        if signed != value:
            raise ArithmeticError("inclusion-exclusion routes disagree")
    return value


# ---------------------------------------------------------------------------
# corner degrees and local factors


def corner_degree(ell: int, w: tuple[int, ...], profile: RankProfile) -> int:
    """Generic degree of the corner field with radical levels ell^w_i."""
    if all(x == 0 for x in w):
        return 1
    return euler_phi(ell ** max(w)) * ell ** generic_exponent(w, profile)


def _check_tuple(v_I, n: int) -> tuple[int, ...]:
    v = tuple(int(x) for x in v_I)
    if len(v) != n:
        raise ValueError(f"expected a {n}-tuple, got {v}")
    if any(x < 0 for x in v):
        raise ValueError("valuations are nonnegative")
    return v


def _bump(v: tuple[int, ...], sub) -> tuple[int, ...]:
    w = list(v)
    for j in sub:
        w[j] += 1
    return tuple(w)


def local_factor(
    ell: int,
    v_I,
    profile: RankProfile,
    *,
    degree_of=None,
) -> Fraction:
    """Density of primes whose index has valuations exactly v_I at ell.

    degree_of(ell, w) overrides the generic corner degree (used for
    deficiency-corrected small primes). In the generic case the value is
    cross-checked against both displayed closed forms.
    """
    v = _check_tuple(v_I, profile.n)
    if degree_of is None:
        degree_of = lambda l, w: corner_degree(l, w, profile)  # noqa: E731
        check_forms = True
    else:
        check_forms = False

    value = Fraction(0)
    for sub in _subsets(range(profile.n)):
        value += Fraction((-1) ** len(sub), degree_of(ell, _bump(v, sub)))

    if check_forms:
        if all(x == 0 for x in v):
            other = _zero_form(ell, profile)
        else:
            other = _general_prefactor_form(ell, v, profile)
            rewritten = _general_rewritten_form(ell, v, profile)
            if other != rewritten:
                raise ArithmeticError(
                    f"the two displayed forms disagree at ell={ell}, v={v}"
                )
        if value != other:
            raise ArithmeticError(
                f"corner sum and closed form disagree at ell={ell}, v={v}"
            )
    if not 0 <= value <= 1:
        raise ArithmeticError(f"local factor {value} outside [0,1]")
    return value


def _zero_form(ell: int, profile: RankProfile) -> Fraction:
    """The displayed zero-tuple formula, both groupings asserted equal."""
    n = profile.n
    full = Fraction(0)
    nonempty = Fraction(0)
    for sub in _subsets(range(n)):
        term = Fraction((-1) ** len(sub), ell ** profile.of(j + 1 for j in sub))
        full += term
        if sub:
            nonempty += term
    first = Fraction(ell - 2, ell - 1) + Fraction(1, ell - 1) * full
    second = 1 + Fraction(1, ell - 1) * nonempty
    if first != second:
        raise ArithmeticError("zero-tuple groupings disagree")
    return first


def _argmax_set(v: tuple[int, ...]) -> tuple[int, ...]:
    vmax = max(v)
    return tuple(i for i, x in enumerate(v) if x == vmax)


def _general_prefactor_form(ell, v, profile) -> Fraction:
    vmax = max(v)
    i_prime = set(_argmax_set(v))
    f_v = generic_exponent(v, profile)
    avoiding = Fraction(0)
    everything = Fraction(0)
    for sub in _subsets(range(profile.n)):
        rel = generic_exponent(_bump(v, sub), profile) - f_v
        term = Fraction((-1) ** len(sub), ell**rel)
        everything += term
        if not i_prime & set(sub):
            avoiding += term
    prefactor = Fraction(1, euler_phi(ell**vmax) * ell**f_v)
    return prefactor * (
        Fraction(ell - 1, ell) * avoiding + Fraction(1, ell) * everything
    )


def _general_rewritten_form(ell, v, profile) -> Fraction:
    vmax = max(v)
    i_prime = set(_argmax_set(v))
    avoiding = Fraction(0)
    everything = Fraction(0)
    for sub in _subsets(range(profile.n)):
        term = Fraction(
            (-1) ** len(sub), ell ** generic_exponent(_bump(v, sub), profile)
        )
        everything += term
        if not i_prime & set(sub):
            avoiding += term
    return Fraction(1, ell**vmax) * (avoiding + Fraction(1, ell - 1) * everything)


# ---------------------------------------------------------------------------
# sums over valuation patterns


@dataclass(frozen=True)
class LocalSeries:
    """Exact sum of local factors over one prime's allowed tuples."""

    value: Fraction
    ell: int
    spec: VSpec
    truncation: int | None = None


def local_series(
    ell: int,
    spec: VSpec,
    profile: RankProfile,
    *,
    degree_of=None,
) -> LocalSeries:
    """Sum F(v) over a finite tuple list or a product-form pattern.

    Patterns telescope: summing the alternating corner sum over a box
    (coordinates below given bounds, other coordinates free) leaves only
    the corner evaluations at bound-or-zero tuples, so cofinite patterns
    get exact values with no truncation at all.
    """
    if degree_of is None:
        deg = lambda l, w: corner_degree(l, w, profile)  # noqa: E731
    else:
        deg = degree_of

    if isinstance(spec, ValuationPattern):
        if spec.n != profile.n:
            raise ValueError("pattern arity mismatch")
        bounded = tuple(i for i, b in enumerate(spec.bounds) if b is not None)
        value = Fraction(0)
        for sub in _subsets(bounded):
            w = tuple(
                spec.bounds[i] if i in sub else 0 for i in range(profile.n)
            )
            value += Fraction((-1) ** len(sub), deg(ell, w))
        if spec.is_finite():
            size = math.prod(spec.bounds)
            if size <= CROSSCHECK_BOX_LIMIT:
                explicit = sum(
                    local_factor(ell, t, profile, degree_of=degree_of)
                    for t in spec.tuples()
                )
                if explicit != value:
                    raise ArithmeticError(
                        f"telescoped box differs from the explicit sum at {ell}"
                    )
        return LocalSeries(value, ell, spec)

    tuples = tuple(spec)
    value = sum(
        (local_factor(ell, t, profile, degree_of=degree_of) for t in tuples),
        Fraction(0),
    )
    if value > 1:
        raise ArithmeticError("tuple list double-counts a valuation tuple")
    return LocalSeries(value, ell, tuples)


# ---------------------------------------------------------------------------
# Euler products with certified tails


@dataclass(frozen=True)
class EulerProduct:
    """Certified enclosure of an infinite product of local series."""

    interval: Interval
    cutoff: int
    n: int
    factors: tuple[tuple[int, Fraction], ...]
    zero_at: int | None = None

    def decimal_bounds(self, places: int = 12) -> tuple[str, str]:
        return self.interval.decimal_bounds(places)


def euler_product(
    vmap: ValuationMap,
    profile: RankProfile,
    cutoff: int = 10**5,
    *,
    overrides=None,
    degree_of=None,
) -> EulerProduct:
    """prod over ell of the local series, with a certified tail bound.

    Every unlisted prime beyond the cutoff contributes a factor between
    the zero-tuple value and 1, and the zero-tuple value is at least
    1 - 2^n/(ell^2 - ell); the product of those lower bounds beyond L
    telescopes to at least 1 - 2^n/L. When the default pattern is the
    trivial one, unlisted primes contribute exactly 1 and no tail widening
    happens at all. overrides maps a prime to a replacement factor
    (deficiency-corrected small-prime values).
    """
    if vmap.n != profile.n:
        raise ValueError("valuation map arity does not match the profile")
    if not vmap.default.allows((0,) * profile.n):
        raise ValueError("default pattern must allow the zero tuple")
    if cutoff <= 2**profile.n:
        raise ValueError("cutoff too small for a meaningful tail bound")
    if max(vmap.listed, default=0) > cutoff:
        raise ValueError("every listed prime must lie at or below the cutoff")
    overrides = dict(overrides or {})

    acc = Interval.exactly(1)
    factors = []
    zero_at = None
    for ell in primes_up_to(cutoff):
        if ell in overrides:
            a = Fraction(overrides[ell])
            if not 0 <= a <= 1:
                raise ValueError(f"override at {ell} outside [0,1]")
        else:
            a = local_series(ell, vmap.spec_at(ell), profile, degree_of=degree_of).value
        factors.append((ell, a))
        if a == 0 and zero_at is None:
            zero_at = ell
        acc = acc.times_exact(a)

    if vmap.default.is_trivial():
        interval = acc
    else:
        tail_low = acc.low * (1 - Fraction(2**profile.n, cutoff))
        interval = Interval(
            round_down(tail_low) if tail_low > 0 else Fraction(0), acc.high
        )
    return EulerProduct(interval, cutoff, profile.n, tuple(factors), zero_at)


# ---------------------------------------------------------------------------
# the probabilistic oracle


@dataclass(frozen=True)
class ProbEstimate:
    """Monte-carlo output: point estimate plus raw counts."""

    value: float
    sigma: float
    hits: int
    kept: int
    samples: int

    def agrees_with(self, target, sigmas: float = 3.0) -> bool:
        """Binomial consistency check against an exact target density."""
        t = float(target)
        if self.kept == 0:
            return False
        null_sigma = math.sqrt(t * (1 - t) / self.kept)
        return abs(self.value - t) <= sigmas * null_sigma + 1.0 / self.kept


def _torsion_free_basis(family: GroupFamily):
    basis: list[FactoredRational] = []
    owner: list[int] = []
    profile = profile_of(family)
    for i, group in enumerate(family.groups):
        kept = [g for g in group.generators if not g.is_torsion()]
        if len(kept) != profile.group_ranks[i]:
            raise UnsupportedScopeError(
                "the probabilistic model needs each group's generators to be "
                "a basis (torsion aside); reduce the generating set first"
            )
        basis.extend(kept)
        owner.extend([i] * len(kept))
    return basis, owner


def _pmf_tables(ell: int, top: int):
    """Truncated splitting-depth distributions, exact, summing to 1."""
    pmf_x = [Fraction(1, ell**k) - Fraction(1, ell ** (k + 1)) for k in range(top)]
    pmf_x.append(Fraction(1, ell**top))
    pmf_z = [
        Fraction(1, euler_phi(ell**k)) - Fraction(1, euler_phi(ell ** (k + 1)))
        for k in range(top)
    ]
    pmf_z.append(Fraction(1, euler_phi(ell**top)))
    if sum(pmf_x) != 1 or sum(pmf_z) != 1:
        raise ArithmeticError("truncated distributions fail to normalize")
    return pmf_x, pmf_z


def prob_model_oracle(
    ell: int,
    v_I,
    family: GroupFamily,
    method: str = "exact",
    *,
    samples: int = 10**6,
    seed: int = 0,
    chunk: int = 1 << 19,
):
    """Independent estimate of the local factor from the splitting model.

    Monte-carlo samples a uniform ell-adic logarithm (top+1 digits) for
    every prime in the family's support; a generator's splitting depth is
    the ell-valuation of the corresponding integer combination of logs,
    and group i's index valuation is the minimum depth over its
    generators and the shared cyclotomic depth. Multiplicative relations
    between groups are then automatic (shared logs), which is what makes
    the sample law match the rank-profile closed form. Exact enumeration
    is the independent-family shortcut: depths are then independent
    truncated geometrics and the joint law is a finite product.
    """
    profile = profile_of(family)
    v = _check_tuple(v_I, profile.n)
    basis, owner = _torsion_free_basis(family)
    top = max(v) + 1
    pmf_x, pmf_z = _pmf_tables(ell, top)

    if method == "exact":
        if not profile.is_independent():
            raise UnsupportedScopeError(
                "exact enumeration is only valid for multiplicatively "
                "independent families; use method='monte-carlo'"
            )
        m = len(basis)
        if (top + 1) ** (m + 1) > ENUMERATION_ATOM_LIMIT:
            raise SizeLimitError("joint distribution too large to enumerate")
        total = Fraction(0)
        for z in range(top + 1):
            for xs in iproduct(range(top + 1), repeat=m):
                ok = True
                for i in range(profile.n):
                    depth = min(
                        [xs[j] for j in range(m) if owner[j] == i] + [z]
                    )
                    if depth != v[i]:
                        ok = False
                        break
                if ok:
                    p = pmf_z[z]
                    for x in xs:
                        p *= pmf_x[x]
                    total += p
        return total

    if method != "monte-carlo":
        raise ValueError("method is 'exact' or 'monte-carlo'")

    modulus = ell**top
    if modulus > 1 << 40:
        raise SizeLimitError("ell^(max v + 1) too large for the sampler")
    support = family.support
    coeffs = np.array(
        [b.exponent_vector(support) for b in basis], dtype=np.int64
    ).T  # one column per basis element, one row per support prime
    cdf_z = np.cumsum([float(p) for p in pmf_z])
    rng = np.random.default_rng(seed)
    m = len(basis)
    groups_cols = [
        [j for j in range(m) if owner[j] == i] for i in range(profile.n)
    ]

    hits = 0
    left = samples
    while left > 0:
        size = min(chunk, left)
        left -= size
        logs = rng.integers(0, modulus, size=(size, len(support)), dtype=np.int64)
        combo = (logs @ coeffs) % modulus
        depth = np.zeros(combo.shape, dtype=np.int64)
        alive = np.ones(combo.shape, dtype=bool)
        rem = combo.copy()
        for _ in range(top):
            alive &= rem % ell == 0
            depth += alive
            rem[alive] //= ell
        z = np.searchsorted(cdf_z, rng.random(size), side="right")
        target = np.ones(size, dtype=bool)
        for i, cols in enumerate(groups_cols):
            psi = np.minimum(depth[:, cols].min(axis=1), z)
            target &= psi == v[i]
        hits += int(target.sum())

    p = hits / samples
    sigma = math.sqrt(p * (1 - p) / samples) if 0 < p < 1 else 1.0 / samples
    return ProbEstimate(p, sigma, hits, samples, samples)
