"""Finitely generated multiplicative subgroups of Q* in factored form.

A nonzero rational is stored as a sign together with its prime
factorization (negative exponents for the denominator). Groups are tuples
of such generators; families are tuples of groups. All rank computation is
exact integer linear algebra on exponent vectors, so questions like
"does this element have a power inside that group" are decided exactly,
never through floating point.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import gcd

from .arith import factorize
from .errors import SizeLimitError

SUBSET_ENUM_LIMIT = 12  # 2^12 subsets is the ceiling for exact profiles


@dataclass(frozen=True)
class FactoredRational:
    """A nonzero rational as sign * prod(p^e), exponents in Z \\ {0}."""

    sign: int
    exponents: tuple[tuple[int, int], ...]  # sorted by prime, exponent != 0

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        previous = 1
        for p, e in self.exponents:
            if p <= previous:
                raise ValueError("exponent map must be sorted by prime, no dupes")
            if e == 0:
                raise ValueError("zero exponents must be dropped")
            previous = p

    @property
    def value(self) -> Fraction:
        out = Fraction(self.sign)
        for p, e in self.exponents:
            out *= Fraction(p) ** e
        return out

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.exponents)

    def exponent_vector(self, primes: tuple[int, ...]) -> tuple[int, ...]:
        lookup = dict(self.exponents)
        return tuple(lookup.get(p, 0) for p in primes)

    def is_torsion(self) -> bool:
        """True for +-1: the only torsion in Q*."""
        return not self.exponents

    def residue(self, p: int) -> int:
        """The value reduced mod an odd prime p not dividing num or den."""
        out = 1 if self.sign > 0 else p - 1
        for q, e in self.exponents:
            if q % p == 0:
                raise ValueError(f"{self} is not a unit mod {p}")
            out = out * pow(q, e % (p - 1), p) % p
        return out

    def __str__(self):
        v = self.value
        return str(v) if v.denominator > 1 else str(v.numerator)


def parse_rational(text) -> FactoredRational:
    """Parse a nonzero rational ("2", "-12/5", "0.75", Fraction, int).

    Factorization happens here, once, with the package work bound; inputs
    whose numerator or denominator cannot be factored are rejected.
    """
    value = Fraction(text) if not isinstance(text, Fraction) else text
    if value == 0:
        raise ValueError("0 generates no multiplicative subgroup of Q*")
    sign = 1 if value > 0 else -1
    exps: dict[int, int] = {}
    for p, e in factorize(value.numerator * sign if sign < 0 else value.numerator).items():
        exps[p] = exps.get(p, 0) + e
    for p, e in factorize(value.denominator).items():
        exps[p] = exps.get(p, 0) - e
    items = tuple(sorted((p, e) for p, e in exps.items() if e != 0))
    return FactoredRational(sign, items)


def _rank_of_vectors(rows: list[tuple[int, ...]]) -> int:
    """Exact rank over Q via fraction-free (cross-multiplying) elimination."""
    m = [list(r) for r in rows if any(r)]
    if not m:
        return 0
    cols = len(m[0])
    rank = 0
    row = 0
    for col in range(cols):
        pivot = None
        for r in range(row, len(m)):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        pv = m[row][col]
        for r in range(row + 1, len(m)):
            if m[r][col] == 0:
                continue
            lead = m[r][col]
            for c in range(col, cols):
                m[r][c] = m[r][c] * pv - m[row][c] * lead
        rank += 1
        row += 1
        if row == len(m):
            break
    return rank


@dataclass(frozen=True)
class MultGroup:
    """Subgroup of Q* given by finitely many generators.

    Torsion-only groups (generated by -1) are allowed so that rank can
    report 0 on them; the positive-rank hypothesis of the density theory
    is enforced at the family level, not here.
    """

    generators: tuple[FactoredRational, ...]

    def __post_init__(self):
        if not self.generators:
            raise ValueError("a group needs at least one generator")

    @classmethod
    def from_strings(cls, *texts) -> "MultGroup":
        return cls(tuple(parse_rational(t) for t in texts))

    @property
    def support(self) -> tuple[int, ...]:
        primes = set()
        for g in self.generators:
            primes.update(g.support)
        return tuple(sorted(primes))

    def exponent_rows(self, primes: tuple[int, ...]) -> list[tuple[int, ...]]:
        return [g.exponent_vector(primes) for g in self.generators]

    def __str__(self):
        return "<" + ", ".join(str(g) for g in self.generators) + ">"


def rank(group: MultGroup) -> int:
    """Rank of the free part: dimension of the exponent span over Q."""
    primes = group.support
    return _rank_of_vectors(group.exponent_rows(primes))


def in_divisible_hull(x: FactoredRational, group: MultGroup) -> bool:
    """Does some positive power of x land in the group?

    Signs and roots of unity are absorbed by the hull, so this is exactly
    membership of x's exponent vector in the Q-span of the generators'.
    """
    primes = tuple(sorted(set(group.support) | set(x.support)))
    rows = group.exponent_rows(primes)
    base = _rank_of_vectors(rows)
    return _rank_of_vectors(rows + [x.exponent_vector(primes)]) == base


@dataclass(frozen=True)
class GroupFamily:
    """An ordered family (W_1, ..., W_n) of positive-rank groups."""

    groups: tuple[MultGroup, ...]

    def __post_init__(self):
        if not self.groups:
            raise ValueError("empty family")
        if len(self.groups) > SUBSET_ENUM_LIMIT:
            raise SizeLimitError(
                f"families larger than {SUBSET_ENUM_LIMIT} exceed the exact "
                "subset-enumeration budget"
            )
        for i, g in enumerate(self.groups):
            if rank(g) == 0:
                raise ValueError(
                    f"group {i + 1} is torsion-only; the density theory "
                    "requires every group to have positive rank"
                )

    @classmethod
    def from_strings(cls, *gen_lists) -> "GroupFamily":
        return cls(tuple(MultGroup.from_strings(*gl) for gl in gen_lists))

    def __len__(self):
        return len(self.groups)

    @property
    def support(self) -> tuple[int, ...]:
        primes = set()
        for g in self.groups:
            primes.update(g.support)
        return tuple(sorted(primes))

    @property
    def fingerprint(self) -> str:
        """Stable hex id used to key sampling caches."""
        canon = ";".join(
            ",".join(f"{g.sign}:{g.exponents}" for g in grp.generators)
            for grp in self.groups
        )
        return hashlib.sha256(canon.encode()).hexdigest()[:16]

    def __str__(self):
        return "(" + ", ".join(str(g) for g in self.groups) + ")"


@dataclass(frozen=True)
class RankProfile:
    """rank(W_J) for every subset J of {1..n}, keyed by frozenset."""

    n: int
    table: tuple[tuple[frozenset, int], ...]

    @property
    def ranks(self) -> dict:
        return dict(self.table)

    def of(self, subset) -> int:
        return self.ranks[frozenset(subset)]

    @property
    def group_ranks(self) -> tuple[int, ...]:
        r = self.ranks
        return tuple(r[frozenset((i,))] for i in range(1, self.n + 1))

    @property
    def total(self) -> int:
        return self.of(range(1, self.n + 1))

    def is_independent(self) -> bool:
        """True when ranks add across the family (no multiplicative relations)."""
        return self.total == sum(self.group_ranks)

    def validate(self) -> None:
        """Matroid sanity: empty-set zero, monotone, submodular. O(4^n)."""
        r = self.ranks
        assert r[frozenset()] == 0
        subsets = list(r)
        for a in subsets:
            for b in subsets:
                if a <= b and r[a] > r[b]:
                    raise AssertionError(f"monotonicity fails at {set(a)}<={set(b)}")
                if r[a | b] + r[a & b] > r[a] + r[b]:
                    raise AssertionError(f"submodularity fails at {set(a)},{set(b)}")


def rank_profile(family: GroupFamily) -> RankProfile:
    n = len(family)
    primes = family.support
    rows_by_group = [g.exponent_rows(primes) for g in family.groups]
    table = []
    indices = list(range(1, n + 1))
    for size in range(n + 1):
        for js in combinations(indices, size):
            rows: list[tuple[int, ...]] = []
            for j in js:
                rows.extend(rows_by_group[j - 1])
            table.append((frozenset(js), _rank_of_vectors(rows)))
    return RankProfile(n, tuple(table))


@lru_cache(maxsize=256)
def _profile_cached(family: GroupFamily) -> RankProfile:
    return rank_profile(family)


def profile_of(family: GroupFamily) -> RankProfile:
    """Cached rank_profile; families are small immutable values."""
    return _profile_cached(family)


def is_separated(family: GroupFamily) -> bool:
    """No group sits inside the divisible hull of the others.

    Equivalent, for exponent lattices over Q, to the strict rank increase
    rank(W_I) > rank(W_{I minus i}) for every i.
    """
    prof = profile_of(family)
    full = frozenset(range(1, len(family) + 1))
    total = prof.of(full)
    return all(prof.of(full - {i}) < total for i in full)


def _det_bareiss(m: list[list[int]]) -> int:
    """Integer determinant by fraction-free elimination (exact division)."""
    n = len(m)
    if n == 0:
        return 1
    m = [row[:] for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k]), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[-1][-1]


def lattice_invariant_primes(rows: list[tuple[int, ...]]) -> tuple[int, ...]:
    """Primes at which the row lattice is a proper sublattice of its saturation.

    The lattice loses rank mod p exactly when p divides every maximal minor,
    so the answer is the set of prime divisors of the gcd of those minors
    (that gcd is the product of the invariant factors).
    """
    rows = [r for r in rows if any(r)]
    r = _rank_of_vectors(rows)
    if r == 0:
        return ()
    g = 0
    for rsel in combinations(range(len(rows)), r):
        for csel in combinations(range(len(rows[0])), r):
            minor = _det_bareiss([[rows[i][j] for j in csel] for i in rsel])
            g = gcd(g, minor)
            if g == 1:
                return ()
    return tuple(sorted(factorize(g)))


def entanglement_primes(family: GroupFamily) -> tuple[int, ...]:
    """Primes where some subfamily's joint exponent lattice is unsaturated.

    At such a prime ell an unexpected ell-th root can be rational (8 has a
    rational cube root) or can tie groups together (2*27 and 2 share a cube
    root field), so Kummer degrees may fall short of the generic rank
    formula. Away from these primes, the support, and 2, the generic
    formula is exact.
    """
    support = family.support
    bad: set[int] = set()
    for size in range(1, len(family.groups) + 1):
        for sel in combinations(family.groups, size):
            rows = [
                g.exponent_vector(support)
                for grp in sel
                for g in grp.generators
                if g.exponents
            ]
            bad.update(lattice_invariant_primes(rows))
    return tuple(sorted(bad))
