"""Target sets of index tuples and their valuation structure.

The density machinery never sees raw sets of tuples; it sees descriptors
that know three things about themselves: direct membership, membership in
the valuation-relaxed supersets H_Q, and (when it exists) a per-prime
valuation constraint system that the Euler-product route can consume.

Descriptors also classify themselves into the taxonomy used to route
queries: cut by valuations / almost cut (with a witness modulus) /
determined by valuations / unknown.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from itertools import product as iproduct

from .arith import factorize, is_prime, primes_up_to, squarefree_kernel, valuation
from .errors import SizeLimitError, UnsupportedScopeError

IndexTuple = tuple[int, ...]  # entries >= 1
ValuationTuple = tuple[int, ...]  # entries >= 0

ENUMERATION_CAP = 2 * 10**7  # max lattice points a box enumeration may visit


def check_index_tuple(h: IndexTuple, n: int | None = None) -> IndexTuple:
    h = tuple(int(x) for x in h)
    if n is not None and len(h) != n:
        raise ValueError(f"expected {n} coordinates, got {len(h)}")
    if any(x < 1 for x in h):
        raise ValueError("index tuples have positive entries")
    return h


def joint_modulus(h: IndexTuple) -> int:
    """lcm of the entries; the level at which a tuple is resolved."""
    return math.lcm(*h)


def valuations_at(h: IndexTuple, ell: int) -> ValuationTuple:
    return tuple(valuation(x, ell) for x in h)


@dataclass(frozen=True)
class SquarefreeModulus:
    """A squarefree integer Q > 1, stored as its set of prime divisors."""

    primes: tuple[int, ...]

    def __post_init__(self):
        if not self.primes:
            raise ValueError("Q must be > 1")
        prev = 1
        for p in self.primes:
            if p <= prev or not is_prime(p):
                raise ValueError("primes must be distinct, ascending, prime")
            prev = p

    @classmethod
    def from_int(cls, q: int) -> "SquarefreeModulus":
        if q <= 1:
            raise ValueError("Q must be > 1")
        fac = factorize(q)
        if any(e > 1 for e in fac.values()):
            raise ValueError(f"{q} is not squarefree")
        return cls(tuple(sorted(fac)))

    @classmethod
    def up_to(cls, x: int) -> "SquarefreeModulus":
        """Q_x: the product of all primes <= x."""
        ps = primes_up_to(x)
        if not ps:
            raise ValueError("no primes <= x")
        return cls(tuple(ps))

    @property
    def value(self) -> int:
        out = 1
        for p in self.primes:
            out *= p
        return out

    def divides(self, other: "SquarefreeModulus") -> bool:
        return set(self.primes) <= set(other.primes)

    def is_smooth(self, m: int) -> bool:
        """True when every prime factor of m lies in this modulus."""
        if m == 1:
            return True
        for p in self.primes:
            while m % p == 0:
                m //= p
        return m == 1

    def smooth_numbers(self, bound: int) -> list[int]:
        out = [1]
        for p in self.primes:
            out.extend(x * q for x in list(out) for q in _powers(p, bound) if x * q <= bound)
            out = sorted(set(out))
        return [x for x in out if x <= bound]


def _powers(p: int, bound: int):
    q = p
    while q <= bound:
        yield q
        q *= p


# ---------------------------------------------------------------------------
# per-prime valuation constraint systems


@dataclass(frozen=True)
class ValuationPattern:
    """A product-form constraint on one prime's valuation tuple.

    bounds[i] = b means coordinate i must satisfy v_i < b; None means
    unconstrained. The all-None pattern is the trivial one.
    """

    bounds: tuple[int | None, ...]

    def __post_init__(self):
        for b in self.bounds:
            if b is not None and b < 1:
                raise ValueError("a bound of 0 would forbid the zero tuple")

    @classmethod
    def anything(cls, n: int) -> "ValuationPattern":
        return cls((None,) * n)

    @classmethod
    def exact_zero(cls, n: int) -> "ValuationPattern":
        return cls((1,) * n)

    @classmethod
    def below(cls, ks) -> "ValuationPattern":
        return cls(tuple(ks))

    @property
    def n(self) -> int:
        return len(self.bounds)

    def allows(self, v: ValuationTuple) -> bool:
        return all(b is None or x < b for x, b in zip(v, self.bounds))

    def is_trivial(self) -> bool:
        return all(b is None for b in self.bounds)

    def is_finite(self) -> bool:
        return all(b is not None for b in self.bounds)

    def tuples(self):
        if not self.is_finite():
            raise ValueError("infinite pattern cannot be enumerated")
        return list(iproduct(*(range(b) for b in self.bounds)))


# A constraint at one prime is either a pattern or an explicit finite set
# of valuation tuples (sorted for determinism).
VSpec = ValuationPattern | tuple


def _check_vspec(spec, n: int):
    if isinstance(spec, ValuationPattern):
        if spec.n != n:
            raise ValueError("pattern arity mismatch")
        return spec
    tuples = tuple(sorted({tuple(int(x) for x in t) for t in spec}))
    if not tuples:
        raise ValueError("empty valuation set at a listed prime")
    for t in tuples:
        if len(t) != n or any(x < 0 for x in t):
            raise ValueError(f"bad valuation tuple {t}")
    return tuples


def vspec_allows(spec: VSpec, v: ValuationTuple) -> bool:
    if isinstance(spec, ValuationPattern):
        return spec.allows(v)
    return tuple(v) in spec


@dataclass(frozen=True)
class ValuationMap:
    """Finitely many listed primes with explicit constraints + a default.

    The default must admit the zero tuple, so that only finitely many
    primes actually constrain anything and Euler products make sense.
    """

    n: int
    at: tuple[tuple[int, VSpec], ...]
    default: ValuationPattern

    def __post_init__(self):
        prev = 1
        for ell, spec in self.at:
            if ell <= prev or not is_prime(ell):
                raise ValueError("listed primes must be ascending primes")
            _check_vspec(spec, self.n)
            prev = ell
        if not self.default.allows((0,) * self.n):
            raise ValueError("default pattern must allow the zero tuple")

    @classmethod
    def build(cls, n: int, at: dict, default: ValuationPattern) -> "ValuationMap":
        items = tuple(
            (int(ell), _check_vspec(spec, n)) for ell, spec in sorted(at.items())
        )
        return cls(n, items, default)

    @property
    def listed(self) -> tuple[int, ...]:
        return tuple(ell for ell, _ in self.at)

    def spec_at(self, ell: int) -> VSpec:
        for p, spec in self.at:
            if p == ell:
                return spec
        return self.default

    def allows(self, ell: int, v: ValuationTuple) -> bool:
        return vspec_allows(self.spec_at(ell), v)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class Classification:
    kind: str  # cut | almost-cut | determined | none-of-these | unknown
    witness: int | None = None  # Q_0 for almost-cut

    KINDS = ("cut", "almost-cut", "determined", "none-of-these", "unknown")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown classification {self.kind!r}")

    def implies_determined(self) -> bool:
        return self.kind in ("cut", "almost-cut", "determined")


# ---------------------------------------------------------------------------
# descriptors


class IndexSet(ABC):
    """A subset of positive integer n-tuples with symbolic structure."""

    n: int

    @abstractmethod
    def contains(self, h: IndexTuple) -> bool: ...

    @abstractmethod
    def classification(self) -> Classification: ...

    @abstractmethod
    def label(self) -> str: ...

    def hq_member(self, h: IndexTuple, q: SquarefreeModulus) -> bool:
        """Membership in H_Q: only the valuations at primes dividing Q count."""
        raise UnsupportedScopeError(
            f"{self.label()} is membership-only; H_Q structure unavailable"
        )

    def valuation_map(self) -> ValuationMap:
        raise UnsupportedScopeError(
            f"{self.label()} has no per-prime product structure"
        )

    def coordinate_candidates(self, bound: int, smooth: SquarefreeModulus | None):
        """Per-coordinate superset of possible entries <= bound, ascending."""
        if smooth is None:
            base = range(1, bound + 1)
        else:
            base = smooth.smooth_numbers(bound)
        return [list(base) for _ in range(self.n)]

    def members(
        self, bound: int, smooth: SquarefreeModulus | None = None
    ) -> list[IndexTuple]:
        """All members with entries <= bound (and smooth, if given), lex order."""
        if bound < 1:
            raise ValueError("bound must be >= 1")
        cands = self.coordinate_candidates(bound, smooth)
        size = 1
        for c in cands:
            size *= len(c)
            if size > ENUMERATION_CAP:
                raise SizeLimitError(
                    f"enumeration would visit > {ENUMERATION_CAP} tuples; "
                    "lower the bound or pass a smoothness modulus"
                )
        return [h for h in iproduct(*cands) if self.contains(h)]


@dataclass(frozen=True)
class Equals(IndexSet):
    """The singleton {t}."""

    t: IndexTuple

    def __post_init__(self):
        object.__setattr__(self, "t", check_index_tuple(self.t))

    @property
    def n(self):
        return len(self.t)

    def contains(self, h):
        return tuple(h) == self.t

    def classification(self):
        return Classification("almost-cut", witness=_support_witness(self.t))

    def hq_member(self, h, q):
        return all(
            valuations_at(h, ell) == valuations_at(self.t, ell) for ell in q.primes
        )

    def valuation_map(self):
        at = {
            ell: (valuations_at(self.t, ell),)
            for ell in _tuple_support(self.t)
        }
        return ValuationMap.build(self.n, at, ValuationPattern.exact_zero(self.n))

    def coordinate_candidates(self, bound, smooth):
        ok = all(x <= bound for x in self.t) and (
            smooth is None or all(smooth.is_smooth(x) for x in self.t)
        )
        return [[x] for x in self.t] if ok else [[] for _ in self.t]

    def label(self):
        return f"equals{self.t}"


@dataclass(frozen=True)
class Divides(IndexSet):
    """Coordinatewise divisors of a fixed tuple t."""

    t: IndexTuple

    def __post_init__(self):
        object.__setattr__(self, "t", check_index_tuple(self.t))

    @property
    def n(self):
        return len(self.t)

    def contains(self, h):
        return all(t % x == 0 for x, t in zip(h, self.t)) and len(h) == self.n

    def classification(self):
        return Classification("almost-cut", witness=_support_witness(self.t))

    def hq_member(self, h, q):
        return all(
            all(
                a <= b
                for a, b in zip(valuations_at(h, ell), valuations_at(self.t, ell))
            )
            for ell in q.primes
        )

    def valuation_map(self):
        at = {}
        for ell in _tuple_support(self.t):
            caps = valuations_at(self.t, ell)
            at[ell] = ValuationPattern.below(tuple(v + 1 for v in caps))
        return ValuationMap.build(self.n, at, ValuationPattern.exact_zero(self.n))

    def coordinate_candidates(self, bound, smooth):
        out = []
        for t in self.t:
            divs = [d for d in range(1, min(t, bound) + 1) if t % d == 0]
            if smooth is not None:
                divs = [d for d in divs if smooth.is_smooth(d)]
            out.append(divs)
        return out

    def label(self):
        return f"divides{self.t}"


@dataclass(frozen=True)
class KFree(IndexSet):
    """Tuples whose i-th entry is k_i-free (no prime to the k_i-th power)."""

    k: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        if any(x < 1 for x in self.k):
            raise ValueError("k-free needs k >= 1")

    @property
    def n(self):
        return len(self.k)

    def contains(self, h):
        return all(
            all(e < k for e in factorize(x).values()) for x, k in zip(h, self.k)
        )

    def classification(self):
        return Classification("cut")

    def hq_member(self, h, q):
        return all(
            all(v < k for v, k in zip(valuations_at(h, ell), self.k))
            for ell in q.primes
        )

    def valuation_map(self):
        return ValuationMap.build(
            self.n, {}, ValuationPattern.below(self.k)
        )

    def coordinate_candidates(self, bound, smooth):
        base = super().coordinate_candidates(bound, smooth)
        return [
            [x for x in cand if all(e < k for e in factorize(x).values())]
            for cand, k in zip(base, self.k)
        ]

    def label(self):
        return f"kfree{self.k}"


@dataclass(frozen=True)
class ValuationConstraint(IndexSet):
    """Tuples cut out by an explicit per-prime valuation system."""

    vmap: ValuationMap

    @property
    def n(self):
        return self.vmap.n

    def contains(self, h):
        h = check_index_tuple(h, self.n)
        support = set()
        for x in h:
            support.update(factorize(x))
        support.update(self.vmap.listed)
        return all(
            self.vmap.allows(ell, valuations_at(h, ell)) for ell in sorted(support)
        )

    def classification(self):
        return Classification("cut")

    def hq_member(self, h, q):
        return all(
            self.vmap.allows(ell, valuations_at(h, ell)) for ell in q.primes
        )

    def valuation_map(self):
        return self.vmap

    def label(self):
        listed = ",".join(str(ell) for ell in self.vmap.listed)
        return f"valuation(at={listed or 'none'})"


@dataclass(frozen=True)
class FiniteSet(IndexSet):
    """An explicit finite collection of tuples."""

    tuples: tuple[IndexTuple, ...]

    def __post_init__(self):
        clean = tuple(sorted({check_index_tuple(t) for t in self.tuples}))
        if not clean:
            raise ValueError("empty finite set")
        arity = {len(t) for t in clean}
        if len(arity) != 1:
            raise ValueError("mixed arities")
        object.__setattr__(self, "tuples", clean)

    @property
    def n(self):
        return len(self.tuples[0])

    def contains(self, h):
        return tuple(h) in self.tuples

    def classification(self):
        support = 1
        for t in self.tuples:
            support = math.lcm(support, joint_modulus(t))
        return Classification("almost-cut", witness=max(2, squarefree_kernel(support)))

    def hq_member(self, h, q):
        image = {
            tuple(valuations_at(t, ell) for ell in q.primes) for t in self.tuples
        }
        return tuple(valuations_at(h, ell) for ell in q.primes) in image

    def valuation_map(self):
        if len(self.tuples) == 1:
            return Equals(self.tuples[0]).valuation_map()
        raise UnsupportedScopeError(
            "a finite set with several tuples is not a per-prime product; "
            "use the singleton-sum route (exact for finite sets)"
        )

    def coordinate_candidates(self, bound, smooth):
        cands = [set() for _ in range(self.n)]
        for t in self.tuples:
            if all(x <= bound for x in t) and (
                smooth is None or all(smooth.is_smooth(x) for x in t)
            ):
                for i, x in enumerate(t):
                    cands[i].add(x)
        return [sorted(c) for c in cands]

    def label(self):
        return f"finite[{len(self.tuples)}]"


@dataclass(frozen=True)
class PrimesSet(IndexSet):
    """n = 1: indices that are prime numbers.

    Determined by valuations (the valuation image is the zero vector plus
    the unit vectors) but not almost cut: no single modulus witnesses it.
    """

    n: int = 1

    def __post_init__(self):
        if self.n != 1:
            raise ValueError("the prime-index set is one-dimensional")

    def contains(self, h):
        return len(h) == 1 and is_prime(h[0])

    def classification(self):
        return Classification("determined")

    def hq_member(self, h, q):
        # v_Q(primes) = {0} union {unit vector at ell : ell | Q}: the Q-part
        # of h must be trivial or a single listed prime to the first power
        vq = [valuation(h[0], ell) for ell in q.primes]
        nonzero = [v for v in vq if v]
        return not nonzero or nonzero == [1]

    def coordinate_candidates(self, bound, smooth):
        ps = list(primes_up_to(bound))
        if smooth is not None:
            ps = [p for p in ps if p in set(smooth.primes)]
        return [ps]

    def label(self):
        return "primes"


@dataclass(frozen=True)
class PredicateSet(IndexSet):
    """Membership-only descriptor: an opaque predicate on tuples.

    classify() answers unknown; analytic machinery refuses these, and the
    empirical survey is the supported route.
    """

    name: str
    n: int
    fn: object  # callable tuple -> bool; not part of equality/hash

    def __eq__(self, other):
        return (
            isinstance(other, PredicateSet)
            and (self.name, self.n) == (other.name, other.n)
        )

    def __hash__(self):
        return hash((self.name, self.n))

    def contains(self, h):
        return bool(self.fn(tuple(h)))

    def classification(self):
        return Classification("unknown")

    def label(self):
        return f"predicate:{self.name}"


def _tuple_support(t: IndexTuple) -> list[int]:
    primes = set()
    for x in t:
        primes.update(factorize(x))
    return sorted(primes)


def _support_witness(t: IndexTuple) -> int:
    return max(2, squarefree_kernel(joint_modulus(t)))


# ---------------------------------------------------------------------------
# named predicates available to the CLI (callables cannot be configured)


def _even_prime_divisor_count(h):
    total = sum(factorize(h[0]).values())
    return total % 2 == 0


def _prime_square_pair(h):
    return is_prime(h[0]) and h[1] == h[0] ** 2


NAMED_PREDICATES = {
    "even-omega": (1, _even_prime_divisor_count),
    "prime-square-pair": (2, _prime_square_pair),
}


def named_predicate(name: str) -> PredicateSet:
    if name not in NAMED_PREDICATES:
        raise ValueError(
            f"unknown predicate {name!r}; available: {sorted(NAMED_PREDICATES)}"
        )
    n, fn = NAMED_PREDICATES[name]
    return PredicateSet(name, n, fn)


def classify(s: IndexSet) -> Classification:
    """Module-level spelling of the classification query."""
    return s.classification()
