"""Densities of primes classified by the index of multiplicative groups.

Given finitely generated subgroups W_1, ..., W_n of Q*, each prime p (away
from finitely many) yields an index tuple: the i-th entry is the index of
W_i's reduction inside the full multiplicative group mod p. The package
computes the natural densities of primes whose index tuple lands in a
given set, four independent ways (Moebius series, Euler products of local
factors, per-tuple singleton sums, and a probabilistic splitting model),
measures cyclotomic-Kummer degree deficiencies by sampling when the
generic formulas can be off at small primes, and checks everything
against direct sieve counts.
"""

from .arith import (
    euler_phi,
    factorize,
    is_prime,
    moebius,
    moebius_sieve,
    primes_up_to,
    squarefree_kernel,
    valuation,
)
from .artin import (
    EulerProduct,
    LocalSeries,
    ProbEstimate,
    corner_degree,
    euler_product,
    inclusion_exclusion,
    local_factor,
    local_series,
    prob_model_oracle,
)
from .density import (
    CorrectionRatio,
    DensityReport,
    LevelMap,
    correction_ratio,
    hooley_series,
    singleton_sum,
    valuation_density,
)
from .empirical import (
    Congruence,
    DistributionReport,
    FrequencyReport,
    IndexObservation,
    SieveRange,
    distribution,
    index_tuple,
    observations,
    survey,
    survey_many,
    wilson_interval,
)
from .errors import (
    ConfigError,
    FactorizationError,
    InconclusiveError,
    SizeLimitError,
    UnsupportedScopeError,
)
from .exact import Interval
from .groups import (
    FactoredRational,
    GroupFamily,
    MultGroup,
    RankProfile,
    entanglement_primes,
    in_divisible_hull,
    is_separated,
    parse_rational,
    profile_of,
    rank,
    rank_profile,
)
from .index_sets import (
    Classification,
    Divides,
    Equals,
    FiniteSet,
    IndexSet,
    KFree,
    PredicateSet,
    PrimesSet,
    SquarefreeModulus,
    ValuationConstraint,
    ValuationMap,
    ValuationPattern,
    classify,
    named_predicate,
)
from .kummer import (
    DegreeEstimate,
    DifferenceTuple,
    KummerModel,
    degree,
    degree_estimate,
    difference_tuple,
    estimate_deficiency,
    generic_exponent,
    generic_valuation,
)

__all__ = [
    "Classification",
    "ConfigError",
    "Congruence",
    "CorrectionRatio",
    "DegreeEstimate",
    "DensityReport",
    "DifferenceTuple",
    "DistributionReport",
    "Divides",
    "Equals",
    "EulerProduct",
    "FactorizationError",
    "FactoredRational",
    "FiniteSet",
    "FrequencyReport",
    "GroupFamily",
    "InconclusiveError",
    "IndexObservation",
    "IndexSet",
    "Interval",
    "KFree",
    "KummerModel",
    "LevelMap",
    "LocalSeries",
    "MultGroup",
    "PredicateSet",
    "PrimesSet",
    "ProbEstimate",
    "RankProfile",
    "SieveRange",
    "SizeLimitError",
    "SquarefreeModulus",
    "UnsupportedScopeError",
    "ValuationConstraint",
    "ValuationMap",
    "ValuationPattern",
    "classify",
    "corner_degree",
    "correction_ratio",
    "degree",
    "degree_estimate",
    "difference_tuple",
    "distribution",
    "entanglement_primes",
    "estimate_deficiency",
    "euler_phi",
    "euler_product",
    "factorize",
    "generic_exponent",
    "generic_valuation",
    "hooley_series",
    "in_divisible_hull",
    "inclusion_exclusion",
    "index_tuple",
    "is_prime",
    "is_separated",
    "local_factor",
    "local_series",
    "moebius",
    "moebius_sieve",
    "named_predicate",
    "observations",
    "parse_rational",
    "prob_model_oracle",
    "primes_up_to",
    "profile_of",
    "rank",
    "rank_profile",
    "singleton_sum",
    "squarefree_kernel",
    "survey",
    "survey_many",
    "valuation",
    "valuation_density",
    "wilson_interval",
]
