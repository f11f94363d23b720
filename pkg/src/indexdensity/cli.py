"""Command-line harness: config in, deterministic result files out.

Config is JSON (inline flags override file values, unknown keys are
rejected), rationals serialize as "num/den" strings so nothing is lost to
floating point, and every command writes the same payload it printed when
--output is given. Exit codes: 0 success, 2 bad config, 3 refused or
inconclusive scope, 4 compare found an inconsistency.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .artin import euler_product, local_factor, prob_model_oracle
from .density import (
    DensityReport,
    LevelMap,
    correction_ratio,
    hooley_series,
    singleton_sum,
    valuation_density,
)
from .empirical import Congruence, SieveRange, survey, survey_many
from .errors import ConfigError, InconclusiveError, UnsupportedScopeError
from .exact import Interval
from .groups import GroupFamily, profile_of
from .index_sets import (
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
from .kummer import KummerModel, difference_tuple

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REFUSED = 3
EXIT_INCONSISTENT = 4


# ---------------------------------------------------------------------------
# serialization


def frac_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def interval_payload(iv: Interval) -> dict:
    lo, hi = iv.decimal_bounds()
    return {
        "low": frac_str(iv.low),
        "high": frac_str(iv.high),
        "decimal_low": lo,
        "decimal_high": hi,
    }


def report_payload(report: DensityReport) -> dict:
    return {
        "value": interval_payload(report.value),
        "method": report.method,
        "ledger": [[label, frac_str(x)] for label, x in report.ledger],
        "notes": list(report.notes),
    }


# ---------------------------------------------------------------------------
# config handling


_COMMON_KEYS = {
    "groups",
    "set",
    "congruence",
    "mode",
    "seed",
    "threads",
    "output",
    "cache_dir",
}

_COMMAND_KEYS = {
    "degree": _COMMON_KEYS | {"modulus", "levels", "prime_bound", "deficiency"},
    "artin": _COMMON_KEYS | {"map", "cutoff"},
    "artin-oracle": _COMMON_KEYS | {"ell", "v", "method", "samples"},
    "density": _COMMON_KEYS
    | {"method", "truncation", "cutoff", "bound", "smooth", "level_map"},
    "survey": _COMMON_KEYS | {"sieve_bound", "log_path"},
    "compare": _COMMON_KEYS
    | {
        "method",
        "truncation",
        "cutoff",
        "bound",
        "smooth",
        "level_map",
        "sieve_bound",
        "log_path",
    },
    "classify": _COMMON_KEYS,
    "paper-examples": _COMMON_KEYS | {"sieve_bound"},
}


def load_config(command: str, args) -> dict:
    cfg: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
    for key in ("mode", "output", "cache_dir", "log_path"):
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            cfg[key] = value
    for key in ("seed", "cutoff", "truncation", "bound", "sieve_bound", "samples"):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    allowed = _COMMAND_KEYS[command]
    unknown = sorted(set(cfg) - allowed)
    if unknown:
        raise ConfigError(
            f"unknown config keys for {command}: {', '.join(unknown)}"
        )
    return cfg


def build_family(cfg: dict) -> GroupFamily:
    groups = cfg.get("groups")
    if not groups:
        raise ConfigError("config needs 'groups': a list of generator lists")
    if isinstance(groups, str) or not all(
        isinstance(g, (list, tuple)) for g in groups
    ):
        raise ConfigError("'groups' must be a list of lists of rationals")
    try:
        return GroupFamily.from_strings(*groups)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_pattern(obj, n: int) -> ValuationPattern:
    if not isinstance(obj, dict) or set(obj) != {"bounds"}:
        raise ConfigError("a pattern is {'bounds': [int-or-null, ...]}")
    bounds = obj["bounds"]
    if len(bounds) != n:
        raise ConfigError(f"pattern arity {len(bounds)} != {n}")
    return ValuationPattern(tuple(None if b is None else int(b) for b in bounds))


def _parse_vspec(obj, n: int):
    if isinstance(obj, dict):
        return _parse_pattern(obj, n)
    if isinstance(obj, list):
        return tuple(tuple(int(x) for x in t) for t in obj)
    raise ConfigError("a valuation spec is a pattern object or a tuple list")


def build_valuation_map(obj: dict, n: int) -> ValuationMap:
    keys = set(obj) - {"at", "default"}
    if keys:
        raise ConfigError(f"unknown valuation map keys: {sorted(keys)}")
    at = {
        int(ell): _parse_vspec(spec, n)
        for ell, spec in (obj.get("at") or {}).items()
    }
    default_obj = obj.get("default")
    default = (
        ValuationPattern.exact_zero(n)
        if default_obj is None
        else _parse_pattern(default_obj, n)
    )
    try:
        return ValuationMap.build(n, at, default)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_index_set(cfg: dict, n: int):
    desc = cfg.get("set")
    if desc is None:
        raise ConfigError("config needs 'set': an index set descriptor")
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ConfigError("'set' must be an object with a 'kind'")
    kind = desc["kind"]
    extra = set(desc) - {"kind", "tuple", "tuples", "k", "map", "name"}
    if extra:
        raise ConfigError(f"unknown set keys: {sorted(extra)}")
    try:
        if kind == "equals":
            return Equals(tuple(int(x) for x in desc["tuple"]))
        if kind == "divides":
            return Divides(tuple(int(x) for x in desc["tuple"]))
        if kind == "kfree":
            k = desc["k"]
            ks = (int(k),) * n if isinstance(k, int) else tuple(map(int, k))
            return KFree(ks)
        if kind == "finite":
            return FiniteSet(
                tuple(tuple(int(x) for x in t) for t in desc["tuples"])
            )
        if kind == "primes":
            return PrimesSet()
        if kind == "valuations":
            return ValuationConstraint(build_valuation_map(desc["map"], n))
        if kind == "predicate":
            return named_predicate(desc["name"])
    except KeyError as exc:
        raise ConfigError(f"set descriptor missing {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown set kind {kind!r}")


def build_congruence(cfg: dict) -> Congruence:
    obj = cfg.get("congruence")
    if obj is None:
        return Congruence.trivial()
    if not isinstance(obj, dict) or set(obj) != {"modulus", "residues"}:
        raise ConfigError("congruence is {'modulus': m, 'residues': [...]}")
    try:
        return Congruence(int(obj["modulus"]), frozenset(map(int, obj["residues"])))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_level_map(cfg: dict) -> LevelMap:
    obj = cfg.get("level_map")
    if obj is None:
        return LevelMap.identity()
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError("'level_map' must be an object with a 'kind'")
    kind = obj["kind"]
    try:
        if kind == "identity":
            return LevelMap.identity()
        if kind == "times":
            return LevelMap.times(int(obj["t"]))
        if kind == "times-local":
            return LevelMap.times_local(int(obj["t"]))
        if kind == "power":
            return LevelMap.power(int(obj["k"]))
        if kind == "prime-powers":
            return LevelMap.prime_powers(
                {int(ell): int(k) for ell, k in obj["table"].items()}
            )
    except KeyError as exc:
        raise ConfigError(f"level map missing {exc}") from exc
    raise ConfigError(f"unknown level map kind {kind!r}")


def _model(family: GroupFamily, cfg: dict) -> KummerModel:
    kwargs = {}
    if cfg.get("cache_dir"):
        kwargs["cache_dir"] = cfg["cache_dir"]
    if cfg.get("prime_bound"):
        kwargs["prime_bound"] = int(cfg["prime_bound"])
    return KummerModel(family, **kwargs)


def _require_trivial_congruence(congruence: Congruence):
    if not congruence.is_trivial():
        raise UnsupportedScopeError(
            "analytic densities support only the trivial congruence "
            "condition; nontrivial classes interact with the cyclotomic "
            "layers and are measured empirically instead (use survey)"
        )


# ---------------------------------------------------------------------------
# commands


def run_degree(cfg: dict) -> dict:
    family = build_family(cfg)
    model = _model(family, cfg)
    mode = cfg.get("mode", "generic")
    if "deficiency" in cfg:
        d = cfg["deficiency"]
        if not isinstance(d, dict) or set(d) != {"ell", "e"}:
            raise ConfigError("deficiency request is {'ell': l, 'e': [...]}")
        ell = int(d["ell"])
        e = tuple(sorted((int(x) for x in d["e"]), reverse=True))
        klass = difference_tuple(e, model.gap_cap())
        c = model.deficiency(ell, klass)
        return {
            "deficiency": c,
            "ell": ell,
            "class": klass.key(),
            "gap_cap": model.gap_cap(),
        }
    modulus = int(cfg.get("modulus", 0))
    levels = tuple(int(x) for x in cfg.get("levels", ()))
    if modulus < 1 or not levels:
        raise ConfigError("degree needs 'modulus' and 'levels'")
    value = model.degree(modulus, levels, mode)
    payload = {
        "modulus": modulus,
        "levels": list(levels),
        "mode": mode,
        "degree": value,
    }
    if mode == "corrected" and modulus <= model.direct_bound:
        try:
            est = model.degree_estimate(modulus, levels)
            payload["sampling"] = {
                "hits": est.hits,
                "total": est.total,
                "generic_bound": est.generic_bound,
            }
        except (InconclusiveError, UnsupportedScopeError):
            payload["sampling"] = None
    return payload


def run_artin(cfg: dict) -> dict:
    family = build_family(cfg)
    profile = profile_of(family)
    cutoff = int(cfg.get("cutoff", 10**5))
    if "map" in cfg and "set" in cfg:
        raise ConfigError("give either 'map' or 'set', not both")
    if "map" in cfg:
        vmap = build_valuation_map(cfg["map"], profile.n)
    else:
        index_set = build_index_set(cfg, profile.n)
        vmap = index_set.valuation_map()
    ep = euler_product(vmap, profile, cutoff)
    small = [[ell, frac_str(a)] for ell, a in ep.factors[:25]]
    return {
        "interval": interval_payload(ep.interval),
        "cutoff": ep.cutoff,
        "zero_at": ep.zero_at,
        "leading_factors": small,
    }


def run_artin_oracle(cfg: dict) -> dict:
    family = build_family(cfg)
    profile = profile_of(family)
    ell = int(cfg.get("ell", 0))
    if ell < 2:
        raise ConfigError("artin-oracle needs a prime 'ell'")
    v = tuple(int(x) for x in cfg.get("v", ()))
    if len(v) != profile.n:
        raise ConfigError(f"'v' must have {profile.n} coordinates")
    method = cfg.get("method", "exact")
    target = local_factor(ell, v, profile)
    payload = {"ell": ell, "v": list(v), "target": frac_str(target)}
    if method == "exact":
        value = prob_model_oracle(ell, v, family, "exact")
        payload["oracle"] = frac_str(value)
        payload["agrees"] = value == target
    else:
        est = prob_model_oracle(
            ell,
            v,
            family,
            "monte-carlo",
            samples=int(cfg.get("samples", 10**6)),
            seed=int(cfg.get("seed", 0)),
        )
        payload["oracle"] = est.value
        payload["sigma"] = est.sigma
        payload["kept"] = est.kept
        payload["agrees"] = est.agrees_with(target)
    return payload


def run_density(cfg: dict) -> dict:
    family = build_family(cfg)
    _require_trivial_congruence(build_congruence(cfg))
    method = cfg.get("method", "euler")
    model = _model(family, cfg)
    mode = cfg.get("mode", "generic")
    if method == "series":
        if len(family) != 1:
            raise ConfigError("series method needs a single group")
        report = hooley_series(
            family.groups[0],
            build_level_map(cfg),
            int(cfg.get("truncation", 10**4)),
            mode,
            model=model,
        )
    elif method == "euler":
        index_set = build_index_set(cfg, len(family))
        report = valuation_density(
            family,
            index_set,
            cutoff=int(cfg.get("cutoff", 10**5)),
            model=model,
            corrected=(mode == "corrected"),
        )
    elif method == "singletons":
        index_set = build_index_set(cfg, len(family))
        smooth = cfg.get("smooth")
        report = singleton_sum(
            family,
            index_set,
            bound=int(cfg.get("bound", 10**3)),
            smooth=SquarefreeModulus.from_int(int(smooth)) if smooth else None,
            cutoff=int(cfg.get("cutoff", 10**5)),
            model=model,
            corrected=(mode == "corrected"),
        )
    else:
        raise ConfigError("method is one of series, euler, singletons")
    return report_payload(report)


def run_survey(cfg: dict) -> dict:
    family = build_family(cfg)
    srange = SieveRange.up_to(int(cfg.get("sieve_bound", 10**6)))
    index_set = build_index_set(cfg, len(family))
    congruence = build_congruence(cfg)
    rep = survey(
        family, srange, index_set, congruence, log_path=cfg.get("log_path")
    )
    lo, hi = rep.wilson
    return {
        "set": rep.label,
        "congruence": congruence.label(),
        "range": [srange.low, srange.high],
        "hits": rep.hits,
        "total": rep.total,
        "skipped": rep.skipped,
        "estimate": rep.estimate,
        "wilson_low": lo,
        "wilson_high": hi,
    }


def run_compare(cfg: dict) -> tuple[dict, int]:
    analytic = run_density(cfg)
    empirical = run_survey(cfg)
    a_low = Fraction(*map(int, analytic["value"]["low"].split("/")))
    a_high = Fraction(*map(int, analytic["value"]["high"].split("/")))
    verdict = "inconclusive"
    if empirical["total"] > 0:
        overlap = float(a_low) <= empirical["wilson_high"] and empirical[
            "wilson_low"
        ] <= float(a_high)
        verdict = "consistent" if overlap else "inconsistent"
    payload = {
        "analytic": analytic,
        "empirical": empirical,
        "verdict": verdict,
    }
    code = {
        "consistent": EXIT_OK,
        "inconsistent": EXIT_INCONSISTENT,
        "inconclusive": EXIT_REFUSED,
    }[verdict]
    return payload, code


def run_classify(cfg: dict) -> dict:
    family_given = bool(cfg.get("groups"))
    n = len(build_family(cfg)) if family_given else 1
    index_set = build_index_set(cfg, n)
    klass = index_set.classification()
    payload = {
        "set": index_set.label(),
        "kind": klass.kind,
        "witness": klass.witness,
    }
    try:
        vmap = index_set.valuation_map()
        payload["listed_primes"] = list(vmap.listed)
    except UnsupportedScopeError:
        payload["listed_primes"] = None
    return payload


def run_paper_examples(cfg: dict) -> dict:
    """The bundled worked examples, analytic next to empirical."""
    bound = int(cfg.get("sieve_bound", 10**5))
    rows = []

    fam2 = GroupFamily.from_strings(["2"])
    srange = SieveRange.up_to(bound)
    sets = [Equals((1,)), Equals((2,)), KFree((2,)), PrimesSet()]
    reports = survey_many(fam2, srange, sets)

    artin = valuation_density(fam2, Equals((1,)), cutoff=10**4)
    rows.append(_example_row("index 1 (primitive root)", artin, reports[0]))

    ziegler = hooley_series(fam2.groups[0], LevelMap.times(2), 3000)
    rows.append(_example_row("index exactly 2", ziegler, reports[1]))

    sqfree = valuation_density(fam2, KFree((2,)), cutoff=10**4)
    rows.append(_example_row("squarefree index", sqfree, reports[2]))

    prime_index = singleton_sum(fam2, PrimesSet(), bound=200, cutoff=10**4)
    rows.append(_example_row("prime index", prime_index, reports[3]))

    fam23 = GroupFamily.from_strings(["2"], ["3"])
    both = valuation_density(fam23, Equals((1, 1)), cutoff=10**4)
    both_emp = survey(fam23, srange, Equals((1, 1)))
    rows.append(_example_row("both primitive roots", both, both_emp))

    fam22 = GroupFamily.from_strings(["2"], ["2"])
    pair = named_predicate("prime-square-pair")
    pair_emp = survey(fam22, srange, pair)
    try:
        singleton_sum(fam22, pair, bound=50)
        refusal = "unexpectedly accepted"
    except UnsupportedScopeError as exc:
        refusal = f"refused: {exc}"
    rows.append(
        {
            "example": "impossible pair (q, q^2), equal groups",
            "analytic": refusal,
            "empirical": f"{pair_emp.hits}/{pair_emp.total}",
            "agrees": pair_emp.hits == 0,
        }
    )
    return {"sieve_bound": bound, "rows": rows}


def _example_row(name: str, report: DensityReport, freq) -> dict:
    lo, hi = report.value.decimal_bounds(6)
    w_lo, w_hi = freq.wilson
    agrees = float(report.value.low) <= w_hi and w_lo <= float(report.value.high)
    return {
        "example": name,
        "analytic": f"[{lo}, {hi}]",
        "empirical": f"{freq.estimate:.6f} ({freq.hits}/{freq.total})",
        "agrees": agrees,
    }


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="indexdensity",
        description="Densities of primes filtered by multiplicative index",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "degree": "cyclotomic-Kummer degrees, generic or measured",
        "artin": "Euler product over local valuation series",
        "artin-oracle": "probabilistic model vs the closed form",
        "density": "analytic density by series, euler, or singletons",
        "survey": "sieve primes and measure index frequencies",
        "compare": "run density and survey, check consistency",
        "classify": "classify an index set descriptor",
        "paper-examples": "run the bundled worked examples",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--output", help="write the result payload as JSON")
        p.add_argument("--cache-dir", dest="cache_dir")
        p.add_argument("--mode", choices=["generic", "corrected"])
        p.add_argument("--seed", type=int)
        p.add_argument("--cutoff", type=int)
        p.add_argument("--truncation", type=int)
        p.add_argument("--bound", type=int)
        p.add_argument("--sieve-bound", dest="sieve_bound", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--log-path", dest="log_path")
    return parser


_RUNNERS = {
    "degree": run_degree,
    "artin": run_artin,
    "artin-oracle": run_artin_oracle,
    "density": run_density,
    "survey": run_survey,
    "classify": run_classify,
    "paper-examples": run_paper_examples,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.command, args)
        if args.command == "compare":
            payload, code = run_compare(cfg)
        else:
            payload, code = _RUNNERS[args.command](cfg), EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UnsupportedScopeError, InconclusiveError) as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    text = json.dumps(
        {"command": args.command, "result": payload}, indent=2, sort_keys=True
    )
    print(text)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
