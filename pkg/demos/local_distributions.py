#!/usr/bin/env python3
"""How often does ell^v exactly divide the index of 2 mod p?

Tabulates the exact local densities next to sieve frequencies for a few
small ell. The v column is the ell-adic valuation of (p-1)/ord_p(2).
"""

from fractions import Fraction

from indexdensity import (
    GroupFamily,
    SieveRange,
    distribution,
    local_factor,
    profile_of,
)

BOUND = 400000


def main():
    family = GroupFamily.from_strings(["2"])
    profile = profile_of(family)
    srange = SieveRange.up_to(BOUND)

    for ell in (3, 5, 7):
        rep = distribution(family, srange, ell, 3)
        print(f"ell = {ell}, primes scanned: {rep.total}")
        print("  v   exact          as float    observed")
        for v in range(4):
            exact = local_factor(ell, (v,), profile)
            freq = rep.frequency((v,))
            print(
                f"  {v}   {str(exact):<12}   {float(exact):.7f}   "
                f"{float(freq):.7f}  ({rep.count((v,))} primes)"
            )
        overflow = rep.frequency((4,))
        tail = 1 - sum(
            (local_factor(ell, (v,), profile) for v in range(4)), Fraction(0)
        )
        print(
            f"  >3  {str(tail):<12}   {float(tail):.7f}   {float(overflow):.7f}"
        )
        print()


if __name__ == "__main__":
    main()
