#!/usr/bin/env python3
"""Where the generic degree formula breaks and how the model notices.

[Q(zeta_m, W^{1/n}) : Q] is phi(m) * n^rank for most inputs, but
radicals can collide with roots of unity (sqrt(2) inside zeta_8) or
with each other (8 = 2^3 is already a cube up to rationals). The model
measures the gap by counting split primes and snapping to a divisor,
then reuses the measured deficiency everywhere in its class.
"""

from indexdensity import (
    GroupFamily,
    KummerModel,
    degree_estimate,
    entanglement_primes,
    valuation_density,
    Equals,
)


def show(family, label):
    model = KummerModel(family)
    print(f"{label}: scope={model.deficiency_scope()}", end="")
    print(f" lattice primes={entanglement_primes(family)}")
    for modulus, levels in ((8, (8,)), (9, (9,)), (25, (5,))):
        generic = model.degree(modulus, levels, "generic")
        corrected = model.degree(modulus, levels, "corrected")
        flag = "  <- deficiency" if generic != corrected else ""
        print(
            f"  Q(zeta_{modulus}, W^(1/{levels[0]})): generic {generic:>5},"
            f" corrected {corrected:>5}{flag}"
        )


show(GroupFamily.from_strings(["2"]), "W = <2>")
show(GroupFamily.from_strings(["8"]), "W = <8>")
show(GroupFamily.from_strings(["4"]), "W = <4>")

est = degree_estimate(GroupFamily.from_strings(["2"]), 8, (8,))
print(
    f"\nsampling run for (zeta_8, 2^(1/8)): {est.hits} splits in "
    f"{est.total} primes -> degree {est.value} (generic bound {est.generic_bound})"
)

# a wrong degree is not cosmetic: it shifts densities
fam8 = GroupFamily.from_strings(["8"])
for corrected in (False, True):
    rep = valuation_density(fam8, Equals((1,)), cutoff=2000, corrected=corrected)
    lo, hi = rep.value.decimal_bounds(6)
    mode = "corrected" if corrected else "generic  "
    print(f"density of index 1 for <8>, {mode} degrees: [{lo}, {hi}]")
