import math

import pytest

from indexdensity.arith import (
    euler_phi,
    factorize,
    is_kfree,
    is_prime,
    moebius,
    moebius_sieve,
    primes_up_to,
    squarefree_kernel,
    valuation,
)


def test_is_prime_matches_sieve():
    primes = set(primes_up_to(5000))
    for n in range(5001):
        assert is_prime(n) == (n in primes), n


def test_factorize_roundtrip_small():
    for n in range(1, 3000):
        fac = factorize(n)
        rebuilt = 1
        for p, e in fac.items():
            assert is_prime(p)
            assert e >= 1
            rebuilt *= p**e
        assert rebuilt == n


def test_factorize_semiprime_via_rho():
    p, q = 999983, 999979
    assert factorize(p * q) == {p: 1, q: 1}


def test_factorize_rejects_nonpositive():
    for bad in (0, -4):
        with pytest.raises(ValueError):
            factorize(bad)


def test_euler_phi_brute():
    for n in range(1, 400):
        brute = sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)
        assert euler_phi(n) == brute


def test_moebius_sieve_matches_pointwise():
    mu = moebius_sieve(4000)
    assert mu[1] == 1
    for n in range(1, 4001):
        assert int(mu[n]) == moebius(n), n


def test_valuation():
    assert valuation(24, 2) == 3
    assert valuation(24, 3) == 1
    assert valuation(24, 5) == 0
    assert valuation(1, 7) == 0


def test_squarefree_kernel_and_kfree():
    assert squarefree_kernel(1) == 1
    assert squarefree_kernel(12) == 6
    assert squarefree_kernel(49) == 7
    for n in range(1, 2000):
        fac = factorize(n)
        assert is_kfree(n, 2) == all(e < 2 for e in fac.values())
        assert is_kfree(n, 3) == all(e < 3 for e in fac.values())
