"""Exact-arithmetic verification engine for four rank-reduced c=24 lattice
constructions and the denominator identities of their generalized Kac-Moody
algebras (p in {2, 3, 5, 7})."""

__version__ = "0.1.0"

SUPPORTED_PRIMES = (2, 3, 5, 7)


def eta_weight(p: int) -> int:
    """m = 24/(p+1), the eta exponent attached to p."""
    if p not in SUPPORTED_PRIMES:
        raise ValueError(f"unsupported p = {p}")
    return 24 // (p + 1)


def num_components(p: int) -> int:
    """r = 48/(q(p+1)) with q = p-1: the number of affine factors."""
    q = p - 1
    if p not in SUPPORTED_PRIMES or 48 % (q * (p + 1)):
        raise ValueError(f"unsupported p = {p}")
    return 48 // (q * (p + 1))
