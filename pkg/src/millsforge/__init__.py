"""Certified digits of prime-representing constants.

Interval arithmetic on dyadic numbers, primality with evidence levels,
nested-interval prime chains, Mersenne-seeded constants, a handful of
classic prime formulas, and a backtracking search for square-exponent
constants.
"""
from .errors import (
    ConstructionError,
    DomainError,
    HorizonError,
    IntegrityError,
    MillsForgeError,
    PrecisionError,
    ResourceError,
)
from .numerics import DigitCertificate, Dyadic, DyadicInterval, digits
from .primality import Evidence, PrimeWitness, SearchPolicy, is_prime, least_prime_in

__all__ = [
    "ConstructionError",
    "DigitCertificate",
    "DomainError",
    "Dyadic",
    "DyadicInterval",
    "Evidence",
    "HorizonError",
    "IntegrityError",
    "MillsForgeError",
    "PrecisionError",
    "PrimeWitness",
    "ResourceError",
    "SearchPolicy",
    "digits",
    "is_prime",
    "least_prime_in",
]

__version__ = "0.1.0"
