"""qsmooth: exact deformation-theoretic verification over the rationals.

Subpackages:
  poly   - sparse exact polynomials, monomial orders, text parser
  gb     - Groebner bases for ideals and free-module submodules
  t1     - germ presentations, Tjurina modules, good deformation directions
  equiv  - cyclic group actions, characters, ordinarity, equivariant checks
  geom   - projective/weighted ambients, singular loci, smoothing families
  cli    - manifest-driven verification runner
"""

from .poly import MonomialOrder, ParseError, PolyError, Polynomial, parse, poly_to_text
from .gb import (
    GroebnerBasis,
    QuotientBasis,
    VectorPolynomial,
    buchberger,
    groebner_ideal,
    membership,
    normal_form,
    quotient_dimension,
)

__all__ = [
    "MonomialOrder",
    "ParseError",
    "PolyError",
    "Polynomial",
    "parse",
    "poly_to_text",
    "GroebnerBasis",
    "QuotientBasis",
    "VectorPolynomial",
    "buchberger",
    "groebner_ideal",
    "membership",
    "normal_form",
    "quotient_dimension",
]

__version__ = "0.1.0"
