"""Germ presentations and their first-order deformation modules.

A germ is presented by d polynomial equations in e variables, each with
no constant and no linear part (a minimal presentation; minimalize()
produces one from raw equations).  The module of first-order deformations
is P^d modulo the submodule spanned by the Jacobian columns and the
equation multiples of the unit vectors; its vector-space dimension is the
Tjurina number, finite exactly when the singularity is isolated.

A deformation class is "good" when adding it to the equations strictly
drops the embedding dimension of every nearby singular point of the
deformed fibers; operationally this is decided by the constant part of
the class, which is an invariant of the class (every submodule generator
has zero constant vector).  The constant-part test is cross-checked by an
independent rank computation on the total space of the linear realization.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .gb import (
    GREVLEX,
    GroebnerBasis,
    QuotientBasis,
    VectorPolynomial,
    buchberger,
    normal_form,
    quotient_dimension,
)
from .poly import Polynomial, PolyError


class GermError(ValueError):
    pass


class NotProperError(GermError):
    """The submodule's constant parts span everything: it cannot be proper
    (it would be the whole deformation module by Nakayama)."""


@dataclass(frozen=True)
class GermPresentation:
    """Minimal presentation: d equations in e variables, all in m^2."""

    nvars: int
    equations: tuple  # tuple[Polynomial, ...]
    var_names: Optional[tuple] = None

    def __post_init__(self):
        for f in self.equations:
            if f.nvars != self.nvars:
                raise GermError("equation variable count mismatch")
            if f.constant_term() != 0:
                raise GermError("equation does not vanish at the origin")
            if not f.linear_part().is_zero():
                raise GermError(
                    "equation has a linear part; minimalize the presentation first"
                )
        if self.var_names is not None and len(self.var_names) != self.nvars:
            raise GermError("variable name count mismatch")

    @property
    def e(self) -> int:
        return self.nvars

    @property
    def d(self) -> int:
        return len(self.equations)

    @property
    def dim(self) -> int:
        return self.nvars - len(self.equations)

    def is_smooth(self) -> bool:
        """A minimal presentation with no equations is a smooth germ."""
        return not self.equations

    def names(self) -> tuple:
        if self.var_names is not None:
            return self.var_names
        return tuple(f"x{i+1}" for i in range(self.nvars))


def minimalize(
    equations: Sequence[Polynomial], var_names: Optional[Sequence[str]] = None
) -> GermPresentation:
    """Reduce raw origin-vanishing equations to a minimal presentation.

    Any equation with a nonzero linear part is solved for a variable with a
    unit linear coefficient and substituted away, shrinking both the
    variable and the equation count.  Zero equations are dropped.  The
    solved variable must not occur in the higher-order part of its own
    equation: that is the polynomially-exact case, and it covers every
    presentation handled here (a power-series solution would be needed
    otherwise, and is reported instead of silently truncating).
    """
    eqs = list(equations)
    if not eqs:
        raise GermError("empty equation list")
    nvars = eqs[0].nvars
    names = list(var_names) if var_names is not None else [f"x{i+1}" for i in range(nvars)]
    for f in eqs:
        if f.nvars != nvars:
            raise GermError("equation variable count mismatch")
        if f.constant_term() != 0:
            raise GermError("equation does not vanish at the origin")

    while True:
        eqs = [f for f in eqs if not f.is_zero()]
        for f in eqs:
            if f.constant_term() != 0:
                raise GermError("inconsistent system: an equation has a nonzero constant term")
        pivot = None
        saw_linear = False
        for idx, f in enumerate(eqs):
            lin = f.linear_part()
            if lin.is_zero():
                continue
            saw_linear = True
            for expt, coeff in lin.terms.items():
                var = expt.index(1)
                if all(e[var] == 0 for e in f.terms if e != expt):
                    pivot = (idx, var, coeff)
                    break
            if pivot is not None:
                break
        if pivot is None:
            if saw_linear:
                raise GermError(
                    "cannot minimalize polynomially: every solvable variable "
                    "reappears in higher-order terms of its own equation"
                )
            return GermPresentation(nvars, tuple(eqs), tuple(names))
        idx, var, coeff = pivot
        f = eqs.pop(idx)
        # x_var = -(f - coeff*x_var)/coeff, which involves only other variables
        rest = f - Polynomial.variable(nvars, var) * coeff
        solution = rest * (Fraction(-1) / coeff)
        # re-express everything in the remaining variables
        remaining = [i for i in range(nvars) if i != var]
        images = []
        for i in range(nvars):
            if i == var:
                images.append(
                    _drop_variable(solution, var)
                )
            else:
                images.append(
                    Polynomial.variable(nvars - 1, remaining.index(i))
                )
        eqs = [g.substitute(images, out_nvars=nvars - 1) for g in eqs]
        names = [n for i, n in enumerate(names) if i != var]
        nvars -= 1
        if nvars == 0:
            eqs = [f for f in eqs if not f.is_zero()]
            for f in eqs:
                if f.constant_term() != 0:
                    raise GermError(
                        "inconsistent system: an equation has a nonzero constant term"
                    )
            return GermPresentation(0, tuple(eqs), tuple())


def _drop_variable(p: Polynomial, var: int) -> Polynomial:
    """Reindex away an unused variable."""
    out = {}
    for expt, coeff in p.terms.items():
        if expt[var] != 0:
            raise GermError("cannot drop a variable still in use")
        out[expt[:var] + expt[var + 1 :]] = coeff
    return Polynomial(p.nvars - 1, out)


def t1_generators(germ: GermPresentation) -> list:
    """Generators of the submodule presenting the deformation module:
    Jacobian columns and equation multiples of the unit vectors."""
    d, e = germ.d, germ.e
    gens = []
    for i in range(e):
        gens.append(
            VectorPolynomial(tuple(f.partial_derivative(i) for f in germ.equations))
        )
    for k in range(d):
        for j in range(d):
            comps = [Polynomial.zero(e)] * d
            comps[j] = germ.equations[k]
            gens.append(VectorPolynomial(tuple(comps)))
    return gens


@dataclass(frozen=True)
class T1Presentation:
    """The deformation module P^d modulo the Jacobian submodule, with its
    standard monomial-vector basis; tjurina None means infinite."""

    germ: GermPresentation
    gb: Optional[GroebnerBasis]
    quotient: QuotientBasis
    tjurina: Optional[int]

    @property
    def rank(self) -> int:
        return self.germ.d


def t1_module(germ: GermPresentation, max_degree: Optional[int] = None) -> T1Presentation:
    """Compute the deformation module of a minimal germ presentation."""
    if germ.d == 0:
        return T1Presentation(germ, None, QuotientBasis(tuple(), 0), 0)
    gens = t1_generators(germ)
    basis = buchberger(gens, GREVLEX, max_degree)
    for g in basis.generators:
        if any(c != 0 for c in g.constant_vector()):
            raise GermError("reduced basis has a constant vector part; presentation not minimal")
    quot = quotient_dimension(basis)
    return T1Presentation(germ, basis, quot, quot.dimension)


@dataclass(frozen=True)
class T1Class:
    """A first-order deformation class with its canonical representative."""

    t1: T1Presentation
    representative: VectorPolynomial
    canonical: VectorPolynomial = field(init=False)

    def __post_init__(self):
        if self.representative.rank != self.t1.rank:
            raise GermError("class rank mismatch")
        if self.representative.nvars != self.t1.germ.e:
            raise GermError("class variable count mismatch")
        if self.t1.gb is None:
            canon = self.representative
        else:
            canon = normal_form(self.representative, self.t1.gb)
        object.__setattr__(self, "canonical", canon)

    @staticmethod
    def unit(t1: T1Presentation, index: int) -> "T1Class":
        return T1Class(t1, VectorPolynomial.unit(t1.rank, t1.germ.e, index))

    @staticmethod
    def from_polynomial(t1: T1Presentation, p: Polynomial) -> "T1Class":
        if t1.rank != 1:
            raise GermError("polynomial classes only for hypersurface germs")
        return T1Class(t1, VectorPolynomial((p,)))

    def __add__(self, other: "T1Class") -> "T1Class":
        if other.t1 is not self.t1:
            raise GermError("classes over different presentations")
        return T1Class(self.t1, self.representative + other.representative)

    def is_zero(self) -> bool:
        return self.canonical.is_zero()


def const_part(cls: T1Class) -> tuple:
    """The d-tuple of constant terms; identical for all representatives of
    the class because the submodule generators have none."""
    return cls.representative.constant_vector()


def is_good_direction(cls: T1Class) -> bool:
    """Nonzero constant part: the linear realization strictly drops the
    embedding dimension of nearby singular fibers."""
    if cls.t1.germ.is_smooth() or cls.t1.tjurina == 0:
        raise GermError("smooth germ: good directions are not defined")
    return any(c != 0 for c in const_part(cls))


@dataclass(frozen=True)
class ProperSubmodule:
    """A submodule of the deformation module given by finitely many
    generating classes; only its constant-part span matters here."""

    generators: tuple  # tuple[T1Class, ...]

    def constant_span(self) -> list:
        rows = [list(const_part(g)) for g in self.generators]
        return _row_reduce(rows)

    @staticmethod
    def zero() -> "ProperSubmodule":
        return ProperSubmodule(tuple())


def _row_reduce(rows: list) -> list:
    """Reduced basis of the row span over the rationals."""
    basis: list = []
    for row in rows:
        row = [Fraction(v) for v in row]
        for piv in basis:
            lead = next(i for i, v in enumerate(piv) if v)
            if row[lead]:
                factor = row[lead] / piv[lead]
                row = [a - factor * b for a, b in zip(row, piv)]
        if any(row):
            basis.append(row)
    return basis


def _in_span(vector: list, basis: list) -> bool:
    row = [Fraction(v) for v in vector]
    for piv in basis:
        lead = next(i for i, v in enumerate(piv) if v)
        if row[lead]:
            factor = row[lead] / piv[lead]
            row = [a - factor * b for a, b in zip(row, piv)]
    return not any(row)


def good_direction_for_submodule(t1: T1Presentation, module: ProperSubmodule) -> T1Class:
    """The first unit-vector class whose constant direction avoids the
    submodule's constant-part span; exists whenever the submodule is proper."""
    if t1.germ.is_smooth() or t1.tjurina == 0:
        raise GermError("smooth germ: good directions are not defined")
    span = module.constant_span()
    d = t1.rank
    for i in range(d):
        unit = [Fraction(0)] * d
        unit[i] = Fraction(1)
        if not _in_span(unit, span):
            return T1Class.unit(t1, i)
    raise NotProperError(
        "submodule is not proper (its constant parts span everything, so it "
        "is the whole deformation module by Nakayama)"
    )


def verify_good_direction_bertini(germ: GermPresentation, cls: T1Class) -> bool:
    """Independent cross-check of goodness on the linear realization.

    Builds the total space equations f_k + s*c_k in e+1 variables and
    evaluates their Jacobian at the origin.  Because the equations have no
    linear part, only the deformation column survives, so a nonzero
    Jacobian is exactly the constant-part criterion; for hypersurfaces it
    is full rank d = 1, smoothness of the total space at the origin.
    """
    e, d = germ.e, germ.d
    rows = []
    for k in range(d):
        f = germ.equations[k]
        c = cls.representative.components[k]
        row = [f.partial_derivative(i).constant_term() for i in range(e)]
        # d/ds of f_k + s*c_k at the origin is c_k(0)
        row.append(c.constant_term())
        rows.append(row)
    reduced = _row_reduce(rows)
    return len(reduced) >= 1


def fiber_singular_ideal(
    germ: GermPresentation, cls: T1Class, s_value, max_degree: Optional[int] = None
) -> GroebnerBasis:
    """Reduced basis of the singular ideal of the fiber at a sampled
    parameter of the linear realization: fiber equations plus the maximal
    minors of their Jacobian."""
    from .gb import groebner_ideal  # local import to keep module load light

    e, d = germ.e, germ.d
    s = Fraction(s_value)
    fibers = [
        germ.equations[k] + cls.representative.components[k] * s for k in range(d)
    ]
    gens = list(fibers)
    gens.extend(jacobian_minors(fibers, e))
    return groebner_ideal(gens, GREVLEX, max_degree)


def jacobian_minors(equations: Sequence[Polynomial], nvars: int) -> list:
    """All maximal minors of the Jacobian matrix of the equations."""
    from itertools import combinations

    d = len(equations)
    jac = [[f.partial_derivative(i) for i in range(nvars)] for f in equations]
    minors = []
    for cols in combinations(range(nvars), d):
        minors.append(_det([[jac[r][c] for c in cols] for r in range(d)]))
    return minors


def _det(matrix: list) -> Polynomial:
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    out = Polynomial.zero(matrix[0][0].nvars)
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in matrix[1:]]
        term = matrix[0][j] * _det(minor)
        out = out + (term if j % 2 == 0 else -term)
    return out
