import random

import pytest

from conftest import EX1_VARS, example_germs
from qsmooth.equiv import (
    CyclicAction,
    EquivarianceError,
    character_decomposition,
    character_of,
    class_character,
    equivariant_family_check,
    invariant_good_direction,
    is_ordinary,
    ordinarity_detail,
)
from qsmooth.poly import Polynomial, parse
from qsmooth.t1 import (
    GermPresentation,
    NotProperError,
    ProperSubmodule,
    T1Class,
    VectorPolynomial,
    const_part,
    is_good_direction,
    t1_generators,
    t1_module,
)

QUINTIC_VARS = ["X0", "X1", "X2", "X3", "X4"]
QUINTIC = parse("X0^3*X1*X2 + X1^5 + X2^5 + X3^5 + X4^5", QUINTIC_VARS)


def test_character_of_quintic_under_ambient_action():
    action = CyclicAction(5, (0, 2, 3, 0, 1))
    assert character_of(QUINTIC, action) == 0


def test_character_simple_cases():
    assert character_of(parse("x*y", ["x", "y"]), CyclicAction(2, (1, 1))) == 0
    assert character_of(parse("x + y", ["x", "y"]), CyclicAction(2, (1, 0))) is None
    with pytest.raises(EquivarianceError):
        character_of(Polynomial.zero(2), CyclicAction(2, (1, 1)))


def test_character_additive_on_monomials():
    rng = random.Random(41)
    action = CyclicAction(7, (1, 3, 5, 2))
    for _ in range(1000):
        a = tuple(rng.randint(0, 5) for _ in range(4))
        b = tuple(rng.randint(0, 5) for _ in range(4))
        ab = tuple(x + y for x, y in zip(a, b))
        assert (
            action.monomial_character(ab)
            == (action.monomial_character(a) + action.monomial_character(b)) % 7
        )


def test_is_ordinary_examples():
    germ, order, weights, _ = example_germs()["example-1"]
    assert is_ordinary(germ, CyclicAction(order, weights))
    simple = GermPresentation(2, (parse("x^2 + y^2", ["x", "y"]),), ("x", "y"))
    assert is_ordinary(simple, CyclicAction(2, (1, 1)))
    # a semi-invariant equation with nonzero character is not ordinary
    odd = GermPresentation(1, (parse("x^2", ["x"]),), ("x",))
    action3 = CyclicAction(3, (1,))
    assert not is_ordinary(odd, action3)
    assert ordinarity_detail(odd, action3) == [2]


def test_is_ordinary_arity_mismatch():
    germ, _, _, _ = example_germs()["example-1"]
    with pytest.raises(EquivarianceError):
        is_ordinary(germ, CyclicAction(5, (1, 2)))


def test_invariant_good_direction_on_example1():
    germ, order, weights, _ = example_germs()["example-1"]
    action = CyclicAction(order, weights)
    t1p = t1_module(germ)
    cls = invariant_good_direction(t1p, action, ProperSubmodule.zero())
    assert const_part(cls) == (1,)
    assert class_character(cls, action) == 0
    assert is_good_direction(cls)


def test_invariant_good_direction_requires_ordinary():
    odd = GermPresentation(1, (parse("x^2", ["x"]),), ("x",))
    t1p = t1_module(odd)
    with pytest.raises(EquivarianceError):
        invariant_good_direction(t1p, CyclicAction(3, (1,)), ProperSubmodule.zero())


def test_invariant_good_direction_not_proper():
    germ, order, weights, _ = example_germs()["example-1"]
    t1p = t1_module(germ)
    full = ProperSubmodule((T1Class(t1p, VectorPolynomial((Polynomial.one(4),))),))
    with pytest.raises(NotProperError):
        invariant_good_direction(t1p, CyclicAction(order, weights), full)


def test_jacobian_generators_semi_invariant():
    """Each Jacobian column of an ordinary germ is semi-invariant with the
    character opposite to its variable's weight."""
    for name in ("example-1", "example-4"):
        germ, order, weights, _ = example_germs()[name]
        action = CyclicAction(order, weights)
        gens = t1_generators(germ)
        for i in range(germ.e):
            col = gens[i]
            chars = set()
            for p in col.components:
                if p.is_zero():
                    continue
                c = character_of(p, action)
                assert c is not None, name
                chars.add(c)
            assert len(chars) <= 1
            if chars:
                assert chars == {(-weights[i]) % order}, name


def test_character_decomposition_sums_to_tjurina():
    for name, (germ, order, weights, tjurina) in example_germs().items():
        action = CyclicAction(order, weights)
        t1p = t1_module(germ)
        decomp = character_decomposition(t1p, action)
        assert sum(decomp.values()) == tjurina == t1p.tjurina, name
        assert all(0 <= c < order for c in decomp), name


def test_equivariant_family_example1():
    germ, order, weights, _ = example_germs()["example-1"]
    action = CyclicAction(order, weights)
    h = parse("s", EX1_VARS + ["s"])
    verdict = equivariant_family_check(germ, action, [h])
    assert verdict.invariant
    assert verdict.equation_characters == (0,)
    assert verdict.ordinary_preserved
    assert [st for _, st, _ in verdict.fiber_reports] == ["pass"] * 3


def test_equivariant_family_trivial_perturbation():
    germ, order, weights, _ = example_germs()["example-1"]
    action = CyclicAction(order, weights)
    verdict = equivariant_family_check(germ, action, [Polynomial.zero(5)])
    assert verdict.invariant and verdict.ordinary_preserved


def test_equivariant_family_rejects_noninvariant():
    germ, order, weights, _ = example_germs()["example-1"]
    action = CyclicAction(order, weights)
    bad = parse("s*x1", EX1_VARS + ["s"])
    verdict = equivariant_family_check(germ, action, [bad])
    assert not verdict.invariant
    assert not verdict.ordinary_preserved
    assert all(st == "skipped" for _, st, _ in verdict.fiber_reports)


def test_equivariant_family_requires_divisibility():
    germ, order, weights, _ = example_germs()["example-1"]
    action = CyclicAction(order, weights)
    not_divisible = parse("x1^5", EX1_VARS + ["s"])
    with pytest.raises(EquivarianceError):
        equivariant_family_check(germ, action, [not_divisible])


def test_equivariant_family_arity_checks():
    germ, order, weights, _ = example_germs()["example-1"]
    action = CyclicAction(order, weights)
    with pytest.raises(EquivarianceError):
        equivariant_family_check(germ, action, [])
    wrong_ring = parse("x1", EX1_VARS)
    with pytest.raises(EquivarianceError):
        equivariant_family_check(germ, action, [wrong_ring])
