"""Exact scalar arithmetic, the parser, forms and potentials."""

import random
from fractions import Fraction

import pytest

from projmet import (Chart, DifferentialForm, NotClosed, NotPolynomial,
                     ParseError, PoleError, homotopy_potential,
                     potential_of_closed_1form)

from conftest import rand_poly


@pytest.fixture
def ch2():
    return Chart(2)


def test_differentiate_power_rule(ch2):
    x, y = ch2.vars
    assert (x ** 2 * y).diff(1) == 2 * x * y


def test_differentiate_quotient_rule(ch2):
    x, y = ch2.vars
    assert (x / (1 - y)).diff(2) == x / (1 - y) ** 2


def test_differentiate_constant(ch2):
    e = ch2.const(Fraction(7, 3))
    assert e.diff(1).is_zero()


def test_evaluate_substitution(ch2):
    x, y = ch2.vars
    assert (x / (1 - y)).evaluate([2, 0]) == 2
    assert (x ** 2 + y ** 2).evaluate([Fraction(3, 2), Fraction(1, 2)]) == Fraction(5, 2)


def test_evaluate_pole(ch2):
    x, y = ch2.vars
    with pytest.raises(PoleError):
        (x / (1 - y)).evaluate([1, 1])


def test_arithmetic_is_exact(ch2):
    rng = random.Random(7)
    for _ in range(50):
        a = rand_poly(ch2, rng, 3, 3) / (1 + ch2.var(1) ** 2)
        b = rand_poly(ch2, rng, 3, 3)
        assert (a + b) - b == a


def test_canonical_denominator_sign(ch2):
    x, y = ch2.vars
    e = x / (1 - y)
    # canonical form has a positive leading denominator coefficient
    assert e == -x / (y - 1)
    assert str(e.denominator) != "0"


def test_pow_and_division(ch2):
    x, y = ch2.vars
    assert (x + y) ** 2 == x ** 2 + 2 * x * y + y ** 2
    with pytest.raises(ZeroDivisionError):
        x / (ch2.zero)


# -- parser -----------------------------------------------------------------

def test_parse_literals_and_precedence(ch2):
    x, y = ch2.vars
    assert ch2.parse("3/4") == ch2.const(Fraction(3, 4))
    assert ch2.parse("x1 + 2*x2^2") == x + 2 * y ** 2
    assert ch2.parse("-x1^2") == -(x ** 2)
    assert ch2.parse("(x1 + x2)^3") == (x + y) ** 3
    assert ch2.parse("x1/(1 - x2)") == x / (1 - y)
    assert ch2.parse("2^-1 * x1") == x / 2


def test_parse_roundtrip(ch2):
    rng = random.Random(11)
    for _ in range(25):
        e = rand_poly(ch2, rng, 3, 3) / (1 + ch2.var(2) ** 2)
        assert ch2.parse(str(e)) == e


def test_parse_errors_carry_position(ch2):
    with pytest.raises(ParseError) as err:
        ch2.parse("x1 +* x2")
    assert err.value.column == 5
    with pytest.raises(ParseError):
        ch2.parse("x3 + 1")
    with pytest.raises(ParseError):
        ch2.parse("q + 1")
    with pytest.raises(ParseError):
        ch2.parse("x1^x2")


# -- forms, exterior derivative, homotopy -----------------------------------

def test_two_form_antisymmetry_enforced(ch2):
    one, zero = ch2.one, ch2.zero
    with pytest.raises(ValueError):
        DifferentialForm(ch2, 2, [[zero, one], [one, zero]])


def test_homotopy_degree_one_examples(ch2):
    x, y = ch2.vars
    w = DifferentialForm(ch2, 1, [2 * x, ch2.zero])
    assert homotopy_potential(w).components == x ** 2
    w2 = DifferentialForm(ch2, 1, [y, x])
    assert homotopy_potential(w2).components == x * y


def test_homotopy_degree_two_example(ch2):
    one, zero = ch2.one, ch2.zero
    w = DifferentialForm(ch2, 2, [[zero, one], [-one, zero]])
    eta = homotopy_potential(w)
    assert (eta.d() - w).is_zero()


def test_homotopy_rejects_nonclosed_and_rational():
    ch3 = Chart(3)
    x, y, z = ch3.vars
    w = DifferentialForm(ch3, 1, [y, ch3.zero, ch3.zero])
    with pytest.raises(NotClosed):
        homotopy_potential(w)
    w2 = DifferentialForm(ch3, 1, [1 / (1 + x ** 2), ch3.zero, ch3.zero])
    with pytest.raises(NotPolynomial):
        homotopy_potential(w2)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_d_squared_is_zero(n, rng):
    chart = Chart(n)
    for _ in range(5):
        f = rand_poly(chart, rng, 3, 3)
        form = DifferentialForm(chart, 0, f)
        assert form.d().d().is_zero()
        w = DifferentialForm(chart, 1,
                             [rand_poly(chart, rng, 3, 2) for _ in range(n)])
        assert w.d().d().is_zero()


@pytest.mark.parametrize("n", [2, 3, 4])
def test_homotopy_inverts_d_on_closed_forms(n, rng):
    chart = Chart(n)
    for _ in range(5):
        # closed 1-forms: gradients of random polynomials
        f = rand_poly(chart, rng, 3, 3)
        w = DifferentialForm(chart, 0, f).d()
        h = homotopy_potential(w)
        assert (h.d() - w).is_zero()
        # closed 2-forms: exterior derivatives of random 1-forms
        eta = DifferentialForm(chart, 1,
                               [rand_poly(chart, rng, 3, 2) for _ in range(n)])
        w2 = eta.d()
        h2 = homotopy_potential(w2)
        assert (h2.d() - w2).is_zero()


# -- rational potentials ------------------------------------------------------

def test_polynomial_potential(ch2):
    x, y = ch2.vars
    f = x ** 2 * y + y
    w = DifferentialForm(ch2, 0, f).d()
    pot = potential_of_closed_1form(w)
    assert pot.poly_part == f
    assert not pot.log_terms


def test_log_potential(ch2):
    x, y = ch2.vars
    base = 1 + x ** 2 + y ** 2
    w = DifferentialForm(ch2, 1, [base.diff(1) / base, base.diff(2) / base])
    pot = potential_of_closed_1form(w)
    grad = pot.grad()
    assert (grad - w).is_zero()
    assert pot.log_terms


def test_mixed_rational_potential(ch2):
    x, y = ch2.vars
    # f = x/(1+y^2) + 3 log(1+x^2) + x*y
    base = 1 + x ** 2
    f_rat = x / (1 + y ** 2)
    comps = [f_rat.diff(1) + 3 * base.diff(1) / base + y,
             f_rat.diff(2) + x]
    w = DifferentialForm(ch2, 1, comps)
    pot = potential_of_closed_1form(w)
    assert (pot.grad() - w).is_zero()


def test_potential_exp_and_scale(ch2):
    x, y = ch2.vars
    base = 1 + x ** 2 + y ** 2
    from projmet import Potential
    pot = Potential(ch2, log_terms=[(base, Fraction(-1, 2))])
    assert pot.scale(-2).exp() == base
    with pytest.raises(ValueError):
        pot.exp()
