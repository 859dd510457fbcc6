"""The frozen constants must be reproducible by the oracles and agree with
an unrelated arbitrary-precision library."""

from fractions import Fraction

import mpmath
import pytest

import frozen
import oracles as O

TOL = Fraction(1, 10 ** 50)


@pytest.mark.parametrize("name,compute", [
    ("LN2", lambda: O.ln_frac(Fraction(2))),
    ("LN3", lambda: O.ln_frac(Fraction(3))),
    ("LN4", lambda: O.ln_frac(Fraction(4))),
    ("LNLN2", lambda: O.ln_frac(O.ln_frac(Fraction(2)))),
    ("OMEGA", O.omega_frac),
    ("SQRT2", lambda: O.sqrt_frac(Fraction(2))),
    ("INV_SQRT2", lambda: 1 / O.sqrt_frac(Fraction(2))),
    ("E_HALF", lambda: O.exp_frac(Fraction(1, 2))),
    ("E_MINUS_HALF", lambda: O.exp_frac(Fraction(-1, 2))),
    ("E_INV", lambda: O.exp_frac(Fraction(-1))),
    ("E_SQ", lambda: O.exp_frac(Fraction(2))),
    ("E_06", lambda: O.exp_frac(Fraction(6, 10))),
    ("E_08", lambda: O.exp_frac(Fraction(8, 10))),
    ("NEG2EXP", O.neg_double_exp_root),
])
def test_frozen_reproducible(name, compute):
    assert abs(compute() - Fraction(getattr(frozen, name))) < TOL


def test_cross_check_mpmath():
    mpmath.mp.dps = 55
    targets = {
        "LN2": mpmath.log(2),
        "OMEGA": mpmath.lambertw(1),
        "SQRT2": mpmath.sqrt(2),
        "E_SQ": mpmath.exp(2),
        "LNLN2": mpmath.log(mpmath.log(2)),
    }
    for name, target in targets.items():
        v = Fraction(getattr(frozen, name))
        got = mpmath.mpf(v.numerator) / mpmath.mpf(v.denominator)
        assert abs(got - target) < mpmath.mpf(10) ** -50


def test_sturm_isolation_simple():
    # (x^2 - 2)(x - 1) has roots -sqrt2, 1, sqrt2
    coeffs = [Fraction(2), Fraction(-2), Fraction(-1), Fraction(1)]
    roots = O.sturm_isolate(coeffs)
    assert len(roots) == 3
    expected = [-frozen.SQRT2_F, Fraction(1), frozen.SQRT2_F]
    for (lo, hi), r in zip(roots, expected):
        assert lo <= r <= hi


def test_naive_partial():
    # d/dx (3 x^2 y) = 6 x y
    terms = {(2, 1): Fraction(3)}
    assert O.naive_partial(terms, 0) == {(1, 1): Fraction(6)}
    assert O.naive_partial(terms, 1) == {(2, 0): Fraction(3)}
