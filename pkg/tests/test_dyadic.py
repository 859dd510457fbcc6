"""Dyadic numbers and outward-rounded interval arithmetic."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kkit.dyadic import Dyadic, Interval, ZERO, interval_arith


def iv(lo, hi, prec=96) -> Interval:
    return Interval.from_fractions(Fraction(lo), Fraction(hi), prec)


class TestDyadic:
    def test_normalization(self):
        assert Dyadic(4, 0) == Dyadic(1, 2)
        assert Dyadic(12, -2) == Dyadic(3, 0)
        assert Dyadic(0, 17) == Dyadic(0, 0)

    def test_arithmetic_exact(self):
        a, b = Dyadic(3, -2), Dyadic(5, -1)
        assert (a + b).to_fraction() == Fraction(3, 4) + Fraction(5, 2)
        assert (a - b).to_fraction() == Fraction(3, 4) - Fraction(5, 2)
        assert (a * b).to_fraction() == Fraction(15, 8)

    def test_ordering(self):
        assert Dyadic(1, -1) < Dyadic(3, -2) < Dyadic(1, 0)
        assert Dyadic(-1, 4) < Dyadic(0) < Dyadic(1, -10)

    def test_string_roundtrip(self):
        for d in [Dyadic(123, -7), Dyadic(-5, 3), Dyadic(0)]:
            assert Dyadic.parse(str(d)) == d

    def test_rounding_directions(self):
        x = Fraction(1, 3)
        lo = Dyadic.from_fraction(x, 20, round_up=False)
        hi = Dyadic.from_fraction(x, 20, round_up=True)
        assert lo.to_fraction() <= x <= hi.to_fraction()
        assert hi.to_fraction() - lo.to_fraction() <= Fraction(1, 2 ** 18)

    def test_rounding_exact_passthrough(self):
        d = Dyadic(5, -3)
        assert d.round(10, True) == d
        assert d.round(10, False) == d

    def test_div_int(self):
        d = Dyadic(1)
        lo = d.div_int(3, 30, False)
        hi = d.div_int(3, 30, True)
        assert lo.to_fraction() <= Fraction(1, 3) <= hi.to_fraction()
        assert d.div_int(4, 30, False) == Dyadic(1, -2)       # exact powers of two

    def test_sqrt_bounds(self):
        d = Dyadic(2)
        lo, hi = d.sqrt(60, False), d.sqrt(60, True)
        assert lo.to_fraction() ** 2 <= 2 <= hi.to_fraction() ** 2

    @given(st.integers(-10 ** 6, 10 ** 6), st.integers(-20, 20),
           st.integers(5, 60))
    def test_round_is_directed(self, man, exp, prec):
        d = Dyadic(man, exp)
        assert d.round(prec, False).to_fraction() <= d.to_fraction()
        assert d.round(prec, True).to_fraction() >= d.to_fraction()


class TestInterval:
    def test_add(self):
        assert iv(1, 2).add(iv(3, 4)) == iv(4, 6)

    def test_mul_mixed(self):
        assert iv(-1, 2).mul(iv(3, 4)) == iv(-4, 8)

    def test_pow_even_tightening(self):
        assert iv(-2, 3).pow(2) == iv(0, 9)

    def test_pow_odd(self):
        assert iv(-2, 3).pow(3) == iv(-8, 27)

    def test_pow_negative_even(self):
        assert iv(-3, -2).pow(2) == iv(4, 9)

    def test_hull_midpoint_width(self):
        a = iv(0, 1)
        assert a.hull(iv(2, 3)) == iv(0, 3)
        assert a.midpoint() == Dyadic(1, -1)
        assert a.width() == Dyadic(1)

    def test_dispatch_surface(self):
        assert interval_arith("add", iv(1, 2), iv(3, 4)) == iv(4, 6)
        assert interval_arith("mul", iv(-1, 2), iv(3, 4)) == iv(-4, 8)
        assert interval_arith("pow", iv(-2, 3), 2) == iv(0, 9)
        assert interval_arith("hull", iv(0, 1), iv(2, 3)) == iv(0, 3)
        assert interval_arith("midpoint", iv(0, 1)) == Dyadic(1, -1)
        assert interval_arith("width", iv(0, 1)) == Dyadic(1)
        wide = interval_arith("inflate", iv(0, 1), prec=64)
        assert wide.contains_interval(iv(0, 1))
        with pytest.raises(ValueError):
            interval_arith("nonsense", iv(0, 1))

    def test_recip(self):
        r = iv(2, 4).recip(64)
        assert r.lo.to_fraction() <= Fraction(1, 4)
        assert r.hi.to_fraction() >= Fraction(1, 2)
        with pytest.raises(ZeroDivisionError):
            iv(-1, 1).recip(64)

    def test_intersect(self):
        assert iv(0, 2).intersect(iv(1, 3)) == iv(1, 2)
        assert iv(0, 1).intersect(iv(2, 3)) is None

    def test_strict_containment_needs_margin(self):
        outer, inner = iv(0, 1), iv(Fraction(1, 4), Fraction(1, 2))
        assert outer.strictly_contains(inner, 64)
        assert not outer.strictly_contains(outer, 64)
        degenerate = Interval.point(Dyadic(1, -1))
        assert not degenerate.strictly_contains(degenerate, 64)

    @given(st.fractions(-100, 100), st.fractions(-100, 100),
           st.fractions(-100, 100), st.fractions(-100, 100),
           st.fractions(0, 1), st.fractions(0, 1))
    @settings(max_examples=200)
    def test_mul_contains_products(self, a, b, c, d, s, t):
        x = iv(min(a, b), max(a, b))
        y = iv(min(c, d), max(c, d))
        # sample a point of each interval
        px = x.lo.to_fraction() + s * (x.hi.to_fraction() - x.lo.to_fraction())
        py = y.lo.to_fraction() + t * (y.hi.to_fraction() - y.lo.to_fraction())
        prod = x.mul(y, 96)
        assert prod.lo.to_fraction() <= px * py <= prod.hi.to_fraction()

    @given(st.fractions(-50, 50), st.fractions(-50, 50),
           st.fractions(-50, 50), st.fractions(-50, 50))
    @settings(max_examples=200)
    def test_add_sub_contains(self, a, b, c, d):
        x = iv(min(a, b), max(a, b))
        y = iv(min(c, d), max(c, d))
        add = x.add(y, 80)
        sub = x.sub(y, 80)
        assert add.lo.to_fraction() <= a + c <= add.hi.to_fraction()
        assert sub.lo.to_fraction() <= a - d <= sub.hi.to_fraction()
