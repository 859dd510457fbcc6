"""Exact dyadic numbers and outward-rounded interval arithmetic.

A dyadic is mantissa * 2**exponent with an arbitrary-precision integer
mantissa; dyadics are closed under +, -, * so those operations are exact.
Rounding only happens when a precision (in significant bits) is requested,
and then every inexact step moves the result outward by at most one unit
in the last place, so intervals never lose containment.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

_DYADIC_RE = re.compile(r"^(-?\d+)(?:\*2\^(-?\d+))?$")


@dataclass(frozen=True, slots=True)
class Dyadic:
    """mantissa * 2**exponent, normalized so mantissa is odd or zero."""

    man: int
    exp: int = 0

    def __post_init__(self) -> None:
        man, exp = self.man, self.exp
        if man == 0:
            exp = 0
        else:
            shift = (man & -man).bit_length() - 1
            if shift:
                man >>= shift
                exp += shift
        object.__setattr__(self, "man", man)
        object.__setattr__(self, "exp", exp)

    # -- constructors -------------------------------------------------

    @classmethod
    def from_fraction(cls, value: Union[Fraction, int], prec: Optional[int] = None,
                      round_up: bool = False) -> "Dyadic":
        """Convert a rational to a dyadic.

        Exact when the denominator is a power of two; otherwise rounds in
        the requested direction at `prec` significant bits (required).
        """
        fr = Fraction(value)
        den = fr.denominator
        if den & (den - 1) == 0:
            return cls(fr.numerator, -(den.bit_length() - 1))
        if prec is None:
            raise ValueError(f"{fr} is not dyadic; a rounding precision is required")
        return _div_round(fr.numerator, den, prec, round_up)

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        m = _DYADIC_RE.match(text.strip())
        if not m:
            raise ValueError(f"not a dyadic literal: {text!r}")
        return cls(int(m.group(1)), int(m.group(2) or 0))

    # -- conversions --------------------------------------------------

    def to_fraction(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(self.man << self.exp)
        return Fraction(self.man, 1 << -self.exp)

    def __str__(self) -> str:
        return f"{self.man}*2^{self.exp}"

    def __float__(self) -> float:
        try:
            return math.ldexp(self.man, self.exp)
        except OverflowError:
            return float(self.to_fraction())

    def __repr__(self) -> str:
        return f"Dyadic({self.man}, {self.exp})"

    # -- exact arithmetic ---------------------------------------------

    def __add__(self, other: "Dyadic") -> "Dyadic":
        e = min(self.exp, other.exp)
        return Dyadic((self.man << (self.exp - e)) + (other.man << (other.exp - e)), e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        return self + (-other)

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.man, self.exp)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.man), self.exp)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        return Dyadic(self.man * other.man, self.exp + other.exp)

    def scalb(self, k: int) -> "Dyadic":
        """Exact multiplication by 2**k."""
        if self.man == 0:
            return self
        return Dyadic(self.man, self.exp + k)

    def half(self) -> "Dyadic":
        return self.scalb(-1)

    # -- comparisons ---------------------------------------------------

    def _cmp(self, other: "Dyadic") -> int:
        if self.man == 0 and other.man == 0:
            return 0
        e = min(self.exp, other.exp)
        a = self.man << (self.exp - e)
        b = other.man << (other.exp - e)
        return (a > b) - (a < b)

    def __lt__(self, other: "Dyadic") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "Dyadic") -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: "Dyadic") -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: "Dyadic") -> bool:
        return self._cmp(other) >= 0

    @property
    def sign(self) -> int:
        return (self.man > 0) - (self.man < 0)

    def is_zero(self) -> bool:
        return self.man == 0

    # -- rounding ------------------------------------------------------

    def round(self, prec: int, round_up: bool) -> "Dyadic":
        """Round to `prec` significant bits toward +inf (up) or -inf."""
        bits = abs(self.man).bit_length()
        if bits <= prec:
            return self
        shift = bits - prec
        if round_up:
            man = -((-self.man) >> shift)
        else:
            man = self.man >> shift
        return Dyadic(man, self.exp + shift)

    def div_int(self, n: int, prec: int, round_up: bool) -> "Dyadic":
        """Directed-rounding division by a non-zero integer."""
        if n == 0:
            raise ZeroDivisionError("dyadic division by zero")
        if n < 0:
            return (-self).div_int(-n, prec, round_up)
        if n & (n - 1) == 0:
            return self.scalb(-(n.bit_length() - 1))
        return _div_round(self.man, n, prec, round_up).scalb(self.exp)

    def sqrt(self, prec: int, round_up: bool) -> "Dyadic":
        """Directed-rounding square root of a non-negative dyadic."""
        if self.man < 0:
            raise ValueError("sqrt of negative dyadic")
        if self.man == 0:
            return ZERO
        g = prec + 4
        fr = self.to_fraction()
        scaled = fr.numerator << (2 * g)
        if round_up:
            q = -((-scaled) // fr.denominator)
            root = math.isqrt(q)
            if root * root < q:
                root += 1
        else:
            q = scaled // fr.denominator
            root = math.isqrt(q)
        return Dyadic(root, -g).round(prec, round_up)


def _div_round(num: int, den: int, prec: int, round_up: bool) -> Dyadic:
    """num/den (den > 0) rounded to prec significant bits."""
    if num == 0:
        return ZERO
    shift = prec - (abs(num).bit_length() - den.bit_length()) + 1
    if shift >= 0:
        scaled_num, scaled_den = num << shift, den
    else:
        scaled_num, scaled_den = num, den << -shift
    if round_up:
        man = -((-scaled_num) // scaled_den)
    else:
        man = scaled_num // scaled_den
    return Dyadic(man, -shift)


ZERO = Dyadic(0)
ONE = Dyadic(1)


def dyadic_min(*vals: Dyadic) -> Dyadic:
    out = vals[0]
    for v in vals[1:]:
        if v < out:
            out = v
    return out


def dyadic_max(*vals: Dyadic) -> Dyadic:
    out = vals[0]
    for v in vals[1:]:
        if v > out:
            out = v
    return out


@dataclass(frozen=True, slots=True)
class Interval:
    """Closed interval with dyadic endpoints, lo <= hi."""

    lo: Dyadic
    hi: Dyadic

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"interval endpoints out of order: {self.lo} > {self.hi}")

    # -- constructors --------------------------------------------------

    @classmethod
    def point(cls, v: Union[Dyadic, int]) -> "Interval":
        d = v if isinstance(v, Dyadic) else Dyadic(v)
        return cls(d, d)

    @classmethod
    def from_fractions(cls, lo: Union[Fraction, int], hi: Union[Fraction, int],
                       prec: int = 128) -> "Interval":
        return cls(Dyadic.from_fraction(Fraction(lo), prec, round_up=False),
                   Dyadic.from_fraction(Fraction(hi), prec, round_up=True))

    @classmethod
    def parse(cls, pair: Iterable[str]) -> "Interval":
        lo, hi = tuple(pair)
        return cls(Dyadic.parse(lo), Dyadic.parse(hi))

    def serialize(self) -> list[str]:
        return [str(self.lo), str(self.hi)]

    def __repr__(self) -> str:
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"

    # -- rounding ------------------------------------------------------

    def outward(self, prec: Optional[int]) -> "Interval":
        if prec is None:
            return self
        return Interval(self.lo.round(prec, False), self.hi.round(prec, True))

    # -- arithmetic (exact unless prec is given) ------------------------

    def add(self, other: "Interval", prec: Optional[int] = None) -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi).outward(prec)

    def sub(self, other: "Interval", prec: Optional[int] = None) -> "Interval":
        return Interval(self.lo - other.hi, self.hi - other.lo).outward(prec)

    def neg(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def mul(self, other: "Interval", prec: Optional[int] = None) -> "Interval":
        a, b, c, d = self.lo, self.hi, other.lo, other.hi
        if a.sign >= 0:
            if c.sign >= 0:
                lo, hi = a * c, b * d
            elif d.sign <= 0:
                lo, hi = b * c, a * d
            else:
                lo, hi = b * c, b * d
        elif b.sign <= 0:
            if c.sign >= 0:
                lo, hi = a * d, b * c
            elif d.sign <= 0:
                lo, hi = b * d, a * c
            else:
                lo, hi = a * d, a * c
        else:
            if c.sign >= 0:
                lo, hi = a * d, b * d
            elif d.sign <= 0:
                lo, hi = b * c, a * c
            else:
                lo = dyadic_min(a * d, b * c)
                hi = dyadic_max(a * c, b * d)
        return Interval(lo, hi).outward(prec)

    def pow(self, k: int, prec: Optional[int] = None) -> "Interval":
        if k < 0:
            raise ValueError("interval pow requires a non-negative exponent")
        if k == 0:
            return Interval.point(ONE)
        if k % 2 == 0 and self.lo.sign < 0 <= self.hi.sign:
            # even power of a straddling interval starts at zero
            m = dyadic_max(abs(self.lo), abs(self.hi))
            return Interval(ZERO, _pow_dyadic(m, k, prec, True))
        a = _pow_dyadic(self.lo, k, prec, False)
        b = _pow_dyadic(self.hi, k, prec, True)
        if k % 2 == 0 and self.hi.sign <= 0:
            a, b = _pow_dyadic(self.hi, k, prec, False), _pow_dyadic(self.lo, k, prec, True)
        return Interval(a, b)

    def scale(self, c: Union[Dyadic, int], prec: Optional[int] = None) -> "Interval":
        d = c if isinstance(c, Dyadic) else Dyadic(c)
        if d.sign >= 0:
            return Interval(self.lo * d, self.hi * d).outward(prec)
        return Interval(self.hi * d, self.lo * d).outward(prec)

    def div_int(self, n: int, prec: int) -> "Interval":
        if n < 0:
            return self.neg().div_int(-n, prec)
        return Interval(self.lo.div_int(n, prec, False), self.hi.div_int(n, prec, True))

    def recip(self, prec: int) -> "Interval":
        """1/self; requires the interval to exclude zero."""
        if self.contains_zero():
            raise ZeroDivisionError("reciprocal of an interval containing zero")
        lo_fr, hi_fr = self.lo.to_fraction(), self.hi.to_fraction()
        return Interval(Dyadic.from_fraction(1 / hi_fr, prec, False),
                        Dyadic.from_fraction(1 / lo_fr, prec, True))

    def sqrt(self, prec: int) -> "Interval":
        if self.lo.sign < 0:
            raise ValueError("sqrt of an interval with negative endpoint")
        return Interval(self.lo.sqrt(prec, False), self.hi.sqrt(prec, True))

    # -- set operations --------------------------------------------------

    def hull(self, other: "Interval") -> "Interval":
        return Interval(dyadic_min(self.lo, other.lo), dyadic_max(self.hi, other.hi))

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        lo = dyadic_max(self.lo, other.lo)
        hi = dyadic_min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    # -- queries ---------------------------------------------------------

    def midpoint(self) -> Dyadic:
        return (self.lo + self.hi).half()

    def width(self) -> Dyadic:
        return self.hi - self.lo

    def mag(self) -> Dyadic:
        return dyadic_max(abs(self.lo), abs(self.hi))

    def mig(self) -> Dyadic:
        """Smallest absolute value over the interval (0 if it straddles)."""
        if self.contains_zero():
            return ZERO
        return dyadic_min(abs(self.lo), abs(self.hi))

    def contains_zero(self) -> bool:
        return self.lo.sign <= 0 <= self.hi.sign

    def contains(self, v: Dyadic) -> bool:
        return self.lo <= v <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def strictly_contains(self, other: "Interval", prec: int) -> bool:
        """other inside self with a margin of at least one ulp at prec."""
        margin = self._ulp(prec)
        return (other.lo - self.lo >= margin) and (self.hi - other.hi >= margin)

    def _ulp(self, prec: int) -> Dyadic:
        m = dyadic_max(self.mag(), ONE)
        return Dyadic(1, m.exp + abs(m.man).bit_length() - prec)

    def inflate(self, prec: int, factor_num: int = 1, factor_den: int = 8) -> "Interval":
        """Widen by width*factor_num/factor_den + 1 ulp on each side."""
        w = self.width()
        pad = self._ulp(prec)
        if not w.is_zero():
            pad = pad + Dyadic(w.man * factor_num, w.exp).div_int(factor_den, prec, True)
        return Interval(self.lo - pad, self.hi + pad)

    def is_degenerate(self) -> bool:
        return self.lo == self.hi


def interval_arith(op: str, *args, prec: Optional[int] = None):
    """Dispatcher over the interval operation set.

    Supported ops: add, sub, mul, pow, hull, midpoint, width, inflate.
    """
    x: Interval = args[0]
    if op == "add":
        return x.add(args[1], prec)
    if op == "sub":
        return x.sub(args[1], prec)
    if op == "mul":
        return x.mul(args[1], prec)
    if op == "pow":
        return x.pow(args[1], prec)
    if op == "hull":
        return x.hull(args[1])
    if op == "midpoint":
        return x.midpoint()
    if op == "width":
        return x.width()
    if op == "inflate":
        return x.inflate(prec if prec is not None else 64)
    raise ValueError(f"unknown interval operation: {op}")


def _pow_dyadic(d: Dyadic, k: int, prec: Optional[int], round_up: bool) -> Dyadic:
    # exact square-and-multiply, one outward round at the end
    out = ONE
    base = d
    e = k
    while e:
        if e & 1:
            out = out * base
        e >>= 1
        if e:
            base = base * base
    return out if prec is None else out.round(prec, round_up)
