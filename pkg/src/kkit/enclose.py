"""Certified enclosures of the restricted exponential and its finite extension.

`texp` equals e^x on the open interval (-1,1) and is 0 everywhere else,
including at the endpoints. Enclosures come from the truncated Taylor
series with a Lagrange remainder bounded by 3*|x|^m/m! (3 is a cheap
rational upper bound for e on [-1,1]). The finite extension Exp(x) is
evaluated as texp(x/n)^n for the least n with |x| < n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .dyadic import Dyadic, Interval, ZERO, ONE, dyadic_max

_MINUS_ONE = Dyadic(-1)
_PLUS_ONE = Dyadic(1)
_UNIT = Interval(_MINUS_ONE, _PLUS_ONE)


@dataclass(frozen=True, slots=True)
class Shape:
    """Variable layout of a system: the first `ell` of `n` variables are
    the exponentiated ones, constrained to (-1,1)."""

    ell: int
    n: int

    def __post_init__(self) -> None:
        if not (0 <= self.ell <= self.n):
            raise ValueError(f"invalid shape ({self.ell}, {self.n})")

    def __str__(self) -> str:
        return f"({self.ell},{self.n})"


@dataclass(frozen=True, slots=True)
class Box:
    """An n-box of dyadic intervals; coordinates 1..ell live in [-1,1]."""

    shape: Shape
    coords: tuple[Interval, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != self.shape.n:
            raise ValueError(f"box has {len(self.coords)} coordinates, "
                             f"shape needs {self.shape.n}")

    @classmethod
    def from_fractions(cls, shape: Shape, pairs: Sequence[tuple[Fraction, Fraction]],
                       prec: int = 128) -> "Box":
        return cls(shape, tuple(Interval.from_fractions(a, b, prec) for a, b in pairs))

    @classmethod
    def point(cls, shape: Shape, values: Sequence[Dyadic]) -> "Box":
        return cls(shape, tuple(Interval.point(v) for v in values))

    def midpoint(self) -> tuple[Dyadic, ...]:
        return tuple(c.midpoint() for c in self.coords)

    def widest_index(self) -> int:
        widths = [c.width() for c in self.coords]
        best = 0
        for i in range(1, len(widths)):
            if widths[i] > widths[best]:
                best = i
        return best

    def split(self, i: int) -> tuple["Box", "Box"]:
        c = self.coords[i]
        m = c.midpoint()
        left = self.coords[:i] + (Interval(c.lo, m),) + self.coords[i + 1:]
        right = self.coords[:i] + (Interval(m, c.hi),) + self.coords[i + 1:]
        return Box(self.shape, left), Box(self.shape, right)

    def replace(self, i: int, iv: Interval) -> "Box":
        return Box(self.shape, self.coords[:i] + (iv,) + self.coords[i + 1:])

    def intersect(self, other: "Box") -> Optional["Box"]:
        out = []
        for a, b in zip(self.coords, other.coords):
            iv = a.intersect(b)
            if iv is None:
                return None
            out.append(iv)
        return Box(self.shape, tuple(out))

    def contains_box(self, other: "Box") -> bool:
        return all(a.contains_interval(b) for a, b in zip(self.coords, other.coords))

    def strictly_contains(self, other: "Box", prec: int) -> bool:
        return all(a.strictly_contains(b, prec)
                   for a, b in zip(self.coords, other.coords))

    def max_width(self) -> Dyadic:
        return dyadic_max(*[c.width() for c in self.coords]) if self.coords else ZERO

    def clip_unit(self, prec: int) -> Optional["Box"]:
        """Clip the first ell coordinates to [-1+2^-prec, 1-2^-prec]."""
        eps = Dyadic(1, -prec)
        safe = Interval(_MINUS_ONE + eps, _PLUS_ONE - eps)
        coords = list(self.coords)
        for i in range(self.shape.ell):
            iv = coords[i].intersect(safe)
            if iv is None:
                return None
            coords[i] = iv
        return Box(self.shape, tuple(coords))

    def unit_coords_strict(self) -> bool:
        """True when coordinates 1..ell keep strictly inside (-1,1)."""
        return all(_MINUS_ONE < c.lo and c.hi < _PLUS_ONE
                   for c in self.coords[: self.shape.ell])

    def serialize(self) -> list[list[str]]:
        return [c.serialize() for c in self.coords]

    @classmethod
    def deserialize(cls, shape: Shape, data: Sequence[Sequence[str]]) -> "Box":
        return cls(shape, tuple(Interval.parse(pair) for pair in data))


@lru_cache(maxsize=None)
def _series_order(prec: int) -> int:
    """Smallest even m with 3/m! < 2^-(prec+2)."""
    bound = Fraction(1, 1 << (prec + 2))
    m, fact = 1, 1
    while Fraction(3, fact) >= bound:
        m += 1
        fact *= m
    return m + (m & 1)


def _exp_point_bounds(x: Dyadic, order: int, prec: int) -> tuple[Dyadic, Dyadic]:
    """Dyadic bounds for e^x, |x| <= 1, via an even-order series.

    The term recurrence runs in scaled-integer arithmetic with directed
    rounding; the Lagrange tail uses e^xi < 3 on [-1,1] and is
    non-negative because the order is even.
    """
    t = prec + 16
    man, e = x.man, x.exp
    neg = man < 0
    term_lo = term_hi = 1 << t
    s_lo = s_hi = 0
    for k in range(1, order + 1):
        s_lo += term_lo
        s_hi += term_hi
        a, b = (term_hi, term_lo) if neg else (term_lo, term_hi)
        if e >= 0:
            term_lo = ((a * man) << e) // k
            term_hi = -((-((b * man) << e)) // k)
        else:
            den = k << -e
            term_lo = (a * man) // den
            term_hi = -((-(b * man)) // den)
    tail_hi = 3 * max(abs(term_lo), abs(term_hi))   # even order: tail in [0, this]
    return (Dyadic(s_lo, -t).round(prec, False),
            Dyadic(s_hi + tail_hi, -t).round(prec, True))


@lru_cache(maxsize=4096)
def exp_unit_enclosure(x: Interval, prec: int) -> Interval:
    """Enclosure of e^x for x inside [-1,1] (no truncation to zero).

    Callers are responsible for x being a subinterval of [-1,1]; use
    `texp_enclosure` for the full discontinuous function.
    """
    order = _series_order(prec)
    lo, _ = _exp_point_bounds(x.lo, order, prec)
    _, hi = _exp_point_bounds(x.hi, order, prec)
    return Interval(lo, hi)


def texp_enclosure(x: Interval, prec: int) -> Interval:
    """Rigorous enclosure of texp over x.

    Inside the open interval (-1,1) this is the series enclosure of e^x;
    whenever x is not entirely inside (boundary points included), the
    enclosure is hulled with {0}. An x that misses the open interval
    entirely (including the degenerate endpoints [1,1] and [-1,-1]) maps
    to exactly {0}.
    """
    if x.lo >= _PLUS_ONE or x.hi <= _MINUS_ONE:
        return Interval.point(ZERO)
    inside = x.intersect(_UNIT)
    out = exp_unit_enclosure(inside, prec)
    if not (_MINUS_ONE < x.lo and x.hi < _PLUS_ONE):
        out = out.hull(Interval.point(ZERO))
    return out


def exp_fin_enclosure(x: Interval, prec: int) -> Interval:
    """Enclosure of Exp(x) = texp(x/n)^n with the least n with |x| in (-n,n).

    Always a subinterval of the strictly positive reals.
    """
    guard = prec + 8
    mag = x.mag().to_fraction()
    n = int(mag) + 1
    while True:
        scaled = x.div_int(n, guard)
        if _MINUS_ONE < scaled.lo and scaled.hi < _PLUS_ONE:
            break
        n += 1
    core = exp_unit_enclosure(scaled, guard)
    return core.pow(n, prec)
