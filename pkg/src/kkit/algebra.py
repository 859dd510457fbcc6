"""Exact multivariate texp-polynomials and their formal calculus.

An (ell,n) polynomial is a rational-coefficient polynomial in the variables
x1..xn and y1..yell, evaluated under the semantics y_i = texp(x_i). The
formal derivative uses d texp(x)/dx = texp(x), so d/dx_i adds (d/dy_i)*y_i
for exponentiated coordinates. Monomials are kept in graded-lex canonical
order on the concatenated exponent vector, which makes printing and
equality deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .dyadic import Dyadic, Interval, ZERO
from .enclose import Box, Shape, exp_unit_enclosure, texp_enclosure


@lru_cache(maxsize=65536)
def _coeff_interval(c: Fraction, prec: int) -> Interval:
    return Interval.from_fractions(c, c, prec)

__all__ = [
    "Shape", "ExpMonomial", "ExpPolynomial", "KhovanskiiSystem",
    "DependenceRelation", "evaluate", "formal_partial", "jacobian",
    "integer_dependence", "polynomial_text",
]


@dataclass(frozen=True, slots=True)
class ExpMonomial:
    """coeff * x^xpow * y^ypow with a non-zero rational coefficient."""

    coeff: Fraction
    xpow: tuple[int, ...]
    ypow: tuple[int, ...]

    def degree(self) -> int:
        return sum(self.xpow) + sum(self.ypow)


def _mono_key(m: ExpMonomial):
    return (m.degree(), m.xpow + m.ypow)


@dataclass(frozen=True, slots=True)
class ExpPolynomial:
    shape: Shape
    monomials: tuple[ExpMonomial, ...]

    # -- constructors ---------------------------------------------------

    @classmethod
    def from_terms(cls, shape: Shape,
                   terms: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction]
                   ) -> "ExpPolynomial":
        monos = [ExpMonomial(c, xp, yp) for (xp, yp), c in terms.items() if c != 0]
        monos.sort(key=_mono_key, reverse=True)
        return cls(shape, tuple(monos))

    @classmethod
    def constant(cls, shape: Shape, c) -> "ExpPolynomial":
        c = Fraction(c)
        if c == 0:
            return cls(shape, ())
        zx, zy = (0,) * shape.n, (0,) * shape.ell
        return cls(shape, (ExpMonomial(c, zx, zy),))

    @classmethod
    def x_var(cls, shape: Shape, i: int) -> "ExpPolynomial":
        """The variable x_i, 1-based."""
        if not (1 <= i <= shape.n):
            raise ValueError(f"variable index x{i} out of range for shape {shape}")
        xp = tuple(1 if j == i - 1 else 0 for j in range(shape.n))
        return cls(shape, (ExpMonomial(Fraction(1), xp, (0,) * shape.ell),))

    @classmethod
    def texp_var(cls, shape: Shape, i: int) -> "ExpPolynomial":
        """The value texp(x_i) (i.e. y_i), 1-based, requires i <= ell."""
        if not (1 <= i <= shape.ell):
            raise ValueError(f"texp argument x{i} is not an exponentiated "
                             f"coordinate of shape {shape}")
        yp = tuple(1 if j == i - 1 else 0 for j in range(shape.ell))
        return cls(shape, (ExpMonomial(Fraction(1), (0,) * shape.n, yp),))

    # -- ring operations --------------------------------------------------

    def _terms(self) -> dict:
        return {(m.xpow, m.ypow): m.coeff for m in self.monomials}

    def __add__(self, other: "ExpPolynomial") -> "ExpPolynomial":
        self._check(other)
        terms = self._terms()
        for m in other.monomials:
            key = (m.xpow, m.ypow)
            terms[key] = terms.get(key, Fraction(0)) + m.coeff
        return ExpPolynomial.from_terms(self.shape, terms)

    def __neg__(self) -> "ExpPolynomial":
        return ExpPolynomial(self.shape, tuple(
            ExpMonomial(-m.coeff, m.xpow, m.ypow) for m in self.monomials))

    def __sub__(self, other: "ExpPolynomial") -> "ExpPolynomial":
        return self + (-other)

    def __mul__(self, other: "ExpPolynomial") -> "ExpPolynomial":
        self._check(other)
        terms: dict = {}
        for a in self.monomials:
            for b in other.monomials:
                key = (tuple(i + j for i, j in zip(a.xpow, b.xpow)),
                       tuple(i + j for i, j in zip(a.ypow, b.ypow)))
                terms[key] = terms.get(key, Fraction(0)) + a.coeff * b.coeff
        return ExpPolynomial.from_terms(self.shape, terms)

    def scale(self, c) -> "ExpPolynomial":
        c = Fraction(c)
        if c == 0:
            return ExpPolynomial(self.shape, ())
        return ExpPolynomial(self.shape, tuple(
            ExpMonomial(m.coeff * c, m.xpow, m.ypow) for m in self.monomials))

    def pow(self, k: int) -> "ExpPolynomial":
        if k < 0:
            raise ValueError("negative polynomial power")
        out = ExpPolynomial.constant(self.shape, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def is_zero(self) -> bool:
        return not self.monomials

    def uses_y(self, j: int) -> bool:
        """Whether y_j (1-based) occurs."""
        return any(m.ypow[j - 1] for m in self.monomials)

    def substitute_y(self, j: int, replacement: "ExpPolynomial") -> "ExpPolynomial":
        """Replace every occurrence of y_j (1-based) by `replacement`."""
        self._check(replacement)
        out = ExpPolynomial(self.shape, ())
        for m in self.monomials:
            k = m.ypow[j - 1]
            yp = m.ypow[: j - 1] + (0,) + m.ypow[j:]
            base = ExpPolynomial(self.shape, (ExpMonomial(m.coeff, m.xpow, yp),))
            out = out + (base * replacement.pow(k) if k else base)
        return out

    def extend(self, shape: Shape) -> "ExpPolynomial":
        """Reinterpret in a larger shape (extra trailing x and y variables)."""
        if shape.n < self.shape.n or shape.ell < self.shape.ell:
            raise ValueError("extend target shape is smaller")
        dx = shape.n - self.shape.n
        dy = shape.ell - self.shape.ell
        return ExpPolynomial(shape, tuple(
            ExpMonomial(m.coeff, m.xpow + (0,) * dx, m.ypow + (0,) * dy)
            for m in self.monomials))

    def _check(self, other: "ExpPolynomial") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __str__(self) -> str:
        return polynomial_text(self)


def polynomial_text(p: ExpPolynomial) -> str:
    """Canonical text form: terms in canonical order, `num/den` coefficients,
    `xi^a` and `E(xi)^b` factors."""
    if not p.monomials:
        return "0"
    parts: list[str] = []
    for m in p.monomials:
        factors = []
        for i, a in enumerate(m.xpow):
            if a == 1:
                factors.append(f"x{i + 1}")
            elif a > 1:
                factors.append(f"x{i + 1}^{a}")
        for j, b in enumerate(m.ypow):
            if b == 1:
                factors.append(f"E(x{j + 1})")
            elif b > 1:
                factors.append(f"E(x{j + 1})^{b}")
        c = abs(m.coeff)
        if not factors:
            body = str(c)
        elif c == 1:
            body = " * ".join(factors)
        else:
            body = " * ".join([str(c)] + factors)
        if not parts:
            parts.append(body if m.coeff > 0 else f"-{body}")
        else:
            parts.append(f"+ {body}" if m.coeff > 0 else f"- {body}")
    return " ".join(parts)


# -- evaluation ------------------------------------------------------------


def evaluate(p: ExpPolynomial, box: Box, prec: int, *,
             open_domain: bool = False,
             y_cache: Optional[dict[int, Interval]] = None) -> Interval:
    """Interval enclosure of p over the box.

    The first ell coordinates contribute texp enclosures; `open_domain`
    evaluates them as e^x on the part of the coordinate inside [-1,1],
    which is the right semantics when the search region is open and the
    boundary does not belong to it.

    Exact (width zero) when the box is a dyadic point, no texp factor
    occurs, and the value happens to be dyadic.
    """
    if p.shape != box.shape:
        raise ValueError(f"shape mismatch: polynomial {p.shape}, box {box.shape}")

    if all(c.is_degenerate() for c in box.coords) and \
            all(not any(m.ypow) for m in p.monomials):
        xs = [c.lo.to_fraction() for c in box.coords]
        val = _eval_exact(p, xs, [])
        if val.denominator & (val.denominator - 1) == 0:
            return Interval.point(Dyadic.from_fraction(val))
        return Interval.from_fractions(val, val, prec)

    ell = p.shape.ell
    yvals: dict[int, Interval] = y_cache if y_cache is not None else {}
    acc = Interval.point(ZERO)
    pow_cache: dict[tuple[str, int, int], Interval] = {}

    def xpow(i: int, k: int) -> Interval:
        key = ("x", i, k)
        if key not in pow_cache:
            pow_cache[key] = box.coords[i].pow(k, prec)
        return pow_cache[key]

    def ypow(j: int, k: int) -> Interval:
        if j not in yvals:
            yvals[j] = _texp_coord(box.coords[j], prec, open_domain)
        key = ("y", j, k)
        if key not in pow_cache:
            pow_cache[key] = yvals[j].pow(k, prec)
        return pow_cache[key]

    for m in p.monomials:
        term = _coeff_interval(m.coeff, prec)
        for i, a in enumerate(m.xpow):
            if a:
                term = term.mul(xpow(i, a), prec)
        for j, b in enumerate(m.ypow):
            if b:
                if j >= ell:
                    raise ValueError("ypow outside exponentiated block")
                term = term.mul(ypow(j, b), prec)
        acc = acc.add(term, prec)
    return acc


def _texp_coord(iv: Interval, prec: int, open_domain: bool) -> Interval:
    if not open_domain:
        return texp_enclosure(iv, prec)
    unit = Interval(Dyadic(-1), Dyadic(1))
    clipped = iv.intersect(unit)
    if clipped is None:
        raise ValueError("open-domain evaluation outside [-1,1]")
    return exp_unit_enclosure(clipped, prec)


def _eval_exact(p: ExpPolynomial, xs: Sequence[Fraction],
                ys: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for m in p.monomials:
        v = m.coeff
        for i, a in enumerate(m.xpow):
            if a:
                v *= xs[i] ** a
        for j, b in enumerate(m.ypow):
            if b:
                v *= ys[j] ** b
        total += v
    return total


def evaluate_rational(p: ExpPolynomial, xs: Sequence[Fraction],
                      ys: Sequence[Fraction] = ()) -> Fraction:
    """Exact evaluation of the underlying polynomial p(x, y) at rational
    arguments (the caller supplies y values; no texp semantics applied)."""
    if len(xs) != p.shape.n or len(ys) != p.shape.ell:
        raise ValueError("argument count does not match shape")
    return _eval_exact(p, [Fraction(v) for v in xs], [Fraction(v) for v in ys])


# -- formal differentiation --------------------------------------------------


def formal_partial(p: ExpPolynomial, i: int) -> ExpPolynomial:
    """Formal partial derivative with respect to x_i (1-based), applying
    the rule d texp(x_i)/d x_i = texp(x_i) for i <= ell."""
    shape = p.shape
    if not (1 <= i <= shape.n):
        raise ValueError(f"variable index {i} out of range for shape {shape}")
    terms: dict = {}

    def bump(xp, yp, c):
        if c == 0:
            return
        key = (xp, yp)
        terms[key] = terms.get(key, Fraction(0)) + c

    for m in p.monomials:
        a = m.xpow[i - 1]
        if a:
            xp = m.xpow[: i - 1] + (a - 1,) + m.xpow[i:]
            bump(xp, m.ypow, m.coeff * a)
        if i <= shape.ell:
            b = m.ypow[i - 1]
            if b:
                # (d/dy_i y^b) * y_i = b * y^b
                bump(m.xpow, m.ypow, m.coeff * b)
    return ExpPolynomial.from_terms(shape, terms)


@dataclass(frozen=True, slots=True)
class KhovanskiiSystem:
    """A square system of n texp-polynomials with its formal Jacobian."""

    shape: Shape
    equations: tuple[ExpPolynomial, ...]
    jac: tuple[tuple[ExpPolynomial, ...], ...] = field(default=())

    def __post_init__(self) -> None:
        if self.shape.n == 0:
            raise ValueError("empty systems (n = 0) are rejected")
        if len(self.equations) != self.shape.n:
            raise ValueError(f"expected {self.shape.n} equations, "
                             f"got {len(self.equations)}")
        for eq in self.equations:
            if eq.shape != self.shape:
                raise ValueError("equation shape mismatch")
        if not self.jac:
            computed = tuple(
                tuple(formal_partial(eq, j + 1) for j in range(self.shape.n))
                for eq in self.equations)
            object.__setattr__(self, "jac", computed)

    @property
    def n(self) -> int:
        return self.shape.n


def jacobian(sys: KhovanskiiSystem) -> tuple[tuple[ExpPolynomial, ...], ...]:
    """The cached formal Jacobian matrix, entry (i,j) = d eq_i / d x_j."""
    return sys.jac


@dataclass(frozen=True, slots=True)
class DependenceRelation:
    """Candidate integer relation d*a_ell = sum_i k_i a_i + g among the
    exponentiated coordinates of a certified zero."""

    d: int
    k: tuple[int, ...]
    g: Fraction

    def __post_init__(self) -> None:
        if self.d == 0:
            raise ValueError("relation multiplier d must be non-zero")


# -- integer relation detection ----------------------------------------------


def integer_dependence(values: Sequence[Interval], coeff_bound: int,
                       precision: int) -> Optional[tuple[int, ...]]:
    """Search for a small integer vector u with u . midpoints ~ 0.

    Lattice-basis reduction on the scaled midpoints; the detection
    tolerance is 2^(8-precision). The result is only a candidate: callers
    must re-certify before relying on it.
    """
    if coeff_bound < 1:
        raise ValueError("coeff_bound must be at least 1")
    tol = Fraction(1, 1 << (precision - 8))
    for v in values:
        if v.width().to_fraction() >= tol:
            raise ValueError("enclosure wider than the detection tolerance")
    mids = [v.midpoint().to_fraction() for v in values]
    k = len(mids)
    scale = 1 << precision
    basis = []
    for i in range(k):
        row = [0] * k + [round(mids[i] * scale)]
        row[i] = 1
        basis.append(row)
    reduced = _lll(basis)
    best: Optional[tuple[int, ...]] = None
    best_norm = None
    for row in reduced:
        u = tuple(row[:k])
        if not any(u) or max(abs(c) for c in u) > coeff_bound:
            continue
        residual = abs(sum(c * m for c, m in zip(u, mids)))
        if residual >= tol:
            continue
        norm = sum(c * c for c in u)
        if best is None or norm < best_norm:
            best, best_norm = u, norm
    if best is not None and next(c for c in best if c) < 0:
        best = tuple(-c for c in best)
    return best


def _lll(basis: list[list[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """Textbook Lenstra-Lenstra-Lovasz reduction with exact rational GSO."""
    b = [row[:] for row in basis]
    n = len(b)

    def gso():
        star: list[list[Fraction]] = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                denom = _dot(star[j], star[j])
                mu[i][j] = _dot([Fraction(x) for x in b[i]], star[j]) / denom
                v = [x - mu[i][j] * y for x, y in zip(v, star[j])]
            star.append(v)
        return star, mu

    star, mu = gso()
    i = 1
    while i < n:
        for j in range(i - 1, -1, -1):
            q = round(mu[i][j])
            if q:
                b[i] = [x - q * y for x, y in zip(b[i], b[j])]
                star, mu = gso()
        if _dot(star[i], star[i]) >= (delta - mu[i][i - 1] ** 2) * _dot(star[i - 1], star[i - 1]):
            i += 1
        else:
            b[i], b[i - 1] = b[i - 1], b[i]
            star, mu = gso()
            i = max(i - 1, 1)
    return b


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))
