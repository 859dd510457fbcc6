"""Executable system rewrites: dependence elimination, regularizing
augmentation, and witness slicing.

Dependence elimination substitutes x_i = d*X_i (i < ell) and
x_ell = sum k_i X_i + g/d, which turns texp powers into factors
Exp(lambda . X + c) with rational lambda; those generalized monomials stay
internal to this module and evaluate through the finite extension Exp.
One equation is dropped so the remaining square Jacobian stays regular,
and the transformed box is re-certified; a candidate relation that fails
re-certification is rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .dyadic import Dyadic, Interval, ZERO
from .enclose import Box, Shape, exp_fin_enclosure
from .algebra import (DependenceRelation, ExpMonomial, ExpPolynomial,
                      KhovanskiiSystem, _coeff_interval, formal_partial,
                      polynomial_text)
from .certify import (Budget, Certificate, CertifyFailure, Evidence,
                      certify_general, certify_regular_zero, interval_det,
                      refine_certificate, system_text)

# -- generalized monomials ------------------------------------------------------


@dataclass(frozen=True, slots=True)
class AffineForm:
    """const + sum linear_i * x_i, the argument of an Exp factor."""

    const: Fraction
    linear: tuple[Fraction, ...]

    def is_zero(self) -> bool:
        return self.const == 0 and not any(self.linear)

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm(self.const + other.const,
                          tuple(a + b for a, b in zip(self.linear, other.linear)))

    @classmethod
    def zero(cls, n: int) -> "AffineForm":
        return cls(Fraction(0), (Fraction(0),) * n)


@dataclass(frozen=True, slots=True)
class GenExpMonomial:
    """coeff * x^xpow * Exp(lam), lam an affine form in the variables."""

    coeff: Fraction
    xpow: tuple[int, ...]
    lam: AffineForm


@dataclass(frozen=True, slots=True)
class GenExpPolynomial:
    shape: Shape
    monomials: tuple[GenExpMonomial, ...]

    @classmethod
    def from_terms(cls, shape: Shape, terms: dict) -> "GenExpPolynomial":
        monos = [GenExpMonomial(c, xp, lam) for (xp, lam), c in terms.items() if c != 0]
        monos.sort(key=lambda m: (sum(m.xpow), m.xpow, m.lam.const,
                                  m.lam.linear), reverse=True)
        return cls(shape, tuple(monos))

    @classmethod
    def constant(cls, shape: Shape, c) -> "GenExpPolynomial":
        c = Fraction(c)
        if c == 0:
            return cls(shape, ())
        return cls(shape, (GenExpMonomial(c, (0,) * shape.n,
                                          AffineForm.zero(shape.n)),))

    def _terms(self) -> dict:
        return {(m.xpow, m.lam): m.coeff for m in self.monomials}

    def __add__(self, other: "GenExpPolynomial") -> "GenExpPolynomial":
        terms = self._terms()
        for m in other.monomials:
            key = (m.xpow, m.lam)
            terms[key] = terms.get(key, Fraction(0)) + m.coeff
        return GenExpPolynomial.from_terms(self.shape, terms)

    def __neg__(self) -> "GenExpPolynomial":
        return GenExpPolynomial(self.shape, tuple(
            GenExpMonomial(-m.coeff, m.xpow, m.lam) for m in self.monomials))

    def __sub__(self, other: "GenExpPolynomial") -> "GenExpPolynomial":
        return self + (-other)

    def __mul__(self, other: "GenExpPolynomial") -> "GenExpPolynomial":
        terms: dict = {}
        for a in self.monomials:
            for b in other.monomials:
                key = (tuple(i + j for i, j in zip(a.xpow, b.xpow)), a.lam + b.lam)
                terms[key] = terms.get(key, Fraction(0)) + a.coeff * b.coeff
        return GenExpPolynomial.from_terms(self.shape, terms)

    def pow(self, k: int) -> "GenExpPolynomial":
        out = GenExpPolynomial.constant(self.shape, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def mul_exp(self, lam: AffineForm) -> "GenExpPolynomial":
        """Multiply through by Exp(lam); never changes the zero set."""
        return GenExpPolynomial(self.shape, tuple(
            GenExpMonomial(m.coeff, m.xpow, m.lam + lam) for m in self.monomials))

    def is_zero(self) -> bool:
        return not self.monomials

    def partial(self, j: int) -> "GenExpPolynomial":
        """d/dx_j, using Exp' = Exp (1-based j)."""
        terms: dict = {}
        for m in self.monomials:
            a = m.xpow[j - 1]
            if a:
                xp = m.xpow[: j - 1] + (a - 1,) + m.xpow[j:]
                key = (xp, m.lam)
                terms[key] = terms.get(key, Fraction(0)) + m.coeff * a
            lj = m.lam.linear[j - 1]
            if lj:
                key = (m.xpow, m.lam)
                terms[key] = terms.get(key, Fraction(0)) + m.coeff * lj
        return GenExpPolynomial.from_terms(self.shape, terms)


def _scale_fr(iv: Interval, fr: Fraction, prec: int) -> Interval:
    lo, hi = iv.lo.to_fraction() * fr, iv.hi.to_fraction() * fr
    if fr < 0:
        lo, hi = hi, lo
    return Interval(Dyadic.from_fraction(lo, prec, False),
                    Dyadic.from_fraction(hi, prec, True))


def gen_evaluate(p: GenExpPolynomial, box: Box, prec: int,
                 exp_cache: Optional[dict] = None) -> Interval:
    """Rigorous enclosure of a generalized polynomial over a box; the Exp
    arguments are bounded because box coordinates are."""
    if p.shape.n != box.shape.n:
        raise ValueError("shape mismatch")
    cache = exp_cache if exp_cache is not None else {}
    acc = Interval.point(ZERO)
    for m in p.monomials:
        term = _coeff_interval(m.coeff, prec)
        for i, a in enumerate(m.xpow):
            if a:
                term = term.mul(box.coords[i].pow(a, prec), prec)
        if not m.lam.is_zero():
            if m.lam not in cache:
                arg = Interval.from_fractions(m.lam.const, m.lam.const, prec)
                for i, c in enumerate(m.lam.linear):
                    if c:
                        arg = arg.add(_scale_fr(box.coords[i], c, prec), prec)
                cache[m.lam] = exp_fin_enclosure(arg, prec)
            term = term.mul(cache[m.lam], prec)
        acc = acc.add(term, prec)
    return acc


def gen_system_evaluators(system: Sequence[GenExpPolynomial]):
    jac_polys = [[eq.partial(j + 1) for j in range(eq.shape.n)] for eq in system]

    def eval_system(box: Box, prec: int) -> list[Interval]:
        cache: dict = {}
        return [gen_evaluate(eq, box, prec, cache) for eq in system]

    def eval_jacobian(box: Box, prec: int) -> list[list[Interval]]:
        cache: dict = {}
        return [[gen_evaluate(e, box, prec, cache) for e in row] for row in jac_polys]

    return eval_system, eval_jacobian


def from_exp_polynomial(p: ExpPolynomial) -> GenExpPolynomial:
    """Reinterpret y_i^b as Exp(b*x_i) factors (valid on the unit domain)."""
    terms: dict = {}
    for m in p.monomials:
        linear = [Fraction(0)] * p.shape.n
        for j, b in enumerate(m.ypow):
            if b:
                linear[j] += b
        key = (m.xpow, AffineForm(Fraction(0), tuple(linear)))
        terms[key] = terms.get(key, Fraction(0)) + m.coeff
    return GenExpPolynomial.from_terms(p.shape, terms)


def to_khovanskii(system: Sequence[GenExpPolynomial],
                  shape: Shape) -> Optional[KhovanskiiSystem]:
    """Plain texp-polynomial form when every Exp factor has zero constant
    part and non-negative integral coefficients supported on the
    exponentiated block; None otherwise."""
    equations = []
    for p in system:
        terms: dict = {}
        for m in p.monomials:
            if m.lam.const != 0:
                return None
            ypow = [0] * shape.ell
            for i, c in enumerate(m.lam.linear):
                if c == 0:
                    continue
                if i >= shape.ell or c.denominator != 1 or c < 0:
                    return None
                ypow[i] = int(c)
            key = (m.xpow, tuple(ypow))
            terms[key] = terms.get(key, Fraction(0)) + m.coeff
        equations.append(ExpPolynomial.from_terms(shape, terms))
    try:
        return KhovanskiiSystem(shape, tuple(equations))
    except ValueError:
        return None


# -- dependence elimination ----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ReducedSystem:
    """Result of eliminating the last exponentiated coordinate.

    The surviving zero sits at X = (a_1/d, ..., a_{ell-1}/d, b); applying
    the substitution x_i = d*X_i, x_ell = sum k_i X_i + g/d maps the
    certified transformed box back into the original certificate's box.
    """

    system: tuple[GenExpPolynomial, ...]
    shape: Shape
    drop_index: int
    d: int
    k: tuple[int, ...]
    g: Fraction
    certified_box: Box
    precision: int


def _transform_polynomial(p: ExpPolynomial, rel: DependenceRelation,
                          new_shape: Shape) -> GenExpPolynomial:
    ell = p.shape.ell
    n_new = new_shape.n
    g_over_d = Fraction(rel.g, rel.d)

    # affine image of x_ell: sum k_i X_i + g/d as a generalized polynomial
    aff_terms: dict = {}
    zero_lam = AffineForm.zero(n_new)
    if g_over_d:
        aff_terms[((0,) * n_new, zero_lam)] = g_over_d
    for i, ki in enumerate(rel.k):
        if ki:
            xp = tuple(1 if j == i else 0 for j in range(n_new))
            aff_terms[(xp, zero_lam)] = aff_terms.get((xp, zero_lam), Fraction(0)) + ki
    x_ell_image = GenExpPolynomial.from_terms(new_shape, aff_terms)

    out = GenExpPolynomial.constant(new_shape, 0)
    for m in p.monomials:
        coeff = m.coeff
        xp = [0] * n_new
        for i in range(ell - 1):                       # x_i = d X_i
            a = m.xpow[i]
            if a:
                xp[i] = a
                coeff *= Fraction(rel.d) ** a
        for i in range(ell, p.shape.n):                # untouched tail
            xp[i - 1] = m.xpow[i]
        linear = [Fraction(0)] * n_new
        const = Fraction(0)
        for i in range(ell - 1):                       # texp(x_i)^b = Exp(d b X_i)
            b = m.ypow[i]
            if b:
                linear[i] += rel.d * b
        b_ell = m.ypow[ell - 1]
        if b_ell:                                      # texp(x_ell)^b
            const += b_ell * g_over_d
            for i, ki in enumerate(rel.k):
                linear[i] += b_ell * ki
        mono = GenExpPolynomial(new_shape, (GenExpMonomial(
            coeff, tuple(xp), AffineForm(const, tuple(linear))),))
        a_ell = m.xpow[ell - 1]
        if a_ell:
            mono = mono * x_ell_image.pow(a_ell)
        out = out + mono
    return out


def _clear_negative_exponents(p: GenExpPolynomial) -> GenExpPolynomial:
    """Multiply by Exp powers so every Exp coefficient is non-negative."""
    if p.is_zero():
        return p
    n = p.shape.n
    mins = [min(m.lam.linear[i] for m in p.monomials) for i in range(n)]
    min_c = min(m.lam.const for m in p.monomials)
    shift = AffineForm(-min_c if min_c < 0 else Fraction(0),
                       tuple(-v if v < 0 else Fraction(0) for v in mins))
    if shift.is_zero():
        return p
    return p.mul_exp(shift)


def transformed_box(cert_box: Box, rel: DependenceRelation,
                    new_shape: Shape, prec: int) -> Box:
    ell = cert_box.shape.ell
    coords = []
    for i in range(ell - 1):
        coords.append(cert_box.coords[i].div_int(rel.d, prec))
    coords.extend(cert_box.coords[ell:])
    return Box(new_shape, tuple(coords))


def inverse_image(box: Box, rel: DependenceRelation, old_shape: Shape,
                  prec: int) -> Box:
    """Image of a transformed box under x_i = d X_i, x_ell = k.X + g/d."""
    ell = old_shape.ell
    coords = []
    for i in range(ell - 1):
        coords.append(box.coords[i].scale(rel.d))
    acc = Interval.from_fractions(Fraction(rel.g, rel.d), Fraction(rel.g, rel.d), prec)
    for i, ki in enumerate(rel.k):
        if ki:
            acc = acc.add(box.coords[i].scale(ki), prec)
    coords.append(acc)
    coords.extend(box.coords[ell - 1:])
    return Box(old_shape, tuple(coords))


def eliminate_dependence(sys: KhovanskiiSystem, rel: DependenceRelation,
                         cert: Certificate,
                         budget: Budget = Budget()) -> ReducedSystem:
    """Apply a candidate relation d a_ell = sum k_i a_i + g to a certified
    zero, dropping to an (ell-1, n-1) system; re-certification of the
    transformed box is mandatory and rejects inconsistent relations."""
    shape = sys.shape
    ell = shape.ell
    if ell < 1:
        raise ValueError("no exponentiated coordinate to eliminate")
    if len(rel.k) != ell - 1:
        raise ValueError(f"relation has {len(rel.k)} coefficients, need {ell - 1}")
    if cert.system != sys:
        raise ValueError("certificate does not certify the given system")

    prec = max(cert.precision, 128)
    residual = cert.box.coords[ell - 1].scale(rel.d)
    for i, ki in enumerate(rel.k):
        if ki:
            residual = residual.sub(cert.box.coords[i].scale(ki), prec)
    residual = residual.sub(Interval.from_fractions(rel.g, rel.g, prec), prec)
    if not residual.contains_zero():
        raise ValueError("relation is inconsistent with the certified enclosures")

    new_shape = Shape(ell - 1, shape.n - 1)
    transformed = [_clear_negative_exponents(_transform_polynomial(eq, rel, new_shape))
                   for eq in sys.equations]
    tbox = transformed_box(cert.box, rel, new_shape, prec)

    drop_index = None
    kept: list[GenExpPolynomial] = []
    for j in range(len(transformed)):
        candidate = [p for i, p in enumerate(transformed) if i != j]
        if any(p.is_zero() for p in candidate):
            continue
        _, jac_fn = gen_system_evaluators(candidate)
        det = interval_det(jac_fn(tbox, prec), prec)
        if not det.contains_zero():
            drop_index = j
            kept = candidate
            break
    if drop_index is None:
        raise ValueError("no droppable equation leaves a regular minor")

    ev_fn, jac_fn = gen_system_evaluators(kept)
    out = certify_general(ev_fn, jac_fn, tbox, budget,
                          lambda b, p: not interval_det(jac_fn(b, p), p).contains_zero())
    if isinstance(out, CertifyFailure):
        raise ValueError(f"relation rejected by re-certification: "
                         f"{out.reason}: {out.detail}")

    # tighten until the inverse substitution maps into the original box
    evidence = out
    rounds = 0
    while not cert.box.contains_box(
            inverse_image(evidence.box, rel, shape, evidence.precision)):
        rounds += 1
        if rounds > 32:
            raise ValueError("transformed box does not map back into the "
                             "original certificate")
        p2 = evidence.precision * 2
        nxt = certify_general(ev_fn, jac_fn, evidence.box,
                              Budget(start_precision=p2,
                                     precision_cap=max(p2 * 4, budget.precision_cap),
                                     target_width=Dyadic(1, -(p2 - 16))))
        if isinstance(nxt, CertifyFailure):
            raise ValueError(f"refinement failed: {nxt.reason}")
        evidence = nxt

    return ReducedSystem(tuple(kept), new_shape, drop_index, rel.d, rel.k,
                         Fraction(rel.g), evidence.box, evidence.precision)


# -- regularizing augmentation ---------------------------------------------------------


def symbolic_det(matrix: Sequence[Sequence[ExpPolynomial]],
                 shape: Shape) -> ExpPolynomial:
    n = len(matrix)
    if n == 0:
        return ExpPolynomial.constant(shape, 1)
    if n == 1:
        return matrix[0][0]
    acc = ExpPolynomial.constant(shape, 0)
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        minor = [[matrix[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = entry * symbolic_det(minor, shape)
        acc = acc + (-term if j % 2 else term)
    return acc


def regularize_augment(sys: KhovanskiiSystem, minor_index: int,
                       flip_first: bool = False) -> KhovanskiiSystem:
    """Append the determinant sign-witness equation x_{n+1}^2 det(J) - 1
    and the minor-reciprocal equation x_{n+2} minor - 1, then de-nest
    texp(x_ell) into a fresh variable with its defining equation.

    A regular zero with positive Jacobian determinant extends uniquely to
    a regular zero of the augmentation, taking the positive square root
    for x_{n+1}. For pure polynomial systems the augmentation is classical
    and no de-nesting equation is emitted.
    """
    shape = sys.shape
    n, ell = shape.n, shape.ell
    if not (1 <= minor_index <= n):
        raise ValueError("minor_index out of range")
    equations = list(sys.equations)
    if flip_first:
        equations[0] = -equations[0]
        sys = KhovanskiiSystem(shape, tuple(equations))

    det = symbolic_det(sys.jac, shape)
    minor_rows = [[sys.jac[i][j] for j in range(n) if j != minor_index - 1]
                  for i in range(n - 1)]
    minor = symbolic_det(minor_rows, shape)

    extra = 3 if ell else 2
    new_shape = Shape(ell, n + extra)
    one = ExpPolynomial.constant(new_shape, 1)
    xs = [ExpPolynomial.x_var(new_shape, i) for i in range(1, n + extra + 1)]

    def lift(p: ExpPolynomial) -> ExpPolynomial:
        q = p.extend(new_shape)
        if ell:
            q = q.substitute_y(ell, xs[n + 2])
        return q

    out = [lift(eq) for eq in sys.equations]
    out.append(xs[n] * xs[n] * lift(det) - one)
    out.append(xs[n + 1] * lift(minor) - one)
    if ell:
        out.append(xs[n + 2] - ExpPolynomial.texp_var(new_shape, ell))
    return KhovanskiiSystem(new_shape, tuple(out))


def augmented_certificate(cert: Certificate, minor_index: int = 1,
                          budget: Budget = Budget()
                          ) -> tuple[KhovanskiiSystem, Union[Certificate, CertifyFailure]]:
    """Certify the extension of an already-certified zero through
    `regularize_augment`, projecting back into the original box."""
    sys = cert.system
    n, ell = sys.shape.n, sys.shape.ell
    prec = max(cert.precision, 64)
    det_iv = cert.jacobian.det
    flip = det_iv.hi.sign < 0
    if flip:
        det_iv = det_iv.neg()
    aug = regularize_augment(sys, minor_index, flip_first=flip)

    coords = list(cert.box.coords)
    coords.append(det_iv.recip(prec).sqrt(prec).inflate(prec))
    base_minor = symbolic_det(
        [[sys.jac[i][j] for j in range(n) if j != minor_index - 1]
         for i in range(n - 1)], sys.shape)
    from .algebra import evaluate
    minor_iv = evaluate(base_minor, cert.box, prec)
    if minor_iv.contains_zero():
        return aug, CertifyFailure("jacobian-singular",
                                   "selected minor straddles zero on the box")
    coords.append(minor_iv.recip(prec).inflate(prec))
    if ell:
        from .enclose import texp_enclosure
        coords.append(texp_enclosure(cert.box.coords[ell - 1], prec).inflate(prec))
    big = Box(aug.shape, tuple(coords))
    out = certify_regular_zero(aug, big, budget)
    if isinstance(out, CertifyFailure):
        return aug, out

    def projected_inside(b: Box) -> bool:
        return all(cert.box.coords[i].contains_interval(b.coords[i])
                   for i in range(n))

    refined = refine_certificate(out, projected_inside)
    return aug, refined


# -- witness slicing ---------------------------------------------------------------------


def witness_slice(equations: Sequence[ExpPolynomial],
                  center: Sequence[Fraction]) -> KhovanskiiSystem:
    """Square an under-determined system with the critical-point equations
    of the squared distance to `center` on its zero set (vanishing bordered
    minors); every regular zero of the output satisfies the input
    equations."""
    if not equations:
        raise ValueError("no equations to slice")
    shape = equations[0].shape
    k, n = len(equations), shape.n
    if k >= n:
        raise ValueError(f"witness_slice needs fewer equations ({k}) "
                         f"than variables ({n})")
    if len(center) != n:
        raise ValueError("center length does not match the variable count")
    for eq in equations:
        if eq.shape != shape:
            raise ValueError("equation shape mismatch")

    jac = [[formal_partial(eq, j + 1) for j in range(n)] for eq in equations]
    border = [ExpPolynomial.x_var(shape, j + 1) -
              ExpPolynomial.constant(shape, Fraction(center[j])) for j in range(n)]
    rows = jac + [border]

    # leading columns: one symbolically non-vanishing partial per equation,
    # so no minor degenerates to the zero polynomial
    lead_cols: list[int] = []
    for i in range(k):
        col = next((j for j in range(n)
                    if j not in lead_cols and not jac[i][j].is_zero()), None)
        if col is None:
            raise ValueError(f"equation {i + 1} has an identically zero gradient")
        lead_cols.append(col)

    out = list(equations)
    for j in range(n):
        if j in lead_cols:
            continue
        cols = sorted(lead_cols + [j])
        sub = [[rows[r][c] for c in cols] for r in range(k + 1)]
        out.append(symbolic_det(sub, shape))
    return KhovanskiiSystem(shape, tuple(out))


# -- serialization -------------------------------------------------------------------------


def _fr_str(fr: Fraction) -> str:
    return str(fr)


def reduced_to_json(red: ReducedSystem) -> str:
    payload = {
        "shape": [red.shape.ell, red.shape.n],
        "drop_index": red.drop_index,
        "transform": {"d": red.d, "k": list(red.k), "g": _fr_str(red.g)},
        "equations": [
            {"monomials": [
                {"coeff": _fr_str(m.coeff), "xpow": list(m.xpow),
                 "lambda": ([] if m.lam.is_zero() else
                            [{"const": _fr_str(m.lam.const),
                              "linear": [_fr_str(c) for c in m.lam.linear]}])}
                for m in eq.monomials]}
            for eq in red.system],
        "certified_box": red.certified_box.serialize(),
        "precision": red.precision,
    }
    plain = to_khovanskii(red.system, red.shape)
    if plain is not None:
        payload["plain_form"] = system_text(plain)
    return json.dumps(payload, indent=2, sort_keys=True)
