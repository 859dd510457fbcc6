"""Krawczyk-based certification of regular zeros.

The operator K(X) = m - Y F(m) + (I - Y J(X))(X - m) is evaluated in
outward-rounded dyadic interval arithmetic. K(X) strictly inside the
interior of X proves existence and uniqueness of a zero of the system in
X; a determinant enclosure of the interval Jacobian that excludes zero
certifies regularity, which together with strict membership of the first
ell coordinates in (-1,1) makes the enclosed point a Khovanskii point.

The preconditioner Y (an approximate inverse of the midpoint Jacobian) is
computed non-rigorously; rigor lives entirely in the containment checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .dyadic import Dyadic, Interval, ZERO, ONE, dyadic_max
from .enclose import Box, Shape
from .algebra import ExpPolynomial, KhovanskiiSystem, evaluate, polynomial_text

FAIL_NO_CONTRACTION = "no-contraction"
FAIL_SINGULAR = "jacobian-singular"
FAIL_DOMAIN = "domain-violation"
FAIL_BUDGET = "budget-exhausted"

EvalFn = Callable[[Box, int], list[Interval]]
JacFn = Callable[[Box, int], list[list[Interval]]]


@dataclass(frozen=True, slots=True)
class Budget:
    start_precision: int = 64
    precision_cap: int = 4096
    max_iterations: int = 64
    target_width: Dyadic = Dyadic(1, -48)


@dataclass(frozen=True, slots=True)
class JacobianEnclosure:
    entries: tuple[tuple[Interval, ...], ...]
    det: Interval


@dataclass(frozen=True, slots=True)
class Certificate:
    system: KhovanskiiSystem
    box: Box
    midpoint: tuple[Dyadic, ...]
    preconditioner: tuple[tuple[Dyadic, ...], ...]
    krawczyk_image: Box
    jacobian: JacobianEnclosure
    precision: int

    def zero_enclosure(self) -> Box:
        return self.krawczyk_image


@dataclass(frozen=True, slots=True)
class CertifyFailure:
    reason: str
    detail: str = ""


@dataclass(frozen=True, slots=True)
class KrawczykResult:
    kind: str                      # "contracted" | "excluded" | "inconclusive"
    strict: bool = False
    image: Optional[Box] = None
    new_box: Optional[Box] = None
    midpoint: tuple[Dyadic, ...] = ()
    preconditioner: tuple[tuple[Dyadic, ...], ...] = ()
    detail: str = ""
    singular: bool = False


# -- vectorized evaluation ----------------------------------------------------


def interval_eval_system(sys: KhovanskiiSystem, box: Box, prec: int, *,
                         open_domain: bool = False) -> list[Interval]:
    """Componentwise enclosure of the system over the box; texp enclosures
    are shared across equations."""
    cache: dict[int, Interval] = {}
    return [evaluate(eq, box, prec, open_domain=open_domain, y_cache=cache)
            for eq in sys.equations]


def interval_jacobian(sys: KhovanskiiSystem, box: Box, prec: int) -> JacobianEnclosure:
    """Entrywise enclosure of the formal Jacobian plus a determinant
    enclosure (interval Gaussian elimination, cofactor fallback)."""
    cache: dict[int, Interval] = {}
    entries = tuple(
        tuple(evaluate(entry, box, prec, y_cache=cache) for entry in row)
        for row in sys.jac)
    return JacobianEnclosure(entries, interval_det(entries, prec))


def interval_det(entries: Sequence[Sequence[Interval]], prec: int) -> Interval:
    n = len(entries)
    if n == 1:
        return entries[0][0]
    det = _det_gauss(entries, prec)
    if det is not None:
        return det
    if n <= 8:
        return _det_cofactor(entries, prec)
    return _det_hadamard(entries, prec)


def _det_gauss(entries: Sequence[Sequence[Interval]], prec: int) -> Optional[Interval]:
    """Interval Gaussian elimination; None when no pivot excludes zero."""
    n = len(entries)
    m = [list(row) for row in entries]
    det = Interval.point(ONE)
    sign = 1
    for col in range(n):
        pivot_row = None
        best = ZERO
        for r in range(col, n):
            mig = m[r][col].mig()
            if mig > best:
                best = mig
                pivot_row = r
        if pivot_row is None:
            return None
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            sign = -sign
        pivot = m[col][col]
        det = det.mul(pivot, prec)
        inv = pivot.recip(prec)
        for r in range(col + 1, n):
            factor = m[r][col].mul(inv, prec)
            for c in range(col + 1, n):
                m[r][c] = m[r][c].sub(factor.mul(m[col][c], prec), prec)
            m[r][col] = Interval.point(ZERO)
    return det.neg() if sign < 0 else det


def _det_cofactor(entries: Sequence[Sequence[Interval]], prec: int) -> Interval:
    n = len(entries)
    if n == 1:
        return entries[0][0]
    acc = Interval.point(ZERO)
    for j in range(n):
        a = entries[0][j]
        if a.lo.is_zero() and a.hi.is_zero():
            continue
        minor = [[entries[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = a.mul(_det_cofactor(minor, prec), prec)
        acc = acc.add(term.neg() if j % 2 else term, prec)
    return acc


def _det_hadamard(entries: Sequence[Sequence[Interval]], prec: int) -> Interval:
    bound = ONE
    for row in entries:
        s = Interval.point(ZERO)
        for e in row:
            s = s.add(e.mul(e, prec), prec)
        bound = bound * s.hi.sqrt(prec, True)
    bound = bound.round(prec, True)
    return Interval(-bound, bound)


# -- the operator -------------------------------------------------------------


def krawczyk_general(eval_system: EvalFn, eval_jacobian: JacFn,
                     box: Box, prec: int) -> KrawczykResult:
    """One application of the Krawczyk operator via caller-supplied
    rigorous evaluators."""
    n = box.shape.n
    f_box = eval_system(box, prec)
    for fi in f_box:
        if not fi.contains_zero():
            return KrawczykResult("excluded", detail="residual excludes zero")

    m = box.midpoint()
    mbox = Box.point(box.shape, m)
    f_mid = eval_system(mbox, prec)
    jac_mid = eval_jacobian(mbox, prec)
    mid_matrix = [[jac_mid[i][j].midpoint().to_fraction() for j in range(n)]
                  for i in range(n)]
    inv = _invert(mid_matrix)
    if inv is None:
        return KrawczykResult(
            "inconclusive", detail="midpoint Jacobian numerically singular",
            singular=True)
    precond = tuple(
        tuple(Dyadic.from_fraction(inv[i][j], prec, round_up=False)
              for j in range(n)) for i in range(n))

    image = krawczyk_image(eval_system, eval_jacobian, box, m, precond, prec,
                           f_mid=f_mid)
    new = box.intersect(image)
    if new is None:
        return KrawczykResult("excluded", detail="Krawczyk image misses the box")
    if box.strictly_contains(image, prec):
        return KrawczykResult("contracted", strict=True, image=image, new_box=new,
                              midpoint=m, preconditioner=precond)
    if new != box:
        return KrawczykResult("contracted", strict=False, image=image, new_box=new,
                              midpoint=m, preconditioner=precond)
    return KrawczykResult("inconclusive", image=image, new_box=new,
                          midpoint=m, preconditioner=precond,
                          detail="no contraction at this precision")


def krawczyk_image(eval_system: EvalFn, eval_jacobian: JacFn, box: Box,
                   m: tuple[Dyadic, ...],
                   precond: tuple[tuple[Dyadic, ...], ...], prec: int, *,
                   f_mid: Optional[list[Interval]] = None) -> Box:
    """K(X) = m - Y F(m) + (I - Y J(X)) (X - m), outward rounded."""
    n = box.shape.n
    if f_mid is None:
        f_mid = eval_system(Box.point(box.shape, m), prec)
    jac_box = eval_jacobian(box, prec)
    y_rows = [[Interval.point(precond[i][j]) for j in range(n)] for i in range(n)]

    coords = []
    dx = [box.coords[j].sub(Interval.point(m[j])) for j in range(n)]
    for i in range(n):
        yf = Interval.point(ZERO)
        for k in range(n):
            yf = yf.add(y_rows[i][k].mul(f_mid[k], prec), prec)
        acc = Interval.point(m[i]).sub(yf, prec)
        for j in range(n):
            # R_ij = delta_ij - sum_k Y_ik J_kj
            r = Interval.point(ONE if i == j else ZERO)
            for k in range(n):
                r = r.sub(y_rows[i][k].mul(jac_box[k][j], prec), prec)
            acc = acc.add(r.mul(dx[j], prec), prec)
        coords.append(acc)
    return Box(box.shape, tuple(coords))


def _invert(matrix: list[list[Fraction]]) -> Optional[list[list[Fraction]]]:
    n = len(matrix)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(aug[r][col]))
        if aug[pivot][col] == 0:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv_p = 1 / aug[col][col]
        aug[col] = [v * inv_p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


# -- public operator on systems ------------------------------------------------


def _sys_eval(sys: KhovanskiiSystem) -> EvalFn:
    return lambda box, prec: interval_eval_system(sys, box, prec)


def _sys_jac(sys: KhovanskiiSystem) -> JacFn:
    def jac(box: Box, prec: int) -> list[list[Interval]]:
        cache: dict[int, Interval] = {}
        return [[evaluate(e, box, prec, y_cache=cache) for e in row]
                for row in sys.jac]
    return jac


def krawczyk(sys: KhovanskiiSystem, box: Box, prec: int) -> KrawczykResult:
    if sys.shape != box.shape:
        raise ValueError("system and box shapes differ")
    return krawczyk_general(_sys_eval(sys), _sys_jac(sys), box, prec)


# -- the certification ladder ---------------------------------------------------


@dataclass(frozen=True, slots=True)
class Evidence:
    box: Box
    midpoint: tuple[Dyadic, ...]
    preconditioner: tuple[tuple[Dyadic, ...], ...]
    image: Box
    precision: int


def _pad_box(box: Box, origin: Box, prec: int) -> Optional[Box]:
    """One-ulp epsilon-inflation per coordinate (degenerate coordinates can
    never strictly contain a Krawczyk image), kept within the caller's
    original box so the certificate stays a statement about that box."""
    padded = Box(box.shape, tuple(c.inflate(prec, 0, 1) for c in box.coords))
    clipped = padded.intersect(origin)
    if clipped is None:
        return None
    return clipped.clip_unit(prec) if box.shape.ell else clipped


def certify_general(eval_system: EvalFn, eval_jacobian: JacFn, box: Box,
                    budget: Budget,
                    regular: Optional[Callable[[Box, int], bool]] = None
                    ) -> Union[Evidence, CertifyFailure]:
    """Iterate the operator with box shrinking and precision doubling until
    a strict contraction (plus the caller's regularity predicate) holds on
    a box no wider than the budget target."""
    prec = budget.start_precision
    x = box.clip_unit(prec) if box.shape.ell else box
    if x is None:
        return CertifyFailure(FAIL_DOMAIN, "box empties when clipped to (-1,1)")
    origin = x
    best: Optional[Evidence] = None
    singular_seen = ""
    stalled = ""
    weak_streak = 0
    for _ in range(budget.max_iterations):
        res = krawczyk_general(eval_system, eval_jacobian, x, prec)
        if res.kind == "excluded":
            if best is not None:
                break
            return CertifyFailure(FAIL_NO_CONTRACTION, res.detail)
        if res.kind == "inconclusive":
            if res.singular:
                singular_seen = res.detail
            else:
                stalled = res.detail
            if prec >= budget.precision_cap:
                break
            prec = min(prec * 2, budget.precision_cap)
            weak_streak = 0
            continue
        if res.strict and (regular is None or regular(x, prec)):
            best = Evidence(x, res.midpoint, res.preconditioner, res.image, prec)
            if x.max_width() <= budget.target_width:
                break
        new = _pad_box(res.new_box, origin, prec)
        # escalate when progress stalls: fixpoint, a box already at the
        # rounding scale of the current precision (strictness is then
        # unattainable), or a streak of weak shrinks
        at_floor = new is not None and \
            new.max_width() <= _rounding_floor(new, prec) and not res.strict
        if new is not None and new != x and \
                Dyadic(4) * new.max_width() <= Dyadic(3) * x.max_width():
            weak_streak = 0
        else:
            weak_streak += 1
        if new is None or new == x or at_floor or weak_streak >= 6:
            if best is not None or prec >= budget.precision_cap:
                break
            prec = min(prec * 2, budget.precision_cap)
            weak_streak = 0
            if new is not None:
                x = new
            continue
        x = new
    if best is not None:
        return best
    if singular_seen:
        return CertifyFailure(FAIL_SINGULAR, singular_seen)
    if stalled or prec >= budget.precision_cap:
        return CertifyFailure(FAIL_BUDGET,
                              stalled or "precision cap reached without contraction")
    return CertifyFailure(FAIL_NO_CONTRACTION, "iteration budget exhausted")


def _rounding_floor(box: Box, prec: int) -> Dyadic:
    mags = [c.mag() for c in box.coords]
    m = dyadic_max(*mags, ONE)
    return Dyadic(1, m.exp + abs(m.man).bit_length() - prec + 3)


def certify_regular_zero(sys: KhovanskiiSystem, box: Box,
                         budget: Budget = Budget()
                         ) -> Union[Certificate, CertifyFailure]:
    """Produce a certificate of a unique regular zero of the system in the
    box, or a failure with a reason."""
    if sys.shape != box.shape:
        raise ValueError("system and box shapes differ")
    ev_fn, jac_fn = _sys_eval(sys), _sys_jac(sys)

    def regular(x: Box, prec: int) -> bool:
        return not interval_det(jac_fn(x, prec), prec).contains_zero()

    out = certify_general(ev_fn, jac_fn, box, budget, regular)
    if isinstance(out, CertifyFailure):
        return out
    jac = interval_jacobian(sys, out.box, out.precision)
    if jac.det.contains_zero():
        return CertifyFailure(FAIL_SINGULAR,
                              "determinant enclosure straddles zero")
    if not out.box.unit_coords_strict():
        return CertifyFailure(FAIL_DOMAIN,
                              "certified box touches the unit boundary")
    return Certificate(sys, out.box, out.midpoint, out.preconditioner,
                       out.image, jac, out.precision)


def refine_certificate(cert: Certificate, until: Callable[[Box], bool],
                       max_rounds: int = 64) -> Union[Certificate, CertifyFailure]:
    """Re-run the ladder at increasing precision until `until(zero box)`
    holds; used for containment checks that need the enclosure tighter
    than the original certificate."""
    prec = cert.precision
    box = cert.box
    current = cert
    for _ in range(max_rounds):
        if until(current.box):
            return current
        prec *= 2
        budget = Budget(start_precision=prec, precision_cap=max(prec * 4, 4096),
                        target_width=Dyadic(1, -(prec - 16)))
        out = certify_regular_zero(cert.system, box, budget)
        if isinstance(out, CertifyFailure):
            return out
        current = out
        box = current.box
    return CertifyFailure(FAIL_BUDGET, "refinement budget exhausted")


# -- independent re-verification -------------------------------------------------


def check_certificate(cert: Certificate) -> bool:
    """Re-verify a certificate from scratch at its stated precision.

    Only the midpoint and preconditioner are taken on trust (any choice
    makes the containment argument valid); everything else is recomputed
    and compared against the stored fields.
    """
    try:
        sys, box, prec = cert.system, cert.box, cert.precision
        n = sys.shape.n
        if box.shape != sys.shape or len(cert.midpoint) != n:
            return False
        if sys.shape.ell and not box.unit_coords_strict():
            return False
        for i, c in enumerate(box.coords):
            if not c.contains(cert.midpoint[i]):
                return False
        image = krawczyk_image(_sys_eval(sys), _sys_jac(sys), box,
                               cert.midpoint, cert.preconditioner, prec)
        if not box.strictly_contains(image, prec):
            return False
        if not all(si.contains_interval(ri) for si, ri in
                   zip(cert.krawczyk_image.coords, image.coords)):
            return False
        if not box.strictly_contains(cert.krawczyk_image, prec):
            return False
        jac = interval_jacobian(sys, box, prec)
        if jac.det.contains_zero() or cert.jacobian.det.contains_zero():
            return False
        if not cert.jacobian.det.contains_interval(jac.det):
            return False
        for srow, rrow in zip(cert.jacobian.entries, jac.entries):
            for s, r in zip(srow, rrow):
                if not s.contains_interval(r):
                    return False
        return True
    except Exception:
        return False


# -- serialization ---------------------------------------------------------------


def system_text(sys: KhovanskiiSystem) -> str:
    lines = [f"shape: {sys.shape.ell} {sys.shape.n}"]
    lines += [polynomial_text(eq) for eq in sys.equations]
    return "\n".join(lines)


def certificate_payload(cert: Certificate) -> dict:
    return {
        "system": system_text(cert.system),
        "box": cert.box.serialize(),
        "midpoint": [str(d) for d in cert.midpoint],
        "preconditioner": [[str(d) for d in row] for row in cert.preconditioner],
        "krawczyk_image": cert.krawczyk_image.serialize(),
        "jacobian": {
            "entries": [[iv.serialize() for iv in row]
                        for row in cert.jacobian.entries],
            "det": cert.jacobian.det.serialize(),
        },
        "precision": cert.precision,
    }


def certificate_to_json(cert: Certificate) -> str:
    return json.dumps(certificate_payload(cert), indent=2, sort_keys=True)


def certificate_from_json(text: str) -> Certificate:
    from .formula import parse_system_text

    data = json.loads(text)
    sys = parse_system_text(data["system"])
    shape = sys.shape
    box = Box.deserialize(shape, data["box"])
    midpoint = tuple(Dyadic.parse(s) for s in data["midpoint"])
    precond = tuple(tuple(Dyadic.parse(s) for s in row)
                    for row in data["preconditioner"])
    image = Box.deserialize(shape, data["krawczyk_image"])
    entries = tuple(tuple(Interval.parse(p) for p in row)
                    for row in data["jacobian"]["entries"])
    det = Interval.parse(data["jacobian"]["det"])
    return Certificate(sys, box, midpoint, precond, image,
                       JacobianEnclosure(entries, det), int(data["precision"]))
