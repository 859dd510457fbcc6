"""Branch-and-prune satisfiability over the guarded domain.

Boxes are bisected along their widest coordinate; a box is discarded when
an equation's enclosure excludes zero (evaluated with open-domain
semantics for the exponentiated coordinates, since the boundary points do
not belong to the region), and certified once Krawczyk contracts on it.
Unbounded coordinates are searched within a caller-chosen radius, so
refutations are reported as REGION-UNSAT, never UNSAT.

Per-box classification is pure, the frontier is processed in a canonical
order, and results are canonically sorted, so reports are identical for
any worker count.
"""

from __future__ import annotations

import hashlib
import json
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .dyadic import Dyadic, Interval, ZERO
from .enclose import Box, Shape
from .algebra import ExpPolynomial, KhovanskiiSystem, evaluate, formal_partial
from .certify import (Budget, Certificate, certificate_payload,
                      certify_regular_zero, krawczyk, refine_certificate)
from .formula import (Atom, Disjunct, ExistentialSystem, Formula, Or, And,
                      atoms_to_equations, conjoin_definitions, flatten,
                      formula_text, normalize_complexity,
                      term_to_polynomial, TSub)

SAT = "SAT"
REGION_UNSAT = "REGION-UNSAT"
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True, slots=True)
class SearchConfig:
    radius: Dyadic = Dyadic(8)
    max_depth: int = 48
    start_precision: int = 64
    precision_cap: int = 4096
    workers: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.radius.sign <= 0:
            raise ValueError("radius must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")

    def budget(self) -> Budget:
        return Budget(start_precision=self.start_precision,
                      precision_cap=self.precision_cap)

    def echo(self) -> dict:
        return {"radius": str(self.radius), "max_depth": self.max_depth,
                "start_precision": self.start_precision,
                "precision_cap": self.precision_cap,
                "workers": self.workers, "seed": self.seed}


@dataclass(frozen=True, slots=True)
class SolveReport:
    status: str
    certificates: tuple[Certificate, ...]
    certified_regions: tuple[Box, ...]
    excluded: tuple[Box, ...]
    unknown: tuple[Box, ...]
    config: SearchConfig

    def payload(self) -> dict:
        return {
            "status": self.status,
            "certificates": [certificate_payload(c) for c in self.certificates],
            "certified_regions": [b.serialize() for b in self.certified_regions],
            "excluded": [b.serialize() for b in self.excluded],
            "unknown": [b.serialize() for b in self.unknown],
            "config": self.config.echo(),
        }


def _box_key(box: Box):
    return tuple((str(c.lo), str(c.hi)) for c in box.coords)


def _sorted_boxes(boxes: Sequence[Box]) -> tuple[Box, ...]:
    return tuple(sorted(boxes, key=_box_key))


# -- core branch-and-prune -------------------------------------------------------


@dataclass(frozen=True, slots=True)
class _Leaf:
    kind: str                      # "excluded" | "certified" | "unknown" | "split"
    box: Box
    cert: Optional[Certificate] = None
    children: tuple[Box, ...] = ()
    carved: tuple[Box, ...] = ()   # zero-free complement of a contraction


def _box_difference(outer: Box, inner: Box) -> list[Box]:
    """Decompose outer minus inner into at most 2n slabs."""
    out: list[Box] = []
    cur = list(outer.coords)
    for i, (oc, ic) in enumerate(zip(outer.coords, inner.coords)):
        if ic.lo > oc.lo:
            out.append(Box(outer.shape, tuple(
                cur[:i] + [Interval(oc.lo, ic.lo)] + cur[i + 1:])))
        if ic.hi < oc.hi:
            out.append(Box(outer.shape, tuple(
                cur[:i] + [Interval(ic.hi, oc.hi)] + cur[i + 1:])))
        cur[i] = ic
    return out


def _clip_region(shape: Shape, region: Box) -> Optional[Box]:
    unit = Interval(Dyadic(-1), Dyadic(1))
    coords = list(region.coords)
    for i in range(shape.ell):
        iv = coords[i].intersect(unit)
        if iv is None:
            return None
        coords[i] = iv
    return Box(shape, tuple(coords))


def _open_empty(shape: Shape, box: Box) -> bool:
    """True when no point of the box lies in the open unit domain."""
    one, minus_one = Dyadic(1), Dyadic(-1)
    for c in box.coords[: shape.ell]:
        if c.hi <= minus_one or c.lo >= one:
            return True
    return False


def _mean_value_excludes(equations: Sequence[ExpPolynomial],
                         jac_rows: Sequence[Sequence[ExpPolynomial]],
                         box: Box, prec: int) -> bool:
    """Centered-form test F(m) + J(box)(box - m); much tighter than the
    natural enclosure when the box is small, since it avoids most interval
    dependency in the monomials."""
    m = box.midpoint()
    mbox = Box.point(box.shape, m)
    dx = [box.coords[j].sub(Interval.point(m[j])) for j in range(box.shape.n)]
    cache_m: dict = {}
    cache_b: dict = {}
    for eq, grad in zip(equations, jac_rows):
        acc = evaluate(eq, mbox, prec, open_domain=True, y_cache=cache_m)
        for j in range(box.shape.n):
            if grad[j].is_zero():
                continue
            g = evaluate(grad[j], box, prec, open_domain=True, y_cache=cache_b)
            acc = acc.add(g.mul(dx[j], prec), prec)
        if not acc.contains_zero():
            return True
    return False


def _classify(sys: KhovanskiiSystem, box: Box, depth: int, cfg: SearchConfig,
              attempt_width: Dyadic, do_certify: bool) -> _Leaf:
    shape = sys.shape
    if _open_empty(shape, box):
        return _Leaf("excluded", box)
    prec = cfg.start_precision
    cache: dict = {}
    for eq in sys.equations:
        iv = evaluate(eq, box, prec, open_domain=True, y_cache=cache)
        if not iv.contains_zero():
            return _Leaf("excluded", box)
    if _mean_value_excludes(sys.equations, sys.jac, box, prec):
        return _Leaf("excluded", box)

    if do_certify and box.max_width() <= attempt_width:
        candidate = _inflate_into_domain(shape, box, prec)
        res = krawczyk(sys, candidate, prec) if candidate is not None else None
        if res is not None:
            if res.kind == "excluded":
                return _Leaf("excluded", box)
            if res.kind == "contracted":
                shrunk = box.intersect(res.image)
                if shrunk is None:
                    return _Leaf("excluded", box)
                # the contraction chain keeps every zero, so a certificate
                # here accounts for the whole leaf
                budget = Budget(start_precision=cfg.start_precision,
                                precision_cap=min(cfg.precision_cap,
                                                  cfg.start_precision * 8),
                                max_iterations=32)
                cert = certify_regular_zero(sys, candidate, budget)
                if isinstance(cert, Certificate):
                    return _Leaf("certified", box, cert=cert)
                if shrunk != box and depth < cfg.max_depth:
                    # split the contracted part; the complement is
                    # provably zero-free
                    if Dyadic(4) * shrunk.max_width() <= Dyadic(3) * box.max_width():
                        children: tuple[Box, ...] = (shrunk,)
                    else:
                        children = shrunk.split(shrunk.widest_index())
                    return _Leaf("split", box, children=children,
                                 carved=tuple(_box_difference(box, shrunk)))

    if depth >= cfg.max_depth:
        return _Leaf("unknown", box)
    a, b = box.split(box.widest_index())
    return _Leaf("split", box, children=(a, b))


def _inflate_into_domain(shape: Shape, box: Box, prec: int) -> Optional[Box]:
    unit = Interval(Dyadic(-1), Dyadic(1))
    coords = []
    for i, c in enumerate(box.coords):
        c = c.inflate(prec)
        if i < shape.ell:
            clipped = c.intersect(unit)
            if clipped is None:
                return None
            c = clipped
        coords.append(c)
    return Box(shape, tuple(coords))


def _merge_certificates(sys: KhovanskiiSystem, certs: list[Certificate],
                        cfg: SearchConfig) -> list[Certificate]:
    """Collapse certificates that provably enclose the same zero: if the
    hull of two boxes re-certifies, its unique zero is both of theirs."""
    out = sorted(certs, key=lambda c: _box_key(c.box))
    changed = True
    while changed:
        changed = False
        for i in range(len(out)):
            for j in range(i + 1, len(out)):
                a, b = out[i], out[j]
                if a.box.intersect(b.box) is None:
                    continue
                hull = Box(a.box.shape, tuple(
                    x.hull(y) for x, y in zip(a.box.coords, b.box.coords)))
                merged = certify_regular_zero(sys, hull, cfg.budget())
                if isinstance(merged, Certificate):
                    out = [c for k, c in enumerate(out) if k not in (i, j)]
                    out.append(merged)
                    out.sort(key=lambda c: _box_key(c.box))
                    changed = True
                    break
            if changed:
                break
    return out


def _run_tree(sys: KhovanskiiSystem, region: Box, cfg: SearchConfig,
              do_certify: bool) -> tuple[list[Certificate], list[Box],
                                         list[Box], list[Box]]:
    attempt_width = region.max_width().div_int(4, cfg.start_precision, True) \
        if not region.max_width().is_zero() else ZERO
    frontier: list[tuple[Box, int]] = [(region, 0)]
    certs: list[Certificate] = []
    cert_leaves: list[Box] = []
    excluded: list[Box] = []
    unknown: list[Box] = []

    def work(item: tuple[Box, int]) -> _Leaf:
        box, depth = item
        return _classify(sys, box, depth, cfg, attempt_width, do_certify)

    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        while frontier:
            if pool is not None:
                leaves = list(pool.map(work, frontier))
            else:
                leaves = [work(item) for item in frontier]
            nxt: list[tuple[Box, int]] = []
            for (box, depth), leaf in zip(frontier, leaves):
                if leaf.kind == "excluded":
                    excluded.append(leaf.box)
                elif leaf.kind == "certified":
                    certs.append(leaf.cert)
                    cert_leaves.append(leaf.box)
                elif leaf.kind == "unknown":
                    unknown.append(leaf.box)
                else:
                    excluded.extend(leaf.carved)
                    nxt.extend((child, depth + 1) for child in leaf.children)
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    return certs, cert_leaves, excluded, unknown


def solve_square(sys: KhovanskiiSystem, region: Box,
                 cfg: SearchConfig = SearchConfig()) -> SolveReport:
    """Certify every regular zero of a square system isolated within the
    region, or prove the region zero-free."""
    if sys.shape != region.shape:
        raise ValueError("system and region shapes differ")
    clipped = _clip_region(sys.shape, region)
    if clipped is None:
        return SolveReport(REGION_UNSAT, (), (), (region,), (), cfg)
    certs, cert_leaves, excluded, unknown = _run_tree(sys, clipped, cfg, True)
    merged = _merge_certificates(sys, certs, cfg) if len(certs) > 1 else certs
    if merged:
        status = SAT
    elif not unknown:
        status = REGION_UNSAT
    else:
        status = UNKNOWN
    return SolveReport(status, tuple(merged), _sorted_boxes(cert_leaves),
                       _sorted_boxes(excluded), _sorted_boxes(unknown), cfg)


def _exclusion_only(sys: KhovanskiiSystem, region: Box,
                    cfg: SearchConfig) -> tuple[bool, list[Box], list[Box]]:
    """Refutation pass that never certifies; True when fully excluded."""
    clipped = _clip_region(sys.shape, region)
    if clipped is None:
        return True, [region], []
    _, _, excluded, unknown = _run_tree(sys, clipped, cfg, False)
    return not unknown, excluded, unknown


# -- disjunct solving ---------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class InequalityCheck:
    atom: str
    enclosure: Interval
    verified: bool


@dataclass(frozen=True, slots=True)
class SatReport:
    status: str
    certificates: tuple[Certificate, ...] = ()
    witness_box: Optional[Box] = None
    inequality_checks: tuple[InequalityCheck, ...] = ()
    detail: str = ""

    def payload(self) -> dict:
        return {
            "status": self.status,
            "certificates": [certificate_payload(c) for c in self.certificates],
            "witness_box": self.witness_box.serialize() if self.witness_box else None,
            "inequality_checks": [
                {"atom": c.atom, "enclosure": c.enclosure.serialize(),
                 "verified": c.verified} for c in self.inequality_checks],
            "detail": self.detail,
        }


def _dnf_branches(f: Formula) -> list[list[Atom]]:
    if isinstance(f, Atom):
        return [[f]]
    if isinstance(f, Or):
        out = []
        for x in f.items:
            out.extend(_dnf_branches(x))
        return out
    branches: list[list[Atom]] = [[]]
    for x in f.items:
        sub = _dnf_branches(x)
        branches = [b + s for b in branches for s in sub]
    return branches


def _split_nonstrict(atoms: list[Atom]) -> list[list[Atom]]:
    """<= and >= split into (< or =) / (> or =) so that every equation
    device stays primitive on its branch."""
    branches = [[]]
    for a in atoms:
        if a.op in ("<=", ">="):
            strict = Atom(a.lhs, a.op[0], a.rhs)
            equal = Atom(a.lhs, "=", a.rhs)
            branches = [b + [v] for b in branches for v in (strict, equal)]
        else:
            branches = [b + [a] for b in branches]
    return branches


def _guard_regions(d: Disjunct, shape: Shape, cfg: SearchConfig) -> list[Box]:
    """Coordinate domains induced by the guards; one box per combination of
    outside-guard sides."""
    r = cfg.radius
    one, minus_one = Dyadic(1), Dyadic(-1)
    choices: list[list[Interval]] = []
    for i, v in enumerate(d.var_order):
        if v in d.inside:
            choices.append([Interval(minus_one, one)])
        elif v in d.outside:
            sides = []
            if -r <= minus_one:
                sides.append(Interval(-r, minus_one))
            if one <= r:
                sides.append(Interval(one, r))
            if not sides:
                return []
            choices.append(sides)
        else:
            choices.append([Interval(-r, r)])
    for _ in range(shape.n - len(d.var_order)):      # fresh witnesses
        choices.append([Interval(-r, r)])

    regions = [[]]
    for opts in choices:
        regions = [bs + [iv] for bs in regions for iv in opts]
    return [Box(shape, tuple(bs)) for bs in regions]


def _slice_center(shape: Shape, box: Box, seed: int) -> list[Fraction]:
    """Perturbed box midpoint; the perturbation is seeded and
    process-stable (str hashes are not)."""
    tag = f"{seed}|{shape.ell}|{shape.n}|{_box_key(box)}".encode()
    rng = random.Random(int.from_bytes(hashlib.sha256(tag).digest()[:8], "big"))
    center = []
    for c in box.coords:
        mid = c.midpoint().to_fraction()
        w = c.width().to_fraction()
        center.append(mid + (w + Fraction(1, 64)) * Fraction(rng.randint(-8, 8), 257))
    return center


def _strict_atom_checks(branch_atoms: list[Atom], system: ExistentialSystem,
                        box: Box, prec: int) -> tuple[list[InequalityCheck], bool]:
    """Interval verification of the branch's strict atoms over a certified
    box (the equation encoding already implies them; this produces the
    independent verification intervals for the report)."""
    var_index = {v: i for v, i in system.witness_map}
    checks: list[InequalityCheck] = []
    all_ok = True
    for a in branch_atoms:
        if a.op not in ("<", ">", "!="):
            continue
        diff = term_to_polynomial(TSub(a.lhs, a.rhs), system.shape, var_index)
        iv = evaluate(diff, box, prec)
        if a.op == ">":
            ok = iv.lo.sign > 0
        elif a.op == "<":
            ok = iv.hi.sign < 0
        else:
            ok = not iv.contains_zero()
        checks.append(InequalityCheck(formula_text(a), iv, ok))
        all_ok = all_ok and ok
    return checks, all_ok


def _guards_hold(d: Disjunct, system: ExistentialSystem, box: Box) -> bool:
    """The certified box must sit inside the disjunct's guard region."""
    one, minus_one = Dyadic(1), Dyadic(-1)
    var_index = {v: i for v, i in system.witness_map}
    for v in d.inside:
        c = box.coords[var_index[v]]
        if not (minus_one < c.lo and c.hi < one):
            return False
    for v in d.outside:
        c = box.coords[var_index[v]]
        if not (c.hi <= minus_one or c.lo >= one):
            return False
    return True


def solve_disjunct(d: Disjunct, cfg: SearchConfig = SearchConfig()) -> SatReport:
    """Decide one guard-region disjunct with certified SAT witnesses and
    exclusion-based REGION-UNSAT."""
    branch_status: list[str] = []
    for atom_branch in (b2 for b1 in _dnf_branches(d.matrix)
                        for b2 in _split_nonstrict(b1)):
        sub = Disjunct(d.var_order, d.ell, d.inside, d.outside,
                       And(tuple(atom_branch)) if len(atom_branch) > 1
                       else atom_branch[0])
        system = atoms_to_equations(sub)
        if system.trivially_false:
            branch_status.append(REGION_UNSAT)
            continue
        regions = _guard_regions(sub, system.shape, cfg)
        if not regions:
            branch_status.append(REGION_UNSAT)
            continue
        if not system.equations:
            witness = regions[0]
            return SatReport(SAT, (), witness,
                             detail="no equations; any guarded point satisfies "
                                    "the branch")
        k, n = len(system.equations), system.shape.n
        if k == n:
            outcome = _solve_branch_square(
                KhovanskiiSystem(system.shape, system.equations), regions,
                sub, atom_branch, system, cfg)
        elif k < n:
            outcome = _solve_branch_underdetermined(system, regions, sub,
                                                    atom_branch, cfg)
        else:
            outcome = _solve_branch_refute_only(system, regions, cfg)
        if outcome.status == SAT:
            return outcome
        branch_status.append(outcome.status)
    if branch_status and all(s == REGION_UNSAT for s in branch_status):
        return SatReport(REGION_UNSAT)
    return SatReport(UNKNOWN)


def _witness_from_cert(cert: Certificate, sub: Disjunct,
                       system: ExistentialSystem, atoms: list[Atom]
                       ) -> Optional[SatReport]:
    checks, ok = _strict_atom_checks(atoms, system, cert.box, cert.precision)
    if (not ok) or not _guards_hold(sub, system, cert.box):
        tightened = refine_certificate(
            cert, lambda b: (_strict_atom_checks(atoms, system, b,
                                                 cert.precision)[1]
                             and _guards_hold(sub, system, b)))
        if not isinstance(tightened, Certificate):
            return None
        cert = tightened
        checks, ok = _strict_atom_checks(atoms, system, cert.box, cert.precision)
        if (not ok) or not _guards_hold(sub, system, cert.box):
            return None
    return SatReport(SAT, (cert,), cert.box, tuple(checks))


def _solve_branch_square(sys: KhovanskiiSystem, regions: list[Box],
                         sub: Disjunct, atoms: list[Atom],
                         system: ExistentialSystem,
                         cfg: SearchConfig) -> SatReport:
    statuses = []
    for region in regions:
        report = solve_square(sys, region, cfg)
        for cert in report.certificates:
            hit = _witness_from_cert(cert, sub, system, atoms)
            if hit is not None:
                return hit
        statuses.append(report.status)
    if statuses and all(s == REGION_UNSAT for s in statuses):
        return SatReport(REGION_UNSAT)
    return SatReport(UNKNOWN)


def _solve_branch_underdetermined(system: ExistentialSystem, regions: list[Box],
                                  sub: Disjunct, atoms: list[Atom],
                                  cfg: SearchConfig) -> SatReport:
    from .reduce import witness_slice

    # refutation never leans on slice equations: prune on the originals
    # only, at a shallow depth (the zero set has positive dimension, so
    # deep subdivision along it would blow up)
    shallow = SearchConfig(radius=cfg.radius,
                           max_depth=min(cfg.max_depth, 16),
                           start_precision=cfg.start_precision,
                           precision_cap=cfg.precision_cap,
                           workers=cfg.workers, seed=cfg.seed)
    fully_excluded = True
    survivors: list[tuple[Box, Box]] = []
    for region in regions:
        ok, _, unknown = _exclusion_only_system(system.equations, region, shallow)
        fully_excluded = fully_excluded and ok
        survivors.extend((region, b) for b in unknown)
    if fully_excluded:
        return SatReport(REGION_UNSAT)

    # SAT hunt: slice around the surviving boxes whose midpoints sit
    # closest to the zero set (cheap residual ranking); the squared
    # distance to such a point has a critical point nearby, which the
    # square solver can certify locally
    local = SearchConfig(radius=cfg.radius, max_depth=min(cfg.max_depth, 12),
                         start_precision=cfg.start_precision,
                         precision_cap=cfg.precision_cap,
                         workers=cfg.workers, seed=cfg.seed)
    survivors.sort(key=lambda rb: _box_key(rb[1]))
    scored = sorted(
        ((_residual_score(system.equations, rb[1], cfg.start_precision), i)
         for i, rb in enumerate(survivors)),
        key=lambda si: (si[0], si[1]))
    for _, idx in scored[:12]:
        region, box = survivors[idx]
        center = _slice_center(system.shape, box, cfg.seed)
        sliced = witness_slice(list(system.equations), center)
        widened = Box(box.shape,
                      tuple(c.inflate(cfg.start_precision, 1, 1)
                            for c in box.coords)).intersect(region)
        if widened is None:
            continue
        report = solve_square(sliced, widened, local)
        for cert in report.certificates:
            hit = _witness_from_cert(cert, sub, system, atoms)
            if hit is not None:
                return hit
    return SatReport(UNKNOWN)


def _residual_score(equations: Sequence[ExpPolynomial], box: Box,
                    prec: int) -> float:
    mid = Box.point(box.shape, box.midpoint())
    score = 0.0
    cache: dict = {}
    for eq in equations:
        iv = evaluate(eq, mid, prec, open_domain=True, y_cache=cache)
        score += abs(float(iv.midpoint()))
    return score


def _solve_branch_refute_only(system: ExistentialSystem, regions: list[Box],
                              cfg: SearchConfig) -> SatReport:
    fully = True
    for region in regions:
        ok, _, _ = _exclusion_only_system(system.equations, region, cfg)
        fully = fully and ok
    return SatReport(REGION_UNSAT if fully else UNKNOWN,
                     detail="over-determined equation block: refutation only")


def _exclusion_only_system(equations: tuple[ExpPolynomial, ...], region: Box,
                           cfg: SearchConfig) -> tuple[bool, list[Box], list[Box]]:
    shape = equations[0].shape
    if len(equations) == shape.n:
        return _exclusion_only(KhovanskiiSystem(shape, equations), region, cfg)
    # non-square block: classify with direct evaluation
    clipped = _clip_region(shape, region)
    if clipped is None:
        return True, [region], []
    jac_rows = [[formal_partial(eq, j + 1) for j in range(shape.n)]
                for eq in equations]
    frontier = [(clipped, 0)]
    excluded: list[Box] = []
    unknown: list[Box] = []
    prec = cfg.start_precision
    while frontier:
        nxt = []
        for box, depth in frontier:
            if _open_empty(shape, box):
                excluded.append(box)
                continue
            cache: dict = {}
            dead = False
            for eq in equations:
                iv = evaluate(eq, box, prec, open_domain=True, y_cache=cache)
                if not iv.contains_zero():
                    dead = True
                    break
            if not dead:
                dead = _mean_value_excludes(equations, jac_rows, box, prec)
            if dead:
                excluded.append(box)
            elif depth >= cfg.max_depth:
                unknown.append(box)
            else:
                a, b = box.split(box.widest_index())
                nxt.extend(((a, depth + 1), (b, depth + 1)))
        frontier = nxt
    return not unknown, excluded, unknown


# -- whole formulas -------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class FormulaReport:
    status: str
    disjunct_reports: tuple[tuple[str, SatReport], ...]
    config: SearchConfig

    def payload(self) -> dict:
        return {
            "status": self.status,
            "disjuncts": [{"guards": g, **r.payload()}
                          for g, r in self.disjunct_reports],
            "config": self.config.echo(),
        }

    def to_json(self, timing: Optional[float] = None) -> str:
        payload = self.payload()
        if timing is not None:
            payload["timing_seconds"] = timing
        return json.dumps(payload, indent=2, sort_keys=True)


def solve_formula(f: Formula, cfg: SearchConfig = SearchConfig()) -> FormulaReport:
    """flatten -> case split -> solve each disjunct; SAT when any disjunct
    is SAT, REGION-UNSAT when every disjunct is refuted within the radius."""
    flat, defs = flatten(f)
    full = conjoin_definitions(flat, defs)
    reports = []
    for d in normalize_complexity(full):
        rep = solve_disjunct(d, cfg)
        reports.append((d.guard_text(), rep))
    if any(r.status == SAT for _, r in reports):
        status = SAT
    elif all(r.status == REGION_UNSAT for _, r in reports):
        status = REGION_UNSAT
    else:
        status = UNKNOWN
    return FormulaReport(status, tuple(reports), cfg)
