"""Quantifier-free formulas over {<=,<,=,+,*,^,E} and their normal forms.

The pipeline: parse -> flatten (E applied to variables only, no nesting)
-> case split every E-argument variable on membership in (-1,1), replacing
E(x) by 0 on the outside branch -> convert a conjunctive disjunct into an
existential equation system (x>0 becomes x*y^2-1=0 with a fresh witness,
and so on), ready for certified search.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .algebra import ExpPolynomial, KhovanskiiSystem
from .enclose import Shape

# -- term AST -----------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class TConst:
    value: Fraction


@dataclass(frozen=True, slots=True)
class TVar:
    name: str


@dataclass(frozen=True, slots=True)
class TNeg:
    arg: "Term"


@dataclass(frozen=True, slots=True)
class TAdd:
    left: "Term"
    right: "Term"


@dataclass(frozen=True, slots=True)
class TSub:
    left: "Term"
    right: "Term"


@dataclass(frozen=True, slots=True)
class TMul:
    left: "Term"
    right: "Term"


@dataclass(frozen=True, slots=True)
class TPow:
    base: "Term"
    exponent: int


@dataclass(frozen=True, slots=True)
class TExp:
    arg: "Term"


Term = Union[TConst, TVar, TNeg, TAdd, TSub, TMul, TPow, TExp]


# -- formula AST ----------------------------------------------------------------

_NEGATE = {"=": "!=", "!=": "=", "<": ">=", ">=": "<", ">": "<=", "<=": ">"}
_CMP_OPS = tuple(_NEGATE)


@dataclass(frozen=True, slots=True)
class Atom:
    lhs: Term
    op: str
    rhs: Term


@dataclass(frozen=True, slots=True)
class And:
    items: tuple["Formula", ...]


@dataclass(frozen=True, slots=True)
class Or:
    items: tuple["Formula", ...]


Formula = Union[Atom, And, Or]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


# -- tokenizer -------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<texp>E)
  | (?P<ident>[a-z][a-z0-9]*)
  | (?P<op><=|>=|!=|[-+*^()&|!<>=])
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    # formulas ------------------------------------------------------------

    def formula(self) -> Formula:
        out = self.and_expr()
        while self.peek()[1] == "|":
            self.next()
            out = _mk_or(out, self.and_expr())
        return out

    def and_expr(self) -> Formula:
        out = self.not_expr()
        while self.peek()[1] == "&":
            self.next()
            out = _mk_and(out, self.not_expr())
        return out

    def not_expr(self) -> Formula:
        if self.peek()[1] == "!":
            self.next()
            return negate(self.not_expr())
        return self.atom_or_group()

    def atom_or_group(self) -> Formula:
        mark = self.i
        try:
            return self.comparison()
        except ParseError:
            self.i = mark
        if self.peek()[1] == "(":
            self.next()
            out = self.formula()
            self.expect(")")
            return out
        kind, val, pos = self.peek()
        raise ParseError(f"expected an atom, found {val or 'end of input'!r}", pos)

    def comparison(self) -> Atom:
        lhs = self.term()
        kind, val, pos = self.next()
        if val not in _CMP_OPS:
            raise ParseError(f"expected a comparison, found {val or 'end of input'!r}",
                             pos)
        rhs = self.term()
        return Atom(lhs, val, rhs)

    # terms ----------------------------------------------------------------

    def term(self) -> Term:
        out = self.product()
        while self.peek()[1] in ("+", "-"):
            op = self.next()[1]
            rhs = self.product()
            out = TAdd(out, rhs) if op == "+" else TSub(out, rhs)
        return out

    def product(self) -> Term:
        out = self.unary()
        while self.peek()[1] == "*":
            self.next()
            out = TMul(out, self.unary())
        return out

    def unary(self) -> Term:
        if self.peek()[1] == "-":
            self.next()
            return TNeg(self.unary())
        return self.power()

    def power(self) -> Term:
        base = self.primary()
        if self.peek()[1] == "^":
            self.next()
            kind, val, pos = self.next()
            if kind != "number" or "/" in val:
                raise ParseError("power exponents must be integer literals", pos)
            return TPow(base, int(val))
        return base

    def primary(self) -> Term:
        kind, val, pos = self.next()
        if kind == "number":
            return TConst(Fraction(val))
        if kind == "ident":
            return TVar(val)
        if kind == "texp":
            self.expect("(")
            arg = self.term()
            self.expect(")")
            return TExp(arg)
        if val == "(":
            out = self.term()
            self.expect(")")
            return out
        raise ParseError(f"expected a term, found {val or 'end of input'!r}", pos)


def _mk_and(a: Formula, b: Formula) -> Formula:
    items = (a.items if isinstance(a, And) else (a,)) + \
            (b.items if isinstance(b, And) else (b,))
    return And(items)


def _mk_or(a: Formula, b: Formula) -> Formula:
    items = (a.items if isinstance(a, Or) else (a,)) + \
            (b.items if isinstance(b, Or) else (b,))
    return Or(items)


def negate(f: Formula) -> Formula:
    """Push a negation down to the atoms (every relation has a complement)."""
    if isinstance(f, Atom):
        return Atom(f.lhs, _NEGATE[f.op], f.rhs)
    if isinstance(f, And):
        return Or(tuple(negate(x) for x in f.items))
    return And(tuple(negate(x) for x in f.items))


def parse(text: str) -> Formula:
    """Parse a quantifier-free formula; unknown characters and malformed
    syntax raise ParseError with a position."""
    p = _Parser(text)
    out = p.formula()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected trailing input {val!r}", pos)
    return out


def parse_term(text: str) -> Term:
    p = _Parser(text)
    out = p.term()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected trailing input {val!r}", pos)
    return out


# -- printing ---------------------------------------------------------------------


def term_text(t: Term, parent_prec: int = 0) -> str:
    if isinstance(t, TConst):
        s = str(t.value)
        return s if t.value >= 0 else f"({s})" if parent_prec >= 6 else s
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, TExp):
        return f"E({term_text(t.arg)})"
    if isinstance(t, TNeg):
        inner = term_text(t.arg, 6)
        out = f"-{inner}"
        return f"({out})" if parent_prec >= 5 else out
    if isinstance(t, TAdd):
        out = f"{term_text(t.left, 4)} + {term_text(t.right, 4)}"
        return f"({out})" if parent_prec > 4 else out
    if isinstance(t, TSub):
        out = f"{term_text(t.left, 4)} - {term_text(t.right, 5)}"
        return f"({out})" if parent_prec > 4 else out
    if isinstance(t, TMul):
        out = f"{term_text(t.left, 5)} * {term_text(t.right, 5)}"
        return f"({out})" if parent_prec > 5 else out
    if isinstance(t, TPow):
        return f"{term_text(t.base, 7)}^{t.exponent}"
    raise TypeError(f"not a term: {t!r}")


def formula_text(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"{term_text(f.lhs)} {f.op} {term_text(f.rhs)}"
    if isinstance(f, And):
        parts = [f"({formula_text(x)})" if isinstance(x, Or) else formula_text(x)
                 for x in f.items]
        return " & ".join(parts)
    parts = [formula_text(x) for x in f.items]
    return " | ".join(parts)


# -- variables ----------------------------------------------------------------------


def term_variables(t: Term, out: set[str]) -> None:
    if isinstance(t, TVar):
        out.add(t.name)
    elif isinstance(t, (TNeg, TExp)):
        term_variables(t.arg, out)
    elif isinstance(t, (TAdd, TSub, TMul)):
        term_variables(t.left, out)
        term_variables(t.right, out)
    elif isinstance(t, TPow):
        term_variables(t.base, out)


def variables(f: Formula) -> tuple[str, ...]:
    out: set[str] = set()
    for atom in iter_atoms(f):
        term_variables(atom.lhs, out)
        term_variables(atom.rhs, out)
    return tuple(sorted(out))


def iter_atoms(f: Formula) -> Iterable[Atom]:
    if isinstance(f, Atom):
        yield f
    else:
        for x in f.items:
            yield from iter_atoms(x)


def map_atoms(f: Formula, fn) -> Formula:
    if isinstance(f, Atom):
        return fn(f)
    if isinstance(f, And):
        return And(tuple(map_atoms(x, fn) for x in f.items))
    return Or(tuple(map_atoms(x, fn) for x in f.items))


# -- flatten ------------------------------------------------------------------------


def flatten(f: Formula) -> tuple[Formula, tuple[Atom, ...]]:
    """Extract nested and compound E-arguments into fresh variables.

    Returns the rewritten formula plus the defining atoms (u = inner term
    or u = E(v)); conjoining them preserves satisfiability under
    projection away from the fresh variables.
    """
    used = set(variables(f))
    fresh_defs: list[Atom] = []
    counter = [0]

    def fresh() -> str:
        while True:
            counter[0] += 1
            name = f"u{counter[0]}"
            if name not in used:
                used.add(name)
                return name

    def rewrite(t: Term) -> Term:
        if isinstance(t, (TConst, TVar)):
            return t
        if isinstance(t, TNeg):
            return TNeg(rewrite(t.arg))
        if isinstance(t, TAdd):
            return TAdd(rewrite(t.left), rewrite(t.right))
        if isinstance(t, TSub):
            return TSub(rewrite(t.left), rewrite(t.right))
        if isinstance(t, TMul):
            return TMul(rewrite(t.left), rewrite(t.right))
        if isinstance(t, TPow):
            return TPow(rewrite(t.base), t.exponent)
        assert isinstance(t, TExp)
        arg = rewrite(t.arg)
        if isinstance(arg, TVar):
            return TExp(arg)
        name = fresh()
        fresh_defs.append(Atom(TVar(name), "=", arg))
        return TExp(TVar(name))

    out = map_atoms(f, lambda a: Atom(rewrite(a.lhs), a.op, rewrite(a.rhs)))
    return out, tuple(fresh_defs)


def conjoin_definitions(f: Formula, defs: Sequence[Atom]) -> Formula:
    if not defs:
        return f
    return _mk_and(f, And(tuple(defs))) if len(defs) > 1 else _mk_and(f, defs[0])


# -- complexity normalization ----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Disjunct:
    """One branch of the E-argument case split.

    Variables in `inside` are guarded into (-1,1) and reindexed to the
    first ell coordinates; variables in `outside` are guarded into the
    closed complement, and every E applied to them has been replaced by 0
    in the matrix.
    """

    var_order: tuple[str, ...]
    ell: int
    inside: frozenset[str]
    outside: frozenset[str]
    matrix: Formula

    def guard_text(self) -> str:
        parts = [f"{v} in (-1,1)" for v in sorted(self.inside)]
        parts += [f"{v} notin (-1,1)" for v in sorted(self.outside)]
        return " & ".join(parts) if parts else "true"


def texp_argument_variables(f: Formula) -> tuple[str, ...]:
    out: set[str] = set()

    def walk(t: Term) -> None:
        if isinstance(t, TExp):
            if not isinstance(t.arg, TVar):
                raise ValueError("formula is not flat: E applied to a non-variable")
            out.add(t.arg.name)
        elif isinstance(t, (TNeg,)):
            walk(t.arg)
        elif isinstance(t, (TAdd, TSub, TMul)):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, TPow):
            walk(t.base)

    for atom in iter_atoms(f):
        walk(atom.lhs)
        walk(atom.rhs)
    return tuple(sorted(out))


def _subst_texp_zero(t: Term, outside: frozenset[str]) -> Term:
    if isinstance(t, (TConst, TVar)):
        return t
    if isinstance(t, TNeg):
        return TNeg(_subst_texp_zero(t.arg, outside))
    if isinstance(t, TAdd):
        return TAdd(_subst_texp_zero(t.left, outside), _subst_texp_zero(t.right, outside))
    if isinstance(t, TSub):
        return TSub(_subst_texp_zero(t.left, outside), _subst_texp_zero(t.right, outside))
    if isinstance(t, TMul):
        return TMul(_subst_texp_zero(t.left, outside), _subst_texp_zero(t.right, outside))
    if isinstance(t, TPow):
        return TPow(_subst_texp_zero(t.base, outside), t.exponent)
    assert isinstance(t, TExp)
    if isinstance(t.arg, TVar) and t.arg.name in outside:
        return TConst(Fraction(0))
    return t


def normalize_complexity(f: Formula) -> list[Disjunct]:
    """Case-split each E-argument variable on membership in (-1,1).

    The union of the disjunct solution sets (each over its guard region)
    equals the solution set of the input; guard regions are pairwise
    disjoint and cover the space.
    """
    targs = texp_argument_variables(f)
    all_vars = variables(f)
    disjuncts = []
    for mask in range(1 << len(targs)):
        outside = frozenset(v for i, v in enumerate(targs) if mask >> i & 1)
        inside = frozenset(targs) - outside
        matrix = map_atoms(f, lambda a: Atom(_subst_texp_zero(a.lhs, outside),
                                             a.op,
                                             _subst_texp_zero(a.rhs, outside)))
        order = tuple(sorted(inside)) + tuple(v for v in all_vars if v not in inside)
        disjuncts.append(Disjunct(order, len(inside), inside, outside, matrix))
    return disjuncts


# -- conversion to equation systems ------------------------------------------------------


@dataclass(frozen=True, slots=True)
class ExistentialSystem:
    """Equations whose solutions project onto the disjunct's solutions."""

    shape: Shape
    equations: tuple[ExpPolynomial, ...]
    witness_map: tuple[tuple[str, int], ...]
    trivially_false: bool = False

    def coordinate_of(self, var: str) -> int:
        for name, idx in self.witness_map:
            if name == var:
                return idx
        raise KeyError(var)


def term_to_polynomial(t: Term, shape: Shape,
                       var_index: dict[str, int]) -> ExpPolynomial:
    """Convert a flat term to a canonical polynomial; E must be applied to
    a variable whose index lies in the exponentiated block."""
    if isinstance(t, TConst):
        return ExpPolynomial.constant(shape, t.value)
    if isinstance(t, TVar):
        if t.name not in var_index:
            raise ValueError(f"unknown identifier {t.name!r}")
        return ExpPolynomial.x_var(shape, var_index[t.name] + 1)
    if isinstance(t, TNeg):
        return -term_to_polynomial(t.arg, shape, var_index)
    if isinstance(t, TAdd):
        return term_to_polynomial(t.left, shape, var_index) + \
            term_to_polynomial(t.right, shape, var_index)
    if isinstance(t, TSub):
        return term_to_polynomial(t.left, shape, var_index) - \
            term_to_polynomial(t.right, shape, var_index)
    if isinstance(t, TMul):
        return term_to_polynomial(t.left, shape, var_index) * \
            term_to_polynomial(t.right, shape, var_index)
    if isinstance(t, TPow):
        if t.exponent < 0:
            raise ValueError("negative powers are not polynomial")
        return term_to_polynomial(t.base, shape, var_index).pow(t.exponent)
    assert isinstance(t, TExp)
    if not isinstance(t.arg, TVar):
        raise ValueError("E applied to a non-variable; flatten first")
    if t.arg.name not in var_index:
        raise ValueError(f"unknown identifier {t.arg.name!r}")
    return ExpPolynomial.texp_var(shape, var_index[t.arg.name] + 1)


def conjunction_atoms(f: Formula) -> list[Atom]:
    """The atom list of a pure conjunction; raises on any disjunction."""
    if isinstance(f, Atom):
        return [f]
    if isinstance(f, Or):
        raise ValueError("disjunct matrix contains a disjunction; "
                         "expand to conjunctive branches first")
    out: list[Atom] = []
    for x in f.items:
        out.extend(conjunction_atoms(x))
    return out


def atoms_to_equations(d: Disjunct) -> ExistentialSystem:
    """Conjunction of atoms -> equations with fresh witnesses.

    F > 0 becomes F*y^2 - 1 = 0, F != 0 becomes F*y - 1 = 0, F >= 0
    becomes F - y^2 = 0 (and <,<= by sign flip); equations pass through.
    A real point satisfies the disjunct iff it extends to a zero of the
    system inside the guarded domain.
    """
    atoms = conjunction_atoms(d.matrix)
    n0 = len(d.var_order)
    var_index = {v: i for i, v in enumerate(d.var_order)}
    probe_shape = Shape(d.ell, n0)

    # first pass: decide constant atoms, count the fresh witnesses needed
    kept: list[tuple[Term, str]] = []
    trivially_false = False
    for a in atoms:
        diff = TSub(a.lhs, a.rhs)
        base = term_to_polynomial(diff, probe_shape, var_index)
        op = a.op
        if op in ("<", "<="):
            base, op = -base, {"<": ">", "<=": ">="}[op]
            diff = TSub(a.rhs, a.lhs)
        if not base.monomials or all(m.degree() == 0 for m in base.monomials):
            c = base.monomials[0].coeff if base.monomials else Fraction(0)
            ok = {"=": c == 0, "!=": c != 0, ">": c > 0, ">=": c >= 0}[op]
            if not ok:
                trivially_false = True
            continue
        kept.append((diff, op))

    n_fresh = sum(1 for _, op in kept if op != "=")
    shape = Shape(d.ell, n0 + n_fresh)

    equations = []
    next_fresh = n0
    for diff, op in kept:
        base = term_to_polynomial(diff, shape, var_index)
        if op == "=":
            equations.append(base)
            continue
        w = ExpPolynomial.x_var(shape, next_fresh + 1)
        next_fresh += 1
        one = ExpPolynomial.constant(shape, 1)
        if op == ">":
            equations.append(base * w * w - one)
        elif op == ">=":
            equations.append(base - w * w)
        else:  # !=
            equations.append(base * w - one)

    witness = tuple((v, var_index[v]) for v in d.var_order)
    return ExistentialSystem(shape, tuple(equations), witness, trivially_false)


# -- system files --------------------------------------------------------------------------


def parse_polynomial(text: str, shape: Shape) -> ExpPolynomial:
    """Parse one polynomial in the canonical grammar with variables
    x1..xn and E(xi) for i <= ell."""
    term = parse_term(text)
    var_index = {f"x{i + 1}": i for i in range(shape.n)}
    return term_to_polynomial(term, shape, var_index)


def parse_system_text(text: str) -> KhovanskiiSystem:
    """Parse the system file format: a `shape: ell n` header, then one
    polynomial per line."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("shape:"):
        raise ValueError("system text must start with a 'shape: ell n' header")
    parts = lines[0][len("shape:"):].split()
    if len(parts) != 2:
        raise ValueError("malformed shape header")
    shape = Shape(int(parts[0]), int(parts[1]))
    equations = tuple(parse_polynomial(ln, shape) for ln in lines[1:])
    return KhovanskiiSystem(shape, equations)
