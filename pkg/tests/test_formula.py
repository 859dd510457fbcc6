"""Parsing, flattening, the complexity case split, and equation devices."""

import random
from fractions import Fraction

import pytest

from kkit.enclose import Shape
from kkit.algebra import ExpPolynomial, polynomial_text
from kkit import formula as F
from kkit.formula import (Atom, And, Or, ParseError, TAdd, TConst, TExp, TSub,
                          TVar, atoms_to_equations, conjoin_definitions,
                          flatten, formula_text, iter_atoms,
                          normalize_complexity, parse, parse_polynomial,
                          parse_system_text, term_to_polynomial, variables)

import oracles as O


class TestParse:
    def test_simple_atom(self):
        f = parse("E(x) = 2")
        assert isinstance(f, Atom)
        assert f.op == "="
        assert f.lhs == TExp(TVar("x"))
        assert f.rhs == TConst(Fraction(2))

    def test_paper_conjunction(self):
        f = parse("x + y > 2 & E(x) = z")
        assert isinstance(f, And) and len(f.items) == 2
        assert f.items[0] == Atom(TAdd(TVar("x"), TVar("y")), ">", TConst(Fraction(2)))
        assert f.items[1] == Atom(TExp(TVar("x")), "=", TVar("z"))

    def test_nested_texp_accepted(self):
        f = parse("E(E(x)) = 1/2")
        assert f == Atom(TExp(TExp(TVar("x"))), "=", TConst(Fraction(1, 2)))

    def test_rationals_powers_connectives(self):
        f = parse("x^2 - 3/4 * y <= 1 | !(z != 0)")
        assert isinstance(f, Or)
        assert f.items[1] == Atom(TVar("z"), "=", TConst(Fraction(0)))

    def test_not_pushes_to_atoms(self):
        f = parse("!(x < 1 & y = 0)")
        assert isinstance(f, Or)
        assert f.items[0].op == ">="
        assert f.items[1].op == "!="

    def test_formula_parens(self):
        f = parse("(x > 0 | y > 0) & z = 1")
        assert isinstance(f, And)
        assert isinstance(f.items[0], Or)

    def test_syntax_error_with_position(self):
        with pytest.raises(ParseError) as err:
            parse("x + = 2")
        assert err.value.position >= 0

    def test_unknown_character(self):
        with pytest.raises(ParseError):
            parse("x @ 2")

    def test_roundtrip_through_printing(self):
        samples = [
            "E(x) = 2",
            "x + y > 2 & E(x) = z",
            "E(E(x)) = 1/2",
            "x^2 - 3/4 * y <= 1 | !(z != 0)",
            "(x > 0 | y > 0) & z = 1",
            "-x * (y + 1) >= 5",
            "x - (y - z) = 0",
        ]
        for text in samples:
            f = parse(text)
            assert parse(formula_text(f)) == f

    def test_variable_order_canonical(self):
        assert variables(parse("b + a > 0 & c = a")) == ("a", "b", "c")


class TestFlatten:
    def test_nested(self):
        f = parse("E(E(x)) = w")
        flat, defs = flatten(f)
        assert len(defs) == 1
        u = defs[0].lhs
        assert defs[0] == Atom(u, "=", TExp(TVar("x")))
        assert flat == Atom(TExp(u), "=", TVar("w"))

    def test_compound_argument(self):
        f = parse("E(x + y) = z")
        flat, defs = flatten(f)
        assert len(defs) == 1
        assert defs[0].rhs == TAdd(TVar("x"), TVar("y"))
        assert isinstance(flat.lhs, TExp) and isinstance(flat.lhs.arg, TVar)

    def test_already_flat_unchanged(self):
        f = parse("E(x) = 2 & y > 0")
        flat, defs = flatten(f)
        assert defs == ()
        assert flat == f

    def test_fresh_names_avoid_collision(self):
        f = parse("E(u1 + u2) = u3")
        flat, defs = flatten(f)
        name = defs[0].lhs.name
        assert name not in ("u1", "u2", "u3")

    def test_projection_count_preserved(self):
        # satisfying assignments project bijectively: check on a corpus of
        # rational points that flat+defs is satisfiable iff the original is
        rng = random.Random(23)
        f = parse("E(x + y) = z & x - y < 1")
        flat, defs = flatten(f)
        full = conjoin_definitions(flat, defs)
        for _ in range(25):
            pt = {v: Fraction(rng.randint(-700, 700), 1000) for v in ("x", "y", "z")}
            truth = O.eval_formula_at(f, pt)
            u = pt["x"] + pt["y"]
            extended = dict(pt)
            extended[defs[0].lhs.name] = u
            assert O.eval_formula_at(full, extended) == truth


class TestNormalizeComplexity:
    def test_paper_worked_split(self):
        f = parse("x + y > 2 & E(x) = z")
        ds = normalize_complexity(f)
        assert len(ds) == 2
        inside, outside = ds
        assert inside.inside == frozenset({"x"}) and inside.outside == frozenset()
        assert inside.ell == 1
        assert inside.var_order[0] == "x"
        assert inside.matrix == f
        assert outside.outside == frozenset({"x"}) and outside.ell == 0
        # texp(x) replaced by 0 in the outside branch
        assert outside.matrix == And((
            Atom(TAdd(TVar("x"), TVar("y")), ">", TConst(Fraction(2))),
            Atom(TConst(Fraction(0)), "=", TVar("z"))))

    def test_no_texp_single_disjunct(self):
        ds = normalize_complexity(parse("x + y > 2"))
        assert len(ds) == 1
        assert ds[0].ell == 0

    def test_two_arguments_four_disjuncts(self):
        f = parse("E(x) = 1 & E(y) = 1")
        ds = normalize_complexity(f)
        assert len(ds) == 4
        patterns = {(tuple(sorted(d.inside)), tuple(sorted(d.outside))) for d in ds}
        assert patterns == {(("x", "y"), ()), (("x",), ("y",)),
                            (("y",), ("x",)), ((), ("x", "y"))}

    def test_guards_partition_pointwise(self):
        rng = random.Random(31)
        f = parse("E(x) * E(y) = z & x + y < 1")
        ds = normalize_complexity(f)
        for _ in range(50):
            pt = {v: Fraction(rng.randint(-3000, 3000), 1000)
                  for v in ("x", "y", "z")}
            matching = [d for d in ds if _in_guard(d, pt)]
            assert len(matching) == 1

    def test_semantics_pointwise(self):
        rng = random.Random(37)
        f = parse("E(x) * E(y) = z & x + y < 1")
        ds = normalize_complexity(f)
        for _ in range(50):
            pt = {v: _safe_coord(rng) for v in ("x", "y")}
            pt["z"] = Fraction(rng.randint(-3000, 3000), 1000)
            truth = O.eval_formula_at(f, pt)
            d = next(d for d in ds if _in_guard(d, pt))
            assert O.eval_formula_at(d.matrix, pt) == truth


def _in_guard(d, pt) -> bool:
    for v in d.inside:
        if not (-1 < pt[v] < 1):
            return False
    for v in d.outside:
        if -1 < pt[v] < 1:
            return False
    return True


def _safe_coord(rng) -> Fraction:
    # rational, at distance >= 1/16 from the +-1 boundary
    while True:
        v = Fraction(rng.randint(-3000, 3000), 1000)
        if abs(abs(v) - 1) >= Fraction(1, 16):
            return v


class TestAtomsToEquations:
    def mk(self, text: str):
        ds = normalize_complexity(parse(text))
        return atoms_to_equations(ds[0])

    def test_strict_positive_device(self):
        sys = self.mk("x > 0")
        assert len(sys.equations) == 1
        sh = sys.shape
        x = ExpPolynomial.x_var(sh, 1)
        y = ExpPolynomial.x_var(sh, 2)
        assert sys.equations[0] == x * y * y - ExpPolynomial.constant(sh, 1)

    def test_equation_passthrough(self):
        sys = self.mk("x = 0")
        sh = sys.shape
        assert sys.shape.n == 1
        assert sys.equations[0] == ExpPolynomial.x_var(sh, 1)

    def test_nonneg_square_witness(self):
        sys = self.mk("x >= 0")
        sh = sys.shape
        x = ExpPolynomial.x_var(sh, 1)
        y = ExpPolynomial.x_var(sh, 2)
        assert sys.equations[0] == x - y * y

    def test_neq_device(self):
        sys = self.mk("x != 0")
        sh = sys.shape
        x = ExpPolynomial.x_var(sh, 1)
        y = ExpPolynomial.x_var(sh, 2)
        assert sys.equations[0] == x * y - ExpPolynomial.constant(sh, 1)

    def test_less_than_by_sign_flip(self):
        sys = self.mk("x < 0")
        sh = sys.shape
        x = ExpPolynomial.x_var(sh, 1)
        y = ExpPolynomial.x_var(sh, 2)
        assert sys.equations[0] == (-x) * y * y - ExpPolynomial.constant(sh, 1)

    def test_texp_reindexed_first(self):
        ds = normalize_complexity(parse("E(b) = a"))
        inside = ds[0]
        assert inside.var_order == ("b", "a")
        sys = atoms_to_equations(inside)
        sh = sys.shape
        assert sh.ell == 1
        expect = ExpPolynomial.texp_var(sh, 1) - ExpPolynomial.x_var(sh, 2)
        assert sys.equations[0] == expect

    def test_constant_false(self):
        ds = normalize_complexity(parse("E(x) = 3"))
        outside = ds[1]
        sys = atoms_to_equations(outside)
        assert sys.trivially_false

    def test_disjunctive_matrix_rejected(self):
        ds = normalize_complexity(parse("x > 0 | x < 0"))
        with pytest.raises(ValueError):
            atoms_to_equations(ds[0])


class TestSystemFiles:
    def test_polynomial_roundtrip(self):
        sh = Shape(1, 2)
        p = parse_polynomial("E(x1)^2 * x2 - 1/3", sh)
        assert polynomial_text(p) == "x2 * E(x1)^2 - 1/3"
        assert parse_polynomial(polynomial_text(p), sh) == p

    def test_system_text_roundtrip(self):
        text = "shape: 1 2\nE(x1) - 2\nx1 * x2 - 1"
        sys = parse_system_text(text)
        assert sys.shape == Shape(1, 2)
        assert len(sys.equations) == 2

    def test_texp_outside_block_rejected(self):
        with pytest.raises(ValueError):
            parse_system_text("shape: 1 2\nE(x2) - 1")

    def test_header_required(self):
        with pytest.raises(ValueError):
            parse_system_text("E(x1) - 2")
