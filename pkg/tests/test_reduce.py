"""System rewrites: dependence elimination, augmentation, witness slicing."""

from fractions import Fraction

import pytest

from kkit.dyadic import Dyadic, Interval
from kkit.enclose import Box, Shape
from kkit.algebra import (DependenceRelation, ExpPolynomial, KhovanskiiSystem,
                          evaluate, polynomial_text)
from kkit.certify import Budget, Certificate, certify_regular_zero
from kkit.reduce import (GenExpPolynomial, augmented_certificate,
                         eliminate_dependence, gen_evaluate,
                         gen_system_evaluators, inverse_image, reduced_to_json,
                         regularize_augment, to_khovanskii, witness_slice)
from kkit.search import SearchConfig, solve_square

import frozen


def xv(sh, i):
    return ExpPolynomial.x_var(sh, i)


def yv(sh, i):
    return ExpPolynomial.texp_var(sh, i)


def const(sh, c):
    return ExpPolynomial.constant(sh, c)


def fbox(sh, *pairs):
    return Box.from_fractions(sh, [(Fraction(a), Fraction(b)) for a, b in pairs], 128)


def worked_example():
    """(2 x2 - x1, texp(x1) - 2) as a (2,2) system with zero (ln2, ln2/2)."""
    sh = Shape(2, 2)
    sys = KhovanskiiSystem(sh, (xv(sh, 2).scale(2) - xv(sh, 1),
                                yv(sh, 1) - const(sh, 2)))
    cert = certify_regular_zero(
        sys, fbox(sh, (Fraction(6, 10), Fraction(8, 10)),
                  (Fraction(3, 10), Fraction(4, 10))))
    assert isinstance(cert, Certificate)
    return sys, cert


class TestEliminateDependence:
    def test_worked_example(self):
        sys, cert = worked_example()
        rel = DependenceRelation(2, (1,), Fraction(0))
        red = eliminate_dependence(sys, rel, cert)
        assert red.shape == Shape(1, 1)
        assert red.drop_index == 0
        z = red.certified_box.coords[0]
        half_ln2 = frozen.LN2_F / 2
        assert z.lo.to_fraction() <= half_ln2 <= z.hi.to_fraction()
        assert z.width().to_fraction() < Fraction(1, 10 ** 10)
        # inverse substitution maps the transformed box into the original
        img = inverse_image(red.certified_box, rel, sys.shape, red.precision)
        assert cert.box.contains_box(img)

    def test_constant_substitution(self):
        # d=1, empty k, g rational: x_ell pinned to g
        sh = Shape(1, 2)
        sys = KhovanskiiSystem(sh, (yv(sh, 1) - xv(sh, 2),
                                    xv(sh, 1) - const(sh, Fraction(1, 2))))
        cert = certify_regular_zero(
            sys, fbox(sh, (Fraction(4, 10), Fraction(6, 10)),
                      (Fraction(15, 10), Fraction(17, 10))))
        assert isinstance(cert, Certificate)
        rel = DependenceRelation(1, (), Fraction(1, 2))
        red = eliminate_dependence(sys, rel, cert)
        assert red.shape == Shape(0, 1)
        z = red.certified_box.coords[0]
        assert z.lo.to_fraction() <= frozen.E_HALF_F <= z.hi.to_fraction()

    def test_inconsistent_relation_rejected(self):
        sys, cert = worked_example()
        # claims 2 a1 = a2, but the certified zero has a2 = a1/2
        rel = DependenceRelation(2, (4,), Fraction(0))
        with pytest.raises(ValueError, match="inconsistent"):
            eliminate_dependence(sys, rel, cert)

    def test_serialization_mentions_lambda(self):
        sys, cert = worked_example()
        red = eliminate_dependence(sys, DependenceRelation(2, (1,), Fraction(0)),
                                   cert)
        text = reduced_to_json(red)
        assert '"lambda"' in text and '"drop_index": 0' in text

    def test_plain_form_when_integral(self):
        sys, cert = worked_example()
        red = eliminate_dependence(sys, DependenceRelation(2, (1,), Fraction(0)),
                                   cert)
        plain = to_khovanskii(red.system, red.shape)
        assert plain is not None
        assert polynomial_text(plain.equations[0]) == "E(x1)^2 - 2"


class TestGenPolynomials:
    def test_eval_matches_plain(self):
        sh = Shape(1, 2)
        p = yv(sh, 1) * xv(sh, 2) - const(sh, 3)
        from kkit.reduce import from_exp_polynomial
        g = from_exp_polynomial(p)
        box = Box(sh, (Interval.point(Dyadic(1, -2)), Interval.point(Dyadic(3, -1))))
        a = evaluate(p, box, 96)
        b = gen_evaluate(g, box, 96)
        assert a.intersect(b) is not None
        assert b.width().to_fraction() < Fraction(1, 10 ** 20)
        # interval arguments stay rigorous supersets of point values
        wide = fbox(sh, (Fraction(1, 4), Fraction(1, 2)), (1, 2))
        bw = gen_evaluate(g, wide, 96)
        assert bw.contains_interval(b)

    def test_partial_exponential_rule(self):
        sh = Shape(1, 1)
        from kkit.reduce import from_exp_polynomial
        g = from_exp_polynomial(yv(sh, 1))
        d = g.partial(1)
        assert d == g          # d/dx Exp(x) = Exp(x)


class TestRegularizeAugment:
    def test_texp_minus_two(self):
        sh = Shape(1, 1)
        sys = KhovanskiiSystem(sh, (yv(sh, 1) - const(sh, 2),))
        aug = regularize_augment(sys, 1)
        assert aug.shape == Shape(1, 4)
        texts = [polynomial_text(eq) for eq in aug.equations]
        assert texts == ["x4 - 2", "x2^2 * x4 - 1", "x3 - 1", "x4 - E(x1)"]

    def test_certified_extension(self):
        sh = Shape(1, 1)
        sys = KhovanskiiSystem(sh, (yv(sh, 1) - const(sh, 2),))
        cert = certify_regular_zero(sys, fbox(sh, (Fraction(6, 10),
                                                   Fraction(8, 10))))
        aug, acert = augmented_certificate(cert)
        assert isinstance(acert, Certificate)
        x2 = acert.box.coords[1]
        assert x2.lo.to_fraction() <= frozen.INV_SQRT2_F <= x2.hi.to_fraction()
        assert x2.width().to_fraction() < Fraction(1, 10 ** 10)
        # projection of the extension lands in the original box
        assert cert.box.coords[0].contains_interval(acert.box.coords[0])

    def test_pure_polynomial_classical(self):
        sh = Shape(0, 1)
        sys = KhovanskiiSystem(sh, (xv(sh, 1).pow(2) - const(sh, 2),))
        aug = regularize_augment(sys, 1)
        assert aug.shape == Shape(0, 3)            # no de-nesting equation
        texts = [polynomial_text(eq) for eq in aug.equations]
        assert texts == ["x1^2 - 2", "2 * x1 * x2^2 - 1", "x3 - 1"]

    def test_denesting_square(self):
        sh = Shape(1, 1)
        sys = KhovanskiiSystem(sh, (yv(sh, 1) * yv(sh, 1) - const(sh, 4),))
        aug = regularize_augment(sys, 1)
        texts = [polynomial_text(eq) for eq in aug.equations]
        assert texts[0] == "x4^2 - 4"
        assert texts[-1] == "x4 - E(x1)"
        # re-certify the whole augmentation around ln 2
        cert = certify_regular_zero(sys, fbox(sh, (Fraction(6, 10),
                                                   Fraction(8, 10))))
        assert isinstance(cert, Certificate)
        aug2, acert = augmented_certificate(cert)
        assert isinstance(acert, Certificate)
        assert acert.box.coords[3].lo.to_fraction() <= 2 \
            <= acert.box.coords[3].hi.to_fraction()

    def test_negative_det_flipped(self):
        sh = Shape(0, 1)
        sys = KhovanskiiSystem(sh, (const(sh, 2) - xv(sh, 1).pow(2),))
        cert = certify_regular_zero(sys, fbox(sh, (1, 2)))
        assert isinstance(cert, Certificate)
        aug, acert = augmented_certificate(cert)
        assert isinstance(acert, Certificate)


class TestWitnessSlice:
    def test_circle_example(self):
        sh = Shape(0, 2)
        circle = xv(sh, 1).pow(2) + xv(sh, 2).pow(2) - const(sh, 1)
        sliced = witness_slice([circle], [Fraction(2), Fraction(0)])
        assert len(sliced.equations) == 2
        assert polynomial_text(sliced.equations[1]) == "4 * x2"
        report = solve_square(sliced, fbox(sh, (-2, 2), (-2, 2)), SearchConfig())
        assert report.status == "SAT"
        mids = sorted(round(float(c.box.coords[0].midpoint()), 6)
                      for c in report.certificates)
        assert mids == [-1.0, 1.0]
        # slice zeros satisfy the original equation: after refining the
        # box below the rounding scale, the residual width at 64 bits is
        # within 2^-(64-8)
        from kkit.certify import refine_certificate
        for cert in report.certificates:
            tight = refine_certificate(
                cert, lambda b: b.max_width().to_fraction() < Fraction(1, 2 ** 72))
            assert isinstance(tight, Certificate)
            resid = evaluate(circle, tight.box, 64)
            assert resid.contains_zero()
            assert resid.width().to_fraction() < Fraction(1, 2 ** (64 - 8))

    def test_square_input_rejected(self):
        sh = Shape(0, 2)
        with pytest.raises(ValueError):
            witness_slice([xv(sh, 1), xv(sh, 2)], [Fraction(0), Fraction(0)])

    def test_texp_graph_example(self):
        sh = Shape(1, 2)
        f = yv(sh, 1) - xv(sh, 2)
        sliced = witness_slice([f], [Fraction(0), Fraction(0)])
        assert polynomial_text(sliced.equations[1]) == "x2 * E(x1) + x1"
        report = solve_square(sliced, fbox(sh, (-1, 1), (-3, 3)), SearchConfig())
        assert report.status == "SAT"
        assert len(report.certificates) == 1
        x1 = report.certificates[0].box.coords[0]
        assert x1.lo.to_fraction() <= frozen.NEG2EXP_F <= x1.hi.to_fraction()
