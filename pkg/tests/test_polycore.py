from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from curvlab.polycore import (
    DomainError,
    GaussianRational,
    Polynomial,
    evaluate,
    evaluate_exact,
    fock_inner,
    fock_weight,
    format_coeff,
    gr,
    monomials,
    multinomial,
    norm_sq,
    parse_coeff,
    q_poly,
    szego_tail_norm_sq,
    szego_truncate,
)


def var(d, k):
    return Polynomial.variable(d, k)


class TestQPoly:
    def test_base_cases(self):
        assert q_poly(0, 17) == 1
        assert q_poly(2, 4) == 15
        assert q_poly(3, 2) == 10

    def test_recursion(self):
        for k in range(1, 8):
            for x in range(-30, 60):
                assert q_poly(k, x) - q_poly(k, x - 1) == q_poly(k - 1, x)

    def test_binomial_values(self):
        import math

        for k in range(6):
            for n in range(12):
                assert q_poly(k, n) == math.comb(n + k, k)
                assert q_poly(k, n).denominator == 1

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            q_poly(-1, 3)


class TestPolynomialBasics:
    def test_zero_degree_is_none(self):
        assert Polynomial.zero(3).degree() is None
        assert Polynomial.constant(3, gr(5)).degree() == 0

    def test_no_zero_terms_stored(self):
        p = var(2, 0) - var(2, 0)
        assert p.is_zero() and p.terms == {}

    def test_domain_mixing_raises(self):
        exact = var(2, 0)
        floaty = exact.to_float()
        with pytest.raises(DomainError):
            exact + floaty
        with pytest.raises(DomainError):
            fock_inner(exact, floaty)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            var(2, 0) + var(3, 0)

    def test_monomials_deterministic_and_complete(self):
        ms = monomials(3, 4)
        assert len(ms) == int(q_poly(2, 4))
        assert ms == monomials(3, 4)
        assert all(sum(m) == 4 for m in ms)


class TestFockInner:
    def test_orthogonality(self):
        assert fock_inner(var(2, 0), var(2, 1)).is_zero()

    def test_weights(self):
        z1, z2 = var(2, 0), var(2, 1)
        assert fock_inner(z1 * z2, z1 * z2) == gr("1/2")
        assert fock_inner(z1 * z1, z1 * z1) == gr(1)

    def test_conjugate_symmetry(self):
        rng = random.Random(0)
        for _ in range(25):
            f = _random_poly(rng, d=2, deg=3)
            g = _random_poly(rng, d=2, deg=3)
            assert fock_inner(f, g) == fock_inner(g, f).conjugate()

    def test_gram_positive_definite(self):
        rng = random.Random(1)
        d = 2
        polys = [_random_poly(rng, d, 3) for _ in range(6)]
        # keep a linearly independent subset by exact Gram rank
        gram = np.array(
            [[complex(fock_inner(p, q)) for q in polys] for p in polys]
        )
        ev = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
        assert ev.min() > -1e-12  # PSD always; strict if independent


def _random_poly(rng: random.Random, d: int, deg: int) -> Polynomial:
    terms = {}
    for n in range(deg + 1):
        for alpha in monomials(d, n):
            if rng.random() < 0.4:
                terms[alpha] = gr(rng.randint(-4, 4), rng.randint(-2, 2))
    p = Polynomial(d, terms)
    if p.is_zero():
        return Polynomial.constant(d, gr(1))
    return p


def _random_point(rng: random.Random, d: int):
    while True:
        w = tuple(
            gr(Fraction(rng.randint(-3, 3), 8), Fraction(rng.randint(-3, 3), 8))
            for _ in range(d)
        )
        if float(sum(c.abs_sq() for c in w)) < 1.0:
            return w


class TestSzego:
    def test_w_zero_gives_constant_one(self):
        for D in (0, 2, 5):
            t = szego_truncate((gr(0), gr(0)), D)
            assert t == Polynomial.constant(2, gr(1))

    def test_point_evaluation_examples(self):
        t = szego_truncate((gr("1/2"), gr(0)), 3)
        assert fock_inner(var(2, 0), t) == gr("1/2")

    def test_tail_norm(self):
        w = (gr("1/2"), gr("1/2"))
        assert szego_tail_norm_sq(w, 3) == Fraction(1, 8)
        # cross-check against the explicit truncation norm:
        # ||u_w||^2 - ||trunc||^2 = 1/(1-|w|^2) - sum_{n<=D} |w|^(2n)
        t = szego_truncate(w, 3)
        r2 = Fraction(1, 2)
        full = 1 / (1 - r2)
        assert full - norm_sq(t) == Fraction(1, 8)

    def test_rejects_outside_ball(self):
        with pytest.raises(ValueError):
            szego_truncate((gr(1), gr(0)), 3)

    def test_reproducing_property_exact(self):
        rng = random.Random(42)
        for _ in range(60):
            d = rng.randint(1, 4)
            f = _random_poly(rng, d, rng.randint(0, 4))
            w = _random_point(rng, d)
            t = szego_truncate(w, f.degree() or 0)
            assert fock_inner(f, t) == evaluate_exact(f, w)

    def test_reproducing_property_float(self):
        rng = random.Random(3)
        np_rng = np.random.default_rng(3)
        for _ in range(40):
            d = rng.randint(1, 3)
            f = _random_poly(rng, d, rng.randint(0, 4)).to_float()
            w = np_rng.standard_normal(d) + 1j * np_rng.standard_normal(d)
            w *= 0.8 / max(1.0, np.linalg.norm(w))
            t = szego_truncate(tuple(w), f.degree() or 0)
            lhs = fock_inner(f, t)
            rhs = evaluate(f, tuple(w))
            assert abs(lhs - rhs) < 1e-12


class TestEvaluate:
    def test_examples(self):
        f = var(2, 0) * var(2, 0) + var(2, 1).scale(gr(2))
        assert abs(evaluate(f, (1j, 0.5))) < 1e-15
        assert evaluate(Polynomial.constant(2, gr(1)), (3.0, -4.0)) == 1
        g = var(2, 0) * var(2, 1) * var(2, 1)
        assert evaluate(g, (1.0, 1.0)) == 1

    def test_exact_requires_exact(self):
        with pytest.raises(DomainError):
            evaluate_exact(var(2, 0).to_float(), (gr(0), gr(0)))


class TestCoeffStrings:
    @pytest.mark.parametrize(
        "text",
        ["1/2", "-2/3", "7", "1/2+1/3i", "-1/2-5i", "3i", "-i"],
    )
    def test_round_trip(self, text):
        c = parse_coeff(text)
        assert isinstance(c, GaussianRational)
        assert parse_coeff(format_coeff(c)) == c

    def test_decimal_forces_float(self):
        assert parse_coeff("0.25") == 0.25
        assert parse_coeff("1e-3") == 1e-3

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            parse_coeff("1/2+1/3i+4")


def test_weights_vs_multinomial():
    for alpha in monomials(3, 5):
        assert fock_weight(alpha) * multinomial(alpha) == 1
