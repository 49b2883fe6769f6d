from __future__ import annotations

from fractions import Fraction

import pytest

from curvlab.hilbert import (
    FitMismatch,
    NotStabilized,
    RankSequence,
    c_invariant,
    cumulate,
    fit_hilbert_polynomial,
    generating_function,
)
from curvlab.polycore import q_poly


def per_degree(values, offset=0):
    return RankSequence(offset, tuple(values))


def q_seq(k, n_max, offset=0):
    return [int(q_poly(k, n)) for n in range(offset, n_max + 1)]


class TestCumulate:
    def test_free_d2(self):
        seq = per_degree(q_seq(1, 8))
        assert cumulate(seq).values == tuple(q_seq(2, 8))

    def test_zero(self):
        assert cumulate(per_degree([0] * 5)).values == (0,) * 5

    def test_veronese_partial_sums(self):
        vals = [int(q_poly(2, 2 * n)) for n in range(4)]
        assert cumulate(per_degree(vals)).values == (1, 7, 22, 50)

    def test_requires_per_degree(self):
        with pytest.raises(ValueError):
            cumulate(RankSequence(0, (1, 2), "cumulative"))


class TestFit:
    def test_free_module(self):
        prof = fit_hilbert_polynomial(RankSequence(0, tuple(q_seq(2, 9)), "cumulative"), 2)
        assert tuple(prof.c) == (0, 0, 1)
        assert prof.chi == 1 and prof.degree_invariant == 2 and prof.mu == 1

    def test_veronese(self):
        seq = cumulate(per_degree([int(q_poly(2, 2 * n)) for n in range(9)]))
        prof = fit_hilbert_polynomial(seq, 6)
        assert tuple(prof.c) == (0, 0, -3, 4, 0, 0, 0)
        assert prof.chi == 0 and prof.degree_invariant == 3 and prof.mu == 4

    def test_even_subspace(self):
        seq = cumulate(per_degree([2 * n + 1 for n in range(10)]))
        prof = fit_hilbert_polynomial(seq, 3)
        assert tuple(prof.c) == (0, -1, 2, 0)
        assert prof.chi == 0 and prof.degree_invariant == 2 and prof.mu == 2

    def test_transient_detection(self):
        # dims of A/(z1^3) in d=2: 1,2,3,3,3,...; partial sums are 3n from
        # n = 1 on, so the fit carries a single transient entry
        vals = [1, 2, 3, 3, 3, 3, 3, 3, 3]
        prof = fit_hilbert_polynomial(cumulate(per_degree(vals)), 2)
        assert prof.chi == 0
        assert prof.degree_invariant == 1 and prof.mu == 3
        assert prof.stabilized_at == 1 and prof.transient == (1,)

    def test_not_stabilized(self):
        vals = [1, 2, 3, 4, 4, 4]
        with pytest.raises(NotStabilized):
            fit_hilbert_polynomial(cumulate(per_degree(vals)), 2, window=6)

    def test_negative_offset(self):
        vals = [int(q_poly(1, n + 2)) for n in range(-2, 9)]
        prof = fit_hilbert_polynomial(cumulate(per_degree(vals, offset=-2)), 2)
        assert prof.chi == 1

    def test_integrality_enforced(self):
        # a sequence matching a non-integer polynomial trips the check
        vals = [Fraction(n * n, 2) for n in range(10)]
        with pytest.raises((FitMismatch, TypeError, ValueError)):
            fit_hilbert_polynomial(RankSequence(0, tuple(vals), "per-degree"), 2)

    def test_zero_module(self):
        prof = fit_hilbert_polynomial(RankSequence(0, (0,) * 8, "cumulative"), 2)
        assert prof.chi == 0 and prof.degree_invariant == "zero-module"
        assert prof.mu is None


class TestFiniteDifferenceIdentity:
    def test_difference_shifts_coefficients_down(self):
        # fitted cumulative coefficients (c_0..c_d) difference to (c_1..c_d)
        vals = [3 * int(q_poly(2, n)) - 2 * int(q_poly(1, n)) + 5 for n in range(12)]
        prof = fit_hilbert_polynomial(RankSequence(0, tuple(vals), "per-degree"), 3)
        diffs = [b - a for a, b in zip(vals, vals[1:])]
        prof_d = fit_hilbert_polynomial(RankSequence(1, tuple(diffs), "per-degree"), 3)
        assert tuple(prof_d.c)[:-1] == tuple(prof.c)[1:]


class TestStability:
    @pytest.mark.parametrize("drop", [1, 2, 3])
    def test_truncation_keeps_invariants(self, drop):
        vals = [int(q_poly(2, 2 * n)) for n in range(12)]
        base = fit_hilbert_polynomial(cumulate(per_degree(vals)), 6)
        trunc = fit_hilbert_polynomial(
            cumulate(per_degree(vals[drop:], offset=drop)), 6
        )
        assert trunc.chi == base.chi
        assert trunc.degree_invariant == base.degree_invariant
        assert trunc.mu == base.mu


class TestCInvariant:
    def test_polynomial_ring(self):
        seq = RankSequence(0, tuple(q_seq(2, 9)), "cumulative")
        assert c_invariant(seq, 2) == 1

    def test_principal_ideal(self):
        # I = (z1) in d=2, filtration I cap {deg <= n}: dims q_2(n-1)
        vals = [int(q_poly(2, n - 1)) for n in range(10)]
        assert c_invariant(RankSequence(0, tuple(vals), "cumulative"), 2) == 1

    def test_quotient_by_z1(self):
        vals = [n + 1 for n in range(10)]
        assert c_invariant(RankSequence(0, tuple(vals), "cumulative"), 2) == 0

    def test_additivity(self):
        # c(I) + c(A/I) = c(A) = 1 for I = (z1)
        ideal = [int(q_poly(2, n - 1)) for n in range(10)]
        quot = [n + 1 for n in range(10)]
        total = c_invariant(
            RankSequence(0, tuple(ideal), "cumulative"), 2
        ) + c_invariant(RankSequence(0, tuple(quot), "cumulative"), 2)
        assert total == 1


class TestGeneratingFunction:
    def test_free_module(self):
        seq = RankSequence(0, tuple(q_seq(2, 9)), "cumulative")
        prof = fit_hilbert_polynomial(seq, 2)
        gf = generating_function(prof, seq)
        assert str(gf) == "1/(1-t)^3"
        assert not any(gf.poly_part)

    def test_veronese(self):
        seq = cumulate(per_degree([int(q_poly(2, 2 * n)) for n in range(9)]))
        prof = fit_hilbert_polynomial(seq, 6)
        gf = generating_function(prof, seq)
        assert str(gf) == "-3/(1-t)^3 + 4/(1-t)^4"

    def test_zero_module(self):
        seq = RankSequence(0, (0,) * 8, "cumulative")
        prof = fit_hilbert_polynomial(seq, 2)
        gf = generating_function(prof, seq)
        assert str(gf) == "0" and not any(gf.pole_coeffs)

    def test_round_trip_with_transient(self):
        vals = [1, 2, 3, 3, 3, 3, 3, 3]
        seq = RankSequence(0, tuple(vals), "per-degree")
        prof = fit_hilbert_polynomial(seq, 2)
        gf = generating_function(prof, seq)
        assert [int(x) for x in gf.expand(len(vals))] == vals

    def test_round_trip_negative_offset(self):
        vals = [int(q_poly(1, n + 1)) for n in range(-1, 9)]
        seq = cumulate(per_degree(vals, offset=-1))
        prof = fit_hilbert_polynomial(seq, 2)
        gf = generating_function(prof, seq)
        assert tuple(gf.expand(len(vals))) == tuple(seq.values)


def test_chi_bound_against_rank():
    seq = RankSequence(0, tuple(q_seq(2, 9)), "cumulative")
    with pytest.raises(FitMismatch):
        fit_hilbert_polynomial(seq, 2, rank_bound=0)
