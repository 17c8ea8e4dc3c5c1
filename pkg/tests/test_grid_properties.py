"""Grid-wide and randomized properties of the exact engine and the numeric oracle."""

import random
from collections import defaultdict
from itertools import product
from math import prod

import mpmath as mp
import pytest
from sympy import Poly, QQ, Rational

from services.exponent_calculus import KernelForm, is_integer
from services.integral_reducer import (
    ReducedIntegrand,
    Term,
    apply_T,
    decide_algebraic,
    linear_forms,
    mu,
    primitive,
    reduce,
    verify_closed_form,
)
from services.jacobi_engine import isolate_roots, z
from services.numeric_oracle import NumericOracle, PrecisionContext
from services.obstruction_engine import Status, build_ve2_plan
from services.spectrum_classifier import classify_parameter, jordan_case, lambda_of

OBSTRUCTED = (Status.OBSTRUCTED_EXACT, Status.OBSTRUCTED_NUMERIC)
PHI_SHORTCUT = "Phi transcendental: no relation Phi + d_nu I_nu can be algebraic"


def _ve2_cells(k, window):
    span = range(-window, window + 1)
    for p_gamma, p_alpha in product(span, span):
        plan = build_ve2_plan(classify_parameter(k, p_gamma), classify_parameter(k, p_alpha))
        yield p_gamma, p_alpha, plan.phi_integrand


def _undecided_by_exponent(k, window):
    """Cells where Phi' has no integer exponent, so the verdict rests on the residual."""
    return [(pg, pa, g) for pg, pa, g in _ve2_cells(k, window) if not g.kernel.has_integer_exponent]


def _random_poly(rng, max_degree=4):
    coeffs = [rng.randint(-5, 5) for _ in range(rng.randint(0, max_degree) + 1)]
    if not any(coeffs):
        coeffs[0] = 1
    return Poly(coeffs, z, domain=QQ)


def _random_exponent(rng, lowest, allow_integer=True):
    while True:
        q = rng.choice((2, 3, 4, 5, 7))
        e = Rational(rng.randint(lowest * q + 1, 2 * q), q)
        if allow_integer or not is_integer(e):
            return e


def _random_kernel(rng, lowest, allow_integer=True):
    """Exponents above `lowest` with a non-integer sum."""
    while True:
        kernel = KernelForm(_random_exponent(rng, lowest, allow_integer), _random_exponent(rng, lowest, allow_integer))
        if not is_integer(kernel.exponent_sum):
            return kernel


def _random_denominator(rng, max_roots=2):
    """Monic product of distinct linear factors with roots in (0, 1)."""
    roots = rng.sample(range(1, 10), rng.randint(0, max_roots))
    return Poly(prod((z - Rational(r, 10) for r in roots), start=1), z, domain=QQ)


def _mp(q):
    q = Rational(q)
    return mp.mpf(q.p) / q.q


@pytest.mark.parametrize("window", [2, pytest.param(6, marks=pytest.mark.slow)])
@pytest.mark.parametrize("k", [3, 5, 7])
def test_mu_equals_residual(k, window):
    """Without a Jacobi denominator the residual is the constant mu(P), and the verdict follows it."""
    cells = _undecided_by_exponent(k, window)
    assert cells
    for p_gamma, p_alpha, g in cells:
        residual = reduce(g.P, g.J, g.kernel).Lambda
        assert residual.degree() <= 0
        assert mu(g.P, g.kernel) == residual.as_expr(), (p_gamma, p_alpha)
        assert decide_algebraic(g).verdict.is_algebraic == residual.is_zero


def test_linear_forms_follow_verdict(ctx):
    """The path functional vanishes numerically exactly on the cells decided algebraic."""
    threshold = mp.ldexp(mp.mpf(1), -64)
    for p_gamma, p_alpha, g in _undecided_by_exponent(5, 2):
        algebraic = decide_algebraic(g).verdict.is_algebraic
        assert linear_forms(g, ctx).all_vanish(threshold) == algebraic, (p_gamma, p_alpha)


@pytest.mark.slow
@pytest.mark.parametrize("k", [3, 5, 7])
def test_linear_forms_follow_verdict_full_grid(k):
    """Same agreement at 256 bits against 2^-128 over |p| <= 6."""
    ctx = PrecisionContext(working_bits=256, max_refinement=8)
    threshold = mp.ldexp(mp.mpf(1), -128)
    for p_gamma, p_alpha, g in _undecided_by_exponent(k, 6):
        algebraic = decide_algebraic(g).verdict.is_algebraic
        assert linear_forms(g, ctx).all_vanish(threshold) == algebraic, (p_gamma, p_alpha)


@pytest.mark.parametrize("window", [3, pytest.param(6, marks=pytest.mark.slow)])
def test_transcendental_phi_obstructs_for_k5(service, window):
    """For k = 5 a non-zero residual always ends in the exact character obstruction."""
    k = 5
    transcendental = 0
    for p_gamma, p_alpha, g in _undecided_by_exponent(k, window):
        report = service.analyze_ve2(k, lambda_of(k, p_gamma), lambda_of(k, p_alpha))
        if decide_algebraic(g).verdict.is_algebraic:
            assert report.phi.algebraic
            continue
        transcendental += 1
        assert report.status is Status.OBSTRUCTED_EXACT, (p_gamma, p_alpha)
        assert report.reason == PHI_SHORTCUT
        assert not report.ostrowski
    assert transcendental


def test_k3_exceptional_cells_run_relations(service):
    """For k = 3 the cells Case 3 x {Case 3, Case 4} never take the character shortcut."""
    k = 3
    for p_gamma, p_alpha in product((0, -2), (0, -1, -2)):
        assert jordan_case(p_gamma) == 3 and jordan_case(p_alpha) in (3, 4)
        report = service.analyze_ve2(k, lambda_of(k, p_gamma), lambda_of(k, p_alpha))
        assert report.exceptional
        assert report.ostrowski, (p_gamma, p_alpha)
        assert report.reason != PHI_SHORTCUT


@pytest.mark.slow
def test_k5_letter_outcomes(service):
    """Over |p| <= 6: letters A and B never obstruct, C, D and E always do; C fails at a Psi relation."""
    k = 5
    by_letter = defaultdict(list)
    for p_gamma, p_alpha, _ in _ve2_cells(k, 6):
        report = service.analyze_ve2(k, lambda_of(k, p_gamma), lambda_of(k, p_alpha))
        if report.letter is not None:
            by_letter[report.letter.rstrip("'")].append(((p_gamma, p_alpha), report))

    assert {"A", "B", "C", "D", "E"} <= set(by_letter)
    for letter in ("A", "B"):
        for cell, report in by_letter[letter]:
            assert report.status is Status.NO_OBSTRUCTION_FOUND, (letter, cell, report.reason)
    for letter in ("C", "D", "E"):
        for cell, report in by_letter[letter]:
            assert report.status in OBSTRUCTED, (letter, cell, report.reason)
    for cell, report in by_letter["C"]:
        assert any(not verdict.algebraic for verdict in report.psi.values()), (cell, report.reason)


def _check_quadrature(ctx, trials, seed):
    rng = random.Random(seed)
    oracle = NumericOracle(ctx)
    for _ in range(trials):
        kernel = _random_kernel(rng, lowest=-1)
        P = _random_poly(rng)
        value = oracle.quadrature_segment(ReducedIntegrand(P, kernel))
        with mp.workprec(ctx.working_bits):
            expected = mp.beta(_mp(kernel.e0 + 1), _mp(kernel.e1 + 1)) * _mp(mu(P, kernel))
            assert abs(value.value - expected) < 4 * ctx.zero_tolerance * max(1, abs(expected)), (P, kernel)


def _check_residues(ctx, trials, seed):
    rng = random.Random(seed)
    oracle = NumericOracle(ctx)
    for _ in range(trials):
        kernel = _random_kernel(rng, lowest=-3)
        P = _random_poly(rng)
        J = _random_denominator(rng)
        if J.degree() == 0:
            J = Poly(z - Rational(rng.randint(1, 9), 10), z, domain=QQ)
        for root in isolate_roots(J):
            closed = oracle.residue_double_pole(P, kernel, J, root)
            contour = oracle.residue_by_contour(P, kernel, J, 2, root)
            with mp.workprec(ctx.working_bits):
                assert abs(closed.value - contour.value) < 4 * ctx.zero_tolerance * max(1, abs(closed.value)), (P, J)


def test_quadrature_calibration(ctx):
    """Segment quadrature against B(e0 + 1, e1 + 1) mu(P) on random admissible integrands."""
    _check_quadrature(ctx, trials=10, seed=7)


def test_residue_calibration(ctx):
    """Closed double-pole residues against circle quadrature on random integrands."""
    _check_residues(ctx, trials=10, seed=11)


@pytest.mark.slow
def test_quadrature_calibration_256_bits():
    """200 random integrands at 256 bits."""
    _check_quadrature(PrecisionContext(working_bits=256, max_refinement=8), trials=200, seed=2024)


@pytest.mark.slow
def test_residue_calibration_256_bits():
    """100 random integrands at 256 bits."""
    _check_residues(PrecisionContext(working_bits=256, max_refinement=8), trials=100, seed=2025)


@pytest.mark.parametrize("seed", range(5))
def test_reduce_recovers_random_primitive(seed):
    """Differentiating R Omega z (1 - z) / J gives back R exactly, with or without an added residual."""
    rng = random.Random(seed)
    for _ in range(10):
        kernel = _random_kernel(rng, lowest=-3, allow_integer=False)
        R = _random_poly(rng, max_degree=3)
        J = _random_denominator(rng)
        P = apply_T(R, J, kernel)
        term = Term(P, kernel, J**2)

        result = reduce(P, J, kernel)
        assert result.Lambda.is_zero
        assert result.R == R
        assert verify_closed_form(result.closed_form, [term])
        assert decide_algebraic(ReducedIntegrand(P, kernel, J)).verdict.is_algebraic

        closed = primitive([term])
        assert closed is not None
        assert closed.R == R
        assert verify_closed_form(closed, [term])

        residual = _random_poly(rng, max_degree=max(J.degree(), 0))
        shifted = reduce(P + residual, J, kernel)
        assert shifted.Lambda == residual
        assert shifted.R == R
        assert primitive([Term(P + residual, kernel, J**2)]) is None
