"""Piecewise distribution assembly, float evaluation, quantiles, and moments."""

import io
import math
from fractions import Fraction as F

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sledist import (
    ConsistencyError,
    PiecewisePolynomial,
    Polynomial,
    TraceDistribution,
    build_sle_cdf,
    build_sle_pdf,
    count_real_roots,
    default_grid,
    lambda1_moment,
    quantile,
    sle_distribution,
    sle_moment,
    threshold_for_false_alarm,
    trace_moment,
    trace_pdf_eval,
    write_distribution_csv,
)

from conftest import EXACT_CONFIGS, cached_dist, cached_table


# --- closed smallest case -----------------------------------------------------


def test_k2n2_pdf_is_shifted_square():
    pdf = cached_dist(2, 2).pdf
    assert pdf.breakpoints == (F(1), F(2))
    assert pdf.segments == (Polynomial([3, -6, 3]),)


def test_k2n2_cdf_is_shifted_cube():
    cdf = cached_dist(2, 2).cdf
    assert cdf.segments == (Polynomial([-1, 3, -3, 1]),)


def test_k2n2_pointwise_values():
    d = cached_dist(2, 2)
    assert d.pdf.value_exact(F(1)) == 0
    assert d.pdf.value_exact(F(2)) == 3
    assert d.pdf.eval(1.5) == pytest.approx(0.75, abs=1e-14)
    assert d.cdf.eval(2.0) == 1.0
    assert d.cdf.eval(0.5) == 0.0
    assert d.pdf.eval(0.99) == 0.0
    assert d.pdf.eval(2.01) == 0.0
    assert d.cdf.eval(5.0) == 1.0


def test_k2n2_moments_match_sympy_oracle():
    d = cached_dist(2, 2)
    x = sympy.symbols("x")
    for m in range(0, 4):
        oracle = sympy.integrate(x**m * 3 * (x - 1) ** 2, (x, 1, 2))
        assert sle_moment(d, m) == F(int(oracle.p), int(oracle.q))


def test_k2n2_quantile_closed_form():
    d = cached_dist(2, 2)
    assert quantile(d, 0.5) == pytest.approx(1 + 2 ** (-1 / 3), abs=1e-10)
    assert quantile(d, 0.0) == 1.0
    assert quantile(d, 1.0) == 2.0


def test_k2n2_threshold_closed_form():
    d = cached_dist(2, 2)
    assert threshold_for_false_alarm(d, 0.001) == pytest.approx(1 + 0.999 ** (1 / 3), abs=1e-10)
    assert threshold_for_false_alarm(d, 0.5) == quantile(d, 0.5)


def test_k2n2_mellin_anchor():
    # E[lambda_max] = 7/2 factors into E[X] * E[T] = (7/4) * 2
    t = cached_table(2, 2)
    d = cached_dist(2, 2)
    assert lambda1_moment(t, 2) == F(7, 2)
    assert sle_moment(d, 1) == F(7, 4)
    assert trace_moment(2, 2, 2) == 2
    assert lambda1_moment(t, 2) == sle_moment(d, 1) * trace_moment(2, 2, 2)


# --- construction invariants ----------------------------------------------------


@pytest.mark.parametrize("K,N", EXACT_CONFIGS)
def test_pdf_total_mass_exact(K, N):
    assert cached_dist(K, N).pdf.integral() == 1


@pytest.mark.parametrize("K,N", EXACT_CONFIGS)
def test_cdf_boundary_values_exact(K, N):
    cdf = cached_dist(K, N).cdf
    assert cdf.value_exact(F(1)) == 0
    assert cdf.value_exact(F(K)) == 1


@pytest.mark.parametrize("K,N", EXACT_CONFIGS)
def test_cdf_derivative_equals_pdf(K, N):
    d = cached_dist(K, N)
    for cseg, pseg in zip(d.cdf.segments, d.pdf.segments):
        assert cseg.derivative() == pseg


@pytest.mark.parametrize("K,N", EXACT_CONFIGS)
def test_cdf_continuous_at_breakpoints(K, N):
    cdf = cached_dist(K, N).cdf
    for t in range(len(cdf.segments) - 1):
        b = cdf.breakpoints[t + 1]
        assert cdf.segments[t](b) == cdf.segments[t + 1](b)


@pytest.mark.parametrize("K,N", EXACT_CONFIGS)
def test_breakpoints_are_harmonic_points(K, N):
    pdf = cached_dist(K, N).pdf
    assert pdf.breakpoints == tuple(F(K, i) for i in range(K, 0, -1))


@pytest.mark.parametrize("K,N", EXACT_CONFIGS)
def test_pdf_nonnegative_at_chebyshev_points(K, N):
    # float grid points are exact binary rationals, so the check is rigorous
    pdf = cached_dist(K, N).pdf
    count = 16 if K * N >= 256 else 64
    for t, seg in enumerate(pdf.segments):
        lo = float(pdf.breakpoints[t])
        hi = float(pdf.breakpoints[t + 1])
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        for s in range(count):
            x = mid + half * math.cos(math.pi * (2 * s + 1) / (2 * count))
            assert seg(F(x)) >= 0


@pytest.mark.parametrize("K,N", [(2, 2), (2, 10), (3, 10), (4, 10), (6, 6)])
def test_pdf_positive_inside_segments_by_root_counting(K, N):
    # no interior roots plus a positive midpoint proves positivity on the
    # open segment; endpoints are checked directly
    pdf = cached_dist(K, N).pdf
    for t, seg in enumerate(pdf.segments):
        lo, hi = pdf.breakpoints[t], pdf.breakpoints[t + 1]
        interior = count_real_roots(seg, lo, hi) - (1 if seg(hi) == 0 else 0)
        assert interior == 0
        assert seg((lo + hi) / 2) > 0
        assert seg(lo) >= 0 and seg(hi) >= 0


def test_scaled_distribution_rejected():
    d = cached_dist(2, 10)
    doubled = PiecewisePolynomial(
        d.pdf.breakpoints, [seg.scale(2) for seg in d.pdf.segments]
    )
    from sledist import SleDistribution

    with pytest.raises(ConsistencyError):
        SleDistribution(table=d.table, pdf=doubled, cdf=d.cdf)


# --- float evaluation -------------------------------------------------------------


@pytest.mark.parametrize("K,N", [(2, 10), (4, 10), (6, 6), (4, 100)])
def test_float_eval_matches_exact_rational(K, N):
    d = cached_dist(K, N)
    xs = np.linspace(1.0, float(K), 41)
    for x in xs:
        for pp in (d.pdf, d.cdf):
            exact = float(pp.value_exact(F(x)))
            assert pp.eval(float(x)) == pytest.approx(exact, abs=5e-13)


@pytest.mark.parametrize("K,N", EXACT_CONFIGS)
def test_cdf_monotone_on_dense_grid(K, N):
    cdf = cached_dist(K, N).cdf
    grid = default_grid(K, 2048)
    vals = cdf.eval_many(grid)
    assert np.all(np.diff(vals) >= -1e-12)
    assert vals[0] == pytest.approx(0.0, abs=1e-12)
    assert vals[-1] == pytest.approx(1.0, abs=1e-12)


def test_eval_rejects_nan():
    d = cached_dist(2, 10)
    with pytest.raises(ValueError):
        d.cdf.eval(float("nan"))
    with pytest.raises(ValueError):
        d.cdf.eval_many(np.array([1.2, float("nan")]))


def test_eval_many_shapes_and_outside():
    d = cached_dist(2, 10)
    xs = np.array([[0.0, 1.0], [2.0, 3.0]])
    out = d.cdf.eval_many(xs)
    assert out.shape == xs.shape
    assert out[0, 0] == 0.0 and out[1, 1] == 1.0


def test_piecewise_structure_validation():
    with pytest.raises(ValueError):
        PiecewisePolynomial([1, 1], [Polynomial([1])])
    with pytest.raises(ValueError):
        PiecewisePolynomial([1, 2, 3], [Polynomial([1])])


def test_segment_index_convention():
    pp = cached_dist(4, 10).pdf
    assert pp.segment_index(F(1)) == 0
    assert pp.segment_index(F(4, 3)) == 1  # right-continuous at breakpoints
    assert pp.segment_index(F(4)) == 2
    with pytest.raises(ValueError):
        pp.segment_index(F(9, 2))


# --- quantiles ----------------------------------------------------------------


@pytest.mark.parametrize("K,N", [(2, 10), (3, 10), (6, 6)])
def test_quantile_inverts_cdf(K, N):
    d = cached_dist(K, N)
    for y in np.linspace(1.05, float(K) - 0.05, 17):
        p = d.cdf.eval(float(y))
        # inversion is well conditioned only where the density is not tiny
        if 1e-9 < p < 1 - 1e-9 and d.pdf.eval(float(y)) > 1e-3:
            assert quantile(d, p) == pytest.approx(float(y), abs=1e-10)


@given(st.floats(0.01, 0.99))
@settings(max_examples=30, deadline=None)
def test_quantile_lands_on_probability(p):
    d = cached_dist(2, 10)
    q = quantile(d, p)
    assert 1.0 <= q <= 2.0
    assert d.cdf.eval(q) == pytest.approx(p, abs=1e-9)


def test_quantile_domain_errors():
    d = cached_dist(2, 10)
    with pytest.raises(ValueError):
        quantile(d, -0.1)
    with pytest.raises(ValueError):
        quantile(d, 1.1)
    with pytest.raises(ValueError):
        threshold_for_false_alarm(d, 0.0)
    with pytest.raises(ValueError):
        threshold_for_false_alarm(d, 1.0)


def test_threshold_complements_quantile():
    d = cached_dist(3, 10)
    assert threshold_for_false_alarm(d, 0.25) == quantile(d, 0.75)
    # a laxer false-alarm budget always lowers the detection threshold
    alphas = [0.001, 0.01, 0.1, 0.5, 0.9]
    gammas = [threshold_for_false_alarm(d, a) for a in alphas]
    assert gammas == sorted(gammas, reverse=True)
    assert all(1.0 < g < 3.0 for g in gammas)


# --- moment identities -----------------------------------------------------------


@pytest.mark.parametrize("K,N", EXACT_CONFIGS)
def test_mellin_product_identity(K, N):
    t = cached_table(K, N)
    d = cached_dist(K, N)
    for z in range(1, 7):
        assert lambda1_moment(t, z) == sle_moment(d, z - 1) * trace_moment(K, N, z)


@pytest.mark.parametrize("K,N", EXACT_CONFIGS)
def test_moment_basics(K, N):
    d = cached_dist(K, N)
    assert sle_moment(d, 0) == 1
    assert lambda1_moment(cached_table(K, N), 1) == 1
    # X lives in [1, K]
    mean = sle_moment(d, 1)
    assert 1 < mean < K


def test_moment_domain_errors():
    d = cached_dist(2, 10)
    with pytest.raises(ValueError):
        sle_moment(d, -1)
    with pytest.raises(ValueError):
        lambda1_moment(cached_table(2, 10), 0)
    with pytest.raises(ValueError):
        trace_moment(2, 10, 0)


# --- the normalized trace ---------------------------------------------------------


def test_trace_moment_mean_is_n():
    for K, N in [(2, 2), (3, 7), (6, 6), (4, 100)]:
        assert trace_moment(K, N, 2) == N
        assert trace_moment(K, N, 1) == 1


def test_trace_pdf_unit_exponential_case():
    assert trace_pdf_eval(1, 1, 1.0) == pytest.approx(math.exp(-1), abs=1e-12)


def test_trace_pdf_mode():
    K, N = 3, 5
    mode = (K * N - 1) / K
    left, peak, right = (
        trace_pdf_eval(K, N, mode - 1e-4),
        trace_pdf_eval(K, N, mode),
        trace_pdf_eval(K, N, mode + 1e-4),
    )
    assert peak > left and peak > right


def test_trace_pdf_normalizes():
    with mpmath.mp.workprec(80):
        total = mpmath.quad(lambda x: trace_pdf_eval(2, 2, float(x)), [0, 1, 5, 50])
    assert float(total) == pytest.approx(1.0, abs=1e-12)


def test_trace_pdf_nonpositive_argument_is_zero():
    assert trace_pdf_eval(2, 5, 0.0) == 0.0
    assert trace_pdf_eval(2, 5, -3.0) == 0.0


def test_trace_pdf_no_overflow_at_large_kn():
    # direct evaluation of K^(KN)/(KN-1)! overflows floats near KN = 400
    v = trace_pdf_eval(4, 100, 100.0)
    assert v > 0 and math.isfinite(v)


def test_trace_distribution_wrapper():
    td = TraceDistribution(K=2, N=10)
    assert td.mean == 10
    assert td.pdf(10.0) == pytest.approx(trace_pdf_eval(2, 10, 10.0), abs=0)
    with pytest.raises(ValueError):
        TraceDistribution(K=0, N=3)


# --- export ------------------------------------------------------------------------


def test_default_grid_contains_breakpoints():
    grid = default_grid(4, 100)
    for i in range(1, 5):
        assert float(F(4, i)) in grid
    assert np.all(np.diff(grid) > 0)
    assert grid[0] == 1.0 and grid[-1] == 4.0


def test_csv_round_trips_values():
    d = cached_dist(2, 10)
    grid = default_grid(2, 64)
    buf = io.StringIO()
    write_distribution_csv(d, grid, buf)
    lines = buf.getvalue().strip().split("\n")
    assert lines[0] == "x,pdf,cdf"
    assert len(lines) == 1 + len(grid)
    pdf_vals = d.pdf.eval_many(grid)
    cdf_vals = d.cdf.eval_many(grid)
    for line, x, f, c in zip(lines[1:], grid, pdf_vals, cdf_vals):
        sx, sf, sc = line.split(",")
        # shortest round-trip decimal: parsing back reproduces the doubles bit for bit
        assert float(sx) == x and float(sf) == f and float(sc) == c
    assert lines[-1].split(",")[2] == "1.0"
