"""Hermite evaluation, quadrature, and coefficient-space operator tests.

The independent oracle for function values is the Rodrigues form
(2^n n! sqrt(pi))^{-1/2} (-1)^n e^{t^2/2} d^n/dt^n e^{-t^2},
evaluated symbolically; derivatives are cross-checked by central finite
differences.
"""

import functools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from hermframe import (
    CoefficientVector,
    HermiteContext,
    QuadratureDomainError,
    apply_operator,
    gauss_hermite_nodes,
)


@functools.lru_cache(maxsize=None)
def rodrigues_value(n, x_str):
    import sympy as sp

    t = sp.Symbol("t")
    x = sp.Rational(x_str)
    expr = (-1) ** n * sp.exp(t**2 / 2) * sp.diff(sp.exp(-(t**2)), t, n)
    norm = sp.sqrt(2**n * sp.factorial(n) * sp.sqrt(sp.pi))
    return float((expr / norm).subs(t, x).evalf(30))


def test_h0_at_zero(ctx16):
    assert ctx16.hermite_eval(0, 0.0) == pytest.approx(math.pi ** -0.25, abs=1e-12)


def test_h1_odd_at_zero(ctx16):
    assert ctx16.hermite_eval(1, 0.0) == 0.0


def test_h2_matches_rodrigues_at_one(ctx16):
    assert ctx16.hermite_eval(2, 1.0) == pytest.approx(
        rodrigues_value(2, "1"), abs=1e-12
    )


@pytest.mark.parametrize(
    "x_str,x", [("-3", -3.0), ("-1", -1.0), ("0", 0.0), ("1/2", 0.5), ("2", 2.0)]
)
def test_recurrence_rodrigues_agreement(ctx16, x_str, x):
    for n in range(11):
        assert ctx16.hermite_eval(n, x) == pytest.approx(
            rodrigues_value(n, x_str), abs=1e-10
        )


def test_eval_rejects_bad_index(ctx16):
    with pytest.raises(IndexError):
        ctx16.hermite_eval(16, 0.0)
    with pytest.raises(IndexError):
        ctx16.hermite_eval(-1, 0.0)


def test_eval_rejects_nonfinite(ctx16):
    with pytest.raises(ValueError):
        ctx16.hermite_eval(0, math.nan)


def test_nodes_symmetric_and_increasing():
    nodes = gauss_hermite_nodes(40)
    assert np.all(np.diff(nodes) > 0)
    assert_allclose(nodes, -nodes[::-1], atol=0)


def test_quadrature_orthonormality(ctx64):
    table = ctx64.hermite_table(ctx64.quad_nodes)
    gram = table.T * ctx64.quad_weights @ table
    assert np.max(np.abs(gram - np.eye(64))) < 1e-12


def test_weights_positive_nodes_increasing(ctx256):
    assert np.all(ctx256.quad_weights > 0)
    assert np.all(np.diff(ctx256.quad_nodes) > 0)


def test_coefficients_of_basis_function(ctx16):
    c = ctx16.hermite_coefficients(ctx16.synthesize(np.eye(16)[3]))
    assert c.values[3] == pytest.approx(1.0, abs=1e-12)
    rest = np.delete(c.values, 3)
    assert np.max(np.abs(rest)) <= 1e-12


def test_coefficients_of_gaussian(ctx16):
    # <e^{-x^2/2}, h_0> = pi^{-1/4} * integral e^{-x^2} = pi^{1/4}
    c = ctx16.hermite_coefficients(lambda x: np.exp(-0.5 * x * x))
    assert c.values[0] == pytest.approx(math.pi ** 0.25, abs=1e-12)
    assert np.max(np.abs(c.values[1:])) <= 1e-12


def test_coefficients_of_x_gaussian(ctx16):
    # Gaussian moment integral: single entry pi^{1/4}/sqrt(2) at index 1
    c = ctx16.hermite_coefficients(lambda x: x * np.exp(-0.5 * x * x))
    assert c.values[1] == pytest.approx(math.pi ** 0.25 / math.sqrt(2.0), abs=1e-12)
    rest = np.delete(c.values, 1)
    assert np.max(np.abs(rest)) <= 1e-12


def test_quadrature_overflow_reported(ctx64):
    with pytest.raises(QuadratureDomainError):
        ctx64.hermite_coefficients(lambda x: np.exp(x * x))


def test_synthesize_unit_vector(ctx16):
    f = ctx16.synthesize(np.eye(16)[0])
    x = np.linspace(-4, 4, 41)
    assert_allclose(f(x), ctx16.hermite_eval(0, x), atol=1e-12)


def test_round_trip(ctx64, rng):
    c = rng.uniform(-1.0, 1.0, size=48)
    back = ctx64.hermite_coefficients(ctx64.synthesize(c), count=48)
    assert_allclose(back.values, c, atol=1e-10)


def test_parseval(ctx16):
    c = np.array([1.0, 1.0]) / math.sqrt(2.0)
    f = ctx16.synthesize(c)
    norm_sq = ctx16.integrate(lambda x: f(x) ** 2)
    assert norm_sq == pytest.approx(1.0, abs=1e-10)


def test_derivative_of_h0(ctx16):
    d = apply_operator(ctx16.derivative_matrix(4), [1.0])
    expected = np.zeros(4)
    expected[1] = -1.0 / math.sqrt(2.0)
    assert_allclose(d, expected, atol=1e-15)


def test_derivative_single_band_norm(ctx16):
    # one input coefficient maps onto a single band entry of size 1/sqrt(2)
    d = apply_operator(ctx16.derivative_matrix(4), [0.7])
    assert np.linalg.norm(d) == pytest.approx(0.7 / math.sqrt(2.0), abs=1e-15)


def test_derivative_matches_finite_differences(ctx64, rng):
    c = rng.uniform(-1.0, 1.0, size=20)
    f = ctx64.synthesize(c)
    df = ctx64.synthesize(apply_operator(ctx64.derivative_matrix(21), c))
    step = 1e-4
    for x in (-2.0, 0.0, 1.5):
        fd = (f(x + step) - f(x - step)) / (2.0 * step)
        assert df(x) == pytest.approx(fd, abs=1e-6)


def test_position_of_h0(ctx16):
    p = apply_operator(ctx16.position_matrix(4), [1.0])
    expected = np.zeros(4)
    expected[1] = 1.0 / math.sqrt(2.0)
    assert_allclose(p, expected, atol=1e-15)


def test_position_is_multiplication(ctx16, rng):
    c = rng.uniform(-1.0, 1.0, size=8)
    xc = ctx16.synthesize(apply_operator(ctx16.position_matrix(9), c))
    f = ctx16.synthesize(c)
    x = np.linspace(-3, 3, 25)
    assert_allclose(xc(x), x * f(x), atol=1e-12)


def test_position_symmetric(ctx16):
    p = ctx16.position_matrix(10)
    assert_allclose(p, p.T, atol=0)


def test_commutator_identity(ctx64, rng):
    # [D, P] = I on coefficients supported away from the truncation edge
    count = 32
    d = ctx64.derivative_matrix(count)
    p = ctx64.position_matrix(count)
    commutator = d @ p - p @ d
    c = np.zeros(count)
    c[: count - 2] = rng.uniform(-1.0, 1.0, size=count - 2)
    assert_allclose(commutator @ c, c, atol=1e-12)


def test_derivative_matrix_size_limit(ctx16):
    with pytest.raises(ValueError):
        ctx16.derivative_matrix(16)


def test_quad_count_floor():
    with pytest.raises(ValueError):
        HermiteContext(16, quad_count=16)


def test_coefficient_vector_validation():
    with pytest.raises(ValueError):
        CoefficientVector(np.array([1.0, math.inf]))


def test_large_truncation_orthonormality():
    # deep truncation exercises the underflow-safe weight computation
    ctx = HermiteContext(512)
    table = ctx.hermite_table(ctx.quad_nodes)
    gram = table.T * ctx.quad_weights @ table
    assert np.max(np.abs(gram - np.eye(512))) < 1e-12
