import numpy as np
from hypothesis import assume, given, settings, strategies as st

from ccfbessel.chebyshev import cc_points, cheb_fit, derivative_interp, hermite_fit
from ccfbessel.moments import MomentParams, compute_moments, recurrence_residuals
from ccfbessel.problem import IntegralSpec
from ccfbessel.quadrature import ccf

alphas = st.floats(-0.9, 2.0)
orders = st.floats(0.0, 3.0)
radii = st.floats(0.5, 150.0)


@given(st.integers(1, 40), st.floats(0.01, 100.0))
def test_cc_points_descending_in_interval(N, b):
    x = cc_points(N, b)
    assert x[0] == b and x[-1] == 0.0
    assert np.all(np.diff(x) < 0)


@given(st.integers(1, 20), st.floats(0.1, 10.0), st.data())
def test_fit_reproduces_polynomials(N, b, data):
    coef = np.array(data.draw(st.lists(st.floats(-5, 5), min_size=N + 1, max_size=N + 1)))
    P = np.polynomial.Chebyshev(coef, domain=[0, b])
    p = cheb_fit(P(cc_points(N, b)), b)
    g = np.linspace(0, b, 57)
    assert np.max(np.abs(p(g) - P(g))) <= 1e-12 * max(1.0, np.abs(coef).sum())


@settings(max_examples=40)
@given(st.integers(2, 12), st.integers(0, 3), st.data())
def test_hermite_reproduces_polynomials(N, s, data):
    deg = N + 2 * s
    coef = np.array(data.draw(st.lists(st.floats(-2, 2), min_size=deg + 1, max_size=deg + 1)))
    P = np.polynomial.Chebyshev(coef, domain=[0, 1])
    d0 = [P.deriv(k)(0.0) if k else P(0.0) for k in range(s + 1)]
    db = [P.deriv(k)(1.0) if k else P(1.0) for k in range(s + 1)]
    h = hermite_fit(P(cc_points(N, 1.0)), d0, db, N, s, 1.0)
    assert np.max(np.abs(h.coeffs - coef)) <= 1e-9 * max(1.0, np.abs(coef).sum())


@given(st.integers(2, 30))
def test_derivative_lowers_degree(N):
    p = cheb_fit(np.exp(cc_points(N, 1.0)), 1.0)
    assert derivative_interp(p).coeffs.size == N


@settings(max_examples=60, deadline=None)
@given(radii, orders, alphas, st.integers(0, 30))
def test_moment_tables_bounded_and_consistent(r, m, a, J):
    assume(m + a > -0.9)
    p = MomentParams(r, m, a)
    t = compute_moments(p, J, log=True)
    assert np.all(np.abs(t.M) <= 1 / (a + 1) + 1e-12)
    assert np.all(np.abs(t.Mlog) <= 1 / (a + 1) ** 2 + 1e-12)
    assert t.residual <= 1e-9
    if J >= 6:
        assert recurrence_residuals(t.M, p, range(J - 3)).max() <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 4.0), alphas, orders, st.floats(1.0, 100.0), st.sampled_from(["plain", "log"]),
       st.floats(-3, 3), st.floats(-3, 3))
def test_ccf_linear(b, a, m, w, kernel, c1, c2):
    assume(m + a > -0.9)
    spec = IntegralSpec(b, a, m, w, kernel)
    x = cc_points(10, b)
    f, g = np.exp(-x), np.sin(3 * x)
    lhs = ccf(spec, c1 * f + c2 * g).value
    rhs = c1 * ccf(spec, f).value + c2 * ccf(spec, g).value
    scale = abs(c1 * ccf(spec, f).value) + abs(c2 * ccf(spec, g).value) + 1e-300
    assert abs(lhs - rhs) <= 1e-12 * scale + 1e-300
