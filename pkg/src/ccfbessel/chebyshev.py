"""Chebyshev interpolation on [0, b] at Clenshaw-Curtis points.

Series are stored as plain coefficients of T_j(2x/b - 1); the halving of
the first and last interpolation coefficients is folded in at fit time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct

from .errors import DomainError, SamplingError, SingularSystemError


@dataclass(frozen=True)
class ChebInterp:
    """P_N f(x) = sum_j coeffs[j] T_j(2x/b - 1)."""

    b: float
    N: int
    coeffs: np.ndarray

    def __call__(self, x):
        return cheb_eval(self, x)


@dataclass(frozen=True)
class HermiteInterp:
    """Confluent interpolant of degree N + 2s, matching f^(k) at 0 and b, k <= s."""

    b: float
    N: int
    s: int
    coeffs: np.ndarray
    condition: float = field(default=1.0)

    def __call__(self, x):
        return cheb_eval(self, x)


def cc_points(N: int, b: float) -> np.ndarray:
    """x_k = b/2 + (b/2) cos(k pi / N), k = 0..N (descending)."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if not b > 0:
        raise ValueError(f"b must be positive, got {b}")
    k = np.arange(N + 1)
    x = 0.5 * b + 0.5 * b * np.cos(k * np.pi / N)
    # exact endpoints and midpoint regardless of rounding in cos
    x[0], x[-1] = b, 0.0
    if N % 2 == 0:
        x[N // 2] = 0.5 * b
    return x


def cheb_fit(samples, b: float) -> ChebInterp:
    """Interpolation coefficients from samples at ``cc_points(N, b)``.

    a_j = (2/N) sum''_k f(x_k) T_j(x_k) via a type-I DCT; c_0 = a_0/2,
    c_N = a_N/2, c_j = a_j otherwise.
    """
    f = np.asarray(samples, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise SamplingError("need a 1-D array of N+1 >= 2 samples")
    N = f.size - 1
    a = dct(f, type=1) / N
    c = a.copy()
    c[0] *= 0.5
    c[-1] *= 0.5
    return ChebInterp(float(b), N, c)


def _clenshaw(c: np.ndarray, t):
    t = np.asarray(t, dtype=float)
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    for ck in c[:0:-1]:
        b1, b2 = 2.0 * t * b1 - b2 + ck, b1
    return t * b1 - b2 + c[0]


def cheb_eval(p, x):
    """Evaluate a ChebInterp/HermiteInterp at x in [0, b] (Clenshaw recurrence)."""
    xa = np.asarray(x, dtype=float)
    tol = 1e-12 * p.b
    if np.any(xa < -tol) or np.any(xa > p.b + tol):
        raise DomainError(f"evaluation point outside [0, {p.b}]")
    t = np.clip(2.0 * xa / p.b - 1.0, -1.0, 1.0)
    out = _clenshaw(np.asarray(p.coeffs, dtype=float), t)
    return float(out) if np.ndim(x) == 0 else out


def cheb_derivative(coeffs, b: float) -> np.ndarray:
    """Coefficients of d/dx of sum_j c_j T_j(2x/b - 1).

    Backward recurrence d_{k-1} = d_{k+1} + 2k c_k, d_0 halved, then the
    chain-rule factor 2/b.
    """
    c = np.asarray(coeffs, dtype=float)
    n = c.size - 1
    if n < 1:
        return np.zeros(1)
    d = np.zeros(n + 2)
    for k in range(n, 0, -1):
        d[k - 1] = d[k + 1] + 2.0 * k * c[k]
    d[0] *= 0.5
    return d[:n] * (2.0 / b)


def derivative_interp(p, order: int = 1):
    """Return a ChebInterp holding the ``order``-th derivative of ``p``."""
    c = np.asarray(p.coeffs, dtype=float)
    for _ in range(order):
        c = cheb_derivative(c, p.b)
    return ChebInterp(p.b, max(c.size - 1, 0), c)


def _endpoint_derivative_rows(n_coef: int, k: int, b: float):
    """Rows giving d^k/dx^k T_j(2x/b-1) at x = b and x = 0, j < n_coef."""
    j = np.arange(n_coef, dtype=float)
    at_one = np.ones(n_coef)
    for i in range(k):
        at_one *= (j * j - i * i) / (2 * i + 1)
    scale = (2.0 / b) ** k
    at_minus_one = at_one * (-1.0) ** (np.arange(n_coef) + k)
    return at_one * scale, at_minus_one * scale


def hermite_fit(samples, derivs_0, derivs_b, N: int, s: int, b: float) -> HermiteInterp:
    """Polynomial of degree N+2s matching f at interior CC nodes and f^(k), k<=s, at 0 and b.

    ``samples`` are values at ``cc_points(N, b)`` (the two endpoint samples
    are superseded by the k=0 derivative conditions).  ``derivs_0[k]`` and
    ``derivs_b[k]`` hold f^(k)(0), f^(k)(b).  Coefficients come from a dense
    solve in the Chebyshev basis with row equilibration.
    """
    f = np.asarray(samples, dtype=float)
    d0 = np.asarray(derivs_0, dtype=float)
    db = np.asarray(derivs_b, dtype=float)
    if f.size != N + 1:
        raise SamplingError(f"expected {N + 1} samples, got {f.size}")
    if N < 1 or s < 0:
        raise ValueError("need N >= 1 and s >= 0")
    if d0.size != s + 1 or db.size != s + 1:
        raise SamplingError(f"endpoint derivative arrays must have length s+1 = {s + 1}")
    n = N + 2 * s + 1
    A = np.zeros((n, n))
    rhs = np.zeros(n)
    row = 0
    t_int = np.cos(np.arange(1, N) * np.pi / N)
    if N > 1:
        A[: N - 1] = np.cos(np.outer(np.arccos(t_int), np.arange(n)))
        rhs[: N - 1] = f[1:N]
        row = N - 1
    for k in range(s + 1):
        rb, r0 = _endpoint_derivative_rows(n, k, b)
        for r, v in ((rb, db[k]), (r0, d0[k])):
            scale = np.max(np.abs(r))
            A[row] = r / scale
            rhs[row] = v / scale
            row += 1
    try:
        cond = float(np.linalg.cond(A))
        coeffs = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"Hermite system is singular: {exc}", condition=np.inf) from exc
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularSystemError(f"Hermite system too ill-conditioned (cond ~ {cond:.2e})", cond)
    return HermiteInterp(float(b), N, s, coeffs, cond)
