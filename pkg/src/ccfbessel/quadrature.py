"""Clenshaw-Curtis-Filon (CCF) and Hermite-augmented (HCCF) integrators.

With the interpolant written as sum_j c_j T_j(2x/b - 1) and r = b*omega,

    int_0^b x^alpha f J_m(omega x) dx       ~ b^{alpha+1} sum_j c_j M_j
    int_0^b x^alpha ln x f J_m(omega x) dx  ~ b^{alpha+1} sum_j c_j (ln b M_j + Mt_j)

where M, Mt are the [0, 1] modified moments at r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .chebyshev import cc_points, cheb_fit, hermite_fit
from .errors import ConvergenceError, SamplingError
from .moments import MomentTable, Regime, compute_moments
from .problem import IntegralSpec

N_CAP = 1024


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    N_used: int
    s_used: int
    moment_regime: Regime
    diagnostics: dict = field(default_factory=dict)


def _apply_moments(spec: IntegralSpec, coeffs: np.ndarray, table: MomentTable) -> float:
    n = coeffs.size
    scale = spec.b ** (spec.alpha + 1.0)
    if spec.is_log:
        w = math.log(spec.b) * table.M[:n] + table.Mlog[:n]
    else:
        w = table.M[:n]
    return scale * math.fsum(coeffs * w)


def _result(spec, coeffs, N, s, condition):
    J = coeffs.size - 1
    table = compute_moments(spec.moment_params, J, log=spec.is_log)
    value = _apply_moments(spec, coeffs, table)
    residual = table.residual if table.log_residual is None else max(table.residual,
                                                                    table.log_residual)
    diag = {"residual": residual, "condition": condition, "K": table.K}
    return QuadratureResult(value, N, s, table.regime, diag)


def ccf(spec: IntegralSpec, f_samples, N: int | None = None) -> QuadratureResult:
    """CCF value from samples of f at ``cc_points(N, b)`` (descending x)."""
    f = np.asarray(f_samples, dtype=float)
    if f.ndim != 1 or f.size < 2:
        raise SamplingError("samples must be a 1-D array of length N+1 >= 2")
    if N is not None and f.size != N + 1:
        raise SamplingError(f"expected {N + 1} samples for N={N}, got {f.size}")
    if not np.all(np.isfinite(f)):
        raise SamplingError("samples must be finite")
    p = cheb_fit(f, spec.b)
    return _result(spec, p.coeffs, p.N, 0, 1.0)


def hccf(spec: IntegralSpec, f_samples, endpoint_derivs_0, endpoint_derivs_b, N: int,
         s: int) -> QuadratureResult:
    """HCCF value: the interpolant also matches f^(k), k <= s, at 0 and b."""
    h = hermite_fit(f_samples, endpoint_derivs_0, endpoint_derivs_b, N, s, spec.b)
    return _result(spec, h.coeffs, N, s, h.condition)


def ccf_callable(spec: IntegralSpec, f: Callable, N: int, s: int = 0) -> QuadratureResult:
    """Sample ``f`` and run CCF (s = 0) or HCCF; HCCF needs ``f.endpoint_derivatives``."""
    x = cc_points(N, spec.b)
    samples = np.asarray(f(x), dtype=float) * np.ones_like(x)
    if s == 0:
        return ccf(spec, samples, N)
    if not hasattr(f, "endpoint_derivatives"):
        raise TypeError("HCCF needs a function object providing endpoint_derivatives(s)")
    d0, db = f.endpoint_derivatives(s)
    return hccf(spec, samples, d0, db, N, s)


def ccf_auto(spec: IntegralSpec, f: Callable, target_tol: float, N0: int = 8) -> QuadratureResult:
    """Double N from ``N0`` until successive CCF values agree to ``target_tol``."""
    if not target_tol >= 1e-12:
        raise ValueError(f"target_tol must be >= 1e-12, got {target_tol}")
    prev = ccf_callable(spec, f, N0)
    N = N0
    while 2 * N <= N_CAP:
        N *= 2
        cur = ccf_callable(spec, f, N)
        diff = abs(cur.value - prev.value)
        if diff <= target_tol * max(1.0, abs(cur.value)):
            cur.diagnostics["achieved_difference"] = diff
            return cur
        prev = cur
    raise ConvergenceError(f"CCF did not settle to {target_tol} by N={N_CAP}", best=prev)
