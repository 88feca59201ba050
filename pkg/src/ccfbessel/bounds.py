"""Computable error bounds and predicted convergence exponents for CCF/HCCF."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .chebyshev import ChebInterp, derivative_interp
from .errors import DomainError
from .problem import IntegralSpec

SUP_GRID = 2001


@dataclass(frozen=True)
class AnalyticityInfo:
    """f analytic inside the Bernstein ellipse E_rho (on [-1, 1]) with |f| <= M_bound there."""

    rho: float
    M_bound: float

    def __post_init__(self):
        if not self.rho > 1:
            raise DomainError(f"rho must exceed 1, got {self.rho}")
        if not self.M_bound > 0:
            raise DomainError(f"M_bound must be positive, got {self.M_bound}")


class RateMode(str, enum.Enum):
    FIXED_N_VS_OMEGA = "FixedN_vs_omega"
    FIXED_OMEGA_VS_N = "FixedOmega_vs_N"
    HCCF = "HCCF"


@dataclass(frozen=True)
class ErrorReport:
    """Predicted error ~ (log factor) / omega^rate_omega, resp. / N^rate_N."""

    explicit_bound: float | None = None
    rate_omega: float | None = None
    omega_log_factor: bool = False
    rate_N: float | None = None
    N_log_factor: bool = False
    basis: dict = field(default_factory=dict)


def _double_factorial_odd(n: int) -> float:
    """(2n-1)!!, with (-1)!! = 1."""
    out = 1.0
    for i in range(1, 2 * n, 2):
        out *= i
    return out


def interp_error_bound(info: AnalyticityInfo, N: int, n: int = 0) -> float:
    """Bound on ||f^(n) - (P_N f)^(n)||_inf over [-1, 1] for f analytic in E_rho.

    2M (N+1)^{2n} / ((rho^N - rho^-N) (2n-1)!!) * sum_{j=0}^{n} (2 rho/(rho-1)^2)^{n+1-j}.
    Returns inf if the expression overflows.
    """
    if n < 0 or N < 1:
        raise ValueError("need N >= 1 and n >= 0")
    rho, M = info.rho, info.M_bound
    try:
        q = 2.0 * rho / (rho - 1.0) ** 2
        tail = math.fsum(q ** (n + 1 - j) for j in range(n + 1))
        denom = (rho**N - rho ** (-N)) * _double_factorial_odd(n)
        val = 2.0 * M * float(N + 1) ** (2 * n) / denom * tail
    except OverflowError:
        return math.inf
    return val if math.isfinite(val) else math.inf


def measured_sup_errors(f, p: ChebInterp, orders=(0,), grid: int = SUP_GRID) -> np.ndarray:
    """max |f^(i) - P^(i)| on a uniform grid over [0, b], for each i in ``orders``.

    ``f`` must provide ``derivative(i, x)`` (see functions.TestFunction) when
    any order > 0 is requested.
    """
    x = np.linspace(0.0, p.b, grid)
    out = []
    for i in orders:
        fi = f(x) if i == 0 else f.derivative(i, x)
        pi = derivative_interp(p, i)(x) if i else p(x)
        out.append(float(np.max(np.abs(np.asarray(fi) - pi))))
    return np.array(out)


def explicit_ccf_bound(spec: IntegralSpec, sup_err: float) -> float:
    """Constant-free bound on |I - CCF| from ||f - P_N f||_inf.

    Plain: b^{a+1}/(a+1) e.  Log: b^{a+1}(1 - (a+1) ln b)/(a+1)^2 e for b <= 1,
    (2 + b^{a+1}((a+1) ln b - 1))/(a+1)^2 e for b > 1  (a = alpha).
    These are int_0^b x^a dx and int_0^b x^a |ln x| dx times e.
    """
    if sup_err < 0:
        raise ValueError("sup error must be non-negative")
    a1 = spec.alpha + 1.0
    b = spec.b
    if not spec.is_log:
        return b**a1 / a1 * sup_err
    lb = math.log(b)
    if b <= 1.0:
        return b**a1 * (1.0 - a1 * lb) / a1**2 * sup_err
    return (2.0 + b**a1 * (a1 * lb - 1.0)) / a1**2 * sup_err


def _omega_rate(spec: IntegralSpec) -> tuple[float, bool, str]:
    a = spec.alpha
    if a < 0:
        return a + 2.0, spec.is_log, "C(omega)/omega with C ~ omega^-(alpha+1)"
    # the log-kernel split between the two lemmas is ambiguous at alpha = 0;
    # keep the log factor there (conservative)
    return 2.0, spec.is_log and a == 0.0, "C(omega)/omega with C ~ omega^-1"


def _n_rate(spec: IntegralSpec, k: int) -> tuple[float, bool, str]:
    a = spec.alpha
    if a < -0.5:
        return k + 2 * a + 2, spec.is_log, "N^-(k+2alpha+2)"
    return float(k + 1), spec.is_log and a == -0.5, "N^-(k+1)"


def rate_predictor(spec: IntegralSpec, mode: RateMode | str, k: int | None = None,
                   s: int | None = None) -> ErrorReport:
    """Predicted exponents: error ~ omega^-rate_omega (fixed N) or N^-rate_N (fixed omega).

    FixedOmega_vs_N needs the smoothness index ``k`` (f^(k) of bounded
    variation); HCCF needs the confluence order ``s`` and raises the
    omega exponent by s over plain CCF.
    """
    mode = RateMode(mode)
    if mode is RateMode.FIXED_OMEGA_VS_N:
        if k is None or k < 1:
            raise ValueError("FixedOmega_vs_N needs k >= 1")
        rate, flag, why = _n_rate(spec, k)
        return ErrorReport(rate_N=rate, N_log_factor=flag, basis={"rate_N": why})
    if not spec.supports_rates:
        raise DomainError("omega-rates assume omega >= 1")
    rate, flag, why = _omega_rate(spec)
    if mode is RateMode.HCCF:
        if s is None or s < 0:
            raise ValueError("HCCF needs s >= 0")
        return ErrorReport(rate_omega=rate + s, omega_log_factor=flag,
                           basis={"rate_omega": f"{why}, times omega^-{s} from endpoint matching"})
    return ErrorReport(rate_omega=rate, omega_log_factor=flag, basis={"rate_omega": why})


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of log|y| against log x."""
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.abs(np.asarray(ys, dtype=float)))
    return float(np.polyfit(x, y, 1)[0])
