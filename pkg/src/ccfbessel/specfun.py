"""Special functions used by the closed-form moment formulas.

Gamma, digamma and the Bessel functions J and Y are thin, domain-checked
wrappers over the C library and ``scipy.special``.  The generalized
hypergeometric series 1F2, its parameter derivatives and the Lommel
function S_{mu,nu} (with its mu-derivative) are summed here.

1F2 is summed in double precision with compensated accumulation.  For
arguments where the alternating series cancels badly (roughly |z| > 100,
i.e. z = -r^2/4 with r > 20) the Lommel small-argument branch re-sums the
same series in extended precision, with the working precision chosen from
the observed cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import special as _sp

from .errors import BranchFailure, DomainError, PoleError

POLE_EXCLUSION = 1e-8
LOMMEL_SWITCH = 50.0
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SeriesContext:
    """Tolerances for series summation."""

    rel_tol: float = 1e-13
    abs_tol: float = 1e-300
    max_terms: int = 10**6


DEFAULT_CONTEXT = SeriesContext()


@dataclass(frozen=True)
class SeriesResult:
    """Outcome of summing a power series.

    ``magnitude`` is the sum of absolute values of the terms; the ratio
    ``magnitude / |value|`` measures how much cancellation took place.
    """

    value: float
    terms_used: int
    converged: bool
    tail_estimate: float
    magnitude: float = 0.0

    @property
    def cancellation(self) -> float:
        if self.value == 0.0:
            return math.inf if self.magnitude else 1.0
        return self.magnitude / abs(self.value)


def _nonpositive_integer(z: float, tol: float = POLE_EXCLUSION) -> bool:
    n = round(z)
    return n <= 0 and abs(z - n) < tol


def _check_pole(z: float, what: str) -> None:
    if _nonpositive_integer(z):
        raise PoleError(f"{what} = {z!r} is at a pole (non-positive integer)")


# ---------------------------------------------------------------------------
# gamma family
# ---------------------------------------------------------------------------


def gamma(z: float) -> float:
    """Gamma function of a real argument."""
    _check_pole(z, "gamma argument")
    return math.gamma(z)


def digamma(z: float) -> float:
    """psi_0(z) = Gamma'(z) / Gamma(z)."""
    _check_pole(z, "digamma argument")
    return float(_sp.psi(z))


def rgamma(z: float) -> float:
    """1/Gamma(z); entire, exactly zero at the poles of Gamma."""
    if _nonpositive_integer(z, 1e-14):
        return 0.0
    return float(_sp.rgamma(z))


def drgamma(z: float) -> float:
    """Derivative of 1/Gamma(z).

    Equals -psi(z)/Gamma(z) away from the poles and (-1)^n n! at z = -n.
    """
    if _nonpositive_integer(z, 1e-12):
        n = -round(z)
        return (-1.0) ** n * math.factorial(n)
    return -float(_sp.psi(z)) * float(_sp.rgamma(z))


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------


def _scalar_or_array(x, out):
    return float(out) if np.ndim(x) == 0 else out


def bessel_j(nu: float, x):
    """J_nu(x) for real order nu > -1 and x >= 0 (scalar or array)."""
    if not nu > -1.0:
        raise DomainError(f"bessel_j order must exceed -1, got {nu!r}")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("bessel_j argument must be non-negative")
    return _scalar_or_array(x, _sp.jv(nu, xa))


def bessel_y(nu: float, x):
    """Y_nu(x) for real order nu and x > 0 (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError("bessel_y argument must be positive")
    return _scalar_or_array(x, _sp.yv(nu, xa))


def _jv(nu, x):
    # unchecked: negative orders are needed by the Lommel-form moment formula
    return _sp.jv(nu, x)


# ---------------------------------------------------------------------------
# 1F2
# ---------------------------------------------------------------------------


def _sum_1f2(a, b, c, z, ctx: SeriesContext, which: str | None, dps: int | None):
    """Sum 1F2 (which=None) or its derivative in parameter A/B/C.

    The k-th term is P_k = prod_{i<k} rho_i with
    rho_i = (a+i) z / ((b+i)(c+i)(i+1)); the derivative is carried by the
    product rule so that terminating series (a a non-positive integer)
    stay finite.
    """
    if dps is not None:
        with mpmath.workdps(dps):
            a, b, c, z = (mpmath.mpf(v) for v in (a, b, c, z))
            return _sum_1f2_loop(a, b, c, z, ctx, which, exact=True)
    return _sum_1f2_loop(float(a), float(b), float(c), float(z), ctx, which, exact=False)


def _sum_1f2_loop(a, b, c, z, ctx, which, exact):
    one = a * 0 + 1
    t = one  # value term
    dt = 0 * one  # derivative term
    tracked = t if which is None else dt
    s, comp = tracked, 0 * one  # Kahan sum and compensation
    mag = abs(tracked)
    small = 0
    k = 0
    converged = False
    tail = abs(tracked)
    while k < ctx.max_terms:
        den = (b + k) * (c + k) * (k + 1)
        rho = (a + k) * z / den
        if which is None:
            drho = 0
        elif which == "A":
            drho = z / den
        elif which == "B":
            drho = -rho / (b + k)
        elif which == "C":
            drho = -rho / (c + k)
        else:
            raise ValueError(f"which must be 'A', 'B' or 'C', got {which!r}")
        dt = dt * rho + t * drho
        t = t * rho
        k += 1
        x = t if which is None else dt
        y = x - comp
        tot = s + y
        comp = (tot - s) - y
        s = tot
        ax = abs(x)
        mag += ax
        tail = ax
        if t == 0 and dt == 0:
            converged = True
            break
        if abs(rho) < 1 and ax <= ctx.rel_tol * abs(s) + ctx.abs_tol:
            small += 1
            if small >= 2:
                converged = True
                break
        else:
            small = 0
    return SeriesResult(float(s), k + 1, converged, float(tail), float(mag))


def _check_1f2_params(b: float, c: float) -> None:
    _check_pole(b, "1F2 denominator parameter b")
    _check_pole(c, "1F2 denominator parameter c")


def hyp1f2(a: float, b: float, c: float, z: float, ctx: SeriesContext | None = None) -> SeriesResult:
    """sum_k (a)_k / ((b)_k (c)_k) z^k / k!, summed in double precision."""
    _check_1f2_params(b, c)
    return _sum_1f2(a, b, c, z, ctx or DEFAULT_CONTEXT, None, None)


def hyp1f2_dparam(a: float, b: float, c: float, z: float, which: str,
                  ctx: SeriesContext | None = None) -> SeriesResult:
    """Derivative of 1F2(a; b, c; z) with respect to a, b or c.

    ``which`` is ``"A"``, ``"B"`` or ``"C"``.  Term k is differentiated
    through the Pochhammer symbols, d/da (a)_k = (a)_k [psi(a+k) - psi(a)],
    accumulated by the product rule.
    """
    _check_1f2_params(b, c)
    return _sum_1f2(a, b, c, z, ctx or DEFAULT_CONTEXT, which.upper(), None)


def hyp1f2_accurate(a, b, c, z, which: str | None = None,
                    ctx: SeriesContext | None = None) -> SeriesResult:
    """1F2 (or a parameter derivative) with automatic extended precision.

    Sums in double first; if the observed cancellation would cost more than
    two digits, re-sums with enough extra decimal digits to absorb it.
    """
    ctx = ctx or DEFAULT_CONTEXT
    _check_1f2_params(b, c)
    res = _sum_1f2(a, b, c, z, ctx, which, None)
    if res.cancellation * _EPS <= 1e-14 and res.converged:
        return res
    # a cancelled double sum still measures the term magnitudes correctly;
    # size the working precision from them, then confirm against the new value
    dps = 20 + _digits(res.magnitude)
    for _ in range(6):
        res = _sum_1f2(a, b, c, z, ctx, which, dps)
        needed = 20 + _digits(res.cancellation)
        if needed <= dps:
            return res
        dps = needed
    return res


def _digits(x: float) -> int:
    if not math.isfinite(x):
        return 300
    return int(math.ceil(math.log10(max(x, 1.0))))


# ---------------------------------------------------------------------------
# Lommel function S_{mu,nu}
# ---------------------------------------------------------------------------


def _smallest_term_cut(env: list[float]) -> int:
    """Index of the first local minimum of a term-magnitude envelope (or its end)."""
    for k in range(1, len(env)):
        if env[k] == 0.0:
            return k
        if k + 1 < len(env) and env[k + 1] >= env[k]:
            return k
    return len(env) - 1


def _asymptotic_terms(mu: float, nu: float, z: float):
    zi2 = 1.0 / (z * z)
    t, dt = 1.0, 0.0
    ts, dts = [t], [dt]
    kmax = int(min(z / 2.0 + 6, 20000))
    for k in range(1, kmax + 1):
        base = mu - 2 * k + 1
        q = base * base - nu * nu
        dq = 2.0 * base
        t, dt = -t * q * zi2, -(dt * q + t * dq) * zi2
        ts.append(t)
        dts.append(dt)
        if abs(t) < 1e-20 * abs(ts[0]) and abs(dt) < 1e-20 * (1.0 + max(map(abs, dts))):
            break
        if t == 0.0 and dt == 0.0:
            break
    return ts, dts


def _lommel_asymptotic(mu: float, nu: float, z: float):
    """Large-z expansion; returns (S, dS/dmu, err_S, err_dS).

    Value and derivative series share one cut, at the smallest term of
    max(|t_k|, |dt_k|); a single derivative term can vanish by accident,
    so the derivative series alone is not a safe guide.
    """
    ts, dts = _asymptotic_terms(mu, nu, z)
    env = [max(abs(t), abs(d)) for t, d in zip(ts, dts)]
    cut = _smallest_term_cut(env)
    last = cut == len(ts) - 1 and env[cut] != 0.0
    s = math.fsum(ts[:cut + 1] if last else ts[:cut])
    ds = math.fsum(dts[:cut + 1] if last else dts[:cut])
    err, derr = abs(ts[cut]), abs(dts[cut])
    pref = z ** (mu - 1.0)
    lz = math.log(z)
    S = pref * s
    dS = lz * S + pref * ds
    return S, dS, pref * err, pref * (derr + lz * err)


def _check_lommel_poles(mu: float, nu: float) -> None:
    for arg, name in (((mu - nu + 1) / 2, "(mu-nu+1)/2"), ((mu + nu + 1) / 2, "(mu+nu+1)/2")):
        if _nonpositive_integer(arg):
            raise PoleError(f"Lommel S_{{{mu},{nu}}}: {name} = {arg} is a gamma pole")


def _lommel_series(mu: float, nu: float, z: float, ctx: SeriesContext, deriv: bool):
    _check_lommel_poles(mu, nu)
    b1 = (mu - nu + 3) / 2
    c1 = (mu + nu + 3) / 2
    w = -z * z / 4
    denom = (mu + 1) ** 2 - nu * nu
    F = hyp1f2_accurate(1.0, b1, c1, w, None, ctx).value
    P = z ** (mu + 1) / denom
    K = 2.0 ** (mu - 1) * math.gamma((mu - nu + 1) / 2) * math.gamma((mu + nu + 1) / 2)
    th = math.pi * (mu - nu) / 2
    J = float(_jv(nu, z))
    Y = float(_sp.yv(nu, z))
    B = math.sin(th) * J - math.cos(th) * Y
    S = P * F + K * B
    if not deriv:
        return S, None
    FB = hyp1f2_accurate(1.0, b1, c1, w, "B", ctx).value
    FC = hyp1f2_accurate(1.0, b1, c1, w, "C", ctx).value
    dP = P * (math.log(z) - 2 * (mu + 1) / denom)
    dF = 0.5 * (FB + FC)
    dK = K * (math.log(2.0) + 0.5 * digamma((mu - nu + 1) / 2) + 0.5 * digamma((mu + nu + 1) / 2))
    dB = 0.5 * math.pi * (math.cos(th) * J + math.sin(th) * Y)
    return S, dP * F + P * dF + dK * B + K * dB


def _lommel(mu, nu, z, ctx, branch, tol, deriv):
    if not z > 0:
        raise DomainError(f"Lommel argument must be positive, got {z!r}")
    ctx = ctx or DEFAULT_CONTEXT
    if branch not in (None, "series", "asymptotic"):
        raise ValueError(f"unknown branch {branch!r}")
    use = branch or ("asymptotic" if z >= LOMMEL_SWITCH else "series")
    if use == "asymptotic":
        S, dS, eS, edS = _lommel_asymptotic(mu, nu, z)
        val, err = (dS, edS) if deriv else (S, eS)
        if err <= tol * abs(val):
            return val
        if branch == "asymptotic":
            raise BranchFailure(
                f"asymptotic Lommel expansion at z={z} reaches only {err:.2e} absolute")
    S, dS = _lommel_series(mu, nu, z, ctx, deriv)
    return dS if deriv else S


def lommel_s(mu: float, nu: float, z: float, ctx: SeriesContext | None = None,
             branch: str | None = None, tol: float = 1e-10) -> float:
    """Lommel function of the second kind S_{mu,nu}(z), z > 0.

    For z >= 50 the asymptotic series in 1/z^2 is truncated at its smallest
    term; below that (or if the asymptotic series cannot reach ``tol``) the
    1F2 representation plus the Bessel part is used.  ``branch`` forces
    ``"series"`` or ``"asymptotic"``.
    """
    return _lommel(mu, nu, z, ctx, branch, tol, False)


def lommel_s_dmu(mu: float, nu: float, z: float, ctx: SeriesContext | None = None,
                 branch: str | None = None, tol: float = 1e-10) -> float:
    """Partial derivative of S_{mu,nu}(z) with respect to mu."""
    return _lommel(mu, nu, z, ctx, branch, tol, True)
