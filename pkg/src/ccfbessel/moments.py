"""Modified moments of the singular Bessel weight against shifted Chebyshev polynomials.

    M_j  = int_0^1 x^alpha T*_j(x) J_m(r x) dx
    Mt_j = int_0^1 x^alpha ln(x) T*_j(x) J_m(r x) dx

with T*_j(x) = T_j(2x - 1).  Both obey an order-8 linear recurrence in j
(offsets -4..4, no +-3 terms); the log moments carry an inhomogeneous
right-hand side built from M_{j-2}..M_{j+2}.  The recurrence is run forward
when r >= 2J and otherwise solved as a banded boundary-value problem with
asymptotic end values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy.linalg import lapack

from . import specfun as sf
from .errors import (ConvergenceError, DomainError, InconsistencyError, InstabilityError,
                     RegimeError, SingularSystemError)

LARGE_R = 50.0
BVP_TOL = 1e-11
BVP_MAX_K = 2**16
UNDERFLOW = 1e-300


class Regime(str, enum.Enum):
    FORWARD = "Forward"
    BOUNDARY_VALUE = "BoundaryValue"


class Kernel(str, enum.Enum):
    PLAIN = "plain"
    LOG = "log"


@dataclass(frozen=True)
class MomentParams:
    """(r, m, alpha) with r = b*omega; requires m + alpha > -1."""

    r: float
    m: float
    alpha: float

    def __post_init__(self):
        for name in ("r", "m", "alpha"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite, got {v!r}")
        if not self.r > 0:
            raise DomainError(f"r must be positive, got {self.r}")
        if not self.m > -1:
            raise DomainError(f"Bessel order m must exceed -1, got {self.m}")
        if not self.alpha > -1:
            raise DomainError(f"alpha must exceed -1, got {self.alpha}")
        if not self.m + self.alpha > -1:
            raise DomainError(f"need m + alpha > -1, got {self.m + self.alpha}")

    def shifted(self, k: float) -> "MomentParams":
        return MomentParams(self.r, self.m, self.alpha + k)


@dataclass(frozen=True)
class MomentTable:
    params: MomentParams
    J: int
    M: np.ndarray
    Mlog: np.ndarray | None
    regime: Regime
    residual: float
    K: int | None = None
    log_residual: float | None = field(default=None)


# ---------------------------------------------------------------------------
# G(r, m, alpha) = int_0^1 x^alpha J_m(r x) dx
# ---------------------------------------------------------------------------


def _neumann_coeffs(m: float, alpha: float, n: int):
    """Series coefficients c_j and dc_j/dalpha for the Bessel-series form of G.

    c_j = Gamma(a+j) / (Gamma(a) (c0)_{j+1}), a = (m-alpha+1)/2,
    c0 = (m+alpha+1)/2; built by ratios so poles of Gamma(a) never appear.
    """
    a = 0.5 * (m - alpha + 1.0)
    c0 = 0.5 * (m + alpha + 1.0)
    c = np.empty(n)
    dc = np.empty(n)
    c[0] = 1.0 / c0
    dc[0] = -0.5 / (c0 * c0)
    for j in range(n - 1):
        den = c0 + j + 1.0
        rho = (a + j) / den
        drho = -0.5 / den - 0.5 * (a + j) / (den * den)
        c[j + 1] = c[j] * rho
        dc[j + 1] = dc[j] * rho + c[j] * drho
    return c, dc


def _G_neumann(p: MomentParams, deriv: bool) -> float:
    """G = (1/r) sum_j (m+2j+1) c_j J_{m+2j+1}(r)."""
    r, m = p.r, p.m
    n = int(math.ceil(0.5 * (r + 40.0 + 4.0 * r ** (1.0 / 3.0)))) + 8
    while True:
        orders = m + 2.0 * np.arange(n) + 1.0
        jv = sf._jv(orders, r)
        c, dc = _neumann_coeffs(m, p.alpha, n)
        w = c if not deriv else dc
        terms = orders * w * jv
        peak = np.max(np.abs(terms))
        if np.all(np.abs(terms[-4:]) <= 1e-18 * peak) or n > 4000:
            break
        n *= 2
    return float(math.fsum(terms[::-1])) / r


def _G_hyp(p: MomentParams, deriv: bool) -> float:
    """Power-series form: (r/2)^m / (Gamma(m+1)(alpha+m+1)) 1F2(c0; m+1, c0+1; -r^2/4)."""
    r, m, al = p.r, p.m, p.alpha
    s = al + m + 1.0
    a, b, c, z = 0.5 * s, m + 1.0, 0.5 * s + 1.0, -0.25 * r * r
    pref = (0.5 * r) ** m * sf.rgamma(m + 1.0) / s
    F = sf.hyp1f2_accurate(a, b, c, z).value
    if not deriv:
        return pref * F
    Fa = sf.hyp1f2_accurate(a, b, c, z, "A").value
    Fc = sf.hyp1f2_accurate(a, b, c, z, "C").value
    return pref * (0.5 * Fa + 0.5 * Fc) - pref * F / s


def _G_lommel(p: MomentParams, deriv: bool) -> float:
    """Lommel form, used for large r.

    G = 2^a Gamma(c0)/Gamma(a') / r^{alpha+1}
        + r^{-alpha} [(alpha+m-1) J_m S_{alpha-1,m-1}(r) - J_{m-1} S_{alpha,m}(r)]
    with c0 = (m+alpha+1)/2, a' = (m-alpha+1)/2.
    """
    r, m, al = p.r, p.m, p.alpha
    c0 = 0.5 * (m + al + 1.0)
    a = 0.5 * (m - al + 1.0)
    g = math.gamma(c0)
    rg = sf.rgamma(a)
    scale = 2.0**al * r ** (-al - 1.0)
    A = scale * g * rg
    Jm = float(sf._jv(m, r))
    Jm1 = float(sf._jv(m - 1.0, r))
    S1 = sf.lommel_s(al - 1.0, m - 1.0, r)
    S2 = sf.lommel_s(al, m, r)
    ra = r ** (-al)
    L = ra * ((al + m - 1.0) * Jm * S1 - Jm1 * S2)
    if not deriv:
        return A + L
    dA = A * (math.log(2.0) - math.log(r)) + scale * (
        0.5 * g * sf.digamma(c0) * rg - 0.5 * g * sf.drgamma(a))
    dS1 = sf.lommel_s_dmu(al - 1.0, m - 1.0, r)
    dS2 = sf.lommel_s_dmu(al, m, r)
    dL = -math.log(r) * L + ra * (Jm * S1 + (al + m - 1.0) * Jm * dS1 - Jm1 * dS2)
    return dA + dL


_G_METHODS = {"neumann": _G_neumann, "lommel": _G_lommel, "hypergeometric": _G_hyp}


def _select(p: MomentParams) -> str:
    return "lommel" if p.r >= LARGE_R else "neumann"


def _checked(p: MomentParams, deriv: bool, method: str | None, check: bool) -> float:
    name = method or _select(p)
    if name not in _G_METHODS:
        raise ValueError(f"unknown method {name!r}; choose from {sorted(_G_METHODS)}")
    val = _G_METHODS[name](p, deriv)
    if check:
        other = _G_METHODS["hypergeometric" if name != "hypergeometric" else "neumann"](p, deriv)
        if abs(val - other) > 1e-8 * max(abs(val), abs(other), 1e-300) + 1e-14:
            raise InconsistencyError(
                f"G representations disagree at {p}: {name}={val!r}, other={other!r}")
    if not math.isfinite(val):
        raise InconsistencyError(f"non-finite G at {p}")
    return val


def base_moment_G(p: MomentParams, method: str | None = None, check: bool = False) -> float:
    """int_0^1 x^alpha J_m(r x) dx.

    Lommel form for r >= 50, Bessel (Neumann) series below.  ``check``
    compares against the 1F2 power-series form and raises
    InconsistencyError beyond 1e-8 relative.
    """
    return _checked(p, False, method, check)


def base_moment_dG(p: MomentParams, method: str | None = None, check: bool = False) -> float:
    """d/dalpha of ``base_moment_G`` = int_0^1 x^alpha ln(x) J_m(r x) dx."""
    return _checked(p, True, method, check)


_EXT_DPS = 30


def _G_extended(r: float, m: float, alpha: float, deriv: bool):
    """G or dG/dalpha as an mpmath number, from the 1F2 form at extended precision."""
    r, m = mpmath.mpf(r), mpmath.mpf(m)

    def G(a):
        s = a + m + 1
        return (r / 2) ** m * mpmath.rgamma(m + 1) / s * mpmath.hyp1f2(s / 2, m + 1, s / 2 + 1,
                                                                        -r * r / 4)

    a = mpmath.mpf(alpha)
    return mpmath.diff(G, a) if deriv else G(a)


@lru_cache(maxsize=1024)
def _initial(r: float, m: float, alpha: float, deriv: bool) -> tuple:
    # the combination for M_3 cancels about two digits, and the banded solve
    # amplifies starting-value errors roughly like j^3, so form it in 30 digits
    with mpmath.workdps(_EXT_DPS):
        g0, g1, g2, g3 = (_G_extended(r, m, alpha + k, deriv) for k in range(4))
        m0 = g0
        m1 = 2 * g1 - m0
        m2 = 8 * g2 - 4 * m1 - 3 * m0
        m3 = 32 * g3 - 6 * m2 - 15 * m1 - 10 * m0
        return tuple(float(v) for v in (m0, m1, m2, m3))


def initial_moments(p: MomentParams, deriv: bool = False) -> np.ndarray:
    """M_0..M_3 from G at alpha, alpha+1, alpha+2, alpha+3 (log moments if ``deriv``).

    M_1 = 2G(a+1) - M_0, M_2 = 8G(a+2) - 4M_1 - 3M_0,
    M_3 = 32G(a+3) - 6M_2 - 15M_1 - 10M_0, evaluated in extended precision.
    """
    return np.array(_initial(float(p.r), float(p.m), float(p.alpha), bool(deriv)))


def initial_log_moments(p: MomentParams) -> np.ndarray:
    return initial_moments(p, deriv=True)


# ---------------------------------------------------------------------------
# recurrence
# ---------------------------------------------------------------------------

OFFSETS = (4, 2, 1, 0, -1, -2, -4)
LOG_OFFSETS = (2, 1, 0, -1, -2)


def recurrence_coeffs(j, r: float, m: float, alpha: float) -> dict[int, np.ndarray]:
    """Coefficients of M_{j+k} in the homogeneous recurrence, keyed by offset k."""
    j = np.asarray(j, dtype=float)
    r2 = r * r
    d = m * m - alpha * alpha
    t = 2.0 * alpha - 1.0
    q = r2 / 16.0 + 0.0 * j
    return {
        4: q,
        2: (j + 3) * (j + 3 + 2 * alpha) - d - r2 / 4,
        1: 4 * d - 2 * (j + 2) * t,
        0: -(2 * (j * j - 4) + 6 * d - 2 * t - 3 * r2 / 8),
        -1: 4 * d + 2 * (j - 2) * t,
        -2: (j - 3) * (j - 3 - 2 * alpha) - d - r2 / 4,
        -4: q.copy(),
    }


def log_rhs_coeffs(j, alpha: float) -> dict[int, np.ndarray]:
    """Coefficients of M_{j+k} on the right-hand side of the log-moment recurrence."""
    j = np.asarray(j, dtype=float)
    return {
        2: -2 * (alpha + j + 3),
        1: 4 * (2 * alpha + j + 2),
        0: -4 * (3 * alpha + 1) + 0 * j,
        -1: 4 * (2 * alpha - j + 2),
        -2: 2 * (j - alpha - 3),
    }


def _sym(v: np.ndarray, idx: int) -> float:
    return v[abs(idx)]


def recurrence_residuals(M, p: MomentParams, js, Mlog=None):
    """Relative residuals of the recurrence at each j in ``js``.

    Residual = |sum_k c_k M_{j+k} - rhs| / (sum_k |c_k M_{j+k}| + |rhs terms|),
    using M_{-i} = M_i.  With ``Mlog`` the log recurrence is checked instead
    (``M`` then supplies its right-hand side).
    """
    out = []
    for j in js:
        cf = recurrence_coeffs(j, p.r, p.m, p.alpha)
        V = M if Mlog is None else Mlog
        terms = [float(cf[k]) * _sym(V, j + k) for k in OFFSETS]
        if Mlog is not None:
            rc = log_rhs_coeffs(j, p.alpha)
            terms += [-float(rc[k]) * _sym(M, j + k) for k in LOG_OFFSETS]
        scale = math.fsum(abs(t) for t in terms)
        out.append(abs(math.fsum(terms)) / scale if scale > 0 else 0.0)
    return np.array(out)


def moment_asymptotic(p: MomentParams, j: int, kernel: Kernel | str = Kernel.PLAIN) -> float:
    """Large-j estimate of M_j (plain) or Mt_j (log).

    Endpoint x = 1 contributes -J_m(r)/(2 j^2) (plain only); the x^{alpha+m}
    behaviour at 0 contributes (-1)^j K j^{-2beta-2}, beta = alpha + m.
    """
    if j < 1:
        raise ValueError("asymptotic estimate needs j >= 1")
    kernel = Kernel(kernel)
    r, m, al = p.r, p.m, p.alpha
    beta = al + m
    e = 2.0 * beta + 2.0
    logK = (-2 * al - 3 * m - 1) * math.log(2.0) + m * math.log(r) + math.lgamma(e) \
        - math.lgamma(m + 1.0) - e * math.log(j)
    K = (-1.0) ** j * math.exp(logK) if logK > -700 else 0.0
    th = (beta + 1.0) * math.pi
    if kernel is Kernel.PLAIN:
        return -float(sf._jv(m, r)) / (2.0 * j * j) + K * math.cos(th)
    lg = -2.0 * math.log(2.0) + 2.0 * sf.digamma(e) - 2.0 * math.log(j)
    return K * (lg * math.cos(th) - math.pi * math.sin(th))


def _end_value(p: MomentParams, j: int, kernel: Kernel) -> float:
    v = moment_asymptotic(p, j, kernel)
    return 0.0 if abs(v) < UNDERFLOW else v


# ---------------------------------------------------------------------------
# forward regime
# ---------------------------------------------------------------------------


def _forward(p: MomentParams, J: int, seed: np.ndarray, rhs_from: np.ndarray | None):
    n = max(J, 3) + 1
    V = np.zeros(n)
    V[:4] = seed
    for j in range(0, n - 4):
        cf = recurrence_coeffs(j, p.r, p.m, p.alpha)
        acc = []
        for k in OFFSETS[1:]:
            acc.append(-float(cf[k]) * V[abs(j + k)])
        lead = float(cf[4])
        if j == 0:
            lead *= 2.0  # M_{-4} = M_4
        if rhs_from is not None:
            rc = log_rhs_coeffs(j, p.alpha)
            acc += [float(rc[k]) * rhs_from[abs(j + k)] for k in LOG_OFFSETS]
        V[j + 4] = math.fsum(acc) / lead
    return V[: J + 1]


def _sanity(p: MomentParams, V: np.ndarray, log: bool, what: str) -> None:
    cap = 1.0 / (p.alpha + 1.0) ** (2 if log else 1)
    bad = ~np.isfinite(V) | (np.abs(V) > cap * (1 + 1e-9))
    if np.any(bad):
        j = int(np.argmax(bad))
        raise InstabilityError(f"{what}: |M_{j}| = {V[j]!r} violates the bound {cap:.4g}")


def _interior_residual(p, M, J, Mlog=None):
    if J < 4:
        return 0.0
    js = range(0, J - 3)
    res = recurrence_residuals(M, p, js, Mlog)
    return float(res.max()) if res.size else 0.0


def moments_forward(p: MomentParams, J: int, log: bool = False,
                    check_regime: bool = True) -> MomentTable:
    """Forward recursion; admissible when r >= 2J."""
    if J < 0:
        raise ValueError("J must be non-negative")
    if check_regime and p.r < 2 * J:
        raise RegimeError(f"forward recursion needs r >= 2J (r={p.r}, J={J})")
    Jx = J + 2 if log else J
    M_ext = _forward(p, Jx, initial_moments(p), None)
    M = M_ext[: J + 1]
    Mlog = None
    lres = None
    if log:
        Mlog = _forward(p, J, initial_log_moments(p), M_ext)
        lres = _interior_residual(p, M_ext, J, Mlog)
    res = _interior_residual(p, M, J)
    if check_regime:
        _sanity(p, M, False, "forward recursion")
        if Mlog is not None:
            _sanity(p, Mlog, True, "forward log recursion")
    return _freeze(MomentTable(p, J, M, Mlog, Regime.FORWARD, res, None, lres))


# ---------------------------------------------------------------------------
# boundary-value regime
# ---------------------------------------------------------------------------

_KL, _KU = 6, 2


def _bvp_solve(p: MomentParams, K: int, log: bool):
    """Solve for M_4..M_{K-2} from equations j = 2..K-4; returns full M_0..M_K (and Mt)."""
    n = K - 5
    js = np.arange(2, K - 3, dtype=float)
    cf = recurrence_coeffs(js, p.r, p.m, p.alpha)
    ab = np.zeros((2 * _KL + _KU + 1, n))
    known = initial_moments(p)
    rhs = np.zeros(n)
    ends = {K - 1: _end_value(p, K - 1, Kernel.PLAIN), K: _end_value(p, K, Kernel.PLAIN)}

    def known_value(idx, init, endv):
        idx = abs(idx)
        return init[idx] if idx <= 3 else endv[idx]

    # band storage for dgbtrf: ab[KL + KU + i - c, c] = A[i, c]
    for k in OFFSETS:
        coef = cf[k]
        for row in range(n):
            col_idx = int(js[row]) + k
            if 4 <= col_idx <= K - 2:
                c = col_idx - 4
                ab[_KL + _KU + row - c, c] += coef[row]
    for row in range(n):
        j = int(js[row])
        for k in OFFSETS:
            col_idx = j + k
            if not 4 <= col_idx <= K - 2:
                rhs[row] -= cf[k][row] * known_value(col_idx, known, ends)
    lu, piv, info = lapack.dgbtrf(ab, _KL, _KU)
    if info != 0:
        raise SingularSystemError(f"banded moment system singular (info={info}, K={K})")
    x, info = lapack.dgbtrs(lu, _KL, _KU, rhs, piv)
    if info != 0:
        raise SingularSystemError(f"banded back-substitution failed (info={info})")
    M = np.concatenate([known, x, [ends[K - 1], ends[K]]])
    if not log:
        return M, None
    known_t = initial_log_moments(p)
    ends_t = {K - 1: _end_value(p, K - 1, Kernel.LOG), K: _end_value(p, K, Kernel.LOG)}
    rc = log_rhs_coeffs(js, p.alpha)
    rhs_t = np.zeros(n)
    for row in range(n):
        j = int(js[row])
        acc = [rc[k][row] * M[j + k] for k in LOG_OFFSETS]
        for k in OFFSETS:
            col_idx = j + k
            if not 4 <= col_idx <= K - 2:
                acc.append(-cf[k][row] * known_value(col_idx, known_t, ends_t))
        rhs_t[row] = math.fsum(acc)
    y, info = lapack.dgbtrs(lu, _KL, _KU, rhs_t, piv)
    if info != 0:
        raise SingularSystemError(f"banded back-substitution failed (info={info})")
    Mt = np.concatenate([known_t, y, [ends_t[K - 1], ends_t[K]]])
    return M, Mt


def _rel_change(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


def moments_bvp(p: MomentParams, J: int, log: bool = False, K: int | None = None) -> MomentTable:
    """Banded boundary-value solve of the recurrence.

    Starts at K = max(2J, ceil(2r)) + 16 and doubles K until M_0..M_J (and
    the log moments, if requested) change by at most 1e-11 relative,
    capped at 2^16.  A fixed ``K`` skips the doubling.
    """
    if J < 0:
        raise ValueError("J must be non-negative")
    need = J + 2 if log else J
    if K is not None:
        if K < need + 8:
            raise ValueError(f"K={K} too small for J={J}")
        M, Mt = _bvp_solve(p, K, log)
    else:
        K = max(2 * need, int(math.ceil(2 * p.r))) + 16
        M, Mt = _bvp_solve(p, K, log)
        while True:
            K2 = 2 * K
            if K2 > BVP_MAX_K:
                raise ConvergenceError(
                    f"boundary-value moments did not settle below K={BVP_MAX_K}", best=M[: J + 1])
            M2, Mt2 = _bvp_solve(p, K2, log)
            ch = _rel_change(M2[: J + 1], M[: J + 1])
            if log:
                ch = max(ch, _rel_change(Mt2[: J + 1], Mt[: J + 1]))
            M, Mt, K = M2, Mt2, K2
            if ch <= BVP_TOL:
                break
    top = min(K - 4, max(J + 4, 8))
    res = _interior_residual(p, M, top)
    lres = _interior_residual(p, M, top, Mt) if log else None
    table = MomentTable(p, J, M[: J + 1].copy(), None if Mt is None else Mt[: J + 1].copy(),
                        Regime.BOUNDARY_VALUE, res, K, lres)
    _sanity(p, table.M, False, "boundary-value solve")
    if log:
        _sanity(p, table.Mlog, True, "boundary-value log solve")
    return _freeze(table)


def _freeze(t: MomentTable) -> MomentTable:
    t.M.setflags(write=False)
    if t.Mlog is not None:
        t.Mlog.setflags(write=False)
    return t


def log_moments(p: MomentParams, J: int, table: MomentTable | None = None) -> np.ndarray:
    """Mt_0..Mt_J, by the same regime rule as the plain moments."""
    if table is not None and table.Mlog is not None and table.J >= J:
        return table.Mlog[: J + 1]
    return compute_moments(p, J, log=True).Mlog


@lru_cache(maxsize=256)
def _cached(r, m, alpha, J, log, regime):
    p = MomentParams(r, m, alpha)
    if regime is Regime.FORWARD:
        return moments_forward(p, J, log)
    return moments_bvp(p, J, log)


def compute_moments(p: MomentParams, J: int, log: bool = False,
                    regime: Regime | str | None = None) -> MomentTable:
    """Moment table M_0..M_J (and log moments), forward when r >= 2J, banded solve otherwise."""
    if regime is None:
        regime = Regime.FORWARD if p.r >= 2 * J else Regime.BOUNDARY_VALUE
    return _cached(float(p.r), float(p.m), float(p.alpha), int(J), bool(log), Regime(regime))
