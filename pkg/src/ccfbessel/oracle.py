"""Brute-force reference integrator for validation.

Globally adaptive 15-point Gauss-Kronrod quadrature (7-point Gauss
embedded), vectorised over panels and over integrand components, so a whole
family of moments can be integrated on one shared mesh.  The algebraic
endpoint singularity is removed by x = b v^q; the initial mesh resolves every
quarter period of J_m(omega x) and is graded dyadically toward 0.

Nothing here depends on the moment recurrences or closed forms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import special as _sp

from .errors import ConvergenceError, DomainError
from .moments import Kernel, MomentParams
from .problem import IntegralSpec

# Kronrod nodes/weights on [-1, 1] (non-negative half), Gauss weights for
# the even-indexed Kronrod nodes.
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])           # 15 ascending
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])
_EPS = np.finfo(float).eps
_ROUND = 8 * _EPS


def _panel_error(diff, resabs, resasc):
    """QUADPACK-style panel error: resasc min(1, (200 |K - G| / resasc)^1.5), floored at rounding."""
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(resasc > 0, resasc * np.minimum(1.0, (200.0 * diff / resasc) ** 1.5), diff)
    return np.maximum(scaled, 2 * _EPS * resabs)


class Grading(str, enum.Enum):
    SUBSTITUTION = "SqrtSubstitution"
    GRADED_MESH = "GradedMesh"


@dataclass(frozen=True)
class OracleConfig:
    abs_tol: float = 1e-15
    rel_tol: float = 1e-12
    max_panels: int = 400_000
    grading: Grading = Grading.SUBSTITUTION

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("oracle tolerances must be positive")
        object.__setattr__(self, "grading", Grading(self.grading))

    def halved(self) -> "OracleConfig":
        return OracleConfig(self.abs_tol / 2, self.rel_tol / 2, self.max_panels, self.grading)


class OracleResult(NamedTuple):
    value: float | np.ndarray
    err_est: float | np.ndarray


def adaptive_gk(func: Callable[[np.ndarray], np.ndarray], breakpoints, abs_tol: float,
                rel_tol: float, max_panels: int = 400_000) -> OracleResult:
    """Integrate a vector-valued ``func`` over [breakpoints[0], breakpoints[-1]].

    ``func`` maps an array of n abscissae to an array of shape (ncomp, n).
    Panels whose Kronrod-Gauss difference is large are bisected in batches
    until, for every component, the summed error estimate is at most
    max(abs_tol, rel_tol |value|).
    """
    edges = np.unique(np.asarray(breakpoints, dtype=float))
    if edges.size < 2:
        raise DomainError("need at least two distinct breakpoints")
    lo, hi = edges[:-1], edges[1:]
    done_val = done_err = done_abs = None
    while True:
        c = 0.5 * (lo + hi)
        h = 0.5 * (hi - lo)
        x = (c[:, None] + h[:, None] * _NODES[None, :]).ravel()
        fx = np.asarray(func(x), dtype=float)
        if fx.ndim == 1:
            fx = fx[None, :]
        fx = fx.reshape(fx.shape[0], lo.size, 15)
        if not np.all(np.isfinite(fx)):
            raise ConvergenceError("integrand produced non-finite values")
        kr = np.einsum("cpk,k->cp", fx, _KW) * h
        ga = np.einsum("cpk,k->cp", fx, _GW) * h
        resabs = np.einsum("cpk,k->cp", np.abs(fx), _KW) * h
        mean = kr / (2.0 * h)
        resasc = np.einsum("cpk,k->cp", np.abs(fx - mean[..., None]), _KW) * h
        err = _panel_error(np.abs(kr - ga), resabs, resasc)
        if done_val is None:
            done_val = np.zeros(fx.shape[0])
            done_err = np.zeros(fx.shape[0])
            done_abs = np.zeros(fx.shape[0])
        total = done_val + kr.sum(axis=1)
        total_err = done_err + err.sum(axis=1)
        # no component can be resolved below rounding of int |f|
        total_abs = done_abs + resabs.sum(axis=1)
        goal = np.maximum.reduce([np.full_like(total, abs_tol), rel_tol * np.abs(total),
                                  _ROUND * total_abs])
        narrow = h <= 64 * np.finfo(float).eps * np.maximum(np.abs(c), 1e-300)
        share = err / goal[:, None]
        # split panels carrying more than their fair share of any component's budget
        npan = lo.size
        split = (share.max(axis=0) * npan > 0.25) & ~narrow
        if np.all(total_err <= goal) or not np.any(split):
            return OracleResult(total, total_err)
        keep = ~split
        done_val = done_val + kr[:, keep].sum(axis=1)
        done_err = done_err + err[:, keep].sum(axis=1)
        done_abs = done_abs + resabs[:, keep].sum(axis=1)
        mid = c[split]
        lo = np.concatenate([lo[split], mid])
        hi = np.concatenate([mid, hi[split]])
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
        if lo.size > max_panels:
            raise ConvergenceError(
                f"oracle exceeded {max_panels} active panels (error {total_err.max():.2e})",
                best=OracleResult(total, total_err))


def _substitution_power(alpha: float, m: float) -> int:
    # x^(alpha + min(m, 0)) is the strongest endpoint singularity
    beta = alpha + min(m, 0.0)
    return max(1, math.ceil(2.0 / (1.0 + beta)))


def _dyadic(top: float, floor_exp: int) -> np.ndarray:
    return top * 2.0 ** -np.arange(1, floor_exp + 1)


def _make_integrand(b, alpha, m, omega, log, g, grading):
    """Return (integrand in the integration variable, breakpoints)."""
    ncross = max(1, math.ceil(b * omega / (0.5 * math.pi)))
    xs = np.linspace(0.0, b, ncross + 1)
    if grading is Grading.SUBSTITUTION:
        q = _substitution_power(alpha, m)
        vs = (xs / b) ** (1.0 / q)
        first = vs[1]
        depth = 60 if log else 24
        pts = np.concatenate([vs, _dyadic(first, depth)])

        def h(v):
            x = b * v**q
            w = b ** (alpha + 1.0) * q * v ** (q * (alpha + 1.0) - 1.0)
            val = w * g(x) * _sp.jv(m, omega * x)
            if log:
                val = val * (math.log(b) + q * np.log(v))
            return val

        return h, pts
    # graded mesh in x directly; the geometric panels absorb x^alpha
    beta = alpha + min(m, 0.0)
    depth = min(1000, int(math.ceil((60.0 if log else 56.0) / (1.0 + beta))))
    pts = np.concatenate([xs, _dyadic(xs[1], depth)])

    def h(x):
        val = x**alpha * g(x) * _sp.jv(m, omega * x)
        if log:
            val = val * np.log(x)
        return val

    return h, pts


def _spec_guard(spec: IntegralSpec) -> None:
    if spec.r > 1e4:
        raise DomainError(f"oracle supports b*omega <= 1e4, got {spec.r}")


def reference_integral(spec: IntegralSpec, f: Callable, cfg: OracleConfig | None = None
                       ) -> OracleResult:
    """Brute-force value of int_0^b x^alpha [ln x] f(x) J_m(omega x) dx."""
    cfg = cfg or OracleConfig()
    _spec_guard(spec)

    def g(x):
        return np.asarray(f(x), dtype=float)[None, :]

    h, pts = _make_integrand(spec.b, spec.alpha, spec.m, spec.omega, spec.is_log, g, cfg.grading)
    res = adaptive_gk(h, pts, cfg.abs_tol, cfg.rel_tol, cfg.max_panels)
    return OracleResult(float(res.value[0]), float(res.err_est[0]))


def reference_moments(p: MomentParams, J: int, kernel: Kernel | str = Kernel.PLAIN,
                      cfg: OracleConfig | None = None) -> OracleResult:
    """Brute-force M_0..M_J (or log moments) on [0, 1] with all j on one mesh."""
    cfg = cfg or OracleConfig()
    kernel = Kernel(kernel)
    if p.r > 1e4:
        raise DomainError(f"oracle supports r <= 1e4, got {p.r}")
    js = np.arange(J + 1)

    def g(x):
        t = np.clip(2.0 * x - 1.0, -1.0, 1.0)
        return np.cos(np.outer(js, np.arccos(t)))

    h, pts = _make_integrand(1.0, p.alpha, p.m, p.r, kernel is Kernel.LOG, g, cfg.grading)
    return adaptive_gk(h, pts, cfg.abs_tol, cfg.rel_tol, cfg.max_panels)
