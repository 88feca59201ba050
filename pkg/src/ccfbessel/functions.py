"""Built-in test integrands with closed-form derivatives.

Names accepted by ``get_function``: one, x, exp, runge, reciprocal, cos5,
poly2, x4, and abs_power[:p] (|x - b/2|^p, default p = 3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # not a pytest class

    name: str
    b: float
    value: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[int, np.ndarray], np.ndarray]

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))

    def derivative(self, k: int, x):
        """k-th derivative at x (k = 0 gives the value)."""
        x = np.asarray(x, dtype=float)
        return self.value(x) if k == 0 else self.deriv(k, x)

    def endpoint_derivatives(self, s: int):
        """(f^(0..s)(0), f^(0..s)(b)) as two arrays."""
        d0 = np.array([float(self.derivative(k, 0.0)) for k in range(s + 1)])
        db = np.array([float(self.derivative(k, self.b)) for k in range(s + 1)])
        return d0, db


def _falling(p: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= p - i
    return out


def _poly(coeffs):
    # coeffs in increasing degree
    P = np.polynomial.Polynomial(coeffs)

    def val(x):
        return P(x) + 0.0 * x

    def der(k, x):
        return P.deriv(k)(x) + 0.0 * x

    return val, der


def _make(name: str, b: float) -> TestFunction:
    base, _, arg = name.partition(":")
    if base == "one":
        v, d = _poly([1.0])
    elif base == "x":
        v, d = _poly([0.0, 1.0])
    elif base == "poly2":
        v, d = _poly([1.0, -1.0, 1.0])
    elif base == "x4":
        v, d = _poly([0.0, 0.0, 0.0, 0.0, 1.0])
    elif base == "exp":
        v, d = np.exp, (lambda k, x: np.exp(x))
    elif base == "reciprocal":
        def v(x):
            return 1.0 / (1.0 + x)

        def d(k, x):
            return (-1.0) ** k * math.factorial(k) / (1.0 + x) ** (k + 1)
    elif base == "cos5":
        def v(x):
            return np.cos(5.0 * x)

        def d(k, x):
            return 5.0**k * np.cos(5.0 * x + 0.5 * k * math.pi)
    elif base == "runge":
        def v(x):
            t = 2.0 * x / b - 1.0
            return 1.0 / (1.0 + 25.0 * t * t)

        def d(k, x):
            t = 2.0 * np.asarray(x, dtype=float) / b - 1.0
            w = math.factorial(k) * (5j) ** k * (1.0 - 5j * t) ** (-k - 1)
            return np.real(w) * (2.0 / b) ** k
    elif base == "abs_power":
        p = float(arg) if arg else 3.0
        if not p > 0:
            raise ValueError(f"abs_power exponent must be positive, got {p}")
        c = 0.5 * b

        def v(x):
            return np.abs(x - c) ** p

        def d(k, x):
            u = np.asarray(x, dtype=float) - c
            return _falling(p, k) * np.abs(u) ** (p - k) * np.sign(u) ** k
    else:
        raise KeyError(f"unknown function {name!r}; known: {', '.join(FUNCTION_NAMES)}")
    return TestFunction(name, float(b), v, d)


FUNCTION_NAMES = ("one", "x", "exp", "runge", "reciprocal", "cos5", "poly2", "x4", "abs_power")


def get_function(name: str, b: float = 1.0) -> TestFunction:
    return _make(name, b)
