"""The integral being computed: int_0^b x^alpha [ln x] f(x) J_m(omega x) dx."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .moments import Kernel, MomentParams


@dataclass(frozen=True)
class IntegralSpec:
    b: float
    alpha: float
    m: float
    omega: float
    kernel: Kernel = Kernel.PLAIN

    def __post_init__(self):
        object.__setattr__(self, "kernel", Kernel(self.kernel))
        for name in ("b", "alpha", "m", "omega"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not math.isfinite(v):
                raise DomainError(f"{name} must be a finite real, got {v!r}")
        if not self.b > 0:
            raise DomainError(f"b must be positive, got {self.b}")
        if not self.omega > 0:
            raise DomainError(f"omega must be positive, got {self.omega}")
        # the remaining constraints are those of the moment parameters
        MomentParams(self.b * self.omega, self.m, self.alpha)

    @property
    def r(self) -> float:
        return self.b * self.omega

    @property
    def moment_params(self) -> MomentParams:
        return MomentParams(self.r, self.m, self.alpha)

    @property
    def is_log(self) -> bool:
        return self.kernel is Kernel.LOG

    @property
    def supports_rates(self) -> bool:
        """Error-rate statements assume omega >= 1."""
        return self.omega >= 1.0
