"""Registry of reference cases and the golden-value file they are frozen into.

File format: a header line, then one record per case

    case_id,b,alpha,m,omega,kernel,value,err_est

with floats written by ``repr`` (shortest round-trip form).  Moment cases
use function id ``T{j}`` (the shifted Chebyshev polynomial T_j(2x - 1)) on
b = 1 with omega = r.
"""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .functions import get_function
from .moments import Kernel, MomentParams
from .oracle import OracleConfig, reference_integral, reference_moments
from .problem import IntegralSpec

HEADER = ("case_id", "b", "alpha", "m", "omega", "kernel", "value", "err_est")
GOLDEN_CONFIG = OracleConfig(abs_tol=1e-18, rel_tol=1e-15)
DEFAULT_PATH = Path(__file__).resolve().parents[2] / "tests" / "data" / "golden.csv"

MOMENT_R = (5.0, 20.0, 100.0)
MOMENT_M = (0.0, 0.5, 1.0, 2.0)
MOMENT_ALPHA = (-0.5, -0.25, 0.0, 0.5, 1.0)
MOMENT_J = 24


def _fmt(v: float) -> str:
    return f"{float(v):g}"


@dataclass(frozen=True)
class GoldenCase:
    fid: str
    b: float
    alpha: float
    m: float
    omega: float
    kernel: Kernel

    @property
    def case_id(self) -> str:
        return (f"{self.fid}/{self.kernel.value}/b={_fmt(self.b)}/alpha={_fmt(self.alpha)}"
                f"/m={_fmt(self.m)}/omega={_fmt(self.omega)}")

    @property
    def spec(self) -> IntegralSpec:
        return IntegralSpec(self.b, self.alpha, self.m, self.omega, self.kernel)

    @property
    def moment_index(self) -> int | None:
        if self.fid.startswith("T") and self.fid[1:].isdigit():
            return int(self.fid[1:])
        return None


def _case(fid, b, alpha, m, omega, kernel="plain"):
    return GoldenCase(fid, float(b), float(alpha), float(m), float(omega), Kernel(kernel))


def _moment_cases():
    out = []
    for r in MOMENT_R:
        for m in MOMENT_M:
            for a in MOMENT_ALPHA:
                for kern in ("plain", "log"):
                    out += [_case(f"T{j}", 1, a, m, r, kern) for j in range(MOMENT_J + 1)]
    for kern in ("plain", "log"):
        out += [_case(f"T{j}", 1, -0.5, 0, 10, kern) for j in range(41)]
    return out


def _function_cases():
    out = [_case("exp", 1, -0.5, 0, w) for w in (20, 50, 100, 200, 400, 800)]
    out += [_case("exp", 1, 0, 0, w, "log") for w in (100, 200, 400, 800)]
    out += [
        _case("exp", 1, 0, 1, 50, "log"),
        _case("exp", 1, 0, 0, 20),
        _case("abs_power:3", 1, 0, 0, 10),
        _case("abs_power:3", 1, -0.75, 0, 10),
        _case("reciprocal", 1, -0.5, 0, 200),
        _case("cos5", 2, 0.5, 2, 80, "log"),
        _case("poly2", 1, -0.5, 0, 30),
        _case("x4", 1, 0, 0, 40),
        _case("one", 1, 0, 1, 60),
        _case("one", 1, 0, 0, 5, "log"),
        _case("runge", 1, 0, 0, 50),
        _case("runge", 1, -0.25, 0.5, 30, "log"),
        _case("exp", 0.5, 0.5, 1, 40),
        _case("exp", 2, 0.5, 1, 10),
        _case("cos5", 0.5, -0.5, 0, 60, "log"),
        _case("reciprocal", 3, 0.25, 1, 20, "log"),
    ]
    return out


def golden_cases() -> list[GoldenCase]:
    """All registry cases, in file order."""
    return _moment_cases() + _function_cases()


def _compute(cases, cfg):
    rows = {}
    groups = defaultdict(list)
    for c in cases:
        if c.moment_index is not None and c.b == 1.0:
            groups[(c.alpha, c.m, c.omega, c.kernel)].append(c)
        else:
            res = reference_integral(c.spec, get_function(c.fid, c.b), cfg)
            rows[c] = (res.value, res.err_est)
    for (a, m, r, kern), members in groups.items():
        J = max(c.moment_index for c in members)
        res = reference_moments(MomentParams(r, m, a), J, kern, cfg)
        for c in members:
            j = c.moment_index
            rows[c] = (float(res.value[j]), float(res.err_est[j]))
    return rows


def generate_rows(only: str | None = None, cfg: OracleConfig = GOLDEN_CONFIG):
    """(case, value, err_est) for every case whose id contains ``only``."""
    cases = [c for c in golden_cases() if only is None or only in c.case_id]
    vals = _compute(cases, cfg)
    return [(c, *vals[c]) for c in cases]


def format_rows(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for c, value, err in rows:
        w.writerow([c.case_id, repr(c.b), repr(c.alpha), repr(c.m), repr(c.omega),
                    c.kernel.value, repr(float(value)), repr(float(err))])
    return buf.getvalue()


def write_golden(path, only: str | None = None) -> int:
    rows = generate_rows(only)
    Path(path).write_text(format_rows(rows), encoding="ascii")
    return len(rows)


@dataclass(frozen=True)
class GoldenRecord:
    case_id: str
    b: float
    alpha: float
    m: float
    omega: float
    kernel: Kernel
    value: float
    err_est: float

    @property
    def fid(self) -> str:
        return self.case_id.split("/", 1)[0]

    @property
    def spec(self) -> IntegralSpec:
        return IntegralSpec(self.b, self.alpha, self.m, self.omega, self.kernel)


def read_golden(path=DEFAULT_PATH) -> dict[str, GoldenRecord]:
    out = {}
    with open(path, newline="", encoding="ascii") as fh:
        rd = csv.reader(fh)
        header = tuple(next(rd))
        if header != HEADER:
            raise ValueError(f"unexpected golden header {header}")
        for row in rd:
            cid, b, a, m, w, k, v, e = row
            out[cid] = GoldenRecord(cid, float(b), float(a), float(m), float(w), Kernel(k),
                                    float(v), float(e))
    return out


def moment_values(records: dict[str, GoldenRecord], r, m, alpha, kernel, J: int) -> np.ndarray:
    """Golden M_0..M_J (or log moments) for one parameter triple."""
    vals = []
    for j in range(J + 1):
        cid = _case(f"T{j}", 1, alpha, m, r, kernel).case_id
        vals.append(records[cid].value)
    return np.array(vals)
