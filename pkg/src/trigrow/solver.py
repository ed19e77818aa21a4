"""Forward-substitution eigenvector solvers over native floats.

Three routes through the same recurrence x_k = a_k (1 + sum_{j<k} x_j):

* naive:  plain doubles, reports the first index that leaves the
          representable range instead of silently producing infinities;
* robust: dynamically downscales the partial solution by exact powers of
          two before any update could overflow, so every intermediate stays
          finite (the scaled-solve contract of classic overflow-safe
          triangular solvers);
* ext:    ExtScalar arithmetic, immune to overflow by construction.

naive and robust share the identical accumulation order, so whenever naive
succeeds the two agree bitwise.
"""

from __future__ import annotations

import math
import sys as _sys
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np

from .extscalar import ExtScalar, ZERO
from .matgen import GeneralSystem, MatrixParams, Orientation, TriMatrix, build_eigvec_subsystem
from .oracle import eigenvalues

OMEGA = _sys.float_info.max  # largest finite double


class SolveStatus(Enum):
    OK = "ok"
    OVERFLOW_DETECTED = "overflow-detected"


class Method(str, Enum):
    NAIVE = "naive"
    ROBUST = "robust"
    EXTENDED = "extended"


@dataclass(frozen=True)
class ScaledVector:
    """Native-float vector with one power-of-two scale: represented = values * 2**scale_exp.

    The robust solver keeps every stored value within the representable range
    and accumulates the applied downscaling in scale_exp (>= 0 on growing
    problems), so the represented vector is the true solution.
    """

    values: np.ndarray
    scale_exp: int = 0

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.values)

    def component_ext(self, i: int) -> ExtScalar:
        """Exact i-th (0-based) component as an ExtScalar."""
        return ExtScalar(float(self.values[i])).scale_pow2(self.scale_exp)

    def to_ext(self) -> list[ExtScalar]:
        return [self.component_ext(i) for i in range(len(self.values))]

    def log2_components(self) -> np.ndarray:
        """log2 of component magnitudes; -inf where a stored value is zero."""
        with np.errstate(divide="ignore"):
            return np.log2(np.abs(self.values)) + self.scale_exp

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScaledVector):
            return NotImplemented
        return self.scale_exp == other.scale_exp and bool(
            np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class SolveOutcome:
    """Result of one solve: Ok with a vector, or the first overflowing index."""

    status: SolveStatus
    result: Union[ScaledVector, list[ExtScalar], None]
    overflow_index: int | None = None  # 1-based index within the solved system

    @property
    def ok(self) -> bool:
        return self.status is SolveStatus.OK


def naive_solve(sys: GeneralSystem) -> SolveOutcome:
    """Plain double-precision substitution; detects rather than prevents overflow."""
    sys.require_nonsingular()
    n = sys.n
    c = float(sys.c)
    d = sys.d.tolist()
    values = np.zeros(n)
    h = 1.0  # running 1 + sum of solved components
    for k in range(n):
        x = (c / d[k]) * h
        if not math.isfinite(x) or abs(x) > OMEGA:
            return SolveOutcome(SolveStatus.OVERFLOW_DETECTED, None, overflow_index=k + 1)
        values[k] = x
        h += x
        if not math.isfinite(h) or abs(h) > OMEGA:
            return SolveOutcome(SolveStatus.OVERFLOW_DETECTED, None, overflow_index=k + 1)
    return SolveOutcome(SolveStatus.OK, ScaledVector(values, 0))


def _safety_threshold(sys: GeneralSystem) -> float:
    """tau = OMEGA / (2 n max(1, |c| / min|d|)): one full update cannot pass OMEGA."""
    dmin = float(np.min(np.abs(sys.d)))
    ratio = abs(sys.c) / dmin
    if not math.isfinite(ratio):
        raise ValueError("system scale |c|/min|d| exceeds the supported range")
    tau = OMEGA / (2.0 * sys.n * max(1.0, ratio))
    if tau <= 0.0 or not math.isfinite(tau):
        raise ValueError("safety threshold underflowed; system scale unsupported")
    return tau


def robust_solve(sys: GeneralSystem) -> ScaledVector:
    """Overflow-proof substitution: downscale by exact powers of two, never overflow.

    Whenever the next component would exceed tau, the partial solution and the
    running total are multiplied by 2**-s with the smallest s restoring
    headroom; the accumulated s is returned in scale_exp, so
    values * 2**scale_exp is the true solution.
    """
    sys.require_nonsingular()
    n = sys.n
    if n == 0:
        return ScaledVector(np.zeros(0), 0)
    c = float(sys.c)
    d = sys.d.tolist()
    tau = _safety_threshold(sys)
    values = np.zeros(n)
    h = 1.0  # (1 + sum of solved components) at the current scale
    sigma = 0
    for k in range(n):
        ak = c / d[k]
        p = abs(ak) * abs(h)
        if p > tau:
            s = max(1, math.frexp(p)[1] - math.frexp(tau)[1])
            while s > 1 and math.ldexp(p, -(s - 1)) <= tau:
                s -= 1
            while math.ldexp(p, -s) > tau:
                s += 1
            values[:k] = np.ldexp(values[:k], -s)
            h = math.ldexp(h, -s)
            sigma += s
        x = ak * h
        if not math.isfinite(x) or abs(x) > OMEGA:  # unreachable by construction
            raise ArithmeticError(f"robust solve produced a non-representable value at k={k + 1}")
        values[k] = x
        h += x
        if not math.isfinite(h):
            raise ArithmeticError(f"robust solve running total overflowed at k={k + 1}")
    return ScaledVector(values, sigma)


def ext_solve(sys: GeneralSystem) -> list[ExtScalar]:
    """The same substitution entirely in ExtScalar; cannot overflow."""
    sys.require_nonsingular()
    c = ExtScalar(sys.c)
    h = ExtScalar(1.0)
    out: list[ExtScalar] = []
    for dk in sys.d:
        x = (c / ExtScalar(float(dk))) * h
        out.append(x)
        h = h + x
    return out


# ---------------------------------------------------------------------------
# Whole-matrix eigenvector computation
# ---------------------------------------------------------------------------


def _assemble_scaled(m: int, j: int, tail: ScaledVector) -> ScaledVector:
    """Full column: zeros above the pivot, unit pivot, solved tail; one shared scale."""
    full = np.zeros(m)
    full[j - 1] = math.ldexp(1.0, -tail.scale_exp)  # may underflow for extreme scales
    full[j:] = tail.values
    return ScaledVector(full, tail.scale_exp)


def _assemble_ext(m: int, j: int, tail: list[ExtScalar]) -> list[ExtScalar]:
    return [ZERO] * (j - 1) + [ExtScalar(1.0)] + tail


def eigenvectors(params: MatrixParams, method: Method = Method.ROBUST) -> list[SolveOutcome]:
    """Solve all m eigenvector columns independently with the chosen method.

    Column j is assembled from its subsystem solution; a column that
    overflows under the naive method does not affect the others. For upper
    orientation the lower-triangular columns are solved and index-reversed.
    """
    params.require_distinct_eigenvalues()
    method = Method(method)
    m = params.m
    out: list[SolveOutcome] = []
    for j in range(1, m + 1):
        sub = build_eigvec_subsystem(params, j)
        if method is Method.EXTENDED:
            col = _assemble_ext(m, j, ext_solve(sub))
            out.append(SolveOutcome(SolveStatus.OK, col))
        elif method is Method.ROBUST:
            out.append(SolveOutcome(SolveStatus.OK, _assemble_scaled(m, j, robust_solve(sub))))
        else:
            res = naive_solve(sub)
            if res.ok:
                out.append(SolveOutcome(SolveStatus.OK, _assemble_scaled(m, j, res.result)))
            else:
                out.append(res)
    if params.orientation is Orientation.UPPER:
        out = [_reverse_outcome(o) for o in reversed(out)]
    return out


def _reverse_outcome(o: SolveOutcome) -> SolveOutcome:
    if not o.ok:
        return o
    if isinstance(o.result, ScaledVector):
        return SolveOutcome(o.status, ScaledVector(o.result.values[::-1], o.result.scale_exp))
    return SolveOutcome(o.status, list(reversed(o.result)))


def _to_ext_vector(x: Union[ScaledVector, Sequence[ExtScalar]]) -> list[ExtScalar]:
    if isinstance(x, ScaledVector):
        return x.to_ext()
    return list(x)


def residual(A: TriMatrix, lam: float, x: Union[ScaledVector, Sequence[ExtScalar]]) -> ExtScalar:
    """Scaled eigenvector residual max_i |(A - lam I) x|_i / ((||A||_inf + |lam|) max_i |x_i|).

    Evaluated entirely in ExtScalar so the scale factor of x cancels exactly.
    """
    xe = _to_ext_vector(x)
    if A.n != len(xe):
        raise ValueError(f"dimension mismatch: matrix {A.n}, vector {len(xe)}")
    support = [(k, v) for k, v in enumerate(xe) if not v.is_zero()]
    if not support:
        raise ValueError("residual of the zero vector is undefined")
    norm_a = float(np.max(np.sum(np.abs(A.entries), axis=1)))
    if not math.isfinite(norm_a):  # huge entries: accumulate exactly instead
        norm_ext = ZERO
        for i in range(A.n):
            row = ZERO
            for v in A.entries[i]:
                if v != 0.0:
                    row = row + ExtScalar(abs(float(v)))
            if row.cmp_abs(norm_ext) > 0:
                norm_ext = row
    else:
        norm_ext = ExtScalar(norm_a)
    lam_ext = ExtScalar(lam)
    xmax = ZERO
    for _, v in support:
        if v.cmp_abs(xmax) > 0:
            xmax = v
    worst = ZERO
    ent = A.entries
    for i in range(A.n):
        acc = ZERO
        for k, v in support:
            aik = float(ent[i, k])
            if aik != 0.0:
                acc = acc + ExtScalar(aik) * v
        acc = acc - lam_ext * xe[i]
        if acc.cmp_abs(worst) > 0:
            worst = acc
    denom = (norm_ext + abs(lam_ext)) * abs(xmax)
    return abs(worst) / denom


def structured_residuals(params: MatrixParams, outcomes: Sequence[SolveOutcome]) -> np.ndarray:
    """Per-column scaled residuals exploiting the generated-matrix structure.

    For column j the residual rows reduce to (i-j) b x_i - c * prefix_sum(x),
    so each column costs O(m - j) instead of a dense matrix-vector product.
    Prefix sums run in extended precision (longdouble); the column scale
    cancels in the ratio. Columns without an Ok ScaledVector yield NaN.
    """
    m = params.m
    lams = eigenvalues(params)
    row_sums = np.abs(lams) + np.arange(0, m) * abs(params.c)
    norm_a = float(np.max(row_sums))
    if not math.isfinite(norm_a):
        raise ValueError("matrix norm exceeds the native range; use residual() instead")
    res = np.full(m, np.nan)
    for idx, o in enumerate(outcomes):
        if not o.ok:
            continue
        ju = idx + 1
        j = m + 1 - ju if params.orientation is Orientation.UPPER else ju
        lam = abs(float(lams[j - 1]))
        if isinstance(o.result, ScaledVector):
            vals = o.result.values
            if params.orientation is Orientation.UPPER:
                vals = vals[::-1]
            tail = vals[j - 1 :].astype(np.longdouble)
            vmax = float(np.max(np.abs(tail)))
            if vmax == 0.0:
                continue
            if len(tail) == 1:
                res[idx] = 0.0
                continue
            prefix = np.cumsum(tail[:-1])
            i_minus_j = np.arange(1, len(tail), dtype=np.longdouble)
            rows = i_minus_j * np.longdouble(params.b) * tail[1:] - np.longdouble(params.c) * prefix
            res[idx] = float(np.max(np.abs(rows)) / ((norm_a + lam) * vmax))
        else:
            col = list(reversed(o.result)) if params.orientation is Orientation.UPPER else o.result
            res[idx] = _ext_column_residual(params, j, col[j - 1 :], norm_a, lam)
    return res


def _ext_column_residual(
    params: MatrixParams, j: int, tail: Sequence[ExtScalar], norm_a: float, lam_abs: float
) -> float:
    """Same structural residual for an ExtScalar column (O(length) per column)."""
    b = ExtScalar(params.b)
    c = ExtScalar(params.c)
    vmax = ZERO
    for v in tail:
        if v.cmp_abs(vmax) > 0:
            vmax = v
    if vmax.is_zero():
        return math.nan
    worst = ZERO
    prefix = ZERO
    for k, x in enumerate(tail):
        if k > 0:
            row = ExtScalar(float(k)) * b * x - c * prefix
            if row.cmp_abs(worst) > 0:
                worst = row
        prefix = prefix + x
    denom = (ExtScalar(norm_a) + ExtScalar(lam_abs)) * abs(vmax)
    out = (abs(worst) / denom).to_native()
    return out if isinstance(out, float) else math.nan
