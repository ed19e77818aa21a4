"""Skeel condition numbers of the eigenvector subsystems, the analytic bound,
and componentwise-relative perturbation experiments.

The Skeel number kappa_inf(B, x) = || |B^-1| |B| |x| ||_inf / ||x||_inf is the
right condition number for perturbations |dB| <= eps |B|: it stays small for
this matrix family even while the solution components explode, which is the
whole point of the test set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .extscalar import ExtScalar
from .matgen import GammaRatio, GeneralSystem, MatrixParams, build_eigvec_subsystem
from .oracle import OmegaSequence, eigenvalues, solve_closed_form


def skeel_exact(sys: GeneralSystem) -> float:
    """Exact Skeel condition number of G x = f via the closed-form inverse.

    y = |G||x| comes from prefix sums of |x|; z = |G^-1| y uses the separable
    closed-form entries |h_ij| = |a_i omega_i| / |d_j omega_{j+1}| when all
    signs are positive, and explicit partial products otherwise (omega ratios
    can hit 0/0 for sign-mixed diagonals). Converted to float only at the end.
    """
    if sys.n == 0:
        raise ValueError("condition number of an empty system is undefined")
    if sys.c == 0.0:
        # f = c makes x = 0 and G diagonal; |G^-1||G||v| = |v| for every v
        sys.require_nonsingular()
        return 1.0
    seq = OmegaSequence.from_system(sys)
    x = [ak * wk for ak, wk in zip(seq.a, seq.omega)]
    n = sys.n
    d = [Fraction(float(v)) for v in sys.d]
    c_abs = abs(Fraction(sys.c))
    ax = [abs(v) for v in x]
    y = []
    run = Fraction(0)
    for i in range(n):
        y.append(abs(d[i]) * ax[i] + c_abs * run)
        run += ax[i]
    positive = sys.c > 0.0 and all(float(v) > 0.0 for v in sys.d)
    z = []
    if positive:
        partial = Fraction(0)  # sum_{j<i} y_j / (d_j omega_{j+1})
        for i in range(n):
            ai, wi = seq.a[i], seq.omega[i]
            z.append(y[i] / d[i] + ai * wi * partial)
            partial += y[i] / (d[i] * wi * (1 + ai))
    else:
        for i in range(n):
            zi = y[i] / abs(d[i])
            prod = Fraction(1)
            for j in range(i - 1, -1, -1):
                zi += abs(seq.a[i] / d[j] * prod) * y[j]
                prod = prod * (1 + seq.a[j])
            z.append(zi)
    return float(max(z) / max(ax))


def skeel_bound(gamma: Union[GammaRatio, Fraction, float, int], n: int) -> float:
    """Analytic bound 2 (1 + gamma log((gamma + n - 1)/gamma)); needs gamma > 1."""
    g = gamma.as_float() if isinstance(gamma, GammaRatio) else float(gamma)
    if not g > 1.0:
        raise ValueError(f"the bound requires gamma > 1, got {g}")
    if n < 1:
        raise ValueError(f"subsystem size must be >= 1, got {n}")
    return 2.0 * (1.0 + g * math.log((g + n - 1.0) / g))


@dataclass(frozen=True)
class PerturbStats:
    """Outcome of a seeded componentwise-relative perturbation experiment."""

    epsilon: float
    trials: int
    max_componentwise_error_ratio: float
    seed: int


def perturbation_experiment(
    params: MatrixParams,
    j: int,
    epsilon: float,
    trials: int,
    seed: int,
    perturb_rhs: bool = True,
) -> PerturbStats:
    """Perturb every nonzero entry of B and f by independent (1 + delta), |delta| <= eps.

    Each perturbed system is solved in ExtScalar arithmetic (isolating the
    perturbation response from native-solver rounding) and compared against
    the exact unperturbed solution. The reported ratio is
    max |x~_i - x_i| / (eps ||x||_inf kappa_bound), maximized over trials;
    values <= 4 certify well-conditioned behavior. Per-trial RNG streams are
    spawned from the seed, so the result is order-independent and reproducible.
    perturb_rhs=False keeps f exact and perturbs the matrix alone.
    """
    if not (params.b > 0.0 and params.c > 0.0):
        raise ValueError("perturbation experiment requires b > 0 and c > 0")
    if not (0.0 < epsilon <= 1e-4):
        raise ValueError(f"epsilon must be in (0, 1e-4], got {epsilon}")
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not (1 <= j <= params.m - 1):
        raise ValueError(f"eigen-index must have a nonempty subsystem: 1 <= j <= {params.m - 1}")
    sub = build_eigvec_subsystem(params, j)
    n = sub.n
    x = solve_closed_form(sub)
    kappa_bound = skeel_bound(params.gamma().as_float(), n)
    denom = ExtScalar.from_fraction(
        Fraction(float(epsilon)) * max(abs(v) for v in x) * Fraction(kappa_bound)
    )
    x_ext = [ExtScalar.from_fraction(v) for v in x]
    d = sub.d
    c = float(sub.c)
    streams = np.random.SeedSequence(seed).spawn(trials)
    worst = ExtScalar(0.0)
    for stream in streams:
        rng = np.random.default_rng(stream)
        dd = d * (1.0 + rng.uniform(-epsilon, epsilon, n))
        low = c * (1.0 + rng.uniform(-epsilon, epsilon, n * (n - 1) // 2))
        df = rng.uniform(-epsilon, epsilon, n)
        f = c * (1.0 + df) if perturb_rhs else np.full(n, c)
        xt: list[ExtScalar] = []
        pos = 0
        for i in range(n):
            acc = ExtScalar(float(f[i]))
            for k in range(i):
                acc = acc + ExtScalar(float(low[pos])) * xt[k]
                pos += 1
            xt.append(acc / ExtScalar(float(dd[i])))
        for i in range(n):
            diff = xt[i] - x_ext[i]
            if diff.cmp_abs(worst) > 0:
                worst = diff
    ratio = (abs(worst) / denom).to_native()
    assert isinstance(ratio, float)  # ratios are O(1) by construction
    return PerturbStats(
        epsilon=float(epsilon),
        trials=trials,
        max_componentwise_error_ratio=ratio,
        seed=seed,
    )


def eigenvalue_sensitivity(params: MatrixParams, epsilon: float) -> float:
    """Worst relative eigenvalue shift under diagonal perturbation (1 + delta), |delta| <= eps.

    The eigenvalues are the diagonal entries, so the shift is exactly eps for
    every index; defined only when no eigenvalue is zero.
    """
    if not (math.isfinite(epsilon) and epsilon >= 0.0):
        raise ValueError(f"epsilon must be finite and >= 0, got {epsilon}")
    lams = eigenvalues(params)
    if np.any(lams == 0.0):
        k = int(np.argmax(lams == 0.0)) + 1
        raise ValueError(f"eigenvalue lambda_{k} is zero; relative shift undefined")
    return float(epsilon)


@dataclass(frozen=True)
class CondReport:
    """Conditioning summary for one eigenvector subsystem."""

    j: int
    n: int
    kappa_exact: float
    kappa_bound: Optional[float]  # None when gamma <= 1 (outside the bound's hypothesis)
    perturb_stats: Optional[PerturbStats] = None

    def to_jsonable(self) -> dict:
        out = {
            "j": self.j,
            "n": self.n,
            "kappa_exact": self.kappa_exact,
            "kappa_bound": self.kappa_bound,
        }
        if self.perturb_stats is not None:
            out["perturb"] = {
                "epsilon": self.perturb_stats.epsilon,
                "trials": self.perturb_stats.trials,
                "max_componentwise_error_ratio": self.perturb_stats.max_componentwise_error_ratio,
                "seed": self.perturb_stats.seed,
            }
        return out


def condition_report(
    params: MatrixParams,
    j: int,
    epsilon: Optional[float] = None,
    trials: int = 0,
    seed: int = 0,
) -> CondReport:
    """Exact kappa, the analytic bound when applicable, and optional perturbation stats."""
    if not (1 <= j <= params.m - 1):
        raise ValueError(f"eigen-index must have a nonempty subsystem: 1 <= j <= {params.m - 1}")
    sub = build_eigvec_subsystem(params, j)
    kappa = skeel_exact(sub)
    gamma = params.gamma().as_float()
    bound = skeel_bound(gamma, sub.n) if gamma > 1.0 else None
    stats = None
    if epsilon is not None and trials > 0:
        stats = perturbation_experiment(params, j, epsilon, trials, seed)
    return CondReport(j=j, n=sub.n, kappa_exact=kappa, kappa_bound=bound, perturb_stats=stats)
